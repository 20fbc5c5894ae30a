use std::sync::Arc;
use geovor::bisector::{BisectorKds, Mode};
use geovor::geom::triangulate;
use geovor::scenarios::generators::gen_wineglass;

fn run(mode: Mode) -> Vec<(f64, String)> {
    let sc = gen_wineglass(2).unwrap();
    let tri = Arc::new(triangulate(&sc.polygon).unwrap());
    let mut kds = BisectorKds::new(
        tri, sc.sites[0].pos, sc.sites[0].vel, sc.sites[1].pos, sc.sites[1].vel,
        sc.time.0, mode, 1e-9,
    ).unwrap();
    let mut out = Vec::new();
    while let Some(ev) = kds.next_bisector_event(sc.time.1).unwrap() {
        kds.handle_bisector_event(&ev).unwrap();
        out.push((ev.time, format!("{:?}", ev.kind)));
    }
    out
}

fn main() {
    let a = run(Mode::Naive);
    let b = run(Mode::Responsive);
    println!("naive {} events, responsive {}", a.len(), b.len());
    for i in 0..a.len().max(b.len()) {
        let l = a.get(i).map(|e| format!("{:.9} {}", e.0, e.1)).unwrap_or("-".into());
        let r = b.get(i).map(|e| format!("{:.9} {}", e.0, e.1)).unwrap_or("-".into());
        let mark = if l == r { " " } else { "*" };
        println!("{mark} {l:40} | {r}");
    }
}
