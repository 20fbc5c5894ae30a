//! Command-line front end: run simulations to JSONL event logs, verify the
//! kinetic structure against the bisection oracle, emit event-census CSV
//! tables, and draw SVG snapshots of the diagram.

use crate::bisector::{BisectorKds, Mode};
use crate::center::SiteTrajectory;
use crate::error::GeovorError;
use crate::geom::{triangulate, HyperbolicArc, Point};
use crate::gvd::{build_gvd, run_simulation, DiagramEvent, DiagramEventKind, GvdKds};
use crate::oracle::{self, SamplingPlan};
use crate::scenarios::generators::{
    gen_center_swing, gen_grid_sweep, gen_mirrored_wineglasses, gen_pit_spikes, gen_pit_tshapes,
    gen_wineglass, SpikeVariant,
};
use crate::scenarios::{load_scenario, Scenario};
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

/// Process exit codes shared by all subcommands.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DEGENERACY: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Global tuning knobs, one per CLI flag.
#[derive(Debug, Clone, Copy)]
pub struct CliOptions {
    pub seed: u64,
    pub eps_geom: f64,
    pub eps_time: f64,
    pub event_budget: usize,
    pub mode: Mode,
}

impl Default for CliOptions {
    fn default() -> Self {
        CliOptions {
            seed: 0,
            eps_geom: 1e-9,
            eps_time: 1e-9,
            event_budget: 100_000,
            mode: Mode::Responsive,
        }
    }
}

fn exit_code_for(e: &GeovorError) -> i32 {
    match e {
        GeovorError::EventBudgetExceeded(_) => EXIT_BUDGET,
        GeovorError::DegeneracyDetected(..)
        | GeovorError::DegenerateEquidistantVertex
        | GeovorError::DegenerateCollinearCocircular
        | GeovorError::DegenerateCocircularSites
        | GeovorError::IdenticalDistanceFields => EXIT_DEGENERACY,
        _ => EXIT_USAGE,
    }
}

fn read_scenario(path: &Path) -> Result<Scenario, i32> {
    let bytes = std::fs::read(path).map_err(|e| {
        eprintln!("geovor: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })?;
    load_scenario(&bytes).map_err(|e| {
        eprintln!("geovor: invalid scenario {}: {e}", path.display());
        EXIT_USAGE
    })
}

// --- run ---------------------------------------------------------------

/// One JSONL record; field order is the log schema.
#[derive(Serialize)]
struct LogRecord<'a> {
    t: f64,
    kind: &'a str,
    sites: Vec<&'a str>,
    detail: DetailRecord<'a>,
}

#[derive(Serialize)]
struct DetailRecord<'a> {
    note: &'a str,
    resume: f64,
}

fn log_line(scenario: &Scenario, ev: &DiagramEvent) -> String {
    let record = LogRecord {
        t: ev.time,
        kind: ev.kind.name(),
        sites: ev
            .sites
            .iter()
            .map(|&i| scenario.sites[i].id.as_str())
            .collect(),
        detail: DetailRecord {
            note: &ev.detail,
            resume: ev.resume,
        },
    };
    serde_json::to_string(&record).expect("event serialization cannot fail")
}

/// Runs the scenario (optionally truncating its window at `horizon`) and
/// writes one JSONL record per event.
pub fn cmd_run(scenario_path: &Path, horizon: Option<f64>, out_log: &Path, opts: &CliOptions) -> i32 {
    let scenario = match read_scenario(scenario_path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let scenario = match horizon {
        Some(h) => {
            match Scenario::new(
                scenario.polygon.clone(),
                scenario.sites.clone(),
                (scenario.time.0, h),
            ) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("geovor: horizon {h} is invalid: {e}");
                    return EXIT_USAGE;
                }
            }
        }
        None => scenario,
    };
    let (log, _) = match run_simulation(&scenario, opts.event_budget, opts.eps_time) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("geovor: {e}");
            return exit_code_for(&e);
        }
    };
    let mut buf = String::new();
    for ev in &log {
        buf.push_str(&log_line(&scenario, ev));
        buf.push('\n');
    }
    if let Err(e) = std::fs::write(out_log, buf) {
        eprintln!("geovor: cannot write {}: {e}", out_log.display());
        return EXIT_USAGE;
    }
    EXIT_OK
}

// --- verify ------------------------------------------------------------

/// Outcome of one verification, before it is flattened to an exit code.
#[derive(Debug)]
pub struct VerifyReport {
    pub kds_events: usize,
    pub missed: usize,
    pub spurious: usize,
    pub grid_agreement: f64,
    pub max_area_error: f64,
    pub max_edge_residual: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.missed == 0
            && self.spurious == 0
            && self.grid_agreement >= 0.999
            && self.max_area_error < 1e-6
    }
}

/// Runs the KDS and the time-bisection oracle, matches the two event lists,
/// and audits snapshots between events (grid labels, cell areas, edge
/// residuals). `inject_fault` drops one KDS event before matching; it is the
/// negative control proving the comparison can fail.
pub fn verify_scenario(
    scenario: &Scenario,
    plan: &SamplingPlan,
    opts: &CliOptions,
    inject_fault: bool,
    out: &mut dyn Write,
) -> crate::Result<VerifyReport> {
    let (t0, t1) = scenario.time;
    let (log, _) = run_simulation(scenario, opts.event_budget, plan.eps_time)?;

    // Instantaneous flips are logged as a collapse/expand pair at one time;
    // the oracle sees a single fingerprint change there.
    let mut all_times: Vec<f64> = log.iter().map(|e| e.time).collect();
    all_times.dedup_by(|a, b| (*a - *b).abs() <= plan.eps_time);
    let mut kds_times = all_times.clone();
    if inject_fault && !kds_times.is_empty() {
        kds_times.remove(kds_times.len() / 2);
    }

    let tri = Arc::new(triangulate(&scenario.polygon)?);
    let trajectories: Vec<SiteTrajectory> = scenario
        .sites
        .iter()
        .map(|s| SiteTrajectory {
            pos0: s.position_at(t0),
            vel: s.vel,
        })
        .collect();
    let probe_kds = GvdKds::new(tri.clone(), trajectories, t0, plan.eps_time)?;
    let oracle_times = oracle::detect_events_by_bisection(
        |t| probe_kds.probe(t),
        t0,
        t1,
        plan.time_steps,
        plan.eps_time,
    )?;

    let tol = 5e-6 * (t1 - t0).max(1.0);
    let mut spurious = 0usize;
    for &t in &kds_times {
        let ok = oracle_times.iter().any(|&o| (o - t).abs() < tol);
        writeln!(out, "kds event t={t:.9} {}", if ok { "match" } else { "SPURIOUS" })?;
        if !ok {
            spurious += 1;
        }
    }
    let mut missed = 0usize;
    for &t in &oracle_times {
        if !kds_times.iter().any(|&k| (k - t).abs() < tol) {
            writeln!(out, "oracle event t={t:.9} MISSED")?;
            missed += 1;
        }
    }

    // Snapshot audits at the midpoint of each inter-event interval (at most
    // six, spread over the window).
    let mut bounds = vec![t0];
    bounds.extend(kds_times.iter().copied());
    bounds.push(t1);
    let mut sample_times: Vec<f64> = bounds
        .windows(2)
        .filter(|w| w[1] - w[0] > 4.0 * tol)
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect();
    if sample_times.len() > 6 {
        let step = sample_times.len() as f64 / 6.0;
        sample_times = (0..6)
            .map(|i| sample_times[(i as f64 * step) as usize])
            .collect();
    }

    let mut agree_num = 0usize;
    let mut agree_den = 0usize;
    let mut max_area_error = 0.0f64;
    let mut max_edge_residual = 0.0f64;
    let area = scenario.polygon.area();
    let eps = opts.eps_geom * scenario.polygon.diameter().max(1.0);
    for &t in &sample_times {
        let d = probe_kds.diagram_at(t)?;
        let positions = scenario.site_positions(t);
        let label_eps = 1e-7 * scenario.polygon.diameter().max(1.0);
        for gl in oracle::grid_label(&tri, &positions, plan.grid_resolution, label_eps)? {
            let Some(expect) = gl.label else { continue };
            let Some(got) = d.owner_of(gl.point, eps)? else {
                continue;
            };
            agree_den += 1;
            if got == expect {
                agree_num += 1;
            }
        }
        let total: f64 = d.cell_areas.iter().sum();
        max_area_error = max_area_error.max((total - area).abs() / area);
        for e in &d.edges {
            for x in e.arc.samples(9) {
                let dp = d.spms[e.pair.0].locate(x, eps)?.1;
                let dq = d.spms[e.pair.1].locate(x, eps)?.1;
                max_edge_residual = max_edge_residual.max((dp - dq).abs());
            }
        }
    }
    let grid_agreement = if agree_den == 0 {
        1.0
    } else {
        agree_num as f64 / agree_den as f64
    };

    // Two-site scenarios additionally exercise the selected bisector
    // maintenance mode: every bisector change must show up in the diagram
    // log. (The diagram log is a superset: its fingerprint also tracks
    // shortest-path-map structure inside the two cells.)
    if scenario.sites.len() == 2 {
        let mut b = BisectorKds::new(
            tri.clone(),
            scenario.sites[0].position_at(t0),
            scenario.sites[0].vel,
            scenario.sites[1].position_at(t0),
            scenario.sites[1].vel,
            t0,
            opts.mode,
            plan.eps_time,
        )?;
        let mut btimes = Vec::new();
        while let Some(ev) = b.next_bisector_event(t1)? {
            b.handle_bisector_event(&ev)?;
            btimes.push(ev.time);
        }
        btimes.dedup_by(|a, b| (*a - *b).abs() <= plan.eps_time);
        for &bt in &btimes {
            if !all_times.iter().any(|&kt| (kt - bt).abs() < tol) {
                writeln!(out, "bisector event t={bt:.9} absent from diagram log")?;
                spurious += 1;
            }
        }
    }

    let report = VerifyReport {
        kds_events: kds_times.len(),
        missed,
        spurious,
        grid_agreement,
        max_area_error,
        max_edge_residual,
    };
    writeln!(
        out,
        "events={} missed={} spurious={} grid_agreement={:.6} area_error={:.3e} edge_residual={:.3e}",
        report.kds_events,
        report.missed,
        report.spurious,
        report.grid_agreement,
        report.max_area_error,
        report.max_edge_residual,
    )?;
    Ok(report)
}

pub fn cmd_verify(scenario_path: &Path, plan: &SamplingPlan, opts: &CliOptions, inject_fault: bool) -> i32 {
    if plan.grid_resolution < 16 {
        eprintln!("geovor: --grid-resolution must be at least 16");
        return EXIT_USAGE;
    }
    let scenario = match read_scenario(scenario_path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let mut out = std::io::stdout();
    match verify_scenario(&scenario, plan, opts, inject_fault, &mut out) {
        Ok(report) if report.passed() => EXIT_OK,
        Ok(_) => EXIT_USAGE,
        Err(e) => {
            eprintln!("geovor: {e}");
            exit_code_for(&e)
        }
    }
}

// --- census ------------------------------------------------------------

/// One census row: scenario parameters, per-kind event counts, wall time.
/// The wall time goes to stderr, never into the CSV (byte-determinism).
#[derive(Debug, Clone)]
pub struct CensusRow {
    pub generator: String,
    pub m: usize,
    pub n: usize,
    pub counts: [usize; 11],
    pub wall: std::time::Duration,
}

#[derive(Debug, Clone, Default)]
pub struct CensusTable {
    pub rows: Vec<CensusRow>,
}

/// Builds one generated scenario by name. `n` is ignored by single-parameter
/// generators (their site count is part of the construction).
pub fn build_generated(generator: &str, m: usize, n: usize) -> crate::Result<Scenario> {
    match generator {
        "wineglass" => gen_wineglass(m),
        "center_swing" => gen_center_swing(m),
        "tshapes" => gen_pit_tshapes(m, n),
        "spikes13" => gen_pit_spikes(m, n, SpikeVariant::Deg13),
        "spikes33" => gen_pit_spikes(m, n, SpikeVariant::Deg33),
        "gridsweep" => gen_grid_sweep(m, n),
        "mirrored" => gen_mirrored_wineglasses(m, n),
        other => Err(GeovorError::InvalidScenario(format!(
            "unknown generator {other:?}; expected one of wineglass, center_swing, \
             tshapes, spikes13, spikes33, gridsweep, mirrored"
        ))),
    }
}

pub fn count_kinds(log: &[DiagramEvent]) -> [usize; 11] {
    let kinds = DiagramEventKind::all();
    let mut counts = [0usize; 11];
    for ev in log {
        let i = kinds.iter().position(|&k| k == ev.kind).unwrap();
        counts[i] += 1;
    }
    counts
}

pub fn census_header() -> String {
    let mut cols = vec!["generator".to_string(), "m".to_string(), "n".to_string()];
    cols.extend(DiagramEventKind::all().iter().map(|k| k.name().to_string()));
    cols.join(",")
}

/// Runs the generator over the size grid (every m crossed with every n) and
/// collects per-kind event counts.
pub fn run_census(
    generator: &str,
    ms: &[usize],
    ns: &[usize],
    opts: &CliOptions,
) -> crate::Result<CensusTable> {
    let mut table = CensusTable::default();
    for &m in ms {
        for &n in ns {
            let scenario = build_generated(generator, m, n)?;
            let start = Instant::now();
            let (log, _) = run_simulation(&scenario, opts.event_budget, opts.eps_time)?;
            table.rows.push(CensusRow {
                generator: generator.to_string(),
                m,
                n: scenario.sites.len().max(n),
                counts: count_kinds(&log),
                wall: start.elapsed(),
            });
        }
    }
    Ok(table)
}

pub fn write_census_csv(table: &CensusTable, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{}", census_header())?;
    for row in &table.rows {
        let counts: Vec<String> = row.counts.iter().map(|c| c.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{}",
            row.generator,
            row.m,
            row.n,
            counts.join(",")
        )?;
    }
    Ok(())
}

pub fn cmd_census(generator: &str, ms: &[usize], ns: &[usize], opts: &CliOptions) -> i32 {
    let table = match run_census(generator, ms, ns, opts) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("geovor: {e}");
            return exit_code_for(&e);
        }
    };
    let mut out = std::io::stdout();
    if let Err(e) = write_census_csv(&table, &mut out) {
        eprintln!("geovor: {e}");
        return EXIT_USAGE;
    }
    for row in &table.rows {
        eprintln!(
            "{} m={} n={}: {:.1?}",
            row.generator, row.m, row.n, row.wall
        );
    }
    EXIT_OK
}

// --- snapshot ----------------------------------------------------------

/// Rounds to nine significant digits and formats with the shortest
/// representation, the documented SVG float format.
fn svg_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(8 - mag);
    let rounded = (x * scale).round() / scale;
    format!("{rounded}")
}

/// Polyline approximation of an arc with sagitta below eps: doubles the
/// sample count until refinement stops moving points by more than eps.
fn flatten_arc(arc: &HyperbolicArc, eps: f64) -> Vec<Point> {
    if arc.is_segment() {
        return vec![arc.start(), arc.end()];
    }
    let mut n = 8usize;
    loop {
        let coarse = arc.samples(n);
        let fine = arc.samples(2 * n);
        let deviation = (0..n)
            .map(|i| {
                let mid = coarse[i].lerp(coarse[i + 1], 0.5);
                mid.dist(fine[2 * i + 1])
            })
            .fold(0.0f64, f64::max);
        if deviation <= eps || n >= 1024 {
            return fine;
        }
        n *= 2;
    }
}

/// Draws the diagram at time t: polygon outline, sites, edges flattened at
/// eps_geom, and vertices colored by degree (1 blue, 2 orange, 3 red).
pub fn render_snapshot(scenario: &Scenario, t: f64, opts: &CliOptions) -> crate::Result<String> {
    let tri = triangulate(&scenario.polygon)?;
    let positions = scenario.site_positions(t);
    let d = build_gvd(&tri, &positions)?;

    let (lo, hi) = scenario.polygon.bounding_box();
    let diam = scenario.polygon.diameter().max(1.0);
    let margin = 0.05 * diam;
    let flat_eps = opts.eps_geom * diam;
    // SVG y grows downward; geometry y is flipped about the box center.
    let fy = |y: f64| hi.y + lo.y - y;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        svg_num(lo.x - margin),
        svg_num(lo.y - margin),
        svg_num(hi.x - lo.x + 2.0 * margin),
        svg_num(hi.y - lo.y + 2.0 * margin),
    ));
    let stroke = 0.004 * diam;

    let mut outline = String::new();
    for (i, v) in scenario.polygon.vertices().iter().enumerate() {
        outline.push_str(if i == 0 { "M" } else { "L" });
        outline.push_str(&format!("{} {} ", svg_num(v.x), svg_num(fy(v.y))));
    }
    outline.push('Z');
    svg.push_str(&format!(
        "<path d=\"{outline}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>\n",
        svg_num(stroke)
    ));

    for e in &d.edges {
        let pts = flatten_arc(&e.arc, flat_eps);
        let mut path = String::new();
        for (i, p) in pts.iter().enumerate() {
            path.push_str(if i == 0 { "M" } else { "L" });
            path.push_str(&format!("{} {} ", svg_num(p.x), svg_num(fy(p.y))));
        }
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#1660a0\" stroke-width=\"{}\"/>\n",
            path.trim_end(),
            svg_num(stroke)
        ));
    }

    for v in &d.vertices {
        let color = match v.degree() {
            1 => "#3070f0",
            2 => "#f09020",
            _ => "#d02020",
        };
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>\n",
            svg_num(v.point.x),
            svg_num(fy(v.point.y)),
            svg_num(0.01 * diam)
        ));
    }

    for (s, p) in scenario.sites.iter().zip(&positions) {
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"><title>{}</title></circle>\n",
            svg_num(p.x),
            svg_num(fy(p.y)),
            svg_num(0.012 * diam),
            s.id
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn cmd_snapshot(scenario_path: &Path, t: f64, out_svg: &Path, opts: &CliOptions) -> i32 {
    let scenario = match read_scenario(scenario_path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let (t0, t1) = scenario.time;
    if t < t0 || t > t1 {
        eprintln!("geovor: t={t} outside the scenario window [{t0}, {t1}]");
        return EXIT_USAGE;
    }
    let svg = match render_snapshot(&scenario, t, opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("geovor: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = std::fs::write(out_svg, svg) {
        eprintln!("geovor: cannot write {}: {e}", out_svg.display());
        return EXIT_USAGE;
    }
    EXIT_OK
}
