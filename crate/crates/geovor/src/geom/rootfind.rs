/// Root isolation by interval subdivision: sample the function on a uniform
/// grid and bisect every bracket with a sign change down to width `eps`.
///
/// No derivative information and no closed forms; robustness over speed.
pub fn isolate_roots<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    slices: usize,
    eps: f64,
) -> Vec<f64> {
    let mut roots = Vec::new();
    if !(b > a) || slices == 0 {
        return roots;
    }
    let step = (b - a) / slices as f64;
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=slices {
        let x1 = a + step * i as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            push_root(&mut roots, x0, eps);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            let r = bisect(&f, x0, x1, eps);
            push_root(&mut roots, r, eps);
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        push_root(&mut roots, x0, eps);
    }
    roots
}

fn push_root(roots: &mut Vec<f64>, r: f64, eps: f64) {
    if roots.last().map_or(true, |&last| r - last > eps) {
        roots.push(r);
    }
}

/// Bisection on a bracket with opposite signs at the ends.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, eps: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..128 {
        if hi - lo <= eps {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo.signum() == fm.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Earliest root strictly greater than `after` in (a, b].
pub fn first_root_after<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    after: f64,
    slices: usize,
    eps: f64,
) -> Option<f64> {
    isolate_roots(f, a.max(after), b, slices, eps)
        .into_iter()
        .find(|&r| r > after + eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_both_roots_of_quadratic() {
        let roots = isolate_roots(|x| (x - 1.0) * (x - 3.0), 0.0, 4.0, 64, 1e-12);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 1.0).abs() < 1e-10);
        assert!((roots[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn no_roots() {
        assert!(isolate_roots(|x| x * x + 1.0, -5.0, 5.0, 64, 1e-12).is_empty());
    }

    #[test]
    fn endpoint_root() {
        let roots = isolate_roots(|x| x, 0.0, 1.0, 16, 1e-12);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].abs() < 1e-10);
    }
}
