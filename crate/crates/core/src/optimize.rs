//! One-dimensional golden-section search.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes a unimodal `f` on `[a, b]`. Stops when the bracket is narrower
/// than `tol` relative to its position (absolute when near zero) or after
/// `max_iter` steps. Returns `(argmin, min)`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol * (1.0 + 0.5 * (a.abs() + b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes a unimodal `f` on `[a, b]`. Returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let (x, v) = golden_min(|x| -f(x), a, b, tol, max_iter);
    (x, -v)
}

/// Scans `n` equally spaced points of `[a, b]`, then refines the best one by
/// golden section inside its neighbouring bracket. Non-finite values are
/// treated as `+∞`. Returns `(argmin, min)`.
pub fn scan_then_refine<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize, tol: f64) -> (f64, f64) {
    let n = n.max(2);
    let h = (b - a) / (n - 1) as f64;
    let mut clean = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = (a, clean(a));
    for i in 1..n {
        let x = if i == n - 1 { b } else { a + h * i as f64 };
        let v = clean(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let lo = (best.0 - h).max(a);
    let hi = (best.0 + h).min(b);
    let refined = golden_min(&mut clean, lo, hi, tol, 200);
    if refined.1 < best.1 {
        refined
    } else {
        best
    }
}
