//! Shared helpers for unit tests: quadrature and a Kuiper goodness-of-fit
//! statistic. Test-only code; never compiled into the library proper.

/// 1% critical point of the modified Kuiper statistic
/// `V (sqrt(n) + 0.155 + 0.24 / sqrt(n))`.
pub const KUIPER_CRIT_01: f64 = 2.001;

/// Modified Kuiper statistic for sorted probability-integral-transform
/// values in `[0, 1]`.
pub fn kuiper_modified_statistic(sorted_pit: &[f64]) -> f64 {
    let n = sorted_pit.len();
    let nf = n as f64;
    let mut d_plus: f64 = 0.0;
    let mut d_minus: f64 = 0.0;
    for (i, &u) in sorted_pit.iter().enumerate() {
        d_plus = d_plus.max((i + 1) as f64 / nf - u);
        d_minus = d_minus.max(u - i as f64 / nf);
    }
    let v = d_plus + d_minus;
    v * (nf.sqrt() + 0.155 + 0.24 / nf.sqrt())
}

/// Composite Simpson quadrature of `f` over `[a, b]` with `cells` cells.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    let mut acc = 0.0;
    for k in 0..cells {
        let x = a + k as f64 * h;
        acc += (f(x) + 4.0 * f(x + 0.5 * h) + f(x + h)) * h / 6.0;
    }
    acc
}
