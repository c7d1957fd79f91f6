//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 32;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Stop at the tolerance, at the depth limit, or once the error estimate
    // is down at rounding level and further halving cannot help.
    if depth == 0
        || !delta.is_finite()
        || delta.abs() <= 15.0 * tol
        || delta.abs() <= 64.0 * f64::EPSILON * (left.abs() + right.abs())
        || (m - a) <= f64::EPSILON * m.abs()
    {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integral over `[a, b]` split into `pieces` equal panels, each refined to a
/// share of the relative tolerance `rel_tol` against a rough magnitude guess.
///
/// Splitting first keeps the adaptive refinement from missing narrow peaks.
pub fn integrate_panels<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    pieces: usize,
    rel_tol: f64,
) -> f64 {
    let h = (b - a) / pieces as f64;
    // Crude magnitude estimate from a midpoint rule on a fine grid.
    let probe = 8 * pieces;
    let hp = (b - a) / probe as f64;
    let scale: f64 = (0..probe)
        .map(|k| f(a + (k as f64 + 0.5) * hp).abs())
        .sum::<f64>()
        * hp;
    let tol = (rel_tol * scale).max(f64::MIN_POSITIVE) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == pieces { b } else { lo + h };
            adaptive_simpson(f, lo, hi, tol)
        })
        .sum()
}
