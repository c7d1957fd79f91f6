use std::f64::consts::{LN_2, PI};

use super::{log_surface_area, TheoryError};
use crate::manifold::{GeometrySpec, Kind};
use crate::numkern::{
    erf, erfcx, integrate_panels, ln_gamma_half, pfaffian, LogSumExp, SkewSymmetricMatrix,
};
use crate::radial::{LogConcaveSampler, RadialLaw, RadialProposal, Shape};

/// Below this value of `(d−1)κσ` the alternating closed form loses digits
/// to cancellation and the positive series takes over.
const SERIES_LIMIT: f64 = 8.0;
const SERIES_TERMS: usize = 400;
/// Log-drop past the mode at which proposal integrals are cut off.
const TAIL_DROP: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZMethod {
    ClosedForm,
    Quadrature,
}

/// Normalizer of the distance proposal: `Ω_{d−1} ∫ f(r)(sinh(κr)/κ)^{d−1} dr`
/// on SPD, `Ω_{d−1} ∫₀^{√N·π} f(r) r^{d−1} dr` on `U(N)`.
///
/// The closed form needs a Gaussian law on an SPD geometry.
pub fn z_kappa(geom: &GeometrySpec, law: &RadialLaw, method: ZMethod) -> Result<f64, TheoryError> {
    let d = geom.dim();
    match method {
        ZMethod::ClosedForm => {
            let sigma = law.gaussian_sigma().ok_or_else(|| {
                TheoryError::UnsupportedClosedForm(format!("law {law:?} is not Gaussian"))
            })?;
            if !geom.is_spd() {
                return Err(TheoryError::UnsupportedClosedForm(
                    "the truncated flat proposal has no closed form here".into(),
                ));
            }
            let n = d - 1;
            let kappa = geom.kappa();
            let log_sum = log_alternating_sum(n, kappa * sigma);
            Ok((log_surface_area(n) + sigma.ln() - n as f64 * (2.0 * kappa).ln() + log_sum).exp())
        }
        ZMethod::Quadrature => {
            let proposal = match geom.kind() {
                Kind::Spd { .. } => RadialProposal::general(geom, law.clone()),
                Kind::Unitary { .. } => RadialProposal::truncated_flat(geom, law.clone())?,
            };
            Ok((log_surface_area(d - 1) + log_proposal_integral(&proposal, FINE)?).exp())
        }
    }
}

/// Normalizer of the sharp proposal `Ω_{d−1} ∫ f(r) r^{N−1}(sinh(κr)/κ)^{d−N} dr`.
pub fn z_sharp(geom: &GeometrySpec, law: &RadialLaw) -> Result<f64, TheoryError> {
    if !geom.is_spd() {
        return Err(TheoryError::Domain("the sharp proposal is defined on SPD only".into()));
    }
    let proposal = RadialProposal::sharp(geom, law.clone());
    Ok((log_surface_area(geom.dim() - 1) + log_proposal_integral(&proposal, FINE)?).exp())
}

/// Panel count and relative tolerance for proposal integrals.
pub(crate) type Accuracy = (usize, f64);
pub(crate) const FINE: Accuracy = (128, 1e-12);
pub(crate) const COARSE: Accuracy = (16, 1e-10);

/// `ln ∫ g` for a log-concave proposal, by adaptive Simpson.
pub(crate) fn log_proposal_integral(
    p: &RadialProposal,
    (pieces, rel_tol): Accuracy,
) -> Result<f64, TheoryError> {
    let (end, shift) = match p.shape {
        Shape::PowerLaw { truncation, .. } => {
            let shift = (1..=512)
                .map(|k| p.log_g_unchecked(truncation * k as f64 / 512.0))
                .fold(f64::NEG_INFINITY, f64::max);
            (truncation, shift)
        }
        Shape::Hyperbolic { .. } => {
            let s = LogConcaveSampler::new(p)?;
            (s.tail_bound(TAIL_DROP), p.log_g_unchecked(s.mode()))
        }
    };
    if !shift.is_finite() {
        return Err(TheoryError::Domain("proposal density is not finite".into()));
    }
    let g = |r: f64| if r <= 0.0 { 0.0 } else { (p.log_g_unchecked(r) - shift).exp() };
    let integral = integrate_panels(&g, 0.0, end, pieces, rel_tol);
    Ok(shift + integral.ln())
}

/// `ln Σⱼ (−1)ʲ C(n,j) R((n−2j)x)` with `R = Φ/φ`, which is
/// `ln ∫₀^∞ e^{−t²/2}(2 sinh(xt))ⁿ dt`.
fn log_alternating_sum(n: usize, x: f64) -> f64 {
    if n as f64 * x <= SERIES_LIMIT {
        log_positive_series(n, x)
    } else {
        log_paired_sum(n, x)
    }
}

/// Expands `(2 sinh u)ⁿ = Σₖ qₖ uᵏ` and integrates term by term:
/// `Σₖ qₖ xᵏ Mₖ` with `Mₖ = ∫₀^∞ e^{−t²/2} tᵏ dt = 2^{(k−1)/2} Γ((k+1)/2)`.
/// Every term is positive, so nothing cancels.
fn log_positive_series(n: usize, x: f64) -> f64 {
    let terms = SERIES_TERMS.max(n + SERIES_TERMS);
    let mut base = vec![0.0; terms + 1];
    let mut fact = 1.0;
    for m in 1..=terms {
        fact /= m as f64;
        if m % 2 == 1 {
            base[m] = 2.0 * fact;
        }
    }
    let mut q = vec![0.0; terms + 1];
    q[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; terms + 1];
        for (i, &a) in q.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for j in (1..=terms - i).step_by(2) {
                next[i + j] += a * base[j];
            }
        }
        q = next;
    }
    let lx = x.ln();
    q.iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(k, &c)| c.ln() + k as f64 * lx + 0.5 * (k as f64 - 1.0) * LN_2 + ln_gamma_half(k + 1))
        .collect::<LogSumExp>()
        .value()
}

/// Pairs the terms `j` and `n − j`:
/// `R(a) + R(−a) = √(2π) e^{a²/2}` and
/// `R(a) − R(−a) = √(2π) e^{a²/2} − √(2π)·erfcx(a/√2)`, then factors out
/// the largest exponential.
fn log_paired_sum(n: usize, x: f64) -> f64 {
    let a0 = n as f64 * x;
    let scale = 0.5 * a0 * a0;
    let root2pi = (2.0 * PI).sqrt();
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=n / 2 {
        if j > 0 {
            binom *= (n - j + 1) as f64 / j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        if 2 * j == n {
            // Middle term R(0) = √(π/2).
            sum += sign * binom * (0.5 * PI).sqrt() * (-scale).exp();
            continue;
        }
        let a = (n - 2 * j) as f64 * x;
        let growth = (0.5 * a * a - scale).exp();
        let v = if n % 2 == 0 {
            root2pi * growth
        } else {
            root2pi * growth - root2pi * erfcx(a / 2f64.sqrt()) * (-scale).exp()
        };
        sum += sign * binom * v;
    }
    scale + sum.ln()
}

/// `Λ(σ)` with `Λᵢⱼ = exp((i² + j²)σ²/2)·erf((j − i)σ/2)`, `0 ≤ i, j < N`.
pub fn pfaffian_matrix(n: usize, sigma: f64) -> SkewSymmetricMatrix {
    SkewSymmetricMatrix::from_upper(n, |i, j| {
        let (fi, fj) = (i as f64, j as f64);
        ((fi * fi + fj * fj) * sigma * sigma / 2.0).exp() * erf((fj - fi) * sigma / 2.0)
    })
}

/// `ln Z(σ)` for real SPD matrices of even size `N` with a Gaussian law:
/// `Z = (πσ²/2)^{N/2} 2^{N(N−1)/4} ∏ⱼ Ω_{j−1} exp(−N(N−1)²σ²/8) Pf Λ(σ)`.
pub fn log_z_target_spd(n: usize, sigma: f64) -> Result<f64, TheoryError> {
    if n == 0 || n % 2 == 1 {
        return Err(TheoryError::OddN(n));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(TheoryError::Domain(format!("σ must be positive, got {sigma}")));
    }
    let pf = pfaffian(&pfaffian_matrix(n, sigma))?;
    if !(pf > 0.0) {
        return Err(TheoryError::Domain(format!(
            "Pfaffian {pf:e} is not positive at σ = {sigma}; precision exhausted"
        )));
    }
    let nf = n as f64;
    let areas: f64 = (1..=n).map(|j| log_surface_area(j - 1)).sum();
    Ok(0.5 * nf * (PI * sigma * sigma / 2.0).ln()
        + nf * (nf - 1.0) / 4.0 * LN_2
        + areas
        - nf * (nf - 1.0).powi(2) * sigma * sigma / 8.0
        + pf.ln())
}

pub fn z_target_spd(n: usize, sigma: f64) -> Result<f64, TheoryError> {
    Ok(log_z_target_spd(n, sigma)?.exp())
}

/// `δ = σ³ d ln Z/dσ` by a central difference with step `10⁻⁴σ` and one
/// Richardson extrapolation.
pub fn delta_of_sigma(n: usize, sigma: f64) -> Result<f64, TheoryError> {
    let central = |h: f64| -> Result<f64, TheoryError> {
        Ok((log_z_target_spd(n, sigma + h)? - log_z_target_spd(n, sigma - h)?) / (2.0 * h))
    };
    let h = 1e-4 * sigma;
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(sigma.powi(3) * (4.0 * fine - coarse) / 3.0)
}

/// The `σ` at which `δ(σ)` equals `target`, by bisection.
pub fn sigma_for_delta(n: usize, target: f64) -> Result<f64, TheoryError> {
    if !(target > 0.0) {
        return Err(TheoryError::Domain(format!("δ must be positive, got {target}")));
    }
    let d = (n * (n + 1) / 2) as f64;
    let guess = (target / d).sqrt();
    let mut lo = 0.25 * guess;
    let mut hi = guess;
    while delta_of_sigma(n, lo)? > target {
        lo *= 0.5;
    }
    while delta_of_sigma(n, hi)? < target {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if delta_of_sigma(n, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
