use rand::Rng;

use super::{LogConcaveSampler, RadialError, RadialProposal, RadialSampler, Shape};
use crate::numkern::{adaptive_simpson, integrate_panels};
use crate::rng::open_unit;

const TABLE_CELLS: usize = 4096;
/// Below this share of untruncated mass inside `(0, Δ)`, rejection against
/// the untruncated sampler is abandoned for the table.
const MIN_INSIDE_SHARE: f64 = 0.5;

/// `Δ·u^{1/power}`, the inverse CDF of the law with CDF `(r/Δ)^{power}`,
/// i.e. density `∝ r^{power−1}` on `(0, Δ)`.
pub fn truncated_power_from_uniform(power: f64, delta: f64, u: f64) -> f64 {
    delta * u.powf(1.0 / power)
}

pub(super) fn build(proposal: &RadialProposal) -> Result<RadialSampler, RadialError> {
    let Shape::PowerLaw { power, truncation: delta } = proposal.shape else {
        return Err(RadialError::Invalid("expected a truncated power-law shape".into()));
    };
    if proposal.law.is_uniform() {
        return Ok(RadialSampler::TruncatedPower { power: power + 1.0, delta });
    }
    if !proposal.law.is_log_concave() {
        return Err(RadialError::NotLogConcave);
    }
    let untruncated = RadialProposal {
        law: proposal.law.clone(),
        shape: Shape::Hyperbolic { pairs: vec![(0.0, power)] },
    };
    match LogConcaveSampler::new(&untruncated) {
        Ok(inner) => {
            let h_m = untruncated.log_g_unchecked(inner.mode());
            let g = |r: f64| relative_density(&untruncated, r, h_m);
            let end = inner.tail_bound(40.0);
            let total = integrate_panels(&g, 0.0, end, 64, 1e-10);
            let inside = integrate_panels(&g, 0.0, delta.min(end), 64, 1e-10);
            if inside >= MIN_INSIDE_SHARE * total {
                return Ok(RadialSampler::TruncatedRejection { inner, delta });
            }
        }
        Err(RadialError::NotIntegrable(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(RadialSampler::TruncatedTable(InverseCdfTable::new(proposal, delta)?))
}

fn relative_density(p: &RadialProposal, r: f64, shift: f64) -> f64 {
    if r <= 0.0 {
        return (p.log_g_unchecked(f64::MIN_POSITIVE) - shift).exp();
    }
    (p.log_g_unchecked(r) - shift).exp()
}

/// Inverse-CDF sampler for `g` on `(0, Δ)`: adaptive Simpson masses on a
/// uniform grid, then Newton inversion inside the selected cell.
#[derive(Clone, Debug)]
pub struct InverseCdfTable {
    proposal: RadialProposal,
    delta: f64,
    width: f64,
    shift: f64,
    /// Cumulative masses at the grid points, `cum[0] = 0`.
    cum: Vec<f64>,
}

impl InverseCdfTable {
    pub fn new(proposal: &RadialProposal, delta: f64) -> Result<Self, RadialError> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(RadialError::Invalid(format!("truncation must be finite and positive, got {delta}")));
        }
        let width = delta / TABLE_CELLS as f64;
        let shift = (1..=TABLE_CELLS)
            .map(|k| proposal.log_g_unchecked(k as f64 * width))
            .fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(RadialError::Domain("log g is not finite on the truncation interval".into()));
        }
        let g = |r: f64| relative_density(proposal, r, shift);
        let tol = 1e-13 * width;
        let mut cum = Vec::with_capacity(TABLE_CELLS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for k in 0..TABLE_CELLS {
            let lo = k as f64 * width;
            let hi = if k + 1 == TABLE_CELLS { delta } else { lo + width };
            acc += adaptive_simpson(&g, lo, hi, tol);
            cum.push(acc);
        }
        Ok(Self { proposal: proposal.clone(), delta, width, shift, cum })
    }

    fn density(&self, r: f64) -> f64 {
        relative_density(&self.proposal, r, self.shift)
    }

    fn total(&self) -> f64 {
        self.cum[TABLE_CELLS]
    }

    fn cell_integral(&self, lo: f64, r: f64) -> f64 {
        let m = 0.5 * (lo + r);
        (r - lo) / 6.0 * (self.density(lo) + 4.0 * self.density(m) + self.density(r))
    }

    /// Normalized CDF of the truncated proposal.
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.delta {
            return 1.0;
        }
        let k = ((r / self.width) as usize).min(TABLE_CELLS - 1);
        let lo = k as f64 * self.width;
        (self.cum[k] + adaptive_simpson(&|x| self.density(x), lo, r, 1e-13 * self.width))
            / self.total()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let target = open_unit(rng) * self.total();
        let k = (self.cum.partition_point(|&c| c <= target).max(1) - 1).min(TABLE_CELLS - 1);
        let lo = k as f64 * self.width;
        let hi = if k + 1 == TABLE_CELLS { self.delta } else { lo + self.width };
        let rem = target - self.cum[k];
        let mass = self.cum[k + 1] - self.cum[k];
        let (mut a, mut b) = (lo, hi);
        let mut r = lo + (rem / mass).clamp(0.0, 1.0) * (hi - lo);
        for _ in 0..50 {
            let err = self.cell_integral(lo, r) - rem;
            if err > 0.0 {
                b = r;
            } else {
                a = r;
            }
            let g = self.density(r);
            let newton = r - err / g;
            let next = if g > 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if (next - r).abs() <= 1e-15 * hi {
                return next;
            }
            r = next;
        }
        r
    }
}
