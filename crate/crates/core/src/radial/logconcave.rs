use rand::Rng;

use super::{RadialError, RadialProposal};
use crate::rng::open_unit;

/// Largest radius examined before a proposal is declared non-integrable.
const R_MAX: f64 = 1e6;
const MODE_TOL: f64 = 1e-10;
/// Stand-in for `r = 0` when evaluating the left end.
const R_MIN: f64 = 1e-300;
/// Guard added to the envelope plateau against mode-location error.
const PLATEAU_SLACK: f64 = 1e-9;

/// Rejection sampler for a log-concave `g` on `(0, ∞)`.
///
/// The envelope is flat at `g(m)` between the two points `a < m < b` where
/// `ln g` has dropped by one, with exponential tails along the chords from
/// the mode through `a` and `b`. Concavity makes each chord, extended
/// outward, an upper bound for `ln g`.
#[derive(Clone, Debug)]
pub struct LogConcaveSampler {
    proposal: RadialProposal,
    mode: f64,
    h_top: f64,
    a: f64,
    b: f64,
    h_a: f64,
    h_b: f64,
    slope_a: f64,
    slope_b: f64,
    /// Piece weights relative to `exp(h_top)`: left tail, plateau, right tail.
    w_left: f64,
    w_mid: f64,
    w_right: f64,
}

impl LogConcaveSampler {
    pub fn new(proposal: &RadialProposal) -> Result<Self, RadialError> {
        if !proposal.law.is_log_concave() {
            return Err(RadialError::NotLogConcave);
        }
        let p = proposal.clone();
        let h = |r: f64| p.log_g_unchecked(r);

        let mode = locate_mode(&h)?;
        let h_m = h(mode);
        if !h_m.is_finite() {
            return Err(RadialError::Domain(format!("log g is not finite at its mode {mode}")));
        }
        let target = h_m - 1.0;

        let (a, h_a) = if mode <= R_MIN || h(R_MIN) > target {
            (0.0, h(R_MIN))
        } else {
            let a = bisect(&h, R_MIN, mode, target);
            (a, h(a))
        };
        let mut hi = (2.0 * mode).max(1.0);
        while h(hi) > target {
            hi *= 2.0;
            if hi > R_MAX {
                return Err(RadialError::NotIntegrable(R_MAX));
            }
        }
        let b = bisect(&h, mode, hi, target);
        let h_b = h(b);

        let h_top = h_m + PLATEAU_SLACK;
        let slope_b = (h_b - h_m) / (b - mode);
        if !(slope_b < 0.0) {
            return Err(RadialError::NotIntegrable(b));
        }
        let w_right = (h_b - h_top).exp() / -slope_b;
        let (slope_a, w_left) = if a > 0.0 {
            let s = (h_m - h_a) / (mode - a);
            (s, (h_a - h_top).exp() * -(-s * a).exp_m1() / s)
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            proposal: p,
            mode,
            h_top,
            a,
            b,
            h_a,
            h_b,
            slope_a,
            slope_b,
            w_left,
            w_mid: b - a,
            w_right,
        })
    }

    pub fn mode(&self) -> f64 {
        self.mode
    }

    pub fn proposal(&self) -> &RadialProposal {
        &self.proposal
    }

    /// The points where `ln g` is one below its maximum (`a = 0` if it
    /// never drops that far on the left).
    pub fn drop_points(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// A radius beyond which `ln g` sits at least `drop` below its maximum.
    pub fn tail_bound(&self, drop: f64) -> f64 {
        self.b + (drop - 1.0).max(0.0) / -self.slope_b
    }

    /// Envelope mass relative to `g(m)`; the expected number of envelope
    /// draws per sample is this over `∫g / g(m)`.
    pub fn envelope_mass(&self) -> f64 {
        self.w_left + self.w_mid + self.w_right
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = self.envelope_mass();
        loop {
            let pick = rng.gen::<f64>() * total;
            let (r, env) = if pick < self.w_mid {
                let r = self.a + (self.b - self.a) * open_unit(rng);
                (r, self.h_top)
            } else if pick < self.w_mid + self.w_right {
                let e = -open_unit(rng).ln();
                let r = self.b - e / self.slope_b;
                (r, self.h_b + self.slope_b * (r - self.b))
            } else {
                // Exponential density ∝ exp(slope_a·(r − a)) on (0, a).
                let v = open_unit(rng);
                let r = self.a + (v * (-self.slope_a * self.a).exp_m1()).ln_1p() / self.slope_a;
                if !(r > 0.0) {
                    continue;
                }
                (r, self.h_a + self.slope_a * (r - self.a))
            };
            if !(r > 0.0) {
                continue;
            }
            let h = self.proposal.log_g_unchecked(r);
            if open_unit(rng).ln() <= h - env {
                return r;
            }
        }
    }
}

/// Golden-section search for the maximizer of a concave `h` on `(0, ∞)`.
fn locate_mode(h: &impl Fn(f64) -> f64) -> Result<f64, RadialError> {
    let mut hi = 1.0;
    while h(2.0 * hi) > h(hi) {
        hi *= 2.0;
        if hi > R_MAX {
            return Err(RadialError::NotIntegrable(R_MAX));
        }
    }
    let (mut lo, mut hi) = (0.0, 2.0 * hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..400 {
        if hi - lo <= MODE_TOL * (1.0 + lo) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = h(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = h(x1);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of `h(r) = target` on `[lo, hi]` for monotone `h`, by bisection.
fn bisect(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    let rising = h(hi) > h(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (h(mid) > target) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Beta, GeometrySpec};
    use crate::numkern::integrate_panels;
    use crate::radial::{RadialLaw, Shape};
    use crate::rng::stream;
    use crate::stats::ks_statistic;

    fn exponential() -> RadialProposal {
        RadialProposal::new(RadialLaw::custom(|r| -r, true), Shape::trivial()).unwrap()
    }

    #[test]
    fn exponential_mean() {
        let s = LogConcaveSampler::new(&exponential()).unwrap();
        assert!(s.mode() < 1e-8);
        let mut rng = stream(21, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.003, "mean {mean}");
    }

    #[test]
    fn mode_has_zero_slope() {
        let geom = GeometrySpec::spd(4, Beta::Real).unwrap();
        for sigma in [0.1, 0.4, 1.0, 3.0] {
            let p = RadialProposal::general(&geom, RadialLaw::gaussian(sigma).unwrap());
            let s = LogConcaveSampler::new(&p).unwrap();
            let m = s.mode();
            let e = 1e-5 * m;
            let slope = (p.log_g(m + e).unwrap() - p.log_g(m - e).unwrap()) / (2.0 * e);
            assert!(slope.abs() < 1e-6 * (1.0 + 1.0 / sigma), "σ={sigma} slope={slope}");
        }
    }

    #[test]
    fn rejects_flat_and_nonconcave() {
        let flat = RadialProposal::new(RadialLaw::Uniform, Shape::trivial()).unwrap();
        assert!(matches!(LogConcaveSampler::new(&flat), Err(RadialError::NotIntegrable(_))));
        let grow = RadialProposal::new(RadialLaw::custom(|r| r, true), Shape::trivial()).unwrap();
        assert!(matches!(LogConcaveSampler::new(&grow), Err(RadialError::NotIntegrable(_))));
        let bad = RadialProposal::new(RadialLaw::custom(|r| -r, false), Shape::trivial()).unwrap();
        assert_eq!(LogConcaveSampler::new(&bad).unwrap_err(), RadialError::NotLogConcave);
    }

    #[test]
    fn large_dimension_does_not_overflow() {
        let p = RadialProposal::new(
            RadialLaw::gaussian(50.0).unwrap(),
            Shape::Hyperbolic { pairs: vec![(std::f64::consts::FRAC_1_SQRT_2, 199.0)] },
        )
        .unwrap();
        let s = LogConcaveSampler::new(&p).unwrap();
        assert!(p.log_g(500.0).unwrap().is_finite());
        let mut rng = stream(22, 0);
        for _ in 0..1000 {
            let r = s.sample(&mut rng);
            assert!(r.is_finite() && r > 0.0);
        }
    }

    /// Gaussian law with a `sinh³` factor against its quadrature CDF.
    #[test]
    fn matches_quadrature_cdf() {
        let p = RadialProposal::new(
            RadialLaw::gaussian(1.0).unwrap(),
            Shape::Hyperbolic { pairs: vec![(0.7, 3.0), (0.0, 1.0)] },
        )
        .unwrap();
        let s = LogConcaveSampler::new(&p).unwrap();
        let g = |r: f64| if r <= 0.0 { 0.0 } else { p.log_g(r).unwrap().exp() };
        let total = integrate_panels(&g, 0.0, 20.0, 64, 1e-12);
        let mut rng = stream(23, 0);
        let mut xs: Vec<f64> = (0..100_000).map(|_| s.sample(&mut rng)).collect();
        let ks = ks_statistic(&mut xs, |x| integrate_panels(&g, 0.0, x.min(20.0), 4, 1e-10) / total);
        assert!(ks < 0.006, "KS {ks}");
    }
}
