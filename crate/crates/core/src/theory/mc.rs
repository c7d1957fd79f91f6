use rand::Rng;
use serde::Serialize;

use super::constants::{log_proposal_integral, COARSE};
use super::{log_surface_area, TheoryError};
use crate::manifold::{
    cut_function, direction_pairs, log_volume_density_sigma, sample_direction, GeometrySpec, Kind,
};
use crate::numkern::integrate_panels;
use crate::radial::{RadialLaw, RadialProposal, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// `Z = Ω_{d−1} E_s[∫ f(r)|det A(r,s)| dr]` over uniform directions, with
/// the inner integral by adaptive quadrature. On `U(N)` the integral stops
/// at `c(s)`.
pub fn z_target_mc<R: Rng + ?Sized>(
    geom: &GeometrySpec,
    law: &RadialLaw,
    sphere_draws: usize,
    rng: &mut R,
) -> Result<McEstimate, TheoryError> {
    if sphere_draws < 2 {
        return Err(TheoryError::Domain("need at least two sphere draws".into()));
    }
    let mut logs = Vec::with_capacity(sphere_draws);
    for _ in 0..sphere_draws {
        let dir = sample_direction(geom, rng)?;
        let log_inner = match geom.kind() {
            Kind::Spd { .. } => {
                let mut pairs = vec![(0.0, geom.rank() as f64 - 1.0)];
                pairs.extend(direction_pairs(dir.sigma()).map(|k| (k, geom.pair_multiplicity())));
                let p = RadialProposal::new(law.clone(), Shape::Hyperbolic { pairs })?;
                log_proposal_integral(&p, COARSE)?
            }
            Kind::Unitary { .. } => {
                let c = cut_function(geom, &dir);
                let h = |r: f64| law.log_f(r) + log_volume_density_sigma(geom, r, dir.sigma());
                let shift = (1..512)
                    .map(|k| h(c * k as f64 / 512.0))
                    .fold(f64::NEG_INFINITY, f64::max);
                let g = |r: f64| if r <= 0.0 || r >= c { 0.0 } else { (h(r) - shift).exp() };
                shift + integrate_panels(&g, 0.0, c, 16, 1e-10).ln()
            }
        };
        logs.push(log_inner);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let (mean, se) = crate::stats::mean_stderr(&scaled);
    let factor = (log_surface_area(geom.dim() - 1) + top).exp();
    Ok(McEstimate { value: factor * mean, stderr: factor * se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Curs, CursConfig, Variant};
    use crate::manifold::Beta;
    use crate::rng::stream;
    use crate::theory::{z_kappa, z_target_spd, ZMethod};
    use std::f64::consts::PI;

    #[test]
    fn agrees_with_pfaffian_closed_form() {
        let geom = GeometrySpec::spd(4, Beta::Real).unwrap();
        for sigma in [0.2, 0.6] {
            let law = RadialLaw::gaussian(sigma).unwrap();
            let est = z_target_mc(&geom, &law, 10_000, &mut stream(41, 0)).unwrap();
            let exact = z_target_spd(4, sigma).unwrap();
            assert!((est.value - exact).abs() < 3.0 * est.stderr, "σ={sigma}: {est:?} vs {exact}");
        }
        let geom = GeometrySpec::spd(2, Beta::Real).unwrap();
        let law = RadialLaw::gaussian(0.5).unwrap();
        let est = z_target_mc(&geom, &law, 10_000, &mut stream(42, 0)).unwrap();
        let exact = z_target_spd(2, 0.5).unwrap();
        assert!((est.value - exact).abs() < 3.0 * est.stderr, "{est:?} vs {exact}");
    }

    #[test]
    fn complex_spd_is_stable() {
        let geom = GeometrySpec::spd(2, Beta::Complex).unwrap();
        let law = RadialLaw::gaussian(0.5).unwrap();
        let est = z_target_mc(&geom, &law, 10_000, &mut stream(43, 0)).unwrap();
        assert!(est.value.is_finite() && est.stderr / est.value < 0.01);
    }

    /// Volume of `U(2)` under the trace metric is `(2π)³/1! = 8π³`.
    #[test]
    fn unitary_volume_and_acceptance() {
        let geom = GeometrySpec::unitary(2).unwrap();
        let est = z_target_mc(&geom, &RadialLaw::Uniform, 10_000, &mut stream(44, 0)).unwrap();
        let vol = 8.0 * PI.powi(3);
        assert!((est.value - vol).abs() < 3.0 * est.stderr, "{est:?} vs {vol}");

        let z0 = z_kappa(&geom, &RadialLaw::Uniform, ZMethod::Quadrature).unwrap();
        assert!((z0 - 2.0 * PI.powi(6)).abs() < 1e-8 * z0);
        let c = Curs::new(CursConfig::new(geom, RadialLaw::Uniform, Variant::CutLocus).with_seed(45))
            .unwrap();
        let stats = c.estimate_acceptance(200_000, &mut c.rng()).unwrap();
        let pi = est.value / z0;
        let tol = 3.0 * (stats.stderr().powi(2) + (est.stderr / z0).powi(2)).sqrt();
        assert!((stats.pi_hat() - pi).abs() < tol, "{} vs {pi}", stats.pi_hat());
    }
}
