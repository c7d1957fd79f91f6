//! The rejection samplers.
//!
//! Every round draws a fresh direction `s`, a fresh radius `r` from the
//! variant's radial proposal and a fresh uniform `U`, and accepts when
//! `ln U` does not exceed the log acceptance ratio:
//!
//! * `General`: `ln|det A(r,s)| − (d−1) ln(sinh(κr)/κ)`.
//! * `Sharp`: `ln|det A(r,s)| − (N−1) ln r − (d−N) ln(sinh(κr)/κ)`, against
//!   the proposal `f(r)·r^{N−1}(sinh(κr)/κ)^{d−N}`.
//! * `CutLocus` (`U(N)`): rounds with `r ≥ c(s)` are rejected; otherwise the
//!   ratio is `2 Σᵢ<ⱼ ln|sinc(κᵢⱼ r)|`, against `f(r)·r^{d−1}` on `(0, √N·π)`.

use log::warn;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::manifold::{
    exp_map, sample_direction, Direction, GeometryError, GeometrySpec, Kind, Point,
};
use crate::numkern::{log_sinh_ratio, sinc};
use crate::radial::{RadialError, RadialLaw, RadialProposal, RadialSampler};
use crate::rng::{open_unit, stream};

pub const DEFAULT_MAX_ROUNDS: u64 = 100_000_000;
const WARN_AFTER: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CursError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no acceptance within {0} rounds")]
    IterationBudgetExceeded(u64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Radial(#[from] RadialError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    General,
    Sharp,
    CutLocus,
}

#[derive(Clone, Debug)]
pub struct CursConfig {
    pub geom: GeometrySpec,
    pub law: RadialLaw,
    pub variant: Variant,
    pub base: Point,
    pub seed: u64,
    pub max_rounds: u64,
}

impl CursConfig {
    /// Base point at the identity, seed 0, default round budget.
    pub fn new(geom: GeometrySpec, law: RadialLaw, variant: Variant) -> Self {
        Self {
            base: Point::identity(geom.rank()),
            geom,
            law,
            variant,
            seed: 0,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_base(mut self, base: Point) -> Self {
        self.base = base;
        self
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }
}

/// An accepted `(r, s)` and the number of rounds it took.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalSample {
    pub r: f64,
    pub dir: Direction,
    pub iterations: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AcceptanceStats {
    pub trials: u64,
    pub accepts: u64,
}

impl AcceptanceStats {
    pub fn pi_hat(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.accepts as f64 / self.trials as f64
        }
    }

    /// Binomial standard error `√(p̂(1 − p̂)/trials)`.
    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.pi_hat();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn merge(self, other: Self) -> Self {
        Self { trials: self.trials + other.trials, accepts: self.accepts + other.accepts }
    }
}

/// A validated configuration with its radial sampler built.
#[derive(Clone, Debug)]
pub struct Curs {
    cfg: CursConfig,
    sampler: RadialSampler,
    rank: f64,
    kappa: f64,
    multiplicity: f64,
}

impl Curs {
    pub fn new(cfg: CursConfig) -> Result<Self, CursError> {
        let geom = cfg.geom;
        geom.require_samplable()?;
        let proposal = match (cfg.variant, geom.kind()) {
            (Variant::General, Kind::Spd { .. }) => RadialProposal::general(&geom, cfg.law.clone()),
            (Variant::Sharp, Kind::Spd { .. }) => RadialProposal::sharp(&geom, cfg.law.clone()),
            (Variant::CutLocus, Kind::Unitary { .. }) => {
                RadialProposal::truncated_flat(&geom, cfg.law.clone())?
            }
            (v, _) => {
                return Err(CursError::InvalidConfig(format!(
                    "variant {v:?} does not apply to {:?}",
                    geom.kind()
                )))
            }
        };
        Point::new(&geom, cfg.base.matrix().clone())
            .map_err(|e| CursError::InvalidConfig(format!("base point: {e}")))?;
        if cfg.max_rounds == 0 {
            return Err(CursError::InvalidConfig("round budget must be positive".into()));
        }
        let sampler = RadialSampler::new(&proposal)?;
        Ok(Self {
            rank: geom.rank() as f64,
            kappa: geom.kappa(),
            multiplicity: geom.pair_multiplicity(),
            cfg,
            sampler,
        })
    }

    pub fn config(&self) -> &CursConfig {
        &self.cfg
    }

    pub fn sampler(&self) -> &RadialSampler {
        &self.sampler
    }

    /// The single-threaded stream for this configuration's seed.
    pub fn rng(&self) -> crate::rng::CursRng {
        stream(self.cfg.seed, 0)
    }

    /// Log acceptance ratio of `(r, s)`, `−∞` past the cut locus.
    pub fn log_ratio(&self, r: f64, sigma: &[f64]) -> f64 {
        let pairs = crate::manifold::direction_pairs(sigma);
        match self.cfg.variant {
            Variant::General => {
                let flat = (self.rank - 1.0) * (r.ln() - log_sinh_ratio(self.kappa, r));
                let curved: f64 =
                    pairs.map(|k| log_sinh_ratio(k, r) - log_sinh_ratio(self.kappa, r)).sum();
                flat + self.multiplicity * curved
            }
            Variant::Sharp => {
                let curved: f64 =
                    pairs.map(|k| log_sinh_ratio(k, r) - log_sinh_ratio(self.kappa, r)).sum();
                self.multiplicity * curved
            }
            Variant::CutLocus => {
                if r >= crate::manifold::cut_sigma(sigma) {
                    return f64::NEG_INFINITY;
                }
                self.multiplicity * pairs.map(|k| sinc(k * r).abs().ln()).sum::<f64>()
            }
        }
    }

    /// One proposal round; `Some` when accepted.
    pub fn round<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Option<(f64, Direction)>, CursError> {
        let dir = sample_direction(&self.cfg.geom, rng)?;
        let r = self.sampler.sample(rng);
        let u = open_unit(rng);
        Ok((u.ln() <= self.log_ratio(r, dir.sigma())).then_some((r, dir)))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SphericalSample, CursError> {
        for iterations in 1..=self.cfg.max_rounds {
            if let Some((r, dir)) = self.round(rng)? {
                return Ok(SphericalSample { r, dir, iterations });
            }
            if iterations == WARN_AFTER {
                warn!(
                    "{WARN_AFTER} consecutive rejections; acceptance probability below {:.1e} at 95% confidence",
                    3.0 / WARN_AFTER as f64
                );
            }
        }
        Err(CursError::IterationBudgetExceeded(self.cfg.max_rounds))
    }

    /// An accepted sample mapped to the manifold at the configured base.
    pub fn point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Point, SphericalSample), CursError> {
        let s = self.sample(rng)?;
        let x = exp_map(&self.cfg.geom, s.r, &s.dir, &self.cfg.base)?;
        Ok((x, s))
    }

    /// Runs exactly `rounds` proposal rounds and counts acceptances.
    pub fn estimate_acceptance<R: Rng + ?Sized>(
        &self,
        rounds: u64,
        rng: &mut R,
    ) -> Result<AcceptanceStats, CursError> {
        let mut accepts = 0;
        for _ in 0..rounds {
            if self.round(rng)?.is_some() {
                accepts += 1;
            }
        }
        Ok(AcceptanceStats { trials: rounds, accepts })
    }

    /// Splits `rounds` over `workers` shards, shard `w` on stream `w` of the
    /// seed. With one worker this equals the single-threaded estimate.
    pub fn estimate_acceptance_sharded(
        &self,
        rounds: u64,
        workers: usize,
    ) -> Result<AcceptanceStats, CursError> {
        let workers = workers.max(1) as u64;
        let results: Vec<Result<AcceptanceStats, CursError>> = (0..workers)
            .into_par_iter()
            .map(|w| {
                let share = rounds / workers + u64::from(w < rounds % workers);
                self.estimate_acceptance(share, &mut stream(self.cfg.seed, w))
            })
            .collect();
        results
            .into_iter()
            .try_fold(AcceptanceStats::default(), |acc, s| Ok(acc.merge(s?)))
    }

    /// `count` accepted samples, split over `workers` shards as above.
    pub fn sample_sharded(
        &self,
        count: usize,
        workers: usize,
    ) -> Result<Vec<SphericalSample>, CursError> {
        let workers = workers.max(1);
        let chunks: Vec<Result<Vec<SphericalSample>, CursError>> = (0..workers)
            .into_par_iter()
            .map(|w| {
                let share = count / workers + usize::from(w < count % workers);
                let mut rng = stream(self.cfg.seed, w as u64);
                (0..share).map(|_| self.sample(&mut rng)).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(count);
        for c in chunks {
            out.extend(c?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{cut_function, distance, Beta};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn spd(n: usize) -> GeometrySpec {
        GeometrySpec::spd(n, Beta::Real).unwrap()
    }

    fn curs(geom: GeometrySpec, law: RadialLaw, v: Variant) -> Curs {
        Curs::new(CursConfig::new(geom, law, v).with_seed(5)).unwrap()
    }

    #[test]
    fn extremal_direction_ratios() {
        let law = RadialLaw::gaussian(0.5).unwrap();
        let g = curs(spd(2), law.clone(), Variant::General);
        let s = curs(spd(2), law, Variant::Sharp);
        let sigma = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
        for r in [1e-6, 0.3, 1.0, 4.0] {
            let k = FRAC_1_SQRT_2;
            let want = (k * r / (k * r).sinh()).ln();
            assert!((g.log_ratio(r, &sigma) - want).abs() < 1e-12);
            assert!(g.log_ratio(r, &sigma) <= 0.0);
            assert_eq!(s.log_ratio(r, &sigma), 0.0);
        }
        assert!(g.log_ratio(1e-6, &sigma).abs() < 1e-12);
    }

    #[test]
    fn degenerate_unitary_direction_always_accepted_inside_cut() {
        let geom = GeometrySpec::unitary(3).unwrap();
        let c = curs(geom, RadialLaw::Uniform, Variant::CutLocus);
        let v = 1.0 / 3f64.sqrt();
        let sigma = [v, v, v];
        assert_eq!(c.log_ratio(1.0, &sigma), 0.0);
        assert_eq!(c.log_ratio(3f64.sqrt() * std::f64::consts::PI, &sigma), f64::NEG_INFINITY);
    }

    #[test]
    fn variant_geometry_pairing() {
        let law = RadialLaw::gaussian(0.5).unwrap();
        let u = GeometrySpec::unitary(2).unwrap();
        for (g, v) in [(u, Variant::Sharp), (u, Variant::General), (spd(2), Variant::CutLocus)] {
            assert!(matches!(
                Curs::new(CursConfig::new(g, law.clone(), v)),
                Err(CursError::InvalidConfig(_))
            ));
        }
        let q = GeometrySpec::spd(2, Beta::Quaternion).unwrap();
        assert!(matches!(
            Curs::new(CursConfig::new(q, law.clone(), Variant::General)),
            Err(CursError::Geometry(GeometryError::Unsupported(_)))
        ));
        let bad_base = Point::identity(3);
        assert!(Curs::new(CursConfig::new(spd(2), law, Variant::General).with_base(bad_base)).is_err());
    }

    #[test]
    fn budget_exhaustion() {
        // Tiny acceptance: wide Gaussian on SPD(6).
        let c = Curs::new(
            CursConfig::new(spd(6), RadialLaw::gaussian(3.0).unwrap(), Variant::General)
                .with_max_rounds(5),
        )
        .unwrap();
        let mut rng = c.rng();
        assert_eq!(c.sample(&mut rng).unwrap_err(), CursError::IterationBudgetExceeded(5));
    }

    #[test]
    fn single_thread_determinism() {
        let c = curs(spd(3), RadialLaw::gaussian(0.5).unwrap(), Variant::General);
        let a: Vec<f64> = {
            let mut rng = c.rng();
            (0..50).map(|_| c.sample(&mut rng).unwrap().r).collect()
        };
        let b: Vec<f64> = c.sample_sharded(50, 1).unwrap().iter().map(|s| s.r).collect();
        assert_eq!(a, b);
        let s1 = c.estimate_acceptance(2000, &mut c.rng()).unwrap();
        let s2 = c.estimate_acceptance_sharded(2000, 1).unwrap();
        assert_eq!(s1, s2);
        let s4 = c.estimate_acceptance_sharded(2001, 4).unwrap();
        assert_eq!(s4.trials, 2001);
    }

    #[test]
    fn stats_invariants() {
        let s = AcceptanceStats { trials: 100, accepts: 25 };
        assert_eq!(s.pi_hat(), 0.25);
        assert!((s.stderr() - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        let m = s.merge(AcceptanceStats { trials: 50, accepts: 50 });
        assert_eq!(m, AcceptanceStats { trials: 150, accepts: 75 });
        assert_eq!(AcceptanceStats::default().pi_hat(), 0.0);
    }

    #[test]
    fn points_are_consistent_with_samples() {
        let geom = GeometrySpec::spd(3, Beta::Complex).unwrap();
        let c = curs(geom, RadialLaw::gaussian(0.7).unwrap(), Variant::Sharp);
        let mut rng = c.rng();
        for _ in 0..100 {
            let (x, s) = c.point(&mut rng).unwrap();
            let back = distance(&geom, &Point::identity(3), &x).unwrap();
            assert!((back - s.r).abs() < 1e-8);
            assert!(s.iterations >= 1);
        }
        let u = GeometrySpec::unitary(2).unwrap();
        let c = curs(u, RadialLaw::Uniform, Variant::CutLocus);
        let mut rng = c.rng();
        for _ in 0..500 {
            let (x, s) = c.point(&mut rng).unwrap();
            assert!(x.matrix().unitarity_defect() < 1e-10);
            assert!(s.r < cut_function(&u, &s.dir) && s.r < u.diameter());
        }
    }
}
