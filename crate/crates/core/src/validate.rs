//! Oracle suites that check the geometry, the volume densities and the
//! samplers against independent computations. Each suite returns a report
//! of named checks with the measured metric and the threshold it must meet.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{Curs, CursConfig, CursError, SphericalSample, Variant};
use crate::manifold::{
    cut_function, distance, exp_map, log_volume_density, sample_direction, Beta, Direction,
    GeometryError, GeometrySpec, Point,
};
use crate::numkern::{
    adaptive_simpson, expm_hermitian, expm_i_hermitian, log_sinh_ratio, sinch,
    unitary_eigen_angles, HermitianMatrix, Matrix, NumError,
};
use crate::radial::{RadialError, RadialLaw};
use crate::rng::{stream, CursRng};
use crate::stats::{ks_statistic, ks_two_sample, ks_two_sample_statistic, mean_stderr, Ecdf};
use crate::theory::{jacobi_ode_det, TheoryError};

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Curs(#[from] CursError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Geometry,
    Ode,
    Haar,
    Marginals,
    SharpEquivalence,
}

impl Suite {
    pub const EACH: [Suite; 5] =
        [Suite::Geometry, Suite::Ode, Suite::Haar, Suite::Marginals, Suite::SharpEquivalence];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Geometry => "geometry",
            Suite::Ode => "ode",
            Suite::Haar => "haar",
            Suite::Marginals => "marginals",
            Suite::SharpEquivalence => "sharp-equivalence",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ValidateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Suite::All]
            .into_iter()
            .chain(Suite::EACH)
            .find(|v| v.name() == s)
            .ok_or_else(|| ValidateError::UnknownSuite(s.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Which side of the threshold passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Below,
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub metric: f64,
    pub threshold: f64,
    pub bound: Bound,
}

impl Check {
    /// Passes when `metric < threshold`.
    pub fn below(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        let ok = metric < threshold;
        Self::with(name.into(), ok, metric, threshold, Bound::Below)
    }

    /// Passes when `metric > threshold`.
    pub fn above(name: impl Into<String>, metric: f64, threshold: f64) -> Self {
        let ok = metric > threshold;
        Self::with(name.into(), ok, metric, threshold, Bound::Above)
    }

    fn with(name: String, ok: bool, metric: f64, threshold: f64, bound: Bound) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self { name, status, metric, threshold, bound }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Runs one suite, or every suite with check names prefixed by the suite.
pub fn run(suite: Suite, seed: u64) -> Result<Report, ValidateError> {
    let checks = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                for mut c in run(s, seed)?.checks {
                    c.name = format!("{s}/{}", c.name);
                    all.push(c);
                }
            }
            all
        }
        Suite::Geometry => geometry(seed)?,
        Suite::Ode => ode(seed)?,
        Suite::Haar => haar(seed)?,
        Suite::Marginals => marginals(seed)?,
        Suite::SharpEquivalence => sharp_equivalence(seed)?,
    };
    Ok(Report { suite: suite.name().into(), checks })
}

fn label(geom: &GeometrySpec) -> String {
    if geom.is_spd() {
        format!("spd-beta{} n={}", geom.beta(), geom.rank())
    } else {
        format!("unitary n={}", geom.rank())
    }
}

fn spd(n: usize, beta: Beta) -> GeometrySpec {
    GeometrySpec::spd(n, beta).expect("valid SPD size")
}

fn unitary(n: usize) -> GeometrySpec {
    GeometrySpec::unitary(n).expect("valid unitary size")
}

/// A direction with random eigenvalues, for families without a direction
/// sampler. Only the spectrum matters to the densities.
fn random_spectrum_direction(geom: &GeometrySpec, rng: &mut CursRng) -> Result<Direction, GeometryError> {
    let mut v: Vec<f64> = (0..geom.rank()).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    Direction::from_eigenvalues(geom, &v)
}

fn any_direction(geom: &GeometrySpec, rng: &mut CursRng) -> Result<Direction, GeometryError> {
    if geom.beta() == 4 {
        random_spectrum_direction(geom, rng)
    } else {
        sample_direction(geom, rng)
    }
}

fn random_hermitian(n: usize, complex: bool, scale: f64, rng: &mut CursRng) -> HermitianMatrix {
    let t = Matrix::from_fn(n, |_, _| {
        let im = if complex { rng.sample(StandardNormal) } else { 0.0 };
        Complex64::new(rng.sample(StandardNormal), im)
    });
    HermitianMatrix::hermitian_part(&(&t + &t.adjoint()).scale(0.5 * scale))
}

/// A random base point away from the identity.
fn random_base(geom: &GeometrySpec, rng: &mut CursRng) -> Result<Point, ValidateError> {
    let n = geom.rank();
    let x = if geom.is_spd() {
        expm_hermitian(&random_hermitian(n, geom.beta() == 2, 0.5, rng))?.into_matrix()
    } else {
        expm_i_hermitian(&random_hermitian(n, true, 1.0, rng), 1.0)?
    };
    Ok(Point::new(geom, x)?)
}

/// Round trip `d(base, Exp_base(r s)) = r`, the volume-comparison bounds,
/// the curvature bound on directions and the diameter bound on `U(N)`.
pub fn geometry(seed: u64) -> Result<Vec<Check>, ValidateError> {
    const ROUND_TRIPS: usize = 10_000;
    const BOUND_DRAWS: usize = 100_000;
    let mut checks = Vec::new();
    let mut rng = stream(seed, 0);

    let mut geoms: Vec<GeometrySpec> = Vec::new();
    for beta in [Beta::Real, Beta::Complex] {
        geoms.extend((2..=4).map(|n| spd(n, beta)));
    }
    geoms.extend([unitary(2), unitary(3)]);
    for geom in &geoms {
        let base = random_base(geom, &mut rng)?;
        let mut worst = 0.0f64;
        for _ in 0..ROUND_TRIPS {
            let dir = sample_direction(geom, &mut rng)?;
            let limit = if geom.is_spd() { 3.0 } else { cut_function(geom, &dir) };
            let r = rng.gen::<f64>() * limit;
            let y = exp_map(geom, r, &dir, &base)?;
            worst = worst.max((distance(geom, &base, &y)? - r).abs());
        }
        checks.push(Check::below(format!("round-trip {}", label(geom)), worst, 1e-8));
    }

    // Bounds on the SPD families, β = 4 through its density formula only.
    let families: Vec<GeometrySpec> = [Beta::Real, Beta::Complex, Beta::Quaternion]
        .into_iter()
        .flat_map(|b| (2..=4).map(move |n| spd(n, b)))
        .collect();
    let per = BOUND_DRAWS / families.len() + 1;
    let (mut bishop, mut gunther, mut kappa_excess) = (f64::MIN, f64::MIN, f64::MIN);
    for geom in &families {
        let k = geom.kappa();
        let d1 = (geom.dim() - 1) as f64;
        for _ in 0..per {
            let dir = any_direction(geom, &mut rng)?;
            let r = 5.0 * crate::rng::open_unit(&mut rng);
            let lv = log_volume_density(geom, r, &dir)?;
            let upper = d1 * log_sinh_ratio(k, r);
            let lower = d1 * r.ln();
            let scale = upper.abs().max(1.0);
            bishop = bishop.max((lv - upper) / scale);
            gunther = gunther.max((lower - lv) / scale);
            kappa_excess = kappa_excess.max(dir.max_kappa() - k);
        }
    }
    checks.push(Check::below("bishop upper bound", bishop, 1e-12));
    checks.push(Check::below("flat lower bound", gunther, 1e-12));
    checks.push(Check::below("max kappa at most 1/sqrt2", kappa_excess, 1e-12));

    for n in 2..=4 {
        let geom = spd(n, Beta::Real);
        let mut sigma = vec![0.0; n];
        sigma[0] = FRAC_1_SQRT_2;
        sigma[n - 1] = -FRAC_1_SQRT_2;
        let dir = Direction::from_eigenvalues(&geom, &sigma)?;
        let gap = (dir.max_kappa() - FRAC_1_SQRT_2).abs();
        checks.push(Check::below(format!("extremal direction attains kappa n={n}"), gap, 1e-12));
    }
    {
        let geom = spd(2, Beta::Real);
        let dir = Direction::from_eigenvalues(&geom, &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])?;
        let worst = [0.1, 0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&r| {
                let lv = log_volume_density(&geom, r, &dir).unwrap_or(f64::NAN);
                (lv - r.ln() - log_sinh_ratio(geom.kappa(), r)).abs()
            })
            .fold(0.0, f64::max);
        checks.push(Check::below("bishop factor tight at extremal direction", worst, 1e-12));
    }

    for n in [2, 3] {
        let geom = unitary(n);
        let mut worst = f64::MIN;
        let mut least = f64::MAX;
        for _ in 0..BOUND_DRAWS / 2 {
            let c = cut_function(&geom, &sample_direction(&geom, &mut rng)?);
            worst = worst.max(c - geom.diameter());
            least = least.min(c - PI);
        }
        checks.push(Check::below(format!("cut radius within diameter n={n}"), worst, 1e-9));
        checks.push(Check::above(format!("cut radius at least pi n={n}"), least, -1e-12));
    }
    Ok(checks)
}

/// Log volume density against the Jacobi-equation integration.
pub fn ode(seed: u64) -> Result<Vec<Check>, ValidateError> {
    const DRAWS: usize = 100;
    const STEPS: usize = 10_000;
    let mut rng = stream(seed, 1);
    let geoms = [
        spd(3, Beta::Real),
        spd(3, Beta::Complex),
        spd(3, Beta::Quaternion),
        spd(4, Beta::Real),
        unitary(2),
        unitary(3),
    ];
    let mut checks = Vec::new();
    for geom in &geoms {
        let mut worst = 0.0f64;
        for _ in 0..DRAWS {
            let dir = any_direction(geom, &mut rng)?;
            let limit = if geom.is_spd() { 3.0 } else { 0.9 * cut_function(geom, &dir) };
            let r = limit * crate::rng::open_unit(&mut rng);
            let exact = log_volume_density(geom, r, &dir)?;
            let ode = jacobi_ode_det(geom, r, &dir, STEPS)?;
            // Relative error of |det A| itself.
            worst = worst.max((ode - exact).exp_m1().abs());
        }
        checks.push(Check::below(format!("ode vs closed form {}", label(geom)), worst, 1e-6));
    }
    Ok(checks)
}

/// Haar unitary by QR of a complex Ginibre matrix, with the phases of the
/// triangular factor's diagonal absorbed.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    // Modified Gram–Schmidt on columns leaves a positive diagonal in R.
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let v = cols[k][i];
                cols[j][i] -= proj * v;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    Matrix::from_fn(n, |i, j| cols[j][i])
}

/// Gap between the two eigen-angles of a `U(2)` element, on the circle.
fn angle_gap(x: &Matrix) -> Result<f64, NumError> {
    let a = unitary_eigen_angles(x)?;
    let g = (a[1] - a[0]).abs();
    Ok(g.min(2.0 * PI - g))
}

/// CURS on `U(2)` with a flat law against Haar measure.
pub fn haar(seed: u64) -> Result<Vec<Check>, ValidateError> {
    const SAMPLES: usize = 100_000;
    let geom = unitary(2);
    let curs = Curs::new(CursConfig::new(geom, RadialLaw::Uniform, Variant::CutLocus).with_seed(seed))?;
    let mut rng = stream(seed, 2);
    let mut trace_sq = Vec::with_capacity(SAMPLES);
    let mut gaps = Vec::with_capacity(SAMPLES);
    let mut worst_cut = 0.0f64;
    for _ in 0..SAMPLES {
        let (x, s) = curs.point(&mut rng)?;
        worst_cut = worst_cut.max(s.r / cut_function(&geom, &s.dir));
        trace_sq.push(x.matrix().trace().norm_sqr());
        gaps.push(angle_gap(x.matrix())?);
    }
    let mut oracle = stream(seed, 3);
    let mut haar_gaps = (0..SAMPLES)
        .map(|_| angle_gap(&haar_unitary(2, &mut oracle)))
        .collect::<Result<Vec<_>, _>>()?;
    let (mean, _) = mean_stderr(&trace_sq);
    let ks = ks_two_sample_statistic(&mut gaps, &mut haar_gaps);
    Ok(vec![
        Check::below("second trace moment", (mean - 1.0).abs(), 0.01),
        Check::below("eigen-angle gap ks", ks, 0.02),
        Check::below("accepted r over cut radius", worst_cut, 1.0),
    ])
}

/// `P(κ₁₂ ≤ k)` under uniform directions for real `2 × 2` matrices.
///
/// The gap `g = ς₁ − ς₂ = 2κ₁₂` has CDF `1 − √(1 − g²/2)` on `[0, √2]`.
pub fn spd2_kappa_cdf(k: f64) -> f64 {
    let g = (2.0 * k).clamp(0.0, 2f64.sqrt());
    1.0 - (1.0 - 0.5 * g * g).max(0.0).sqrt()
}

/// Unnormalized radial marginal of the target on real `2 × 2` SPD matrices:
/// `f(r)·E_s|det A(r, s)|`. With `g = √2 sin φ` the gap law becomes
/// `sin φ dφ` on `[0, π/2]`, so
/// `E_s|det A| = r² ∫ sinch(r sin φ/√2) sin φ dφ`.
pub fn spd2_radial_marginal(law: &RadialLaw, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let inner = |phi: f64| sinch(r * phi.sin() * FRAC_1_SQRT_2) * phi.sin();
    let avg = adaptive_simpson(&inner, 0.0, 0.5 * PI, 1e-13);
    law.log_f(r).exp() * r * r * avg
}

/// Tabulated CDF of a density on `[0, end]` with linear interpolation.
pub struct CdfTable {
    step: f64,
    cum: Vec<f64>,
}

impl CdfTable {
    pub fn new(density: impl Fn(f64) -> f64, end: f64, cells: usize) -> Self {
        let step = end / cells as f64;
        let mut cum = vec![0.0; cells + 1];
        for k in 0..cells {
            let a = k as f64 * step;
            cum[k + 1] = cum[k] + adaptive_simpson(&density, a, a + step, 1e-14);
        }
        let total = cum[cells];
        cum.iter_mut().for_each(|c| *c /= total);
        Self { step, cum }
    }

    pub fn cdf(&self, r: f64) -> f64 {
        let x = r / self.step;
        if x <= 0.0 {
            return 0.0;
        }
        let k = x.floor() as usize;
        if k + 1 >= self.cum.len() {
            return 1.0;
        }
        let t = x - k as f64;
        self.cum[k] * (1.0 - t) + self.cum[k + 1] * t
    }
}

fn draw(curs: &Curs, count: usize, rng: &mut CursRng) -> Result<Vec<SphericalSample>, CursError> {
    (0..count).map(|_| curs.sample(rng)).collect()
}

/// Exact radial marginal on real `2 × 2` SPD matrices and the curvature
/// reweighting of accepted directions.
pub fn marginals(seed: u64) -> Result<Vec<Check>, ValidateError> {
    const SAMPLES: usize = 100_000;
    let mut checks = Vec::new();

    let geom = spd(2, Beta::Real);
    let law = RadialLaw::gaussian(1.0)?;
    let curs = Curs::new(CursConfig::new(geom, law.clone(), Variant::General).with_seed(seed))?;
    let samples = draw(&curs, SAMPLES, &mut stream(seed, 4))?;
    let table = CdfTable::new(|r| spd2_radial_marginal(&law, r), 14.0, 4096);
    let mut r: Vec<f64> = samples.iter().map(|s| s.r).collect();
    let ks = ks_statistic(&mut r, |x| table.cdf(x));
    checks.push(Check::below("spd n=2 radial marginal ks", ks, 0.01));

    let accepted: Vec<f64> = samples.iter().map(|s| s.dir.max_kappa()).collect();
    let acc = Ecdf::new(&accepted);
    let excess = accepted.iter().map(|&k| acc.eval(k) - spd2_kappa_cdf(k)).fold(f64::MIN, f64::max);
    let shortfall = accepted.iter().map(|&k| spd2_kappa_cdf(k) - acc.eval(k)).fold(f64::MIN, f64::max);
    checks.push(Check::below("spd n=2 accepted kappa dominates uniform", excess, 0.01));
    checks.push(Check::above("spd n=2 kappa reweighting visible", shortfall, 0.05));

    // Larger size, proposal side by simulation.
    let geom = spd(4, Beta::Real);
    let law = RadialLaw::gaussian(0.4)?;
    let curs = Curs::new(CursConfig::new(geom, law, Variant::General).with_seed(seed))?;
    let accepted: Vec<f64> =
        draw(&curs, SAMPLES, &mut stream(seed, 5))?.iter().map(|s| s.dir.max_kappa()).collect();
    let mut rng = stream(seed, 6);
    let proposed = (0..SAMPLES)
        .map(|_| sample_direction(&geom, &mut rng).map(|d| d.max_kappa()))
        .collect::<Result<Vec<_>, _>>()?;
    let (acc, prop) = (Ecdf::new(&accepted), Ecdf::new(&proposed));
    let grid = accepted.iter().chain(&proposed);
    let excess = grid.clone().map(|&k| acc.eval(k) - prop.eval(k)).fold(f64::MIN, f64::max);
    let shortfall = grid.map(|&k| prop.eval(k) - acc.eval(k)).fold(f64::MIN, f64::max);
    checks.push(Check::below("spd n=4 accepted kappa dominates uniform", excess, 0.01));
    checks.push(Check::above("spd n=4 kappa reweighting visible", shortfall, 0.02));
    Ok(checks)
}

/// General and sharp samplers must produce the same target.
pub fn sharp_equivalence(seed: u64) -> Result<Vec<Check>, ValidateError> {
    const SAMPLES: usize = 100_000;
    let geom = spd(4, Beta::Real);
    let law = RadialLaw::gaussian(0.6)?;
    let run = |variant, index| -> Result<Vec<SphericalSample>, ValidateError> {
        let curs = Curs::new(CursConfig::new(geom, law.clone(), variant).with_seed(seed))?;
        Ok(draw(&curs, SAMPLES, &mut stream(seed, index))?)
    };
    let general = run(Variant::General, 7)?;
    let sharp = run(Variant::Sharp, 8)?;
    let pi = |s: &[SphericalSample]| s.len() as f64 / s.iter().map(|x| x.iterations as f64).sum::<f64>();
    let radii = |s: &[SphericalSample]| s.iter().map(|x| x.r).collect::<Vec<_>>();
    let kappas = |s: &[SphericalSample]| s.iter().map(|x| x.dir.max_kappa()).collect::<Vec<_>>();
    let (_, p_r) = ks_two_sample(&mut radii(&general), &mut radii(&sharp));
    let (_, p_k) = ks_two_sample(&mut kappas(&general), &mut kappas(&sharp));
    Ok(vec![
        Check::above("two-sample ks p on r", p_r, 0.01),
        Check::above("two-sample ks p on max kappa", p_k, 0.01),
        Check::above("sharp acceptance exceeds general", pi(&sharp) - pi(&general), 0.0),
    ])
}
