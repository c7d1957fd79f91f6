use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use log::info;
use serde::Serialize;
use thiserror::Error;

use curs::manifold::{exp_map, PointJson};
use curs::theory::{TheoryConstants, TheoryError};
use curs::validate::{self, Suite, ValidateError};
use curs::{
    Beta, Curs, CursConfig, CursError, GeometryError, GeometrySpec, Point, RadialError, RadialLaw,
    Variant,
};

use crate::args::{
    GeometryArgs, LawArgs, ManifoldArg, SampleArgs, SweepArgs, TablesArgs, TheoryArgs,
    ValidateArgs, VariantArg,
};
use crate::svg::{self, Series};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Runtime(String),
    #[error("validation failed")]
    ValidationFailed,
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Runtime(_) | CliError::ValidationFailed | CliError::Io(_) => 1,
        }
    }
}

impl From<CursError> for CliError {
    fn from(e: CursError) -> Self {
        match e {
            CursError::IterationBudgetExceeded(_) => CliError::Budget(e.to_string()),
            CursError::Geometry(GeometryError::Num(_)) => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CursError::from(e).into()
    }
}

impl From<RadialError> for CliError {
    fn from(e: RadialError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<TheoryError> for CliError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::OddN(_) | TheoryError::UnsupportedClosedForm(_) | TheoryError::Domain(_) => {
                CliError::Usage(e.to_string())
            }
            TheoryError::Geometry(g) => g.into(),
            TheoryError::Radial(r) => r.into(),
            TheoryError::Num(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<ValidateError> for CliError {
    fn from(e: ValidateError) -> Self {
        match e {
            ValidateError::UnknownSuite(_) => CliError::Usage(e.to_string()),
            ValidateError::Curs(c) => c.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn geometry(g: &GeometryArgs) -> Result<GeometrySpec, CliError> {
    Ok(match g.manifold {
        ManifoldArg::Spd => GeometrySpec::spd(g.n, Beta::from_int(g.beta)?)?,
        ManifoldArg::Unitary => GeometrySpec::unitary(g.n)?,
    })
}

fn law(l: &LawArgs) -> Result<RadialLaw, CliError> {
    match (l.uniform, l.sigma) {
        (true, _) => Ok(RadialLaw::Uniform),
        (false, Some(sigma)) => Ok(RadialLaw::generalized_gaussian(l.alpha, sigma)?),
        (false, None) => Err(CliError::Usage("either --sigma or --uniform is required".into())),
    }
}

fn variant(v: Option<VariantArg>, geom: &GeometrySpec) -> Variant {
    match v {
        Some(VariantArg::General) => Variant::General,
        Some(VariantArg::Sharp) => Variant::Sharp,
        Some(VariantArg::Cutlocus) => Variant::CutLocus,
        None if geom.is_spd() => Variant::General,
        None => Variant::CutLocus,
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct SampleRecord {
    r: f64,
    sigma_eigs: Vec<f64>,
    point: PointJson,
    iterations: u64,
}

pub fn sample(a: &SampleArgs) -> Result<(), CliError> {
    let geom = geometry(&a.geometry)?;
    let mut cfg = CursConfig::new(geom, law(&a.law)?, variant(a.variant, &geom)).with_seed(a.run.seed);
    if let Some(m) = a.max_rounds {
        cfg = cfg.with_max_rounds(m);
    }
    if let Some(path) = &a.base_file {
        let text = fs::read_to_string(path)?;
        let json: PointJson = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        cfg = cfg.with_base(Point::from_json(&geom, &json)?);
    }
    let curs = Curs::new(cfg)?;
    let mut out = output(a.out.as_deref())?;
    let mut emit = |x: &Point, s: &curs::SphericalSample| -> Result<(), CliError> {
        let rec = SampleRecord {
            r: s.r,
            sigma_eigs: s.dir.sigma().to_vec(),
            point: x.to_json(&geom),
            iterations: s.iterations,
        };
        serde_json::to_writer(&mut out, &rec).map_err(|e| CliError::Runtime(e.to_string()))?;
        out.write_all(b"\n")?;
        Ok(())
    };
    if a.run.threads <= 1 {
        let mut rng = curs.rng();
        for _ in 0..a.count {
            let (x, s) = curs.point(&mut rng)?;
            emit(&x, &s)?;
        }
    } else {
        for s in curs.sample_sharded(a.count, a.run.threads)? {
            let x = exp_map(&geom, s.r, &s.dir, &curs.config().base)?;
            emit(&x, &s)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("malformed --sigma-grid {spec:?}: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad("not a number"))?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !nums.iter().all(|v| v.is_finite()) || !(start > 0.0) || !(step > 0.0) || stop < start {
        return Err(bad("need 0 < start <= stop and step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(bad("too many grid points"));
    }
    Ok((0..count).map(|k| round12(start + k as f64 * step)).collect())
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn acceptance(curs_cfg: CursConfig, rounds: u64, threads: usize) -> Result<curs::AcceptanceStats, CliError> {
    if rounds == 0 {
        return Err(CliError::Usage("--rounds must be positive".into()));
    }
    Ok(Curs::new(curs_cfg)?.estimate_acceptance_sharded(rounds, threads)?)
}

pub fn acceptance_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let geom = geometry(&a.geometry)?;
    let grid = parse_grid(&a.sigma_grid)?;
    let var = variant(a.variant, &geom);
    let closed_form = !a.no_theory
        && geom.is_spd()
        && geom.beta() == 1
        && a.alpha == 2.0
        && geom.rank() % 2 == 0
        && var != Variant::CutLocus;
    let mut csv = String::from("sigma,delta,pi_hat,stderr,pi_theory\n");
    let (mut empirical, mut theoretical) = (Vec::new(), Vec::new());
    for &sigma in &grid {
        let law = RadialLaw::generalized_gaussian(a.alpha, sigma)?;
        let cfg = CursConfig::new(geom, law, var).with_seed(a.run.seed);
        let stats = acceptance(cfg, a.rounds, a.run.threads)?;
        let (delta, pi_theory) = if closed_form {
            let t = TheoryConstants::closed_form(geom.rank(), sigma)?;
            let pi = if var == Variant::Sharp { t.pi_sharp } else { Some(t.pi) };
            (t.delta, pi)
        } else {
            (None, None)
        };
        info!("σ = {sigma}: Π̂ = {:.4}", stats.pi_hat());
        csv.push_str(&format!(
            "{sigma},{},{},{},{}\n",
            cell(delta),
            stats.pi_hat(),
            stats.stderr(),
            cell(pi_theory)
        ));
        empirical.push((sigma, stats.pi_hat()));
        if let Some(p) = pi_theory {
            theoretical.push((sigma, p));
        }
    }
    let mut out = output(a.out.as_deref())?;
    out.write_all(csv.as_bytes())?;
    out.flush()?;
    if let Some(path) = &a.svg {
        let title = format!("acceptance, N = {}", geom.rank());
        let plot = svg::plot(
            &title,
            "sigma",
            "acceptance probability",
            &[
                Series { points: &theoretical, line: true, color: "black", label: "theory" },
                Series { points: &empirical, line: false, color: "#c0392b", label: "empirical" },
            ],
        );
        fs::write(path, plot)?;
    }
    Ok(())
}

/// The σ grids of the reference tables.
pub fn table_grid(n: usize) -> Option<&'static [f64]> {
    match n {
        4 => Some(&[0.2, 0.4, 0.6, 0.8]),
        6 => Some(&[0.1, 0.2, 0.3]),
        _ => None,
    }
}

pub fn tables(a: &TablesArgs) -> Result<(), CliError> {
    let grid = table_grid(a.n).ok_or_else(|| CliError::Usage(format!("--n must be 4 or 6, got {}", a.n)))?;
    let geom = GeometrySpec::spd(a.n, Beta::Real)?;
    let mut csv = String::from("sigma,pi_hat_general,pi_hat_sharp\n");
    for &sigma in grid {
        let law = RadialLaw::gaussian(sigma)?;
        let cfg = |v| CursConfig::new(geom, law.clone(), v).with_seed(a.run.seed);
        let general = acceptance(cfg(Variant::General), a.rounds, a.run.threads)?;
        let sharp = acceptance(cfg(Variant::Sharp), a.rounds, a.run.threads)?;
        info!("σ = {sigma}: {:.4} / {:.4}", general.pi_hat(), sharp.pi_hat());
        csv.push_str(&format!("{sigma},{},{}\n", general.pi_hat(), sharp.pi_hat()));
    }
    let mut out = output(a.out.as_deref())?;
    out.write_all(csv.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn validate(a: &ValidateArgs) -> Result<(), CliError> {
    let suite: Suite = a.suite.parse()?;
    let report = validate::run(suite, a.seed)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{text}");
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}

pub fn theory(a: &TheoryArgs) -> Result<(), CliError> {
    let geom = geometry(&a.geometry)?;
    let law = law(&a.law)?;
    let constants = if a.mc {
        TheoryConstants::monte_carlo(&geom, &law, a.draws, a.seed)?
    } else {
        if !geom.is_spd() || geom.beta() != 1 {
            return Err(CliError::Usage("closed forms need real SPD matrices; use --mc".into()));
        }
        let sigma = match law {
            RadialLaw::GeneralizedGaussian { alpha, sigma } if alpha == 2.0 => sigma,
            _ => return Err(CliError::Usage("closed forms need α = 2 and --sigma; use --mc".into())),
        };
        if geom.rank() % 2 == 1 {
            return Err(CliError::Usage(format!(
                "no closed form for odd N = {}; use --mc",
                geom.rank()
            )));
        }
        TheoryConstants::closed_form(geom.rank(), sigma)?
    };
    let text = serde_json::to_string_pretty(&constants).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{text}");
    Ok(())
}
