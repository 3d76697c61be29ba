//! Argument model and command dispatch for the `janossy` binary.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use janossy_core::biortho::{janossy_kernel_resolvent, janossy_kernel_theorem1, polynomial_ensemble};
use janossy_core::hardedge::{bessel_kernel, limit_kth_survival};
use janossy_core::janossy::{
    count_distribution, fredholm_det, kth_particle_density, kth_particle_survival,
    MAX_DENSITY_K,
};
use janossy_core::montecarlo::{empirical_survival, sample_many};
use janossy_core::orthopoly::for_measure;
use janossy_core::verify::{run_criterion, DEFAULT_SEED};
use janossy_core::{BesselForm, BiorthoSystem, CriterionReport, Measure, Region, Weight};
use rayon::prelude::*;
use serde::Serialize;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "JANOSSY_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Weight in its canonical textual form, e.g. `laguerre:0` or `jacobi:0.5,1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpec(String);

impl WeightSpec {
    pub fn weight(&self) -> Weight {
        self.0.parse().expect("validated at parse time")
    }

    pub fn measure(&self) -> janossy_core::Result<Measure> {
        Measure::classical(self.weight())
    }
}

impl FromStr for WeightSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let w: Weight = s.parse().map_err(|e: janossy_core::Error| e.to_string())?;
        Ok(WeightSpec(w.to_string()))
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn parse_region(s: &str) -> Result<Region, String> {
    s.parse().map_err(|e: janossy_core::Error| e.to_string())
}

/// Region string in which every `s` is replaced by the sweep value.
/// Intervals that collapse at a given `s` (e.g. `(0,s)` at `s = 0`) drop out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionTemplate(String);

const PROBES: [f64; 4] = [1.0, 0.5, 2.0, 10.0];

impl RegionTemplate {
    fn pieces(&self) -> impl Iterator<Item = &str> {
        self.0.split(['u', 'U', '∪'])
    }

    pub fn at(&self, s: f64) -> Region {
        let sub = format!("{s:e}");
        self.pieces()
            .filter_map(|p| p.replace('s', &sub).parse::<Region>().ok())
            .fold(Region::empty(), |acc, r| acc.union(&r))
    }
}

impl FromStr for RegionTemplate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = RegionTemplate(s.trim().to_string());
        if t.0.eq_ignore_ascii_case("empty") {
            return Ok(t);
        }
        for piece in t.pieces() {
            let mut last = String::new();
            let ok = PROBES.iter().any(|v| {
                match piece.replace('s', &format!("{v:e}")).parse::<Region>() {
                    Ok(_) => true,
                    Err(e) => {
                        last = e.to_string();
                        false
                    }
                }
            });
            if !ok {
                return Err(format!("{piece:?}: {last}"));
            }
        }
        Ok(t)
    }
}

impl fmt::Display for RegionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Either `lo:hi:count` (inclusive, evenly spaced) or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Linspace { lo: f64, hi: f64, count: usize },
    List(Vec<f64>),
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::Linspace { lo, hi, count: 1 } => vec![0.5 * (lo + hi)],
            Grid::Linspace { lo, hi, count } => (0..*count)
                .map(|i| lo + (hi - lo) * i as f64 / (*count - 1) as f64)
                .collect(),
            Grid::List(v) => v.clone(),
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad grid value {t:?}"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [lo, hi, count] => {
                let count: usize = count
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad grid count {count:?}"))?;
                if count == 0 {
                    return Err("grid count must be positive".into());
                }
                Ok(Grid::Linspace {
                    lo: num(lo)?,
                    hi: num(hi)?,
                    count,
                })
            }
            [list] => {
                let v = list.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
                Ok(Grid::List(v))
            }
            _ => Err(format!("expected lo:hi:count or a comma list, got {s:?}")),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Linspace { lo, hi, count } => write!(f, "{lo}:{hi}:{count}"),
            Grid::List(v) => {
                let s: Vec<String> = v.iter().map(f64::to_string).collect();
                f.write_str(&s.join(","))
            }
        }
    }
}

fn parse_form(s: &str) -> Result<BesselForm, String> {
    s.parse().map_err(|e: janossy_core::Error| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "janossy", version, about = "Janossy densities and smallest-eigenvalue laws")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: $JANOSSY_THREADS, else all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Recurrence coefficients, norms and leading coefficients.
    Orthopoly {
        #[arg(long, default_value = "laguerre:0")]
        weight: WeightSpec,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Restrict the weight to this region (Stieltjes procedure).
        #[arg(long, value_parser = parse_region)]
        support: Option<Region>,
    },
    /// Janossy kernel on a grid, both routes side by side.
    JanossyKernel {
        #[arg(long, default_value = "laguerre:0")]
        weight: WeightSpec,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_parser = parse_region)]
        region: Region,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Gap probability det(Id − G_I) over a sweep of `s`.
    Gap {
        #[arg(long, default_value = "laguerre:0")]
        weight: WeightSpec,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Region with `s` standing for the sweep value.
        #[arg(long, default_value = "(0,s)")]
        region: RegionTemplate,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Distribution of the number of points in a region.
    Counts {
        #[arg(long, default_value = "laguerre:0")]
        weight: WeightSpec,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_parser = parse_region)]
        region: Region,
    },
    /// Survival (and optionally density) of the k-th smallest point.
    Kth {
        #[arg(long, default_value = "laguerre:0")]
        weight: WeightSpec,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long)]
        density: bool,
    },
    /// Bessel kernel table over grid × grid.
    Bessel {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
        /// Only this form (series, cd, integral).
        #[arg(long, value_parser = parse_form)]
        form: Option<BesselForm>,
    },
    /// Hard-edge limit law of the k-th smallest point.
    LimitLaw {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=3))]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Monte Carlo survival of the scaled k-th eigenvalue of AA*.
    Mc {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        draws: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Multiplier applied to λ_k (default n).
        #[arg(long, allow_negative_numbers = true)]
        scale: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s_grid: Grid,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma list of criterion ids (default all).
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=10))]
        criteria: Vec<u32>,
    },
}

impl RunConfig {
    /// Argument vector (program name first) that parses back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec!["janossy".to_string(), format!("--format={}", self.format)];
        if let Some(p) = &self.output {
            a.push(format!("--output={}", p.display()));
        }
        if let Some(t) = self.threads {
            a.push(format!("--threads={t}"));
        }
        let mut flag = |name: &str, v: String| a.push(format!("--{name}={v}"));
        let sub = match &self.command {
            Command::Orthopoly { weight, n, support } => {
                flag("weight", weight.to_string());
                flag("n", n.to_string());
                if let Some(r) = support {
                    flag("support", r.to_string());
                }
                "orthopoly"
            }
            Command::JanossyKernel { weight, n, region, grid } => {
                flag("weight", weight.to_string());
                flag("n", n.to_string());
                flag("region", region.to_string());
                flag("grid", grid.to_string());
                "janossy-kernel"
            }
            Command::Gap { weight, n, region, grid } => {
                flag("weight", weight.to_string());
                flag("n", n.to_string());
                flag("region", region.to_string());
                flag("grid", grid.to_string());
                "gap"
            }
            Command::Counts { weight, n, region } => {
                flag("weight", weight.to_string());
                flag("n", n.to_string());
                flag("region", region.to_string());
                "counts"
            }
            Command::Kth { weight, n, k, grid, density } => {
                flag("weight", weight.to_string());
                flag("n", n.to_string());
                flag("k", k.to_string());
                flag("grid", grid.to_string());
                if *density {
                    a.push("--density".into());
                }
                "kth"
            }
            Command::Bessel { alpha, grid, form } => {
                flag("alpha", alpha.to_string());
                flag("grid", grid.to_string());
                if let Some(f) = form {
                    flag("form", f.to_string());
                }
                "bessel"
            }
            Command::LimitLaw { k, grid } => {
                flag("k", k.to_string());
                flag("grid", grid.to_string());
                "limit-law"
            }
            Command::Mc { n, draws, seed, k, scale, s_grid } => {
                flag("n", n.to_string());
                flag("draws", draws.to_string());
                flag("seed", seed.to_string());
                flag("k", k.to_string());
                if let Some(s) = scale {
                    flag("scale", s.to_string());
                }
                flag("s-grid", s_grid.to_string());
                "mc"
            }
            Command::Verify { seed, criteria } => {
                flag("seed", seed.to_string());
                if !criteria.is_empty() {
                    let ids: Vec<String> = criteria.iter().map(u32::to_string).collect();
                    flag("criteria", ids.join(","));
                }
                "verify"
            }
        };
        let globals = 2 + usize::from(self.output.is_some()) + usize::from(self.threads.is_some());
        a.insert(globals, sub.to_string());
        a
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration; exit status 2.
    Config(String),
    /// Numerical failure; exit status 1.
    Compute(janossy_core::Error),
    /// Output could not be written; exit status 1.
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<janossy_core::Error> for CliError {
    fn from(e: janossy_core::Error) -> Self {
        CliError::Compute(e)
    }
}

/// Rendered result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    /// False only when `verify` saw a failing criterion.
    pub success: bool,
}

#[derive(Serialize)]
struct TableJson<'a> {
    columns: &'a [&'a str],
    rows: &'a [Vec<f64>],
}

#[derive(Serialize)]
struct CountsJson<'a> {
    region: &'a str,
    n: u32,
    probabilities: &'a [f64],
    mean: f64,
    total: f64,
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    seed: u64,
    all_pass: bool,
    criteria: &'a [CriterionReport],
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_text<F>(fill: F) -> Result<String, CliError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(|e| CliError::Io(e.into()))?;
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn table(format: Format, columns: &[&str], rows: &[Vec<f64>]) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(json_text(&TableJson { columns, rows })),
        Format::Csv => csv_text(|w| {
            w.write_record(columns)?;
            for r in rows {
                w.write_record(r.iter().map(|&v| num(v)))?;
            }
            Ok(())
        }),
    }
}

fn system(weight: &WeightSpec, n: u32) -> Result<BiorthoSystem, CliError> {
    let m = weight
        .measure()
        .map_err(|e| CliError::Config(format!("--weight {weight}: {e}")))?;
    Ok(polynomial_ensemble(&m, n as usize)?)
}

fn sweep<F>(grid: &Grid, f: F) -> Result<Vec<Vec<f64>>, CliError>
where
    F: Fn(f64) -> Result<Vec<f64>, CliError> + Sync,
{
    grid.points().into_par_iter().map(&f).collect()
}

fn check_k(k: u32, n: u32) -> Result<(), CliError> {
    if k > n {
        return Err(CliError::Config(format!("--k {k} exceeds --n {n}")));
    }
    Ok(())
}

/// Computes the output of `cfg.command` without touching the filesystem.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fmt = cfg.format;
    let ok = |text| Ok(Outcome { text, success: true });
    match &cfg.command {
        Command::Orthopoly { weight, n, support } => {
            let m = match support {
                Some(r) => Measure::new(r.clone(), weight.weight())
                    .map_err(|e| CliError::Config(format!("--support {r}: {e}")))?,
                None => weight
                    .measure()
                    .map_err(|e| CliError::Config(format!("--weight {weight}: {e}")))?,
            };
            let ops = for_measure(&m, *n as usize)?;
            let rows: Vec<Vec<f64>> = (0..*n as usize)
                .map(|j| vec![j as f64, ops.a()[j], ops.b()[j], ops.norms()[j], ops.leading()[j]])
                .collect();
            ok(table(fmt, &["j", "a_j", "b_j", "h_j", "k_j"], &rows)?)
        }
        Command::JanossyKernel { weight, n, region, grid } => {
            let sys = system(weight, *n)?;
            let pts: Vec<f64> = grid.points().into_iter().filter(|&x| region.contains(x)).collect();
            if pts.is_empty() {
                return Err(CliError::Config(format!("--grid has no points inside --region {region}")));
            }
            let thm = janossy_kernel_theorem1(sys.phi(), sys.psi(), sys.measure(), region)?;
            let res = janossy_kernel_resolvent(&sys, region)?;
            let pairs: Vec<(f64, f64)> =
                pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).collect();
            let rows: Vec<Vec<f64>> = pairs
                .into_par_iter()
                .map(|(x, y)| {
                    let (a, b) = (thm.eval(x, y), res.eval(x, y));
                    vec![x, y, a, b, (a - b).abs()]
                })
                .collect();
            ok(table(fmt, &["x", "y", "L_theorem1", "L_resolvent", "diff"], &rows)?)
        }
        Command::Gap { weight, n, region, grid } => {
            let sys = system(weight, *n)?;
            let rows = sweep(grid, |s| {
                Ok(vec![s, fredholm_det(&sys, &region.at(s))?])
            })?;
            ok(table(fmt, &["s", "value"], &rows)?)
        }
        Command::Counts { weight, n, region } => {
            let sys = system(weight, *n)?;
            let q = count_distribution(&sys, region)?;
            let text = match fmt {
                Format::Json => json_text(&CountsJson {
                    region: &q.region,
                    n: *n,
                    probabilities: q.probabilities(),
                    mean: q.mean(),
                    total: q.total(),
                }),
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = q
                        .probabilities()
                        .iter()
                        .enumerate()
                        .map(|(k, &p)| vec![k as f64, p])
                        .collect();
                    table(fmt, &["k", "probability"], &rows)?
                }
            };
            ok(text)
        }
        Command::Kth { weight, n, k, grid, density } => {
            check_k(*k, *n)?;
            if *density && *k as usize > MAX_DENSITY_K {
                return Err(CliError::Config(format!(
                    "--density supports --k up to {MAX_DENSITY_K}, got {k}"
                )));
            }
            let sys = system(weight, *n)?;
            let k = *k as usize;
            let rows = sweep(grid, |s| {
                let mut row = vec![s, kth_particle_survival(&sys, k, s)?];
                if *density {
                    row.push(kth_particle_density(&sys, k, s)?);
                }
                Ok(row)
            })?;
            let cols: &[&str] = if *density {
                &["s", "survival", "density"]
            } else {
                &["s", "survival"]
            };
            ok(table(fmt, cols, &rows)?)
        }
        Command::Bessel { alpha, grid, form } => {
            if !(alpha.is_finite() && *alpha > -1.0) {
                return Err(CliError::Config(format!("--alpha must exceed -1, got {alpha}")));
            }
            let forms: Vec<BesselForm> = match form {
                Some(f) => vec![*f],
                None => vec![BesselForm::Series, BesselForm::Cd, BesselForm::Integral],
            };
            let names: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
            let mut cols = vec!["x", "y"];
            cols.extend(names.iter().map(String::as_str));
            let pts = grid.points();
            let pairs: Vec<(f64, f64)> =
                pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).collect();
            // a form outside its domain (e.g. cd at 0) is reported as NaN
            let rows: Vec<Vec<f64>> = pairs
                .into_par_iter()
                .map(|(x, y)| {
                    let mut row = vec![x, y];
                    row.extend(
                        forms.iter().map(|&f| bessel_kernel(*alpha, x, y, f).unwrap_or(f64::NAN)),
                    );
                    row
                })
                .collect();
            ok(table(fmt, &cols, &rows)?)
        }
        Command::LimitLaw { k, grid } => {
            let rows = sweep(grid, |s| Ok(vec![s, limit_kth_survival(*k as usize, s)?]))?;
            ok(table(fmt, &["s", "survival"], &rows)?)
        }
        Command::Mc { n, draws, seed, k, scale, s_grid } => {
            check_k(*k, *n)?;
            let scale = scale.unwrap_or(*n as f64);
            if !(scale.is_finite() && scale > 0.0) {
                return Err(CliError::Config(format!("--scale must be positive, got {scale}")));
            }
            let samples = sample_many(*n as usize, *draws as usize, *seed)?;
            let grid = s_grid.points();
            let emp = empirical_survival(&samples, *k as usize, scale, &grid)?;
            let sys = polynomial_ensemble(&Measure::laguerre(0.0)?, *n as usize)?;
            let analytic: Vec<f64> = grid
                .par_iter()
                .map(|&s| kth_particle_survival(&sys, *k as usize, s / scale))
                .collect::<janossy_core::Result<_>>()?;
            let rows: Vec<Vec<f64>> = emp
                .iter()
                .zip(&analytic)
                .map(|(p, &a)| vec![p.s, p.fraction, p.lo95, p.hi95, a])
                .collect();
            ok(table(fmt, &["s", "empirical", "lo95", "hi95", "analytic"], &rows)?)
        }
        Command::Verify { seed, criteria } => {
            let ids: Vec<u32> = if criteria.is_empty() {
                (1..=10).collect()
            } else {
                criteria.clone()
            };
            let reports: Vec<CriterionReport> =
                ids.iter().map(|&id| run_criterion(id, *seed)).collect();
            let all_pass = reports.iter().all(|r| r.pass);
            let text = match fmt {
                Format::Json => json_text(&VerifyJson {
                    seed: *seed,
                    all_pass,
                    criteria: &reports,
                }),
                Format::Csv => csv_text(|w| {
                    w.write_record(["criterion_id", "name", "target", "measured", "tolerance", "pass"])?;
                    for r in &reports {
                        w.write_record([
                            r.criterion_id.to_string(),
                            r.name.clone(),
                            r.target.clone(),
                            num(r.measured),
                            num(r.tolerance),
                            r.pass.to_string(),
                        ])?;
                    }
                    Ok(())
                })?,
            };
            Ok(Outcome {
                text,
                success: all_pass,
            })
        }
    }
}

fn thread_count(cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    if let Some(t) = cfg.threads {
        return Ok(Some(t as usize));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV}={v:?} is not a positive integer"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs `cfg` on its own thread pool and writes the result to `--output`
/// or stdout. Returns whether every verification passed.
pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_count(cfg)? {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    let out = pool.install(|| execute(cfg))?;
    match &cfg.output {
        Some(p) => std::fs::write(p, &out.text).map_err(CliError::Io)?,
        None => {
            use std::io::Write;
            let mut so = std::io::stdout().lock();
            so.write_all(out.text.as_bytes()).map_err(CliError::Io)?;
            so.flush().map_err(CliError::Io)?;
        }
    }
    Ok(out.success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_includes_both_ends() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.to_string(), "0:1:5");
    }

    #[test]
    fn grid_rejects_garbage() {
        for bad in ["", "1:2", "0:1:0", "a,b", "1:2:x", "inf"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn template_drops_collapsed_intervals() {
        let t: RegionTemplate = "(0,s)u(2,3)".parse().unwrap();
        assert_eq!(t.at(0.0), Region::interval(2.0, 3.0));
        assert_eq!(t.at(0.5).to_string(), "(0,0.5)u(2,3)");
        assert!("(0,s".parse::<RegionTemplate>().is_err());
        assert!("(s,s)".parse::<RegionTemplate>().is_err());
    }

    #[test]
    fn weight_spec_is_canonical() {
        let w: WeightSpec = "Laguerre".parse().unwrap();
        assert_eq!(w.to_string(), "laguerre:0");
        assert!("weibull".parse::<WeightSpec>().is_err());
    }
}
