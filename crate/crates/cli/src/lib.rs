//! Argument parsing and dispatch for the `sjperc` binary.
//!
//! Exit statuses: 0 on success, 1 when a check fails, 2 on a configuration
//! error. Diagnostics go to standard error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sjperc_core::fpp::brute_force_value;
use sjperc_core::lemma::{negate_boundary, verify_identity, IdentityReport};
use sjperc_core::mc::{self, ExperimentKind, ExperimentOutput, ExperimentSpec, Parallelism, TwTable};
use sjperc_core::shape::{coefficients, limit_shape_bernoulli};
use sjperc_core::web::{build_web, export_web, jump_distance};
use sjperc_core::{
    first_passage_grid, geodesic, ArithmeticMode, DistributionSpec, EnvironmentConfig, Error, StorageMode, Variant,
    Weight, WeightEnvironment,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const FLOOR_NOTE: &str = "\
Endpoints: --x and --y are real directions. For each size n the endpoint is
(floor(n*x), floor(n*y)); --m and --n give lattice endpoints directly.

Distribution specs: bernoulli:q, const:c, geom:q (support 0,1,2,...),
exp:rate, sbern:scale,q.

A JSON file given with --config may set any flag by its long name (for
example {\"p\": 0.5, \"sizes\": [250, 500]}); flags on the command line win.";

#[derive(Debug, Parser)]
#[command(name = "sjperc", version, about = "Directed first-passage percolation with switched edge weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One DP run: prints F, F_H and F_V at (m, n).
    #[command(after_help = FLOOR_NOTE)]
    Passage {
        #[command(flatten)]
        flags: Flags,
        /// Also print a geodesic of the full model.
        #[arg(long)]
        geodesic: bool,
    },
    /// DP against brute-force path enumeration on small grids (m + n <= 16).
    #[command(name = "oracle-test", after_help = FLOOR_NOTE)]
    OracleTest {
        #[command(flatten)]
        flags: Flags,
    },
    /// Boundary-flip identity on environments with negated y-axis weights.
    #[command(name = "lemma-check", after_help = FLOOR_NOTE)]
    LemmaCheck {
        #[command(flatten)]
        flags: Flags,
    },
    /// Closed-form limit shape and fluctuation coefficients at (x, y).
    #[command(after_help = FLOOR_NOTE)]
    Shape {
        #[command(flatten)]
        flags: Flags,
    },
    /// Scaled fluctuations against the Tracy-Widom GUE table.
    #[command(after_help = FLOOR_NOTE)]
    Fluct {
        #[command(flatten)]
        flags: Flags,
    },
    /// Gap F - max(F_H, F_V).
    #[command(after_help = FLOOR_NOTE)]
    Gap {
        #[command(flatten)]
        flags: Flags,
    },
    /// Entry-point statistics across sizes.
    #[command(name = "entry-scaling", after_help = FLOOR_NOTE)]
    EntryScaling {
        #[command(flatten)]
        flags: Flags,
    },
    /// Two-sample comparison of departure and entry points.
    #[command(name = "de-law", after_help = FLOOR_NOTE)]
    DeLaw {
        #[command(flatten)]
        flags: Flags,
    },
    /// Export the zero-weight web as CSV (i,j,dir).
    #[command(after_help = FLOOR_NOTE)]
    Web {
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeFlag {
    Int,
    Real,
}

/// Flags shared by every subcommand. Unset flags fall back to the JSON
/// config file, then to the defaults documented on each flag.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Switch probability P(B = 1) [default: 0.5].
    #[arg(long)]
    pub p: Option<f64>,
    /// Law of the horizontal magnitudes xi [default: const:1].
    #[arg(long)]
    pub xi: Option<String>,
    /// Law of the vertical magnitudes eta [default: exp:1].
    #[arg(long)]
    pub eta: Option<String>,
    /// Horizontal direction component.
    #[arg(long)]
    pub x: Option<f64>,
    /// Vertical direction component.
    #[arg(long)]
    pub y: Option<f64>,
    /// Lattice endpoint, first coordinate.
    #[arg(long)]
    pub m: Option<usize>,
    /// Lattice endpoint, second coordinate.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated sizes n for the Monte Carlo drivers.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<u64>>,
    /// Replicas per size [default: 100].
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Seed, or base seed of a sweep [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of environments in a sweep [default: 10].
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Worker threads for replicas; results do not depend on it [default: 1].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: json for experiments, text otherwise].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Arithmetic [default: int when both laws are integer-valued, else real].
    #[arg(long, value_enum)]
    pub mode: Option<ModeFlag>,
    /// JSON file with flag values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fills unset fields from the JSON file named by `--config`.
    pub fn resolve(mut self) -> Result<Self, Error> {
        let Some(path) = self.config.take() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let file: Flags =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        macro_rules! merge {
            ($($field:ident),*) => { $( if self.$field.is_none() { self.$field = file.$field; } )* };
        }
        merge!(p, xi, eta, x, y, m, n, sizes, replicas, seed, seeds, threads, out, format, mode);
        Ok(self)
    }

    fn law(value: &Option<String>, default: &str) -> Result<DistributionSpec, Error> {
        value.as_deref().unwrap_or(default).parse()
    }

    pub fn environment_config(&self) -> Result<EnvironmentConfig, Error> {
        let xi = Self::law(&self.xi, "const:1")?;
        let eta = Self::law(&self.eta, "exp:1")?;
        let mode = match self.mode {
            Some(ModeFlag::Int) => ArithmeticMode::Integer,
            Some(ModeFlag::Real) => ArithmeticMode::Real,
            None if xi.is_integral() && eta.is_integral() => ArithmeticMode::Integer,
            None => ArithmeticMode::Real,
        };
        EnvironmentConfig::new(self.p.unwrap_or(0.5), xi, eta, mode)
    }

    fn required<T: Copy>(value: Option<T>, name: &str) -> Result<T, Error> {
        value.ok_or_else(|| Error::Config(format!("--{name} is required")))
    }

    fn endpoint(&self) -> Result<(usize, usize), Error> {
        Ok((Self::required(self.m, "m")?, Self::required(self.n, "n")?))
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    fn parallelism(&self) -> Result<Parallelism, Error> {
        match self.threads.unwrap_or(1) {
            0 => Err(Error::Config("--threads must be positive".into())),
            k => Ok(Parallelism(k)),
        }
    }

    pub fn experiment(&self, kind: ExperimentKind) -> Result<ExperimentSpec, Error> {
        let spec = ExperimentSpec {
            kind,
            config: self.environment_config()?,
            x: Self::required(self.x, "x")?,
            y: Self::required(self.y, "y")?,
            sizes: self.sizes.clone().ok_or_else(|| Error::Config("--sizes is required".into()))?,
            replicas: self.replicas.unwrap_or(100),
            base_seed: self.seed(),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn sink(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

enum Outcome {
    Pass,
    CheckFailed(String),
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Pass) => EXIT_OK,
        Ok(Outcome::CheckFailed(msg)) => {
            eprintln!("check failed: {msg}");
            EXIT_CHECK_FAILED
        }
        Err(Error::Consistency(msg)) => {
            eprintln!("check failed: {msg}");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Passage { flags, geodesic } => passage(&flags.resolve()?, geodesic),
        Command::OracleTest { flags } => oracle_test(&flags.resolve()?),
        Command::LemmaCheck { flags } => lemma_check(&flags.resolve()?),
        Command::Shape { flags } => shape(&flags.resolve()?),
        Command::Fluct { flags } => {
            let flags = flags.resolve()?;
            let spec = flags.experiment(ExperimentKind::Fluctuation)?;
            let table = TwTable::from_env()?;
            let out = mc::run_fluctuation_experiment(&spec, flags.parallelism()?, &table)?;
            emit_experiment(&flags, &out)
        }
        Command::Gap { flags } => {
            let flags = flags.resolve()?;
            let out = mc::run_gap_experiment(&flags.experiment(ExperimentKind::Gap)?, flags.parallelism()?)?;
            emit_experiment(&flags, &out)
        }
        Command::EntryScaling { flags } => {
            let flags = flags.resolve()?;
            let spec = flags.experiment(ExperimentKind::EntryScaling)?;
            let out = mc::run_entry_scaling_experiment(&spec, flags.parallelism()?)?;
            emit_experiment(&flags, &out)
        }
        Command::DeLaw { flags } => {
            let flags = flags.resolve()?;
            let out = mc::run_de_law_experiment(&flags.experiment(ExperimentKind::DeLaw)?, flags.parallelism()?)?;
            emit_experiment(&flags, &out)
        }
        Command::Web { flags } => web(&flags.resolve()?),
    }
}

fn emit_experiment<R: Serialize>(flags: &Flags, out: &ExperimentOutput<R>) -> Result<Outcome, Error> {
    let mut sink = flags.sink()?;
    match flags.format.unwrap_or(Format::Json) {
        Format::Json => {
            out.write_json(&mut sink)?;
            writeln!(sink)?;
        }
        Format::Csv => out.write_csv(&mut sink)?,
    }
    sink.flush()?;
    if out.domination_violations > 0 {
        return Ok(Outcome::CheckFailed(format!(
            "{} records violate F >= max(F_H, F_V)",
            out.domination_violations
        )));
    }
    Ok(Outcome::Pass)
}

/// Prints `v` with at most six decimals and no trailing zeros.
fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

#[derive(Serialize)]
struct PassageReport {
    m: usize,
    n: usize,
    seed: u64,
    #[serde(rename = "F")]
    full: f64,
    #[serde(rename = "F_H")]
    horizontal: f64,
    #[serde(rename = "F_V")]
    vertical: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    geodesic: Option<Vec<(usize, usize)>>,
}

fn passage_report<W: Weight>(env: &WeightEnvironment, m: usize, n: usize, with_path: bool) -> Result<PassageReport, Error> {
    let value = |v: Variant| -> Result<f64, Error> {
        Ok(first_passage_grid::<W>(env, v, m, n, StorageMode::Rolling)?.endpoint().to_f64())
    };
    Ok(PassageReport {
        m,
        n,
        seed: env.seed(),
        full: value(Variant::Full)?,
        horizontal: value(Variant::Horizontal)?,
        vertical: value(Variant::Vertical)?,
        geodesic: if with_path { Some(geodesic::<W>(env, Variant::Full, m, n)?.vertices) } else { None },
    })
}

fn passage(flags: &Flags, with_path: bool) -> Result<Outcome, Error> {
    let config = flags.environment_config()?;
    let (m, n) = flags.endpoint()?;
    let env = WeightEnvironment::new(config, flags.seed(), (m, n))?;
    let report = match config.mode {
        ArithmeticMode::Integer => passage_report::<i64>(&env, m, n, with_path)?,
        ArithmeticMode::Real => passage_report::<f64>(&env, m, n, with_path)?,
    };
    let mut sink = flags.sink()?;
    match flags.format {
        Some(Format::Json) => writeln!(sink, "{}", serde_json::to_string_pretty(&report)?)?,
        Some(Format::Csv) => {
            writeln!(sink, "m,n,seed,F,FH,FV")?;
            writeln!(sink, "{},{},{},{},{},{}", m, n, report.seed, report.full, report.horizontal, report.vertical)?;
        }
        None => {
            writeln!(sink, "F={}", report.full)?;
            writeln!(sink, "F_H={}", report.horizontal)?;
            writeln!(sink, "F_V={}", report.vertical)?;
            if let Some(path) = &report.geodesic {
                let points: Vec<String> = path.iter().map(|(i, j)| format!("({i},{j})")).collect();
                writeln!(sink, "geodesic={}", points.join(" "))?;
            }
        }
    }
    sink.flush()?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct SweepSummary<T: Serialize> {
    environments: usize,
    failures: usize,
    detail: Vec<T>,
}

#[derive(Serialize)]
struct OracleCase {
    seed: u64,
    variant: Variant,
    dp: f64,
    brute_force: f64,
}

fn oracle_cases<W: Weight>(env: &WeightEnvironment, m: usize, n: usize) -> Result<Vec<OracleCase>, Error> {
    Variant::ALL
        .iter()
        .map(|&variant| {
            let dp: W = first_passage_grid(env, variant, m, n, StorageMode::Rolling)?.endpoint();
            let brute: W = brute_force_value(env, variant, m, n)?;
            Ok(OracleCase { seed: env.seed(), variant, dp: dp.to_f64(), brute_force: brute.to_f64() })
        })
        .collect()
}

fn oracle_test(flags: &Flags) -> Result<Outcome, Error> {
    let config = flags.environment_config()?;
    let (m, n) = (flags.m.unwrap_or(7), flags.n.unwrap_or(7));
    let seeds = flags.seeds.unwrap_or(10);
    let mut mismatches = Vec::new();
    for k in 0..seeds {
        let env = WeightEnvironment::new(config, flags.seed().wrapping_add(k as u64), (m, n))?;
        let cases = match config.mode {
            ArithmeticMode::Integer => oracle_cases::<i64>(&env, m, n)?,
            ArithmeticMode::Real => oracle_cases::<f64>(&env, m, n)?,
        };
        mismatches.extend(cases.into_iter().filter(|c| match config.mode {
            ArithmeticMode::Integer => c.dp != c.brute_force,
            ArithmeticMode::Real => !c.dp.close_to(c.brute_force, sjperc_core::weight::REAL_REL_TOL),
        }));
    }
    let summary = SweepSummary { environments: seeds, failures: mismatches.len(), detail: mismatches };
    report_sweep(flags, &summary, |s| format!("environments={}\nmismatches={}", s.environments, s.failures))
}

fn report_sweep<T: Serialize>(
    flags: &Flags,
    summary: &SweepSummary<T>,
    text: impl Fn(&SweepSummary<T>) -> String,
) -> Result<Outcome, Error> {
    let mut sink = flags.sink()?;
    match flags.format {
        Some(Format::Json) => writeln!(sink, "{}", serde_json::to_string_pretty(summary)?)?,
        Some(Format::Csv) => return Err(Error::Config("this command writes text or json".into())),
        None => writeln!(sink, "{}", text(summary))?,
    }
    sink.flush()?;
    Ok(if summary.failures == 0 {
        Outcome::Pass
    } else {
        Outcome::CheckFailed(format!("{} of the checks failed", summary.failures))
    })
}

fn lemma_check(flags: &Flags) -> Result<Outcome, Error> {
    let config = flags.environment_config()?;
    let (m, n) = flags.endpoint()?;
    let seeds = flags.seeds.unwrap_or(10);
    let reports = (0..seeds)
        .map(|k| {
            let env = WeightEnvironment::new(config, flags.seed().wrapping_add(k as u64), (m, n))?;
            let view = negate_boundary(&env);
            match config.mode {
                ArithmeticMode::Integer => verify_identity::<i64>(&view, m, n),
                ArithmeticMode::Real => verify_identity::<f64>(&view, m, n),
            }
        })
        .collect::<Result<Vec<IdentityReport>, Error>>()?;
    let max_abs = reports.iter().map(|r| r.max_abs_discrepancy).fold(0.0, f64::max);
    let max_rel = reports.iter().map(|r| r.max_rel_discrepancy).fold(0.0, f64::max);
    let failures = reports.iter().filter(|r| !r.passed()).count();
    let summary = SweepSummary { environments: seeds, failures, detail: reports };
    report_sweep(flags, &summary, |s| {
        format!(
            "environments={}\nmax_discrepancy={}\nmax_relative_discrepancy={}\nfailures={}",
            s.environments, max_abs, max_rel, s.failures
        )
    })
}

fn shape(flags: &Flags) -> Result<Outcome, Error> {
    let p = flags.p.unwrap_or(0.5);
    let x = Flags::required(flags.x, "x")?;
    let y = Flags::required(flags.y, "y")?;
    if !(0.0..=1.0).contains(&p) || !(x >= 0.0 && y >= 0.0) {
        return Err(Error::Config(format!("shape needs p in [0, 1] and x, y >= 0, got p={p}, x={x}, y={y}")));
    }
    let f = limit_shape_bernoulli(p, x, y);
    let coeffs = coefficients(p, x, y);
    let mut sink = flags.sink()?;
    match flags.format {
        Some(Format::Json) => {
            let value = match &coeffs {
                Ok(c) => serde_json::to_value(c)?,
                Err(_) => serde_json::json!({ "p_bern": p, "x": x, "y": y, "f": f }),
            };
            writeln!(sink, "{}", serde_json::to_string_pretty(&value)?)?;
        }
        Some(Format::Csv) => {
            writeln!(sink, "p,x,y,f,tau,chi,rho")?;
            match &coeffs {
                Ok(c) => writeln!(sink, "{p},{x},{y},{},{},{},{}", c.f, c.tau, c.chi, c.rho)?,
                Err(_) => writeln!(sink, "{p},{x},{y},{f},,,")?,
            }
        }
        None => {
            writeln!(sink, "f={}", short(f))?;
            match &coeffs {
                Ok(c) => writeln!(sink, "tau={}\nchi={}\nrho={}", short(c.tau), short(c.chi), short(c.rho))?,
                Err(e) => eprintln!("coefficients undefined here: {e}"),
            }
        }
    }
    sink.flush()?;
    Ok(Outcome::Pass)
}

fn web(flags: &Flags) -> Result<Outcome, Error> {
    let config = flags.environment_config()?;
    let (m, n) = flags.endpoint()?;
    let env = WeightEnvironment::new(config, flags.seed(), (m, n))?;
    let graph = build_web(&env);
    if matches!(flags.format, Some(Format::Json)) {
        return Err(Error::Config("web writes csv only".into()));
    }
    let mut sink = flags.sink()?;
    export_web(&graph, &mut sink)?;
    sink.flush()?;
    if let Ok(d) = jump_distance(&env, m, n) {
        eprintln!("jump_distance={d}");
    }
    Ok(Outcome::Pass)
}

/// Reads a flag file; exposed for tests.
pub fn read_config(path: &Path) -> Result<Flags, Error> {
    Flags { config: Some(path.to_path_buf()), ..Flags::default() }.resolve()
}
