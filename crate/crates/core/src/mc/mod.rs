//! Monte Carlo experiments over independent seeded replicas.
//!
//! Replica `r` of an experiment with base seed `s` uses the environment
//! seeded by [`replica_seed`]`(s, r)`. Replicas may run on any number of
//! threads; results are always collected in replica order, so outputs do
//! not depend on the thread count.

pub mod stats;
pub mod tw;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{ArithmeticMode, EdgeWeights, EnvironmentConfig, Orientation, WeightEnvironment};
use crate::error::{Error, Result};
use crate::fpp::{departure_point, first_passage_grid, passage_triple, PassageTriple, StorageMode, Variant};
use crate::rng::replica_seed;
use crate::shape::{self, ShapeCoefficients};
use crate::weight::Weight;

pub use stats::{ks_statistic, two_sample_ks};
pub use tw::{tw_reference, TwTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Shape,
    Gap,
    Fluctuation,
    EntryScaling,
    DeLaw,
}

/// One experiment. Endpoints are `(⌊n x⌋, ⌊n y⌋)` for every `n` in `sizes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub config: EnvironmentConfig,
    pub x: f64,
    pub y: f64,
    pub sizes: Vec<u64>,
    pub replicas: usize,
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if !(self.x >= 0.0 && self.y >= 0.0 && self.x.is_finite() && self.y.is_finite()) {
            return Err(Error::Config(format!("direction ({}, {}) must be finite and nonnegative", self.x, self.y)));
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::Config("sizes must be a nonempty list of positive integers".into()));
        }
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be positive".into()));
        }
        if self.kind == ExperimentKind::Fluctuation {
            self.fluctuation_coefficients()?;
        }
        Ok(())
    }

    /// `(⌊n x⌋, ⌊n y⌋)`.
    pub fn endpoint(&self, n: u64) -> (usize, usize) {
        ((n as f64 * self.x).floor() as usize, (n as f64 * self.y).floor() as usize)
    }

    /// Coefficients at `(x, y)` for the effective Bernoulli parameter of the
    /// horizontal weights.
    pub fn fluctuation_coefficients(&self) -> Result<ShapeCoefficients> {
        let p = self.config.effective_horizontal_bernoulli()?;
        shape::coefficients(p, self.x, self.y).map_err(|e| Error::Config(e.to_string()))
    }

    fn environment(&self, n: u64, seed: u64) -> Result<WeightEnvironment> {
        WeightEnvironment::new(self.config, seed, self.endpoint(n))
    }
}

/// Thread count for replica-level parallelism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parallelism(pub usize);

impl Default for Parallelism {
    fn default() -> Self {
        Parallelism(1)
    }
}

/// Runs `task(r)` for `r in 0..count` and returns the results in order.
pub fn run_replicas<T, F>(par: Parallelism, count: usize, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if par.0 <= 1 {
        return (0..count).map(task).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(par.0)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(&task).collect())
}

/// Per-replica output, written as one CSV row `n,seed,F,FH,FV,E,scaled`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub n: u64,
    pub seed: u64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "FH")]
    pub fh: f64,
    #[serde(rename = "FV")]
    pub fv: f64,
    #[serde(rename = "E")]
    pub e: u64,
    pub scaled: Option<f64>,
}

impl SampleRecord {
    /// `F ≥ max(F_H, F_V)`, exactly.
    pub fn dominates(&self) -> bool {
        self.f >= self.fh && self.f >= self.fv
    }
}

pub fn write_records_csv<W: Write>(records: &[SampleRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

fn triple_as_f64(env: &WeightEnvironment, m: usize, n: usize) -> Result<PassageTriple<f64>> {
    fn convert<W: Weight>(t: PassageTriple<W>) -> PassageTriple<f64> {
        PassageTriple {
            full: t.full.to_f64(),
            horizontal: t.horizontal.to_f64(),
            vertical: t.vertical.to_f64(),
            entry: t.entry,
        }
    }
    Ok(match env.config().mode {
        ArithmeticMode::Integer => convert(passage_triple::<i64>(env, m, n)?),
        ArithmeticMode::Real => convert(passage_triple::<f64>(env, m, n)?),
    })
}

fn sample_size(spec: &ExperimentSpec, n: u64, par: Parallelism, coeffs: Option<&ShapeCoefficients>) -> Result<Vec<SampleRecord>> {
    let (m, k) = spec.endpoint(n);
    run_replicas(par, spec.replicas, |r| {
        let seed = replica_seed(spec.base_seed, r as u64);
        let env = spec.environment(n, seed)?;
        let t = triple_as_f64(&env, m, k)?;
        Ok(SampleRecord {
            n,
            seed,
            f: t.full,
            fh: t.horizontal,
            fv: t.vertical,
            e: t.entry as u64,
            scaled: coeffs.map(|c| shape::scaled_fluctuation(t.full, n, c)),
        })
    })
}

fn collect_records(spec: &ExperimentSpec, par: Parallelism, coeffs: Option<&ShapeCoefficients>) -> Result<Vec<Vec<SampleRecord>>> {
    spec.validate()?;
    spec.sizes.iter().map(|&n| sample_size(spec, n, par, coeffs)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanWithError {
    pub mean: f64,
    pub std_error: f64,
}

impl MeanWithError {
    fn of(xs: &[f64]) -> Self {
        Self { mean: stats::mean(xs), std_error: stats::std_error(xs) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub n: u64,
    pub m: usize,
    pub k: usize,
    pub f_over_n: MeanWithError,
    pub fh_over_n: MeanWithError,
    pub fv_over_n: MeanWithError,
    /// Closed-form `max(f_H, f_V)` when both weight laws are scaled Bernoulli.
    pub closed_form: Option<f64>,
}

/// Common wrapper of every experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput<R> {
    pub spec: ExperimentSpec,
    pub rows: Vec<R>,
    /// Records violating `F ≥ max(F_H, F_V)`; always zero for a correct DP.
    pub domination_violations: usize,
    #[serde(skip)]
    pub records: Vec<SampleRecord>,
}

impl<R: Serialize> ExperimentOutput<R> {
    fn new(spec: &ExperimentSpec, rows: Vec<R>, per_size: Vec<Vec<SampleRecord>>) -> Self {
        let records: Vec<SampleRecord> = per_size.into_iter().flatten().collect();
        let domination_violations = records.iter().filter(|r| !r.dominates()).count();
        Self { spec: spec.clone(), rows, domination_violations, records }
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_records_csv(&self.records, out)
    }
}

pub fn run_shape_experiment(spec: &ExperimentSpec, par: Parallelism) -> Result<ExperimentOutput<ShapeRow>> {
    let per_size = collect_records(spec, par, None)?;
    let closed_form = shape::limit_shape_for_config(&spec.config, spec.x, spec.y).ok();
    let rows = spec
        .sizes
        .iter()
        .zip(&per_size)
        .map(|(&n, recs)| {
            let (m, k) = spec.endpoint(n);
            let scaled = |g: fn(&SampleRecord) -> f64| recs.iter().map(|r| g(r) / n as f64).collect::<Vec<_>>();
            ShapeRow {
                n,
                m,
                k,
                f_over_n: MeanWithError::of(&scaled(|r| r.f)),
                fh_over_n: MeanWithError::of(&scaled(|r| r.fh)),
                fv_over_n: MeanWithError::of(&scaled(|r| r.fv)),
                closed_form,
            }
        })
        .collect();
    Ok(ExperimentOutput::new(spec, rows, per_size))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: u64,
    /// `(F − max(F_H, F_V)) / n`.
    pub gap_over_n: MeanWithError,
    /// `(F − max(F_H, F_V)) / n^{1/3}`.
    pub gap_over_cbrt_n: MeanWithError,
    pub min_gap: f64,
}

pub fn run_gap_experiment(spec: &ExperimentSpec, par: Parallelism) -> Result<ExperimentOutput<GapRow>> {
    let per_size = collect_records(spec, par, None)?;
    let rows = spec
        .sizes
        .iter()
        .zip(&per_size)
        .map(|(&n, recs)| {
            let gaps: Vec<f64> = recs.iter().map(|r| r.f - r.fh.max(r.fv)).collect();
            let nf = n as f64;
            GapRow {
                n,
                gap_over_n: MeanWithError::of(&gaps.iter().map(|g| g / nf).collect::<Vec<_>>()),
                gap_over_cbrt_n: MeanWithError::of(&gaps.iter().map(|g| g / nf.cbrt()).collect::<Vec<_>>()),
                min_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    Ok(ExperimentOutput::new(spec, rows, per_size))
}

/// Quantile levels reported for scaled fluctuations.
pub const QUANTILE_LEVELS: [f64; 7] = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub level: f64,
    pub empirical: f64,
    pub reference: f64,
}

/// Scaled-fluctuation statistics against the TW-GUE reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSummary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub ks_distance: f64,
    pub quantiles: Vec<QuantileRow>,
}

impl FluctuationSummary {
    pub fn from_samples(samples: &[f64], reference: &TwTable) -> Result<Self> {
        let sorted = stats::sorted(samples);
        let ks_distance = ks_statistic(&sorted, |x| reference.cdf(x))?;
        Ok(Self {
            count: samples.len(),
            mean: stats::mean(samples),
            sd: stats::std_dev(samples),
            ks_distance,
            quantiles: QUANTILE_LEVELS
                .iter()
                .map(|&level| QuantileRow {
                    level,
                    empirical: stats::quantile(&sorted, level),
                    reference: reference.quantile(level),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationRow {
    pub n: u64,
    pub coefficients: ShapeCoefficients,
    /// Scaled fluctuations of `F`.
    pub full: FluctuationSummary,
    /// Scaled fluctuations of `F_H` at the same replicas.
    pub horizontal: FluctuationSummary,
    /// Mean of `|F − F_H| / n^{1/3}`.
    pub mean_abs_gap_over_cbrt_n: f64,
}

pub fn run_fluctuation_experiment(
    spec: &ExperimentSpec,
    par: Parallelism,
    reference: &TwTable,
) -> Result<ExperimentOutput<FluctuationRow>> {
    let coeffs = spec.fluctuation_coefficients()?;
    let per_size = collect_records(spec, par, Some(&coeffs))?;
    let rows = spec
        .sizes
        .iter()
        .zip(&per_size)
        .map(|(&n, recs)| {
            let full: Vec<f64> = recs.iter().filter_map(|r| r.scaled).collect();
            let hor: Vec<f64> = recs.iter().map(|r| shape::scaled_fluctuation(r.fh, n, &coeffs)).collect();
            let gaps: Vec<f64> = recs.iter().map(|r| (r.f - r.fh).abs() / (n as f64).cbrt()).collect();
            Ok(FluctuationRow {
                n,
                coefficients: coeffs,
                full: FluctuationSummary::from_samples(&full, reference)?,
                horizontal: FluctuationSummary::from_samples(&hor, reference)?,
                mean_abs_gap_over_cbrt_n: stats::mean(&gaps),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutput::new(spec, rows, per_size))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryRow {
    pub n: u64,
    pub median_over_cbrt_n: f64,
    pub p90_over_cbrt_n: f64,
    pub median_over_n: f64,
    pub p90_over_n: f64,
}

pub fn run_entry_scaling_experiment(spec: &ExperimentSpec, par: Parallelism) -> Result<ExperimentOutput<EntryRow>> {
    let per_size = collect_records(spec, par, None)?;
    let rows = spec
        .sizes
        .iter()
        .zip(&per_size)
        .map(|(&n, recs)| {
            let entries = stats::sorted(&recs.iter().map(|r| r.e as f64).collect::<Vec<_>>());
            let nf = n as f64;
            EntryRow {
                n,
                median_over_cbrt_n: stats::median(&entries) / nf.cbrt(),
                p90_over_cbrt_n: stats::quantile(&entries, 0.9) / nf.cbrt(),
                median_over_n: stats::median(&entries) / nf,
                p90_over_n: stats::quantile(&entries, 0.9) / nf,
            }
        })
        .collect();
    Ok(ExperimentOutput::new(spec, rows, per_size))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeLawRow {
    pub n: u64,
    pub m: usize,
    pub k: usize,
    pub ks_distance: f64,
    pub departure_mean: f64,
    pub entry_mean: f64,
    pub departure_quantiles: Vec<(f64, f64)>,
    pub entry_quantiles: Vec<(f64, f64)>,
}

/// Departure points at replicas `replicas..2·replicas` and entry points
/// (from the records) at replicas `0..replicas`, so the two samples are
/// independent.
pub fn run_de_law_experiment(spec: &ExperimentSpec, par: Parallelism) -> Result<ExperimentOutput<DeLawRow>> {
    let per_size = collect_records(spec, par, None)?;
    let mut rows = Vec::with_capacity(spec.sizes.len());
    for (&n, recs) in spec.sizes.iter().zip(&per_size) {
        let (m, k) = spec.endpoint(n);
        let departures = run_replicas(par, spec.replicas, |r| {
            let seed = replica_seed(spec.base_seed, (spec.replicas + r) as u64);
            let env = spec.environment(n, seed)?;
            Ok(match env.config().mode {
                ArithmeticMode::Integer => departure_point::<i64>(&env, m, k),
                ArithmeticMode::Real => departure_point::<f64>(&env, m, k),
            } as f64)
        })?;
        let entries: Vec<f64> = recs.iter().map(|r| r.e as f64).collect();
        let qs = |xs: &[f64]| {
            let s = stats::sorted(xs);
            QUANTILE_LEVELS.iter().map(|&l| (l, stats::quantile(&s, l))).collect::<Vec<_>>()
        };
        rows.push(DeLawRow {
            n,
            m,
            k,
            ks_distance: two_sample_ks(&departures, &entries)?,
            departure_mean: stats::mean(&departures),
            entry_mean: stats::mean(&entries),
            departure_quantiles: qs(&departures),
            entry_quantiles: qs(&entries),
        });
    }
    Ok(ExperimentOutput::new(spec, rows, per_size))
}

/// Number of replicas with `F_H(m, n) = 0`.
pub fn count_zero_horizontal(
    config: &EnvironmentConfig,
    m: usize,
    n: usize,
    replicas: usize,
    base_seed: u64,
    par: Parallelism,
) -> Result<usize> {
    let zeros = run_replicas(par, replicas, |r| {
        let env = WeightEnvironment::new(*config, replica_seed(base_seed, r as u64), (m, n))?;
        Ok(match config.mode {
            ArithmeticMode::Integer => horizontal_value::<i64>(&env, m, n)? == 0.0,
            ArithmeticMode::Real => horizontal_value::<f64>(&env, m, n)? == 0.0,
        })
    })?;
    Ok(zeros.into_iter().filter(|&z| z).count())
}

fn horizontal_value<W: Weight>(env: &impl EdgeWeights<W>, m: usize, n: usize) -> Result<f64> {
    Ok(first_passage_grid(env, Variant::Horizontal, m, n, StorageMode::Rolling)?.endpoint().to_f64())
}

/// `P(horizontal weight = 0)` of a configuration.
pub fn horizontal_zero_probability(config: &EnvironmentConfig) -> f64 {
    config.weight_zero_probability(Orientation::Horizontal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: ExperimentKind, p: f64, xi: &str, eta: &str, mode: ArithmeticMode) -> ExperimentSpec {
        ExperimentSpec {
            kind,
            config: EnvironmentConfig::new(p, xi.parse().unwrap(), eta.parse().unwrap(), mode).unwrap(),
            x: 2.0,
            y: 1.0,
            sizes: vec![20, 40],
            replicas: 8,
            base_seed: 17,
        }
    }

    #[test]
    fn endpoints_use_floor() {
        let mut s = spec(ExperimentKind::Shape, 0.5, "const:1", "const:1", ArithmeticMode::Integer);
        s.x = 1.7;
        s.y = 0.33;
        assert_eq!(s.endpoint(10), (17, 3));
        assert_eq!(s.endpoint(3), (5, 0));
    }

    #[test]
    fn zero_weights_have_zero_gap() {
        let s = spec(ExperimentKind::Gap, 0.5, "const:0", "const:0", ArithmeticMode::Integer);
        let out = run_gap_experiment(&s, Parallelism(1)).unwrap();
        for row in &out.rows {
            assert_eq!(row.gap_over_n.mean, 0.0);
            assert_eq!(row.min_gap, 0.0);
        }
    }

    #[test]
    fn zero_weights_have_full_entry() {
        let s = spec(ExperimentKind::EntryScaling, 0.5, "const:0", "const:0", ArithmeticMode::Integer);
        let out = run_entry_scaling_experiment(&s, Parallelism(1)).unwrap();
        for row in &out.rows {
            assert_eq!(row.median_over_n, 1.0);
        }
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let s = spec(ExperimentKind::Gap, 0.5, "const:1", "exp:1", ArithmeticMode::Real);
        let mut a = Vec::new();
        let mut b = Vec::new();
        run_gap_experiment(&s, Parallelism(1)).unwrap().write_json(&mut a).unwrap();
        run_gap_experiment(&s, Parallelism(4)).unwrap().write_json(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fluctuation_domain_errors() {
        let mut s = spec(ExperimentKind::Fluctuation, 0.5, "const:1", "exp:1", ArithmeticMode::Real);
        s.x = 0.5;
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        let s = spec(ExperimentKind::Fluctuation, 0.5, "exp:1", "exp:1", ArithmeticMode::Real);
        assert!(s.validate().is_err());
    }

    #[test]
    fn bad_specs_rejected() {
        let mut s = spec(ExperimentKind::Shape, 0.5, "const:1", "const:1", ArithmeticMode::Integer);
        s.sizes.clear();
        assert!(s.validate().is_err());
        let mut s = spec(ExperimentKind::Shape, 0.5, "const:1", "const:1", ArithmeticMode::Integer);
        s.replicas = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn csv_schema() {
        let s = spec(ExperimentKind::Shape, 0.5, "const:1", "const:1", ArithmeticMode::Integer);
        let out = run_shape_experiment(&s, Parallelism(1)).unwrap();
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "n,seed,F,FH,FV,E,scaled");
        assert_eq!(text.lines().count(), 1 + 16);
    }
}
