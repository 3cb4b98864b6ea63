//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every tolerance is pinned below.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use sjperc_core::fpp::brute_force_value;
use sjperc_core::lemma::{negate_boundary, upper_bound_check, verify_identity};
use sjperc_core::mc::stats::{self, ks_statistic, median, sorted};
use sjperc_core::mc::{
    count_zero_horizontal, run_de_law_experiment, run_fluctuation_experiment, run_shape_experiment, tw_reference,
    ExperimentKind, ExperimentSpec, Parallelism, SampleRecord,
};
use sjperc_core::rng::mix64;
use sjperc_core::shape::prob_zero_exact;
use sjperc_core::web::{build_web, jump_distance, WebDirection};
use sjperc_core::{
    first_passage_between, first_passage_grid, increments, ArithmeticMode, Edge, EnvironmentConfig,
    StorageMode, Variant, WeightEnvironment,
};

// 1
const ORACLE_ENVIRONMENTS: usize = 500;
const ORACLE_MAX_STEPS: usize = 14;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(30);
// 2
const LEMMA_INT_ENVIRONMENTS: u64 = 100;
const LEMMA_INT_SIDE: usize = 300;
const LEMMA_REAL_ENVIRONMENTS: u64 = 20;
const LEMMA_REAL_SIDE: usize = 200;
const LEMMA_REAL_REL_TOL: f64 = 1e-9;
const LEMMA_TIME_LIMIT: Duration = Duration::from_secs(60);
// 3
const SANDWICH_CHECKS: u64 = 500;
const SANDWICH_SIDE: usize = 40;
// 4
const SHAPE_SIZE: u64 = 2000;
const SHAPE_REPLICAS: usize = 20;
const SHAPE_TARGET: f64 = 0.214360;
const SHAPE_TOL: f64 = 0.02;
const SHAPE_TIME_LIMIT: Duration = Duration::from_secs(120);
// 5
const ZERO_REPLICAS: usize = 10_000;
const ZERO_SIGMAS: f64 = 3.0;
// 6
const FLUCT_SIZE: u64 = 1000;
const FLUCT_REPLICAS: usize = 1000;
const TW_MEAN: f64 = -1.771087;
const TW_SD: f64 = 0.901773;
const FLUCT_MEAN_TOL: f64 = 0.15;
const FLUCT_SD_TOL: f64 = 0.15;
const FLUCT_KS_MAX: f64 = 0.08;
// 7
const ENTRY_SIZES: [u64; 4] = [250, 500, 1000, 2000];
const ENTRY_FRACTION_REPLICAS: usize = 200;
const ENTRY_FRACTION_MAX: f64 = 0.05;
// 8
const DE_REPLICAS: usize = 2000;
const DE_KS_MAX: f64 = 0.06;
// 10
const INVARIANT_INSTANCES: u64 = 1000;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn config(p: f64, xi: &str, eta: &str, mode: ArithmeticMode) -> EnvironmentConfig {
    EnvironmentConfig::new(p, xi.parse().unwrap(), eta.parse().unwrap(), mode).unwrap()
}

fn threads() -> Parallelism {
    Parallelism(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Integer laws and switch probabilities cycled through instance loops.
fn int_instance(k: u64) -> EnvironmentConfig {
    let laws = ["bernoulli:0.5", "geom:0.4", "const:1", "geom:0.7", "const:0"];
    let ps = [0.2, 0.5, 0.7, 0.9];
    let h = mix64(k ^ 0xacce97);
    config(
        ps[(h % 4) as usize],
        laws[(h >> 8) as usize % laws.len()],
        laws[(h >> 16) as usize % laws.len()],
        ArithmeticMode::Integer,
    )
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut failures = 0;
    let mut checked = 0;
    for variant in Variant::ALL {
        for k in 0..ORACLE_ENVIRONMENTS as u64 {
            let h = mix64(k.wrapping_mul(31).wrapping_add(variant as u64));
            let m = (h % (ORACLE_MAX_STEPS as u64 + 1)) as usize;
            let n = ((h >> 20) % (ORACLE_MAX_STEPS - m + 1) as u64) as usize;
            let env = WeightEnvironment::new(int_instance(k), k, (m, n)).unwrap();
            let dp: i64 = first_passage_grid(&env, variant, m, n, StorageMode::Full).unwrap().endpoint();
            let brute: i64 = brute_force_value(&env, variant, m, n).unwrap();
            failures += usize::from(dp != brute);
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        failures == 0 && elapsed < ORACLE_TIME_LIMIT,
        format!("{checked} instances, {failures} mismatches, {:.1}s (limit {}s)", elapsed.as_secs_f64(), ORACLE_TIME_LIMIT.as_secs()),
    )
}

fn lemma_identity() -> Verdict {
    let start = Instant::now();
    let int = config(0.5, "bernoulli:0.5", "bernoulli:0.5", ArithmeticMode::Integer);
    let mut max_abs = 0.0f64;
    let mut failures = 0;
    for seed in 0..LEMMA_INT_ENVIRONMENTS {
        let env = WeightEnvironment::new(int, seed, (LEMMA_INT_SIDE, LEMMA_INT_SIDE)).unwrap();
        let r = verify_identity::<i64>(&negate_boundary(&env), LEMMA_INT_SIDE, LEMMA_INT_SIDE).unwrap();
        max_abs = max_abs.max(r.max_abs_discrepancy);
        failures += usize::from(!r.passed());
    }
    let real = config(0.5, "exp:1", "exp:1", ArithmeticMode::Real);
    let mut max_rel = 0.0f64;
    for seed in 0..LEMMA_REAL_ENVIRONMENTS {
        let env = WeightEnvironment::new(real, seed, (LEMMA_REAL_SIDE, LEMMA_REAL_SIDE)).unwrap();
        let r = verify_identity::<f64>(&negate_boundary(&env), LEMMA_REAL_SIDE, LEMMA_REAL_SIDE).unwrap();
        max_rel = max_rel.max(r.max_rel_discrepancy);
    }
    let elapsed = start.elapsed();
    verdict(
        max_abs == 0.0 && failures == 0 && max_rel <= LEMMA_REAL_REL_TOL && elapsed < LEMMA_TIME_LIMIT,
        format!(
            "integer max discrepancy {max_abs}, real max relative discrepancy {max_rel:.2e} (tol {LEMMA_REAL_REL_TOL:e}), {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn domination_and_sandwich(records: &[SampleRecord]) -> Verdict {
    let dominated = records.iter().filter(|r| !(r.f >= r.fh && r.f >= r.fv)).count();
    let c = config(0.5, "geom:0.5", "geom:0.5", ArithmeticMode::Integer);
    let mut sandwich_failures = 0;
    let mut strict = 0;
    for seed in 0..SANDWICH_CHECKS {
        let env = WeightEnvironment::new(c, seed, (SANDWICH_SIDE, SANDWICH_SIDE)).unwrap();
        let w = upper_bound_check::<i64>(&env, SANDWICH_SIDE, SANDWICH_SIDE).unwrap();
        sandwich_failures += usize::from(!w.holds);
        strict += usize::from(w.strict_both_sides());
    }
    verdict(
        dominated == 0 && sandwich_failures == 0,
        format!(
            "{} records, {dominated} domination failures; {SANDWICH_CHECKS} sandwich checks, {sandwich_failures} failures ({strict} strict on both sides)",
            records.len()
        ),
    )
}

fn limit_shape(records: &mut Vec<SampleRecord>) -> Verdict {
    let spec = ExperimentSpec {
        kind: ExperimentKind::Shape,
        config: config(0.6, "const:1", "const:1", ArithmeticMode::Integer),
        x: 2.0,
        y: 1.0,
        sizes: vec![SHAPE_SIZE],
        replicas: SHAPE_REPLICAS,
        base_seed: 4000,
    };
    let start = Instant::now();
    let out = run_shape_experiment(&spec, Parallelism(1)).unwrap();
    let elapsed = start.elapsed();
    records.extend_from_slice(&out.records);
    let mean = out.rows[0].f_over_n.mean;
    verdict(
        (mean - SHAPE_TARGET).abs() <= SHAPE_TOL && elapsed < SHAPE_TIME_LIMIT,
        format!(
            "mean F/n {mean:.6} vs {SHAPE_TARGET} (tol {SHAPE_TOL}), closed form {:?}, {:.1}s single-threaded",
            out.rows[0].closed_form,
            elapsed.as_secs_f64()
        ),
    )
}

fn zero_probability() -> Verdict {
    let c = config(0.5, "const:1", "const:1", ArithmeticMode::Integer);
    let zeros = count_zero_horizontal(&c, 20, 30, ZERO_REPLICAS, 5000, threads()).unwrap();
    let exact = prob_zero_exact(20, 0.5, 30);
    let observed = zeros as f64 / ZERO_REPLICAS as f64;
    let se = (exact * (1.0 - exact) / ZERO_REPLICAS as f64).sqrt();
    verdict(
        (observed - exact).abs() <= ZERO_SIGMAS * se,
        format!("empirical {observed:.4}, exact {exact:.4}, {:.2} standard errors (limit {ZERO_SIGMAS})", (observed - exact).abs() / se),
    )
}

fn fluctuation_spec() -> ExperimentSpec {
    ExperimentSpec {
        kind: ExperimentKind::Fluctuation,
        config: config(0.5, "const:1", "exp:1", ArithmeticMode::Real),
        x: 4.0,
        y: 1.0,
        sizes: ENTRY_SIZES.to_vec(),
        replicas: FLUCT_REPLICAS,
        base_seed: 6000,
    }
}

fn fluctuations(records: &[SampleRecord]) -> Verdict {
    let spec = fluctuation_spec();
    let coeffs = spec.fluctuation_coefficients().unwrap();
    let tw = tw_reference();
    let scaled: Vec<f64> = records.iter().filter(|r| r.n == FLUCT_SIZE).filter_map(|r| r.scaled).collect();
    assert_eq!(scaled.len(), FLUCT_REPLICAS);
    let mean = stats::mean(&scaled);
    let sd = stats::std_dev(&scaled);
    let ks = ks_statistic(&sorted(&scaled), |x| tw.cdf(x)).unwrap();
    // Diagnostic only: distance of the negated sample to the same table.
    let negated: Vec<f64> = scaled.iter().map(|s| -s).collect();
    let ks_negated = ks_statistic(&sorted(&negated), |x| tw.cdf(x)).unwrap();
    verdict(
        (mean - TW_MEAN).abs() <= FLUCT_MEAN_TOL && (sd - TW_SD).abs() <= FLUCT_SD_TOL && ks <= FLUCT_KS_MAX,
        format!(
            "n={FLUCT_SIZE}, chi={:.6}: mean {mean:.4} (target {TW_MEAN}±{FLUCT_MEAN_TOL}), sd {sd:.4} (target {TW_SD}±{FLUCT_SD_TOL}), KS {ks:.4} (max {FLUCT_KS_MAX}); negated sample KS {ks_negated:.4}",
            coeffs.chi
        ),
    )
}

fn entry_scaling(fluct_records: &[SampleRecord], records: &mut Vec<SampleRecord>) -> Verdict {
    let medians: Vec<f64> = ENTRY_SIZES
        .iter()
        .map(|&n| {
            let e: Vec<f64> = fluct_records.iter().filter(|r| r.n == n).map(|r| r.e as f64).collect();
            median(&sorted(&e)) / (n as f64).cbrt()
        })
        .collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let spec = ExperimentSpec {
        kind: ExperimentKind::EntryScaling,
        config: config(0.6, "const:1", "exp:1", ArithmeticMode::Real),
        x: 2.0,
        y: 1.0,
        sizes: vec![2000],
        replicas: ENTRY_FRACTION_REPLICAS,
        base_seed: 7000,
    };
    let out = sjperc_core::mc::run_entry_scaling_experiment(&spec, threads()).unwrap();
    records.extend_from_slice(&out.records);
    let fraction = out.rows[0].median_over_n;
    let shown: Vec<String> = medians.iter().map(|m| format!("{m:.4}")).collect();
    verdict(
        decreasing && fraction <= ENTRY_FRACTION_MAX,
        format!(
            "median E/n^(1/3) at {ENTRY_SIZES:?}: [{}] strictly decreasing: {decreasing}; p=0.6 median E/n at n=2000: {fraction:.5} (max {ENTRY_FRACTION_MAX})",
            shown.join(", ")
        ),
    )
}

fn departure_entry_law(records: &mut Vec<SampleRecord>) -> Verdict {
    let spec = ExperimentSpec {
        kind: ExperimentKind::DeLaw,
        config: config(0.5, "const:1", "exp:1", ArithmeticMode::Real),
        x: 60.0,
        y: 40.0,
        sizes: vec![1],
        replicas: DE_REPLICAS,
        base_seed: 8000,
    };
    let out = run_de_law_experiment(&spec, threads()).unwrap();
    records.extend_from_slice(&out.records);
    let row = &out.rows[0];
    verdict(
        row.ks_distance <= DE_KS_MAX,
        format!(
            "(m,n)=({},{}), {DE_REPLICAS} replicas each: KS {:.4} (max {DE_KS_MAX}), means D {:.3} / E {:.3}",
            row.m, row.k, row.ks_distance, row.departure_mean, row.entry_mean
        ),
    )
}

fn run_cli(args: &[&str], out: &Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_sjperc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .expect("spawn sjperc");
    assert!(status.success(), "sjperc {args:?} exited with {status}");
    std::fs::read(out).unwrap()
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let experiments: [&[&str]; 5] = [
        &["fluct", "--p", "0.5", "--eta", "exp:1", "--x", "4", "--y", "1", "--sizes", "20,40", "--replicas", "24"],
        &["gap", "--p", "0.5", "--eta", "exp:1", "--x", "2", "--y", "1", "--sizes", "20,40", "--replicas", "24"],
        &["entry-scaling", "--p", "0.5", "--x", "4", "--y", "1", "--sizes", "20,40", "--replicas", "24"],
        &["de-law", "--p", "0.5", "--x", "6", "--y", "4", "--sizes", "2", "--replicas", "24"],
        &["shape", "--p", "0.6", "--x", "2", "--y", "1"],
    ];
    let mut compared = 0;
    let mut differing = Vec::new();
    for args in experiments {
        for format in ["json", "csv"] {
            let mut outputs = Vec::new();
            for (run, threads) in [(0, "1"), (1, "1"), (2, "8"), (3, "8")] {
                let path = dir.path().join(format!("{}-{format}-{run}", args[0]));
                let mut full: Vec<&str> = args.to_vec();
                full.extend(["--format", format, "--seed", "11", "--threads", threads]);
                outputs.push(run_cli(&full, &path));
            }
            compared += 1;
            if outputs.iter().any(|o| o != &outputs[0]) || outputs[0].is_empty() {
                differing.push(format!("{} {format}", args[0]));
            }
        }
    }
    verdict(differing.is_empty(), format!("{compared} outputs x 4 runs (threads 1,1,8,8); differing: {differing:?}"))
}

fn structural_invariants() -> Verdict {
    let mut failures = [0usize; 5];
    for k in 0..INVARIANT_INSTANCES {
        let h = mix64(k ^ 0x5eed_1000);
        let c = int_instance(k);
        let side = 2 + (h % 9) as usize;
        let env = WeightEnvironment::new(c, k, (side, side)).unwrap();

        // Directed triangle inequality at a random midpoint.
        let pick = |shift: u32| ((h >> shift) % (side as u64 + 1)) as usize;
        let mut xs = [pick(8), pick(16), pick(24)];
        let mut ys = [pick(32), pick(40), pick(48)];
        xs.sort();
        ys.sort();
        let whole: i64 = first_passage_between(&env, Variant::Full, xs[0], ys[0], xs[2], ys[2]).unwrap();
        let a: i64 = first_passage_between(&env, Variant::Full, xs[0], ys[0], xs[1], ys[1]).unwrap();
        let b: i64 = first_passage_between(&env, Variant::Full, xs[1], ys[1], xs[2], ys[2]).unwrap();
        failures[0] += usize::from(whole > a + b);

        // H monotonicity: nondecreasing in m, nonincreasing in n.
        let fh = first_passage_grid::<i64>(&env, Variant::Horizontal, side, side, StorageMode::Full).unwrap();
        let monotone = (0..=side).all(|i| {
            (0..=side).all(|j| (i == 0 || fh.at(i - 1, j) <= fh.at(i, j)) && (j == 0 || fh.at(i, j - 1) >= fh.at(i, j)))
        });
        failures[1] += usize::from(!monotone);

        // Increment reconstruction at every point.
        let full = first_passage_grid::<i64>(&env, Variant::Full, side, side, StorageMode::Full).unwrap();
        let inc = increments(&full, &env).unwrap();
        let rebuilt = (0..=side).all(|i| (0..=side).all(|j| inc.reconstruct(i, j) == full.at(i, j)));
        failures[2] += usize::from(!rebuilt);

        // Switch exclusivity on every edge pair.
        let exclusive = (1..=side).all(|i| {
            (1..=side).all(|j| {
                let hw = env.edge_weight(Edge::horizontal(i, j)).unwrap();
                let vw = env.edge_weight(Edge::vertical(i, j)).unwrap();
                hw * vw == 0.0
            })
        });
        failures[3] += usize::from(!exclusive);

        // Jump distance against a shortest path on the web, unit weights.
        let unit = WeightEnvironment::new(config(c.p_bern, "const:1", "const:1", ArithmeticMode::Integer), k, (side, side))
            .unwrap();
        let web = build_web(&unit);
        let d = jump_distance(&unit, side, side).unwrap();
        failures[4] += usize::from(d != web_distance(&web, &unit, side));
    }
    let names = ["triangle", "H-monotonicity", "reconstruction", "exclusivity", "jump distance"];
    let shown: Vec<String> = names.iter().zip(failures).map(|(n, f)| format!("{n} {f}")).collect();
    verdict(
        failures.iter().all(|&f| f == 0),
        format!("{INVARIANT_INSTANCES} instances each; failures: {}", shown.join(", ")),
    )
}

/// Shortest path to `(side, side)` where kept web edges cost 0 and all
/// others cost 1; axis vertices take the kept direction from the switch.
fn web_distance(web: &sjperc_core::web::WebGraph, env: &WeightEnvironment, side: usize) -> u64 {
    let kept = |i: usize, j: usize| {
        if i >= 1 && j >= 1 {
            web.direction(i, j)
        } else if env.switch(i, j) {
            WebDirection::Vertical
        } else {
            WebDirection::Horizontal
        }
    };
    let mut dist = vec![vec![u64::MAX; side + 1]; side + 1];
    dist[0][0] = 0;
    for i in 0..=side {
        for j in 0..=side {
            if i > 0 {
                let c = u64::from(kept(i, j) != WebDirection::Horizontal);
                dist[i][j] = dist[i][j].min(dist[i - 1][j] + c);
            }
            if j > 0 {
                let c = u64::from(kept(i, j) != WebDirection::Vertical);
                dist[i][j] = dist[i][j].min(dist[i][j - 1] + c);
            }
        }
    }
    dist[side][side]
}

fn main() {
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut report = |id: usize, name: &'static str, v: Verdict| {
        println!("[{}] criterion {id:>2} {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        results.push((id, name, v));
    };
    let mut mc_records = Vec::new();

    report(1, "oracle equivalence", oracle_equivalence());
    report(2, "boundary-flip identity", lemma_identity());
    report(4, "limit shape", limit_shape(&mut mc_records));
    report(5, "zero probability", zero_probability());

    let started = Instant::now();
    let fluct = run_fluctuation_experiment(&fluctuation_spec(), threads(), tw_reference()).unwrap();
    println!("        fluctuation run over {:?} x {FLUCT_REPLICAS} replicas took {:.0}s", ENTRY_SIZES, started.elapsed().as_secs_f64());
    mc_records.extend_from_slice(&fluct.records);
    report(6, "fluctuations vs TW-GUE", fluctuations(&fluct.records));
    report(7, "entry-point scaling", entry_scaling(&fluct.records, &mut mc_records));
    report(8, "departure/entry law", departure_entry_law(&mut mc_records));
    report(3, "domination and sandwich", domination_and_sandwich(&mc_records));
    report(9, "determinism", determinism());
    report(10, "structural invariants", structural_invariants());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
