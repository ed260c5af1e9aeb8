//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rafu::config::StudyConfig;
use rafu::engine::{plan, propagate, propagate_with, CountingEvaluator, ExecMode, ModelEvaluator, Outcome};
use rafu::model::parse;
use rafu::possibility::{Interval, PossibilityDist};
use rafu::postprocess::{alpha_slices, double_pair, mean_pbox, pbox_at_alpha, percentile_bound};
use rafu::probability::{induce_rank_correlation, sample, spearman, ProbabilityDist, RankCorrelationSpec, Streams};

// Pinned thresholds.
const AC1_SAMPLE_SIZE: usize = 90;
const AC1_MAX_RUNTIME: Duration = Duration::from_secs(1);
const AC2_BUDGETS: [(&str, usize); 3] = [("grid21", 2100), ("random_alpha", 100), ("dual", 200)];
const AC4_N: usize = 10_000;
const AC4_ORACLE_LEVELS: usize = 101;
const AC4_MAX_SUP_DISTANCE: f64 = 0.02;
const AC4_MAX_RUNTIME: Duration = Duration::from_secs(10);
const AC5_REPETITIONS: u64 = 10_000;
const AC5_TARGET_COVERAGE: f64 = 0.99;
const AC5_COVERAGE_TOLERANCE: f64 = 0.01;
const AC5_TRUE_QUANTILE: f64 = 0.95;
const AC5_MAX_RUNTIME: Duration = Duration::from_secs(60);
const AC6_SPEARMAN_TOLERANCE: f64 = 0.05;
const AC6_SPEARMAN_N: usize = 1000;

fn desk(triplet: &str, extra: &str) -> StudyConfig {
    StudyConfig::from_json(&format!(
        r#"{{
            "parameters": [
                {{"name": "x1", "aleatory": {{"kind": "uniform", "lo": 0, "hi": 1}}}},
                {{"name": "e1", "epistemic": {{"kind": "triangular", "a": 0, "core": 1, "b": 2}}}}
            ],
            "model": "x1 + e1",
            "triplet": {triplet}
            {extra}
        }}"#
    ))
    .expect("desk config")
}

fn cdf_triplet(gamma_e: &str) -> String {
    format!(r#"{{"gamma_s": "cdf", "gamma_e": {gamma_e}, "gamma_a": "none"}}"#)
}

fn gamma_e_json(name: &str) -> &'static str {
    match name {
        "grid21" => r#"{"kind": "grid", "levels": 21}"#,
        "random_alpha" => r#"{"kind": "random_alpha"}"#,
        "dual" => r#"{"kind": "dual"}"#,
        _ => unreachable!(),
    }
}

type Outcome_ = Result<String, String>;

fn ac1() -> Outcome_ {
    let start = Instant::now();
    let p = plan(&desk(r#"{"gamma_s": 0.95, "gamma_e": {"kind": "fixed", "alpha": 0}, "gamma_a": 0.99}"#, ""))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if p.sample_size != AC1_SAMPLE_SIZE {
        return Err(format!("sample_size={} (want {AC1_SAMPLE_SIZE})", p.sample_size));
    }
    if p.eval_count != AC1_SAMPLE_SIZE {
        return Err(format!("eval_count={}", p.eval_count));
    }
    if elapsed >= AC1_MAX_RUNTIME {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("sample_size=90 eval_count=90 in {elapsed:?}"))
}

fn ac2() -> Outcome_ {
    let mut notes = Vec::new();
    for (name, want) in AC2_BUDGETS {
        let config = desk(&cdf_triplet(gamma_e_json(name)), r#", "sample_size": 100, "seed": 5"#);
        let p = plan(&config).map_err(|e| e.to_string())?;
        let counter = CountingEvaluator::new(ModelEvaluator::for_config(&config));
        let s = propagate_with(&p, &config, &counter, ExecMode::default()).map_err(|e| e.to_string())?;
        if p.eval_count != want || counter.calls() != want || s.records.len() != want {
            return Err(format!(
                "{name}: planned {} counted {} records {} (want {want})",
                p.eval_count,
                counter.calls(),
                s.records.len()
            ));
        }
        notes.push(format!("{name}={want}"));
    }
    Ok(notes.join(" "))
}

fn ac3() -> Outcome_ {
    let dual_cfg = desk(&cdf_triplet(gamma_e_json("dual")), r#", "sample_size": 100, "seed": 31"#);
    let grid_cfg = desk(&cdf_triplet(gamma_e_json("grid21")), r#", "sample_size": 100, "seed": 31"#);
    let dual = propagate(&plan(&dual_cfg).unwrap(), &dual_cfg).map_err(|e| e.to_string())?;
    let grid = propagate(&plan(&grid_cfg).unwrap(), &grid_cfg).map_err(|e| e.to_string())?;
    let bits = |iv: Interval| (iv.lo.to_bits(), iv.hi.to_bits());
    let mut compared = 0;
    for level in [0.0, 1.0] {
        let d: Vec<_> = dual.records.iter().filter(|r| r.alpha == level).collect();
        let g: Vec<_> = grid.records.iter().filter(|r| r.alpha == level).collect();
        if d.len() != 100 || g.len() != 100 {
            return Err(format!("alpha={level}: {} dual vs {} grid records", d.len(), g.len()));
        }
        for (a, b) in d.iter().zip(&g) {
            let (Some(x), Some(y)) = (a.interval(), b.interval()) else {
                return Err("unexpected evaluation failure".into());
            };
            if a.sample_index != b.sample_index || bits(x) != bits(y) {
                return Err(format!("sample {} alpha={level}: {x} vs {y}", a.sample_index));
            }
            compared += 1;
        }
    }
    let (pess, opt) = double_pair(&dual).map_err(|e| e.to_string())?;
    let slices = alpha_slices(&grid).map_err(|e| e.to_string())?;
    let (first, last) = (&slices[0], &slices[slices.len() - 1]);
    if pess.f_low != first.f_low || pess.f_up != first.f_up || opt.f_low != last.f_low || opt.f_up != last.f_up {
        return Err("double_pair p-boxes differ from grid slices".into());
    }
    Ok(format!("{compared} interval pairs bitwise equal; p-boxes identical"))
}

fn ac4() -> Outcome_ {
    let start = Instant::now();
    let random_cfg = desk(
        &cdf_triplet(r#"{"kind": "random_alpha"}"#),
        &format!(r#", "sample_size": {AC4_N}, "seed": 77"#),
    );
    let random = propagate(&plan(&random_cfg).unwrap(), &random_cfg).map_err(|e| e.to_string())?;
    let estimate = mean_pbox(&random).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let oracle_cfg = desk(
        &cdf_triplet(&format!(r#"{{"kind": "grid", "levels": {AC4_ORACLE_LEVELS}}}"#)),
        &format!(r#", "sample_size": {AC4_N}, "seed": 77"#),
    );
    let grid = propagate(&plan(&oracle_cfg).unwrap(), &oracle_cfg).map_err(|e| e.to_string())?;
    let oracle = mean_pbox(&grid).map_err(|e| e.to_string())?;

    let d_low = estimate.f_low.sup_distance(&oracle.f_low);
    let d_up = estimate.f_up.sup_distance(&oracle.f_up);
    let detail = format!("sup|F_low|={d_low:.4} sup|F_up|={d_up:.4} runtime={elapsed:?}");
    if d_low > AC4_MAX_SUP_DISTANCE || d_up > AC4_MAX_SUP_DISTANCE || elapsed >= AC4_MAX_RUNTIME {
        return Err(detail);
    }
    Ok(detail)
}

fn ac5() -> Outcome_ {
    let start = Instant::now();
    let base = StudyConfig::from_json(
        r#"{
            "parameters": [{"name": "x1", "aleatory": {"kind": "uniform", "lo": 0, "hi": 1}}],
            "model": "x1",
            "triplet": {"gamma_s": 0.95, "gamma_e": {"kind": "fixed", "alpha": 0}, "gamma_a": 0.99}
        }"#,
    )
    .unwrap();
    let mut covered = 0u64;
    for seed in 0..AC5_REPETITIONS {
        let config = base.clone().with_seed(seed);
        let p = plan(&config).map_err(|e| e.to_string())?;
        if p.sample_size != 90 || p.rank_from_top != Some(1) {
            return Err(format!("unexpected plan {p:?}"));
        }
        let s = propagate(&p, &config).map_err(|e| e.to_string())?;
        if percentile_bound(&s, &p, false).map_err(|e| e.to_string())? >= AC5_TRUE_QUANTILE {
            covered += 1;
        }
    }
    let elapsed = start.elapsed();
    let freq = covered as f64 / AC5_REPETITIONS as f64;
    let detail = format!("coverage={freq:.4} over {AC5_REPETITIONS} runs in {elapsed:?}");
    if (freq - AC5_TARGET_COVERAGE).abs() > AC5_COVERAGE_TOLERANCE || elapsed >= AC5_MAX_RUNTIME {
        return Err(detail);
    }
    Ok(detail)
}

fn random_possibility(rng: &mut ChaCha8Rng) -> PossibilityDist {
    let mut x = rng.gen_range(-10.0..10.0);
    let mut knots = vec![(x, 0.0)];
    let mut rising: Vec<f64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0.01..1.0)).collect();
    rising.sort_by(f64::total_cmp);
    for m in rising {
        x += rng.gen_range(0.0..3.0);
        knots.push((x, m));
    }
    x += rng.gen_range(0.0..3.0);
    knots.push((x, 1.0));
    x += rng.gen_range(0.0..3.0);
    knots.push((x, 1.0));
    let mut falling: Vec<f64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0.01..1.0)).collect();
    falling.sort_by(|a, b| b.total_cmp(a));
    for m in falling {
        x += rng.gen_range(0.0..3.0);
        knots.push((x, m));
    }
    knots.push((x + rng.gen_range(0.0..3.0), 0.0));
    PossibilityDist::from_knots(knots).expect("valid random distribution")
}

fn ac6() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut checks = Vec::new();

    // possibility: nestedness
    for _ in 0..2000 {
        let d = random_possibility(&mut rng);
        let (a, b) = (rng.gen_range(0.0..=1.0f64), rng.gen_range(0.0..=1.0f64));
        let (lo, hi) = (a.min(b), a.max(b));
        if !d.alpha_cut(lo).unwrap().encloses(&d.alpha_cut(hi).unwrap()) {
            return Err(format!("nestedness fails for {d:?} at {lo}, {hi}"));
        }
    }
    checks.push("nestedness");

    // model: enclosure and sandwich
    let models = ["x*y - z", "sin(x) + y^2 * exp(-z)", "abs(x - y) / (1 + z^2)", "max(x, y) * min(y, z) - sqrt(1 + x^2)"];
    for src in models {
        let ast = parse(src).unwrap();
        for _ in 0..500 {
            let ranges: Vec<Interval> = (0..ast.variables().len())
                .map(|_| {
                    let lo = rng.gen_range(-4.0..4.0);
                    Interval { lo, hi: lo + rng.gen_range(0.0..3.0) }
                })
                .collect();
            let Ok(outer) = ast.interval_over(&ranges) else { continue };
            let point: Vec<f64> = ranges.iter().map(|r| rng.gen_range(r.lo..=r.hi)).collect();
            if let Ok(v) = ast.point_at(&point) {
                if !outer.contains(v) {
                    return Err(format!("{src}: {v} escapes {outer}"));
                }
            }
            if let Ok(corners) = ast.vertex_over(&ranges, 12) {
                if !outer.encloses(&corners) {
                    return Err(format!("{src}: vertex {corners} escapes {outer}"));
                }
            }
        }
    }
    checks.push("enclosure+sandwich");

    // postprocess: ordering and narrowing in alpha
    let cfg = StudyConfig::from_json(
        r#"{
            "parameters": [
                {"name": "x1", "aleatory": {"kind": "normal", "mean": 1, "sd": 0.3}},
                {"name": "e1", "epistemic": {"kind": "trapezoidal", "a": 0, "core_lo": 1, "core_hi": 2, "b": 4}}
            ],
            "model": "x1 * e1 - e1^2 / 4",
            "triplet": {"gamma_s": "cdf", "gamma_e": {"kind": "grid", "levels": 11}, "gamma_a": "none"},
            "sample_size": 400,
            "epistemic_eval": "interval",
            "seed": 3
        }"#,
    )
    .unwrap();
    let grid = propagate(&plan(&cfg).unwrap(), &cfg).map_err(|e| e.to_string())?;
    let slices = alpha_slices(&grid).map_err(|e| e.to_string())?;
    let mut xs: Vec<f64> = slices.iter().flat_map(|p| p.rows().into_iter().map(|r| r.0)).collect();
    xs.sort_by(f64::total_cmp);
    for p in &slices {
        if p.rows().iter().any(|&(_, lo, up)| lo > up) {
            return Err(format!("{}: f_low > f_up", p.label));
        }
    }
    for w in slices.windows(2) {
        for &x in &xs {
            if w[1].f_up.eval(x) > w[0].f_up.eval(x) || w[1].f_low.eval(x) < w[0].f_low.eval(x) {
                return Err(format!("{} not inside {} at x={x}", w[1].label, w[0].label));
            }
        }
    }
    checks.push("pbox ordering+narrowing");

    // probability: marginals and target Spearman
    let dists = [
        ProbabilityDist::lognormal(0.0, 1.0).unwrap(),
        ProbabilityDist::uniform(-1.0, 1.0).unwrap(),
        ProbabilityDist::triangular(0.0, 1.0, 5.0).unwrap(),
    ];
    let target = vec![vec![1.0, 0.7, -0.4], vec![0.7, 1.0, 0.0], vec![-0.4, 0.0, 1.0]];
    let streams = Streams::new(404);
    let columns: Vec<Vec<f64>> = dists
        .iter()
        .enumerate()
        .map(|(i, d)| sample(d, &mut streams.parameter(&format!("p{i}")), AC6_SPEARMAN_N).unwrap())
        .collect();
    let spec = RankCorrelationSpec::new(target.clone()).unwrap();
    let out = induce_rank_correlation(&columns, &spec, &mut streams.correlation()).map_err(|e| e.to_string())?;
    for i in 0..3 {
        let (mut a, mut b) = (columns[i].clone(), out[i].clone());
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        if a != b {
            return Err(format!("column {i} marginal changed"));
        }
        for j in 0..i {
            let rho = spearman(&out[i], &out[j]);
            if (rho - target[i][j]).abs() > AC6_SPEARMAN_TOLERANCE {
                return Err(format!("spearman({i},{j})={rho:.3} target {}", target[i][j]));
            }
        }
    }
    let pair = RankCorrelationSpec::new(vec![vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap();
    let out = induce_rank_correlation(&columns[..2], &pair, &mut streams.correlation()).unwrap();
    let rho = spearman(&out[0], &out[1]);
    if (rho - 0.9).abs() > AC6_SPEARMAN_TOLERANCE {
        return Err(format!("spearman={rho:.3} target 0.9"));
    }
    checks.push("marginals+spearman");

    // full pipeline determinism, sequential and parallel
    let cfg = StudyConfig::from_json(&std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/configs/correlated_dose.json"
    ))
    .unwrap())
    .unwrap();
    let p = plan(&cfg).unwrap();
    let a = propagate(&p, &cfg).map_err(|e| e.to_string())?;
    let b = propagate(&plan(&cfg).unwrap(), &cfg).map_err(|e| e.to_string())?;
    let c = propagate_with(&p, &cfg, &ModelEvaluator::for_config(&cfg), ExecMode::Sequential).unwrap();
    let key = |s: &rafu::FuzzySample| -> Vec<(usize, u64, Option<(u64, u64)>)> {
        s.records
            .iter()
            .map(|r| {
                let iv = match r.outcome {
                    Outcome::Ok(iv) => Some((iv.lo.to_bits(), iv.hi.to_bits())),
                    Outcome::Failed(_) => None,
                };
                (r.sample_index, r.alpha.to_bits(), iv)
            })
            .collect()
    };
    if key(&a) != key(&b) || key(&a) != key(&c) {
        return Err("pipeline is not deterministic".into());
    }
    let _ = pbox_at_alpha(&a, 0.0).map_err(|e| e.to_string())?;
    checks.push("determinism");

    Ok(checks.join(", "))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome_); 6] = [
        ("AC1", "Wilks sizing (0.95, fixed(0), 0.99) -> 90", ac1),
        ("AC2", "budgets 2100 / 100 / 200 by plan and counter", ac2),
        ("AC3", "dual double pair == grid(21) alpha 0/1 slices", ac3),
        ("AC4", "random-alpha mean p-box vs grid(101) average", ac4),
        ("AC5", "Wilks coverage simulation", ac5),
        ("AC6", "structural property suites", ac6),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {detail}");
            }
        }
    }
    println!("[N/A ] AC7 no further quantitative results to reproduce");
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
