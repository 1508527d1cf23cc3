//! End-to-end acceptance suite. Runs every criterion in sequence (timings
//! stay meaningful), prints one PASS/FAIL line each and exits non-zero if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use que_core::filter::{decayed_sum, one_d_filter};
use que_core::matexp::{
    build_sketched_oracle, exact_density, exact_scores, sketched_scores, taylor_degree_for,
    taylor_exp_block, OracleKind, QForm, SketchParams, WeightHistory,
};
use que_core::moments::dense_weighted_cov;
use que_core::outlier::{
    argsort, baseline_l2, baseline_spectral, que_scores, rocauc, spearman, ExponentScale,
    LabeledScores, QueConfig, QueMode, TieRule,
};
use que_core::robust::{
    estimate_mean_pipeline, que_score_filter, EstimatorConfig, Mode, PipelineResult,
};
use que_core::synth::{gen_eps_corrupted, gen_synthetic, Adversary, CorruptionSpec};
use que_core::{Dataset, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Criterion 1.
const C1_D: usize = 64;
const C1_N: usize = 500;
const C1_SEEDS: u64 = 20;
const C1_MAX_HISTORY: usize = 5;
const C1_TAU_REL: f64 = 0.1;
const C1_TAU_FRACTION: f64 = 0.99;
const C1_Q_REL: f64 = 0.1;
const C1_Q_ABS: f64 = 0.05;
const C1_BUDGET: Duration = Duration::from_secs(30);

// Criterion 2.
const C2_INSTANCES: usize = 1000;
const C2_B: f64 = 0.25;
const C2_BUDGET: Duration = Duration::from_secs(5);

// Criteria 3 and 5.
const C3_D: usize = 32;
const C3_N: usize = 20_000;
const C3_EPS: f64 = 0.1;
const C3_SEEDS: u64 = 10;
const C3_ERROR_FACTOR: f64 = 5.0;
const C3_RAW_FRACTION: f64 = 1.0 / 3.0;
const C3_BUDGET: Duration = Duration::from_secs(120);
const C5_THRESHOLD_FACTOR: f64 = 110.0;
const C5_CONTRACTION: f64 = 0.75;

// Criterion 4.
const C4_D: usize = 16;
const C4_N: usize = 50_000;
const C4_EPS: f64 = 0.05;
const C4_SEEDS: u64 = 10;
const C4_CONSTANT: f64 = 4.0;
const C4_BUDGET: Duration = Duration::from_secs(180);

// Criterion 6.
const C6_D: usize = 64;
const C6_EPS: f64 = 0.1;
const C6_NS: [usize; 3] = [10_000, 20_000, 40_000];
const C6_REPEATS: usize = 5;
const C6_MAX_RATIO: f64 = 2.8;
const C6_BUDGET: Duration = Duration::from_secs(300);

// Criterion 7.
const C7_D: usize = 128;
const C7_N: usize = 2000;
const C7_EPS: f64 = 0.2;
const C7_KS: [usize; 3] = [3, 6, 10];
const C7_ALPHA: f64 = 4.0;
const C7_TRIALS: u64 = 20;
const C7_BUDGET: Duration = Duration::from_secs(120);

// Criterion 8.
const C8_HUGE_ALPHA: f64 = 1e6;
const C8_MIN_SPEARMAN: f64 = 0.99;
const C8_MIN_GAP: f64 = 4.0;

// Criterion 9.
const C9_CASES: u32 = 256;

struct Outcome {
    pass: bool,
    detail: String,
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn top_eigenvalue(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.max()
}

/// History of 1D-filtered weights driven by exact scores, `α = 1/(1.1·‖M(w₀)‖)`.
fn mmw_history(data: &Dataset, len: usize) -> (WeightHistory, WeightVector) {
    let w0 = WeightVector::uniform(data.n());
    let lambda0 = top_eigenvalue(dense_weighted_cov(data, &w0).unwrap());
    let mut history = WeightHistory::new(1.0 / (1.1 * lambda0)).unwrap();
    let mut w = w0;
    for _ in 0..len {
        let report = exact_scores(data, &history, &w).unwrap();
        w = one_d_filter(&w, &report.tau, 0.25).unwrap().new_weights;
        history.push_with_norm_bound(data, w.clone(), lambda0).unwrap();
    }
    (history, w)
}

fn oracle_fidelity_trial(seed: u64, r: Option<usize>) -> (usize, bool, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = gen_eps_corrupted(C1_D, C1_N, 0.1, Adversary::ReplaceRemove, 1, &mut rng)
        .unwrap()
        .data;
    let len = 1 + (seed as usize % C1_MAX_HISTORY);
    let (history, w) = mmw_history(&data, len);
    let mut params = SketchParams::default_for(C1_N, C1_D, 0.1);
    if let Some(r) = r {
        params.r = r;
    }
    let exact = exact_scores(&data, &history, &w).unwrap();
    let oracle = build_sketched_oracle(&data, &history, &params, seed).unwrap();
    let approx = sketched_scores(&oracle, &data, &w, QForm::Weighted).unwrap();
    let within = exact
        .tau
        .iter()
        .zip(&approx.tau)
        .filter(|(t, s)| (*s - *t).abs() <= C1_TAU_REL * *t)
        .count();
    let mut m = dense_weighted_cov(&data, &w).unwrap();
    m -= DMatrix::identity(C1_D, C1_D);
    let m_norm = SymmetricEigen::new(m).eigenvalues.amax();
    let (q, qt) = (exact.q.unwrap(), approx.q.unwrap());
    let q_ok = (qt - q).abs() <= C1_Q_REL * q.abs() + C1_Q_ABS * m_norm;
    (within, q_ok, q, qt)
}

fn criterion_1() -> Outcome {
    let mut worst = 1.0f64;
    let mut q_failures = 0;
    for seed in 0..C1_SEEDS {
        let (within, q_ok, _, _) = oracle_fidelity_trial(seed, None);
        worst = worst.min(within as f64 / C1_N as f64);
        q_failures += usize::from(!q_ok);
    }
    let r = SketchParams::default_for(C1_N, C1_D, 0.1).r;
    // Informational: a genuine Gaussian sketch half the dimension wide.
    let narrow: Vec<f64> = (0..5)
        .map(|s| oracle_fidelity_trial(s, Some(C1_D / 2)).0 as f64 / C1_N as f64)
        .collect();
    Outcome {
        pass: worst >= C1_TAU_FRACTION && q_failures == 0,
        detail: format!(
            "default r = {r}: worst per-trial fraction within ±10% = {worst:.4}, q-bound failures = {q_failures}/{C1_SEEDS} \
             (info: r = {} gives median fraction {:.3})",
            C1_D / 2,
            median(&narrow)
        ),
    }
}

/// Instance with inlier share `η ≤ b/2` of `σ`.
fn labeled_instance(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, Vec<bool>) {
    let g = rng.random_range(1..150);
    let k = rng.random_range(1..50);
    let m = g + k;
    let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0) / m as f64).collect();
    let mut tau: Vec<f64> = (0..g).map(|_| rng.random_range(0.0..1.0)).collect();
    let bad_tau: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..40.0)).collect();
    let good_mass: f64 = w[..g].iter().zip(&tau).map(|(a, t)| a * t).sum();
    let bad_mass: f64 = w[g..].iter().zip(&bad_tau).map(|(a, t)| a * t).sum();
    let eta = rng.random_range(0.01..1.0) * C2_B / 2.0;
    let scale = good_mass * (1.0 - eta) / (eta * bad_mass);
    tau.extend(bad_tau.iter().map(|t| t * scale));
    let bad = (0..m).map(|i| i >= g).collect();
    (w, tau, bad)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut mass_ok, mut target_ok, mut minimal) = (0, 0, 0);
    for _ in 0..C2_INSTANCES {
        let (w, tau, bad) = labeled_instance(&mut rng);
        let wv = WeightVector::new(w.clone()).unwrap();
        let out = one_d_filter(&wv, &tau, C2_B).unwrap();
        let sigma: f64 = w.iter().zip(&tau).map(|(a, t)| a * t).sum();
        let removed = |want: bool| -> f64 {
            w.iter()
                .zip(out.new_weights.as_slice())
                .zip(&bad)
                .filter(|(_, b)| **b == want)
                .map(|((a, c), _)| a - c)
                .sum()
        };
        mass_ok += usize::from(removed(false) <= removed(true) + 1e-12);
        target_ok += usize::from(out.final_weighted_sum <= C2_B * sigma);
        let tau_max = tau.iter().copied().fold(0.0, f64::max);
        let t = out.steps_taken;
        let hits = decayed_sum(&w, &tau, tau_max, t) <= C2_B * sigma;
        let tight = t <= 1 || decayed_sum(&w, &tau, tau_max, t - 1) > C2_B * sigma;
        minimal += usize::from(t >= 1 && hits && tight);
    }
    Outcome {
        pass: mass_ok == C2_INSTANCES && target_ok == C2_INSTANCES && minimal == C2_INSTANCES,
        detail: format!(
            "mass accounting {mass_ok}/{C2_INSTANCES}, Σw'τ ≤ bσ {target_ok}/{C2_INSTANCES}, minimal t {minimal}/{C2_INSTANCES}"
        ),
    }
}

struct BoundedRuns {
    results: Vec<(OracleKind, Vec<PipelineResult>, Vec<f64>)>,
    raw: Vec<f64>,
    elapsed: Duration,
}

fn c3_data(seed: u64) -> (Dataset, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
    let syn = gen_eps_corrupted(C3_D, C3_N, C3_EPS, Adversary::ReplaceRemove, 1, &mut rng).unwrap();
    (syn.data, syn.mean)
}

fn run_bounded(cfg_for: impl Fn(OracleKind, u64) -> EstimatorConfig) -> BoundedRuns {
    let start = Instant::now();
    let mut raw = Vec::new();
    let mut results = Vec::new();
    for oracle in [OracleKind::Exact, OracleKind::Sketched] {
        let mut runs = Vec::new();
        let mut errors = Vec::new();
        for seed in 0..C3_SEEDS {
            let (data, mean) = c3_data(seed);
            if oracle == OracleKind::Exact {
                raw.push((data.mean() - &mean).norm());
            }
            let out = estimate_mean_pipeline(&data, &cfg_for(oracle, seed)).unwrap();
            errors.push((&out.mu_hat - &mean).norm());
            runs.push(out);
        }
        results.push((oracle, runs, errors));
    }
    BoundedRuns {
        results,
        raw,
        elapsed: start.elapsed(),
    }
}

fn default_bounded(oracle: OracleKind, seed: u64) -> EstimatorConfig {
    let mut cfg = EstimatorConfig::new(C3_EPS, Mode::BoundedCov);
    cfg.oracle = oracle;
    cfg.seed = seed;
    cfg
}

fn criterion_3(runs: &BoundedRuns, tuned: &BoundedRuns) -> Outcome {
    let raw = median(&runs.raw);
    let bound = C3_ERROR_FACTOR * C3_EPS.sqrt();
    let mut pass = runs.elapsed <= C3_BUDGET;
    let mut parts = vec![format!("raw median {raw:.3}")];
    for (oracle, _, errors) in &runs.results {
        let med = median(errors);
        let ok_abs = med <= bound;
        let ok_rel = med <= C3_RAW_FRACTION * raw;
        pass &= ok_abs && ok_rel;
        parts.push(format!(
            "{oracle:?}: median {med:.3} (≤ {bound:.2}: {}, ≤ raw/3 = {:.3}: {})",
            yes(ok_abs),
            C3_RAW_FRACTION * raw,
            yes(ok_rel)
        ));
    }
    let tuned_meds: Vec<String> = tuned
        .results
        .iter()
        .map(|(o, _, e)| format!("{o:?} {:.3}", median(e)))
        .collect();
    parts.push(format!(
        "info: with γ₁ = 0.05, γ₂ = 0.011 medians are {}",
        tuned_meds.join(", ")
    ));
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Contraction over the epochs of `runs` whose start exceeds the threshold.
fn contraction(runs: &BoundedRuns) -> (usize, usize, f64) {
    let (mut qualifying, mut contracted, mut worst) = (0, 0, 0.0f64);
    for (_, results, _) in &runs.results {
        for out in results {
            let r = &out.resolved;
            let threshold = C5_THRESHOLD_FACTOR * r.gamma2.max(r.gamma1 * r.gamma1);
            for e in &out.trace.epochs {
                if e.lambda0 <= threshold {
                    continue;
                }
                qualifying += 1;
                if let Some(end) = e.lambda_end {
                    worst = worst.max(end / e.lambda0);
                    if end <= C5_CONTRACTION * e.lambda0 && e.iterations <= r.iter_cap {
                        contracted += 1;
                    }
                }
            }
        }
    }
    (qualifying, contracted, worst)
}

fn criterion_5(runs: &BoundedRuns, tuned: &BoundedRuns) -> Outcome {
    let (q, c, worst) = contraction(runs);
    let (tq, tc, tworst) = contraction(tuned);
    Outcome {
        pass: q == c && tq == tc,
        detail: format!(
            "default thresholds: {c}/{q} qualifying epochs contract{}; lowered thresholds: {tc}/{tq} contract (worst λ_end/λ₀ = {:.3})",
            if q == 0 { " (none reach 110·max(γ₂, γ₁²))" } else { "" },
            worst.max(tworst)
        ),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut errors = Vec::new();
    let mut raw = Vec::new();
    for seed in 0..C4_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let syn =
            gen_eps_corrupted(C4_D, C4_N, C4_EPS, Adversary::ReplaceRemove, 1, &mut rng).unwrap();
        let mut cfg = EstimatorConfig::new(C4_EPS, Mode::Subgaussian);
        cfg.seed = seed;
        let out = estimate_mean_pipeline(&syn.data, &cfg).unwrap();
        errors.push((out.mu_hat - &syn.mean).norm());
        raw.push((syn.data.mean() - &syn.mean).norm());
    }
    let elapsed = start.elapsed();
    let bound = C4_CONSTANT * C4_EPS * (1.0 / C4_EPS).ln().sqrt();
    let med = median(&errors);
    Outcome {
        pass: med <= bound && elapsed <= C4_BUDGET,
        detail: format!(
            "median error {med:.3} ≤ {bound:.3} (raw median {:.3}), {:.1} s",
            median(&raw),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let n_list = C6_NS.map(|n| n.to_string()).join(",");
    let out = Command::new(env!("CARGO_BIN_EXE_que"))
        .args([
            "bench",
            "--d",
            &C6_D.to_string(),
            "--n-list",
            &n_list,
            "--eps",
            &C6_EPS.to_string(),
            "--oracle",
            "sketched",
            "--repeats",
            &C6_REPEATS.to_string(),
            "--seed",
            "6",
        ])
        .output()
        .expect("failed to run que bench");
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Outcome {
            pass: false,
            detail: format!("bench failed: {}", String::from_utf8_lossy(&out.stderr)),
        };
    }
    let table = String::from_utf8(out.stdout).unwrap();
    let medians: Vec<f64> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let ratios: Vec<f64> = medians.windows(2).map(|p| p[1] / p[0]).collect();
    let ok = medians.len() == C6_NS.len() && ratios.iter().all(|r| *r <= C6_MAX_RATIO);
    Outcome {
        pass: ok && elapsed <= C6_BUDGET,
        detail: format!(
            "medians {:?} s, ratios per doubling {:?}, {:.1} s",
            medians.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let cfg = QueConfig {
        scale: ExponentScale::Raw,
        r: None,
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for k in C7_KS {
        let (mut que, mut spec, mut l2, mut diff) = (vec![], vec![], vec![], vec![]);
        for trial in 0..C7_TRIALS {
            let mut rng = ChaCha8Rng::seed_from_u64(7000 + 100 * k as u64 + trial);
            let syn = gen_synthetic(C7_D, C7_N, &CorruptionSpec::mixture(C7_EPS, k), &mut rng).unwrap();
            let auc = |tau: Vec<f64>| {
                rocauc(
                    &LabeledScores {
                        tau,
                        labels: syn.labels.clone(),
                    },
                    TieRule::Half,
                )
                .unwrap()
            };
            let q = auc(que_scores(&syn.data, C7_ALPHA, QueMode::Exact, &cfg, &mut rng).unwrap());
            let s = auc(baseline_spectral(&syn.data, &mut rng).unwrap());
            let l = auc(baseline_l2(&syn.data).unwrap());
            que.push(q);
            spec.push(s);
            l2.push(l);
            diff.push(q - s);
        }
        let (mq, _) = mean_sd(&que);
        let (ms, _) = mean_sd(&spec);
        let (ml, _) = mean_sd(&l2);
        let (md, sd) = mean_sd(&diff);
        let ok = md >= sd && mq >= ml;
        pass &= ok;
        parts.push(format!(
            "k={k}: QUE {mq:.3}, spectral {ms:.3}, ℓ₂ {ml:.3}, gap {md:.3} vs sd {sd:.3} [{}]",
            yes(ok)
        ));
    }
    let elapsed = start.elapsed();
    parts.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Outcome {
        pass: pass && elapsed <= C7_BUDGET,
        detail: parts.join("; "),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (n, d) = (400, 12);
    let data = Dataset::new(DMatrix::from_fn(n, d, |_, j| {
        let z: f64 = rng.sample(rand_distr_normal());
        z * if j == 0 { 3.0 } else { 1.0 }
    }))
    .unwrap();
    let cfg = QueConfig::default();
    let zero = que_scores(&data, 0.0, QueMode::Exact, &cfg, &mut rng).unwrap();
    let l2sq: Vec<f64> = baseline_l2(&data).unwrap().iter().map(|v| v * v).collect();
    let same = argsort(&zero) == argsort(&l2sq);

    let centered = data.centered_at(&data.mean()).unwrap().into_matrix();
    let eig = SymmetricEigen::new(centered.tr_mul(&centered) / n as f64);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let gap = ev[0] / ev[1];
    let huge = que_scores(&data, C8_HUGE_ALPHA, QueMode::Exact, &cfg, &mut rng).unwrap();
    let spec = baseline_spectral(&data, &mut rng).unwrap();
    let rho = spearman(&huge, &spec).unwrap();
    Outcome {
        pass: same && gap >= C8_MIN_GAP && rho >= C8_MIN_SPEARMAN,
        detail: format!(
            "α=0 argsort equals ℓ₂²: {}; gap ratio {gap:.2}, Spearman(α=1e6, spectral) = {rho:.5}",
            yes(same)
        ),
    }
}

fn rand_distr_normal() -> impl rand::distr::Distribution<f64> {
    // Box-Muller keeps this target free of an extra distribution dependency.
    struct Normal;
    impl rand::distr::Distribution<f64> for Normal {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }
    Normal
}

fn run_suite<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    let mut runner = TestRunner::new(PropConfig {
        cases: C9_CASES,
        failure_persistence: None,
        ..PropConfig::default()
    });
    runner
        .run(&strategy, test)
        .map(|_| C9_CASES)
        .map_err(|e| format!("{name}: {e}"))
}

fn criterion_9() -> Outcome {
    let mut results = Vec::new();

    results.push(run_suite(
        "psd ordering",
        (2usize..12, 1usize..6, any::<u64>()),
        |(n, d, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data =
                Dataset::new(DMatrix::from_fn(n, d, |_, _| rng.random_range(-4.0..4.0))).unwrap();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) / n as f64).collect();
            let w2: Vec<f64> = w.iter().map(|v| v * rng.random_range(0.0..1.0)).collect();
            let (a, b) = (WeightVector::new(w).unwrap(), WeightVector::new(w2).unwrap());
            prop_assume!(b.mass() > 1e-9);
            let diff = dense_weighted_cov(&data, &a).unwrap() * a.mass()
                - dense_weighted_cov(&data, &b).unwrap() * b.mass();
            prop_assert!(SymmetricEigen::new(diff).eigenvalues.min() >= -1e-8);
            Ok(())
        },
    ));

    results.push(run_suite(
        "trace-one density",
        (3usize..25, 1usize..8, 0usize..5, 0.0..3.0f64, any::<u64>()),
        |(n, d, len, alpha, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data =
                Dataset::new(DMatrix::from_fn(n, d, |_, _| rng.random_range(-3.0..3.0))).unwrap();
            let mut history = WeightHistory::new(alpha).unwrap();
            for _ in 0..len {
                let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) / n as f64).collect();
                history.push(&data, WeightVector::new(w).unwrap()).unwrap();
            }
            let u = exact_density(&data, &history).unwrap();
            prop_assert!((u.trace() - 1.0).abs() <= 1e-10);
            prop_assert!(SymmetricEigen::new(u).eigenvalues.min() >= -1e-15);
            Ok(())
        },
    ));

    results.push(run_suite(
        "taylor sandwich",
        (10usize..=20, 0.0..5.0f64, 1usize..8, any::<u64>()),
        |(base, norm, d, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
            let y = &g * g.transpose();
            let top = top_eigenvalue(y.clone()).max(1e-300);
            let y = y * (norm / top);
            let ell = taylor_degree_for(5.0, base).unwrap();
            let slack = (-(base as f64)).exp();
            let eig = SymmetricEigen::new(y.clone());
            let applied = taylor_exp_block(&y, 1.0, ell, &eig.eigenvectors);
            for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
                // P_ℓ(λ) read off the eigenbasis of the block evaluation.
                let p = applied.column(j).dot(&eig.eigenvectors.column(j));
                prop_assert!(p >= (1.0 - slack) * lambda.exp() - 1e-12);
                prop_assert!(p <= (1.0 + slack) * lambda.exp() + 1e-12);
            }
            Ok(())
        },
    ));

    results.push(run_suite(
        "weight monotonicity",
        (60usize..200, 2usize..6, any::<u64>()),
        |(n, d, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let syn = gen_eps_corrupted(d, n, 0.1, Adversary::ReplaceRemove, 1, &mut rng).unwrap();
            let data = syn.data.centered_at(&syn.data.mean()).unwrap();
            let mut cfg = EstimatorConfig::new(0.1, Mode::BoundedCov);
            cfg.gamma1 = Some(0.05);
            cfg.gamma2 = Some(0.005);
            cfg.seed = seed;
            cfg.record_filter_calls = true;
            let out = que_score_filter(&data, &cfg).unwrap();
            let cap = (1.0 / n as f64) * (1.0 + 1e-12);
            let mut prev = vec![1.0 / n as f64; n];
            for call in &out.trace.calls {
                prop_assert_eq!(&call.before, &prev);
                for (a, b) in call.after.iter().zip(&call.before) {
                    prop_assert!(a <= b && *b <= cap);
                }
                prev = call.after.clone();
            }
            prop_assert_eq!(out.weights.as_slice(), prev.as_slice());
            Ok(())
        },
    ));

    results.push(run_suite(
        "rocauc reversal",
        (2usize..60, any::<u64>()),
        |(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64).collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            labels[0] = true;
            labels[1] = false;
            let v = rocauc(&LabeledScores { tau: tau.clone(), labels: labels.clone() }, TieRule::Half)
                .unwrap();
            let neg: Vec<f64> = tau.iter().map(|t| -t).collect();
            let r = rocauc(&LabeledScores { tau: neg, labels }, TieRule::Half).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!((v + r - 1.0).abs() < 1e-12);
            Ok(())
        },
    ));

    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let cases: u32 = results.iter().filter_map(|r| r.as_ref().ok()).sum();
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} suites, {C9_CASES} cases each ({cases} total)", results.len())
        } else {
            failures.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ")
        },
    }
}

fn timed(id: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let pass = outcome.pass && budget.is_none_or(|b| elapsed <= b);
    println!(
        "{} criterion {id} ({name}): {} [{:.1} s]",
        if pass { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn main() -> ExitCode {
    // Let `cargo test -- <filter>` and `--list` behave sensibly for a custom harness.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    if let Some(filter) = args.iter().find(|a| !a.starts_with('-')) {
        if !"acceptance".contains(filter.as_str()) {
            return ExitCode::SUCCESS;
        }
    }

    let mut passes = Vec::new();
    passes.push(timed(1, "score-oracle fidelity", Some(C1_BUDGET), criterion_1));
    passes.push(timed(2, "1D filter theorem suite", Some(C2_BUDGET), criterion_2));

    let bounded = run_bounded(default_bounded);
    let tuned = run_bounded(|oracle, seed| {
        let mut cfg = default_bounded(oracle, seed);
        cfg.gamma1 = Some(0.05);
        cfg.gamma2 = Some(0.011);
        cfg
    });
    passes.push(timed(3, "bounded-covariance robust mean", None, || {
        let mut o = criterion_3(&bounded, &tuned);
        o.detail = format!("{} [runs {:.1} s]", o.detail, bounded.elapsed.as_secs_f64());
        o
    }));
    passes.push(timed(4, "sub-Gaussian robust mean", Some(C4_BUDGET), criterion_4));
    passes.push(timed(5, "epoch contraction", None, || criterion_5(&bounded, &tuned)));
    passes.push(timed(6, "near-linear scaling", Some(C6_BUDGET), criterion_6));
    passes.push(timed(7, "QUE beats baselines", Some(C7_BUDGET), criterion_7));
    passes.push(timed(8, "interpolation endpoints", None, criterion_8));
    passes.push(timed(9, "invariant suites", None, criterion_9));

    let failed = passes.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", passes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
