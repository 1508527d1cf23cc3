use std::time::Instant;

use anyhow::{Context, Result};
use que_core::matexp::OracleKind;
use que_core::outlier::{
    apply_whitening, baseline_l2, baseline_spectral, fit_whitening, que_scores, rocauc,
    ExponentScale, LabeledScores, QueConfig, QueMode, TieRule, WhitenPower, WhiteningKind,
};
use que_core::record::RunRecord;
use que_core::robust::{estimate_mean_pipeline, EstimatorConfig, Mode};
use que_core::synth::{gen_eps_corrupted, gen_synthetic, Adversary, CorruptionSpec};
use que_core::Dataset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::io::{self, usage};
use crate::{
    AdversaryArg, BenchArgs, EstimateArgs, EvalArgs, ExponentArg, FormatArg, GenArgs, MethodArg,
    ModeArg, OracleArg, PowerArg, ScoreArgs, TiesArg,
};

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::BoundedCov => Mode::BoundedCov,
            ModeArg::Subgaussian => Mode::Subgaussian,
        }
    }
}

impl From<OracleArg> for OracleKind {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Exact => OracleKind::Exact,
            OracleArg::Sketched => OracleKind::Sketched,
        }
    }
}

impl From<AdversaryArg> for Adversary {
    fn from(a: AdversaryArg) -> Self {
        match a {
            AdversaryArg::DirectionalMixture => Adversary::DirectionalMixture,
            AdversaryArg::ReplaceRemove => Adversary::ReplaceRemove,
            AdversaryArg::NormInflation => Adversary::NormInflation,
            AdversaryArg::MultiDirection => Adversary::MultiDirection,
        }
    }
}

pub fn gen(a: GenArgs) -> Result<()> {
    if a.d == 0 || a.n == 0 {
        return usage("--d and --n must be positive");
    }
    if !(0.0..0.5).contains(&a.eps) {
        return usage(format!("--eps {} must lie in [0, 0.5)", a.eps));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let adversary = Adversary::from(a.adversary);
    let synthetic = match adversary {
        Adversary::DirectionalMixture => {
            let spec = CorruptionSpec {
                magnitude: a.magnitude,
                sigma: a.sigma,
                ..CorruptionSpec::mixture(a.eps, a.k)
            };
            if let Err(e) = spec.validate(a.d) {
                return usage(e.to_string());
            }
            gen_synthetic(a.d, a.n, &spec, &mut rng)?
        }
        _ => gen_eps_corrupted(a.d, a.n, a.eps, adversary, a.k, &mut rng)?,
    };
    match &a.out {
        Some(path) => synthetic
            .data
            .save(path)
            .with_context(|| format!("writing {}", path.display()))?,
        None => synthetic.data.write_csv(std::io::stdout())?,
    }
    if let Some(path) = &a.labels_out {
        io::write_output(Some(path), &io::labels_csv(&synthetic.labels))?;
    }
    if let Some(path) = &a.mean_out {
        io::write_output(Some(path), &io::row_csv(synthetic.mean.iter().copied()))?;
    }
    Ok(())
}

fn load(path: &std::path::Path, header: bool) -> Result<Dataset> {
    Dataset::load(path, header).with_context(|| format!("loading {}", path.display()))
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    if (a.json_out.is_some() || a.record_out.is_some()) && a.seed.is_none() {
        return usage("--seed is required with --json-out and --record-out");
    }
    let mut cfg = EstimatorConfig::new(a.eps, a.mode.into());
    cfg.delta = a.delta;
    cfg.oracle = a.oracle.into();
    cfg.seed = a.seed.unwrap_or(0);
    cfg.gamma1 = a.gamma1;
    cfg.gamma2 = a.gamma2;
    cfg.r = a.r;
    cfg.ell = a.ell;
    if let Err(e) = cfg.validate() {
        return usage(e.to_string());
    }
    let load_start = Instant::now();
    let data = load(&a.input, a.header)?;
    let load_secs = load_start.elapsed().as_secs_f64();
    let run_start = Instant::now();
    let out = estimate_mean_pipeline(&data, &cfg)?;
    let run_secs = run_start.elapsed().as_secs_f64();
    print!("mu_hat: {}", io::row_csv(out.mu_hat.iter().copied()));
    println!(
        "epochs: {} iterations: {} retained: {} mass_removed: {:.6}",
        out.trace.epochs.len(),
        out.trace.total_iterations(),
        out.retained_count(),
        out.trace.total_mass_removed()
    );
    if let Some(path) = &a.json_out {
        let body = serde_json::to_string_pretty(&out.summary())? + "\n";
        io::write_output(Some(path), &body)?;
    }
    if let Some(path) = &a.record_out {
        let filter_secs: f64 = out.trace.epochs.iter().map(|e| e.wall_time_secs).sum();
        let mut record = RunRecord::new(&cfg, cfg.seed)?
            .with_metric("epochs", out.trace.epochs.len() as f64)
            .with_metric("iterations", out.trace.total_iterations() as f64)
            .with_metric("retained", out.retained_count() as f64)
            .with_metric("mass_removed", out.trace.total_mass_removed())
            .with_timing("load", load_secs)
            .with_timing("pipeline", run_secs)
            .with_timing("filter", filter_secs);
        if let Some(mean_path) = &a.true_mean {
            let truth = load(mean_path, false)?;
            if truth.n() != 1 || truth.d() != out.mu_hat.len() {
                return usage(format!("--true-mean must hold one row of {} values", out.mu_hat.len()));
            }
            let err = (&out.mu_hat - truth.point(0)).norm();
            record = record.with_metric("error_norm", err);
        }
        io::write_output(Some(path), &(record.to_json()? + "\n"))?;
    }
    Ok(())
}

fn parse_whiten(spec: &str) -> Result<Option<WhiteningKind>> {
    match spec {
        "none" => Ok(None),
        "exact" => Ok(Some(WhiteningKind::Exact)),
        _ => match spec.strip_prefix("topk:").map(str::parse::<usize>) {
            Some(Ok(k)) if k >= 1 => Ok(Some(WhiteningKind::TopK(k))),
            _ => usage(format!("--whiten must be none, exact or topk:<k>, got {spec:?}")),
        },
    }
}

pub fn score(a: ScoreArgs) -> Result<()> {
    let whiten = parse_whiten(&a.whiten)?;
    if !(a.alpha >= 0.0 && a.alpha.is_finite()) {
        return usage(format!("--alpha {} must be finite and >= 0", a.alpha));
    }
    let mut data = load(&a.input, a.header)?;
    if let Some(kind) = whiten {
        let reference = match &a.whiten_ref {
            Some(p) => load(p, a.header)?,
            None => data.clone(),
        };
        let power = match a.whiten_power {
            PowerArg::InvSqrt => WhitenPower::InvSqrt,
            PowerArg::Inv => WhitenPower::Inv,
        };
        let w = fit_whitening(&reference, kind, a.ridge, power)?;
        data = apply_whitening(&w, &data)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let scores = match a.method {
        MethodArg::L2 => baseline_l2(&data)?,
        MethodArg::Spectral => baseline_spectral(&data, &mut rng)?,
        MethodArg::Que => {
            let cfg = QueConfig {
                scale: match a.exponent {
                    ExponentArg::Normalized => ExponentScale::SpectralNorm,
                    ExponentArg::Raw => ExponentScale::Raw,
                },
                r: None,
            };
            let mode = if a.approx { QueMode::Approx } else { QueMode::Exact };
            que_scores(&data, a.alpha, mode, &cfg, &mut rng)?
        }
    };
    let body = match a.format {
        FormatArg::Csv => io::scores_csv(&scores),
        FormatArg::Json => io::scores_json(&scores)?,
    };
    io::write_output(a.out.as_deref(), &body)
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let tau = io::read_scores(&a.scores)?;
    let labels = io::read_labels(&a.labels)?;
    let ties = match a.ties {
        TiesArg::Half => TieRule::Half,
        TiesArg::Geq => TieRule::Geq,
    };
    let auc = rocauc(&LabeledScores { tau, labels }, ties)?;
    println!("{auc}");
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<()> {
    if a.n_list.is_empty() || a.repeats == 0 || a.d == 0 {
        return usage("--n-list, --repeats and --d must be nonempty / positive");
    }
    let mut ns = a.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut cfg = EstimatorConfig::new(a.eps, a.mode.into());
    cfg.oracle = a.oracle.into();
    cfg.seed = a.seed;
    if let Err(e) = cfg.validate() {
        return usage(e.to_string());
    }
    println!("n,median_secs,min_secs,max_secs,repeats");
    for n in ns {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        rng.set_stream(n as u64);
        let data = gen_eps_corrupted(a.d, n, a.eps, Adversary::ReplaceRemove, 1, &mut rng)?.data;
        let mut times: Vec<f64> = Vec::with_capacity(a.repeats);
        for _ in 0..a.repeats {
            let start = Instant::now();
            estimate_mean_pipeline(&data, &cfg)?;
            times.push(start.elapsed().as_secs_f64());
        }
        times.sort_by(f64::total_cmp);
        let median = if times.len() % 2 == 1 {
            times[times.len() / 2]
        } else {
            0.5 * (times[times.len() / 2 - 1] + times[times.len() / 2])
        };
        println!(
            "{n},{median:.6},{:.6},{:.6},{}",
            times[0],
            times[times.len() - 1],
            a.repeats
        );
    }
    Ok(())
}
