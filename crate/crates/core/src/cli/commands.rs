use std::fmt::Write as _;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::format::fmt_g;
use super::settings::{KappaChoice, Settings};
use super::{emit, metadata, CliError};
use crate::channel::PresetKind;
use crate::closedform::{
    betas, kappa_opt, qfi as closed_qfi, qfi_frequency, qfi_separable, ProbeConfig,
};
use crate::optimize::{
    block_strategy, compare_separable, optimize_n, partial_vs_maximal_entanglement, DEFAULT_N_MAX,
};
use crate::oracle::{qfi_bruteforce, relative_deviation, DerivativeMode, TrialConfig, MAX_QUBITS};

/// Largest relative deviation `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_VERIFY_N_MAX: usize = 8;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BUDGET: usize = 1000;

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn preset_name(s: &Settings) -> String {
    s.preset.unwrap_or(PresetKind::Custom).to_string()
}

pub fn qfi(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let noise = s.noise()?;
    let n = s.n.ok_or_else(|| CliError::Usage("qfi needs --n".into()))?;
    let n_active = s.n_active.unwrap_or(n);
    let kappa = match s.kappa.unwrap_or(KappaChoice::Value(0.5)) {
        KappaChoice::Value(k) => k,
        KappaChoice::Opt => kappa_opt(&noise, n, n_active)?,
    };
    let probe = ProbeConfig::new(n, n_active, kappa)?;
    let r = closed_qfi(&noise, &probe);
    let b = betas(&noise, &probe);

    let mut header =
        String::from("preset,mu,mu1,mu2,omega_t,n,n_active,kappa,qfi,qfi_separable,beta0,beta1");
    let mut row = [
        preset_name(s),
        fmt_g(noise.mu()),
        fmt_g(noise.mu1()),
        fmt_g(noise.mu2()),
        fmt_g(noise.omega_t()),
        n.to_string(),
        n_active.to_string(),
        fmt_g(kappa),
        fmt_g(r.value),
        fmt_g(qfi_separable(&noise, n_active)),
        fmt_g(b.beta0),
        fmt_g(b.beta1),
    ]
    .join(",");
    if let Some(t) = s.time {
        header.push_str(",time,qfi_frequency");
        write!(
            row,
            ",{},{}",
            fmt_g(t),
            fmt_g(qfi_frequency(&noise, &probe, t)?)
        )
        .expect("string write");
    }
    emit(s, &format!("{header}\n{row}\n"), stdout)
}

pub fn optimize(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let noise = s.noise()?;
    let n_max = s.n_max.unwrap_or(DEFAULT_N_MAX);
    let inactive = s.inactive.unwrap_or(false);
    let kappa = s.kappa.unwrap_or(KappaChoice::Opt);
    let budget = s.budget.unwrap_or(DEFAULT_BUDGET);
    let best = optimize_n(&noise, kappa.policy(), n_max, inactive)?;
    let comparison = compare_separable(&noise, &best).ok();
    let gain = partial_vs_maximal_entanglement(&noise, n_max)?;
    let blocks = block_strategy(&noise, budget, n_max)?;

    let nan = f64::NAN;
    let fields: Vec<(&str, String)> = vec![
        ("preset", preset_name(s)),
        ("mu", fmt_g(noise.mu())),
        ("mu1", fmt_g(noise.mu1())),
        ("mu2", fmt_g(noise.mu2())),
        ("omega_t", fmt_g(noise.omega_t())),
        ("kappa_policy", kappa.to_string()),
        ("inactive", inactive.to_string()),
        ("n_max", n_max.to_string()),
        ("n_opt", best.n_opt.to_string()),
        ("n_total", best.n_total.to_string()),
        ("kappa_opt", fmt_g(best.kappa_opt)),
        ("fq_max", fmt_g(best.fq_max)),
        ("log_fq_max", fmt_g(best.log_fq_max)),
        (
            "ratio_vs_separable",
            fmt_g(best.ratio_vs_separable.unwrap_or(nan)),
        ),
        ("fq_per_qubit", fmt_g(best.fq_per_qubit)),
        (
            "per_qubit_separable",
            fmt_g(comparison.map_or(nan, |c| c.per_qubit_separable)),
        ),
        ("fq_over_n_sq", fmt_g(best.fq_over_n_sq)),
        ("partial_vs_maximal", fmt_g(gain)),
        ("cap_reached", best.cap_reached.to_string()),
        ("budget", budget.to_string()),
        ("block_size", blocks.block_size.to_string()),
        ("n_blocks", blocks.n_blocks.to_string()),
        ("leftover", blocks.leftover.to_string()),
        ("block_total_qfi", fmt_g(blocks.total_qfi)),
        (
            "block_vs_separable",
            fmt_g(blocks.vs_separable_ratio.unwrap_or(nan)),
        ),
    ];

    let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut table = String::new();
    for (k, v) in &fields {
        writeln!(table, "{k:<width$}  {v}").expect("string write");
    }
    if best.cap_reached {
        writeln!(
            table,
            "warning: the maximum sits at n_max = {n_max}; the optimum may lie beyond the scan"
        )
        .expect("string write");
    }
    stdout.write_all(table.as_bytes()).map_err(io)?;

    if let Some(path) = &s.out {
        let mut csv = metadata("optimize", s);
        let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let values: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
        writeln!(csv, "{}\n{}", keys.join(","), values.join(",")).expect("string write");
        std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

struct TrialOutcome {
    oracle: f64,
    closed: f64,
    deviation: f64,
    excluded_pairs: usize,
}

pub fn verify(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
    let n_max = s.n_max.unwrap_or(DEFAULT_VERIFY_N_MAX);
    let seed = s.seed.unwrap_or(DEFAULT_SEED);
    let inactive = s.inactive.unwrap_or(false);
    if n_max > MAX_QUBITS {
        return Err(CliError::Usage(format!(
            "--n-max {n_max} exceeds the oracle cap of {MAX_QUBITS} qubits"
        )));
    }
    if n_max == 0 || trials == 0 {
        return Err(CliError::Usage(
            "--n-max and --trials must be at least 1".into(),
        ));
    }

    // Configurations are drawn sequentially so the stream depends on the seed only.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = (0..trials)
        .map(|_| TrialConfig::sample(&mut rng, n_max, inactive))
        .collect::<crate::Result<Vec<_>>>()?;
    let outcomes = configs
        .par_iter()
        .map(|t| {
            let o = qfi_bruteforce(&t.noise, &t.probe, &t.axis, t.xi, DerivativeMode::Analytic)?;
            let closed = closed_qfi(&t.noise, &t.probe).value;
            Ok(TrialOutcome {
                oracle: o.value,
                closed,
                deviation: relative_deviation(o.value, closed),
                excluded_pairs: o.excluded_pairs,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let (worst, worst_dev) = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| (i, o.deviation))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let passed = worst_dev < VERIFY_TOLERANCE;
    let t = &configs[worst];

    let mut report = String::new();
    writeln!(
        report,
        "trials {trials}, n_max {n_max}, inactive {inactive}, seed {seed} (ChaCha8)"
    )
    .expect("string write");
    writeln!(
        report,
        "max relative deviation {} at trial {worst}",
        fmt_g(worst_dev)
    )
    .expect("string write");
    writeln!(
        report,
        "  noise mu={} mu1={} mu2={} omega_t={}; n={} n_active={} kappa={}",
        fmt_g(t.noise.mu()),
        fmt_g(t.noise.mu1()),
        fmt_g(t.noise.mu2()),
        fmt_g(t.noise.omega_t()),
        t.probe.n_total(),
        t.probe.n_active(),
        fmt_g(t.probe.kappa()),
    )
    .expect("string write");
    writeln!(
        report,
        "excluded eigenvalue pairs {}",
        outcomes.iter().map(|o| o.excluded_pairs).sum::<usize>()
    )
    .expect("string write");
    writeln!(
        report,
        "{} (tolerance {})",
        if passed { "PASS" } else { "FAIL" },
        fmt_g(VERIFY_TOLERANCE)
    )
    .expect("string write");
    stdout.write_all(report.as_bytes()).map_err(io)?;

    if let Some(path) = &s.out {
        let mut csv = metadata(
            "verify",
            &Settings {
                seed: Some(seed),
                ..s.clone()
            },
        );
        csv.push_str(
            "trial,mu,mu1,mu2,omega_t,n,n_active,kappa,theta,phi,xi,oracle,closed_form,relative_deviation,excluded_pairs\n",
        );
        for (i, (t, o)) in configs.iter().zip(&outcomes).enumerate() {
            writeln!(
                csv,
                "{i},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_g(t.noise.mu()),
                fmt_g(t.noise.mu1()),
                fmt_g(t.noise.mu2()),
                fmt_g(t.noise.omega_t()),
                t.probe.n_total(),
                t.probe.n_active(),
                fmt_g(t.probe.kappa()),
                fmt_g(t.axis.theta()),
                fmt_g(t.axis.phi()),
                fmt_g(t.xi),
                fmt_g(o.oracle),
                fmt_g(o.closed),
                fmt_g(o.deviation),
                o.excluded_pairs,
            )
            .expect("string write");
        }
        std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }

    if passed {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(format!(
            "max relative deviation {} exceeds {}",
            fmt_g(worst_dev),
            fmt_g(VERIFY_TOLERANCE)
        )))
    }
}
