//! Optimal probe size and entanglement, comparisons against the separable
//! baseline, block grouping, and threshold location on one-parameter noise
//! families.

use rayon::prelude::*;

use crate::channel::{preset, NoiseParams, Preset};
use crate::closedform::{check_kappa, kappa_opt, qfi, qfi_separable, ProbeConfig};
use crate::error::{Error, Result};

/// Default upper end of the probe-size scan.
pub const DEFAULT_N_MAX: usize = 100_000;

/// Absolute tolerance of [`find_threshold`] on the noise parameter.
pub const THRESHOLD_TOLERANCE: f64 = 1e-4;

/// Cells of the coarse grid [`find_threshold`] scans before bisecting.
pub const THRESHOLD_GRID: usize = 400;

/// Margin above 1 for the ratio predicates, so that rounding in a ratio that
/// is exactly 1 (optimum at a single qubit) does not count as a gain.
pub const RATIO_MARGIN: f64 = 1e-9;

const SCAN_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaPolicy {
    Fixed(f64),
    /// `κ_opt` recomputed at every probe size.
    OptimalPerN,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalSetting {
    /// Optimal number of active qubits.
    pub n_opt: usize,
    /// Total probe size: `n_opt`, or `n_opt + 1` with an inactive qubit.
    pub n_total: usize,
    pub kappa_opt: f64,
    pub fq_max: f64,
    pub log_fq_max: f64,
    /// `fq_max / (n_opt μ2²)`; `None` when `μ2 = 0`.
    pub ratio_vs_separable: Option<f64>,
    pub fq_per_qubit: f64,
    pub fq_over_n_sq: f64,
    /// The maximum sits at the scan limit, so the true optimum may lie beyond.
    pub cap_reached: bool,
}

impl OptimalSetting {
    pub fn probe(&self) -> ProbeConfig {
        ProbeConfig::new(self.n_total, self.n_opt, self.kappa_opt)
            .expect("optimizer produced a valid probe")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub ratio: f64,
    pub per_qubit_entangled: f64,
    pub per_qubit_separable: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockReport {
    pub block_size: usize,
    pub n_blocks: usize,
    /// Qubits outside the blocks, prepared separably.
    pub leftover: usize,
    pub total_qfi: f64,
    /// `total_qfi / (total μ2²)`; `None` when `μ2 = 0`.
    pub vs_separable_ratio: Option<f64>,
}

struct Candidate {
    n_active: usize,
    kappa: f64,
    log_value: f64,
    value: f64,
}

fn evaluate(
    noise: &NoiseParams,
    policy: KappaPolicy,
    n_active: usize,
    inactive: bool,
) -> Candidate {
    let n_total = if inactive { n_active + 1 } else { n_active };
    let kappa = match policy {
        KappaPolicy::Fixed(k) => k,
        KappaPolicy::OptimalPerN => kappa_opt(noise, n_total, n_active).expect("valid shape"),
    };
    let probe = ProbeConfig::new(n_total, n_active, kappa).expect("valid probe");
    let r = qfi(noise, &probe);
    Candidate {
        n_active,
        kappa,
        log_value: r.log_value,
        value: r.value,
    }
}

/// Larger value wins, smaller probe on ties.
fn better(a: Candidate, b: Candidate) -> Candidate {
    if b.log_value > a.log_value || (b.log_value == a.log_value && b.n_active < a.n_active) {
        b
    } else {
        a
    }
}

/// Exhaustive scan of the number of active qubits over `1..=n_max`.
///
/// With `inactive`, every candidate carries one extra qubit that is entangled
/// but neither rotated nor exposed to noise.
pub fn optimize_n(
    noise: &NoiseParams,
    policy: KappaPolicy,
    n_max: usize,
    inactive: bool,
) -> Result<OptimalSetting> {
    if n_max == 0 {
        return Err(Error::Probe("n_max must be at least 1".into()));
    }
    if let KappaPolicy::Fixed(k) = policy {
        check_kappa(k)?;
    }
    let n_chunks = n_max.div_ceil(SCAN_CHUNK);
    let best = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SCAN_CHUNK + 1;
            let hi = ((c + 1) * SCAN_CHUNK).min(n_max);
            (lo..=hi)
                .map(|n| evaluate(noise, policy, n, inactive))
                .reduce(better)
                .expect("non-empty chunk")
        })
        .reduce_with(better)
        .expect("non-empty scan");

    let n = best.n_active as f64;
    let sep = qfi_separable(noise, best.n_active);
    Ok(OptimalSetting {
        n_opt: best.n_active,
        n_total: if inactive {
            best.n_active + 1
        } else {
            best.n_active
        },
        kappa_opt: best.kappa,
        fq_max: best.value,
        log_fq_max: best.log_value,
        ratio_vs_separable: (sep > 0.0).then(|| best.value / sep),
        fq_per_qubit: best.value / n,
        fq_over_n_sq: best.value / (n * n),
        cap_reached: best.n_active == n_max && n_max > 1,
    })
}

pub fn compare_separable(
    noise: &NoiseParams,
    setting: &OptimalSetting,
) -> Result<ComparisonReport> {
    let per_qubit_separable = noise.mu2() * noise.mu2();
    if per_qubit_separable == 0.0 {
        return Err(Error::Degenerate(
            "mu2 = 0: the separable baseline vanishes".into(),
        ));
    }
    Ok(ComparisonReport {
        ratio: setting.fq_max / (setting.n_opt as f64 * per_qubit_separable),
        per_qubit_entangled: setting.fq_per_qubit,
        per_qubit_separable,
    })
}

/// `F_max(κ_opt per N) / F_max(κ = ½)`, both maximised over `N <= n_max`.
/// Equals 1 when both maxima vanish.
pub fn partial_vs_maximal_entanglement(noise: &NoiseParams, n_max: usize) -> Result<f64> {
    let partial = optimize_n(noise, KappaPolicy::OptimalPerN, n_max, false)?;
    let maximal = optimize_n(noise, KappaPolicy::Fixed(0.5), n_max, false)?;
    if maximal.fq_max == 0.0 && partial.fq_max == 0.0 {
        return Ok(1.0);
    }
    Ok((partial.log_fq_max - maximal.log_fq_max).exp())
}

/// Splits `total_qubits` into independent blocks of the optimal size and
/// prepares the remainder separably. Fisher information adds over blocks.
pub fn block_strategy(
    noise: &NoiseParams,
    total_qubits: usize,
    n_max: usize,
) -> Result<BlockReport> {
    if total_qubits == 0 {
        return Err(Error::Probe("total_qubits must be at least 1".into()));
    }
    let best = optimize_n(noise, KappaPolicy::OptimalPerN, n_max, false)?;
    let block_size = best.n_opt;
    let n_blocks = total_qubits / block_size;
    let leftover = total_qubits - n_blocks * block_size;
    let per_qubit = noise.mu2() * noise.mu2();
    let total_qfi = n_blocks as f64 * best.fq_max + leftover as f64 * per_qubit;
    let baseline = total_qubits as f64 * per_qubit;
    let vs_separable_ratio = if baseline == 0.0 {
        None
    } else if n_blocks == 0 || block_size == 1 {
        Some(1.0)
    } else {
        Some(total_qfi / baseline)
    };
    Ok(BlockReport {
        block_size,
        n_blocks,
        leftover,
        total_qfi,
        vs_separable_ratio,
    })
}

/// One-parameter slices of the noise family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseFamily {
    /// Parameter `α`.
    Depolarizing,
    /// Parameter `μ2`.
    PhaseFlip,
    /// Parameter `μ1`.
    AmplitudeDamping,
    /// Parameter `μ1` at fixed bias `mu`.
    GeneralizedAmplitudeDamping { mu: f64 },
}

impl NoiseFamily {
    pub fn at(&self, param: f64) -> Result<NoiseParams> {
        preset(match *self {
            NoiseFamily::Depolarizing => Preset::Depolarizing(param),
            NoiseFamily::PhaseFlip => Preset::PhaseFlip(param),
            NoiseFamily::AmplitudeDamping => Preset::AmplitudeDamping(param),
            NoiseFamily::GeneralizedAmplitudeDamping { mu } => {
                Preset::GeneralizedAmplitudeDamping { mu1: param, mu }
            }
        })
    }
}

/// Properties whose switching points [`find_threshold`] locates. All use the
/// optimal Schmidt coefficient at each size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPredicate {
    /// The optimal probe has more than one qubit.
    NOptGt1,
    /// The optimal entangled probe beats the separable one by more than
    /// [`RATIO_MARGIN`].
    RatioGt1,
    /// With `n_total` qubits, leaving one of them inactive beats the fully
    /// active probe.
    InactiveBeatsFull { n_total: usize },
    /// With `n_total` qubits, the probe with one inactive qubit beats
    /// `n_total - 1` separable qubits.
    InactiveBeatsSeparable { n_total: usize },
}

impl ThresholdPredicate {
    pub fn eval(&self, noise: &NoiseParams) -> Result<bool> {
        match *self {
            ThresholdPredicate::NOptGt1 => {
                Ok(optimize_n(noise, KappaPolicy::OptimalPerN, DEFAULT_N_MAX, false)?.n_opt > 1)
            }
            ThresholdPredicate::RatioGt1 => {
                let best = optimize_n(noise, KappaPolicy::OptimalPerN, DEFAULT_N_MAX, false)?;
                Ok(best
                    .ratio_vs_separable
                    .is_some_and(|r| r > 1.0 + RATIO_MARGIN))
            }
            ThresholdPredicate::InactiveBeatsFull { n_total } => {
                let reduced = qfi_at_optimal_kappa(noise, n_total, n_total.saturating_sub(1))?;
                let full = qfi_at_optimal_kappa(noise, n_total, n_total)?;
                Ok(reduced > full)
            }
            ThresholdPredicate::InactiveBeatsSeparable { n_total } => {
                let n_active = n_total.saturating_sub(1);
                let reduced = qfi_at_optimal_kappa(noise, n_total, n_active)?;
                Ok(reduced > qfi_separable(noise, n_active))
            }
        }
    }
}

/// [`qfi`] at `κ_opt` for the given shape.
pub fn qfi_at_optimal_kappa(noise: &NoiseParams, n_total: usize, n_active: usize) -> Result<f64> {
    let kappa = kappa_opt(noise, n_total, n_active)?;
    Ok(qfi(noise, &ProbeConfig::new(n_total, n_active, kappa)?).value)
}

/// Parameter value at which `predicate` switches along `family` inside
/// `[lo, hi]`, to [`THRESHOLD_TOLERANCE`].
///
/// Several of these predicates switch back and forth a few times before
/// settling (the optimal size moves in integer steps), so a coarse grid is
/// scanned first and the uppermost switch is refined by bisection.
pub fn find_threshold(
    family: NoiseFamily,
    predicate: ThresholdPredicate,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!(
            "bracket [{lo}, {hi}] is not an interval"
        )));
    }
    let eval = |x: f64| -> Result<bool> { predicate.eval(&family.at(x)?) };
    let at_lo = eval(lo)?;
    let at_hi = eval(hi)?;
    if at_lo == at_hi {
        return Err(Error::Bracket {
            lo,
            hi,
            value: at_lo,
        });
    }

    let grid: Vec<f64> = (0..=THRESHOLD_GRID)
        .map(|i| {
            if i == THRESHOLD_GRID {
                hi
            } else {
                lo + (hi - lo) * i as f64 / THRESHOLD_GRID as f64
            }
        })
        .collect();
    let values = grid
        .par_iter()
        .map(|&x| eval(x))
        .collect::<Result<Vec<bool>>>()?;
    let cell = (0..THRESHOLD_GRID)
        .rev()
        .find(|&i| values[i] != values[i + 1])
        .expect("endpoints differ, so some cell switches");

    let (mut a, mut b) = (grid[cell], grid[cell + 1]);
    let value_at_a = values[cell];
    while b - a > THRESHOLD_TOLERANCE {
        let m = 0.5 * (a + b);
        if eval(m)? == value_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
