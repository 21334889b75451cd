//! Closed-form quantum Fisher information of the probe
//! `√(1-κ)|0'>^{⊗N} + √κ|1'>^{⊗N}` when `N1 <= N` of its qubits undergo the
//! phase rotation and the noise:
//!
//! ```text
//! F = 4(1-κ)κ N1² μ2^{2 N1} / ((1-κ)β0 + κβ1)
//! β0 = [½(1+α0)]^{N1} + [½(1-α0)]^{N1} δ(N, N1)
//! β1 = [½(1+α1)]^{N1} + [½(1-α1)]^{N1} δ(N, N1)
//! ```
//!
//! Every power is taken in the log domain so that probes of 10⁶ qubits
//! evaluate without under- or overflow.

use std::f64::consts::LN_2;

use crate::channel::NoiseParams;
use crate::error::{Error, Result};
use crate::logmath::{exp_or_zero, ln_half_one_plus, ln_nonneg, ln_pow, log_add_exp};

/// Shape and entanglement of the probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    n_total: usize,
    n_active: usize,
    kappa: f64,
}

impl ProbeConfig {
    pub fn new(n_total: usize, n_active: usize, kappa: f64) -> Result<Self> {
        check_shape(n_total, n_active)?;
        check_kappa(kappa)?;
        Ok(Self {
            n_total,
            n_active,
            kappa,
        })
    }

    /// All `n` qubits active.
    pub fn full(n: usize, kappa: f64) -> Result<Self> {
        Self::new(n, n, kappa)
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_active(&self) -> usize {
        self.n_active
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.n_total, self.n_active, kappa)
    }

    pub fn is_full(&self) -> bool {
        self.n_total == self.n_active
    }
}

pub(crate) fn check_shape(n_total: usize, n_active: usize) -> Result<()> {
    if n_active == 0 || n_active > n_total {
        return Err(Error::Probe(format!(
            "need 1 <= n_active <= n_total, got n_active = {n_active}, n_total = {n_total}"
        )));
    }
    Ok(())
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if (0.0..=1.0).contains(&kappa) {
        Ok(())
    } else {
        Err(Error::Range {
            name: "kappa",
            value: kappa,
            min: 0.0,
            max: 1.0,
        })
    }
}

/// `β0`, `β1` and their logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPair {
    pub beta0: f64,
    pub beta1: f64,
    pub ln_beta0: f64,
    pub ln_beta1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiResult {
    pub value: f64,
    /// `ln value`; `-inf` when the value is zero.
    pub log_value: f64,
    pub betas: BetaPair,
}

fn ln_beta(alpha: f64, n_active: usize, both_terms: bool) -> f64 {
    let head = ln_pow(ln_half_one_plus(alpha), n_active);
    if both_terms {
        log_add_exp(head, ln_pow(ln_half_one_plus(-alpha), n_active))
    } else {
        head
    }
}

fn betas_for_shape(noise: &NoiseParams, n_total: usize, n_active: usize) -> BetaPair {
    let c = noise.coeffs();
    let full = n_total == n_active;
    let ln_beta0 = ln_beta(c.alpha0, n_active, full);
    let ln_beta1 = ln_beta(c.alpha1, n_active, full);
    BetaPair {
        beta0: exp_or_zero(ln_beta0),
        beta1: exp_or_zero(ln_beta1),
        ln_beta0,
        ln_beta1,
    }
}

pub fn betas(noise: &NoiseParams, probe: &ProbeConfig) -> BetaPair {
    betas_for_shape(noise, probe.n_total, probe.n_active)
}

/// Quantum Fisher information of the probe about the phase.
///
/// A vanishing numerator yields exactly zero whatever the denominator, so the
/// separable endpoints `κ ∈ {0, 1}` and `μ2 = 0` never produce `NaN`.
pub fn qfi(noise: &NoiseParams, probe: &ProbeConfig) -> QfiResult {
    let betas = betas(noise, probe);
    let kappa = probe.kappa;
    let n1 = probe.n_active;

    let ln_k = ln_nonneg(kappa);
    let ln_1mk = ln_nonneg(1.0 - kappa);
    let ln_num = 2.0 * LN_2
        + ln_k
        + ln_1mk
        + 2.0 * (n1 as f64).ln()
        + ln_pow(ln_nonneg(noise.mu2()), 2 * n1);
    if ln_num == f64::NEG_INFINITY {
        return QfiResult {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            betas,
        };
    }
    let ln_den = log_add_exp(ln_1mk + betas.ln_beta0, ln_k + betas.ln_beta1);
    let log_value = ln_num - ln_den;
    QfiResult {
        value: log_value.exp(),
        log_value,
        betas,
    }
}

/// `N μ2²`, reached by `N` independent qubits each prepared in `|+'>`.
pub fn qfi_separable(noise: &NoiseParams, n: usize) -> f64 {
    n as f64 * noise.mu2() * noise.mu2()
}

/// Large-`N` form of [`qfi`] for a fully active probe, valid for `μ0 >= 0`.
///
/// For `μ0 > 0` the `κβ1` term of the denominator becomes negligible and
/// `F -> 4κ N² (2μ2² / (1+μ1+μ0))^N`. For unital noise (`μ0 = 0`) the two
/// denominator terms stay equal and the prefactor keeps its `(1-κ)`:
/// `F -> 4(1-κ)κ N² (2μ2² / (1+μ1))^N`.
///
/// Callers holding `μ0 < 0` should use [`NoiseParams::mirrored`] with `1-κ`.
pub fn qfi_asymptotic(noise: &NoiseParams, kappa: f64, n: usize) -> Result<f64> {
    check_kappa(kappa)?;
    check_shape(n, n)?;
    let mu0 = noise.mu0();
    if mu0 < 0.0 {
        return Err(Error::Domain(format!(
            "asymptotic form needs mu0 >= 0 (got {mu0}); mirror mu and kappa first"
        )));
    }
    let ln_prefactor = if mu0 == 0.0 {
        2.0 * LN_2 + ln_nonneg(kappa) + ln_nonneg(1.0 - kappa)
    } else {
        2.0 * LN_2 + ln_nonneg(kappa)
    };
    let ln_ratio = LN_2 + 2.0 * ln_nonneg(noise.mu2()) - (1.0 + noise.mu1() + mu0).ln();
    let ln_value = ln_prefactor + 2.0 * (n as f64).ln() + ln_pow(ln_ratio, n);
    Ok(exp_or_zero(ln_value))
}

/// Real-valued maximiser of the asymptotic form over `N`,
/// `2 / ln((1+μ1+μ0) / (2μ2²))`. Meaningful when the result is large.
pub fn n_opt_analytic(noise: &NoiseParams) -> Result<f64> {
    let mu0 = noise.mu0();
    if mu0 < 0.0 {
        return Err(Error::Domain(format!(
            "analytic optimum needs mu0 >= 0 (got {mu0}); use the mirrored channel"
        )));
    }
    let num = 1.0 + noise.mu1() + mu0;
    let den = 2.0 * noise.mu2() * noise.mu2();
    if den >= num {
        return Err(Error::Domain(format!(
            "2 mu2^2 = {den} >= 1 + mu1 + mu0 = {num}: no finite optimum"
        )));
    }
    Ok(2.0 / (num.ln() - ln_nonneg(den)))
}

/// Schmidt coefficient maximising [`qfi`] at fixed shape,
/// `1 / (1 + sqrt(β1/β0))`.
pub fn kappa_opt(noise: &NoiseParams, n_total: usize, n_active: usize) -> Result<f64> {
    check_shape(n_total, n_active)?;
    let b = betas_for_shape(noise, n_total, n_active);
    Ok(kappa_from_betas(&b))
}

/// Largest double below 1.
const KAPPA_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

/// The exact optimum can sit closer to 0 or 1 than a double resolves; it is
/// clamped into the open interval so that `1-κ` and `κ` stay nonzero. At the
/// clamp the Fisher information matches the true maximum to rounding.
pub(crate) fn kappa_from_betas(b: &BetaPair) -> f64 {
    if b.ln_beta0 == b.ln_beta1 {
        return 0.5;
    }
    let half_diff = 0.5 * (b.ln_beta1 - b.ln_beta0);
    let kappa = if half_diff > 0.0 {
        let e = (-half_diff).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + half_diff.exp())
    };
    kappa.clamp(f64::MIN_POSITIVE, KAPPA_CEIL)
}

/// Fisher information about an angular frequency `ν` with `ξ = νT`.
pub fn qfi_frequency(
    noise: &NoiseParams,
    probe: &ProbeConfig,
    interaction_time: f64,
) -> Result<f64> {
    if !(interaction_time.is_finite() && interaction_time > 0.0) {
        return Err(Error::Range {
            name: "interaction_time",
            value: interaction_time,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Ok(interaction_time * interaction_time * qfi(noise, probe).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_noise, preset, Preset};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dep(a: f64) -> NoiseParams {
        preset(Preset::Depolarizing(a)).unwrap()
    }

    fn ad(m: f64) -> NoiseParams {
        preset(Preset::AmplitudeDamping(m)).unwrap()
    }

    /// Linear-domain evaluation of the fully active formula, straight from
    /// the definitions. Only usable for moderate `N`.
    fn direct_full(noise: &NoiseParams, n: usize, kappa: f64) -> f64 {
        let c = noise.coeffs();
        let ni = n as i32;
        let b0 = (0.5 * (1.0 + c.alpha0)).powi(ni) + (0.5 * (1.0 - c.alpha0)).powi(ni);
        let b1 = (0.5 * (1.0 + c.alpha1)).powi(ni) + (0.5 * (1.0 - c.alpha1)).powi(ni);
        let num = 4.0 * (1.0 - kappa) * kappa * (n * n) as f64 * noise.mu2().powi(2 * ni);
        if num == 0.0 {
            0.0
        } else {
            num / ((1.0 - kappa) * b0 + kappa * b1)
        }
    }

    #[test]
    fn probe_validation() {
        assert!(ProbeConfig::new(3, 0, 0.5).is_err());
        assert!(ProbeConfig::new(3, 4, 0.5).is_err());
        assert!(ProbeConfig::new(3, 3, 1.5).is_err());
        assert!(ProbeConfig::new(3, 3, f64::NAN).is_err());
        assert!(ProbeConfig::new(3, 2, 1.0).is_ok());
    }

    #[test]
    fn betas_noiseless() {
        let id = preset(Preset::Noiseless).unwrap();
        for n in [1, 2, 7, 50] {
            let b = betas(&id, &ProbeConfig::full(n, 0.3).unwrap());
            assert_eq!((b.beta0, b.beta1), (1.0, 1.0));
        }
    }

    #[test]
    fn betas_depolarizing() {
        for (a, n) in [(0.3, 1), (0.7, 4), (0.95, 9)] {
            let b = betas(&dep(a), &ProbeConfig::full(n, 0.5).unwrap());
            let expected =
                ((1.0 + a).powi(n as i32) + (1.0 - a).powi(n as i32)) / 2f64.powi(n as i32);
            assert_relative_eq!(b.beta0, expected, max_relative = 1e-14);
            assert_eq!(b.beta0, b.beta1);
        }
    }

    #[test]
    fn betas_amplitude_damping_with_inactive_qubit() {
        for m in [0.2, 0.6, 0.9] {
            let b = betas(&ad(m), &ProbeConfig::new(4, 3, 0.5).unwrap());
            assert_eq!(b.beta0, 1.0);
            let a1 = ad(m).coeffs().alpha1;
            assert_relative_eq!(b.beta1, (0.5 * (1.0 + a1)).powi(3), max_relative = 1e-14);
        }
    }

    #[test]
    fn qfi_noiseless() {
        let id = preset(Preset::Noiseless).unwrap();
        let r = qfi(&id, &ProbeConfig::full(3, 0.5).unwrap());
        assert_relative_eq!(r.value, 9.0, max_relative = 1e-15);
        for kappa in [0.1, 0.25, 0.8] {
            let r = qfi(&id, &ProbeConfig::full(5, kappa).unwrap());
            assert_relative_eq!(
                r.value,
                4.0 * (1.0 - kappa) * kappa * 25.0,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn qfi_depolarizing_two_qubits() {
        // κ = ½, N = 2: N²(2α²)^N / ((1+α)^N + (1-α)^N) = 8α⁴ / (1 + α²)
        for a in [0.1f64, 0.5, 0.8, 0.99] {
            let r = qfi(&dep(a), &ProbeConfig::full(2, 0.5).unwrap());
            assert_relative_eq!(
                r.value,
                8.0 * a.powi(4) / (1.0 + a * a),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn qfi_depolarizing_general_n() {
        for (a, n) in [(0.5f64, 3), (0.9, 10), (0.97, 40)] {
            let ni = n as i32;
            let expected =
                (n * n) as f64 * (2.0 * a * a).powi(ni) / ((1.0 + a).powi(ni) + (1.0 - a).powi(ni));
            let r = qfi(&dep(a), &ProbeConfig::full(n, 0.5).unwrap());
            assert_relative_eq!(r.value, expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn separable_endpoints_vanish() {
        for noise in [dep(0.7), ad(0.4), preset(Preset::Noiseless).unwrap()] {
            for n in [1, 4, 1000] {
                for kappa in [0.0, 1.0] {
                    let r = qfi(&noise, &ProbeConfig::full(n, kappa).unwrap());
                    assert_eq!(r.value, 0.0);
                    assert_eq!(r.log_value, f64::NEG_INFINITY);
                }
            }
        }
        let dead = make_noise(0.5, 0.3, 0.0, 0.0).unwrap();
        assert_eq!(qfi(&dead, &ProbeConfig::full(3, 0.5).unwrap()).value, 0.0);
    }

    #[test]
    fn zero_over_zero_is_zero() {
        // μ = -1, μ1 = 0: α0 = -1 so β0 = 0 for an inactive-qubit probe.
        let noise = make_noise(-1.0, 0.0, 0.0, 0.0).unwrap();
        let probe = ProbeConfig::new(3, 2, 0.0).unwrap();
        assert_eq!(betas(&noise, &probe).beta0, 0.0);
        assert_eq!(qfi(&noise, &probe).value, 0.0);
    }

    #[test]
    fn separable_baseline() {
        assert_relative_eq!(qfi_separable(&dep(0.5), 10), 2.5);
        assert_eq!(qfi_separable(&preset(Preset::Noiseless).unwrap(), 7), 7.0);
        assert_eq!(
            qfi_separable(&make_noise(0.0, 0.5, 0.0, 0.0).unwrap(), 7),
            0.0
        );
    }

    #[test]
    fn asymptotic_depolarizing() {
        for (a, n) in [(0.9f64, 10usize), (0.6, 3)] {
            let expected = (n * n) as f64 * (2.0 * a * a / (1.0 + a)).powi(n as i32);
            assert_relative_eq!(
                qfi_asymptotic(&dep(a), 0.5, n).unwrap(),
                expected,
                max_relative = 1e-13
            );
        }
        let exact = qfi(&dep(0.9), &ProbeConfig::full(200, 0.5).unwrap()).value;
        let asym = qfi_asymptotic(&dep(0.9), 0.5, 200).unwrap();
        assert!(((asym - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn asymptotic_nonunital_tracks_exact() {
        let noise = ad(0.8);
        let kappa = 0.7;
        let n = 400;
        let exact = qfi(&noise, &ProbeConfig::full(n, kappa).unwrap()).value;
        let asym = qfi_asymptotic(&noise, kappa, n).unwrap();
        assert!(((asym - exact) / exact).abs() < 1e-6);
        let m = noise.mu0();
        let expected = 4.0 * kappa * (n * n) as f64 * (2.0 * 0.8 / (1.8 + m)).powi(n as i32);
        assert_relative_eq!(asym, expected, max_relative = 1e-12);
    }

    #[test]
    fn asymptotic_domain() {
        assert_eq!(
            qfi_asymptotic(&make_noise(0.0, 0.5, 0.0, 0.0).unwrap(), 0.5, 7).unwrap(),
            0.0
        );
        let gad = preset(Preset::GeneralizedAmplitudeDamping { mu1: 0.5, mu: -0.3 }).unwrap();
        assert!(matches!(
            qfi_asymptotic(&gad, 0.5, 5),
            Err(Error::Domain(_))
        ));
        assert!(qfi_asymptotic(&gad.mirrored(), 0.5, 5).is_ok());
    }

    #[test]
    fn analytic_optimum() {
        for a in [0.8f64, 0.95, 0.999] {
            let expected = 2.0 / ((1.0 + a) / (2.0 * a * a)).ln();
            assert_relative_eq!(
                n_opt_analytic(&dep(a)).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
        assert!(matches!(
            n_opt_analytic(&preset(Preset::Noiseless).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn kappa_opt_examples() {
        assert_eq!(kappa_opt(&dep(0.4), 6, 6).unwrap(), 0.5);
        assert_eq!(
            kappa_opt(&preset(Preset::Noiseless).unwrap(), 3, 3).unwrap(),
            0.5
        );
        let k = kappa_opt(&ad(0.6), 5, 5).unwrap();
        assert!(k > 0.66 && k < 0.81, "{k}");
        // Hand evaluation: α0 = 1, α1 = 0.2, β0 = 1, β1 = 0.6⁵ + 0.4⁵
        let expected = 1.0 / (1.0 + (0.6f64.powi(5) + 0.4f64.powi(5)).sqrt());
        assert_relative_eq!(k, expected, max_relative = 1e-14);
        assert!(kappa_opt(&ad(0.6), 2, 3).is_err());
    }

    #[test]
    fn frequency_scaling() {
        let id = preset(Preset::Noiseless).unwrap();
        let probe = ProbeConfig::full(3, 0.5).unwrap();
        assert_eq!(
            qfi_frequency(&id, &probe, 1.0).unwrap(),
            qfi(&id, &probe).value
        );
        assert_relative_eq!(
            qfi_frequency(&id, &probe, 2.0).unwrap(),
            36.0,
            max_relative = 1e-15
        );
        let p2 = ProbeConfig::full(2, 0.5).unwrap();
        let expected = 0.25 * 8.0 * 0.8f64.powi(4) / 1.64;
        assert_relative_eq!(
            qfi_frequency(&dep(0.8), &p2, 0.5).unwrap(),
            expected,
            max_relative = 1e-14
        );
        assert!(qfi_frequency(&id, &probe, 0.0).is_err());
        assert!(qfi_frequency(&id, &probe, -1.0).is_err());
    }

    #[test]
    fn huge_probes_stay_finite() {
        let noise = ad(0.999);
        for n in [10_000usize, 1_000_000, 100_000_000] {
            let r = qfi(&noise, &ProbeConfig::full(n, 0.5).unwrap());
            assert!(r.log_value.is_finite());
            assert!(r.value >= 0.0);
        }
        let r = qfi(&noise, &ProbeConfig::full(1_000_000, 0.5).unwrap());
        assert!(r.log_value < -100.0);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn kappa_opt_near_the_edges_keeps_the_information() {
        // β1/β0 ~ e^-74: the exact optimum is within 1e-16 of 1
        let noise = make_noise(
            0.8230605767748326,
            0.25113503617095445,
            0.10027752976288666,
            0.0,
        )
        .unwrap();
        let k = kappa_opt(&noise, 70, 69).unwrap();
        assert!(k < 1.0);
        let b = betas(&noise, &ProbeConfig::new(70, 69, 0.5).unwrap());
        let f = qfi(&noise, &ProbeConfig::new(70, 69, k).unwrap());
        // 4 N² μ2^{2N} / (√β0 + √β1)² at the exact optimum
        let ln_best = 2.0 * LN_2 + 2.0 * 69f64.ln() + 138.0 * noise.mu2().ln()
            - 2.0 * log_add_exp(0.5 * b.ln_beta0, 0.5 * b.ln_beta1);
        assert!((f.log_value - ln_best).abs() < 1e-12);

        let k = kappa_opt(&noise.mirrored(), 70, 69).unwrap();
        assert!(k > 0.0);
        let f = qfi(&noise.mirrored(), &ProbeConfig::new(70, 69, k).unwrap());
        assert!((f.log_value - ln_best).abs() < 1e-12);
    }

    fn noise_strategy() -> impl Strategy<Value = NoiseParams> {
        (-1.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, -7.0f64..7.0)
            .prop_map(|(mu, mu1, t, w)| make_noise(mu, mu1, mu1.sqrt() * t, w).unwrap())
    }

    proptest! {
        #[test]
        fn full_probe_matches_direct_formula(
            mu in -1.0f64..=1.0, mu1 in 0.01f64..=1.0, t in 0.3f64..=1.0,
            n in 1usize..=12, kappa in 0.01f64..0.99,
        ) {
            let noise = make_noise(mu, mu1, mu1.sqrt() * t, 0.0).unwrap();
            let direct = direct_full(&noise, n, kappa);
            let got = qfi(&noise, &ProbeConfig::full(n, kappa).unwrap()).value;
            prop_assert!(((got - direct) / direct).abs() < 1e-14, "{got} vs {direct}");
        }

        #[test]
        fn plateau_beyond_one_inactive_qubit(
            noise in noise_strategy(), n1 in 1usize..40, kappa in 0.0f64..=1.0, extra in 1usize..10,
        ) {
            let a = qfi(&noise, &ProbeConfig::new(n1 + 1, n1, kappa).unwrap()).value;
            let b = qfi(&noise, &ProbeConfig::new(n1 + 1 + extra, n1, kappa).unwrap()).value;
            prop_assert_eq!(a, b);
        }

        #[test]
        fn mirror_symmetry(noise in noise_strategy(), n in 1usize..60, n_inactive in 0usize..2, k in 0u32..=1024) {
            // dyadic κ so that 1 - (1 - κ) == κ
            let kappa = f64::from(k) / 1024.0;
            let probe = ProbeConfig::new(n + n_inactive, n, kappa).unwrap();
            let mirrored = ProbeConfig::new(n + n_inactive, n, 1.0 - kappa).unwrap();
            let a = qfi(&noise, &probe).value;
            let b = qfi(&noise.mirrored(), &mirrored).value;
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
            let k = kappa_opt(&noise, n + n_inactive, n).unwrap();
            let km = kappa_opt(&noise.mirrored(), n + n_inactive, n).unwrap();
            prop_assert!((k - (1.0 - km)).abs() < 1e-14);
        }

        #[test]
        fn kappa_opt_is_a_maximiser(noise in noise_strategy(), n in 1usize..80, inactive in proptest::bool::ANY) {
            let n_total = if inactive { n + 1 } else { n };
            let k = kappa_opt(&noise, n_total, n).unwrap();
            let at = |kappa: f64| qfi(&noise, &ProbeConfig::new(n_total, n, kappa.clamp(0.0, 1.0)).unwrap()).log_value;
            let best = at(k);
            prop_assert!(best >= at(k + 0.01) - 1e-12);
            prop_assert!(best >= at(k - 0.01) - 1e-12);
        }

        #[test]
        fn independent_of_coherent_rotation(noise in noise_strategy(), w in -20.0f64..20.0, n in 1usize..30, kappa in 0.0f64..=1.0) {
            let probe = ProbeConfig::full(n, kappa).unwrap();
            prop_assert_eq!(qfi(&noise, &probe), qfi(&noise.with_omega_t(w), &probe));
        }

        #[test]
        fn value_is_nonnegative(noise in noise_strategy(), n in 1usize..5000, kappa in 0.0f64..=1.0) {
            let r = qfi(&noise, &ProbeConfig::full(n, kappa).unwrap());
            prop_assert!(r.value >= 0.0);
            prop_assert!(!r.log_value.is_nan());
            for ln_b in [r.betas.ln_beta0, r.betas.ln_beta1] {
                prop_assert!(ln_b > f64::NEG_INFINITY && ln_b <= LN_2 + 1e-15);
            }
        }
    }
}
