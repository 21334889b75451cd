//! C interface to `qfi-core`.
//!
//! Noise configurations live behind an opaque [`QfiNoise`] handle created by
//! [`qfi_noise_new`] or [`qfi_noise_preset`] and released with
//! [`qfi_noise_free`]. Every fallible call returns a [`QfiStatus`] and writes
//! its result through an out-pointer only on success; the message for the
//! most recent failure on the calling thread is available from
//! [`qfi_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qfi_core::closedform::{betas, kappa_opt, qfi, qfi_separable, ProbeConfig};
use qfi_core::optimize::{optimize_n, KappaPolicy};
use qfi_core::oracle::{qfi_bruteforce, Axis, DerivativeMode};
use qfi_core::{make_noise, preset, Error, NoiseParams, Preset};

/// Opaque noise handle.
pub struct QfiNoise(NoiseParams);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiStatus {
    Ok = 0,
    NullPointer = 1,
    Range = 2,
    CompletePositivity = 3,
    Domain = 4,
    Size = 5,
    Numerical = 6,
    Bracket = 7,
    Degenerate = 8,
    Probe = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiPresetKind {
    Noiseless = 0,
    /// `param` is the contraction factor α.
    Depolarizing = 1,
    /// `param` is μ2.
    PhaseFlip = 2,
    /// `param` is μ1.
    AmplitudeDamping = 3,
    /// `param` is μ1, `mu` the equilibrium bias.
    GeneralizedAmplitudeDamping = 4,
}

/// Noise parameters of a handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiNoiseParams {
    pub mu: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub omega_t: f64,
    pub mu0: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiValue {
    pub value: f64,
    /// Natural log of `value`; `-inf` when it vanishes.
    pub log_value: f64,
    pub beta0: f64,
    pub beta1: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiOptimum {
    pub n_opt: usize,
    pub n_total: usize,
    pub kappa_opt: f64,
    pub fq_max: f64,
    pub log_fq_max: f64,
    /// NaN when μ2 = 0.
    pub ratio_vs_separable: f64,
    pub fq_per_qubit: f64,
    pub fq_over_n_sq: f64,
    /// The maximum sits at `n_max`.
    pub cap_reached: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiOracleValue {
    pub value: f64,
    /// Eigenvalue pairs left out of the sum.
    pub excluded_pairs: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> QfiStatus {
    match e {
        Error::Range { .. } => QfiStatus::Range,
        Error::CompletePositivity { .. } => QfiStatus::CompletePositivity,
        Error::Domain(_) => QfiStatus::Domain,
        Error::Size { .. } => QfiStatus::Size,
        Error::Numerical(_) => QfiStatus::Numerical,
        Error::Bracket { .. } => QfiStatus::Bracket,
        Error::Degenerate(_) => QfiStatus::Degenerate,
        Error::Probe(_) => QfiStatus::Probe,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, stores its result in `out` and maps errors and panics to a status.
fn guarded<T>(out: *mut T, f: impl FnOnce() -> Result<T, Failure>) -> QfiStatus {
    if out.is_null() {
        set_last_error("output pointer is null");
        return QfiStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null above; the caller guarantees it is valid for writes.
            unsafe { out.write(v) };
            set_last_error("");
            QfiStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("{what} is null"));
            QfiStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {text}"));
            QfiStatus::Panic
        }
    }
}

/// # Safety
/// `noise` must be null or a live handle from this library.
unsafe fn noise_ref<'a>(noise: *const QfiNoise) -> Result<&'a NoiseParams, Failure> {
    // SAFETY: forwarded from the caller.
    unsafe { noise.as_ref() }
        .map(|n| &n.0)
        .ok_or(Failure::Null("noise handle"))
}

fn boxed(noise: NoiseParams) -> *mut QfiNoise {
    Box::into_raw(Box::new(QfiNoise(noise)))
}

/// Creates a noise handle from raw parameters.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_noise_new(
    mu: f64,
    mu1: f64,
    mu2: f64,
    omega_t: f64,
    out: *mut *mut QfiNoise,
) -> QfiStatus {
    guarded(out, || Ok(boxed(make_noise(mu, mu1, mu2, omega_t)?)))
}

/// Creates a noise handle for a named preset. `mu` is read only by the
/// generalized amplitude damping preset.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_noise_preset(
    kind: QfiPresetKind,
    param: f64,
    mu: f64,
    out: *mut *mut QfiNoise,
) -> QfiStatus {
    guarded(out, || {
        let p = match kind {
            QfiPresetKind::Noiseless => Preset::Noiseless,
            QfiPresetKind::Depolarizing => Preset::Depolarizing(param),
            QfiPresetKind::PhaseFlip => Preset::PhaseFlip(param),
            QfiPresetKind::AmplitudeDamping => Preset::AmplitudeDamping(param),
            QfiPresetKind::GeneralizedAmplitudeDamping => {
                Preset::GeneralizedAmplitudeDamping { mu1: param, mu }
            }
        };
        Ok(boxed(preset(p)?))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `noise` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qfi_noise_free(noise: *mut QfiNoise) {
    if !noise.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(noise) });
    }
}

/// # Safety
/// `noise` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_noise_params(
    noise: *const QfiNoise,
    out: *mut QfiNoiseParams,
) -> QfiStatus {
    guarded(out, || {
        // SAFETY: forwarded from the caller.
        let n = unsafe { noise_ref(noise) }?;
        Ok(QfiNoiseParams {
            mu: n.mu(),
            mu1: n.mu1(),
            mu2: n.mu2(),
            omega_t: n.omega_t(),
            mu0: n.mu0(),
        })
    })
}

/// Closed-form Fisher information of an `n_total`-qubit probe with
/// `n_active` exposed qubits and Schmidt coefficient `kappa`.
///
/// # Safety
/// `noise` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_compute(
    noise: *const QfiNoise,
    n_total: usize,
    n_active: usize,
    kappa: f64,
    out: *mut QfiValue,
) -> QfiStatus {
    guarded(out, || {
        // SAFETY: forwarded from the caller.
        let n = unsafe { noise_ref(noise) }?;
        let probe = ProbeConfig::new(n_total, n_active, kappa)?;
        let r = qfi(n, &probe);
        let b = betas(n, &probe);
        Ok(QfiValue {
            value: r.value,
            log_value: r.log_value,
            beta0: b.beta0,
            beta1: b.beta1,
        })
    })
}

/// Fisher information `n μ2²` of `n` separable qubits.
///
/// # Safety
/// `noise` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_separable_baseline(
    noise: *const QfiNoise,
    n: usize,
    out: *mut f64,
) -> QfiStatus {
    guarded(out, || {
        // SAFETY: forwarded from the caller.
        let noise = unsafe { noise_ref(noise) }?;
        Ok(qfi_separable(noise, n))
    })
}

/// # Safety
/// `noise` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_kappa_opt(
    noise: *const QfiNoise,
    n_total: usize,
    n_active: usize,
    out: *mut f64,
) -> QfiStatus {
    guarded(out, || {
        // SAFETY: forwarded from the caller.
        let n = unsafe { noise_ref(noise) }?;
        Ok(kappa_opt(n, n_total, n_active)?)
    })
}

/// Scans active sizes `1..=n_max`. With `optimal_kappa` the Schmidt
/// coefficient is re-optimised per size and `kappa` is ignored; with
/// `inactive` each candidate carries one extra inactive qubit.
///
/// # Safety
/// `noise` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_optimize(
    noise: *const QfiNoise,
    optimal_kappa: bool,
    kappa: f64,
    n_max: usize,
    inactive: bool,
    out: *mut QfiOptimum,
) -> QfiStatus {
    guarded(out, || {
        // SAFETY: forwarded from the caller.
        let n = unsafe { noise_ref(noise) }?;
        let policy = if optimal_kappa {
            KappaPolicy::OptimalPerN
        } else {
            KappaPolicy::Fixed(kappa)
        };
        let s = optimize_n(n, policy, n_max, inactive)?;
        Ok(QfiOptimum {
            n_opt: s.n_opt,
            n_total: s.n_total,
            kappa_opt: s.kappa_opt,
            fq_max: s.fq_max,
            log_fq_max: s.log_fq_max,
            ratio_vs_separable: s.ratio_vs_separable.unwrap_or(f64::NAN),
            fq_per_qubit: s.fq_per_qubit,
            fq_over_n_sq: s.fq_over_n_sq,
            cap_reached: s.cap_reached,
        })
    })
}

/// Brute-force Fisher information from the dense density matrix, for a probe
/// along the axis `(theta, phi)` at phase `xi`. Probes are capped at 12 qubits.
///
/// # Safety
/// `noise` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qfi_oracle(
    noise: *const QfiNoise,
    n_total: usize,
    n_active: usize,
    kappa: f64,
    theta: f64,
    phi: f64,
    xi: f64,
    out: *mut QfiOracleValue,
) -> QfiStatus {
    guarded(out, || {
        // SAFETY: forwarded from the caller.
        let n = unsafe { noise_ref(noise) }?;
        let probe = ProbeConfig::new(n_total, n_active, kappa)?;
        let axis = Axis::new(theta, phi)?;
        let r = qfi_bruteforce(n, &probe, &axis, xi, DerivativeMode::Analytic)?;
        Ok(QfiOracleValue {
            value: r.value,
            excluded_pairs: r.excluded_pairs,
        })
    })
}

/// Message for the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn qfi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qfi_version() -> *const c_char {
    const VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains a nul byte"),
        };
    VERSION.as_ptr()
}
