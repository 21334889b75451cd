//! Phase-covariant single-qubit noise.
//!
//! The channel commutes with rotations about a fixed axis `n`. Written in the
//! primed basis `{|0'>, |1'>}` (eigenstates of `n·σ`) it acts as
//!
//! ```text
//! N(|0'><0'|) = ½(1+α0)|0'><0'| + ½(1-α0)|1'><1'|
//! N(|1'><1'|) = ½(1-α1)|0'><0'| + ½(1+α1)|1'><1'|
//! N(|0'><1'|) = α2 |0'><1'|
//! N(|1'><0'|) = α2* |1'><0'|
//! ```
//!
//! with `α0 = μ1 + μ0`, `α1 = μ1 - μ0`, `α2 = μ2 e^{-iωt}` and `μ0 = μ(1 - μ1)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack on `mu2^2 <= mu1` so that boundary presets such as amplitude damping
/// (`mu2 = sqrt(mu1)`) survive rounding.
pub const CP_SLACK: f64 = 1e-12;

/// Choi eigenvalues above this are treated as non-negative.
pub const CHOI_TOLERANCE: f64 = 1e-10;

/// Parameters of the phase-covariant channel.
///
/// `mu0` is always derived from `mu` and `mu1`; it is never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    mu: f64,
    mu1: f64,
    mu2: f64,
    omega_t: f64,
}

/// The `α` coefficients of the primed-basis action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCoeffs {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: Complex64,
}

/// Bloch-ball affine map `r -> A r + c`, expressed in the axis-adapted frame
/// `{n_perp, n x n_perp, n}` (the frame of the primed Pauli operators).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAffine {
    pub matrix_a: Matrix3<f64>,
    pub vector_c: Vector3<f64>,
}

impl BlochAffine {
    pub fn apply(&self, r: &Vector3<f64>) -> Vector3<f64> {
        self.matrix_a * r + self.vector_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiReport {
    pub min_eigenvalue: f64,
    pub is_cp: bool,
}

fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::Range {
            name,
            value,
            min,
            max,
        })
    }
}

impl NoiseParams {
    /// Validated constructor; see [`make_noise`].
    pub fn new(mu: f64, mu1: f64, mu2: f64, omega_t: f64) -> Result<Self> {
        let params = Self::box_checked(mu, mu1, mu2, omega_t)?;
        if mu2 * mu2 > mu1 + CP_SLACK {
            return Err(Error::CompletePositivity {
                mu1,
                mu2_sq: mu2 * mu2,
            });
        }
        Ok(params)
    }

    /// Checks only the parameter box, not complete positivity. Used to probe
    /// the Choi matrix of channels outside the admissible family.
    pub fn box_checked(mu: f64, mu1: f64, mu2: f64, omega_t: f64) -> Result<Self> {
        check_range("mu", mu, -1.0, 1.0)?;
        check_range("mu1", mu1, 0.0, 1.0)?;
        check_range("mu2", mu2, 0.0, 1.0)?;
        if !omega_t.is_finite() {
            return Err(Error::Range {
                name: "omega_t",
                value: omega_t,
                min: f64::NEG_INFINITY,
                max: f64::INFINITY,
            });
        }
        Ok(Self {
            mu,
            mu1,
            mu2,
            omega_t,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn omega_t(&self) -> f64 {
        self.omega_t
    }

    /// Equilibrium Bloch component along the axis, `μ(1 - μ1)`.
    pub fn mu0(&self) -> f64 {
        self.mu * (1.0 - self.mu1)
    }

    /// Maps to the noiseless identity channel.
    pub fn is_noiseless(&self) -> bool {
        self.mu1 == 1.0 && self.mu2 == 1.0 && self.omega_t == 0.0
    }

    /// `μ0 = 0`: the maximally mixed state is a fixed point.
    pub fn is_unital(&self) -> bool {
        self.mu0() == 0.0
    }

    /// Same channel with `μ -> -μ`, i.e. `α0` and `α1` exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            mu: -self.mu,
            ..*self
        }
    }

    pub fn with_omega_t(&self, omega_t: f64) -> Self {
        Self { omega_t, ..*self }
    }

    pub fn coeffs(&self) -> ChannelCoeffs {
        coeffs(self)
    }

    /// Image of `|i'><j'|` as a 2x2 matrix in the primed basis.
    pub fn primed_action(&self, i: usize, j: usize) -> [[Complex64; 2]; 2] {
        let ChannelCoeffs {
            alpha0,
            alpha1,
            alpha2,
        } = self.coeffs();
        let zero = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        match (i, j) {
            (0, 0) => [
                [re(0.5 * (1.0 + alpha0)), zero],
                [zero, re(0.5 * (1.0 - alpha0))],
            ],
            (1, 1) => [
                [re(0.5 * (1.0 - alpha1)), zero],
                [zero, re(0.5 * (1.0 + alpha1))],
            ],
            (0, 1) => [[zero, alpha2], [zero, zero]],
            (1, 0) => [[zero, zero], [alpha2.conj(), zero]],
            _ => panic!("primed basis index out of range: ({i}, {j})"),
        }
    }
}

impl fmt::Display for NoiseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mu={} mu1={} mu2={} omega_t={}",
            self.mu, self.mu1, self.mu2, self.omega_t
        )
    }
}

/// Builds a validated [`NoiseParams`].
///
/// Fails with [`Error::Range`] outside the parameter box and with
/// [`Error::CompletePositivity`] when `mu2^2 > mu1` (beyond [`CP_SLACK`]).
pub fn make_noise(mu: f64, mu1: f64, mu2: f64, omega_t: f64) -> Result<NoiseParams> {
    NoiseParams::new(mu, mu1, mu2, omega_t)
}

/// Named members of the noise family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    Noiseless,
    /// Isotropic contraction by `alpha`.
    Depolarizing(f64),
    /// Transverse contraction `mu2` only.
    PhaseFlip(f64),
    /// Relaxation towards `|0'>` with longitudinal factor `mu1`.
    AmplitudeDamping(f64),
    /// Thermal relaxation: longitudinal factor `mu1`, equilibrium bias `mu`.
    GeneralizedAmplitudeDamping {
        mu1: f64,
        mu: f64,
    },
    Custom {
        mu: f64,
        mu1: f64,
        mu2: f64,
        omega_t: f64,
    },
}

pub fn preset(preset: Preset) -> Result<NoiseParams> {
    match preset {
        Preset::Noiseless => make_noise(0.0, 1.0, 1.0, 0.0),
        Preset::Depolarizing(alpha) => make_noise(0.0, alpha, alpha, 0.0),
        Preset::PhaseFlip(mu2) => make_noise(0.0, 1.0, mu2, 0.0),
        Preset::AmplitudeDamping(mu1) => {
            check_range("mu1", mu1, 0.0, 1.0)?;
            make_noise(1.0, mu1, mu1.sqrt(), 0.0)
        }
        Preset::GeneralizedAmplitudeDamping { mu1, mu } => {
            check_range("mu1", mu1, 0.0, 1.0)?;
            make_noise(mu, mu1, mu1.sqrt(), 0.0)
        }
        Preset::Custom {
            mu,
            mu1,
            mu2,
            omega_t,
        } => make_noise(mu, mu1, mu2, omega_t),
    }
}

/// Preset names as used on the command line and in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetKind {
    Noiseless,
    Depolarizing,
    PhaseFlip,
    AmplitudeDamping,
    Gad,
    Custom,
}

impl PresetKind {
    pub const ALL: [PresetKind; 6] = [
        PresetKind::Noiseless,
        PresetKind::Depolarizing,
        PresetKind::PhaseFlip,
        PresetKind::AmplitudeDamping,
        PresetKind::Gad,
        PresetKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Noiseless => "noiseless",
            PresetKind::Depolarizing => "depolarizing",
            PresetKind::PhaseFlip => "phase-flip",
            PresetKind::AmplitudeDamping => "amplitude-damping",
            PresetKind::Gad => "gad",
            PresetKind::Custom => "custom",
        }
    }

    /// Whether the preset is driven by a single scalar parameter.
    pub fn takes_param(self) -> bool {
        !matches!(self, PresetKind::Noiseless | PresetKind::Custom)
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PresetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = PresetKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown preset `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

pub fn coeffs(noise: &NoiseParams) -> ChannelCoeffs {
    let mu0 = noise.mu0();
    ChannelCoeffs {
        alpha0: noise.mu1 + mu0,
        alpha1: noise.mu1 - mu0,
        alpha2: Complex64::from_polar(noise.mu2, -noise.omega_t),
    }
}

pub fn bloch_affine(noise: &NoiseParams) -> BlochAffine {
    let (s, c) = noise.omega_t.sin_cos();
    let m2 = noise.mu2;
    BlochAffine {
        matrix_a: Matrix3::new(
            m2 * c,
            -m2 * s,
            0.0,
            m2 * s,
            m2 * c,
            0.0,
            0.0,
            0.0,
            noise.mu1,
        ),
        vector_c: Vector3::new(0.0, 0.0, noise.mu0()),
    }
}

/// Choi matrix `Σ_ij |i'><j'| ⊗ N(|i'><j'|)` in the primed basis.
pub fn choi_matrix(noise: &NoiseParams) -> Matrix4<Complex64> {
    let mut choi = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let block = noise.primed_action(i, j);
            for (a, row) in block.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    choi[(2 * i + a, 2 * j + b)] = v;
                }
            }
        }
    }
    choi
}

/// Numerical complete-positivity diagnostic from the Choi spectrum.
pub fn validate_choi(noise: &NoiseParams) -> ChoiReport {
    let eigen = choi_matrix(noise).symmetric_eigen();
    let min_eigenvalue = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    ChoiReport {
        min_eigenvalue,
        is_cp: min_eigenvalue >= -CHOI_TOLERANCE,
    }
}
