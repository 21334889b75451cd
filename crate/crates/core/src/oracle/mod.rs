//! Brute-force Fisher information from the full `2^N x 2^N` density matrix.
//!
//! This path builds the probe ket, rotates it, applies the noise qubit by
//! qubit and evaluates
//!
//! ```text
//! F = 2 Σ_{j,k} |<λj| ∂ρ |λk>|² / (λj + λk)
//! ```
//!
//! from a Hermitian eigendecomposition. It shares nothing with
//! [`crate::closedform`] except the single-qubit channel definition, which
//! makes it the reference for checking the closed form.

mod dense;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use num_traits::{Float, NumAssign};
use rand::Rng;
use twofloat::TwoFloat;

use crate::channel::NoiseParams;
use crate::closedform::{check_kappa, check_shape, ProbeConfig};
use crate::error::{Error, Result};

use dense::{
    adjoint2, apply_left, apply_right, apply_superop, apply_to_ket, kron_ket, matmul2, Superop, I,
    ONE, ZERO,
};
pub use dense::{DensityMatrix, Ket, Op2};

/// Largest probe the dense path accepts.
pub const MAX_QUBITS: usize = 12;

/// Eigenvalue pairs with `λj + λk` at or below this are left out of the sum.
pub const PAIR_TOLERANCE: f64 = 1e-12;

/// Central finite-difference step for [`DerivativeMode::FiniteDifference`].
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Real type of the state pipeline.
trait Real: Float + NumAssign + nalgebra::Scalar + From<f64> {}

impl Real for f64 {}
impl Real for TwoFloat {}

fn real<R: Real>(x: f64) -> R {
    <R as From<f64>>::from(x)
}

fn lift<R: Real>(z: Complex64) -> Complex<R> {
    Complex::new(real::<R>(z.re), real::<R>(z.im))
}

fn round<R: Real>(z: &Complex<R>) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// `(sin x, cos x)` rescaled onto the unit circle, so that matrices built
/// from them stay unitary to working precision.
fn unit_sin_cos<R: Real>(x: f64) -> (R, R) {
    let (s, c) = real::<R>(x).sin_cos();
    let r = (s * s + c * c).sqrt();
    (s / r, c / r)
}

/// Axis-dependent single-qubit operators in working precision.
struct Frame<R: Real> {
    /// Columns `|0'>` and `|1'>`.
    v: Op2<Complex<R>>,
    vd: Op2<Complex<R>>,
    /// `n·σ = |0'><0'| - |1'><1'|`
    ns: Op2<Complex<R>>,
}

impl<R: Real> Frame<R> {
    fn new(axis: &Axis) -> Self {
        let zero = R::zero();
        let (s, c) = unit_sin_cos::<R>(0.5 * axis.theta);
        let (sp, cp) = unit_sin_cos::<R>(axis.phi);
        let phase = Complex::new(cp, sp);
        let v = [
            [Complex::new(c, zero), Complex::new(s, zero)],
            [phase * s, -(phase * c)],
        ];
        let vd = adjoint2(&v);
        let (one, minus) = (Complex::new(R::one(), zero), Complex::new(-R::one(), zero));
        let z = Complex::new(zero, zero);
        let ns = matmul2(&matmul2(&v, &[[one, z], [z, minus]]), &vd);
        Self { v, vd, ns }
    }

    /// `exp(-i ξ/2 n·σ) = cos(ξ/2) I - i sin(ξ/2) n·σ`
    fn rotation(&self, xi: f64) -> Op2<Complex<R>> {
        let (s, c) = unit_sin_cos::<R>(0.5 * xi);
        let mut u = self.ns;
        for (i, row) in u.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                let id = if i == j { c } else { R::zero() };
                // -i s z
                *z = Complex::new(id + s * z.im, -s * z.re);
            }
        }
        u
    }

    /// Images `N(|a><b|)` of the computational matrix units, obtained by
    /// conjugating the primed-basis action with the basis change.
    fn superop(&self, noise: &NoiseParams) -> Superop<Complex<R>> {
        let z = Complex::new(R::zero(), R::zero());
        let mut images = [[[[z; 2]; 2]; 2]; 2];
        for (a, row) in images.iter_mut().enumerate() {
            for (b, image) in row.iter_mut().enumerate() {
                // |a><b| = Σ_ij <i'|a><b|j'> |i'><j'|
                let mut primed = [[z; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        let coeff = self.v[a][i].conj() * self.v[b][j];
                        let action = noise.primed_action(i, j);
                        for x in 0..2 {
                            for y in 0..2 {
                                primed[x][y] += coeff * lift::<R>(action[x][y]);
                            }
                        }
                    }
                }
                *image = matmul2(&matmul2(&self.v, &primed), &self.vd);
            }
        }
        images
    }

    fn probe(&self, n_total: usize, kappa: f64) -> DVector<Complex<R>> {
        let col = |k: usize| [self.v[0][k], self.v[1][k]];
        let zeros = kron_ket(&vec![col(0); n_total]);
        let ones = kron_ket(&vec![col(1); n_total]);
        let kappa = real::<R>(kappa);
        let (a, b) = ((R::one() - kappa).sqrt(), kappa.sqrt());
        zeros.zip_map(&ones, |x, y| x * a + y * b)
    }

    fn rotate_ket(&self, ket: &mut DVector<Complex<R>>, xi: f64, n_active: usize, n: usize) {
        let u = self.rotation(xi);
        for q in 0..n_active {
            apply_to_ket(ket, &u, q, n);
        }
    }

    fn channel(&self, m: &mut DMatrix<Complex<R>>, noise: &NoiseParams, n_active: usize, n: usize) {
        let images = self.superop(noise);
        for q in 0..n_active {
            apply_superop(m, &images, q, n);
        }
    }

    /// `-i[G, ρ]` with `G = ½ Σ_{q < n_active} (n·σ)_q`.
    fn phase_derivative(
        &self,
        rho: &DMatrix<Complex<R>>,
        n_active: usize,
        n: usize,
    ) -> DMatrix<Complex<R>> {
        let half = real::<R>(0.5);
        let mut out = rho.map(|_| Complex::new(R::zero(), R::zero()));
        for q in 0..n_active {
            let mut left = rho.clone();
            apply_left(&mut left, &self.ns, q, n);
            let mut right = rho.clone();
            apply_right(&mut right, &self.ns, q, n);
            out = out.zip_zip_map(&left, &right, |o, l, r| {
                let d = l - r;
                o + Complex::new(half * d.im, -half * d.re)
            });
        }
        out
    }
}

fn outer<R: Real>(ket: &DVector<Complex<R>>) -> DMatrix<Complex<R>> {
    DMatrix::from_fn(ket.len(), ket.len(), |i, j| ket[i] * ket[j].conj())
}

/// Rotation axis `n = (sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    theta: f64,
    phi: f64,
}

impl Axis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(Error::Range {
                name: "theta_n",
                value: theta,
                min: 0.0,
                max: PI,
            });
        }
        if !(phi.is_finite() && (0.0..TAU).contains(&phi)) {
            return Err(Error::Range {
                name: "phi_n",
                value: phi,
                min: 0.0,
                max: TAU,
            });
        }
        Ok(Self { theta, phi })
    }

    pub fn z() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    fn frame(&self) -> Frame<f64> {
        Frame::new(self)
    }

    /// `|0'> = cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`, Bloch vector `n`.
    pub fn ket0(&self) -> [Complex64; 2] {
        let v = self.frame().v;
        [v[0][0], v[1][0]]
    }

    /// `|1'> = sin(θ/2)|0> - e^{iφ} cos(θ/2)|1>`, Bloch vector `-n`.
    pub fn ket1(&self) -> [Complex64; 2] {
        let v = self.frame().v;
        [v[0][1], v[1][1]]
    }

    /// Unitary whose columns are `|0'>` and `|1'>`.
    pub fn basis_change(&self) -> Op2 {
        self.frame().v
    }

    /// `n · σ`
    pub fn n_dot_sigma(&self) -> Op2 {
        self.frame().ns
    }

    /// `exp(-i ξ/2 n·σ) = cos(ξ/2) I - i sin(ξ/2) n·σ`
    pub fn rotation(&self, xi: f64) -> Op2 {
        self.frame().rotation(xi)
    }

    /// Primed Pauli operators `(σ'x, σ'y, σ'z)` in the computational basis.
    pub fn primed_paulis(&self) -> [Op2; 3] {
        let f = self.frame();
        let conj = |p: Op2| matmul2(&matmul2(&f.v, &p), &f.vd);
        [
            conj([[ZERO, ONE], [ONE, ZERO]]),
            conj([[ZERO, -I], [I, ZERO]]),
            conj([[ONE, ZERO], [ZERO, -ONE]]),
        ]
    }
}

/// Oracle output.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiOracleResult {
    pub value: f64,
    /// Eigenvalues of `ρ` in ascending order.
    pub spectrum: Vec<f64>,
    /// Ordered pairs `(j, k)` skipped because `λj + λk <= PAIR_TOLERANCE`.
    pub excluded_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Push `-i[G, ρ1]` through the channel, `G` the phase generator. The
    /// state and derivative are built in double-double arithmetic, which
    /// keeps coherences far below `1e-16` resolvable.
    Analytic,
    /// `(ρ(ξ+h) - ρ(ξ-h)) / 2h` in double precision.
    FiniteDifference(f64),
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Size { n, cap: MAX_QUBITS });
    }
    Ok(())
}

/// `√(1-κ)|0'>^{⊗N} + √κ|1'>^{⊗N}`
pub fn probe_state(n_total: usize, kappa: f64, axis: &Axis) -> Result<Ket> {
    check_shape(n_total, n_total)?;
    check_size(n_total)?;
    check_kappa(kappa)?;
    Ok(axis.frame().probe(n_total, kappa))
}

/// Applies `exp(-i ξ/2 n·σ)` to the first `n_active` qubits.
pub fn apply_phase_unitary(state: &Ket, xi: f64, axis: &Axis, n_active: usize) -> Result<Ket> {
    let n = DensityMatrix::from_ket(state)?.n_qubits();
    check_shape(n, n_active)?;
    let mut out = state.clone();
    axis.frame().rotate_ket(&mut out, xi, n_active, n);
    Ok(out)
}

/// Noise on the first `n_active` qubits, identity on the rest.
pub fn apply_channel(
    rho: &DensityMatrix,
    noise: &NoiseParams,
    axis: &Axis,
    n_active: usize,
) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    check_shape(n, n_active)?;
    let mut m = rho.entries().clone();
    axis.frame().channel(&mut m, noise, n_active, n);
    DensityMatrix::from_entries(m)
}

/// Applies the channel to an arbitrary (not necessarily positive) operator.
pub fn apply_channel_to_operator(
    m: &DMatrix<Complex64>,
    noise: &NoiseParams,
    axis: &Axis,
    n_active: usize,
) -> Result<DMatrix<Complex64>> {
    let n = DensityMatrix::from_entries(m.clone())?.n_qubits();
    check_shape(n, n_active)?;
    let mut out = m.clone();
    axis.frame().channel(&mut out, noise, n_active, n);
    Ok(out)
}

/// `U ρ U†` with `U` acting on the first `n_active` qubits.
pub fn rotate_density(
    rho: &DensityMatrix,
    xi: f64,
    axis: &Axis,
    n_active: usize,
) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    check_shape(n, n_active)?;
    let u = axis.rotation(xi);
    let ud = adjoint2(&u);
    let mut m = rho.entries().clone();
    for q in 0..n_active {
        apply_left(&mut m, &u, q, n);
        apply_right(&mut m, &ud, q, n);
    }
    DensityMatrix::from_entries(m)
}

/// `∂ξ (U ρ U†) = -i[G, U ρ U†]` with `G = ½ Σ_{q < n_active} (n·σ)_q`,
/// evaluated at the given (already rotated) `ρ`.
pub fn phase_derivative(
    rho: &DensityMatrix,
    axis: &Axis,
    n_active: usize,
) -> Result<DMatrix<Complex64>> {
    let n = rho.n_qubits();
    check_shape(n, n_active)?;
    Ok(axis.frame().phase_derivative(rho.entries(), n_active, n))
}

/// General Fisher information of `ρ` with derivative `drho`, via the
/// eigendecomposition of `ρ`.
pub fn qfi_eq1(rho: &DensityMatrix, drho: &DMatrix<Complex64>) -> Result<QfiOracleResult> {
    let dim = rho.dim();
    if drho.nrows() != dim || drho.ncols() != dim {
        return Err(Error::Numerical(format!(
            "derivative is {}x{}, density matrix is {dim}x{dim}",
            drho.nrows(),
            drho.ncols()
        )));
    }
    let eigen = rho
        .entries()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 1000 * dim.max(1))
        .ok_or_else(|| Error::Numerical("Hermitian eigendecomposition did not converge".into()))?;
    let lambdas = eigen.eigenvalues;
    let vecs = eigen.eigenvectors;
    let projected = vecs.adjoint() * drho * &vecs;

    let mut value = 0.0;
    let mut excluded_pairs = 0;
    for j in 0..dim {
        for k in 0..dim {
            let denom = lambdas[j] + lambdas[k];
            if denom <= PAIR_TOLERANCE {
                excluded_pairs += 1;
                continue;
            }
            value += projected[(j, k)].norm_sqr() / denom;
        }
    }
    let mut spectrum: Vec<f64> = lambdas.iter().copied().collect();
    spectrum.sort_by(f64::total_cmp);
    Ok(QfiOracleResult {
        value: 2.0 * value,
        spectrum,
        excluded_pairs,
    })
}

/// `ρξ` and `∂ξ ρξ` built in working precision `R`, then rounded.
fn state_and_derivative<R: Real>(
    noise: &NoiseParams,
    probe: &ProbeConfig,
    axis: &Axis,
    xi: f64,
) -> Result<(DensityMatrix, DMatrix<Complex64>)> {
    let (n, n_active) = (probe.n_total(), probe.n_active());
    let frame = Frame::<R>::new(axis);
    let mut psi = frame.probe(n, probe.kappa());
    frame.rotate_ket(&mut psi, xi, n_active, n);
    let mut rho = outer(&psi);
    let mut drho = frame.phase_derivative(&rho, n_active, n);
    frame.channel(&mut rho, noise, n_active, n);
    frame.channel(&mut drho, noise, n_active, n);
    Ok((
        DensityMatrix::from_entries(rho.map(|z| round(&z)))?,
        drho.map(|z| round(&z)),
    ))
}

/// Noisy probe state `ρξ`.
pub fn noisy_state(
    noise: &NoiseParams,
    probe: &ProbeConfig,
    axis: &Axis,
    xi: f64,
) -> Result<DensityMatrix> {
    check_size(probe.n_total())?;
    Ok(state_and_derivative::<TwoFloat>(noise, probe, axis, xi)?.0)
}

/// End-to-end brute-force Fisher information.
pub fn qfi_bruteforce(
    noise: &NoiseParams,
    probe: &ProbeConfig,
    axis: &Axis,
    xi: f64,
    mode: DerivativeMode,
) -> Result<QfiOracleResult> {
    check_size(probe.n_total())?;
    let (rho, drho) = match mode {
        DerivativeMode::Analytic => state_and_derivative::<TwoFloat>(noise, probe, axis, xi)?,
        DerivativeMode::FiniteDifference(h) => {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Range {
                    name: "h",
                    value: h,
                    min: 0.0,
                    max: f64::INFINITY,
                });
            }
            let at = |x: f64| {
                state_and_derivative::<f64>(noise, probe, axis, x)
                    .map(|(rho, _)| rho.into_entries())
            };
            let rho = state_and_derivative::<f64>(noise, probe, axis, xi)?.0;
            (
                rho,
                (at(xi + h)? - at(xi - h)?) / Complex64::new(2.0 * h, 0.0),
            )
        }
    };
    qfi_eq1(&rho, &drho)
}

/// One randomly drawn configuration for cross-checking the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub noise: NoiseParams,
    pub probe: ProbeConfig,
    pub axis: Axis,
    pub xi: f64,
}

impl TrialConfig {
    /// Draws `μ ~ U[-1,1]`, `μ1 ~ U[0,1]`, `μ2 = √μ1 · U[0,1]`, `ωt, ξ, φ ~ U[0,2π)`,
    /// `θ ~ U[0,π]`, `κ ~ U[0,1]`, `N ~ U{1..n_max}` and `N1 ~ U{1..N}`.
    /// With `inactive`, `N1` is drawn from `1..N-1` whenever `N >= 2`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, n_max: usize, inactive: bool) -> Result<Self> {
        check_size(n_max)?;
        check_shape(n_max, n_max)?;
        let mu = rng.random_range(-1.0..=1.0);
        let mu1: f64 = rng.random_range(0.0..=1.0);
        let mu2 = mu1.sqrt() * rng.random_range(0.0..=1.0);
        let omega_t = rng.random_range(0.0..TAU);
        let noise = NoiseParams::new(mu, mu1, mu2, omega_t)?;

        let n_total = rng.random_range(1..=n_max);
        let n_active = if inactive && n_total >= 2 {
            rng.random_range(1..n_total)
        } else {
            rng.random_range(1..=n_total)
        };
        let kappa = rng.random_range(0.0..=1.0);
        let probe = ProbeConfig::new(n_total, n_active, kappa)?;
        let axis = Axis::new(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU))?;
        let xi = rng.random_range(0.0..TAU);
        Ok(Self {
            noise,
            probe,
            axis,
            xi,
        })
    }
}

/// `|oracle - closed| / max(closed, 1e-30)`
pub fn relative_deviation(oracle: f64, closed: f64) -> f64 {
    (oracle - closed).abs() / closed.max(1e-30)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bloch_affine, make_noise, preset, Preset};
    use crate::closedform;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &Ket, b: &Ket, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    fn random_axis(rng: &mut ChaCha8Rng) -> Axis {
        Axis::new(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU)).unwrap()
    }

    fn single_qubit_rho(r: [f64; 3], axis: &Axis) -> DensityMatrix {
        // ρ = ½(I + Σ r_k σ'_k), coordinates in the axis-adapted frame
        let p = axis.primed_paulis();
        let mut m = DMatrix::from_element(2, 2, ZERO);
        m[(0, 0)] = c(0.5);
        m[(1, 1)] = c(0.5);
        for (k, rk) in r.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    m[(i, j)] += p[k][i][j] * (0.5 * rk);
                }
            }
        }
        DensityMatrix::from_entries(m).unwrap()
    }

    fn primed_bloch(rho: &DensityMatrix, axis: &Axis) -> Vector3<f64> {
        let p = axis.primed_paulis();
        let mut r = [0.0; 3];
        for (k, rk) in r.iter_mut().enumerate() {
            let mut t = ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    t += rho.entries()[(i, j)] * p[k][j][i];
                }
            }
            *rk = t.re;
        }
        Vector3::from(r)
    }

    #[test]
    fn axis_validation_and_normalisation() {
        assert!(Axis::new(-0.1, 0.0).is_err());
        assert!(Axis::new(0.5, TAU).is_err());
        assert!(Axis::new(PI, 6.0).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let axis = random_axis(&mut rng);
            let n = axis.unit_vector();
            assert!((n.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
            let k0 = axis.ket0();
            let k1 = axis.ket1();
            let overlap = k0[0].conj() * k1[0] + k0[1].conj() * k1[1];
            assert!(overlap.norm() < 1e-15);
        }
    }

    #[test]
    fn probe_examples() {
        let z = Axis::z();
        let psi = probe_state(1, 0.0, &z).unwrap();
        assert!(close(&psi, &Ket::from_vec(vec![ONE, ZERO]), 0.0));

        let bell = probe_state(2, 0.5, &z).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |1'> = -|1> on the z axis, so |1'1'> = |11>
        let expected = Ket::from_vec(vec![c(h), ZERO, ZERO, c(h)]);
        assert!(close(&bell, &expected, 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let axis = random_axis(&mut rng);
            let psi = probe_state(1, rng.random_range(0.0..=1.0), &axis).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-15);
        }
        assert!(matches!(
            probe_state(13, 0.5, &z),
            Err(Error::Size { n: 13, cap: 12 })
        ));
        assert!(probe_state(3, 1.5, &z).is_err());
    }

    #[test]
    fn phase_unitary_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let axis = random_axis(&mut rng);
            let n = rng.random_range(1..=5);
            let n1 = rng.random_range(1..=n);
            let kappa = rng.random_range(0.0..=1.0);
            let xi = rng.random_range(-3.0..3.0);
            let psi0 = probe_state(n, kappa, &axis).unwrap();

            assert!(close(
                &apply_phase_unitary(&psi0, 0.0, &axis, n1).unwrap(),
                &psi0,
                1e-15
            ));

            let got = apply_phase_unitary(&psi0, xi, &axis, n1).unwrap();
            let half = 0.5 * n1 as f64 * xi;
            let zeros = kron_ket(&vec![axis.ket0(); n]);
            let ones = kron_ket(&vec![axis.ket1(); n]);
            let expected = zeros * Complex64::from_polar((1.0 - kappa).sqrt(), -half)
                + ones * Complex64::from_polar(kappa.sqrt(), half);
            assert!(close(&got, &expected, 1e-14));
            assert!((got.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn full_turn_leaves_density_unchanged() {
        let axis = Axis::new(1.1, 2.0).unwrap();
        for n1 in [2, 4] {
            let psi0 = probe_state(4, 0.3, &axis).unwrap();
            let rho0 = DensityMatrix::from_ket(&psi0).unwrap();
            let rho = DensityMatrix::from_ket(&apply_phase_unitary(&psi0, TAU, &axis, n1).unwrap())
                .unwrap();
            assert!((rho.entries() - rho0.entries())
                .iter()
                .all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn channel_single_qubit_examples() {
        let axis = Axis::new(0.7, 4.0).unwrap();
        let noise = make_noise(0.4, 0.6, 0.5, 1.3).unwrap();
        let a = noise.coeffs();
        let rho = DensityMatrix::from_ket(&Ket::from_vec(axis.ket0().to_vec())).unwrap();
        let out = apply_channel(&rho, &noise, &axis, 1).unwrap();
        let p = primed_bloch(&out, &axis);
        // ½(1+α0)|0'><0'| + ½(1-α0)|1'><1'| has primed Bloch vector (0, 0, α0)
        assert_abs_diff_eq!(p, Vector3::new(0.0, 0.0, a.alpha0), epsilon = 1e-14);
    }

    #[test]
    fn noiseless_channel_is_identity() {
        let axis = Axis::new(2.0, 0.3).unwrap();
        let psi = apply_phase_unitary(&probe_state(3, 0.2, &axis).unwrap(), 0.7, &axis, 3).unwrap();
        let rho = DensityMatrix::from_ket(&psi).unwrap();
        let out = apply_channel(&rho, &preset(Preset::Noiseless).unwrap(), &axis, 3).unwrap();
        assert!((out.entries() - rho.entries())
            .iter()
            .all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn coherence_contracts_by_alpha2_power() {
        // |0'0'><1'1'| -> α2² |0'0'><1'1'|
        let axis = Axis::new(0.4, 1.0).unwrap();
        let noise = make_noise(-0.3, 0.8, 0.7, 0.9).unwrap();
        let zeros = kron_ket(&[axis.ket0(); 2]);
        let ones = kron_ket(&[axis.ket1(); 2]);
        let op = &zeros * ones.adjoint();
        let out = apply_channel_to_operator(&op, &noise, &axis, 2).unwrap();
        let a2 = noise.coeffs().alpha2;
        assert!((out - op * (a2 * a2)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn bloch_affine_agrees_with_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let mu1: f64 = rng.random_range(0.0..=1.0);
            let noise = make_noise(
                rng.random_range(-1.0..=1.0),
                mu1,
                mu1.sqrt() * rng.random_range(0.0..=1.0),
                rng.random_range(-5.0..5.0),
            )
            .unwrap();
            let axis = random_axis(&mut rng);
            let mut r = [0.0; 3];
            loop {
                for x in r.iter_mut() {
                    *x = rng.random_range(-1.0..=1.0);
                }
                if r.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                    break;
                }
            }
            let rho = single_qubit_rho(r, &axis);
            let out = apply_channel(&rho, &noise, &axis, 1).unwrap();
            assert!((out.trace() - ONE).norm() < 1e-12);
            let expected = bloch_affine(&noise).apply(&Vector3::from(r));
            assert_abs_diff_eq!(primed_bloch(&out, &axis), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn eq1_zero_derivative() {
        let rho = noisy_state(
            &preset(Preset::Depolarizing(0.7)).unwrap(),
            &ProbeConfig::full(3, 0.4).unwrap(),
            &Axis::z(),
            0.2,
        )
        .unwrap();
        let r = qfi_eq1(&rho, &DMatrix::zeros(8, 8)).unwrap();
        assert_eq!(r.value, 0.0);
        assert!((r.spectrum.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_qubit_optimal_probe() {
        let noise = make_noise(0.3, 0.7, 0.6, 0.4).unwrap();
        let axis = Axis::new(1.0, 2.5).unwrap();
        // |+'> has primed Bloch vector (1, 0, 0)
        let rho0 = single_qubit_rho([1.0, 0.0, 0.0], &axis);
        let rho1 = rotate_density(&rho0, 0.9, &axis, 1).unwrap();
        let rho = apply_channel(&rho1, &noise, &axis, 1).unwrap();
        let drho = apply_channel_to_operator(
            &phase_derivative(&rho1, &axis, 1).unwrap(),
            &noise,
            &axis,
            1,
        )
        .unwrap();
        let r = qfi_eq1(&rho, &drho).unwrap();
        assert!((r.value - 0.36).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn single_qubit_arbitrary_bloch_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mu1: f64 = rng.random_range(0.05..=1.0);
            let noise = make_noise(
                rng.random_range(-1.0..=1.0),
                mu1,
                mu1.sqrt() * rng.random_range(0.1..=1.0),
                0.3,
            )
            .unwrap();
            let axis = random_axis(&mut rng);
            let len: f64 = rng.random_range(0.0..0.95);
            let (th, ph) = (rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
            let r = [
                len * th.sin() * ph.cos(),
                len * th.sin() * ph.sin(),
                len * th.cos(),
            ];
            let rho1 = rotate_density(
                &single_qubit_rho(r, &axis),
                rng.random_range(0.0..TAU),
                &axis,
                1,
            )
            .unwrap();
            let rho = apply_channel(&rho1, &noise, &axis, 1).unwrap();
            let drho = apply_channel_to_operator(
                &phase_derivative(&rho1, &axis, 1).unwrap(),
                &noise,
                &axis,
                1,
            )
            .unwrap();
            let got = qfi_eq1(&rho, &drho).unwrap().value;
            let r_perp_sq = r[0] * r[0] + r[1] * r[1];
            let expected = noise.mu2().powi(2) * r_perp_sq;
            assert!(
                (got - expected).abs() <= 1e-10 * expected.max(1e-3),
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn noiseless_ghz_reaches_heisenberg_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let id = preset(Preset::Noiseless).unwrap();
        for _ in 0..5 {
            let axis = random_axis(&mut rng);
            let xi = rng.random_range(0.0..TAU);
            let r = qfi_bruteforce(
                &id,
                &ProbeConfig::full(3, 0.5).unwrap(),
                &axis,
                xi,
                DerivativeMode::Analytic,
            )
            .unwrap();
            assert!((r.value - 9.0).abs() < 1e-10);
            // pure state: one unit eigenvalue, seven zeros, 7x7 zero pairs dropped
            assert_eq!(r.excluded_pairs, 49);
        }
    }

    #[test]
    fn finite_difference_agrees_with_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let t = TrialConfig::sample(&mut rng, 5, false).unwrap();
            let a = qfi_bruteforce(&t.noise, &t.probe, &t.axis, t.xi, DerivativeMode::Analytic)
                .unwrap()
                .value;
            let f = qfi_bruteforce(
                &t.noise,
                &t.probe,
                &t.axis,
                t.xi,
                DerivativeMode::FiniteDifference(DEFAULT_FD_STEP),
            )
            .unwrap()
            .value;
            assert!((a - f).abs() <= 1e-6 * a.max(1e-12), "{a} vs {f}");
        }
    }

    #[test]
    fn matches_closed_form_on_random_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..60 {
            let t = TrialConfig::sample(&mut rng, 6, i % 2 == 0).unwrap();
            let o = qfi_bruteforce(&t.noise, &t.probe, &t.axis, t.xi, DerivativeMode::Analytic)
                .unwrap();
            let cf = closedform::qfi(&t.noise, &t.probe).value;
            assert!(
                relative_deviation(o.value, cf) < 1e-9,
                "{t:?}: {} vs {cf}",
                o.value
            );
            assert!((o.spectrum.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn density_matrix_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let t = TrialConfig::sample(&mut rng, 5, false).unwrap();
            let rho = noisy_state(&t.noise, &t.probe, &t.axis, t.xi).unwrap();
            assert!(rho.hermiticity_defect() < 1e-12);
            assert!((rho.trace() - ONE).norm() < 1e-12);
            let spectrum = rho.entries().clone().symmetric_eigenvalues();
            assert!(spectrum.iter().all(|&l| l >= -1e-10));
        }
    }

    #[test]
    fn sampler_respects_inactive_flag() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let t = TrialConfig::sample(&mut rng, 8, true).unwrap();
            if t.probe.n_total() >= 2 {
                assert!(t.probe.n_active() < t.probe.n_total());
            }
        }
        assert!(TrialConfig::sample(&mut rng, 13, false).is_err());
    }
}
