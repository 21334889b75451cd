//! Dense kets and density matrices over `n` qubits.
//!
//! Qubit 0 is the most significant bit of a basis index, so kets compose
//! with the usual Kronecker ordering.

use std::ops::{AddAssign, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};

use crate::error::{Error, Result};

pub type Ket = DVector<Complex64>;
pub type Op2<C = Complex64> = [[C; 2]; 2];

/// Amplitude type of the dense kernels: `Complex64`, or a complex number
/// over an extended-precision real.
pub trait Amp:
    nalgebra::Scalar + Copy + Zero + One + Sub<Output = Self> + Neg<Output = Self> + AddAssign
{
}

impl<T> Amp for T where
    T: nalgebra::Scalar + Copy + Zero + One + Sub<Output = T> + Neg<Output = T> + AddAssign
{
}

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Density matrix of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_ket(ket: &Ket) -> Result<Self> {
        let n_qubits = qubits_for_dim(ket.len())?;
        Ok(Self {
            n_qubits,
            entries: ket * ket.adjoint(),
        })
    }

    pub fn from_entries(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Numerical(format!(
                "density matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let n_qubits = qubits_for_dim(entries.nrows())?;
        Ok(Self { n_qubits, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest entry of `ρ - ρ†` in modulus.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = &self.entries - self.entries.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Numerical(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[inline]
fn stride(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Indices with the bit of `qubit` cleared.
fn low_indices(n_qubits: usize, qubit: usize) -> impl Iterator<Item = usize> {
    let s = stride(n_qubits, qubit);
    (0..1usize << n_qubits).filter(move |i| i & s == 0)
}

pub fn apply_to_ket<C: Amp>(ket: &mut DVector<C>, op: &Op2<C>, qubit: usize, n_qubits: usize) {
    let s = stride(n_qubits, qubit);
    for i in low_indices(n_qubits, qubit) {
        let (a, b) = (ket[i], ket[i + s]);
        ket[i] = op[0][0] * a + op[0][1] * b;
        ket[i + s] = op[1][0] * a + op[1][1] * b;
    }
}

/// `op_q · m`
pub fn apply_left<C: Amp>(m: &mut DMatrix<C>, op: &Op2<C>, qubit: usize, n_qubits: usize) {
    let s = stride(n_qubits, qubit);
    let dim = m.ncols();
    for i in low_indices(n_qubits, qubit) {
        for c in 0..dim {
            let (a, b) = (m[(i, c)], m[(i + s, c)]);
            m[(i, c)] = op[0][0] * a + op[0][1] * b;
            m[(i + s, c)] = op[1][0] * a + op[1][1] * b;
        }
    }
}

/// `m · op_q`
pub fn apply_right<C: Amp>(m: &mut DMatrix<C>, op: &Op2<C>, qubit: usize, n_qubits: usize) {
    let s = stride(n_qubits, qubit);
    let dim = m.nrows();
    for j in low_indices(n_qubits, qubit) {
        for r in 0..dim {
            let (a, b) = (m[(r, j)], m[(r, j + s)]);
            m[(r, j)] = a * op[0][0] + b * op[1][0];
            m[(r, j + s)] = a * op[0][1] + b * op[1][1];
        }
    }
}

/// Single-qubit superoperator given by the images of the four matrix units:
/// `images[a][b] = N(|a><b|)` in the computational basis.
pub type Superop<C = Complex64> = [[Op2<C>; 2]; 2];

/// Applies a single-qubit superoperator to `qubit` of `m`, identity elsewhere.
pub fn apply_superop<C: Amp>(
    m: &mut DMatrix<C>,
    images: &Superop<C>,
    qubit: usize,
    n_qubits: usize,
) {
    let s = stride(n_qubits, qubit);
    let rows: Vec<usize> = low_indices(n_qubits, qubit).collect();
    for &r in &rows {
        for &c in &rows {
            let block = [
                [m[(r, c)], m[(r, c + s)]],
                [m[(r + s, c)], m[(r + s, c + s)]],
            ];
            let mut out = [[C::zero(); 2]; 2];
            for (a, block_row) in block.iter().enumerate() {
                for (b, &v) in block_row.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let img = &images[a][b];
                    for x in 0..2 {
                        for y in 0..2 {
                            out[x][y] += img[x][y] * v;
                        }
                    }
                }
            }
            m[(r, c)] = out[0][0];
            m[(r, c + s)] = out[0][1];
            m[(r + s, c)] = out[1][0];
            m[(r + s, c + s)] = out[1][1];
        }
    }
}

pub fn kron_ket<C: Amp>(parts: &[[C; 2]]) -> DVector<C> {
    let mut amps = vec![C::one()];
    for part in parts {
        let mut next = Vec::with_capacity(amps.len() * 2);
        for &a in &amps {
            next.push(a * part[0]);
            next.push(a * part[1]);
        }
        amps = next;
    }
    DVector::from_vec(amps)
}

pub fn matmul2<C: Amp>(a: &Op2<C>, b: &Op2<C>) -> Op2<C> {
    let mut out = [[C::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint2<R: Clone + Num + Neg<Output = R>>(a: &Op2<Complex<R>>) -> Op2<Complex<R>>
where
    Complex<R>: Copy,
{
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}
