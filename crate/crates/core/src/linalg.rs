//! Dense complex linear algebra for registers of a few qubits.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! computational-basis index. A state labelled `|i0 i1 i2>` has index
//! `i0*4 + i1*2 + i2`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on `max |M - M^†|` accepted by [`hermitian_eigenvalues`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are ragged or not square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub(crate) fn from_data(dim: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Entrywise transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M^†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M^†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            out[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let v = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }

    /// `A M A^†`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        &(a * self) * &a.dagger()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Single-qubit Pauli matrices.
pub mod pauli {
    use super::{ComplexMatrix, I, ONE, ZERO};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]])
    }
}

fn check_qubit_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return domain(format!("dimension {dim} is not a power of two"));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Pure state of an `N`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps an amplitude vector, rejecting vectors whose norm is not 1 within 1e-12.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let num_qubits = check_qubit_dim(amplitudes.len())?;
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state norm^2 is {norm2}, expected 1")));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let num_qubits = check_qubit_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        Self { num_qubits, amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            num_qubits: self.num_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator on `N` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity (1e-12), trace (1e-10) and positivity (min eigenvalue >= -1e-10).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let num_qubits = check_qubit_dim(matrix.dim())?;
        let herm = matrix.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let matrix = matrix.hermitian_part();
        let min_eig = hermitian_eigenvalues(&matrix)?[0];
        if min_eig < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { num_qubits, matrix })
    }

    /// Skips validation. Callers guarantee the physical invariants by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let num_qubits = matrix.dim().trailing_zeros() as usize;
        Self { num_qubits, matrix }
    }

    /// Maximally mixed state `I / 2^N`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

/// Kronecker product with `a` as the slower (left) factor.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on qubit `target` of an `n`-qubit register.
pub fn embed_local(op: &ComplexMatrix, target: usize, n: usize) -> Result<ComplexMatrix> {
    if op.dim() != 2 {
        return domain(format!("embed_local expects a 2x2 operator, got {0}x{0}", op.dim()));
    }
    if target >= n {
        return domain(format!("target qubit {target} out of range for {n} qubits"));
    }
    let id = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::identity(1);
    for q in 0..n {
        out = tensor_product(&out, if q == target { op } else { &id });
    }
    Ok(out)
}

/// Bit of qubit `q` in an `n`-qubit basis index.
#[inline]
pub(crate) fn qubit_bit(q: usize, n: usize) -> usize {
    1 << (n - 1 - q)
}

/// Maps `(index over kept qubits, index over removed qubits)` to a full basis index.
pub(crate) fn scatter_index(sub_index: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    qubits
        .iter()
        .enumerate()
        .filter(|&(pos, _)| sub_index & (1 << (k - 1 - pos)) != 0)
        .map(|(_, &q)| qubit_bit(q, n))
        .sum()
}

/// Traces out the qubits in `remove`; the remaining qubits keep their relative order.
pub fn partial_trace(rho: &DensityMatrix, remove: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    for (i, &q) in remove.iter().enumerate() {
        if q >= n {
            return domain(format!("qubit {q} out of range for {n} qubits"));
        }
        if remove[..i].contains(&q) {
            return domain(format!("qubit {q} listed twice"));
        }
    }
    if remove.len() >= n {
        return domain("cannot trace out every qubit");
    }
    let kept: Vec<usize> = (0..n).filter(|q| !remove.contains(q)).collect();
    let mut removed: Vec<usize> = remove.to_vec();
    removed.sort_unstable();
    Ok(DensityMatrix::from_matrix_unchecked(trace_out(rho.matrix(), n, &kept, &removed)))
}

pub(crate) fn trace_out(m: &ComplexMatrix, n: usize, kept: &[usize], removed: &[usize]) -> ComplexMatrix {
    let dk = 1 << kept.len();
    let dr = 1 << removed.len();
    let kept_idx: Vec<usize> = (0..dk).map(|a| scatter_index(a, kept, n)).collect();
    let rem_idx: Vec<usize> = (0..dr).map(|r| scatter_index(r, removed, n)).collect();
    let mut out = ComplexMatrix::zeros(dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for &r in &rem_idx {
                acc += m[(kept_idx[a] | r, kept_idx[b] | r)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Which factor of a two-qubit operator is transposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial transpose of a 4x4 operator on two qubits.
pub fn partial_transpose(m: &ComplexMatrix, subsystem: Subsystem) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return domain(format!("partial transpose expects a 4x4 operator, got {0}x{0}", m.dim()));
    }
    Ok(partial_transpose_4(m, subsystem))
}

pub(crate) fn partial_transpose_4(m: &ComplexMatrix, subsystem: Subsystem) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let src = match subsystem {
                        Subsystem::First => m[(2 * k + j, 2 * i + l)],
                        Subsystem::Second => m[(2 * i + l, 2 * k + j)],
                    };
                    out[(2 * i + j, 2 * k + l)] = src;
                }
            }
        }
    }
    out
}

/// Full real spectrum of a Hermitian matrix in ascending order.
///
/// Input within [`HERMITIAN_TOL`] of Hermitian is symmetrized first; anything
/// further off is rejected. Uses cyclic complex Jacobi rotations until the
/// off-diagonal Frobenius norm drops below `1e-14`.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return domain(format!("matrix is not Hermitian (defect {defect:e})"));
    }
    let mut a = m.hermitian_part();
    let mut eig = jacobi_in_place(&mut a);
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Diagonalizes a Hermitian matrix in place and returns its (unsorted) diagonal.
pub(crate) fn jacobi_in_place(a: &mut ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(a, p, q);
            }
        }
    }
    (0..n).map(|i| a[(i, i)].re).collect()
}

/// One Jacobi rotation zeroing entry `(p, q)`.
#[inline]
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let r = b.norm();
    if r < 1e-300 {
        return;
    }
    let phase = b / r; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.dim();
    let ph_c = phase.conj();
    // columns: A <- A G, G = diag(1, e^{-i phi}) * R
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)] * ph_c;
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
    }
    // rows: A <- G^† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)] * phase;
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell_phi_plus() -> DensityMatrix {
        PureState::new(vec![c(FRAC_1_SQRT_2), ZERO, ZERO, c(FRAC_1_SQRT_2)])
            .unwrap()
            .to_density()
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&id, &id), ComplexMatrix::identity(4));
    }

    #[test]
    fn sigma_x_tensor_identity_block_layout() {
        let m = tensor_product(&pauli::x(), &ComplexMatrix::identity(2));
        let expected = ComplexMatrix::from_real_rows(&[
            vec![0., 0., 1., 0.],
            vec![0., 0., 0., 1.],
            vec![1., 0., 0., 0.],
            vec![0., 1., 0., 0.],
        ]);
        assert_eq!(m, expected);
    }

    #[test]
    fn projector_tensor_is_diagonal() {
        let p0 = ComplexMatrix::diagonal(&[1., 0.]);
        let p1 = ComplexMatrix::diagonal(&[0., 1.]);
        assert_eq!(tensor_product(&p0, &p1), ComplexMatrix::diagonal(&[0., 1., 0., 0.]));
    }

    #[test]
    fn embed_local_positions() {
        assert_eq!(embed_local(&pauli::z(), 0, 1).unwrap(), pauli::z());
        assert_eq!(
            embed_local(&pauli::x(), 1, 2).unwrap(),
            tensor_product(&ComplexMatrix::identity(2), &pauli::x())
        );
        let z2 = embed_local(&pauli::z(), 2, 3).unwrap();
        let psi = PureState::basis(3, 0b001);
        let out = z2.apply(psi.amplitudes());
        assert_eq!(out[1], -ONE);
        assert!(embed_local(&pauli::z(), 3, 3).is_err());
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let r = partial_trace(&bell_phi_plus(), &[1]).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let r = partial_trace(&PureState::basis(2, 0).to_density(), &[0]).unwrap();
        assert_eq!(r.matrix(), &ComplexMatrix::diagonal(&[1., 0.]));
    }

    #[test]
    fn partial_trace_rejects_removing_everything() {
        assert!(partial_trace(&bell_phi_plus(), &[0, 1]).is_err());
        assert!(partial_trace(&bell_phi_plus(), &[2]).is_err());
    }

    // Brute-force contraction over explicit bit strings, independent of scatter_index.
    fn brute_partial_trace(m: &ComplexMatrix, n: usize, remove: usize) -> ComplexMatrix {
        let bits = |idx: usize| -> Vec<usize> { (0..n).map(|q| (idx >> (n - 1 - q)) & 1).collect() };
        let mut out = ComplexMatrix::zeros(1 << (n - 1));
        for i in 0..(1 << n) {
            for j in 0..(1 << n) {
                let (bi, bj) = (bits(i), bits(j));
                if bi[remove] != bj[remove] {
                    continue;
                }
                let squash = |b: &[usize]| {
                    b.iter()
                        .enumerate()
                        .filter(|&(q, _)| q != remove)
                        .fold(0, |acc, (_, &v)| acc * 2 + v)
                };
                out[(squash(&bi), squash(&bj))] += m[(i, j)];
            }
        }
        out
    }

    #[test]
    fn partial_trace_of_gghz_has_expected_spectrum() {
        let alpha = PI / 3.0;
        let beta = 0.7;
        let mut amps = vec![ZERO; 8];
        amps[0] = c((alpha / 2.0).cos());
        amps[7] = C64::from_polar((alpha / 2.0).sin(), beta);
        let rho = PureState::new(amps).unwrap().to_density();
        let reduced = partial_trace(&rho, &[2]).unwrap();
        let oracle = brute_partial_trace(rho.matrix(), 3, 2);
        assert!(reduced.matrix().max_abs_diff(&oracle) < 1e-15);
        let eig = hermitian_eigenvalues(reduced.matrix()).unwrap();
        let expected = [0.0, 0.0, (alpha / 2.0).sin().powi(2), (alpha / 2.0).cos().powi(2)];
        for (e, x) in eig.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{eig:?}");
        }
    }

    #[test]
    fn partial_transpose_of_bell() {
        let pt = partial_transpose(bell_phi_plus().matrix(), Subsystem::First).unwrap();
        let eig = hermitian_eigenvalues(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (e, x) in eig.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_of_identity_and_involution() {
        let id = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(partial_transpose(&id, Subsystem::First).unwrap(), id);
        let m = ComplexMatrix::from_data(4, (0..16).map(|k| C64::new(k as f64, -(k as f64) / 3.0)).collect());
        for s in [Subsystem::First, Subsystem::Second] {
            let twice = partial_transpose(&partial_transpose(&m, s).unwrap(), s).unwrap();
            assert_eq!(twice, m);
        }
        // T_b = (T_a)^T
        let ta = partial_transpose(&m, Subsystem::First).unwrap();
        let tb = partial_transpose(&m, Subsystem::Second).unwrap();
        assert_eq!(ta.transpose(), tb);
        assert!(partial_transpose(&ComplexMatrix::identity(2), Subsystem::First).is_err());
    }

    #[test]
    fn eigenvalues_of_simple_matrices() {
        let e = hermitian_eigenvalues(&ComplexMatrix::diagonal(&[3., 1., 2.])).unwrap();
        assert_eq!(e, vec![1., 2., 3.]);
        let e = hermitian_eigenvalues(&pauli::x()).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
        let e = hermitian_eigenvalues(&pauli::y()).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0., 1.], vec![0., 0.]]);
        assert!(hermitian_eigenvalues(&m).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::diagonal(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::diagonal(&[0.6, 0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diagonal(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diagonal(&[0.5, 0.25, 0.25])).is_err());
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::normalized(vec![ONE, ONE]).is_ok());
    }
}
