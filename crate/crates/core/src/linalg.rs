//! Dense complex matrices for linear-optical transfer matrices.
//!
//! Everything here is small (N ≤ a few hundred) and dense, so a flat
//! row-major `Vec` is all the storage we need.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Complex = num_complex::Complex64;

/// Default tolerance for the structural predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> Complex {
    Complex::from_polar(1.0, theta)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct TransferMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl TransferMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("transfer matrix rows must form a square".into()));
        }
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(Self { dim, data: rows.into_iter().flatten().collect() })
    }

    /// Diagonal matrix `diag(e^{iθ_s})`.
    pub fn diag_phases(angles: &[f64]) -> Self {
        let n = angles.len();
        let mut m = Self::zeros(n);
        for (s, &a) in angles.iter().enumerate() {
            m.data[s * n + s] = cis(a);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex) {
        self.data[i * self.dim + j] = z;
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, z: Complex) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * z).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖U†U − I‖_max.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// If every column holds exactly one unit-modulus entry (and the rest
    /// vanish within `tol`), return the permutation together with the
    /// per-column phases.
    pub fn as_monomial(&self, tol: f64) -> Option<(PermutationMatrix, Vec<Complex>)> {
        let n = self.dim;
        let mut mapping = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        for j in 0..n {
            let mut hit = None;
            for i in 0..n {
                let z = self.get(i, j);
                let r = z.norm();
                if (r - 1.0).abs() <= tol {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some((i, z));
                } else if r > tol {
                    return None;
                }
            }
            let (i, z) = hit?;
            mapping.push(i);
            phases.push(z);
        }
        PermutationMatrix::new(mapping).ok().map(|p| (p, phases))
    }
}

impl fmt::Debug for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TransferMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &TransferMatrix {
    type Output = TransferMatrix;
    fn mul(self, rhs: &TransferMatrix) -> TransferMatrix {
        self.matmul(rhs)
    }
}

/// Phase vector `d_s = e^{iθ_s}`; the angles are the physical phase-shifter
/// settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub angles: Vec<f64>,
}

impl PhaseVector {
    pub fn new(angles: Vec<f64>) -> Self {
        Self { angles }
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn entries(&self) -> Vec<Complex> {
        self.angles.iter().map(|&a| cis(a)).collect()
    }

    pub fn to_diag(&self) -> TransferMatrix {
        TransferMatrix::diag_phases(&self.angles)
    }

    /// Normalised inner product (1/N) Σ conj(a_s) b_s; 1 for equal vectors.
    pub fn overlap(&self, other: &Self) -> Complex {
        let n = self.dim() as f64;
        self.angles
            .iter()
            .zip(&other.angles)
            .map(|(&a, &b)| cis(b - a))
            .sum::<Complex>()
            / n
    }
}

/// Permutation with `mapping[t] = s` meaning input `t` is routed to output `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PermutationMatrix {
    mapping: Vec<usize>,
}

impl PermutationMatrix {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &s in &mapping {
            if s >= n || seen[s] {
                return invalid(format!("mapping {mapping:?} is not a bijection on 0..{n}"));
            }
            seen[s] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self { mapping: (0..n).collect() }
    }

    pub fn dim(&self) -> usize {
        self.mapping.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    #[inline]
    pub fn apply(&self, t: usize) -> usize {
        self.mapping[t]
    }

    /// Matrix product `self · other`: `other` acts first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self { mapping: other.mapping.iter().map(|&t| self.mapping[t]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.dim()];
        for (t, &s) in self.mapping.iter().enumerate() {
            inv[s] = t;
        }
        Self { mapping: inv }
    }

    /// `(a ⊗ b)` acting on the row-major product index.
    pub fn kron(&self, other: &Self) -> Self {
        let bn = other.dim();
        let mut mapping = Vec::with_capacity(self.dim() * bn);
        for &a in &self.mapping {
            for &b in &other.mapping {
                mapping.push(a * bn + b);
            }
        }
        Self { mapping }
    }

    /// Number of inverted pairs; equals the number of pairwise crossings
    /// needed to realise the permutation in a planar waveguide layout.
    pub fn inversions(&self) -> u64 {
        let m = &self.mapping;
        let mut count = 0u64;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if m[i] > m[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Largest |mapping[t] − t|.
    pub fn max_displacement(&self) -> usize {
        self.mapping.iter().enumerate().map(|(t, &s)| s.abs_diff(t)).max().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(t, &s)| t == s)
    }

    pub fn to_matrix(&self) -> TransferMatrix {
        let n = self.dim();
        let mut m = TransferMatrix::zeros(n);
        for (t, &s) in self.mapping.iter().enumerate() {
            m.set(s, t, Complex::new(1.0, 0.0));
        }
        m
    }
}

/// Kronecker product; the first factor is the slow index.
pub fn kron(a: &TransferMatrix, b: &TransferMatrix) -> TransferMatrix {
    let (an, bn) = (a.dim(), b.dim());
    let n = an * bn;
    TransferMatrix::from_fn(n, |r, c| a.get(r / bn, c / bn) * b.get(r % bn, c % bn))
}

/// Kronecker product of a list of factors; the empty product is `[[1]]`.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a TransferMatrix>) -> TransferMatrix {
    factors.into_iter().fold(TransferMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// `W_{s,t} = e^{i2πst/n}/√n`, zero-based.
pub fn dft_matrix(n: usize) -> Result<TransferMatrix> {
    if n == 0 {
        return invalid("dft_matrix needs n >= 1");
    }
    let norm = 1.0 / (n as f64).sqrt();
    Ok(TransferMatrix::from_fn(n, |s, t| {
        // reduce st mod n first so large products keep full precision
        let e = (s * t) % n;
        cis(2.0 * PI * e as f64 / n as f64) * norm
    }))
}

/// `(C^{(n)})^power` with `C_{i,j} = δ_{i,(j+1) mod n}`.
pub fn cyclic_perm(n: usize, power: i64) -> PermutationMatrix {
    assert!(n >= 1, "cyclic_perm needs n >= 1");
    let shift = power.rem_euclid(n as i64) as usize;
    PermutationMatrix { mapping: (0..n).map(|t| (t + shift) % n).collect() }
}

/// Unitary with every entry of modulus `N^{-1/2}`.
pub fn is_complex_hadamard(m: &TransferMatrix, tol: f64) -> bool {
    let target = 1.0 / (m.dim() as f64).sqrt();
    m.entries().iter().all(|z| (z.norm() - target).abs() <= tol) && m.is_unitary(tol)
}

/// Is there a unit scalar λ with ‖a − λb‖_max ≤ tol?  λ is fixed by the
/// ratio at the largest-modulus entry of `b`.
pub fn equal_up_to_global_phase(a: &TransferMatrix, b: &TransferMatrix, tol: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    global_phase(a, b, tol).is_some()
}

/// The unit scalar λ with `a ≈ λ b`, if one exists.
pub fn global_phase(a: &TransferMatrix, b: &TransferMatrix, tol: f64) -> Option<Complex> {
    let (idx, bz) = b
        .entries()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if bz.norm() == 0.0 {
        // b vanishes: only a ≈ 0 matches, and then any phase will do
        return (a.entries().iter().all(|z| z.norm() <= tol)).then_some(Complex::new(1.0, 0.0));
    }
    let ratio = a.entries()[idx] / bz;
    if ratio.norm() == 0.0 {
        return None;
    }
    let lambda = ratio / ratio.norm();
    (a.max_abs_diff(&b.scale(lambda)) <= tol).then_some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn pauli_x() -> TransferMatrix {
        TransferMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap()
    }

    #[test]
    fn kron_identity() {
        let i2 = TransferMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), TransferMatrix::identity(4));
    }

    #[test]
    fn kron_x_identity_swaps_blocks() {
        let m = kron(&pauli_x(), &TransferMatrix::identity(2));
        let p = m.as_monomial(1e-12).unwrap().0;
        assert_eq!(p.mapping(), &[2, 3, 0, 1]);
    }

    #[test]
    fn kron_of_cyclic_pairs() {
        let c2 = cyclic_perm(2, 1).to_matrix();
        let p = kron(&c2, &c2).as_monomial(1e-12).unwrap().0;
        assert_eq!(p.mapping(), &[3, 2, 1, 0]);
        assert_eq!(cyclic_perm(2, 1).kron(&cyclic_perm(2, 1)), p);
    }

    #[test]
    fn dft_small_cases() {
        assert!(dft_matrix(0).is_err());
        assert!(dft_matrix(1).unwrap().max_abs_diff(&TransferMatrix::identity(1)) < 1e-15);
        let h = dft_matrix(2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let expect = TransferMatrix::from_rows(vec![vec![c(r, 0.), c(r, 0.)], vec![c(r, 0.), c(-r, 0.)]]).unwrap();
        assert!(h.max_abs_diff(&expect) < 1e-15);
        assert!(dft_matrix(4).unwrap().unitarity_residual() <= 1e-12);
    }

    #[test]
    fn cyclic_powers() {
        assert!(cyclic_perm(3, 0).is_identity());
        assert_eq!(cyclic_perm(3, 1).mapping(), &[1, 2, 0]);
        assert_eq!(cyclic_perm(4, 5), cyclic_perm(4, 1));
        assert_eq!(cyclic_perm(4, -1), cyclic_perm(4, 3));
        // matrix form agrees with C_{i,j} = δ_{i,j+1}
        let m = cyclic_perm(3, 1).to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == (j + 1) % 3 { 1.0 } else { 0.0 };
                assert_eq!(m.get(i, j).re, expect);
            }
        }
    }

    #[test]
    fn hadamard_predicate() {
        let d4 = dft_matrix(4).unwrap();
        assert!(is_complex_hadamard(&d4, DEFAULT_TOL));
        assert!(!is_complex_hadamard(&TransferMatrix::identity(4), DEFAULT_TOL));
        let d2 = dft_matrix(2).unwrap();
        assert!(is_complex_hadamard(&kron(&d2, &d2), DEFAULT_TOL));
    }

    #[test]
    fn global_phase_predicate() {
        let u = dft_matrix(3).unwrap();
        assert!(equal_up_to_global_phase(&u, &u.scale(cis(PI / 3.0)), DEFAULT_TOL));
        assert!(!equal_up_to_global_phase(&TransferMatrix::identity(2), &pauli_x(), DEFAULT_TOL));
        let h = dft_matrix(2).unwrap();
        let z = TransferMatrix::diag_phases(&[0.0, PI]);
        let hzh = &(&h * &z) * &h;
        assert!(equal_up_to_global_phase(&hzh, &pauli_x(), DEFAULT_TOL));
    }

    #[test]
    fn permutation_product_matches_matrix_product() {
        let a = PermutationMatrix::new(vec![2, 0, 1, 3]).unwrap();
        let b = PermutationMatrix::new(vec![1, 3, 0, 2]).unwrap();
        let lhs = a.compose(&b).to_matrix();
        let rhs = &a.to_matrix() * &b.to_matrix();
        assert_eq!(lhs, rhs);
        assert!(PermutationMatrix::new(vec![0, 0]).is_err());
    }

    #[test]
    fn inversion_count() {
        assert_eq!(PermutationMatrix::new(vec![3, 2, 1, 0]).unwrap().inversions(), 6);
        assert_eq!(PermutationMatrix::identity(5).inversions(), 0);
    }
}
