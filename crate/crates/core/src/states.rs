//! Dense complex vectors and matrices, pure states and Haar sampling.
//!
//! Tensor products use left-major Kronecker ordering: in `a ⊗ b` the index
//! of the left factor varies slowest, so entry `(i, j)` lands at
//! `i * b.dim() + j`. Composite Weyl-Heisenberg groups index their basis the
//! same way.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default absolute tolerance for floating-point comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance on the Euclidean norm of a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A column vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// A unit vector `|ψ⟩`. The rank-1 projector is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: ComplexVector,
}

impl PureState {
    /// Wraps an already normalized vector; fails if the norm is off by more
    /// than [`NORM_TOL`].
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        let vector = ComplexVector::new(entries)?;
        let norm = vector.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { vector })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(entries: Vec<Complex64>) -> Result<Self> {
        let vector = ComplexVector::new(entries)?;
        let norm = vector.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        let entries = vector.into_entries().into_iter().map(|c| c / norm).collect();
        Ok(Self {
            vector: ComplexVector(entries),
        })
    }

    /// Computational basis vector `|k⟩` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if k >= d {
            return Err(Error::IndexOutOfRange(format!(
                "basis index {k} in dimension {d}"
            )));
        }
        let mut entries = vec![ZERO; d];
        entries[k] = ONE;
        Ok(Self {
            vector: ComplexVector(entries),
        })
    }

    pub(crate) fn from_unit_unchecked(entries: Vec<Complex64>) -> Self {
        Self {
            vector: ComplexVector(entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.vector.entries()
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.vector.norm()
    }

    /// Multiplies every amplitude by `phase` (expected to have modulus 1).
    pub fn with_global_phase(&self, phase: Complex64) -> Self {
        Self::from_unit_unchecked(self.amplitudes().iter().map(|&c| c * phase).collect())
    }

    /// Fixes the global phase so the largest-modulus amplitude (lowest index
    /// on ties) is real and positive.
    pub fn canonical_phase(&self) -> Self {
        let mut best = 0;
        let mut best_mod = -1.0;
        for (i, c) in self.amplitudes().iter().enumerate() {
            let m = c.norm();
            if m > best_mod {
                best = i;
                best_mod = m;
            }
        }
        let pivot = self.amplitudes()[best];
        if pivot.norm() == 0.0 || (pivot.im == 0.0 && pivot.re > 0.0) {
            return self.clone();
        }
        let mut out = self.with_global_phase(pivot.conj() / best_mod);
        // the rotation is exact only up to rounding; pin the pivot so that a
        // second canonicalization is the identity
        out.vector.0[best] = Complex64::new(best_mod, 0.0);
        out
    }
}

/// `⟨a|b⟩`, conjugating the first argument.
pub fn inner(a: &PureState, b: &PureState) -> Result<Complex64> {
    inner_slices(a.amplitudes(), b.amplitudes())
}

pub(crate) fn inner_slices(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    inner(a, b).map(|c| c.norm_sqr())
}

/// Kronecker product `a ⊗ b` (left factor major).
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    let entries = a
        .amplitudes()
        .iter()
        .flat_map(|&x| b.amplitudes().iter().map(move |&y| x * y))
        .collect();
    PureState::from_unit_unchecked(entries)
}

/// Haar-random state from a seed: i.i.d. complex standard normals, then
/// normalized. Uses ChaCha8 so the stream is platform independent.
pub fn haar_random_state(d: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_state_with(d, &mut rng)
}

/// Haar-random state drawn from a caller-supplied generator.
pub fn haar_random_state_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    loop {
        let entries: Vec<Complex64> = (0..d)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        // a zero draw has probability zero, but the loop keeps this total
        if let Ok(state) = PureState::normalized(entries) {
            return Ok(state);
        }
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::Shape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &PureState) -> Self {
        let a = v.amplitudes();
        Self::from_fn(a.len(), a.len(), |r, c| a[r] * a[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Applies a unitary to a state. The result is renormalized to absorb
    /// rounding; callers are responsible for passing a unitary.
    pub fn apply_state(&self, psi: &PureState) -> Result<PureState> {
        PureState::normalized(self.apply(psi.amplitudes())?)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        match self.matmul(&self.adjoint()) {
            Ok(p) => p.max_abs_diff(&Self::identity(self.rows)) <= tol,
            Err(_) => false,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Compensated running sum with a fixed accumulation order.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> PureState {
        PureState::new(vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
    }

    #[test]
    fn inner_products_of_basis_states() {
        let e0 = PureState::basis(2, 0).unwrap();
        let e1 = PureState::basis(2, 1).unwrap();
        assert!((inner(&e0, &e0).unwrap() - ONE).norm() < 1e-15);
        assert!(inner(&e0, &e1).unwrap().norm() < 1e-15);
        let ip = inner(&plus(), &e0).unwrap();
        assert!((ip - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_conjugates_first_argument() {
        let a = PureState::new(vec![Complex64::new(0.0, 1.0), ZERO]).unwrap();
        let e0 = PureState::basis(2, 0).unwrap();
        assert!((inner(&a, &e0).unwrap() - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_rejects_mismatched_dims() {
        let a = PureState::basis(2, 0).unwrap();
        let b = PureState::basis(3, 0).unwrap();
        assert!(matches!(inner(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tensor_basics() {
        let e0 = PureState::basis(2, 0).unwrap();
        let t = tensor(&e0, &e0);
        assert_eq!(t, PureState::basis(4, 0).unwrap());
        let a = haar_random_state(2, 1).unwrap();
        let b = haar_random_state(3, 2).unwrap();
        let ab = tensor(&a, &b);
        assert_eq!(ab.dim(), 6);
        assert!((ab.norm() - 1.0).abs() < 1e-12);
        // left factor varies slowest
        let e1 = PureState::basis(2, 1).unwrap();
        let b2 = PureState::basis(3, 2).unwrap();
        assert_eq!(tensor(&e1, &b2), PureState::basis(6, 5).unwrap());
    }

    #[test]
    fn haar_state_shape_and_seed() {
        let s = haar_random_state(4, 9).unwrap();
        assert_eq!(s.dim(), 4);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert_eq!(s, haar_random_state(4, 9).unwrap());
        assert_ne!(s, haar_random_state(4, 10).unwrap());
        assert!(matches!(haar_random_state(0, 1), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn haar_first_moment_monte_carlo() {
        // E|<0|φ>|² = 1/d; the variance of |φ_0|² for d = 2 Haar states is 1/12
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let e0 = PureState::basis(2, 0).unwrap();
        let mean = (0..n)
            .map(|_| fidelity(&e0, &haar_random_state_with(2, &mut rng).unwrap()).unwrap())
            .sum::<f64>()
            / n as f64;
        let sigma = (1.0f64 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn normalization_checks() {
        assert!(matches!(
            PureState::new(vec![ONE, ONE]),
            Err(Error::NotNormalized(_))
        ));
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
        let s = PureState::normalized(vec![ONE, ONE]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_phase_makes_pivot_positive() {
        let s = PureState::new(vec![Complex64::new(0.0, 0.6), Complex64::new(-0.8, 0.0)]).unwrap();
        let c = s.canonical_phase();
        assert!((c.amplitudes()[1] - Complex64::new(0.8, 0.0)).norm() < 1e-15);
        assert!((fidelity(&s, &c).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_ops() {
        let x = ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        assert!(x.is_unitary(1e-12));
        assert!(x.is_hermitian(1e-12));
        assert_eq!(x.matmul(&x).unwrap(), ComplexMatrix::identity(2));
        let k = x.kron(&ComplexMatrix::identity(2));
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], ONE);
        assert_eq!(k[(0, 1)], ZERO);
        assert!(ComplexMatrix::new(2, 3, vec![ZERO; 5]).is_err());
        assert_eq!(ComplexMatrix::identity(3).trace(), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 10_000));
        assert!((kahan_sum(v) - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
