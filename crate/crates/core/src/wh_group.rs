//! Weyl-Heisenberg displacement operators for one qudit or a tensor
//! factorization of the dimension.
//!
//! For a factor of size `n` the shift and clock act as `X|k⟩ = |k+1⟩` and
//! `Z|k⟩ = ωᵏ|k⟩` with `ω = e^{2πi/n}`, and displacements are
//! `D_a = τ^{a₁a₂} X^{a₁} Z^{a₂}` with `τ = −e^{iπ/n}` (so `τ² = ω`).
//! Composite displacements are Kronecker products in factor order.
//!
//! Every displacement is a monomial matrix, `D_a|j⟩ = c_j |π(j)⟩`, and is
//! stored that way; dense matrices are produced on request. All index
//! arithmetic is exact modular integer arithmetic.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::states::{ComplexMatrix, PureState, ONE, ZERO};

/// Dimension above which the `d²` expectation values are evaluated in
/// parallel. Each entry is computed independently, so the output does not
/// depend on the thread count.
const PAR_EXPECTATION_DIM: usize = 16;

/// Ordered tensor factorization `d = n₁ ⋯ n_k`, every factor at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization(Vec<usize>);

impl Factorization {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidFactor(bad));
        }
        // d² must also fit, since indices run over Z_d × Z_d
        let d = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .filter(|d| d.checked_mul(*d).is_some())
            .ok_or_else(|| Error::Overflow(factors.clone()))?;
        debug_assert!(d >= 2);
        Ok(Self(factors))
    }

    /// The single-qudit factorization `[d]`.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn factors(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.iter().product()
    }

    pub fn is_single(&self) -> bool {
        self.0.len() == 1
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Displacement label: one `(a₁, a₂)` pair per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DisplacementIndex(Vec<(usize, usize)>);

impl DisplacementIndex {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self(pairs)
    }

    /// Index for a single-qudit group.
    pub fn single(a1: usize, a2: usize) -> Self {
        Self(vec![(a1, a2)])
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&(a, b)| a == 0 && b == 0)
    }
}

impl fmt::Display for DisplacementIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("({a},{b})")).collect();
        f.write_str(&parts.join("⊗"))
    }
}

/// `D|j⟩ = coeffs[j] |targets[j]⟩`.
#[derive(Debug, Clone)]
struct Monomial {
    targets: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl Monomial {
    fn kron(&self, other: &Monomial) -> Monomial {
        let nb = other.targets.len();
        let mut targets = Vec::with_capacity(self.targets.len() * nb);
        let mut coeffs = Vec::with_capacity(self.targets.len() * nb);
        for (&ta, &ca) in self.targets.iter().zip(&self.coeffs) {
            for (&tb, &cb) in other.targets.iter().zip(&other.coeffs) {
                targets.push(ta * nb + tb);
                coeffs.push(ca * cb);
            }
        }
        Monomial { targets, coeffs }
    }
}

/// Powers `τ^k`, `k ∈ [0, 2n)`, for one factor.
#[derive(Debug, Clone)]
struct TauTable {
    n: usize,
    powers: Vec<Complex64>,
}

impl TauTable {
    fn new(n: usize) -> Self {
        // τ^k = (−1)^k e^{iπk/n} = e^{iπ k(n+1)/n}
        let powers = (0..2 * n)
            .map(|k| {
                let m = (k * (n + 1)) % (2 * n);
                Complex64::from_polar(1.0, std::f64::consts::PI * m as f64 / n as f64)
            })
            .collect();
        Self { n, powers }
    }

    fn pow(&self, k: i64) -> Complex64 {
        self.powers[k.rem_euclid(2 * self.n as i64) as usize]
    }

    fn displacement(&self, a1: usize, a2: usize) -> Monomial {
        let n = self.n;
        let targets = (0..n).map(|j| (j + a1) % n).collect();
        let coeffs = (0..n).map(|j| self.pow((a1 * a2 + 2 * a2 * j) as i64)).collect();
        Monomial { targets, coeffs }
    }
}

/// The phase-quotiented Weyl-Heisenberg group: `d²` displacement operators in
/// ascending linear-index order.
#[derive(Debug, Clone)]
pub struct WhGroup {
    factorization: Factorization,
    dim: usize,
    taus: Vec<TauTable>,
    ops: Vec<Monomial>,
}

impl WhGroup {
    /// Builds all displacement operators for a factorization.
    pub fn new(factorization: Factorization) -> Self {
        let taus: Vec<TauTable> = factorization
            .factors()
            .iter()
            .map(|&n| TauTable::new(n))
            .collect();
        let dim = factorization.dim();
        let mut ops: Vec<Monomial> = vec![Monomial {
            targets: vec![0],
            coeffs: vec![ONE],
        }];
        for tau in &taus {
            let n = tau.n;
            let local: Vec<Monomial> = (0..n * n).map(|l| tau.displacement(l / n, l % n)).collect();
            ops = ops
                .iter()
                .flat_map(|prefix| local.iter().map(move |m| prefix.kron(m)))
                .collect();
        }
        debug_assert_eq!(ops.len(), dim * dim);
        Self {
            factorization,
            dim,
            taus,
            ops,
        }
    }

    /// Single-qudit group `W(d)`.
    pub fn single(d: usize) -> Result<Self> {
        Ok(Self::new(Factorization::single(d)?))
    }

    pub fn from_factors(factors: &[usize]) -> Result<Self> {
        Ok(Self::new(Factorization::new(factors.to_vec())?))
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of operators, `d²`.
    pub fn size(&self) -> usize {
        self.ops.len()
    }

    pub fn zero(&self) -> DisplacementIndex {
        DisplacementIndex(vec![(0, 0); self.taus.len()])
    }

    fn check(&self, a: &DisplacementIndex) -> Result<()> {
        let ok =
            a.0.len() == self.taus.len() && a.0.iter().zip(&self.taus).all(|(&(x, y), t)| x < t.n && y < t.n);
        if ok {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(a.to_string()))
        }
    }

    /// Position of `a` in the operator list. Factor 1 is most significant;
    /// within a factor `a₁` is major.
    pub fn linear_index(&self, a: &DisplacementIndex) -> Result<usize> {
        self.check(a)?;
        Ok(a.0
            .iter()
            .zip(&self.taus)
            .fold(0, |acc, (&(x, y), t)| acc * t.n * t.n + x * t.n + y))
    }

    pub fn index_at(&self, linear: usize) -> Result<DisplacementIndex> {
        if linear >= self.size() {
            return Err(Error::IndexOutOfRange(format!("linear index {linear}")));
        }
        let mut rest = linear;
        let mut pairs = vec![(0, 0); self.taus.len()];
        for (slot, t) in pairs.iter_mut().zip(&self.taus).rev() {
            let nn = t.n * t.n;
            let local = rest % nn;
            rest /= nn;
            *slot = (local / t.n, local % t.n);
        }
        Ok(DisplacementIndex(pairs))
    }

    /// All indices in ascending linear order.
    pub fn indices(&self) -> impl Iterator<Item = DisplacementIndex> + '_ {
        (0..self.size()).map(|l| self.index_at(l).expect("in range"))
    }

    pub fn negate(&self, a: &DisplacementIndex) -> Result<DisplacementIndex> {
        self.check(a)?;
        Ok(DisplacementIndex(
            a.0.iter()
                .zip(&self.taus)
                .map(|(&(x, y), t)| ((t.n - x) % t.n, (t.n - y) % t.n))
                .collect(),
        ))
    }

    pub fn add(&self, a: &DisplacementIndex, b: &DisplacementIndex) -> Result<DisplacementIndex> {
        self.check(a)?;
        self.check(b)?;
        Ok(DisplacementIndex(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.taus)
                .map(|((&(a1, a2), &(b1, b2)), t)| ((a1 + b1) % t.n, (a2 + b2) % t.n))
                .collect(),
        ))
    }

    /// Returns `a + b` and the phase `γ` with `D_a D_b = γ D_{a+b}`.
    pub fn compose_indices(
        &self,
        a: &DisplacementIndex,
        b: &DisplacementIndex,
    ) -> Result<(DisplacementIndex, Complex64)> {
        let sum = self.add(a, b)?;
        let mut phase = ONE;
        for (((&(a1, a2), &(b1, b2)), &(c1, c2)), t) in a.0.iter().zip(&b.0).zip(&sum.0).zip(&self.taus) {
            let e = (a1 * a2 + b1 * b2 + 2 * a2 * b1) as i64 - (c1 * c2) as i64;
            phase *= t.pow(e);
        }
        Ok((sum, phase))
    }

    /// Per-factor symplectic products `[a,b] = a₁b₂ − a₂b₁ mod nᵢ`. With the
    /// shift and clock above, `D_a D_b = ω^{−[a,b]} D_b D_a` in each factor.
    pub fn symplectic_form(&self, a: &DisplacementIndex, b: &DisplacementIndex) -> Result<Vec<usize>> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.0
            .iter()
            .zip(&b.0)
            .zip(&self.taus)
            .map(|((&(a1, a2), &(b1, b2)), t)| {
                let n = t.n as i64;
                ((a1 * b2) as i64 - (a2 * b1) as i64).rem_euclid(n) as usize
            })
            .collect())
    }

    /// `D_a` and `D_b` commute iff the per-factor phases `ω_i^{[a,b]_i}`
    /// multiply to one, i.e. `Σ_i [a,b]_i · d/n_i ≡ 0 (mod d)`. For composite
    /// groups this is weaker than every factor commuting (`XX` and `ZZ`).
    pub fn commute(&self, a: &DisplacementIndex, b: &DisplacementIndex) -> Result<bool> {
        let d = self.dim;
        let total = self
            .symplectic_form(a, b)?
            .iter()
            .zip(&self.taus)
            .fold(0usize, |acc, (&s, t)| (acc + s * (d / t.n)) % d);
        Ok(total == 0)
    }

    /// The phase `s` with `D_a† = s D_{−a}`. It is 1 for odd factors and
    /// `±1` for even ones, where the `τ` convention reduced mod `n` only
    /// closes up to sign.
    pub fn adjoint_phase(&self, a: &DisplacementIndex) -> Result<Complex64> {
        let neg = self.negate(a)?;
        let (_, gamma) = self.compose_indices(a, &neg)?;
        // D_a D_{−a} = γ I
        Ok(gamma.conj())
    }

    /// Dense matrix of `D_a`.
    pub fn operator(&self, a: &DisplacementIndex) -> Result<ComplexMatrix> {
        Ok(self.operator_at(self.linear_index(a)?))
    }

    pub fn operator_at(&self, linear: usize) -> ComplexMatrix {
        let op = &self.ops[linear];
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (j, (&t, &c)) in op.targets.iter().zip(&op.coeffs).enumerate() {
            m[(t, j)] = c;
        }
        m
    }

    /// `D_a v` for the operator at `linear`.
    pub fn apply_at(&self, linear: usize, v: &[Complex64]) -> Vec<Complex64> {
        let op = &self.ops[linear];
        let mut out = vec![ZERO; v.len()];
        for ((&t, &c), &x) in op.targets.iter().zip(&op.coeffs).zip(v) {
            out[t] = c * x;
        }
        out
    }

    /// `D_a|ψ⟩` as a state.
    pub fn displace(&self, a: &DisplacementIndex, psi: &PureState) -> Result<PureState> {
        self.check_state(psi)?;
        Ok(PureState::from_unit_unchecked(
            self.apply_at(self.linear_index(a)?, psi.amplitudes()),
        ))
    }

    /// `⟨v|D_a|v⟩` for the operator at `linear`.
    pub fn expectation_at(&self, linear: usize, v: &[Complex64]) -> Complex64 {
        let op = &self.ops[linear];
        op.targets
            .iter()
            .zip(&op.coeffs)
            .zip(v)
            .map(|((&t, &c), &x)| v[t].conj() * c * x)
            .sum()
    }

    /// `⟨ψ|D_a|ψ⟩` for every index in linear order.
    pub fn expectations(&self, psi: &PureState) -> Result<Vec<Complex64>> {
        self.check_state(psi)?;
        Ok(self.expectations_raw(psi.amplitudes()))
    }

    pub(crate) fn expectations_raw(&self, v: &[Complex64]) -> Vec<Complex64> {
        if self.dim >= PAR_EXPECTATION_DIM {
            (0..self.size())
                .into_par_iter()
                .map(|l| self.expectation_at(l, v))
                .collect()
        } else {
            (0..self.size()).map(|l| self.expectation_at(l, v)).collect()
        }
    }

    /// `tr(D_a† M)`, the coefficient of `M` along `D_a` times `d`.
    pub fn hs_overlap_at(&self, linear: usize, m: &ComplexMatrix) -> Complex64 {
        let op = &self.ops[linear];
        op.targets
            .iter()
            .zip(&op.coeffs)
            .enumerate()
            .map(|(j, (&t, &c))| c.conj() * m[(t, j)])
            .sum()
    }

    pub(crate) fn check_state(&self, psi: &PureState) -> Result<()> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        Ok(())
    }
}

/// Builds the group for a factorization.
pub fn build_group(factorization: Factorization) -> WhGroup {
    WhGroup::new(factorization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::haar_random_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn factorization_validation() {
        assert!(matches!(
            Factorization::new(vec![2, 1]),
            Err(Error::InvalidFactor(1))
        ));
        assert!(matches!(
            Factorization::new(vec![]),
            Err(Error::InvalidDimension(0))
        ));
        assert!(matches!(
            Factorization::new(vec![usize::MAX / 2, 4]),
            Err(Error::Overflow(_))
        ));
        let f = Factorization::new(vec![2, 3]).unwrap();
        assert_eq!(f.dim(), 6);
        assert_eq!(f.to_string(), "[2,3]");
    }

    #[test]
    fn qubit_operators() {
        let g = WhGroup::single(2).unwrap();
        assert_eq!(
            g.operator(&DisplacementIndex::single(0, 0)).unwrap(),
            ComplexMatrix::identity(2)
        );
        let x = ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        assert!(
            g.operator(&DisplacementIndex::single(1, 0))
                .unwrap()
                .max_abs_diff(&x)
                < 1e-15
        );
        let z = ComplexMatrix::new(2, 2, vec![ONE, ZERO, ZERO, c(-1.0, 0.0)]).unwrap();
        assert!(
            g.operator(&DisplacementIndex::single(0, 1))
                .unwrap()
                .max_abs_diff(&z)
                < 1e-15
        );
        // D_(1,1) = τXZ with τ = −i is Hermitian (±Y)
        assert!(g
            .operator(&DisplacementIndex::single(1, 1))
            .unwrap()
            .is_hermitian(1e-15));
    }

    #[test]
    fn clock_and_shift_match_definition() {
        for n in 2..=6 {
            let g = WhGroup::single(n).unwrap();
            let x = g.operator(&DisplacementIndex::single(1, 0)).unwrap();
            let z = g.operator(&DisplacementIndex::single(0, 1)).unwrap();
            let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
            for k in 0..n {
                assert!((x[((k + 1) % n, k)] - ONE).norm() < 1e-14);
                assert!((z[(k, k)] - omega.powu(k as u32)).norm() < 1e-14);
            }
        }
    }

    fn groups() -> Vec<WhGroup> {
        let mut gs: Vec<WhGroup> = (2..=6).map(|d| WhGroup::single(d).unwrap()).collect();
        gs.push(WhGroup::from_factors(&[2, 2]).unwrap());
        gs.push(WhGroup::from_factors(&[2, 3]).unwrap());
        gs.push(WhGroup::from_factors(&[3, 2]).unwrap());
        gs
    }

    #[test]
    fn unitary_and_orthogonal() {
        for g in groups() {
            let d = g.dim();
            assert_eq!(g.size(), d * d);
            let mats: Vec<ComplexMatrix> = (0..g.size()).map(|l| g.operator_at(l)).collect();
            for m in &mats {
                assert!(m.is_unitary(1e-10));
            }
            for (i, a) in mats.iter().enumerate() {
                for (j, b) in mats.iter().enumerate() {
                    let tr = a.matmul(&b.adjoint()).unwrap().trace();
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert!(
                        (tr - c(expect, 0.0)).norm() < 1e-8,
                        "{} {i} {j}",
                        g.factorization()
                    );
                }
            }
        }
    }

    #[test]
    fn composite_operators_are_kronecker_products() {
        let g = WhGroup::from_factors(&[2, 3]).unwrap();
        let g2 = WhGroup::single(2).unwrap();
        let g3 = WhGroup::single(3).unwrap();
        for a in g.indices() {
            let p = a.pairs();
            let expect = g2
                .operator(&DisplacementIndex::single(p[0].0, p[0].1))
                .unwrap()
                .kron(&g3.operator(&DisplacementIndex::single(p[1].0, p[1].1)).unwrap());
            assert!(g.operator(&a).unwrap().max_abs_diff(&expect) < 1e-14);
        }
    }

    #[test]
    fn linear_index_round_trip() {
        for g in groups() {
            for l in 0..g.size() {
                assert_eq!(g.linear_index(&g.index_at(l).unwrap()).unwrap(), l);
            }
            assert_eq!(g.linear_index(&g.zero()).unwrap(), 0);
        }
        let g = WhGroup::single(3).unwrap();
        assert!(g.linear_index(&DisplacementIndex::single(3, 0)).is_err());
        assert!(g
            .linear_index(&DisplacementIndex::new(vec![(0, 0), (0, 0)]))
            .is_err());
    }

    #[test]
    fn composition_phase_matches_matrix_product() {
        for g in groups() {
            for a in g.indices() {
                for b in g.indices() {
                    let (sum, gamma) = g.compose_indices(&a, &b).unwrap();
                    assert!((gamma.norm() - 1.0).abs() < 1e-14);
                    let lhs = g.operator(&a).unwrap().matmul(&g.operator(&b).unwrap()).unwrap();
                    let rhs = g.operator(&sum).unwrap().scale(gamma);
                    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                }
            }
        }
        let g = WhGroup::single(2).unwrap();
        let (sum, gamma) = g
            .compose_indices(&g.zero(), &DisplacementIndex::single(1, 1))
            .unwrap();
        assert_eq!(sum, DisplacementIndex::single(1, 1));
        assert!((gamma - ONE).norm() < 1e-15);
    }

    #[test]
    fn adjoint_is_negated_index() {
        // exact for odd dimensions and for qubits
        for d in [2, 3, 5, 7] {
            let g = WhGroup::single(d).unwrap();
            for a in g.indices() {
                let adj = g.operator(&a).unwrap().adjoint();
                let neg = g.operator(&g.negate(&a).unwrap()).unwrap();
                assert!(adj.max_abs_diff(&neg) < 1e-12, "d={d} a={a}");
            }
        }
        // up to a sign for even d ≥ 4
        for factors in [vec![4], vec![6], vec![2, 2], vec![2, 3]] {
            let g = WhGroup::from_factors(&factors).unwrap();
            for a in g.indices() {
                let s = g.adjoint_phase(&a).unwrap();
                assert!((s.re.abs() - 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);
                let adj = g.operator(&a).unwrap().adjoint();
                let neg = g.operator(&g.negate(&a).unwrap()).unwrap().scale(s);
                assert!(adj.max_abs_diff(&neg) < 1e-12);
            }
        }
    }

    #[test]
    fn symplectic_form_values() {
        let g = WhGroup::single(3).unwrap();
        let a = DisplacementIndex::single(1, 0);
        let b = DisplacementIndex::single(0, 1);
        assert_eq!(g.symplectic_form(&a, &b).unwrap(), vec![1]);
        assert_eq!(g.symplectic_form(&b, &a).unwrap(), vec![2]);
        for x in g.indices() {
            assert_eq!(g.symplectic_form(&x, &x).unwrap(), vec![0]);
        }
    }

    #[test]
    fn commutation_brute_force() {
        for g in groups() {
            let n = g.factorization().factors().to_vec();
            for a in g.indices() {
                for b in g.indices() {
                    let da = g.operator(&a).unwrap();
                    let db = g.operator(&b).unwrap();
                    let ab = da.matmul(&db).unwrap();
                    let ba = db.matmul(&da).unwrap();
                    let commute = ab.max_abs_diff(&ba) < 1e-12;
                    assert_eq!(commute, g.commute(&a, &b).unwrap());
                    // with X|k⟩ = |k+1⟩, Z|k⟩ = ωᵏ|k⟩: D_a D_b = ω^{−[a,b]} D_b D_a
                    let form = g.symplectic_form(&a, &b).unwrap();
                    let phase: Complex64 = form
                        .iter()
                        .zip(&n)
                        .map(|(&s, &ni)| {
                            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / ni as f64)
                        })
                        .product();
                    assert!(ab.max_abs_diff(&ba.scale(phase.conj())) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn odd_dimension_phase_convention_independence() {
        for d in [3usize, 5, 7] {
            let g = WhGroup::single(d).unwrap();
            let inv2 = d.div_ceil(2);
            let omega =
                |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % d) as f64 / d as f64);
            let psi = haar_random_state(d, 11).unwrap();
            let v = psi.amplitudes();
            for a in g.indices() {
                let (a1, a2) = a.pairs()[0];
                // D'_a = ω^{2⁻¹a₁a₂} X^{a₁} Z^{a₂}
                let alt: Complex64 = (0..d)
                    .map(|j| v[(j + a1) % d].conj() * omega(inv2 * a1 * a2 + a2 * j) * v[j])
                    .sum();
                let ours = g.expectation_at(g.linear_index(&a).unwrap(), v);
                assert!((alt.norm() - ours.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn monomial_paths_match_dense() {
        let g = WhGroup::from_factors(&[3, 2]).unwrap();
        let psi = haar_random_state(6, 5).unwrap();
        let m = ComplexMatrix::outer(&psi);
        for l in 0..g.size() {
            let dense = g.operator_at(l);
            let applied = dense.apply(psi.amplitudes()).unwrap();
            let fast = g.apply_at(l, psi.amplitudes());
            for (x, y) in applied.iter().zip(&fast) {
                assert!((x - y).norm() < 1e-14);
            }
            let ev: Complex64 = psi
                .amplitudes()
                .iter()
                .zip(&applied)
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!((ev - g.expectation_at(l, psi.amplitudes())).norm() < 1e-14);
            let hs = dense.adjoint().matmul(&m).unwrap().trace();
            assert!((hs - g.hs_overlap_at(l, &m)).norm() < 1e-14);
        }
    }
}
