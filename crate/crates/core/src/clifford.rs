//! A generating set of Clifford unitaries and conjugation of displacement
//! operators. Enough to exercise Clifford invariance; not an enumeration of
//! the group.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{ComplexMatrix, PureState, DEFAULT_TOL, ONE};
use crate::wh_group::{DisplacementIndex, WhGroup};

/// Required `|tr(D_b† U† D_a U)|` deficit from `d` for a match.
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CliffordElement {
    pub matrix: ComplexMatrix,
    pub label: String,
}

impl CliffordElement {
    /// `U|ψ⟩`.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        self.matrix.apply_state(psi)
    }

    /// `U†|ψ⟩`.
    pub fn apply_adjoint(&self, psi: &PureState) -> Result<PureState> {
        self.matrix.adjoint().apply_state(psi)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

fn omega_pow(n: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64)
}

/// Fourier matrix `F_{jk} = ω^{jk}/√n`.
pub fn fourier(n: usize) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| omega_pow(n, j * k) * s)
}

/// Quadratic phase gate: `S_kk = τ^{k²}` for even `n`, `ω^{2⁻¹k(k+1)}` for
/// odd `n`.
pub fn phase_gate(n: usize) -> ComplexMatrix {
    let diag: Vec<Complex64> = if n.is_multiple_of(2) {
        (0..n)
            .map(|k| {
                // τ^{k²} = e^{iπ k²(n+1)/n}
                let m = (k * k * (n + 1)) % (2 * n);
                Complex64::from_polar(1.0, std::f64::consts::PI * m as f64 / n as f64)
            })
            .collect()
    } else {
        let inv2 = n.div_ceil(2);
        (0..n).map(|k| omega_pow(n, inv2 * k * (k + 1))).collect()
    };
    ComplexMatrix::diagonal(&diag)
}

/// `I ⊗ … ⊗ U ⊗ … ⊗ I` with `U` on factor `slot`.
fn embed(factors: &[usize], slot: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let left: usize = factors[..slot].iter().product();
    let right: usize = factors[slot + 1..].iter().product();
    ComplexMatrix::identity(left)
        .kron(u)
        .kron(&ComplexMatrix::identity(right))
}

/// Permutation matrix exchanging tensor factors `i` and `i + 1`.
fn swap_adjacent(factors: &[usize], i: usize) -> ComplexMatrix {
    let d: usize = factors.iter().product();
    let mut m = ComplexMatrix::zeros(d, d);
    let mut digits = vec![0usize; factors.len()];
    for j in 0..d {
        let mut rest = j;
        for (slot, &n) in digits.iter_mut().zip(factors).rev() {
            *slot = rest % n;
            rest /= n;
        }
        digits.swap(i, i + 1);
        let target = digits.iter().zip(factors).fold(0, |acc, (&x, &n)| acc * n + x);
        m[(target, j)] = ONE;
    }
    m
}

/// Fourier and phase gates on every factor, swaps of adjacent equal factors,
/// and all displacement operators.
pub fn generators(g: &WhGroup) -> Vec<CliffordElement> {
    let factors = g.factorization().factors();
    let single = factors.len() == 1;
    let tag = |name: &str, i: usize| {
        if single {
            name.to_string()
        } else {
            format!("{name}[{i}]")
        }
    };
    let mut out = Vec::new();
    for (i, &n) in factors.iter().enumerate() {
        out.push(CliffordElement {
            matrix: embed(factors, i, &fourier(n)),
            label: tag("F", i),
        });
        out.push(CliffordElement {
            matrix: embed(factors, i, &phase_gate(n)),
            label: tag("S", i),
        });
    }
    for i in 0..factors.len().saturating_sub(1) {
        if factors[i] == factors[i + 1] {
            out.push(CliffordElement {
                matrix: swap_adjacent(factors, i),
                label: format!("SWAP[{i},{}]", i + 1),
            });
        }
    }
    for (l, a) in g.indices().enumerate() {
        out.push(CliffordElement {
            matrix: g.operator_at(l),
            label: format!("D{a}"),
        });
    }
    out
}

/// Finds `a′` and `γ` with `U† D_a U = γ D_{a′}` by projecting onto the
/// displacement basis.
pub fn conjugate_index(
    c: &CliffordElement,
    g: &WhGroup,
    a: &DisplacementIndex,
) -> Result<(DisplacementIndex, Complex64)> {
    if c.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: c.dim(),
        });
    }
    let conj = c.matrix.adjoint().matmul(&g.operator(a)?)?.matmul(&c.matrix)?;
    let d = g.dim() as f64;
    let mut best = 0.0f64;
    for l in 0..g.size() {
        let ov = g.hs_overlap_at(l, &conj);
        if (ov.norm() - d).abs() <= MATCH_TOL {
            return Ok((g.index_at(l)?, ov / d));
        }
        best = best.max(ov.norm());
    }
    Err(Error::NoMatch(best))
}

/// Checks unitarity and that conjugation maps every displacement to a phased
/// displacement.
pub fn is_clifford(c: &CliffordElement, g: &WhGroup) -> bool {
    c.matrix.is_unitary(DEFAULT_TOL) && g.indices().all(|a| conjugate_index(c, g, &a).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magic::stabilizer_entropy;
    use crate::stabilizer::enumerate_stabilizer_states;
    use crate::states::{fidelity, haar_random_state};
    use std::collections::HashSet;

    #[test]
    fn qubit_fourier_is_hadamard() {
        let h = fourier(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = ComplexMatrix::new(2, 2, vec![ONE * s, ONE * s, ONE * s, -ONE * s]).unwrap();
        assert!(h.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn fourier_exchanges_clock_and_shift() {
        for d in [2, 3, 5] {
            let g = WhGroup::single(d).unwrap();
            let f = generators(&g).into_iter().find(|c| c.label == "F").unwrap();
            // F† Z F = X
            let (img, phase) = conjugate_index(&f, &g, &DisplacementIndex::single(0, 1)).unwrap();
            assert_eq!(img, DisplacementIndex::single(1, 0));
            assert!((phase - ONE).norm() < 1e-12);
            // F† X F = Z^{−1}
            let (img, _) = conjugate_index(&f, &g, &DisplacementIndex::single(1, 0)).unwrap();
            assert_eq!(img, DisplacementIndex::single(0, d - 1));
        }
    }

    #[test]
    fn identity_conjugation() {
        let g = WhGroup::single(3).unwrap();
        let id = CliffordElement {
            matrix: ComplexMatrix::identity(3),
            label: "I".into(),
        };
        for a in g.indices() {
            let (img, phase) = conjugate_index(&id, &g, &a).unwrap();
            assert_eq!(img, a);
            assert!((phase - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn random_unitary_is_not_clifford() {
        let g = WhGroup::single(3).unwrap();
        // Gram-Schmidt on three random vectors
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for seed in 0..3 {
            let mut v = haar_random_state(3, 500 + seed).unwrap().amplitudes().to_vec();
            for c in &cols {
                let ip: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= ip * y;
                }
            }
            cols.push(PureState::normalized(v).unwrap().amplitudes().to_vec());
        }
        let u = CliffordElement {
            matrix: ComplexMatrix::from_fn(3, 3, |r, c| cols[c][r]),
            label: "U".into(),
        };
        assert!(u.matrix.is_unitary(1e-12));
        assert!(matches!(
            conjugate_index(&u, &g, &DisplacementIndex::single(1, 0)),
            Err(Error::NoMatch(_))
        ));
        assert!(!is_clifford(&u, &g));
    }

    #[test]
    fn generators_normalize_the_group() {
        for factors in [vec![2], vec![3], vec![4], vec![5], vec![2, 2], vec![2, 3]] {
            let g = WhGroup::from_factors(&factors).unwrap();
            for c in generators(&g) {
                assert!(c.matrix.is_unitary(1e-10), "{}", c.label);
                let images: HashSet<DisplacementIndex> = g
                    .indices()
                    .map(|a| conjugate_index(&c, &g, &a).unwrap().0)
                    .collect();
                assert_eq!(images.len(), g.size(), "{} is not a bijection", c.label);
            }
        }
        let g = WhGroup::from_factors(&[2, 2]).unwrap();
        assert!(generators(&g).iter().any(|c| c.label == "SWAP[0,1]"));
        let g = WhGroup::from_factors(&[2, 3]).unwrap();
        assert!(!generators(&g).iter().any(|c| c.label.starts_with("SWAP")));
    }

    #[test]
    fn generators_preserve_stabilizer_states() {
        for d in [2, 3, 5] {
            let g = WhGroup::single(d).unwrap();
            let stabs = enumerate_stabilizer_states(&g).unwrap();
            for c in generators(&g) {
                for s in &stabs {
                    let moved = c.apply(&s.state).unwrap();
                    let hit = stabs
                        .iter()
                        .any(|t| fidelity(&t.state, &moved).unwrap() > 1.0 - 1e-9);
                    assert!(hit, "{} maps a stabilizer state outside the set", c.label);
                }
            }
        }
    }

    #[test]
    fn entropy_is_clifford_invariant() {
        for d in [2, 3, 5] {
            let g = WhGroup::single(d).unwrap();
            let gens = generators(&g);
            for seed in 0..5 {
                let psi = haar_random_state(d, seed).unwrap();
                for c in &gens {
                    let moved = c.apply(&psi).unwrap();
                    for alpha in [2.0, 3.0] {
                        let a = stabilizer_entropy(&g, &psi, alpha).unwrap().value;
                        let b = stabilizer_entropy(&g, &moved, alpha).unwrap().value;
                        assert!((a - b).abs() < 1e-10);
                    }
                }
            }
        }
    }
}
