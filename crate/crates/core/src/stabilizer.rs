//! Pure stabilizer states and stabilizer projectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{fidelity, tensor, ComplexMatrix, PureState, ONE};
use crate::wh_group::{DisplacementIndex, Factorization, WhGroup};

/// Tolerance for the projector checks.
pub const PROJECTOR_TOL: f64 = 1e-9;

/// Two states closer than this in `1 − |⟨a|b⟩|²` are the same ray.
pub const DEDUP_TOL: f64 = 1e-9;

/// A maximal set of `d` commuting displacement indices with a phase per
/// member. The phases are the eigenvalues the stabilized state carries,
/// `D_a|M⟩ = phase_a|M⟩`. Members are kept in ascending linear order.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicSubset {
    factorization: Factorization,
    indices: Vec<DisplacementIndex>,
    phases: Vec<Complex64>,
}

impl IsotropicSubset {
    /// All phases set to one.
    pub fn new(g: &WhGroup, indices: Vec<DisplacementIndex>) -> Result<Self> {
        let n = indices.len();
        Self::with_phases(g, indices, vec![ONE; n])
    }

    pub fn with_phases(g: &WhGroup, indices: Vec<DisplacementIndex>, phases: Vec<Complex64>) -> Result<Self> {
        if indices.len() != phases.len() {
            return Err(Error::InvalidSubset(format!(
                "{} indices but {} phases",
                indices.len(),
                phases.len()
            )));
        }
        if let Some(p) = phases.iter().find(|p| (p.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidSubset(format!("phase {p} is not unimodular")));
        }
        let mut keyed = Vec::with_capacity(indices.len());
        for (a, p) in indices.into_iter().zip(phases) {
            keyed.push((g.linear_index(&a)?, a, p));
        }
        keyed.sort_by_key(|(l, _, _)| *l);
        keyed.dedup_by_key(|(l, _, _)| *l);
        if keyed.len() != g.dim() {
            return Err(Error::InvalidSubset(format!(
                "{} distinct indices, need d = {}",
                keyed.len(),
                g.dim()
            )));
        }
        if keyed[0].0 != 0 {
            return Err(Error::InvalidSubset("zero index missing".into()));
        }
        let members: Vec<usize> = keyed.iter().map(|(l, _, _)| *l).collect();
        for (_, a, _) in &keyed {
            for (_, b, _) in &keyed {
                if !g.commute(a, b)? {
                    return Err(Error::InvalidSubset(format!("{a} and {b} do not commute")));
                }
                let sum = g.linear_index(&g.add(a, b)?)?;
                if members.binary_search(&sum).is_err() {
                    return Err(Error::InvalidSubset(format!("{a} + {b} not in subset")));
                }
            }
        }
        Ok(Self {
            factorization: g.factorization().clone(),
            indices: keyed.iter().map(|(_, a, _)| a.clone()).collect(),
            phases: keyed.iter().map(|(_, _, p)| *p).collect(),
        })
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn indices(&self) -> &[DisplacementIndex] {
        &self.indices
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    fn check_group(&self, g: &WhGroup) -> Result<()> {
        if g.factorization() != &self.factorization {
            return Err(Error::InvalidSubset(format!(
                "subset built for {} used with group {}",
                self.factorization,
                g.factorization()
            )));
        }
        Ok(())
    }
}

/// `(1/d) Σ_{a∈M} conj(phase_a) D_a`, checked to be a rank-1 orthogonal
/// projector. With all phases one this is `(1/d) Σ_{a∈M} D_a`.
pub fn projector_from_subset(g: &WhGroup, s: &IsotropicSubset) -> Result<ComplexMatrix> {
    s.check_group(g)?;
    let d = g.dim();
    let mut p = ComplexMatrix::zeros(d, d);
    for (a, &phase) in s.indices.iter().zip(&s.phases) {
        p = p.add(&g.operator(a)?.scale(phase.conj()))?;
    }
    let p = p.scale(Complex64::new(1.0 / d as f64, 0.0));
    let herm = p.max_abs_diff(&p.adjoint());
    let idem = p.max_abs_diff(&p.matmul(&p)?);
    let trace = (p.trace() - ONE).norm();
    let worst = herm.max(idem).max(trace);
    if worst > PROJECTOR_TOL {
        return Err(Error::NotAProjector(worst));
    }
    Ok(p)
}

/// Unit vector spanning the range of a rank-1 projector: its largest column,
/// normalized, with the canonical global phase.
pub fn state_from_projector(p: &ComplexMatrix) -> Result<PureState> {
    let d = p.rows();
    let col = (0..d)
        .max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re))
        .ok_or(Error::InvalidDimension(0))?;
    PureState::normalized((0..d).map(|r| p[(r, col)]).collect()).map(|s| s.canonical_phase())
}

/// A stabilizer state together with its stabilizing subset, whose phases are
/// the eigenvalues `D_a|M⟩ = phase_a|M⟩`.
#[derive(Debug, Clone)]
pub struct StabilizerState {
    pub state: PureState,
    pub subset: IsotropicSubset,
}

impl StabilizerState {
    /// Largest deviation `‖D_a|M⟩ − phase_a|M⟩‖_∞` over the subset.
    pub fn eigen_residual(&self, g: &WhGroup) -> Result<f64> {
        self.subset.check_group(g)?;
        let mut worst: f64 = 0.0;
        for (a, &phase) in self.subset.indices.iter().zip(&self.subset.phases) {
            let moved = g.displace(a, &self.state)?;
            for (x, y) in moved.amplitudes().iter().zip(self.state.amplitudes()) {
                worst = worst.max((x - phase * y).norm());
            }
        }
        Ok(worst)
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Stabilizer states of a prime qudit: the `d` eigenvectors of `Z`, then for
/// each `m` the `d` eigenvectors of `X Z^m`, each with its generating index.
fn prime_qudit_states(n: usize) -> Vec<(PureState, (usize, usize))> {
    let norm = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(n * (n + 1));
    for k in 0..n {
        out.push((PureState::basis(n, k).expect("k < n"), (0, 1)));
    }
    let two_n = 2 * n as i64;
    let ni = n as i64;
    for m in 0..ni {
        for j in 0..ni {
            // c_k ∝ exp(iπ(m k(k−n) − 2jk)/n)
            let amps = (0..ni)
                .map(|k| {
                    let e = (m * k * (k - ni) - 2 * j * k).rem_euclid(two_n);
                    Complex64::from_polar(norm, std::f64::consts::PI * e as f64 / n as f64)
                })
                .collect();
            out.push((PureState::from_unit_unchecked(amps), (1, m as usize)));
        }
    }
    out
}

/// Every pure stabilizer state of a prime qudit, and for products of primes
/// every tensor product of factor stabilizer states. Deduplicated up to
/// global phase and ordered by stabilizing subset.
pub fn enumerate_stabilizer_states(g: &WhGroup) -> Result<Vec<StabilizerState>> {
    let factors = g.factorization().factors();
    if let Some(&n) = factors.iter().find(|&&n| !is_prime(n)) {
        return Err(Error::UnsupportedDimension(format!(
            "stabilizer enumeration needs prime factors, got {n}"
        )));
    }
    // cartesian product, left factor slowest; each entry carries the
    // per-factor generators of its stabilizing subgroup
    let mut combos: Vec<(PureState, Vec<(usize, usize)>)> =
        vec![(PureState::from_unit_unchecked(vec![ONE]), Vec::new())];
    for &n in factors {
        let local = prime_qudit_states(n);
        combos = combos
            .iter()
            .flat_map(|(s, gens)| {
                local.iter().map(move |(t, gen)| {
                    let mut gens = gens.clone();
                    gens.push(*gen);
                    (tensor(s, t), gens)
                })
            })
            .collect();
    }

    let mut out: Vec<StabilizerState> = Vec::with_capacity(combos.len());
    for (state, gens) in combos {
        let mut duplicate = false;
        for existing in &out {
            if fidelity(&existing.state, &state)? > 1.0 - DEDUP_TOL {
                duplicate = true;
                break;
            }
        }
        if duplicate {
            continue;
        }
        let indices = subset_from_generators(factors, &gens);
        let phases = indices
            .iter()
            .map(|a| {
                let ev = g.expectation_at(g.linear_index(a)?, state.amplitudes());
                Ok(ev / ev.norm())
            })
            .collect::<Result<Vec<_>>>()?;
        let subset = IsotropicSubset::with_phases(g, indices, phases)?;
        out.push(StabilizerState { state, subset });
    }
    out.sort_by(|a, b| a.subset.indices.cmp(&b.subset.indices));
    Ok(out)
}

/// Product of the cyclic subgroups `{t·gen_i}` of each factor.
fn subset_from_generators(factors: &[usize], gens: &[(usize, usize)]) -> Vec<DisplacementIndex> {
    let mut acc: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for (&n, &(g1, g2)) in factors.iter().zip(gens) {
        acc = acc
            .iter()
            .flat_map(|prefix| {
                (0..n).map(move |t| {
                    let mut p = prefix.clone();
                    p.push(((t * g1) % n, (t * g2) % n));
                    p
                })
            })
            .collect();
    }
    acc.into_iter().map(DisplacementIndex::new).collect()
}

/// Number of states [`enumerate_stabilizer_states`] returns.
pub fn stabilizer_count(g: &WhGroup) -> usize {
    g.factorization().factors().iter().map(|&n| n * (n + 1)).product()
}
