//! Search for maximal-magic states.
//!
//! Maximizing `M_2` over unit vectors is the same as minimizing
//! `f(φ) = Σ_{a≠0} |⟨φ|D_a|φ⟩|⁴`, since `M_2(φ) = −log((1 + f(φ))/d)`. The
//! minimum `(d−1)/(d+1)` is attained exactly by Weyl-Heisenberg SIC
//! fiducials. Because `Σ_{a≠0} |⟨φ|D_a|φ⟩|² = d − 1` on the sphere,
//! `f − (d−1)/(d+1)` is the squared distance of the overlaps from `1/(d+1)`,
//! so the fiducial residual is at most the square root of the objective gap.
//! The descent evaluates that gap directly as a sum of squares: near a
//! minimum `f − (d−1)/(d+1)` cancels to below the rounding error of `f`,
//! while the sum of squares keeps full relative precision.
//!
//! Each restart runs projected gradient descent on the sphere. A step moves
//! along the tangent component of the Euclidean gradient and is renormalized;
//! Armijo backtracking decides acceptance. Restarts are independent and run in fixed
//! batches so the outcome does not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::magic::{magic_bound, stabilizer_entropy};
use crate::sic::{fiducial_residual, FiducialRecord, FiducialSource};
use crate::states::{haar_random_state, PureState, ZERO};
use crate::wh_group::{Factorization, WhGroup};

pub const ARMIJO_C: f64 = 1e-4;
pub const BACKTRACK_SHRINK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;
const MIN_STEP: f64 = 1e-12;
const MAX_STEP: f64 = 1e3;
const INITIAL_STEP: f64 = 0.1;

/// Restarts launched together before checking for convergence.
pub const RESTART_BATCH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    #[serde(serialize_with = "ser_factors")]
    pub factorization: Factorization,
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub target_gap_tol: f64,
    pub seed: u64,
}

fn ser_factors<S: serde::Serializer>(f: &Factorization, s: S) -> std::result::Result<S::Ok, S::Error> {
    f.factors().serialize(s)
}

impl SearchConfig {
    /// Defaults: 20 restarts, 5000 iterations, gradient tolerance `1e-10`,
    /// objective-gap tolerance `1e-12`, seed 0.
    pub fn new(factorization: Factorization) -> Self {
        Self {
            factorization,
            restarts: 20,
            max_iters: 5000,
            grad_tol: 1e-10,
            target_gap_tol: 1e-12,
            seed: 0,
        }
    }

    pub fn single(d: usize) -> Result<Self> {
        Ok(Self::new(Factorization::single(d)?))
    }

    pub fn dim(&self) -> usize {
        self.factorization.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::Parse("restarts and max_iters must be positive".into()));
        }
        if !(self.grad_tol > 0.0 && self.target_gap_tol > 0.0) {
            return Err(Error::Parse("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `(d−1)/(d+1)`, the minimum of the objective.
pub fn target(d: usize) -> f64 {
    (d as f64 - 1.0) / (d as f64 + 1.0)
}

/// `Σ_{a≠0} |⟨φ|D_a|φ⟩|⁴`.
pub fn objective(g: &WhGroup, phi: &PureState) -> Result<f64> {
    g.check_state(phi)?;
    Ok(objective_raw(g, phi.amplitudes()))
}

/// `f(φ) − (d−1)/(d+1)`, evaluated as `Σ_{a≠0} (|⟨φ|D_a|φ⟩|² − 1/(d+1))²`.
pub fn objective_gap(g: &WhGroup, phi: &PureState) -> Result<f64> {
    g.check_state(phi)?;
    Ok(gap_raw(g, phi.amplitudes()))
}

fn gap_raw(g: &WhGroup, v: &[Complex64]) -> f64 {
    let level = 1.0 / (g.dim() as f64 + 1.0);
    (1..g.size())
        .map(|l| {
            let r = g.expectation_at(l, v).norm_sqr() - level;
            r * r
        })
        .sum()
}

fn objective_raw(g: &WhGroup, v: &[Complex64]) -> f64 {
    (1..g.size())
        .map(|l| {
            let p = g.expectation_at(l, v).norm_sqr();
            p * p
        })
        .sum()
}

/// Objective and complex gradient `G_j = ∂f/∂Re v_j + i ∂f/∂Im v_j` of the
/// homogeneous extension of `f` to all of `ℂ^d`.
///
/// `∂f/∂v̄ = Σ_a 2|c_a|²(c̄_a D_a v + c_a D_a† v)` with `c_a = v†D_a v`; the
/// two halves coincide after summing over `±a`, which gives
/// `G = 8 Σ_{a≠0} |c_a|² c̄_a D_a v`.
fn objective_and_gradient(g: &WhGroup, v: &[Complex64]) -> (f64, Vec<Complex64>) {
    let mut f = 0.0;
    let mut grad = vec![ZERO; v.len()];
    for l in 1..g.size() {
        let dv = g.apply_at(l, v);
        let c: Complex64 = v.iter().zip(&dv).map(|(x, y)| x.conj() * y).sum();
        let p = c.norm_sqr();
        f += p * p;
        let w = c.conj() * (8.0 * p);
        for (gj, &dj) in grad.iter_mut().zip(&dv) {
            *gj += w * dj;
        }
    }
    (f, grad)
}

fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Euclidean gradient of the objective with respect to the `2d` real
/// coordinates, interleaved as `[Re φ₀, Im φ₀, Re φ₁, Im φ₁, …]`, before any
/// projection onto the sphere.
pub fn gradient(g: &WhGroup, phi: &PureState) -> Result<Vec<f64>> {
    g.check_state(phi)?;
    Ok(to_real(&objective_and_gradient(g, phi.amplitudes()).1))
}

/// Removes the radial component `Re⟨φ, G⟩ φ` from an interleaved real
/// gradient.
pub fn project_tangent(phi: &PureState, grad: &[f64]) -> Vec<f64> {
    let x = to_real(phi.amplitudes());
    let radial: f64 = x.iter().zip(grad).map(|(a, b)| a * b).sum();
    grad.iter().zip(&x).map(|(g, x)| g - radial * x).collect()
}

fn tangent(v: &[Complex64], grad: &[Complex64]) -> Vec<Complex64> {
    let radial: f64 = v.iter().zip(grad).map(|(a, b)| (a.conj() * b).re).sum();
    grad.iter().zip(v).map(|(g, x)| g - x * radial).collect()
}

fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

fn real_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

fn retract(v: &[Complex64], dir: &[Complex64], step: f64) -> Vec<Complex64> {
    let moved: Vec<Complex64> = v.iter().zip(dir).map(|(x, d)| x - d * step).collect();
    let n = norm_sqr(&moved).sqrt();
    moved.into_iter().map(|c| c / n).collect()
}

/// Why a single descent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetGap,
    GradientNorm,
    LineSearch,
    MaxIters,
}

/// Result of one projected-gradient descent.
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub state: PureState,
    pub objective: f64,
    /// `objective − target`, from the sum-of-squares form.
    pub gap: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub stop: StopReason,
    /// Gap after each accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

/// Projected gradient descent with Armijo backtracking from `start`.
///
/// The trial step starts from the Barzilai-Borwein estimate of the previous
/// iteration and is halved until `h(R(φ − t g)) ≤ h(φ) − c t ‖g‖²`, where `R`
/// renormalizes and `h` is the objective gap. On the sphere `h` and `f` differ
/// by a constant, so their tangent gradients agree.
pub fn optimize_from(g: &WhGroup, start: &PureState, config: &SearchConfig) -> Result<RestartOutcome> {
    g.check_state(start)?;
    let mut v = start.amplitudes().to_vec();
    let mut f = gap_raw(g, &v);
    let (_, full) = objective_and_gradient(g, &v);
    let mut grad = tangent(&v, &full);
    let mut history = vec![f];
    let mut step = INITIAL_STEP;
    let mut iterations = 0;
    let stop = loop {
        let gn2 = norm_sqr(&grad);
        if f < config.target_gap_tol {
            break StopReason::TargetGap;
        }
        if gn2.sqrt() < config.grad_tol {
            break StopReason::GradientNorm;
        }
        if iterations >= config.max_iters {
            break StopReason::MaxIters;
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = retract(&v, &grad, t);
            let ft = gap_raw(g, &trial);
            if ft <= f - ARMIJO_C * t * gn2 {
                accepted = Some((trial, ft));
                break;
            }
            t *= BACKTRACK_SHRINK;
            if t < MIN_STEP {
                break;
            }
        }
        let Some((next, f_next)) = accepted else {
            break StopReason::LineSearch;
        };
        debug_assert!(f_next <= f);
        log::trace!("iter {iterations}: gap {f_next:.6e} step {t:e} accepted");
        let (_, full) = objective_and_gradient(g, &next);
        let next_grad = tangent(&next, &full);
        // Barzilai-Borwein guess for the next trial step
        let s: Vec<Complex64> = next.iter().zip(&v).map(|(a, b)| a - b).collect();
        let y: Vec<Complex64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = real_dot(&s, &y);
        step = if sy > 0.0 {
            (norm_sqr(&s) / sy).clamp(MIN_STEP, MAX_STEP)
        } else {
            (2.0 * t).min(MAX_STEP)
        };
        v = next;
        f = f_next;
        grad = next_grad;
        history.push(f);
        iterations += 1;
    };
    Ok(RestartOutcome {
        objective: objective_raw(g, &v),
        state: PureState::from_unit_unchecked(v),
        gap: f,
        iterations,
        grad_norm: norm_sqr(&grad).sqrt(),
        stop,
        history,
    })
}

/// Best state over the executed restarts, with both certificates: the
/// entropy gap to the bound and the fiducial residual.
#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    #[serde(skip)]
    pub best_state: PureState,
    pub objective: f64,
    pub target: f64,
    pub objective_gap: f64,
    pub sic_residual: f64,
    pub entropy_at_2: f64,
    pub bound_at_2: f64,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl SearchResult {
    pub fn entropy_gap(&self) -> f64 {
        self.bound_at_2 - self.entropy_at_2
    }

    pub fn to_record(&self, factorization: &Factorization) -> Result<FiducialRecord> {
        FiducialRecord::new(
            factorization.clone(),
            self.best_state.clone(),
            FiducialSource::Search,
        )
    }
}

fn run_range(
    g: &WhGroup,
    config: &SearchConfig,
    range: std::ops::Range<usize>,
) -> Result<Vec<RestartOutcome>> {
    range
        .into_par_iter()
        .map(|i| {
            let start = haar_random_state(g.dim(), config.seed.wrapping_add(i as u64))?;
            let mut out = optimize_from(g, &start, config)?;
            out.history = Vec::new();
            Ok(out)
        })
        .collect()
}

/// Every restart of `config`, in restart order, with no early stop. Restart
/// `i` starts from the Haar-random state seeded `seed + i`.
pub fn run_restarts(config: &SearchConfig) -> Result<Vec<RestartOutcome>> {
    config.validate()?;
    let g = WhGroup::new(config.factorization.clone());
    run_range(&g, config, 0..config.restarts)
}

/// Multi-restart search from Haar-random starts seeded `seed + i`.
///
/// Restarts run in batches of [`RESTART_BATCH`]; after a batch containing a
/// converged restart no further batches start. The smallest gap wins, the
/// lowest restart index breaking ties.
pub fn find_fiducial(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let g = WhGroup::new(config.factorization.clone());
    let d = g.dim();
    let goal = target(d);
    let mut outcomes: Vec<RestartOutcome> = Vec::new();
    let mut next = 0;
    while next < config.restarts {
        let end = (next + RESTART_BATCH).min(config.restarts);
        let batch = run_range(&g, config, next..end)?;
        let done = batch.iter().any(|o| o.gap < config.target_gap_tol);
        outcomes.extend(batch);
        next = end;
        if done {
            break;
        }
    }

    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .fold(None::<(usize, &RestartOutcome)>, |acc, (i, o)| match acc {
            Some((_, b)) if b.gap <= o.gap => acc,
            _ => Some((i, o)),
        })
        .expect("at least one restart");
    log::debug!(
        "search {}: best restart {best_restart} f={:.6e} stop={:?}",
        config.factorization,
        best.objective,
        best.stop
    );

    let best_state = best.state.canonical_phase();
    Ok(SearchResult {
        objective: best.objective,
        target: goal,
        sic_residual: fiducial_residual(&g, &best_state)?,
        entropy_at_2: stabilizer_entropy(&g, &best_state, 2.0)?.value,
        bound_at_2: magic_bound(d, 2.0)?,
        restarts_used: outcomes.len(),
        best_restart,
        iterations: best.iterations,
        objective_gap: best.gap,
        converged: best.gap < config.target_gap_tol,
        best_state,
    })
}
