//! Characteristic distributions and stabilizer entropies.
//!
//! All logarithms are natural (nats). `P_a(ψ) = |⟨ψ|D_a|ψ⟩|²/d` sums to one
//! over the `d²` displacement indices, and
//! `M_α(ψ) = log(Σ_a P_a^α)/(1−α) − log d`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{kahan_sum, PureState};
use crate::wh_group::{Factorization, WhGroup};

/// Probabilities below this are treated as exact zeros before raising to a
/// power.
pub const PROB_FLOOR: f64 = 1e-14;

/// Entropies in `[−CLAMP_TOL, 0)` are reported as zero.
pub const CLAMP_TOL: f64 = 1e-9;

/// `P_a(ψ)` over all displacement indices, in the group's linear order.
#[derive(Debug, Clone)]
pub struct CharDistribution {
    factorization: Factorization,
    dim: usize,
    expectations: Vec<Complex64>,
    probs: Vec<f64>,
}

impl CharDistribution {
    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Characteristic function `χ_a = tr(D_a ψ)/d`.
    pub fn chi(&self) -> Vec<Complex64> {
        let d = self.dim as f64;
        self.expectations.iter().map(|&c| c / d).collect()
    }

    /// Raw `⟨ψ|D_a|ψ⟩` values.
    pub fn expectations(&self) -> &[Complex64] {
        &self.expectations
    }

    pub fn total(&self) -> f64 {
        kahan_sum(self.probs.iter().copied())
    }

    /// Rényi entropy of order `alpha` minus `log d`, unclamped.
    fn renyi_offset(&self, alpha: f64) -> f64 {
        let d = self.dim as f64;
        let support = self.probs.iter().copied().filter(|&p| p >= PROB_FLOOR);
        if alpha == 1.0 {
            -kahan_sum(support.map(|p| p * p.ln())) - d.ln()
        } else {
            kahan_sum(support.map(|p| p.powf(alpha))).ln() / (1.0 - alpha) - d.ln()
        }
    }
}

pub fn char_distribution(g: &WhGroup, psi: &PureState) -> Result<CharDistribution> {
    let expectations = g.expectations(psi)?;
    let d = g.dim() as f64;
    let mut probs: Vec<f64> = expectations.iter().map(|c| c.norm_sqr() / d).collect();
    // tr(D_0 ψ) = 1 for a unit vector
    probs[0] = 1.0 / d;
    Ok(CharDistribution {
        factorization: g.factorization().clone(),
        dim: g.dim(),
        expectations,
        probs,
    })
}

/// A stabilizer entropy value together with the maximal-magic bound when the
/// order lies in the bound's range `α ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub alpha: f64,
    pub value: f64,
    pub bound: Option<f64>,
    pub saturation_gap: Option<f64>,
}

impl EntropyReport {
    /// `α = 1` and `α < 2` are diagnostics only.
    pub fn in_bound_scope(&self) -> bool {
        self.bound.is_some()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidAlpha {
            alpha,
            reason: "order must be a finite real ≥ 0",
        });
    }
    Ok(())
}

/// `M_α` from an already computed distribution.
pub fn entropy_of(dist: &CharDistribution, alpha: f64) -> Result<EntropyReport> {
    check_alpha(alpha)?;
    let mut value = dist.renyi_offset(alpha);
    if (-CLAMP_TOL..0.0).contains(&value) {
        value = 0.0;
    }
    let bound = if alpha >= 2.0 && dist.dim >= 2 {
        Some(magic_bound(dist.dim, alpha)?)
    } else {
        None
    };
    Ok(EntropyReport {
        alpha,
        value,
        bound,
        saturation_gap: bound.map(|b| b - value),
    })
}

/// Stabilizer entropy `M_α(ψ)` in nats. `α = 1` uses the Shannon limit.
pub fn stabilizer_entropy(g: &WhGroup, psi: &PureState, alpha: f64) -> Result<EntropyReport> {
    check_alpha(alpha)?;
    entropy_of(&char_distribution(g, psi)?, alpha)
}

/// Largest stabilizer entropy of order `α ≥ 2` in dimension `d`:
/// `log((1 + (d−1)(d+1)^{1−α})/d)/(1−α)`.
pub fn magic_bound(d: usize, alpha: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if !(alpha.is_finite() && alpha >= 2.0) {
        return Err(Error::InvalidAlpha {
            alpha,
            reason: "the maximal-magic bound holds for α ≥ 2",
        });
    }
    let df = d as f64;
    let inner = (1.0 + (df - 1.0) * (df + 1.0).powf(1.0 - alpha)) / df;
    Ok(inner.ln() / (1.0 - alpha))
}
