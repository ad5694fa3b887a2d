//! SIC verification and the `K_α` orthogonality functional on state sets.
//! Also home to Weyl-Heisenberg orbits and the file-backed fiducial catalog.
//!
//! A SIC in dimension `d` is a set of `d²` unit vectors with
//! `|⟨φ_i|φ_j⟩|² = 1/(d+1)` for `i ≠ j`. Sums over pairs are evaluated row by
//! row (in parallel) with compensated accumulation, then combined in row
//! order, so results do not depend on the thread count.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magic::stabilizer_entropy;
use crate::states::{inner_slices, kahan_sum, KahanSum, PureState};
use crate::wh_group::{Factorization, WhGroup};

/// Allowed disagreement between a stored and a recomputed `sic_residual`.
pub const RESIDUAL_MATCH_TOL: f64 = 1e-10;

/// An ordered set of pure states of a common dimension. Repeated members are
/// allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    states: Vec<PureState>,
}

impl StateSet {
    pub fn new(states: Vec<PureState>) -> Result<Self> {
        let dim = states
            .first()
            .map(PureState::dim)
            .ok_or(Error::InvalidDimension(0))?;
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { dim, states })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    fn require_square_cardinality(&self) -> Result<()> {
        let expected = self.dim * self.dim;
        if self.len() != expected {
            return Err(Error::CardinalityMismatch {
                expected,
                found: self.len(),
            });
        }
        Ok(())
    }

    /// `|⟨φ_i|φ_j⟩|²` for `j` in `0..m`.
    fn overlap_row(&self, i: usize) -> Vec<f64> {
        let a = self.states[i].amplitudes();
        self.states
            .iter()
            .map(|s| inner_slices(a, s.amplitudes()).expect("equal dims").norm_sqr())
            .collect()
    }

    /// Sum over rows of `row_term(i, overlaps_i)`, rows in parallel.
    fn row_sum(&self, row_term: impl Fn(usize, &[f64]) -> f64 + Sync) -> f64 {
        let rows: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|i| row_term(i, &self.overlap_row(i)))
            .collect();
        kahan_sum(rows)
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::InvalidAlpha {
            alpha,
            reason: "the orthogonality functional is defined for real α ≥ 1",
        });
    }
    Ok(())
}

/// `K_α = Σ_{i≠j} |⟨φ_i|φ_j⟩|^{4α}` over a set of `d²` states.
pub fn k_alpha(v: &StateSet, alpha: f64) -> Result<f64> {
    check_order(alpha)?;
    v.require_square_cardinality()?;
    let exponent = 2.0 * alpha;
    Ok(v.row_sum(|i, row| {
        let mut acc = KahanSum::default();
        for (j, &x) in row.iter().enumerate() {
            if j != i {
                acc.add(x.powf(exponent));
            }
        }
        acc.value()
    }))
}

/// Lower bound `d²(d−1)/(d+1)^{2α−1}` on `K_α` for `d²` unit vectors.
pub fn k_alpha_bound(d: usize, alpha: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    check_order(alpha)?;
    let d = d as f64;
    Ok(d * d * (d - 1.0) / (d + 1.0).powf(2.0 * alpha - 1.0))
}

/// Frame potential `F_t = Σ_{j,k} |⟨φ_j|φ_k⟩|^{2t}` over all ordered pairs,
/// diagonal included. Any cardinality.
pub fn frame_potential(v: &StateSet, t: u32) -> Result<f64> {
    if t == 0 {
        return Err(Error::Parse("frame potential order t must be ≥ 1".into()));
    }
    let t = t as i32;
    Ok(v.row_sum(|_, row| kahan_sum(row.iter().map(|x| x.powi(t)))))
}

/// The `d²` states `D_a|φ⟩` in ascending index order.
pub fn wh_orbit(g: &WhGroup, phi: &PureState) -> Result<StateSet> {
    g.check_state(phi)?;
    let states = (0..g.size())
        .map(|l| PureState::from_unit_unchecked(g.apply_at(l, phi.amplitudes())))
        .collect();
    StateSet::new(states)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SicReport {
    pub is_sic: bool,
    pub max_residual: f64,
}

/// Largest `||⟨φ_i|φ_j⟩|² − 1/(d+1)|` over `i ≠ j`; a SIC when at most `tol`.
pub fn verify_sic(v: &StateSet, tol: f64) -> Result<SicReport> {
    v.require_square_cardinality()?;
    let target = 1.0 / (v.dim() as f64 + 1.0);
    let rows: Vec<f64> = (0..v.len())
        .into_par_iter()
        .map(|i| {
            v.overlap_row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &x)| (x - target).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let max_residual = rows.into_iter().fold(0.0, f64::max);
    Ok(SicReport {
        is_sic: max_residual <= tol,
        max_residual,
    })
}

/// Largest `||⟨φ|D_a|φ⟩|² − 1/(d+1)|` over `a ≠ 0`: zero exactly for a
/// Weyl-Heisenberg covariant SIC fiducial.
pub fn fiducial_residual(g: &WhGroup, phi: &PureState) -> Result<f64> {
    let target = 1.0 / (g.dim() as f64 + 1.0);
    Ok(g.expectations(phi)?
        .iter()
        .skip(1)
        .map(|c| (c.norm_sqr() - target).abs())
        .fold(0.0, f64::max))
}

/// Both sides of the orbit identity `K_α[D_φ] = d³ e^{(1−2α) M_{2α}(φ)} − d²`:
/// the left by the direct double sum over the orbit, the right from the
/// stabilizer entropy.
pub fn orbit_identity_sides(g: &WhGroup, phi: &PureState, alpha: f64) -> Result<(f64, f64)> {
    check_order(alpha)?;
    let lhs = k_alpha(&wh_orbit(g, phi)?, alpha)?;
    let m = stabilizer_entropy(g, phi, 2.0 * alpha)?.value;
    let d = g.dim() as f64;
    let rhs = d.powi(3) * ((1.0 - 2.0 * alpha) * m).exp() - d * d;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiducialSource {
    Catalog,
    Search,
    User,
}

/// A candidate or verified fiducial vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FiducialRecord {
    pub factorization: Factorization,
    pub vector: PureState,
    pub sic_residual: f64,
    pub source: FiducialSource,
    /// False when the stored residual disagreed with the recomputed one on
    /// load.
    pub trusted: bool,
}

impl FiducialRecord {
    /// Computes the residual for `vector` under the group of `factorization`.
    pub fn new(factorization: Factorization, vector: PureState, source: FiducialSource) -> Result<Self> {
        let g = WhGroup::new(factorization.clone());
        let sic_residual = fiducial_residual(&g, &vector)?;
        Ok(Self {
            factorization,
            vector,
            sic_residual,
            source,
            trusted: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.factorization.dim()
    }

    pub fn group(&self) -> WhGroup {
        WhGroup::new(self.factorization.clone())
    }

    /// One catalog line, without the trailing newline.
    pub fn to_json_line(&self) -> Result<String> {
        let line = RecordLine {
            dim: self.dim(),
            factors: self.factorization.factors().to_vec(),
            vector: encode_amplitudes(self.vector.amplitudes()),
            sic_residual: self.sic_residual,
            source: self.source,
        };
        Ok(serde_json::to_string(&line)?)
    }

    /// Parses a catalog line and re-verifies the residual.
    pub fn from_json_line(line: &str) -> Result<Self> {
        let raw: RecordLine = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
        let factorization = Factorization::new(raw.factors.clone())?;
        if factorization.dim() != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                found: factorization.dim(),
            });
        }
        let amps = decode_amplitudes(&raw.vector)?;
        if amps.len() != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                found: amps.len(),
            });
        }
        // keep stored bits when already unit norm so round trips are lossless
        let vector = PureState::new(amps.clone()).or_else(|_| PureState::normalized(amps))?;
        let mut record = Self::new(factorization, vector, raw.source)?;
        let stored = raw.sic_residual;
        // NaN in the stored field counts as a mismatch
        let matches = (stored - record.sic_residual).abs() <= RESIDUAL_MATCH_TOL;
        if !matches {
            log::warn!(
                "stored sic_residual {stored:e} disagrees with recomputed {:e}; record marked untrusted",
                record.sic_residual
            );
            record.trusted = false;
        }
        Ok(record)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordLine {
    dim: usize,
    factors: Vec<usize>,
    vector: Vec<[String; 2]>,
    sic_residual: f64,
    source: FiducialSource,
}

/// Amplitudes as `[re, im]` decimal strings with 17 significant digits.
pub fn encode_amplitudes(amps: &[Complex64]) -> Vec<[String; 2]> {
    amps.iter()
        .map(|c| [format!("{:.16e}", c.re), format!("{:.16e}", c.im)])
        .collect()
}

pub fn decode_amplitudes(raw: &[[String; 2]]) -> Result<Vec<Complex64>> {
    raw.iter()
        .map(|[re, im]| {
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("amplitude {s:?}: {e}")))
            };
            Ok(Complex64::new(parse(re)?, parse(im)?))
        })
        .collect()
}

/// Reads a line-delimited catalog. Blank lines are skipped.
pub fn catalog_load(path: impl AsRef<Path>) -> Result<Vec<FiducialRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = FiducialRecord::from_json_line(&line).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("line {}: {msg}", n + 1)),
            other => other,
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes (truncating) a catalog file.
pub fn catalog_save(records: &[FiducialRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        writeln!(w, "{}", r.to_json_line()?)?;
    }
    w.flush()?;
    Ok(())
}

/// Appends one record to a catalog file, creating it if needed.
pub fn catalog_append(record: &FiducialRecord, path: impl AsRef<Path>) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{}", record.to_json_line()?)?;
    Ok(())
}

/// Qubit fiducial with Bloch vector `(1,1,1)/√3`.
pub fn qubit_fiducial() -> PureState {
    let theta = (1.0 / 3.0f64.sqrt()).acos();
    PureState::normalized(vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), std::f64::consts::FRAC_PI_4),
    ])
    .expect("nonzero")
}

/// Qutrit fiducial `(0, 1, −1)/√2`.
pub fn qutrit_fiducial() -> PureState {
    PureState::normalized(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ])
    .expect("nonzero")
}

/// Fiducials shipped with the library: `d = 2` and `d = 3`.
pub fn builtin_catalog() -> Vec<FiducialRecord> {
    [(2, qubit_fiducial()), (3, qutrit_fiducial())]
        .into_iter()
        .map(|(d, v)| {
            FiducialRecord::new(
                Factorization::single(d).expect("d ≥ 2"),
                v,
                FiducialSource::Catalog,
            )
            .expect("dimensions agree")
        })
        .collect()
}

pub fn catalog_fiducial(d: usize) -> Option<FiducialRecord> {
    builtin_catalog().into_iter().find(|r| r.dim() == d)
}
