use serde::Serialize;

use super::{Representation, Superintegrable2D};
use crate::error::{Error, Result};
use crate::spectral::SpectrumReport1D;

#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyRow {
    pub energy: f64,
    pub observed: usize,
    pub predicted: usize,
    pub p: Vec<usize>,
    pub u: Vec<f64>,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyReport {
    pub e_cut: f64,
    pub tolerance: f64,
    pub rows: Vec<DegeneracyRow>,
    pub mismatches: usize,
}

/// Compares tensor-sum multiplicities `E₁ᵢ + E₂ⱼ < E_cut` with the module
/// dimensions predicted at the same energies.
pub fn verify_degeneracies(
    sys: &Superintegrable2D,
    reps: &[Representation],
    spectra: [&SpectrumReport1D; 2],
    e_cut: f64,
) -> Result<DegeneracyReport> {
    let [s1, s2] = spectra;
    for (s, m) in spectra.iter().zip(&sys.factors) {
        if s.model != m.tag || s.params != m.params {
            return Err(Error::DomainMismatch(format!("spectrum of '{}' does not belong to factor '{}'", s.model, m.tag)));
        }
    }
    let lo = |s: &SpectrumReport1D| s.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = |s: &SpectrumReport1D| s.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // every level below the cut must be resolved in both factors
    for (a, b) in [(s1, s2), (s2, s1)] {
        if hi(a) + lo(b) < e_cut {
            let need = a.eigenvalues.iter().filter(|e| **e + lo(b) < e_cut).count() + 1;
            return Err(Error::DepthInsufficient {
                needed: need,
                available: a.eigenvalues.len(),
            });
        }
    }
    let err = s1.errors.iter().chain(&s2.errors).copied().fold(0.0, f64::max);
    let tol = (1e-4_f64).max(10.0 * err);
    let mut sums: Vec<f64> = s1
        .eigenvalues
        .iter()
        .flat_map(|a| s2.eigenvalues.iter().map(move |b| a + b))
        .filter(|e| *e < e_cut)
        .collect();
    sums.sort_by(f64::total_cmp);
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for e in sums {
        match clusters.last_mut() {
            Some((c, n)) if (e - *c).abs() < tol => {
                *c = (*c * *n as f64 + e) / (*n + 1) as f64;
                *n += 1;
            }
            _ => clusters.push((e, 1)),
        }
    }
    let mut rows: Vec<DegeneracyRow> = clusters
        .iter()
        .map(|&(e, observed)| {
            let hits: Vec<&Representation> = reps.iter().filter(|r| (r.energy - e).abs() < tol).collect();
            DegeneracyRow {
                energy: e,
                observed,
                predicted: hits.iter().map(|r| r.dimension).sum(),
                p: hits.iter().map(|r| r.p).collect(),
                u: hits.iter().map(|r| r.u).collect(),
                residuals: hits.iter().map(|r| r.residual).collect(),
            }
        })
        .collect();
    // modules predicted where no level exists
    for r in reps.iter().filter(|r| r.energy < e_cut) {
        if !clusters.iter().any(|(e, _)| (r.energy - e).abs() < tol) {
            rows.push(DegeneracyRow {
                energy: r.energy,
                observed: 0,
                predicted: r.dimension,
                p: vec![r.p],
                u: vec![r.u],
                residuals: vec![r.residual],
            });
        }
    }
    rows.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mismatches = rows.iter().filter(|r| r.observed != r.predicted).count();
    Ok(DegeneracyReport {
        e_cut,
        tolerance: tol,
        rows,
        mismatches,
    })
}
