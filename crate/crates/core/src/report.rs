//! Named residual checks shared by constructions and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
            passed: residual <= threshold,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual: f64::NAN,
            threshold,
            passed: false,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// First failing check turned into an error.
pub fn require(checks: &[Check]) -> crate::Result<()> {
    match checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(crate::Error::CertificationFailed {
            check: c.name.clone(),
            residual: c.residual,
            tolerance: c.threshold,
        }),
    }
}

/// Uniformly random points in a finite interval, deterministic in `seed`.
pub fn random_points(domain: Interval, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(domain.lo..=domain.hi)).collect()
}

/// `|lhs − rhs| / (1 + max|term|)`: a residual insensitive to the overall size
/// of the terms it balances.
pub fn scaled_residual(lhs: f64, rhs: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(lhs.abs().max(rhs.abs()), |m, t| m.max(t.abs()));
    (lhs - rhs).abs() / (1.0 + scale)
}
