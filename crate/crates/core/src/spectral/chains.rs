use serde::Serialize;

use super::SpectrumReport1D;
use crate::models::{ZeroMode, ZeroModeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    /// Reaches the top of the computed window; presumed to continue.
    Infinite,
    /// Ends on a normalizable creation zero mode.
    Capped,
    /// Ends inside the window with no zero mode to explain it.
    Interrupted,
}

#[derive(Clone, Debug, Serialize)]
pub struct Chain {
    pub id: usize,
    /// Level indices, bottom first.
    pub levels: Vec<usize>,
    pub bottom: f64,
    pub top: f64,
    pub spacing: f64,
    pub kind: ChainKind,
    /// `singlet`, `doublet` or `triplet` for capped chains of length 1–3.
    pub label: Option<String>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == ChainKind::Infinite
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainDecomposition {
    pub spacing: f64,
    pub chains: Vec<Chain>,
    /// Levels that continued more than one chain within tolerance.
    pub ambiguous: Vec<usize>,
}

impl ChainDecomposition {
    pub fn infinite(&self) -> impl Iterator<Item = &Chain> {
        self.chains.iter().filter(|c| c.is_infinite())
    }

    /// `chain_id` of every level.
    pub fn chain_of(&self, nlevels: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; nlevels];
        for c in &self.chains {
            for &l in &c.levels {
                out[l] = Some(c.id);
            }
        }
        out
    }
}

fn match_tol(errors: &[f64], a: usize, b: usize) -> f64 {
    (1e-3_f64).max(10.0 * errors[a].max(errors[b]))
}

/// Partitions the levels into maximal arithmetic chains of step `ħω`.
///
/// Levels are visited bottom-up; each joins the chain whose top lies one step
/// below it. A level that could continue several chains is flagged and
/// attached to the closest.
pub fn classify_chains(report: &SpectrumReport1D, zero_modes: &[ZeroMode]) -> ChainDecomposition {
    let e = &report.eigenvalues;
    let step = report.spacing;
    let mut order: Vec<usize> = (0..e.len()).collect();
    order.sort_by(|&a, &b| e[a].total_cmp(&e[b]));
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut ambiguous = Vec::new();
    for &l in &order {
        let mut fits: Vec<(f64, usize)> = chains
            .iter()
            .enumerate()
            .filter_map(|(c, members)| {
                let top = *members.last().unwrap();
                let gap = (e[l] - e[top] - step).abs();
                (gap < match_tol(&report.errors, l, top)).then_some((gap, c))
            })
            .collect();
        fits.sort_by(|a, b| a.0.total_cmp(&b.0));
        if fits.len() > 1 {
            ambiguous.push(l);
        }
        match fits.first() {
            Some(&(_, c)) => chains[c].push(l),
            None => chains.push(vec![l]),
        }
    }
    let e_max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let caps: Vec<f64> = zero_modes
        .iter()
        .filter(|z| z.kind == ZeroModeKind::Creation && z.normalizable)
        .map(|z| z.energy)
        .collect();
    let chains = chains
        .into_iter()
        .enumerate()
        .map(|(id, levels)| {
            let bottom = e[levels[0]];
            let top_l = *levels.last().unwrap();
            let top = e[top_l];
            let tol = match_tol(&report.errors, top_l, top_l);
            let kind = if caps.iter().any(|c| (c - top).abs() < tol) {
                ChainKind::Capped
            } else if top + step > e_max + tol {
                ChainKind::Infinite
            } else {
                ChainKind::Interrupted
            };
            let label = match (kind, levels.len()) {
                (ChainKind::Capped, 1) => Some("singlet".to_string()),
                (ChainKind::Capped, 2) => Some("doublet".to_string()),
                (ChainKind::Capped, 3) => Some("triplet".to_string()),
                _ => None,
            };
            Chain {
                id,
                levels,
                bottom,
                top,
                spacing: step,
                kind,
                label,
            }
        })
        .collect();
    ChainDecomposition {
        spacing: step,
        chains,
        ambiguous,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroModeMatch {
    pub kind: ZeroModeKind,
    pub branch: u8,
    pub energy: f64,
    pub normalizable: bool,
    /// Nearest computed level and its distance.
    pub nearest: Option<(usize, f64)>,
}

/// Nearest eigenvalue to every zero-mode energy.
pub fn match_zero_modes(report: &SpectrumReport1D, zero_modes: &[ZeroMode]) -> Vec<ZeroModeMatch> {
    zero_modes
        .iter()
        .map(|z| ZeroModeMatch {
            kind: z.kind,
            branch: z.branch,
            energy: z.energy,
            normalizable: z.normalizable,
            nearest: report
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(i, e)| (i, (e - z.energy).abs()))
                .min_by(|a, b| a.1.total_cmp(&b.1)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::GridSpec;

    fn synthetic(levels: &[f64]) -> SpectrumReport1D {
        SpectrumReport1D {
            model: "synthetic".into(),
            params: Default::default(),
            hbar: 1.0,
            spacing: 1.0,
            grid: GridSpec::new(0.0, 1.0, 200),
            eigenvalues: levels.to_vec(),
            errors: vec![0.0; levels.len()],
            orthonormality_defect: 0.0,
            x: vec![],
            eigenfunctions: vec![],
        }
    }

    fn cap(energy: f64) -> ZeroMode {
        ZeroMode {
            kind: ZeroModeKind::Creation,
            branch: 1,
            energy,
            normalizable: true,
            ladder_residual: 0.0,
            ladder_relative: 0.0,
            eigen_residual: 0.0,
            x: vec![],
            psi: vec![],
        }
    }

    #[test]
    fn arithmetic_partition_with_caps() {
        let r = synthetic(&[0.0, 1.0, 5.0, 6.0, 7.0]);
        let d = classify_chains(&r, &[cap(1.0), cap(7.0)]);
        let got: Vec<(Vec<usize>, Option<&str>)> = d.chains.iter().map(|c| (c.levels.clone(), c.label.as_deref())).collect();
        assert_eq!(got, vec![(vec![0, 1], Some("doublet")), (vec![2, 3, 4], Some("triplet"))]);
        // without caps the lower chain is interrupted and the upper one open
        let d = classify_chains(&r, &[]);
        assert_eq!(d.chains[0].kind, ChainKind::Interrupted);
        assert_eq!(d.chains[1].kind, ChainKind::Infinite);
    }

    #[test]
    fn level_fitting_two_chains_is_flagged() {
        // 0 and 0.0005 both sit one step below 1.0
        let r = synthetic(&[0.0, 0.0005, 1.0]);
        let d = classify_chains(&r, &[]);
        assert_eq!(d.ambiguous, vec![2]);
    }

    #[test]
    fn degenerate_levels_feed_separate_chains() {
        let r = synthetic(&[0.0, 0.0, 1.0, 1.0, 2.0]);
        let d = classify_chains(&r, &[]);
        assert_eq!(d.chains.len(), 2);
        assert_eq!(d.chains[0].levels, vec![0, 2, 4]);
        assert_eq!(d.chains[1].levels, vec![1, 3]);
        // equal tops make each continuation genuinely ambiguous
        assert_eq!(d.ambiguous, vec![2, 4]);
    }
}
