//! CSV artifacts.

use std::path::Path;

use superladder_core::diffop::GridSpec;
use superladder_core::models::{ZeroMode, ZeroModeKind};
use superladder_core::spectral::{ChainDecomposition, SpectrumReport1D};
use superladder_core::SmoothFn;

use crate::report::RunContext;

pub type Row = Vec<String>;

/// Shortest round-trip representation, so output is byte-stable; exponent
/// form outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `file` into the run's output directory and lists it in the manifest.
pub fn emit(ctx: &mut RunContext, file: &str, description: &str, header: &[&str], rows: Vec<Row>) {
    let path = ctx.out_dir.join(file);
    let stage = format!("write_{file}");
    if ctx.stage(&stage, || write_csv(&path, header, &rows)).is_some() {
        ctx.artifact(file, rows.len(), description);
    }
}

pub fn potential_rows(v: &SmoothFn, grid: &GridSpec) -> Vec<Row> {
    grid.points().into_iter().map(|x| vec![num(x), num(v.eval(x))]).collect()
}

/// `x` then one column per zero mode.
pub fn zero_mode_table(modes: &[ZeroMode]) -> (Vec<String>, Vec<Row>) {
    let mut header = vec!["x".to_string()];
    header.extend(modes.iter().map(|z| {
        let k = match z.kind {
            ZeroModeKind::Annihilation => "annihilation",
            ZeroModeKind::Creation => "creation",
        };
        format!("psi_{k}_{}", z.branch)
    }));
    let Some(first) = modes.first() else {
        return (header, Vec::new());
    };
    let rows = first
        .x
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut r = vec![num(*x)];
            r.extend(modes.iter().map(|z| num(z.psi[i])));
            r
        })
        .collect();
    (header, rows)
}

/// Distinct energies with multiplicity and the chain of their first level.
pub fn spectrum_rows(report: &SpectrumReport1D, chains: Option<&ChainDecomposition>) -> Vec<Row> {
    let ids = chains.map(|c| c.chain_of(report.eigenvalues.len()));
    let mut rows: Vec<Row> = Vec::new();
    let mut i = 0;
    let e = &report.eigenvalues;
    while i < e.len() {
        let tol = (10.0 * report.errors[i]).max(1e-8);
        let mut j = i + 1;
        while j < e.len() && (e[j] - e[i]).abs() <= tol {
            j += 1;
        }
        let chain = ids
            .as_ref()
            .and_then(|ids| ids[i])
            .map(|c| c.to_string())
            .unwrap_or_default();
        rows.push(vec![num(e[i]), (j - i).to_string(), chain]);
        i = j;
    }
    rows
}

/// `x`, `V(x)` and every eigenfunction.
pub fn eigenfunction_table(report: &SpectrumReport1D, v: &SmoothFn) -> (Vec<String>, Vec<Row>) {
    let mut header = vec!["x".to_string(), "V".to_string()];
    header.extend((0..report.eigenfunctions.len()).map(|k| format!("psi_{k}")));
    let rows = report
        .x
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut r = vec![num(x), num(v.eval(x))];
            r.extend(report.eigenfunctions.iter().map(|f| num(f[i])));
            r
        })
        .collect();
    (header, rows)
}
