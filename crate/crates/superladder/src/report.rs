//! Run reports and the context tasks record into.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use superladder_core::report::Check;

use crate::config::RunConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub file: String,
    pub rows: usize,
    pub description: String,
}

/// A module error, recorded next to the failed check it produced.
#[derive(Clone, Debug, Serialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool_version: &'static str,
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub errors: Vec<StageError>,
    pub results: BTreeMap<String, serde_json::Value>,
    pub artifacts: Vec<Artifact>,
    /// Wall-clock seconds per stage; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub struct RunContext {
    pub out_dir: PathBuf,
    checks: Vec<Check>,
    errors: Vec<StageError>,
    results: BTreeMap<String, serde_json::Value>,
    artifacts: Vec<Artifact>,
    timings: BTreeMap<String, f64>,
}

impl RunContext {
    pub fn new(out_dir: &Path) -> Self {
        RunContext {
            out_dir: out_dir.to_path_buf(),
            checks: Vec::new(),
            errors: Vec::new(),
            results: BTreeMap::new(),
            artifacts: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    /// Runs a fallible stage; an error becomes a failed check named after the stage.
    pub fn stage<T, E: Display>(&mut self, name: &str, f: impl FnOnce() -> Result<T, E>) -> Option<T> {
        let t = Instant::now();
        let r = f();
        *self.timings.entry(name.to_string()).or_default() += t.elapsed().as_secs_f64();
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(name, e);
                None
            }
        }
    }

    pub fn fail(&mut self, name: &str, e: impl Display) {
        self.checks.push(Check::failed(name, 0.0));
        self.errors.push(StageError {
            stage: name.to_string(),
            message: e.to_string(),
        });
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn checks(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    /// `prefix.name` for every check.
    pub fn checks_prefixed(&mut self, prefix: &str, cs: impl IntoIterator<Item = Check>) {
        for mut c in cs {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn result(&mut self, key: &str, value: &impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or_else(|e| serde_json::Value::String(format!("unserializable: {e}")));
        self.results.insert(key.to_string(), v);
    }

    pub fn artifact(&mut self, file: &str, rows: usize, description: &str) {
        self.artifacts.push(Artifact {
            file: file.to_string(),
            rows,
            description: description.to_string(),
        });
    }

    pub fn timing(&mut self, name: &str, seconds: f64) {
        *self.timings.entry(name.to_string()).or_default() += seconds;
    }

    pub fn finish(self, config: RunConfig) -> RunReport {
        let passed = self.checks.iter().all(|c| c.passed);
        RunReport {
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            passed,
            checks: self.checks,
            errors: self.errors,
            results: self.results,
            artifacts: self.artifacts,
            timings: self.timings,
        }
    }
}
