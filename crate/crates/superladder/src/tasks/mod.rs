//! Tasks selectable from the command line, registered by name.

mod algebra;
mod construct;
mod represent;
mod spectrum;
mod sweep;
mod verify;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use superladder_core::diffop::GridSpec;
use superladder_core::models::{build_zero_modes, ModelRegistry, PotentialModel1D, ZeroMode, ZeroModeKind};

use crate::config::{ConfigError, RunConfig};
use crate::report::{RunContext, RunReport};

pub use algebra::Algebra;
pub use construct::Construct;
pub use represent::Represent;
pub use spectrum::Spectrum;
pub use sweep::Sweep;
pub use verify::Verify;

pub trait Task: Send + Sync {
    fn name(&self) -> &'static str;

    fn about(&self) -> &'static str;

    /// Task-specific requirements on an otherwise valid config.
    fn validate(&self, cfg: &RunConfig) -> Result<(), ConfigError>;

    /// Records checks, results and artifacts; never fails as a whole.
    fn execute(&self, cfg: &RunConfig, env: &Env, ctx: &mut RunContext);
}

/// Shared read-only state handed to tasks.
pub struct Env {
    pub models: ModelRegistry,
}

impl Default for Env {
    fn default() -> Self {
        Env {
            models: ModelRegistry::default(),
        }
    }
}

pub struct TaskRegistry {
    tasks: BTreeMap<&'static str, Box<dyn Task>>,
}

impl Default for TaskRegistry {
    fn default() -> Self {
        let mut r = TaskRegistry { tasks: BTreeMap::new() };
        r.register(Box::new(Construct));
        r.register(Box::new(Verify));
        r.register(Box::new(Spectrum));
        r.register(Box::new(Represent));
        r.register(Box::new(Sweep));
        r.register(Box::new(Algebra));
        r
    }
}

impl TaskRegistry {
    pub fn register(&mut self, t: Box<dyn Task>) {
        self.tasks.insert(t.name(), t);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Task> {
        self.tasks.get(name).map(|t| t.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.tasks.keys().copied().collect()
    }

    pub fn describe(&self) -> String {
        self.tasks
            .values()
            .map(|t| format!("  {:<10} {}", t.name(), t.about()))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Validates `cfg`, runs its task into `out_dir` and writes `report.json`.
    pub fn run(&self, cfg: RunConfig, out_dir: &Path) -> Result<RunReport, ConfigError> {
        let env = Env::default();
        cfg.validate(&env.models)?;
        let task = self.get(&cfg.task).ok_or_else(|| {
            ConfigError::new("task", format!("unknown task '{}', expected one of {}", cfg.task, self.names().join(", ")))
        })?;
        task.validate(&cfg)?;
        std::fs::create_dir_all(out_dir)
            .map_err(|e| ConfigError::new("output_dir", format!("cannot create {}: {e}", out_dir.display())))?;
        let mut ctx = RunContext::new(out_dir);
        let t = Instant::now();
        task.execute(&cfg, &env, &mut ctx);
        ctx.timing("total", t.elapsed().as_secs_f64());
        ctx.artifact("report.json", 0, "this report");
        let report = ctx.finish(cfg);
        std::fs::write(out_dir.join("report.json"), report.to_json())
            .map_err(|e| ConfigError::new("output_dir", format!("cannot write report: {e}")))?;
        Ok(report)
    }
}

/// Builds the configured model, recording failures.
pub(crate) fn build_model(ctx: &mut RunContext, env: &Env, cfg: &RunConfig) -> Option<PotentialModel1D> {
    let spec = cfg.model.as_ref()?;
    let m = ctx.stage("build_model", || env.models.build(spec))?;
    ctx.checks_prefixed("construction", m.checks.clone());
    Some(m)
}

pub(crate) fn grid_for(cfg: &RunConfig, m: &PotentialModel1D) -> GridSpec {
    cfg.grid.map(|g| g.spec()).unwrap_or(m.grid)
}

pub(crate) fn zero_modes(ctx: &mut RunContext, m: &PotentialModel1D, grid: &GridSpec) -> Vec<ZeroMode> {
    if !m.has_zero_modes() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for kind in [ZeroModeKind::Annihilation, ZeroModeKind::Creation] {
        if let Some(z) = ctx.stage("zero_modes", || build_zero_modes(m, grid, kind)) {
            out.extend(z);
        }
    }
    out
}
