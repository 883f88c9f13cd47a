use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use superladder::{ConfigError, RunConfig, TaskRegistry, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "superladder", version, about = "Build and verify SUSY ladder models and superintegrable systems")]
struct Cli {
    /// construct, verify, spectrum, represent, sweep or algebra
    task: String,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized probes (overrides the config's seed)
    #[arg(long)]
    seed: Option<u64>,
}

fn load(cli: &Cli) -> Result<(RunConfig, PathBuf), ConfigError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if cfg.task != cli.task {
        return Err(ConfigError::new(
            "task",
            format!("config is for '{}' but '{}' was requested", cfg.task, cli.task),
        ));
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("superladder-out"));
    Ok((cfg, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tasks = TaskRegistry::default();
    if tasks.get(&cli.task).is_none() {
        eprintln!("unknown task '{}'; available:\n{}", cli.task, tasks.describe());
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let result = load(&cli).and_then(|(cfg, out)| tasks.run(cfg, &out).map(|r| (r, out)));
    match result {
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
        Ok((report, out)) => {
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: residual {:e} > {:e}", c.name, c.residual, c.threshold);
            }
            for e in &report.errors {
                eprintln!("error in {}: {}", e.stage, e.message);
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            println!(
                "{}: {passed}/{} checks passed, report at {}",
                report.config.task,
                report.checks.len(),
                out.join("report.json").display()
            );
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
