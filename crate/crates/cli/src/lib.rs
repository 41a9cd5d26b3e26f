//! Batch front end: configuration parsing, command dispatch and artifact output.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use commands::{compute, execute, Artifact, Outcome, RunError};
pub use config::{parse_config, CommandName, ConfigErrors, RunConfig};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(o) = &self.output {
            cfg.output = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
    }
}

/// Reads and validates a config file, then applies the overrides.
pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    let mut cfg = parse_config(&text)?;
    overrides.apply(&mut cfg);
    Ok(cfg)
}

/// Loads, executes and reports one run. Artifact paths go to `out`, the
/// error category line and message to `err`. Returns the process exit code.
pub fn run(path: &Path, overrides: &Overrides, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let result = load(path, overrides).and_then(|cfg| {
        if cfg.threads > 0 {
            // results do not depend on the pool size; failure means a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
        }
        execute(&cfg).map(|o| (cfg, o))
    });
    match result {
        Ok((cfg, o)) => {
            for a in &o.artifacts {
                let _ = writeln!(out, "{}", cfg.output.join(&a.name).display());
            }
            let _ = writeln!(out, "{}", cfg.output.join("manifest.txt").display());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error category={} exit={}", e.category(), e.exit_code());
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
