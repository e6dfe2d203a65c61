use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use lowrank_core::linalg::SYMMETRY_TOL;
use lowrank_core::nets::REJECTION_FACTOR;
use lowrank_core::recovery::{SolverConfig, NSP_TIE_TOL};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::params::command;

pub const MANIFEST: &str = "manifest.json";
pub const REPORT: &str = "report.json";

fn tolerances() -> Value {
    json!({
        "symmetry": SYMMETRY_TOL,
        "rank": "1e-10 * max(rows, cols), relative to the largest singular value",
        "ceil_slack": 1e-9,
        "nsp_tie": NSP_TIE_TOL,
        "net_rejection_factor": REJECTION_FACTOR,
        "solver_defaults": SolverConfig::default(),
    })
}

pub fn manifest(cfg: &ExperimentConfig, files: &[String], wall_time: f64, threads: Option<usize>) -> String {
    let cmd = command(&cfg.subcommand).expect("resolved config");
    let value = json!({
        "config": cfg,
        "library_version": lowrank_core::VERSION,
        "wall_time_seconds": wall_time,
        "threads": threads,
        "stream_layout": {
            "generator": "ChaCha8 keyed by (seed, stream id); substream(i) re-keys the stream id with splitmix64",
            "usage": cmd.streams,
        },
        "tolerances": tolerances(),
        "artifacts": files,
    });
    serde_json::to_string_pretty(&value).expect("manifest serializes")
}

/// Writes `files` into `dir`; on failure removes whatever this call created.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    let created = !dir.exists();
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, body) in files {
            let path = dir.join(name);
            written.push(path.clone());
            fs::write(&path, body)?;
        }
        Ok(())
    })();
    if let Err(e) = result {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        if created {
            let _ = fs::remove_dir(dir);
        }
        return Err(CliError::Io(format!("{}: {e}", dir.display())));
    }
    Ok(())
}
