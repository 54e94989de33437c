//! Config-driven scenario runner for the dark-state cooling solvers:
//! presets, CSV/SVG artifacts, and comparison reports.

pub mod compare;
pub mod config;
pub mod presets;
pub mod scenario;
pub mod table;

use std::path::{Path, PathBuf};

use darkcool_core::{CoolError, Result};

use crate::config::Config;
use crate::table::{render_svg, write_atomic, Table};

/// Artifact paths produced by a run.
pub struct RunPaths {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub meta: PathBuf,
}

/// Resolve a `run` argument: preset name or config-file path.
pub fn load_run_config(arg: &str) -> Result<Config> {
    if presets::catalogue().iter().any(|(n, _)| *n == arg) {
        return presets::preset(arg);
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| CoolError::invalid(format!("cannot read config `{arg}`: {e}")))?;
    config::parse_config(&text)
}

/// Execute a config and write `<dir>/<name>.{csv,svg,meta}` atomically.
pub fn run_to_files(cfg: &Config) -> Result<RunPaths> {
    let result = scenario::run_scenario(cfg)?;
    let dir = Path::new(&cfg.out_dir);
    let csv = dir.join(format!("{}.csv", cfg.name));
    let svg = dir.join(format!("{}.svg", cfg.name));
    let meta = dir.join(format!("{}.meta", cfg.name));
    write_atomic(&csv, result.table.to_csv().as_bytes())?;
    write_atomic(&svg, render_svg(&result.table, &cfg.name).as_bytes())?;

    let mut m = String::new();
    m.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    for (k, v) in &result.meta {
        m.push_str(&format!("{k} = {v}\n"));
    }
    m.push_str("\n# resolved configuration\n");
    m.push_str(&config::render_config(cfg));
    write_atomic(&meta, m.as_bytes())?;
    Ok(RunPaths { csv, svg, meta })
}

/// Run a preset straight to a table (no files); used by tests.
pub fn run_preset_table(name: &str) -> Result<Table> {
    let cfg = presets::preset(name)?;
    Ok(scenario::run_scenario(&cfg)?.table)
}
