//! Time loop with snapshots, a per-step regime log and a timing summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kinfluid_core::hybrid::HybridState;

use crate::cases::{build_case, Setup};
use crate::config::CaseConfig;
use crate::snapshot::Snapshot;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("case setup: {0}")]
    Setup(kinfluid_core::Error),
    #[error("step {step} at t={time}: {source}")]
    Solver { step: usize, time: f64, source: kinfluid_core::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub log: Vec<String>,
    pub steps: usize,
    /// Solver wall time in seconds, excluding setup and output.
    pub seconds: f64,
    pub max_kinetic_cells: usize,
    pub final_state: HybridState,
}

impl RunOutput {
    pub fn timing_summary(&self, cfg: &CaseConfig) -> String {
        format!(
            "case={} model={} epsilon={} nx={} nv={} steps={} max_kinetic_cells={} wall_seconds={:.6}\n",
            cfg.case, cfg.model, cfg.epsilon, cfg.nx, cfg.nv, self.steps, self.max_kinetic_cells, self.seconds
        )
    }
}

/// Runs the configured case in memory.
pub fn simulate(cfg: &CaseConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let Setup { mut state, config } = build_case(cfg).map_err(RunError::Setup)?;
    let mut snapshots = Vec::with_capacity(cfg.snapshots.len());
    let mut log = Vec::new();
    let mut max_kinetic = state.kinetic_cells();
    let mut seconds = 0.0;
    for &target in &cfg.snapshots {
        let tol = 1e-12 * target.max(1.0);
        let clock = Instant::now();
        while state.time < target - tol {
            let report = state
                .step(&config, target - state.time)
                .map_err(|source| RunError::Solver { step: state.step + 1, time: state.time, source })?;
            max_kinetic = max_kinetic.max(report.kinetic_cells);
            let line = format!(
                "step={} t={:.6e} kinetic_cells={} transitions={}",
                state.step, state.time, report.kinetic_cells, report.transitions
            );
            log::debug!("{line}");
            log.push(line);
        }
        seconds += clock.elapsed().as_secs_f64();
        let mut snap = Snapshot::capture(&state, &config);
        snap.time = target;
        log::info!("snapshot t={target} after {} steps", state.step);
        snapshots.push(snap);
    }
    Ok(RunOutput { snapshots, log, steps: state.step, seconds, max_kinetic_cells: max_kinetic, final_state: state })
}

/// Runs and writes `config.txt`, one CSV per snapshot, `run.log` and
/// `timing.txt` into `out`.
pub fn run(cfg: &CaseConfig, out: &Path) -> Result<RunOutput, RunError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(out).map_err(io(out))?;
    let echo = out.join("config.txt");
    fs::write(&echo, cfg.to_text()).map_err(io(&echo))?;
    log::info!("config:\n{}", cfg.to_text());

    let result = simulate(cfg)?;
    let label = format!("case={} model={} epsilon={}", cfg.case, cfg.model, cfg.epsilon);
    for snap in &result.snapshots {
        let path = out.join(Snapshot::file_name(snap.time));
        fs::write(&path, snap.to_csv(&label)).map_err(io(&path))?;
    }
    let log_path = out.join("run.log");
    let mut text = result.log.join("\n");
    text.push('\n');
    fs::write(&log_path, text).map_err(io(&log_path))?;
    let timing = out.join("timing.txt");
    fs::write(&timing, result.timing_summary(cfg)).map_err(io(&timing))?;
    Ok(result)
}
