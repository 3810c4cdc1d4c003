//! Per-cell snapshot rows and their CSV form.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kinfluid_core::fluid;
use kinfluid_core::hybrid::{HybridConfig, HybridState, Regime};
use kinfluid_core::moments;

/// Bumped whenever columns change.
pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 12] =
    ["x", "rho", "ux", "uy", "uz", "T", "qx", "regime", "vns_eig1", "vns_eig2", "vns_eig3", "l1_eq_dist"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub x: f64,
    pub rho: f64,
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
    pub temp: f64,
    pub qx: f64,
    /// -1 kinetic, 0 fluid.
    pub regime: i8,
    pub vns_eig: [f64; 3],
    pub l1_eq_dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub rows: Vec<SnapshotRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Format { path: PathBuf, line: usize, reason: String },
}

impl Snapshot {
    /// Heat flux is the kinetic moment on kinetic cells, `-eps kappa dT/dx`
    /// on Navier-Stokes cells and zero on Euler cells.
    pub fn capture(state: &HybridState, cfg: &HybridConfig) -> Self {
        let macros = state.macro_states();
        let diag = state.diagnostics(cfg);
        let fluid_q = fluid::heat_flux(&state.u, &state.eps, &cfg.fluid, &state.space);
        let rows = state
            .space
            .centers()
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                let s = &macros[i];
                let kinetic = state.regime[i] == Regime::Kinetic;
                let qx = if kinetic {
                    moments::heat_flux(state.f.cell(i), &state.vgrid).map_or(f64::NAN, |q| q[0])
                } else {
                    fluid_q[i]
                };
                SnapshotRow {
                    x,
                    rho: s.rho,
                    ux: s.u[0],
                    uy: s.u[1],
                    uz: s.u[2],
                    temp: s.temp,
                    qx,
                    regime: if kinetic { -1 } else { 0 },
                    vns_eig: diag[i].vns_eigenvalues,
                    l1_eq_dist: diag[i].l1_eq_dist,
                }
            })
            .collect();
        Self { time: state.time, rows }
    }

    pub fn file_name(time: f64) -> String {
        format!("snapshot_t{time:.4}.csv")
    }

    pub fn to_csv(&self, label: &str) -> String {
        let mut s = format!("# kinfluid snapshot v{SCHEMA_VERSION} {label} t={:.6}\n{}\n", self.time, COLUMNS.join(","));
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{},{:.10e},{:.10e},{:.10e},{:.10e}",
                r.x,
                r.rho,
                r.ux,
                r.uy,
                r.uz,
                r.temp,
                r.qx,
                r.regime,
                r.vns_eig[0],
                r.vns_eig[1],
                r.vns_eig[2],
                r.l1_eq_dist
            );
        }
        s
    }

    pub fn parse_csv(text: &str, path: &Path) -> Result<Self, SnapshotError> {
        let fail = |line: usize, reason: String| SnapshotError::Format { path: path.to_path_buf(), line, reason };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| fail(1, "empty file".into()))?;
        let version = format!("# kinfluid snapshot v{SCHEMA_VERSION} ");
        if !header.starts_with(&version) {
            return Err(fail(1, format!("expected a `{}` header", version.trim_end())));
        }
        let time = header
            .rsplit("t=")
            .next()
            .and_then(|t| t.trim().parse::<f64>().ok())
            .ok_or_else(|| fail(1, "missing snapshot time".into()))?;
        let (_, cols) = lines.next().ok_or_else(|| fail(2, "missing column header".into()))?;
        if cols != COLUMNS.join(",") {
            return Err(fail(2, "unexpected columns".into()));
        }
        let mut rows = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| fail(n + 1, e.to_string()))?;
            if v.len() != COLUMNS.len() {
                return Err(fail(n + 1, format!("expected {} fields, found {}", COLUMNS.len(), v.len())));
            }
            rows.push(SnapshotRow {
                x: v[0],
                rho: v[1],
                ux: v[2],
                uy: v[3],
                uz: v[4],
                temp: v[5],
                qx: v[6],
                regime: v[7] as i8,
                vns_eig: [v[8], v[9], v[10]],
                l1_eq_dist: v[11],
            });
        }
        Ok(Self { time, rows })
    }

    pub fn read(path: &Path) -> Result<Self, SnapshotError> {
        let text = std::fs::read_to_string(path).map_err(|source| SnapshotError::Io { path: path.to_path_buf(), source })?;
        Self::parse_csv(&text, path)
    }
}
