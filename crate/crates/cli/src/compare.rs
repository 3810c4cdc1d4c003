//! Error norms between two sets of snapshots.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::snapshot::{Snapshot, SnapshotError, SnapshotRow};

pub const QUANTITIES: [&str; 4] = ["rho", "ux", "T", "qx"];

fn quantity(row: &SnapshotRow, q: usize) -> f64 {
    match q {
        0 => row.rho,
        1 => row.ux,
        2 => row.temp,
        _ => row.qx,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    /// `sum |a - b| dx`.
    pub l1: f64,
    /// `sum |a - b| / sum |b|`, zero when both vanish.
    pub rel_l1: f64,
    pub linf: f64,
}

/// Norms per quantity, in the order of [`QUANTITIES`].
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotErrors {
    pub time: f64,
    pub norms: [Norms; 4],
}

impl SnapshotErrors {
    pub fn get(&self, name: &str) -> Option<Norms> {
        QUANTITIES.iter().position(|&q| q == name).map(|k| self.norms[k])
    }
}

/// Linear interpolation of `ys(xs)` at `x`, constant outside the range.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&v| v < x);
    if xs[k] == x {
        return ys[k];
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    ys[k - 1] + (ys[k] - ys[k - 1]) * (x - x0) / (x1 - x0)
}

/// Compares `a` against the reference `b` on the coarser of the two grids.
pub fn compare_snapshots(a: &Snapshot, b: &Snapshot) -> SnapshotErrors {
    // evaluate on the coarser grid, interpolating the finer one
    let (coarse, fine, a_is_coarse) = if a.rows.len() <= b.rows.len() { (a, b, true) } else { (b, a, false) };
    let fx: Vec<f64> = fine.rows.iter().map(|r| r.x).collect();
    let dx = if coarse.rows.len() > 1 { (coarse.rows[1].x - coarse.rows[0].x).abs() } else { 1.0 };
    let mut norms = [Norms::default(); 4];
    for (q, out) in norms.iter_mut().enumerate() {
        let fy: Vec<f64> = fine.rows.iter().map(|r| quantity(r, q)).collect();
        let (mut num, mut den, mut max) = (0.0, 0.0, 0.0f64);
        for r in &coarse.rows {
            let c = quantity(r, q);
            let f = interpolate(&fx, &fy, r.x);
            let (va, vb) = if a_is_coarse { (c, f) } else { (f, c) };
            let d = (va - vb).abs();
            num += d;
            den += vb.abs();
            max = max.max(d);
        }
        let rel = if num == 0.0 { 0.0 } else { num / den };
        *out = Norms { l1: num * dx, rel_l1: rel, linf: max };
    }
    SnapshotErrors { time: a.time, norms }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub snapshots: Vec<SnapshotErrors>,
    /// Snapshot files present in only one directory.
    pub unmatched: Vec<String>,
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>4} {:>12} {:>12} {:>12}", "t", "q", "L1", "rel_L1", "Linf")?;
        for s in &self.snapshots {
            for (q, n) in QUANTITIES.iter().zip(&s.norms) {
                writeln!(f, "{:>8.4} {:>4} {:>12.4e} {:>12.4e} {:>12.4e}", s.time, q, n.l1, n.rel_l1, n.linf)?;
            }
        }
        for u in &self.unmatched {
            writeln!(f, "unmatched: {u}")?;
        }
        Ok(())
    }
}

fn snapshot_files(dir: &Path) -> Result<BTreeMap<String, std::path::PathBuf>, SnapshotError> {
    let entries = std::fs::read_dir(dir).map_err(|source| SnapshotError::Io { path: dir.to_path_buf(), source })?;
    let mut out = BTreeMap::new();
    for e in entries {
        let e = e.map_err(|source| SnapshotError::Io { path: dir.to_path_buf(), source })?;
        let name = e.file_name().to_string_lossy().into_owned();
        if name.starts_with("snapshot_t") && name.ends_with(".csv") {
            out.insert(name, e.path());
        }
    }
    Ok(out)
}

/// Compares every snapshot time present in both run directories.
pub fn compare_dirs(a: &Path, b: &Path) -> Result<CompareReport, SnapshotError> {
    let fa = snapshot_files(a)?;
    let fb = snapshot_files(b)?;
    let mut snapshots = Vec::new();
    let mut unmatched = Vec::new();
    for (name, pa) in &fa {
        match fb.get(name) {
            Some(pb) => snapshots.push(compare_snapshots(&Snapshot::read(pa)?, &Snapshot::read(pb)?)),
            None => unmatched.push(name.clone()),
        }
    }
    unmatched.extend(fb.keys().filter(|k| !fa.contains_key(*k)).cloned());
    Ok(CompareReport { snapshots, unmatched })
}
