//! Wall-clock comparison of the models on a matrix of cases.

use std::fmt;

use crate::config::{Case, CaseConfig, Epsilon, Model};
use crate::run::{simulate, RunError};

/// One column of the table: a case at a Knudsen number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchCase {
    pub case: Case,
    pub epsilon: f64,
}

/// Sod at 1e-2 and 1e-3, blast at 1e-2, 5e-3 and 1e-3, all to t = 0.1.
pub fn paper_table1() -> Vec<BenchCase> {
    [(Case::Sod, 1e-2), (Case::Sod, 1e-3), (Case::Blast, 1e-2), (Case::Blast, 5e-3), (Case::Blast, 1e-3)]
        .into_iter()
        .map(|(case, epsilon)| BenchCase { case, epsilon })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingTable {
    pub cases: Vec<BenchCase>,
    pub models: Vec<Model>,
    /// `seconds[m][c]` for model `m` on case `c`.
    pub seconds: Vec<Vec<f64>>,
}

impl TimingTable {
    pub fn time(&self, model: Model, case: usize) -> Option<f64> {
        let m = self.models.iter().position(|&x| x == model)?;
        self.seconds[m].get(case).copied()
    }

    /// `time(bgk) / time(model)`.
    pub fn speedup(&self, model: Model, case: usize) -> Option<f64> {
        Some(self.time(Model::Bgk, case)? / self.time(model, case)?)
    }
}

impl fmt::Display for TimingTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14}", "seconds")?;
        for c in &self.cases {
            write!(f, " {:>14}", format!("{} {:.0e}", c.case, c.epsilon))?;
        }
        writeln!(f)?;
        for (m, row) in self.models.iter().zip(&self.seconds) {
            write!(f, "{:<14}", m.to_string())?;
            for s in row {
                write!(f, " {s:>14.4}")?;
            }
            writeln!(f)?;
        }
        if self.models.contains(&Model::Bgk) {
            writeln!(f, "speedup vs bgk")?;
            for &m in self.models.iter().filter(|&&m| m != Model::Bgk) {
                write!(f, "{:<14}", m.to_string())?;
                for c in 0..self.cases.len() {
                    write!(f, " {:>14.1}", self.speedup(m, c).unwrap_or(f64::NAN))?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Runs every model on every case to `t_end` and records solver wall time.
pub fn timing_table(
    cases: &[BenchCase],
    models: &[Model],
    nx: usize,
    nv: usize,
    t_end: f64,
) -> Result<TimingTable, RunError> {
    let mut seconds = vec![Vec::with_capacity(cases.len()); models.len()];
    for (m, &model) in models.iter().enumerate() {
        for c in cases {
            let mut cfg = CaseConfig::new(c.case, model);
            cfg.epsilon = Epsilon::Value(c.epsilon);
            cfg.nx = nx;
            cfg.nv = nv;
            cfg.t_end = t_end;
            cfg.snapshots = vec![t_end];
            let out = simulate(&cfg)?;
            log::info!("{} {} eps={}: {:.3} s, {} steps", c.case, model, c.epsilon, out.seconds, out.steps);
            seconds[m].push(out.seconds);
        }
    }
    Ok(TimingTable { cases: cases.to_vec(), models: models.to_vec(), seconds })
}
