//! Hybrid fluid/kinetic time loop: per-cell regime decisions, lift and
//! projection at transitions, kinetic flux moments at interfaces and one
//! synchronised time step.

use alloc::vec;
use alloc::vec::Vec;

use crate::equilibrium::{self, match_moments_linear};
use crate::error::{Error, Result};
use crate::field::{l1_distance, DistributionField};
use crate::fluid::{self, FluidConfig, FluidModel};
use crate::grid::{SpatialGrid, VelocityGrid};
use crate::indicators::{self, IndicatorConfig};
use crate::kinetic::{self, KineticConfig};
use crate::linalg::Vec3;
use crate::moments;
use crate::state::{Conserved, MacroState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Kinetic,
    Fluid,
}

/// How the regime map evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimePolicy {
    /// Indicator-driven decisions.
    Adaptive,
    AllFluid,
    AllKinetic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConfig {
    /// Fluid closure order: 0 Euler, 1 Navier-Stokes.
    pub order: u8,
    pub kinetic: KineticConfig,
    pub fluid: FluidConfig,
    pub indicators: IndicatorConfig,
    pub policy: RegimePolicy,
}

impl HybridConfig {
    /// Consistent defaults for a closure order; the fluid model follows the
    /// order and both solvers share one gas model.
    pub fn new(order: u8) -> Self {
        let model = if order == 0 { FluidModel::Euler } else { FluidModel::NavierStokes };
        Self {
            order,
            kinetic: KineticConfig::default(),
            fluid: FluidConfig { model, ..FluidConfig::default() },
            indicators: IndicatorConfig::default(),
            policy: RegimePolicy::Adaptive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub kinetic_cells: usize,
    pub transitions: usize,
}

/// Per-cell diagnostics exported with snapshots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDiagnostics {
    /// Sorted eigenvalues of the Navier-Stokes realizability matrix.
    pub vns_eigenvalues: Vec3,
    /// `|f - M_f|_1 / rho` on kinetic cells, zero on fluid cells.
    pub l1_eq_dist: f64,
}

/// Lift a macroscopic state to a moment-exact discrete Maxwellian. If the
/// exponential correction fails, falls back to the analytic Maxwellian with
/// a linear defect correction.
pub fn lift(state: &MacroState, vgrid: &VelocityGrid) -> Result<Vec<f64>> {
    match equilibrium::discrete_equilibrium(state, vgrid) {
        Ok(f) => Ok(f),
        Err(e) => {
            log::warn!("lift: {e}; using corrected analytic Maxwellian");
            let mut f = equilibrium::maxwellian(state, vgrid)?;
            match_moments_linear(&mut f, &state.to_conserved(), vgrid)?;
            Ok(f)
        }
    }
}

pub fn project(f: &[f64], vgrid: &VelocityGrid) -> Result<MacroState> {
    moments::moments(f, vgrid)
}

/// Enforces the minimum zone width of two cells: fluid runs shorter than two
/// become kinetic, single kinetic cells absorb a fluid neighbour.
pub fn repair_zones(regime: &mut [Regime]) {
    let n = regime.len();
    if n < 2 {
        return;
    }
    'scan: loop {
        let mut i = 0;
        while i < n {
            let kind = regime[i];
            let start = i;
            while i < n && regime[i] == kind {
                i += 1;
            }
            if i - start >= 2 {
                continue;
            }
            match kind {
                Regime::Fluid => regime[start] = Regime::Kinetic,
                Regime::Kinetic if i < n => regime[i] = Regime::Kinetic,
                Regime::Kinetic => regime[start - 1] = Regime::Kinetic,
            }
            continue 'scan;
        }
        return;
    }
}

/// Complete state of a hybrid run.
///
/// `u` holds the conserved variables of every cell; on kinetic cells it is
/// the projection of `f`. `f` is authoritative on kinetic cells and holds
/// lifted equilibria on the fluid cells that border a kinetic zone.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub space: SpatialGrid,
    pub vgrid: VelocityGrid,
    /// Knudsen number per cell.
    pub eps: Vec<f64>,
    pub u: Vec<Conserved>,
    pub f: DistributionField,
    pub regime: Vec<Regime>,
    pub time: f64,
    pub step: usize,
}

impl HybridState {
    /// Starts from macroscopic data with every cell fluid.
    pub fn from_fluid(space: SpatialGrid, vgrid: VelocityGrid, eps: Vec<f64>, states: &[MacroState]) -> Result<Self> {
        let n = space.n_cells;
        check_len(n, states.len())?;
        check_len(n, eps.len())?;
        Ok(Self {
            f: DistributionField::zeros(n, vgrid.len()),
            space,
            vgrid,
            eps,
            u: states.iter().map(MacroState::to_conserved).collect(),
            regime: vec![Regime::Fluid; n],
            time: 0.0,
            step: 0,
        })
    }

    /// Starts from a distribution with every cell kinetic.
    pub fn from_kinetic(space: SpatialGrid, vgrid: VelocityGrid, eps: Vec<f64>, f: DistributionField) -> Result<Self> {
        let n = space.n_cells;
        check_len(n, f.n_cells())?;
        check_len(n, eps.len())?;
        let u = f.cells().map(|c| moments::conserved_moments(c, &vgrid)).collect();
        Ok(Self { space, vgrid, eps, u, f, regime: vec![Regime::Kinetic; n], time: 0.0, step: 0 })
    }

    pub fn kinetic_cells(&self) -> usize {
        self.regime.iter().filter(|&&r| r == Regime::Kinetic).count()
    }

    pub fn macro_states(&self) -> Vec<MacroState> {
        self.u.iter().map(MacroState::from_conserved).collect()
    }

    fn mask(&self, kind: Regime) -> Vec<bool> {
        self.regime.iter().map(|&r| r == kind).collect()
    }

    /// Largest synchronised step for the current regime map.
    pub fn stable_dt(&self, cfg: &HybridConfig) -> f64 {
        let mut dt = f64::INFINITY;
        if self.regime.contains(&Regime::Kinetic) {
            dt = cfg.kinetic.max_dt(self.space.dx(), &self.vgrid);
        }
        if self.regime.contains(&Regime::Fluid) {
            let mask = self.mask(Regime::Fluid);
            dt = dt.min(fluid::max_dt(&self.u, &self.eps, &cfg.fluid, self.space.dx(), Some(&mask)));
        }
        dt
    }

    /// Regime map for the next step from the data at the current time.
    pub fn classify(&self, cfg: &HybridConfig, dt: f64) -> Result<Vec<Regime>> {
        let n = self.regime.len();
        match cfg.policy {
            RegimePolicy::AllFluid => return Ok(vec![Regime::Fluid; n]),
            RegimePolicy::AllKinetic => return Ok(vec![Regime::Kinetic; n]),
            RegimePolicy::Adaptive => {}
        }
        let states = self.macro_states();
        let derivs = indicators::field_derivatives(&states, &self.space);
        let gas = cfg.kinetic.gas;
        let mut next = self.regime.clone();
        for i in 0..n {
            let (g, s) = &derivs[i];
            next[i] = match self.regime[i] {
                Regime::Fluid => {
                    if indicators::fluid_breakdown(cfg.order, &states[i], g, s, self.eps[i], &gas, &cfg.indicators)? {
                        Regime::Kinetic
                    } else {
                        Regime::Fluid
                    }
                }
                Regime::Kinetic => {
                    let k = indicators::kinetic_to_fluid(
                        self.f.cell(i),
                        &self.vgrid,
                        g,
                        cfg.order,
                        dt,
                        self.eps[i],
                        &gas,
                        &cfg.indicators,
                    )
                    .map_err(|e| at_cell(e, i))?;
                    if k.fluid {
                        Regime::Fluid
                    } else {
                        Regime::Kinetic
                    }
                }
            };
        }
        repair_zones(&mut next);
        Ok(next)
    }

    /// Applies a new regime map: lifts cells that become kinetic and refreshes
    /// the lifted neighbours of every kinetic zone. Returns the number of
    /// cells that changed regime.
    pub fn transition(&mut self, next: Vec<Regime>) -> Result<usize> {
        let n = next.len();
        let mut changed = 0;
        for i in 0..n {
            if next[i] != self.regime[i] {
                changed += 1;
            }
            // kinetic -> fluid keeps u, which already equals the projection
            if next[i] == Regime::Kinetic && self.regime[i] == Regime::Fluid {
                self.lift_into(i)?;
            }
        }
        self.regime = next;
        self.exchange_ghosts()?;
        Ok(changed)
    }

    fn lift_into(&mut self, i: usize) -> Result<()> {
        let s = MacroState::from_conserved(&self.u[i]);
        if !s.is_admissible() {
            return Err(at_cell(Error::NonPositiveTemperature(s.temp), i));
        }
        let g = lift(&s, &self.vgrid).map_err(|e| at_cell(e, i))?;
        self.f.cell_mut(i).copy_from_slice(&g);
        Ok(())
    }

    /// Lifts the two fluid cells on each side of every kinetic zone so the
    /// kinetic stencil never reads stale data.
    pub fn exchange_ghosts(&mut self) -> Result<()> {
        let n = self.regime.len();
        for i in 0..n {
            if self.regime[i] != Regime::Fluid {
                continue;
            }
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(n - 1);
            if (lo..=hi).any(|j| self.regime[j] == Regime::Kinetic) {
                self.lift_into(i)?;
            }
        }
        Ok(())
    }

    /// Advances both descriptions by `dt` on the current regime map.
    pub fn advance(&mut self, cfg: &HybridConfig, dt: f64) -> Result<()> {
        let n = self.regime.len();
        let kinetic = self.mask(Regime::Kinetic);
        let fluid_mask = self.mask(Regime::Fluid);
        let any_kinetic = kinetic.iter().any(|&k| k);
        let any_fluid = fluid_mask.iter().any(|&k| k);
        let dx = self.space.dx();

        let mut fixed: Vec<Option<Conserved>> = vec![None; n + 1];
        if any_kinetic {
            let limit = cfg.kinetic.max_dt(dx, &self.vgrid);
            if dt > limit * (1.0 + 1e-12) {
                return Err(Error::CflViolation { dt, limit });
            }
            let ghosts = kinetic::apply_boundary(&self.f, self.space.boundary, &self.vgrid)?;
            let all = !any_fluid;
            let mask = if all { None } else { Some(kinetic.as_slice()) };
            let face = kinetic::transport_masked(&mut self.f, &ghosts, &self.vgrid, dx, dt, mask);
            for (j, slot) in fixed.iter_mut().enumerate() {
                let left = if j == 0 { kinetic[0] } else { kinetic[j - 1] };
                let right = if j == n { kinetic[n - 1] } else { kinetic[j] };
                if left || right {
                    *slot = Some(face[j]);
                }
            }
            kinetic::collision_step(&mut self.f, &self.vgrid, &cfg.kinetic.gas, &self.eps, dt, mask)?;
        }
        if any_fluid {
            if any_kinetic {
                fluid::fluid_step(&mut self.u, &self.space, &self.eps, &cfg.fluid, dt, Some(&fluid_mask), Some(&fixed))?;
            } else {
                fluid::fluid_step(&mut self.u, &self.space, &self.eps, &cfg.fluid, dt, None, None)?;
            }
        }
        for i in 0..n {
            if kinetic[i] {
                self.u[i] = moments::conserved_moments(self.f.cell(i), &self.vgrid);
            }
        }
        self.time += dt;
        self.step += 1;
        Ok(())
    }

    /// Classify, transition, then advance by the stable step capped at
    /// `dt_max`.
    pub fn step(&mut self, cfg: &HybridConfig, dt_max: f64) -> Result<StepReport> {
        let dt_now = self.stable_dt(cfg).min(dt_max);
        let next = self.classify(cfg, dt_now)?;
        let transitions = self.transition(next)?;
        let dt = self.stable_dt(cfg).min(dt_max);
        self.advance(cfg, dt)?;
        Ok(StepReport { dt, kinetic_cells: self.kinetic_cells(), transitions })
    }

    /// Total mass, momentum and energy, `sum u_i dx`.
    pub fn totals(&self) -> Conserved {
        let mut s = Conserved::ZERO;
        for c in &self.u {
            s += *c;
        }
        s * self.space.dx()
    }

    pub fn diagnostics(&self, cfg: &HybridConfig) -> Vec<CellDiagnostics> {
        let states = self.macro_states();
        let derivs = indicators::field_derivatives(&states, &self.space);
        (0..states.len())
            .map(|i| {
                let v = indicators::v_matrix_ns(&states[i], &derivs[i].0, self.eps[i], &cfg.kinetic.gas);
                let l1 = if self.regime[i] == Regime::Kinetic { equilibrium_distance(self.f.cell(i), &self.vgrid) } else { 0.0 };
                CellDiagnostics { vns_eigenvalues: v.eigenvalues, l1_eq_dist: l1 }
            })
            .collect()
    }
}

/// `|f - M_f|_1 / rho` against the discrete Maxwellian with the moments of `f`.
pub fn equilibrium_distance(f: &[f64], vgrid: &VelocityGrid) -> f64 {
    let Ok(s) = moments::moments(f, vgrid) else {
        return f64::NAN;
    };
    match lift(&s, vgrid) {
        Ok(m) => l1_distance(f, &m, vgrid.weight()) / s.rho,
        Err(_) => f64::NAN,
    }
}

fn check_len(expect: usize, got: usize) -> Result<()> {
    if expect != got {
        return Err(Error::InvalidGrid("field length does not match the number of cells"));
    }
    Ok(())
}

fn at_cell(e: Error, cell: usize) -> Error {
    match e {
        Error::DegenerateCell { rho, .. } => Error::DegenerateCell { cell, rho },
        other => other,
    }
}
