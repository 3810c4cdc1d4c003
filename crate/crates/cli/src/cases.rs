//! Initial and boundary data of the three test problems on [-1/2, 1/2].

use std::f64::consts::PI;

use kinfluid_core::fluid::FluidModel;
use kinfluid_core::hybrid::{self, HybridConfig, HybridState, RegimePolicy};
use kinfluid_core::{moments, DistributionField, GasModel, MacroState, SpatialGrid, VelocityGrid};

use crate::config::{Case, CaseConfig, Model};

/// A ready-to-run state with the solver settings that go with it.
#[derive(Debug, Clone)]
pub struct Setup {
    pub state: HybridState,
    pub config: HybridConfig,
}

/// Macroscopic data of the Riemann-type cases at `x`.
pub fn macro_initial(case: Case, x: f64) -> MacroState {
    match case {
        Case::Sod => {
            if x < 0.0 {
                MacroState::new(1.0, [0.0; 3], 1.0)
            } else {
                MacroState::new(0.125, [0.0; 3], 0.25)
            }
        }
        Case::Blast => {
            if x < -0.3 {
                MacroState::new(1.0, [1.0, 0.0, 0.0], 2.0)
            } else if x <= 0.3 {
                MacroState::new(1.0, [0.0; 3], 0.25)
            } else {
                MacroState::new(1.0, [-1.0, 0.0, 0.0], 2.0)
            }
        }
        Case::Far => {
            let (rho, u, temp) = far_components(x);
            MacroState::new(rho, [u, 0.0, 0.0], temp)
        }
    }
}

/// Density, drift speed and temperature of each half of the far-from
/// equilibrium mixture.
pub fn far_components(x: f64) -> (f64, f64, f64) {
    (1.0 + 0.5 * (PI * x).sin(), 0.75, (5.0 + 2.0 * (2.0 * PI * x).cos()) / 20.0)
}

/// `(M(rho, u, T) + M(rho, -u, T)) / 2` with each half moment-exact on the
/// grid.
pub fn double_maxwellian(rho: f64, u: [f64; 3], temp: f64, vgrid: &VelocityGrid) -> kinfluid_core::Result<Vec<f64>> {
    let a = hybrid::lift(&MacroState::new(rho, u, temp), vgrid)?;
    let b = hybrid::lift(&MacroState::new(rho, [-u[0], -u[1], -u[2]], temp), vgrid)?;
    Ok(a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect())
}

pub fn hybrid_config(cfg: &CaseConfig) -> HybridConfig {
    let mut h = HybridConfig::new(cfg.model.order());
    let gas = GasModel { beta: cfg.beta, omega: cfg.omega };
    h.kinetic.gas = gas;
    h.kinetic.cfl = cfg.cfl_kinetic;
    h.fluid.gas = gas;
    h.fluid.cfl = cfg.cfl_fluid;
    h.fluid.cfl_parabolic = cfg.cfl_parabolic;
    h.fluid.model = if cfg.model.order() == 0 { FluidModel::Euler } else { FluidModel::NavierStokes };
    h.indicators.eta0 = cfg.eta0;
    h.indicators.delta0 = cfg.delta0;
    h.indicators.dt_over_eps_min = cfg.dt_over_eps_min;
    h.policy = match cfg.model {
        Model::Euler | Model::Cns => RegimePolicy::AllFluid,
        Model::Bgk => RegimePolicy::AllKinetic,
        Model::HybridEuler | Model::HybridCns => RegimePolicy::Adaptive,
    };
    h
}

/// Builds the initial state. Riemann cases start in the fluid regime (all
/// kinetic for the kinetic model); the far-from-equilibrium case starts
/// kinetic for every model except the pure fluid ones, which get the
/// moments of the mixture.
pub fn build_case(cfg: &CaseConfig) -> kinfluid_core::Result<Setup> {
    let space = SpatialGrid::new(-0.5, 0.5, cfg.nx, cfg.boundary)?;
    let vgrid = VelocityGrid::new(cfg.v_max, cfg.nv)?;
    let xs = space.centers();
    let eps: Vec<f64> = xs.iter().map(|&x| cfg.epsilon.at(x)).collect();
    let config = hybrid_config(cfg);
    let fluid_only = config.policy == RegimePolicy::AllFluid;

    let state = match cfg.case {
        Case::Far => {
            let mut f = DistributionField::zeros(cfg.nx, vgrid.len());
            for (i, &x) in xs.iter().enumerate() {
                let (rho, u, temp) = far_components(x);
                f.cell_mut(i).copy_from_slice(&double_maxwellian(rho, [u, 0.0, 0.0], temp, &vgrid)?);
            }
            if fluid_only {
                let states = f.cells().map(|c| moments::moments(c, &vgrid)).collect::<Result<Vec<_>, _>>()?;
                HybridState::from_fluid(space, vgrid, eps, &states)?
            } else {
                HybridState::from_kinetic(space, vgrid, eps, f)?
            }
        }
        case => {
            let states: Vec<MacroState> = xs.iter().map(|&x| macro_initial(case, x)).collect();
            if config.policy == RegimePolicy::AllKinetic {
                let mut f = DistributionField::zeros(cfg.nx, vgrid.len());
                for (i, s) in states.iter().enumerate() {
                    f.cell_mut(i).copy_from_slice(&hybrid::lift(s, &vgrid)?);
                }
                HybridState::from_kinetic(space, vgrid, eps, f)?
            } else {
                HybridState::from_fluid(space, vgrid, eps, &states)?
            }
        }
    };
    Ok(Setup { state, config })
}
