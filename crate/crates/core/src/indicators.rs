//! Regime indicators: reduced moment-realizability matrices built from
//! macroscopic fields (fluid to kinetic) and the L1 distance to the truncated
//! Chapman-Enskog distribution (kinetic to fluid).

use alloc::vec::Vec;


#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::equilibrium::{self, CeClosure};
use crate::error::{Error, Result};
use crate::field::l1_distance;
use crate::grid::{BoundaryKind, SpatialGrid, VelocityGrid};
use crate::linalg::{self, Mat3, Vec3};
use crate::moments::{self, RealizabilityBundle};
use crate::state::{GasModel, Gradients, MacroState, SecondGradients};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorConfig {
    /// Eigenvalue tolerance for fluid breakdown.
    pub eta0: f64,
    /// Density-relative L1 tolerance for returning to fluid.
    pub delta0: f64,
    /// Minimum `dt / eps` required to return to fluid; `0` disables the test.
    pub dt_over_eps_min: f64,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        Self { eta0: 1e-2, delta0: 1e-4, dt_over_eps_min: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VMatrix {
    /// Closure order: 0 Euler, 1 Navier-Stokes, 2 Burnett.
    pub order: u8,
    pub matrix: Mat3,
    /// Sorted ascending.
    pub eigenvalues: Vec3,
}

impl VMatrix {
    pub fn from_moments(order: u8, a_bar: &Mat3, b_bar: &Vec3, c_bar: f64) -> Self {
        let matrix = reduced_matrix(a_bar, b_bar, c_bar);
        Self { order, matrix, eigenvalues: linalg::sym_eigenvalues(&matrix) }
    }

    pub fn from_bundle(order: u8, b: &RealizabilityBundle) -> Self {
        Self::from_moments(order, &b.a_bar, &b.b_bar, b.c_bar)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues[0] > 0.0
    }
}

/// `I + A - 2/(3C) B (x) B`.
pub fn reduced_matrix(a_bar: &Mat3, b_bar: &Vec3, c_bar: f64) -> Mat3 {
    let mut v = linalg::add(&linalg::IDENTITY, a_bar);
    let s = 2.0 / (3.0 * c_bar);
    for i in 0..3 {
        for j in 0..3 {
            v[i][j] -= s * b_bar[i] * b_bar[j];
        }
    }
    v
}

/// Navier-Stokes anisotropy moments `(A, B)`.
pub fn ns_moments(state: &MacroState, grads: &Gradients, eps: f64, gas: &GasModel) -> (Mat3, Vec3) {
    let (rho, t) = (state.rho, state.temp);
    let mu = gas.viscosity(rho, t);
    let kappa = gas.conductivity(rho, t);
    let a = linalg::scale(&grads.deformation(), -eps * mu / (rho * t));
    let cb = -eps * kappa / (rho * t.powf(1.5));
    (a, grads.temp.map(|x| cb * x))
}

pub fn v_matrix_ns(state: &MacroState, grads: &Gradients, eps: f64, gas: &GasModel) -> VMatrix {
    let (a, b) = ns_moments(state, grads, eps, gas);
    VMatrix::from_moments(1, &a, &b, 1.0)
}

/// Burnett anisotropy moments `(A, B)` for the BGK model. `A` is symmetrised.
pub fn burnett_moments(
    state: &MacroState,
    grads: &Gradients,
    second: &SecondGradients,
    eps: f64,
    gas: &GasModel,
) -> Result<(Mat3, Vec3)> {
    if gas.beta != 0.0 {
        return Err(Error::ModelMismatch { beta: gas.beta });
    }
    let (a1, b1) = ns_moments(state, grads, eps, gas);
    let (rho, t) = (state.rho, state.temp);
    let mu = gas.viscosity(rho, t);
    let gu = &grads.u;
    let gr = &grads.rho;
    let gt = &grads.temp;
    let d = grads.deformation();
    let div = grads.divergence();

    let mut bracket = linalg::scale(&second.rho, -t / rho);
    bracket = linalg::add(&bracket, &linalg::scale(&linalg::outer(gr, gr), t / (rho * rho)));
    bracket = linalg::add(&bracket, &linalg::scale(&linalg::outer(gt, gr), -1.0 / rho));
    bracket = linalg::add(&bracket, &linalg::mat_mul(gu, &linalg::transpose(gu)));
    bracket = linalg::add(&bracket, &linalg::scale(&d, -div / 3.0));
    bracket = linalg::add(&bracket, &linalg::scale(&linalg::outer(gt, gt), 1.0 / t));
    let a2 = linalg::scale(&bracket, -2.0 * eps * eps * mu * mu / (rho * rho * t * t));
    let a = linalg::symmetrize(&linalg::add(&a1, &a2));

    let lap = second.laplacian_u();
    let div_d = second.divergence_of_deformation();
    let gu_gt = linalg::mat_vec(gu, gt);
    let grad_p: Vec3 = core::array::from_fn(|i| t * gr[i] + rho * gt[i]);
    let d_gp = linalg::mat_vec(&d, &grad_p);
    let d_gt = linalg::mat_vec(&d, gt);
    let c2 = -eps * eps * mu * mu / (rho * rho * t.powf(2.5));
    let b: Vec3 = core::array::from_fn(|i| {
        let brace = 25.0 / 6.0 * div * gt[i] - 5.0 / 3.0 * (t * lap[i] + div * gt[i] + 6.0 * gu_gt[i])
            + 2.0 / rho * d_gp[i]
            + 2.0 * t * div_d[i]
            + 16.0 * d_gt[i];
        b1[i] + c2 * brace
    });
    Ok((a, b))
}

pub fn v_matrix_burnett(
    state: &MacroState,
    grads: &Gradients,
    second: &SecondGradients,
    eps: f64,
    gas: &GasModel,
) -> Result<VMatrix> {
    let (a, b) = burnett_moments(state, grads, second, eps, gas)?;
    Ok(VMatrix::from_moments(2, &a, &b, 1.0))
}

/// Breakdown of the order-`order` fluid closure at a point.
///
/// Order 0 (Euler): some eigenvalue of the Navier-Stokes matrix is farther
/// than `eta0` from 1. Order 1 (Navier-Stokes): sorted eigenvalues of the
/// Navier-Stokes and Burnett matrices differ by more than `eta0`.
pub fn fluid_breakdown(
    order: u8,
    state: &MacroState,
    grads: &Gradients,
    second: &SecondGradients,
    eps: f64,
    gas: &GasModel,
    cfg: &IndicatorConfig,
) -> Result<bool> {
    let ns = v_matrix_ns(state, grads, eps, gas);
    if order == 0 {
        return Ok(ns.eigenvalues.iter().any(|l| (l - 1.0).abs() > cfg.eta0));
    }
    let b = v_matrix_burnett(state, grads, second, eps, gas)?;
    Ok(ns.eigenvalues.iter().zip(&b.eigenvalues).any(|(x, y)| (x - y).abs() > cfg.eta0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticToFluid {
    pub fluid: bool,
    /// `|f - f_k|_1 / rho`.
    pub distance: f64,
}

/// Return-to-fluid test: `|f - f_k|_1 <= delta0 rho`, with `f_k` the truncated
/// Chapman-Enskog distribution sharing the discrete moments of `f`, and
/// optionally `dt / eps >= dt_over_eps_min`.
#[allow(clippy::too_many_arguments)]
pub fn kinetic_to_fluid(
    f: &[f64],
    vgrid: &VelocityGrid,
    grads: &Gradients,
    order: u8,
    dt: f64,
    eps: f64,
    gas: &GasModel,
    cfg: &IndicatorConfig,
) -> Result<KineticToFluid> {
    let state = moments::moments(f, vgrid)?;
    let closure = CeClosure { order, gas: *gas, eps };
    let fk = match equilibrium::discrete_ce_truncation(&state, grads, &closure, vgrid) {
        Ok(t) => t,
        Err(_) => equilibrium::ce_truncation(&state, grads, &closure, vgrid)?,
    };
    let distance = l1_distance(f, &fk.values, vgrid.weight()) / state.rho;
    let dt_ok = cfg.dt_over_eps_min <= 0.0 || dt / eps >= cfg.dt_over_eps_min;
    Ok(KineticToFluid { fluid: distance <= cfg.delta0 && dt_ok, distance })
}

/// First and second x-derivatives of a 1D field of states by centred
/// differences, with ghost states taken from the boundary condition.
pub fn field_derivatives(states: &[MacroState], space: &SpatialGrid) -> Vec<(Gradients, SecondGradients)> {
    let n = states.len();
    let dx = space.dx();
    let ghost = |i: isize| -> MacroState {
        let (src, flip) = match space.boundary {
            BoundaryKind::NeumannCopy => (if i < 0 { 0 } else { n - 1 }, false),
            BoundaryKind::Periodic => (i.rem_euclid(n as isize) as usize, false),
            BoundaryKind::SpecularWall => (if i < 0 { (-1 - i) as usize } else { 2 * n - 1 - i as usize }, true),
        };
        let mut s = states[src.min(n - 1)];
        if flip {
            s.u[0] = -s.u[0];
        }
        s
    };
    let at = |i: isize| if i >= 0 && (i as usize) < n { states[i as usize] } else { ghost(i) };
    (0..n as isize)
        .map(|i| {
            let (l, c, r) = (at(i - 1), at(i), at(i + 1));
            let d1 = |a: f64, b: f64| (b - a) / (2.0 * dx);
            let d2 = |a: f64, m: f64, b: f64| (a - 2.0 * m + b) / (dx * dx);
            let g = Gradients::along_x(
                d1(l.rho, r.rho),
                core::array::from_fn(|k| d1(l.u[k], r.u[k])),
                d1(l.temp, r.temp),
            );
            let s = SecondGradients::along_x(d2(l.rho, c.rho, r.rho), core::array::from_fn(|k| d2(l.u[k], c.u[k], r.u[k])));
            (g, s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_fields_give_identity() {
        let s = MacroState::new(1.0, [0.3, 0.0, 0.0], 1.0);
        let g = Gradients::default();
        let v = v_matrix_ns(&s, &g, 0.1, &GasModel::bgk());
        assert_eq!(v.matrix, linalg::IDENTITY);
        assert_eq!(v.eigenvalues, [1.0; 3]);
        let b = v_matrix_burnett(&s, &g, &SecondGradients::default(), 0.1, &GasModel::bgk()).unwrap();
        assert_eq!(b.matrix, linalg::IDENTITY);
        let cfg = IndicatorConfig::default();
        for k in 0..2 {
            assert!(!fluid_breakdown(k, &s, &g, &SecondGradients::default(), 0.1, &GasModel::bgk(), &cfg).unwrap());
        }
    }

    #[test]
    fn burnett_requires_bgk() {
        let s = MacroState::new(1.0, [0.0; 3], 1.0);
        let es = GasModel { beta: -0.5, omega: 1.0 };
        let r = v_matrix_burnett(&s, &Gradients::default(), &SecondGradients::default(), 0.1, &es);
        assert!(matches!(r, Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn ns_diagonal_in_1d() {
        let s = MacroState::new(0.8, [0.0; 3], 1.2);
        let (du, dt, eps) = (0.7, -0.4, 0.05);
        let gas = GasModel::bgk();
        let v = v_matrix_ns(&s, &Gradients::along_x(0.2, [du, 0.0, 0.0], dt), eps, &gas);
        let mu = gas.viscosity(0.8, 1.2);
        let kappa = gas.conductivity(0.8, 1.2);
        let a = eps * mu / (0.8 * 1.2) * du;
        let e1 = 1.0 - 4.0 / 3.0 * a - 2.0 / 3.0 * eps * eps * kappa * kappa / (0.64 * 1.2f64.powi(3)) * dt * dt;
        assert!((v.matrix[0][0] - e1).abs() < 1e-15);
        assert!((v.matrix[1][1] - (1.0 + 2.0 / 3.0 * a)).abs() < 1e-15);
        assert_eq!(v.matrix[0][1], 0.0);
    }

    #[test]
    fn sod_jump_breaks_euler() {
        let space = SpatialGrid::new(-0.5, 0.5, 100, BoundaryKind::NeumannCopy).unwrap();
        let states: Vec<MacroState> = space
            .centers()
            .iter()
            .map(|&x| if x < 0.0 { MacroState::new(1.0, [0.0; 3], 1.0) } else { MacroState::new(0.125, [0.0; 3], 0.25) })
            .collect();
        let d = field_derivatives(&states, &space);
        let cfg = IndicatorConfig::default();
        let flags: Vec<bool> = (0..100)
            .map(|i| fluid_breakdown(0, &states[i], &d[i].0, &d[i].1, 1e-2, &GasModel::bgk(), &cfg).unwrap())
            .collect();
        assert!(flags[49] && flags[50]);
        assert_eq!(flags.iter().filter(|&&b| b).count(), 2);
    }

    #[test]
    fn specular_derivatives_see_reflected_velocity() {
        let space = SpatialGrid::new(0.0, 1.0, 4, BoundaryKind::SpecularWall).unwrap();
        let states = [MacroState::new(1.0, [1.0, 0.0, 0.0], 1.0); 4];
        let d = field_derivatives(&states, &space);
        // ghost has u_x = -1, so du/dx = (1 - (-1)) / (2 dx) at the left cell
        assert!((d[0].0.u[0][0] - 2.0 / (2.0 * space.dx())).abs() < 1e-12);
        assert_eq!(d[1].0.u[0][0], 0.0);
    }
}
