//! Compressible Euler and Navier-Stokes solvers: non-staggered central
//! scheme (local Lax-Friedrichs flux on minmod-limited primitives) with
//! SSP-RK2 in time and explicit centred viscous fluxes.

use alloc::vec;
use alloc::vec::Vec;


#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{BoundaryKind, SpatialGrid};
use crate::state::{Conserved, GasModel, MacroState};
use crate::GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluidModel {
    Euler,
    NavierStokes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidConfig {
    pub model: FluidModel,
    pub cfl: f64,
    pub cfl_parabolic: f64,
    pub gas: GasModel,
}

impl Default for FluidConfig {
    fn default() -> Self {
        Self { model: FluidModel::Euler, cfl: 0.45, cfl_parabolic: 0.4, gas: GasModel::default() }
    }
}

/// Pressure from conserved variables, `p = (gamma - 1)(E - rho |u|^2 / 2)`.
#[inline]
pub fn pressure(u: &Conserved) -> f64 {
    let kin = 0.5 * (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / u[0];
    (GAMMA - 1.0) * (u[4] - kin)
}

/// Primitive variables `(rho, u_x, u_y, u_z, p)`.
type Prim = [f64; 5];

#[inline]
fn to_prim(u: &Conserved) -> Prim {
    let r = u[0];
    [r, u[1] / r, u[2] / r, u[3] / r, pressure(u)]
}

#[inline]
fn to_cons(w: &Prim) -> Conserved {
    let r = w[0];
    let kin = 0.5 * r * (w[1] * w[1] + w[2] * w[2] + w[3] * w[3]);
    Conserved([r, r * w[1], r * w[2], r * w[3], kin + w[4] / (GAMMA - 1.0)])
}

/// Physical x-flux of the Euler system.
#[inline]
pub fn euler_flux(u: &Conserved) -> Conserved {
    let w = to_prim(u);
    let ux = w[1];
    Conserved([u[1], u[1] * ux + w[4], u[2] * ux, u[3] * ux, (u[4] + w[4]) * ux])
}

#[inline]
fn signal_speed(w: &Prim) -> f64 {
    w[1].abs() + (GAMMA * w[4] / w[0]).sqrt()
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Ghost states for a boundary condition: `(left, right)` with index 0 the
/// cell adjacent to the domain.
pub fn fluid_boundary(u: &[Conserved], kind: BoundaryKind) -> ([Conserved; 2], [Conserved; 2]) {
    let n = u.len();
    let flip = |c: Conserved| Conserved([c[0], -c[1], c[2], c[3], c[4]]);
    match kind {
        BoundaryKind::NeumannCopy => ([u[0], u[0]], [u[n - 1], u[n - 1]]),
        BoundaryKind::Periodic => ([u[n - 1], u[n - 2]], [u[0], u[1]]),
        BoundaryKind::SpecularWall => ([flip(u[0]), flip(u[1])], [flip(u[n - 1]), flip(u[n - 2])]),
    }
}

/// Largest stable step over the `active` cells: hyperbolic CFL and, for
/// Navier-Stokes, the parabolic limit `cfl_par dx^2 rho / (eps max(mu, kappa))`.
pub fn max_dt(u: &[Conserved], eps: &[f64], cfg: &FluidConfig, dx: f64, active: Option<&[bool]>) -> f64 {
    let mut dt = f64::INFINITY;
    for (i, c) in u.iter().enumerate() {
        if !active.is_none_or(|a| a[i]) {
            continue;
        }
        let w = to_prim(c);
        dt = dt.min(cfg.cfl * dx / signal_speed(&w));
        if cfg.model == FluidModel::NavierStokes && eps[i] > 0.0 {
            let t = w[4] / w[0];
            let diff = cfg.gas.viscosity(w[0], t).max(cfg.gas.conductivity(w[0], t));
            dt = dt.min(cfg.cfl_parabolic * dx * dx * w[0] / (eps[i] * diff));
        }
    }
    dt
}

/// Heat flux `-eps kappa dT/dx` by centred differences (zero for Euler).
pub fn heat_flux(u: &[Conserved], eps: &[f64], cfg: &FluidConfig, space: &SpatialGrid) -> Vec<f64> {
    let n = u.len();
    if cfg.model == FluidModel::Euler {
        return vec![0.0; n];
    }
    let (gl, gr) = fluid_boundary(u, space.boundary);
    let temp = |c: &Conserved| MacroState::from_conserved(c).temp;
    let at = |i: isize| -> f64 {
        if i < 0 {
            temp(&gl[0])
        } else if i as usize >= n {
            temp(&gr[0])
        } else {
            temp(&u[i as usize])
        }
    };
    (0..n)
        .map(|i| {
            let s = MacroState::from_conserved(&u[i]);
            let dtdx = (at(i as isize + 1) - at(i as isize - 1)) / (2.0 * space.dx());
            -eps[i] * cfg.gas.conductivity(s.rho, s.temp) * dtdx
        })
        .collect()
}

/// Face fluxes that replace the computed ones, e.g. kinetic flux moments at
/// hybrid interfaces. Indexed by face, `n + 1` entries.
pub type FixedFluxes<'a> = Option<&'a [Option<Conserved>]>;

struct Workspace {
    ext: Vec<Prim>,
    slope: Vec<Prim>,
    flux: Vec<Conserved>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self { ext: vec![[0.0; 5]; n + 4], slope: vec![[0.0; 5]; n + 4], flux: vec![Conserved::ZERO; n + 1] }
    }
}

/// Right-hand side `-(H_{i+1/2} - H_{i-1/2}) / dx` on the active cells.
#[allow(clippy::too_many_arguments)]
fn rhs(
    u: &[Conserved],
    eps: &[f64],
    cfg: &FluidConfig,
    space: &SpatialGrid,
    active: Option<&[bool]>,
    fixed: FixedFluxes,
    ws: &mut Workspace,
    out: &mut [Conserved],
) {
    let n = u.len();
    let dx = space.dx();
    let is_active = |i: isize| i >= 0 && (i as usize) < n && active.is_none_or(|a| a[i as usize]);
    let (gl, gr) = fluid_boundary(u, space.boundary);
    ws.ext[0] = to_prim(&gl[1]);
    ws.ext[1] = to_prim(&gl[0]);
    for (i, c) in u.iter().enumerate() {
        ws.ext[i + 2] = to_prim(c);
    }
    ws.ext[n + 2] = to_prim(&gr[0]);
    ws.ext[n + 3] = to_prim(&gr[1]);
    for e in 1..n + 3 {
        let (a, b, c) = (&ws.ext[e - 1], &ws.ext[e], &ws.ext[e + 1]);
        ws.slope[e] = core::array::from_fn(|k| minmod(b[k] - a[k], c[k] - b[k]));
    }
    for j in 0..=n {
        let jj = j as isize;
        if !(is_active(jj - 1) || is_active(jj)) {
            continue;
        }
        if let Some(h) = fixed.and_then(|f| f[j]) {
            ws.flux[j] = h;
            continue;
        }
        // cells j-1 and j sit at ext[j+1], ext[j+2]
        let (wl, sl) = (&ws.ext[j + 1], &ws.slope[j + 1]);
        let (wr, sr) = (&ws.ext[j + 2], &ws.slope[j + 2]);
        let left: Prim = core::array::from_fn(|k| wl[k] + 0.5 * sl[k]);
        let right: Prim = core::array::from_fn(|k| wr[k] - 0.5 * sr[k]);
        let (ul, ur) = (to_cons(&left), to_cons(&right));
        let a = signal_speed(&left).max(signal_speed(&right));
        let mut h = (euler_flux(&ul) + euler_flux(&ur)) * 0.5 - (ur - ul) * (0.5 * a);
        if cfg.model == FluidModel::NavierStokes {
            h = h - viscous_flux(wl, wr, eps_face(eps, j, n), cfg, dx);
        }
        ws.flux[j] = h;
    }
    for i in 0..n {
        if is_active(i as isize) {
            out[i] = (ws.flux[i + 1] - ws.flux[i]) * (-1.0 / dx);
        }
    }
}

fn eps_face(eps: &[f64], j: usize, n: usize) -> f64 {
    let l = eps[j.saturating_sub(1).min(n - 1)];
    let r = eps[j.min(n - 1)];
    0.5 * (l + r)
}

/// Centred viscous and conductive flux between two neighbouring states.
fn viscous_flux(wl: &Prim, wr: &Prim, eps: f64, cfg: &FluidConfig, dx: f64) -> Conserved {
    if eps == 0.0 {
        return Conserved::ZERO;
    }
    let (tl, tr) = (wl[4] / wl[0], wr[4] / wr[0]);
    let mu = 0.5 * (cfg.gas.viscosity(wl[0], tl) + cfg.gas.viscosity(wr[0], tr));
    let kappa = 0.5 * (cfg.gas.conductivity(wl[0], tl) + cfg.gas.conductivity(wr[0], tr));
    let du: [f64; 3] = core::array::from_fn(|d| (wr[d + 1] - wl[d + 1]) / dx);
    let um: [f64; 3] = core::array::from_fn(|d| 0.5 * (wr[d + 1] + wl[d + 1]));
    let dt = (tr - tl) / dx;
    let sxx = 4.0 / 3.0 * mu * du[0];
    let sxy = mu * du[1];
    let sxz = mu * du[2];
    Conserved([0.0, eps * sxx, eps * sxy, eps * sxz, eps * (sxx * um[0] + sxy * um[1] + sxz * um[2] + kappa * dt)])
}

fn check_admissible(u: &[Conserved], active: Option<&[bool]>) -> Result<()> {
    for (i, c) in u.iter().enumerate() {
        if !active.is_none_or(|a| a[i]) {
            continue;
        }
        let p = pressure(c);
        if !(c[0] > crate::RHO_FLOOR) {
            return Err(Error::DegenerateCell { cell: i, rho: c[0] });
        }
        if !(p > 0.0) {
            return Err(Error::NegativePressure { cell: i, pressure: p });
        }
    }
    Ok(())
}

/// One SSP-RK2 step on the `active` cells (all when `None`); inactive cells
/// are read as data and left untouched. `fixed` fluxes are held over both
/// stages.
#[allow(clippy::too_many_arguments)]
pub fn fluid_step(
    u: &mut [Conserved],
    space: &SpatialGrid,
    eps: &[f64],
    cfg: &FluidConfig,
    dt: f64,
    active: Option<&[bool]>,
    fixed: FixedFluxes,
) -> Result<()> {
    let n = u.len();
    if n < 2 {
        return Err(Error::InvalidGrid("need at least two cells"));
    }
    let limit = max_dt(u, eps, cfg, space.dx(), active);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    let mut ws = Workspace::new(n);
    let mut k = vec![Conserved::ZERO; n];
    rhs(u, eps, cfg, space, active, fixed, &mut ws, &mut k);
    let mut stage: Vec<Conserved> = u.to_vec();
    for i in 0..n {
        if active.is_none_or(|a| a[i]) {
            stage[i] = u[i] + k[i] * dt;
        }
    }
    check_admissible(&stage, active)?;
    rhs(&stage, eps, cfg, space, active, fixed, &mut ws, &mut k);
    for i in 0..n {
        if active.is_none_or(|a| a[i]) {
            u[i] = (u[i] + stage[i] + k[i] * dt) * 0.5;
        }
    }
    check_admissible(u, active)
}

/// Euler step over the whole domain.
pub fn euler_step(u: &mut [Conserved], space: &SpatialGrid, cfg: &FluidConfig, dt: f64) -> Result<()> {
    let cfg = FluidConfig { model: FluidModel::Euler, ..*cfg };
    let eps = vec![0.0; u.len()];
    fluid_step(u, space, &eps, &cfg, dt, None, None)
}

/// Navier-Stokes step over the whole domain with per-cell Knudsen numbers.
pub fn cns_step(u: &mut [Conserved], space: &SpatialGrid, eps: &[f64], cfg: &FluidConfig, dt: f64) -> Result<()> {
    let cfg = FluidConfig { model: FluidModel::NavierStokes, ..*cfg };
    fluid_step(u, space, eps, &cfg, dt, None, None)
}
