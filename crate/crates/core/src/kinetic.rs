//! ES-BGK discrete-velocity solver: MUSCL-Hancock transport in x and a
//! closed-form implicit relaxation step, composed by operator splitting.

use alloc::vec;
use alloc::vec::Vec;


#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::equilibrium::{esbgk_tensor, gaussian_into, match_moments_linear, matched_gaussian_into};
use crate::error::{Error, Result};
use crate::field::DistributionField;
use crate::grid::{BoundaryKind, SpatialGrid, VelocityGrid};
use crate::linalg::{self, Mat3};
use crate::moments;
use crate::state::{Conserved, GasModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticConfig {
    /// Transport Courant number, in `(0, 1]`.
    pub cfl: f64,
    pub gas: GasModel,
}

impl Default for KineticConfig {
    fn default() -> Self {
        Self { cfl: 0.5, gas: GasModel::default() }
    }
}

impl KineticConfig {
    /// Largest transport step, `cfl dx / v_max`.
    pub fn max_dt(&self, dx: f64, vgrid: &VelocityGrid) -> f64 {
        self.cfl * dx / vgrid.v_max()
    }
}

/// Two ghost slices on each side of the domain. `left[0]` is cell `-1`,
/// `left[1]` cell `-2`; `right[0]` is cell `n`, `right[1]` cell `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ghosts {
    pub left: [Vec<f64>; 2],
    pub right: [Vec<f64>; 2],
}

/// Fills the ghost slices for a boundary condition.
pub fn apply_boundary(f: &DistributionField, kind: BoundaryKind, vgrid: &VelocityGrid) -> Result<Ghosts> {
    let n = f.n_cells();
    if n < 2 {
        return Err(Error::InvalidGrid("need at least two cells"));
    }
    let ghosts = match kind {
        BoundaryKind::NeumannCopy => Ghosts {
            left: [f.cell(0).to_vec(), f.cell(0).to_vec()],
            right: [f.cell(n - 1).to_vec(), f.cell(n - 1).to_vec()],
        },
        BoundaryKind::Periodic => Ghosts {
            left: [f.cell(n - 1).to_vec(), f.cell(n - 2).to_vec()],
            right: [f.cell(0).to_vec(), f.cell(1).to_vec()],
        },
        BoundaryKind::SpecularWall => {
            vgrid.check_symmetric()?;
            let mirror = |s: &[f64]| -> Vec<f64> { (0..s.len()).map(|k| s[vgrid.mirror_x(k)]).collect() };
            Ghosts {
                left: [mirror(f.cell(0)), mirror(f.cell(1))],
                right: [mirror(f.cell(n - 1)), mirror(f.cell(n - 2))],
            }
        }
    };
    Ok(ghosts)
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

/// Upwind MUSCL-Hancock flux `v_x f_face` for every node at the face between
/// `c1` and `c2`, given the stencil `c0, c1, c2, c3`.
pub fn face_flux(stencil: [&[f64]; 4], vgrid: &VelocityGrid, dt_dx: f64, out: &mut [f64]) {
    let [c0, c1, c2, c3] = stencil;
    let n = vgrid.n_per_axis();
    let block = n * n;
    for (jx, &vx) in vgrid.axis().iter().enumerate() {
        let r = jx * block..(jx + 1) * block;
        let courant = vx.abs() * dt_dx;
        let h = 0.5 * (1.0 - courant);
        if vx > 0.0 {
            for k in r {
                let s = minmod(c1[k] - c0[k], c2[k] - c1[k]);
                out[k] = vx * (c1[k] + h * s);
            }
        } else {
            for k in r {
                let s = minmod(c2[k] - c1[k], c3[k] - c2[k]);
                out[k] = vx * (c2[k] - h * s);
            }
        }
    }
}

/// Velocity moments `sum (1, v, |v|^2/2) F dv^3` of a kinetic face flux.
pub fn flux_moments(flux: &[f64], vgrid: &VelocityGrid) -> Conserved {
    moments::conserved_moments(flux, vgrid)
}

fn stencil_cell<'a>(f: &'a DistributionField, ghosts: &'a Ghosts, i: isize) -> &'a [f64] {
    let n = f.n_cells() as isize;
    match i {
        -2 => &ghosts.left[1],
        -1 => &ghosts.left[0],
        _ if i == n => &ghosts.right[0],
        _ if i == n + 1 => &ghosts.right[1],
        _ => f.cell(i as usize),
    }
}

/// One explicit transport step on the cells flagged in `active` (all cells
/// when `None`). Returns the flux moments through every face that touches an
/// active cell; other faces report zero.
///
/// Face `j` separates cells `j - 1` and `j`, so there are `n + 1` faces.
pub fn transport_masked(
    f: &mut DistributionField,
    ghosts: &Ghosts,
    vgrid: &VelocityGrid,
    dx: f64,
    dt: f64,
    active: Option<&[bool]>,
) -> Vec<Conserved> {
    let n = f.n_cells();
    let nv = f.n_nodes();
    let is_active = |i: isize| i >= 0 && (i as usize) < n && active.is_none_or(|a| a[i as usize]);
    let old = f.clone();
    let dt_dx = dt / dx;
    let mut face_moments = vec![Conserved::ZERO; n + 1];
    let mut left = vec![0.0; nv];
    let mut right = vec![0.0; nv];
    let mut have_left = false;
    for j in 0..=n {
        let jj = j as isize;
        let needed = is_active(jj - 1) || is_active(jj);
        if !needed {
            have_left = false;
            continue;
        }
        let st = [
            stencil_cell(&old, ghosts, jj - 2),
            stencil_cell(&old, ghosts, jj - 1),
            stencil_cell(&old, ghosts, jj),
            stencil_cell(&old, ghosts, jj + 1),
        ];
        face_flux(st, vgrid, dt_dx, &mut right);
        face_moments[j] = flux_moments(&right, vgrid);
        if is_active(jj - 1) {
            debug_assert!(have_left);
            let cell = f.cell_mut(j - 1);
            for k in 0..nv {
                cell[k] -= dt_dx * (right[k] - left[k]);
            }
        }
        core::mem::swap(&mut left, &mut right);
        have_left = true;
    }
    face_moments
}

/// Explicit transport over the whole domain with the grid's boundary
/// condition.
pub fn transport_step(
    f: &mut DistributionField,
    space: &SpatialGrid,
    vgrid: &VelocityGrid,
    dt: f64,
    cfl: f64,
) -> Result<()> {
    let limit = cfl * space.dx() / vgrid.v_max();
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    let ghosts = apply_boundary(f, space.boundary, vgrid)?;
    transport_masked(f, &ghosts, vgrid, space.dx(), dt, None);
    Ok(())
}

/// Exact relaxation of the stress tensor over `dt`:
/// `Theta' = T I + (Theta - T I) exp(-(1 - beta) nu dt / eps)`.
pub fn relax_stress(theta: &Mat3, temp: f64, beta: f64, rate: f64) -> Mat3 {
    let decay = (-(1.0 - beta) * rate).exp();
    let mut out = linalg::scale(theta, decay);
    for (i, row) in out.iter_mut().enumerate() {
        row[i] += temp * (1.0 - decay);
    }
    out
}

/// Builds the collision target for one cell into `out` and returns the
/// relaxation factor `dt nu / eps`.
fn collision_target(f: &[f64], vgrid: &VelocityGrid, gas: &GasModel, eps: f64, dt: f64, out: &mut [f64]) -> Result<f64> {
    let (state, theta) = moments::stress_tensor(f, vgrid)?;
    let nu = gas.collision_frequency(state.rho, state.temp);
    let rate = dt * nu / eps;
    let t = state.temp;
    let mut tau = [[t, 0.0, 0.0], [0.0, t, 0.0], [0.0, 0.0, t]];
    if gas.beta != 0.0 {
        let candidate = esbgk_tensor(t, &relax_stress(&theta, t, gas.beta, rate), gas.beta);
        let min_ev = linalg::sym_eigenvalues(&candidate)[0];
        if min_ev > 0.0 {
            tau = candidate;
        } else {
            log::warn!("ES-BGK tensor not positive definite (min eigenvalue {min_ev}); falling back to BGK for this cell");
        }
    }
    let target = moments::conserved_moments(f, vgrid);
    if let Err(e) = matched_gaussian_into(out, state.rho, &state.u, &tau, &target, vgrid) {
        log::warn!("exponential moment correction failed ({e}); using linear defect correction");
        gaussian_into(out, state.rho, &state.u, &tau, vgrid)?;
        match_moments_linear(out, &target, vgrid)?;
    }
    Ok(rate)
}

/// Implicit relaxation of one cell, `f' = (f + lambda G) / (1 + lambda)`.
pub fn collision_cell(f: &mut [f64], vgrid: &VelocityGrid, gas: &GasModel, eps: f64, dt: f64, scratch: &mut [f64]) -> Result<()> {
    let lambda = collision_target(f, vgrid, gas, eps, dt, scratch)?;
    let w = 1.0 / (1.0 + lambda);
    for (x, g) in f.iter_mut().zip(scratch.iter()) {
        *x = (*x + lambda * g) * w;
    }
    Ok(())
}

/// Collision step on every cell flagged in `active` (all when `None`).
pub fn collision_step(
    f: &mut DistributionField,
    vgrid: &VelocityGrid,
    gas: &GasModel,
    eps: &[f64],
    dt: f64,
    active: Option<&[bool]>,
) -> Result<()> {
    let mut scratch = vec![0.0; f.n_nodes()];
    for (i, cell) in f.cells_mut().enumerate() {
        if active.is_none_or(|a| a[i]) {
            collision_cell(cell, vgrid, gas, eps[i], dt, &mut scratch).map_err(|e| match e {
                Error::DegenerateCell { rho, .. } => Error::DegenerateCell { cell: i, rho },
                other => other,
            })?;
        }
    }
    Ok(())
}

/// Transport then collision over the whole domain.
pub fn kinetic_step(
    f: &mut DistributionField,
    space: &SpatialGrid,
    vgrid: &VelocityGrid,
    cfg: &KineticConfig,
    eps: &[f64],
    dt: f64,
) -> Result<()> {
    transport_step(f, space, vgrid, dt, cfg.cfl)?;
    collision_step(f, vgrid, &cfg.gas, eps, dt, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{discrete_equilibrium, maxwellian};
    use crate::state::MacroState;

    fn vgrid() -> VelocityGrid {
        VelocityGrid::new(8.0, 12).unwrap()
    }

    fn filled(n: usize, vg: &VelocityGrid, s: impl Fn(usize) -> MacroState) -> DistributionField {
        let mut f = DistributionField::zeros(n, vg.len());
        for i in 0..n {
            f.cell_mut(i).copy_from_slice(&maxwellian(&s(i), vg).unwrap());
        }
        f
    }

    #[test]
    fn uniform_field_is_unchanged_by_transport() {
        let vg = vgrid();
        for kind in [BoundaryKind::Periodic, BoundaryKind::NeumannCopy, BoundaryKind::SpecularWall] {
            let space = SpatialGrid::new(0.0, 1.0, 8, kind).unwrap();
            let mut f = filled(8, &vg, |_| MacroState::new(1.0, [0.0; 3], 1.0));
            let before = f.clone();
            transport_step(&mut f, &space, &vg, 0.5 * space.dx() / 8.0, 0.5).unwrap();
            assert_eq!(f, before, "{kind:?}");
        }
    }

    #[test]
    fn cfl_violation_is_reported() {
        let vg = vgrid();
        let space = SpatialGrid::new(0.0, 1.0, 8, BoundaryKind::Periodic).unwrap();
        let mut f = filled(8, &vg, |_| MacroState::new(1.0, [0.0; 3], 1.0));
        assert!(matches!(
            transport_step(&mut f, &space, &vg, space.dx(), 0.5),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn specular_wall_has_no_mass_flux() {
        let vg = vgrid();
        let space = SpatialGrid::new(0.0, 1.0, 6, BoundaryKind::SpecularWall).unwrap();
        let mut f = filled(6, &vg, |i| MacroState::new(1.0 + 0.1 * i as f64, [0.3 - 0.1 * i as f64, 0.0, 0.0], 1.0));
        let ghosts = apply_boundary(&f, space.boundary, &vg).unwrap();
        let fm = transport_masked(&mut f, &ghosts, &vg, space.dx(), 0.01, None);
        for k in [0, 4] {
            assert!(fm[0][k].abs() < 1e-15);
            assert!(fm[6][k].abs() < 1e-15);
        }
    }

    #[test]
    fn relaxation_limits() {
        let vg = vgrid();
        let a = maxwellian(&MacroState::new(0.5, [1.0, 0.0, 1.0], 1.0), &vg).unwrap();
        let b = maxwellian(&MacroState::new(0.5, [-1.0, 0.0, -1.0], 1.0), &vg).unwrap();
        let f: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let mut g = f.clone();
        let mut scratch = vec![0.0; vg.len()];
        collision_cell(&mut g, &vg, &GasModel::bgk(), 1e-6, 1.0, &mut scratch).unwrap();
        let s = moments::moments(&f, &vg).unwrap();
        let target = discrete_equilibrium(&s, &vg).unwrap();
        assert!(crate::field::l1_distance(&g, &target, vg.weight()) < 1e-5);
    }

    #[test]
    fn stress_relaxation_is_exact() {
        let theta = [[2.0, 0.2, 0.0], [0.2, 0.5, 0.0], [0.0, 0.0, 0.5]];
        let t = linalg::trace(&theta) / 3.0;
        let r = relax_stress(&theta, t, -0.5, 0.0);
        assert_eq!(r, theta);
        let r = relax_stress(&theta, t, -0.5, 1e3);
        assert!((r[0][0] - t).abs() < 1e-15 && r[0][1].abs() < 1e-15);
        // trace is conserved by the relaxation
        let r = relax_stress(&theta, t, -0.5, 0.4);
        assert!((linalg::trace(&r) - 3.0 * t).abs() < 1e-14);
    }
}
