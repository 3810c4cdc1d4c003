//! Velocity moments of a discrete distribution (midpoint quadrature).


#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::VelocityGrid;
use crate::linalg::{Mat3, Vec3, ZERO33, ZERO3};
use crate::state::{Conserved, MacroState};
use crate::RHO_FLOOR;

/// Calls `f(flat_index, v)` for every node in storage order.
#[inline]
pub fn for_each_node(grid: &VelocityGrid, mut f: impl FnMut(usize, Vec3)) {
    let axis = grid.axis();
    let mut k = 0;
    for &vx in axis {
        for &vy in axis {
            for &vz in axis {
                f(k, [vx, vy, vz]);
                k += 1;
            }
        }
    }
}

/// Dimensionless anisotropy moments of a distribution.
///
/// `a_bar = <A(V)>`, `b_bar = <B(V)>` and `c_bar = 2/3 <(|V|^2/2 - 3/2)^2>`
/// with `V = (v - u)/sqrt(T)`, `A(V) = V (x) V - |V|^2/3 I`,
/// `B(V) = (|V|^2 - 5) V / 2` and `<.>` the density-normalised average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizabilityBundle {
    pub a_bar: Mat3,
    pub b_bar: Vec3,
    pub c_bar: f64,
}

/// Raw conserved sums `(rho, rho u, E)` of one cell, with no admissibility
/// checks.
pub fn conserved_moments(f: &[f64], grid: &VelocityGrid) -> Conserved {
    let mut s = [0.0; 5];
    for_each_node(grid, |k, v| {
        let w = f[k];
        s[0] += w;
        s[1] += w * v[0];
        s[2] += w * v[1];
        s[3] += w * v[2];
        s[4] += 0.5 * w * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    });
    let dv3 = grid.weight();
    Conserved(s.map(|x| x * dv3))
}

/// Density, bulk velocity and temperature of one cell. The temperature is
/// taken from the centred second moment.
pub fn moments(f: &[f64], grid: &VelocityGrid) -> Result<MacroState> {
    let dv3 = grid.weight();
    let mut m0 = 0.0;
    let mut m1 = ZERO3;
    for_each_node(grid, |k, v| {
        let w = f[k];
        m0 += w;
        m1[0] += w * v[0];
        m1[1] += w * v[1];
        m1[2] += w * v[2];
    });
    let rho = m0 * dv3;
    if !(rho > RHO_FLOOR) {
        return Err(Error::DegenerateCell { cell: 0, rho });
    }
    let u = [m1[0] / m0, m1[1] / m0, m1[2] / m0];
    let mut c2 = 0.0;
    for_each_node(grid, |k, v| {
        let (a, b, c) = (v[0] - u[0], v[1] - u[1], v[2] - u[2]);
        c2 += f[k] * (a * a + b * b + c * c);
    });
    let temp = c2 / (3.0 * m0);
    Ok(MacroState { rho, u, temp })
}

/// `Theta = 1/rho sum (v - u) (x) (v - u) f dv^3`, together with the moments
/// it was centred on.
pub fn stress_tensor(f: &[f64], grid: &VelocityGrid) -> Result<(MacroState, Mat3)> {
    let state = moments(f, grid)?;
    let u = state.u;
    let mut s = ZERO33;
    let mut m0 = 0.0;
    for_each_node(grid, |k, v| {
        let w = f[k];
        let c = [v[0] - u[0], v[1] - u[1], v[2] - u[2]];
        m0 += w;
        for i in 0..3 {
            for j in i..3 {
                s[i][j] += w * c[i] * c[j];
            }
        }
    });
    for i in 0..3 {
        for j in i..3 {
            s[i][j] /= m0;
            s[j][i] = s[i][j];
        }
    }
    Ok((state, s))
}

pub fn realizability_moments(f: &[f64], grid: &VelocityGrid) -> Result<RealizabilityBundle> {
    let state = moments(f, grid)?;
    Ok(realizability_about(f, grid, &state))
}

/// Realizability moments centred on a given state instead of the moments of
/// `f` itself.
pub fn realizability_about(f: &[f64], grid: &VelocityGrid, state: &MacroState) -> RealizabilityBundle {
    let u = state.u;
    let inv_sqrt_t = 1.0 / state.temp.sqrt();
    let mut m0 = 0.0;
    let mut vv = ZERO33;
    let mut b = ZERO3;
    let mut c = 0.0;
    for_each_node(grid, |k, v| {
        let w = f[k];
        let cv = [(v[0] - u[0]) * inv_sqrt_t, (v[1] - u[1]) * inv_sqrt_t, (v[2] - u[2]) * inv_sqrt_t];
        let q = cv[0] * cv[0] + cv[1] * cv[1] + cv[2] * cv[2];
        m0 += w;
        for i in 0..3 {
            for j in i..3 {
                vv[i][j] += w * cv[i] * cv[j];
            }
        }
        let hb = 0.5 * (q - 5.0) * w;
        b[0] += hb * cv[0];
        b[1] += hb * cv[1];
        b[2] += hb * cv[2];
        let e = 0.5 * q - 1.5;
        c += w * e * e;
    });
    for i in 0..3 {
        for j in i..3 {
            vv[i][j] /= m0;
            vv[j][i] = vv[i][j];
        }
    }
    let tr3 = (vv[0][0] + vv[1][1] + vv[2][2]) / 3.0;
    let mut a_bar = vv;
    for (i, row) in a_bar.iter_mut().enumerate() {
        row[i] -= tr3;
    }
    RealizabilityBundle { a_bar, b_bar: b.map(|x| x / m0), c_bar: 2.0 / 3.0 * c / m0 }
}

/// Heat flux `q = 1/2 sum (v - u) |v - u|^2 f dv^3`.
pub fn heat_flux(f: &[f64], grid: &VelocityGrid) -> Result<Vec3> {
    let state = moments(f, grid)?;
    let u = state.u;
    let mut q = ZERO3;
    for_each_node(grid, |k, v| {
        let c = [v[0] - u[0], v[1] - u[1], v[2] - u[2]];
        let h = 0.5 * f[k] * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
        q[0] += h * c[0];
        q[1] += h * c[1];
        q[2] += h * c[2];
    });
    let dv3 = grid.weight();
    Ok(q.map(|x| x * dv3))
}

/// Discrete entropy `sum f log f dv^3` (with `0 log 0 = 0`).
pub fn entropy(f: &[f64], grid: &VelocityGrid) -> f64 {
    f.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>() * grid.weight()
}
