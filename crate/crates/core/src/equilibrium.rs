//! Maxwellians, ES-BGK Gaussians, moment-matched discrete equilibria and
//! truncated Chapman-Enskog distributions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;


#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::VelocityGrid;
use crate::linalg::{self, Mat3, Vec3};
use crate::moments::{self, for_each_node};
use crate::state::{Conserved, GasModel, Gradients, MacroState};

/// Newton iteration cap for moment matching.
pub const MAX_NEWTON_ITERATIONS: usize = 50;

/// Relative residual at which moment matching stops.
const NEWTON_TOL: f64 = 1e-13;

/// Residual accepted when the iteration stalls at round-off.
const NEWTON_STALL_TOL: f64 = 1e-10;

/// Samples `rho (2 pi T)^(-3/2) exp(-|v - u|^2 / 2T)` at the grid nodes.
pub fn maxwellian(state: &MacroState, grid: &VelocityGrid) -> Result<Vec<f64>> {
    let mut out = vec![0.0; grid.len()];
    maxwellian_into(&mut out, state, grid)?;
    Ok(out)
}

pub fn maxwellian_into(out: &mut [f64], state: &MacroState, grid: &VelocityGrid) -> Result<()> {
    let t = state.temp;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTemperature(t));
    }
    gaussian_diagonal_into(out, state.rho, &state.u, [t, t, t], grid);
    Ok(())
}

/// Gaussian with a diagonal temperature tensor, evaluated axis by axis.
fn gaussian_diagonal_into(out: &mut [f64], rho: f64, u: &Vec3, t: Vec3, grid: &VelocityGrid) {
    Separable::gaussian(rho, u, t, grid).write(out);
}

/// Samples the anisotropic Gaussian
/// `rho / sqrt(det(2 pi Tau)) exp(-(v-u) Tau^-1 (v-u) / 2)`.
pub fn gaussian_into(out: &mut [f64], rho: f64, u: &Vec3, tau: &Mat3, grid: &VelocityGrid) -> Result<()> {
    let ev = linalg::sym_eigenvalues(tau);
    if !(ev[0] > 0.0) {
        return Err(Error::NonSpdTensor { min_eigenvalue: ev[0] });
    }
    let scale = linalg::trace(tau).abs();
    let off = tau[0][1].abs().max(tau[0][2].abs()).max(tau[1][2].abs());
    if off <= 1e-15 * scale {
        gaussian_diagonal_into(out, rho, u, [tau[0][0], tau[1][1], tau[2][2]], grid);
        return Ok(());
    }
    let inv = linalg::inverse(tau).ok_or(Error::NonSpdTensor { min_eigenvalue: ev[0] })?;
    let norm = rho / ((2.0 * PI).powi(3) * linalg::det(tau)).sqrt();
    for_each_node(grid, |k, v| {
        let c = [v[0] - u[0], v[1] - u[1], v[2] - u[2]];
        let q = linalg::dot(&c, &linalg::mat_vec(&inv, &c));
        out[k] = norm * (-0.5 * q).exp();
    });
    Ok(())
}

/// Corrected temperature tensor `(1 - beta) T I + beta Theta`.
pub fn esbgk_tensor(temp: f64, theta: &Mat3, beta: f64) -> Mat3 {
    let mut tau = linalg::scale(theta, beta);
    for (i, row) in tau.iter_mut().enumerate() {
        row[i] += (1.0 - beta) * temp;
    }
    tau
}

/// ES-BGK target Gaussian `G[f]`, sampled analytically from the moments and
/// stress tensor of `f`.
pub fn esbgk_gaussian(f: &[f64], grid: &VelocityGrid, beta: f64) -> Result<Vec<f64>> {
    let (state, theta) = moments::stress_tensor(f, grid)?;
    let mut out = vec![0.0; grid.len()];
    if beta == 0.0 {
        maxwellian_into(&mut out, &state, grid)?;
    } else {
        let tau = esbgk_tensor(state.temp, &theta, beta);
        gaussian_into(&mut out, state.rho, &state.u, &tau, grid)?;
    }
    Ok(out)
}

/// Basis `(1, c, |c|^2/2 - 3/2)` with `c = (v - u)/sqrt(T)` of a reference
/// state, stored per axis so that sums over the grid stay separable.
struct InvariantBasis {
    c: [Vec<f64>; 3],
}

impl InvariantBasis {
    fn new(grid: &VelocityGrid, center: &MacroState) -> Self {
        let s = 1.0 / center.temp.sqrt();
        let c = core::array::from_fn(|d| grid.axis().iter().map(|&v| (v - center.u[d]) * s).collect());
        Self { c }
    }

    /// `exp(alpha . m)` per axis: returns the constant prefactor and the three
    /// axis factors.
    fn exp_factors(&self, alpha: &[f64; 5]) -> (f64, [Vec<f64>; 3]) {
        let pre = (alpha[0] - 1.5 * alpha[4]).exp();
        let f = core::array::from_fn(|d| {
            self.c[d].iter().map(|&c| (alpha[1 + d] * c + 0.5 * alpha[4] * c * c).exp()).collect()
        });
        (pre, f)
    }

    /// Moments `sum m w` and Gram matrix `sum m m^T w` of weights
    /// `w_k = base_k * scale(k)`.
    fn gram(&self, base: &[f64], factors: Option<&(f64, [Vec<f64>; 3])>) -> ([f64; 5], [[f64; 5]; 5]) {
        let n = self.c[0].len();
        let mut mom = [0.0; 5];
        let mut g = [[0.0; 5]; 5];
        let mut k = 0;
        for jx in 0..n {
            let cx = self.c[0][jx];
            for jy in 0..n {
                let cy = self.c[1][jy];
                let sxy = factors.map(|(p, f)| p * f[0][jx] * f[1][jy]);
                for jz in 0..n {
                    let cz = self.c[2][jz];
                    let b = base[k];
                    k += 1;
                    if b == 0.0 {
                        continue;
                    }
                    let w = match sxy {
                        Some(s) => b * s * factors.unwrap().1[2][jz],
                        None => b,
                    };
                    let m = [1.0, cx, cy, cz, 0.5 * (cx * cx + cy * cy + cz * cz) - 1.5];
                    for a in 0..5 {
                        let wa = w * m[a];
                        mom[a] += wa;
                        for b in a..5 {
                            g[a][b] += wa * m[b];
                        }
                    }
                }
            }
        }
        for a in 0..5 {
            for b in 0..a {
                g[a][b] = g[b][a];
            }
        }
        (mom, g)
    }

    fn apply(&self, base: &mut [f64], factors: &(f64, [Vec<f64>; 3])) {
        let n = self.c[0].len();
        let (pre, f) = factors;
        let mut k = 0;
        for jx in 0..n {
            for jy in 0..n {
                let s = pre * f[0][jx] * f[1][jy];
                for jz in 0..n {
                    if base[k] != 0.0 {
                        base[k] = base[k] * s * f[2][jz];
                    }
                    k += 1;
                }
            }
        }
    }
}

fn residual(mom: &[f64; 5], target: &[f64; 5], dv3: f64) -> [f64; 5] {
    core::array::from_fn(|a| mom[a] * dv3 - target[a])
}

/// Largest magnitude; infinite if any entry is not finite.
fn max_abs(r: &[f64; 5]) -> f64 {
    r.iter().fold(0.0, |m: f64, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY })
}

type MomentsAndGram = ([f64; 5], [[f64; 5]; 5]);

/// Damped Newton on the exponential-family parameters `alpha`. `eval`
/// returns the raw sums `sum m w` and `sum m m^T w` of the corrected weights.
fn newton(mut eval: impl FnMut(&[f64; 5]) -> MomentsAndGram, goal: &[f64; 5], scale: f64, dv3: f64) -> Result<([f64; 5], usize)> {
    let mut alpha = [0.0; 5];
    let (mom, mut gram) = eval(&alpha);
    let mut r = residual(&mom, goal, dv3);
    let mut err = max_abs(&r) / scale;
    if !err.is_finite() {
        return Err(Error::NewtonDivergence { iterations: 0, residual: err });
    }
    for it in 0..MAX_NEWTON_ITERATIONS {
        if err <= NEWTON_TOL {
            return Ok((alpha, it));
        }
        let jac = gram.map(|row| row.map(|x| x * dv3));
        let step = linalg::solve_dense(jac, r.map(|x| -x))
            .ok_or(Error::NewtonDivergence { iterations: it, residual: err })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: [f64; 5] = core::array::from_fn(|a| alpha[a] + lambda * step[a]);
            let (m2, g2) = eval(&trial);
            let r2 = residual(&m2, goal, dv3);
            let e2 = max_abs(&r2) / scale;
            if e2.is_finite() && e2 < err {
                accepted = Some((trial, g2, r2, e2));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((a, g2, r2, e2)) => {
                alpha = a;
                gram = g2;
                r = r2;
                err = e2;
            }
            None if err <= NEWTON_STALL_TOL => return Ok((alpha, it)),
            None => return Err(Error::NewtonDivergence { iterations: it, residual: err }),
        }
    }
    if err <= NEWTON_STALL_TOL {
        return Ok((alpha, MAX_NEWTON_ITERATIONS));
    }
    Err(Error::NewtonDivergence { iterations: MAX_NEWTON_ITERATIONS, residual: err })
}

fn admissible_center(target: &Conserved) -> Result<MacroState> {
    let center = MacroState::from_conserved(target);
    if !center.is_admissible() {
        if !(center.rho > crate::RHO_FLOOR) {
            return Err(Error::DegenerateCell { cell: 0, rho: center.rho });
        }
        return Err(Error::NonPositiveTemperature(center.temp));
    }
    Ok(center)
}

/// Rescales a positive `base` distribution by `exp(alpha . m(v))` so that its
/// discrete `(rho, rho u, E)` equal `target` to round-off.
///
/// Damped Newton on the five exponential-family parameters, starting from
/// `alpha = 0`. Returns the number of iterations used.
pub fn match_moments(base: &mut [f64], target: &Conserved, grid: &VelocityGrid) -> Result<usize> {
    let center = admissible_center(target)?;
    let basis = InvariantBasis::new(grid, &center);
    let goal = [center.rho, 0.0, 0.0, 0.0, 0.0];
    let (alpha, it) = newton(
        |a| {
            if a.iter().all(|&x| x == 0.0) {
                basis.gram(base, None)
            } else {
                basis.gram(base, Some(&basis.exp_factors(a)))
            }
        },
        &goal,
        center.rho,
        grid.weight(),
    )?;
    if it > 0 {
        basis.apply(base, &basis.exp_factors(&alpha));
    }
    Ok(it)
}

/// Exponents per axis of each basis function `(1, cx, cy, cz, |c|^2/2 - 3/2)`
/// written as a sum of monomials `coef * cx^px cy^py cz^pz`.
const BASIS_TERMS: [&[(f64, [usize; 3])]; 5] = [
    &[(1.0, [0, 0, 0])],
    &[(1.0, [1, 0, 0])],
    &[(1.0, [0, 1, 0])],
    &[(1.0, [0, 0, 1])],
    &[(0.5, [2, 0, 0]), (0.5, [0, 2, 0]), (0.5, [0, 0, 2]), (-1.5, [0, 0, 0])],
];

/// Sums of monomials against a separable weight.
struct PowerSums {
    pre: f64,
    s: [[f64; 6]; 3],
}

impl PowerSums {
    fn monomial(&self, p: [usize; 3]) -> f64 {
        self.pre * self.s[0][p[0]] * self.s[1][p[1]] * self.s[2][p[2]]
    }

    fn expect(&self, terms: &[(f64, [usize; 3])]) -> f64 {
        terms.iter().map(|&(c, p)| c * self.monomial(p)).sum()
    }

    fn expect_product(&self, a: &[(f64, [usize; 3])], b: &[(f64, [usize; 3])]) -> f64 {
        let mut sum = 0.0;
        for &(ca, pa) in a {
            for &(cb, pb) in b {
                sum += ca * cb * self.monomial([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]]);
            }
        }
        sum
    }
}

/// A distribution of product form `pre * a_x(jx) a_y(jy) a_z(jz)`, such as a
/// Gaussian with a diagonal temperature tensor. Its exponential correction
/// stays a product, so moment matching costs O(n) per iteration.
struct Separable {
    pre: f64,
    axes: [Vec<f64>; 3],
}

impl Separable {
    fn gaussian(rho: f64, u: &Vec3, t: Vec3, grid: &VelocityGrid) -> Self {
        let axis = grid.axis();
        let pre = rho / ((2.0 * PI).powi(3) * t[0] * t[1] * t[2]).sqrt();
        let axes = core::array::from_fn(|d| axis.iter().map(|&v| (-(v - u[d]) * (v - u[d]) / (2.0 * t[d])).exp()).collect());
        Self { pre, axes }
    }

    /// Axis weights after the correction `exp(alpha . m)`.
    fn corrected(&self, basis: &InvariantBasis, alpha: &[f64; 5]) -> Self {
        let pre = self.pre * (alpha[0] - 1.5 * alpha[4]).exp();
        let axes = core::array::from_fn(|d| {
            self.axes[d]
                .iter()
                .zip(&basis.c[d])
                .map(|(&a, &c)| if a == 0.0 { 0.0 } else { a * (alpha[1 + d] * c + 0.5 * alpha[4] * c * c).exp() })
                .collect()
        });
        Self { pre, axes }
    }

    /// Per-axis power sums `sum_j a(j) c_j^p` for `p = 0..=5`.
    fn power_sums(&self, basis: &InvariantBasis) -> PowerSums {
        let s = core::array::from_fn(|d| {
            let mut acc = [0.0; 6];
            for (&a, &c) in self.axes[d].iter().zip(&basis.c[d]) {
                let mut p = a;
                for x in acc.iter_mut() {
                    *x += p;
                    p *= c;
                }
            }
            acc
        });
        PowerSums { pre: self.pre, s }
    }

    fn moments_and_gram(&self, basis: &InvariantBasis) -> MomentsAndGram {
        let ps = self.power_sums(basis);
        let mut mom = [0.0; 5];
        let mut gram = [[0.0; 5]; 5];
        for a in 0..5 {
            mom[a] = ps.expect(BASIS_TERMS[a]);
            for b in a..5 {
                gram[a][b] = ps.expect_product(BASIS_TERMS[a], BASIS_TERMS[b]);
                gram[b][a] = gram[a][b];
            }
        }
        (mom, gram)
    }

    fn write(&self, out: &mut [f64]) {
        let n = self.axes[0].len();
        let mut k = 0;
        for jx in 0..n {
            let ax = self.pre * self.axes[0][jx];
            for jy in 0..n {
                let axy = ax * self.axes[1][jy];
                for jz in 0..n {
                    out[k] = axy * self.axes[2][jz];
                    k += 1;
                }
            }
        }
    }
}

/// Writes the Gaussian with mean `u` and temperature tensor `tau`, corrected
/// by `exp(alpha . m)` so that its discrete moments equal `target`. Diagonal
/// tensors take a separable fast path.
pub fn matched_gaussian_into(
    out: &mut [f64],
    rho: f64,
    u: &Vec3,
    tau: &Mat3,
    target: &Conserved,
    grid: &VelocityGrid,
) -> Result<()> {
    let scale = linalg::trace(tau).abs();
    let off = tau[0][1].abs().max(tau[0][2].abs()).max(tau[1][2].abs());
    let diag = [tau[0][0], tau[1][1], tau[2][2]];
    if off > 1e-15 * scale || diag.iter().any(|&t| !(t > 0.0)) {
        gaussian_into(out, rho, u, tau, grid)?;
        match_moments(out, target, grid)?;
        return Ok(());
    }
    let (g, _) = matched_separable(rho, u, diag, target, grid)?;
    g.write(out);
    Ok(())
}

/// Separable Gaussian corrected to the discrete moments of `target`, with the
/// invariant basis centred on `target`.
fn matched_separable(rho: f64, u: &Vec3, t: Vec3, target: &Conserved, grid: &VelocityGrid) -> Result<(Separable, InvariantBasis)> {
    let center = admissible_center(target)?;
    let basis = InvariantBasis::new(grid, &center);
    let g = Separable::gaussian(rho, u, t, grid);
    let goal = [center.rho, 0.0, 0.0, 0.0, 0.0];
    let (alpha, _) = newton(|a| g.corrected(&basis, a).moments_and_gram(&basis), &goal, center.rho, grid.weight())?;
    Ok((g.corrected(&basis, &alpha), basis))
}

/// Additive fallback when the exponential correction fails: `base (1 + a.m)`
/// with `a` from one linear solve. Exact on the five moments but may leave
/// small negative values in the tails.
pub fn match_moments_linear(base: &mut [f64], target: &Conserved, grid: &VelocityGrid) -> Result<()> {
    let center = MacroState::from_conserved(target);
    if !center.is_admissible() {
        return Err(Error::NonPositiveTemperature(center.temp));
    }
    let basis = InvariantBasis::new(grid, &center);
    let dv3 = grid.weight();
    let (mom, gram) = basis.gram(base, None);
    let r = residual(&mom, &[center.rho, 0.0, 0.0, 0.0, 0.0], dv3);
    let coef = linalg::solve_dense(gram.map(|row| row.map(|x| x * dv3)), r.map(|x| -x))
        .ok_or(Error::NewtonDivergence { iterations: 0, residual: max_abs(&r) })?;
    let mut k = 0;
    for &cx in &basis.c[0] {
        for &cy in &basis.c[1] {
            for &cz in &basis.c[2] {
                let e = 0.5 * (cx * cx + cy * cy + cz * cz) - 1.5;
                base[k] *= 1.0 + coef[0] + coef[1] * cx + coef[2] * cy + coef[3] * cz + coef[4] * e;
                k += 1;
            }
        }
    }
    Ok(())
}

/// Discrete Maxwellian whose discrete moments equal `target`: the analytic
/// Maxwellian corrected by `exp(a + b.v + c|v|^2)`.
pub fn discrete_equilibrium(target: &MacroState, grid: &VelocityGrid) -> Result<Vec<f64>> {
    let mut out = vec![0.0; grid.len()];
    discrete_equilibrium_into(&mut out, target, grid)?;
    Ok(out)
}

pub fn discrete_equilibrium_into(out: &mut [f64], target: &MacroState, grid: &VelocityGrid) -> Result<()> {
    let t = target.temp;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTemperature(t));
    }
    let tau = [[t, 0.0, 0.0], [0.0, t, 0.0], [0.0, 0.0, t]];
    matched_gaussian_into(out, target.rho, &target.u, &tau, &target.to_conserved(), grid)
}

/// Closure order and parameters of a truncated Chapman-Enskog distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeClosure {
    /// 0 = Euler (Maxwellian), 1 = Navier-Stokes.
    pub order: u8,
    pub gas: GasModel,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeTruncation {
    pub values: Vec<f64>,
    /// Fraction of nodes where the truncation is negative.
    pub negative_fraction: f64,
}

impl CeTruncation {
    /// More than 1% of the nodes are negative.
    pub fn negative_region(&self) -> bool {
        self.negative_fraction > 0.01
    }
}

/// Coefficients `(c_A, c_B)` of
/// `g1 = c_A A(V):D(u) + c_B B(V).grad sqrt(T)` that reproduce the
/// Navier-Stokes anisotropy `A = -eps mu/(rho T) D`, `B = -eps kappa/(rho T^1.5) grad T`.
///
/// Uses the Gaussian identities `<A_ij (A:D)> = 2 D_ij` (D traceless) and
/// `<B_i B_j> = 5/2 delta_ij`.
pub fn ce_coefficients(state: &MacroState, gas: &GasModel) -> (f64, f64) {
    let (rho, t) = (state.rho, state.temp);
    let mu = gas.viscosity(rho, t);
    let kappa = gas.conductivity(rho, t);
    (-mu / (2.0 * rho * t), -0.8 * kappa / (rho * t))
}

/// Truncated Chapman-Enskog distribution on the analytic Maxwellian.
pub fn ce_truncation(
    state: &MacroState,
    grads: &Gradients,
    closure: &CeClosure,
    grid: &VelocityGrid,
) -> Result<CeTruncation> {
    if !(state.temp > 0.0) {
        return Err(Error::NonPositiveTemperature(state.temp));
    }
    let t = state.temp;
    let base = Separable::gaussian(state.rho, &state.u, [t, t, t], grid);
    Ok(ce_on_separable(&base, &InvariantBasis::new(grid, state), state, grads, closure, grid))
}

/// Truncated Chapman-Enskog distribution on the discrete equilibrium of
/// `state`, so that it carries exactly the discrete moments of `state`.
pub fn discrete_ce_truncation(
    state: &MacroState,
    grads: &Gradients,
    closure: &CeClosure,
    grid: &VelocityGrid,
) -> Result<CeTruncation> {
    let t = state.temp;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTemperature(t));
    }
    let (base, basis) = matched_separable(state.rho, &state.u, [t, t, t], &state.to_conserved(), grid)?;
    Ok(ce_on_separable(&base, &basis, state, grads, closure, grid))
}

/// Coefficients of `g1` as a polynomial in `c`: `c_A c.D.c` and
/// `c_B (|c|^2 - 5)/2 c.grad sqrt(T)`.
struct FirstOrder {
    ca: f64,
    cb: f64,
    d: Mat3,
    grad_sqrt_t: Vec3,
}

impl FirstOrder {
    fn new(state: &MacroState, grads: &Gradients, gas: &GasModel) -> Self {
        let (ca, cb) = ce_coefficients(state, gas);
        let sqrt_t = state.temp.sqrt();
        Self { ca, cb, d: grads.deformation(), grad_sqrt_t: grads.temp.map(|x| x / (2.0 * sqrt_t)) }
    }

    #[inline]
    fn eval(&self, c: &Vec3) -> f64 {
        // A(V):D = V.D.V since D is traceless
        let a_d = linalg::dot(c, &linalg::mat_vec(&self.d, c));
        let b_dot = 0.5 * (linalg::norm2(c) - 5.0) * linalg::dot(c, &self.grad_sqrt_t);
        self.ca * a_d + self.cb * b_dot
    }

    fn monomials(&self) -> Vec<(f64, [usize; 3])> {
        let unit = |i: usize| {
            let mut p = [0; 3];
            p[i] = 1;
            p
        };
        let add = |a: [usize; 3], b: [usize; 3]| [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
        let mut out = Vec::with_capacity(21);
        for i in 0..3 {
            for j in 0..3 {
                out.push((self.ca * self.d[i][j], add(unit(i), unit(j))));
            }
        }
        for i in 0..3 {
            let g = self.cb * self.grad_sqrt_t[i];
            for k in 0..3 {
                out.push((0.5 * g, add(unit(i), add(unit(k), unit(k)))));
            }
            out.push((-2.5 * g, unit(i)));
        }
        out
    }
}

/// Writes `base [1 + eps (g1 - P g1)]` where `P` is the discrete projection
/// onto the invariants, all sums taken from per-axis power sums.
fn ce_on_separable(
    base: &Separable,
    basis: &InvariantBasis,
    state: &MacroState,
    grads: &Gradients,
    closure: &CeClosure,
    grid: &VelocityGrid,
) -> CeTruncation {
    let mut values = vec![0.0; grid.len()];
    base.write(&mut values);
    if closure.order == 0 || grads.is_zero() || closure.eps == 0.0 {
        return CeTruncation { values, negative_fraction: 0.0 };
    }
    let g1 = FirstOrder::new(state, grads, &closure.gas);
    let ps = base.power_sums(basis);
    let poly = g1.monomials();
    let proj: [f64; 5] = core::array::from_fn(|a| ps.expect_product(BASIS_TERMS[a], &poly));
    let mut gram = [[0.0; 5]; 5];
    for a in 0..5 {
        for b in a..5 {
            gram[a][b] = ps.expect_product(BASIS_TERMS[a], BASIS_TERMS[b]);
            gram[b][a] = gram[a][b];
        }
    }
    let coef = linalg::solve_dense(gram, proj).unwrap_or([0.0; 5]);
    CeTruncation { negative_fraction: apply_first_order(&mut values, basis, &g1, &coef, closure.eps), values }
}

/// `f *= 1 + eps (g1 - coef.m)`; returns the fraction of negative nodes.
fn apply_first_order(values: &mut [f64], basis: &InvariantBasis, g1: &FirstOrder, coef: &[f64; 5], eps: f64) -> f64 {
    let mut negative = 0usize;
    let mut k = 0;
    for &cx in &basis.c[0] {
        for &cy in &basis.c[1] {
            for &cz in &basis.c[2] {
                let e = 0.5 * (cx * cx + cy * cy + cz * cz) - 1.5;
                let g = g1.eval(&[cx, cy, cz]) - (coef[0] + coef[1] * cx + coef[2] * cy + coef[3] * cz + coef[4] * e);
                values[k] *= 1.0 + eps * g;
                if values[k] < 0.0 {
                    negative += 1;
                }
                k += 1;
            }
        }
    }
    negative as f64 / values.len() as f64
}

/// Truncated Chapman-Enskog distribution `M [1 + eps g1]` built on a given
/// equilibrium `base` with moments `state`.
///
/// `g1` is made discretely orthogonal to the collision invariants, so the
/// truncation keeps exactly the discrete moments of `base`.
pub fn ce_truncation_on(
    mut base: Vec<f64>,
    state: &MacroState,
    grads: &Gradients,
    closure: &CeClosure,
    grid: &VelocityGrid,
) -> CeTruncation {
    if closure.order == 0 || grads.is_zero() || closure.eps == 0.0 {
        return CeTruncation { values: base, negative_fraction: 0.0 };
    }
    let g1 = FirstOrder::new(state, grads, &closure.gas);
    let basis = InvariantBasis::new(grid, state);

    // discrete projection of M g onto the invariants
    let mut proj = [0.0; 5];
    let mut gram = [[0.0; 5]; 5];
    let mut k = 0;
    for &cx in &basis.c[0] {
        for &cy in &basis.c[1] {
            for &cz in &basis.c[2] {
                let w = base[k];
                k += 1;
                if w == 0.0 {
                    continue;
                }
                let m = [1.0, cx, cy, cz, 0.5 * (cx * cx + cy * cy + cz * cz) - 1.5];
                let wg = w * g1.eval(&[cx, cy, cz]);
                for a in 0..5 {
                    proj[a] += wg * m[a];
                    let wa = w * m[a];
                    for b in a..5 {
                        gram[a][b] += wa * m[b];
                    }
                }
            }
        }
    }
    for a in 0..5 {
        for b in 0..a {
            gram[a][b] = gram[b][a];
        }
    }
    let coef = linalg::solve_dense(gram, proj).unwrap_or([0.0; 5]);
    let negative_fraction = apply_first_order(&mut base, &basis, &g1, &coef, closure.eps);
    CeTruncation { values: base, negative_fraction }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{conserved_moments, moments, realizability_moments};

    fn grid(n: usize) -> VelocityGrid {
        VelocityGrid::new(8.0, n).unwrap()
    }

    fn sample_gradients() -> Gradients {
        let mut g = Gradients::along_x(0.3, [0.8, 0.1, -0.2], -0.6);
        g.u[1][2] = 0.05;
        g
    }

    fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
        let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
    }

    #[test]
    fn separable_truncation_matches_dense_sums() {
        let g = grid(14);
        let s = MacroState::new(0.7, [0.3, -0.1, 0.05], 0.9);
        let closure = CeClosure { order: 1, gas: GasModel::bgk(), eps: 0.05 };
        let grads = sample_gradients();
        let fast = ce_truncation(&s, &grads, &closure, &g).unwrap();
        let dense = ce_truncation_on(maxwellian(&s, &g).unwrap(), &s, &grads, &closure, &g);
        assert!(max_rel_diff(&fast.values, &dense.values) < 1e-12);
        let fast = discrete_ce_truncation(&s, &grads, &closure, &g).unwrap();
        let dense = ce_truncation_on(discrete_equilibrium(&s, &g).unwrap(), &s, &grads, &closure, &g);
        assert!(max_rel_diff(&fast.values, &dense.values) < 1e-12);
        assert_eq!(fast.negative_fraction, dense.negative_fraction);
    }

    #[test]
    fn separable_matching_agrees_with_generic_newton() {
        let g = grid(12);
        let s = MacroState::new(1.3, [0.4, 0.0, -0.2], 0.6);
        let fast = discrete_equilibrium(&s, &g).unwrap();
        let mut slow = maxwellian(&s, &g).unwrap();
        match_moments(&mut slow, &s.to_conserved(), &g).unwrap();
        assert!(max_rel_diff(&fast, &slow) < 1e-11);
    }

    #[test]
    fn maxwellian_peak_value() {
        let g = grid(32);
        let f = maxwellian(&MacroState::new(1.0, [0.0; 3], 1.0), &g).unwrap();
        // node closest to v = 0 is (0.25, 0.25, 0.25)
        let k = g.index(16, 16, 16);
        let v = g.node(k);
        let expect = (2.0 * PI).powf(-1.5) * (-linalg::norm2(&v) / 2.0).exp();
        assert!((f[k] - expect).abs() < 1e-15);
        assert!(((2.0 * PI).powf(-1.5) - 0.06349363593424097).abs() < 1e-15);
    }

    #[test]
    fn maxwellian_rejects_cold_state() {
        let g = grid(8);
        assert!(matches!(
            maxwellian(&MacroState::new(1.0, [0.0; 3], 0.0), &g),
            Err(Error::NonPositiveTemperature(_))
        ));
    }

    #[test]
    fn maxwellian_even_in_v() {
        let g = grid(16);
        let f = maxwellian(&MacroState::new(0.4, [0.0; 3], 0.7), &g).unwrap();
        let n = g.n_per_axis();
        for (k, _) in g.nodes() {
            let m = g.index(n - 1 - k / (n * n), n - 1 - (k / n) % n, n - 1 - k % n);
            assert_eq!(f[k], f[m]);
        }
    }

    #[test]
    fn esbgk_reduces_to_maxwellian() {
        let g = grid(24);
        let a = maxwellian(&MacroState::new(1.0, [0.7, 0.0, 0.7], 1.0), &g).unwrap();
        let b = maxwellian(&MacroState::new(1.0, [-0.7, 0.0, -0.7], 1.0), &g).unwrap();
        let f: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let gauss = esbgk_gaussian(&f, &g, 0.0).unwrap();
        let m = maxwellian(&moments(&f, &g).unwrap(), &g).unwrap();
        assert_eq!(gauss, m);
    }

    #[test]
    fn esbgk_fixed_point_and_prandtl() {
        let g = grid(32);
        let s = MacroState::new(1.2, [0.3, 0.0, 0.0], 0.9);
        let f = maxwellian(&s, &g).unwrap();
        let gauss = esbgk_gaussian(&f, &g, -0.5).unwrap();
        let d = crate::field::l1_distance(&f, &gauss, g.weight());
        assert!(d < 1e-8, "{d}");
        assert!((GasModel { beta: -0.5, omega: 1.0 }.prandtl() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn esbgk_tensor_blend() {
        let theta = [[2.0, 0.1, 0.0], [0.1, 0.5, 0.0], [0.0, 0.0, 0.5]];
        let tau = esbgk_tensor(1.0, &theta, -0.5);
        assert!((tau[0][0] - 0.5).abs() < 1e-15);
        assert!((tau[1][1] - 1.25).abs() < 1e-15);
        assert!((tau[0][1] + 0.05).abs() < 1e-15);
        // beta close to 1 keeps Theta itself, which may be indefinite
        let bad = [[-0.1, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut out = vec![0.0; grid(4).len()];
        assert!(matches!(
            gaussian_into(&mut out, 1.0, &[0.0; 3], &bad, &grid(4)),
            Err(Error::NonSpdTensor { .. })
        ));
    }

    #[test]
    fn discrete_equilibrium_matches_moments() {
        let g = grid(32);
        let target = MacroState::new(1.0, [0.0; 3], 1.0);
        let f = discrete_equilibrium(&target, &g).unwrap();
        let c = conserved_moments(&f, &g);
        let t = target.to_conserved();
        for k in 0..5 {
            assert!((c[k] - t[k]).abs() <= 1e-10 * (1.0 + t[k].abs()), "{k}");
        }
    }

    #[test]
    fn discrete_equilibrium_on_coarse_grid() {
        // T = 0.25 on dv = 1 is badly under-resolved; matching still holds
        let g = grid(16);
        let target = MacroState::new(0.125, [0.1, 0.0, 0.0], 0.25);
        let f = discrete_equilibrium(&target, &g).unwrap();
        let s = moments(&f, &g).unwrap();
        assert!((s.rho - 0.125).abs() < 1e-12);
        assert!((s.u[0] - 0.1).abs() < 1e-11);
        assert!((s.temp - 0.25).abs() < 1e-11);
        assert!(f.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn discrete_equilibrium_near_identity_on_fine_grid() {
        let g = grid(32);
        let target = MacroState::new(1.0, [0.2, 0.0, 0.0], 1.0);
        let a = maxwellian(&target, &g).unwrap();
        let b = discrete_equilibrium(&target, &g).unwrap();
        let rel = crate::field::l1_distance(&a, &b, g.weight()) / target.rho;
        assert!(rel < 1e-7, "{rel}");
    }

    #[test]
    fn discrete_equilibrium_out_of_range() {
        let g = grid(16);
        // bulk velocity beyond the outermost node is not representable
        let target = MacroState::new(1.0, [7.9, 0.0, 0.0], 0.5);
        assert!(matches!(discrete_equilibrium(&target, &g), Err(Error::NewtonDivergence { .. })));
    }

    #[test]
    fn ce_truncation_zeroth_order() {
        let g = grid(16);
        let s = MacroState::new(1.0, [0.1, 0.0, 0.0], 1.0);
        let grads = Gradients::along_x(0.3, [1.0, 0.0, 0.0], 0.4);
        let clos = CeClosure { order: 0, gas: GasModel::bgk(), eps: 0.1 };
        let t = ce_truncation(&s, &grads, &clos, &g).unwrap();
        assert_eq!(t.values, maxwellian(&s, &g).unwrap());
        let clos1 = CeClosure { order: 1, ..clos };
        let t1 = ce_truncation(&s, &Gradients::default(), &clos1, &g).unwrap();
        assert_eq!(t1.values, maxwellian(&s, &g).unwrap());
    }

    #[test]
    fn ce_truncation_keeps_moments() {
        let g = grid(24);
        let s = MacroState::new(0.8, [0.2, 0.0, 0.0], 1.1);
        let grads = Gradients::along_x(0.5, [2.0, 0.3, 0.0], -1.5);
        let clos = CeClosure { order: 1, gas: GasModel::bgk(), eps: 0.05 };
        let base = maxwellian(&s, &g).unwrap();
        let c0 = conserved_moments(&base, &g);
        let t = ce_truncation(&s, &grads, &clos, &g).unwrap();
        let c1 = conserved_moments(&t.values, &g);
        for k in 0..5 {
            assert!((c0[k] - c1[k]).abs() < 1e-8, "{k}");
        }
    }

    #[test]
    fn ce_truncation_flags_negative_tails() {
        let g = grid(24);
        let s = MacroState::new(1.0, [0.0; 3], 1.0);
        let grads = Gradients::along_x(0.0, [1.0, 0.0, 0.0], 1.0);
        let small = CeClosure { order: 1, gas: GasModel::bgk(), eps: 1e-5 };
        let t = ce_truncation(&s, &grads, &small, &g).unwrap();
        assert!(!t.negative_region());
        let large = CeClosure { eps: 0.5, ..small };
        let t = ce_truncation(&s, &grads, &large, &g).unwrap();
        assert!(t.negative_region());
        assert!(t.values.iter().any(|&x| x < 0.0));
    }

    #[test]
    fn ce_truncation_reproduces_navier_stokes_anisotropy() {
        let g = grid(32);
        let s = MacroState::new(1.0, [0.0; 3], 1.0);
        let grads = Gradients::along_x(0.0, [0.5, 0.0, 0.0], 0.8);
        let eps = 0.01;
        let gas = GasModel::bgk();
        let clos = CeClosure { order: 1, gas, eps };
        let t = ce_truncation(&s, &grads, &clos, &g).unwrap();
        let r = realizability_moments(&t.values, &g).unwrap();
        let mu = gas.viscosity(1.0, 1.0);
        let kappa = gas.conductivity(1.0, 1.0);
        let d = grads.deformation();
        for i in 0..3 {
            let expect = -eps * mu * d[i][i];
            assert!((r.a_bar[i][i] - expect).abs() <= 1e-4 * expect.abs(), "A{i}");
        }
        let expect_b = -eps * kappa * 0.8;
        assert!((r.b_bar[0] - expect_b).abs() <= 1e-4 * expect_b.abs());
    }

    #[test]
    fn linear_fallback_is_exact() {
        let g = grid(16);
        let target = MacroState::new(0.5, [0.2, -0.1, 0.0], 0.6);
        let mut f = maxwellian(&target, &g).unwrap();
        match_moments_linear(&mut f, &target.to_conserved(), &g).unwrap();
        let c = conserved_moments(&f, &g);
        let t = target.to_conserved();
        for k in 0..5 {
            assert!((c[k] - t[k]).abs() < 1e-12, "{k}");
        }
    }
}
