//! Macroscopic states, conserved vectors and transport laws.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};


#[allow(unused_imports)] // float math for no_std builds
use num_traits::Float;

use crate::linalg::{self, Mat3, Vec3, ZERO33, ZERO3};

/// Primitive hydrodynamic state `(rho, u, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    pub rho: f64,
    pub u: Vec3,
    pub temp: f64,
}

impl MacroState {
    pub fn new(rho: f64, u: Vec3, temp: f64) -> Self {
        Self { rho, u, temp }
    }

    /// Total energy density `rho |u|^2 / 2 + 3 rho T / 2`.
    pub fn energy(&self) -> f64 {
        0.5 * self.rho * linalg::norm2(&self.u) + 1.5 * self.rho * self.temp
    }

    pub fn pressure(&self) -> f64 {
        self.rho * self.temp
    }

    pub fn sound_speed(&self) -> f64 {
        (crate::GAMMA * self.temp).sqrt()
    }

    pub fn to_conserved(&self) -> Conserved {
        let r = self.rho;
        Conserved([r, r * self.u[0], r * self.u[1], r * self.u[2], self.energy()])
    }

    /// Unchecked conversion; the temperature may come out non-positive.
    pub fn from_conserved(c: &Conserved) -> Self {
        let rho = c[0];
        let u = [c[1] / rho, c[2] / rho, c[3] / rho];
        let temp = (c[4] - 0.5 * rho * linalg::norm2(&u)) / (1.5 * rho);
        Self { rho, u, temp }
    }

    pub fn is_admissible(&self) -> bool {
        self.rho > crate::RHO_FLOOR && self.temp > 0.0 && self.rho.is_finite() && self.temp.is_finite()
    }
}

/// Conserved densities `(rho, rho u_x, rho u_y, rho u_z, E)`; also used for
/// the matching flux vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved(pub [f64; 5]);

impl Conserved {
    pub const ZERO: Conserved = Conserved([0.0; 5]);
}

impl Index<usize> for Conserved {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Conserved {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Conserved {
    type Output = Conserved;
    fn add(mut self, o: Conserved) -> Conserved {
        self += o;
        self
    }
}

impl AddAssign for Conserved {
    fn add_assign(&mut self, o: Conserved) {
        for k in 0..5 {
            self.0[k] += o.0[k];
        }
    }
}

impl Sub for Conserved {
    type Output = Conserved;
    fn sub(mut self, o: Conserved) -> Conserved {
        for k in 0..5 {
            self.0[k] -= o.0[k];
        }
        self
    }
}

impl Mul<f64> for Conserved {
    type Output = Conserved;
    fn mul(mut self, s: f64) -> Conserved {
        self.0.iter_mut().for_each(|x| *x *= s);
        self
    }
}

/// ES-BGK gas: Prandtl parameter `beta` and collision frequency law
/// `nu = rho T^(1 - omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub beta: f64,
    pub omega: f64,
}

impl Default for GasModel {
    /// Plain BGK with `nu = rho`.
    fn default() -> Self {
        Self { beta: 0.0, omega: 1.0 }
    }
}

impl GasModel {
    pub fn bgk() -> Self {
        Self::default()
    }

    pub fn collision_frequency(&self, rho: f64, temp: f64) -> f64 {
        if self.omega == 1.0 {
            rho
        } else {
            rho * temp.powf(1.0 - self.omega)
        }
    }

    pub fn viscosity(&self, rho: f64, temp: f64) -> f64 {
        rho * temp / ((1.0 - self.beta) * self.collision_frequency(rho, temp))
    }

    pub fn conductivity(&self, rho: f64, temp: f64) -> f64 {
        2.5 * rho * temp / self.collision_frequency(rho, temp)
    }

    pub fn prandtl(&self) -> f64 {
        1.0 / (1.0 - self.beta)
    }
}

/// First spatial derivatives at a point. `u[i][j]` is `d_i u_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Gradients {
    pub rho: Vec3,
    pub u: Mat3,
    pub temp: Vec3,
}

impl Gradients {
    /// Derivatives of a field that varies along x only.
    pub fn along_x(drho: f64, du: Vec3, dtemp: f64) -> Self {
        let mut u = ZERO33;
        u[0] = du;
        Self { rho: [drho, 0.0, 0.0], u, temp: [dtemp, 0.0, 0.0] }
    }

    pub fn divergence(&self) -> f64 {
        linalg::trace(&self.u)
    }

    /// Traceless deformation tensor `grad u + grad u^T - 2/3 div u I`.
    pub fn deformation(&self) -> Mat3 {
        let mut d = linalg::add(&self.u, &linalg::transpose(&self.u));
        let div = self.divergence();
        for (k, row) in d.iter_mut().enumerate() {
            row[k] -= 2.0 / 3.0 * div;
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.rho == ZERO3 && self.temp == ZERO3 && self.u == ZERO33
    }
}

/// Second spatial derivatives. `rho` is the Hessian of the density and
/// `u[k][i][j]` is `d_i d_j u_k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SecondGradients {
    pub rho: Mat3,
    pub u: [Mat3; 3],
}

impl SecondGradients {
    pub fn along_x(d2rho: f64, d2u: Vec3) -> Self {
        let mut s = Self::default();
        s.rho[0][0] = d2rho;
        for k in 0..3 {
            s.u[k][0][0] = d2u[k];
        }
        s
    }

    /// `div(grad u)`: the vector Laplacian, component `j` is `sum_i d_i d_i u_j`.
    pub fn laplacian_u(&self) -> Vec3 {
        let mut out = ZERO3;
        for (j, o) in out.iter_mut().enumerate() {
            *o = linalg::trace(&self.u[j]);
        }
        out
    }

    /// `div D(u)`, component `j` is `sum_i d_i D_ij`
    /// `= lap u_j + 1/3 d_j div u`.
    pub fn divergence_of_deformation(&self) -> Vec3 {
        let lap = self.laplacian_u();
        let mut out = ZERO3;
        for j in 0..3 {
            let grad_div: f64 = (0..3).map(|i| self.u[i][j][i]).sum();
            out[j] = lap[j] + grad_div / 3.0;
        }
        out
    }
}
