//! Term-by-term evaluators of the Navier-Stokes and Burnett anisotropy
//! moments for the BGK gas (`nu = rho`, so `mu = T`, `kappa = 5/2 T`),
//! written with explicit index loops.
#![allow(clippy::needless_range_loop)]

use kinfluid_core::{Gradients, MacroState, SecondGradients};
use rand::Rng;

pub type M3 = [[f64; 3]; 3];

pub struct Field {
    pub state: MacroState,
    pub grads: Gradients,
    pub second: SecondGradients,
}

pub fn random_field(rng: &mut impl Rng) -> Field {
    let rho = rng.gen_range(0.2..3.0);
    let temp = rng.gen_range(0.2..3.0);
    let u = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let mut g = Gradients::default();
    let mut s = SecondGradients::default();
    for i in 0..3 {
        g.rho[i] = rng.gen_range(-2.0..2.0);
        g.temp[i] = rng.gen_range(-2.0..2.0);
        for j in 0..3 {
            g.u[i][j] = rng.gen_range(-2.0..2.0);
        }
    }
    for i in 0..3 {
        for j in i..3 {
            let h = rng.gen_range(-5.0..5.0);
            s.rho[i][j] = h;
            s.rho[j][i] = h;
            for k in 0..3 {
                let h = rng.gen_range(-5.0..5.0);
                s.u[k][i][j] = h;
                s.u[k][j][i] = h;
            }
        }
    }
    Field { state: MacroState::new(rho, u, temp), grads: g, second: s }
}

pub fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// `D_ij = d_i u_j + d_j u_i - 2/3 delta_ij d_k u_k`.
pub fn deformation(g: &Gradients) -> M3 {
    let div = g.u[0][0] + g.u[1][1] + g.u[2][2];
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = g.u[i][j] + g.u[j][i] - 2.0 / 3.0 * kron(i, j) * div;
        }
    }
    d
}

pub fn oracle_ns(f: &Field, eps: f64) -> (M3, [f64; 3]) {
    let (rho, t) = (f.state.rho, f.state.temp);
    // BGK: nu = rho, mu = T, kappa = 5/2 T
    let mu = rho * t / rho;
    let kappa = 2.5 * rho * t / rho;
    let d = deformation(&f.grads);
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = -eps * mu / (rho * t) * d[i][j];
        }
    }
    let b = [0, 1, 2].map(|i| -eps * kappa / (rho * t * t.sqrt()) * f.grads.temp[i]);
    (a, b)
}

pub fn oracle_burnett(f: &Field, eps: f64) -> (M3, [f64; 3]) {
    let (a1, b1) = oracle_ns(f, eps);
    let (rho, t) = (f.state.rho, f.state.temp);
    let mu = t;
    let g = &f.grads;
    let s = &f.second;
    let d = deformation(g);
    let div = g.u[0][0] + g.u[1][1] + g.u[2][2];
    let pre_a = -2.0 * eps * eps * mu * mu / (rho * rho * t * t);
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut grad_u_sq = 0.0;
            for k in 0..3 {
                grad_u_sq += g.u[i][k] * g.u[j][k];
            }
            let brace = -t / rho * s.rho[i][j] + t / (rho * rho) * g.rho[i] * g.rho[j] - g.temp[i] * g.rho[j] / rho
                + grad_u_sq
                - d[i][j] * div / 3.0
                + g.temp[i] * g.temp[j] / t;
            a[i][j] = a1[i][j] + pre_a * brace;
        }
    }
    // symmetric part; the asymmetric grad T (x) grad rho term is the only
    // non-symmetric contribution
    let a_sym = {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = 0.5 * (a[i][j] + a[j][i]);
            }
        }
        m
    };
    let pre_b = -eps * eps * mu * mu / (rho * rho * t.powf(2.5));
    let mut b = [0.0; 3];
    for i in 0..3 {
        // div(grad u)_i = sum_k d_k d_k u_i
        let lap: f64 = (0..3).map(|k| s.u[i][k][k]).sum();
        let grad_u_grad_t: f64 = (0..3).map(|k| g.u[i][k] * g.temp[k]).sum();
        let grad_p = |k: usize| t * g.rho[k] + rho * g.temp[k];
        let d_grad_p: f64 = (0..3).map(|k| d[i][k] * grad_p(k)).sum();
        // div D: sum_k d_k D_ki with d_k D_ki = d_k d_k u_i + d_k d_i u_k - 2/3 delta_ki d_k div u
        let mut div_d = 0.0;
        for k in 0..3 {
            div_d += s.u[i][k][k] + s.u[k][k][i];
        }
        for m in 0..3 {
            div_d -= 2.0 / 3.0 * s.u[m][i][m];
        }
        let d_grad_t: f64 = (0..3).map(|k| d[i][k] * g.temp[k]).sum();
        let brace = 25.0 / 6.0 * div * g.temp[i] - 5.0 / 3.0 * (t * lap + div * g.temp[i] + 6.0 * grad_u_grad_t)
            + 2.0 / rho * d_grad_p
            + 2.0 * t * div_d
            + 16.0 * d_grad_t;
        b[i] = b1[i] + pre_b * brace;
    }
    (a_sym, b)
}

pub fn oracle_v(a: &M3, b: &[f64; 3]) -> M3 {
    let mut v = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            v[i][j] = kron(i, j) + a[i][j] - 2.0 / 3.0 * b[i] * b[j];
        }
    }
    v
}
