//! Exact solution of the 1D Riemann problem for a polytropic gas (Toro,
//! chapter 4), used as an oracle for the Euler solver.

#[derive(Debug, Clone, Copy)]
pub struct Prim1d {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

pub struct ExactRiemann {
    pub left: Prim1d,
    pub right: Prim1d,
    pub gamma: f64,
    p_star: f64,
    u_star: f64,
}

impl ExactRiemann {
    pub fn new(left: Prim1d, right: Prim1d, gamma: f64) -> Self {
        let mut s = Self { left, right, gamma, p_star: 0.0, u_star: 0.0 };
        s.solve_star();
        s
    }

    fn sound(&self, w: &Prim1d) -> f64 {
        (self.gamma * w.p / w.rho).sqrt()
    }

    /// Pressure function of one side and its derivative.
    fn side(&self, p: f64, w: &Prim1d) -> (f64, f64) {
        let g = self.gamma;
        let c = self.sound(w);
        if p > w.p {
            let a = 2.0 / ((g + 1.0) * w.rho);
            let b = (g - 1.0) / (g + 1.0) * w.p;
            let q = (a / (p + b)).sqrt();
            ((p - w.p) * q, q * (1.0 - 0.5 * (p - w.p) / (b + p)))
        } else {
            let r = p / w.p;
            let e = (g - 1.0) / (2.0 * g);
            (2.0 * c / (g - 1.0) * (r.powf(e) - 1.0), r.powf(-(g + 1.0) / (2.0 * g)) / (w.rho * c))
        }
    }

    fn solve_star(&mut self) {
        let (l, r) = (self.left, self.right);
        let du = r.u - l.u;
        let mut p = 0.5 * (l.p + r.p);
        for _ in 0..100 {
            let (fl, dl) = self.side(p, &l);
            let (fr, dr) = self.side(p, &r);
            let next = (p - (fl + fr + du) / (dl + dr)).max(1e-14);
            let done = (next - p).abs() <= 1e-15 * (next + p);
            p = next;
            if done {
                break;
            }
        }
        let (fl, _) = self.side(p, &l);
        let (fr, _) = self.side(p, &r);
        self.p_star = p;
        self.u_star = 0.5 * (l.u + r.u) + 0.5 * (fr - fl);
    }

    pub fn star(&self) -> (f64, f64) {
        (self.p_star, self.u_star)
    }

    /// Solution at similarity coordinate `s = x / t`.
    pub fn sample(&self, s: f64) -> Prim1d {
        let g = self.gamma;
        let (ps, us) = (self.p_star, self.u_star);
        let gm = (g - 1.0) / (g + 1.0);
        if s <= us {
            let w = self.left;
            let c = self.sound(&w);
            if ps > w.p {
                let shock = w.u - c * ((g + 1.0) / (2.0 * g) * ps / w.p + (g - 1.0) / (2.0 * g)).sqrt();
                if s <= shock {
                    w
                } else {
                    let rho = w.rho * (ps / w.p + gm) / (gm * ps / w.p + 1.0);
                    Prim1d { rho, u: us, p: ps }
                }
            } else {
                let head = w.u - c;
                let cs = c * (ps / w.p).powf((g - 1.0) / (2.0 * g));
                let tail = us - cs;
                if s <= head {
                    w
                } else if s >= tail {
                    Prim1d { rho: w.rho * (ps / w.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    let u = 2.0 / (g + 1.0) * (c + (g - 1.0) / 2.0 * w.u + s);
                    let cc = 2.0 / (g + 1.0) * (c + (g - 1.0) / 2.0 * (w.u - s));
                    let rho = w.rho * (cc / c).powf(2.0 / (g - 1.0));
                    Prim1d { rho, u, p: w.p * (cc / c).powf(2.0 * g / (g - 1.0)) }
                }
            }
        } else {
            let w = self.right;
            let c = self.sound(&w);
            if ps > w.p {
                let shock = w.u + c * ((g + 1.0) / (2.0 * g) * ps / w.p + (g - 1.0) / (2.0 * g)).sqrt();
                if s >= shock {
                    w
                } else {
                    let rho = w.rho * (ps / w.p + gm) / (gm * ps / w.p + 1.0);
                    Prim1d { rho, u: us, p: ps }
                }
            } else {
                let head = w.u + c;
                let cs = c * (ps / w.p).powf((g - 1.0) / (2.0 * g));
                let tail = us + cs;
                if s >= head {
                    w
                } else if s <= tail {
                    Prim1d { rho: w.rho * (ps / w.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    let u = 2.0 / (g + 1.0) * (-c + (g - 1.0) / 2.0 * w.u + s);
                    let cc = 2.0 / (g + 1.0) * (c - (g - 1.0) / 2.0 * (w.u - s));
                    let rho = w.rho * (cc / c).powf(2.0 / (g - 1.0));
                    Prim1d { rho, u, p: w.p * (cc / c).powf(2.0 * g / (g - 1.0)) }
                }
            }
        }
    }

    /// Cell average of the density over `[a, b]` at time `t` by composite
    /// Simpson quadrature.
    pub fn mean_density(&self, a: f64, b: f64, t: f64, x0: f64) -> f64 {
        let m = 64;
        let h = (b - a) / m as f64;
        let mut s = 0.0;
        for k in 0..=m {
            let x = a + k as f64 * h;
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * self.sample((x - x0) / t).rho;
        }
        s * h / 3.0 / (b - a)
    }
}
