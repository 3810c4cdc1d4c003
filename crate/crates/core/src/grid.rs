//! Phase-space discretisation: uniform cells in x, a symmetric Cartesian
//! velocity cube with midpoint quadrature.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Zero-gradient extrapolation: ghosts copy the nearest interior cell.
    NeumannCopy,
    /// Specular reflection, v_x -> -v_x at the wall.
    SpecularWall,
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub boundary: BoundaryKind,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize, boundary: BoundaryKind) -> Result<Self> {
        if n_cells == 0 || !(x_max > x_min) {
            return Err(Error::InvalidGrid("need x_max > x_min and at least one cell"));
        }
        Ok(Self { x_min, x_max, n_cells, boundary })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }
}

/// Uniform Cartesian velocity grid on `[-v_max, v_max]^3`.
///
/// Nodes sit at cell midpoints, `v_j = -v_max + (j + 1/2) dv`, so the grid is
/// symmetric under `v -> -v` and every node has a mirror node. The flat node
/// index is `(jx * n + jy) * n + jz`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    v_max: f64,
    n_per_axis: usize,
    axis: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(v_max: f64, n_per_axis: usize) -> Result<Self> {
        if !(v_max > 0.0) || n_per_axis < 2 {
            return Err(Error::InvalidGrid("need v_max > 0 and at least two nodes per axis"));
        }
        let n = n_per_axis;
        let dv = 2.0 * v_max / n as f64;
        let mut axis: Vec<f64> = (0..n).map(|j| -v_max + (j as f64 + 0.5) * dv).collect();
        // exact mirror symmetry, so reflected Maxwellians match bit for bit
        for j in 0..n / 2 {
            axis[n - 1 - j] = -axis[j];
        }
        if n % 2 == 1 {
            axis[n / 2] = 0.0;
        }
        Ok(Self { v_max, n_per_axis, axis })
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    pub fn len(&self) -> usize {
        self.n_per_axis * self.n_per_axis * self.n_per_axis
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.v_max / self.n_per_axis as f64
    }

    /// Quadrature weight `dv^3`.
    pub fn weight(&self) -> f64 {
        let dv = self.dv();
        dv * dv * dv
    }

    /// One-dimensional node coordinates (identical on every axis).
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    #[inline]
    pub fn index(&self, jx: usize, jy: usize, jz: usize) -> usize {
        (jx * self.n_per_axis + jy) * self.n_per_axis + jz
    }

    #[inline]
    pub fn node(&self, idx: usize) -> Vec3 {
        let n = self.n_per_axis;
        [self.axis[idx / (n * n)], self.axis[(idx / n) % n], self.axis[idx % n]]
    }

    /// Iterates `(flat index, velocity)` over all nodes in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, Vec3)> + '_ {
        (0..self.len()).map(move |k| (k, self.node(k)))
    }

    /// Flat index of the node with `v_x` reversed.
    #[inline]
    pub fn mirror_x(&self, idx: usize) -> usize {
        let n = self.n_per_axis;
        let jx = idx / (n * n);
        idx - jx * n * n + (n - 1 - jx) * n * n
    }

    /// Checks `v_j = -v_{n-1-j}` to round-off, which specular reflection needs.
    pub fn check_symmetric(&self) -> Result<()> {
        let n = self.n_per_axis;
        let tol = 1e-12 * self.v_max;
        for j in 0..n {
            if (self.axis[j] + self.axis[n - 1 - j]).abs() > tol {
                return Err(Error::AsymmetricGrid);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spatial_centers() {
        let g = SpatialGrid::new(-0.5, 0.5, 10, BoundaryKind::NeumannCopy).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!((g.center(0) + 0.45).abs() < 1e-15);
        assert!((g.center(9) - 0.45).abs() < 1e-15);
        assert!(SpatialGrid::new(0.0, 0.0, 3, BoundaryKind::Periodic).is_err());
    }

    #[test]
    fn velocity_grid_symmetric_and_mirror() {
        let g = VelocityGrid::new(8.0, 16).unwrap();
        g.check_symmetric().unwrap();
        assert_eq!(g.dv(), 1.0);
        assert_eq!(g.axis()[0], -7.5);
        for (k, v) in g.nodes() {
            let m = g.mirror_x(k);
            let w = g.node(m);
            assert_eq!(w, [-v[0], v[1], v[2]]);
            assert_eq!(g.mirror_x(m), k);
        }
    }
}
