use alloc::vec;
use alloc::vec::Vec;

/// Discrete distribution `f[i][node]` stored cell-major: all velocity nodes of
/// cell `i` are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    n_cells: usize,
    n_nodes: usize,
    data: Vec<f64>,
}

impl DistributionField {
    pub fn zeros(n_cells: usize, n_nodes: usize) -> Self {
        Self { n_cells, n_nodes, data: vec![0.0; n_cells * n_nodes] }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    #[inline]
    pub fn cell(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_nodes..(i + 1) * self.n_nodes]
    }

    #[inline]
    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_nodes..(i + 1) * self.n_nodes]
    }

    pub fn cells(&self) -> core::slice::Chunks<'_, f64> {
        self.data.chunks(self.n_nodes)
    }

    pub fn cells_mut(&mut self) -> core::slice::ChunksMut<'_, f64> {
        self.data.chunks_mut(self.n_nodes)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `sum |a - b| * weight`.
pub fn l1_distance(a: &[f64], b: &[f64], weight: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * weight
}
