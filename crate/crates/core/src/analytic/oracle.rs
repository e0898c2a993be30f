//! Brute-force quadrature reference for validating analytic models.
//!
//! The oracle integrates Newton's integral over the solid by voxelizing the
//! mesh interior and superposing one point mass per cell. It shares no code
//! with the polyhedral evaluation (only the containment query), so agreement
//! between the two is meaningful evidence rather than a tautology.

use super::{pm_eval, GravityEval};
use crate::geometry::ShapeModel;
use nalgebra::Vector3;
use rayon::prelude::*;

/// Point-mass quadrature of Newton's integral over the body interior.
#[derive(Debug, Clone)]
pub struct VoxelQuadrature {
    cells: Vec<Vector3<f64>>,
    cell_mu: f64,
}

impl VoxelQuadrature {
    /// Voxelizes the mesh bounding box on an `n^3` grid, keeping cells whose
    /// center is interior. The per-cell mass is normalized so the total
    /// gravitational parameter is exactly `mu`, which removes the monopole
    /// bias of the jagged boundary.
    pub fn new(shape: &ShapeModel, mu: f64, n: usize) -> Self {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for v in shape.vertices() {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        let step = (hi - lo) / n as f64;
        let cells: Vec<Vector3<f64>> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut slab = Vec::new();
                for j in 0..n {
                    for k in 0..n {
                        let center = lo
                            + Vector3::new(
                                (i as f64 + 0.5) * step.x,
                                (j as f64 + 0.5) * step.y,
                                (k as f64 + 0.5) * step.z,
                            );
                        if shape.contains(&center).unwrap_or(false) {
                            slab.push(center);
                        }
                    }
                }
                slab
            })
            .collect();
        assert!(!cells.is_empty(), "voxelization found no interior cells");
        let cell_mu = mu / cells.len() as f64;
        Self { cells, cell_mu }
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn eval(&self, x: &Vector3<f64>) -> GravityEval {
        self.cells
            .par_chunks(16_384)
            .map(|chunk| {
                let mut total = GravityEval::ZERO;
                for c in chunk {
                    total = total
                        + pm_eval(self.cell_mu, &(x - c)).expect("field point inside a cell");
                }
                total
            })
            .reduce(|| GravityEval::ZERO, |a, b| a + b)
    }
}
