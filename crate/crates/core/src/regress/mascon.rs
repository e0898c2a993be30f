//! Iterative batched mascon fitting: place point masses uniformly inside the
//! body, fit each batch by linear least squares on the acceleration
//! residuals, subtract, repeat. Masses are unconstrained in sign.

use super::RegressError;
use crate::analytic::MasconModel;
use crate::geometry::ShapeModel;
use crate::training::Dataset;
use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mascons fitted per batch.
pub const MASCON_BATCH: usize = 500;

#[derive(Debug, Clone, Copy)]
pub struct MasconFitReport {
    /// Sum of the fitted masses (gravitational parameter units).
    pub total_mu: f64,
    pub batches: usize,
    /// Batches that needed the ridge fallback for a rank-deficient system.
    pub ridge_fallbacks: usize,
    /// Seed used for the placement, recorded for reproducibility.
    pub placement_seed: u64,
}

/// Places `n_total` mascons uniformly at random inside `shape` (rejection
/// sampling of the bounding box) and fits their masses to the data in batches.
pub fn regress_mascons(
    data: &Dataset,
    shape: &ShapeModel,
    n_total: usize,
    seed: u64,
) -> Result<(MasconModel, MasconFitReport), RegressError> {
    assert!(n_total >= 1);
    if data.is_empty() {
        return Err(RegressError::EmptyData);
    }
    let positions = place_inside(shape, n_total, seed)?;
    let (model, mut report) = regress_mascons_at(data, positions)?;
    report.placement_seed = seed;
    Ok((model, report))
}

/// Fits masses at caller-chosen positions (the placement-free core).
pub fn regress_mascons_at(
    data: &Dataset,
    positions: Vec<Vector3<f64>>,
) -> Result<(MasconModel, MasconFitReport), RegressError> {
    if data.is_empty() {
        return Err(RegressError::EmptyData);
    }
    let n_rows = 3 * data.len();
    let mut residuals = DVector::zeros(n_rows);
    for (i, a) in data.accelerations.iter().enumerate() {
        for axis in 0..3 {
            residuals[3 * i + axis] = a[axis];
        }
    }

    let mut mus = Vec::with_capacity(positions.len());
    let mut ridge_fallbacks = 0usize;
    let mut batches = 0usize;

    for batch in positions.chunks(MASCON_BATCH) {
        batches += 1;
        // unit-mass acceleration of each candidate at each sample point
        let mut h = DMatrix::zeros(n_rows, batch.len());
        for (j, p) in batch.iter().enumerate() {
            for (i, x) in data.positions.iter().enumerate() {
                let d = x - p;
                let r3 = d.norm().powi(3).max(f64::MIN_POSITIVE);
                for axis in 0..3 {
                    h[(3 * i + axis, j)] = -d[axis] / r3;
                }
            }
        }
        let svd = h.clone().svd(true, true);
        let rank = svd.rank(1e-12 * svd.singular_values.max());
        let solution = if rank < batch.len() {
            ridge_fallbacks += 1;
            let mut normal = h.transpose() * &h;
            let ridge = 1e-10 * normal.diagonal().max().max(f64::MIN_POSITIVE);
            for d in 0..batch.len() {
                normal[(d, d)] += ridge;
            }
            normal
                .try_inverse()
                .ok_or(RegressError::InnerNotInvertible)?
                * (h.transpose() * &residuals)
        } else {
            svd.solve(&residuals, 1e-14).map_err(|_| RegressError::InnerNotInvertible)?
        };
        residuals -= &h * &solution;
        mus.extend(solution.iter().copied());
    }

    let total_mu: f64 = mus.iter().sum();
    let model = MasconModel::new(positions, mus);
    Ok((
        model,
        MasconFitReport { total_mu, batches, ridge_fallbacks, placement_seed: 0 },
    ))
}

fn place_inside(
    shape: &ShapeModel,
    n: usize,
    seed: u64,
) -> Result<Vec<Vector3<f64>>, RegressError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for v in shape.vertices() {
        lo = lo.inf(v);
        hi = hi.sup(v);
    }
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 10_000 * n {
            return Err(RegressError::PlacementFailed { placed: out.len(), wanted: n });
        }
        let p = Vector3::new(
            rng.random_range(lo.x..hi.x),
            rng.random_range(lo.y..hi.y),
            rng.random_range(lo.z..hi.z),
        );
        if shape.contains(&p).unwrap_or(false) {
            out.push(p);
        }
    }
    Ok(out)
}
