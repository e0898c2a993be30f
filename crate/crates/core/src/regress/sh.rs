//! Stokes-coefficient regression: Kaula-regularized recursive least squares
//! with sub-Brillouin sample rejection and iterative coefficient groups for
//! very large models.

use super::{KaulaRegularizer, RegressError, RlsState, COEFF_GROUP_SIZE, RLS_BATCH_SAMPLES};
use crate::analytic::harmonics::{acceleration_basis, coeff_layout, SphericalHarmonicModel};
use crate::training::Dataset;
use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;

/// Bookkeeping from one regression run.
#[derive(Debug, Clone, Copy)]
pub struct ShFitReport {
    /// Samples rejected for lying beneath the Brillouin radius.
    pub dropped_sub_brillouin: usize,
    pub used_samples: usize,
    pub coefficient_groups: usize,
}

/// Regresses a degree-`l_max` model from position/acceleration data.
///
/// Samples with `r < radius` are dropped (the degree scaling diverges there).
/// The system streams through recursive least squares in batches of 100
/// samples; when the coefficient count exceeds the group ceiling, groups are
/// regressed low-degree-first against the residual accelerations of the
/// groups already fitted.
pub fn regress_sh(
    data: &Dataset,
    l_max: usize,
    alpha: f64,
    mu: f64,
    radius: f64,
) -> Result<(SphericalHarmonicModel, ShFitReport), RegressError> {
    regress_sh_grouped(data, l_max, alpha, mu, radius, COEFF_GROUP_SIZE)
}

/// [`regress_sh`] with an explicit coefficient-group ceiling (tests shrink it
/// to exercise the iterative path on small models).
pub fn regress_sh_grouped(
    data: &Dataset,
    l_max: usize,
    alpha: f64,
    mu: f64,
    radius: f64,
    group_size: usize,
) -> Result<(SphericalHarmonicModel, ShFitReport), RegressError> {
    if data.is_empty() {
        return Err(RegressError::EmptyData);
    }
    let keep: Vec<usize> = (0..data.len())
        .filter(|&i| data.positions[i].norm() >= radius)
        .collect();
    let dropped = data.len() - keep.len();
    if keep.is_empty() {
        return Err(RegressError::AllSubBrillouin);
    }

    let ids = coeff_layout(l_max);
    let kaula = KaulaRegularizer::new(alpha);

    // basis rows are reused by every group; build them once, in parallel
    let bases: Vec<Vec<Vector3<f64>>> = keep
        .par_iter()
        .map(|&i| {
            acceleration_basis(mu, radius, l_max, &data.positions[i])
                .expect("off-origin sample")
        })
        .collect();

    let mut coeffs = vec![0.0; ids.len()];
    let mut residuals: Vec<Vector3<f64>> = keep.iter().map(|&i| data.accelerations[i]).collect();

    let groups: Vec<(usize, usize)> = {
        let mut g = Vec::new();
        let mut start = 0;
        while start < ids.len() {
            let end = (start + group_size).min(ids.len());
            g.push((start, end));
            start = end;
        }
        g
    };

    for &(start, end) in &groups {
        let width = end - start;
        let gamma = kaula.diagonal(&ids[start..end]);
        let state = stream_group(&bases, &residuals, start, width, &gamma)?;
        for (k, c) in state.coefficients().column(0).iter().enumerate() {
            coeffs[start + k] = *c;
        }
        if groups.len() > 1 {
            // subtract this group's contribution before fitting the next
            for (res, basis) in residuals.iter_mut().zip(&bases) {
                for k in 0..width {
                    *res -= basis[start + k] * coeffs[start + k];
                }
            }
        }
    }

    let model = SphericalHarmonicModel::from_coeff_vector(mu, radius, l_max, &coeffs);
    Ok((
        model,
        ShFitReport {
            dropped_sub_brillouin: dropped,
            used_samples: keep.len(),
            coefficient_groups: groups.len(),
        },
    ))
}

fn stream_group(
    bases: &[Vec<Vector3<f64>>],
    residuals: &[Vector3<f64>],
    start: usize,
    width: usize,
    gamma: &DVector<f64>,
) -> Result<RlsState, RegressError> {
    let mut state: Option<RlsState> = None;
    for (chunk_bases, chunk_targets) in bases
        .chunks(RLS_BATCH_SAMPLES)
        .zip(residuals.chunks(RLS_BATCH_SAMPLES))
    {
        let rows = 3 * chunk_bases.len();
        let mut h = DMatrix::zeros(rows, width);
        let mut y = DMatrix::zeros(rows, 1);
        for (si, (basis, target)) in chunk_bases.iter().zip(chunk_targets).enumerate() {
            for axis in 0..3 {
                let row = 3 * si + axis;
                for k in 0..width {
                    h[(row, k)] = basis[start + k][axis];
                }
                y[(row, 0)] = target[axis];
            }
        }
        match &mut state {
            None => state = Some(RlsState::init(&h, &y, gamma)?),
            Some(s) => s.update(&h, &y)?,
        }
    }
    state.ok_or(RegressError::EmptyData)
}
