//! The seven-metric evaluation harness: planes error, the three
//! generalization regimes, surface error, accumulated trajectory error, and
//! propagation time.
//!
//! Every percent metric is the mean of `|a_true - a_model| / |a_true| * 100`
//! over its point set; a regime is flagged diverged when that mean exceeds
//! 100. Points inside the body (and the occasional point that lands on a
//! polyhedron singularity) are excluded with counts rather than silently
//! evaluated.

pub mod orbit;

use crate::analytic::GravityField;
use crate::geometry::ShapeModel;
use nalgebra::Vector3;
use rayon::prelude::*;
use thiserror::Error;

pub use orbit::{
    accumulated_error, elements_to_state, propagate, OrbitalElements, Trajectory,
    TrajectoryConfig,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no evaluable points (all excluded)")]
    NoPoints,
    #[error("kepler solve failed to converge (M = {mean_anomaly}, e = {ecc})")]
    KeplerNonConvergence { mean_anomaly: f64, ecc: f64 },
    #[error("integrator step size underflow at t = {at_time}")]
    StepUnderflow { at_time: f64, partial: Trajectory },
    #[error("trajectories sampled on different time grids")]
    TimeGridMismatch,
    #[error(transparent)]
    Analytic(#[from] crate::analytic::AnalyticError),
}

/// Divergence threshold: any regime whose mean percent error exceeds this is
/// flagged `D`.
pub const DIVERGED_PCT: f64 = 100.0;

/// Mean percent error with exclusion bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PercentError {
    pub mean_pct: f64,
    pub max_pct: f64,
    pub std_pct: f64,
    pub used: usize,
    pub excluded: usize,
}

impl PercentError {
    pub fn diverged(&self) -> bool {
        self.mean_pct > DIVERGED_PCT
    }
}

/// Mean percent acceleration error of `model` against `truth` over `points`.
///
/// Points where the truth acceleration is zero, or where either model raises
/// a singular-evaluation error, are excluded and counted.
pub fn percent_error(
    truth: &dyn GravityField,
    model: &dyn GravityField,
    points: &[Vector3<f64>],
) -> Result<PercentError, EvalError> {
    let stats: Vec<Option<f64>> = points
        .par_iter()
        .map(|p| {
            let t = match truth.eval(p) {
                Ok(e) => e.acceleration,
                Err(_) => return None,
            };
            let tn = t.norm();
            if tn == 0.0 {
                return None;
            }
            match model.eval(p) {
                Ok(m) => Some(100.0 * (m.acceleration - t).norm() / tn),
                Err(_) => None,
            }
        })
        .collect();
    let used: Vec<f64> = stats.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(EvalError::NoPoints);
    }
    let n = used.len() as f64;
    let mean = used.iter().sum::<f64>() / n;
    let var = used.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    Ok(PercentError {
        mean_pct: mean,
        max_pct: used.iter().cloned().fold(0.0, f64::max),
        std_pct: var.sqrt(),
        used: used.len(),
        excluded: points.len() - used.len(),
    })
}

/// Grid resolution of the planes metric (points per axis per plane).
pub const PLANES_GRID: usize = 200;

/// Per-plane and headline statistics of the planes metric.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PlanesReport {
    /// Mean percent error over the union of the three plane grids.
    pub mean_pct: f64,
    /// (mean, std, max) per plane: XY, XZ, YZ.
    pub per_plane: [(f64, f64, f64); 3],
    pub used: usize,
    pub excluded: usize,
}

/// Percent error on three `200 x 200` Cartesian plane grids spanning
/// `[-5R, 5R]`, excluding points interior to the body.
pub fn planes_metric(
    truth: &dyn GravityField,
    model: &dyn GravityField,
    radius: f64,
    body: Option<&ShapeModel>,
) -> Result<PlanesReport, EvalError> {
    let coords: Vec<f64> = (0..PLANES_GRID)
        .map(|i| -5.0 * radius + 10.0 * radius * i as f64 / (PLANES_GRID - 1) as f64)
        .collect();
    let mut per_plane = [(0.0, 0.0, 0.0); 3];
    let mut all_used = 0usize;
    let mut all_excluded = 0usize;
    let mut weighted = 0.0;
    for (plane, stats) in per_plane.iter_mut().enumerate() {
        let mut points = Vec::with_capacity(PLANES_GRID * PLANES_GRID);
        for &u in &coords {
            for &v in &coords {
                let p = match plane {
                    0 => Vector3::new(u, v, 0.0),
                    1 => Vector3::new(u, 0.0, v),
                    _ => Vector3::new(0.0, u, v),
                };
                if let Some(shape) = body {
                    if shape.contains(&p).unwrap_or(true) {
                        all_excluded += 1;
                        continue;
                    }
                }
                points.push(p);
            }
        }
        let pe = percent_error(truth, model, &points)?;
        *stats = (pe.mean_pct, pe.std_pct, pe.max_pct);
        weighted += pe.mean_pct * pe.used as f64;
        all_used += pe.used;
        all_excluded += pe.excluded;
    }
    Ok(PlanesReport {
        mean_pct: weighted / all_used as f64,
        per_plane,
        used: all_used,
        excluded: all_excluded,
    })
}

/// Samples per unit of radius in the generalization bands.
pub const SAMPLES_PER_RADIUS: usize = 500;

/// Altitude-banded errors: interior `[0, R]` (outside the body surface),
/// exterior `[R, 10R]`, extrapolation `[10R, 100R]`; 500 seeded samples per
/// radius unit.
pub fn generalization_metric(
    truth: &dyn GravityField,
    model: &dyn GravityField,
    radius: f64,
    body: Option<&ShapeModel>,
    seed: u64,
) -> Result<(PercentError, PercentError, PercentError), EvalError> {
    let band = |r_lo: f64, r_hi: f64, seed: u64| -> Vec<Vector3<f64>> {
        let n = (SAMPLES_PER_RADIUS as f64 * (r_hi - r_lo) / radius).round() as usize;
        let mut pts = crate::geometry::sample_shell(r_lo, r_hi, n.max(1), seed);
        if let Some(shape) = body {
            pts.retain(|p| !shape.contains(p).unwrap_or(true));
        }
        pts
    };
    let interior = percent_error(truth, model, &band(0.0, radius, seed))?;
    let exterior = percent_error(truth, model, &band(radius, 10.0 * radius, seed + 1))?;
    let extrapolation =
        percent_error(truth, model, &band(10.0 * radius, 100.0 * radius, seed + 2))?;
    Ok((interior, exterior, extrapolation))
}

/// Percent error at every facet centroid, nudged a hair above the surface
/// along the outward normal to stay clear of the polyhedral singularities.
pub fn surface_metric(
    truth: &dyn GravityField,
    model: &dyn GravityField,
    shape: &ShapeModel,
) -> Result<PercentError, EvalError> {
    let offset = 1e-6 * shape.max_radius();
    let points: Vec<Vector3<f64>> = (0..shape.facets().len())
        .map(|f| shape.facet_centroid(f) + shape.facet_normal(f) * offset)
        .collect();
    percent_error(truth, model, &points)
}

/// The seven metrics of one model against one truth field. Optional slots
/// were simply not run (rendered as NA in comparison tables).
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct MetricsReport {
    pub model_name: String,
    pub planes_pct: Option<f64>,
    pub interior_pct: Option<f64>,
    pub exterior_pct: Option<f64>,
    pub extrapolation_pct: Option<f64>,
    pub surface_pct: Option<f64>,
    pub accumulated_error_km: Option<f64>,
    pub final_position_error_km: Option<f64>,
    pub propagation_time_s: Option<f64>,
    pub params: Option<usize>,
    pub regression_time_s: Option<f64>,
    /// Points excluded across the percent metrics (interior/singular/zero).
    pub excluded_points: usize,
    /// Set when any computed percent regime exceeds the divergence bound.
    pub diverged: bool,
}

impl MetricsReport {
    pub fn update_diverged(&mut self) {
        self.diverged = [
            self.planes_pct,
            self.interior_pct,
            self.exterior_pct,
            self.extrapolation_pct,
            self.surface_pct,
        ]
        .iter()
        .flatten()
        .any(|&e| e > DIVERGED_PCT);
    }

    /// Flat key-value JSON record.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// One cell per column in the comparison-table order; NA for absent.
    pub fn csv_cells(&self) -> Vec<String> {
        let fmt_pct = |v: Option<f64>| match v {
            Some(x) if x > DIVERGED_PCT => "D".to_string(),
            Some(x) => format!("{x:.4}"),
            None => "NA".to_string(),
        };
        let fmt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.4}"),
            None => "NA".to_string(),
        };
        vec![
            self.model_name.clone(),
            fmt_pct(self.planes_pct),
            fmt_pct(self.extrapolation_pct),
            fmt_pct(self.exterior_pct),
            fmt_pct(self.interior_pct),
            fmt_pct(self.surface_pct),
            fmt(self.accumulated_error_km),
            fmt(self.propagation_time_s),
            self.params.map_or("NA".into(), |p| p.to_string()),
            fmt(self.regression_time_s),
        ]
    }

    /// Header matching the comparison-table columns.
    pub fn csv_header() -> &'static str {
        "model,planes_pct,extrapolation_pct,exterior_pct,interior_pct,surface_pct,position_error_km,propagation_time_s,params,regression_time_s"
    }
}
