//! Mascon superposition model and the heterogeneous-density truth field.

use super::{pm_eval, AnalyticError, GravityEval, GravityField, PolyhedralModel};
use crate::geometry::ShapeModel;
use nalgebra::Vector3;

/// A set of point-mass elements; the field is their superposition.
///
/// Masses may be negative when produced by an unconstrained regression.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MasconModel {
    pub positions: Vec<Vector3<f64>>,
    pub mus: Vec<f64>,
}

impl MasconModel {
    pub fn new(positions: Vec<Vector3<f64>>, mus: Vec<f64>) -> Self {
        assert_eq!(positions.len(), mus.len());
        Self { positions, mus }
    }

    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }

    pub fn total_mu(&self) -> f64 {
        self.mus.iter().sum()
    }

    /// Parameter count convention: four per element (position + mass).
    pub fn param_count(&self) -> usize {
        4 * self.len()
    }

    /// CSV serialization: header then `x,y,z,mu` per element.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,z,mu\n");
        for (p, mu) in self.positions.iter().zip(&self.mus) {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", p.x, p.y, p.z, mu));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, AnalyticError> {
        let mut positions = Vec::new();
        let mut mus = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            if lineno == 0 || raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split(',').collect();
            if fields.len() != 4 {
                return Err(AnalyticError::CoefficientParse {
                    line: lineno + 1,
                    msg: "mascon record must be x,y,z,mu".into(),
                });
            }
            let mut vals = [0.0; 4];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f.trim().parse().map_err(|e| AnalyticError::CoefficientParse {
                    line: lineno + 1,
                    msg: format!("bad number {f:?}: {e}"),
                })?;
            }
            positions.push(Vector3::new(vals[0], vals[1], vals[2]));
            mus.push(vals[3]);
        }
        Ok(Self { positions, mus })
    }
}

impl GravityField for MasconModel {
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
        let mut total = GravityEval::ZERO;
        for (p, &mu) in self.positions.iter().zip(&self.mus) {
            let d = x - p;
            if d.norm() == 0.0 {
                return Err(AnalyticError::Singularity { x: *x });
            }
            total = total + pm_eval(mu, &d)?;
        }
        Ok(total)
    }
}

/// Ground-truth field: a constant-density polyhedron plus point-mass
/// anomalies (positive or negative), emulating internal density variations.
#[derive(Debug, Clone)]
pub struct HeterogeneousTruthModel {
    pub base: PolyhedralModel,
    pub anomalies: Vec<(Vector3<f64>, f64)>,
}

impl HeterogeneousTruthModel {
    pub fn new(base: PolyhedralModel, anomalies: Vec<(Vector3<f64>, f64)>) -> Self {
        Self { base, anomalies }
    }

    /// The two-anomaly configuration: a mass element of `fraction * mu_total`
    /// added at `+offset * R` on the x-axis and removed at `-offset * R`, on
    /// top of a constant-density base carrying the full `mu_total` (the
    /// anomalies sum to zero, so the total is preserved).
    pub fn two_mass(shape: ShapeModel, mu_total: f64, fraction: f64, offset: f64) -> Self {
        let r = shape.max_radius();
        let base = PolyhedralModel::from_mu(shape, mu_total);
        let anomalies = vec![
            (Vector3::new(offset * r, 0.0, 0.0), fraction * mu_total),
            (Vector3::new(-offset * r, 0.0, 0.0), -fraction * mu_total),
        ];
        Self { base, anomalies }
    }

    pub fn total_mu(&self) -> f64 {
        self.base.mu() + self.anomalies.iter().map(|(_, mu)| mu).sum::<f64>()
    }
}

impl GravityField for HeterogeneousTruthModel {
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
        let mut total = self.base.eval(x)?;
        for (p, mu) in &self.anomalies {
            total = total + pm_eval(*mu, &(x - p))?;
        }
        Ok(total)
    }
}
