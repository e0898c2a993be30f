//! Low-fidelity analytic potentials fused with (or blended behind) the
//! network: a point mass, optionally with an oblateness term or
//! user-supplied radial corrections.

use crate::network::jet::{powi, recip, Jet};
use serde::{Deserialize, Serialize};

/// Analytic potential `U(x) = mu/r + f(...)` used as the boundary model and,
/// when fusion is enabled, as the low-fidelity contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LfModel {
    /// `U = mu / r`
    PointMass { mu: f64 },
    /// `U = mu/r * (1 - J2 (R/r)^2 (3u^2 - 1)/2)` with `u = z/r`.
    PointMassJ2 { mu: f64, radius: f64, j2: f64 },
    /// `U = mu/r + sum_k c_k r^k` with signed integer powers; a test and
    /// experiment hook for arbitrary radial boundary terms.
    RadialPoly { mu: f64, terms: Vec<(i32, f64)> },
}

impl LfModel {
    pub fn mu(&self) -> f64 {
        match self {
            LfModel::PointMass { mu }
            | LfModel::PointMassJ2 { mu, .. }
            | LfModel::RadialPoly { mu, .. } => *mu,
        }
    }

    /// Dimensional potential on jets; `x` are dimensional coordinates and `r`
    /// their radius.
    pub fn potential<J: Jet>(&self, x: &[J; 3], r: J) -> J {
        match self {
            LfModel::PointMass { mu } => recip(r).scale(*mu),
            LfModel::PointMassJ2 { mu, radius, j2 } => {
                let inv_r = recip(r);
                let u = x[2] * inv_r;
                let ratio2 = powi(inv_r.scale(*radius), 2);
                // 1 - J2 (R/r)^2 (3u^2 - 1)/2
                let shape = (u * u).scale(3.0) - J::constant(1.0);
                let pert = (ratio2 * shape).scale(-0.5 * j2);
                inv_r.scale(*mu) * (J::constant(1.0) + pert)
            }
            LfModel::RadialPoly { mu, terms } => {
                let mut out = recip(r).scale(*mu);
                for &(power, coeff) in terms {
                    out = out + powi(r, power).scale(coeff);
                }
                out
            }
        }
    }
}
