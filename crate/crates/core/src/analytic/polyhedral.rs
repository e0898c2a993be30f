//! Constant-density polyhedral gravity model.
//!
//! Closed-form potential and attraction of a homogeneous polyhedron from
//! per-edge and per-facet dyads. The edge terms carry a logarithmic potential
//! factor and the facet terms a signed solid angle; the same solid angles sum
//! to 0 outside the body and 4 pi inside, which fixes the Laplacian to
//! `-4 pi G sigma` in the interior.

use super::{AnalyticError, GravityEval, GravityField};
use crate::geometry::{triangle_solid_angle, ShapeModel};
use nalgebra::{Matrix3, Vector3};

#[derive(Debug, Clone)]
struct EdgeTerm {
    /// One endpoint of the edge.
    p0: Vector3<f64>,
    p1: Vector3<f64>,
    length: f64,
    dyad: Matrix3<f64>,
    /// Vertex ids kept for diagnostics.
    v0: usize,
    v1: usize,
}

#[derive(Debug, Clone)]
struct FacetTerm {
    vertices: [Vector3<f64>; 3],
    normal: Vector3<f64>,
    dyad: Matrix3<f64>,
}

/// Constant-density polyhedral gravity model with precomputed dyads.
#[derive(Debug, Clone)]
pub struct PolyhedralModel {
    shape: ShapeModel,
    /// G * sigma, premultiplied so unit handling cannot drift.
    g_sigma: f64,
    edges: Vec<EdgeTerm>,
    facets: Vec<FacetTerm>,
}

impl PolyhedralModel {
    /// Builds the model so the total gravitational parameter is `mu`
    /// (`G sigma = mu / volume`).
    pub fn from_mu(shape: ShapeModel, mu: f64) -> Self {
        let g_sigma = mu / shape.volume();
        Self::from_g_sigma(shape, g_sigma)
    }

    /// Builds the model from a mass density [mass/length^3].
    pub fn from_density(shape: ShapeModel, sigma: f64) -> Self {
        assert!(sigma > 0.0, "density must be positive");
        Self::from_g_sigma(shape, super::GRAVITATIONAL_CONSTANT * sigma)
    }

    fn from_g_sigma(shape: ShapeModel, g_sigma: f64) -> Self {
        let facets: Vec<FacetTerm> = (0..shape.facets().len())
            .map(|f| {
                let normal = shape.facet_normal(f);
                FacetTerm {
                    vertices: shape.facet_vertices(f),
                    normal,
                    dyad: normal * normal.transpose(),
                }
            })
            .collect();
        let edges = shape
            .edges()
            .iter()
            .map(|e| {
                let p0 = shape.vertices()[e.v0];
                let p1 = shape.vertices()[e.v1];
                // facet_a traverses v0 -> v1, facet_b traverses v1 -> v0;
                // the in-plane outward edge normal is (edge dir) x (facet normal)
                let na = facets[e.facet_a].normal;
                let nb = facets[e.facet_b].normal;
                let dir = (p1 - p0).normalize();
                let dyad = na * (dir.cross(&na)).transpose() + nb * ((-dir).cross(&nb)).transpose();
                EdgeTerm {
                    p0,
                    p1,
                    length: (p1 - p0).norm(),
                    dyad,
                    v0: e.v0,
                    v1: e.v1,
                }
            })
            .collect();
        Self { shape, g_sigma, edges, facets }
    }

    pub fn shape(&self) -> &ShapeModel {
        &self.shape
    }

    pub fn g_sigma(&self) -> f64 {
        self.g_sigma
    }

    /// Total gravitational parameter of the body.
    pub fn mu(&self) -> f64 {
        self.g_sigma * self.shape.volume()
    }

    /// Parameter count convention for comparison tables: facets + vertices.
    pub fn param_count(&self) -> usize {
        self.shape.facets().len() + self.shape.vertices().len()
    }

    /// Sum of facet solid angles at `x` (4 pi inside, 0 outside).
    pub fn total_solid_angle(&self, x: &Vector3<f64>) -> f64 {
        self.facets
            .iter()
            .map(|f| {
                triangle_solid_angle(
                    &(f.vertices[0] - x),
                    &(f.vertices[1] - x),
                    &(f.vertices[2] - x),
                )
            })
            .sum()
    }
}

impl GravityField for PolyhedralModel {
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
        let scale = self.shape.max_radius();
        let mut potential = 0.0;
        let mut grad = Vector3::zeros();

        for (ei, e) in self.edges.iter().enumerate() {
            let r0 = e.p0 - x;
            let r1 = e.p1 - x;
            let (a, b) = (r0.norm(), r1.norm());
            let denom = a + b - e.length;
            // the log term diverges on the edge segment itself
            if denom <= 1e-12 * scale {
                return Err(AnalyticError::EdgeSingularity { edge: ei, v0: e.v0, v1: e.v1 });
            }
            let log_term = ((a + b + e.length) / denom).ln();
            let er = e.dyad * r0;
            potential += r0.dot(&er) * log_term;
            grad += er * log_term;
        }

        let mut facet_potential = 0.0;
        let mut facet_grad = Vector3::zeros();
        for (fi, f) in self.facets.iter().enumerate() {
            let r0 = f.vertices[0] - x;
            let plane_dist = r0.dot(&f.normal);
            if plane_dist.abs() <= 1e-12 * scale && point_in_facet(x, &f.vertices) {
                return Err(AnalyticError::FacetSingularity { facet: fi });
            }
            let omega = triangle_solid_angle(
                &(f.vertices[0] - x),
                &(f.vertices[1] - x),
                &(f.vertices[2] - x),
            );
            let fr = f.dyad * r0;
            facet_potential += r0.dot(&fr) * omega;
            facet_grad += fr * omega;
        }

        // Positive-potential convention: U > 0 with attraction a = +grad(U).
        Ok(GravityEval {
            potential: 0.5 * self.g_sigma * (potential - facet_potential),
            acceleration: self.g_sigma * (facet_grad - grad),
        })
    }
}

fn point_in_facet(x: &Vector3<f64>, verts: &[Vector3<f64>; 3]) -> bool {
    let [a, b, c] = verts;
    let v0 = b - a;
    let v1 = c - a;
    let v2 = x - a;
    let d00 = v0.dot(&v0);
    let d01 = v0.dot(&v1);
    let d11 = v1.dot(&v1);
    let d20 = v2.dot(&v0);
    let d21 = v2.dot(&v1);
    let denom = d00 * d11 - d01 * d01;
    if denom == 0.0 {
        return false;
    }
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    v >= -1e-9 && w >= -1e-9 && v + w <= 1.0 + 1e-9
}
