//! Shape-model ingestion, geometric queries, and spatial sampling.
//!
//! A [`ShapeModel`] is a closed, consistently wound triangulated surface kept
//! in the body-fixed principal frame with the origin at the center of mass of
//! the constant-density solid. Everything downstream (polyhedral gravity,
//! mascon seeding, surface metrics) assumes those invariants, so they are
//! enforced at construction time rather than checked lazily.

pub mod meshgen;

use nalgebra::Vector3;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("mesh parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("facet on line {line} is not triangular")]
    NonTriangularFacet { line: usize },
    #[error("facet {facet} references vertex {index} out of range (mesh has {n_vertices} vertices)")]
    IndexOutOfRange {
        facet: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("open edge ({v0}, {v1}): shared by {count} facet(s) instead of 2")]
    OpenEdge { v0: usize, v1: usize, count: usize },
    #[error("inconsistent winding across edge ({v0}, {v1})")]
    InconsistentWinding { v0: usize, v1: usize },
    #[error("mesh has no facets")]
    EmptyMesh,
    #[error("mesh has non-positive volume {volume}")]
    NonPositiveVolume { volume: f64 },
    #[error("query point lies on the surface (within {tol:e} of facet {facet})")]
    OnSurface { facet: usize, tol: f64 },
    #[error("ambiguous containment query: winding number {winding}")]
    AmbiguousContainment { winding: f64 },
}

/// Undirected edge of the surface with its two adjacent facets.
///
/// `facet_a` is the facet that traverses the edge as `v0 -> v1`; `facet_b`
/// traverses it as `v1 -> v0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub v0: usize,
    pub v1: usize,
    pub facet_a: usize,
    pub facet_b: usize,
}

/// Closed triangulated surface in the body-fixed frame.
///
/// Invariants established by the constructor:
/// - every edge is shared by exactly two facets with opposite traversal
///   directions (closed 2-manifold, consistent winding),
/// - the signed volume is positive (outward normals),
/// - the origin sits at the center of mass of the constant-density solid.
#[derive(Debug, Clone)]
pub struct ShapeModel {
    vertices: Vec<Vector3<f64>>,
    facets: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    volume: f64,
    max_radius: f64,
}

impl ShapeModel {
    /// Builds a shape model from raw vertices and facet index triples.
    ///
    /// The mesh is validated (triangles only, indices in range, closed and
    /// consistently wound), flipped if it is uniformly inward-facing, and
    /// recentered so the origin is the constant-density center of mass.
    pub fn new(
        vertices: Vec<Vector3<f64>>,
        facets: Vec<[usize; 3]>,
    ) -> Result<Self, GeometryError> {
        if facets.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        for (fi, f) in facets.iter().enumerate() {
            for &idx in f {
                if idx >= vertices.len() {
                    return Err(GeometryError::IndexOutOfRange {
                        facet: fi,
                        index: idx,
                        n_vertices: vertices.len(),
                    });
                }
            }
        }

        let mut model = Self {
            vertices,
            facets,
            edges: Vec::new(),
            volume: 0.0,
            max_radius: 0.0,
        };

        // A consistently wound closed mesh can still face inward; that is a
        // file convention, not corruption, so flip rather than reject.
        if model.signed_volume() < 0.0 {
            for f in &mut model.facets {
                f.swap(1, 2);
            }
        }
        model.edges = build_edges(model.vertices.len(), &model.facets)?;

        let vol = model.signed_volume();
        if vol <= 0.0 {
            return Err(GeometryError::NonPositiveVolume { volume: vol });
        }

        let com = model.solid_centroid();
        for v in &mut model.vertices {
            *v -= com;
        }
        model.volume = model.signed_volume();
        model.max_radius = model
            .vertices
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        Ok(model)
    }

    /// Parses a Wavefront-style mesh: `v x y z` and triangular `f i j k`
    /// records (1-based indices); every other record type is ignored.
    pub fn from_obj_text(text: &str) -> Result<Self, GeometryError> {
        let mut vertices = Vec::new();
        let mut facets = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let mut fields = raw.split_whitespace();
            match fields.next() {
                Some("v") => {
                    let mut coords = [0.0; 3];
                    for c in &mut coords {
                        let tok = fields.next().ok_or_else(|| GeometryError::Parse {
                            line,
                            msg: "vertex record needs 3 coordinates".into(),
                        })?;
                        *c = tok.parse().map_err(|e| GeometryError::Parse {
                            line,
                            msg: format!("bad coordinate {tok:?}: {e}"),
                        })?;
                    }
                    vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
                }
                Some("f") => {
                    let idx: Vec<usize> = fields
                        .map(|tok| {
                            // accept `i`, `i/..`, `i//..` forms, keeping the index
                            let head = tok.split('/').next().unwrap_or(tok);
                            head.parse::<usize>().map_err(|e| GeometryError::Parse {
                                line,
                                msg: format!("bad facet index {tok:?}: {e}"),
                            })
                        })
                        .collect::<Result<_, _>>()?;
                    if idx.len() != 3 {
                        return Err(GeometryError::NonTriangularFacet { line });
                    }
                    for &i in &idx {
                        if i == 0 {
                            return Err(GeometryError::Parse {
                                line,
                                msg: "facet indices are 1-based".into(),
                            });
                        }
                    }
                    facets.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
                }
                _ => {}
            }
        }
        Self::new(vertices, facets)
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[[usize; 3]] {
        &self.facets
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Volume of the enclosed solid.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Circumscribing radius: the largest vertex distance from the origin.
    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn facet_vertices(&self, facet: usize) -> [Vector3<f64>; 3] {
        let [i, j, k] = self.facets[facet];
        [self.vertices[i], self.vertices[j], self.vertices[k]]
    }

    pub fn facet_area(&self, facet: usize) -> f64 {
        let [a, b, c] = self.facet_vertices(facet);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Outward unit normal of a facet.
    pub fn facet_normal(&self, facet: usize) -> Vector3<f64> {
        let [a, b, c] = self.facet_vertices(facet);
        (b - a).cross(&(c - a)).normalize()
    }

    pub fn facet_centroid(&self, facet: usize) -> Vector3<f64> {
        let [a, b, c] = self.facet_vertices(facet);
        (a + b + c) / 3.0
    }

    /// One point per facet, used by the surface metric.
    pub fn facet_centroids(&self) -> Vec<Vector3<f64>> {
        (0..self.facets.len()).map(|f| self.facet_centroid(f)).collect()
    }

    fn signed_volume(&self) -> f64 {
        self.facets
            .iter()
            .map(|&[i, j, k]| {
                self.vertices[i]
                    .cross(&self.vertices[j])
                    .dot(&self.vertices[k])
                    / 6.0
            })
            .sum()
    }

    /// Center of mass of the constant-density solid (tetrahedron decomposition
    /// against the origin).
    fn solid_centroid(&self) -> Vector3<f64> {
        let mut vol = 0.0;
        let mut moment = Vector3::zeros();
        for &[i, j, k] in &self.facets {
            let (a, b, c) = (self.vertices[i], self.vertices[j], self.vertices[k]);
            let v = a.cross(&b).dot(&c) / 6.0;
            vol += v;
            moment += v * (a + b + c) / 4.0;
        }
        moment / vol
    }

    /// Total signed solid angle of the surface seen from `p`, in units of 4π
    /// (so interior points give 1, exterior points 0).
    pub fn winding_number(&self, p: &Vector3<f64>) -> f64 {
        let mut total = 0.0;
        for &[i, j, k] in &self.facets {
            total += triangle_solid_angle(
                &(self.vertices[i] - p),
                &(self.vertices[j] - p),
                &(self.vertices[k] - p),
            );
        }
        total / (4.0 * std::f64::consts::PI)
    }

    /// Interior test by the summed-solid-angle winding number.
    ///
    /// Points within `1e-12 * max_radius` of a facet plane (projecting inside
    /// the facet) are reported as an explicit on-surface error so downstream
    /// consumers never evaluate singular surface terms silently.
    pub fn contains(&self, p: &Vector3<f64>) -> Result<bool, GeometryError> {
        let tol = 1e-12 * self.max_radius;
        if let Some(facet) = self.nearest_incident_facet(p, tol) {
            return Err(GeometryError::OnSurface { facet, tol });
        }
        let w = self.winding_number(p);
        if (w - 1.0).abs() <= 1e-6 {
            Ok(true)
        } else if w.abs() <= 1e-6 {
            Ok(false)
        } else {
            Err(GeometryError::AmbiguousContainment { winding: w })
        }
    }

    /// Index of a facet whose plane passes within `tol` of `p` with the
    /// projection of `p` inside the facet, if any.
    fn nearest_incident_facet(&self, p: &Vector3<f64>, tol: f64) -> Option<usize> {
        for (fi, &[i, j, k]) in self.facets.iter().enumerate() {
            let (a, b, c) = (self.vertices[i], self.vertices[j], self.vertices[k]);
            let n = (b - a).cross(&(c - a));
            let nn = n.norm();
            if nn == 0.0 {
                continue;
            }
            let dist = (p - a).dot(&n) / nn;
            if dist.abs() <= tol && point_in_triangle(p, &a, &b, &c) {
                return Some(fi);
            }
        }
        None
    }
}

/// Signed solid angle of the triangle (a, b, c) as seen from the origin
/// (Van Oosterom-Strackee).
pub fn triangle_solid_angle(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let numer = a.cross(b).dot(c);
    let denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    2.0 * numer.atan2(denom)
}

fn point_in_triangle(
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> bool {
    // barycentric test on the projection into the triangle plane
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
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
    let u = 1.0 - v - w;
    (-1e-12..=1.0 + 1e-12).contains(&u)
        && (-1e-12..=1.0 + 1e-12).contains(&v)
        && (-1e-12..=1.0 + 1e-12).contains(&w)
}

fn build_edges(n_vertices: usize, facets: &[[usize; 3]]) -> Result<Vec<Edge>, GeometryError> {
    use std::collections::HashMap;
    // per undirected edge: (facet traversing v0->v1, facet traversing v1->v0, count)
    type EdgeSlot = (Option<usize>, Option<usize>, usize);
    let mut map: HashMap<(usize, usize), EdgeSlot> = HashMap::new();
    for (fi, &[i, j, k]) in facets.iter().enumerate() {
        for (u, v) in [(i, j), (j, k), (k, i)] {
            let key = (u.min(v), u.max(v));
            let entry = map.entry(key).or_insert((None, None, 0));
            entry.2 += 1;
            let forward = u == key.0;
            let slot = if forward { &mut entry.0 } else { &mut entry.1 };
            if slot.is_some() {
                return Err(GeometryError::InconsistentWinding { v0: key.0, v1: key.1 });
            }
            *slot = Some(fi);
        }
    }
    let _ = n_vertices;
    let mut edges = Vec::with_capacity(map.len());
    for ((v0, v1), (fa, fb, count)) in map {
        if count != 2 {
            return Err(GeometryError::OpenEdge { v0, v1, count });
        }
        match (fa, fb) {
            (Some(facet_a), Some(facet_b)) => edges.push(Edge { v0, v1, facet_a, facet_b }),
            _ => return Err(GeometryError::InconsistentWinding { v0, v1 }),
        }
    }
    edges.sort_by_key(|e| (e.v0, e.v1));
    Ok(edges)
}

/// Bulk properties of the body used for non-dimensionalization and fusion.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct BodyProperties {
    /// Gravitational parameter [length^3 / time^2].
    pub mu: f64,
    /// Circumscribing radius [length].
    pub radius: f64,
    /// Principal semi-extents, sorted so `a_ax >= b_ax >= c_ax`.
    pub semi_axes: [f64; 3],
    /// Eccentricity of the (a, b) section: sqrt(1 - b^2/a^2).
    pub eccentricity: f64,
}

impl BodyProperties {
    /// Derives bulk properties from a shape already expressed in its
    /// principal frame: extents are max absolute coordinates per axis.
    pub fn from_shape(shape: &ShapeModel, mu: f64) -> Self {
        let mut ext = [0.0f64; 3];
        for v in shape.vertices() {
            for (i, e) in ext.iter_mut().enumerate() {
                *e = e.max(v[i].abs());
            }
        }
        ext.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let [a_ax, b_ax, _] = ext;
        let eccentricity = (1.0 - (b_ax * b_ax) / (a_ax * a_ax)).max(0.0).sqrt();
        Self {
            mu,
            radius: shape.max_radius(),
            semi_axes: ext,
            eccentricity,
        }
    }
}

/// `n` points with radius uniform on `[r_min, r_max]` and direction uniform
/// on the sphere; deterministic for a fixed seed.
pub fn sample_shell(r_min: f64, r_max: f64, n: usize, seed: u64) -> Vec<Vector3<f64>> {
    assert!(
        (0.0..r_max).contains(&r_min) && n > 0,
        "need 0 <= r_min < r_max and n > 0"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.random_range(r_min..r_max);
            unit_direction(&mut rng) * r
        })
        .collect()
}

/// `n` points on the surface: facet chosen with probability proportional to
/// area, position uniform within the facet. Zero-area facets are skipped.
pub fn sample_surface(shape: &ShapeModel, n: usize, seed: u64) -> Vec<Vector3<f64>> {
    assert!(n > 0, "need n > 0");
    let mut cumulative = Vec::with_capacity(shape.facets().len());
    let mut total = 0.0;
    let mut skipped = 0usize;
    for f in 0..shape.facets().len() {
        let area = shape.facet_area(f);
        if area == 0.0 {
            skipped += 1;
        }
        total += area;
        cumulative.push(total);
    }
    if skipped > 0 {
        eprintln!("sample_surface: skipping {skipped} zero-area facet(s)");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let t = rng.random_range(0.0..total);
            let f = cumulative.partition_point(|&c| c <= t);
            let [a, b, c] = shape.facet_vertices(f.min(shape.facets().len() - 1));
            let su = rng.random::<f64>().sqrt();
            let v = rng.random::<f64>();
            a * (1.0 - su) + b * (su * (1.0 - v)) + c * (su * v)
        })
        .collect()
}

fn unit_direction(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    Vector3::new(s * phi.cos(), s * phi.sin(), z)
}

#[cfg(test)]
mod tests;
