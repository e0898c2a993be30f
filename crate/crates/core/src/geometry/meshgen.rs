//! Programmatic test and experiment meshes.
//!
//! Every builder routes through [`ShapeModel::new`] so the generated meshes
//! pass the same validation as loaded ones.

use super::ShapeModel;
use nalgebra::Vector3;

/// Axis-aligned cube of the given edge length, centered at the origin.
pub fn cube(edge: f64) -> ShapeModel {
    let h = edge / 2.0;
    let verts: Vec<Vector3<f64>> = [
        [-h, -h, -h],
        [h, -h, -h],
        [h, h, -h],
        [-h, h, -h],
        [-h, -h, h],
        [h, -h, h],
        [h, h, h],
        [-h, h, h],
    ]
    .iter()
    .map(|&[x, y, z]| Vector3::new(x, y, z))
    .collect();
    // two triangles per face, outward wound
    let facets = vec![
        [0, 2, 1],
        [0, 3, 2], // -z
        [4, 5, 6],
        [4, 6, 7], // +z
        [0, 1, 5],
        [0, 5, 4], // -y
        [2, 3, 7],
        [2, 7, 6], // +y
        [1, 2, 6],
        [1, 6, 5], // +x
        [3, 0, 4],
        [3, 4, 7], // -x
    ];
    ShapeModel::new(verts, facets).expect("cube mesh is valid")
}

/// Regular icosahedron with circumscribing radius `radius`.
pub fn icosahedron(radius: f64) -> ShapeModel {
    ellipsoid(radius, radius, radius, 0)
}

/// Triangulated ellipsoid with semi-axes `(a, b, c)` built by subdividing an
/// icosahedron `subdivisions` times and scaling the unit sphere.
pub fn ellipsoid(a: f64, b: f64, c: f64, subdivisions: u32) -> ShapeModel {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .iter()
    .map(|&[x, y, z]| Vector3::new(x, y, z).normalize())
    .collect();
    let mut facets: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        use std::collections::HashMap;
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(facets.len() * 4);
        for &[i, j, k] in &facets {
            let mut mid = |u: usize, v: usize, verts: &mut Vec<Vector3<f64>>| -> usize {
                let key = (u.min(v), u.max(v));
                *midpoint.entry(key).or_insert_with(|| {
                    let m = ((verts[u] + verts[v]) / 2.0).normalize();
                    verts.push(m);
                    verts.len() - 1
                })
            };
            let ij = mid(i, j, &mut verts);
            let jk = mid(j, k, &mut verts);
            let ki = mid(k, i, &mut verts);
            next.extend_from_slice(&[[i, ij, ki], [j, jk, ij], [k, ki, jk], [ij, jk, ki]]);
        }
        facets = next;
    }

    for v in &mut verts {
        v.x *= a;
        v.y *= b;
        v.z *= c;
    }
    ShapeModel::new(verts, facets).expect("subdivided icosahedron is valid")
}
