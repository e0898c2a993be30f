use super::oracle::VoxelQuadrature;
use super::*;
use crate::geometry::meshgen::{cube, ellipsoid};
use approx::assert_relative_eq;
use nalgebra::Vector3;

#[test]
fn pm_eval_unit_cases() {
    let e = pm_eval(1.0, &Vector3::new(1.0, 0.0, 0.0)).unwrap();
    assert_relative_eq!(e.potential, 1.0);
    assert_relative_eq!((e.acceleration - Vector3::new(-1.0, 0.0, 0.0)).norm(), 0.0);

    let e = pm_eval(1.0, &Vector3::new(0.0, 0.0, 2.0)).unwrap();
    assert_relative_eq!(e.potential, 0.5);
    assert_relative_eq!((e.acceleration - Vector3::new(0.0, 0.0, -0.25)).norm(), 0.0);

    let x = Vector3::new(1.0, 1.0, 1.0).normalize();
    let e = pm_eval(1.0, &x).unwrap();
    assert_relative_eq!(e.acceleration.norm(), 1.0, max_relative = 1e-14);
    assert_relative_eq!(e.acceleration.normalize().dot(&x), -1.0, max_relative = 1e-14);

    assert!(matches!(
        pm_eval(1.0, &Vector3::zeros()),
        Err(AnalyticError::Singularity { .. })
    ));
}

#[test]
fn poly_far_field_matches_point_mass() {
    let model = PolyhedralModel::from_mu(cube(2.0), 1.0);
    let x = Vector3::new(100.0, 0.0, 0.0);
    let got = model.eval(&x).unwrap();
    let pm = pm_eval(1.0, &x).unwrap();
    let rel = (got.acceleration - pm.acceleration).norm() / pm.acceleration.norm();
    assert!(rel < 1e-5, "far-field relative error {rel}");
    assert_relative_eq!(got.potential, pm.potential, max_relative = 1e-5);
}

#[test]
fn poly_acceleration_matches_potential_gradient() {
    let model = PolyhedralModel::from_mu(ellipsoid(2.0, 1.0, 0.8, 1), 3.0);
    for x in [
        Vector3::new(3.0, 0.5, -0.2),
        Vector3::new(0.0, 2.5, 1.0),
        Vector3::new(-1.8, -1.1, 2.2),
    ] {
        let a = model.eval(&x).unwrap().acceleration;
        let g = fd::grad_potential(&model, &x, 1e-6 * x.norm());
        assert_relative_eq!((a - g).norm() / a.norm(), 0.0, epsilon = 1e-6);
    }
}

#[test]
fn poly_matches_voxel_quadrature_at_midfield() {
    let shape = cube(2.0);
    let model = PolyhedralModel::from_mu(shape.clone(), 1.0);
    let oracle = VoxelQuadrature::new(&shape, 1.0, 100);
    let x = Vector3::new(2.0, 0.0, 0.0);
    let got = model.eval(&x).unwrap();
    let want = oracle.eval(&x);
    let rel = (got.acceleration - want.acceleration).norm() / want.acceleration.norm();
    assert!(rel < 1e-3, "voxel oracle relative error {rel}");
}

#[test]
fn poly_interior_solid_angle_and_laplacian() {
    let model = PolyhedralModel::from_mu(cube(2.0), 1.0);
    let inside = Vector3::new(0.2, -0.3, 0.1);
    let omega = model.total_solid_angle(&inside);
    assert_relative_eq!(omega, 4.0 * std::f64::consts::PI, epsilon = 1e-6);
    let outside = Vector3::new(3.0, 0.0, 0.0);
    assert_relative_eq!(model.total_solid_angle(&outside), 0.0, epsilon = 1e-6);

    // interior Laplacian = -4 pi G sigma
    let lap = fd::laplacian_potential(&model, &inside, 1e-5);
    let expect = -4.0 * std::f64::consts::PI * model.g_sigma();
    assert_relative_eq!(lap, expect, max_relative = 1e-3);

    // exterior harmonicity
    let lap_out = fd::laplacian_potential(&model, &outside, 1e-4 * 3.0);
    let scale = model.eval(&outside).unwrap().acceleration.norm() / outside.norm();
    assert!(lap_out.abs() / scale < 1e-5, "exterior laplacian {lap_out}");
}

#[test]
fn poly_rejects_surface_points() {
    let model = PolyhedralModel::from_mu(cube(2.0), 1.0);
    // on a facet interior
    assert!(matches!(
        model.eval(&Vector3::new(1.0, 0.1, 0.2)),
        Err(AnalyticError::FacetSingularity { .. })
    ));
    // on an edge
    assert!(matches!(
        model.eval(&Vector3::new(1.0, 1.0, 0.0)),
        Err(AnalyticError::EdgeSingularity { .. })
    ));
}

#[test]
fn mascon_superposition_cases() {
    let single = MasconModel::new(vec![Vector3::zeros()], vec![1.0]);
    let x = Vector3::new(0.3, -2.0, 0.7);
    let got = single.eval(&x).unwrap();
    let pm = pm_eval(1.0, &x).unwrap();
    assert_relative_eq!(got.potential, pm.potential);
    assert_relative_eq!((got.acceleration - pm.acceleration).norm(), 0.0);

    let pair = MasconModel::new(
        vec![Vector3::new(0.5, 0.0, 0.0), Vector3::new(-0.5, 0.0, 0.0)],
        vec![0.5, 0.5],
    );
    let x = Vector3::new(0.0, 0.0, 10.0);
    let got = pair.eval(&x).unwrap();
    let pm = pm_eval(1.0, &x).unwrap();
    let rel = (got.acceleration.z - pm.acceleration.z).abs() / pm.acceleration.z.abs();
    assert!(rel < 0.005, "dipole-free far field off by {rel}");

    // monopole limit: U * r -> total mu
    let far = Vector3::new(0.0, 2000.0, 0.0);
    assert_relative_eq!(pair.eval(&far).unwrap().potential * 2000.0, 1.0, max_relative = 1e-6);

    assert!(matches!(
        pair.eval(&Vector3::new(0.5, 0.0, 0.0)),
        Err(AnalyticError::Singularity { .. })
    ));
}

#[test]
fn mascon_csv_round_trip() {
    let model = MasconModel::new(
        vec![Vector3::new(1.0, 2.0, 3.0), Vector3::new(-0.25, 0.0, 0.125)],
        vec![0.75, -0.25],
    );
    let back = MasconModel::from_csv(&model.to_csv()).unwrap();
    assert_eq!(back.len(), 2);
    assert_relative_eq!(back.total_mu(), 0.5, max_relative = 1e-15);
    assert_relative_eq!((back.positions[0] - model.positions[0]).norm(), 0.0);
}

#[test]
fn hetero_with_no_anomalies_is_polyhedral() {
    let shape = cube(2.0);
    let poly = PolyhedralModel::from_mu(shape.clone(), 1.0);
    let hetero = HeterogeneousTruthModel::new(PolyhedralModel::from_mu(shape, 1.0), vec![]);
    let x = Vector3::new(1.7, 0.4, -0.9);
    let a = poly.eval(&x).unwrap();
    let b = hetero.eval(&x).unwrap();
    assert_relative_eq!(a.potential, b.potential);
    assert_relative_eq!((a.acceleration - b.acceleration).norm(), 0.0);
}

#[test]
fn hetero_two_mass_far_field_and_near_anomaly() {
    let shape = ellipsoid(1.0, 0.7, 0.6, 2);
    let truth = HeterogeneousTruthModel::two_mass(shape.clone(), 1.0, 0.1, 0.5);
    assert_relative_eq!(truth.total_mu(), 1.0, max_relative = 1e-14);
    let constant = PolyhedralModel::from_mu(shape, 1.0);

    // far field: anomaly dipole is invisible at 100 R
    let far = Vector3::new(0.0, 0.0, 100.0);
    let t = truth.eval(&far).unwrap();
    let c = constant.eval(&far).unwrap();
    let rel = (t.acceleration - c.acceleration).norm() / t.acceleration.norm();
    assert!(rel < 1e-3, "far-field anomaly visibility {rel}");

    // near the positive anomaly the constant-density model errs by > 10%
    let near = Vector3::new(0.6, 0.0, 0.0);
    let t = truth.eval(&near).unwrap();
    let c = constant.eval(&near).unwrap();
    let rel = (t.acceleration - c.acceleration).norm() / t.acceleration.norm();
    assert!(rel > 0.10, "near-anomaly error only {rel}");
}

#[test]
fn all_models_keep_acceleration_equal_to_gradient() {
    // one field point per model kind, h = 1e-6 r
    let shape = ellipsoid(2.0, 1.2, 1.0, 1);
    let poly = PolyhedralModel::from_mu(shape.clone(), 2.0);
    let hetero = HeterogeneousTruthModel::two_mass(shape, 2.0, 0.1, 0.5);
    let mascons = MasconModel::new(
        vec![Vector3::new(0.4, 0.0, 0.0), Vector3::new(-0.3, 0.2, 0.0)],
        vec![1.2, 0.8],
    );
    let x = Vector3::new(2.4, -1.9, 1.3);
    let h = 1e-6 * x.norm();
    for model in [&poly as &dyn GravityField, &hetero, &mascons] {
        let a = model.eval(&x).unwrap().acceleration;
        let g = fd::grad_potential_dyn(model, &x, h);
        assert_relative_eq!((a - g).norm() / a.norm(), 0.0, epsilon = 1e-6);
    }
}

mod fd {
    pub use super::super::fd::*;
    use super::*;

    pub fn grad_potential_dyn(
        model: &dyn GravityField,
        x: &Vector3<f64>,
        h: f64,
    ) -> Vector3<f64> {
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut xp = *x;
            let mut xm = *x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = (model.eval(&xp).unwrap().potential - model.eval(&xm).unwrap().potential)
                / (2.0 * h);
        }
        g
    }
}
