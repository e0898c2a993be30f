// scratch diagnostics for the loss-bias protocol
use gravkit::analytic::{GravityField, SphericalHarmonicModel};
use gravkit::geometry::sample_shell;
use gravkit::network::{Architecture, MlpParams};
use gravkit::pinn::{self, BoundaryConfig, FusionConfig, LfModel, LossKind, PinnModel, PinnVariant};
use gravkit::training::{self, Dataset, DatasetMeta, Hyperparams};
use nalgebra::Vector3;

fn main() {
    for (c20, c22, batch, width) in [
        (-0.01, 0.0, 256usize, 16usize),
        (-0.08, 0.05, 256, 16),
        (-0.08, 0.05, 900, 16),
        (-0.08, 0.05, 256, 32),
    ] {
        let mut truth = SphericalHarmonicModel::zeros(1.0, 1.0, 2);
        truth.set_c_bar(0, 0, 1.0);
        truth.set_c_bar(2, 0, c20);
        truth.set_c_bar(2, 2, c22);
        let positions = sample_shell(1.0, 50.0, 1000, 17);
        let mut accelerations = Vec::new();
        let mut potentials = Vec::new();
        for p in &positions {
            let e = truth.eval(p).unwrap();
            accelerations.push(e.acceleration);
            potentials.push(e.potential);
        }
        let data = Dataset { positions, accelerations, potentials: Some(potentials), meta: DatasetMeta::default() };
        let constants = pinn::compute_constants(&data.positions, data.potentials.as_deref(), 1.0, 1.0, None).unwrap();
        let variant = PinnVariant { pines_features: true, proxy_potential: false, boundary_blend: false };
        let make = || PinnModel::new(
            MlpParams::init(Architecture::new(4, width, 5, 17)),
            constants, BoundaryConfig::new(50.0, 2.0),
            FusionConfig::disabled(LfModel::PointMass { mu: 1.0 }), variant).unwrap();
        let hp = |kind| Hyperparams { num_epochs: 1 << 11, batch_size: batch, loss_kind: kind, seed: 17, ..Default::default() };
        let t0 = std::time::Instant::now();
        let rms = training::train(make(), &data, &hp(LossKind::Rms)).unwrap().model;
        let pct = training::train(make(), &data, &hp(LossKind::RmsPct)).unwrap().model;
        let test: Vec<Vector3<f64>> = sample_shell(5.0, 50.0, 2000, 18);
        let e_rms = gravkit::evalsuite::percent_error(&truth, &rms, &test).unwrap().mean_pct;
        let e_pct = gravkit::evalsuite::percent_error(&truth, &pct, &test).unwrap().mean_pct;
        // low-altitude too, for the bias picture
        let low: Vec<Vector3<f64>> = sample_shell(1.0, 3.0, 1000, 19);
        let l_rms = gravkit::evalsuite::percent_error(&truth, &rms, &low).unwrap().mean_pct;
        let l_pct = gravkit::evalsuite::percent_error(&truth, &pct, &low).unwrap().mean_pct;
        println!("c20 {c20} c22 {c22} batch {batch} width {width}: high rms {e_rms:.3}% pct {e_pct:.3}% (ratio {:.2}) | low rms {l_rms:.3}% pct {l_pct:.3}% | {:.0}s",
                 e_rms / e_pct, t0.elapsed().as_secs_f64());
    }
}
