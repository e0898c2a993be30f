//! Extreme learning machine: a frozen random projection with sigmoid hidden
//! nodes and ridge-regressed output weights, fitted by the shared recursive
//! least squares over batches.

use super::{RegressError, RlsState, RLS_BATCH_SAMPLES};
use crate::analytic::{AnalyticError, GravityEval, GravityField};
use crate::training::Dataset;
use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Single-hidden-layer network with frozen random input weights.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ElmModel {
    pub seed: u64,
    pub n_hidden: usize,
    /// Frozen random projection, row-major `n_hidden x 3`.
    w_in: Vec<f64>,
    b_in: Vec<f64>,
    /// Regressed output map, row-major `3 x (n_hidden + 1)` (bias last).
    w_out: Vec<f64>,
    in_lo: [f64; 3],
    in_hi: [f64; 3],
    out_lo: [f64; 3],
    out_hi: [f64; 3],
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl ElmModel {
    /// Parameter count convention: random weights plus learned weights, one
    /// of each per hidden node.
    pub fn param_count(&self) -> usize {
        2 * self.n_hidden
    }

    fn normalize_in(&self, x: &Vector3<f64>) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let span = (self.in_hi[i] - self.in_lo[i]).max(f64::MIN_POSITIVE);
            *o = (x[i] - self.in_lo[i]) / span;
        }
        out
    }

    fn hidden(&self, x_norm: &[f64; 3]) -> Vec<f64> {
        let mut h = Vec::with_capacity(self.n_hidden + 1);
        for j in 0..self.n_hidden {
            let mut acc = self.b_in[j];
            for (i, x) in x_norm.iter().enumerate() {
                acc += self.w_in[j * 3 + i] * x;
            }
            h.push(sigmoid(acc));
        }
        h.push(1.0);
        h
    }

    pub fn predict(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let h = self.hidden(&self.normalize_in(x));
        let cols = self.n_hidden + 1;
        let mut out = Vector3::zeros();
        for axis in 0..3 {
            let mut acc = 0.0;
            for (j, hj) in h.iter().enumerate() {
                acc += self.w_out[axis * cols + j] * hj;
            }
            let span = (self.out_hi[axis] - self.out_lo[axis]).max(f64::MIN_POSITIVE);
            out[axis] = self.out_lo[axis] + acc * span;
        }
        out
    }
}

impl GravityField for ElmModel {
    /// Direct acceleration regressors carry no potential representation; the
    /// potential slot is NaN.
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
        Ok(GravityEval { potential: f64::NAN, acceleration: self.predict(x) })
    }
}

/// Random-weight spread of the frozen projection; transitions centered on
/// data points keep the nonlinearities where the samples are.
const ELM_WEIGHT_SCALE: f64 = 10.0;

/// Fits an ELM: random input layer by seed, output weights by ridge
/// recursive least squares (`Gamma = alpha I`) over batches, inputs and
/// outputs min-max normalized to [0, 1].
pub fn regress_elm(
    data: &Dataset,
    n_hidden: usize,
    alpha: f64,
    seed: u64,
) -> Result<ElmModel, RegressError> {
    assert!(n_hidden >= 1);
    if data.is_empty() {
        return Err(RegressError::EmptyData);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = ElmModel {
        seed,
        n_hidden,
        w_in: Vec::new(),
        b_in: Vec::new(),
        w_out: vec![0.0; 3 * (n_hidden + 1)],
        in_lo: [0.0; 3],
        in_hi: [0.0; 3],
        out_lo: [0.0; 3],
        out_hi: [0.0; 3],
    };
    for i in 0..3 {
        let (mut ilo, mut ihi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &data.positions {
            ilo = ilo.min(p[i]);
            ihi = ihi.max(p[i]);
        }
        let (mut olo, mut ohi) = (f64::INFINITY, f64::NEG_INFINITY);
        for a in &data.accelerations {
            olo = olo.min(a[i]);
            ohi = ohi.max(a[i]);
        }
        model.in_lo[i] = ilo;
        model.in_hi[i] = ihi;
        model.out_lo[i] = olo;
        model.out_hi[i] = ohi;
    }
    model.w_in = (0..n_hidden * 3)
        .map(|_| ELM_WEIGHT_SCALE * rng.random_range(-1.0..1.0))
        .collect();
    model.b_in = (0..n_hidden)
        .map(|j| {
            let pick = rng.random_range(0..data.len());
            let c = model.normalize_in(&data.positions[pick]);
            -(0..3).map(|i| model.w_in[j * 3 + i] * c[i]).sum::<f64>()
        })
        .collect();

    let cols = n_hidden + 1;
    let gamma = DVector::from_element(cols, alpha);
    let mut state: Option<RlsState> = None;
    for chunk in data.positions.chunks(RLS_BATCH_SAMPLES).zip(
        data.accelerations.chunks(RLS_BATCH_SAMPLES),
    ) {
        let (px, pa) = chunk;
        let mut h = DMatrix::zeros(px.len(), cols);
        let mut y = DMatrix::zeros(px.len(), 3);
        for (row, (p, a)) in px.iter().zip(pa).enumerate() {
            let hid = model.hidden(&model.normalize_in(p));
            for (j, v) in hid.iter().enumerate() {
                h[(row, j)] = *v;
            }
            for axis in 0..3 {
                let span = (model.out_hi[axis] - model.out_lo[axis]).max(f64::MIN_POSITIVE);
                y[(row, axis)] = (a[axis] - model.out_lo[axis]) / span;
            }
        }
        match &mut state {
            None => state = Some(RlsState::init(&h, &y, &gamma)?),
            Some(s) => s.update(&h, &y)?,
        }
    }
    let c = state.ok_or(RegressError::EmptyData)?;
    let c = c.coefficients();
    for axis in 0..3 {
        for j in 0..cols {
            model.w_out[axis * cols + j] = c[(j, axis)];
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::pm_eval;
    use crate::training::DatasetMeta;
    use approx::assert_relative_eq;

    fn pm_dataset(n: usize, r_lo: f64, r_hi: f64, seed: u64) -> Dataset {
        let positions = crate::geometry::sample_shell(r_lo, r_hi, n, seed);
        let accelerations = positions
            .iter()
            .map(|p| pm_eval(1.0, p).unwrap().acceleration)
            .collect();
        Dataset { positions, accelerations, potentials: None, meta: DatasetMeta::default() }
    }

    #[test]
    fn constant_field_is_reproduced_by_the_bias() {
        let positions = crate::geometry::sample_shell(1.0, 2.0, 120, 3);
        let accelerations = vec![Vector3::new(0.5, -0.25, 0.125); 120];
        let data = Dataset {
            positions: positions.clone(),
            accelerations,
            potentials: None,
            meta: DatasetMeta::default(),
        };
        let model = regress_elm(&data, 16, 1e-10, 5).unwrap();
        for p in &positions {
            let got = model.predict(p);
            assert!((got - Vector3::new(0.5, -0.25, 0.125)).norm() < 1e-6);
        }
    }

    #[test]
    fn rls_output_weights_match_dense_ridge() {
        let data = pm_dataset(1000, 1.0, 3.0, 7);
        let n_hidden = 24;
        let model = regress_elm(&data, n_hidden, 1e-4, 9).unwrap();

        // rebuild the full design matrix and solve densely
        let cols = n_hidden + 1;
        let mut h = DMatrix::zeros(data.len(), cols);
        let mut y = DMatrix::zeros(data.len(), 3);
        for (row, (p, a)) in data.positions.iter().zip(&data.accelerations).enumerate() {
            let hid = model.hidden(&model.normalize_in(p));
            for (j, v) in hid.iter().enumerate() {
                h[(row, j)] = *v;
            }
            for axis in 0..3 {
                let span = (model.out_hi[axis] - model.out_lo[axis]).max(f64::MIN_POSITIVE);
                y[(row, axis)] = (a[axis] - model.out_lo[axis]) / span;
            }
        }
        let dense =
            super::super::dense_ridge_solve(&h, &y, &DVector::from_element(cols, 1e-4)).unwrap();
        for axis in 0..3 {
            for j in 0..cols {
                assert_relative_eq!(
                    model.w_out[axis * cols + j],
                    dense[(j, axis)],
                    epsilon = 1e-8,
                    max_relative = 1e-6
                );
            }
        }
    }

    #[test]
    fn interpolates_but_diverges_when_extrapolating() {
        let data = pm_dataset(16_384, 1.0, 3.0, 11);
        let model = regress_elm(&data, 280, 1e-6, 13).unwrap();
        assert_eq!(model.param_count(), 560);

        let inside = crate::geometry::sample_shell(1.2, 2.8, 300, 20);
        let mut pct = 0.0;
        for p in &inside {
            let truth = pm_eval(1.0, p).unwrap().acceleration;
            pct += 100.0 * (model.predict(p) - truth).norm() / truth.norm();
        }
        pct /= inside.len() as f64;
        assert!(pct < 10.0, "interpolation error {pct}%");

        let outside = crate::geometry::sample_shell(8.0, 10.0, 200, 21);
        let mut pct = 0.0;
        for p in &outside {
            let truth = pm_eval(1.0, p).unwrap().acceleration;
            pct += 100.0 * (model.predict(p) - truth).norm() / truth.norm();
        }
        pct /= outside.len() as f64;
        assert!(pct > 100.0, "extrapolation error only {pct}%");
    }

    #[test]
    fn seeded_regression_is_deterministic() {
        let data = pm_dataset(300, 1.0, 2.5, 9);
        let a = regress_elm(&data, 32, 1e-8, 4).unwrap();
        let b = regress_elm(&data, 32, 1e-8, 4).unwrap();
        assert_eq!(a.w_in, b.w_in);
        assert_eq!(a.w_out, b.w_out);
    }
}
