//! Classical regression pipelines: recursive least squares with ridge
//! regularization, shared by the Stokes-coefficient, mascon, and
//! extreme-learning-machine fits.

pub mod elm;
pub mod mascon;
pub mod sh;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use elm::{regress_elm, ElmModel};
pub use mascon::{regress_mascons, regress_mascons_at, MasconFitReport};
pub use sh::{regress_sh, ShFitReport};

/// Rows fed to one recursive update; 100 position/acceleration pairs.
pub const RLS_BATCH_SAMPLES: usize = 100;
/// Coefficient-group ceiling for the iterative large-model path.
pub const COEFF_GROUP_SIZE: usize = 5000;

#[derive(Debug, Error)]
pub enum RegressError {
    #[error("initial normal matrix is not invertible (numerical breakdown)")]
    InitialNotInvertible,
    #[error("recursive update inner matrix is not invertible (numerical breakdown)")]
    InnerNotInvertible,
    #[error("every sample lies beneath the Brillouin radius; nothing to regress")]
    AllSubBrillouin,
    #[error("dataset is empty")]
    EmptyData,
    #[error("failed to place {placed} of {wanted} mascons inside the body")]
    PlacementFailed { placed: usize, wanted: usize },
}

/// Recursive least squares over `(K^-1, c)` with multi-column targets.
///
/// Streaming batches through [`RlsState::update`] reproduces the dense
/// regularized solution `(H^T H + Gamma)^-1 H^T y` exactly (up to round-off).
#[derive(Debug, Clone)]
pub struct RlsState {
    k_inv: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl RlsState {
    /// Seeds the recursion from the first batch:
    /// `K_0^-1 = (H_0^T H_0 + Gamma)^-1`, `c_0 = K_0^-1 H_0^T y_0`.
    pub fn init(
        h0: &DMatrix<f64>,
        y0: &DMatrix<f64>,
        gamma_diag: &DVector<f64>,
    ) -> Result<Self, RegressError> {
        let n = h0.ncols();
        assert_eq!(gamma_diag.len(), n);
        assert_eq!(h0.nrows(), y0.nrows());
        let mut k = h0.transpose() * h0;
        for i in 0..n {
            k[(i, i)] += gamma_diag[i];
        }
        let k_inv = k.try_inverse().ok_or(RegressError::InitialNotInvertible)?;
        let c = &k_inv * (h0.transpose() * y0);
        Ok(Self { k_inv, c })
    }

    /// One recursion step:
    /// `K^-1 <- K^-1 - K^-1 H^T (I + H K^-1 H^T)^-1 H K^-1`,
    /// `c <- c + K^-1 H^T (y - H c)`. Empty batches are a no-op.
    pub fn update(&mut self, h: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<(), RegressError> {
        if h.nrows() == 0 {
            return Ok(());
        }
        assert_eq!(h.ncols(), self.k_inv.ncols());
        assert_eq!(h.nrows(), y.nrows());
        let kht = &self.k_inv * h.transpose();
        let inner = DMatrix::identity(h.nrows(), h.nrows()) + h * &kht;
        let inner_inv = inner.try_inverse().ok_or(RegressError::InnerNotInvertible)?;
        self.k_inv -= &kht * inner_inv * kht.transpose();
        let residual = y - h * &self.c;
        self.c += &self.k_inv * (h.transpose() * residual);
        // positive definiteness is the recursion's invariant; a non-positive
        // or non-finite diagonal means it broke down numerically
        for i in 0..self.k_inv.nrows() {
            let d = self.k_inv[(i, i)];
            if d.is_nan() || d <= 0.0 || d.is_infinite() {
                return Err(RegressError::InnerNotInvertible);
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn k_inv(&self) -> &DMatrix<f64> {
        &self.k_inv
    }
}

/// Dense reference solve `(H^T H + Gamma)^-1 H^T y`, the oracle the
/// streaming path is checked against.
pub fn dense_ridge_solve(
    h: &DMatrix<f64>,
    y: &DMatrix<f64>,
    gamma_diag: &DVector<f64>,
) -> Result<DMatrix<f64>, RegressError> {
    let n = h.ncols();
    let mut k = h.transpose() * h;
    for i in 0..n {
        k[(i, i)] += gamma_diag[i];
    }
    let k_inv = k.try_inverse().ok_or(RegressError::InitialNotInvertible)?;
    Ok(k_inv * (h.transpose() * y))
}

/// Degree-dependent ridge prior shrinking high-degree coefficients:
/// `alpha / l^2` above degree zero, `alpha` at degree zero.
#[derive(Debug, Clone, Copy)]
pub struct KaulaRegularizer {
    pub alpha: f64,
}

impl KaulaRegularizer {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha >= 0.0);
        Self { alpha }
    }

    pub fn weight(&self, degree: usize) -> f64 {
        if degree == 0 {
            self.alpha
        } else {
            self.alpha / (degree * degree) as f64
        }
    }

    /// Diagonal for a coefficient layout slice.
    pub fn diagonal(&self, ids: &[crate::analytic::harmonics::CoeffId]) -> DVector<f64> {
        DVector::from_iterator(ids.len(), ids.iter().map(|id| self.weight(id.l)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_batch_is_a_no_op() {
        let h0 = DMatrix::from_row_slice(2, 1, &[2.0, 1.0]);
        let y0 = DMatrix::from_row_slice(2, 1, &[4.0, 3.0]);
        let gamma = DVector::from_element(1, 0.5);
        let mut state = RlsState::init(&h0, &y0, &gamma).unwrap();
        let before = state.c.clone();
        state
            .update(&DMatrix::zeros(0, 1), &DMatrix::zeros(0, 1))
            .unwrap();
        assert_eq!(state.c, before);
    }

    #[test]
    fn scalar_recursion_matches_hand_computation() {
        // batch 0: H = [2], y = [4], gamma = 0.5 -> K0^(-1) = 1/4.5, c0 = 16/9
        // batch 1: H = [1], y = [3] -> c1 = 2 exactly
        let gamma = DVector::from_element(1, 0.5);
        let mut state = RlsState::init(
            &DMatrix::from_row_slice(1, 1, &[2.0]),
            &DMatrix::from_row_slice(1, 1, &[4.0]),
            &gamma,
        )
        .unwrap();
        assert_relative_eq!(state.c[(0, 0)], 16.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(state.k_inv[(0, 0)], 1.0 / 4.5, max_relative = 1e-14);
        state
            .update(
                &DMatrix::from_row_slice(1, 1, &[1.0]),
                &DMatrix::from_row_slice(1, 1, &[3.0]),
            )
            .unwrap();
        assert_relative_eq!(state.c[(0, 0)], 2.0, max_relative = 1e-12);
        assert_relative_eq!(state.k_inv[(0, 0)], 2.0 / 11.0, max_relative = 1e-12);
    }

    #[test]
    fn streaming_equals_dense_solve() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let (rows, cols) = (240, 18);
        let h = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
        let y = DMatrix::from_fn(rows, 2, |_, _| rng.random_range(-1.0..1.0));
        let gamma = DVector::from_fn(cols, |i, _| 1e-6 * (1.0 + i as f64));

        let dense = dense_ridge_solve(&h, &y, &gamma).unwrap();

        let mut state = RlsState::init(
            &h.rows(0, 60).into_owned(),
            &y.rows(0, 60).into_owned(),
            &gamma,
        )
        .unwrap();
        let mut row = 60;
        while row < rows {
            let take = 45.min(rows - row);
            state
                .update(&h.rows(row, take).into_owned(), &y.rows(row, take).into_owned())
                .unwrap();
            row += take;
        }
        let diff = (state.c.clone() - dense).abs().max();
        assert!(diff < 1e-8, "streaming vs dense max deviation {diff}");
    }

    #[test]
    fn kaula_weights_decay_quadratically() {
        let kaula = KaulaRegularizer::new(1e-4);
        assert_eq!(kaula.weight(0), 1e-4);
        assert_eq!(kaula.weight(1), 1e-4);
        assert_eq!(kaula.weight(2), 2.5e-5);
        assert_eq!(kaula.weight(10), 1e-6);
    }
}
