//! Optimization loop for the learned gravity models: Adam with plateau
//! learning-rate scheduling, early stopping on a seeded validation split,
//! mini-batching, and noise injection. Also hosts the dataset container and
//! its CSV form.

pub mod tnn;

use crate::pinn::{loss, LossKind, NdSample, PinnError, PinnModel};
use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Pinn(#[from] PinnError),
    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset column lengths differ or contain non-finite values")]
    BadData,
    #[error("dataset csv parse error on line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
}

/// Provenance carried with every generated dataset.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize, Default)]
pub struct DatasetMeta {
    pub seed: u64,
    pub r_min: f64,
    pub r_max: f64,
    pub noise_fraction: f64,
    pub truth_id: String,
    /// Indices of samples that fall inside the body, kept for filtering.
    #[serde(default)]
    pub interior_indices: Vec<usize>,
}

/// Position/acceleration(/potential) samples in dimensional units.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub positions: Vec<Vector3<f64>>,
    pub accelerations: Vec<Vector3<f64>>,
    pub potentials: Option<Vec<f64>>,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.is_empty() {
            return Err(TrainError::EmptyDataset);
        }
        let n = self.positions.len();
        if self.accelerations.len() != n
            || self.potentials.as_ref().is_some_and(|p| p.len() != n)
        {
            return Err(TrainError::BadData);
        }
        let finite = self
            .positions
            .iter()
            .chain(&self.accelerations)
            .all(|v| v.iter().all(|c| c.is_finite()))
            && self.potentials.iter().flatten().all(|u| u.is_finite());
        if !finite {
            return Err(TrainError::BadData);
        }
        Ok(())
    }

    /// CSV with header `x,y,z,ax,ay,az[,U]`, SI units.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.potentials.is_some() {
            "x,y,z,ax,ay,az,U\n"
        } else {
            "x,y,z,ax,ay,az\n"
        });
        for i in 0..self.len() {
            let p = self.positions[i];
            let a = self.accelerations[i];
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                p.x, p.y, p.z, a.x, a.y, a.z
            ));
            if let Some(pots) = &self.potentials {
                out.push_str(&format!(",{:.17e}", pots[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, meta: DatasetMeta) -> Result<Self, TrainError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(TrainError::CsvParse { line: 1, msg: "empty file".into() })?;
        let with_potential = header.trim_end().ends_with(",U");
        let mut data = Dataset { meta, ..Default::default() };
        if with_potential {
            data.potentials = Some(Vec::new());
        }
        for (lineno, raw) in lines {
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split(',').collect();
            let want = if with_potential { 7 } else { 6 };
            if fields.len() != want {
                return Err(TrainError::CsvParse {
                    line: lineno + 1,
                    msg: format!("expected {want} fields, got {}", fields.len()),
                });
            }
            let mut vals = Vec::with_capacity(want);
            for f in &fields {
                vals.push(f.trim().parse::<f64>().map_err(|e| TrainError::CsvParse {
                    line: lineno + 1,
                    msg: format!("bad number {f:?}: {e}"),
                })?);
            }
            data.positions.push(Vector3::new(vals[0], vals[1], vals[2]));
            data.accelerations.push(Vector3::new(vals[3], vals[4], vals[5]));
            if let Some(pots) = &mut data.potentials {
                pots.push(vals[6]);
            }
        }
        data.validate()?;
        Ok(data)
    }

    /// Writes `<stem>.csv` plus the `<stem>.meta.json` sidecar.
    pub fn write_files(&self, stem: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(stem.with_extension("csv"), self.to_csv())?;
        std::fs::write(
            stem.with_extension("meta.json"),
            serde_json::to_string_pretty(&self.meta).expect("meta serializes"),
        )
    }

    pub fn read_files(stem: &std::path::Path) -> Result<Self, TrainError> {
        let meta_path = stem.with_extension("meta.json");
        let meta = if meta_path.exists() {
            serde_json::from_str(&std::fs::read_to_string(&meta_path).map_err(|e| {
                TrainError::CsvParse { line: 0, msg: e.to_string() }
            })?)
            .map_err(|e| TrainError::CsvParse { line: 0, msg: e.to_string() })?
        } else {
            DatasetMeta::default()
        };
        let text = std::fs::read_to_string(stem.with_extension("csv"))
            .map_err(|e| TrainError::CsvParse { line: 0, msg: e.to_string() })?;
        Self::from_csv(&text, meta)
    }
}

impl Dataset {
    /// Drops the samples that fall inside the body (training protocols
    /// usually span surface-to-ceiling even when the band starts at zero).
    pub fn filter_exterior(&self, shape: &crate::geometry::ShapeModel) -> Dataset {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| !shape.contains(&self.positions[i]).unwrap_or(true))
            .collect();
        Dataset {
            positions: keep.iter().map(|&i| self.positions[i]).collect(),
            accelerations: keep.iter().map(|&i| self.accelerations[i]).collect(),
            potentials: self
                .potentials
                .as_ref()
                .map(|p| keep.iter().map(|&i| p[i]).collect()),
            meta: DatasetMeta { interior_indices: Vec::new(), ..self.meta.clone() },
        }
    }
}

/// Replaces every acceleration by `a + fraction * |a| * u` with `u` uniform
/// on the unit sphere; positions and potentials are untouched.
pub fn add_noise(data: &Dataset, fraction: f64, seed: u64) -> Dataset {
    assert!(fraction >= 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = data.clone();
    for a in &mut out.accelerations {
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).sqrt();
        let dir = Vector3::new(s * phi.cos(), s * phi.sin(), z);
        *a += fraction * a.norm() * dir;
    }
    out.meta.noise_fraction = fraction;
    out
}

/// Training hyperparameters; the defaults are the published table values.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub num_epochs: usize,
    pub lr_patience: usize,
    pub decay_rate: f64,
    pub min_delta: f64,
    pub min_lr: f64,
    pub early_stop_patience: usize,
    pub loss_kind: LossKind,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 2.0f64.powi(-8),
            batch_size: 1 << 11,
            num_epochs: 1 << 13,
            lr_patience: 1500,
            decay_rate: 0.5,
            min_delta: 0.001,
            min_lr: 1e-6,
            early_stop_patience: 3000,
            loss_kind: LossKind::RmsPct,
            seed: 0,
        }
    }
}

/// Adam first/second moment state.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// One bias-corrected Adam update in place.
pub fn adam_step(params: &mut [f64], grad: &[f64], state: &mut AdamState, lr: f64) {
    assert_eq!(params.len(), grad.len());
    assert_eq!(params.len(), state.m.len());
    state.step += 1;
    let b1 = state.beta1;
    let b2 = state.beta2;
    let c1 = 1.0 - b1.powi(state.step as i32);
    let c2 = 1.0 - b2.powi(state.step as i32);
    for i in 0..params.len() {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        let m_hat = state.m[i] / c1;
        let v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + state.epsilon);
    }
}

/// Plateau scheduler: halve the learning rate after `patience` consecutive
/// epochs without a relative improvement of `min_delta`, never below
/// `min_lr`.
#[derive(Debug, Clone)]
pub struct PlateauState {
    pub lr: f64,
    best: f64,
    stale: usize,
    patience: usize,
    decay: f64,
    min_delta: f64,
    min_lr: f64,
}

impl PlateauState {
    pub fn new(hp: &Hyperparams) -> Self {
        Self {
            lr: hp.learning_rate,
            best: f64::INFINITY,
            stale: 0,
            patience: hp.lr_patience,
            decay: hp.decay_rate,
            min_delta: hp.min_delta,
            min_lr: hp.min_lr,
        }
    }

    pub fn update(&mut self, val_loss: f64) -> f64 {
        if val_loss < self.best * (1.0 - self.min_delta) {
            self.best = val_loss;
            self.stale = 0;
        } else {
            self.stale += 1;
            if self.stale >= self.patience {
                self.lr = (self.lr * self.decay).max(self.min_lr);
                self.stale = 0;
            }
        }
        self.lr
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
    pub wall_seconds: f64,
}

/// Per-epoch log of one training run.
#[derive(Debug, Clone, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
}

impl TrainHistory {
    /// CSV `epoch,train_loss,val_loss,lr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss,lr\n");
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e}\n",
                e.epoch, e.train_loss, e.val_loss, e.lr
            ));
        }
        out
    }
}

/// Outcome of [`train`]: the best-validation model, the per-epoch history,
/// and the validation split for later reporting.
pub struct TrainOutcome {
    pub model: PinnModel,
    pub history: TrainHistory,
    pub val_samples: Vec<NdSample>,
}

/// Trains the pipeline with Adam on a seeded 90/10 train/validation split.
///
/// Deterministic for a fixed seed; the returned parameters are the ones with
/// the best validation loss, and training stops early after
/// `early_stop_patience` epochs without relative improvement.
pub fn train(
    model: PinnModel,
    data: &Dataset,
    hp: &Hyperparams,
) -> Result<TrainOutcome, TrainError> {
    data.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);

    let samples: Vec<NdSample> = data
        .positions
        .iter()
        .zip(&data.accelerations)
        .map(|(x, a)| NdSample::from_dimensional(x, a, &model.constants))
        .collect();

    let mut indices: Vec<usize> = (0..samples.len()).collect();
    indices.shuffle(&mut rng);
    let val_n = (samples.len() / 10).max(1).min(samples.len().saturating_sub(1));
    let (train_part, val_part) = indices.split_at(samples.len() - val_n);
    let mut train_idx = train_part.to_vec();
    let val_samples: Vec<NdSample> = val_part.iter().map(|&i| samples[i]).collect();

    let mut model = model;
    let mut adam = AdamState::new(model.params.len());
    let mut plateau = PlateauState::new(hp);
    let mut grad = vec![0.0; model.params.len()];
    let mut history = TrainHistory::default();

    let mut best_val = f64::INFINITY;
    let mut best_params = model.params.clone();
    let mut stale = 0usize;
    let start = std::time::Instant::now();

    for epoch in 1..=hp.num_epochs {
        train_idx.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut n_batches = 0usize;
        for chunk in train_idx.chunks(hp.batch_size.max(1)) {
            let batch: Vec<NdSample> = chunk.iter().map(|&i| samples[i]).collect();
            let loss = loss::loss_and_grad(&model, &batch, hp.loss_kind, &mut grad)?;
            if !loss.is_finite() {
                return Err(TrainError::Diverged { epoch });
            }
            adam_step(model.params.values_mut(), &grad, &mut adam, plateau.lr);
            epoch_loss += loss;
            n_batches += 1;
        }
        let val_loss = loss::loss_value(&model, &val_samples, hp.loss_kind)?;
        if !val_loss.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }
        let lr = plateau.update(val_loss);
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: epoch_loss / n_batches.max(1) as f64,
            val_loss,
            lr,
            wall_seconds: start.elapsed().as_secs_f64(),
        });

        if val_loss < best_val {
            // snapshot any strict improvement; the early-stop counter only
            // resets on improvements beyond min_delta
            if val_loss < best_val * (1.0 - hp.min_delta) {
                stale = 0;
            } else {
                stale += 1;
            }
            best_val = val_loss;
            best_params = model.params.clone();
        } else {
            stale += 1;
        }
        if stale >= hp.early_stop_patience {
            break;
        }
    }

    model.params = best_params;
    Ok(TrainOutcome { model, history, val_samples })
}
