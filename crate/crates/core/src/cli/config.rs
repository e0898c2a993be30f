//! Experiment configuration: a flat TOML tree that round-trips losslessly,
//! plus the builders that turn specs into live models and datasets.

use super::CliError;
use crate::analytic::{
    GravityEval, GravityField, HeterogeneousTruthModel, PointMassModel, PolyhedralModel,
    SphericalHarmonicModel,
};
use crate::geometry::{meshgen, BodyProperties, ShapeModel};
use crate::network::Architecture;
use crate::pinn::{
    BoundaryConfig, FusionConfig, LfModel, LossKind, NonDimConstants, PinnModel, PinnVariant,
};
use crate::training::tnn::TnnArch;
use crate::training::{Dataset, DatasetMeta, Hyperparams};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Root of an experiment description.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub truth: TruthSpec,
    #[serde(default)]
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub training: TrainingSpec,
    #[serde(default)]
    pub metrics: MetricsSpec,
    #[serde(default)]
    pub ablate: AblateSpec,
    #[serde(default)]
    pub compare: CompareSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Applies a command-line seed override to every seeded stage.
    pub fn override_seed(&mut self, seed: u64) {
        self.dataset.seed = seed;
        self.training.seed = Some(seed);
        self.model.seed = Some(seed);
        self.metrics.seed = seed;
    }
}

/// Ground-truth field description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthSpec {
    /// One of `hetero`, `poly`, `point_mass`, `sh`.
    pub kind: String,
    pub mu: f64,
    #[serde(default)]
    pub shape: Option<ShapeSpec>,
    /// Anomaly mass as a fraction of the total (heterogeneous truth).
    #[serde(default = "default_anomaly_fraction")]
    pub anomaly_fraction: f64,
    /// Anomaly offset along +-x in units of the circumscribing radius.
    #[serde(default = "default_anomaly_offset")]
    pub anomaly_offset: f64,
    /// Coefficient file for `kind = "sh"`.
    #[serde(default)]
    pub sh_file: Option<String>,
}

fn default_anomaly_fraction() -> f64 {
    0.1
}
fn default_anomaly_offset() -> f64 {
    0.5
}

impl Default for TruthSpec {
    fn default() -> Self {
        Self {
            kind: "point_mass".into(),
            mu: 1.0,
            shape: None,
            anomaly_fraction: 0.1,
            anomaly_offset: 0.5,
            sh_file: None,
        }
    }
}

/// Shape source: a builtin generator or a mesh file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub file: Option<String>,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "default_subdivisions")]
    pub subdivisions: u32,
    #[serde(default = "two")]
    pub edge: f64,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_subdivisions() -> u32 {
    1
}

impl Default for ShapeSpec {
    fn default() -> Self {
        Self {
            builtin: Some("ellipsoid".into()),
            file: None,
            a: 1.0,
            b: 1.0,
            c: 1.0,
            subdivisions: 1,
            edge: 2.0,
        }
    }
}

pub fn build_shape(spec: &ShapeSpec) -> Result<ShapeModel, CliError> {
    if let Some(path) = &spec.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("shape file {path}: {e}")))?;
        return Ok(ShapeModel::from_obj_text(&text)?);
    }
    match spec.builtin.as_deref() {
        Some("cube") => Ok(meshgen::cube(spec.edge)),
        Some("icosahedron") => Ok(meshgen::icosahedron(spec.a)),
        Some("ellipsoid") => Ok(meshgen::ellipsoid(spec.a, spec.b, spec.c, spec.subdivisions)),
        other => Err(CliError::Config(format!("unknown builtin shape {other:?}"))),
    }
}

/// A truth field held behind one dispatchable handle.
pub enum TruthField {
    PointMass(PointMassModel),
    Poly(PolyhedralModel),
    Hetero(HeterogeneousTruthModel),
    Sh(SphericalHarmonicModel),
}

impl GravityField for TruthField {
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, crate::analytic::AnalyticError> {
        match self {
            TruthField::PointMass(m) => m.eval(x),
            TruthField::Poly(m) => m.eval(x),
            TruthField::Hetero(m) => m.eval(x),
            TruthField::Sh(m) => m.eval(x),
        }
    }
}

impl TruthField {
    pub fn shape(&self) -> Option<&ShapeModel> {
        match self {
            TruthField::Poly(m) => Some(m.shape()),
            TruthField::Hetero(m) => Some(m.base.shape()),
            _ => None,
        }
    }
}

/// Builds the truth field and its bulk properties.
pub fn build_truth(spec: &TruthSpec) -> Result<(TruthField, BodyProperties), CliError> {
    match spec.kind.as_str() {
        "point_mass" => {
            let props = BodyProperties {
                mu: spec.mu,
                radius: 1.0,
                semi_axes: [1.0, 1.0, 1.0],
                eccentricity: 0.0,
            };
            Ok((TruthField::PointMass(PointMassModel { mu: spec.mu }), props))
        }
        "poly" => {
            let shape = build_shape(spec.shape.as_ref().unwrap_or(&ShapeSpec::default()))?;
            let props = BodyProperties::from_shape(&shape, spec.mu);
            Ok((TruthField::Poly(PolyhedralModel::from_mu(shape, spec.mu)), props))
        }
        "hetero" => {
            let shape = build_shape(spec.shape.as_ref().unwrap_or(&ShapeSpec::default()))?;
            let props = BodyProperties::from_shape(&shape, spec.mu);
            Ok((
                TruthField::Hetero(HeterogeneousTruthModel::two_mass(
                    shape,
                    spec.mu,
                    spec.anomaly_fraction,
                    spec.anomaly_offset,
                )),
                props,
            ))
        }
        "sh" => {
            let path = spec
                .sh_file
                .as_ref()
                .ok_or_else(|| CliError::Config("kind = \"sh\" needs sh_file".into()))?;
            let model = SphericalHarmonicModel::from_text(&std::fs::read_to_string(path)?)?;
            let props = BodyProperties {
                mu: model.mu,
                radius: model.radius,
                semi_axes: [model.radius; 3],
                eccentricity: 0.0,
            };
            Ok((TruthField::Sh(model), props))
        }
        other => Err(CliError::Config(format!("unknown truth kind {other:?}"))),
    }
}

/// Dataset generation parameters (radii in units of the body radius).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub n: usize,
    pub r_min_radii: f64,
    pub r_max_radii: f64,
    /// Extra samples placed on (a hair above) the surface.
    #[serde(default)]
    pub surface_n: usize,
    #[serde(default)]
    pub noise_fraction: f64,
    #[serde(default)]
    pub seed: u64,
    /// Drop samples inside the body and resample until `n` exterior points
    /// remain (surface-to-ceiling protocols).
    #[serde(default)]
    pub exclude_interior: bool,
    /// Load an existing CSV instead of generating.
    #[serde(default)]
    pub file: Option<String>,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            n: 512,
            r_min_radii: 0.0,
            r_max_radii: 10.0,
            surface_n: 0,
            noise_fraction: 0.0,
            seed: 0,
            exclude_interior: false,
            file: None,
        }
    }
}

/// Generates (or loads) the dataset for a truth field. Interior points are
/// kept but their indices are recorded in the metadata so experiments can
/// filter them.
pub fn build_dataset(
    spec: &DatasetSpec,
    truth: &TruthField,
    props: &BodyProperties,
) -> Result<Dataset, CliError> {
    if let Some(path) = &spec.file {
        return Ok(Dataset::read_files(Path::new(path))?);
    }
    let radius = props.radius;
    let mut positions = crate::geometry::sample_shell(
        spec.r_min_radii * radius,
        spec.r_max_radii * radius,
        spec.n,
        spec.seed,
    );
    if spec.exclude_interior {
        if let Some(shape) = truth.shape() {
            // oversample deterministically until n exterior points remain
            let mut extra = 1u64;
            positions.retain(|p| !shape.contains(p).unwrap_or(true));
            while positions.len() < spec.n {
                let more = crate::geometry::sample_shell(
                    spec.r_min_radii * radius,
                    spec.r_max_radii * radius,
                    spec.n,
                    spec.seed.wrapping_add(extra),
                );
                for p in more {
                    if positions.len() >= spec.n {
                        break;
                    }
                    if !shape.contains(&p).unwrap_or(true) {
                        positions.push(p);
                    }
                }
                extra += 1;
            }
        }
    }
    if spec.surface_n > 0 {
        let shape = truth
            .shape()
            .ok_or_else(|| CliError::Config("surface sampling needs a shape-based truth".into()))?;
        let offset = 1e-6 * radius;
        for (i, p) in
            crate::geometry::sample_surface(shape, spec.surface_n, spec.seed ^ 0x5f5f).iter().enumerate()
        {
            let f = nearest_normal(shape, p, i);
            positions.push(p + f * offset);
        }
    }

    let mut interior = Vec::new();
    let mut accelerations = Vec::with_capacity(positions.len());
    let mut potentials = Vec::with_capacity(positions.len());
    let mut kept = Vec::with_capacity(positions.len());
    for p in positions {
        let e = match truth.eval(&p) {
            Ok(e) => e,
            // points that land exactly on a facet or edge are resampled a
            // hair outward along the radial direction
            Err(_) => {
                let nudged = p * (1.0 + 1e-9);
                truth.eval(&nudged)?
            }
        };
        if let Some(shape) = truth.shape() {
            if shape.contains(&p).unwrap_or(false) {
                interior.push(kept.len());
            }
        }
        kept.push(p);
        accelerations.push(e.acceleration);
        potentials.push(e.potential);
    }

    let mut data = Dataset {
        positions: kept,
        accelerations,
        potentials: Some(potentials),
        meta: DatasetMeta {
            seed: spec.seed,
            r_min: spec.r_min_radii * radius,
            r_max: spec.r_max_radii * radius,
            noise_fraction: 0.0,
            truth_id: format!("mu={:.6e},R={:.6e}", props.mu, radius),
            interior_indices: interior,
        },
    };
    if spec.noise_fraction > 0.0 {
        data = crate::training::add_noise(&data, spec.noise_fraction, spec.seed ^ 0xa5a5);
    }
    Ok(data)
}

fn nearest_normal(shape: &ShapeModel, p: &Vector3<f64>, hint: usize) -> Vector3<f64> {
    // surface samples come from facets; find the closest facet plane to get
    // an outward direction (the hint index is not the facet id)
    let _ = hint;
    let mut best = (f64::INFINITY, 0usize);
    for f in 0..shape.facets().len() {
        let d = (p - shape.facet_centroid(f)).norm();
        if d < best.0 {
            best = (d, f);
        }
    }
    shape.facet_normal(best.1)
}

/// Learned/regressed model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// `pinn3`, `tnn`, `sh`, `mascon`, `elm`, `point_mass`, `poly`.
    pub kind: String,
    /// `small` (~250 parameters) or `large` (~30,000).
    #[serde(default)]
    pub size: Option<String>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub width: Option<usize>,
    #[serde(default)]
    pub l_max: Option<usize>,
    #[serde(default)]
    pub n_mascons: Option<usize>,
    #[serde(default)]
    pub n_hidden: Option<usize>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Pipeline switches for the learned model.
    #[serde(default)]
    pub fusion: Option<bool>,
    #[serde(default)]
    pub r_ref: Option<f64>,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub trainable_blend: Option<bool>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: "pinn3".into(),
            size: Some("small".into()),
            depth: None,
            width: None,
            l_max: None,
            n_mascons: None,
            n_hidden: None,
            alpha: None,
            seed: None,
            fusion: None,
            r_ref: None,
            k: None,
            trainable_blend: None,
        }
    }
}

impl ModelSpec {
    fn budget(&self) -> usize {
        match self.size.as_deref() {
            Some("large") => 30_000,
            _ => 250,
        }
    }

    /// Network shape for the learned models: presets by size, overridable.
    pub fn pinn_arch(&self, seed: u64) -> Architecture {
        let (d, w) = match self.size.as_deref() {
            Some("large") => (8, 64),
            _ => (2, 8),
        };
        Architecture::new(
            self.depth.unwrap_or(d),
            self.width.unwrap_or(w),
            5,
            self.seed.unwrap_or(seed),
        )
    }

    pub fn tnn_arch(&self, seed: u64) -> TnnArch {
        let (d, w) = match self.size.as_deref() {
            Some("large") => (8, 64),
            _ => (2, 12),
        };
        TnnArch {
            depth: self.depth.unwrap_or(d),
            width: self.width.unwrap_or(w),
            seed: self.seed.unwrap_or(seed),
        }
    }

    /// Degree from the parameter budget: `l (l + 1) ~ budget`.
    pub fn sh_l_max(&self) -> usize {
        self.l_max.unwrap_or_else(|| {
            let b = self.budget() as f64;
            ((-1.0 + (1.0 + 4.0 * b).sqrt()) / 2.0).round() as usize
        })
    }

    /// Mascon count from the budget: four parameters per element.
    pub fn mascon_count(&self) -> usize {
        self.n_mascons.unwrap_or(self.budget() / 4)
    }

    /// Hidden nodes from the budget: two parameters per node.
    pub fn elm_hidden(&self) -> usize {
        self.n_hidden.unwrap_or(self.budget() / 2)
    }
}

/// Assembles an untrained pipeline model for a body.
pub fn build_pinn(
    spec: &ModelSpec,
    props: &BodyProperties,
    constants: NonDimConstants,
    r_max_radii: f64,
    seed: u64,
) -> Result<PinnModel, CliError> {
    let arch = spec.pinn_arch(seed);
    let params = crate::network::MlpParams::init(arch);
    let mut boundary = BoundaryConfig::new(
        spec.r_ref.unwrap_or(r_max_radii.max(1.0)),
        spec.k.unwrap_or(2.0),
    );
    if let Some(trainable) = spec.trainable_blend {
        boundary.trainable = trainable;
    }
    let lf = LfModel::PointMass { mu: props.mu };
    let fusion = if spec.fusion.unwrap_or(true) {
        FusionConfig::small_body(props.eccentricity, lf)
    } else {
        FusionConfig::disabled(lf)
    };
    Ok(PinnModel::new(params, constants, boundary, fusion, PinnVariant::full())?)
}

/// Training-section overrides on top of the published defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSpec {
    #[serde(default)]
    pub learning_rate: Option<f64>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub num_epochs: Option<usize>,
    #[serde(default)]
    pub lr_patience: Option<usize>,
    #[serde(default)]
    pub decay_rate: Option<f64>,
    #[serde(default)]
    pub min_delta: Option<f64>,
    #[serde(default)]
    pub min_lr: Option<f64>,
    #[serde(default)]
    pub early_stop_patience: Option<usize>,
    /// `rms`, `rms_pct`, or `rms_pct_lapl`.
    #[serde(default)]
    pub loss: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl TrainingSpec {
    pub fn hyperparams(&self) -> Result<Hyperparams, CliError> {
        let mut hp = Hyperparams::default();
        if let Some(v) = self.learning_rate {
            hp.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            hp.batch_size = v;
        }
        if let Some(v) = self.num_epochs {
            hp.num_epochs = v;
        }
        if let Some(v) = self.lr_patience {
            hp.lr_patience = v;
        }
        if let Some(v) = self.decay_rate {
            hp.decay_rate = v;
        }
        if let Some(v) = self.min_delta {
            hp.min_delta = v;
        }
        if let Some(v) = self.min_lr {
            hp.min_lr = v;
        }
        if let Some(v) = self.early_stop_patience {
            hp.early_stop_patience = v;
        }
        if let Some(kind) = &self.loss {
            hp.loss_kind = match kind.as_str() {
                "rms" => LossKind::Rms,
                "rms_pct" => LossKind::RmsPct,
                "rms_pct_lapl" => LossKind::RmsPctLapl,
                other => return Err(CliError::Config(format!("unknown loss {other:?}"))),
            };
        }
        if let Some(v) = self.seed {
            hp.seed = v;
        }
        Ok(hp)
    }
}

/// Metric selection and the trajectory experiment shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSpec {
    #[serde(default = "yes")]
    pub planes: bool,
    #[serde(default = "yes")]
    pub generalization: bool,
    #[serde(default = "yes")]
    pub surface: bool,
    #[serde(default)]
    pub trajectory: bool,
    /// Orbit semi-major axis in units of the body radius.
    #[serde(default = "two")]
    pub a_over_r: f64,
    #[serde(default = "default_ecc")]
    pub ecc: f64,
    #[serde(default = "default_inc")]
    pub inc_deg: f64,
    #[serde(default = "default_spin")]
    pub omega0_deg_s: f64,
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    /// Fixed comparison samples over the duration.
    #[serde(default = "default_traj_samples")]
    pub trajectory_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn yes() -> bool {
    true
}
fn default_ecc() -> f64 {
    0.1
}
fn default_inc() -> f64 {
    90.0
}
fn default_spin() -> f64 {
    0.00073
}
fn default_duration() -> f64 {
    86_400.0
}
fn default_traj_samples() -> usize {
    1000
}

impl Default for MetricsSpec {
    fn default() -> Self {
        Self {
            planes: true,
            generalization: true,
            surface: true,
            trajectory: false,
            a_over_r: 2.0,
            ecc: 0.1,
            inc_deg: 90.0,
            omega0_deg_s: 0.00073,
            duration_s: 86_400.0,
            trajectory_samples: 1000,
            seed: 0,
        }
    }
}

impl MetricsSpec {
    pub fn trajectory_config(&self, radius: f64) -> crate::evalsuite::TrajectoryConfig {
        crate::evalsuite::TrajectoryConfig {
            elements: crate::evalsuite::OrbitalElements {
                a_sma: self.a_over_r * radius,
                ecc: self.ecc,
                inc: self.inc_deg.to_radians(),
                argp: 0.0,
                raan: 0.0,
                mean_anomaly: 0.0,
            },
            omega0_deg_s: self.omega0_deg_s,
            duration_s: self.duration_s,
            sample_step_s: self.duration_s / (self.trajectory_samples.max(2) - 1) as f64,
        }
    }
}

/// Hyperparameter ablation grids.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblateSpec {
    #[serde(default)]
    pub depths: Vec<usize>,
    #[serde(default)]
    pub widths: Vec<usize>,
    #[serde(default)]
    pub batch_sizes: Vec<usize>,
    #[serde(default)]
    pub learning_rates: Vec<f64>,
}

/// Model list for comparison tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    /// Paths to stored models, evaluated in order.
    #[serde(default)]
    pub models: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_is_lossless() {
        let mut config = ExperimentConfig {
            truth: TruthSpec {
                kind: "hetero".into(),
                mu: 4.46e5,
                shape: Some(ShapeSpec {
                    builtin: Some("ellipsoid".into()),
                    a: 16_000.0,
                    b: 8_500.0,
                    c: 6_000.0,
                    subdivisions: 2,
                    ..Default::default()
                }),
                ..Default::default()
            },
            dataset: DatasetSpec { n: 4096, r_max_radii: 10.0, seed: 7, ..Default::default() },
            ..Default::default()
        };
        config.model.kind = "pinn3".into();
        config.training.num_epochs = Some(64);
        let text = config.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "[truth]\nkind = \"point_mass\"\nmu = 1.0\nbogus = 3\n";
        assert!(ExperimentConfig::from_toml(text).is_err());
    }

    #[test]
    fn size_presets_hit_published_budgets() {
        let small = ModelSpec { kind: "pinn3".into(), ..Default::default() };
        assert_eq!(small.pinn_arch(0).param_count(), 227);
        let large = ModelSpec {
            kind: "pinn3".into(),
            size: Some("large".into()),
            ..Default::default()
        };
        assert_eq!(large.pinn_arch(0).param_count(), 30_339);

        assert_eq!(small.sh_l_max(), 15); // 240 coefficient budget
        assert_eq!(small.mascon_count(), 62);
        let explicit = ModelSpec { n_mascons: Some(55), ..small.clone() };
        assert_eq!(explicit.mascon_count(), 55);
        assert_eq!(small.elm_hidden(), 125);
    }

    #[test]
    fn dataset_generation_is_reproducible_and_flagged() {
        let spec = TruthSpec {
            kind: "hetero".into(),
            mu: 1.0,
            shape: Some(ShapeSpec {
                builtin: Some("ellipsoid".into()),
                a: 1.0,
                b: 0.8,
                c: 0.7,
                subdivisions: 1,
                ..Default::default()
            }),
            ..Default::default()
        };
        let (truth, props) = build_truth(&spec).unwrap();
        let dspec = DatasetSpec { n: 256, r_max_radii: 3.0, seed: 3, ..Default::default() };
        let a = build_dataset(&dspec, &truth, &props).unwrap();
        let b = build_dataset(&dspec, &truth, &props).unwrap();
        assert_eq!(a.positions, b.positions);
        assert_eq!(a.accelerations, b.accelerations);
        // the 0-3R band includes interior points; they are flagged
        assert!(!a.meta.interior_indices.is_empty());
        for &i in &a.meta.interior_indices {
            assert!(truth.shape().unwrap().contains(&a.positions[i]).unwrap());
        }
    }

    #[test]
    fn surface_samples_augment_the_dataset() {
        let spec = TruthSpec {
            kind: "poly".into(),
            mu: 1.0,
            shape: Some(ShapeSpec {
                builtin: Some("cube".into()),
                edge: 2.0,
                ..Default::default()
            }),
            ..Default::default()
        };
        let (truth, props) = build_truth(&spec).unwrap();
        let dspec = DatasetSpec {
            n: 50,
            r_min_radii: 1.1,
            r_max_radii: 2.0,
            surface_n: 30,
            seed: 5,
            ..Default::default()
        };
        let data = build_dataset(&dspec, &truth, &props).unwrap();
        assert_eq!(data.len(), 80);
        assert!(data.potentials.is_some());
    }
}
