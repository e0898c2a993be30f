//! Subcommand bodies. Each takes a parsed config and an output directory,
//! writes its data files there, and returns a summary the callers (binary
//! and tests) can inspect.

use super::config::*;
use super::CliError;
use crate::analytic::{GravityField, MasconModel, PointMassModel, PolyhedralModel, SphericalHarmonicModel};
use crate::evalsuite::{self, MetricsReport, Trajectory};
use crate::pinn::{self, bundle, LossKind, PinnModel, PinnVariant};
use crate::regress;
use crate::training::{self, tnn, Dataset};
use std::path::{Path, PathBuf};

/// Truth-propagation tolerances for the cached reference trajectory.
const TRUTH_RTOL: f64 = 1e-12;
const TRUTH_ATOL: f64 = 1e-14;

/// Writes the generated dataset (`dataset.csv` + sidecar) under `out`.
pub fn cmd_gen_data(config: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out)?;
    let (truth, props) = build_truth(&config.truth)?;
    let data = build_dataset(&config.dataset, &truth, &props)?;
    let stem = out.join("dataset");
    data.write_files(&stem)?;
    Ok(stem.with_extension("csv"))
}

/// Outcome of a training or regression command.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FitSummary {
    pub model_path: PathBuf,
    pub kind: String,
    pub params: usize,
    pub regression_seconds: f64,
    /// Mean percent acceleration error on the validation split, when the
    /// fit produces one.
    pub validation_pct: Option<f64>,
}

/// Trains a learned model (`pinn3` or `tnn`) and stores it with its history.
pub fn cmd_train(config: &ExperimentConfig, out: &Path) -> Result<FitSummary, CliError> {
    std::fs::create_dir_all(out)?;
    let (truth, props) = build_truth(&config.truth)?;
    let data = build_dataset(&config.dataset, &truth, &props)?;
    let hp = config.training.hyperparams()?;
    let start = std::time::Instant::now();
    match config.model.kind.as_str() {
        "pinn3" => {
            let fusion_on = config.model.fusion.unwrap_or(true);
            let lf = pinn::LfModel::PointMass { mu: props.mu };
            let constants = pinn::compute_constants(
                &data.positions,
                data.potentials.as_deref(),
                props.mu,
                props.radius,
                fusion_on.then_some(&lf),
            )?;
            let model = build_pinn(
                &config.model,
                &props,
                constants,
                config.dataset.r_max_radii,
                hp.seed,
            )?;
            let outcome = training::train(model, &data, &hp)?;
            let seconds = start.elapsed().as_secs_f64();
            let bundle_dir = out.join("model.pinn");
            bundle::save(&outcome.model, &bundle_dir)?;
            std::fs::write(out.join("history.csv"), outcome.history.to_csv())?;
            let pct = pinn::loss::mean_percent_error(&outcome.model, &outcome.val_samples)?;
            Ok(FitSummary {
                model_path: bundle_dir,
                kind: "pinn3".into(),
                params: outcome.model.param_count(),
                regression_seconds: seconds,
                validation_pct: Some(pct),
            })
        }
        "tnn" => {
            let arch = config.model.tnn_arch(hp.seed);
            let (model, history) = tnn::train_tnn(&data, &hp, arch)?;
            let seconds = start.elapsed().as_secs_f64();
            let path = out.join("model.tnn.json");
            std::fs::write(&path, serde_json::to_string_pretty(&model)?)?;
            std::fs::write(out.join("history.csv"), history.to_csv())?;
            Ok(FitSummary {
                model_path: path,
                kind: "tnn".into(),
                params: model.param_count(),
                regression_seconds: seconds,
                validation_pct: None,
            })
        }
        other => Err(CliError::Config(format!(
            "cmd_train handles pinn3/tnn, not {other:?} (use regress)"
        ))),
    }
}

/// Regresses a classical model (`sh`, `mascon`, `elm`) and stores it.
pub fn cmd_regress(config: &ExperimentConfig, out: &Path) -> Result<FitSummary, CliError> {
    std::fs::create_dir_all(out)?;
    let (truth, props) = build_truth(&config.truth)?;
    let data = build_dataset(&config.dataset, &truth, &props)?;
    let seed = config.model.seed.unwrap_or(config.dataset.seed);
    let start = std::time::Instant::now();
    match config.model.kind.as_str() {
        "sh" => {
            let alpha = config.model.alpha.unwrap_or(1e-8);
            let (model, report) =
                regress::regress_sh(&data, config.model.sh_l_max(), alpha, props.mu, props.radius)?;
            let path = out.join("model.sh.txt");
            std::fs::write(&path, model.to_text())?;
            if report.dropped_sub_brillouin > 0 {
                eprintln!(
                    "regress sh: dropped {} sub-Brillouin sample(s)",
                    report.dropped_sub_brillouin
                );
            }
            Ok(FitSummary {
                model_path: path,
                kind: "sh".into(),
                params: model.param_count(),
                regression_seconds: start.elapsed().as_secs_f64(),
                validation_pct: None,
            })
        }
        "mascon" => {
            let shape = truth
                .shape()
                .ok_or_else(|| CliError::Config("mascon regression needs a shape-based truth".into()))?;
            let (model, report) =
                regress::regress_mascons(&data, shape, config.model.mascon_count(), seed)?;
            let path = out.join("model.mascons.csv");
            std::fs::write(&path, model.to_csv())?;
            eprintln!(
                "regress mascon: total mu {:.6e} over {} batches ({} ridge fallbacks)",
                report.total_mu, report.batches, report.ridge_fallbacks
            );
            Ok(FitSummary {
                model_path: path,
                kind: "mascon".into(),
                params: model.param_count(),
                regression_seconds: start.elapsed().as_secs_f64(),
                validation_pct: None,
            })
        }
        "elm" => {
            let alpha = config.model.alpha.unwrap_or(1e-6);
            let model = regress::regress_elm(&data, config.model.elm_hidden(), alpha, seed)?;
            let path = out.join("model.elm.json");
            std::fs::write(&path, serde_json::to_string_pretty(&model)?)?;
            Ok(FitSummary {
                model_path: path,
                kind: "elm".into(),
                params: model.param_count(),
                regression_seconds: start.elapsed().as_secs_f64(),
                validation_pct: None,
            })
        }
        other => Err(CliError::Config(format!(
            "cmd_regress handles sh/mascon/elm, not {other:?} (use train)"
        ))),
    }
}

/// A stored model brought back to life for evaluation.
pub enum StoredModel {
    Pinn(PinnModel),
    Tnn(tnn::TnnModel),
    Sh(SphericalHarmonicModel),
    Mascon(MasconModel),
    Elm(regress::ElmModel),
    PointMass(PointMassModel),
    Poly(PolyhedralModel),
}

impl StoredModel {
    pub fn field(&self) -> &dyn GravityField {
        match self {
            StoredModel::Pinn(m) => m,
            StoredModel::Tnn(m) => m,
            StoredModel::Sh(m) => m,
            StoredModel::Mascon(m) => m,
            StoredModel::Elm(m) => m,
            StoredModel::PointMass(m) => m,
            StoredModel::Poly(m) => m,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StoredModel::Pinn(_) => "pinn3",
            StoredModel::Tnn(_) => "tnn",
            StoredModel::Sh(_) => "sh",
            StoredModel::Mascon(_) => "mascon",
            StoredModel::Elm(_) => "elm",
            StoredModel::PointMass(_) => "point_mass",
            StoredModel::Poly(_) => "poly",
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            StoredModel::Pinn(m) => m.param_count(),
            StoredModel::Tnn(m) => m.param_count(),
            StoredModel::Sh(m) => m.param_count(),
            StoredModel::Mascon(m) => m.param_count(),
            StoredModel::Elm(m) => m.param_count(),
            StoredModel::PointMass(_) => 1,
            StoredModel::Poly(m) => m.param_count(),
        }
    }
}

/// Loads a stored model. Bundles are directories; files are dispatched on
/// their extension chain. The literals `point_mass` and `poly` build the
/// analytic baselines from the truth config.
pub fn load_model(spec: &str, config: &ExperimentConfig) -> Result<StoredModel, CliError> {
    match spec {
        "point_mass" => {
            return Ok(StoredModel::PointMass(PointMassModel { mu: config.truth.mu }));
        }
        "poly" => {
            let shape = build_shape(
                config
                    .truth
                    .shape
                    .as_ref()
                    .ok_or_else(|| CliError::Config("poly baseline needs truth.shape".into()))?,
            )?;
            return Ok(StoredModel::Poly(PolyhedralModel::from_mu(shape, config.truth.mu)));
        }
        _ => {}
    }
    let path = Path::new(spec);
    if path.is_dir() {
        return Ok(StoredModel::Pinn(bundle::load(path)?));
    }
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
    if name.ends_with(".sh.txt") {
        Ok(StoredModel::Sh(SphericalHarmonicModel::from_text(
            &std::fs::read_to_string(path)?,
        )?))
    } else if name.ends_with(".mascons.csv") {
        Ok(StoredModel::Mascon(MasconModel::from_csv(&std::fs::read_to_string(path)?)?))
    } else if name.ends_with(".elm.json") {
        Ok(StoredModel::Elm(serde_json::from_str(&std::fs::read_to_string(path)?)?))
    } else if name.ends_with(".tnn.json") {
        Ok(StoredModel::Tnn(serde_json::from_str(&std::fs::read_to_string(path)?)?))
    } else {
        Err(CliError::Config(format!("cannot infer model kind from {spec:?}")))
    }
}

/// Evaluates a stored model against the configured truth with the selected
/// metrics; writes `report.json` under `out`.
pub fn cmd_evaluate(
    config: &ExperimentConfig,
    model_spec: &str,
    out: &Path,
) -> Result<MetricsReport, CliError> {
    std::fs::create_dir_all(out)?;
    let (truth, props) = build_truth(&config.truth)?;
    let model = load_model(model_spec, config)?;
    let report = evaluate_model(config, &truth, &props, &model, None)?;
    std::fs::write(out.join("report.json"), report.to_json())?;
    Ok(report)
}

/// Shared metric runner; `truth_traj` lets callers reuse the cached truth
/// trajectory across models.
pub fn evaluate_model(
    config: &ExperimentConfig,
    truth: &TruthField,
    props: &crate::geometry::BodyProperties,
    model: &StoredModel,
    truth_traj: Option<&Trajectory>,
) -> Result<MetricsReport, CliError> {
    let spec = &config.metrics;
    let field = model.field();
    let body = truth.shape();
    let mut report = MetricsReport {
        model_name: model.kind().to_string(),
        params: Some(model.param_count()),
        ..Default::default()
    };

    if spec.planes {
        let planes = evalsuite::planes_metric(truth, field, props.radius, body)?;
        report.planes_pct = Some(planes.mean_pct);
        report.excluded_points += planes.excluded;
    }
    if spec.generalization {
        let (interior, exterior, extrapolation) =
            evalsuite::generalization_metric(truth, field, props.radius, body, spec.seed)?;
        report.interior_pct = Some(interior.mean_pct);
        report.exterior_pct = Some(exterior.mean_pct);
        report.extrapolation_pct = Some(extrapolation.mean_pct);
        report.excluded_points += interior.excluded + exterior.excluded + extrapolation.excluded;
    }
    if spec.surface {
        if let Some(shape) = body {
            let surface = evalsuite::surface_metric(truth, field, shape)?;
            report.surface_pct = Some(surface.mean_pct);
            report.excluded_points += surface.excluded;
        }
    }
    if spec.trajectory {
        let tc = spec.trajectory_config(props.radius);
        let owned;
        let reference = match truth_traj {
            Some(t) => t,
            None => {
                owned = evalsuite::orbit::propagate_with_tol(
                    truth, props.mu, &tc, TRUTH_RTOL, TRUTH_ATOL,
                )?;
                &owned
            }
        };
        let model_traj = evalsuite::propagate(field, props.mu, &tc)?;
        let (s, final_err) = evalsuite::accumulated_error(&model_traj, reference)?;
        report.accumulated_error_km = Some(s / 1000.0);
        report.final_position_error_km = Some(final_err / 1000.0);
        report.propagation_time_s = Some(model_traj.wall_seconds);
    }
    report.update_diverged();
    Ok(report)
}

/// Evaluates every model in `config.compare.models` and writes the
/// comparison CSV (one row per model, order preserved, NA for absent cells).
pub fn cmd_compare(config: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out)?;
    if config.compare.models.is_empty() {
        return Err(CliError::Config("compare.models is empty".into()));
    }
    let (truth, props) = build_truth(&config.truth)?;
    let truth_traj = if config.metrics.trajectory {
        let tc = config.metrics.trajectory_config(props.radius);
        Some(evalsuite::orbit::propagate_with_tol(
            &truth, props.mu, &tc, TRUTH_RTOL, TRUTH_ATOL,
        )?)
    } else {
        None
    };
    let mut csv = String::from(MetricsReport::csv_header());
    csv.push('\n');
    for spec in &config.compare.models {
        let model = load_model(spec, config)?;
        let mut report =
            evaluate_model(config, &truth, &props, &model, truth_traj.as_ref())?;
        report.model_name = spec.clone();
        csv.push_str(&report.csv_cells().join(","));
        csv.push('\n');
    }
    let path = out.join("comparison.csv");
    std::fs::write(&path, csv)?;
    Ok(path)
}

/// Propagates a model and the truth on the configured orbit; writes the
/// sampled trajectory and an error summary.
pub fn cmd_trajectory(
    config: &ExperimentConfig,
    model_spec: &str,
    out: &Path,
) -> Result<(f64, f64), CliError> {
    std::fs::create_dir_all(out)?;
    let (truth, props) = build_truth(&config.truth)?;
    let model = load_model(model_spec, config)?;
    let tc = config.metrics.trajectory_config(props.radius);
    let reference =
        evalsuite::orbit::propagate_with_tol(&truth, props.mu, &tc, TRUTH_RTOL, TRUTH_ATOL)?;
    let model_traj = evalsuite::propagate(model.field(), props.mu, &tc)?;
    let (s, final_err) = evalsuite::accumulated_error(&model_traj, &reference)?;

    let mut csv = String::from("t,x,y,z,x_true,y_true,z_true\n");
    for i in 0..model_traj.times.len() {
        let p = model_traj.positions[i];
        let q = reference.positions[i];
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            model_traj.times[i], p.x, p.y, p.z, q.x, q.y, q.z
        ));
    }
    std::fs::write(out.join("trajectory.csv"), csv)?;
    std::fs::write(
        out.join("trajectory.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "accumulated_error_km": s / 1000.0,
            "final_position_error_km": final_err / 1000.0,
            "propagation_time_s": model_traj.wall_seconds,
        }))?,
    )?;
    Ok((s / 1000.0, final_err / 1000.0))
}

/// One ablation grid cell.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AblateRow {
    pub depth: usize,
    pub width: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub params: usize,
    pub validation_pct: f64,
    pub seconds: f64,
}

/// Trains the depth/width grid and/or the batch/learning-rate grid cell by
/// cell and writes `ablation.csv`.
pub fn cmd_ablate(config: &ExperimentConfig, out: &Path) -> Result<Vec<AblateRow>, CliError> {
    std::fs::create_dir_all(out)?;
    let grid = &config.ablate;
    let size_grid = !grid.depths.is_empty() && !grid.widths.is_empty();
    let sgd_grid = !grid.batch_sizes.is_empty() && !grid.learning_rates.is_empty();
    if !size_grid && !sgd_grid {
        return Err(CliError::Config("ablation grid is empty".into()));
    }

    let (truth, props) = build_truth(&config.truth)?;
    let data = build_dataset(&config.dataset, &truth, &props)?;
    let base_hp = config.training.hyperparams()?;
    let mut rows = Vec::new();

    let mut cells: Vec<(usize, usize, usize, f64)> = Vec::new();
    if size_grid {
        for &d in &grid.depths {
            for &w in &grid.widths {
                cells.push((d, w, base_hp.batch_size, base_hp.learning_rate));
            }
        }
    }
    if sgd_grid {
        let arch = config.model.pinn_arch(base_hp.seed);
        for &b in &grid.batch_sizes {
            for &lr in &grid.learning_rates {
                cells.push((arch.depth, arch.width, b, lr));
            }
        }
    }

    for (depth, width, batch_size, learning_rate) in cells {
        let mut spec = config.model.clone();
        spec.depth = Some(depth);
        spec.width = Some(width);
        let mut hp = base_hp.clone();
        hp.batch_size = batch_size;
        hp.learning_rate = learning_rate;
        let lf = pinn::LfModel::PointMass { mu: props.mu };
        let fusion_on = spec.fusion.unwrap_or(true);
        let constants = pinn::compute_constants(
            &data.positions,
            data.potentials.as_deref(),
            props.mu,
            props.radius,
            fusion_on.then_some(&lf),
        )?;
        let model = build_pinn(&spec, &props, constants, config.dataset.r_max_radii, hp.seed)?;
        let start = std::time::Instant::now();
        let outcome = training::train(model, &data, &hp)?;
        let seconds = start.elapsed().as_secs_f64();
        let pct = pinn::loss::mean_percent_error(&outcome.model, &outcome.val_samples)?;
        rows.push(AblateRow {
            depth,
            width,
            batch_size,
            learning_rate,
            params: outcome.model.param_count(),
            validation_pct: pct,
            seconds,
        });
    }

    let mut csv = String::from("depth,width,batch_size,learning_rate,params,validation_pct,seconds\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{:e},{},{:.6},{:.3}\n",
            r.depth, r.width, r.batch_size, r.learning_rate, r.params, r.validation_pct, r.seconds
        ));
    }
    std::fs::write(out.join("ablation.csv"), csv)?;
    Ok(rows)
}

/// The staged-modification ladder, applied cumulatively.
pub const MOD_STAGES: [&str; 5] = ["I", "II", "III", "IV", "V"];

/// Per-stage configuration: pipeline switches, fusion, and loss.
pub fn stage_setup(stage: &str) -> (PinnVariant, bool, LossKind) {
    let base = PinnVariant { pines_features: true, proxy_potential: false, boundary_blend: false };
    match stage {
        // I: bounded radial features only
        "I" => (base, false, LossKind::Rms),
        // II: + percent term in the loss
        "II" => (base, false, LossKind::RmsPct),
        // III: + proxy potential unscaling
        "III" => (
            PinnVariant { proxy_potential: true, ..base },
            false,
            LossKind::RmsPct,
        ),
        // IV: + boundary blending
        "IV" => (
            PinnVariant { proxy_potential: true, boundary_blend: true, ..base },
            false,
            LossKind::RmsPct,
        ),
        // V: + fused analytic potential
        "V" => (PinnVariant::full(), true, LossKind::RmsPct),
        other => panic!("unknown stage {other}"),
    }
}

/// One row of the staged study.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ModsRow {
    pub stage: String,
    pub interior_pct: f64,
    pub exterior_pct: f64,
    pub extrapolation_pct: f64,
    /// Error on a thin shell at the far edge of the extrapolation band.
    pub limit_pct: f64,
}

/// Trains the modification ladder stage by stage (identical data and seeds)
/// and reports the generalization metrics per stage.
pub fn cmd_mods_study(config: &ExperimentConfig, out: &Path) -> Result<Vec<ModsRow>, CliError> {
    std::fs::create_dir_all(out)?;
    let (truth, props) = build_truth(&config.truth)?;
    let data = build_dataset(&config.dataset, &truth, &props)?;
    let hp = config.training.hyperparams()?;
    let mut rows = Vec::new();
    for stage in MOD_STAGES {
        let model = train_stage(config, stage, &truth, &props, &data, &hp)?;
        let body = truth.shape();
        let (interior, exterior, extrapolation) = evalsuite::generalization_metric(
            &truth,
            &model,
            props.radius,
            body,
            config.metrics.seed,
        )?;
        let limit_points = crate::geometry::sample_shell(
            99.0 * props.radius,
            100.0 * props.radius,
            500,
            config.metrics.seed + 9,
        );
        let limit = evalsuite::percent_error(&truth, &model, &limit_points)?;
        rows.push(ModsRow {
            stage: stage.to_string(),
            interior_pct: interior.mean_pct,
            exterior_pct: exterior.mean_pct,
            extrapolation_pct: extrapolation.mean_pct,
            limit_pct: limit.mean_pct,
        });
    }
    let mut csv = String::from("stage,interior_pct,exterior_pct,extrapolation_pct,limit_pct\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6}\n",
            r.stage, r.interior_pct, r.exterior_pct, r.extrapolation_pct, r.limit_pct
        ));
    }
    std::fs::write(out.join("mods_study.csv"), csv)?;
    Ok(rows)
}

/// Trains one ladder stage on shared data.
pub fn train_stage(
    config: &ExperimentConfig,
    stage: &str,
    _truth: &TruthField,
    props: &crate::geometry::BodyProperties,
    data: &Dataset,
    hp: &crate::training::Hyperparams,
) -> Result<PinnModel, CliError> {
    let (variant, fusion_on, loss_kind) = stage_setup(stage);
    let mut hp = hp.clone();
    hp.loss_kind = loss_kind;
    let lf = pinn::LfModel::PointMass { mu: props.mu };
    let constants = pinn::compute_constants(
        &data.positions,
        data.potentials.as_deref(),
        props.mu,
        props.radius,
        fusion_on.then_some(&lf),
    )?;
    let arch = crate::network::Architecture::new(
        config.model.depth.unwrap_or(4),
        config.model.width.unwrap_or(16),
        variant.feature_dim(),
        config.model.seed.unwrap_or(hp.seed),
    );
    let params = crate::network::MlpParams::init(arch);
    let boundary = pinn::BoundaryConfig::new(
        config.model.r_ref.unwrap_or(config.dataset.r_max_radii.max(1.0)),
        config.model.k.unwrap_or(2.0),
    );
    let fusion = if fusion_on {
        pinn::FusionConfig::small_body(props.eccentricity, lf)
    } else {
        pinn::FusionConfig::disabled(lf)
    };
    let model = PinnModel::new(params, constants, boundary, fusion, variant)?;
    let outcome = training::train(model, data, &hp)?;
    Ok(outcome.model)
}
