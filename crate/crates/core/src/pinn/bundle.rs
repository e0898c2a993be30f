//! On-disk model bundle: a directory holding the architecture and pipeline
//! configuration as JSON plus the raw little-endian parameter array, so a
//! round trip is bit-exact.

use super::{BoundaryConfig, FusionConfig, NonDimConstants, PinnError, PinnModel, PinnVariant};
use crate::network::{Architecture, MlpParams};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("parameter file holds {got} values, architecture wants {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error(transparent)]
    Pinn(#[from] PinnError),
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Meta {
    arch: Architecture,
    constants: NonDimConstants,
    boundary: BoundaryConfig,
    fusion: FusionConfig,
    variant: PinnVariant,
}

/// Writes `meta.json` and `params.f64` under `dir` (created if missing).
pub fn save(model: &PinnModel, dir: &Path) -> Result<(), BundleError> {
    std::fs::create_dir_all(dir)?;
    let meta = Meta {
        arch: *model.params.arch(),
        constants: model.constants,
        boundary: model.boundary,
        fusion: model.fusion.clone(),
        variant: model.variant,
    };
    std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    let mut file = std::fs::File::create(dir.join("params.f64"))?;
    let mut bytes = Vec::with_capacity(model.params.len() * 8);
    for v in model.params.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    file.write_all(&bytes)?;
    Ok(())
}

pub fn load(dir: &Path) -> Result<PinnModel, BundleError> {
    let meta: Meta = serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json"))?)?;
    let mut bytes = Vec::new();
    std::fs::File::open(dir.join("params.f64"))?.read_to_end(&mut bytes)?;
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if values.len() != meta.arch.param_count() {
        return Err(BundleError::LengthMismatch {
            got: values.len(),
            want: meta.arch.param_count(),
        });
    }
    // the constructor re-seeds the blend scalars from the config; restore the
    // trained values from the parameter tail afterwards
    let (tail_k, tail_r) = (values[values.len() - 2], values[values.len() - 1]);
    let params = MlpParams::from_values(meta.arch, values)
        .map_err(|e| BundleError::Pinn(PinnError::Network(e)))?;
    let mut model =
        PinnModel::new(params, meta.constants, meta.boundary, meta.fusion, meta.variant)?;
    model.params.set_blend(tail_k, tail_r);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinn::{LfModel, PinnVariant};

    #[test]
    fn save_load_round_trips_bit_exactly() {
        let arch = Architecture::new(2, 8, 5, 3);
        let params = MlpParams::init(arch);
        let mut model = PinnModel::new(
            params,
            NonDimConstants::new(16_000.0, 28.0),
            BoundaryConfig::new(10.0, 2.0),
            FusionConfig::small_body(0.85, LfModel::PointMass { mu: 4.46e5 }),
            PinnVariant::full(),
        )
        .unwrap();
        // emulate training having moved the blend scalars
        model.params.set_blend(1.7, 9.3);

        let dir = tempfile::tempdir().unwrap();
        save(&model, dir.path()).unwrap();
        let back = load(dir.path()).unwrap();

        assert_eq!(back.params.values(), model.params.values());
        assert_eq!(back.constants, model.constants);
        assert_eq!(back.fusion, model.fusion);
        assert_eq!(back.variant, model.variant);
        assert_eq!(back.blend(), (1.7, 9.3));
    }
}
