//! Dataset construction: labeled manifests, deterministic splits, and the
//! preprocessing applied before training and evaluation.

pub mod fixture;
pub mod manifest;
pub mod preprocess;

pub use fixture::{synthetic_image, synthetic_image_set};
pub use manifest::{
    build_manifest, read_manifest, split_manifest, write_manifest, AcquisitionLogEntry,
    ManifestEntry, Split, SplitSpec,
};
pub use preprocess::{
    bilinear_resize, denormalize, normalize, preprocess_eval, preprocess_train,
    preprocess_train_at, to_unit_array, NormalizationSpec, CROP_SIZE, MAX_CROP_OFFSET,
};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DatasetError>;
