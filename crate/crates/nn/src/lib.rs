//! A small tape-based autograd engine and the two classifier families built
//! on it: a patch-embedding transformer and a bottleneck-residual CNN.
//!
//! Tensors live on a per-run [`tape::Tape`]; parameters live in a
//! [`params::ParamStore`] shared across runs. Backward passes accumulate
//! gradients only for tensors that need them, so frozen parameters cost
//! nothing and read back exactly zero gradient.

pub mod model;
pub mod optim;
pub mod params;
pub mod resnet;
pub mod tape;
pub mod toy;
pub mod vit;

pub use model::{Classifier, InputGradModel};
pub use optim::{Optimizer, OptimizerKind};
pub use params::{ParamId, ParamStore};
pub use tape::{Tape, Tensor};

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NnError>;

/// Model families and variants supported by the classifier builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    VitDeit,
    ResnetCnn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Tiny,
    Small,
    Base,
    R50,
}

/// Architecture description: family, variant, and the dropout probability
/// applied ahead of the 4-way classification head.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ArchSpec {
    pub family: Family,
    pub variant: Variant,
    pub dropout_p: f32,
}

pub const NUM_CLASSES: usize = 4;
pub const INPUT_SIDE: usize = 224;
pub const PATCH_SIZE: usize = 16;
/// 1 class token + (224/16)^2 patch tokens.
pub const TOKEN_COUNT: usize = 1 + (INPUT_SIDE / PATCH_SIZE) * (INPUT_SIDE / PATCH_SIZE);
