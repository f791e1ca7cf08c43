//! Finite executable models and the enumeration interface used by the
//! brute-force checks.

pub mod broken;
pub mod fincat;
pub mod nerve;
pub mod sample;
pub mod tower;

use serde_json::Value;
use thiserror::Error;

use crate::cube::{CubeError, CubeSystem};
use crate::shell::Shell;

pub use fincat::{CatError, FinCat, Mor, Obj};
pub use nerve::{Nerve, NerveCube};
pub use broken::Broken;
pub use tower::{shell_tower, Tower};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("enumeration at dimension {dim} exceeds the configured cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("invalid cube: {0}")]
    InvalidCube(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// A model whose cubes can be listed exhaustively in each dimension.
pub trait FiniteModel: CubeSystem {
    /// All cubes of dimension `n`, duplicate-free, in a deterministic order.
    fn enumerate(&self, n: usize) -> Result<Vec<Self::Cube>, ModelError>;

    /// All cubes whose boundary is `shell`.
    fn fillers(&self, shell: &Shell<Self::Cube>) -> Vec<Self::Cube>;

    fn encode(&self, x: &Self::Cube) -> Value;

    fn decode(&self, value: &Value) -> Result<Self::Cube, ModelError>;

    /// Short human-readable description of a cube.
    fn label(&self, x: &Self::Cube) -> String;
}

impl<M: FiniteModel + ?Sized> FiniteModel for &M {
    fn enumerate(&self, n: usize) -> Result<Vec<Self::Cube>, ModelError> {
        (**self).enumerate(n)
    }
    fn fillers(&self, shell: &Shell<Self::Cube>) -> Vec<Self::Cube> {
        (**self).fillers(shell)
    }
    fn encode(&self, x: &Self::Cube) -> Value {
        (**self).encode(x)
    }
    fn decode(&self, value: &Value) -> Result<Self::Cube, ModelError> {
        (**self).decode(value)
    }
    fn label(&self, x: &Self::Cube) -> String {
        (**self).label(x)
    }
}
