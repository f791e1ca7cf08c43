//! The abstract signature of a cubical category with connections.
//!
//! A model provides sets of cubes graded by dimension together with face
//! maps, degeneracies, connections and partial compositions. Directions are
//! 1-based throughout: an `n`-cube has faces in directions `1..=n`, and
//! composes in the same directions.

use std::fmt::{self, Debug};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Orientation of a face or connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "−", alias = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    /// Coordinate value selected by a face of this sign.
    pub fn bit(self) -> usize {
        match self {
            Sign::Minus => 0,
            Sign::Plus => 1,
        }
    }

    /// The minus sign rendered as U+2212, matching the expression format.
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Minus => "−",
            Sign::Plus => "+",
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" => Some(Sign::Plus),
            "-" | "−" => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("{op}: direction {index} out of range for a {dim}-cube (allowed 1..={max})")]
    IndexOutOfRange {
        op: &'static str,
        index: usize,
        dim: usize,
        max: usize,
    },
    #[error("{op}: a 0-cube has no faces or connections")]
    DimensionZero { op: &'static str },
    #[error("{op}: result of dimension {dim} exceeds the model's maximum dimension {max}")]
    DimensionTooLarge {
        op: &'static str,
        dim: usize,
        max: usize,
    },
    #[error("cubes of dimensions {left} and {right} cannot be composed")]
    DimensionMismatch { left: usize, right: usize },
    #[error("not composable in direction {dir}: upper face {upper} differs from lower face {lower}")]
    NotComposable {
        dir: usize,
        upper: String,
        lower: String,
    },
    #[error("invalid cube: {0}")]
    Invalid(String),
}

pub type CubeResult<T> = Result<T, CubeError>;

/// Operations every model of a cubical category with connections provides.
///
/// All operations are pure; implementations must be shareable across threads
/// for concurrent read-only use.
pub trait CubeSystem: Sync {
    type Cube: Clone + Eq + Hash + Debug + Send + Sync;

    /// Highest dimension in which the model has cubes.
    fn max_dim(&self) -> usize;

    fn dim(&self, x: &Self::Cube) -> usize;

    /// `∂ᵅᵢ x`, defined for `1 ≤ i ≤ dim x`.
    fn face(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube>;

    /// `εᵢ x`, defined for `1 ≤ i ≤ dim x + 1`.
    fn degeneracy(&self, x: &Self::Cube, i: usize) -> CubeResult<Self::Cube>;

    /// `Γᵅᵢ x`, defined for `1 ≤ i ≤ dim x`.
    fn connection(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube>;

    /// `x ∘ᵢ y`, defined when `∂⁺ᵢ x = ∂⁻ᵢ y`.
    fn compose(&self, x: &Self::Cube, y: &Self::Cube, i: usize) -> CubeResult<Self::Cube>;
}

impl<M: CubeSystem + ?Sized> CubeSystem for &M {
    type Cube = M::Cube;

    fn max_dim(&self) -> usize {
        (**self).max_dim()
    }
    fn dim(&self, x: &Self::Cube) -> usize {
        (**self).dim(x)
    }
    fn face(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube> {
        (**self).face(x, i, sign)
    }
    fn degeneracy(&self, x: &Self::Cube, i: usize) -> CubeResult<Self::Cube> {
        (**self).degeneracy(x, i)
    }
    fn connection(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube> {
        (**self).connection(x, i, sign)
    }
    fn compose(&self, x: &Self::Cube, y: &Self::Cube, i: usize) -> CubeResult<Self::Cube> {
        (**self).compose(x, y, i)
    }
}

/// Shared precondition checks for implementations.
pub mod check {
    use super::{CubeError, CubeResult};

    pub fn face(dim: usize, i: usize) -> CubeResult<()> {
        if dim == 0 {
            return Err(CubeError::DimensionZero { op: "face" });
        }
        range("face", i, dim, dim)
    }

    pub fn degeneracy(dim: usize, i: usize, max_dim: usize) -> CubeResult<()> {
        range("degeneracy", i, dim, dim + 1)?;
        target("degeneracy", dim + 1, max_dim)
    }

    pub fn connection(dim: usize, i: usize, max_dim: usize) -> CubeResult<()> {
        if dim == 0 {
            return Err(CubeError::DimensionZero { op: "connection" });
        }
        range("connection", i, dim, dim)?;
        target("connection", dim + 1, max_dim)
    }

    pub fn compose(left: usize, right: usize, i: usize) -> CubeResult<()> {
        if left != right {
            return Err(CubeError::DimensionMismatch { left, right });
        }
        if left == 0 {
            return Err(CubeError::DimensionZero { op: "compose" });
        }
        range("compose", i, left, left)
    }

    fn range(op: &'static str, index: usize, dim: usize, max: usize) -> CubeResult<()> {
        if index == 0 || index > max {
            Err(CubeError::IndexOutOfRange {
                op,
                index,
                dim,
                max,
            })
        } else {
            Ok(())
        }
    }

    fn target(op: &'static str, dim: usize, max: usize) -> CubeResult<()> {
        if dim > max {
            Err(CubeError::DimensionTooLarge { op, dim, max })
        } else {
            Ok(())
        }
    }
}

/// `true` when `e = ε₁ ∂⁻₁ e`, i.e. `e` lies in the image of `ε₁`.
pub fn is_eps1<M: CubeSystem>(m: &M, e: &M::Cube) -> CubeResult<bool> {
    is_degenerate(m, e, 1)
}

/// `true` when `e = εⱼ ∂⁻ⱼ e`.
pub fn is_degenerate<M: CubeSystem>(m: &M, e: &M::Cube, j: usize) -> CubeResult<bool> {
    if m.dim(e) == 0 || j > m.dim(e) {
        return Ok(false);
    }
    let base = m.face(e, j, Sign::Minus)?;
    Ok(m.degeneracy(&base, j)? == *e)
}

/// Checks `∂⁺ᵢ x = ∂⁻ᵢ y`, producing the error implementations report.
pub fn require_composable<M: CubeSystem>(
    m: &M,
    x: &M::Cube,
    y: &M::Cube,
    i: usize,
) -> CubeResult<()> {
    check::compose(m.dim(x), m.dim(y), i)?;
    let upper = m.face(x, i, Sign::Plus)?;
    let lower = m.face(y, i, Sign::Minus)?;
    if upper == lower {
        Ok(())
    } else {
        Err(CubeError::NotComposable {
            dir: i,
            upper: format!("{upper:?}"),
            lower: format!("{lower:?}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_flip_and_parse() {
        assert_ne!(Sign::Minus, Sign::Plus);
        assert_eq!(Sign::Minus.flip(), Sign::Plus);
        assert_eq!(Sign::parse("−"), Some(Sign::Minus));
        assert_eq!(Sign::parse("-"), Some(Sign::Minus));
        assert_eq!(Sign::parse("+"), Some(Sign::Plus));
        assert_eq!(Sign::parse("x"), None);
    }

    #[test]
    fn index_checks() {
        assert!(check::face(0, 1).is_err());
        assert!(check::face(2, 3).is_err());
        assert!(check::face(2, 0).is_err());
        assert!(check::degeneracy(2, 3, 4).is_ok());
        assert!(matches!(
            check::degeneracy(4, 1, 4),
            Err(CubeError::DimensionTooLarge { .. })
        ));
        assert!(matches!(
            check::connection(0, 1, 4),
            Err(CubeError::DimensionZero { .. })
        ));
        assert!(check::compose(2, 3, 1).is_err());
    }
}
