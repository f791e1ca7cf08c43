//! Elementary foldings `ψᵢ`, the partial folding `Ψ = ψ₁ψ₂…ψₙ₋₁`, the
//! boundary embodiments `N` and `P`, and thinness.

use thiserror::Error;

use crate::cube::{check, is_eps1, CubeError, CubeResult, CubeSystem, Sign};
use crate::shell::{boundary, Shell, ShellError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("boundaries differ at face ({i},{sign})")]
    BoundaryMismatch { i: usize, sign: Sign },
    #[error(transparent)]
    Shell(#[from] ShellError),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// `Ψx` with `Nx = ∂⁻₁Ψx`, `Px = ∂⁺₁Ψx` and the intermediate values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldResult<C> {
    pub folded: C,
    pub n_face: C,
    pub p_face: C,
    /// `(i, ψᵢ…ψₙ₋₁x)` in the order the foldings are applied.
    pub trace: Vec<(usize, C)>,
}

fn check_psi(dim: usize, i: usize) -> CubeResult<()> {
    if dim < 2 || i == 0 || i >= dim {
        Err(CubeError::IndexOutOfRange {
            op: "psi",
            index: i,
            dim,
            max: dim.saturating_sub(1),
        })
    } else {
        Ok(())
    }
}

/// `ψᵢx = Γ⁺ᵢ∂⁻ᵢ₊₁x ∘ᵢ₊₁ x ∘ᵢ₊₁ Γ⁻ᵢ∂⁺ᵢ₊₁x`.
pub fn psi<M: CubeSystem>(m: &M, x: &M::Cube, i: usize) -> CubeResult<M::Cube> {
    check_psi(m.dim(x), i)?;
    let left = m.connection(&m.face(x, i + 1, Sign::Minus)?, i, Sign::Plus)?;
    let right = m.connection(&m.face(x, i + 1, Sign::Plus)?, i, Sign::Minus)?;
    m.compose(&m.compose(&left, x, i + 1)?, &right, i + 1)
}

/// `ψ₁ψ₂…ψⱼx`, applying `ψⱼ` first.
pub fn psi_prefix<M: CubeSystem>(m: &M, x: &M::Cube, j: usize) -> CubeResult<M::Cube> {
    let mut y = x.clone();
    for i in (1..=j).rev() {
        y = psi(m, &y, i)?;
    }
    Ok(y)
}

/// `Ψx` with its faces and trace. For a 1-cube `Ψ` is the identity.
pub fn big_psi<M: CubeSystem>(m: &M, x: &M::Cube) -> CubeResult<FoldResult<M::Cube>> {
    let n = m.dim(x);
    check::face(n, 1)?;
    let mut folded = x.clone();
    let mut trace = Vec::with_capacity(n - 1);
    for i in (1..n).rev() {
        folded = psi(m, &folded, i)?;
        trace.push((i, folded.clone()));
    }
    Ok(FoldResult {
        n_face: m.face(&folded, 1, Sign::Minus)?,
        p_face: m.face(&folded, 1, Sign::Plus)?,
        folded,
        trace,
    })
}

/// `Ψx` alone.
pub fn fold<M: CubeSystem>(m: &M, x: &M::Cube) -> CubeResult<M::Cube> {
    psi_prefix(m, x, m.dim(x).saturating_sub(1))
}

/// `Ψx ∈ ε₁Cₙ₋₁`.
pub fn is_thin<M: CubeSystem>(m: &M, x: &M::Cube) -> CubeResult<bool> {
    check::face(m.dim(x), 1)?;
    is_eps1(m, &fold(m, x)?)
}

/// `ψ₁…ψⱼx ∈ ε₁Cₙ₋₁`, for `0 ≤ j ≤ n − 1`.
pub fn is_j_thin<M: CubeSystem>(m: &M, x: &M::Cube, j: usize) -> CubeResult<bool> {
    let n = m.dim(x);
    check::face(n, 1)?;
    if j >= n {
        return Err(CubeError::IndexOutOfRange {
            op: "j-thin",
            index: j,
            dim: n,
            max: n - 1,
        });
    }
    is_eps1(m, &psi_prefix(m, x, j)?)
}

/// The boundary of `Ψx` recovered from `Nx` and `Px`: faces `(1,−) = N`,
/// `(1,+) = P` and `(i,α) = ε₁∂ᵅᵢ₋₁N` for `i ≥ 2`.
pub fn reconstruct_folded_shell<M: CubeSystem>(
    m: &M,
    n_face: &M::Cube,
    p_face: &M::Cube,
) -> Result<Shell<M::Cube>, FoldError> {
    let d = m.dim(n_face);
    if m.dim(p_face) != d {
        return Err(CubeError::DimensionMismatch {
            left: d,
            right: m.dim(p_face),
        }
        .into());
    }
    if d > 0 {
        let (bn, bp) = (boundary(m, n_face)?, boundary(m, p_face)?);
        let mismatch = bn.iter().find(|&(i, sign, c)| c != bp.face(i, sign)).map(|(i, sign, _)| (i, sign));
        if let Some((i, sign)) = mismatch {
            return Err(FoldError::BoundaryMismatch { i, sign });
        }
    }
    Ok(Shell::from_fn(m, d + 1, |i, sign| match (i, sign) {
        (1, Sign::Minus) => Ok(n_face.clone()),
        (1, Sign::Plus) => Ok(p_face.clone()),
        _ => m.degeneracy(&m.face(n_face, i - 1, sign)?, 1),
    })?)
}
