//! Reconstructing cubes from their folds: the unfolding step, fillers of
//! shells with a prescribed fold, thin fillers of commutative shells, and
//! decompositions of thin elements into degeneracies and connections.

use thiserror::Error;

use crate::array::{compose_partition, resolve_symbols, ArrayError, ComposableArray, ComposablePartition, Rect, SymbolicCell};
use crate::cube::{CubeError, CubeSystem, Sign};
use crate::expr::GeneratorExpression;
use crate::folding::{big_psi, fold, is_thin, psi, FoldError};
use crate::laws::Law;
use crate::models::ModelError;
use crate::shell::{boundary, is_commutative, shell_big_fold, shell_fold, Shell, ShellError, ShellSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillerError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error("shell is not commutative")]
    NotCommutative,
    #[error("element is not thin")]
    NotThin,
    #[error("model fails {law}: {detail}")]
    AxiomFailure { law: Law, detail: String },
    #[error("thin structure is not a morphism: {0}")]
    MorphismViolation(String),
    #[error(transparent)]
    Array(#[from] ArrayError),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Shell(#[from] ShellError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// First face `(i, α)` where two shells of equal dimension differ.
pub fn first_difference<C: PartialEq>(s: &Shell<C>, t: &Shell<C>) -> Option<(usize, Sign)> {
    if s.dim() != t.dim() {
        return Some((0, Sign::Minus));
    }
    s.iter().find(|&(i, sign, c)| c != t.face(i, sign)).map(|(i, sign, _)| (i, sign))
}

fn require_boundary<M: CubeSystem>(m: &M, a: &M::Cube, s: &Shell<M::Cube>, what: &str) -> Result<(), FillerError> {
    if m.dim(a) != s.dim() {
        return Err(FillerError::PreconditionFailed(format!(
            "a has dimension {}, {what} has dimension {}",
            m.dim(a),
            s.dim()
        )));
    }
    match first_difference(&boundary(m, a)?, s) {
        Some((i, sign)) => Err(FillerError::PreconditionFailed(format!(
            "∂a and {what} differ at face ({i},{sign})"
        ))),
        None => Ok(()),
    }
}

fn check_unfold_index(n: usize, j: usize) -> Result<(), FillerError> {
    if n < 2 || j == 0 || j >= n {
        return Err(CubeError::IndexOutOfRange {
            op: "unfold",
            index: j,
            dim: n,
            max: n.saturating_sub(1),
        }
        .into());
    }
    Ok(())
}

/// The partition whose rows-first composite is the unique `x` with
/// `∂x = s` and `ψⱼx = a`: rows `[εⱼs⁻ⱼ, Γ⁺ⱼs⁺ⱼ₊₁]`, `[a]` and
/// `[Γ⁻ⱼs⁻ⱼ₊₁, εⱼs⁺ⱼ]`, with `j` vertical and `j + 1` horizontal.
pub fn unfold_partition<M: CubeSystem>(
    m: &M,
    a: &M::Cube,
    s: &Shell<M::Cube>,
    j: usize,
) -> Result<ComposablePartition<M::Cube>, FillerError> {
    check_unfold_index(s.dim(), j)?;
    require_boundary(m, a, &shell_fold(m, s, j)?, &format!("ψ{j}s"))?;
    let cells = vec![
        (Rect::unit(0, 0), m.degeneracy(s.face(j, Sign::Minus), j)?),
        (Rect::unit(0, 1), m.connection(s.face(j + 1, Sign::Plus), j, Sign::Plus)?),
        (Rect::new(1, 0, 1, 2), a.clone()),
        (Rect::unit(2, 0), m.connection(s.face(j + 1, Sign::Minus), j, Sign::Minus)?),
        (Rect::unit(2, 1), m.degeneracy(s.face(j, Sign::Plus), j)?),
    ];
    Ok(ComposablePartition::rows_first(cells, j + 1, j)?)
}

/// The unique `x` with `∂x = s` and `ψⱼx = a`. Requires `∂a = ψⱼs`.
pub fn unfold_step<M: CubeSystem>(m: &M, a: &M::Cube, s: &Shell<M::Cube>, j: usize) -> Result<M::Cube, FillerError> {
    let x = compose_partition(m, &unfold_partition(m, a, s, j)?)?;
    if let Some((i, sign)) = first_difference(&boundary(m, &x)?, s) {
        return Err(FillerError::PostconditionFailed(format!("∂x differs from s at face ({i},{sign})")));
    }
    if psi(m, &x, j)? != *a {
        return Err(FillerError::PostconditionFailed(format!("ψ{j}x ≠ a")));
    }
    Ok(x)
}

/// The unique `x` with `∂x = s` and `Ψx = a`. Requires `∂a = Ψs`.
///
/// The shells `sₖ = ψₖ₊₁…ψₙ₋₁s` are computed from the top down; then
/// `x₀ = a` is unfolded by `xₖ = unfold_step(xₖ₋₁, sₖ, k)` for `k = 1..n−1`.
pub fn filler_from_fold<M: CubeSystem>(m: &M, a: &M::Cube, s: &Shell<M::Cube>) -> Result<M::Cube, FillerError> {
    let n = s.dim();
    // shells[t] = s_{n-1-t}
    let mut shells = vec![s.clone()];
    for k in (1..n).rev() {
        let next = shell_fold(m, shells.last().expect("nonempty"), k)?;
        shells.push(next);
    }
    require_boundary(m, a, shells.last().expect("nonempty"), "Ψs")?;
    let mut x = a.clone();
    for k in 1..n {
        x = unfold_step(m, &x, &shells[n - 1 - k], k)?;
    }
    if let Some((i, sign)) = first_difference(&boundary(m, &x)?, s) {
        return Err(FillerError::PostconditionFailed(format!("∂x differs from s at face ({i},{sign})")));
    }
    if fold(m, &x)? != *a {
        return Err(FillerError::PostconditionFailed("Ψx ≠ a".to_string()));
    }
    Ok(x)
}

/// The unique thin `x` with `∂x = s`, for commutative `s`.
pub fn thin_filler<M: CubeSystem>(m: &M, s: &Shell<M::Cube>) -> Result<M::Cube, FillerError> {
    let folded = shell_big_fold(m, s)?;
    if folded.n_face != folded.p_face {
        return Err(FillerError::NotCommutative);
    }
    let a = m.degeneracy(&folded.n_face, 1)?;
    let x = filler_from_fold(m, &a, s)?;
    if !is_thin(m, &x)? {
        return Err(FillerError::PostconditionFailed("filler is not thin".to_string()));
    }
    Ok(x)
}

/// The unfolding partition as a term around `inner`, which stands for `ψⱼx`.
fn unfold_expression<C: Clone>(inner: GeneratorExpression<C>, s: &Shell<C>, j: usize) -> GeneratorExpression<C> {
    type E<C> = GeneratorExpression<C>;
    let top = E::compose(
        j + 1,
        E::eps(j, s.face(j, Sign::Minus).clone()),
        E::gamma(j, Sign::Plus, s.face(j + 1, Sign::Plus).clone()),
    );
    let bottom = E::compose(
        j + 1,
        E::gamma(j, Sign::Minus, s.face(j + 1, Sign::Minus).clone()),
        E::eps(j, s.face(j, Sign::Plus).clone()),
    );
    E::compose(j, E::compose(j, top, inner), bottom)
}

/// Writes a thin `x` as a composite of `εᵢa` and `Γᵅᵢa`. With
/// `yₙ₋₁ = x` and `yₖ₋₁ = ψₖyₖ`, the core is `Ψx = ε₁z` and each `yₖ` is
/// the unfolding partition around `yₖ₋₁` and `∂yₖ`.
pub fn thin_decompose<M: CubeSystem>(m: &M, x: &M::Cube) -> Result<GeneratorExpression<M::Cube>, FillerError> {
    if !is_thin(m, x)? {
        return Err(FillerError::NotThin);
    }
    let n = m.dim(x);
    let folded = big_psi(m, x)?;
    let mut expr = GeneratorExpression::eps(1, folded.n_face.clone());
    for k in 1..n {
        // trace holds (i, ψᵢyᵢ) for i = n−1 down to 1, so yₖ is the entry for k + 1.
        let yk = if k == n - 1 {
            x.clone()
        } else {
            folded.trace[n - 2 - k].1.clone()
        };
        expr = unfold_expression(expr, &boundary(m, &yk)?, k);
    }
    if expr.eval(m)? != *x {
        return Err(FillerError::PostconditionFailed("decomposition does not evaluate to x".to_string()));
    }
    Ok(expr)
}

/// Writes a commutative shell as a composite of the shells `𝛆ᵢa` and `𝚪ᵅᵢa`.
pub fn shell_decompose<M: CubeSystem>(m: &M, s: &Shell<M::Cube>) -> Result<GeneratorExpression<M::Cube>, FillerError> {
    let n = s.dim();
    if n == 0 {
        return Err(CubeError::DimensionZero { op: "shell decompose" }.into());
    }
    if !is_commutative(m, s)? {
        return Err(FillerError::NotCommutative);
    }
    let sys = ShellSystem::over(m, n - 1, 1);
    let x = sys.lift_shell(s);
    let expr = thin_decompose(&sys, &x)?;
    expr.try_map(&mut |c| {
        c.as_base()
            .cloned()
            .ok_or_else(|| FillerError::PostconditionFailed("leaf is not a base cube".to_string()))
    })
}

/// Evaluates a term over `(n − 1)`-cubes in the shell model, giving an `n`-shell.
pub fn eval_in_shells<M: CubeSystem>(m: &M, expr: &GeneratorExpression<M::Cube>) -> Result<Shell<M::Cube>, FillerError> {
    let leaf_dim = first_leaf(expr).map(|c| m.dim(c)).unwrap_or(0);
    let sys = ShellSystem::over(m, leaf_dim, 1);
    let lifted = expr.try_map(&mut |c| Ok::<_, FillerError>(crate::shell::Cell::Base(c.clone())))?;
    let x = lifted.eval(&sys)?;
    sys.lower_shell(&x)
        .ok_or_else(|| FillerError::PostconditionFailed("expression does not denote a shell".to_string()))
}

fn first_leaf<C>(e: &GeneratorExpression<C>) -> Option<&C> {
    match e {
        GeneratorExpression::Eps { cube, .. } | GeneratorExpression::Gamma { cube, .. } => Some(cube),
        GeneratorExpression::Base(c) => Some(c),
        GeneratorExpression::Compose { left, .. } => first_leaf(left),
    }
}

/// `[Γ⁺, x, Γ⁻]` in direction `j + 1`; its composite is `ψⱼx`.
pub fn psi_row_grid<C: Clone>(x: &C) -> Vec<Vec<SymbolicCell<C>>> {
    vec![vec![SymbolicCell::GammaPlus, SymbolicCell::Plain(x.clone()), SymbolicCell::GammaMinus]]
}

/// The 3×3 array around `x` whose middle row is the `ψⱼ` row and whose
/// composite is `x`.
pub fn array_a_grid<C: Clone>(x: &C) -> Vec<Vec<SymbolicCell<C>>> {
    use SymbolicCell::*;
    vec![
        vec![DoubleIdentity, EpsV, GammaPlus],
        vec![GammaPlus, Plain(x.clone()), GammaMinus],
        vec![GammaMinus, EpsV, DoubleIdentity],
    ]
}

pub fn psi_row<M: CubeSystem>(m: &M, x: &M::Cube, j: usize) -> Result<ComposableArray<M::Cube>, FillerError> {
    check_unfold_index(m.dim(x), j)?;
    Ok(resolve_symbols(m, &psi_row_grid(x), j + 1, j, &[])?)
}

pub fn array_a<M: CubeSystem>(m: &M, x: &M::Cube, j: usize) -> Result<ComposableArray<M::Cube>, FillerError> {
    check_unfold_index(m.dim(x), j)?;
    Ok(resolve_symbols(m, &array_a_grid(x), j + 1, j, &[])?)
}

/// `ψⱼ` of the unfolding partition, drawn as a 3×4 partition:
/// `[□, εⱼs⁻ⱼ, Γ⁺ⱼs⁺ⱼ₊₁, Γ⁻ⱼs⁺ⱼ₊₁]`, `[□, a, □]` with `a` spanning two
/// columns, and `[Γ⁺ⱼs⁻ⱼ₊₁, Γ⁻ⱼs⁻ⱼ₊₁, εⱼs⁺ⱼ, □]`. Its composite is `a`.
pub fn psi_refinement<M: CubeSystem>(
    m: &M,
    a: &M::Cube,
    s: &Shell<M::Cube>,
    j: usize,
) -> Result<ComposablePartition<M::Cube>, FillerError> {
    check_unfold_index(s.dim(), j)?;
    require_boundary(m, a, &shell_fold(m, s, j)?, &format!("ψ{j}s"))?;
    let h = j + 1;
    let square = |c: &M::Cube, sign: Sign| -> Result<M::Cube, CubeError> { m.degeneracy(&m.face(c, h, sign)?, h) };
    let top_eps = m.degeneracy(s.face(j, Sign::Minus), j)?;
    let bottom_eps = m.degeneracy(s.face(j, Sign::Plus), j)?;
    let cells = vec![
        (Rect::unit(0, 0), square(&top_eps, Sign::Minus)?),
        (Rect::unit(0, 1), top_eps),
        (Rect::unit(0, 2), m.connection(s.face(h, Sign::Plus), j, Sign::Plus)?),
        (Rect::unit(0, 3), m.connection(s.face(h, Sign::Plus), j, Sign::Minus)?),
        (Rect::unit(1, 0), square(a, Sign::Minus)?),
        (Rect::new(1, 1, 1, 2), a.clone()),
        (Rect::unit(1, 3), square(a, Sign::Plus)?),
        (Rect::unit(2, 0), m.connection(s.face(h, Sign::Minus), j, Sign::Plus)?),
        (Rect::unit(2, 1), m.connection(s.face(h, Sign::Minus), j, Sign::Minus)?),
        (Rect::unit(2, 2), bottom_eps.clone()),
        (Rect::unit(2, 3), square(&bottom_eps, Sign::Plus)?),
    ];
    Ok(ComposablePartition::rows_first(cells, h, j)?)
}
