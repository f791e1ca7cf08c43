//! The registry of defining identities of a cubical ω-category with
//! connections, as checkable equations over instances drawn from a model.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cube::{CubeResult, CubeSystem, Sign};
use crate::models::sample::Catalog;
use crate::models::FiniteModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("unknown law {0:?}")]
    UnknownLaw(String),
    #[error("malformed sample for {law}: {reason}")]
    MalformedSample { law: &'static str, reason: String },
}

/// How the cubes of an instance fit together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// A single cube `x`.
    One,
    /// `x, y` with `x ∘ᵢ y` defined.
    Pair,
    /// `x, y, z` with `x ∘ᵢ y` and `y ∘ᵢ z` defined.
    Triple,
    /// `x, y, z, w` forming a grid with `i < j`: `x ∘ᵢ y`, `z ∘ᵢ w`,
    /// `x ∘ⱼ z` and `y ∘ⱼ w` defined.
    Grid,
}

impl Shape {
    fn arity(self) -> usize {
        match self {
            Shape::One => 1,
            Shape::Pair => 2,
            Shape::Triple => 3,
            Shape::Grid => 4,
        }
    }

    fn dir_count(self) -> usize {
        match self {
            Shape::One => 0,
            Shape::Pair | Shape::Triple => 1,
            Shape::Grid => 2,
        }
    }
}

/// The cubes a law is evaluated on, with the composition directions the
/// shape needs. Index parameters not fixed by the shape are quantified
/// inside the law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<C> {
    pub dirs: Vec<usize>,
    pub cubes: Vec<C>,
}

/// One side-by-side evaluation that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch<C> {
    pub equation: String,
    pub lhs: Option<C>,
    pub rhs: Option<C>,
    /// Set when a side could not be evaluated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample<C> {
    pub instance: Instance<C>,
    pub mismatch: Mismatch<C>,
}

/// Outcome of checking one law over a sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawReport<C> {
    pub law: Law,
    pub instances: usize,
    pub counterexample: Option<Counterexample<C>>,
}

impl<C> LawReport<C> {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Law {
    FaceFace,
    EpsFace,
    EpsEps,
    EpsUnit,
    CompFace,
    Assoc,
    Interchange,
    EpsComp,
    GammaFace,
    GammaEps,
    GammaGamma,
    GammaComp,
    Transport,
    TransportMinus,
    GammaCancel,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl Law {
    pub const ALL: [Law; 15] = [
        Law::FaceFace,
        Law::EpsFace,
        Law::EpsEps,
        Law::EpsUnit,
        Law::CompFace,
        Law::Assoc,
        Law::Interchange,
        Law::EpsComp,
        Law::GammaFace,
        Law::GammaEps,
        Law::GammaGamma,
        Law::GammaComp,
        Law::Transport,
        Law::TransportMinus,
        Law::GammaCancel,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Law::FaceFace => "FACE-FACE",
            Law::EpsFace => "EPS-FACE",
            Law::EpsEps => "EPS-EPS",
            Law::EpsUnit => "EPS-UNIT",
            Law::CompFace => "COMP-FACE",
            Law::Assoc => "ASSOC",
            Law::Interchange => "INTERCHANGE",
            Law::EpsComp => "EPS-COMP",
            Law::GammaFace => "GAMMA-FACE",
            Law::GammaEps => "GAMMA-EPS",
            Law::GammaGamma => "GAMMA-GAMMA",
            Law::GammaComp => "GAMMA-COMP",
            Law::Transport => "TRANSPORT",
            Law::TransportMinus => "TRANSPORT-MINUS",
            Law::GammaCancel => "GAMMA-CANCEL",
        }
    }

    pub fn from_id(id: &str) -> Result<Law, LawError> {
        Law::ALL
            .into_iter()
            .find(|l| l.id().eq_ignore_ascii_case(id))
            .ok_or_else(|| LawError::UnknownLaw(id.to_string()))
    }

    pub fn statement(self) -> &'static str {
        match self {
            // Shell incidence relations; reading off faces of folds.
            Law::FaceFace => "∂ᵝⱼ∂ᵅᵢ = ∂ᵅᵢ₋₁∂ᵝⱼ for j < i",
            // Faces of degenerate shells and of the unfolding partition.
            Law::EpsFace => "∂ᵅᵢεⱼ = εⱼ₋₁∂ᵅᵢ (i < j), id (i = j), εⱼ∂ᵅᵢ₋₁ (i > j)",
            // Degenerate elements fold to ε₁-images.
            Law::EpsEps => "εᵢεⱼ = εⱼ₊₁εᵢ for i ≤ j",
            // Padding cells in composable arrays.
            Law::EpsUnit => "εᵢ∂⁻ᵢx ∘ᵢ x = x = x ∘ᵢ εᵢ∂⁺ᵢx",
            // Boundary of a composite; shell composition.
            Law::CompFace => "∂⁻ᵢ(x∘ᵢy) = ∂⁻ᵢx, ∂⁺ᵢ(x∘ᵢy) = ∂⁺ᵢy, ∂ᵅⱼ(x∘ᵢy) = ∂ᵅⱼx ∘ᵢ′ ∂ᵅⱼy",
            // Three-fold composites such as the elementary folding.
            Law::Assoc => "(x∘ᵢy)∘ᵢz = x∘ᵢ(y∘ᵢz)",
            // Row-first and column-first evaluation of arrays agree.
            Law::Interchange => "(x∘ᵢy)∘ⱼ(z∘ᵢw) = (x∘ⱼz)∘ᵢ(y∘ⱼw)",
            // Folding a degenerate element.
            Law::EpsComp => "εⱼ(x∘ᵢy) = εⱼx ∘ᵢ₊₁ εⱼy (j ≤ i), εⱼx ∘ᵢ εⱼy (j > i)",
            // Boundaries of connections; fitting connection cells into arrays.
            Law::GammaFace => "∂ᵅᵢΓᵅᵢ = ∂ᵅᵢ₊₁Γᵅᵢ = id, ∂⁻ᵅᵢΓᵅᵢ = ∂⁻ᵅᵢ₊₁Γᵅᵢ = εᵢ∂⁻ᵅᵢ, shifted otherwise",
            // Connections on degenerate cubes inside the folding of connections.
            Law::GammaEps => "Γᵅᵢεⱼ = εⱼ₊₁Γᵅᵢ (i < j), εᵢεᵢ (i = j), εⱼΓᵅᵢ₋₁ (i > j)",
            // Moving a fold past an unrelated connection.
            Law::GammaGamma => "ΓᵅᵢΓᵝⱼ = Γᵝⱼ₊₁Γᵅᵢ (i < j), ΓᵅᵢΓᵅᵢ = Γᵅᵢ₊₁Γᵅᵢ",
            // Folding commutes with composition in other directions.
            Law::GammaComp => "Γᵅᵢ(x∘ⱼy) = Γᵅᵢx ∘ⱼ Γᵅᵢy (j < i), Γᵅᵢx ∘ⱼ₊₁ Γᵅᵢy (j > i)",
            // Connection of a composite as a 2×2 array.
            Law::Transport => "Γ⁺ᵢ(x∘ᵢy) = (Γ⁺ᵢx ∘ᵢ₊₁ εᵢ₊₁x) ∘ᵢ (εᵢx ∘ᵢ₊₁ Γ⁺ᵢy)",
            // Mirror of the transport law for Γ⁻.
            Law::TransportMinus => "Γ⁻ᵢ(x∘ᵢy) = (Γ⁻ᵢx ∘ᵢ₊₁ εᵢy) ∘ᵢ (εᵢ₊₁y ∘ᵢ₊₁ Γ⁻ᵢy)",
            // Folding a connection yields a degenerate cube.
            Law::GammaCancel => "Γ⁺ᵢx ∘ᵢ₊₁ Γ⁻ᵢx = εᵢx, Γ⁺ᵢx ∘ᵢ Γ⁻ᵢx = εᵢ₊₁x",
        }
    }

    pub fn shape(self) -> Shape {
        match self {
            Law::CompFace | Law::EpsComp | Law::GammaComp | Law::Transport | Law::TransportMinus => Shape::Pair,
            Law::Assoc => Shape::Triple,
            Law::Interchange => Shape::Grid,
            _ => Shape::One,
        }
    }

    /// How far above the input dimension an instance reaches.
    pub fn raise(self) -> usize {
        match self {
            Law::FaceFace | Law::EpsUnit | Law::CompFace | Law::Assoc | Law::Interchange => 0,
            Law::EpsEps | Law::GammaEps | Law::GammaGamma => 2,
            _ => 1,
        }
    }

    /// Smallest input dimension with a non-vacuous instance.
    pub fn min_dim(self) -> usize {
        match self {
            Law::EpsFace | Law::EpsEps | Law::GammaEps => 0,
            Law::FaceFace | Law::Interchange | Law::GammaComp => 2,
            _ => 1,
        }
    }

    /// Checks the side conditions of an instance in `m`.
    pub fn validate<M: CubeSystem>(self, m: &M, inst: &Instance<M::Cube>) -> Result<(), LawError> {
        let bad = |reason: String| LawError::MalformedSample { law: self.id(), reason };
        let shape = self.shape();
        if inst.cubes.len() != shape.arity() {
            return Err(bad(format!("expected {} cubes, got {}", shape.arity(), inst.cubes.len())));
        }
        if inst.dirs.len() != shape.dir_count() {
            return Err(bad(format!("expected {} directions, got {}", shape.dir_count(), inst.dirs.len())));
        }
        let n = m.dim(&inst.cubes[0]);
        if inst.cubes.iter().any(|c| m.dim(c) != n) {
            return Err(bad("cubes of different dimensions".to_string()));
        }
        if n < self.min_dim() {
            return Err(bad(format!("needs dimension at least {}", self.min_dim())));
        }
        if n + self.raise() > m.max_dim() {
            return Err(bad(format!("reaches dimension {} above the model's {}", n + self.raise(), m.max_dim())));
        }
        if inst.dirs.iter().any(|&d| d == 0 || d > n) {
            return Err(bad(format!("direction out of range for dimension {n}")));
        }
        let composable = |a: usize, b: usize, d: usize| -> Result<(), LawError> {
            let (x, y) = (&inst.cubes[a], &inst.cubes[b]);
            match (m.face(x, d, Sign::Plus), m.face(y, d, Sign::Minus)) {
                (Ok(u), Ok(l)) if u == l => Ok(()),
                _ => Err(bad(format!("cubes {a} and {b} are not composable in direction {d}"))),
            }
        };
        match shape {
            Shape::One => Ok(()),
            Shape::Pair => composable(0, 1, inst.dirs[0]),
            Shape::Triple => {
                composable(0, 1, inst.dirs[0])?;
                composable(1, 2, inst.dirs[0])
            }
            Shape::Grid => {
                let (i, j) = (inst.dirs[0], inst.dirs[1]);
                if i >= j {
                    return Err(bad("grid directions must satisfy i < j".to_string()));
                }
                composable(0, 1, i)?;
                composable(2, 3, i)?;
                composable(0, 2, j)?;
                composable(1, 3, j)
            }
        }
    }

    /// Evaluates every equation of the law on `inst`, returning the first
    /// failure. The instance must satisfy [`Law::validate`].
    pub fn evaluate<M: CubeSystem>(self, m: &M, inst: &Instance<M::Cube>) -> Option<Mismatch<M::Cube>> {
        let c = &inst.cubes;
        let x = &c[0];
        let n = m.dim(x);
        let mut e = Equations { failure: None };
        match self {
            Law::FaceFace => {
                for i in 2..=n {
                    for j in 1..i {
                        for a in Sign::BOTH {
                            for b in Sign::BOTH {
                                e.check(
                                    || format!("∂{b}{j}∂{a}{i} = ∂{a}{}∂{b}{j}", i - 1),
                                    || m.face(&m.face(x, i, a)?, j, b),
                                    || m.face(&m.face(x, j, b)?, i - 1, a),
                                );
                            }
                        }
                    }
                }
            }
            Law::EpsFace => {
                for j in 1..=n + 1 {
                    for i in 1..=n + 1 {
                        for a in Sign::BOTH {
                            let label = || format!("∂{a}{i}ε{j}");
                            let lhs = || m.face(&m.degeneracy(x, j)?, i, a);
                            match i.cmp(&j) {
                                std::cmp::Ordering::Less => {
                                    e.check(label, lhs, || m.degeneracy(&m.face(x, i, a)?, j - 1))
                                }
                                std::cmp::Ordering::Equal => e.check(label, lhs, || Ok(x.clone())),
                                std::cmp::Ordering::Greater => {
                                    e.check(label, lhs, || m.degeneracy(&m.face(x, i - 1, a)?, j))
                                }
                            }
                        }
                    }
                }
            }
            Law::EpsEps => {
                for j in 1..=n + 1 {
                    for i in 1..=j {
                        e.check(
                            || format!("ε{i}ε{j} = ε{}ε{i}", j + 1),
                            || m.degeneracy(&m.degeneracy(x, j)?, i),
                            || m.degeneracy(&m.degeneracy(x, i)?, j + 1),
                        );
                    }
                }
            }
            Law::EpsUnit => {
                for i in 1..=n {
                    e.check(
                        || format!("ε{i}∂−{i}x ∘{i} x = x"),
                        || m.compose(&m.degeneracy(&m.face(x, i, Sign::Minus)?, i)?, x, i),
                        || Ok(x.clone()),
                    );
                    e.check(
                        || format!("x ∘{i} ε{i}∂+{i}x = x"),
                        || m.compose(x, &m.degeneracy(&m.face(x, i, Sign::Plus)?, i)?, i),
                        || Ok(x.clone()),
                    );
                }
            }
            Law::CompFace => {
                let (y, i) = (&c[1], inst.dirs[0]);
                let xy = || m.compose(x, y, i);
                e.check(
                    || format!("∂−{i}(x∘{i}y) = ∂−{i}x"),
                    || m.face(&xy()?, i, Sign::Minus),
                    || m.face(x, i, Sign::Minus),
                );
                e.check(
                    || format!("∂+{i}(x∘{i}y) = ∂+{i}y"),
                    || m.face(&xy()?, i, Sign::Plus),
                    || m.face(y, i, Sign::Plus),
                );
                for j in (1..=n).filter(|&j| j != i) {
                    let k = if j < i { i - 1 } else { i };
                    for a in Sign::BOTH {
                        e.check(
                            || format!("∂{a}{j}(x∘{i}y) = ∂{a}{j}x ∘{k} ∂{a}{j}y"),
                            || m.face(&xy()?, j, a),
                            || m.compose(&m.face(x, j, a)?, &m.face(y, j, a)?, k),
                        );
                    }
                }
            }
            Law::Assoc => {
                let (y, z, i) = (&c[1], &c[2], inst.dirs[0]);
                e.check(
                    || format!("(x∘{i}y)∘{i}z = x∘{i}(y∘{i}z)"),
                    || m.compose(&m.compose(x, y, i)?, z, i),
                    || m.compose(x, &m.compose(y, z, i)?, i),
                );
            }
            Law::Interchange => {
                let (y, z, w) = (&c[1], &c[2], &c[3]);
                let (i, j) = (inst.dirs[0], inst.dirs[1]);
                e.check(
                    || format!("(x∘{i}y)∘{j}(z∘{i}w) = (x∘{j}z)∘{i}(y∘{j}w)"),
                    || m.compose(&m.compose(x, y, i)?, &m.compose(z, w, i)?, j),
                    || m.compose(&m.compose(x, z, j)?, &m.compose(y, w, j)?, i),
                );
            }
            Law::EpsComp => {
                let (y, i) = (&c[1], inst.dirs[0]);
                for j in 1..=n + 1 {
                    let k = if j <= i { i + 1 } else { i };
                    e.check(
                        || format!("ε{j}(x∘{i}y) = ε{j}x ∘{k} ε{j}y"),
                        || m.degeneracy(&m.compose(x, y, i)?, j),
                        || m.compose(&m.degeneracy(x, j)?, &m.degeneracy(y, j)?, k),
                    );
                }
            }
            Law::GammaFace => {
                for i in 1..=n {
                    for a in Sign::BOTH {
                        let g = || m.connection(x, i, a);
                        for k in [i, i + 1] {
                            e.check(|| format!("∂{a}{k}Γ{a}{i} = id"), || m.face(&g()?, k, a), || Ok(x.clone()));
                            let b = a.flip();
                            e.check(
                                || format!("∂{b}{k}Γ{a}{i} = ε{i}∂{b}{i}"),
                                || m.face(&g()?, k, b),
                                || m.degeneracy(&m.face(x, i, b)?, i),
                            );
                        }
                        for j in (1..=n + 1).filter(|&j| j != i && j != i + 1) {
                            for b in Sign::BOTH {
                                if j < i {
                                    e.check(
                                        || format!("∂{b}{j}Γ{a}{i} = Γ{a}{}∂{b}{j}", i - 1),
                                        || m.face(&g()?, j, b),
                                        || m.connection(&m.face(x, j, b)?, i - 1, a),
                                    );
                                } else {
                                    e.check(
                                        || format!("∂{b}{j}Γ{a}{i} = Γ{a}{i}∂{b}{}", j - 1),
                                        || m.face(&g()?, j, b),
                                        || m.connection(&m.face(x, j - 1, b)?, i, a),
                                    );
                                }
                            }
                        }
                    }
                }
            }
            Law::GammaEps => {
                for j in 1..=n + 1 {
                    for i in 1..=n + 1 {
                        for a in Sign::BOTH {
                            let label = || format!("Γ{a}{i}ε{j}");
                            let lhs = || m.connection(&m.degeneracy(x, j)?, i, a);
                            match i.cmp(&j) {
                                std::cmp::Ordering::Less => {
                                    e.check(label, lhs, || m.degeneracy(&m.connection(x, i, a)?, j + 1))
                                }
                                std::cmp::Ordering::Equal => {
                                    e.check(label, lhs, || m.degeneracy(&m.degeneracy(x, i)?, i))
                                }
                                std::cmp::Ordering::Greater => {
                                    e.check(label, lhs, || m.degeneracy(&m.connection(x, i - 1, a)?, j))
                                }
                            }
                        }
                    }
                }
            }
            Law::GammaGamma => {
                for i in 1..=n {
                    for a in Sign::BOTH {
                        e.check(
                            || format!("Γ{a}{i}Γ{a}{i} = Γ{a}{}Γ{a}{i}", i + 1),
                            || m.connection(&m.connection(x, i, a)?, i, a),
                            || m.connection(&m.connection(x, i, a)?, i + 1, a),
                        );
                        for j in i + 1..=n {
                            for b in Sign::BOTH {
                                e.check(
                                    || format!("Γ{a}{i}Γ{b}{j} = Γ{b}{}Γ{a}{i}", j + 1),
                                    || m.connection(&m.connection(x, j, b)?, i, a),
                                    || m.connection(&m.connection(x, i, a)?, j + 1, b),
                                );
                            }
                        }
                    }
                }
            }
            Law::GammaComp => {
                let (y, j) = (&c[1], inst.dirs[0]);
                for i in (1..=n).filter(|&i| i != j) {
                    let k = if j < i { j } else { j + 1 };
                    for a in Sign::BOTH {
                        e.check(
                            || format!("Γ{a}{i}(x∘{j}y) = Γ{a}{i}x ∘{k} Γ{a}{i}y"),
                            || m.connection(&m.compose(x, y, j)?, i, a),
                            || m.compose(&m.connection(x, i, a)?, &m.connection(y, i, a)?, k),
                        );
                    }
                }
            }
            Law::Transport => {
                let (y, i) = (&c[1], inst.dirs[0]);
                e.check(
                    || format!("Γ+{i}(x∘{i}y) = transport array"),
                    || m.connection(&m.compose(x, y, i)?, i, Sign::Plus),
                    || {
                        let top = m.compose(&m.connection(x, i, Sign::Plus)?, &m.degeneracy(x, i + 1)?, i + 1)?;
                        let bottom = m.compose(&m.degeneracy(x, i)?, &m.connection(y, i, Sign::Plus)?, i + 1)?;
                        m.compose(&top, &bottom, i)
                    },
                );
            }
            Law::TransportMinus => {
                let (y, i) = (&c[1], inst.dirs[0]);
                e.check(
                    || format!("Γ−{i}(x∘{i}y) = mirrored transport array"),
                    || m.connection(&m.compose(x, y, i)?, i, Sign::Minus),
                    || transport_minus_array(m, x, y, i),
                );
            }
            Law::GammaCancel => {
                for i in 1..=n {
                    let plus = || m.connection(x, i, Sign::Plus);
                    let minus = || m.connection(x, i, Sign::Minus);
                    e.check(
                        || format!("Γ+{i}x ∘{} Γ−{i}x = ε{i}x", i + 1),
                        || m.compose(&plus()?, &minus()?, i + 1),
                        || m.degeneracy(x, i),
                    );
                    e.check(
                        || format!("Γ+{i}x ∘{i} Γ−{i}x = ε{}x", i + 1),
                        || m.compose(&plus()?, &minus()?, i),
                        || m.degeneracy(x, i + 1),
                    );
                }
            }
        }
        e.failure
    }
}

/// Right-hand side of the Γ⁻ transport law.
pub(crate) fn transport_minus_array<M: CubeSystem>(m: &M, x: &M::Cube, y: &M::Cube, i: usize) -> CubeResult<M::Cube> {
    let top = m.compose(&m.connection(x, i, Sign::Minus)?, &m.degeneracy(y, i)?, i + 1)?;
    let bottom = m.compose(&m.degeneracy(y, i + 1)?, &m.connection(y, i, Sign::Minus)?, i + 1)?;
    m.compose(&top, &bottom, i)
}

/// Collects the first failing equation.
struct Equations<C> {
    failure: Option<Mismatch<C>>,
}

impl<C: PartialEq> Equations<C> {
    fn check(
        &mut self,
        label: impl FnOnce() -> String,
        lhs: impl FnOnce() -> CubeResult<C>,
        rhs: impl FnOnce() -> CubeResult<C>,
    ) {
        if self.failure.is_some() {
            return;
        }
        let (l, r) = (lhs(), rhs());
        let error = match (&l, &r) {
            (Ok(a), Ok(b)) if a == b => return,
            (Ok(_), Ok(_)) => None,
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        };
        self.failure = Some(Mismatch {
            equation: label(),
            lhs: l.ok(),
            rhs: r.ok(),
            error,
        });
    }
}

/// Checks `law` on every instance of `sample`, stopping at the first failure.
pub fn check_axiom<M: CubeSystem>(
    m: &M,
    law_id: &str,
    sample: &[Instance<M::Cube>],
) -> Result<LawReport<M::Cube>, LawError> {
    let law = Law::from_id(law_id)?;
    for inst in sample {
        law.validate(m, inst)?;
    }
    let counterexample = sample.iter().find_map(|inst| {
        law.evaluate(m, inst).map(|mismatch| Counterexample {
            instance: inst.clone(),
            mismatch,
        })
    });
    Ok(LawReport {
        law,
        instances: sample.len(),
        counterexample,
    })
}

/// All instances of `law` whose input cubes have dimension `d`, grouped by
/// the first cube so that groups can be checked independently.
pub fn instances_for<M: FiniteModel>(
    catalog: &Catalog<'_, M>,
    law: Law,
    x: &M::Cube,
) -> Vec<Instance<M::Cube>> {
    let m = catalog.model();
    let d = m.dim(x);
    let face = |c: &M::Cube, i, s| m.face(c, i, s).expect("direction within range");
    let one = |cubes: Vec<M::Cube>, dirs: Vec<usize>| Instance { dirs, cubes };
    let Some(level) = catalog.cubes(d) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    match law.shape() {
        Shape::One => out.push(one(vec![x.clone()], vec![])),
        Shape::Pair | Shape::Triple => {
            for i in 1..=d {
                for &yk in catalog.with_face(d, i, Sign::Minus, &face(x, i, Sign::Plus)) {
                    let y = &level[yk];
                    if law.shape() == Shape::Pair {
                        out.push(one(vec![x.clone(), y.clone()], vec![i]));
                        continue;
                    }
                    for &zk in catalog.with_face(d, i, Sign::Minus, &face(y, i, Sign::Plus)) {
                        out.push(one(vec![x.clone(), y.clone(), level[zk].clone()], vec![i]));
                    }
                }
            }
        }
        Shape::Grid => {
            for i in 1..=d {
                for j in i + 1..=d {
                    for &yk in catalog.with_face(d, i, Sign::Minus, &face(x, i, Sign::Plus)) {
                        let y = &level[yk];
                        let yj = face(y, j, Sign::Plus);
                        for &zk in catalog.with_face(d, j, Sign::Minus, &face(x, j, Sign::Plus)) {
                            let z = &level[zk];
                            for &wk in catalog.with_face(d, i, Sign::Minus, &face(z, i, Sign::Plus)) {
                                let w = &level[wk];
                                if face(w, j, Sign::Minus) == yj {
                                    out.push(one(vec![x.clone(), y.clone(), z.clone(), w.clone()], vec![i, j]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Checks `law` exhaustively on inputs of dimension `d`.
pub fn check_exhaustive<M: FiniteModel>(
    catalog: &Catalog<'_, M>,
    law: Law,
    d: usize,
) -> LawReport<M::Cube> {
    let m = catalog.model();
    let cubes = catalog.cubes(d).unwrap_or(&[]);
    let results: Vec<(usize, Option<Counterexample<M::Cube>>)> = cubes
        .par_iter()
        .map(|x| {
            let insts = instances_for(catalog, law, x);
            let failure = insts.iter().find_map(|inst| {
                law.evaluate(m, inst).map(|mismatch| Counterexample {
                    instance: inst.clone(),
                    mismatch,
                })
            });
            (insts.len(), failure)
        })
        .collect();
    LawReport {
        law,
        instances: results.iter().map(|r| r.0).sum(),
        counterexample: results.into_iter().find_map(|r| r.1),
    }
}

/// Draws one random instance of `law` with inputs of dimension `d`.
pub fn random_instance<M: FiniteModel, R: Rng>(
    catalog: &Catalog<'_, M>,
    law: Law,
    d: usize,
    rng: &mut R,
) -> Option<Instance<M::Cube>> {
    let m = catalog.model();
    let face = |c: &M::Cube, i, s| m.face(c, i, s).ok();
    let x = catalog.random(d, &[], rng)?;
    match law.shape() {
        Shape::One => Some(Instance {
            dirs: vec![],
            cubes: vec![x],
        }),
        Shape::Pair | Shape::Triple => {
            let i = rng.gen_range(1..=d);
            let y = catalog.random(d, &[(i, Sign::Minus, face(&x, i, Sign::Plus)?)], rng)?;
            if law.shape() == Shape::Pair {
                return Some(Instance {
                    dirs: vec![i],
                    cubes: vec![x, y],
                });
            }
            let z = catalog.random(d, &[(i, Sign::Minus, face(&y, i, Sign::Plus)?)], rng)?;
            Some(Instance {
                dirs: vec![i],
                cubes: vec![x, y, z],
            })
        }
        Shape::Grid => {
            let i = rng.gen_range(1..d);
            let j = rng.gen_range(i + 1..=d);
            let y = catalog.random(d, &[(i, Sign::Minus, face(&x, i, Sign::Plus)?)], rng)?;
            let z = catalog.random(d, &[(j, Sign::Minus, face(&x, j, Sign::Plus)?)], rng)?;
            let w = catalog.random(
                d,
                &[
                    (i, Sign::Minus, face(&z, i, Sign::Plus)?),
                    (j, Sign::Minus, face(&y, j, Sign::Plus)?),
                ],
                rng,
            )?;
            Some(Instance {
                dirs: vec![i, j],
                cubes: vec![x, y, z, w],
            })
        }
    }
}

/// Draws up to `count` random instances, giving up after `20 * count`
/// failed draws.
pub fn random_instances<M: FiniteModel, R: Rng>(
    catalog: &Catalog<'_, M>,
    law: Law,
    d: usize,
    count: usize,
    rng: &mut R,
) -> Vec<Instance<M::Cube>> {
    let mut out = Vec::with_capacity(count);
    let mut misses = 0;
    while out.len() < count && misses < 20 * count {
        match random_instance(catalog, law, d, rng) {
            Some(inst) => out.push(inst),
            None => misses += 1,
        }
    }
    out
}
