//! Composites of degeneracies and connections, as term trees.

use std::fmt;

use serde_json::{json, Value};

use crate::cube::{require_composable, CubeResult, CubeSystem, Sign};
use crate::models::{FiniteModel, ModelError};

/// A term built from `εᵢa`, `Γᵅᵢa` and arbitrary cubes by composition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeneratorExpression<C> {
    Eps {
        dir: usize,
        cube: C,
    },
    Gamma {
        dir: usize,
        sign: Sign,
        cube: C,
    },
    Base(C),
    Compose {
        dir: usize,
        left: Box<GeneratorExpression<C>>,
        right: Box<GeneratorExpression<C>>,
    },
}

impl<C> GeneratorExpression<C> {
    pub fn eps(dir: usize, cube: C) -> Self {
        GeneratorExpression::Eps { dir, cube }
    }

    pub fn gamma(dir: usize, sign: Sign, cube: C) -> Self {
        GeneratorExpression::Gamma { dir, sign, cube }
    }

    pub fn compose(dir: usize, left: Self, right: Self) -> Self {
        GeneratorExpression::Compose {
            dir,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// No `Base` leaf anywhere in the tree.
    pub fn is_base_free(&self) -> bool {
        match self {
            GeneratorExpression::Base(_) => false,
            GeneratorExpression::Eps { .. } | GeneratorExpression::Gamma { .. } => true,
            GeneratorExpression::Compose { left, right, .. } => left.is_base_free() && right.is_base_free(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            GeneratorExpression::Compose { left, right, .. } => left.leaf_count() + right.leaf_count(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            GeneratorExpression::Compose { left, right, .. } => 1 + left.depth().max(right.depth()),
            _ => 0,
        }
    }

    pub fn try_map<D, E>(&self, f: &mut impl FnMut(&C) -> Result<D, E>) -> Result<GeneratorExpression<D>, E> {
        Ok(match self {
            GeneratorExpression::Eps { dir, cube } => GeneratorExpression::Eps { dir: *dir, cube: f(cube)? },
            GeneratorExpression::Gamma { dir, sign, cube } => GeneratorExpression::Gamma {
                dir: *dir,
                sign: *sign,
                cube: f(cube)?,
            },
            GeneratorExpression::Base(c) => GeneratorExpression::Base(f(c)?),
            GeneratorExpression::Compose { dir, left, right } => GeneratorExpression::Compose {
                dir: *dir,
                left: Box::new(left.try_map(f)?),
                right: Box::new(right.try_map(f)?),
            },
        })
    }

    /// Infix rendering with leaves written through `label`.
    pub fn pretty(&self, label: &impl Fn(&C) -> String) -> String {
        match self {
            GeneratorExpression::Eps { dir, cube } => format!("ε{}({})", sub(*dir), label(cube)),
            GeneratorExpression::Gamma { dir, sign, cube } => format!(
                "Γ{}{}({})",
                match sign {
                    Sign::Minus => "⁻",
                    Sign::Plus => "⁺",
                },
                sub(*dir),
                label(cube)
            ),
            GeneratorExpression::Base(c) => label(c),
            GeneratorExpression::Compose { dir, left, right } => {
                format!("({} ∘{} {})", left.pretty(label), sub(*dir), right.pretty(label))
            }
        }
    }

    pub fn to_json(&self, encode: &impl Fn(&C) -> Value) -> Value {
        match self {
            GeneratorExpression::Eps { dir, cube } => json!({"kind": "eps", "dir": dir, "cube": encode(cube)}),
            GeneratorExpression::Gamma { dir, sign, cube } => {
                json!({"kind": "gamma", "dir": dir, "sign": sign.symbol(), "cube": encode(cube)})
            }
            GeneratorExpression::Base(c) => json!({"kind": "base", "cube": encode(c)}),
            GeneratorExpression::Compose { dir, left, right } => json!({
                "kind": "compose",
                "dir": dir,
                "left": left.to_json(encode),
                "right": right.to_json(encode),
            }),
        }
    }

    pub fn from_json(value: &Value, decode: &impl Fn(&Value) -> Result<C, ModelError>) -> Result<Self, ModelError> {
        let parse = |msg: &str| ModelError::Parse(format!("expression: {msg}"));
        let kind = value.get("kind").and_then(Value::as_str).ok_or_else(|| parse("missing \"kind\""))?;
        let dir = || {
            value
                .get("dir")
                .and_then(Value::as_u64)
                .filter(|&d| d >= 1)
                .map(|d| d as usize)
                .ok_or_else(|| parse("\"dir\" must be a positive integer"))
        };
        let cube = || decode(value.get("cube").ok_or_else(|| parse("missing \"cube\""))?);
        Ok(match kind {
            "eps" => GeneratorExpression::Eps { dir: dir()?, cube: cube()? },
            "gamma" => {
                let sign = value
                    .get("sign")
                    .and_then(Value::as_str)
                    .and_then(Sign::parse)
                    .ok_or_else(|| parse("\"sign\" must be \"+\" or \"−\""))?;
                GeneratorExpression::Gamma {
                    dir: dir()?,
                    sign,
                    cube: cube()?,
                }
            }
            "base" => GeneratorExpression::Base(cube()?),
            "compose" => {
                let child = |key: &str| -> Result<Box<Self>, ModelError> {
                    let v = value.get(key).ok_or_else(|| parse(&format!("missing \"{key}\"")))?;
                    Ok(Box::new(GeneratorExpression::from_json(v, decode)?))
                };
                GeneratorExpression::Compose {
                    dir: dir()?,
                    left: child("left")?,
                    right: child("right")?,
                }
            }
            other => return Err(parse(&format!("unknown kind {other:?}"))),
        })
    }
}

impl<C: Clone> GeneratorExpression<C> {
    /// The cube the term denotes; every composition is checked.
    pub fn eval<M: CubeSystem<Cube = C>>(&self, m: &M) -> CubeResult<C> {
        match self {
            GeneratorExpression::Eps { dir, cube } => m.degeneracy(cube, *dir),
            GeneratorExpression::Gamma { dir, sign, cube } => m.connection(cube, *dir, *sign),
            GeneratorExpression::Base(c) => Ok(c.clone()),
            GeneratorExpression::Compose { dir, left, right } => {
                let (x, y) = (left.eval(m)?, right.eval(m)?);
                require_composable(m, &x, &y, *dir)?;
                m.compose(&x, &y, *dir)
            }
        }
    }

    pub fn to_json_in<M: FiniteModel<Cube = C>>(&self, m: &M) -> Value {
        self.to_json(&|c| m.encode(c))
    }

    pub fn from_json_in<M: FiniteModel<Cube = C>>(m: &M, value: &Value) -> Result<Self, ModelError> {
        GeneratorExpression::from_json(value, &|v| m.decode(v))
    }
}

impl<C: fmt::Debug> fmt::Display for GeneratorExpression<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty(&|c| format!("{c:?}")))
    }
}

pub(crate) fn sub(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .chars()
        .map(|d| DIGITS[d.to_digit(10).expect("decimal digit") as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fincat::bundled;
    use crate::models::Nerve;

    #[test]
    fn eval_and_json_round_trip() {
        let n = Nerve::new(bundled::load("poset2x2").unwrap(), 3);
        let f = n.arrow_named("f").unwrap();
        let e = GeneratorExpression::compose(
            2,
            GeneratorExpression::gamma(1, Sign::Plus, f.clone()),
            GeneratorExpression::gamma(1, Sign::Minus, f.clone()),
        );
        assert_eq!(e.eval(&n).unwrap(), n.degeneracy(&f, 1).unwrap());
        assert!(e.is_base_free());
        assert_eq!(e.leaf_count(), 2);
        let v = e.to_json_in(&n);
        assert_eq!(v["right"]["sign"], "−");
        assert_eq!(GeneratorExpression::from_json_in(&n, &v).unwrap(), e);
        assert_eq!(e.pretty(&|c| n.label(c)), "(Γ⁺₁(f) ∘₂ Γ⁻₁(f))");
    }

    #[test]
    fn eval_rejects_mismatched_composite() {
        let n = Nerve::new(bundled::load("poset2x2").unwrap(), 3);
        let f = n.arrow_named("f").unwrap();
        let e = GeneratorExpression::compose(1, GeneratorExpression::Base(f.clone()), GeneratorExpression::Base(f));
        assert!(e.eval(&n).is_err());
        assert!(!e.is_base_free());
    }

    #[test]
    fn rejects_bad_json() {
        let n = Nerve::new(bundled::load("poset2x2").unwrap(), 3);
        for bad in [json!({}), json!({"kind": "eps", "dir": 0, "cube": null}), json!({"kind": "twist"})] {
            assert!(GeneratorExpression::from_json_in(&n, &bad).is_err());
        }
    }
}
