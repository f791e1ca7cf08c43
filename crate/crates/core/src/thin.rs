//! Thin structures on `Cₙ` and the connections they correspond to.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::Value;

use crate::cube::{check, CubeResult, CubeSystem, Sign};
use crate::fillers::{thin_filler, FillerError};
use crate::folding::is_thin;
use crate::laws::{check_exhaustive, Law};
use crate::models::sample::Catalog;
use crate::models::{FiniteModel, ModelError};
use crate::shell::{all_shells, boundary, is_commutative, shell_compose, shell_connection, shell_degeneracy, Shell};

/// Laws that mention connections.
pub const CONNECTION_LAWS: [Law; 7] = [
    Law::GammaFace,
    Law::GammaEps,
    Law::GammaGamma,
    Law::GammaComp,
    Law::Transport,
    Law::TransportMinus,
    Law::GammaCancel,
];

/// A map `θ` from the commutative `n`-shells to `Cₙ`, stored extensionally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThinStructure<C: std::hash::Hash + Eq> {
    dim: usize,
    theta: HashMap<Shell<C>, C>,
}

impl<C: Clone + std::hash::Hash + Eq> ThinStructure<C> {
    pub fn from_map(dim: usize, theta: HashMap<Shell<C>, C>) -> ThinStructure<C> {
        ThinStructure { dim, theta }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn get(&self, s: &Shell<C>) -> Option<&C> {
        self.theta.get(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Shell<C>, &C)> {
        self.theta.iter()
    }

    /// `x = θ(∂x)`.
    pub fn is_thin<M: CubeSystem<Cube = C>>(&self, m: &M, x: &C) -> CubeResult<bool> {
        if m.dim(x) != self.dim {
            return Ok(false);
        }
        Ok(self.theta.get(&boundary(m, x)?) == Some(x))
    }
}

/// Commutative `n`-shells over the catalogue's `(n − 1)`-cubes.
pub fn commutative_shells<M: FiniteModel>(catalog: &Catalog<'_, M>, n: usize) -> Result<Vec<Shell<M::Cube>>, FillerError> {
    let below = catalog
        .cubes(n - 1)
        .ok_or_else(|| ModelError::DimensionTooLarge {
            dim: n - 1,
            cap: catalog.enumerated_dim(),
        })?;
    let m = catalog.model();
    let shells = all_shells(m, n, below)?;
    let flags = shells
        .par_iter()
        .map(|s| is_commutative(m, s))
        .collect::<CubeResult<Vec<bool>>>()?;
    Ok(shells.into_iter().zip(flags).filter(|(_, c)| *c).map(|(s, _)| s).collect())
}

/// Exhaustively checks every connection law at levels up to `n`.
pub fn check_connection_laws<M: FiniteModel>(catalog: &Catalog<'_, M>, n: usize) -> Result<usize, FillerError> {
    let mut instances = 0;
    for law in CONNECTION_LAWS {
        for d in law.min_dim()..=n.saturating_sub(law.raise()) {
            if law.raise() + d > n || catalog.cubes(d).is_none() {
                continue;
            }
            let report = check_exhaustive(catalog, law, d);
            instances += report.instances;
            if let Some(c) = report.counterexample {
                return Err(FillerError::AxiomFailure {
                    law,
                    detail: c.mismatch.equation,
                });
            }
        }
    }
    Ok(instances)
}

/// The thin structure with `θs` the thin filler of `s`.
pub fn theta_from_connections<M: FiniteModel>(catalog: &Catalog<'_, M>, n: usize) -> Result<ThinStructure<M::Cube>, FillerError> {
    check_connection_laws(catalog, n)?;
    let m = catalog.model();
    let shells = commutative_shells(catalog, n)?;
    let theta = shells
        .into_par_iter()
        .map(|s| thin_filler(m, &s).map(|x| (s, x)))
        .collect::<Result<HashMap<_, _>, _>>()?;
    Ok(ThinStructure { dim: n, theta })
}

/// A thin structure read off the model's own fillers, without consulting
/// its connections in dimension `n`. Each commutative shell must have
/// exactly one filler.
pub fn theta_from_fillers<M: FiniteModel>(catalog: &Catalog<'_, M>, n: usize) -> Result<ThinStructure<M::Cube>, FillerError> {
    let m = catalog.model();
    let mut theta = HashMap::new();
    for s in commutative_shells(catalog, n)? {
        let fillers = m.fillers(&s);
        let [x] = fillers.as_slice() else {
            return Err(FillerError::MorphismViolation(format!(
                "commutative shell has {} fillers",
                fillers.len()
            )));
        };
        theta.insert(s, x.clone());
    }
    Ok(ThinStructure { dim: n, theta })
}

/// Counts from a successful morphism check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MorphismCheck {
    pub shells: usize,
    pub degeneracies: usize,
    pub composites: usize,
}

/// Checks that `θ` preserves faces, degeneracies and composition, is
/// injective, and that its image is closed under composition.
pub fn check_morphism<M: FiniteModel>(
    catalog: &Catalog<'_, M>,
    theta: &ThinStructure<M::Cube>,
) -> Result<MorphismCheck, FillerError> {
    let m = catalog.model();
    let n = theta.dim;
    let violation = |msg: String| Err(FillerError::MorphismViolation(msg));
    let mut out = MorphismCheck {
        shells: theta.len(),
        ..MorphismCheck::default()
    };
    let mut image: HashMap<&M::Cube, &Shell<M::Cube>> = HashMap::new();
    for (s, x) in theta.iter() {
        if boundary(m, x)? != *s {
            return violation(format!("∂θ(s) ≠ s for {}", m.label(x)));
        }
        if image.insert(x, s).is_some() {
            return violation(format!("θ is not injective at {}", m.label(x)));
        }
    }
    for a in catalog.cubes(n - 1).unwrap_or(&[]) {
        for j in 1..=n {
            let s = shell_degeneracy(m, a, j)?;
            let e = m.degeneracy(a, j)?;
            if theta.get(&s) != Some(&e) {
                return violation(format!("θ(𝛆{j}a) ≠ ε{j}a for a = {}", m.label(a)));
            }
            out.degeneracies += 1;
        }
    }
    // Index shells by their (i,−) faces to find composable pairs.
    let mut by_lower: HashMap<(usize, &M::Cube), Vec<&Shell<M::Cube>>> = HashMap::new();
    for s in theta.theta.keys() {
        for i in 1..=n {
            by_lower.entry((i, s.face(i, Sign::Minus))).or_default().push(s);
        }
    }
    for (s, x) in theta.iter() {
        for i in 1..=n {
            for t in by_lower.get(&(i, s.face(i, Sign::Plus))).map(Vec::as_slice).unwrap_or(&[]) {
                let st = shell_compose(m, s, t, i)?;
                let composite = m.compose(x, &theta.theta[*t], i)?;
                match theta.get(&st) {
                    None => return violation(format!("composite shell in direction {i} is outside the domain")),
                    Some(y) if *y != composite => {
                        return violation(format!("θ(s ∘{i} t) ≠ θ(s) ∘{i} θ(t) at {}", m.label(x)))
                    }
                    Some(_) => {}
                }
                if !image.contains_key(&composite) {
                    return violation(format!("image is not closed under ∘{i}"));
                }
                out.composites += 1;
            }
        }
    }
    Ok(out)
}

/// Connections `Cₙ₋₁ → Cₙ` given by a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedConnections<C: std::hash::Hash + Eq> {
    dim: usize,
    table: HashMap<(C, usize, Sign), C>,
}

impl<C: Clone + std::hash::Hash + Eq> InducedConnections<C> {
    /// Target dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, a: &C, i: usize, sign: Sign) -> Option<&C> {
        self.table.get(&(a.clone(), i, sign))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(C, usize, Sign), &C)> {
        self.table.iter()
    }
}

/// `Γᵅᵢa = θ𝚪ᵅᵢa` for every `a ∈ Cₙ₋₁`, after checking that `θ` is a
/// morphism and that the resulting connections satisfy the connection laws.
pub fn connections_from_theta<M: FiniteModel>(
    catalog: &Catalog<'_, M>,
    theta: &ThinStructure<M::Cube>,
) -> Result<InducedConnections<M::Cube>, FillerError> {
    check_morphism(catalog, theta)?;
    let m = catalog.model();
    let n = theta.dim;
    let mut table = HashMap::new();
    for a in catalog.cubes(n - 1).unwrap_or(&[]) {
        for i in 1..n {
            for sign in Sign::BOTH {
                let s = shell_connection(m, a, i, sign)?;
                let Some(x) = theta.get(&s) else {
                    return Err(FillerError::MorphismViolation(format!(
                        "𝚪{sign}{i}a is outside the domain for a = {}",
                        m.label(a)
                    )));
                };
                table.insert((a.clone(), i, sign), x.clone());
            }
        }
    }
    let induced = InducedConnections { dim: n, table };
    let with = WithConnections::new(m, &induced);
    let wcat = Catalog::new(&with, n)?;
    check_connection_laws(&wcat, n)?;
    Ok(induced)
}

/// `m` with its connections `Cₙ₋₁ → Cₙ` replaced by a table.
pub struct WithConnections<'a, M: CubeSystem> {
    inner: &'a M,
    induced: &'a InducedConnections<M::Cube>,
}

impl<'a, M: CubeSystem> WithConnections<'a, M> {
    pub fn new(inner: &'a M, induced: &'a InducedConnections<M::Cube>) -> WithConnections<'a, M> {
        WithConnections { inner, induced }
    }

    pub fn inner(&self) -> &'a M {
        self.inner
    }
}

impl<M: CubeSystem> CubeSystem for WithConnections<'_, M> {
    type Cube = M::Cube;

    fn max_dim(&self) -> usize {
        self.inner.max_dim()
    }

    fn dim(&self, x: &Self::Cube) -> usize {
        self.inner.dim(x)
    }

    fn face(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube> {
        self.inner.face(x, i, sign)
    }

    fn degeneracy(&self, x: &Self::Cube, i: usize) -> CubeResult<Self::Cube> {
        self.inner.degeneracy(x, i)
    }

    fn connection(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube> {
        let n = self.inner.dim(x);
        if n + 1 != self.induced.dim {
            return self.inner.connection(x, i, sign);
        }
        check::connection(n, i, self.max_dim())?;
        self.induced
            .get(x, i, sign)
            .cloned()
            .ok_or_else(|| crate::cube::CubeError::Invalid("no induced connection for this cube".to_string()))
    }

    fn compose(&self, x: &Self::Cube, y: &Self::Cube, i: usize) -> CubeResult<Self::Cube> {
        self.inner.compose(x, y, i)
    }
}

impl<M: FiniteModel> FiniteModel for WithConnections<'_, M> {
    fn enumerate(&self, n: usize) -> Result<Vec<Self::Cube>, ModelError> {
        self.inner.enumerate(n)
    }

    fn fillers(&self, shell: &Shell<Self::Cube>) -> Vec<Self::Cube> {
        self.inner.fillers(shell)
    }

    fn encode(&self, x: &Self::Cube) -> Value {
        self.inner.encode(x)
    }

    fn decode(&self, value: &Value) -> Result<Self::Cube, ModelError> {
        self.inner.decode(value)
    }

    fn label(&self, x: &Self::Cube) -> String {
        self.inner.label(x)
    }
}

/// Elements where the two notions of thinness disagree, if any.
pub fn thin_class_difference<M: FiniteModel>(
    catalog: &Catalog<'_, M>,
    theta: &ThinStructure<M::Cube>,
    induced: &InducedConnections<M::Cube>,
) -> Result<(usize, Option<M::Cube>), FillerError> {
    let m = catalog.model();
    let with = WithConnections::new(m, induced);
    let cubes = catalog.cubes(theta.dim).unwrap_or(&[]);
    for x in cubes {
        if theta.is_thin(m, x)? != is_thin(&with, x)? {
            return Ok((cubes.len(), Some(x.clone())));
        }
    }
    Ok((cubes.len(), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fincat::bundled;
    use crate::models::Nerve;

    #[test]
    fn nerve_round_trip_at_dim_two() {
        let n = Nerve::new(bundled::load("free-square").unwrap(), 3);
        let cat = Catalog::new(&n, 3).unwrap();
        let theta = theta_from_connections(&cat, 2).unwrap();
        let from_fillers = theta_from_fillers(&cat, 2).unwrap();
        assert_eq!(theta, from_fillers);
        let induced = connections_from_theta(&cat, &theta).unwrap();
        for ((a, i, sign), x) in induced.iter() {
            assert_eq!(&n.connection(a, *i, *sign).unwrap(), x);
        }
        assert_eq!(thin_class_difference(&cat, &theta, &induced).unwrap().1, None);
    }
}
