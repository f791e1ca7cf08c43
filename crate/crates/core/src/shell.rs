//! Shells, the boundary map, and the shell construction that adjoins all
//! shells of a model as a new top dimension.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::cube::{check, require_composable, CubeError, CubeResult, CubeSystem, Sign};
use crate::folding::{self, FoldResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShellError {
    #[error("a shell needs an even, non-zero number of faces, got {0}")]
    WrongArity(usize),
    #[error("face ({i},{sign}) has dimension {found}, expected {expected}")]
    FaceDimension {
        i: usize,
        sign: Sign,
        expected: usize,
        found: usize,
    },
    #[error("incidence fails: ∂{beta}{j} of face ({i},{alpha}) differs from ∂{alpha}{i_minus_one} of face ({j},{beta})")]
    Incidence {
        i: usize,
        alpha: Sign,
        j: usize,
        beta: Sign,
        i_minus_one: usize,
    },
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// A family of `2n` cubes of dimension `n - 1`, indexed by `(i, α)`, that
/// satisfies `∂ᵝⱼ sᵅᵢ = ∂ᵅᵢ₋₁ sᵝⱼ` for `j < i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shell<C> {
    faces: Vec<C>,
}

pub(crate) fn slot(i: usize, sign: Sign) -> usize {
    2 * (i - 1) + sign.bit()
}

impl<C> Shell<C> {
    /// Builds a shell without checking incidence.
    pub(crate) fn from_faces_unchecked(faces: Vec<C>) -> Shell<C> {
        debug_assert!(!faces.is_empty() && faces.len() % 2 == 0);
        Shell { faces }
    }

    /// The dimension of a cube with this boundary.
    pub fn dim(&self) -> usize {
        self.faces.len() / 2
    }

    /// `sᵅᵢ`. Panics when `(i, α)` is outside the shell.
    pub fn face(&self, i: usize, sign: Sign) -> &C {
        &self.faces[slot(i, sign)]
    }

    pub fn get(&self, i: usize, sign: Sign) -> Option<&C> {
        if i == 0 {
            None
        } else {
            self.faces.get(slot(i, sign))
        }
    }

    /// Faces in the order `(1,−), (1,+), (2,−), …`.
    pub fn faces(&self) -> &[C] {
        &self.faces
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Sign, &C)> {
        self.faces
            .iter()
            .enumerate()
            .map(|(k, c)| (k / 2 + 1, if k % 2 == 0 { Sign::Minus } else { Sign::Plus }, c))
    }

    pub fn map<D>(&self, f: impl FnMut(&C) -> D) -> Shell<D> {
        Shell {
            faces: self.faces.iter().map(f).collect(),
        }
    }

    pub fn try_map<D, E>(&self, f: impl FnMut(&C) -> Result<D, E>) -> Result<Shell<D>, E> {
        Ok(Shell {
            faces: self.faces.iter().map(f).collect::<Result<_, _>>()?,
        })
    }
}

impl<C: Clone + Eq> Shell<C> {
    /// Builds a shell from faces ordered `(1,−), (1,+), (2,−), …`, checking
    /// dimensions and incidence in `m`.
    pub fn new<M: CubeSystem<Cube = C>>(m: &M, faces: Vec<C>) -> Result<Shell<C>, ShellError> {
        if faces.is_empty() || faces.len() % 2 != 0 {
            return Err(ShellError::WrongArity(faces.len()));
        }
        let shell = Shell { faces };
        shell.validate(m)?;
        Ok(shell)
    }

    /// Builds a shell of dimension `n` from a face function.
    pub fn from_fn<M: CubeSystem<Cube = C>>(
        m: &M,
        n: usize,
        mut f: impl FnMut(usize, Sign) -> CubeResult<C>,
    ) -> Result<Shell<C>, ShellError> {
        let mut faces = Vec::with_capacity(2 * n);
        for i in 1..=n {
            for sign in Sign::BOTH {
                faces.push(f(i, sign)?);
            }
        }
        Shell::new(m, faces)
    }

    pub fn validate<M: CubeSystem<Cube = C>>(&self, m: &M) -> Result<(), ShellError> {
        let n = self.dim();
        for (i, sign, c) in self.iter() {
            if m.dim(c) != n - 1 {
                return Err(ShellError::FaceDimension {
                    i,
                    sign,
                    expected: n - 1,
                    found: m.dim(c),
                });
            }
        }
        for i in 2..=n {
            for alpha in Sign::BOTH {
                for j in 1..i {
                    for beta in Sign::BOTH {
                        let lhs = m.face(self.face(i, alpha), j, beta)?;
                        let rhs = m.face(self.face(j, beta), i - 1, alpha)?;
                        if lhs != rhs {
                            return Err(ShellError::Incidence {
                                i,
                                alpha,
                                j,
                                beta,
                                i_minus_one: i - 1,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `∂x`, the family of all faces of `x`.
pub fn boundary<M: CubeSystem>(m: &M, x: &M::Cube) -> CubeResult<Shell<M::Cube>> {
    let n = m.dim(x);
    check::face(n, 1)?;
    let mut faces = Vec::with_capacity(2 * n);
    for i in 1..=n {
        for sign in Sign::BOTH {
            faces.push(m.face(x, i, sign)?);
        }
    }
    Ok(Shell { faces })
}

/// `s ∘ᵢ t` on shells of equal dimension.
pub fn shell_compose<M: CubeSystem>(
    m: &M,
    s: &Shell<M::Cube>,
    t: &Shell<M::Cube>,
    i: usize,
) -> CubeResult<Shell<M::Cube>> {
    check::compose(s.dim(), t.dim(), i)?;
    let (upper, lower) = (s.face(i, Sign::Plus), t.face(i, Sign::Minus));
    if upper != lower {
        return Err(CubeError::NotComposable {
            dir: i,
            upper: format!("{upper:?}"),
            lower: format!("{lower:?}"),
        });
    }
    let n = s.dim();
    let mut faces = Vec::with_capacity(2 * n);
    for k in 1..=n {
        for sign in Sign::BOTH {
            let face = match k.cmp(&i) {
                std::cmp::Ordering::Equal => match sign {
                    Sign::Minus => s.face(i, sign).clone(),
                    Sign::Plus => t.face(i, sign).clone(),
                },
                std::cmp::Ordering::Less => m.compose(s.face(k, sign), t.face(k, sign), i - 1)?,
                std::cmp::Ordering::Greater => m.compose(s.face(k, sign), t.face(k, sign), i)?,
            };
            faces.push(face);
        }
    }
    Ok(Shell { faces })
}

/// `𝛆ⱼa`, the boundary an `εⱼa` would have.
pub fn shell_degeneracy<M: CubeSystem>(m: &M, a: &M::Cube, j: usize) -> CubeResult<Shell<M::Cube>> {
    let d = m.dim(a);
    check::degeneracy(d, j, usize::MAX)?;
    let n = d + 1;
    let mut faces = Vec::with_capacity(2 * n);
    for k in 1..=n {
        for sign in Sign::BOTH {
            let face = match k.cmp(&j) {
                std::cmp::Ordering::Less => m.degeneracy(&m.face(a, k, sign)?, j - 1)?,
                std::cmp::Ordering::Equal => a.clone(),
                std::cmp::Ordering::Greater => m.degeneracy(&m.face(a, k - 1, sign)?, j)?,
            };
            faces.push(face);
        }
    }
    Ok(Shell { faces })
}

/// `𝚪ᵅⱼa`, the boundary a `Γᵅⱼa` would have.
pub fn shell_connection<M: CubeSystem>(
    m: &M,
    a: &M::Cube,
    j: usize,
    alpha: Sign,
) -> CubeResult<Shell<M::Cube>> {
    let d = m.dim(a);
    check::connection(d, j, usize::MAX)?;
    let n = d + 1;
    let mut faces = Vec::with_capacity(2 * n);
    for k in 1..=n {
        for sign in Sign::BOTH {
            let face = if k == j || k == j + 1 {
                if sign == alpha {
                    a.clone()
                } else {
                    m.degeneracy(&m.face(a, j, sign)?, j)?
                }
            } else if k < j {
                m.connection(&m.face(a, k, sign)?, j - 1, alpha)?
            } else {
                m.connection(&m.face(a, k - 1, sign)?, j, alpha)?
            };
            faces.push(face);
        }
    }
    Ok(Shell { faces })
}

/// Handle of an interned shell element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShellId {
    dim: u32,
    index: u32,
}

impl ShellId {
    pub fn dim(self) -> usize {
        self.dim as usize
    }
}

/// An element of a shell system: a cube of the base model, or an interned
/// shell of lower elements. Handles are only meaningful within the system
/// that issued them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell<C> {
    Base(C),
    Shell(ShellId),
}

impl<C> Cell<C> {
    pub fn as_base(&self) -> Option<&C> {
        match self {
            Cell::Base(c) => Some(c),
            Cell::Shell(_) => None,
        }
    }

    pub fn shell_id(&self) -> Option<ShellId> {
        match self {
            Cell::Base(_) => None,
            Cell::Shell(id) => Some(*id),
        }
    }
}

struct Arena<C> {
    shells: Vec<Shell<Cell<C>>>,
    ids: HashMap<Shell<Cell<C>>, u32>,
    composites: HashMap<(ShellId, ShellId, usize), ShellId>,
}

/// A model `M` truncated at `base_dim`, with `height` further dimensions
/// each consisting of all shells over the dimension below.
pub struct ShellSystem<M: CubeSystem> {
    base: M,
    base_dim: usize,
    height: usize,
    enumeration_cap: usize,
    arena: Arc<RwLock<Arena<M::Cube>>>,
}

impl<M: CubeSystem + Clone> Clone for ShellSystem<M> {
    fn clone(&self) -> Self {
        ShellSystem {
            base: self.base.clone(),
            base_dim: self.base_dim,
            height: self.height,
            enumeration_cap: self.enumeration_cap,
            arena: Arc::clone(&self.arena),
        }
    }
}

impl<M: CubeSystem + fmt::Debug> fmt::Debug for ShellSystem<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShellSystem")
            .field("base", &self.base)
            .field("base_dim", &self.base_dim)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl<M: CubeSystem> ShellSystem<M> {
    pub fn over(base: M, base_dim: usize, height: usize) -> ShellSystem<M> {
        assert!(base_dim <= base.max_dim(), "base model is too shallow");
        ShellSystem {
            base,
            base_dim,
            height,
            enumeration_cap: usize::MAX,
            arena: Arc::new(RwLock::new(Arena {
                shells: Vec::new(),
                ids: HashMap::new(),
                composites: HashMap::new(),
            })),
        }
    }

    /// Highest dimension that exhaustive enumeration will attempt.
    pub fn with_enumeration_cap(mut self, cap: usize) -> ShellSystem<M> {
        self.enumeration_cap = cap;
        self
    }

    pub fn enumeration_cap(&self) -> usize {
        self.enumeration_cap
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of distinct shell elements created so far.
    pub fn interned(&self) -> usize {
        self.arena.read().expect("arena lock").shells.len()
    }

    /// The element whose boundary is `s`. Incidence is not checked.
    pub fn intern(&self, s: Shell<Cell<M::Cube>>) -> Cell<M::Cube> {
        if let Some(&index) = self.arena.read().expect("arena lock").ids.get(&s) {
            return Cell::Shell(ShellId {
                dim: s.dim() as u32,
                index,
            });
        }
        let mut arena = self.arena.write().expect("arena lock");
        let dim = s.dim() as u32;
        if let Some(&index) = arena.ids.get(&s) {
            return Cell::Shell(ShellId { dim, index });
        }
        let index = u32::try_from(arena.shells.len()).expect("fewer than 2^32 shells");
        arena.shells.push(s.clone());
        arena.ids.insert(s, index);
        Cell::Shell(ShellId { dim, index })
    }

    /// The boundary of a shell element.
    pub fn shell(&self, x: &Cell<M::Cube>) -> Option<Shell<Cell<M::Cube>>> {
        let id = x.shell_id()?;
        Some(self.arena.read().expect("arena lock").shells[id.index as usize].clone())
    }

    /// Embeds a shell of the base model as an element one dimension up.
    pub fn lift_shell(&self, s: &Shell<M::Cube>) -> Cell<M::Cube> {
        self.intern(s.map(|c| Cell::Base(c.clone())))
    }

    /// Recovers a base shell from an element whose faces are base cubes.
    pub fn lower_shell(&self, x: &Cell<M::Cube>) -> Option<Shell<M::Cube>> {
        self.shell(x)?.try_map(|c| c.as_base().cloned().ok_or(())).ok()
    }

    fn base_cube<'a>(&self, x: &'a Cell<M::Cube>) -> CubeResult<&'a M::Cube> {
        x.as_base()
            .ok_or_else(|| CubeError::Invalid("expected a base cube".to_string()))
    }

    fn top_shell(&self, x: &Cell<M::Cube>) -> CubeResult<Shell<Cell<M::Cube>>> {
        self.shell(x)
            .ok_or_else(|| CubeError::Invalid("expected a shell element".to_string()))
    }
}

impl<M: CubeSystem> CubeSystem for ShellSystem<M> {
    type Cube = Cell<M::Cube>;

    fn max_dim(&self) -> usize {
        self.base_dim + self.height
    }

    fn dim(&self, x: &Self::Cube) -> usize {
        match x {
            Cell::Base(c) => self.base.dim(c),
            Cell::Shell(id) => id.dim(),
        }
    }

    fn face(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube> {
        check::face(self.dim(x), i)?;
        match x {
            Cell::Base(c) => Ok(Cell::Base(self.base.face(c, i, sign)?)),
            Cell::Shell(id) => {
                Ok(self.arena.read().expect("arena lock").shells[id.index as usize].face(i, sign).clone())
            }
        }
    }

    fn degeneracy(&self, x: &Self::Cube, i: usize) -> CubeResult<Self::Cube> {
        let n = self.dim(x);
        check::degeneracy(n, i, self.max_dim())?;
        if n < self.base_dim {
            Ok(Cell::Base(self.base.degeneracy(self.base_cube(x)?, i)?))
        } else {
            Ok(self.intern(shell_degeneracy(self, x, i)?))
        }
    }

    fn connection(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube> {
        let n = self.dim(x);
        check::connection(n, i, self.max_dim())?;
        if n < self.base_dim {
            Ok(Cell::Base(self.base.connection(self.base_cube(x)?, i, sign)?))
        } else {
            Ok(self.intern(shell_connection(self, x, i, sign)?))
        }
    }

    fn compose(&self, x: &Self::Cube, y: &Self::Cube, i: usize) -> CubeResult<Self::Cube> {
        if self.dim(x) <= self.base_dim {
            require_composable(self, x, y, i)?;
            return Ok(Cell::Base(self.base.compose(self.base_cube(x)?, self.base_cube(y)?, i)?));
        }
        let (Some(a), Some(b)) = (x.shell_id(), y.shell_id()) else {
            return Err(CubeError::Invalid("expected shell elements".to_string()));
        };
        if let Some(&c) = self.arena.read().expect("arena lock").composites.get(&(a, b, i)) {
            return Ok(Cell::Shell(c));
        }
        let s = shell_compose(self, &self.top_shell(x)?, &self.top_shell(y)?, i)?;
        let result = self.intern(s);
        if let Some(c) = result.shell_id() {
            self.arena.write().expect("arena lock").composites.insert((a, b, i), c);
        }
        Ok(result)
    }
}

/// Computes the fold of a base shell inside the one-step shell system.
fn fold_shell<'m, M: CubeSystem>(
    m: &'m M,
    s: &Shell<M::Cube>,
) -> CubeResult<(ShellSystem<&'m M>, Cell<M::Cube>)> {
    let n = s.dim();
    if n == 0 {
        return Err(CubeError::DimensionZero { op: "shell fold" });
    }
    let sys = ShellSystem::over(m, n - 1, 1);
    let x = sys.lift_shell(s);
    Ok((sys, x))
}

fn unlift<M: CubeSystem>(sys: &ShellSystem<&M>, x: &Cell<M::Cube>) -> CubeResult<Shell<M::Cube>> {
    sys.lower_shell(x)
        .ok_or_else(|| CubeError::Invalid("fold left the shell dimension".to_string()))
}

/// `ψᵢs` computed in the shell system.
pub fn shell_fold<M: CubeSystem>(m: &M, s: &Shell<M::Cube>, i: usize) -> CubeResult<Shell<M::Cube>> {
    let (sys, x) = fold_shell(m, s)?;
    let y = folding::psi(&sys, &x, i)?;
    unlift(&sys, &y)
}

/// Result of `Ψ` on a shell together with its `N` and `P` faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellFold<C> {
    pub folded: Shell<C>,
    pub n_face: C,
    pub p_face: C,
}

/// `Ψs`, `Ns` and `Ps`.
pub fn shell_big_fold<M: CubeSystem>(m: &M, s: &Shell<M::Cube>) -> CubeResult<ShellFold<M::Cube>> {
    let (sys, x) = fold_shell(m, s)?;
    let FoldResult {
        folded,
        n_face,
        p_face,
        ..
    } = folding::big_psi(&sys, &x)?;
    let base = |c: Cell<M::Cube>| {
        c.as_base()
            .cloned()
            .ok_or_else(|| CubeError::Invalid("fold face is not a base cube".to_string()))
    };
    Ok(ShellFold {
        folded: unlift(&sys, &folded)?,
        n_face: base(n_face)?,
        p_face: base(p_face)?,
    })
}

/// `Ns = Ps`.
pub fn is_commutative<M: CubeSystem>(m: &M, s: &Shell<M::Cube>) -> CubeResult<bool> {
    let f = shell_big_fold(m, s)?;
    Ok(f.n_face == f.p_face)
}

/// Enumerates every shell of dimension `n` whose faces are drawn from
/// `cubes`, the complete list of `(n − 1)`-cubes of a model.
pub fn all_shells<M: CubeSystem>(m: &M, n: usize, cubes: &[M::Cube]) -> CubeResult<Vec<Shell<M::Cube>>> {
    let search = ShellSearch::new(m, n, cubes)?;
    let mut out = Vec::new();
    search.run(&mut Vec::new(), &mut |faces| {
        out.push(Shell::from_faces_unchecked(faces.to_vec()));
        true
    })?;
    Ok(out)
}

/// Backtracking search over face families, indexed by the `(1,±)` faces
/// of the candidates.
pub(crate) struct ShellSearch<'a, M: CubeSystem> {
    m: &'a M,
    n: usize,
    cubes: &'a [M::Cube],
    by_first_faces: std::collections::HashMap<(M::Cube, M::Cube), Vec<usize>>,
}

impl<'a, M: CubeSystem> ShellSearch<'a, M> {
    pub(crate) fn new(m: &'a M, n: usize, cubes: &'a [M::Cube]) -> CubeResult<Self> {
        check::face(n, 1)?;
        let mut by_first_faces: std::collections::HashMap<_, Vec<usize>> = std::collections::HashMap::new();
        if n >= 2 {
            for (k, c) in cubes.iter().enumerate() {
                let key = (m.face(c, 1, Sign::Minus)?, m.face(c, 1, Sign::Plus)?);
                by_first_faces.entry(key).or_default().push(k);
            }
        }
        Ok(ShellSearch {
            m,
            n,
            cubes,
            by_first_faces,
        })
    }

    /// Candidate indices for the next slot given the faces chosen so far.
    pub(crate) fn candidates(&self, chosen: &[M::Cube]) -> CubeResult<Vec<usize>> {
        let k = chosen.len();
        let (i, alpha) = (k / 2 + 1, if k % 2 == 0 { Sign::Minus } else { Sign::Plus });
        if i == 1 {
            return Ok((0..self.cubes.len()).collect());
        }
        let m = self.m;
        let key = (
            m.face(&chosen[slot(1, Sign::Minus)], i - 1, alpha)?,
            m.face(&chosen[slot(1, Sign::Plus)], i - 1, alpha)?,
        );
        let Some(list) = self.by_first_faces.get(&key) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::with_capacity(list.len());
        'next: for &c in list {
            for j in 2..i {
                for beta in Sign::BOTH {
                    if m.face(&self.cubes[c], j, beta)? != m.face(&chosen[slot(j, beta)], i - 1, alpha)? {
                        continue 'next;
                    }
                }
            }
            out.push(c);
        }
        Ok(out)
    }

    /// Depth-first search; `visit` returns `false` to stop.
    pub(crate) fn run(
        &self,
        chosen: &mut Vec<M::Cube>,
        visit: &mut dyn FnMut(&[M::Cube]) -> bool,
    ) -> CubeResult<bool> {
        if chosen.len() == 2 * self.n {
            return Ok(visit(chosen));
        }
        for c in self.candidates(chosen)? {
            chosen.push(self.cubes[c].clone());
            let go_on = self.run(chosen, visit)?;
            chosen.pop();
            if !go_on {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn cubes(&self) -> &'a [M::Cube] {
        self.cubes
    }
}
