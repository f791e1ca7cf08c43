//! The cubical nerve of a finite category.
//!
//! An `n`-cube is a functor `{0,1}ⁿ → C`, stored as its vertex objects and
//! the morphisms on the `n·2ⁿ⁻¹` lattice edges. Faces restrict a coordinate,
//! degeneracies forget one, and connections precompose with `min` (`Γ⁺`) or
//! `max` (`Γ⁻`) on a pair of adjacent coordinates. Vertex masks use bit
//! `k - 1` for coordinate `tₖ`.

use std::sync::Arc;

use serde_json::{json, Value};
use smallvec::{smallvec, SmallVec};

use super::fincat::{FinCat, Mor, Obj};
use super::{FiniteModel, ModelError};
use crate::cube::{check, require_composable, CubeError, CubeResult, CubeSystem, Sign};
use crate::shell::Shell;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NerveCube {
    dim: usize,
    vertices: SmallVec<[Obj; 8]>,
    // edges[d * 2^(n-1) + compress(w, d)]: edge from w to w | 1<<d
    edges: SmallVec<[Mor; 12]>,
}

fn compress(w: usize, d: usize) -> usize {
    ((w >> (d + 1)) << d) | (w & ((1 << d) - 1))
}

fn insert_bit(w: usize, d: usize, bit: usize) -> usize {
    ((w >> d) << (d + 1)) | (bit << d) | (w & ((1 << d) - 1))
}

fn remove_bit(w: usize, d: usize) -> usize {
    compress(w, d)
}

impl NerveCube {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex(&self, mask: usize) -> Obj {
        self.vertices[mask]
    }

    pub fn vertices(&self) -> &[Obj] {
        &self.vertices
    }

    /// The morphism on the edge leaving `w` in coordinate `d` (0-based).
    pub fn edge(&self, d: usize, w: usize) -> Mor {
        debug_assert_eq!(w & (1 << d), 0);
        self.edges[(d << (self.dim - 1)) + compress(w, d)]
    }

    /// The composite morphism between lattice points `u ≤ v`.
    pub fn morphism_between(&self, cat: &FinCat, u: usize, v: usize) -> Mor {
        debug_assert_eq!(u & v, u);
        let mut current = u;
        let mut acc = cat.identity(self.vertices[u]);
        for d in 0..self.dim {
            if v & (1 << d) != 0 && current & (1 << d) == 0 {
                let e = self.edge(d, current);
                acc = cat.compose(e, acc).expect("cube edges compose");
                current |= 1 << d;
            }
        }
        acc
    }

    /// A 0-cube on an object.
    pub fn point(o: Obj) -> NerveCube {
        NerveCube {
            dim: 0,
            vertices: smallvec![o],
            edges: SmallVec::new(),
        }
    }

    /// A 1-cube on a morphism.
    pub fn arrow(cat: &FinCat, m: Mor) -> NerveCube {
        NerveCube {
            dim: 1,
            vertices: smallvec![cat.source(m), cat.target(m)],
            edges: smallvec![m],
        }
    }

    /// Builds a cube from its edge morphisms, listed per direction in order
    /// of the base vertex mask, checking endpoints and commuting squares.
    pub fn from_edges(cat: &FinCat, dim: usize, vertices: Vec<Obj>, edges: Vec<Mor>) -> Result<NerveCube, ModelError> {
        if vertices.len() != 1 << dim {
            return Err(ModelError::InvalidCube(format!(
                "a {dim}-cube has {} vertices, got {}",
                1 << dim,
                vertices.len()
            )));
        }
        let expected = if dim == 0 { 0 } else { dim << (dim - 1) };
        if edges.len() != expected {
            return Err(ModelError::InvalidCube(format!(
                "a {dim}-cube has {expected} edges, got {}",
                edges.len()
            )));
        }
        let cube = NerveCube {
            dim,
            vertices: vertices.into(),
            edges: edges.into(),
        };
        cube.validate(cat)?;
        Ok(cube)
    }

    fn validate(&self, cat: &FinCat) -> Result<(), ModelError> {
        for d in 0..self.dim {
            for w in (0..1usize << self.dim).filter(|w| w & (1 << d) == 0) {
                let m = self.edge(d, w);
                if cat.source(m) != self.vertices[w] || cat.target(m) != self.vertices[w | 1 << d] {
                    return Err(ModelError::InvalidCube(format!(
                        "edge {} in direction {} from vertex {w:b} has wrong endpoints",
                        cat.name_of(m),
                        d + 1
                    )));
                }
            }
        }
        for d in 0..self.dim {
            for e in d + 1..self.dim {
                for w in (0..1usize << self.dim).filter(|w| w & (1 << d | 1 << e) == 0) {
                    let first = cat.compose(self.edge(e, w | 1 << d), self.edge(d, w));
                    let second = cat.compose(self.edge(d, w | 1 << e), self.edge(e, w));
                    if first != second {
                        return Err(ModelError::InvalidCube(format!(
                            "square in directions {},{} at vertex {w:b} does not commute",
                            d + 1,
                            e + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Precomposition with a lattice map `{0,1}ᵐ → {0,1}ⁿ` that sends each
    /// edge to an edge or a vertex.
    fn pullback(&self, cat: &FinCat, m: usize, map: impl Fn(usize) -> usize) -> NerveCube {
        let vertices = (0..1usize << m).map(|t| self.vertices[map(t)]).collect();
        let mut edges = SmallVec::new();
        for d in 0..m {
            for c in 0..1usize << (m - 1) {
                let w = insert_bit(c, d, 0);
                let (u, v) = (map(w), map(w | 1 << d));
                if u == v {
                    edges.push(cat.identity(self.vertices[u]));
                } else {
                    let diff = u ^ v;
                    debug_assert!(diff.is_power_of_two() && u & diff == 0);
                    edges.push(self.edge(diff.trailing_zeros() as usize, u));
                }
            }
        }
        NerveCube {
            dim: m,
            vertices,
            edges,
        }
    }
}

/// The nerve of a finite category, truncated at `max_dim`.
#[derive(Debug, Clone)]
pub struct Nerve {
    cat: Arc<FinCat>,
    max_dim: usize,
    enumeration_cap: usize,
}

/// Dimension above which exhaustive enumeration is refused by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 4;

impl Nerve {
    pub fn new(cat: FinCat, max_dim: usize) -> Nerve {
        Nerve::shared(Arc::new(cat), max_dim)
    }

    pub fn shared(cat: Arc<FinCat>, max_dim: usize) -> Nerve {
        Nerve {
            cat,
            max_dim,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn with_enumeration_cap(mut self, cap: usize) -> Nerve {
        self.enumeration_cap = cap;
        self
    }

    pub fn category(&self) -> &FinCat {
        &self.cat
    }

    pub fn category_arc(&self) -> &Arc<FinCat> {
        &self.cat
    }

    pub fn point(&self, o: Obj) -> NerveCube {
        NerveCube::point(o)
    }

    pub fn arrow(&self, m: Mor) -> NerveCube {
        NerveCube::arrow(&self.cat, m)
    }

    pub fn arrow_named(&self, name: &str) -> Option<NerveCube> {
        self.cat.morphism_by_name(name).map(|m| self.arrow(m))
    }

    /// The square with edges `∂⁻₁ = left`, `∂⁺₁ = right`, `∂⁻₂ = bottom`,
    /// `∂⁺₂ = top` (direction 1 varies `t₁`), if it commutes.
    pub fn square(&self, bottom: Mor, top: Mor, left: Mor, right: Mor) -> Result<NerveCube, ModelError> {
        let cat = &self.cat;
        let vertices = vec![
            cat.source(bottom),
            cat.target(bottom),
            cat.target(left),
            cat.target(top),
        ];
        // direction 1 edges at w = 00, 10(bit 1); direction 2 edges at 00, 01
        NerveCube::from_edges(cat, 2, vertices, vec![bottom, top, left, right])
    }

    /// The composite of the morphism path from vertex `u` to `v`.
    pub fn path(&self, x: &NerveCube, u: usize, v: usize) -> Mor {
        x.morphism_between(&self.cat, u, v)
    }

    pub fn morphism_name(&self, m: Mor) -> &str {
        self.cat.name_of(m)
    }

    fn enumerate_functors(&self, n: usize) -> Vec<NerveCube> {
        let cat = &self.cat;
        let mut out = Vec::new();
        if n == 0 {
            return cat.objects().map(NerveCube::point).collect();
        }
        // Edge slots ordered by target vertex, so every square is complete
        // once the incoming edges of its top vertex are chosen.
        let slots: Vec<(usize, usize)> = (1..1usize << n)
            .flat_map(|v| (0..n).filter(move |d| v & (1 << d) != 0).map(move |d| (d, v & !(1 << d))))
            .collect();
        let mut vertices = vec![None; 1 << n];
        let mut edges = vec![Mor(0); n << (n - 1)];
        for o in cat.objects() {
            vertices[0] = Some(o);
            self.extend(n, &slots, 0, &mut vertices, &mut edges, &mut out);
        }
        out
    }

    fn extend(
        &self,
        n: usize,
        slots: &[(usize, usize)],
        k: usize,
        vertices: &mut Vec<Option<Obj>>,
        edges: &mut Vec<Mor>,
        out: &mut Vec<NerveCube>,
    ) {
        let cat = &self.cat;
        if k == slots.len() {
            out.push(NerveCube {
                dim: n,
                vertices: vertices.iter().map(|v| v.expect("all vertices set")).collect(),
                edges: edges.iter().copied().collect(),
            });
            return;
        }
        let (d, w) = slots[k];
        let v = w | 1 << d;
        let src = vertices[w].expect("source vertex precedes target");
        let first_incoming = (0..d).all(|e| v & (1 << e) == 0);
        let index = (d << (n - 1)) + compress(w, d);
        let candidates: Vec<Mor> = if first_incoming {
            cat.outgoing(src).to_vec()
        } else {
            cat.hom(src, vertices[v].expect("set by first incoming edge")).to_vec()
        };
        for m in candidates {
            edges[index] = m;
            if first_incoming {
                vertices[v] = Some(cat.target(m));
            }
            // Squares with top vertex v in directions (e, d), e < d.
            let commutes = (0..d).filter(|e| v & (1 << e) != 0).all(|e| {
                let base = v & !(1 << d) & !(1 << e);
                let via_d = cat.compose(m, edges[(e << (n - 1)) + compress(base, e)]);
                let via_e = cat.compose(
                    edges[(e << (n - 1)) + compress(v & !(1 << e), e)],
                    edges[(d << (n - 1)) + compress(base, d)],
                );
                via_d == via_e
            });
            if commutes {
                self.extend(n, slots, k + 1, vertices, edges, out);
            }
        }
        if first_incoming {
            vertices[v] = None;
        }
    }

    fn check_dim(&self, op: &'static str, dim: usize) -> CubeResult<()> {
        if dim > self.max_dim {
            Err(CubeError::DimensionTooLarge {
                op,
                dim,
                max: self.max_dim,
            })
        } else {
            Ok(())
        }
    }
}

impl CubeSystem for Nerve {
    type Cube = NerveCube;

    fn max_dim(&self) -> usize {
        self.max_dim
    }

    fn dim(&self, x: &NerveCube) -> usize {
        x.dim
    }

    fn face(&self, x: &NerveCube, i: usize, sign: Sign) -> CubeResult<NerveCube> {
        check::face(x.dim, i)?;
        let d = i - 1;
        Ok(x.pullback(&self.cat, x.dim - 1, |t| insert_bit(t, d, sign.bit())))
    }

    fn degeneracy(&self, x: &NerveCube, i: usize) -> CubeResult<NerveCube> {
        check::degeneracy(x.dim, i, self.max_dim)?;
        let d = i - 1;
        Ok(x.pullback(&self.cat, x.dim + 1, |t| remove_bit(t, d)))
    }

    fn connection(&self, x: &NerveCube, i: usize, sign: Sign) -> CubeResult<NerveCube> {
        check::connection(x.dim, i, self.max_dim)?;
        let d = i - 1;
        Ok(x.pullback(&self.cat, x.dim + 1, |t| {
            let (a, b) = ((t >> d) & 1, (t >> (d + 1)) & 1);
            let merged = match sign {
                Sign::Plus => a & b,
                Sign::Minus => a | b,
            };
            insert_bit(remove_bit(remove_bit(t, d + 1), d), d, merged)
        }))
    }

    fn compose(&self, x: &NerveCube, y: &NerveCube, i: usize) -> CubeResult<NerveCube> {
        require_composable(self, x, y, i)?;
        self.check_dim("compose", x.dim)?;
        let n = x.dim;
        let d = i - 1;
        let cat = &self.cat;
        let vertices = (0..1usize << n)
            .map(|t| if t & (1 << d) == 0 { x.vertices[t] } else { y.vertices[t] })
            .collect();
        let mut edges = SmallVec::new();
        for e in 0..n {
            for c in 0..1usize << (n - 1) {
                let w = insert_bit(c, e, 0);
                let m = if e == d {
                    cat.compose(y.edge(d, w), x.edge(d, w))
                        .expect("composable cubes have matching vertices")
                } else if w & (1 << d) == 0 {
                    x.edge(e, w)
                } else {
                    y.edge(e, w)
                };
                edges.push(m);
            }
        }
        Ok(NerveCube { dim: n, vertices, edges })
    }
}

impl FiniteModel for Nerve {
    fn enumerate(&self, n: usize) -> Result<Vec<NerveCube>, ModelError> {
        if n > self.enumeration_cap.min(self.max_dim) {
            return Err(ModelError::DimensionTooLarge {
                dim: n,
                cap: self.enumeration_cap.min(self.max_dim),
            });
        }
        Ok(self.enumerate_functors(n))
    }

    fn fillers(&self, shell: &Shell<NerveCube>) -> Vec<NerveCube> {
        let n = shell.dim();
        let cat = &self.cat;
        if n == 1 {
            let (src, tgt) = (shell.face(1, Sign::Minus), shell.face(1, Sign::Plus));
            return cat
                .hom(src.vertex(0), tgt.vertex(0))
                .iter()
                .map(|&m| self.arrow(m))
                .collect();
        }
        if n == 0 || n > self.max_dim {
            return Vec::new();
        }
        // Every vertex and edge lies on a face when n ≥ 2.
        let mut vertices = vec![None; 1 << n];
        let mut edges = vec![None; n << (n - 1)];
        for e in 0..n {
            for sign in Sign::BOTH {
                let f = shell.face(e + 1, sign);
                for t in 0..1usize << (n - 1) {
                    let v = insert_bit(t, e, sign.bit());
                    if vertices[v].get_or_insert(f.vertices[t]) != &f.vertices[t] {
                        return Vec::new();
                    }
                }
                for fd in 0..n - 1 {
                    let d = if fd < e { fd } else { fd + 1 };
                    for c in 0..1usize << (n - 2) {
                        let fw = insert_bit(c, fd, 0);
                        let w = insert_bit(fw, e, sign.bit());
                        let slot = &mut edges[(d << (n - 1)) + compress(w, d)];
                        let m = f.edge(fd, fw);
                        if slot.get_or_insert(m) != &m {
                            return Vec::new();
                        }
                    }
                }
            }
        }
        let vertices = vertices.into_iter().map(|v| v.expect("covered")).collect();
        let edges = edges.into_iter().map(|m| m.expect("covered")).collect();
        match NerveCube::from_edges(cat, n, vertices, edges) {
            Ok(x) => vec![x],
            Err(_) => Vec::new(),
        }
    }

    fn encode(&self, x: &NerveCube) -> Value {
        let cat = &self.cat;
        let per_direction: Vec<Vec<&str>> = (0..x.dim)
            .map(|d| {
                (0..1usize << (x.dim - 1))
                    .map(|c| cat.name_of(x.edge(d, insert_bit(c, d, 0))))
                    .collect()
            })
            .collect();
        json!({
            "dim": x.dim,
            "vertices": x.vertices.iter().map(|&o| cat.object_name(o)).collect::<Vec<_>>(),
            "edges": per_direction,
        })
    }

    fn decode(&self, value: &Value) -> Result<NerveCube, ModelError> {
        let cat = &self.cat;
        let bad = |msg: &str| ModelError::Parse(format!("nerve cube: {msg}"));
        let dim = value
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing \"dim\""))? as usize;
        if dim > self.max_dim {
            return Err(ModelError::DimensionTooLarge { dim, cap: self.max_dim });
        }
        let vertices: Vec<Obj> = value
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"vertices\""))?
            .iter()
            .map(|v| {
                v.as_str()
                    .and_then(|name| cat.object_by_name(name))
                    .ok_or_else(|| bad(&format!("unknown object {v}")))
            })
            .collect::<Result<_, _>>()?;
        let mut edges = Vec::new();
        if dim > 0 {
            let rows = value
                .get("edges")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing \"edges\""))?;
            if rows.len() != dim {
                return Err(bad("one edge list per direction expected"));
            }
            for row in rows {
                let row = row.as_array().ok_or_else(|| bad("edge list must be an array"))?;
                for m in row {
                    edges.push(
                        m.as_str()
                            .and_then(|name| cat.morphism_by_name(name))
                            .ok_or_else(|| bad(&format!("unknown morphism {m}")))?,
                    );
                }
            }
        }
        NerveCube::from_edges(cat, dim, vertices, edges)
    }

    fn label(&self, x: &NerveCube) -> String {
        let cat = &self.cat;
        match x.dim {
            0 => cat.object_name(x.vertices[0]).to_string(),
            1 => cat.name_of(x.edges[0]).to_string(),
            n => {
                let top = (1 << n) - 1;
                format!(
                    "[{}→{}]",
                    cat.object_name(x.vertices[0]),
                    cat.object_name(x.vertices[top])
                )
            }
        }
    }
}
