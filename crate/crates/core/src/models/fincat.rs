//! Finite categories given by explicit composition tables or as free
//! categories on finite acyclic graphs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Obj(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mor(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate name {0:?}")]
    Duplicate(String),
    #[error("unknown name {0:?}")]
    Unknown(String),
    #[error("object {0:?} has no identity morphism")]
    MissingIdentity(String),
    #[error("composite {g}∘{f} is missing from the table")]
    MissingComposite { g: String, f: String },
    #[error("graph is not acyclic (cycle through {0:?})")]
    Cyclic(String),
    #[error("category law violated ({law}) at ({h}, {g}, {f})")]
    CategoryLawViolation {
        law: &'static str,
        h: String,
        g: String,
        f: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: Obj,
    pub tgt: Obj,
}

/// A finite category: objects, morphisms and a total composition table on
/// composable pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCat {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<Mor>,
    // composition[g * |mor| + f] = g∘f when tgt f = src g
    composition: Vec<Option<Mor>>,
    homs: HashMap<(Obj, Obj), Vec<Mor>>,
    outgoing: Vec<Vec<Mor>>,
}

#[derive(Deserialize)]
struct MorphismDoc {
    name: String,
    src: String,
    tgt: String,
}

#[derive(Deserialize)]
struct ExplicitDoc {
    #[serde(default)]
    name: Option<String>,
    objects: Vec<String>,
    morphisms: Vec<MorphismDoc>,
    identities: BTreeMap<String, String>,
    #[serde(default)]
    compose: Vec<[String; 3]>,
}

#[derive(Deserialize)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<MorphismDoc>,
}

#[derive(Deserialize)]
struct FreeDoc {
    #[serde(default)]
    name: Option<String>,
    graph: GraphDoc,
}

impl FinCat {
    /// Parses a category document: either an explicit presentation or a
    /// `{"graph": ...}` document closed under path composition.
    pub fn from_json_str(text: &str) -> Result<FinCat, CatError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CatError::Parse(e.to_string()))?;
        FinCat::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<FinCat, CatError> {
        if value.get("graph").is_some() {
            let doc: FreeDoc =
                serde_json::from_value(value.clone()).map_err(|e| CatError::Parse(e.to_string()))?;
            let edges = doc
                .graph
                .edges
                .iter()
                .map(|e| (e.name.as_str(), e.src.as_str(), e.tgt.as_str()))
                .collect::<Vec<_>>();
            let vertices = doc.graph.vertices.iter().map(String::as_str).collect::<Vec<_>>();
            FinCat::free(doc.name.as_deref().unwrap_or("free"), &vertices, &edges)
        } else {
            let doc: ExplicitDoc =
                serde_json::from_value(value.clone()).map_err(|e| CatError::Parse(e.to_string()))?;
            FinCat::explicit(doc)
        }
    }

    fn explicit(doc: ExplicitDoc) -> Result<FinCat, CatError> {
        let objects = doc.objects;
        let obj_index = index_names(&objects)?;
        let mut morphisms = Vec::with_capacity(doc.morphisms.len());
        for m in &doc.morphisms {
            morphisms.push(Morphism {
                name: m.name.clone(),
                src: lookup(&obj_index, &m.src).map(|k| Obj(k as u32))?,
                tgt: lookup(&obj_index, &m.tgt).map(|k| Obj(k as u32))?,
            });
        }
        let mor_index = index_names(&morphisms.iter().map(|m| m.name.clone()).collect::<Vec<_>>())?;
        let mut identities = Vec::with_capacity(objects.len());
        for (k, obj) in objects.iter().enumerate() {
            let id_name = doc
                .identities
                .get(obj)
                .ok_or_else(|| CatError::MissingIdentity(obj.clone()))?;
            let id = lookup(&mor_index, id_name)?;
            let m = &morphisms[id];
            if m.src.0 as usize != k || m.tgt.0 as usize != k {
                return Err(CatError::CategoryLawViolation {
                    law: "identity endpoints",
                    h: id_name.clone(),
                    g: obj.clone(),
                    f: obj.clone(),
                });
            }
            identities.push(Mor(id as u32));
        }
        let count = morphisms.len();
        let mut composition = vec![None; count * count];
        for [g, f, gf] in &doc.compose {
            let (gi, fi, hi) = (
                lookup(&mor_index, g)?,
                lookup(&mor_index, f)?,
                lookup(&mor_index, gf)?,
            );
            let (gm, fm, hm) = (&morphisms[gi], &morphisms[fi], &morphisms[hi]);
            if fm.tgt != gm.src || hm.src != fm.src || hm.tgt != gm.tgt {
                return Err(CatError::CategoryLawViolation {
                    law: "composite endpoints",
                    h: gf.clone(),
                    g: g.clone(),
                    f: f.clone(),
                });
            }
            let slot = &mut composition[gi * count + fi];
            if slot.is_some_and(|h: Mor| h.0 as usize != hi) {
                return Err(CatError::CategoryLawViolation {
                    law: "composite listed twice",
                    h: gf.clone(),
                    g: g.clone(),
                    f: f.clone(),
                });
            }
            *slot = Some(Mor(hi as u32));
        }
        // Unit composites may be omitted from documents.
        for (k, m) in morphisms.iter().enumerate() {
            let id_src = identities[m.src.0 as usize].0 as usize;
            let id_tgt = identities[m.tgt.0 as usize].0 as usize;
            composition[k * count + id_src].get_or_insert(Mor(k as u32));
            composition[id_tgt * count + k].get_or_insert(Mor(k as u32));
        }
        let cat = FinCat::assemble(
            doc.name.unwrap_or_else(|| "explicit".to_string()),
            objects,
            morphisms,
            identities,
            composition,
        );
        cat.validate()?;
        Ok(cat)
    }

    /// The free category on a finite acyclic graph.
    pub fn free(name: &str, vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<FinCat, CatError> {
        let objects: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
        let obj_index = index_names(&objects)?;
        let mut gens = Vec::new();
        for (name, src, tgt) in edges {
            gens.push((name.to_string(), lookup(&obj_index, src)?, lookup(&obj_index, tgt)?));
        }
        index_names(&gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>())?;
        check_acyclic(&objects, &gens)?;

        // Paths as generator sequences in application order.
        let mut paths: Vec<(usize, usize, Vec<usize>)> =
            (0..objects.len()).map(|o| (o, o, Vec::new())).collect();
        let mut frontier: Vec<usize> = Vec::new();
        for (k, (_, s, t)) in gens.iter().enumerate() {
            paths.push((*s, *t, vec![k]));
            frontier.push(paths.len() - 1);
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in frontier {
                let (s, t, seq) = paths[p].clone();
                for (k, (_, gs, gt)) in gens.iter().enumerate() {
                    if *gs == t {
                        let mut longer = seq.clone();
                        longer.push(k);
                        paths.push((s, *gt, longer));
                        next.push(paths.len() - 1);
                    }
                }
            }
            frontier = next;
        }

        let juxtapose = gens.iter().all(|g| g.0.chars().count() == 1);
        let path_name = |seq: &[usize]| -> String {
            let names: Vec<&str> = seq.iter().rev().map(|&k| gens[k].0.as_str()).collect();
            names.join(if juxtapose { "" } else { "." })
        };
        let morphisms: Vec<Morphism> = paths
            .iter()
            .map(|(s, t, seq)| Morphism {
                name: if seq.is_empty() {
                    format!("id_{}", objects[*s])
                } else {
                    path_name(seq)
                },
                src: Obj(*s as u32),
                tgt: Obj(*t as u32),
            })
            .collect();
        index_names(&morphisms.iter().map(|m| m.name.clone()).collect::<Vec<_>>())?;
        let by_seq: HashMap<(usize, Vec<usize>), usize> = paths
            .iter()
            .enumerate()
            .map(|(k, (s, _, seq))| ((*s, seq.clone()), k))
            .collect();
        let count = paths.len();
        let mut composition = vec![None; count * count];
        for (gi, (gs, _, gseq)) in paths.iter().enumerate() {
            for (fi, (fs, ft, fseq)) in paths.iter().enumerate() {
                if ft != gs {
                    continue;
                }
                let mut seq = fseq.clone();
                seq.extend_from_slice(gseq);
                composition[gi * count + fi] = Some(Mor(by_seq[&(*fs, seq)] as u32));
            }
        }
        let identities = (0..objects.len()).map(|o| Mor(o as u32)).collect();
        let cat = FinCat::assemble(name.to_string(), objects, morphisms, identities, composition);
        cat.validate()?;
        Ok(cat)
    }

    fn assemble(
        name: String,
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<Mor>,
        composition: Vec<Option<Mor>>,
    ) -> FinCat {
        let mut homs: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
        let mut outgoing = vec![Vec::new(); objects.len()];
        for (k, m) in morphisms.iter().enumerate() {
            homs.entry((m.src, m.tgt)).or_default().push(Mor(k as u32));
            outgoing[m.src.0 as usize].push(Mor(k as u32));
        }
        FinCat {
            name,
            objects,
            morphisms,
            identities,
            composition,
            homs,
            outgoing,
        }
    }

    /// Checks closure, unit and associativity laws over the whole table.
    pub fn validate(&self) -> Result<(), CatError> {
        let n = self.morphisms.len();
        for g in 0..n {
            for f in 0..n {
                let (gm, fm) = (&self.morphisms[g], &self.morphisms[f]);
                let entry = self.composition[g * n + f];
                match (fm.tgt == gm.src, entry) {
                    (true, None) => {
                        return Err(CatError::MissingComposite {
                            g: gm.name.clone(),
                            f: fm.name.clone(),
                        })
                    }
                    (false, Some(h)) => {
                        return Err(CatError::CategoryLawViolation {
                            law: "composite of non-composable pair",
                            h: self.name_of(h).to_string(),
                            g: gm.name.clone(),
                            f: fm.name.clone(),
                        })
                    }
                    _ => {}
                }
            }
        }
        for (k, m) in self.morphisms.iter().enumerate() {
            let mor = Mor(k as u32);
            let left = self.compose(self.identity(m.tgt), mor);
            let right = self.compose(mor, self.identity(m.src));
            if left != Some(mor) || right != Some(mor) {
                return Err(CatError::CategoryLawViolation {
                    law: "unit",
                    h: m.name.clone(),
                    g: m.name.clone(),
                    f: m.name.clone(),
                });
            }
        }
        for f in 0..n {
            let fm = Mor(f as u32);
            for &g in &self.outgoing[self.morphisms[f].tgt.0 as usize] {
                let gf = self.compose(g, fm).expect("closed table");
                for &h in &self.outgoing[self.target(g).0 as usize] {
                    let hg = self.compose(h, g).expect("closed table");
                    if self.compose(h, gf) != self.compose(hg, fm) {
                        return Err(CatError::CategoryLawViolation {
                            law: "associativity",
                            h: self.name_of(h).to_string(),
                            g: self.name_of(g).to_string(),
                            f: self.name_of(fm).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> + '_ {
        (0..self.objects.len() as u32).map(Obj)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = Mor> + '_ {
        (0..self.morphisms.len() as u32).map(Mor)
    }

    pub fn source(&self, m: Mor) -> Obj {
        self.morphisms[m.0 as usize].src
    }

    pub fn target(&self, m: Mor) -> Obj {
        self.morphisms[m.0 as usize].tgt
    }

    pub fn identity(&self, o: Obj) -> Mor {
        self.identities[o.0 as usize]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        let src = self.source(m);
        src == self.target(m) && self.identity(src) == m
    }

    /// `g ∘ f` (apply `f` first), when `tgt f = src g`.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        self.composition[g.0 as usize * self.morphisms.len() + f.0 as usize]
    }

    pub fn hom(&self, src: Obj, tgt: Obj) -> &[Mor] {
        self.homs.get(&(src, tgt)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn outgoing(&self, src: Obj) -> &[Mor] {
        &self.outgoing[src.0 as usize]
    }

    pub fn name_of(&self, m: Mor) -> &str {
        &self.morphisms[m.0 as usize].name
    }

    pub fn object_name(&self, o: Obj) -> &str {
        &self.objects[o.0 as usize]
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<Mor> {
        self.morphisms
            .iter()
            .position(|m| m.name == name)
            .map(|k| Mor(k as u32))
    }

    pub fn object_by_name(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name).map(|k| Obj(k as u32))
    }
}

impl fmt::Display for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} objects, {} morphisms)",
            self.name,
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>, CatError> {
    let mut index = HashMap::with_capacity(names.len());
    for (k, n) in names.iter().enumerate() {
        if index.insert(n.clone(), k).is_some() {
            return Err(CatError::Duplicate(n.clone()));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<String, usize>, name: &str) -> Result<usize, CatError> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| CatError::Unknown(name.to_string()))
}

fn check_acyclic(objects: &[String], gens: &[(String, usize, usize)]) -> Result<(), CatError> {
    // Kahn's algorithm.
    let mut indegree = vec![0usize; objects.len()];
    for (_, _, t) in gens {
        indegree[*t] += 1;
    }
    let mut ready: Vec<usize> = (0..objects.len()).filter(|&o| indegree[o] == 0).collect();
    let mut seen = 0;
    while let Some(o) = ready.pop() {
        seen += 1;
        for (_, s, t) in gens {
            if *s == o {
                indegree[*t] -= 1;
                if indegree[*t] == 0 {
                    ready.push(*t);
                }
            }
        }
    }
    match (0..objects.len()).find(|&o| indegree[o] > 0) {
        Some(o) if seen < objects.len() => Err(CatError::Cyclic(objects[o].clone())),
        _ => Ok(()),
    }
}

/// The categories shipped with the crate.
pub mod bundled {
    use super::FinCat;

    pub const TERMINAL: &str = include_str!("../../data/terminal.json");
    pub const POSET_2X2: &str = include_str!("../../data/poset2x2.json");
    pub const FREE_SQUARE: &str = include_str!("../../data/free_square.json");
    pub const PARALLEL_ARROWS: &str = include_str!("../../data/parallel_arrows.json");

    pub const NAMES: [&str; 4] = ["terminal", "poset2x2", "free-square", "parallel-arrows"];

    pub fn document(name: &str) -> Option<&'static str> {
        match name {
            "terminal" => Some(TERMINAL),
            "poset2x2" => Some(POSET_2X2),
            "free-square" => Some(FREE_SQUARE),
            "parallel-arrows" => Some(PARALLEL_ARROWS),
            _ => None,
        }
    }

    pub fn load(name: &str) -> Option<FinCat> {
        document(name).map(|doc| FinCat::from_json_str(doc).expect("bundled category is valid"))
    }

    pub fn all() -> Vec<FinCat> {
        NAMES.iter().map(|n| load(n).expect("bundled name")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts paths in an acyclic graph by explicit DFS from every vertex,
    /// including the empty path at each vertex.
    fn count_paths(vertices: usize, edges: &[(usize, usize)]) -> usize {
        fn walk(v: usize, edges: &[(usize, usize)]) -> usize {
            1 + edges
                .iter()
                .filter(|(s, _)| *s == v)
                .map(|(_, t)| walk(*t, edges))
                .sum::<usize>()
        }
        (0..vertices).map(|v| walk(v, edges)).sum()
    }

    #[test]
    fn poset_counts() {
        let cat = bundled::load("poset2x2").unwrap();
        assert_eq!(cat.object_count(), 4);
        // Order relations p ≤ q in {0,1}²: 4 + 2 + 2 + 1.
        let relations = (0..4u32)
            .flat_map(|p| (0..4u32).map(move |q| (p, q)))
            .filter(|(p, q)| p & q == *p)
            .count();
        assert_eq!(relations, 9);
        assert_eq!(cat.morphism_count(), relations);
        let identities = cat.morphisms().filter(|&m| cat.is_identity(m)).count();
        assert_eq!(identities, 4);
    }

    #[test]
    fn free_square_counts() {
        let cat = bundled::load("free-square").unwrap();
        let oracle = count_paths(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]);
        assert_eq!(oracle, 10);
        assert_eq!(cat.morphism_count(), oracle);
        let gf = cat.morphism_by_name("gf").unwrap();
        let kh = cat.morphism_by_name("kh").unwrap();
        assert_ne!(gf, kh);
        let a = cat.object_by_name("A").unwrap();
        let d = cat.object_by_name("D").unwrap();
        assert_eq!(cat.hom(a, d).len(), 2);
    }

    #[test]
    fn parallel_and_terminal() {
        let par = bundled::load("parallel-arrows").unwrap();
        assert_eq!(par.morphism_count(), 4);
        let term = bundled::load("terminal").unwrap();
        assert_eq!((term.object_count(), term.morphism_count()), (1, 1));
    }

    #[test]
    fn broken_associativity_rejected() {
        // b∘(a∘b) = b∘b = a but (b∘a)∘b = a∘b = b.
        let doc = r#"{
            "objects": ["X"],
            "morphisms": [
                {"name": "1", "src": "X", "tgt": "X"},
                {"name": "a", "src": "X", "tgt": "X"},
                {"name": "b", "src": "X", "tgt": "X"}
            ],
            "identities": {"X": "1"},
            "compose": [
                ["a", "a", "a"], ["a", "b", "b"], ["b", "a", "a"], ["b", "b", "a"]
            ]
        }"#;
        let err = FinCat::from_json_str(doc).unwrap_err();
        assert!(matches!(err, CatError::CategoryLawViolation { law: "associativity", .. }), "{err}");
    }

    #[test]
    fn missing_composite_and_cycles() {
        let doc = r#"{
            "objects": ["A", "B", "C"],
            "morphisms": [
                {"name": "1A", "src": "A", "tgt": "A"},
                {"name": "1B", "src": "B", "tgt": "B"},
                {"name": "1C", "src": "C", "tgt": "C"},
                {"name": "f", "src": "A", "tgt": "B"},
                {"name": "g", "src": "B", "tgt": "C"}
            ],
            "identities": {"A": "1A", "B": "1B", "C": "1C"}
        }"#;
        assert!(matches!(
            FinCat::from_json_str(doc),
            Err(CatError::MissingComposite { .. })
        ));
        let cyclic = r#"{"graph": {"vertices": ["A", "B"], "edges": [
            {"name": "f", "src": "A", "tgt": "B"}, {"name": "g", "src": "B", "tgt": "A"}]}}"#;
        assert!(matches!(FinCat::from_json_str(cyclic), Err(CatError::Cyclic(_))));
        assert!(matches!(FinCat::from_json_str("{"), Err(CatError::Parse(_))));
    }
}
