//! Enumerated cube catalogues with face indexes, and seeded sampling of
//! cubes with prescribed faces.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{FiniteModel, ModelError};
use crate::cube::Sign;
use crate::shell::{slot, Shell, ShellSearch};

type FaceIndex<C> = HashMap<(usize, Sign, C), Vec<usize>>;

/// A face constraint `∂ᵅᵢx = c`.
pub type FixedFace<C> = (usize, Sign, C);

/// Every cube of a model up to the highest dimension it will enumerate.
pub struct Catalog<'a, M: FiniteModel> {
    model: &'a M,
    levels: Vec<Vec<M::Cube>>,
    index: Vec<FaceIndex<M::Cube>>,
}

/// Node budget for one randomized shell search.
const SEARCH_BUDGET: usize = 20_000;

impl<'a, M: FiniteModel> Catalog<'a, M> {
    /// Enumerates dimensions `0..=up_to`, stopping early at the model's cap.
    pub fn new(model: &'a M, up_to: usize) -> Result<Catalog<'a, M>, ModelError> {
        let mut levels = Vec::new();
        let mut index = Vec::new();
        for n in 0..=up_to.min(model.max_dim()) {
            let cubes = match model.enumerate(n) {
                Ok(c) => c,
                Err(ModelError::DimensionTooLarge { .. }) if n > 0 => break,
                Err(e) => return Err(e),
            };
            let mut idx: FaceIndex<M::Cube> = HashMap::new();
            for (k, x) in cubes.iter().enumerate() {
                for i in 1..=n {
                    for sign in Sign::BOTH {
                        idx.entry((i, sign, model.face(x, i, sign)?)).or_default().push(k);
                    }
                }
            }
            levels.push(cubes);
            index.push(idx);
        }
        Ok(Catalog {
            model,
            levels,
            index,
        })
    }

    pub fn model(&self) -> &'a M {
        self.model
    }

    /// Highest enumerated dimension.
    pub fn enumerated_dim(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn cubes(&self, n: usize) -> Option<&[M::Cube]> {
        self.levels.get(n).map(Vec::as_slice)
    }

    /// Indices of the enumerated `n`-cubes with `∂ᵅᵢx = face`.
    pub fn with_face(&self, n: usize, i: usize, sign: Sign, face: &M::Cube) -> &[usize] {
        self.index
            .get(n)
            .and_then(|idx| idx.get(&(i, sign, face.clone())))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Enumerated `n`-cubes meeting every constraint.
    pub fn matching(&self, n: usize, fixed: &[FixedFace<M::Cube>]) -> Vec<&M::Cube> {
        let Some(cubes) = self.cubes(n) else {
            return Vec::new();
        };
        let Some(((i0, s0, f0), rest)) = fixed.split_first() else {
            return cubes.iter().collect();
        };
        self.with_face(n, *i0, *s0, f0)
            .iter()
            .map(|&k| &cubes[k])
            .filter(|x| {
                rest.iter()
                    .all(|(i, s, f)| self.model.face(x, *i, *s).map(|g| &g == f).unwrap_or(false))
            })
            .collect()
    }

    /// A random `n`-cube meeting every constraint. Enumerated dimensions are
    /// sampled uniformly; the dimension just above the catalogue is reached
    /// by a randomized shell search followed by a random filler.
    pub fn random<R: Rng>(&self, n: usize, fixed: &[FixedFace<M::Cube>], rng: &mut R) -> Option<M::Cube> {
        if n <= self.enumerated_dim() {
            return self.matching(n, fixed).choose(rng).map(|x| (*x).clone());
        }
        if n != self.enumerated_dim() + 1 || n > self.model.max_dim() {
            return None;
        }
        for _ in 0..4 {
            if let Some(s) = self.random_shell(n, fixed, rng) {
                if let Some(x) = self.model.fillers(&s).choose(rng) {
                    return Some(x.clone());
                }
            }
        }
        None
    }

    /// A random `n`-shell over the enumerated `(n − 1)`-cubes.
    pub fn random_shell<R: Rng>(
        &self,
        n: usize,
        fixed: &[FixedFace<M::Cube>],
        rng: &mut R,
    ) -> Option<Shell<M::Cube>> {
        let below = self.cubes(n.checked_sub(1)?)?;
        let search = ShellSearch::new(self.model, n, below).ok()?;
        let mut pinned: Vec<Option<&M::Cube>> = vec![None; 2 * n];
        for (i, s, f) in fixed {
            pinned[slot(*i, *s)] = Some(f);
        }
        let mut chosen = Vec::with_capacity(2 * n);
        let mut budget = SEARCH_BUDGET;
        if self.random_extend(&search, &pinned, &mut chosen, &mut budget, rng) {
            Some(Shell::from_faces_unchecked(chosen))
        } else {
            None
        }
    }

    /// Incidence between a candidate for slot `k` and every pinned face.
    fn agrees_with_pinned(&self, k: usize, c: &M::Cube, pinned: &[Option<&M::Cube>]) -> bool {
        let m = self.model;
        let (j, beta) = (k / 2 + 1, if k % 2 == 0 { Sign::Minus } else { Sign::Plus });
        pinned.iter().enumerate().all(|(p, face)| {
            let Some(face) = face else { return true };
            let (i, alpha) = (p / 2 + 1, if p % 2 == 0 { Sign::Minus } else { Sign::Plus });
            let (lhs, rhs) = match j.cmp(&i) {
                std::cmp::Ordering::Equal => return true,
                std::cmp::Ordering::Less => (m.face(face, j, beta), m.face(c, i - 1, alpha)),
                std::cmp::Ordering::Greater => (m.face(c, i, alpha), m.face(face, j - 1, beta)),
            };
            matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
        })
    }

    fn random_extend<R: Rng>(
        &self,
        search: &ShellSearch<'_, M>,
        pinned: &[Option<&M::Cube>],
        chosen: &mut Vec<M::Cube>,
        budget: &mut usize,
        rng: &mut R,
    ) -> bool {
        if chosen.len() == pinned.len() {
            return true;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let Ok(mut candidates) = search.candidates(chosen) else {
            return false;
        };
        let below = search.cubes();
        let k = chosen.len();
        if let Some(p) = pinned[k] {
            candidates.retain(|&c| &below[c] == p);
        } else {
            candidates.retain(|&c| self.agrees_with_pinned(k, &below[c], pinned));
            candidates.shuffle(rng);
        }
        for c in candidates {
            chosen.push(below[c].clone());
            if self.random_extend(search, pinned, chosen, budget, rng) {
                return true;
            }
            chosen.pop();
            if *budget == 0 {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::CubeSystem;
    use crate::models::fincat::bundled;
    use crate::models::{shell_tower, Nerve};
    use crate::shell::boundary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn face_index_agrees_with_scan() {
        let n = Nerve::new(bundled::load("free-square").unwrap(), 3);
        let cat = Catalog::new(&n, 3).unwrap();
        for x in cat.cubes(2).unwrap() {
            let f = n.face(x, 2, Sign::Plus).unwrap();
            let scan = cat
                .cubes(2)
                .unwrap()
                .iter()
                .filter(|y| n.face(y, 1, Sign::Minus).unwrap() == f)
                .count();
            assert_eq!(cat.matching(2, &[(1, Sign::Minus, f)]).len(), scan);
        }
    }

    #[test]
    fn random_above_catalogue_respects_constraints() {
        let t = shell_tower(bundled::load("parallel-arrows").unwrap(), 1, 3);
        let cat = Catalog::new(&t, 3).unwrap();
        assert_eq!(cat.enumerated_dim(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = cat.random(4, &[], &mut rng).expect("a 4-element exists");
            assert_eq!(t.dim(&x), 4);
            let f = t.face(&x, 2, Sign::Plus).unwrap();
            let y = cat.random(4, &[(2, Sign::Minus, f.clone())], &mut rng).expect("a unit exists");
            assert_eq!(boundary(&t, &y).unwrap().face(2, Sign::Minus), &f);
        }
    }
}
