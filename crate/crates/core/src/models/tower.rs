//! The shell tower: a nerve truncated at `base_dim` with `height` shell
//! dimensions stacked on top.

use serde_json::{json, Value};

use super::fincat::FinCat;
use super::nerve::{Nerve, DEFAULT_ENUMERATION_CAP};
use super::{FiniteModel, ModelError};
use crate::cube::CubeSystem;
use crate::shell::{all_shells, Cell, Shell, ShellSystem};

pub type Tower = ShellSystem<Nerve>;

/// The tower over the nerve of `cat`, with cubes up to `base_dim` taken
/// from the nerve and shells in dimensions `base_dim + 1 ..= base_dim + height`.
pub fn shell_tower(cat: FinCat, base_dim: usize, height: usize) -> Tower {
    assert!(height >= 1, "a shell tower needs at least one shell level");
    ShellSystem::over(Nerve::new(cat, base_dim), base_dim, height)
        .with_enumeration_cap(DEFAULT_ENUMERATION_CAP - 1)
}

impl<M: FiniteModel> FiniteModel for ShellSystem<M> {
    fn enumerate(&self, n: usize) -> Result<Vec<Self::Cube>, ModelError> {
        let cap = self.enumeration_cap().min(self.max_dim());
        if n > cap {
            return Err(ModelError::DimensionTooLarge { dim: n, cap });
        }
        if n <= self.base_dim() {
            return Ok(self.base().enumerate(n)?.into_iter().map(Cell::Base).collect());
        }
        let below = self.enumerate(n - 1)?;
        Ok(all_shells(self, n, &below)?.into_iter().map(|s| self.intern(s)).collect())
    }

    fn fillers(&self, shell: &Shell<Self::Cube>) -> Vec<Self::Cube> {
        let n = shell.dim();
        if n > self.max_dim() {
            return Vec::new();
        }
        if n <= self.base_dim() {
            return match shell.try_map(|c| c.as_base().cloned().ok_or(())) {
                Ok(s) => self.base().fillers(&s).into_iter().map(Cell::Base).collect(),
                Err(()) => Vec::new(),
            };
        }
        if shell.validate(self).is_ok() {
            vec![self.intern(shell.clone())]
        } else {
            Vec::new()
        }
    }

    fn encode(&self, x: &Self::Cube) -> Value {
        match x {
            Cell::Base(c) => json!({ "base": self.base().encode(c) }),
            Cell::Shell(_) => {
                let s = self.shell(x).expect("shell element");
                json!({ "shell": s.faces().iter().map(|c| self.encode(c)).collect::<Vec<_>>() })
            }
        }
    }

    fn decode(&self, value: &Value) -> Result<Self::Cube, ModelError> {
        if let Some(inner) = value.get("base") {
            let c = self.base().decode(inner)?;
            if self.base().dim(&c) > self.base_dim() {
                return Err(ModelError::InvalidCube(format!(
                    "base cubes have dimension at most {}",
                    self.base_dim()
                )));
            }
            return Ok(Cell::Base(c));
        }
        let faces = value
            .get("shell")
            .and_then(Value::as_array)
            .ok_or_else(|| ModelError::Parse("tower element needs \"base\" or \"shell\"".to_string()))?
            .iter()
            .map(|v| self.decode(v))
            .collect::<Result<Vec<_>, _>>()?;
        let shell = Shell::new(self, faces).map_err(|e| ModelError::InvalidCube(e.to_string()))?;
        if shell.dim() <= self.base_dim() || shell.dim() > self.max_dim() {
            return Err(ModelError::InvalidCube(format!(
                "shell elements have dimension {}..={}, got {}",
                self.base_dim() + 1,
                self.max_dim(),
                shell.dim()
            )));
        }
        Ok(self.intern(shell))
    }

    fn label(&self, x: &Self::Cube) -> String {
        match x {
            Cell::Base(c) => self.base().label(c),
            Cell::Shell(_) => {
                let s = self.shell(x).expect("shell element");
                let parts: Vec<String> = (1..=s.dim())
                    .map(|i| {
                        format!(
                            "{} {}",
                            self.label(s.face(i, crate::cube::Sign::Minus)),
                            self.label(s.face(i, crate::cube::Sign::Plus))
                        )
                    })
                    .collect();
                format!("⟨{}⟩", parts.join(" | "))
            }
        }
    }
}
