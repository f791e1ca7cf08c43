//! A deliberately faulty model: degeneracy indices are reversed, so
//! `εᵢ` acts as `εₙ₊₂₋ᵢ` on an `n`-cube. Used as a negative control.

use serde_json::Value;

use super::{FiniteModel, ModelError};
use crate::cube::{check, CubeResult, CubeSystem, Sign};
use crate::shell::Shell;

#[derive(Debug, Clone)]
pub struct Broken<M> {
    inner: M,
}

impl<M> Broken<M> {
    pub fn new(inner: M) -> Broken<M> {
        Broken { inner }
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: CubeSystem> CubeSystem for Broken<M> {
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
        let n = self.inner.dim(x);
        check::degeneracy(n, i, self.max_dim())?;
        self.inner.degeneracy(x, n + 2 - i)
    }

    fn connection(&self, x: &Self::Cube, i: usize, sign: Sign) -> CubeResult<Self::Cube> {
        self.inner.connection(x, i, sign)
    }

    fn compose(&self, x: &Self::Cube, y: &Self::Cube, i: usize) -> CubeResult<Self::Cube> {
        self.inner.compose(x, y, i)
    }
}

impl<M: FiniteModel> FiniteModel for Broken<M> {
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
