//! Single-cube commands: fold a cube, decompose a thin cube, draw the
//! arrays around a cube. Inputs and outputs are JSON documents in the
//! model's cube encoding.

use serde_json::{json, Value};

use crate::array::{compose_array, compose_partition_checked, render_ascii, render_symbolic, Assoc, Axis, Plan, Rect};
use crate::cube::Sign;
use crate::expr::sub;
use crate::fillers::{array_a, array_a_grid, psi_refinement, psi_row, psi_row_grid, thin_decompose, unfold_partition, FillerError};
use crate::folding::{big_psi, is_thin, psi};
use crate::models::{shell_tower, Broken, FiniteModel, Nerve};
use crate::shell::boundary;
use crate::verify::{with_model, Family, SuiteConfig, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagram {
    /// `[Γ⁺, x, Γ⁻]`, composing to `ψⱼx`.
    Psi,
    /// The 3×3 array around `x`, composing to `x`.
    Array,
    /// `x` rebuilt from `ψⱼx` and `∂x`.
    Unfold,
    /// `ψⱼx` as a 3×4 partition, composing to `ψⱼx`.
    Refinement,
}

impl Diagram {
    pub const ALL: [Diagram; 4] = [Diagram::Psi, Diagram::Array, Diagram::Unfold, Diagram::Refinement];

    pub fn parse(s: &str) -> Option<Diagram> {
        Diagram::ALL.into_iter().find(|d| d.name() == s)
    }

    pub fn name(self) -> &'static str {
        match self {
            Diagram::Psi => "psi",
            Diagram::Array => "array",
            Diagram::Unfold => "unfold",
            Diagram::Refinement => "refinement",
        }
    }
}

/// The cube inside a document: either the bare encoding or `{"cube": …}`.
pub fn cube_of(doc: &Value) -> &Value {
    doc.get("cube").unwrap_or(doc)
}

pub fn fold_document(config: &SuiteConfig, doc: &Value) -> Result<Value, VerifyError> {
    config.validate()?;
    with_model!(config, |m| fold_on(&m, cube_of(doc)))
}

/// The decomposition document and, when asked for, a drawing of its
/// outermost unfolding.
pub fn decompose_document(config: &SuiteConfig, doc: &Value, render: bool) -> Result<(Value, Option<String>), VerifyError> {
    config.validate()?;
    with_model!(config, |m| decompose_on(&m, cube_of(doc), render))
}

pub fn render_document(config: &SuiteConfig, doc: &Value, diagram: Diagram, dir: usize) -> Result<String, VerifyError> {
    config.validate()?;
    with_model!(config, |m| render_on(&m, cube_of(doc), diagram, dir))
}

fn input_error(e: impl std::fmt::Display) -> VerifyError {
    VerifyError::Input(e.to_string())
}

fn described<M: FiniteModel>(m: &M, x: &M::Cube) -> Value {
    json!({"cube": m.encode(x), "label": m.label(x)})
}

fn fold_on<M: FiniteModel>(m: &M, v: &Value) -> Result<Value, VerifyError> {
    let x = m.decode(v)?;
    let n = m.dim(&x);
    if n == 0 {
        return Err(VerifyError::Input("folding needs a cube of dimension at least 1".to_string()));
    }
    let r = big_psi(m, &x).map_err(input_error)?;
    let thin = is_thin(m, &x).map_err(input_error)?;
    Ok(json!({
        "input": described(m, &x),
        "dim": n,
        "folded": described(m, &r.folded),
        "n": described(m, &r.n_face),
        "p": described(m, &r.p_face),
        "n_equals_p": r.n_face == r.p_face,
        "thin": thin,
        "steps": r.trace.iter().map(|(i, c)| json!({"psi": i, "cube": m.encode(c), "label": m.label(c)})).collect::<Vec<_>>(),
    }))
}

fn decompose_on<M: FiniteModel>(m: &M, v: &Value, render: bool) -> Result<(Value, Option<String>), VerifyError> {
    let x = m.decode(v)?;
    let expr = match thin_decompose(m, &x) {
        Ok(e) => e,
        Err(FillerError::NotThin) => return Err(VerifyError::NotThin),
        Err(e) => return Err(input_error(e)),
    };
    let doc = json!({
        "input": described(m, &x),
        "expression": expr.to_json_in(m),
        "pretty": expr.pretty(&|c| m.label(c)),
        "leaves": expr.leaf_count(),
        "depth": expr.depth(),
        "base_free": expr.is_base_free(),
    });
    let n = m.dim(&x);
    let drawing = if render && n >= 2 { Some(render_on(m, v, Diagram::Unfold, n - 1)?) } else { None };
    Ok((doc, drawing))
}

fn sup(sign: Sign) -> &'static str {
    match sign {
        Sign::Minus => "⁻",
        Sign::Plus => "⁺",
    }
}

/// `sᵅₖ`
fn face(sign: Sign, k: usize) -> String {
    format!("s{}{}", sup(sign), sub(k))
}

fn eps(j: usize, sign: Sign, k: usize) -> String {
    format!("ε{}{}", sub(j), face(sign, k))
}

fn gamma(j: usize, alpha: Sign, sign: Sign, k: usize) -> String {
    format!("Γ{}{}{}", sup(alpha), sub(j), face(sign, k))
}

/// Labels of the unfolding partition, in the builder's cell order.
fn unfold_labels(j: usize) -> Vec<String> {
    use Sign::*;
    vec![
        eps(j, Minus, j),
        gamma(j, Plus, Plus, j + 1),
        format!("ψ{}x", sub(j)),
        gamma(j, Minus, Minus, j + 1),
        eps(j, Plus, j),
    ]
}

/// Labels of the refinement, in the builder's cell order.
fn refinement_labels(j: usize) -> Vec<String> {
    use Sign::*;
    let square = "□".to_string();
    vec![
        square.clone(),
        eps(j, Minus, j),
        gamma(j, Plus, Plus, j + 1),
        gamma(j, Minus, Plus, j + 1),
        square.clone(),
        format!("ψ{}x", sub(j)),
        square.clone(),
        gamma(j, Plus, Minus, j + 1),
        gamma(j, Minus, Minus, j + 1),
        eps(j, Plus, j),
        square,
    ]
}

fn labelled(rects: Vec<Rect>, labels: Vec<String>) -> Vec<(Rect, String)> {
    rects.into_iter().zip(labels).collect()
}

fn render_on<M: FiniteModel>(m: &M, v: &Value, diagram: Diagram, j: usize) -> Result<String, VerifyError> {
    let x = m.decode(v)?;
    let n = m.dim(&x);
    if n < 2 || j == 0 || j >= n {
        return Err(VerifyError::Input(format!("direction {j} needs 1 ≤ j < dim = {n}")));
    }
    let psi_x = psi(m, &x, j).map_err(input_error)?;
    let s = boundary(m, &x).map_err(input_error)?;
    let mismatch = |what: &str| VerifyError::Input(format!("{what} does not compose to the expected cube"));
    let (drawing, composite) = match diagram {
        Diagram::Psi => {
            let a = psi_row(m, &x, j).map_err(input_error)?;
            if compose_array(m, &a).map_err(input_error)? != psi_x {
                return Err(mismatch("the ψ row"));
            }
            (render_symbolic(&psi_row_grid(&x), j + 1, j, |_| "x".to_string()), format!("ψ{}x", sub(j)))
        }
        Diagram::Array => {
            let a = array_a(m, &x, j).map_err(input_error)?;
            if compose_array(m, &a).map_err(input_error)? != x {
                return Err(mismatch("the array"));
            }
            (render_symbolic(&array_a_grid(&x), j + 1, j, |_| "x".to_string()), "x".to_string())
        }
        Diagram::Unfold => {
            let p = unfold_partition(m, &psi_x, &s, j).map_err(input_error)?;
            let alt = Plan::guillotine(&p.rects(), Axis::Vertical, Assoc::Right).map_err(input_error)?;
            if compose_partition_checked(m, &p, &alt).map_err(input_error)? != x {
                return Err(mismatch("the unfolding"));
            }
            (render_ascii(&labelled(p.rects(), unfold_labels(j)), j + 1, j), "x".to_string())
        }
        Diagram::Refinement => {
            let p = psi_refinement(m, &psi_x, &s, j).map_err(input_error)?;
            let alt = Plan::columns_first(&p.rects()).map_err(input_error)?;
            if compose_partition_checked(m, &p, &alt).map_err(input_error)? != psi_x {
                return Err(mismatch("the refinement"));
            }
            (render_ascii(&labelled(p.rects(), refinement_labels(j)), j + 1, j), format!("ψ{}x", sub(j)))
        }
    };
    Ok(format!(
        "x = {}, s = ∂x\n{drawing}composite: {composite} in both evaluation orders\n",
        m.label(&x)
    ))
}
