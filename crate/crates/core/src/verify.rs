//! Named verification suites over the bundled model families, with
//! deterministic reports in text, JSON and TAP form.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cube::{is_degenerate, is_eps1, Sign};
use crate::fillers::{
    eval_in_shells, filler_from_fold, shell_decompose, thin_decompose, thin_filler, unfold_step, FillerError,
};
use crate::folding::{big_psi, fold, is_j_thin, is_thin, psi, psi_prefix, reconstruct_folded_shell};
use crate::laws::{check_axiom, check_exhaustive, random_instances, Counterexample, Instance, Law, LawError, LawReport};
use crate::models::fincat::FinCat;
use crate::models::sample::Catalog;
use crate::models::{shell_tower, Broken, FiniteModel, ModelError, Nerve};
use crate::shell::{
    all_shells, boundary, is_commutative, shell_big_fold, shell_compose, shell_connection, shell_degeneracy,
    shell_fold, Shell, ShellSystem,
};
use crate::thin::{
    check_morphism, connections_from_theta, theta_from_connections, theta_from_fillers, thin_class_difference,
    WithConnections,
};

/// Highest dimension checked by exhaustive enumeration.
pub const EXHAUSTIVE_DIM: usize = 3;
/// Default and largest accepted `max_dim` unless the cap is raised.
pub const DEFAULT_DIM_CAP: usize = 4;

/// Theorem suites in report order.
pub const SUITES: [&str; 12] = [
    "lemma-1.1",
    "prop-1.2",
    "shell-morphism",
    "thm-1.4",
    "prop-2.1",
    "prop-2.2",
    "lemma-2.3",
    "j-thin",
    "cor-2.7",
    "thm-2.8",
    "shell-decompose",
    "thm-3.1",
];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("element is not thin")]
    NotThin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Nerve,
    Tower,
    Broken,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "nerve" => Some(Family::Nerve),
            "tower" => Some(Family::Tower),
            "broken" => Some(Family::Broken),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Nerve => "nerve",
            Family::Tower => "tower",
            Family::Broken => "broken",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub family: Family,
    pub category: FinCat,
    /// Highest nerve dimension under a tower.
    pub base_dim: usize,
}

impl ModelSpec {
    pub fn new(family: Family, category: FinCat) -> ModelSpec {
        ModelSpec {
            family,
            category,
            base_dim: 1,
        }
    }

    pub fn describe(&self) -> String {
        match self.family {
            Family::Tower => format!("tower({}, base {})", self.category.name(), self.base_dim),
            f => format!("{}({})", f.name(), self.category.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub model: ModelSpec,
    pub max_dim: usize,
    /// Samples per sampled check.
    pub samples: usize,
    /// Random thin composites drawn by the closure check.
    pub composites: usize,
    pub seed: u64,
    /// Law ids or suite ids; empty selects everything.
    pub names: Vec<String>,
    pub dim_cap: usize,
    pub timings: bool,
}

impl SuiteConfig {
    pub fn new(model: ModelSpec) -> SuiteConfig {
        SuiteConfig {
            model,
            max_dim: DEFAULT_DIM_CAP,
            samples: 500,
            composites: 1000,
            seed: 0,
            names: Vec::new(),
            dim_cap: DEFAULT_DIM_CAP,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.max_dim < 2 {
            return Err(VerifyError::Config("max_dim must be at least 2".to_string()));
        }
        if self.max_dim > self.dim_cap {
            return Err(VerifyError::Config(format!(
                "max_dim {} exceeds the cap {}",
                self.max_dim, self.dim_cap
            )));
        }
        if self.model.family == Family::Tower && (self.model.base_dim == 0 || self.model.base_dim >= self.max_dim) {
            return Err(VerifyError::Config(format!(
                "tower base dimension must lie in 1..{}",
                self.max_dim
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub check: String,
    pub mode: Mode,
    pub instances: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub command: String,
    pub model: String,
    pub max_dim: usize,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} on {} (max dim {}, seed {})\n", self.command, self.model, self.max_dim, self.seed);
        for c in &self.checks {
            let _ = write!(
                out,
                "{} {} {} [{}, {} instances]",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.check,
                c.mode.name(),
                c.instances
            );
            if let Some(ms) = c.wall_ms {
                let _ = write!(out, " {ms} ms");
            }
            out.push('\n');
            if let Some(d) = &c.detail {
                let _ = writeln!(out, "    {d}");
            }
            if let Some(cx) = &c.counterexample {
                let _ = writeln!(out, "    counterexample: {cx}");
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }

    pub fn to_tap(&self) -> String {
        let mut out = format!("TAP version 13\n1..{}\n", self.checks.len());
        for (k, c) in self.checks.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} - {} {} ({}, {} instances)",
                if c.passed { "ok" } else { "not ok" },
                k + 1,
                c.suite,
                c.check,
                c.mode.name(),
                c.instances
            );
            if c.detail.is_some() || c.counterexample.is_some() {
                out.push_str("  ---\n");
                if let Some(d) = &c.detail {
                    let _ = writeln!(out, "  detail: {}", json!(d));
                }
                if let Some(cx) = &c.counterexample {
                    let _ = writeln!(out, "  counterexample: {cx}");
                }
                out.push_str("  ...\n");
            }
        }
        out
    }
}

/// Runs `f` on the model described by `spec`.
macro_rules! with_model {
    ($config:expr, |$m:ident| $body:expr) => {{
        let spec = &$config.model;
        match spec.family {
            Family::Nerve => {
                let $m = Nerve::new(spec.category.clone(), $config.max_dim);
                $body
            }
            Family::Tower => {
                let $m = shell_tower(spec.category.clone(), spec.base_dim, $config.max_dim - spec.base_dim);
                $body
            }
            Family::Broken => {
                let $m = Broken::new(Nerve::new(spec.category.clone(), $config.max_dim));
                $body
            }
        }
    }};
}
pub(crate) use with_model;

/// Runs the selected registry laws.
pub fn run_axioms(config: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
    config.validate()?;
    let laws = selected_laws(&config.names)?;
    let checks = with_model!(config, |m| axioms_on(&m, config, &laws)?);
    Ok(report("axioms", config, checks))
}

/// Runs the selected theorem suites.
pub fn run_theorems(config: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
    config.validate()?;
    let suites = selected_suites(&config.names)?;
    let checks = with_model!(config, |m| theorems_on(&m, config, &suites)?);
    Ok(report("theorems", config, checks))
}

/// Feeds a counterexample back through its law. Accepts a bare payload or a
/// whole report, in which case the first counterexample is used.
pub fn recheck(config: &SuiteConfig, payload: &Value) -> Result<SuiteReport, VerifyError> {
    config.validate()?;
    let cx = if let Some(checks) = payload.get("checks").and_then(Value::as_array) {
        checks
            .iter()
            .find_map(|c| c.get("counterexample"))
            .ok_or_else(|| VerifyError::Config("report contains no counterexample".to_string()))?
    } else {
        payload
    };
    let check = with_model!(config, |m| recheck_on(&m, cx)?);
    Ok(report("recheck", config, vec![check]))
}

fn report(command: &str, config: &SuiteConfig, checks: Vec<CheckReport>) -> SuiteReport {
    let mut checks = checks;
    if !config.timings {
        for c in &mut checks {
            c.wall_ms = None;
        }
    }
    SuiteReport {
        command: command.to_string(),
        model: config.model.describe(),
        max_dim: config.max_dim,
        seed: config.seed,
        checks,
    }
}

fn selected_laws(names: &[String]) -> Result<Vec<Law>, VerifyError> {
    if names.is_empty() {
        return Ok(Law::ALL.to_vec());
    }
    names.iter().map(|n| Law::from_id(n).map_err(VerifyError::from)).collect()
}

fn selected_suites(names: &[String]) -> Result<Vec<&'static str>, VerifyError> {
    if names.is_empty() {
        return Ok(SUITES.to_vec());
    }
    let mut out = Vec::new();
    for n in names {
        let s = SUITES
            .iter()
            .find(|s| s.eq_ignore_ascii_case(n))
            .ok_or_else(|| VerifyError::UnknownSuite(n.clone()))?;
        if !out.contains(s) {
            out.push(*s);
        }
    }
    out.sort_by_key(|s| SUITES.iter().position(|t| t == s));
    Ok(out)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Serialized form of an axiom counterexample.
pub fn counterexample_payload<M: FiniteModel>(m: &M, law: Law, c: &Counterexample<M::Cube>) -> Value {
    json!({
        "law": law.id(),
        "dirs": c.instance.dirs,
        "cubes": c.instance.cubes.iter().map(|x| m.encode(x)).collect::<Vec<_>>(),
        "labels": c.instance.cubes.iter().map(|x| m.label(x)).collect::<Vec<_>>(),
        "equation": c.mismatch.equation,
        "lhs": c.mismatch.lhs.as_ref().map(|x| m.encode(x)),
        "rhs": c.mismatch.rhs.as_ref().map(|x| m.encode(x)),
        "error": c.mismatch.error,
    })
}

fn law_check<M: FiniteModel>(m: &M, report: LawReport<M::Cube>, check: String, mode: Mode, started: Instant) -> CheckReport {
    CheckReport {
        suite: "axioms".to_string(),
        check,
        mode,
        instances: report.instances,
        passed: report.passed(),
        detail: report.counterexample.as_ref().map(|c| c.mismatch.equation.clone()),
        counterexample: report.counterexample.as_ref().map(|c| counterexample_payload(m, report.law, c)),
        wall_ms: Some(started.elapsed().as_millis() as u64),
    }
}

fn axioms_on<M: FiniteModel>(m: &M, config: &SuiteConfig, laws: &[Law]) -> Result<Vec<CheckReport>, VerifyError> {
    let catalog = Catalog::new(m, config.max_dim.min(EXHAUSTIVE_DIM))?;
    let mut out = Vec::new();
    for &law in laws {
        let index = Law::ALL.iter().position(|&l| l == law).expect("registered law") as u64;
        for d in law.min_dim()..=config.max_dim.saturating_sub(law.raise()) {
            let started = Instant::now();
            let level = d + law.raise();
            let name = format!("{} d={d}", law.id());
            if level <= EXHAUSTIVE_DIM && d <= catalog.enumerated_dim() {
                let report = check_exhaustive(&catalog, law, d);
                out.push(law_check(m, report, name, Mode::Exhaustive, started));
            } else {
                let mut rng = stream_rng(config.seed, index * 64 + d as u64);
                let sample = random_instances(&catalog, law, d, config.samples, &mut rng);
                let report = check_axiom(m, law.id(), &sample)?;
                out.push(law_check(m, report, name, Mode::Sampled, started));
            }
        }
    }
    Ok(out)
}

fn recheck_on<M: FiniteModel>(m: &M, cx: &Value) -> Result<CheckReport, VerifyError> {
    let bad = |msg: &str| VerifyError::Config(format!("counterexample: {msg}"));
    let law = Law::from_id(cx.get("law").and_then(Value::as_str).ok_or_else(|| bad("missing \"law\""))?)?;
    let dirs = cx
        .get("dirs")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"dirs\""))?
        .iter()
        .map(|d| d.as_u64().map(|d| d as usize).ok_or_else(|| bad("directions must be integers")))
        .collect::<Result<Vec<_>, _>>()?;
    let cubes = cx
        .get("cubes")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"cubes\""))?
        .iter()
        .map(|v| m.decode(v))
        .collect::<Result<Vec<_>, _>>()?;
    let started = Instant::now();
    let report = check_axiom(m, law.id(), &[Instance { dirs, cubes }])?;
    Ok(law_check(m, report, law.id().to_string(), Mode::Exhaustive, started))
}

/// Accumulates instances and the first failure of one check.
struct Tally {
    suite: &'static str,
    check: String,
    mode: Mode,
    instances: usize,
    failure: Option<(String, Value)>,
    notes: Vec<String>,
    started: Instant,
}

impl Tally {
    fn new(suite: &'static str, check: impl Into<String>, mode: Mode) -> Tally {
        Tally {
            suite,
            check: check.into(),
            mode,
            instances: 0,
            failure: None,
            notes: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Records one instance. Errors count as failures.
    fn record<E: std::fmt::Display>(
        &mut self,
        outcome: Result<bool, E>,
        what: impl FnOnce() -> String,
        witness: impl FnOnce() -> Value,
    ) {
        self.instances += 1;
        if self.failure.is_some() {
            return;
        }
        match outcome {
            Ok(true) => {}
            Ok(false) => self.failure = Some((what(), witness())),
            Err(e) => self.failure = Some((format!("{}: {e}", what()), witness())),
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn fail(&mut self, what: String) {
        if self.failure.is_none() {
            self.failure = Some((what, Value::Null));
        }
    }

    fn finish(self) -> CheckReport {
        let passed = self.failure.is_none();
        let (detail, counterexample) = match self.failure {
            Some((what, witness)) => (Some(what), (!witness.is_null()).then_some(witness)),
            None => (
                (!self.notes.is_empty()).then(|| self.notes.join("; ")),
                None,
            ),
        };
        CheckReport {
            suite: self.suite.to_string(),
            check: self.check,
            mode: self.mode,
            instances: self.instances,
            passed,
            detail,
            counterexample,
            wall_ms: Some(self.started.elapsed().as_millis() as u64),
        }
    }
}

struct Ctx<'a, M: FiniteModel> {
    m: &'a M,
    catalog: Catalog<'a, M>,
    config: &'a SuiteConfig,
}

impl<'a, M: FiniteModel> Ctx<'a, M> {
    fn top(&self) -> usize {
        self.catalog.enumerated_dim().min(EXHAUSTIVE_DIM)
    }

    /// All cubes of dimension `d`, or a seeded sample above the exhaustive range.
    fn elements(&self, d: usize, stream: u64) -> (Vec<M::Cube>, Mode) {
        if d <= self.top() {
            return (self.catalog.cubes(d).unwrap_or(&[]).to_vec(), Mode::Exhaustive);
        }
        if d > self.m.max_dim() || d > self.config.max_dim {
            return (Vec::new(), Mode::Sampled);
        }
        let mut rng = stream_rng(self.config.seed, stream);
        let mut out = Vec::with_capacity(self.config.samples);
        let mut misses = 0;
        while out.len() < self.config.samples && misses < 20 * self.config.samples.max(1) {
            match self.catalog.random(d, &[], &mut rng) {
                Some(x) => out.push(x),
                None => misses += 1,
            }
        }
        (out, Mode::Sampled)
    }

    fn enc(&self, xs: &[&M::Cube]) -> Value {
        Value::Array(xs.iter().map(|x| json!({"cube": self.m.encode(x), "label": self.m.label(x)})).collect())
    }

    /// Every composable pair `(x, y, i)` of enumerated `d`-cubes.
    fn pairs(&self, d: usize) -> Vec<(usize, usize, usize)> {
        let cubes = self.catalog.cubes(d).unwrap_or(&[]);
        let mut out = Vec::new();
        for (xk, x) in cubes.iter().enumerate() {
            for i in 1..=d {
                let upper = self.m.face(x, i, Sign::Plus).expect("direction in range");
                for &yk in self.catalog.with_face(d, i, Sign::Minus, &upper) {
                    out.push((xk, yk, i));
                }
            }
        }
        out
    }

    /// Every `n`-shell over the enumerated `(n − 1)`-cubes.
    fn shells(&self, n: usize) -> Vec<Shell<M::Cube>> {
        match self.catalog.cubes(n - 1) {
            Some(below) => all_shells(self.m, n, below).unwrap_or_default(),
            None => Vec::new(),
        }
    }
}

fn theorems_on<M: FiniteModel>(m: &M, config: &SuiteConfig, suites: &[&str]) -> Result<Vec<CheckReport>, VerifyError> {
    let catalog = Catalog::new(m, config.max_dim.min(EXHAUSTIVE_DIM))?;
    let ctx = Ctx { m, catalog, config };
    let mut out = Vec::new();
    for s in suites {
        let stream = 1000 * (SUITES.iter().position(|t| t == s).expect("known suite") as u64 + 1);
        out.extend(match *s {
            "lemma-1.1" => lemma_1_1(&ctx),
            "prop-1.2" => prop_1_2(&ctx, stream),
            "shell-morphism" => shell_morphism(&ctx),
            "thm-1.4" => thm_1_4(&ctx),
            "prop-2.1" => prop_2_1(&ctx),
            "prop-2.2" => prop_2_2(&ctx, stream),
            "lemma-2.3" => lemma_2_3(&ctx),
            "j-thin" => j_thin(&ctx, stream),
            "cor-2.7" => cor_2_7(&ctx),
            "thm-2.8" => thm_2_8(&ctx),
            "shell-decompose" => shell_decompose_suite(&ctx),
            "thm-3.1" => thm_3_1(&ctx),
            other => return Err(VerifyError::UnknownSuite(other.to_string())),
        });
    }
    Ok(out)
}

fn lemma_1_1<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for d in 0..ctx.config.max_dim.min(ctx.top() + 1) {
        let n = d + 1;
        let ys = ctx.catalog.cubes(d).unwrap_or(&[]);
        let mut first = Tally::new("lemma-1.1", format!("ψ₁…ψᵣ₋₁εᵣ = ε₁ on C{d}"), Mode::Exhaustive);
        let mut second = Tally::new("lemma-1.1", format!("Ψεⱼy ∈ ε₁C{d}"), Mode::Exhaustive);
        for y in ys {
            for r in 1..n {
                let lhs = m.degeneracy(y, r).and_then(|e| psi_prefix(m, &e, r - 1));
                let rhs = m.degeneracy(y, 1);
                first.record(
                    lhs.and_then(|l| rhs.map(|r| l == r)),
                    || format!("fails for r = {r}"),
                    || ctx.enc(&[y]),
                );
            }
            for j in 1..n {
                let e = m.degeneracy(y, j).and_then(|e| fold(m, &e)).and_then(|f| is_eps1(m, &f));
                second.record(e, || format!("fails for j = {j}"), || ctx.enc(&[y]));
            }
        }
        if n >= 2 {
            out.push(first.finish());
            out.push(second.finish());
        }
    }
    out
}

fn prop_1_2<M: FiniteModel>(ctx: &Ctx<'_, M>, stream: u64) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for d in 2..=ctx.config.max_dim {
        let (xs, mode) = ctx.elements(d, stream + d as u64);
        let mut t = Tally::new("prop-1.2", format!("faces of Ψx, ∂N = ∂P, reconstruction at dim {d}"), mode);
        for x in &xs {
            let outcome = (|| -> Result<Option<String>, FillerError> {
                let r = big_psi(m, x)?;
                for i in 2..=d {
                    for sign in Sign::BOTH {
                        if !is_eps1(m, &m.face(&r.folded, i, sign)?)? {
                            return Ok(Some(format!("∂{sign}{i}Ψx is not ε₁-degenerate")));
                        }
                    }
                }
                if boundary(m, &r.n_face)? != boundary(m, &r.p_face)? {
                    return Ok(Some("∂N ≠ ∂P".to_string()));
                }
                if reconstruct_folded_shell(m, &r.n_face, &r.p_face)? != boundary(m, &r.folded)? {
                    return Ok(Some("∂Ψx is not the shell determined by N and P".to_string()));
                }
                Ok(None)
            })();
            let msg = match &outcome {
                Ok(Some(s)) => s.clone(),
                _ => String::new(),
            };
            t.record(outcome.map(|o| o.is_none()), || msg, || ctx.enc(&[x]));
        }
        out.push(t.finish());
    }
    out
}

fn shell_morphism<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for d in 1..=ctx.top() {
        let xs = ctx.catalog.cubes(d).unwrap_or(&[]);
        let mut t = Tally::new("shell-morphism", format!("∂ commutes with ε, Γ, ψ, Ψ, N, P at dim {d}"), Mode::Exhaustive);
        for x in xs {
            let outcome = (|| -> Result<Option<String>, FillerError> {
                let s = boundary(m, x)?;
                if d < m.max_dim() {
                    for j in 1..=d + 1 {
                        if boundary(m, &m.degeneracy(x, j)?)? != shell_degeneracy(m, x, j)? {
                            return Ok(Some(format!("∂ε{j}x ≠ 𝛆{j}x")));
                        }
                    }
                    for j in 1..=d {
                        for sign in Sign::BOTH {
                            if boundary(m, &m.connection(x, j, sign)?)? != shell_connection(m, x, j, sign)? {
                                return Ok(Some(format!("∂Γ{sign}{j}x ≠ 𝚪{sign}{j}x")));
                            }
                        }
                    }
                }
                for j in 1..d {
                    if shell_fold(m, &s, j)? != boundary(m, &psi(m, x, j)?)? {
                        return Ok(Some(format!("ψ{j}∂x ≠ ∂ψ{j}x")));
                    }
                }
                let sf = shell_big_fold(m, &s)?;
                let r = big_psi(m, x)?;
                if sf.folded != boundary(m, &r.folded)? {
                    return Ok(Some("Ψ∂x ≠ ∂Ψx".to_string()));
                }
                if sf.n_face != r.n_face || sf.p_face != r.p_face {
                    return Ok(Some("N∂x ≠ Nx or P∂x ≠ Px".to_string()));
                }
                Ok(None)
            })();
            let msg = match &outcome {
                Ok(Some(s)) => s.clone(),
                _ => String::new(),
            };
            t.record(outcome.map(|o| o.is_none()), || msg, || ctx.enc(&[x]));
        }
        out.push(t.finish());
        let mut c = Tally::new("shell-morphism", format!("∂(x ∘ᵢ y) = ∂x ∘ᵢ ∂y at dim {d}"), Mode::Exhaustive);
        for (xk, yk, i) in ctx.pairs(d) {
            let (x, y) = (&xs[xk], &xs[yk]);
            let outcome = (|| -> Result<bool, FillerError> {
                let lhs = boundary(m, &m.compose(x, y, i)?)?;
                Ok(lhs == shell_compose(m, &boundary(m, x)?, &boundary(m, y)?, i)?)
            })();
            c.record(outcome, || format!("fails in direction {i}"), || ctx.enc(&[x, y]));
        }
        out.push(c.finish());
    }
    out
}

fn thm_1_4<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for n in 1..=ctx.top() {
        let xs = ctx.catalog.cubes(n).unwrap_or(&[]);
        let mut rt = Tally::new("thm-1.4", format!("filler_from_fold(Ψx, ∂x) = x at dim {n}"), Mode::Exhaustive);
        let mut steps = Tally::new("thm-1.4", format!("unfold_step(ψⱼx, ∂x, j) = x at dim {n}"), Mode::Exhaustive);
        for x in xs {
            let outcome = (|| -> Result<bool, FillerError> {
                Ok(filler_from_fold(m, &fold(m, x)?, &boundary(m, x)?)? == *x)
            })();
            rt.record(outcome, || "round trip fails".to_string(), || ctx.enc(&[x]));
            for j in 1..n {
                let outcome = (|| -> Result<bool, FillerError> {
                    Ok(unfold_step(m, &psi(m, x, j)?, &boundary(m, x)?, j)? == *x)
                })();
                steps.record(outcome, || format!("fails for j = {j}"), || ctx.enc(&[x]));
            }
        }
        out.push(rt.finish());
        if n >= 2 {
            out.push(steps.finish());
        }
        out.push(uniqueness(ctx, n));
    }
    out
}

/// For every shell `s` and cube `a`, the number of `x` with `∂x = s` and
/// `Ψx = a` is one when `Ψs = ∂a` and zero otherwise.
fn uniqueness<M: FiniteModel>(ctx: &Ctx<'_, M>, n: usize) -> CheckReport {
    let m = ctx.m;
    let xs = ctx.catalog.cubes(n).unwrap_or(&[]);
    let mut t = Tally::new("thm-1.4", format!("unique solution of ∂x = s, Ψx = a at dim {n}"), Mode::Exhaustive);
    let outcome = (|| -> Result<(), FillerError> {
        let mut solutions: HashMap<(Shell<M::Cube>, &M::Cube), usize> = HashMap::new();
        let mut by_boundary: HashMap<Shell<M::Cube>, Vec<usize>> = HashMap::new();
        let mut folds = Vec::with_capacity(xs.len());
        for (k, x) in xs.iter().enumerate() {
            by_boundary.entry(boundary(m, x)?).or_default().push(k);
            folds.push(fold(m, x)?);
        }
        for (k, x) in xs.iter().enumerate() {
            let key = (boundary(m, x)?, &folds[k]);
            *solutions.entry(key).or_default() += 1;
        }
        let shells = ctx.shells(n);
        let (mut valid, mut invalid) = (0usize, 0usize);
        for s in &shells {
            let target = shell_big_fold(m, s)?.folded;
            let candidates = by_boundary.get(&target).map(Vec::as_slice).unwrap_or(&[]);
            for &ak in candidates {
                let count = solutions.get(&(s.clone(), &xs[ak])).copied().unwrap_or(0);
                t.record(
                    Ok::<bool, FillerError>(count == 1),
                    || format!("{count} solutions for a valid pair"),
                    || json!({"shell": s.faces().iter().map(|c| m.encode(c)).collect::<Vec<_>>(), "a": m.encode(&xs[ak])}),
                );
            }
            valid += candidates.len();
            // The remaining pairs are invalid; no solution may land on them.
            let stray = by_boundary
                .get(s)
                .map(Vec::as_slice)
                .unwrap_or(&[])
                .iter()
                .filter(|&&xk| boundary(m, &folds[xk]).map(|b| b != target).unwrap_or(true))
                .count();
            let pairs = xs.len() - candidates.len();
            invalid += pairs;
            t.instances += pairs;
            if stray > 0 {
                t.fail(format!("{stray} solutions for invalid pairs"));
            }
        }
        t.note(format!("{} shells, {valid} valid pairs, {invalid} invalid pairs", shells.len()));
        Ok(())
    })();
    if let Err(e) = outcome {
        t.fail(e.to_string());
    }
    t.finish()
}

fn prop_2_1<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for n in 1..=ctx.top() {
        let xs = ctx.catalog.cubes(n).unwrap_or(&[]);
        let mut first = Tally::new("prop-2.1", format!("shells of thin elements are commutative at dim {n}"), Mode::Exhaustive);
        let mut thin_by_boundary: HashMap<Shell<M::Cube>, Vec<&M::Cube>> = HashMap::new();
        for x in xs {
            match is_thin(m, x) {
                Ok(true) => {
                    let s = boundary(m, x).expect("cube has a boundary");
                    first.record(is_commutative(m, &s), || "thin element with non-commutative shell".to_string(), || ctx.enc(&[x]));
                    thin_by_boundary.entry(s).or_default().push(x);
                }
                Ok(false) => {}
                Err(e) => first.fail(e.to_string()),
            }
        }
        out.push(first.finish());

        let shells = ctx.shells(n);
        let sys = ShellSystem::over(m, n - 1, 1);
        let mut second = Tally::new("prop-2.1", format!("commutative ⇔ thin in the shell model at dim {n}"), Mode::Exhaustive);
        let mut third = Tally::new("prop-2.1", format!("unique thin filler at dim {n}"), Mode::Exhaustive);
        let mut non_commutative = 0;
        for s in &shells {
            let witness = || json!(s.faces().iter().map(|c| m.label(c)).collect::<Vec<_>>());
            let commutative = match is_commutative(m, s) {
                Ok(c) => c,
                Err(e) => {
                    second.fail(e.to_string());
                    continue;
                }
            };
            second.record(
                is_thin(&sys, &sys.lift_shell(s)).map(|t| t == commutative),
                || "commutativity and thinness in the shell model disagree".to_string(),
                witness,
            );
            let enumerated = thin_by_boundary.get(s).map(Vec::as_slice).unwrap_or(&[]);
            if commutative {
                let outcome = thin_filler(m, s).map(|x| enumerated.len() == 1 && *enumerated[0] == x);
                third.record(outcome, || format!("{} enumerated thin fillers", enumerated.len()), witness);
            } else {
                non_commutative += 1;
                let outcome = Ok::<bool, FillerError>(
                    enumerated.is_empty() && matches!(thin_filler(m, s), Err(FillerError::NotCommutative)),
                );
                third.record(outcome, || "non-commutative shell has a thin filler".to_string(), witness);
            }
        }
        second.note(format!("{} shells", shells.len()));
        third.note(format!("{} commutative, {non_commutative} non-commutative", shells.len() - non_commutative));
        out.push(second.finish());
        out.push(third.finish());
    }
    out
}

fn prop_2_2<M: FiniteModel>(ctx: &Ctx<'_, M>, stream: u64) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    let mut gens = Tally::new("prop-2.2", "εᵢc and Γᵅᵢc are thin", Mode::Exhaustive);
    for d in 0..ctx.config.max_dim.min(ctx.top() + 1) {
        for c in ctx.catalog.cubes(d).unwrap_or(&[]) {
            for i in 1..=d + 1 {
                gens.record(m.degeneracy(c, i).and_then(|e| is_thin(m, &e)), || format!("ε{i}c is not thin"), || ctx.enc(&[c]));
            }
            for i in 1..=d {
                for sign in Sign::BOTH {
                    gens.record(
                        m.connection(c, i, sign).and_then(|g| is_thin(m, &g)),
                        || format!("Γ{sign}{i}c is not thin"),
                        || ctx.enc(&[c]),
                    );
                }
            }
        }
    }
    out.push(gens.finish());
    for d in 1..=ctx.top() {
        let xs = ctx.catalog.cubes(d).unwrap_or(&[]);
        let thin: Vec<bool> = xs.iter().map(|x| is_thin(m, x).unwrap_or(false)).collect();
        if d < ctx.top() {
            let mut t = Tally::new("prop-2.2", format!("composites of thin pairs are thin at dim {d}"), Mode::Exhaustive);
            for (xk, yk, i) in ctx.pairs(d) {
                if thin[xk] && thin[yk] {
                    let (x, y) = (&xs[xk], &xs[yk]);
                    t.record(m.compose(x, y, i).and_then(|c| is_thin(m, &c)), || format!("composite in direction {i} is not thin"), || ctx.enc(&[x, y]));
                }
            }
            out.push(t.finish());
            continue;
        }
        // Top dimension: seeded random composites.
        let mut t = Tally::new("prop-2.2", format!("random composites of thin elements at dim {d}"), Mode::Sampled);
        let thin_idx: Vec<usize> = (0..xs.len()).filter(|&k| thin[k]).collect();
        let mut rng = stream_rng(ctx.config.seed, stream + d as u64);
        let mut attempts = 0;
        while t.instances < ctx.config.composites && attempts < 50 * ctx.config.composites.max(1) && !thin_idx.is_empty() {
            attempts += 1;
            let xk = *thin_idx.choose(&mut rng).expect("nonempty");
            let i = rng.gen_range(1..=d);
            let x = &xs[xk];
            let upper = m.face(x, i, Sign::Plus).expect("direction in range");
            let partners: Vec<usize> = ctx.catalog.with_face(d, i, Sign::Minus, &upper).iter().copied().filter(|&k| thin[k]).collect();
            let Some(&yk) = partners.choose(&mut rng) else { continue };
            let y = &xs[yk];
            t.record(m.compose(x, y, i).and_then(|c| is_thin(m, &c)), || format!("composite in direction {i} is not thin"), || ctx.enc(&[x, y]));
        }
        out.push(t.finish());
    }
    out
}

fn lemma_2_3<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut first = Tally::new("lemma-2.3", "ψᵢΓᵅᵢ = εᵢ", Mode::Exhaustive);
    let mut second = Tally::new("lemma-2.3", "ψⱼΓᵅᵢ = Γᵅᵢψⱼ₋₁ for j > i + 1", Mode::Exhaustive);
    let mut third = Tally::new("lemma-2.3", "ψᵢψᵢ₊₁Γᵅᵢc = εᵢ(…)", Mode::Exhaustive);
    for d in 1..ctx.config.max_dim.min(ctx.top() + 1) {
        for c in ctx.catalog.cubes(d).unwrap_or(&[]) {
            let n = d + 1;
            for i in 1..=d {
                for sign in Sign::BOTH {
                    let g = m.connection(c, i, sign);
                    first.record(
                        g.clone().and_then(|g| Ok(psi(m, &g, i)? == m.degeneracy(c, i)?)),
                        || format!("fails for i = {i}, α = {sign}"),
                        || ctx.enc(&[c]),
                    );
                    for j in i + 2..n {
                        second.record(
                            g.clone().and_then(|g| Ok(psi(m, &g, j)? == m.connection(&psi(m, c, j - 1)?, i, sign)?)),
                            || format!("fails for i = {i}, j = {j}, α = {sign}"),
                            || ctx.enc(&[c]),
                        );
                    }
                    if i < d && d <= 2 {
                        let outcome = g.and_then(|g| {
                            let lhs = psi(m, &psi(m, &g, i + 1)?, i)?;
                            let inner = match sign {
                                Sign::Plus => m.compose(
                                    &m.connection(&m.face(c, i + 1, Sign::Minus)?, i, Sign::Plus)?,
                                    c,
                                    i + 1,
                                )?,
                                Sign::Minus => m.compose(
                                    c,
                                    &m.connection(&m.face(c, i + 1, Sign::Plus)?, i, Sign::Minus)?,
                                    i + 1,
                                )?,
                            };
                            Ok(lhs == m.degeneracy(&inner, i)?)
                        });
                        third.record(outcome, || format!("fails for i = {i}, α = {sign}"), || ctx.enc(&[c]));
                    }
                }
            }
        }
    }
    vec![first.finish(), second.finish(), third.finish()]
}

fn j_thin<M: FiniteModel>(ctx: &Ctx<'_, M>, stream: u64) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut step = Tally::new("j-thin", "x is j-thin ⇔ ψⱼx is (j−1)-thin", Mode::Exhaustive);
    let mut degenerate = Tally::new("j-thin", "εₖy is (k−1)-thin", Mode::Exhaustive);
    let mut closure = Tally::new("j-thin", "composites of j-thin pairs are j-thin", Mode::Exhaustive);
    let mut eps_closure = Tally::new("j-thin", "composites of εⱼ-degenerate pairs are εⱼ-degenerate", Mode::Exhaustive);
    for d in 1..=ctx.top() {
        let xs = ctx.catalog.cubes(d).unwrap_or(&[]);
        for x in xs {
            for j in 1..d {
                let outcome = (|| Ok::<bool, crate::cube::CubeError>(is_j_thin(m, x, j)? == is_j_thin(m, &psi(m, x, j)?, j - 1)?))();
                step.record(outcome, || format!("fails for j = {j}"), || ctx.enc(&[x]));
            }
        }
        if d < ctx.config.max_dim {
            for y in xs {
                for k in 1..=d + 1 {
                    degenerate.record(
                        m.degeneracy(y, k).and_then(|e| is_j_thin(m, &e, k - 1)),
                        || format!("fails for k = {k}"),
                        || ctx.enc(&[y]),
                    );
                }
            }
        }
        let pairs = ctx.pairs(d);
        let mut rng = stream_rng(ctx.config.seed, stream + d as u64);
        let chosen: Vec<&(usize, usize, usize)> = if d < ctx.top() {
            pairs.iter().collect()
        } else {
            pairs.choose_multiple(&mut rng, ctx.config.samples).collect()
        };
        for &&(xk, yk, i) in &chosen {
            let (x, y) = (&xs[xk], &xs[yk]);
            let Ok(c) = m.compose(x, y, i) else {
                closure.fail(format!("composite in direction {i} failed"));
                continue;
            };
            for j in 0..d {
                let outcome = (|| {
                    Ok::<bool, crate::cube::CubeError>(
                        !(is_j_thin(m, x, j)? && is_j_thin(m, y, j)?) || is_j_thin(m, &c, j)?,
                    )
                })();
                closure.record(outcome, || format!("fails for j = {j}, direction {i}"), || ctx.enc(&[x, y]));
            }
            for j in 1..=d {
                let outcome = (|| {
                    Ok::<bool, crate::cube::CubeError>(
                        !(is_degenerate(m, x, j)? && is_degenerate(m, y, j)?) || is_degenerate(m, &c, j)?,
                    )
                })();
                eps_closure.record(outcome, || format!("fails for j = {j}, direction {i}"), || ctx.enc(&[x, y]));
            }
        }
        if d == ctx.top() && chosen.len() < pairs.len() {
            closure.mode = Mode::Sampled;
            eps_closure.mode = Mode::Sampled;
        }
    }
    vec![step.finish(), degenerate.finish(), closure.finish(), eps_closure.finish()]
}

fn cor_2_7<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    let mut gens = Tally::new("cor-2.7", "𝛆ᵢc and 𝚪ᵅᵢc are commutative", Mode::Exhaustive);
    for d in 0..ctx.top() {
        for c in ctx.catalog.cubes(d).unwrap_or(&[]) {
            for i in 1..=d + 1 {
                gens.record(
                    shell_degeneracy(m, c, i).and_then(|s| is_commutative(m, &s)),
                    || format!("𝛆{i}c is not commutative"),
                    || ctx.enc(&[c]),
                );
            }
            for i in 1..=d {
                for sign in Sign::BOTH {
                    gens.record(
                        shell_connection(m, c, i, sign).and_then(|s| is_commutative(m, &s)),
                        || format!("𝚪{sign}{i}c is not commutative"),
                        || ctx.enc(&[c]),
                    );
                }
            }
        }
    }
    out.push(gens.finish());
    for n in 2..=ctx.top() {
        let shells: Vec<Shell<M::Cube>> = ctx
            .shells(n)
            .into_iter()
            .filter(|s| is_commutative(m, s).unwrap_or(false))
            .collect();
        let mut by_lower: HashMap<(usize, &M::Cube), Vec<usize>> = HashMap::new();
        for (k, s) in shells.iter().enumerate() {
            for i in 1..=n {
                by_lower.entry((i, s.face(i, Sign::Minus))).or_default().push(k);
            }
        }
        let mut t = Tally::new("cor-2.7", format!("composites of commutative {n}-shells are commutative"), Mode::Exhaustive);
        for s in &shells {
            for i in 1..=n {
                for &tk in by_lower.get(&(i, s.face(i, Sign::Plus))).map(Vec::as_slice).unwrap_or(&[]) {
                    let u = &shells[tk];
                    t.record(
                        shell_compose(m, s, u, i).and_then(|c| is_commutative(m, &c)),
                        || format!("composite in direction {i} is not commutative"),
                        || json!([s.faces().iter().map(|c| m.label(c)).collect::<Vec<_>>(), u.faces().iter().map(|c| m.label(c)).collect::<Vec<_>>()]),
                    );
                }
            }
        }
        t.note(format!("{} commutative shells", shells.len()));
        out.push(t.finish());
    }
    out
}

fn thm_2_8<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for d in 1..=ctx.top() {
        let mut t = Tally::new("thm-2.8", format!("thin elements decompose into ε/Γ at dim {d}"), Mode::Exhaustive);
        let mut leaves = 0;
        for x in ctx.catalog.cubes(d).unwrap_or(&[]) {
            if !is_thin(m, x).unwrap_or(false) {
                continue;
            }
            let outcome = thin_decompose(m, x).map(|e| {
                leaves = leaves.max(e.leaf_count());
                e.is_base_free() && e.eval(m).ok().as_ref() == Some(x)
            });
            t.record(outcome, || "decomposition fails".to_string(), || ctx.enc(&[x]));
        }
        t.note(format!("largest decomposition has {leaves} leaves"));
        out.push(t.finish());
    }
    out
}

fn shell_decompose_suite<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for n in 1..=ctx.top() {
        let mut t = Tally::new(
            "shell-decompose",
            format!("commutative {n}-shells are composites of 𝛆 and 𝚪 shells"),
            Mode::Exhaustive,
        );
        for s in ctx.shells(n) {
            if !is_commutative(m, &s).unwrap_or(false) {
                continue;
            }
            let outcome = shell_decompose(m, &s).and_then(|e| Ok(e.is_base_free() && eval_in_shells(m, &e)? == s));
            t.record(outcome, || "decomposition fails".to_string(), || json!(s.faces().iter().map(|c| m.label(c)).collect::<Vec<_>>()));
        }
        out.push(t.finish());
    }
    out
}

fn thm_3_1<M: FiniteModel>(ctx: &Ctx<'_, M>) -> Vec<CheckReport> {
    let m = ctx.m;
    let mut out = Vec::new();
    for n in 2..=ctx.top() {
        let mut t = Tally::new("thm-3.1", format!("thin structures and connections correspond at dim {n}"), Mode::Exhaustive);
        let outcome = (|| -> Result<(), FillerError> {
            let theta = theta_from_connections(&ctx.catalog, n)?;
            let morphism = check_morphism(&ctx.catalog, &theta)?;
            t.instances += morphism.shells + morphism.degeneracies + morphism.composites;
            let induced = connections_from_theta(&ctx.catalog, &theta)?;
            for ((a, i, sign), x) in induced.iter() {
                t.record(
                    m.connection(a, *i, *sign).map(|g| g == *x),
                    || format!("θ𝚪{sign}{i}a ≠ Γ{sign}{i}a"),
                    || ctx.enc(&[a]),
                );
            }
            let with = WithConnections::new(m, &induced);
            let wcat = Catalog::new(&with, n)?;
            let again = theta_from_connections(&wcat, n)?;
            t.instances += theta.len();
            if again != theta {
                t.fail("θ rebuilt from the induced connections differs".to_string());
            }
            let (count, diff) = thin_class_difference(&ctx.catalog, &theta, &induced)?;
            t.instances += count;
            if let Some(x) = diff {
                t.fail(format!("thin classes differ at {}", m.label(&x)));
            }
            match theta_from_fillers(&ctx.catalog, n) {
                Ok(external) => {
                    t.instances += external.len();
                    let external_induced = connections_from_theta(&ctx.catalog, &external)?;
                    for ((a, i, sign), x) in external_induced.iter() {
                        t.record(
                            m.connection(a, *i, *sign).map(|g| g == *x),
                            || format!("connections from the filler θ differ at Γ{sign}{i}"),
                            || ctx.enc(&[a]),
                        );
                    }
                    let with = WithConnections::new(m, &external_induced);
                    let wcat = Catalog::new(&with, n)?;
                    if theta_from_connections(&wcat, n)? != external {
                        t.fail("filler θ is not recovered from its connections".to_string());
                    }
                    t.note(format!("|θ| = {}, filler θ agrees", theta.len()));
                }
                Err(FillerError::MorphismViolation(why)) => t.note(format!("|θ| = {}, no filler θ: {why}", theta.len())),
                Err(e) => return Err(e),
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            t.fail(e.to_string());
        }
        out.push(t.finish());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fincat::bundled;

    fn config(family: Family, cat: &str) -> SuiteConfig {
        let mut c = SuiteConfig::new(ModelSpec::new(family, bundled::load(cat).unwrap()));
        c.max_dim = 3;
        c.samples = 20;
        c.composites = 50;
        c
    }

    #[test]
    fn config_validation() {
        let mut c = config(Family::Nerve, "terminal");
        c.max_dim = 5;
        assert!(matches!(c.validate(), Err(VerifyError::Config(_))));
        c.max_dim = 1;
        assert!(c.validate().is_err());
        let mut t = config(Family::Tower, "terminal");
        t.model.base_dim = 3;
        assert!(t.validate().is_err());
    }

    #[test]
    fn unknown_names_are_rejected() {
        let mut c = config(Family::Nerve, "terminal");
        c.names = vec!["thm-9.9".to_string()];
        assert!(matches!(run_theorems(&c), Err(VerifyError::UnknownSuite(_))));
        c.names = vec!["NOPE".to_string()];
        assert!(matches!(run_axioms(&c), Err(VerifyError::Law(_))));
    }

    #[test]
    fn terminal_category_passes_everything() {
        let c = config(Family::Nerve, "terminal");
        assert!(run_axioms(&c).unwrap().passed());
        let r = run_theorems(&c).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn broken_model_fails_and_rechecks() {
        let mut c = config(Family::Broken, "poset2x2");
        c.names = vec!["EPS-FACE".to_string()];
        let r = run_axioms(&c).unwrap();
        assert!(!r.passed());
        let cx = r.failures().next().unwrap().counterexample.clone().unwrap();
        assert!(!recheck(&c, &cx).unwrap().passed());
        let healthy = SuiteConfig {
            model: ModelSpec::new(Family::Nerve, bundled::load("poset2x2").unwrap()),
            ..c
        };
        assert!(recheck(&healthy, &cx).unwrap().passed());
    }
}
