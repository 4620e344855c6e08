//! Problem files: JSON with rationals written as `"p/q"` strings.

use std::collections::BTreeMap;

use cartan_core::exactmat::parse_rational;
use cartan_core::extension::{KleinModel, SkeletonMorphism};
use cartan_core::liealg::builtin;
use cartan_core::skeleton::Skeleton;
use cartan_core::{LieAlgebra, LinearMap, Mat, Rational, Subspace};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FORMAT_VERSION: &str = "1";

/// Matrix as a list of rows.
pub type RawMatrix = Vec<Vec<String>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format_version: String,
    #[serde(default)]
    pub lie_algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default)]
    pub klein_models: BTreeMap<String, KleinSpec>,
    #[serde(default)]
    pub skeletons: BTreeMap<String, SkeletonSpec>,
    #[serde(default)]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default)]
    pub s_subspaces: BTreeMap<String, SSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

/// Either `{"builtin": name, "n": n}` or an explicit structure-constant table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub builtin: Option<String>,
    pub n: Option<usize>,
    pub dim: Option<usize>,
    pub labels: Option<Vec<String>>,
    /// Nonzero brackets `[e_i, e_j] = value` for `i < j`.
    #[serde(default)]
    pub brackets: Vec<BracketSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub value: Vec<String>,
}

/// A Lie algebra and the basis vectors of `h` (rows).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KleinSpec {
    pub algebra: String,
    #[serde(default)]
    pub h: RawMatrix,
}

/// One of:
/// - `{"builtin": "euclidean" | "affine", "n": n}`
/// - `{"klein": name}`
/// - `{"affine_reduction": {"n": n, "linear": [matrices], "labels": [...]}}`
/// - `{"l": algebra, "l_embed": k×l matrix, "drho": [k×k matrices]}`
///
/// Any form may add `component_reps`: `n×n` matrices for affine types, `k×k` operators otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonSpec {
    pub builtin: Option<String>,
    pub n: Option<usize>,
    pub klein: Option<String>,
    pub affine_reduction: Option<AffineReductionSpec>,
    pub l: Option<String>,
    pub l_embed: Option<RawMatrix>,
    pub drho: Option<Vec<RawMatrix>>,
    pub k_dim: Option<usize>,
    #[serde(default)]
    pub component_reps: Vec<RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineReductionSpec {
    pub n: usize,
    pub linear: Vec<RawMatrix>,
    pub labels: Option<Vec<String>>,
}

/// `alpha` is `dim k × dim g`; `dj` (`dim l × dim h`) is derived from `alpha` when omitted.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: String,
    pub target: String,
    pub alpha: RawMatrix,
    pub dj: Option<RawMatrix>,
}

/// Generators of `s` as `k×k` operators on the named skeleton.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SSpec {
    pub skeleton: String,
    #[serde(default)]
    pub generators: Vec<RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub kind: String,
    pub name: Option<String>,
    pub skeleton: Option<String>,
    pub morphism: Option<String>,
    pub klein: Option<String>,
    pub s: Option<String>,
}

impl TaskSpec {
    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.clone())
    }
}

/// Parses JSON text; syntax and shape errors carry line and column.
pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    let p: ProblemFile = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    })?;
    if p.format_version != FORMAT_VERSION {
        return Err(CliError::Parse(format!(
            "format_version: unsupported version {:?}, expected {:?}",
            p.format_version, FORMAT_VERSION
        )));
    }
    Ok(p)
}

/// Resolved objects, ready for the tasks.
#[derive(Clone, Debug, Default)]
pub struct Resolved {
    pub algebras: BTreeMap<String, LieAlgebra>,
    pub kleins: BTreeMap<String, KleinModel>,
    pub skeletons: BTreeMap<String, Skeleton>,
    pub morphisms: BTreeMap<String, SkeletonMorphism>,
    /// Subspace of `gl(k)` with the skeleton it acts on.
    pub subspaces: BTreeMap<String, (String, Subspace)>,
}

fn rational(s: &str, at: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Parse(format!("{at}: {e}")))
}

pub fn vector(v: &[String], at: &str) -> Result<Vec<Rational>, CliError> {
    v.iter()
        .enumerate()
        .map(|(i, x)| rational(x, &format!("{at}[{i}]")))
        .collect()
}

/// Reads a matrix; `shape` checks rows × cols when given.
pub fn matrix(m: &RawMatrix, shape: Option<(usize, usize)>, at: &str) -> Result<Mat, CliError> {
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, r)| vector(r, &format!("{at}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let cols = rows.first().map_or(shape.map_or(0, |s| s.1), |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Parse(format!("{at}: rows have different lengths")));
    }
    if let Some((r, c)) = shape {
        if rows.len() != r || cols != c {
            return Err(CliError::Parse(format!(
                "{at}: expected a {r}x{c} matrix, got {}x{cols}",
                rows.len()
            )));
        }
    }
    Mat::from_rows(&rows, cols).map_err(|e| CliError::Parse(format!("{at}: {e}")))
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, name: &str, what: &str, at: &str) -> Result<&'a T, CliError> {
    map.get(name)
        .ok_or_else(|| CliError::Parse(format!("{at}: unknown {what} `{name}`")))
}

fn resolve_algebra(name: &str, a: &AlgebraSpec) -> Result<LieAlgebra, CliError> {
    let at = format!("lie_algebras.{name}");
    if let Some(b) = &a.builtin {
        let n = a.n.ok_or_else(|| CliError::Parse(format!("{at}: builtin needs `n`")))?;
        let (alg, _) = builtin(b, n).map_err(|e| CliError::from_core_input(e, &at))?;
        return Ok(alg);
    }
    let dim = a
        .dim
        .ok_or_else(|| CliError::Parse(format!("{at}: give either `builtin` or `dim`")))?;
    let labels = a
        .labels
        .clone()
        .unwrap_or_else(|| (1..=dim).map(|i| format!("e{i}")).collect());
    if labels.len() != dim {
        return Err(CliError::Parse(format!("{at}.labels: expected {dim} labels")));
    }
    let entries = a
        .brackets
        .iter()
        .enumerate()
        .map(|(k, b)| Ok((b.i, b.j, vector(&b.value, &format!("{at}.brackets[{k}].value"))?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    LieAlgebra::from_brackets(dim, labels, &entries).map_err(|e| CliError::from_core_input(e, &at))
}

fn resolve_skeleton(name: &str, s: &SkeletonSpec, r: &Resolved) -> Result<Skeleton, CliError> {
    let at = format!("skeletons.{name}");
    let core = |e| CliError::from_core_input(e, &at);
    let mut sk = if let Some(b) = &s.builtin {
        let n = s.n.ok_or_else(|| CliError::Parse(format!("{at}: builtin needs `n`")))?;
        match b.as_str() {
            "euclidean" => Skeleton::euclidean(n).map_err(core)?,
            "affine" => Skeleton::affine(n).map_err(core)?,
            other => return Err(CliError::Parse(format!("{at}.builtin: unknown skeleton `{other}`"))),
        }
    } else if let Some(k) = &s.klein {
        lookup(&r.kleins, k, "klein model", &at)?.skeleton()
    } else if let Some(ar) = &s.affine_reduction {
        let n = ar.n;
        let mats = ar
            .linear
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, Some((n, n)), &format!("{at}.affine_reduction.linear[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let labels = ar
            .labels
            .clone()
            .unwrap_or_else(|| (1..=mats.len()).map(|i| format!("Y{i}")).collect());
        if labels.len() != mats.len() {
            return Err(CliError::Parse(format!("{at}.affine_reduction.labels: one label per matrix")));
        }
        Skeleton::affine_reduction(n, &mats, &labels).map_err(core)?
    } else if let Some(l) = &s.l {
        let l = lookup(&r.algebras, l, "Lie algebra", &at)?.clone();
        let raw = s
            .l_embed
            .as_ref()
            .ok_or_else(|| CliError::Parse(format!("{at}: explicit skeletons need `l_embed`")))?;
        let emb = matrix(raw, None, &format!("{at}.l_embed"))?;
        let k = s.k_dim.unwrap_or(emb.rows());
        if emb.rows() != k || emb.cols() != l.dim() {
            return Err(CliError::Parse(format!("{at}.l_embed: expected a {k}x{} matrix", l.dim())));
        }
        let drho = s
            .drho
            .as_ref()
            .ok_or_else(|| CliError::Parse(format!("{at}: explicit skeletons need `drho`")))?
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, Some((k, k)), &format!("{at}.drho[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Skeleton::new(l, LinearMap::new(emb), drho).map_err(core)?
    } else {
        return Err(CliError::Parse(format!(
            "{at}: give one of `builtin`, `klein`, `affine_reduction`, or `l`"
        )));
    };
    for (i, m) in s.component_reps.iter().enumerate() {
        let here = format!("{at}.component_reps[{i}]");
        let rep = match &sk.k_realization {
            Some(real) => {
                let n = real.size - 1;
                let p = matrix(m, Some((n, n)), &here)?;
                sk.adjoint_rep(&p).map_err(|e| CliError::from_core_input(e, &here))?
            }
            None => {
                let op = matrix(m, Some((sk.k_dim, sk.k_dim)), &here)?;
                let l_auto = sk.restrict_to_l(&op).map_err(|e| CliError::from_core_input(e, &here))?;
                cartan_core::skeleton::ComponentRep { operator: op, l_auto }
            }
        };
        sk.component_reps.push(rep);
    }
    Ok(sk)
}

/// Resolves every section, in dependency order.
pub fn resolve(p: &ProblemFile) -> Result<Resolved, CliError> {
    let mut r = Resolved::default();
    for (name, a) in &p.lie_algebras {
        r.algebras.insert(name.clone(), resolve_algebra(name, a)?);
    }
    for (name, k) in &p.klein_models {
        let at = format!("klein_models.{name}");
        let g = lookup(&r.algebras, &k.algebra, "Lie algebra", &at)?.clone();
        let rows = k
            .h
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let v = vector(v, &format!("{at}.h[{i}]"))?;
                if v.len() != g.dim() {
                    return Err(CliError::Parse(format!("{at}.h[{i}]: expected {} entries", g.dim())));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let h = Subspace::span(g.dim(), rows).map_err(|e| CliError::from_core_input(e, &at))?;
        let mut km = KleinModel::new(g, h).map_err(|e| CliError::from_core_input(e, &at))?;
        if let Some(a) = p.lie_algebras.get(&k.algebra) {
            if let (Some(b), Some(n)) = (&a.builtin, a.n) {
                km.realization = builtin(b, n).ok().map(|x| x.1);
            }
        }
        r.kleins.insert(name.clone(), km);
    }
    for (name, s) in &p.skeletons {
        let sk = resolve_skeleton(name, s, &r)?;
        r.skeletons.insert(name.clone(), sk);
    }
    for (name, m) in &p.morphisms {
        let at = format!("morphisms.{name}");
        let src = lookup(&r.kleins, &m.source, "klein model", &at)?.clone();
        let tgt = lookup(&r.skeletons, &m.target, "skeleton", &at)?.clone();
        let alpha = matrix(&m.alpha, Some((tgt.k_dim, src.g.dim())), &format!("{at}.alpha"))?;
        let mor = match &m.dj {
            Some(dj) => {
                let dj = matrix(dj, Some((tgt.l_dim(), src.h.dim())), &format!("{at}.dj"))?;
                SkeletonMorphism::new(src, tgt, LinearMap::new(alpha), LinearMap::new(dj))
            }
            None => SkeletonMorphism::with_derived_dj(src, tgt, LinearMap::new(alpha)),
        }
        .map_err(|e| CliError::from_core_input(e, &at))?;
        r.morphisms.insert(name.clone(), mor);
    }
    for (name, s) in &p.s_subspaces {
        let at = format!("s_subspaces.{name}");
        let sk = lookup(&r.skeletons, &s.skeleton, "skeleton", &at)?;
        let k = sk.k_dim;
        let mats = s
            .generators
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, Some((k, k)), &format!("{at}.generators[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let sub = Subspace::span_mats(k * k, &mats).map_err(|e| CliError::from_core_input(e, &at))?;
        r.subspaces.insert(name.clone(), (s.skeleton.clone(), sub));
    }
    for (i, t) in p.tasks.iter().enumerate() {
        let at = format!("tasks[{i}]");
        if let Some(x) = &t.skeleton {
            lookup(&r.skeletons, x, "skeleton", &at)?;
        }
        if let Some(x) = &t.morphism {
            lookup(&r.morphisms, x, "morphism", &at)?;
        }
        if let Some(x) = &t.klein {
            lookup(&r.kleins, x, "klein model", &at)?;
        }
        if let Some(x) = &t.s {
            lookup(&r.subspaces, x, "s subspace", &at)?;
        }
        if !crate::tasks::TASK_KINDS.contains(&t.kind.as_str()) {
            return Err(CliError::Parse(format!("{at}.kind: unknown task kind `{}`", t.kind)));
        }
    }
    Ok(r)
}
