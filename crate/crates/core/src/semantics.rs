//! From derivations to tensor contractions.
//!
//! Each basic type is sent to a finite-dimensional space and compound types
//! to tensor products. Both implications are laid out argument-side first in
//! tree order: `Q(a -o b) = Q(a) (x) Q(b)` and `Q(a o- b) = Q(a) (x) Q(b)`,
//! so the axes of `Q(t)` follow [`LambekType::leaves`].
//!
//! Word tensors are stored in *pregroup layout*: one axis per simple type of
//! the word's pregroup translation, in order. For most entries that is the
//! same as the leaf order; it differs when an argument is itself compound
//! (for `(n -o s) o- (sigma -o j)` the pregroup factors are
//! `n^r s j^l sigma`). The Lambek compiler permutes words into leaf order on
//! load.
//!
//! Compiled programs are [`ContractionPlan`]s: a small stack machine that is
//! shape-checked while it is built.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lambek::{self, CheckError, Derivation};
use crate::lexicon::{Grammar, LexiconEntry};
use crate::pregroup::{self, Reduction};
use crate::tensor::{contract, tensor_product, Tensor, TensorError};
use crate::types::{translate_with_leaves, BasicType, LambekType};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("basic type `{0}` has no vector space")]
    Unassigned(String),
    #[error("link ({i}, {j}) joins axes of dimension {di} and {dj}")]
    LinkMismatch {
        i: usize,
        j: usize,
        di: usize,
        dj: usize,
    },
    #[error("word `{word}` has no tensor binding")]
    MissingBinding { word: String },
    #[error("tensor for `{word}` has shape {found:?}, expected {expected:?}")]
    BindingShape {
        word: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("no verb tensor of `{word}` fits shape {expected:?}; the sentence space is sized for another arity")]
    VerbShape { word: String, expected: Vec<usize> },
    #[error("cannot bind `{word}` as a name: {reason}")]
    BadName { word: String, reason: String },
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("sentence is not grammatical")]
    Ungrammatical,
    #[error("derivation does not fit the sentence: {0}")]
    Domain(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("plan error: {0}")]
    Plan(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Logic {
    Pregroup,
    Lambek,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Pregroup => "pregroup",
            Logic::Lambek => "lambek",
        })
    }
}

impl std::str::FromStr for Logic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pregroup" => Ok(Logic::Pregroup),
            "lambek" => Ok(Logic::Lambek),
            other => Err(format!("unknown logic `{other}` (pregroup|lambek)")),
        }
    }
}

/// Dimensions of the named spaces plus the basic-type aliases into them.
/// A basic type with no alias is looked up as a space name directly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceAssignment {
    pub spaces: BTreeMap<String, usize>,
    #[serde(default = "default_aliases")]
    pub aliases: BTreeMap<String, String>,
}

fn default_aliases() -> BTreeMap<String, String> {
    [("n", "N"), ("sigma", "N"), ("s", "S"), ("j", "S")]
        .into_iter()
        .map(|(b, s)| (b.to_string(), s.to_string()))
        .collect()
}

impl SpaceAssignment {
    /// Noun space `N` and sentence space `S` with the standard aliases.
    pub fn new(n: usize, s: usize) -> Self {
        SpaceAssignment {
            spaces: [("N".to_string(), n), ("S".to_string(), s)].into(),
            aliases: default_aliases(),
        }
    }

    pub fn with_alias(mut self, basic: &str, space: &str) -> Self {
        self.aliases.insert(basic.to_string(), space.to_string());
        self
    }

    pub fn dim(&self, b: &BasicType) -> Result<usize, SemanticsError> {
        let space = self.aliases.get(b.name()).map_or(b.name(), String::as_str);
        self.spaces
            .get(space)
            .copied()
            .ok_or_else(|| SemanticsError::Unassigned(b.to_string()))
    }

    pub fn n(&self) -> Option<usize> {
        self.spaces.get("N").copied()
    }

    pub fn s(&self) -> Option<usize> {
        self.spaces.get("S").copied()
    }
}

/// Shape of `Q(t)`: one axis per basic leaf, in leaf order.
pub fn quantise_type(t: &LambekType, sa: &SpaceAssignment) -> Result<Vec<usize>, SemanticsError> {
    t.leaves().iter().map(|b| sa.dim(b)).collect()
}

/// Shape of a word tensor for `t` in pregroup layout.
pub fn pregroup_shape(t: &LambekType, sa: &SpaceAssignment) -> Result<Vec<usize>, SemanticsError> {
    translate_with_leaves(t)
        .iter()
        .map(|(st, _)| sa.dim(&st.base))
        .collect()
}

/// Permutation taking a pregroup-layout tensor for `t` to leaf layout, in
/// the convention of [`Tensor::permute`].
pub fn pregroup_to_leaf_perm(t: &LambekType) -> Vec<usize> {
    let tagged = translate_with_leaves(t);
    let mut perm = vec![0; tagged.len()];
    for (pos, (_, leaf)) in tagged.iter().enumerate() {
        perm[*leaf] = pos;
    }
    perm
}

/// Which side the name's argument sits on in the tensor layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameSide {
    /// `1 -> a -o b`: argument axes first.
    Left,
    /// `1 -> b o- a`: argument axes last.
    Right,
}

/// The name of a linear map given as a matrix with rows indexing outputs.
/// Evaluating it against `v` on the argument side yields `m v`.
pub fn name_tensor(m: &Tensor, side: NameSide) -> Result<Tensor, SemanticsError> {
    if m.rank() != 2 {
        return Err(TensorError::Rank {
            expected: 2,
            shape: m.shape().to_vec(),
        }
        .into());
    }
    Ok(match side {
        NameSide::Right => m.clone(),
        NameSide::Left => m.permute(&[1, 0])?,
    })
}

/// Name of the map on `dims` that applies the square `m` along `axis` and
/// is the identity on every other axis. Shape `dims ++ dims`.
pub fn lifted_name(
    m: &Tensor,
    dims: &[usize],
    axis: usize,
    side: NameSide,
) -> Result<Tensor, SemanticsError> {
    if axis >= dims.len() {
        return Err(TensorError::BadAxes(axis, axis, dims.len()).into());
    }
    let id = Tensor::identity(dims);
    let out_axis = match side {
        NameSide::Left => dims.len() + axis,
        NameSide::Right => axis,
    };
    Ok(id.apply_matrix(m, out_axis)?)
}

/// A name binding: a square matrix acting on one axis of the argument space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NameBinding {
    pub matrix: Tensor,
    /// Axis of the argument space the matrix acts on under the Lambek
    /// logic; defaults to the last one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
}

/// The two-dimensional swap used for negation in truth-valued models.
pub fn swap_matrix() -> Tensor {
    Tensor::new(vec![2, 2], vec![0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

/// Word tensor (pregroup layout) for a word of type `b o- a` or `a -o b`
/// bound to a name.
///
/// The argument and result spaces must have the same shape. Under the
/// pregroup logic the matrix acts on the last axis of the argument space,
/// as the compact reading places the operator on the sentence wire. Under
/// the Lambek logic it acts on `binding.axis`.
pub fn name_word_tensor(
    word: &str,
    ty: &LambekType,
    binding: &NameBinding,
    sa: &SpaceAssignment,
    logic: Logic,
) -> Result<Tensor, SemanticsError> {
    let bad = |reason: String| SemanticsError::BadName {
        word: word.to_string(),
        reason,
    };
    let (result, arg, side) = match ty {
        LambekType::RImpl(a, b) => (a, b, NameSide::Right),
        LambekType::LImpl(a, b) => (b, a, NameSide::Left),
        _ => return Err(bad(format!("type {ty} is not an implication"))),
    };
    let dims = quantise_type(arg, sa)?;
    if quantise_type(result, sa)? != dims {
        return Err(bad(format!("{arg} and {result} have different shapes")));
    }
    if dims.is_empty() {
        return Err(bad("argument space is trivial".into()));
    }
    let axis = match logic {
        Logic::Pregroup => dims.len() - 1,
        Logic::Lambek => binding.axis.unwrap_or(dims.len() - 1),
    };
    if axis >= dims.len() {
        return Err(bad(format!("axis {axis} out of range for {dims:?}")));
    }
    let d = dims[axis];
    if binding.matrix.shape() != [d, d] {
        return Err(bad(format!(
            "matrix shape {:?} does not act on dimension {d}",
            binding.matrix.shape()
        )));
    }
    let leaf = lifted_name(&binding.matrix, &dims, axis, side)?;
    // Leaf layout to pregroup layout: pregroup axis p is leaf axis tag[p].
    let tags: Vec<usize> = translate_with_leaves(ty).iter().map(|(_, l)| *l).collect();
    Ok(leaf.permute(&tags)?)
}

/// Supplies word tensors in pregroup layout.
pub trait TensorSource {
    fn spaces(&self) -> &SpaceAssignment;
    fn word_tensor(&self, entry: &LexiconEntry, logic: Logic) -> Result<Tensor, SemanticsError>;
}

/// Explicit per-word bindings, mostly for tests and small hand-made models.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    pub spaces: Option<SpaceAssignment>,
    pub tensors: BTreeMap<String, Tensor>,
    pub names: BTreeMap<String, NameBinding>,
}

impl Bindings {
    pub fn new(spaces: SpaceAssignment) -> Self {
        Bindings {
            spaces: Some(spaces),
            ..Bindings::default()
        }
    }

    pub fn tensor(mut self, word: &str, t: Tensor) -> Self {
        self.tensors.insert(word.to_string(), t);
        self
    }

    pub fn name(mut self, word: &str, matrix: Tensor, axis: Option<usize>) -> Self {
        self.names
            .insert(word.to_string(), NameBinding { matrix, axis });
        self
    }
}

/// Checks a bound tensor against the entry's pregroup shape.
pub fn check_binding(
    entry: &LexiconEntry,
    t: &Tensor,
    sa: &SpaceAssignment,
) -> Result<(), SemanticsError> {
    let expected = pregroup_shape(&entry.lambek_type, sa)?;
    if t.shape() != expected.as_slice() {
        return Err(SemanticsError::BindingShape {
            word: entry.word.clone(),
            expected,
            found: t.shape().to_vec(),
        });
    }
    Ok(())
}

impl TensorSource for Bindings {
    fn spaces(&self) -> &SpaceAssignment {
        self.spaces.as_ref().expect("bindings without spaces")
    }

    fn word_tensor(&self, entry: &LexiconEntry, logic: Logic) -> Result<Tensor, SemanticsError> {
        let sa = self.spaces();
        if let Some(b) = self.names.get(&entry.word) {
            return name_word_tensor(&entry.word, &entry.lambek_type, b, sa, logic);
        }
        let t = self
            .tensors
            .get(&entry.word)
            .ok_or_else(|| SemanticsError::MissingBinding {
                word: entry.word.clone(),
            })?;
        check_binding(entry, t, sa)?;
        Ok(t.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Push the tensor of input `slot`.
    LoadWord { slot: usize },
    /// Push the identity on `dims` (shape `dims ++ dims`).
    Identity { dims: Vec<usize> },
    /// Pop `b`, pop `a`, push `a (x) b`.
    TensorJoin,
    Contract { i: usize, j: usize },
    Permute { perm: Vec<usize> },
    /// Apply the named plan matrix along `axis`.
    ApplyMatrix { name: String, axis: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionPlan {
    pub input_shapes: Vec<Vec<usize>>,
    pub output_shape: Vec<usize>,
    pub steps: Vec<Step>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices: BTreeMap<String, Tensor>,
}

impl ContractionPlan {
    pub fn execute(&self, inputs: &[Tensor]) -> Result<Tensor, SemanticsError> {
        if inputs.len() != self.input_shapes.len() {
            return Err(SemanticsError::Plan(format!(
                "expected {} inputs, got {}",
                self.input_shapes.len(),
                inputs.len()
            )));
        }
        for (t, shape) in inputs.iter().zip(&self.input_shapes) {
            if t.shape() != shape.as_slice() {
                return Err(TensorError::ShapeMismatch(t.shape().to_vec(), shape.clone()).into());
            }
        }
        let underflow = || SemanticsError::Plan("stack underflow".into());
        let mut stack: Vec<Tensor> = Vec::new();
        for step in &self.steps {
            match step {
                Step::LoadWord { slot } => stack.push(inputs[*slot].clone()),
                Step::Identity { dims } => stack.push(Tensor::identity(dims)),
                Step::TensorJoin => {
                    let b = stack.pop().ok_or_else(underflow)?;
                    let a = stack.pop().ok_or_else(underflow)?;
                    stack.push(tensor_product(&a, &b));
                }
                Step::Contract { i, j } => {
                    let t = stack.pop().ok_or_else(underflow)?;
                    stack.push(contract(&t, *i, *j)?);
                }
                Step::Permute { perm } => {
                    let t = stack.pop().ok_or_else(underflow)?;
                    stack.push(t.permute(perm)?);
                }
                Step::ApplyMatrix { name, axis } => {
                    let m = self.matrices.get(name).ok_or_else(|| {
                        SemanticsError::Plan(format!("unknown matrix `{name}`"))
                    })?;
                    let t = stack.pop().ok_or_else(underflow)?;
                    stack.push(t.apply_matrix(m, *axis)?);
                }
            }
        }
        match (stack.pop(), stack.is_empty()) {
            (Some(t), true) => Ok(t),
            _ => Err(SemanticsError::Plan(
                "plan must leave exactly one tensor".into(),
            )),
        }
    }

    /// Number of contraction steps.
    pub fn contractions(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Contract { .. }))
            .count()
    }
}

/// Emits steps while tracking the shape stack, so ill-formed plans are
/// caught at compile time.
#[derive(Debug)]
pub struct PlanBuilder {
    input_shapes: Vec<Vec<usize>>,
    steps: Vec<Step>,
    stack: Vec<Vec<usize>>,
    matrices: BTreeMap<String, Tensor>,
}

impl PlanBuilder {
    pub fn new(input_shapes: Vec<Vec<usize>>) -> Self {
        PlanBuilder {
            input_shapes,
            steps: Vec::new(),
            stack: Vec::new(),
            matrices: BTreeMap::new(),
        }
    }

    fn top(&mut self) -> Result<&mut Vec<usize>, SemanticsError> {
        self.stack
            .last_mut()
            .ok_or_else(|| SemanticsError::Plan("stack underflow".into()))
    }

    pub fn top_rank(&self) -> usize {
        self.stack.last().map_or(0, Vec::len)
    }

    pub fn load(&mut self, slot: usize) -> Result<(), SemanticsError> {
        let shape = self
            .input_shapes
            .get(slot)
            .ok_or_else(|| SemanticsError::Plan(format!("no input slot {slot}")))?
            .clone();
        self.stack.push(shape);
        self.steps.push(Step::LoadWord { slot });
        Ok(())
    }

    pub fn identity(&mut self, dims: &[usize]) {
        let mut shape = dims.to_vec();
        shape.extend_from_slice(dims);
        self.stack.push(shape);
        self.steps.push(Step::Identity {
            dims: dims.to_vec(),
        });
    }

    pub fn join(&mut self) -> Result<(), SemanticsError> {
        let b = self.stack.pop();
        let top = self.top()?;
        let b = b.ok_or_else(|| SemanticsError::Plan("stack underflow".into()))?;
        top.extend(b);
        self.steps.push(Step::TensorJoin);
        Ok(())
    }

    pub fn contract(&mut self, i: usize, j: usize) -> Result<(), SemanticsError> {
        let top = self.top()?;
        let r = top.len();
        if i == j || i >= r || j >= r {
            return Err(TensorError::BadAxes(i, j, r).into());
        }
        if top[i] != top[j] {
            return Err(TensorError::DimensionMismatch {
                i,
                j,
                di: top[i],
                dj: top[j],
            }
            .into());
        }
        let (lo, hi) = (i.min(j), i.max(j));
        top.remove(hi);
        top.remove(lo);
        self.steps.push(Step::Contract { i, j });
        Ok(())
    }

    pub fn permute(&mut self, perm: Vec<usize>) -> Result<(), SemanticsError> {
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(());
        }
        let top = self.top()?;
        let mut seen = vec![false; top.len()];
        if perm.len() != top.len()
            || perm
                .iter()
                .any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true))
        {
            return Err(TensorError::BadPermutation(perm).into());
        }
        *top = perm.iter().map(|&p| top[p]).collect();
        self.steps.push(Step::Permute { perm });
        Ok(())
    }

    pub fn apply_matrix(
        &mut self,
        name: &str,
        m: Tensor,
        axis: usize,
    ) -> Result<(), SemanticsError> {
        let top = self.top()?;
        if axis >= top.len() || m.shape() != [top[axis], top[axis]] {
            return Err(SemanticsError::Plan(format!(
                "matrix `{name}` of shape {:?} does not act on axis {axis} of {top:?}",
                m.shape()
            )));
        }
        self.matrices.insert(name.to_string(), m);
        self.steps.push(Step::ApplyMatrix {
            name: name.to_string(),
            axis,
        });
        Ok(())
    }

    pub fn finish(mut self) -> Result<ContractionPlan, SemanticsError> {
        match (self.stack.pop(), self.stack.is_empty()) {
            (Some(output_shape), true) => Ok(ContractionPlan {
                input_shapes: self.input_shapes,
                output_shape,
                steps: self.steps,
                matrices: self.matrices,
            }),
            _ => Err(SemanticsError::Plan(
                "plan must leave exactly one tensor".into(),
            )),
        }
    }
}

/// Compiles a pregroup reduction. Words are loaded left to right and every
/// link is contracted as soon as both of its ends are on the tensor, which
/// keeps intermediate ranks small. Residual axes come out in input order.
pub fn compile_pregroup(
    r: &Reduction,
    word_spans: &[Range<usize>],
    sa: &SpaceAssignment,
) -> Result<ContractionPlan, SemanticsError> {
    r.validate().map_err(SemanticsError::Plan)?;
    let dims: Vec<usize> = r
        .input
        .iter()
        .map(|st| sa.dim(&st.base))
        .collect::<Result<_, _>>()?;
    for &(i, j) in &r.links {
        if dims[i] != dims[j] {
            return Err(SemanticsError::LinkMismatch {
                i,
                j,
                di: dims[i],
                dj: dims[j],
            });
        }
    }
    let covered: usize = word_spans.iter().map(|s| s.len()).sum();
    if covered != r.input.len()
        || word_spans
            .iter()
            .zip(word_spans.iter().skip(1))
            .any(|(a, b)| a.end != b.start)
    {
        return Err(SemanticsError::Plan(
            "word spans do not tile the reduction input".into(),
        ));
    }
    let shapes = word_spans.iter().map(|s| dims[s.clone()].to_vec()).collect();
    let mut b = PlanBuilder::new(shapes);
    // Factor index carried by each axis of the working tensor.
    let mut axes: Vec<usize> = Vec::new();
    let mut by_right: BTreeMap<usize, usize> = BTreeMap::new();
    for &(i, j) in &r.links {
        by_right.insert(j, i);
    }
    for (slot, span) in word_spans.iter().enumerate() {
        b.load(slot)?;
        if slot > 0 {
            b.join()?;
        }
        axes.extend(span.clone());
        for j in span.clone() {
            if let Some(&i) = by_right.get(&j) {
                let pi = axes.iter().position(|&a| a == i).expect("left end loaded");
                let pj = axes.iter().position(|&a| a == j).expect("right end loaded");
                b.contract(pi, pj)?;
                axes.retain(|&a| a != i && a != j);
            }
        }
    }
    if word_spans.is_empty() {
        b.identity(&[]);
    }
    b.finish()
}

struct LambekCompiler<'a> {
    sa: &'a SpaceAssignment,
    b: PlanBuilder,
    /// Number of flattened antecedent items contributed by each word.
    items: Vec<usize>,
    /// Pregroup-to-leaf permutation per word.
    perms: Vec<Vec<usize>>,
}

fn flat_len(t: &LambekType) -> usize {
    t.flatten().len()
}

impl LambekCompiler<'_> {
    fn q(&self, t: &LambekType) -> Result<Vec<usize>, SemanticsError> {
        quantise_type(t, self.sa)
    }

    /// Loads the words of `words` as one tensor in leaf layout.
    fn materialize(&mut self, words: Range<usize>) -> Result<(), SemanticsError> {
        if words.is_empty() {
            self.b.identity(&[]);
            return Ok(());
        }
        for (k, w) in words.enumerate() {
            self.b.load(w)?;
            self.b.permute(self.perms[w].clone())?;
            if k > 0 {
                self.b.join()?;
            }
        }
        Ok(())
    }

    /// The word index at which the first `len` items of `words` end.
    fn split(&self, words: &Range<usize>, len: usize) -> Option<usize> {
        let mut acc = 0;
        for w in words.clone() {
            if acc == len {
                return Some(w);
            }
            acc += self.items[w];
        }
        (acc == len).then_some(words.end)
    }

    /// Compiles `d` over the words in `words`, splitting parallel
    /// composites at word boundaries so each side is reduced before the
    /// two are joined.
    fn lazy(&mut self, d: &Derivation, words: Range<usize>) -> Result<(), SemanticsError> {
        match d {
            Derivation::Par(f, g) => {
                let lf = flat_len(&f.domain());
                if let Some(k) = self.split(&words, lf) {
                    self.lazy(f, words.start..k)?;
                    self.lazy(g, k..words.end)?;
                    return self.b.join();
                }
            }
            Derivation::Compose(g, f) => {
                self.lazy(f, words)?;
                return self.at(g, 0);
            }
            _ => {}
        }
        self.materialize(words)?;
        self.at(d, 0)
    }

    /// Applies `d` to the block of the working tensor starting at axis `o`.
    fn at(&mut self, d: &Derivation, o: usize) -> Result<(), SemanticsError> {
        use Derivation::*;
        match d {
            Id(_) => Ok(()),
            EvL(a, _) => {
                let na = self.q(a)?.len();
                for k in 0..na {
                    self.b.contract(o, o + na - k)?;
                }
                Ok(())
            }
            EvR(a, b) => {
                let (na, nb) = (self.q(a)?.len(), self.q(b)?.len());
                for k in 0..nb {
                    self.b.contract(o + na, o + na + nb - k)?;
                }
                Ok(())
            }
            CurryL(a, f) => {
                let qa = self.q(a)?;
                self.insert_identity(&qa, o)?;
                self.at(f, o + qa.len())
            }
            CurryR(bt, g) => {
                let qb = self.q(bt)?;
                let qc = self.q(&g.domain())?.len() - qb.len();
                self.insert_identity(&qb, o + qc)?;
                self.at(g, o)
            }
            NameL(f) => {
                let qa = self.q(&f.domain())?;
                self.insert_identity(&qa, o)?;
                self.at(f, o + qa.len())
            }
            NameR(f) => {
                let qa = self.q(&f.domain())?;
                self.insert_identity(&qa, o)?;
                self.at(f, o)
            }
            Compose(g, f) => {
                self.at(f, o)?;
                self.at(g, o)
            }
            Par(f, g) => {
                let nf = self.q(&f.codomain())?.len();
                self.at(f, o)?;
                self.at(g, o + nf)
            }
        }
    }

    /// Places the identity on `dims` (both copies) at axis `pos`.
    fn insert_identity(&mut self, dims: &[usize], pos: usize) -> Result<(), SemanticsError> {
        if dims.is_empty() {
            return Ok(());
        }
        let r = self.b.top_rank();
        self.b.identity(dims);
        self.b.join()?;
        let m = 2 * dims.len();
        let perm: Vec<usize> = (0..pos).chain(r..r + m).chain(pos..r).collect();
        self.b.permute(perm)
    }
}

/// Compiles a Lambek derivation whose domain is the product of the word
/// types, reading word tensors in pregroup layout.
pub fn compile_lambek(
    d: &Derivation,
    word_types: &[LambekType],
    sa: &SpaceAssignment,
) -> Result<ContractionPlan, SemanticsError> {
    let (dom, _) = d.check()?;
    let expected: Vec<LambekType> = word_types.iter().flat_map(LambekType::flatten).collect();
    if dom.flatten() != expected {
        return Err(SemanticsError::Domain(format!(
            "derivation domain {dom} vs sentence {}",
            LambekType::product_of(word_types)
        )));
    }
    let shapes = word_types
        .iter()
        .map(|t| pregroup_shape(t, sa))
        .collect::<Result<_, _>>()?;
    let mut c = LambekCompiler {
        sa,
        b: PlanBuilder::new(shapes),
        items: word_types.iter().map(flat_len).collect(),
        perms: word_types.iter().map(pregroup_to_leaf_perm).collect(),
    };
    c.lazy(d, 0..word_types.len())?;
    c.b.finish()
}

/// Compiles `d` as a map on a single input of shape `Q(dom d)`.
pub fn compile_morphism(d: &Derivation, sa: &SpaceAssignment) -> Result<ContractionPlan, SemanticsError> {
    let (dom, _) = d.check()?;
    let mut c = LambekCompiler {
        sa,
        b: PlanBuilder::new(vec![quantise_type(&dom, sa)?]),
        items: vec![flat_len(&dom)],
        perms: vec![Vec::new()],
    };
    c.b.load(0)?;
    c.at(d, 0)?;
    c.b.finish()
}

/// A sentence meaning together with the program that produced it.
#[derive(Clone, Debug)]
pub struct Meaning {
    pub vector: Tensor,
    pub plan: ContractionPlan,
    pub target: BasicType,
    pub types: Vec<LambekType>,
}

/// Parses `words` under `logic`, compiles the result and runs it on the
/// word tensors from `source`, in sentence order.
pub fn meaning(
    words: &[String],
    grammar: &Grammar,
    source: &dyn TensorSource,
    logic: Logic,
) -> Result<Meaning, SemanticsError> {
    let sa = source.spaces();
    let (entries, plan, target) = match logic {
        Logic::Pregroup => {
            let p = pregroup::parse(grammar, words)
                .map_err(SemanticsError::UnknownWord)?
                .ok_or(SemanticsError::Ungrammatical)?;
            let plan = compile_pregroup(&p.reduction, &p.word_spans, sa)?;
            (p.entries, plan, p.target)
        }
        Logic::Lambek => {
            let p = lambek::parse(grammar, words)
                .map_err(SemanticsError::UnknownWord)?
                .ok_or(SemanticsError::Ungrammatical)?;
            let types: Vec<LambekType> = p.entries.iter().map(|e| e.lambek_type.clone()).collect();
            let plan = compile_lambek(&p.derivation, &types, sa)?;
            (p.entries, plan, p.target)
        }
    };
    let inputs = entries
        .iter()
        .map(|e| source.word_tensor(e, logic))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Meaning {
        vector: plan.execute(&inputs)?,
        plan,
        target,
        types: entries.iter().map(|e| e.lambek_type.clone()).collect(),
    })
}
