//! Corpus-derived vector space models.
//!
//! A corpus is UTF-8 text with one sentence per line. Lines are also the
//! documents for inverse document frequency. Tokens are whitespace-separated
//! and lowercased; blank lines are ignored.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::LexiconEntry;
use crate::semantics::{
    check_binding, name_word_tensor, pregroup_shape, Logic, NameBinding, SemanticsError,
    SpaceAssignment, TensorSource,
};
use crate::tensor::{kronecker_power, tensor_product, Tensor, TensorError};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("basis size must be at least 1")]
    ZeroBasis,
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error("triples line {line}: {message}")]
    Triples { line: usize, message: String },
    #[error("verb `{verb}` has no arity-{arity} triples")]
    VerbAbsent { verb: String, arity: usize },
    #[error("no vector for `{0}`")]
    MissingVector(String),
    #[error("cannot embed a tensor of shape {from:?} into shape {to:?}")]
    Embed { from: Vec<usize>, to: Vec<usize> },
    #[error("malformed model: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Tokenized non-blank lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub lines: Vec<Vec<String>>,
}

impl Corpus {
    pub fn from_text(text: &str) -> Self {
        let lines = text
            .lines()
            .map(|l| {
                l.split_whitespace()
                    .map(str::to_lowercase)
                    .collect::<Vec<_>>()
            })
            .filter(|toks| !toks.is_empty())
            .collect();
        Corpus { lines }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Ok(Corpus::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn documents(&self) -> usize {
        self.lines.len()
    }

    pub fn frequencies(&self) -> HashMap<&str, usize> {
        let mut freq = HashMap::new();
        for tok in self.lines.iter().flatten() {
            *freq.entry(tok.as_str()).or_insert(0) += 1;
        }
        freq
    }

    /// Number of lines containing `word`.
    pub fn document_frequency(&self, word: &str) -> usize {
        self.lines
            .iter()
            .filter(|l| l.iter().any(|t| t == word))
            .count()
    }
}

/// The `size` most frequent tokens, ties broken alphabetically.
pub fn build_basis(corpus: &Corpus, size: usize) -> Result<Vec<String>, ModelError> {
    if size == 0 {
        return Err(ModelError::ZeroBasis);
    }
    let freq = corpus.frequencies();
    if freq.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let mut ranked: Vec<(&str, usize)> = freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    Ok(ranked
        .into_iter()
        .take(size)
        .map(|(w, _)| w.to_string())
        .collect())
}

/// Windowed co-occurrence counts against `basis`, `window` tokens either
/// side, never crossing a line. Every corpus token gets an entry.
pub fn cooccurrence(
    corpus: &Corpus,
    basis: &[String],
    window: usize,
) -> Result<BTreeMap<String, Vec<f64>>, ModelError> {
    if window == 0 {
        return Err(ModelError::ZeroWindow);
    }
    let index: HashMap<&str, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, b)| (b.as_str(), i))
        .collect();
    let mut counts: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for line in &corpus.lines {
        for (p, word) in line.iter().enumerate() {
            let row = counts
                .entry(word.clone())
                .or_insert_with(|| vec![0.0; basis.len()]);
            let lo = p.saturating_sub(window);
            let hi = (p + window).min(line.len() - 1);
            for (q, ctx) in line.iter().enumerate().take(hi + 1).skip(lo) {
                if q == p {
                    continue;
                }
                if let Some(&b) = index.get(ctx.as_str()) {
                    row[b] += 1.0;
                }
            }
        }
    }
    Ok(counts)
}

/// `tf(w, b) * ln(D / df(b))` with `tf` the window count and documents the
/// corpus lines.
pub fn tfidf(
    counts: &BTreeMap<String, Vec<f64>>,
    corpus: &Corpus,
    basis: &[String],
) -> BTreeMap<String, Vec<f64>> {
    let d = corpus.documents() as f64;
    let idf: Vec<f64> = basis
        .iter()
        .map(|b| {
            let df = corpus.document_frequency(b);
            if df == 0 {
                0.0
            } else {
                (d / df as f64).ln()
            }
        })
        .collect();
    counts
        .iter()
        .map(|(w, row)| {
            (
                w.clone(),
                row.iter().zip(&idf).map(|(tf, idf)| tf * idf).collect(),
            )
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Raw,
    Tfidf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerbMethod {
    Cat1,
    Cat2,
}

impl std::str::FromStr for VerbMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cat1" => Ok(VerbMethod::Cat1),
            "cat2" => Ok(VerbMethod::Cat2),
            other => Err(format!("unknown method `{other}` (cat1|cat2)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub window: usize,
    pub weighting: Weighting,
}

/// Relational verb tensors (rank = arity, every axis the noun space).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerbTensors {
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cat1: Option<Tensor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cat2: Option<Tensor>,
}

impl VerbTensors {
    pub fn get(&self, method: VerbMethod) -> Option<&Tensor> {
        match method {
            VerbMethod::Cat1 => self.cat1.as_ref(),
            VerbMethod::Cat2 => self.cat2.as_ref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorSpaceModel {
    pub basis: Vec<String>,
    pub vectors: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verbs: BTreeMap<String, Vec<VerbTensors>>,
    pub meta: ModelMeta,
    /// Space dimensions; derived from the basis and verb arity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spaces: Option<SpaceAssignment>,
    /// Explicit word tensors in pregroup layout.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tensors: BTreeMap<String, Tensor>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub names: BTreeMap<String, NameBinding>,
}

impl VectorSpaceModel {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        VectorSpaceModel::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serialises");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn vector(&self, word: &str) -> Option<Tensor> {
        self.vectors.get(word).map(|v| Tensor::vector(v.clone()))
    }

    pub fn verb(&self, word: &str, arity: usize) -> Option<&VerbTensors> {
        self.verbs.get(word)?.iter().find(|v| v.arity == arity)
    }

    /// Stores `t` as the `method` tensor of `word` at `arity`.
    pub fn set_verb(&mut self, word: &str, arity: usize, method: VerbMethod, t: Tensor) {
        let list = self.verbs.entry(word.to_string()).or_default();
        let slot = match list.iter().position(|v| v.arity == arity) {
            Some(i) => &mut list[i],
            None => {
                list.push(VerbTensors {
                    arity,
                    cat1: None,
                    cat2: None,
                });
                list.sort_by_key(|v| v.arity);
                list.iter_mut().find(|v| v.arity == arity).expect("inserted")
            }
        };
        match method {
            VerbMethod::Cat1 => slot.cat1 = Some(t),
            VerbMethod::Cat2 => slot.cat2 = Some(t),
        }
    }

    /// The configured spaces, or `N = |basis|` and `S = N^k` for the largest
    /// verb arity `k` (1 if there are no verbs).
    pub fn space_assignment(&self) -> SpaceAssignment {
        if let Some(sa) = &self.spaces {
            return sa.clone();
        }
        let n = self.basis.len();
        let k = self
            .verbs
            .values()
            .flatten()
            .map(|v| v.arity)
            .max()
            .unwrap_or(1);
        SpaceAssignment::new(n, n.pow(k as u32))
    }

    pub fn view(&self, method: VerbMethod) -> ModelView<'_> {
        ModelView {
            model: self,
            method,
            spaces: self.space_assignment(),
        }
    }
}

/// Counts a corpus and builds word vectors over its `basis_size` most
/// frequent tokens.
pub fn build_model(
    corpus: &Corpus,
    basis_size: usize,
    window: usize,
    weighting: Weighting,
) -> Result<VectorSpaceModel, ModelError> {
    let basis = build_basis(corpus, basis_size)?;
    let counts = cooccurrence(corpus, &basis, window)?;
    let vectors = match weighting {
        Weighting::Raw => counts,
        Weighting::Tfidf => tfidf(&counts, corpus, &basis),
    };
    Ok(VectorSpaceModel {
        basis,
        vectors,
        verbs: BTreeMap::new(),
        meta: ModelMeta { window, weighting },
        spaces: None,
        tensors: BTreeMap::new(),
        names: BTreeMap::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyTriple {
    pub subject: String,
    pub verb: String,
    pub object: Option<String>,
}

impl DependencyTriple {
    pub fn arity(&self) -> usize {
        if self.object.is_some() {
            2
        } else {
            1
        }
    }
}

/// Parses `subject<TAB>verb<TAB>object` lines; the object column may be
/// empty or missing. Blank lines and lines starting with `#` are skipped.
pub fn parse_triples(text: &str) -> Result<Vec<DependencyTriple>, ModelError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let err = |message: &str| ModelError::Triples {
            line: i + 1,
            message: message.to_string(),
        };
        if cols.len() < 2 || cols.len() > 3 {
            return Err(err("expected 2 or 3 tab-separated columns"));
        }
        if cols[0].is_empty() || cols[1].is_empty() {
            return Err(err("subject and verb must be non-empty"));
        }
        out.push(DependencyTriple {
            subject: cols[0].to_lowercase(),
            verb: cols[1].to_lowercase(),
            object: cols
                .get(2)
                .filter(|o| !o.is_empty())
                .map(|o| o.to_lowercase()),
        });
    }
    Ok(out)
}

pub fn load_triples(path: impl AsRef<Path>) -> Result<Vec<DependencyTriple>, ModelError> {
    parse_triples(&std::fs::read_to_string(path)?)
}

/// Sum over the verb's arity-matching occurrences of the tensor product of
/// its argument vectors.
pub fn verb_tensor_cat1(
    verb: &str,
    arity: usize,
    triples: &[DependencyTriple],
    vectors: &BTreeMap<String, Vec<f64>>,
) -> Result<Tensor, ModelError> {
    let vec_of = |w: &str| {
        vectors
            .get(w)
            .map(|v| Tensor::vector(v.clone()))
            .ok_or_else(|| ModelError::MissingVector(w.to_string()))
    };
    let mut acc: Option<Tensor> = None;
    for t in triples.iter().filter(|t| t.verb == verb && t.arity() == arity) {
        let mut term = vec_of(&t.subject)?;
        if let Some(o) = &t.object {
            term = tensor_product(&term, &vec_of(o)?);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    acc.ok_or(ModelError::VerbAbsent {
        verb: verb.to_string(),
        arity,
    })
}

/// `v (x) ... (x) v` with `arity` factors of the verb's own vector.
pub fn verb_tensor_cat2(
    verb: &str,
    arity: usize,
    vectors: &BTreeMap<String, Vec<f64>>,
) -> Result<Tensor, ModelError> {
    let v = vectors
        .get(verb)
        .ok_or_else(|| ModelError::MissingVector(verb.to_string()))?;
    Ok(kronecker_power(&Tensor::vector(v.clone()), arity)?)
}

/// Fills in cat1 and cat2 tensors for every verb and arity in `triples`.
/// Cat1 sums argument vectors from `arguments`, which defaults to the
/// model's own vectors.
pub fn build_verbs(
    model: &mut VectorSpaceModel,
    triples: &[DependencyTriple],
    arguments: Option<&BTreeMap<String, Vec<f64>>>,
) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    let mut keys = Vec::new();
    for t in triples {
        if seen.insert((t.verb.clone(), t.arity())) {
            keys.push((t.verb.clone(), t.arity()));
        }
    }
    for (verb, arity) in keys {
        let args = arguments.unwrap_or(&model.vectors);
        let cat1 = verb_tensor_cat1(&verb, arity, triples, args)?;
        let cat2 = verb_tensor_cat2(&verb, arity, &model.vectors)?;
        model.set_verb(&verb, arity, VerbMethod::Cat1, cat1);
        model.set_verb(&verb, arity, VerbMethod::Cat2, cat2);
    }
    Ok(())
}

/// Places a relational tensor `t` (rank `k`, all axes `N`) into the verb
/// layout `[N, N^k, N, ..., N]` (subject, sentence, remaining arguments)
/// with `u[i1, (i1..ik), i2, ..., ik] = t[i1, ..., ik]` and zeros elsewhere.
pub fn embed_diagonal(t: &Tensor, target: &[usize]) -> Result<Tensor, ModelError> {
    let k = t.rank();
    let bad = || ModelError::Embed {
        from: t.shape().to_vec(),
        to: target.to_vec(),
    };
    if k == 0 {
        return Err(bad());
    }
    let n = t.shape()[0];
    let mut expected = vec![n, n.pow(k as u32)];
    expected.extend(std::iter::repeat_n(n, k - 1));
    if t.shape().iter().any(|&d| d != n) || target != expected.as_slice() {
        return Err(bad());
    }
    let s = n.pow(k as u32);
    let mut u = vec![0.0; n * s * n.pow(k as u32 - 1)];
    let rest = n.pow(k as u32 - 1);
    for (flat, &x) in t.data().iter().enumerate() {
        // flat = i1 * rest + r, with r indexing (i2..ik).
        let i1 = flat / rest;
        let r = flat % rest;
        u[(i1 * s + flat) * rest + r] = x;
    }
    Ok(Tensor::new(expected, u)?)
}

/// A model read with a fixed verb construction.
pub struct ModelView<'m> {
    pub model: &'m VectorSpaceModel,
    pub method: VerbMethod,
    spaces: SpaceAssignment,
}

impl TensorSource for ModelView<'_> {
    fn spaces(&self) -> &SpaceAssignment {
        &self.spaces
    }

    /// Names first, then explicit tensors, then embedded verb tensors, then
    /// plain vectors.
    fn word_tensor(&self, entry: &LexiconEntry, logic: Logic) -> Result<Tensor, SemanticsError> {
        let sa = &self.spaces;
        let word = &entry.word;
        if let Some(b) = self.model.names.get(word) {
            return name_word_tensor(word, &entry.lambek_type, b, sa, logic);
        }
        if let Some(t) = self.model.tensors.get(word) {
            check_binding(entry, t, sa)?;
            return Ok(t.clone());
        }
        let target = pregroup_shape(&entry.lambek_type, sa)?;
        let mut misfit = false;
        if let Some(list) = self.model.verbs.get(word) {
            for t in list.iter().filter_map(|v| v.get(self.method)) {
                match embed_diagonal(t, &target) {
                    Ok(u) => return Ok(u),
                    Err(_) => misfit = true,
                }
            }
        }
        match self.model.vector(word) {
            Some(v) if !misfit || v.shape() == target.as_slice() => {
                check_binding(entry, &v, sa)?;
                Ok(v)
            }
            _ if misfit => Err(SemanticsError::VerbShape {
                word: word.clone(),
                expected: target,
            }),
            _ => Err(SemanticsError::MissingBinding { word: word.clone() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basis_by_frequency_then_name() {
        let c = Corpus::from_text("a b a c a b");
        assert_eq!(build_basis(&c, 2).unwrap(), ["a", "b"]);
        assert_eq!(build_basis(&c, 10).unwrap(), ["a", "b", "c"]);
        let tie = Corpus::from_text("z y x");
        assert_eq!(build_basis(&tie, 2).unwrap(), ["x", "y"]);
        assert!(matches!(
            build_basis(&Corpus::from_text("\n \n"), 3),
            Err(ModelError::EmptyCorpus)
        ));
    }

    #[test]
    fn window_counts() {
        let c = Corpus::from_text("dogs eat food");
        let basis = vec!["food".to_string()];
        let m = cooccurrence(&c, &basis, 1).unwrap();
        assert_eq!(m["eat"], [1.0]);
        assert_eq!(m["dogs"], [0.0]);
        assert!(!m.contains_key("cats"));
        let wide = cooccurrence(&c, &basis, 10).unwrap();
        assert_eq!(wide["dogs"], [1.0]);
        assert_eq!(wide["food"], [0.0]);
        // Windows stop at line ends.
        let two = Corpus::from_text("dogs\nfood");
        assert_eq!(cooccurrence(&two, &basis, 5).unwrap()["dogs"], [0.0]);
    }

    #[test]
    fn tfidf_hand_values() {
        let c = Corpus::from_text("a b\na c");
        let basis = vec!["a".to_string(), "b".to_string()];
        let counts = cooccurrence(&c, &basis, 1).unwrap();
        let w = tfidf(&counts, &c, &basis);
        // `a` is in both lines, `b` in one: idf(a) = 0, idf(b) = ln 2.
        assert_eq!(w["a"], [0.0, 2f64.ln()]);
        assert_eq!(w["b"], [0.0, 0.0]);
        assert_eq!(w["c"], [0.0, 0.0]);
        let single = Corpus::from_text("a b a");
        let counts = cooccurrence(&single, &basis, 2).unwrap();
        assert!(tfidf(&counts, &single, &basis)
            .values()
            .flatten()
            .all(|&x| x == 0.0));
    }

    fn vecs(pairs: &[(&str, Vec<f64>)]) -> BTreeMap<String, Vec<f64>> {
        pairs.iter().map(|(w, v)| (w.to_string(), v.clone())).collect()
    }

    fn triple(s: &str, v: &str, o: Option<&str>) -> DependencyTriple {
        DependencyTriple {
            subject: s.into(),
            verb: v.into(),
            object: o.map(Into::into),
        }
    }

    #[test]
    fn cat1_dyads() {
        let v = vecs(&[("men", vec![1.0, 0.0]), ("dogs", vec![0.0, 1.0])]);
        let one = [triple("men", "kill", Some("dogs"))];
        let t = verb_tensor_cat1("kill", 2, &one, &v).unwrap();
        assert_eq!(t.shape(), [2, 2]);
        assert_eq!(t.data(), [0.0, 1.0, 0.0, 0.0]);
        let two = [one[0].clone(), one[0].clone()];
        assert_eq!(verb_tensor_cat1("kill", 2, &two, &v).unwrap(), t.scale(2.0));
        assert!(matches!(
            verb_tensor_cat1("eat", 2, &one, &v),
            Err(ModelError::VerbAbsent { .. })
        ));
        let intrans = [triple("dogs", "sleep", None)];
        assert_eq!(
            verb_tensor_cat1("sleep", 1, &intrans, &v).unwrap().data(),
            [0.0, 1.0]
        );
    }

    #[test]
    fn cat2_powers() {
        let v = vecs(&[("kill", vec![1.0, 0.0])]);
        assert_eq!(verb_tensor_cat2("kill", 1, &v).unwrap().data(), [1.0, 0.0]);
        let t = verb_tensor_cat2("kill", 2, &v).unwrap();
        assert_eq!(t.shape(), [2, 2]);
        assert_eq!(t.data(), [1.0, 0.0, 0.0, 0.0]);
        assert!(verb_tensor_cat2("eat", 2, &v).is_err());
    }

    #[test]
    fn diagonal_embedding() {
        let t = Tensor::matrix(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let u = embed_diagonal(&t, &[2, 4, 2]).unwrap();
        for i in 0..2 {
            for s in 0..4 {
                for j in 0..2 {
                    let expected = if s == i * 2 + j { t.get(&[i, j]) } else { 0.0 };
                    assert_eq!(u.get(&[i, s, j]), expected);
                }
            }
        }
        let z = embed_diagonal(&Tensor::zeros(vec![3, 3]), &[3, 9, 3]).unwrap();
        assert!(z.data().iter().all(|&x| x == 0.0));
        let v = Tensor::vector(vec![5.0, 6.0]);
        let u = embed_diagonal(&v, &[2, 2]).unwrap();
        assert_eq!(u.data(), [5.0, 0.0, 0.0, 6.0]);
        assert!(embed_diagonal(&t, &[2, 2, 2]).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let c = Corpus::from_text("men kill dogs\ndogs chase cats\nmen feed dogs");
        let mut m = build_model(&c, 3, 5, Weighting::Tfidf).unwrap();
        build_verbs(&mut m, &[triple("men", "kill", Some("dogs"))], None).unwrap();
        let back = VectorSpaceModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), m.to_json());
        assert_eq!(m.space_assignment(), SpaceAssignment::new(3, 9));
    }

    proptest! {
        #[test]
        fn cat1_is_additive(split in 0usize..6, picks in prop::collection::vec((0usize..3, 0usize..3), 1..6)) {
            let v = vecs(&[("a", vec![1.0, 2.0]), ("b", vec![0.5, -1.0]), ("c", vec![3.0, 0.0])]);
            let names = ["a", "b", "c"];
            let all: Vec<_> = picks.iter().map(|&(s, o)| triple(names[s], "v", Some(names[o]))).collect();
            let k = split.min(all.len());
            let (left, right) = all.split_at(k);
            let whole = verb_tensor_cat1("v", 2, &all, &v).unwrap();
            let parts = match (verb_tensor_cat1("v", 2, left, &v), verb_tensor_cat1("v", 2, right, &v)) {
                (Ok(l), Ok(r)) => l.add(&r).unwrap(),
                (Ok(l), Err(_)) => l,
                (Err(_), Ok(r)) => r,
                _ => unreachable!(),
            };
            prop_assert!(whole.max_abs_diff(&parts).unwrap() < 1e-12);
        }

        #[test]
        fn embedding_recovers_entries(n in 1usize..5, seed in any::<u64>()) {
            let data: Vec<f64> = (0..n * n).map(|k| ((seed >> (k % 60)) & 7) as f64 - 3.0).collect();
            let t = Tensor::new(vec![n, n], data).unwrap();
            let u = embed_diagonal(&t, &[n, n * n, n]).unwrap();
            for i in 0..n {
                for j in 0..n {
                    // Contract with basis subject e_i and object e_j.
                    let mut out = vec![0.0; n * n];
                    for (s, o) in out.iter_mut().enumerate() {
                        *o = u.get(&[i, s, j]);
                    }
                    prop_assert_eq!(out.iter().sum::<f64>(), t.get(&[i, j]));
                    prop_assert_eq!(out[i * n + j], t.get(&[i, j]));
                }
            }
        }
    }
}
