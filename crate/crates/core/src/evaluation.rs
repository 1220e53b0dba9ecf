//! Sentence-pair similarity scoring and rank correlation against human
//! judgements.

use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributional::{VectorSpaceModel, VerbMethod};
use crate::lexicon::{tokenize_sentence, Grammar};
use crate::semantics::{meaning, Logic};
use crate::tensor::{cosine, Tensor};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("dataset line {line}: {message}")]
    Dataset { line: usize, message: String },
    #[error("score lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two scores")]
    TooShort,
    #[error("rank correlation undefined for constant input")]
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tag {
    High,
    Low,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentencePair {
    pub sentence1: Vec<String>,
    pub sentence2: Vec<String>,
    pub human_score: f64,
    pub tag: Option<Tag>,
}

/// Reads `sentence1<TAB>sentence2<TAB>score<TAB>tag` rows. The tag column
/// (`HIGH`, `LOW`, or empty) may be omitted. `#` lines are comments.
pub fn parse_dataset(text: &str) -> Result<Vec<SentencePair>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| EvalError::Dataset {
            line: i + 1,
            message,
        };
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(err(format!("expected 3 or 4 columns, found {}", cols.len())));
        }
        let human_score: f64 = cols[2]
            .parse()
            .map_err(|_| err(format!("bad score `{}`", cols[2])))?;
        let tag = match cols.get(3).copied().unwrap_or("") {
            "" => None,
            t if t.eq_ignore_ascii_case("high") => Some(Tag::High),
            t if t.eq_ignore_ascii_case("low") => Some(Tag::Low),
            t => return Err(err(format!("bad tag `{t}`"))),
        };
        out.push(SentencePair {
            sentence1: tokenize_sentence(cols[0]),
            sentence2: tokenize_sentence(cols[1]),
            human_score,
            tag,
        });
    }
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<SentencePair>, EvalError> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Composer {
    Add,
    Multiply,
    Cat1,
    Cat2,
    Baseline,
}

impl Composer {
    pub const ALL: [Composer; 5] = [
        Composer::Add,
        Composer::Multiply,
        Composer::Cat1,
        Composer::Cat2,
        Composer::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Composer::Add => "add",
            Composer::Multiply => "multiply",
            Composer::Cat1 => "cat1",
            Composer::Cat2 => "cat2",
            Composer::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Composer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Composer {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Composer::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown composer `{s}` (add|multiply|cat1|cat2|baseline)"))
    }
}

fn word_vector(model: &VectorSpaceModel, w: &str) -> Result<Tensor, String> {
    model
        .vector(w)
        .ok_or_else(|| format!("no vector for `{w}`"))
}

fn pointwise(
    model: &VectorSpaceModel,
    words: &[String],
    op: fn(&Tensor, &Tensor) -> Result<Tensor, crate::tensor::TensorError>,
) -> Result<Tensor, String> {
    let mut iter = words.iter();
    let first = iter.next().ok_or("empty sentence")?;
    let mut acc = word_vector(model, first)?;
    for w in iter {
        acc = op(&acc, &word_vector(model, w)?).map_err(|e| e.to_string())?;
    }
    Ok(acc)
}

/// The first word with an implication type whose leaves include a
/// designated type.
pub fn find_verb<'w>(grammar: &Grammar, words: &'w [String]) -> Option<&'w String> {
    words.iter().find(|w| {
        grammar.lookup(w).iter().any(|e| {
            e.lambek_type.is_implication()
                && e
                    .lambek_type
                    .leaves()
                    .iter()
                    .any(|b| grammar.is_designated(b))
        })
    })
}

/// Composed representation of one sentence.
pub fn compose(
    words: &[String],
    grammar: &Grammar,
    model: &VectorSpaceModel,
    composer: Composer,
    logic: Logic,
) -> Result<Tensor, String> {
    match composer {
        Composer::Add => pointwise(model, words, Tensor::add),
        Composer::Multiply => pointwise(model, words, Tensor::hadamard),
        Composer::Cat1 | Composer::Cat2 => {
            let method = if composer == Composer::Cat1 {
                VerbMethod::Cat1
            } else {
                VerbMethod::Cat2
            };
            meaning(words, grammar, &model.view(method), logic)
                .map(|m| m.vector)
                .map_err(|e| e.to_string())
        }
        Composer::Baseline => {
            let verb = find_verb(grammar, words).ok_or("no verb in sentence")?;
            word_vector(model, verb)
        }
    }
}

/// Cosine of the two composed sentences of each pair, in dataset order;
/// `Err` rows carry the reason they were skipped.
pub fn score_pairs(
    dataset: &[SentencePair],
    grammar: &Grammar,
    model: &VectorSpaceModel,
    composer: Composer,
    logic: Logic,
) -> Vec<Result<f64, String>> {
    dataset
        .iter()
        .map(|p| {
            let a = compose(&p.sentence1, grammar, model, composer, logic)?;
            let b = compose(&p.sentence2, grammar, model, composer, logic)?;
            cosine(&a, &b).map(|c| c.value).map_err(|e| e.to_string())
        })
        .collect()
}

/// Ranks starting at 1, ties sharing the average of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::Constant);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation with average ranks for ties.
pub fn spearman_rho(model_scores: &[f64], human_scores: &[f64]) -> Result<f64, EvalError> {
    if model_scores.len() != human_scores.len() {
        return Err(EvalError::LengthMismatch(
            model_scores.len(),
            human_scores.len(),
        ));
    }
    if model_scores.len() < 2 {
        return Err(EvalError::TooShort);
    }
    pearson(&average_ranks(model_scores), &average_ranks(human_scores))
}

/// Report values are rounded to this many decimals.
pub const DECIMALS: i32 = 6;

fn round(x: f64) -> f64 {
    let k = 10f64.powi(DECIMALS);
    let r = (x * k).round() / k;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub composer: Composer,
    pub mean_high: Option<f64>,
    pub mean_low: Option<f64>,
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_error: Option<String>,
    pub scored: usize,
    pub skipped: Vec<Skip>,
    /// Per-pair cosines in dataset order; `None` for skipped rows.
    pub scores: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    /// Zero-based dataset row.
    pub row: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pairs: usize,
    pub rows: Vec<ReportRow>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// One row per composer, in the order given.
pub fn report(
    dataset: &[SentencePair],
    grammar: &Grammar,
    model: &VectorSpaceModel,
    composers: &[Composer],
    logic: Logic,
) -> Report {
    let rows = composers
        .iter()
        .map(|&composer| {
            let results = score_pairs(dataset, grammar, model, composer, logic);
            let mut skipped = Vec::new();
            let mut model_scores = Vec::new();
            let mut human = Vec::new();
            let mut high = Vec::new();
            let mut low = Vec::new();
            let mut scores = Vec::with_capacity(results.len());
            for (row, (r, p)) in results.into_iter().zip(dataset).enumerate() {
                match r {
                    Ok(s) => {
                        model_scores.push(s);
                        human.push(p.human_score);
                        match p.tag {
                            Some(Tag::High) => high.push(s),
                            Some(Tag::Low) => low.push(s),
                            None => {}
                        }
                        scores.push(Some(round(s)));
                    }
                    Err(reason) => {
                        skipped.push(Skip { row, reason });
                        scores.push(None);
                    }
                }
            }
            let (rho, rho_error) = match spearman_rho(&model_scores, &human) {
                Ok(r) => (Some(round(r)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ReportRow {
                composer,
                mean_high: mean(high.into_iter()).map(round),
                mean_low: mean(low.into_iter()).map(round),
                rho,
                rho_error,
                scored: model_scores.len(),
                skipped,
                scores,
            }
        })
        .collect();
    Report {
        pairs: dataset.len(),
        rows,
    }
}

impl Report {
    pub fn to_json(&self, pretty: bool) -> String {
        let mut s = if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        }
        .expect("report serialises");
        s.push('\n');
        s
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let cell = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        let mut out = String::new();
        writeln!(
            out,
            "{:<10} {:>8} {:>8} {:>8} {:>7} {:>7}",
            "composer", "high", "low", "rho", "scored", "skipped"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<10} {:>8} {:>8} {:>8} {:>7} {:>7}",
                r.composer.name(),
                cell(r.mean_high),
                cell(r.mean_low),
                cell(r.rho),
                r.scored,
                r.skipped.len()
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rho_examples() {
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        let r = spearman_rho(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((r - 0.6).abs() < 1e-12);
        assert!(matches!(
            spearman_rho(&[1.0, 2.0], &[1.0]),
            Err(EvalError::LengthMismatch(2, 1))
        ));
        assert!(matches!(
            spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(EvalError::Constant)
        ));
    }

    #[test]
    fn tied_ranks_average() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn dataset_rows() {
        let d = parse_dataset(
            "# comment\nMen kill dogs\tmen murder dogs\t6.5\tHIGH\na b c\td e f\t1\t\nx y z\tu v w\t2\n",
        )
        .unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].sentence1, ["men", "kill", "dogs"]);
        assert_eq!(d[0].tag, Some(Tag::High));
        assert_eq!(d[1].tag, None);
        assert!(parse_dataset("a\tb\tseven\n").is_err());
        assert!(parse_dataset("a\tb\t1\tMEDIUM\n").is_err());
    }

    fn distinct(v: Vec<f64>) -> bool {
        let mut s = v.clone();
        s.sort_by(f64::total_cmp);
        s.windows(2).all(|w| w[0] != w[1])
    }

    proptest! {
        #[test]
        fn monotone_invariance(x in prop::collection::vec(-5i32..5, 2..15), y in prop::collection::vec(-5i32..5, 15)) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y[..x.len()].iter().map(|&v| f64::from(v)).collect();
            if let Ok(r) = spearman_rho(&x, &y) {
                let tx: Vec<f64> = x.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
                let r2 = spearman_rho(&tx, &y).unwrap();
                prop_assert!((r - r2).abs() < 1e-12);
            }
        }

        #[test]
        fn self_correlation_and_reversal(x in prop::collection::vec(-100.0f64..100.0, 2..20)) {
            prop_assume!(distinct(x.clone()));
            prop_assert!((spearman_rho(&x, &x).unwrap() - 1.0).abs() < 1e-12);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert!((spearman_rho(&neg, &x).unwrap() + 1.0).abs() < 1e-12);
        }
    }
}
