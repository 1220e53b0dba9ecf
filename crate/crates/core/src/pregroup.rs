//! Pregroup reduction by planar matching.
//!
//! A string of simple types reduces to a basic type `t` when all but one
//! factor can be paired off by non-crossing links, each link `(i, j)`
//! joining `x^(k)` at `i` with `x^(k+1)` at `j`, and the one unmatched factor
//! is plain `t`. Only contractions are searched; expansions are never needed
//! to reach a basic type.
//!
//! The search is an interval dynamic program over well-nested matchings.
//! Among several reductions, [`reduce`] returns the one with the smallest
//! total link span, ties broken by the lexicographically smallest sorted link
//! list.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexicon::{assignments, Grammar, LexiconEntry};
use crate::types::{lambek_to_pregroup, BasicType, SimpleType};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Reduction {
    #[serde(with = "simple_list")]
    pub input: Vec<SimpleType>,
    /// Sorted, pairwise disjoint, non-crossing; `i < j` in every pair.
    pub links: Vec<(usize, usize)>,
    pub residual: Vec<usize>,
}

mod simple_list {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::types::{parse_pregroup, SimpleType};

    pub fn serialize<S: Serializer>(v: &[SimpleType], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|t| t.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<SimpleType>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| {
                parse_pregroup(s)
                    .map_err(serde::de::Error::custom)
                    .and_then(|p| match p.0.as_slice() {
                        [one] => Ok(one.clone()),
                        _ => Err(serde::de::Error::custom("expected one simple type")),
                    })
            })
            .collect()
    }
}

impl Reduction {
    /// Total span `sum(j - i)` of the links.
    pub fn span(&self) -> usize {
        self.links.iter().map(|(i, j)| j - i).sum()
    }

    /// Re-checks planarity, the contraction condition and the residual.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.input.len();
        let mut used = vec![false; n];
        for &(i, j) in &self.links {
            if i >= j || j >= n {
                return Err(format!("link ({i},{j}) out of range"));
            }
            if used[i] || used[j] {
                return Err(format!("link ({i},{j}) reuses a factor"));
            }
            used[i] = true;
            used[j] = true;
            if !self.input[i].contracts_with(&self.input[j]) {
                return Err(format!(
                    "link ({i},{j}) joins {} and {}, which do not contract",
                    self.input[i], self.input[j]
                ));
            }
        }
        for &(i, j) in &self.links {
            for &(k, l) in &self.links {
                if i < k && k < j && j < l {
                    return Err(format!("links ({i},{j}) and ({k},{l}) cross"));
                }
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        if free != self.residual {
            return Err("residual does not list the unmatched factors".into());
        }
        for &r in &self.residual {
            for &(i, j) in &self.links {
                if i < r && r < j {
                    return Err(format!("residual {r} lies under link ({i},{j})"));
                }
            }
        }
        Ok(())
    }

    pub fn residual_types(&self) -> Vec<SimpleType> {
        self.residual.iter().map(|&i| self.input[i].clone()).collect()
    }

    /// Nesting depth of each link: 0 for outermost cups.
    pub fn link_depths(&self) -> Vec<usize> {
        self.links
            .iter()
            .map(|&(i, j)| {
                self.links
                    .iter()
                    .filter(|&&(k, l)| k < i && j < l)
                    .count()
            })
            .collect()
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let types: Vec<String> = self.input.iter().map(|t| t.to_string()).collect();
        write!(f, "{} ->", types.join(" . "))?;
        for (i, j) in &self.links {
            write!(f, " ({i},{j})")?;
        }
        let res: Vec<String> = self.residual_types().iter().map(|t| t.to_string()).collect();
        write!(f, " => {}", res.join(" . "))
    }
}

type Best = Option<(usize, Vec<(usize, usize)>)>;

/// Minimum-span full reductions of every interval `[i, j)`.
struct SpanTable {
    best: Vec<Vec<Best>>,
}

impl SpanTable {
    fn build(types: &[SimpleType]) -> Self {
        let n = types.len();
        let mut best: Vec<Vec<Best>> = vec![vec![None; n + 1]; n + 1];
        for (i, row) in best.iter_mut().enumerate() {
            row[i] = Some((0, Vec::new()));
        }
        for len in (2..=n).step_by(2) {
            for i in 0..=n - len {
                let j = i + len;
                let mut winner: Best = None;
                // `i` links to some `m`; inside and outside reduce independently.
                for m in (i + 1..j).step_by(2) {
                    if !types[i].contracts_with(&types[m]) {
                        continue;
                    }
                    let (Some((ci, li)), Some((co, lo))) = (&best[i + 1][m], &best[m + 1][j])
                    else {
                        continue;
                    };
                    let cost = (m - i) + ci + co;
                    let mut links = Vec::with_capacity(len / 2);
                    links.push((i, m));
                    links.extend_from_slice(li);
                    links.extend_from_slice(lo);
                    let better = match &winner {
                        None => true,
                        Some((c, l)) => (cost, &links) < (*c, l),
                    };
                    if better {
                        winner = Some((cost, links));
                    }
                }
                best[i][j] = winner;
            }
        }
        SpanTable { best }
    }

    fn get(&self, i: usize, j: usize) -> &Best {
        &self.best[i][j]
    }
}

/// Finds the preferred reduction of `types` to the plain basic type `target`.
pub fn reduce(types: &[SimpleType], target: &BasicType) -> Option<Reduction> {
    let n = types.len();
    let table = SpanTable::build(types);
    let goal = SimpleType::new(target.clone(), 0);
    let mut winner: Best = None;
    let mut at = 0;
    for p in (0..n).step_by(2) {
        if types[p] != goal {
            continue;
        }
        let (Some((cl, ll)), Some((cr, lr))) = (table.get(0, p), table.get(p + 1, n)) else {
            continue;
        };
        let cost = cl + cr;
        let links: Vec<(usize, usize)> = ll.iter().chain(lr.iter()).copied().collect();
        let better = match &winner {
            None => true,
            Some((c, l)) => (cost, &links) < (*c, l),
        };
        if better {
            winner = Some((cost, links));
            at = p;
        }
    }
    winner.map(|(_, links)| Reduction {
        input: types.to_vec(),
        links,
        residual: vec![at],
    })
}

/// All distinct reductions of `types` to `target`, in lexicographic order of
/// their sorted link lists, truncated to `limit`.
pub fn enumerate_reductions(
    types: &[SimpleType],
    target: &BasicType,
    limit: usize,
) -> Vec<Reduction> {
    assert!(limit >= 1, "limit must be positive");
    let n = types.len();
    let mut memo: Memo = vec![vec![None; n + 1]; n + 1];
    let goal = SimpleType::new(target.clone(), 0);
    let mut all: Vec<Vec<(usize, usize)>> = Vec::new();
    for p in (0..n).step_by(2) {
        if types[p] != goal {
            continue;
        }
        let left = full_matchings(types, 0, p, limit, &mut memo);
        if left.is_empty() {
            continue;
        }
        let right = full_matchings(types, p + 1, n, limit, &mut memo);
        let combos = left
            .iter()
            .flat_map(|l| right.iter().map(move |r| l.iter().chain(r).copied().collect()))
            .take(limit);
        all.extend(combos);
    }
    // The residual position is recoverable from the links.
    all.sort();
    all.dedup();
    all.truncate(limit);
    all.into_iter()
        .map(|links| {
            let mut used = vec![false; n];
            for &(i, j) in &links {
                used[i] = true;
                used[j] = true;
            }
            Reduction {
                input: types.to_vec(),
                residual: (0..n).filter(|&i| !used[i]).collect(),
                links,
            }
        })
        .collect()
}

/// Full matchings of `[i, j)` in lexicographic order, at most `limit`.
/// Perfect matchings of each interval, filled on demand.
type Memo = Vec<Vec<Option<Vec<Vec<(usize, usize)>>>>>;

fn full_matchings(
    types: &[SimpleType],
    i: usize,
    j: usize,
    limit: usize,
    memo: &mut Memo,
) -> Vec<Vec<(usize, usize)>> {
    if let Some(hit) = &memo[i][j] {
        return hit.clone();
    }
    let mut out = Vec::new();
    if i == j {
        out.push(Vec::new());
    } else if (j - i).is_multiple_of(2) {
        'search: for m in (i + 1..j).step_by(2) {
            if !types[i].contracts_with(&types[m]) {
                continue;
            }
            let inner = full_matchings(types, i + 1, m, limit, memo);
            if inner.is_empty() {
                continue;
            }
            let outer = full_matchings(types, m + 1, j, limit, memo);
            for a in &inner {
                for b in &outer {
                    let mut links = Vec::with_capacity((j - i) / 2);
                    links.push((i, m));
                    links.extend_from_slice(a);
                    links.extend_from_slice(b);
                    out.push(links);
                    if out.len() >= limit {
                        break 'search;
                    }
                }
            }
        }
    }
    memo[i][j] = Some(out.clone());
    out
}

/// A successful pregroup parse of a sentence.
#[derive(Clone, Debug)]
pub struct PregroupParse<'g> {
    pub entries: Vec<&'g LexiconEntry>,
    /// Index range of each word's factors within `reduction.input`.
    pub word_spans: Vec<std::ops::Range<usize>>,
    pub reduction: Reduction,
    pub target: BasicType,
}

/// Tries every lexicon assignment (in declaration order) against every
/// designated type (in declaration order) and returns the first reduction.
pub fn parse<'g>(grammar: &'g Grammar, words: &[String]) -> Result<Option<PregroupParse<'g>>, String> {
    let candidates = grammar.candidates(words)?;
    if candidates.is_empty() {
        return Ok(None);
    }
    for picks in assignments(&candidates) {
        let mut input = Vec::new();
        let mut word_spans = Vec::with_capacity(picks.len());
        for e in &picks {
            let start = input.len();
            input.extend(lambek_to_pregroup(&e.lambek_type).0);
            word_spans.push(start..input.len());
        }
        for target in grammar.designated() {
            if let Some(reduction) = reduce(&input, target) {
                return Ok(Some(PregroupParse {
                    entries: picks,
                    word_spans,
                    reduction,
                    target: target.clone(),
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::parse_pregroup;

    fn ty(s: &str) -> Vec<SimpleType> {
        parse_pregroup(s).unwrap().0
    }

    fn s() -> BasicType {
        BasicType::new("s")
    }

    #[test]
    fn transitive_sentence_links() {
        let r = reduce(&ty("n n^r s n^l n"), &s()).unwrap();
        assert_eq!(r.links, vec![(0, 1), (3, 4)]);
        assert_eq!(r.residual, vec![2]);
        r.validate().unwrap();
    }

    #[test]
    fn bare_sentence_type() {
        let r = reduce(&ty("s"), &s()).unwrap();
        assert!(r.links.is_empty());
        assert_eq!(r.residual, vec![0]);
        assert_eq!(enumerate_reductions(&ty("s"), &s(), 10).len(), 1);
    }

    #[test]
    fn negated_sentence_reduces() {
        let input = ty("n n^r s j^l sigma sigma^r j j^l sigma sigma^r j n^l n");
        let r = reduce(&input, &s()).unwrap();
        r.validate().unwrap();
        assert_eq!(
            r.links,
            vec![(0, 1), (3, 6), (4, 5), (7, 10), (8, 9), (11, 12)]
        );
        assert_eq!(r.link_depths(), vec![0, 0, 1, 0, 1, 0]);
        assert_eq!(enumerate_reductions(&input, &s(), 10), vec![r]);
    }

    #[test]
    fn adjective_sentence_links() {
        let input = ty("n n^r s n^l n n^l n");
        let r = reduce(&input, &s()).unwrap();
        assert_eq!(r.links, vec![(0, 1), (3, 4), (5, 6)]);
        // n . n^l cannot contract, so the nested alternative is not a reduction.
        assert_eq!(enumerate_reductions(&input, &s(), 10), vec![r]);
        // With iterated adjoints two nestings exist and the shorter one wins.
        let nested = ty("s n^l n^l^l n^l n");
        let all = enumerate_reductions(&nested, &s(), 10);
        let best = reduce(&nested, &s()).unwrap();
        assert!(all.contains(&best));
        assert!(all.iter().all(|x| x.span() >= best.span()));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_reductions(&ty("n n^r s n^l n"), &s(), 10).len(), 1);
        let n = BasicType::new("n");
        let found = enumerate_reductions(&ty("n n^l n n^l n"), &n, 10);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].links, vec![(1, 2), (3, 4)]);
        let adj = ty("n n^r s n^l n n^l n");
        let first = enumerate_reductions(&adj, &s(), 1);
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].links, vec![(0, 1), (3, 4), (5, 6)]);
    }

    #[test]
    fn scrambled_sentence_rejected() {
        assert!(reduce(&ty("n^r s n^l n n"), &s()).is_none());
        assert!(reduce(&[], &s()).is_none());
        assert!(reduce(&ty("n"), &s()).is_none());
    }

    #[test]
    fn validate_catches_bad_links() {
        let mut r = reduce(&ty("n n^r s n^l n"), &s()).unwrap();
        r.links = vec![(0, 3), (1, 4)];
        assert!(r.validate().is_err());
    }

    #[test]
    fn serde_round_trip() {
        let r = reduce(&ty("n n^r s n^l n"), &s()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"n^r\""));
        assert_eq!(serde_json::from_str::<Reduction>(&text).unwrap(), r);
    }
}
