//! Cut-free proof search for the Lambek calculus with product and both
//! implications, producing morphism terms.
//!
//! Sequents are `G |- c` with a non-empty antecedent list `G`. Products in
//! the antecedent are split up front (the left product rule is invertible),
//! so products only survive inside implications. The remaining rules are
//! tried in a fixed order: axiom, left implication rules scanning antecedent
//! positions left to right with the shortest argument span first, then
//! right rules for the succedent. Every premise has strictly fewer
//! connectives than its conclusion, so the search terminates.
//!
//! Derivation terms compose modulo re-association of products: a composite
//! `g . f` is well typed when the flattened codomain of `f` equals the
//! flattened domain of `g`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::lexicon::{assignments, Grammar, LexiconEntry};
use crate::types::{parse_lambek, BasicType, LambekType};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    Id(LambekType),
    /// `ev^l_{a,b} : a . (a -o b) -> b`
    EvL(LambekType, LambekType),
    /// `ev^r_{a,b} : (a o- b) . b -> a`
    EvR(LambekType, LambekType),
    /// For `f : a . c -> b`, `curry^l(f) : c -> a -o b`.
    CurryL(LambekType, Box<Derivation>),
    /// For `g : c . b -> a`, `curry^r(g) : c -> a o- b`.
    CurryR(LambekType, Box<Derivation>),
    /// For `f : a -> b`, the left name `1 -> a -o b`.
    NameL(Box<Derivation>),
    /// For `f : a -> b`, the right name `1 -> b o- a`.
    NameR(Box<Derivation>),
    /// `Compose(g, f)` is `g` after `f`.
    Compose(Box<Derivation>, Box<Derivation>),
    Par(Box<Derivation>, Box<Derivation>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("in `{term}`: codomain {cod} of the inner map does not match domain {dom} of the outer map")]
    Compose {
        term: String,
        cod: LambekType,
        dom: LambekType,
    },
    #[error("in `{term}`: body domain {found} does not start with {expected}")]
    CurryLeft {
        term: String,
        expected: LambekType,
        found: LambekType,
    },
    #[error("in `{term}`: body domain {found} does not end with {expected}")]
    CurryRight {
        term: String,
        expected: LambekType,
        found: LambekType,
    },
}

impl Derivation {
    pub fn compose(g: Derivation, f: Derivation) -> Derivation {
        Derivation::Compose(Box::new(g), Box::new(f))
    }

    pub fn par(f: Derivation, g: Derivation) -> Derivation {
        Derivation::Par(Box::new(f), Box::new(g))
    }

    /// Type-checks the term, returning `(domain, codomain)`.
    pub fn check(&self) -> Result<(LambekType, LambekType), CheckError> {
        use Derivation::*;
        Ok(match self {
            Id(a) => (a.clone(), a.clone()),
            EvL(a, b) => (
                LambekType::product(a.clone(), LambekType::limpl(a.clone(), b.clone())),
                b.clone(),
            ),
            EvR(a, b) => (
                LambekType::product(LambekType::rimpl(a.clone(), b.clone()), b.clone()),
                a.clone(),
            ),
            CurryL(a, f) => {
                let (dom, cod) = f.check()?;
                let flat = dom.flatten();
                let head = a.flatten();
                if !flat.starts_with(&head) {
                    return Err(CheckError::CurryLeft {
                        term: self.to_string(),
                        expected: a.clone(),
                        found: dom,
                    });
                }
                (
                    LambekType::product_of(&flat[head.len()..]),
                    LambekType::limpl(a.clone(), cod),
                )
            }
            CurryR(b, g) => {
                let (dom, cod) = g.check()?;
                let flat = dom.flatten();
                let tail = b.flatten();
                if !flat.ends_with(&tail) {
                    return Err(CheckError::CurryRight {
                        term: self.to_string(),
                        expected: b.clone(),
                        found: dom,
                    });
                }
                (
                    LambekType::product_of(&flat[..flat.len() - tail.len()]),
                    LambekType::rimpl(cod, b.clone()),
                )
            }
            NameL(f) => {
                let (a, b) = f.check()?;
                (LambekType::Unit, LambekType::limpl(a, b))
            }
            NameR(f) => {
                let (a, b) = f.check()?;
                (LambekType::Unit, LambekType::rimpl(b, a))
            }
            Compose(g, f) => {
                let (fd, fc) = f.check()?;
                let (gd, gc) = g.check()?;
                if !fc.equiv(&gd) {
                    return Err(CheckError::Compose {
                        term: self.to_string(),
                        cod: fc,
                        dom: gd,
                    });
                }
                (fd, gc)
            }
            Par(f, g) => {
                let (fd, fc) = f.check()?;
                let (gd, gc) = g.check()?;
                (LambekType::product(fd, gd), LambekType::product(fc, gc))
            }
        })
    }

    pub fn domain(&self) -> LambekType {
        self.check().expect("well-typed derivation").0
    }

    pub fn codomain(&self) -> LambekType {
        self.check().expect("well-typed derivation").1
    }

    /// Removes identity compositions and `Id . Id` parallels.
    pub fn simplify(self) -> Derivation {
        use Derivation::*;
        match self {
            Compose(g, f) => {
                let (g, f) = (g.simplify(), f.simplify());
                match (g, f) {
                    (Id(_), f) => f,
                    (g, Id(_)) => g,
                    (g, f) => Derivation::compose(g, f),
                }
            }
            Par(f, g) => match (f.simplify(), g.simplify()) {
                (Id(a), Id(b)) => Id(LambekType::product(a, b)),
                (f, g) => Derivation::par(f, g),
            },
            CurryL(a, f) => CurryL(a, Box::new(f.simplify())),
            CurryR(b, f) => CurryR(b, Box::new(f.simplify())),
            NameL(f) => NameL(Box::new(f.simplify())),
            NameR(f) => NameR(Box::new(f.simplify())),
            other => other,
        }
    }

    /// Number of implication nodes a clasp diagram of this term draws:
    /// those in the domain, plus one for every curry or name.
    pub fn clasp_count(&self) -> usize {
        self.domain()
            .flatten()
            .iter()
            .map(LambekType::implications)
            .sum::<usize>()
            + self.introduced_implications()
    }

    pub(crate) fn introduced_implications(&self) -> usize {
        use Derivation::*;
        match self {
            Id(_) | EvL(..) | EvR(..) => 0,
            CurryL(_, f) | CurryR(_, f) | NameL(f) | NameR(f) => 1 + f.introduced_implications(),
            Compose(g, f) | Par(g, f) => g.introduced_implications() + f.introduced_implications(),
        }
    }
}

/// S-expression form, e.g. `(compose (evl "n" "s") (par (id "n") (evr "n -o s" "n")))`.
impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Derivation::*;
        match self {
            Id(a) => write!(f, "(id \"{a}\")"),
            EvL(a, b) => write!(f, "(evl \"{a}\" \"{b}\")"),
            EvR(a, b) => write!(f, "(evr \"{a}\" \"{b}\")"),
            CurryL(a, d) => write!(f, "(curryl \"{a}\" {d})"),
            CurryR(b, d) => write!(f, "(curryr \"{b}\" {d})"),
            NameL(d) => write!(f, "(namel {d})"),
            NameR(d) => write!(f, "(namer {d})"),
            Compose(g, h) => write!(f, "(compose {g} {h})"),
            Par(g, h) => write!(f, "(par {g} {h})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("derivation syntax error at byte {offset}: {message}")]
pub struct SexprError {
    pub offset: usize,
    pub message: String,
}

struct SexprReader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> SexprReader<'a> {
    fn err(&self, message: impl Into<String>) -> SexprError {
        SexprError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SexprError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn symbol(&mut self) -> Result<&'a str, SexprError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a constructor name"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn ty(&mut self) -> Result<LambekType, SexprError> {
        self.expect('"')?;
        let rest = &self.src[self.pos..];
        let end = rest.find('"').ok_or_else(|| self.err("unterminated type"))?;
        let t = parse_lambek(&rest[..end]).map_err(|e| self.err(e.to_string()))?;
        self.pos += end + 1;
        Ok(t)
    }

    fn term(&mut self) -> Result<Derivation, SexprError> {
        use Derivation::*;
        self.expect('(')?;
        let head = self.symbol()?;
        let d = match head {
            "id" => Id(self.ty()?),
            "evl" => EvL(self.ty()?, self.ty()?),
            "evr" => EvR(self.ty()?, self.ty()?),
            "curryl" => CurryL(self.ty()?, Box::new(self.term()?)),
            "curryr" => CurryR(self.ty()?, Box::new(self.term()?)),
            "namel" => NameL(Box::new(self.term()?)),
            "namer" => NameR(Box::new(self.term()?)),
            "compose" => Derivation::compose(self.term()?, self.term()?),
            "par" => Derivation::par(self.term()?, self.term()?),
            other => return Err(self.err(format!("unknown constructor `{other}`"))),
        };
        self.expect(')')?;
        Ok(d)
    }
}

impl std::str::FromStr for Derivation {
    type Err = SexprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut r = SexprReader { src: s, pos: 0 };
        let d = r.term()?;
        r.skip_ws();
        if r.pos != s.len() {
            return Err(r.err("trailing input"));
        }
        Ok(d)
    }
}

type Sequent = (Vec<LambekType>, LambekType);

/// Backward proof search with memoisation of failed and solved sequents.
#[derive(Default)]
pub struct Prover {
    memo: HashMap<Sequent, Option<Derivation>>,
}

impl Prover {
    pub fn new() -> Self {
        Prover::default()
    }

    /// Proves `antecedents |- succedent`, returning a term from the
    /// left-nested product of the antecedents.
    pub fn prove(
        &mut self,
        antecedents: &[LambekType],
        succedent: &LambekType,
    ) -> Option<Derivation> {
        let gamma: Vec<LambekType> = antecedents.iter().flat_map(LambekType::flatten).collect();
        let goal = succedent.normalize();
        if gamma.is_empty() {
            return (goal == LambekType::Unit).then_some(Derivation::Id(LambekType::Unit));
        }
        self.search(&gamma, &goal).map(Derivation::simplify)
    }

    fn search(&mut self, gamma: &[LambekType], goal: &LambekType) -> Option<Derivation> {
        let key = (gamma.to_vec(), goal.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let found = self.search_uncached(gamma, goal);
        self.memo.insert(key, found.clone());
        found
    }

    fn search_uncached(&mut self, gamma: &[LambekType], goal: &LambekType) -> Option<Derivation> {
        use LambekType::*;
        if gamma.len() == 1 && gamma[0] == *goal {
            return Some(Derivation::Id(goal.clone()));
        }
        for pos in 0..gamma.len() {
            match &gamma[pos] {
                // D |- a and G, b, T |- c  give  G, D, a -o b, T |- c
                LImpl(a, b) => {
                    for len in 1..=pos {
                        let start = pos - len;
                        let Some(arg) = self.search(&gamma[start..pos], a) else {
                            continue;
                        };
                        let mut rest = gamma[..start].to_vec();
                        rest.extend(b.flatten());
                        rest.extend_from_slice(&gamma[pos + 1..]);
                        if let Some(k) = self.search(&rest, goal) {
                            let local = Derivation::compose(
                                Derivation::EvL((**a).clone(), (**b).clone()),
                                Derivation::par(arg, Derivation::Id(gamma[pos].clone())),
                            );
                            return Some(Derivation::compose(
                                k,
                                frame(&gamma[..start], local, &gamma[pos + 1..]),
                            ));
                        }
                    }
                }
                // D |- b and G, a, T |- c  give  G, a o- b, D, T |- c
                RImpl(a, b) => {
                    for len in 1..gamma.len() - pos {
                        let end = pos + 1 + len;
                        let Some(arg) = self.search(&gamma[pos + 1..end], b) else {
                            continue;
                        };
                        let mut rest = gamma[..pos].to_vec();
                        rest.extend(a.flatten());
                        rest.extend_from_slice(&gamma[end..]);
                        if let Some(k) = self.search(&rest, goal) {
                            let local = Derivation::compose(
                                Derivation::EvR((**a).clone(), (**b).clone()),
                                Derivation::par(Derivation::Id(gamma[pos].clone()), arg),
                            );
                            return Some(Derivation::compose(
                                k,
                                frame(&gamma[..pos], local, &gamma[end..]),
                            ));
                        }
                    }
                }
                _ => {}
            }
        }
        match goal {
            // a, G |- b  gives  G |- a -o b
            LImpl(a, b) => {
                let mut premise = a.flatten();
                premise.extend_from_slice(gamma);
                if let Some(f) = self.search(&premise, b) {
                    return Some(Derivation::CurryL((**a).clone(), Box::new(f)));
                }
            }
            // G, b |- a  gives  G |- a o- b
            RImpl(a, b) => {
                let mut premise = gamma.to_vec();
                premise.extend(b.flatten());
                if let Some(g) = self.search(&premise, a) {
                    return Some(Derivation::CurryR((**b).clone(), Box::new(g)));
                }
            }
            // G |- a and D |- b  give  G, D |- a . b
            Product(a, b) => {
                for split in 1..gamma.len() {
                    let Some(f) = self.search(&gamma[..split], a) else {
                        continue;
                    };
                    if let Some(g) = self.search(&gamma[split..], b) {
                        return Some(Derivation::par(f, g));
                    }
                }
            }
            Basic(_) | Unit => {}
        }
        None
    }
}

/// `1_left . d . 1_right`, omitting empty sides.
fn frame(left: &[LambekType], d: Derivation, right: &[LambekType]) -> Derivation {
    let mut out = d;
    if !left.is_empty() {
        out = Derivation::par(Derivation::Id(LambekType::product_of(left)), out);
    }
    if !right.is_empty() {
        out = Derivation::par(out, Derivation::Id(LambekType::product_of(right)));
    }
    out
}

/// One-shot convenience wrapper around [`Prover::prove`].
pub fn prove(antecedents: &[LambekType], succedent: &LambekType) -> Option<Derivation> {
    Prover::new().prove(antecedents, succedent)
}

/// A successful Lambek parse of a sentence.
#[derive(Clone, Debug)]
pub struct LambekParse<'g> {
    pub entries: Vec<&'g LexiconEntry>,
    pub derivation: Derivation,
    pub target: BasicType,
}

/// Tries every lexicon assignment against every designated type, both in
/// declaration order, and returns the first proof found.
pub fn parse<'g>(grammar: &'g Grammar, words: &[String]) -> Result<Option<LambekParse<'g>>, String> {
    let candidates = grammar.candidates(words)?;
    if candidates.is_empty() {
        return Ok(None);
    }
    let mut prover = Prover::new();
    for picks in assignments(&candidates) {
        let types: Vec<LambekType> = picks.iter().map(|e| e.lambek_type.clone()).collect();
        for target in grammar.designated() {
            if let Some(derivation) = prover.prove(&types, &LambekType::Basic(target.clone())) {
                return Ok(Some(LambekParse {
                    entries: picks,
                    derivation,
                    target: target.clone(),
                }));
            }
        }
    }
    Ok(None)
}
