//! Grammatical types for the two type-logics.
//!
//! A [`LambekType`] is a tree over basic types built with the monoid product
//! and the two implications: `a -o b` (needs an `a` on its left to yield `b`)
//! and `a o- b` (needs a `b` on its right to yield `a`). A [`PregroupType`] is
//! a flat string of [`SimpleType`]s, each a basic type decorated with an
//! integer adjoint order (`-1` left adjoint, `+1` right adjoint, iterable).
//!
//! Concrete syntax, shared by lexicon files and the CLI:
//!
//! ```text
//! n            basic type (any identifier)
//! 1            unit
//! a . b        product
//! a -o b       left implication
//! a o- b       right implication
//! n^l  n^r^r   adjoint suffixes (pregroup types only)
//! ```
//!
//! Implications never associate; nested implications must be parenthesised.
//! Mixing `.` with an implication at one level is rejected for the same reason.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A basic grammatical type such as `n`, `s`, `j` or `sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicType(Arc<str>);

impl BasicType {
    pub fn new(name: &str) -> Self {
        BasicType(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for BasicType {
    fn from(s: &str) -> Self {
        BasicType::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LambekType {
    Basic(BasicType),
    Unit,
    Product(Box<LambekType>, Box<LambekType>),
    /// `a -o b`: `a . (a -o b) <= b`.
    LImpl(Box<LambekType>, Box<LambekType>),
    /// `a o- b`: `(a o- b) . b <= a`.
    RImpl(Box<LambekType>, Box<LambekType>),
}

impl LambekType {
    pub fn basic(name: &str) -> Self {
        LambekType::Basic(BasicType::new(name))
    }

    pub fn product(a: LambekType, b: LambekType) -> Self {
        LambekType::Product(Box::new(a), Box::new(b))
    }

    pub fn limpl(a: LambekType, b: LambekType) -> Self {
        LambekType::LImpl(Box::new(a), Box::new(b))
    }

    pub fn rimpl(a: LambekType, b: LambekType) -> Self {
        LambekType::RImpl(Box::new(a), Box::new(b))
    }

    /// Left-nested product of a non-empty list; `Unit` for an empty one.
    pub fn product_of(items: &[LambekType]) -> Self {
        let mut iter = items.iter().cloned();
        match iter.next() {
            None => LambekType::Unit,
            Some(first) => iter.fold(first, LambekType::product),
        }
    }

    /// Number of product and implication nodes.
    pub fn connectives(&self) -> usize {
        match self {
            LambekType::Basic(_) | LambekType::Unit => 0,
            LambekType::Product(a, b) | LambekType::LImpl(a, b) | LambekType::RImpl(a, b) => {
                1 + a.connectives() + b.connectives()
            }
        }
    }

    /// Number of implication nodes only.
    pub fn implications(&self) -> usize {
        match self {
            LambekType::Basic(_) | LambekType::Unit => 0,
            LambekType::Product(a, b) => a.implications() + b.implications(),
            LambekType::LImpl(a, b) | LambekType::RImpl(a, b) => {
                1 + a.implications() + b.implications()
            }
        }
    }

    pub fn is_implication(&self) -> bool {
        matches!(self, LambekType::LImpl(..) | LambekType::RImpl(..))
    }

    /// Basic leaves in left-to-right tree order.
    pub fn leaves(&self) -> Vec<BasicType> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<BasicType>) {
        match self {
            LambekType::Basic(b) => out.push(b.clone()),
            LambekType::Unit => {}
            LambekType::Product(a, b) | LambekType::LImpl(a, b) | LambekType::RImpl(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// Drops units absorbed by products, recursively. A type that is nothing
    /// but units collapses to `Unit`.
    pub fn normalize(&self) -> LambekType {
        match self {
            LambekType::Basic(_) | LambekType::Unit => self.clone(),
            LambekType::Product(a, b) => match (a.normalize(), b.normalize()) {
                (LambekType::Unit, x) | (x, LambekType::Unit) => x,
                (x, y) => LambekType::product(x, y),
            },
            LambekType::LImpl(a, b) => LambekType::limpl(a.normalize(), b.normalize()),
            LambekType::RImpl(a, b) => LambekType::rimpl(a.normalize(), b.normalize()),
        }
    }

    /// Flattens top-level products into their factors, dropping units.
    /// Two types are equal up to re-association iff their flattenings agree
    /// (after normalising each factor).
    pub fn flatten(&self) -> Vec<LambekType> {
        let mut out = Vec::new();
        self.collect_factors(&mut out);
        out
    }

    fn collect_factors(&self, out: &mut Vec<LambekType>) {
        match self {
            LambekType::Unit => {}
            LambekType::Product(a, b) => {
                a.collect_factors(out);
                b.collect_factors(out);
            }
            other => out.push(other.normalize()),
        }
    }

    pub fn equiv(&self, other: &LambekType) -> bool {
        self.flatten() == other.flatten()
    }

    fn is_atomic(&self) -> bool {
        matches!(self, LambekType::Basic(_) | LambekType::Unit)
    }
}

impl fmt::Display for LambekType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambekType::Basic(b) => write!(f, "{b}"),
            LambekType::Unit => f.write_str("1"),
            LambekType::Product(a, b) => {
                // Left-nested products print flat; anything else is grouped.
                let left_plain = a.is_atomic() || matches!(**a, LambekType::Product(..));
                if left_plain {
                    write!(f, "{a}")?;
                } else {
                    write!(f, "({a})")?;
                }
                f.write_str(" . ")?;
                if b.is_atomic() {
                    write!(f, "{b}")
                } else {
                    write!(f, "({b})")
                }
            }
            LambekType::LImpl(a, b) | LambekType::RImpl(a, b) => {
                let arrow = if matches!(self, LambekType::LImpl(..)) {
                    "-o"
                } else {
                    "o-"
                };
                if a.is_atomic() {
                    write!(f, "{a}")?;
                } else {
                    write!(f, "({a})")?;
                }
                write!(f, " {arrow} ")?;
                if b.is_atomic() {
                    write!(f, "{b}")
                } else {
                    write!(f, "({b})")
                }
            }
        }
    }
}

/// A basic type with an adjoint order: `0` plain, `-1` left adjoint,
/// `+1` right adjoint, `-2` double left adjoint and so on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleType {
    pub base: BasicType,
    pub order: i32,
}

impl SimpleType {
    pub fn new(base: BasicType, order: i32) -> Self {
        SimpleType { base, order }
    }

    pub fn plain(name: &str) -> Self {
        SimpleType::new(BasicType::new(name), 0)
    }

    /// Whether `self . next <= 1` is a single contraction step
    /// (`x . x^r` or `x^l . x`, generalised to iterated adjoints).
    pub fn contracts_with(&self, next: &SimpleType) -> bool {
        self.base == next.base && next.order == self.order + 1
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        let suffix = if self.order < 0 { "^l" } else { "^r" };
        for _ in 0..self.order.unsigned_abs() {
            f.write_str(suffix)?;
        }
        Ok(())
    }
}

/// A pregroup type: a string of simple types. The empty string is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PregroupType(pub Vec<SimpleType>);

impl PregroupType {
    pub fn unit() -> Self {
        PregroupType(Vec::new())
    }

    pub fn factors(&self) -> &[SimpleType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &PregroupType) -> PregroupType {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        PregroupType(v)
    }

    /// `(p . q)^l = q^l . p^l`.
    pub fn left_adjoint(&self) -> PregroupType {
        self.shifted(-1)
    }

    /// `(p . q)^r = q^r . p^r`.
    pub fn right_adjoint(&self) -> PregroupType {
        self.shifted(1)
    }

    fn shifted(&self, delta: i32) -> PregroupType {
        PregroupType(
            self.0
                .iter()
                .rev()
                .map(|t| SimpleType::new(t.base.clone(), t.order + delta))
                .collect(),
        )
    }
}

impl fmt::Display for PregroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" . ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromIterator<SimpleType> for PregroupType {
    fn from_iter<I: IntoIterator<Item = SimpleType>>(iter: I) -> Self {
        PregroupType(iter.into_iter().collect())
    }
}

/// Translates a Lambek type into pregroup form:
/// `p -o q` becomes `p^r . q` and `p o- q` becomes `p . q^l`.
pub fn lambek_to_pregroup(t: &LambekType) -> PregroupType {
    translate_with_leaves(t)
        .into_iter()
        .map(|(simple, _)| simple)
        .collect()
}

/// Like [`lambek_to_pregroup`] but each factor carries the index of the
/// basic leaf of `t` (in [`LambekType::leaves`] order) that produced it.
/// Adjoints reverse subtrees, so the pregroup order is a permutation of the
/// leaf order.
pub fn translate_with_leaves(t: &LambekType) -> Vec<(SimpleType, usize)> {
    let mut next = 0;
    translate_rec(t, &mut next)
}

fn translate_rec(t: &LambekType, next: &mut usize) -> Vec<(SimpleType, usize)> {
    match t {
        LambekType::Basic(b) => {
            let id = *next;
            *next += 1;
            vec![(SimpleType::new(b.clone(), 0), id)]
        }
        LambekType::Unit => Vec::new(),
        LambekType::Product(a, b) => {
            let mut v = translate_rec(a, next);
            v.extend(translate_rec(b, next));
            v
        }
        LambekType::LImpl(a, b) => {
            let mut v = adjoint_tagged(translate_rec(a, next), 1);
            v.extend(translate_rec(b, next));
            v
        }
        LambekType::RImpl(a, b) => {
            let mut v = translate_rec(a, next);
            v.extend(adjoint_tagged(translate_rec(b, next), -1));
            v
        }
    }
}

fn adjoint_tagged(v: Vec<(SimpleType, usize)>, delta: i32) -> Vec<(SimpleType, usize)> {
    v.into_iter()
        .rev()
        .map(|(t, id)| (SimpleType::new(t.base, t.order + delta), id))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type syntax error at column {column}: {message}")]
pub struct TypeParseError {
    /// 1-based column in the parsed string.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    One,
    Dot,
    LArrow,
    RArrow,
    Open,
    Close,
    AdjL,
    AdjR,
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, TypeParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |i: usize, m: &str| TypeParseError {
        column: i + 1,
        message: m.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => {
                out.push((Token::Open, start));
                i += 1;
            }
            ')' => {
                out.push((Token::Close, start));
                i += 1;
            }
            '.' | '·' => {
                out.push((Token::Dot, start));
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'o') && !ident_continues(&chars, i + 2) {
                    out.push((Token::LArrow, start));
                    i += 2;
                } else {
                    return Err(err(i, "expected `-o`"));
                }
            }
            '^' => match chars.get(i + 1) {
                Some('l') => {
                    out.push((Token::AdjL, start));
                    i += 2;
                }
                Some('r') => {
                    out.push((Token::AdjR, start));
                    i += 2;
                }
                _ => return Err(err(i, "expected `^l` or `^r`")),
            },
            '1' if !ident_continues(&chars, i + 1) => {
                out.push((Token::One, start));
                i += 1;
            }
            'o' if chars.get(i + 1) == Some(&'-') => {
                out.push((Token::RArrow, start));
                i += 2;
            }
            c if c.is_alphanumeric() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push((Token::Ident(word), start));
            }
            other => return Err(err(i, &format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

fn ident_continues(chars: &[char], i: usize) -> bool {
    chars
        .get(i)
        .is_some_and(|c| c.is_alphanumeric() || *c == '_')
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, TypeParseError> {
        Ok(Parser {
            tokens: tokenize(src)?,
            pos: 0,
            end: src.chars().count(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, c)| *c) + 1
    }

    fn error(&self, message: impl Into<String>) -> TypeParseError {
        TypeParseError {
            column: self.column(),
            message: message.into(),
        }
    }

    fn finish(&self) -> Result<(), TypeParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected trailing {t:?}"))),
        }
    }

    fn lambek(&mut self) -> Result<LambekType, TypeParseError> {
        let first = self.lambek_atom()?;
        match self.peek() {
            Some(Token::LArrow) | Some(Token::RArrow) => {
                let left = self.peek() == Some(&Token::LArrow);
                self.pos += 1;
                let rhs = self.lambek_atom()?;
                if matches!(
                    self.peek(),
                    Some(Token::LArrow | Token::RArrow | Token::Dot)
                ) {
                    return Err(self.error("ambiguous type; add parentheses"));
                }
                Ok(if left {
                    LambekType::limpl(first, rhs)
                } else {
                    LambekType::rimpl(first, rhs)
                })
            }
            Some(Token::Dot) => {
                let mut acc = first;
                while self.peek() == Some(&Token::Dot) {
                    self.pos += 1;
                    let next = self.lambek_atom()?;
                    acc = LambekType::product(acc, next);
                }
                if matches!(self.peek(), Some(Token::LArrow | Token::RArrow)) {
                    return Err(self.error("ambiguous type; add parentheses"));
                }
                Ok(acc)
            }
            _ => Ok(first),
        }
    }

    fn lambek_atom(&mut self) -> Result<LambekType, TypeParseError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if matches!(self.peek(), Some(Token::AdjL | Token::AdjR)) {
                    return Err(self.error("adjoints are not allowed in Lambek types"));
                }
                Ok(LambekType::basic(&name))
            }
            Some(Token::One) => {
                self.pos += 1;
                Ok(LambekType::Unit)
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.lambek()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => Err(self.error(format!("unexpected {t:?}"))),
            None => Err(self.error("unexpected end of type")),
        }
    }

    fn simple(&mut self) -> Result<SimpleType, TypeParseError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let mut order = 0;
                loop {
                    match self.peek() {
                        Some(Token::AdjL) => order -= 1,
                        Some(Token::AdjR) => order += 1,
                        _ => break,
                    }
                    self.pos += 1;
                }
                Ok(SimpleType::new(BasicType::new(&name), order))
            }
            Some(t) => Err(self.error(format!("expected a simple type, found {t:?}"))),
            None => Err(self.error("unexpected end of type")),
        }
    }
}

/// Parses a Lambek type such as `(n -o s) o- n`.
pub fn parse_lambek(src: &str) -> Result<LambekType, TypeParseError> {
    let mut p = Parser::new(src)?;
    let t = p.lambek()?;
    p.finish()?;
    Ok(t)
}

/// Parses a pregroup type such as `n^r . s . n^l` (dots optional) or `1`.
pub fn parse_pregroup(src: &str) -> Result<PregroupType, TypeParseError> {
    let mut p = Parser::new(src)?;
    if p.peek() == Some(&Token::One) {
        p.pos += 1;
        p.finish()?;
        return Ok(PregroupType::unit());
    }
    let mut factors = vec![p.simple()?];
    while p.peek().is_some() {
        if p.peek() == Some(&Token::Dot) {
            p.pos += 1;
        }
        factors.push(p.simple()?);
    }
    Ok(PregroupType(factors))
}

impl std::str::FromStr for LambekType {
    type Err = TypeParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_lambek(s)
    }
}

impl std::str::FromStr for PregroupType {
    type Err = TypeParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pregroup(s)
    }
}
