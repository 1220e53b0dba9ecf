//! SVG renderings of reductions and derivations.
//!
//! Geometry is a fixed grid so output is byte-stable: numbers are printed
//! with one decimal and elements are emitted in a deterministic order.

use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use crate::lambek::Derivation;
use crate::pregroup::Reduction;
use crate::types::{LambekType, SimpleType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("{words} words but {spans} type spans")]
    WordCount { words: usize, spans: usize },
    #[error("word spans do not tile the {0} reduction factors")]
    Spans(usize),
    #[error("invalid reduction: {0}")]
    Reduction(String),
    #[error("ill-typed derivation: {0}")]
    Derivation(String),
}

const COL: f64 = 50.0;
const MARGIN: f64 = 20.0;

const STYLE: &str = "text{font-family:serif;font-size:14px;text-anchor:middle}\
.type{font-size:12px}.cup,.bs-cup,.cap{fill:none;stroke:#000}\
.residual,.wire{stroke:#000}.clasp{fill:#fff;stroke:#000}\
.blob{fill:none;stroke:#555;stroke-dasharray:4 2}.arrow{fill:#000}";

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_open(out: &mut String, w: f64, h: f64) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
    )
    .unwrap();
    writeln!(out, "<style>{STYLE}</style>").unwrap();
}

fn type_label(t: &SimpleType) -> String {
    let mut s = escape(t.base.name());
    let (mark, n) = if t.order < 0 {
        ("l", -t.order)
    } else {
        ("r", t.order)
    };
    if n > 0 {
        write!(
            s,
            r#"<tspan dy="-6" font-size="9">{}</tspan>"#,
            mark.repeat(n as usize)
        )
        .unwrap();
    }
    s
}

/// Cancellation diagram: words on top, simple types beneath, a cup under
/// each link and a straight line down from each residual type. Every cup
/// carries `class="cup"` and its nesting depth (0 for outermost).
pub fn render_cancellation(
    r: &Reduction,
    words: &[String],
    word_spans: &[Range<usize>],
) -> Result<String, DiagramError> {
    r.validate().map_err(DiagramError::Reduction)?;
    if words.len() != word_spans.len() {
        return Err(DiagramError::WordCount {
            words: words.len(),
            spans: word_spans.len(),
        });
    }
    let mut next = 0;
    for s in word_spans {
        if s.start != next {
            return Err(DiagramError::Spans(r.input.len()));
        }
        next = s.end;
    }
    if next != r.input.len() {
        return Err(DiagramError::Spans(r.input.len()));
    }
    let x = |i: usize| MARGIN + COL / 2.0 + i as f64 * COL;
    let depths = r.link_depths();
    // Height level of a cup: one more than the tallest cup nested inside.
    let mut level = vec![1usize; r.links.len()];
    let mut by_width: Vec<usize> = (0..r.links.len()).collect();
    by_width.sort_by_key(|&k| r.links[k].1 - r.links[k].0);
    for &k in &by_width {
        let (i, j) = r.links[k];
        level[k] = 1 + r
            .links
            .iter()
            .enumerate()
            .filter(|&(_, &(a, b))| i < a && b < j)
            .map(|(m, _)| level[m])
            .max()
            .unwrap_or(0);
    }
    let max_level = level.iter().copied().max().unwrap_or(0) as f64;
    let top = 60.0;
    let height = top + 18.0 * max_level + 40.0;
    let width = 2.0 * MARGIN + COL * r.input.len().max(1) as f64;
    let mut out = String::new();
    svg_open(&mut out, width, height);
    for (w, span) in words.iter().zip(word_spans) {
        let cx = if span.is_empty() {
            x(span.start)
        } else {
            (x(span.start) + x(span.end - 1)) / 2.0
        };
        writeln!(out, r#"<text class="word" x="{cx:.1}" y="20.0">{}</text>"#, escape(w)).unwrap();
    }
    for (i, t) in r.input.iter().enumerate() {
        writeln!(out, r#"<text class="type" x="{:.1}" y="45.0">{}</text>"#, x(i), type_label(t)).unwrap();
    }
    for (k, &(i, j)) in r.links.iter().enumerate() {
        let dip = top + 18.0 * level[k] as f64;
        writeln!(
            out,
            r#"<path class="cup" data-depth="{}" d="M {:.1} {top:.1} C {:.1} {dip:.1} {:.1} {dip:.1} {:.1} {top:.1}"/>"#,
            depths[k],
            x(i),
            x(i),
            x(j),
            x(j)
        )
        .unwrap();
    }
    for &i in &r.residual {
        writeln!(
            out,
            r#"<line class="residual" x1="{0:.1}" y1="{top:.1}" x2="{0:.1}" y2="{1:.1}"/>"#,
            x(i),
            height - 5.0
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[derive(Clone, Debug)]
enum Shape {
    Line(f64, f64, f64, f64, &'static str),
    Cubic([(f64, f64); 4], &'static str),
    Circle(f64, f64, &'static str),
    Ellipse(f64, f64, f64, f64, &'static str),
    Rect(f64, f64, f64, f64, &'static str),
    Text(f64, f64, String, &'static str),
    /// Direction marker on a wire; `true` points up.
    Arrow(f64, f64, bool),
}

impl Shape {
    fn shifted(self, dx: f64, dy: f64) -> Shape {
        use Shape::*;
        match self {
            Line(a, b, c, d, k) => Line(a + dx, b + dy, c + dx, d + dy, k),
            Cubic(p, k) => Cubic(p.map(|(x, y)| (x + dx, y + dy)), k),
            Circle(x, y, k) => Circle(x + dx, y + dy, k),
            Ellipse(x, y, rx, ry, k) => Ellipse(x + dx, y + dy, rx, ry, k),
            Rect(x, y, w, h, k) => Rect(x + dx, y + dy, w, h, k),
            Text(x, y, s, k) => Text(x + dx, y + dy, s, k),
            Arrow(x, y, up) => Arrow(x + dx, y + dy, up),
        }
    }

    fn emit(&self, out: &mut String) {
        use Shape::*;
        match self {
            Line(x1, y1, x2, y2, k) => writeln!(
                out,
                r#"<line class="{k}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}"/>"#
            ),
            Cubic([(x0, y0), (x1, y1), (x2, y2), (x3, y3)], k) => writeln!(
                out,
                r#"<path class="{k}" d="M {x0:.1} {y0:.1} C {x1:.1} {y1:.1} {x2:.1} {y2:.1} {x3:.1} {y3:.1}"/>"#
            ),
            Circle(x, y, k) => writeln!(out, r#"<circle class="{k}" cx="{x:.1}" cy="{y:.1}" r="5.0"/>"#),
            Ellipse(x, y, rx, ry, k) => writeln!(
                out,
                r#"<ellipse class="{k}" cx="{x:.1}" cy="{y:.1}" rx="{rx:.1}" ry="{ry:.1}"/>"#
            ),
            Rect(x, y, w, h, k) => writeln!(
                out,
                r#"<rect class="{k}" x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" rx="8.0"/>"#
            ),
            Text(x, y, s, k) => writeln!(out, r#"<text class="{k}" x="{x:.1}" y="{y:.1}">{}</text>"#, escape(s)),
            Arrow(x, y, up) => {
                let (tip, back) = if *up { (y - 4.0, y + 4.0) } else { (y + 4.0, y - 4.0) };
                writeln!(
                    out,
                    r#"<path class="arrow" d="M {:.1} {back:.1} L {x:.1} {tip:.1} L {:.1} {back:.1} Z"/>"#,
                    x - 4.0,
                    x + 4.0
                )
            }
        }
        .unwrap();
    }
}

/// A laid-out piece: input wires enter at `y = 0`, outputs leave at
/// `y = height`.
#[derive(Clone, Debug, Default)]
struct Frag {
    width: f64,
    height: f64,
    ins: Vec<f64>,
    outs: Vec<f64>,
    shapes: Vec<Shape>,
}

const WIRE: f64 = 30.0;
const ROW: f64 = 40.0;

fn wire_xs(n: usize) -> Vec<f64> {
    (0..n).map(|k| WIRE / 2.0 + k as f64 * WIRE).collect()
}

fn width_for(n: usize) -> f64 {
    WIRE * n.max(1) as f64
}

fn leaves(t: &LambekType) -> usize {
    t.leaves().len()
}

impl Frag {
    fn shift(mut self, dx: f64, dy: f64) -> Frag {
        self.shapes = self.shapes.into_iter().map(|s| s.shifted(dx, dy)).collect();
        self.ins.iter_mut().for_each(|x| *x += dx);
        self.outs.iter_mut().for_each(|x| *x += dx);
        self
    }

    fn blob(&mut self, class: &'static str) {
        let (cx, cy) = (self.width / 2.0, self.height / 2.0);
        self.shapes.push(Shape::Ellipse(
            cx,
            cy,
            self.width / 2.0,
            self.height / 2.0 - 2.0,
            class,
        ));
    }
}

/// Cups joining `left[k]` to `right[n-1-k]` so that they nest.
fn nested_cups(left: &[f64], right: &[f64], y: f64, class: &'static str, down: bool) -> Vec<Shape> {
    let n = left.len();
    (0..n)
        .map(|k| {
            let (a, b) = (left[n - 1 - k], right[k]);
            let depth = 8.0 * (k + 1) as f64;
            let cy = if down { y + depth } else { y - depth };
            Shape::Cubic([(a, y), (a, cy), (b, cy), (b, y)], class)
        })
        .collect()
}

fn identity_frag(n: usize) -> Frag {
    let xs = wire_xs(n);
    let shapes = xs
        .iter()
        .map(|&x| Shape::Line(x, 0.0, x, ROW, "wire"))
        .collect();
    Frag {
        width: width_for(n),
        height: ROW,
        ins: xs.clone(),
        outs: xs,
        shapes,
    }
}

fn eval_frag(left: bool, a: &LambekType, b: &LambekType) -> Frag {
    let (na, nb) = (leaves(a), leaves(b));
    let n_in = if left { 2 * na + nb } else { na + 2 * nb };
    let xs = wire_xs(n_in);
    let h = 2.0 * ROW;
    let mut shapes = Vec::new();
    let (cup_l, cup_r, outs): (&[f64], &[f64], Vec<f64>) = if left {
        (&xs[..na], &xs[na..2 * na], xs[2 * na..].to_vec())
    } else {
        (&xs[na..na + nb], &xs[na + nb..], xs[..na].to_vec())
    };
    for &x in [cup_l, cup_r].concat().iter() {
        shapes.push(Shape::Line(x, 0.0, x, ROW * 0.5, "wire"));
    }
    shapes.extend(nested_cups(cup_l, cup_r, ROW * 0.5, "bs-cup", true));
    for &x in &outs {
        shapes.push(Shape::Line(x, 0.0, x, h, "wire"));
    }
    let mut f = Frag {
        width: width_for(n_in),
        height: h,
        ins: xs,
        outs,
        shapes,
    };
    f.blob("blob ev");
    f
}

/// Shared layout for curry and name: `inner` gets `n_new` extra input
/// wires that come from a cap bending down into new output wires placed on
/// the `left` or right side; a clasp joins new and old outputs.
fn bend_frag(inner: Frag, n_new: usize, left: bool, inner_new_first: bool) -> Frag {
    let pad = WIRE * n_new as f64;
    let dy = ROW;
    let inner = if left { inner.shift(pad, dy) } else { inner.shift(0.0, dy) };
    let width = inner.width + pad;
    let height = inner.height + 2.0 * dy;
    let n_in = inner.ins.len();
    let (bent, passing): (Vec<f64>, Vec<f64>) = if inner_new_first {
        (inner.ins[..n_new].to_vec(), inner.ins[n_new..].to_vec())
    } else {
        (inner.ins[n_in - n_new..].to_vec(), inner.ins[..n_in - n_new].to_vec())
    };
    let new_xs: Vec<f64> = if left {
        wire_xs(n_new)
    } else {
        (0..n_new)
            .map(|k| inner.width + WIRE / 2.0 + k as f64 * WIRE)
            .collect()
    };
    let mut shapes = inner.shapes;
    for &x in &passing {
        shapes.push(Shape::Line(x, 0.0, x, dy, "wire"));
    }
    let cap_y = dy * 0.6;
    for &x in bent.iter().chain(&new_xs) {
        shapes.push(Shape::Line(x, cap_y, x, dy, "wire"));
    }
    let (l, r) = if left { (&new_xs, &bent) } else { (&bent, &new_xs) };
    shapes.extend(nested_cups(l, r, cap_y, "cap", false));
    for &x in &new_xs {
        shapes.push(Shape::Line(x, dy, x, height, "wire"));
        shapes.push(Shape::Arrow(x, dy + 6.0, true));
    }
    let mut outs_inner = Vec::new();
    for &x in &inner.outs {
        shapes.push(Shape::Line(x, dy + inner.height, x, height, "wire"));
        outs_inner.push(x);
    }
    let outs: Vec<f64> = if left {
        new_xs.iter().chain(&outs_inner).copied().collect()
    } else {
        outs_inner.iter().chain(&new_xs).copied().collect()
    };
    let clasp_x = if left {
        let last_new = new_xs.last().copied().unwrap_or(0.0);
        let first_old = outs_inner.first().copied().unwrap_or(last_new + WIRE);
        (last_new + first_old) / 2.0
    } else {
        let first_new = new_xs.first().copied().unwrap_or(width);
        let last_old = outs_inner.last().copied().unwrap_or(first_new - WIRE);
        (last_old + first_new) / 2.0
    };
    shapes.push(Shape::Circle(clasp_x, height - dy * 0.4, "clasp"));
    let ins = passing;
    let mut f = Frag {
        width,
        height,
        ins,
        outs,
        shapes,
    };
    f.blob("blob curry");
    f
}

fn connect(from: &[f64], to: &[f64], y0: f64, y1: f64) -> Vec<Shape> {
    from.iter()
        .zip(to)
        .map(|(&a, &b)| {
            if a == b {
                Shape::Line(a, y0, b, y1, "wire")
            } else {
                let m = (y0 + y1) / 2.0;
                Shape::Cubic([(a, y0), (a, m), (b, m), (b, y1)], "wire")
            }
        })
        .collect()
}

fn layout(d: &Derivation) -> Frag {
    use Derivation::*;
    match d {
        Id(a) => identity_frag(leaves(a)),
        EvL(a, b) => eval_frag(true, a, b),
        EvR(a, b) => eval_frag(false, a, b),
        CurryL(a, f) => bend_frag(layout(f), leaves(a), true, true),
        CurryR(b, g) => bend_frag(layout(g), leaves(b), false, false),
        NameL(f) => bend_frag(layout(f), leaves(&f.domain()), true, true),
        NameR(f) => bend_frag(layout(f), leaves(&f.domain()), false, true),
        Compose(g, f) => {
            let (f, g) = (layout(f), layout(g));
            let gap = ROW / 2.0;
            let width = f.width.max(g.width);
            let g = g.shift(0.0, f.height + gap);
            let mut shapes = f.shapes;
            shapes.extend(connect(&f.outs, &g.ins, f.height, f.height + gap));
            shapes.extend(g.shapes);
            let height = f.height + gap + g.height;
            shapes.push(Shape::Rect(1.0, 1.0, width - 2.0, height - 2.0, "blob compose"));
            Frag {
                width,
                height,
                ins: f.ins,
                outs: g.outs,
                shapes,
            }
        }
        Par(f, g) => {
            let (f, g) = (layout(f), layout(g));
            let height = f.height.max(g.height);
            let g = g.shift(f.width, 0.0);
            let mut shapes = f.shapes;
            for (x, h) in f.outs.iter().map(|&x| (x, f.height)).chain(g.outs.iter().map(|&x| (x, g.height))) {
                if h < height {
                    shapes.push(Shape::Line(x, h, x, height, "wire"));
                }
            }
            shapes.extend(g.shapes);
            Frag {
                width: f.width + g.width,
                height,
                ins: f.ins.into_iter().chain(g.ins).collect(),
                outs: f.outs.into_iter().chain(g.outs).collect(),
                shapes,
            }
        }
    }
}

/// Wire direction for each leaf: `true` (upward) for leaves on the argument
/// side of an odd number of implications.
fn polarities(t: &LambekType, flip: bool, out: &mut Vec<bool>) {
    match t {
        LambekType::Basic(_) => out.push(flip),
        LambekType::Unit => {}
        LambekType::Product(a, b) => {
            polarities(a, flip, out);
            polarities(b, flip, out);
        }
        LambekType::LImpl(a, b) => {
            polarities(a, !flip, out);
            polarities(b, flip, out);
        }
        LambekType::RImpl(a, b) => {
            polarities(a, flip, out);
            polarities(b, !flip, out);
        }
    }
}

/// One clasp per implication node, between the wires of its two sides.
fn type_clasps(t: &LambekType, xs: &[f64], y: f64, depth: usize, out: &mut Vec<Shape>) {
    match t {
        LambekType::Basic(_) | LambekType::Unit => {}
        LambekType::Product(a, b) | LambekType::LImpl(a, b) | LambekType::RImpl(a, b) => {
            let na = leaves(a);
            if t.is_implication() && na > 0 && na < xs.len() {
                let cx = (xs[na - 1] + xs[na]) / 2.0;
                out.push(Shape::Circle(cx, y + 10.0 * depth as f64, "clasp"));
            } else if t.is_implication() {
                let cx = xs.first().copied().unwrap_or(0.0);
                out.push(Shape::Circle(cx, y + 10.0 * depth as f64, "clasp"));
            }
            type_clasps(a, &xs[..na], y, depth + 1, out);
            type_clasps(b, &xs[na..], y, depth + 1, out);
        }
    }
}

/// Clasp diagram of `d`, with `words` (one per flattened antecedent of the
/// derivation's domain) written above their wires.
///
/// Objects are directed wires; each implication in the domain is drawn as a
/// clasp joining its argument and result wires, evaluations are blobs
/// containing cups, curries and names are blobs that bend a wire round and
/// add a clasp, and compositions are framed.
pub fn render_baez_stay(d: &Derivation, words: &[String]) -> Result<String, DiagramError> {
    let (dom, _) = d
        .check()
        .map_err(|e| DiagramError::Derivation(e.to_string()))?;
    let items = dom.flatten();
    if !words.is_empty() && words.len() != items.len() {
        return Err(DiagramError::WordCount {
            words: words.len(),
            spans: items.len(),
        });
    }
    let body = layout(d);
    let head = 84.0;
    let gap = ROW / 2.0;
    let body = body.shift(MARGIN, head + gap);
    let mut shapes = Vec::new();
    let mut k = 0;
    for (idx, item) in items.iter().enumerate() {
        let n = leaves(item);
        let xs: Vec<f64> = body.ins[k..k + n].to_vec();
        k += n;
        let cx = if xs.is_empty() {
            MARGIN
        } else {
            (xs[0] + xs[n - 1]) / 2.0
        };
        if let Some(w) = words.get(idx) {
            shapes.push(Shape::Text(cx, 18.0, w.clone(), "word"));
        }
        // Alternate rows so long neighbouring types do not overlap.
        let label_y = if idx % 2 == 0 { 36.0 } else { 52.0 };
        shapes.push(Shape::Text(cx, label_y, item.to_string(), "type"));
        let mut pol = Vec::new();
        polarities(item, false, &mut pol);
        for (&x, &up) in xs.iter().zip(&pol) {
            shapes.push(Shape::Line(x, 60.0, x, head + gap, "wire"));
            shapes.push(Shape::Arrow(x, head, up));
        }
        type_clasps(item, &xs, 64.0, 0, &mut shapes);
    }
    let bottom = head + gap + body.height;
    let height = bottom + 30.0;
    for &x in &body.outs {
        shapes.push(Shape::Line(x, bottom, x, height - 5.0, "wire"));
        shapes.push(Shape::Arrow(x, bottom + 12.0, false));
    }
    let width = body.width.max(WIRE) + 2.0 * MARGIN;
    let mut out = String::new();
    svg_open(&mut out, width, height);
    for s in shapes.iter().chain(&body.shapes) {
        s.emit(&mut out);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Number of elements whose class list contains `class`.
pub fn count_class(svg: &str, class: &str) -> usize {
    svg.split("class=\"")
        .skip(1)
        .filter(|rest| {
            rest.split('"')
                .next()
                .is_some_and(|c| c.split(' ').any(|w| w == class))
        })
        .count()
}
