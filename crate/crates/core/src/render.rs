//! Static SVG drawing of a one-sided tanglegram and its block crossings.
//!
//! Leaves `1..n` sit top to bottom on the left; the solved tree is mirrored
//! on the right with its leaves in witness order. Reading right to left,
//! each transposition gets one column in which its two blocks trade places,
//! drawn as two shaded bands. Output depends only on the inputs.

use std::fmt::Write as _;

use thiserror::Error;

use crate::tree::{NodeId, RootedTree};
use crate::witness::{Verdict, Witness, WitnessError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("witness does not certify this tree: {0:?}")]
    InvalidWitness(Verdict),
    #[error("left tree must list its leaves as 1..n in its current order")]
    LeftTreeNotIdentity,
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

const ROW: f64 = 24.0;
const MARGIN: f64 = 24.0;
const LEVEL: f64 = 18.0;
const LABEL: f64 = 28.0;
const COLUMN: f64 = 48.0;
const GAP: f64 = 16.0;

/// Renders `right` solved by `witness`. The left side shows a fixed tree if
/// given (its current order must be the identity), else only leaf labels.
pub fn render_svg(right: &RootedTree, witness: &Witness, left: Option<&RootedTree>) -> Result<String, RenderError> {
    match witness.check(right, None)? {
        Verdict::Valid => {}
        other => return Err(RenderError::InvalidWitness(other)),
    }
    if let Some(l) = left {
        if l.leaf_count() != right.leaf_count() || !l.current_leaf_order().is_identity() {
            return Err(RenderError::LeftTreeNotIdentity);
        }
    }
    let n = right.leaf_count();
    let steps = witness.sequence.len();
    let left_depth = left.map_or(0, height);
    let right_depth = height(&right.reordered(&witness.permutation).expect("witness checked"));

    let left_leaves = MARGIN + left_depth as f64 * LEVEL + LABEL;
    let first_col = left_leaves + GAP;
    let right_leaves = first_col + steps as f64 * (COLUMN + GAP);
    let width = right_leaves + LABEL + right_depth as f64 * LEVEL + MARGIN;
    let height_px = 2.0 * MARGIN + n as f64 * ROW;
    let y = |row: usize| MARGIN + (row as f64 + 0.5) * ROW;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt(width),
        fmt(height_px),
        fmt(width),
        fmt(height_px)
    );
    svg.push_str(concat!(
        "<style>",
        ".tree{stroke:#222;stroke-width:1.5;fill:none}",
        ".edge{stroke:#1f5fa8;stroke-width:1.2;fill:none}",
        ".band{fill:#f2a541;fill-opacity:0.35;stroke:none}",
        ".band.second{fill:#5fa8d3}",
        ".label{font-family:monospace;font-size:12px;dominant-baseline:middle}",
        "</style>\n"
    ));

    // rows of every element after each step, right to left
    let mut orders = vec![witness.permutation.clone()];
    for t in &witness.sequence {
        let next = orders.last().unwrap().apply(t).expect("witness checked");
        orders.push(next);
    }
    let col_x = |c: usize| {
        // column c (0-based, counted from the right) spans [lo, hi]
        let hi = right_leaves - GAP - c as f64 * (COLUMN + GAP);
        (hi - COLUMN, hi)
    };

    svg.push_str("<g class=\"crossings\">\n");
    for (c, t) in witness.sequence.iter().enumerate() {
        let (lo, hi) = col_x(c);
        let (i, j, k) = (t.i(), t.j(), t.k());
        let top = |row: usize| y(row) - ROW / 2.0;
        // block [i, j) moves down by k - j rows, block [j, k) up by j - i
        let first = [
            (hi, top(i - 1)),
            (hi, top(j - 1)),
            (lo, top(k - 1)),
            (lo, top(k - 1 - (j - i))),
        ];
        let second = [
            (hi, top(j - 1)),
            (hi, top(k - 1)),
            (lo, top(i - 1 + (k - j))),
            (lo, top(i - 1)),
        ];
        let _ = writeln!(svg, "<g class=\"crossing\" data-step=\"{}\" data-transposition=\"{t}\">", c + 1);
        let _ = writeln!(svg, "<polygon class=\"band first\" points=\"{}\"/>", points(&first));
        let _ = writeln!(svg, "<polygon class=\"band second\" points=\"{}\"/>", points(&second));
        svg.push_str("</g>\n");
    }
    svg.push_str("</g>\n");

    svg.push_str("<g class=\"edges\">\n");
    let positions: Vec<Vec<usize>> = orders.iter().map(|o| o.positions()).collect();
    for v in 1..=n {
        let mut pts = vec![(right_leaves, y(positions[0][v] - 1))];
        for (c, pair) in positions.windows(2).enumerate() {
            let (lo, hi) = col_x(c);
            pts.push((hi, y(pair[0][v] - 1)));
            pts.push((lo, y(pair[1][v] - 1)));
        }
        pts.push((left_leaves, y(v - 1)));
        let _ = writeln!(svg, "<polyline class=\"edge\" data-leaf=\"{v}\" points=\"{}\"/>", points(&pts));
    }
    svg.push_str("</g>\n");

    svg.push_str("<g class=\"labels\">\n");
    for v in 1..=n {
        let _ = writeln!(
            svg,
            "<text class=\"label\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{v}</text>",
            fmt(left_leaves - 4.0),
            fmt(y(v - 1))
        );
    }
    for (row, &v) in witness.permutation.as_slice().iter().enumerate() {
        let _ = writeln!(
            svg,
            "<text class=\"label\" x=\"{}\" y=\"{}\">{v}</text>",
            fmt(right_leaves + 4.0),
            fmt(y(row))
        );
    }
    svg.push_str("</g>\n");

    if let Some(l) = left {
        let x_leaf = left_leaves - LABEL;
        draw_tree(&mut svg, l, y, |h| x_leaf - h as f64 * LEVEL, "left");
    }
    let solved = right.reordered(&witness.permutation).expect("witness checked");
    let x_leaf = right_leaves + LABEL;
    draw_tree(&mut svg, &solved, y, |h| x_leaf + h as f64 * LEVEL, "right");

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn height(t: &RootedTree) -> usize {
    let mut h = vec![0usize; t.node_count()];
    for v in t.post_order() {
        h[v.index()] = t.children(v).iter().map(|c| h[c.index()] + 1).max().unwrap_or(0);
    }
    h[t.root().index()]
}

/// Rectangular dendrogram: inner node at height `h` sits at `x_of(h)`,
/// vertically centred between its first and last child.
fn draw_tree(svg: &mut String, t: &RootedTree, y_of: impl Fn(usize) -> f64, x_of: impl Fn(usize) -> f64, side: &str) {
    let n = t.node_count();
    let mut h = vec![0usize; n];
    let mut yy = vec![0f64; n];
    let mut row = 0;
    for v in t.post_order() {
        if t.is_leaf(v) {
            yy[v.index()] = y_of(row);
            row += 1;
        } else {
            let ch = t.children(v);
            h[v.index()] = ch.iter().map(|c| h[c.index()] + 1).max().unwrap();
            yy[v.index()] = (yy[ch[0].index()] + yy[ch[ch.len() - 1].index()]) / 2.0;
        }
    }
    let x = |v: NodeId| x_of(h[v.index()]);
    let _ = writeln!(svg, "<g class=\"tree {side}\">");
    for v in t.internal_nodes() {
        let ch = t.children(v);
        let (top, bottom) = (yy[ch[0].index()], yy[ch[ch.len() - 1].index()]);
        let mut d = format!("M{} {}V{}", fmt(x(v)), fmt(top), fmt(bottom));
        for &c in ch {
            let _ = write!(d, "M{} {}H{}", fmt(x(v)), fmt(yy[c.index()]), fmt(x(c)));
        }
        let _ = writeln!(svg, "<path class=\"tree\" d=\"{d}\"/>");
    }
    svg.push_str("</g>\n");
}

fn fmt(v: f64) -> String {
    format!("{v:.1}")
}

fn points(pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|&(x, y)| format!("{},{}", fmt(x), fmt(y)))
        .collect::<Vec<_>>()
        .join(" ")
}
