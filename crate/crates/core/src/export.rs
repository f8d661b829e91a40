//! Graphviz export of the overlap graph and SVG drawings of patches.

use crate::model::{FlatPoint, ModelError, Validated};
use crate::numeric::QVec;
use crate::overlap::{OverlapGraph, Split};
use nalgebra::{DMatrix, DVector};
use std::fmt::Write;
use thiserror::Error;

/// Cap on the points of one tile cloud.
pub const MAX_CLOUD_POINTS: usize = 20_000;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f", "#393b79", "#637939",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExportError {
    #[error("cannot draw dimension {0}; at most 3 is supported")]
    UnsupportedDim(usize),
    #[error("expansion is not invertible")]
    Singular,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn coords(x: &[f64]) -> String {
    let parts: Vec<String> = x
        .iter()
        .map(|&t| format!("{:.4}", if t.abs() < 5e-5 { 0.0 } else { t }))
        .collect();
    format!("({})", parts.join(", "))
}

/// DOT digraph with one node per overlap class, labelled
/// `i|j|z≈(…)` with colours counted from 1, and one edge statement per
/// adjacent pair labelled with its multiplicity.
pub fn to_dot(v: &Validated, g: &OverlapGraph, split: &Split) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph overlaps {{");
    let _ = writeln!(out, "  node [shape=ellipse, fontname=\"monospace\"];");
    for (n, key) in g.keys.iter().enumerate() {
        let label = format!("{}|{}|z≈{}", key.i + 1, key.j + 1, coords(&v.realizer.realize_qvec(&key.z)));
        let mut attrs = vec![format!("label=\"{label}\"")];
        if key.is_coincidence() {
            attrs.push("shape=doublecircle".into());
        }
        if !split.coin[n] {
            attrs.push("style=dashed".into());
        }
        let _ = writeln!(out, "  n{n} [{}];", attrs.join(", "));
    }
    for (a, b, w) in g.graph.edges() {
        let _ = writeln!(out, "  n{a} -> n{b} [label=\"{w}\"];");
    }
    out.push_str("}\n");
    out
}

/// Realized points of `Q^{-n}·Φ^n(0, j)`: a digit-address approximation of
/// the prototile of colour `j`.
pub fn tile_cloud(v: &Validated, j: usize, n: usize, max_points: usize) -> Result<Vec<Vec<f64>>, ExportError> {
    let start = FlatPoint {
        colour: j,
        pos: QVec::zero(v.flat.q.to_f64().1),
    };
    let pts = v.flat.iterate(&[start], n, max_points)?;
    let inv = v.q_real.clone().try_inverse().ok_or(ExportError::Singular)?;
    let mut scale = DMatrix::identity(inv.nrows(), inv.ncols());
    for _ in 0..n {
        scale = &inv * scale;
    }
    Ok(pts
        .iter()
        .map(|p| {
            let x = DVector::from_vec(v.realizer.realize_qvec(&p.pos));
            (&scale * x).iter().copied().collect()
        })
        .collect())
}

/// Largest `n ≤ cap` whose clouds stay within [`MAX_CLOUD_POINTS`].
fn cloud_depth(v: &Validated, cap: usize) -> usize {
    let m = v.flat.m;
    let mut count = vec![1u128; m];
    for n in 0..cap {
        let next: Vec<u128> = (0..m)
            .map(|j| (0..m).map(|i| v.flat.digits[i][j].len() as u128 * count[i]).sum())
            .collect();
        if next.iter().any(|&c| c > MAX_CLOUD_POINTS as u128) {
            return n;
        }
        count = next;
    }
    cap
}

fn project(x: &[f64]) -> (f64, f64) {
    match x.len() {
        1 => (x[0], 0.0),
        _ => (x[0], x[1]),
    }
}

/// SVG drawing of `Φ^depth(ξ)`: one marker per point, and behind it a dot
/// cloud of the prototile, both coloured by tile type. Three-dimensional
/// models are drawn by their first two coordinates.
pub fn render_svg(v: &Validated, xi: &FlatPoint, depth: usize, tile_res: usize, max_points: usize) -> Result<String, ExportError> {
    let d = v.realizer.dim();
    if d > 3 {
        return Err(ExportError::UnsupportedDim(d));
    }
    let pts = v.flat.iterate(std::slice::from_ref(xi), depth, max_points)?;
    let n = cloud_depth(v, tile_res);
    let clouds: Vec<Vec<(f64, f64)>> = (0..v.flat.m)
        .map(|j| Ok(tile_cloud(v, j, n, max_points)?.iter().map(|x| project(x)).collect()))
        .collect::<Result<_, ExportError>>()?;
    let markers: Vec<(usize, (f64, f64))> = pts
        .iter()
        .map(|p| (p.colour, project(&v.realizer.realize_qvec(&p.pos))))
        .collect();

    let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    let mut widen = |(x, y): (f64, f64)| {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    };
    for &(c, (x, y)) in &markers {
        widen((x, y));
        for &(a, b) in &clouds[c] {
            widen((x + a, y + b));
        }
    }
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
    let size = 800.0;
    let margin = 20.0;
    let s = (size - 2.0 * margin) / span;
    let to_screen = |(x, y): (f64, f64)| (margin + (x - lo.0) * s, size - margin - (y - lo.1) * s);
    let dot = (0.6 / (clouds.iter().map(Vec::len).max().unwrap_or(1) as f64).sqrt() * s).clamp(0.3, 3.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
    );
    let _ = writeln!(out, "<title>{} depth {depth}</title>", xml_escape(&v.model.name));
    if d == 3 {
        let _ = writeln!(out, "<text x=\"4\" y=\"14\" font-size=\"12\">projection onto coordinates 1, 2</text>");
    }
    let _ = writeln!(out, "<defs>");
    for (j, cloud) in clouds.iter().enumerate() {
        let _ = writeln!(out, "<g id=\"tile{j}\" fill=\"{}\" fill-opacity=\"0.35\">", PALETTE[j % PALETTE.len()]);
        for &(a, b) in cloud {
            let _ = writeln!(out, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{dot:.3}\"/>", a * s, -b * s);
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</defs>");
    for &(c, p) in &markers {
        let (x, y) = to_screen(p);
        let _ = writeln!(out, "<use xlink:href=\"#tile{c}\" x=\"{x:.3}\" y=\"{y:.3}\"/>");
    }
    for &(c, p) in &markers {
        let (x, y) = to_screen(p);
        let _ = writeln!(
            out,
            "<circle class=\"marker\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"2.5\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.5\"/>",
            PALETTE[c % PALETTE.len()]
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixed_seed, suspend_symbolic, validate, SymbolicSubstitution, DEFAULT_MAX_POINTS};
    use crate::overlap::{build_graph, split_graph, OverlapKey};
    use std::collections::BTreeSet;

    fn pd() -> (Validated, FlatPoint) {
        let s = SymbolicSubstitution::from_words("pd", &["01", "00"]).unwrap();
        let v = validate(&suspend_symbolic(&s, 128).unwrap()).unwrap();
        let (_, xi) = fixed_seed(&v, 6, DEFAULT_MAX_POINTS).unwrap();
        let xi = v.model.to_flat_point(&xi).unwrap();
        (v, xi)
    }

    #[test]
    fn dot_counts() {
        let (v, _) = pd();
        let seeds: BTreeSet<OverlapKey> = [OverlapKey {
            i: 0,
            j: 1,
            z: QVec::from_ints(vec![-1]),
        }]
        .into_iter()
        .collect();
        let g = build_graph(&v, &seeds, 1.0 + 1e-6, 1000).unwrap();
        let split = split_graph(&g);
        let dot = to_dot(&v, &g, &split);
        assert_eq!(dot.matches(" -> ").count(), g.graph.edge_count());
        assert_eq!(dot.lines().filter(|l| l.contains("label=\"") && !l.contains("->")).count(), g.len());
        assert_eq!(dot.matches("doublecircle").count(), g.keys.iter().filter(|k| k.is_coincidence()).count());
    }

    #[test]
    fn marker_counts() {
        let (v, xi) = pd();
        let svg = render_svg(&v, &xi, 0, 3, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(svg.matches("class=\"marker\"").count(), 1);
        let svg = render_svg(&v, &xi, 5, 3, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(svg.matches("class=\"marker\"").count(), 32);
        assert_eq!(svg, render_svg(&v, &xi, 5, 3, DEFAULT_MAX_POINTS).unwrap());
    }

    #[test]
    fn cloud_fills_unit_interval() {
        let (v, _) = pd();
        let c = tile_cloud(&v, 0, 6, DEFAULT_MAX_POINTS).unwrap();
        let (lo, hi) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x[0]), b.max(x[0])));
        assert!(lo >= -1e-9 && hi <= 1.0 && hi > 0.9);
    }
}
