//! TikZ and DOT text for bi-non-crossing partitions and LR diagrams, in the
//! usual two-edge layout: left nodes on the left edge, right nodes on the
//! right edge, numbered top to bottom, blocks drawn as ribs meeting a spine.

use crate::bnc::{BncContext, ChiMap, SetPartition, Side};
use crate::error::Result;
use crate::lr::LrDiagram;
use std::fmt::Write;

pub const PALETTE: [&str; 6] = ["orange", "blue", "teal", "red", "violet", "brown"];

const WIDTH: f64 = 1.5;
const STEP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Tikz,
    Dot,
}

struct Picture {
    sides: Vec<Side>,
    colours: Option<Vec<u32>>,
    /// (nodes, reaches the top, colour)
    strands: Vec<(Vec<usize>, bool, Option<u32>)>,
    spines: Vec<f64>,
    caption: String,
}

fn colour_name(c: Option<u32>) -> &'static str {
    match c {
        Some(k) if k > 0 => PALETTE[(k as usize - 1) % PALETTE.len()],
        Some(k) => PALETTE[k as usize % PALETTE.len()],
        None => "black",
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Spine abscissae of closed strands from their nesting depth in the
/// non-crossing order; top strands spread evenly in spine order.
fn spine_positions(chi: &ChiMap, strands: &[(Vec<usize>, bool, Option<u32>)], top_order: &[usize]) -> Result<Vec<f64>> {
    let ctx = BncContext::new(ChiMap::new(chi.sides().iter().map(|s| if *s == Side::Bool { Side::Left } else { *s }).collect()))?;
    let rank = ctx.rank();
    let span: Vec<(usize, usize)> = strands
        .iter()
        .map(|(nodes, _, _)| {
            let r: Vec<usize> = nodes.iter().map(|&i| rank[i]).collect();
            (*r.iter().min().unwrap_or(&0), *r.iter().max().unwrap_or(&0))
        })
        .collect();
    let mut xs = vec![0.0; strands.len()];
    let tops = top_order.len();
    for (j, &s) in top_order.iter().enumerate() {
        xs[s] = WIDTH * (j as f64 + 1.0) / (tops as f64 + 1.0);
    }
    for (s, (nodes, top, _)) in strands.iter().enumerate() {
        if *top {
            continue;
        }
        let depth = span.iter().enumerate().filter(|(t, o)| *t != s && o.0 < span[s].0 && o.1 > span[s].1).count() as f64;
        let left = nodes.iter().any(|&i| chi.sides()[i] != Side::Right);
        let right = nodes.iter().any(|&i| chi.sides()[i] == Side::Right);
        xs[s] = match (left, right) {
            (true, false) => WIDTH * 0.4 / (depth + 1.0),
            (false, true) => WIDTH - WIDTH * 0.4 / (depth + 1.0),
            _ => WIDTH * (0.5 + 0.15 * depth / (depth + 1.0)),
        };
    }
    Ok(xs)
}

impl Picture {
    fn n(&self) -> usize {
        self.sides.len()
    }

    fn y(&self, i: usize) -> f64 {
        STEP * (self.n() - i) as f64
    }

    fn height(&self) -> f64 {
        STEP * (self.n() + 1) as f64
    }

    fn node_x(&self, i: usize) -> f64 {
        if self.sides[i] == Side::Right {
            WIDTH
        } else {
            0.0
        }
    }

    fn tikz(&self) -> String {
        let mut s = String::new();
        s.push_str("\\documentclass[tikz]{standalone}\n\\begin{document}\n\\begin{tikzpicture}[baseline]\n");
        if self.n() > 0 {
            let h = num(self.height());
            let _ = writeln!(s, "  \\draw[thick, dashed] (0,{h}) -- (0,0) -- ({w}, 0) -- ({w},{h});", w = num(WIDTH));
            for i in 0..self.n() {
                let c = colour_name(self.colours.as_ref().map(|c| c[i]));
                let (x, y) = (num(self.node_x(i)), num(self.y(i)));
                let anchor = if self.sides[i] == Side::Right { "right" } else { "left" };
                let _ = writeln!(s, "  \\draw[{c}, fill={c}] ({x}, {y}) circle (0.05);");
                let _ = writeln!(s, "  \\node[{anchor}] at ({x}, {y}) {{${}$}};", i + 1);
            }
            for ((nodes, top, colour), sx) in self.strands.iter().zip(&self.spines) {
                let c = colour_name(*colour);
                let sx = num(*sx);
                let low = self.y(*nodes.iter().max().expect("nonempty strand"));
                let high = if *top { self.height() } else { self.y(nodes[0]) };
                if *top || nodes.len() > 1 {
                    let _ = writeln!(s, "  \\draw[{c}, thick] ({sx}, {}) -- ({sx}, {});", num(low), num(high));
                }
                for &i in nodes {
                    if *top || nodes.len() > 1 {
                        let y = num(self.y(i));
                        let _ = writeln!(s, "  \\draw[{c}, thick] ({}, {y}) -- ({sx}, {y});", num(self.node_x(i)));
                    }
                }
            }
            if !self.caption.is_empty() {
                let _ = writeln!(s, "  \\node[below] at ({}, 0) {{${}$}};", num(WIDTH / 2.0), self.caption);
            }
        }
        s.push_str("\\end{tikzpicture}\n\\end{document}\n");
        s
    }

    fn dot(&self) -> String {
        let mut s = String::new();
        let name = if self.caption.is_empty() { "diagram" } else { &self.caption };
        let _ = writeln!(s, "graph \"{}\" {{", name.replace('"', "'"));
        s.push_str("  node [shape=circle, style=filled, fillcolor=white];\n");
        for i in 0..self.n() {
            let c = colour_name(self.colours.as_ref().map(|c| c[i]));
            let _ = writeln!(s, "  n{} [label=\"{}\", xlabel=\"{}\", color={c}];", i + 1, i + 1, self.sides[i].letter());
        }
        for (j, (nodes, top, colour)) in self.strands.iter().enumerate() {
            let c = colour_name(*colour);
            for w in nodes.windows(2) {
                let _ = writeln!(s, "  n{} -- n{} [color={c}];", w[0] + 1, w[1] + 1);
            }
            if *top {
                let _ = writeln!(s, "  top{} [shape=point, color={c}];", j + 1);
                let _ = writeln!(s, "  top{} -- n{} [color={c}, style=bold];", j + 1, nodes[0] + 1);
            }
        }
        s.push_str("}\n");
        s
    }

    fn render(&self, f: Format) -> String {
        match f {
            Format::Tikz => self.tikz(),
            Format::Dot => self.dot(),
        }
    }
}

pub fn render_partition(p: &SetPartition, chi: &ChiMap, format: Format, caption: &str) -> Result<String> {
    if p.n() != chi.len() {
        return Err(crate::Error::SizeMismatch { expected: chi.len(), found: p.n() });
    }
    let strands: Vec<(Vec<usize>, bool, Option<u32>)> = p.blocks().into_iter().map(|b| (b, false, None)).collect();
    let spines = if strands.is_empty() { Vec::new() } else { spine_positions(chi, &strands, &[])? };
    Ok(Picture { sides: chi.sides().to_vec(), colours: None, strands, spines, caption: caption.into() }.render(format))
}

pub fn render_diagram(d: &LrDiagram, format: Format, caption: &str) -> Result<String> {
    let strands: Vec<(Vec<usize>, bool, Option<u32>)> =
        d.strands().iter().enumerate().map(|(j, s)| (s.nodes.clone(), s.top, Some(d.colour_of(j)))).collect();
    let spines = if strands.is_empty() { Vec::new() } else { spine_positions(d.chi(), &strands, d.spine_order())? };
    let pic = Picture {
        sides: d.chi().sides().to_vec(),
        colours: Some(d.eps().colours().to_vec()),
        strands,
        spines,
        caption: caption.into(),
    };
    Ok(pic.render(format))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_partition_has_frame_ribs_and_spines() {
        let chi: ChiMap = "lrlllr".parse().unwrap();
        let p = SetPartition::parse("{1,2,5,6},{3,4}").unwrap();
        let t = render_partition(&p, &chi, Format::Tikz, "\\pi").unwrap();
        assert_eq!(t.matches("dashed").count(), 1);
        assert_eq!(t.matches("circle").count(), 6);
        // two spines plus six ribs
        assert_eq!(t.matches("black, thick").count(), 8);
        assert!(t.contains("{$\\pi$}"));
        assert_eq!(t, render_partition(&p, &chi, Format::Tikz, "\\pi").unwrap());
    }

    #[test]
    fn empty_diagram_is_header_only() {
        let t = render_diagram(&LrDiagram::empty(), Format::Tikz, "").unwrap();
        assert_eq!(t.lines().count(), 5);
        assert!(!t.contains("\\draw"));
    }

    #[test]
    fn dot_lists_nodes_and_edges() {
        let chi: ChiMap = "ll".parse().unwrap();
        let d = render_partition(&SetPartition::full(2), &chi, Format::Dot, "").unwrap();
        assert!(d.contains("n1 -- n2"));
        assert!(d.starts_with("graph"));
    }
}
