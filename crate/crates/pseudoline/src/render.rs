//! Deterministic SVG rendering of wiring and tunnel diagrams, with
//! optional path overlays. Text output only, so golden files diff cleanly.

use crate::error::Result;
use crate::path::DualPath;
use crate::plane::{PlaneGraph, Side};
use crate::wiring::{LineColor, WiringDiagram};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RenderMode {
    /// Pseudolines on horizontal wires, swapping at crossings.
    Wiring,
    /// Every edge drawn at the height of its level, so wall edges of a
    /// width-`w` decomposition lie on horizontal lines.
    Tunnel,
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub mode: RenderMode,
    pub width: u32,
    pub height: u32,
    /// Tunnel width used to tint wall edges in tunnel mode.
    pub tunnel_width: Option<usize>,
    pub overlay: Option<DualPath>,
    pub colors: Option<Vec<LineColor>>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            mode: RenderMode::Wiring,
            width: 800,
            height: 400,
            tunnel_width: None,
            overlay: None,
            colors: None,
        }
    }
}

fn stroke(colors: &Option<Vec<LineColor>>, line: usize) -> &'static str {
    match colors.as_ref().map(|c| c[line]) {
        Some(LineColor::Red) => "#d62728",
        Some(LineColor::Blue) => "#1f77b4",
        None => "#333333",
    }
}

/// Renders a diagram to SVG 1.1. Requires `tunnel_width` in tunnel mode.
pub fn render(d: &WiringDiagram, g: &PlaneGraph, spec: &RenderSpec) -> Result<String> {
    let n = d.n();
    let slots = d.crossings().len().max(1);
    let (w, h) = (spec.width as f64, spec.height as f64);
    let margin = 30.0;
    let xstep = (w - 2.0 * margin) / (slots as f64 + 1.0);
    let rows = match spec.mode {
        RenderMode::Wiring => n.max(2) as f64,
        RenderMode::Tunnel => (n.max(2) - 1) as f64,
    };
    let ystep = (h - 2.0 * margin) / rows;
    // y grows downward in SVG; put wire 1 / level 0 at the bottom.
    let ypos = |row: f64| h - margin - row * ystep;
    let xpos = |slot: f64| margin + (slot + 1.0) * xstep;

    let mut body = String::new();
    match spec.mode {
        RenderMode::Wiring => {
            // Track wire heights through the crossings.
            let mut pos: Vec<usize> = (0..n).collect(); // line -> 0-based height
            let mut pts: Vec<Vec<(f64, f64)>> =
                (0..n).map(|l| vec![(0.0, ypos(pos[l] as f64))]).collect();
            for (ci, &gap) in d.crossings().iter().enumerate() {
                let (a, b) = {
                    let mut a = usize::MAX;
                    let mut bline = usize::MAX;
                    for l in 0..n {
                        if pos[l] == gap - 1 {
                            a = l;
                        }
                        if pos[l] == gap {
                            bline = l;
                        }
                    }
                    (a, bline)
                };
                let x = xpos(ci as f64);
                for (line, from, to) in [(a, gap - 1, gap), (b, gap, gap - 1)] {
                    pts[line].push((x - 0.35 * xstep, ypos(from as f64)));
                    pts[line].push((x + 0.35 * xstep, ypos(to as f64)));
                }
                pos[a] = gap;
                pos[b] = gap - 1;
            }
            for (l, line_pts) in pts.iter_mut().enumerate() {
                line_pts.push((w, ypos(pos[l] as f64)));
                let path: Vec<String> = line_pts
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", x, y))
                    .collect();
                body.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                    stroke(&spec.colors, l),
                    path.join(" ")
                ));
            }
        }
        RenderMode::Tunnel => {
            let tw = spec.tunnel_width.ok_or_else(|| {
                crate::error::Error::BadParameter("tunnel mode needs a tunnel width".into())
            })?;
            let td = crate::tunnel::TunnelDecomposition::new(g, tw)?;
            // Every edge is a horizontal segment at its level; vertices
            // join the four surrounding edge ends with short diagonals.
            for (e, edge) in g.edges.iter().enumerate() {
                let x0 = edge
                    .left
                    .map(|v| xpos(v as f64) + 0.2 * xstep)
                    .unwrap_or(0.0);
                let x1 = edge
                    .right
                    .map(|v| xpos(v as f64) - 0.2 * xstep)
                    .unwrap_or(w);
                let y = ypos(edge.level as f64);
                let color = if td.is_wall_edge(e) {
                    "#f2a0a0"
                } else {
                    stroke(&spec.colors, edge.line)
                };
                body.push_str(&format!(
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                    x0, y, x1, y, color
                ));
            }
            for (vi, v) in g.vertices.iter().enumerate() {
                let x = xpos(vi as f64);
                let (ylo, yhi) = (ypos((v.level) as f64), ypos((v.level + 1) as f64));
                for (dx0, y0, dx1, y1) in [
                    (-0.2 * xstep, ylo, 0.2 * xstep, yhi),
                    (-0.2 * xstep, yhi, 0.2 * xstep, ylo),
                ] {
                    body.push_str(&format!(
                        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888888\" stroke-width=\"1.0\"/>\n",
                        x + dx0, y0, x + dx1, y1
                    ));
                }
            }
        }
    }

    if let Some(path) = &spec.overlay {
        let mut pts = Vec::new();
        for &f in &path.faces {
            let (open, close) = g.face_span(f);
            let x = match (open, close) {
                (-1, c) if c as usize >= g.vertices.len() => w / 2.0,
                (-1, c) => xpos(c as f64) - 0.8 * xstep,
                (o, c) if c as usize >= g.vertices.len() => xpos(o as f64) + 0.8 * xstep,
                (o, c) => (xpos(o as f64) + xpos(c as f64)) / 2.0,
            };
            let row = match spec.mode {
                RenderMode::Wiring => g.faces[f].level as f64 - 0.5,
                RenderMode::Tunnel => g.faces[f].level as f64 - 0.5,
            };
            let y = match g.faces[f].side {
                Side::Bottom => ypos(-0.4),
                Side::Top => ypos(g.n as f64 - 0.6),
                _ => ypos(row),
            };
            pts.push((x, y));
        }
        let joined: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", x, y))
            .collect();
        body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"2.5\" stroke-dasharray=\"4 2\" points=\"{}\"/>\n",
            joined.join(" ")
        ));
        for &(x, y) in &pts {
            body.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#ff7f0e\"/>\n",
                x, y
            ));
        }
    }

    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
        spec.width, spec.height, spec.width, spec.height, body
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wiring_svg_is_deterministic() {
        let d = WiringDiagram::new(4, vec![1, 3, 2, 1, 3, 2]).unwrap();
        let g = PlaneGraph::build(&d).unwrap();
        let spec = RenderSpec::default();
        let a = render(&d, &g, &spec).unwrap();
        let b = render(&d, &g, &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert_eq!(a.matches("<polyline").count(), 4);
    }

    #[test]
    fn tunnel_mode_draws_every_edge_horizontally() {
        let d = WiringDiagram::new(3, vec![1, 2, 1]).unwrap();
        let g = PlaneGraph::build(&d).unwrap();
        let spec = RenderSpec {
            mode: RenderMode::Tunnel,
            tunnel_width: Some(2),
            ..Default::default()
        };
        let svg = render(&d, &g, &spec).unwrap();
        // 9 horizontal edge segments plus 2 diagonals per vertex
        assert_eq!(svg.matches("<line").count(), 9 + 2 * 3);
        // wall edges tinted
        assert!(svg.contains("#f2a0a0"));
    }
}
