//! Dual paths: ordered face sequences with an edge certificate for each
//! consecutive pair, plus a structural verifier.

use crate::error::{Error, Result};
use crate::plane::{EdgeId, FaceId, PlaneGraph};
use crate::wiring::LineColor;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DualPath {
    pub faces: Vec<FaceId>,
    /// `edges[i]` separates `faces[i]` and `faces[i+1]`.
    pub edges: Vec<EdgeId>,
}

impl DualPath {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn reversed(&self) -> DualPath {
        DualPath {
            faces: self.faces.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().copied().collect(),
        }
    }

    pub fn first(&self) -> Option<FaceId> {
        self.faces.first().copied()
    }

    pub fn last(&self) -> Option<FaceId> {
        self.faces.last().copied()
    }

    /// Text format: `path <len>` header, one face id per line, then an
    /// optional `edges:` section with the certificate edge ids.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty path file".into()))?;
        let len: usize = header
            .strip_prefix("path")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}, expected `path <len>`")))?;
        let mut faces = Vec::with_capacity(len);
        let mut edges = Vec::new();
        let mut in_edges = false;
        for line in lines {
            if line == "edges:" {
                in_edges = true;
                continue;
            }
            let id: usize = line
                .parse()
                .map_err(|_| Error::Parse(format!("bad id {line:?}")))?;
            if in_edges {
                edges.push(id);
            } else {
                faces.push(id);
            }
        }
        if faces.len() != len {
            return Err(Error::Parse(format!(
                "header says {len} faces, found {}",
                faces.len()
            )));
        }
        if !edges.is_empty() && edges.len() + 1 != faces.len() {
            return Err(Error::Parse(format!(
                "{} certificate edges for {} faces",
                edges.len(),
                faces.len()
            )));
        }
        Ok(DualPath { faces, edges })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("path {}\n", self.faces.len());
        for f in &self.faces {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        if !self.edges.is_empty() {
            out.push_str("edges:\n");
            for e in &self.edges {
                out.push_str(&e.to_string());
                out.push('\n');
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownFace { index: usize, face: FaceId },
    RepeatedFace { index: usize, face: FaceId },
    MissingCertificates,
    BadCertificate { index: usize, edge: EdgeId },
    AlternationBroken { index: usize, color: LineColor },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownFace { index, face } => {
                write!(f, "face {face} at position {index} does not exist")
            }
            Violation::RepeatedFace { index, face } => {
                write!(f, "face {face} repeats at position {index}")
            }
            Violation::MissingCertificates => write!(f, "certificate edges missing"),
            Violation::BadCertificate { index, edge } => write!(
                f,
                "edge {edge} does not separate faces {index} and {}",
                index + 1
            ),
            Violation::AlternationBroken { index, color } => write!(
                f,
                "consecutive certificate edges {index},{} both {:?}",
                index + 1,
                color
            ),
        }
    }
}

/// Checks face validity, certificates, repeats, and (with a coloring)
/// alternation. Returns all violations instead of aborting on the first.
pub fn verify_path(
    g: &PlaneGraph,
    p: &DualPath,
    coloring: Option<&[LineColor]>,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, &f) in p.faces.iter().enumerate() {
        if f >= g.faces.len() {
            violations.push(Violation::UnknownFace { index: i, face: f });
        } else if !seen.insert(f) {
            violations.push(Violation::RepeatedFace { index: i, face: f });
        }
    }
    if p.faces.len() > 1 && p.edges.len() + 1 != p.faces.len() {
        violations.push(Violation::MissingCertificates);
        return violations;
    }
    for (i, &e) in p.edges.iter().enumerate() {
        let ok = e < g.edges.len() && {
            let (a, b) = g.edges[e].faces();
            (a == p.faces[i] && b == p.faces[i + 1]) || (b == p.faces[i] && a == p.faces[i + 1])
        };
        if !ok {
            violations.push(Violation::BadCertificate { index: i, edge: e });
        }
    }
    if let Some(colors) = coloring {
        for (i, pair) in p.edges.windows(2).enumerate() {
            let c0 = colors[g.edges[pair[0]].line];
            let c1 = colors[g.edges[pair[1]].line];
            if c0 == c1 {
                violations.push(Violation::AlternationBroken { index: i, color: c0 });
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiring::WiringDiagram;

    fn two_line_graph() -> PlaneGraph {
        PlaneGraph::build(&WiringDiagram::new(2, vec![1]).unwrap()).unwrap()
    }

    #[test]
    fn detects_repeats_and_bad_certificates() {
        let g = two_line_graph();
        let (below, above) = g.edges[0].faces();
        let good = DualPath {
            faces: vec![below, above],
            edges: vec![0],
        };
        assert!(verify_path(&g, &good, None).is_empty());

        let repeat = DualPath {
            faces: vec![below, above, below],
            edges: vec![0, 0],
        };
        let violations = verify_path(&g, &repeat, None);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::RepeatedFace { .. })));

        let bad_cert = DualPath {
            faces: vec![below, above],
            edges: vec![3],
        };
        let violations = verify_path(&g, &bad_cert, None);
        assert!(!violations.is_empty());
    }

    #[test]
    fn detects_alternation_violations() {
        let g = two_line_graph();
        // Walk around the dual 4-cycle; with both lines red every pair of
        // consecutive certificates breaks alternation.
        let f0 = g.bottom_face();
        let (n1, e1) = (g.edges[0].other_face(f0), 0);
        let path3 = {
            let next = DualGraphWalk { g: &g };
            next.extend(f0, n1, e1)
        };
        let colors = vec![LineColor::Red, LineColor::Red];
        let violations = verify_path(&g, &path3, Some(&colors));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::AlternationBroken { .. })));
    }

    struct DualGraphWalk<'a> {
        g: &'a PlaneGraph,
    }

    impl DualGraphWalk<'_> {
        fn extend(&self, f0: usize, f1: usize, e1: usize) -> DualPath {
            // Append one more step from f1 to any new face.
            for (e, edge) in self.g.edges.iter().enumerate() {
                let (a, b) = edge.faces();
                let next = if a == f1 && b != f0 {
                    Some(b)
                } else if b == f1 && a != f0 {
                    Some(a)
                } else {
                    None
                };
                if let Some(nf) = next {
                    return DualPath {
                        faces: vec![f0, f1, nf],
                        edges: vec![e1, e],
                    };
                }
            }
            unreachable!()
        }
    }

    #[test]
    fn text_round_trip() {
        let p = DualPath {
            faces: vec![3, 1, 4],
            edges: vec![7, 2],
        };
        assert_eq!(DualPath::parse(&p.to_text()).unwrap(), p);
    }
}
