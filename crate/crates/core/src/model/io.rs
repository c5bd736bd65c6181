//! Plain-text instance files.
//!
//! ```text
//! # comment
//! n k m [directed] [partite c]
//! color 0
//! 0 1 +
//! 1 2 -
//! color 1
//! ...
//! ```
//!
//! Each edge line lists `k` vertices and a sign. The sign refers to the order
//! in which the vertices are written, so `3 1 +` is the arc `3 -> 1`. With
//! `partite c` the vertices split into `c` contiguous classes of equal size.

use std::fmt::Write as _;

use super::graph::{DirectedKGraph, Edge, GraphSystem, Partition, Sign, Vertex};
use super::ModelError;

fn perr(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Parse { line, msg: msg.into() }
}

/// Parses an instance file.
pub fn parse_instance(text: &str) -> Result<GraphSystem, ModelError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| perr(0, "empty instance file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 3 {
        return Err(perr(hline, "header must be `n k m [directed] [partite c]`"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| perr(hline, format!("bad number '{s}'")));
    let (n, k, m) = (num(toks[0])?, num(toks[1])?, num(toks[2])?);
    let mut directed = false;
    let mut partition = None;
    let mut rest = toks[3..].iter();
    while let Some(&t) = rest.next() {
        match t {
            "directed" => directed = true,
            "partite" => {
                let c = rest.next().ok_or_else(|| perr(hline, "partite needs a class count"))?;
                partition = Some(Partition::contiguous(n, num(c)?)?);
            }
            other => return Err(perr(hline, format!("unknown header token '{other}'"))),
        }
    }
    if m == 0 {
        if n != 0 {
            return Err(perr(hline, "a system with vertices needs at least one color"));
        }
        if let Some((l, _)) = lines.next() {
            return Err(perr(l, "content after an empty system"));
        }
        if k < 2 {
            return Err(ModelError::BadUniformity(k));
        }
        return Ok(GraphSystem::empty(k));
    }

    let blank = || -> Result<DirectedKGraph, ModelError> {
        let g = DirectedKGraph::new(n, k, directed)?;
        match &partition {
            Some(p) => g.with_partition(p.clone()),
            None => Ok(g),
        }
    };
    let mut graphs: Vec<DirectedKGraph> = Vec::with_capacity(m);
    for (lno, line) in lines {
        if let Some(idx) = line.strip_prefix("color") {
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| perr(lno, format!("bad color header '{line}'")))?;
            if idx != graphs.len() {
                return Err(perr(lno, format!("expected color {}, found {idx}", graphs.len())));
            }
            if idx >= m {
                return Err(perr(lno, format!("color {idx} out of range (m = {m})")));
            }
            graphs.push(blank()?);
            continue;
        }
        let g = graphs
            .last_mut()
            .ok_or_else(|| perr(lno, "edge before the first `color` line"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != k + 1 {
            return Err(perr(lno, format!("edge line needs {k} vertices and a sign")));
        }
        let mut verts: Vec<Vertex> = Vec::with_capacity(k);
        for t in &toks[..k] {
            verts.push(t.parse().map_err(|_| perr(lno, format!("bad vertex '{t}'")))?);
        }
        let sign = match toks[k] {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            s => return Err(perr(lno, format!("bad sign '{s}'"))),
        };
        g.insert(Edge::oriented(&verts, sign))
            .map_err(|e| perr(lno, e.to_string()))?;
    }
    while graphs.len() < m {
        graphs.push(blank()?);
    }
    GraphSystem::new(graphs)
}

/// Writes an instance in the format read by [`parse_instance`]; vertices are
/// listed in increasing order.
pub fn write_instance(sys: &GraphSystem) -> String {
    let mut out = String::new();
    let _ = write!(out, "{} {} {}", sys.n(), sys.k(), sys.m());
    if sys.is_directed() {
        out.push_str(" directed");
    }
    if let Some(p) = sys.partition() {
        let _ = write!(out, " partite {}", p.num_classes());
    }
    out.push('\n');
    for (i, g) in sys.graphs().iter().enumerate() {
        let _ = writeln!(out, "color {i}");
        for e in g.edges() {
            for v in e.verts() {
                let _ = write!(out, "{v} ");
            }
            let _ = writeln!(out, "{}", e.sign());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# two colors\n4 2 2 directed\ncolor 0\n0 1 +\n3 1 +\ncolor 1\n2 3 -\n";
        let sys = parse_instance(text).unwrap();
        assert_eq!((sys.n(), sys.k(), sys.m()), (4, 2, 2));
        assert!(sys.has_edge(0, &Edge::arc(3, 1)));
        assert!(sys.has_edge(1, &Edge::arc(3, 2)));
        let again = parse_instance(&write_instance(&sys)).unwrap();
        assert_eq!(sys, again);
    }

    #[test]
    fn rejects_duplicates() {
        let text = "3 2 1\ncolor 0\n0 1 +\n1 0 +\n";
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 4, .. }));
    }

    #[test]
    fn partite_header() {
        let sys = parse_instance("4 2 1 partite 2\ncolor 0\n0 2 +\n").unwrap();
        assert_eq!(sys.partition().unwrap().num_classes(), 2);
        assert!(parse_instance("4 2 1 partite 2\ncolor 0\n0 1 +\n").is_err());
    }

    #[test]
    fn empty_system() {
        let sys = parse_instance("0 2 0\n").unwrap();
        assert_eq!((sys.n(), sys.m()), (0, 0));
        assert!(parse_instance("3 2 0\n").is_err());
    }

    #[test]
    fn missing_colors_are_empty() {
        let sys = parse_instance("3 2 3\ncolor 0\n0 1 +\n").unwrap();
        assert_eq!(sys.m(), 3);
        assert_eq!(sys.graph(2).num_edges(), 0);
    }
}
