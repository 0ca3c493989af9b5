//! Graph file formats.
//!
//! The canonical form is compact JSON with keys in the order `n`, `edges`,
//! `boundary`, sorted edge pairs, and a trailing newline:
//!
//! ```text
//! {"n":3,"edges":[[0,1],[1,2]],"boundary":[0,2]}
//! ```
//!
//! The plain-text form is one header line `n <n>`, one `u v` line per edge,
//! and a final `boundary v1 v2 ...` line. Blank lines and `#` comments are
//! ignored when reading.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphWithBoundary, Vertex};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    n: usize,
    edges: Vec<[Vertex; 2]>,
    boundary: Vec<Vertex>,
}

pub fn to_json(g: &GraphWithBoundary) -> String {
    let doc = GraphJson {
        n: g.n(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
        boundary: g.boundary().to_vec(),
    };
    let mut s = serde_json::to_string(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<GraphWithBoundary> {
    let doc: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    GraphWithBoundary::new(doc.n, doc.edges.into_iter().map(|[u, v]| (u, v)), doc.boundary)
        .map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_text(g: &GraphWithBoundary) -> String {
    let mut s = format!("n {}\n", g.n());
    for &(u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s.push_str("boundary");
    for b in g.boundary() {
        s.push_str(&format!(" {b}"));
    }
    s.push('\n');
    s
}

pub fn from_text(text: &str) -> Result<GraphWithBoundary> {
    let parse = |tok: &str, line: usize| -> Result<usize> {
        tok.parse().map_err(|_| Error::Parse(format!("line {line}: expected integer, got {tok:?}")))
    };
    let mut n = None;
    let mut edges = Vec::new();
    let mut boundary = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if boundary.is_some() {
            return Err(Error::Parse(format!("line {}: content after boundary line", i + 1)));
        }
        match toks[0] {
            "n" if n.is_none() && toks.len() == 2 => n = Some(parse(toks[1], i + 1)?),
            "boundary" if n.is_some() => {
                boundary = Some(toks[1..].iter().map(|t| parse(t, i + 1)).collect::<Result<Vec<_>>>()?)
            }
            _ if n.is_some() && toks.len() == 2 => edges.push((parse(toks[0], i + 1)?, parse(toks[1], i + 1)?)),
            _ => return Err(Error::Parse(format!("line {}: unexpected {line:?}", i + 1))),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing `n` header".into()))?;
    let boundary = boundary.ok_or_else(|| Error::Parse("missing `boundary` line".into()))?;
    GraphWithBoundary::new(n, edges, boundary).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses either format, choosing JSON when the first non-blank character is `{`.
pub fn parse_graph(text: &str) -> Result<GraphWithBoundary> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_text(text)
    }
}

/// Shortest round-trip decimal for a double; at most 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_json_bytes() {
        let g = GraphWithBoundary::new(3, [(2, 1), (0, 1)], [2, 0]).unwrap();
        assert_eq!(to_json(&g), "{\"n\":3,\"edges\":[[0,1],[1,2]],\"boundary\":[0,2]}\n");
    }

    #[test]
    fn text_format() {
        let g = GraphWithBoundary::new(3, [(0, 1), (1, 2)], [0, 2]).unwrap();
        let t = to_text(&g);
        assert_eq!(t, "n 3\n0 1\n1 2\nboundary 0 2\n");
        assert_eq!(from_text(&t).unwrap(), g);
        assert_eq!(parse_graph("# comment\nn 2\n\n0 1\nboundary 0 1\n").unwrap().n(), 2);
    }

    #[test]
    fn malformed_inputs() {
        assert!(from_json("{\"n\":2,\"edges\":[[0,1]]}").is_err());
        assert!(from_json("{\"n\":2,\"edges\":[[0,0]],\"boundary\":[0]}").is_err());
        assert!(from_json("not json").is_err());
        assert!(from_text("0 1\nboundary 0").is_err());
        assert!(from_text("n 2\n0 1\n").is_err());
    }

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(3.0 / 7.0), "0.42857142857142855");
        assert_eq!(fmt_f64(0.0), "0.0");
        assert_eq!(fmt_f64(2.0), "2.0");
    }

    proptest! {
        #[test]
        fn json_and_text_round_trip(n in 2usize..12, raw in proptest::collection::vec((0usize..12, 0usize..12), 0..30), b in 0usize..12) {
            let mut edges: Vec<(usize, usize)> = raw.into_iter()
                .map(|(u, v)| (u % n, v % n)).filter(|(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v))).collect();
            edges.sort();
            edges.dedup();
            let g = GraphWithBoundary::new(n, edges, [b % n]).unwrap();
            let json = to_json(&g);
            prop_assert_eq!(to_json(&from_json(&json).unwrap()), json);
            let text = to_text(&g);
            prop_assert_eq!(to_text(&from_text(&text).unwrap()), text);
        }
    }
}
