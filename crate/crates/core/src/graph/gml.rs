// SPDX-License-Identifier: Apache-2.0

//! GML subset for circuit graphs.
//!
//! Export writes exactly this shape, two-space indented, one key per line:
//!
//! ```text
//! graph [
//!   directed 1
//!   node [
//!     id 0
//!     label "din"
//!     kind "port"
//!   ]
//!   edge [
//!     source 0
//!     target 2
//!   ]
//! ]
//! ```
//!
//! Import accepts any whitespace layout, `#` line comments, integer/real/
//! string values and nested lists. Only `id`, `label`, `kind`, `source` and
//! `target` are interpreted; other keys are skipped. Node ids must be
//! unique and dense `0..N`. In strings `"` and `&` are written as `&quot;`
//! and `&amp;`.

use std::collections::HashSet;
use std::fmt::Write;

use super::{CircuitGraph, GraphError, Node, NodeKind};

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;")
}

fn unescape(s: &str) -> String {
    s.replace("&quot;", "\"").replace("&amp;", "&")
}

pub fn export_gml(g: &CircuitGraph) -> String {
    let mut out = String::from("graph [\n  directed 1\n");
    for (i, n) in g.nodes.iter().enumerate() {
        let _ = write!(
            out,
            "  node [\n    id {i}\n    label \"{}\"\n    kind \"{}\"\n  ]\n",
            escape(&n.name),
            n.kind
        );
    }
    for &(s, t) in &g.edges {
        let _ = write!(out, "  edge [\n    source {s}\n    target {t}\n  ]\n");
    }
    out.push_str("]\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<(String, Value, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Key(String),
    Int(i64),
    Real(f64),
    Str(String),
    Open,
    Close,
}

fn err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Gml {
        line,
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, GraphError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut line = 1;
    while let Some(&(start, c)) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                    chars.next();
                }
            }
            '[' => {
                toks.push((Tok::Open, line));
                chars.next();
            }
            ']' => {
                toks.push((Tok::Close, line));
                chars.next();
            }
            '"' => {
                let open_line = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, ch)) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                        None => return Err(err(open_line, "unterminated string")),
                    }
                }
                toks.push((Tok::Str(unescape(&s)), open_line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = start;
                while let Some(&(i, ch)) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        end = i + ch.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Key(text[start..end].to_string()), line));
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let mut end = start;
                while let Some(&(i, ch)) = chars.peek() {
                    if ch.is_ascii_digit() || matches!(ch, '-' | '+' | '.' | 'e' | 'E') {
                        end = i + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                let lit = &text[start..end];
                let tok = if let Ok(i) = lit.parse::<i64>() {
                    Tok::Int(i)
                } else if let Ok(r) = lit.parse::<f64>() {
                    Tok::Real(r)
                } else {
                    return Err(err(line, format!("bad number `{lit}`")));
                };
                toks.push((tok, line));
            }
            other => return Err(err(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

/// Parses `key value` pairs until `]` (nested) or end of input (top level).
fn parse_list(
    toks: &[(Tok, usize)],
    at: &mut usize,
    nested: bool,
) -> Result<Vec<(String, Value, usize)>, GraphError> {
    let mut items = Vec::new();
    loop {
        let Some((tok, line)) = toks.get(*at) else {
            if nested {
                let last = toks.last().map_or(1, |t| t.1);
                return Err(err(last, "missing `]`"));
            }
            return Ok(items);
        };
        *at += 1;
        let key = match tok {
            Tok::Close if nested => return Ok(items),
            Tok::Key(k) => k.clone(),
            other => return Err(err(*line, format!("expected key, found {other:?}"))),
        };
        let Some((vtok, vline)) = toks.get(*at) else {
            return Err(err(*line, format!("key `{key}` has no value")));
        };
        *at += 1;
        let value = match vtok {
            Tok::Int(i) => Value::Int(*i),
            Tok::Real(r) => Value::Real(*r),
            Tok::Str(s) => Value::Str(s.clone()),
            Tok::Open => Value::List(parse_list(toks, at, true)?),
            other => return Err(err(*vline, format!("bad value for `{key}`: {other:?}"))),
        };
        items.push((key, value, *line));
    }
}

fn int_field(items: &[(String, Value, usize)], key: &str, line: usize) -> Result<Option<i64>, GraphError> {
    match items.iter().find(|(k, _, _)| k == key) {
        None => Ok(None),
        Some((_, Value::Int(i), _)) => Ok(Some(*i)),
        Some((_, _, l)) => Err(err(*l, format!("`{key}` must be an integer (block at line {line})"))),
    }
}

fn str_field<'a>(items: &'a [(String, Value, usize)], key: &str) -> Result<Option<&'a str>, GraphError> {
    match items.iter().find(|(k, _, _)| k == key) {
        None => Ok(None),
        Some((_, Value::Str(s), _)) => Ok(Some(s)),
        Some((_, _, l)) => Err(err(*l, format!("`{key}` must be a string"))),
    }
}

pub fn import_gml(text: &str) -> Result<CircuitGraph, GraphError> {
    let toks = tokenize(text)?;
    let mut at = 0;
    let top = parse_list(&toks, &mut at, false)?;
    let body = match top.iter().find(|(k, _, _)| k == "graph") {
        Some((_, Value::List(items), _)) => items,
        Some((_, _, l)) => return Err(err(*l, "`graph` must be a list")),
        None => return Err(err(1, "no `graph [ ... ]` block")),
    };

    let mut nodes: Vec<(i64, Node)> = Vec::new();
    let mut raw_edges: Vec<(i64, i64)> = Vec::new();
    let mut ids = HashSet::new();
    for (key, value, line) in body {
        match (key.as_str(), value) {
            ("node", Value::List(items)) => {
                let id = int_field(items, "id", *line)?
                    .ok_or_else(|| err(*line, "node without `id`"))?;
                if !ids.insert(id) {
                    return Err(GraphError::DuplicateNodeId(id));
                }
                let name = str_field(items, "label")?.unwrap_or("").to_string();
                let kind = match str_field(items, "kind")? {
                    None => NodeKind::Gate,
                    Some(k) => k.parse().map_err(|_| err(*line, format!("unknown node kind `{k}`")))?,
                };
                nodes.push((id, Node { name, kind }));
            }
            ("edge", Value::List(items)) => {
                let s = int_field(items, "source", *line)?
                    .ok_or_else(|| err(*line, "edge without `source`"))?;
                let t = int_field(items, "target", *line)?
                    .ok_or_else(|| err(*line, "edge without `target`"))?;
                raw_edges.push((s, t));
            }
            ("node" | "edge", _) => return Err(err(*line, format!("`{key}` must be a list"))),
            _ => {}
        }
    }

    nodes.sort_by_key(|(id, _)| *id);
    let count = nodes.len();
    for (expected, (id, _)) in nodes.iter().enumerate() {
        if *id != expected as i64 {
            for &(s, t) in &raw_edges {
                for end in [s, t] {
                    if !ids.contains(&end) {
                        return Err(GraphError::UnknownNodeId(end));
                    }
                }
            }
            return Err(GraphError::NonDenseIds {
                count,
                missing: expected,
            });
        }
    }

    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (s, t) in raw_edges {
        for end in [s, t] {
            if end < 0 || end as usize >= count {
                return Err(GraphError::UnknownNodeId(end));
            }
        }
        let (s, t) = (s as usize, t as usize);
        if s == t {
            return Err(GraphError::SelfEdge(s));
        }
        if seen.insert((s, t)) {
            edges.push((s, t));
        }
    }
    Ok(CircuitGraph {
        nodes: nodes.into_iter().map(|(_, n)| n).collect(),
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::build_graph;
    use crate::netlist::verilog;
    use proptest::prelude::*;

    fn squash(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn empty_graph() {
        let text = export_gml(&CircuitGraph::default());
        assert_eq!(squash(&text), "graph [ directed 1 ]");
        assert_eq!(import_gml(&text).unwrap(), CircuitGraph::default());
    }

    #[test]
    fn single_node() {
        let g = CircuitGraph {
            nodes: vec![Node {
                name: "a".into(),
                kind: NodeKind::Port,
            }],
            edges: vec![],
        };
        let text = squash(&export_gml(&g));
        assert_eq!(text.matches("node [").count(), 1);
        assert!(text.contains(r#"node [ id 0 label "a" kind "port" ]"#));
    }

    #[test]
    fn fixtures_round_trip_bytes() {
        for src in [fixtures::SR4, fixtures::LFSR_CMP] {
            let g = build_graph(&verilog::parse(src).unwrap());
            let text = export_gml(&g);
            let back = import_gml(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(export_gml(&back), text);
        }
    }

    #[test]
    fn import_errors() {
        assert_eq!(
            import_gml("graph [ node [ id 0 ] node [ id 0 ] ]"),
            Err(GraphError::DuplicateNodeId(0))
        );
        assert_eq!(
            import_gml("graph [ node [ id 0 ] edge [ source 0 target 99 ] ]"),
            Err(GraphError::UnknownNodeId(99))
        );
        assert!(matches!(import_gml("graph [ node [ id 0 ]"), Err(GraphError::Gml { .. })));
        assert!(matches!(import_gml("graph [ node [ label \"x\" ] ]"), Err(GraphError::Gml { .. })));
        assert!(matches!(
            import_gml("graph [ node [ id 1 ] ]"),
            Err(GraphError::NonDenseIds { count: 1, missing: 0 })
        ));
        assert!(matches!(import_gml("graph [ node [ id 0 kind \"wire\" ] ]"), Err(GraphError::Gml { .. })));
    }

    #[test]
    fn import_ignores_extra_attributes() {
        let text = "# from another tool\nCreator \"x\"\ngraph [\n directed 1 comment \"hi\"\n node [ id 1 label \"b\" graphics [ x 1.5 y -2 ] ]\n node [ id 0 label \"a\" kind \"flipflop\" ]\n edge [ source 0 target 1 weight 0.3 ]\n]";
        let g = import_gml(text).unwrap();
        assert_eq!(g.nodes[0].name, "a");
        assert_eq!(g.nodes[0].kind, NodeKind::FlipFlop);
        assert_eq!(g.nodes[1].kind, NodeKind::Gate);
        assert_eq!(g.edges, vec![(0, 1)]);
    }

    proptest! {
        #[test]
        fn random_graphs_round_trip(
            names in proptest::collection::vec("[a-z\"&_][a-z0-9 \"&]{0,6}", 1..10),
            raw in proptest::collection::vec((0usize..10, 0usize..10), 0..20),
        ) {
            let n = names.len();
            let nodes: Vec<Node> = names.into_iter().enumerate().map(|(i, name)| Node {
                name,
                kind: [NodeKind::Port, NodeKind::Gate, NodeKind::FlipFlop][i % 3],
            }).collect();
            let mut seen = HashSet::new();
            let edges: Vec<_> = raw.into_iter()
                .map(|(a, b)| (a % n, b % n))
                .filter(|&(a, b)| a != b && seen.insert((a, b)))
                .collect();
            let g = CircuitGraph { nodes, edges };
            let text = export_gml(&g);
            let back = import_gml(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(export_gml(&back), text);
        }
    }
}
