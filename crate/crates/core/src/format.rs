//! Text serialization for graphs, change traces and adapter traces.
//!
//! Graph file (UTF-8, LF, `#` comment lines ignored):
//! ```text
//! p <directed|undirected> <n> <m> <W>
//! e <u> <v> <w>            (m lines, 1-indexed nodes)
//! ```
//! Bipartite graphs use `p bipartite <|L|> <|R|> <m> <W>` with L nodes
//! `1..=|L|` and R nodes `|L|+1..=|L|+|R|`.
//!
//! Trace file:
//! ```text
//! t <c|unbounded>
//! c <u> <v> <+d|-d|=w>     (delta or absolute weight)
//! q <dist|flow|mwm|mst|conn>
//! ```
//! Absolute-weight changes are converted to deltas while parsing, so a
//! parsed trace always carries deltas; serialization emits delta form.
//!
//! Adapter traces (dynamic connectivity driven through the MST structure)
//! use `a <u> <v>`, `r <u> <v>` and `q conn` lines with no header.

use thiserror::Error;

use crate::graph::{
    ChangeTrace, GraphError, NodeId, QueryKind, TraceEvent, WeightChange, WeightedGraph,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: GraphError,
    },
}

impl ParseError {
    fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError::Malformed {
            line,
            msg: msg.into(),
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph, ParseError> {
    let mut lines = content_lines(text);
    let (pline, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, "missing problem line"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&"p") {
        return Err(ParseError::new(pline, "expected problem line `p ...`"));
    }
    let (directed, n, m, weight_bound, left_size) = match toks.get(1) {
        Some(&"directed") | Some(&"undirected") if toks.len() == 5 => {
            let n = parse_num(pline, toks[2], "node count")?;
            let m = parse_num(pline, toks[3], "edge count")?;
            let w = parse_num(pline, toks[4], "weight bound")?;
            (toks[1] == "directed", n, m, w, None)
        }
        Some(&"bipartite") if toks.len() == 6 => {
            let l: usize = parse_num(pline, toks[2], "left size")?;
            let r: usize = parse_num(pline, toks[3], "right size")?;
            let m = parse_num(pline, toks[4], "edge count")?;
            let w = parse_num(pline, toks[5], "weight bound")?;
            (false, l + r, m, w, Some(l))
        }
        _ => {
            return Err(ParseError::new(
                pline,
                "expected `p <directed|undirected> <n> <m> <W>` or `p bipartite <L> <R> <m> <W>`",
            ))
        }
    };

    let mut edge_list: Vec<(NodeId, NodeId, i64)> = Vec::with_capacity(m);
    let mut edge_lines: Vec<usize> = Vec::with_capacity(m);
    for (lno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "e" {
            return Err(ParseError::new(lno, "expected edge line `e <u> <v> <w>`"));
        }
        let u = parse_num(lno, toks[1], "node id")?;
        let v = parse_num(lno, toks[2], "node id")?;
        let w = parse_num(lno, toks[3], "weight")?;
        edge_list.push((u, v, w));
        edge_lines.push(lno);
    }
    if edge_list.len() != m {
        return Err(ParseError::new(
            pline,
            format!("header declares {m} edges, found {}", edge_list.len()),
        ));
    }

    // Rebuild edge by edge so invariant violations point at their line.
    let build = |edges: &[(NodeId, NodeId, i64)]| match left_size {
        Some(l) => WeightedGraph::new_bipartite(l, n - l, weight_bound, edges),
        None => WeightedGraph::new(directed, n, weight_bound, edges),
    };
    match build(&edge_list) {
        Ok(g) => Ok(g),
        Err(_) => {
            for k in 1..=edge_list.len() {
                if let Err(source) = build(&edge_list[..k]) {
                    return Err(ParseError::Invalid {
                        line: edge_lines[k - 1],
                        source,
                    });
                }
            }
            // Error must involve the header alone (e.g. bad bound).
            match build(&[]) {
                Err(source) => Err(ParseError::Invalid {
                    line: pline,
                    source,
                }),
                Ok(_) => unreachable!("graph build failed but no prefix fails"),
            }
        }
    }
}

pub fn serialize_graph(g: &WeightedGraph) -> String {
    let mut out = String::new();
    match g.left_size() {
        Some(l) => out.push_str(&format!(
            "p bipartite {} {} {} {}\n",
            l,
            g.node_count() - l,
            g.edge_count(),
            g.weight_bound()
        )),
        None => out.push_str(&format!(
            "p {} {} {} {}\n",
            if g.directed() { "directed" } else { "undirected" },
            g.node_count(),
            g.edge_count(),
            g.weight_bound()
        )),
    }
    for e in g.edges() {
        out.push_str(&format!("e {} {} {}\n", e.u, e.v, e.w));
    }
    out
}

/// Parses a trace against the graph it will be replayed on. The graph is
/// needed to resolve `=w` absolute forms into deltas and to validate that
/// the replay keeps weights in range.
pub fn parse_trace(text: &str, g: &WeightedGraph) -> Result<ChangeTrace, ParseError> {
    let mut lines = content_lines(text);
    let (tline, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, "missing trace header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "t" {
        return Err(ParseError::new(tline, "expected `t <c|unbounded>`"));
    }
    let change_bound = if toks[1] == "unbounded" {
        None
    } else {
        let c: i64 = parse_num(tline, toks[1], "change bound")?;
        if c < 0 {
            return Err(ParseError::new(tline, "change bound must be >= 0"));
        }
        Some(c)
    };

    let mut sim = g.clone();
    let mut events = Vec::new();
    for (lno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            Some(&"c") if toks.len() == 4 => {
                let u: NodeId = parse_num(lno, toks[1], "node id")?;
                let v: NodeId = parse_num(lno, toks[2], "node id")?;
                let spec = toks[3];
                let delta = if let Some(rest) = spec.strip_prefix('=') {
                    let target: i64 = parse_num(lno, rest, "absolute weight")?;
                    let id = sim
                        .edge_index(u, v)
                        .ok_or(ParseError::Invalid {
                            line: lno,
                            source: GraphError::UnknownEdge(u, v),
                        })?;
                    target - sim.weight(id)
                } else if spec.starts_with('+') || spec.starts_with('-') {
                    parse_num(lno, spec, "delta")?
                } else {
                    return Err(ParseError::new(lno, "change must be `+d`, `-d` or `=w`"));
                };
                if let Some(bound) = change_bound {
                    if delta.abs() > bound {
                        return Err(ParseError::new(
                            lno,
                            format!("delta {delta} exceeds declared bound {bound}"),
                        ));
                    }
                }
                let ch = WeightChange::new(u, v, delta);
                sim.apply_change(&ch)
                    .map_err(|source| ParseError::Invalid { line: lno, source })?;
                events.push(TraceEvent::Change(ch));
            }
            Some(&"q") if toks.len() == 2 => {
                let kind = QueryKind::parse(toks[1])
                    .ok_or_else(|| ParseError::new(lno, format!("unknown query `{}`", toks[1])))?;
                events.push(TraceEvent::Query(kind));
            }
            _ => return Err(ParseError::new(lno, "expected `c <u> <v> <spec>` or `q <kind>`")),
        }
    }
    Ok(ChangeTrace::new(change_bound, events))
}

pub fn serialize_trace(trace: &ChangeTrace) -> String {
    let mut out = String::new();
    match trace.change_bound {
        Some(c) => out.push_str(&format!("t {c}\n")),
        None => out.push_str("t unbounded\n"),
    }
    for ev in &trace.events {
        match ev {
            TraceEvent::Change(ch) => {
                out.push_str(&format!("c {} {} {:+}\n", ch.u, ch.v, ch.delta))
            }
            TraceEvent::Query(kind) => out.push_str(&format!("q {kind}\n")),
        }
    }
    out
}

/// One event of an unweighted edge add/remove stream, driven through the
/// connectivity adapter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdapterEvent {
    Add(NodeId, NodeId),
    Remove(NodeId, NodeId),
    QueryConn,
}

pub fn parse_adapter_trace(text: &str) -> Result<Vec<AdapterEvent>, ParseError> {
    let mut events = Vec::new();
    for (lno, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            Some(&"a") | Some(&"r") if toks.len() == 3 => {
                let u = parse_num(lno, toks[1], "node id")?;
                let v = parse_num(lno, toks[2], "node id")?;
                events.push(if toks[0] == "a" {
                    AdapterEvent::Add(u, v)
                } else {
                    AdapterEvent::Remove(u, v)
                });
            }
            Some(&"q") if toks.len() == 2 && toks[1] == "conn" => {
                events.push(AdapterEvent::QueryConn);
            }
            _ => {
                return Err(ParseError::new(
                    lno,
                    "expected `a <u> <v>`, `r <u> <v>` or `q conn`",
                ))
            }
        }
    }
    Ok(events)
}

pub fn serialize_adapter_trace(events: &[AdapterEvent]) -> String {
    let mut out = String::new();
    for ev in events {
        match ev {
            AdapterEvent::Add(u, v) => out.push_str(&format!("a {u} {v}\n")),
            AdapterEvent::Remove(u, v) => out.push_str(&format!("r {u} {v}\n")),
            AdapterEvent::QueryConn => out.push_str("q conn\n"),
        }
    }
    out
}
