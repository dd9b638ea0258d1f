//! Line-oriented instance files and the JSON report.
//!
//! ```text
//! n m
//! u v                  m endpoint lines
//! v k f1 .. fk         list lines; vertices not mentioned get F = ∅
//! decomposition        optional: the next two lines are the bipartite
//! i j ..               and H edge indices (either line may be empty)
//! orientation          optional: m lines "tail head" in edge order
//! ```
//!
//! `#` starts a comment. Blank lines are ignored except inside the
//! decomposition section.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::driver::{Certificate, Guarantee, SolveReport, Stats, Status};
use crate::graph::{GraphError, MultiGraph, Orientation, Vertex};
use crate::lists::{ForbiddenLists, ListError};
use crate::reductions::Decomposition;

pub const REPORT_SCHEMA: &str = "favoid-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unexpected end of input: {0}")]
    Eof(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lists(#[from] ListError),
    #[error("decomposition: {0}")]
    Decomposition(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub graph: MultiGraph,
    pub lists: ForbiddenLists,
    pub decomposition: Option<Decomposition>,
    pub orientation: Option<Orientation>,
}

impl InstanceFile {
    pub fn new(graph: MultiGraph, lists: ForbiddenLists) -> Self {
        InstanceFile {
            graph,
            lists,
            decomposition: None,
            orientation: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn number(&self) -> Result<usize, ParseError> {
        self.text.parse().map_err(|_| ParseError::Syntax {
            line: self.line,
            column: self.column,
            message: format!("expected a non-negative integer, found `{}`", self.text),
        })
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    comment_only: bool,
}

fn lines(input: &str) -> Vec<Line<'_>> {
    input
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let body = raw.split('#').next().unwrap();
            let mut tokens = Vec::new();
            let mut start = None;
            for (pos, ch) in body.char_indices().chain([(body.len(), ' ')]) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(pos),
                    (true, Some(s)) => {
                        tokens.push(Token {
                            text: &body[s..pos],
                            line: i + 1,
                            column: body[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            Line {
                number: i + 1,
                tokens,
                comment_only: raw.trim_start().starts_with('#'),
            }
        })
        .collect()
}

fn numbers(line: &Line) -> Result<Vec<usize>, ParseError> {
    line.tokens.iter().map(Token::number).collect()
}

fn expect_count(line: &Line, count: usize, what: &str) -> Result<Vec<usize>, ParseError> {
    if line.tokens.len() != count {
        let at = line.tokens.get(count).or(line.tokens.last());
        return Err(match at {
            Some(t) => t.error(format!(
                "{what}: expected {count} fields, found {}",
                line.tokens.len()
            )),
            None => ParseError::Syntax {
                line: line.number,
                column: 1,
                message: format!("{what}: expected {count} fields"),
            },
        });
    }
    numbers(line)
}

fn next_content<'a, 'b>(it: &mut std::slice::Iter<'b, Line<'a>>) -> Option<&'b Line<'a>> {
    it.find(|l| !l.tokens.is_empty())
}

pub fn parse_instance(input: &str) -> Result<InstanceFile, ParseError> {
    let all = lines(input);
    let mut it = all.iter();

    let header =
        next_content(&mut it).ok_or_else(|| ParseError::Eof("missing `n m` header".into()))?;
    let nm = expect_count(header, 2, "header")?;
    let (n, m) = (nm[0], nm[1]);
    let mut pairs = Vec::with_capacity(m);
    for k in 0..m {
        let l = next_content(&mut it)
            .ok_or_else(|| ParseError::Eof(format!("expected {m} edge lines, found {k}")))?;
        let uv = expect_count(l, 2, "edge")?;
        if uv[0] >= n || uv[1] >= n {
            let bad = if uv[0] >= n { 0 } else { 1 };
            return Err(l.tokens[bad].error(format!("vertex {} out of range 0..{n}", uv[bad])));
        }
        if uv[0] == uv[1] {
            return Err(l.tokens[1].error(format!("loop at vertex {}", uv[0])));
        }
        pairs.push((uv[0], uv[1]));
    }
    let graph = MultiGraph::build(n, &pairs)?;

    let mut sets = vec![BTreeSet::new(); n];
    let mut seen = vec![false; n];
    let mut decomposition = None;
    let mut orientation = None;
    while let Some(l) = next_content(&mut it) {
        match l.tokens[0].text {
            "lists" if l.tokens.len() == 1 => {}
            "decomposition" if l.tokens.len() == 1 => {
                if decomposition.is_some() {
                    return Err(l.tokens[0].error("second decomposition section"));
                }
                let mut parts = Vec::new();
                for _ in 0..2 {
                    // blank lines are empty sets here; comment lines are skipped
                    let line = it
                        .find(|l| !l.comment_only)
                        .ok_or_else(|| ParseError::Eof("decomposition needs two lines".into()))?;
                    parts.push(numbers(line)?);
                }
                let h = parts.pop().unwrap();
                let bipartite = parts.pop().unwrap();
                let dec = Decomposition { bipartite, h };
                check_partition(&dec, m)?;
                decomposition = Some(dec);
            }
            "orientation" if l.tokens.len() == 1 => {
                if orientation.is_some() {
                    return Err(l.tokens[0].error("second orientation section"));
                }
                let mut arcs = Vec::with_capacity(m);
                for k in 0..m {
                    let line = next_content(&mut it).ok_or_else(|| {
                        ParseError::Eof(format!("orientation has {k} lines, expected {m}"))
                    })?;
                    if line.tokens[0].text.parse::<usize>().is_err() {
                        return Err(line.tokens[0]
                            .error(format!("orientation has {k} lines, expected {m}")));
                    }
                    let th = expect_count(line, 2, "arc")?;
                    arcs.push((th[0], th[1]));
                }
                orientation = Some(Orientation::from_arcs(&graph, &arcs)?);
            }
            _ => {
                if orientation.is_some() {
                    return Err(l.tokens[0].error("orientation has more than m lines"));
                }
                let nums = numbers(l)?;
                let (v, k) = match nums[..] {
                    [v, k, ..] => (v, k),
                    _ => return Err(l.tokens[0].error("list line needs `v k f1 .. fk`")),
                };
                if nums.len() != k + 2 {
                    return Err(l.tokens[1].error(format!(
                        "list announces {k} values, found {}",
                        nums.len() - 2
                    )));
                }
                if v >= n {
                    return Err(l.tokens[0].error(format!("vertex {v} out of range 0..{n}")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(l.tokens[0].error(format!("second list for vertex {v}")));
                }
                sets[v] = nums[2..].iter().copied().collect();
                if sets[v].len() != k {
                    return Err(l.tokens[1].error("repeated value in list"));
                }
            }
        }
    }
    let lists = ForbiddenLists::new(&graph, sets)?;
    Ok(InstanceFile {
        graph,
        lists,
        decomposition,
        orientation,
    })
}

fn check_partition(dec: &Decomposition, m: usize) -> Result<(), ParseError> {
    let mut count = vec![0usize; m];
    for &e in dec.bipartite.iter().chain(&dec.h) {
        if e >= m {
            return Err(ParseError::Decomposition(format!(
                "edge {e} out of range 0..{m}"
            )));
        }
        count[e] += 1;
    }
    match count.iter().position(|&c| c != 1) {
        Some(e) => Err(ParseError::Decomposition(format!(
            "edge {e} appears {} times; the two sets must partition the edges",
            count[e]
        ))),
        None => Ok(()),
    }
}

/// A standalone decomposition file: two lines of edge indices.
pub fn parse_decomposition(input: &str, m: usize) -> Result<Decomposition, ParseError> {
    let all = lines(input);
    let content: Vec<&Line> = all.iter().filter(|l| !l.comment_only).collect();
    if content.len() < 2 {
        return Err(ParseError::Eof("decomposition needs two lines".into()));
    }
    if let Some(extra) = content[2..].iter().find(|l| !l.tokens.is_empty()) {
        return Err(extra.tokens[0].error("decomposition has more than two lines"));
    }
    let dec = Decomposition {
        bipartite: numbers(content[0])?,
        h: numbers(content[1])?,
    };
    check_partition(&dec, m)?;
    Ok(dec)
}

fn join(xs: impl IntoIterator<Item = usize>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn emit_decomposition(dec: &Decomposition) -> String {
    format!(
        "{}\n{}\n",
        join(dec.bipartite.iter().copied()),
        join(dec.h.iter().copied())
    )
}

pub fn emit_orientation(g: &MultiGraph, d: &Orientation) -> String {
    d.arcs(g)
        .iter()
        .map(|(t, h)| format!("{t} {h}\n"))
        .collect()
}

/// Canonical text: nonempty lists only, in vertex order.
pub fn emit_instance(file: &InstanceFile) -> String {
    let g = &file.graph;
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    for (v, set) in file.lists.sets().iter().enumerate() {
        if !set.is_empty() {
            let _ = writeln!(out, "{v} {} {}", set.len(), join(set.iter().copied()));
        }
    }
    if let Some(dec) = &file.decomposition {
        out.push_str("decomposition\n");
        out.push_str(&emit_decomposition(dec));
    }
    if let Some(d) = &file.orientation {
        out.push_str("orientation\n");
        out.push_str(&emit_orientation(g, d));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson<'a> {
    pub schema: &'static str,
    pub status: Status,
    pub guarantee: Option<Guarantee>,
    pub methods: &'a [String],
    pub orientation: Option<Vec<(Vertex, Vertex)>>,
    pub out_degrees: Option<&'a [usize]>,
    pub certificate: Option<&'a Certificate>,
    pub stats: &'a Stats,
}

pub fn report_json(g: &MultiGraph, report: &SolveReport) -> String {
    let doc = ReportJson {
        schema: REPORT_SCHEMA,
        status: report.status,
        guarantee: report.guarantee,
        methods: &report.methods,
        orientation: report.orientation.as_ref().map(|d| d.arcs(g)),
        out_degrees: report.orientation.as_ref().map(|d| d.out_degrees()),
        certificate: report.certificate.as_ref(),
        stats: &report.stats,
    };
    serde_json::to_string_pretty(&doc).expect("report serializes")
}
