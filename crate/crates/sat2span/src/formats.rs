//! Line-oriented ASCII file formats for every stage: family tables,
//! graph pairs, and channel assignment instances with handle roles.
//!
//! All values are decimal with arbitrary precision; `#` starts a comment
//! and blank lines are ignored.

use crate::channel::{CaInstance, ChannelError};
use crate::family::FamilyFunction;
use crate::matching::WeightedBipartiteGraph;
use num_bigint::BigUint;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: expected header {expected:?}")]
    MalformedHeader { line: usize, expected: &'static str },
    #[error("line {line}: could not parse integer {token:?}")]
    BadInteger { line: usize, token: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    WrongRowLength { line: usize, expected: usize, found: usize },
    #[error("expected {expected} rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("line {line}: unexpected content {content:?}")]
    UnexpectedLine { line: usize, content: String },
    #[error("line {line}: unknown handle role {role:?}")]
    UnknownRole { line: usize, role: String },
    #[error("line {line}: {source}")]
    Instance {
        line: usize,
        #[source]
        source: ChannelError,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Lines with comments stripped, keeping 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let without_comment = raw.split('#').next().unwrap_or("").trim();
        (!without_comment.is_empty()).then_some((i + 1, without_comment))
    })
}

fn parse_value(line: usize, token: &str) -> Result<BigUint, FormatError> {
    token.parse().map_err(|_| FormatError::BadInteger { line, token: token.to_string() })
}

fn parse_count(line: usize, token: &str) -> Result<usize, FormatError> {
    token.parse().map_err(|_| FormatError::BadInteger { line, token: token.to_string() })
}

fn parse_row(line: usize, text: &str, expected: usize) -> Result<Vec<BigUint>, FormatError> {
    let values: Vec<BigUint> = text
        .split_whitespace()
        .map(|token| parse_value(line, token))
        .collect::<Result<_, _>>()?;
    if values.len() != expected {
        return Err(FormatError::WrongRowLength { line, expected, found: values.len() });
    }
    Ok(values)
}

/// `family <rows> <columns>` followed by one line per row.
pub fn write_family(f: &FamilyFunction) -> String {
    let mut out = String::new();
    writeln!(out, "family {} {}", f.rows(), f.columns()).unwrap();
    for row in 1..=f.rows() {
        let line = (1..=f.columns()).map(|col| f.value(row, col).to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "{line}").unwrap();
    }
    out
}

pub fn read_family(text: &str) -> Result<FamilyFunction, FormatError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(FormatError::MalformedHeader { line: 1, expected: "family <rows> <columns>" })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "family" {
        return Err(FormatError::MalformedHeader { line, expected: "family <rows> <columns>" });
    }
    let rows = parse_count(line, fields[1])?;
    let columns = parse_count(line, fields[2])?;
    let mut values = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (line, text) = lines.next().ok_or(FormatError::MissingRows { expected: rows, found: values.len() })?;
        values.push(parse_row(line, text, columns)?);
    }
    if let Some((line, content)) = lines.next() {
        return Err(FormatError::UnexpectedLine { line, content: content.to_string() });
    }
    FamilyFunction::new(columns, values).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// `cmw <side1> <side2>` followed by the two weight matrices, separated by
/// a blank line.
pub fn write_cmw(g1: &WeightedBipartiteGraph, g2: &WeightedBipartiteGraph) -> String {
    let mut out = String::new();
    writeln!(out, "cmw {} {}", g1.side(), g2.side()).unwrap();
    for (index, graph) in [g1, g2].into_iter().enumerate() {
        if index == 1 {
            writeln!(out).unwrap();
        }
        for i in 0..graph.side() {
            let line =
                (0..graph.side()).map(|j| graph.weight(i, j).to_string()).collect::<Vec<_>>().join(" ");
            writeln!(out, "{line}").unwrap();
        }
    }
    out
}

pub fn read_cmw(text: &str) -> Result<(WeightedBipartiteGraph, WeightedBipartiteGraph), FormatError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(FormatError::MalformedHeader { line: 1, expected: "cmw <side1> <side2>" })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "cmw" {
        return Err(FormatError::MalformedHeader { line, expected: "cmw <side1> <side2>" });
    }
    let mut graphs = Vec::new();
    for field in &fields[1..] {
        let side = parse_count(line, field)?;
        let mut rows = Vec::with_capacity(side);
        for _ in 0..side {
            let (line, text) = lines.next().ok_or(FormatError::MissingRows { expected: side, found: rows.len() })?;
            rows.push(parse_row(line, text, side)?);
        }
        graphs.push(WeightedBipartiteGraph::new(rows).map_err(|e| FormatError::Invalid(e.to_string()))?);
    }
    if let Some((line, content)) = lines.next() {
        return Err(FormatError::UnexpectedLine { line, content: content.to_string() });
    }
    let g2 = graphs.pop().expect("two graphs parsed");
    let g1 = graphs.pop().expect("two graphs parsed");
    Ok((g1, g2))
}

/// Named anchor roles a channel assignment file may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HandleRole {
    VLeft,
    VRight,
    VMid,
    WLeft1,
    WRight1,
    WLeft2,
    WRight2,
}

impl HandleRole {
    pub const ALL: [HandleRole; 7] = [
        HandleRole::VLeft,
        HandleRole::VRight,
        HandleRole::VMid,
        HandleRole::WLeft1,
        HandleRole::WRight1,
        HandleRole::WLeft2,
        HandleRole::WRight2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            HandleRole::VLeft => "vL",
            HandleRole::VRight => "vR",
            HandleRole::VMid => "vM",
            HandleRole::WLeft1 => "wL1",
            HandleRole::WRight1 => "wR1",
            HandleRole::WLeft2 => "wL2",
            HandleRole::WRight2 => "wR2",
        }
    }

    pub fn parse(text: &str) -> Option<HandleRole> {
        HandleRole::ALL.into_iter().find(|role| role.as_str() == text)
    }
}

/// A channel assignment instance plus its named handles, as serialized.
#[derive(Debug, Clone, PartialEq)]
pub struct CaFile {
    pub instance: CaInstance,
    pub handles: BTreeMap<HandleRole, String>,
}

/// `ca <vertex-count> <span-bound>`, vertex lines in order, nonzero
/// distance lines, then handle lines.
pub fn write_ca(file: &CaFile) -> String {
    let mut out = String::new();
    writeln!(out, "ca {} {}", file.instance.vertex_count(), file.instance.span_bound()).unwrap();
    for vertex in file.instance.vertices() {
        writeln!(out, "v {vertex}").unwrap();
    }
    for (x, y, d) in file.instance.nonzero_distances() {
        writeln!(out, "d {x} {y} {d}").unwrap();
    }
    for (role, vertex) in &file.handles {
        writeln!(out, "handle {} {vertex}", role.as_str()).unwrap();
    }
    out
}

pub fn read_ca(text: &str) -> Result<CaFile, FormatError> {
    let mut lines = content_lines(text);
    let (line, header) =
        lines.next().ok_or(FormatError::MalformedHeader { line: 1, expected: "ca <vertices> <span>" })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "ca" {
        return Err(FormatError::MalformedHeader { line, expected: "ca <vertices> <span>" });
    }
    let count = parse_count(line, fields[1])?;
    let span = parse_value(line, fields[2])?;

    let mut vertices = Vec::new();
    let mut distances = Vec::new();
    let mut handles = BTreeMap::new();
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields.as_slice() {
            ["v", name] => vertices.push((line, name.to_string())),
            ["d", x, y, value] => {
                distances.push((line, x.to_string(), y.to_string(), parse_value(line, value)?))
            }
            ["handle", role, name] => {
                let role = HandleRole::parse(role)
                    .ok_or_else(|| FormatError::UnknownRole { line, role: role.to_string() })?;
                handles.insert(role, name.to_string());
            }
            _ => return Err(FormatError::UnexpectedLine { line, content: content.to_string() }),
        }
    }
    if vertices.len() != count {
        return Err(FormatError::MissingRows { expected: count, found: vertices.len() });
    }
    let mut instance = CaInstance::new(vertices.into_iter().map(|(_, name)| name).collect(), span)
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    for (line, x, y, value) in distances {
        instance.set_distance(&x, &y, value).map_err(|source| FormatError::Instance { line, source })?;
    }
    for name in handles.values() {
        if !instance.contains_vertex(name) {
            return Err(FormatError::Invalid(format!("handle names unknown vertex {name:?}")));
        }
    }
    Ok(CaFile { instance, handles })
}
