//! Graph interchange: graph6 and the edge-list JSON format
//! `{"n": 3, "edges": [[0,1],[1,2]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Largest vertex count representable in graph6.
pub const GRAPH6_MAX_N: u64 = (1 << 36) - 1;

const GRAPH6_HEADER: &str = ">>graph6<<";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Graph6,
    EdgeListJson,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph6" | "g6" => Ok(Format::Graph6),
            "json" | "edge-list-json" => Ok(Format::EdgeListJson),
            other => Err(Error::Domain(format!("unknown graph format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeListJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
}

impl From<&Graph> for EdgeListJson {
    fn from(g: &Graph) -> Self {
        EdgeListJson {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<EdgeListJson> for Graph {
    type Error = Error;

    fn try_from(j: EdgeListJson) -> Result<Graph> {
        let edges: Vec<_> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(j.n, &edges)
    }
}

pub fn parse_graph(text: &str, format: Format) -> Result<Graph> {
    match format {
        Format::Graph6 => parse_graph6(text),
        Format::EdgeListJson => parse_json(text),
    }
}

pub fn serialize_graph(g: &Graph, format: Format) -> Result<String> {
    match format {
        Format::Graph6 => to_graph6(g),
        Format::EdgeListJson => Ok(to_json(g)),
    }
}

/// Best guess at the format of a file's contents.
pub fn sniff_format(text: &str) -> Format {
    if text.trim_start().starts_with('{') {
        Format::EdgeListJson
    } else {
        Format::Graph6
    }
}

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string(&EdgeListJson::from(g)).expect("edge list serializes")
}

pub fn parse_json(text: &str) -> Result<Graph> {
    let parsed: EdgeListJson = from_json_text(text)?;
    Graph::try_from(parsed)
}

/// Deserializes JSON, turning serde's line/column into a byte offset.
pub fn from_json_text<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        Error::parse(offset, e.to_string())
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

pub fn to_graph6(g: &Graph) -> Result<String> {
    let n = g.n() as u64;
    if n > GRAPH6_MAX_N {
        return Err(Error::Capacity(format!(
            "graph6 holds at most {GRAPH6_MAX_N} vertices, got {n}"
        )));
    }
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
    let mut chunk = 0u8;
    let mut filled = 0;
    for j in 1..g.n() {
        for i in 0..j {
            chunk = (chunk << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(chunk + 63);
                chunk = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((chunk << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}

pub fn parse_graph6(text: &str) -> Result<Graph> {
    let mut start = 0;
    let bytes = text.as_bytes();
    if text.starts_with(GRAPH6_HEADER) {
        start = GRAPH6_HEADER.len();
    }
    // trailing newline / whitespace is tolerated
    let end = start + text[start..].trim_end().len();
    let body = &bytes[start..end];
    let val = |i: usize| -> Result<u64> {
        match body.get(i) {
            Some(&b) if (63..=126).contains(&b) => Ok((b - 63) as u64),
            Some(&b) => Err(Error::parse(start + i, format!("byte 0x{b:02x} is not a graph6 character"))),
            None => Err(Error::parse(start + i, "unexpected end of graph6 data")),
        }
    };
    if body.is_empty() {
        return Err(Error::parse(start, "empty graph6 string"));
    }
    let (n, mut pos) = if body[0] != 126 {
        (val(0)?, 1)
    } else if body.get(1) != Some(&126) {
        let mut n = 0;
        for i in 1..4 {
            n = (n << 6) | val(i)?;
        }
        (n, 4)
    } else {
        let mut n = 0;
        for i in 2..8 {
            n = (n << 6) | val(i)?;
        }
        (n, 8)
    };
    let n = usize::try_from(n).map_err(|_| Error::Capacity(format!("{n} vertices do not fit in memory")))?;
    let bits = n.saturating_mul(n.saturating_sub(1)) / 2;
    let need = bits.div_ceil(6);
    if body.len() - pos != need {
        return Err(Error::parse(
            start + pos + need.min(body.len() - pos),
            format!("expected {need} adjacency bytes for n={n}, found {}", body.len() - pos),
        ));
    }
    let mut edges = Vec::new();
    let mut bit = 0;
    let mut cur = 0u64;
    for j in 1..n {
        for i in 0..j {
            if bit % 6 == 0 {
                cur = val(pos)?;
                pos += 1;
            }
            if (cur >> (5 - bit % 6)) & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, &edges)
}
