//! Text formats: edge lists, dense 0/1 CSV tables, bipartite edge lists,
//! partition CSVs, and output helpers.
//!
//! Vertex ids in input files are arbitrary integers. They are mapped to
//! `0..n` in increasing order and the original ids are kept for output.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph::{BipartiteTable, Graph, Partition};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> InputError {
    InputError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_pair(line: usize, l: &str) -> Result<(i64, i64), InputError> {
    let mut tokens = l.split_whitespace();
    let mut id = |what: &str| -> Result<i64, InputError> {
        let tok = tokens.next().ok_or_else(|| parse_err(line, format!("missing {what} vertex id")))?;
        tok.parse()
            .map_err(|_| parse_err(line, format!("invalid vertex id {tok:?}")))
    };
    let a = id("first")?;
    let b = id("second")?;
    if let Some(extra) = tokens.next() {
        return Err(parse_err(line, format!("unexpected token {extra:?}")));
    }
    Ok((a, b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeList {
    pub graph: Graph,
    /// `ids[i]` is the id vertex `i` had in the file.
    pub ids: Vec<i64>,
}

impl EdgeList {
    pub fn index_of(&self) -> HashMap<i64, usize> {
        self.ids.iter().enumerate().map(|(i, &id)| (id, i)).collect()
    }
}

/// One edge `u v` per line; `#` starts a comment line. Self-loops and
/// repeated edges (in either orientation) are errors.
pub fn parse_edge_list(text: &str) -> Result<EdgeList, InputError> {
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (line, l) in content_lines(text) {
        let (a, b) = parse_pair(line, l)?;
        if a == b {
            return Err(parse_err(line, format!("self-loop at vertex {a}")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(parse_err(line, format!("duplicate edge {a} {b}")));
        }
        pairs.push((a, b));
    }
    let ids: Vec<i64> = pairs
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<i64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let edges: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (index[a], index[b])).collect();
    let graph = Graph::from_edges(ids.len(), &edges).map_err(|e| InputError::Invalid(e.to_string()))?;
    Ok(EdgeList { graph, ids })
}

/// Dense table: one row per line, comma-separated `0`/`1` entries.
pub fn parse_table_csv(text: &str) -> Result<BipartiteTable, InputError> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (line, l) in content_lines(text) {
        let row = l
            .split(',')
            .map(|cell| match cell.trim() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(parse_err(line, format!("entry {other:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    line,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(InputError::Invalid("table is empty".into()));
    }
    BipartiteTable::from_rows(&rows).map_err(|e| InputError::Invalid(e.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteEdges {
    pub table: BipartiteTable,
    pub row_ids: Vec<i64>,
    pub col_ids: Vec<i64>,
}

/// `row_id col_id` per line. Row and column ids live in separate
/// namespaces.
pub fn parse_bipartite_edges(text: &str) -> Result<BipartiteEdges, InputError> {
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (line, l) in content_lines(text) {
        let (r, c) = parse_pair(line, l)?;
        if !seen.insert((r, c)) {
            return Err(parse_err(line, format!("duplicate entry {r} {c}")));
        }
        pairs.push((r, c));
    }
    let row_ids: Vec<i64> = pairs.iter().map(|p| p.0).collect::<BTreeSet<_>>().into_iter().collect();
    let col_ids: Vec<i64> = pairs.iter().map(|p| p.1).collect::<BTreeSet<_>>().into_iter().collect();
    if row_ids.is_empty() {
        return Err(InputError::Invalid("no entries".into()));
    }
    let ri: HashMap<i64, usize> = row_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let ci: HashMap<i64, usize> = col_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut table = BipartiteTable::zeros(row_ids.len(), col_ids.len());
    for (r, c) in pairs {
        table.set(ri[&r], ci[&c], true);
    }
    Ok(BipartiteEdges { table, row_ids, col_ids })
}

/// `vertex,cluster` lines with 1-based clusters, optionally under a header.
/// Every vertex of `ids` must appear exactly once and clusters must lie in
/// `1..=k`.
pub fn parse_partition_csv(text: &str, ids: &[i64], k: usize) -> Result<Partition, InputError> {
    let index: HashMap<i64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut labels: Vec<Option<usize>> = vec![None; ids.len()];
    for (n, (line, l)) in content_lines(text).enumerate() {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if n == 0 && fields.first().is_some_and(|f| f.parse::<i64>().is_err()) {
            continue;
        }
        let [v, c] = fields[..] else {
            return Err(parse_err(line, format!("expected 2 fields, found {}", fields.len())));
        };
        let v: i64 = v.parse().map_err(|_| parse_err(line, format!("invalid vertex id {v:?}")))?;
        let c: usize = c.parse().map_err(|_| parse_err(line, format!("invalid cluster {c:?}")))?;
        let &i = index
            .get(&v)
            .ok_or_else(|| parse_err(line, format!("vertex {v} is not in the graph")))?;
        if c == 0 || c > k {
            return Err(parse_err(line, format!("cluster {c} is outside 1..={k}")));
        }
        if labels[i].replace(c - 1).is_some() {
            return Err(parse_err(line, format!("vertex {v} listed twice")));
        }
    }
    if let Some(i) = labels.iter().position(Option::is_none) {
        return Err(InputError::Invalid(format!("vertex {} has no cluster", ids[i])));
    }
    Partition::new(labels.into_iter().map(Option::unwrap).collect(), k).map_err(|e| InputError::Invalid(e.to_string()))
}

/// Shortest round-trip decimal, with `inf`, `-inf` and `nan` sentinels.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

/// JSON number, or the sentinel string for non-finite values.
pub fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(fmt_f64(x)))
}

pub fn edge_list_text(g: &Graph, ids: &[i64]) -> String {
    let mut s = String::new();
    for (a, b) in g.edges() {
        writeln!(s, "{} {}", ids[a], ids[b]).unwrap();
    }
    s
}

pub fn partition_csv(p: &Partition, ids: &[i64]) -> String {
    let mut s = String::from("vertex,cluster\n");
    for (i, &l) in p.labels().iter().enumerate() {
        writeln!(s, "{},{}", ids[i], l + 1).unwrap();
    }
    s
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}
