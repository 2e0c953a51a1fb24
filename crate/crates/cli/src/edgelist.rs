//! Plain-text edge lists.
//!
//! One edge `u v` per line, ids are non-negative integers separated by ASCII
//! whitespace. Lines starting with `#` are comments, except that the first
//! line may be a `# n=<count>` header fixing the node count. Without a
//! header the node count is one more than the largest id seen. LF and CRLF
//! line endings are both accepted.

use std::io::{self, BufRead, Write};

use backpush::{Graph, GraphError, NodeId};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: node {node} is out of range for the declared {n} nodes")]
    Bounds { line: usize, node: NodeId, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_header(line: &str) -> Option<&str> {
    let rest = line.strip_prefix('#')?.trim_start();
    rest.strip_prefix("n=").or_else(|| rest.strip_prefix("n =")).map(str::trim)
}

fn parse_id(tok: &str, line: usize) -> Result<NodeId, LoadError> {
    tok.parse::<NodeId>().map_err(|_| LoadError::Parse { line, msg: format!("`{tok}` is not a node id") })
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph, LoadError> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<NodeId> = None;
    for (idx, raw) in reader.lines().enumerate() {
        let raw = raw?;
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if idx == 0 {
                if let Some(count) = parse_header(line) {
                    let n = count.parse::<usize>().map_err(|_| LoadError::Parse {
                        line: line_no,
                        msg: format!("bad node count `{count}` in header"),
                    })?;
                    declared = Some(n);
                }
            }
            continue;
        }
        let mut toks = line.split_ascii_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(LoadError::Parse { line: line_no, msg: "expected two node ids".into() });
        };
        let (u, v) = (parse_id(a, line_no)?, parse_id(b, line_no)?);
        if let Some(n) = declared {
            if let Some(&bad) = [u, v].iter().find(|&&x| x >= n) {
                return Err(LoadError::Bounds { line: line_no, node: bad, n });
            }
        }
        max_id = max_id.max(Some(u.max(v)));
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    Ok(Graph::from_edges(n, &edges)?)
}

pub fn parse_edge_list(text: &str) -> Result<Graph, LoadError> {
    read_edge_list(text.as_bytes())
}

/// Writes `g` with a `# n=` header, edges grouped by source.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "# n={}", g.num_nodes())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()
}
