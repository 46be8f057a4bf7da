//! One graph per line: `{"n": 4, "edges": [[0, 1], [1, 2]]}`, 0-indexed, with
//! `u < v` for every edge on disk.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    n: usize,
    edges: Vec<[usize; 2]>,
}

pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<Vec<Graph>> {
    let mut graphs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |detail: String| Error::Line { line: line_no, detail };
        let rec: Record = serde_json::from_str(&line).map_err(|e| fail(e.to_string()))?;
        let mut edges = Vec::with_capacity(rec.edges.len());
        for [u, v] in rec.edges {
            if u >= v {
                return Err(fail(format!("edge [{u}, {v}] must satisfy u < v")));
            }
            if v >= rec.n {
                return Err(fail(format!("edge [{u}, {v}] out of range for n = {}", rec.n)));
            }
            edges.push((u, v));
        }
        let (g, _) = Graph::from_edge_list(rec.n, &edges).map_err(|e| fail(e.to_string()))?;
        graphs.push(g);
    }
    Ok(graphs)
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Vec<Graph>> {
    parse_jsonl(BufReader::new(File::open(path)?))
}

pub fn write_jsonl<W: Write>(mut writer: W, graphs: &[Graph]) -> Result<()> {
    for g in graphs {
        let rec = Record {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        };
        serde_json::to_writer(&mut writer, &rec).map_err(|e| Error::Io(e.into()))?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn save_jsonl(path: impl AsRef<Path>, graphs: &[Graph]) -> Result<()> {
    write_jsonl(BufWriter::new(File::create(path)?), graphs)
}
