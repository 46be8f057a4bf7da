//! Output files. Each one carries the resolved config hash: JSON documents
//! in a `config_hash` field, JSON-lines corpora in a `.meta.json` sidecar,
//! text formats in a comment line.

use std::fs;
use std::path::{Path, PathBuf};

use bandgen_core::datasets::save_jsonl;
use bandgen_core::{Error, Graph, Result};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Saves `graphs` as JSON lines plus a sidecar with the config echo.
pub fn write_graphs(path: &Path, graphs: &[Graph], command: &str, cfg: &RunConfig) -> Result<()> {
    save_jsonl(path, graphs)?;
    let meta = json!({
        "command": command,
        "graphs": graphs.len(),
        "config_echo": cfg.flat(),
        "config_hash": cfg.hash(),
    });
    write_json(&sidecar_path(path), &meta)
}

/// Inserts `tag` before the extension: `a/b.jsonl` → `a/b.train.jsonl`.
pub fn tagged_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

/// Binary graymap of the adjacency matrix: edges black, diagonal grey,
/// everything else white.
pub fn adjacency_pgm(graph: &Graph, hash: &str) -> Vec<u8> {
    let n = graph.n();
    let mut out = format!("P5\n# config_hash: {hash}\n{n} {n}\n255\n").into_bytes();
    let mut pixels = vec![255u8; n * n];
    for i in 0..n {
        pixels[i * n + i] = 160;
    }
    for (u, v) in graph.edges() {
        pixels[u * n + v] = 0;
        pixels[v * n + u] = 0;
    }
    out.extend(pixels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagged_paths() {
        assert_eq!(tagged_path(Path::new("d/g.jsonl"), "val"), PathBuf::from("d/g.val.jsonl"));
        assert_eq!(tagged_path(Path::new("g"), "test"), PathBuf::from("g.test"));
        assert_eq!(sidecar_path(Path::new("d/g.jsonl")), PathBuf::from("d/g.jsonl.meta.json"));
    }

    #[test]
    fn pgm_layout() {
        let img = adjacency_pgm(&Graph::path(3), "ab");
        let header = b"P5\n# config_hash: ab\n3 3\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(&img[header.len()..], &[160, 0, 255, 0, 160, 0, 255, 0, 160]);
    }
}
