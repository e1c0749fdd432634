//! Line-oriented JSON checkpoints.
//!
//! Line 1 is a header `{"format_version":1,"geometry":..,"dim":..,"node_count":..}`
//! (polyhedral spaces add `"generators"`); each following line is
//! `{"name":..,"radius":..,"center":[..]}`. `dim` counts ambient coordinates.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EmbeddingTable;
use crate::disks::FormalDisk;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::geometry::{GeometryKind, QuasiMetricSpace};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u64,
    geometry: GeometryKind,
    dim: usize,
    node_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    name: String,
    radius: f64,
    center: Vec<f64>,
}

/// Serialisation entry points for [`EmbeddingTable`].
pub struct Checkpoint;

impl Checkpoint {
    pub fn to_string(table: &EmbeddingTable) -> Result<String> {
        let space = table.space();
        let header = Header {
            format_version: FORMAT_VERSION,
            geometry: space.kind(),
            dim: space.dim(),
            node_count: table.len(),
            generators: (space.kind() == GeometryKind::Polyhedral)
                .then(|| space.generators().to_vec()),
        };
        let mut out = serde_json::to_string(&header).map_err(|e| Error::Format(e.to_string()))?;
        out.push('\n');
        for i in 0..table.len() {
            let rec = Record {
                name: table.node_names()[i].clone(),
                radius: table.radius(i),
                center: table.center(i).to_vec(),
            };
            out.push_str(&serde_json::to_string(&rec).map_err(|e| Error::Format(e.to_string()))?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<EmbeddingTable> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::Format("empty checkpoint: missing header with format_version".into()))?;
        let raw: serde_json::Value = serde_json::from_str(first)
            .map_err(|e| Error::Format(format!("header is not valid JSON (format_version expected): {e}")))?;
        match raw.get("format_version").and_then(|v| v.as_u64()) {
            Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::Format(format!(
                    "unsupported format_version {v}, expected {FORMAT_VERSION}"
                )))
            }
            None => return Err(Error::Format("header lacks an integer format_version".into())),
        }
        let header: Header =
            serde_json::from_value(raw).map_err(|e| Error::Format(format!("bad header: {e}")))?;
        let space = match (header.geometry, header.generators) {
            (GeometryKind::Polyhedral, Some(g)) => QuasiMetricSpace::polyhedral_on_span(g)?,
            (GeometryKind::Lorentz, _) if header.dim >= 2 => QuasiMetricSpace::lorentz(header.dim - 1)?,
            (kind, _) => QuasiMetricSpace::from_kind(kind, header.dim)?,
        };
        if space.dim() != header.dim {
            return Err(Error::Format(format!(
                "header dim {} does not match the {} space",
                header.dim, header.geometry
            )));
        }
        let mut names = Vec::with_capacity(header.node_count);
        let mut disks = Vec::with_capacity(header.node_count);
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(line).map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            let center = space.point(rec.center).map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            names.push(rec.name);
            disks.push(FormalDisk::new(center, rec.radius));
        }
        if disks.len() != header.node_count {
            return Err(Error::Format(format!(
                "header announces {} nodes, found {}",
                header.node_count,
                disks.len()
            )));
        }
        EmbeddingTable::new(space, names, disks)
    }
}

/// Atomically writes `table` to `path`.
pub fn write_checkpoint(path: &Path, table: &EmbeddingTable) -> Result<()> {
    write_atomic(path, Checkpoint::to_string(table)?.as_bytes())
}

pub fn read_checkpoint(path: &Path) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot open {}: {e}", path.display()),
        ))
    })?;
    Checkpoint::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{init_embeddings, TrainConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_every_geometry() {
        for kind in GeometryKind::ALL {
            let s = QuasiMetricSpace::from_kind(kind, 3).unwrap();
            let t = init_embeddings(&s, 5, &TrainConfig::default(), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
            let text = Checkpoint::to_string(&t).unwrap();
            assert!(text.starts_with("{\"format_version\":1,"));
            assert!(text.ends_with('\n'));
            assert_eq!(Checkpoint::parse(&text).unwrap(), t);
        }
    }

    #[test]
    fn corrupted_header_names_format_version() {
        let err = Checkpoint::parse("{\"geometry\":\"sphere\"}\n").unwrap_err();
        assert!(err.to_string().contains("format_version"), "{err}");
        let err = Checkpoint::parse("garbage\n").unwrap_err();
        assert!(err.to_string().contains("format_version"), "{err}");
        let err = Checkpoint::parse(
            "{\"format_version\":2,\"geometry\":\"sphere\",\"dim\":2,\"node_count\":0}\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("format_version"), "{err}");
    }

    #[test]
    fn node_count_mismatch() {
        let text = "{\"format_version\":1,\"geometry\":\"euclidean\",\"dim\":1,\"node_count\":2}\n{\"name\":\"a\",\"radius\":0.5,\"center\":[0.0]}\n";
        assert!(Checkpoint::parse(text).is_err());
    }
}
