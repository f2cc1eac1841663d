//! Field snapshots: raw little-endian f64 payload next to a JSON sidecar
//! describing the lattice, component shape and frame convention.

use crate::error::{Error, Result};
use crate::geometry::MetricChart;
use crate::sig::Signature;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SnapshotMeta {
    pub schema_version: u32,
    pub dims: Vec<usize>,
    /// Per-site component shape (after the site index).
    pub shape: Vec<usize>,
    pub field_kind: String,
    pub frame: String,
    pub h: Vec<f64>,
    pub signature: Signature,
    /// True when the payload interleaves re/im pairs.
    pub complex: bool,
}

impl SnapshotMeta {
    pub fn for_chart(chart: &MetricChart, shape: Vec<usize>, kind: &str, complex: bool) -> Self {
        SnapshotMeta {
            schema_version: SNAPSHOT_SCHEMA_VERSION,
            dims: chart.lat.dims.clone(),
            shape,
            field_kind: kind.to_string(),
            frame: "orthonormal".to_string(),
            h: chart.lat.h.clone(),
            signature: chart.sig,
            complex,
        }
    }

    pub fn expected_len(&self) -> usize {
        let per_site: usize = self.shape.iter().product::<usize>().max(1);
        let sites: usize = self.dims.iter().product();
        sites * per_site * if self.complex { 2 } else { 1 }
    }
}

/// Write payload + sidecar. `path` is the payload file; the sidecar gets a
/// `.json` extension appended.
pub fn save_snapshot(path: &Path, meta: &SnapshotMeta, payload: &[f64]) -> Result<()> {
    if payload.len() != meta.expected_len() {
        return Err(Error::DimensionMismatch(format!(
            "snapshot payload has {} values, sidecar expects {}",
            payload.len(),
            meta.expected_len()
        )));
    }
    let mut f = std::fs::File::create(path)?;
    let mut buf = Vec::with_capacity(payload.len() * 8);
    for v in payload {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    f.write_all(&buf)?;
    let side = sidecar_path(path);
    let mut sf = std::fs::File::create(side)?;
    sf.write_all(serde_json::to_string_pretty(meta)?.as_bytes())?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<(SnapshotMeta, Vec<f64>)> {
    let side = sidecar_path(path);
    let meta: SnapshotMeta = serde_json::from_reader(std::fs::File::open(side)?)?;
    if meta.schema_version != SNAPSHOT_SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "snapshot schema version {} unsupported",
            meta.schema_version
        )));
    }
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() != meta.expected_len() * 8 {
        return Err(Error::InvalidInput(format!(
            "snapshot payload has {} bytes, sidecar expects {}",
            bytes.len(),
            meta.expected_len() * 8
        )));
    }
    let payload = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((meta, payload))
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".json");
    std::path::PathBuf::from(s)
}
