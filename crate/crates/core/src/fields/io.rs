//! Binary snapshots and CSV slices.
//!
//! A snapshot file holds a header (`n` as `u64`, then `L` and `t` as
//! `f64`) followed by the `u` block and the `uₜ` block, each `n³` row-major
//! 3-vectors; everything little-endian. A JSON sidecar with the same stem
//! records the layout and the boundary type.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Boundary, FieldState, Grid3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub t: f64,
    pub spacing: f64,
    pub boundary: Boundary,
    pub blocks: Vec<String>,
    pub layout: String,
    pub dtype: String,
}

const HEADER_BYTES: usize = 24;

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `path` and its `.json` sidecar.
pub fn write_snapshot(path: impl AsRef<Path>, state: &FieldState) -> Result<()> {
    let path = path.as_ref();
    let g = state.grid;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    w.write_all(&g.half_width().to_le_bytes())?;
    w.write_all(&state.t.to_le_bytes())?;
    for block in [&state.u, &state.ut] {
        for v in block.iter().flatten() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    let meta = SnapshotMeta {
        n: g.n(),
        half_width: g.half_width(),
        t: state.t,
        spacing: g.spacing(),
        boundary: g.boundary(),
        blocks: vec!["u".into(), "ut".into()],
        layout: "index (i*n + j)*n + k, x1 slowest; 3 components per node".into(),
        dtype: "f64 little-endian".into(),
    };
    std::fs::write(sidecar(path), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<FieldState> {
    let path = path.as_ref();
    let meta: SnapshotMeta = serde_json::from_str(&std::fs::read_to_string(sidecar(path))?)?;
    let bytes = std::fs::read(path)?;
    if bytes.len() < HEADER_BYTES {
        return Err(Error::Parse("snapshot shorter than its header".into()));
    }
    let word = |i: usize| -> [u8; 8] { bytes[i * 8..i * 8 + 8].try_into().expect("8-byte slice") };
    let n = u64::from_le_bytes(word(0)) as usize;
    let half_width = f64::from_le_bytes(word(1));
    let t = f64::from_le_bytes(word(2));
    if n != meta.n || half_width != meta.half_width {
        return Err(Error::Parse("snapshot header disagrees with its sidecar".into()));
    }
    let grid = Grid3::new(n, half_width, meta.boundary)?;
    let count = grid.len() * 3;
    if bytes.len() != HEADER_BYTES + 2 * count * 8 {
        return Err(Error::Parse(format!(
            "snapshot has {} bytes, expected {}",
            bytes.len(),
            HEADER_BYTES + 2 * count * 8
        )));
    }
    let block = |b: usize| {
        (0..grid.len())
            .map(|p| [0, 1, 2].map(|c| f64::from_le_bytes(word(3 + b * count + p * 3 + c))))
            .collect()
    };
    Ok(FieldState {
        grid,
        u: block(0),
        ut: block(1),
        t,
    })
}

/// The line of nodes along `axis` through index `n/2` in the other two
/// axes, as CSV with columns `s,u1,u2,u3,ut1,ut2,ut3`.
pub fn slice_csv(state: &FieldState, axis: usize) -> Result<String> {
    if axis > 2 {
        return Err(Error::Config(format!("axis must be 0, 1 or 2, got {axis}")));
    }
    let g = state.grid;
    let mid = g.n() / 2;
    let mut out = String::from("s,u1,u2,u3,ut1,ut2,ut3\n");
    for i in 0..g.n() {
        let mut ijk = [mid; 3];
        ijk[axis] = i;
        let p = g.index(ijk[0], ijk[1], ijk[2]);
        let (u, ut) = (state.u[p], state.ut[p]);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            g.coord(i),
            u[0],
            u[1],
            u[2],
            ut[0],
            ut[1],
            ut[2]
        ));
    }
    Ok(out)
}

pub fn write_slice_csv(path: impl AsRef<Path>, state: &FieldState, axis: usize) -> Result<()> {
    std::fs::write(path, slice_csv(state, axis)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid3::new(8, 1.5, Boundary::ZeroPadded).unwrap();
        let mut s = FieldState::from_fn(g, 0.25, |x| ([x[0], x[1] * x[2], 1.0 / 3.0], [0.0, -x[2], 1e-300]));
        s.t = 0.75;
        let path = dir.path().join("snap.bin");
        write_snapshot(&path, &s).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            std::fs::metadata(&path).unwrap().len() as usize,
            HEADER_BYTES + 2 * 512 * 3 * 8
        );
        let meta: SnapshotMeta =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("snap.json")).unwrap()).unwrap();
        assert_eq!(meta.boundary, Boundary::ZeroPadded);
        std::fs::write(&path, [0u8; 10]).unwrap();
        assert!(read_snapshot(&path).is_err());
    }

    #[test]
    fn slice_has_one_row_per_node() {
        let g = Grid3::new(8, 1.0, Boundary::Periodic).unwrap();
        let s = FieldState::from_fn(g, 0.0, |x| ([x[0], 0.0, 0.0], [0.0; 3]));
        let csv = slice_csv(&s, 0).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 9);
        assert!(lines[1].starts_with("-0.875,-0.875,"));
        assert!(slice_csv(&s, 3).is_err());
    }
}
