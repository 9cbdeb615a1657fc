//! File formats: path JSON, homotopy-grid CSV, and chart-coordinate CSV.
//!
//! Path JSON: `{"basepoint": [w,x,y,z] (optional), "samples": [[w,x,y,z], ...]}`.
//! Grid CSV: header `s,t,w,x,y,z`, one line per node, row-major.
//! Chart CSV: `i,lambda,alpha,phi,disk_x,disk_y` (torus) or `i,vx,vy,vz` (ball).

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homotopy::{GridMeta, HomotopyGrid};
use crate::path::{Loop, PathError, RotationPath};
use crate::rotation::{RotationError, RotationMatrix, UnitQuaternion};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad quaternion in input: {0}")]
    Rotation(#[from] RotationError),
    #[error("bad path in input: {0}")]
    Path(#[from] PathError),
    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

#[derive(Serialize, Deserialize)]
struct PathJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    basepoint: Option<[f64; 4]>,
    samples: Vec<[f64; 4]>,
}

/// A path read from JSON, with its optional declared basepoint.
pub struct LoadedPath {
    pub path: RotationPath,
    pub basepoint: Option<RotationMatrix>,
}

impl LoadedPath {
    /// Interpret as a loop, defaulting the basepoint to the first rotation.
    pub fn into_loop(self) -> Result<Loop, PathError> {
        match self.basepoint {
            Some(b) => Loop::new(self.path, b),
            None => Loop::from_path(self.path),
        }
    }
}

pub fn read_path_json(reader: impl std::io::Read) -> Result<LoadedPath, IoError> {
    let parsed: PathJson = serde_json::from_reader(reader)?;
    let mut samples = Vec::with_capacity(parsed.samples.len());
    for [w, x, y, z] in parsed.samples {
        samples.push(UnitQuaternion::new(w, x, y, z)?);
    }
    let path = RotationPath::new(samples, "loaded from JSON")?;
    let basepoint = match parsed.basepoint {
        Some([w, x, y, z]) => Some(UnitQuaternion::new(w, x, y, z)?.to_matrix()),
        None => None,
    };
    Ok(LoadedPath { path, basepoint })
}

pub fn write_path_json(
    writer: impl std::io::Write,
    path: &RotationPath,
    basepoint: Option<&RotationMatrix>,
) -> Result<(), IoError> {
    let doc = PathJson {
        basepoint: basepoint.map(|b| {
            let q = b.to_quaternion();
            [q.w, q.x, q.y, q.z]
        }),
        samples: path.samples().iter().map(|q| [q.w, q.x, q.y, q.z]).collect(),
    };
    serde_json::to_writer_pretty(writer, &doc)?;
    Ok(())
}

pub fn write_grid_csv(mut writer: impl Write, grid: &HomotopyGrid) -> Result<(), IoError> {
    writeln!(writer, "s,t,w,x,y,z")?;
    for (s, row) in grid.rows().iter().enumerate() {
        for (t, q) in row.iter().enumerate() {
            writeln!(writer, "{s},{t},{},{},{},{}", q.w, q.x, q.y, q.z)?;
        }
    }
    Ok(())
}

pub fn read_grid_csv(reader: impl BufRead) -> Result<HomotopyGrid, IoError> {
    let mut rows: Vec<Vec<UnitQuaternion>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line.trim() != "s,t,w,x,y,z" {
                return Err(IoError::Csv {
                    line: 1,
                    reason: format!("unexpected header `{line}`"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(IoError::Csv {
                line: idx + 1,
                reason: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64, IoError> {
            s.trim().parse().map_err(|_| IoError::Csv {
                line: idx + 1,
                reason: format!("not a number: `{s}`"),
            })
        };
        let s: usize = fields[0].trim().parse().map_err(|_| IoError::Csv {
            line: idx + 1,
            reason: format!("bad row index `{}`", fields[0]),
        })?;
        let t: usize = fields[1].trim().parse().map_err(|_| IoError::Csv {
            line: idx + 1,
            reason: format!("bad column index `{}`", fields[1]),
        })?;
        let q = UnitQuaternion::new(
            parse(fields[2])?,
            parse(fields[3])?,
            parse(fields[4])?,
            parse(fields[5])?,
        )?;
        if s == rows.len() {
            rows.push(Vec::new());
        }
        if s >= rows.len() || t != rows[s].len() {
            return Err(IoError::Csv {
                line: idx + 1,
                reason: format!("out-of-order node ({s},{t})"),
            });
        }
        rows[s].push(q);
    }
    if rows.is_empty() {
        return Err(IoError::Csv {
            line: 0,
            reason: "empty grid".to_string(),
        });
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(IoError::Csv {
            line: 0,
            reason: "ragged grid".to_string(),
        });
    }
    Ok(HomotopyGrid::from_rows(
        rows,
        GridMeta {
            description: "loaded from CSV".to_string(),
            ..GridMeta::default()
        },
    ))
}
