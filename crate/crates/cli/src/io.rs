//! Point-set files.
//!
//! ```json
//! {"d": 2, "points": [[[0.1, 0.0], [0.0, -0.2]], [[0.3, 0.1], [0.0, 0.0]]]}
//! ```
//!
//! Each point is a list of `d` pairs `[re, im]`. For `d = 1` a point may also
//! be written as a single pair.

use std::path::Path;

use ballspace_core::{PointSet, C64};
use nalgebra::DVector;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawPoint {
    Coords(Vec<[f64; 2]>),
    Scalar([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    d: usize,
    points: Vec<RawPoint>,
}

fn parse_vectors(text: &str) -> Result<Vec<Vec<C64>>> {
    let raw: RawSet = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if raw.d == 0 {
        return Err(CliError::Validation("d must be positive".into()));
    }
    raw.points
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let coords: Vec<C64> = match p {
                RawPoint::Coords(c) => c.iter().map(|&[re, im]| C64::new(re, im)).collect(),
                RawPoint::Scalar([re, im]) if raw.d == 1 => vec![C64::new(re, im)],
                RawPoint::Scalar(_) => {
                    return Err(CliError::Validation(format!(
                        "point {i}: a bare [re, im] pair is only allowed when d = 1"
                    )))
                }
            };
            if coords.len() != raw.d {
                return Err(CliError::Validation(format!(
                    "point {i}: expected {} coordinates, found {}",
                    raw.d,
                    coords.len()
                )));
            }
            Ok(coords)
        })
        .collect()
}

/// Parses and validates a point set: every point strictly inside the ball,
/// no duplicates.
pub fn parse_pointset(text: &str) -> Result<PointSet> {
    let coords = parse_vectors(text)?;
    PointSet::from_coords(coords).map_err(|e| CliError::Validation(e.to_string()))
}

pub fn load_pointset(path: impl AsRef<Path>) -> Result<PointSet> {
    parse_pointset(&std::fs::read_to_string(path)?)
}

/// Vectors in the same format, without the ball constraint (Pick targets).
pub fn load_vectors(path: impl AsRef<Path>) -> Result<Vec<DVector<C64>>> {
    let coords = parse_vectors(&std::fs::read_to_string(path)?)?;
    Ok(coords.into_iter().map(DVector::from_vec).collect())
}
