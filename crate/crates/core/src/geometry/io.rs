use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConvexPolytope, HalfSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceRecord {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// On-disk polytope: `{"dim": N, "halfspaces": [{"normal": [..], "offset": r}, ..]}`.
///
/// `facet_ids` is optional and defaults to the half-space order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub halfspaces: Vec<HalfSpaceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facet_ids: Option<Vec<usize>>,
}

impl From<&ConvexPolytope> for PolytopeFile {
    fn from(p: &ConvexPolytope) -> Self {
        let sequential = p.facet_ids().iter().enumerate().all(|(i, &id)| i == id);
        Self {
            dim: p.dim(),
            halfspaces: p
                .halfspaces()
                .iter()
                .map(|h| HalfSpaceRecord {
                    normal: h.normal.iter().copied().collect(),
                    offset: h.offset,
                })
                .collect(),
            facet_ids: (!sequential).then(|| p.facet_ids().to_vec()),
        }
    }
}

impl TryFrom<PolytopeFile> for ConvexPolytope {
    type Error = Error;

    fn try_from(file: PolytopeFile) -> Result<Self> {
        let halfspaces = file
            .halfspaces
            .iter()
            .map(|h| HalfSpace::from_slice(&h.normal, h.offset))
            .collect::<Result<Vec<_>>>()?;
        match file.facet_ids {
            Some(ids) => ConvexPolytope::with_ids(file.dim, halfspaces, ids),
            None => ConvexPolytope::new(file.dim, halfspaces),
        }
    }
}

impl ConvexPolytope {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PolytopeFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<PolytopeFile>(text)?.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Format(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cube;

    #[test]
    fn json_round_trip() {
        let p = cube(3, -1.0, 2.0);
        let back = ConvexPolytope::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn unnormalized_input_is_rescaled() {
        let p = ConvexPolytope::from_json(
            r#"{"dim": 2, "halfspaces": [{"normal": [0, 3], "offset": 6}, {"normal": [0, -1], "offset": 0}]}"#,
        )
        .unwrap();
        assert_eq!(p.halfspaces()[0].offset, 2.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = ConvexPolytope::from_json(r#"{"dim": 3, "halfspaces": [{"normal": [1, 0], "offset": 1}]}"#);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}
