use serde::{Deserialize, Serialize};

use super::{Arrangement, EdgeHost};
use crate::geometry::{Point2, Rect, Trait};

/// Serializable snapshot of an arrangement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangementDump {
    pub frame: Rect,
    pub traits: Vec<Trait>,
    pub vertices: Vec<Point2>,
    pub edges: Vec<EdgeRecord>,
    pub faces: Vec<FaceRecord>,
    pub neighborhood: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub host: EdgeHost,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRecord {
    /// Boundary vertex indices in positive order.
    pub vertices: Vec<usize>,
    pub area: f64,
    pub centroid: Point2,
}

impl From<&Arrangement> for ArrangementDump {
    fn from(arr: &Arrangement) -> Self {
        Self {
            frame: arr.frame(),
            traits: arr.traits().to_vec(),
            vertices: arr.prime().vertices().to_vec(),
            edges: arr
                .prime()
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    host: e.host,
                    start: e.start,
                    end: e.end,
                })
                .collect(),
            faces: arr
                .faces()
                .iter()
                .map(|f| FaceRecord {
                    vertices: f.vertex_loop().to_vec(),
                    area: f.area(),
                    centroid: f.centroid(),
                })
                .collect(),
            neighborhood: arr.neighborhood().iter().copied().collect(),
        }
    }
}
