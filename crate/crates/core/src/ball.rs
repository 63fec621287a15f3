use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{NormKind, Point};

/// The metric a ball lives in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Normed(NormKind),
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub geometry: Geometry,
}

impl Ball {
    pub fn new(center: Point, radius: f64, geometry: Geometry) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        Ok(Self { center, radius, geometry })
    }

    pub fn euclidean(center: Point, radius: f64) -> Result<Self> {
        Self::new(center, radius, Geometry::Normed(NormKind::EUCLIDEAN))
    }
}
