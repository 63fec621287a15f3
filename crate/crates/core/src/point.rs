//! Points, norms and the distance helpers shared by every solver.

use std::fmt;
use std::ops::{Add, Index, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("point has no coordinates"));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(coords))
    }

    /// Builds a point without validation. Callers guarantee finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }

    pub(crate) fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The norm used to measure distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Lp(f64),
    LInfinity,
}

impl NormKind {
    pub const EUCLIDEAN: NormKind = NormKind::Lp(2.0);

    pub fn lp(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(NormKind::LInfinity);
        }
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent must be finite and >= 1, got {p}")));
        }
        Ok(NormKind::Lp(p))
    }

    /// Norm of a coordinate vector.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            NormKind::LInfinity => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            NormKind::Lp(1.0) => v.iter().map(|x| x.abs()).sum(),
            NormKind::Lp(2.0) => {
                // scaled to avoid overflow on large coordinates
                let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
            }
            NormKind::Lp(p) => {
                let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::LInfinity => write!(f, "linf"),
            NormKind::Lp(p) => write!(f, "l{p}"),
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;

    /// Accepts `l1`, `l2`, `l1.5`, `linf`, `inf`, or a bare exponent such as `3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "linf" || t == "inf" || t == "l_inf" || t == "infinity" {
            return Ok(NormKind::LInfinity);
        }
        let digits = t.strip_prefix('l').unwrap_or(&t);
        let p: f64 = digits.parse().map_err(|_| Error::InvalidParameter(format!("unrecognized norm '{s}'")))?;
        NormKind::lp(p)
    }
}

impl Serialize for NormKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NormKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Distance between two points in the given norm.
pub fn norm_dist(x: &Point, y: &Point, norm: NormKind) -> Result<f64> {
    x.check_dim(y)?;
    Ok(norm_dist_unchecked(x.coords(), y.coords(), norm))
}

pub(crate) fn norm_dist_unchecked(x: &[f64], y: &[f64], norm: NormKind) -> f64 {
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    norm.norm(&diff)
}

/// Coordinate-wise arithmetic mean.
pub fn centroid<'a, I>(points: I) -> Result<Point>
where
    I: IntoIterator<Item = &'a Point>,
{
    let mut iter = points.into_iter();
    let first = iter.next().ok_or(Error::Empty("centroid of no points"))?;
    let mut sum = first.coords().to_vec();
    let mut count = 1usize;
    for p in iter {
        first.check_dim(p)?;
        for (s, c) in sum.iter_mut().zip(p.coords()) {
            *s += c;
        }
        count += 1;
    }
    let inv = 1.0 / count as f64;
    Ok(Point(sum.into_iter().map(|s| s * inv).collect()))
}

/// Largest pairwise distance within one point set.
pub fn set_diameter(points: &[Point], norm: NormKind) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty("diameter of no points"));
    }
    let mut best = 0.0f64;
    for (a, x) in points.iter().enumerate() {
        for y in &points[a + 1..] {
            best = best.max(norm_dist(x, y, norm)?);
        }
    }
    Ok(best)
}
