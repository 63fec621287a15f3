//! Colored configurations and partitions into transversals.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{norm_dist_unchecked, NormKind, Point};

/// `r` color classes of `k` points each, sharing one ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColoredConfig {
    k: usize,
    r: usize,
    dim: usize,
    colors: Vec<Vec<Point>>,
}

impl ColoredConfig {
    /// Validates shape, dimensions and cross-color disjointness.
    ///
    /// Points repeated inside one color are allowed; a point shared by two
    /// colors is rejected (exact coordinate equality).
    pub fn new(colors: Vec<Vec<Point>>) -> Result<Self> {
        let r = colors.len();
        if r < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 colors, got {r}")));
        }
        let k = colors[0].len();
        if k < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 points per color, got {k}")));
        }
        let dim = colors[0][0].dim();
        let mut owner: HashMap<Vec<u64>, usize> = HashMap::new();
        for (j, class) in colors.iter().enumerate() {
            if class.len() != k {
                return Err(Error::InvalidConfig(format!("color {j} has {} points, expected {k}", class.len())));
            }
            for p in class {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
                }
                let key: Vec<u64> = p.coords().iter().map(|c| (c + 0.0).to_bits()).collect();
                match owner.get(&key) {
                    Some(&other) if other != j => {
                        return Err(Error::InvalidConfig(format!(
                            "colors {other} and {j} share the point {:?}",
                            p.coords()
                        )));
                    }
                    Some(_) => {}
                    None => {
                        owner.insert(key, j);
                    }
                }
            }
        }
        Ok(Self { k, r, dim, colors })
    }

    /// Points per color.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of colors.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn colors(&self) -> &[Vec<Point>] {
        &self.colors
    }

    pub fn point(&self, color: usize, index: usize) -> &Point {
        &self.colors[color][index]
    }

    pub fn all_points(&self) -> impl Iterator<Item = &Point> {
        self.colors.iter().flatten()
    }

    /// Largest distance between points of different colors.
    pub fn inter_color_diameter(&self, norm: NormKind) -> f64 {
        let mut best = 0.0f64;
        for (a, ca) in self.colors.iter().enumerate() {
            for cb in &self.colors[a + 1..] {
                for x in ca {
                    for y in cb {
                        best = best.max(norm_dist_unchecked(x.coords(), y.coords(), norm));
                    }
                }
            }
        }
        best
    }

    /// Realizes the parts of a partition as lists of points, one per color.
    pub fn parts_of(&self, partition: &TransversalPartition) -> Result<Vec<Vec<Point>>> {
        partition.validate_for(self)?;
        Ok((0..self.k)
            .map(|i| (0..self.r).map(|j| self.colors[j][partition.assignment[j][i]].clone()).collect())
            .collect())
    }

    /// Borrowing variant of [`ColoredConfig::parts_of`] for hot loops.
    pub(crate) fn part_refs<'a>(&'a self, assignment: &[Vec<usize>], part: usize) -> Vec<&'a Point> {
        (0..self.r).map(|j| &self.colors[j][assignment[j][part]]).collect()
    }
}

/// Free function form of [`ColoredConfig::inter_color_diameter`].
pub fn inter_color_diameter(cfg: &ColoredConfig, norm: NormKind) -> f64 {
    cfg.inter_color_diameter(norm)
}

/// Row `j`, column `i` holds the index within color `j` of the point placed in part `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransversalPartition {
    pub assignment: Vec<Vec<usize>>,
}

impl TransversalPartition {
    pub fn new(assignment: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self { assignment };
        p.validate_rows()?;
        Ok(p)
    }

    /// Every color sends point `i` to part `i`.
    pub fn identity(k: usize, r: usize) -> Self {
        Self { assignment: vec![(0..k).collect(); r] }
    }

    pub fn k(&self) -> usize {
        self.assignment.first().map_or(0, Vec::len)
    }

    pub fn r(&self) -> usize {
        self.assignment.len()
    }

    fn validate_rows(&self) -> Result<()> {
        let k = self.k();
        for (j, row) in self.assignment.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidPartition(format!("row {j} has length {}, expected {k}", row.len())));
            }
            let mut seen = vec![false; k];
            for &v in row {
                if v >= k || seen[v] {
                    return Err(Error::InvalidPartition(format!("row {j} is not a permutation of 0..{k}: {row:?}")));
                }
                seen[v] = true;
            }
        }
        Ok(())
    }

    pub fn validate_for(&self, cfg: &ColoredConfig) -> Result<()> {
        if self.r() != cfg.r() || self.k() != cfg.k() {
            return Err(Error::InvalidPartition(format!(
                "partition shape {}x{} does not match configuration {}x{}",
                self.r(),
                self.k(),
                cfg.r(),
                cfg.k()
            )));
        }
        self.validate_rows()
    }

    /// Relabels parts so color 0 uses the identity; useful for comparing partitions.
    pub fn canonical(&self) -> Self {
        let k = self.k();
        let mut part_of_first = vec![0; k];
        for (i, &v) in self.assignment[0].iter().enumerate() {
            part_of_first[v] = i;
        }
        let assignment = self.assignment.iter().map(|row| (0..k).map(|v| row[part_of_first[v]]).collect()).collect();
        Self { assignment }
    }
}
