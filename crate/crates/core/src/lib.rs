//! Colorful Tverberg partitions in Euclidean, Banach and hyperbolic spaces.
//!
//! Partitions are found by a swap local search on a sum-of-distances
//! objective; each solver returns the induced balls and a certificate that
//! they share a point (or intersect pairwise in general normed spaces).

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod banach;
pub mod certificate;
pub mod config;
pub mod constructions;
pub mod error;
pub mod euclid;
pub mod hungarian;
pub mod hyperbolic;
pub mod io;
pub mod oracle;
pub mod point;
pub mod search;
pub mod simplex_qp;

pub use ball::{Ball, Geometry};
pub use certificate::{Certificate, Check};
pub use config::{inter_color_diameter, ColoredConfig, TransversalPartition};
pub use error::{Error, Result};
pub use hyperbolic::{HPoint, HyperBall, HyperConfig};
pub use io::Instance;
pub use oracle::{Objective, Space};
pub use point::{centroid, norm_dist, set_diameter, NormKind, Point};
