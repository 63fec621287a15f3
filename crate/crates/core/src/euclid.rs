//! Euclidean machinery: spreads, the swap search maximizing the total spread,
//! power functions and the common point of the balls `B₂(Pᵢ)`.
//!
//! For a transversal `P` of `r` points the spread is
//! `d²(P) = Σ_{x≠y} ‖x−y‖² / (2r²(r−1))` over ordered pairs, and `B₂(P)` is the
//! ball around the centroid with radius `√d²(P)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::certificate::{Certificate, Check};
use crate::config::{ColoredConfig, TransversalPartition};
use crate::error::{Error, Result};
use crate::point::{centroid, dist_sq, NormKind, Point};
use crate::search::{swap_search, Direction};
use crate::simplex_qp::{self, QpOptions};

/// Relative swap threshold; multiplied by the squared inter-color diameter.
pub const DEFAULT_EPS_FACTOR: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EuclidSolveReport {
    pub partition: TransversalPartition,
    /// Total spread `Σ d²(Pᵢ)`.
    pub objective: f64,
    pub swap_count: usize,
    pub balls: Vec<Ball>,
    pub common_point: Option<Point>,
    /// Value of `max_i power(x, Pᵢ)` at the returned point.
    pub residual: f64,
    /// Largest ball radius divided by the inter-color diameter.
    pub bound_ratio: f64,
}

fn check_part(points: &[Point]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 points, got {}", points.len())));
    }
    let d = points[0].dim();
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    Ok(())
}

fn spread_refs(points: &[&Point]) -> f64 {
    let r = points.len() as f64;
    let mut sum = 0.0;
    for (a, x) in points.iter().enumerate() {
        for (b, y) in points.iter().enumerate() {
            if a != b {
                sum += dist_sq(x.coords(), y.coords());
            }
        }
    }
    sum / (2.0 * r * r * (r - 1.0))
}

/// `d²(P)`, the squared radius of `B₂(P)`.
pub fn spread(points: &[Point]) -> Result<f64> {
    check_part(points)?;
    Ok(spread_refs(&points.iter().collect::<Vec<_>>()))
}

/// `dₙ²(A,B) = Σ_{m≠n} (‖aₙ−b_m‖² + ‖a_m−bₙ‖²)` for color `n`.
pub fn color_pair_spread(a: &[Point], b: &[Point], n: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if n >= a.len() {
        return Err(Error::InvalidParameter(format!("color {n} out of range")));
    }
    Ok((0..a.len())
        .filter(|&m| m != n)
        .map(|m| dist_sq(a[n].coords(), b[m].coords()) + dist_sq(a[m].coords(), b[n].coords()))
        .sum())
}

/// `d²(A,B) = Σₙ dₙ²(A,B) / (4r²(r−1))`.
pub fn pair_spread(a: &[Point], b: &[Point]) -> Result<f64> {
    check_part(a)?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let r = a.len() as f64;
    let mut total = 0.0;
    for n in 0..a.len() {
        total += color_pair_spread(a, b, n)?;
    }
    Ok(total / (4.0 * r * r * (r - 1.0)))
}

/// `d²(Pᵢ,Pᵢ) + d²(Pⱼ,Pⱼ) − 2d²(Pᵢ,Pⱼ)`; nonnegative for locally optimal pairs.
pub fn pair_inequality(pi: &[Point], pj: &[Point]) -> Result<f64> {
    Ok(pair_spread(pi, pi)? + pair_spread(pj, pj)? - 2.0 * pair_spread(pi, pj)?)
}

/// Power of `x` with respect to `B₂(P)`: `‖x − c_P‖² − d²(P)`.
pub fn power(x: &Point, part: &[Point]) -> Result<f64> {
    check_part(part)?;
    x.check_dim(&part[0])?;
    let c = centroid(part)?;
    Ok(dist_sq(x.coords(), c.coords()) - spread(part)?)
}

/// `B₂(P)`.
pub fn spread_ball(part: &[Point]) -> Result<Ball> {
    let c = centroid(part)?;
    Ball::euclidean(c, spread(part)?.sqrt())
}

/// Total spread `Σ d²(Pᵢ)` of a partition.
pub fn objective(cfg: &ColoredConfig, partition: &TransversalPartition) -> Result<f64> {
    partition.validate_for(cfg)?;
    Ok((0..cfg.k()).map(|i| spread_refs(&cfg.part_refs(&partition.assignment, i))).sum())
}

pub fn default_eps(cfg: &ColoredConfig) -> f64 {
    let d = cfg.inter_color_diameter(NormKind::EUCLIDEAN);
    (DEFAULT_EPS_FACTOR * d * d).max(f64::MIN_POSITIVE)
}

/// Swap search maximizing `Σ d²(Pᵢ)`, followed by the common-point solve.
pub fn local_search_euclid(cfg: &ColoredConfig, init: &TransversalPartition, eps: f64) -> Result<EuclidSolveReport> {
    init.validate_for(cfg)?;
    let outcome = swap_search(cfg.colors(), init, eps, Direction::Maximize, spread_refs, |a, b| a == b)?;
    Ok(build_report(cfg, outcome.partition, outcome.objective, outcome.swap_count))
}

/// Builds the full report (balls, common point, ratio) for any partition.
pub fn report_for_partition(cfg: &ColoredConfig, partition: &TransversalPartition) -> Result<EuclidSolveReport> {
    let objective = objective(cfg, partition)?;
    Ok(build_report(cfg, partition.clone(), objective, 0))
}

fn build_report(
    cfg: &ColoredConfig,
    partition: TransversalPartition,
    objective: f64,
    swap_count: usize,
) -> EuclidSolveReport {
    let parts = cfg.parts_of(&partition).expect("partition validated");
    let balls: Vec<Ball> = parts.iter().map(|p| spread_ball(p).expect("valid part")).collect();
    let (common_point, residual) = match find_common_point(&balls, 1e-13, 200_000) {
        Ok(cp) => (Some(cp.point), cp.residual),
        Err(Error::NonConvergence { best, .. }) => (None, best),
        Err(_) => (None, f64::NAN),
    };
    let diam = cfg.inter_color_diameter(NormKind::EUCLIDEAN);
    let max_radius = balls.iter().map(|b| b.radius).fold(0.0f64, f64::max);
    EuclidSolveReport {
        partition,
        objective,
        swap_count,
        balls,
        common_point,
        residual,
        bound_ratio: max_radius / diam,
    }
}

/// Minimizer of `f(x) = maxᵢ (‖x − cᵢ‖² − ρᵢ²)` with its active multipliers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommonPoint {
    pub point: Point,
    /// `f` at `point`.
    pub residual: f64,
    /// Indices of balls carrying positive multiplier weight.
    pub active: Vec<usize>,
    /// Multipliers aligned with `active`; they sum to one.
    pub weights: Vec<f64>,
    pub exact: bool,
}

/// Evaluates `maxᵢ power(x, Bᵢ)` for Euclidean balls.
pub fn max_power(x: &Point, balls: &[Ball]) -> f64 {
    balls.iter().map(|b| dist_sq(x.coords(), b.center.coords()) - b.radius * b.radius).fold(f64::NEG_INFINITY, f64::max)
}

/// Minimizes the largest power over the balls.
///
/// All powers share the quadratic `‖x‖²`, so `f(x) = ‖x‖² + maxᵢ ℓᵢ(x)` with
/// affine `ℓᵢ`. The minimizer is the convex combination `Σ λᵢ cᵢ` whose weights
/// solve the dual simplex QP `max_λ Σ λᵢ(‖cᵢ‖² − ρᵢ²) − ‖Σ λᵢ cᵢ‖²`; it lies in
/// the affine hull of the centers.
pub fn find_common_point(balls: &[Ball], tol: f64, max_iter: usize) -> Result<CommonPoint> {
    let first = balls.first().ok_or(Error::Empty("no balls"))?;
    for b in balls {
        first.center.check_dim(&b.center)?;
        if b.geometry != first.geometry {
            return Err(Error::InvalidParameter("balls mix geometries".into()));
        }
    }
    let k = balls.len();
    let centers: Vec<&Point> = balls.iter().map(|b| &b.center).collect();
    let mean = centroid(centers.iter().copied())?;
    let shifted: Vec<Point> = centers.iter().map(|c| *c - &mean).collect();
    let h = DMatrix::from_fn(k, k, |i, j| 2.0 * shifted[i].dot(&shifted[j]));
    let a = DVector::from_fn(k, |i, _| shifted[i].norm_sq() - balls[i].radius * balls[i].radius);
    let opts = QpOptions { tol: tol.max(1e-15), max_iter, ..QpOptions::default() };
    let sol = simplex_qp::solve(&h, &a, opts)?;

    let mut coords = mean.coords().to_vec();
    for (w, c) in sol.weights.iter().zip(&shifted) {
        for (x, ci) in coords.iter_mut().zip(c.coords()) {
            *x += w * ci;
        }
    }
    let point = Point::from_vec_unchecked(coords);
    let residual = max_power(&point, balls);
    let (active, weights) = sol.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, &w)| (i, w)).unzip();
    Ok(CommonPoint { point, residual, active, weights, exact: sol.exact })
}

/// Checks that the balls share a point, that every radius respects the
/// `diam/√(2r)` bound, and that every pair of parts satisfies
/// `d²(Pᵢ,Pᵢ) + d²(Pⱼ,Pⱼ) − 2d²(Pᵢ,Pⱼ) ≥ 0`, all within `tol`.
pub fn certify_common_ball(cfg: &ColoredConfig, report: &EuclidSolveReport, tol: f64) -> Certificate {
    let mut cert = Certificate::new("euclid-common-point");
    let parts = match cfg.parts_of(&report.partition) {
        Ok(p) => p,
        Err(e) => {
            cert.fail(format!("invalid partition: {e}"));
            return cert;
        }
    };
    let balls: Vec<Ball> = parts.iter().map(|p| spread_ball(p).expect("valid part")).collect();
    let recomputed = objective(cfg, &report.partition).expect("validated");
    cert.push(Check::eq("objective-consistent", report.objective, recomputed, 1e-9 * (1.0 + recomputed.abs())));

    match find_common_point(&balls, 1e-13, 200_000) {
        Ok(cp) => cert.push(Check::le("residual", cp.residual, 0.0, tol)),
        Err(e) => cert.fail(format!("common point search failed: {e}")),
    }

    let r = cfg.r() as f64;
    let diam = cfg.inter_color_diameter(NormKind::EUCLIDEAN);
    let bound = diam / (2.0 * r).sqrt();
    for (i, b) in balls.iter().enumerate() {
        cert.push(Check::le(format!("radius[{i}]"), b.radius, bound, tol));
    }

    for i in 0..cfg.k() {
        for j in (i + 1)..cfg.k() {
            let value = pair_inequality(&parts[i], &parts[j]).expect("aligned parts");
            let check = Check::le(format!("pair-inequality[{i},{j}]"), -value, 0.0, tol);
            if !check.passed {
                // name the colors whose exchange would increase the objective
                for n in 0..cfg.r() {
                    let own = color_pair_spread(&parts[i], &parts[i], n).unwrap()
                        + color_pair_spread(&parts[j], &parts[j], n).unwrap();
                    let cross = 2.0 * color_pair_spread(&parts[i], &parts[j], n).unwrap();
                    if own - cross < 0.0 {
                        cert.fail(format!("improving swap: parts ({i},{j}) color {n}"));
                    }
                }
            }
            cert.push(check);
        }
    }
    cert
}

/// Global optimum of `Σ d²(Pᵢ)` for two colors via maximum-weight perfect
/// matching on the weights `‖a − b‖²`.
pub fn hungarian_r2(cfg: &ColoredConfig) -> Result<TransversalPartition> {
    if cfg.r() != 2 {
        return Err(Error::InvalidParameter(format!("hungarian_r2 needs exactly 2 colors, got {}", cfg.r())));
    }
    let k = cfg.k();
    let weights: Vec<Vec<f64>> =
        (0..k).map(|i| (0..k).map(|j| dist_sq(cfg.point(0, i).coords(), cfg.point(1, j).coords())).collect()).collect();
    let matching = crate::hungarian::max_weight_matching(&weights);
    Ok(TransversalPartition { assignment: vec![(0..k).collect(), matching] })
}
