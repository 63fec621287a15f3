//! Minimization of `f(z) = maxᵢ fᵢ(z)` over the chart `z ∈ ℝ^d`.
//!
//! With `sᵢ = Σ_{x∈Pᵢ} x` and `αᵢ = p(Pᵢ,Pᵢ) − r(r−1)`, each piece is
//! `fᵢ = αᵢ − 2(r−1)·p(sᵢ, w)` at `w = z_H`. At the minimizer `w` is
//! proportional to `Σ λᵢ sᵢ` for multipliers `λ` on the active pieces. On a
//! fixed active set `S`, writing `w = Σ_{i∈S} νᵢ sᵢ` turns the equal-value
//! conditions into a linear system in `ν` with a one-dimensional solution
//! line; `q(w) = −1` then fixes the point on that line by a quadratic. Small
//! problems enumerate every `S`; larger ones run a level-controlled subgradient
//! method and then enumerate supports among the near-active pieces.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{lp, pairing_refs, HPoint};
use crate::error::{Error, Result};
use crate::point::{dot, Point};

#[derive(Debug, Clone, Copy)]
pub struct HyperMinOptions {
    /// Largest number of parts handled by full support enumeration.
    pub exact_max: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for HyperMinOptions {
    fn default() -> Self {
        Self { exact_max: 12, max_iter: 100_000, tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperMinimum {
    pub point: HPoint,
    /// Chart coordinates `z` with `point = z_H`.
    pub z: Point,
    /// `f(z)`.
    pub residual: f64,
    pub active: Vec<usize>,
    pub weights: Vec<f64>,
    pub exact: bool,
}

struct Model {
    s: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    /// `2(r−1)`.
    beta: f64,
}

impl Model {
    fn new(parts: &[Vec<HPoint>]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty("no parts"))?;
        let r = first.len();
        if r < 2 {
            return Err(Error::InvalidParameter("parts need at least 2 points".into()));
        }
        let dim = first[0].coords().len();
        let mut s = Vec::with_capacity(parts.len());
        let mut alpha = Vec::with_capacity(parts.len());
        for part in parts {
            if part.len() != r {
                return Err(Error::InvalidParameter("parts must have equal size".into()));
            }
            if let Some(x) = part.iter().find(|x| x.coords().len() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, got: x.coords().len() });
            }
            let mut sum = vec![0.0; dim];
            for x in part {
                for (a, b) in sum.iter_mut().zip(x.coords()) {
                    *a += b;
                }
            }
            s.push(sum);
            let refs: Vec<&HPoint> = part.iter().collect();
            let rf = r as f64;
            alpha.push(pairing_refs(&refs, &refs) - rf * (rf - 1.0));
        }
        Ok(Self { s, alpha, beta: 2.0 * (r as f64 - 1.0) })
    }

    fn k(&self) -> usize {
        self.s.len()
    }

    fn values(&self, w: &[f64]) -> Vec<f64> {
        self.s.iter().zip(&self.alpha).map(|(s, a)| a - self.beta * lp(s, w)).collect()
    }

    fn max_value(&self, w: &[f64]) -> (usize, f64) {
        self.values(w)
            .into_iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
    }

    fn scale(&self, w: &[f64]) -> f64 {
        let a = self.alpha.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let c = self.s.iter().fold(0.0f64, |m, s| m.max(lp(s, w).abs()));
        (a + self.beta * c).max(1.0)
    }

    /// Dual value `Σλᵢαᵢ + 2(r−1)√(−q(Σλᵢsᵢ))`, a lower bound on `min f`.
    fn dual(&self, lambda: &[f64]) -> f64 {
        let dim = self.s[0].len();
        let mut v = vec![0.0; dim];
        let mut lin = 0.0;
        for ((s, a), l) in self.s.iter().zip(&self.alpha).zip(lambda) {
            lin += l * a;
            for (vt, st) in v.iter_mut().zip(s) {
                *vt += l * st;
            }
        }
        lin + self.beta * (-lp(&v, &v)).max(0.0).sqrt()
    }

    /// Gradient of `fᵢ` in chart coordinates.
    fn grad(&self, i: usize, z: &[f64], w0: f64) -> Vec<f64> {
        let s = &self.s[i];
        z.iter().zip(&s[1..]).map(|(zt, st)| -self.beta * (st - s[0] * zt / w0)).collect()
    }
}

struct Candidate {
    w: HPoint,
    value: f64,
    active: Vec<usize>,
    weights: Vec<f64>,
}

/// Solves the active-set system on `support` and checks it against every piece.
fn candidate_on_support(model: &Model, support: &[usize]) -> Vec<Candidate> {
    let m = support.len();
    let mut out = Vec::new();
    let gram = DMatrix::from_fn(m, m, |a, b| lp(&model.s[support[a]], &model.s[support[b]]));
    // p(sᵢ, w) = yᵢ + τ for i ∈ S, with y the offsets that equalize the values
    let i0 = support[0];
    let y = DVector::from_fn(m, |a, _| (model.alpha[support[a]] - model.alpha[i0]) / model.beta);
    let ones = DVector::from_element(m, 1.0);
    let lu = gram.clone().lu();
    let (Some(u), Some(h)) = (lu.solve(&y), lu.solve(&ones)) else {
        return out;
    };
    if u.iter().chain(h.iter()).any(|v| !v.is_finite()) {
        return out;
    }
    let scale_g = gram.amax().max(1.0);
    if (&gram * &u - &y).amax() > 1e-8 * scale_g * (1.0 + y.amax()) || (&gram * &h - &ones).amax() > 1e-8 * scale_g {
        return out;
    }
    let dim = model.s[0].len();
    let combine = |c: &DVector<f64>| -> Vec<f64> {
        let mut v = vec![0.0; dim];
        for (a, &i) in support.iter().enumerate() {
            for (vt, st) in v.iter_mut().zip(&model.s[i]) {
                *vt += c[a] * st;
            }
        }
        v
    };
    let va = combine(&u);
    let vb = combine(&h);
    // q(va + τ vb) = −1
    let qa = lp(&va, &va);
    let pab = lp(&va, &vb);
    let qb = lp(&vb, &vb);
    let mut taus = Vec::new();
    if qb.abs() < 1e-14 * (pab.abs() + qa.abs()).max(1e-300) {
        if pab != 0.0 {
            taus.push((-1.0 - qa) / (2.0 * pab));
        }
    } else {
        let disc = pab * pab - qb * (qa + 1.0);
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // numerically stable pair of roots
            let t = -pab - pab.signum() * sq;
            if t != 0.0 {
                taus.push(t / qb);
                taus.push((qa + 1.0) / t);
            } else {
                taus.push(-pab / qb);
            }
        }
    }
    for tau in taus {
        let nu = &u + tau * &h;
        let w_raw: Vec<f64> = va.iter().zip(&vb).map(|(a, b)| a + tau * b).collect();
        if !(w_raw[0] > 0.0) || w_raw.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let nu_scale = nu.amax();
        if nu.iter().any(|&v| v < -1e-10 * nu_scale) {
            continue;
        }
        let total: f64 = nu.iter().map(|v| v.max(0.0)).sum();
        if !(total > 0.0) {
            continue;
        }
        let w = HPoint::from_spatial(&w_raw[1..]);
        let values = model.values(w.coords());
        let level = support.iter().map(|&i| values[i]).fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-9 * model.scale(w.coords());
        if values.iter().any(|&v| v > level + tol) {
            continue;
        }
        let value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out.push(Candidate {
            w,
            value,
            active: support.to_vec(),
            weights: nu.iter().map(|v| v.max(0.0) / total).collect(),
        });
    }
    out
}

fn best_over_supports(model: &Model, candidates: &[usize]) -> Option<Candidate> {
    let n = candidates.len();
    let mut best: Option<Candidate> = None;
    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|&b| mask & (1 << b) != 0).map(|b| candidates[b]).collect();
        for c in candidate_on_support(model, &support) {
            if best.as_ref().is_none_or(|b| c.value < b.value) {
                best = Some(c);
            }
        }
    }
    best
}

/// Minimizes `f = maxᵢ fᵢ` over the chart and returns `z_H` with `f(z)`.
pub fn find_common_point_hyper(parts: &[Vec<HPoint>], tol: f64, max_iter: usize) -> Result<HyperMinimum> {
    find_common_point_hyper_with(parts, HyperMinOptions { tol, max_iter, ..HyperMinOptions::default() })
}

pub fn find_common_point_hyper_with(parts: &[Vec<HPoint>], opts: HyperMinOptions) -> Result<HyperMinimum> {
    let model = Model::new(parts)?;
    let k = model.k();
    if k <= opts.exact_max {
        let all: Vec<usize> = (0..k).collect();
        if let Some(c) = best_over_supports(&model, &all) {
            return Ok(finish(c, true));
        }
    }
    subgradient(&model, opts)
}

fn finish(c: Candidate, exact: bool) -> HyperMinimum {
    let mut pairs: Vec<(usize, f64)> = c.active.into_iter().zip(c.weights).filter(|(_, w)| *w > 0.0).collect();
    pairs.sort_by_key(|(i, _)| *i);
    let (active, weights) = pairs.into_iter().unzip();
    HyperMinimum { z: c.w.chart(), point: c.w, residual: c.value, active, weights, exact }
}

/// Subgradient descent with Polyak steps toward an adaptive target level,
/// then a support polish among the near-active pieces.
fn subgradient(model: &Model, opts: HyperMinOptions) -> Result<HyperMinimum> {
    let k = model.k();
    let d = model.s[0].len() - 1;
    // start at the normalized sum of all part centroids
    let mut total = vec![0.0; d + 1];
    for s in &model.s {
        for (t, x) in total.iter_mut().zip(s) {
            *t += x;
        }
    }
    let start = HPoint::normalize(&total)?;
    let mut z: Vec<f64> = start.spatial().to_vec();

    let eval = |z: &[f64]| -> (HPoint, usize, f64) {
        let w = HPoint::from_spatial(z);
        let (i, v) = model.max_value(w.coords());
        (w, i, v)
    };
    let lower = model.alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (_, _, f0) = eval(&z);
    let mut best_z = z.clone();
    let mut best_f = f0;
    let mut delta = (f0 - lower).max(1e-12);
    let mut weights = vec![0.0; k];
    let mut weight_total = 0.0;
    let mut path = 0.0;
    let mut ref_f = f0;
    let path_budget = 10.0 * (1.0 + dot(&z, &z).sqrt());
    let mut iterations = 0;

    for it in 0..opts.max_iter {
        iterations = it + 1;
        let (w, i, f) = eval(&z);
        if f < best_f {
            best_f = f;
            best_z = z.clone();
        }
        if best_f <= ref_f - 0.5 * delta {
            ref_f = best_f;
            path = 0.0;
        } else if path > path_budget {
            delta *= 0.5;
            ref_f = best_f;
            path = 0.0;
            z = best_z.clone();
            continue;
        }
        let g = model.grad(i, &z, w.x0());
        let gg = dot(&g, &g);
        if gg == 0.0 {
            break;
        }
        let target = best_f - delta;
        let step = (f - target) / gg;
        weights[i] += step;
        weight_total += step;
        for (zt, gt) in z.iter_mut().zip(&g) {
            *zt -= step * gt;
        }
        path += step * gg.sqrt();
        if delta <= opts.tol * model.scale(w.coords()) {
            break;
        }
    }

    // polish: enumerate supports among the pieces closest to the maximum
    let wbest = HPoint::from_spatial(&best_z);
    let values = model.values(wbest.coords());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite"));
    order.truncate(opts.exact_max.min(k).max(1));
    if let Some(c) = best_over_supports(model, &order) {
        if c.value <= best_f + 1e-9 * model.scale(c.w.coords()) {
            return Ok(finish(c, false));
        }
    }

    let lambda: Vec<f64> =
        if weight_total > 0.0 { weights.iter().map(|w| w / weight_total).collect() } else { vec![1.0 / k as f64; k] };
    let gap = best_f - model.dual(&lambda);
    if gap <= opts.tol * model.scale(wbest.coords()) {
        let active: Vec<usize> = (0..k).filter(|&i| lambda[i] > 0.0).collect();
        let weights = active.iter().map(|&i| lambda[i]).collect();
        return Ok(HyperMinimum { z: wbest.chart(), point: wbest, residual: best_f, active, weights, exact: false });
    }
    Err(Error::NonConvergence { iterations, best: best_f, gap })
}
