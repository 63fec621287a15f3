//! Convex quadratic minimization over the probability simplex:
//!
//! ```text
//! minimize ½ λᵀHλ − aᵀλ   subject to λ ≥ 0, Σλ = 1
//! ```
//!
//! with `H` symmetric positive semidefinite. Small problems are solved exactly
//! by enumerating supports and solving the KKT system on each; larger ones use
//! accelerated projected gradient followed by a KKT polish on the detected
//! support.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QpOptions {
    /// Largest problem size solved by support enumeration.
    pub exact_max: usize,
    pub max_iter: usize,
    /// Target Frank-Wolfe duality gap for the iterative path.
    pub tol: f64,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self { exact_max: 12, max_iter: 200_000, tol: 1e-13 }
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub weights: Vec<f64>,
    pub value: f64,
    /// Upper bound on `value − optimum`.
    pub gap: f64,
    pub exact: bool,
    pub iterations: usize,
}

pub fn solve(h: &DMatrix<f64>, a: &DVector<f64>, opts: QpOptions) -> Result<QpSolution> {
    let n = a.len();
    if n == 0 {
        return Err(Error::Empty("simplex QP with no variables"));
    }
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.nrows() });
    }
    if n == 1 {
        let value = 0.5 * h[(0, 0)] - a[0];
        return Ok(QpSolution { weights: vec![1.0], value, gap: 0.0, exact: true, iterations: 0 });
    }
    if n <= opts.exact_max {
        if let Some(sol) = solve_by_supports(h, a, all_supports(n)) {
            return Ok(sol);
        }
    }
    let iterative = projected_gradient(h, a, opts);
    let support: Vec<usize> = (0..n).filter(|&i| iterative.weights[i] > 1e-9).collect();
    if let Some(sol) = kkt_on_support(h, a, &support, scale_of(h, a)) {
        if sol.value <= iterative.value + 1e-12 * (1.0 + iterative.value.abs()) {
            return Ok(QpSolution { iterations: iterative.iterations, ..sol });
        }
    }
    if iterative.gap <= opts.tol * scale_of(h, a) {
        Ok(iterative)
    } else {
        Err(Error::NonConvergence { iterations: iterative.iterations, best: iterative.value, gap: iterative.gap })
    }
}

fn objective(h: &DMatrix<f64>, a: &DVector<f64>, w: &DVector<f64>) -> f64 {
    0.5 * w.dot(&(h * w)) - a.dot(w)
}

fn scale_of(h: &DMatrix<f64>, a: &DVector<f64>) -> f64 {
    h.amax().max(a.amax()).max(f64::MIN_POSITIVE)
}

fn all_supports(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n)).map(move |mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
}

fn solve_by_supports<I>(h: &DMatrix<f64>, a: &DVector<f64>, supports: I) -> Option<QpSolution>
where
    I: Iterator<Item = Vec<usize>>,
{
    let scale = scale_of(h, a);
    let mut best: Option<QpSolution> = None;
    for s in supports {
        if let Some(sol) = kkt_on_support(h, a, &s, scale) {
            if best.as_ref().is_none_or(|b| sol.value < b.value) {
                best = Some(sol);
            }
        }
    }
    best
}

/// Solves the equality-constrained problem on `support` and accepts it if it
/// satisfies the full KKT conditions.
fn kkt_on_support(h: &DMatrix<f64>, a: &DVector<f64>, support: &[usize], scale: f64) -> Option<QpSolution> {
    let m = support.len();
    if m == 0 {
        return None;
    }
    let n = a.len();
    let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
    let mut rhs = DVector::<f64>::zeros(m + 1);
    for (p, &i) in support.iter().enumerate() {
        for (q, &j) in support.iter().enumerate() {
            kkt[(p, q)] = h[(i, j)];
        }
        kkt[(p, m)] = 1.0;
        kkt[(m, p)] = 1.0;
        rhs[p] = a[i];
    }
    rhs[m] = 1.0;
    let sol = kkt.clone().lu().solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    // reject near-singular systems whose residual betrays a spurious solve
    let resid = (&kkt * &sol - &rhs).amax();
    if resid > 1e-9 * (1.0 + scale) {
        return None;
    }
    let lambda_tol = 1e-10;
    let mut w = DVector::<f64>::zeros(n);
    for (p, &i) in support.iter().enumerate() {
        if sol[p] < -lambda_tol {
            return None;
        }
        w[i] = sol[p].max(0.0);
    }
    let total = w.sum();
    if total <= 0.0 {
        return None;
    }
    w /= total;
    let mu = sol[m];
    let grad = h * &w - a;
    let grad_tol = 1e-9 * scale;
    for j in 0..n {
        if !support.contains(&j) && grad[j] + mu < -grad_tol {
            return None;
        }
    }
    let value = objective(h, a, &w);
    Some(QpSolution { weights: w.iter().copied().collect(), value, gap: 0.0, exact: true, iterations: 0 })
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_to_simplex(v: &mut [f64]) {
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|x, y| y.partial_cmp(x).expect("finite values"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (idx, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (idx + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

fn fw_gap(grad: &DVector<f64>, w: &DVector<f64>) -> f64 {
    grad.dot(w) - grad.min()
}

fn projected_gradient(h: &DMatrix<f64>, a: &DVector<f64>, opts: QpOptions) -> QpSolution {
    let n = a.len();
    // Gershgorin bound on the largest eigenvalue
    let lip =
        (0..n).map(|i| h.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let step = 1.0 / lip;
    let target = opts.tol * scale_of(h, a);

    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best = x.clone();
    let mut best_val = objective(h, a, &x);
    let mut best_gap = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        let grad_y = h * &y - a;
        let mut next: Vec<f64> = (&y - step * grad_y).iter().copied().collect();
        project_to_simplex(&mut next);
        let next = DVector::from_vec(next);
        let val = objective(h, a, &next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if val > objective(h, a, &x) {
            // adaptive restart
            y = x.clone();
            t = 1.0;
            continue;
        }
        y = &next + ((t - 1.0) / t_next) * (&next - &x);
        x = next;
        t = t_next;
        if val <= best_val {
            best_val = val;
            best = x.clone();
        }
        if it % 16 == 0 {
            let gap = fw_gap(&(h * &x - a), &x);
            best_gap = best_gap.min(gap);
            if gap <= target {
                break;
            }
        }
    }
    let gap = fw_gap(&(h * &best - a), &best).min(best_gap);
    QpSolution { weights: best.iter().copied().collect(), value: best_val, gap, exact: false, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force reference: dense grid over the 2-simplex.
    fn grid_min(h: &DMatrix<f64>, a: &DVector<f64>) -> f64 {
        let steps = 600;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let w = DVector::from_vec(vec![
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    (steps - i - j) as f64 / steps as f64,
                ]);
                best = best.min(objective(h, a, &w));
            }
        }
        best
    }

    fn gram(points: &[[f64; 2]]) -> DMatrix<f64> {
        let n = points.len();
        DMatrix::from_fn(n, n, |i, j| points[i][0] * points[j][0] + points[i][1] * points[j][1])
    }

    #[test]
    fn projection_lands_on_simplex() {
        let mut v = vec![0.3, 2.0, -1.0, 0.4];
        project_to_simplex(&mut v);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|&x| x >= 0.0));
        let mut inside = vec![0.2, 0.3, 0.5];
        project_to_simplex(&mut inside);
        assert_eq!(inside, vec![0.2, 0.3, 0.5]);
    }

    #[test]
    fn min_norm_point_of_segment() {
        // nearest point of conv{(1,0),(1,1)} to the origin is (1,0)
        let h = gram(&[[1.0, 0.0], [1.0, 1.0]]);
        let a = DVector::zeros(2);
        let sol = solve(&h, &a, QpOptions::default()).unwrap();
        assert!(sol.exact);
        assert!((sol.weights[0] - 1.0).abs() < 1e-12);
        assert!((2.0 * sol.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_grid_search() {
        let h = gram(&[[1.0, 2.0], [-0.5, 0.3], [2.0, -1.0]]);
        let a = DVector::from_vec(vec![0.4, -0.2, 1.1]);
        let sol = solve(&h, &a, QpOptions::default()).unwrap();
        let grid = grid_min(&h, &a);
        assert!(sol.value <= grid + 1e-12);
        assert!(grid - sol.value < 1e-4);
    }

    #[test]
    fn iterative_path_agrees_with_exact() {
        let pts: Vec<[f64; 2]> = (0..9)
            .map(|i| {
                let t = i as f64 * 0.7;
                [t.cos() * (1.0 + 0.1 * i as f64), t.sin() - 0.3]
            })
            .collect();
        let h = gram(&pts);
        let a = DVector::from_fn(9, |i, _| 0.05 * i as f64);
        let exact = solve(&h, &a, QpOptions::default()).unwrap();
        let iter = solve(&h, &a, QpOptions { exact_max: 0, ..QpOptions::default() }).unwrap();
        assert!(exact.exact);
        assert!((exact.value - iter.value).abs() < 1e-10, "{} vs {}", exact.value, iter.value);
    }

    #[test]
    fn single_variable() {
        let h = DMatrix::from_element(1, 1, 4.0);
        let a = DVector::from_element(1, 1.0);
        let sol = solve(&h, &a, QpOptions::default()).unwrap();
        assert_eq!(sol.weights, vec![1.0]);
        assert_eq!(sol.value, 1.0);
    }
}
