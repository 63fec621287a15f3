//! Single-transposition local search over partitions into transversals.
//!
//! A move exchanges the two points of one color between two parts. Scan
//! order is fixed (colors ascending, part pairs lexicographic) and the first
//! move improving the objective by more than `eps` is taken, after which the
//! scan restarts. Ties are never accepted.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::TransversalPartition;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    fn gain(self, delta: f64) -> f64 {
        match self {
            Direction::Maximize => delta,
            Direction::Minimize => -delta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub partition: TransversalPartition,
    pub objective: f64,
    pub swap_count: usize,
    /// Objective after each accepted swap.
    pub history: Vec<f64>,
}

/// Generic swap search over `colors`. `part_value` scores one transversal,
/// given as one point per color in color order; `same` reports whether two
/// points of a color coincide (such swaps are skipped).
pub fn swap_search<T, V, S>(
    colors: &[Vec<T>],
    init: &TransversalPartition,
    eps: f64,
    direction: Direction,
    part_value: V,
    same: S,
) -> Result<SearchOutcome>
where
    V: Fn(&[&T]) -> f64,
    S: Fn(&T, &T) -> bool,
{
    let r = colors.len();
    let k = colors.first().map_or(0, Vec::len);
    if init.r() != r || init.k() != k {
        return Err(Error::InvalidPartition(format!(
            "initial partition is {}x{}, configuration is {r}x{k}",
            init.r(),
            init.k()
        )));
    }
    TransversalPartition::new(init.assignment.clone())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }

    let mut assignment = init.assignment.clone();
    let part = |asg: &[Vec<usize>], i: usize| -> Vec<&T> { (0..r).map(|j| &colors[j][asg[j][i]]).collect() };
    let mut values: Vec<f64> = (0..k).map(|i| part_value(&part(&assignment, i))).collect();
    let mut swap_count = 0;
    let mut history = Vec::new();

    'scan: loop {
        for n in 0..r {
            for i in 0..k {
                for j in (i + 1)..k {
                    if same(&colors[n][assignment[n][i]], &colors[n][assignment[n][j]]) {
                        continue;
                    }
                    let mut pi = part(&assignment, i);
                    let mut pj = part(&assignment, j);
                    std::mem::swap(&mut pi[n], &mut pj[n]);
                    let vi = part_value(&pi);
                    let vj = part_value(&pj);
                    let delta = (vi + vj) - (values[i] + values[j]);
                    if direction.gain(delta) > eps {
                        let row = &mut assignment[n];
                        row.swap(i, j);
                        values[i] = vi;
                        values[j] = vj;
                        swap_count += 1;
                        history.push(values.iter().sum());
                        continue 'scan;
                    }
                }
            }
        }
        break;
    }

    let partition = TransversalPartition { assignment };
    let objective = (0..k).map(|i| part_value(&part(&partition.assignment, i))).sum();
    Ok(SearchOutcome { partition, objective, swap_count, history })
}

/// Color 0 keeps the identity; every other color gets a seeded shuffle.
pub fn random_partition(k: usize, r: usize, seed: u64) -> TransversalPartition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![(0..k).collect::<Vec<_>>(); r];
    for row in assignment.iter_mut().skip(1) {
        row.shuffle(&mut rng);
    }
    TransversalPartition { assignment }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_partition_is_valid_and_deterministic() {
        let a = random_partition(5, 4, 9);
        assert!(TransversalPartition::new(a.assignment.clone()).is_ok());
        assert_eq!(a, random_partition(5, 4, 9));
        assert_eq!(a.assignment[0], vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn search_maximizes_toy_objective() {
        // two colors of scalars; part value = squared difference
        let colors = vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]];
        let init = TransversalPartition::identity(3, 2);
        let out =
            swap_search(&colors, &init, 1e-12, Direction::Maximize, |p: &[&f64]| (p[0] - p[1]).powi(2), |a, b| a == b)
                .unwrap();
        assert!(out.objective >= 4.0 + 4.0 - 1e-12);
        for w in out.history.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn rejects_nonpositive_eps_and_bad_init() {
        let colors = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        let init = TransversalPartition::identity(2, 2);
        let f = |p: &[&f64]| *p[0];
        assert!(swap_search(&colors, &init, 0.0, Direction::Maximize, f, |a, b| a == b).is_err());
        let bad = TransversalPartition { assignment: vec![vec![0, 0], vec![0, 1]] };
        assert!(swap_search(&colors, &bad, 1e-9, Direction::Maximize, f, |a, b| a == b).is_err());
    }
}
