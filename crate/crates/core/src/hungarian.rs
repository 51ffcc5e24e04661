//! Rectangular minimum-cost assignment (Hungarian method, shortest augmenting
//! path formulation with row/column potentials). O(n^2 m) for n <= m.

/// Dense row-major cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// # Panics
    ///
    /// If `data.len() != rows * cols` or any entry is not finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost matrix shape mismatch");
        assert!(data.iter().all(|c| c.is_finite()), "cost matrix must be finite");
        CostMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CostMatrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Total cost of an assignment as returned by [`minimize`].
    pub fn total(&self, assignment: &[Option<usize>]) -> f64 {
        assignment
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| self.get(r, c)))
            .sum()
    }
}

/// Assigns `min(rows, cols)` rows to distinct columns minimizing total cost.
///
/// Returns, for every row, the assigned column (`None` only when there are more
/// rows than columns).
pub fn minimize(cost: &CostMatrix) -> Vec<Option<usize>> {
    if cost.rows == 0 || cost.cols == 0 {
        return vec![None; cost.rows];
    }
    if cost.rows <= cost.cols {
        solve(cost.rows, cost.cols, |r, c| cost.get(r, c))
    } else {
        let by_col = solve(cost.cols, cost.rows, |r, c| cost.get(c, r));
        let mut out = vec![None; cost.rows];
        for (c, r) in by_col.into_iter().enumerate() {
            if let Some(r) = r {
                out[r] = Some(c);
            }
        }
        out
    }
}

/// Requires `n <= m`. Indices inside are 1-based with slot 0 as the virtual
/// root of the alternating tree.
fn solve(n: usize, m: usize, a: impl Fn(usize, usize) -> f64) -> Vec<Option<usize>> {
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    // owner[j] = row currently assigned to column j (0 = free).
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0f64; m + 1];
    let mut used = vec![false; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut out = vec![None; n];
    for j in 1..=m {
        if owner[j] != 0 {
            out[owner[j] - 1] = Some(j - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Exhaustive minimum over all injective maps from the smaller side.
    fn brute_force(cost: &CostMatrix) -> f64 {
        fn rec(
            cost: &CostMatrix,
            transpose: bool,
            row: usize,
            n: usize,
            m: usize,
            used: &mut Vec<bool>,
            acc: f64,
            best: &mut f64,
        ) {
            if row == n {
                *best = best.min(acc);
                return;
            }
            for c in 0..m {
                if used[c] {
                    continue;
                }
                used[c] = true;
                let v = if transpose { cost.get(c, row) } else { cost.get(row, c) };
                rec(cost, transpose, row + 1, n, m, used, acc + v, best);
                used[c] = false;
            }
        }
        let transpose = cost.rows() > cost.cols();
        let (n, m) = if transpose {
            (cost.cols(), cost.rows())
        } else {
            (cost.rows(), cost.cols())
        };
        let mut best = f64::INFINITY;
        rec(cost, transpose, 0, n, m, &mut vec![false; m], 0.0, &mut best);
        if n == 0 {
            0.0
        } else {
            best
        }
    }

    fn check_valid(cost: &CostMatrix, assignment: &[Option<usize>]) {
        assert_eq!(assignment.len(), cost.rows());
        let assigned: Vec<usize> = assignment.iter().flatten().copied().collect();
        assert_eq!(assigned.len(), cost.rows().min(cost.cols()));
        let mut dedup = assigned.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), assigned.len(), "column assigned twice");
    }

    #[test]
    fn small_known_instance() {
        let cost = CostMatrix::new(3, 3, vec![4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0]);
        let a = minimize(&cost);
        check_valid(&cost, &a);
        assert_eq!(cost.total(&a), 5.0);
    }

    #[test]
    fn prefers_swap_over_greedy() {
        // Greedy takes (0,0)=0.1 then is forced into (1,1)=1.0; optimum is 0.2+0.3.
        let cost = CostMatrix::new(2, 2, vec![0.1, 0.2, 0.3, 1.0]);
        assert_eq!(minimize(&cost), vec![Some(1), Some(0)]);
    }

    #[test]
    fn empty_and_rectangular() {
        assert_eq!(minimize(&CostMatrix::new(0, 3, vec![])), Vec::<Option<usize>>::new());
        assert_eq!(minimize(&CostMatrix::new(2, 0, vec![])), vec![None, None]);
        let tall = CostMatrix::new(3, 1, vec![0.9, 0.1, 0.5]);
        assert_eq!(minimize(&tall), vec![None, Some(0), None]);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..2000 {
            let rows = rng.random_range(0..=6usize);
            let cols = rng.random_range(0..=6usize);
            // Coarse values force plenty of ties.
            let coarse = rng.random_bool(0.5);
            let cost = CostMatrix::from_fn(rows, cols, |_, _| {
                if coarse {
                    rng.random_range(0..4u32) as f64 * 0.25
                } else {
                    rng.random_range(0.0..1.0)
                }
            });
            let a = minimize(&cost);
            check_valid(&cost, &a);
            assert!((cost.total(&a) - brute_force(&cost)).abs() <= 1e-12);
        }
    }
}
