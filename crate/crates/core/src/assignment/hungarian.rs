use super::{AssignError, BinAssignment, CostModel};

/// Minimum-cost matching of every row to a distinct column, `rows <= cols`.
///
/// `cost[r * cols + c]` is the cost of pairing row `r` with column `c`.
/// Returns the column matched to each row. Shortest augmenting paths with
/// potentials, `O(rows^2 * cols)`.
pub fn min_cost_matching(cost: &[f64], rows: usize, cols: usize) -> Vec<usize> {
    assert!(rows <= cols, "matching needs rows <= cols");
    assert_eq!(cost.len(), rows * cols);
    // 1-based internally; column 0 is a virtual source.
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for r in 1..=rows {
        owner[0] = r;
        let mut c0 = 0;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[c0] = true;
            let r0 = owner[c0];
            let mut delta = f64::INFINITY;
            let mut c1 = 0;
            for c in 1..=cols {
                if used[c] {
                    continue;
                }
                let reduced = cost[(r0 - 1) * cols + (c - 1)] - u[r0] - v[c];
                if reduced < minv[c] {
                    minv[c] = reduced;
                    way[c] = c0;
                }
                if minv[c] < delta {
                    delta = minv[c];
                    c1 = c;
                }
            }
            for c in 0..=cols {
                if used[c] {
                    u[owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            c0 = c1;
            if owner[c0] == 0 {
                break;
            }
        }
        loop {
            let c1 = way[c0];
            owner[c0] = owner[c1];
            c0 = c1;
            if c0 == 0 {
                break;
            }
        }
    }
    let mut matched = vec![0; rows];
    for c in 1..=cols {
        if owner[c] != 0 {
            matched[owner[c] - 1] = c - 1;
        }
    }
    matched
}

/// Optimal one-to-one assignment when there are as many bins as types.
pub fn assign_hungarian(cost: &CostModel) -> Result<BinAssignment, AssignError> {
    let (n_b, n_c) = (cost.n_bins(), cost.n_types());
    if n_b != n_c {
        return Err(AssignError::WrongSolver(format!(
            "the Hungarian solver needs n_b = n_c, got n_b = {n_b}, n_c = {n_c}; \
             use greedy, ga or exact instead"
        )));
    }
    let matrix = type_by_bin(cost);
    let bin_of_type = min_cost_matching(&matrix, n_c, n_b);
    let mut types = vec![0; n_b];
    for (j, &i) in bin_of_type.iter().enumerate() {
        types[i] = j;
    }
    BinAssignment::new(types, n_c)
}

/// `w` laid out with types as rows.
pub(crate) fn type_by_bin(cost: &CostModel) -> Vec<f64> {
    let (n_b, n_c) = (cost.n_bins(), cost.n_types());
    let mut m = Vec::with_capacity(n_b * n_c);
    for j in 0..n_c {
        m.extend((0..n_b).map(|i| cost.w(i, j)));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::TypeDistribution;

    fn brute(cost: &[f64], n: usize) -> f64 {
        fn go(row: usize, n: usize, used: &mut Vec<bool>, acc: f64, cost: &[f64], best: &mut f64) {
            if row == n {
                *best = best.min(acc);
                return;
            }
            for c in 0..n {
                if !used[c] {
                    used[c] = true;
                    go(row + 1, n, used, acc + cost[row * n + c], cost, best);
                    used[c] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        go(0, n, &mut vec![false; n], 0.0, cost, &mut best);
        best
    }

    #[test]
    fn forced_diagonal() {
        let m = [1.0, 9.0, 9.0, 9.0, 1.0, 9.0, 9.0, 9.0, 1.0];
        assert_eq!(min_cost_matching(&m, 3, 3), vec![0, 1, 2]);
        assert_eq!(min_cost_matching(&[3.0], 1, 1), vec![0]);
    }

    #[test]
    fn rectangular_picks_cheapest_columns() {
        let m = [5.0, 1.0, 7.0, 2.0, 4.0, 3.0, 0.5, 6.0];
        let r = min_cost_matching(&m, 2, 4);
        assert_eq!(r, vec![1, 2]);
    }

    #[test]
    fn matches_brute_force_on_small_matrices() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 100) as f64
        };
        for n in 1..=6 {
            for _ in 0..20 {
                let m: Vec<f64> = (0..n * n).map(|_| next()).collect();
                let r = min_cost_matching(&m, n, n);
                let got: f64 = r.iter().enumerate().map(|(i, &c)| m[i * n + c]).sum();
                assert_eq!(got, brute(&m, n));
            }
        }
    }

    #[test]
    fn wrong_shape_is_redirected() {
        let d = TypeDistribution::uniform(1, 2);
        let c = CostModel::new(&[vec![1.0, 2.0, 3.0]], &d).unwrap();
        assert!(matches!(assign_hungarian(&c), Err(AssignError::WrongSolver(_))));
    }
}
