//! Rectangular linear-assignment solver plus a brute-force oracle.
//!
//! The solver is the shortest-augmenting-path method on a dense cost
//! matrix. It always matches the smaller side completely, so both
//! orientations (more rows or more columns) are handled.

use thiserror::Error;

/// Sentinel standing in for a forbidden pair. Never returned in results.
pub const FORBIDDEN_COST: f64 = 1e9;

#[derive(Debug, Error)]
pub enum AssignError {
    #[error("cost matrix must be non-empty")]
    EmptyMatrix,
    #[error("cost entry ({0},{1}) is not finite")]
    NonFiniteCost(usize, usize),
    #[error("brute force limited to max dimension {limit}, got {n}x{m}")]
    TooLargeForBruteForce { n: usize, m: usize, limit: usize },
}

/// Dense N x M cost matrix with an optional per-entry forbidden flag.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    n_rows: usize,
    n_cols: usize,
    costs: Vec<f64>,
    forbidden: Vec<bool>,
}

impl CostMatrix {
    /// Build from row-major entries. All entries must be finite.
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<f64>) -> Result<Self, AssignError> {
        assert_eq!(entries.len(), n_rows * n_cols, "entry count must be n_rows * n_cols");
        if n_rows == 0 || n_cols == 0 {
            return Err(AssignError::EmptyMatrix);
        }
        for (i, c) in entries.iter().enumerate() {
            if !c.is_finite() {
                return Err(AssignError::NonFiniteCost(i / n_cols, i % n_cols));
            }
        }
        Ok(CostMatrix {
            n_rows,
            n_cols,
            costs: entries,
            forbidden: vec![false; n_rows * n_cols],
        })
    }

    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, AssignError> {
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for j in 0..n_rows {
            for k in 0..n_cols {
                entries.push(f(j, k));
            }
        }
        CostMatrix::new(n_rows, n_cols, entries)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.costs[row * self.n_cols + col]
    }

    pub fn forbid(&mut self, row: usize, col: usize) {
        self.forbidden[row * self.n_cols + col] = true;
    }

    pub fn is_forbidden(&self, row: usize, col: usize) -> bool {
        self.forbidden[row * self.n_cols + col]
    }

    /// Effective cost with forbidden pairs replaced by the sentinel.
    fn effective(&self, row: usize, col: usize) -> f64 {
        if self.is_forbidden(row, col) {
            FORBIDDEN_COST
        } else {
            self.get(row, col)
        }
    }
}

/// A one-to-one matching of rows to columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Matched `(row, col)` pairs, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of the matched costs, accumulated in row order.
    pub total_cost: f64,
}

impl Assignment {
    fn from_pairs(c: &CostMatrix, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        let total_cost = pairs.iter().map(|&(r, k)| c.get(r, k)).sum();
        Assignment { pairs, total_cost }
    }
}

/// Minimum-cost matching that assigns every element of the smaller side,
/// then drops pairs whose cost exceeds `gate` (and any forbidden pair).
pub fn solve_lap(c: &CostMatrix, gate: f64) -> Result<Assignment, AssignError> {
    if c.n_rows == 0 || c.n_cols == 0 {
        return Err(AssignError::EmptyMatrix);
    }
    let pairs = if c.n_rows <= c.n_cols {
        shortest_augmenting_path(c.n_rows, c.n_cols, |i, j| c.effective(i, j))
    } else {
        shortest_augmenting_path(c.n_cols, c.n_rows, |i, j| c.effective(j, i))
            .into_iter()
            .map(|(k, r)| (r, k))
            .collect::<Vec<_>>()
    };
    let kept: Vec<(usize, usize)> = pairs
        .into_iter()
        .filter(|&(r, k)| !c.is_forbidden(r, k) && c.get(r, k) <= gate)
        .collect();
    Ok(Assignment::from_pairs(c, kept))
}

/// Core shortest-augmenting-path routine. Requires `nr <= nc`; returns one
/// `(row, col)` pair per row. Dual updates keep reduced costs non-negative,
/// so every augmentation is optimal.
fn shortest_augmenting_path(
    nr: usize,
    nc: usize,
    cost: impl Fn(usize, usize) -> f64,
) -> Vec<(usize, usize)> {
    const UNSET: usize = usize::MAX;
    let mut u = vec![0.0f64; nr];
    let mut v = vec![0.0f64; nc];
    let mut col_of_row = vec![UNSET; nr];
    let mut row_of_col = vec![UNSET; nc];

    for cur_row in 0..nr {
        let mut min_val = 0.0f64;
        let mut i = cur_row;
        let mut remaining: Vec<usize> = (0..nc).collect();
        let mut path = vec![UNSET; nc];
        let mut shortest = vec![f64::INFINITY; nc];
        let mut scanned_rows = vec![false; nr];
        let mut scanned_cols: Vec<usize> = Vec::new();
        let sink;

        loop {
            scanned_rows[i] = true;
            let mut lowest = f64::INFINITY;
            let mut index_pos = UNSET;
            for (pos, &jc) in remaining.iter().enumerate() {
                let r = min_val + cost(i, jc) - u[i] - v[jc];
                if r < shortest[jc] {
                    path[jc] = i;
                    shortest[jc] = r;
                }
                if shortest[jc] < lowest {
                    lowest = shortest[jc];
                    index_pos = pos;
                } else if shortest[jc] == lowest
                    && index_pos != UNSET
                    && row_of_col[jc] == UNSET
                    && row_of_col[remaining[index_pos]] != UNSET
                {
                    // prefer unassigned columns on ties so augmentation ends sooner
                    index_pos = pos;
                }
            }
            min_val = lowest;
            debug_assert!(min_val.is_finite(), "assignment infeasible with finite costs");
            let j = remaining.swap_remove(index_pos);
            scanned_cols.push(j);
            if row_of_col[j] == UNSET {
                sink = j;
                break;
            }
            i = row_of_col[j];
        }

        u[cur_row] += min_val;
        for r in 0..nr {
            if scanned_rows[r] && r != cur_row {
                u[r] += min_val - shortest[col_of_row[r]];
            }
        }
        for &jc in &scanned_cols {
            v[jc] -= min_val - shortest[jc];
        }

        // augment along the alternating path back from the sink
        let mut j = sink;
        loop {
            let r = path[j];
            row_of_col[j] = r;
            let prev = col_of_row[r];
            col_of_row[r] = j;
            if r == cur_row {
                break;
            }
            j = prev;
        }
    }

    (0..nr).map(|r| (r, col_of_row[r])).collect()
}

/// Exact optimum by enumerating every complete matching of the smaller
/// side. Intended as a test oracle; limited to dimensions of at most 8.
pub fn brute_force_lap(c: &CostMatrix) -> Result<Assignment, AssignError> {
    const LIMIT: usize = 8;
    if c.n_rows == 0 || c.n_cols == 0 {
        return Err(AssignError::EmptyMatrix);
    }
    if c.n_rows.max(c.n_cols) > LIMIT {
        return Err(AssignError::TooLargeForBruteForce { n: c.n_rows, m: c.n_cols, limit: LIMIT });
    }

    let transpose = c.n_rows > c.n_cols;
    let (small, large) = if transpose {
        (c.n_cols, c.n_rows)
    } else {
        (c.n_rows, c.n_cols)
    };
    let eff = |s: usize, l: usize| {
        if transpose {
            c.effective(l, s)
        } else {
            c.effective(s, l)
        }
    };

    fn recurse(
        s: usize,
        small: usize,
        large: usize,
        eff: &impl Fn(usize, usize) -> f64,
        chosen: &mut Vec<usize>,
        used: &mut Vec<bool>,
        acc: f64,
        best_cost: &mut f64,
        best: &mut Vec<usize>,
    ) {
        if s == small {
            if acc < *best_cost {
                *best_cost = acc;
                *best = chosen.clone();
            }
            return;
        }
        for l in 0..large {
            if !used[l] {
                used[l] = true;
                chosen[s] = l;
                recurse(s + 1, small, large, eff, chosen, used, acc + eff(s, l), best_cost, best);
                used[l] = false;
            }
        }
    }

    let mut best_cost = f64::INFINITY;
    let mut best: Vec<usize> = Vec::new();
    let mut chosen = vec![usize::MAX; small];
    let mut used = vec![false; large];
    recurse(0, small, large, &eff, &mut chosen, &mut used, 0.0, &mut best_cost, &mut best);

    let pairs: Vec<(usize, usize)> = best
        .iter()
        .enumerate()
        .map(|(s, &l)| if transpose { (l, s) } else { (s, l) })
        .filter(|&(r, k)| !c.is_forbidden(r, k))
        .collect();
    Ok(Assignment::from_pairs(c, pairs))
}
