//! Uncentered Hardy–Littlewood maximal function over grid-aligned intervals.
//!
//! `φ` is resampled into cell masses on a uniform grid covering its window
//! (extended by zero cells until every query point is covered). For each cell
//! the maximum average over all grid-aligned intervals containing it is found
//! by a sliding-window maximum per interval length, `O(N²)` in total.

use std::collections::VecDeque;

use super::RealFunction;
use crate::error::{Error, Result};

/// Upper bound on the number of grid cells after extension.
pub const MAX_CELLS: usize = 1 << 15;

/// Prefix-sum table and per-cell maxima.
#[derive(Debug, Clone)]
pub struct MaximalTable {
    /// Left end of cell 0.
    pub origin: f64,
    pub step: f64,
    pub prefix: Vec<f64>,
    pub cell_max: Vec<f64>,
}

impl MaximalTable {
    /// Build from cell masses.
    pub fn from_masses(origin: f64, step: f64, masses: &[f64]) -> Self {
        let mut prefix = Vec::with_capacity(masses.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for m in masses {
            acc += m;
            prefix.push(acc);
        }
        let cell_max = sweep(&prefix, step);
        MaximalTable {
            origin,
            step,
            prefix,
            cell_max,
        }
    }

    pub fn cells(&self) -> usize {
        self.cell_max.len()
    }

    /// Average over cells `[i, j)`.
    pub fn average(&self, i: usize, j: usize) -> f64 {
        (self.prefix[j] - self.prefix[i]) / ((j - i) as f64 * self.step)
    }

    /// `Mφ(t)`: the cell maximum, or the larger of the two neighbours when
    /// `t` sits on a grid node.
    pub fn query(&self, t: f64) -> f64 {
        query_with(&self.cell_max, self.origin, self.step, t)
    }
}

fn query_with(cell_max: &[f64], origin: f64, step: f64, t: f64) -> f64 {
    let n = cell_max.len();
    let s = (t - origin) / step;
    let r = s.round();
    if (s - r).abs() < 1e-9 {
        let k = r as i64;
        let left = if k >= 1 && (k as usize) <= n {
            cell_max[k as usize - 1]
        } else {
            0.0
        };
        let right = if k >= 0 && (k as usize) < n {
            cell_max[k as usize]
        } else {
            0.0
        };
        left.max(right)
    } else {
        let k = s.floor();
        if k < 0.0 || k as usize >= n {
            0.0
        } else {
            cell_max[k as usize]
        }
    }
}

/// For each cell `c`: `max_{i ≤ c < j} avg[i, j)`.
fn sweep(prefix: &[f64], step: f64) -> Vec<f64> {
    let n = prefix.len() - 1;
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut avg = vec![0.0; n];
    let mut dq: VecDeque<usize> = VecDeque::with_capacity(n);
    for len in 1..=n {
        let m = n - len + 1;
        for (i, a) in avg.iter_mut().take(m).enumerate() {
            *a = (prefix[i + len] - prefix[i]) / (len as f64 * step);
        }
        // cell c is covered by starts i in [c + 1 - len, c] ∩ [0, m)
        dq.clear();
        let mut next = 0;
        for (c, b) in best.iter_mut().enumerate() {
            while next <= c && next < m {
                while let Some(&back) = dq.back() {
                    if avg[back] <= avg[next] {
                        dq.pop_back();
                    } else {
                        break;
                    }
                }
                dq.push_back(next);
                next += 1;
            }
            while let Some(&front) = dq.front() {
                if front + len <= c {
                    dq.pop_front();
                } else {
                    break;
                }
            }
            if let Some(&front) = dq.front() {
                if avg[front] > *b {
                    *b = avg[front];
                }
            }
        }
    }
    best
}

/// Resample `φ` at resolution `n` cells over its window and build the table.
pub fn build_table(phi: &RealFunction, grid: &[f64], n: usize) -> Result<MaximalTable> {
    let w = phi.window();
    if !w.is_bounded() {
        return Err(Error::Invalid(
            "maximal function needs a bounded support window".into(),
        ));
    }
    if n == 0 {
        return Err(Error::Invalid("resolution must be positive".into()));
    }
    let step = w.len() / n as f64;
    let lo = grid.iter().cloned().fold(w.a, f64::min);
    let hi = grid.iter().cloned().fold(w.b, f64::max);
    let left = ((w.a - lo) / step - 1e-9).ceil().max(0.0) as usize;
    let right = ((hi - w.b) / step - 1e-9).ceil().max(0.0) as usize;
    let total = left + n + right;
    if total > MAX_CELLS {
        return Err(Error::Invalid(format!(
            "query points need {total} cells, above the limit {MAX_CELLS}"
        )));
    }
    let mut masses = vec![0.0; total];
    for k in 0..n {
        let a = w.a + k as f64 * step;
        let b = if k + 1 == n { w.b } else { a + step };
        let m = phi.integral(a, b)?;
        if m < 0.0 {
            return Err(Error::Invalid(format!("negative mass {m} on [{a}, {b}]")));
        }
        masses[left + k] = m;
    }
    Ok(MaximalTable::from_masses(
        w.a - left as f64 * step,
        step,
        &masses,
    ))
}

/// `Mφ(t)` for each `t` in `grid`, at resolution `n` cells over `φ`'s window.
pub fn maximal_function(phi: &RealFunction, grid: &[f64], n: usize) -> Result<Vec<f64>> {
    let t = build_table(phi, grid, n)?;
    Ok(grid.iter().map(|&x| t.query(x)).collect())
}

/// All-pairs scan over the same table; the reference for [`maximal_function`].
pub fn maximal_function_brute(table: &MaximalTable, grid: &[f64]) -> Vec<f64> {
    let n = table.cells();
    let mut cell_max = vec![f64::NEG_INFINITY; n];
    for i in 0..n {
        for j in i + 1..=n {
            let a = table.average(i, j);
            for c in cell_max.iter_mut().take(j).skip(i) {
                if a > *c {
                    *c = a;
                }
            }
        }
    }
    grid.iter()
        .map(|&t| query_with(&cell_max, table.origin, table.step, t))
        .collect()
}
