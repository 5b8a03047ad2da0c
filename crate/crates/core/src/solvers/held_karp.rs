use crate::error::{Error, Result};
use crate::instance::TspInstance;

pub const DEFAULT_MAX_EXACT: usize = 16;

/// Held-Karp dynamic programme over subsets of cities `1..n`, anchored at
/// city 0. `O(n^2 2^n)` time, `O(n 2^n)` memory.
pub fn exact_optimum(inst: &TspInstance, max_exact: usize) -> Result<f64> {
    let n = inst.len();
    if n > max_exact {
        return Err(Error::Capacity { n, max_exact });
    }
    let dist = inst.distance_matrix();
    let d = |a: usize, b: usize| dist[a * n + b];
    let m = n - 1;
    let full = (1usize << m) - 1;

    // best[mask * m + j]: shortest path from city 0 through `mask`, ending at
    // city j + 1 (bit j of mask set).
    let mut best = vec![f64::INFINITY; (full + 1) * m];
    for j in 0..m {
        best[(1 << j) * m + j] = d(0, j + 1);
    }
    for mask in 1..=full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = best[mask * m + j];
            if cur == f64::INFINITY {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = (mask | (1 << k)) * m + k;
                let cand = cur + d(j + 1, k + 1);
                if cand < best[next] {
                    best[next] = cand;
                }
            }
        }
    }
    Ok((0..m)
        .map(|j| best[full * m + j] + d(j + 1, 0))
        .fold(f64::INFINITY, f64::min))
}
