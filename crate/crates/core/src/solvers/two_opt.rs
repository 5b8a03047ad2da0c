use serde::{Deserialize, Serialize};

use crate::instance::{cycle_length, Tour, TspInstance};
use crate::rng::RandomSource;

/// Minimum length decrease for a 2-exchange to count as an improvement.
pub const IMPROVEMENT_EPS: f64 = 1e-10;

/// First-improvement 2-OPT. Position pairs `(i, j)` with `i < j` are scanned in
/// lexicographic order; the first exchange shortening the tour by more than
/// [`IMPROVEMENT_EPS`] reverses `order[i+1..=j]` and the scan restarts.
pub fn two_opt(inst: &TspInstance, start: &Tour) -> Tour {
    let n = inst.len();
    assert_eq!(start.len(), n, "tour does not match instance");
    let dist = inst.distance_matrix();
    let d = |a: usize, b: usize| dist[a * n + b];
    let mut t = start.order().to_vec();
    if n < 4 {
        return Tour::from_unchecked(t);
    }

    'scan: loop {
        for i in 0..n - 2 {
            let (a, b) = (t[i], t[i + 1]);
            let d_ab = d(a, b);
            // j = n - 1 with i = 0 would pick two adjacent edges.
            let j_end = if i == 0 { n - 1 } else { n };
            for j in (i + 2)..j_end {
                let (c, e) = (t[j], t[(j + 1) % n]);
                let delta = d(a, c) + d(b, e) - d_ab - d(c, e);
                if delta < -IMPROVEMENT_EPS {
                    t[i + 1..=j].reverse();
                    continue 'scan;
                }
            }
        }
        break;
    }
    Tour::from_unchecked(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub best_tour: Tour,
    pub length: f64,
    pub restarts: usize,
    pub mean_length: f64,
    pub lengths: Vec<f64>,
}

/// Runs 2-OPT from `runs` uniformly random permutations and averages the local
/// optimum lengths. Restart `r` draws its start from the `r`-th child of `rng`.
pub fn two_opt_mean_quality(
    inst: &TspInstance,
    runs: usize,
    rng: &mut RandomSource,
) -> SolveReport {
    assert!(runs >= 1, "at least one restart is required");
    let mut best: Option<(Tour, f64)> = None;
    let mut lengths = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut child = rng.split();
        let start = Tour::from_unchecked(child.permutation(inst.len()));
        let tour = two_opt(inst, &start);
        let len = cycle_length(inst.cities(), tour.order());
        lengths.push(len);
        if best.as_ref().is_none_or(|(_, b)| len < *b) {
            best = Some((tour, len));
        }
    }
    let (best_tour, length) = best.expect("runs >= 1");
    let mean_length = lengths.iter().sum::<f64>() / runs as f64;
    SolveReport {
        best_tour,
        length,
        restarts: runs,
        mean_length,
        lengths,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{random_instance, tour_length};

    fn square() -> TspInstance {
        TspInstance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn uncrosses_square() {
        let t = two_opt(&square(), &Tour::new(vec![0, 2, 1, 3]).unwrap());
        assert!((tour_length(&square(), &t).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_start_unchanged() {
        let start = Tour::identity(4);
        assert_eq!(two_opt(&square(), &start), start);
    }

    #[test]
    fn never_worsens() {
        let mut rng = RandomSource::new(4);
        for _ in 0..20 {
            let inst = random_instance(20, &mut rng).unwrap();
            let start = Tour::new(rng.permutation(20)).unwrap();
            let out = two_opt(&inst, &start);
            assert!(Tour::new(out.order().to_vec()).is_ok());
            assert!(
                tour_length(&inst, &out).unwrap() <= tour_length(&inst, &start).unwrap() + 1e-12
            );
        }
    }

    #[test]
    fn triangle_report() {
        let tri = TspInstance::from_coords(&[(0.1, 0.1), (0.9, 0.2), (0.3, 0.8)]).unwrap();
        let r = two_opt_mean_quality(&tri, 5, &mut RandomSource::new(0));
        let cycle = tour_length(&tri, &Tour::identity(3)).unwrap();
        assert!((r.mean_length - cycle).abs() < 1e-12);
        assert!((r.length - cycle).abs() < 1e-12);
        assert_eq!(r.restarts, 5);
    }

    #[test]
    fn convex_octagon_always_hull() {
        let coords: Vec<(f64, f64)> = (0..8)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 8.0;
                (0.5 + 0.4 * a.cos(), 0.5 + 0.4 * a.sin())
            })
            .collect();
        let inst = TspInstance::from_coords(&coords).unwrap();
        let perimeter = tour_length(&inst, &Tour::identity(8)).unwrap();
        let r = two_opt_mean_quality(&inst, 5, &mut RandomSource::new(17));
        assert!((r.mean_length - perimeter).abs() < 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let inst = random_instance(30, &mut RandomSource::new(8)).unwrap();
        let a = two_opt_mean_quality(&inst, 5, &mut RandomSource::new(3));
        let b = two_opt_mean_quality(&inst, 5, &mut RandomSource::new(3));
        assert_eq!(a, b);
        assert!(a.mean_length >= a.length);
    }
}
