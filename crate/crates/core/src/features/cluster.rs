//! Density clustering behind `cluster_10pct_mean_distance_to_centroid`.
//!
//! DBSCAN with `eps = 0.1 * sqrt(2)` and `min_pts = 2` (the point itself
//! counts). With `min_pts = 2` every point that has another point within `eps`
//! is a core point, so clusters are the connected components of the `eps`
//! neighbourhood graph and isolated points are noise. Noise points are kept as
//! singleton clusters.

use std::collections::VecDeque;

use crate::instance::{distance, Point};

pub const REACHABILITY_FRACTION: f64 = 0.1;
pub const MIN_POINTS: usize = 2;

pub fn default_eps() -> f64 {
    REACHABILITY_FRACTION * std::f64::consts::SQRT_2
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    /// Cluster id per city. Ids are dense, in order of first appearance.
    pub label: Vec<usize>,
    pub centroids: Vec<Point>,
    /// Whether a city was DBSCAN noise (and therefore a singleton).
    pub noise: Vec<bool>,
}

impl ClusterAssignment {
    pub fn cluster_count(&self) -> usize {
        self.centroids.len()
    }
}

pub fn dbscan(points: &[Point], eps: f64, min_pts: usize) -> ClusterAssignment {
    let n = points.len();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| distance(points[i], points[j]) <= eps)
                .collect()
        })
        .collect();
    let is_core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_pts).collect();

    const UNSET: usize = usize::MAX;
    let mut label = vec![UNSET; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != UNSET || !is_core[start] {
            continue;
        }
        let id = next;
        next += 1;
        label[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            if !is_core[p] {
                continue;
            }
            for &q in &neighbours[p] {
                if label[q] == UNSET {
                    label[q] = id;
                    queue.push_back(q);
                }
            }
        }
    }
    let mut noise = vec![false; n];
    for i in 0..n {
        if label[i] == UNSET {
            noise[i] = true;
            label[i] = next;
            next += 1;
        }
    }

    // Relabel densely in order of first appearance.
    let mut remap = vec![UNSET; next];
    let mut dense = 0;
    for l in label.iter_mut() {
        if remap[*l] == UNSET {
            remap[*l] = dense;
            dense += 1;
        }
        *l = remap[*l];
    }

    let mut sums = vec![(0.0, 0.0, 0usize); dense];
    for (p, &l) in points.iter().zip(&label) {
        sums[l].0 += p.x;
        sums[l].1 += p.y;
        sums[l].2 += 1;
    }
    let centroids = sums
        .into_iter()
        .map(|(sx, sy, c)| Point::new(sx / c as f64, sy / c as f64))
        .collect();
    ClusterAssignment {
        label,
        centroids,
        noise,
    }
}

pub fn cluster_mean_distance_to_centroid(points: &[Point], eps: f64, min_pts: usize) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    // Singletons sit on their own centroid and contribute exactly 0.
    let clusters = dbscan(points, eps, min_pts);
    points
        .iter()
        .zip(&clusters.label)
        .map(|(&p, &l)| distance(p, clusters.centroids[l]))
        .sum::<f64>()
        / points.len() as f64
}

pub fn cluster_10pct_mean_distance_to_centroid(points: &[Point]) -> f64 {
    cluster_mean_distance_to_centroid(points, default_eps(), MIN_POINTS)
}
