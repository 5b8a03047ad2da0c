//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use instance_forge::instance::{random_instance, Point, TspInstance};
use instance_forge::RandomSource;
use itertools::Itertools;

pub fn dist(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

pub fn instances(
    seed: u64,
    count: usize,
    sizes: std::ops::RangeInclusive<usize>,
) -> Vec<TspInstance> {
    let mut rng = RandomSource::new(seed);
    let sizes: Vec<usize> = sizes.collect();
    (0..count)
        .map(|k| random_instance(sizes[k % sizes.len()], &mut rng).unwrap())
        .collect()
}

/// Shortest Hamiltonian cycle by enumerating every permutation of cities
/// 1..n with city 0 fixed first.
pub fn brute_force_tsp(inst: &TspInstance) -> f64 {
    let p = inst.cities();
    let n = p.len();
    (1..n)
        .permutations(n - 1)
        .filter(|perm| perm[0] < perm[n - 2])
        .map(|perm| {
            let mut len = dist(p[0], p[perm[0]]) + dist(p[perm[n - 2]], p[0]);
            for w in perm.windows(2) {
                len += dist(p[w[0]], p[w[1]]);
            }
            len
        })
        .fold(f64::INFINITY, f64::min)
}

/// Minimum spanning tree weight over every labelled tree on n vertices,
/// each generated from its Prüfer sequence.
pub fn brute_force_mst_weight(points: &[Point]) -> f64 {
    let n = points.len();
    if n == 2 {
        return dist(points[0], points[1]);
    }
    let mut best = f64::INFINITY;
    for seq in std::iter::repeat_n(0..n, n - 2).multi_cartesian_product() {
        let mut degree = vec![1usize; n];
        for &v in &seq {
            degree[v] += 1;
        }
        let mut weight = 0.0;
        for &v in &seq {
            let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
            weight += dist(points[leaf], points[v]);
            degree[leaf] -= 1;
            degree[v] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
        weight += dist(points[rest[0]], points[rest[1]]);
        best = best.min(weight);
    }
    best
}

/// Largest length reduction available from any single 2-exchange of `order`.
pub fn best_two_exchange_gain(points: &[Point], order: &[usize]) -> f64 {
    let n = order.len();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (points[order[i]], points[order[i + 1]]);
            let (c, d) = (points[order[j]], points[order[(j + 1) % n]]);
            best = best.max(dist(a, b) + dist(c, d) - dist(a, c) - dist(b, d));
        }
    }
    best
}

fn neighbours_by_distance(points: &[Point], c: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..points.len()).filter(|&j| j != c).collect();
    others.sort_by(|&a, &b| {
        dist(points[c], points[a])
            .total_cmp(&dist(points[c], points[b]))
            .then(a.cmp(&b))
    });
    others
}

pub fn reference_nnds_mean(points: &[Point]) -> f64 {
    let per_city: Vec<f64> = (0..points.len())
        .map(|c| dist(points[c], points[neighbours_by_distance(points, c)[0]]))
        .collect();
    per_city.iter().sum::<f64>() / per_city.len() as f64
}

pub fn reference_angle_mean(points: &[Point]) -> f64 {
    let mut sum = 0.0;
    for c in 0..points.len() {
        let nb = neighbours_by_distance(points, c);
        let (a, b) = (points[nb[0]], points[nb[1]]);
        let u = (a.x - points[c].x, a.y - points[c].y);
        let v = (b.x - points[c].x, b.y - points[c].y);
        let norms = u.0.hypot(u.1) * v.0.hypot(v.1);
        if norms > 0.0 {
            sum += ((u.0 * v.0 + u.1 * v.1) / norms).clamp(-1.0, 1.0).acos();
        }
    }
    sum / points.len() as f64
}

pub fn reference_centroid_distance(points: &[Point]) -> f64 {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    points
        .iter()
        .map(|p| (p.x - cx).hypot(p.y - cy))
        .sum::<f64>()
        / n
}

/// Clusters as connected components of the graph joining core points within
/// `eps`, with border points attached to the lowest-index reachable core;
/// computed by repeated relaxation until no label changes.
pub fn reference_cluster_labels(points: &[Point], eps: f64, min_pts: usize) -> Vec<usize> {
    let n = points.len();
    let near = |i: usize, j: usize| dist(points[i], points[j]) <= eps;
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts)
        .collect();
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if core[i] && core[j] && near(i, j) && label[j] < label[i] {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..n {
        if !core[i] {
            if let Some(j) = (0..n).find(|&j| core[j] && near(i, j)) {
                label[i] = label[j];
            }
        }
    }
    label
}

pub fn mean_distance_to_cluster_centroid(points: &[Point], labels: &[usize]) -> f64 {
    let groups = labels.iter().copied().unique();
    let mut total = 0.0;
    for g in groups {
        let members: Vec<Point> = labels
            .iter()
            .zip(points)
            .filter(|(l, _)| **l == g)
            .map(|(_, p)| *p)
            .collect();
        let k = members.len() as f64;
        let (cx, cy) = (
            members.iter().map(|p| p.x).sum::<f64>() / k,
            members.iter().map(|p| p.y).sum::<f64>() / k,
        );
        total += members
            .iter()
            .map(|p| (p.x - cx).hypot(p.y - cy))
            .sum::<f64>();
    }
    total / points.len() as f64
}
