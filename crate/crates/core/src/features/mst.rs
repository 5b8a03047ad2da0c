use crate::instance::{distance, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct MstResult {
    /// `(parent, child, weight)` in the order Prim attached each child.
    pub edges: Vec<(usize, usize, f64)>,
    /// `parent[root] == root`.
    pub parent: Vec<usize>,
    pub depth: Vec<usize>,
    pub root: usize,
}

impl MstResult {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

/// Dense Prim rooted at city 0. Among equal keys the smallest city index is
/// attached first, and a city keeps the earliest parent that reached its key.
pub fn minimum_spanning_tree(points: &[Point]) -> MstResult {
    let n = points.len();
    let root = 0;
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut parent = vec![root; n];
    let mut depth = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return MstResult {
            edges,
            parent,
            depth,
            root,
        };
    }
    key[root] = 0.0;

    for _ in 0..n {
        let mut best = usize::MAX;
        let mut best_key = f64::INFINITY;
        for v in 0..n {
            if !in_tree[v] && (best == usize::MAX || key[v] < best_key) {
                best = v;
                best_key = key[v];
            }
        }
        let u = best;
        in_tree[u] = true;
        if u != root {
            depth[u] = depth[parent[u]] + 1;
            edges.push((parent[u], u, key[u]));
        }
        for v in 0..n {
            if !in_tree[v] {
                let d = distance(points[u], points[v]);
                if d < key[v] {
                    key[v] = d;
                    parent[v] = u;
                }
            }
        }
    }
    MstResult {
        edges,
        parent,
        depth,
        root,
    }
}

pub fn mst_dists_mean(points: &[Point]) -> f64 {
    let mst = minimum_spanning_tree(points);
    if mst.edges.is_empty() {
        return 0.0;
    }
    mst.total_weight() / mst.edges.len() as f64
}

pub fn mst_depth_mean(points: &[Point]) -> f64 {
    let mst = minimum_spanning_tree(points);
    if points.is_empty() {
        return 0.0;
    }
    mst.depth.iter().sum::<usize>() as f64 / points.len() as f64
}
