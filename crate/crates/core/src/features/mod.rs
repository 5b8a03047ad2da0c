//! The seven instance features and the geometry they are built from.

mod cluster;
mod hull;
mod mst;

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{distance, Point, TspInstance};

pub use cluster::{
    cluster_10pct_mean_distance_to_centroid, cluster_mean_distance_to_centroid, dbscan,
    default_eps, ClusterAssignment, MIN_POINTS, REACHABILITY_FRACTION,
};
pub use hull::{convex_hull, convex_hull_area, polygon_area};
pub use mst::{minimum_spanning_tree, mst_depth_mean, mst_dists_mean, MstResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureId {
    AngleMean,
    CentroidMeanDistanceToCentroid,
    ChullArea,
    #[serde(rename = "cluster_10pct_mean_distance_to_centroid")]
    Cluster10pctMeanDistanceToCentroid,
    MstDepthMean,
    NndsMean,
    MstDistsMean,
}

impl FeatureId {
    pub const ALL: [FeatureId; 7] = [
        FeatureId::AngleMean,
        FeatureId::CentroidMeanDistanceToCentroid,
        FeatureId::ChullArea,
        FeatureId::Cluster10pctMeanDistanceToCentroid,
        FeatureId::MstDepthMean,
        FeatureId::NndsMean,
        FeatureId::MstDistsMean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureId::AngleMean => "angle_mean",
            FeatureId::CentroidMeanDistanceToCentroid => "centroid_mean_distance_to_centroid",
            FeatureId::ChullArea => "chull_area",
            FeatureId::Cluster10pctMeanDistanceToCentroid => {
                "cluster_10pct_mean_distance_to_centroid"
            }
            FeatureId::MstDepthMean => "mst_depth_mean",
            FeatureId::NndsMean => "nnds_mean",
            FeatureId::MstDistsMean => "mst_dists_mean",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Upper bound `R` on the feature over instances of `n` cities in the unit
    /// square. Only `mst_depth_mean` depends on `n`.
    pub fn bound(self, n: usize) -> f64 {
        match self {
            FeatureId::AngleMean => PI,
            FeatureId::ChullArea => 1.0,
            FeatureId::MstDepthMean => n.saturating_sub(1) as f64,
            FeatureId::CentroidMeanDistanceToCentroid
            | FeatureId::Cluster10pctMeanDistanceToCentroid
            | FeatureId::NndsMean
            | FeatureId::MstDistsMean => SQRT_2,
        }
    }
}

pub fn feature_bound(f: FeatureId, n: usize) -> f64 {
    f.bound(n)
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature {s:?}")))
    }
}

/// Values of all seven features, indexed by [`FeatureId`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "BTreeMap<FeatureId, f64>",
    try_from = "BTreeMap<FeatureId, f64>"
)]
pub struct FeatureVector {
    values: [f64; 7],
    degenerate: Vec<FeatureId>,
}

impl FeatureVector {
    pub fn from_values(values: [f64; 7]) -> Self {
        Self {
            values,
            degenerate: Vec::new(),
        }
    }

    pub fn get(&self, f: FeatureId) -> f64 {
        self.values[f.index()]
    }

    pub fn values(&self) -> &[f64; 7] {
        &self.values
    }

    pub fn project(&self, ids: &[FeatureId]) -> Vec<f64> {
        ids.iter().map(|&f| self.get(f)).collect()
    }

    /// Features whose computation hit a degenerate configuration, such as
    /// coincident cities in `angle_mean`.
    pub fn degenerate(&self) -> &[FeatureId] {
        &self.degenerate
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, f64)> + '_ {
        FeatureId::ALL.into_iter().map(|f| (f, self.get(f)))
    }
}

impl From<FeatureVector> for BTreeMap<FeatureId, f64> {
    fn from(v: FeatureVector) -> Self {
        v.iter().collect()
    }
}

impl TryFrom<BTreeMap<FeatureId, f64>> for FeatureVector {
    type Error = String;

    fn try_from(m: BTreeMap<FeatureId, f64>) -> std::result::Result<Self, String> {
        let mut values = [0.0; 7];
        for f in FeatureId::ALL {
            values[f.index()] = *m.get(&f).ok_or_else(|| format!("missing feature {f}"))?;
        }
        Ok(Self::from_values(values))
    }
}

pub fn nnds_mean(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let total: f64 = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| distance(points[i], points[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / n as f64
}

/// Two nearest other cities of `c`, ties broken by smaller index.
fn two_nearest(points: &[Point], c: usize) -> (usize, usize) {
    let mut best = [(f64::INFINITY, usize::MAX); 2];
    for (j, &p) in points.iter().enumerate() {
        if j == c {
            continue;
        }
        let d = distance(points[c], p);
        if d < best[0].0 {
            best[1] = best[0];
            best[0] = (d, j);
        } else if d < best[1].0 {
            best[1] = (d, j);
        }
    }
    (best[0].1, best[1].1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleMean {
    pub value: f64,
    /// Cities whose angle was undefined (a nearest neighbour coincides with
    /// the city) and was scored as 0.
    pub degenerate: usize,
}

pub fn angle_mean_checked(points: &[Point]) -> AngleMean {
    let n = points.len();
    if n < 3 {
        return AngleMean {
            value: 0.0,
            degenerate: 0,
        };
    }
    let mut degenerate = 0;
    let mut total = 0.0;
    for c in 0..n {
        let (a, b) = two_nearest(points, c);
        let (pc, pa, pb) = (points[c], points[a], points[b]);
        let (ux, uy) = (pa.x - pc.x, pa.y - pc.y);
        let (vx, vy) = (pb.x - pc.x, pb.y - pc.y);
        let nu = (ux * ux + uy * uy).sqrt();
        let nv = (vx * vx + vy * vy).sqrt();
        if nu == 0.0 || nv == 0.0 {
            degenerate += 1;
            continue;
        }
        let cos = ((ux * vx + uy * vy) / (nu * nv)).clamp(-1.0, 1.0);
        total += cos.acos();
    }
    AngleMean {
        value: total / n as f64,
        degenerate,
    }
}

pub fn angle_mean(points: &[Point]) -> f64 {
    angle_mean_checked(points).value
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

pub fn centroid_mean_distance_to_centroid(points: &[Point]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let c = centroid(points);
    points.iter().map(|&p| distance(p, c)).sum::<f64>() / points.len() as f64
}

pub fn compute(points: &[Point], f: FeatureId) -> f64 {
    match f {
        FeatureId::AngleMean => angle_mean(points),
        FeatureId::CentroidMeanDistanceToCentroid => centroid_mean_distance_to_centroid(points),
        FeatureId::ChullArea => convex_hull_area(points),
        FeatureId::Cluster10pctMeanDistanceToCentroid => {
            cluster_10pct_mean_distance_to_centroid(points)
        }
        FeatureId::MstDepthMean => mst_depth_mean(points),
        FeatureId::NndsMean => nnds_mean(points),
        FeatureId::MstDistsMean => mst_dists_mean(points),
    }
}

pub fn compute_all(inst: &TspInstance) -> FeatureVector {
    let points = inst.cities();
    let mut values = [0.0; 7];
    let mut degenerate = Vec::new();
    for f in FeatureId::ALL {
        values[f.index()] = match f {
            FeatureId::AngleMean => {
                let a = angle_mean_checked(points);
                if a.degenerate > 0 {
                    degenerate.push(f);
                }
                a.value
            }
            // One MST serves both MST features.
            FeatureId::MstDepthMean | FeatureId::MstDistsMean => continue,
            _ => compute(points, f),
        };
    }
    let mst = minimum_spanning_tree(points);
    values[FeatureId::MstDistsMean.index()] = mst.total_weight() / mst.edges.len() as f64;
    values[FeatureId::MstDepthMean.index()] =
        mst.depth.iter().sum::<usize>() as f64 / points.len() as f64;
    FeatureVector { values, degenerate }
}
