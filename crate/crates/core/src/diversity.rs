//! Feature-based diversity contributions and greedy pruning.
//!
//! For one feature, members are sorted by value. An interior member scores the
//! product of its gaps to the next smaller and next larger value. A member at
//! the minimum or maximum scores `R^2` when nobody shares its value, and any
//! member whose value is shared scores 0. The weighted variant sums per-feature
//! contributions after dividing each by its population maximum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureId, FeatureVector};
use crate::instance::TspInstance;
use crate::rng::RandomSource;

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedInstance {
    pub inst: TspInstance,
    pub features: FeatureVector,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<EvaluatedInstance>,
    pub capacity: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn values(&self, f: FeatureId) -> Vec<f64> {
        self.members.iter().map(|m| m.features.get(f)).collect()
    }
}

/// Features and non-negative weights driving the diversity measure. A single
/// feature with weight 1 is the plain single-feature measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightSpec", into = "RawWeightSpec")]
pub struct WeightSpec {
    features: Vec<FeatureId>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawWeightSpec {
    features: Vec<FeatureId>,
    weights: Vec<f64>,
}

impl TryFrom<RawWeightSpec> for WeightSpec {
    type Error = Error;

    fn try_from(r: RawWeightSpec) -> Result<Self> {
        WeightSpec::new(r.features, r.weights)
    }
}

impl From<WeightSpec> for RawWeightSpec {
    fn from(w: WeightSpec) -> Self {
        RawWeightSpec {
            features: w.features,
            weights: w.weights,
        }
    }
}

impl WeightSpec {
    pub fn new(features: Vec<FeatureId>, weights: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Config(
                "weight spec needs at least one feature".into(),
            ));
        }
        if features.len() != weights.len() {
            return Err(Error::Config(format!(
                "{} features but {} weights",
                features.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config(
                "weights must be finite and non-negative".into(),
            ));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::Config("at least one weight must be positive".into()));
        }
        Ok(Self { features, weights })
    }

    pub fn single(f: FeatureId) -> Self {
        Self {
            features: vec![f],
            weights: vec![1.0],
        }
    }

    pub fn features(&self) -> &[FeatureId] {
        &self.features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_single(&self) -> bool {
        self.features.len() == 1
    }

    /// Feature whose range the run log tracks: the first one of largest weight.
    pub fn primary_feature(&self) -> FeatureId {
        let mut best = 0;
        for (i, &w) in self.weights.iter().enumerate() {
            if w > self.weights[best] {
                best = i;
            }
        }
        self.features[best]
    }

    pub fn label(&self) -> String {
        if self.is_single() {
            return self.features[0].name().to_string();
        }
        self.features
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| format!("{f}x{w}"))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Weight distributions over three features used for the weighted runs.
pub const STANDARD_WEIGHT_DISTRIBUTIONS: [[f64; 3]; 7] = [
    [1.0, 1.0, 1.0],
    [2.0, 1.0, 1.0],
    [1.0, 2.0, 1.0],
    [1.0, 1.0, 2.0],
    [2.0, 2.0, 1.0],
    [2.0, 1.0, 2.0],
    [1.0, 2.0, 2.0],
];

pub fn single_feature_contributions(values: &[f64], bound: f64) -> Vec<f64> {
    let k = values.len();
    let mut contrib = vec![0.0; k];
    if k == 0 {
        return contrib;
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let min = values[order[0]];
    let max = values[order[k - 1]];
    let r2 = bound * bound;

    for pos in 0..k {
        let i = order[pos];
        let v = values[i];
        let shared = (pos > 0 && values[order[pos - 1]] == v)
            || (pos + 1 < k && values[order[pos + 1]] == v);
        contrib[i] = if shared {
            0.0
        } else if v == min || v == max {
            r2
        } else {
            (v - values[order[pos - 1]]) * (values[order[pos + 1]] - v)
        };
    }
    contrib
}

/// `columns[f][m]` is the value of feature `f` for member `m`.
pub fn weighted_contributions_from_columns(
    columns: &[Vec<f64>],
    weights: &[f64],
    bounds: &[f64],
) -> Vec<f64> {
    assert_eq!(columns.len(), weights.len());
    assert_eq!(columns.len(), bounds.len());
    let k = columns.first().map_or(0, Vec::len);
    let mut total = vec![0.0; k];
    for ((col, &w), &r) in columns.iter().zip(weights).zip(bounds) {
        if w == 0.0 {
            continue;
        }
        let c = single_feature_contributions(col, r);
        let max = c.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            continue;
        }
        for (t, ci) in total.iter_mut().zip(&c) {
            *t += w * (ci / max);
        }
    }
    total
}

/// Per-member diversity under `spec`. Single-feature specs give the raw
/// contributions; multi-feature specs the weighted normalised sum.
pub fn contributions(rows: &[&FeatureVector], spec: &WeightSpec, n: usize) -> Vec<f64> {
    if spec.is_single() {
        let f = spec.features[0];
        let values: Vec<f64> = rows.iter().map(|r| r.get(f)).collect();
        return single_feature_contributions(&values, f.bound(n));
    }
    weighted_contributions(rows, spec, n)
}

pub fn weighted_contributions(rows: &[&FeatureVector], spec: &WeightSpec, n: usize) -> Vec<f64> {
    let columns: Vec<Vec<f64>> = spec
        .features
        .iter()
        .map(|&f| rows.iter().map(|r| r.get(f)).collect())
        .collect();
    let bounds: Vec<f64> = spec.features.iter().map(|f| f.bound(n)).collect();
    weighted_contributions_from_columns(&columns, &spec.weights, &bounds)
}

/// Removes members one at a time until `mu` remain. Each step recomputes
/// `score` on the surviving indices and drops a uniformly random member among
/// those with minimum score. Returns the surviving indices in original order.
pub fn prune_by<F>(
    len: usize,
    mu: usize,
    rng: &mut RandomSource,
    mut score: F,
) -> Result<Vec<usize>>
where
    F: FnMut(&[usize]) -> Vec<f64>,
{
    if mu < 2 {
        return Err(Error::Config(format!(
            "population size mu must be at least 2, got {mu}"
        )));
    }
    let mut alive: Vec<usize> = (0..len).collect();
    while alive.len() > mu {
        let c = score(&alive);
        debug_assert_eq!(c.len(), alive.len());
        let min = c.iter().copied().fold(f64::INFINITY, f64::min);
        let ties: Vec<usize> = (0..c.len()).filter(|&i| c[i] == min).collect();
        let victim = ties[rng.uniform_int(ties.len())];
        alive.remove(victim);
    }
    Ok(alive)
}

/// Prunes raw single-feature values; returns surviving indices.
pub fn prune_values(
    values: &[f64],
    bound: f64,
    mu: usize,
    rng: &mut RandomSource,
) -> Result<Vec<usize>> {
    prune_by(values.len(), mu, rng, |alive| {
        let v: Vec<f64> = alive.iter().map(|&i| values[i]).collect();
        single_feature_contributions(&v, bound)
    })
}

pub fn prune(
    population: Population,
    spec: &WeightSpec,
    n: usize,
    rng: &mut RandomSource,
) -> Result<Population> {
    let Population { members, capacity } = population;
    if members.len() < capacity {
        return Err(Error::Config(format!(
            "cannot prune {} members to {capacity}",
            members.len()
        )));
    }
    let survivors = prune_by(members.len(), capacity, rng, |alive| {
        let rows: Vec<&FeatureVector> = alive.iter().map(|&i| &members[i].features).collect();
        contributions(&rows, spec, n)
    })?;
    let mut keep = vec![false; members.len()];
    for i in survivors {
        keep[i] = true;
    }
    let members = members
        .into_iter()
        .zip(keep)
        .filter_map(|(m, k)| k.then_some(m))
        .collect();
    Ok(Population { members, capacity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn hand_examples() {
        assert!(close(
            &single_feature_contributions(&[0.1, 0.3, 0.6], 1.0),
            &[1.0, 0.06, 1.0]
        ));
        assert_eq!(
            single_feature_contributions(&[0.2, 0.2, 0.5], 1.0),
            vec![0.0, 0.0, 1.0]
        );
        assert_eq!(single_feature_contributions(&[0.4], 2.0), vec![4.0]);
        // Order of members does not matter.
        assert!(close(
            &single_feature_contributions(&[0.6, 0.1, 0.3], 1.0),
            &[1.0, 1.0, 0.06]
        ));
    }

    #[test]
    fn interior_duplicates_score_zero() {
        let c = single_feature_contributions(&[0.1, 0.4, 0.4, 0.9], 1.0);
        assert_eq!(c, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn prune_removes_smallest_gap_product() {
        let mut rng = RandomSource::new(0);
        let kept = prune_values(&[0.1, 0.2, 0.25, 0.6], 1.0, 3, &mut rng).unwrap();
        assert_eq!(kept, vec![0, 2, 3]);
    }

    #[test]
    fn prune_duplicates_uniformly() {
        let mut removed = [0usize; 2];
        for seed in 0..400 {
            let kept =
                prune_values(&[0.3, 0.3, 0.9], 1.0, 2, &mut RandomSource::new(seed)).unwrap();
            assert!(kept.contains(&2));
            removed[if kept.contains(&0) { 1 } else { 0 }] += 1;
        }
        // Binomial(400, 1/2): 4 sigma is 40.
        assert!(removed[0].abs_diff(200) < 40, "{removed:?}");
    }

    #[test]
    fn prune_rejects_tiny_mu() {
        assert!(prune_values(&[0.1, 0.2, 0.3], 1.0, 1, &mut RandomSource::new(0)).is_err());
    }

    #[test]
    fn weight_spec_validation() {
        assert!(WeightSpec::new(vec![], vec![]).is_err());
        assert!(WeightSpec::new(vec![FeatureId::ChullArea], vec![0.0]).is_err());
        assert!(WeightSpec::new(vec![FeatureId::ChullArea], vec![1.0, 2.0]).is_err());
        assert!(WeightSpec::new(vec![FeatureId::ChullArea], vec![-1.0]).is_err());
        let w: Result<WeightSpec, _> =
            serde_json::from_str(r#"{"features":["chull_area"],"weights":[0]}"#);
        assert!(w.is_err());
        for dist in STANDARD_WEIGHT_DISTRIBUTIONS {
            let ws = WeightSpec::new(
                vec![
                    FeatureId::MstDistsMean,
                    FeatureId::NndsMean,
                    FeatureId::ChullArea,
                ],
                dist.to_vec(),
            )
            .unwrap();
            assert_eq!(ws.features().len(), 3);
        }
    }

    #[test]
    fn degenerate_weights_match_single_feature_ranking() {
        let f1 = vec![0.1, 0.35, 0.2, 0.8, 0.5];
        let f2 = vec![0.9, 0.1, 0.3, 0.3, 0.7];
        let f3 = vec![0.5, 0.5, 0.5, 0.2, 0.1];
        let w =
            weighted_contributions_from_columns(&[f1.clone(), f2, f3], &[1.0, 0.0, 0.0], &[1.0; 3]);
        let s = single_feature_contributions(&f1, 1.0);
        let argsort = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
            idx
        };
        assert_eq!(argsort(&w), argsort(&s));
    }

    #[test]
    fn identical_layouts_double() {
        let f = vec![0.1, 0.35, 0.2, 0.8, 0.5];
        let w =
            weighted_contributions_from_columns(&[f.clone(), f.clone()], &[1.0, 1.0], &[1.0, 1.0]);
        let s = single_feature_contributions(&f, 1.0);
        let max = s.iter().copied().fold(0.0, f64::max);
        for (a, b) in w.iter().zip(&s) {
            assert!((a - 2.0 * b / max).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_max_feature_is_dropped() {
        let w = weighted_contributions_from_columns(
            &[vec![0.5, 0.5, 0.5], vec![0.1, 0.2, 0.4]],
            &[1.0, 1.0],
            &[1.0, 1.0],
        );
        let s = single_feature_contributions(&[0.1, 0.2, 0.4], 1.0);
        assert!(close(&w, &s.iter().map(|c| c / 1.0).collect::<Vec<_>>()));
    }

    proptest! {
        #[test]
        fn contributions_bounded(values in prop::collection::vec(0.0..1.0f64, 1..40)) {
            for c in single_feature_contributions(&values, 1.0) {
                prop_assert!((0.0..=1.0).contains(&c));
            }
        }

        #[test]
        fn translation_keeps_interior_contributions(values in prop::collection::vec(0.0..0.5f64, 3..30), shift in 0.0..0.5f64) {
            let a = single_feature_contributions(&values, 1.0);
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let b = single_feature_contributions(&shifted, 1.0);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn prune_keeps_range(values in prop::collection::vec(0.0..1.0f64, 3..40), mu_frac in 0.0..1.0f64, seed in any::<u64>()) {
            let mu = 2 + ((values.len() - 2) as f64 * mu_frac) as usize;
            let kept = prune_values(&values, 1.0, mu, &mut RandomSource::new(seed)).unwrap();
            prop_assert_eq!(kept.len(), mu);
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let kmin = kept.iter().map(|&i| values[i]).fold(f64::INFINITY, f64::min);
            let kmax = kept.iter().map(|&i| values[i]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(min, kmin);
            prop_assert_eq!(max, kmax);
        }
    }
}
