use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svm::{train, training_accuracy, Dataset, KernelSpec, SmoOptions};
use crate::diversity::EvaluatedInstance;
use crate::error::{Error, Result};
use crate::features::FeatureId;
use crate::rng::RandomSource;

/// RBF parameters when none are given.
pub const DEFAULT_RBF_C: f64 = 100.0;
pub const DEFAULT_RBF_GAMMA: f64 = 2.0;
/// C for linear sweeps when none is given.
pub const DEFAULT_LINEAR_C: f64 = 1.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub smo: SmoOptions,
    /// Score on a held-out fraction instead of the training set.
    pub holdout_fraction: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub features: Vec<FeatureId>,
    /// Instance size of the pooled rows, `None` when sizes were mixed.
    pub n: Option<usize>,
    pub kernel: KernelSpec,
    pub c: f64,
    pub accuracy: Option<f64>,
    pub support_vector_count: Option<usize>,
    pub error: Option<String>,
}

/// Dataset of the given feature columns, easy rows labelled -1 and hard +1.
pub fn build_dataset(
    easy: &[EvaluatedInstance],
    hard: &[EvaluatedInstance],
    features: &[FeatureId],
) -> Result<Dataset> {
    let mut rows = Vec::with_capacity(easy.len() + hard.len());
    let mut labels = Vec::with_capacity(rows.capacity());
    for (set, label) in [(easy, -1.0), (hard, 1.0)] {
        for m in set {
            rows.push(m.features.project(features));
            labels.push(label);
        }
    }
    Dataset::new(
        features.iter().map(|f| f.name().to_string()).collect(),
        rows,
        labels,
    )
}

/// Train and score one cell: training accuracy, or holdout accuracy when
/// `opts.holdout_fraction` is set.
pub fn score_cell(
    ds: &Dataset,
    kernel: KernelSpec,
    c: f64,
    opts: &SweepOptions,
) -> Result<(f64, usize)> {
    match opts.holdout_fraction {
        None => {
            let model = train(ds, kernel, c, opts.smo)?;
            Ok((training_accuracy(&model, ds)?, model.support_vector_count()))
        }
        Some(frac) => {
            if !(0.0 < frac && frac < 1.0) {
                return Err(Error::Config(format!(
                    "holdout fraction must be in (0, 1), got {frac}"
                )));
            }
            let mut rng = RandomSource::new(opts.seed);
            let perm = rng.permutation(ds.len());
            let cut = ((ds.len() as f64) * frac)
                .round()
                .clamp(1.0, ds.len() as f64 - 1.0) as usize;
            let (test, fit) = perm.split_at(cut);
            let model = train(&ds.subset(fit), kernel, c, opts.smo)?;
            Ok((
                training_accuracy(&model, &ds.subset(test))?,
                model.support_vector_count(),
            ))
        }
    }
}

/// Every `size`-subset of the seven features, in lexicographic order of
/// [`FeatureId::ALL`].
pub fn feature_combinations(size: usize) -> Vec<Vec<FeatureId>> {
    FeatureId::ALL.into_iter().combinations(size).collect()
}

/// Trains one SVM per feature subset of each requested size and records its
/// accuracy. Cells that fail to train carry the error instead of a value.
pub fn combination_sweep(
    easy: &[EvaluatedInstance],
    hard: &[EvaluatedInstance],
    sizes: &[usize],
    kernel: KernelSpec,
    c: f64,
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    if easy.is_empty() || hard.is_empty() {
        return Err(Error::SingleClass);
    }
    let n = easy
        .iter()
        .chain(hard)
        .map(|m| m.inst.len())
        .all_equal_value()
        .ok();
    let cells: Vec<Vec<FeatureId>> = sizes
        .iter()
        .flat_map(|&s| feature_combinations(s))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|features| {
            let outcome = build_dataset(easy, hard, &features)
                .and_then(|ds| score_cell(&ds, kernel, c, opts));
            let (accuracy, support_vector_count, error) = match outcome {
                Ok((a, s)) => (Some(a), Some(s), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            SweepRow {
                features,
                n,
                kernel,
                c,
                accuracy,
                support_vector_count,
                error,
            }
        })
        .collect())
}

pub fn mean_accuracy(rows: &[SweepRow], size: usize) -> Option<f64> {
    let acc: Vec<f64> = rows
        .iter()
        .filter(|r| r.features.len() == size)
        .filter_map(|r| r.accuracy)
        .collect();
    (!acc.is_empty()).then(|| acc.iter().sum::<f64>() / acc.len() as f64)
}

pub const SWEEP_HEADER: [&str; 9] = [
    "feature_1",
    "feature_2",
    "feature_3",
    "n",
    "kernel",
    "C",
    "gamma",
    "accuracy",
    "support_vector_count",
];

/// CSV in the layout of [`SWEEP_HEADER`]. Pair rows leave `feature_3` blank,
/// linear rows leave `gamma` blank, pooled sizes print `pooled` and failed
/// cells print `failed` as accuracy.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        let name = |k: usize| {
            r.features
                .get(k)
                .map_or(String::new(), |f| f.name().to_string())
        };
        w.write_record([
            name(0),
            name(1),
            name(2),
            r.n.map_or("pooled".to_string(), |n| n.to_string()),
            r.kernel.name().to_string(),
            r.c.to_string(),
            r.kernel.gamma().map_or(String::new(), |g| g.to_string()),
            r.accuracy.map_or("failed".to_string(), |a| a.to_string()),
            r.support_vector_count
                .map_or(String::new(), |s| s.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;
    use crate::instance::TspInstance;

    fn member(values: [f64; 7]) -> EvaluatedInstance {
        EvaluatedInstance {
            inst: TspInstance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap(),
            features: FeatureVector::from_values(values),
            alpha: 1.0,
        }
    }

    #[test]
    fn combination_counts() {
        assert_eq!(feature_combinations(2).len(), 21);
        assert_eq!(feature_combinations(3).len(), 35);
    }

    #[test]
    fn indistinguishable_rows_capped_by_majority() {
        let easy: Vec<_> = (0..6).map(|_| member([0.5; 7])).collect();
        let hard: Vec<_> = (0..4).map(|_| member([0.5; 7])).collect();
        let rows = combination_sweep(
            &easy,
            &hard,
            &[2, 3],
            KernelSpec::Rbf { gamma: 2.0 },
            100.0,
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 56);
        for r in &rows {
            assert!(r.accuracy.unwrap() <= 0.6 + 1e-12);
            assert_eq!(r.n, Some(3));
        }
    }

    #[test]
    fn single_class_rejected() {
        let easy = vec![member([0.1; 7])];
        assert!(matches!(
            combination_sweep(
                &easy,
                &[],
                &[2],
                KernelSpec::Linear,
                1.0,
                &SweepOptions::default()
            ),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn csv_layout() {
        let easy: Vec<_> = (0..5).map(|i| member([i as f64 * 0.1; 7])).collect();
        let hard: Vec<_> = (0..5).map(|i| member([0.6 + i as f64 * 0.1; 7])).collect();
        let rows = combination_sweep(
            &easy,
            &hard,
            &[2, 3],
            KernelSpec::Rbf { gamma: 2.0 },
            100.0,
            &SweepOptions::default(),
        )
        .unwrap();
        let mut out = Vec::new();
        write_sweep_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "feature_1,feature_2,feature_3,n,kernel,C,gamma,accuracy,support_vector_count"
        );
        assert_eq!(lines.len(), 57);
        assert!(
            lines[1].starts_with("angle_mean,centroid_mean_distance_to_centroid,,3,rbf,100,2,1,")
        );
    }

    #[test]
    fn holdout_option() {
        let easy: Vec<_> = (0..20).map(|i| member([i as f64 * 0.01; 7])).collect();
        let hard: Vec<_> = (0..20)
            .map(|i| member([0.5 + i as f64 * 0.01; 7]))
            .collect();
        let opts = SweepOptions {
            holdout_fraction: Some(0.25),
            ..SweepOptions::default()
        };
        let rows = combination_sweep(&easy, &hard, &[2], KernelSpec::Linear, 1.0, &opts).unwrap();
        assert!(rows.iter().all(|r| r.accuracy == Some(1.0)));
    }
}
