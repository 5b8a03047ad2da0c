//! Soft-margin C-SVM trained with SMO.
//!
//! The dual `min 1/2 a'Qa - e'a` s.t. `0 <= a_i <= C`, `y'a = 0` with
//! `Q_ij = y_i y_j k(x_i, x_j)` is solved by repeatedly optimising the
//! maximal violating pair (first-order working set selection), stopping once
//! the pair's KKT gap drops below `tol`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    /// `k(u, v) = exp(-gamma * |u - v|^2)`.
    Rbf {
        gamma: f64,
    },
}

impl KernelSpec {
    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => u.iter().zip(v).map(|(a, b)| a * b).sum(),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Rbf { .. } => "rbf",
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            KernelSpec::Linear => None,
            KernelSpec::Rbf { gamma } => Some(gamma),
        }
    }
}

/// Binary dataset with labels in {-1, +1} (easy = -1, hard = +1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        let dim = columns.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: i });
            }
        }
        if let Some(l) = labels.iter().find(|&&l| l != 1.0 && l != -1.0) {
            return Err(Error::Config(format!("labels must be -1 or +1, got {l}")));
        }
        Ok(Self {
            columns,
            rows,
            labels,
        })
    }

    /// Unnamed columns `x0, x1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        Self::new((0..dim).map(|i| format!("x{i}")).collect(), rows, labels)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn has_both_classes(&self) -> bool {
        self.labels.iter().any(|&l| l > 0.0) && self.labels.iter().any(|&l| l < 0.0)
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Per-column zero-mean unit-variance scaling fitted on training data.
/// Constant columns are only centred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>], dim: usize) -> Self {
        let n = rows.len().max(1) as f64;
        let mean: Vec<f64> = (0..dim)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let scale = (0..dim)
            .map(|j| {
                let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                if sd > 1e-12 * mean[j].abs().max(1.0) {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, scale }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Standardise columns before training.
    pub standardize: bool,
}

impl Default for SmoOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iter: 1_000_000,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    /// Standardised coordinates.
    pub x: Vec<f64>,
    pub alpha: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub iterations: usize,
    /// Maximal KKT violation `m(a) - M(a)` at termination.
    pub kkt_violation: f64,
    pub converged: bool,
    pub n_train: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub c: f64,
    pub standardizer: Option<Standardizer>,
    pub support: Vec<SupportVector>,
    pub bias: f64,
    pub meta: TrainingMeta,
}

impl SvmModel {
    pub fn dim(&self) -> Option<usize> {
        self.standardizer
            .as_ref()
            .map(|s| s.mean.len())
            .or_else(|| self.support.first().map(|s| s.x.len()))
    }

    pub fn support_vector_count(&self) -> usize {
        self.support.len()
    }

    /// `sum_i a_i y_i k(x_i, x) + b` for a raw (unscaled) row.
    pub fn decision_value(&self, row: &[f64]) -> Result<f64> {
        if let Some(d) = self.dim() {
            if d != row.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
        }
        let x = match &self.standardizer {
            Some(s) => s.apply(row),
            None => row.to_vec(),
        };
        Ok(self
            .support
            .iter()
            .map(|sv| sv.alpha * sv.y * self.kernel.eval(&sv.x, &x))
            .sum::<f64>()
            + self.bias)
    }

    /// Label (+1 when the decision value is non-negative) and decision value.
    pub fn predict(&self, row: &[f64]) -> Result<(f64, f64)> {
        let f = self.decision_value(row)?;
        Ok((if f >= 0.0 { 1.0 } else { -1.0 }, f))
    }
}

pub fn predict(model: &SvmModel, row: &[f64]) -> Result<(f64, f64)> {
    model.predict(row)
}

pub fn training_accuracy(model: &SvmModel, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0usize;
    for (row, &y) in ds.rows.iter().zip(&ds.labels) {
        if model.predict(row)?.0 == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / ds.len() as f64)
}

const TAU: f64 = 1e-12;

pub fn train(ds: &Dataset, kernel: KernelSpec, c: f64, opts: SmoOptions) -> Result<SvmModel> {
    if ds.len() < 2 || !ds.has_both_classes() {
        return Err(Error::SingleClass);
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("C must be positive, got {c}")));
    }
    if let KernelSpec::Rbf { gamma } = kernel {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
    }
    let standardizer = opts
        .standardize
        .then(|| Standardizer::fit(&ds.rows, ds.dim()));
    let x: Vec<Vec<f64>> = match &standardizer {
        Some(s) => ds.rows.iter().map(|r| s.apply(r)).collect(),
        None => ds.rows.clone(),
    };
    let y = &ds.labels;
    let n = x.len();

    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = y[i] * y[j] * kernel.eval(&x[i], &x[j]);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let mut iterations = 0;
    let mut violation;
    loop {
        let mut i = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > g_max {
                g_max = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < g_min {
                g_min = v;
                j = t;
            }
        }
        violation = if i == usize::MAX || j == usize::MAX {
            0.0
        } else {
            g_max - g_min
        };
        if violation < opts.tol || iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        let (qii, qjj, qij) = (q[i * n + i], q[j * n + j], q[i * n + j]);
        if y[i] != y[j] {
            let mut quad = qii + qjj + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = qii + qjj - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - ai_old, alpha[j] - aj_old);
        for t in 0..n {
            grad[t] += q[t * n + i] * di + q[t * n + j] * dj;
        }
    }

    // Offset from free vectors, or the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    };

    let support = (0..n)
        .filter(|&t| alpha[t] > 0.0)
        .map(|t| SupportVector {
            x: x[t].clone(),
            alpha: alpha[t],
            y: y[t],
        })
        .collect();
    Ok(SvmModel {
        kernel,
        c,
        standardizer,
        support,
        bias: -rho,
        meta: TrainingMeta {
            iterations,
            kkt_violation: violation,
            converged: violation < opts.tol,
            n_train: n,
        },
    })
}
