//! Experiment orchestration behind the command-line front end.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{
    combination_sweep, write_sweep_csv, KernelSpec, SweepOptions, SweepRow, DEFAULT_LINEAR_C,
    DEFAULT_RBF_C, DEFAULT_RBF_GAMMA,
};
use crate::diversity::{EvaluatedInstance, WeightSpec};
use crate::ea::{
    self, evolve, feature_header, feature_record, load_run_dir, standard_alpha, EaConfig, Hardness,
    PersistedRun,
};
use crate::error::{Error, Result};
use crate::features::{compute_all, FeatureId};
use crate::instance::{read_instance, Tour};
use crate::io_util::write_atomic;
use crate::rng::RandomSource;
use crate::solvers::{evaluate_ratio, OptOracle};

/// One EA setting of an experiment; every field but `n`, `mode` and the
/// measure falls back to the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    pub mode: Hardness,
    /// Shorthand for a single-feature measure.
    #[serde(default)]
    pub feature: Option<FeatureId>,
    #[serde(default)]
    pub measure: Option<WeightSpec>,
    #[serde(default)]
    pub alpha_threshold: Option<f64>,
    #[serde(default)]
    pub mu: Option<usize>,
    #[serde(default)]
    pub lambda: Option<usize>,
    #[serde(default)]
    pub generations: Option<usize>,
    #[serde(default)]
    pub sigma_small: Option<f64>,
    #[serde(default)]
    pub sigma_large: Option<f64>,
    #[serde(default)]
    pub p_small: Option<f64>,
    #[serde(default)]
    pub oracle: Option<OptOracle>,
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub cities_per_mutation: Option<usize>,
    #[serde(default)]
    pub bootstrap_budget: Option<usize>,
}

impl RunSpec {
    pub fn measure(&self) -> Result<WeightSpec> {
        match (&self.feature, &self.measure) {
            (Some(f), None) => Ok(WeightSpec::single(*f)),
            (None, Some(m)) => Ok(m.clone()),
            (Some(_), Some(_)) => Err(Error::Config(
                "give either `feature` or `measure`, not both".into(),
            )),
            (None, None) => Err(Error::Config(
                "run spec needs `feature` or `measure`".into(),
            )),
        }
    }

    pub fn label(&self) -> Result<String> {
        Ok(self.name.clone().unwrap_or(self.measure()?.label()))
    }

    /// Full EA configuration for `seed`. Oracle precedence: the spec's own,
    /// then the `INSTANCE_FORGE_ORACLE_CMD` environment variable, then exact DP.
    pub fn resolve(&self, seed: u64) -> Result<EaConfig> {
        let alpha = match self.alpha_threshold {
            Some(a) => a,
            None => standard_alpha(self.n, self.mode).ok_or_else(|| {
                Error::Config(format!(
                    "no alpha_threshold given and no standard {} threshold for n = {}",
                    self.mode, self.n
                ))
            })?,
        };
        let mut cfg = EaConfig::new(self.n, self.mode, alpha, self.measure()?, seed);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(
            mu,
            lambda,
            generations,
            sigma_small,
            sigma_large,
            p_small,
            restarts,
            cities_per_mutation,
            bootstrap_budget
        );
        cfg.oracle = match &self.oracle {
            Some(o) => o.clone(),
            None => OptOracle::from_env().unwrap_or_default(),
        };
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_kernel")]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default = "default_combo_sizes")]
    pub combo_sizes: Vec<usize>,
    #[serde(default)]
    pub pool_sizes: bool,
}

fn default_kernel() -> KernelSpec {
    KernelSpec::Rbf {
        gamma: DEFAULT_RBF_GAMMA,
    }
}

fn default_combo_sizes() -> Vec<usize> {
    vec![2, 3]
}

impl SweepSpec {
    pub fn c(&self) -> f64 {
        self.c.unwrap_or(match self.kernel {
            KernelSpec::Linear => DEFAULT_LINEAR_C,
            KernelSpec::Rbf { .. } => DEFAULT_RBF_C,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub runs: Vec<RunSpec>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub parallelism: Option<usize>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::parse(
                source_name,
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_json(&fs::read_to_string(path)?, &path.display().to_string())
    }

    /// Every (run spec x seed) pair with its run directory. Fails on the first
    /// invalid spec or unusable oracle, before anything is run.
    pub fn plan(&self) -> Result<Vec<(PathBuf, EaConfig)>> {
        if self.seeds.is_empty() {
            return Err(Error::Config("`seeds` must list at least one seed".into()));
        }
        let mut plan = Vec::new();
        for (k, spec) in self.runs.iter().enumerate() {
            let label = spec
                .label()
                .map_err(|e| Error::Config(format!("runs[{k}]: {e}")))?;
            for &seed in &self.seeds {
                let cfg = spec
                    .resolve(seed)
                    .map_err(|e| Error::Config(format!("runs[{k}]: {e}")))?;
                cfg.validate_parameters()
                    .map_err(|e| Error::Config(format!("runs[{k}]: {e}")))?;
                cfg.oracle.validate(cfg.n)?;
                let dir = self
                    .output_dir
                    .join(format!("{label}_n{}_{}_s{seed}", cfg.n, cfg.mode));
                plan.push((dir, cfg));
            }
        }
        let mut names: Vec<&PathBuf> = plan.iter().map(|p| &p.0).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config(
                "two runs map to the same directory; give them distinct `name`s".into(),
            ));
        }
        Ok(plan)
    }
}

#[derive(Debug)]
pub struct EvolveSummary {
    pub run_dirs: Vec<PathBuf>,
    pub failures: Vec<(PathBuf, Error)>,
    pub sweep_csv: Option<PathBuf>,
}

/// Executes every planned run on a pool of at most `parallelism` threads.
pub fn cmd_evolve(config: &ExperimentConfig) -> Result<EvolveSummary> {
    let plan = config.plan()?;
    fs::create_dir_all(&config.output_dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(p) = config.parallelism {
        builder = builder.num_threads(p.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<(PathBuf, Result<()>)> = pool.install(|| {
        use rayon::prelude::*;
        plan.par_iter()
            .map(|(dir, cfg)| (dir.clone(), evolve(cfg).and_then(|log| log.write_dir(dir))))
            .collect()
    });

    let mut run_dirs = Vec::new();
    let mut failures = Vec::new();
    for (dir, r) in results {
        match r {
            Ok(()) => run_dirs.push(dir),
            Err(e) => failures.push((dir, e)),
        }
    }

    let mut sweep_csv = None;
    if let (Some(spec), true) = (&config.sweep, failures.is_empty()) {
        let opts = SweepOptions::default();
        let rows = cmd_classify(
            &run_dirs,
            spec.kernel,
            spec.c(),
            &spec.combo_sizes,
            spec.pool_sizes,
            &opts,
        )?;
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf)?;
        let path = config.output_dir.join("sweep.csv");
        write_atomic(&path, &buf)?;
        sweep_csv = Some(path);
    }
    Ok(EvolveSummary {
        run_dirs,
        failures,
        sweep_csv,
    })
}

/// Writes a feature CSV (`id,n,<7 features>`) for each readable instance and
/// reports unreadable ones to `err`. Returns the number of failures.
pub fn cmd_features<W: Write, E: Write>(paths: &[PathBuf], out: W, mut err: E) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(feature_header())?;
    let mut failures = 0;
    for path in paths {
        match read_instance(path) {
            Ok(inst) => {
                let v = compute_all(&inst);
                let id = inst.id().unwrap_or_default().to_string();
                w.write_record(feature_record(&id, inst.len(), &v))?;
            }
            Err(e) => {
                failures += 1;
                writeln!(err, "{}: {e}", path.display())?;
            }
        }
    }
    w.flush()?;
    Ok(failures)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    #[serde(rename = "A")]
    pub heuristic_mean: f64,
    #[serde(rename = "OPT")]
    pub optimum: f64,
    pub alpha: f64,
    pub best_tour: Tour,
    pub best_length: f64,
    pub restarts: usize,
}

pub fn cmd_solve(
    path: &Path,
    restarts: usize,
    oracle: &OptOracle,
    seed: u64,
) -> Result<SolveOutput> {
    if restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    let inst = read_instance(path)?;
    oracle.validate(inst.len())?;
    let approx = evaluate_ratio(&inst, oracle, restarts, &mut RandomSource::new(seed))?;
    Ok(SolveOutput {
        heuristic_mean: approx.heuristic.mean_length,
        optimum: approx.optimum,
        alpha: approx.alpha,
        best_tour: approx.heuristic.best_tour,
        best_length: approx.heuristic.length,
        restarts: approx.heuristic.restarts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeRow {
    pub run: String,
    pub feature: FeatureId,
    pub n: usize,
    pub mode: Hardness,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub median: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn run_name(run: &PersistedRun) -> String {
    run.dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| run.dir.display().to_string())
}

/// Range statistics of each run's final population: one row per run for the
/// feature it diversified, or all seven features with `all_features`.
pub fn cmd_report_ranges(
    dirs: &[PathBuf],
    all_features: bool,
) -> Result<(Vec<RangeRow>, Vec<RawValue>)> {
    let mut rows = Vec::new();
    let mut raw = Vec::new();
    for dir in dirs {
        let run = load_run_dir(dir)?;
        let name = run_name(&run);
        let features: Vec<FeatureId> = if all_features {
            FeatureId::ALL.to_vec()
        } else {
            vec![run.config.measure.primary_feature()]
        };
        for f in features {
            let values: Vec<f64> = run.members.iter().map(|m| m.features.get(f)).collect();
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            rows.push(RangeRow {
                run: name.clone(),
                feature: f,
                n: run.config.n,
                mode: run.config.mode,
                count: values.len(),
                min,
                max,
                range: max - min,
                median: median(&values),
            });
            raw.extend(values.into_iter().enumerate().map(|(i, value)| RawValue {
                run: name.clone(),
                member: i,
                feature: f,
                n: run.config.n,
                mode: run.config.mode,
                value,
            }));
        }
    }
    Ok((rows, raw))
}

/// One feature value of one final-population member, for box plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawValue {
    pub run: String,
    pub member: usize,
    pub feature: FeatureId,
    pub n: usize,
    pub mode: Hardness,
    pub value: f64,
}

pub fn write_range_csv<W: Write>(rows: &[RangeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "run", "feature", "n", "mode", "count", "min", "max", "range", "median",
    ])?;
    for r in rows {
        w.write_record([
            r.run.clone(),
            r.feature.name().to_string(),
            r.n.to_string(),
            r.mode.name().to_string(),
            r.count.to_string(),
            r.min.to_string(),
            r.max.to_string(),
            r.range.to_string(),
            r.median.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_raw_csv<W: Write>(rows: &[RawValue], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["run", "member", "feature", "n", "mode", "value"])?;
    for r in rows {
        w.write_record([
            r.run.clone(),
            r.member.to_string(),
            r.feature.name().to_string(),
            r.n.to_string(),
            r.mode.name().to_string(),
            r.value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Easy and hard final-population members of one group.
pub type LabelledPopulations = (Vec<EvaluatedInstance>, Vec<EvaluatedInstance>);

/// Loads run directories and groups their final populations by instance
/// size (or into a single pool), split into easy and hard by run mode.
pub fn collect_populations(
    dirs: &[PathBuf],
    pool_sizes: bool,
) -> Result<BTreeMap<Option<usize>, LabelledPopulations>> {
    let mut groups: BTreeMap<Option<usize>, (Vec<_>, Vec<_>)> = BTreeMap::new();
    for dir in dirs {
        let run = ea::load_run_dir(dir)?;
        let key = (!pool_sizes).then_some(run.config.n);
        let entry = groups.entry(key).or_default();
        match run.config.mode {
            Hardness::Easy => entry.0.extend(run.members),
            Hardness::Hard => entry.1.extend(run.members),
        }
    }
    Ok(groups)
}

pub fn cmd_classify(
    dirs: &[PathBuf],
    kernel: KernelSpec,
    c: f64,
    combo_sizes: &[usize],
    pool_sizes: bool,
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    if let Some(&s) = combo_sizes
        .iter()
        .find(|&&s| s == 0 || s > FeatureId::ALL.len())
    {
        return Err(Error::Config(format!(
            "combination size must be in 1..=7, got {s}"
        )));
    }
    let groups = collect_populations(dirs, pool_sizes)?;
    if groups.is_empty() {
        return Err(Error::Config("no run directories given".into()));
    }
    let mut rows = Vec::new();
    for (key, (easy, hard)) in groups {
        if easy.is_empty() || hard.is_empty() {
            let which = if easy.is_empty() { "easy" } else { "hard" };
            let size = key.map_or("pooled sizes".to_string(), |n| format!("n = {n}"));
            return Err(Error::Config(format!(
                "no {which} instances for {size}; classification needs both easy and hard runs"
            )));
        }
        let mut cell_rows = combination_sweep(&easy, &hard, combo_sizes, kernel, c, opts)?;
        if pool_sizes {
            for r in &mut cell_rows {
                r.n = None;
            }
        }
        rows.extend(cell_rows);
    }
    Ok(rows)
}
