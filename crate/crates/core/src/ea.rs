//! The (mu + lambda) evolutionary algorithm that maximises feature diversity
//! among instances meeting an approximation-ratio threshold.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diversity::{prune, EvaluatedInstance, Population, WeightSpec};
use crate::error::{Error, Result};
use crate::features::{compute_all, FeatureId, FeatureVector};
use crate::instance::{random_instance, read_instance, write_instance, Point, TspInstance};
use crate::io_util::write_atomic;
use crate::rng::RandomSource;
use crate::solvers::{evaluate_ratio, OptOracle, DEFAULT_RESTARTS};

pub const DEFAULT_MU: usize = 30;
pub const DEFAULT_LAMBDA: usize = 5;
pub const DEFAULT_GENERATIONS: usize = 10_000;
pub const DEFAULT_SIGMA_SMALL: f64 = 0.025;
pub const DEFAULT_SIGMA_LARGE: f64 = 0.05;
pub const DEFAULT_P_SMALL: f64 = 0.9;
pub const DEFAULT_BOOTSTRAP_BUDGET: usize = 50_000;

const BOOTSTRAP_STREAM: u64 = 0;
const SELECTION_STREAM: u64 = 1;
const OFFSPRING_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardness {
    Easy,
    Hard,
}

impl Hardness {
    /// Classifier label: easy = -1, hard = +1.
    pub fn label(self) -> f64 {
        match self {
            Hardness::Easy => -1.0,
            Hardness::Hard => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Hardness::Easy => "easy",
            Hardness::Hard => "hard",
        }
    }
}

impl fmt::Display for Hardness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Hardness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "easy" => Ok(Hardness::Easy),
            "hard" => Ok(Hardness::Hard),
            _ => Err(Error::Config(format!(
                "mode must be easy or hard, got {s:?}"
            ))),
        }
    }
}

/// Standard approximation thresholds for n in {25, 50, 100}.
pub fn standard_alpha(n: usize, mode: Hardness) -> Option<f64> {
    match (mode, n) {
        (Hardness::Easy, 25 | 50) => Some(1.0),
        (Hardness::Easy, 100) => Some(1.03),
        (Hardness::Hard, 25) => Some(1.15),
        (Hardness::Hard, 50) => Some(1.18),
        (Hardness::Hard, 100) => Some(1.2),
        _ => None,
    }
}

fn default_mu() -> usize {
    DEFAULT_MU
}
fn default_lambda() -> usize {
    DEFAULT_LAMBDA
}
fn default_generations() -> usize {
    DEFAULT_GENERATIONS
}
fn default_sigma_small() -> f64 {
    DEFAULT_SIGMA_SMALL
}
fn default_sigma_large() -> f64 {
    DEFAULT_SIGMA_LARGE
}
fn default_p_small() -> f64 {
    DEFAULT_P_SMALL
}
fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}
fn default_cities_per_mutation() -> usize {
    1
}
fn default_bootstrap_budget() -> usize {
    DEFAULT_BOOTSTRAP_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EaConfig {
    pub n: usize,
    #[serde(default = "default_mu")]
    pub mu: usize,
    #[serde(default = "default_lambda")]
    pub lambda: usize,
    pub mode: Hardness,
    pub alpha_threshold: f64,
    #[serde(default = "default_generations")]
    pub generations: usize,
    pub measure: WeightSpec,
    #[serde(default = "default_sigma_small")]
    pub sigma_small: f64,
    #[serde(default = "default_sigma_large")]
    pub sigma_large: f64,
    #[serde(default = "default_p_small")]
    pub p_small: f64,
    #[serde(default)]
    pub oracle: OptOracle,
    pub seed: u64,
    /// 2-OPT restarts averaged into `A(I)`.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_cities_per_mutation")]
    pub cities_per_mutation: usize,
    /// Ratio evaluations allowed while building the initial population.
    #[serde(default = "default_bootstrap_budget")]
    pub bootstrap_budget: usize,
}

impl EaConfig {
    /// Default parameter settings with an explicit threshold.
    pub fn new(
        n: usize,
        mode: Hardness,
        alpha_threshold: f64,
        measure: WeightSpec,
        seed: u64,
    ) -> Self {
        Self {
            n,
            mu: DEFAULT_MU,
            lambda: DEFAULT_LAMBDA,
            mode,
            alpha_threshold,
            generations: DEFAULT_GENERATIONS,
            measure,
            sigma_small: DEFAULT_SIGMA_SMALL,
            sigma_large: DEFAULT_SIGMA_LARGE,
            p_small: DEFAULT_P_SMALL,
            oracle: OptOracle::default(),
            seed,
            restarts: DEFAULT_RESTARTS,
            cities_per_mutation: 1,
            bootstrap_budget: DEFAULT_BOOTSTRAP_BUDGET,
        }
    }

    /// Default settings for n in {25, 50, 100}, threshold included.
    pub fn standard(n: usize, mode: Hardness, measure: WeightSpec, seed: u64) -> Result<Self> {
        let alpha = standard_alpha(n, mode)
            .ok_or_else(|| Error::Config(format!("no standard {mode} threshold for n = {n}")))?;
        Ok(Self::new(n, mode, alpha, measure, seed))
    }

    /// Checks parameters only; see [`EaConfig::validate`] for the oracle.
    pub fn validate_parameters(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < TspInstance::MIN_CITIES {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.mu < 2 {
            return bad(format!("mu must be at least 2, got {}", self.mu));
        }
        if self.lambda == 0 || self.lambda > self.mu {
            return bad(format!("lambda must be in 1..=mu, got {}", self.lambda));
        }
        if !(self.p_small > 0.0 && self.p_small <= 1.0) {
            return bad(format!("p_small must be in (0, 1], got {}", self.p_small));
        }
        if !(self.sigma_small > 0.0 && self.sigma_large > 0.0) {
            return bad("mutation sigmas must be positive".into());
        }
        if self.alpha_threshold.is_nan() || self.alpha_threshold < 1.0 {
            return bad(format!(
                "alpha_threshold must be >= 1, got {}",
                self.alpha_threshold
            ));
        }
        if self.restarts == 0 || self.cities_per_mutation == 0 {
            return bad("restarts and cities_per_mutation must be positive".into());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_parameters()?;
        self.oracle.validate(self.n)
    }

    pub fn accepts(&self, alpha: f64) -> bool {
        match self.mode {
            Hardness::Easy => alpha <= self.alpha_threshold,
            Hardness::Hard => alpha >= self.alpha_threshold,
        }
    }
}

/// Gaussian perturbation of one uniformly chosen city (or
/// `cities_per_mutation` draws). Each axis keeps the parent's coordinate when
/// the proposal leaves [0, 1]. Returns the child and the sigma used.
pub fn mutate_with_sigma(
    inst: &TspInstance,
    cfg: &EaConfig,
    rng: &mut RandomSource,
) -> (TspInstance, f64) {
    let sigma = if rng.bernoulli(cfg.p_small) {
        cfg.sigma_small
    } else {
        cfg.sigma_large
    };
    let mut child = inst.clone();
    for _ in 0..cfg.cities_per_mutation {
        let i = rng.uniform_int(child.len());
        let p = child.city(i);
        let x = p.x + sigma * rng.standard_normal();
        let y = p.y + sigma * rng.standard_normal();
        let q = Point::new(
            if (0.0..=1.0).contains(&x) { x } else { p.x },
            if (0.0..=1.0).contains(&y) { y } else { p.y },
        );
        child = child.with_city(i, q);
    }
    (child, sigma)
}

pub fn mutate(inst: &TspInstance, cfg: &EaConfig, rng: &mut RandomSource) -> TspInstance {
    mutate_with_sigma(inst, cfg, rng).0
}

pub fn evaluate(
    inst: TspInstance,
    cfg: &EaConfig,
    rng: &mut RandomSource,
) -> Result<EvaluatedInstance> {
    let approx = evaluate_ratio(&inst, &cfg.oracle, cfg.restarts, rng)?;
    let features = compute_all(&inst);
    Ok(EvaluatedInstance {
        inst,
        features,
        alpha: approx.alpha,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bootstrap {
    pub population: Population,
    pub evaluations: usize,
}

/// Builds the initial population of `mu` copies of one feasible instance.
/// Easy mode samples random instances until one meets the threshold; hard mode
/// hill-climbs a random instance on the ratio, accepting non-decreasing moves.
pub fn bootstrap(cfg: &EaConfig) -> Result<Bootstrap> {
    cfg.validate_parameters()?;
    let mut rng = RandomSource::derive(cfg.seed, &[BOOTSTRAP_STREAM]);
    let mut evaluations = 0;
    let mut best_alpha = match cfg.mode {
        Hardness::Easy => f64::INFINITY,
        Hardness::Hard => 0.0,
    };

    let seedling = match cfg.mode {
        Hardness::Easy => loop {
            if evaluations >= cfg.bootstrap_budget {
                return Err(Error::BootstrapBudget {
                    evaluations,
                    best_alpha,
                });
            }
            let inst = random_instance(cfg.n, &mut rng)?;
            let ev = evaluate(inst, cfg, &mut rng.split())?;
            evaluations += 1;
            best_alpha = best_alpha.min(ev.alpha);
            if cfg.accepts(ev.alpha) {
                break ev;
            }
        },
        Hardness::Hard => {
            let inst = random_instance(cfg.n, &mut rng)?;
            let mut current = evaluate(inst, cfg, &mut rng.split())?;
            evaluations += 1;
            while !cfg.accepts(current.alpha) {
                if evaluations >= cfg.bootstrap_budget {
                    return Err(Error::BootstrapBudget {
                        evaluations,
                        best_alpha: current.alpha,
                    });
                }
                let child = mutate(&current.inst, cfg, &mut rng);
                let ev = evaluate(child, cfg, &mut rng.split())?;
                evaluations += 1;
                if ev.alpha >= current.alpha {
                    current = ev;
                }
            }
            current
        }
    };
    Ok(Bootstrap {
        population: Population {
            members: vec![seedling; cfg.mu],
            capacity: cfg.mu,
        },
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub feat_min: f64,
    pub feat_max: f64,
    pub range: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub accepted: usize,
    pub removed: usize,
}

impl GenerationRecord {
    fn snapshot(
        generation: usize,
        pop: &Population,
        feature: FeatureId,
        accepted: usize,
        removed: usize,
    ) -> Self {
        let fold = |it: &mut dyn Iterator<Item = f64>| {
            it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
        };
        let (feat_min, feat_max) = fold(&mut pop.members.iter().map(|m| m.features.get(feature)));
        let (alpha_min, alpha_max) = fold(&mut pop.members.iter().map(|m| m.alpha));
        Self {
            generation,
            feat_min,
            feat_max,
            range: feat_max - feat_min,
            alpha_min,
            alpha_max,
            accepted,
            removed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub config: EaConfig,
    /// Feature whose range the records track.
    pub tracked_feature: FeatureId,
    /// Generation 0 is the bootstrap population.
    pub generations: Vec<GenerationRecord>,
    pub initial: Population,
    pub population: Population,
    pub bootstrap_evaluations: usize,
}

/// Runs the EA for `cfg.generations` generations.
///
/// Each generation picks `lambda` distinct parents uniformly, mutates each
/// once, keeps offspring meeting the threshold and prunes back to `mu` by
/// minimum diversity contribution. Offspring `k` of generation `g` draws from
/// a stream keyed by `(seed, g, k)`, so offspring are evaluated in parallel
/// without affecting the result.
pub fn evolve(cfg: &EaConfig) -> Result<RunLog> {
    cfg.validate()?;
    let Bootstrap {
        population: initial,
        evaluations,
    } = bootstrap(cfg)?;
    let tracked = cfg.measure.primary_feature();
    let mut pop = initial.clone();
    let mut rng = RandomSource::derive(cfg.seed, &[SELECTION_STREAM]);
    let mut generations = Vec::with_capacity(cfg.generations + 1);
    generations.push(GenerationRecord::snapshot(0, &pop, tracked, 0, 0));

    for g in 1..=cfg.generations {
        let parents = rng.sample_indices(pop.len(), cfg.lambda);
        let offspring = parents
            .par_iter()
            .enumerate()
            .map(|(k, &p)| {
                let mut orng =
                    RandomSource::derive(cfg.seed, &[OFFSPRING_STREAM, g as u64, k as u64]);
                let child = mutate(&pop.members[p].inst, cfg, &mut orng);
                let ev = evaluate(child, cfg, &mut orng)?;
                Ok(cfg.accepts(ev.alpha).then_some(ev))
            })
            .collect::<Result<Vec<_>>>()?;

        let before = pop.len();
        pop.members.extend(offspring.into_iter().flatten());
        let accepted = pop.len() - before;
        let removed = pop.len().saturating_sub(cfg.mu);
        if removed > 0 {
            pop = prune(pop, &cfg.measure, cfg.n, &mut rng)?;
        }
        generations.push(GenerationRecord::snapshot(
            g, &pop, tracked, accepted, removed,
        ));
    }

    Ok(RunLog {
        config: cfg.clone(),
        tracked_feature: tracked,
        generations,
        initial,
        population: pop,
        bootstrap_evaluations: evaluations,
    })
}

pub const CONFIG_FILE: &str = "config.json";
pub const GENERATIONS_FILE: &str = "generations.csv";
pub const POPULATION_DIR: &str = "population";
pub const FEATURES_FILE: &str = "features.csv";

/// Writes `generations` as CSV with the columns
/// `gen,feat_min,feat_max,range,alpha_min,alpha_max,accepted,removed`.
pub fn generations_csv(records: &[GenerationRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "gen",
        "feat_min",
        "feat_max",
        "range",
        "alpha_min",
        "alpha_max",
        "accepted",
        "removed",
    ])?;
    for r in records {
        w.serialize((
            r.generation,
            r.feat_min,
            r.feat_max,
            r.range,
            r.alpha_min,
            r.alpha_max,
            r.accepted,
            r.removed,
        ))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Header of per-instance feature tables: `id,n,<7 features>`.
pub fn feature_header() -> Vec<String> {
    let mut h = vec!["id".to_string(), "n".to_string()];
    h.extend(FeatureId::ALL.iter().map(|f| f.name().to_string()));
    h
}

pub fn feature_record(id: &str, n: usize, v: &FeatureVector) -> Vec<String> {
    let mut r = vec![id.to_string(), n.to_string()];
    r.extend(v.values().iter().map(|x| x.to_string()));
    r
}

impl RunLog {
    /// Persists `config.json`, `generations.csv` and `population/` (one
    /// native instance file per member plus `features.csv` with an `alpha`
    /// column).
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join(POPULATION_DIR))?;
        write_atomic(
            &dir.join(CONFIG_FILE),
            serde_json::to_string_pretty(&self.config)?.as_bytes(),
        )?;
        write_atomic(
            &dir.join(GENERATIONS_FILE),
            &generations_csv(&self.generations)?,
        )?;

        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = feature_header();
        header.push("alpha".into());
        w.write_record(&header)?;
        for (i, m) in self.population.members.iter().enumerate() {
            let id = member_id(i);
            let mut inst = m.inst.clone();
            inst.set_id(Some(id.clone()));
            write_instance(&inst, &dir.join(POPULATION_DIR).join(format!("{id}.json")))?;
            let mut rec = feature_record(&id, m.inst.len(), &m.features);
            rec.push(m.alpha.to_string());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        write_atomic(&dir.join(POPULATION_DIR).join(FEATURES_FILE), &bytes)
    }
}

fn member_id(i: usize) -> String {
    format!("member_{i:03}")
}

/// A run directory read back from disk.
#[derive(Debug, Clone)]
pub struct PersistedRun {
    pub dir: PathBuf,
    pub config: EaConfig,
    pub members: Vec<EvaluatedInstance>,
}

pub fn load_run_dir(dir: &Path) -> Result<PersistedRun> {
    let config_path = dir.join(CONFIG_FILE);
    let features_path = dir.join(POPULATION_DIR).join(FEATURES_FILE);
    for p in [&config_path, &features_path] {
        if !p.exists() {
            return Err(Error::MissingFile(p.clone()));
        }
    }
    let text = fs::read_to_string(&config_path)?;
    let config: EaConfig = serde_json::from_str(&text).map_err(|e| {
        Error::parse(
            config_path.display().to_string(),
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;

    let mut reader = csv::Reader::from_path(&features_path)?;
    let headers = reader.headers()?.clone();
    let expected: Vec<String> = feature_header()
        .into_iter()
        .chain(["alpha".to_string()])
        .collect();
    if headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::parse(
            features_path.display().to_string(),
            "header",
            format!("expected {expected:?}"),
        ));
    }
    let mut members = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let loc = format!("row {}", row + 2);
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|_| {
                Error::parse(
                    features_path.display().to_string(),
                    loc.clone(),
                    format!("bad number in column {}", &headers[k]),
                )
            })
        };
        let mut values = [0.0; 7];
        for (k, v) in values.iter_mut().enumerate() {
            *v = num(k + 2)?;
        }
        let alpha = num(9)?;
        let id = rec[0].to_string();
        let inst_path = dir.join(POPULATION_DIR).join(format!("{id}.json"));
        if !inst_path.exists() {
            return Err(Error::MissingFile(inst_path));
        }
        let inst = read_instance(&inst_path)?;
        members.push(EvaluatedInstance {
            inst,
            features: FeatureVector::from_values(values),
            alpha,
        });
    }
    Ok(PersistedRun {
        dir: dir.to_path_buf(),
        config,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(mode: Hardness, alpha: f64, seed: u64) -> EaConfig {
        let mut cfg = EaConfig::new(
            8,
            mode,
            alpha,
            WeightSpec::single(FeatureId::MstDistsMean),
            seed,
        );
        cfg.mu = 4;
        cfg.lambda = 2;
        cfg.generations = 20;
        cfg
    }

    #[test]
    fn standard_defaults() {
        let cfg = EaConfig::standard(
            25,
            Hardness::Hard,
            WeightSpec::single(FeatureId::AngleMean),
            1,
        )
        .unwrap();
        assert_eq!((cfg.mu, cfg.lambda, cfg.generations), (30, 5, 10_000));
        assert_eq!(
            (cfg.sigma_small, cfg.sigma_large, cfg.p_small),
            (0.025, 0.05, 0.9)
        );
        assert_eq!(cfg.alpha_threshold, 1.15);
        assert!(EaConfig::standard(
            30,
            Hardness::Hard,
            WeightSpec::single(FeatureId::AngleMean),
            1
        )
        .is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(Hardness::Easy, 1.0, 0);
        cfg.lambda = 5;
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg(Hardness::Easy, 0.9, 0);
        assert!(cfg.validate().is_err());
        cfg.alpha_threshold = 1.0;
        cfg.p_small = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg(Hardness::Easy, 1.0, 0);
        cfg.n = 40;
        assert!(matches!(cfg.validate(), Err(Error::Capacity { .. })));
    }

    #[test]
    fn config_json_defaults() {
        let cfg: EaConfig = serde_json::from_str(
            r#"{"n": 10, "mode": "hard", "alpha_threshold": 1.05, "measure": {"features": ["chull_area"], "weights": [1]}, "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(
            cfg,
            EaConfig::new(
                10,
                Hardness::Hard,
                1.05,
                WeightSpec::single(FeatureId::ChullArea),
                3
            )
        );
    }

    #[test]
    fn mutation_is_local() {
        let cfg = small_cfg(Hardness::Easy, 1.0, 0);
        let mut rng = RandomSource::new(5);
        let parent = random_instance(8, &mut rng).unwrap();
        for _ in 0..200 {
            let child = mutate(&parent, &cfg, &mut rng);
            let changed = parent
                .cities()
                .iter()
                .zip(child.cities())
                .filter(|(a, b)| a != b)
                .count();
            assert!(changed <= 1);
            assert!(child.cities().iter().all(Point::in_unit_square));
        }
    }

    #[test]
    fn mutation_resets_out_of_range_axis() {
        let mut cfg = small_cfg(Hardness::Easy, 1.0, 0);
        cfg.sigma_small = 5.0;
        cfg.sigma_large = 5.0;
        let parent =
            TspInstance::from_coords(&[(0.999, 0.999), (0.999, 0.999), (0.999, 0.999)]).unwrap();
        let mut rng = RandomSource::new(1);
        let mut kept = 0;
        for _ in 0..200 {
            let child = mutate(&parent, &cfg, &mut rng);
            for p in child.cities() {
                assert!(p.in_unit_square());
                kept += (p.x == 0.999) as usize;
            }
        }
        // With sigma 5 most proposals leave [0,1].
        assert!(kept > 3 * 200 - 200);
    }

    #[test]
    fn hard_bootstrap_with_trivial_threshold() {
        let cfg = small_cfg(Hardness::Hard, 1.0, 9);
        let b = bootstrap(&cfg).unwrap();
        assert_eq!(b.evaluations, 1);
        assert_eq!(b.population.len(), 4);
        assert!(b.population.members.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn easy_bootstrap_small_n() {
        let cfg = small_cfg(Hardness::Easy, 1.0, 2);
        let b = bootstrap(&cfg).unwrap();
        assert!(b.population.members.iter().all(|m| m.alpha == 1.0));
    }

    #[test]
    fn budget_exhaustion() {
        let mut cfg = small_cfg(Hardness::Hard, 3.0, 2);
        cfg.bootstrap_budget = 20;
        assert!(matches!(
            bootstrap(&cfg),
            Err(Error::BootstrapBudget {
                evaluations: 20,
                ..
            })
        ));
    }

    #[test]
    fn zero_generations_is_bootstrap() {
        let mut cfg = small_cfg(Hardness::Easy, 1.0, 4);
        cfg.generations = 0;
        let log = evolve(&cfg).unwrap();
        assert_eq!(log.population, log.initial);
        assert_eq!(log.generations.len(), 1);
        assert_eq!(log.generations[0].range, 0.0);
    }

    #[test]
    fn evolve_is_deterministic_and_feasible() {
        let cfg = small_cfg(Hardness::Easy, 1.0, 6);
        let a = evolve(&cfg).unwrap();
        let b = evolve(&cfg).unwrap();
        assert_eq!(a, b);
        for w in a.generations.windows(2) {
            assert!(w[1].range >= w[0].range);
            assert!(w[1].feat_min <= w[0].feat_min && w[1].feat_max >= w[0].feat_max);
        }
        assert!(a.population.members.iter().all(|m| m.alpha <= 1.0));
        assert_eq!(a.population.len(), cfg.mu);
    }

    #[test]
    fn run_dir_round_trip() {
        let cfg = small_cfg(Hardness::Hard, 1.02, 7);
        let log = evolve(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        log.write_dir(dir.path()).unwrap();
        let back = load_run_dir(dir.path()).unwrap();
        assert_eq!(back.config, cfg);
        assert_eq!(back.members.len(), cfg.mu);
        for (a, b) in log.population.members.iter().zip(&back.members) {
            assert_eq!(a.features.values(), b.features.values());
            assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
            assert_eq!(a.inst.cities(), b.inst.cities());
            assert_eq!(compute_all(&b.inst).values(), b.features.values());
        }
        let gens = fs::read_to_string(dir.path().join(GENERATIONS_FILE)).unwrap();
        assert!(gens.starts_with("gen,feat_min,feat_max,range,alpha_min,alpha_max"));
        assert_eq!(gens.lines().count(), cfg.generations + 2);
    }
}
