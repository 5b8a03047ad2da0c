//! Sources of optimal tour lengths.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::held_karp::{exact_optimum, DEFAULT_MAX_EXACT};
use crate::error::{Error, Result};
use crate::instance::{to_json, TspInstance};

/// Environment variable holding an external solver command template.
pub const ORACLE_ENV: &str = "INSTANCE_FORGE_ORACLE_CMD";

/// Placeholder replaced by the instance file path in command templates.
pub const PATH_PLACEHOLDER: &str = "{path}";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptOracle {
    ExactDp {
        #[serde(default = "default_max_exact")]
        max_exact: usize,
    },
    /// Runs `template` (whitespace separated; `{path}` is replaced by a temp
    /// file holding the instance in native JSON, or the path is appended) and
    /// reads a single decimal optimum from stdout.
    ExternalCommand { template: String },
    /// JSON map `{"instance_id": length}`.
    CachedFile {
        path: PathBuf,
        #[serde(skip)]
        cache: OnceLock<BTreeMap<String, f64>>,
    },
}

fn default_max_exact() -> usize {
    DEFAULT_MAX_EXACT
}

impl Default for OptOracle {
    fn default() -> Self {
        OptOracle::ExactDp {
            max_exact: DEFAULT_MAX_EXACT,
        }
    }
}

impl PartialEq for OptOracle {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (OptOracle::ExactDp { max_exact: a }, OptOracle::ExactDp { max_exact: b }) => a == b,
            (
                OptOracle::ExternalCommand { template: a },
                OptOracle::ExternalCommand { template: b },
            ) => a == b,
            (OptOracle::CachedFile { path: a, .. }, OptOracle::CachedFile { path: b, .. }) => {
                a == b
            }
            _ => false,
        }
    }
}

impl OptOracle {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn external(template: impl Into<String>) -> Self {
        OptOracle::ExternalCommand {
            template: template.into(),
        }
    }

    pub fn cached(path: impl Into<PathBuf>) -> Self {
        OptOracle::CachedFile {
            path: path.into(),
            cache: OnceLock::new(),
        }
    }

    /// External command from [`ORACLE_ENV`], if set.
    pub fn from_env() -> Option<Self> {
        std::env::var(ORACLE_ENV)
            .ok()
            .filter(|s| !s.trim().is_empty())
            .map(Self::external)
    }

    /// Checks, without solving anything, that this oracle can serve instances
    /// of `n` cities.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            OptOracle::ExactDp { max_exact } if n > *max_exact => Err(Error::Capacity {
                n,
                max_exact: *max_exact,
            }),
            OptOracle::ExactDp { .. } => Ok(()),
            OptOracle::ExternalCommand { template }
                if template.split_whitespace().next().is_none() =>
            {
                Err(Error::Config(
                    "external oracle command template is empty".into(),
                ))
            }
            OptOracle::ExternalCommand { .. } => Ok(()),
            OptOracle::CachedFile { .. } => self.cached_lengths().map(|_| ()),
        }
    }

    pub fn opt(&self, inst: &TspInstance) -> Result<f64> {
        let value = match self {
            OptOracle::ExactDp { max_exact } => exact_optimum(inst, *max_exact)?,
            OptOracle::ExternalCommand { template } => run_external(template, inst)?,
            OptOracle::CachedFile { path, .. } => {
                let id = inst.id().ok_or_else(|| {
                    Error::Oracle("cached_file oracle needs an instance id".into())
                })?;
                *self.cached_lengths()?.get(id).ok_or_else(|| {
                    Error::Oracle(format!("instance {id:?} not found in {}", path.display()))
                })?
            }
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Oracle(format!(
                "oracle returned non-positive optimum {value}"
            )));
        }
        Ok(value)
    }

    fn cached_lengths(&self) -> Result<&BTreeMap<String, f64>> {
        let OptOracle::CachedFile { path, cache } = self else {
            unreachable!("cached_lengths on non-cached oracle")
        };
        if let Some(m) = cache.get() {
            return Ok(m);
        }
        let map = load_cache(path)?;
        Ok(cache.get_or_init(|| map))
    }
}

fn load_cache(path: &Path) -> Result<BTreeMap<String, f64>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        Error::parse(
            path.display().to_string(),
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn run_external(template: &str, inst: &TspInstance) -> Result<f64> {
    let mut file = tempfile::Builder::new().suffix(".json").tempfile()?;
    std::io::Write::write_all(&mut file, to_json(inst).as_bytes())?;
    let path = file.path().to_string_lossy().into_owned();

    let mut parts: Vec<String> = template.split_whitespace().map(str::to_string).collect();
    if parts.is_empty() {
        return Err(Error::Config(
            "external oracle command template is empty".into(),
        ));
    }
    if parts.iter().any(|p| p.contains(PATH_PLACEHOLDER)) {
        for p in parts.iter_mut() {
            *p = p.replace(PATH_PLACEHOLDER, &path);
        }
    } else {
        parts.push(path);
    }
    let output = Command::new(&parts[0])
        .args(&parts[1..])
        .output()
        .map_err(|e| Error::Oracle(format!("failed to launch {:?}: {e}", parts[0])))?;
    if !output.status.success() {
        return Err(Error::Oracle(format!(
            "{:?} exited with {}: {}",
            parts[0],
            output.status,
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    let stdout = String::from_utf8_lossy(&output.stdout);
    stdout.trim().parse::<f64>().map_err(|_| {
        Error::Oracle(format!(
            "expected a single number on stdout, got {:?}",
            stdout.trim()
        ))
    })
}
