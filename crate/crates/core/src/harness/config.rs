//! Experiment configuration (JSON) and its resolution into runnable parts.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instances::{
    gen_blobs_with_sizes, gen_geometric_groups, gen_increasing_gaps, gen_k_maximal_series, gen_separated_blobs,
    GeneratedInstance,
};
use crate::metric::{CostKind, CostModel};
use crate::offline::OfflineConfig;
use crate::online::{
    DoublingClusterer, FftOnlineClusterer, FirstPointClusterer, MaxDistanceClusterer, OnlineClusterer, PhaseOverride,
    RandomIndexClusterer, TakeAllClusterer, ThreePhaseClusterer, ThreePhaseConfig,
};
use crate::rng::Rng;

pub const DEFAULT_BASELINE_BUDGET: u64 = 10_000_000;

/// Stream id used for instance generation randomness.
const GENERATOR_STREAM: u64 = u64::MAX - 1;

fn default_true() -> bool {
    true
}

/// Which clusterer to run, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    FirstPoint,
    RandomIndex,
    Doubling {
        c: f64,
    },
    ThreePhase {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha2: Option<f64>,
        #[serde(default = "default_true")]
        take_first_point: bool,
        #[serde(default)]
        offline: OfflineConfig,
    },
    MaxDistance,
    Fft {
        k: usize,
    },
    TakeAll,
}

impl AlgorithmSpec {
    /// The number of optimal clusters this algorithm targets, if fixed.
    pub fn k(&self) -> Option<usize> {
        match self {
            AlgorithmSpec::FirstPoint | AlgorithmSpec::RandomIndex | AlgorithmSpec::Doubling { .. } => Some(1),
            AlgorithmSpec::MaxDistance => Some(2),
            AlgorithmSpec::ThreePhase { k, .. } | AlgorithmSpec::Fft { k } => Some(*k),
            AlgorithmSpec::TakeAll => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::FirstPoint => "first_point",
            AlgorithmSpec::RandomIndex => "random_index",
            AlgorithmSpec::Doubling { .. } => "doubling",
            AlgorithmSpec::ThreePhase { .. } => "three_phase",
            AlgorithmSpec::MaxDistance => "max_distance",
            AlgorithmSpec::Fft { .. } => "fft",
            AlgorithmSpec::TakeAll => "take_all",
        }
    }

    /// Name plus parameters, as written in report rows.
    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::Doubling { c } => format!("doubling c={c}"),
            AlgorithmSpec::ThreePhase {
                k,
                alpha,
                alpha2,
                take_first_point,
                ..
            } => {
                let mut s = format!("three_phase k={k}");
                if let (Some(a), Some(b)) = (alpha, alpha2) {
                    s.push_str(&format!(" alpha={a} alpha2={b}"));
                }
                if !take_first_point {
                    s.push_str(" no_first");
                }
                s
            }
            AlgorithmSpec::Fft { k } => format!("fft k={k}"),
            other => other.name().to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmSpec::Doubling { c } if !(c.is_finite() && *c > 1.0) => {
                Err(Error::config("algorithm.params.c", format!("must be > 1, got {c}")))
            }
            AlgorithmSpec::Fft { k } if *k < 2 => Err(Error::config(
                "algorithm.params.k",
                format!("must be at least 2, got {k}"),
            )),
            AlgorithmSpec::ThreePhase {
                k,
                alpha,
                alpha2,
                offline,
                ..
            } => {
                if *k < 2 {
                    return Err(Error::config(
                        "algorithm.params.k",
                        format!("must be at least 2, got {k}"),
                    ));
                }
                if alpha.is_some() != alpha2.is_some() {
                    return Err(Error::config(
                        "algorithm.params",
                        "alpha and alpha2 must be given together",
                    ));
                }
                offline
                    .validate()
                    .map_err(|e| Error::config("algorithm.params.offline", e.to_string()))
            }
            _ => Ok(()),
        }
    }

    /// Instantiates the clusterer for a stream of `n` points.
    pub fn build(&self, n: usize, model: CostModel, mut rng: Rng) -> Result<Box<dyn OnlineClusterer + Send>> {
        self.validate()?;
        Ok(match self {
            AlgorithmSpec::FirstPoint => Box::new(FirstPointClusterer::new()),
            AlgorithmSpec::RandomIndex => Box::new(RandomIndexClusterer::new(n, &mut rng)?),
            AlgorithmSpec::Doubling { c } => Box::new(DoublingClusterer::new(*c, rng)?),
            AlgorithmSpec::ThreePhase {
                k,
                alpha,
                alpha2,
                take_first_point,
                offline,
            } => {
                let cfg = ThreePhaseConfig {
                    n,
                    k: *k,
                    offline: *offline,
                    phase_override: alpha
                        .zip(*alpha2)
                        .map(|(alpha, alpha2)| PhaseOverride { alpha, alpha2 }),
                    take_first_point: *take_first_point,
                };
                Box::new(ThreePhaseClusterer::new(&cfg, model, rng)?)
            }
            AlgorithmSpec::MaxDistance => Box::new(MaxDistanceClusterer::new(model)),
            AlgorithmSpec::Fft { k } => Box::new(FftOnlineClusterer::new(*k, model)?),
            AlgorithmSpec::TakeAll => Box::new(TakeAllClusterer),
        })
    }
}

/// A named instance generator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "generator",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum GeneratorSpec {
    GeometricGroups {
        c: f64,
        max_n: usize,
    },
    IncreasingGaps {
        c: f64,
        n: usize,
    },
    KMaximalSeries {
        c: f64,
        k: usize,
        n: usize,
    },
    SeparatedBlobs {
        k: usize,
        per_cluster: usize,
        separation: f64,
        spread: f64,
        #[serde(default = "one")]
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Blobs of unequal sizes.
    Blobs {
        sizes: Vec<usize>,
        separation: f64,
        spread: f64,
        #[serde(default = "one")]
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn one() -> usize {
    1
}

impl GeneratorSpec {
    /// Runs the generator. Randomized generators use `seed` if given, else
    /// `fallback_seed`.
    pub fn generate(&self, fallback_seed: u64) -> Result<GeneratedInstance> {
        match self {
            GeneratorSpec::GeometricGroups { c, max_n } => gen_geometric_groups(*c, *max_n),
            GeneratorSpec::IncreasingGaps { c, n } => gen_increasing_gaps(*c, *n),
            GeneratorSpec::KMaximalSeries { c, k, n } => gen_k_maximal_series(*c, *k, *n),
            GeneratorSpec::SeparatedBlobs {
                k,
                per_cluster,
                separation,
                spread,
                dim,
                seed,
            } => {
                let mut rng = Rng::new(seed.unwrap_or(fallback_seed), GENERATOR_STREAM);
                gen_separated_blobs(*k, *per_cluster, *separation, *spread, *dim, &mut rng)
            }
            GeneratorSpec::Blobs {
                sizes,
                separation,
                spread,
                dim,
                seed,
            } => {
                let mut rng = Rng::new(seed.unwrap_or(fallback_seed), GENERATOR_STREAM);
                gen_blobs_with_sizes(sizes, *separation, *spread, *dim, &mut rng)
            }
        }
    }
}

/// Where the dataset comes from: a file, or a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Value>,
}

impl InstanceSpec {
    pub fn from_file(path: impl Into<PathBuf>) -> Self {
        InstanceSpec {
            file: Some(path.into()),
            generator: None,
            params: None,
        }
    }

    pub fn from_generator(spec: &GeneratorSpec) -> Self {
        let v = serde_json::to_value(spec).expect("generator specs serialize");
        InstanceSpec {
            file: None,
            generator: v.get("generator").and_then(Value::as_str).map(str::to_string),
            params: v.get("params").cloned(),
        }
    }

    pub fn generator_spec(&self) -> Result<Option<GeneratorSpec>> {
        let Some(name) = &self.generator else {
            return Ok(None);
        };
        let raw = serde_json::json!({
            "generator": name,
            "params": self.params.clone().unwrap_or(Value::Object(Default::default())),
        });
        serde_path_to_error::deserialize(raw)
            .map(Some)
            .map_err(|e| Error::config(format!("instance.{}", e.path()), e.inner().to_string()))
    }

    /// Loads or generates the instance. Relative file paths are resolved
    /// against `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>, fallback_seed: u64) -> Result<GeneratedInstance> {
        match (&self.file, self.generator_spec()?) {
            (Some(_), Some(_)) => Err(Error::config("instance", "give either `file` or `generator`, not both")),
            (None, None) => Err(Error::config("instance", "one of `file` or `generator` is required")),
            (Some(file), None) => {
                if self.params.is_some() {
                    return Err(Error::config("instance.params", "only valid with `generator`"));
                }
                let path = match base_dir {
                    Some(dir) if file.is_relative() => dir.join(file),
                    _ => file.clone(),
                };
                GeneratedInstance::load(&path)
            }
            (None, Some(gen)) => gen.generate(fallback_seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderMode {
    /// The instance's intended order.
    #[default]
    Given,
    /// A fresh uniform permutation per trial.
    Random,
}

/// Order selection on the command line: `given` or `random:SEED`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderChoice {
    Given,
    Random(u64),
}

impl FromStr for OrderChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "given" {
            return Ok(OrderChoice::Given);
        }
        match s.strip_prefix("random:") {
            Some(seed) => seed
                .parse()
                .map(OrderChoice::Random)
                .map_err(|_| Error::invalid(format!("bad seed in `{s}`"))),
            None if s == "random" => Ok(OrderChoice::Random(0)),
            None => Err(Error::invalid(format!(
                "order must be `given` or `random:SEED`, got `{s}`"
            ))),
        }
    }
}

fn default_budget() -> u64 {
    DEFAULT_BASELINE_BUDGET
}

fn default_thresholds() -> Vec<f64> {
    vec![1.0, 1.5, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0, 100.0, 20100.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmSpec,
    pub instance: InstanceSpec,
    #[serde(default = "default_model")]
    pub model: CostKind,
    #[serde(default)]
    pub order: OrderMode,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub baseline_budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Clusters for the baseline when the algorithm does not fix `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Ratio thresholds `a` at which `success_rate(a)` is reported.
    #[serde(default = "default_thresholds")]
    pub success_thresholds: Vec<f64>,
    /// Record wall-clock time per trial. Off makes reports byte-reproducible.
    #[serde(default = "default_true")]
    pub timing: bool,
    #[serde(default = "default_true")]
    pub parallel: bool,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_model() -> CostKind {
    CostKind::SquaredEuclidean
}

impl ExperimentConfig {
    pub fn new(algorithm: AlgorithmSpec, instance: InstanceSpec, trials: usize) -> Self {
        ExperimentConfig {
            algorithm,
            instance,
            model: default_model(),
            order: OrderMode::Given,
            trials,
            seed: 0,
            baseline_budget: DEFAULT_BASELINE_BUDGET,
            output: None,
            k: None,
            success_thresholds: default_thresholds(),
            timing: true,
            parallel: true,
            base_dir: None,
        }
    }

    /// Parses and validates a JSON config; errors name the offending field.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(
                if path == "." { "<root>".to_string() } else { path },
                e.inner().to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = ExperimentConfig::from_json_str(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        self.algorithm.validate()?;
        if self.k == Some(0) {
            return Err(Error::config("k", "must be positive"));
        }
        if let (Some(k), Some(alg_k)) = (self.k, self.algorithm.k()) {
            if k != alg_k {
                return Err(Error::config(
                    "k",
                    format!("algorithm targets k = {alg_k}, config says {k}"),
                ));
            }
        }
        if let Some(bad) = self.success_thresholds.iter().find(|a| a.is_nan()) {
            return Err(Error::config("success_thresholds", format!("not a number: {bad}")));
        }
        match (&self.instance.file, &self.instance.generator) {
            (Some(_), Some(_)) => return Err(Error::config("instance", "give either `file` or `generator`, not both")),
            (None, None) => return Err(Error::config("instance", "one of `file` or `generator` is required")),
            _ => {}
        }
        self.instance.generator_spec()?;
        CostModel::new(self.model).map_err(|e| Error::config("model", e.to_string()))?;
        Ok(())
    }

    pub fn cost_model(&self) -> Result<CostModel> {
        CostModel::new(self.model)
    }

    /// Baseline `k`: the algorithm's, else the config's, else 1.
    pub fn baseline_k(&self) -> usize {
        self.algorithm.k().or(self.k).unwrap_or(1)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("configs serialize")
    }
}
