//! Trial runner, statistics and report serialization.

pub mod config;
pub mod report;
pub mod stats;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{binomial, brute_force_opt, clustering_cost};
use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::instances::GeneratedInstance;
use crate::metric::CostModel;
use crate::offline::{offline_cluster, OfflineConfig};
use crate::online::{run_stream, OnlineTrace};
use crate::order::{uniform_permutation, StreamOrder};
use crate::rng::Rng;

pub use config::{AlgorithmSpec, ExperimentConfig, GeneratorSpec, InstanceSpec, OrderChoice, OrderMode};
pub use report::{load_report, Aggregates, ExperimentReport, SuccessPoint, REPORT_HEADER};
pub use stats::{harmonic_reference, success_rate, Summary};

/// Sub-stream labels of a trial's Rng.
const ORDER_STREAM: u64 = 1;
const ALGORITHM_STREAM: u64 = 2;
const BASELINE_STREAM: u64 = 3;

/// Serializes non-finite floats as the strings `inf`, `-inf` and `nan`.
pub(crate) mod float_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(to_str(*v))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => from_str(&s).ok_or_else(|| serde::de::Error::custom(format!("not a float: `{s}`"))),
        }
    }

    pub fn to_str(v: f64) -> &'static str {
        if v.is_nan() {
            "nan"
        } else if v > 0.0 {
            "inf"
        } else {
            "-inf"
        }
    }

    pub fn from_str(s: &str) -> Option<f64> {
        match s {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineKind {
    ExactOracle,
    OfflineBaseline,
}

impl BaselineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineKind::ExactOracle => "ExactOracle",
            BaselineKind::OfflineBaseline => "OfflineBaseline",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ExactOracle" => Some(BaselineKind::ExactOracle),
            "OfflineBaseline" => Some(BaselineKind::OfflineBaseline),
            _ => None,
        }
    }
}

/// Reference solution a trial's cost is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub kind: BaselineKind,
    pub cost: f64,
    pub centers: Vec<Point>,
}

/// The exhaustive optimum when `C(n, k) <= budget`, otherwise `offline_cluster`
/// with default settings (8 restarts) on the full dataset.
pub fn compute_baseline(data: &Dataset, k: usize, model: &CostModel, budget: u128, rng: &Rng) -> Result<Baseline> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "baseline needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if binomial(n, k) <= budget {
        let opt = brute_force_opt(data, k, model, budget)?;
        return Ok(Baseline {
            kind: BaselineKind::ExactOracle,
            cost: opt.cost,
            centers: opt.center_points(data),
        });
    }
    let cfg = OfflineConfig {
        exact_threshold: 0,
        ..OfflineConfig::default()
    };
    let centers = offline_cluster(data, k, &cfg, model, rng)?;
    Ok(Baseline {
        kind: BaselineKind::OfflineBaseline,
        cost: clustering_cost(data, &centers, model)?,
        centers,
    })
}

/// `alg / baseline`; 1 when both are 0 and +inf when only the baseline is.
pub fn cost_ratio(alg_cost: f64, baseline_cost: f64) -> f64 {
    if baseline_cost == 0.0 {
        if alg_cost == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        alg_cost / baseline_cost
    }
}

/// One row of an experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_id: u64,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub algorithm: String,
    pub order: String,
    pub centers_taken: usize,
    #[serde(with = "float_repr")]
    pub alg_cost: f64,
    #[serde(with = "float_repr")]
    pub baseline_cost: f64,
    pub baseline_kind: BaselineKind,
    #[serde(with = "float_repr")]
    pub ratio: f64,
    #[serde(with = "float_repr")]
    pub runtime_ms: f64,
}

/// Streams `instance` in `order` through the algorithm and scores the final
/// centers against the full dataset. `rng` identifies the trial: its seed and
/// stream id become the row's `seed` and `trial_id`.
#[allow(clippy::too_many_arguments)]
pub fn run_trial_with_baseline(
    instance: &GeneratedInstance,
    order: &StreamOrder,
    algorithm: &AlgorithmSpec,
    model: &CostModel,
    rng: &Rng,
    baseline: &Baseline,
    k: usize,
    timing: bool,
) -> Result<(TrialResult, OnlineTrace)> {
    let start = Instant::now();
    let data = &instance.dataset;
    let mut clusterer = algorithm.build(data.len(), *model, rng.split(ALGORITHM_STREAM))?;
    let trace = run_stream(&mut clusterer, data, order)?;
    let alg_cost = if trace.num_centers() == 0 {
        f64::INFINITY
    } else {
        clustering_cost(data, trace.centers(), model)?
    };
    let runtime_ms = if timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let row = TrialResult {
        trial_id: rng.stream_id(),
        seed: rng.seed(),
        n: data.len(),
        k,
        algorithm: algorithm.label(),
        order: order.label(),
        centers_taken: trace.num_centers(),
        alg_cost,
        baseline_cost: baseline.cost,
        baseline_kind: baseline.kind,
        ratio: cost_ratio(alg_cost, baseline.cost),
        runtime_ms,
    };
    Ok((row, trace))
}

/// A single trial with its own baseline (`k` from the algorithm, else 1).
pub fn run_trial(
    instance: &GeneratedInstance,
    order: &StreamOrder,
    algorithm: &AlgorithmSpec,
    model: &CostModel,
    rng: &Rng,
    baseline_budget: u128,
) -> Result<TrialResult> {
    let k = algorithm.k().unwrap_or(1);
    let baseline = compute_baseline(
        &instance.dataset,
        k,
        model,
        baseline_budget,
        &rng.split(BASELINE_STREAM),
    )?;
    run_trial_with_baseline(instance, order, algorithm, model, rng, &baseline, k, true).map(|(row, _)| row)
}

/// The order trial `rng` sees under `mode`.
pub fn trial_order(instance: &GeneratedInstance, mode: OrderMode, rng: &Rng) -> Result<StreamOrder> {
    match mode {
        OrderMode::Given => Ok(instance.intended_order.clone()),
        OrderMode::Random => uniform_permutation(instance.n(), &mut rng.split(ORDER_STREAM)),
    }
}

/// Runs `config.trials` trials. Trial `t` uses `Rng::new(seed, t)`; the
/// baseline is computed once from a stream no trial uses. Results are in
/// trial order and identical whether or not trials run in parallel.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let instance = config.instance.resolve(config.base_dir.as_deref(), config.seed)?;
    run_experiment_on(config, &instance)
}

/// [`run_experiment`] on an instance already in memory; `config.instance` is
/// only echoed.
pub fn run_experiment_on(config: &ExperimentConfig, instance: &GeneratedInstance) -> Result<ExperimentReport> {
    config.validate()?;
    let model = config.cost_model()?;
    let k = config.baseline_k();
    let baseline = compute_baseline(
        &instance.dataset,
        k,
        &model,
        u128::from(config.baseline_budget),
        &Rng::new(config.seed, u64::MAX).split(BASELINE_STREAM),
    )?;
    let one = |t: u64| -> Result<TrialResult> {
        let rng = Rng::new(config.seed, t);
        let order = trial_order(instance, config.order, &rng)?;
        run_trial_with_baseline(
            instance,
            &order,
            &config.algorithm,
            &model,
            &rng,
            &baseline,
            k,
            config.timing,
        )
        .map(|(row, _)| row)
    };
    let trials = config.trials as u64;
    let rows = if config.parallel {
        (0..trials).into_par_iter().map(one).collect::<Result<Vec<_>>>()?
    } else {
        (0..trials).map(one).collect::<Result<Vec<_>>>()?
    };
    Ok(ExperimentReport::new(config, instance, rows))
}

/// One line per arrival: `index,take|skip,reason`.
pub fn format_trace(trace: &OnlineTrace) -> String {
    let mut out = String::new();
    for (t, d) in trace.decisions().iter().enumerate() {
        let verdict = if d.taken() { "take" } else { "skip" };
        out.push_str(&format!("{t},{verdict},{}\n", d.reason().as_str()));
    }
    out
}

#[cfg(test)]
mod tests;
