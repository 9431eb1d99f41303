//! Instance generators: the adversarial lower-bound sequences and benign
//! separated blobs, plus validators for the adversarial constructions.
//!
//! Generated datasets can be written in the plain-text dataset format with a
//! JSON sidecar (`<file>.meta.json`) holding the generator name, parameters
//! and size.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::order::StreamOrder;
use crate::rng::Rng;

/// Multiplicative slack that turns the lower-bound strict inequalities into
/// robust float comparisons.
pub const GAP_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceMetadata {
    pub generator: String,
    pub params: BTreeMap<String, Value>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_hint: Option<usize>,
    /// Generator-specific facts, e.g. whether the last group was truncated.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, Value>,
}

impl InstanceMetadata {
    fn new(generator: &str, params: Value, n: usize) -> Self {
        let params = match params {
            Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        InstanceMetadata {
            generator: generator.to_string(),
            params,
            n,
            k_hint: None,
            notes: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata always serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub dataset: Dataset,
    pub intended_order: StreamOrder,
    pub metadata: InstanceMetadata,
}

impl GeneratedInstance {
    fn as_given(dataset: Dataset, metadata: InstanceMetadata) -> Self {
        let n = dataset.len();
        GeneratedInstance {
            dataset,
            intended_order: StreamOrder::as_given(n),
            metadata,
        }
    }

    /// Wraps a dataset loaded from disk that has no sidecar.
    pub fn from_dataset(dataset: Dataset, source: &str) -> Self {
        let meta = InstanceMetadata::new("file", json!({ "path": source }), dataset.len());
        GeneratedInstance::as_given(dataset, meta)
    }

    pub fn n(&self) -> usize {
        self.dataset.len()
    }

    /// The dataset in its intended arrival order.
    pub fn ordered_points(&self) -> impl Iterator<Item = &Point> {
        self.intended_order.perm().iter().map(|&i| &self.dataset[i])
    }

    /// Writes the dataset to `path` and the metadata to its sidecar.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.dataset.save(path)?;
        std::fs::write(sidecar_path(path), self.metadata.to_json())?;
        Ok(())
    }

    /// Reads a dataset and, if present, its sidecar metadata.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let dataset = Dataset::load(path)?;
        let side = sidecar_path(path);
        if side.exists() {
            let metadata = InstanceMetadata::from_json(&std::fs::read_to_string(&side)?)?;
            if metadata.n != dataset.len() {
                return Err(Error::invalid(format!(
                    "sidecar says n = {} but {} has {} points",
                    metadata.n,
                    path.display(),
                    dataset.len()
                )));
            }
            Ok(GeneratedInstance::as_given(dataset, metadata))
        } else {
            Ok(GeneratedInstance::from_dataset(dataset, &path.display().to_string()))
        }
    }
}

/// `<path>.meta.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn check_c(c: f64, strict: bool) -> Result<()> {
    let ok = c.is_finite() && if strict { c > 1.0 } else { c >= 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "c must be {} 1, got {c}",
            if strict { ">" } else { ">=" }
        )))
    }
}

/// Groups on the integer line: value `i` repeated `floor((7c)^i)` times for
/// `i = 1, 2, ...`, the last group truncated so the total is `max_n`.
/// Streamed group by group from smallest to largest.
pub fn gen_geometric_groups(c: f64, max_n: usize) -> Result<GeneratedInstance> {
    check_c(c, false)?;
    if max_n == 0 {
        return Err(Error::invalid("max_n must be positive"));
    }
    let mut values = Vec::with_capacity(max_n);
    let mut sizes = Vec::new();
    let mut truncated = false;
    let mut i = 1i32;
    while values.len() < max_n {
        let full = (7.0 * c).powi(i).floor();
        let room = (max_n - values.len()) as f64;
        let size = if full > room {
            truncated = true;
            room as usize
        } else {
            full as usize
        };
        values.extend(std::iter::repeat_n(f64::from(i), size));
        sizes.push(size);
        i += 1;
    }
    let mut meta = InstanceMetadata::new("geometric_groups", json!({ "c": c, "max_n": max_n }), max_n);
    meta.k_hint = Some(1);
    meta.notes.insert("group_sizes".into(), json!(sizes));
    meta.notes.insert("truncated_last_group".into(), json!(truncated));
    Ok(GeneratedInstance::as_given(Dataset::from_scalars(&values)?, meta))
}

/// Increasing points on the line, `x_1 = 0`, `x_2 = 1`, and
/// `x_{t+1} = x_t + (1 + eps) sqrt(c * sum_{s=2..t} x_s^2)`, so that every
/// point is too far from its predecessor to be left out of a c-approximate
/// solution for the prefix ending at it.
pub fn gen_increasing_gaps(c: f64, n: usize) -> Result<GeneratedInstance> {
    check_c(c, true)?;
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let mut xs = vec![0.0, 1.0];
    let mut sum_sq = 1.0f64;
    while xs.len() < n {
        let last = *xs.last().expect("non-empty");
        let gap = (1.0 + GAP_SLACK) * (c * sum_sq).sqrt();
        let next = last + gap;
        let next_sum = sum_sq + next * next;
        if !(next.is_finite() && next_sum.is_finite() && (gap * gap).is_finite() && (c * next_sum).is_finite()) {
            return Err(Error::FloatOverflow {
                c,
                max_feasible_n: xs.len(),
            });
        }
        xs.push(next);
        sum_sq = next_sum;
    }
    let mut meta = InstanceMetadata::new("increasing_gaps", json!({ "c": c, "n": n, "eps": GAP_SLACK }), n);
    meta.k_hint = Some(2);
    Ok(GeneratedInstance::as_given(Dataset::from_scalars(&xs)?, meta))
}

fn scalar_sequence(instance: &GeneratedInstance) -> Option<Vec<f64>> {
    if instance.dataset.dim() != 1 {
        return None;
    }
    Some(instance.ordered_points().map(|p| p.coords()[0]).collect())
}

/// True iff `(x_t - x_{t-1})^2 > c * sum_{s=2..t-1} x_s^2` for every
/// `t = 3..=n` (1-based) along the intended order.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate_increasing_gaps(instance: &GeneratedInstance, c: f64) -> bool {
    let Some(xs) = scalar_sequence(instance) else {
        return false;
    };
    let mut sum_sq = 0.0;
    for t in 2..xs.len() {
        // 0-based t is the 1-based point t + 1; the sum covers x_2 ..= x_t.
        sum_sq += xs[t - 1] * xs[t - 1];
        let gap = xs[t] - xs[t - 1];
        if !(gap * gap > c * sum_sq) {
            return false;
        }
    }
    true
}

/// Increasing points with `(w_{i+1} - w_i)^2 > c * sum_{j<=i} (w_i - w_j)^2`:
/// `w_1 = 0`, `w_2 = 1`, then each gap is `(1 + eps)` times the bound.
pub fn gen_k_maximal_series(c: f64, k: usize, n: usize) -> Result<GeneratedInstance> {
    check_c(c, true)?;
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if n < k {
        return Err(Error::invalid(format!("n = {n} must be at least k = {k}")));
    }
    let mut ws: Vec<f64> = vec![0.0];
    if n >= 2 {
        ws.push(1.0);
    }
    while ws.len() < n {
        let last = *ws.last().expect("non-empty");
        let spread: f64 = ws.iter().map(|w| (last - w) * (last - w)).sum();
        let gap = (1.0 + GAP_SLACK) * (c * spread).sqrt();
        let next = last + gap;
        if !(next.is_finite() && (gap * gap).is_finite() && (c * spread).is_finite()) {
            return Err(Error::FloatOverflow {
                c,
                max_feasible_n: ws.len(),
            });
        }
        // The next spread must stay finite for the validator to be meaningful.
        let next_spread: f64 = ws.iter().map(|w| (next - w) * (next - w)).sum();
        if !(c * next_spread).is_finite() {
            return Err(Error::FloatOverflow {
                c,
                max_feasible_n: ws.len(),
            });
        }
        ws.push(next);
    }
    let mut meta = InstanceMetadata::new(
        "k_maximal_series",
        json!({ "c": c, "k": k, "n": n, "eps": GAP_SLACK }),
        n,
    );
    meta.k_hint = Some(k);
    Ok(GeneratedInstance::as_given(Dataset::from_scalars(&ws)?, meta))
}

/// True iff `(w_{i+1} - w_i)^2 > c * sum_{j=1..i} (w_i - w_j)^2` for every
/// `i = 1..n-1` along the intended order.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate_k_maximal_series(instance: &GeneratedInstance, c: f64) -> bool {
    let Some(ws) = scalar_sequence(instance) else {
        return false;
    };
    for i in 1..ws.len() {
        let last = ws[i - 1];
        let spread: f64 = ws[..i].iter().map(|w| (last - w) * (last - w)).sum();
        let gap = ws[i] - last;
        if !(gap * gap > c * spread) {
            return false;
        }
    }
    true
}

/// Well-separated blobs, one per entry of `sizes`. Blob `j` is centered on the
/// line at `j * separation` when `dim == 1`; otherwise at
/// `separation * (1 + j / dim) * e_{j mod dim}`, which keeps every pair of
/// blob centers at least `separation` apart. Points are uniform in a ball of
/// radius `spread` around their blob center.
pub fn gen_blobs_with_sizes(
    sizes: &[usize],
    separation: f64,
    spread: f64,
    dim: usize,
    rng: &mut Rng,
) -> Result<GeneratedInstance> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::invalid("every blob needs at least one point"));
    }
    if !(separation.is_finite() && separation > 0.0 && spread.is_finite() && spread > 0.0) {
        return Err(Error::invalid("separation and spread must be positive and finite"));
    }
    if dim == 0 {
        return Err(Error::invalid("dim must be positive"));
    }
    let mut points = Vec::with_capacity(sizes.iter().sum());
    for (j, &size) in sizes.iter().enumerate() {
        let mut center = vec![0.0; dim];
        if dim == 1 {
            center[0] = j as f64 * separation;
        } else {
            center[j % dim] = separation * (1 + j / dim) as f64;
        }
        for _ in 0..size {
            points.push(Point::new(ball_sample(&center, spread, rng))?);
        }
    }
    let k = sizes.len();
    let mut meta = InstanceMetadata::new(
        "separated_blobs",
        json!({
            "sizes": sizes,
            "separation": separation,
            "spread": spread,
            "dim": dim,
            "seed": rng.seed(),
            "stream_id": rng.stream_id(),
        }),
        points.len(),
    );
    meta.k_hint = Some(k);
    Ok(GeneratedInstance::as_given(Dataset::new(points)?, meta))
}

/// `k` equal blobs of `per_cluster` points each.
pub fn gen_separated_blobs(
    k: usize,
    per_cluster: usize,
    separation: f64,
    spread: f64,
    dim: usize,
    rng: &mut Rng,
) -> Result<GeneratedInstance> {
    if k == 0 || per_cluster == 0 {
        return Err(Error::invalid("k and per_cluster must be positive"));
    }
    gen_blobs_with_sizes(&vec![per_cluster; k], separation, spread, dim, rng)
}

fn ball_sample(center: &[f64], radius: f64, rng: &mut Rng) -> Vec<f64> {
    let dim = center.len();
    loop {
        let dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
        return center.iter().zip(&dir).map(|(c, d)| c + r * d / norm).collect();
    }
}
