use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected number of centers when arrival `j` is taken with probability
/// `k / j` after the first `k`: `k + k (H_n - H_k)`, summed directly. For
/// `k = 1` this is `1 + H_{n-1}`, the expected count of running maxima of
/// distance to the first arrival.
pub fn harmonic_reference(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if k == 1 {
        return Ok(1.0 + (1..n).map(|j| 1.0 / j as f64).sum::<f64>());
    }
    let kf = k as f64;
    Ok(kf + (k + 1..=n).map(|j| kf / j as f64).sum::<f64>())
}

/// Location summary of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(with = "super::float_repr")]
    pub mean: f64,
    #[serde(with = "super::float_repr")]
    pub median: f64,
    #[serde(with = "super::float_repr")]
    pub p90: f64,
    #[serde(with = "super::float_repr")]
    pub p99: f64,
    #[serde(with = "super::float_repr")]
    pub min: f64,
    #[serde(with = "super::float_repr")]
    pub max: f64,
}

impl Summary {
    /// Mean is a sequential sum in input order; quantiles use nearest rank
    /// and the median averages the two middle values of an even sample.
    pub fn of(values: &[f64]) -> Summary {
        if values.is_empty() {
            return Summary {
                mean: f64::NAN,
                median: f64::NAN,
                p90: f64::NAN,
                p99: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len();
        let median = if m % 2 == 1 {
            sorted[m / 2]
        } else {
            let (a, b) = (sorted[m / 2 - 1], sorted[m / 2]);
            if a == b {
                a
            } else {
                a / 2.0 + b / 2.0
            }
        };
        Summary {
            mean,
            median,
            p90: nearest_rank(&sorted, 0.90),
            p99: nearest_rank(&sorted, 0.99),
            min: sorted[0],
            max: sorted[m - 1],
        }
    }
}

/// Nearest-rank quantile of an ascending sample.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    let rank = ((q * m as f64).ceil() as usize).clamp(1, m);
    sorted[rank - 1]
}

/// Fraction of `ratios` that are at most `a`.
pub fn success_rate(ratios: &[f64], a: f64) -> f64 {
    if ratios.is_empty() {
        return f64::NAN;
    }
    ratios.iter().filter(|&&r| r <= a).count() as f64 / ratios.len() as f64
}
