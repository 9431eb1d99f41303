//! Distance functions and their generalized triangle constants.
//!
//! A cost model pairs a distance `d` with a constant `D >= 1` such that
//! `d(u, v) <= D * (d(u, w) + d(w, v))` for all `u, v, w`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CostKind {
    /// k-means: squared Euclidean distance.
    SquaredEuclidean,
    /// k-medians: Manhattan distance.
    L1,
    Euclidean,
    /// `sum_i |x_i - y_i|^p` for `p >= 1`.
    LpToTheP(f64),
}

impl CostKind {
    /// The declared triangle constant for this kind.
    pub fn default_triangle_constant(self) -> f64 {
        match self {
            CostKind::SquaredEuclidean => 2.0,
            CostKind::L1 | CostKind::Euclidean => 1.0,
            CostKind::LpToTheP(p) => 2f64.powf(p - 1.0),
        }
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostKind::SquaredEuclidean => f.write_str("squared_euclidean"),
            CostKind::L1 => f.write_str("l1"),
            CostKind::Euclidean => f.write_str("euclidean"),
            CostKind::LpToTheP(p) => write!(f, "lp:{p}"),
        }
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "squared_euclidean" | "sqeuclidean" | "kmeans" => Ok(CostKind::SquaredEuclidean),
            "l1" | "manhattan" | "kmedian" => Ok(CostKind::L1),
            "euclidean" | "l2" => Ok(CostKind::Euclidean),
            other => {
                let p = other
                    .strip_prefix("lp:")
                    .ok_or_else(|| Error::invalid(format!("unknown cost model `{other}`")))?;
                let p: f64 = p
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad exponent in `{other}`")))?;
                if !(p.is_finite() && p >= 1.0) {
                    return Err(Error::invalid(format!("exponent must be >= 1, got {p}")));
                }
                Ok(CostKind::LpToTheP(p))
            }
        }
    }
}

impl TryFrom<String> for CostKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CostKind> for String {
    fn from(k: CostKind) -> String {
        k.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    kind: CostKind,
    triangle_constant: f64,
}

impl CostModel {
    pub fn new(kind: CostKind) -> Result<Self> {
        if let CostKind::LpToTheP(p) = kind {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::invalid(format!("exponent must be >= 1, got {p}")));
            }
        }
        Ok(CostModel {
            kind,
            triangle_constant: kind.default_triangle_constant(),
        })
    }

    pub fn squared_euclidean() -> Self {
        CostModel::new(CostKind::SquaredEuclidean).expect("valid kind")
    }

    pub fn l1() -> Self {
        CostModel::new(CostKind::L1).expect("valid kind")
    }

    pub fn euclidean() -> Self {
        CostModel::new(CostKind::Euclidean).expect("valid kind")
    }

    pub fn lp_to_the_p(p: f64) -> Result<Self> {
        CostModel::new(CostKind::LpToTheP(p))
    }

    /// Replaces the declared constant. Only useful for checking that a
    /// constant is too small.
    pub fn with_triangle_constant(mut self, d: f64) -> Self {
        self.triangle_constant = d;
        self
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn triangle_constant(&self) -> f64 {
        self.triangle_constant
    }

    pub fn is_squared_euclidean(&self) -> bool {
        self.kind == CostKind::SquaredEuclidean
    }

    /// Distance between two equal-length coordinate slices. No dimension check.
    #[inline]
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let pairs = x.iter().zip(y);
        match self.kind {
            CostKind::SquaredEuclidean => pairs.map(|(a, b)| (a - b) * (a - b)).sum(),
            CostKind::L1 => pairs.map(|(a, b)| (a - b).abs()).sum(),
            CostKind::Euclidean => pairs.map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            CostKind::LpToTheP(p) => pairs.map(|(a, b)| (a - b).abs().powf(p)).sum(),
        }
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::squared_euclidean()
    }
}

/// `d(x, y)` under `model`, checking dimensions.
pub fn distance(model: &CostModel, x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(model.dist(x.coords(), y.coords()))
}

/// Exhaustive O(n^3) check of the generalized triangle inequality over all
/// ordered triples of `points`.
pub fn check_triangle_constant(model: &CostModel, points: &Dataset, tol: f64) -> bool {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = model.dist(points[i].coords(), points[j].coords());
        }
    }
    let big_d = model.triangle_constant();
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                if d[u * n + v] > big_d * (d[u * n + w] + d[w * n + v]) + tol {
                    return false;
                }
            }
        }
    }
    true
}
