//! Three-phase clusterer for known `n`, random order, `k >= 2`.
//!
//! Phase 1 buffers the first `m1` arrivals without taking them and clusters
//! them offline into `k` reference centers. Phase 2 watches the next `m2`
//! arrivals, recording for each reference center the largest distance of a
//! phase-2 point assigned to it (`R_max`, zero if none). Phase 3 takes an
//! arrival when it is farther than `R_max` from its nearest reference center,
//! or while that center has taken at most `ceil(3k ln(40k))` close points.

use serde::{Deserialize, Serialize};

use super::{Decision, OnlineClusterer, Reason};
use crate::cost::nearest;
use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::metric::CostModel;
use crate::offline::{offline_cluster, OfflineConfig};
use crate::rng::Rng;

/// Replaces the default phase lengths with `floor(alpha * n)` and
/// `floor(alpha2 * n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseOverride {
    pub alpha: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseConfig {
    pub n: usize,
    pub k: usize,
    pub offline: OfflineConfig,
    pub phase_override: Option<PhaseOverride>,
    /// Take arrival 0 as an extra center.
    pub take_first_point: bool,
}

impl ThreePhaseConfig {
    pub fn new(n: usize, k: usize) -> Self {
        ThreePhaseConfig {
            n,
            k,
            offline: OfflineConfig::default(),
            phase_override: None,
            take_first_point: true,
        }
    }

    /// `(m1, m2)` for this configuration.
    pub fn phase_lengths(&self) -> Result<(usize, usize)> {
        let n = self.n;
        let k = self.k;
        match self.phase_override {
            None => {
                let m1 = n / (100 * k);
                let m2 = (n as u128 / (100_000 * (k as u128).pow(3))) as usize;
                Ok((m1, m2))
            }
            Some(PhaseOverride { alpha, alpha2 }) => {
                for (name, v) in [("alpha", alpha), ("alpha2", alpha2)] {
                    if !(v.is_finite() && v > 0.0 && v < 1.0) {
                        return Err(Error::config(name, format!("must lie in (0, 1), got {v}")));
                    }
                }
                Ok((
                    (alpha * n as f64).floor() as usize,
                    (alpha2 * n as f64).floor() as usize,
                ))
            }
        }
    }
}

/// `ceil(3 k ln(40 k))`, the per-center budget of close points.
pub fn close_threshold(k: usize) -> usize {
    let k = k as f64;
    (3.0 * k * (40.0 * k).ln()).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct ThreePhaseClusterer {
    n: usize,
    k: usize,
    m1: usize,
    m2: usize,
    take_first_point: bool,
    offline: OfflineConfig,
    model: CostModel,
    rng: Rng,
    seen: usize,
    buffer: Vec<Point>,
    reference: Vec<Point>,
    r_max: Vec<f64>,
    close_taken: Vec<usize>,
    close_threshold: usize,
}

impl ThreePhaseClusterer {
    pub fn new(cfg: &ThreePhaseConfig, model: CostModel, rng: Rng) -> Result<Self> {
        if cfg.k < 2 {
            return Err(Error::config("k", format!("must be at least 2, got {}", cfg.k)));
        }
        cfg.offline
            .validate()
            .map_err(|e| Error::config("offline", e.to_string()))?;
        let (m1, m2) = cfg.phase_lengths()?;
        if m1 == 0 {
            return Err(Error::config(
                "n",
                format!(
                    "phase 1 is empty for n = {}, k = {}; supply a phase override",
                    cfg.n, cfg.k
                ),
            ));
        }
        if m2 == 0 && cfg.phase_override.is_none() {
            return Err(Error::config(
                "n",
                format!(
                    "phase 2 is empty for n = {}, k = {}; supply a phase override",
                    cfg.n, cfg.k
                ),
            ));
        }
        if m1 < cfg.k {
            return Err(Error::config(
                "n",
                format!("phase 1 holds {m1} points, fewer than k = {}", cfg.k),
            ));
        }
        if m1 + m2 > cfg.n {
            return Err(Error::config(
                "phase_override",
                format!("phases need {} points but n = {}", m1 + m2, cfg.n),
            ));
        }
        Ok(ThreePhaseClusterer {
            n: cfg.n,
            k: cfg.k,
            m1,
            m2,
            take_first_point: cfg.take_first_point,
            offline: cfg.offline,
            model,
            rng,
            seen: 0,
            buffer: Vec::with_capacity(m1),
            reference: Vec::new(),
            r_max: vec![0.0; cfg.k],
            close_taken: vec![0; cfg.k],
            close_threshold: close_threshold(cfg.k),
        })
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn close_threshold(&self) -> usize {
        self.close_threshold
    }

    /// Reference centers, empty until phase 1 completes.
    pub fn reference_centers(&self) -> &[Point] {
        &self.reference
    }

    pub fn r_max(&self) -> &[f64] {
        &self.r_max
    }

    pub fn close_counts(&self) -> &[usize] {
        &self.close_taken
    }
}

impl OnlineClusterer for ThreePhaseClusterer {
    fn name(&self) -> &'static str {
        "three_phase"
    }

    fn observe(&mut self, point: &Point) -> Result<Decision> {
        if self.seen >= self.n {
            return Err(Error::Protocol(format!(
                "stream is longer than the announced n = {}",
                self.n
            )));
        }
        let t = self.seen;
        self.seen += 1;

        if t < self.m1 {
            self.buffer.push(point.clone());
            if t + 1 == self.m1 {
                let sample = Dataset::new(std::mem::take(&mut self.buffer))?;
                self.reference = offline_cluster(&sample, self.k, &self.offline, &self.model, &self.rng)?;
            }
            return Ok(if t == 0 && self.take_first_point {
                Decision::take(Reason::FirstPoint)
            } else {
                Decision::SKIP
            });
        }

        if point.dim() != self.reference[0].dim() {
            return Err(Error::invalid("point dimension changed mid-stream"));
        }
        let (owner, d) = nearest(&self.model, point.coords(), &self.reference);

        if t < self.m1 + self.m2 {
            if d > self.r_max[owner] {
                self.r_max[owner] = d;
            }
            return Ok(Decision::SKIP);
        }

        let far = d > self.r_max[owner];
        let close = self.close_taken[owner] <= self.close_threshold;
        if close {
            self.close_taken[owner] += 1;
        }
        Ok(if far {
            Decision::take(Reason::FarPoint)
        } else if close {
            Decision::take(Reason::ClosePoint)
        } else {
            Decision::SKIP
        })
    }

    fn finish(&mut self) -> Result<()> {
        if self.seen != self.n {
            return Err(Error::Protocol(format!(
                "stream ended after {} points, announced n = {}",
                self.seen, self.n
            )));
        }
        Ok(())
    }
}
