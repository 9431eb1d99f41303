use rand::Rng as _;

use super::{Decision, OnlineClusterer, Reason};
use crate::data::Point;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// k = 1 with unknown `n` and arbitrary order: guess `n' = 1, c, c^2, ...` and
/// run the random-index rule inside each guessed epoch.
///
/// Epoch `e` covers `ceil(n'_e)` arrivals where `n'_e = c^e` is tracked as a
/// real. One arrival per epoch is taken, at an offset drawn uniformly when the
/// epoch starts. A growth factor below 2 is raised to 2.
#[derive(Debug, Clone)]
pub struct DoublingClusterer {
    growth: f64,
    rng: Rng,
    /// Arrivals seen so far.
    t: u64,
    /// Arrivals before the current epoch.
    epoch_start: u64,
    epoch_len: u64,
    guess: f64,
    /// 1-based offset of the pick inside the current epoch.
    pick: u64,
    epochs_started: usize,
}

impl DoublingClusterer {
    pub fn new(c: f64, rng: Rng) -> Result<Self> {
        if !(c.is_finite() && c > 1.0) {
            return Err(Error::invalid(format!("growth factor must be > 1, got {c}")));
        }
        Ok(DoublingClusterer {
            growth: c.max(2.0),
            rng,
            t: 0,
            epoch_start: 0,
            epoch_len: 1,
            guess: 1.0,
            pick: 1,
            epochs_started: 1,
        })
    }

    /// The growth factor actually used (at least 2).
    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn epochs_started(&self) -> usize {
        self.epochs_started
    }
}

impl OnlineClusterer for DoublingClusterer {
    fn name(&self) -> &'static str {
        "doubling"
    }

    fn observe(&mut self, _point: &Point) -> Result<Decision> {
        self.t += 1;
        let decision = if self.t == self.epoch_start + self.pick {
            Decision::take(Reason::DoublingPick)
        } else {
            Decision::SKIP
        };
        if self.t == self.epoch_start + self.epoch_len {
            self.epoch_start += self.epoch_len;
            self.guess *= self.growth;
            self.epoch_len = self.guess.ceil() as u64;
            self.pick = self.rng.gen_range(1..=self.epoch_len);
            self.epochs_started += 1;
        }
        Ok(decision)
    }
}
