//! Single-center clusterers for k = 1, plus the take-everything reference.

use rand::Rng as _;

use super::{Decision, OnlineClusterer, Reason};
use crate::data::Point;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Random order: the first arrival is a uniformly random point, so take it and
/// nothing else.
#[derive(Debug, Clone, Default)]
pub struct FirstPointClusterer {
    seen: usize,
}

impl FirstPointClusterer {
    pub fn new() -> Self {
        Self::default()
    }
}

impl OnlineClusterer for FirstPointClusterer {
    fn name(&self) -> &'static str {
        "first_point"
    }

    fn observe(&mut self, _point: &Point) -> Result<Decision> {
        self.seen += 1;
        Ok(if self.seen == 1 {
            Decision::take(Reason::FirstPoint)
        } else {
            Decision::SKIP
        })
    }
}

/// Known `n`, any order: commit to a uniformly random arrival index before
/// seeing any data and take exactly that arrival.
#[derive(Debug, Clone)]
pub struct RandomIndexClusterer {
    n: usize,
    target: usize,
    seen: usize,
}

impl RandomIndexClusterer {
    pub fn new(n: usize, rng: &mut Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        Ok(RandomIndexClusterer {
            n,
            target: rng.gen_range(0..n),
            seen: 0,
        })
    }

    /// The arrival position that will be taken.
    pub fn target(&self) -> usize {
        self.target
    }
}

impl OnlineClusterer for RandomIndexClusterer {
    fn name(&self) -> &'static str {
        "random_index"
    }

    fn observe(&mut self, _point: &Point) -> Result<Decision> {
        if self.seen >= self.n {
            return Err(Error::Protocol(format!(
                "stream is longer than the announced n = {}",
                self.n
            )));
        }
        let t = self.seen;
        self.seen += 1;
        Ok(if t == self.target {
            Decision::take(Reason::RandomIndex)
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

/// Takes every arrival. Cost is always zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct TakeAllClusterer;

impl OnlineClusterer for TakeAllClusterer {
    fn name(&self) -> &'static str {
        "take_all"
    }

    fn observe(&mut self, _point: &Point) -> Result<Decision> {
        Ok(Decision::take(Reason::TakeAll))
    }
}
