//! Online no-substitution clusterers.
//!
//! Every clusterer sees the stream one point at a time and must answer
//! take/skip for the current point before it is shown the next one. Taken
//! centers are never dropped and skipped points are never reconsidered. The
//! drivers in this module enforce that discipline: they hand a clusterer a
//! single borrowed point, record its [`Decision`], and only then pull the next
//! point from the stream.

mod doubling;
mod fft;
mod max_distance;
mod single;
mod three_phase;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::order::StreamOrder;

pub use doubling::DoublingClusterer;
pub use fft::{farthest_first_traversal, FftOnlineClusterer};
pub use max_distance::MaxDistanceClusterer;
pub use single::{FirstPointClusterer, RandomIndexClusterer, TakeAllClusterer};
pub use three_phase::{close_threshold, PhaseOverride, ThreePhaseClusterer, ThreePhaseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    FirstPoint,
    RandomIndex,
    DoublingPick,
    ClosePoint,
    FarPoint,
    MaxDistance,
    FftSelected,
    InitialK,
    /// Reference clusterer that takes every point.
    TakeAll,
    Skip,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::FirstPoint => "first_point",
            Reason::RandomIndex => "random_index",
            Reason::DoublingPick => "doubling_pick",
            Reason::ClosePoint => "close_point",
            Reason::FarPoint => "far_point",
            Reason::MaxDistance => "max_distance",
            Reason::FftSelected => "fft_selected",
            Reason::InitialK => "initial_k",
            Reason::TakeAll => "take_all",
            Reason::Skip => "skip",
        }
    }
}

/// The irrevocable answer for one arrival. `reason == Skip` iff `!take`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    take: bool,
    reason: Reason,
}

impl Decision {
    pub const SKIP: Decision = Decision {
        take: false,
        reason: Reason::Skip,
    };

    /// A take decision. `reason` must not be `Skip`.
    pub fn take(reason: Reason) -> Decision {
        debug_assert_ne!(reason, Reason::Skip);
        Decision { take: true, reason }
    }

    pub fn taken(&self) -> bool {
        self.take
    }

    pub fn reason(&self) -> Reason {
        self.reason
    }
}

/// The streaming clusterer contract.
pub trait OnlineClusterer {
    /// Short identifier used in reports.
    fn name(&self) -> &'static str;

    /// Decides on the next arrival.
    fn observe(&mut self, point: &Point) -> Result<Decision>;

    /// Called once after the last arrival. Clusterers that were promised a
    /// stream length check it here.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

impl<C: OnlineClusterer + ?Sized> OnlineClusterer for Box<C> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn observe(&mut self, point: &Point) -> Result<Decision> {
        (**self).observe(point)
    }

    fn finish(&mut self) -> Result<()> {
        (**self).finish()
    }
}

/// Append-only record of one streamed run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OnlineTrace {
    decisions: Vec<Decision>,
    center_indices: Vec<usize>,
    centers: Vec<Point>,
}

impl OnlineTrace {
    pub fn new() -> Self {
        Self::default()
    }

    fn record(&mut self, point: &Point, decision: Decision) {
        if decision.taken() {
            self.center_indices.push(self.decisions.len());
            self.centers.push(point.clone());
        }
        self.decisions.push(decision);
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    /// Arrival positions that were taken, strictly increasing.
    pub fn center_indices(&self) -> &[usize] {
        &self.center_indices
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn num_centers(&self) -> usize {
        self.centers.len()
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }
}

/// Feeds `points` to `clusterer` lazily: point `t + 1` is not pulled from the
/// iterator until the decision for point `t` is recorded.
pub fn drive<C, I>(clusterer: &mut C, points: I) -> Result<OnlineTrace>
where
    C: OnlineClusterer + ?Sized,
    I: IntoIterator,
    I::Item: std::borrow::Borrow<Point>,
{
    use std::borrow::Borrow;
    let mut trace = OnlineTrace::new();
    for p in points {
        let p = p.borrow();
        let decision = clusterer.observe(p)?;
        trace.record(p, decision);
    }
    clusterer.finish()?;
    Ok(trace)
}

/// Streams `data` in `order` through `clusterer`.
pub fn run_stream<C>(clusterer: &mut C, data: &Dataset, order: &StreamOrder) -> Result<OnlineTrace>
where
    C: OnlineClusterer + ?Sized,
{
    if order.len() != data.len() {
        return Err(Error::invalid(format!(
            "order has {} entries but the dataset has {} points",
            order.len(),
            data.len()
        )));
    }
    drive(clusterer, order.perm().iter().map(|&i| &data[i]))
}
