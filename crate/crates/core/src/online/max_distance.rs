use super::{Decision, OnlineClusterer, Reason};
use crate::data::Point;
use crate::error::{Error, Result};
use crate::metric::CostModel;

/// k = 2, unknown `n`, random order. Keeps only the first arrival and the
/// largest distance to it seen so far; takes a point whenever it is strictly
/// farther from the first arrival than every earlier point.
#[derive(Debug, Clone)]
pub struct MaxDistanceClusterer {
    model: CostModel,
    anchor: Option<Point>,
    max_dis: f64,
}

impl MaxDistanceClusterer {
    pub fn new(model: CostModel) -> Self {
        MaxDistanceClusterer {
            model,
            anchor: None,
            max_dis: 0.0,
        }
    }

    pub fn max_dis(&self) -> f64 {
        self.max_dis
    }
}

impl OnlineClusterer for MaxDistanceClusterer {
    fn name(&self) -> &'static str {
        "max_distance"
    }

    fn observe(&mut self, point: &Point) -> Result<Decision> {
        let Some(anchor) = &self.anchor else {
            self.anchor = Some(point.clone());
            return Ok(Decision::take(Reason::FirstPoint));
        };
        if anchor.dim() != point.dim() {
            return Err(Error::invalid("point dimension changed mid-stream"));
        }
        let d = self.model.dist(point.coords(), anchor.coords());
        if d > self.max_dis {
            self.max_dis = d;
            Ok(Decision::take(Reason::MaxDistance))
        } else {
            Ok(Decision::SKIP)
        }
    }
}
