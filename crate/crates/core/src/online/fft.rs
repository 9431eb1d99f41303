//! Farthest-first traversal and the online clusterer built on it.

use super::{Decision, OnlineClusterer, Reason};
use crate::data::Point;
use crate::error::{Error, Result};
use crate::metric::CostModel;

/// Reusable buffers for repeated traversals.
#[derive(Debug, Clone, Default)]
struct Scratch {
    min_dist: Vec<f64>,
    in_set: Vec<bool>,
}

/// Greedy traversal over `len` points addressed through `at`. Starts from
/// `start`, then repeatedly appends the point whose distance to the selected
/// set is largest (ties to the lowest index). Stops early once `stop_at` is
/// selected, if given. Selected indices are written to `out` in order.
#[allow(clippy::too_many_arguments)]
fn traverse<'a>(
    len: usize,
    at: impl Fn(usize) -> &'a [f64],
    start: usize,
    k: usize,
    model: &CostModel,
    scratch: &mut Scratch,
    stop_at: Option<usize>,
    out: &mut Vec<usize>,
) {
    out.clear();
    scratch.min_dist.clear();
    scratch.in_set.clear();
    scratch.in_set.resize(len, false);
    let s = at(start);
    scratch.min_dist.extend((0..len).map(|i| model.dist(at(i), s)));
    scratch.in_set[start] = true;
    out.push(start);
    if stop_at == Some(start) {
        return;
    }

    while out.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..len {
            if scratch.in_set[i] {
                continue;
            }
            let d = scratch.min_dist[i];
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        let (v, _) = best.expect("k <= len leaves a candidate");
        scratch.in_set[v] = true;
        out.push(v);
        if stop_at == Some(v) || out.len() == k {
            return;
        }
        let pv = at(v);
        for i in 0..len {
            if !scratch.in_set[i] {
                let d = model.dist(at(i), pv);
                if d < scratch.min_dist[i] {
                    scratch.min_dist[i] = d;
                }
            }
        }
    }
}

/// Farthest-first traversal of `points` from `start`: returns `k` indices in
/// selection order.
pub fn farthest_first_traversal(points: &[Point], start: usize, k: usize, model: &CostModel) -> Result<Vec<usize>> {
    if k == 0 || k > points.len() {
        return Err(Error::invalid(format!(
            "need 1 <= k <= |M|, got k = {k}, |M| = {}",
            points.len()
        )));
    }
    if start >= points.len() {
        return Err(Error::invalid(format!("start index {start} out of range")));
    }
    let dim = points[0].dim();
    if points.iter().any(|p| p.dim() != dim) {
        return Err(Error::invalid("points have mixed dimensions"));
    }
    let mut out = Vec::with_capacity(k);
    traverse(
        points.len(),
        |i| points[i].coords(),
        start,
        k,
        model,
        &mut Scratch::default(),
        None,
        &mut out,
    );
    Ok(out)
}

/// Unknown `n`, random order, any `k >= 2`. Remembers every arrival; the first
/// `k` are taken, and each later arrival is taken iff a farthest-first
/// traversal of everything seen so far, started from the first arrival,
/// selects it. Membership is by arrival index, so duplicates of a selected
/// value are not taken.
#[derive(Debug, Clone)]
pub struct FftOnlineClusterer {
    k: usize,
    model: CostModel,
    dim: usize,
    /// Flattened coordinates of every arrival.
    memory: Vec<f64>,
    seen: usize,
    scratch: Scratch,
    selected: Vec<usize>,
}

impl FftOnlineClusterer {
    pub fn new(k: usize, model: CostModel) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("k must be at least 2, got {k}")));
        }
        Ok(FftOnlineClusterer {
            k,
            model,
            dim: 0,
            memory: Vec::new(),
            seen: 0,
            scratch: Scratch::default(),
            selected: Vec::with_capacity(k),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of arrivals held in memory.
    pub fn memory_len(&self) -> usize {
        self.seen
    }

    /// Coordinates of the first arrival.
    pub fn anchor(&self) -> Option<&[f64]> {
        (self.seen > 0).then(|| &self.memory[..self.dim])
    }
}

impl OnlineClusterer for FftOnlineClusterer {
    fn name(&self) -> &'static str {
        "fft"
    }

    fn observe(&mut self, point: &Point) -> Result<Decision> {
        if self.seen == 0 {
            self.dim = point.dim();
        } else if point.dim() != self.dim {
            return Err(Error::invalid("point dimension changed mid-stream"));
        }
        self.memory.extend_from_slice(point.coords());
        let t = self.seen;
        self.seen += 1;
        if t < self.k {
            return Ok(Decision::take(Reason::InitialK));
        }
        let dim = self.dim;
        let memory = &self.memory;
        traverse(
            self.seen,
            |i| &memory[i * dim..(i + 1) * dim],
            0,
            self.k,
            &self.model,
            &mut self.scratch,
            Some(t),
            &mut self.selected,
        );
        Ok(if self.selected.contains(&t) {
            Decision::take(Reason::FftSelected)
        } else {
            Decision::SKIP
        })
    }
}
