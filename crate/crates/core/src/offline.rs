//! Offline clustering: k-means++ seeding, Lloyd refinement, and the
//! best-of-restarts driver used for the three-phase clusterer's first phase
//! and for full-data baselines.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{binomial, brute_force_opt, clustering_cost, nearest};
use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::metric::CostModel;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfflineConfig {
    pub restarts: usize,
    pub lloyd_max_iters: usize,
    pub lloyd_rel_tol: f64,
    /// Use the exhaustive optimum when `C(n, k)` is at most this.
    pub exact_threshold: u128,
}

impl Default for OfflineConfig {
    fn default() -> Self {
        OfflineConfig {
            restarts: 8,
            lloyd_max_iters: 50,
            lloyd_rel_tol: 1e-9,
            exact_threshold: 100_000,
        }
    }
}

impl OfflineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be positive"));
        }
        if !(self.lloyd_rel_tol.is_finite() && self.lloyd_rel_tol >= 0.0) {
            return Err(Error::invalid("lloyd_rel_tol must be a finite non-negative number"));
        }
        Ok(())
    }
}

/// k-means++ (D^2-style) seeding under an arbitrary cost: the first center is
/// uniform, later ones are drawn proportionally to the distance to the nearest
/// chosen center. Returned centers have distinct dataset indices.
pub fn kmeanspp_seed(points: &Dataset, k: usize, model: &CostModel, rng: &mut Rng) -> Result<Vec<Point>> {
    Ok(kmeanspp_indices(points, k, model, rng)?
        .into_iter()
        .map(|i| points[i].clone())
        .collect())
}

pub fn kmeanspp_indices(points: &Dataset, k: usize, model: &CostModel, rng: &mut Rng) -> Result<Vec<usize>> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let first = rng.gen_range(0..n);
    chosen.push(first);
    taken[first] = true;
    let mut weight: Vec<f64> = points
        .iter()
        .map(|x| model.dist(x.coords(), points[first].coords()))
        .collect();

    while chosen.len() < k {
        let total: f64 = weight.iter().zip(&taken).filter(|(_, t)| !**t).map(|(w, _)| w).sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for i in 0..n {
                if taken[i] || weight[i] == 0.0 {
                    continue;
                }
                pick = Some(i);
                if target < weight[i] {
                    break;
                }
                target -= weight[i];
            }
            pick.expect("positive total weight implies a candidate")
        } else {
            // Every remaining point coincides with a center: pick uniformly
            // among the untaken indices.
            let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen.push(next);
        taken[next] = true;
        let c = points[next].coords();
        for (w, x) in weight.iter_mut().zip(points.iter()) {
            *w = w.min(model.dist(x.coords(), c));
        }
    }
    Ok(chosen)
}

/// Result of a Lloyd run. `cost_history[0]` is the cost of the input centers,
/// and each further entry is the cost after one assignment/update round.
#[derive(Debug, Clone)]
pub struct LloydOutcome {
    pub centers: Vec<Point>,
    pub cost_history: Vec<f64>,
}

pub fn lloyd_refine(points: &Dataset, centers: &[Point], cfg: &OfflineConfig, model: &CostModel) -> Result<Vec<Point>> {
    lloyd_refine_with_history(points, centers, cfg, model).map(|o| o.centers)
}

/// Lloyd iterations. Empty clusters keep their previous center. Stops when the
/// relative improvement drops below `lloyd_rel_tol` or after `lloyd_max_iters`
/// rounds; a round that would not lower the cost is discarded.
pub fn lloyd_refine_with_history(
    points: &Dataset,
    centers: &[Point],
    cfg: &OfflineConfig,
    model: &CostModel,
) -> Result<LloydOutcome> {
    if !model.is_squared_euclidean() {
        return Err(Error::invalid(format!(
            "Lloyd refinement needs squared Euclidean cost, not {}",
            model.kind()
        )));
    }
    let mut current: Vec<Vec<f64>> = centers.iter().map(|c| c.coords().to_vec()).collect();
    let mut cost = clustering_cost(points, centers, model)?;
    let mut history = vec![cost];
    let dim = points.dim();
    let k = current.len();

    for _ in 0..cfg.lloyd_max_iters {
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for x in points {
            let (j, _) = nearest(model, x.coords(), &current);
            counts[j] += 1;
            for (s, v) in sums[j * dim..(j + 1) * dim].iter_mut().zip(x.coords()) {
                *s += v;
            }
        }
        let updated: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                if counts[j] == 0 {
                    current[j].clone()
                } else {
                    sums[j * dim..(j + 1) * dim]
                        .iter()
                        .map(|s| s / counts[j] as f64)
                        .collect()
                }
            })
            .collect();
        let new_cost: f64 = points.iter().map(|x| nearest(model, x.coords(), &updated).1).sum();
        if new_cost > cost {
            // Only possible through rounding; keep the cheaper centers.
            break;
        }
        let improvement = cost - new_cost;
        let converged = improvement <= cfg.lloyd_rel_tol * cost;
        current = updated;
        cost = new_cost;
        history.push(cost);
        if converged {
            break;
        }
    }
    let centers = current.into_iter().map(Point::new).collect::<Result<Vec<_>>>()?;
    Ok(LloydOutcome {
        centers,
        cost_history: history,
    })
}

/// A k-center solution for `points`. Uses the exhaustive optimum when
/// `C(n, k) <= exact_threshold`, otherwise the cheapest of `restarts` k-means++
/// seedings (each refined by Lloyd under squared Euclidean cost). Restart `r`
/// draws from `rng.split(r)`; cost ties go to the lowest restart.
pub fn offline_cluster(
    points: &Dataset,
    k: usize,
    cfg: &OfflineConfig,
    model: &CostModel,
    rng: &Rng,
) -> Result<Vec<Point>> {
    cfg.validate()?;
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if binomial(n, k) <= cfg.exact_threshold {
        let opt = brute_force_opt(points, k, model, cfg.exact_threshold)?;
        return Ok(opt.center_points(points));
    }
    let candidates: Vec<(Vec<Point>, f64)> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|r| -> Result<(Vec<Point>, f64)> {
            let mut stream = rng.split(r);
            let seeded = kmeanspp_seed(points, k, model, &mut stream)?;
            let centers = if model.is_squared_euclidean() {
                lloyd_refine(points, &seeded, cfg, model)?
            } else {
                seeded
            };
            let cost = clustering_cost(points, &centers, model)?;
            Ok((centers, cost))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, (_, c)) in candidates.iter().enumerate() {
        if *c < candidates[best].1 {
            best = i;
        }
    }
    Ok(candidates.into_iter().nth(best).expect("restarts >= 1").0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{mean_center_cost, DEFAULT_SUBSET_BUDGET};

    fn line(v: &[f64]) -> Dataset {
        Dataset::from_scalars(v).unwrap()
    }

    #[test]
    fn seeding_edge_cases() {
        let sq = CostModel::squared_euclidean();
        let one = line(&[4.0]);
        assert_eq!(kmeanspp_seed(&one, 1, &sq, &mut Rng::new(0, 0)).unwrap(), one.points());
        let d = line(&[1.0, 2.0, 3.0, 2.0]);
        let mut idx = kmeanspp_indices(&d, 4, &sq, &mut Rng::new(3, 1)).unwrap();
        idx.sort_unstable();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert!(kmeanspp_seed(&d, 5, &sq, &mut Rng::new(0, 0)).is_err());
        // all duplicates still yields distinct indices
        let dup = line(&[7.0; 5]);
        let mut idx = kmeanspp_indices(&dup, 3, &sq, &mut Rng::new(1, 1)).unwrap();
        idx.sort_unstable();
        idx.dedup();
        assert_eq!(idx.len(), 3);
    }

    #[test]
    fn seeding_prefers_the_outlier() {
        // First pick is a zero with probability 3/4, after which 100 carries all
        // the weight; if the first pick is 100 the second is a zero.
        let d = line(&[0.0, 0.0, 0.0, 100.0]);
        let sq = CostModel::squared_euclidean();
        let mut hits = 0;
        for s in 0..1000 {
            let c = kmeanspp_seed(&d, 2, &sq, &mut Rng::new(s, 0)).unwrap();
            if c.iter().any(|p| p.coords()[0] == 100.0) {
                hits += 1;
            }
        }
        assert!(hits >= 990, "hits = {hits}");
    }

    #[test]
    fn lloyd_two_cluster_example() {
        let d = line(&[0.0, 1.0, 9.0, 10.0]);
        let sq = CostModel::squared_euclidean();
        let start = vec![Point::scalar(1.0).unwrap(), Point::scalar(9.0).unwrap()];
        let out = lloyd_refine_with_history(&d, &start, &OfflineConfig::default(), &sq).unwrap();
        assert_eq!(out.centers[0].coords(), &[0.5]);
        assert_eq!(out.centers[1].coords(), &[9.5]);
        assert_eq!(*out.cost_history.last().unwrap(), 1.0);
    }

    #[test]
    fn lloyd_fixed_point_and_zero_budget() {
        let d = line(&[0.0, 1.0, 9.0, 10.0]);
        let sq = CostModel::squared_euclidean();
        let opt = vec![Point::scalar(0.5).unwrap(), Point::scalar(9.5).unwrap()];
        let out = lloyd_refine_with_history(&d, &opt, &OfflineConfig::default(), &sq).unwrap();
        assert_eq!(out.centers, opt);
        assert_eq!(out.cost_history.len(), 2);

        let cfg = OfflineConfig {
            lloyd_max_iters: 0,
            ..OfflineConfig::default()
        };
        let start = vec![Point::scalar(3.0).unwrap(), Point::scalar(4.0).unwrap()];
        assert_eq!(lloyd_refine(&d, &start, &cfg, &sq).unwrap(), start);
        assert!(lloyd_refine(&d, &start, &cfg, &CostModel::l1()).is_err());
    }

    #[test]
    fn lloyd_keeps_empty_cluster_center() {
        let d = line(&[0.0, 1.0]);
        let start = vec![Point::scalar(0.0).unwrap(), Point::scalar(100.0).unwrap()];
        let out = lloyd_refine(&d, &start, &OfflineConfig::default(), &CostModel::squared_euclidean()).unwrap();
        assert_eq!(out[1].coords(), &[100.0]);
        assert_eq!(out[0].coords(), &[0.5]);
    }

    #[test]
    fn lloyd_cost_never_increases() {
        let mut rng = Rng::new(11, 0);
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
            .collect();
        let d = Dataset::from_rows(rows).unwrap();
        let sq = CostModel::squared_euclidean();
        for s in 0..10 {
            let seed = kmeanspp_seed(&d, 5, &sq, &mut Rng::new(s, 0)).unwrap();
            let out = lloyd_refine_with_history(&d, &seed, &OfflineConfig::default(), &sq).unwrap();
            for w in out.cost_history.windows(2) {
                assert!(w[1] <= w[0]);
            }
        }
    }

    #[test]
    fn small_inputs_delegate_to_the_oracle() {
        let d = line(&[0.0, 3.0, 4.0, 10.0, 11.0, 30.0]);
        let sq = CostModel::squared_euclidean();
        let got = offline_cluster(&d, 3, &OfflineConfig::default(), &sq, &Rng::new(0, 0)).unwrap();
        let opt = brute_force_opt(&d, 3, &sq, DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(clustering_cost(&d, &got, &sq).unwrap(), opt.cost);
        assert!(offline_cluster(&d, 7, &OfflineConfig::default(), &sq, &Rng::new(0, 0)).is_err());
    }

    #[test]
    fn single_cluster_reaches_the_centroid() {
        let mut rng = Rng::new(5, 5);
        let rows: Vec<Vec<f64>> = (0..500)
            .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
            .collect();
        let d = Dataset::from_rows(rows).unwrap();
        let sq = CostModel::squared_euclidean();
        let cfg = OfflineConfig {
            exact_threshold: 0,
            ..OfflineConfig::default()
        };
        let c = offline_cluster(&d, 1, &cfg, &sq, &Rng::new(1, 0)).unwrap();
        let got = clustering_cost(&d, &c, &sq).unwrap();
        let want = mean_center_cost(&d, &sq).unwrap();
        assert!((got - want).abs() <= 1e-9 * want);
    }

    #[test]
    fn offline_is_deterministic_and_beats_its_seed() {
        let mut rng = Rng::new(8, 8);
        let rows: Vec<Vec<f64>> = (0..400)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let d = Dataset::from_rows(rows).unwrap();
        let sq = CostModel::squared_euclidean();
        let cfg = OfflineConfig {
            exact_threshold: 0,
            restarts: 1,
            ..OfflineConfig::default()
        };
        let base = Rng::new(77, 0);
        let a = offline_cluster(&d, 4, &cfg, &sq, &base).unwrap();
        let b = offline_cluster(&d, 4, &cfg, &sq, &base).unwrap();
        assert_eq!(a, b);
        let seeded = kmeanspp_seed(&d, 4, &sq, &mut base.split(0)).unwrap();
        assert!(clustering_cost(&d, &a, &sq).unwrap() <= clustering_cost(&d, &seeded, &sq).unwrap());
    }
}
