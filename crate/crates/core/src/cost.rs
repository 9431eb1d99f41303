//! Clustering cost, nearest-center assignment and the exhaustive optimum.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Point};
use crate::error::{Error, Result};
use crate::metric::CostModel;

/// Default cap on the number of k-subsets `brute_force_opt` will enumerate.
pub const DEFAULT_SUBSET_BUDGET: u128 = 10_000_000;

/// Distance matrices are precomputed only up to this many points.
const MATRIX_LIMIT: usize = 2048;

/// Nearest-center assignment of every point. Ties go to the lowest center index.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub owner: Vec<usize>,
    pub per_point_cost: Vec<f64>,
}

impl Assignment {
    pub fn total_cost(&self) -> f64 {
        self.per_point_cost.iter().sum()
    }
}

fn check_centers(data: &Dataset, centers: &[Point]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::invalid("at least one center is required"));
    }
    if let Some(c) = centers.iter().find(|c| c.dim() != data.dim()) {
        return Err(Error::invalid(format!(
            "center has dimension {}, dataset has {}",
            c.dim(),
            data.dim()
        )));
    }
    Ok(())
}

/// Index and distance of the nearest center; ties go to the lowest index.
#[inline]
pub(crate) fn nearest<C: AsRef<[f64]>>(model: &CostModel, x: &[f64], centers: &[C]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = model.dist(x, c.as_ref());
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

pub fn assign(data: &Dataset, centers: &[Point], model: &CostModel) -> Result<Assignment> {
    check_centers(data, centers)?;
    let (owner, per_point_cost) = data.iter().map(|x| nearest(model, x.coords(), centers)).unzip();
    Ok(Assignment { owner, per_point_cost })
}

/// Above this many centers, 1-D costs use a sorted-center search.
const SORTED_SEARCH_MIN: usize = 32;

/// `sum_t min_j d(x_t, c_j)`, accumulated sequentially in dataset order.
pub fn clustering_cost(data: &Dataset, centers: &[Point], model: &CostModel) -> Result<f64> {
    check_centers(data, centers)?;
    if data.dim() == 1 && centers.len() > SORTED_SEARCH_MIN {
        return Ok(line_cost(data, centers, model));
    }
    Ok(data.iter().map(|x| nearest(model, x.coords(), centers).1).sum())
}

/// On a line every supported distance grows with `|x - c|`, so the nearest
/// center is a sorted neighbour of `x`. Same per-point minima and summation
/// order as the linear scan.
fn line_cost(data: &Dataset, centers: &[Point], model: &CostModel) -> f64 {
    let mut sorted: Vec<f64> = centers.iter().map(|c| c.coords()[0]).collect();
    sorted.sort_by(f64::total_cmp);
    data.iter()
        .map(|x| {
            let i = sorted.partition_point(|&c| c < x.coords()[0]);
            let mut best = f64::INFINITY;
            for c in &sorted[i.saturating_sub(1)..(i + 1).min(sorted.len())] {
                best = best.min(model.dist(x.coords(), std::slice::from_ref(c)));
            }
            best
        })
        .sum()
}

/// Exact optimum over in-dataset centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    /// Dataset indices, ascending.
    pub centers: Vec<usize>,
    pub cost: f64,
}

impl OptResult {
    pub fn center_points(&self, data: &Dataset) -> Vec<Point> {
        self.centers.iter().map(|&i| data[i].clone()).collect()
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Minimum clustering cost over every k-subset of dataset points, enumerated
/// lexicographically. Among equal-cost subsets the lexicographically smallest
/// index set wins.
pub fn brute_force_opt(data: &Dataset, k: usize, model: &CostModel, budget: u128) -> Result<OptResult> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let subsets = binomial(n, k);
    if subsets > budget {
        return Err(Error::SubsetBudget { n, k, subsets, budget });
    }

    let matrix = (n <= MATRIX_LIMIT).then(|| {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = model.dist(data[i].coords(), data[j].coords());
            }
        }
        m
    });
    let dist = |i: usize, j: usize| -> f64 {
        match &matrix {
            Some(m) => m[i * n + j],
            None => model.dist(data[i].coords(), data[j].coords()),
        }
    };

    // prefix[level][i] = distance from point i to its nearest among the first
    // `level + 1` chosen centers.
    let mut prefix = vec![vec![0.0; n]; k];
    let mut chosen = vec![0usize; k];
    let mut best = OptResult {
        centers: Vec::new(),
        cost: f64::INFINITY,
    };

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        level: usize,
        start: usize,
        n: usize,
        k: usize,
        dist: &dyn Fn(usize, usize) -> f64,
        prefix: &mut [Vec<f64>],
        chosen: &mut [usize],
        best: &mut OptResult,
    ) {
        for c in start..=(n - (k - level)) {
            chosen[level] = c;
            if level + 1 == k {
                let cost: f64 = (0..n)
                    .map(|i| {
                        let d = dist(i, c);
                        if level == 0 {
                            d
                        } else {
                            d.min(prefix[level - 1][i])
                        }
                    })
                    .sum();
                if cost < best.cost {
                    best.cost = cost;
                    best.centers.clear();
                    best.centers.extend_from_slice(chosen);
                }
            } else {
                let (head, tail) = prefix.split_at_mut(level);
                let row = &mut tail[0];
                for (i, slot) in row.iter_mut().enumerate() {
                    let d = dist(i, c);
                    *slot = if level == 0 { d } else { d.min(head[level - 1][i]) };
                }
                recurse(level + 1, c + 1, n, k, dist, prefix, chosen, best);
            }
        }
    }

    recurse(0, 0, n, k, &dist, &mut prefix, &mut chosen, &mut best);
    Ok(best)
}

/// Exact expected cost of a uniformly random single in-dataset center:
/// `(1/n) sum_j sum_i d(x_i, x_j)`.
pub fn expected_random_center_cost(data: &Dataset, model: &CostModel) -> f64 {
    let n = data.len();
    let total: f64 = data
        .iter()
        .map(|cj| data.iter().map(|xi| model.dist(xi.coords(), cj.coords())).sum::<f64>())
        .sum();
    total / n as f64
}

/// Coordinate-wise mean of the dataset.
pub fn centroid(data: &Dataset) -> Point {
    let mut mu = vec![0.0; data.dim()];
    for p in data {
        for (m, c) in mu.iter_mut().zip(p.coords()) {
            *m += c;
        }
    }
    let n = data.len() as f64;
    mu.iter_mut().for_each(|m| *m /= n);
    Point::new(mu).expect("mean of finite points is finite")
}

/// `sum_i ||x_i - mu||^2` with `mu` the centroid. Only defined for squared
/// Euclidean cost.
pub fn mean_center_cost(data: &Dataset, model: &CostModel) -> Result<f64> {
    if !model.is_squared_euclidean() {
        return Err(Error::invalid(format!(
            "the centroid is only the optimal continuous center for squared Euclidean cost, not {}",
            model.kind()
        )));
    }
    let mu = centroid(data);
    Ok(data.iter().map(|x| model.dist(x.coords(), mu.coords())).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(v: &[f64]) -> Dataset {
        Dataset::from_scalars(v).unwrap()
    }

    fn pts(v: &[f64]) -> Vec<Point> {
        v.iter().map(|&x| Point::scalar(x).unwrap()).collect()
    }

    /// Independent oracle: try every k-subset via bitmasks, no pruning.
    fn bitmask_opt(data: &Dataset, k: usize, model: &CostModel) -> (Vec<usize>, f64) {
        let n = data.len();
        let mut best: Option<(Vec<usize>, f64)> = None;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let cost = clustering_cost(data, &data.select(&idx).unwrap().into_points(), model).unwrap();
            let better = match &best {
                None => true,
                Some((bi, bc)) => cost < *bc || (cost == *bc && idx < *bi),
            };
            if better {
                best = Some((idx, cost));
            }
        }
        best.unwrap()
    }

    #[test]
    fn clustering_cost_examples() {
        let sq = CostModel::squared_euclidean();
        assert_eq!(
            clustering_cost(&line(&[0.0, 1.0, 2.0]), &pts(&[0.0, 2.0]), &sq).unwrap(),
            1.0
        );
        assert_eq!(
            clustering_cost(&line(&[0.0, 1.0, 10.0]), &pts(&[1.0, 10.0]), &sq).unwrap(),
            1.0
        );
        let d = Dataset::from_rows(vec![vec![1.0, 2.0], vec![-3.0, 0.5], vec![4.0, 4.0]]).unwrap();
        for m in [sq, CostModel::l1(), CostModel::euclidean()] {
            assert_eq!(clustering_cost(&d, d.points(), &m).unwrap(), 0.0);
        }
        assert!(clustering_cost(&d, &[], &sq).is_err());
        assert!(clustering_cost(&d, &pts(&[1.0]), &sq).is_err());
    }

    #[test]
    fn assignment_ties_go_to_lowest_center() {
        let d = line(&[5.0]);
        let a = assign(&d, &pts(&[4.0, 6.0, 4.0]), &CostModel::squared_euclidean()).unwrap();
        assert_eq!(a.owner, vec![0]);
        assert_eq!(a.per_point_cost, vec![1.0]);
    }

    #[test]
    fn brute_force_examples() {
        let sq = CostModel::squared_euclidean();
        let r = brute_force_opt(&line(&[0.0, 1.0, 10.0]), 2, &sq, DEFAULT_SUBSET_BUDGET).unwrap();
        // {0,10} and {1,10} both cost 1; lexicographic tie-break keeps {0, 2}.
        assert_eq!(r.cost, 1.0);
        assert_eq!(r.centers, vec![0, 2]);

        let r = brute_force_opt(&line(&[0.0, 4.0, 5.0]), 1, &sq, DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(r.centers, vec![1]);
        assert_eq!(r.cost, 17.0);

        let d = line(&[3.0, -1.0, 8.0, 2.5]);
        let r = brute_force_opt(&d, 4, &sq, DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn brute_force_budget_and_arguments() {
        let d = line(&(0..30).map(f64::from).collect::<Vec<_>>());
        match brute_force_opt(&d, 15, &CostModel::l1(), DEFAULT_SUBSET_BUDGET) {
            Err(Error::SubsetBudget { subsets, .. }) => assert_eq!(subsets, 155_117_520),
            other => panic!("unexpected {other:?}"),
        }
        assert!(brute_force_opt(&d, 0, &CostModel::l1(), DEFAULT_SUBSET_BUDGET).is_err());
        assert!(brute_force_opt(&d, 31, &CostModel::l1(), DEFAULT_SUBSET_BUDGET).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(200, 0), 1);
    }

    #[test]
    fn random_center_examples() {
        let sq = CostModel::squared_euclidean();
        assert_eq!(expected_random_center_cost(&line(&[0.0, 1.0]), &sq), 1.0);
        assert_eq!(mean_center_cost(&line(&[0.0, 1.0]), &sq).unwrap(), 0.5);
        assert_eq!(expected_random_center_cost(&line(&[3.0]), &CostModel::l1()), 0.0);
        assert_eq!(expected_random_center_cost(&line(&[0.0, 1.0, 2.0]), &sq), 4.0);
        assert_eq!(mean_center_cost(&line(&[0.0, 1.0, 2.0]), &sq).unwrap(), 2.0);
        assert_eq!(mean_center_cost(&line(&[0.0, 2.0]), &sq).unwrap(), 2.0);
        let single = Dataset::from_rows(vec![vec![1.0, 1.0]]).unwrap();
        assert_eq!(mean_center_cost(&single, &sq).unwrap(), 0.0);
        assert!(mean_center_cost(&single, &CostModel::l1()).is_err());
    }

    fn small_dataset() -> impl Strategy<Value = Dataset> {
        (1usize..4).prop_flat_map(|dim| {
            proptest::collection::vec(proptest::collection::vec(-20.0f64..20.0, dim), 1..9)
                .prop_map(|rows| Dataset::from_rows(rows).unwrap())
        })
    }

    proptest! {
        #[test]
        fn brute_force_matches_bitmask_oracle(data in small_dataset(), k in 1usize..5) {
            let k = k.min(data.len());
            let model = CostModel::squared_euclidean();
            let fast = brute_force_opt(&data, k, &model, DEFAULT_SUBSET_BUDGET).unwrap();
            let (idx, cost) = bitmask_opt(&data, k, &model);
            prop_assert_eq!(fast.centers, idx);
            // Same terms, possibly grouped differently by min(): exact up to rounding.
            prop_assert!((fast.cost - cost).abs() <= 1e-9 * cost.max(1.0));
        }

        #[test]
        fn line_search_matches_linear_scan(
            xs in proptest::collection::vec(-100.0f64..100.0, 1..80),
            cs in proptest::collection::vec(-100.0f64..100.0, 33..120),
            p in 1.0f64..4.0,
        ) {
            let data = line(&xs);
            let centers = pts(&cs);
            for model in [CostModel::squared_euclidean(), CostModel::l1(), CostModel::lp_to_the_p(p).unwrap()] {
                let scan: f64 = data.iter().map(|x| nearest(&model, x.coords(), &centers).1).sum();
                prop_assert_eq!(clustering_cost(&data, &centers, &model).unwrap().to_bits(), scan.to_bits());
            }
        }

        #[test]
        fn opt_is_monotone_in_k(data in small_dataset()) {
            let model = CostModel::l1();
            let mut prev = f64::INFINITY;
            for k in 1..=data.len() {
                let c = brute_force_opt(&data, k, &model, DEFAULT_SUBSET_BUDGET).unwrap().cost;
                prop_assert!(c <= prev);
                prev = c;
            }
        }

        #[test]
        fn assignment_agrees_with_cost(data in small_dataset(), ncent in 1usize..4) {
            let ncent = ncent.min(data.len());
            let centers: Vec<Point> = data.points()[..ncent].to_vec();
            let model = CostModel::euclidean();
            let a = assign(&data, &centers, &model).unwrap();
            prop_assert_eq!(a.total_cost(), clustering_cost(&data, &centers, &model).unwrap());
            for (i, x) in data.iter().enumerate() {
                for c in &centers {
                    prop_assert!(a.per_point_cost[i] <= model.dist(x.coords(), c.coords()));
                }
            }
        }

        #[test]
        fn random_center_is_twice_the_centroid_cost(data in small_dataset()) {
            let sq = CostModel::squared_euclidean();
            let lhs = expected_random_center_cost(&data, &sq);
            let rhs = 2.0 * mean_center_cost(&data, &sq).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(rhs).max(1e-12));
        }

        #[test]
        fn random_center_within_2d_of_best_point(data in small_dataset(), p in 1.0f64..3.0) {
            for model in [CostModel::l1(), CostModel::lp_to_the_p(p).unwrap()] {
                let lhs = expected_random_center_cost(&data, &model);
                let best = brute_force_opt(&data, 1, &model, DEFAULT_SUBSET_BUDGET).unwrap().cost;
                prop_assert!(lhs <= 2.0 * model.triangle_constant() * best + 1e-9);
            }
        }
    }
}
