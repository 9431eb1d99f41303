use super::*;
use crate::cost::DEFAULT_SUBSET_BUDGET;
use crate::harness::config::GeneratorSpec;
use crate::harness::report::parse_rows;

fn line(v: &[f64]) -> GeneratedInstance {
    GeneratedInstance::from_dataset(Dataset::from_scalars(v).unwrap(), "test")
}

fn blob_config(alg: AlgorithmSpec, trials: usize) -> ExperimentConfig {
    let gen = GeneratorSpec::SeparatedBlobs {
        k: 2,
        per_cluster: 6,
        separation: 100.0,
        spread: 1.0,
        dim: 2,
        seed: Some(5),
    };
    let mut cfg = ExperimentConfig::new(alg, InstanceSpec::from_generator(&gen), trials);
    cfg.order = OrderMode::Random;
    cfg.seed = 17;
    cfg.timing = false;
    cfg
}

#[test]
fn ratio_sentinels() {
    assert_eq!(cost_ratio(0.0, 0.0), 1.0);
    assert_eq!(cost_ratio(3.0, 0.0), f64::INFINITY);
    assert_eq!(cost_ratio(3.0, 2.0), 1.5);
}

#[test]
fn max_distance_hand_trace_takes_two() {
    let inst = line(&[5.0, 1.0, 2.0, 3.0]);
    let row = run_trial(
        &inst,
        &StreamOrder::as_given(4),
        &AlgorithmSpec::MaxDistance,
        &CostModel::squared_euclidean(),
        &Rng::new(0, 0),
        DEFAULT_SUBSET_BUDGET,
    )
    .unwrap();
    assert_eq!(row.centers_taken, 2);
    assert_eq!(row.baseline_kind, BaselineKind::ExactOracle);
    // centers {5, 1}: costs 0, 0, 1, 4; opt_2 = {1 or 2, 5}: 1 + ... = 2
    assert_eq!(row.alg_cost, 5.0);
    assert_eq!(row.baseline_cost, 2.0);
    assert_eq!(row.ratio, 2.5);
}

#[test]
fn alg_cost_is_end_of_stream_cost() {
    let cfg = blob_config(AlgorithmSpec::Doubling { c: 2.0 }, 1);
    let inst = cfg.instance.resolve(None, cfg.seed).unwrap();
    let model = CostModel::squared_euclidean();
    let base = compute_baseline(&inst.dataset, 1, &model, DEFAULT_SUBSET_BUDGET, &Rng::new(0, 9)).unwrap();
    for t in 0..20 {
        let rng = Rng::new(3, t);
        let order = trial_order(&inst, OrderMode::Random, &rng).unwrap();
        let (row, trace) =
            run_trial_with_baseline(&inst, &order, &cfg.algorithm, &model, &rng, &base, 1, false).unwrap();
        assert_eq!(row.centers_taken, trace.center_indices().len());
        assert_eq!(
            row.alg_cost,
            clustering_cost(&inst.dataset, trace.centers(), &model).unwrap()
        );
        if row.centers_taken == 1 {
            assert!(row.ratio >= 1.0 - 1e-9);
        }
        assert_eq!(row.trial_id, t);
    }
}

#[test]
fn single_trial_aggregates_equal_the_row() {
    let report = run_experiment(&blob_config(AlgorithmSpec::MaxDistance, 1)).unwrap();
    let row = &report.rows[0];
    let a = &report.aggregates;
    assert_eq!(a.trials, 1);
    let c = row.centers_taken as f64;
    assert_eq!(
        (a.centers_taken.mean, a.centers_taken.median, a.centers_taken.p99),
        (c, c, c)
    );
    assert_eq!(
        (a.ratio.mean, a.ratio.min, a.ratio.max),
        (row.ratio, row.ratio, row.ratio)
    );
}

#[test]
fn reports_are_deterministic_and_parallel_safe() {
    let mut cfg = blob_config(
        AlgorithmSpec::ThreePhase {
            k: 2,
            alpha: Some(0.25),
            alpha2: Some(0.25),
            take_first_point: true,
            offline: Default::default(),
        },
        40,
    );
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    cfg.parallel = false;
    let c = run_experiment(&cfg).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert_eq!(a.to_csv().unwrap(), c.to_csv().unwrap());
    assert!(a.aggregates.identical(&c.aggregates));
    cfg.seed += 1;
    let d = run_experiment(&cfg).unwrap();
    assert_ne!(a.to_csv().unwrap(), d.to_csv().unwrap());
}

#[test]
fn order_and_algorithm_streams_are_independent() {
    let inst = line(&(0..30).map(f64::from).collect::<Vec<_>>());
    let r1 = Rng::new(1, 4);
    let order = trial_order(&inst, OrderMode::Random, &r1).unwrap();
    let again = trial_order(&inst, OrderMode::Random, &Rng::new(1, 4)).unwrap();
    assert_eq!(order, again);
    assert_eq!(
        trial_order(&inst, OrderMode::Given, &r1).unwrap(),
        StreamOrder::as_given(30)
    );
}

#[test]
fn report_round_trips_through_disk() {
    let mut cfg = blob_config(AlgorithmSpec::FirstPoint, 25);
    cfg.timing = true;
    let report = run_experiment(&cfg).unwrap();
    let dir = std::env::temp_dir().join(format!("nosub-report-{}", std::process::id()));
    report.write(&dir).unwrap();
    let back = load_report(&dir).unwrap();
    assert_eq!(back.rows, report.rows);
    assert_eq!(back.aggregates, report.aggregates);
    assert_eq!(back.config, report.config);
    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert!(csv.starts_with(
        "trial_id,seed,n,k,algorithm,order,centers_taken,alg_cost,baseline_cost,baseline_kind,ratio,runtime_ms\n"
    ));

    let json_path = dir.join("report.json");
    let mut json: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    json["aggregates"]["ratio"]["mean"] = serde_json::json!(12345.0);
    std::fs::write(&json_path, json.to_string()).unwrap();
    assert!(matches!(load_report(&dir), Err(Error::InconsistentReport(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

use serde_json::Value;

#[test]
fn infinite_ratio_is_written_as_inf() {
    // all points equal: opt = 0, and a far point makes the algorithm's cost > 0
    let inst = line(&[0.0, 0.0, 0.0]);
    let base = Baseline {
        kind: BaselineKind::ExactOracle,
        cost: 0.0,
        centers: vec![],
    };
    let (mut row, _) = run_trial_with_baseline(
        &inst,
        &StreamOrder::as_given(3),
        &AlgorithmSpec::FirstPoint,
        &CostModel::squared_euclidean(),
        &Rng::new(0, 0),
        &base,
        1,
        false,
    )
    .unwrap();
    assert_eq!(row.ratio, 1.0);
    row.alg_cost = 4.0;
    row.ratio = cost_ratio(row.alg_cost, row.baseline_cost);
    let csv = report::rows_to_csv(std::slice::from_ref(&row)).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",inf,"), "{csv}");
    assert_eq!(parse_rows(&csv).unwrap(), vec![row.clone()]);
    let json = serde_json::to_string(&row).unwrap();
    assert!(json.contains("\"ratio\":\"inf\""));
    assert_eq!(serde_json::from_str::<TrialResult>(&json).unwrap(), row);
}

#[test]
fn baseline_falls_back_when_over_budget() {
    let data = Dataset::from_scalars(
        &(0..40)
            .map(|i| (i % 10) as f64 + 100.0 * (i / 20) as f64)
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let model = CostModel::squared_euclidean();
    let exact = compute_baseline(&data, 2, &model, DEFAULT_SUBSET_BUDGET, &Rng::new(0, 0)).unwrap();
    assert_eq!(exact.kind, BaselineKind::ExactOracle);
    let approx = compute_baseline(&data, 2, &model, 10, &Rng::new(0, 0)).unwrap();
    assert_eq!(approx.kind, BaselineKind::OfflineBaseline);
    assert!(approx.cost <= exact.cost * 1.05 && approx.cost > 0.0);
}

#[test]
fn parse_rows_rejects_malformed_input() {
    assert!(parse_rows("").is_err());
    assert!(parse_rows("a,b\n").is_err());
    let header = REPORT_HEADER.join(",");
    assert!(parse_rows(&format!("{header}\n1,2,3\n")).is_err());
    assert!(matches!(
        parse_rows(&format!("{header}\n0,0,3,1,x,given,1,1,1,Nope,1,0\n")),
        Err(Error::Parse { line: 2, .. })
    ));
    assert_eq!(parse_rows(&format!("{header}\n")).unwrap(), vec![]);
}

#[test]
fn trace_lines() {
    let inst = line(&[5.0, 1.0, 2.0]);
    let mut c = crate::online::MaxDistanceClusterer::new(CostModel::squared_euclidean());
    let trace = run_stream(&mut c, &inst.dataset, &StreamOrder::as_given(3)).unwrap();
    assert_eq!(
        format_trace(&trace),
        "0,take,first_point\n1,take,max_distance\n2,skip,skip\n"
    );
}
