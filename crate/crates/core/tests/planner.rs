//! End-to-end planner behavior: solution quality, soundness, determinism
//! and the bookkeeping invariants shared by all planners.

use rrdt_core::cspace::{Config, Motion, Robot, World};
use rrdt_core::geom::Polygon;
use rrdt_core::planner::baselines::{plan_baseline, BaselineConfig, BaselineVariant};
use rrdt_core::planner::rrdt::{plan, RrdtConfig};
use rrdt_core::planner::PlanResult;

fn empty_world() -> World {
    World::new(vec![[0.0, 20.0], [0.0, 20.0]], vec![], Robot::Point, 0.1).unwrap()
}

fn endpoints() -> (Config, Config) {
    (Config::new(vec![2.0, 2.0]), Config::new(vec![18.0, 18.0]))
}

fn rrdt_cfg(seed: u64, budget: u64) -> RrdtConfig {
    RrdtConfig {
        node_budget: budget,
        epsilon_gamma: 20.0,
        rng_seed: seed,
        ..RrdtConfig::default()
    }
}

/// Every edge in the produced graph must re-validate, and a returned path
/// must be a connected walk whose cost is the sum of its edge costs.
fn assert_sound(world: &World, result: &PlanResult, q_init: &Config, q_goal: &Config) {
    for &(u, v, w) in result.graph.edges() {
        let m = Motion::new(result.graph.node(u).clone(), result.graph.node(v).clone());
        assert!(world.is_motion_valid(&m), "edge ({u}, {v}) fails revalidation");
        let d = result.graph.node(u).distance(result.graph.node(v));
        assert_eq!(w, d, "edge cost must be the exact Euclidean distance");
    }
    if let Some(path) = &result.path {
        assert_eq!(path[0], *q_init);
        assert_eq!(path[path.len() - 1], *q_goal);
        let mut cost = 0.0;
        for pair in path.windows(2) {
            assert!(world.is_motion_valid(&Motion::new(pair[0].clone(), pair[1].clone())));
            cost += pair[0].distance(&pair[1]);
        }
        assert!((cost - result.path_cost.unwrap()).abs() < 1e-9);
    }
}

#[test]
fn rrdt_empty_world_is_near_optimal() {
    let world = empty_world();
    let (qi, qg) = endpoints();
    let result = plan(&world, qi.clone(), qg.clone(), rrdt_cfg(42, 500)).unwrap();
    assert_sound(&world, &result, &qi, &qg);
    let straight = qi.distance(&qg);
    let cost = result.path_cost.expect("empty world must be solved");
    assert!(
        cost <= 1.05 * straight,
        "cost {cost} exceeds 1.05x straight-line {straight}"
    );
}

#[test]
fn baselines_empty_world_near_optimal() {
    let world = empty_world();
    let (qi, qg) = endpoints();
    for variant in [
        BaselineVariant::RrtStar,
        BaselineVariant::BiRrtStar,
        BaselineVariant::InformedRrtStar,
    ] {
        let cfg = BaselineConfig {
            variant,
            node_budget: 500,
            gamma: 20.0,
            rng_seed: 9,
            ..BaselineConfig::default()
        };
        let result = plan_baseline(&world, qi.clone(), qg.clone(), cfg).unwrap();
        assert_sound(&world, &result, &qi, &qg);
        let cost = result.path_cost.unwrap_or(f64::INFINITY);
        assert!(
            cost <= 1.05 * qi.distance(&qg),
            "{variant:?} cost {cost} too high"
        );
        // local sampling never applies to the baselines
        assert!(result
            .metrics
            .samples
            .iter()
            .all(|s| s.invalid_local_samples == 0));
    }
}

#[test]
fn sealed_goal_chamber_is_unreachable() {
    // The goal sits in a hollow chamber: valid itself, but no motion can
    // cross the surrounding ring.
    let world = World::new(
        vec![[0.0, 20.0], [0.0, 20.0]],
        vec![
            Polygon::rect(14.0, 14.0, 20.0, 15.0),
            Polygon::rect(14.0, 19.0, 20.0, 20.0),
            Polygon::rect(14.0, 14.0, 15.0, 20.0),
            Polygon::rect(19.0, 14.0, 20.0, 20.0),
        ],
        Robot::Point,
        0.1,
    )
    .unwrap();
    let qi = Config::new(vec![2.0, 2.0]);
    let qg = Config::new(vec![17.0, 17.0]);
    assert!(world.is_valid(&qg), "goal must be valid inside the chamber");
    let result = plan(&world, qi.clone(), qg.clone(), rrdt_cfg(3, 400)).unwrap();
    assert!(result.path.is_none());
    assert!(!result.metrics.success);
    assert_sound(&world, &result, &qi, &qg);
}

#[test]
fn identical_seed_reproduces_run_exactly() {
    let world = empty_world();
    let (qi, qg) = endpoints();
    let mut a = plan(&world, qi.clone(), qg.clone(), rrdt_cfg(7, 300)).unwrap();
    let mut b = plan(&world, qi.clone(), qg.clone(), rrdt_cfg(7, 300)).unwrap();
    let ra = serde_json::to_string(&a.to_record()).unwrap();
    let rb = serde_json::to_string(&b.to_record()).unwrap();
    assert_eq!(ra, rb);

    let cfg = BaselineConfig {
        variant: BaselineVariant::BiRrtStar,
        node_budget: 300,
        gamma: 10.0,
        rng_seed: 7,
        ..BaselineConfig::default()
    };
    let mut a = plan_baseline(&world, qi.clone(), qg.clone(), cfg.clone()).unwrap();
    let mut b = plan_baseline(&world, qi, qg, cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a.to_record()).unwrap(),
        serde_json::to_string(&b.to_record()).unwrap()
    );
}

#[test]
fn metrics_series_tracks_node_counter() {
    let world = empty_world();
    let (qi, qg) = endpoints();
    let cfg = rrdt_cfg(15, 300);
    let arms = cfg.num_arms as u64;
    let result = plan(&world, qi, qg, cfg).unwrap();
    let samples = &result.metrics.samples;
    // one record per node added after initialization, ending at the budget
    assert_eq!(samples.len() as u64, 300 - (2 + arms));
    for (i, s) in samples.iter().enumerate() {
        assert_eq!(s.nodes, 2 + arms + 1 + i as u64);
    }
    // cumulative counters never decrease
    for pair in samples.windows(2) {
        assert!(pair[1].invalid_connections >= pair[0].invalid_connections);
        assert!(pair[1].invalid_local_samples >= pair[0].invalid_local_samples);
    }
}

#[test]
fn cost_series_non_increasing_after_first_solution() {
    let world = World::new(
        vec![[0.0, 20.0], [0.0, 20.0]],
        vec![Polygon::rect(8.0, 0.0, 9.0, 15.0)],
        Robot::Point,
        0.1,
    )
    .unwrap();
    let (qi, qg) = endpoints();
    for seed in 0..5 {
        let result = plan(&world, qi.clone(), qg.clone(), rrdt_cfg(seed, 2_000)).unwrap();
        let costs: Vec<f64> = result
            .metrics
            .samples
            .iter()
            .filter_map(|s| s.cost)
            .collect();
        assert!(!costs.is_empty(), "seed {seed} found no solution");
        for pair in costs.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "cost series increased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }
}

#[test]
fn tree_accounting_holds() {
    // components = initial (K + 2) - merges + restarts, checked through the
    // public record: distinct canonical tree ids equals the component count.
    let world = empty_world();
    let (qi, qg) = endpoints();
    let cfg = rrdt_cfg(21, 400);
    let mut result = plan(&world, qi, qg, cfg).unwrap();
    let record = result.to_record();
    let mut roots: Vec<usize> = record.graph.tree_ids.clone();
    roots.sort_unstable();
    roots.dedup();
    assert_eq!(roots.len(), result.graph.tree_components());
}

#[test]
fn informed_runs_and_improves_cost() {
    let world = World::new(
        vec![[0.0, 20.0], [0.0, 20.0]],
        vec![Polygon::rect(8.0, 4.0, 9.0, 16.0)],
        Robot::Point,
        0.1,
    )
    .unwrap();
    let (qi, qg) = endpoints();
    let cfg = BaselineConfig {
        variant: BaselineVariant::InformedRrtStar,
        node_budget: 2_000,
        gamma: 10.0,
        rng_seed: 4,
        ..BaselineConfig::default()
    };
    let result = plan_baseline(&world, qi.clone(), qg.clone(), cfg).unwrap();
    assert_sound(&world, &result, &qi, &qg);
    let costs: Vec<f64> = result
        .metrics
        .samples
        .iter()
        .filter_map(|s| s.cost)
        .collect();
    assert!(!costs.is_empty());
    assert!(costs.last().unwrap() <= costs.first().unwrap());
}
