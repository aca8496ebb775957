//! Planner front end: shared radius schedule, result types and the
//! neighborhood-connection pass used by every planner.

pub mod baselines;
pub mod rrdt;

use serde::{Deserialize, Serialize};

use crate::cspace::{Config, Motion, World};
use crate::graph::{GraphRecord, PlanGraph};
use crate::metrics::{Counters, MetricsSeries};

/// Vanishing radius gamma * (ln(n)/n)^(1/d). Degenerate below n = 3
/// (ln 1 = 0); planners clamp with [`step_radius`].
pub fn epsilon_n(n: f64, d: usize, gamma: f64) -> f64 {
    gamma * (n.ln() / n).powf(1.0 / d as f64)
}

/// The radius schedule planners actually use: `epsilon_n` evaluated at
/// max(n, 3) and clamped below by `eps_min`.
pub fn step_radius(n: u64, d: usize, gamma: f64, eps_min: f64) -> f64 {
    epsilon_n(n.max(3) as f64, d, gamma).max(eps_min)
}

/// Outcome of one planning run.
#[derive(Debug, Clone)]
pub struct PlanResult {
    pub path: Option<Vec<Config>>,
    pub path_cost: Option<f64>,
    pub metrics: MetricsSeries,
    pub graph: PlanGraph,
}

/// Serializable form of a run: the full graph, solution and metric series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanRecord {
    #[serde(flatten)]
    pub graph: GraphRecord,
    pub path: Option<Vec<Vec<f64>>>,
    pub path_cost: Option<f64>,
    pub metrics: MetricsSeries,
}

impl PlanResult {
    pub fn to_record(&mut self) -> PlanRecord {
        PlanRecord {
            graph: self.graph.to_record(),
            path: self
                .path
                .as_ref()
                .map(|p| p.iter().map(|c| c.coords().to_vec()).collect()),
            path_cost: self.path_cost,
            metrics: self.metrics.clone(),
        }
    }
}

/// Cap on failed connection attempts per foreign component in one
/// neighborhood pass.
const MERGE_ATTEMPTS_PER_COMPONENT: usize = 3;

/// Connects a freshly added node to its neighborhood within `radius`.
///
/// Three passes over the neighbors, all in deterministic order:
/// 1. merge: for each foreign component in radius, try connections
///    nearest-first until one validates (or a small attempt cap is hit);
/// 2. choose-parent: among same-component neighbors, add the single edge
///    that best improves the node's cost-to-source, nearest-candidate-first;
/// 3. rewire: add an edge to every neighbor whose cost-to-source strictly
///    improves by routing through the node.
/// Inserted edges relax costs through the graph; every failed validation
/// counts as an invalid connection.
///
/// Returns the component roots that got merged into `node`'s component.
pub(crate) fn connect_neighbors(
    world: &World,
    graph: &mut PlanGraph,
    node: usize,
    radius: f64,
    exclude: Option<usize>,
    counters: &mut Counters,
) -> Vec<usize> {
    let mut merged = Vec::new();
    let q = graph.node(node).clone();
    let mut neighbors = graph.nodes_within(&q, radius, Some(node));
    neighbors.retain(|&u| Some(u) != exclude);
    let mut my_root = graph.canonical_tree_of(node);

    // split by component, nearest-first within each foreign component
    let mut foreign: Vec<(usize, usize)> = Vec::new(); // (root, node)
    for &u in &neighbors {
        let root = graph.canonical_tree_of(u);
        if root != my_root {
            foreign.push((root, u));
        }
    }
    foreign.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            let da = graph.node(a.1).distance(&q);
            let db = graph.node(b.1).distance(&q);
            da.partial_cmp(&db).unwrap().then(a.1.cmp(&b.1))
        })
    });
    let mut attempts_left = MERGE_ATTEMPTS_PER_COMPONENT;
    let mut current_root = usize::MAX;
    for (root, u) in foreign {
        if root != current_root {
            current_root = root;
            attempts_left = MERGE_ATTEMPTS_PER_COMPONENT;
        }
        // an earlier union may have absorbed this root already
        if attempts_left == 0 || graph.canonical_tree_of(u) == my_root {
            continue;
        }
        let m = Motion::new(q.clone(), graph.node(u).clone());
        if world.is_motion_valid(&m) {
            graph.add_edge(node, u);
            counters.merges += 1;
            merged.push(root);
            my_root = graph.canonical_tree_of(node);
        } else {
            counters.invalid_connections += 1;
            attempts_left -= 1;
        }
    }

    // choose-parent: candidates ordered by the cost they would give the node
    let mut parents: Vec<(f64, usize)> = neighbors
        .iter()
        .filter_map(|&u| {
            let c = graph.cost_from_source(u) + graph.node(u).distance(&q);
            c.is_finite().then_some((c, u))
        })
        .collect();
    parents.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    for (through, u) in parents {
        if through >= graph.cost_from_source(node) {
            break;
        }
        let m = Motion::new(q.clone(), graph.node(u).clone());
        if world.is_motion_valid(&m) {
            graph.add_edge(node, u);
            break;
        }
        counters.invalid_connections += 1;
    }

    // rewire: strictly improving outgoing edges only
    let node_cost = graph.cost_from_source(node);
    if node_cost.is_finite() {
        for &u in &neighbors {
            let w = graph.node(u).distance(&q);
            if graph.cost_from_source(node) + w < graph.cost_from_source(u) {
                let m = Motion::new(q.clone(), graph.node(u).clone());
                if world.is_motion_valid(&m) {
                    graph.add_edge(node, u);
                } else {
                    counters.invalid_connections += 1;
                }
            }
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_matches_direct_evaluation() {
        // frozen: (1/e)^(1/2) evaluated independently
        let v = epsilon_n(std::f64::consts::E, 2, 1.0);
        assert!((v - 0.606_530_659_712_633_4).abs() < 1e-12);
    }

    #[test]
    fn epsilon_monotone_from_three() {
        for d in [2usize, 3, 6] {
            let mut prev = epsilon_n(3.0, d, 1.0);
            for n in 4..5000u32 {
                let next = epsilon_n(n as f64, d, 1.0);
                assert!(next <= prev + 1e-15, "not monotone at n={n}, d={d}");
                prev = next;
            }
        }
    }

    #[test]
    fn epsilon_dimension_limit() {
        // for fixed n with ln(n)/n < 1, the radius approaches gamma from below
        let at = |d| epsilon_n(10.0, d, 1.0);
        assert!(at(2) < at(10));
        assert!(at(10) < at(1000));
        assert!(at(1000) < 1.0);
        assert!((at(100_000) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn step_radius_clamps() {
        assert_eq!(step_radius(1, 2, 1.0, 0.0), epsilon_n(3.0, 2, 1.0));
        assert_eq!(step_radius(2, 2, 1.0, 0.0), epsilon_n(3.0, 2, 1.0));
        assert_eq!(step_radius(100, 2, 1.0, 0.5), 0.5);
    }
}
