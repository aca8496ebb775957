//! Comparison planners: RRT*, bidirectional RRT* and informed RRT*.
//!
//! All three share the cspace interfaces, the graph machinery and the
//! metrics contract of the disjointed-tree planner; invalid local sampling
//! does not apply to them and stays zero.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::cspace::{Config, Motion, World};
use crate::error::{Error, Result};
use crate::graph::PlanGraph;
use crate::metrics::{Counters, MetricsSample, MetricsSeries};
use crate::planner::{connect_neighbors, epsilon_n, step_radius, PlanResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineVariant {
    #[default]
    RrtStar,
    BiRrtStar,
    InformedRrtStar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub variant: BaselineVariant,
    pub node_budget: u64,
    /// Probability of sampling the goal (or the opposite root for the
    /// bidirectional variant) instead of a uniform configuration.
    pub goal_bias: f64,
    /// Steering step length; when absent it defaults to the radius schedule
    /// evaluated at n = 3, mirroring the local planners' first steps.
    pub steer_epsilon: Option<f64>,
    /// Gamma of the rewiring/connection radius schedule.
    pub gamma: f64,
    pub epsilon_min_fraction: f64,
    pub rng_seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            variant: BaselineVariant::RrtStar,
            node_budget: 10_000,
            goal_bias: 0.05,
            steer_epsilon: None,
            gamma: 10.0,
            epsilon_min_fraction: 0.001,
            rng_seed: 0,
        }
    }
}

/// Uniform rejection sampling inside the prolate hyperspheroid
/// { q : |q - a| + |q - b| <= best }. Counts every draw; falls back to a
/// point on the a..b segment (always inside) if rejection stalls.
fn sample_in_spheroid<R: Rng>(
    rng: &mut R,
    world: &World,
    a: &Config,
    b: &Config,
    best: f64,
    sampled: &mut u64,
) -> Config {
    for _ in 0..10_000 {
        let coords: Vec<f64> = world
            .bounds()
            .iter()
            .map(|bd| rng.random_range(bd[0]..bd[1]))
            .collect();
        *sampled += 1;
        let q = Config::new(coords);
        if q.distance(a) + q.distance(b) <= best {
            return q;
        }
    }
    let t: f64 = rng.random();
    *sampled += 1;
    a.lerp(b, t)
}

struct BaselinePlanner<'w> {
    world: &'w World,
    cfg: BaselineConfig,
    graph: PlanGraph,
    rng: ChaCha8Rng,
    n: u64,
    counters: Counters,
    series: Vec<MetricsSample>,
    goal_node: usize,
    init_tree: usize,
    goal_tree: usize,
    steer: f64,
    eps_min: f64,
    q_init: Config,
    q_goal: Config,
}

impl<'w> BaselinePlanner<'w> {
    fn new(world: &'w World, q_init: Config, q_goal: Config, cfg: BaselineConfig) -> Result<Self> {
        if !(0.0..=1.0).contains(&cfg.goal_bias) {
            return Err(Error::InvalidParameter {
                name: "goal_bias",
                message: format!("must lie in [0, 1], got {}", cfg.goal_bias),
            });
        }
        if cfg.node_budget < 2 {
            return Err(Error::InvalidParameter {
                name: "node_budget",
                message: "budget must be at least 2".into(),
            });
        }
        if !(cfg.gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                message: "gamma must be positive".into(),
            });
        }
        for (q, which) in [(&q_init, "q_init"), (&q_goal, "q_goal")] {
            if q.dim() != world.dim() || !world.is_valid(q) {
                return Err(Error::InvalidEndpoint {
                    which: if which == "q_init" { "q_init" } else { "q_goal" },
                    reason: "endpoint invalid in world".into(),
                });
            }
        }
        let mut graph = PlanGraph::new();
        let init_tree = graph.new_tree();
        let goal_tree = graph.new_tree();
        let init_node = graph.add_node(q_init.clone(), init_tree);
        let goal_node = graph.add_node(q_goal.clone(), goal_tree);
        graph.set_source(init_node);
        let steer = cfg
            .steer_epsilon
            .unwrap_or_else(|| epsilon_n(3.0, world.dim(), cfg.gamma));
        let eps_min = cfg.epsilon_min_fraction * world.diagonal();
        Ok(BaselinePlanner {
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            world,
            cfg,
            graph,
            n: 2,
            counters: Counters::default(),
            series: Vec::new(),
            goal_node,
            init_tree,
            goal_tree,
            steer,
            eps_min,
            q_init,
            q_goal,
        })
    }

    fn radius(&self) -> f64 {
        step_radius(self.n, self.world.dim(), self.cfg.gamma, self.eps_min)
    }

    fn record(&mut self) {
        let cost = self.graph.cost_from_source(self.goal_node);
        self.series.push(MetricsSample {
            nodes: self.n,
            cost: cost.is_finite().then_some(cost),
            invalid_connections: self.counters.invalid_connections,
            invalid_local_samples: 0,
        });
    }

    fn uniform_sample(&mut self) -> Config {
        let coords: Vec<f64> = self
            .world
            .bounds()
            .iter()
            .map(|b| self.rng.random_range(b[0]..b[1]))
            .collect();
        self.counters.sampled_points += 1;
        Config::new(coords)
    }

    /// Draw the next target configuration for a tree rooted toward `bias`.
    fn sample_target(&mut self, bias: &Config, informed: bool) -> Config {
        if self.rng.random::<f64>() < self.cfg.goal_bias {
            self.counters.sampled_points += 1;
            return bias.clone();
        }
        let best = self.graph.cost_from_source(self.goal_node);
        if informed && best.is_finite() {
            let (a, b) = (self.q_init.clone(), self.q_goal.clone());
            sample_in_spheroid(
                &mut self.rng,
                self.world,
                &a,
                &b,
                best,
                &mut self.counters.sampled_points,
            )
        } else {
            self.uniform_sample()
        }
    }

    /// Steer-and-extend one tree toward `target`; returns the new node.
    fn extend(&mut self, component: usize, target: &Config) -> Option<usize> {
        let near = self.graph.nearest_in_component(target, component)?;
        let near_q = self.graph.node(near).clone();
        let d = near_q.distance(target);
        if d < 1e-12 {
            return None;
        }
        let q_new = if d <= self.steer {
            target.clone()
        } else {
            near_q.lerp(target, self.steer / d)
        };
        if !self.world.is_motion_valid(&Motion::new(near_q, q_new.clone())) {
            self.counters.invalid_connections += 1;
            return None;
        }
        let tree = self.graph.tree_of(near);
        let node = self.graph.add_node(q_new, tree);
        self.graph.add_edge(near, node);
        let radius = self.radius();
        connect_neighbors(
            self.world,
            &mut self.graph,
            node,
            radius,
            Some(near),
            &mut self.counters,
        );
        self.n += 1;
        self.record();
        Some(node)
    }

    /// RRT-Connect style greedy march of `component` toward graph node
    /// `target_node`, stopping on the first invalid motion, on merge, or on
    /// budget exhaustion.
    fn greedy_connect(&mut self, target_node: usize, component: usize) {
        let target = self.graph.node(target_node).clone();
        let target_comp = self.graph.canonical_tree_of(target_node);
        loop {
            if self.n >= self.cfg.node_budget {
                return;
            }
            let comp = {
                // the component id may change as unions happen
                let c = component;
                self.graph.trees_mut().find(c)
            };
            if comp == self.graph.canonical_tree_of(target_node) {
                return; // already merged
            }
            let Some(near) = self.graph.nearest_in_component(&target, comp) else {
                return;
            };
            let near_q = self.graph.node(near).clone();
            let d = near_q.distance(&target);
            if d <= self.steer {
                // final hop: connect directly to the target node
                if self
                    .world
                    .is_motion_valid(&Motion::new(near_q, target.clone()))
                {
                    self.graph.add_edge(near, target_node);
                    self.counters.merges += 1;
                } else {
                    self.counters.invalid_connections += 1;
                }
                return;
            }
            let q_new = near_q.lerp(&target, self.steer / d);
            if !self
                .world
                .is_motion_valid(&Motion::new(near_q, q_new.clone()))
            {
                self.counters.invalid_connections += 1;
                return;
            }
            let tree = self.graph.tree_of(near);
            let node = self.graph.add_node(q_new, tree);
            self.graph.add_edge(near, node);
            let radius = self.radius();
            connect_neighbors(
                self.world,
                &mut self.graph,
                node,
                radius,
                Some(near),
                &mut self.counters,
            );
            self.n += 1;
            self.record();
            if self.graph.canonical_tree_of(node) == target_comp {
                return;
            }
        }
    }

    fn run(mut self) -> Result<PlanResult> {
        let start = Instant::now();
        let informed = self.cfg.variant == BaselineVariant::InformedRrtStar;
        let bidirectional = self.cfg.variant == BaselineVariant::BiRrtStar;
        let max_iterations = 1_000 + 200 * self.cfg.node_budget;
        let mut iterations = 0u64;
        let mut grow_init = true;
        while self.n < self.cfg.node_budget && iterations < max_iterations {
            iterations += 1;
            if bidirectional {
                let (root, other_root, bias) = if grow_init {
                    (self.init_tree, self.goal_tree, self.q_goal.clone())
                } else {
                    (self.goal_tree, self.init_tree, self.q_init.clone())
                };
                grow_init = !grow_init;
                let target = self.sample_target(&bias, false);
                let comp = self.graph.trees_mut().find(root);
                if let Some(node) = self.extend(comp, &target) {
                    let other = self.graph.trees_mut().find(other_root);
                    if other != self.graph.canonical_tree_of(node) && self.n < self.cfg.node_budget
                    {
                        self.greedy_connect(node, other);
                    }
                }
            } else {
                let bias = self.q_goal.clone();
                let target = self.sample_target(&bias, informed);
                let comp = self.graph.trees_mut().find(self.init_tree);
                self.extend(comp, &target);
            }
        }

        let connected = {
            let trees = self.graph.trees_mut();
            trees.find(self.init_tree) == trees.find(self.goal_tree)
        };
        let solution = if connected {
            self.graph.path_to(self.goal_node)
        } else {
            None
        };
        let (path, path_cost) = match solution {
            Some((p, c)) => (Some(p), Some(c)),
            None => (None, None),
        };
        let metrics = MetricsSeries {
            samples: self.series,
            sampled_points: self.counters.sampled_points,
            success: path.is_some(),
            elapsed: start.elapsed(),
        };
        Ok(PlanResult {
            path,
            path_cost,
            metrics,
            graph: self.graph,
        })
    }
}

/// Runs one of the baseline planners.
pub fn plan_baseline(
    world: &World,
    q_init: Config,
    q_goal: Config,
    cfg: BaselineConfig,
) -> Result<PlanResult> {
    BaselinePlanner::new(world, q_init, q_goal, cfg)?.run()
}
