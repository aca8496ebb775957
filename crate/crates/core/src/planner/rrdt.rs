//! Disjointed-tree planner with multi-armed-bandit scheduled local samplers.
//!
//! K local samplers (arms) perform epsilon-step directional random walks,
//! each growing its own tree rooted at a free configuration. Two extra trees
//! root at the start and goal. A probability-matching bandit schedules which
//! arm walks next; walks that land near another tree merge it and the arm is
//! restarted elsewhere. Extension directions come from the arm's directional
//! proposal: a vMF prior recentered on the last successful direction and,
//! when Bayesian updates are enabled, sequentially masked at every failed
//! direction. With updates disabled the proposal stays stationary, matching
//! the original scheme this planner extends.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::cspace::{Config, Motion, World};
use crate::dirdist::{
    angles_to_unit_vector, default_bins_per_axis, AngleVector, DirectionalProposal, KernelParams,
    UpdateOutcome, VmfParams,
};
use crate::error::{Error, Result};
use crate::graph::PlanGraph;
use crate::metrics::{Counters, MetricsSample, MetricsSeries};
use crate::planner::{connect_neighbors, step_radius, PlanResult};

/// Bandit scheduler parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MabParams {
    /// Exponential decay of the per-arm success-rate estimate.
    pub decay: f64,
    /// Additive weight so no arm ever starves.
    pub exploration_bonus: f64,
}

impl Default for MabParams {
    fn default() -> Self {
        MabParams {
            decay: 0.9,
            exploration_bonus: 0.05,
        }
    }
}

/// Directional-proposal hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DirDistParams {
    /// Kernel mask depth; recommended range 0.8..=0.95.
    pub beta: f64,
    /// Kernel length scale in radians; recommended range pi/8..=pi/2.
    pub lambda: f64,
    /// Concentration of the recentered prior after a success.
    pub kappa: f64,
    /// Grid resolution per angle axis; defaults by dimension when absent.
    pub bins_per_axis: Option<usize>,
}

impl Default for DirDistParams {
    fn default() -> Self {
        DirDistParams {
            beta: 0.9,
            lambda: PI / 4.0,
            kappa: 4.0,
            bins_per_axis: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RrdtConfig {
    /// Number of roaming local samplers (K). Two further samplers always
    /// walk the trees rooted at the start and goal.
    pub num_arms: usize,
    /// Node budget (N); the run stops once the counter reaches it.
    pub node_budget: u64,
    /// Gamma of the vanishing radius used for steps, merges and rewiring.
    pub epsilon_gamma: f64,
    /// Lower clamp on the radius, as a fraction of the workspace diagonal.
    pub epsilon_min_fraction: f64,
    /// Scale of the per-iteration restart lottery; an arm enters the queue
    /// with probability floor * bonus / (bonus + rate), so stale arms restart
    /// at the floor rate and successful ones almost never. Zero disables the
    /// lottery entirely and arms then restart only after merges.
    pub restart_probability_floor: f64,
    pub mab: MabParams,
    pub dirdist: DirDistParams,
    /// When false the proposal is never masked by failures (the stationary
    /// baseline variant).
    pub bayesian_updates: bool,
    /// Failure memory cap as a multiple of bins_per_axis; reaching it resets
    /// the proposal to its recentered prior.
    pub failed_memory_cap_factor: usize,
    pub rng_seed: u64,
}

impl Default for RrdtConfig {
    fn default() -> Self {
        RrdtConfig {
            num_arms: 8,
            node_budget: 10_000,
            epsilon_gamma: 10.0,
            epsilon_min_fraction: 0.001,
            restart_probability_floor: 0.01,
            mab: MabParams::default(),
            dirdist: DirDistParams::default(),
            bayesian_updates: true,
            failed_memory_cap_factor: 10,
            rng_seed: 0,
        }
    }
}

/// One local sampler: a bandit arm walking in free space.
#[derive(Debug, Clone)]
pub struct LocalSampler {
    pub id: usize,
    pub position: Config,
    /// Graph node the arm currently sits on.
    pub node: usize,
    pub last_success_dir: Option<AngleVector>,
    pub proposal: DirectionalProposal,
    pub failed_dirs: Vec<AngleVector>,
    pub tree_id: usize,
    pub success_count: u64,
    pub trial_count: u64,
    /// Decayed success-rate estimate.
    pub rate: f64,
    /// Scheduler weight = rate + exploration bonus.
    pub weight: f64,
}

/// Result of one local-sampler step.
#[derive(Debug, Clone)]
pub enum StepOutcome {
    /// The walk extended to a new node.
    Extended { node: usize },
    /// The proposed motion was invalid; the arm stayed put.
    Failed { direction: AngleVector },
    /// The walk extended and connected one or more other trees.
    Merged { node: usize, trees: Vec<usize> },
}

pub(crate) struct RrdtPlanner<'w> {
    world: &'w World,
    cfg: RrdtConfig,
    pub(crate) graph: PlanGraph,
    pub(crate) arms: Vec<LocalSampler>,
    rng: ChaCha8Rng,
    pub(crate) n: u64,
    pub(crate) counters: Counters,
    series: Vec<MetricsSample>,
    restart_queue: VecDeque<usize>,
    queued: Vec<bool>,
    init_tree: usize,
    goal_tree: usize,
    pub(crate) goal_node: usize,
    eps_min: f64,
    bins: usize,
    kernel: KernelParams,
}

fn validate(cfg: &RrdtConfig) -> Result<()> {
    if cfg.num_arms < 1 {
        return Err(Error::InvalidParameter {
            name: "num_arms",
            message: "need at least one local sampler".into(),
        });
    }
    if cfg.node_budget < 2 {
        return Err(Error::InvalidParameter {
            name: "node_budget",
            message: "budget must be at least 2".into(),
        });
    }
    if !(cfg.epsilon_gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon_gamma",
            message: "gamma must be positive".into(),
        });
    }
    if !(0.0..1.0).contains(&cfg.mab.decay) {
        return Err(Error::InvalidParameter {
            name: "mab.decay",
            message: "decay must lie in [0, 1)".into(),
        });
    }
    if !(cfg.mab.exploration_bonus > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mab.exploration_bonus",
            message: "bonus must be positive".into(),
        });
    }
    if !(0.0..=1.0).contains(&cfg.restart_probability_floor) {
        return Err(Error::InvalidParameter {
            name: "restart_probability_floor",
            message: "must lie in [0, 1]".into(),
        });
    }
    if !(cfg.dirdist.kappa >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "dirdist.kappa",
            message: "kappa must be non-negative".into(),
        });
    }
    Ok(())
}

impl<'w> RrdtPlanner<'w> {
    pub fn new(world: &'w World, q_init: Config, q_goal: Config, cfg: RrdtConfig) -> Result<Self> {
        validate(&cfg)?;
        for (q, which) in [(&q_init, "q_init"), (&q_goal, "q_goal")] {
            if q.dim() != world.dim() {
                return Err(Error::InvalidEndpoint {
                    which: if which == "q_init" { "q_init" } else { "q_goal" },
                    reason: format!(
                        "dimension {} does not match world dimension {}",
                        q.dim(),
                        world.dim()
                    ),
                });
            }
            if !world.is_valid(q) {
                return Err(Error::InvalidEndpoint {
                    which: if which == "q_init" { "q_init" } else { "q_goal" },
                    reason: "configuration is not collision-free".into(),
                });
            }
        }
        let bins = cfg
            .dirdist
            .bins_per_axis
            .unwrap_or_else(|| default_bins_per_axis(world.dim()));
        let kernel = KernelParams::new(cfg.dirdist.beta, cfg.dirdist.lambda)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let mut graph = PlanGraph::new();
        let init_tree = graph.new_tree();
        let goal_tree = graph.new_tree();
        let init_node = graph.add_node(q_init, init_tree);
        let goal_node = graph.add_node(q_goal, goal_tree);
        graph.set_source(init_node);

        let mut counters = Counters::default();
        // Two walkers grow the rooted trees (a static single-node tree is a
        // nearly unhittable merge target under the vanishing radius), plus
        // the K roaming samplers.
        let fresh_proposal = || {
            DirectionalProposal::init(
                VmfParams::uniform(world.dim()),
                kernel.clone(),
                bins,
                world.dim(),
            )
        };
        let mut arms = Vec::with_capacity(cfg.num_arms + 2);
        for (id, (node, tree)) in [(init_node, init_tree), (goal_node, goal_tree)]
            .into_iter()
            .enumerate()
        {
            arms.push(LocalSampler {
                id,
                position: graph.node(node).clone(),
                node,
                last_success_dir: None,
                proposal: fresh_proposal()?,
                failed_dirs: Vec::new(),
                tree_id: tree,
                success_count: 0,
                trial_count: 0,
                rate: 0.0,
                weight: cfg.mab.exploration_bonus,
            });
        }
        for id in 2..cfg.num_arms + 2 {
            let sample = world.sample_free(&mut rng)?;
            counters.sampled_points += sample.attempts;
            let tree = graph.new_tree();
            let node = graph.add_node(sample.config.clone(), tree);
            arms.push(LocalSampler {
                id,
                position: sample.config,
                node,
                last_success_dir: None,
                proposal: fresh_proposal()?,
                failed_dirs: Vec::new(),
                tree_id: tree,
                success_count: 0,
                trial_count: 0,
                rate: 0.0,
                weight: cfg.mab.exploration_bonus,
            });
        }
        let n = (2 + cfg.num_arms) as u64;
        let eps_min = cfg.epsilon_min_fraction * world.diagonal();
        let queued = vec![false; arms.len()];
        Ok(RrdtPlanner {
            world,
            cfg,
            graph,
            arms,
            rng,
            n,
            counters,
            series: Vec::new(),
            restart_queue: VecDeque::new(),
            queued,
            init_tree,
            goal_tree,
            goal_node,
            eps_min,
            bins,
            kernel,
        })
    }

    pub(crate) fn radius(&self) -> f64 {
        step_radius(self.n, self.world.dim(), self.cfg.epsilon_gamma, self.eps_min)
    }

    fn record(&mut self) {
        let cost = self.graph.cost_from_source(self.goal_node);
        self.series.push(MetricsSample {
            nodes: self.n,
            cost: cost.is_finite().then_some(cost),
            invalid_connections: self.counters.invalid_connections,
            invalid_local_samples: self.counters.invalid_local_samples,
        });
    }

    /// Per-iteration restart lottery over every arm.
    fn lottery(&mut self) {
        let floor = self.cfg.restart_probability_floor;
        if floor == 0.0 {
            return;
        }
        let bonus = self.cfg.mab.exploration_bonus;
        for a in 0..self.arms.len() {
            let p = floor * bonus / (bonus + self.arms[a].rate);
            if !self.queued[a] && self.rng.random::<f64>() < p {
                self.queued[a] = true;
                self.restart_queue.push_back(a);
            }
        }
    }

    /// Probability-matching arm selection proportional to weight.
    pub(crate) fn select_arm(&mut self) -> usize {
        let total: f64 = self.arms.iter().map(|a| a.weight).sum();
        let mut u = self.rng.random::<f64>() * total;
        for (i, arm) in self.arms.iter().enumerate() {
            u -= arm.weight;
            if u < 0.0 {
                return i;
            }
        }
        self.arms.len() - 1
    }

    /// Decayed success-rate update and weight refresh.
    pub(crate) fn update_arm_stats(&mut self, arm: usize, success: bool) {
        let a = &mut self.arms[arm];
        let d = self.cfg.mab.decay;
        a.rate = d * a.rate + (1.0 - d) * if success { 1.0 } else { 0.0 };
        a.weight = a.rate + self.cfg.mab.exploration_bonus;
        a.trial_count += 1;
        if success {
            a.success_count += 1;
        }
    }

    /// One random-walk step of arm `a`.
    pub(crate) fn step_local_sampler(&mut self, a: usize) -> StepOutcome {
        let eps = self.radius();
        let x = self.arms[a].proposal.sample(&mut self.rng);
        self.counters.sampled_points += 1;

        let direction = angles_to_unit_vector(&x);
        let q_current = self.arms[a].position.clone();
        let q_new = Config::new(
            q_current
                .coords()
                .iter()
                .zip(&direction)
                .map(|(c, u)| c + eps * u)
                .collect(),
        );
        let valid = self.world.is_motion_valid(&Motion::new(q_current, q_new.clone()));
        if !valid {
            self.counters.invalid_local_samples += 1;
            // Failure history only exists relative to a conditioning success
            // direction; history-less arms keep redrawing uniformly.
            if self.cfg.bayesian_updates && self.arms[a].last_success_dir.is_some() {
                let arm = &mut self.arms[a];
                arm.failed_dirs.push(x.clone());
                if arm.proposal.update_failure(&x) == UpdateOutcome::Collapsed {
                    arm.failed_dirs.clear();
                }
                if arm.failed_dirs.len() >= self.cfg.failed_memory_cap_factor * self.bins {
                    let mean = arm.last_success_dir.clone().expect("history checked above");
                    arm.proposal = DirectionalProposal::init(
                        VmfParams::from_mean_angles(&mean, self.cfg.dirdist.kappa),
                        self.kernel.clone(),
                        self.bins,
                        self.world.dim(),
                    )
                    .expect("grid parameters already validated");
                    arm.failed_dirs.clear();
                }
            }
            return StepOutcome::Failed { direction: x };
        }

        let parent = self.arms[a].node;
        let node = self.graph.add_node(q_new.clone(), self.arms[a].tree_id);
        self.graph.add_edge(parent, node);
        let merged = connect_neighbors(
            self.world,
            &mut self.graph,
            node,
            eps,
            Some(parent),
            &mut self.counters,
        );

        let arm = &mut self.arms[a];
        arm.position = q_new;
        arm.node = node;
        arm.last_success_dir = Some(x.clone());
        arm.failed_dirs.clear();
        arm.proposal = DirectionalProposal::init(
            VmfParams::from_mean_angles(&x, self.cfg.dirdist.kappa),
            self.kernel.clone(),
            self.bins,
            self.world.dim(),
        )
        .expect("grid parameters already validated");

        self.n += 1;
        self.record();

        if merged.is_empty() {
            StepOutcome::Extended { node }
        } else {
            if !self.queued[a] {
                self.queued[a] = true;
                self.restart_queue.push_back(a);
            }
            StepOutcome::Merged { node, trees: merged }
        }
    }

    /// Repositions arm `a` at a fresh free sample rooting a new singleton
    /// tree; all history and bandit statistics reset.
    pub(crate) fn restart_arm(&mut self, a: usize) -> Result<()> {
        let sample = self.world.sample_free(&mut self.rng)?;
        self.counters.sampled_points += sample.attempts;
        let tree = self.graph.new_tree();
        let node = self.graph.add_node(sample.config.clone(), tree);
        let arm = &mut self.arms[a];
        arm.position = sample.config;
        arm.node = node;
        arm.last_success_dir = None;
        arm.proposal = DirectionalProposal::init(
            VmfParams::uniform(self.world.dim()),
            self.kernel.clone(),
            self.bins,
            self.world.dim(),
        )?;
        arm.failed_dirs.clear();
        arm.tree_id = tree;
        arm.success_count = 0;
        arm.trial_count = 0;
        arm.rate = 0.0;
        arm.weight = self.cfg.mab.exploration_bonus;
        self.counters.restarts += 1;
        self.n += 1;
        self.record();
        Ok(())
    }

    pub(crate) fn run(mut self) -> Result<PlanResult> {
        let start = Instant::now();
        // Progress guard for worlds where no arm can ever step or restart.
        let max_iterations = 1_000 + 200 * self.cfg.node_budget;
        let mut iterations = 0u64;
        while self.n < self.cfg.node_budget && iterations < max_iterations {
            iterations += 1;
            self.lottery();
            if let Some(a) = self.restart_queue.pop_front() {
                self.queued[a] = false;
                self.restart_arm(a)?;
                continue;
            }
            let a = self.select_arm();
            let outcome = self.step_local_sampler(a);
            let success = !matches!(outcome, StepOutcome::Failed { .. });
            self.update_arm_stats(a, success);
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

/// Runs the full disjointed-tree planning loop.
pub fn plan(world: &World, q_init: Config, q_goal: Config, cfg: RrdtConfig) -> Result<PlanResult> {
    RrdtPlanner::new(world, q_init, q_goal, cfg)?.run()
}
