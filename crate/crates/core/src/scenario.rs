//! Scenario files: a single JSON document holding the world geometry as
//! explicit vertex lists, the endpoints, budgets and the planner roster.
//!
//! Schema (all lengths in world units, angles in radians):
//!
//! ```json
//! {
//!   "name": "room",
//!   "world": {
//!     "bounds": [[0.0, 20.0], [0.0, 20.0]],
//!     "robot": {"type": "point"},
//!     "obstacles": [[[8.0, 9.5], [20.0, 9.5], [20.0, 10.5], [8.0, 10.5]]],
//!     "motion_check_resolution": 0.05
//!   },
//!   "q_init": [2.0, 2.0],
//!   "q_goal": [18.0, 18.0],
//!   "node_budget": 10000,
//!   "repeats": 20,
//!   "checkpoint_every": 250,
//!   "planners": [
//!     {"type": "rrdt", "name": "rrdt-bayes", "config": {"epsilon_gamma": 8.0}},
//!     {"type": "rrt-star", "name": "rrt-star", "config": {"gamma": 8.0}}
//!   ]
//! }
//! ```
//!
//! Arm robots use `{"type": "planar_arm", "base": [x, y], "link_lengths":
//! [...], "joint_limits": [[lo, hi], ...]}`; omitted joint limits default to
//! the world bounds. Planner `config` blocks accept the corresponding
//! planner's parameters and fall back to defaults field by field.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cspace::{Config, Robot, World};
use crate::error::{Error, Result};
use crate::geom::Polygon;
use crate::planner::baselines::{BaselineConfig, BaselineVariant};
use crate::planner::rrdt::RrdtConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldSpec {
    bounds: Vec<[f64; 2]>,
    robot: RobotSpec,
    #[serde(default)]
    obstacles: Vec<Vec<[f64; 2]>>,
    motion_check_resolution: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RobotSpec {
    Point,
    PlanarArm {
        base: [f64; 2],
        link_lengths: Vec<f64>,
        #[serde(default)]
        joint_limits: Option<Vec<[f64; 2]>>,
    },
}

/// One planner entry in a scenario's roster.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PlannerSpec {
    Rrdt {
        name: String,
        #[serde(default)]
        config: RrdtConfig,
    },
    RrtStar {
        name: String,
        #[serde(default)]
        config: BaselineConfig,
    },
    BiRrtStar {
        name: String,
        #[serde(default)]
        config: BaselineConfig,
    },
    InformedRrtStar {
        name: String,
        #[serde(default)]
        config: BaselineConfig,
    },
}

impl PlannerSpec {
    pub fn name(&self) -> &str {
        match self {
            PlannerSpec::Rrdt { name, .. }
            | PlannerSpec::RrtStar { name, .. }
            | PlannerSpec::BiRrtStar { name, .. }
            | PlannerSpec::InformedRrtStar { name, .. } => name,
        }
    }

    /// Baseline variant implied by the tag, if this is a baseline entry.
    pub fn baseline_variant(&self) -> Option<BaselineVariant> {
        match self {
            PlannerSpec::Rrdt { .. } => None,
            PlannerSpec::RrtStar { .. } => Some(BaselineVariant::RrtStar),
            PlannerSpec::BiRrtStar { .. } => Some(BaselineVariant::BiRrtStar),
            PlannerSpec::InformedRrtStar { .. } => Some(BaselineVariant::InformedRrtStar),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    world: WorldSpec,
    q_init: Vec<f64>,
    q_goal: Vec<f64>,
    node_budget: u64,
    repeats: u32,
    #[serde(default = "default_checkpoint_every")]
    checkpoint_every: u64,
    planners: Vec<PlannerSpec>,
}

fn default_checkpoint_every() -> u64 {
    250
}

/// A fully materialized, validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub world: World,
    pub q_init: Config,
    pub q_goal: Config,
    pub node_budget: u64,
    pub repeats: u32,
    pub checkpoint_every: u64,
    pub planners: Vec<PlannerSpec>,
}

fn schema_err(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| schema_err(&e.path().to_string(), e.inner().to_string()))?;

    if file.node_budget < 2 {
        return Err(schema_err("node_budget", "must be at least 2"));
    }
    if file.repeats < 1 {
        return Err(schema_err("repeats", "must be at least 1"));
    }
    if file.checkpoint_every == 0 {
        return Err(schema_err("checkpoint_every", "must be positive"));
    }
    if file.planners.is_empty() {
        return Err(schema_err("planners", "need at least one planner"));
    }
    let mut names: Vec<&str> = file.planners.iter().map(|p| p.name()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() != file.planners.len() {
        return Err(schema_err("planners", "planner names must be unique"));
    }

    let robot = match file.world.robot {
        RobotSpec::Point => Robot::Point,
        RobotSpec::PlanarArm {
            base,
            link_lengths,
            joint_limits,
        } => Robot::PlanarArm {
            base,
            joint_limits: joint_limits.unwrap_or_else(|| file.world.bounds.clone()),
            link_lengths,
        },
    };
    let mut obstacles = Vec::with_capacity(file.world.obstacles.len());
    for (i, verts) in file.world.obstacles.into_iter().enumerate() {
        let poly = Polygon::new(verts)
            .map_err(|e| schema_err(&format!("world.obstacles[{i}]"), e.to_string()))?;
        obstacles.push(poly);
    }
    let world = World::new(
        file.world.bounds,
        obstacles,
        robot,
        file.world.motion_check_resolution,
    )
    .map_err(|e| schema_err("world", e.to_string()))?;

    for (coords, which) in [(&file.q_init, "q_init"), (&file.q_goal, "q_goal")] {
        if coords.len() != world.dim() {
            return Err(Error::InvalidEndpoint {
                which: if which == "q_init" { "q_init" } else { "q_goal" },
                reason: format!(
                    "dimension {} does not match world dimension {}",
                    coords.len(),
                    world.dim()
                ),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidEndpoint {
                which: if which == "q_init" { "q_init" } else { "q_goal" },
                reason: "non-finite coordinate".into(),
            });
        }
    }
    let q_init = Config::new(file.q_init);
    let q_goal = Config::new(file.q_goal);
    for (q, which) in [(&q_init, "q_init"), (&q_goal, "q_goal")] {
        if !world.is_valid(q) {
            return Err(Error::InvalidEndpoint {
                which: if which == "q_init" { "q_init" } else { "q_goal" },
                reason: "configuration is not collision-free".into(),
            });
        }
    }

    Ok(Scenario {
        name: file.name,
        world,
        q_init,
        q_goal,
        node_budget: file.node_budget,
        repeats: file.repeats,
        checkpoint_every: file.checkpoint_every,
        planners: file.planners,
    })
}

/// Loads a scenario from a JSON file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}
