//! Sampling-based motion planning with Bayesian directional local sampling.
//!
//! The centerpiece is a disjointed-tree planner whose local samplers draw
//! extension directions from a sequentially updated proposal distribution:
//! a von Mises-Fisher prior over directions, recentered on each success and
//! masked by a periodic squared-exponential kernel at every failed
//! direction. RRT*-family baselines, scenario files and a seeded experiment
//! harness round out the crate.

pub mod cspace;
pub mod dirdist;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod graph;
pub mod metrics;
pub mod planner;
pub mod scenario;

pub use cspace::{Config, FreeSample, Motion, Robot, World};
pub use error::{Error, Result};
pub use graph::{DisjointSet, GraphRecord, PlanGraph};
pub use metrics::{MetricsSample, MetricsSeries};
pub use planner::baselines::{plan_baseline, BaselineConfig, BaselineVariant};
pub use planner::rrdt::{plan, DirDistParams, MabParams, RrdtConfig};
pub use planner::{epsilon_n, PlanRecord, PlanResult};
pub use scenario::{load_scenario, parse_scenario, PlannerSpec, Scenario};
