//! Per-run metric series shared by every planner.
//!
//! One sample is recorded each time the node counter advances. Two failure
//! counters are kept: *invalid connections* counts failed motion validations
//! on attempted tree connections (steering extensions, rewiring candidates
//! and merge attempts, including failed merges), while *invalid local
//! samples* counts directions drawn by a local sampler that produced no
//! extension. The latter only applies to disjointed-tree planners and stays
//! zero for the single-query baselines.

use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSample {
    /// Node counter after the event that triggered this sample.
    pub nodes: u64,
    /// Best known start-to-goal cost, if a solution exists yet.
    pub cost: Option<f64>,
    /// Cumulative failed connection validations.
    pub invalid_connections: u64,
    /// Cumulative failed local-sampler steps.
    pub invalid_local_samples: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsSeries {
    pub samples: Vec<MetricsSample>,
    /// Total configurations/directions drawn, counting rejected ones.
    pub sampled_points: u64,
    /// Whether a start-to-goal path existed when the run ended.
    pub success: bool,
    /// Wall-clock time of the run. Excluded from serialized records so that
    /// run artifacts stay a pure function of (scenario bytes, seed).
    #[serde(skip)]
    pub elapsed: Duration,
}

impl MetricsSeries {
    pub fn final_sample(&self) -> Option<&MetricsSample> {
        self.samples.last()
    }

    /// Wall-clock seconds per attempted sample.
    pub fn seconds_per_sample(&self) -> f64 {
        if self.sampled_points == 0 {
            0.0
        } else {
            self.elapsed.as_secs_f64() / self.sampled_points as f64
        }
    }
}

/// Running counters threaded through a planner loop.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counters {
    pub invalid_connections: u64,
    pub invalid_local_samples: u64,
    pub sampled_points: u64,
    pub merges: u64,
    pub restarts: u64,
}
