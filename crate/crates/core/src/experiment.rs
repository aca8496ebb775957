//! Seeded repeated experiments over a scenario's planner roster, metric
//! aggregation and table export.
//!
//! Repeat `r` of every planner runs with seed `base_seed + r`, so seeds are
//! disjoint across repeats, reconstructible, and paired across planners.
//! Repeats execute in parallel; aggregation is a sequential reduce in
//! (planner, repeat) order, so output is independent of completion order.

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::MetricsSeries;
use crate::planner::baselines::{plan_baseline, BaselineConfig};
use crate::planner::rrdt::{plan as plan_rrdt, RrdtConfig};
use crate::planner::{PlanRecord, PlanResult};
use crate::scenario::{PlannerSpec, Scenario};

/// Raw per-run record; serialized next to the aggregate tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub planner: String,
    pub seed: u64,
    /// Absent when the run aborted with an error.
    pub result: Option<PlanRecord>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn success(&self) -> bool {
        self.result.as_ref().is_some_and(|r| r.metrics.success)
    }

    pub fn metrics(&self) -> Option<&MetricsSeries> {
        self.result.as_ref().map(|r| &r.metrics)
    }

    /// Conventional file stem for raw records: `<scenario>_<planner>_<seed>`.
    pub fn file_stem(&self) -> String {
        format!("{}_{}_{}", self.scenario, self.planner, self.seed)
    }
}

/// Aggregate statistics for one planner over all repeats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateRow {
    pub planner: String,
    pub sampled_points_mean: f64,
    pub sampled_points_std: f64,
    pub success_rate: f64,
    /// Node checkpoints the cost series is sampled at.
    pub checkpoints: Vec<u64>,
    /// Mean/population-std of best cost at each checkpoint, over the runs
    /// that had a solution by then; empty cells where no run did.
    pub cost_mean: Vec<Option<f64>>,
    pub cost_std: Vec<Option<f64>>,
}

/// Everything one experiment produced: aggregates plus raw runs (ordered by
/// planner then repeat).
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<AggregateRow>,
    pub runs: Vec<RunRecord>,
    /// Wall-clock time of each run, aligned with `runs`. Kept out of the
    /// records so serialized artifacts stay deterministic.
    pub elapsed: Vec<Duration>,
}

/// Executes one planner roster entry at one seed.
pub fn run_single(scenario: &Scenario, spec: &PlannerSpec, seed: u64) -> Result<PlanResult> {
    let world = &scenario.world;
    let q_init = scenario.q_init.clone();
    let q_goal = scenario.q_goal.clone();
    match spec {
        PlannerSpec::Rrdt { config, .. } => {
            let cfg = RrdtConfig {
                node_budget: scenario.node_budget,
                rng_seed: seed,
                ..config.clone()
            };
            plan_rrdt(world, q_init, q_goal, cfg)
        }
        _ => {
            let base = match spec {
                PlannerSpec::RrtStar { config, .. }
                | PlannerSpec::BiRrtStar { config, .. }
                | PlannerSpec::InformedRrtStar { config, .. } => config.clone(),
                PlannerSpec::Rrdt { .. } => unreachable!(),
            };
            let cfg = BaselineConfig {
                variant: spec.baseline_variant().expect("baseline spec"),
                node_budget: scenario.node_budget,
                rng_seed: seed,
                ..base
            };
            plan_baseline(world, q_init, q_goal, cfg)
        }
    }
}

/// Best known cost at a node-count checkpoint: the value carried by the last
/// series sample at or before it.
fn cost_at_checkpoint(metrics: &MetricsSeries, checkpoint: u64) -> Option<f64> {
    metrics
        .samples
        .iter()
        .take_while(|s| s.nodes <= checkpoint)
        .last()
        .and_then(|s| s.cost)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs every planner for `scenario.repeats` seeded repeats and aggregates.
/// Per-run errors are recorded as failed runs without aborting the batch.
pub fn run_experiment(scenario: &Scenario, base_seed: u64) -> ExperimentResult {
    let checkpoints: Vec<u64> = (1..=scenario.node_budget / scenario.checkpoint_every)
        .map(|k| k * scenario.checkpoint_every)
        .collect();

    let jobs: Vec<(usize, u32)> = (0..scenario.planners.len())
        .flat_map(|p| (0..scenario.repeats).map(move |r| (p, r)))
        .collect();

    let mut outcomes: Vec<((usize, u32), RunRecord, Duration)> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let spec = &scenario.planners[p];
            let seed = base_seed.wrapping_add(r as u64);
            let (record, elapsed) = match run_single(scenario, spec, seed) {
                Ok(mut result) => {
                    let elapsed = result.metrics.elapsed;
                    (
                        RunRecord {
                            scenario: scenario.name.clone(),
                            planner: spec.name().to_string(),
                            seed,
                            result: Some(result.to_record()),
                            error: None,
                        },
                        elapsed,
                    )
                }
                Err(e) => (
                    RunRecord {
                        scenario: scenario.name.clone(),
                        planner: spec.name().to_string(),
                        seed,
                        result: None,
                        error: Some(e.to_string()),
                    },
                    Duration::ZERO,
                ),
            };
            ((p, r), record, elapsed)
        })
        .collect();
    outcomes.sort_by_key(|(key, _, _)| *key);

    let mut rows = Vec::with_capacity(scenario.planners.len());
    for (p, spec) in scenario.planners.iter().enumerate() {
        let planner_runs: Vec<&RunRecord> = outcomes
            .iter()
            .filter(|((pi, _), _, _)| *pi == p)
            .map(|(_, rec, _)| rec)
            .collect();
        let successes = planner_runs.iter().filter(|r| r.success()).count();
        let sampled: Vec<f64> = planner_runs
            .iter()
            .filter_map(|r| r.metrics().map(|m| m.sampled_points as f64))
            .collect();
        let (sp_mean, sp_std) = if sampled.is_empty() {
            (0.0, 0.0)
        } else {
            mean_std(&sampled)
        };
        let mut cost_mean = Vec::with_capacity(checkpoints.len());
        let mut cost_std = Vec::with_capacity(checkpoints.len());
        for &c in &checkpoints {
            let costs: Vec<f64> = planner_runs
                .iter()
                .filter_map(|r| r.metrics().and_then(|m| cost_at_checkpoint(m, c)))
                .collect();
            if costs.is_empty() {
                cost_mean.push(None);
                cost_std.push(None);
            } else {
                let (m, s) = mean_std(&costs);
                cost_mean.push(Some(m));
                cost_std.push(Some(s));
            }
        }
        rows.push(AggregateRow {
            planner: spec.name().to_string(),
            sampled_points_mean: sp_mean,
            sampled_points_std: sp_std,
            success_rate: successes as f64 / scenario.repeats as f64,
            checkpoints: checkpoints.clone(),
            cost_mean,
            cost_std,
        });
    }

    let elapsed = outcomes.iter().map(|(_, _, e)| *e).collect();
    let runs = outcomes.into_iter().map(|(_, rec, _)| rec).collect();
    ExperimentResult {
        rows,
        runs,
        elapsed,
    }
}

/// Formats with six significant digits, the fixed precision of exported
/// tables.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // trim trailing zeros but keep integer part intact
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn header(checkpoints: &[u64]) -> Vec<String> {
    let mut cols = vec![
        "planner".to_string(),
        "samp_pt_mean".to_string(),
        "samp_pt_std".to_string(),
        "success_rate".to_string(),
    ];
    for c in checkpoints {
        cols.push(format!("cost_mean_{c}"));
        cols.push(format!("cost_std_{c}"));
    }
    cols
}

fn row_cells(row: &AggregateRow) -> Vec<String> {
    let mut cells = vec![
        row.planner.clone(),
        format_sig6(row.sampled_points_mean),
        format_sig6(row.sampled_points_std),
        format_sig6(row.success_rate),
    ];
    for (m, s) in row.cost_mean.iter().zip(&row.cost_std) {
        cells.push(m.map(format_sig6).unwrap_or_default());
        cells.push(s.map(format_sig6).unwrap_or_default());
    }
    cells
}

/// CSV export with the stable column order
/// `planner, samp_pt_mean, samp_pt_std, success_rate, cost_mean_<c>, cost_std_<c>...`.
pub fn export_csv(rows: &[AggregateRow]) -> String {
    let checkpoints = rows.first().map(|r| r.checkpoints.as_slice()).unwrap_or(&[]);
    let mut out = header(checkpoints).join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row_cells(row).join(","));
        out.push('\n');
    }
    out
}

/// Markdown table export with the same column order as the CSV.
pub fn export_markdown(rows: &[AggregateRow]) -> String {
    let checkpoints = rows.first().map(|r| r.checkpoints.as_slice()).unwrap_or(&[]);
    let cols = header(checkpoints);
    let mut out = format!("| {} |\n", cols.join(" | "));
    out.push_str(&format!("|{}\n", " --- |".repeat(cols.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", row_cells(row).join(" | ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    fn tiny_scenario(repeats: u32) -> Scenario {
        parse_scenario(&format!(
            r#"{{
              "name": "tiny",
              "world": {{
                "bounds": [[0.0, 10.0], [0.0, 10.0]],
                "robot": {{"type": "point"}},
                "obstacles": [],
                "motion_check_resolution": 0.1
              }},
              "q_init": [1.0, 1.0],
              "q_goal": [9.0, 9.0],
              "node_budget": 400,
              "repeats": {repeats},
              "checkpoint_every": 100,
              "planners": [
                {{"type": "rrdt", "name": "rrdt-bayes", "config": {{"epsilon_gamma": 5.0}}}},
                {{"type": "rrt-star", "name": "rrt-star", "config": {{"gamma": 5.0}}}}
              ]
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn single_repeat_has_zero_std() {
        let s = tiny_scenario(1);
        let result = run_experiment(&s, 7);
        for row in &result.rows {
            assert_eq!(row.sampled_points_std, 0.0);
            for s in row.cost_std.iter().flatten() {
                assert_eq!(*s, 0.0);
            }
        }
    }

    #[test]
    fn same_seed_reproduces_rows_and_runs() {
        let s = tiny_scenario(2);
        let a = run_experiment(&s, 123);
        let b = run_experiment(&s, 123);
        assert_eq!(
            serde_json::to_string(&a.rows).unwrap(),
            serde_json::to_string(&b.rows).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&a.runs).unwrap(),
            serde_json::to_string(&b.runs).unwrap()
        );
    }

    #[test]
    fn aggregates_match_recomputation_from_raw_records() {
        let s = tiny_scenario(3);
        let result = run_experiment(&s, 11);
        for row in &result.rows {
            let runs: Vec<&RunRecord> = result
                .runs
                .iter()
                .filter(|r| r.planner == row.planner)
                .collect();
            assert_eq!(runs.len(), 3);
            let sampled: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.metrics().map(|m| m.sampled_points as f64))
                .collect();
            let mean = sampled.iter().sum::<f64>() / sampled.len() as f64;
            assert!((mean - row.sampled_points_mean).abs() < 1e-9);
            let successes = runs.iter().filter(|r| r.success()).count();
            assert!((row.success_rate - successes as f64 / 3.0).abs() < 1e-12);
            // success_rate * repeats is an integer
            let sr = row.success_rate * 3.0;
            assert!((sr - sr.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_round_trips_idempotently() {
        let s = tiny_scenario(2);
        let result = run_experiment(&s, 5);
        let csv = export_csv(&result.rows);
        // parse the document back and re-render: byte-identical
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header[0], "planner");
        assert_eq!(header[1], "samp_pt_mean");
        assert_eq!(header[2], "samp_pt_std");
        assert_eq!(header[3], "success_rate");
        let mut parsed_rows = Vec::new();
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            let checkpoints: Vec<u64> = header[4..]
                .iter()
                .step_by(2)
                .map(|h| h.trim_start_matches("cost_mean_").parse().unwrap())
                .collect();
            let mut cost_mean = Vec::new();
            let mut cost_std = Vec::new();
            for pair in cells[4..].chunks(2) {
                cost_mean.push(if pair[0].is_empty() { None } else { Some(pair[0].parse().unwrap()) });
                cost_std.push(if pair[1].is_empty() { None } else { Some(pair[1].parse().unwrap()) });
            }
            parsed_rows.push(AggregateRow {
                planner: cells[0].to_string(),
                sampled_points_mean: cells[1].parse().unwrap(),
                sampled_points_std: cells[2].parse().unwrap(),
                success_rate: cells[3].parse().unwrap(),
                checkpoints,
                cost_mean,
                cost_std,
            });
        }
        assert_eq!(export_csv(&parsed_rows), csv);
    }

    #[test]
    fn empty_rows_export_header_only() {
        let csv = export_csv(&[]);
        assert_eq!(csv, "planner,samp_pt_mean,samp_pt_std,success_rate\n");
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(123.456789), "123.457");
        assert_eq!(format_sig6(0.000123456789), "0.000123457");
        assert_eq!(format_sig6(123456.789), "123457");
        assert_eq!(format_sig6(-2.5), "-2.5");
    }
}
