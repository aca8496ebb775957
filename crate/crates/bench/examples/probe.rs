use std::time::Instant;

use rrdt_core::experiment::run_single;
use rrdt_core::load_scenario;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let scenario_path = &args[1];
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let scenario = load_scenario(scenario_path).unwrap();
    println!("== {} budget {} ==", scenario.name, scenario.node_budget);
    for spec in &scenario.planners {
        let mut successes = 0u32;
        let mut sampled = Vec::new();
        let mut invalid_local = Vec::new();
        let mut costs = Vec::new();
        let t0 = Instant::now();
        for seed in 0..seeds {
            match run_single(&scenario, spec, seed) {
                Ok(r) => {
                    if r.metrics.success { successes += 1; }
                    sampled.push(r.metrics.sampled_points);
                    invalid_local.push(r.metrics.samples.last().map(|s| s.invalid_local_samples).unwrap_or(0));
                    costs.push(r.path_cost.unwrap_or(f64::NAN));
                }
                Err(e) => println!("  seed {seed}: ERROR {e}"),
            }
        }
        let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len().max(1) as f64;
        println!(
            "{:20} succ {}/{}  sampled_mean {:9.0}  inv_local_mean {:9.0}  final_costs {:?}  ({:.1?}/run)",
            spec.name(), successes, seeds, mean(&sampled), mean(&invalid_local),
            costs.iter().map(|c| (c * 10.0).round() / 10.0).collect::<Vec<_>>(),
            t0.elapsed() / seeds as u32
        );
    }
}
