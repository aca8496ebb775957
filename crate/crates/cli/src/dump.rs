//! Replays a scripted failure sequence against a static proposal and a
//! Bayesian-updated one, dumping per-step mass CSVs and polar SVG snapshots.
//!
//! Step 0 is the shared prior; step k is the state after the k-th scripted
//! failure. The static distribution ignores failures by construction, so its
//! dumps are identical at every step; the updated one masks each failed
//! direction in turn.

use std::f64::consts::PI;
use std::path::Path;

use rrdt_core::dirdist::{AngleVector, DirectionalProposal, KernelParams, VmfParams};

use crate::svg::SvgDoc;
use crate::CliError;

pub struct DumpSpec {
    pub mu_angle: f64,
    pub kappa: f64,
    pub beta: f64,
    pub lambda: f64,
    pub bins: usize,
    pub failed_dirs: Vec<f64>,
    pub snapshots: Vec<usize>,
}

fn mass_csv(p: &DirectionalProposal) -> Vec<u8> {
    let mut buf = Vec::new();
    p.write_mass_csv(&mut buf).expect("in-memory write");
    buf
}

/// Polar plot of the bin masses with the failure history overlaid: red arrow
/// for the step's failed direction, purple arrows for earlier ones.
fn polar_svg(p: &DirectionalProposal, failed_so_far: &[f64]) -> String {
    let r_axis = 160.0;
    let c = [200.0, 200.0];
    let mut doc = SvgDoc::new([0.0, 0.0, 400.0, 400.0]);
    doc.rect(0.0, 0.0, 400.0, 400.0, "#ffffff");
    doc.circle_outline(c, r_axis, "#cccccc", 1.0);
    let max_mass = p
        .mass()
        .iter()
        .cloned()
        .fold(f64::MIN_POSITIVE, f64::max);
    // SVG y grows downward; negate the sine so angles read counterclockwise
    let at = |angle: f64, r: f64| [c[0] + r * angle.cos(), c[1] - r * angle.sin()];
    for b in 0..p.bin_count() {
        let angle = p.bin_center(b).angles()[0];
        let r = r_axis * p.mass()[b] / max_mass;
        doc.line(c, at(angle, r), "#4878a8", 1.2);
    }
    if let Some((&last, earlier)) = failed_so_far.split_last() {
        for &a in earlier {
            doc.line(c, at(a, r_axis * 0.95), "#9b59b6", 1.6);
        }
        doc.line(c, at(last, r_axis * 0.95), "#d62728", 2.4);
    }
    doc.finish()
}

/// Runs the replay and writes `dist_{static,bayes}_step<k>.csv` for every
/// step plus `dist_{static,bayes}_step<k>.svg` at the requested snapshots.
pub fn dump_dist(spec: &DumpSpec, out: &Path) -> Result<(), CliError> {
    if !(spec.bins >= 4) {
        return Err(CliError::Config("bins must be at least 4".into()));
    }
    let prior = VmfParams::from_mean_angles(&AngleVector::new(vec![spec.mu_angle]), spec.kappa);
    let kernel = KernelParams::new(spec.beta, spec.lambda)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let static_dist = DirectionalProposal::init(prior.clone(), kernel.clone(), spec.bins, 2)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut bayes = static_dist.clone();

    std::fs::create_dir_all(out).map_err(|e| CliError::Io(e.to_string()))?;
    let write = |name: String, bytes: &[u8]| -> Result<(), CliError> {
        std::fs::write(out.join(name), bytes).map_err(|e| CliError::Io(e.to_string()))
    };

    let steps = spec.failed_dirs.len();
    for k in 0..=steps {
        if k > 0 {
            bayes.update_failure(&AngleVector::new(vec![spec.failed_dirs[k - 1]]));
        }
        write(format!("dist_static_step{k:04}.csv"), &mass_csv(&static_dist))?;
        write(format!("dist_bayes_step{k:04}.csv"), &mass_csv(&bayes))?;
        if spec.snapshots.contains(&k) {
            let history = &spec.failed_dirs[..k];
            write(
                format!("dist_static_step{k:04}.svg"),
                polar_svg(&static_dist, &[]).as_bytes(),
            )?;
            write(
                format!("dist_bayes_step{k:04}.svg"),
                polar_svg(&bayes, history).as_bytes(),
            )?;
        }
    }
    Ok(())
}

/// Default failure script: fifteen repeats of the same angle, matching the
/// upward-pointing scripted replay.
pub fn default_failed_dirs() -> Vec<f64> {
    vec![PI / 2.0; 15]
}
