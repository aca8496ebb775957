//! Directional proposal distributions over extension directions.
//!
//! The proposal is a discretized probability mass over a regular lattice of
//! direction angles in [-pi, pi)^(d-1). It starts as a von Mises-Fisher
//! density evaluated at bin centers and is sequentially masked after failed
//! extensions: each failure at direction x' multiplies every bin by
//! (1 - k(bin, x')) with a periodic squared-exponential kernel k, then
//! renormalizes. Sampling draws a bin from the multinomial mass and mixes in
//! a per-axis uniform offset of one bin width, so draws are continuous.
//!
//! Normalization is always the numeric sum over the discretized support; the
//! closed-form vMF constant (and its Bessel function) is never needed because
//! only the discretized distribution is ever sampled.
//!
//! The distribution lives in raw angle space: no sphere-area correction is
//! applied for d > 2, which biases density toward the poles of the
//! hyperspherical parameterization. At the dimensions used here (d <= 4) the
//! bias is mild and identical for every planner variant being compared.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the total bin count of one proposal grid.
pub const MAX_TOTAL_BINS: u64 = 1_000_000;

/// When the un-normalized mass sum drops below this floor after a masking
/// update, the distribution is declared collapsed and reset to its prior.
pub const MASS_UNDERFLOW_FLOOR: f64 = 1e-12;

/// Wraps an angle into [-pi, pi).
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let wrapped = (a + PI).rem_euclid(two_pi) - PI;
    // rem_euclid can land exactly on the excluded upper endpoint
    if wrapped >= PI {
        -PI
    } else {
        wrapped
    }
}

/// d-1 angles in [-pi, pi) parameterizing a unit direction in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleVector {
    angles: Vec<f64>,
}

impl AngleVector {
    /// Wraps every component into [-pi, pi).
    pub fn new(angles: Vec<f64>) -> Self {
        AngleVector {
            angles: angles.into_iter().map(wrap_angle).collect(),
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Number of angle components (one less than the ambient dimension).
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Maps direction angles to the unit vector they parameterize.
///
/// Convention (fixed for this crate): start in the 1-2 plane with
/// u = (cos t1, sin t1); every further angle t_k lifts the accumulated
/// vector as u' = (sin t_k * u, cos t_k). Consequences used by tests:
/// d=2 maps t to (cos t, sin t), and d=3 maps (pi/2, 0) to (0, 0, 1).
pub fn angles_to_unit_vector(x: &AngleVector) -> Vec<f64> {
    assert!(!x.is_empty(), "need at least one angle");
    let a = x.angles();
    let mut v = vec![a[0].cos(), a[0].sin()];
    for &t in &a[1..] {
        let (s, c) = t.sin_cos();
        for e in v.iter_mut() {
            *e *= s;
        }
        v.push(c);
    }
    v
}

/// von Mises-Fisher parameters: unit mean direction and concentration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmfParams {
    mu: Vec<f64>,
    kappa: f64,
}

impl VmfParams {
    /// Normalizes `mu` to unit length; errors on a zero vector or negative
    /// concentration.
    pub fn new(mu: Vec<f64>, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter {
                name: "kappa",
                message: format!("must be finite and non-negative, got {kappa}"),
            });
        }
        let norm = mu.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                message: "mean direction must be a nonzero finite vector".into(),
            });
        }
        Ok(VmfParams {
            mu: mu.into_iter().map(|c| c / norm).collect(),
            kappa,
        })
    }

    /// Prior centered on the direction given by `mean` angles.
    pub fn from_mean_angles(mean: &AngleVector, kappa: f64) -> Self {
        VmfParams {
            mu: angles_to_unit_vector(mean),
            kappa,
        }
    }

    /// Uniform prior (kappa = 0) in dimension `d`; the mean is immaterial.
    pub fn uniform(d: usize) -> Self {
        let mut mu = vec![0.0; d];
        mu[0] = 1.0;
        VmfParams { mu, kappa: 0.0 }
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Log density of the vMF distribution up to its normalizing constant:
/// kappa * dot(mu, x). Panics if `x` is not unit length.
pub fn vmf_log_density_unnormalized(p: &VmfParams, x: &[f64]) -> f64 {
    assert_eq!(x.len(), p.mu.len(), "direction dimension mismatch");
    let norm_sq: f64 = x.iter().map(|c| c * c).sum();
    assert!(
        (norm_sq - 1.0).abs() < 1e-9,
        "x must be a unit vector, |x|^2 = {norm_sq}"
    );
    p.kappa * p.mu.iter().zip(x).map(|(m, c)| m * c).sum::<f64>()
}

/// Periodic squared-exponential kernel parameters. The period is fixed to
/// 2*pi; `beta` scales the magnitude (sigma^2 = beta) and `lambda` is the
/// angular length scale. `beta = 0` disables masking entirely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    beta: f64,
    lambda: f64,
}

impl KernelParams {
    pub fn new(beta: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter {
                name: "beta",
                message: format!("must lie in [0, 1], got {beta}"),
            });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                message: format!("must be positive and finite, got {lambda}"),
            });
        }
        Ok(KernelParams { beta, lambda })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Multi-axis periodic squared-exponential kernel:
/// beta * exp(-2 * sum_a sin^2((x_a - y_a)/2) / lambda^2).
///
/// Per-axis squared sines are summed inside the exponent, the separable
/// extension of the one-dimensional form with a single beta scale; the value
/// stays in (0, beta] and is 2*pi-periodic per axis.
pub fn kernel_eval(k: &KernelParams, x: &AngleVector, y: &AngleVector) -> f64 {
    assert_eq!(x.len(), y.len(), "kernel arguments dimension mismatch");
    let mut sum = 0.0;
    for (a, b) in x.angles().iter().zip(y.angles()) {
        let s = ((a - b) / 2.0).sin();
        sum += s * s;
    }
    k.beta * (-2.0 * sum / (k.lambda * k.lambda)).exp()
}

/// Outcome of one failure update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOutcome {
    /// Mass was masked and renormalized.
    Updated,
    /// Un-normalized mass underflowed; distribution was reset to its prior
    /// and the failure history accounted here was discarded.
    Collapsed,
}

/// Discretized directional proposal: multinomial mass over the angle lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalProposal {
    /// Ambient dimension d; the grid spans (d-1) angle axes.
    d: usize,
    bins_per_axis: usize,
    mass: Vec<f64>,
    kernel: KernelParams,
    prior: VmfParams,
    failed_count: usize,
}

/// Default grid resolution per axis for ambient dimension `d`.
pub fn default_bins_per_axis(d: usize) -> usize {
    match d {
        2 => 360,
        3 | 4 => 36,
        _ => 12,
    }
}

impl DirectionalProposal {
    /// Discretizes the vMF prior over the angle lattice. Mass at each bin is
    /// proportional to the density at the bin-center direction, normalized by
    /// the numeric sum.
    pub fn init(prior: VmfParams, kernel: KernelParams, bins_per_axis: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                message: format!("ambient dimension must be >= 2, got {d}"),
            });
        }
        if bins_per_axis < 4 {
            return Err(Error::InvalidParameter {
                name: "bins_per_axis",
                message: format!("must be >= 4, got {bins_per_axis}"),
            });
        }
        if prior.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: prior.dim(),
            });
        }
        let axes = d - 1;
        let total = (bins_per_axis as u64).checked_pow(axes as u32);
        let total = match total {
            Some(t) if t <= MAX_TOTAL_BINS => t as usize,
            _ => {
                return Err(Error::GridExplosion {
                    bins: total.unwrap_or(u64::MAX),
                    limit: MAX_TOTAL_BINS,
                })
            }
        };
        let mut p = DirectionalProposal {
            d,
            bins_per_axis,
            mass: vec![0.0; total],
            kernel,
            prior,
            failed_count: 0,
        };
        p.reset_to_prior();
        Ok(p)
    }

    fn reset_to_prior(&mut self) {
        let kappa = self.prior.kappa();
        if kappa == 0.0 {
            let uniform = 1.0 / self.mass.len() as f64;
            self.mass.fill(uniform);
        } else {
            let mut total = 0.0;
            for b in 0..self.mass.len() {
                let dir = angles_to_unit_vector(&self.bin_center(b));
                // shift by -kappa so the exponent peaks at 0; the shift
                // cancels in normalization
                let log_density = vmf_log_density_unnormalized(&self.prior, &dir) - kappa;
                let m = log_density.exp();
                self.mass[b] = m;
                total += m;
            }
            for m in &mut self.mass {
                *m /= total;
            }
        }
        self.failed_count = 0;
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bins_per_axis(&self) -> usize {
        self.bins_per_axis
    }

    pub fn bin_count(&self) -> usize {
        self.mass.len()
    }

    /// Lattice spacing per axis.
    pub fn bin_width(&self) -> f64 {
        2.0 * PI / self.bins_per_axis as f64
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    pub fn prior(&self) -> &VmfParams {
        &self.prior
    }

    pub fn failed_count(&self) -> usize {
        self.failed_count
    }

    fn multi_index(&self, b: usize) -> Vec<usize> {
        let axes = self.d - 1;
        let mut idx = vec![0; axes];
        let mut rem = b;
        for a in (0..axes).rev() {
            idx[a] = rem % self.bins_per_axis;
            rem /= self.bins_per_axis;
        }
        idx
    }

    /// Center angles of bin `b`.
    pub fn bin_center(&self, b: usize) -> AngleVector {
        let w = self.bin_width();
        AngleVector::new(
            self.multi_index(b)
                .into_iter()
                .map(|i| -PI + (i as f64 + 0.5) * w)
                .collect(),
        )
    }

    /// Lower corner angles of bin `b`.
    pub fn bin_lower(&self, b: usize) -> AngleVector {
        let w = self.bin_width();
        AngleVector::new(
            self.multi_index(b)
                .into_iter()
                .map(|i| -PI + i as f64 * w)
                .collect(),
        )
    }

    /// Index of the bin whose hypercube contains `x`.
    pub fn bin_of(&self, x: &AngleVector) -> usize {
        assert_eq!(x.len(), self.d - 1);
        let w = self.bin_width();
        let mut b = 0;
        for &a in x.angles() {
            let i = (((a + PI) / w).floor() as usize).min(self.bins_per_axis - 1);
            b = b * self.bins_per_axis + i;
        }
        b
    }

    /// Sequential Bayesian masking of a failed direction: every bin is
    /// scaled by (1 - k(center, x_failed)) and the mass renormalized. If the
    /// un-normalized sum underflows, the distribution resets to its prior.
    pub fn update_failure(&mut self, x_failed: &AngleVector) -> UpdateOutcome {
        assert_eq!(x_failed.len(), self.d - 1);
        if self.kernel.beta() == 0.0 {
            // mask depth zero: the update factor is exactly 1 everywhere
            self.failed_count += 1;
            return UpdateOutcome::Updated;
        }
        let axes = self.d - 1;
        let w = self.bin_width();
        let lambda_sq = self.kernel.lambda() * self.kernel.lambda();
        // Per-axis factor tables: the separable kernel is a product of
        // exp(-2 sin^2(delta/2)/lambda^2) terms, scaled once by beta.
        let mut tables = Vec::with_capacity(axes);
        for (a, &xa) in x_failed.angles().iter().enumerate() {
            let _ = a;
            let mut t = Vec::with_capacity(self.bins_per_axis);
            for i in 0..self.bins_per_axis {
                let center = -PI + (i as f64 + 0.5) * w;
                let s = ((center - xa) / 2.0).sin();
                t.push((-2.0 * s * s / lambda_sq).exp());
            }
            tables.push(t);
        }
        let beta = self.kernel.beta();
        let mut total = 0.0;
        for b in 0..self.mass.len() {
            let mut factor = beta;
            let mut rem = b;
            for a in (0..axes).rev() {
                factor *= tables[a][rem % self.bins_per_axis];
                rem /= self.bins_per_axis;
            }
            self.mass[b] *= 1.0 - factor;
            total += self.mass[b];
        }
        if total < MASS_UNDERFLOW_FLOOR {
            self.reset_to_prior();
            return UpdateOutcome::Collapsed;
        }
        for m in &mut self.mass {
            *m /= total;
        }
        self.failed_count += 1;
        UpdateOutcome::Updated
    }

    /// Draws a direction: categorical bin choice over the mass, plus a
    /// uniform offset in [0, bin width) per axis from the bin's lower corner.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> AngleVector {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = self.mass.len() - 1;
        for (b, &m) in self.mass.iter().enumerate() {
            acc += m;
            if u < acc {
                chosen = b;
                break;
            }
        }
        let w = self.bin_width();
        let lower = self.bin_lower(chosen);
        AngleVector::new(
            lower
                .angles()
                .iter()
                .map(|&lo| lo + rng.random::<f64>() * w)
                .collect(),
        )
    }

    /// Debug dump: one `bin_center_angles..., mass` row per bin.
    pub fn write_mass_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let axes = self.d - 1;
        for a in 0..axes {
            write!(out, "bin_center_{a},")?;
        }
        writeln!(out, "mass")?;
        for b in 0..self.mass.len() {
            for c in self.bin_center(b).angles() {
                write!(out, "{c},")?;
            }
            writeln!(out, "{}", self.mass[b])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kernel_default() -> KernelParams {
        KernelParams::new(0.9, PI / 4.0).unwrap()
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert!((wrap_angle(3.0 * PI) - -PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - -PI).abs() < 1e-12);
        assert!((wrap_angle(0.1) - 0.1).abs() < 1e-15);
        assert!((wrap_angle(2.0 * PI + 0.1) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn unit_vector_convention() {
        // d=2
        let v = angles_to_unit_vector(&AngleVector::new(vec![0.0]));
        assert!((v[0] - 1.0).abs() < 1e-12 && v[1].abs() < 1e-12);
        let v = angles_to_unit_vector(&AngleVector::new(vec![std::f64::consts::FRAC_PI_2]));
        assert!(v[0].abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
        // d=3: documented convention sends (pi/2, 0) to (0, 0, 1)
        let v = angles_to_unit_vector(&AngleVector::new(vec![std::f64::consts::FRAC_PI_2, 0.0]));
        assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_vector_norm_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 2..=5 {
            for _ in 0..200 {
                let x = AngleVector::new((0..d - 1).map(|_| rng.random_range(-PI..PI)).collect());
                let v = angles_to_unit_vector(&x);
                let norm: f64 = v.iter().map(|c| c * c).sum::<f64>();
                assert!((norm - 1.0).abs() < 1e-12);
                assert_eq!(v.len(), d);
            }
        }
    }

    #[test]
    fn vmf_log_density_values() {
        let mu = VmfParams::new(vec![0.0, 1.0], 5.0).unwrap();
        // x = mu
        assert!((vmf_log_density_unnormalized(&mu, &[0.0, 1.0]) - 5.0).abs() < 1e-12);
        // x orthogonal to mu
        assert!(vmf_log_density_unnormalized(&mu, &[1.0, 0.0]).abs() < 1e-12);
        // kappa = 0 is uniform
        let flat = VmfParams::new(vec![0.0, 1.0], 0.0).unwrap();
        assert_eq!(vmf_log_density_unnormalized(&flat, &[1.0, 0.0]), 0.0);
    }

    #[test]
    #[should_panic(expected = "unit vector")]
    fn vmf_rejects_non_unit_direction() {
        let p = VmfParams::new(vec![1.0, 0.0], 1.0).unwrap();
        vmf_log_density_unnormalized(&p, &[0.5, 0.5]);
    }

    #[test]
    fn init_uniform_at_kappa_zero() {
        let p = DirectionalProposal::init(
            VmfParams::uniform(2),
            kernel_default(),
            360,
            2,
        )
        .unwrap();
        let expect = 1.0 / 360.0;
        for &m in p.mass() {
            assert!((m - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn init_mode_at_mean_direction() {
        // mu at a bin-center angle so the argmax is unambiguous
        let p = DirectionalProposal::init(
            VmfParams::new(vec![0.0, 1.0], 4.0).unwrap(),
            kernel_default(),
            360,
            2,
        )
        .unwrap();
        let argmax = (0..p.bin_count())
            .max_by(|&a, &b| p.mass()[a].partial_cmp(&p.mass()[b]).unwrap())
            .unwrap();
        let target = p.bin_of(&AngleVector::new(vec![std::f64::consts::FRAC_PI_2]));
        assert_eq!(argmax, target);
    }

    #[test]
    fn init_mass_ratio_matches_density_ratio() {
        // ratio between the bin at mu and the bin at mu + pi is e^(2 kappa)
        // within 1% when mu sits exactly on a bin center
        let bins = 360;
        let w = 2.0 * PI / bins as f64;
        let mu_angle = -PI + 180.5 * w; // a bin center
        let mu = AngleVector::new(vec![mu_angle]);
        let p = DirectionalProposal::init(
            VmfParams::from_mean_angles(&mu, 4.0),
            kernel_default(),
            bins,
            2,
        )
        .unwrap();
        let at_mu = p.mass()[p.bin_of(&mu)];
        let at_anti = p.mass()[p.bin_of(&AngleVector::new(vec![mu_angle + PI]))];
        let ratio = at_mu / at_anti;
        let expect = (2.0_f64 * 4.0).exp(); // e^8, frozen: 2980.9579870417283
        assert!((expect - 2980.957_987_041_728_3).abs() < 1e-9);
        assert!((ratio / expect - 1.0).abs() < 0.01, "ratio {ratio} vs {expect}");
    }

    #[test]
    fn grid_explosion_rejected() {
        let r = DirectionalProposal::init(
            VmfParams::uniform(5),
            kernel_default(),
            360,
            5,
        );
        match r {
            Err(Error::GridExplosion { .. }) => {}
            other => panic!("expected grid explosion, got {other:?}"),
        }
    }

    #[test]
    fn kernel_at_zero_distance_is_beta() {
        let k = kernel_default();
        let x = AngleVector::new(vec![0.3]);
        assert!((kernel_eval(&k, &x, &x) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn kernel_antipodal_frozen_value() {
        // closed form beta * exp(-2 / lambda^2) at separation pi;
        // frozen from a high-precision evaluation
        let k = kernel_default();
        let v = kernel_eval(
            &k,
            &AngleVector::new(vec![-PI / 2.0]),
            &AngleVector::new(vec![PI / 2.0]),
        );
        assert!((v - 0.035_167_307_497_844_51).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn kernel_periodic() {
        let k = kernel_default();
        let x = AngleVector::new(vec![0.7]);
        let y = AngleVector::new(vec![-2.1]);
        let y_shift = AngleVector::new(vec![-2.1 + 2.0 * PI]);
        assert!((kernel_eval(&k, &x, &y) - kernel_eval(&k, &x, &y_shift)).abs() < 1e-12);
    }

    #[test]
    fn kernel_bounds_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let beta = rng.random_range(0.05..1.0);
            let lambda = rng.random_range(0.1..3.0);
            let k = KernelParams::new(beta, lambda).unwrap();
            let x = AngleVector::new(vec![rng.random_range(-PI..PI), rng.random_range(-PI..PI)]);
            let y = AngleVector::new(vec![rng.random_range(-PI..PI), rng.random_range(-PI..PI)]);
            let v = kernel_eval(&k, &x, &y);
            assert!(v > 0.0 && v <= beta + 1e-15);
        }
    }

    #[test]
    fn update_point_mask_limit() {
        // beta = 1 with a tiny length scale only empties the failed bin
        let bins = 36;
        let mut p = DirectionalProposal::init(
            VmfParams::uniform(2),
            KernelParams::new(1.0, 1e-4).unwrap(),
            bins,
            2,
        )
        .unwrap();
        let failed = p.bin_center(7);
        assert_eq!(p.update_failure(&failed), UpdateOutcome::Updated);
        assert!(p.mass()[7] < 1e-15);
        let expect = 1.0 / (bins - 1) as f64;
        for (b, &m) in p.mass().iter().enumerate() {
            if b != 7 {
                assert!((m - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn update_argmin_at_failed_bin() {
        let mut p = DirectionalProposal::init(
            VmfParams::uniform(2),
            kernel_default(),
            360,
            2,
        )
        .unwrap();
        let failed = AngleVector::new(vec![1.0]);
        p.update_failure(&failed);
        let argmin = (0..p.bin_count())
            .min_by(|&a, &b| p.mass()[a].partial_cmp(&p.mass()[b]).unwrap())
            .unwrap();
        assert_eq!(argmin, p.bin_of(&failed));
        assert!((p.mass().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sequential_equals_batch_product() {
        // independent oracle: recompute the posterior as
        // prior * prod_j (1 - k(center, x_j)), renormalized once
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for d in [2usize, 3] {
            let bins = if d == 2 { 90 } else { 24 };
            let kappa = rng.random_range(0.0..6.0);
            let mean = AngleVector::new((0..d - 1).map(|_| rng.random_range(-PI..PI)).collect());
            let kernel = KernelParams::new(rng.random_range(0.3..0.95), rng.random_range(0.3..1.5)).unwrap();
            let prior = VmfParams::from_mean_angles(&mean, kappa);
            let mut seq = DirectionalProposal::init(prior.clone(), kernel.clone(), bins, d).unwrap();
            let fails: Vec<AngleVector> = (0..30)
                .map(|_| AngleVector::new((0..d - 1).map(|_| rng.random_range(-PI..PI)).collect()))
                .collect();
            for f in &fails {
                assert_eq!(seq.update_failure(f), UpdateOutcome::Updated);
            }
            // batch oracle
            let fresh = DirectionalProposal::init(prior, kernel.clone(), bins, d).unwrap();
            let mut batch: Vec<f64> = fresh.mass().to_vec();
            for (b, m) in batch.iter_mut().enumerate() {
                let center = fresh.bin_center(b);
                for f in &fails {
                    *m *= 1.0 - kernel_eval(&kernel, &center, f);
                }
            }
            let total: f64 = batch.iter().sum();
            for (b, m) in batch.iter().enumerate() {
                assert!(
                    (m / total - seq.mass()[b]).abs() < 1e-9,
                    "bin {b} differs: batch {} vs seq {}",
                    m / total,
                    seq.mass()[b]
                );
            }
            assert_eq!(seq.failed_count(), 30);
        }
    }

    #[test]
    fn collapse_resets_to_prior() {
        // Renormalization keeps repeated updates away from the floor, so a
        // collapse needs a single mask that wipes everything: a point mass
        // hit dead-center with beta = 1.
        let mut p = DirectionalProposal::init(
            VmfParams::uniform(2),
            KernelParams::new(1.0, 0.2).unwrap(),
            36,
            2,
        )
        .unwrap();
        let prior_mass = p.mass().to_vec();
        p.mass.fill(0.0);
        p.mass[7] = 1.0;
        let outcome = p.update_failure(&p.bin_center(7).clone());
        assert_eq!(outcome, UpdateOutcome::Collapsed);
        assert_eq!(p.failed_count(), 0);
        for (a, b) in p.mass().iter().zip(&prior_mass) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn beta_zero_update_is_identity() {
        let mut p = DirectionalProposal::init(
            VmfParams::new(vec![0.3, 0.8], 3.0).unwrap(),
            KernelParams::new(0.0, PI / 4.0).unwrap(),
            360,
            2,
        )
        .unwrap();
        let before = p.mass().to_vec();
        p.update_failure(&AngleVector::new(vec![0.5]));
        for (a, b) in p.mass().iter().zip(&before) {
            assert_eq!(a, b);
        }
        assert_eq!(p.failed_count(), 1);
    }

    #[test]
    fn sample_point_mass_stays_in_bin() {
        let mut p = DirectionalProposal::init(
            VmfParams::uniform(2),
            kernel_default(),
            36,
            2,
        )
        .unwrap();
        p.mass.fill(0.0);
        p.mass[11] = 1.0;
        let w = p.bin_width();
        let lo = p.bin_lower(11).angles()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let x = p.sample(&mut rng);
            assert_eq!(p.bin_of(&x), 11);
            assert!(x.angles()[0] >= lo && x.angles()[0] < lo + w);
        }
    }

    #[test]
    fn sample_frequencies_match_mass() {
        let p = DirectionalProposal::init(
            VmfParams::uniform(2),
            kernel_default(),
            36,
            2,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let draws = 100_000usize;
        let mut counts = vec![0u64; p.bin_count()];
        for _ in 0..draws {
            counts[p.bin_of(&p.sample(&mut rng))] += 1;
        }
        let expect = draws as f64 / 36.0;
        let sigma = (draws as f64 * (1.0 / 36.0) * (35.0 / 36.0)).sqrt();
        for &c in &counts {
            assert!((c as f64 - expect).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn post_failure_frequency_drop() {
        // empirical frequency at the failed bin drops by (1 - beta) / alpha
        let bins = 36;
        let prior = VmfParams::uniform(2);
        let kernel = kernel_default();
        let p0 = DirectionalProposal::init(prior.clone(), kernel.clone(), bins, 2).unwrap();
        let mut p1 = p0.clone();
        let failed = p0.bin_center(20);
        p1.update_failure(&failed);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 100_000usize;
        let count = |p: &DirectionalProposal, rng: &mut ChaCha8Rng| {
            let mut c = 0u64;
            for _ in 0..draws {
                if p.bin_of(&p.sample(rng)) == 20 {
                    c += 1;
                }
            }
            c
        };
        let before = count(&p0, &mut rng) as f64;
        let after = count(&p1, &mut rng) as f64;
        // exact oracle: the failed bin keeps (1 - beta) of its mass, lifted
        // by the renormalizer alpha = sum_b p0[b] * (1 - k(center_b, x'))
        let alpha: f64 = (0..p0.bin_count())
            .map(|b| p0.mass()[b] * (1.0 - kernel_eval(&kernel, &p0.bin_center(b), &failed)))
            .sum();
        let expected_ratio = p1.mass()[20] / p0.mass()[20];
        assert!(
            (expected_ratio - (1.0 - 0.9) / alpha).abs() < 1e-12,
            "posterior ratio must equal (1-beta)/alpha"
        );
        let ratio = after / before;
        // 4-sigma band via binomial error propagation on both counts
        let p_b = p0.mass()[20];
        let p_a = p1.mass()[20];
        let var = (p_a * (1.0 - p_a)) / (draws as f64 * p_b * p_b)
            + (p_a * p_a * (1.0 - p_b)) / (draws as f64 * p_b * p_b * p_b);
        assert!(
            (ratio - expected_ratio).abs() < 4.0 * var.sqrt(),
            "ratio {ratio} vs expected {expected_ratio}"
        );
    }

    #[test]
    fn normalization_preserved_under_random_updates() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut p = DirectionalProposal::init(
            VmfParams::new(vec![1.0, 1.0], 2.0).unwrap(),
            kernel_default(),
            360,
            2,
        )
        .unwrap();
        for _ in 0..500 {
            p.update_failure(&AngleVector::new(vec![rng.random_range(-PI..PI)]));
            let total: f64 = p.mass().iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(p.mass().iter().all(|&m| m >= 0.0));
        }
    }

    #[test]
    fn csv_dump_shape() {
        let p = DirectionalProposal::init(VmfParams::uniform(2), kernel_default(), 8, 2).unwrap();
        let mut buf = Vec::new();
        p.write_mass_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "bin_center_0,mass");
        assert_eq!(lines.len(), 9);
    }
}
