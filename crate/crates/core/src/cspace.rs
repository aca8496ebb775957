//! Configuration spaces: worlds, robots, validity and motion checks.
//!
//! A [`World`] couples axis bounds, polygonal workspace obstacles and a robot
//! model into a validity oracle over configurations and straight-line
//! motions. Worlds are immutable after construction and safe to share across
//! concurrent planner runs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{segments_intersect, Point, Polygon};

/// A point in d-dimensional configuration space. Joint values are radians
/// for arm robots and world units for point robots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Config {
    coords: Vec<f64>,
}

impl Config {
    /// Panics if any coordinate is non-finite.
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "configuration coordinates must be finite: {coords:?}"
        );
        Config { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, other: &Config) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Linear interpolation at parameter `t` in [0, 1].
    pub fn lerp(&self, other: &Config, t: f64) -> Config {
        Config {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + (b - a) * t)
                .collect(),
        }
    }
}

impl std::ops::Index<usize> for Config {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// A straight-line connection between two configurations.
#[derive(Debug, Clone)]
pub struct Motion {
    pub from: Config,
    pub to: Config,
}

impl Motion {
    /// Panics if the endpoints differ in dimension.
    pub fn new(from: Config, to: Config) -> Self {
        assert_eq!(
            from.dim(),
            to.dim(),
            "motion endpoints must share a dimension"
        );
        Motion { from, to }
    }
}

/// Robot models embedded in the 2D workspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Robot {
    /// A dimensionless point moving in the plane; d = 2.
    Point,
    /// A planar kinematic chain of revolute joints; d = number of links.
    PlanarArm {
        base: Point,
        link_lengths: Vec<f64>,
        joint_limits: Vec<[f64; 2]>,
    },
}

/// Maximum rejection-sampling attempts before `sample_free` gives up.
pub const MAX_SAMPLE_REJECTIONS: u64 = 100_000;

/// Cap on interpolation steps along one motion; guards against resolutions
/// that are absurdly fine relative to the world diagonal.
const MAX_MOTION_SUBDIVISIONS: u64 = 1 << 24;

/// A valid sample together with the number of rejection-sampling attempts
/// it took to draw it (accepted draw included).
#[derive(Debug, Clone)]
pub struct FreeSample {
    pub config: Config,
    pub attempts: u64,
}

/// Immutable planning world: bounds, obstacles, robot and the interpolation
/// resolution used by motion validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct World {
    bounds: Vec<[f64; 2]>,
    obstacles: Vec<Polygon>,
    robot: Robot,
    motion_check_resolution: f64,
}

impl World {
    pub fn new(
        bounds: Vec<[f64; 2]>,
        obstacles: Vec<Polygon>,
        robot: Robot,
        motion_check_resolution: f64,
    ) -> Result<Self> {
        let d = match &robot {
            Robot::Point => 2,
            Robot::PlanarArm { link_lengths, .. } => link_lengths.len(),
        };
        if bounds.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bounds.len(),
            });
        }
        for (i, b) in bounds.iter().enumerate() {
            if !(b[0].is_finite() && b[1].is_finite() && b[0] < b[1]) {
                return Err(Error::InvalidParameter {
                    name: "bounds",
                    message: format!("axis {i} interval [{}, {}] is not a proper interval", b[0], b[1]),
                });
            }
        }
        if let Robot::PlanarArm {
            link_lengths,
            joint_limits,
            ..
        } = &robot
        {
            if link_lengths.is_empty() || link_lengths.iter().any(|&l| !(l > 0.0)) {
                return Err(Error::InvalidParameter {
                    name: "link_lengths",
                    message: "every link length must be positive".into(),
                });
            }
            if joint_limits.len() != link_lengths.len() {
                return Err(Error::DimensionMismatch {
                    expected: link_lengths.len(),
                    got: joint_limits.len(),
                });
            }
            for (i, l) in joint_limits.iter().enumerate() {
                if !(l[0] <= l[1]) {
                    return Err(Error::InvalidParameter {
                        name: "joint_limits",
                        message: format!("joint {i} interval is empty"),
                    });
                }
            }
        }
        if !(motion_check_resolution > 0.0) || !motion_check_resolution.is_finite() {
            return Err(Error::InvalidParameter {
                name: "motion_check_resolution",
                message: "must be a positive finite number".into(),
            });
        }
        let world = World {
            bounds,
            obstacles,
            robot,
            motion_check_resolution,
        };
        if world.diagonal() / motion_check_resolution > MAX_MOTION_SUBDIVISIONS as f64 {
            return Err(Error::InvalidParameter {
                name: "motion_check_resolution",
                message: "finer than 2^-24 of the workspace diagonal".into(),
            });
        }
        Ok(world)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn robot(&self) -> &Robot {
        &self.robot
    }

    pub fn motion_check_resolution(&self) -> f64 {
        self.motion_check_resolution
    }

    /// Euclidean length of the bounds box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.bounds
            .iter()
            .map(|b| (b[1] - b[0]) * (b[1] - b[0]))
            .sum::<f64>()
            .sqrt()
    }

    fn in_bounds(&self, q: &Config) -> bool {
        q.coords()
            .iter()
            .zip(&self.bounds)
            .all(|(c, b)| *c >= b[0] && *c <= b[1])
    }

    /// Validity oracle: within bounds/joint limits and collision-free.
    ///
    /// Panics on dimension mismatch.
    pub fn is_valid(&self, q: &Config) -> bool {
        assert_eq!(
            q.dim(),
            self.dim(),
            "configuration dimension {} does not match world dimension {}",
            q.dim(),
            self.dim()
        );
        if !self.in_bounds(q) {
            return false;
        }
        match &self.robot {
            Robot::Point => {
                let p = [q[0], q[1]];
                !self.obstacles.iter().any(|o| o.contains(p))
            }
            Robot::PlanarArm { joint_limits, .. } => {
                if !q
                    .coords()
                    .iter()
                    .zip(joint_limits)
                    .all(|(c, l)| *c >= l[0] && *c <= l[1])
                {
                    return false;
                }
                let links = self.forward_kinematics(q);
                for (a, b) in &links {
                    if self.obstacles.iter().any(|o| o.hits_segment(*a, *b)) {
                        return false;
                    }
                }
                // Self-collision between non-adjacent links. Adjacent links
                // share a joint and are never flagged.
                for i in 0..links.len() {
                    for j in (i + 2)..links.len() {
                        if segments_intersect(links[i].0, links[i].1, links[j].0, links[j].1) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Validates the straight segment by checking interpolated configurations
    /// spaced at most `motion_check_resolution` apart, endpoints included.
    ///
    /// The step count is the smallest power of two meeting the spacing bound,
    /// so halving the resolution re-checks every previously checked point.
    pub fn is_motion_valid(&self, m: &Motion) -> bool {
        assert_eq!(m.from.dim(), self.dim());
        let dist = m.from.distance(&m.to);
        let mut steps: u64 = 1;
        while dist / steps as f64 > self.motion_check_resolution {
            steps *= 2;
        }
        for i in 0..=steps {
            let q = m.from.lerp(&m.to, i as f64 / steps as f64);
            if !self.is_valid(&q) {
                return false;
            }
        }
        true
    }

    /// Workspace segments of each arm link at configuration `q`. Segment `i`
    /// starts where segment `i-1` ends; orientations accumulate joint angles.
    ///
    /// Panics when called for a point robot.
    pub fn forward_kinematics(&self, q: &Config) -> Vec<(Point, Point)> {
        let Robot::PlanarArm {
            base, link_lengths, ..
        } = &self.robot
        else {
            panic!("forward_kinematics requires a planar-arm robot");
        };
        assert_eq!(q.dim(), link_lengths.len());
        let mut segments = Vec::with_capacity(link_lengths.len());
        let mut angle = 0.0;
        let mut at = *base;
        for (i, &len) in link_lengths.iter().enumerate() {
            angle += q[i];
            let next = [at[0] + len * angle.cos(), at[1] + len * angle.sin()];
            segments.push((at, next));
            at = next;
        }
        segments
    }

    /// Uniform rejection sampling over the bounds until a valid configuration
    /// is found. Errors after [`MAX_SAMPLE_REJECTIONS`] attempts.
    pub fn sample_free<R: Rng>(&self, rng: &mut R) -> Result<FreeSample> {
        for attempt in 1..=MAX_SAMPLE_REJECTIONS {
            let coords: Vec<f64> = self
                .bounds
                .iter()
                .map(|b| rng.random_range(b[0]..b[1]))
                .collect();
            let q = Config::new(coords);
            if self.is_valid(&q) {
                return Ok(FreeSample {
                    config: q,
                    attempts: attempt,
                });
            }
        }
        Err(Error::SamplingExhausted {
            attempts: MAX_SAMPLE_REJECTIONS,
        })
    }
}
