//! Renders a run record over its scenario world: obstacles, tree edges and
//! nodes, and the solution path. Arm worlds are drawn in the workspace with
//! nodes projected to end-effector positions and link poses along the path.

use rrdt_core::cspace::{Config, Robot, World};
use rrdt_core::experiment::RunRecord;
use rrdt_core::Scenario;

use crate::svg::{SvgDoc, TREE_PALETTE};

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    /// Draw nodes and edges of the search trees.
    pub show_trees: bool,
    /// Highlight the solution path.
    pub show_path: bool,
    /// Stroke edges by canonical tree id instead of a single color.
    pub color_by_tree: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            show_trees: true,
            show_path: true,
            color_by_tree: false,
        }
    }
}

/// Workspace extent of the drawing: world bounds for point robots, obstacle
/// bounding box plus the arm's reach disc otherwise.
fn workspace_extent(world: &World) -> ([f64; 2], [f64; 2]) {
    match world.robot() {
        Robot::Point => {
            let b = world.bounds();
            ([b[0][0], b[1][0]], [b[0][1], b[1][1]])
        }
        Robot::PlanarArm {
            base, link_lengths, ..
        } => {
            let reach: f64 = link_lengths.iter().sum();
            let mut lo = [base[0] - reach, base[1] - reach];
            let mut hi = [base[0] + reach, base[1] + reach];
            for o in world.obstacles() {
                let (olo, ohi) = o.bounding_box();
                for k in 0..2 {
                    lo[k] = lo[k].min(olo[k]);
                    hi[k] = hi[k].max(ohi[k]);
                }
            }
            (lo, hi)
        }
    }
}

/// Workspace point a configuration is drawn at.
fn draw_point(world: &World, coords: &[f64]) -> [f64; 2] {
    match world.robot() {
        Robot::Point => [coords[0], coords[1]],
        Robot::PlanarArm { .. } => {
            let q = Config::new(coords.to_vec());
            let links = world.forward_kinematics(&q);
            links.last().expect("arm has links").1
        }
    }
}

pub fn render_record(scenario: &Scenario, record: &RunRecord, opts: RenderOptions) -> String {
    let world = &scenario.world;
    let (lo, hi) = workspace_extent(world);
    let w = hi[0] - lo[0];
    let h = hi[1] - lo[1];
    let margin = 0.03 * w.max(h);
    // SVG y grows downward; flip about the vertical extent
    let flip = |p: [f64; 2]| [p[0], hi[1] + lo[1] - p[1]];
    let mut doc = SvgDoc::new([lo[0] - margin, lo[1] - margin, w + 2.0 * margin, h + 2.0 * margin]);
    doc.rect(
        lo[0] - margin,
        lo[1] - margin,
        w + 2.0 * margin,
        h + 2.0 * margin,
        "#ffffff",
    );
    for obstacle in world.obstacles() {
        let pts: Vec<[f64; 2]> = obstacle.vertices().iter().map(|&v| flip(v)).collect();
        doc.polygon(&pts, "#8b98a9");
    }

    let scale = w.max(h);
    let Some(result) = &record.result else {
        return doc.finish();
    };
    let points: Vec<[f64; 2]> = result
        .graph
        .nodes
        .iter()
        .map(|c| flip(draw_point(world, c)))
        .collect();

    if opts.show_trees {
        for &(u, v, _) in &result.graph.edges {
            let color = if opts.color_by_tree {
                TREE_PALETTE[result.graph.tree_ids[u] % TREE_PALETTE.len()]
            } else {
                "#5b8dbf"
            };
            doc.line(points[u], points[v], color, scale / 900.0);
        }
        for (i, p) in points.iter().enumerate() {
            let color = if opts.color_by_tree {
                TREE_PALETTE[result.graph.tree_ids[i] % TREE_PALETTE.len()]
            } else {
                "#29506d"
            };
            doc.circle(*p, scale / 500.0, color);
        }
    }

    if opts.show_path {
        if let Some(path) = &result.path {
            if let Robot::PlanarArm { .. } = world.robot() {
                // link poses along the solution, subsampled
                let stride = (path.len() / 24).max(1);
                for coords in path.iter().step_by(stride).chain(path.last().into_iter()) {
                    let q = Config::new(coords.clone());
                    let links = world.forward_kinematics(&q);
                    let mut chain = vec![flip(links[0].0)];
                    chain.extend(links.iter().map(|(_, end)| flip(*end)));
                    doc.polyline(&chain, "#3aa65b", scale / 450.0, "arm-pose");
                }
            }
            let pts: Vec<[f64; 2]> = path
                .iter()
                .map(|c| flip(draw_point(world, c)))
                .collect();
            doc.polyline(&pts, "#d62728", scale / 220.0, "solution");
        }
    }
    doc.finish()
}
