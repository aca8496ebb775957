//! The planner graph: nodes across disjointed trees, validated edges with
//! Euclidean costs, union-find merge bookkeeping and incremental
//! shortest-path maintenance from the start node.
//!
//! Edges are only ever added (a rewiring improvement adds the better edge
//! rather than swapping parents), so the cost-to-start of every node is
//! non-increasing over a run and can be maintained by relaxation floods on
//! each insertion.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::cspace::Config;

/// Union-find over tree ids, growable as restarts create fresh trees.
#[derive(Debug, Clone, Default)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl DisjointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.rank.push(0);
        self.components += 1;
        id
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    /// Returns true if the two sets were distinct and are now merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        self.union_roots(a, b).is_some()
    }

    /// Like [`union`](Self::union) but reports (winner, loser) roots when a
    /// merge happened, so callers can fold auxiliary per-root data.
    pub fn union_roots(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi;
        if self.rank[ra] == self.rank[rb] {
            self.rank[hi] += 1;
        }
        self.components -= 1;
        Some((hi, lo))
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

/// Serializable snapshot of a graph: nodes, undirected edges with costs and
/// the canonical (merged) tree id of every node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphRecord {
    pub nodes: Vec<Vec<f64>>,
    pub edges: Vec<(usize, usize, f64)>,
    pub tree_ids: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PlanGraph {
    nodes: Vec<Config>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
    tree_of: Vec<usize>,
    trees: DisjointSet,
    /// Node members per canonical tree root; folded on unions so component
    /// scans avoid per-node find() calls.
    members: Vec<Vec<usize>>,
    cost: Vec<f64>,
    pred: Vec<Option<usize>>,
    source: Option<usize>,
}

impl PlanGraph {
    pub fn new() -> Self {
        PlanGraph {
            nodes: Vec::new(),
            adjacency: Vec::new(),
            edges: Vec::new(),
            tree_of: Vec::new(),
            trees: DisjointSet::new(),
            members: Vec::new(),
            cost: Vec::new(),
            pred: Vec::new(),
            source: None,
        }
    }

    pub fn new_tree(&mut self) -> usize {
        let id = self.trees.push();
        debug_assert_eq!(id, self.members.len());
        self.members.push(Vec::new());
        id
    }

    pub fn add_node(&mut self, q: Config, tree: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(q);
        self.adjacency.push(Vec::new());
        let root = self.trees.find(tree);
        self.members[root].push(id);
        self.tree_of.push(tree);
        self.cost.push(f64::INFINITY);
        self.pred.push(None);
        id
    }

    /// Marks `node` as the start of all shortest-path bookkeeping.
    pub fn set_source(&mut self, node: usize) {
        self.source = Some(node);
        self.cost[node] = 0.0;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &Config {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Config] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn tree_of(&self, node: usize) -> usize {
        self.tree_of[node]
    }

    /// Canonical tree id of the component `node` currently belongs to.
    pub fn canonical_tree_of(&mut self, node: usize) -> usize {
        let t = self.tree_of[node];
        self.trees.find(t)
    }

    pub fn trees_mut(&mut self) -> &mut DisjointSet {
        &mut self.trees
    }

    pub fn tree_components(&self) -> usize {
        self.trees.components()
    }

    /// Cost-to-source of `node`; infinite while unreached.
    pub fn cost_from_source(&self, node: usize) -> f64 {
        self.cost[node]
    }

    /// Inserts the validated undirected edge (u, v) with exact Euclidean
    /// cost, then floods cost improvements until shortest paths from the
    /// source are exact again. Also unions the two tree ids; returns true
    /// when that union merged two distinct components.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert_ne!(u, v);
        let w = self.nodes[u].distance(&self.nodes[v]);
        self.adjacency[u].push((v, w));
        self.adjacency[v].push((u, w));
        self.edges.push((u.min(v), u.max(v), w));
        let roots = self.trees.union_roots(self.tree_of[u], self.tree_of[v]);
        if let Some((winner, loser)) = roots {
            let moved = std::mem::take(&mut self.members[loser]);
            self.members[winner].extend(moved);
        }
        let merged = roots.is_some();

        let mut queue = VecDeque::new();
        if self.cost[u] + w < self.cost[v] {
            self.cost[v] = self.cost[u] + w;
            self.pred[v] = Some(u);
            queue.push_back(v);
        } else if self.cost[v] + w < self.cost[u] {
            self.cost[u] = self.cost[v] + w;
            self.pred[u] = Some(v);
            queue.push_back(u);
        }
        while let Some(x) = queue.pop_front() {
            let cx = self.cost[x];
            for i in 0..self.adjacency[x].len() {
                let (y, wy) = self.adjacency[x][i];
                if cx + wy < self.cost[y] {
                    self.cost[y] = cx + wy;
                    self.pred[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        merged
    }

    /// Shortest known path from the source to `target`, if reached.
    pub fn path_to(&self, target: usize) -> Option<(Vec<Config>, f64)> {
        if !self.cost[target].is_finite() {
            return None;
        }
        let mut rev = vec![target];
        let mut at = target;
        while let Some(p) = self.pred[at] {
            rev.push(p);
            at = p;
        }
        debug_assert_eq!(Some(at), self.source);
        rev.reverse();
        Some((
            rev.iter().map(|&i| self.nodes[i].clone()).collect(),
            self.cost[target],
        ))
    }

    /// Nodes within `radius` of `q` in ascending index order, excluding
    /// `exclude`. Linear scan; adequate at the node counts used here.
    pub fn nodes_within(&self, q: &Config, radius: f64, exclude: Option<usize>) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if Some(i) == exclude {
                continue;
            }
            if node.distance(q) <= radius {
                out.push(i);
            }
        }
        out
    }

    /// Index of the node nearest to `q` among those whose component root is
    /// `component`, or None when the component has no nodes. Linear scan of
    /// the component's member list.
    pub fn nearest_in_component(&mut self, q: &Config, component: usize) -> Option<usize> {
        let root = self.trees.find(component);
        let mut best: Option<(usize, f64)> = None;
        for &i in &self.members[root] {
            let d = self.nodes[i].distance(q);
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Snapshot with canonical tree ids resolved.
    pub fn to_record(&mut self) -> GraphRecord {
        let tree_ids = (0..self.nodes.len())
            .map(|i| self.trees.find(self.tree_of[i]))
            .collect();
        GraphRecord {
            nodes: self.nodes.iter().map(|c| c.coords().to_vec()).collect(),
            edges: self.edges.clone(),
            tree_ids,
        }
    }
}

impl Default for PlanGraph {
    fn default() -> Self {
        Self::new()
    }
}
