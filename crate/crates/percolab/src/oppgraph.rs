//! Spectrum-opportunity evaluation, secondary-graph construction, component
//! labeling, and window-crossing detection.
//!
//! A secondary user sees an opportunity iff no primary transmitter lies
//! within the primary interference range and no primary receiver lies within
//! the secondary interference range (inclusive comparisons; exact-boundary
//! distances are measure-zero and treated as blocking / as links for
//! reproducibility). An edge connects two users iff both see opportunities
//! and they are within the secondary transmission range.

use std::collections::HashMap;
use std::io::Write;

use crate::geometry::Point;
use crate::pointprocess::{RadioParams, Realization};
use crate::{Error, Result};

/// Uniform-cell spatial hash; queries scan the 3×3 neighborhood, so the cell
/// size must be at least the query radius.
pub(crate) struct SpatialGrid {
    cell: f64,
    map: HashMap<(i64, i64), Vec<u32>>,
}

impl SpatialGrid {
    pub(crate) fn build(points: &[Point], cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        let mut map: HashMap<(i64, i64), Vec<u32>> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            map.entry(Self::key(p, cell)).or_default().push(i as u32);
        }
        Self { cell, map }
    }

    fn key(p: &Point, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Visit indices of all points in the 3×3 cell neighborhood of `p`.
    pub(crate) fn visit_neighborhood<F: FnMut(u32)>(&self, p: &Point, mut f: F) {
        let (cx, cy) = Self::key(p, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.map.get(&(cx + dx, cy + dy)) {
                    for &i in v {
                        f(i);
                    }
                }
            }
        }
    }

    fn any_within(&self, points: &[Point], center: &Point, radius: f64) -> bool {
        let r_sq = radius * radius;
        let mut hit = false;
        self.visit_neighborhood(center, |i| {
            if !hit && points[i as usize].dist_sq(*center) <= r_sq {
                hit = true;
            }
        });
        hit
    }
}

/// Per-user opportunity flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpportunityFlags {
    pub sees_opportunity: Vec<bool>,
}

impl OpportunityFlags {
    pub fn flagged_count(&self) -> usize {
        self.sees_opportunity.iter().filter(|b| **b).count()
    }
}

/// Evaluate the opportunity predicate for every secondary user.
pub fn evaluate_opportunities(realization: &Realization, params: &RadioParams) -> OpportunityFlags {
    let cell = params
        .primary_interference_range
        .max(params.secondary_interference_range);
    let tx_points: Vec<Point> = realization.primary_pairs.iter().map(|p| p.tx).collect();
    let rx_points: Vec<Point> = realization.primary_pairs.iter().map(|p| p.rx).collect();
    let tx_grid = SpatialGrid::build(&tx_points, cell);
    let rx_grid = SpatialGrid::build(&rx_points, cell);

    let sees_opportunity = realization
        .secondary
        .iter()
        .map(|user| {
            !tx_grid.any_within(&tx_points, user, params.primary_interference_range)
                && !rx_grid.any_within(&rx_points, user, params.secondary_interference_range)
        })
        .collect();
    OpportunityFlags { sees_opportunity }
}

/// Undirected graph over the secondary users; edges exist only between
/// flagged users within transmission range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondaryGraph {
    pub adjacency: Vec<Vec<u32>>,
    pub edges: Vec<(u32, u32)>,
}

impl SecondaryGraph {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    /// Edge list export (`u,v` indices into the secondary-user list).
    pub fn write_edges_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "u,v")?;
        for (u, v) in &self.edges {
            writeln!(out, "{u},{v}")?;
        }
        Ok(())
    }
}

/// Build the secondary graph from flags via a spatial hash with cell size
/// equal to the link range.
pub fn build_graph(
    realization: &Realization,
    flags: &OpportunityFlags,
    params: &RadioParams,
) -> SecondaryGraph {
    let n = realization.secondary.len();
    assert_eq!(
        flags.sees_opportunity.len(),
        n,
        "flags mismatch realization"
    );
    let mut adjacency = vec![Vec::new(); n];
    let mut edges = Vec::new();

    let flagged: Vec<u32> = (0..n as u32)
        .filter(|&i| flags.sees_opportunity[i as usize])
        .collect();
    let flagged_points: Vec<Point> = flagged
        .iter()
        .map(|&i| realization.secondary[i as usize])
        .collect();
    if flagged.is_empty() {
        return SecondaryGraph { adjacency, edges };
    }
    let r = params.secondary_tx_range;
    let grid = SpatialGrid::build(&flagged_points, r);
    let r_sq = r * r;
    for (fi, p) in flagged_points.iter().enumerate() {
        let u = flagged[fi];
        grid.visit_neighborhood(p, |fj| {
            let v = flagged[fj as usize];
            if v > u && flagged_points[fj as usize].dist_sq(*p) <= r_sq {
                edges.push((u, v));
            }
        });
    }
    edges.sort_unstable();
    for &(u, v) in &edges {
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    SecondaryGraph { adjacency, edges }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        // Path halving.
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
    }
}

/// Union-find partition of the users: component id per user plus sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    /// Component id per user, compacted to 0..count in first-seen order.
    pub component: Vec<u32>,
    /// Size of each component, indexed by component id.
    pub sizes: Vec<u32>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }
}

/// Label the connected components of the graph.
pub fn label_components(graph: &SecondaryGraph) -> ComponentLabeling {
    let n = graph.node_count();
    let mut uf = UnionFind::new(n);
    for &(u, v) in &graph.edges {
        uf.union(u, v);
    }
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut component = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    for u in 0..n as u32 {
        let root = uf.find(u);
        let id = *remap.entry(root).or_insert_with(|| {
            sizes.push(0);
            sizes.len() as u32 - 1
        });
        sizes[id as usize] += 1;
        component.push(id);
    }
    ComponentLabeling { component, sizes }
}

/// Window-spanning flags for the finite-window percolation surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingFlags {
    pub left_right: bool,
    pub top_bottom: bool,
}

/// A component crosses left-to-right when it contains a flagged user with
/// `x ≤ margin` and one with `x ≥ width − margin`; top-to-bottom analogously.
pub fn detect_crossings(
    labeling: &ComponentLabeling,
    realization: &Realization,
    flags: &OpportunityFlags,
    margin: f64,
) -> CrossingFlags {
    assert!(margin >= 0.0, "margin must be non-negative");
    let k = labeling.component_count();
    let mut min_x = vec![f64::INFINITY; k];
    let mut max_x = vec![f64::NEG_INFINITY; k];
    let mut min_y = vec![f64::INFINITY; k];
    let mut max_y = vec![f64::NEG_INFINITY; k];
    for (u, p) in realization.secondary.iter().enumerate() {
        if !flags.sees_opportunity[u] {
            continue;
        }
        let c = labeling.component[u] as usize;
        min_x[c] = min_x[c].min(p.x);
        max_x[c] = max_x[c].max(p.x);
        min_y[c] = min_y[c].min(p.y);
        max_y[c] = max_y[c].max(p.y);
    }
    let w = realization.window.width;
    let h = realization.window.height;
    let left_right = (0..k).any(|c| min_x[c] <= margin && max_x[c] >= w - margin);
    let top_bottom = (0..k).any(|c| min_y[c] <= margin && max_y[c] >= h - margin);
    CrossingFlags {
        left_right,
        top_bottom,
    }
}

/// Mean degree over users that see an opportunity.
pub fn empirical_conditional_degree(
    graph: &SecondaryGraph,
    flags: &OpportunityFlags,
) -> Result<f64> {
    let mut sum = 0usize;
    let mut count = 0usize;
    for (u, &f) in flags.sees_opportunity.iter().enumerate() {
        if f {
            sum += graph.degree(u);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptySample);
    }
    Ok(sum as f64 / count as f64)
}

/// Mean degree over flagged users at least `margin` from every window edge.
///
/// Users closer to the boundary than the link range have truncated
/// neighborhoods; restricting the average to the eroded window removes that
/// bias when comparing against the infinite-network degree.
pub fn interior_conditional_degree(
    graph: &SecondaryGraph,
    flags: &OpportunityFlags,
    realization: &Realization,
    margin: f64,
) -> Result<f64> {
    let w = realization.window.width;
    let h = realization.window.height;
    let mut sum = 0usize;
    let mut count = 0usize;
    for (u, p) in realization.secondary.iter().enumerate() {
        if !flags.sees_opportunity[u] {
            continue;
        }
        if p.x < margin || p.x > w - margin || p.y < margin || p.y > h - margin {
            continue;
        }
        sum += graph.degree(u);
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptySample);
    }
    Ok(sum as f64 / count as f64)
}

/// Per-user flag export for visualization: `user,x_m,y_m,sees_opportunity`.
pub fn write_flags_csv<W: Write>(
    realization: &Realization,
    flags: &OpportunityFlags,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "user,x_m,y_m,sees_opportunity")?;
    for (u, p) in realization.secondary.iter().enumerate() {
        writeln!(out, "{u},{},{},{}", p.x, p.y, flags.sees_opportunity[u])?;
    }
    Ok(())
}
