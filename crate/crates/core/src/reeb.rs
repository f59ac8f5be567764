//! Measured Reeb trees of scalar fields on the annulus.
//!
//! The tree is the contour tree of the piecewise-linear interpolant on the
//! triangulated grid, with the two boundary circles pre-collapsed to root
//! vertices (the quotient is a sphere, so the contour structure is a tree).
//! Ties are broken by simulation of simplicity — the sweep order is
//! (value, vertex index) — so degenerate fields never fail, they just yield
//! some nearby generic tree.
//!
//! Measures are exact for the PL model: each grid triangle maps onto a
//! monotone path in the tree between the images of its extreme vertices,
//! and its area is distributed along that path with the per-triangle
//! fractional-area formula. Percentile and median queries invert the
//! resulting cumulative profiles, so they agree with a brute-force sublevel
//! sweep to rounding error.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::ScalarField;
use crate::util::{bisect_monotone, tri_sublevel_fraction};

pub type NodeId = usize;
pub type ArcId = usize;

#[derive(Clone, Debug, Serialize)]
pub struct ReebNode {
    pub id: NodeId,
    pub value: f64,
}

#[derive(Clone, Debug)]
struct Contrib {
    tri: u32,
    lo: f64,
    hi: f64,
}

#[derive(Clone, Debug)]
enum ArcProfile {
    /// Exact PL cumulative built from triangle fractions.
    Triangles(Vec<Contrib>),
    /// Measure spread uniformly over the value range (synthetic trees).
    Uniform,
}

#[derive(Clone, Debug)]
pub struct ReebArc {
    /// Endpoint earlier in the sweep order.
    pub lo: NodeId,
    /// Endpoint later in the sweep order.
    pub hi: NodeId,
    pub val_lo: f64,
    pub val_hi: f64,
    pub measure: f64,
    profile: ArcProfile,
    /// Child endpoint once the tree is rooted at the top root.
    child: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TreeLocation {
    Node(NodeId),
    Arc { arc: ArcId, value: f64 },
    /// Inside a virtual cap edge of a capped evaluation.
    Cap { top: bool },
}

/// A located tree point with its field value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TreePoint {
    pub location: TreeLocation,
    pub value: f64,
}

/// A missing percentile interval caused by off-stem branches.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapRecord {
    pub h_lo: f64,
    pub h_hi: f64,
    pub measure: f64,
}

#[derive(Clone, Debug, Serialize)]
pub enum PercentileOutcome {
    Found(TreePoint),
    Gap(GapRecord),
}

impl PercentileOutcome {
    pub fn found(&self) -> Option<TreePoint> {
        match self {
            PercentileOutcome::Found(p) => Some(*p),
            PercentileOutcome::Gap(_) => None,
        }
    }

    pub fn gap(&self) -> Option<GapRecord> {
        match self {
            PercentileOutcome::Found(_) => None,
            PercentileOutcome::Gap(g) => Some(*g),
        }
    }
}

/// One branch hanging off the stem.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BranchRecord {
    pub attach_node: NodeId,
    pub attach_h: f64,
    pub attach_value: f64,
    pub measure: f64,
}

/// Stem decomposition: percentile breakpoints, gaps and branches.
#[derive(Clone, Debug, Serialize)]
pub struct StemReport {
    pub stem_nodes: Vec<NodeId>,
    pub stem_arcs: Vec<ArcId>,
    /// Monotone (h, value) breakpoints of the percentile function at stem
    /// arc endpoints.
    pub percentile_breakpoints: Vec<(f64, f64)>,
    pub gaps: Vec<GapRecord>,
    pub branches: Vec<BranchRecord>,
}

#[derive(Clone, Copy, Debug)]
struct TriData {
    values: [f64; 3],
    measure: f64,
}

/// The measured Reeb tree.
#[derive(Clone, Debug)]
pub struct ReebTree {
    nodes: Vec<ReebNode>,
    arcs: Vec<ReebArc>,
    node_arcs: Vec<Vec<ArcId>>,
    bottom_root: NodeId,
    top_root: NodeId,
    total: f64,
    tris: Arc<Vec<TriData>>,
    // rooted at top_root
    tin: Vec<u32>,
    tout: Vec<u32>,
    /// Subtree measure through each arc, child side inclusive.
    arc_subtree: Vec<f64>,
    stem_nodes: Vec<NodeId>,
    stem_arcs: Vec<ArcId>,
}

impl ReebTree {
    pub fn nodes(&self) -> &[ReebNode] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[ReebArc] {
        &self.arcs
    }

    pub fn bottom_root(&self) -> NodeId {
        self.bottom_root
    }

    pub fn top_root(&self) -> NodeId {
        self.top_root
    }

    pub fn total_measure(&self) -> f64 {
        self.total
    }

    pub fn node_value(&self, n: NodeId) -> f64 {
        self.nodes[n].value
    }

    /// Measure of `{field < c}` within one arc's preimage.
    fn arc_cum(&self, arc: &ReebArc, c: f64) -> f64 {
        match &arc.profile {
            ArcProfile::Uniform => {
                if arc.val_hi <= arc.val_lo {
                    if c >= arc.val_lo {
                        arc.measure
                    } else {
                        0.0
                    }
                } else {
                    arc.measure * ((c - arc.val_lo) / (arc.val_hi - arc.val_lo)).clamp(0.0, 1.0)
                }
            }
            ArcProfile::Triangles(contribs) => {
                let mut total = 0.0;
                for k in contribs {
                    let t = &self.tris[k.tri as usize];
                    if k.hi <= k.lo {
                        // flat contribution: whole triangle at one value
                        if c >= k.lo {
                            total += t.measure;
                        }
                    } else {
                        let cc = c.clamp(k.lo, k.hi);
                        total += t.measure
                            * (tri_sublevel_fraction(t.values, cc)
                                - tri_sublevel_fraction(t.values, k.lo));
                    }
                }
                total
            }
        }
    }

    /// Value at which the arc's cumulative measure reaches `target`.
    fn arc_value_at_cum(&self, arc_id: ArcId, target: f64) -> f64 {
        let arc = &self.arcs[arc_id];
        if arc.val_hi <= arc.val_lo {
            return arc.val_lo;
        }
        bisect_monotone(|c| self.arc_cum(arc, c), arc.val_lo, arc.val_hi, target)
    }

    fn is_ancestor(&self, anc: NodeId, desc: NodeId) -> bool {
        self.tin[anc] <= self.tin[desc] && self.tout[desc] <= self.tout[anc]
    }

    /// Far-side measure seen from `node` through incident `arc`, plus cap
    /// measures when the corresponding root lies on the far side.
    fn component_through(&self, node: NodeId, arc_id: ArcId, cap_bottom: f64, cap_top: f64) -> f64 {
        let arc = &self.arcs[arc_id];
        let child = arc.child;
        let (base, far_has_top, far_has_bottom) = if node == child {
            // far side is everything outside the child subtree
            (
                self.total - self.arc_subtree[arc_id],
                true,
                !self.is_ancestor(child, self.bottom_root),
            )
        } else {
            (
                self.arc_subtree[arc_id],
                false,
                self.is_ancestor(child, self.bottom_root),
            )
        };
        base + if far_has_top { cap_top } else { 0.0 }
            + if far_has_bottom { cap_bottom } else { 0.0 }
    }

    /// Median of the tree with optional cap measures glued at the roots:
    /// the unique point whose complementary components all have measure at
    /// most half of the capped total. Located by weighted centroid descent.
    pub fn median_capped(&self, cap_bottom: f64, cap_top: f64) -> TreePoint {
        let total = self.total + cap_bottom + cap_top;
        let half = 0.5 * total;
        if total <= 0.0 {
            return TreePoint {
                location: TreeLocation::Node(self.bottom_root),
                value: self.nodes[self.bottom_root].value,
            };
        }
        let mut cur = self.top_root;
        let mut came_from: Option<ArcId> = None;
        for _ in 0..self.nodes.len() + 2 {
            // heaviest adjacent component
            let mut heavy: Option<(f64, ArcId)> = None;
            for &a in &self.node_arcs[cur] {
                let m = self.component_through(cur, a, cap_bottom, cap_top);
                if heavy.map_or(true, |(hm, _)| m > hm) {
                    heavy = Some((m, a));
                }
            }
            // cap components count at their root
            let cap_here = if cur == self.bottom_root {
                cap_bottom
            } else if cur == self.top_root {
                cap_top
            } else {
                0.0
            };
            let heavy_m = heavy.map_or(0.0, |(m, _)| m);
            if heavy_m <= half && cap_here <= half {
                return TreePoint {
                    location: TreeLocation::Node(cur),
                    value: self.nodes[cur].value,
                };
            }
            if cap_here > half {
                // balance point sits inside the cap edge; the field value
                // there is the root level
                return TreePoint {
                    location: TreeLocation::Cap {
                        top: cur == self.top_root,
                    },
                    value: self.nodes[cur].value,
                };
            }
            let (excess, arc_id) = heavy.expect("positive-measure component");
            debug_assert!(came_from != Some(arc_id), "median descent cycled");
            let arc = &self.arcs[arc_id];
            // consume mu = excess - half entering from this end of the arc
            let mu = excess - half;
            if mu < arc.measure {
                let entered_at_lo = cur == arc.lo;
                let target = if entered_at_lo { mu } else { arc.measure - mu };
                let value = self.arc_value_at_cum(arc_id, target);
                return TreePoint {
                    location: TreeLocation::Arc { arc: arc_id, value },
                    value,
                };
            }
            cur = if arc.lo == cur { arc.hi } else { arc.lo };
            came_from = Some(arc_id);
        }
        unreachable!("median descent did not terminate");
    }

    /// Median of the bare tree.
    pub fn median(&self) -> TreePoint {
        self.median_capped(0.0, 0.0)
    }

    /// Branch measure hanging off a stem node (everything reachable from
    /// `node` without using the stem arcs).
    fn branch_measure_at(
        &self,
        node: NodeId,
        stem_prev: Option<ArcId>,
        stem_next: Option<ArcId>,
    ) -> f64 {
        let mut sum = 0.0;
        for &a in &self.node_arcs[node] {
            if Some(a) == stem_prev || Some(a) == stem_next {
                continue;
            }
            // off-stem arcs always descend away from the roots
            debug_assert_ne!(self.arcs[a].child, node);
            sum += self.arc_subtree[a];
        }
        sum
    }

    /// The h-percentile: the stem point whose bottom-root component has
    /// measure `h * total`, or the covering gap when a branch removes that
    /// interval. Attachment-point ties resolve to the stem node itself.
    pub fn percentile(&self, h: f64) -> Result<PercentileOutcome> {
        if !(0.0..=1.0).contains(&h) || h.is_nan() {
            return Err(Error::PercentileRange { h });
        }
        let target = h * self.total;
        let mut cum = 0.0;
        for (k, &node) in self.stem_nodes.iter().enumerate() {
            let stem_prev = k.checked_sub(1).map(|i| self.stem_arcs[i]);
            let stem_next = self.stem_arcs.get(k).copied();
            if target <= cum {
                return Ok(PercentileOutcome::Found(TreePoint {
                    location: TreeLocation::Node(node),
                    value: self.nodes[node].value,
                }));
            }
            let jump = self.branch_measure_at(node, stem_prev, stem_next);
            if target < cum + jump {
                return Ok(PercentileOutcome::Gap(GapRecord {
                    h_lo: cum / self.total,
                    h_hi: (cum + jump) / self.total,
                    measure: jump,
                }));
            }
            cum += jump;
            let Some(arc_id) = stem_next else { break };
            let arc = &self.arcs[arc_id];
            if target < cum + arc.measure {
                let mu = target - cum;
                let entered_at_lo = node == arc.lo;
                let t = if entered_at_lo { mu } else { arc.measure - mu };
                let value = self.arc_value_at_cum(arc_id, t);
                return Ok(PercentileOutcome::Found(TreePoint {
                    location: TreeLocation::Arc { arc: arc_id, value },
                    value,
                }));
            }
            cum += arc.measure;
        }
        let top = self.top_root;
        Ok(PercentileOutcome::Found(TreePoint {
            location: TreeLocation::Node(top),
            value: self.nodes[top].value,
        }))
    }

    /// Full stem decomposition with gaps and branches.
    pub fn stem_report(&self) -> StemReport {
        let mut gaps = Vec::new();
        let mut branches = Vec::new();
        let mut breakpoints = Vec::new();
        let mut cum = 0.0;
        for (k, &node) in self.stem_nodes.iter().enumerate() {
            let stem_prev = k.checked_sub(1).map(|i| self.stem_arcs[i]);
            let stem_next = self.stem_arcs.get(k).copied();
            let node_value = self.nodes[node].value;
            for &a in &self.node_arcs[node] {
                if Some(a) == stem_prev || Some(a) == stem_next {
                    continue;
                }
                branches.push(BranchRecord {
                    attach_node: node,
                    attach_h: cum / self.total,
                    attach_value: node_value,
                    measure: self.arc_subtree[a],
                });
            }
            let jump = self.branch_measure_at(node, stem_prev, stem_next);
            if jump > 0.0 {
                gaps.push(GapRecord {
                    h_lo: cum / self.total,
                    h_hi: (cum + jump) / self.total,
                    measure: jump,
                });
                cum += jump;
            }
            if let Some(arc_id) = stem_next {
                breakpoints.push((cum / self.total, node_value));
                cum += self.arcs[arc_id].measure;
                let next = self.stem_nodes[k + 1];
                breakpoints.push((cum / self.total, self.nodes[next].value));
            }
        }
        StemReport {
            stem_nodes: self.stem_nodes.clone(),
            stem_arcs: self.stem_arcs.clone(),
            percentile_breakpoints: breakpoints,
            gaps,
            branches,
        }
    }

    /// JSON view: nodes, measured edges, roots, stem and gaps.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct EdgeDto {
            lo: NodeId,
            hi: NodeId,
            measure: f64,
            val_lo: f64,
            val_hi: f64,
        }
        #[derive(Serialize)]
        struct TreeDto<'a> {
            nodes: &'a [ReebNode],
            edges: Vec<EdgeDto>,
            bottom_root: NodeId,
            top_root: NodeId,
            total_measure: f64,
            stem: &'a [NodeId],
            gaps: Vec<GapRecord>,
        }
        let report = self.stem_report();
        let dto = TreeDto {
            nodes: &self.nodes,
            edges: self
                .arcs
                .iter()
                .map(|a| EdgeDto {
                    lo: a.lo,
                    hi: a.hi,
                    measure: a.measure,
                    val_lo: a.val_lo,
                    val_hi: a.val_hi,
                })
                .collect(),
            bottom_root: self.bottom_root,
            top_root: self.top_root,
            total_measure: self.total,
            stem: &self.stem_nodes,
            gaps: report.gaps,
        };
        Ok(serde_json::to_string_pretty(&dto)?)
    }

    /// Graphviz text: one node per critical component, edges labelled with
    /// their measure.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph reeb {\n");
        for n in &self.nodes {
            let role = if n.id == self.bottom_root {
                " (bottom root)"
            } else if n.id == self.top_root {
                " (top root)"
            } else {
                ""
            };
            out.push_str(&format!(
                "  n{} [label=\"{}{}\\nvalue {:.6}\"];\n",
                n.id, n.id, role, n.value
            ));
        }
        for a in &self.arcs {
            out.push_str(&format!(
                "  n{} -- n{} [label=\"{:.6}\"];\n",
                a.lo, a.hi, a.measure
            ));
        }
        out.push_str("}\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Construction from a scalar field
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union_into(&mut self, from: u32, to: u32) {
        let fr = self.find(from);
        let tr = self.find(to);
        if fr != tr {
            self.parent[fr as usize] = tr;
        }
    }
}

/// Grid-vertex bookkeeping for the collapsed complex: interior vertices of
/// rows `1..=n_s-2` plus the two roots.
struct GridComplex<'a> {
    field: &'a ScalarField,
    n_theta: usize,
    n_s: usize,
    n_vertices: usize,
}

const BOTTOM_VERTEX: u32 = 0;

impl<'a> GridComplex<'a> {
    fn new(field: &'a ScalarField) -> Self {
        let (n_theta, n_s) = field.dims();
        Self {
            field,
            n_theta,
            n_s,
            n_vertices: 2 + n_theta * (n_s - 2),
        }
    }

    fn top_vertex(&self) -> u32 {
        (self.n_vertices - 1) as u32
    }

    fn vid(&self, i: usize, j: usize) -> u32 {
        if j == 0 {
            BOTTOM_VERTEX
        } else if j == self.n_s - 1 {
            self.top_vertex()
        } else {
            (1 + (j - 1) * self.n_theta + (i % self.n_theta)) as u32
        }
    }

    fn value(&self, v: u32) -> f64 {
        if v == BOTTOM_VERTEX {
            self.field.sample(0, 0)
        } else if v == self.top_vertex() {
            self.field.sample(0, self.n_s - 1)
        } else {
            let k = (v - 1) as usize;
            let j = 1 + k / self.n_theta;
            let i = k % self.n_theta;
            self.field.sample(i, j)
        }
    }

    fn neighbors(&self, v: u32, out: &mut Vec<u32>) {
        out.clear();
        if v == BOTTOM_VERTEX {
            for i in 0..self.n_theta {
                out.push(self.vid(i, 1));
            }
            return;
        }
        if v == self.top_vertex() {
            for i in 0..self.n_theta {
                out.push(self.vid(i, self.n_s - 2));
            }
            return;
        }
        let k = (v - 1) as usize;
        let j = 1 + k / self.n_theta;
        let i = k % self.n_theta;
        let left = (i + self.n_theta - 1) % self.n_theta;
        let right = (i + 1) % self.n_theta;
        out.push(self.vid(left, j));
        out.push(self.vid(right, j));
        out.push(self.vid(i, j - 1));
        out.push(self.vid(i, j + 1));
        // diagonals of the cell split (i, j) -- (i+1, j+1)
        out.push(self.vid(left, j - 1));
        out.push(self.vid(right, j + 1));
    }
}

/// Build the measured contour tree of a field whose boundary rows are level
/// sets.
pub fn build_reeb_tree(field: &ScalarField) -> Result<ReebTree> {
    for (top, which) in [(false, "bottom"), (true, "top")] {
        let spread = field.boundary_spread(top);
        if spread > 1e-9 * field.oscillation().max(1e-300) {
            return Err(Error::BoundaryNotLevel { which, spread });
        }
    }
    let complex = GridComplex::new(field);
    let n = complex.n_vertices;

    // sweep order: (value, vertex id)
    let mut sorted: Vec<u32> = (0..n as u32).collect();
    sorted.sort_by(|&a, &b| {
        complex
            .value(a)
            .partial_cmp(&complex.value(b))
            .expect("finite values")
            .then(a.cmp(&b))
    });
    let mut order = vec![0u32; n];
    for (rank, &v) in sorted.iter().enumerate() {
        order[v as usize] = rank as u32;
    }

    const NONE: u32 = u32::MAX;
    let mut jt_parent = vec![NONE; n];
    let mut jt_children = vec![0u32; n];
    let mut st_parent = vec![NONE; n];
    let mut st_children = vec![0u32; n];

    // join sweep (ascending): sublevel components merge upwards
    {
        let mut uf = UnionFind::new(n);
        let mut comp_top = vec![NONE; n];
        let mut nbrs = Vec::with_capacity(complex.n_theta);
        let mut touched: Vec<u32> = Vec::with_capacity(8);
        for &v in &sorted {
            complex.neighbors(v, &mut nbrs);
            touched.clear();
            for &u in &nbrs {
                if order[u as usize] < order[v as usize] {
                    let rep = uf.find(u);
                    if !touched.contains(&rep) {
                        touched.push(rep);
                    }
                }
            }
            for &rep in &touched {
                let top = comp_top[rep as usize];
                jt_parent[top as usize] = v;
                jt_children[v as usize] += 1;
                uf.union_into(rep, v);
            }
            comp_top[uf.find(v) as usize] = v;
        }
    }

    // split sweep (descending): superlevel components merge downwards
    {
        let mut uf = UnionFind::new(n);
        let mut comp_bottom = vec![NONE; n];
        let mut nbrs = Vec::with_capacity(complex.n_theta);
        let mut touched: Vec<u32> = Vec::with_capacity(8);
        for &v in sorted.iter().rev() {
            complex.neighbors(v, &mut nbrs);
            touched.clear();
            for &u in &nbrs {
                if order[u as usize] > order[v as usize] {
                    let rep = uf.find(u);
                    if !touched.contains(&rep) {
                        touched.push(rep);
                    }
                }
            }
            for &rep in &touched {
                let bottom = comp_bottom[rep as usize];
                st_parent[bottom as usize] = v;
                st_children[v as usize] += 1;
                uf.union_into(rep, v);
            }
            comp_bottom[uf.find(v) as usize] = v;
        }
    }

    // merge the two trees into the augmented contour tree by peeling leaves
    let mut deleted = vec![false; n];
    let mut aug_edges: Vec<(u32, u32)> = Vec::with_capacity(n - 1);
    fn resolve(parent: &mut [u32], deleted: &[bool], v: u32) -> u32 {
        const NONE: u32 = u32::MAX;
        let mut p = parent[v as usize];
        while p != NONE && deleted[p as usize] {
            p = parent[p as usize];
        }
        parent[v as usize] = p;
        p
    }
    let is_candidate = |jt_children: &[u32], st_children: &[u32], v: u32| {
        (jt_children[v as usize] == 0 && st_children[v as usize] <= 1)
            || (st_children[v as usize] == 0 && jt_children[v as usize] <= 1)
    };
    let mut stack: Vec<u32> = (0..n as u32)
        .filter(|&v| is_candidate(&jt_children, &st_children, v))
        .collect();
    let mut remaining = n;
    while remaining > 1 {
        let Some(v) = stack.pop() else {
            unreachable!("contour-tree merge starved with {remaining} vertices left");
        };
        if deleted[v as usize] || !is_candidate(&jt_children, &st_children, v) {
            continue;
        }
        let lower_leaf = jt_children[v as usize] == 0;
        let w = if lower_leaf {
            resolve(&mut jt_parent, &deleted, v)
        } else {
            resolve(&mut st_parent, &deleted, v)
        };
        if w == NONE {
            // only the final vertex has no partner
            continue;
        }
        aug_edges.push(if lower_leaf { (v, w) } else { (w, v) });
        deleted[v as usize] = true;
        remaining -= 1;
        // remove v from its own tree
        if lower_leaf {
            jt_children[w as usize] -= 1;
        } else {
            st_children[w as usize] -= 1;
        }
        // remove v from the other tree: bypass when regular (the single
        // child takes v's slot), detach when a leaf there as well
        let op = if lower_leaf {
            resolve(&mut st_parent, &deleted, v)
        } else {
            resolve(&mut jt_parent, &deleted, v)
        };
        let other_child_count = if lower_leaf {
            st_children[v as usize]
        } else {
            jt_children[v as usize]
        };
        if other_child_count == 0 && op != NONE {
            if lower_leaf {
                st_children[op as usize] -= 1;
            } else {
                jt_children[op as usize] -= 1;
            }
        }
        for cand in [w, op] {
            if cand != NONE
                && !deleted[cand as usize]
                && is_candidate(&jt_children, &st_children, cand)
            {
                stack.push(cand);
            }
        }
    }
    debug_assert_eq!(aug_edges.len(), n - 1);

    reduce_and_measure(field, &complex, &order, aug_edges)
}

/// Contract degree-2 chains of the augmented tree into measured arcs and
/// attach exact PL measures.
fn reduce_and_measure(
    field: &ScalarField,
    complex: &GridComplex,
    order: &[u32],
    aug_edges: Vec<(u32, u32)>,
) -> Result<ReebTree> {
    let n = complex.n_vertices;
    // adjacency of the augmented tree
    let mut degree = vec![0u32; n];
    for &(a, b) in &aug_edges {
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }
    let mut adj_off = vec![0usize; n + 1];
    for v in 0..n {
        adj_off[v + 1] = adj_off[v] + degree[v] as usize;
    }
    let mut adj = vec![0u32; aug_edges.len() * 2];
    {
        let mut fill = adj_off.clone();
        for &(a, b) in &aug_edges {
            adj[fill[a as usize]] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
    }

    let top_vertex = complex.top_vertex();
    let is_node = |v: u32| degree[v as usize] != 2 || v == BOTTOM_VERTEX || v == top_vertex;

    let mut node_of = vec![u32::MAX; n];
    let mut nodes = Vec::new();
    for v in 0..n as u32 {
        if is_node(v) {
            node_of[v as usize] = nodes.len() as u32;
            nodes.push(ReebNode {
                id: nodes.len(),
                value: complex.value(v),
            });
        }
    }

    // walk chains from each node to build arcs; vertex_pos maps every grid
    // vertex to its node or containing arc
    #[derive(Clone, Copy)]
    enum Pos {
        Node(u32),
        Arc(u32),
    }
    let mut vertex_pos = vec![Pos::Node(u32::MAX); n];
    for v in 0..n as u32 {
        if is_node(v) {
            vertex_pos[v as usize] = Pos::Node(node_of[v as usize]);
        }
    }
    let mut arcs: Vec<ReebArc> = Vec::new();
    let mut chain_seen: HashMap<(u32, u32), ()> = HashMap::new();
    for v in 0..n as u32 {
        if !is_node(v) {
            continue;
        }
        for idx in adj_off[v as usize]..adj_off[v as usize + 1] {
            let first = adj[idx];
            if chain_seen.contains_key(&(v, first)) {
                continue;
            }
            let mut prev = v;
            let mut cur = first;
            while !is_node(cur) {
                vertex_pos[cur as usize] = Pos::Arc(arcs.len() as u32);
                let a0 = adj[adj_off[cur as usize]];
                let a1 = adj[adj_off[cur as usize] + 1];
                let next = if a0 == prev { a1 } else { a0 };
                prev = cur;
                cur = next;
            }
            chain_seen.insert((v, first), ());
            chain_seen.insert((cur, prev), ());
            let (lo_v, hi_v) = if order[v as usize] < order[cur as usize] {
                (v, cur)
            } else {
                (cur, v)
            };
            arcs.push(ReebArc {
                lo: node_of[lo_v as usize] as usize,
                hi: node_of[hi_v as usize] as usize,
                val_lo: complex.value(lo_v),
                val_hi: complex.value(hi_v),
                measure: 0.0,
                profile: ArcProfile::Triangles(Vec::new()),
                child: usize::MAX,
            });
        }
    }

    // root the reduced tree at the top root and prepare path queries
    let bottom_root = node_of[BOTTOM_VERTEX as usize] as usize;
    let top_root = node_of[top_vertex as usize] as usize;
    let skeleton = TreeSkeleton::build(nodes.len(), &arcs, top_root);

    // distribute triangle areas along tree paths
    let (n_theta, n_s) = field.dims();
    let tri_measure = 0.5
        * field.chart().area_scale
        * (field.chart().circumference / n_theta as f64)
        * ((field.chart().s_max - field.chart().s_min) / (n_s - 1) as f64);
    let mut tris = Vec::with_capacity(n_theta * (n_s - 1) * 2);
    let mut path_buf = Vec::new();
    for i in 0..n_theta {
        for j in 0..n_s - 1 {
            let corners = [
                complex.vid(i, j),
                complex.vid(i + 1, j),
                complex.vid(i + 1, j + 1),
                complex.vid(i, j + 1),
            ];
            for tri_corner in [
                [corners[0], corners[1], corners[2]],
                [corners[0], corners[2], corners[3]],
            ] {
                let values = [
                    complex.value(tri_corner[0]),
                    complex.value(tri_corner[1]),
                    complex.value(tri_corner[2]),
                ];
                let tri_id = tris.len() as u32;
                tris.push(TriData {
                    values,
                    measure: tri_measure,
                });
                let mut vmin = tri_corner[0];
                let mut vmax = tri_corner[0];
                for &c in &tri_corner[1..] {
                    if order[c as usize] < order[vmin as usize] {
                        vmin = c;
                    }
                    if order[c as usize] > order[vmax as usize] {
                        vmax = c;
                    }
                }
                let pos_of = |v: u32| match vertex_pos[v as usize] {
                    Pos::Node(nid) => PathEnd::Node(nid as usize),
                    Pos::Arc(aid) => PathEnd::Arc(aid as usize),
                };
                skeleton.path_arcs(pos_of(vmin), pos_of(vmax), &arcs, &mut path_buf);
                let f_min = complex.value(vmin);
                let f_max = complex.value(vmax);
                if f_max <= f_min {
                    // flat triangle: full measure as an atom on any path arc
                    let arc_id = path_buf[0];
                    if let ArcProfile::Triangles(c) = &mut arcs[arc_id].profile {
                        c.push(Contrib {
                            tri: tri_id,
                            lo: f_min,
                            hi: f_min,
                        });
                    }
                } else {
                    for &arc_id in &path_buf {
                        let (a_lo, a_hi) = (arcs[arc_id].val_lo, arcs[arc_id].val_hi);
                        let clip_lo = a_lo.max(f_min);
                        let clip_hi = a_hi.min(f_max);
                        if clip_hi > clip_lo {
                            if let ArcProfile::Triangles(c) = &mut arcs[arc_id].profile {
                                c.push(Contrib {
                                    tri: tri_id,
                                    lo: clip_lo,
                                    hi: clip_hi,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    // arc measures from their contributions
    for arc in &mut arcs {
        let ArcProfile::Triangles(contribs) = &arc.profile else {
            unreachable!()
        };
        let mut m = 0.0;
        for k in contribs {
            let t = &tris[k.tri as usize];
            if k.hi <= k.lo {
                m += t.measure;
            } else {
                m += t.measure
                    * (tri_sublevel_fraction(t.values, k.hi)
                        - tri_sublevel_fraction(t.values, k.lo));
            }
        }
        arc.measure = m;
    }

    skeleton.assemble(nodes, arcs, bottom_root, top_root, Arc::new(tris))
}

/// Path endpoint inside the reduced tree.
#[derive(Clone, Copy, Debug)]
enum PathEnd {
    Node(NodeId),
    Arc(ArcId),
}

/// Rooted-tree machinery shared by built and synthetic trees.
struct TreeSkeleton {
    node_arcs: Vec<Vec<ArcId>>,
    parent_node: Vec<Option<NodeId>>,
    parent_arc: Vec<Option<ArcId>>,
    depth: Vec<u32>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    root: NodeId,
}

impl TreeSkeleton {
    fn build(n_nodes: usize, arcs: &[ReebArc], root: NodeId) -> Self {
        let mut node_arcs = vec![Vec::new(); n_nodes];
        for (id, a) in arcs.iter().enumerate() {
            node_arcs[a.lo].push(id);
            node_arcs[a.hi].push(id);
        }
        let mut parent_node = vec![None; n_nodes];
        let mut parent_arc = vec![None; n_nodes];
        let mut depth = vec![0u32; n_nodes];
        let mut tin = vec![0u32; n_nodes];
        let mut tout = vec![0u32; n_nodes];
        let mut timer = 0u32;
        let mut stack: Vec<(NodeId, bool)> = vec![(root, false)];
        let mut seen = vec![false; n_nodes];
        while let Some((node, post)) = stack.pop() {
            if post {
                tout[node] = timer;
                timer += 1;
                continue;
            }
            if seen[node] {
                continue;
            }
            seen[node] = true;
            tin[node] = timer;
            timer += 1;
            stack.push((node, true));
            for &a in &node_arcs[node] {
                let other = if arcs[a].lo == node {
                    arcs[a].hi
                } else {
                    arcs[a].lo
                };
                if !seen[other] {
                    parent_node[other] = Some(node);
                    parent_arc[other] = Some(a);
                    depth[other] = depth[node] + 1;
                    stack.push((other, false));
                }
            }
        }
        Self {
            node_arcs,
            parent_node,
            parent_arc,
            depth,
            tin,
            tout,
            root,
        }
    }

    fn is_ancestor(&self, anc: NodeId, desc: NodeId) -> bool {
        self.tin[anc] <= self.tin[desc] && self.tout[desc] <= self.tout[anc]
    }

    fn child_of_arc(&self, arc_id: ArcId, arc: &ReebArc) -> NodeId {
        if self.parent_arc[arc.lo] == Some(arc_id) {
            arc.lo
        } else {
            debug_assert_eq!(self.parent_arc[arc.hi], Some(arc_id));
            arc.hi
        }
    }

    /// Arcs of the unique node-to-node tree path (as a set; order unused).
    fn node_path(&self, mut x: NodeId, mut y: NodeId, out: &mut Vec<ArcId>) {
        while self.depth[x] > self.depth[y] {
            out.push(self.parent_arc[x].unwrap());
            x = self.parent_node[x].unwrap();
        }
        while self.depth[y] > self.depth[x] {
            out.push(self.parent_arc[y].unwrap());
            y = self.parent_node[y].unwrap();
        }
        while x != y {
            out.push(self.parent_arc[x].unwrap());
            out.push(self.parent_arc[y].unwrap());
            x = self.parent_node[x].unwrap();
            y = self.parent_node[y].unwrap();
        }
    }

    /// The endpoint of `arc` facing `target`.
    fn end_toward(&self, arc_id: ArcId, arc: &ReebArc, target: NodeId) -> NodeId {
        let child = self.child_of_arc(arc_id, arc);
        if self.is_ancestor(child, target) {
            child
        } else {
            self.parent_node[child].unwrap()
        }
    }

    /// Arcs of the unique tree path between two positions, inclusive of the
    /// end arcs.
    fn path_arcs(&self, from: PathEnd, to: PathEnd, arcs: &[ReebArc], out: &mut Vec<ArcId>) {
        out.clear();
        match (from, to) {
            (PathEnd::Node(a), PathEnd::Node(b)) => self.node_path(a, b, out),
            (PathEnd::Node(n), PathEnd::Arc(b)) | (PathEnd::Arc(b), PathEnd::Node(n)) => {
                out.push(b);
                let nb = self.end_toward(b, &arcs[b], n);
                self.node_path(n, nb, out);
            }
            (PathEnd::Arc(a), PathEnd::Arc(b)) => {
                out.push(a);
                if a == b {
                    return;
                }
                out.push(b);
                let ca = self.child_of_arc(a, &arcs[a]);
                let cb = self.child_of_arc(b, &arcs[b]);
                let na = if self.is_ancestor(ca, cb) {
                    ca
                } else {
                    self.parent_node[ca].unwrap()
                };
                let nb = if self.is_ancestor(cb, ca) {
                    cb
                } else {
                    self.parent_node[cb].unwrap()
                };
                self.node_path(na, nb, out);
            }
        }
    }

    /// Assemble the final tree: subtree measures and the stem.
    fn assemble(
        mut self,
        nodes: Vec<ReebNode>,
        mut arcs: Vec<ReebArc>,
        bottom_root: NodeId,
        top_root: NodeId,
        tris: Arc<Vec<TriData>>,
    ) -> Result<ReebTree> {
        debug_assert_eq!(self.root, top_root);
        for id in 0..arcs.len() {
            arcs[id].child = self.child_of_arc(id, &arcs[id]);
        }
        // subtree measures by processing nodes in decreasing depth
        let mut by_depth: Vec<NodeId> = (0..nodes.len()).collect();
        by_depth.sort_by_key(|&n| std::cmp::Reverse(self.depth[n]));
        let mut arc_subtree = vec![0.0; arcs.len()];
        let mut node_subtree = vec![0.0; nodes.len()];
        for &n in &by_depth {
            if let Some(pa) = self.parent_arc[n] {
                arc_subtree[pa] = node_subtree[n] + arcs[pa].measure;
                let p = self.parent_node[n].unwrap();
                node_subtree[p] += arc_subtree[pa];
            }
        }
        let total: f64 = arcs.iter().map(|a| a.measure).sum();
        // stem: ancestor chain of the bottom root
        let mut stem_nodes = vec![bottom_root];
        let mut stem_arcs = Vec::new();
        let mut cur = bottom_root;
        while cur != top_root {
            let pa = self.parent_arc[cur].expect("roots are connected");
            stem_arcs.push(pa);
            cur = self.parent_node[cur].unwrap();
            stem_nodes.push(cur);
        }
        Ok(ReebTree {
            nodes,
            arcs,
            node_arcs: std::mem::take(&mut self.node_arcs),
            bottom_root,
            top_root,
            total,
            tris,
            tin: self.tin,
            tout: self.tout,
            arc_subtree,
            stem_nodes,
            stem_arcs,
        })
    }
}

// ---------------------------------------------------------------------------
// Synthetic trees
// ---------------------------------------------------------------------------

/// One synthetic branch: the bottom-component measure at its attachment
/// (counting earlier branches) and the branch measure.
#[derive(Clone, Copy, Debug)]
pub struct SyntheticBranch {
    pub attach_below: f64,
    pub measure: f64,
}

impl ReebTree {
    /// A synthetic interval tree of the given total measure with uniform
    /// in-value stem density and the listed branches. Stem values run over
    /// `[0, 1]`; branch leaves sit 0.25 above their attachment value.
    pub fn synthetic(total: f64, branches: &[SyntheticBranch]) -> Result<ReebTree> {
        let branch_total: f64 = branches.iter().map(|b| b.measure).sum();
        let stem_measure = total - branch_total;
        if stem_measure <= 0.0 {
            return Err(Error::InvalidConfig(
                "synthetic tree: branches exceed the total measure".into(),
            ));
        }
        let mut attach_stem = Vec::new();
        let mut consumed = 0.0;
        let mut prev = 0.0;
        for b in branches {
            let on_stem = b.attach_below - consumed;
            if on_stem < prev || on_stem > stem_measure {
                return Err(Error::InvalidConfig(
                    "synthetic tree: branch attachments out of order".into(),
                ));
            }
            attach_stem.push(on_stem);
            consumed += b.measure;
            prev = on_stem;
        }
        let mut nodes = vec![ReebNode { id: 0, value: 0.0 }];
        let mut arcs = Vec::new();
        let mut last_node = 0usize;
        let mut last_stem = 0.0;
        let value_at = |m: f64| m / stem_measure;
        for (k, &at) in attach_stem.iter().enumerate() {
            if at > last_stem {
                let nid = nodes.len();
                nodes.push(ReebNode {
                    id: nid,
                    value: value_at(at),
                });
                arcs.push(ReebArc {
                    lo: last_node,
                    hi: nid,
                    val_lo: value_at(last_stem),
                    val_hi: value_at(at),
                    measure: at - last_stem,
                    profile: ArcProfile::Uniform,
                    child: usize::MAX,
                });
                last_node = nid;
                last_stem = at;
            }
            let leaf = nodes.len();
            nodes.push(ReebNode {
                id: leaf,
                value: value_at(at) + 0.25,
            });
            arcs.push(ReebArc {
                lo: last_node,
                hi: leaf,
                val_lo: value_at(at),
                val_hi: value_at(at) + 0.25,
                measure: branches[k].measure,
                profile: ArcProfile::Uniform,
                child: usize::MAX,
            });
        }
        let top = nodes.len();
        nodes.push(ReebNode {
            id: top,
            value: 1.0,
        });
        arcs.push(ReebArc {
            lo: last_node,
            hi: top,
            val_lo: value_at(last_stem),
            val_hi: 1.0,
            measure: stem_measure - last_stem,
            profile: ArcProfile::Uniform,
            child: usize::MAX,
        });
        let skeleton = TreeSkeleton::build(nodes.len(), &arcs, top);
        skeleton.assemble(nodes, arcs, 0, top, Arc::new(Vec::new()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields;
    use crate::surface::AnnulusChart;
    use crate::ScalarField;

    fn unit_height(n: usize) -> ScalarField {
        fields::linear_height(AnnulusChart::unit_area(), n, n).unwrap()
    }

    #[test]
    fn height_tree_is_a_single_edge() {
        let tree = build_reeb_tree(&unit_height(128)).unwrap();
        assert_eq!(tree.nodes().len(), 2);
        assert_eq!(tree.arcs().len(), 1);
        assert!((tree.total_measure() - 1.0).abs() < 1e-9);
        assert_eq!(tree.node_value(tree.bottom_root()), 0.0);
        assert_eq!(tree.node_value(tree.top_root()), 1.0);
    }

    #[test]
    fn constant_field_collapses_to_interval() {
        let f = ScalarField::from_fn(AnnulusChart::unit_area(), 64, 64, |_, _| 0.0).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        assert!((tree.total_measure() - 1.0).abs() < 1e-9);
        // a degenerate field still yields a tree whose stem spans all measure
        let p = tree.percentile(0.5).unwrap();
        let point = p.found().expect("percentile exists");
        assert_eq!(point.value, 0.0);
    }

    #[test]
    fn non_level_boundary_rejected() {
        let f = ScalarField::from_fn(AnnulusChart::unit_area(), 64, 64, |t, s| {
            s + 0.1 * t.sin()
        })
        .unwrap();
        assert!(matches!(
            build_reeb_tree(&f),
            Err(Error::BoundaryNotLevel { .. })
        ));
    }

    #[test]
    fn measures_sum_to_total_area() {
        let f = fields::plateau_bump(256, 256).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        let total = f.chart().total_area();
        assert!(
            (tree.total_measure() - total).abs() < 0.005 * total,
            "tree total {} vs chart {}",
            tree.total_measure(),
            total
        );
    }

    #[test]
    fn terraced_bump_has_single_branch_of_right_measure() {
        let f = fields::terraced_bump(384, 384, 0.3).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        let report = tree.stem_report();
        let branch_total: f64 = report.branches.iter().map(|b| b.measure).sum();
        assert!(
            (branch_total - 0.3).abs() < 0.01,
            "branch measure {branch_total}"
        );
        // cross-check against the sublevel oracle: everything above the
        // terrace level minus the upper stem band belongs to the branch
        let oracle =
            f.chart().total_area() - f.sublevel_area(fields::TERRACE_LEVEL + 1e-9) - 0.12;
        assert!((branch_total - oracle).abs() < 0.005, "oracle {oracle}");
    }

    #[test]
    fn median_of_height_is_middle() {
        let tree = build_reeb_tree(&unit_height(256)).unwrap();
        let m = tree.median();
        assert!((m.value - 0.5).abs() < 1e-6, "median value {}", m.value);
    }

    #[test]
    fn median_of_quadratic_density() {
        // field sqrt(s): sublevel measure of value c is c^2, so the median
        // sits at 1/sqrt(2)
        let f =
            ScalarField::from_fn(AnnulusChart::unit_area(), 256, 256, |_, s| s.sqrt()).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        let m = tree.median();
        assert!(
            (m.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3,
            "median value {}",
            m.value
        );
    }

    #[test]
    fn median_of_tripod_is_center() {
        let tree = ReebTree::synthetic(
            1.0,
            &[SyntheticBranch {
                attach_below: 0.4,
                measure: 0.2,
            }],
        )
        .unwrap();
        let m = tree.median();
        match m.location {
            TreeLocation::Node(n) => {
                assert!((tree.node_value(n) - 0.5).abs() < 1e-12, "attach value");
            }
            other => panic!("median should be the attachment node, got {other:?}"),
        }
    }

    #[test]
    fn percentile_of_height_matches_h() {
        let tree = build_reeb_tree(&unit_height(256)).unwrap();
        let p = tree.percentile(0.37).unwrap();
        let point = p.found().expect("no gaps on the height field");
        assert!((point.value - 0.37).abs() < 1e-9, "value {}", point.value);
    }

    #[test]
    fn half_percentile_is_median_when_gap_free() {
        let f =
            ScalarField::from_fn(AnnulusChart::unit_area(), 256, 256, |_, s| s.sqrt()).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        let p = tree.percentile(0.5).unwrap().found().unwrap().value;
        let m = tree.median().value;
        assert!((p - m).abs() < 1e-9);
    }

    #[test]
    fn percentile_rejects_out_of_range() {
        let tree = build_reeb_tree(&unit_height(64)).unwrap();
        assert!(matches!(
            tree.percentile(1.5),
            Err(Error::PercentileRange { .. })
        ));
    }

    #[test]
    fn synthetic_branch_creates_gap() {
        let tree = ReebTree::synthetic(
            1.0,
            &[SyntheticBranch {
                attach_below: 0.2,
                measure: 0.6,
            }],
        )
        .unwrap();
        for h in [0.25, 0.5, 0.75] {
            let out = tree.percentile(h).unwrap();
            let gap = out.gap().expect("percentile absent inside the gap");
            assert!((gap.h_lo - 0.2).abs() < 1e-12);
            assert!((gap.h_hi - 0.8).abs() < 1e-12);
            assert!((gap.measure - 0.6).abs() < 1e-12);
        }
        // attachment point itself resolves to the stem node
        let at = tree.percentile(0.2).unwrap();
        assert!(at.found().is_some());
        for h in [0.1, 0.9] {
            assert!(tree.percentile(h).unwrap().found().is_some());
        }
    }

    #[test]
    fn stem_report_of_height_is_clean() {
        let tree = build_reeb_tree(&unit_height(128)).unwrap();
        let report = tree.stem_report();
        assert!(report.gaps.is_empty());
        assert!(report.branches.is_empty());
        assert_eq!(report.stem_arcs.len(), 1);
    }

    #[test]
    fn stem_report_two_branches() {
        let tree = ReebTree::synthetic(
            1.0,
            &[
                SyntheticBranch {
                    attach_below: 0.2,
                    measure: 0.1,
                },
                SyntheticBranch {
                    attach_below: 0.5,
                    measure: 0.2,
                },
            ],
        )
        .unwrap();
        let report = tree.stem_report();
        assert_eq!(report.gaps.len(), 2);
        assert!((report.gaps[0].h_lo - 0.2).abs() < 1e-12);
        assert!((report.gaps[0].h_hi - 0.3).abs() < 1e-12);
        assert!((report.gaps[1].h_lo - 0.5).abs() < 1e-12);
        assert!((report.gaps[1].h_hi - 0.7).abs() < 1e-12);
        // an existing percentile separates the two gaps
        assert!(tree.percentile(0.4).unwrap().found().is_some());
        // gap-branch duality
        let gap_total: f64 = report.gaps.iter().map(|g| g.h_hi - g.h_lo).sum();
        assert!((gap_total - 0.3).abs() < 1e-12);
    }

    #[test]
    fn plateau_bump_tree_structure() {
        // stem carries the zero set (measure 0.1); the bump hangs off it as
        // one branch of measure 0.9, so percentiles vanish on a length-0.9
        // interval
        let f = fields::plateau_bump(384, 384).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        let report = tree.stem_report();
        let branch_total: f64 = report.branches.iter().map(|b| b.measure).sum();
        assert!(
            (branch_total - fields::SUPPORT_MEASURE).abs() < 0.01,
            "branch total {branch_total}"
        );
        let gap_total: f64 = report.gaps.iter().map(|g| g.h_hi - g.h_lo).sum();
        assert!((gap_total - 0.9).abs() < 0.01, "gap total {gap_total}");
        // stem values all sit at the zero level
        for &(_, v) in &report.percentile_breakpoints {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn percentile_values_match_sublevel_oracle() {
        // stem-only field: the percentile value must solve
        // sublevel_area(c) = h * total to machine precision
        let f = ScalarField::from_fn(AnnulusChart::unit_area(), 256, 256, |t, s| {
            s + 0.2 * s * (1.0 - s) * (3.0 * t).cos()
        })
        .unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        for h in [0.1, 0.33, 0.5, 0.72, 0.9] {
            let p = tree.percentile(h).unwrap().found().expect("stem only");
            let achieved = f.sublevel_area(p.value);
            assert!(
                (achieved - h).abs() < 1e-9,
                "h {h}: cumulative {achieved} at value {}",
                p.value
            );
        }
    }

    #[test]
    fn percentile_monotone_in_h() {
        let f = fields::terraced_bump(256, 256, 0.25).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=40 {
            let h = k as f64 / 40.0;
            if let PercentileOutcome::Found(p) = tree.percentile(h).unwrap() {
                assert!(
                    p.value >= prev - 1e-9,
                    "percentile value decreased at h = {h}"
                );
                prev = p.value;
            }
        }
    }

    #[test]
    fn percentile_stable_under_sup_perturbation() {
        let eps = 0.01;
        let f = ScalarField::from_fn(AnnulusChart::unit_area(), 256, 256, |_, s| s).unwrap();
        let g = ScalarField::from_fn(AnnulusChart::unit_area(), 256, 256, |t, s| {
            s + eps * (s * (1.0 - s) * 4.0) * (2.0 * t).sin()
        })
        .unwrap();
        let tf = build_reeb_tree(&f).unwrap();
        let tg = build_reeb_tree(&g).unwrap();
        for h in [0.2, 0.5, 0.8] {
            let a = tf.percentile(h).unwrap().found().unwrap().value;
            let b = tg.percentile(h).unwrap().found().unwrap().value;
            assert!(
                (a - b).abs() <= eps + 1e-6,
                "h {h}: moved {}",
                (a - b).abs()
            );
        }
    }

    #[test]
    fn capped_median_sits_at_base_percentile() {
        // caps (1, 2h) move the median of the capped tree to the base
        // tree's h-percentile
        let f = fields::compact_height(256, 256).unwrap();
        let tree = build_reeb_tree(&f).unwrap();
        for h in [0.11, 0.4, 0.77] {
            let med = tree.median_capped(1.0, 2.0 * h);
            let base = tree.percentile(h).unwrap().found().unwrap();
            assert!(
                (med.value - base.value).abs() < 1e-9,
                "h {h}: capped median {} vs percentile {}",
                med.value,
                base.value
            );
        }
    }

    #[test]
    fn json_and_dot_render() {
        let tree = build_reeb_tree(&unit_height(64)).unwrap();
        let json = tree.to_json().unwrap();
        assert!(json.contains("bottom_root"));
        let dot = tree.to_dot();
        assert!(dot.starts_with("graph reeb {"));
        assert!(dot.contains("--"));
    }
}
