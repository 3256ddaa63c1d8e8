//! Split networks built from circular split systems, their verification,
//! and DOT / SVG rendering.
//!
//! Construction starts from the star on taxa `0..=n` and inserts the
//! non-trivial splits one at a time. For a split with side `A = [lo, hi]`
//! the vertices that may be duplicated are those in the intersection of
//! the convex hulls of `A` and of its complement. Inside that region a
//! shortest path is taken between the two places where the new band meets
//! the outer boundary: the gap between leaves `lo-1` and `lo`, and the gap
//! between `hi` and `hi+1` (cyclically, with `0` following `n`). Among the
//! shortest such paths the one running closest to the leaves of `A` is used,
//! so different insertion orders can give different graphs. The path's
//! vertices are copied; edges towards `A` stay, edges towards the other
//! side move to the copies, and each vertex is joined to its copy by an edge
//! labelled with the new split. If removing the path leaves a component
//! holding leaves of both sides, the whole hull intersection is copied.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use num_traits::Zero;
use thiserror::Error;

use crate::metric::{Check, WeightVector};
use crate::rational::{self, Rational};
use crate::split::{polygon_diagonals, Split, SplitSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("order lists {0}, which is not a non-trivial split of the system")]
    NotInSystem(Split),
    #[error("order lists {0} twice")]
    Repeated(Split),
    #[error("order omits {0}")]
    Missing(Split),
}

/// Label of an edge class: one split of the system, or the pendant edge of
/// the root, whose trivial split is not part of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    RootPendant,
    Split(Split),
}

impl EdgeLabel {
    /// Taxa on the side away from the rest of the tree for the root
    /// pendant, and on the root-free side for a split.
    fn inside(&self, taxon: usize) -> bool {
        match self {
            EdgeLabel::RootPendant => taxon == 0,
            EdgeLabel::Split(s) => s.contains(taxon),
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::RootPendant => f.write_str("root"),
            EdgeLabel::Split(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: EdgeLabel,
}

/// Graph on vertices `0..vertex_count` whose edges carry split labels;
/// `leaf(t)` is the vertex of taxon `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitNetwork {
    n: usize,
    vertex_count: usize,
    edges: Vec<Edge>,
    leaves: Vec<usize>,
}

impl SplitNetwork {
    /// Hub `0`, taxon `t` at vertex `t + 1`.
    pub fn star(n: usize) -> Self {
        let mut edges = vec![Edge { u: 0, v: 1, label: EdgeLabel::RootPendant }];
        edges.extend((1..=n).map(|t| Edge { u: 0, v: t + 1, label: EdgeLabel::Split(Split::trivial(t)) }));
        SplitNetwork { n, vertex_count: n + 2, edges, leaves: (0..=n).map(|t| t + 1).collect() }
    }

    /// Raw constructor; nothing is checked, see [`verify_split_graph`].
    pub fn from_parts(n: usize, vertex_count: usize, edges: Vec<Edge>, leaves: Vec<usize>) -> Self {
        SplitNetwork { n, vertex_count, edges, leaves }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn leaf(&self, taxon: usize) -> usize {
        self.leaves[taxon]
    }

    /// Edge indices grouped by label.
    pub fn edge_classes(&self) -> BTreeMap<EdgeLabel, Vec<usize>> {
        let mut classes: BTreeMap<EdgeLabel, Vec<usize>> = BTreeMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            classes.entry(e.label).or_default().push(k);
        }
        classes
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count && self.components(|_| true).1 == 1
    }

    fn adjacency(&self, keep: impl Fn(&Edge) -> bool) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (k, e) in self.edges.iter().enumerate() {
            if keep(e) {
                adj[e.u].push((e.v, k));
                adj[e.v].push((e.u, k));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Component id of every vertex using only the kept edges, and the count.
    fn components(&self, keep: impl Fn(&Edge) -> bool) -> (Vec<usize>, usize) {
        let adj = self.adjacency(keep);
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        queue.push_back(y);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// For every edge class, whether each vertex lies on the class's inside.
    fn sides(&self) -> BTreeMap<EdgeLabel, Vec<bool>> {
        self.edge_classes()
            .keys()
            .map(|&label| {
                let (comp, _) = self.components(|e| e.label != label);
                let anchor = (0..=self.n).find(|&t| label.inside(t)).expect("inside is nonempty");
                let inside = comp[self.leaves[anchor]];
                (label, comp.iter().map(|&c| c == inside).collect())
            })
            .collect()
    }

    fn bfs_distances(&self, from: usize, allowed: &[bool]) -> Vec<Option<usize>> {
        let adj = self.adjacency(|_| true);
        let mut dist = vec![None; self.vertex_count];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].expect("queued vertices have a distance");
            for &(y, _) in &adj[x] {
                if allowed[y] && dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    fn insert_split(&mut self, s: Split) {
        let n = self.n;
        let in_a = |t: usize| s.contains(t);
        let sides = self.sides();
        let hull = |side_a: bool| -> Vec<bool> {
            let taxa: Vec<usize> = (0..=n).filter(|&t| in_a(t) == side_a).collect();
            (0..self.vertex_count)
                .map(|v| {
                    sides.iter().all(|(label, inside)| {
                        let all_in = taxa.iter().all(|&t| label.inside(t));
                        let all_out = taxa.iter().all(|&t| !label.inside(t));
                        (!all_in || inside[v]) && (!all_out || !inside[v])
                    })
                })
                .collect()
        };
        let hull_a = hull(true);
        let hull_b = hull(false);
        let both: Vec<bool> = hull_a.iter().zip(&hull_b).map(|(a, b)| *a && *b).collect();
        assert!(both.iter().any(|&b| b), "hull intersection of a split is never empty");

        let everywhere = vec![true; self.vertex_count];
        let gap_vertex = |a: usize, b: usize| -> usize {
            let da = self.bfs_distances(self.leaves[a], &everywhere);
            let db = self.bfs_distances(self.leaves[b], &everywhere);
            (0..self.vertex_count)
                .filter(|&v| both[v])
                .min_by_key(|&v| (da[v].unwrap_or(usize::MAX) + db[v].unwrap_or(usize::MAX), v))
                .expect("intersection is nonempty")
        };
        let x = gap_vertex(s.lo() - 1, s.lo());
        let y = gap_vertex(s.hi(), (s.hi() + 1) % (n + 1));
        let path = self.hugging_path(x, y, &both, &in_a);

        let mut dup = vec![false; self.vertex_count];
        for &v in &path {
            dup[v] = true;
        }
        let toward_a = match self.classify(&dup, &in_a) {
            Some(toward_a) => toward_a,
            None => {
                dup = both;
                hull_a.clone()
            }
        };
        self.duplicate(&dup, &toward_a, s);
    }

    /// Shortest path from `x` to `y` inside `allowed` that stays closest to
    /// the leaves of side `A`: minimal total distance to `A`, then smallest
    /// vertex at each step.
    fn hugging_path(&self, x: usize, y: usize, allowed: &[bool], in_a: &dyn Fn(usize) -> bool) -> Vec<usize> {
        let adj = self.adjacency(|_| true);
        let dist = self.bfs_distances(y, allowed);
        let near_a = self.distance_to_side(in_a);
        let mut order: Vec<usize> = (0..self.vertex_count).filter(|&v| dist[v].is_some()).collect();
        order.sort_by_key(|&v| dist[v]);
        let mut cost = vec![usize::MAX; self.vertex_count];
        for &v in &order {
            let d = dist[v].expect("filtered on reachability");
            cost[v] = if d == 0 {
                near_a[v]
            } else {
                near_a[v]
                    + adj[v]
                        .iter()
                        .filter(|&&(w, _)| dist[w] == Some(d - 1))
                        .map(|&(w, _)| cost[w])
                        .min()
                        .expect("a BFS predecessor exists")
            };
        }
        let mut path = vec![x];
        let mut at = x;
        while at != y {
            let d = dist[at].expect("hull intersections are connected");
            at = adj[at]
                .iter()
                .map(|&(w, _)| w)
                .filter(|&w| dist[w] == Some(d - 1))
                .min_by_key(|&w| (cost[w], w))
                .expect("a BFS predecessor exists");
            path.push(at);
        }
        path
    }

    /// Unweighted distance from every vertex to the nearest leaf of side `A`.
    fn distance_to_side(&self, in_a: &dyn Fn(usize) -> bool) -> Vec<usize> {
        let adj = self.adjacency(|_| true);
        let mut dist = vec![usize::MAX; self.vertex_count];
        let mut queue = VecDeque::new();
        for t in (0..=self.n).filter(|&t| in_a(t)) {
            dist[self.leaves[t]] = 0;
            queue.push_back(self.leaves[t]);
        }
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// For each vertex outside `dup`, whether its component in the graph
    /// without `dup` holds only `A` leaves (or none); `None` if some
    /// component mixes both sides.
    fn classify(&self, dup: &[bool], in_a: &dyn Fn(usize) -> bool) -> Option<Vec<bool>> {
        let (comp, count) = self.components(|e| !dup[e.u] && !dup[e.v]);
        let mut has_a = vec![false; count];
        let mut has_b = vec![false; count];
        for t in 0..=self.n {
            let c = comp[self.leaves[t]];
            if in_a(t) {
                has_a[c] = true;
            } else {
                has_b[c] = true;
            }
        }
        if (0..count).any(|c| has_a[c] && has_b[c]) {
            return None;
        }
        Some(comp.iter().map(|&c| !has_b[c]).collect())
    }

    fn duplicate(&mut self, dup: &[bool], toward_a: &[bool], s: Split) {
        let mut copy = vec![usize::MAX; self.vertex_count];
        for v in 0..self.vertex_count {
            if dup[v] {
                copy[v] = self.vertex_count;
                self.vertex_count += 1;
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len() * 2);
        for e in &self.edges {
            match (dup[e.u], dup[e.v]) {
                (true, true) => {
                    edges.push(*e);
                    edges.push(Edge { u: copy[e.u], v: copy[e.v], label: e.label });
                }
                (true, false) if !toward_a[e.v] => edges.push(Edge { u: copy[e.u], ..*e }),
                (false, true) if !toward_a[e.u] => edges.push(Edge { v: copy[e.v], ..*e }),
                _ => edges.push(*e),
            }
        }
        for v in 0..copy.len() {
            if dup[v] {
                edges.push(Edge { u: v, v: copy[v], label: EdgeLabel::Split(s) });
            }
        }
        self.edges = edges;
    }
}

/// Non-trivial splits in `(lo, hi)` order.
pub fn default_order(sys: &SplitSystem) -> Vec<Split> {
    sys.non_trivial().copied().collect()
}

/// Inserts the non-trivial splits of `sys` in the given order into the star.
pub fn build_network(sys: &SplitSystem, order: &[Split]) -> Result<SplitNetwork, NetError> {
    let mut seen = BTreeSet::new();
    for s in order {
        if s.is_trivial() || !sys.contains(s) {
            return Err(NetError::NotInSystem(*s));
        }
        if !seen.insert(*s) {
            return Err(NetError::Repeated(*s));
        }
    }
    if let Some(s) = sys.non_trivial().find(|s| !seen.contains(s)) {
        return Err(NetError::Missing(*s));
    }
    let mut g = SplitNetwork::star(sys.n());
    for s in order {
        g.insert_split(*s);
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyFailure {
    pub label: Option<EdgeLabel>,
    pub reason: String,
}

/// Every edge class, once deleted, leaves exactly two components, and the
/// component away from the root holds exactly the taxa of the label.
pub fn verify_split_graph(g: &SplitNetwork) -> Check<VerifyFailure> {
    let fail = |label, reason: String| Check {
        holds: false,
        witness: Some(VerifyFailure { label, reason }),
    };
    if g.components(|_| true).1 != 1 {
        return fail(None, "graph is disconnected".into());
    }
    for label in g.edge_classes().keys() {
        if let EdgeLabel::Split(s) = label {
            if s.hi() > g.n || (s.lo(), s.hi()) == (1, g.n) {
                return fail(Some(*label), format!("{s} is not a split on {} leaves", g.n));
            }
        }
        let (comp, count) = g.components(|e| e.label != *label);
        if count != 2 {
            return fail(Some(*label), format!("deleting the class leaves {count} components"));
        }
        let root_comp = comp[g.leaves[0]];
        let bad: Vec<usize> = (0..=g.n)
            .filter(|&t| (comp[g.leaves[t]] != root_comp) != (label.inside(t) != label.inside(0)))
            .collect();
        if !bad.is_empty() {
            return fail(Some(*label), format!("taxa {bad:?} are on the wrong side"));
        }
    }
    Check { holds: true, witness: None }
}

/// Weighted length of a shortest path between the leaves of taxa `i` and
/// `j`; split edges weigh their split's weight and the root pendant weighs 0.
pub fn path_distance(g: &SplitNetwork, w: &WeightVector, i: usize, j: usize) -> Rational {
    let weight = |label: &EdgeLabel| match label {
        EdgeLabel::RootPendant => Rational::zero(),
        EdgeLabel::Split(s) => w.get(s),
    };
    let adj = g.adjacency(|_| true);
    let mut dist: Vec<Option<Rational>> = vec![None; g.vertex_count];
    let mut done = vec![false; g.vertex_count];
    dist[g.leaves[i]] = Some(Rational::zero());
    loop {
        let next = (0..g.vertex_count)
            .filter(|&v| !done[v] && dist[v].is_some())
            .min_by(|&a, &b| dist[a].cmp(&dist[b]).then(a.cmp(&b)));
        let Some(x) = next else { break };
        done[x] = true;
        let dx = dist[x].clone().expect("selected vertices have a distance");
        for &(y, k) in &adj[x] {
            let cand = &dx + weight(&g.edges[k].label);
            if dist[y].as_ref().map_or(true, |d| cand < *d) {
                dist[y] = Some(cand);
            }
        }
    }
    dist[g.leaves[j]].clone().expect("split networks are connected")
}

/// Label-aware canonical form: vertices are replaced by their side vectors
/// over all edge classes, so two networks with equal forms are isomorphic
/// by a map preserving labels and taxa.
pub fn canonical_form(g: &SplitNetwork) -> Vec<(Vec<bool>, Vec<bool>, EdgeLabel)> {
    let sides = g.sides();
    let signature = |v: usize| -> Vec<bool> { sides.values().map(|inside| inside[v]).collect() };
    let mut out: Vec<(Vec<bool>, Vec<bool>, EdgeLabel)> = g
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (signature(e.u), signature(e.v));
            if a <= b {
                (a, b, e.label)
            } else {
                (b, a, e.label)
            }
        })
        .collect();
    out.sort();
    out
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Graphviz description: one color per edge class, taxa as labelled
/// nodes, the root drawn as a double circle.
pub fn render_network(g: &SplitNetwork) -> String {
    let mut leaf_of = vec![None; g.vertex_count];
    for (t, &v) in g.leaves.iter().enumerate() {
        leaf_of[v] = Some(t);
    }
    let classes: Vec<EdgeLabel> = g.edge_classes().into_keys().collect();
    let mut out = String::from("graph split_network {\n  node [shape=point];\n");
    for (v, leaf) in leaf_of.iter().enumerate() {
        match leaf {
            Some(0) => writeln!(out, "  v{v} [shape=doublecircle, label=\"0\", root=true];"),
            Some(t) => writeln!(out, "  v{v} [shape=circle, label=\"{t}\"];"),
            None => writeln!(out, "  v{v};"),
        }
        .expect("writing to a String");
    }
    for e in &g.edges {
        let class = classes.binary_search(&e.label).expect("label is a class");
        writeln!(
            out,
            "  v{} -- v{} [label=\"{}\", color=\"{}\"];",
            e.u,
            e.v,
            e.label,
            PALETTE[class % PALETTE.len()]
        )
        .expect("writing to a String");
    }
    out.push_str("}\n");
    out
}

/// SVG of the `(n+1)`-gon with one chord per non-trivial split. Vertex `0`
/// is at the top and labels run clockwise; side `t` joins vertices `t` and
/// `t+1`. Chord weights are printed when given.
pub fn render_polygon(sys: &SplitSystem, w: Option<&WeightVector>) -> String {
    let m = sys.n() + 1;
    let (cx, cy, r) = (200.0_f64, 200.0_f64, 150.0_f64);
    let point = |k: usize, radius: f64| -> (f64, f64) {
        let angle = -std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * k as f64 / m as f64;
        (cx + radius * angle.cos(), cy + radius * angle.sin())
    };
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n",
    );
    let corners: Vec<String> = (0..m)
        .map(|k| {
            let (x, y) = point(k, r);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(
        out,
        "  <polygon class=\"polygon\" points=\"{}\" fill=\"none\" stroke=\"black\"/>",
        corners.join(" ")
    )
    .expect("writing to a String");
    for k in 0..m {
        let (x, y) = point(k, r + 16.0);
        writeln!(out, "  <text class=\"vertex\" x=\"{x:.3}\" y=\"{y:.3}\" text-anchor=\"middle\">{k}</text>")
            .expect("writing to a String");
        let (a, b) = (point(k, r * 0.86), point(k + 1, r * 0.86));
        let (sx, sy) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        writeln!(
            out,
            "  <text class=\"side\" x=\"{sx:.3}\" y=\"{sy:.3}\" text-anchor=\"middle\" fill=\"gray\">{k}</text>"
        )
        .expect("writing to a String");
    }
    for (s, d) in sys.non_trivial().zip(polygon_diagonals(sys)) {
        let (a, b) = (point(d.from, r), point(d.to, r));
        writeln!(
            out,
            "  <line class=\"chord\" data-from=\"{}\" data-to=\"{}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"steelblue\"/>",
            d.from, d.to, a.0, a.1, b.0, b.1
        )
        .expect("writing to a String");
        if let Some(w) = w {
            let (mx, my) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            writeln!(
                out,
                "  <text class=\"weight\" x=\"{mx:.3}\" y=\"{my:.3}\" text-anchor=\"middle\">{}</text>",
                rational::format(&w.get(s))
            )
            .expect("writing to a String");
        }
    }
    out.push_str("</svg>\n");
    out
}
