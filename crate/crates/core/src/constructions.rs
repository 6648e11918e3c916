//! The extremal constructions: the clone blow-up of a forest that carries
//! `~ n^alpha_s(T)` copies of `T` while keeping treewidth at most `s`, and
//! the gadget `⊕H^{s,t}` whose presence witnesses many images.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{alpha_s, Forest};
use crate::graph::{contract_partition, diameter, is_forest, Graph, Vertex, VertexSet};

/// Bags indexed by the nodes of an index tree (or forest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub index_tree: Graph,
    pub bags: Vec<VertexSet>,
}

/// On-disk form: `{"tree_edges": [[i,j],...], "bags": [[v,...],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecompositionJson {
    pub tree_edges: Vec<[usize; 2]>,
    pub bags: Vec<Vec<Vertex>>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(VertexSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn to_json(&self) -> TreeDecompositionJson {
        TreeDecompositionJson {
            tree_edges: self.index_tree.edges().map(|(a, b)| [a, b]).collect(),
            bags: self.bags.iter().map(|b| b.as_slice().to_vec()).collect(),
        }
    }

    pub fn from_json(j: TreeDecompositionJson) -> Result<Self> {
        let edges: Vec<_> = j.tree_edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(TreeDecomposition {
            index_tree: Graph::from_edges(j.bags.len(), &edges)?,
            bags: j.bags.into_iter().map(VertexSet::from).collect(),
        })
    }

    /// Decomposition of the 1-sum built by [`Graph::one_sum`]: the two
    /// decompositions side by side, joined by an index edge between a bag
    /// holding `at_self` and a bag holding `at_other`.
    pub fn one_sum(
        &self,
        self_n: usize,
        at_self: Vertex,
        other: &TreeDecomposition,
        at_other: Vertex,
    ) -> Result<TreeDecomposition> {
        let a = self
            .bags
            .iter()
            .position(|b| b.contains(at_self))
            .ok_or_else(|| Error::Domain(format!("no bag holds vertex {at_self}")))?;
        let b = other
            .bags
            .iter()
            .position(|b| b.contains(at_other))
            .ok_or_else(|| Error::Domain(format!("no bag holds vertex {at_other}")))?;
        let relabel = |w: Vertex| match w.cmp(&at_other) {
            std::cmp::Ordering::Equal => at_self,
            std::cmp::Ordering::Less => w + self_n,
            std::cmp::Ordering::Greater => w + self_n - 1,
        };
        let off = self.bags.len();
        let mut bags = self.bags.clone();
        bags.extend(other.bags.iter().map(|bag| bag.iter().map(relabel).collect()));
        let edges = self
            .index_tree
            .edges()
            .chain(other.index_tree.edges().map(|(x, y)| (x + off, y + off)))
            .chain(std::iter::once((a, b + off)));
        Ok(TreeDecomposition {
            index_tree: Graph::simplified(bags.len(), edges.collect::<Vec<_>>()),
            bags,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdReport {
    pub valid: bool,
    pub width: usize,
    pub violation: Option<String>,
}

/// Checks the index structure, edge coverage and connectivity of each
/// vertex's bag support. Reports the first violation found.
pub fn verify_tree_decomposition(g: &Graph, d: &TreeDecomposition) -> TdReport {
    let fail = |msg: String| TdReport {
        valid: false,
        width: d.width(),
        violation: Some(msg),
    };
    if d.bags.len() != d.index_tree.n() {
        return fail(format!(
            "{} bags for {} index nodes",
            d.bags.len(),
            d.index_tree.n()
        ));
    }
    if let Some((i, v)) = d
        .bags
        .iter()
        .enumerate()
        .find_map(|(i, b)| b.iter().find(|&v| v >= g.n()).map(|v| (i, v)))
    {
        return fail(format!("bag {i} names vertex {v} outside the graph"));
    }
    if !is_forest(&d.index_tree) {
        return fail("index structure contains a cycle".into());
    }
    for (u, v) in g.edges() {
        if !d.bags.iter().any(|b| b.contains(u) && b.contains(v)) {
            return fail(format!("(T1) edge {u}{v} lies in no bag"));
        }
    }
    let mut support = vec![Vec::new(); g.n()];
    for (i, b) in d.bags.iter().enumerate() {
        for v in b.iter() {
            support[v].push(i);
        }
    }
    for (v, nodes) in support.iter().enumerate() {
        if nodes.is_empty() {
            return fail(format!("(T2) vertex {v} lies in no bag"));
        }
        if !d.index_tree.is_connected_subset(nodes) {
            return fail(format!("(T2) bags containing vertex {v} are not connected"));
        }
    }
    TdReport {
        valid: true,
        width: d.width(),
        violation: None,
    }
}

/// Output of [`build_lower_bound_graph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundInstance {
    pub graph: Graph,
    pub decomposition: TreeDecomposition,
    /// Maximum stable set of the low-degree subforest.
    pub stable_set: VertexSet,
    /// Clone sets, one per member of `stable_set` in increasing order.
    pub clones: Vec<VertexSet>,
    pub m: usize,
    pub k: usize,
}

impl LowerBoundInstance {
    /// `(2k)^{-k} n^k`, the guaranteed copy count once `n >= 2|V(T)| + 2k`.
    pub fn guaranteed_fraction(k: usize, n: usize) -> f64 {
        (n as f64 / (2 * k) as f64).powi(k as i32)
    }
}

/// Blows up every vertex of a maximum stable set `S` of the low-degree
/// subforest into `m = floor((n - |V(T)|) / k)` extra twins, giving at least
/// `m^k` copies of `T` on at most `n` vertices, and builds the matching
/// width-`<= s` tree decomposition rooted outside `S` in every non-trivial
/// component.
pub fn build_lower_bound_graph(t: &Forest, s: usize, n: usize) -> Result<LowerBoundInstance> {
    if s == 0 {
        return Err(Error::Domain("the blow-up needs s >= 1".into()));
    }
    let h = t.n();
    if h == 0 {
        return Err(Error::Domain("pattern has no vertices".into()));
    }
    if n < h {
        return Err(Error::Domain(format!("n = {n} is below |V(T)| = {h}")));
    }
    let alpha = alpha_s(t, s);
    let k = alpha.value;
    let m = (n - h) / k;
    let stable = alpha.witness;

    let mut clones = Vec::with_capacity(k);
    let mut edges: Vec<(Vertex, Vertex)> = t.edges().collect();
    let mut next = h;
    for v in stable.iter() {
        let set: VertexSet = (next..next + m).collect();
        next += m;
        for x in set.iter() {
            edges.extend(t.neighbors(v).iter().map(|&w| (x, w)));
        }
        clones.push(set);
    }
    let graph = Graph::from_edges(next, &edges)?;

    // index node ids coincide with vertex ids: V(T) plus every clone
    let mut index_edges: Vec<(usize, usize)> = t.edges().collect();
    let mut bags = vec![VertexSet::new(); next];
    for (idx, v) in stable.iter().enumerate() {
        let nbrs = t.neighbors(v);
        bags[v] = nbrs.iter().copied().chain(std::iter::once(v)).collect();
        for x in clones[idx].iter() {
            index_edges.push((v, x));
            bags[x] = nbrs.iter().copied().chain(std::iter::once(x)).collect();
        }
    }
    for comp in t.components() {
        if comp.len() == 1 {
            let v = comp[0];
            if !stable.contains(v) {
                bags[v] = VertexSet::from([v]);
            }
            continue;
        }
        // a stable set cannot swallow a component that has an edge
        let root = *comp
            .iter()
            .find(|&&v| !stable.contains(v))
            .ok_or_else(|| Error::Defect("component lies inside the stable set".into()))?;
        let dist = t.bfs_distances(root);
        for &w in &comp {
            if stable.contains(w) {
                continue;
            }
            bags[w] = if w == root {
                VertexSet::from([w])
            } else {
                let parent = *t
                    .neighbors(w)
                    .iter()
                    .find(|&&p| dist[p] + 1 == dist[w])
                    .expect("non-root has a parent");
                VertexSet::from([w, parent])
            };
        }
    }
    let decomposition = TreeDecomposition {
        index_tree: Graph::from_edges(next, &index_edges)?,
        bags,
    };
    Ok(LowerBoundInstance {
        graph,
        decomposition,
        stable_set: stable,
        clones,
        m,
        k,
    })
}

/// `max(s + 1 - deg_H(v), 0)`: how many star vertices `v` receives.
pub fn comp_deg(h: &Graph, s: usize, v: Vertex) -> Result<usize> {
    if v >= h.n() {
        return Err(Error::Domain(format!("vertex {v} is not in a graph on {} vertices", h.n())));
    }
    Ok((s + 1).saturating_sub(h.degree(v)))
}

/// Sum of [`comp_deg`] over all vertices: the left side of the complete
/// bipartite graph obtained by contracting the copies of `H`.
pub fn gadget_s_prime(h: &Graph, s: usize) -> usize {
    (0..h.n()).map(|v| (s + 1).saturating_sub(h.degree(v))).sum()
}

/// Vertex label in `⊕H^{s,t}`; `copy` and `index` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetLabel {
    Core { v: Vertex, copy: usize },
    Star { v: Vertex, index: usize },
}

impl fmt::Display for GadgetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetLabel::Core { v, copy } => write!(f, "({v},{copy})"),
            GadgetLabel::Star { v, index } => write!(f, "({v},{index})*"),
        }
    }
}

impl std::str::FromStr for GadgetLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("malformed gadget label {s:?}"));
        let (body, star) = match s.strip_suffix('*') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let inner = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let v = a.trim().parse().map_err(|_| bad())?;
        let j = b.trim().parse().map_err(|_| bad())?;
        Ok(if star {
            GadgetLabel::Star { v, index: j }
        } else {
            GadgetLabel::Core { v, copy: j }
        })
    }
}

/// Edge-list JSON of the gadget graph with a label per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    pub labels: Vec<String>,
}

/// `⊕H^{s,t}`: `t` copies of `H`, plus `comp_deg(v)` star vertices per
/// `v` adjacent to all `t` copies of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub graph: Graph,
    /// `labels[x]` names gadget vertex `x`. Core vertices come first,
    /// copy-major, so copy `i` occupies `(i-1)|V(H)| .. i|V(H)|`.
    pub labels: Vec<GadgetLabel>,
    pub s: usize,
    pub t: usize,
}

impl Gadget {
    pub fn core_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| matches!(l, GadgetLabel::Core { .. }))
            .count()
    }

    pub fn vertex_of(&self, label: GadgetLabel) -> Option<Vertex> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn to_json(&self) -> GadgetJson {
        GadgetJson {
            n: self.graph.n(),
            edges: self.graph.edges().map(|(u, v)| [u, v]).collect(),
            labels: self.labels.iter().map(ToString::to_string).collect(),
        }
    }

    /// The copy classes `X_1, ..., X_t`.
    pub fn copy_classes(&self) -> Vec<VertexSet> {
        let per = self.core_count() / self.t.max(1);
        (0..self.t).map(|i| (i * per..(i + 1) * per).collect()).collect()
    }
}

pub fn build_gadget(h: &Graph, s: usize, t: usize) -> Result<Gadget> {
    if h.n() == 0 {
        return Err(Error::Domain("H must have at least one vertex".into()));
    }
    if s == 0 || t == 0 {
        return Err(Error::Domain("s and t must be at least 1".into()));
    }
    let hn = h.n();
    let mut labels = Vec::new();
    for copy in 1..=t {
        labels.extend((0..hn).map(|v| GadgetLabel::Core { v, copy }));
    }
    let mut edges = Vec::new();
    for copy in 0..t {
        edges.extend(h.edges().map(|(u, v)| (copy * hn + u, copy * hn + v)));
    }
    for v in 0..hn {
        for index in 1..=comp_deg(h, s, v)? {
            let star = labels.len();
            labels.push(GadgetLabel::Star { v, index });
            edges.extend((0..t).map(|copy| (copy * hn + v, star)));
        }
    }
    Ok(Gadget {
        graph: Graph::from_edges(labels.len(), &edges)?,
        labels,
        s,
        t,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail(String),
    NotApplicable(String),
}

impl Check {
    pub fn passed(&self) -> bool {
        !matches!(self, Check::Fail(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub s_prime: usize,
    /// Contraction of the copy classes gives `K_{s',t}`.
    pub contraction: Check,
    /// Star degrees, core degrees, minimum degree.
    pub degrees: Check,
    /// `diameter <= diameter(H) + 2`.
    pub diameter: Check,
}

impl GadgetReport {
    pub fn all_passed(&self) -> bool {
        self.contraction.passed() && self.degrees.passed() && self.diameter.passed()
    }
}

pub fn verify_gadget_properties(h: &Graph, s: usize, t: usize) -> Result<GadgetReport> {
    let gadget = build_gadget(h, s, t)?;
    let g = &gadget.graph;
    let s_prime = gadget_s_prime(h, s);
    let connected = h.is_connected();
    let tree = connected && is_forest(h);

    let contraction = if !connected {
        Check::NotApplicable("H is disconnected, copies do not contract".into())
    } else {
        let c = contract_partition(g, &gadget.copy_classes())?;
        // contracted copies are numbered first (they hold the smallest ids)
        let expected = Graph::complete_bipartite(t, s_prime);
        if c.graph != expected {
            Check::Fail(format!("contraction is not K_{{{s_prime},{t}}}"))
        } else if s_prime + 2 * h.edge_count() < (s + 1) * h.n() {
            Check::Fail(format!("s' = {s_prime} below (s+1)|V(H)| - 2|E(H)|"))
        } else if tree && (s_prime < h.n() * (s - 1) + 2 || s_prime < s + 1) {
            Check::Fail(format!("s' = {s_prime} below the tree bound"))
        } else {
            Check::Pass
        }
    };

    let mut degrees = Check::Pass;
    for (x, label) in gadget.labels.iter().enumerate() {
        let (want, what) = match *label {
            GadgetLabel::Star { .. } => (t, "star"),
            GadgetLabel::Core { v, .. } => (h.degree(v) + comp_deg(h, s, v)?, "core"),
        };
        if g.degree(x) != want {
            degrees = Check::Fail(format!("{what} vertex {label} has degree {} not {want}", g.degree(x)));
            break;
        }
        if matches!(label, GadgetLabel::Core { .. }) && want < s + 1 {
            degrees = Check::Fail(format!("core vertex {label} has degree {want} < s+1"));
            break;
        }
    }
    if degrees.passed() && t > s && g.min_degree() < s + 1 {
        degrees = Check::Fail(format!("minimum degree {} < s+1 with t >= s+1", g.min_degree()));
    }

    let diameter_check = if !connected {
        Check::NotApplicable("H is disconnected".into())
    } else {
        let dh = diameter(h).expect("connected");
        match diameter(g) {
            Some(dg) if dg <= dh + 2 => Check::Pass,
            Some(dg) => Check::Fail(format!("diameter {dg} > {dh} + 2")),
            None => Check::Fail("gadget is disconnected".into()),
        }
    };

    Ok(GadgetReport {
        s_prime,
        contraction,
        degrees,
        diameter: diameter_check,
    })
}
