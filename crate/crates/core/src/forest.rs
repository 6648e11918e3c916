//! Forest patterns and the statistics the counting bounds are phrased in:
//! the exponent `alpha_s`, maximum stable sets, the vertex/edge cover used
//! by witness extraction, and automorphism counts.

use std::collections::BTreeMap;
use std::ops::Deref;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{find_cycle, Graph, Vertex, VertexSet};

/// A graph certified acyclic at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Forest(Graph);

impl Forest {
    pub fn new(g: Graph) -> Result<Self> {
        match find_cycle(&g) {
            None => Ok(Forest(g)),
            Some(cycle) => Err(Error::Validation(format!("pattern is not a forest; cycle {cycle:?}"))),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }

    pub fn into_graph(self) -> Graph {
        self.0
    }

    /// Path on `n` vertices (`P_n`, so `P2 = K2`).
    pub fn path(n: usize) -> Self {
        Forest(Graph::path(n))
    }

    pub fn star(leaves: usize) -> Self {
        Forest(Graph::star(leaves))
    }

    /// Spider: centre 0 with one leg of each given length.
    pub fn spider(legs: &[usize]) -> Self {
        let mut edges = Vec::new();
        let mut next = 1;
        for &len in legs {
            let mut prev = 0;
            for _ in 0..len {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        Forest(Graph::from_edges(next, &edges).expect("spider is simple"))
    }
}

impl Deref for Forest {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.0
    }
}

impl TryFrom<Graph> for Forest {
    type Error = Error;

    fn try_from(g: Graph) -> Result<Self> {
        Forest::new(g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub value: usize,
    pub witness: VertexSet,
    /// `{v : deg_T(v) <= s}`
    pub low_degree_set: VertexSet,
}

/// Vertices and edges of a forest covering every vertex, of total size
/// equal to the forest's stability number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedCover {
    pub vertices: VertexSet,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl MixedCover {
    pub fn size(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn covers(&self, f: &Graph) -> bool {
        let mut hit = vec![false; f.n()];
        for v in self.vertices.iter() {
            hit[v] = true;
        }
        for &(u, v) in &self.edges {
            if !f.has_edge(u, v) {
                return false;
            }
            hit[u] = true;
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// The subforest induced on vertices whose degree in `t` is at most `s`,
/// relabelled in increasing order of the returned set.
pub fn low_degree_subforest(t: &Forest, s: usize) -> (Forest, VertexSet) {
    let set: VertexSet = (0..t.n()).filter(|&v| t.degree(v) <= s).collect();
    let induced = t.induced(set.as_slice());
    (Forest(induced), set)
}

pub fn alpha_s(t: &Forest, s: usize) -> AlphaResult {
    let (sub, set) = low_degree_subforest(t, s);
    let local = max_stable_set_forest(&sub);
    let witness: VertexSet = local.iter().map(|i| set.as_slice()[i]).collect();
    AlphaResult {
        value: witness.len(),
        witness,
        low_degree_set: set,
    }
}

/// Parent pointers and a root-first order for every component, each rooted
/// at its smallest vertex.
fn rooted_order(f: &Graph) -> (Vec<Vertex>, Vec<Option<Vertex>>) {
    let mut parent = vec![None; f.n()];
    let mut seen = vec![false; f.n()];
    let mut order = Vec::with_capacity(f.n());
    for root in 0..f.n() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut i = start;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &w in f.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    order.push(w);
                }
            }
        }
    }
    (order, parent)
}

/// Maximum stable set by the include/exclude tree DP. On ties the DP
/// includes the vertex it is deciding, scanning from each component's
/// smallest vertex downwards.
pub fn max_stable_set_forest(f: &Forest) -> VertexSet {
    let g = f.graph();
    let (order, parent) = rooted_order(g);
    let mut inc = vec![1usize; g.n()];
    let mut exc = vec![0usize; g.n()];
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            inc[p] += exc[v];
            exc[p] += inc[v].max(exc[v]);
        }
    }
    let mut take = vec![false; g.n()];
    for &v in &order {
        take[v] = match parent[v] {
            Some(p) if take[p] => false,
            _ => inc[v] >= exc[v],
        };
    }
    (0..g.n()).filter(|&v| take[v]).collect()
}

/// Maximum matching edges plus every unmatched vertex. For a forest this has
/// exactly `alpha(F)` members, and isolated vertices land in `vertices`.
pub fn mixed_cover(f: &Forest) -> MixedCover {
    let g = f.graph();
    let (order, parent) = rooted_order(g);
    let mut matched = vec![false; g.n()];
    let mut edges = Vec::new();
    // leaves first: matching a vertex to its parent whenever both are free
    // is optimal on trees
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            if !matched[v] && !matched[p] {
                matched[v] = true;
                matched[p] = true;
                edges.push((v.min(p), v.max(p)));
            }
        }
    }
    edges.sort_unstable();
    MixedCover {
        vertices: (0..g.n()).filter(|&v| !matched[v]).collect(),
        edges,
    }
}

/// Canonical rooted-tree code (AHU) together with the automorphism count
/// of the rooted tree.
fn rooted_code(g: &Graph, root: Vertex, blocked: Option<Vertex>) -> (String, BigUint) {
    // iterative post-order
    let mut order = vec![(root, blocked)];
    let mut i = 0;
    while i < order.len() {
        let (v, p) = order[i];
        i += 1;
        for &w in g.neighbors(v) {
            if Some(w) != p {
                order.push((w, Some(v)));
            }
        }
    }
    let mut code: BTreeMap<Vertex, (String, BigUint)> = BTreeMap::new();
    for &(v, p) in order.iter().rev() {
        let mut kids: Vec<(String, BigUint)> = g
            .neighbors(v)
            .iter()
            .filter(|&&w| Some(w) != p)
            .map(|w| code.remove(w).expect("child coded before parent"))
            .collect();
        kids.sort_by(|a, b| a.0.cmp(&b.0));
        let mut aut = BigUint::one();
        let mut s = String::from("(");
        let mut run = 0u64;
        for (idx, (c, a)) in kids.iter().enumerate() {
            s.push_str(c);
            aut *= a;
            run += 1;
            if idx + 1 == kids.len() || kids[idx + 1].0 != *c {
                aut *= factorial(run);
                run = 0;
            }
        }
        s.push(')');
        code.insert(v, (s, aut));
    }
    code.remove(&root).expect("root coded")
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Centre vertices of the tree spanned by `comp` (one or two of them).
fn tree_centers(g: &Graph, comp: &[Vertex]) -> Vec<Vertex> {
    let mut deg: BTreeMap<Vertex, usize> = comp.iter().map(|&v| (v, g.degree(v))).collect();
    let mut layer: Vec<Vertex> = comp.iter().copied().filter(|v| deg[v] <= 1).collect();
    let mut remaining = comp.len();
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in g.neighbors(v) {
                let d = deg.get_mut(&w).expect("neighbour in component");
                if *d > 1 {
                    *d -= 1;
                    if *d == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Unrooted canonical code and automorphism count of one tree component.
fn tree_code(g: &Graph, comp: &[Vertex]) -> (String, BigUint) {
    match tree_centers(g, comp).as_slice() {
        [c] => rooted_code(g, *c, None),
        [a, b] => {
            let (ca, xa) = rooted_code(g, *a, Some(*b));
            let (cb, xb) = rooted_code(g, *b, Some(*a));
            let mut aut = xa * xb;
            if ca == cb {
                aut *= 2u32;
            }
            let (lo, hi) = if ca <= cb { (ca, cb) } else { (cb, ca) };
            (format!("[{lo}{hi}]"), aut)
        }
        other => unreachable!("a tree has one or two centres, found {other:?}"),
    }
}

/// `|Aut(T)|`: product over components of their automorphism counts, times
/// `r!` for each class of `r` isomorphic components.
pub fn automorphism_count(t: &Forest) -> BigUint {
    let mut classes: BTreeMap<String, (BigUint, u64)> = BTreeMap::new();
    for comp in t.components() {
        let (code, aut) = tree_code(t.graph(), &comp);
        classes.entry(code).or_insert((aut, 0)).1 += 1;
    }
    classes
        .into_values()
        .fold(BigUint::one(), |acc, (aut, r)| acc * aut.pow(r as u32) * factorial(r))
}

/// Canonical string for the isomorphism class of a forest.
pub fn canonical_code(t: &Forest) -> String {
    let mut codes: Vec<String> = t
        .components()
        .iter()
        .map(|c| tree_code(t.graph(), c).0)
        .collect();
    codes.sort();
    codes.concat()
}
