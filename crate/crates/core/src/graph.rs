//! Simple undirected graphs on dense vertex identifiers, plus the structural
//! primitives every other module builds on.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// A finite simple undirected graph with vertices `0..n`.
///
/// Adjacency lists are kept sorted, so neighbour tests are binary searches.
/// Values are immutable once built; use [`Graph::from_edges`] or one of the
/// named families to construct one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge #{i} ({u},{v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("edge #{i} is a self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!(
                    "duplicate edge ({},{})",
                    v.min(w[0]),
                    v.max(w[0])
                )));
            }
        }
        Ok(Graph {
            adj,
            edge_count: edges.len(),
        })
    }

    /// Builds the simple graph underlying an arbitrary edge multiset:
    /// loops are dropped and parallel edges merged.
    pub fn simplified(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "endpoint out of range");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut twice = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            adj,
            edge_count: twice / 2,
        }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &edges).expect("complete graph is simple")
    }

    /// `K_{1,leaves}` with the centre at vertex 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star is simple")
    }

    /// `K_{a,b}` with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges: Vec<_> = (0..a)
            .flat_map(|u| (a..a + b).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(a + b, &edges).expect("complete bipartite graph is simple")
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n();
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + off, v + off)));
        Graph::simplified(off + other.n(), edges)
    }

    /// 1-sum: glue `other` onto `self` by identifying `other`'s vertex
    /// `at_other` with `self`'s vertex `at_self`.
    pub fn one_sum(&self, at_self: Vertex, other: &Graph, at_other: Vertex) -> Graph {
        assert!(at_self < self.n() && at_other < other.n());
        let off = self.n();
        let relabel = |w: Vertex| -> Vertex {
            match w.cmp(&at_other) {
                std::cmp::Ordering::Equal => at_self,
                std::cmp::Ordering::Less => w + off,
                std::cmp::Ordering::Greater => w + off - 1,
            }
        };
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v)| (relabel(u), relabel(v))));
        Graph::simplified(off + other.n() - 1, edges)
    }

    /// The same graph with one more edge. Panics on loops or out-of-range
    /// endpoints; adding an existing edge is a no-op.
    pub fn with_edge(&self, u: Vertex, v: Vertex) -> Graph {
        assert!(u != v);
        Graph::simplified(self.n(), self.edges().chain(std::iter::once((u, v))))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Subgraph induced on `vertices`, relabelled to `0..vertices.len()` in
    /// the given order.
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = vertices.iter().enumerate().flat_map(|(i, &v)| {
            let index = &index;
            self.adj[v]
                .iter()
                .filter(move |&&w| index[w] != usize::MAX && index[w] > i)
                .map(move |&w| (i, index[w]))
        });
        Graph::simplified(vertices.len(), edges.collect::<Vec<_>>())
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether `set` (assumed in range) induces a connected subgraph.
    /// The empty set counts as disconnected.
    pub fn is_connected_subset(&self, set: &[Vertex]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let members: BTreeSet<Vertex> = set.iter().copied().collect();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if members.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == members.len()
    }

    /// BFS distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// A sorted, duplicate-free set of vertex identifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.iter().chain(other.iter()).collect()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<Vertex>> for VertexSet {
    fn from(v: Vec<Vertex>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[Vertex; N]> for VertexSet {
    fn from(v: [Vertex; N]) -> Self {
        v.into_iter().collect()
    }
}

/// Edge density `|E| / |V|` as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Density(pub Ratio<u64>);

impl Density {
    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn density(g: &Graph) -> Result<Density> {
    if g.n() == 0 {
        return Err(Error::Domain("density of the empty graph is undefined".into()));
    }
    Ok(Density(Ratio::new(g.edge_count() as u64, g.n() as u64)))
}

/// Minimum-degree elimination: returns the degeneracy `k` and the order in
/// which vertices were removed. Ties go to the smallest identifier.
pub fn degeneracy(g: &Graph) -> Result<(usize, Vec<Vertex>)> {
    if g.n() == 0 {
        return Err(Error::Domain("degeneracy of the empty graph is undefined".into()));
    }
    let mut deg: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut queue: BTreeSet<(usize, Vertex)> = deg.iter().copied().zip(0..).collect();
    let mut removed = vec![false; g.n()];
    let mut order = Vec::with_capacity(g.n());
    let mut k = 0;
    while let Some((d, v)) = queue.pop_first() {
        k = k.max(d);
        removed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                queue.remove(&(deg[w], w));
                deg[w] -= 1;
                queue.insert((deg[w], w));
            }
        }
    }
    Ok((k, order))
}

/// Result of [`contract_partition`]: the quotient graph and, for every
/// original vertex, the quotient vertex it was merged into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub graph: Graph,
    pub part_of: Vec<Vertex>,
}

/// Contracts each part to a single vertex. Vertices not covered by any part
/// stay as singletons. Quotient vertices are numbered by the smallest
/// original vertex they contain, so all-singleton parts give back `g`.
pub fn contract_partition(g: &Graph, parts: &[VertexSet]) -> Result<Contraction> {
    let mut owner = vec![usize::MAX; g.n()];
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Validation(format!("part #{i} is empty")));
        }
        for v in part.iter() {
            if v >= g.n() {
                return Err(Error::Validation(format!("part #{i} names vertex {v} outside the graph")));
            }
            if owner[v] != usize::MAX {
                return Err(Error::Validation(format!(
                    "vertex {v} lies in parts #{} and #{i}",
                    owner[v]
                )));
            }
            owner[v] = i;
        }
        if !g.is_connected_subset(part.as_slice()) {
            return Err(Error::Validation(format!("part #{i} does not induce a connected subgraph")));
        }
    }
    // representative = smallest vertex in the block
    let mut rep = vec![usize::MAX; g.n()];
    for v in 0..g.n() {
        rep[v] = match owner[v] {
            usize::MAX => v,
            i => parts[i].as_slice()[0],
        };
    }
    let mut reps: Vec<Vertex> = rep.clone();
    reps.sort_unstable();
    reps.dedup();
    let part_of: Vec<Vertex> = rep
        .iter()
        .map(|r| reps.binary_search(r).expect("representative present"))
        .collect();
    let graph = Graph::simplified(
        reps.len(),
        g.edges().map(|(u, v)| (part_of[u], part_of[v])),
    );
    Ok(Contraction { graph, part_of })
}

/// Largest shortest-path distance; `None` when the graph is disconnected.
pub fn diameter(g: &Graph) -> Option<usize> {
    let mut best = 0;
    for s in 0..g.n() {
        for d in g.bfs_distances(s) {
            if d == usize::MAX {
                return None;
            }
            best = best.max(d);
        }
    }
    Some(best)
}

/// Returns a cycle as a vertex sequence if one exists.
pub fn find_cycle(g: &Graph) -> Option<Vec<Vertex>> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        // iterative DFS: (vertex, next neighbour index)
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
            if *idx == g.degree(v) {
                stack.pop();
                continue;
            }
            let w = g.neighbors(v)[*idx];
            *idx += 1;
            if w == parent[v] {
                continue;
            }
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = v;
                stack.push((w, 0));
            } else if depth[w] < depth[v] {
                let mut cycle = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[x];
                    cycle.push(x);
                }
                cycle.reverse();
                return Some(cycle);
            }
        }
    }
    None
}

pub fn is_forest(g: &Graph) -> bool {
    g.edge_count() + g.components().len() == g.n()
}
