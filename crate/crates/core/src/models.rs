//! Searching small hosts for `(p,q)`-models of complete bipartite graphs,
//! and separations with the flap number built from them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::clique::max_clique;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::shortcuts::BipartiteModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSearch {
    Found(BipartiteModel),
    /// The whole search space was explored without success.
    None,
    /// The node budget ran out first.
    Unknown,
}

/// All connected vertex sets of size `1..=max_size`, each sorted, listed in
/// lexicographic order.
pub fn connected_sets(g: &Graph, max_size: usize) -> Vec<VertexSet> {
    fn grow(
        g: &Graph,
        root: Vertex,
        current: &mut Vec<Vertex>,
        frontier: &BTreeSet<Vertex>,
        banned: &mut BTreeSet<Vertex>,
        max_size: usize,
        out: &mut BTreeSet<Vec<Vertex>>,
    ) {
        let mut sorted = current.clone();
        sorted.sort_unstable();
        out.insert(sorted);
        if current.len() == max_size {
            return;
        }
        // each connected set is produced once: extend by frontier vertices
        // in order, banning earlier choices in later branches
        let options: Vec<Vertex> = frontier.iter().copied().filter(|v| !banned.contains(v)).collect();
        let mut newly_banned = Vec::new();
        for v in options {
            current.push(v);
            let mut next = frontier.clone();
            next.remove(&v);
            for &w in g.neighbors(v) {
                if w > root && !current.contains(&w) && !banned.contains(&w) {
                    next.insert(w);
                }
            }
            grow(g, root, current, &next, banned, max_size, out);
            current.pop();
            banned.insert(v);
            newly_banned.push(v);
        }
        for v in newly_banned {
            banned.remove(&v);
        }
    }

    let mut out = BTreeSet::new();
    if max_size == 0 {
        return Vec::new();
    }
    for root in 0..g.n() {
        let frontier: BTreeSet<Vertex> = g.neighbors(root).iter().copied().filter(|&w| w > root).collect();
        grow(g, root, &mut vec![root], &frontier, &mut BTreeSet::new(), max_size, &mut out);
    }
    out.into_iter().map(VertexSet::from).collect()
}

struct ModelSearcher<'a> {
    g: &'a Graph,
    s: usize,
    t: usize,
    left_cands: Vec<VertexSet>,
    right_cands: Vec<VertexSet>,
    /// `touch[i][j]`: some edge joins left candidate i and right candidate j
    touch: Vec<Vec<bool>>,
    budget: u64,
    nodes: u64,
    used: Vec<bool>,
    left: Vec<usize>,
    right: Vec<usize>,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

impl<'a> ModelSearcher<'a> {
    fn free(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| !self.used[v])
    }

    fn mark(&mut self, set: &VertexSet, on: bool) {
        for v in set.iter() {
            self.used[v] = on;
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget
    }

    fn right_pool(&self) -> usize {
        (0..self.right_cands.len())
            .filter(|&j| self.free(&self.right_cands[j]) && self.left.iter().all(|&i| self.touch[i][j]))
            .count()
    }

    fn pick_left(&mut self, from: usize) -> Step {
        if !self.tick() {
            return Step::OutOfBudget;
        }
        if self.left.len() == self.s {
            return self.pick_right(0);
        }
        if self.right_pool() < self.t {
            return Step::Exhausted;
        }
        for i in from..self.left_cands.len() {
            if !self.free(&self.left_cands[i]) {
                continue;
            }
            let set = self.left_cands[i].clone();
            self.mark(&set, true);
            self.left.push(i);
            let r = self.pick_left(i + 1);
            if !matches!(r, Step::Exhausted) {
                return r;
            }
            self.left.pop();
            self.mark(&set, false);
        }
        Step::Exhausted
    }

    fn pick_right(&mut self, from: usize) -> Step {
        if !self.tick() {
            return Step::OutOfBudget;
        }
        if self.right.len() == self.t {
            return Step::Found;
        }
        for j in from..self.right_cands.len() {
            if !self.free(&self.right_cands[j]) || !self.left.iter().all(|&i| self.touch[i][j]) {
                continue;
            }
            let set = self.right_cands[j].clone();
            self.mark(&set, true);
            self.right.push(j);
            let r = self.pick_right(j + 1);
            if !matches!(r, Step::Exhausted) {
                return r;
            }
            self.right.pop();
            self.mark(&set, false);
        }
        Step::Exhausted
    }
}

/// Backtracking search for a `(p,q)`-model of `K_{s,t}` in `g`, left side
/// first, branch sets taken in lexicographic order. Gives up with
/// [`ModelSearch::Unknown`] after `budget` search nodes.
pub fn find_pq_model(g: &Graph, s: usize, t: usize, p: usize, q: usize, budget: u64) -> Result<ModelSearch> {
    if s == 0 || t == 0 || p == 0 || q == 0 {
        return Err(Error::Domain("s, t, p and q must be at least 1".into()));
    }
    let left_cands = connected_sets(g, p);
    let right_cands = if q == p { left_cands.clone() } else { connected_sets(g, q) };
    let touch = left_cands
        .iter()
        .map(|x| {
            right_cands
                .iter()
                .map(|y| x.is_disjoint(y) && x.iter().any(|a| y.iter().any(|b| g.has_edge(a, b))))
                .collect()
        })
        .collect();
    let mut searcher = ModelSearcher {
        g,
        s,
        t,
        left_cands,
        right_cands,
        touch,
        budget,
        nodes: 0,
        used: vec![false; g.n()],
        left: Vec::new(),
        right: Vec::new(),
    };
    Ok(match searcher.pick_left(0) {
        Step::Found => {
            let model = BipartiteModel {
                left: searcher.left.iter().map(|&i| searcher.left_cands[i].clone()).collect(),
                right: searcher.right.iter().map(|&j| searcher.right_cands[j].clone()).collect(),
            };
            debug_assert!(crate::shortcuts::verify_model(searcher.g, &model, s, t, p, q).valid);
            ModelSearch::Found(model)
        }
        Step::Exhausted => ModelSearch::None,
        Step::OutOfBudget => ModelSearch::Unknown,
    })
}

/// A pair `(A, B)` of edge-disjoint subgraphs covering `H`, each with a
/// vertex the other lacks. `order = |V(A) ∩ V(B)|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Separation {
    pub a_vertices: VertexSet,
    pub b_vertices: VertexSet,
    pub a_edges: Vec<(Vertex, Vertex)>,
    pub b_edges: Vec<(Vertex, Vertex)>,
    pub order: usize,
}

impl Separation {
    pub fn swapped(&self) -> Separation {
        Separation {
            a_vertices: self.b_vertices.clone(),
            b_vertices: self.a_vertices.clone(),
            a_edges: self.b_edges.clone(),
            b_edges: self.a_edges.clone(),
            order: self.order,
        }
    }

    /// `V(A) \ V(B)`.
    pub fn a_interior(&self) -> VertexSet {
        self.a_vertices.iter().filter(|&v| !self.b_vertices.contains(v)).collect()
    }

    pub fn b_interior(&self) -> VertexSet {
        self.b_vertices.iter().filter(|&v| !self.a_vertices.contains(v)).collect()
    }

    /// Checks the defining conditions against `h`.
    pub fn is_valid_for(&self, h: &Graph) -> bool {
        let mut all: Vec<(Vertex, Vertex)> = self.a_edges.iter().chain(&self.b_edges).copied().collect();
        all.sort_unstable();
        let before = all.len();
        all.dedup();
        let covers_edges = before == all.len() && all == h.edges().collect::<Vec<_>>();
        let covers_vertices = self.a_vertices.union(&self.b_vertices).len() == h.n();
        let closed = |vs: &VertexSet, es: &[(Vertex, Vertex)]| es.iter().all(|&(u, v)| vs.contains(u) && vs.contains(v));
        covers_edges
            && covers_vertices
            && closed(&self.a_vertices, &self.a_edges)
            && closed(&self.b_vertices, &self.b_edges)
            && !self.a_interior().is_empty()
            && !self.b_interior().is_empty()
            && self.order == self.a_vertices.intersection(&self.b_vertices).len()
    }
}

/// `E(A) ∩ E(C) = ∅` and `(V(A)\V(B)) ∩ (V(C)\V(D)) = ∅`.
pub fn independent(x: &Separation, y: &Separation) -> bool {
    x.a_edges.iter().all(|e| !y.a_edges.contains(e)) && x.a_interior().is_disjoint(&y.a_interior())
}

pub const SEPARATION_VERTEX_GUARD: usize = 12;
pub const SEPARATION_EDGE_GUARD: usize = 20;

/// Every `(<= s)`-separation of `h`, one per unordered pair: side `A` holds
/// the smallest vertex outside `A ∩ B`.
pub fn enumerate_separations(h: &Graph, s: usize) -> Result<Vec<Separation>> {
    if h.n() > SEPARATION_VERTEX_GUARD || h.edge_count() > SEPARATION_EDGE_GUARD {
        return Err(Error::Capacity(format!(
            "separation enumeration is limited to {SEPARATION_VERTEX_GUARD} vertices and \
             {SEPARATION_EDGE_GUARD} edges"
        )));
    }
    let edges: Vec<(Vertex, Vertex)> = h.edges().collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << edges.len()) {
        let (mut a_cov, mut b_cov) = (vec![false; h.n()], vec![false; h.n()]);
        for (i, &(u, v)) in edges.iter().enumerate() {
            let side = if mask >> i & 1 == 1 { &mut a_cov } else { &mut b_cov };
            side[u] = true;
            side[v] = true;
        }
        let forced = (0..h.n()).filter(|&v| a_cov[v] && b_cov[v]).count();
        if forced > s {
            continue;
        }
        // per free vertex, the placements (in A, in B) it may take
        let free: Vec<(Vertex, Vec<Placement>)> = (0..h.n())
            .filter(|&v| !(a_cov[v] && b_cov[v]))
            .map(|v| {
                let opts = match (a_cov[v], b_cov[v]) {
                    (true, false) => vec![(true, false), (true, true)],
                    (false, true) => vec![(false, true), (true, true)],
                    _ => vec![(true, false), (false, true), (true, true)],
                };
                (v, opts)
            })
            .collect();
        let mut place = vec![(false, false); h.n()];
        for v in 0..h.n() {
            place[v] = (a_cov[v], b_cov[v]);
        }
        let a_edges: Vec<_> = edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let b_edges: Vec<_> = edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, &e)| e).collect();
        place_free(&free, 0, forced, s, &mut place, &mut |place| {
            let a: VertexSet = (0..h.n()).filter(|&v| place[v].0).collect();
            let b: VertexSet = (0..h.n()).filter(|&v| place[v].1).collect();
            let sep = Separation {
                order: a.intersection(&b).len(),
                a_vertices: a,
                b_vertices: b,
                a_edges: a_edges.clone(),
                b_edges: b_edges.clone(),
            };
            let (ai, bi) = (sep.a_interior(), sep.b_interior());
            if ai.is_empty() || bi.is_empty() {
                return;
            }
            if ai.as_slice()[0] < bi.as_slice()[0] {
                out.push(sep);
            }
        });
    }
    out.sort();
    Ok(out)
}

/// Membership of a vertex in (A, B).
type Placement = (bool, bool);

fn place_free(
    free: &[(Vertex, Vec<Placement>)],
    idx: usize,
    order: usize,
    cap: usize,
    place: &mut Vec<Placement>,
    emit: &mut dyn FnMut(&[Placement]),
) {
    if idx == free.len() {
        emit(place);
        return;
    }
    let (v, ref opts) = free[idx];
    for &opt in opts {
        let extra = usize::from(opt.0 && opt.1);
        if order + extra > cap {
            continue;
        }
        place[v] = opt;
        place_free(free, idx + 1, order + extra, cap, place, emit);
    }
}

type EdgeSet = BTreeSet<(Vertex, Vertex)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlapResult {
    pub value: usize,
    /// Pairwise independent separations, flap side first.
    pub witness: Vec<Separation>,
}

/// `f_s(H)`: the most pairwise independent `(<= s)`-separations, or 1 when
/// there are none. Separations are taken in both orientations.
pub fn flap_number(h: &Graph, s: usize) -> Result<FlapResult> {
    let seps = enumerate_separations(h, s)?;
    if seps.is_empty() {
        return Ok(FlapResult {
            value: 1,
            witness: Vec::new(),
        });
    }
    // independence only looks at (E(A), V(A)\V(B)); keep one separation per
    // such pair, and only pairs not dominated by a smaller one
    let mut flaps: Vec<(EdgeSet, VertexSet, Separation)> = Vec::new();
    let mut seen = BTreeSet::new();
    for sep in seps.iter().flat_map(|x| [x.clone(), x.swapped()]) {
        let key = (sep.a_edges.iter().copied().collect::<BTreeSet<_>>(), sep.a_interior());
        if seen.insert(key.clone()) {
            flaps.push((key.0, key.1, sep));
        }
    }
    let dominated = |i: usize| {
        flaps.iter().enumerate().any(|(j, other)| {
            j != i
                && other.0.is_subset(&flaps[i].0)
                && other.1.is_subset(&flaps[i].1)
                && (other.0 != flaps[i].0 || other.1 != flaps[i].1)
        })
    };
    let minimal: Vec<usize> = (0..flaps.len()).filter(|&i| !dominated(i)).collect();
    let chosen = max_clique(minimal.len(), |a, b| independent(&flaps[minimal[a]].2, &flaps[minimal[b]].2));
    let witness: Vec<Separation> = chosen.iter().map(|&c| flaps[minimal[c]].2.clone()).collect();
    Ok(FlapResult {
        value: witness.len(),
        witness,
    })
}
