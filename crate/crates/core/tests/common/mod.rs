//! Independent oracles and seeded generators shared by the integration
//! tests. Nothing here calls the library routine it is used to check.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use treedens::shortcuts::{validate_shortcut_system, ShortcutSystem};
use treedens::{Forest, Graph, Vertex};

/// Largest stable set among vertices of degree at most `s`, by walking
/// every stable subset of those vertices.
pub fn oracle_alpha(t: &Forest, s: usize) -> usize {
    fn walk(g: &Graph, cand: &[Vertex], i: usize, chosen: &mut Vec<Vertex>, best: &mut usize) {
        if chosen.len() + (cand.len() - i) <= *best {
            return;
        }
        if i == cand.len() {
            *best = chosen.len();
            return;
        }
        let v = cand[i];
        if chosen.iter().all(|&u| !g.has_edge(u, v)) {
            chosen.push(v);
            walk(g, cand, i + 1, chosen, best);
            chosen.pop();
        }
        walk(g, cand, i + 1, chosen, best);
    }
    let g = t.graph();
    let cand: Vec<Vertex> = (0..g.n()).filter(|&v| g.degree(v) <= s).collect();
    let mut best = 0;
    walk(g, &cand, 0, &mut Vec::new(), &mut best);
    best
}

/// Whether `g` has a `(p,q)`-model of `K_{s,t}`, by trying every labelling
/// of the vertices with "unused" or one of the `s + t` branch sets.
pub fn brute_model_exists(g: &Graph, s: usize, t: usize, p: usize, q: usize) -> bool {
    let n = g.n();
    let labels = s + t + 1;
    let total = (labels as u64).pow(n as u32);
    let mut lab = vec![0usize; n];
    for _ in 0..total {
        if labelling_is_model(g, &lab, s, t, p, q) {
            return true;
        }
        for d in lab.iter_mut() {
            *d += 1;
            if *d < labels {
                break;
            }
            *d = 0;
        }
    }
    false
}

fn labelling_is_model(g: &Graph, lab: &[usize], s: usize, t: usize, p: usize, q: usize) -> bool {
    let sets: Vec<Vec<Vertex>> = (1..=s + t)
        .map(|b| (0..lab.len()).filter(|&v| lab[v] == b).collect())
        .collect();
    for (i, set) in sets.iter().enumerate() {
        let cap = if i < s { p } else { q };
        if set.is_empty() || set.len() > cap || !connected(g, set) {
            return false;
        }
    }
    sets[..s].iter().all(|x| {
        sets[s..]
            .iter()
            .all(|y| x.iter().any(|&a| y.iter().any(|&b| g.has_edge(a, b))))
    })
}

fn connected(g: &Graph, set: &[Vertex]) -> bool {
    let mut seen = vec![set[0]];
    let mut i = 0;
    while i < seen.len() {
        let v = seen[i];
        for &w in g.neighbors(v) {
            if set.contains(&w) && !seen.contains(&w) {
                seen.push(w);
            }
        }
        i += 1;
    }
    seen.len() == set.len()
}

/// `G^(d)` straight from the definition.
pub fn oracle_low_degree_square(g: &Graph, d: usize) -> Graph {
    let mut edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    for v in 0..g.n() {
        if g.degree(v) <= d {
            for &a in g.neighbors(v) {
                for &b in g.neighbors(v) {
                    if a < b {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    Graph::simplified(g.n(), edges)
}

/// A random simple path with `len` edges, if the walk does not get stuck.
fn random_path<R: Rng>(rng: &mut R, g: &Graph, len: usize) -> Option<Vec<Vertex>> {
    let mut path = vec![rng.gen_range(0..g.n())];
    while path.len() <= len {
        let last = *path.last().unwrap();
        let next: Vec<Vertex> = g.neighbors(last).iter().copied().filter(|w| !path.contains(w)).collect();
        path.push(*next.choose(rng)?);
    }
    Some(path)
}

/// Random shortcut paths of 2 to `k` edges, kept while the system stays a
/// `(k, d_star)*` system.
pub fn random_shortcut_system<R: Rng>(rng: &mut R, base: &Graph, k: usize, d_star: usize) -> ShortcutSystem {
    let mut paths: Vec<Vec<Vertex>> = Vec::new();
    if base.n() == 0 || k < 2 {
        return ShortcutSystem::new(base.clone(), paths).unwrap();
    }
    for _ in 0..rng.gen_range(1..=3 * base.n()) {
        let len = rng.gen_range(2..=k);
        let Some(p) = random_path(rng, base, len) else {
            continue;
        };
        paths.push(p);
        let sys = ShortcutSystem::new(base.clone(), paths.clone()).unwrap();
        let prof = validate_shortcut_system(&sys).unwrap();
        if prof.max_m_set > d_star {
            paths.pop();
        }
    }
    ShortcutSystem::new(base.clone(), paths).unwrap()
}
