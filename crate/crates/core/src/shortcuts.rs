//! Shortcut systems: sets of paths whose endpoint pairs are added as edges.
//! Includes the low-degree square `G^(d)` and the transfer of small
//! complete-bipartite models from the expanded graph back to the base.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortcutSystem {
    base: Graph,
    paths: Vec<Vec<Vertex>>,
}

/// `{"paths": [[v0, v1, ...], ...]}`; the base graph travels separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortcutSystemJson {
    pub paths: Vec<Vec<Vertex>>,
}

impl ShortcutSystem {
    /// Every sequence must be a path of length at least one in `base`.
    pub fn new(base: Graph, paths: Vec<Vec<Vertex>>) -> Result<Self> {
        for (i, p) in paths.iter().enumerate() {
            if p.len() < 2 {
                return Err(Error::Validation(format!("shortcut #{i} has fewer than two vertices")));
            }
            if let Some(w) = p.windows(2).find(|w| !base.has_edge(w[0], w[1])) {
                return Err(Error::Validation(format!(
                    "shortcut #{i} steps along {}{} which is not a base edge",
                    w[0], w[1]
                )));
            }
            let distinct: BTreeSet<_> = p.iter().collect();
            if distinct.len() != p.len() {
                return Err(Error::Validation(format!("shortcut #{i} repeats a vertex")));
            }
        }
        Ok(ShortcutSystem { base, paths })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn paths(&self) -> &[Vec<Vertex>] {
        &self.paths
    }

    pub fn to_json(&self) -> ShortcutSystemJson {
        ShortcutSystemJson {
            paths: self.paths.clone(),
        }
    }

    /// `M_v`: endpoints of shortcuts that pass through `v` internally.
    pub fn m_sets(&self) -> Vec<VertexSet> {
        let mut sets = vec![BTreeSet::new(); self.base.n()];
        for p in &self.paths {
            let (a, b) = (p[0], p[p.len() - 1]);
            for &v in &p[1..p.len() - 1] {
                sets[v].insert(a);
                sets[v].insert(b);
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// The path realising `G^P` edge `uv`: the base edge itself when there
    /// is one, otherwise the first shortcut with those endpoints.
    fn realiser(&self) -> HashMap<(Vertex, Vertex), Vec<Vertex>> {
        let mut map = HashMap::new();
        for (u, v) in self.base.edges() {
            map.insert((u, v), vec![u, v]);
        }
        for p in &self.paths {
            let (a, b) = (p[0], p[p.len() - 1]);
            map.entry((a.min(b), a.max(b))).or_insert_with(|| p.clone());
        }
        map
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortcutProfile {
    /// Longest shortcut, in edges.
    pub max_length: usize,
    /// Most shortcuts through one vertex internally.
    pub max_internal_load: usize,
    /// Largest `|M_v|`.
    pub max_m_set: usize,
}

pub fn validate_shortcut_system(sys: &ShortcutSystem) -> Result<ShortcutProfile> {
    let sys = ShortcutSystem::new(sys.base.clone(), sys.paths.clone())?;
    let mut load = vec![0usize; sys.base.n()];
    for p in &sys.paths {
        for &v in &p[1..p.len() - 1] {
            load[v] += 1;
        }
    }
    Ok(ShortcutProfile {
        max_length: sys.paths.iter().map(|p| p.len() - 1).max().unwrap_or(0),
        max_internal_load: load.into_iter().max().unwrap_or(0),
        max_m_set: sys.m_sets().iter().map(VertexSet::len).max().unwrap_or(0),
    })
}

/// `G^P`: the base plus an edge between the ends of every shortcut.
pub fn expand(sys: &ShortcutSystem) -> Graph {
    let extra = sys.paths.iter().map(|p| (p[0], p[p.len() - 1]));
    Graph::simplified(sys.base.n(), sys.base.edges().chain(extra).collect::<Vec<_>>())
}

/// `G^(d)`: a clique on `N(v)` for every vertex of degree at most `d`, with
/// the `(2,d)*` system of paths `u v w` that produces it.
pub fn build_low_degree_square(g: &Graph, d: usize) -> (Graph, ShortcutSystem) {
    let mut paths = Vec::new();
    for v in 0..g.n() {
        if g.degree(v) > d {
            continue;
        }
        let nb = g.neighbors(v);
        for (i, &u) in nb.iter().enumerate() {
            for &w in &nb[i + 1..] {
                paths.push(vec![u, v, w]);
            }
        }
    }
    let sys = ShortcutSystem::new(g.clone(), paths).expect("neighbour paths lie in g");
    (expand(&sys), sys)
}

/// Branch sets `X_1..X_s` (left) and `Y_1..Y_t` (right).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteModel {
    pub left: Vec<VertexSet>,
    pub right: Vec<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelCheck {
    pub valid: bool,
    pub violation: Option<String>,
}

/// Checks that `model` is a `(p,q)`-model of `K_{s,t}` in `g`.
pub fn verify_model(g: &Graph, model: &BipartiteModel, s: usize, t: usize, p: usize, q: usize) -> ModelCheck {
    let fail = |msg: String| ModelCheck {
        valid: false,
        violation: Some(msg),
    };
    if model.left.len() != s || model.right.len() != t {
        return fail(format!(
            "model has {}+{} branch sets, expected {s}+{t}",
            model.left.len(),
            model.right.len()
        ));
    }
    let mut owner = vec![None; g.n()];
    let sides = model
        .left
        .iter()
        .map(|b| (b, p, "left"))
        .chain(model.right.iter().map(|b| (b, q, "right")));
    for (idx, (set, cap, side)) in sides.enumerate() {
        if set.is_empty() {
            return fail(format!("{side} branch set #{idx} is empty"));
        }
        if set.len() > cap {
            return fail(format!("{side} branch set #{idx} has {} > {cap} vertices", set.len()));
        }
        for v in set.iter() {
            if v >= g.n() {
                return fail(format!("branch set #{idx} names vertex {v} outside the graph"));
            }
            if let Some(prev) = owner[v] {
                return fail(format!("vertex {v} lies in branch sets #{prev} and #{idx}"));
            }
            owner[v] = Some(idx);
        }
        if !g.is_connected_subset(set.as_slice()) {
            return fail(format!("{side} branch set #{idx} is not connected"));
        }
    }
    for (i, x) in model.left.iter().enumerate() {
        for (j, y) in model.right.iter().enumerate() {
            let touching = x.iter().any(|a| y.iter().any(|b| g.has_edge(a, b)));
            if !touching {
                return fail(format!("no edge between X{} and Y{}", i + 1, j + 1));
            }
        }
    }
    ModelCheck {
        valid: true,
        violation: None,
    }
}

/// Left and right sizes a model in `G^P` needs for the transfer to produce
/// a model of `K_{s,t}`.
pub fn transfer_requirements(s: usize, t: usize, p: usize, q: usize, k: usize, d: usize) -> (usize, usize) {
    let km = k.saturating_sub(1);
    let s_prime = (d * km * (p - 1) + 1) * (s - 1) + 1;
    let t_prime = (2 * d * km * (s + q - 1) + 1) * (t - 1) + 1 + s * d * (p + km * (p - 1));
    (s_prime, t_prime)
}

/// Branch-set caps of the transferred model: `(p + (k-1)(p-1), q + (k-1)(s+q-1))`.
pub fn transfer_output_caps(s: usize, p: usize, q: usize, k: usize) -> (usize, usize) {
    let km = k.saturating_sub(1);
    (p + km * (p - 1), q + km * (s + q - 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReport {
    pub model: BipartiteModel,
    pub s_prime: usize,
    pub t_prime: usize,
    pub out_p: usize,
    pub out_q: usize,
    /// The right-side cap `q + k(s+q-1)` the longer argument ends with; it
    /// is never smaller than `out_q`.
    pub out_q_alternative: usize,
    /// Left branch sets of the input that were kept, by index.
    pub kept_left: Vec<usize>,
    pub kept_right: Vec<usize>,
}

/// Spanning tree edges of `set` inside `g` by BFS from its smallest vertex.
fn spanning_tree(g: &Graph, set: &VertexSet) -> Vec<(Vertex, Vertex)> {
    let mut edges = Vec::new();
    let Some(start) = set.iter().next() else {
        return edges;
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if set.contains(w) && seen.insert(w) {
                edges.push((v, w));
                queue.push_back(w);
            }
        }
    }
    edges
}

/// Greedy stable set: take a minimum-degree vertex, drop its closed
/// neighbourhood, repeat. Ties go to the smallest index.
fn greedy_stable(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut alive = vec![true; n];
    let mut chosen = Vec::new();
    loop {
        let pick = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| ((0..n).filter(|&w| w != v && alive[w] && adjacent(v, w)).count(), v));
        let Some(v) = pick else {
            break;
        };
        chosen.push(v);
        alive[v] = false;
        for (w, a) in alive.iter_mut().enumerate() {
            if *a && adjacent(v, w) {
                *a = false;
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

fn internals(path: &[Vertex]) -> impl Iterator<Item = Vertex> + '_ {
    path[1..path.len() - 1].iter().copied()
}

/// Pulls a `(p,q)`-model of `K_{s',t'}` in `G^P` back to a model of
/// `K_{s,t}` in the base graph with caps from [`transfer_output_caps`].
#[allow(clippy::too_many_arguments)]
pub fn transfer_model(
    sys: &ShortcutSystem,
    model: &BipartiteModel,
    s: usize,
    t: usize,
    p: usize,
    q: usize,
    k: usize,
    d: usize,
) -> Result<TransferReport> {
    if s == 0 || t == 0 || p == 0 || q == 0 || k == 0 {
        return Err(Error::Domain("s, t, p, q and k must be positive".into()));
    }
    let profile = validate_shortcut_system(sys)?;
    if profile.max_length > k || profile.max_m_set > d {
        return Err(Error::Domain(format!(
            "system has length {} and |M_v| up to {}, not a ({k},{d})* system",
            profile.max_length, profile.max_m_set
        )));
    }
    let (s_prime, t_prime) = transfer_requirements(s, t, p, q, k, d);
    let expanded = expand(sys);
    let check = verify_model(&expanded, model, model.left.len(), model.right.len(), p, q);
    if !check.valid {
        return Err(Error::Domain(format!(
            "input is not a ({p},{q})-model in G^P: {}",
            check.violation.unwrap_or_default()
        )));
    }
    if model.left.len() < s_prime || model.right.len() < t_prime {
        return Err(Error::Domain(format!(
            "need a model of K_{{{s_prime},{t_prime}}}, got K_{{{},{}}}",
            model.left.len(),
            model.right.len()
        )));
    }
    let realise = sys.realiser();
    let path_of = |u: Vertex, v: Vertex| -> &Vec<Vertex> {
        realise
            .get(&(u.min(v), u.max(v)))
            .expect("every G^P edge has a realising path")
    };

    // augment left branch sets with the internals of their tree edges
    let x_hat: Vec<VertexSet> = model
        .left
        .iter()
        .map(|x| {
            let extra = spanning_tree(&expanded, x)
                .into_iter()
                .flat_map(|(u, v)| internals(path_of(u, v)).collect::<Vec<_>>());
            x.iter().chain(extra).collect()
        })
        .collect();
    let kept_left: Vec<usize> = greedy_stable(x_hat.len(), |a, b| !x_hat[a].is_disjoint(&x_hat[b]))
        .into_iter()
        .take(s)
        .collect();
    if kept_left.len() < s {
        return Err(Error::Defect(format!(
            "left overlap graph gave a stable set of {} < {s}",
            kept_left.len()
        )));
    }
    let covered: VertexSet = kept_left.iter().flat_map(|&i| x_hat[i].iter()).collect();
    let m_sets = sys.m_sets();
    let forbidden: VertexSet = covered
        .iter()
        .flat_map(|x| m_sets[x].iter())
        .chain(covered.iter())
        .collect();

    let survivors: Vec<usize> = (0..model.right.len())
        .filter(|&j| model.right[j].is_disjoint(&forbidden))
        .collect();
    let y_hat: Vec<VertexSet> = survivors
        .iter()
        .map(|&j| {
            let y = &model.right[j];
            let mut extra: Vec<Vertex> = spanning_tree(&expanded, y)
                .into_iter()
                .flat_map(|(u, v)| internals(path_of(u, v)).collect::<Vec<_>>())
                .collect();
            for &i in &kept_left {
                let link = model.left[i]
                    .iter()
                    .flat_map(|x| y.iter().map(move |w| (x, w)))
                    .find(|&(x, w)| expanded.has_edge(x, w))
                    .expect("model has all cross edges");
                extra.extend(internals(path_of(link.0, link.1)));
            }
            y.iter().chain(extra).collect()
        })
        .collect();
    let kept_right: Vec<usize> = greedy_stable(y_hat.len(), |a, b| !y_hat[a].is_disjoint(&y_hat[b]))
        .into_iter()
        .take(t)
        .collect();
    if kept_right.len() < t {
        return Err(Error::Defect(format!(
            "right overlap graph gave a stable set of {} < {t} from {} survivors",
            kept_right.len(),
            survivors.len()
        )));
    }

    let out = BipartiteModel {
        left: kept_left.iter().map(|&i| x_hat[i].clone()).collect(),
        right: kept_right.iter().map(|&j| y_hat[j].clone()).collect(),
    };
    let (out_p, out_q) = transfer_output_caps(s, p, q, k);
    let check = verify_model(&sys.base, &out, s, t, out_p, out_q);
    if !check.valid {
        return Err(Error::Defect(format!(
            "transferred model failed verification: {}",
            check.violation.unwrap_or_default()
        )));
    }
    Ok(TransferReport {
        model: out,
        s_prime,
        t_prime,
        out_p,
        out_q,
        out_q_alternative: q + k * (s + q - 1),
        kept_left,
        kept_right: kept_right.iter().map(|&j| survivors[j]).collect(),
    })
}
