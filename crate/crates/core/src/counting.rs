//! Exact counting and enumeration of images (injective edge-preserving
//! maps) and copies of a forest pattern in a host graph.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{automorphism_count, Forest};
use crate::graph::{Graph, Vertex};

/// An image of a pattern: `assignment[x]` is the host vertex of pattern
/// vertex `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    pub assignment: Vec<Vertex>,
}

impl Embedding {
    pub fn pattern_size(&self) -> usize {
        self.assignment.len()
    }

    pub fn image_of(&self, x: Vertex) -> Vertex {
        self.assignment[x]
    }

    /// Checks injectivity and edge preservation.
    pub fn is_valid(&self, pattern: &Graph, host: &Graph) -> bool {
        if self.assignment.len() != pattern.n() || self.assignment.iter().any(|&v| v >= host.n()) {
            return false;
        }
        let mut sorted = self.assignment.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        pattern
            .edges()
            .all(|(u, v)| host.has_edge(self.assignment[u], self.assignment[v]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub images: BigUint,
    pub copies: BigUint,
    pub automorphisms: BigUint,
    /// Set when a limit stopped the search; counts are then lower bounds.
    pub truncated: bool,
}

/// Pattern vertex order for the backtracker: components largest first, each
/// explored breadth-first from a maximum-degree root.
#[derive(Debug, Clone)]
struct SearchPlan {
    order: Vec<Vertex>,
    /// Position (in `order`) of the already-placed neighbour that anchors
    /// each step, `None` for component roots.
    anchor: Vec<Option<usize>>,
    /// Further already-placed neighbours that must also be adjacent.
    checks: Vec<Vec<usize>>,
}

impl SearchPlan {
    fn new(t: &Graph) -> Self {
        let mut comps = t.components();
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut pos = vec![usize::MAX; t.n()];
        let mut order = Vec::with_capacity(t.n());
        for comp in &comps {
            let root = *comp
                .iter()
                .max_by(|&&a, &&b| t.degree(a).cmp(&t.degree(b)).then(b.cmp(&a)))
                .expect("components are non-empty");
            let start = order.len();
            pos[root] = order.len();
            order.push(root);
            let mut i = start;
            while i < order.len() {
                let v = order[i];
                i += 1;
                for &w in t.neighbors(v) {
                    if pos[w] == usize::MAX {
                        pos[w] = order.len();
                        order.push(w);
                    }
                }
            }
        }
        let mut anchor = Vec::with_capacity(order.len());
        let mut checks = Vec::with_capacity(order.len());
        for (i, &v) in order.iter().enumerate() {
            let mut earlier: Vec<usize> = t
                .neighbors(v)
                .iter()
                .map(|&w| pos[w])
                .filter(|&p| p < i)
                .collect();
            earlier.sort_unstable();
            anchor.push(earlier.first().copied());
            checks.push(earlier.into_iter().skip(1).collect());
        }
        SearchPlan {
            order,
            anchor,
            checks,
        }
    }
}

struct Search<'a> {
    plan: &'a SearchPlan,
    host: &'a Graph,
    used: Vec<bool>,
    placed: Vec<Vertex>,
}

impl<'a> Search<'a> {
    fn new(plan: &'a SearchPlan, host: &'a Graph) -> Self {
        Search {
            plan,
            host,
            used: vec![false; host.n()],
            placed: Vec::with_capacity(plan.order.len()),
        }
    }

    fn fits(&self, depth: usize, v: Vertex) -> bool {
        !self.used[v]
            && self.plan.checks[depth]
                .iter()
                .all(|&p| self.host.has_edge(self.placed[p], v))
    }

    /// Calls `visit` for candidate host vertices at `depth`; stops early
    /// when `visit` returns false.
    fn each_candidate(&self, depth: usize, mut visit: impl FnMut(Vertex) -> bool) {
        if let Some(p) = self.plan.anchor[depth] {
            let host = self.host;
            for &v in host.neighbors(self.placed[p]) {
                if self.fits(depth, v) && !visit(v) {
                    return;
                }
            }
        } else {
            for v in 0..self.host.n() {
                if self.fits(depth, v) && !visit(v) {
                    return;
                }
            }
        }
    }

    fn count_from(&mut self, depth: usize, total: &mut u128, limit: u128) {
        let h = self.plan.order.len();
        if depth == h {
            *total += 1;
            return;
        }
        if depth + 1 == h {
            let mut c = 0u128;
            self.each_candidate(depth, |_| {
                c += 1;
                true
            });
            *total += c;
            return;
        }
        let mut cands = Vec::new();
        self.each_candidate(depth, |v| {
            cands.push(v);
            true
        });
        for v in cands {
            if *total >= limit {
                return;
            }
            self.used[v] = true;
            self.placed.push(v);
            self.count_from(depth + 1, total, limit);
            self.placed.pop();
            self.used[v] = false;
        }
    }

    fn enumerate_from(&mut self, depth: usize, out: &mut Vec<Embedding>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        let h = self.plan.order.len();
        if depth == h {
            let mut assignment = vec![0; h];
            for (i, &x) in self.plan.order.iter().enumerate() {
                assignment[x] = self.placed[i];
            }
            out.push(Embedding { assignment });
            return;
        }
        let mut cands = Vec::new();
        self.each_candidate(depth, |v| {
            cands.push(v);
            true
        });
        for v in cands {
            if out.len() >= cap {
                return;
            }
            self.used[v] = true;
            self.placed.push(v);
            self.enumerate_from(depth + 1, out, cap);
            self.placed.pop();
            self.used[v] = false;
        }
    }
}

/// Counting options beyond the pattern and host.
#[derive(Debug, Clone, Default)]
pub struct CountOptions {
    /// Stop once this many images are found.
    pub limit: Option<BigUint>,
    /// Worker threads for the root split; `None` or `Some(1)` is sequential.
    pub threads: Option<usize>,
}

/// `I(T, G)`, optionally truncated at `limit`.
pub fn count_images(t: &Forest, g: &Graph, limit: Option<&BigUint>) -> CountReport {
    count_images_with(
        t,
        g,
        &CountOptions {
            limit: limit.cloned(),
            threads: None,
        },
    )
}

fn image_total(t: &Forest, g: &Graph, opts: &CountOptions) -> (u128, bool) {
    let plan = SearchPlan::new(t.graph());
    let limit = opts
        .limit
        .as_ref()
        .map_or(u128::MAX, |l| l.to_u128().unwrap_or(u128::MAX));
    let h = plan.order.len();
    let threads = opts.threads.unwrap_or(1);
    if h < 2 || threads <= 1 || opts.limit.is_some() {
        let mut total = 0u128;
        Search::new(&plan, g).count_from(0, &mut total, limit);
        return (total.min(limit), total >= limit && limit != u128::MAX);
    }
    let work = || {
        (0..g.n())
            .into_par_iter()
            .map(|root| {
                let mut s = Search::new(&plan, g);
                s.used[root] = true;
                s.placed.push(root);
                let mut total = 0u128;
                s.count_from(1, &mut total, u128::MAX);
                total
            })
            .sum::<u128>()
    };
    let total = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    (total, false)
}

pub fn count_images_with(t: &Forest, g: &Graph, opts: &CountOptions) -> CountReport {
    let (images, truncated) = image_total(t, g, opts);
    let automorphisms = automorphism_count(t);
    let images = BigUint::from(images);
    let copies = &images / &automorphisms;
    CountReport {
        images,
        copies,
        automorphisms,
        truncated,
    }
}

/// `C(T, G)` as images divided by `|Aut(T)|`. A non-zero remainder means the
/// counter or the automorphism code is broken and is reported as a defect.
pub fn count_copies(t: &Forest, g: &Graph) -> Result<CountReport> {
    count_copies_with(t, g, &CountOptions::default())
}

pub fn count_copies_with(t: &Forest, g: &Graph, opts: &CountOptions) -> Result<CountReport> {
    let report = count_images_with(t, g, opts);
    if !report.truncated && !(&report.images % &report.automorphisms).is_zero() {
        return Err(Error::Defect(format!(
            "{} images are not divisible by {} automorphisms",
            report.images, report.automorphisms
        )));
    }
    Ok(report)
}

/// The first `cap` images in backtracking order.
pub fn enumerate_images(t: &Forest, g: &Graph, cap: usize) -> Vec<Embedding> {
    let plan = SearchPlan::new(t.graph());
    let mut out = Vec::new();
    if cap > 0 {
        Search::new(&plan, g).enumerate_from(0, &mut out, cap);
    }
    out
}

/// Largest `|V(G)|^|V(T)|` the exhaustive oracle will walk.
pub const ORACLE_GUARD: u128 = 100_000_000;

/// `I(T, G)` by checking every ordered tuple of host vertices. Shares no
/// code with the backtracker.
pub fn oracle_count_images(t: &Forest, g: &Graph) -> Result<BigUint> {
    let h = t.n() as u32;
    let n = g.n() as u128;
    let space = n.checked_pow(h).filter(|&s| s <= ORACLE_GUARD).ok_or_else(|| {
        Error::Capacity(format!("{n}^{h} tuples exceed the oracle guard of {ORACLE_GUARD}"))
    })?;
    let edges: Vec<(usize, usize)> = t.edges().collect();
    let mut count = 0u64;
    let mut tuple = vec![0usize; h as usize];
    for _ in 0..space {
        let mut injective = true;
        'outer: for i in 0..tuple.len() {
            for j in 0..i {
                if tuple[i] == tuple[j] {
                    injective = false;
                    break 'outer;
                }
            }
        }
        if injective && edges.iter().all(|&(a, b)| g.has_edge(tuple[a], tuple[b])) {
            count += 1;
        }
        // odometer increment
        for digit in tuple.iter_mut() {
            *digit += 1;
            if *digit < g.n() {
                break;
            }
            *digit = 0;
        }
    }
    Ok(BigUint::from(count))
}
