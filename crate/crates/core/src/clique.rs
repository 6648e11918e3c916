//! Exact maximum clique by branch and bound with greedy-colouring bounds.
//! Used for maximum coherent subfamilies (cliques in the non-conflict graph)
//! and for the flap number (cliques in the independence graph).

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                (word != 0).then(|| {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    w * 64 + b
                })
            })
        })
    }
}

struct Solver {
    adj: Vec<Bits>,
    /// search position -> original vertex (degree-descending)
    best: Vec<usize>,
    current: Vec<usize>,
}

impl Solver {
    fn colour_order(&self, p: &Bits) -> Vec<(usize, usize)> {
        let mut uncoloured = p.clone();
        let mut out = Vec::new();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut avail = uncoloured.clone();
            loop {
                let Some(v) = avail.ones().next() else { break };
                avail.clear(v);
                uncoloured.clear(v);
                for u in self.adj[v].ones() {
                    avail.clear(u);
                }
                out.push((v, colour));
            }
        }
        out
    }

    fn expand(&mut self, mut p: Bits) {
        let order = self.colour_order(&p);
        for &(v, colour) in order.iter().rev() {
            if self.current.len() + colour <= self.best.len() {
                return;
            }
            self.current.push(v);
            let next = p.and(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            p.clear(v);
        }
    }
}

/// A maximum clique of the graph on `0..n` given by `adjacent`, returned
/// sorted. Deterministic for a given input.
pub fn max_clique(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let mut raw = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if adjacent(u, v) {
                raw[u].push(v);
                raw[v].push(u);
            }
        }
    }
    // relabel by non-increasing degree so colouring sees hubs first
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| raw[b].len().cmp(&raw[a].len()).then(a.cmp(&b)));
    let mut pos = vec![0; n];
    for (i, &v) in perm.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj = vec![Bits::new(n); n];
    for (u, list) in raw.iter().enumerate() {
        for &v in list {
            adj[pos[u]].set(pos[v]);
        }
    }
    let mut all = Bits::new(n);
    for i in 0..n {
        all.set(i);
    }
    let mut solver = Solver {
        adj,
        best: vec![0],
        current: Vec::new(),
    };
    solver.expand(all);
    let mut out: Vec<usize> = solver.best.iter().map(|&i| perm[i]).collect();
    out.sort_unstable();
    debug_assert!(out.iter().all(|&u| out.iter().all(|&v| u == v || solver.adj[pos[u]].get(pos[v]))));
    out
}
