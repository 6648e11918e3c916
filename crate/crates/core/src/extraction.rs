//! Turning many images of a forest into a `⊕U^{s,t}` subgraph of the host.
//!
//! The pipeline buckets images by where they send a fixed vertex/edge cover
//! of the low-degree subforest, extracts a coherent subfamily, finds a
//! sunflower among the image vertex sets, and reads the gadget off the
//! sunflower's petals and kernel.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::clique::max_clique;
use crate::constructions::{build_gadget, Gadget, GadgetLabel};
use crate::counting::Embedding;
use crate::error::{Error, Result};
use crate::forest::{alpha_s, low_degree_subforest, mixed_cover, Forest};
use crate::graph::{Density, Graph, Vertex, VertexSet};

/// Largest image collection the exact coherent-subfamily search accepts.
pub const COHERENCE_GUARD: usize = 200;

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// `h!^2 t^h`: any collection this large contains a coherent subfamily of
/// size `t`.
pub fn coherence_threshold(h: usize, t: &BigUint) -> BigUint {
    let f = factorial(h);
    &f * &f * t.pow(h as u32)
}

/// `h! (t-1)^h + 1`: any family of this many `h`-sets has a `t`-sunflower.
pub fn sunflower_threshold(h: usize, t: usize) -> BigUint {
    factorial(h) * BigUint::from(t.saturating_sub(1)).pow(h as u32) + 1u32
}

/// Which pairs of images break coherence: some pattern vertex `x` of one
/// lands where a different pattern vertex `y` of the other does.
pub fn conflict_pairs(images: &[Embedding]) -> Result<Vec<(usize, usize)>> {
    if let Some(first) = images.first() {
        if let Some(bad) = images.iter().position(|e| e.pattern_size() != first.pattern_size()) {
            return Err(Error::Domain(format!(
                "image #{bad} has {} pattern vertices, image #0 has {}",
                images[bad].pattern_size(),
                first.pattern_size()
            )));
        }
    }
    let inverse: Vec<HashMap<Vertex, Vertex>> = images
        .iter()
        .map(|e| e.assignment.iter().enumerate().map(|(x, &v)| (v, x)).collect())
        .collect();
    let mut out = Vec::new();
    for (i, inv) in inverse.iter().enumerate() {
        for (j, other) in images.iter().enumerate().skip(i + 1) {
            let clash = other
                .assignment
                .iter()
                .enumerate()
                .any(|(y, v)| inv.get(v).is_some_and(|&x| x != y));
            if clash {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

fn largest_coherent(images: &[Embedding]) -> Result<Vec<usize>> {
    if images.len() > COHERENCE_GUARD {
        return Err(Error::Capacity(format!(
            "{} images exceed the coherent-search guard of {COHERENCE_GUARD}",
            images.len()
        )));
    }
    let n = images.len();
    let mut conflict = vec![vec![false; n]; n];
    for (i, j) in conflict_pairs(images)? {
        conflict[i][j] = true;
        conflict[j][i] = true;
    }
    Ok(max_clique(n, |a, b| !conflict[a][b]))
}

/// A maximum coherent subfamily, if it has at least `t` members.
pub fn coherent_subfamily(images: &[Embedding], t: usize) -> Result<Option<Vec<usize>>> {
    let best = largest_coherent(images)?;
    Ok((best.len() >= t).then_some(best))
}

/// Distinct sets of one common size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFamily {
    sets: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn new(sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut normalized: Vec<Vec<usize>> = Vec::with_capacity(sets.len());
        for (i, mut s) in sets.into_iter().enumerate() {
            let len = s.len();
            s.sort_unstable();
            s.dedup();
            if s.len() != len {
                return Err(Error::Validation(format!("set #{i} repeats an element")));
            }
            normalized.push(s);
        }
        if let Some(first) = normalized.first() {
            if let Some(i) = normalized.iter().position(|s| s.len() != first.len()) {
                return Err(Error::Validation(format!(
                    "set #{i} has {} elements, expected {}",
                    normalized[i].len(),
                    first.len()
                )));
            }
        }
        let mut sorted = normalized.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("family contains a repeated set".into()));
        }
        Ok(SetFamily { sets: normalized })
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sunflower {
    pub kernel: Vec<usize>,
    pub member_indices: Vec<usize>,
}

impl Sunflower {
    /// Every two members meet exactly in the kernel.
    pub fn is_valid_for(&self, family: &SetFamily) -> bool {
        let members: Vec<&Vec<usize>> = self
            .member_indices
            .iter()
            .filter_map(|&i| family.sets.get(i))
            .collect();
        if members.len() != self.member_indices.len() {
            return false;
        }
        let mut idx = self.member_indices.clone();
        idx.sort_unstable();
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        members.iter().enumerate().all(|(a, x)| {
            members[a + 1..].iter().all(|y| {
                let meet: Vec<usize> = x.iter().copied().filter(|e| y.binary_search(e).is_ok()).collect();
                meet == self.kernel
            })
        })
    }
}

fn sunflower_rec(sets: &[(usize, Vec<usize>)], t: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut used: Vec<usize> = Vec::new();
    let mut disjoint = Vec::new();
    for (idx, s) in sets {
        if s.iter().all(|e| !used.contains(e)) {
            used.extend(s);
            disjoint.push(*idx);
            if disjoint.len() == t {
                return Some((Vec::new(), disjoint));
            }
        }
    }
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for (_, s) in sets {
        for &e in s {
            *freq.entry(e).or_default() += 1;
        }
    }
    // most frequent element, smallest on ties
    let (&pick, _) = freq.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))?;
    let link: Vec<(usize, Vec<usize>)> = sets
        .iter()
        .filter(|(_, s)| s.contains(&pick))
        .map(|(i, s)| (*i, s.iter().copied().filter(|&e| e != pick).collect()))
        .collect();
    let (mut kernel, members) = sunflower_rec(&link, t)?;
    kernel.push(pick);
    Some((kernel, members))
}

/// Erdős–Rado extraction: a maximal disjoint subfamily if it is big enough,
/// otherwise recurse into the link of the most frequent element. Always
/// succeeds once `family.len() >= sunflower_threshold(h, t)`.
pub fn find_sunflower(family: &SetFamily, t: usize) -> Result<Option<Sunflower>> {
    if t < 2 {
        return Err(Error::Domain("a sunflower needs t >= 2".into()));
    }
    let indexed: Vec<(usize, Vec<usize>)> = family.sets.iter().cloned().enumerate().collect();
    let Some((mut kernel, mut members)) = sunflower_rec(&indexed, t) else {
        return Ok(None);
    };
    kernel.sort_unstable();
    members.sort_unstable();
    let flower = Sunflower {
        kernel,
        member_indices: members,
    };
    if !flower.is_valid_for(family) {
        return Err(Error::Defect(format!("extracted sunflower {flower:?} is invalid")));
    }
    Ok(Some(flower))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Bucketing,
    Coherence,
    Sunflower,
    Kernel,
    Assembly,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Bucketing => "bucketing",
            Stage::Coherence => "coherent subfamily",
            Stage::Sunflower => "sunflower",
            Stage::Kernel => "kernel component",
            Stage::Assembly => "witness assembly",
        };
        f.write_str(name)
    }
}

/// Sizes seen at each stage, for reporting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub images: usize,
    pub buckets: usize,
    pub bucket_size: usize,
    pub coherent_size: usize,
    pub sunflower_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagedFailure {
    pub stage: Stage,
    pub required: usize,
    pub available: usize,
    pub detail: String,
    pub trace: PipelineTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessResult {
    /// The component `U` of `T - K`, relabelled to `0..|U|`.
    pub subtree: Forest,
    /// Pattern vertex behind each vertex of `subtree`.
    pub subtree_vertices: Vec<Vertex>,
    pub kernel_preimage: VertexSet,
    /// Host vertices shared by every selected image.
    pub kernel: VertexSet,
    /// `⊕U^{s,t}` built on `subtree`.
    pub gadget: Gadget,
    /// `embedding[x]` is the host vertex of gadget vertex `x`.
    pub embedding: Vec<Vertex>,
    /// Indices into the input image list, in petal order.
    pub selected_images: Vec<usize>,
    pub trace: PipelineTrace,
}

/// `{"subtree_edges": [...], "kernel_preimage": [...], "embedding": {...}}`
/// with labels written in pattern-vertex identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub subtree_edges: Vec<[Vertex; 2]>,
    pub kernel_preimage: Vec<Vertex>,
    pub embedding: BTreeMap<String, Vertex>,
}

impl WitnessResult {
    pub fn to_json(&self) -> WitnessJson {
        let tv = &self.subtree_vertices;
        let embedding = self
            .gadget
            .labels
            .iter()
            .zip(&self.embedding)
            .map(|(label, &host)| {
                let named = match *label {
                    GadgetLabel::Core { v, copy } => GadgetLabel::Core { v: tv[v], copy },
                    GadgetLabel::Star { v, index } => GadgetLabel::Star { v: tv[v], index },
                };
                (named.to_string(), host)
            })
            .collect();
        WitnessJson {
            subtree_edges: self.subtree.edges().map(|(a, b)| [tv[a], tv[b]]).collect(),
            kernel_preimage: self.kernel_preimage.as_slice().to_vec(),
            embedding,
        }
    }

    /// Injective, and every gadget edge lands on a host edge.
    pub fn embeds_into(&self, host: &Graph) -> bool {
        Embedding {
            assignment: self.embedding.clone(),
        }
        .is_valid(&self.gadget.graph, host)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessOutcome {
    Found(Box<WitnessResult>),
    Failed(StagedFailure),
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&WitnessResult> {
        match self {
            WitnessOutcome::Found(w) => Some(w),
            WitnessOutcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&StagedFailure> {
        match self {
            WitnessOutcome::Found(_) => None,
            WitnessOutcome::Failed(f) => Some(f),
        }
    }
}

/// Where an image sends the cover: vertices, then edges as sorted pairs.
type CoverKey = (Vec<Vertex>, Vec<(Vertex, Vertex)>);

/// Runs the extraction on the supplied images of `pattern` in `host`.
pub fn extract_witness(
    pattern: &Forest,
    s: usize,
    t: usize,
    host: &Graph,
    images: &[Embedding],
) -> Result<WitnessOutcome> {
    if s == 0 || t < 2 {
        return Err(Error::Domain("extraction needs s >= 1 and t >= 2".into()));
    }
    if let Some(i) = images.iter().position(|e| !e.is_valid(pattern.graph(), host)) {
        return Err(Error::Validation(format!("image #{i} is not an image of the pattern")));
    }
    let mut trace = PipelineTrace {
        images: images.len(),
        ..Default::default()
    };
    let fail = |stage, required, available, detail: String, trace: &PipelineTrace| {
        Ok(WitnessOutcome::Failed(StagedFailure {
            stage,
            required,
            available,
            detail,
            trace: trace.clone(),
        }))
    };

    // (1) low-degree set S and a vertex/edge cover Y of T[S]
    let low = alpha_s(pattern, s).low_degree_set;
    let (sub, _) = low_degree_subforest(pattern, s);
    let cover = mixed_cover(&sub);
    let cover_vertices: Vec<Vertex> = cover.vertices.iter().map(|i| low.as_slice()[i]).collect();
    let cover_edges: Vec<(Vertex, Vertex)> = cover
        .edges
        .iter()
        .map(|&(a, b)| (low.as_slice()[a], low.as_slice()[b]))
        .collect();

    // (2) bucket by the image of the cover
    let mut buckets: BTreeMap<CoverKey, Vec<usize>> = BTreeMap::new();
    for (i, e) in images.iter().enumerate() {
        let mut vs: Vec<Vertex> = cover_vertices.iter().map(|&x| e.image_of(x)).collect();
        vs.sort_unstable();
        let mut es: Vec<(Vertex, Vertex)> = cover_edges
            .iter()
            .map(|&(x, y)| {
                let (a, b) = (e.image_of(x), e.image_of(y));
                (a.min(b), a.max(b))
            })
            .collect();
        es.sort_unstable();
        buckets.entry((vs, es)).or_default().push(i);
    }
    trace.buckets = buckets.len();
    let mut bucket: Vec<usize> = Vec::new();
    for members in buckets.values() {
        if members.len() > bucket.len() {
            bucket = members.clone();
        }
    }
    trace.bucket_size = bucket.len();
    if bucket.len() < t {
        return fail(
            Stage::Bucketing,
            t,
            bucket.len(),
            "largest bucket is smaller than t".into(),
            &trace,
        );
    }
    bucket.truncate(COHERENCE_GUARD);

    // (3) coherent subfamily
    let bucket_images: Vec<Embedding> = bucket.iter().map(|&i| images[i].clone()).collect();
    let coherent: Vec<usize> = largest_coherent(&bucket_images)?
        .into_iter()
        .map(|i| bucket[i])
        .collect();
    trace.coherent_size = coherent.len();
    if coherent.len() < t {
        return fail(
            Stage::Coherence,
            t,
            coherent.len(),
            "largest coherent subfamily is smaller than t".into(),
            &trace,
        );
    }

    // (4) coherent images have pairwise distinct vertex sets
    let vertex_sets: Vec<Vec<Vertex>> = coherent
        .iter()
        .map(|&i| {
            let mut v = images[i].assignment.clone();
            v.sort_unstable();
            v
        })
        .collect();
    let family = SetFamily::new(vertex_sets)
        .map_err(|e| Error::Defect(format!("coherent images share a vertex set: {e}")))?;
    let Some(flower) = find_sunflower(&family, t)? else {
        return fail(
            Stage::Sunflower,
            t,
            family.len(),
            format!(
                "no {t}-sunflower among {} sets (guaranteed from {})",
                family.len(),
                sunflower_threshold(pattern.n(), t)
            ),
            &trace,
        );
    };
    trace.sunflower_size = flower.member_indices.len();
    let selected: Vec<usize> = flower.member_indices.iter().map(|&i| coherent[i]).collect();
    let kernel: VertexSet = flower.kernel.iter().copied().collect();

    // (5) K = preimage of the kernel, independent of the member used
    let preimage = |e: &Embedding| -> VertexSet {
        (0..pattern.n()).filter(|&x| kernel.contains(e.image_of(x))).collect()
    };
    let phi0 = &images[selected[0]];
    let k_set = preimage(phi0);
    if let Some(&other) = selected.iter().find(|&&i| preimage(&images[i]) != k_set) {
        return Err(Error::Defect(format!("kernel preimage differs for image #{other}")));
    }
    if !low.is_subset(&k_set) {
        return Err(Error::Defect("low-degree vertices escaped the kernel preimage".into()));
    }
    let rest: Vec<Vertex> = (0..pattern.n()).filter(|&x| !k_set.contains(x)).collect();
    let rest_graph = pattern.induced(&rest);
    let Some(component) = rest_graph
        .components()
        .into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
    else {
        return fail(
            Stage::Kernel,
            1,
            0,
            "kernel preimage is all of T, no component U".into(),
            &trace,
        );
    };
    let subtree_vertices: Vec<Vertex> = component.iter().map(|&i| rest[i]).collect();
    let subtree = Forest::new(pattern.induced(&subtree_vertices))?;

    // (6) assemble ⊕U^{s,t}
    let gadget = build_gadget(subtree.graph(), s, t)?;
    let mut anchors: Vec<Vec<Vertex>> = Vec::with_capacity(subtree.n());
    for (u, &v) in subtree_vertices.iter().enumerate() {
        let need = (s + 1).saturating_sub(subtree.degree(u));
        let in_kernel: Vec<Vertex> = pattern
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| k_set.contains(w))
            .collect();
        if in_kernel.len() < need {
            return fail(
                Stage::Assembly,
                need,
                in_kernel.len(),
                format!("pattern vertex {v} has too few kernel neighbours"),
                &trace,
            );
        }
        anchors.push(in_kernel[..need].to_vec());
    }
    let embedding: Vec<Vertex> = gadget
        .labels
        .iter()
        .map(|label| match *label {
            GadgetLabel::Core { v, copy } => images[selected[copy - 1]].image_of(subtree_vertices[v]),
            GadgetLabel::Star { v, index } => phi0.image_of(anchors[v][index - 1]),
        })
        .collect();
    let result = WitnessResult {
        subtree,
        subtree_vertices,
        kernel_preimage: k_set,
        kernel,
        gadget,
        embedding,
        selected_images: selected,
        trace: trace.clone(),
    };
    if !result.embeds_into(host) {
        return fail(
            Stage::Assembly,
            result.gadget.graph.edge_count(),
            0,
            "assembled map is not an embedding of the gadget".into(),
            &trace,
        );
    }
    Ok(WitnessOutcome::Found(Box::new(result)))
}

/// The image-count threshold `c * n^k` above which extraction is
/// guaranteed, with `c = c6(h, c7(h,t)) (rho+1)^h`. The pigeonhole step
/// only needs `(rho+1)^k`, so both variants are reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport {
    pub k: usize,
    pub constant_h: BigRational,
    pub constant_k: BigRational,
    pub bound_h: BigRational,
    pub bound_k: BigRational,
    pub images: BigUint,
    pub meets_h: bool,
    pub meets_k: bool,
}

pub fn witness_threshold(
    pattern: &Forest,
    s: usize,
    t: usize,
    rho: Density,
    n: usize,
    images: &BigUint,
) -> ThresholdReport {
    let h = pattern.n();
    let k = alpha_s(pattern, s).value;
    let base = BigRational::from_integer(coherence_threshold(h, &sunflower_threshold(h, t)).into());
    let rho1 = BigRational::new((*rho.0.numer()).into(), (*rho.0.denom()).into()) + BigRational::one();
    let constant_h = &base * pow(&rho1, h);
    let constant_k = &base * pow(&rho1, k);
    let nk = pow(&BigRational::from_integer(n.into()), k);
    let bound_h = &constant_h * &nk;
    let bound_k = &constant_k * &nk;
    let have = BigRational::from_integer(images.clone().into());
    ThresholdReport {
        k,
        meets_h: have >= bound_h,
        meets_k: have >= bound_k,
        constant_h,
        constant_k,
        bound_h,
        bound_k,
        images: images.clone(),
    }
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}
