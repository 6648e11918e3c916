mod common;

use num_bigint::BigUint;
use rand::Rng;

use treedens::codec::{parse_graph, parse_graph6, serialize_graph, Format};
use treedens::constructions::{
    build_gadget, build_lower_bound_graph, comp_deg, gadget_s_prime, verify_gadget_properties,
    verify_tree_decomposition, TreeDecomposition, TreeDecompositionJson,
};
use treedens::counting::{count_copies, count_images, enumerate_images, oracle_count_images, Embedding};
use treedens::extraction::{conflict_pairs, coherent_subfamily, extract_witness, find_sunflower, SetFamily, Stage};
use treedens::forest::{alpha_s, automorphism_count, low_degree_subforest, max_stable_set_forest, mixed_cover};
use treedens::gen::{gnp, rng};
use treedens::graph::{contract_partition, degeneracy, density, diameter, find_cycle, is_forest};
use treedens::models::{enumerate_separations, find_pq_model, flap_number, ModelSearch};
use treedens::shortcuts::{
    build_low_degree_square, expand, validate_shortcut_system, verify_model, BipartiteModel, ShortcutSystem,
};
use treedens::{Error, Forest, Graph, VertexSet};

use common::brute_model_exists;

fn vs<const N: usize>(v: [usize; N]) -> VertexSet {
    VertexSet::from(v)
}

#[test]
fn codec_examples() {
    let k3 = parse_graph(r#"{"n":3,"edges":[[0,1],[1,2],[0,2]]}"#, Format::EdgeListJson).unwrap();
    assert_eq!(k3, Graph::complete(3));
    assert!(matches!(
        parse_graph(r#"{"n":2,"edges":[[0,0]]}"#, Format::EdgeListJson),
        Err(Error::Validation(_))
    ));
    assert_eq!(serialize_graph(&Graph::empty(0), Format::EdgeListJson).unwrap(), r#"{"n":0,"edges":[]}"#);
    assert_eq!(parse_graph6("A?").unwrap(), Graph::empty(2));
    assert_eq!(parse_graph6("B_").unwrap(), Graph::from_edges(3, &[(0, 1)]).unwrap());
    let mut r = rng(12);
    let g = gnp(&mut r, 12, 0.4);
    for f in [Format::Graph6, Format::EdgeListJson] {
        assert_eq!(parse_graph(&serialize_graph(&g, f).unwrap(), f).unwrap(), g);
    }
}

#[test]
fn graph_measures() {
    assert_eq!(degeneracy(&Graph::complete(3)).unwrap().0, 2);
    assert_eq!(degeneracy(&Graph::star(5)).unwrap().0, 1);
    assert_eq!(density(&Graph::complete(3)).unwrap().to_string(), "1");
    assert_eq!(density(&Graph::path(4)).unwrap().to_string(), "3/4");
    assert_eq!(diameter(&Graph::complete(3)), Some(1));
    assert_eq!(diameter(&Graph::path(4)), Some(3));
    assert_eq!(diameter(&Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()), None);
    assert!(is_forest(&Graph::path(4)));
    assert_eq!(find_cycle(&Graph::complete(3)), Some(vec![0, 1, 2]));
    let c = contract_partition(&Graph::complete(3), &[vs([0, 1]), vs([2])]).unwrap();
    assert_eq!(c.graph, Graph::complete(2));
    assert!(contract_partition(&Graph::path(3), &[vs([0, 2]), vs([1])]).is_err());
}

#[test]
fn degeneracy_matches_min_degree_characterisation() {
    // k is the largest minimum degree over all induced subgraphs
    let mut r = rng(66);
    for _ in 0..10 {
        let g = gnp(&mut r, 12, 0.3);
        let best = (1u32..1 << 12)
            .map(|mask| {
                let vs: Vec<usize> = (0..12).filter(|&v| mask >> v & 1 == 1).collect();
                g.induced(&vs).min_degree()
            })
            .max()
            .unwrap();
        assert_eq!(degeneracy(&g).unwrap().0, best);
    }
}

#[test]
fn forest_examples() {
    let p4 = Forest::path(4);
    let (sub, set) = low_degree_subforest(&p4, 1);
    assert_eq!(set, vs([0, 3]));
    assert_eq!(sub.edge_count(), 0);
    let (_, set) = low_degree_subforest(&Forest::star(3), 1);
    assert_eq!(set, vs([1, 2, 3]));
    assert_eq!(alpha_s(&Forest::path(1), 0).value, 1);
    assert_eq!(alpha_s(&p4, 1).value, 2);
    assert_eq!(alpha_s(&Forest::star(3), 1).value, 3);
    assert_eq!(alpha_s(&p4, 2).value, 2);
    assert_eq!(max_stable_set_forest(&Forest::path(3)), vs([0, 2]));
    assert_eq!(max_stable_set_forest(&Forest::new(Graph::empty(5)).unwrap()).len(), 5);

    let cover = mixed_cover(&Forest::path(2));
    assert_eq!((cover.vertices.len(), cover.edges.len()), (0, 1));
    let cover = mixed_cover(&Forest::path(3));
    assert_eq!(cover.size(), 2);
    assert!(cover.covers(&Graph::path(3)));

    assert_eq!(automorphism_count(&Forest::path(3)), BigUint::from(2u8));
    assert_eq!(automorphism_count(&Forest::star(3)), BigUint::from(6u8));
    let two_edges = Forest::new(Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()).unwrap();
    assert_eq!(automorphism_count(&two_edges), BigUint::from(8u8));
}

#[test]
fn counting_examples() {
    let k2 = Forest::path(2);
    assert_eq!(count_images(&k2, &Graph::complete(3), None).images, BigUint::from(6u8));
    assert_eq!(enumerate_images(&k2, &Graph::complete(3), 100).len(), 6);
    assert_eq!(
        enumerate_images(&Forest::path(1), &Graph::empty(1), 5),
        vec![Embedding { assignment: vec![0] }]
    );
    assert_eq!(oracle_count_images(&Forest::path(4), &Graph::path(4)).unwrap(), BigUint::from(2u8));
    let r = count_copies(&Forest::path(3), &Graph::cycle(4)).unwrap();
    assert_eq!((r.images, r.copies), (BigUint::from(8u8), BigUint::from(4u8)));
    assert!(count_images(&k2, &Graph::complete(5), Some(&BigUint::from(3u8))).truncated);
}

#[test]
fn lower_bound_examples() {
    let p3 = Forest::path(3);
    let inst = build_lower_bound_graph(&p3, 1, 10).unwrap();
    assert_eq!((inst.k, inst.m, inst.graph.n()), (2, 3, 9));
    // the double star: the centre sees every other vertex
    assert_eq!(inst.graph.degree(1), 8);
    assert_eq!(inst.graph.edge_count(), 8);
    let td = verify_tree_decomposition(&inst.graph, &inst.decomposition);
    assert!(td.valid && td.width == 1);
    // two leaves out of eight around the centre
    assert_eq!(count_copies(&p3, &inst.graph).unwrap().copies, BigUint::from(28u8));

    let k1 = build_lower_bound_graph(&Forest::path(1), 1, 7).unwrap();
    assert_eq!((k1.k, k1.m, k1.graph.n(), k1.graph.edge_count()), (1, 6, 7, 0));

    assert!(density(&inst.graph).unwrap().to_f64() <= 1.0);
}

#[test]
fn tree_decomposition_examples() {
    let full = TreeDecomposition::from_json(TreeDecompositionJson {
        tree_edges: vec![],
        bags: vec![vec![0, 1, 2, 3]],
    })
    .unwrap();
    let r = verify_tree_decomposition(&Graph::complete(4), &full);
    assert!(r.valid && r.width == 3);
    let path = TreeDecomposition::from_json(TreeDecompositionJson {
        tree_edges: vec![[0, 1], [1, 2]],
        bags: vec![vec![0, 1], vec![1, 2], vec![2, 3]],
    })
    .unwrap();
    let r = verify_tree_decomposition(&Graph::path(4), &path);
    assert!(r.valid && r.width == 1);
    let broken = TreeDecomposition::from_json(TreeDecompositionJson {
        tree_edges: vec![[0, 1]],
        bags: vec![vec![0, 1], vec![2, 3]],
    })
    .unwrap();
    let r = verify_tree_decomposition(&Graph::path(4), &broken);
    assert!(!r.valid);
    assert!(r.violation.unwrap().contains("12"));
}

#[test]
fn gadget_examples() {
    assert_eq!(comp_deg(&Graph::empty(1), 1, 0).unwrap(), 2);
    assert_eq!(comp_deg(&Graph::star(3), 1, 0).unwrap(), 0);
    assert_eq!(comp_deg(&Graph::path(3), 2, 0).unwrap(), 2);
    assert_eq!(gadget_s_prime(&Graph::empty(1), 1), 2);
    assert_eq!(gadget_s_prime(&Graph::complete(2), 1), 2);
    assert_eq!(gadget_s_prime(&Graph::path(3), 2), 5);

    let g = build_gadget(&Graph::empty(1), 1, 2).unwrap();
    assert_eq!(g.graph, Graph::complete_bipartite(2, 2));
    let labels: Vec<String> = g.labels.iter().map(ToString::to_string).collect();
    assert_eq!(labels, ["(0,1)", "(0,2)", "(0,1)*", "(0,2)*"]);

    let g = build_gadget(&Graph::cycle(4), 1, 3).unwrap();
    assert_eq!(g.graph, Graph::cycle(4).disjoint_union(&Graph::cycle(4)).disjoint_union(&Graph::cycle(4)));

    assert!(verify_gadget_properties(&Graph::complete(2), 1, 3).unwrap().all_passed());
    assert!(verify_gadget_properties(&Graph::path(3), 1, 2).unwrap().diameter.passed());
}

#[test]
fn extraction_examples() {
    let on = |pairs: &[(usize, usize)]| -> Vec<Embedding> {
        pairs.iter().map(|&(a, b)| Embedding { assignment: vec![a, b] }).collect()
    };
    assert!(conflict_pairs(&on(&[(0, 1), (2, 3)])).unwrap().is_empty());
    assert_eq!(conflict_pairs(&on(&[(1, 3), (3, 1)])).unwrap(), vec![(0, 1)]);
    assert_eq!(
        coherent_subfamily(&on(&[(0, 1), (2, 3), (4, 5)]), 3).unwrap(),
        Some(vec![0, 1, 2])
    );
    let c4_images = enumerate_images(&Forest::path(3), &Graph::cycle(4), 100);
    assert!(coherent_subfamily(&c4_images, 2).unwrap().is_some_and(|c| c.len() >= 2));

    let fam = SetFamily::new(vec![vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
    assert!(find_sunflower(&fam, 3).unwrap().unwrap().kernel.is_empty());
    let fam = SetFamily::new(vec![vec![1, 2], vec![1, 3], vec![1, 4]]).unwrap();
    assert_eq!(find_sunflower(&fam, 3).unwrap().unwrap().kernel, vec![1]);

    let p3 = Forest::path(3);
    let c4 = Graph::cycle(4);
    let w = extract_witness(&p3, 1, 2, &c4, &c4_images).unwrap();
    let w = w.witness().unwrap();
    assert_eq!(w.subtree_vertices, vec![1]);
    assert_eq!(w.kernel_preimage, vs([0, 2]));
    assert!(w.embeds_into(&c4));

    let short = extract_witness(&p3, 1, 2, &c4, &c4_images[..1]).unwrap();
    assert_eq!(short.failure().unwrap().stage, Stage::Bucketing);
}

#[test]
fn shortcut_examples() {
    let single = ShortcutSystem::new(Graph::path(2), vec![vec![0, 1]]).unwrap();
    let prof = validate_shortcut_system(&single).unwrap();
    assert_eq!((prof.max_length, prof.max_internal_load, prof.max_m_set), (1, 0, 0));
    let p3 = ShortcutSystem::new(Graph::path(3), vec![vec![0, 1, 2]]).unwrap();
    let prof = validate_shortcut_system(&p3).unwrap();
    assert_eq!((prof.max_length, prof.max_internal_load, prof.max_m_set), (2, 1, 2));
    assert_eq!(expand(&p3), Graph::complete(3));
    // u-v-w and x-v-y through a shared centre
    let cross = ShortcutSystem::new(Graph::star(4), vec![vec![1, 0, 2], vec![3, 0, 4]]).unwrap();
    let prof = validate_shortcut_system(&cross).unwrap();
    assert_eq!((prof.max_internal_load, prof.max_m_set), (2, 4));
    let c4 = ShortcutSystem::new(Graph::cycle(4), vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
    assert_eq!(expand(&c4), Graph::complete(4));

    assert_eq!(build_low_degree_square(&Graph::star(3), 3).0, Graph::complete(4));
    assert_eq!(build_low_degree_square(&Graph::star(3), 2).0, Graph::star(3));
    let p4_square = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)]).unwrap();
    assert_eq!(build_low_degree_square(&Graph::path(4), 2).0, p4_square);
}

#[test]
fn model_examples() {
    let k23 = Graph::complete_bipartite(2, 3);
    let singletons = BipartiteModel {
        left: vec![vs([0]), vs([1])],
        right: vec![vs([2]), vs([3]), vs([4])],
    };
    assert!(verify_model(&k23, &singletons, 2, 3, 1, 1).valid);
    let merged = BipartiteModel {
        left: vec![vs([0]), vs([1])],
        right: vec![vs([2]), vs([3]), vs([0, 4])],
    };
    assert!(!verify_model(&k23, &merged, 2, 3, 1, 1).valid);
    let c6 = BipartiteModel {
        left: vec![vs([0])],
        right: vec![vs([1, 2]), vs([4, 5])],
    };
    assert!(verify_model(&Graph::cycle(6), &c6, 1, 2, 1, 2).valid);

    assert_eq!(
        find_pq_model(&k23, 2, 3, 1, 1, 1000).unwrap(),
        ModelSearch::Found(singletons)
    );
    assert_eq!(find_pq_model(&Graph::cycle(6), 3, 3, 1, 1, 1 << 20).unwrap(), ModelSearch::None);
    let gadget = build_gadget(&Graph::empty(1), 2, 3).unwrap().graph;
    assert!(matches!(find_pq_model(&gadget, 3, 3, 1, 1, 1000).unwrap(), ModelSearch::Found(_)));
}

#[test]
fn model_search_agrees_with_labelling_oracle() {
    let mut r = rng(404);
    let mut nones = 0;
    for _ in 0..60 {
        let n = r.gen_range(3..=7);
        let p_edge = r.gen_range(0.2..0.7);
        let g = gnp(&mut r, n, p_edge);
        let (s, t) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let (p, q) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let got = find_pq_model(&g, s, t, p, q, u64::MAX).unwrap();
        let exists = brute_model_exists(&g, s, t, p, q);
        match got {
            ModelSearch::Found(m) => {
                assert!(exists);
                assert!(verify_model(&g, &m, s, t, p, q).valid);
            }
            ModelSearch::None => {
                assert!(!exists, "{g:?} s={s} t={t} p={p} q={q}");
                nones += 1;
            }
            ModelSearch::Unknown => unreachable!("unbounded budget"),
        }
    }
    assert!(nones > 0);
}

#[test]
fn separation_and_flap_examples() {
    assert!(enumerate_separations(&Graph::empty(1), 1).unwrap().is_empty());
    assert!(enumerate_separations(&Graph::complete(2), 1).unwrap().is_empty());
    let seps = enumerate_separations(&Graph::path(3), 1).unwrap();
    assert!(seps.iter().any(|s| s.a_vertices == vs([0, 1]) && s.b_vertices == vs([1, 2])));
    assert_eq!(flap_number(&Graph::empty(1), 1).unwrap().value, 1);
    assert_eq!(flap_number(&Graph::path(3), 1).unwrap().value, 2);
    assert_eq!(flap_number(&Graph::star(3), 1).unwrap().value, 3);
    assert!(matches!(enumerate_separations(&Graph::complete(7), 2), Err(Error::Capacity(_))));
}
