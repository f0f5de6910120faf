mod oracles;

use num_rational::BigRational;
use saguaro_core::algebra::Algebra;
use saguaro_core::error::Error;
use saguaro_core::field::{Field, Fp, Rationals};
use saguaro_core::fixtures;
use saguaro_core::graph::{graph_equivalent, graph_from_lists};
use saguaro_core::hom::{decompose, is_isomorphic};
use saguaro_core::linalg::Mat;
use saguaro_core::module::{direct_sum, realize_graph, Module};
use saguaro_core::presentation::{parse_presentation, Path};
use saguaro_core::saguaro::*;
use saguaro_core::uniserial::*;
use saguaro_core::AlgebraRef;

fn alg<F: Field>(name: &str, f: F) -> AlgebraRef<F> {
    Algebra::build(&fixtures::presentation(name).unwrap(), f).unwrap()
}

fn path<F: Field>(a: &AlgebraRef<F>, s: &str) -> Path {
    a.quiver().parse_path(s).unwrap()
}

fn link<F: Field>(a: &AlgebraRef<F>, q: &str, q_next: &str) -> Link {
    Link { q: path(a, q), q_next: path(a, q_next) }
}

fn uni<F: Field>(a: &AlgebraRef<F>, mast: &str) -> UniserialRecord<F> {
    uniserial_from_mast(a, &path(a, mast)).unwrap().unwrap()
}

/// Five trunks over the first example, each with socle S4 and mast of length 4.
fn ex11_trunks<F: Field>(a: &AlgebraRef<F>) -> Vec<UniserialRecord<F>> {
    let q = a.quiver();
    let specs: [(&[&str], &[&str], &str); 5] = [
        (
            &["x:1@0", "a:2@1", "b:3@2", "c:3@3", "d:4@4"],
            &["x-alpha-a", "x-tau-b", "a-gamma-b", "b-delta-c", "b-eps-d", "c-eps-d"],
            "eps*delta*gamma*alpha",
        ),
        (
            &["x:2@0", "a:2@1", "b:3@2", "c:3@3", "d:4@4"],
            &["x-beta-a", "x-gamma-c", "a-gamma-b", "b-delta-c", "b-eps-d", "c-eps-d"],
            "eps*delta*gamma*beta",
        ),
        (
            &["x:2@0", "a:2@1", "b:3@2", "c:3@3", "d:4@4"],
            &["x-beta-a", "x-gamma-b", "a-gamma-b", "b-delta-c", "b-eps-d", "c-eps-d"],
            "eps*delta*gamma*beta",
        ),
        (
            &["x:4@0", "a:2@1", "b:3@2", "c:3@3", "d:4@4"],
            &["x-sigma-a", "a-gamma-b", "b-delta-c", "c-eps-d"],
            "eps*delta*gamma*sigma",
        ),
        (
            &["x:1@0", "a:2@1", "b:3@2", "c:3@3", "d:4@4"],
            &["x-alpha-a", "x-tau-c", "a-gamma-b", "b-delta-c", "b-eps-d", "c-eps-d"],
            "eps*delta*gamma*alpha",
        ),
    ];
    specs
        .iter()
        .map(|(n, e, m)| {
            let g = graph_from_lists(q, n, e).unwrap();
            let md = realize_graph(a, &g).unwrap();
            verify_uniserial(&md, &path(a, m)).unwrap()
        })
        .collect()
}

fn ex11_links<F: Field>(a: &AlgebraRef<F>) -> LinkSpec {
    vec![
        link(a, "alpha", "beta"),
        link(a, "gamma*beta", "gamma*beta"),
        link(a, "delta*gamma*beta", "delta*gamma*sigma"),
        link(a, "delta*gamma*sigma", "delta*gamma*alpha"),
    ]
}

fn ex11_saguaro<F: Field>(f: F) -> Saguaro<F> {
    let a = alg("ex1.1", f);
    build_saguaro(ex11_trunks(&a), ex11_links(&a)).unwrap()
}

fn rat(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

#[test]
fn ex11_displayed_links_fail_embedding() {
    let a = alg("ex1.1", Rationals);
    let links = vec![
        link(&a, "alpha", "beta"),
        link(&a, "gamma*beta", "gamma*beta"),
        link(&a, "beta", "sigma"),
        link(&a, "delta*gamma*sigma", "delta*gamma*alpha"),
    ];
    match build_saguaro(ex11_trunks(&a), links) {
        Err(Error::Refusal(msg)) => assert!(msg.contains("condition (ii)"), "{msg}"),
        other => panic!("expected refusal, got {:?}", other.map(|s| s.module.dim())),
    }
}

#[test]
fn ex11_saguaro_dimension_and_invariants() {
    let s = ex11_saguaro(Rationals);
    // each intersection of consecutive trunks is uniserial of length 5 - |q_i|
    let trunk_lens: usize = s.trunks.iter().map(|t| t.mast.path.len() + 1).sum();
    let glued: usize = s.links.iter().zip(&s.trunks).map(|(l, t)| t.mast.path.len() + 1 - l.q.len()).sum();
    assert_eq!(s.module.dim(), trunk_lens - glued);
    assert_eq!(s.module.dim(), 14);
    assert_eq!(s.graph().unwrap().nodes.len(), 14);
    assert_eq!(s.module.top_dims(), vec![2, 2, 0, 1]);
    check_invariants(&s).unwrap();
    assert_eq!(s.socle_vertex(), 3);
}

#[test]
fn ex11_intersections_match_link_lengths() {
    let s = ex11_saguaro(Rationals);
    let a = s.alg().clone();
    let (x, y, sp) = trunk_intersection(&s, 0, 2).unwrap();
    assert_eq!(x, path(&a, "gamma*alpha"));
    assert_eq!(y, path(&a, "gamma*beta"));
    assert_eq!(sp.dim(), 5 - 2);
    let raw = s.images[0].intersect(s.field(), &s.images[2]);
    assert!(raw.same_as(&sp));
    for i in 0..5 {
        for j in i + 1..5 {
            let (x, _, sp) = trunk_intersection(&s, i, j).unwrap();
            assert_eq!(sp.dim(), 5 - x.len());
        }
    }
}

#[test]
fn ex11_intersection_needs_distinct_indices() {
    let s = ex11_saguaro(Rationals);
    assert!(matches!(trunk_intersection(&s, 2, 2), Err(Error::Input(_))));
    assert!(matches!(trunk_intersection(&s, 3, 1), Err(Error::Input(_))));
}

#[test]
fn single_trunk_is_the_trunk() {
    let a = alg("ex1.1", Rationals);
    let t = ex11_trunks(&a).remove(0);
    let s = build_saguaro(vec![t.clone()], vec![]).unwrap();
    assert!(is_isomorphic(&s.module, &t.module));
    assert!(!is_redundant(&s).unwrap().redundant);
}

#[test]
fn trivial_link_is_refused() {
    let a = alg("ex4.3", Rationals);
    let links = vec![Link { q: Path::trivial(2), q_next: Path::trivial(2) }];
    let r = build_saguaro(vec![uni(&a, "c"), uni(&a, "c")], links);
    assert!(matches!(r, Err(Error::Refusal(_))));
}

#[test]
fn link_count_and_targets_are_checked() {
    let a = alg("ex4.3", Rationals);
    assert!(matches!(build_saguaro(vec![uni(&a, "a"), uni(&a, "c")], vec![]), Err(Error::Input(_))));
    let r = build_saguaro(vec![uni(&a, "a"), uni(&a, "b")], vec![link(&a, "a", "b")]);
    assert!(matches!(r, Err(Error::Input(_))));
    assert!(matches!(build_saguaro::<Rationals>(vec![], vec![]), Err(Error::Input(_))));
}

#[test]
fn scalar_twist_is_isomorphic() {
    let s = ex11_saguaro(Rationals);
    let ks: Vec<_> = [2, 3, 5, 7].into_iter().map(rat).collect();
    let (t, phi) = scalar_twist(&s, &ks).unwrap();
    assert_eq!(t.scalars, ks);
    assert!(is_isomorphic(&s.module, &t.module));
    assert!(phi.is_invertible(s.field()));
    assert!(matches!(scalar_twist(&s, &[rat(1), rat(0), rat(1), rat(1)]), Err(Error::Input(_))));
}

#[test]
fn unit_twist_is_identity() {
    for_f2_and_q();
}

fn for_f2_and_q() {
    fn check<F: Field>(f: F) {
        let s = ex11_saguaro(f.clone());
        let ks = vec![f.one(); 4];
        let (t, phi) = scalar_twist(&s, &ks).unwrap();
        assert_eq!(phi, Mat::identity(&f, s.module.dim()));
        assert_eq!(t.module.dim(), s.module.dim());
    }
    check(Rationals);
    check(Fp::new(2).unwrap());
}

#[test]
fn move_together_gives_valid_orders() {
    let s = ex11_saguaro(Rationals);
    for pair in [(0, 3), (1, 4), (0, 4), (2, 0)] {
        let perm = move_together(&s, pair).unwrap();
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        let pa = perm.iter().position(|&x| x == pair.0).unwrap();
        let pb = perm.iter().position(|&x| x == pair.1).unwrap();
        assert_eq!(pa.abs_diff(pb), 1, "{pair:?} -> {perm:?}");
        let (t, phi) = reorder_trunks(&s, &perm).unwrap();
        assert!(phi.is_invertible(s.field()));
        assert!(is_isomorphic(&t.module, &s.module));
        check_invariants(&t).unwrap();
    }
}

#[test]
fn ex11_reversal_is_a_saguaro() {
    let s = ex11_saguaro(Rationals);
    let (t, _) = reorder_trunks(&s, &[4, 3, 2, 1, 0]).unwrap();
    assert_eq!(t.masts()[0], s.masts()[4]);
    assert!(is_isomorphic(&t.module, &s.module));
}

#[test]
fn ex11_saguaro_is_irredundant() {
    let s = ex11_saguaro(Rationals);
    let r = is_redundant(&s).unwrap();
    assert!(!r.redundant);
    assert!(!r.graph_checked);
}

fn summand_oracle<F: Field>(s: &Saguaro<F>, parts: &[Saguaro<F>]) {
    let mods: Vec<&Module<F>> = parts.iter().map(|p| &p.module).collect();
    let (sum, _, _) = direct_sum(s.alg(), &mods);
    assert!(is_isomorphic(&sum, &s.module));
    let want = decompose(&s.module).modules();
    let got: Vec<Module<F>> = parts.iter().flat_map(|p| decompose(&p.module).modules()).collect();
    assert_eq!(want.len(), got.len());
    let mut used = vec![false; got.len()];
    for w in &want {
        let k = (0..got.len()).find(|&k| !used[k] && is_isomorphic(w, &got[k])).expect("summand matches");
        used[k] = true;
    }
    for p in parts {
        assert!(!is_redundant(p).unwrap().redundant);
    }
}

#[test]
fn doubled_trunk_is_redundant_and_splits() {
    let a = alg("ex4.3", Rationals);
    let s = build_saguaro(vec![uni(&a, "a"), uni(&a, "a")], vec![link(&a, "a", "a")]).unwrap();
    let r = is_redundant(&s).unwrap();
    assert!(r.redundant);
    assert!(r.graph_checked);
    let w = r.witness.unwrap();
    assert_eq!((w.first, w.second), (vec![0], vec![1]));
    let parts = decompose_saguaro(&s).unwrap();
    assert_eq!(parts.len(), 2);
    summand_oracle(&s, &parts);
}

#[test]
fn three_trunk_redundant_splits() {
    let a = alg("ex4.3", Rationals);
    let s = build_saguaro(
        vec![uni(&a, "a"), uni(&a, "c"), uni(&a, "a")],
        vec![link(&a, "a", "c"), link(&a, "c", "a")],
    )
    .unwrap();
    assert_eq!(s.module.dim(), 4);
    let r = is_redundant(&s).unwrap();
    assert!(r.redundant);
    let parts = decompose_saguaro(&s).unwrap();
    summand_oracle(&s, &parts);
    assert_eq!(parts.iter().map(|p| p.module.dim()).sum::<usize>(), 4);
}

#[test]
fn decomposition_refused_without_finite_vp() {
    let s = ex11_saguaro(Rationals);
    assert!(matches!(decompose_saguaro(&s), Err(Error::Refusal(_))));
}

fn contains_iso<F: Field>(list: &[Saguaro<F>], m: &Module<F>) -> bool {
    list.iter().any(|s| s.module.dims == m.dims && is_isomorphic(&s.module, m))
}

#[test]
fn ex43_enumeration_contains_expected() {
    let a = alg("ex4.3", Rationals);
    let list = enumerate_irredundant(&a).unwrap();
    assert_eq!(list.len(), 26);
    for v in 0..6 {
        assert!(contains_iso(&list, &Module::simple(&a, v)));
    }
    for p in ["beta", "a", "c", "b", "d", "gamma", "a*alpha", "b*delta"] {
        assert!(contains_iso(&list, &uni(&a, p).module), "{p}");
    }
    for s in &list {
        assert!(!is_redundant(s).unwrap().redundant);
        check_invariants(s).unwrap();
    }
}

/// All irredundant saguaros up to `max` trunks, built from every trunk/link choice.
#[test]
fn ex43_enumeration_is_complete_over_f2() {
    let a = alg("ex4.3", Fp::new(2).unwrap());
    let list = enumerate_irredundant(&a).unwrap();
    let brute = oracles::brute_force_saguaros(&a, 4);
    for s in &brute {
        assert!(contains_iso(&list, &s.module), "missing {}", s.describe());
    }
    for s in &list {
        assert!(s.len() > 4 || contains_iso(&brute, &s.module), "extra {}", s.describe());
    }
}

#[test]
fn semisimple_enumeration_is_simples() {
    let a = Algebra::build(&parse_presentation("quiver { vertices 1..3; } relations { loewy 2 }").unwrap(), Rationals)
        .unwrap();
    let list = enumerate_irredundant(&a).unwrap();
    assert_eq!(list.len(), 3);
    assert!(list.iter().all(|s| s.module.dim() == 1));
}

#[test]
fn graphs_separate_enumerated_saguaros() {
    let a = alg("ex4.3", Rationals);
    let list = enumerate_irredundant(&a).unwrap();
    let graphs: Vec<_> = list.iter().map(|s| s.graph().unwrap()).collect();
    for i in 0..list.len() {
        for j in 0..list.len() {
            let iso = list[i].module.dims == list[j].module.dims && is_isomorphic(&list[i].module, &list[j].module);
            assert_eq!(graph_equivalent(&graphs[i], &graphs[j]), iso, "{i} {j}");
            assert_eq!(iso, i == j);
        }
    }
}

#[test]
fn enumeration_refuses_infinite_vp() {
    let a = alg("ex1.1", Rationals);
    assert!(enumerate_irredundant(&a).is_err());
}

#[test]
fn ex73_bounded_enumeration_contains_displayed_saguaros() {
    let a = alg("ex7.3", Rationals);
    let q = a.quiver();
    let a1 = graph_from_lists(
        q,
        &["l4:4@0", "l2:2@0", "one:1@0", "r2:2@0", "r4:4@0", "l3:3@1", "r3:3@1", "m5:5@2", "b5:5@3"],
        &["l4-delta-l3", "l2-beta-l3", "r2-beta-r3", "r4-delta-r3", "one-alpha-m5", "r3-gamma-m5", "l3-gamma-b5", "m5-eps-b5"],
    )
    .unwrap();
    let a5 = graph_from_lists(
        q,
        &["t5:5@0", "t2:2@0", "t4:4@0", "m5:5@1", "m3:3@1", "b5:5@2"],
        &["t5-eps-m5", "t2-beta-m3", "t4-delta-m3", "m5-eps-b5", "m3-gamma-b5"],
    )
    .unwrap();
    for (g, top) in [(a1, vec![1, 2, 0, 2, 0]), (a5, vec![0, 1, 0, 1, 1])] {
        let m = realize_graph(&a, &g).unwrap();
        assert_eq!(m.top_dims(), top);
        let opts = EnumOptions { max_top: Some(top), ..EnumOptions::default() };
        let list = enumerate_irredundant_with(&a, opts).unwrap();
        assert!(contains_iso(&list, &m));
    }
}
