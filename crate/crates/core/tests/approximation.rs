mod oracles;

use saguaro_core::algebra::Algebra;
use saguaro_core::approximation::*;
use saguaro_core::error::Error;
use saguaro_core::field::{Field, Fp, Rationals};
use saguaro_core::fixtures;
use saguaro_core::graph::{graph_equivalent, graph_from_lists};
use saguaro_core::hom::is_isomorphic;
use saguaro_core::homological::{default_bound, findim_report, is_projective, pdim, syzygy};
use saguaro_core::linalg::Vector;
use saguaro_core::module::*;
use saguaro_core::presentation::Path;
use saguaro_core::uniserial::check_finite_vp;
use saguaro_core::AlgebraRef;

fn alg<F: Field>(name: &str, f: F) -> AlgebraRef<F> {
    Algebra::build(&fixtures::presentation(name).unwrap(), f).unwrap()
}

fn path<F: Field>(a: &AlgebraRef<F>, s: &str) -> Path {
    a.quiver().parse_path(s).unwrap()
}

fn graph_module<F: Field>(a: &AlgebraRef<F>, nodes: &[&str], edges: &[&str]) -> Module<F> {
    realize_graph(a, &graph_from_lists(a.quiver(), nodes, edges).unwrap()).unwrap()
}

fn same_graph<F: Field>(m: &Module<F>, nodes: &[&str], edges: &[&str]) -> bool {
    let want = graph_from_lists(m.alg.quiver(), nodes, edges).unwrap();
    graph_equivalent(&graph_of(m).unwrap(), &want)
}

fn data<F: Field>(a: &AlgebraRef<F>, idem: &[usize], p: &[&str], q: &[&str]) -> CriterionData {
    CriterionData {
        idempotents: idem.to_vec(),
        p: p.iter().map(|s| path(a, s)).collect(),
        q: q.iter().map(|s| path(a, s)).collect(),
    }
}

const A1_NODES: &[&str] = &["l4:4@0", "l2:2@0", "one:1@0", "r2:2@0", "r4:4@0", "l3:3@1", "r3:3@1", "m5:5@2", "b5:5@3"];
const A1_EDGES: &[&str] = &[
    "l4-delta-l3",
    "l2-beta-l3",
    "r2-beta-r3",
    "r4-delta-r3",
    "one-alpha-m5",
    "r3-gamma-m5",
    "l3-gamma-b5",
    "m5-eps-b5",
];

#[test]
fn ex73_pinf_approx_of_s1_matches_displayed_graph() {
    let a = alg("ex7.3", Rationals);
    let r = leftserial_pinf_approx(&a, 0).unwrap();
    assert!(same_graph(&r.module, A1_NODES, A1_EDGES));
    assert!(r.saguaro.as_ref().unwrap().trunks.iter().any(|t| t.mast.path == path(&a, "eps*alpha")));
    assert!(pdim(&r.module, default_bound(&a)).finite().is_some());
    check_factorization(&r).unwrap();
}

#[test]
fn ex73_middle_simples_approximate_themselves() {
    let a = alg("ex7.3", Rationals);
    for v in 1..4 {
        let r = leftserial_pinf_approx(&a, v).unwrap();
        assert!(is_isomorphic(&r.module, &Module::simple(&a, v)), "S{}", v + 1);
    }
}

#[test]
fn ex73_displayed_a5_misses_a_branch() {
    let a = alg("ex7.3", Rationals);
    let shown = graph_module(
        &a,
        &["t5:5@0", "t2:2@0", "t4:4@0", "m5:5@1", "m3:3@1", "b5:5@2"],
        &["t5-eps-m5", "t2-beta-m3", "t4-delta-m3", "m5-eps-b5", "m3-gamma-b5"],
    );
    let wider = graph_module(
        &a,
        &["t5:5@0", "t2:2@0", "t4:4@0", "u2:2@0", "u4:4@0", "m3:3@1", "u3:3@1", "m5:5@2", "b5:5@3"],
        &[
            "t5-eps-m5",
            "t2-beta-m3",
            "t4-delta-m3",
            "m5-eps-b5",
            "m3-gamma-b5",
            "u2-beta-u3",
            "u4-delta-u3",
            "u3-gamma-m5",
        ],
    );
    assert!(is_projective(&syzygy(&wider, 1)));
    let s5 = Module::simple(&a, 4);
    let through_shown = finite_type_approx(&[shown], &s5).unwrap();
    assert!(!factorizes(&wider, &through_shown.module, &through_shown.map, &s5));
    let r = leftserial_pinf_approx(&a, 4).unwrap();
    assert!(is_isomorphic(&r.module, &wider));
    assert_eq!(r.module.top_dims(), vec![0, 2, 0, 2, 1]);
}

#[test]
fn ex75_pd_approximations_grow_then_stabilize() {
    let a = alg("ex7.5", Fp::new(2).unwrap());
    let r0 = leftserial_pd_approx(&a, 0, 0).unwrap();
    assert!(is_isomorphic(&r0.module, &regular_module(&a, 0)));
    let r1 = leftserial_pd_approx(&a, 0, 1).unwrap();
    assert!(same_graph(
        &r1.module,
        &["x1:1@0", "x5:5@0", "x6:6@0", "x8:8@0", "x7:7@0", "y2:2@1", "y3:3@2", "y4:4@3"],
        &["x1-a1_2-y2", "x5-a5_2-y2", "y2-a2_3-y3", "x6-a6_3-y3", "x8-a8_3-y3", "y3-a3_4-y4", "x7-a7_4-y4"],
    ));
    let r2 = leftserial_pd_approx(&a, 0, 2).unwrap();
    assert!(same_graph(
        &r2.module,
        &["x1:1@0", "x5:5@0", "x6:6@0", "x8:8@0", "y2:2@1", "y3:3@2"],
        &["x1-a1_2-y2", "x5-a5_2-y2", "y2-a2_3-y3", "x6-a6_3-y3", "x8-a8_3-y3"],
    ));
    let r3 = leftserial_pd_approx(&a, 0, 3).unwrap();
    assert!(same_graph(
        &r3.module,
        &["x1:1@0", "x5:5@0", "x11:11@0", "x9:9@0", "x10:10@0", "y2:2@1", "y6:6@1", "y8:8@1", "z3:3@2"],
        &[
            "x1-a1_2-y2",
            "x5-a5_2-y2",
            "x11-a11_6-y6",
            "x9-a9_8-y8",
            "x10-a10_8-y8",
            "y2-a2_3-z3",
            "y6-a6_3-z3",
            "y8-a8_3-z3",
        ],
    ));
    for d in 4..6 {
        assert!(is_isomorphic(&leftserial_pd_approx(&a, 0, d).unwrap().module, &r3.module));
    }
    assert!(is_isomorphic(&leftserial_pinf_approx(&a, 0).unwrap().module, &r3.module));
    for r in [&r1, &r2, &r3] {
        check_factorization(r).unwrap();
    }
}

#[test]
fn left_serial_search_refuses_other_algebras() {
    let a = alg("ex4.2", Rationals);
    assert!(!is_left_serial(&a));
    assert!(matches!(leftserial_pinf_approx(&a, 0), Err(Error::Refusal(_))));
    let b = alg("ex7.3", Rationals);
    assert!(is_left_serial(&b));
    assert!(matches!(leftserial_pinf_approx(&b, 9), Err(Error::Input(_))));
}

#[test]
fn ex85_saguaro_approximations_are_length_two_uniserials() {
    let a = alg("ex8.5", Rationals);
    assert!(check_finite_vp(&a).unwrap().holds);
    let expect = ["beta", "a", "c", "b", "d", "gamma"];
    let mut mods = Vec::new();
    for (v, arrow) in expect.iter().enumerate() {
        let r = saguaro_approx(&a, &Module::simple(&a, v), true).unwrap();
        let x = a.quiver().arrows[a.quiver().arrow_index(arrow).unwrap()].target + 1;
        let nodes = [format!("t:{}@0", v + 1), format!("s:{x}@1")];
        let nodes: Vec<&str> = nodes.iter().map(|s| s.as_str()).collect();
        let edge = format!("t-{arrow}-s");
        assert!(same_graph(&r.module, &nodes, &[edge.as_str()]), "S{}", v + 1);
        assert!(r.minimal);
        assert_eq!(r.category, Category::SaguarosPinf);
        mods.push(r.module);
    }
    let rep = findim_report(&mods, default_bound(&a)).unwrap();
    assert_eq!(rep.value, 1);
}

#[test]
fn ex85_uniserial_projectives_approximate_themselves() {
    let a = alg("ex8.5", Rationals);
    for v in 1..5 {
        let p = regular_module(&a, v);
        let r = saguaro_approx(&a, &p, true).unwrap();
        assert_eq!(r.dim(), p.dim());
        assert!(is_isomorphic(&r.module, &p));
        assert!(r.map.is_invertible(&a.field));
    }
}

#[test]
fn saguaro_approx_refuses_infinite_vp() {
    let a = alg("ex1.1", Rationals);
    assert!(matches!(saguaro_approx(&a, &Module::simple(&a, 0), false), Err(Error::Refusal(_))));
}

#[test]
fn finite_list_dimension_is_sum_of_hom_counts() {
    let a = alg("ex4.2", Rationals);
    let d = data(&a, &[0], &["beta"], &["alpha"]);
    let gens: Vec<_> = (1..=2).map(|n| zigzag_module(&a, &d, n).unwrap()).collect();
    let s1 = Module::simple(&a, 0);
    let r = finite_type_approx(&gens, &s1).unwrap();
    // Hom(M, S1) has one dimension per top summand S1
    let want: usize = gens.iter().map(|g| g.dim() * structure(g).top[0]).sum();
    assert_eq!(r.dim(), want);
    assert_eq!(r.multiplicities(), vec![1, 2]);
    assert!(!r.minimal);
    let m = minimize_right(&r).unwrap();
    assert!(m.minimal);
    assert_eq!(m.multiplicities(), vec![0, 1]);
    assert!(is_isomorphic(&m.module, &gens[1]));
}

#[test]
fn finite_list_rejects_bad_input() {
    let a = alg("ex4.2", Rationals);
    let s1 = Module::simple(&a, 0);
    assert!(matches!(finite_type_approx(&[], &s1), Err(Error::Input(_))));
    let p = regular_module(&a, 0);
    assert!(matches!(finite_type_approx(&[p.clone(), p], &s1), Err(Error::Input(_))));
}

#[test]
fn minimization_is_independent_of_seed() {
    let a = alg("ex4.3", Rationals);
    let d = data(&a, &[0, 5], &["beta", "gamma"], &["alpha", "delta"]);
    let mut gens: Vec<_> = (1..=4).map(|n| zigzag_module(&a, &d, n).unwrap()).collect();
    gens.push(regular_module(&a, 0));
    gens.push(Module::simple(&a, 0));
    let target = Module::simple(&a, 0);
    let raw = finite_type_approx(&gens, &target).unwrap();
    let base = minimize_right_seeded(&raw, 0).unwrap();
    for seed in 1..6 {
        let m = minimize_right_seeded(&raw, seed).unwrap();
        assert_eq!(m.multiplicities(), base.multiplicities());
        assert!(is_isomorphic(&m.module, &base.module));
    }
    assert!(base.dim() <= raw.dim());
}

#[test]
fn brush_has_expected_top_and_socle() {
    let a = alg("ex3-brush", Rationals);
    let r = radsq_zero_approx(&a, &Module::simple(&a, 0)).unwrap();
    let st = structure(&r.module);
    assert_eq!(st.top, vec![1, 0, 0, 0, 0, 0]);
    // one socle copy per arrow out of 1 whose target has infinite pdim
    let bound = default_bound(&a);
    let mut want = vec![0; 6];
    for ar in a.quiver().arrows_from(0) {
        let t = a.quiver().arrows[ar].target;
        if pdim(&Module::simple(&a, t), bound).is_infinite() {
            want[t] += 1;
        }
    }
    assert_eq!(st.socle, want);
    assert_eq!(want.iter().sum::<usize>(), 4);
    assert!(pdim(&r.module, bound).finite().is_some());
}

#[test]
fn radical_square_zero_is_required() {
    let a = alg("ex4.2", Rationals);
    assert!(matches!(radsq_zero_approx(&a, &Module::simple(&a, 0)), Err(Error::Refusal(_))));
}

#[test]
fn brush_agrees_with_generic_engine() {
    let a = alg("ex3-brush", Fp::new(2).unwrap());
    let s1 = Module::simple(&a, 0);
    let gens = oracles::brush_pinf_indecomposables(&a);
    assert!(gens.iter().all(|g| g.dim() <= 6));
    let generic = minimize_right(&finite_type_approx(&gens, &s1).unwrap()).unwrap();
    let formula = radsq_zero_approx(&a, &s1).unwrap();
    assert!(is_isomorphic(&generic.module, &formula.module));
    assert!(gens.iter().any(|g| is_isomorphic(g, &formula.module)));
}

#[test]
fn ex42_criterion_is_consistent_with_failure() {
    let a = alg("ex4.2", Rationals);
    let d = data(&a, &[0], &["beta"], &["alpha"]);
    let mut probes = amalgam_probes(&a, 12);
    probes.extend(zigzag_probes(&a, &d, 4).unwrap());
    let rep = failure_criterion_check(&a, &d, 12, &probes).unwrap();
    assert_eq!(rep.status, CriterionStatus::ConsistentWithFailure);
    assert_eq!(rep.levels.len(), 12);
    assert!(rep.levels.iter().all(|l| l.passes()));
    assert!(rep.probes.iter().filter(|p| p.in_category).count() >= 5);
}

#[test]
fn ex42_zigzag_modules_have_n_tops_and_n_sockets() {
    let a = alg("ex4.2", Rationals);
    let d = data(&a, &[0], &["beta"], &["alpha"]);
    for n in 1..6 {
        let m = zigzag_module(&a, &d, n).unwrap();
        assert_eq!(m.dims, vec![n, n]);
        assert_eq!(structure(&m).top, vec![n, 0]);
    }
    assert!(matches!(zigzag_module(&a, &d, 0), Err(Error::Input(_))));
}

#[test]
fn ex43_and_ex45_criteria_are_consistent_with_failure() {
    let a = alg("ex4.3", Rationals);
    let d = data(&a, &[0, 5], &["beta", "gamma"], &["alpha", "delta"]);
    let mut probes = amalgam_probes(&a, 12);
    probes.extend(zigzag_probes(&a, &d, 4).unwrap());
    let rep = failure_criterion_check(&a, &d, 12, &probes).unwrap();
    assert_eq!(rep.status, CriterionStatus::ConsistentWithFailure);
    let m3 = zigzag_module(&a, &d, 3).unwrap();
    assert_eq!(m3.top_dims(), vec![2, 0, 0, 0, 0, 1]);

    let b = alg("ex4.5", Rationals);
    let d = data(&b, &[0], &["beta"], &["alpha"]);
    let mut probes = amalgam_probes(&b, 12);
    probes.extend(zigzag_probes(&b, &d, 4).unwrap());
    let rep = failure_criterion_check(&b, &d, 12, &probes).unwrap();
    assert_eq!(rep.status, CriterionStatus::ConsistentWithFailure);
}

#[test]
fn ex44_has_a_probe_violation() {
    let a = alg("ex4.4", Rationals);
    let f = &a.field;
    let d = data(&a, &[0], &["beta"], &["alpha"]);
    let probes = amalgam_probes(&a, 12);
    let rep = failure_criterion_check(&a, &d, 12, &probes).unwrap();
    assert!(rep.levels.iter().all(|l| l.passes()));
    let CriterionStatus::Violated { probe, .. } = rep.status else {
        panic!("expected a violation, got {:?}", rep.status);
    };
    assert!(rep.probes[probe].in_category);
    // (Λe1 x ⊕ Λe3 w)/Λ(βx − αδw)
    let (p1, p3) = (regular_module(&a, 0), regular_module(&a, 2));
    let (s, incs, _) = direct_sum(&a, &[&p1, &p3]);
    let bx = incs[0].apply(f, &p1.act_path(&path(&a, "beta"), &p1.tops[0]));
    let adw = incs[1].apply(f, &p3.act_path(&path(&a, "alpha*delta"), &p3.tops[0]));
    let rel: Vector<Rationals> = bx.iter().zip(&adw).map(|(x, y)| f.sub(x, y)).collect();
    let (amalgam, _) = quotient(&s, &s.generate(&[rel]));
    let hit = rep.probes.iter().zip(&probes).find(|(v, m)| v.violates_ii.is_some() && is_isomorphic(m, &amalgam));
    assert!(hit.is_some());
}

#[test]
fn criterion_data_is_validated() {
    let a = alg("ex4.2", Rationals);
    let loop_back = data(&a, &[1], &["gamma"], &["gamma"]);
    assert!(loop_back.validate(&a).is_ok());
    let wrong_source = data(&a, &[0], &["gamma"], &["alpha"]);
    assert!(matches!(wrong_source.validate(&a), Err(Error::Input(_))));
    let uneven = CriterionData { idempotents: vec![0], p: vec![], q: vec![] };
    assert!(matches!(uneven.validate(&a), Err(Error::Input(_))));
}

#[test]
fn ex42_zigzag_approximations_grow_strictly() {
    let a = alg("ex4.2", Rationals);
    let d = data(&a, &[0], &["beta"], &["alpha"]);
    let dims = zigzag_approx_dims(&a, &d, &Module::simple(&a, 0), 8).unwrap();
    assert_eq!(dims.len(), 8);
    assert!(dims.windows(2).all(|w| w[0] < w[1]), "{dims:?}");
}

#[test]
fn ex85_projective_has_a_filtration_by_approximations() {
    let a = alg("ex8.5", Rationals);
    let gens: Vec<_> = (0..6).map(|v| saguaro_approx(&a, &Module::simple(&a, v), true).unwrap().module).collect();
    let x = regular_module(&a, 0);
    match filtration_witness(&gens, &x, 4) {
        FiltrationOutcome::Found { factors, chain } => {
            assert_eq!(factors.len(), chain.len() - 1);
            let total: usize = factors.iter().map(|&i| gens[i].dim()).sum();
            assert_eq!(total, x.dim());
            for (k, &i) in factors.iter().enumerate() {
                assert_eq!(chain[k].dim() - chain[k + 1].dim(), gens[i].dim());
            }
        }
        other => panic!("expected a filtration, got {other:?}"),
    }
    assert!(matches!(filtration_witness(&gens, &Module::simple(&a, 0), 4), FiltrationOutcome::Exhausted));
}
