//! One line per acceptance criterion. Known failures are listed in EXPECTED_FAILURES.

mod oracles;
mod props;

use saguaro_core::algebra::Algebra;
use saguaro_core::approximation::*;
use saguaro_core::field::{Field, Fp, Rationals};
use saguaro_core::fixtures;
use saguaro_core::graph::graph_equivalent;
use saguaro_core::hom::{decompose, is_isomorphic};
use saguaro_core::homological::*;
use saguaro_core::module::{graph_of, realize_graph, realize_spec, regular_module, structure, Module};
use saguaro_core::presentation::Path;
use saguaro_core::saguaro::enumerate_irredundant;
use saguaro_core::uniserial::check_finite_vp;
use saguaro_core::AlgebraRef;

/// The displayed A₅ of the left serial example is not reproduced; see the README.
const EXPECTED_FAILURES: &[usize] = &[1];

type Verdict = Result<String, String>;

fn alg<F: Field>(name: &str, f: F) -> AlgebraRef<F> {
    Algebra::build(&fixtures::presentation(name).unwrap(), f).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn golden<F: Field>(a: &AlgebraRef<F>, ex: &str, key: &str) -> Result<Module<F>, String> {
    realize_graph(a, &fixtures::golden_graph(ex, key, a.quiver()).map_err(e)?).map_err(e)
}

fn same_graph<F: Field>(m: &Module<F>, ex: &str, key: &str) -> Result<bool, String> {
    let want = fixtures::golden_graph(ex, key, m.alg.quiver()).map_err(e)?;
    Ok(graph_equivalent(&graph_of(m).map_err(e)?, &want))
}

fn iso_multiset<F: Field>(parts: &[Module<F>], wants: &[Module<F>]) -> bool {
    let mut used = vec![false; parts.len()];
    parts.len() == wants.len()
        && wants.iter().all(|w| match (0..parts.len()).find(|&i| !used[i] && is_isomorphic(&parts[i], w)) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        })
}

fn path<F: Field>(a: &AlgebraRef<F>, s: &str) -> Path {
    a.quiver().parse_path(s).unwrap()
}

fn data<F: Field>(a: &AlgebraRef<F>, idem: &[usize], p: &[&str], q: &[&str]) -> CriterionData {
    CriterionData {
        idempotents: idem.to_vec(),
        p: p.iter().map(|s| path(a, s)).collect(),
        q: q.iter().map(|s| path(a, s)).collect(),
    }
}

fn left_serial_example() -> Verdict {
    let a = alg("ex7.3", Rationals);
    let a1 = leftserial_pinf_approx(&a, 0).map_err(e)?;
    ensure(same_graph(&a1.module, "ex7.3", "A1")?, "A1 graph differs")?;
    for v in 1..4 {
        let r = leftserial_pinf_approx(&a, v).map_err(e)?;
        ensure(is_isomorphic(&r.module, &Module::simple(&a, v)), format!("A(S{}) is not S{}", v + 1, v + 1))?;
    }
    let a5 = leftserial_pinf_approx(&a, 4).map_err(e)?;
    if !same_graph(&a5.module, "ex7.3", "A5")? {
        return Err(format!(
            "A1 and A(S2..S4) match; A5 differs from the displayed graph (computed top {:?}, dim {} vs 6)",
            a5.module.top_dims(),
            a5.module.dim()
        ));
    }
    Ok("A1, A5 and A(S2..S4) match".into())
}

fn pd_example() -> Verdict {
    let a = alg("ex7.5", Rationals);
    let r0 = leftserial_pd_approx(&a, 0, 0).map_err(e)?;
    ensure(is_isomorphic(&r0.module, &regular_module(&a, 0)), "d = 0 is not Λe1")?;
    let mut dims = Vec::new();
    for d in 1..=3 {
        let r = leftserial_pd_approx(&a, 0, d).map_err(e)?;
        ensure(same_graph(&r.module, "ex7.5", &format!("d{d}"))?, format!("d = {d} graph differs"))?;
        dims.push(r.dim());
    }
    let r3 = leftserial_pd_approx(&a, 0, 3).map_err(e)?;
    for d in 4..=5 {
        ensure(is_isomorphic(&leftserial_pd_approx(&a, 0, d).map_err(e)?.module, &r3.module), format!("d = {d} moved"))?;
    }
    ensure(is_isomorphic(&leftserial_pinf_approx(&a, 0).map_err(e)?.module, &r3.module), "pinf differs from d = 3")?;
    Ok(format!("d = 1..3 dims {dims:?}, stable from d = 3"))
}

fn saguaro_example() -> Verdict {
    let a = alg("ex8.5", Rationals);
    ensure(check_finite_vp(&a).map_err(e)?.holds, "V_p not finite")?;
    let mut mods = Vec::new();
    for v in 0..6 {
        let r = saguaro_approx(&a, &Module::simple(&a, v), true).map_err(e)?;
        ensure(same_graph(&r.module, "ex8.5", &format!("A{}", v + 1))?, format!("A{} differs", v + 1))?;
        mods.push(r.module);
    }
    let rep = findim_report(&mods, default_bound(&a)).map_err(e)?;
    ensure(rep.value == 1, format!("sup pdim {}", rep.value))?;
    Ok("six length-two uniserials, sup pdim 1".into())
}

fn binomial_example() -> Verdict {
    let a = alg("ex8.7", Rationals);
    let mods = (1..=9)
        .map(|i| realize_spec(&a, &fixtures::golden_module("ex8.7", &format!("A{i}"), &a.pres).map_err(e)?).map_err(e))
        .collect::<Result<Vec<_>, String>>()?;
    let o1 = decompose(&syzygy(&mods[0], 1)).modules();
    let keys1 = ["omega1-a", "omega1-b", "omega1-c", "omega1-d", "omega1-e"];
    let want1 = keys1.iter().map(|k| golden(&a, "ex8.7", k)).collect::<Result<Vec<_>, _>>()?;
    ensure(iso_multiset(&o1, &want1), "Ω¹ summands differ")?;
    for s in &o1 {
        let g = graph_of(s).map_err(e)?;
        let hit = keys1.iter().any(|k| graph_equivalent(&g, &fixtures::golden_graph("ex8.7", k, a.quiver()).unwrap()));
        ensure(hit, format!("Ω¹ summand with dims {:?} has an unexpected graph", s.dims))?;
    }
    let o2 = syzygy(&mods[0], 2);
    ensure(is_projective(&o2), "Ω² not projective")?;
    let parts = decompose(&o2).modules();
    let projs = [regular_module(&a, 2), regular_module(&a, 6)];
    ensure(iso_multiset(&parts, &projs), "Ω² is not Λe3 ⊕ Λe7")?;
    let want2 = [golden(&a, "ex8.7", "omega2-a")?, golden(&a, "ex8.7", "omega2-b")?];
    ensure(iso_multiset(&parts, &want2), "Ω² graphs differ")?;
    let rep = findim_report(&mods, default_bound(&a)).map_err(e)?;
    ensure(rep.value == 2, format!("sup pdim {}", rep.value))?;
    Ok(format!("Ω¹ dims {}, Ω² = Λe3 ⊕ Λe7, pdims {:?}", syzygy(&mods[0], 1).dim(), rep.pdims))
}

/// Condition (1) for n ≤ 12, every probe, and strict growth of the approximations.
fn criterion_pipeline<F: Field>(a: &AlgebraRef<F>, d: &CriterionData) -> Verdict {
    let mut probes = amalgam_probes(a, 12);
    probes.extend(zigzag_probes(a, d, 4).map_err(e)?);
    let rep = failure_criterion_check(a, d, 12, &probes).map_err(e)?;
    ensure(rep.levels.len() == 12 && rep.levels.iter().all(|l| l.passes()), "condition (1) fails")?;
    ensure(rep.status == CriterionStatus::ConsistentWithFailure, format!("{:?}", rep.status))?;
    let dims = zigzag_approx_dims(a, d, &Module::simple(a, d.idempotents[0]), 8).map_err(e)?;
    ensure(dims.windows(2).all(|w| w[0] < w[1]), format!("dims not increasing: {dims:?}"))?;
    Ok(format!("{} probes, dims {dims:?}", probes.len()))
}

fn zigzag_example() -> Verdict {
    let a = alg("ex4.2", Rationals);
    let table = pdim_path_table(&a).map_err(e)?;
    let gamma = a.basis_index(&path(&a, "gamma")).unwrap();
    ensure(matches!(table[gamma], PathPdim::Infinite { .. }), "Λγ has finite pdim")?;
    ensure(pdim(&Module::simple(&a, 1), default_bound(&a)).is_infinite(), "pdim S2 finite")?;
    criterion_pipeline(&a, &data(&a, &[0], &["beta"], &["alpha"]))
}

fn other_criterion_examples() -> Verdict {
    let a = alg("ex4.3", Rationals);
    let m2 = criterion_pipeline(&a, &data(&a, &[0, 5], &["beta", "gamma"], &["alpha", "delta"]))?;
    let b = alg("ex4.4", Rationals);
    let probes = amalgam_probes(&b, 12);
    let rep = failure_criterion_check(&b, &data(&b, &[0], &["beta"], &["alpha"]), 12, &probes).map_err(e)?;
    let CriterionStatus::Violated { probe, condition } = rep.status else {
        return Err(format!("no violation over 4.4: {:?}", rep.status));
    };
    ensure(rep.probes[probe].in_category && condition.starts_with("(2"), "violation is not a condition (2) probe")?;
    let c = alg("ex4.5", Rationals);
    criterion_pipeline(&c, &data(&c, &[0], &["beta"], &["alpha"]))?;
    Ok(format!("m = 2 passes ({m2}); 4.4 violates {condition}; 4.5 passes"))
}

fn brush_example() -> Verdict {
    let a = alg("ex3-brush", Rationals);
    let r = radsq_zero_approx(&a, &Module::simple(&a, 0)).map_err(e)?;
    let st = structure(&r.module);
    ensure(st.top == [1, 0, 0, 0, 0, 0], "top is not S1")?;
    let bound = default_bound(&a);
    let inf: Vec<bool> = (0..6).map(|v| pdim(&Module::simple(&a, v), bound).is_infinite()).collect();
    ensure((0..6).all(|v| st.socle[v] == 0 || inf[v]) && st.socle.iter().sum::<usize>() == 4, "socle is not the infinite part")?;
    ensure(same_graph(&r.module, "ex3-brush", "A1")?, "brush graph differs")?;
    let b = alg("ex3-brush", Fp::new(2).unwrap());
    let s1 = Module::simple(&b, 0);
    let gens = oracles::brush_pinf_indecomposables(&b);
    let generic = minimize_right(&finite_type_approx(&gens, &s1).map_err(e)?).map_err(e)?;
    let formula = radsq_zero_approx(&b, &s1).map_err(e)?;
    ensure(is_isomorphic(&generic.module, &formula.module), "generic engine disagrees")?;
    Ok(format!("socle {:?}, generic engine over {} indecomposables agrees", st.socle, gens.len()))
}

fn graph_semantics_example() -> Verdict {
    let a = alg("ex1.1", Rationals);
    let g = fixtures::golden_graph("ex1.1", "first", a.quiver()).map_err(e)?;
    let m = realize_graph(&a, &g).map_err(e)?;
    ensure(structure(&m).layer_dims() == [2, 1, 1, 1, 1], "layer dims differ")?;
    ensure(graph_equivalent(&graph_of(&m).map_err(e)?, &g), "realized module has another graph")?;
    let g2 = fixtures::golden_graph("ex1.1", "second", a.quiver()).map_err(e)?;
    ensure(realize_graph(&a, &g2).is_err(), "second graph was realized")?;
    Ok("first graph realized, second refused".into())
}

fn property_suites() -> Verdict {
    let mut failed = Vec::new();
    let all = props::all();
    for (name, f) in &all {
        if let Err(msg) = f() {
            failed.push(format!("{name}: {msg}"));
        }
    }
    ensure(failed.is_empty(), failed.join("; "))?;
    Ok(format!("{} suites x {} cases", all.len(), props::CASES))
}

fn oracle_equivalence() -> Verdict {
    let a = alg("ex8.5", Fp::new(2).unwrap());
    let list = enumerate_irredundant(&a).map_err(e)?;
    let brute = oracles::brute_force_saguaros(&a, 4);
    for s in &brute {
        ensure(oracles::contains_iso(&list, &s.module), format!("missing {}", s.describe()))?;
    }
    for s in &list {
        ensure(s.len() > 4 || oracles::contains_iso(&brute, &s.module), format!("extra {}", s.describe()))?;
    }
    Ok(format!("{} irredundant saguaros on both sides", list.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("left serial P-infinity approximations", left_serial_example),
        ("P(d) approximations and stabilization", pd_example),
        ("saguaro approximations over finite V_p", saguaro_example),
        ("binomial example syzygies", binomial_example),
        ("zigzag failure criterion", zigzag_example),
        ("criterion on the other examples", other_criterion_examples),
        ("radical square zero brush", brush_example),
        ("graph semantics", graph_semantics_example),
        ("property suites", property_suites),
        ("saguaro enumeration oracle", oracle_equivalence),
    ];
    let mut failing = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        match f() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                let tag = if EXPECTED_FAILURES.contains(&n) { " (documented)" } else { "" };
                println!("criterion {n:>2} FAIL{tag}  {name}: {detail}");
                failing.push(n);
            }
        }
    }
    assert_eq!(failing, EXPECTED_FAILURES, "unexpected acceptance outcome");
}
