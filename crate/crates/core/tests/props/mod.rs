//! Randomized property checks shared by the property suite and the acceptance run.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use saguaro_core::algebra::Algebra;
use saguaro_core::approximation::*;
use saguaro_core::field::{Field, Fp, Rationals};
use saguaro_core::fixtures;
use saguaro_core::graph::graph_equivalent;
use saguaro_core::hom::{decompose, hom_dim, is_homomorphism, is_isomorphic};
use saguaro_core::module::{direct_sum, free_module, quotient, regular_module, Module};
use saguaro_core::saguaro::*;
use saguaro_core::uniserial::{enumerate_uniserials, UniserialRecord};
use saguaro_core::AlgebraRef;

pub const CASES: u32 = 128;

type Check = std::result::Result<(), TestCaseError>;

fn runner(name: &str) -> TestRunner {
    let mut config = Config::with_cases(CASES);
    config.failure_persistence = None;
    config.max_shrink_iters = 64;
    let mut seed = [0u8; 32];
    for (i, b) in name.bytes().enumerate() {
        seed[i % 32] ^= b;
    }
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &seed))
}

fn run<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Check) -> Result<(), String> {
    runner(name).run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn alg<F: Field>(name: &str, f: F) -> AlgebraRef<F> {
    Algebra::build(&fixtures::presentation(name).unwrap(), f).unwrap()
}

fn f3() -> Fp {
    Fp::new(3).unwrap()
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> std::result::Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

// ------------------------------------------------------------ generators

/// Algebras with finitely many uniserials per mast.
const SAGUARO_ALGEBRAS: &[&str] = &["ex4.3", "ex7.3"];
const MODULE_ALGEBRAS: &[&str] = &["ex1.1", "ex4.2", "ex4.3", "ex7.3", "ex3-brush"];

struct Pool<F: Field> {
    alg: AlgebraRef<F>,
    unis: Vec<UniserialRecord<F>>,
}

fn pool<F: Field>(name: &str, f: F) -> Pool<F> {
    let alg = alg(name, f);
    let unis = enumerate_uniserials(&alg).unwrap().into_iter().filter(|u| u.mast.len() > 0).collect();
    Pool { alg, unis }
}

/// Grows a saguaro trunk by trunk; each choice picks one of the extensions that build.
fn grow<F: Field>(p: &Pool<F>, choices: &[usize]) -> Saguaro<F> {
    let first = &p.unis[choices[0] % p.unis.len()];
    let mut s = build_saguaro(vec![first.clone()], vec![]).unwrap();
    for &c in &choices[1..] {
        let last = s.trunks.last().unwrap().mast.path.clone();
        let mut options = Vec::new();
        for u in &p.unis {
            for i in 1..=last.len() {
                for j in 1..=u.mast.len() {
                    let l = Link { q: last.right(i), q_next: u.mast.path.right(j) };
                    let mut trunks = s.trunks.clone();
                    trunks.push(u.clone());
                    let mut links = s.links.clone();
                    links.push(l);
                    if let Ok(t) = build_saguaro(trunks, links) {
                        options.push(t);
                    }
                }
            }
        }
        if options.is_empty() {
            break;
        }
        let k = c % options.len();
        s = options.swap_remove(k);
    }
    s
}

fn saguaro_choices(max_trunks: usize) -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0..SAGUARO_ALGEBRAS.len(), prop::collection::vec(0usize..1000, 1..=max_trunks))
}

/// Quotient of a free module on `gens` by the submodule generated by `rels`.
fn random_module<F: Field>(a: &AlgebraRef<F>, gens: &[usize], rels: &[Vec<i64>]) -> Module<F> {
    let n = a.quiver().n;
    let gens: Vec<usize> = gens.iter().map(|g| g % n).collect();
    let (p, _) = free_module(a, &gens);
    let f = &a.field;
    let vecs: Vec<_> = rels
        .iter()
        .map(|r| (0..p.dim()).map(|i| f.from_i64(r[i % r.len()])).collect::<Vec<_>>())
        .map(|x| p.radical().basis().iter().fold(vec![f.zero(); p.dim()], |acc, b| {
            // project onto the radical so the top survives
            let c = b.iter().zip(&x).fold(f.zero(), |s, (u, v)| f.add(&s, &f.mul(u, v)));
            acc.iter().zip(b).map(|(y, z)| f.add(y, &f.mul(&c, z))).collect()
        }))
        .collect();
    quotient(&p, &p.generate(&vecs)).0
}

fn module_choices() -> impl Strategy<Value = (usize, Vec<usize>, Vec<Vec<i64>>)> {
    (
        0..MODULE_ALGEBRAS.len(),
        prop::collection::vec(0usize..16, 1..=2),
        prop::collection::vec(prop::collection::vec(-1i64..=1, 1..=7), 0..=2),
    )
}

// ------------------------------------------------------------ properties

/// Socle and intersection identities of every grown saguaro.
pub fn saguaro_invariants() -> Result<(), String> {
    let pools: Vec<_> = SAGUARO_ALGEBRAS.iter().map(|n| pool(n, Rationals)).collect();
    run("saguaro invariants", saguaro_choices(4), |(k, ch)| {
        let s = grow(&pools[k], &ch);
        ok(check_invariants(&s))?;
        let sum: usize = s.trunks.iter().map(|t| t.module.dim()).sum();
        prop_assert!(s.module.dim() <= sum);
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                let x = s.intersection(i, j);
                prop_assert!(x.is_subspace_of(&s.field().clone(), &s.images[i]));
                prop_assert!(x.is_subspace_of(&s.field().clone(), &s.images[j]));
            }
        }
        Ok(())
    })
}

/// Twisting the relators by nonzero scalars gives an isomorphic saguaro.
pub fn scalar_twist_isomorphy() -> Result<(), String> {
    let pools: Vec<_> = SAGUARO_ALGEBRAS.iter().map(|n| pool(n, Rationals)).collect();
    let strat = (saguaro_choices(4), prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 3));
    run("scalar twist", strat, |((k, ch), ks)| {
        let s = grow(&pools[k], &ch);
        let f = s.field().clone();
        let ks: Vec<_> = ks[..s.len() - 1].iter().map(|&x| f.from_i64(x)).collect();
        let (t, phi) = ok(scalar_twist(&s, &ks))?;
        ok(check_invariants(&t))?;
        prop_assert!(phi.is_invertible(&f));
        prop_assert!(is_homomorphism(&s.module, &t.module, &phi));
        Ok(())
    })
}

/// Orders produced by move_together are accepted by reorder_trunks.
pub fn move_together_reorders() -> Result<(), String> {
    let pools: Vec<_> = SAGUARO_ALGEBRAS.iter().map(|n| pool(n, Rationals)).collect();
    run("move_together", (saguaro_choices(4), 0usize..100, 0usize..100), |((k, ch), a, b)| {
        let s = grow(&pools[k], &ch);
        let m = s.len();
        if m < 2 {
            return Ok(());
        }
        let (a, b) = (a % m, (a % m + 1 + b % (m - 1)) % m);
        let perm = ok(move_together(&s, (a, b)))?;
        let mut sorted = perm.clone();
        sorted.sort();
        prop_assert_eq!(sorted, (0..m).collect::<Vec<_>>());
        let pa = perm.iter().position(|&x| x == a).unwrap();
        prop_assert_eq!(perm.get(pa + 1), Some(&b));
        let (t, phi) = ok(reorder_trunks(&s, &perm))?;
        ok(check_invariants(&t))?;
        prop_assert!(phi.is_invertible(s.field()));
        prop_assert!(is_homomorphism(&t.module, &s.module, &phi));
        Ok(())
    })
}

/// Over finite V_p, equivalent graphs and isomorphic modules coincide.
pub fn graph_iff_iso() -> Result<(), String> {
    let pools: Vec<_> = SAGUARO_ALGEBRAS.iter().map(|n| pool(n, f3())).collect();
    let strat = (0..SAGUARO_ALGEBRAS.len(), prop::collection::vec(0usize..1000, 1..=3), prop::collection::vec(0usize..1000, 1..=3), any::<bool>());
    run("graph iff iso", strat, |(k, c1, c2, twin)| {
        let s = grow(&pools[k], &c1);
        let t = if twin {
            let f = s.field().clone();
            let ks: Vec<_> = (1..s.len()).map(|_| f.from_i64(2)).collect();
            ok(scalar_twist(&s, &ks))?.0
        } else {
            grow(&pools[k], &c2)
        };
        let same_graph = graph_equivalent(&ok(s.graph())?, &ok(t.graph())?);
        let iso = is_isomorphic(&s.module, &t.module);
        prop_assert_eq!(same_graph, iso, "{} vs {}", s.describe(), t.describe());
        if twin {
            prop_assert!(iso);
        }
        Ok(())
    })
}

/// Module-level and graph-level redundancy searches agree.
pub fn redundancy_agreement() -> Result<(), String> {
    let pools: Vec<_> = SAGUARO_ALGEBRAS.iter().map(|n| pool(n, Rationals)).collect();
    run("redundancy agreement", saguaro_choices(4), |(k, ch)| {
        let s = grow(&pools[k], &ch);
        let r = ok(is_redundant_in(&s, true))?;
        if r.graph_checked {
            prop_assert_eq!(r.pattern.is_some(), r.redundant);
        }
        if let Some(w) = &r.witness {
            let a = ok(subsum_saguaro(&s, &w.first))?;
            let b = ok(subsum_saguaro(&s, &w.second))?;
            prop_assert!(is_isomorphic(&a.module, &b.module));
        }
        Ok(())
    })
}

/// The parts of decompose_saguaro sum to the input and are irredundant.
pub fn decomposition_sums_to_input() -> Result<(), String> {
    let pools: Vec<_> = SAGUARO_ALGEBRAS.iter().map(|n| pool(n, Rationals)).collect();
    run("decompose_saguaro", saguaro_choices(4), |(k, ch)| {
        let s = grow(&pools[k], &ch);
        let parts = ok(decompose_saguaro(&s))?;
        let mods: Vec<&Module<Rationals>> = parts.iter().map(|p| &p.module).collect();
        let (sum, _, _) = direct_sum(s.alg(), &mods);
        prop_assert!(is_isomorphic(&sum, &s.module));
        for p in &parts {
            prop_assert!(!ok(is_redundant(p))?.redundant);
        }
        Ok(())
    })
}

fn iso_classes<F: Field>(ms: &[Module<F>]) -> Vec<(Module<F>, usize)> {
    let mut out: Vec<(Module<F>, usize)> = Vec::new();
    for m in ms {
        match out.iter_mut().find(|(x, _)| is_isomorphic(x, m)) {
            Some(e) => e.1 += 1,
            None => out.push((m.clone(), 1)),
        }
    }
    out
}

/// Indecomposable summands of M ⊕ N are those of M together with those of N.
pub fn krull_schmidt_additivity() -> Result<(), String> {
    let algs: Vec<_> = MODULE_ALGEBRAS.iter().map(|n| alg(n, f3())).collect();
    run("Krull-Schmidt additivity", (module_choices(), module_choices()), |((k, g1, r1), (_, g2, r2))| {
        let a = &algs[k];
        let m = random_module(a, &g1, &r1);
        let n = random_module(a, &g2, &r2);
        let (s, _, _) = direct_sum(a, &[&m, &n]);
        let mut both = decompose(&m).modules();
        both.extend(decompose(&n).modules());
        let want = iso_classes(&both);
        let got = iso_classes(&decompose(&s).modules());
        prop_assert_eq!(want.len(), got.len());
        for (x, c) in &want {
            prop_assert!(got.iter().any(|(y, d)| d == c && is_isomorphic(x, y)));
        }
        Ok(())
    })
}

/// dim Hom(Λe, M) = dim eM.
pub fn hom_from_projective() -> Result<(), String> {
    let algs: Vec<_> = MODULE_ALGEBRAS.iter().map(|n| alg(n, f3())).collect();
    run("dim Hom(Λe, M)", (module_choices(), 0usize..16), |((k, g, r), e)| {
        let a = &algs[k];
        let m = random_module(a, &g, &r);
        let e = e % a.quiver().n;
        prop_assert_eq!(hom_dim(&regular_module(a, e), &m), m.dims[e]);
        Ok(())
    })
}

/// Every map from a generator to the target factors through the approximation.
pub fn approximations_factor() -> Result<(), String> {
    let algs: Vec<_> = MODULE_ALGEBRAS.iter().map(|n| alg(n, f3())).collect();
    let ex73 = alg("ex7.3", f3());
    let ex85 = alg("ex8.5", f3());
    let brush = alg("ex3-brush", f3());
    let strat = (module_choices(), prop::collection::vec(module_choices(), 1..=3), 0usize..4);
    run("approximation factorization", strat, |((k, g, r), gens, engine)| {
        let a = &algs[k];
        let target = random_module(a, &g, &r);
        // the flag marks categories containing the projectives, where the map is onto
        let results = match engine {
            0 | 1 => {
                let mut gs: Vec<Module<Fp>> = Vec::new();
                for (_, gg, rr) in &gens {
                    for x in decompose(&random_module(a, gg, rr)).modules() {
                        if !gs.iter().any(|y| is_isomorphic(y, &x)) {
                            gs.push(x);
                        }
                    }
                }
                let raw = ok(finite_type_approx(&gs, &target))?;
                let min = ok(minimize_right(&raw))?;
                prop_assert!(min.minimal);
                vec![(raw, false), (min, false)]
            }
            2 => {
                let v = g[0] % ex73.quiver().n;
                vec![(ok(leftserial_pinf_approx(&ex73, v))?, true), (ok(leftserial_pd_approx(&ex73, v, g[0] % 3))?, true)]
            }
            _ => {
                let s85 = Module::simple(&ex85, g[0] % 6);
                vec![
                    (ok(saguaro_approx(&ex85, &random_module(&ex85, &g, &r), true))?, false),
                    (ok(saguaro_approx(&ex85, &s85, true))?, true),
                    (ok(radsq_zero_approx(&brush, &random_module(&brush, &g, &r)))?, true),
                ]
            }
        };
        for (res, onto) in &results {
            if *onto {
                prop_assert_eq!(res.map.rank(res.target.field()), res.target.dim());
            }
            ok(check_factorization(res))?;
        }
        Ok(())
    })
}

pub fn all() -> Vec<(&'static str, fn() -> Result<(), String>)> {
    vec![
        ("saguaro invariants", saguaro_invariants),
        ("scalar twist isomorphy", scalar_twist_isomorphy),
        ("move_together accepted by reorder_trunks", move_together_reorders),
        ("graph equivalence iff isomorphism", graph_iff_iso),
        ("module vs graph redundancy", redundancy_agreement),
        ("decompose_saguaro sum", decomposition_sums_to_input),
        ("Krull-Schmidt additivity", krull_schmidt_additivity),
        ("dim Hom(Λe, M) = dim eM", hom_from_projective),
        ("approximation factorization", approximations_factor),
    ]
}
