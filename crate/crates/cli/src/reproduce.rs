//! Reruns each worked example and compares with the recorded graphs and values.

use std::fmt::Write as _;

use serde_json::{json, Value};

use saguaro_core::approximation::*;
use saguaro_core::graph::graph_equivalent;
use saguaro_core::hom::{decompose, is_isomorphic};
use saguaro_core::homological::{default_bound, findim_report, is_projective, pdim, pdim_path_table, syzygy, PathPdim};
use saguaro_core::module::{graph_of, realize_graph, realize_spec, regular_module, structure, Module};
use saguaro_core::uniserial::check_finite_vp;
use saguaro_core::{fixtures, Algebra, AlgebraRef, Field, Rationals, Result};

use crate::graph_lines;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Disagrees with the recorded picture for a documented reason.
    Known,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Known => "known-discrepancy",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub id: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("== {} ({})\n", self.id, if self.passed() { "ok" } else { "MISMATCH" });
        for c in &self.checks {
            let _ = writeln!(s, "  [{}] {}", c.status.tag(), c.name);
            if c.status != Status::Pass && !c.detail.is_empty() {
                for line in c.detail.lines() {
                    let _ = writeln!(s, "      {line}");
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "status": c.status.tag(), "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

type Outcome = Result<(bool, String)>;

struct Run {
    checks: Vec<Check>,
}

impl Run {
    fn push(&mut self, name: &str, status: Status, detail: String) {
        self.checks.push(Check { name: name.into(), status, detail });
    }

    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        match f() {
            Ok((true, d)) => self.push(name, Status::Pass, d),
            Ok((false, d)) => self.push(name, Status::Fail, d),
            Err(e) => self.push(name, Status::Fail, e.to_string()),
        }
    }

    /// A mismatch here is expected and explained by `why`.
    fn known(&mut self, name: &str, why: &str, f: impl FnOnce() -> Outcome) {
        match f() {
            Ok((true, d)) => self.push(name, Status::Pass, d),
            Ok((false, d)) => self.push(name, Status::Known, format!("{why}\n{d}")),
            Err(e) => self.push(name, Status::Fail, e.to_string()),
        }
    }
}

fn alg<F: Field>(name: &str, f: F) -> Result<AlgebraRef<F>> {
    Algebra::build(&fixtures::presentation(name)?, f)
}

/// Graph equivalence with the recorded graph, with both listings on mismatch.
fn golden_match<F: Field>(m: &Module<F>, example: &str, key: &str) -> Outcome {
    let q = m.alg.quiver();
    let want = fixtures::golden_graph(example, key, q)?;
    let got = graph_of(m)?;
    if graph_equivalent(&got, &want) {
        return Ok((true, String::new()));
    }
    Ok((false, format!("computed:\n{}expected:\n{}", graph_lines(&got, q), graph_lines(&want, q))))
}

fn golden_module<F: Field>(a: &AlgebraRef<F>, example: &str, key: &str) -> Result<Module<F>> {
    realize_graph(a, &fixtures::golden_graph(example, key, a.quiver())?)
}

/// Each wanted module is isomorphic to a distinct part.
pub fn iso_multiset<F: Field>(parts: &[Module<F>], wants: &[Module<F>]) -> bool {
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

fn dims_of<F: Field>(ms: &[Module<F>]) -> String {
    let d: Vec<Vec<usize>> = ms.iter().map(|m| m.dims.clone()).collect();
    format!("{d:?}")
}

pub fn ids() -> &'static [&'static str] {
    fixtures::NAMES
}

pub fn reproduce(id: &str) -> Result<Report> {
    let mut r = Run { checks: Vec::new() };
    match id {
        "ex1.1" => ex11(&mut r),
        "ex3-brush" => brush(&mut r),
        "ex4.2" => ex42(&mut r),
        "ex4.3" => criterion_checks(&mut r, "ex4.3", &[0, 5], &["beta", "gamma"], &["alpha", "delta"]),
        "ex4.4" => ex44(&mut r),
        "ex4.5" => criterion_checks(&mut r, "ex4.5", &[0], &["beta"], &["alpha"]),
        "ex7.3" => ex73(&mut r),
        "ex7.5" => ex75(&mut r),
        "ex8.5" => ex85(&mut r),
        "ex8.7" => ex87(&mut r),
        other => return Err(saguaro_core::Error::Input(format!("unknown example `{other}`; known: {}", ids().join(", ")))),
    }
    Ok(Report { id: id.into(), checks: r.checks })
}

/// All examples, run concurrently; the order of the result follows `ids()`.
pub fn reproduce_all() -> Vec<Report> {
    std::thread::scope(|s| {
        let handles: Vec<_> = ids().iter().map(|id| s.spawn(move || reproduce(id).expect("registered id"))).collect();
        handles.into_iter().map(|h| h.join().expect("reproduction thread panicked")).collect()
    })
}

fn ex11(r: &mut Run) {
    r.check("first graph is realized with layers 2,1,1,1,1", || {
        let a = alg("ex1.1", Rationals)?;
        let g = fixtures::golden_graph("ex1.1", "first", a.quiver())?;
        let m = realize_graph(&a, &g)?;
        let layers = structure(&m).layer_dims();
        Ok((layers == [2, 1, 1, 1, 1] && graph_equivalent(&graph_of(&m)?, &g), format!("layers {layers:?}")))
    });
    r.check("second graph is refused", || {
        let a = alg("ex1.1", Rationals)?;
        let g = fixtures::golden_graph("ex1.1", "second", a.quiver())?;
        Ok(match realize_graph(&a, &g) {
            Err(e) => (true, e.to_string()),
            Ok(m) => (false, format!("realized with dims {:?}", m.dims)),
        })
    });
}

fn brush(r: &mut Run) {
    r.check("A(S1) is the brush", || {
        let a = alg("ex3-brush", Rationals)?;
        let res = radsq_zero_approx(&a, &Module::simple(&a, 0))?;
        check_factorization(&res)?;
        golden_match(&res.module, "ex3-brush", "A1")
    });
    r.check("socle is the infinite-pdim part", || {
        let a = alg("ex3-brush", Rationals)?;
        let res = radsq_zero_approx(&a, &Module::simple(&a, 0))?;
        let st = structure(&res.module);
        let bound = default_bound(&a);
        let ok = (0..a.quiver().n).all(|v| st.socle[v] == 0 || pdim(&Module::simple(&a, v), bound).is_infinite());
        Ok((ok && st.socle.iter().sum::<usize>() == 4 && st.top == [1, 0, 0, 0, 0, 0], format!("socle {:?}", st.socle)))
    });
}

fn data<F: Field>(a: &AlgebraRef<F>, idem: &[usize], p: &[&str], q: &[&str]) -> Result<CriterionData> {
    let path = |s: &&str| a.quiver().parse_path(s);
    let d = CriterionData {
        idempotents: idem.to_vec(),
        p: p.iter().map(path).collect::<Result<_>>()?,
        q: q.iter().map(path).collect::<Result<_>>()?,
    };
    d.validate(a)?;
    Ok(d)
}

fn criterion_checks(r: &mut Run, name: &str, idem: &[usize], p: &[&str], q: &[&str]) {
    r.check("criterion holds on levels n <= 12 and all probes", || {
        let a = alg(name, Rationals)?;
        let d = data(&a, idem, p, q)?;
        let mut probes = amalgam_probes(&a, 12);
        probes.extend(zigzag_probes(&a, &d, 4)?);
        let rep = failure_criterion_check(&a, &d, 12, &probes)?;
        let ok = rep.status == CriterionStatus::ConsistentWithFailure && rep.levels.len() == 12;
        Ok((ok, format!("{:?} over {} probes", rep.status, probes.len())))
    });
    r.check("minimal {M_1..M_n}-approximations of S1 grow for n <= 8", || {
        let a = alg(name, Rationals)?;
        let d = data(&a, idem, p, q)?;
        let dims = zigzag_approx_dims(&a, &d, &Module::simple(&a, 0), 8)?;
        Ok((dims.windows(2).all(|w| w[0] < w[1]), format!("{dims:?}")))
    });
}

fn ex42(r: &mut Run) {
    r.check("pdim S2 is infinite in the path table", || {
        let a = alg("ex4.2", Rationals)?;
        let table = pdim_path_table(&a)?;
        let e2 = a.basis_index(&saguaro_core::presentation::Path::trivial(1)).unwrap();
        let gamma = a.basis_index(&a.quiver().parse_path("gamma")?).unwrap();
        let ok = matches!(table[gamma], PathPdim::Infinite { .. })
            && pdim(&Module::simple(&a, 1), default_bound(&a)).is_infinite()
            && table[e2].finite() == Some(0);
        Ok((ok, String::new()))
    });
    criterion_checks(r, "ex4.2", &[0], &["beta"], &["alpha"]);
}

fn ex44(r: &mut Run) {
    r.check("an amalgam of dim <= 12 violates condition (2)", || {
        let a = alg("ex4.4", Rationals)?;
        let d = data(&a, &[0], &["beta"], &["alpha"])?;
        let probes = amalgam_probes(&a, 12);
        let rep = failure_criterion_check(&a, &d, 12, &probes)?;
        Ok(match rep.status {
            CriterionStatus::Violated { probe, condition } => {
                (rep.probes[probe].in_category, format!("probe dims {:?} violates {condition}", probes[probe].dims))
            }
            other => (false, format!("{other:?}")),
        })
    });
}

fn ex73(r: &mut Run) {
    r.check("A(S1) matches the displayed graph", || {
        let a = alg("ex7.3", Rationals)?;
        let res = leftserial_pinf_approx(&a, 0)?;
        check_factorization(&res)?;
        golden_match(&res.module, "ex7.3", "A1")
    });
    r.check("A(S_i) = S_i for i = 2, 3, 4", || {
        let a = alg("ex7.3", Rationals)?;
        let mut bad = Vec::new();
        for v in 1..4 {
            if !is_isomorphic(&leftserial_pinf_approx(&a, v)?.module, &Module::simple(&a, v)) {
                bad.push(v + 1);
            }
        }
        Ok((bad.is_empty(), format!("mismatch at {bad:?}")))
    });
    r.known(
        "A(S5) matches the displayed graph",
        "the displayed graph omits the branch u2, u4 -> u3 -> m5; the 9-node module has pdim 1 and its map onto S5 \
         does not factor through the displayed module",
        || {
            let a = alg("ex7.3", Rationals)?;
            golden_match(&leftserial_pinf_approx(&a, 4)?.module, "ex7.3", "A5")
        },
    );
    r.check("A(S5) matches the recomputed graph", || {
        let a = alg("ex7.3", Rationals)?;
        let res = leftserial_pinf_approx(&a, 4)?;
        check_factorization(&res)?;
        golden_match(&res.module, "ex7.3", "A5-computed")
    });
    r.check("displayed A5 is not an approximation", || {
        let a = alg("ex7.3", Rationals)?;
        let shown = golden_module(&a, "ex7.3", "A5")?;
        let wider = golden_module(&a, "ex7.3", "A5-computed")?;
        let s5 = Module::simple(&a, 4);
        let through = finite_type_approx(&[shown], &s5)?;
        let ok = pdim(&wider, default_bound(&a)).finite() == Some(1) && !factorizes(&wider, &through.module, &through.map, &s5);
        Ok((ok, String::new()))
    });
}

fn ex75(r: &mut Run) {
    r.check("d = 0 gives Λe1", || {
        let a = alg("ex7.5", Rationals)?;
        Ok((is_isomorphic(&leftserial_pd_approx(&a, 0, 0)?.module, &regular_module(&a, 0)), String::new()))
    });
    for d in 1..=3 {
        r.check(&format!("d = {d} matches the displayed graph"), || {
            let a = alg("ex7.5", Rationals)?;
            let res = leftserial_pd_approx(&a, 0, d)?;
            check_factorization(&res)?;
            golden_match(&res.module, "ex7.5", &format!("d{d}"))
        });
    }
    r.check("approximations stabilize from d = 3 on", || {
        let a = alg("ex7.5", Rationals)?;
        let base = leftserial_pd_approx(&a, 0, 3)?.module;
        let mut ok = is_isomorphic(&leftserial_pinf_approx(&a, 0)?.module, &base);
        for d in 4..=5 {
            ok &= is_isomorphic(&leftserial_pd_approx(&a, 0, d)?.module, &base);
        }
        Ok((ok, String::new()))
    });
}

fn ex85(r: &mut Run) {
    r.check("V_p is finite", || {
        let a = alg("ex8.5", Rationals)?;
        Ok((check_finite_vp(&a)?.holds, String::new()))
    });
    r.check("A(S_i) are the six length-two uniserials", || {
        let a = alg("ex8.5", Rationals)?;
        let mut detail = String::new();
        let mut ok = true;
        for v in 0..6 {
            let res = saguaro_approx(&a, &Module::simple(&a, v), true)?;
            check_factorization(&res)?;
            let (m, d) = golden_match(&res.module, "ex8.5", &format!("A{}", v + 1))?;
            if !m {
                ok = false;
                let _ = writeln!(detail, "S{}:\n{d}", v + 1);
            }
        }
        Ok((ok, detail))
    });
    r.check("sup pdim A_i = 1", || {
        let a = alg("ex8.5", Rationals)?;
        let mods = (0..6).map(|v| saguaro_approx(&a, &Module::simple(&a, v), true).map(|r| r.module)).collect::<Result<Vec<_>>>()?;
        let rep = findim_report(&mods, default_bound(&a))?;
        Ok((rep.value == 1, format!("pdims {:?}", rep.pdims)))
    });
}

fn ex87(r: &mut Run) {
    let modules = |a: &AlgebraRef<Rationals>| -> Result<Vec<Module<Rationals>>> {
        (1..=9).map(|i| realize_spec(a, &fixtures::golden_module("ex8.7", &format!("A{i}"), &a.pres)?)).collect()
    };
    r.check("Ω¹(A1) has the displayed summands", || {
        let a = alg("ex8.7", Rationals)?;
        let o1 = decompose(&syzygy(&modules(&a)?[0], 1)).modules();
        let want = ["omega1-a", "omega1-b", "omega1-c", "omega1-d", "omega1-e"]
            .iter()
            .map(|k| golden_module(&a, "ex8.7", k))
            .collect::<Result<Vec<_>>>()?;
        Ok((iso_multiset(&o1, &want), format!("summand dims {}", dims_of(&o1))))
    });
    r.check("Ω²(A1) is projective, Λe3 ⊕ Λe7", || {
        let a = alg("ex8.7", Rationals)?;
        let o2 = syzygy(&modules(&a)?[0], 2);
        let parts = decompose(&o2).modules();
        let want = [golden_module(&a, "ex8.7", "omega2-a")?, golden_module(&a, "ex8.7", "omega2-b")?];
        let projs = [regular_module(&a, 2), regular_module(&a, 6)];
        let ok = is_projective(&o2) && iso_multiset(&parts, &want) && iso_multiset(&parts, &projs);
        Ok((ok, format!("summand dims {}", dims_of(&parts))))
    });
    r.check("sup pdim A_i = 2", || {
        let a = alg("ex8.7", Rationals)?;
        let rep = findim_report(&modules(&a)?, default_bound(&a))?;
        Ok((rep.value == 2, format!("pdims {:?}", rep.pdims)))
    });
}
