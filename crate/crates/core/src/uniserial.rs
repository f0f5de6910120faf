//! Uniserial modules, masts, condition (N) and the finite-variety criterion.

use crate::algebra::{Algebra, AlgebraRef};
use crate::error::{inconsistent, refuse, Result};
use crate::field::{Field, Fp};
use crate::hom::{finite_count, is_isomorphic, nth_tuple};
use crate::linalg::{unit, Mat};
use crate::module::{quotient, regular_module, structure, Module};
use crate::presentation::Path;

const MAX_ASSIGNMENTS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mast {
    pub path: Path,
    /// e(0), …, e(l).
    pub vertices: Vec<usize>,
}

impl Mast {
    pub fn new<F: Field>(alg: &Algebra<F>, path: Path) -> Self {
        let vertices = alg.quiver().vertex_sequence(&path);
        Mast { path, vertices }
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_trivial()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    MonomialCanonical,
    /// Quotient of Λe killing every arrow step off the mast, over a non-monomial algebra.
    CanonicalQuotient,
    FiniteFieldEnumerated,
    UserSuppliedVerified,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::MonomialCanonical => "monomial-canonical",
            Regime::CanonicalQuotient => "canonical-quotient",
            Regime::FiniteFieldEnumerated => "finite-field-enumerated",
            Regime::UserSuppliedVerified => "user-supplied-verified",
        }
    }
}

#[derive(Clone, Debug)]
pub struct UniserialRecord<F: Field> {
    pub mast: Mast,
    pub module: Module<F>,
    pub regime: Regime,
    /// Some top element has an edge path as graph.
    pub edge_path: bool,
}

/// Paths of length below the Loewy length that are nonzero in Λ.
pub fn nonzero_paths<F: Field>(alg: &AlgebraRef<F>) -> Vec<Path> {
    let q = alg.quiver();
    let mut out: Vec<Path> = (0..q.n).map(Path::trivial).collect();
    let mut frontier = out.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            for a in q.arrows_from(q.target(p)) {
                let ap = Path::arrow(q, a).after(p);
                if !alg.nf_path(&ap).is_empty() {
                    next.push(ap);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Vectors α_k⋯α_1·x of the mast inside Λe_{e(0)}, with x the top.
fn mast_segments<F: Field>(p: &Module<F>, path: &Path) -> Vec<Vec<F::E>> {
    let mut x = p.tops[0].clone();
    let mut out = vec![x.clone()];
    for &a in &path.arrows {
        x = p.act(a, &x);
        out.push(x.clone());
    }
    out
}

/// Λe / Λ{β·α_k⋯α_1 : β ≠ α_{k+1}}, when the mast survives.
pub fn canonical_quotient<F: Field>(alg: &AlgebraRef<F>, path: &Path) -> Option<Module<F>> {
    let f = &alg.field;
    let q = alg.quiver();
    let p = regular_module(alg, path.source);
    let segs = mast_segments(&p, path);
    let mut kill = Vec::new();
    for (k, s) in segs.iter().enumerate() {
        let v = if k == 0 { path.source } else { q.arrows[path.arrows[k - 1]].target };
        for b in q.arrows_from(v) {
            if path.arrows.get(k) != Some(&b) {
                kill.push(p.act(b, s));
            }
        }
    }
    let w = p.generate(&kill);
    if w.contains(f, segs.last().unwrap()) {
        return None;
    }
    let (u, _) = quotient(&p, &w);
    debug_assert_eq!(u.dim(), path.len() + 1);
    Some(u)
}

/// Every uniserial with mast p, up to isomorphism, by enumerating the off-mast coefficients over a finite field.
pub fn enumerate_with_mast<F: Field>(alg: &AlgebraRef<F>, path: &Path) -> Result<Vec<(Module<F>, bool)>> {
    let f = &alg.field;
    let q = alg.quiver();
    let verts = q.vertex_sequence(path);
    let l = path.len();
    let mut dims = vec![0; q.n];
    let mut loc = Vec::with_capacity(l + 1);
    for &v in &verts {
        loc.push(dims[v]);
        dims[v] += 1;
    }
    // (arrow, from k, to m)
    let mut vars = Vec::new();
    for k in 0..=l {
        for b in q.arrows_from(verts[k]) {
            if k < l && path.arrows[k] == b {
                continue;
            }
            for m in k + 1..=l {
                if verts[m] == q.arrows[b].target {
                    vars.push((b, k, m));
                }
            }
        }
    }
    let Some(total) = finite_count(f, vars.len(), MAX_ASSIGNMENTS) else {
        return refuse(format!(
            "{} free off-mast coefficients exceed the enumeration cap for mast {}",
            vars.len(),
            q.path_name(path)
        ));
    };
    let dim = l + 1;
    let offsets = crate::module::offsets_of(&dims);
    let top = unit(f, dim, offsets[verts[0]] + loc[0]);
    let mut out: Vec<(Module<F>, bool)> = Vec::new();
    for idx in 0..total {
        let c = nth_tuple(f, vars.len(), idx);
        let mut mats: Vec<Mat<F>> = q.arrows.iter().map(|a| Mat::zeros(f, dims[a.target], dims[a.source])).collect();
        for k in 0..l {
            mats[path.arrows[k]].set(loc[k + 1], loc[k], f.one());
        }
        for ((b, k, m), x) in vars.iter().zip(&c) {
            mats[*b].set(loc[*m], loc[*k], x.clone());
        }
        let Ok(u) = Module::new(alg.clone(), dims.clone(), mats, vec![top.clone()]) else { continue };
        let edge = c.iter().all(|x| f.is_zero(x));
        match out.iter_mut().find(|(m, _)| is_isomorphic(m, &u)) {
            Some(e) => e.1 |= edge,
            None => out.push((u, edge)),
        }
    }
    Ok(out)
}

/// All radical layers one-dimensional and p·x ≠ 0 for the marked top x.
pub fn verify_uniserial<F: Field>(m: &Module<F>, path: &Path) -> Result<UniserialRecord<F>> {
    let f = m.field();
    if structure(m).layer_dims().iter().any(|&d| d != 1) {
        return refuse("some radical layer is not one-dimensional");
    }
    let (tops, _) = m.generating_tops();
    if tops.len() != 1 || crate::linalg::is_zero_vec(f, &m.act_path(path, &tops[0])) {
        return refuse("the mast annihilates the top element");
    }
    if m.loewy_length() != path.len() + 1 {
        return refuse("mast length does not match the composition length");
    }
    Ok(UniserialRecord { mast: Mast::new(&m.alg, path.clone()), module: m.clone(), regime: Regime::UserSuppliedVerified, edge_path: false })
}

/// A uniserial module with mast p, or `None` if none exists in the supported regime.
pub fn uniserial_from_mast<F: Field>(alg: &AlgebraRef<F>, path: &Path) -> Result<Option<UniserialRecord<F>>> {
    if alg.nf_path(path).is_empty() {
        return Ok(None);
    }
    let mast = Mast::new(alg, path.clone());
    if alg.is_monomial() {
        let u = canonical_quotient(alg, path).expect("nonzero monomial path survives");
        return Ok(Some(UniserialRecord { mast, module: u, regime: Regime::MonomialCanonical, edge_path: true }));
    }
    if let Some(u) = canonical_quotient(alg, path) {
        return Ok(Some(UniserialRecord { mast, module: u, regime: Regime::CanonicalQuotient, edge_path: true }));
    }
    if alg.field.order().is_none() {
        return refuse(format!(
            "mast {} over a non-monomial algebra over Q: supply a module spec for verification",
            alg.path_name(path)
        ));
    }
    let found = enumerate_with_mast(alg, path)?;
    Ok(found.into_iter().next().map(|(module, edge_path)| UniserialRecord {
        mast,
        module,
        regime: Regime::FiniteFieldEnumerated,
        edge_path,
    }))
}

/// All uniserial modules up to isomorphism in the supported regime.
pub fn enumerate_uniserials<F: Field>(alg: &AlgebraRef<F>) -> Result<Vec<UniserialRecord<F>>> {
    let mut out: Vec<UniserialRecord<F>> = Vec::new();
    if alg.is_monomial() {
        for p in nonzero_paths(alg) {
            if let Some(r) = uniserial_from_mast(alg, &p)? {
                out.push(r);
            }
        }
        return Ok(out);
    }
    if alg.field.order().is_none() {
        return refuse("enumerating uniserials over a non-monomial algebra needs a finite field (use --field fp:P)");
    }
    enumerate_brute(alg)
}

/// Finite-field enumeration over every nonzero path, merged up to isomorphism.
fn enumerate_brute<F: Field>(alg: &AlgebraRef<F>) -> Result<Vec<UniserialRecord<F>>> {
    let mut out: Vec<UniserialRecord<F>> = Vec::new();
    for p in nonzero_paths(alg) {
        for (u, edge) in enumerate_with_mast(alg, &p)? {
            match out.iter_mut().find(|r| r.module.dims == u.dims && is_isomorphic(&r.module, &u)) {
                Some(r) => r.edge_path |= edge,
                None => out.push(UniserialRecord {
                    mast: Mast::new(alg, p.clone()),
                    module: u,
                    regime: Regime::FiniteFieldEnumerated,
                    edge_path: edge,
                }),
            }
        }
    }
    Ok(out)
}

/// Masts of positive and zero length, witnessed by a module.
pub fn masts<F: Field>(alg: &AlgebraRef<F>) -> Result<Vec<Mast>> {
    let mut out = Vec::new();
    for p in nonzero_paths(alg) {
        let exists = if alg.is_monomial() || canonical_quotient(alg, &p).is_some() {
            true
        } else if alg.field.order().is_some() {
            !enumerate_with_mast(alg, &p)?.is_empty()
        } else {
            return refuse("mast existence over a non-monomial algebra over Q is not decidable here");
        };
        if exists {
            out.push(Mast::new(alg, p));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub holds: bool,
    /// (arrow, mast) pairs violating the condition.
    pub witnesses: Vec<(usize, Path)>,
    /// Set when the check ran over a finite field different from the algebra's.
    pub field_note: Option<String>,
}

/// The algebra over the smallest prime field where it builds with the same dimension.
fn finite_model<F: Field>(alg: &AlgebraRef<F>) -> Result<AlgebraRef<Fp>> {
    for p in [2, 3, 5, 7, 11, 13] {
        if let Ok(b) = Algebra::build(&alg.pres, Fp::new(p).unwrap()) {
            if b.dim() == alg.dim() {
                return Ok(b);
            }
        }
    }
    refuse("no small prime field keeps the algebra's dimension")
}

fn mast_list<F: Field>(alg: &AlgebraRef<F>) -> Result<(Vec<Mast>, Option<String>)> {
    if alg.is_monomial() || alg.field.order().is_some() {
        return Ok((masts(alg)?, None));
    }
    let b = finite_model(alg)?;
    Ok((masts(&b)?, Some(format!("masts decided over {}", b.field.config()))))
}

fn check_masts<F: Field>(alg: &AlgebraRef<F>, strict: bool) -> Result<ConditionReport> {
    let q = alg.quiver();
    let (ms, note) = mast_list(alg)?;
    let mut witnesses = Vec::new();
    for (ai, a) in q.arrows.iter().enumerate() {
        for m in &ms {
            if m.len() == 0 || m.path.source != a.source || q.target(&m.path) != a.target {
                continue;
            }
            let first = m.path.first_arrow() == Some(ai);
            let last = m.path.last_arrow() == Some(ai);
            let ok = if strict { first } else { first || last };
            if !ok {
                witnesses.push((ai, m.path.clone()));
            }
        }
    }
    Ok(ConditionReport { holds: witnesses.is_empty(), witnesses, field_note: note })
}

/// Condition (N): each mast parallel to an arrow α starts or ends with α.
pub fn check_condition_n<F: Field>(alg: &AlgebraRef<F>) -> Result<ConditionReport> {
    check_masts(alg, false)
}

#[derive(Clone, Debug)]
pub struct FiniteVpReport {
    /// Masts parallel to an arrow α all start with α.
    pub condition3: ConditionReport,
    /// Every uniserial graph is an edge path; `None` when the enumeration was refused.
    pub condition5: Option<bool>,
    pub non_edge_paths: Vec<Path>,
    pub holds: bool,
}

/// Masts parallel to arrows (3), cross-checked against edge-path graphs of all uniserials (5).
pub fn check_finite_vp<F: Field>(alg: &AlgebraRef<F>) -> Result<FiniteVpReport> {
    let condition3 = check_masts(alg, true)?;
    let (c5, bad) = if alg.field.order().is_some() {
        edge_path_check(alg)
    } else {
        edge_path_check(&finite_model(alg)?)
    };
    if let Some(c5) = c5 {
        if c5 != condition3.holds {
            return inconsistent(format!(
                "condition (3) gives {} but the uniserial graphs give {}",
                condition3.holds, c5
            ));
        }
    }
    Ok(FiniteVpReport { holds: condition3.holds, condition3, condition5: c5, non_edge_paths: bad })
}

fn edge_path_check<F: Field>(alg: &AlgebraRef<F>) -> (Option<bool>, Vec<Path>) {
    match enumerate_brute(alg) {
        Ok(list) => {
            let bad: Vec<Path> = list.into_iter().filter(|r| !r.edge_path).map(|r| r.mast.path).collect();
            (Some(bad.is_empty()), bad)
        }
        Err(_) => (None, Vec::new()),
    }
}
