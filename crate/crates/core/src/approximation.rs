//! Right approximations: finite generator lists, left serial saguaro searches,
//! radical square zero algebras, saguaro categories and a failure criterion.

use std::collections::HashMap;

use crate::algebra::AlgebraRef;
use crate::error::{inconsistent, input, refuse, Result};
use crate::field::Field;
use crate::graph::{validate_graph, LayeredGraph};
use crate::hom::{
    decompose, finite_count, hom_mats, is_homomorphism, is_isomorphic, is_nilpotent, nth_tuple, random_coeffs, trace,
    vectorize,
};
use crate::homological::{default_bound, pdim, projective_cover, syzygy};
use crate::linalg::{is_zero_vec, Mat, Subspace, Vector};
use crate::module::{direct_sum, quotient, realize_graph, regular_module, structure, sub, Module};
use crate::presentation::Path;
use crate::random::rng;
use crate::saguaro::{build_saguaro, enumerate_irredundant, induced_map, Link, Saguaro};
use crate::uniserial::{check_finite_vp, uniserial_from_mast, UniserialRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    FiniteList,
    PinfLeftSerial,
    PdLeftSerial(usize),
    Saguaros,
    SaguarosPinf,
    RadSquareZero,
}

impl Category {
    pub fn tag(&self) -> String {
        match self {
            Category::FiniteList => "list".into(),
            Category::PinfLeftSerial => "pinf-left-serial".into(),
            Category::PdLeftSerial(d) => format!("pd{d}-left-serial"),
            Category::Saguaros => "saguaros".into(),
            Category::SaguarosPinf => "saguaros-pinf".into(),
            Category::RadSquareZero => "pinf-radical-square-zero".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ApproximationResult<F: Field> {
    pub target: Module<F>,
    pub category: Category,
    /// Generators, or probe modules for the special algorithms.
    pub gens: Vec<Module<F>>,
    /// Summands of A as (generator index, component A_i → M); empty for the special algorithms.
    pub parts: Vec<(usize, Mat<F>)>,
    pub module: Module<F>,
    /// dim M × dim A.
    pub map: Mat<F>,
    pub minimal: bool,
    /// Generators certified indecomposable by the decomposition routine.
    pub certified: bool,
    pub saguaro: Option<Saguaro<F>>,
}

impl<F: Field> ApproximationResult<F> {
    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// Multiplicity of each generator in A.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut out = vec![0; self.gens.len()];
        for (i, _) in &self.parts {
            out[*i] += 1;
        }
        out
    }
}

fn assemble<F: Field>(target: &Module<F>, gens: &[Module<F>], parts: &[(usize, Mat<F>)]) -> (Module<F>, Mat<F>) {
    let f = target.field();
    if parts.is_empty() {
        return (Module::zero(&target.alg), Mat::zeros(f, target.dim(), 0));
    }
    let mods: Vec<&Module<F>> = parts.iter().map(|(i, _)| &gens[*i]).collect();
    let (a, _, projs) = direct_sum(&target.alg, &mods);
    let mut map = Mat::zeros(f, target.dim(), a.dim());
    for ((_, g), p) in parts.iter().zip(&projs) {
        map = map.add(f, &g.mul(f, p));
    }
    (a, map)
}

/// Every map B → M factors through `map`: A → M.
pub fn factorizes<F: Field>(b: &Module<F>, a: &Module<F>, map: &Mat<F>, m: &Module<F>) -> bool {
    let f = m.field();
    let want = hom_mats(b, m);
    if want.is_empty() {
        return true;
    }
    let mut span = Subspace::zero(m.dim() * b.dim());
    for h in hom_mats(b, a) {
        span.add_vector(f, &vectorize(&map.mul(f, &h)));
        if span.dim() == want.len() {
            return true;
        }
    }
    span.dim() == want.len()
}

pub fn check_factorization<F: Field>(r: &ApproximationResult<F>) -> Result<()> {
    if !is_homomorphism(&r.module, &r.target, &r.map) {
        return inconsistent("approximation map is not a homomorphism");
    }
    for (i, b) in r.gens.iter().enumerate() {
        if !factorizes(b, &r.module, &r.map, &r.target) {
            return inconsistent(format!("maps from generator {} do not factor", i + 1));
        }
    }
    Ok(())
}

// ---------------------------------------------------------- finite lists

/// ⊕ A_i^{dim Hom(A_i, M)} → M assembled from Hom bases.
pub fn finite_type_approx<F: Field>(gens: &[Module<F>], m: &Module<F>) -> Result<ApproximationResult<F>> {
    if gens.is_empty() {
        return input("the generator list is empty");
    }
    for i in 0..gens.len() {
        if gens[i].dim() == 0 {
            return input(format!("generator {} is zero", i + 1));
        }
        for j in 0..i {
            if gens[i].dims == gens[j].dims && is_isomorphic(&gens[i], &gens[j]) {
                return input(format!("generators {} and {} are isomorphic", j + 1, i + 1));
            }
        }
    }
    let mut parts = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        for h in hom_mats(g, m) {
            parts.push((i, h));
        }
    }
    let (module, map) = assemble(m, gens, &parts);
    let mut r = ApproximationResult {
        target: m.clone(),
        category: Category::FiniteList,
        gens: gens.to_vec(),
        parts,
        module,
        map,
        minimal: false,
        certified: false,
        saguaro: None,
    };
    check_factorization(&r)?;
    let mut cache = RadicalCache::new(&r.gens, m);
    r.minimal = cache.is_right_minimal(&r.parts)?;
    Ok(r)
}

/// The single eigenvalue of a matrix whose characteristic polynomial is (t − λ)^n.
fn unique_eigenvalue<F: Field>(f: &F, b: &Mat<F>) -> Option<F::E> {
    let n = b.rows;
    if n == 0 {
        return None;
    }
    let id = Mat::identity(f, n);
    let p = f.characteristic();
    if p == 0 || (n as u64) % p != 0 {
        let lam = f.div(&trace(f, b), &f.from_i64(n as i64));
        return is_nilpotent(f, &b.sub(f, &id.scale(f, &lam))).then_some(lam);
    }
    let q = f.order()?;
    (0..q).map(|k| f.nth(k)).find(|lam| is_nilpotent(f, &b.sub(f, &id.scale(f, lam))))
}

/// Spaces R_i ⊆ Hom(A_i, M) of maps factoring through radical maps into add(gens).
struct RadicalCache<'a, F: Field> {
    gens: &'a [Module<F>],
    homs: Vec<Vec<Mat<F>>>,
    rads: HashMap<usize, Subspace<F>>,
    target_dim: usize,
}

impl<'a, F: Field> RadicalCache<'a, F> {
    fn new(gens: &'a [Module<F>], m: &Module<F>) -> Self {
        let homs = gens.iter().map(|g| hom_mats(g, m)).collect();
        RadicalCache { gens, homs, rads: HashMap::new(), target_dim: m.dim() }
    }

    fn local_radical(&self, i: usize) -> Result<Vec<Mat<F>>> {
        let a = &self.gens[i];
        let f = a.field();
        let ends = hom_mats(a, a);
        let mut lams = Vec::with_capacity(ends.len());
        for e in &ends {
            match unique_eigenvalue(f, e) {
                Some(l) => lams.push(l),
                None => return refuse(format!("generator {} does not have a split local endomorphism ring", i + 1)),
            }
        }
        let Some(j0) = lams.iter().position(|l| !f.is_zero(l)) else {
            return inconsistent("endomorphism ring without identity");
        };
        let mut out = Vec::new();
        for (j, e) in ends.iter().enumerate() {
            if j == j0 {
                continue;
            }
            let c = f.div(&lams[j], &lams[j0]);
            let r = e.sub(f, &ends[j0].scale(f, &c));
            if !is_nilpotent(f, &r) {
                return refuse(format!("generator {} is decomposable", i + 1));
            }
            out.push(r);
        }
        Ok(out)
    }

    fn radical(&mut self, i: usize) -> Result<&Subspace<F>> {
        if !self.rads.contains_key(&i) {
            let f = self.gens[i].field().clone();
            let n = self.target_dim * self.gens[i].dim();
            let mut span = Subspace::zero(n);
            for k in 0..self.gens.len() {
                if self.homs[k].is_empty() {
                    continue;
                }
                let maps = if k == i { self.local_radical(i)? } else { hom_mats(&self.gens[i], &self.gens[k]) };
                for h in &maps {
                    for g in &self.homs[k] {
                        span.add_vector(&f, &vectorize(&g.mul(&f, h)));
                    }
                }
            }
            self.rads.insert(i, span);
        }
        Ok(&self.rads[&i])
    }

    /// Component maps of each generator are independent modulo R_i.
    fn is_right_minimal(&mut self, parts: &[(usize, Mat<F>)]) -> Result<bool> {
        let mut by_gen: HashMap<usize, Vec<&Mat<F>>> = HashMap::new();
        for (i, g) in parts {
            by_gen.entry(*i).or_default().push(g);
        }
        for (i, maps) in by_gen {
            let f = self.gens[i].field().clone();
            let mut span = self.radical(i)?.clone();
            for g in maps {
                if !span.add_vector(&f, &vectorize(g)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn minimize_right<F: Field>(r: &ApproximationResult<F>) -> Result<ApproximationResult<F>> {
    minimize_right_seeded(r, 0)
}

/// Keeps, per generator, component maps forming a basis of Hom(A_i, M) modulo R_i;
/// a nonzero seed mixes the components randomly first.
pub fn minimize_right_seeded<F: Field>(r: &ApproximationResult<F>, seed: u64) -> Result<ApproximationResult<F>> {
    if r.parts.is_empty() {
        return Ok(r.clone());
    }
    let f = r.target.field().clone();
    let mut cache = RadicalCache::new(&r.gens, &r.target);
    let mut rand = rng(0x6d69_6e00 ^ seed);
    let mut parts = Vec::new();
    for i in 0..r.gens.len() {
        let own: Vec<Mat<F>> = r.parts.iter().filter(|(k, _)| *k == i).map(|(_, g)| g.clone()).collect();
        if own.is_empty() {
            continue;
        }
        let cands: Vec<Mat<F>> = if seed == 0 {
            own.clone()
        } else {
            let mut c: Vec<Mat<F>> =
                (0..own.len()).map(|_| combine_maps(&f, &own, &random_coeffs(&f, own.len(), &mut rand, true))).collect();
            c.extend(own.iter().cloned());
            c
        };
        let mut span = cache.radical(i)?.clone();
        for g in cands {
            if span.add_vector(&f, &vectorize(&g)) {
                parts.push((i, g));
            }
        }
    }
    let (module, map) = assemble(&r.target, &r.gens, &parts);
    let certified = r.gens.iter().all(|g| decompose(g).certified());
    let mut out = ApproximationResult {
        target: r.target.clone(),
        category: r.category,
        gens: r.gens.clone(),
        parts,
        module,
        map,
        minimal: false,
        certified,
        saguaro: None,
    };
    check_factorization(&out)?;
    out.minimal = cache.is_right_minimal(&out.parts)?;
    if !out.minimal {
        return inconsistent("minimized approximation fails the minimality certificate");
    }
    Ok(out)
}

fn combine_maps<F: Field>(f: &F, maps: &[Mat<F>], c: &[F::E]) -> Mat<F> {
    let mut out = Mat::zeros(f, maps[0].rows, maps[0].cols);
    for (m, x) in maps.iter().zip(c) {
        out = out.add(f, &m.scale(f, x));
    }
    out
}

// ---------------------------------------------------------- left serial

pub fn is_left_serial<F: Field>(alg: &AlgebraRef<F>) -> bool {
    (0..alg.quiver().n).all(|e| structure(&regular_module(alg, e)).layer_dims().iter().all(|&d| d <= 1))
}

/// A rooted tree of arrows hanging above a socle vertex; leaves are trunk tops.
#[derive(Clone, Debug)]
struct Tree {
    children: Vec<(usize, Tree)>,
}

const MAX_TREES: usize = 200_000;

/// All trees over the node at vertex `v` whose path down to the root is `w`.
fn trees<F: Field>(alg: &AlgebraRef<F>, v: usize, w: &Path, budget: &mut usize) -> Result<Vec<Tree>> {
    let q = alg.quiver();
    let mut options: Vec<(usize, Vec<Tree>)> = Vec::new();
    for a in q.arrows_into(v) {
        let wa = w.after(&Path::arrow(q, a));
        if alg.nf_path(&wa).is_empty() {
            continue;
        }
        options.push((a, trees(alg, q.arrows[a].source, &wa, budget)?));
    }
    let mut out = vec![Tree { children: Vec::new() }];
    let mut partial: Vec<Vec<(usize, Tree)>> = vec![Vec::new()];
    for (a, subs) in &options {
        let mut next = Vec::with_capacity(partial.len() * (subs.len() + 1));
        for p in &partial {
            next.push(p.clone());
            for t in subs {
                let mut c = p.clone();
                c.push((*a, t.clone()));
                next.push(c);
            }
        }
        if next.len() > *budget {
            return refuse("too many candidate saguaro shapes");
        }
        partial = next;
    }
    for children in partial.into_iter().filter(|c| !c.is_empty()) {
        out.push(Tree { children });
    }
    *budget = budget.saturating_sub(out.len());
    Ok(out)
}

/// Leaves in depth-first order as (mast, ancestor chain of node ids).
fn leaves(t: &Tree, w: &Path, chain: &mut Vec<usize>, next_id: &mut usize, alg_q: &crate::presentation::Quiver, out: &mut Vec<(Path, Vec<usize>)>) {
    let id = *next_id;
    *next_id += 1;
    chain.push(id);
    if t.children.is_empty() {
        out.push((w.clone(), chain.clone()));
    }
    for (a, c) in &t.children {
        let wa = w.after(&Path::arrow(alg_q, *a));
        leaves(c, &wa, chain, next_id, alg_q, out);
    }
    chain.pop();
}

/// The saguaro of a tree, trunks in leaf order; None if some trunk or link is refused.
fn tree_saguaro<F: Field>(alg: &AlgebraRef<F>, root: usize, t: &Tree) -> Result<Option<Saguaro<F>>> {
    let q = alg.quiver();
    let mut ls = Vec::new();
    leaves(t, &Path::trivial(root), &mut Vec::new(), &mut 0, q, &mut ls);
    let mut trunks: Vec<UniserialRecord<F>> = Vec::with_capacity(ls.len());
    for (mast, _) in &ls {
        match uniserial_from_mast(alg, mast)? {
            Some(r) => trunks.push(r),
            None => return Ok(None),
        }
    }
    let mut links = Vec::new();
    for k in 0..ls.len().saturating_sub(1) {
        let (a, ca) = &ls[k];
        let (b, cb) = &ls[k + 1];
        let common = ca.iter().zip(cb).take_while(|(x, y)| x == y).count();
        let depth = common - 1;
        links.push(Link { q: a.right(a.len() - depth), q_next: b.right(b.len() - depth) });
    }
    match build_saguaro(trunks, links) {
        Ok(s) => Ok(Some(s)),
        Err(crate::error::Error::Refusal(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The linear form on M sending tops[k] to 1 and the other tops and JM to 0.
fn top_functional<F: Field>(m: &Module<F>, tops: &[Vector<F>], k: usize) -> Result<Mat<F>> {
    let f = m.field();
    let mut cols: Vec<Vector<F>> = tops.to_vec();
    cols.extend(m.radical().basis().iter().cloned());
    let b = Mat::from_cols(f, m.dim(), &cols);
    let Some(inv) = b.inverse(f) else {
        return inconsistent("tops and radical do not form a basis");
    };
    Ok(Mat::from_rows(f, m.dim(), &[inv.row(k).to_vec()]))
}

/// Λe/J^k e for the least k ≥ 1 with `accept`, or Λe when none is accepted earlier.
fn least_accepted_trunk<F: Field>(
    alg: &AlgebraRef<F>,
    e: usize,
    accept: &dyn Fn(&Module<F>) -> bool,
) -> Result<UniserialRecord<F>> {
    let mut chain: Vec<Path> = alg.basis_from(e).into_iter().map(|i| alg.basis[i].clone()).collect();
    chain.sort_by_key(|p| p.len());
    let mut last = None;
    for mast in &chain {
        let Some(r) = uniserial_from_mast(alg, mast)? else {
            return inconsistent("left serial projective has a path without uniserial quotient");
        };
        if accept(&r.module) {
            return Ok(r);
        }
        last = Some(r);
    }
    last.ok_or_else(|| crate::error::Error::Consistency("empty projective".into()))
}

/// The maximal saguaro with simple socle, containing `trunk` and accepted by `accept`.
fn maximal_saguaro<F: Field>(
    alg: &AlgebraRef<F>,
    trunk: &UniserialRecord<F>,
    accept: &dyn Fn(&Module<F>) -> bool,
) -> Result<(Saguaro<F>, usize, Vec<Module<F>>)> {
    let q = alg.quiver();
    let root = q.target(&trunk.mast.path);
    let mut budget = MAX_TREES;
    let shapes = trees(alg, root, &Path::trivial(root), &mut budget)?;
    let mut best: Vec<(Saguaro<F>, usize)> = Vec::new();
    let mut seen: Vec<Module<F>> = Vec::new();
    for t in &shapes {
        let mut ls = Vec::new();
        leaves(t, &Path::trivial(root), &mut Vec::new(), &mut 0, q, &mut ls);
        let Some(k) = ls.iter().position(|(m, _)| *m == trunk.mast.path) else { continue };
        let Some(s) = tree_saguaro(alg, root, t)? else { continue };
        if structure(&s.module).socle.iter().sum::<usize>() != 1 || !accept(&s.module) {
            continue;
        }
        if seen.len() < 24 && !seen.iter().any(|x| x.dims == s.module.dims && is_isomorphic(x, &s.module)) {
            seen.push(s.module.clone());
        }
        let d = s.module.dim();
        let top = best.first().map_or(0, |(b, _)| b.module.dim());
        if d > top {
            best.clear();
        }
        if d >= top {
            best.push((s, k));
        }
    }
    let Some((s, k)) = best.first().cloned() else {
        return inconsistent("no saguaro contains the trunk");
    };
    for (o, _) in &best[1..] {
        if !is_isomorphic(&o.module, &s.module) {
            return inconsistent("two non-isomorphic saguaros of maximal length");
        }
    }
    Ok((s, k, seen))
}

fn left_serial_approx<F: Field>(
    alg: &AlgebraRef<F>,
    v: usize,
    category: Category,
    accept: &dyn Fn(&Module<F>) -> bool,
) -> Result<ApproximationResult<F>> {
    if !is_left_serial(alg) {
        return refuse("the algebra is not left serial");
    }
    if v >= alg.quiver().n {
        return input(format!("vertex {} out of range", v + 1));
    }
    let trunk = least_accepted_trunk(alg, v, accept)?;
    let (s, k, mut probes) = maximal_saguaro(alg, &trunk, accept)?;
    let target = Module::simple(alg, v);
    let map = top_functional(&s.module, &s.tops, k)?;
    for e in 0..alg.quiver().n {
        probes.push(regular_module(alg, e));
    }
    let r = ApproximationResult {
        target,
        category,
        gens: probes,
        parts: Vec::new(),
        module: s.module.clone(),
        map,
        minimal: true,
        certified: false,
        saguaro: Some(s),
    };
    check_factorization(&r)?;
    Ok(r)
}

/// Minimal 𝒫^∞ approximation of S_v over a left serial algebra.
pub fn leftserial_pinf_approx<F: Field>(alg: &AlgebraRef<F>, v: usize) -> Result<ApproximationResult<F>> {
    let bound = default_bound(alg);
    let accept = move |m: &Module<F>| pdim(m, bound).finite().is_some();
    left_serial_approx(alg, v, Category::PinfLeftSerial, &accept)
}

/// Minimal 𝒫^(d) approximation of S_v over a left serial algebra.
pub fn leftserial_pd_approx<F: Field>(alg: &AlgebraRef<F>, v: usize, d: usize) -> Result<ApproximationResult<F>> {
    let bound = default_bound(alg).max(d + 1);
    let accept = move |m: &Module<F>| pdim(m, bound).finite().is_some_and(|x| x <= d);
    left_serial_approx(alg, v, Category::PdLeftSerial(d), &accept)
}

// --------------------------------------------------- radical square zero

/// P/Ω¹(M)_fin → M for an algebra with J² = 0.
pub fn radsq_zero_approx<F: Field>(alg: &AlgebraRef<F>, m: &Module<F>) -> Result<ApproximationResult<F>> {
    if !alg.radical_power(2).is_zero() {
        return refuse("the radical of the algebra does not square to zero");
    }
    let f = &alg.field;
    let n = alg.quiver().n;
    let bound = default_bound(alg);
    let fin: Vec<bool> = (0..n).map(|v| pdim(&Module::simple(alg, v), bound).finite().is_some()).collect();
    let (p, epi) = projective_cover(m);
    let omega = epi.mat.kernel(f);
    let mut comps = Vec::new();
    for x in &omega {
        for v in (0..n).filter(|&v| fin[v]) {
            let c = p.component(x, v);
            if !is_zero_vec(f, &c) {
                comps.push(c);
            }
        }
    }
    let u = Subspace::from_vectors(f, p.dim(), &comps);
    let (a, proj) = quotient(&p, &u);
    let Some(map) = induced_map(f, &proj, &epi.mat) else {
        return inconsistent("the finite part of the syzygy is not in the kernel");
    };
    let mut gens: Vec<Module<F>> = (0..n).map(|e| regular_module(alg, e)).collect();
    gens.extend((0..n).filter(|&v| fin[v]).map(|v| Module::simple(alg, v)));
    gens.push(a.clone());
    let r = ApproximationResult {
        target: m.clone(),
        category: Category::RadSquareZero,
        gens,
        parts: Vec::new(),
        module: a,
        map,
        minimal: true,
        certified: false,
        saguaro: None,
    };
    check_factorization(&r)?;
    Ok(r)
}

// ---------------------------------------------------------- saguaros

/// Indecomposable summands of the irredundant saguaros, up to isomorphism.
pub fn saguaro_generators<F: Field>(alg: &AlgebraRef<F>, restrict_pinf: bool) -> Result<Vec<Module<F>>> {
    if !check_finite_vp(alg)?.holds {
        return refuse("finitely many uniserials per mast fails; the saguaro list is infinite");
    }
    let bound = default_bound(alg);
    let mut gens: Vec<Module<F>> = Vec::new();
    for s in enumerate_irredundant(alg)? {
        for x in decompose(&s.module).modules() {
            if restrict_pinf && pdim(&x, bound).finite().is_none() {
                continue;
            }
            if !gens.iter().any(|g| g.dims == x.dims && is_isomorphic(g, &x)) {
                gens.push(x);
            }
        }
    }
    Ok(gens)
}

/// Minimal 𝒮 (or 𝒮^∞) approximation of M.
pub fn saguaro_approx<F: Field>(alg: &AlgebraRef<F>, m: &Module<F>, restrict_pinf: bool) -> Result<ApproximationResult<F>> {
    let gens = saguaro_generators(alg, restrict_pinf)?;
    let mut r = minimize_right(&finite_type_approx(&gens, m)?)?;
    r.category = if restrict_pinf { Category::SaguarosPinf } else { Category::Saguaros };
    Ok(r)
}

// ---------------------------------------------------- failure criterion

/// Idempotents e_i with paths p_i, q_i starting at e_i (indices modulo m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionData {
    pub idempotents: Vec<usize>,
    pub p: Vec<Path>,
    pub q: Vec<Path>,
}

impl CriterionData {
    pub fn m(&self) -> usize {
        self.idempotents.len()
    }

    pub fn validate<F: Field>(&self, alg: &AlgebraRef<F>) -> Result<()> {
        let m = self.m();
        let quiver = alg.quiver();
        if m == 0 || self.p.len() != m || self.q.len() != m {
            return input("criterion data needs m ≥ 1 idempotents and m paths p and q");
        }
        for i in 0..m {
            let e = self.idempotents[i];
            if e >= quiver.n {
                return input(format!("idempotent {} out of range", i + 1));
            }
            for (name, x) in [("p", &self.p[i]), ("q", &self.q[i])] {
                quiver.check_path(x)?;
                if x.source != e || x.is_trivial() {
                    return input(format!("{name}_{} must be a nontrivial path starting at e_{}", i + 1, i + 1));
                }
                if alg.nf_path(x).is_empty() {
                    return input(format!("{name}_{} is zero in the algebra", i + 1));
                }
            }
        }
        for i in 0..m {
            let j = (i + 1) % m;
            if quiver.target(&self.p[i]) != quiver.target(&self.q[j]) {
                return input(format!("p_{} and q_{} end at different vertices", i + 1, j + 1));
            }
        }
        Ok(())
    }
}

/// The zigzag graph: tops x_1..x_n with p x_i = q x_{i+1} and p x_n hanging free.
pub fn zigzag_graph<F: Field>(alg: &AlgebraRef<F>, data: &CriterionData, n: usize) -> Result<LayeredGraph> {
    hatted_zigzag_graph(alg, data, n, None)
}

/// The zigzag graph in which x_2..x_n are replaced by h·w_i for new tops w_i when a hat h is given.
pub fn hatted_zigzag_graph<F: Field>(
    alg: &AlgebraRef<F>,
    data: &CriterionData,
    n: usize,
    hat: Option<&Path>,
) -> Result<LayeredGraph> {
    data.validate(alg)?;
    let quiver = alg.quiver();
    let m = data.m();
    if let Some(h) = hat {
        quiver.check_path(h)?;
        if h.is_trivial() {
            return input("the hat path must be nontrivial");
        }
        if (1..n.min(m + 1)).any(|i| quiver.target(h) != data.idempotents[i % m]) {
            return input("the hat path must end at the vertex of the hatted tops");
        }
    }
    let lift = hat.map_or(0, |h| h.len());
    let mut g = LayeredGraph::new();
    let chain = |g: &mut LayeredGraph, from: usize, start: usize, path: &Path, to: Option<usize>, tag: &str| {
        let mut cur = from;
        for (k, &a) in path.arrows.iter().enumerate() {
            let next = match to {
                Some(t) if k + 1 == path.len() => t,
                _ => g.add_node(format!("{tag}{k}"), start + k + 1, quiver.arrows[a].target),
            };
            g.add_edge(cur, next, a);
            cur = next;
        }
        cur
    };
    let mut xs = Vec::with_capacity(n);
    for i in 0..n {
        match hat {
            Some(h) if i > 0 => {
                let w = g.add_node(format!("w{}", i + 1), 0, h.source);
                g.tops.push(w);
                let x = chain(&mut g, w, 0, h, None, &format!("h{}_", i + 1));
                g.nodes[x].id = format!("x{}", i + 1);
                xs.push((x, lift));
            }
            _ => {
                let x = g.add_node(format!("x{}", i + 1), 0, data.idempotents[i % m]);
                g.tops.push(x);
                xs.push((x, 0));
            }
        }
    }
    for i in 0..n {
        let p = &data.p[i % m];
        let (xi, li) = xs[i];
        let mut depth = li + p.len();
        if i + 1 < n {
            depth = depth.max(xs[i + 1].1 + data.q[(i + 1) % m].len());
        }
        let b = g.add_node(format!("b{}", i + 1), depth, quiver.target(p));
        chain(&mut g, xi, li, p, Some(b), &format!("p{}_", i + 1));
        if i + 1 < n {
            let (xj, lj) = xs[i + 1];
            chain(&mut g, xj, lj, &data.q[(i + 1) % m], Some(b), &format!("q{}_", i + 2));
        }
    }
    validate_graph(&g, quiver)
}

/// M_n with its tops x_1..x_n.
pub fn zigzag_module<F: Field>(alg: &AlgebraRef<F>, data: &CriterionData, n: usize) -> Result<Module<F>> {
    if n == 0 {
        return input("zigzag modules need n ≥ 1");
    }
    realize_graph(alg, &zigzag_graph(alg, data, n)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelVerdict {
    pub n: usize,
    pub independent: bool,
    pub linked: bool,
    pub in_category: bool,
}

impl LevelVerdict {
    pub fn passes(&self) -> bool {
        self.independent && self.linked && self.in_category
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeVerdict {
    pub index: usize,
    pub dim: usize,
    pub in_category: bool,
    /// Top element of type e_1 killed by p_1, if any.
    pub violates_i: bool,
    /// Index i with p y = q z ≠ 0 but p_{next} z = 0, if any.
    pub violates_ii: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CriterionStatus {
    /// All checks passed on the finite data; never a proof.
    ConsistentWithFailure,
    LevelFails(usize),
    Violated { probe: usize, condition: String },
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub data: CriterionData,
    pub levels: Vec<LevelVerdict>,
    pub probes: Vec<ProbeVerdict>,
    pub status: CriterionStatus,
}

fn path_mat<F: Field>(m: &Module<F>, p: &Path, from: usize) -> Mat<F> {
    let f = m.field();
    let cols: Vec<Vector<F>> = m.block(from).map(|i| m.act_path(p, &m.unit(i))).collect();
    Mat::from_cols(f, m.dim(), &cols)
}

fn check_level<F: Field>(alg: &AlgebraRef<F>, data: &CriterionData, n: usize, bound: usize) -> Result<LevelVerdict> {
    let f = &alg.field;
    let mm = zigzag_module(alg, data, n)?;
    let m = data.m();
    let tops = mm.tops.clone();
    let rad = mm.radical();
    let mut span = rad.clone();
    let independent = tops.iter().all(|t| span.add_vector(f, t));
    let mut linked = true;
    for i in 0..n {
        let px = mm.act_path(&data.p[i % m], &tops[i]);
        if is_zero_vec(f, &px) {
            linked = false;
        }
        if i + 1 < n && px != mm.act_path(&data.q[(i + 1) % m], &tops[i + 1]) {
            linked = false;
        }
    }
    let in_category = pdim(&mm, bound).finite().is_some();
    Ok(LevelVerdict { n, independent, linked, in_category })
}

fn check_probe<F: Field>(data: &CriterionData, a: &Module<F>, index: usize, bound: usize) -> ProbeVerdict {
    let f = a.field();
    let m = data.m();
    let in_category = pdim(a, bound).finite().is_some();
    let mut out = ProbeVerdict { index, dim: a.dim(), in_category, violates_i: false, violates_ii: None };
    if !in_category {
        return out;
    }
    let e1 = data.idempotents[0];
    let rad = a.radical();
    let p1 = path_mat(a, &data.p[0], e1);
    let start = a.block(e1).start;
    for k in p1.kernel(f) {
        let mut x = a.zero_vec();
        for (j, c) in k.iter().enumerate() {
            x[start + j] = c.clone();
        }
        if !rad.contains(f, &x) {
            out.violates_i = true;
        }
    }
    for i in 0..m {
        let j = (i + 1) % m;
        let pm = path_mat(a, &data.p[i], data.idempotents[i]);
        let qm = path_mat(a, &data.q[j], data.idempotents[j]);
        let pn = path_mat(a, &data.p[j], data.idempotents[j]);
        let img = pm.image(f);
        let nb = img.dim();
        let nz = qm.cols;
        // unknowns (z, c): Q z − Σ c_k img_k = 0 and P' z = 0
        let mut rows: Vec<Vector<F>> = Vec::new();
        for r in 0..a.dim() {
            let mut row = qm.row(r).to_vec();
            row.extend(img.basis().iter().map(|b| f.neg(&b[r])));
            rows.push(row);
            let mut row2 = pn.row(r).to_vec();
            row2.extend(std::iter::repeat_n(f.zero(), nb));
            rows.push(row2);
        }
        let sys = Mat::from_rows(f, nz + nb, &rows);
        for sol in sys.kernel(f) {
            if !is_zero_vec(f, &qm.apply(f, &sol[..nz])) {
                out.violates_ii = Some(i);
                break;
            }
        }
        if out.violates_ii.is_some() {
            break;
        }
    }
    out
}

/// Checks the zigzag hypothesis for n ≤ N and the probe conditions on every probe
/// of finite projective dimension.
pub fn failure_criterion_check<F: Field>(
    alg: &AlgebraRef<F>,
    data: &CriterionData,
    n_max: usize,
    probes: &[Module<F>],
) -> Result<CriterionReport> {
    data.validate(alg)?;
    let bound = default_bound(alg);
    let mut levels = Vec::new();
    let mut status = CriterionStatus::ConsistentWithFailure;
    for n in 1..=n_max {
        let v = check_level(alg, data, n, bound)?;
        if !v.passes() && status == CriterionStatus::ConsistentWithFailure {
            status = CriterionStatus::LevelFails(n);
        }
        levels.push(v);
    }
    let mut verdicts = Vec::new();
    for (k, a) in probes.iter().enumerate() {
        let v = check_probe(data, a, k, bound);
        if status == CriterionStatus::ConsistentWithFailure {
            if v.violates_i {
                status = CriterionStatus::Violated { probe: k, condition: "(2i)".into() };
            } else if let Some(i) = v.violates_ii {
                status = CriterionStatus::Violated { probe: k, condition: format!("(2ii) at i = {}", i + 1) };
            }
        }
        verdicts.push(v);
    }
    Ok(CriterionReport { data: data.clone(), levels, probes: verdicts, status })
}

/// Projectives, simples, cyclic quotients Λe/Λu and two-generator amalgams
/// (Λe_a ⊕ Λe_b)/Λ(u x − v y), up to dimension `max_dim`.
pub fn amalgam_probes<F: Field>(alg: &AlgebraRef<F>, max_dim: usize) -> Vec<Module<F>> {
    let f = &alg.field;
    let quiver = alg.quiver();
    let n = quiver.n;
    let mut out: Vec<Module<F>> = Vec::new();
    let push = |x: Module<F>, out: &mut Vec<Module<F>>| {
        if x.dim() > 0 && x.dim() <= max_dim && !out.iter().any(|y| y.dims == x.dims && is_isomorphic(y, &x)) {
            out.push(x);
        }
    };
    for v in 0..n {
        push(regular_module(alg, v), &mut out);
        push(Module::simple(alg, v), &mut out);
    }
    let paths: Vec<Path> = alg.basis.iter().filter(|p| !p.is_trivial()).cloned().collect();
    for u in &paths {
        let p = regular_module(alg, u.source);
        let x = p.act_path(u, &p.tops[0]);
        let (qm, _) = quotient(&p, &p.generate(&[x]));
        push(qm, &mut out);
    }
    for (iu, u) in paths.iter().enumerate() {
        for v in &paths[iu..] {
            if quiver.target(u) != quiver.target(v) {
                continue;
            }
            let (pa, pb) = (regular_module(alg, u.source), regular_module(alg, v.source));
            if pa.dim() + pb.dim() > max_dim + pa.dim().min(pb.dim()) {
                continue;
            }
            let (s, incs, _) = direct_sum(alg, &[&pa, &pb]);
            let xa = incs[0].apply(f, &pa.act_path(u, &pa.tops[0]));
            let xb = incs[1].apply(f, &pb.act_path(v, &pb.tops[0]));
            let rel: Vector<F> = xa.iter().zip(&xb).map(|(a, b)| f.sub(a, b)).collect();
            let (qm, _) = quotient(&s, &s.generate(&[rel]));
            push(qm, &mut out);
        }
    }
    out
}

/// Zigzag modules M_1..M_n and their syzygies Ω^1, Ω^2.
pub fn zigzag_probes<F: Field>(alg: &AlgebraRef<F>, data: &CriterionData, n: usize) -> Result<Vec<Module<F>>> {
    let mut out = Vec::new();
    for k in 1..=n {
        let m = zigzag_module(alg, data, k)?;
        for j in 1..=2 {
            let s = syzygy(&m, j);
            for x in decompose(&s).modules() {
                out.push(x);
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// dim of the minimal {M_1..M_n} approximation of `target` for n = 1..=n_max.
pub fn zigzag_approx_dims<F: Field>(
    alg: &AlgebraRef<F>,
    data: &CriterionData,
    target: &Module<F>,
    n_max: usize,
) -> Result<Vec<usize>> {
    let mut gens = Vec::new();
    let mut out = Vec::new();
    for n in 1..=n_max {
        gens.push(zigzag_module(alg, data, n)?);
        let r = minimize_right(&finite_type_approx(&gens, target)?)?;
        out.push(r.dim());
    }
    Ok(out)
}

// --------------------------------------------------------- filtrations

#[derive(Clone, Debug)]
pub enum FiltrationOutcome<F: Field> {
    /// X = M_0 ⊇ M_1 ⊇ … ⊇ M_k = 0 with M_{j}/M_{j+1} ≅ gens[factors[j]].
    Found { factors: Vec<usize>, chain: Vec<Module<F>> },
    /// No filtration can exist.
    Exhausted,
    /// The bounded search found nothing.
    Inconclusive,
}

impl<F: Field> FiltrationOutcome<F> {
    pub fn is_found(&self) -> bool {
        matches!(self, FiltrationOutcome::Found { .. })
    }
}

const SURJECTION_TRIES: usize = 12;

/// Kernels of surjections X → A, pairwise non-isomorphic.
fn surjection_kernels<F: Field>(x: &Module<F>, a: &Module<F>, salt: u64) -> Vec<Module<F>> {
    let f = x.field();
    let homs = hom_mats(x, a);
    if homs.is_empty() || x.dim() < a.dim() {
        return Vec::new();
    }
    let mut cands: Vec<Mat<F>> = homs.clone();
    if let Some(total) = finite_count(f, homs.len(), 4096) {
        cands.extend((1..total).map(|i| combine_maps(f, &homs, &nth_tuple(f, homs.len(), i))));
    } else {
        let mut r = rng(salt);
        for _ in 0..SURJECTION_TRIES {
            cands.push(combine_maps(f, &homs, &random_coeffs(f, homs.len(), &mut r, true)));
        }
    }
    let mut out: Vec<Module<F>> = Vec::new();
    for h in cands {
        if h.rank(f) != a.dim() {
            continue;
        }
        let ker = Subspace::from_vectors(f, x.dim(), &h.kernel(f));
        let (k, _) = sub(x, &ker);
        if !out.iter().any(|y| y.dims == k.dims && is_isomorphic(y, &k)) {
            out.push(k);
        }
        if out.len() >= SURJECTION_TRIES {
            break;
        }
    }
    out
}

fn filtration_rec<F: Field>(
    x: &Module<F>,
    gens: &[Module<F>],
    depth: usize,
    salt: u64,
) -> Option<(Vec<usize>, Vec<Module<F>>)> {
    if x.dim() == 0 {
        return Some((Vec::new(), vec![x.clone()]));
    }
    if depth == 0 {
        return None;
    }
    for (i, g) in gens.iter().enumerate() {
        if g.dim() == 0 || g.dim() > x.dim() {
            continue;
        }
        for k in surjection_kernels(x, g, salt ^ (i as u64) << 8) {
            if let Some((mut fs, mut chain)) = filtration_rec(&k, gens, depth - 1, salt.wrapping_add(1)) {
                fs.insert(0, i);
                chain.insert(0, x.clone());
                return Some((fs, chain));
            }
        }
    }
    None
}

/// Bounded search for a filtration of X with factors among `gens`.
pub fn filtration_witness<F: Field>(gens: &[Module<F>], x: &Module<F>, depth: usize) -> FiltrationOutcome<F> {
    if x.dim() == 0 {
        return FiltrationOutcome::Found { factors: Vec::new(), chain: vec![x.clone()] };
    }
    let bound = default_bound(&x.alg);
    let gens_finite = gens.iter().all(|g| pdim(g, bound).finite().is_some());
    if gens_finite && pdim(x, bound).finite().is_none() {
        return FiltrationOutcome::Exhausted;
    }
    match filtration_rec(x, gens, depth, 0x6669_6c74) {
        Some((factors, chain)) => FiltrationOutcome::Found { factors, chain },
        None => FiltrationOutcome::Inconclusive,
    }
}
