//! Saguaros: uniserial trunks glued along their masts.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::AlgebraRef;
use crate::error::{inconsistent, input, refuse, Result};
use crate::field::Field;
use crate::graph::{graph_isomorphism, GEdge, LayeredGraph};
use crate::hom::{combine, finite_count, hom_mats, is_homomorphism, is_isomorphic, nth_tuple, random_coeffs};
use crate::linalg::{is_zero_vec, proportion, unit, vec_scale, vec_sub, Mat, Subspace, Vector};
use crate::module::{direct_sum, graph_of, graph_with_nodes, quotient, sub, Module};
use crate::presentation::Path;
use crate::random::rng;
use crate::uniserial::{check_finite_vp, uniserial_from_mast, UniserialRecord};

pub const MAX_TRUNKS: usize = 10;
const MAX_CANDIDATES: usize = 200_000;

/// Relator data q_i t_i − k_i q'_{i+1} t_{i+1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub q: Path,
    pub q_next: Path,
}

pub type LinkSpec = Vec<Link>;

#[derive(Clone, Debug)]
pub struct Saguaro<F: Field> {
    pub trunks: Vec<UniserialRecord<F>>,
    pub links: LinkSpec,
    pub scalars: Vec<F::E>,
    pub module: Module<F>,
    /// Canonical tops t̂_i.
    pub tops: Vec<Vector<F>>,
    /// Trunk images T̂_i.
    pub images: Vec<Subspace<F>>,
    /// ⊕ T_i → T.
    pub proj: Mat<F>,
    /// T_i → ⊕ T_i.
    pub incs: Vec<Mat<F>>,
}

impl<F: Field> Saguaro<F> {
    pub fn len(&self) -> usize {
        self.trunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trunks.is_empty()
    }

    pub fn alg(&self) -> &AlgebraRef<F> {
        &self.module.alg
    }

    pub fn field(&self) -> &F {
        self.module.field()
    }

    pub fn intersection(&self, i: usize, j: usize) -> Subspace<F> {
        self.images[i].intersect(self.field(), &self.images[j])
    }

    pub fn sum_of(&self, set: &[usize]) -> Subspace<F> {
        let mut s = Subspace::zero(self.module.dim());
        for &i in set {
            s = s.sum(self.field(), &self.images[i]);
        }
        s
    }

    pub fn meet_of(&self, set: &[usize]) -> Subspace<F> {
        let mut s = self.images[set[0]].clone();
        for &i in &set[1..] {
            s = s.intersect(self.field(), &self.images[i]);
        }
        s
    }

    pub fn masts(&self) -> Vec<&Path> {
        self.trunks.iter().map(|t| &t.mast.path).collect()
    }

    /// Vertex of the common socle.
    pub fn socle_vertex(&self) -> usize {
        self.alg().quiver().target(&self.trunks[0].mast.path)
    }

    pub fn graph(&self) -> Result<LayeredGraph> {
        graph_of(&self.module)
    }

    pub fn describe(&self) -> String {
        let alg = self.alg();
        let masts: Vec<String> = self.masts().iter().map(|p| alg.path_name(p)).collect();
        let links: Vec<String> =
            self.links.iter().map(|l| format!("({}, {})", alg.path_name(&l.q), alg.path_name(&l.q_next))).collect();
        format!("trunks [{}] links [{}]", masts.join(", "), links.join(", "))
    }
}

pub fn trunk_top<F: Field>(r: &UniserialRecord<F>) -> Vector<F> {
    r.module.generating_tops().0[0].clone()
}

pub fn build_saguaro<F: Field>(trunks: Vec<UniserialRecord<F>>, links: LinkSpec) -> Result<Saguaro<F>> {
    let Some(first) = trunks.first() else {
        return input("a saguaro needs at least one trunk");
    };
    let one = first.module.field().one();
    let scalars = vec![one; links.len()];
    build_saguaro_scaled(trunks, links, scalars)
}

/// (⊕ T_i)/U with U generated by q_i t_i − k_i q'_{i+1} t_{i+1}.
pub fn build_saguaro_scaled<F: Field>(
    trunks: Vec<UniserialRecord<F>>,
    links: LinkSpec,
    scalars: Vec<F::E>,
) -> Result<Saguaro<F>> {
    let m = trunks.len();
    if m == 0 {
        return input("a saguaro needs at least one trunk");
    }
    if links.len() != m - 1 || scalars.len() != m - 1 {
        return input(format!("{m} trunks need {} links", m - 1));
    }
    let alg = trunks[0].module.alg.clone();
    if trunks.iter().any(|t| !Arc::ptr_eq(&t.module.alg, &alg)) {
        return input("trunks live over different algebras");
    }
    let f = &alg.field;
    let q = alg.quiver();
    let tops: Vec<Vector<F>> = trunks.iter().map(trunk_top).collect();
    for (i, l) in links.iter().enumerate() {
        let (p, pn) = (&trunks[i].mast.path, &trunks[i + 1].mast.path);
        if !l.q.is_right_subpath_of(p) || !l.q_next.is_right_subpath_of(pn) {
            return input(format!("link {}: paths must be right subpaths of the masts", i + 1));
        }
        if q.target(&l.q) != q.target(&l.q_next) {
            return input(format!("link {}: paths end at different vertices", i + 1));
        }
        if f.is_zero(&scalars[i]) {
            return input(format!("link {}: zero scalar", i + 1));
        }
        if l.q.is_trivial() || l.q_next.is_trivial() {
            return refuse(format!("link {}: relator does not lie in the radical", i + 1));
        }
        if is_zero_vec(f, &trunks[i].module.act_path(&l.q, &tops[i])) {
            return refuse(format!("condition (i) fails at link {}: q_{} t_{} = 0", i + 1, i + 1, i + 1));
        }
        if is_zero_vec(f, &trunks[i + 1].module.act_path(&l.q_next, &tops[i + 1])) {
            return refuse(format!("condition (i) fails at link {}: q'_{} t_{} = 0", i + 1, i + 2, i + 2));
        }
    }
    let parts: Vec<&Module<F>> = trunks.iter().map(|t| &t.module).collect();
    let (sum, incs, _) = direct_sum(&alg, &parts);
    let rels: Vec<Vector<F>> = links
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let a = incs[i].apply(f, &trunks[i].module.act_path(&l.q, &tops[i]));
            let b = incs[i + 1].apply(f, &trunks[i + 1].module.act_path(&l.q_next, &tops[i + 1]));
            vec_sub(f, &a, &vec_scale(f, &scalars[i], &b))
        })
        .collect();
    let u = sum.generate(&rels);
    let (t, proj) = quotient(&sum, &u);
    let hat: Vec<Vector<F>> = (0..m).map(|i| proj.apply(f, &incs[i].apply(f, &tops[i]))).collect();
    let module = t.with_tops(hat.clone());
    let mut images = Vec::with_capacity(m);
    for (j, inc) in incs.iter().enumerate() {
        let pj = proj.mul(f, inc);
        if pj.rank(f) != trunks[j].module.dim() {
            return refuse(format!("condition (ii) fails: trunk {} does not embed canonically", j + 1));
        }
        images.push(pj.image(f));
    }
    Ok(Saguaro { trunks, links, scalars, module, tops: hat, images, proj, incs })
}

// ---------------------------------------------------------- intersections

/// Paths (a, b) with a t̂_i ∈ K b t̂_j generating T̂_i ∩ T̂_j, by induction on j − i.
fn intersection_paths<F: Field>(s: &Saguaro<F>, i: usize, j: usize) -> (Path, Path) {
    let q = s.alg().quiver();
    let (qi, qn) = (&s.links[i].q, &s.links[i].q_next);
    if j == i + 1 {
        return (qi.clone(), qn.clone());
    }
    let (u, v) = intersection_paths(s, i + 1, j);
    if qn.len() <= u.len() {
        let w = u.strip_right(q, qn).expect("initial segments of one mast");
        (w.after(qi), v)
    } else {
        let w = qn.strip_right(q, &u).expect("initial segments of one mast");
        (qi.clone(), w.after(&v))
    }
}

pub fn trunk_intersection<F: Field>(s: &Saguaro<F>, i: usize, j: usize) -> Result<(Path, Path, Subspace<F>)> {
    if i >= j || j >= s.len() {
        return input(format!("trunk_intersection needs i < j < {}", s.len()));
    }
    let f = s.field();
    let (a, b) = intersection_paths(s, i, j);
    let at = s.module.act_path(&a, &s.tops[i]);
    let bt = s.module.act_path(&b, &s.tops[j]);
    if is_zero_vec(f, &at) || proportion(f, &bt, &at).is_none() {
        return inconsistent(format!("a t_{} and b t_{} are not proportional", i + 1, j + 1));
    }
    let span = s.module.generate(&[at]);
    if !span.same_as(&s.intersection(i, j)) {
        return inconsistent(format!("intersection of trunks {} and {} is not cyclic on a t", i + 1, j + 1));
    }
    Ok((a, b, span))
}

/// Socles agree and T̂_i ∩ T̂_j = T̂_i ∩ Σ_{l≥j} T̂_l = Σ_{l≤i} T̂_l ∩ T̂_j.
pub fn check_invariants<F: Field>(s: &Saguaro<F>) -> Result<()> {
    let f = s.field();
    let m = s.len();
    let socles: Vec<Subspace<F>> = (0..m)
        .map(|i| s.module.generate(&[s.module.act_path(&s.trunks[i].mast.path, &s.tops[i])]))
        .collect();
    for i in 1..m {
        if !socles[i].same_as(&socles[0]) {
            return inconsistent(format!("socle of trunk {} differs from the first", i + 1));
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let x = s.intersection(i, j);
            let later: Vec<usize> = (j..m).collect();
            let earlier: Vec<usize> = (0..=i).collect();
            let y = s.images[i].intersect(f, &s.sum_of(&later));
            let z = s.sum_of(&earlier).intersect(f, &s.images[j]);
            if !x.same_as(&y) || !x.same_as(&z) || x.is_zero() {
                return inconsistent(format!("intersection pattern fails for trunks {} and {}", i + 1, j + 1));
            }
        }
    }
    Ok(())
}

// ----------------------------------------------------------------- twists

/// The map T → T' with φ∘π = ψ, if ψ kills ker π.
pub(crate) fn induced_map<F: Field>(f: &F, pi: &Mat<F>, psi: &Mat<F>) -> Option<Mat<F>> {
    for k in pi.kernel(f) {
        if !is_zero_vec(f, &psi.apply(f, &k)) {
            return None;
        }
    }
    let mut cols = Vec::with_capacity(pi.rows);
    for e in 0..pi.rows {
        let x = pi.solve(f, &unit(f, pi.rows, e))?;
        cols.push(psi.apply(f, &x));
    }
    Some(Mat::from_cols(f, psi.rows, &cols))
}

/// Relators q_i t_i − k_i q'_{i+1} t_{i+1}, with an isomorphism from the input.
pub fn scalar_twist<F: Field>(s: &Saguaro<F>, ks: &[F::E]) -> Result<(Saguaro<F>, Mat<F>)> {
    let f = s.field().clone();
    if ks.len() + 1 != s.len() {
        return input(format!("{} trunks need {} scalars", s.len(), s.len() - 1));
    }
    if let Some(i) = ks.iter().position(|k| f.is_zero(k)) {
        return input(format!("scalar k_{} is zero", i + 1));
    }
    let scalars = s.scalars.iter().zip(ks).map(|(a, k)| f.mul(a, k)).collect();
    let t = build_saguaro_scaled(s.trunks.clone(), s.links.clone(), scalars)?;
    let mut c = vec![f.one()];
    for k in ks {
        let next = f.mul(c.last().unwrap(), k);
        c.push(next);
    }
    let n = s.proj.cols;
    let mut d = Mat::zeros(&f, n, n);
    for (i, inc) in s.incs.iter().enumerate() {
        d = d.add(&f, &inc.mul(&f, &inc.transpose()).scale(&f, &c[i]));
    }
    let psi = t.proj.mul(&f, &d);
    let Some(phi) = induced_map(&f, &s.proj, &psi) else {
        return inconsistent("twisted tops do not respect the relators");
    };
    if !phi.is_invertible(&f) || !is_homomorphism(&s.module, &t.module, &phi) {
        return inconsistent("twist map is not an isomorphism");
    }
    for i in 0..s.len() {
        if phi.apply(&f, &s.tops[i]) != vec_scale(&f, &c[i], &t.tops[i]) {
            return inconsistent(format!("twist map moves top {}", i + 1));
        }
    }
    Ok((t, phi))
}

// -------------------------------------------------------------- orderings

/// Builds the saguaro on the trunks `order` of `s` with links read off the
/// intersections; the natural map to `s` is returned when it embeds onto `target`.
fn resaguaro<F: Field>(s: &Saguaro<F>, order: &[usize], target: &Subspace<F>) -> Result<(Saguaro<F>, Mat<F>)> {
    let f = s.field();
    let mut links = Vec::new();
    let mut scalars = Vec::new();
    for w in order.windows(2) {
        let (x, y) = (w[0], w[1]);
        let (a, b) = if x < y {
            intersection_paths(s, x, y)
        } else {
            let (b, a) = intersection_paths(s, y, x);
            (a, b)
        };
        let ax = s.module.act_path(&a, &s.tops[x]);
        let by = s.module.act_path(&b, &s.tops[y]);
        let Some(k) = proportion(f, &by, &ax) else {
            return refuse("trunks do not meet along a top multiple");
        };
        links.push(Link { q: a, q_next: b });
        scalars.push(k);
    }
    let trunks = order.iter().map(|&i| s.trunks[i].clone()).collect();
    let t = build_saguaro_scaled(trunks, links, scalars)?;
    let mut psi = Mat::zeros(f, s.module.dim(), t.proj.cols);
    for (k, &i) in order.iter().enumerate() {
        psi = psi.add(f, &s.proj.mul(f, &s.incs[i]).mul(f, &t.incs[k].transpose()));
    }
    let Some(phi) = induced_map(f, &t.proj, &psi) else {
        return refuse("natural map is not defined");
    };
    if phi.rank(f) != t.module.dim() || !phi.image(f).same_as(target) {
        return refuse("natural map is not an isomorphism onto the sub-sum");
    }
    Ok((t, phi))
}

/// Reorders the trunks; refused when the reordering hypothesis fails.
pub fn reorder_trunks<F: Field>(s: &Saguaro<F>, perm: &[usize]) -> Result<(Saguaro<F>, Mat<F>)> {
    let m = s.len();
    let mut seen = vec![false; m];
    if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
        return input("not a permutation of the trunks");
    }
    let f = s.field();
    for i in 0..m {
        let near = if i + 1 < m { Some(s.intersection(perm[i], perm[i + 1])) } else { None };
        for j in i + 2..m {
            let far = s.intersection(perm[i], perm[j]);
            if !far.is_subspace_of(f, near.as_ref().unwrap()) {
                return refuse(format!("reordering hypothesis fails at ({}, {})", i + 1, j + 1));
            }
        }
    }
    let full = Subspace::full(f, s.module.dim());
    match resaguaro(s, perm, &full) {
        Ok(x) => Ok(x),
        Err(e) => inconsistent(format!("reordering hypothesis holds but the reordering failed: {e}")),
    }
}

/// A permutation with (s, t) adjacent that satisfies the reordering hypothesis.
pub fn move_together<F: Field>(s: &Saguaro<F>, pair: (usize, usize)) -> Result<Vec<usize>> {
    let (a, b) = pair;
    let m = s.len();
    if a == b || a >= m || b >= m {
        return input("move_together needs two distinct trunk indices");
    }
    let f = s.field();
    let (mut is, mut it) = (Vec::new(), Vec::new());
    for i in (0..m).filter(|&i| i != a && i != b) {
        if s.intersection(i, a).is_subspace_of(f, &s.intersection(i, b)) {
            it.push(i);
        } else {
            is.push(i);
        }
    }
    let chain = |start: usize, mut pool: Vec<usize>| -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = start;
        while !pool.is_empty() {
            let k = (0..pool.len()).max_by_key(|&k| (s.intersection(pool[k], cur).dim(), usize::MAX - k)).unwrap();
            cur = pool.remove(k);
            out.push(cur);
        }
        out
    };
    let mut perm: Vec<usize> = chain(a, is).into_iter().rev().collect();
    perm.push(a);
    perm.push(b);
    perm.extend(chain(b, it));
    Ok(perm)
}

// ------------------------------------------------------------- redundancy

#[derive(Clone, Debug)]
pub struct SubsaguaroWitness<F: Field> {
    pub set: Vec<usize>,
    pub sum: Subspace<F>,
    pub meet: Subspace<F>,
}

/// T̂_j ∩ V ⊆ ∩_{i∈I₁} T̂_i for every j outside I₁.
pub fn subsaguaro_witness<F: Field>(s: &Saguaro<F>, set: &[usize]) -> Option<SubsaguaroWitness<F>> {
    let f = s.field();
    if set.is_empty() {
        return None;
    }
    let sum = s.sum_of(set);
    let meet = s.meet_of(set);
    for j in (0..s.len()).filter(|j| !set.contains(j)) {
        if !s.images[j].intersect(f, &sum).is_subspace_of(f, &meet) {
            return None;
        }
    }
    Some(SubsaguaroWitness { set: set.to_vec(), sum, meet })
}

#[derive(Clone, Debug)]
pub struct RedundancyWitness<F: Field> {
    pub first: Vec<usize>,
    /// `second[k]` is matched with `first[k]`.
    pub second: Vec<usize>,
    /// φ(t̂_{first[k]}).
    pub images: Vec<Vector<F>>,
}

#[derive(Clone, Debug)]
pub struct GraphPattern {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    /// The shared vertex a.
    pub apex: usize,
}

#[derive(Clone, Debug)]
pub struct RedundancyReport<F: Field> {
    pub redundant: bool,
    pub witness: Option<RedundancyWitness<F>>,
    pub pattern: Option<GraphPattern>,
    /// The graph search ran (finite-variety algebras with a canonical graph).
    pub graph_checked: bool,
}

fn set_of(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|&i| mask >> i & 1 == 1).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Candidate pairs (I₁, I₂): disjoint, equal size, min I₁ < min I₂.
fn candidate_pairs(m: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for a in 1u32..1 << m {
        for b in 1u32..1 << m {
            if a & b != 0 || a.count_ones() != b.count_ones() || a.trailing_zeros() > b.trailing_zeros() {
                continue;
            }
            out.push((set_of(a, m), set_of(b, m)));
        }
    }
    out
}

/// An isomorphism V₁ → V₂ restricting to the identity on D and sending T̂_{first[k]} onto T̂_{second[k]}.
fn subsaguaro_iso<F: Field>(
    s: &Saguaro<F>,
    first: &[usize],
    second: &[usize],
    v1: &(Module<F>, Mat<F>),
    v2: &(Module<F>, Mat<F>),
    d: &Subspace<F>,
) -> Option<Vec<Vector<F>>> {
    let f = s.field();
    let (m1, incl1) = v1;
    let (m2, incl2) = v2;
    if m1.dims != m2.dims {
        return None;
    }
    let homs: Vec<Mat<F>> = hom_mats(m1, m2).iter().map(|h| incl2.mul(f, h)).collect();
    let k = homs.len();
    if k == 0 {
        return None;
    }
    let coords = |x: &[F::E]| incl1.solve(f, x).expect("inside the sub-sum");
    let mut rows: Vec<Vector<F>> = Vec::new();
    let mut rhs: Vec<F::E> = Vec::new();
    for x in d.basis() {
        let c = coords(x);
        let imgs: Vec<Vector<F>> = homs.iter().map(|h| h.apply(f, &c)).collect();
        for r in 0..x.len() {
            rows.push(imgs.iter().map(|v| v[r].clone()).collect());
            rhs.push(x[r].clone());
        }
    }
    for (&i, &j) in first.iter().zip(second) {
        for y in s.images[i].basis() {
            let c = coords(y);
            let red: Vec<Vector<F>> = homs.iter().map(|h| s.images[j].reduce(f, &h.apply(f, &c))).collect();
            for r in 0..y.len() {
                rows.push(red.iter().map(|v| v[r].clone()).collect());
                rhs.push(f.zero());
            }
        }
    }
    let a = Mat::from_rows(f, k, &rows);
    let c0 = a.solve(f, &rhs)?;
    let dirs = a.kernel(f);
    let square: Vec<Mat<F>> = hom_mats(m1, m2);
    let accept = |c: &[F::E]| -> Option<Vec<Vector<F>>> {
        if !combine(f, &square, c).is_invertible(f) {
            return None;
        }
        let phi = combine(f, &homs, c);
        Some(first.iter().map(|&i| phi.apply(f, &coords(&s.tops[i]))).collect())
    };
    let shifted = |t: &[F::E]| -> Vector<F> {
        let mut c = c0.clone();
        for (dir, x) in dirs.iter().zip(t) {
            for (ci, di) in c.iter_mut().zip(dir) {
                *ci = f.add(ci, &f.mul(x, di));
            }
        }
        c
    };
    if let Some(r) = accept(&c0) {
        return Some(r);
    }
    if dirs.is_empty() {
        return None;
    }
    if let Some(total) = finite_count(f, dirs.len(), 1 << 12) {
        return (1..total).find_map(|idx| accept(&shifted(&nth_tuple(f, dirs.len(), idx))));
    }
    let mut r = rng(0x5a6 ^ s.module.dim() as u64);
    (0..60).find_map(|_| accept(&shifted(&random_coeffs(f, dirs.len(), &mut r, true))))
}

fn module_search<F: Field>(s: &Saguaro<F>, pairs: &[(Vec<usize>, Vec<usize>)]) -> Option<RedundancyWitness<F>> {
    let f = s.field();
    let m = s.len();
    for (i1, i2) in pairs {
        let mut ma: Vec<&Path> = i1.iter().map(|&i| &s.trunks[i].mast.path).collect();
        let mut mb: Vec<&Path> = i2.iter().map(|&i| &s.trunks[i].mast.path).collect();
        ma.sort();
        mb.sort();
        if ma != mb {
            continue;
        }
        let (Some(w1), Some(w2)) = (subsaguaro_witness(s, i1), subsaguaro_witness(s, i2)) else {
            continue;
        };
        let outside_equal = (0..m).filter(|k| !i1.contains(k) && !i2.contains(k)).all(|k| {
            s.images[k].intersect(f, &w1.sum).same_as(&s.images[k].intersect(f, &w2.sum))
        });
        if !outside_equal {
            continue;
        }
        let both: Vec<usize> = i1.iter().chain(i2).copied().collect();
        let d = s.meet_of(&both);
        let v1 = sub(&s.module, &w1.sum);
        let v2 = sub(&s.module, &w2.sum);
        for sigma in permutations(i2.len()) {
            let second: Vec<usize> = sigma.iter().map(|&k| i2[k]).collect();
            let matched = i1.iter().zip(&second).all(|(&a, &b)| {
                s.trunks[a].mast.path == s.trunks[b].mast.path
                    && is_isomorphic(&s.trunks[a].module, &s.trunks[b].module)
            });
            if !matched {
                continue;
            }
            if let Some(images) = subsaguaro_iso(s, i1, &second, &v1, &v2, &d) {
                return Some(RedundancyWitness { first: i1.clone(), second, images });
            }
        }
    }
    None
}

fn induced_subgraph(g: &LayeredGraph, nodes: &[usize]) -> LayeredGraph {
    let mut h = LayeredGraph::new();
    for &n in nodes {
        let x = &g.nodes[n];
        h.add_node(x.id.clone(), x.layer, x.vertex);
    }
    for e in &g.edges {
        if let (Some(u), Some(d)) = (nodes.iter().position(|&n| n == e.up), nodes.iter().position(|&n| n == e.down)) {
            h.edges.push(GEdge { up: u, down: d, arrow: e.arrow });
        }
    }
    h
}

fn is_tree(h: &LayeredGraph) -> bool {
    let n = h.nodes.len();
    if n == 0 || h.edges.len() + 1 != n {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for e in &h.edges {
            for (a, b) in [(e.up, e.down), (e.down, e.up)] {
                if a == x && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.iter().all(|&b| b)
}

/// Two equivalent trees in the graph sharing exactly one vertex a, touched
/// from outside only at a.
fn graph_search<F: Field>(
    s: &Saguaro<F>,
    g: &LayeredGraph,
    vecs: &[Vector<F>],
    pairs: &[(Vec<usize>, Vec<usize>)],
) -> Option<GraphPattern> {
    let f = s.field();
    for (i1, i2) in pairs {
        let v1 = s.sum_of(i1);
        let v2 = s.sum_of(i2);
        let both: Vec<usize> = i1.iter().chain(i2).copied().collect();
        let d = s.meet_of(&both);
        let Some(apex) = (0..vecs.len())
            .filter(|&n| d.contains(f, &vecs[n]))
            .find(|&n| s.module.generate(&[vecs[n].clone()]).same_as(&d))
        else {
            continue;
        };
        let side = |v: &Subspace<F>| -> Vec<usize> {
            (0..vecs.len()).filter(|&n| n == apex || (v.contains(f, &vecs[n]) && !d.contains(f, &vecs[n]))).collect()
        };
        let (n1, n2) = (side(&v1), side(&v2));
        if n1.len() < 2 || n1.iter().any(|n| *n != apex && n2.contains(n)) {
            continue;
        }
        let (g1, g2) = (induced_subgraph(g, &n1), induced_subgraph(g, &n2));
        if !is_tree(&g1) || !is_tree(&g2) {
            continue;
        }
        let inside = |e: &GEdge, set: &[usize]| set.contains(&e.up) && set.contains(&e.down);
        let touches = |e: &GEdge| n1.contains(&e.up) || n1.contains(&e.down) || n2.contains(&e.up) || n2.contains(&e.down);
        let sealed = g
            .edges
            .iter()
            .filter(|e| touches(e) && !inside(e, &n1) && !inside(e, &n2))
            .all(|e| e.up == apex || e.down == apex);
        if !sealed {
            continue;
        }
        if graph_isomorphism(&g1, &g2).is_some() {
            return Some(GraphPattern { first: i1.clone(), second: i2.clone(), apex });
        }
    }
    None
}

/// Module-level search for isomorphic subsaguaros, cross-checked against the
/// graph pattern when the algebra has finitely many uniserials per mast.
pub fn is_redundant<F: Field>(s: &Saguaro<F>) -> Result<RedundancyReport<F>> {
    let finite = check_finite_vp(s.alg()).map(|r| r.holds).unwrap_or(false);
    is_redundant_in(s, finite)
}

pub fn is_redundant_in<F: Field>(s: &Saguaro<F>, finite_vp: bool) -> Result<RedundancyReport<F>> {
    let m = s.len();
    if m > MAX_TRUNKS {
        return refuse(format!("redundancy search is capped at {MAX_TRUNKS} trunks, got {m}"));
    }
    let pairs = candidate_pairs(m);
    let witness = module_search(s, &pairs);
    let mut pattern = None;
    let mut graph_checked = false;
    if finite_vp {
        let (g, vecs) = graph_with_nodes(&s.module)?;
        if g.canonical {
            graph_checked = true;
            pattern = graph_search(s, &g, &vecs, &pairs);
            if pattern.is_some() != witness.is_some() {
                return inconsistent(format!(
                    "module-level redundancy ({}) disagrees with the graph pattern ({}) for {}",
                    witness.is_some(),
                    pattern.is_some(),
                    s.describe()
                ));
            }
        }
    }
    Ok(RedundancyReport { redundant: witness.is_some(), witness, pattern, graph_checked })
}

// ---------------------------------------------------------- decomposition

/// The sub-sum over `set` as a saguaro, trying the given order first.
pub fn subsum_saguaro<F: Field>(s: &Saguaro<F>, set: &[usize]) -> Result<Saguaro<F>> {
    let target = s.sum_of(set);
    if let Ok((t, _)) = resaguaro(s, set, &target) {
        return Ok(t);
    }
    if set.len() <= 6 {
        for p in permutations(set.len()) {
            let order: Vec<usize> = p.iter().map(|&k| set[k]).collect();
            if let Ok((t, _)) = resaguaro(s, &order, &target) {
                return Ok(t);
            }
        }
    }
    refuse(format!("no ordering of trunks {set:?} presents their sum as a saguaro"))
}

/// Direct sum of irredundant saguaros, following T = V ⊕ W with
/// V = Σ Λ(t̂_{1i} − φ t̂_{1i}) and W the sum of the trunks outside I₁.
pub fn decompose_saguaro<F: Field>(s: &Saguaro<F>) -> Result<Vec<Saguaro<F>>> {
    let finite = check_finite_vp(s.alg())?.holds;
    if !finite {
        return refuse("saguaro decomposition needs finitely many uniserials per mast");
    }
    let out = decompose_in(s)?;
    let parts: Vec<&Module<F>> = out.iter().map(|t| &t.module).collect();
    let (sum, _, _) = direct_sum(s.alg(), &parts);
    if !is_isomorphic(&sum, &s.module) {
        return inconsistent("summands do not add up to the saguaro");
    }
    Ok(out)
}

fn decompose_in<F: Field>(s: &Saguaro<F>) -> Result<Vec<Saguaro<F>>> {
    let f = s.field();
    let report = is_redundant_in(s, true)?;
    let Some(w) = report.witness else {
        return Ok(vec![s.clone()]);
    };
    let m = s.len();
    let diffs: Vec<Vector<F>> = w.first.iter().zip(&w.images).map(|(&i, y)| vec_sub(f, &s.tops[i], y)).collect();
    let v = s.module.generate(&diffs);
    let rest: Vec<usize> = (0..m).filter(|i| !w.first.contains(i)).collect();
    let wsum = s.sum_of(&rest);
    if !v.intersect(f, &wsum).is_zero() || v.dim() + wsum.dim() != s.module.dim() {
        return inconsistent("V and W do not split the saguaro");
    }
    let mut out = decompose_in(&subsum_saguaro(s, &rest)?)?;
    // V ≅ V₁/D: truncate the trunks of I₁ at D and cut links that fall into D.
    let both: Vec<usize> = w.first.iter().chain(&w.second).copied().collect();
    let d = s.meet_of(&both);
    let v1 = subsum_saguaro(s, &w.first)?;
    let mut trunks: Vec<UniserialRecord<F>> = Vec::new();
    let mut links: LinkSpec = Vec::new();
    let mut scalars = Vec::new();
    let mut flush = |trunks: &mut Vec<UniserialRecord<F>>, links: &mut LinkSpec, scalars: &mut Vec<F::E>| -> Result<()> {
        if !trunks.is_empty() {
            let piece = build_saguaro_scaled(std::mem::take(trunks), std::mem::take(links), std::mem::take(scalars))?;
            out.extend(decompose_in(&piece)?);
        }
        Ok(())
    };
    for k in 0..v1.len() {
        let keep = v1.trunks[k].module.dim() - d.dim();
        if keep == 0 {
            flush(&mut trunks, &mut links, &mut scalars)?;
            continue;
        }
        let t = &v1.trunks[k];
        let top = trunk_top(t);
        let (qm, proj) = quotient(&t.module, &t.module.radical_power(keep));
        let mut rec = t.clone();
        rec.module = qm.with_tops(vec![proj.apply(f, &top)]);
        rec.mast = crate::uniserial::Mast::new(s.alg(), t.mast.path.right(keep - 1));
        if k > 0 && !trunks.is_empty() {
            let l = &v1.links[k - 1];
            let prev_keep = trunks.last().unwrap().module.dim();
            if l.q.len() < prev_keep && l.q_next.len() < keep {
                links.push(l.clone());
                scalars.push(v1.scalars[k - 1].clone());
            } else {
                flush(&mut trunks, &mut links, &mut scalars)?;
            }
        }
        trunks.push(rec);
    }
    flush(&mut trunks, &mut links, &mut scalars)?;
    Ok(out)
}

// ------------------------------------------------------------ enumeration

#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Keep only saguaros with at most this many trunks (the list stays
    /// complete for them: components never have more trunks than the whole).
    pub max_trunks: Option<usize>,
    /// Keep only saguaros whose top is at most this dimension vector.
    pub max_top: Option<Vec<usize>>,
    pub max_saguaros: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_trunks: None, max_top: None, max_saguaros: 5_000 }
    }
}

/// Irredundant saguaros up to isomorphism, grown by Loewy length: each new one
/// hangs lower-stage saguaros by arrows over a common socle vertex.
pub fn enumerate_irredundant<F: Field>(alg: &AlgebraRef<F>) -> Result<Vec<Saguaro<F>>> {
    enumerate_irredundant_with(alg, EnumOptions::default())
}

pub fn enumerate_irredundant_with<F: Field>(alg: &AlgebraRef<F>, opts: EnumOptions) -> Result<Vec<Saguaro<F>>> {
    if alg.quiver().has_double_arrows() {
        return refuse("saguaros need a quiver without double arrows");
    }
    if !check_finite_vp(alg)?.holds {
        return refuse("enumeration needs finitely many uniserials per mast");
    }
    let q = alg.quiver();
    let mut pool: Vec<Saguaro<F>> = Vec::new();
    let mut graphs: Vec<LayeredGraph> = Vec::new();
    for v in 0..q.n {
        let r = uniserial_from_mast(alg, &Path::trivial(v))?.expect("simple module");
        let s = build_saguaro(vec![r], Vec::new())?;
        graphs.push(s.graph()?);
        pool.push(s);
    }
    let mut budget = MAX_CANDIDATES;
    let mut buckets: HashMap<Vec<(usize, usize, Vec<(bool, usize)>)>, Vec<usize>> = HashMap::new();
    for (i, g) in graphs.iter().enumerate() {
        buckets.entry(graph_key(g)).or_default().push(i);
    }
    let mut cache: HashMap<Path, Option<UniserialRecord<F>>> = HashMap::new();
    let mut new_from = 0;
    let mut top_dims: Vec<Vec<usize>> = Vec::new();
    for level in 2..=alg.loewy_length {
        let mut fresh: Vec<(Saguaro<F>, LayeredGraph)> = Vec::new();
        let pool_len = pool.len();
        for v in 0..q.n {
            // Pairs with a component from the previous stage come first; every
            // subset must contain one, the others were built at an earlier stage.
            let mut new_pairs: Vec<(usize, usize)> = Vec::new();
            let mut old_pairs: Vec<(usize, usize)> = Vec::new();
            for (i, s) in pool.iter().enumerate() {
                for a in q.arrows_from(s.socle_vertex()) {
                    if q.arrows[a].target == v {
                        if i >= new_from { new_pairs.push((i, a)) } else { old_pairs.push((i, a)) }
                    }
                }
            }
            let leading = new_pairs.len();
            new_pairs.extend(old_pairs);
            while top_dims.len() < pool.len() {
                top_dims.push(pool[top_dims.len()].module.top_dims());
            }
            let mut search = Attach {
                pool: &pool,
                pairs: &new_pairs,
                cache: &mut cache,
                max_trunks: opts.max_trunks.unwrap_or(usize::MAX),
                max_top: opts.max_top.as_deref(),
                top_dims: &top_dims,
            };
            search.run(leading, &mut |cand: Saguaro<F>| -> Result<bool> {
                if budget == 0 {
                    return refuse(format!("more than {MAX_CANDIDATES} candidate saguaros"));
                }
                budget -= 1;
                if cand.len() <= MAX_TRUNKS && is_redundant_in(&cand, true)?.redundant {
                    return Ok(false);
                }
                if cand.module.loewy_length() == level {
                    let g = cand.graph()?;
                    let bucket = buckets.entry(graph_key(&g)).or_default();
                    let known = bucket.iter().any(|&i| {
                        let h = if i < pool_len { &graphs[i] } else { &fresh[i - pool_len].1 };
                        graph_isomorphism(h, &g).is_some()
                    });
                    if !known {
                        if pool_len + fresh.len() >= opts.max_saguaros {
                            return refuse(format!(
                                "more than {} irredundant saguaros; bound the number of trunks",
                                opts.max_saguaros
                            ));
                        }
                        bucket.push(pool_len + fresh.len());
                        fresh.push((cand, g));
                    }
                }
                Ok(true)
            })?;
        }
        new_from = pool_len;
        if fresh.is_empty() {
            break;
        }
        for (s, g) in fresh {
            pool.push(s);
            graphs.push(g);
        }
    }
    let within = |s: &Saguaro<F>| {
        opts.max_trunks.is_none_or(|k| s.len() <= k)
            && opts.max_top.as_ref().is_none_or(|b| s.module.top_dims().iter().zip(b).all(|(x, y)| x <= y))
    };
    Ok(pool.into_iter().filter(within).collect())
}

/// Sorted (layer, vertex, incident labels) of every node.
fn graph_key(g: &LayeredGraph) -> Vec<(usize, usize, Vec<(bool, usize)>)> {
    let mut key: Vec<_> = (0..g.nodes.len())
        .map(|i| {
            let mut labels: Vec<(bool, usize)> = g
                .edges
                .iter()
                .filter_map(|e| {
                    let a = e.arrow.unwrap_or(usize::MAX);
                    if e.up == i {
                        Some((true, a))
                    } else if e.down == i {
                        Some((false, a))
                    } else {
                        None
                    }
                })
                .collect();
            labels.sort_unstable();
            (g.nodes[i].layer, g.nodes[i].vertex, labels)
        })
        .collect();
    key.sort();
    key
}

/// Depth-first over subsets of (component, arrow) pairs. A subset that fails
/// to build or is redundant is not extended: more components hang below the
/// same root and leave the tree pattern intact.
struct Attach<'a, F: Field> {
    pool: &'a [Saguaro<F>],
    pairs: &'a [(usize, usize)],
    cache: &'a mut HashMap<Path, Option<UniserialRecord<F>>>,
    max_trunks: usize,
    max_top: Option<&'a [usize]>,
    top_dims: &'a [Vec<usize>],
}

impl<F: Field> Attach<'_, F> {
    fn run(&mut self, leading: usize, visit: &mut dyn FnMut(Saguaro<F>) -> Result<bool>) -> Result<()> {
        let mut chosen = Vec::new();
        let zero = vec![0; self.top_dims[0].len()];
        for k in 0..leading {
            self.extend(k, 0, &zero, &mut chosen, visit)?;
        }
        Ok(())
    }

    fn extend(
        &mut self,
        k: usize,
        trunks: usize,
        top: &[usize],
        chosen: &mut Vec<(usize, usize)>,
        visit: &mut dyn FnMut(Saguaro<F>) -> Result<bool>,
    ) -> Result<()> {
        let i = self.pairs[k].0;
        let total = trunks + self.pool[i].len();
        let top: Vec<usize> = top.iter().zip(&self.top_dims[i]).map(|(a, b)| a + b).collect();
        if total > self.max_trunks || self.max_top.is_some_and(|b| top.iter().zip(b).any(|(x, y)| x > y)) {
            return Ok(());
        }
        chosen.push(self.pairs[k]);
        if let Some(cand) = self.hang(chosen)? {
            if visit(cand)? {
                for next in k + 1..self.pairs.len() {
                    self.extend(next, total, &top, chosen, visit)?;
                }
            }
        }
        chosen.pop();
        Ok(())
    }

    fn uniserial(&mut self, p: Path) -> Result<Option<UniserialRecord<F>>> {
        if let Some(r) = self.cache.get(&p) {
            return Ok(r.clone());
        }
        let r = uniserial_from_mast(self.pool[0].alg(), &p)?;
        self.cache.insert(p, r.clone());
        Ok(r)
    }

    /// The saguaro whose trunks are those of each chosen component extended by its arrow.
    fn hang(&mut self, chosen: &[(usize, usize)]) -> Result<Option<Saguaro<F>>> {
        let alg = self.pool[0].alg().clone();
        let q = alg.quiver();
        let mut trunks: Vec<UniserialRecord<F>> = Vec::new();
        let mut links = Vec::new();
        let mut scalars = Vec::new();
        for &(i, a) in chosen {
            let s = &self.pool[i];
            let arrow = Path::arrow(q, a);
            if let Some(prev) = trunks.last() {
                links.push(Link { q: prev.mast.path.clone(), q_next: arrow.after(&s.trunks[0].mast.path) });
                scalars.push(alg.field.one());
            }
            for (k, t) in s.trunks.iter().enumerate() {
                let Some(r) = self.uniserial(arrow.after(&t.mast.path))? else {
                    return Ok(None);
                };
                if k > 0 {
                    links.push(s.links[k - 1].clone());
                    scalars.push(s.scalars[k - 1].clone());
                }
                trunks.push(r);
            }
        }
        match build_saguaro_scaled(trunks, links, scalars) {
            Ok(s) => Ok(Some(s)),
            Err(crate::error::Error::Refusal(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}
