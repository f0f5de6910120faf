//! Homomorphism spaces, Krull–Schmidt splitting, isomorphism tests and subfactors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::field::Field;
use crate::linalg::{is_zero_vec, sparse_kernel, Mat, Subspace, Vector};
use crate::module::{sub, Module, ModuleMap};
use crate::random::rng;

/// Basis of Hom(M, N) as global block-diagonal matrices, solved through a
/// projective presentation of M.
pub fn hom_mats<F: Field>(m: &Module<F>, n: &Module<F>) -> Vec<Mat<F>> {
    let f = m.field();
    if m.dim() == 0 || n.dim() == 0 {
        return Vec::new();
    }
    let pd = m.pres_data();
    let q = m.alg.quiver();
    let npaths = n.path_mats();
    let mut uoff = Vec::with_capacity(pd.gens.len() + 1);
    let mut acc = 0;
    for (v, _) in &pd.gens {
        uoff.push(acc);
        acc += n.dims[*v];
    }
    let nunk = acc;
    if nunk == 0 {
        return Vec::new();
    }
    let mut eqs: Vec<Vec<(usize, F::E)>> = Vec::new();
    for k in &pd.kernel {
        let mut rows: Vec<Vec<(usize, F::E)>> = vec![Vec::new(); n.dim()];
        for (pc, c) in k {
            let (g, b) = pd.pcoords[*pc];
            let t = q.target(&m.alg.basis[b]);
            let a = &npaths[b];
            for i in 0..a.rows {
                for j in 0..a.cols {
                    let x = a.get(i, j);
                    if !f.is_zero(x) {
                        rows[n.offsets[t] + i].push((uoff[g] + j, f.mul(c, x)));
                    }
                }
            }
        }
        eqs.extend(rows.into_iter().filter(|r| !r.is_empty()));
    }
    let sols = sparse_kernel(f, nunk, &eqs);
    sols.iter()
        .map(|sol| {
            let mut out = Mat::zeros(f, n.dim(), m.dim());
            for (j, s) in pd.section.iter().enumerate() {
                for (pc, c) in s {
                    let (g, b) = pd.pcoords[*pc];
                    let v = pd.gens[g].0;
                    let t = q.target(&m.alg.basis[b]);
                    let ng = &sol[uoff[g]..uoff[g] + n.dims[v]];
                    let y = npaths[b].apply(f, ng);
                    for (i, yi) in y.iter().enumerate() {
                        if !f.is_zero(yi) {
                            let r = n.offsets[t] + i;
                            let cur = out.get(r, j).clone();
                            out.set(r, j, f.add(&cur, &f.mul(c, yi)));
                        }
                    }
                }
            }
            out
        })
        .collect()
}

pub fn hom_space<F: Field>(m: &Module<F>, n: &Module<F>) -> Vec<ModuleMap<F>> {
    hom_mats(m, n)
        .into_iter()
        .map(|mat| ModuleMap { source: m.clone(), target: n.clone(), mat })
        .collect()
}

pub fn hom_dim<F: Field>(m: &Module<F>, n: &Module<F>) -> usize {
    hom_mats(m, n).len()
}

/// Hom(M, N) from the intertwining equations f_v M_α = N_α f_u directly.
pub fn hom_space_direct<F: Field>(m: &Module<F>, n: &Module<F>) -> Vec<Mat<F>> {
    let f = m.field();
    let q = m.alg.quiver();
    let nv = q.n;
    let mut uoff = Vec::with_capacity(nv + 1);
    let mut acc = 0;
    for v in 0..nv {
        uoff.push(acc);
        acc += n.dims[v] * m.dims[v];
    }
    let nunk = acc;
    if nunk == 0 {
        return Vec::new();
    }
    let var = |v: usize, i: usize, j: usize| uoff[v] + i * m.dims[v] + j;
    let mut eqs = Vec::new();
    for (ai, a) in q.arrows.iter().enumerate() {
        let (u, v) = (a.source, a.target);
        let (ma, na) = (&m.mats[ai], &n.mats[ai]);
        for i in 0..n.dims[v] {
            for j in 0..m.dims[u] {
                let mut row = Vec::new();
                for k in 0..m.dims[v] {
                    let x = ma.get(k, j);
                    if !f.is_zero(x) {
                        row.push((var(v, i, k), x.clone()));
                    }
                }
                for k in 0..n.dims[u] {
                    let x = na.get(i, k);
                    if !f.is_zero(x) {
                        row.push((var(u, k, j), f.neg(x)));
                    }
                }
                if !row.is_empty() {
                    eqs.push(row);
                }
            }
        }
    }
    sparse_kernel(f, nunk, &eqs)
        .into_iter()
        .map(|sol| {
            let mut out = Mat::zeros(f, n.dim(), m.dim());
            for v in 0..nv {
                for i in 0..n.dims[v] {
                    for j in 0..m.dims[v] {
                        out.set(n.offsets[v] + i, m.offsets[v] + j, sol[var(v, i, j)].clone());
                    }
                }
            }
            out
        })
        .collect()
}

/// Block-diagonal and commuting with every arrow.
pub fn is_homomorphism<F: Field>(m: &Module<F>, n: &Module<F>, mat: &Mat<F>) -> bool {
    let f = m.field();
    if mat.rows != n.dim() || mat.cols != m.dim() {
        return false;
    }
    for j in 0..m.dim() {
        let v = m.vertex_of(j);
        for i in 0..n.dim() {
            if n.vertex_of(i) != v && !f.is_zero(mat.get(i, j)) {
                return false;
            }
        }
    }
    for a in 0..m.mats.len() {
        for j in 0..m.dim() {
            let x = m.unit(j);
            let lhs = mat.apply(f, &m.act(a, &x));
            let rhs = n.act(a, &mat.apply(f, &x));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

pub(crate) fn combine<F: Field>(f: &F, mats: &[Mat<F>], coeffs: &[F::E]) -> Mat<F> {
    let mut out = Mat::zeros(f, mats[0].rows, mats[0].cols);
    for (m, c) in mats.iter().zip(coeffs) {
        if !f.is_zero(c) {
            out = out.add(f, &m.scale(f, c));
        }
    }
    out
}

pub(crate) fn random_coeffs<F: Field, R: Rng>(f: &F, n: usize, rng: &mut R, wide: bool) -> Vec<F::E> {
    (0..n)
        .map(|_| {
            if wide && f.order().is_none() {
                f.from_i64(rng.gen_range(-40..=40))
            } else {
                f.random(rng)
            }
        })
        .collect()
}

/// Element number `idx` of F^n in a fixed enumeration of a finite field.
pub(crate) fn nth_tuple<F: Field>(f: &F, n: usize, mut idx: u64) -> Vec<F::E> {
    let q = f.order().expect("finite field");
    (0..n)
        .map(|_| {
            let x = f.nth(idx % q);
            idx /= q;
            x
        })
        .collect()
}

pub(crate) fn finite_count<F: Field>(f: &F, n: usize, cap: u64) -> Option<u64> {
    let q = f.order()?;
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total.checked_mul(q)?;
        if total > cap {
            return None;
        }
    }
    Some(total)
}

// ------------------------------------------------------------------- tops

/// Top units of M and the induced map on M/JM for endomorphisms / maps.
pub(crate) struct TopFrame<F: Field> {
    rad: Subspace<F>,
    units: Vec<usize>,
}

impl<F: Field> TopFrame<F> {
    pub(crate) fn new(m: &Module<F>) -> Self {
        let rad = m.radical();
        let units = rad.complement_units();
        TopFrame { rad, units }
    }

    pub(crate) fn len(&self) -> usize {
        self.units.len()
    }

    /// Matrix of the induced map top(M) → top(N) for φ: M → N.
    pub(crate) fn induced(f: &F, src: &Self, dst: &Self, phi: &Mat<F>) -> Mat<F> {
        let mut out = Mat::zeros(f, dst.units.len(), src.units.len());
        for (k, &u) in src.units.iter().enumerate() {
            let img = dst.rad.reduce(f, &phi.col(u));
            for (i, &w) in dst.units.iter().enumerate() {
                out.set(i, k, img[w].clone());
            }
        }
        out
    }
}

pub(crate) fn is_nilpotent<F: Field>(f: &F, b: &Mat<F>) -> bool {
    let mut p = b.clone();
    let mut k = 1;
    while k < b.rows {
        p = p.mul(f, &p);
        k *= 2;
    }
    p.is_zero(f)
}

pub(crate) fn vectorize<F: Field>(m: &Mat<F>) -> Vector<F> {
    m.row_vecs().concat()
}

pub(crate) fn trace<F: Field>(f: &F, m: &Mat<F>) -> F::E {
    (0..m.rows).fold(f.zero(), |acc, i| f.add(&acc, m.get(i, i)))
}

/// Characteristic polynomial coefficients c_0..c_n (monic) in characteristic zero.
fn char_poly<F: Field>(f: &F, a: &Mat<F>) -> Vec<F::E> {
    let n = a.rows;
    let mut c = vec![f.zero(); n + 1];
    c[n] = f.one();
    let mut mk = Mat::zeros(f, n, n);
    for k in 1..=n {
        let mut next = a.mul(f, &mk);
        for i in 0..n {
            let cur = next.get(i, i).clone();
            next.set(i, i, f.add(&cur, &c[n + 1 - k]));
        }
        mk = next;
        let tr = trace(f, &a.mul(f, &mk));
        c[n - k] = f.neg(&f.div(&tr, &f.from_i64(k as i64)));
    }
    c
}

fn divisors(n: &BigInt, cap: u64) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > cap {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots of a polynomial with rational coefficients, when the
/// coefficients are small enough to enumerate divisors.
pub fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let mut roots = Vec::new();
    if c.len() <= 1 {
        return roots;
    }
    if c[0].is_zero() {
        roots.push(BigRational::zero());
        while c.first().is_some_and(|x| x.is_zero()) {
            c.remove(0);
        }
    }
    if c.len() <= 1 {
        return roots;
    }
    let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let (Some(ps), Some(qs)) = (divisors(&ints[0], 1 << 40), divisors(ints.last().unwrap(), 1 << 40)) else {
        return roots;
    };
    let eval = |x: &BigRational| c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + a);
    for p in &ps {
        for q in &qs {
            for s in [1, -1] {
                let x = BigRational::new(p * s, q.clone());
                if !roots.contains(&x) && eval(&x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots
}

fn eigen_shifts<F: Field>(f: &F, b: &Mat<F>) -> Vec<F::E> {
    if let Some(all) = f.elements(64) {
        return all.into_iter().filter(|x| !f.is_zero(x)).collect();
    }
    let mut out: Vec<F::E> = Vec::new();
    if f.characteristic() == 0 {
        let cp: Option<Vec<BigRational>> = char_poly(f, b).iter().map(|x| f.to_rational(x)).collect();
        if let Some(cp) = cp {
            for r in rational_roots(&cp) {
                if let Some(x) = f.from_rational(&r) {
                    if !f.is_zero(&x) && !out.contains(&x) {
                        out.push(x);
                    }
                }
            }
        }
    }
    for i in 0..b.rows {
        let d = b.get(i, i).clone();
        if !f.is_zero(&d) && !out.contains(&d) {
            out.push(d);
        }
    }
    out
}

// -------------------------------------------------------------- decompose

#[derive(Clone, Debug)]
pub struct Summand<F: Field> {
    pub module: Module<F>,
    /// dim M × dim summand.
    pub inclusion: Mat<F>,
    /// dim summand × dim M; projection along the other summands.
    pub projection: Mat<F>,
    /// Indecomposability proved (local endomorphism ring) rather than merely no splitting found.
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct Decomposition<F: Field> {
    pub summands: Vec<Summand<F>>,
}

impl<F: Field> Decomposition<F> {
    pub fn certified(&self) -> bool {
        self.summands.iter().all(|s| s.certified)
    }

    pub fn modules(&self) -> Vec<Module<F>> {
        self.summands.iter().map(|s| s.module.clone()).collect()
    }

    /// Isomorphism classes with multiplicities.
    pub fn classes(&self) -> Vec<(Module<F>, usize)> {
        let mut out: Vec<(Module<F>, usize)> = Vec::new();
        for s in &self.summands {
            match out.iter_mut().find(|(m, _)| is_isomorphic(m, &s.module)) {
                Some(e) => e.1 += 1,
                None => out.push((s.module.clone(), 1)),
            }
        }
        out
    }
}

enum Split<F: Field> {
    Local(bool),
    Parts(Subspace<F>, Subspace<F>),
}

fn fitting<F: Field>(x: &Module<F>, phi: &Mat<F>) -> Split<F> {
    let f = x.field();
    let mut p = phi.clone();
    let mut k = 1;
    while k < x.dim() {
        p = p.mul(f, &p);
        k *= 2;
    }
    let ker = Subspace::from_vectors(f, x.dim(), &p.kernel(f));
    let im = p.image(f);
    debug_assert_eq!(ker.dim() + im.dim(), x.dim());
    Split::Parts(ker, im)
}

/// Whether End(M) is local, and if not, a Fitting splitting when one is found.
fn find_split<F: Field>(x: &Module<F>, salt: u64) -> Split<F> {
    let f = x.field();
    let frame = TopFrame::new(x);
    let t = frame.len();
    if t <= 1 {
        return Split::Local(true);
    }
    let ends = hom_mats(x, x);
    let bars: Vec<Mat<F>> = ends.iter().map(|e| TopFrame::induced(f, &frame, &frame, e)).collect();
    // independent subset spanning B = image of End in End(top)
    let mut span = Subspace::zero(t * t);
    let mut sel = Vec::new();
    for (i, b) in bars.iter().enumerate() {
        if span.add_vector(f, &vectorize(b)) {
            sel.push(i);
        }
    }
    let dim_b = sel.len();
    if dim_b <= 1 {
        return Split::Local(true);
    }
    let id = Mat::identity(f, x.dim());
    let id_t = Mat::identity(f, t);
    let good = |b: &Mat<F>| !b.is_invertible(f) && !is_nilpotent(f, b);
    let sel_ends: Vec<Mat<F>> = sel.iter().map(|&i| ends[i].clone()).collect();
    let sel_bars: Vec<Mat<F>> = sel.iter().map(|&i| bars[i].clone()).collect();

    if f.characteristic() == 0 {
        let mut gram = Mat::zeros(f, dim_b, dim_b);
        for i in 0..dim_b {
            for j in 0..dim_b {
                gram.set(i, j, trace(f, &sel_bars[i].mul(f, &sel_bars[j])));
            }
        }
        if dim_b - gram.kernel(f).len() == 1 {
            return Split::Local(true);
        }
    } else if let Some(total) = finite_count(f, dim_b, 1 << 16) {
        for idx in 1..total {
            let c = nth_tuple(f, dim_b, idx);
            let b = combine(f, &sel_bars, &c);
            if good(&b) {
                return fitting(x, &combine(f, &sel_ends, &c));
            }
        }
        return Split::Local(true);
    }

    let try_one = |phi: &Mat<F>, b: &Mat<F>| -> Option<Split<F>> {
        if good(b) {
            return Some(fitting(x, phi));
        }
        for lam in eigen_shifts(f, b) {
            let bs = b.sub(f, &id_t.scale(f, &lam));
            if good(&bs) {
                return Some(fitting(x, &phi.sub(f, &id.scale(f, &lam))));
            }
        }
        None
    };
    for (phi, b) in sel_ends.iter().zip(&sel_bars) {
        if let Some(s) = try_one(phi, b) {
            return s;
        }
    }
    let mut tried = 0;
    'outer: for i in 0..dim_b {
        for j in 0..dim_b {
            if tried > 200 {
                break 'outer;
            }
            tried += 1;
            let b = sel_bars[i].mul(f, &sel_bars[j]);
            if let Some(s) = try_one(&sel_ends[i].mul(f, &sel_ends[j]), &b) {
                return s;
            }
        }
    }
    let mut r = rng(salt ^ 0xdec0);
    for _ in 0..40 {
        let c = random_coeffs(f, dim_b, &mut r, false);
        let b = combine(f, &sel_bars, &c);
        if let Some(s) = try_one(&combine(f, &sel_ends, &c), &b) {
            return s;
        }
    }
    Split::Local(false)
}

/// Krull–Schmidt decomposition by Fitting splittings of endomorphisms.
pub fn decompose<F: Field>(m: &Module<F>) -> Decomposition<F> {
    let f = m.field();
    let mut found: Vec<(Module<F>, Mat<F>, bool)> = Vec::new();
    let mut stack = vec![(m.clone(), Mat::identity(f, m.dim()))];
    let mut salt = 1u64;
    while let Some((x, incl)) = stack.pop() {
        if x.dim() == 0 {
            continue;
        }
        salt += 1;
        match find_split(&x, salt) {
            Split::Local(c) => found.push((x, incl, c)),
            Split::Parts(a, b) => {
                for u in [b, a] {
                    let (y, i) = sub(&x, &u);
                    stack.push((y, incl.mul(f, &i)));
                }
            }
        }
    }
    found.sort_by_key(|(x, _, _)| x.offsets.iter().position(|&o| o > 0).unwrap_or(0));
    let cols: Vec<Vector<F>> = found.iter().flat_map(|(_, i, _)| (0..i.cols).map(|j| i.col(j))).collect();
    let basis = Mat::from_cols(f, m.dim(), &cols);
    let inv = basis.inverse(f).expect("summands span the module");
    let mut row = 0;
    let summands = found
        .into_iter()
        .map(|(module, inclusion, certified)| {
            let d = module.dim();
            let rows: Vec<Vector<F>> = (row..row + d).map(|r| inv.row(r).to_vec()).collect();
            row += d;
            let projection = Mat::from_rows(f, m.dim(), &rows);
            Summand { module, inclusion, projection, certified }
        })
        .collect();
    Decomposition { summands }
}

pub fn is_indecomposable<F: Field>(m: &Module<F>) -> bool {
    m.dim() > 0 && matches!(find_split(m, 7), Split::Local(_))
}

/// Local endomorphism ring proved.
pub fn is_certified_indecomposable<F: Field>(m: &Module<F>) -> bool {
    m.dim() > 0 && matches!(find_split(m, 7), Split::Local(true))
}

// -------------------------------------------------------------- isomorphy

/// An isomorphism M → N, searched inside Hom(M, N).
pub fn find_isomorphism<F: Field>(m: &Module<F>, n: &Module<F>) -> Option<Mat<F>> {
    let f = m.field();
    if m.dims != n.dims {
        return None;
    }
    if m.dim() == 0 {
        return Some(Mat::zeros(f, 0, 0));
    }
    let (ta, tb) = (TopFrame::new(m), TopFrame::new(n));
    if ta.len() != tb.len() || m.top_dims() != n.top_dims() {
        return None;
    }
    let homs = hom_mats(m, n);
    if homs.is_empty() {
        return None;
    }
    let bars: Vec<Mat<F>> = homs.iter().map(|h| TopFrame::induced(f, &ta, &tb, h)).collect();
    let accept = |c: &[F::E]| -> Option<Mat<F>> {
        if !combine(f, &bars, c).is_invertible(f) {
            return None;
        }
        let phi = combine(f, &homs, c);
        phi.is_invertible(f).then_some(phi)
    };
    let k = homs.len();
    for i in 0..k {
        let mut c = vec![f.zero(); k];
        c[i] = f.one();
        if let Some(p) = accept(&c) {
            return Some(p);
        }
    }
    if let Some(total) = finite_count(f, k, 1 << 16) {
        for idx in 1..total {
            if let Some(p) = accept(&nth_tuple(f, k, idx)) {
                return Some(p);
            }
        }
        return None;
    }
    let mut r = rng(0x150 ^ (m.dim() as u64));
    for _ in 0..60 {
        if let Some(p) = accept(&random_coeffs(f, k, &mut r, true)) {
            return Some(p);
        }
    }
    None
}

pub fn is_isomorphic<F: Field>(m: &Module<F>, n: &Module<F>) -> bool {
    find_isomorphism(m, n).is_some()
}

// -------------------------------------------------------------- subfactors

#[derive(Clone, Debug)]
pub enum SubfactorResult<F: Field> {
    /// U ⊆ V ⊆ M with V/U ≅ H.
    Found { v: Subspace<F>, u: Subspace<F> },
    NotFound(String),
    BudgetExhausted,
}

impl<F: Field> SubfactorResult<F> {
    pub fn is_found(&self) -> bool {
        matches!(self, SubfactorResult::Found { .. })
    }
}

/// A surjection V → H inside Hom(V, H), if one is found.
fn find_surjection<F: Field>(v: &Module<F>, h: &Module<F>, salt: u64) -> (Option<Mat<F>>, bool) {
    let f = v.field();
    let homs = hom_mats(v, h);
    if homs.is_empty() {
        return (None, true);
    }
    let k = homs.len();
    let surj = |c: &[F::E]| {
        let phi = combine(f, &homs, c);
        (phi.rank(f) == h.dim()).then_some(phi)
    };
    if let Some(total) = finite_count(f, k, 1 << 12) {
        for idx in 1..total {
            if let Some(p) = surj(&nth_tuple(f, k, idx)) {
                return (Some(p), true);
            }
        }
        return (None, true);
    }
    let mut r = rng(salt);
    for _ in 0..12 {
        if let Some(p) = surj(&random_coeffs(f, k, &mut r, true)) {
            return (Some(p), false);
        }
    }
    (None, false)
}

/// Bounded search for H as a subfactor of M; `budget` caps the number of generating tuples.
pub fn subfactor_search<F: Field>(h: &Module<F>, m: &Module<F>, budget: usize) -> SubfactorResult<F> {
    let f = m.field();
    if h.dim() == 0 {
        return SubfactorResult::Found { v: Subspace::zero(m.dim()), u: Subspace::zero(m.dim()) };
    }
    if let Some(v) = (0..h.dims.len()).find(|&v| h.dims[v] > m.dims[v]) {
        return SubfactorResult::NotFound(format!("dimension at vertex {} exceeds that of the ambient module", v + 1));
    }
    let top_verts: Vec<usize> = h.generating_tops().0.iter().map(|t| h.vertex_of_vec(t).unwrap()).collect();
    let mut r = rng(0x5bf ^ m.dim() as u64);
    let mut exhaustive = true;
    let mut cands: Vec<Vec<Vector<F>>> = Vec::new();
    for &w in &top_verts {
        let d = m.dims[w];
        let mut list = Vec::new();
        match finite_count(f, d, 256) {
            Some(total) => {
                for idx in 1..total {
                    let c = nth_tuple(f, d, idx);
                    let mut x = m.zero_vec();
                    x[m.block(w)].clone_from_slice(&c);
                    list.push(x);
                }
            }
            None => {
                exhaustive = false;
                for i in m.block(w) {
                    list.push(m.unit(i));
                }
                for _ in 0..d.min(6) {
                    let mut x = m.zero_vec();
                    for i in m.block(w) {
                        x[i] = f.random(&mut r);
                    }
                    if !is_zero_vec(f, &x) {
                        list.push(x);
                    }
                }
            }
        }
        cands.push(list);
    }
    let total: usize = cands.iter().map(Vec::len).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
    if total > budget {
        exhaustive = false;
    }
    let mut idx = vec![0usize; cands.len()];
    let mut seen: Vec<Subspace<F>> = Vec::new();
    for step in 0..total.min(budget) {
        let tuple: Vec<Vector<F>> = idx.iter().zip(&cands).map(|(&i, c)| c[i].clone()).collect();
        // advance the odometer
        for k in 0..idx.len() {
            idx[k] += 1;
            if idx[k] < cands[k].len() {
                break;
            }
            idx[k] = 0;
        }
        let v = m.generate(&tuple);
        if v.dim() < h.dim() || seen.iter().any(|s| s.same_as(&v)) {
            continue;
        }
        let (vm, incl) = sub(m, &v);
        if (0..h.dims.len()).any(|x| vm.dims[x] < h.dims[x]) {
            seen.push(v);
            continue;
        }
        let (phi, complete) = find_surjection(&vm, h, step as u64);
        if !complete {
            exhaustive = false;
        }
        if let Some(phi) = phi {
            let ker: Vec<Vector<F>> = phi.kernel(f).iter().map(|k| incl.apply(f, k)).collect();
            let u = Subspace::from_vectors(f, m.dim(), &ker);
            return SubfactorResult::Found { v, u };
        }
        seen.push(v);
    }
    if exhaustive {
        SubfactorResult::NotFound("exhaustive search over the finite field".into())
    } else {
        SubfactorResult::BudgetExhausted
    }
}
