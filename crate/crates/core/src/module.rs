//! Finite-dimensional modules as vertex-graded spaces with arrow matrices.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;

use crate::algebra::{AlgebraRef, Sparse};
use crate::error::{inconsistent, input, refuse, Result};
use crate::field::Field;
use crate::graph::{validate_graph, GEdge, LayeredGraph};
use crate::linalg::{axpy, is_zero_vec, proportion, rref, unit, Mat, Subspace, Vector};
use crate::presentation::{ModuleSpec, Path};

/// Generators, kernel and section of a projective presentation, cached per module.
#[derive(Debug)]
pub(crate) struct PresData<F: Field> {
    pub gens: Vec<(usize, Vector<F>)>,
    /// P-coordinates as (generator, algebra basis index).
    pub pcoords: Vec<(usize, usize)>,
    pub kernel: Vec<Sparse<F>>,
    /// A preimage in P of every basis vector of the module.
    pub section: Vec<Sparse<F>>,
}

#[derive(Clone, Debug)]
pub struct Module<F: Field> {
    pub alg: AlgebraRef<F>,
    pub dims: Vec<usize>,
    pub offsets: Vec<usize>,
    /// Per arrow, a `dims[target] × dims[source]` matrix.
    pub mats: Vec<Mat<F>>,
    /// Marked top elements as global vectors.
    pub tops: Vec<Vector<F>>,
    pres: OnceLock<Arc<PresData<F>>>,
    paths: OnceLock<Arc<Vec<Mat<F>>>>,
}

/// A homomorphism stored as one block-diagonal matrix (`dim target × dim source`).
#[derive(Clone, Debug)]
pub struct ModuleMap<F: Field> {
    pub source: Module<F>,
    pub target: Module<F>,
    pub mat: Mat<F>,
}

impl<F: Field> ModuleMap<F> {
    /// The matrix of the map between the vertex-`v` pieces.
    pub fn block(&self, v: usize) -> Mat<F> {
        let f = self.source.field();
        let (rs, cs) = (self.target.block(v), self.source.block(v));
        let mut out = Mat::zeros(f, rs.len(), cs.len());
        for (i, r) in rs.clone().enumerate() {
            for (j, c) in cs.clone().enumerate() {
                out.set(i, j, self.mat.get(r, c).clone());
            }
        }
        out
    }

    pub fn apply(&self, x: &[F::E]) -> Vector<F> {
        self.mat.apply(self.source.field(), x)
    }

    pub fn rank(&self) -> usize {
        self.mat.rank(self.source.field())
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.source.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target.dim()
    }
}

pub(crate) fn offsets_of(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    for d in dims {
        out.push(acc);
        acc += d;
    }
    out.push(acc);
    out
}

impl<F: Field> Module<F> {
    /// Builds a module and checks that every relation acts as zero.
    pub fn new(alg: AlgebraRef<F>, dims: Vec<usize>, mats: Vec<Mat<F>>, tops: Vec<Vector<F>>) -> Result<Self> {
        let q = alg.quiver();
        if dims.len() != q.n || mats.len() != q.arrows.len() {
            return input("module data does not match the quiver");
        }
        for (a, m) in q.arrows.iter().zip(&mats) {
            if m.rows != dims[a.target] || m.cols != dims[a.source] {
                return input(format!("matrix of arrow {} has the wrong shape", a.name));
            }
        }
        let offsets = offsets_of(&dims);
        let m = Module { alg, dims, offsets, mats, tops, pres: OnceLock::new(), paths: OnceLock::new() };
        m.check_relations()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(alg: AlgebraRef<F>, dims: Vec<usize>, mats: Vec<Mat<F>>, tops: Vec<Vector<F>>) -> Self {
        let offsets = offsets_of(&dims);
        Module { alg, dims, offsets, mats, tops, pres: OnceLock::new(), paths: OnceLock::new() }
    }

    pub fn zero(alg: &AlgebraRef<F>) -> Self {
        let q = alg.quiver();
        let f = &alg.field;
        let mats = q.arrows.iter().map(|_| Mat::zeros(f, 0, 0)).collect();
        Self::new_unchecked(alg.clone(), vec![0; q.n], mats, Vec::new())
    }

    pub fn simple(alg: &AlgebraRef<F>, v: usize) -> Self {
        let q = alg.quiver();
        let f = &alg.field;
        let mut dims = vec![0; q.n];
        dims[v] = 1;
        let mats = q.arrows.iter().map(|a| Mat::zeros(f, dims[a.target], dims[a.source])).collect();
        Self::new_unchecked(alg.clone(), dims, mats, vec![unit(f, 1, 0)])
    }

    pub fn field(&self) -> &F {
        &self.alg.field
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.dims.len()]
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn block(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn vertex_of(&self, i: usize) -> usize {
        (0..self.dims.len()).find(|&v| i < self.offsets[v + 1]).expect("index in range")
    }

    pub fn zero_vec(&self) -> Vector<F> {
        vec![self.field().zero(); self.dim()]
    }

    pub fn unit(&self, i: usize) -> Vector<F> {
        unit(self.field(), self.dim(), i)
    }

    pub fn with_tops(mut self, tops: Vec<Vector<F>>) -> Self {
        self.tops = tops;
        self.pres = OnceLock::new();
        self
    }

    /// Vertex of a homogeneous nonzero vector.
    pub fn vertex_of_vec(&self, x: &[F::E]) -> Option<usize> {
        let f = self.field();
        let i = x.iter().position(|c| !f.is_zero(c))?;
        Some(self.vertex_of(i))
    }

    pub fn is_homogeneous(&self, x: &[F::E]) -> bool {
        let f = self.field();
        match self.vertex_of_vec(x) {
            None => true,
            Some(v) => x.iter().enumerate().all(|(i, c)| f.is_zero(c) || self.block(v).contains(&i)),
        }
    }

    /// The component `e_v x`.
    pub fn component(&self, x: &[F::E], v: usize) -> Vector<F> {
        let f = self.field();
        let r = self.block(v);
        x.iter().enumerate().map(|(i, c)| if r.contains(&i) { c.clone() } else { f.zero() }).collect()
    }

    pub fn act(&self, a: usize, x: &[F::E]) -> Vector<F> {
        let f = self.field();
        let arr = &self.alg.quiver().arrows[a];
        let src = &x[self.block(arr.source)];
        let img = self.mats[a].apply(f, src);
        let mut out = self.zero_vec();
        out[self.block(arr.target)].clone_from_slice(&img);
        out
    }

    pub fn act_path(&self, p: &Path, x: &[F::E]) -> Vector<F> {
        let mut v = self.component(x, p.source);
        for &a in &p.arrows {
            v = self.act(a, &v);
        }
        v
    }

    pub fn act_basis(&self, b: usize, x: &[F::E]) -> Vector<F> {
        let f = self.field();
        let p = &self.alg.basis[b];
        let m = &self.path_mats()[b];
        let img = m.apply(f, &x[self.block(p.source)]);
        let mut out = self.zero_vec();
        let t = self.alg.quiver().target(p);
        out[self.block(t)].clone_from_slice(&img);
        out
    }

    pub fn act_elem(&self, r: &Sparse<F>, x: &[F::E]) -> Vector<F> {
        let f = self.field();
        let mut out = self.zero_vec();
        for (b, c) in r {
            axpy(f, &mut out, c, &self.act_basis(*b, x));
        }
        out
    }

    /// Local matrices of all algebra basis paths.
    pub fn path_mats(&self) -> Arc<Vec<Mat<F>>> {
        self.paths
            .get_or_init(|| {
                let f = self.field();
                let q = self.alg.quiver();
                let mats = self
                    .alg
                    .basis
                    .iter()
                    .map(|p| {
                        let mut m = Mat::identity(f, self.dims[p.source]);
                        for &a in &p.arrows {
                            m = self.mats[a].mul(f, &m);
                        }
                        debug_assert_eq!(m.rows, self.dims[q.target(p)]);
                        m
                    })
                    .collect();
                Arc::new(mats)
            })
            .clone()
    }

    fn check_relations(&self) -> Result<()> {
        let f = self.field();
        let q = self.alg.quiver();
        for r in &self.alg.pres.relations {
            let s = r.terms[0].1.source;
            let t = q.target(&r.terms[0].1);
            let mut acc = Mat::zeros(f, self.dims[t], self.dims[s]);
            for (c, p) in &r.terms {
                let Some(c) = f.from_rational(c) else { continue };
                let mut m = Mat::identity(f, self.dims[s]);
                for &a in &p.arrows {
                    m = self.mats[a].mul(f, &m);
                }
                acc = acc.add(f, &m.scale(f, &c));
            }
            if !acc.is_zero(f) {
                return inconsistent("a relation of the algebra acts nontrivially on the module");
            }
        }
        if !self.radical_power(self.alg.loewy_length).is_zero() {
            return inconsistent("J^L M is nonzero");
        }
        Ok(())
    }

    /// J·U for a subspace U.
    pub fn radical_of(&self, u: &Subspace<F>) -> Subspace<F> {
        let f = self.field();
        let mut vecs = Vec::new();
        for x in u.basis() {
            for a in 0..self.mats.len() {
                let y = self.act(a, x);
                if !is_zero_vec(f, &y) {
                    vecs.push(y);
                }
            }
        }
        Subspace::from_vectors(f, self.dim(), &vecs)
    }

    pub fn radical(&self) -> Subspace<F> {
        self.radical_of(&Subspace::full(self.field(), self.dim()))
    }

    pub fn radical_power(&self, k: usize) -> Subspace<F> {
        let mut s = Subspace::full(self.field(), self.dim());
        for _ in 0..k {
            if s.is_zero() {
                break;
            }
            s = self.radical_of(&s);
        }
        s
    }

    /// J^0 M ⊇ J^1 M ⊇ … down to (and including) 0.
    pub fn radical_filtration(&self) -> Vec<Subspace<F>> {
        let mut out = vec![Subspace::full(self.field(), self.dim())];
        while !out.last().unwrap().is_zero() {
            let next = self.radical_of(out.last().unwrap());
            out.push(next);
        }
        out
    }

    pub fn loewy_length(&self) -> usize {
        self.radical_filtration().len() - 1
    }

    /// Submodule generated by the given vectors.
    pub fn generate(&self, vecs: &[Vector<F>]) -> Subspace<F> {
        let f = self.field();
        let mut s = Subspace::zero(self.dim());
        let mut queue: VecDeque<Vector<F>> = VecDeque::new();
        for x in vecs {
            for v in 0..self.dims.len() {
                let c = self.component(x, v);
                if !is_zero_vec(f, &c) {
                    queue.push_back(c);
                }
            }
        }
        while let Some(x) = queue.pop_front() {
            if s.add_vector(f, &x) {
                for a in 0..self.mats.len() {
                    let y = self.act(a, &x);
                    if !is_zero_vec(f, &y) {
                        queue.push_back(y);
                    }
                }
            }
        }
        s
    }

    pub fn is_submodule(&self, u: &Subspace<F>) -> bool {
        let f = self.field();
        u.basis().iter().all(|x| {
            self.is_homogeneous(x) && (0..self.mats.len()).all(|a| u.contains(f, &self.act(a, x)))
        })
    }

    /// Unit vectors spanning a complement of JM; a basis of the top.
    pub fn top_basis(&self) -> Vec<Vector<F>> {
        let j = self.radical();
        j.complement_units().into_iter().map(|i| self.unit(i)).collect()
    }

    pub fn top_dims(&self) -> Vec<usize> {
        let j = self.radical();
        let mut out = vec![0; self.dims.len()];
        for i in j.complement_units() {
            out[self.vertex_of(i)] += 1;
        }
        out
    }

    /// Marked tops when they are homogeneous, independent modulo JM and generating;
    /// otherwise a computed top basis.
    pub fn generating_tops(&self) -> (Vec<Vector<F>>, bool) {
        if !self.tops.is_empty() && self.tops_are_valid() {
            return (self.tops.clone(), true);
        }
        (self.top_basis(), false)
    }

    pub fn tops_are_valid(&self) -> bool {
        let f = self.field();
        if !self.tops.iter().all(|t| self.is_homogeneous(t)) {
            return false;
        }
        let j = self.radical();
        let mut s = j.clone();
        for t in &self.tops {
            if !s.add_vector(f, t) {
                return false;
            }
        }
        s.dim() == self.dim()
    }

    pub(crate) fn pres_data(&self) -> Arc<PresData<F>> {
        self.pres.get_or_init(|| Arc::new(self.compute_pres())).clone()
    }

    fn compute_pres(&self) -> PresData<F> {
        let f = self.field();
        let (tops, _) = self.generating_tops();
        let gens: Vec<(usize, Vector<F>)> = tops
            .into_iter()
            .map(|t| (self.vertex_of_vec(&t).expect("nonzero top"), t))
            .collect();
        let mut pcoords = Vec::new();
        let mut cols = Vec::new();
        for (g, (v, x)) in gens.iter().enumerate() {
            for b in self.alg.basis_from(*v) {
                pcoords.push((g, b));
                cols.push(self.act_basis(b, x));
            }
        }
        let n = self.dim();
        let np = pcoords.len();
        // rows of [Π | I]
        let mut rows: Vec<Vector<F>> = (0..n)
            .map(|i| {
                let mut r: Vector<F> = cols.iter().map(|c| c[i].clone()).collect();
                r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
                r
            })
            .collect();
        let pivots = rref(f, &mut rows);
        debug_assert!(pivots.iter().all(|&p| p < np), "tops must generate");
        let mut section = vec![Vec::new(); n];
        for (r, &p) in rows.iter().zip(&pivots) {
            for (j, s) in section.iter_mut().enumerate() {
                let c = &r[np + j];
                if !f.is_zero(c) {
                    s.push((p, c.clone()));
                }
            }
        }
        let pi_rows: Vec<Vector<F>> = rows.iter().map(|r| r[..np].to_vec()).collect();
        let mut is_pivot = vec![false; np];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut kernel = Vec::new();
        for free in (0..np).filter(|&j| !is_pivot[j]) {
            let mut k = vec![(free, f.one())];
            for (r, &p) in pi_rows.iter().zip(&pivots) {
                if !f.is_zero(&r[free]) {
                    k.push((p, f.neg(&r[free])));
                }
            }
            kernel.push(k);
        }
        PresData { gens, pcoords, kernel, section }
    }

    pub fn dim_vector(&self) -> Vec<usize> {
        self.dims.clone()
    }

    /// Same dimensions and identical arrow matrices.
    pub fn same_as(&self, other: &Self) -> bool {
        self.dims == other.dims && self.mats == other.mats
    }
}

// ------------------------------------------------------------ constructions

/// Λe for a vertex e, with the class of e marked as top.
pub fn regular_module<F: Field>(alg: &AlgebraRef<F>, e: usize) -> Module<F> {
    free_module(alg, &[e]).0
}

/// The free module ⊕ Λe_g together with the (generator, basis index) of each coordinate.
pub fn free_module<F: Field>(alg: &AlgebraRef<F>, gens: &[usize]) -> (Module<F>, Vec<(usize, usize)>) {
    let f = &alg.field;
    let q = alg.quiver();
    let mut by_vertex: Vec<Vec<(usize, usize)>> = vec![Vec::new(); q.n];
    for (g, &v) in gens.iter().enumerate() {
        for b in alg.basis_from(v) {
            by_vertex[q.target(&alg.basis[b])].push((g, b));
        }
    }
    let dims: Vec<usize> = by_vertex.iter().map(Vec::len).collect();
    let coords: Vec<(usize, usize)> = by_vertex.concat();
    let index: HashMap<(usize, usize), usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let offsets = offsets_of(&dims);
    let mut mats: Vec<Mat<F>> = q.arrows.iter().map(|a| Mat::zeros(f, dims[a.target], dims[a.source])).collect();
    for (ai, a) in q.arrows.iter().enumerate() {
        let pa = Path::arrow(q, ai);
        for (j, &(g, b)) in by_vertex[a.source].iter().enumerate() {
            for (k, c) in alg.nf_path(&pa.after(&alg.basis[b])) {
                let i = index[&(g, k)] - offsets[a.target];
                let cur = mats[ai].get(i, j).clone();
                mats[ai].set(i, j, f.add(&cur, &c));
            }
        }
    }
    let tops = gens
        .iter()
        .enumerate()
        .map(|(g, &v)| {
            let b = alg.basis_index(&Path::trivial(v)).expect("trivial path in basis");
            unit(f, coords.len(), index[&(g, b)])
        })
        .collect();
    (Module::new_unchecked(alg.clone(), dims, mats, tops), coords)
}

/// Submodule on a graded subspace, with its inclusion matrix.
pub fn sub<F: Field>(m: &Module<F>, u: &Subspace<F>) -> (Module<F>, Mat<F>) {
    let f = m.field();
    let q = m.alg.quiver();
    let rows = u.basis();
    let verts: Vec<usize> = rows.iter().map(|r| m.vertex_of_vec(r).expect("nonzero row")).collect();
    let mut dims = vec![0; q.n];
    for &v in &verts {
        dims[v] += 1;
    }
    let offsets = offsets_of(&dims);
    let mut mats: Vec<Mat<F>> = q.arrows.iter().map(|a| Mat::zeros(f, dims[a.target], dims[a.source])).collect();
    for (ai, a) in q.arrows.iter().enumerate() {
        for (ri, r) in rows.iter().enumerate() {
            if verts[ri] != a.source {
                continue;
            }
            let j = ri - offsets[a.source];
            let y = m.act(ai, r);
            let c = u.coords(f, &y).expect("subspace is a submodule");
            for (k, x) in c.iter().enumerate() {
                if !f.is_zero(x) {
                    mats[ai].set(k - offsets[a.target], j, x.clone());
                }
            }
        }
    }
    let incl = Mat::from_cols(f, m.dim(), rows);
    (Module::new_unchecked(m.alg.clone(), dims, mats, Vec::new()), incl)
}

/// Quotient by a graded submodule, with the projection matrix; marked tops are carried along.
pub fn quotient<F: Field>(m: &Module<F>, u: &Subspace<F>) -> (Module<F>, Mat<F>) {
    let f = m.field();
    let q = m.alg.quiver();
    let keep = u.complement_units();
    let mut dims = vec![0; q.n];
    for &i in &keep {
        dims[m.vertex_of(i)] += 1;
    }
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let project = |x: &[F::E]| -> Vector<F> {
        let r = u.reduce(f, x);
        keep.iter().map(|&i| r[i].clone()).collect()
    };
    let offsets = offsets_of(&dims);
    let mut mats: Vec<Mat<F>> = q.arrows.iter().map(|a| Mat::zeros(f, dims[a.target], dims[a.source])).collect();
    for (ai, a) in q.arrows.iter().enumerate() {
        for &i in keep.iter().filter(|&&i| m.vertex_of(i) == a.source) {
            let j = pos[&i] - offsets[a.source];
            let img = project(&m.act(ai, &m.unit(i)));
            for (k, x) in img.iter().enumerate() {
                if !f.is_zero(x) {
                    mats[ai].set(k - offsets[a.target], j, x.clone());
                }
            }
        }
    }
    let mut proj = Mat::zeros(f, keep.len(), m.dim());
    for j in 0..m.dim() {
        for (k, x) in project(&m.unit(j)).into_iter().enumerate() {
            proj.set(k, j, x);
        }
    }
    let tops = m.tops.iter().map(|t| project(t)).collect();
    (Module::new_unchecked(m.alg.clone(), dims, mats, tops), proj)
}

/// Direct sum with injections and projections.
pub fn direct_sum<F: Field>(alg: &AlgebraRef<F>, parts: &[&Module<F>]) -> (Module<F>, Vec<Mat<F>>, Vec<Mat<F>>) {
    let f = &alg.field;
    let q = alg.quiver();
    let n = q.n;
    let dims: Vec<usize> = (0..n).map(|v| parts.iter().map(|m| m.dims[v]).sum()).collect();
    let offsets = offsets_of(&dims);
    let total = offsets[n];
    // position of part k, vertex v inside the sum
    let start = |k: usize, v: usize| offsets[v] + parts[..k].iter().map(|m| m.dims[v]).sum::<usize>();
    let mut mats: Vec<Mat<F>> = q.arrows.iter().map(|a| Mat::zeros(f, dims[a.target], dims[a.source])).collect();
    for (ai, a) in q.arrows.iter().enumerate() {
        for (k, m) in parts.iter().enumerate() {
            let r0 = start(k, a.target) - offsets[a.target];
            let c0 = start(k, a.source) - offsets[a.source];
            for i in 0..m.dims[a.target] {
                for j in 0..m.dims[a.source] {
                    mats[ai].set(r0 + i, c0 + j, m.mats[ai].get(i, j).clone());
                }
            }
        }
    }
    let mut incs = Vec::new();
    let mut projs = Vec::new();
    let mut tops = Vec::new();
    for (k, m) in parts.iter().enumerate() {
        let mut inc = Mat::zeros(f, total, m.dim());
        for v in 0..n {
            for i in 0..m.dims[v] {
                inc.set(start(k, v) + i, m.offsets[v] + i, f.one());
            }
        }
        for t in &m.tops {
            tops.push(inc.apply(f, t));
        }
        projs.push(inc.transpose());
        incs.push(inc);
    }
    (Module::new_unchecked(alg.clone(), dims, mats, tops), incs, projs)
}

// ---------------------------------------------------------- presentations

fn scalar<F: Field>(f: &F, c: &BigRational) -> Result<F::E> {
    f.from_rational(c).ok_or_else(|| crate::error::Error::Input(format!("scalar {c} undefined over {}", f.config())))
}

/// (⊕ Λe_g) / ⟨relators⟩ with the generator images marked as tops.
pub fn realize_spec<F: Field>(alg: &AlgebraRef<F>, spec: &ModuleSpec) -> Result<Module<F>> {
    spec.validate(alg.quiver())?;
    let f = &alg.field;
    let gens: Vec<usize> = spec.generators.iter().map(|(_, v)| *v).collect();
    let (p, coords) = free_module(alg, &gens);
    let index: HashMap<(usize, usize), usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut rels = Vec::new();
    for rel in &spec.relators {
        let mut x = p.zero_vec();
        for (c, path, g) in rel {
            let c = scalar(f, c)?;
            for (b, y) in alg.nf_path(path) {
                let i = index[&(*g, b)];
                x[i] = f.add(&x[i], &f.mul(&c, &y));
            }
        }
        rels.push(x);
    }
    let u = p.generate(&rels);
    let (m, _) = quotient(&p, &u);
    let j = m.radical();
    for (t, (name, _)) in m.tops.iter().zip(&spec.generators) {
        if j.contains(f, t) {
            return refuse(format!("generator {name} falls into the radical of the presented module"));
        }
    }
    Ok(m)
}

// ------------------------------------------------------------------ graphs

/// The layered graph of a module relative to its tops (marked, else computed).
pub fn graph_of<F: Field>(m: &Module<F>) -> Result<LayeredGraph> {
    graph_with_nodes(m).map(|(g, _)| g)
}

/// The graph together with the module element of every node.
pub fn graph_with_nodes<F: Field>(m: &Module<F>) -> Result<(LayeredGraph, Vec<Vector<F>>)> {
    let f = m.field();
    let q = m.alg.quiver();
    let (tops, _) = m.generating_tops();
    if !m.tops.is_empty() && !m.tops_are_valid() {
        return input("marked tops are not a top basis");
    }
    let filt = m.radical_filtration();
    let layer_of = |x: &[F::E]| -> usize {
        let mut k = 0;
        while k + 1 < filt.len() && filt[k + 1].contains(f, x) {
            k += 1;
        }
        k
    };
    let mut g = LayeredGraph::new();
    let mut vecs: Vec<Vector<F>> = Vec::new();
    let mut span = Subspace::zero(m.dim());
    for t in &tops {
        let v = m.vertex_of_vec(t).expect("nonzero top");
        let id = g.add_node(format!("v{}", vecs.len()), 0, v);
        g.tops.push(id);
        span.add_vector(f, t);
        vecs.push(t.clone());
    }
    let mut k = 0;
    while k < vecs.len() {
        let u = vecs[k].clone();
        let uv = g.nodes[k].vertex;
        for a in q.arrows_from(uv) {
            let w = m.act(a, &u);
            if is_zero_vec(f, &w) {
                continue;
            }
            if let Some(z) = (0..vecs.len()).find(|&z| proportion(f, &vecs[z], &w).is_some()) {
                g.edges.push(GEdge { up: k, down: z, arrow: Some(a) });
                continue;
            }
            if !span.contains(f, &w) {
                let layer = layer_of(&w);
                let id = g.add_node(format!("v{}", vecs.len()), layer, q.arrows[a].target);
                span.add_vector(f, &w);
                vecs.push(w);
                g.edges.push(GEdge { up: k, down: id, arrow: Some(a) });
                continue;
            }
            // a combination of several nodes
            let basis = Mat::from_cols(f, m.dim(), &vecs);
            let c = basis.solve(f, &w).expect("in span");
            for (z, x) in c.iter().enumerate() {
                if !f.is_zero(x) {
                    g.edges.push(GEdge { up: k, down: z, arrow: Some(a) });
                }
            }
            g.canonical = false;
        }
        k += 1;
    }
    if vecs.len() != m.dim() {
        return input("tops do not generate the module");
    }
    Ok((g, vecs))
}

/// The graph of `m` is equivalent to `g`, or `m` is isomorphic to the realization of `g`.
pub fn has_graph<F: Field>(m: &Module<F>, g: &LayeredGraph) -> bool {
    if let Ok(h) = graph_of(m) {
        if crate::graph::graph_equivalent(&h, g) {
            return true;
        }
    }
    if m.dim() != g.nodes.len() {
        return false;
    }
    match realize_graph(&m.alg, g) {
        Ok(r) => crate::hom::is_isomorphic(m, &r),
        Err(_) => false,
    }
}

/// Generators-and-relators reading of a layered graph.
pub fn graph_spec<F: Field>(alg: &AlgebraRef<F>, g: &LayeredGraph) -> Result<ModuleSpec> {
    let q = alg.quiver();
    let g = validate_graph(g, q)?;
    if g.tops.is_empty() && !g.nodes.is_empty() {
        return input("graph has no top nodes");
    }
    let n = g.nodes.len();
    let mut rep: Vec<Option<(Path, usize)>> = vec![None; n];
    let mut queue = VecDeque::new();
    for (gi, &t) in g.tops.iter().enumerate() {
        rep[t] = Some((Path::trivial(g.nodes[t].vertex), gi));
        queue.push_back(t);
    }
    while let Some(x) = queue.pop_front() {
        let (p, gi) = rep[x].clone().unwrap();
        for e in g.out_edges(x) {
            if rep[e.down].is_none() {
                let a = e.arrow.unwrap();
                rep[e.down] = Some((Path::arrow(q, a).after(&p), gi));
                queue.push_back(e.down);
            }
        }
    }
    if let Some(i) = rep.iter().position(Option::is_none) {
        return input(format!("node {} is not below any top", g.nodes[i].id));
    }
    let one = BigRational::from_integer(1.into());
    let mut relators = Vec::new();
    for x in 0..n {
        let (p, gi) = rep[x].clone().unwrap();
        for a in q.arrows_from(g.nodes[x].vertex) {
            let ap = Path::arrow(q, a).after(&p);
            let targets: Vec<usize> = g.out_edges(x).filter(|e| e.arrow == Some(a)).map(|e| e.down).collect();
            match targets.as_slice() {
                [] => relators.push(vec![(one.clone(), ap, gi)]),
                [y] => {
                    let (py, gy) = rep[*y].clone().unwrap();
                    if !(py == ap && gy == gi) {
                        relators.push(vec![(one.clone(), ap, gi), (-one.clone(), py, gy)]);
                    }
                }
                _ => {
                    return refuse(format!(
                        "node {} has several edges labeled {}; supply a module spec instead",
                        g.nodes[x].id,
                        q.arrow_name(a)
                    ))
                }
            }
        }
    }
    let generators = g.tops.iter().map(|&t| (g.nodes[t].id.clone(), g.nodes[t].vertex)).collect();
    Ok(ModuleSpec { generators, relators })
}

/// Realizes a layered graph, refusing with the first layer where generation fails.
pub fn realize_graph<F: Field>(alg: &AlgebraRef<F>, g: &LayeredGraph) -> Result<Module<F>> {
    let spec = graph_spec(alg, g)?;
    let m = match realize_spec(alg, &spec) {
        Ok(m) => m,
        Err(crate::error::Error::Refusal(msg)) => return refuse(format!("graph is not realizable: {msg}")),
        Err(e) => return Err(e),
    };
    let want = g.layer_dims();
    let got = structure(&m).layer_dims();
    if want != got {
        let k = (0..want.len().max(got.len()))
            .find(|&k| want.get(k) != got.get(k))
            .unwrap_or(0);
        return refuse(format!(
            "graph is not realizable: radical layer {k} has dimension {} instead of {}",
            got.get(k).copied().unwrap_or(0),
            want.get(k).copied().unwrap_or(0)
        ));
    }
    let h = graph_of(&m)?;
    if !crate::graph::graph_equivalent(&h, g) {
        return refuse("graph is not realizable: the presented module has a different graph");
    }
    Ok(m)
}

// --------------------------------------------------------------- structure

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    /// Multiplicity of each simple in M/JM.
    pub top: Vec<usize>,
    /// Multiplicity of each simple in the socle.
    pub socle: Vec<usize>,
    /// Per radical layer, multiplicities of simples.
    pub layers: Vec<Vec<usize>>,
}

impl Structure {
    pub fn layer_dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.iter().sum()).collect()
    }

    pub fn socle_is_simple(&self) -> bool {
        self.socle.iter().sum::<usize>() == 1
    }
}

fn per_vertex<F: Field>(m: &Module<F>, s: &Subspace<F>) -> Vec<usize> {
    let f = m.field();
    (0..m.dims.len())
        .map(|v| {
            let vecs: Vec<Vector<F>> = s.basis().iter().map(|x| m.component(x, v)).collect();
            Subspace::from_vectors(f, m.dim(), &vecs).dim()
        })
        .collect()
}

pub fn socle<F: Field>(m: &Module<F>) -> Subspace<F> {
    let f = m.field();
    let mut rows = Vec::new();
    for (a, mat) in m.mats.iter().enumerate() {
        let arr = &m.alg.quiver().arrows[a];
        for i in 0..mat.rows {
            let mut r = m.zero_vec();
            for (j, x) in mat.row(i).iter().enumerate() {
                r[m.offsets[arr.source] + j] = x.clone();
            }
            rows.push(r);
        }
    }
    let ker = Mat::from_rows(f, m.dim(), &rows).kernel(f);
    Subspace::from_vectors(f, m.dim(), &ker)
}

pub fn structure<F: Field>(m: &Module<F>) -> Structure {
    let filt = m.radical_filtration();
    let mut layers = Vec::new();
    for k in 0..filt.len() - 1 {
        let a = per_vertex(m, &filt[k]);
        let b = per_vertex(m, &filt[k + 1]);
        layers.push(a.iter().zip(&b).map(|(x, y)| x - y).collect());
    }
    let top = layers.first().cloned().unwrap_or_else(|| vec![0; m.dims.len()]);
    let soc = socle(m);
    Structure { top, socle: per_vertex(m, &soc), layers }
}
