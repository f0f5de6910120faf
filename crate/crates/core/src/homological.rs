//! Projective covers, syzygies and projective dimension.

use std::collections::HashMap;

use crate::algebra::AlgebraRef;
use crate::error::{refuse, Result};
use crate::field::Field;
use crate::hom::{decompose, is_isomorphic};
use crate::linalg::{unit, Mat, Subspace};
use crate::module::{free_module, regular_module, sub, Module, ModuleMap};
use crate::presentation::Path;

#[derive(Clone, Debug)]
pub enum PdimResult<F: Field> {
    /// Ω^d projective, Ω^{d-1} not; `chain_dims[k] = dim Ω^k`.
    Finite { d: usize, chain_dims: Vec<usize> },
    /// A cycle Λp₀ → Λp₁ → … → Λp₀ of path modules, each a summand of the syzygy of the previous.
    Infinite { cycle: Vec<Path> },
    /// Ω^{bound-1} is still not projective, so pdim ≥ bound.
    AtLeast { bound: usize, last: Box<Module<F>> },
}

impl<F: Field> PdimResult<F> {
    pub fn finite(&self) -> Option<usize> {
        match self {
            PdimResult::Finite { d, .. } => Some(*d),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PdimResult::Infinite { .. })
    }

    pub fn status(&self) -> &'static str {
        match self {
            PdimResult::Finite { .. } => "finite",
            PdimResult::Infinite { .. } => "infinite",
            PdimResult::AtLeast { .. } => "at_least",
        }
    }
}

pub fn default_bound<F: Field>(alg: &AlgebraRef<F>) -> usize {
    2 * alg.loewy_length * alg.quiver().n
}

/// P = ⊕ Λe over the tops of M, with the epimorphism onto M.
pub fn projective_cover<F: Field>(m: &Module<F>) -> (Module<F>, ModuleMap<F>) {
    let f = m.field();
    let (tops, _) = m.generating_tops();
    let verts: Vec<usize> = tops.iter().map(|t| m.vertex_of_vec(t).expect("nonzero top")).collect();
    let (p, coords) = free_module(&m.alg, &verts);
    let cols: Vec<_> = coords.iter().map(|&(g, b)| m.act_basis(b, &tops[g])).collect();
    let mat = Mat::from_cols(f, m.dim(), &cols);
    let epi = ModuleMap { source: p.clone(), target: m.clone(), mat };
    (p, epi)
}

pub fn projective_cover_dim<F: Field>(m: &Module<F>) -> usize {
    let top = m.top_dims();
    (0..top.len()).map(|v| top[v] * m.alg.basis_from(v).len()).sum()
}

pub fn is_projective<F: Field>(m: &Module<F>) -> bool {
    projective_cover_dim(m) == m.dim()
}

/// Ω¹(M) with its inclusion into the projective cover.
pub fn syzygy_with_inclusion<F: Field>(m: &Module<F>) -> (Module<F>, Mat<F>) {
    let f = m.field();
    let (p, epi) = projective_cover(m);
    let ker = Subspace::from_vectors(f, p.dim(), &epi.mat.kernel(f));
    debug_assert_eq!(ker.dim(), p.dim() - m.dim());
    sub(&p, &ker)
}

pub fn syzygy<F: Field>(m: &Module<F>, k: usize) -> Module<F> {
    let mut x = m.clone();
    for _ in 0..k {
        if x.dim() == 0 {
            break;
        }
        x = syzygy_with_inclusion(&x).0;
    }
    x
}

/// dim Ω^k for k = 0..=d, stopping early at zero.
fn chain_dims<F: Field>(m: &Module<F>, d: usize) -> Vec<usize> {
    let mut out = vec![m.dim()];
    let mut x = m.clone();
    for _ in 0..d {
        x = syzygy_with_inclusion(&x).0;
        out.push(x.dim());
    }
    out
}

/// Syzygy iteration: Finite(d) if Ω^d is projective for some d < bound.
pub fn pdim_iterate<F: Field>(m: &Module<F>, bound: usize) -> PdimResult<F> {
    let mut x = m.clone();
    let mut dims = vec![x.dim()];
    for d in 0..bound {
        if is_projective(&x) {
            return PdimResult::Finite { d, chain_dims: dims };
        }
        x = syzygy_with_inclusion(&x).0;
        dims.push(x.dim());
    }
    if is_projective(&x) {
        return PdimResult::Finite { d: bound, chain_dims: dims };
    }
    PdimResult::AtLeast { bound: bound + 1, last: Box::new(x) }
}

// ------------------------------------------------------------ path modules

/// The left ideal Λp inside Λe_{s(p)}, with p marked as top.
pub fn path_module<F: Field>(alg: &AlgebraRef<F>, b: usize) -> Module<F> {
    let f = &alg.field;
    let p = &alg.basis[b];
    let e = regular_module(alg, p.source);
    let (_, coords) = free_module(alg, &[p.source]);
    let i = coords.iter().position(|&(_, c)| c == b).expect("basis path from source");
    let x = unit(f, e.dim(), i);
    let u = e.generate(&[x.clone()]);
    let (m, incl) = sub(&e, &u);
    let top = u.coords(f, &x).expect("generator lies in its span");
    debug_assert_eq!(incl.apply(f, &top), x);
    m.with_tops(vec![top])
}

/// Minimal nonzero paths q starting at t(p) with qp = 0 (basis indices).
pub fn path_syzygy_generators<F: Field>(alg: &AlgebraRef<F>, b: usize) -> Vec<usize> {
    let q = alg.quiver();
    let p = &alg.basis[b];
    let mut out = Vec::new();
    for w in &alg.basis {
        let Some(rest) = w.strip_right(q, p) else { continue };
        for a in q.arrows_from(q.target(w)) {
            let aw = Path::arrow(q, a).after(w);
            if !alg.nf_path(&aw).is_empty() {
                continue;
            }
            let cand = Path::arrow(q, a).after(&rest);
            if let Some(c) = alg.basis_index(&cand) {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub enum PathPdim {
    Finite { d: usize, chain_dims: Vec<usize> },
    Infinite { cycle: Vec<usize> },
}

impl PathPdim {
    pub fn finite(&self) -> Option<usize> {
        match self {
            PathPdim::Finite { d, .. } => Some(*d),
            PathPdim::Infinite { .. } => None,
        }
    }
}

/// pdim of every path module Λp of a monomial algebra, decided on the finite
/// graph p → {q : Λq a summand of Ω¹(Λp)}.
pub fn pdim_path_table<F: Field>(alg: &AlgebraRef<F>) -> Result<Vec<PathPdim>> {
    if !alg.is_monomial() {
        return refuse("path table needs monomial relations");
    }
    let n = alg.dim();
    let children: Vec<Vec<usize>> = (0..n).map(|b| path_syzygy_generators(alg, b)).collect();
    let size: Vec<usize> = (0..n)
        .map(|b| {
            let p = &alg.basis[b];
            alg.basis.iter().filter(|w| p.is_right_subpath_of(w)).count()
        })
        .collect();
    let mut state: Vec<Option<PathPdim>> = vec![None; n];
    let mut on_stack = vec![false; n];
    for b in 0..n {
        let mut stack = Vec::new();
        visit(b, &children, &size, &mut state, &mut on_stack, &mut stack);
    }
    Ok(state.into_iter().map(|s| s.expect("visited")).collect())
}

fn visit(
    b: usize,
    children: &[Vec<usize>],
    size: &[usize],
    state: &mut [Option<PathPdim>],
    on_stack: &mut [bool],
    stack: &mut Vec<usize>,
) -> PathPdim {
    if let Some(s) = &state[b] {
        return s.clone();
    }
    if on_stack[b] {
        let start = stack.iter().position(|&x| x == b).unwrap();
        let mut cycle = stack[start..].to_vec();
        cycle.push(b);
        return PathPdim::Infinite { cycle };
    }
    on_stack[b] = true;
    stack.push(b);
    let mut result: Option<PathPdim> = None;
    let mut best = 0;
    let mut sub_chains: Vec<Vec<usize>> = Vec::new();
    for &c in &children[b] {
        match visit(c, children, size, state, on_stack, stack) {
            PathPdim::Infinite { cycle } => {
                result = Some(PathPdim::Infinite { cycle });
                break;
            }
            PathPdim::Finite { d, chain_dims } => {
                best = best.max(d + 1);
                sub_chains.push(chain_dims);
            }
        }
    }
    stack.pop();
    on_stack[b] = false;
    let result = result.unwrap_or_else(|| {
        let mut chain = vec![0; best + 1];
        chain[0] = size[b];
        for c in &sub_chains {
            for (k, x) in c.iter().enumerate() {
                chain[k + 1] += x;
            }
        }
        PathPdim::Finite { d: best, chain_dims: chain }
    });
    state[b] = Some(result.clone());
    result
}

/// The basis path p with Λp ≅ x, for a cyclic module x over a monomial algebra.
fn identify_path_module<F: Field>(x: &Module<F>, cache: &mut HashMap<usize, Module<F>>) -> Option<usize> {
    let alg = &x.alg;
    let top = x.top_dims();
    let v = (0..top.len()).find(|&v| top[v] == 1)?;
    if top.iter().sum::<usize>() != 1 {
        return None;
    }
    let q = alg.quiver();
    for b in 0..alg.dim() {
        if q.target(&alg.basis[b]) != v {
            continue;
        }
        let pm = cache.entry(b).or_insert_with(|| path_module(alg, b));
        if pm.dims == x.dims && is_isomorphic(pm, x) {
            return Some(b);
        }
    }
    None
}

/// Projective dimension: exact for monomial algebras, bounded iteration otherwise.
pub fn pdim<F: Field>(m: &Module<F>, bound: usize) -> PdimResult<F> {
    if m.dim() == 0 || is_projective(m) {
        return PdimResult::Finite { d: 0, chain_dims: vec![m.dim()] };
    }
    if !m.alg.is_monomial() {
        return pdim_iterate(m, bound);
    }
    let table = pdim_path_table(&m.alg).expect("monomial");
    let o1 = syzygy_with_inclusion(m).0;
    if is_projective(&o1) {
        return PdimResult::Finite { d: 1, chain_dims: vec![m.dim(), o1.dim()] };
    }
    let o2 = syzygy_with_inclusion(&o1).0;
    let mut cache = HashMap::new();
    let mut best = 0;
    for s in decompose(&o2).summands {
        let Some(b) = identify_path_module(&s.module, &mut cache) else {
            return pdim_iterate(m, bound);
        };
        match &table[b] {
            PathPdim::Infinite { cycle } => {
                let cycle = cycle.iter().map(|&c| m.alg.basis[c].clone()).collect();
                return PdimResult::Infinite { cycle };
            }
            PathPdim::Finite { d, .. } => best = best.max(*d),
        }
    }
    let d = best + 2;
    PdimResult::Finite { d, chain_dims: chain_dims(m, d) }
}

#[derive(Clone, Debug)]
pub struct FindimReport {
    pub value: usize,
    pub witness: usize,
    pub pdims: Vec<usize>,
    pub label: &'static str,
}

/// sup of the projective dimensions of the given approximations.
pub fn findim_report<F: Field>(approximations: &[Module<F>], bound: usize) -> Result<FindimReport> {
    let mut pdims = Vec::new();
    for (i, a) in approximations.iter().enumerate() {
        match pdim(a, bound) {
            PdimResult::Finite { d, .. } => pdims.push(d),
            other => return refuse(format!("module {} has pdim status {}", i + 1, other.status())),
        }
    }
    let (witness, value) = pdims.iter().copied().enumerate().max_by_key(|&(i, d)| (d, usize::MAX - i)).unwrap_or((0, 0));
    Ok(FindimReport {
        value,
        witness,
        pdims,
        label: "equals l fin dim only under contravariant finiteness of a resolving subcategory",
    })
}
