//! Brute-force enumerations used as independent references.
#![allow(dead_code)]

use saguaro_core::field::{Field, Fp};
use saguaro_core::hom::{decompose, is_isomorphic};
use saguaro_core::homological::{default_bound, pdim};
use saguaro_core::linalg::{Subspace, Vector};
use saguaro_core::module::{free_module, quotient, Module};
use saguaro_core::saguaro::{build_saguaro, is_redundant, Link, Saguaro};
use saguaro_core::uniserial::enumerate_uniserials;
use saguaro_core::AlgebraRef;

pub fn contains_iso<F: Field>(list: &[Saguaro<F>], m: &Module<F>) -> bool {
    list.iter().any(|s| s.module.dims == m.dims && is_isomorphic(&s.module, m))
}

/// All subspaces of span(vecs) over 𝔽₂, listed by reduced basis.
pub fn f2_subspaces(f: &Fp, n: usize, vecs: &[Vector<Fp>]) -> Vec<Subspace<Fp>> {
    let mut out: Vec<Subspace<Fp>> = vec![Subspace::zero(n)];
    let amb = Subspace::from_vectors(f, n, vecs);
    let d = amb.dim();
    let all: Vec<Vector<Fp>> = (1u64..(1 << d))
        .map(|mask| {
            let c: Vec<_> = (0..d).map(|i| f.from_i64((mask >> i & 1) as i64)).collect();
            amb.combine(f, &c)
        })
        .collect();
    let mut frontier = out.clone();
    while let Some(u) = frontier.pop() {
        for v in &all {
            if u.contains(f, v) {
                continue;
            }
            let mut w = u.clone();
            w.add_vector(f, v);
            if !out.iter().any(|x| x.same_as(&w)) {
                out.push(w.clone());
                frontier.push(w);
            }
        }
    }
    out
}

/// Indecomposable modules of finite pdim and dimension ≤ 6 over the brush algebra over 𝔽₂.
pub fn brush_pinf_indecomposables(a: &AlgebraRef<Fp>) -> Vec<Module<Fp>> {
    let f = &a.field;
    let n = a.quiver().n;
    let bound = default_bound(a);
    let fin: Vec<bool> = (0..n).map(|v| pdim(&Module::simple(a, v), bound).finite().is_some()).collect();
    let mut out: Vec<Module<Fp>> = Vec::new();
    let mut all_tops: Vec<Vec<usize>> = vec![vec![0; n]];
    for v in 0..n {
        let mut grown = Vec::new();
        for t in &all_tops {
            let used: usize = t.iter().sum();
            for k in 1..=6 - used {
                let mut u = t.clone();
                u[v] = k;
                grown.push(u);
            }
        }
        all_tops.extend(grown);
    }
    all_tops.retain(|t| t.iter().sum::<usize>() > 0);
    for t in all_tops {
        let gens: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, t[v])).collect();
        let (p, _) = free_module(a, &gens);
        let rad = p.radical();
        let fin_part: Vec<Vector<Fp>> = rad
            .basis()
            .iter()
            .flat_map(|x| (0..n).filter(|&v| fin[v]).map(|v| p.component(x, v)).collect::<Vec<_>>())
            .collect();
        let fin_sp = Subspace::from_vectors(f, p.dim(), &fin_part);
        if p.dim() - fin_sp.dim() > 6 {
            continue;
        }
        for u in f2_subspaces(f, p.dim(), fin_sp.basis()) {
            if p.dim() - u.dim() > 6 {
                continue;
            }
            let (m, _) = quotient(&p, &u);
            for x in decompose(&m).modules() {
                if pdim(&x, bound).finite().is_some() && !out.iter().any(|y| is_isomorphic(y, &x)) {
                    out.push(x);
                }
            }
        }
    }
    out
}

pub fn brute_force_saguaros<F: Field>(a: &AlgebraRef<F>, max: usize) -> Vec<Saguaro<F>> {
    let unis = enumerate_uniserials(a).unwrap();
    let mut out: Vec<Saguaro<F>> = Vec::new();
    let mut frontier: Vec<Saguaro<F>> = Vec::new();
    for u in &unis {
        frontier.push(build_saguaro(vec![u.clone()], vec![]).unwrap());
    }
    for _ in 1..=max {
        let mut next = Vec::new();
        for s in &frontier {
            if !is_redundant(s).unwrap().redundant && !contains_iso(&out, &s.module) {
                out.push(s.clone());
            }
            if s.len() == max {
                continue;
            }
            let last = s.trunks.last().unwrap();
            for u in &unis {
                if u.mast.path.len() == 0 || last.mast.path.len() == 0 {
                    continue;
                }
                for i in 1..=last.mast.path.len() {
                    for j in 1..=u.mast.path.len() {
                        let l = Link { q: last.mast.path.right(i), q_next: u.mast.path.right(j) };
                        let mut trunks = s.trunks.clone();
                        trunks.push(u.clone());
                        let mut links = s.links.clone();
                        links.push(l);
                        if let Ok(t) = build_saguaro(trunks, links) {
                            next.push(t);
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    out
}
