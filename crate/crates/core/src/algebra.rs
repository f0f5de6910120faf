//! The algebra Λ = KΓ/I as a normal-form path basis.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{input, refuse, Result};
use crate::field::Field;
use crate::linalg::{rref, Subspace, Vector};
use crate::presentation::{Path, Presentation, Quiver};

const MAX_PATHS: usize = 400_000;

pub type Sparse<F> = Vec<(usize, <F as Field>::E)>;

#[derive(Debug)]
pub struct Algebra<F: Field> {
    pub field: F,
    pub pres: Presentation,
    /// Normal-form basis paths.
    pub basis: Vec<Path>,
    index: HashMap<Path, usize>,
    /// Rewrite of every non-basis path of length below the bound.
    rewrite: HashMap<Path, Sparse<F>>,
    pub loewy_length: usize,
}

pub type AlgebraRef<F> = Arc<Algebra<F>>;

/// Length first, then lexicographic on the written arrow-name sequence.
pub fn path_order(q: &Quiver, a: &Path, b: &Path) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        if a.is_trivial() && b.is_trivial() {
            return a.source.cmp(&b.source);
        }
        let na = a.arrows.iter().rev().map(|&x| q.arrow_name(x));
        let nb = b.arrows.iter().rev().map(|&x| q.arrow_name(x));
        na.cmp(nb)
    })
}

fn all_paths(q: &Quiver, bound: usize) -> Result<Vec<Path>> {
    let mut out: Vec<Path> = (0..q.n).map(Path::trivial).collect();
    let mut frontier = out.clone();
    for _ in 1..bound {
        let mut next = Vec::new();
        for p in &frontier {
            for a in q.arrows_from(q.target(p)) {
                let mut arrows = p.arrows.clone();
                arrows.push(a);
                next.push(Path { source: p.source, arrows });
            }
        }
        out.extend(next.iter().cloned());
        if out.len() > MAX_PATHS {
            return refuse(format!("more than {MAX_PATHS} paths below the loewy bound"));
        }
        frontier = next;
    }
    Ok(out)
}

impl<F: Field> Algebra<F> {
    pub fn build(pres: &Presentation, field: F) -> Result<AlgebraRef<F>> {
        let q = &pres.quiver;
        let bound = pres.loewy_bound;
        let paths = all_paths(q, bound)?;
        let mut relations = Vec::new();
        for r in &pres.relations {
            let mut terms: Vec<(F::E, Path)> = Vec::new();
            for (c, p) in &r.terms {
                let Some(x) = field.from_rational(c) else {
                    return input(format!("coefficient {c} is undefined over {}", field.config()));
                };
                if !field.is_zero(&x) {
                    terms.push((x, p.clone()));
                }
            }
            if terms.is_empty() {
                let names: Vec<String> = r.terms.iter().map(|(_, p)| q.path_name(p)).collect();
                return input(format!(
                    "relation {} degenerates over {}",
                    names.join(" + "),
                    field.config()
                ));
            }
            relations.push(terms);
        }

        let mut by_target: HashMap<usize, Vec<&Path>> = HashMap::new();
        let mut by_source: HashMap<usize, Vec<&Path>> = HashMap::new();
        for p in &paths {
            by_target.entry(q.target(p)).or_default().push(p);
            by_source.entry(p.source).or_default().push(p);
        }

        // block (source, target) -> generated rows as sparse maps over paths
        let mut rows: HashMap<(usize, usize), Vec<Vec<(Path, F::E)>>> = HashMap::new();
        for terms in &relations {
            let s = terms[0].1.source;
            let t = q.target(&terms[0].1);
            let min_len = terms.iter().map(|(_, p)| p.len()).min().unwrap();
            for v in by_target.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
                if v.len() + min_len >= bound {
                    continue;
                }
                for u in by_source.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
                    if v.len() + min_len + u.len() >= bound {
                        continue;
                    }
                    let mut row = Vec::new();
                    for (c, p) in terms {
                        if v.len() + p.len() + u.len() >= bound {
                            continue;
                        }
                        let mut arrows = v.arrows.clone();
                        arrows.extend(p.arrows.iter().copied());
                        arrows.extend(u.arrows.iter().copied());
                        row.push((Path { source: v.source, arrows }, c.clone()));
                    }
                    rows.entry((v.source, q.target(u))).or_default().push(row);
                }
            }
        }

        let mut blocks: HashMap<(usize, usize), Vec<Path>> = HashMap::new();
        for p in &paths {
            blocks.entry((p.source, q.target(p))).or_default().push(p.clone());
        }
        let mut basis = Vec::new();
        let mut leading: Vec<(Path, Vec<(Path, F::E)>)> = Vec::new();
        let mut keys: Vec<_> = blocks.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let mut cols = blocks.remove(&key).unwrap();
            cols.sort_by(|a, b| path_order(q, b, a));
            let Some(block_rows) = rows.get(&key) else {
                basis.extend(cols);
                continue;
            };
            let col_index: HashMap<&Path, usize> = cols.iter().enumerate().map(|(i, p)| (p, i)).collect();
            let mut dense: Vec<Vector<F>> = block_rows
                .iter()
                .map(|r| {
                    let mut v = vec![field.zero(); cols.len()];
                    for (p, c) in r {
                        let j = col_index[p];
                        v[j] = field.add(&v[j], c);
                    }
                    v
                })
                .collect();
            let pivots = rref(&field, &mut dense);
            let mut is_pivot = vec![false; cols.len()];
            for &p in &pivots {
                is_pivot[p] = true;
            }
            for (row, &pc) in dense.iter().zip(&pivots) {
                let rest: Vec<(Path, F::E)> = row
                    .iter()
                    .enumerate()
                    .filter(|(j, x)| *j != pc && !field.is_zero(x))
                    .map(|(j, x)| (cols[j].clone(), field.neg(x)))
                    .collect();
                leading.push((cols[pc].clone(), rest));
            }
            basis.extend(cols.into_iter().enumerate().filter(|(j, _)| !is_pivot[*j]).map(|(_, p)| p));
        }
        basis.sort_by(|a, b| a.source.cmp(&b.source).then_with(|| path_order(q, a, b)));
        let index: HashMap<Path, usize> = basis.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let rewrite = leading
            .into_iter()
            .map(|(p, rest)| (p, rest.into_iter().map(|(b, c)| (index[&b], c)).collect()))
            .collect();
        let mut alg = Algebra { field, pres: pres.clone(), basis, index, rewrite, loewy_length: 0 };
        alg.loewy_length = alg.compute_loewy_length();
        Ok(Arc::new(alg))
    }

    pub fn quiver(&self) -> &Quiver {
        &self.pres.quiver
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_index(&self, p: &Path) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn is_monomial(&self) -> bool {
        self.pres.is_monomial()
    }

    /// Normal form of a single path as a sparse combination of basis paths.
    pub fn nf_path(&self, p: &Path) -> Sparse<F> {
        if p.len() >= self.pres.loewy_bound {
            return Vec::new();
        }
        if let Some(&i) = self.index.get(p) {
            return vec![(i, self.field.one())];
        }
        self.rewrite.get(p).cloned().unwrap_or_default()
    }

    pub fn normal_form(&self, terms: &[(F::E, Path)]) -> Result<Sparse<F>> {
        let f = &self.field;
        let mut acc: HashMap<usize, F::E> = HashMap::new();
        for (c, p) in terms {
            self.quiver().check_path(p)?;
            for (i, x) in self.nf_path(p) {
                let e = acc.entry(i).or_insert_with(|| f.zero());
                *e = f.add(e, &f.mul(c, &x));
            }
        }
        let mut out: Sparse<F> = acc.into_iter().filter(|(_, x)| !f.is_zero(x)).collect();
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    /// Product of basis elements `b_i * b_j` (`b_i` after `b_j`).
    pub fn mul_basis(&self, i: usize, j: usize) -> Sparse<F> {
        let (a, b) = (&self.basis[i], &self.basis[j]);
        if self.quiver().target(b) != a.source {
            return Vec::new();
        }
        self.nf_path(&a.after(b))
    }

    pub fn mul(&self, x: &Sparse<F>, y: &Sparse<F>) -> Sparse<F> {
        let f = &self.field;
        let mut acc: HashMap<usize, F::E> = HashMap::new();
        for (i, a) in x {
            for (j, b) in y {
                let ab = f.mul(a, b);
                for (k, c) in self.mul_basis(*i, *j) {
                    let e = acc.entry(k).or_insert_with(|| f.zero());
                    *e = f.add(e, &f.mul(&ab, &c));
                }
            }
        }
        let mut out: Sparse<F> = acc.into_iter().filter(|(_, x)| !f.is_zero(x)).collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }

    /// Basis indices of paths starting at `e`.
    pub fn basis_from(&self, e: usize) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| self.basis[i].source == e).collect()
    }

    /// J^k as a subspace of Λ: span of normal forms of paths of length ≥ k.
    pub fn radical_power(&self, k: usize) -> Subspace<F> {
        let f = &self.field;
        let n = self.dim();
        let mut vecs = Vec::new();
        for (i, p) in self.basis.iter().enumerate() {
            if p.len() >= k {
                let mut v = vec![f.zero(); n];
                v[i] = f.one();
                vecs.push(v);
            }
        }
        for (p, rw) in &self.rewrite {
            if p.len() >= k {
                let mut v = vec![f.zero(); n];
                for (i, c) in rw {
                    v[*i] = c.clone();
                }
                vecs.push(v);
            }
        }
        Subspace::from_vectors(f, n, &vecs)
    }

    fn compute_loewy_length(&self) -> usize {
        let mut k = 1;
        while !self.radical_power(k).is_zero() {
            k += 1;
        }
        k
    }

    pub fn path_name(&self, p: &Path) -> String {
        self.quiver().path_name(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::presentation::parse_presentation;

    #[test]
    fn semisimple() {
        let p = parse_presentation("quiver { vertices 1..3; } relations { loewy 2 }").unwrap();
        let a = Algebra::build(&p, Rationals).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.loewy_length, 1);
    }

    #[test]
    fn commutative_square() {
        // two paths 1->4 identified: dim = 4 + 4 arrows + 1 = 9
        let p = parse_presentation(
            "quiver { vertices 1..4; arrow a : 1 -> 2; arrow b : 2 -> 4; arrow c : 1 -> 3; arrow d : 3 -> 4; }
             relations { b*a - d*c; loewy 3 }",
        )
        .unwrap();
        let a = Algebra::build(&p, Rationals).unwrap();
        assert_eq!(a.dim(), 9);
        assert_eq!(a.loewy_length, 3);
        let ba = a.quiver().parse_path("b*a").unwrap();
        let dc = a.quiver().parse_path("d*c").unwrap();
        assert_eq!(a.nf_path(&ba), a.nf_path(&dc));
    }

    #[test]
    fn degenerate_relation_rejected() {
        let p = parse_presentation(
            "quiver { vertices 1..2; arrow a : 1 -> 2; arrow b : 2 -> 1; } relations { 2*b*a; loewy 4 }",
        )
        .unwrap();
        let f = crate::field::Fp::new(2).unwrap();
        assert!(Algebra::build(&p, f).is_err());
    }
}
