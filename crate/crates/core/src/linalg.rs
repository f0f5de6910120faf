//! Dense exact linear algebra: echelon forms, kernels, subspaces.

use crate::field::Field;

pub type Vector<F> = Vec<<F as Field>::E>;

#[derive(Clone, Debug)]
pub struct Mat<F: Field> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F::E>,
}

impl<F: Field> PartialEq for Mat<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl<F: Field> Eq for Mat<F> {}

impl<F: Field> Mat<F> {
    pub fn zeros(f: &F, rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn from_rows(f: &F, cols: usize, rows: &[Vector<F>]) -> Self {
        let mut m = Self::zeros(f, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_cols(f: &F, rows: usize, cols: &[Vector<F>]) -> Self {
        let mut m = Self::zeros(f, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: F::E) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[F::E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vector<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let v = f.add(out.get(i, j), &f.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &F, v: &[F::E]) -> Vector<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in apply");
        let mut out = vec![f.zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !f.is_zero(a) {
                    *o = f.add(o, &f.mul(a, x));
                }
            }
        }
        out
    }

    pub fn add(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, f: &F, c: &F::E) -> Self {
        let data = self.data.iter().map(|a| f.mul(a, c)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn rank(&self, f: &F) -> usize {
        let mut rows = self.row_vecs();
        rref(f, &mut rows).len()
    }

    /// Basis of the right kernel {x : A x = 0}.
    pub fn kernel(&self, f: &F) -> Vec<Vector<F>> {
        let mut rows = self.row_vecs();
        let pivots = rref(f, &mut rows);
        kernel_from_rref(f, &rows, &pivots, self.cols)
    }

    /// Basis of the column space.
    pub fn image(&self, f: &F) -> Subspace<F> {
        let cols: Vec<_> = (0..self.cols).map(|j| self.col(j)).collect();
        Subspace::from_vectors(f, self.rows, &cols)
    }

    pub fn is_invertible(&self, f: &F) -> bool {
        self.rows == self.cols && self.rank(f) == self.rows
    }

    pub fn inverse(&self, f: &F) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut rows: Vec<Vector<F>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
                r
            })
            .collect();
        let pivots = rref(f, &mut rows);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let out: Vec<Vector<F>> = rows.iter().map(|r| r[n..].to_vec()).collect();
        Some(Mat::from_rows(f, n, &out))
    }

    /// Some x with A x = b.
    pub fn solve(&self, f: &F, b: &[F::E]) -> Option<Vector<F>> {
        assert_eq!(b.len(), self.rows);
        let mut rows: Vec<Vector<F>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let pivots = rref(f, &mut rows);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &p) in rows.iter().zip(&pivots) {
            x[p] = r[self.cols].clone();
        }
        Some(x)
    }
}

/// Reduced row echelon form in place; zero rows are removed. Returns pivot columns.
pub fn rref<F: Field>(f: &F, rows: &mut Vec<Vector<F>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(&rows[r][c]);
        if !f.is_one(&inv) {
            for x in rows[r][c..].iter_mut() {
                if !f.is_zero(x) {
                    *x = f.mul(x, &inv);
                }
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for j in c..ncols {
                if !f.is_zero(&pivot_row[j]) {
                    row[j] = f.sub(&row[j], &f.mul(&factor, &pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

fn kernel_from_rref<F: Field>(
    f: &F,
    rows: &[Vector<F>],
    pivots: &[usize],
    ncols: usize,
) -> Vec<Vector<F>> {
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&j| !is_pivot[j]) {
        let mut x = vec![f.zero(); ncols];
        x[free] = f.one();
        for (r, &p) in rows.iter().zip(pivots) {
            if !f.is_zero(&r[free]) {
                x[p] = f.neg(&r[free]);
            }
        }
        out.push(x);
    }
    out
}

/// Kernel of a sparse system given as rows of (column, coefficient).
pub fn sparse_kernel<F: Field>(f: &F, ncols: usize, rows: &[Vec<(usize, F::E)>]) -> Vec<Vector<F>> {
    let mut dense: Vec<Vector<F>> = rows
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let mut v = vec![f.zero(); ncols];
            for (j, x) in r {
                v[*j] = f.add(&v[*j], x);
            }
            v
        })
        .collect();
    if dense.is_empty() {
        return (0..ncols).map(|j| unit(f, ncols, j)).collect();
    }
    let pivots = rref(f, &mut dense);
    kernel_from_rref(f, &dense, &pivots, ncols)
}

pub fn unit<F: Field>(f: &F, n: usize, i: usize) -> Vector<F> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

pub fn is_zero_vec<F: Field>(f: &F, v: &[F::E]) -> bool {
    v.iter().all(|x| f.is_zero(x))
}

pub fn vec_add<F: Field>(f: &F, a: &[F::E], b: &[F::E]) -> Vector<F> {
    a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
}

pub fn vec_sub<F: Field>(f: &F, a: &[F::E], b: &[F::E]) -> Vector<F> {
    a.iter().zip(b).map(|(x, y)| f.sub(x, y)).collect()
}

pub fn vec_scale<F: Field>(f: &F, c: &F::E, a: &[F::E]) -> Vector<F> {
    a.iter().map(|x| f.mul(c, x)).collect()
}

/// `a += c * b`
pub fn axpy<F: Field>(f: &F, a: &mut [F::E], c: &F::E, b: &[F::E]) {
    if f.is_zero(c) {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !f.is_zero(y) {
            *x = f.add(x, &f.mul(c, y));
        }
    }
}

/// If `b` is a scalar multiple of `a` (with `a` nonzero), return the scalar.
pub fn proportion<F: Field>(f: &F, a: &[F::E], b: &[F::E]) -> Option<F::E> {
    let i = a.iter().position(|x| !f.is_zero(x))?;
    let c = f.div(&b[i], &a[i]);
    let ok = a.iter().zip(b).all(|(x, y)| f.mul(&c, x) == *y);
    ok.then_some(c)
}

/// A subspace of K^n stored by a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    pub n: usize,
    rows: Vec<Vector<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(n: usize) -> Self {
        Subspace { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(f: &F, n: usize) -> Self {
        Subspace { n, rows: (0..n).map(|i| unit(f, n, i)).collect(), pivots: (0..n).collect() }
    }

    pub fn from_vectors(f: &F, n: usize, vecs: &[Vector<F>]) -> Self {
        let mut rows: Vec<Vector<F>> = vecs.to_vec();
        for r in &rows {
            assert_eq!(r.len(), n, "vector length mismatch");
        }
        let pivots = rref(f, &mut rows);
        Subspace { n, rows, pivots }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn basis(&self) -> &[Vector<F>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after clearing pivot coordinates.
    pub fn reduce(&self, f: &F, v: &[F::E]) -> Vector<F> {
        let mut out = v.to_vec();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if !f.is_zero(&out[p]) {
                let c = f.neg(&out[p]);
                axpy(f, &mut out, &c, r);
            }
        }
        out
    }

    pub fn contains(&self, f: &F, v: &[F::E]) -> bool {
        is_zero_vec(f, &self.reduce(f, v))
    }

    /// Coordinates with respect to the echelon basis.
    pub fn coords(&self, f: &F, v: &[F::E]) -> Option<Vector<F>> {
        if !self.contains(f, v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn combine(&self, f: &F, coeffs: &[F::E]) -> Vector<F> {
        let mut out = vec![f.zero(); self.n];
        for (c, r) in coeffs.iter().zip(&self.rows) {
            axpy(f, &mut out, c, r);
        }
        out
    }

    pub fn add_vector(&mut self, f: &F, v: &[F::E]) -> bool {
        let r = self.reduce(f, v);
        if is_zero_vec(f, &r) {
            return false;
        }
        let mut rows = std::mem::take(&mut self.rows);
        rows.push(r);
        self.pivots = rref(f, &mut rows);
        self.rows = rows;
        true
    }

    pub fn sum(&self, f: &F, other: &Self) -> Self {
        let mut vecs = self.rows.clone();
        vecs.extend(other.rows.iter().cloned());
        Subspace::from_vectors(f, self.n, &vecs)
    }

    pub fn intersect(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.n);
        }
        // Zassenhaus: rows (u | u) and (w | 0).
        let n = self.n;
        let mut rows: Vec<Vector<F>> = Vec::new();
        for u in &self.rows {
            let mut r = u.clone();
            r.extend(u.iter().cloned());
            rows.push(r);
        }
        for w in &other.rows {
            let mut r = w.clone();
            r.extend(std::iter::repeat(f.zero()).take(n));
            rows.push(r);
        }
        let pivots = rref(f, &mut rows);
        let vecs: Vec<Vector<F>> = rows
            .iter()
            .zip(&pivots)
            .filter(|(_, &p)| p >= n)
            .map(|(r, _)| r[n..].to_vec())
            .collect();
        Subspace::from_vectors(f, n, &vecs)
    }

    pub fn is_subspace_of(&self, f: &F, other: &Self) -> bool {
        self.rows.iter().all(|r| other.contains(f, r))
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.rows == other.rows
    }

    /// Indices of unit vectors spanning a complement.
    pub fn complement_units(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.n).filter(|&j| !is_pivot[j]).collect()
    }

    pub fn image(&self, f: &F, m: &Mat<F>) -> Self {
        let vecs: Vec<_> = self.rows.iter().map(|r| m.apply(f, r)).collect();
        Subspace::from_vectors(f, m.rows, &vecs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};

    fn q(rows: &[&[i64]]) -> Mat<Rationals> {
        let f = Rationals;
        let cols = rows[0].len();
        let vecs: Vec<_> = rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect();
        Mat::from_rows(&f, cols, &vecs)
    }

    #[test]
    fn kernel_dimension() {
        let f = Rationals;
        let a = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel(&f);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vec(&f, &a.apply(&f, v)));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Rationals;
        let a = q(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse(&f).unwrap();
        assert_eq!(a.mul(&f, &inv), Mat::identity(&f, 2));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse(&f).is_none());
    }

    #[test]
    fn solve_inconsistent() {
        let f = Rationals;
        let a = q(&[&[1, 1], &[1, 1]]);
        assert!(a.solve(&f, &[f.from_i64(1), f.from_i64(2)]).is_none());
        let x = a.solve(&f, &[f.from_i64(3), f.from_i64(3)]).unwrap();
        assert_eq!(a.apply(&f, &x), vec![f.from_i64(3), f.from_i64(3)]);
    }

    #[test]
    fn intersection_of_planes() {
        let f = Fp::new(5).unwrap();
        let u = Subspace::from_vectors(&f, 3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        let w = Subspace::from_vectors(&f, 3, &[vec![0, 1, 0], vec![0, 0, 1]]);
        let i = u.intersect(&f, &w);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&f, &[0, 3, 0]));
        assert_eq!(u.sum(&f, &w).dim(), 3);
    }
}
