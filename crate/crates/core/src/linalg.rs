//! Sparse exact linear algebra over Q.
//!
//! Everything in the crate eventually reduces to questions about finite
//! dimensional graded pieces, so a single incremental row-echelon structure
//! carries membership tests, normal forms, kernels, preimages and solving.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Sparse vector indexed by basis position. Zero entries are never stored.
pub type SparseVec = BTreeMap<usize, Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// `a += c * b`
pub fn add_scaled(a: &mut SparseVec, b: &SparseVec, c: &Q) {
    if c.is_zero() {
        return;
    }
    for (k, v) in b {
        let entry = a.entry(*k).or_insert_with(Q::zero);
        *entry += v * c;
        if entry.is_zero() {
            a.remove(k);
        }
    }
}

pub fn scale(a: &SparseVec, c: &Q) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    a.iter().map(|(k, v)| (*k, v * c)).collect()
}

pub fn unit(i: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(i, Q::one());
    v
}

#[derive(Clone, Debug)]
struct Row {
    pivot: usize,
    vec: SparseVec,
    coords: SparseVec,
}

/// Reduced row echelon basis of a subspace, built incrementally.
///
/// Every stored row is normalized to 1 at its pivot and is zero at every
/// other pivot; the pivot of a row is its largest index. Rows carry a
/// `coords` vector recording which inserted inputs they are combinations of,
/// which is what makes preimages and kernels fall out of the same pass.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivots: BTreeMap<usize, usize>,
}

/// Outcome of inserting a vector.
#[derive(Clone, Debug)]
pub enum Insert {
    /// The vector was independent; a new pivot was created.
    Added(usize),
    /// The vector was dependent. The payload is `coords - sum(f_i * coords_i)`,
    /// i.e. the linear relation among inputs that it witnesses.
    Dependent(SparseVec),
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Reduces `v` to its canonical residual modulo the span. Returns the
    /// residual together with the combination of row coords that was removed.
    pub fn reduce_tracked(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut residual = v.clone();
        let mut removed = SparseVec::new();
        let hits: Vec<(usize, Q)> = residual
            .iter()
            .filter(|(col, _)| self.pivots.contains_key(col))
            .map(|(c, x)| (*c, x.clone()))
            .collect();
        for (col, factor) in hits {
            let row = &self.rows[self.pivots[&col]];
            add_scaled(&mut residual, &row.vec, &-factor.clone());
            add_scaled(&mut removed, &row.coords, &factor);
        }
        (residual, removed)
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_tracked(v).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts a vector with no provenance tracking.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        matches!(self.insert_tracked(v, SparseVec::new()), Insert::Added(_))
    }

    pub fn insert_tracked(&mut self, v: SparseVec, coords: SparseVec) -> Insert {
        let (residual, removed) = self.reduce_tracked(&v);
        let mut coords = coords;
        add_scaled(&mut coords, &removed, &-Q::one());
        if residual.is_empty() {
            return Insert::Dependent(coords);
        }
        let (&pivot, lead) = residual.iter().next_back().expect("nonempty");
        let inv = lead.recip();
        let vec = scale(&residual, &inv);
        let coords = scale(&coords, &inv);
        for row in &mut self.rows {
            if let Some(f) = row.vec.get(&pivot).cloned() {
                add_scaled(&mut row.vec, &vec, &-f.clone());
                add_scaled(&mut row.coords, &coords, &-f);
            }
        }
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(Row { pivot, vec, coords });
        Insert::Added(pivot)
    }

    /// Basis rows in insertion order.
    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> + '_ {
        self.rows.iter().map(|r| &r.vec)
    }

    /// Expresses `v` as a combination of the tracked inputs, if it lies in
    /// the span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let (residual, removed) = self.reduce_tracked(v);
        residual.is_empty().then_some(removed)
    }

    pub fn row_pivot(&self, i: usize) -> usize {
        self.rows[i].pivot
    }
}

/// Linear map between finite-dimensional spaces, stored by columns.
#[derive(Clone, Debug, Default)]
pub struct Matrix {
    pub rows: usize,
    pub cols: Vec<SparseVec>,
}

impl Matrix {
    pub fn new(rows: usize, cols: Vec<SparseVec>) -> Self {
        Matrix { rows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v {
            add_scaled(&mut out, &self.cols[*j], c);
        }
        out
    }

    pub fn compose(&self, inner: &Matrix) -> Matrix {
        Matrix::new(self.rows, inner.cols.iter().map(|c| self.apply(c)).collect())
    }

    /// Column echelon of the image, tracking which source vector produced it.
    pub fn image_echelon(&self) -> Echelon {
        let mut e = Echelon::new();
        for (j, c) in self.cols.iter().enumerate() {
            e.insert_tracked(c.clone(), unit(j));
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.image_echelon().rank()
    }

    /// Kernel basis, in reduced echelon form over the source coordinates.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut e = Echelon::new();
        let mut kernel = Echelon::new();
        for (j, c) in self.cols.iter().enumerate() {
            if let Insert::Dependent(rel) = e.insert_tracked(c.clone(), unit(j)) {
                kernel.insert(rel);
            }
        }
        kernel.basis().cloned().collect()
    }

    /// Some `x` with `self * x = b`, if one exists.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        self.image_echelon().express(b)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix::new(n, (0..n).map(unit).collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut m = vec![vec![Q::zero(); self.cols.len()]; self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c {
                m[*i][j] = x.clone();
            }
        }
        m
    }
}

/// Formats a rational the way the input language spells it.
pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_negative(x: &Q) -> bool {
    x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|(i, x)| (*i, q(*x))).collect()
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = Echelon::new();
        assert!(e.insert(v(&[(0, 1), (1, 1)])));
        assert!(e.insert(v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(v(&[(0, 1), (1, 2), (2, 1)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&v(&[(0, 1), (2, -1)])));
        assert!(!e.contains(&v(&[(0, 1)])));
    }

    #[test]
    fn residual_is_canonical() {
        let mut a = Echelon::new();
        a.insert(v(&[(0, 1), (2, 1)]));
        a.insert(v(&[(1, 2), (2, 1)]));
        let mut b = Echelon::new();
        b.insert(v(&[(1, 2), (0, -1)]));
        b.insert(v(&[(0, 3), (2, 3)]));
        let x = v(&[(0, 5), (1, 7), (2, 11)]);
        assert_eq!(a.reduce(&x), b.reduce(&x));
    }

    #[test]
    fn kernel_and_solve() {
        // columns: e0 -> (1,0), e1 -> (0,1), e2 -> (1,1)
        let m = Matrix::new(2, vec![v(&[(0, 1)]), v(&[(1, 1)]), v(&[(0, 1), (1, 1)])]);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
        let b = v(&[(0, 3), (1, -2)]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        let zero = Matrix::new(2, vec![SparseVec::new()]);
        assert!(zero.solve(&b).is_none());
    }
}
