//! Exact linear algebra over ℚ, with a prime-field shortcut for dimension counts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("image not contained in kernel")]
    ImageNotInKernel,
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("denominator divisible by {0}; matrix has no reduction mod p")]
    BadReduction(u64),
}

/// Scalar field used for dimension computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Field {
    #[default]
    Rational,
    Prime(u64),
}

impl Field {
    pub const DEFAULT_PRIME: u64 = 32003;
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "p:{p}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Result of a subquotient computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub dimension: usize,
    /// Kernel vectors completing the image to a basis of the kernel.
    pub representatives: Vec<Vec<Q>>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> RationalMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RationalMatrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Q::from_int(x)).collect()).collect(),
        )
    }

    /// Matrix whose columns are the given vectors of length `len`.
    pub fn from_columns(len: usize, columns: &[Vec<Q>]) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(len, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), len, "column length");
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x.clone());
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Q) {
        let e = &mut self.data[i * self.cols + j];
        *e += v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Q::is_zero)
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = RationalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !x.is_zero() {
                    t.set(j, i, x.clone());
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension");
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    fn row_vecs(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vecs();
        eliminate(&mut rows, self.cols, false).len()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut rows = self.row_vecs();
        let pivots = eliminate(&mut rows, self.cols, true);
        let mut out = RationalMatrix::zeros(self.rows, self.cols);
        for (i, r) in rows.into_iter().enumerate() {
            for (j, x) in r.into_iter().enumerate() {
                out.set(i, j, x);
            }
        }
        (out, pivots)
    }

    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                let x = r.get(i, free);
                if !x.is_zero() {
                    v[p] = -x;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Some `x` with `self · x = b`, if one exists.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut rows: Vec<Vec<Q>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let pivots = eliminate(&mut rows, self.cols + 1, true);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = rows[i][self.cols].clone();
        }
        Some(x)
    }

    pub fn rank_in(&self, field: Field) -> Result<usize, LinalgError> {
        match field {
            Field::Rational => Ok(self.rank()),
            Field::Prime(p) => modp::rank(self, p),
        }
    }
}

/// In-place exact Gauss elimination. Pivots are chosen per column as the
/// smallest-bit-size nonzero entry among unused rows, lowest row on ties.
/// Returns pivot columns; row `i` of the result carries pivot `i`.
fn eliminate(rows: &mut [Vec<Q>], cols: usize, full: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let mut best: Option<(u64, usize)> = None;
        for (i, r) in rows.iter().enumerate().skip(next) {
            if !r[col].is_zero() {
                let cost = r[col].bit_size();
                if best.map_or(true, |(c, _)| cost < c) {
                    best = Some((cost, i));
                }
            }
        }
        let Some((_, prow)) = best else { continue };
        rows.swap(next, prow);
        let inv = rows[next][col].inv();
        if full {
            for x in rows[next][col..].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let (head, tail) = rows.split_at_mut(next);
        let (pivot_row, rest) = tail.split_first_mut().unwrap();
        let above: &mut [Vec<Q>] = if full { head } else { &mut [] };
        for r in rest.iter_mut().chain(above.iter_mut()) {
            if r[col].is_zero() {
                continue;
            }
            let factor = if full { r[col].clone() } else { &r[col] * &inv };
            for j in col..cols {
                let pj = &pivot_row[j];
                if !pj.is_zero() {
                    let v = &r[j] - &(&factor * pj);
                    r[j] = v;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// `ker(b_out) / im(b_in)`. Columns of `b_in` span the image.
pub fn quotient_dimension(
    b_in: &RationalMatrix,
    b_out: &RationalMatrix,
) -> Result<Quotient, LinalgError> {
    if b_in.rows() != b_out.cols() {
        return Err(LinalgError::Shape(format!(
            "image vectors have length {}, kernel map takes {}",
            b_in.rows(),
            b_out.cols()
        )));
    }
    if !b_out.mul(b_in).is_zero() {
        return Err(LinalgError::ImageNotInKernel);
    }
    let n = b_in.rows();
    let kernel = b_out.kernel_basis();
    let (_, image_pivots) = b_in.transpose().rref();
    let image_rank = image_pivots.len();
    let mut spanning: Vec<Vec<Q>> = (0..b_in.cols()).map(|j| b_in.column(j)).collect();
    let mut rank = image_rank;
    let mut representatives = Vec::new();
    for v in kernel {
        spanning.push(v.clone());
        let r = RationalMatrix::from_columns(n, &spanning).rank();
        if r > rank {
            rank = r;
            representatives.push(v);
        } else {
            spanning.pop();
        }
    }
    Ok(Quotient { dimension: representatives.len(), representatives })
}

/// Dimension-only variant of [`quotient_dimension`] in the requested field.
pub fn quotient_dimension_in(
    b_in: &RationalMatrix,
    b_out: &RationalMatrix,
    field: Field,
) -> Result<usize, LinalgError> {
    match field {
        Field::Rational => quotient_dimension(b_in, b_out).map(|q| q.dimension),
        Field::Prime(_) => {
            let kernel = b_out.cols() - b_out.rank_in(field)?;
            let image = b_in.rank_in(field)?;
            kernel.checked_sub(image).ok_or(LinalgError::ImageNotInKernel)
        }
    }
}

pub mod modp {
    //! Arithmetic in 𝔽_p for p < 2³².

    use super::{LinalgError, RationalMatrix};

    pub fn mul(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a, p);
            }
            a = mul(a, a, p);
            e >>= 1;
        }
        r
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        assert!(a % p != 0, "inverse of zero mod {p}");
        pow(a, p - 2, p)
    }

    pub fn is_prime(p: u64) -> bool {
        p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
    }

    pub fn reduce(m: &RationalMatrix, p: u64) -> Result<Vec<Vec<u64>>, LinalgError> {
        (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|x| x.mod_p(p).ok_or(LinalgError::BadReduction(p)))
                    .collect()
            })
            .collect()
    }

    pub fn rank(m: &RationalMatrix, p: u64) -> Result<usize, LinalgError> {
        let mut rows = reduce(m, p)?;
        let cols = m.cols();
        let mut next = 0;
        for col in 0..cols {
            let Some(pr) = (next..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
            rows.swap(next, pr);
            let inv = inv(rows[next][col], p);
            let pivot = rows[next].clone();
            for r in rows.iter_mut().skip(next + 1) {
                if r[col] == 0 {
                    continue;
                }
                let f = mul(r[col], inv, p);
                for j in col..cols {
                    if pivot[j] != 0 {
                        r[j] = (r[j] + p - mul(f, pivot[j], p)) % p;
                    }
                }
            }
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(x: i64) -> Q {
        Q::from_int(x)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::identity(2).rank(), 2);
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(RationalMatrix::from_ints(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(RationalMatrix::identity(3).kernel_basis().is_empty());
        assert_eq!(RationalMatrix::zeros(2, 3).kernel_basis().len(), 3);
        let k = RationalMatrix::from_ints(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], Q::zero());
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn quotient_examples() {
        let z = RationalMatrix::zeros(3, 3);
        assert_eq!(quotient_dimension(&z, &z).unwrap().dimension, 3);
        let id = RationalMatrix::identity(3);
        assert_eq!(quotient_dimension(&id, &z).unwrap().dimension, 0);
        let b_out = RationalMatrix::from_ints(&[&[1, 1, 0]]);
        let b_in = RationalMatrix::from_columns(3, &[vec![q(1), q(-1), q(0)]]);
        let quot = quotient_dimension(&b_in, &b_out).unwrap();
        assert_eq!(quot.dimension, 1);
        assert!(b_out.mul_vec(&quot.representatives[0]).iter().all(Q::is_zero));
        let bad = RationalMatrix::from_columns(3, &[vec![q(1), q(0), q(0)]]);
        assert_eq!(quotient_dimension(&bad, &b_out), Err(LinalgError::ImageNotInKernel));
    }

    #[test]
    fn solve_finds_preimages_and_rejects_inconsistent_systems() {
        let m = RationalMatrix::from_ints(&[&[1, 2], &[3, 4], &[2, 4]]);
        let x = m.solve(&[q(5), q(11), q(10)]).unwrap();
        assert_eq!(x, vec![q(1), q(2)]);
        assert!(m.solve(&[q(1), q(0), q(0)]).is_none());
    }

    #[test]
    fn mod_p_rank_matches_on_small_integer_matrices() {
        let m = RationalMatrix::from_ints(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(m.rank_in(Field::Prime(Field::DEFAULT_PRIME)).unwrap(), 2);
        assert_eq!(m.rank_in(Field::Prime(3)).unwrap(), 1);
        let half = RationalMatrix::from_rows(vec![vec![Q::new(1, 2)]]);
        assert_eq!(half.rank_in(Field::Prime(2)), Err(LinalgError::BadReduction(2)));
        assert!(modp::is_prime(32003));
    }

    fn matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                RationalMatrix::from_rows(v.chunks(c).map(|ch| ch.iter().map(|&x| q(x)).collect()).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Q::is_zero));
            }
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rref_is_reduced(m in matrix()) {
            let (r, piv) = m.rref();
            for (i, &p) in piv.iter().enumerate() {
                prop_assert!(r.get(i, p).is_one());
                for k in 0..r.rows() {
                    if k != i {
                        prop_assert!(r.get(k, p).is_zero());
                    }
                }
            }
        }
    }
}
