//! Exact linear algebra over the rationals.
//!
//! Every basis returned from this module follows one convention: the
//! reduced row echelon form with pivots chosen left to right, and kernel
//! vectors indexed by free variables in increasing order with the free
//! variable set to one. Outputs are therefore deterministic and diffable.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-3/2"`; the result is reduced.
pub fn parse_q(s: &str) -> Result<Q, LinalgError> {
    let s = s.trim();
    let bad = || LinalgError::Parse(s.to_string());
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_vec(v: &[String]) -> Result<Vec<Q>, LinalgError> {
    v.iter().map(|s| parse_q(s)).collect()
}

pub fn fmt_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(fmt_q).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Self::from_rows(rows).expect("ragged literal")
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn column_vector(v: &[Q]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Q] {
        &self.data
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Q>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j { x.is_one() } else { x.is_zero() }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape {:?} * {:?}", self.shape(), rhs.shape());
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
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

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &Q) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        out
    }

    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Matrix { rows: self.rows + rhs.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + rhs.rows, self.cols + rhs.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, rhs);
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Kronecker product; row index of the result is `i * rhs.rows + k`.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = &rhs[(k, l)];
                        if !b.is_zero() {
                            out[(i * rhs.rows + k, j * rhs.cols + l)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m.data[r * m.cols + j] * &inv;
                m.data[r * m.cols + j] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m.data[r * m.cols + j].is_zero() {
                        continue;
                    }
                    let v = &f * &m.data[r * m.cols + j];
                    m.data[i * m.cols + j] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// Columns form the canonical basis of the null space.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.cols, free.len());
        for (jj, &f) in free.iter().enumerate() {
            k[(f, jj)] = Q::one();
            for (row, &p) in pivots.iter().enumerate() {
                k[(p, jj)] = -r[(row, f)].clone();
            }
        }
        k
    }

    /// Canonical basis (as columns) of the column space: the nonzero rows of
    /// the reduced echelon form of the transpose.
    pub fn image_basis(&self) -> Matrix {
        let (r, piv) = self.transpose().rref();
        let rows: Vec<Vec<Q>> = (0..piv.len()).map(|i| r.row(i).to_vec()).collect();
        Matrix::from_columns(self.rows, &rows)
    }

    /// Canonical particular solution of `self * x = b` (free variables zero),
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Q]) -> Result<Option<Vec<Q>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::Dimension(format!(
                "right-hand side has {} entries, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let aug = self.hstack(&Matrix::column_vector(b));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Ok(Some(x))
    }

    /// Solves `self * X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Option<Matrix>, LinalgError> {
        if b.rows != self.rows {
            return Err(LinalgError::Dimension("solve_matrix rows".into()));
        }
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (r, pivots) = self.hstack(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn max_abs_denominator(&self) -> BigInt {
        self.data.iter().map(|x| x.denom().abs()).max().unwrap_or_else(BigInt::one)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| self.row(r).iter().map(fmt_q).collect()).collect()
    }

    pub fn from_strings(rows: usize, cols: usize, s: &[Vec<String>]) -> Result<Self, LinalgError> {
        if s.len() != rows || s.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Dimension(format!("expected {rows}x{cols} matrix")));
        }
        let data = s.iter().flatten().map(|x| parse_q(x)).collect::<Result<_, _>>()?;
        Ok(Matrix { rows, cols, data })
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Q;
    fn index(&self, (r, c): (usize, usize)) -> &Q {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }
}

pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &Matrix) -> Matrix {
    m.kernel_basis()
}

pub fn solve(m: &Matrix, b: &[Q]) -> Result<Option<Vec<Q>>, LinalgError> {
    m.solve(b)
}

/// A subquotient `Z / B` of `Q^n` with `B ⊆ Z`, with a fixed basis of the
/// quotient made of columns of `Z` (greedy, left to right) and a reduction
/// map from `Z` to quotient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    ambient: usize,
    /// Columns: basis of B followed by the chosen complement representatives.
    frame: Matrix,
    boundary_rank: usize,
}

impl Subquotient {
    /// `sub` and `rel` are given by spanning columns; `rel` must lie in the span of `sub`.
    pub fn new(ambient: usize, sub: &Matrix, rel: &Matrix) -> Self {
        assert_eq!(sub.rows(), ambient);
        assert_eq!(rel.rows(), ambient);
        let b = rel.image_basis();
        let z = sub.image_basis();
        let mut frame = b.clone();
        let mut rank = b.cols();
        let boundary_rank = rank;
        for j in 0..z.cols() {
            let cand = frame.hstack(&z.select_columns(&[j]));
            let r = cand.rank();
            if r > rank {
                frame = cand;
                rank = r;
            }
        }
        Subquotient { ambient, frame, boundary_rank }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.frame.cols() - self.boundary_rank
    }

    /// Representative vectors (columns) of the quotient basis.
    pub fn representatives(&self) -> Matrix {
        let idx: Vec<usize> = (self.boundary_rank..self.frame.cols()).collect();
        self.frame.select_columns(&idx)
    }

    /// Quotient coordinates of a vector in `Z`; `None` if it is not in `Z`.
    pub fn reduce(&self, v: &[Q]) -> Option<Vec<Q>> {
        if self.frame.cols() == 0 {
            return if v.iter().all(Zero::is_zero) { Some(Vec::new()) } else { None };
        }
        let x = self.frame.solve(v).ok()??;
        Some(x[self.boundary_rank..].to_vec())
    }

    /// Matrix (target coords x source coords) of the map induced by `ambient_map`
    /// from `src` to `self`. Panics if the map does not respect the subquotients.
    pub fn induced(&self, src: &Subquotient, ambient_map: &Matrix) -> Option<Matrix> {
        let reps = src.representatives();
        let images = ambient_map.mul(&reps);
        if self.frame.cols() == 0 {
            return images.is_zero().then(|| Matrix::zeros(0, src.dim()));
        }
        let x = self.frame.solve_matrix(&images).ok()??;
        Some(x.block(self.boundary_rank, 0, self.dim(), src.dim()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::zeros(0, 0).rank(), 0);
        assert_eq!(Matrix::identity(3).rank(), 3);
        assert_eq!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(2).kernel_basis().cols(), 0);
        assert_eq!(Matrix::zeros(2, 2).kernel_basis(), Matrix::identity(2));
        let k = Matrix::from_i64(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, Matrix::from_i64(&[&[-1], &[1]]));
    }

    #[test]
    fn solve_examples() {
        let b = vec![q(4), qf(-1, 3)];
        assert_eq!(Matrix::identity(2).solve(&b).unwrap(), Some(b.clone()));
        let m = Matrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert_eq!(m.solve(&[q(0), q(1)]).unwrap(), None);
        assert_eq!(Matrix::from_i64(&[&[2]]).solve(&[q(3)]).unwrap(), Some(vec![qf(3, 2)]));
        assert!(matches!(m.solve(&[q(1)]), Err(LinalgError::Dimension(_))));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("6/4").unwrap(), qf(3, 2));
        assert_eq!(fmt_q(&qf(-6, 4)), "-3/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn subquotient_homology() {
        // Z = R^2, B = span(e1): quotient spanned by e2.
        let sq = Subquotient::new(2, &Matrix::identity(2), &Matrix::from_i64(&[&[1], &[0]]));
        assert_eq!(sq.dim(), 1);
        assert_eq!(sq.reduce(&[q(5), q(2)]), Some(vec![q(2)]));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c)
                .prop_map(move |v| Matrix::from_flat(r, c, v.into_iter().map(q).collect()))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.cols(), m.cols());
            prop_assert!(m.mul(&k).is_zero());
            // canonical kernel is stable under re-canonicalisation
            let again = k.transpose().rref().0;
            let again = Matrix::from_columns(
                m.cols(),
                &(0..k.cols()).map(|i| again.row(i).to_vec()).collect::<Vec<_>>(),
            );
            prop_assert_eq!(again.image_basis(), k.image_basis());
        }

        #[test]
        fn solve_is_exact(m in small_matrix(), seed in proptest::collection::vec(-3i64..4, 5)) {
            let x0: Vec<Q> = (0..m.cols()).map(|i| q(seed[i])).collect();
            let b = m.mul_vec(&x0);
            let x = m.solve(&b).unwrap().expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&x), b);
        }
    }
}
