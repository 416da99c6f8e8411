//! Finitely supported graded rational vector spaces with the Koszul symmetry.
//!
//! Two grading groups are supported: `i64` (internal degree) and
//! `(i64, i64)` (chain degree, internal degree). The sign character is
//! `(-1)^n` on each coordinate, and the symmetry sign of two homogeneous
//! elements is `-1` exactly when both characters are `-1`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Neg};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Matrix, Q};

pub trait Degree: Copy + Ord + Hash + Debug + Add<Output = Self> + Neg<Output = Self> + Send + Sync + 'static {
    fn zero() -> Self;
    /// Value of the sign character, `+1` or `-1`.
    fn epsilon(self) -> i8;
}

impl Degree for i64 {
    fn zero() -> Self {
        0
    }
    fn epsilon(self) -> i8 {
        if self.rem_euclid(2) == 0 { 1 } else { -1 }
    }
}

/// `(chain degree, internal degree)`, ordered lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Bidegree(pub i64, pub i64);

impl Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree(self.0 + o.0, self.1 + o.1)
    }
}

impl Neg for Bidegree {
    type Output = Bidegree;
    fn neg(self) -> Bidegree {
        Bidegree(-self.0, -self.1)
    }
}

impl Degree for Bidegree {
    fn zero() -> Self {
        Bidegree(0, 0)
    }
    fn epsilon(self) -> i8 {
        self.0.epsilon() * self.1.epsilon()
    }
}

/// Symmetry sign for swapping homogeneous elements of degrees `a` and `b`.
pub fn koszul_sign<D: Degree>(a: D, b: D) -> i8 {
    if a.epsilon() == -1 && b.epsilon() == -1 { -1 } else { 1 }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("block at degree {degree} has shape {found:?}, expected {expected:?}")]
    BlockShape { degree: String, found: (usize, usize), expected: (usize, usize) },
    #[error("graded maps do not compose: {0}")]
    Compose(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct GradedSpace<D: Degree> {
    dims: BTreeMap<D, usize>,
}

pub type Bigraded = GradedSpace<Bidegree>;

impl<D: Degree> GradedSpace<D> {
    pub fn zero() -> Self {
        GradedSpace { dims: BTreeMap::new() }
    }

    pub fn new(dims: impl IntoIterator<Item = (D, usize)>) -> Self {
        let mut s = Self::zero();
        for (d, n) in dims {
            *s.dims.entry(d).or_insert(0) += n;
        }
        s.dims.retain(|_, n| *n > 0);
        s
    }

    /// `Q^n` concentrated in degree `d`.
    pub fn line(d: D, n: usize) -> Self {
        Self::new([(d, n)])
    }

    pub fn dim(&self, d: D) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = D> + '_ {
        self.dims.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (D, usize)> + '_ {
        self.dims.iter().map(|(d, n)| (*d, *n))
    }

    /// Position of the first basis vector of degree `d` in the total ordering
    /// (degrees ascending, then index).
    pub fn offset(&self, d: D) -> usize {
        self.dims.range(..d).map(|(_, n)| n).sum()
    }

    pub fn dual(&self) -> Self {
        Self::new(self.iter().map(|(d, n)| (-d, n)))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::new(self.iter().chain(other.iter()))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::new(
            self.iter()
                .flat_map(|(a, m)| other.iter().map(move |(b, n)| (a + b, m * n))),
        )
    }

    /// Basis of `self ⊗ other` in degree `d`, as triples `(a, i, j)` with `i`
    /// indexing `self_a` and `j` indexing `other_{d-a}`, ordered lexicographically.
    pub fn tensor_basis(&self, other: &Self, d: D) -> Vec<(D, usize, usize)> {
        let mut out = Vec::new();
        for (a, m) in self.iter() {
            for (b, n) in other.iter() {
                if a + b == d {
                    for i in 0..m {
                        for j in 0..n {
                            out.push((a, i, j));
                        }
                    }
                }
            }
        }
        out
    }

    /// Applies `f` to every degree.
    pub fn map_degrees<E: Degree>(&self, f: impl Fn(D) -> E) -> GradedSpace<E> {
        GradedSpace::new(self.iter().map(|(d, n)| (f(d), n)))
    }
}

pub fn tensor_graded<D: Degree>(v: &GradedSpace<D>, w: &GradedSpace<D>) -> GradedSpace<D> {
    v.tensor(w)
}

pub fn dual_graded<D: Degree>(v: &GradedSpace<D>) -> GradedSpace<D> {
    v.dual()
}

/// Degree-preserving linear map; `block(d)` has shape `target.dim(d) x source.dim(d)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedMap<D: Degree> {
    source: GradedSpace<D>,
    target: GradedSpace<D>,
    blocks: BTreeMap<D, Matrix>,
}

impl<D: Degree> GradedMap<D> {
    pub fn zero(source: &GradedSpace<D>, target: &GradedSpace<D>) -> Self {
        GradedMap { source: source.clone(), target: target.clone(), blocks: BTreeMap::new() }
    }

    pub fn identity(v: &GradedSpace<D>) -> Self {
        let blocks = v.iter().map(|(d, n)| (d, Matrix::identity(n))).collect();
        GradedMap { source: v.clone(), target: v.clone(), blocks }
    }

    pub fn from_blocks(
        source: &GradedSpace<D>,
        target: &GradedSpace<D>,
        blocks: impl IntoIterator<Item = (D, Matrix)>,
    ) -> Result<Self, GradedError> {
        let mut m = Self::zero(source, target);
        for (d, b) in blocks {
            m.set_block(d, b)?;
        }
        Ok(m)
    }

    pub fn set_block(&mut self, d: D, b: Matrix) -> Result<(), GradedError> {
        let expected = (self.target.dim(d), self.source.dim(d));
        if b.shape() != expected {
            return Err(GradedError::BlockShape { degree: format!("{d:?}"), found: b.shape(), expected });
        }
        if b.is_zero() {
            self.blocks.remove(&d);
        } else {
            self.blocks.insert(d, b);
        }
        Ok(())
    }

    pub fn source(&self) -> &GradedSpace<D> {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace<D> {
        &self.target
    }

    pub fn block(&self, d: D) -> Matrix {
        self.blocks
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.target.dim(d), self.source.dim(d)))
    }

    /// Degrees where either side is nonzero.
    pub fn support(&self) -> Vec<D> {
        let mut v: Vec<D> = self.source.degrees().chain(self.target.degrees()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &GradedMap<D>) -> Result<GradedMap<D>, GradedError> {
        if rhs.target != self.source {
            return Err(GradedError::Compose(format!("{:?} vs {:?}", rhs.target, self.source)));
        }
        let mut out = GradedMap::zero(&rhs.source, &self.target);
        for d in rhs.source.degrees() {
            if let (Some(a), Some(b)) = (self.blocks.get(&d), rhs.blocks.get(&d)) {
                out.set_block(d, a.mul(b))?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &GradedMap<D>) -> GradedMap<D> {
        assert!(self.source == rhs.source && self.target == rhs.target, "graded add shape");
        let mut out = self.clone();
        for (d, b) in &rhs.blocks {
            let nb = out.block(*d).add(b);
            out.set_block(*d, nb).expect("shape");
        }
        out
    }

    pub fn scale(&self, s: &Q) -> GradedMap<D> {
        let mut out = GradedMap::zero(&self.source, &self.target);
        for (d, b) in &self.blocks {
            out.set_block(*d, b.scale(s)).expect("shape");
        }
        out
    }

    pub fn sub(&self, rhs: &GradedMap<D>) -> GradedMap<D> {
        self.add(&rhs.scale(&-Q::one()))
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.source.iter().all(|(d, _)| self.block(d).is_identity())
    }

    pub fn is_iso(&self) -> bool {
        self.support()
            .iter()
            .all(|d| self.source.dim(*d) == self.target.dim(*d) && self.block(*d).is_invertible())
    }

    pub fn inverse(&self) -> Option<GradedMap<D>> {
        let mut out = GradedMap::zero(&self.target, &self.source);
        for d in self.support() {
            let inv = self.block(d).inverse()?;
            out.set_block(d, inv).ok()?;
        }
        Some(out)
    }

    pub fn rank(&self, d: D) -> usize {
        self.block(d).rank()
    }

    pub fn total_rank(&self) -> usize {
        self.support().into_iter().map(|d| self.rank(d)).sum()
    }

    pub fn is_injective(&self) -> bool {
        self.source.iter().all(|(d, n)| self.rank(d) == n)
    }

    pub fn is_surjective(&self) -> bool {
        self.target.iter().all(|(d, n)| self.rank(d) == n)
    }

    /// Image dimensions per degree.
    pub fn image_dims(&self) -> GradedSpace<D> {
        GradedSpace::new(self.support().into_iter().map(|d| (d, self.rank(d))))
    }

    pub fn kernel_dims(&self) -> GradedSpace<D> {
        GradedSpace::new(self.source.iter().map(|(d, n)| (d, n - self.rank(d))))
    }

    pub fn cokernel_dims(&self) -> GradedSpace<D> {
        GradedSpace::new(self.target.iter().map(|(d, n)| (d, n - self.rank(d))))
    }

    /// The same map as one block-diagonal matrix in the total ordering.
    pub fn to_total(&self) -> Matrix {
        let mut m = Matrix::zeros(self.target.total_dim(), self.source.total_dim());
        for (d, b) in &self.blocks {
            m.set_block(self.target.offset(*d), self.source.offset(*d), b);
        }
        m
    }

    /// Inverse of [`GradedMap::to_total`]; `None` if `m` is not degree preserving.
    pub fn from_total(source: &GradedSpace<D>, target: &GradedSpace<D>, m: &Matrix) -> Option<Self> {
        if m.shape() != (target.total_dim(), source.total_dim()) {
            return None;
        }
        let mut out = GradedMap::zero(source, target);
        let mut check = Matrix::zeros(m.rows(), m.cols());
        for (d, n) in source.iter() {
            let t = target.dim(d);
            if t == 0 {
                continue;
            }
            let b = m.block(target.offset(d), source.offset(d), t, n);
            check.set_block(target.offset(d), source.offset(d), &b);
            out.set_block(d, b).ok()?;
        }
        (check == *m).then_some(out)
    }

    pub fn direct_sum(&self, rhs: &GradedMap<D>) -> GradedMap<D> {
        let source = self.source.direct_sum(&rhs.source);
        let target = self.target.direct_sum(&rhs.target);
        let mut out = GradedMap::zero(&source, &target);
        for d in source.degrees().chain(target.degrees()).collect::<std::collections::BTreeSet<_>>() {
            let b = self.block(d).direct_sum(&rhs.block(d));
            out.set_block(d, b).expect("shape");
        }
        out
    }

    /// Tensor product of maps, in the lexicographic tensor bases.
    pub fn tensor(&self, rhs: &GradedMap<D>) -> GradedMap<D> {
        let source = self.source.tensor(&rhs.source);
        let target = self.target.tensor(&rhs.target);
        let mut out = GradedMap::zero(&source, &target);
        for (d, _) in source.iter() {
            let sb = self.source.tensor_basis(&rhs.source, d);
            let tb = self.target.tensor_basis(&rhs.target, d);
            if tb.is_empty() {
                continue;
            }
            let mut m = Matrix::zeros(tb.len(), sb.len());
            for (c, &(a, i, j)) in sb.iter().enumerate() {
                let fa = self.block(a);
                let gb = rhs.block(d + (-a));
                for (r, &(a2, k, l)) in tb.iter().enumerate() {
                    if a2 != a {
                        continue;
                    }
                    let x = &fa[(k, i)] * &gb[(l, j)];
                    if !x.is_zero() {
                        m[(r, c)] = x;
                    }
                }
            }
            out.set_block(d, m).expect("shape");
        }
        out
    }

    /// Transpose map between dual spaces.
    pub fn dual(&self) -> GradedMap<D> {
        let mut out = GradedMap::zero(&self.target.dual(), &self.source.dual());
        for (d, b) in &self.blocks {
            out.set_block(-*d, b.transpose()).expect("shape");
        }
        out
    }
}

/// The symmetry `V ⊗ W → W ⊗ V`, `v ⊗ w ↦ s(|v|,|w|) w ⊗ v`.
pub fn koszul_symmetry<D: Degree>(v: &GradedSpace<D>, w: &GradedSpace<D>) -> GradedMap<D> {
    let source = v.tensor(w);
    let target = w.tensor(v);
    let mut out = GradedMap::zero(&source, &target);
    for (d, _) in source.iter() {
        let sb = v.tensor_basis(w, d);
        let tb = w.tensor_basis(v, d);
        let mut m = Matrix::zeros(tb.len(), sb.len());
        for (c, &(a, i, j)) in sb.iter().enumerate() {
            let b = d + (-a);
            let r = tb.iter().position(|&(b2, j2, i2)| b2 == b && j2 == j && i2 == i).expect("basis");
            m[(r, c)] = Q::from_integer(koszul_sign(a, b).into());
        }
        out.set_block(d, m).expect("shape");
    }
    out
}

/// Dimension convolution of two graded spaces.
pub fn convolve<D: Degree>(v: &GradedSpace<D>, w: &GradedSpace<D>) -> GradedSpace<D> {
    v.tensor(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tensor_examples() {
        let w = GradedSpace::new([(0i64, 2), (3, 1)]);
        assert_eq!(tensor_graded(&GradedSpace::line(0, 1), &w), w);
        assert_eq!(tensor_graded(&GradedSpace::line(2i64, 1), &GradedSpace::line(2, 1)), GradedSpace::line(4, 1));
        assert_eq!(tensor_graded(&GradedSpace::line(1i64, 2), &GradedSpace::line(1, 2)), GradedSpace::line(2, 4));
    }

    #[test]
    fn koszul_signs() {
        assert_eq!(koszul_sign(0i64, 5), 1);
        assert_eq!(koszul_sign(1i64, 1), -1);
        assert_eq!(koszul_sign(1i64, 2), 1);
        let s = koszul_symmetry(&GradedSpace::line(1i64, 1), &GradedSpace::line(1, 1));
        assert_eq!(s.block(2), Matrix::from_i64(&[&[-1]]));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_graded(&GradedSpace::line(0i64, 1)), GradedSpace::line(0, 1));
        assert_eq!(dual_graded(&GradedSpace::line(2i64, 1)), GradedSpace::line(-2, 1));
        let v = GradedSpace::new([(0i64, 1), (1, 2)]);
        assert_eq!(dual_graded(&v), GradedSpace::new([(-1, 2), (0, 1)]));
    }

    fn space() -> impl Strategy<Value = GradedSpace<i64>> {
        proptest::collection::vec((-3i64..4, 0usize..3), 0..4).prop_map(GradedSpace::new)
    }

    proptest! {
        #[test]
        fn symmetry_is_involutive(v in space(), w in space()) {
            let s = koszul_symmetry(&v, &w);
            let t = koszul_symmetry(&w, &v);
            prop_assert!(t.compose(&s).unwrap().is_identity());
            prop_assert_eq!(v.tensor(&w).total_dim(), v.total_dim() * w.total_dim());
            prop_assert_eq!(v.dual().dual(), v);
        }

        #[test]
        fn sign_is_bimultiplicative(a in -5i64..5, a2 in -5i64..5, b in -5i64..5) {
            prop_assert_eq!(koszul_sign(a, b) * koszul_sign(b, a), 1);
            prop_assert_eq!(koszul_sign(a + a2, b), koszul_sign(a, b) * koszul_sign(a2, b));
            let (x, y) = (Bidegree(a, a2), Bidegree(b, a));
            prop_assert_eq!(koszul_sign(x, y) * koszul_sign(y, x), 1);
        }
    }
}
