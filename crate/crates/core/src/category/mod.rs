//! Finite presentations of rigid symmetric monoidal linear categories and
//! their additive closure by formal direct sums.
//!
//! A morphism between base objects is a coordinate vector whose meaning is
//! fixed by the presentation: hom-basis coefficients for table presentations,
//! flattened graded blocks for concrete ones. `hom_basis` describes the
//! admissible subspace of coordinates.

mod concrete;
pub mod table;
mod validate;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Matrix, Q};

pub use concrete::{ConcreteData, ConcretePresentation, Generator, GeneratorData};
pub use table::{TableData, TablePresentation};
pub use validate::{validate_presentation, ValidationReport, Violation};

pub type ObjId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatError {
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("tensor product {0} is outside the presented range")]
    TensorOutOfRange(String),
    #[error("object {0} has no duality datum")]
    NoDual(String),
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error("morphism shape mismatch: {0}")]
    Shape(String),
}

pub trait Category: Send + Sync + Debug {
    fn name(&self) -> &str;
    /// Number of base objects (ids are `0..num_objects`).
    fn num_objects(&self) -> usize;
    fn label(&self, x: ObjId) -> String;
    fn lookup(&self, label: &str) -> Option<ObjId>;
    fn unit(&self) -> ObjId;
    /// Length of a coordinate vector for morphisms `x -> y`.
    fn coord_dim(&self, x: ObjId, y: ObjId) -> usize;
    /// Columns span the admissible coordinate vectors `x -> y`.
    fn hom_basis(&self, x: ObjId, y: ObjId) -> Arc<Matrix>;
    /// `g ∘ f` for `f: x -> y`, `g: y -> z`.
    fn compose(&self, x: ObjId, y: ObjId, z: ObjId, g: &[Q], f: &[Q]) -> Vec<Q>;
    fn identity(&self, x: ObjId) -> Vec<Q>;
    fn tensor_obj(&self, x: ObjId, y: ObjId) -> Result<ObjId, CatError>;
    /// `f ⊗ g : x ⊗ y -> x2 ⊗ y2` for `f: x -> x2`, `g: y -> y2`.
    fn tensor_mor(&self, x: ObjId, x2: ObjId, y: ObjId, y2: ObjId, f: &[Q], g: &[Q]) -> Result<Vec<Q>, CatError>;
    /// `σ: x ⊗ y -> y ⊗ x`.
    fn symmetry(&self, x: ObjId, y: ObjId) -> Result<Vec<Q>, CatError>;
    fn dual_obj(&self, x: ObjId) -> Result<ObjId, CatError>;
    /// `x^∨ ⊗ x -> 𝟙`.
    fn ev(&self, x: ObjId) -> Result<Vec<Q>, CatError>;
    /// `𝟙 -> x ⊗ x^∨`.
    fn coev(&self, x: ObjId) -> Result<Vec<Q>, CatError>;

    fn hom_dim(&self, x: ObjId, y: ObjId) -> usize {
        self.hom_basis(x, y).cols()
    }

    /// Transpose `f^∨: y^∨ -> x^∨` built from the duality data.
    fn dual_mor(&self, x: ObjId, y: ObjId, f: &[Q]) -> Result<Vec<Q>, CatError> {
        let (xd, yd) = (self.dual_obj(x)?, self.dual_obj(y)?);
        // y^∨ -> y^∨ x x^∨ -> y^∨ y x^∨ -> x^∨
        let xxd = self.tensor_obj(x, xd)?;
        let yd_x = self.tensor_obj(yd, x)?;
        let yd_y = self.tensor_obj(yd, y)?;
        let s1 = self.tensor_obj(yd, xxd)?;
        let s2 = self.tensor_obj(yd_y, xd)?;
        let unit = self.unit();
        let step1 = self.tensor_mor(yd, yd, unit, xxd, &self.identity(yd), &self.coev(x)?)?;
        let fx = self.tensor_mor(yd, yd, x, y, &self.identity(yd), f)?;
        let step2 = self.tensor_mor(yd_x, yd_y, xd, xd, &fx, &self.identity(xd))?;
        let step3 = self.tensor_mor(yd_y, unit, xd, xd, &self.ev(y)?, &self.identity(xd))?;
        let a = self.compose(yd, s1, s2, &step2, &step1);
        Ok(self.compose(yd, s2, xd, &step3, &a))
    }

    /// Hom-basis coefficients of an admissible coordinate vector.
    fn hom_coeffs(&self, x: ObjId, y: ObjId, v: &[Q]) -> Option<Vec<Q>> {
        let b = self.hom_basis(x, y);
        if b.cols() == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        b.solve(v).ok()?
    }

    /// Every base object whose label appears in `labels`, in order.
    fn lookup_all(&self, labels: &[String]) -> Result<Vec<ObjId>, CatError> {
        labels
            .iter()
            .map(|l| self.lookup(l).ok_or_else(|| CatError::UnknownObject(l.clone())))
            .collect()
    }
}

pub type Cat = Arc<dyn Category>;

/// Canonical formal direct sum: `(object, multiplicity)` sorted by label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct FormalSum(pub Vec<(String, usize)>);

impl FormalSum {
    pub fn from_objects(cat: &dyn Category, objs: &[ObjId]) -> Self {
        let mut m: BTreeMap<String, usize> = BTreeMap::new();
        for &x in objs {
            *m.entry(cat.label(x)).or_insert(0) += 1;
        }
        FormalSum(m.into_iter().collect())
    }

    /// Expanded ordered summand list.
    pub fn expand(&self, cat: &dyn Category) -> Result<SumObj, CatError> {
        let mut out = Vec::new();
        for (l, n) in &self.0 {
            let x = cat.lookup(l).ok_or_else(|| CatError::UnknownObject(l.clone()))?;
            out.extend(std::iter::repeat_n(x, *n));
        }
        Ok(out)
    }
}

/// Ordered list of base summands.
pub type SumObj = Vec<ObjId>;

/// Morphism between direct sums: `blocks[i * src.len() + j]` is the
/// coordinate vector of the component `src[j] -> tgt[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockMor {
    pub src: SumObj,
    pub tgt: SumObj,
    pub blocks: Vec<Vec<Q>>,
}

impl BlockMor {
    pub fn zero(cat: &dyn Category, src: &[ObjId], tgt: &[ObjId]) -> Self {
        let mut blocks = Vec::with_capacity(src.len() * tgt.len());
        for &y in tgt {
            for &x in src {
                blocks.push(vec![Q::zero(); cat.coord_dim(x, y)]);
            }
        }
        BlockMor { src: src.to_vec(), tgt: tgt.to_vec(), blocks }
    }

    pub fn identity(cat: &dyn Category, x: &[ObjId]) -> Self {
        let mut m = Self::zero(cat, x, x);
        for (i, &o) in x.iter().enumerate() {
            *m.block_mut(i, i) = cat.identity(o);
        }
        m
    }

    /// A single base morphism.
    pub fn single(x: ObjId, y: ObjId, f: Vec<Q>) -> Self {
        BlockMor { src: vec![x], tgt: vec![y], blocks: vec![f] }
    }

    pub fn block(&self, i: usize, j: usize) -> &Vec<Q> {
        &self.blocks[i * self.src.len() + j]
    }

    pub fn block_mut(&mut self, i: usize, j: usize) -> &mut Vec<Q> {
        let n = self.src.len();
        &mut self.blocks[i * n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(Zero::is_zero))
    }

    pub fn compose(&self, cat: &dyn Category, f: &BlockMor) -> Result<BlockMor, CatError> {
        if f.tgt != self.src {
            return Err(CatError::Shape(format!("compose {:?} after {:?}", self.src, f.tgt)));
        }
        let mut out = BlockMor::zero(cat, &f.src, &self.tgt);
        for (i, &z) in self.tgt.iter().enumerate() {
            for (j, &x) in f.src.iter().enumerate() {
                let acc = out.block_mut(i, j);
                for (k, &y) in self.src.iter().enumerate() {
                    let g = self.block(i, k);
                    let h = f.block(k, j);
                    if is_zero_vec(g) || is_zero_vec(h) {
                        continue;
                    }
                    add_into(acc, &cat.compose(x, y, z, g, h));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &BlockMor) -> Result<BlockMor, CatError> {
        if self.src != rhs.src || self.tgt != rhs.tgt {
            return Err(CatError::Shape("add".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.blocks.iter_mut().zip(&rhs.blocks) {
            add_into(a, b);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> BlockMor {
        let mut out = self.clone();
        for b in &mut out.blocks {
            for v in b.iter_mut() {
                *v = &*v * s;
            }
        }
        out
    }

    pub fn neg(&self) -> BlockMor {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, rhs: &BlockMor) -> Result<BlockMor, CatError> {
        self.add(&rhs.neg())
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, cat: &dyn Category, rhs: &BlockMor) -> BlockMor {
        let src: SumObj = self.src.iter().chain(&rhs.src).copied().collect();
        let tgt: SumObj = self.tgt.iter().chain(&rhs.tgt).copied().collect();
        let mut out = BlockMor::zero(cat, &src, &tgt);
        out.paste(self, 0, 0);
        out.paste(rhs, self.tgt.len(), self.src.len());
        out
    }

    /// `[self rhs]`: common target, concatenated sources.
    pub fn hcat(&self, cat: &dyn Category, rhs: &BlockMor) -> Result<BlockMor, CatError> {
        if self.tgt != rhs.tgt {
            return Err(CatError::Shape("hcat".into()));
        }
        let src: SumObj = self.src.iter().chain(&rhs.src).copied().collect();
        let mut out = BlockMor::zero(cat, &src, &self.tgt);
        out.paste(self, 0, 0);
        out.paste(rhs, 0, self.src.len());
        Ok(out)
    }

    /// `[self; rhs]`: common source, concatenated targets.
    pub fn vcat(&self, cat: &dyn Category, rhs: &BlockMor) -> Result<BlockMor, CatError> {
        if self.src != rhs.src {
            return Err(CatError::Shape("vcat".into()));
        }
        let tgt: SumObj = self.tgt.iter().chain(&rhs.tgt).copied().collect();
        let mut out = BlockMor::zero(cat, &self.src, &tgt);
        out.paste(self, 0, 0);
        out.paste(rhs, self.tgt.len(), 0);
        Ok(out)
    }

    /// Writes `m` with its top-left block at `(r0, c0)`.
    pub fn paste(&mut self, m: &BlockMor, r0: usize, c0: usize) {
        for i in 0..m.tgt.len() {
            for j in 0..m.src.len() {
                debug_assert_eq!(self.tgt[r0 + i], m.tgt[i]);
                debug_assert_eq!(self.src[c0 + j], m.src[j]);
                *self.block_mut(r0 + i, c0 + j) = m.block(i, j).clone();
            }
        }
    }

    /// Sub-block with target rows `r0..r0+nr` and source columns `c0..c0+nc`.
    pub fn sub_block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> BlockMor {
        let mut blocks = Vec::with_capacity(nr * nc);
        for i in r0..r0 + nr {
            for j in c0..c0 + nc {
                blocks.push(self.block(i, j).clone());
            }
        }
        BlockMor { src: self.src[c0..c0 + nc].to_vec(), tgt: self.tgt[r0..r0 + nr].to_vec(), blocks }
    }

    /// Tensor product; summands of `X ⊗ Y` are ordered with `X` outer.
    pub fn tensor(&self, cat: &dyn Category, rhs: &BlockMor) -> Result<BlockMor, CatError> {
        let src = tensor_sum(cat, &self.src, &rhs.src)?;
        let tgt = tensor_sum(cat, &self.tgt, &rhs.tgt)?;
        let mut out = BlockMor::zero(cat, &src, &tgt);
        let (ns, nt) = (rhs.src.len(), rhs.tgt.len());
        for (i, &x2) in self.tgt.iter().enumerate() {
            for (j, &x) in self.src.iter().enumerate() {
                let f = self.block(i, j);
                if is_zero_vec(f) {
                    continue;
                }
                for (k, &y2) in rhs.tgt.iter().enumerate() {
                    for (l, &y) in rhs.src.iter().enumerate() {
                        let g = rhs.block(k, l);
                        if is_zero_vec(g) {
                            continue;
                        }
                        *out.block_mut(i * nt + k, j * ns + l) = cat.tensor_mor(x, x2, y, y2, f, g)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `f^∨: Y^∨ -> X^∨`, summands dualized in place.
    pub fn dual(&self, cat: &dyn Category) -> Result<BlockMor, CatError> {
        let src = dual_sum(cat, &self.tgt)?;
        let tgt = dual_sum(cat, &self.src)?;
        let mut out = BlockMor::zero(cat, &src, &tgt);
        for (i, &y) in self.tgt.iter().enumerate() {
            for (j, &x) in self.src.iter().enumerate() {
                let f = self.block(i, j);
                if !is_zero_vec(f) {
                    *out.block_mut(j, i) = cat.dual_mor(x, y, f)?;
                }
            }
        }
        Ok(out)
    }

    /// Hom-basis coefficients of every block, concatenated.
    pub fn params(&self, cat: &dyn Category) -> Option<Vec<Q>> {
        let mut out = Vec::new();
        for (i, &y) in self.tgt.iter().enumerate() {
            for (j, &x) in self.src.iter().enumerate() {
                out.extend(cat.hom_coeffs(x, y, self.block(i, j))?);
            }
        }
        Some(out)
    }

    /// Flattened coordinates of every block, concatenated.
    pub fn coords(&self) -> Vec<Q> {
        self.blocks.iter().flatten().cloned().collect()
    }
}

/// Linear parameterization of `Hom(X, Y)` by hom-basis coefficients.
#[derive(Clone, Debug)]
pub struct HomParams {
    pub src: SumObj,
    pub tgt: SumObj,
    /// `(block index, offset, hom dim)` for each block.
    layout: Vec<(usize, usize, usize)>,
    dim: usize,
}

impl HomParams {
    pub fn new(cat: &dyn Category, src: &[ObjId], tgt: &[ObjId]) -> Self {
        let mut layout = Vec::new();
        let mut off = 0;
        for &y in tgt {
            for &x in src {
                let d = cat.hom_dim(x, y);
                layout.push((layout.len(), off, d));
                off += d;
            }
        }
        HomParams { src: src.to_vec(), tgt: tgt.to_vec(), layout, dim: off }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_mor(&self, cat: &dyn Category, p: &[Q]) -> BlockMor {
        assert_eq!(p.len(), self.dim);
        let mut out = BlockMor::zero(cat, &self.src, &self.tgt);
        let ns = self.src.len();
        for &(b, off, d) in &self.layout {
            if d == 0 || p[off..off + d].iter().all(Zero::is_zero) {
                continue;
            }
            let (i, j) = (b / ns, b % ns);
            let basis = cat.hom_basis(self.src[j], self.tgt[i]);
            out.blocks[b] = basis.mul_vec(&p[off..off + d]);
        }
        out
    }

    /// The morphism for the `k`-th basis parameter.
    pub fn basis_mor(&self, cat: &dyn Category, k: usize) -> BlockMor {
        let mut p = vec![Q::zero(); self.dim];
        p[k] = Q::one();
        self.to_mor(cat, &p)
    }

    pub fn basis(&self, cat: &dyn Category) -> Vec<BlockMor> {
        (0..self.dim).map(|k| self.basis_mor(cat, k)).collect()
    }
}

pub fn tensor_sum(cat: &dyn Category, x: &[ObjId], y: &[ObjId]) -> Result<SumObj, CatError> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for &a in x {
        for &b in y {
            out.push(cat.tensor_obj(a, b)?);
        }
    }
    Ok(out)
}

pub fn dual_sum(cat: &dyn Category, x: &[ObjId]) -> Result<SumObj, CatError> {
    x.iter().map(|&a| cat.dual_obj(a)).collect()
}

/// `σ: X ⊗ Y -> Y ⊗ X` on sums.
pub fn symmetry_sum(cat: &dyn Category, x: &[ObjId], y: &[ObjId]) -> Result<BlockMor, CatError> {
    let src = tensor_sum(cat, x, y)?;
    let tgt = tensor_sum(cat, y, x)?;
    let mut out = BlockMor::zero(cat, &src, &tgt);
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in y.iter().enumerate() {
            *out.block_mut(j * x.len() + i, i * y.len() + j) = cat.symmetry(a, b)?;
        }
    }
    Ok(out)
}

/// `ev: X^∨ ⊗ X -> 𝟙` on sums.
pub fn ev_sum(cat: &dyn Category, x: &[ObjId]) -> Result<BlockMor, CatError> {
    let src = tensor_sum(cat, &dual_sum(cat, x)?, x)?;
    let mut out = BlockMor::zero(cat, &src, &[cat.unit()]);
    for (i, &a) in x.iter().enumerate() {
        *out.block_mut(0, i * x.len() + i) = cat.ev(a)?;
    }
    Ok(out)
}

/// `coev: 𝟙 -> X ⊗ X^∨` on sums.
pub fn coev_sum(cat: &dyn Category, x: &[ObjId]) -> Result<BlockMor, CatError> {
    let tgt = tensor_sum(cat, x, &dual_sum(cat, x)?)?;
    let mut out = BlockMor::zero(cat, &[cat.unit()], &tgt);
    for (i, &a) in x.iter().enumerate() {
        *out.block_mut(i * x.len() + i, 0) = cat.coev(a)?;
    }
    Ok(out)
}

/// Block-structured basis of `Hom(X, Y)` between formal sums.
pub fn hom_space(cat: &dyn Category, x: &FormalSum, y: &FormalSum) -> Result<Vec<BlockMor>, CatError> {
    let (xs, ys) = (x.expand(cat)?, y.expand(cat)?);
    Ok(HomParams::new(cat, &xs, &ys).basis(cat))
}

pub(crate) fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub(crate) fn add_into(acc: &mut [Q], v: &[Q]) {
    debug_assert_eq!(acc.len(), v.len());
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;

    fn table(d: TableData) -> TablePresentation {
        TablePresentation::new(d).unwrap()
    }

    fn all(cat: &dyn Category) -> Vec<ObjId> {
        (0..cat.num_objects()).collect()
    }

    fn short_words(cat: &ConcretePresentation) -> Vec<ObjId> {
        (0..=cat.generators().len()).collect()
    }

    #[test]
    fn point_validates() {
        let p = table(datasets::point_category());
        assert!(validate_presentation(&p, &all(&p)).passed());
        assert_eq!(hom_space(&p, &FormalSum(vec![("1".into(), 1)]), &FormalSum(vec![("1".into(), 1)])).unwrap().len(), 1);
    }

    #[test]
    fn broken_unit_is_reported() {
        let mut d = datasets::point_category();
        d.compose[0].value = vec!["2".into()];
        let p = table(d);
        let rep = validate_presentation(&p, &all(&p));
        assert!(rep.violations.iter().any(|v| v.axiom == "unitality"));
    }

    #[test]
    fn rep_z2_tables() {
        let p = table(datasets::rep_z2_category());
        assert!(validate_presentation(&p, &all(&p)).passed());
        let (t, s) = (p.lookup("triv").unwrap(), p.lookup("sign").unwrap());
        // the four tensor entries
        assert_eq!(p.tensor_obj(t, t).unwrap(), t);
        assert_eq!(p.tensor_obj(t, s).unwrap(), s);
        assert_eq!(p.tensor_obj(s, t).unwrap(), s);
        assert_eq!(p.tensor_obj(s, s).unwrap(), t);
        assert_eq!(p.hom_dim(t, s), 0);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let mut d = datasets::point_category();
        d.identity[0].value = vec!["1".into(), "0".into()];
        assert!(matches!(TablePresentation::new(d), Err(CatError::Malformed(_))));
        let mut d = datasets::point_category();
        d.unit = "nope".into();
        assert!(matches!(TablePresentation::new(d), Err(CatError::UnknownObject(_))));
    }

    #[test]
    fn additive_hom_dims() {
        let c = ConcretePresentation::new(datasets::curve_category()).unwrap();
        let x = FormalSum(vec![("X".into(), 1)]);
        let xx = FormalSum(vec![("X".into(), 2)]);
        let end = c.hom_dim(c.lookup("X").unwrap(), c.lookup("X").unwrap());
        assert_eq!(end, 1 + 2 * 2 + 1);
        assert_eq!(hom_space(&c, &x, &xx).unwrap().len(), 2 * end);
        let unit = FormalSum(vec![("1".into(), 1)]);
        // only degree 0 meets
        assert_eq!(hom_space(&c, &x, &unit).unwrap().len(), 1);
        assert!(hom_space(&c, &FormalSum(vec![("Y".into(), 1)]), &unit).is_err());
    }

    #[test]
    fn concrete_datasets_validate() {
        for d in [
            datasets::graded_line_category(),
            datasets::curve_category(),
            datasets::unipotent_category(),
        ] {
            let c = ConcretePresentation::new(d).unwrap();
            let rep = validate_presentation(&c, &short_words(&c));
            assert!(rep.passed(), "{}: {:?}", c.name(), rep.violations);
        }
    }

    #[test]
    fn unipotent_homs() {
        let c = ConcretePresentation::new(datasets::unipotent_category()).unwrap();
        let (v, u, one) = (c.lookup("V").unwrap(), c.lookup("U").unwrap(), c.unit());
        assert_eq!(c.hom_dim(v, v), 2);
        assert_eq!(c.hom_dim(one, v), 1);
        assert_eq!(c.hom_dim(v, one), 1);
        assert_eq!(c.hom_dim(u, u), 1);
        let vd = c.dual_obj(v).unwrap();
        assert_eq!(c.label(vd), "Vd");
        assert_eq!(c.hom_dim(c.tensor_obj(vd, v).unwrap(), one), 2);
    }

    #[test]
    fn generic_dual_matches_transpose() {
        let c = ConcretePresentation::new(datasets::curve_category()).unwrap();
        let x = c.lookup("X").unwrap();
        for f in c.hom_basis(x, x).columns() {
            let fast = c.dual_mor(x, x, &f).unwrap();
            let xd = c.dual_obj(x).unwrap();
            let slow = {
                let xxd = c.tensor_obj(x, xd).unwrap();
                let s1 = c.tensor_obj(xd, xxd).unwrap();
                let s2 = c.tensor_obj(c.tensor_obj(xd, x).unwrap(), xd).unwrap();
                let a = c.tensor_mor(xd, xd, 0, xxd, &c.identity(xd), &c.coev(x).unwrap()).unwrap();
                let fx = c.tensor_mor(xd, xd, x, x, &c.identity(xd), &f).unwrap();
                let xdx = c.tensor_obj(xd, x).unwrap();
                let b = c.tensor_mor(xdx, xdx, xd, xd, &fx, &c.identity(xd)).unwrap();
                let e = c.tensor_mor(xdx, 0, xd, xd, &c.ev(x).unwrap(), &c.identity(xd)).unwrap();
                let ab = c.compose(xd, s1, s2, &b, &a);
                c.compose(xd, s2, xd, &e, &ab)
            };
            assert_eq!(fast, slow);
        }
    }
}
