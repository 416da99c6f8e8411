//! Bounded chain complexes over a presentation (homological grading,
//! `d_n: X_n -> X_{n-1}`) and chain maps.

mod hom;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use thiserror::Error;

use crate::category::{
    coev_sum, dual_sum, ev_sum, tensor_sum, BlockMor, CatError, Category, HomParams, ObjId, SumObj,
};
use crate::linalg::{Matrix, Q};

pub use hom::{
    apply_kunneth, combine, factor_before, factor_before_with, factor_through, factor_through_with, homotopy_pullback, induced_map, is_h_epi, is_h_iso, kb_hom, same_strength, verify_sigma_exact, ChainParams,
    HComplex, Homology, KbHom, KbSource, SameStrength, SigmaReport, SigmaRow, StrengthWitness, Triangle,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("differential out of degree {0} has the wrong shape")]
    Shape(i64),
    #[error("d∘d is nonzero out of degree {0}")]
    NotComplex(i64),
    #[error("component in degree {0} is not a morphism of the presentation")]
    NotAdmissible(i64),
    #[error("map does not commute with differentials in degree {0}")]
    NotChainMap(i64),
    #[error(transparent)]
    Cat(#[from] CatError),
}

pub(crate) fn sign(n: i64) -> Q {
    if n.rem_euclid(2) == 0 { Q::one() } else { -Q::one() }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Complex {
    terms: BTreeMap<i64, SumObj>,
    /// Keyed by source degree.
    diffs: BTreeMap<i64, BlockMor>,
}

impl Complex {
    /// Validated complex; empty terms and zero differentials are dropped.
    pub fn new(
        cat: &dyn Category,
        terms: BTreeMap<i64, SumObj>,
        diffs: BTreeMap<i64, BlockMor>,
    ) -> Result<Self, ComplexError> {
        let x = Self::unchecked(terms, diffs);
        x.check(cat)?;
        Ok(x)
    }

    pub(crate) fn unchecked(mut terms: BTreeMap<i64, SumObj>, mut diffs: BTreeMap<i64, BlockMor>) -> Self {
        terms.retain(|_, t| !t.is_empty());
        diffs.retain(|_, d| !d.src.is_empty() && !d.tgt.is_empty() && !d.is_zero());
        Complex { terms, diffs }
    }

    pub fn check(&self, cat: &dyn Category) -> Result<(), ComplexError> {
        for (&n, d) in &self.diffs {
            if d.src != self.term(n) || d.tgt != self.term(n - 1) {
                return Err(ComplexError::Shape(n));
            }
            if d.params(cat).is_none() {
                return Err(ComplexError::NotAdmissible(n));
            }
        }
        for (&n, d) in &self.diffs {
            if let Some(e) = self.diffs.get(&(n - 1)) {
                if !e.compose(cat, d)?.is_zero() {
                    return Err(ComplexError::NotComplex(n));
                }
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// A direct sum of base objects placed in chain degree `deg`.
    pub fn object(x: &[ObjId], deg: i64) -> Self {
        Self::unchecked(BTreeMap::from([(deg, x.to_vec())]), BTreeMap::new())
    }

    pub fn unit(cat: &dyn Category) -> Self {
        Self::object(&[cat.unit()], 0)
    }

    /// Two-term complex `x_1 --f--> x_0` in degrees `deg + 1`, `deg`.
    pub fn two_term(cat: &dyn Category, f: &BlockMor, deg: i64) -> Result<Self, ComplexError> {
        Self::new(
            cat,
            BTreeMap::from([(deg + 1, f.src.clone()), (deg, f.tgt.clone())]),
            BTreeMap::from([(deg + 1, f.clone())]),
        )
    }

    pub fn term(&self, n: i64) -> &[ObjId] {
        self.terms.get(&n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn terms(&self) -> &BTreeMap<i64, SumObj> {
        &self.terms
    }

    pub fn d(&self, cat: &dyn Category, n: i64) -> BlockMor {
        self.diffs.get(&n).cloned().unwrap_or_else(|| BlockMor::zero(cat, self.term(n), self.term(n - 1)))
    }

    pub fn diffs(&self) -> &BTreeMap<i64, BlockMor> {
        &self.diffs
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn range(&self) -> Option<(i64, i64)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `X[k]_n = X_{n-k}` with differential multiplied by `(-1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        let s = sign(k);
        Self::unchecked(
            self.terms.iter().map(|(n, t)| (n + k, t.clone())).collect(),
            self.diffs.iter().map(|(n, d)| (n + k, d.scale(&s))).collect(),
        )
    }

    pub fn direct_sum(&self, cat: &dyn Category, other: &Complex) -> Self {
        let degs: BTreeSet<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        let terms = degs
            .iter()
            .map(|&n| (n, self.term(n).iter().chain(other.term(n)).copied().collect()))
            .collect();
        let diffs = degs
            .iter()
            .map(|&n| (n, self.d(cat, n).direct_sum(cat, &other.d(cat, n))))
            .collect();
        Self::unchecked(terms, diffs)
    }

    /// Summand positions of `X_p ⊗ Y_q` inside `(X ⊗ Y)_{p+q}`: `p -> offset`.
    pub(crate) fn tensor_layout(&self, other: &Complex, n: i64) -> Vec<(i64, usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for (&p, xp) in &self.terms {
            let yq = other.term(n - p);
            if yq.is_empty() {
                continue;
            }
            let len = xp.len() * yq.len();
            out.push((p, off, len));
            off += len;
        }
        out
    }

    pub fn tensor(&self, cat: &dyn Category, other: &Complex) -> Result<Self, ComplexError> {
        let mut degs = BTreeSet::new();
        for p in self.terms.keys() {
            for q in other.terms.keys() {
                degs.insert(p + q);
            }
        }
        let mut terms = BTreeMap::new();
        for &n in &degs {
            let mut t = Vec::new();
            for (p, _, _) in self.tensor_layout(other, n) {
                t.extend(tensor_sum(cat, self.term(p), other.term(n - p))?);
            }
            terms.insert(n, t);
        }
        let empty = Vec::new();
        let mut diffs = BTreeMap::new();
        for &n in &degs {
            let src = terms.get(&n).unwrap_or(&empty);
            let tgt = terms.get(&(n - 1)).unwrap_or(&empty);
            let mut d = BlockMor::zero(cat, src, tgt);
            let tl = self.tensor_layout(other, n - 1);
            let pos = |p: i64| tl.iter().find(|e| e.0 == p).map(|e| e.1);
            for (p, off, _) in self.tensor_layout(other, n) {
                let q = n - p;
                let (xp, yq) = (self.term(p), other.term(q));
                if let Some(o) = pos(p - 1) {
                    let a = self.d(cat, p).tensor(cat, &BlockMor::identity(cat, yq))?;
                    d.paste(&a, o, off);
                }
                if let Some(o) = pos(p) {
                    let b = BlockMor::identity(cat, xp).tensor(cat, &other.d(cat, q))?.scale(&sign(p));
                    d.paste(&b, o, off);
                }
            }
            diffs.insert(n, d);
        }
        Ok(Self::unchecked(terms, diffs))
    }

    /// `(X^∨)_n = (X_{-n})^∨` with differential `(-1)^{n+1} (d_{1-n})^∨`.
    pub fn dual(&self, cat: &dyn Category) -> Result<Self, ComplexError> {
        let mut terms = BTreeMap::new();
        for (&n, t) in &self.terms {
            terms.insert(-n, dual_sum(cat, t)?);
        }
        let mut diffs = BTreeMap::new();
        for (&m, d) in &self.diffs {
            // d_m: X_m -> X_{m-1} dualizes to degree n = 1 - m
            let n = 1 - m;
            diffs.insert(n, d.dual(cat)?.scale(&sign(n + 1)));
        }
        Ok(Self::unchecked(terms, diffs))
    }

    pub fn identity(&self, cat: &dyn Category) -> ChainMap {
        ChainMap::identity(cat, self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainMap {
    pub src: Complex,
    pub tgt: Complex,
    comps: BTreeMap<i64, BlockMor>,
}

impl ChainMap {
    pub fn new(
        cat: &dyn Category,
        src: &Complex,
        tgt: &Complex,
        comps: BTreeMap<i64, BlockMor>,
    ) -> Result<Self, ComplexError> {
        let f = Self::unchecked(src, tgt, comps);
        f.check(cat)?;
        Ok(f)
    }

    pub(crate) fn unchecked(src: &Complex, tgt: &Complex, mut comps: BTreeMap<i64, BlockMor>) -> Self {
        comps.retain(|_, c| !c.src.is_empty() && !c.tgt.is_empty() && !c.is_zero());
        ChainMap { src: src.clone(), tgt: tgt.clone(), comps }
    }

    pub fn check(&self, cat: &dyn Category) -> Result<(), ComplexError> {
        for (&n, c) in &self.comps {
            if c.src != self.src.term(n) || c.tgt != self.tgt.term(n) {
                return Err(ComplexError::Shape(n));
            }
            if c.params(cat).is_none() {
                return Err(ComplexError::NotAdmissible(n));
            }
        }
        for n in self.src_degrees_plus_one() {
            let lhs = self.tgt.d(cat, n).compose(cat, &self.comp(cat, n))?;
            let rhs = self.comp(cat, n - 1).compose(cat, &self.src.d(cat, n))?;
            if lhs != rhs {
                return Err(ComplexError::NotChainMap(n));
            }
        }
        Ok(())
    }

    fn src_degrees_plus_one(&self) -> BTreeSet<i64> {
        self.src.terms.keys().flat_map(|&n| [n, n + 1]).collect()
    }

    pub fn zero(src: &Complex, tgt: &Complex) -> Self {
        Self::unchecked(src, tgt, BTreeMap::new())
    }

    pub fn identity(cat: &dyn Category, x: &Complex) -> Self {
        let comps = x.terms.iter().map(|(&n, t)| (n, BlockMor::identity(cat, t))).collect();
        Self::unchecked(x, x, comps)
    }

    pub fn comp(&self, cat: &dyn Category, n: i64) -> BlockMor {
        self.comps
            .get(&n)
            .cloned()
            .unwrap_or_else(|| BlockMor::zero(cat, self.src.term(n), self.tgt.term(n)))
    }

    pub fn comps(&self) -> &BTreeMap<i64, BlockMor> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `self ∘ f`.
    pub fn compose(&self, cat: &dyn Category, f: &ChainMap) -> Result<ChainMap, ComplexError> {
        if f.tgt != self.src {
            return Err(CatError::Shape("chain map composition".into()).into());
        }
        let mut comps = BTreeMap::new();
        for &n in f.src.terms.keys() {
            comps.insert(n, self.comp(cat, n).compose(cat, &f.comp(cat, n))?);
        }
        Ok(Self::unchecked(&f.src, &self.tgt, comps))
    }

    pub fn add(&self, cat: &dyn Category, g: &ChainMap) -> Result<ChainMap, ComplexError> {
        if self.src != g.src || self.tgt != g.tgt {
            return Err(CatError::Shape("chain map sum".into()).into());
        }
        let mut comps = BTreeMap::new();
        for &n in self.src.terms.keys() {
            comps.insert(n, self.comp(cat, n).add(&g.comp(cat, n))?);
        }
        Ok(Self::unchecked(&self.src, &self.tgt, comps))
    }

    pub fn scale(&self, s: &Q) -> ChainMap {
        let comps = self.comps.iter().map(|(&n, c)| (n, c.scale(s))).collect();
        Self::unchecked(&self.src, &self.tgt, comps)
    }

    pub fn sub(&self, cat: &dyn Category, g: &ChainMap) -> Result<ChainMap, ComplexError> {
        self.add(cat, &g.scale(&-Q::one()))
    }

    pub fn shift(&self, k: i64) -> ChainMap {
        let comps = self.comps.iter().map(|(&n, c)| (n + k, c.clone())).collect();
        Self::unchecked(&self.src.shift(k), &self.tgt.shift(k), comps)
    }

    pub fn tensor(&self, cat: &dyn Category, g: &ChainMap) -> Result<ChainMap, ComplexError> {
        let src = self.src.tensor(cat, &g.src)?;
        let tgt = self.tgt.tensor(cat, &g.tgt)?;
        let mut comps = BTreeMap::new();
        for &n in src.terms.keys() {
            let mut c = BlockMor::zero(cat, src.term(n), tgt.term(n));
            let tl = self.tgt.tensor_layout(&g.tgt, n);
            for (p, off, _) in self.src.tensor_layout(&g.src, n) {
                if let Some(&(_, o, _)) = tl.iter().find(|e| e.0 == p) {
                    let b = self.comp(cat, p).tensor(cat, &g.comp(cat, n - p))?;
                    c.paste(&b, o, off);
                }
            }
            comps.insert(n, c);
        }
        Ok(Self::unchecked(&src, &tgt, comps))
    }

    /// `f^∨: Y^∨ -> X^∨`.
    pub fn dual(&self, cat: &dyn Category) -> Result<ChainMap, ComplexError> {
        let src = self.tgt.dual(cat)?;
        let tgt = self.src.dual(cat)?;
        let mut comps = BTreeMap::new();
        for (&n, c) in &self.comps {
            comps.insert(-n, c.dual(cat)?);
        }
        Ok(Self::unchecked(&src, &tgt, comps))
    }

    /// `[f g]: X ⊕ Z -> Y` for maps with a common target.
    pub fn hcat(&self, cat: &dyn Category, g: &ChainMap) -> Result<ChainMap, ComplexError> {
        if self.tgt != g.tgt {
            return Err(CatError::Shape("hcat".into()).into());
        }
        let src = self.src.direct_sum(cat, &g.src);
        let mut comps = BTreeMap::new();
        for &n in src.terms.keys() {
            comps.insert(n, self.comp(cat, n).hcat(cat, &g.comp(cat, n))?);
        }
        Ok(Self::unchecked(&src, &self.tgt, comps))
    }

    /// `[f; g]: X -> Y ⊕ Z` for maps with a common source.
    pub fn vcat(&self, cat: &dyn Category, g: &ChainMap) -> Result<ChainMap, ComplexError> {
        if self.src != g.src {
            return Err(CatError::Shape("vcat".into()).into());
        }
        let tgt = self.tgt.direct_sum(cat, &g.tgt);
        let mut comps = BTreeMap::new();
        for &n in self.src.terms.keys() {
            comps.insert(n, self.comp(cat, n).vcat(cat, &g.comp(cat, n))?);
        }
        Ok(Self::unchecked(&self.src, &tgt, comps))
    }

    pub fn direct_sum(&self, cat: &dyn Category, g: &ChainMap) -> ChainMap {
        let src = self.src.direct_sum(cat, &g.src);
        let tgt = self.tgt.direct_sum(cat, &g.tgt);
        let comps = src
            .terms
            .keys()
            .map(|&n| (n, self.comp(cat, n).direct_sum(cat, &g.comp(cat, n))))
            .collect();
        Self::unchecked(&src, &tgt, comps)
    }
}

/// Inclusion of the `i`-th summand `X_i -> X_0 ⊕ X_1`.
pub fn injection(cat: &dyn Category, x0: &Complex, x1: &Complex, i: usize) -> ChainMap {
    let sum = x0.direct_sum(cat, x1);
    let a = ChainMap::identity(cat, if i == 0 { x0 } else { x1 });
    let z = ChainMap::zero(if i == 0 { x0 } else { x1 }, if i == 0 { x1 } else { x0 });
    let f = if i == 0 { a.vcat(cat, &z) } else { z.vcat(cat, &a) }.expect("same source");
    debug_assert_eq!(f.tgt, sum);
    f
}

/// Projection `X_0 ⊕ X_1 -> X_i`.
pub fn projection(cat: &dyn Category, x0: &Complex, x1: &Complex, i: usize) -> ChainMap {
    let a = ChainMap::identity(cat, if i == 0 { x0 } else { x1 });
    let z = ChainMap::zero(if i == 0 { x1 } else { x0 }, if i == 0 { x0 } else { x1 });
    if i == 0 { a.hcat(cat, &z) } else { z.hcat(cat, &a) }.expect("same target")
}

/// Mapping cone with its triangle maps `Y -> cone(f)` and `cone(f) -> X[1]`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub cone: Complex,
    pub incl: ChainMap,
    pub proj: ChainMap,
}

/// `cone(f)_n = X_{n-1} ⊕ Y_n` with differential `[[-d_X, 0], [-f, d_Y]]`.
pub fn cone(cat: &dyn Category, f: &ChainMap) -> Result<Cone, ComplexError> {
    let (x, y) = (&f.src, &f.tgt);
    let degs: BTreeSet<i64> = x.terms.keys().map(|n| n + 1).chain(y.terms.keys().copied()).collect();
    let mut terms = BTreeMap::new();
    for &n in &degs {
        terms.insert(n, x.term(n - 1).iter().chain(y.term(n)).copied().collect::<Vec<_>>());
    }
    let mut diffs = BTreeMap::new();
    for &n in &degs {
        let a = x.term(n - 1).len();
        let src: SumObj = x.term(n - 1).iter().chain(y.term(n)).copied().collect();
        let tgt: SumObj = x.term(n - 2).iter().chain(y.term(n - 1)).copied().collect();
        let mut d = BlockMor::zero(cat, &src, &tgt);
        d.paste(&x.d(cat, n - 1).neg(), 0, 0);
        d.paste(&f.comp(cat, n - 1).neg(), x.term(n - 2).len(), 0);
        d.paste(&y.d(cat, n), x.term(n - 2).len(), a);
        diffs.insert(n, d);
    }
    let c = Complex::unchecked(terms, diffs);
    let mut incl = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for &n in &degs {
        let xs = x.term(n - 1);
        let ys = y.term(n);
        let full: SumObj = xs.iter().chain(ys).copied().collect();
        let mut i = BlockMor::zero(cat, ys, &full);
        i.paste(&BlockMor::identity(cat, ys), xs.len(), 0);
        incl.insert(n, i);
        let mut p = BlockMor::zero(cat, &full, xs);
        p.paste(&BlockMor::identity(cat, xs), 0, 0);
        proj.insert(n, p);
    }
    Ok(Cone {
        incl: ChainMap::unchecked(y, &c, incl),
        proj: ChainMap::unchecked(&c, &x.shift(1), proj),
        cone: c,
    })
}

/// `ev: X^∨ ⊗ X -> 𝟙` as a chain map.
pub fn ev_complex(cat: &dyn Category, x: &Complex) -> Result<ChainMap, ComplexError> {
    let src = x.dual(cat)?.tensor(cat, x)?;
    let tgt = Complex::unit(cat);
    let mut c = BlockMor::zero(cat, src.term(0), tgt.term(0));
    let layout = x.dual(cat)?.tensor_layout(x, 0);
    for (q, o, len) in layout {
        let xp = x.term(-q);
        let e = ev_sum(cat, xp)?;
        debug_assert_eq!(e.src.len(), len);
        c.paste(&e, 0, o);
    }
    Ok(ChainMap::unchecked(&src, &tgt, BTreeMap::from([(0, c)])))
}

/// `coev: 𝟙 -> X ⊗ X^∨` as a chain map.
pub fn coev_complex(cat: &dyn Category, x: &Complex) -> Result<ChainMap, ComplexError> {
    let xd = x.dual(cat)?;
    let tgt = x.tensor(cat, &xd)?;
    let src = Complex::unit(cat);
    let mut c = BlockMor::zero(cat, src.term(0), tgt.term(0));
    for (p, o, len) in x.tensor_layout(&xd, 0) {
        let e = coev_sum(cat, x.term(p))?;
        debug_assert_eq!(e.tgt.len(), len);
        c.paste(&e, o, 0);
    }
    Ok(ChainMap::unchecked(&src, &tgt, BTreeMap::from([(0, c)])))
}

/// Matrix of a linear map given by its values on the standard basis.
pub(crate) fn linear_matrix(dim_in: usize, dim_out: usize, eval: impl Fn(usize) -> Vec<Q>) -> Matrix {
    let cols: Vec<Vec<Q>> = (0..dim_in).map(eval).collect();
    debug_assert!(cols.iter().all(|c| c.len() == dim_out));
    Matrix::from_columns(dim_out, &cols)
}

/// Parameters of `Hom(X_n, Y_{n+shift})` for every `n`, concatenated.
pub(crate) fn hom_params_by_degree(
    cat: &dyn Category,
    x: &Complex,
    y: &Complex,
    shift: i64,
) -> Vec<(i64, HomParams, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    for (&n, xn) in &x.terms {
        let ym = y.term(n + shift);
        if ym.is_empty() {
            continue;
        }
        let p = HomParams::new(cat, xn, ym);
        let d = p.dim();
        out.push((n, p, off));
        off += d;
    }
    out
}
