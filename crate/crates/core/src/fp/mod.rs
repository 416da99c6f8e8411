//! Finitely presented presheaves over the homotopy category and the graded
//! fiber functor on them. Objects are presentations `d: X1 -> X0`; a
//! morphism is a class `g0: X0 -> Y0` with `g0 ∘ d ≃ e ∘ g1` for some `g1`.

mod calculus;
mod cert;
mod roof;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::category::{BlockMor, Cat, CatError, Category, ConcretePresentation, ObjId};
use crate::complex::{
    apply_kunneth, combine, factor_before_with, factor_through_with, induced_map, kb_hom, ChainMap, Complex,
    ComplexError, HComplex, KbHom,
};
use crate::functor::{h_block, Fiber, Functor};
use crate::graded::{Bidegree, GradedMap, GradedSpace};
use crate::linalg::{Matrix, Subquotient, Q};

pub use calculus::{
    dual_fp, fp_cokernel, fp_direct_sum, fp_image, fp_kernel, fp_pushout, reassociate, split_idempotent, tensor_fp,
    tensor_fp_mor, zig_zags, dual_obj, Cokernel, Image, Kernel, Split, ZigZags,
};
pub use cert::{dual_fp_morphism, replay, Cert, MMorphism, ReplayError};
pub use roof::{
    compose_roofs, m_hom_bounds, roof_matrix, roof_to_morphism, semisimplicity_certificate, CoverSet, HomBounds, RoofMorphism,
    SemisimplicityCertificate, UpperBound,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FpError {
    #[error("g0 ∘ d does not factor through the target presentation")]
    NotFactorizable,
    #[error("objects do not match: {0}")]
    Shape(String),
    #[error("morphism is not idempotent")]
    NotIdempotent,
    #[error("H(w) is not invertible")]
    NotHIso,
    #[error("map is not an H-epimorphism")]
    NotHEpi,
    #[error("functors are not of the same strength")]
    NotSameStrength,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cat(#[from] CatError),
}

/// A category with its fiber functor, plus caches shared by the calculus.
pub struct Ctx {
    pub cat: Cat,
    pub h: Functor,
    /// Set when the category is a word category.
    pub concrete: Option<Arc<ConcretePresentation>>,
    kb: Mutex<HashMap<(Complex, Complex), Arc<KbHom>>>,
    fibers: Mutex<HashMap<ChainMap, Arc<FiberSpace>>>,
}

impl std::fmt::Debug for Ctx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ctx").field("cat", &self.cat.name()).finish()
    }
}

impl Ctx {
    pub fn new(cat: Cat, h: Functor) -> Self {
        Ctx { cat, h, concrete: None, kb: Mutex::default(), fibers: Mutex::default() }
    }

    pub fn with_concrete(cat: Arc<ConcretePresentation>, h: Functor) -> Self {
        let mut c = Ctx::new(cat.clone(), h);
        c.concrete = Some(cat);
        c
    }

    /// Object of the word `label`.
    pub fn obj(&self, label: &str) -> Result<ObjId, CatError> {
        self.cat.lookup(label).ok_or_else(|| CatError::UnknownObject(label.into()))
    }

    /// The complex with `label` in degree 0.
    pub fn complex(&self, label: &str) -> Result<Complex, CatError> {
        Ok(Complex::object(&[self.obj(label)?], 0))
    }

    /// Chain map in degree 0 between two words given by its full carrier matrix.
    pub fn carrier_map(&self, x: &str, y: &str, m: &Matrix) -> Result<ChainMap, FpError> {
        let conc = self.concrete.as_ref().ok_or_else(|| FpError::Shape("not a word category".into()))?;
        let (a, b) = (self.obj(x)?, self.obj(y)?);
        let coords = conc.from_total(a, b, m);
        if conc.to_total(a, b, &coords) != *m {
            return Err(FpError::Shape(format!("{x} -> {y}: matrix is not degree preserving")));
        }
        if self.cat.hom_coeffs(a, b, &coords).is_none() {
            return Err(FpError::Shape(format!("{x} -> {y}: matrix does not commute with the operators")));
        }
        Ok(ChainMap::new(self.cat(), &Complex::object(&[a], 0), &Complex::object(&[b], 0), BTreeMap::from([(0, BlockMor::single(a, b, coords))]))?)
    }

    pub fn cat(&self) -> &dyn Category {
        &*self.cat
    }

    pub fn h(&self) -> &dyn Fiber {
        &*self.h
    }

    pub fn kb_hom(&self, x: &Complex, y: &Complex) -> Arc<KbHom> {
        let key = (x.clone(), y.clone());
        if let Some(k) = self.kb.lock().unwrap().get(&key) {
            return k.clone();
        }
        let k = Arc::new(kb_hom(self.cat(), x, y));
        self.kb.lock().unwrap().insert(key, k.clone());
        k
    }

    /// `c` with `b ∘ c ≃ a`.
    pub fn factor_through(&self, b: &ChainMap, a: &ChainMap) -> Option<ChainMap> {
        factor_through_with(self.cat(), &|x, y| self.kb_hom(x, y), b, a)
    }

    /// `c` with `c ∘ b ≃ a`.
    pub fn factor_before(&self, b: &ChainMap, a: &ChainMap) -> Option<ChainMap> {
        factor_before_with(self.cat(), &|x, y| self.kb_hom(x, y), b, a)
    }

    pub fn is_null_homotopic(&self, f: &ChainMap) -> bool {
        f.is_zero() || self.kb_hom(&f.src, &f.tgt).null_homotopy(self.cat(), f).is_some()
    }

    pub fn homology(&self, x: &Complex) -> crate::complex::Homology {
        apply_kunneth(self.h(), self.cat(), x)
    }

    pub fn is_h_iso(&self, f: &ChainMap) -> bool {
        self.homology(&f.src).map_to(&self.homology(&f.tgt), self.h(), f).is_iso()
    }

    pub fn is_h_epi(&self, f: &ChainMap) -> bool {
        self.homology(&f.src).map_to(&self.homology(&f.tgt), self.h(), f).is_surjective()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPresheaf {
    pub d: ChainMap,
}

pub type Obj = Arc<FpPresheaf>;

impl FpPresheaf {
    pub fn new(cat: &dyn Category, d: ChainMap) -> Result<Obj, FpError> {
        d.src.check(cat)?;
        d.tgt.check(cat)?;
        d.check(cat)?;
        Ok(Arc::new(FpPresheaf { d }))
    }

    pub fn x1(&self) -> &Complex {
        &self.d.src
    }

    pub fn x0(&self) -> &Complex {
        &self.d.tgt
    }

    pub fn is_representable(&self) -> bool {
        self.x1().is_zero()
    }
}

/// `[X]`: the presentation `0 -> X`.
pub fn bracket(x: &Complex) -> Obj {
    Arc::new(FpPresheaf { d: ChainMap::zero(&Complex::zero(), x) })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMorphism {
    pub src: Obj,
    pub tgt: Obj,
    pub g0: ChainMap,
    /// `g0 ∘ d_src ≃ d_tgt ∘ g1`.
    pub g1: ChainMap,
}

impl FpMorphism {
    pub fn new(ctx: &Ctx, src: &Obj, tgt: &Obj, g0: ChainMap) -> Result<Self, FpError> {
        if g0.src != *src.x0() || g0.tgt != *tgt.x0() {
            return Err(FpError::Shape("g0 must map X0 to Y0".into()));
        }
        let cat = ctx.cat();
        g0.check(cat)?;
        let a = g0.compose(cat, &src.d)?;
        let g1 = ctx.factor_through(&tgt.d, &a).ok_or(FpError::NotFactorizable)?;
        Ok(FpMorphism { src: src.clone(), tgt: tgt.clone(), g0, g1 })
    }

    /// Both components supplied; the square is checked.
    pub fn with_witness(ctx: &Ctx, src: &Obj, tgt: &Obj, g0: ChainMap, g1: ChainMap) -> Result<Self, FpError> {
        let cat = ctx.cat();
        g0.check(cat)?;
        g1.check(cat)?;
        let lhs = g0.compose(cat, &src.d)?;
        let rhs = tgt.d.compose(cat, &g1)?;
        let diff = lhs.sub(cat, &rhs)?;
        if !ctx.is_null_homotopic(&diff) {
            return Err(FpError::NotFactorizable);
        }
        Ok(FpMorphism { src: src.clone(), tgt: tgt.clone(), g0, g1 })
    }

    pub fn identity(cat: &dyn Category, f: &Obj) -> Self {
        FpMorphism { src: f.clone(), tgt: f.clone(), g0: f.x0().identity(cat), g1: f.x1().identity(cat) }
    }

    pub fn zero(src: &Obj, tgt: &Obj) -> Self {
        FpMorphism {
            src: src.clone(),
            tgt: tgt.clone(),
            g0: ChainMap::zero(src.x0(), tgt.x0()),
            g1: ChainMap::zero(src.x1(), tgt.x1()),
        }
    }

    /// `[f]` for a chain map.
    pub fn bracket(f: &ChainMap) -> Self {
        FpMorphism {
            src: bracket(&f.src),
            tgt: bracket(&f.tgt),
            g0: f.clone(),
            g1: ChainMap::zero(&Complex::zero(), &Complex::zero()),
        }
    }

    /// `self ∘ f`.
    pub fn compose(&self, cat: &dyn Category, f: &FpMorphism) -> Result<FpMorphism, FpError> {
        if f.tgt != self.src {
            return Err(FpError::Shape("composition".into()));
        }
        Ok(FpMorphism {
            src: f.src.clone(),
            tgt: self.tgt.clone(),
            g0: self.g0.compose(cat, &f.g0)?,
            g1: self.g1.compose(cat, &f.g1)?,
        })
    }

    pub fn add(&self, cat: &dyn Category, g: &FpMorphism) -> Result<FpMorphism, FpError> {
        if self.src != g.src || self.tgt != g.tgt {
            return Err(FpError::Shape("sum".into()));
        }
        Ok(FpMorphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            g0: self.g0.add(cat, &g.g0)?,
            g1: self.g1.add(cat, &g.g1)?,
        })
    }

    pub fn scale(&self, s: &Q) -> FpMorphism {
        FpMorphism { src: self.src.clone(), tgt: self.tgt.clone(), g0: self.g0.scale(s), g1: self.g1.scale(s) }
    }

    pub fn sub(&self, cat: &dyn Category, g: &FpMorphism) -> Result<FpMorphism, FpError> {
        self.add(cat, &g.scale(&-<Q as num_traits::One>::one()))
    }

    /// Equality in the Freyd category: `g0 - g0'` factors through `d_tgt`.
    pub fn fp_eq(&self, ctx: &Ctx, g: &FpMorphism) -> bool {
        let Ok(diff) = self.g0.sub(ctx.cat(), &g.g0) else { return false };
        ctx.factor_through(&self.tgt.d, &diff).is_some()
    }

    /// Checks the factorization witness.
    pub fn verify(&self, ctx: &Ctx) -> Result<(), FpError> {
        FpMorphism::with_witness(ctx, &self.src, &self.tgt, self.g0.clone(), self.g1.clone()).map(|_| ())
    }
}

/// `F ⊗ H` in every bidegree, as subquotients of `H(X0_n)_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberSpace {
    pub parts: BTreeMap<Bidegree, Subquotient>,
}

impl FiberSpace {
    pub fn dims(&self) -> GradedSpace<Bidegree> {
        GradedSpace::new(self.parts.iter().map(|(&b, s)| (b, s.dim())))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

/// `coker(H(d))` on homology, in every bidegree.
pub fn fiber(ctx: &Ctx, f: &FpPresheaf) -> Arc<FiberSpace> {
    if let Some(s) = ctx.fibers.lock().unwrap().get(&f.d) {
        return s.clone();
    }
    let s = Arc::new(fiber_with(ctx.h(), ctx.cat(), f));
    ctx.fibers.lock().unwrap().insert(f.d.clone(), s.clone());
    s
}

/// The fiber computed with an arbitrary functor.
pub fn fiber_with(h: &dyn Fiber, cat: &dyn Category, f: &FpPresheaf) -> FiberSpace {
    let h0 = HComplex::new(h, cat, f.x0());
    let h1 = HComplex::new(h, cat, f.x1());
    let mut parts = BTreeMap::new();
    for (&n, t) in &h0.terms {
        let dn = f.d.comps().get(&n).map(|c| h_block(h, c));
        for (k, dim) in t.iter() {
            let mut rel = h0.boundaries(n, k);
            if let Some(dn) = &dn {
                let z1 = h1.cycles(n, k);
                if z1.cols() > 0 && z1.rows() > 0 {
                    rel = rel.hstack(&dn.block(k).mul(&z1));
                }
            }
            let sq = Subquotient::new(dim, &h0.cycles(n, k), &rel);
            if sq.dim() > 0 {
                parts.insert(Bidegree(n, k), sq);
            }
        }
    }
    FiberSpace { parts }
}

pub fn fiber_map(ctx: &Ctx, phi: &FpMorphism) -> GradedMap<Bidegree> {
    let a = fiber(ctx, &phi.src);
    let b = fiber(ctx, &phi.tgt);
    induced_map(ctx.h(), &a.parts, &b.parts, &phi.g0)
}

pub fn is_serre_null(ctx: &Ctx, f: &FpPresheaf) -> bool {
    fiber(ctx, f).is_zero()
}

pub fn m_iso_test(ctx: &Ctx, phi: &FpMorphism) -> bool {
    fiber_map(ctx, phi).is_iso()
}

/// Morphisms `F -> G` in the Freyd category: admissible `g0` modulo those factoring through `d_G`.
#[derive(Clone, Debug)]
pub struct FpHom {
    pub src: Obj,
    pub tgt: Obj,
    pub maps: Arc<KbHom>,
    pub space: Subquotient,
}

impl FpHom {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self, ctx: &Ctx) -> Vec<FpMorphism> {
        let cat = ctx.cat();
        let reps = self.maps.basis(cat);
        self.space
            .representatives()
            .columns()
            .iter()
            .map(|c| {
                let g0 = combine(cat, self.src.x0(), self.tgt.x0(), &reps, c);
                FpMorphism::new(ctx, &self.src, &self.tgt, g0).expect("admissible by construction")
            })
            .collect()
    }

    /// Coordinates of `phi` in the basis.
    pub fn coords(&self, ctx: &Ctx, phi: &FpMorphism) -> Option<Vec<Q>> {
        let c = self.maps.class_of(ctx.cat(), &phi.g0)?;
        self.space.reduce(&c)
    }
}

fn class_matrix(cat: &dyn Category, target: &KbHom, maps: impl Iterator<Item = ChainMap>) -> Matrix {
    let cols: Vec<Vec<Q>> = maps.map(|m| target.class_of(cat, &m).expect("shapes")).collect();
    Matrix::from_columns(target.dim(), &cols)
}

pub fn fp_hom(ctx: &Ctx, f: &Obj, g: &Obj) -> FpHom {
    let cat = ctx.cat();
    let k00 = ctx.kb_hom(f.x0(), g.x0());
    let k10 = ctx.kb_hom(f.x1(), g.x0());
    let k11 = ctx.kb_hom(f.x1(), g.x1());
    let k01 = ctx.kb_hom(f.x0(), g.x1());
    let b00 = k00.basis(cat);
    let pre = class_matrix(cat, &k10, b00.iter().map(|m| m.compose(cat, &f.d).expect("shapes")));
    let post = class_matrix(cat, &k10, k11.basis(cat).iter().map(|m| g.d.compose(cat, m).expect("shapes")));
    let a = k00.dim();
    let admissible = if k10.dim() == 0 {
        Matrix::identity(a)
    } else {
        let joint = pre.hstack(&post.scale(&-Q::from_integer(1.into())));
        let ker = joint.kernel_basis();
        ker.block(0, 0, a, ker.cols())
    };
    let rel = class_matrix(cat, &k00, k01.basis(cat).iter().map(|m| g.d.compose(cat, m).expect("shapes")));
    let rel = if rel.cols() == 0 { Matrix::zeros(a, 0) } else { rel };
    let space = Subquotient::new(a, &admissible, &rel);
    FpHom { src: f.clone(), tgt: g.clone(), maps: k00, space }
}

/// `F ⊗ H'` for a second fiber functor, refused unless `H'` has the same
/// strength as `H` on `window`.
pub fn second_fiber(
    ctx: &Ctx,
    h2: &dyn Fiber,
    window: &[Complex],
    f: &FpPresheaf,
) -> Result<FiberSpace, (FpError, Option<ChainMap>)> {
    let s = crate::complex::same_strength(ctx.h(), h2, ctx.cat(), window);
    if !s.same {
        return Err((FpError::NotSameStrength, s.witness.map(|w| w.map)));
    }
    Ok(fiber_with(h2, ctx.cat(), f))
}

/// `fiber_map` computed with an arbitrary functor.
pub fn fiber_map_with(h: &dyn Fiber, cat: &dyn Category, phi: &FpMorphism) -> GradedMap<Bidegree> {
    let a = fiber_with(h, cat, &phi.src);
    let b = fiber_with(h, cat, &phi.tgt);
    induced_map(h, &a.parts, &b.parts, &phi.g0)
}

/// Fiber dims of a bracket agree with the homology of the complex.
pub fn bracket_fiber_matches(ctx: &Ctx, x: &Complex) -> bool {
    fiber(ctx, &bracket(x)).dims() == ctx.homology(x).dims()
}

#[cfg(test)]
mod tests;
