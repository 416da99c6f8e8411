//! Lefschetz-type structure on a single object: Künneth splittings, primitive
//! decomposition, the operators `Λ, ᶜΛ, ∗, p_j`, purity and the sign twist.

mod lefschetz;
mod primitive;
mod purity;
#[cfg(test)]
mod tests;

pub use lefschetz::{
    check_hard_lefschetz, check_weak_lefschetz, degree_projector, lefschetz_split, semisimple_split,
    KunnethSplitting, SplitCheck, SplitMethod,
};
pub use primitive::{derive_b_operators, primitive_decompose, BData, PrimitiveData, PrimitivePiece, Relation};
pub use purity::{purity_decompose, sign_twist, twisted_symmetry, PureClass, PurityReport, TwistBlock, TwistReport};

use crate::category::{CatError, ObjId};
use crate::complex::{ev_complex, ChainMap, Complex};
use crate::fp::{bracket, fiber, FpError, FpMorphism, Ctx, MMorphism, Obj, ReplayError, RoofMorphism};
use crate::graded::{Bidegree, GradedMap};
use crate::linalg::Matrix;

#[derive(Debug, thiserror::Error)]
pub enum MotiveError {
    #[error("level {level}: missing {what}")]
    Missing { level: usize, what: String },
    #[error("level {level}, degree {degree}: {what}")]
    Precondition { level: usize, degree: i64, what: String },
    #[error("level {level}: required composite is not invertible in degree {degree}")]
    NotInvertible { level: usize, degree: i64 },
    #[error("no section of the image epimorphism at stage {stage}")]
    SectionFailed { stage: usize },
    #[error("invalid motive data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Cat(#[from] CatError),
}

impl From<crate::complex::ComplexError> for MotiveError {
    fn from(e: crate::complex::ComplexError) -> Self {
        MotiveError::Fp(e.into())
    }
}

/// A hyperplane section `q: X -> Y` with `Y` of one dimension less.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub y: MotivePresentation,
    pub q: ChainMap,
}

#[derive(Clone, Debug)]
pub struct MotivePresentation {
    pub name: String,
    /// Label of the object `X`.
    pub x: String,
    pub d: usize,
    /// Label of `L`; absent only when `d = 0`.
    pub lefschetz: Option<String>,
    /// `ℓ: X -> X ⊗ L^{-1}`.
    pub ell: Option<ChainMap>,
    /// `D_i: X^∨ ⊗ L^i -> X ⊗ L^{-(d-i)}` for `i = 0..=d`; `D_d` is the duality iso.
    pub duality: Vec<ChainMap>,
    pub hyperplane: Option<Box<Hyperplane>>,
    /// `ν_i: X ⊗ L^{-(d-i)} ⇝ X` for `i < d`.
    pub nu: Vec<Option<RoofMorphism>>,
    /// Projectors onto degrees 0, 1, 2 of a curve.
    pub curve_split: Option<Vec<ChainMap>>,
}

impl MotivePresentation {
    pub fn obj(&self, ctx: &Ctx) -> Result<ObjId, MotiveError> {
        Ok(ctx.obj(&self.x)?)
    }

    pub fn complex(&self, ctx: &Ctx) -> Result<Complex, MotiveError> {
        Ok(ctx.complex(&self.x)?)
    }

    pub fn bracket(&self, ctx: &Ctx) -> Result<Obj, MotiveError> {
        Ok(bracket(&self.complex(ctx)?))
    }

    fn l(&self, ctx: &Ctx) -> Result<ObjId, MotiveError> {
        let l = self.lefschetz.as_ref().ok_or(MotiveError::Missing { level: self.d, what: "Lefschetz object".into() })?;
        Ok(ctx.obj(l)?)
    }

    /// `L^{-t}` (so `t > 0` gives powers of the inverse).
    pub fn lpow(&self, ctx: &Ctx, t: i64) -> Result<ObjId, MotiveError> {
        let cat = ctx.cat();
        if t == 0 {
            return Ok(cat.unit());
        }
        let l = self.l(ctx)?;
        let base = if t > 0 { cat.dual_obj(l)? } else { l };
        let mut acc = base;
        for _ in 1..t.unsigned_abs() {
            acc = cat.tensor_obj(acc, base)?;
        }
        Ok(acc)
    }

    /// `X ⊗ L^{-t}` as an object.
    pub fn twist(&self, ctx: &Ctx, x: ObjId, t: i64) -> Result<ObjId, MotiveError> {
        if t == 0 {
            return Ok(x);
        }
        Ok(ctx.cat().tensor_obj(x, self.lpow(ctx, t)?)?)
    }

    pub fn lpow_complex(&self, ctx: &Ctx, t: i64) -> Result<Complex, MotiveError> {
        Ok(Complex::object(&[self.lpow(ctx, t)?], 0))
    }

    /// `X ⊗ L^{-t}` as a complex in degree 0.
    pub fn frame(&self, ctx: &Ctx, t: i64) -> Result<Complex, MotiveError> {
        Ok(Complex::object(&[self.twist(ctx, self.obj(ctx)?, t)?], 0))
    }

    /// `Z ⊗ L^{-a} ⊗ L -> Z ⊗ L^{-(a-1)}`, cancelling one `L^{-1} ⊗ L` when `a > 0`.
    pub fn reframe(&self, ctx: &Ctx, z: ObjId, a: i64) -> Result<ChainMap, MotiveError> {
        let cat = ctx.cat();
        let l = Complex::object(&[self.l(ctx)?], 0);
        let src = Complex::object(&[cat.tensor_obj(self.twist(ctx, z, a)?, self.l(ctx)?)?], 0);
        if a <= 0 {
            return Ok(src.identity(cat));
        }
        let zc = Complex::object(&[self.twist(ctx, z, a - 1)?], 0);
        let ev = ev_complex(cat, &l)?;
        Ok(zc.identity(cat).tensor(cat, &ev)?)
    }

    /// `ℓ_t: X ⊗ L^{-t} -> X ⊗ L^{-(t+1)}` between canonical frames.
    pub fn ell_at(&self, ctx: &Ctx, t: i64) -> Result<ChainMap, MotiveError> {
        let cat = ctx.cat();
        let ell = self.ell.as_ref().ok_or(MotiveError::Missing { level: self.d, what: "ℓ".into() })?;
        if t == 0 {
            return Ok(ell.clone());
        }
        let z = self.lpow_complex(ctx, t)?;
        let raw = ell.tensor(cat, &z.identity(cat))?;
        if t > 0 {
            return Ok(raw);
        }
        // X ⊗ L^{-1} ⊗ L ⊗ L^{m-1} -> X ⊗ L^{m-1}
        let x = self.complex(ctx)?;
        let ev = ev_complex(cat, &Complex::object(&[self.l(ctx)?], 0))?;
        let rest = self.lpow_complex(ctx, t + 1)?;
        let cancel = x.identity(cat).tensor(cat, &ev)?.tensor(cat, &rest.identity(cat))?;
        Ok(cancel.compose(cat, &raw)?)
    }

    /// `ℓ^{(n)}: X ⊗ L^{-m} -> X ⊗ L^{-(m+n)}`.
    pub fn ell_power(&self, ctx: &Ctx, m: i64, n: i64) -> Result<ChainMap, MotiveError> {
        let mut acc = self.frame(ctx, m)?.identity(ctx.cat());
        for k in 0..n {
            acc = self.ell_at(ctx, m + k)?.compose(ctx.cat(), &acc)?;
        }
        Ok(acc)
    }

    /// The action of `ℓ` on `H(X)`, raising the internal degree by 2.
    pub fn ell_fiber(&self, ctx: &Ctx) -> Result<GradedMap<Bidegree>, MotiveError> {
        let ell = self.ell.as_ref().ok_or(MotiveError::Missing { level: self.d, what: "ℓ".into() })?;
        Ok(crate::fp::fiber_map(ctx, &FpMorphism::bracket(ell)))
    }

    /// Block of `H(ℓ)` from `H^j` to `H^{j+2}`.
    pub fn ell_block(&self, ctx: &Ctx, j: i64) -> Result<Matrix, MotiveError> {
        Ok(self.ell_fiber(ctx)?.block(Bidegree(0, j)))
    }

    pub fn dims(&self, ctx: &Ctx) -> Result<Vec<usize>, MotiveError> {
        let f = fiber(ctx, &*self.bracket(ctx)?).dims();
        Ok((0..=2 * self.d as i64).map(|i| f.dim(Bidegree(0, i))).collect())
    }

    /// Checks the shape invariants of the presentation and its hyperplane chain.
    pub fn validate(&self, ctx: &Ctx) -> Result<(), MotiveError> {
        let bad = |s: String| Err(MotiveError::Invalid(format!("{}: {s}", self.name)));
        let x = self.obj(ctx)?;
        let fx = fiber(ctx, &*self.bracket(ctx)?).dims();
        for (deg, n) in fx.iter() {
            if n > 0 && (deg.0 != 0 || deg.1 < 0 || deg.1 > 2 * self.d as i64) {
                return bad(format!("fiber of X lives outside degrees 0..{}", 2 * self.d));
            }
        }
        if self.d > 0 || self.lefschetz.is_some() {
            let l = fiber(ctx, &bracket(&Complex::object(&[self.l(ctx)?], 0))).dims();
            if l.total_dim() != 1 || l.dim(Bidegree(0, 2)) != 1 {
                return bad("fiber of L must be a line in degree 2".into());
            }
        }
        if let Some(ell) = &self.ell {
            let tgt = Complex::object(&[self.twist(ctx, x, 1)?], 0);
            if ell.src != self.complex(ctx)? || ell.tgt != tgt {
                return bad("ℓ must map X to X ⊗ L^-1".into());
            }
        } else if self.d > 0 {
            return bad("ℓ is required when d > 0".into());
        }
        if self.duality.len() != self.d + 1 {
            return bad(format!("expected {} duality maps", self.d + 1));
        }
        let xd = ctx.cat().dual_obj(x)?;
        for (i, di) in self.duality.iter().enumerate() {
            let src = Complex::object(&[self.twist(ctx, xd, -(i as i64))?], 0);
            let tgt = Complex::object(&[self.twist(ctx, x, (self.d - i) as i64)?], 0);
            if di.src != src || di.tgt != tgt {
                return bad(format!("D_{i} has the wrong endpoints"));
            }
            if !crate::fp::fiber_map(ctx, &FpMorphism::bracket(di)).is_iso() {
                return bad(format!("D_{i} is not an isomorphism on fibers"));
            }
        }
        for (i, nu) in self.nu.iter().enumerate() {
            if let Some(r) = nu {
                r.check(ctx)?;
                let src = Complex::object(&[self.twist(ctx, x, (self.d - i) as i64)?], 0);
                if r.f.src != src || r.w.src != self.complex(ctx)? {
                    return bad(format!("ν_{i} has the wrong endpoints"));
                }
            }
        }
        if let Some(h) = &self.hyperplane {
            if h.y.d + 1 != self.d {
                return bad("hyperplane section must have dimension d - 1".into());
            }
            if h.q.src != self.complex(ctx)? || h.q.tgt != h.y.complex(ctx)? {
                return bad("q must map X to Y".into());
            }
            h.y.validate(ctx)?;
        }
        if let Some(ps) = &self.curve_split {
            if self.d != 1 || ps.len() != 3 {
                return bad("a curve splitting has three projectors and needs d = 1".into());
            }
        }
        Ok(())
    }
}

/// `[f]` as a certified morphism.
pub(crate) fn mm(ctx: &Ctx, f: &ChainMap) -> MMorphism {
    MMorphism::fp(ctx, FpMorphism::bracket(f))
}
