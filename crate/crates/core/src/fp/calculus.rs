//! Kernels, cokernels, images, sums, tensor products and duals of presentations.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use super::cert::MMorphism;
use super::{bracket, fiber_map, is_serre_null, Ctx, FpError, FpMorphism, FpPresheaf, Obj};
use crate::category::{BlockMor, Category};
use crate::complex::{coev_complex, ev_complex, homotopy_pullback, injection, projection, ChainMap, Complex};
use crate::linalg::Q;

#[derive(Clone, Debug)]
pub struct Kernel {
    pub obj: Obj,
    pub incl: FpMorphism,
}

#[derive(Clone, Debug)]
pub struct Cokernel {
    pub obj: Obj,
    pub proj: FpMorphism,
}

#[derive(Clone, Debug)]
pub struct Image {
    pub obj: Obj,
    pub epi: FpMorphism,
    pub mono: FpMorphism,
}

#[derive(Clone, Debug)]
pub struct Split {
    pub image: Obj,
    pub section: MMorphism,
    pub retraction: MMorphism,
}

#[derive(Clone, Debug)]
pub struct ZigZags {
    pub dual: Obj,
    pub ev: FpMorphism,
    pub coev: FpMorphism,
    /// `F -> F ⊗ F^∨ ⊗ F -> F`.
    pub left: FpMorphism,
    /// `F^∨ -> F^∨ ⊗ F ⊗ F^∨ -> F^∨`.
    pub right: FpMorphism,
}

fn obj(d: ChainMap) -> Obj {
    Arc::new(FpPresheaf { d })
}

/// `W = X0 ×_{Y0} Y1` with its maps to `X0` and `Y1`.
fn weak_kernel(ctx: &Ctx, phi: &FpMorphism) -> Result<(ChainMap, ChainMap), FpError> {
    let (_, to_x0, to_y1) = homotopy_pullback(ctx.cat(), &phi.tgt.d, &phi.g0)?;
    Ok((to_x0, to_y1))
}

pub fn fp_kernel(ctx: &Ctx, phi: &FpMorphism) -> Result<Kernel, FpError> {
    let (k, _) = weak_kernel(ctx, phi)?;
    let (_, to_w, to_x1) = homotopy_pullback(ctx.cat(), &phi.src.d, &k)?;
    let o = obj(to_w);
    let incl = FpMorphism::with_witness(ctx, &o, &phi.src, k, to_x1)?;
    Ok(Kernel { obj: o, incl })
}

pub fn fp_cokernel(ctx: &Ctx, phi: &FpMorphism) -> Result<Cokernel, FpError> {
    let cat = ctx.cat();
    let (x0, y1) = (phi.src.x0(), phi.tgt.x1());
    let o = obj(phi.g0.hcat(cat, &phi.tgt.d)?);
    let proj = FpMorphism::with_witness(ctx, &phi.tgt, &o, phi.tgt.x0().identity(cat), injection(cat, x0, y1, 1))?;
    Ok(Cokernel { obj: o, proj })
}

pub fn fp_image(ctx: &Ctx, phi: &FpMorphism) -> Result<Image, FpError> {
    let cat = ctx.cat();
    let (k, to_y1) = weak_kernel(ctx, phi)?;
    let o = obj(k);
    let epi = FpMorphism::new(ctx, &phi.src, &o, phi.src.x0().identity(cat))?;
    let mono = FpMorphism::with_witness(ctx, &o, &phi.tgt, phi.g0.clone(), to_y1)?;
    Ok(Image { obj: o, epi, mono })
}

/// `F ⊕ G` with its injections and projections.
pub fn fp_direct_sum(
    ctx: &Ctx,
    f: &Obj,
    g: &Obj,
) -> Result<(Obj, [FpMorphism; 2], [FpMorphism; 2]), FpError> {
    let cat = ctx.cat();
    let o = obj(f.d.direct_sum(cat, &g.d));
    let (x0, y0, x1, y1) = (f.x0(), g.x0(), f.x1(), g.x1());
    let inj = [
        FpMorphism::with_witness(ctx, f, &o, injection(cat, x0, y0, 0), injection(cat, x1, y1, 0))?,
        FpMorphism::with_witness(ctx, g, &o, injection(cat, x0, y0, 1), injection(cat, x1, y1, 1))?,
    ];
    let proj = [
        FpMorphism::with_witness(ctx, &o, f, projection(cat, x0, y0, 0), projection(cat, x1, y1, 0))?,
        FpMorphism::with_witness(ctx, &o, g, projection(cat, x0, y0, 1), projection(cat, x1, y1, 1))?,
    ];
    Ok((o, inj, proj))
}

/// Pushout of `phi: F -> G` and `psi: F -> G'`, with the maps from `G` and `G'`.
pub fn fp_pushout(ctx: &Ctx, phi: &FpMorphism, psi: &FpMorphism) -> Result<(Obj, FpMorphism, FpMorphism), FpError> {
    let cat = ctx.cat();
    if phi.src != psi.src {
        return Err(FpError::Shape("pushout legs need a common source".into()));
    }
    let (sum, inj, _) = fp_direct_sum(ctx, &phi.tgt, &psi.tgt)?;
    let g0 = phi.g0.vcat(cat, &psi.g0.scale(&-Q::one()))?;
    let m = FpMorphism::new(ctx, &phi.src, &sum, g0)?;
    let c = fp_cokernel(ctx, &m)?;
    Ok((c.obj.clone(), c.proj.compose(cat, &inj[0])?, c.proj.compose(cat, &inj[1])?))
}

/// `F ⊗ G` presented by `X1 ⊗ Y0 ⊕ X0 ⊗ Y1 -> X0 ⊗ Y0`.
pub fn tensor_fp(ctx: &Ctx, f: &Obj, g: &Obj) -> Result<Obj, FpError> {
    let cat = ctx.cat();
    let left = f.d.tensor(cat, &g.x0().identity(cat))?;
    let right = f.x0().identity(cat).tensor(cat, &g.d)?;
    let d = match (f.is_representable(), g.is_representable()) {
        (true, true) => return Ok(bracket(&f.x0().tensor(cat, g.x0())?)),
        (true, false) => right,
        (false, true) => left,
        (false, false) => left.hcat(cat, &right)?,
    };
    Ok(obj(d))
}

pub fn tensor_fp_mor(ctx: &Ctx, phi: &FpMorphism, psi: &FpMorphism) -> Result<FpMorphism, FpError> {
    let cat = ctx.cat();
    let src = tensor_fp(ctx, &phi.src, &psi.src)?;
    let tgt = tensor_fp(ctx, &phi.tgt, &psi.tgt)?;
    let g0 = phi.g0.tensor(cat, &psi.g0)?;
    FpMorphism::new(ctx, &src, &tgt, g0)
}

/// `F^∨` with its inclusion into `[X0^∨]`: the kernel of `[d^∨]`, or
/// `[X^∨]` itself for `F = [X]`.
pub fn dual_obj(ctx: &Ctx, f: &Obj) -> Result<Kernel, FpError> {
    let cat = ctx.cat();
    let x0d = f.x0().dual(cat)?;
    if f.is_representable() {
        let o = bracket(&x0d);
        return Ok(Kernel { incl: FpMorphism::identity(cat, &o), obj: o });
    }
    fp_kernel(ctx, &FpMorphism::bracket(&f.d.dual(cat)?))
}

pub fn dual_fp(ctx: &Ctx, f: &Obj) -> Result<Obj, FpError> {
    Ok(dual_obj(ctx, f)?.obj)
}

/// The associator `(X ⊗ Y) ⊗ Z -> X ⊗ (Y ⊗ Z)`, or its inverse.
pub fn reassociate(
    cat: &dyn Category,
    x: &Complex,
    y: &Complex,
    z: &Complex,
    inverse: bool,
) -> Result<ChainMap, FpError> {
    let yz = y.tensor(cat, z)?;
    let xy = x.tensor(cat, y)?;
    let l = xy.tensor(cat, z)?;
    let r = x.tensor(cat, &yz)?;
    let mut comps = BTreeMap::new();
    for (&n, lt) in l.terms() {
        let rt = r.term(n);
        let mut m = if inverse { BlockMor::zero(cat, rt, lt) } else { BlockMor::zero(cat, lt, rt) };
        let rpos: BTreeMap<i64, (usize, usize)> =
            x.tensor_layout(&yz, n).into_iter().map(|(p, off, _)| (p, (off, yz.term(n - p).len()))).collect();
        for (pq, off1, _) in xy.tensor_layout(z, n) {
            let zr = z.term(n - pq).len();
            for (p, off2, _) in x.tensor_layout(y, pq) {
                let (xp, yq) = (x.term(p).len(), y.term(pq - p).len());
                let (roff, yzlen) = rpos[&p];
                let inner = y.tensor_layout(z, n - p);
                let off3 = inner.iter().find(|e| e.0 == pq - p).map(|e| e.1).expect("layout");
                for a in 0..xp {
                    for b in 0..yq {
                        for c in 0..zr {
                            let li = off1 + (off2 + a * yq + b) * zr + c;
                            let ri = roff + a * yzlen + off3 + b * zr + c;
                            let o = lt[li];
                            debug_assert_eq!(o, rt[ri]);
                            if inverse {
                                *m.block_mut(li, ri) = cat.identity(o);
                            } else {
                                *m.block_mut(ri, li) = cat.identity(o);
                            }
                        }
                    }
                }
            }
        }
        comps.insert(n, m);
    }
    let (s, t) = if inverse { (&r, &l) } else { (&l, &r) };
    Ok(ChainMap::new(cat, s, t, comps)?)
}

/// Evaluation, coevaluation and both zig-zag composites for `F = [X]`.
pub fn zig_zags(ctx: &Ctx, f: &Obj) -> Result<ZigZags, FpError> {
    let cat = ctx.cat();
    if !f.is_representable() {
        return Err(FpError::Shape("zig-zags are built for representable objects".into()));
    }
    let x = f.x0();
    let xd = x.dual(cat)?;
    let ev = ev_complex(cat, x)?;
    let coev = coev_complex(cat, x)?;
    let idx = x.identity(cat);
    let idxd = xd.identity(cat);
    // X -> (X X^∨) X -> X (X^∨ X) -> X
    let left = idx
        .tensor(cat, &ev)?
        .compose(cat, &reassociate(cat, x, &xd, x, false)?)?
        .compose(cat, &coev.tensor(cat, &idx)?)?;
    // X^∨ -> X^∨ (X X^∨) -> (X^∨ X) X^∨ -> X^∨
    let right = ev
        .tensor(cat, &idxd)?
        .compose(cat, &reassociate(cat, &xd, x, &xd, true)?)?
        .compose(cat, &idxd.tensor(cat, &coev)?)?;
    Ok(ZigZags {
        dual: bracket(&xd),
        ev: FpMorphism::bracket(&ev),
        coev: FpMorphism::bracket(&coev),
        left: FpMorphism::bracket(&left),
        right: FpMorphism::bracket(&right),
    })
}

/// Splits an idempotent `e` of `F`: the image is `coker(id - e)`, the
/// retraction its projection, and the section is the factorization of `e`
/// through the retraction.
pub fn split_idempotent(ctx: &Ctx, f: &Obj, e: &FpMorphism) -> Result<Split, FpError> {
    let cat = ctx.cat();
    if e.src != *f || e.tgt != *f {
        return Err(FpError::Shape("idempotent must be an endomorphism".into()));
    }
    let fe = fiber_map(ctx, e);
    if fe.compose(&fe).map_err(|_| FpError::NotIdempotent)? != fe {
        return Err(FpError::NotIdempotent);
    }
    let ee = e.compose(cat, e)?;
    if !ee.fp_eq(ctx, e) {
        let defect = fp_image(ctx, &ee.sub(cat, e)?)?;
        if !is_serre_null(ctx, &defect.obj) {
            return Err(FpError::NotIdempotent);
        }
    }
    let id = FpMorphism::identity(cat, f);
    let c = fp_cokernel(ctx, &id.sub(cat, e)?)?;
    let retraction = MMorphism::fp(ctx, c.proj);
    let section = MMorphism::factor_epi(&retraction, &MMorphism::fp(ctx, e.clone()))
        .map_err(|er| FpError::Shape(er.to_string()))?;
    Ok(Split { image: c.obj, section, retraction })
}
