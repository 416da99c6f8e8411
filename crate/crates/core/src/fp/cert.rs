//! Morphisms of the quotient category carried as a fiber matrix together
//! with a tree of certificates from which the matrix is recomputed.
//!
//! The fiber functor is faithful and exact on the quotient, so a morphism is
//! determined by its matrix once the tree shows that some morphism with that
//! matrix exists. Leaves are finitely presented morphisms and roofs; inner
//! nodes are linear operations and the universal properties of epis, monos
//! and split summands, each checked on fibers.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::calculus::{dual_obj, tensor_fp_mor, Kernel};
use super::roof::{roof_matrix, RoofMorphism};
use super::{bracket, fiber_map, Ctx, FpError, FpMorphism, Obj};
use crate::graded::{Bidegree, GradedMap};
use crate::linalg::{Matrix, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error("endpoints do not match: {0}")]
    Endpoints(String),
    #[error("not invertible in bidegree {0:?}")]
    NotInvertible(Bidegree),
    #[error("not an epimorphism in bidegree {0:?}")]
    NotEpi(Bidegree),
    #[error("not a monomorphism in bidegree {0:?}")]
    NotMono(Bidegree),
    #[error("map does not factor in bidegree {0:?}")]
    NoFactorization(Bidegree),
    #[error("not a split summand datum in bidegree {0:?}")]
    NotSummand(Bidegree),
    #[error("recomputed matrix differs from the claimed one")]
    Mismatch,
}

#[derive(Clone, Debug)]
pub enum Cert {
    Fp(FpMorphism),
    Roof(RoofMorphism),
    /// `g ∘ f`.
    Compose(Arc<Cert>, Arc<Cert>),
    Sum(Arc<Cert>, Arc<Cert>),
    Scale(Q, Arc<Cert>),
    Inverse(Arc<Cert>),
    /// The `s` with `s ∘ epi = map`.
    FactorEpi { epi: Arc<Cert>, map: Arc<Cert> },
    /// The `s` with `mono ∘ s = map`.
    FactorMono { mono: Arc<Cert>, map: Arc<Cert> },
    /// The `x = e_src x e_tgt` with `x map = e_src` and `map x = e_tgt`.
    SummandInverse { map: Arc<Cert>, e_src: Arc<Cert>, e_tgt: Arc<Cert> },
}

#[derive(Clone, Debug)]
pub struct MMorphism {
    pub src: Obj,
    pub tgt: Obj,
    pub matrix: GradedMap<Bidegree>,
    pub cert: Arc<Cert>,
}

type Mat = GradedMap<Bidegree>;

fn same(a: &Obj, b: &Obj) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn endpoints(what: &str, ok: bool) -> Result<(), ReplayError> {
    if ok {
        Ok(())
    } else {
        Err(ReplayError::Endpoints(what.into()))
    }
}

/// `a x = b`, tolerating empty shapes.
fn solve(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    if b.cols() == 0 || a.rows() == 0 {
        return Some(Matrix::zeros(a.cols(), b.cols()));
    }
    if a.cols() == 0 {
        return b.is_zero().then(|| Matrix::zeros(0, b.cols()));
    }
    a.solve_matrix(b).ok()?
}

fn degrees(ms: &[&Mat]) -> Vec<Bidegree> {
    let mut v: Vec<Bidegree> = ms.iter().flat_map(|m| m.support()).collect();
    v.sort();
    v.dedup();
    v
}

fn factor_epi(c: &Mat, m: &Mat) -> Result<Mat, ReplayError> {
    let mut out = GradedMap::zero(c.target(), m.target());
    for d in degrees(&[c, m]) {
        let (cb, mb) = (c.block(d), m.block(d));
        if cb.rank() != cb.rows() {
            return Err(ReplayError::NotEpi(d));
        }
        let st = solve(&cb.transpose(), &mb.transpose()).ok_or(ReplayError::NoFactorization(d))?;
        out.set_block(d, st.transpose()).expect("shape");
    }
    Ok(out)
}

fn factor_mono(j: &Mat, m: &Mat) -> Result<Mat, ReplayError> {
    let mut out = GradedMap::zero(m.source(), j.source());
    for d in degrees(&[j, m]) {
        let (jb, mb) = (j.block(d), m.block(d));
        if jb.rank() != jb.cols() {
            return Err(ReplayError::NotMono(d));
        }
        let s = solve(&jb, &mb).ok_or(ReplayError::NoFactorization(d))?;
        out.set_block(d, s).expect("shape");
    }
    Ok(out)
}

fn summand_inverse(m: &Mat, es: &Mat, et: &Mat) -> Result<Mat, ReplayError> {
    let mut out = GradedMap::zero(m.target(), m.source());
    for d in degrees(&[m, es, et]) {
        let (mb, sb, tb) = (m.block(d), es.block(d), et.block(d));
        let bad = ReplayError::NotSummand(d);
        if sb.mul(&sb) != sb || tb.mul(&tb) != tb || tb.mul(&mb).mul(&sb) != mb {
            return Err(bad);
        }
        let (bs, bt) = (sb.image_basis(), tb.image_basis());
        if bs.cols() != bt.cols() || mb.rank() != bs.cols() {
            return Err(bad);
        }
        if bs.cols() == 0 {
            continue;
        }
        // m bs = bt a, x = bs a^{-1} k with bt k = et
        let a = solve(&bt, &mb.mul(&bs)).ok_or(bad.clone())?;
        let ainv = a.inverse().ok_or(bad.clone())?;
        let k = solve(&bt, &tb).ok_or(bad)?;
        out.set_block(d, bs.mul(&ainv).mul(&k)).expect("shape");
    }
    Ok(out)
}

impl MMorphism {
    pub fn fp(ctx: &Ctx, phi: FpMorphism) -> Self {
        let matrix = fiber_map(ctx, &phi);
        MMorphism { src: phi.src.clone(), tgt: phi.tgt.clone(), matrix, cert: Arc::new(Cert::Fp(phi)) }
    }

    pub fn roof(ctx: &Ctx, r: RoofMorphism) -> Result<Self, FpError> {
        let matrix = roof_matrix(ctx, &r)?;
        Ok(MMorphism { src: bracket(&r.f.src), tgt: bracket(&r.w.src), matrix, cert: Arc::new(Cert::Roof(r)) })
    }

    pub fn identity(ctx: &Ctx, f: &Obj) -> Self {
        MMorphism::fp(ctx, FpMorphism::identity(ctx.cat(), f))
    }

    pub fn zero(ctx: &Ctx, src: &Obj, tgt: &Obj) -> Self {
        MMorphism::fp(ctx, FpMorphism::zero(src, tgt))
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &MMorphism) -> Result<Self, ReplayError> {
        endpoints("compose", same(&f.tgt, &self.src))?;
        Ok(MMorphism {
            src: f.src.clone(),
            tgt: self.tgt.clone(),
            matrix: self.matrix.compose(&f.matrix).map_err(|_| ReplayError::Endpoints("compose".into()))?,
            cert: Arc::new(Cert::Compose(self.cert.clone(), f.cert.clone())),
        })
    }

    pub fn add(&self, g: &MMorphism) -> Result<Self, ReplayError> {
        endpoints("sum", same(&self.src, &g.src) && same(&self.tgt, &g.tgt))?;
        Ok(MMorphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            matrix: self.matrix.add(&g.matrix),
            cert: Arc::new(Cert::Sum(self.cert.clone(), g.cert.clone())),
        })
    }

    pub fn scale(&self, s: &Q) -> Self {
        MMorphism {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            matrix: self.matrix.scale(s),
            cert: Arc::new(Cert::Scale(s.clone(), self.cert.clone())),
        }
    }

    pub fn sub(&self, g: &MMorphism) -> Result<Self, ReplayError> {
        self.add(&g.scale(&Q::from_integer((-1).into())))
    }

    pub fn inverse(&self) -> Result<Self, ReplayError> {
        let matrix = invert(&self.matrix)?;
        Ok(MMorphism {
            src: self.tgt.clone(),
            tgt: self.src.clone(),
            matrix,
            cert: Arc::new(Cert::Inverse(self.cert.clone())),
        })
    }

    /// The `s: P -> G` with `s ∘ epi = map` for `epi: F -> P`, `map: F -> G`.
    pub fn factor_epi(epi: &MMorphism, map: &MMorphism) -> Result<Self, ReplayError> {
        endpoints("factor_epi", same(&epi.src, &map.src))?;
        Ok(MMorphism {
            src: epi.tgt.clone(),
            tgt: map.tgt.clone(),
            matrix: factor_epi(&epi.matrix, &map.matrix)?,
            cert: Arc::new(Cert::FactorEpi { epi: epi.cert.clone(), map: map.cert.clone() }),
        })
    }

    /// The `s: F -> P` with `mono ∘ s = map` for `mono: P -> G`, `map: F -> G`.
    pub fn factor_mono(mono: &MMorphism, map: &MMorphism) -> Result<Self, ReplayError> {
        endpoints("factor_mono", same(&mono.tgt, &map.tgt))?;
        Ok(MMorphism {
            src: map.src.clone(),
            tgt: mono.src.clone(),
            matrix: factor_mono(&mono.matrix, &map.matrix)?,
            cert: Arc::new(Cert::FactorMono { mono: mono.cert.clone(), map: map.cert.clone() }),
        })
    }

    /// Inverse of `map: F -> G` between the summands cut out by `e_src` and `e_tgt`.
    pub fn summand_inverse(map: &MMorphism, e_src: &MMorphism, e_tgt: &MMorphism) -> Result<Self, ReplayError> {
        endpoints(
            "summand_inverse",
            same(&e_src.src, &map.src)
                && same(&e_src.tgt, &map.src)
                && same(&e_tgt.src, &map.tgt)
                && same(&e_tgt.tgt, &map.tgt),
        )?;
        Ok(MMorphism {
            src: map.tgt.clone(),
            tgt: map.src.clone(),
            matrix: summand_inverse(&map.matrix, &e_src.matrix, &e_tgt.matrix)?,
            cert: Arc::new(Cert::SummandInverse {
                map: map.cert.clone(),
                e_src: e_src.cert.clone(),
                e_tgt: e_tgt.cert.clone(),
            }),
        })
    }

    /// Recomputes the matrix from the leaves and compares.
    pub fn verify(&self, ctx: &Ctx) -> Result<(), ReplayError> {
        let (s, t, m) = replay(ctx, &self.cert)?;
        endpoints("replayed endpoints", same(&s, &self.src) && same(&t, &self.tgt))?;
        if m != self.matrix {
            return Err(ReplayError::Mismatch);
        }
        Ok(())
    }

    /// The dual morphism `tgt^∨ -> src^∨`.
    pub fn dual(&self, ctx: &Ctx) -> Result<Self, FpError> {
        let mut memo = HashMap::new();
        dual_cert(ctx, &self.cert, &mut memo)
    }

    /// `self ⊗ id_[z]`.
    pub fn whisker(&self, ctx: &Ctx, z: &crate::complex::Complex) -> Result<Self, FpError> {
        let mut memo = HashMap::new();
        whisker_cert(ctx, &self.cert, z, &mut memo)
    }
}

fn invert(m: &Mat) -> Result<Mat, ReplayError> {
    for d in m.support() {
        if m.source().dim(d) != m.target().dim(d) || !m.block(d).is_invertible() {
            return Err(ReplayError::NotInvertible(d));
        }
    }
    Ok(m.inverse().expect("checked"))
}

type Replayed = (Obj, Obj, Mat);

/// Recomputes `(source, target, matrix)` of a certificate from its leaves,
/// checking every side condition on the way.
pub fn replay(ctx: &Ctx, cert: &Arc<Cert>) -> Result<Replayed, ReplayError> {
    let mut memo = HashMap::new();
    replay_memo(ctx, cert, &mut memo)
}

fn replay_memo(
    ctx: &Ctx,
    cert: &Arc<Cert>,
    memo: &mut HashMap<usize, Result<Replayed, ReplayError>>,
) -> Result<Replayed, ReplayError> {
    let key = Arc::as_ptr(cert) as usize;
    if let Some(r) = memo.get(&key) {
        return r.clone();
    }
    let r = replay_node(ctx, cert, memo);
    memo.insert(key, r.clone());
    r
}

fn replay_node(
    ctx: &Ctx,
    cert: &Cert,
    memo: &mut HashMap<usize, Result<Replayed, ReplayError>>,
) -> Result<Replayed, ReplayError> {
    let mut go = |c: &Arc<Cert>| replay_memo(ctx, c, memo);
    Ok(match cert {
        Cert::Fp(phi) => {
            phi.verify(ctx)?;
            (phi.src.clone(), phi.tgt.clone(), fiber_map(ctx, phi))
        }
        Cert::Roof(r) => {
            let m = roof_matrix(ctx, r)?;
            (bracket(&r.f.src), bracket(&r.w.src), m)
        }
        Cert::Compose(g, f) => {
            let (gs, gt, gm) = go(g)?;
            let (fs, ft, fm) = go(f)?;
            endpoints("compose", same(&ft, &gs))?;
            (fs, gt, gm.compose(&fm).map_err(|_| ReplayError::Endpoints("compose".into()))?)
        }
        Cert::Sum(a, b) => {
            let (s, t, am) = go(a)?;
            let (s2, t2, bm) = go(b)?;
            endpoints("sum", same(&s, &s2) && same(&t, &t2))?;
            (s, t, am.add(&bm))
        }
        Cert::Scale(q, a) => {
            let (s, t, m) = go(a)?;
            (s, t, m.scale(q))
        }
        Cert::Inverse(a) => {
            let (s, t, m) = go(a)?;
            (t, s, invert(&m)?)
        }
        Cert::FactorEpi { epi, map } => {
            let (cs, ct, cm) = go(epi)?;
            let (ms, mt, mm) = go(map)?;
            endpoints("factor_epi", same(&cs, &ms))?;
            (ct, mt, factor_epi(&cm, &mm)?)
        }
        Cert::FactorMono { mono, map } => {
            let (js, jt, jm) = go(mono)?;
            let (ms, mt, mm) = go(map)?;
            endpoints("factor_mono", same(&jt, &mt))?;
            (ms, js, factor_mono(&jm, &mm)?)
        }
        Cert::SummandInverse { map, e_src, e_tgt } => {
            let (ms, mt, mm) = go(map)?;
            let (ss, st, sm) = go(e_src)?;
            let (ts, tt, tm) = go(e_tgt)?;
            endpoints("summand_inverse", same(&ss, &ms) && same(&st, &ms) && same(&ts, &mt) && same(&tt, &mt))?;
            (mt, ms, summand_inverse(&mm, &sm, &tm)?)
        }
    })
}

fn err(e: ReplayError) -> FpError {
    match e {
        ReplayError::Fp(e) => e,
        other => FpError::Shape(other.to_string()),
    }
}

/// Dual of an fp morphism `F -> G`, as a morphism `G^∨ -> F^∨`.
pub fn dual_fp_morphism(ctx: &Ctx, phi: &FpMorphism) -> Result<MMorphism, FpError> {
    let cat = ctx.cat();
    let gd = phi.g0.dual(cat)?;
    let t = FpMorphism::bracket(&gd);
    if phi.src.is_representable() && phi.tgt.is_representable() {
        return Ok(MMorphism::fp(ctx, t));
    }
    let Kernel { incl: iota_f, .. } = dual_obj(ctx, &phi.src)?;
    let Kernel { incl: iota_g, .. } = dual_obj(ctx, &phi.tgt)?;
    let through = t.compose(cat, &iota_g)?;
    if phi.src.is_representable() {
        return Ok(MMorphism::fp(ctx, through));
    }
    MMorphism::factor_mono(&MMorphism::fp(ctx, iota_f), &MMorphism::fp(ctx, through)).map_err(err)
}

fn dual_cert(ctx: &Ctx, cert: &Arc<Cert>, memo: &mut HashMap<usize, MMorphism>) -> Result<MMorphism, FpError> {
    let key = Arc::as_ptr(cert) as usize;
    if let Some(m) = memo.get(&key) {
        return Ok(m.clone());
    }
    let cat = ctx.cat();
    let out = match &**cert {
        Cert::Fp(phi) => dual_fp_morphism(ctx, phi)?,
        Cert::Roof(r) => {
            let f = MMorphism::fp(ctx, FpMorphism::bracket(&r.f.dual(cat)?));
            let w = MMorphism::fp(ctx, FpMorphism::bracket(&r.w.dual(cat)?));
            f.compose(&w.inverse().map_err(err)?).map_err(err)?
        }
        Cert::Compose(g, f) => {
            let (g, f) = (dual_cert(ctx, g, memo)?, dual_cert(ctx, f, memo)?);
            f.compose(&g).map_err(err)?
        }
        Cert::Sum(a, b) => {
            let (a, b) = (dual_cert(ctx, a, memo)?, dual_cert(ctx, b, memo)?);
            a.add(&b).map_err(err)?
        }
        Cert::Scale(q, a) => dual_cert(ctx, a, memo)?.scale(q),
        Cert::Inverse(a) => dual_cert(ctx, a, memo)?.inverse().map_err(err)?,
        Cert::FactorEpi { epi, map } => {
            let (c, m) = (dual_cert(ctx, epi, memo)?, dual_cert(ctx, map, memo)?);
            MMorphism::factor_mono(&c, &m).map_err(err)?
        }
        Cert::FactorMono { mono, map } => {
            let (j, m) = (dual_cert(ctx, mono, memo)?, dual_cert(ctx, map, memo)?);
            MMorphism::factor_epi(&j, &m).map_err(err)?
        }
        Cert::SummandInverse { map, e_src, e_tgt } => {
            let m = dual_cert(ctx, map, memo)?;
            let s = dual_cert(ctx, e_src, memo)?;
            let t = dual_cert(ctx, e_tgt, memo)?;
            MMorphism::summand_inverse(&m, &t, &s).map_err(err)?
        }
    };
    memo.insert(key, out.clone());
    Ok(out)
}

fn whisker_cert(
    ctx: &Ctx,
    cert: &Arc<Cert>,
    z: &crate::complex::Complex,
    memo: &mut HashMap<usize, MMorphism>,
) -> Result<MMorphism, FpError> {
    let key = Arc::as_ptr(cert) as usize;
    if let Some(m) = memo.get(&key) {
        return Ok(m.clone());
    }
    let cat = ctx.cat();
    let bz = bracket(z);
    let out = match &**cert {
        Cert::Fp(phi) => {
            let id = FpMorphism::identity(cat, &bz);
            MMorphism::fp(ctx, tensor_fp_mor(ctx, phi, &id)?)
        }
        Cert::Roof(r) => {
            let idz = z.identity(cat);
            let r2 = RoofMorphism::new(ctx, r.f.tensor(cat, &idz)?, r.w.tensor(cat, &idz)?)?;
            MMorphism::roof(ctx, r2)?
        }
        Cert::Compose(g, f) => {
            let (g, f) = (whisker_cert(ctx, g, z, memo)?, whisker_cert(ctx, f, z, memo)?);
            g.compose(&f).map_err(err)?
        }
        Cert::Sum(a, b) => {
            let (a, b) = (whisker_cert(ctx, a, z, memo)?, whisker_cert(ctx, b, z, memo)?);
            a.add(&b).map_err(err)?
        }
        Cert::Scale(q, a) => whisker_cert(ctx, a, z, memo)?.scale(q),
        Cert::Inverse(a) => whisker_cert(ctx, a, z, memo)?.inverse().map_err(err)?,
        Cert::FactorEpi { epi, map } => {
            let (c, m) = (whisker_cert(ctx, epi, z, memo)?, whisker_cert(ctx, map, z, memo)?);
            MMorphism::factor_epi(&c, &m).map_err(err)?
        }
        Cert::FactorMono { mono, map } => {
            let (j, m) = (whisker_cert(ctx, mono, z, memo)?, whisker_cert(ctx, map, z, memo)?);
            MMorphism::factor_mono(&j, &m).map_err(err)?
        }
        Cert::SummandInverse { map, e_src, e_tgt } => {
            let m = whisker_cert(ctx, map, z, memo)?;
            let s = whisker_cert(ctx, e_src, z, memo)?;
            let t = whisker_cert(ctx, e_tgt, z, memo)?;
            MMorphism::summand_inverse(&m, &s, &t).map_err(err)?
        }
    };
    memo.insert(key, out.clone());
    Ok(out)
}
