use super::{mm, MotiveError, MotivePresentation};
use crate::fp::{fiber, fiber_map, fp_hom, fp_image, Cert, Ctx, FpMorphism, MMorphism, Obj};
use crate::graded::{Bidegree, GradedMap};
use crate::linalg::{Matrix, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMethod {
    Lefschetz,
    Semisimple,
}

/// `[X] = ⊕ X_i` given by idempotents `π_0..π_{2d}`.
#[derive(Clone, Debug)]
pub struct KunnethSplitting {
    pub x: Obj,
    pub d: usize,
    pub projectors: Vec<MMorphism>,
    pub method: SplitMethod,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCheck {
    pub idempotent: bool,
    pub orthogonal: bool,
    pub sums_to_identity: bool,
    pub degree_projectors: bool,
    pub replays: bool,
}

impl SplitCheck {
    pub fn ok(&self) -> bool {
        self.idempotent && self.orthogonal && self.sums_to_identity && self.degree_projectors && self.replays
    }
}

/// Projector of `H(F)` onto internal degree `i`.
pub fn degree_projector(ctx: &Ctx, f: &Obj, i: i64) -> GradedMap<Bidegree> {
    let v = fiber(ctx, f).dims();
    let mut p = GradedMap::zero(&v, &v);
    for (d, n) in v.iter() {
        if d.1 == i {
            p.set_block(d, Matrix::identity(n)).expect("shape");
        }
    }
    p
}

impl KunnethSplitting {
    pub fn check(&self, ctx: &Ctx) -> SplitCheck {
        let ms: Vec<&GradedMap<Bidegree>> = self.projectors.iter().map(|p| &p.matrix).collect();
        let comp = |a: &GradedMap<Bidegree>, b: &GradedMap<Bidegree>| a.compose(b).ok();
        let idempotent = ms.iter().all(|m| comp(m, m).as_ref() == Some(*m));
        let mut orthogonal = true;
        for (i, a) in ms.iter().enumerate() {
            for (j, b) in ms.iter().enumerate() {
                if i != j && !comp(a, b).is_some_and(|c| c.is_zero()) {
                    orthogonal = false;
                }
            }
        }
        let v = fiber(ctx, &self.x).dims();
        let sum = ms.iter().fold(GradedMap::zero(&v, &v), |acc, m| acc.add(m));
        let degree_projectors =
            ms.iter().enumerate().all(|(i, m)| **m == degree_projector(ctx, &self.x, i as i64));
        let replays = self.projectors.iter().all(|p| p.verify(ctx).is_ok());
        SplitCheck { idempotent, orthogonal, sums_to_identity: sum.is_identity(), degree_projectors, replays }
    }
}

/// `ℓ^{(d-i)}: H^i -> H^{2d-i}` is invertible, for `0 <= i < d`.
pub fn check_hard_lefschetz(ctx: &Ctx, x: &MotivePresentation) -> Result<Vec<bool>, MotiveError> {
    let d = x.d as i64;
    let e = if d > 0 { Some(x.ell_fiber(ctx)?) } else { None };
    let mut out = vec![];
    for i in 0..d {
        let e = e.as_ref().expect("d > 0");
        let mut acc = e.block(Bidegree(0, i));
        let mut j = i + 2;
        while j < 2 * d - i {
            acc = e.block(Bidegree(0, j)).mul(&acc);
            j += 2;
        }
        out.push(acc.rows() == acc.cols() && acc.is_invertible());
    }
    Ok(out)
}

/// `H^i(q)` is an isomorphism for `i <= d-2` and injective for `i = d-1`.
pub fn check_weak_lefschetz(ctx: &Ctx, x: &MotivePresentation) -> Result<Vec<bool>, MotiveError> {
    let h = x.hyperplane.as_ref().ok_or(MotiveError::Missing { level: x.d, what: "hyperplane section".into() })?;
    let q = fiber_map(ctx, &FpMorphism::bracket(&h.q));
    let d = x.d as i64;
    Ok((0..d)
        .map(|i| {
            let b = q.block(Bidegree(0, i));
            let inj = b.rank() == b.cols();
            if i + 1 < d {
                inj && b.rows() == b.cols()
            } else {
                inj
            }
        })
        .collect())
}

/// An fp morphism with the same fiber matrix as `m`; by faithfulness it is
/// equal to `m` in the quotient.
pub(crate) fn realize(ctx: &Ctx, m: &MMorphism) -> Option<FpMorphism> {
    if let Cert::Fp(phi) = &*m.cert {
        return Some(phi.clone());
    }
    let basis = fp_hom(ctx, &m.src, &m.tgt).basis(ctx);
    let target = m.matrix.to_total();
    let flat = |g: &GradedMap<Bidegree>| g.to_total().entries().to_vec();
    let cols: Vec<Vec<Q>> = basis.iter().map(|b| flat(&fiber_map(ctx, b))).collect();
    let n = target.entries().len();
    let mut acc = FpMorphism::zero(&m.src, &m.tgt);
    if n == 0 {
        return Some(acc);
    }
    if cols.is_empty() {
        return target.is_zero().then_some(acc);
    }
    let a = Matrix::from_columns(n, &cols);
    let x = a.solve(target.entries()).ok()??;
    for (c, b) in x.iter().zip(&basis) {
        acc = acc.add(ctx.cat(), &b.scale(c)).ok()?;
    }
    Some(acc)
}

fn lift(e: crate::fp::ReplayError) -> MotiveError {
    MotiveError::Replay(e)
}

/// The inductive splitting: curves from their data, higher dimensions by
/// pulling back the splitting of a hyperplane section and using `ν`.
pub fn lefschetz_split(ctx: &Ctx, x: &MotivePresentation) -> Result<KunnethSplitting, MotiveError> {
    let level = x.d;
    let bx = x.bracket(ctx)?;
    let done = |projectors| Ok(KunnethSplitting { x: bx.clone(), d: level, projectors, method: SplitMethod::Lefschetz });
    match level {
        0 => return done(vec![MMorphism::identity(ctx, &bx)]),
        1 => {
            let ps = x.curve_split.as_ref().ok_or(MotiveError::Missing { level, what: "curve splitting".into() })?;
            return done(ps.iter().map(|p| mm(ctx, p)).collect());
        }
        _ => {}
    }
    let h = x.hyperplane.as_ref().ok_or(MotiveError::Missing { level, what: "hyperplane section".into() })?;
    for (i, ok) in check_weak_lefschetz(ctx, x)?.into_iter().enumerate() {
        if !ok {
            return Err(MotiveError::Precondition { level, degree: i as i64, what: "weak Lefschetz fails".into() });
        }
    }
    if x.duality.len() != level + 1 {
        return Err(MotiveError::Missing { level, what: "duality isomorphisms".into() });
    }
    let ys = lefschetz_split(ctx, &h.y)?;
    let q = mm(ctx, &h.q);
    let d = level as i64;
    let mut low = vec![];
    for i in 0..level {
        let nu = x.nu.get(i).cloned().flatten().ok_or(MotiveError::Missing { level, what: format!("ν_{i}") })?;
        let qi = ys.projectors[i].compose(&q).map_err(lift)?;
        let qi_fp = realize(ctx, &qi)
            .ok_or(MotiveError::Precondition { level, degree: i as i64, what: "hyperplane projector is not realized".into() })?;
        let img = fp_image(ctx, &qi_fp)?;
        let p = MMorphism::fp(ctx, img.epi.clone());
        let mut back = qi.dual(ctx)?;
        if i > 0 {
            back = back.whisker(ctx, &x.lpow_complex(ctx, -(i as i64))?)?;
        }
        let nu = MMorphism::roof(ctx, nu)?;
        let lifted = nu.compose(&mm(ctx, &x.duality[i])).and_then(|m| m.compose(&back)).map_err(lift)?;
        let c = p.compose(&lifted).map_err(lift)?;
        if let Some((deg, _)) = c.matrix.target().iter().find(|&(b, n)| c.matrix.block(b).rank() != n) {
            return Err(MotiveError::NotInvertible { level, degree: deg.1 });
        }
        let sigma = MMorphism::factor_epi(&c, &lifted).map_err(lift)?;
        low.push(sigma.compose(&p).map_err(lift)?);
    }
    let dd = mm(ctx, &x.duality[level]);
    let dinv = dd.inverse().map_err(lift)?;
    let ld = x.lpow_complex(ctx, -d)?;
    let mut high = vec![];
    for p in &low {
        let t = p.dual(ctx)?.whisker(ctx, &ld)?;
        high.push(dd.compose(&t).and_then(|m| m.compose(&dinv)).map_err(lift)?);
    }
    let mut mid = MMorphism::identity(ctx, &bx);
    for p in low.iter().chain(&high) {
        mid = mid.sub(p).map_err(lift)?;
    }
    let mut projectors = low;
    projectors.push(mid);
    projectors.extend(high.into_iter().rev());
    done(projectors)
}

/// Splits off `X_i` and `X_{2d-i}` stage by stage, solving for a section of
/// each image epimorphism. Fails at the first stage where no section exists.
pub fn semisimple_split(ctx: &Ctx, x: &MotivePresentation) -> Result<KunnethSplitting, MotiveError> {
    let cat = ctx.cat();
    let level = x.d;
    let d = level as i64;
    let bx = x.bracket(ctx)?;
    if x.duality.len() != level + 1 {
        return Err(MotiveError::Missing { level, what: "duality isomorphisms".into() });
    }
    let dd = &x.duality[level];
    let dinv = ctx
        .factor_through(dd, &x.complex(ctx)?.identity(cat))
        .ok_or(MotiveError::NotInvertible { level, degree: 0 })?;
    let ld = x.lpow_complex(ctx, -d)?;
    let mut e = FpMorphism::identity(cat, &bx);
    let (mut low, mut high) = (vec![], vec![]);
    for i in 0..level {
        let n = d - i as i64;
        let ln = x.lpow_complex(ctx, n)?;
        let e_tw = FpMorphism::bracket(&e.g0.tensor(cat, &ln.identity(cat))?);
        let f = e_tw.compose(cat, &FpMorphism::bracket(&x.ell_power(ctx, 0, n)?))?.compose(cat, &e)?;
        let img = fp_image(ctx, &f)?;
        let s = section(ctx, &img.epi).ok_or(MotiveError::SectionFailed { stage: i })?;
        let pi = s.compose(cat, &img.epi)?;
        let pd = pi.g0.dual(cat)?.tensor(cat, &ld.identity(cat))?;
        let hi = FpMorphism::bracket(&dd.compose(cat, &pd)?.compose(cat, &dinv)?);
        e = e.sub(cat, &pi)?.sub(cat, &hi)?;
        low.push(MMorphism::fp(ctx, pi));
        high.push(MMorphism::fp(ctx, hi));
    }
    let mut projectors = low;
    projectors.push(MMorphism::fp(ctx, e));
    projectors.extend(high.into_iter().rev());
    Ok(KunnethSplitting { x: bx, d: level, projectors, method: SplitMethod::Semisimple })
}

/// `s` with `epi ∘ s = id`, by linear solving over `Hom(img, F)`.
fn section(ctx: &Ctx, epi: &FpMorphism) -> Option<FpMorphism> {
    let cat = ctx.cat();
    let (f, img) = (&epi.src, &epi.tgt);
    let basis = fp_hom(ctx, img, f).basis(ctx);
    let end = fp_hom(ctx, img, img);
    let target = end.coords(ctx, &FpMorphism::identity(cat, img))?;
    let mut acc = FpMorphism::zero(img, f);
    if target.is_empty() {
        return Some(acc);
    }
    let cols: Vec<Vec<Q>> =
        basis.iter().map(|s| epi.compose(cat, s).ok().and_then(|c| end.coords(ctx, &c))).collect::<Option<_>>()?;
    if cols.is_empty() {
        return target.iter().all(|t| *t == Q::from_integer(0.into())).then_some(acc);
    }
    let x = Matrix::from_columns(target.len(), &cols).solve(&target).ok()??;
    for (c, b) in x.iter().zip(&basis) {
        acc = acc.add(cat, &b.scale(c)).ok()?;
    }
    Some(acc)
}
