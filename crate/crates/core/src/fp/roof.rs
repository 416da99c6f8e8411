//! Roofs `A -> C <- B` with `H(w)` invertible, cover sets, and the
//! certified/upper bound pair for hom spaces of the quotient.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::cert::MMorphism;
use super::{bracket, fiber, fp_hom, Ctx, FpError, FpMorphism, Obj};
use crate::category::{HomParams, ObjId};
use crate::complex::{cone, induced_map, injection, ChainMap, Complex};
use crate::functor::h_block;
use crate::graded::{Bidegree, GradedMap};
use crate::linalg::{Matrix, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoofMorphism {
    /// `A -> C`.
    pub f: ChainMap,
    /// `B -> C`, inverted by `H`.
    pub w: ChainMap,
}

impl RoofMorphism {
    pub fn new(ctx: &Ctx, f: ChainMap, w: ChainMap) -> Result<Self, FpError> {
        let r = RoofMorphism { f, w };
        r.check(ctx)?;
        Ok(r)
    }

    pub fn check(&self, ctx: &Ctx) -> Result<(), FpError> {
        if self.f.tgt != self.w.tgt {
            return Err(FpError::Shape("roof legs need a common apex".into()));
        }
        self.f.check(ctx.cat())?;
        self.w.check(ctx.cat())?;
        if !ctx.is_h_iso(&self.w) {
            return Err(FpError::NotHIso);
        }
        Ok(())
    }

    /// `(f, id)`.
    pub fn plain(ctx: &Ctx, f: ChainMap) -> Self {
        let w = f.tgt.identity(ctx.cat());
        RoofMorphism { f, w }
    }
}

/// `H(w)^{-1} ∘ H(f)` on fibers of brackets.
pub fn roof_matrix(ctx: &Ctx, r: &RoofMorphism) -> Result<GradedMap<Bidegree>, FpError> {
    r.check(ctx)?;
    let fa = fiber(ctx, &bracket(&r.f.src));
    let fb = fiber(ctx, &bracket(&r.w.src));
    let fc = fiber(ctx, &bracket(&r.f.tgt));
    let hf = induced_map(ctx.h(), &fa.parts, &fc.parts, &r.f);
    let hw = induced_map(ctx.h(), &fb.parts, &fc.parts, &r.w);
    let inv = hw.inverse().ok_or(FpError::NotHIso)?;
    Ok(inv.compose(&hf).expect("shapes"))
}

pub fn roof_to_morphism(ctx: &Ctx, r: &RoofMorphism) -> Result<MMorphism, FpError> {
    MMorphism::roof(ctx, r.clone())
}

/// Composite `A ⇝ D` of `first: A ⇝ B` and `second: B ⇝ D`, through the
/// homotopy pushout of `C1 <- B -> C2`.
pub fn compose_roofs(ctx: &Ctx, second: &RoofMorphism, first: &RoofMorphism) -> Result<RoofMorphism, FpError> {
    let cat = ctx.cat();
    if first.w.src != second.f.src {
        return Err(FpError::Shape("roofs do not compose".into()));
    }
    let (c1, c2) = (&first.w.tgt, &second.f.tgt);
    let legs = first.w.vcat(cat, &second.f.scale(&-Q::from_integer(1.into())))?;
    let p = cone(cat, &legs)?;
    let i1 = p.incl.compose(cat, &injection(cat, c1, c2, 0))?;
    let i2 = p.incl.compose(cat, &injection(cat, c1, c2, 1))?;
    RoofMorphism::new(ctx, i1.compose(cat, &first.f)?, i2.compose(cat, &second.w)?)
}

/// Maps available to the roof search.
#[derive(Clone, Debug, Default)]
pub struct CoverSet {
    /// H-epimorphisms.
    pub epis: Vec<ChainMap>,
    /// Maps inverted by `H`.
    pub isos: Vec<ChainMap>,
}

impl CoverSet {
    /// Index of the first listed map violating its invariant.
    pub fn validate(&self, ctx: &Ctx) -> Result<(), String> {
        for (i, p) in self.epis.iter().enumerate() {
            if p.check(ctx.cat()).is_err() || !ctx.is_h_epi(p) {
                return Err(format!("epi {i} is not an H-epimorphism"));
            }
        }
        for (i, w) in self.isos.iter().enumerate() {
            if w.check(ctx.cat()).is_err() || !ctx.is_h_iso(w) {
                return Err(format!("iso {i} is not inverted by H"));
            }
        }
        Ok(())
    }

    /// Single roofs `a ⇝ b`, identity-legged ones first.
    fn roofs(&self, ctx: &Ctx, a: &Complex, b: &Complex) -> Vec<RoofMorphism> {
        let cat = ctx.cat();
        let mut out: Vec<RoofMorphism> =
            ctx.kb_hom(a, b).basis(cat).into_iter().map(|f| RoofMorphism::plain(ctx, f)).collect();
        for w in self.isos.iter().filter(|w| w.src == *b) {
            for f in ctx.kb_hom(a, &w.tgt).basis(cat) {
                out.push(RoofMorphism { f, w: w.clone() });
            }
        }
        out
    }

    fn apexes(&self) -> Vec<Complex> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for m in self.isos.iter().chain(&self.epis) {
            if seen.insert(format!("{:?}", m.src)) {
                out.push(m.src.clone());
            }
        }
        out
    }
}

/// Whether the window objects span a semisimple category on which `H` is faithful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemisimplicityCertificate {
    pub objects: Vec<ObjId>,
    pub end_dim: usize,
    /// Rank of the regular trace form of the endomorphism algebra.
    pub trace_form_rank: usize,
    /// Rank of `H` on the endomorphism algebra.
    pub fiber_rank: usize,
}

impl SemisimplicityCertificate {
    pub fn holds(&self) -> bool {
        self.trace_form_rank == self.end_dim && self.fiber_rank == self.end_dim
    }

    /// Every term of `x` is a sum of certified objects.
    pub fn covers(&self, x: &Complex) -> bool {
        x.terms().values().all(|t| t.iter().all(|o| self.objects.contains(o)))
    }
}

pub fn semisimplicity_certificate(ctx: &Ctx, objects: &[ObjId]) -> SemisimplicityCertificate {
    let cat = ctx.cat();
    let mut objs = objects.to_vec();
    objs.sort();
    objs.dedup();
    let params = HomParams::new(cat, &objs, &objs);
    let basis = params.basis(cat);
    let n = basis.len();
    let coords = |m: &crate::category::BlockMor| m.params(cat).expect("endomorphism");
    // structure constants, then the trace form tr(L_a L_b)
    let prod: Vec<Vec<Vec<Q>>> =
        basis.iter().map(|b| basis.iter().map(|c| coords(&b.compose(cat, c).expect("shapes"))).collect()).collect();
    let traces: Vec<Q> = prod.iter().map(|cols| Matrix::from_columns(n, cols).trace()).collect();
    let mut form = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            form[(i, j)] = prod[i][j].iter().zip(&traces).fold(Q::zero(), |acc, (a, b)| acc + a * b);
        }
    }
    let hcols: Vec<Vec<Q>> = basis.iter().map(|b| h_block(ctx.h(), b).to_total().entries().to_vec()).collect();
    let fiber_rank = if n == 0 { 0 } else { Matrix::from_columns(hcols[0].len(), &hcols).rank() };
    SemisimplicityCertificate { objects: objs, end_dim: n, trace_form_rank: form.rank(), fiber_rank }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpperBound {
    /// All graded maps between the fibers.
    Ambient,
    /// `Hom` in the homotopy category, valid under a semisimplicity certificate.
    Semisimple,
}

#[derive(Clone, Debug)]
pub struct HomBounds {
    /// Independent certified morphisms.
    pub certified: Vec<MMorphism>,
    pub ambient_dim: usize,
    pub upper_dim: usize,
    pub upper: UpperBound,
}

impl HomBounds {
    pub fn certified_dim(&self) -> usize {
        self.certified.len()
    }

    pub fn met(&self) -> bool {
        self.certified.len() == self.upper_dim
    }
}

fn flatten(m: &GradedMap<Bidegree>) -> Vec<Q> {
    let mut out = Vec::new();
    for d in m.support() {
        out.extend(m.block(d).entries().iter().cloned());
    }
    out
}

/// Greedy independent subfamily, by fiber matrix.
struct Span {
    rows: Vec<Vec<Q>>,
    rank: usize,
    kept: Vec<MMorphism>,
}

impl Span {
    fn push(&mut self, m: MMorphism) {
        let v = flatten(&m.matrix);
        if v.iter().all(Zero::is_zero) {
            return;
        }
        let mut cand = self.rows.clone();
        cand.push(v);
        let r = Matrix::from_columns(cand[0].len(), &cand).rank();
        if r > self.rank {
            self.rows = cand;
            self.rank = r;
            self.kept.push(m);
        }
    }
}

/// Certified morphisms `F -> G` (fp classes, roofs up to `depth`, and
/// descents along cover epis) with the best available upper bound.
pub fn m_hom_bounds(
    ctx: &Ctx,
    f: &Obj,
    g: &Obj,
    covers: &CoverSet,
    depth: usize,
    semisimple: Option<&SemisimplicityCertificate>,
) -> Result<HomBounds, FpError> {
    let (ff, fg) = (fiber(ctx, f), fiber(ctx, g));
    let ambient_dim: usize = ff.dims().iter().map(|(b, n)| n * fg.dims().dim(b)).sum();
    let mut span = Span { rows: vec![], rank: 0, kept: vec![] };
    let hom = fp_hom(ctx, f, g);
    for phi in hom.basis(ctx) {
        span.push(MMorphism::fp(ctx, phi));
    }
    let reps = f.is_representable() && g.is_representable();
    if reps && depth >= 1 {
        let (a, b) = (f.x0(), g.x0());
        for r in covers.roofs(ctx, a, b) {
            span.push(MMorphism::roof(ctx, r)?);
        }
        if depth >= 2 {
            for m in covers.apexes() {
                let firsts = covers.roofs(ctx, a, &m);
                let seconds = covers.roofs(ctx, &m, b);
                for r2 in &seconds {
                    for r1 in &firsts {
                        span.push(MMorphism::roof(ctx, compose_roofs(ctx, r2, r1)?)?);
                    }
                }
            }
        }
        for p in covers.epis.iter().filter(|p| p.tgt == *a) {
            let pm = MMorphism::fp(ctx, FpMorphism::bracket(p));
            let cands: Vec<MMorphism> = covers
                .roofs(ctx, &p.src, b)
                .into_iter()
                .map(|r| MMorphism::roof(ctx, r))
                .collect::<Result<_, _>>()?;
            for m in descend(&pm, &cands) {
                span.push(m);
            }
        }
    }
    let (upper_dim, upper) = match semisimple {
        Some(c) if reps && c.holds() && c.covers(f.x0()) && c.covers(g.x0()) => (hom.dim(), UpperBound::Semisimple),
        _ => (ambient_dim, UpperBound::Ambient),
    };
    Ok(HomBounds { certified: span.kept, ambient_dim, upper_dim, upper })
}

/// Combinations of `cands: P -> G` vanishing on `ker H(p)`, pushed down along `p: P -> A`.
fn descend(p: &MMorphism, cands: &[MMorphism]) -> Vec<MMorphism> {
    if cands.is_empty() {
        return vec![];
    }
    // conditions: for each degree, cand ∘ ker(p) = 0
    let mut cond_cols: Vec<Vec<Q>> = Vec::new();
    for c in cands {
        let mut col = Vec::new();
        for d in p.matrix.support() {
            let k = p.matrix.block(d).kernel_basis();
            if k.cols() == 0 {
                continue;
            }
            col.extend(c.matrix.block(d).mul(&k).entries().iter().cloned());
        }
        cond_cols.push(col);
    }
    let rows = cond_cols[0].len();
    let sols = if rows == 0 { Matrix::identity(cands.len()) } else { Matrix::from_columns(rows, &cond_cols).kernel_basis() };
    let mut out = Vec::new();
    for s in sols.columns() {
        let mut acc: Option<MMorphism> = None;
        for (c, x) in cands.iter().zip(&s) {
            if x.is_zero() {
                continue;
            }
            let term = c.scale(x);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term).expect("same endpoints"),
            });
        }
        if let Some(m) = acc {
            if let Ok(d) = MMorphism::factor_epi(p, &m) {
                out.push(d);
            }
        }
    }
    out
}
