use super::lefschetz::{check_hard_lefschetz, realize, KunnethSplitting};
use super::{mm, MotiveError, MotivePresentation};
use crate::fp::{
    bracket, fiber, fiber_map, fp_direct_sum, fp_image, fp_kernel, m_iso_test, tensor_fp, tensor_fp_mor, Ctx,
    FpMorphism, MMorphism, Obj,
};
use crate::graded::Bidegree;
use crate::linalg::{Matrix, Q};

/// `L^j P^k` sitting in degree `i = k + 2j`, with its map into `[X]`.
#[derive(Clone, Debug)]
pub struct PrimitivePiece {
    pub i: i64,
    pub j: i64,
    pub k: i64,
    pub obj: Obj,
    pub map: FpMorphism,
    pub dim: usize,
    pub injective: bool,
}

#[derive(Clone, Debug)]
pub struct PrimitiveData {
    pub x: Obj,
    pub d: usize,
    /// `(k, P^k, P^k -> [X])`.
    pub primitives: Vec<(i64, Obj, FpMorphism)>,
    pub primitive_dims: Vec<usize>,
    pub pieces: Vec<PrimitivePiece>,
    /// `(i, Σ_j dim L^j P^{i-2j}, dim H^i)`.
    pub counts: Vec<(i64, usize, usize)>,
    /// The pieces of degree `i` span `H^i`.
    pub spans: Vec<bool>,
}

impl PrimitiveData {
    pub fn ok(&self) -> bool {
        self.pieces.iter().all(|p| p.injective)
            && self.counts.iter().all(|(_, a, b)| a == b)
            && self.spans.iter().all(|&s| s)
    }
}

fn sign(k: i64) -> Q {
    Q::from_integer(if (k * (k + 1) / 2) % 2 == 0 { 1 } else { -1 }.into())
}

pub fn primitive_decompose(
    ctx: &Ctx,
    x: &MotivePresentation,
    s: &KunnethSplitting,
) -> Result<PrimitiveData, MotiveError> {
    let cat = ctx.cat();
    let level = x.d;
    let d = level as i64;
    for (i, ok) in check_hard_lefschetz(ctx, x)?.into_iter().enumerate() {
        if !ok {
            return Err(MotiveError::Precondition { level, degree: i as i64, what: "hard Lefschetz fails".into() });
        }
    }
    let bx = x.bracket(ctx)?;
    let mut primitives = vec![];
    for k in 0..=d {
        let pk = realize(ctx, &s.projectors[k as usize])
            .ok_or(MotiveError::Precondition { level, degree: k, what: "projector is not realized".into() })?;
        let img = fp_image(ctx, &pk)?;
        let (p, incl) = if x.ell.is_none() {
            (img.obj, img.mono)
        } else {
            let l = FpMorphism::bracket(&x.ell_power(ctx, 0, d - k + 1)?);
            let ker = fp_kernel(ctx, &l.compose(cat, &img.mono)?)?;
            (ker.obj, img.mono.compose(cat, &ker.incl)?)
        };
        primitives.push((k, p, incl));
    }
    let primitive_dims = primitives.iter().map(|(_, p, _)| fiber(ctx, p).dims().total_dim()).collect();
    let dims = x.dims(ctx)?;
    let (mut pieces, mut counts, mut spans) = (vec![], vec![], vec![]);
    for i in 0..=2 * d {
        let mut blocks: Option<Matrix> = None;
        let mut total = 0;
        for j in (i - d).max(0)..=i / 2 {
            let k = i - 2 * j;
            let (_, p, incl) = &primitives[k as usize];
            let (obj, map) = if j == 0 {
                (p.clone(), incl.clone())
            } else {
                let lj = bracket(&x.lpow_complex(ctx, -j)?);
                let lifted = tensor_fp_mor(ctx, incl, &FpMorphism::identity(cat, &lj))?;
                let up = FpMorphism::bracket(&x.ell_power(ctx, -j, j)?);
                (tensor_fp(ctx, p, &lj)?, up.compose(cat, &lifted)?)
            };
            let fm = fiber_map(ctx, &map);
            let dim = fiber(ctx, &obj).dims().total_dim();
            let b = fm.block(Bidegree(0, i));
            blocks = Some(match blocks {
                None => b,
                Some(acc) => acc.hstack(&b),
            });
            total += dim;
            pieces.push(PrimitivePiece { i, j, k, obj, map, dim, injective: fm.is_injective() && fm.total_rank() == dim });
        }
        let h = dims[i as usize];
        counts.push((i, total, h));
        spans.push(blocks.is_some_and(|b| b.rank() == h) || h == 0);
    }
    Ok(PrimitiveData { x: bx, d: level, primitives, primitive_dims, pieces, counts, spans })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub holds: bool,
}

/// Certified operators on `[X]` and its twists.
#[derive(Clone, Debug)]
pub struct BData {
    /// `(i, j)` of each `p`.
    pub labels: Vec<(i64, i64)>,
    pub p: Vec<MMorphism>,
    /// `Λ: [X] -> [X ⊗ L]`.
    pub lambda: MMorphism,
    /// `∗_i: [X] -> [X ⊗ L^{-(d-i)}]`.
    pub star: Vec<MMorphism>,
    /// `ᶜΛ_i = ∗^{-1} ℓ ∗_i: [X] -> [X ⊗ L]` for `i >= 2`.
    pub clambda: Vec<(i64, MMorphism)>,
    pub relations: Vec<Relation>,
}

impl BData {
    pub fn ok(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn certificates(&self) -> Vec<&MMorphism> {
        let mut v: Vec<&MMorphism> = self.p.iter().collect();
        v.push(&self.lambda);
        v.extend(&self.star);
        v.extend(self.clambda.iter().map(|(_, m)| m));
        v
    }
}

fn r(e: crate::fp::ReplayError) -> MotiveError {
    MotiveError::Replay(e)
}

fn sum(ctx: &Ctx, src: &Obj, tgt: &Obj, ms: impl IntoIterator<Item = MMorphism>) -> Result<MMorphism, MotiveError> {
    let mut acc = MMorphism::zero(ctx, src, tgt);
    for m in ms {
        acc = acc.add(&m).map_err(r)?;
    }
    Ok(acc)
}

/// `m ⊗ id_[z]`, going through an equal fp morphism of representables when
/// one exists so that only chain maps get tensored.
fn whisker(ctx: &Ctx, m: &MMorphism, z: &crate::complex::Complex) -> Result<MMorphism, MotiveError> {
    if m.src.is_representable() && m.tgt.is_representable() {
        if let Some(f) = realize(ctx, m) {
            return Ok(mm(ctx, &f.g0.tensor(ctx.cat(), &z.identity(ctx.cat()))?));
        }
    }
    Ok(m.whisker(ctx, z)?)
}

/// Inverse of `e_tgt ∘ m ∘ e_src` between the two summands.
fn summand_inverse(m: &MMorphism, e_src: &MMorphism, e_tgt: &MMorphism) -> Result<MMorphism, MotiveError> {
    let m = e_tgt.compose(m).and_then(|x| x.compose(e_src)).map_err(r)?;
    MMorphism::summand_inverse(&m, e_src, e_tgt).map_err(r)
}

pub fn derive_b_operators(
    ctx: &Ctx,
    x: &MotivePresentation,
    _s: &KunnethSplitting,
    prim: &PrimitiveData,
) -> Result<BData, MotiveError> {
    let cat = ctx.cat();
    let d = x.d as i64;
    let bx = prim.x.clone();
    let pieces = &prim.pieces;
    // T = ⊕ L^j P^k with its injections and projections
    let mut t = pieces[0].obj.clone();
    let mut inj = vec![FpMorphism::identity(cat, &t)];
    let mut proj = vec![FpMorphism::identity(cat, &t)];
    for p in &pieces[1..] {
        let (o, i2, p2) = fp_direct_sum(ctx, &t, &p.obj)?;
        inj = inj.iter().map(|m| i2[0].compose(cat, m)).collect::<Result<_, _>>()?;
        proj = proj.iter().map(|m| m.compose(cat, &p2[0])).collect::<Result<_, _>>()?;
        inj.push(i2[1].clone());
        proj.push(p2[1].clone());
        t = o;
    }
    let mut big = FpMorphism::zero(&t, &bx);
    for (p, pr) in pieces.iter().zip(&proj) {
        big = big.add(cat, &p.map.compose(cat, pr)?)?;
    }
    if !m_iso_test(ctx, &big) {
        return Err(MotiveError::Invalid("primitive pieces do not decompose [X]".into()));
    }
    let big = MMorphism::fp(ctx, big);
    let inv = big.inverse().map_err(r)?;
    let mut ps = vec![];
    for (a, b) in inj.iter().zip(&proj) {
        let e = MMorphism::fp(ctx, a.compose(cat, b)?);
        ps.push(big.compose(&e).and_then(|m| m.compose(&inv)).map_err(r)?);
    }
    let labels: Vec<(i64, i64)> = pieces.iter().map(|p| (p.i, p.j)).collect();
    let find = |i: i64, j: i64| labels.iter().position(|&l| l == (i, j)).expect("piece");
    let deg_proj = |i: i64| sum(ctx, &bx, &bx, pieces.iter().zip(&ps).filter(|(p, _)| p.i == i).map(|(_, m)| m.clone()));
    let mut relations = vec![];
    let mut rel = |name: String, holds: bool| relations.push(Relation { name, holds });

    let mats: Vec<_> = ps.iter().map(|m| &m.matrix).collect();
    let idem = mats.iter().all(|m| m.compose(m).ok().as_ref() == Some(*m));
    let orth = mats
        .iter()
        .enumerate()
        .all(|(a, m)| mats.iter().enumerate().all(|(b, n)| a == b || m.compose(n).is_ok_and(|c| c.is_zero())));
    let total = mats.iter().skip(1).fold(mats[0].clone(), |acc, m| acc.add(m));
    rel("p idempotent".into(), idem);
    rel("p orthogonal".into(), orth);
    rel("p sums to identity".into(), total.is_identity());
    for (p, m) in pieces.iter().zip(&ps) {
        rel(format!("p_({},{}) has rank dim L^{}P^{}", p.i, p.j, p.j, p.k), m.matrix.total_rank() == p.dim);
    }

    let (lambda, star, clambda) = if x.ell.is_none() {
        let star = vec![sum(ctx, &bx, &bx, ps.iter().cloned())?];
        (MMorphism::zero(ctx, &bx, &bx), star, vec![])
    } else {
        let l1 = x.lpow_complex(ctx, -1)?;
        let ell = mm(ctx, &x.ell_at(ctx, -1)?);
        let keep = sum(ctx, &bx, &bx, pieces.iter().zip(&ps).filter(|(p, _)| p.j < d - p.k).map(|(_, m)| m.clone()))?;
        let e_src = whisker(ctx, &keep, &l1)?;
        let e_tgt = sum(ctx, &bx, &bx, pieces.iter().zip(&ps).filter(|(p, _)| p.j >= 1).map(|(_, m)| m.clone()))?;
        let lambda = summand_inverse(&ell, &e_src, &e_tgt)?;
        let le = lambda.compose(&ell).map_err(r)?;
        let el = ell.compose(&lambda).map_err(r)?;
        rel("Λ∘ℓ projects onto the part where ℓ is injective".into(), le.matrix == e_src.matrix);
        rel("ℓ∘Λ projects onto the image of ℓ".into(), el.matrix == e_tgt.matrix);
        let mut star = vec![];
        for i in 0..=2 * d {
            let mut acc = vec![];
            for (n, p) in pieces.iter().enumerate().filter(|(_, p)| p.i == i) {
                let part = if i <= d {
                    mm(ctx, &x.ell_power(ctx, 0, d - i)?).compose(&ps[n]).map_err(r)?
                } else {
                    let up = mm(ctx, &x.ell_power(ctx, d - i, i - d)?);
                    let src = whisker(ctx, &ps[find(2 * d - i, d - p.k - p.j)], &x.lpow_complex(ctx, d - i)?)?;
                    summand_inverse(&up, &src, &ps[n])?
                };
                acc.push(part.scale(&sign(p.k)));
            }
            let tgt = bracket(&x.frame(ctx, d - i)?);
            let s = sum(ctx, &bx, &tgt, acc)?;
            let b = s.matrix.block(Bidegree(0, i));
            rel(format!("∗ is invertible in degree {i}"), b.rows() == b.cols() && b.is_invertible());
            star.push(s);
        }
        let mut clambda = vec![];
        for i in 2..=2 * d {
            let a = d - i + 2;
            let st = whisker(ctx, &star[(i - 2) as usize], &l1)?;
            let re = mm(ctx, &x.reframe(ctx, x.obj(ctx)?, a)?);
            let st = re.compose(&st).map_err(r)?;
            let e_src = whisker(ctx, &deg_proj(i - 2)?, &l1)?;
            let mut e_tgt = deg_proj(2 * d - i + 2)?;
            if a - 1 != 0 {
                e_tgt = whisker(ctx, &e_tgt, &x.lpow_complex(ctx, a - 1)?)?;
            }
            let back = summand_inverse(&st, &e_src, &e_tgt)?;
            let ell_t = mm(ctx, &x.ell_at(ctx, d - i)?);
            let c = back.compose(&ell_t).and_then(|m| m.compose(&star[i as usize])).map_err(r)?;
            let lam_i = lambda.compose(&deg_proj(i)?).map_err(r)?;
            rel(format!("ᶜΛ agrees with Λ in degree {i}"), c.matrix == lam_i.matrix);
            clambda.push((i, c));
        }
        (lambda, star, clambda)
    };
    let mut data = BData { labels, p: ps, lambda, star, clambda, relations };
    let replays = data.certificates().iter().all(|m| m.verify(ctx).is_ok());
    data.relations.push(Relation { name: "certificates replay".into(), holds: replays });
    Ok(data)
}
