use std::collections::BTreeMap;

use super::lefschetz::{realize, KunnethSplitting};
use super::MotiveError;
use crate::category::ObjId;
use crate::fp::{fiber, fp_image, m_hom_bounds, CoverSet, Ctx, Obj};
use crate::graded::{GradedMap, GradedSpace};
use crate::linalg::{Matrix, Q};
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
pub struct PureClass {
    pub weight: i64,
    /// `(object name, summand, fiber dimension)`.
    pub members: Vec<(String, Obj, usize)>,
}

#[derive(Clone, Debug)]
pub struct CrossHom {
    pub a: (String, i64),
    pub b: (String, i64),
    pub certified: usize,
    pub nonzero: bool,
}

#[derive(Clone, Debug)]
pub struct PurityReport {
    pub classes: Vec<PureClass>,
    pub homs: Vec<CrossHom>,
}

/// Groups the nonzero summands `X_i` of every object by `i` and checks that
/// certified morphisms between different weights vanish.
pub fn purity_decompose(
    ctx: &Ctx,
    objects: &[(String, &KunnethSplitting)],
    depth: usize,
) -> Result<PurityReport, MotiveError> {
    let mut by_weight: BTreeMap<i64, Vec<(String, Obj, usize)>> = BTreeMap::new();
    for (name, s) in objects {
        for (i, p) in s.projectors.iter().enumerate() {
            let e = realize(ctx, p)
                .ok_or(MotiveError::Precondition { level: s.d, degree: i as i64, what: "projector is not realized".into() })?;
            let img = fp_image(ctx, &e)?;
            let dim = fiber(ctx, &img.obj).dims().total_dim();
            if dim > 0 {
                by_weight.entry(i as i64).or_default().push((name.clone(), img.obj, dim));
            }
        }
    }
    let flat: Vec<(i64, &(String, Obj, usize))> =
        by_weight.iter().flat_map(|(w, ms)| ms.iter().map(move |m| (*w, m))).collect();
    let mut homs = vec![];
    for &(wa, a) in &flat {
        for &(wb, b) in &flat {
            let hb = m_hom_bounds(ctx, &a.1, &b.1, &CoverSet::default(), depth, None)?;
            let nonzero = hb.certified.iter().any(|m| !m.matrix.is_zero());
            if wa != wb && nonzero {
                return Err(MotiveError::Invalid(format!(
                    "certified nonzero morphism from {} (weight {wa}) to {} (weight {wb})",
                    a.0, b.0
                )));
            }
            homs.push(CrossHom { a: (a.0.clone(), wa), b: (b.0.clone(), wb), certified: hb.certified_dim(), nonzero });
        }
    }
    let classes = by_weight.into_iter().map(|(weight, members)| PureClass { weight, members }).collect();
    Ok(PurityReport { classes, homs })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistBlock {
    pub x: String,
    pub y: String,
    pub wx: i64,
    pub wy: i64,
    pub sign: i8,
    /// The twisted symmetry is the sign-free swap on this block.
    pub plain: bool,
}

#[derive(Clone, Debug, Default)]
pub struct TwistReport {
    pub blocks: Vec<TwistBlock>,
    pub involutive: bool,
    pub natural: bool,
    pub hexagon: bool,
    pub unit_entries: bool,
    pub pairs: usize,
    pub triples: usize,
}

impl TwistReport {
    pub fn ok(&self) -> bool {
        self.involutive && self.natural && self.hexagon && self.unit_entries && self.blocks.iter().all(|b| b.plain)
    }
}

/// Position of each Kronecker basis vector `e_a ⊗ e_b` in the graded tensor basis.
fn kron_to_graded(v: &GradedSpace<i64>, w: &GradedSpace<i64>) -> Matrix {
    let t = v.tensor(w);
    let n = v.total_dim() * w.total_dim();
    let mut m = Matrix::zeros(n, n);
    for (d, _) in t.iter() {
        for (pos, (a, i, j)) in v.tensor_basis(w, d).into_iter().enumerate() {
            let k = (v.offset(a) + i) * w.total_dim() + w.offset(d - a) + j;
            m[(t.offset(d) + pos, k)] = Q::one();
        }
    }
    m
}

fn degrees(v: &GradedSpace<i64>) -> Vec<i64> {
    v.iter().flat_map(|(d, n)| std::iter::repeat_n(d, n)).collect()
}

fn swap(n: usize, m: usize) -> Matrix {
    let mut s = Matrix::zeros(n * m, n * m);
    for a in 0..n {
        for b in 0..m {
            s[(b * n + a, a * m + b)] = Q::one();
        }
    }
    s
}

struct Twister<'a> {
    ctx: &'a Ctx,
    weights: &'a BTreeMap<String, Vec<i64>>,
}

impl Twister<'_> {
    fn space(&self, x: ObjId) -> GradedSpace<i64> {
        self.ctx.h().obj(x)
    }

    /// `μ` in the Kronecker basis.
    fn mu(&self, x: ObjId, y: ObjId) -> Result<Matrix, MotiveError> {
        let m = self.ctx.h().mu(x, y)?;
        Ok(m.to_total().mul(&kron_to_graded(&self.space(x), &self.space(y))))
    }

    /// `(-1)^{ij} H(σ)` on `H(x) ⊗ H(y)` in Kronecker bases.
    fn twisted(&self, x: ObjId, y: ObjId) -> Result<Matrix, MotiveError> {
        let cat = self.ctx.cat();
        let (xy, yx) = (cat.tensor_obj(x, y)?, cat.tensor_obj(y, x)?);
        let hs: GradedMap<i64> = self.ctx.h().mor(xy, yx, &cat.symmetry(x, y)?);
        let inv = self.mu(y, x)?.inverse().ok_or(MotiveError::Invalid("μ is not invertible".into()))?;
        let s = inv.mul(&hs.to_total()).mul(&self.mu(x, y)?);
        let (dx, dy) = (degrees(&self.space(x)), degrees(&self.space(y)));
        let mut d = Matrix::zeros(s.cols(), s.cols());
        for (a, p) in dx.iter().enumerate() {
            for (b, q) in dy.iter().enumerate() {
                let k = a * dy.len() + b;
                d[(k, k)] = if (p * q) % 2 == 0 { Q::one() } else { -Q::one() };
            }
        }
        Ok(s.mul(&d))
    }

    fn check_weights(&self, label: &str, x: ObjId) -> Result<(), MotiveError> {
        let w = self.weights.get(label).ok_or(MotiveError::Missing { level: 0, what: format!("purity data for {label}") })?;
        if let Some(d) = self.space(x).iter().map(|(d, _)| d).find(|d| !w.contains(d)) {
            return Err(MotiveError::Invalid(format!("{label} has fiber in degree {d} outside its weights")));
        }
        Ok(())
    }
}

/// `(-1)^{ij} H(σ_{x,y})` in the Kronecker basis of `H(x) ⊗ H(y)`.
pub fn twisted_symmetry(ctx: &Ctx, x: ObjId, y: ObjId) -> Result<Matrix, MotiveError> {
    let none = BTreeMap::new();
    Twister { ctx, weights: &none }.twisted(x, y)
}

/// Twists the symmetry by `(-1)^{ij}` on pure pieces of weights `i, j` and
/// validates the result at the fiber level over the window.
pub fn sign_twist(
    ctx: &Ctx,
    window: &[String],
    weights: &BTreeMap<String, Vec<i64>>,
) -> Result<TwistReport, MotiveError> {
    let tw = Twister { ctx, weights };
    let cat = ctx.cat();
    let ids: Vec<ObjId> = window.iter().map(|l| ctx.obj(l)).collect::<Result<_, _>>()?;
    for (l, &x) in window.iter().zip(&ids) {
        tw.check_weights(l, x)?;
    }
    let mut rep = TwistReport { involutive: true, natural: true, hexagon: true, unit_entries: true, ..Default::default() };
    let mut sig = BTreeMap::new();
    for (a, &x) in ids.iter().enumerate() {
        for (b, &y) in ids.iter().enumerate() {
            if cat.tensor_obj(x, y).is_err() || cat.tensor_obj(y, x).is_err() {
                continue;
            }
            sig.insert((a, b), tw.twisted(x, y)?);
        }
    }
    for (&(a, b), s) in &sig {
        rep.pairs += 1;
        let (vx, vy) = (tw.space(ids[a]), tw.space(ids[b]));
        let (nx, ny) = (vx.total_dim(), vy.total_dim());
        rep.unit_entries &= s.entries().iter().all(|e| e.is_zero() || *e == Q::one() || *e == -Q::one());
        if let Some(back) = sig.get(&(b, a)) {
            rep.involutive &= back.mul(s).is_identity();
        }
        let plain = swap(nx, ny);
        let (dx, dy) = (degrees(&vx), degrees(&vy));
        for (p, _) in vx.iter() {
            for (q, _) in vy.iter() {
                let mut ok = true;
                for (i, &pi) in dx.iter().enumerate() {
                    for (j, &qj) in dy.iter().enumerate() {
                        if pi != p || qj != q {
                            continue;
                        }
                        let c = i * ny + j;
                        ok &= (0..s.rows()).all(|r| s[(r, c)] == plain[(r, c)]);
                    }
                }
                let sign = if (p * q) % 2 == 0 { 1 } else { -1 };
                rep.blocks.push(TwistBlock { x: window[a].clone(), y: window[b].clone(), wx: p, wy: q, sign, plain: ok });
            }
        }
        // naturality against endomorphisms of either factor
        for (side, z) in [(0, ids[a]), (1, ids[b])] {
            let basis = cat.hom_basis(z, z);
            for c in 0..basis.cols() {
                let f = ctx.h().mor(z, z, &basis.column(c)).to_total();
                let (l, r) = if side == 0 {
                    (Matrix::identity(ny).kron(&f), f.kron(&Matrix::identity(ny)))
                } else {
                    (f.kron(&Matrix::identity(nx)), Matrix::identity(nx).kron(&f))
                };
                rep.natural &= s.mul(&r) == l.mul(s);
            }
        }
    }
    for (a, &x) in ids.iter().enumerate() {
        for (b, &y) in ids.iter().enumerate() {
            for (c, &z) in ids.iter().enumerate() {
                let Ok(yz) = cat.tensor_obj(y, z) else { continue };
                if cat.tensor_obj(x, yz).is_err() || cat.tensor_obj(yz, x).is_err() {
                    continue;
                }
                let (Some(sxy), Some(sxz)) = (sig.get(&(a, b)), sig.get(&(a, c))) else { continue };
                rep.triples += 1;
                let (nx, ny, nz) = (tw.space(x).total_dim(), tw.space(y).total_dim(), tw.space(z).total_dim());
                let big = tw.twisted(x, yz)?;
                let m = tw.mu(y, z)?;
                let minv = m.inverse().ok_or(MotiveError::Invalid("μ is not invertible".into()))?;
                let lhs = minv.kron(&Matrix::identity(nx)).mul(&big).mul(&Matrix::identity(nx).kron(&m));
                let rhs = Matrix::identity(ny).kron(sxz).mul(&sxy.kron(&Matrix::identity(nz)));
                rep.hexagon &= lhs == rhs;
            }
        }
    }
    Ok(rep)
}
