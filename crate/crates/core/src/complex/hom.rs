//! Morphisms in the homotopy category, homology under a fiber functor, and
//! the distinguished triangles built from H-epimorphisms.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{cone, hom_params_by_degree, linear_matrix, ChainMap, Complex, ComplexError};
use crate::category::{BlockMor, Category, HomParams};
use crate::functor::{h_block, sum_space, Fiber};
use crate::graded::{Bidegree, GradedMap, GradedSpace};
use crate::linalg::{Matrix, Subquotient, Q};

/// Parameters of a family `X_n -> Y_{n+shift}`, concatenated over `n`.
#[derive(Clone, Debug)]
pub struct ChainParams {
    pub shift: i64,
    parts: Vec<(i64, HomParams, usize)>,
    dim: usize,
}

impl ChainParams {
    pub fn new(cat: &dyn Category, x: &Complex, y: &Complex, shift: i64) -> Self {
        let parts = hom_params_by_degree(cat, x, y, shift);
        let dim = parts.last().map(|(_, p, o)| o + p.dim()).unwrap_or(0);
        ChainParams { shift, parts, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_comps(&self, cat: &dyn Category, p: &[Q]) -> BTreeMap<i64, BlockMor> {
        self.parts
            .iter()
            .map(|(n, hp, o)| (*n, hp.to_mor(cat, &p[*o..*o + hp.dim()])))
            .collect()
    }

    /// Inverse of [`Self::to_comps`]; `None` if some component is not admissible.
    pub fn from_comps(&self, cat: &dyn Category, comps: &BTreeMap<i64, BlockMor>) -> Option<Vec<Q>> {
        let mut out = vec![Q::zero(); self.dim];
        for (n, hp, o) in &self.parts {
            if let Some(c) = comps.get(n) {
                let v = c.params(cat)?;
                out[*o..*o + hp.dim()].clone_from_slice(&v);
            }
        }
        Some(out)
    }

    /// `(degree, local index)` of a global parameter index.
    fn locate(&self, k: usize) -> (i64, &HomParams, usize) {
        let (n, hp, o) = self.parts.iter().rev().find(|(_, _, o)| *o <= k).expect("index in range");
        (*n, hp, k - o)
    }

    fn offset_of(&self, n: i64) -> Option<(usize, &HomParams)> {
        self.parts.iter().find(|e| e.0 == n).map(|(_, hp, o)| (*o, hp))
    }
}

/// `Hom_{K^b}(X, Y)`: chain maps modulo null-homotopic ones, in parameter coordinates.
#[derive(Clone, Debug)]
pub struct KbHom {
    pub src: Complex,
    pub tgt: Complex,
    pub maps: ChainParams,
    pub homotopies: ChainParams,
    pub space: Subquotient,
    homotopy_image: Matrix,
}

impl KbHom {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn chain_map(&self, cat: &dyn Category, p: &[Q]) -> ChainMap {
        ChainMap::unchecked(&self.src, &self.tgt, self.maps.to_comps(cat, p))
    }

    /// Chain maps representing a basis of the quotient.
    pub fn basis(&self, cat: &dyn Category) -> Vec<ChainMap> {
        self.space.representatives().columns().iter().map(|c| self.chain_map(cat, c)).collect()
    }

    /// Quotient coordinates of a chain map; `None` if `f` is not a chain map `X -> Y`.
    pub fn class_of(&self, cat: &dyn Category, f: &ChainMap) -> Option<Vec<Q>> {
        if f.src != self.src || f.tgt != self.tgt {
            return None;
        }
        self.space.reduce(&self.maps.from_comps(cat, f.comps())?)
    }

    /// A null-homotopy `s` with `f = d s + s d`, if one exists.
    pub fn null_homotopy(&self, cat: &dyn Category, f: &ChainMap) -> Option<BTreeMap<i64, BlockMor>> {
        let v = self.maps.from_comps(cat, f.comps())?;
        if self.homotopies.dim() == 0 {
            return v.iter().all(Zero::is_zero).then(BTreeMap::new);
        }
        let s = self.homotopy_image.solve(&v).ok()??;
        Some(self.homotopies.to_comps(cat, &s))
    }
}

/// Coordinates of `d^Y_m f_m - f_{m-1} d^X_m` for every `m`, when `f` has the
/// single component `c` in degree `n`.
fn chain_defect(cat: &dyn Category, x: &Complex, y: &Complex, n: i64, c: &BlockMor, layout: &[(i64, usize, usize)]) -> Vec<Q> {
    let total = layout.last().map(|e| e.1 + e.2).unwrap_or(0);
    let mut out = vec![Q::zero(); total];
    let mut put = |m: i64, b: BlockMor| {
        if let Some(&(_, o, l)) = layout.iter().find(|e| e.0 == m) {
            for (dst, v) in out[o..o + l].iter_mut().zip(b.coords()) {
                *dst += v;
            }
        }
    };
    put(n, y.d(cat, n).compose(cat, c).expect("shapes"));
    put(n + 1, c.compose(cat, &x.d(cat, n + 1)).expect("shapes").neg());
    out
}

/// Source of `Hom_{K^b}` spaces, so callers can share a cache.
pub type KbSource<'a> = &'a dyn Fn(&Complex, &Complex) -> Arc<KbHom>;

/// A chain map `c: S -> U` with `b ∘ c ≃ a`, for `a: S -> T` and `b: U -> T`.
pub fn factor_through(cat: &dyn Category, b: &ChainMap, a: &ChainMap) -> Option<ChainMap> {
    factor_through_with(cat, &|x, y| Arc::new(kb_hom(cat, x, y)), b, a)
}

pub fn factor_through_with(cat: &dyn Category, kb: KbSource, b: &ChainMap, a: &ChainMap) -> Option<ChainMap> {
    if a.tgt != b.tgt {
        return None;
    }
    let su = kb(&a.src, &b.src);
    let st = kb(&a.src, &a.tgt);
    let target = st.class_of(cat, a)?;
    let basis = su.basis(cat);
    solve_combination(cat, &st, &target, &basis, |c| b.compose(cat, c).ok(), &a.src, &b.src)
}

/// A chain map `c: U -> T` with `c ∘ b ≃ a`, for `a: S -> T` and `b: S -> U`.
pub fn factor_before(cat: &dyn Category, b: &ChainMap, a: &ChainMap) -> Option<ChainMap> {
    factor_before_with(cat, &|x, y| Arc::new(kb_hom(cat, x, y)), b, a)
}

pub fn factor_before_with(cat: &dyn Category, kb: KbSource, b: &ChainMap, a: &ChainMap) -> Option<ChainMap> {
    if a.src != b.src {
        return None;
    }
    let ut = kb(&b.tgt, &a.tgt);
    let st = kb(&a.src, &a.tgt);
    let target = st.class_of(cat, a)?;
    let basis = ut.basis(cat);
    solve_combination(cat, &st, &target, &basis, |c| c.compose(cat, b).ok(), &b.tgt, &a.tgt)
}

/// Finds `x` with `class(op(Σ x_i basis_i)) = target` in `space`.
fn solve_combination(
    cat: &dyn Category,
    space: &KbHom,
    target: &[Q],
    basis: &[ChainMap],
    op: impl Fn(&ChainMap) -> Option<ChainMap>,
    src: &Complex,
    tgt: &Complex,
) -> Option<ChainMap> {
    if basis.is_empty() || space.dim() == 0 {
        return target.iter().all(Zero::is_zero).then(|| ChainMap::zero(src, tgt));
    }
    let cols = basis.iter().map(|c| space.class_of(cat, &op(c)?)).collect::<Option<Vec<_>>>()?;
    let m = Matrix::from_columns(space.dim(), &cols);
    let x = m.solve(target).ok()??;
    Some(combine(cat, src, tgt, basis, &x))
}

/// `Σ x_i f_i`.
pub fn combine(cat: &dyn Category, src: &Complex, tgt: &Complex, fs: &[ChainMap], x: &[Q]) -> ChainMap {
    let mut out = ChainMap::zero(src, tgt);
    for (c, f) in x.iter().zip(fs) {
        if !c.is_zero() {
            out = out.add(cat, &f.scale(c)).expect("same shape");
        }
    }
    out
}

pub fn kb_hom(cat: &dyn Category, x: &Complex, y: &Complex) -> KbHom {
    let maps = ChainParams::new(cat, x, y, 0);
    let homotopies = ChainParams::new(cat, x, y, 1);
    let degs: BTreeSet<i64> = x.terms().keys().flat_map(|&n| [n, n + 1]).collect();
    let mut layout = Vec::new();
    let mut off = 0;
    for &m in &degs {
        let l = BlockMor::zero(cat, x.term(m), y.term(m - 1)).coords().len();
        layout.push((m, off, l));
        off += l;
    }
    let constraint = linear_matrix(maps.dim(), off, |k| {
        let (n, hp, i) = maps.locate(k);
        chain_defect(cat, x, y, n, &hp.basis_mor(cat, i), &layout)
    });
    let z = constraint.kernel_basis();
    let homotopy_image = linear_matrix(homotopies.dim(), maps.dim(), |k| {
        let (n, hp, i) = homotopies.locate(k);
        let s = hp.basis_mor(cat, i);
        let mut v = vec![Q::zero(); maps.dim()];
        let mut put = |m: i64, b: BlockMor| {
            if let Some((o, hp)) = maps.offset_of(m) {
                let p = b.params(cat).expect("composite of admissible maps");
                for (dst, val) in v[o..o + hp.dim()].iter_mut().zip(p) {
                    *dst += val;
                }
            }
        };
        put(n, y.d(cat, n + 1).compose(cat, &s).expect("shapes"));
        put(n + 1, s.compose(cat, &x.d(cat, n + 1)).expect("shapes"));
        v
    });
    let space = Subquotient::new(maps.dim(), &z, &homotopy_image);
    KbHom { src: x.clone(), tgt: y.clone(), maps, homotopies, space, homotopy_image }
}

/// `H` applied termwise to a complex.
#[derive(Clone, Debug)]
pub struct HComplex {
    pub terms: BTreeMap<i64, GradedSpace<i64>>,
    pub diffs: BTreeMap<i64, GradedMap<i64>>,
}

impl HComplex {
    pub fn new(h: &dyn Fiber, cat: &dyn Category, x: &Complex) -> Self {
        let terms = x.terms().iter().map(|(&n, t)| (n, sum_space(h, t))).collect();
        let diffs = x.terms().keys().map(|&n| (n, h_block(h, &x.d(cat, n)))).collect();
        HComplex { terms, diffs }
    }

    pub fn term(&self, n: i64) -> GradedSpace<i64> {
        self.terms.get(&n).cloned().unwrap_or_else(GradedSpace::zero)
    }

    pub fn cycles(&self, n: i64, k: i64) -> Matrix {
        self.diff_block(n, k).kernel_basis()
    }

    pub fn boundaries(&self, n: i64, k: i64) -> Matrix {
        let b = self.diff_block(n + 1, k);
        if b.cols() == 0 { Matrix::zeros(self.term(n).dim(k), 0) } else { b.image_basis() }
    }

    pub fn diff_block(&self, n: i64, k: i64) -> Matrix {
        let r = self.term(n - 1).dim(k);
        let c = self.term(n).dim(k);
        match self.diffs.get(&n) {
            Some(d) if r > 0 && c > 0 => d.block(k),
            _ => Matrix::zeros(r, c),
        }
    }
}

/// Bigraded homology `H_n(H(X))_k`, keyed by `Bidegree(n, k)`.
#[derive(Clone, Debug)]
pub struct Homology {
    pub complex: HComplex,
    pub parts: BTreeMap<Bidegree, Subquotient>,
}

impl Homology {
    pub fn dims(&self) -> GradedSpace<Bidegree> {
        GradedSpace::new(self.parts.iter().map(|(&b, s)| (b, s.dim())))
    }

    pub fn total_dim(&self) -> usize {
        self.parts.values().map(Subquotient::dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// The map induced on homology by a chain map from the complex of `self`.
    pub fn map_to(&self, tgt: &Homology, h: &dyn Fiber, f: &ChainMap) -> GradedMap<Bidegree> {
        induced_map(h, &self.parts, &tgt.parts, f)
    }
}

/// Graded map between subquotients of `H(X_n)_k` and `H(Y_n)_k` induced by a chain map.
pub fn induced_map(
    h: &dyn Fiber,
    src: &BTreeMap<Bidegree, Subquotient>,
    tgt: &BTreeMap<Bidegree, Subquotient>,
    f: &ChainMap,
) -> GradedMap<Bidegree> {
    let dims = |p: &BTreeMap<Bidegree, Subquotient>| GradedSpace::new(p.iter().map(|(&b, s)| (b, s.dim())));
    let mut out = GradedMap::zero(&dims(src), &dims(tgt));
    let mut cache: BTreeMap<i64, GradedMap<i64>> = BTreeMap::new();
    for (&b, sq) in src {
        let Some(tq) = tgt.get(&b) else { continue };
        if sq.dim() == 0 || tq.dim() == 0 {
            continue;
        }
        let Bidegree(n, k) = b;
        let amb = match f.comps().get(&n) {
            Some(c) => cache.entry(n).or_insert_with(|| h_block(h, c)).block(k),
            None => Matrix::zeros(tq.ambient(), sq.ambient()),
        };
        let m = tq.induced(sq, &amb).expect("chain maps preserve cycles and boundaries");
        out.set_block(b, m).expect("shape");
    }
    out
}

pub fn apply_kunneth(h: &dyn Fiber, cat: &dyn Category, x: &Complex) -> Homology {
    let hc = HComplex::new(h, cat, x);
    let mut parts = BTreeMap::new();
    for (&n, t) in &hc.terms {
        for (k, dim) in t.iter() {
            let sq = Subquotient::new(dim, &hc.cycles(n, k), &hc.boundaries(n, k));
            if sq.dim() > 0 {
                parts.insert(Bidegree(n, k), sq);
            }
        }
    }
    Homology { complex: hc, parts }
}

pub fn is_h_epi(h: &dyn Fiber, cat: &dyn Category, f: &ChainMap) -> bool {
    let (a, b) = (apply_kunneth(h, cat, &f.src), apply_kunneth(h, cat, &f.tgt));
    a.map_to(&b, h, f).is_surjective()
}

pub fn is_h_iso(h: &dyn Fiber, cat: &dyn Category, f: &ChainMap) -> bool {
    let (a, b) = (apply_kunneth(h, cat, &f.src), apply_kunneth(h, cat, &f.tgt));
    a.map_to(&b, h, f).is_iso()
}

/// `A --f--> B --g--> C` in the homotopy category.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub f: ChainMap,
    pub g: ChainMap,
}

impl Triangle {
    /// `cone(p)[-1] -> B --p--> C`.
    pub fn of_epi(cat: &dyn Category, p: &ChainMap) -> Result<Triangle, ComplexError> {
        let c = cone(cat, p)?;
        let a = c.cone.shift(-1);
        let mut comps = BTreeMap::new();
        for (&n, t) in a.terms() {
            let bn = p.src.term(n);
            if bn.is_empty() {
                continue;
            }
            let mut m = BlockMor::zero(cat, t, bn);
            m.paste(&BlockMor::identity(cat, bn), 0, 0);
            comps.insert(n, m);
        }
        let f = ChainMap::unchecked(&a, &p.src, comps);
        Ok(Triangle { f, g: p.clone() })
    }

    /// `X --f--> Y -> cone(f)`.
    pub fn of_cone(cat: &dyn Category, f: &ChainMap) -> Result<Triangle, ComplexError> {
        let c = cone(cat, f)?;
        Ok(Triangle { f: f.clone(), g: c.incl })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaRow {
    pub bidegree: Bidegree,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaReport {
    /// `H(g)` is surjective.
    pub epi: bool,
    /// `0 -> H(A) -> H(B) -> H(C) -> 0` is exact in every bidegree.
    pub exact: bool,
    pub rows: Vec<SigmaRow>,
}

pub fn verify_sigma_exact(h: &dyn Fiber, cat: &dyn Category, t: &Triangle) -> SigmaReport {
    let ha = apply_kunneth(h, cat, &t.f.src);
    let hb = apply_kunneth(h, cat, &t.g.src);
    let hc = apply_kunneth(h, cat, &t.g.tgt);
    let hf = ha.map_to(&hb, h, &t.f);
    let hg = hb.map_to(&hc, h, &t.g);
    let epi = hg.is_surjective();
    let composite_zero = hg.compose(&hf).map(|m| m.is_zero()).unwrap_or(false);
    let (da, db, dc) = (ha.dims(), hb.dims(), hc.dims());
    let bidegs: BTreeSet<Bidegree> = da.degrees().chain(db.degrees()).chain(dc.degrees()).collect();
    let rows: Vec<SigmaRow> = bidegs
        .into_iter()
        .map(|b| SigmaRow { bidegree: b, a: da.dim(b), b: db.dim(b), c: dc.dim(b) })
        .collect();
    let exact = epi && hf.is_injective() && composite_zero && rows.iter().all(|r| r.a + r.c == r.b);
    SigmaReport { epi, exact, rows }
}

/// Homotopy pullback of `p: Y -> X` along `g: Z -> X`: returns
/// `(P, P -> Z, P -> Y)` with `P = cone([p, -g])[-1]`.
pub fn homotopy_pullback(
    cat: &dyn Category,
    p: &ChainMap,
    g: &ChainMap,
) -> Result<(Complex, ChainMap, ChainMap), ComplexError> {
    let m = p.hcat(cat, &g.scale(&-Q::one()))?;
    let c = cone(cat, &m)?;
    let pb = c.cone.shift(-1);
    let (y, z) = (&p.src, &g.src);
    let mut to_z = BTreeMap::new();
    let mut to_y = BTreeMap::new();
    for (&n, t) in pb.terms() {
        let (yn, zn) = (y.term(n), z.term(n));
        let mut a = BlockMor::zero(cat, t, zn);
        a.paste(&BlockMor::identity(cat, zn), 0, yn.len());
        to_z.insert(n, a);
        let mut b = BlockMor::zero(cat, t, yn);
        b.paste(&BlockMor::identity(cat, yn), 0, 0);
        to_y.insert(n, b);
    }
    Ok((pb.clone(), ChainMap::unchecked(&pb, z, to_z), ChainMap::unchecked(&pb, y, to_y)))
}

#[derive(Clone, Debug)]
pub struct StrengthWitness {
    /// Indices into the window.
    pub src: usize,
    pub tgt: usize,
    pub map: ChainMap,
    /// Which functor (0 or 1) kills `map` while the other does not.
    pub killed_by: usize,
}

#[derive(Clone, Debug)]
pub struct SameStrength {
    pub same: bool,
    pub pairs_checked: usize,
    pub witness: Option<StrengthWitness>,
}

/// Columns: flattened homology maps of each basis class.
fn homology_matrix(h: &dyn Fiber, cat: &dyn Category, kb: &KbHom, basis: &[ChainMap]) -> Matrix {
    let a = apply_kunneth(h, cat, &kb.src);
    let b = apply_kunneth(h, cat, &kb.tgt);
    let cols: Vec<Vec<Q>> = basis.iter().map(|f| a.map_to(&b, h, f).to_total().entries().to_vec()).collect();
    Matrix::from_columns(b.total_dim() * a.total_dim(), &cols)
}

fn in_span(m: &Matrix, v: &[Q]) -> bool {
    m.cols() == 0 && v.iter().all(Zero::is_zero) || m.hstack(&Matrix::column_vector(v)).rank() == m.rank()
}

/// Decides whether two fiber functors kill the same morphisms between
/// objects of `window` in the homotopy category.
pub fn same_strength(h0: &dyn Fiber, h1: &dyn Fiber, cat: &dyn Category, window: &[Complex]) -> SameStrength {
    let mut pairs = 0;
    for (i, x) in window.iter().enumerate() {
        for (j, y) in window.iter().enumerate() {
            let kb = kb_hom(cat, x, y);
            pairs += 1;
            if kb.dim() == 0 {
                continue;
            }
            let basis = kb.basis(cat);
            let k0 = homology_matrix(h0, cat, &kb, &basis).kernel_basis();
            let k1 = homology_matrix(h1, cat, &kb, &basis).kernel_basis();
            for (killed_by, (ka, kb_)) in [(0, (&k0, &k1)), (1, (&k1, &k0))] {
                for c in ka.columns() {
                    if !in_span(kb_, &c) {
                        let f = combine(cat, x, y, &basis, &c);
                        return SameStrength {
                            same: false,
                            pairs_checked: pairs,
                            witness: Some(StrengthWitness { src: i, tgt: j, map: f, killed_by }),
                        };
                    }
                }
            }
        }
    }
    SameStrength { same: true, pairs_checked: pairs, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{ConcretePresentation, TablePresentation};
    use crate::complex::{coev_complex, ev_complex};
    use crate::datasets;
    use crate::functor::build_functor;
    use crate::linalg::q;

    fn point() -> (Arc<TablePresentation>, Arc<dyn Fiber>) {
        let c = Arc::new(TablePresentation::new(datasets::point_category()).unwrap());
        let h = build_functor(&datasets::point_functor(), c.clone(), None).unwrap();
        (c, h)
    }

    fn scalar(cat: &dyn Category, v: i64) -> BlockMor {
        let u = cat.unit();
        BlockMor::single(u, u, vec![q(v)])
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        let (c, h) = point();
        let u = Complex::unit(&*c);
        let k = cone(&*c, &u.identity(&*c)).unwrap();
        k.cone.check(&*c).unwrap();
        assert!(apply_kunneth(&*h, &*c, &k.cone).is_zero());
        let e = kb_hom(&*c, &k.cone, &k.cone);
        assert_eq!(e.dim(), 0);
        assert!(e.null_homotopy(&*c, &k.cone.identity(&*c)).is_some());
    }

    #[test]
    fn unit_has_no_maps_to_its_shift() {
        let (c, _) = point();
        let u = Complex::unit(&*c);
        assert_eq!(kb_hom(&*c, &u, &u.shift(1)).dim(), 0);
        assert_eq!(kb_hom(&*c, &u, &u).dim(), 1);
    }

    #[test]
    fn zero_differential_homology() {
        let (c, h) = point();
        let x = Complex::two_term(&*c, &scalar(&*c, 0), 0).unwrap();
        let hx = apply_kunneth(&*h, &*c, &x);
        assert_eq!(hx.dims(), GradedSpace::new([(Bidegree(0, 0), 1), (Bidegree(1, 0), 1)]));
        let y = Complex::two_term(&*c, &scalar(&*c, 3), 0).unwrap();
        assert!(apply_kunneth(&*h, &*c, &y).is_zero());
    }

    #[test]
    fn non_complex_is_rejected() {
        let (c, _) = point();
        let u = c.unit();
        let one = scalar(&*c, 1);
        let terms = BTreeMap::from([(0, vec![u]), (1, vec![u]), (2, vec![u])]);
        let diffs = BTreeMap::from([(1, one.clone()), (2, one)]);
        assert_eq!(Complex::new(&*c, terms, diffs), Err(ComplexError::NotComplex(2)));
    }

    #[test]
    fn triangles() {
        let (c, h) = point();
        let cat = &*c;
        let u = Complex::unit(cat);
        // id: 1 -> 1 with cone zero
        let t = Triangle::of_epi(cat, &u.identity(cat)).unwrap();
        assert!(verify_sigma_exact(&*h, cat, &t).exact);
        // fold map 1 ⊕ 1 -> 1
        let uu = u.direct_sum(cat, &u);
        let fold = u.identity(cat).hcat(cat, &u.identity(cat)).unwrap();
        let r = verify_sigma_exact(&*h, cat, &Triangle::of_epi(cat, &fold).unwrap());
        assert!(r.exact);
        assert_eq!(r.rows, vec![SigmaRow { bidegree: Bidegree(0, 0), a: 1, b: 2, c: 1 }]);
        // split projection
        let p = crate::complex::projection(cat, &u, &uu, 1);
        assert!(verify_sigma_exact(&*h, cat, &Triangle::of_epi(cat, &p).unwrap()).exact);
        // zero map is not an H-epi
        let z = ChainMap::zero(&u, &u);
        let r = verify_sigma_exact(&*h, cat, &Triangle::of_epi(cat, &z).unwrap());
        assert!(!r.epi && !r.exact);
    }

    #[test]
    fn pullback_of_epi_is_epi() {
        let (c, h) = point();
        let cat = &*c;
        let u = Complex::unit(cat);
        let uu = u.direct_sum(cat, &u);
        let fold = u.identity(cat).hcat(cat, &u.identity(cat)).unwrap();
        let g = ChainMap::zero(&u, &u);
        let (pb, to_z, to_y) = homotopy_pullback(cat, &fold, &g).unwrap();
        pb.check(cat).unwrap();
        to_z.check(cat).unwrap();
        to_y.check(cat).unwrap();
        assert!(is_h_epi(&*h, cat, &to_z));
        assert_eq!(to_y.tgt, uu);
        // square commutes up to homotopy
        let lhs = fold.compose(cat, &to_y).unwrap();
        let rhs = g.compose(cat, &to_z).unwrap();
        let kb = kb_hom(cat, &pb, &u);
        assert!(kb.null_homotopy(cat, &lhs.sub(cat, &rhs).unwrap()).is_some());
    }

    #[test]
    fn shift_and_dual_of_unit() {
        let (c, h) = point();
        let cat = &*c;
        let s1 = Complex::unit(cat).shift(1);
        let d = s1.dual(cat).unwrap();
        assert_eq!(d, Complex::unit(cat).shift(-1));
        assert_eq!(apply_kunneth(&*h, cat, &d).dims(), GradedSpace::new([(Bidegree(-1, 0), 1)]));
    }

    #[test]
    fn complex_duality_maps_are_chain_maps() {
        let (c, _) = point();
        let cat = &*c;
        let x = Complex::two_term(cat, &scalar(cat, 2), 0).unwrap();
        let y = x.direct_sum(cat, &Complex::unit(cat).shift(3));
        for z in [x, y] {
            ev_complex(cat, &z).unwrap().check(cat).unwrap();
            coev_complex(cat, &z).unwrap().check(cat).unwrap();
            z.tensor(cat, &z.dual(cat).unwrap()).unwrap().check(cat).unwrap();
        }
    }

    #[test]
    fn kunneth_on_concrete_complexes() {
        let c = Arc::new(ConcretePresentation::new(datasets::curve_category()).unwrap());
        let h = build_functor(&datasets::carrier_functor(), c.clone(), Some(c.clone())).unwrap();
        let cat = &*c;
        let x = c.lookup("X").unwrap();
        let xc = Complex::object(&[x], 0).shift(1);
        let t = xc.tensor(cat, &xc).unwrap();
        let d = apply_kunneth(&*h, cat, &t).dims();
        assert_eq!(d.dim(Bidegree(2, 1)), 2 * 2 * 1 + 0);
        assert_eq!(d.total_dim(), 16);
    }

    #[test]
    fn same_strength_detects_weight_grading() {
        let c = Arc::new(ConcretePresentation::new(datasets::unipotent_category()).unwrap());
        let cat = &*c;
        let h = build_functor(&datasets::carrier_functor(), c.clone(), Some(c.clone())).unwrap();
        let w = build_functor(&datasets::weight_graded_functor(), c.clone(), Some(c.clone())).unwrap();
        let v = c.lookup("V").unwrap();
        let window = vec![Complex::object(&[v], 0)];
        let r = same_strength(&*h, &*h, cat, &window);
        assert!(r.same);
        let r = same_strength(&*h, &*w, cat, &window);
        assert!(!r.same);
        let wit = r.witness.unwrap();
        assert_eq!(wit.killed_by, 1);
        assert!(!wit.map.is_zero());
        assert!(!is_h_iso(&*w, cat, &wit.map));
    }
}
