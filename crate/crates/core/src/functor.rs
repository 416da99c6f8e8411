//! Symmetric monoidal functors from a presentation to graded vector spaces.

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::category::{BlockMor, CatError, Category, ConcretePresentation, ObjId, ValidationReport};
use crate::graded::{koszul_symmetry, GradedMap, GradedSpace};
use crate::linalg::{Matrix, Q};

pub trait Fiber: Send + Sync + Debug {
    fn obj(&self, x: ObjId) -> GradedSpace<i64>;
    fn mor(&self, x: ObjId, y: ObjId, f: &[Q]) -> GradedMap<i64>;
    /// `μ: H(x) ⊗ H(y) -> H(x ⊗ y)`.
    fn mu(&self, x: ObjId, y: ObjId) -> Result<GradedMap<i64>, CatError>;
    /// `Q (degree 0) -> H(𝟙)`.
    fn unit_iso(&self) -> GradedMap<i64>;
}

pub type Functor = Arc<dyn Fiber>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctorData {
    Table(TableFunctorData),
    Carrier(CarrierFunctorData),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFunctorData {
    pub objects: Vec<ObjSpace>,
    /// Carrier matrix of every hom-basis element.
    pub morphisms: Vec<MorMatrix>,
    pub mu: Vec<MuMatrix>,
    pub unit: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjSpace {
    pub object: String,
    pub dims: Vec<(i64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorMatrix {
    pub src: String,
    pub tgt: String,
    pub index: usize,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuMatrix {
    pub left: String,
    pub right: String,
    pub matrix: Vec<Vec<String>>,
}

/// The forgetful functor of a concrete presentation, optionally conjugated
/// generator by generator and optionally replaced by its weight-graded part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct CarrierFunctorData {
    #[serde(default)]
    pub conjugations: Vec<Conjugation>,
    #[serde(default)]
    pub weight_graded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjugation {
    pub generator: String,
    pub matrix: Vec<Vec<String>>,
}

fn missing(s: String) -> CatError {
    CatError::Malformed(format!("functor data missing: {s}"))
}

/// Builds a functor on `cat` from its data. Table data requires a table
/// presentation's objects; carrier data requires a concrete presentation.
pub fn build_functor(
    data: &FunctorData,
    cat: Arc<dyn Category>,
    concrete: Option<Arc<ConcretePresentation>>,
) -> Result<Functor, CatError> {
    match data {
        FunctorData::Table(t) => Ok(Arc::new(TableFunctor::new(t, cat)?)),
        FunctorData::Carrier(c) => {
            let conc = concrete.ok_or_else(|| CatError::Malformed("carrier functor needs a concrete category".into()))?;
            Ok(Arc::new(CarrierFunctor::new(c, conc)?))
        }
    }
}

#[derive(Debug)]
pub struct TableFunctor {
    cat: Arc<dyn Category>,
    spaces: Vec<GradedSpace<i64>>,
    mors: HashMap<(ObjId, ObjId), Vec<Matrix>>,
    mu: HashMap<(ObjId, ObjId), GradedMap<i64>>,
    unit: GradedMap<i64>,
}

fn mat(rows: usize, cols: usize, m: &[Vec<String>], what: &str) -> Result<Matrix, CatError> {
    if rows == 0 || cols == 0 {
        return Ok(Matrix::zeros(rows, cols));
    }
    Matrix::from_strings(rows, cols, m).map_err(|e| CatError::Malformed(format!("{what}: {e}")))
}

fn graded(src: &GradedSpace<i64>, tgt: &GradedSpace<i64>, m: &Matrix, what: &str) -> Result<GradedMap<i64>, CatError> {
    GradedMap::from_total(src, tgt, m).ok_or_else(|| CatError::Malformed(format!("{what} is not degree preserving")))
}

impl TableFunctor {
    pub fn new(data: &TableFunctorData, cat: Arc<dyn Category>) -> Result<Self, CatError> {
        let n = cat.num_objects();
        let obj = |l: &str| cat.lookup(l).ok_or_else(|| CatError::UnknownObject(l.to_string()));
        let mut spaces = vec![None; n];
        for o in &data.objects {
            spaces[obj(&o.object)?] = Some(GradedSpace::new(o.dims.iter().copied()));
        }
        let spaces: Vec<GradedSpace<i64>> = spaces
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| missing(format!("object {}", cat.label(i)))))
            .collect::<Result<_, _>>()?;
        let mut mors: HashMap<(ObjId, ObjId), Vec<Option<Matrix>>> = HashMap::new();
        for m in &data.morphisms {
            let (x, y) = (obj(&m.src)?, obj(&m.tgt)?);
            let d = cat.hom_dim(x, y);
            if m.index >= d {
                return Err(CatError::Malformed(format!("morphism index {} out of range for {} -> {}", m.index, m.src, m.tgt)));
            }
            let mm = mat(spaces[y].total_dim(), spaces[x].total_dim(), &m.matrix, "morphism")?;
            mors.entry((x, y)).or_insert_with(|| vec![None; d])[m.index] = Some(mm);
        }
        let mut full = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                let d = cat.hom_dim(x, y);
                if d == 0 {
                    continue;
                }
                let v = mors.remove(&(x, y)).unwrap_or_else(|| vec![None; d]);
                let v = v
                    .into_iter()
                    .enumerate()
                    .map(|(k, m)| m.ok_or_else(|| missing(format!("basis {k} of {} -> {}", cat.label(x), cat.label(y)))))
                    .collect::<Result<Vec<_>, _>>()?;
                full.insert((x, y), v);
            }
        }
        let mut mu = HashMap::new();
        for m in &data.mu {
            let (x, y) = (obj(&m.left)?, obj(&m.right)?);
            let xy = cat.tensor_obj(x, y)?;
            let src = spaces[x].tensor(&spaces[y]);
            let mm = mat(spaces[xy].total_dim(), src.total_dim(), &m.matrix, "mu")?;
            mu.insert((x, y), graded(&src, &spaces[xy], &mm, "mu")?);
        }
        let u = cat.unit();
        let q0 = GradedSpace::line(0, 1);
        let um = mat(spaces[u].total_dim(), 1, &data.unit, "unit")?;
        let unit = graded(&q0, &spaces[u], &um, "unit iso")?;
        Ok(TableFunctor { cat, spaces, mors: full, mu, unit })
    }
}

impl Fiber for TableFunctor {
    fn obj(&self, x: ObjId) -> GradedSpace<i64> {
        self.spaces[x].clone()
    }

    fn mor(&self, x: ObjId, y: ObjId, f: &[Q]) -> GradedMap<i64> {
        let (sx, sy) = (&self.spaces[x], &self.spaces[y]);
        let mut m = Matrix::zeros(sy.total_dim(), sx.total_dim());
        if let Some(bs) = self.mors.get(&(x, y)) {
            for (c, b) in f.iter().zip(bs) {
                if !c.is_zero() {
                    m = m.add(&b.scale(c));
                }
            }
        }
        GradedMap::from_total(sx, sy, &m).expect("validated functor")
    }

    fn mu(&self, x: ObjId, y: ObjId) -> Result<GradedMap<i64>, CatError> {
        self.mu
            .get(&(x, y))
            .cloned()
            .ok_or_else(|| missing(format!("mu for {} ⊗ {}", self.cat.label(x), self.cat.label(y))))
    }

    fn unit_iso(&self) -> GradedMap<i64> {
        self.unit.clone()
    }
}

#[derive(Debug)]
pub struct CarrierFunctor {
    cat: Arc<ConcretePresentation>,
    /// Conjugating isomorphism per generator (identity when absent).
    conj: Vec<Matrix>,
    weight_graded: bool,
}

impl CarrierFunctor {
    pub fn new(data: &CarrierFunctorData, cat: Arc<ConcretePresentation>) -> Result<Self, CatError> {
        let gens = cat.generators();
        let mut conj: Vec<Matrix> = gens.iter().map(|g| Matrix::identity(g.degs.len())).collect();
        for c in &data.conjugations {
            let i = gens
                .iter()
                .position(|g| g.name == c.generator)
                .ok_or_else(|| CatError::UnknownObject(c.generator.clone()))?;
            let n = gens[i].degs.len();
            let m = mat(n, n, &c.matrix, "conjugation")?;
            graded(&gens[i].space, &gens[i].space, &m, "conjugation")?;
            if !m.is_invertible() {
                return Err(CatError::Malformed(format!("conjugation of {} is not invertible", c.generator)));
            }
            conj[i] = m;
        }
        Ok(CarrierFunctor { cat, conj, weight_graded: data.weight_graded })
    }

    pub fn plain(cat: Arc<ConcretePresentation>) -> Self {
        Self::new(&CarrierFunctorData::default(), cat).expect("identity conjugations")
    }

    /// `⊗ φ_g` over the word `x`, in its carrier basis.
    fn conj_word(&self, x: ObjId) -> Matrix {
        let w = self.cat.word(x);
        let tuples = self.cat.tuples(x);
        let n = tuples.len();
        let mut m = Matrix::zeros(n, n);
        for (p, tp) in tuples.iter().enumerate() {
            for (q, tq) in tuples.iter().enumerate() {
                let mut v = Q::from_integer(1.into());
                for (i, &g) in w.iter().enumerate() {
                    v *= &self.conj[g][(tp[i] as usize, tq[i] as usize)];
                    if v.is_zero() {
                        break;
                    }
                }
                m[(p, q)] = v;
            }
        }
        m
    }
}

impl Fiber for CarrierFunctor {
    fn obj(&self, x: ObjId) -> GradedSpace<i64> {
        self.cat.space(x)
    }

    fn mor(&self, x: ObjId, y: ObjId, f: &[Q]) -> GradedMap<i64> {
        let mut m = self.cat.to_total(x, y, f);
        if self.conj.iter().any(|c| !c.is_identity()) {
            let cx = self.conj_word(x).inverse().expect("invertible");
            m = self.conj_word(y).mul(&m).mul(&cx);
        }
        if self.weight_graded {
            let (wx, wy) = (self.cat.weights(x), self.cat.weights(y));
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if wy[r] != wx[c] {
                        m[(r, c)] = Q::zero();
                    }
                }
            }
        }
        GradedMap::from_total(&self.cat.space(x), &self.cat.space(y), &m).expect("degree preserving")
    }

    fn mu(&self, x: ObjId, y: ObjId) -> Result<GradedMap<i64>, CatError> {
        self.cat.mu(x, y)
    }

    fn unit_iso(&self) -> GradedMap<i64> {
        GradedMap::identity(&GradedSpace::line(0, 1))
    }
}

/// `H(X)` for a direct sum: degree `d` is the concatenation of the summands' degree `d` parts.
pub fn sum_space(h: &dyn Fiber, objs: &[ObjId]) -> GradedSpace<i64> {
    objs.iter().fold(GradedSpace::zero(), |acc, &x| acc.direct_sum(&h.obj(x)))
}

/// `H(f)` for a block morphism.
pub fn h_block(h: &dyn Fiber, f: &BlockMor) -> GradedMap<i64> {
    let src = sum_space(h, &f.src);
    let tgt = sum_space(h, &f.tgt);
    let sx: Vec<GradedSpace<i64>> = f.src.iter().map(|&x| h.obj(x)).collect();
    let sy: Vec<GradedSpace<i64>> = f.tgt.iter().map(|&y| h.obj(y)).collect();
    let mut out = GradedMap::zero(&src, &tgt);
    for d in src.degrees().collect::<Vec<_>>() {
        let (r, c) = (tgt.dim(d), src.dim(d));
        if r == 0 {
            continue;
        }
        let mut m = Matrix::zeros(r, c);
        let mut ro = 0;
        for (i, &y) in f.tgt.iter().enumerate() {
            let mut co = 0;
            for (j, &x) in f.src.iter().enumerate() {
                let b = f.block(i, j);
                if !b.iter().all(Zero::is_zero) && sy[i].dim(d) > 0 && sx[j].dim(d) > 0 {
                    m.set_block(ro, co, &h.mor(x, y, b).block(d));
                }
                co += sx[j].dim(d);
            }
            ro += sy[i].dim(d);
        }
        out.set_block(d, m).expect("shape");
    }
    out
}

/// Columns: flattened carrier matrices of `H` applied to the hom basis `x -> y`.
pub fn h_matrix(h: &dyn Fiber, cat: &dyn Category, x: ObjId, y: ObjId) -> Matrix {
    let basis = cat.hom_basis(x, y);
    let cols: Vec<Vec<Q>> = basis
        .columns()
        .iter()
        .map(|b| h.mor(x, y, b).to_total().entries().to_vec())
        .collect();
    Matrix::from_columns(h.obj(y).total_dim() * h.obj(x).total_dim(), &cols)
}

/// Checks every functor invariant on `window`.
pub fn validate_functor(cat: &dyn Category, h: &dyn Fiber, window: &[ObjId]) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let l = |x: ObjId| cat.label(x);
    for &x in window {
        rep.check(h.mor(x, x, &cat.identity(x)).is_identity(), "functoriality", || format!("H(id_{})", l(x)));
    }
    for &x in window {
        for &y in window {
            let fs = cat.hom_basis(x, y).columns();
            if fs.is_empty() {
                continue;
            }
            for &z in window {
                for (b, g) in cat.hom_basis(y, z).columns().iter().enumerate() {
                    for (a, f) in fs.iter().enumerate() {
                        let lhs = h.mor(x, z, &cat.compose(x, y, z, g, f));
                        let rhs = h.mor(y, z, g).compose(&h.mor(x, y, f)).expect("shapes");
                        rep.check(lhs == rhs, "functoriality", || {
                            format!("{} -> {} -> {} basis ({b},{a})", l(x), l(y), l(z))
                        });
                    }
                }
            }
        }
    }
    let u = h.unit_iso();
    rep.check(u.inverse().is_some() && u.source().total_dim() == u.target().total_dim(), "unit iso invertible", String::new);
    let unit = cat.unit();
    for &x in window {
        for &y in window {
            let Ok(mu) = h.mu(x, y) else {
                if cat.tensor_obj(x, y).is_ok() {
                    rep.check(false, "mu invertible", || format!("missing μ_{{{},{}}}", l(x), l(y)));
                }
                continue;
            };
            let xy = cat.tensor_obj(x, y).expect("mu implies tensor");
            rep.check(mu.source() == mu.target() && mu.inverse().is_some(), "mu invertible", || {
                format!("μ_{{{},{}}}", l(x), l(y))
            });
            if let (Ok(yx), Ok(mu2), Ok(s)) = (cat.tensor_obj(y, x), h.mu(y, x), cat.symmetry(x, y)) {
                let lhs = h.mor(xy, yx, &s).compose(&mu).expect("shapes");
                let rhs = mu2.compose(&koszul_symmetry(&h.obj(x), &h.obj(y))).expect("shapes");
                rep.check(lhs == rhs, "symmetry compatibility", || format!("{} ⊗ {}", l(x), l(y)));
            }
            for &x2 in window {
                for &y2 in window {
                    let (Ok(x2y2), Ok(mu2)) = (cat.tensor_obj(x2, y2), h.mu(x2, y2)) else { continue };
                    for f in cat.hom_basis(x, x2).columns() {
                        for g in cat.hom_basis(y, y2).columns() {
                            let Ok(fg) = cat.tensor_mor(x, x2, y, y2, &f, &g) else { continue };
                            let lhs = mu2.compose(&h.mor(x, x2, &f).tensor(&h.mor(y, y2, &g))).expect("shapes");
                            let rhs = h.mor(xy, x2y2, &fg).compose(&mu).expect("shapes");
                            rep.check(lhs == rhs, "mu naturality", || {
                                format!("{} ⊗ {} -> {} ⊗ {}", l(x), l(y), l(x2), l(y2))
                            });
                        }
                    }
                }
            }
        }
        if let (Ok(ml), Ok(mr)) = (h.mu(unit, x), h.mu(x, unit)) {
            let hx = GradedMap::identity(&h.obj(x));
            let left = ml.compose(&u.tensor(&hx)).expect("shapes");
            let right = mr.compose(&hx.tensor(&u)).expect("shapes");
            rep.check(
                left.to_total().is_identity() && right.to_total().is_identity(),
                "unit coherence",
                || format!("object {}", l(x)),
            );
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::TablePresentation;
    use crate::datasets;

    fn table(d: crate::category::TableData, f: FunctorData) -> (Arc<TablePresentation>, Functor) {
        let c = Arc::new(TablePresentation::new(d).unwrap());
        let h = build_functor(&f, c.clone(), None).unwrap();
        (c, h)
    }

    #[test]
    fn rank_one_functors_validate() {
        for (d, f) in [
            (datasets::point_category(), datasets::point_functor()),
            (datasets::rep_z2_category(), datasets::rep_z2_functor()),
        ] {
            let (c, h) = table(d, f);
            let w: Vec<ObjId> = (0..c.num_objects()).collect();
            let rep = validate_functor(c.as_ref(), h.as_ref(), &w);
            assert!(rep.passed(), "{:?}", rep.violations);
        }
    }

    #[test]
    fn flipped_mu_breaks_symmetry() {
        let mut f = datasets::rep_z2_functor();
        let FunctorData::Table(t) = &mut f else { unreachable!() };
        let k = t.mu.iter().position(|m| m.left == "triv" && m.right == "sign").unwrap();
        t.mu[k].matrix = vec![vec!["-1".into()]];
        let (c, h) = table(datasets::rep_z2_category(), f);
        let rep = validate_functor(c.as_ref(), h.as_ref(), &[0, 1]);
        assert!(rep.violations.iter().any(|v| v.axiom == "symmetry compatibility"));
    }

    #[test]
    fn missing_morphism_data_is_an_error() {
        let mut f = datasets::rep_z2_functor();
        let FunctorData::Table(t) = &mut f else { unreachable!() };
        t.morphisms.pop();
        let c = Arc::new(TablePresentation::new(datasets::rep_z2_category()).unwrap());
        assert!(build_functor(&f, c, None).is_err());
    }

    #[test]
    fn carrier_functors_validate() {
        for (d, f) in [
            (datasets::graded_line_category(), datasets::carrier_functor()),
            (datasets::unipotent_category(), datasets::carrier_functor()),
            (datasets::unipotent_category(), datasets::weight_graded_functor()),
            (datasets::curve_category(), datasets::carrier_functor()),
        ] {
            let c = Arc::new(ConcretePresentation::new(d).unwrap());
            let h = build_functor(&f, c.clone(), Some(c.clone())).unwrap();
            let w: Vec<ObjId> = (0..=c.generators().len()).collect();
            let rep = validate_functor(c.as_ref(), h.as_ref(), &w);
            assert!(rep.passed(), "{}: {:?}", c.name(), rep.violations);
        }
    }

    #[test]
    fn weight_grading_kills_nilpotent() {
        let c = Arc::new(ConcretePresentation::new(datasets::unipotent_category()).unwrap());
        let h = build_functor(&datasets::weight_graded_functor(), c.clone(), Some(c.clone())).unwrap();
        let v = c.lookup("V").unwrap();
        let basis = c.hom_basis(v, v);
        let images: Vec<bool> = basis.columns().iter().map(|b| h.mor(v, v, b).is_zero()).collect();
        assert_eq!(images.iter().filter(|z| **z).count(), 1);
    }
}
