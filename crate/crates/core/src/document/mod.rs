//! Workspace documents: a category, its fiber functor, a window of complexes,
//! cover maps, motive data and queries, all as a JSON tree with exact
//! rationals written as strings.

mod cert;

pub use cert::{decode_bundle, BundleBuilder, CertBundle, NodeDoc, PresheafDoc, RootDoc, RootReplay};

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::category::{BlockMor, Cat, Category, ObjId, ConcreteData, ConcretePresentation, TableData, TablePresentation};
use crate::complex::{ChainMap, Complex};
use crate::fp::{m_hom_bounds, CoverSet, Ctx, RoofMorphism};
use crate::functor::{build_functor, FunctorData};
use crate::graded::{Bidegree, GradedMap};
use crate::linalg::{fmt_vec, parse_vec};
use crate::motive::{Hyperplane, MotivePresentation};
use crate::{datasets, fp};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("{0}")]
    Schema(String),
}

fn schema(s: impl Into<String>) -> DocError {
    DocError::Schema(s.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CategoryDoc {
    Table(TableData),
    Concrete(ConcreteData),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub degree: i64,
    pub objects: Vec<String>,
}

/// Component of a block morphism in one chain degree: `blocks[i * |src| + j]`
/// holds the coordinates of `src[j] -> tgt[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub degree: i64,
    pub blocks: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub label: String,
    pub terms: Vec<TermDoc>,
    #[serde(default)]
    pub diffs: Vec<BlockDoc>,
}

/// Chain map between complexes named by label; a bare object label stands
/// for that object in chain degree 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDoc {
    pub src: String,
    pub tgt: String,
    #[serde(default)]
    pub comps: Vec<BlockDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofDoc {
    pub f: MapDoc,
    pub w: MapDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct CoversDoc {
    #[serde(default)]
    pub epis: Vec<MapDoc>,
    #[serde(default)]
    pub isos: Vec<MapDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneDoc {
    pub motive: Box<MotiveDoc>,
    pub q: MapDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotiveDoc {
    pub name: String,
    pub x: String,
    pub d: usize,
    #[serde(default)]
    pub lefschetz: Option<String>,
    #[serde(default)]
    pub ell: Option<MapDoc>,
    pub duality: Vec<MapDoc>,
    #[serde(default)]
    pub hyperplane: Option<HyperplaneDoc>,
    #[serde(default)]
    pub nu: Vec<Option<RoofDoc>>,
    #[serde(default)]
    pub curve_split: Option<Vec<MapDoc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityDoc {
    pub window: Vec<String>,
    pub weights: BTreeMap<String, Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryDoc {
    pub verb: String,
    #[serde(default)]
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub format_version: u32,
    pub name: String,
    pub category: CategoryDoc,
    pub functor: FunctorData,
    #[serde(default)]
    pub complexes: Vec<ComplexDoc>,
    pub window: Vec<String>,
    #[serde(default)]
    pub covers: CoversDoc,
    #[serde(default)]
    pub motives: Vec<MotiveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity: Option<PurityDoc>,
    #[serde(default)]
    pub queries: Vec<QueryDoc>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        let doc: Document = serde_json::from_str(text)
            .map_err(|e| {
                let at = format!(" at line {} column {}", e.line(), e.column());
                let msg = e.to_string();
                let msg = msg.strip_suffix(&at).unwrap_or(&msg).to_string();
                DocError::Parse { line: e.line(), column: e.column(), msg }
            })?;
        if doc.format_version != FORMAT_VERSION {
            return Err(DocError::Version(doc.format_version));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

pub fn encode_block(m: &BlockMor) -> Vec<Vec<String>> {
    m.blocks.iter().map(|b| fmt_vec(b)).collect()
}

fn decode_block(cat: &dyn Category, src: &[ObjId], tgt: &[ObjId], b: &[Vec<String>], what: &str) -> Result<BlockMor, DocError> {
    if b.len() != src.len() * tgt.len() {
        return Err(schema(format!("{what}: expected {} blocks, found {}", src.len() * tgt.len(), b.len())));
    }
    let mut m = BlockMor::zero(cat, src, tgt);
    for (k, v) in b.iter().enumerate() {
        let (i, j) = (k / src.len().max(1), k % src.len().max(1));
        let want = cat.coord_dim(src[j], tgt[i]);
        if v.len() != want {
            return Err(schema(format!("{what}: block {k} needs {want} coordinates")));
        }
        *m.block_mut(i, j) = parse_vec(v).map_err(|e| schema(format!("{what}: {e}")))?;
    }
    Ok(m)
}

pub fn encode_complex(cat: &dyn Category, label: &str, x: &Complex) -> ComplexDoc {
    ComplexDoc {
        label: label.into(),
        terms: x
            .terms()
            .iter()
            .map(|(&degree, t)| TermDoc { degree, objects: t.iter().map(|&o| cat.label(o)).collect() })
            .collect(),
        diffs: x.diffs().iter().map(|(&degree, d)| BlockDoc { degree, blocks: encode_block(d) }).collect(),
    }
}

/// Builds the complex without checking `d∘d`; see [`Complex::check`].
pub fn decode_complex(cat: &dyn Category, c: &ComplexDoc) -> Result<Complex, DocError> {
    let mut terms = BTreeMap::new();
    for t in &c.terms {
        let objs = t
            .objects
            .iter()
            .map(|l| cat.lookup(l).ok_or_else(|| schema(format!("complex {}: unknown object {l}", c.label))))
            .collect::<Result<Vec<_>, _>>()?;
        if terms.insert(t.degree, objs).is_some() {
            return Err(schema(format!("complex {}: degree {} listed twice", c.label, t.degree)));
        }
    }
    let mut diffs = BTreeMap::new();
    for d in &c.diffs {
        let (src, tgt) = (terms.get(&d.degree).cloned().unwrap_or_default(), terms.get(&(d.degree - 1)).cloned().unwrap_or_default());
        let what = format!("complex {}, differential out of degree {}", c.label, d.degree);
        diffs.insert(d.degree, decode_block(cat, &src, &tgt, &d.blocks, &what)?);
    }
    Ok(Complex::unchecked(terms, diffs))
}

pub fn encode_map(src: &str, tgt: &str, f: &ChainMap) -> MapDoc {
    MapDoc {
        src: src.into(),
        tgt: tgt.into(),
        comps: f
            .comps()
            .iter()
            .filter(|(_, b)| !b.is_zero())
            .map(|(&degree, b)| BlockDoc { degree, blocks: encode_block(b) })
            .collect(),
    }
}

pub fn decode_map(cat: &dyn Category, src: &Complex, tgt: &Complex, m: &MapDoc) -> Result<ChainMap, DocError> {
    let what = format!("map {} -> {}", m.src, m.tgt);
    let mut comps = BTreeMap::new();
    for b in &m.comps {
        let w = format!("{what}, degree {}", b.degree);
        comps.insert(b.degree, decode_block(cat, src.term(b.degree), tgt.term(b.degree), &b.blocks, &w)?);
    }
    ChainMap::new(cat, src, tgt, comps).map_err(|e| schema(format!("{what}: {e}")))
}

/// Nonzero blocks of a fiber matrix, keyed by bidegree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixBlock {
    pub degree: (i64, i64),
    pub rows: Vec<Vec<String>>,
}

pub fn encode_matrix(m: &GradedMap<Bidegree>) -> Vec<MatrixBlock> {
    m.support()
        .into_iter()
        .map(|d| (d, m.block(d)))
        .filter(|(_, b)| !b.is_zero())
        .map(|(d, b)| MatrixBlock { degree: (d.0, d.1), rows: b.to_strings() })
        .collect()
}

/// Names complexes for export: single objects in degree 0 go by their
/// label, everything else gets a generated one.
#[derive(Default)]
struct Namer {
    named: Vec<(String, Complex)>,
}

impl Namer {
    fn label(&mut self, cat: &dyn Category, c: &Complex) -> String {
        if c.diffs().is_empty() && c.terms().len() == 1 {
            if let Some(t) = c.terms().get(&0) {
                if t.len() == 1 {
                    return cat.label(t[0]);
                }
            }
        }
        if let Some((l, _)) = self.named.iter().find(|(_, x)| x == c) {
            return l.clone();
        }
        let l = format!("K{}", self.named.len());
        self.named.push((l.clone(), c.clone()));
        l
    }

    fn map(&mut self, cat: &dyn Category, f: &ChainMap) -> MapDoc {
        let (s, t) = (self.label(cat, &f.src), self.label(cat, &f.tgt));
        encode_map(&s, &t, f)
    }

    fn motive(&mut self, cat: &dyn Category, m: &MotivePresentation) -> MotiveDoc {
        MotiveDoc {
            name: m.name.clone(),
            x: m.x.clone(),
            d: m.d,
            lefschetz: m.lefschetz.clone(),
            ell: m.ell.as_ref().map(|f| self.map(cat, f)),
            duality: m.duality.iter().map(|f| self.map(cat, f)).collect(),
            hyperplane: m
                .hyperplane
                .as_ref()
                .map(|h| HyperplaneDoc { motive: Box::new(self.motive(cat, &h.y)), q: self.map(cat, &h.q) }),
            nu: m.nu.iter().map(|r| r.as_ref().map(|r| RoofDoc { f: self.map(cat, &r.f), w: self.map(cat, &r.w) })).collect(),
            curve_split: m.curve_split.as_ref().map(|ps| ps.iter().map(|f| self.map(cat, f)).collect()),
        }
    }
}

fn q(verb: &str, args: &[&str]) -> QueryDoc {
    QueryDoc { verb: verb.into(), args: args.iter().map(|s| s.to_string()).collect() }
}

/// The bundled dataset `name` as a document.
pub fn bundled(name: &str) -> Option<Document> {
    let ctx = datasets::context(name)?;
    let cat = ctx.cat();
    let (category, functor) = match name {
        "point" => (CategoryDoc::Table(datasets::point_category()), datasets::point_functor()),
        "rep-z2" => (CategoryDoc::Table(datasets::rep_z2_category()), datasets::rep_z2_functor()),
        "graded-line" => (CategoryDoc::Concrete(datasets::graded_line_category()), datasets::carrier_functor()),
        "genus-1" => (CategoryDoc::Concrete(datasets::curve_category()), datasets::carrier_functor()),
        "surface" => (CategoryDoc::Concrete(datasets::surface_category()), datasets::carrier_functor()),
        "rep-z-unipotent" => (CategoryDoc::Concrete(datasets::unipotent_category()), datasets::carrier_functor()),
        _ => return None,
    };
    let mut namer = Namer::default();
    let motives: Vec<MotiveDoc> = datasets::motive(name, &ctx).iter().map(|m| namer.motive(cat, m)).collect();
    let mut complexes: Vec<ComplexDoc> = namer.named.iter().map(|(l, c)| encode_complex(cat, l, c)).collect();
    let w = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let (window, queries, purity) = match name {
        "point" => {
            let one = ctx.complex("1").expect("unit");
            let cone = crate::complex::cone(cat, &one.identity(cat)).expect("cone").cone;
            complexes.push(encode_complex(cat, "cone(id_1)", &cone));
            (
                w(&["1", "cone(id_1)"]),
                vec![q("hom", &["1", "1"]), q("hom", &["1", "cone(id_1)"]), q("fiber", &["1"]), q("split", &["point"])],
                None,
            )
        }
        "rep-z2" => (
            w(&["triv", "sign"]),
            vec![q("hom", &["triv", "triv"]), q("hom", &["triv", "sign"]), q("hom", &["sign", "sign"])],
            None,
        ),
        "graded-line" => (w(&["1", "L", "Li", "L.L"]), vec![q("hom", &["L", "L"]), q("hom", &["L", "Li"]), q("fiber", &["L.L"])], None),
        "genus-1" => (
            w(&["1", "X", "Xd", "L", "Li"]),
            vec![q("fiber", &["X"]), q("hom", &["L", "X"]), q("split", &["genus-1"]), q("twist", &[])],
            Some(PurityDoc {
                window: w(&["X", "Xd", "L", "Li"]),
                weights: datasets::curve_weights(),
            }),
        ),
        "surface" => (w(&["1", "S", "C", "L"]), vec![q("fiber", &["S"]), q("split", &["surface"])], None),
        "rep-z-unipotent" => (
            w(&["1", "V", "U", "L"]),
            vec![q("hom", &["V", "V"]), q("hom", &["U", "U"]), q("split", &["unipotent"])],
            None,
        ),
        _ => unreachable!(),
    };
    Some(Document {
        format_version: FORMAT_VERSION,
        name: name.into(),
        category,
        functor,
        complexes,
        window,
        covers: CoversDoc::default(),
        motives,
        purity,
        queries,
    })
}

/// A loaded document with everything resolved against its category.
pub struct Workspace {
    pub doc: Document,
    pub ctx: Ctx,
    pub named: BTreeMap<String, Complex>,
    pub window: Vec<(String, Complex)>,
    pub covers: CoverSet,
    pub motives: Vec<MotivePresentation>,
    /// Complexes whose differentials fail to compose to zero or to be
    /// morphisms; nothing past the complexes is resolved when nonempty.
    pub issues: Vec<String>,
    semisimple: OnceLock<fp::SemisimplicityCertificate>,
}

impl Workspace {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        Self::new(Document::parse(text)?)
    }

    pub fn new(doc: Document) -> Result<Self, DocError> {
        let cat_err = |e: crate::category::CatError| schema(format!("category: {e}"));
        let ctx = match &doc.category {
            CategoryDoc::Table(t) => {
                let c: Cat = Arc::new(TablePresentation::new(t.clone()).map_err(cat_err)?);
                let h = build_functor(&doc.functor, c.clone(), None).map_err(|e| schema(format!("functor: {e}")))?;
                Ctx::new(c, h)
            }
            CategoryDoc::Concrete(d) => {
                let c = Arc::new(ConcretePresentation::new(d.clone()).map_err(cat_err)?);
                let h = build_functor(&doc.functor, c.clone(), Some(c.clone())).map_err(|e| schema(format!("functor: {e}")))?;
                Ctx::with_concrete(c, h)
            }
        };
        let mut ws = Workspace {
            ctx,
            named: BTreeMap::new(),
            window: vec![],
            covers: CoverSet::default(),
            motives: vec![],
            issues: vec![],
            semisimple: OnceLock::new(),
            doc: doc.clone(),
        };
        for c in &doc.complexes {
            let x = decode_complex(ws.ctx.cat(), c)?;
            if let Err(e) = x.check(ws.ctx.cat()) {
                ws.issues.push(format!("complex {}: {e}", c.label));
            }
            if ws.named.insert(c.label.clone(), x).is_some() {
                return Err(schema(format!("complex {} defined twice", c.label)));
            }
        }
        ws.set_window(&doc.window)?;
        if !ws.issues.is_empty() {
            return Ok(ws);
        }
        for m in &doc.covers.epis {
            let f = ws.map(m)?;
            ws.covers.epis.push(f);
        }
        for m in &doc.covers.isos {
            let f = ws.map(m)?;
            ws.covers.isos.push(f);
        }
        for m in &doc.motives {
            let mp = ws.motive(m)?;
            ws.motives.push(mp);
        }
        if let Some(p) = &doc.purity {
            for l in &p.window {
                ws.ctx.obj(l).map_err(|e| schema(format!("purity window: {e}")))?;
            }
        }
        Ok(ws)
    }

    pub fn set_window(&mut self, labels: &[String]) -> Result<(), DocError> {
        self.semisimple = OnceLock::new();
        self.window = labels.iter().map(|l| Ok((l.clone(), self.complex(l)?))).collect::<Result<_, DocError>>()?;
        Ok(())
    }

    /// A named complex, or an object in chain degree 0.
    pub fn complex(&self, label: &str) -> Result<Complex, DocError> {
        if let Some(c) = self.named.get(label) {
            return Ok(c.clone());
        }
        self.ctx.complex(label).map_err(|_| schema(format!("unknown object or complex {label}")))
    }

    pub fn map(&self, m: &MapDoc) -> Result<ChainMap, DocError> {
        decode_map(self.ctx.cat(), &self.complex(&m.src)?, &self.complex(&m.tgt)?, m)
    }

    fn motive(&self, m: &MotiveDoc) -> Result<MotivePresentation, DocError> {
        let maps = |v: &[MapDoc]| v.iter().map(|f| self.map(f)).collect::<Result<Vec<_>, _>>();
        let mut nu = vec![];
        for r in &m.nu {
            nu.push(match r {
                None => None,
                Some(r) => Some(
                    RoofMorphism::new(&self.ctx, self.map(&r.f)?, self.map(&r.w)?)
                        .map_err(|e| schema(format!("motive {}: roof: {e}", m.name)))?,
                ),
            });
        }
        let hyperplane = match &m.hyperplane {
            None => None,
            Some(h) => Some(Box::new(Hyperplane { y: self.motive(&h.motive)?, q: self.map(&h.q)? })),
        };
        Ok(MotivePresentation {
            name: m.name.clone(),
            x: m.x.clone(),
            d: m.d,
            lefschetz: m.lefschetz.clone(),
            ell: m.ell.as_ref().map(|f| self.map(f)).transpose()?,
            duality: maps(&m.duality)?,
            hyperplane,
            nu,
            curve_split: m.curve_split.as_deref().map(maps).transpose()?,
        })
    }

    pub fn find_motive(&self, name: &str) -> Result<&MotivePresentation, DocError> {
        self.motives.iter().find(|m| m.name == name).ok_or_else(|| schema(format!("unknown motive {name}")))
    }

    /// Semisimplicity certificate for the window objects, computed once.
    pub fn semisimplicity(&self) -> &fp::SemisimplicityCertificate {
        self.semisimple.get_or_init(|| {
            let objs: Vec<ObjId> = self.window_objects().into_iter().map(|(_, x)| x).collect();
            fp::semisimplicity_certificate(&self.ctx, &objs)
        })
    }

    /// Window labels that are single objects of the category.
    pub fn window_objects(&self) -> Vec<(String, ObjId)> {
        self.window.iter().filter_map(|(l, _)| self.ctx.obj(l).ok().map(|x| (l.clone(), x))).collect()
    }
}

/// Hom bounds for brackets of two complexes, using the semisimple upper
/// bound when the window objects certify it.
pub fn hom_bounds(ws: &Workspace, a: &Complex, b: &Complex, depth: usize) -> Result<fp::HomBounds, fp::FpError> {
    let cert = ws.semisimplicity();
    let ss = (cert.holds() && cert.covers(a) && cert.covers(b)).then_some(cert);
    m_hom_bounds(&ws.ctx, &fp::bracket(a), &fp::bracket(b), &ws.covers, depth, ss)
}

/// Text of a bundled dataset document, as shipped in `datasets/`.
pub fn bundled_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "point" => include_str!("../../datasets/point.json"),
        "graded-line" => include_str!("../../datasets/graded-line.json"),
        "rep-z2" => include_str!("../../datasets/rep-z2.json"),
        "genus-1" => include_str!("../../datasets/genus-1.json"),
        "surface" => include_str!("../../datasets/surface.json"),
        "rep-z-unipotent" => include_str!("../../datasets/rep-z-unipotent.json"),
        _ => return None,
    })
}

#[cfg(test)]
mod tests;
