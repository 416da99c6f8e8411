//! Certificates as a node table: complexes, presentations and certificate
//! nodes are listed once each, children before parents.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{decode_complex, decode_map, encode_complex, encode_map, encode_matrix, schema, ComplexDoc, DocError, MapDoc, MatrixBlock, Workspace};
use crate::category::Category;
use crate::complex::{ChainMap, Complex};
use crate::fp::{replay, Cert, FpMorphism, FpPresheaf, MMorphism, Obj, RoofMorphism};
use crate::linalg::{fmt_q, parse_q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresheafDoc {
    /// `X1 -> X0`.
    pub d: MapDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum NodeDoc {
    Fp { src: usize, tgt: usize, g0: MapDoc, g1: MapDoc },
    Roof { f: MapDoc, w: MapDoc },
    Compose { g: usize, f: usize },
    Sum { a: usize, b: usize },
    Scale { s: String, a: usize },
    Inverse { a: usize },
    FactorEpi { epi: usize, map: usize },
    FactorMono { mono: usize, map: usize },
    SummandInverse { map: usize, e_src: usize, e_tgt: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDoc {
    pub name: String,
    pub node: usize,
    pub matrix: Vec<MatrixBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct CertBundle {
    pub complexes: Vec<ComplexDoc>,
    pub presheaves: Vec<PresheafDoc>,
    pub nodes: Vec<NodeDoc>,
    pub roots: Vec<RootDoc>,
}

impl CertBundle {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// The `certificates` section of a machine report.
    pub fn from_report(text: &str) -> Result<Self, String> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("report: {e}"))?;
        let c = v.get("certificates").cloned().ok_or("report has no certificates")?;
        serde_json::from_value(c).map_err(|e| format!("report certificates: {e}"))
    }
}

pub struct BundleBuilder<'a> {
    cat: &'a dyn Category,
    out: CertBundle,
    complexes: HashMap<Complex, String>,
    presheaves: HashMap<FpPresheaf, usize>,
    /// Keyed by address; `seen` keeps those addresses from being reused.
    nodes: HashMap<usize, usize>,
    seen: Vec<Arc<Cert>>,
}

impl<'a> BundleBuilder<'a> {
    pub fn new(cat: &'a dyn Category) -> Self {
        BundleBuilder { cat, out: CertBundle::default(), complexes: HashMap::new(), presheaves: HashMap::new(), nodes: HashMap::new(), seen: vec![] }
    }

    fn complex(&mut self, x: &Complex) -> String {
        if let Some(l) = self.complexes.get(x) {
            return l.clone();
        }
        let l = format!("#{}", self.out.complexes.len());
        self.out.complexes.push(encode_complex(self.cat, &l, x));
        self.complexes.insert(x.clone(), l.clone());
        l
    }

    fn map(&mut self, f: &ChainMap) -> MapDoc {
        let (s, t) = (self.complex(&f.src), self.complex(&f.tgt));
        encode_map(&s, &t, f)
    }

    fn presheaf(&mut self, p: &Obj) -> usize {
        if let Some(&i) = self.presheaves.get(&**p) {
            return i;
        }
        let d = self.map(&p.d);
        self.out.presheaves.push(PresheafDoc { d });
        let i = self.out.presheaves.len() - 1;
        self.presheaves.insert((**p).clone(), i);
        i
    }

    fn node(&mut self, c: &Arc<Cert>) -> usize {
        let key = Arc::as_ptr(c) as usize;
        if let Some(&i) = self.nodes.get(&key) {
            return i;
        }
        let n = match &**c {
            Cert::Fp(phi) => {
                let (src, tgt) = (self.presheaf(&phi.src), self.presheaf(&phi.tgt));
                NodeDoc::Fp { src, tgt, g0: self.map(&phi.g0), g1: self.map(&phi.g1) }
            }
            Cert::Roof(r) => NodeDoc::Roof { f: self.map(&r.f), w: self.map(&r.w) },
            Cert::Compose(g, f) => NodeDoc::Compose { g: self.node(g), f: self.node(f) },
            Cert::Sum(a, b) => NodeDoc::Sum { a: self.node(a), b: self.node(b) },
            Cert::Scale(s, a) => NodeDoc::Scale { s: fmt_q(s), a: self.node(a) },
            Cert::Inverse(a) => NodeDoc::Inverse { a: self.node(a) },
            Cert::FactorEpi { epi, map } => NodeDoc::FactorEpi { epi: self.node(epi), map: self.node(map) },
            Cert::FactorMono { mono, map } => NodeDoc::FactorMono { mono: self.node(mono), map: self.node(map) },
            Cert::SummandInverse { map, e_src, e_tgt } => {
                NodeDoc::SummandInverse { map: self.node(map), e_src: self.node(e_src), e_tgt: self.node(e_tgt) }
            }
        };
        self.out.nodes.push(n);
        let i = self.out.nodes.len() - 1;
        self.nodes.insert(key, i);
        self.seen.push(c.clone());
        i
    }

    pub fn add(&mut self, name: impl Into<String>, m: &MMorphism) {
        let node = self.node(&m.cert);
        self.out.roots.push(RootDoc { name: name.into(), node, matrix: encode_matrix(&m.matrix) });
    }

    pub fn finish(self) -> CertBundle {
        self.out
    }
}

/// Outcome of replaying one root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootReplay {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Rebuilds every node from the bundle alone and replays each root against
/// the workspace, comparing with the recorded matrix.
pub fn decode_bundle(ws: &Workspace, b: &CertBundle) -> Result<Vec<RootReplay>, DocError> {
    let ctx = &ws.ctx;
    let cat = ctx.cat();
    let mut cx: HashMap<String, Complex> = HashMap::new();
    for c in &b.complexes {
        let x = decode_complex(cat, c)?;
        x.check(cat).map_err(|e| schema(format!("certificate complex {}: {e}", c.label)))?;
        cx.insert(c.label.clone(), x);
    }
    let get = |l: &str| -> Result<Complex, DocError> {
        match cx.get(l) {
            Some(x) => Ok(x.clone()),
            None => ws.complex(l),
        }
    };
    let map = |m: &MapDoc| -> Result<ChainMap, DocError> { decode_map(cat, &get(&m.src)?, &get(&m.tgt)?, m) };
    let mut pres: Vec<Obj> = vec![];
    for p in &b.presheaves {
        pres.push(FpPresheaf::new(cat, map(&p.d)?).map_err(|e| schema(format!("certificate presentation: {e}")))?);
    }
    let mut nodes: Vec<Arc<Cert>> = vec![];
    let child = |nodes: &Vec<Arc<Cert>>, i: usize| nodes.get(i).cloned().ok_or_else(|| schema(format!("node {i} referenced before definition")));
    for (k, n) in b.nodes.iter().enumerate() {
        let bad = |e: String| schema(format!("certificate node {k}: {e}"));
        let c = match n {
            NodeDoc::Fp { src, tgt, g0, g1 } => {
                let s = pres.get(*src).ok_or_else(|| bad("unknown presentation".into()))?;
                let t = pres.get(*tgt).ok_or_else(|| bad("unknown presentation".into()))?;
                let phi = FpMorphism::with_witness(ctx, s, t, map(g0)?, map(g1)?).map_err(|e| bad(e.to_string()))?;
                Cert::Fp(phi)
            }
            NodeDoc::Roof { f, w } => Cert::Roof(RoofMorphism::new(ctx, map(f)?, map(w)?).map_err(|e| bad(e.to_string()))?),
            NodeDoc::Compose { g, f } => Cert::Compose(child(&nodes, *g)?, child(&nodes, *f)?),
            NodeDoc::Sum { a, b } => Cert::Sum(child(&nodes, *a)?, child(&nodes, *b)?),
            NodeDoc::Scale { s, a } => Cert::Scale(parse_q(s).map_err(|e| bad(e.to_string()))?, child(&nodes, *a)?),
            NodeDoc::Inverse { a } => Cert::Inverse(child(&nodes, *a)?),
            NodeDoc::FactorEpi { epi, map } => Cert::FactorEpi { epi: child(&nodes, *epi)?, map: child(&nodes, *map)? },
            NodeDoc::FactorMono { mono, map } => Cert::FactorMono { mono: child(&nodes, *mono)?, map: child(&nodes, *map)? },
            NodeDoc::SummandInverse { map, e_src, e_tgt } => Cert::SummandInverse {
                map: child(&nodes, *map)?,
                e_src: child(&nodes, *e_src)?,
                e_tgt: child(&nodes, *e_tgt)?,
            },
        };
        nodes.push(Arc::new(c));
    }
    let mut out = vec![];
    for r in &b.roots {
        let c = child(&nodes, r.node)?;
        let (ok, detail) = match replay(ctx, &c) {
            Ok((_, _, m)) if encode_matrix(&m) == r.matrix => (true, "replayed".to_string()),
            Ok(_) => (false, "recomputed matrix differs from the recorded one".to_string()),
            Err(e) => (false, e.to_string()),
        };
        out.push(RootReplay { name: r.name.clone(), ok, detail });
    }
    Ok(out)
}
