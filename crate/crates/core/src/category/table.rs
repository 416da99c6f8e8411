//! Presentations given by explicit structure constants.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{CatError, Category, ObjId};
use crate::linalg::{parse_vec, Matrix, Q};

/// Serialized form. Rationals are strings; absent entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableData {
    pub name: String,
    pub objects: Vec<String>,
    pub unit: String,
    pub homs: Vec<HomEntry>,
    pub identity: Vec<ObjVec>,
    pub compose: Vec<ComposeEntry>,
    pub tensor_obj: Vec<TensorObjEntry>,
    pub tensor_mor: Vec<TensorMorEntry>,
    pub symmetry: Vec<PairVec>,
    pub duals: Vec<DualEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomEntry {
    pub src: String,
    pub tgt: String,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjVec {
    pub object: String,
    pub value: Vec<String>,
}

/// `g_index ∘ f_index` for `f: src -> mid`, `g: mid -> tgt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComposeEntry {
    pub src: String,
    pub mid: String,
    pub tgt: String,
    pub g: usize,
    pub f: usize,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorObjEntry {
    pub left: String,
    pub right: String,
    pub result: String,
}

/// `f ⊗ g` for basis elements `f: f_src -> f_tgt`, `g: g_src -> g_tgt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorMorEntry {
    pub f_src: String,
    pub f_tgt: String,
    pub g_src: String,
    pub g_tgt: String,
    pub f: usize,
    pub g: usize,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVec {
    pub left: String,
    pub right: String,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualEntry {
    pub object: String,
    pub dual: String,
    pub ev: Vec<String>,
    pub coev: Vec<String>,
}

#[derive(Debug)]
pub struct TablePresentation {
    data: TableData,
    index: HashMap<String, ObjId>,
    unit: ObjId,
    hom_dim: Vec<Vec<usize>>,
    identity: Vec<Vec<Q>>,
    comp: HashMap<(ObjId, ObjId, ObjId, usize, usize), Vec<Q>>,
    tensor: HashMap<(ObjId, ObjId), ObjId>,
    tmor: HashMap<(ObjId, ObjId, ObjId, ObjId, usize, usize), Vec<Q>>,
    sym: HashMap<(ObjId, ObjId), Vec<Q>>,
    duals: HashMap<ObjId, (ObjId, Vec<Q>, Vec<Q>)>,
    eye: Vec<Arc<Matrix>>,
}

fn malformed(s: impl Into<String>) -> CatError {
    CatError::Malformed(s.into())
}

impl TablePresentation {
    pub fn new(data: TableData) -> Result<Self, CatError> {
        let n = data.objects.len();
        let mut index = HashMap::new();
        for (i, l) in data.objects.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(malformed(format!("duplicate object {l}")));
            }
        }
        let obj = |l: &str| index.get(l).copied().ok_or_else(|| CatError::UnknownObject(l.to_string()));
        let unit = obj(&data.unit)?;
        let mut hom_dim = vec![vec![0; n]; n];
        for h in &data.homs {
            hom_dim[obj(&h.src)?][obj(&h.tgt)?] = h.basis.len();
        }
        let vec_of = |v: &[String], len: usize, what: &str| -> Result<Vec<Q>, CatError> {
            let v = parse_vec(v).map_err(|e| malformed(format!("{what}: {e}")))?;
            if v.len() != len {
                return Err(malformed(format!("{what}: expected {len} entries, found {}", v.len())));
            }
            Ok(v)
        };
        let mut identity = vec![None; n];
        for e in &data.identity {
            let x = obj(&e.object)?;
            identity[x] = Some(vec_of(&e.value, hom_dim[x][x], &format!("identity of {}", e.object))?);
        }
        let identity = identity
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| malformed(format!("missing identity of {}", data.objects[i]))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut comp = HashMap::new();
        for e in &data.compose {
            let (x, y, z) = (obj(&e.src)?, obj(&e.mid)?, obj(&e.tgt)?);
            if e.f >= hom_dim[x][y] || e.g >= hom_dim[y][z] {
                return Err(malformed(format!("compose index out of range at {}->{}->{}", e.src, e.mid, e.tgt)));
            }
            let v = vec_of(&e.value, hom_dim[x][z], "compose value")?;
            comp.insert((x, y, z, e.g, e.f), v);
        }
        let mut tensor = HashMap::new();
        for e in &data.tensor_obj {
            tensor.insert((obj(&e.left)?, obj(&e.right)?), obj(&e.result)?);
        }
        let mut tmor = HashMap::new();
        for e in &data.tensor_mor {
            let (x, x2, y, y2) = (obj(&e.f_src)?, obj(&e.f_tgt)?, obj(&e.g_src)?, obj(&e.g_tgt)?);
            if e.f >= hom_dim[x][x2] || e.g >= hom_dim[y][y2] {
                return Err(malformed("tensor_mor index out of range"));
            }
            let s = tensor.get(&(x, y)).ok_or_else(|| malformed("tensor_mor on undefined tensor"))?;
            let t = tensor.get(&(x2, y2)).ok_or_else(|| malformed("tensor_mor on undefined tensor"))?;
            let v = vec_of(&e.value, hom_dim[*s][*t], "tensor_mor value")?;
            tmor.insert((x, x2, y, y2, e.f, e.g), v);
        }
        let mut sym = HashMap::new();
        for e in &data.symmetry {
            let (x, y) = (obj(&e.left)?, obj(&e.right)?);
            let s = tensor.get(&(x, y)).ok_or_else(|| malformed("symmetry on undefined tensor"))?;
            let t = tensor.get(&(y, x)).ok_or_else(|| malformed("symmetry on undefined tensor"))?;
            sym.insert((x, y), vec_of(&e.value, hom_dim[*s][*t], "symmetry value")?);
        }
        let mut duals = HashMap::new();
        for e in &data.duals {
            let (x, xd) = (obj(&e.object)?, obj(&e.dual)?);
            let dx = tensor.get(&(xd, x)).ok_or_else(|| malformed("ev on undefined tensor"))?;
            let xdx = tensor.get(&(x, xd)).ok_or_else(|| malformed("coev on undefined tensor"))?;
            let ev = vec_of(&e.ev, hom_dim[*dx][unit], "ev")?;
            let coev = vec_of(&e.coev, hom_dim[unit][*xdx], "coev")?;
            duals.insert(x, (xd, ev, coev));
        }
        let maxd = hom_dim.iter().flatten().copied().max().unwrap_or(0);
        let eye = (0..=maxd).map(|d| Arc::new(Matrix::identity(d))).collect();
        Ok(TablePresentation { data, index, unit, hom_dim, identity, comp, tensor, tmor, sym, duals, eye })
    }

    pub fn data(&self) -> &TableData {
        &self.data
    }

    pub fn basis_labels(&self, x: ObjId, y: ObjId) -> Vec<String> {
        let (xl, yl) = (&self.data.objects[x], &self.data.objects[y]);
        self.data
            .homs
            .iter()
            .find(|h| &h.src == xl && &h.tgt == yl)
            .map(|h| h.basis.clone())
            .unwrap_or_default()
    }

    fn tensor_of(&self, x: ObjId, y: ObjId) -> Result<ObjId, CatError> {
        self.tensor
            .get(&(x, y))
            .copied()
            .ok_or_else(|| CatError::TensorOutOfRange(format!("{} ⊗ {}", self.label(x), self.label(y))))
    }
}

impl Category for TablePresentation {
    fn name(&self) -> &str {
        &self.data.name
    }

    fn num_objects(&self) -> usize {
        self.data.objects.len()
    }

    fn label(&self, x: ObjId) -> String {
        self.data.objects[x].clone()
    }

    fn lookup(&self, label: &str) -> Option<ObjId> {
        self.index.get(label).copied()
    }

    fn unit(&self) -> ObjId {
        self.unit
    }

    fn coord_dim(&self, x: ObjId, y: ObjId) -> usize {
        self.hom_dim[x][y]
    }

    fn hom_basis(&self, x: ObjId, y: ObjId) -> Arc<Matrix> {
        self.eye[self.hom_dim[x][y]].clone()
    }

    fn compose(&self, x: ObjId, y: ObjId, z: ObjId, g: &[Q], f: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.hom_dim[x][z]];
        for (b, gb) in g.iter().enumerate() {
            if gb.is_zero() {
                continue;
            }
            for (a, fa) in f.iter().enumerate() {
                if fa.is_zero() {
                    continue;
                }
                if let Some(v) = self.comp.get(&(x, y, z, b, a)) {
                    let c = gb * fa;
                    for (o, vi) in out.iter_mut().zip(v) {
                        *o += &c * vi;
                    }
                }
            }
        }
        out
    }

    fn identity(&self, x: ObjId) -> Vec<Q> {
        self.identity[x].clone()
    }

    fn tensor_obj(&self, x: ObjId, y: ObjId) -> Result<ObjId, CatError> {
        self.tensor_of(x, y)
    }

    fn tensor_mor(&self, x: ObjId, x2: ObjId, y: ObjId, y2: ObjId, f: &[Q], g: &[Q]) -> Result<Vec<Q>, CatError> {
        let (s, t) = (self.tensor_of(x, y)?, self.tensor_of(x2, y2)?);
        let mut out = vec![Q::zero(); self.hom_dim[s][t]];
        for (a, fa) in f.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (b, gb) in g.iter().enumerate() {
                if gb.is_zero() {
                    continue;
                }
                if let Some(v) = self.tmor.get(&(x, x2, y, y2, a, b)) {
                    let c = fa * gb;
                    for (o, vi) in out.iter_mut().zip(v) {
                        *o += &c * vi;
                    }
                }
            }
        }
        Ok(out)
    }

    fn symmetry(&self, x: ObjId, y: ObjId) -> Result<Vec<Q>, CatError> {
        self.sym
            .get(&(x, y))
            .cloned()
            .ok_or_else(|| CatError::Malformed(format!("no symmetry for {} ⊗ {}", self.label(x), self.label(y))))
    }

    fn dual_obj(&self, x: ObjId) -> Result<ObjId, CatError> {
        self.duals.get(&x).map(|d| d.0).ok_or_else(|| CatError::NoDual(self.label(x)))
    }

    fn ev(&self, x: ObjId) -> Result<Vec<Q>, CatError> {
        self.duals.get(&x).map(|d| d.1.clone()).ok_or_else(|| CatError::NoDual(self.label(x)))
    }

    fn coev(&self, x: ObjId) -> Result<Vec<Q>, CatError> {
        self.duals.get(&x).map(|d| d.2.clone()).ok_or_else(|| CatError::NoDual(self.label(x)))
    }
}
