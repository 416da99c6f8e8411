//! Categories of words over generators, realized inside graded vector spaces.
//!
//! Each generator is a graded space carrying linear operators: "group"
//! operators act on tensor products diagonally, "lie" operators act as
//! derivations. Objects are words up to a length bound, the tensor product is
//! concatenation, and morphisms are the degree-preserving maps commuting with
//! every operator. A word's carrier basis is the set of index tuples sorted by
//! total degree and then lexicographically, so concatenation is strictly
//! associative on bases as well as on objects.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{CatError, Category, ObjId};
use crate::graded::{koszul_sign, GradedMap, GradedSpace};
use crate::linalg::{Matrix, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcreteData {
    pub name: String,
    pub max_len: usize,
    /// Primary generators; each dual generator is derived automatically.
    pub generators: Vec<GeneratorData>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorData {
    pub name: String,
    pub dual_name: String,
    /// `(degree, dimension)` pairs.
    pub dims: Vec<(i64, usize)>,
    /// Operators acting diagonally on tensor products, as full matrices.
    #[serde(default)]
    pub group: Vec<Vec<Vec<String>>>,
    /// Operators acting as derivations.
    #[serde(default)]
    pub lie: Vec<Vec<Vec<String>>>,
    /// Optional per-basis weights (used by weight-graded functors).
    #[serde(default)]
    pub weights: Option<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub space: GradedSpace<i64>,
    pub degs: Vec<i64>,
    pub group: Vec<Matrix>,
    pub lie: Vec<Matrix>,
    pub weights: Vec<i64>,
    pub dual: usize,
    /// Local index of the dual basis vector in the dual generator.
    pub dual_pos: Vec<usize>,
}

#[derive(Debug)]
struct WordData {
    space: GradedSpace<i64>,
    tuples: Vec<Vec<u32>>,
    degs: Vec<i64>,
    pos: HashMap<Vec<u32>, usize>,
}

#[derive(Debug)]
pub struct ConcretePresentation {
    data: ConcreteData,
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
    offsets: Vec<usize>,
    words: Mutex<HashMap<ObjId, Arc<WordData>>>,
    homs: Mutex<HashMap<(ObjId, ObjId), Arc<Matrix>>>,
}

fn malformed(s: impl Into<String>) -> CatError {
    CatError::Malformed(s.into())
}

fn parse_matrix(n: usize, m: &[Vec<String>], what: &str) -> Result<Matrix, CatError> {
    Matrix::from_strings(n, n, m).map_err(|e| malformed(format!("{what}: {e}")))
}

impl ConcretePresentation {
    pub fn new(data: ConcreteData) -> Result<Self, CatError> {
        let mut gens = Vec::new();
        let ng = data.generators.first().map(|g| g.group.len()).unwrap_or(0);
        let nl = data.generators.first().map(|g| g.lie.len()).unwrap_or(0);
        for gd in &data.generators {
            if gd.group.len() != ng || gd.lie.len() != nl {
                return Err(malformed(format!("generator {} has the wrong number of operators", gd.name)));
            }
            if gd.name.contains('.') || gd.name == "1" || gd.dual_name.contains('.') || gd.dual_name == "1" {
                return Err(malformed(format!("reserved generator name {}", gd.name)));
            }
            let space = GradedSpace::new(gd.dims.iter().copied());
            let n = space.total_dim();
            let degs: Vec<i64> = space.iter().flat_map(|(d, k)| std::iter::repeat_n(d, k)).collect();
            let group = gd
                .group
                .iter()
                .map(|m| parse_matrix(n, m, &gd.name))
                .collect::<Result<Vec<_>, _>>()?;
            let lie = gd.lie.iter().map(|m| parse_matrix(n, m, &gd.name)).collect::<Result<Vec<_>, _>>()?;
            let inverses = group
                .iter()
                .map(|m| m.inverse().ok_or_else(|| malformed(format!("{}: group operator not invertible", gd.name))))
                .collect::<Result<Vec<_>, _>>()?;
            let weights = gd.weights.clone().unwrap_or_else(|| vec![0; n]);
            if weights.len() != n {
                return Err(malformed(format!("{}: weight list length", gd.name)));
            }
            let dual_space = space.dual();
            // basis vector (degree k, index j) pairs with (degree -k, index j)
            let mut dual_pos = Vec::with_capacity(n);
            for (d, k) in space.iter() {
                for j in 0..k {
                    dual_pos.push(dual_space.offset(-d) + j);
                }
            }
            let mut inv = vec![0; n];
            for (a, &b) in dual_pos.iter().enumerate() {
                inv[b] = a;
            }
            let contra = |m: &Matrix, neg: bool| {
                let mut out = Matrix::zeros(n, n);
                for a in 0..n {
                    for b in 0..n {
                        let v = &m[(b, a)];
                        out[(dual_pos[a], dual_pos[b])] = if neg { -v.clone() } else { v.clone() };
                    }
                }
                out
            };
            let primary = gens.len();
            let dual_degs = dual_space.iter().flat_map(|(d, k)| std::iter::repeat_n(d, k)).collect();
            let dual_weights = (0..n).map(|b| -weights[inv[b]]).collect();
            let dual = Generator {
                name: gd.dual_name.clone(),
                space: dual_space,
                degs: dual_degs,
                group: inverses.iter().map(|m| contra(m, false)).collect(),
                lie: lie.iter().map(|m| contra(m, true)).collect(),
                weights: dual_weights,
                dual: primary,
                dual_pos: inv,
            };
            gens.push(Generator { name: gd.name.clone(), space, degs, group, lie, weights, dual: primary + 1, dual_pos });
            gens.push(dual);
        }
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(malformed(format!("duplicate generator {}", g.name)));
            }
        }
        let mut offsets = vec![0];
        let mut count = 1usize;
        for _ in 0..data.max_len {
            offsets.push(*offsets.last().unwrap() + count);
            count = count.saturating_mul(gens.len());
        }
        offsets.push(*offsets.last().unwrap() + count);
        Ok(ConcretePresentation {
            data,
            gens,
            index,
            offsets,
            words: Mutex::new(HashMap::new()),
            homs: Mutex::new(HashMap::new()),
        })
    }

    pub fn data(&self) -> &ConcreteData {
        &self.data
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn max_len(&self) -> usize {
        self.data.max_len
    }

    /// Generator indices of the word `x`.
    pub fn word(&self, x: ObjId) -> Vec<usize> {
        let len = (0..=self.data.max_len).rev().find(|&l| self.offsets[l] <= x).unwrap_or(0);
        let mut r = x - self.offsets[len];
        let g = self.gens.len();
        let mut w = vec![0; len];
        for i in (0..len).rev() {
            w[i] = r % g;
            r /= g;
        }
        w
    }

    pub fn word_id(&self, w: &[usize]) -> Result<ObjId, CatError> {
        if w.len() > self.data.max_len {
            let names: Vec<&str> = w.iter().map(|&i| self.gens[i].name.as_str()).collect();
            return Err(CatError::TensorOutOfRange(names.join(".")));
        }
        let g = self.gens.len();
        Ok(self.offsets[w.len()] + w.iter().fold(0, |acc, &i| acc * g + i))
    }

    pub fn generator_object(&self, name: &str) -> Option<ObjId> {
        self.index.get(name).and_then(|&i| self.word_id(&[i]).ok())
    }

    fn word_data(&self, x: ObjId) -> Arc<WordData> {
        if let Some(w) = self.words.lock().unwrap().get(&x) {
            return w.clone();
        }
        let w = self.word(x);
        let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
        for &g in &w {
            let n = self.gens[g].degs.len() as u32;
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..n).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        let deg = |t: &Vec<u32>| -> i64 { t.iter().zip(&w).map(|(&i, &g)| self.gens[g].degs[i as usize]).sum() };
        tuples.sort_by(|a, b| (deg(a), a).cmp(&(deg(b), b)));
        let degs: Vec<i64> = tuples.iter().map(deg).collect();
        let space = GradedSpace::new(degs.iter().map(|&d| (d, 1)));
        let pos = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let data = Arc::new(WordData { space, tuples, degs, pos });
        self.words.lock().unwrap().insert(x, data.clone());
        data
    }

    /// Carrier of the word `x`.
    pub fn space(&self, x: ObjId) -> GradedSpace<i64> {
        self.word_data(x).space.clone()
    }

    /// Weight of every carrier basis vector of `x`.
    pub fn weights(&self, x: ObjId) -> Vec<i64> {
        let wd = self.word_data(x);
        let w = self.word(x);
        wd.tuples
            .iter()
            .map(|t| t.iter().zip(&w).map(|(&i, &g)| self.gens[g].weights[i as usize]).sum())
            .collect()
    }

    /// Carrier tuple of each basis vector of `x`.
    pub fn tuples(&self, x: ObjId) -> Vec<Vec<u32>> {
        self.word_data(x).tuples.clone()
    }

    /// Full carrier matrix of a coordinate vector.
    pub fn to_total(&self, x: ObjId, y: ObjId, f: &[Q]) -> Matrix {
        let (sx, sy) = (self.space(x), self.space(y));
        let mut m = Matrix::zeros(sy.total_dim(), sx.total_dim());
        let mut off = 0;
        for (d, c) in sx.iter() {
            let r = sy.dim(d);
            if r == 0 {
                continue;
            }
            let b = Matrix::from_flat(r, c, f[off..off + r * c].to_vec());
            m.set_block(sy.offset(d), sx.offset(d), &b);
            off += r * c;
        }
        m
    }

    /// Coordinates of a carrier matrix; entries between different degrees are ignored.
    pub fn from_total(&self, x: ObjId, y: ObjId, m: &Matrix) -> Vec<Q> {
        let (sx, sy) = (self.space(x), self.space(y));
        let mut out = Vec::with_capacity(self.coord_dim(x, y));
        for (d, c) in sx.iter() {
            let r = sy.dim(d);
            if r == 0 {
                continue;
            }
            out.extend(m.block(sy.offset(d), sx.offset(d), r, c).entries().iter().cloned());
        }
        out
    }

    pub fn to_graded(&self, x: ObjId, y: ObjId, f: &[Q]) -> GradedMap<i64> {
        let (sx, sy) = (self.space(x), self.space(y));
        GradedMap::from_total(&sx, &sy, &self.to_total(x, y, f)).expect("degree preserving")
    }

    fn operator_free(&self) -> bool {
        self.gens.iter().all(|g| g.group.is_empty() && g.lie.is_empty())
    }

    /// Operator matrices acting on the word `x`: group operators then lie operators.
    fn actions(&self, x: ObjId) -> Vec<Matrix> {
        let w = self.word(x);
        let wd = self.word_data(x);
        let n = wd.tuples.len();
        let mut out = Vec::new();
        let ng = self.gens.first().map(|g| g.group.len()).unwrap_or(0);
        let nl = self.gens.first().map(|g| g.lie.len()).unwrap_or(0);
        for k in 0..ng {
            let mut m = Matrix::zeros(n, n);
            for (p, tp) in wd.tuples.iter().enumerate() {
                for (q, tq) in wd.tuples.iter().enumerate() {
                    let mut v = Q::one();
                    for (i, &g) in w.iter().enumerate() {
                        let e = &self.gens[g].group[k][(tp[i] as usize, tq[i] as usize)];
                        if e.is_zero() {
                            v = Q::zero();
                            break;
                        }
                        v *= e;
                    }
                    m[(p, q)] = v;
                }
            }
            out.push(m);
        }
        for k in 0..nl {
            let mut m = Matrix::zeros(n, n);
            for (p, tp) in wd.tuples.iter().enumerate() {
                for (q, tq) in wd.tuples.iter().enumerate() {
                    let diff: Vec<usize> = (0..w.len()).filter(|&i| tp[i] != tq[i]).collect();
                    let mut v = Q::zero();
                    match diff.len() {
                        0 => {
                            for (i, &g) in w.iter().enumerate() {
                                v += &self.gens[g].lie[k][(tp[i] as usize, tq[i] as usize)];
                            }
                        }
                        1 => {
                            let i = diff[0];
                            v = self.gens[w[i]].lie[k][(tp[i] as usize, tq[i] as usize)].clone();
                        }
                        _ => {}
                    }
                    m[(p, q)] = v;
                }
            }
            out.push(m);
        }
        out
    }

    fn compute_hom_basis(&self, x: ObjId, y: ObjId) -> Matrix {
        let cd = self.coord_dim(x, y);
        let (ax, ay) = (self.actions(x), self.actions(y));
        if ax.is_empty() {
            return Matrix::identity(cd);
        }
        let (sx, sy) = (self.space(x), self.space(y));
        let (nx, ny) = (sx.total_dim(), sy.total_dim());
        let mut cols: Vec<Vec<Q>> = Vec::with_capacity(cd);
        for k in 0..cd {
            let mut e = vec![Q::zero(); cd];
            e[k] = Q::one();
            let f = self.to_total(x, y, &e);
            let mut col = Vec::with_capacity(ax.len() * nx * ny);
            for (a, b) in ax.iter().zip(&ay) {
                col.extend(b.mul(&f).sub(&f.mul(a)).entries().iter().cloned());
            }
            cols.push(col);
        }
        Matrix::from_columns(ax.len() * nx * ny, &cols).kernel_basis()
    }

    /// `w^∨` for a word `w`.
    fn dual_word(&self, w: &[usize]) -> Vec<usize> {
        w.iter().rev().map(|&g| self.gens[g].dual).collect()
    }

    /// Tuple of the dual basis vector of `t` in the dual word.
    fn dual_tuple(&self, w: &[usize], t: &[u32]) -> Vec<u32> {
        w.iter().zip(t).rev().map(|(&g, &i)| self.gens[g].dual_pos[i as usize] as u32).collect()
    }

    /// `μ: H(x) ⊗ H(y) -> H(x ⊗ y)` with the lexicographic tensor basis on the source.
    pub fn mu(&self, x: ObjId, y: ObjId) -> Result<GradedMap<i64>, CatError> {
        let xy = self.tensor_obj(x, y)?;
        let (wx, wy, wxy) = (self.word_data(x), self.word_data(y), self.word_data(xy));
        let src = wx.space.tensor(&wy.space);
        let mut out = GradedMap::zero(&src, &wxy.space);
        for (d, n) in src.iter() {
            let mut m = Matrix::zeros(n, n);
            for (c, (a, i, j)) in wx.space.tensor_basis(&wy.space, d).into_iter().enumerate() {
                let mut t = wx.tuples[wx.space.offset(a) + i].clone();
                t.extend(&wy.tuples[wy.space.offset(d - a) + j]);
                m[(wxy.pos[&t] - wxy.space.offset(d), c)] = Q::one();
            }
            out.set_block(d, m).expect("shape");
        }
        Ok(out)
    }
}

impl Category for ConcretePresentation {
    fn name(&self) -> &str {
        &self.data.name
    }

    fn num_objects(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn label(&self, x: ObjId) -> String {
        let w = self.word(x);
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&g| self.gens[g].name.as_str()).collect::<Vec<_>>().join(".")
    }

    fn lookup(&self, label: &str) -> Option<ObjId> {
        if label == "1" {
            return Some(0);
        }
        let w: Option<Vec<usize>> = label.split('.').map(|n| self.index.get(n.trim()).copied()).collect();
        self.word_id(&w?).ok()
    }

    fn unit(&self) -> ObjId {
        0
    }

    fn coord_dim(&self, x: ObjId, y: ObjId) -> usize {
        let (sx, sy) = (self.space(x), self.space(y));
        sx.iter().map(|(d, n)| n * sy.dim(d)).sum()
    }

    fn hom_basis(&self, x: ObjId, y: ObjId) -> Arc<Matrix> {
        if let Some(b) = self.homs.lock().unwrap().get(&(x, y)) {
            return b.clone();
        }
        let b = Arc::new(self.compute_hom_basis(x, y));
        self.homs.lock().unwrap().insert((x, y), b.clone());
        b
    }

    fn hom_coeffs(&self, x: ObjId, y: ObjId, v: &[Q]) -> Option<Vec<Q>> {
        if self.operator_free() {
            return Some(v.to_vec());
        }
        let b = self.hom_basis(x, y);
        if b.cols() == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        b.solve(v).ok()?
    }

    fn compose(&self, x: ObjId, y: ObjId, z: ObjId, g: &[Q], f: &[Q]) -> Vec<Q> {
        let (sx, sy, sz) = (self.space(x), self.space(y), self.space(z));
        let mut out = Vec::with_capacity(self.coord_dim(x, z));
        let (mut fo, mut go) = (0, 0);
        let mut g_off = HashMap::new();
        for (d, c) in sy.iter() {
            let r = sz.dim(d);
            if r > 0 {
                g_off.insert(d, go);
                go += r * c;
            }
        }
        for (d, c) in sx.iter() {
            let (m, r) = (sy.dim(d), sz.dim(d));
            let fb = if m > 0 {
                let b = Matrix::from_flat(m, c, f[fo..fo + m * c].to_vec());
                fo += m * c;
                Some(b)
            } else {
                None
            };
            if r == 0 {
                continue;
            }
            match (fb, g_off.get(&d)) {
                (Some(fb), Some(&o)) => {
                    let gb = Matrix::from_flat(r, m, g[o..o + r * m].to_vec());
                    out.extend(gb.mul(&fb).entries().iter().cloned());
                }
                _ => out.extend(std::iter::repeat_n(Q::zero(), r * c)),
            }
        }
        out
    }

    fn identity(&self, x: ObjId) -> Vec<Q> {
        let n = self.space(x).total_dim();
        self.from_total(x, x, &Matrix::identity(n))
    }

    fn tensor_obj(&self, x: ObjId, y: ObjId) -> Result<ObjId, CatError> {
        let mut w = self.word(x);
        w.extend(self.word(y));
        self.word_id(&w)
    }

    fn tensor_mor(&self, x: ObjId, x2: ObjId, y: ObjId, y2: ObjId, f: &[Q], g: &[Q]) -> Result<Vec<Q>, CatError> {
        let (s, t) = (self.tensor_obj(x, y)?, self.tensor_obj(x2, y2)?);
        let (fm, gm) = (self.to_total(x, x2, f), self.to_total(y, y2, g));
        let (wx, wx2, wy, wy2, ws, wt) = (
            self.word_data(x),
            self.word_data(x2),
            self.word_data(y),
            self.word_data(y2),
            self.word_data(s),
            self.word_data(t),
        );
        let mut m = Matrix::zeros(wt.tuples.len(), ws.tuples.len());
        for r in 0..fm.rows() {
            for c in 0..fm.cols() {
                let a = &fm[(r, c)];
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..gm.rows() {
                    for c2 in 0..gm.cols() {
                        let b = &gm[(r2, c2)];
                        if b.is_zero() {
                            continue;
                        }
                        let mut tr = wx2.tuples[r].clone();
                        tr.extend(&wy2.tuples[r2]);
                        let mut tc = wx.tuples[c].clone();
                        tc.extend(&wy.tuples[c2]);
                        m[(wt.pos[&tr], ws.pos[&tc])] = a * b;
                    }
                }
            }
        }
        Ok(self.from_total(s, t, &m))
    }

    fn symmetry(&self, x: ObjId, y: ObjId) -> Result<Vec<Q>, CatError> {
        let (s, t) = (self.tensor_obj(x, y)?, self.tensor_obj(y, x)?);
        let lx = self.word(x).len();
        let (ws, wt, wx) = (self.word_data(s), self.word_data(t), self.word(x));
        let mut m = Matrix::zeros(wt.tuples.len(), ws.tuples.len());
        for (c, tup) in ws.tuples.iter().enumerate() {
            let (a, b) = tup.split_at(lx);
            let da: i64 = a.iter().zip(&wx).map(|(&i, &g)| self.gens[g].degs[i as usize]).sum();
            let db = ws.degs[c] - da;
            let mut swapped = b.to_vec();
            swapped.extend(a);
            m[(wt.pos[&swapped], c)] = Q::from_integer(koszul_sign(da, db).into());
        }
        Ok(self.from_total(s, t, &m))
    }

    fn dual_obj(&self, x: ObjId) -> Result<ObjId, CatError> {
        self.word_id(&self.dual_word(&self.word(x)))
    }

    fn ev(&self, x: ObjId) -> Result<Vec<Q>, CatError> {
        let w = self.word(x);
        let xd = self.dual_obj(x)?;
        let s = self.tensor_obj(xd, x)?;
        let (wx, ws) = (self.word_data(x), self.word_data(s));
        let mut m = Matrix::zeros(1, ws.tuples.len());
        for t in &wx.tuples {
            let mut full = self.dual_tuple(&w, t);
            full.extend(t);
            m[(0, ws.pos[&full])] = Q::one();
        }
        Ok(self.from_total(s, 0, &m))
    }

    fn coev(&self, x: ObjId) -> Result<Vec<Q>, CatError> {
        let w = self.word(x);
        let xd = self.dual_obj(x)?;
        let t = self.tensor_obj(x, xd)?;
        let (wx, wt) = (self.word_data(x), self.word_data(t));
        let mut m = Matrix::zeros(wt.tuples.len(), 1);
        for tup in &wx.tuples {
            let mut full = tup.clone();
            full.extend(self.dual_tuple(&w, tup));
            m[(wt.pos[&full], 0)] = Q::one();
        }
        Ok(self.from_total(0, t, &m))
    }

    fn dual_mor(&self, x: ObjId, y: ObjId, f: &[Q]) -> Result<Vec<Q>, CatError> {
        let (wxw, wyw) = (self.word(x), self.word(y));
        let (xd, yd) = (self.dual_obj(x)?, self.dual_obj(y)?);
        let fm = self.to_total(x, y, f);
        let (wx, wy, wxd, wyd) = (self.word_data(x), self.word_data(y), self.word_data(xd), self.word_data(yd));
        let mut m = Matrix::zeros(wxd.tuples.len(), wyd.tuples.len());
        for r in 0..fm.rows() {
            for c in 0..fm.cols() {
                if fm[(r, c)].is_zero() {
                    continue;
                }
                let dr = wyd.pos[&self.dual_tuple(&wyw, &wy.tuples[r])];
                let dc = wxd.pos[&self.dual_tuple(&wxw, &wx.tuples[c])];
                m[(dc, dr)] = fm[(r, c)].clone();
            }
        }
        Ok(self.from_total(yd, xd, &m))
    }
}
