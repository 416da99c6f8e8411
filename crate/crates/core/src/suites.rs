//! Invariant suites over a workspace window.

use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::{apply_kunneth, combine, cone, verify_sigma_exact, ChainMap, Complex, Triangle};
use crate::document::{hom_bounds, DocError, Workspace};
use crate::fp::{
    bracket, fiber, fiber_map, fp_cokernel, fp_kernel, is_serre_null, m_iso_test, replay, zig_zags, FpMorphism,
    FpPresheaf, MMorphism, Obj,
};
use crate::graded::{Bidegree, GradedMap, GradedSpace};
use crate::motive::{
    check_hard_lefschetz, check_weak_lefschetz, derive_b_operators, lefschetz_split, primitive_decompose,
    purity_decompose, semisimple_split, sign_twist, KunnethSplitting, MotiveError, MotivePresentation,
};

pub const SUITES: [&str; 11] = [
    "kunneth",
    "sigma-exactness",
    "faithful-exact",
    "semisimple",
    "serre-kill",
    "duality",
    "splitting",
    "lefschetz",
    "purity",
    "twist",
    "probe",
];

/// Largest hom dimension swept over all `{-1, 0, 1}` coefficient vectors.
const SWEEP_DIM: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub items: Vec<CheckItem>,
    #[serde(skip)]
    pub certified: Vec<(String, MMorphism)>,
}

pub fn dims_json(v: &GradedSpace<Bidegree>) -> Value {
    Value::Array(v.iter().filter(|&(_, n)| n > 0).map(|(b, n)| json!([b.0, b.1, n])).collect())
}

struct Run<'a> {
    ws: &'a Workspace,
    depth: usize,
    items: Vec<CheckItem>,
    certified: Vec<(String, MMorphism)>,
}

impl Run<'_> {
    fn item(&mut self, name: impl Into<String>, pass: bool, detail: Value) {
        self.items.push(CheckItem { name: name.into(), pass, detail });
    }

    fn pairs(&self) -> Vec<((String, Complex), (String, Complex))> {
        let w = &self.ws.window;
        w.iter().flat_map(|a| w.iter().map(move |b| (a.clone(), b.clone()))).collect()
    }

    fn homology(&self, x: &Complex) -> GradedSpace<Bidegree> {
        apply_kunneth(self.ws.ctx.h(), self.ws.ctx.cat(), x).dims()
    }

    fn kunneth(&mut self) {
        let cat = self.ws.ctx.cat();
        for ((la, a), (lb, b)) in self.pairs() {
            let Ok(t) = a.tensor(cat, &b) else {
                self.item(format!("{la} ⊗ {lb}"), true, json!({"skipped": "tensor outside the presented range"}));
                continue;
            };
            let (ht, conv) = (self.homology(&t), self.homology(&a).tensor(&self.homology(&b)));
            let pass = dims_json(&ht) == dims_json(&conv);
            self.item(format!("{la} ⊗ {lb}"), pass, json!({"tensor": dims_json(&ht), "convolution": dims_json(&conv)}));
        }
    }

    /// Basis maps `a -> b` and, for small homs, every `{-1, 0, 1}` combination.
    fn sweep(&self, a: &Complex, b: &Complex) -> Vec<ChainMap> {
        let cat = self.ws.ctx.cat();
        let basis = self.ws.ctx.kb_hom(a, b).basis(cat);
        let mut out: Vec<ChainMap> = basis.clone();
        if basis.len() <= SWEEP_DIM {
            let n = basis.len() as u32;
            for code in 0..3usize.pow(n) {
                let coeffs: Vec<_> = (0..n)
                    .map(|i| crate::linalg::q((code / 3usize.pow(i) % 3) as i64 - 1))
                    .collect();
                out.push(combine(cat, a, b, &basis, &coeffs));
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|f| seen.insert(f.clone()));
        out
    }

    fn h_epis(&self) -> Vec<(String, ChainMap)> {
        let mut out = vec![];
        for ((la, a), (lb, b)) in self.pairs() {
            for (k, f) in self.sweep(&a, &b).into_iter().enumerate() {
                if self.ws.ctx.is_h_epi(&f) {
                    out.push((format!("{la} -> {lb} #{k}"), f));
                }
            }
        }
        out
    }

    fn sigma_exactness(&mut self) {
        let (h, cat) = (self.ws.ctx.h(), self.ws.ctx.cat());
        for (name, p) in self.h_epis() {
            match Triangle::of_epi(cat, &p) {
                Ok(t) => {
                    let r = verify_sigma_exact(h, cat, &t);
                    let rows: Vec<Value> =
                        r.rows.iter().map(|w| json!([w.bidegree.0, w.bidegree.1, w.a, w.b, w.c])).collect();
                    self.item(name, r.exact, json!({"ranks [n, k, A, B, C]": rows}));
                }
                Err(e) => self.item(name, false, json!({"error": e.to_string()})),
            }
        }
    }

    fn faithful_exact(&mut self) {
        let ctx = &self.ws.ctx;
        let cat = ctx.cat();
        let mut maps: Vec<(String, ChainMap)> = vec![];
        for ((la, a), (lb, b)) in self.pairs() {
            for (k, f) in ctx.kb_hom(&a, &b).basis(cat).into_iter().enumerate().take(SWEEP_DIM) {
                maps.push((format!("{la} -> {lb} #{k}"), f));
            }
        }
        for (name, f) in maps {
            let phi = FpMorphism::bracket(&f);
            let hphi = fiber_map(ctx, &phi);
            let (ker, coker) = match (fp_kernel(ctx, &phi), fp_cokernel(ctx, &phi)) {
                (Ok(k), Ok(c)) => (k, c),
                (Err(e), _) | (_, Err(e)) => {
                    self.item(name, false, json!({"error": e.to_string()}));
                    continue;
                }
            };
            let hk = fiber_map(ctx, &ker.incl);
            let hc = fiber_map(ctx, &coker.proj);
            let kdims = fiber(ctx, &ker.obj).dims();
            let cdims = fiber(ctx, &coker.obj).dims();
            let square = |outer: Result<FpMorphism, _>, inner: Result<GradedMap<Bidegree>, _>| match (outer, inner) {
                (Ok(o), Ok(i)) => {
                    let o = fiber_map(ctx, &o);
                    o == i && o.is_zero()
                }
                _ => false,
            };
            let ksq = square(phi.compose(cat, &ker.incl), hphi.compose(&hk));
            let csq = square(coker.proj.compose(cat, &phi), hc.compose(&hphi));
            let kd = dims_json(&kdims) == dims_json(&hphi.kernel_dims());
            let cd = dims_json(&cdims) == dims_json(&hphi.cokernel_dims());
            let pass = ksq && csq && kd && cd && hk.is_injective() && hc.is_surjective();
            self.item(
                name,
                pass,
                json!({"kernel": dims_json(&kdims), "cokernel": dims_json(&cdims), "kernel square": ksq, "cokernel square": csq}),
            );
        }
    }

    fn object_pairs(&self) -> Vec<((String, Complex), (String, Complex))> {
        let objs = self.ws.window_objects();
        let mut out = vec![];
        for (la, _) in &objs {
            for (lb, _) in &objs {
                out.push(((la.clone(), self.ws.complex(la).expect("window")), (lb.clone(), self.ws.complex(lb).expect("window"))));
            }
        }
        out
    }

    fn semisimple(&mut self) {
        for ((la, a), (lb, b)) in self.object_pairs() {
            let name = format!("Hom({la}, {lb})");
            match hom_bounds(self.ws, &a, &b, self.depth) {
                Ok(hb) => {
                    let replays = hb.certified.iter().all(|m| m.verify(&self.ws.ctx).is_ok());
                    for (k, m) in hb.certified.iter().enumerate() {
                        self.certified.push((format!("{name} #{k}"), m.clone()));
                    }
                    self.item(
                        name,
                        hb.met() && replays,
                        json!({"certified": hb.certified_dim(), "upper": hb.upper_dim, "ambient": hb.ambient_dim, "upper bound": format!("{:?}", hb.upper), "met": hb.met()}),
                    );
                }
                Err(e) => self.item(name, false, json!({"error": e.to_string()})),
            }
        }
    }

    fn serre_kill(&mut self) {
        let ctx = &self.ws.ctx;
        let cat = ctx.cat();
        let mut nulls: Vec<(String, Obj)> = vec![];
        for (l, x) in &self.ws.window {
            let id = x.identity(cat);
            if let Ok(c) = cone(cat, &id) {
                nulls.push((format!("cone(id_{l})"), bracket(&c.cone)));
            }
            if let Ok(p) = FpPresheaf::new(cat, id) {
                nulls.push((format!("coker(id_{l})"), p));
            }
            let b = bracket(x);
            if fiber(ctx, &b).is_zero() {
                nulls.push((l.clone(), b));
            }
        }
        for (name, f) in nulls {
            let id = MMorphism::identity(ctx, &f);
            let zero = MMorphism::zero(ctx, &f, &f);
            let diff = id.sub(&zero);
            let killed = diff.as_ref().is_ok_and(|d| d.matrix.is_zero() && d.verify(ctx).is_ok());
            let pass = is_serre_null(ctx, &f) && killed;
            if let Ok(d) = diff {
                self.certified.push((format!("id - 0 on {name}"), d));
            }
            self.item(format!("id = 0 on {name}"), pass, json!({"serre null": is_serre_null(ctx, &f)}));
        }
    }

    fn duality(&mut self) {
        let ctx = &self.ws.ctx;
        for (l, x) in &self.ws.window {
            let f = bracket(x);
            match zig_zags(ctx, &f) {
                Ok(z) => {
                    let (hl, hr) = (fiber_map(ctx, &z.left), fiber_map(ctx, &z.right));
                    let pass = m_iso_test(ctx, &z.left) && m_iso_test(ctx, &z.right) && hl.is_identity() && hr.is_identity();
                    self.item(l.clone(), pass, json!({"left identity": hl.is_identity(), "right identity": hr.is_identity()}));
                }
                Err(e) => self.item(l.clone(), false, json!({"error": e.to_string()})),
            }
        }
    }

    fn split_motive(&mut self, m: &MotivePresentation) -> Option<KunnethSplitting> {
        let ctx = &self.ws.ctx;
        match lefschetz_split(ctx, m) {
            Ok(s) => Some(s),
            Err(e) => {
                self.item(format!("{}: lefschetz_split", m.name), false, error_json(&e));
                None
            }
        }
    }

    fn splitting(&mut self) {
        let ctx = &self.ws.ctx;
        for m in &self.ws.motives {
            if let Err(e) = m.validate(ctx) {
                self.item(format!("{}: presentation", m.name), false, error_json(&e));
                continue;
            }
            let hard = check_hard_lefschetz(ctx, m);
            let hard_ok = hard.as_ref().is_ok_and(|v| v.iter().all(|&b| b));
            self.item(format!("{}: hard Lefschetz", m.name), hard_ok, json!(hard.map_err(|e| e.to_string()).ok()));
            if m.hyperplane.is_some() {
                let weak = check_weak_lefschetz(ctx, m);
                let ok = weak.as_ref().is_ok_and(|v| v.iter().all(|&b| b));
                self.item(format!("{}: weak Lefschetz", m.name), ok, json!(weak.map_err(|e| e.to_string()).ok()));
            }
            let Some(s) = self.split_motive(m) else { continue };
            let c = s.check(ctx);
            self.item(format!("{}: lefschetz_split", m.name), c.ok(), split_json(&c));
            for (i, p) in s.projectors.iter().enumerate() {
                self.certified.push((format!("{}: π_{i}", m.name), p.clone()));
            }
            if hard_ok {
                match semisimple_split(ctx, m) {
                    Ok(t) => {
                        let same = s.projectors.iter().zip(&t.projectors).all(|(a, b)| a.matrix == b.matrix);
                        let c = t.check(ctx);
                        self.item(format!("{}: semisimple_split", m.name), c.ok() && same, split_json(&c));
                    }
                    Err(e) => self.item(format!("{}: semisimple_split", m.name), false, error_json(&e)),
                }
            }
        }
    }

    fn lefschetz(&mut self) {
        let ctx = &self.ws.ctx;
        for m in &self.ws.motives {
            let Some(s) = self.split_motive(m) else { continue };
            let prim = match primitive_decompose(ctx, m, &s) {
                Ok(p) => p,
                Err(e) => {
                    self.item(format!("{}: primitive_decompose", m.name), false, error_json(&e));
                    continue;
                }
            };
            for &(i, sum, h) in &prim.counts {
                self.item(
                    format!("{}: Σ_j dim L^j P^{{{i}-2j}} = dim H^{i}", m.name),
                    sum == h,
                    json!({"pieces": sum, "H": h}),
                );
            }
            match derive_b_operators(ctx, m, &s, &prim) {
                Ok(b) => {
                    for r in &b.relations {
                        self.item(format!("{}: {}", m.name, r.name), r.holds, Value::Null);
                    }
                    self.certified.push((format!("{}: Λ", m.name), b.lambda.clone()));
                    for (n, p) in b.labels.iter().zip(&b.p) {
                        self.certified.push((format!("{}: p_{:?}", m.name, n), p.clone()));
                    }
                    for (i, st) in b.star.iter().enumerate() {
                        self.certified.push((format!("{}: ∗_{i}", m.name), st.clone()));
                    }
                    for (i, c) in &b.clambda {
                        self.certified.push((format!("{}: ᶜΛ_{i}", m.name), c.clone()));
                    }
                }
                Err(e) => self.item(format!("{}: derive_b_operators", m.name), false, error_json(&e)),
            }
        }
    }

    fn purity(&mut self) {
        let ctx = &self.ws.ctx;
        let mut splits = vec![];
        for m in &self.ws.motives {
            if let Some(s) = self.split_motive(m) {
                splits.push((m.name.clone(), s));
            }
        }
        // each object against a second copy of itself
        let objs: Vec<(String, &KunnethSplitting)> =
            splits.iter().flat_map(|(n, s)| [(n.clone(), s), (format!("{n}'"), s)]).collect();
        if objs.is_empty() {
            return;
        }
        match purity_decompose(ctx, &objs, self.depth) {
            Ok(r) => {
                let classes: Vec<Value> = r
                    .classes
                    .iter()
                    .map(|c| json!({"weight": c.weight, "members": c.members.iter().map(|(n, _, d)| json!([n, d])).collect::<Vec<_>>()}))
                    .collect();
                self.item("pure classes", true, Value::Array(classes));
                for h in r.homs.iter().filter(|h| h.a.1 != h.b.1) {
                    self.item(
                        format!("Hom({}_{}, {}_{}) = 0", h.a.0, h.a.1, h.b.0, h.b.1),
                        !h.nonzero,
                        json!({"certified": h.certified}),
                    );
                }
            }
            Err(e) => self.item("purity_decompose", false, error_json(&e)),
        }
    }

    fn twist(&mut self) {
        let Some(p) = &self.ws.doc.purity else { return };
        match sign_twist(&self.ws.ctx, &p.window, &p.weights) {
            Ok(r) => {
                for b in &r.blocks {
                    self.item(
                        format!("σ on {}_{} ⊗ {}_{}", b.x, b.wx, b.y, b.wy),
                        b.plain,
                        json!({"sign": b.sign}),
                    );
                }
                self.item("involution", r.involutive, json!({"pairs": r.pairs}));
                self.item("naturality", r.natural, Value::Null);
                self.item("hexagon", r.hexagon, json!({"triples": r.triples}));
                self.item("entries in {0, ±1}", r.unit_entries, Value::Null);
            }
            Err(e) => self.item("sign_twist", false, error_json(&e)),
        }
    }

    fn probe(&mut self) {
        let ctx = &self.ws.ctx;
        for ((la, a), (lb, b)) in self.object_pairs() {
            let name = format!("Hom({la}, {lb})");
            match hom_bounds(self.ws, &a, &b, self.depth) {
                Ok(hb) => {
                    let replays = hb
                        .certified
                        .iter()
                        .all(|m| replay(ctx, &m.cert).is_ok_and(|(_, _, r)| r == m.matrix));
                    for (k, m) in hb.certified.iter().enumerate() {
                        self.certified.push((format!("{name} #{k}"), m.clone()));
                    }
                    self.item(
                        name,
                        replays,
                        json!({"certified": hb.certified_dim(), "upper": hb.upper_dim, "met": hb.met(), "replays": replays}),
                    );
                }
                Err(e) => self.item(name, false, json!({"error": e.to_string()})),
            }
        }
        for m in &self.ws.motives {
            let name = format!("{}: semisimple_split", m.name);
            match semisimple_split(ctx, m) {
                Ok(s) => {
                    let c = s.check(ctx);
                    self.item(name, c.ok(), split_json(&c));
                }
                // a located failure is the honest outcome here
                Err(e @ MotiveError::SectionFailed { stage }) => {
                    self.item(name, true, json!({"failure": e.to_string(), "stage": stage}))
                }
                Err(e) => {
                    let located = matches!(e, MotiveError::NotInvertible { .. } | MotiveError::Precondition { .. });
                    self.item(name, located, error_json(&e));
                }
            }
        }
    }
}

fn error_json(e: &MotiveError) -> Value {
    json!({"error": e.to_string()})
}

fn split_json(c: &crate::motive::SplitCheck) -> Value {
    json!({
        "idempotent": c.idempotent,
        "orthogonal": c.orthogonal,
        "sums to identity": c.sums_to_identity,
        "degree projectors": c.degree_projectors,
        "replays": c.replays,
    })
}

/// Runs one named suite over the workspace.
pub fn run_suite(ws: &Workspace, name: &str, depth: usize) -> Result<SuiteReport, DocError> {
    if !ws.issues.is_empty() {
        return Err(DocError::Schema(ws.issues.join("; ")));
    }
    let mut r = Run { ws, depth, items: vec![], certified: vec![] };
    match name {
        "kunneth" => r.kunneth(),
        "sigma-exactness" => r.sigma_exactness(),
        "faithful-exact" => r.faithful_exact(),
        "semisimple" => r.semisimple(),
        "serre-kill" => r.serre_kill(),
        "duality" => r.duality(),
        "splitting" => r.splitting(),
        "lefschetz" => r.lefschetz(),
        "purity" => r.purity(),
        "twist" => r.twist(),
        "probe" => r.probe(),
        _ => return Err(DocError::Schema(format!("unknown suite {name}; known: {}", SUITES.join(", ")))),
    }
    Ok(SuiteReport { suite: name.into(), pass: r.items.iter().all(|i| i.pass), items: r.items, certified: r.certified })
}
