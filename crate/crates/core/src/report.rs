//! Command results: machine reports mirror the input document and add
//! `query`, `results`, `certificates`, `status` and a determinism hash.

use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::category::{validate_presentation, ObjId};
use crate::document::{decode_bundle, encode_matrix, hom_bounds, BundleBuilder, CertBundle, DocError, Workspace};
use crate::fp::{bracket, fiber, MMorphism};
use crate::functor::validate_functor;
use crate::motive::{lefschetz_split, semisimple_split, sign_twist, MotiveError};
use crate::suites::{dims_json, run_suite, SUITES};

pub const VERBS: [&str; 7] = ["validate", "hom", "fiber", "split", "twist", "check", "replay"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Lefschetz,
    Semisimple,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub depth: usize,
    pub method: Method,
    /// Certificates to replay, for the `replay` verb.
    pub bundle: Option<CertBundle>,
}

impl Default for Options {
    fn default() -> Self {
        Options { depth: 2, method: Method::Lefschetz, bundle: None }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verb: String,
    pub args: Vec<String>,
    pub depth: usize,
    pub window: Vec<String>,
    pub results: Vec<Value>,
    pub certificates: CertBundle,
    pub pass: bool,
    pub elapsed: Duration,
}

struct Out<'a> {
    results: Vec<Value>,
    certs: BundleBuilder<'a>,
    pass: bool,
}

impl Out<'_> {
    fn push(&mut self, pass: bool, v: Value) {
        self.pass &= pass;
        self.results.push(v);
    }

    fn certify(&mut self, name: String, m: &MMorphism) {
        self.certs.add(name, m);
    }
}

fn need(args: &[String], n: usize, verb: &str) -> Result<(), DocError> {
    if args.len() != n {
        return Err(DocError::Schema(format!("{verb} takes {n} arguments, got {}", args.len())));
    }
    Ok(())
}

fn validate(ws: &Workspace, out: &mut Out) {
    let ctx = &ws.ctx;
    out.push(ws.issues.is_empty(), json!({"check": "complexes", "issues": ws.issues}));
    if !ws.issues.is_empty() {
        return;
    }
    let mut objs: Vec<ObjId> = ws.window.iter().flat_map(|(_, x)| x.terms().values().flatten().copied().collect::<Vec<_>>()).collect();
    objs.push(ctx.cat().unit());
    objs.sort();
    objs.dedup();
    let p = validate_presentation(ctx.cat(), &objs);
    out.push(p.passed(), json!({"check": "presentation", "report": p}));
    let f = validate_functor(ctx.cat(), ctx.h(), &objs);
    out.push(f.passed(), json!({"check": "functor", "report": f}));
    let c = ws.covers.validate(ctx);
    out.push(c.is_ok(), json!({"check": "covers", "error": c.err()}));
    for m in &ws.motives {
        let r = m.validate(ctx);
        out.push(r.is_ok(), json!({"check": "motive", "motive": m.name, "error": r.err().map(|e| e.to_string())}));
    }
}

fn hom(ws: &Workspace, args: &[String], depth: usize, out: &mut Out) -> Result<(), DocError> {
    need(args, 2, "hom")?;
    let (a, b) = (ws.complex(&args[0])?, ws.complex(&args[1])?);
    let hb = hom_bounds(ws, &a, &b, depth).map_err(|e| DocError::Schema(e.to_string()))?;
    let basis: Vec<Value> = hb.certified.iter().map(|m| json!(encode_matrix(&m.matrix))).collect();
    for (k, m) in hb.certified.iter().enumerate() {
        out.certify(format!("Hom({}, {}) #{k}", args[0], args[1]), m);
    }
    out.push(
        hb.met(),
        json!({
            "src": args[0], "tgt": args[1],
            "certified": hb.certified_dim(), "upper": hb.upper_dim, "ambient": hb.ambient_dim,
            "upper bound": format!("{:?}", hb.upper), "met": hb.met(), "basis": basis,
        }),
    );
    Ok(())
}

fn fiber_cmd(ws: &Workspace, args: &[String], out: &mut Out) -> Result<(), DocError> {
    need(args, 1, "fiber")?;
    let f = fiber(&ws.ctx, &bracket(&ws.complex(&args[0])?));
    let dims = f.dims();
    out.push(true, json!({"object": args[0], "dims": dims_json(&dims), "total": dims.total_dim()}));
    Ok(())
}

fn split(ws: &Workspace, args: &[String], method: Method, out: &mut Out) -> Result<(), DocError> {
    need(args, 1, "split")?;
    let m = ws.find_motive(&args[0])?;
    if let Err(e) = m.validate(&ws.ctx) {
        return Err(DocError::Schema(e.to_string()));
    }
    let r = match method {
        Method::Lefschetz => lefschetz_split(&ws.ctx, m),
        Method::Semisimple => semisimple_split(&ws.ctx, m),
    };
    match r {
        Ok(s) => {
            let c = s.check(&ws.ctx);
            for (i, p) in s.projectors.iter().enumerate() {
                out.certify(format!("{}: π_{i}", m.name), p);
            }
            let proj: Vec<Value> = s.projectors.iter().map(|p| json!(encode_matrix(&p.matrix))).collect();
            out.push(
                c.ok(),
                json!({
                    "motive": m.name, "method": format!("{method:?}").to_lowercase(), "projectors": proj,
                    "idempotent": c.idempotent, "orthogonal": c.orthogonal, "sums to identity": c.sums_to_identity,
                    "degree projectors": c.degree_projectors, "replays": c.replays,
                }),
            );
        }
        Err(e) => out.push(false, json!({"motive": m.name, "error": e.to_string(), "diagnostic": diagnostic(&e)})),
    }
    Ok(())
}

fn diagnostic(e: &MotiveError) -> Value {
    match e {
        MotiveError::Missing { level, what } => json!({"level": level, "missing": what}),
        MotiveError::Precondition { level, degree, what } => json!({"level": level, "degree": degree, "what": what}),
        MotiveError::NotInvertible { level, degree } => json!({"level": level, "degree": degree}),
        MotiveError::SectionFailed { stage } => json!({"stage": stage}),
        _ => Value::Null,
    }
}

fn twist(ws: &Workspace, out: &mut Out) -> Result<(), DocError> {
    let p = ws.doc.purity.as_ref().ok_or_else(|| DocError::Schema("document has no purity section".into()))?;
    match sign_twist(&ws.ctx, &p.window, &p.weights) {
        Ok(r) => {
            let blocks: Vec<Value> = r
                .blocks
                .iter()
                .map(|b| json!({"x": b.x, "y": b.y, "weights": [b.wx, b.wy], "sign": b.sign, "plain swap": b.plain}))
                .collect();
            out.push(
                r.ok(),
                json!({
                    "window": p.window, "blocks": blocks, "involutive": r.involutive, "natural": r.natural,
                    "hexagon": r.hexagon, "entries in {0, ±1}": r.unit_entries, "pairs": r.pairs, "triples": r.triples,
                }),
            );
        }
        Err(MotiveError::Missing { what, .. }) => return Err(DocError::Schema(format!("missing {what}"))),
        Err(e) => out.push(false, json!({"error": e.to_string()})),
    }
    Ok(())
}

fn check(ws: &Workspace, args: &[String], depth: usize, out: &mut Out) -> Result<(), DocError> {
    let names: Vec<String> = match args.first().map(String::as_str) {
        None | Some("all") => SUITES.iter().map(|s| s.to_string()).collect(),
        Some(_) => args.to_vec(),
    };
    for n in &names {
        let r = run_suite(ws, n, depth)?;
        for (name, m) in &r.certified {
            out.certify(format!("{n}: {name}"), m);
        }
        out.push(r.pass, serde_json::to_value(&r).expect("suite reports serialize"));
    }
    Ok(())
}

fn replay(ws: &Workspace, bundle: Option<&CertBundle>, out: &mut Out) -> Result<(), DocError> {
    let b = bundle.ok_or_else(|| DocError::Schema("no certificates to replay".into()))?;
    for r in decode_bundle(ws, b)? {
        out.push(r.ok, serde_json::to_value(&r).expect("serialize"));
    }
    Ok(())
}

/// Runs `verb`. Without arguments, `hom`, `fiber` and `split` run every
/// matching query of the document.
pub fn run(ws: &Workspace, verb: &str, args: &[String], opts: &Options) -> Result<Report, DocError> {
    let start = Instant::now();
    if !VERBS.contains(&verb) {
        return Err(DocError::Schema(format!("unknown verb {verb}")));
    }
    if verb != "validate" && !ws.issues.is_empty() {
        return Err(DocError::Schema(ws.issues.join("; ")));
    }
    let mut out = Out { results: vec![], certs: BundleBuilder::new(ws.ctx.cat()), pass: true };
    let queries: Vec<Vec<String>> = if args.is_empty() && matches!(verb, "hom" | "fiber" | "split") {
        let qs: Vec<Vec<String>> = ws.doc.queries.iter().filter(|q| q.verb == verb).map(|q| q.args.clone()).collect();
        if qs.is_empty() {
            return Err(DocError::Schema(format!("no {verb} arguments and no {verb} queries in the document")));
        }
        qs
    } else {
        vec![args.to_vec()]
    };
    for a in &queries {
        match verb {
            "validate" => validate(ws, &mut out),
            "hom" => hom(ws, a, opts.depth, &mut out)?,
            "fiber" => fiber_cmd(ws, a, &mut out)?,
            "split" => split(ws, a, opts.method, &mut out)?,
            "twist" => twist(ws, &mut out)?,
            "check" => check(ws, a, opts.depth, &mut out)?,
            "replay" => replay(ws, opts.bundle.as_ref(), &mut out)?,
            _ => unreachable!(),
        }
    }
    Ok(Report {
        verb: verb.into(),
        args: args.to_vec(),
        depth: opts.depth,
        window: ws.window.iter().map(|(l, _)| l.clone()).collect(),
        results: out.results,
        certificates: out.certs.finish(),
        pass: out.pass,
        elapsed: start.elapsed(),
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.pass { 0 } else { 1 }
    }

    /// The document followed by the query, its results and certificates;
    /// timing is left out so that reruns are byte-identical.
    pub fn machine(&self, ws: &Workspace) -> String {
        let mut m: Map<String, Value> = match serde_json::to_value(&ws.doc).expect("documents serialize") {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        m.insert("query".into(), json!({"verb": self.verb, "args": self.args, "depth": self.depth, "window": self.window}));
        m.insert("results".into(), Value::Array(self.results.clone()));
        m.insert("certificates".into(), serde_json::to_value(&self.certificates).expect("serialize"));
        m.insert("status".into(), json!(if self.pass { "pass" } else { "fail" }));
        let hash = sha256_hex(serde_json::to_string(&m).expect("serialize").as_bytes());
        m.insert("determinism_hash".into(), json!(hash));
        serde_json::to_string_pretty(&Value::Object(m)).expect("serialize") + "\n"
    }

    pub fn human(&self) -> String {
        let n = self.certificates.roots.len();
        let mut s = format!(
            "{} {}: {}  ({} ms, {n} certificate{})\n",
            self.verb,
            self.args.join(" "),
            if self.pass { "PASS" } else { "FAIL" },
            self.elapsed.as_millis(),
            if n == 1 { "" } else { "s" }
        );
        for r in &self.results {
            render(&mut s, r, 1);
        }
        s
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) || a.is_empty() => {
            Some(serde_json::to_string(v).expect("serialize"))
        }
        Value::Array(a) if a.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) => {
            Some(serde_json::to_string(v).expect("serialize"))
        }
        Value::Object(_) | Value::Array(_) => None,
        other => Some(other.to_string()),
    }
}

/// Indented key/value table.
fn render(s: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            if let (Some(Value::String(n)), Some(Value::Bool(p))) = (m.get("name"), m.get("pass")) {
                s.push_str(&format!("{pad}[{}] {n}", if *p { "pass" } else { "FAIL" }));
                match m.get("detail").and_then(scalar_or_inline) {
                    Some(d) => s.push_str(&format!("  {d}\n")),
                    None => s.push('\n'),
                }
                return;
            }
            let width = m.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, x) in m {
                match scalar(x) {
                    Some(t) => s.push_str(&format!("{pad}{k:width$}  {t}\n")),
                    None => {
                        s.push_str(&format!("{pad}{k}\n"));
                        render(s, x, indent + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                render(s, x, indent);
            }
        }
        other => s.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

fn scalar_or_inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        other => Some(serde_json::to_string(other).expect("serialize")),
    }
}
