//! One line per acceptance criterion, over the bundled datasets.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use graded_tannaka::complex::{apply_kunneth, Complex};
use graded_tannaka::document::{bundled_text, hom_bounds, Workspace};
use graded_tannaka::fp::{replay, MMorphism, SemisimplicityCertificate};
use graded_tannaka::graded::{Bidegree, GradedSpace};
use graded_tannaka::linalg::{Matrix, Q};
use graded_tannaka::motive::{
    derive_b_operators, lefschetz_split, primitive_decompose, semisimple_split, sign_twist, twisted_symmetry,
    MotiveError,
};
use graded_tannaka::suites::run_suite;
use num_traits::One;
use serde_json::Value;

const ALL: [&str; 6] = ["point", "graded-line", "rep-z2", "genus-1", "surface", "rep-z-unipotent"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn workspace(name: &str) -> Workspace {
    Workspace::parse(bundled_text(name).expect("bundled")).expect("bundled document")
}

fn raw(name: &str) -> Value {
    serde_json::from_str(bundled_text(name).expect("bundled")).expect("json")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dims(v: &GradedSpace<Bidegree>) -> BTreeMap<(i64, i64), usize> {
    v.iter().filter(|&(_, n)| n > 0).map(|(b, n)| ((b.0, b.1), n)).collect()
}

fn convolve(a: &BTreeMap<(i64, i64), usize>, b: &BTreeMap<(i64, i64), usize>) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for (&(n, k), &x) in a {
        for (&(m, l), &y) in b {
            *out.entry((n + m, k + l)).or_insert(0) += x * y;
        }
    }
    out
}

fn suite_everywhere(suite: &str, names: &[&str]) -> Outcome {
    let mut items = 0;
    for name in names {
        let ws = workspace(name);
        let r = run_suite(&ws, suite, 2).map_err(|e| format!("{name}: {e}"))?;
        if let Some(bad) = r.items.iter().find(|i| !i.pass) {
            return Err(format!("{name}: {} {}", bad.name, bad.detail));
        }
        ensure(!r.items.is_empty(), || format!("{name}: nothing checked"))?;
        items += r.items.len();
    }
    Ok(format!("{items} checks on {} datasets", names.len()))
}

fn kunneth() -> Outcome {
    let mut pairs = 0;
    for name in ["point", "graded-line", "rep-z2", "genus-1", "surface"] {
        let ws = workspace(name);
        let (h, cat) = (ws.ctx.h(), ws.ctx.cat());
        let hd = |x: &Complex| dims(&apply_kunneth(h, cat, x).dims());
        for (la, a) in &ws.window {
            for (lb, b) in &ws.window {
                let t = a.tensor(cat, b).map_err(|e| format!("{name}: {la} ⊗ {lb}: {e}"))?;
                let (got, want) = (hd(&t), convolve(&hd(a), &hd(b)));
                ensure(got == want, || format!("{name}: {la} ⊗ {lb}: {got:?} != {want:?}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// Hom dimensions in the presentations themselves: table hom bases, or
/// matching total degree of words of graded lines.
fn direct_hom_dim(doc: &Value, a: &str, b: &str) -> usize {
    let cat = &doc["category"];
    if cat["kind"] == "table" {
        return cat["homs"]
            .as_array()
            .unwrap()
            .iter()
            .find(|h| h["src"] == a && h["tgt"] == b)
            .map_or(0, |h| h["basis"].as_array().unwrap().len());
    }
    let mut deg: BTreeMap<String, i64> = BTreeMap::new();
    for g in cat["generators"].as_array().unwrap() {
        let row = &g["dims"][0];
        assert_eq!(g["dims"].as_array().unwrap().len(), 1, "graded lines only");
        assert_eq!(row[1], 1);
        let d = row[0].as_i64().unwrap();
        deg.insert(g["name"].as_str().unwrap().into(), d);
        deg.insert(g["dual_name"].as_str().unwrap().into(), -d);
    }
    let word = |w: &str| -> i64 { if w == "1" { 0 } else { w.split('.').map(|t| deg[t]).sum() } };
    usize::from(word(a) == word(b))
}

fn semisimple_equivalence() -> Outcome {
    let mut pairs = 0;
    for name in ["rep-z2", "graded-line"] {
        let ws = workspace(name);
        let doc = raw(name);
        let cert: &SemisimplicityCertificate = ws.semisimplicity();
        ensure(cert.holds(), || format!("{name}: no semisimplicity certificate"))?;
        for (la, a) in &ws.window {
            for (lb, b) in &ws.window {
                let hb = hom_bounds(&ws, a, b, 2).map_err(|e| format!("{name}: Hom({la}, {lb}): {e}"))?;
                let want = direct_hom_dim(&doc, la, lb);
                ensure(hb.met(), || {
                    format!("{name}: Hom({la}, {lb}) certified {} of at most {}", hb.certified_dim(), hb.upper_dim)
                })?;
                ensure(hb.certified_dim() == want, || {
                    format!("{name}: Hom({la}, {lb}) = {} but A-hom has dim {want}", hb.certified_dim())
                })?;
                ensure(hb.certified.iter().all(|m| m.verify(&ws.ctx).is_ok()), || {
                    format!("{name}: Hom({la}, {lb}) certificate does not replay")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn curve_splitting() -> Outcome {
    let ws = workspace("genus-1");
    let m = ws.find_motive("genus-1").map_err(|e| e.to_string())?;
    let s = lefschetz_split(&ws.ctx, m).map_err(|e| e.to_string())?;
    ensure(s.projectors.len() == 3, || format!("{} projectors", s.projectors.len()))?;
    let c = s.check(&ws.ctx);
    ensure(c.idempotent && c.orthogonal && c.sums_to_identity && c.replays, || format!("{c:?}"))?;
    // H^i of the curve from its generator data
    let doc = raw("genus-1");
    let gen = doc["category"]["generators"].as_array().unwrap().iter().find(|g| g["name"] == m.x.as_str()).unwrap();
    let fiber: BTreeMap<i64, usize> =
        gen["dims"].as_array().unwrap().iter().map(|r| (r[0].as_i64().unwrap(), r[1].as_u64().unwrap() as usize)).collect();
    for (i, p) in s.projectors.iter().enumerate() {
        let src: BTreeMap<i64, usize> =
            p.matrix.source().iter().filter(|&(_, n)| n > 0).map(|(b, n)| (b.1, n)).collect();
        ensure(src == fiber, || format!("fiber of π_{i} is {src:?}, expected {fiber:?}"))?;
        for (&k, &n) in &fiber {
            let block = p.matrix.block(Bidegree(0, k));
            let want = if k == i as i64 { Matrix::identity(n) } else { Matrix::zeros(n, n) };
            ensure(block == want, || format!("π_{i} on H^{k} is {block:?}"))?;
        }
    }
    Ok(format!("π_0, π_1, π_2 on H dims {:?}", fiber.values().collect::<Vec<_>>()))
}

fn replays(m: &MMorphism, ws: &Workspace) -> bool {
    replay(&ws.ctx, &m.cert).is_ok_and(|(_, _, r)| r == m.matrix)
}

fn surface_pipeline() -> Outcome {
    let ws = workspace("surface");
    let ctx = &ws.ctx;
    let m = ws.find_motive("surface").map_err(|e| e.to_string())?;
    ensure(m.d == 2 && m.hyperplane.is_some(), || "surface data lacks d = 2 or a hyperplane".into())?;
    let s = lefschetz_split(ctx, m).map_err(|e| e.to_string())?;
    ensure(s.check(ctx).ok(), || format!("{:?}", s.check(ctx)))?;
    let prim = primitive_decompose(ctx, m, &s).map_err(|e| e.to_string())?;
    let doc = raw("surface");
    let gen = doc["category"]["generators"].as_array().unwrap().iter().find(|g| g["name"] == m.x.as_str()).unwrap();
    let h: BTreeMap<i64, usize> =
        gen["dims"].as_array().unwrap().iter().map(|r| (r[0].as_i64().unwrap(), r[1].as_u64().unwrap() as usize)).collect();
    for i in 0..=4i64 {
        let pieces: Vec<_> = prim.pieces.iter().filter(|p| p.i == i).collect();
        ensure(pieces.iter().all(|p| p.k + 2 * p.j == i && p.injective), || format!("bad piece in degree {i}"))?;
        let sum: usize = pieces.iter().map(|p| p.dim).sum();
        let hi = h.get(&i).copied().unwrap_or(0);
        ensure(sum == hi, || format!("Σ_j dim L^j P^({i}-2j) = {sum}, dim H^{i} = {hi}"))?;
    }
    let b = derive_b_operators(ctx, m, &s, &prim).map_err(|e| e.to_string())?;
    if let Some(r) = b.relations.iter().find(|r| !r.holds) {
        return Err(format!("relation {} fails", r.name));
    }
    let certs = b.certificates();
    ensure(certs.iter().all(|c| replays(c, &ws)), || "a Λ or p_j certificate does not replay".into())?;
    Ok(format!("{} relations, {} certificates replayed", b.relations.len(), certs.len()))
}

/// `e_a ⊗ f_b -> f_b ⊗ e_a` in Kronecker bases.
fn plain_swap(n: usize, m: usize) -> Matrix {
    let mut s = Matrix::zeros(n * m, n * m);
    for a in 0..n {
        for b in 0..m {
            s[(b * n + a, a * m + b)] = Q::one();
        }
    }
    s
}

fn sign_twist_criterion() -> Outcome {
    let ws = workspace("genus-1");
    let ctx = &ws.ctx;
    let p = ws.doc.purity.as_ref().ok_or("genus-1 has no purity window")?;
    let r = sign_twist(ctx, &p.window, &p.weights).map_err(|e| e.to_string())?;
    ensure(r.involutive && r.hexagon, || format!("involution {} hexagon {}", r.involutive, r.hexagon))?;
    ensure(r.triples > 0, || "no triples checked".into())?;
    let mut blocks = 0;
    for x in &p.window {
        for y in &p.window {
            let (ox, oy) = (ctx.obj(x).unwrap(), ctx.obj(y).unwrap());
            if ctx.cat().tensor_obj(ox, oy).is_err() || ctx.cat().tensor_obj(oy, ox).is_err() {
                continue;
            }
            let (nx, ny) = (ctx.h().obj(ox).total_dim(), ctx.h().obj(oy).total_dim());
            let s = twisted_symmetry(ctx, ox, oy).map_err(|e| e.to_string())?;
            ensure(s == plain_swap(nx, ny), || format!("twisted σ on {x} ⊗ {y} is not the plain swap"))?;
            blocks += 1;
        }
    }
    // the untwisted symmetry really does carry signs on X ⊗ X
    let x = ctx.obj("X").unwrap();
    let xx = ctx.cat().tensor_obj(x, x).unwrap();
    let koszul = ctx.h().mor(xx, xx, &ctx.cat().symmetry(x, x).unwrap()).to_total();
    ensure(koszul.entries().iter().any(|e| *e == -Q::one()), || {
        "Koszul symmetry on X ⊗ X has no signs".into()
    })?;
    Ok(format!("{blocks} pairs plain, {} triples hexagon", r.triples))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_tannaka");
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(bin).args(["check", name, "--format", "machine"]).output().map_err(|e| e.to_string())?;
        ensure(!out.stdout.is_empty() && out.status.code().is_some_and(|c| c < 2), || {
            format!("{name}: {}", String::from_utf8_lossy(&out.stderr))
        })?;
        Ok(out.stdout)
    };
    let mut bytes = 0;
    for name in ALL {
        let (a, b) = (run(name)?, run(name)?);
        ensure(a == b, || format!("{name}: machine reports differ"))?;
        bytes += a.len();
    }
    Ok(format!("{} datasets, {bytes} bytes identical", ALL.len()))
}

fn probe() -> Outcome {
    let ws = workspace("rep-z-unipotent");
    let ctx = &ws.ctx;
    let (mut met, mut unmet, mut certified) = (0, 0, 0);
    let objs = ws.window_objects();
    for (la, _) in &objs {
        for (lb, _) in &objs {
            let (a, b) = (ws.complex(la).unwrap(), ws.complex(lb).unwrap());
            let hb = hom_bounds(&ws, &a, &b, 2).map_err(|e| format!("Hom({la}, {lb}): {e}"))?;
            ensure(hb.certified.iter().all(|m| replays(m, &ws)), || format!("Hom({la}, {lb}): certificate fails"))?;
            ensure(hb.certified_dim() <= hb.upper_dim, || format!("Hom({la}, {lb}): bounds cross"))?;
            certified += hb.certified_dim();
            if hb.met() {
                met += 1
            } else {
                unmet += 1
            }
        }
    }
    let m = ws.find_motive("unipotent").map_err(|e| e.to_string())?;
    let split = match semisimple_split(ctx, m) {
        Ok(s) => {
            ensure(s.check(ctx).ok(), || "semisimple_split returned invalid projectors".into())?;
            "split".to_string()
        }
        Err(e @ MotiveError::SectionFailed { .. }) => e.to_string(),
        Err(e) => return Err(format!("unlocated failure: {e}")),
    };
    Ok(format!("{met} met, {unmet} unmet, {certified} certified morphisms replayed; semisimple_split: {split}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("Künneth suite", kunneth),
        ("Σ_H exactness", || suite_everywhere("sigma-exactness", &ALL)),
        ("faithful exact fiber", || suite_everywhere("faithful-exact", &ALL)),
        ("semisimple equivalence", semisimple_equivalence),
        ("Serre-kill", || suite_everywhere("serre-kill", &ALL)),
        ("curve splitting", curve_splitting),
        ("surface Lefschetz pipeline", surface_pipeline),
        ("sign twist", sign_twist_criterion),
        ("duality", || suite_everywhere("duality", &ALL)),
        ("determinism", determinism),
        ("non-semisimple probe", probe),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match r {
            Ok(d) => println!("criterion {:>2} PASS {name}: {d} ({ms} ms)", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {d} ({ms} ms)", i + 1)
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
