//! Finite axiom checks for a presentation over a window of base objects.

use serde::Serialize;

use super::{CatError, Category, ObjId};
use crate::linalg::Q;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn check(&mut self, ok: bool, axiom: &str, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(Violation { axiom: axiom.into(), detail: detail() });
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
    }
}

/// Upper bound on basis-triple checks per axiom, to keep large windows cheap.
const BUDGET: usize = 4000;

fn basis(cat: &dyn Category, x: ObjId, y: ObjId) -> Vec<Vec<Q>> {
    cat.hom_basis(x, y).columns()
}

/// Checks every presentation invariant on `window` (all objects of a table
/// presentation; short words of a concrete one). Tensor products falling
/// outside the presented range are skipped.
pub fn validate_presentation(cat: &dyn Category, window: &[ObjId]) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let l = |x: ObjId| cat.label(x);
    let unit = cat.unit();

    for &x in window {
        for &y in window {
            for (a, f) in basis(cat, x, y).iter().enumerate() {
                let left = cat.compose(x, y, y, &cat.identity(y), f);
                let right = cat.compose(x, x, y, f, &cat.identity(x));
                rep.check(&left == f && &right == f, "unitality", || format!("{} -> {} basis {a}", l(x), l(y)));
            }
        }
    }

    let mut spent = 0;
    'assoc: for &x in window {
        for &y in window {
            let fs = basis(cat, x, y);
            if fs.is_empty() {
                continue;
            }
            for &z in window {
                let gs = basis(cat, y, z);
                if gs.is_empty() {
                    continue;
                }
                for &w in window {
                    let hs = basis(cat, z, w);
                    for (a, f) in fs.iter().enumerate() {
                        for (b, g) in gs.iter().enumerate() {
                            let gf = cat.compose(x, y, z, g, f);
                            rep.check(cat.hom_coeffs(x, z, &gf).is_some(), "closure", || {
                                format!("{} -> {} -> {} basis ({b},{a})", l(x), l(y), l(z))
                            });
                            for (c, h) in hs.iter().enumerate() {
                                let lhs = cat.compose(x, z, w, h, &gf);
                                let rhs = cat.compose(x, y, w, &cat.compose(y, z, w, h, g), f);
                                rep.check(lhs == rhs, "associativity", || {
                                    format!("{} -> {} -> {} -> {} basis ({c},{b},{a})", l(x), l(y), l(z), l(w))
                                });
                                spent += 1;
                                if spent > BUDGET {
                                    break 'assoc;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    for &x in window {
        rep.check(
            cat.tensor_obj(unit, x).ok() == Some(x) && cat.tensor_obj(x, unit).ok() == Some(x),
            "tensor unit",
            || format!("object {}", l(x)),
        );
        for &y in window {
            for (a, f) in basis(cat, x, y).iter().enumerate() {
                let lf = cat.tensor_mor(unit, unit, x, y, &cat.identity(unit), f);
                let rf = cat.tensor_mor(x, y, unit, unit, f, &cat.identity(unit));
                rep.check(lf.as_ref() == Ok(f) && rf.as_ref() == Ok(f), "tensor unit", || {
                    format!("{} -> {} basis {a}", l(x), l(y))
                });
            }
        }
    }

    for &x in window {
        for &y in window {
            for &z in window {
                let lhs = cat.tensor_obj(x, y).and_then(|xy| cat.tensor_obj(xy, z));
                let rhs = cat.tensor_obj(y, z).and_then(|yz| cat.tensor_obj(x, yz));
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) => rep.check(a == b, "tensor associativity", || {
                        format!("({} ⊗ {}) ⊗ {}", l(x), l(y), l(z))
                    }),
                    (Err(CatError::TensorOutOfRange(_)), _) | (_, Err(CatError::TensorOutOfRange(_))) => {}
                    (a, b) => rep.check(false, "tensor associativity", || format!("{a:?} vs {b:?}")),
                }
            }
        }
    }

    functoriality(cat, window, &mut rep);
    symmetry(cat, window, &mut rep);
    duality(cat, window, &mut rep);
    rep
}

fn functoriality(cat: &dyn Category, window: &[ObjId], rep: &mut ValidationReport) {
    let l = |x: ObjId| cat.label(x);
    for &x in window {
        for &y in window {
            if let Ok(xy) = cat.tensor_obj(x, y) {
                let t = cat.tensor_mor(x, x, y, y, &cat.identity(x), &cat.identity(y));
                rep.check(t.ok() == Some(cat.identity(xy)), "tensor functoriality", || {
                    format!("id_{} ⊗ id_{}", l(x), l(y))
                });
            }
        }
    }
    let mut spent = 0;
    for &x in window {
        for &x2 in window {
            for &x3 in window {
                for &y in window {
                    let (fs, gs) = (basis(cat, x, x2), basis(cat, x2, x3));
                    if fs.is_empty() || gs.is_empty() {
                        continue;
                    }
                    let (fs2, gs2) = (basis(cat, y, y), basis(cat, y, y));
                    for f in &fs {
                        for g in &gs {
                            for (f2, g2) in fs2.iter().zip(&gs2) {
                                let lhs = (|| -> Result<Vec<Q>, CatError> {
                                    let a = cat.tensor_mor(x, x2, y, y, f, f2)?;
                                    let b = cat.tensor_mor(x2, x3, y, y, g, g2)?;
                                    let (s, m, t) =
                                        (cat.tensor_obj(x, y)?, cat.tensor_obj(x2, y)?, cat.tensor_obj(x3, y)?);
                                    Ok(cat.compose(s, m, t, &b, &a))
                                })();
                                let rhs = cat.tensor_mor(
                                    x,
                                    x3,
                                    y,
                                    y,
                                    &cat.compose(x, x2, x3, g, f),
                                    &cat.compose(y, y, y, g2, f2),
                                );
                                if let (Ok(a), Ok(b)) = (lhs, rhs) {
                                    rep.check(a == b, "tensor functoriality", || {
                                        format!("{} -> {} -> {} with {}", l(x), l(x2), l(x3), l(y))
                                    });
                                }
                                spent += 1;
                                if spent > BUDGET {
                                    return;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

fn symmetry(cat: &dyn Category, window: &[ObjId], rep: &mut ValidationReport) {
    let l = |x: ObjId| cat.label(x);
    for &x in window {
        for &y in window {
            let (Ok(xy), Ok(yx)) = (cat.tensor_obj(x, y), cat.tensor_obj(y, x)) else {
                continue;
            };
            let (Ok(s), Ok(t)) = (cat.symmetry(x, y), cat.symmetry(y, x)) else {
                rep.check(false, "symmetry", || format!("missing σ for {} ⊗ {}", l(x), l(y)));
                continue;
            };
            rep.check(cat.compose(xy, yx, xy, &t, &s) == cat.identity(xy), "symmetry involution", || {
                format!("σ_{{{},{}}}", l(x), l(y))
            });
            for &x2 in window {
                for &y2 in window {
                    let (Ok(x2y2), Ok(y2x2)) = (cat.tensor_obj(x2, y2), cat.tensor_obj(y2, x2)) else {
                        continue;
                    };
                    let Ok(s2) = cat.symmetry(x2, y2) else { continue };
                    for f in basis(cat, x, x2) {
                        for g in basis(cat, y, y2) {
                            let (Ok(fg), Ok(gf)) =
                                (cat.tensor_mor(x, x2, y, y2, &f, &g), cat.tensor_mor(y, y2, x, x2, &g, &f))
                            else {
                                continue;
                            };
                            let lhs = cat.compose(xy, x2y2, y2x2, &s2, &fg);
                            let rhs = cat.compose(xy, yx, y2x2, &gf, &s);
                            rep.check(lhs == rhs, "symmetry naturality", || {
                                format!("{} ⊗ {} -> {} ⊗ {}", l(x), l(y), l(x2), l(y2))
                            });
                        }
                    }
                }
            }
            for &z in window {
                let hex = (|| -> Result<bool, CatError> {
                    let yz = cat.tensor_obj(y, z)?;
                    let src = cat.tensor_obj(x, yz)?;
                    let tgt = cat.tensor_obj(yz, x)?;
                    let mid = cat.tensor_obj(yx, z)?;
                    let lhs = cat.symmetry(x, yz)?;
                    let a = cat.tensor_mor(xy, yx, z, z, &cat.symmetry(x, y)?, &cat.identity(z))?;
                    let zx = cat.tensor_obj(z, x)?;
                    let b = cat.tensor_mor(y, y, cat.tensor_obj(x, z)?, zx, &cat.identity(y), &cat.symmetry(x, z)?)?;
                    Ok(lhs == cat.compose(src, mid, tgt, &b, &a))
                })();
                match hex {
                    Ok(ok) => rep.check(ok, "hexagon", || format!("{}, {}, {}", l(x), l(y), l(z))),
                    Err(CatError::TensorOutOfRange(_)) => {}
                    Err(e) => rep.check(false, "hexagon", || e.to_string()),
                }
            }
        }
    }
}

fn duality(cat: &dyn Category, window: &[ObjId], rep: &mut ValidationReport) {
    let l = |x: ObjId| cat.label(x);
    let unit = cat.unit();
    for &x in window {
        let zig = (|| -> Result<(bool, bool), CatError> {
            let xd = cat.dual_obj(x)?;
            let (ev, coev) = (cat.ev(x)?, cat.coev(x)?);
            let xxd = cat.tensor_obj(x, xd)?;
            let xdx = cat.tensor_obj(xd, x)?;
            let mid = cat.tensor_obj(xxd, x)?;
            let a = cat.tensor_mor(unit, xxd, x, x, &coev, &cat.identity(x))?;
            let b = cat.tensor_mor(x, x, xdx, unit, &cat.identity(x), &ev)?;
            let first = cat.compose(x, mid, x, &b, &a) == cat.identity(x);
            let mid2 = cat.tensor_obj(xd, xxd)?;
            let c = cat.tensor_mor(xd, xd, unit, xxd, &cat.identity(xd), &coev)?;
            let d = cat.tensor_mor(xdx, unit, xd, xd, &ev, &cat.identity(xd))?;
            let second = cat.compose(xd, mid2, xd, &d, &c) == cat.identity(xd);
            Ok((first, second))
        })();
        match zig {
            Ok((a, b)) => {
                rep.check(a, "zig-zag", || format!("(id ⊗ ev)(coev ⊗ id) on {}", l(x)));
                rep.check(b, "zig-zag", || format!("(ev ⊗ id)(id ⊗ coev) on {}", l(x)));
            }
            Err(CatError::TensorOutOfRange(_)) => {}
            Err(e) => rep.check(false, "zig-zag", || e.to_string()),
        }
    }
}
