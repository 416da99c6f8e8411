use super::*;
use crate::datasets::{context, curve_weights, motive};
use crate::fp::fiber_map;

fn load(name: &str) -> (Ctx, MotivePresentation) {
    let ctx = context(name).unwrap();
    let m = motive(name, &ctx).unwrap();
    m.validate(&ctx).unwrap();
    (ctx, m)
}

#[test]
fn curve_splits_both_ways() {
    let (ctx, x) = load("genus-1");
    assert_eq!(check_hard_lefschetz(&ctx, &x).unwrap(), vec![true]);
    let a = lefschetz_split(&ctx, &x).unwrap();
    assert!(a.check(&ctx).ok(), "{:?}", a.check(&ctx));
    let b = semisimple_split(&ctx, &x).unwrap();
    assert!(b.check(&ctx).ok(), "{:?}", b.check(&ctx));
    for (p, q) in a.projectors.iter().zip(&b.projectors) {
        assert_eq!(p.matrix, q.matrix);
    }
}

#[test]
fn zero_ell_breaks_hard_lefschetz() {
    let (ctx, mut x) = load("genus-1");
    let ell = x.ell.take().unwrap();
    x.ell = Some(crate::complex::ChainMap::zero(&ell.src, &ell.tgt));
    assert_eq!(check_hard_lefschetz(&ctx, &x).unwrap(), vec![false]);
}

#[test]
fn point_is_trivial() {
    let (ctx, x) = load("point");
    assert!(check_hard_lefschetz(&ctx, &x).unwrap().is_empty());
    for s in [lefschetz_split(&ctx, &x).unwrap(), semisimple_split(&ctx, &x).unwrap()] {
        assert_eq!(s.projectors.len(), 1);
        assert!(s.projectors[0].matrix.is_identity());
        let p = primitive_decompose(&ctx, &x, &s).unwrap();
        assert!(p.ok());
        assert_eq!(p.primitive_dims, vec![1]);
        let b = derive_b_operators(&ctx, &x, &s, &p).unwrap();
        assert!(b.ok());
        assert!(b.lambda.matrix.is_zero());
    }
}

#[test]
fn curve_primitives_and_operators() {
    let (ctx, x) = load("genus-1");
    let s = lefschetz_split(&ctx, &x).unwrap();
    let p = primitive_decompose(&ctx, &x, &s).unwrap();
    assert!(p.ok(), "{:?}", p.counts);
    // ℓ² lands in degree 4, so everything of degree 1 is primitive
    assert_eq!(p.primitive_dims, vec![1, 2]);
    let b = derive_b_operators(&ctx, &x, &s, &p).unwrap();
    assert!(b.ok(), "{:?}", b.relations);
    let ell = mm(&ctx, &x.ell_at(&ctx, -1).unwrap());
    let le = b.lambda.compose(&ell).unwrap();
    let h0 = Bidegree(0, 2);
    assert!(le.matrix.block(h0).is_identity());
}

#[test]
fn unipotent_probe_fails_at_stage_zero() {
    let (ctx, x) = load("rep-z-unipotent");
    assert_eq!(check_hard_lefschetz(&ctx, &x).unwrap(), vec![true]);
    assert!(matches!(semisimple_split(&ctx, &x), Err(MotiveError::SectionFailed { stage: 0 })));
    assert!(matches!(lefschetz_split(&ctx, &x), Err(MotiveError::Missing { .. })));
}

#[test]
fn surface_pipeline() {
    let (ctx, x) = load("surface");
    assert_eq!(check_weak_lefschetz(&ctx, &x).unwrap(), vec![true, true]);
    assert_eq!(check_hard_lefschetz(&ctx, &x).unwrap(), vec![true, true]);
    let s = lefschetz_split(&ctx, &x).unwrap();
    assert!(s.check(&ctx).ok(), "{:?}", s.check(&ctx));
    let p = primitive_decompose(&ctx, &x, &s).unwrap();
    assert!(p.ok(), "{:?}", p.counts);
    assert_eq!(p.primitive_dims, vec![1, 2, 3]);
    let b = derive_b_operators(&ctx, &x, &s, &p).unwrap();
    assert!(b.ok(), "{:?}", b.relations);
}

#[test]
fn broken_hyperplane_is_reported() {
    let (ctx, mut x) = load("surface");
    let h = x.hyperplane.as_mut().unwrap();
    h.q = crate::complex::ChainMap::zero(&h.q.src, &h.q.tgt);
    assert_eq!(check_weak_lefschetz(&ctx, &x).unwrap(), vec![false, false]);
    assert!(matches!(lefschetz_split(&ctx, &x), Err(MotiveError::Precondition { level: 2, degree: 0, .. })));
    let (ctx, mut x) = load("surface");
    x.nu[1] = None;
    let e = lefschetz_split(&ctx, &x).unwrap_err();
    assert!(e.to_string().contains("ν_1"), "{e}");
}

#[test]
fn sign_twist_gives_plain_swaps() {
    let ctx = context("genus-1").unwrap();
    let window: Vec<String> = ["X", "Xd", "L", "Li"].map(String::from).to_vec();
    let r = sign_twist(&ctx, &window, &curve_weights()).unwrap();
    assert!(r.ok(), "{r:?}");
    assert_eq!(r.pairs, 16);
    assert!(r.triples > 0);
    let b = r.blocks.iter().find(|b| b.x == "X" && b.y == "X" && b.wx == 1 && b.wy == 1).unwrap();
    assert_eq!(b.sign, -1);
    let mut w = curve_weights();
    w.remove("L");
    assert!(matches!(sign_twist(&ctx, &window, &w), Err(MotiveError::Missing { .. })));
}

#[test]
fn curve_purity() {
    let (ctx, x) = load("genus-1");
    let s = lefschetz_split(&ctx, &x).unwrap();
    let r = purity_decompose(&ctx, &[("X".into(), &s), ("X'".into(), &s)], 2).unwrap();
    assert_eq!(r.classes.iter().map(|c| c.weight).collect::<Vec<_>>(), vec![0, 1, 2]);
    let h11 = r.homs.iter().find(|h| h.a == ("X".into(), 1) && h.b == ("X'".into(), 1)).unwrap();
    assert!(h11.certified > 0);
    assert!(r.homs.iter().filter(|h| h.a.1 != h.b.1).all(|h| !h.nonzero));
    let _ = fiber_map;
}
