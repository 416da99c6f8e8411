use super::*;
use crate::complex::cone;
use crate::datasets::context;
use crate::graded::convolve;
use crate::linalg::q;

fn unit_obj(ctx: &Ctx) -> Obj {
    bracket(&Complex::unit(ctx.cat()))
}

fn id_presentation(ctx: &Ctx) -> Obj {
    let u = Complex::unit(ctx.cat());
    FpPresheaf::new(ctx.cat(), u.identity(ctx.cat())).unwrap()
}

fn fold(ctx: &Ctx) -> FpMorphism {
    let cat = ctx.cat();
    let u = Complex::unit(cat);
    let s = u.direct_sum(cat, &u);
    let f = u.identity(cat).hcat(cat, &u.identity(cat)).unwrap();
    assert_eq!(f.src, s);
    FpMorphism::bracket(&f)
}

fn degree_projector(ctx: &Ctx, label: &str, keep: impl Fn(i64) -> bool) -> ChainMap {
    let conc = ctx.concrete.as_ref().unwrap();
    let x = ctx.obj(label).unwrap();
    let sp = conc.space(x);
    let n = sp.total_dim();
    let mut m = Matrix::zeros(n, n);
    for (d, k) in sp.iter() {
        if keep(d) {
            for i in 0..k {
                let j = sp.offset(d) + i;
                m[(j, j)] = q(1);
            }
        }
    }
    ctx.carrier_map(label, label, &m).unwrap()
}

#[test]
fn unit_fiber_and_serre_null() {
    let ctx = context("point").unwrap();
    let one = unit_obj(&ctx);
    assert_eq!(fiber(&ctx, &one).dims(), GradedSpace::new([(Bidegree(0, 0), 1)]));
    assert!(!is_serre_null(&ctx, &one));
    assert!(is_serre_null(&ctx, &id_presentation(&ctx)));
    let k = cone(ctx.cat(), &Complex::unit(ctx.cat()).identity(ctx.cat())).unwrap();
    assert!(is_serre_null(&ctx, &bracket(&k.cone)));
}

#[test]
fn curve_bracket_fiber_is_the_carrier() {
    let ctx = context("genus-1").unwrap();
    let x = ctx.complex("X").unwrap();
    let dims = fiber(&ctx, &bracket(&x)).dims();
    // generator data: dimensions 1, 2, 1 in degrees 0, 1, 2
    let expected = GradedSpace::new([(Bidegree(0, 0), 1), (Bidegree(0, 1), 2), (Bidegree(0, 2), 1)]);
    assert_eq!(dims, expected);
    assert!(bracket_fiber_matches(&ctx, &x));
}

#[test]
fn fp_hom_examples() {
    let ctx = context("point").unwrap();
    let one = unit_obj(&ctx);
    assert_eq!(fp_hom(&ctx, &one, &one).dim(), 1);
    let null = id_presentation(&ctx);
    for phi in fp_hom(&ctx, &one, &null).basis(&ctx) {
        assert!(fiber_map(&ctx, &phi).is_zero());
    }

    let ctx = context("rep-z2").unwrap();
    let labels = ["triv", "sign"];
    for a in labels {
        for b in labels {
            let (x, y) = (bracket(&ctx.complex(a).unwrap()), bracket(&ctx.complex(b).unwrap()));
            assert_eq!(fp_hom(&ctx, &x, &y).dim(), usize::from(a == b), "{a} -> {b}");
        }
    }
}

#[test]
fn kernels_and_cokernels_are_exact() {
    let ctx = context("point").unwrap();
    let phi = fold(&ctx);
    let fm = fiber_map(&ctx, &phi);
    let k = fp_kernel(&ctx, &phi).unwrap();
    assert_eq!(fiber(&ctx, &k.obj).dims(), GradedSpace::new([(Bidegree(0, 0), 1)]));
    assert_eq!(fiber(&ctx, &k.obj).dims(), fm.kernel_dims());
    let incl = fiber_map(&ctx, &k.incl);
    assert!(incl.is_injective());
    assert!(fm.compose(&incl).unwrap().is_zero());
    let c = fp_cokernel(&ctx, &phi).unwrap();
    assert!(is_serre_null(&ctx, &c.obj));

    let one = unit_obj(&ctx);
    let id = FpMorphism::identity(ctx.cat(), &one);
    assert!(is_serre_null(&ctx, &fp_cokernel(&ctx, &id).unwrap().obj));
    let zero = FpMorphism::zero(&one, &one);
    let c0 = fp_cokernel(&ctx, &zero).unwrap();
    assert!(m_iso_test(&ctx, &c0.proj));
    assert!(is_serre_null(&ctx, &fp_kernel(&ctx, &id).unwrap().obj));
    assert!(m_iso_test(&ctx, &fp_kernel(&ctx, &zero).unwrap().incl));
}

#[test]
fn image_factorization() {
    let ctx = context("genus-1").unwrap();
    let p = FpMorphism::bracket(&degree_projector(&ctx, "X", |d| d == 1));
    let im = fp_image(&ctx, &p).unwrap();
    assert_eq!(fiber(&ctx, &im.obj).dims(), GradedSpace::new([(Bidegree(0, 1), 2)]));
    assert!(fiber_map(&ctx, &im.epi).is_surjective());
    assert!(fiber_map(&ctx, &im.mono).is_injective());
    let back = im.mono.compose(ctx.cat(), &im.epi).unwrap();
    assert!(back.fp_eq(&ctx, &p));
    // a proper subobject is not an isomorphism
    assert!(!m_iso_test(&ctx, &im.mono));
}

#[test]
fn tensor_is_kunneth() {
    let ctx = context("genus-1").unwrap();
    let x = bracket(&ctx.complex("X").unwrap());
    let t = tensor_fp(&ctx, &x, &x).unwrap();
    let dx = fiber(&ctx, &x).dims();
    assert_eq!(fiber(&ctx, &t).dims(), convolve(&dx, &dx));
    let dims: Vec<usize> = (0..=4).map(|k| fiber(&ctx, &t).dims().dim(Bidegree(0, k))).collect();
    assert_eq!(dims, vec![1, 4, 6, 4, 1]);

    let p = FpMorphism::bracket(&degree_projector(&ctx, "X", |d| d == 1));
    let c = fp_cokernel(&ctx, &p).unwrap().obj;
    let tc = tensor_fp(&ctx, &c, &c).unwrap();
    let dc = fiber(&ctx, &c).dims();
    assert_eq!(fiber(&ctx, &tc).dims(), convolve(&dc, &dc));
    let txc = tensor_fp(&ctx, &x, &c).unwrap();
    assert_eq!(fiber(&ctx, &txc).dims(), convolve(&dx, &dc));

    let one = unit_obj(&ctx);
    let t1 = tensor_fp(&ctx, &one, &c).unwrap();
    let phi = FpMorphism::new(&ctx, &t1, &c, c.x0().identity(ctx.cat())).unwrap();
    assert!(m_iso_test(&ctx, &phi));
}

#[test]
fn duals_and_zig_zags() {
    let ctx = context("point").unwrap();
    let one = unit_obj(&ctx);
    assert_eq!(dual_fp(&ctx, &one).unwrap(), one);

    let ctx = context("genus-1").unwrap();
    for label in ["X", "L", "Xd"] {
        let x = bracket(&ctx.complex(label).unwrap());
        let z = zig_zags(&ctx, &x).unwrap();
        assert!(m_iso_test(&ctx, &z.left), "{label}");
        assert!(m_iso_test(&ctx, &z.right), "{label}");
        assert!(fiber_map(&ctx, &z.left).is_identity(), "{label}");
    }
    let x = ctx.complex("X").unwrap();
    let two = x.direct_sum(ctx.cat(), &x.shift(1));
    let z = zig_zags(&ctx, &bracket(&two)).unwrap();
    assert!(m_iso_test(&ctx, &z.left) && m_iso_test(&ctx, &z.right));

    let p = FpMorphism::bracket(&degree_projector(&ctx, "X", |d| d == 1));
    let c = fp_cokernel(&ctx, &p).unwrap().obj;
    let cd = dual_fp(&ctx, &c).unwrap();
    assert_eq!(fiber(&ctx, &cd).dims(), fiber(&ctx, &c).dims().dual());
}

#[test]
fn dual_transform_replays() {
    let ctx = context("genus-1").unwrap();
    let x = bracket(&ctx.complex("X").unwrap());
    let p = FpMorphism::bracket(&degree_projector(&ctx, "X", |d| d == 0));
    let s = split_idempotent(&ctx, &x, &p).unwrap();
    let sd = s.section.dual(&ctx).unwrap();
    sd.verify(&ctx).unwrap();
    let rd = s.retraction.dual(&ctx).unwrap();
    rd.verify(&ctx).unwrap();
    let comp = sd.compose(&rd).unwrap();
    assert!(comp.matrix.is_identity());
    let w = s.section.whisker(&ctx, &ctx.complex("Li").unwrap()).unwrap();
    w.verify(&ctx).unwrap();
}

#[test]
fn idempotents_split() {
    let ctx = context("genus-1").unwrap();
    let x = bracket(&ctx.complex("X").unwrap());
    let id = FpMorphism::identity(ctx.cat(), &x);
    let s = split_idempotent(&ctx, &x, &id).unwrap();
    assert!(s.retraction.matrix.is_iso());
    let z = FpMorphism::zero(&x, &x);
    assert!(is_serre_null(&ctx, &split_idempotent(&ctx, &x, &z).unwrap().image));

    let p = FpMorphism::bracket(&degree_projector(&ctx, "X", |d| d == 0));
    let s = split_idempotent(&ctx, &x, &p).unwrap();
    assert_eq!(fiber(&ctx, &s.image).dims(), GradedSpace::new([(Bidegree(0, 0), 1)]));
    let rs = s.retraction.compose(&s.section).unwrap();
    assert!(rs.matrix.is_identity());
    let sr = s.section.compose(&s.retraction).unwrap();
    assert_eq!(sr.matrix, fiber_map(&ctx, &p));
    rs.verify(&ctx).unwrap();
    sr.verify(&ctx).unwrap();

    let half = FpMorphism::bracket(&degree_projector(&ctx, "X", |d| d == 0)).scale(&q(2));
    assert_eq!(split_idempotent(&ctx, &x, &half).unwrap_err(), FpError::NotIdempotent);
}

#[test]
fn roofs() {
    let ctx = context("genus-1").unwrap();
    let cat = ctx.cat();
    let x = ctx.complex("X").unwrap();
    let p = degree_projector(&ctx, "X", |d| d == 2);
    let r = RoofMorphism::new(&ctx, p.clone(), x.identity(cat)).unwrap();
    let m = roof_to_morphism(&ctx, &r).unwrap();
    assert_eq!(m.matrix, fiber_map(&ctx, &FpMorphism::bracket(&p)));
    let k = cone(cat, &x.identity(cat)).unwrap();
    let w = x.identity(cat).direct_sum(cat, &ChainMap::zero(&k.cone, &Complex::zero()));
    let w = w.compose(cat, &crate::complex::injection(cat, &x, &k.cone, 0)).unwrap();
    let r = RoofMorphism::new(&ctx, w.clone(), w).unwrap();
    assert!(roof_to_morphism(&ctx, &r).unwrap().matrix.is_identity());
    assert_eq!(RoofMorphism::new(&ctx, p.clone(), p).unwrap_err(), FpError::NotHIso);

    let a = RoofMorphism::plain(&ctx, degree_projector(&ctx, "X", |d| d >= 1));
    let b = RoofMorphism::plain(&ctx, degree_projector(&ctx, "X", |d| d <= 1));
    let ab = compose_roofs(&ctx, &b, &a).unwrap();
    let expected = roof_matrix(&ctx, &b).unwrap().compose(&roof_matrix(&ctx, &a).unwrap()).unwrap();
    assert_eq!(roof_matrix(&ctx, &ab).unwrap(), expected);
}

#[test]
fn hom_bounds() {
    let ctx = context("point").unwrap();
    let one = unit_obj(&ctx);
    let b = m_hom_bounds(&ctx, &one, &one, &CoverSet::default(), 2, None).unwrap();
    assert!(b.certified_dim() >= 1);
    assert_eq!(b.ambient_dim, 1);
    assert!(b.met());
    let null = id_presentation(&ctx);
    let b = m_hom_bounds(&ctx, &one, &null, &CoverSet::default(), 2, None).unwrap();
    assert_eq!((b.certified_dim(), b.upper_dim), (0, 0));

    let ctx = context("rep-z2").unwrap();
    let objs = [ctx.obj("triv").unwrap(), ctx.obj("sign").unwrap()];
    let cert = semisimplicity_certificate(&ctx, &objs);
    assert!(cert.holds());
    let (t, s) = (bracket(&ctx.complex("triv").unwrap()), bracket(&ctx.complex("sign").unwrap()));
    let b = m_hom_bounds(&ctx, &t, &s, &CoverSet::default(), 2, Some(&cert)).unwrap();
    assert_eq!((b.certified_dim(), b.ambient_dim, b.upper_dim), (0, 1, 0));
    assert!(b.met());
}

#[test]
fn nilpotent_endomorphisms_break_semisimplicity() {
    let ctx = context("rep-z-unipotent").unwrap();
    let cert = semisimplicity_certificate(&ctx, &[ctx.obj("V").unwrap()]);
    assert_eq!(cert.end_dim, 2);
    assert!(!cert.holds());
}

#[test]
fn second_fiber_agrees_with_itself() {
    let ctx = context("genus-1").unwrap();
    let x = ctx.complex("X").unwrap();
    let f = bracket(&x);
    let s = second_fiber(&ctx, ctx.h(), std::slice::from_ref(&x), &f).unwrap();
    assert_eq!(s, *fiber(&ctx, &f));
}
