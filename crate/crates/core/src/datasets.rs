//! Bundled example presentations.

use crate::category::table::{ComposeEntry, DualEntry, HomEntry, ObjVec, PairVec, TensorMorEntry, TensorObjEntry};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::category::{Cat, ConcreteData, ConcretePresentation, GeneratorData, TableData, TablePresentation};
use crate::complex::ChainMap;
use crate::fp::{Ctx, RoofMorphism};
use crate::graded::GradedMap;
use crate::linalg::Matrix;
use crate::motive::{Hyperplane, MotivePresentation};
use crate::functor::{
    build_functor, CarrierFunctorData, FunctorData, MorMatrix, MuMatrix, ObjSpace, TableFunctorData,
};

fn s(v: i64) -> String {
    v.to_string()
}

fn one() -> Vec<String> {
    vec![s(1)]
}

fn m(rows: &[&[i64]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|&v| s(v)).collect()).collect()
}

/// Table category whose objects are all one-dimensional with `End = Q`,
/// tensor given by `mult`, and every structure map equal to `1`.
fn rank_one_table(name: &str, objects: &[&str], mult: impl Fn(usize, usize) -> usize) -> TableData {
    let o = |i: usize| objects[i].to_string();
    let n = objects.len();
    let mut t = TableData {
        name: name.into(),
        objects: objects.iter().map(|x| x.to_string()).collect(),
        unit: o(0),
        homs: (0..n).map(|i| HomEntry { src: o(i), tgt: o(i), basis: vec![format!("id_{}", o(i))] }).collect(),
        identity: (0..n).map(|i| ObjVec { object: o(i), value: one() }).collect(),
        compose: (0..n)
            .map(|i| ComposeEntry { src: o(i), mid: o(i), tgt: o(i), g: 0, f: 0, value: one() })
            .collect(),
        tensor_obj: vec![],
        tensor_mor: vec![],
        symmetry: vec![],
        duals: vec![],
    };
    for i in 0..n {
        for j in 0..n {
            t.tensor_obj.push(TensorObjEntry { left: o(i), right: o(j), result: o(mult(i, j)) });
            t.tensor_mor.push(TensorMorEntry {
                f_src: o(i),
                f_tgt: o(i),
                g_src: o(j),
                g_tgt: o(j),
                f: 0,
                g: 0,
                value: one(),
            });
            t.symmetry.push(PairVec { left: o(i), right: o(j), value: one() });
        }
    }
    // every object here is its own inverse
    for i in 0..n {
        t.duals.push(DualEntry { object: o(i), dual: o(i), ev: one(), coev: one() });
    }
    t
}

fn rank_one_functor(t: &TableData) -> FunctorData {
    let mut f = TableFunctorData { objects: vec![], morphisms: vec![], mu: vec![], unit: m(&[&[1]]) };
    for x in &t.objects {
        f.objects.push(ObjSpace { object: x.clone(), dims: vec![(0, 1)] });
        f.morphisms.push(MorMatrix { src: x.clone(), tgt: x.clone(), index: 0, matrix: m(&[&[1]]) });
        for y in &t.objects {
            f.mu.push(MuMatrix { left: x.clone(), right: y.clone(), matrix: m(&[&[1]]) });
        }
    }
    FunctorData::Table(f)
}

/// One object `1` with `End(1) = Q`.
pub fn point_category() -> TableData {
    rank_one_table("point", &["1"], |_, _| 0)
}

pub fn point_functor() -> FunctorData {
    rank_one_functor(&point_category())
}

/// Two simple objects with the XOR tensor rule.
pub fn rep_z2_category() -> TableData {
    rank_one_table("rep-z2", &["triv", "sign"], |i, j| i ^ j)
}

pub fn rep_z2_functor() -> FunctorData {
    rank_one_functor(&rep_z2_category())
}

fn line(name: &str, dual: &str, deg: i64, lie: usize) -> GeneratorData {
    GeneratorData {
        name: name.into(),
        dual_name: dual.into(),
        dims: vec![(deg, 1)],
        group: vec![],
        lie: vec![m(&[&[0]]); lie],
        weights: None,
    }
}

fn full(name: &str, dual: &str, dims: &[(i64, usize)]) -> GeneratorData {
    GeneratorData {
        name: name.into(),
        dual_name: dual.into(),
        dims: dims.to_vec(),
        group: vec![],
        lie: vec![],
        weights: None,
    }
}

/// Words in `L` (degree 2) and its inverse `Li`.
pub fn graded_line_category() -> ConcreteData {
    ConcreteData { name: "graded-line".into(), max_len: 6, generators: vec![line("L", "Li", 2, 0)] }
}

/// A genus-one curve `X` with cohomology of dimensions 1, 2, 1.
pub fn curve_category() -> ConcreteData {
    ConcreteData {
        name: "genus-1".into(),
        max_len: 5,
        generators: vec![full("X", "Xd", &[(0, 1), (1, 2), (2, 1)]), line("L", "Li", 2, 0)],
    }
}

/// A surface `S` with Betti numbers 1, 2, 4, 2, 1 and a genus-two curve `C`.
pub fn surface_category() -> ConcreteData {
    ConcreteData {
        name: "surface".into(),
        max_len: 8,
        generators: vec![
            full("S", "Sd", &[(0, 1), (1, 2), (2, 4), (3, 2), (4, 1)]),
            full("C", "Cd", &[(0, 1), (1, 4), (2, 1)]),
            line("L", "Li", 2, 0),
        ],
    }
}

/// A unipotent operator `N` acting on `V = Q^2` in degree 0, on `U` spanning
/// degrees 0 and 2, and trivially on `L`.
pub fn unipotent_category() -> ConcreteData {
    ConcreteData {
        name: "rep-z-unipotent".into(),
        max_len: 3,
        generators: vec![
            GeneratorData {
                name: "V".into(),
                dual_name: "Vd".into(),
                dims: vec![(0, 2)],
                group: vec![],
                lie: vec![m(&[&[0, 1], &[0, 0]])],
                weights: Some(vec![-1, 1]),
            },
            GeneratorData {
                name: "U".into(),
                dual_name: "Ud".into(),
                dims: vec![(0, 1), (2, 1)],
                group: vec![],
                lie: vec![m(&[&[0, 0], &[1, 0]])],
                weights: Some(vec![1, -1]),
            },
            line("L", "Li", 2, 1),
        ],
    }
}

pub fn carrier_functor() -> FunctorData {
    FunctorData::Carrier(CarrierFunctorData::default())
}

/// The weight-graded fiber functor on the unipotent dataset; it kills `N`.
pub fn weight_graded_functor() -> FunctorData {
    FunctorData::Carrier(CarrierFunctorData { conjugations: vec![], weight_graded: true })
}

/// Names accepted by [`context`].
pub const NAMES: [&str; 6] = ["point", "graded-line", "rep-z2", "genus-1", "surface", "rep-z-unipotent"];

/// Category and fiber functor of a bundled dataset.
pub fn context(name: &str) -> Option<Ctx> {
    let table = |t: TableData, f: FunctorData| {
        let c: Cat = Arc::new(TablePresentation::new(t).expect("bundled table"));
        let h = build_functor(&f, c.clone(), None).expect("bundled functor");
        Ctx::new(c, h)
    };
    let concrete = |d: ConcreteData| {
        let c = Arc::new(ConcretePresentation::new(d).expect("bundled presentation"));
        let h = build_functor(&carrier_functor(), c.clone(), Some(c.clone())).expect("bundled functor");
        Ctx::with_concrete(c, h)
    };
    Some(match name {
        "point" => table(point_category(), point_functor()),
        "rep-z2" => table(rep_z2_category(), rep_z2_functor()),
        "graded-line" => concrete(graded_line_category()),
        "genus-1" => concrete(curve_category()),
        "surface" => concrete(surface_category()),
        "rep-z-unipotent" => concrete(unipotent_category()),
        _ => return None,
    })
}

fn carrier(ctx: &Ctx, x: &str, y: &str, blocks: &[(i64, Matrix)]) -> ChainMap {
    let (a, b) = (ctx.obj(x).expect("word"), ctx.obj(y).expect("word"));
    let (v, w) = (ctx.h().obj(a), ctx.h().obj(b));
    let g = GradedMap::from_blocks(&v, &w, blocks.iter().cloned()).expect("block shapes");
    ctx.carrier_map(x, y, &g.to_total()).expect("bundled map")
}

/// Identity blocks in every degree where both carriers live.
fn matching(ctx: &Ctx, x: &str, y: &str) -> ChainMap {
    let (a, b) = (ctx.obj(x).expect("word"), ctx.obj(y).expect("word"));
    let (v, w) = (ctx.h().obj(a), ctx.h().obj(b));
    let blocks: Vec<(i64, Matrix)> = v.iter().filter(|&(d, _)| w.dim(d) > 0).map(|(d, n)| (d, Matrix::identity(n))).collect();
    carrier(ctx, x, y, &blocks)
}

fn projectors(ctx: &Ctx, x: &str, top: i64) -> Vec<ChainMap> {
    let v = ctx.h().obj(ctx.obj(x).expect("word"));
    (0..=top).map(|i| carrier(ctx, x, x, &[(i, Matrix::identity(v.dim(i)))])).collect()
}

fn word(x: &str, suffix: &str, n: usize) -> String {
    std::iter::once(x).chain(std::iter::repeat_n(suffix, n)).collect::<Vec<_>>().join(".")
}

fn dualities(ctx: &Ctx, x: &str, xd: &str, d: usize) -> Vec<ChainMap> {
    (0..=d).map(|i| matching(ctx, &word(xd, "L", i), &word(x, "Li", d - i))).collect()
}

fn curve_motive(ctx: &Ctx, x: &str, xd: &str, name: &str) -> MotivePresentation {
    MotivePresentation {
        name: name.into(),
        x: x.into(),
        d: 1,
        lefschetz: Some("L".into()),
        ell: Some(carrier(ctx, x, &word(x, "Li", 1), &[(0, Matrix::from_i64(&[&[1]]))])),
        duality: dualities(ctx, x, xd, 1),
        hyperplane: None,
        nu: vec![None],
        curve_split: Some(projectors(ctx, x, 2)),
    }
}

fn surface_motive(ctx: &Ctx) -> MotivePresentation {
    let cat = ctx.cat();
    let e1 = Matrix::from_i64(&[&[1, 0, 0, 0]]);
    let ell = carrier(ctx, "S", "S.Li", &[(0, e1.transpose()), (1, Matrix::identity(2)), (2, e1.clone())]);
    let q = carrier(
        ctx,
        "S",
        "C",
        &[(0, Matrix::identity(1)), (1, Matrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0], &[0, 0]])), (2, e1.clone())],
    );
    let nu0 = RoofMorphism::plain(ctx, carrier(ctx, "S.Li.Li", "S", &[(0, Matrix::identity(1))]));
    // ν_1 through the apex S ⊕ cone(id_S), which H sees as S
    let f1 = carrier(ctx, "S.Li", "S", &[(0, e1.clone()), (1, Matrix::identity(2)), (2, e1.transpose())]);
    let s = ctx.complex("S").expect("word");
    let cone = crate::complex::cone(cat, &s.identity(cat)).expect("cone").cone;
    let inj = crate::complex::injection(cat, &s, &cone, 0);
    let nu1 = RoofMorphism::new(ctx, inj.compose(cat, &f1).expect("compose"), inj).expect("roof");
    MotivePresentation {
        name: "surface".into(),
        x: "S".into(),
        d: 2,
        lefschetz: Some("L".into()),
        ell: Some(ell),
        duality: dualities(ctx, "S", "Sd", 2),
        hyperplane: Some(Box::new(Hyperplane { y: curve_motive(ctx, "C", "Cd", "genus-2 section"), q })),
        nu: vec![Some(nu0), Some(nu1)],
        curve_split: None,
    }
}

/// `U` spans degrees 0 and 2 with `N` linking them, so no degree projector
/// commutes with `N`.
fn unipotent_motive(ctx: &Ctx) -> MotivePresentation {
    let one = || Matrix::from_i64(&[&[1]]);
    let neg = || Matrix::from_i64(&[&[-1]]);
    MotivePresentation {
        name: "unipotent".into(),
        x: "U".into(),
        d: 1,
        lefschetz: Some("L".into()),
        ell: Some(carrier(ctx, "U", "U.Li", &[(0, one())])),
        duality: vec![
            carrier(ctx, "Ud", "U.Li", &[(-2, one()), (0, neg())]),
            carrier(ctx, "Ud.L", "U", &[(0, one()), (2, neg())]),
        ],
        hyperplane: None,
        nu: vec![None],
        curve_split: None,
    }
}

fn point_motive(ctx: &Ctx) -> MotivePresentation {
    let x = ctx.complex("1").expect("unit");
    MotivePresentation {
        name: "point".into(),
        x: "1".into(),
        d: 0,
        lefschetz: None,
        ell: None,
        duality: vec![x.identity(ctx.cat())],
        hyperplane: None,
        nu: vec![],
        curve_split: None,
    }
}

/// Weights of the genus-one window objects for the sign twist.
pub fn curve_weights() -> BTreeMap<String, Vec<i64>> {
    [("X", vec![0, 1, 2]), ("Xd", vec![0, -1, -2]), ("L", vec![2]), ("Li", vec![-2])]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

/// Motive data of a bundled dataset, when it has any.
pub fn motive(name: &str, ctx: &Ctx) -> Option<MotivePresentation> {
    Some(match name {
        "point" => point_motive(ctx),
        "genus-1" => curve_motive(ctx, "X", "Xd", "genus-1"),
        "surface" => surface_motive(ctx),
        "rep-z-unipotent" => unipotent_motive(ctx),
        _ => return None,
    })
}
