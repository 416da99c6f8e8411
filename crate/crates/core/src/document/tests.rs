use super::*;

/// Set `TANNAKA_BLESS=1` to rewrite the shipped files.
#[test]
fn shipped_documents_match_the_datasets() {
    for n in datasets::NAMES {
        let text = bundled(n).unwrap().to_json() + "\n";
        let path = format!("{}/datasets/{n}.json", env!("CARGO_MANIFEST_DIR"));
        if std::env::var_os("TANNAKA_BLESS").is_some() {
            std::fs::write(&path, &text).unwrap();
        } else {
            assert_eq!(bundled_text(n).unwrap(), text, "{n}.json is stale");
        }
    }
}

#[test]
fn documents_round_trip() {
    for n in datasets::NAMES {
        let ws = Workspace::parse(bundled_text(n).unwrap()).unwrap();
        assert!(ws.issues.is_empty());
        let ctx = datasets::context(n).unwrap();
        let (a, b) = (ws.motives.first(), datasets::motive(n, &ctx));
        assert_eq!(a.map(|m| m.name.clone()), b.as_ref().map(|m| m.name.clone()));
        if let (Some(a), Some(b)) = (a, b) {
            assert_eq!(a.ell, b.ell);
            assert_eq!(a.duality, b.duality);
            assert_eq!(a.nu, b.nu);
            assert_eq!(a.hyperplane.as_ref().map(|h| &h.q), b.hyperplane.as_ref().map(|h| &h.q));
        }
    }
}

#[test]
fn parse_errors_carry_positions() {
    let e = Document::parse("{\n  \"format_version\": 1,\n  oops\n}").unwrap_err();
    assert!(matches!(e, DocError::Parse { line: 3, .. }), "{e}");
    let mut doc = bundled("point").unwrap();
    doc.format_version = 7;
    assert!(matches!(Document::parse(&doc.to_json()), Err(DocError::Version(7))));
}

#[test]
fn broken_differential_names_complex_and_degree() {
    let mut doc = bundled("point").unwrap();
    // cone(id_1) is 1 -> 1; doubling it to 1 -> 1 -> 1 with identities breaks d∘d
    let c = &mut doc.complexes[0];
    c.terms.push(TermDoc { degree: -1, objects: vec!["1".into()] });
    c.diffs.push(BlockDoc { degree: 0, blocks: vec![vec!["1".into()]] });
    let ws = Workspace::new(doc).unwrap();
    assert_eq!(ws.issues.len(), 1);
    assert!(ws.issues[0].contains("cone(id_1)") && ws.issues[0].contains("degree 1"), "{}", ws.issues[0]);
}

#[test]
fn certificates_survive_serialization() {
    let ws = Workspace::parse(bundled_text("genus-1").unwrap()).unwrap();
    let m = ws.find_motive("genus-1").unwrap();
    let s = crate::motive::lefschetz_split(&ws.ctx, m).unwrap();
    let mut b = BundleBuilder::new(ws.ctx.cat());
    for (i, p) in s.projectors.iter().enumerate() {
        b.add(format!("π_{i}"), p);
    }
    let bundle = b.finish();
    let text = serde_json::to_string(&bundle).unwrap();
    let back: CertBundle = serde_json::from_str(&text).unwrap();
    let r = decode_bundle(&ws, &back).unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|r| r.ok), "{r:?}");
    let mut bad = back.clone();
    bad.roots[0].matrix = bad.roots[1].matrix.clone();
    assert!(!decode_bundle(&ws, &bad).unwrap()[0].ok);
}
