use std::path::PathBuf;

use proptest::prelude::*;
use zonovol::{builtin, RealMatrix, SystemModel};
use zonovol_cli::{parse_model, parse_model_str, render_model};

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

#[test]
fn shipped_models_match_builtins() {
    for (file, model) in [("ex1.json", builtin::ex1()), ("ex2.json", builtin::ex2())] {
        let parsed = parse_model(&models_dir().join(file)).unwrap();
        assert_eq!(parsed, model, "{file}");
    }
}

#[test]
fn empty_file_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "").unwrap();
    let err = parse_model(&path).unwrap_err().to_string();
    assert!(
        err.contains("empty.json") && err.contains("line 1"),
        "{err}"
    );
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -1e3..1e3f64,
        Just(0.0),
        Just(-0.0),
    ]
}

fn model() -> impl Strategy<Value = SystemModel> {
    (1usize..=5, 1usize..=3).prop_flat_map(|(n, r)| {
        (
            prop::collection::vec(finite(), n * n),
            prop::collection::vec(finite(), n * r),
        )
            .prop_map(move |(a, b)| {
                SystemModel::new(
                    "prop",
                    RealMatrix::new(n, n, a).unwrap(),
                    RealMatrix::new(n, r, b).unwrap(),
                )
                .unwrap()
            })
    })
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(m in model()) {
        let back = parse_model_str(&render_model(&m)).unwrap();
        prop_assert_eq!(back.name.as_str(), m.name.as_str());
        let bits = |x: &RealMatrix| x.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(back.a()), bits(m.a()));
        prop_assert_eq!(bits(back.b()), bits(m.b()));
    }
}
