use divmax::canonical;
use divmax::doc::{DistanceDoc, InstanceDoc, MatroidDoc, SourceDoc, TransformDoc};
use proptest::collection::vec;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1e-6f64..1e-6, Just(0.0), Just(1.0 / 3.0)]
}

fn doc() -> impl Strategy<Value = InstanceDoc> {
    (2usize..6).prop_flat_map(|n| {
        let source = prop_oneof![
            vec(vec(finite(), 2), n).prop_map(|points| SourceDoc::L2 { points }),
            (1.0f64..2.0, vec(vec(finite(), 3), n)).prop_map(|(p, points)| SourceDoc::Lp { p, points }),
            vec(vec(0usize..8, 0..4), n).prop_map(|sets| SourceDoc::Jaccard { universe: 8, sets }),
            vec(0.0f64..10.0, n * n).prop_map(|matrix| SourceDoc::Explicit { matrix }),
        ];
        let transforms = vec(
            prop_oneof![
                (0.1f64..1.0).prop_map(|exponent| TransformDoc::Power { exponent }),
                Just(TransformDoc::Ratio),
                (0.1f64..3.0).prop_map(|lambda| TransformDoc::ExpDecay { lambda }),
            ],
            0..3,
        );
        (
            source,
            transforms,
            1..=n,
            proptest::option::of(vec(0.0f64..1.0, n)),
            proptest::option::of(any::<u64>()),
        )
            .prop_map(move |(source, transforms, k, scores, seed)| InstanceDoc {
                schema_version: 1,
                n,
                distance: DistanceDoc { source, transforms },
                matroid: MatroidDoc::Uniform { k },
                scores,
                seed,
            })
    })
}

proptest! {
    #[test]
    fn canonical_form_is_stable(d in doc()) {
        let once = canonical::to_string(&d).unwrap();
        let parsed: InstanceDoc = serde_json::from_str(&once).unwrap();
        let twice = canonical::to_string(&parsed).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(canonical::canonicalize(&once).unwrap(), once);
        prop_assert_eq!(parsed.seed, d.seed);
    }
}
