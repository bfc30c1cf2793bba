//! Metric identities over systematic and randomized answer variants.

use proptest::prelude::*;
use qa_audit::{answer_tokens, score_answer, Metric};

/// Decorations that leave the normalized form unchanged, so exact match must
/// survive them and F1 must stay 1.
fn decorations(base: &str) -> Vec<String> {
    vec![
        base.to_uppercase(),
        format!("  {base} "),
        format!("the {base}"),
        format!("{base}."),
        format!("\"{base}\", "),
    ]
}

#[test]
fn exact_match_implies_perfect_f1_across_variant_suite() {
    let bases = [
        "February 6, 2016",
        "76.5",
        "Tidal",
        "the longest suspension bridge in the world",
        "3 March 1875",
        "24 to 17",
        "forty years",
        "Beyoncé",
        "route 66",
        "a dozen eggs",
    ];
    let mut cases = 0;
    for base in bases {
        let golds = vec![base.to_string()];
        for variant in decorations(base) {
            let em = score_answer(&variant, &golds, Metric::Em);
            assert_eq!(em, 1.0, "variant {variant:?} of {base:?} should match");
            let f1 = score_answer(&variant, &golds, Metric::F1);
            assert_eq!(f1, 1.0, "EM = 1 must force F1 = 1 for {variant:?}");
            cases += 1;
        }
    }
    assert_eq!(cases, 50);
}

fn token_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            Just("february".to_string()),
            Just("2016".to_string()),
            Just("bridge".to_string()),
            Just("765".to_string()),
            Just("cat".to_string()),
            "[a-z]{1,6}".prop_map(|s| s),
        ],
        0..6,
    )
    .prop_map(|tokens| tokens.join(" "))
}

proptest! {
    #[test]
    fn em_one_implies_f1_one(pred in token_strategy(), gold in token_strategy()) {
        let golds = vec![gold.clone()];
        let em = score_answer(&pred, &golds, Metric::Em);
        let f1 = score_answer(&pred, &golds, Metric::F1);
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(em == 0.0 || em == 1.0);
        if em == 1.0 {
            prop_assert_eq!(f1, 1.0);
        }
    }

    #[test]
    fn f1_is_one_exactly_on_equal_token_multisets(
        pred in token_strategy(),
        gold in token_strategy(),
    ) {
        let f1 = score_answer(&pred, std::slice::from_ref(&gold), Metric::F1);
        let mut p = answer_tokens(&pred);
        let mut g = answer_tokens(&gold);
        p.sort();
        g.sort();
        prop_assert_eq!(f1 == 1.0, p == g);
    }

    #[test]
    fn f1_is_symmetric(pred in token_strategy(), gold in token_strategy()) {
        let forward = score_answer(&pred, std::slice::from_ref(&gold), Metric::F1);
        let backward = score_answer(&gold, std::slice::from_ref(&pred), Metric::F1);
        prop_assert!((forward - backward).abs() < 1e-15);
    }
}
