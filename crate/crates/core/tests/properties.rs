use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unicode_normalization::UnicodeNormalization;

use scriptorium::learn::{knn_classify, ocsvm_train, rf_mdi, rf_train, ForestParams, Gamma, OcsvmParams};
use scriptorium::{
    corpus::count_characters, segment_graphemes, BrevigraphInventory, CountMode, ProductionUnitDoc, ScribeLabel,
};

fn inv() -> BrevigraphInventory {
    BrevigraphInventory::default()
}

#[test]
fn default_inventory_is_closed_under_canonical_equivalence() {
    let inv = inv();
    for cp in 0..=0x10FFFF_u32 {
        let Some(c) = char::from_u32(cp) else { continue };
        let nfd: String = c.to_string().nfd().collect();
        let direct = inv.contains(c);
        let decomposed = nfd.chars().any(|d| inv.contains(d));
        assert_eq!(direct, decomposed, "U+{cp:04X} {c} vs NFD {nfd:?}");
        let nfc: String = c.to_string().nfc().collect();
        assert_eq!(direct, nfc.chars().any(|d| inv.contains(d)), "U+{cp:04X} vs NFC {nfc:?}");
    }
}

fn text_strategy() -> impl Strategy<Value = String> {
    let pieces = prop::sample::select(vec![
        "a", "e", "n", "m", "q", "p", " ", "  ", "\n", "ē", "e\u{0304}", "ñ", "n\u{0303}", "m\u{0305}",
        "q\u{0363}", "⁊", "ꝑ", "\u{E5DC}", ".", ":", "·", "é", "e\u{0301}", "7", "ǣ", "æ\u{0304}",
    ]);
    prop::collection::vec(pieces, 0..60).prop_map(|v| v.concat())
}

proptest! {
    #[test]
    fn clusters_invariant_under_normalization(t in text_strategy()) {
        let nfc: String = t.nfc().collect();
        let nfd: String = t.nfd().collect();
        let a = segment_graphemes(&nfc, &inv());
        let b = segment_graphemes(&nfd, &inv());
        prop_assert_eq!(a.len(), b.len());
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x.class() == y.class()));
        prop_assert!(count_characters(&t, CountMode::Grapheme) <= count_characters(&t, CountMode::Codepoint));
        let label = ScribeLabel::new("s").unwrap();
        let da = ProductionUnitDoc::from_raw("C", "I", label.clone(), None, &nfc, &inv());
        let db = ProductionUnitDoc::from_raw("C", "I", label, None, &nfd, &inv());
        prop_assert_eq!(da.grapheme_count(), db.grapheme_count());
    }

    #[test]
    fn ocsvm_dual_is_feasible(seed in 0u64..500, n in 2usize..40, nu in 0.05f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let params = OcsvmParams { nu, gamma: Gamma::Scale, ..OcsvmParams::default() };
        let model = ocsvm_train(&rows, &params).unwrap();
        let ub = 1.0 / (nu * n as f64);
        let sum: f64 = model.dual_coefs.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-6);
        prop_assert!(model.dual_coefs.iter().all(|&a| a > 0.0 && a <= ub + 1e-12));
    }

    #[test]
    fn knn_has_zero_training_error(seed in 0u64..500, n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 + rng.random::<f64>() * 0.5, rng.random()]).collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..3)).collect();
        for (x, y) in rows.iter().zip(&labels) {
            prop_assert_eq!(knn_classify(&rows, &labels, x, 1).unwrap(), *y);
        }
    }
}

#[test]
fn mdi_is_equivariant_under_column_permutation() {
    // single-feature-per-split forests consider every feature, so the seed
    // stream does not depend on column order
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rows: Vec<Vec<f64>> = (0..40).map(|_| (0..4).map(|_| rng.random::<f64>()).collect()).collect();
    let labels: Vec<bool> = rows.iter().map(|r| r[0] + 0.5 * r[2] > 0.8).collect();
    let params = ForestParams {
        n_trees: 1,
        bootstrap: false,
        max_features: scriptorium::learn::MaxFeatures::All,
        ..ForestParams::default()
    };
    let perm = [2, 0, 3, 1];
    let permuted: Vec<Vec<f64>> = rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
    let a = rf_mdi(&rf_train(&rows, &labels, &params).unwrap());
    let b = rf_mdi(&rf_train(&permuted, &labels, &params).unwrap());
    for (k, &j) in perm.iter().enumerate() {
        assert!((b[k] - a[j]).abs() < 1e-12, "feature {j}: {} vs {}", a[j], b[k]);
    }
    assert!(a.iter().all(|&v| v >= 0.0));
}
