use lexcomp::annotate::{aggregate, AnnotationConfig, GridLabel};
use lexcomp::corpus::{parse_complex_tsv, write_tsv, CorpusTag, Dataset, Instance};
use lexcomp::linreg;
use lexcomp::pipeline::{annotate_dataset, predict_ensemble, EnsembleConfig};
use lexcomp::svm::rbf_kernel;
use proptest::prelude::*;

fn word() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z'-]{0,8}"
}

fn instance(two_words: bool) -> impl Strategy<Value = Instance> {
    let target = if two_words {
        (word(), word())
            .prop_map(|(a, b)| format!("{a} {b}"))
            .boxed()
    } else {
        word().boxed()
    };
    (
        prop::sample::select(vec![
            CorpusTag::Bible,
            CorpusTag::Biomed,
            CorpusTag::Europarl,
        ]),
        prop::collection::vec(word(), 1..12),
        target,
        prop::option::of(0.0f64..=1.0),
    )
        .prop_map(|(corpus, words, target, gold)| Instance {
            id: String::new(),
            corpus,
            sentence: words.join(" "),
            target,
            gold,
        })
}

fn dataset(labeled: bool) -> impl Strategy<Value = Dataset> {
    any::<bool>()
        .prop_flat_map(|mwe| prop::collection::vec(instance(mwe), 0..20))
        .prop_map(move |rows| {
            let rows = rows
                .into_iter()
                .enumerate()
                .map(|(i, mut r)| {
                    r.id = format!("id-{i}");
                    if labeled && r.gold.is_none() {
                        r.gold = Some(0.5);
                    }
                    if !labeled {
                        r.gold = None;
                    }
                    r
                })
                .collect();
            Dataset::new(rows).unwrap()
        })
}

proptest! {
    #[test]
    fn labeled_tsv_round_trip(ds in dataset(true)) {
        let mut buf = Vec::new();
        write_tsv(&ds, &mut buf, true).unwrap();
        let back = parse_complex_tsv(buf.as_slice(), true).unwrap();
        prop_assert_eq!(back.instances(), ds.instances());
    }

    #[test]
    fn unlabeled_tsv_round_trip(ds in dataset(false)) {
        let mut buf = Vec::new();
        write_tsv(&ds, &mut buf, false).unwrap();
        let back = parse_complex_tsv(buf.as_slice(), false).unwrap();
        prop_assert_eq!(back.instances(), ds.instances());
    }

    #[test]
    fn training_labels_monotone_across_slots(
        golds in prop::collection::vec(0.0f64..=1.0, 1..30),
        n in 1usize..12,
        rho in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let rows = golds.iter().enumerate().map(|(i, &c)| Instance {
            id: format!("r{i}"),
            corpus: CorpusTag::Bible,
            sentence: "a b".into(),
            target: "b".into(),
            gold: Some(c),
        }).collect();
        let ds = Dataset::new(rows).unwrap();
        let sets = annotate_dataset(&ds, &AnnotationConfig { n, rho, seed }).unwrap();
        for set in &sets {
            prop_assert_eq!(set.n(), n);
            prop_assert!(set.labels().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    /// A bank whose slots return their training labels reconstructs c.
    #[test]
    fn oracle_bank_reconstructs_gold(c in 0.0f64..=1.0, n in 1usize..25) {
        let rows = vec![Instance {
            id: "x".into(),
            corpus: CorpusTag::Other,
            sentence: "a b".into(),
            target: "a".into(),
            gold: Some(c),
        }];
        let ds = Dataset::new(rows).unwrap();
        let sets = annotate_dataset(&ds, &AnnotationConfig { n, rho: 0.0, seed: 0 }).unwrap();
        let predicted: Vec<GridLabel> = sets[0]
            .labels()
            .iter()
            .map(|l| GridLabel::from_categorical(l.to_categorical()).unwrap())
            .collect();
        let score = aggregate(&predicted).unwrap();
        prop_assert!((0.0..=1.0).contains(&score));
        prop_assert!((score - c).abs() <= 0.25 / n as f64 + 1e-12);
    }

    #[test]
    fn ensemble_monotone_and_scale_free(
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
        bump in 0.0f64..=1.0,
        w_reg in 0.0f64..10.0,
        w_cls in 0.01f64..10.0,
        k in 0.01f64..100.0,
    ) {
        let cfg = EnsembleConfig { w_reg, w_cls };
        let base = predict_ensemble(a, b, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(predict_ensemble((a + bump).min(1.0), b, &cfg).unwrap() >= base);
        prop_assert!(predict_ensemble(a, (b + bump).min(1.0), &cfg).unwrap() >= base);
        let scaled = EnsembleConfig { w_reg: k * w_reg, w_cls: k * w_cls };
        prop_assert!((predict_ensemble(a, b, &scaled).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn rbf_symmetric_and_bounded(
        x in prop::collection::vec(-10.0f64..10.0, 4),
        y in prop::collection::vec(-10.0f64..10.0, 4),
        gamma in 1e-4f64..2.0,
    ) {
        let k = rbf_kernel(&x, &y, gamma).unwrap();
        prop_assert_eq!(k, rbf_kernel(&y, &x, gamma).unwrap());
        prop_assert!((0.0..=1.0).contains(&k));
    }

    #[test]
    fn ridge_predictions_clamped(
        rows in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0.0f64..=1.0), 1..20),
        probe in (-100.0f64..100.0, -100.0f64..100.0),
        lambda in 1e-6f64..10.0,
    ) {
        let x: Vec<[f64; 2]> = rows.iter().map(|r| [r.0, r.1]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let m = linreg::fit(&x, &y, lambda).unwrap();
        let p = m.predict(&[probe.0, probe.1]).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let again = linreg::fit(&x, &y, lambda).unwrap();
        prop_assert_eq!(m, again);
    }
}
