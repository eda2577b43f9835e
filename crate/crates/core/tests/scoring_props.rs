//! Property tests for the metric invariants: bounds, beta ordering,
//! monotonicity, and partition sums over randomized counts.

use gecstrat_core::{aggregate, Beta, EvalCounts, LabelKey, LevelKey, ProficiencyLevel, ScoreRow, SentenceComparison, StratumKey};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

fn random_counts(rng: &mut StdRng) -> EvalCounts {
    EvalCounts::new(
        rng.random_range(0..200),
        rng.random_range(0..200),
        rng.random_range(0..200),
    )
}

#[test]
fn metrics_stay_in_bounds_and_between_p_and_r() {
    let mut rng = StdRng::seed_from_u64(0xbead);
    let betas = [Beta::HALF, Beta::ONE, Beta::TWO];
    for _ in 0..3_000 {
        let counts = random_counts(&mut rng);
        let row = ScoreRow::from_counts(counts, &betas);
        assert!((0.0..=1.0).contains(&row.precision));
        assert!((0.0..=1.0).contains(&row.recall));
        for f in row.f.values() {
            assert!((0.0..=1.0).contains(f), "{counts:?} -> {f}");
            let (lo, hi) = (row.precision.min(row.recall), row.precision.max(row.recall));
            if row.precision > 0.0 || row.recall > 0.0 {
                assert!(*f >= lo - 1e-12 && *f <= hi + 1e-12, "{counts:?} -> {f}");
            }
        }
    }
}

#[test]
fn beta_order_tracks_precision_recall_order() {
    let mut rng = StdRng::seed_from_u64(0xbeef);
    let betas = [Beta::HALF, Beta::ONE, Beta::TWO];
    for _ in 0..3_000 {
        let counts = random_counts(&mut rng);
        let row = ScoreRow::from_counts(counts, &betas);
        let (f05, f1, f2) = (row.f[&Beta::HALF], row.f[&Beta::ONE], row.f[&Beta::TWO]);
        if row.precision == row.recall {
            assert!((f05 - f1).abs() < 1e-12 && (f1 - f2).abs() < 1e-12);
        } else if row.precision > row.recall && row.recall > 0.0 {
            assert!(f05 > f1 && f1 > f2, "{counts:?}: {f05} {f1} {f2}");
        } else if row.recall > row.precision && row.precision > 0.0 {
            assert!(f05 < f1 && f1 < f2, "{counts:?}: {f05} {f1} {f2}");
        }
    }
}

#[test]
fn extra_tp_never_hurts_and_extra_fp_never_helps() {
    let mut rng = StdRng::seed_from_u64(0xcafe);
    let betas = [Beta::HALF, Beta::ONE, Beta::TWO];
    for _ in 0..3_000 {
        let counts = random_counts(&mut rng);
        let row = ScoreRow::from_counts(counts, &betas);
        let more_tp = ScoreRow::from_counts(
            EvalCounts::new(counts.tp + 1, counts.fp, counts.fn_),
            &betas,
        );
        assert!(more_tp.precision >= row.precision - 1e-12);
        assert!(more_tp.recall >= row.recall - 1e-12);
        for beta in &betas {
            assert!(more_tp.f[beta] >= row.f[beta] - 1e-12, "{counts:?}");
        }
        let more_fp = ScoreRow::from_counts(
            EvalCounts::new(counts.tp, counts.fp + 1, counts.fn_),
            &betas,
        );
        assert!(more_fp.precision <= row.precision + 1e-12, "{counts:?}");
    }
}

#[test]
fn partitions_sum_to_totals_on_random_reports() {
    let mut rng = StdRng::seed_from_u64(0xd00d);
    let labels = ["M:PUNCT", "R:PREP", "R:ORTH", "M:DET", "R:VERB", "UNK"];
    let betas = [Beta::HALF];
    for _ in 0..200 {
        let mut items = Vec::new();
        for _ in 0..rng.random_range(1..20usize) {
            let level = ProficiencyLevel::ALL[rng.random_range(0..4)];
            let mut by_label = std::collections::BTreeMap::new();
            let mut total = EvalCounts::default();
            for label in labels.iter().take(rng.random_range(1..=labels.len())) {
                let c = EvalCounts::new(
                    rng.random_range(0..5),
                    rng.random_range(0..5),
                    rng.random_range(0..5),
                );
                total += c;
                by_label.insert(label.to_string(), c);
            }
            items.push((
                level,
                SentenceComparison {
                    counts: total,
                    annotator: 0,
                    matched: Vec::new(),
                    unmatched_hyp: Vec::new(),
                    unmatched_ref: Vec::new(),
                    by_label,
                },
            ));
        }
        // `aggregate` itself asserts the partitions; also check one directly.
        let report = aggregate(&items, &betas);
        let all_total = report.rows[&StratumKey::total(LevelKey::All)].counts;
        let type_sum: EvalCounts = report
            .rows
            .iter()
            .filter(|(k, _)| k.level == LevelKey::All && matches!(k.label, LabelKey::Type(_)))
            .map(|(_, row)| row.counts)
            .sum();
        assert_eq!(type_sum, all_total);
    }
}
