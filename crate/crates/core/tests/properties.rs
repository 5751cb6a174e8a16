use proptest::prelude::*;

use triple_helix::contingency::{
    contingency_from_counts, distribution_from_table, validate_counts, ContingencyTable, NonePolicy,
};
use triple_helix::infotheory::{
    convert_units, entropy, marginalize, transmission2, transmission3_direct_form,
    transmission3_entropy_form, JointDistribution, TransmissionValue, Unit,
};
use triple_helix::ingest::{parse_count_csv, render_csv};
use triple_helix::scanner::{merge_records, scan_corpus, Document, ScanMode, ScanSpec};
use triple_helix::synth::oracle_transmission3;
use triple_helix::timeseries::{moving_average, trend_summary, TransmissionSeries};
use triple_helix::CountRecord;

fn dist_strategy(axes: usize) -> impl Strategy<Value = JointDistribution> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..1.0], 1 << axes)
        .prop_filter("nonzero mass", |w| w.iter().sum::<f64>() > 1e-9)
        .prop_map(move |w| {
            let total: f64 = w.iter().sum();
            JointDistribution::new(axes, w.iter().map(|x| x / total).collect()).unwrap()
        })
}

fn table_strategy() -> impl Strategy<Value = ContingencyTable> {
    prop::array::uniform8(0u64..1_000_000).prop_map(|cells| ContingencyTable {
        year: 2000,
        cells,
        labels: Default::default(),
    })
}

fn permute(d: &JointDistribution, perm: [usize; 3]) -> JointDistribution {
    let mut out = vec![0.0; 8];
    for (idx, &p) in d.probabilities().iter().enumerate() {
        let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
        let new = (bits[perm[0]] << 2) | (bits[perm[1]] << 1) | bits[perm[2]];
        out[new] = p;
    }
    JointDistribution::new(3, out).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn entropy_and_direct_forms_agree(d in dist_strategy(3)) {
        let a = transmission3_entropy_form(&d).unwrap().value;
        let b = transmission3_direct_form(&d).unwrap().value;
        let c = oracle_transmission3(&d).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        prop_assert!((a - c).abs() < 1e-12, "{a} vs {c}");
    }

    #[test]
    fn independence_gives_zero(p in prop::array::uniform3(0.0f64..=1.0)) {
        let d = JointDistribution::product(&p).unwrap();
        prop_assert!(transmission3_entropy_form(&d).unwrap().value.abs() < 1e-12);
        prop_assert!(transmission3_direct_form(&d).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn entropy_and_t2_nonnegative(d1 in dist_strategy(1), d2 in dist_strategy(2), d3 in dist_strategy(3)) {
        prop_assert!(entropy(&d1).value >= 0.0);
        prop_assert!(entropy(&d3).value >= 0.0);
        prop_assert!(transmission2(&d2).unwrap().value >= 0.0);
    }

    #[test]
    fn t3_bounded_by_smallest_marginal_entropy(d in dist_strategy(3)) {
        let t = transmission3_entropy_form(&d).unwrap().value;
        let bound = (0..3)
            .map(|a| entropy(&marginalize(&d, &[a]).unwrap()).value)
            .fold(f64::INFINITY, f64::min);
        prop_assert!(t.abs() <= bound + 1e-12, "|{t}| > {bound}");
    }

    #[test]
    fn t3_permutation_symmetric(d in dist_strategy(3), perm in Just([0usize, 1, 2]).prop_shuffle()) {
        let t = transmission3_entropy_form(&d).unwrap().value;
        let tp = transmission3_entropy_form(&permute(&d, perm)).unwrap().value;
        prop_assert!((t - tp).abs() < 1e-12);
    }

    #[test]
    fn unit_round_trip(v in -1e3f64..1e3, unit in prop_oneof![Just(Unit::Millibit), Just(Unit::Nat)]) {
        let there = convert_units(TransmissionValue::bits(v), unit);
        let back = convert_units(there, Unit::Bit);
        prop_assert!((back.value - v).abs() <= 1e-15 * v.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn contingency_round_trip(table in table_strategy()) {
        let rec = table.to_counts();
        prop_assert!(validate_counts(&rec).is_valid());
        let back = contingency_from_counts(&rec).unwrap();
        prop_assert_eq!(back.cells, table.cells);
        prop_assert_eq!(back.to_counts(), rec);
    }

    #[test]
    fn include_none_marginals_equal_hit_shares(table in table_strategy()) {
        prop_assume!(table.total() > 0);
        let rec = table.to_counts();
        let d = distribution_from_table(&table, NonePolicy::IncludeNone).unwrap();
        for (axis, hits) in [rec.u, rec.i, rec.g].into_iter().enumerate() {
            let m = marginalize(&d, &[axis]).unwrap().probabilities()[1];
            prop_assert!((m - hits as f64 / rec.total as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn count_csv_round_trip(tables in prop::collection::vec(table_strategy(), 0..20)) {
        let records: Vec<CountRecord> = tables
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let mut r = t.to_counts();
                r.year = 1900 + k as i32;
                r
            })
            .collect();
        prop_assert_eq!(parse_count_csv(&render_csv(&records)).unwrap(), records);
    }

    #[test]
    fn moving_average_of_constant_is_constant(c in -1.0f64..1.0, len in 1usize..15, w in 1usize..15) {
        prop_assume!(w <= len);
        let pts = (0..len).map(|k| (2000 + k as i32, c)).collect();
        let s = TransmissionSeries::new(pts, Unit::Bit, NonePolicy::default(), "").unwrap();
        let m = moving_average(&s, w).unwrap();
        prop_assert_eq!(m.len(), len - w + 1);
        for v in m.values() {
            prop_assert!((v - c).abs() < 1e-15);
        }
    }

    #[test]
    fn moving_average_commutes_with_units(vals in prop::collection::vec(-1.0f64..1.0, 2..12), w in 1usize..4) {
        prop_assume!(w <= vals.len());
        let pts = vals.iter().enumerate().map(|(k, &v)| (1990 + k as i32, v)).collect();
        let s = TransmissionSeries::new(pts, Unit::Bit, NonePolicy::default(), "").unwrap();
        for unit in [Unit::Millibit, Unit::Nat] {
            let a = moving_average(&s.to_unit(unit), w).unwrap();
            let b = moving_average(&s, w).unwrap().to_unit(unit);
            for (x, y) in a.values().zip(b.values()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trend_direction_survives_rescaling(vals in prop::collection::vec(-1.0f64..1.0, 2..12), k in 1usize..6) {
        prop_assume!(k <= vals.len() / 2);
        let pts = vals.iter().enumerate().map(|(n, &v)| (1990 + n as i32, v)).collect();
        let s = TransmissionSeries::new(pts, Unit::Bit, NonePolicy::default(), "").unwrap();
        let a = trend_summary(&s, k).unwrap();
        let b = trend_summary(&s.to_unit(Unit::Millibit), k).unwrap();
        prop_assume!((a.late_mean - a.early_mean).abs() > 1e-6);
        prop_assert_eq!(a.direction, b.direction);
    }
}

const WORDS: [&str; 12] = [
    "university",
    "industry",
    "government",
    "universities",
    "industrial",
    "Government",
    "UNIVERSITY",
    "policy",
    "the",
    "patent",
    "x",
    "2002",
];

fn corpus_strategy() -> impl Strategy<Value = Vec<Document>> {
    let doc = (
        1995i32..1999,
        prop::collection::vec((0..WORDS.len(), 0usize..4), 0..8),
    );
    prop::collection::vec(doc, 0..30).prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(k, (year, words))| {
                let seps = [" ", ", ", "-", "\n"];
                let body = words
                    .into_iter()
                    .map(|(w, s)| format!("{}{}", WORDS[w], seps[s]))
                    .collect::<String>();
                Document::new(format!("d{k}"), year, body)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scan_ignores_order_and_sharding(docs in corpus_strategy(), split in 0usize..30) {
        let spec = ScanSpec::with_defaults(ScanMode::FreeText);
        let whole = scan_corpus(&docs, &spec).unwrap();
        for r in &whole {
            prop_assert!(validate_counts(r).is_valid());
        }

        let mut reversed = docs.clone();
        reversed.reverse();
        prop_assert_eq!(&scan_corpus(&reversed, &spec).unwrap(), &whole);

        let split = split.min(docs.len());
        let shards = vec![
            scan_corpus(&docs[..split], &spec).unwrap(),
            scan_corpus(&docs[split..], &spec).unwrap(),
        ];
        prop_assert_eq!(merge_records(&shards), whole.clone());

        let upper: Vec<Document> = docs
            .iter()
            .map(|d| Document::new(d.id.clone(), d.year.unwrap(), d.body.to_uppercase()))
            .collect();
        prop_assert_eq!(scan_corpus(&upper, &spec).unwrap(), whole);
    }
}
