use std::collections::HashSet;
use std::sync::Arc;

use combicov_core::construct::{partition_relaxed, partition_strict};
use combicov_core::{
    build_combination_set, combinatorial_coverage, combos_of_record, sdcc, universe_count, Dataset,
    Factor, FactorSchema, Record, ValueCombination,
};
use combicov_testkit as oracle;
use proptest::prelude::*;

fn schema_for(domains: &[usize]) -> Arc<FactorSchema> {
    Arc::new(
        FactorSchema::new(
            domains
                .iter()
                .enumerate()
                .map(|(i, &d)| Factor::new(format!("f{i}"), (0..d).map(|v| format!("v{v}"))))
                .collect(),
        )
        .unwrap(),
    )
}

fn dataset(schema: &Arc<FactorSchema>, prefix: &str, rows: &[Vec<usize>]) -> Dataset {
    let records = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            Record::new(
                format!("{prefix}{i}"),
                row.iter().map(|&v| v as u32).collect(),
            )
        })
        .collect();
    Dataset::new(schema.clone(), records).unwrap()
}

/// (domains, target rows, source rows, t)
type Case = (Vec<usize>, Vec<Vec<usize>>, Vec<Vec<usize>>, usize);

fn instance() -> impl Strategy<Value = Case> {
    prop::collection::vec(2usize..=4, 1..=5).prop_flat_map(|domains| {
        let k = domains.len();
        let row = domains.iter().map(|&d| 0..d).collect::<Vec<_>>();
        (
            Just(domains),
            prop::collection::vec(row.clone(), 1..=25),
            prop::collection::vec(row, 0..=25),
            1..=k.min(3),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn counts_match_brute_force((domains, target, source, t) in instance()) {
        let schema = schema_for(&domains);
        let tgt = dataset(&schema, "t", &target);
        let src = dataset(&schema, "s", &source);

        let cc = combinatorial_coverage(&tgt, t).unwrap();
        prop_assert_eq!((cc.covered_count, cc.universe_count), oracle::cc_counts(&domains, &target, t));

        let report = sdcc(&tgt, &src, t).unwrap();
        prop_assert_eq!(
            (report.missing_count, report.target_count),
            oracle::sdcc_counts(&domains, &target, &source, t)
        );
        prop_assert_eq!(report.sdcc.is_zero(), build_combination_set(&tgt, t).unwrap()
            .is_subset(&build_combination_set(&src, t).unwrap()));
    }

    #[test]
    fn every_record_has_k_choose_t_combinations((domains, target, _source, t) in instance()) {
        let schema = schema_for(&domains);
        let data = dataset(&schema, "t", &target);
        for record in data.records() {
            let combos = combos_of_record(record, &schema, t).unwrap();
            prop_assert_eq!(combos.len(), oracle::choose(domains.len(), t));
        }
    }

    #[test]
    fn order_and_duplicates_do_not_matter((domains, target, source, t) in instance(), seed in any::<u64>()) {
        let schema = schema_for(&domains);
        let mut shuffled = target.clone();
        let rotate = (seed as usize) % shuffled.len();
        shuffled.rotate_left(rotate);
        shuffled.reverse();
        shuffled.extend(target.iter().take(3).cloned());

        let a = dataset(&schema, "a", &target);
        let b = dataset(&schema, "b", &shuffled);
        let src = dataset(&schema, "s", &source);
        prop_assert_eq!(build_combination_set(&a, t).unwrap(), build_combination_set(&b, t).unwrap());
        prop_assert_eq!(combinatorial_coverage(&a, t).unwrap(), combinatorial_coverage(&b, t).unwrap());
        prop_assert_eq!(sdcc(&a, &src, t).unwrap().sdcc, sdcc(&b, &src, t).unwrap().sdcc);
    }

    #[test]
    fn growth_is_monotone((domains, target, source, t) in instance()) {
        let schema = schema_for(&domains);
        let half = &source[..source.len() / 2];
        let small = dataset(&schema, "s", half);
        let large = dataset(&schema, "s", &source);
        let tgt = dataset(&schema, "t", &target);

        prop_assert!(combinatorial_coverage(&small, t).unwrap().cc <= combinatorial_coverage(&large, t).unwrap().cc);
        prop_assert!(sdcc(&tgt, &large, t).unwrap().sdcc <= sdcc(&tgt, &small, t).unwrap().sdcc);
    }

    #[test]
    fn partitions_match_brute_force((domains, target, source, t) in instance()) {
        let schema = schema_for(&domains);
        let tgt = dataset(&schema, "t", &target);
        let src = dataset(&schema, "s", &source);
        let strict = partition_strict(&tgt, &src, t).unwrap();
        let expected = oracle::missing_per_row(&target, &source, t);
        let got: Vec<usize> = strict.rows.iter().map(|r| r.missing_count).collect();
        prop_assert_eq!(&got, &expected);
        for (row, missing) in strict.rows.iter().zip(&expected) {
            prop_assert_eq!(row.not_covered, *missing > 0);
        }
        let flags = sdcc(&tgt, &src, t).unwrap();
        prop_assert_eq!(flags.not_covered_count(), strict.not_covered_count());

        let region = format!("f{}", domains.len() - 1);
        let relaxed = partition_relaxed(&tgt, &src, t, &region).unwrap();
        let strict_ids: HashSet<&str> = strict.not_covered_ids().into_iter().collect();
        let relaxed_ids: HashSet<&str> = relaxed.not_covered_ids().into_iter().collect();
        prop_assert!(strict_ids.is_subset(&relaxed_ids));
        prop_assert_eq!(relaxed.covered_count() + relaxed.not_covered_count(), target.len());
    }
}

/// Universe counting under constraints against direct filtering of the
/// unconstrained universe.
#[test]
fn constrained_universe_matches_filtering() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let k = rng.gen_range(2..=5);
        let domains: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=4)).collect();
        let plain = schema_for(&domains);
        let mut forbidden = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let arity = rng.gen_range(1..=k.min(3));
            let mut factors: Vec<usize> = (0..k).collect();
            for i in 0..arity {
                let j = rng.gen_range(i..k);
                factors.swap(i, j);
            }
            let pairs: Vec<(usize, usize)> = factors[..arity]
                .iter()
                .map(|&f| (f, rng.gen_range(0..domains[f])))
                .collect();
            forbidden.push(pairs);
        }
        let constraints = forbidden
            .iter()
            .map(|pairs| {
                ValueCombination::new(pairs.iter().map(|&(f, v)| (f as u32, v as u32)).collect())
                    .unwrap()
            })
            .collect();
        let schema = FactorSchema::with_constraints(plain.factors().to_vec(), constraints).unwrap();
        for t in 1..=k.min(3) {
            let expected = oracle::universe(&domains, t)
                .into_iter()
                .filter(|combo| {
                    !forbidden
                        .iter()
                        .any(|bad| bad.iter().all(|pair| combo.contains(pair)))
                })
                .count() as u64;
            assert_eq!(
                universe_count(&schema, t).unwrap(),
                expected,
                "{domains:?} {forbidden:?} t={t}"
            );
        }
    }
}
