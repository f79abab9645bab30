use omega_core::oracle::{enumerate_omega, omega_size, oracle_extremes, OracleOptions};
use omega_core::{Matrix, Permutation, SortDirection};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int_matrix(n: std::ops::RangeInclusive<usize>, hi: u32) -> impl Strategy<Value = Matrix> {
    n.prop_flat_map(move |n| {
        prop::collection::vec(0..=hi, n * n)
            .prop_map(move |v| Matrix::from_vec(n, v.into_iter().map(f64::from).collect()).unwrap())
    })
}

fn shuffle_within_rows(a: &Matrix, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = a
        .rows()
        .map(|r| {
            let mut r = r.to_vec();
            r.shuffle(&mut rng);
            r
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

/// Multinomial count of distinct orderings of one row.
fn distinct_orderings(row: &[f64]) -> u64 {
    let mut sorted = row.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut count = factorial(row.len() as u64);
    for run in sorted.chunk_by(|a, b| a == b) {
        count /= factorial(run.len() as u64);
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn in_omega_is_an_equivalence(a in int_matrix(1..=6, 9), s1: u64, s2: u64) {
        let b = shuffle_within_rows(&a, s1);
        let c = shuffle_within_rows(&b, s2);
        prop_assert!(a.in_omega(&a));
        prop_assert!(b.in_omega(&a) && a.in_omega(&b));
        prop_assert!(c.in_omega(&a));
        prop_assert_eq!(a.row_sums(), b.row_sums());
    }

    #[test]
    fn sorted_rows_stay_in_omega_and_reverse(a in int_matrix(1..=8, 9)) {
        let asc = a.sort_rows(SortDirection::Ascending);
        let desc = a.sort_rows(SortDirection::Descending);
        prop_assert!(asc.in_omega(&a) && desc.in_omega(&a));
        for (u, v) in asc.rows().zip(desc.rows()) {
            let mut rev = v.to_vec();
            rev.reverse();
            prop_assert_eq!(u, rev.as_slice());
        }
        prop_assert_eq!(asc.row_sums(), a.row_sums());
    }

    #[test]
    fn enumeration_count_is_product_of_multinomials(a in int_matrix(1..=3, 3)) {
        let expected: u64 = a.rows().map(distinct_orderings).product();
        let members: Vec<Matrix> = enumerate_omega(&a, 4).unwrap().collect();
        prop_assert_eq!(members.len() as u64, expected);
        prop_assert_eq!(omega_size(&a), expected as u128);
        let mut texts: Vec<String> = members.iter().map(|m| m.to_text()).collect();
        texts.sort();
        texts.dedup();
        prop_assert_eq!(texts.len() as u64, expected);
        prop_assert!(members.iter().all(|m| m.in_omega(&a)));
    }

    #[test]
    fn left_permutation_leaves_extremes_unchanged(
        (a, map) in (1usize..=3).prop_flat_map(|n| (
            int_matrix(n..=n, 5),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        ))
    ) {
        let p = Permutation::from_map(map).unwrap();
        let opts = OracleOptions::default();
        let base = oracle_extremes(&a, &opts).unwrap();
        let moved = oracle_extremes(&a.permute_rows(&p).unwrap(), &opts).unwrap();
        prop_assert!((base.max_rho - moved.max_rho).abs() <= 1e-9);
        prop_assert!((base.min_rho - moved.min_rho).abs() <= 1e-9);
    }
}

#[test]
fn mean_row_sum_between_oracle_extremes_with_zeros() {
    use omega_core::experiments::{instance_rng, random_matrix};
    use omega_core::EntryDistribution;
    let dist = EntryDistribution::UniformInt { lo: 0, hi: 4 };
    let mut zeros = 0;
    for i in 0..200 {
        let n = 1 + i % 3;
        let a = random_matrix(n, &mut instance_rng(91, n, i), &dist).unwrap();
        zeros += a.as_slice().iter().filter(|&&v| v == 0.0).count();
        let r = oracle_extremes(&a, &OracleOptions::default()).unwrap();
        let mean = a.mean_row_sum();
        assert!(r.min_rho <= mean + 1e-9 && mean <= r.max_rho + 1e-9, "{a}");
        assert!(r.argmax.in_omega(&a) && r.argmin.in_omega(&a));
    }
    assert!(zeros > 0);
}

#[test]
fn text_and_json_round_trip() {
    let a = shuffle_within_rows(
        &Matrix::from_rows(vec![vec![0.1, 2.5], vec![1e-300, 7.0]]).unwrap(),
        3,
    );
    assert_eq!(Matrix::parse_text(&a.to_text()).unwrap(), a);
    assert_eq!(Matrix::parse_json(&a.to_json()).unwrap(), a);
    assert_eq!(Matrix::parse_any(&a.to_json()).unwrap(), a);
}
