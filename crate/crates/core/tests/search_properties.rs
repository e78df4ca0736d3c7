use fifo_anomaly::construct::classical_example;
use fifo_anomaly::search::{
    anomaly_feasible, exhaustive_search, inclusion_check, randomized_search, validate_witness,
    SearchSpace,
};
use fifo_anomaly::{Fraction, Policy, ReferenceString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn classical_geometry_reaches_ten_ninths() {
    let space = SearchSpace::new(3, 4, 5, 12);
    let result = exhaustive_search(&space).unwrap();
    assert!(result.exhausted);
    assert!(result.best_ratio >= Fraction::new(10, 9));
    assert!(validate_witness(&space, &result));
    // The classical string is already canonical and is the unique maximiser.
    assert_eq!(result.witness, classical_example().0);
}

#[test]
fn infeasible_geometry_has_no_anomaly() {
    let space = SearchSpace::new(2, 3, 4, 8);
    let result = exhaustive_search(&space).unwrap();
    assert!(result.exhausted);
    assert_eq!(result.best_ratio, Fraction::from_integer(1));
}

#[test]
fn canonical_pruning_keeps_the_maximum() {
    for (small, large, pages, max_len) in [(1, 2, 3, 7), (2, 3, 4, 7), (3, 4, 5, 8), (2, 4, 5, 7)] {
        let space = SearchSpace::new(small, large, pages, max_len);
        let pruned = exhaustive_search(&space).unwrap();
        let full = exhaustive_search(&space.canonical(false)).unwrap();
        assert_eq!(pruned.best_ratio, full.best_ratio, "{space:?}");
        assert!(pruned.strings_examined < full.strings_examined);
        assert_eq!(full.strings_examined as u128, space.canonical(false).size());
    }
}

#[test]
fn search_is_reproducible_and_sound() {
    let space = SearchSpace::new(3, 4, 5, 9);
    let a = exhaustive_search(&space).unwrap();
    let b = exhaustive_search(&space).unwrap();
    assert_eq!(a, b);
    assert!(validate_witness(&space, &a));
}

#[test]
fn fifo_breaks_inclusion_on_the_classical_string() {
    let (refs, small, large) = classical_example();
    for policy in [Policy::Lru, Policy::Min] {
        assert!(inclusion_check(policy, &refs, small, large).unwrap().holds);
    }
    let fifo = inclusion_check(Policy::Fifo, &refs, small, large).unwrap();
    assert!(!fifo.holds);
    // After (1,2,3,4,1,2,5,1,2,3) the small memory holds 3 while the large
    // one is (5,1,2,3)... the first divergence comes when 5 enters.
    let first = fifo.first_violation.unwrap();
    assert!(first < refs.len());
}

#[test]
fn inclusion_over_seeded_random_strings() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let alphabet = rng.gen_range(1..=6u32);
        let len = rng.gen_range(0..=50);
        let refs =
            ReferenceString::from_ids((0..len).map(|_| rng.gen_range(1..=alphabet))).unwrap();
        for large in 2..=5 {
            for small in 1..large {
                for policy in [Policy::Lru, Policy::Min] {
                    let r = inclusion_check(policy, &refs, small, large).unwrap();
                    assert!(r.holds, "{policy} {small}/{large} on {refs}");
                }
            }
        }
    }
}

#[test]
fn randomized_search_is_seed_reproducible() {
    let space = SearchSpace::new(3, 4, 5, 20);
    let a = randomized_search(&space, 42, 2_000).unwrap();
    let b = randomized_search(&space, 42, 2_000).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.strings_examined, 2_000);
    assert!(!a.exhausted);
    assert!(validate_witness(&space, &a));
}

#[test]
fn randomized_search_finds_nothing_where_none_exists() {
    assert_eq!(anomaly_feasible(2, 3), Ok(false));
    let space = SearchSpace::new(2, 3, 4, 30);
    for seed in 0..3 {
        let result = randomized_search(&space, seed, 3_000).unwrap();
        assert_eq!(result.best_ratio, Fraction::from_integer(1));
    }
}

#[test]
fn randomized_search_finds_an_anomaly_in_a_feasible_geometry() {
    let space = SearchSpace::new(3, 4, 5, 24);
    let result = randomized_search(&space, 1, 60_000).unwrap();
    assert!(validate_witness(&space, &result));
    assert!(result.best_ratio > Fraction::from_integer(1), "{result:?}");
}

#[test]
fn randomized_search_beats_two_at_length_one_hundred() {
    let space = SearchSpace::new(5, 6, 7, 100);
    let result = randomized_search(&space, 2, 300_000).unwrap();
    assert!(validate_witness(&space, &result));
    assert!(
        result.best_ratio > Fraction::from_integer(2),
        "{}",
        result.best_ratio
    );
}
