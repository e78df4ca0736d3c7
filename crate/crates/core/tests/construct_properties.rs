use fifo_anomaly::construct::{
    anomaly_prefix, construct_for_ratio, cycle_block, published_disproof_prefix, target_state,
    unbounded_family,
};
use fifo_anomaly::residue::build_w;
use fifo_anomaly::{simulate, Fraction, Page, Policy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn page(id: u32) -> Page {
    Page::new(id).unwrap()
}

#[test]
fn prefix_postconditions_over_random_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let large = rng.gen_range(2..=8usize);
        let small = rng.gen_range(1..large);
        let mut alphabet: Vec<Page> = (1..=large as u32 + 1).map(page).collect();
        alphabet.shuffle(&mut rng);
        let target = &alphabet[..small];

        let u = anomaly_prefix(small, large, target).unwrap();
        let s = simulate(Policy::Fifo, &u, small, None).unwrap();
        assert_eq!(s.final_state, target, "m={small} M={large}");
        assert_eq!(
            s.fault_count(),
            u.len(),
            "every reference faults at m={small}"
        );

        let l = simulate(Policy::Fifo, &u, large, None).unwrap();
        for (i, p) in l.faulted_pages.iter().enumerate() {
            assert_eq!(
                p.id() as usize,
                i % (large + 1) + 1,
                "m={small} M={large} {u}"
            );
        }
    }
}

#[test]
fn published_prefix_variants_agree() {
    let full = published_disproof_prefix();
    let core: fifo_anomaly::ReferenceString = full.pages()[..29].iter().copied().collect();
    for capacity in [5, 6] {
        let a = simulate(Policy::Fifo, &core, capacity, None).unwrap();
        let b = simulate(Policy::Fifo, &full, capacity, None).unwrap();
        assert_eq!(a.fault_count(), b.fault_count());
        assert_eq!(a.final_state, b.final_state);
    }
}

#[test]
fn cyclic_block_from_warm_states() {
    for n in [5u32, 7, 9, 11, 13] {
        let v = cycle_block(n).unwrap();
        let small_warm = target_state(n).unwrap();
        let large_warm: Vec<Page> = (2..=n).map(page).collect();

        let s = simulate(Policy::Fifo, &v, n as usize - 2, Some(&small_warm)).unwrap();
        assert_eq!(s.fault_count(), n as usize);
        assert_eq!(s.final_state, small_warm);

        // The small memory faults on W, read cyclically.
        let w: Vec<u32> = build_w(n as i64)
            .unwrap()
            .values()
            .iter()
            .map(|&v| v as u32)
            .collect();
        let faulted: Vec<u32> = s.faulted_pages.iter().map(|p| p.id()).collect();
        let rotated = (0..w.len()).any(|r| {
            let mut rot = w.clone();
            rot.rotate_left(r);
            rot == faulted
        });
        assert!(rotated, "n={n}: {faulted:?} is not a rotation of {w:?}");

        let l = simulate(Policy::Fifo, &v, n as usize - 1, Some(&large_warm)).unwrap();
        assert_eq!(l.fault_count(), (n * (n - 1) / 2) as usize);
        assert_eq!(l.final_state, large_warm);
    }
}

#[test]
fn family_blocks_settle_after_the_first_pass() {
    for n in [5u32, 7, 9, 11, 13, 15] {
        let report = unbounded_family(n, 4).unwrap();
        let per_block = (n * (n - 1) / 2) as u64;
        let large_home: Vec<Page> = (2..=n).map(page).collect();
        assert_eq!(report.prefix_small_state, report.spec.target_state);
        assert_eq!(report.prefix_small_faults, report.prefix.len() as u64);

        for (i, pass) in report.passes.iter().enumerate() {
            assert_eq!(pass.small_faults, n as u64, "n={n} block {i}");
            assert_eq!(pass.small_state, report.spec.target_state);
            assert_eq!(pass.large_state, large_home, "n={n} block {i}");
            if i > 0 || report.prefix_large_state == large_home {
                assert_eq!(pass.large_faults, per_block, "n={n} block {i}");
            } else {
                assert!(pass.large_faults < per_block);
            }
        }

        let blocks: u64 = report.passes.iter().map(|p| p.large_faults).sum();
        assert_eq!(report.large_faults, report.prefix_large_faults + blocks);
        let blocks: u64 = report.passes.iter().map(|p| p.small_faults).sum();
        assert_eq!(report.small_faults, report.prefix_small_faults + blocks);
        assert_eq!(
            report.full_string.len(),
            report.prefix.len() + 4 * report.block.len()
        );
    }
    // In these geometries the prefix already lands the large memory at home.
    for n in [7u32, 13] {
        let report = unbounded_family(n, 1).unwrap();
        assert_eq!(
            report.prefix_large_state,
            (2..=n).map(page).collect::<Vec<_>>()
        );
    }
}

#[test]
fn family_ratio_converges_to_half_n_minus_one() {
    for n in [5u32, 7, 9, 11] {
        let one = unbounded_family(n, 1).unwrap();
        // ratio(k) = (a + k B - d)/(b + k n) with B = n(n-1)/2 and d the
        // first-block deficit, so |ratio(k) - B/n| = |a - d - b B/n| / (b + k n).
        let big_b = (n * (n - 1) / 2) as i64;
        let a = one.prefix_large_faults as i64;
        let b = one.prefix_small_faults as i64;
        let d = big_b - one.passes[0].large_faults as i64;
        let numer = (n as i64 * (a - d) - b * big_b).unsigned_abs();
        let limit = one.limit_ratio;

        let mut previous = None;
        for k in [1usize, 2, 5, 10, 50, 200] {
            let report = unbounded_family(n, k).unwrap();
            let ratio = report.ratio;
            let gap = if ratio > limit {
                ratio - limit
            } else {
                limit - ratio
            };
            let bound = Fraction::new(numer, n as u64 * (b as u64 + k as u64 * n as u64));
            assert_eq!(gap, bound, "n={n} k={k}");
            let c = Fraction::new(numer, n as u64 * n as u64);
            assert!(gap <= c / Fraction::from_integer(k as u64));
            if let Some(prev) = previous {
                assert!(ratio >= prev, "n={n}: not monotone at k={k}");
            }
            previous = Some(ratio);
        }
    }
}

#[test]
fn disproof_family_large_k() {
    let report = unbounded_family(7, 1000).unwrap();
    assert_eq!(report.large_faults, 14 + 21 * 1000);
    assert_eq!(report.small_faults, 29 + 7 * 1000);
    assert_eq!(
        Fraction::from_integer(3) - report.ratio,
        Fraction::new(73, 29 + 7 * 1000)
    );
}

#[test]
fn ratio_targets() {
    for (target, n) in [(1u64, 5u32), (2, 7), (5, 13), (10, 23)] {
        let target = Fraction::from_integer(target);
        let c = construct_for_ratio(target).unwrap();
        assert_eq!(c.n, n);
        assert_eq!((c.small, c.large), (n as usize - 2, n as usize - 1));
        assert!(c.ratio > target);
        let check = fifo_anomaly::anomaly_ratio(&c.refs, c.small, c.large, Policy::Fifo).unwrap();
        assert_eq!(check.ratio, c.ratio);
        if c.repeats > 1 {
            let fewer = unbounded_family(n, c.repeats - 1).unwrap();
            assert!(fewer.ratio <= target, "k is not minimal for {target}");
        }
    }
}

#[test]
fn ratio_target_two_uses_the_disproof_geometry() {
    let c = construct_for_ratio(Fraction::from_integer(2)).unwrap();
    assert_eq!(c.n, 7);
    // 161/78 at k = 7 already exceeds 2, so the minimal k is at most 7.
    assert!(c.repeats <= 7);
    let expected_len = 29 + c.repeats * 21;
    assert_eq!(c.refs.len(), expected_len);
}

#[test]
fn ratio_target_ten_string_length() {
    let c = construct_for_ratio(Fraction::from_integer(10)).unwrap();
    let prefix = anomaly_prefix(21, 22, &target_state(23).unwrap()).unwrap();
    assert_eq!(c.refs.len(), prefix.len() + c.repeats * 23 * 11);
}
