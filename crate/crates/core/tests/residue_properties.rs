use fifo_anomaly::residue::{affine_image, build_w, is_complete_residue_system, window_is_crs};
use num_integer::Integer;
use proptest::prelude::*;

#[test]
fn w_is_complete_for_odd_moduli_up_to_99() {
    for n in (3..=99).step_by(2) {
        let w = build_w(n).unwrap();
        assert!(is_complete_residue_system(w.values(), n), "n = {n}");
        assert!(w.values().iter().all(|&v| (1..=n).contains(&v)));
    }
}

#[test]
fn every_window_of_w_powers_is_complete() {
    for n in (3..=31).step_by(2) {
        for k in 1..=4 {
            for start in 1..=(k * n as usize - n as usize + 1) {
                assert!(
                    window_is_crs(n, k, start).unwrap(),
                    "n={n} k={k} start={start}"
                );
            }
        }
    }
}

#[test]
fn w_powers_have_exact_period_n() {
    for n in (3..=31).step_by(2) {
        let s = build_w(n).unwrap().repeated(4);
        let n = n as usize;
        for j in 0..s.len() - n {
            assert_eq!(s[j + n], s[j]);
        }
    }
}

fn crs_strategy() -> impl Strategy<Value = (i64, Vec<i64>)> {
    (1i64..40).prop_flat_map(|n| {
        // Random representatives of each class, shuffled.
        let reps = prop::collection::vec(-5i64..5, n as usize).prop_map(move |shifts| {
            shifts
                .iter()
                .enumerate()
                .map(|(r, s)| r as i64 + s * n)
                .collect::<Vec<_>>()
        });
        (Just(n), reps.prop_shuffle())
    })
}

proptest! {
    #[test]
    fn affine_images_stay_complete((n, seq) in crs_strategy(), a in -200i64..200, d in -200i64..200) {
        prop_assume!(a.gcd(&n) == 1);
        prop_assert!(is_complete_residue_system(&seq, n));
        let image = affine_image(&seq, a, d, n).unwrap();
        prop_assert!(is_complete_residue_system(&image, n));
        prop_assert!(image.iter().all(|&v| (1..=n).contains(&v)));
    }
}
