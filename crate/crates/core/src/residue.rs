//! Complete residue systems and the half-step sequence `W`.
//!
//! Representatives are always taken in `[1, n]`, so residue 0 is written as
//! `n`. This lets the values double as page ids.

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("modulus must be an odd integer >= 3, got {0}")]
    InvalidModulus(i64),
    #[error("multiplier {a} is not coprime to modulus {n}")]
    NotCoprime { a: i64, n: i64 },
    #[error("window starting at {start} does not fit in {len} elements (window size {n})")]
    WindowOutOfRange { start: usize, len: usize, n: usize },
}

/// `x mod n` as a representative in `[1, n]`.
pub fn representative(x: i64, n: i64) -> i64 {
    let r = x.rem_euclid(n);
    if r == 0 {
        n
    } else {
        r
    }
}

/// True iff `seq` has exactly `n` elements with pairwise distinct residues.
pub fn is_complete_residue_system(seq: &[i64], n: i64) -> bool {
    if n <= 0 || seq.len() as i64 != n {
        return false;
    }
    let mut seen = vec![false; n as usize];
    for &x in seq {
        let r = x.rem_euclid(n) as usize;
        if std::mem::replace(&mut seen[r], true) {
            return false;
        }
    }
    true
}

/// Element-wise `a * c + d`, reduced into `[1, n]`. Requires `gcd(a, n) = 1`.
pub fn affine_image(seq: &[i64], a: i64, d: i64, n: i64) -> Result<Vec<i64>, ResidueError> {
    if n <= 0 {
        return Err(ResidueError::InvalidModulus(n));
    }
    if a.gcd(&n) != 1 {
        return Err(ResidueError::NotCoprime { a, n });
    }
    let (a, d) = (a.rem_euclid(n), d.rem_euclid(n));
    Ok(seq
        .iter()
        .map(|&c| {
            let c = c.rem_euclid(n);
            representative(((a as i128 * c as i128 + d as i128) % n as i128) as i64, n)
        })
        .collect())
}

/// An ordered run of representatives in `[1, n]` for an odd modulus `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSequence {
    values: Vec<i64>,
    modulus: i64,
}

impl ResidueSequence {
    /// `W = (w_1, ..., w_n)` with `w_i = 1 + (i - 1)(n - 1)/2 (mod n)`.
    ///
    /// Stepping by `(n - 1)/2`, which is coprime to odd `n`, visits every
    /// residue once.
    pub fn half_step(n: i64) -> Result<Self, ResidueError> {
        if n < 3 || n % 2 == 0 {
            return Err(ResidueError::InvalidModulus(n));
        }
        let step = (n - 1) / 2;
        let values = (0..n).map(|i| representative(1 + i * step, n)).collect();
        Ok(Self { values, modulus: n })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// `W^k = s_1, ..., s_{kn}`.
    pub fn repeated(&self, k: usize) -> Vec<i64> {
        self.values.repeat(k)
    }

    /// Whether the `n` elements of `W^k` starting at 1-based `start` form a
    /// complete residue system.
    pub fn window_is_crs(&self, k: usize, start: usize) -> Result<bool, ResidueError> {
        let n = self.modulus as usize;
        let seq = self.repeated(k);
        if start == 0 || start + n - 1 > seq.len() {
            return Err(ResidueError::WindowOutOfRange {
                start,
                len: seq.len(),
                n,
            });
        }
        Ok(is_complete_residue_system(
            &seq[start - 1..start - 1 + n],
            self.modulus,
        ))
    }
}

/// `W` for odd `n >= 3`.
pub fn build_w(n: i64) -> Result<ResidueSequence, ResidueError> {
    ResidueSequence::half_step(n)
}

/// [`ResidueSequence::window_is_crs`] on `build_w(n)`.
pub fn window_is_crs(n: i64, k: usize, start: usize) -> Result<bool, ResidueError> {
    build_w(n)?.window_is_crs(k, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the defining formula, without the helper.
    fn formula(n: i64) -> Vec<i64> {
        (1..=n)
            .map(|i| {
                let r = (1 + (i - 1) * (n - 1) / 2) % n;
                if r == 0 {
                    n
                } else {
                    r
                }
            })
            .collect()
    }

    #[test]
    fn w_small_cases() {
        assert_eq!(formula(3), vec![1, 2, 3]);
        assert_eq!(formula(5), vec![1, 3, 5, 2, 4]);
        assert_eq!(formula(7), vec![1, 4, 7, 3, 6, 2, 5]);
        for n in [3, 5, 7] {
            assert_eq!(build_w(n).unwrap().values(), formula(n).as_slice());
        }
        assert_eq!(&build_w(7).unwrap().values()[2..], &[7, 3, 6, 2, 5]);
    }

    #[test]
    fn w_rejects_bad_modulus() {
        for n in [-3, 0, 1, 2, 4, 10] {
            assert_eq!(build_w(n), Err(ResidueError::InvalidModulus(n)));
        }
    }

    #[test]
    fn crs_examples() {
        let id: Vec<i64> = (1..=6).collect();
        assert!(is_complete_residue_system(&id, 6));
        assert!(!is_complete_residue_system(&[1, 1, 3], 3));
        assert!(!is_complete_residue_system(&[1, 2], 3));
        assert!(is_complete_residue_system(&[0, -1, 7], 3));
        assert!(is_complete_residue_system(build_w(9).unwrap().values(), 9));
    }

    #[test]
    fn affine_examples() {
        let base = [1, 2, 3, 4, 5];
        assert_eq!(affine_image(&base, 1, 0, 5).unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(affine_image(&base, 2, 0, 5).unwrap(), vec![2, 4, 1, 3, 5]);
        assert_eq!(affine_image(&[1, 2, 3], 2, 1, 3).unwrap(), vec![3, 2, 1]);
        assert_eq!(
            affine_image(&base, 5, 1, 5),
            Err(ResidueError::NotCoprime { a: 5, n: 5 })
        );
        assert_eq!(affine_image(&[1, 2, 3], -1, -4, 3).unwrap(), vec![1, 3, 2]);
    }

    #[test]
    fn window_examples() {
        assert!(window_is_crs(7, 3, 1).unwrap());
        assert!(window_is_crs(7, 3, 5).unwrap());
        assert!(window_is_crs(5, 2, 6).unwrap());
        assert!(window_is_crs(5, 2, 7).is_err());
        assert!(window_is_crs(5, 2, 0).is_err());
    }
}
