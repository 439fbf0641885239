//! Seeded random spinors and forms with small integer entries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{Blade, Form};
use crate::linalg::Spinor;
use crate::rational;

/// Default half-width of the sampling box.
pub const DEFAULT_BOX: i64 = 5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spinor<R: Rng>(rng: &mut R, d: usize, bound: i64) -> Spinor {
    Spinor((0..d).map(|_| rational::int(rng.gen_range(-bound..=bound))).collect())
}

/// A homogeneous form of grade `k`; each coefficient is zero with probability
/// `1 - density`.
pub fn form_of_grade<R: Rng>(rng: &mut R, n: usize, k: usize, bound: i64, density: f64) -> Form {
    let mut f = Form::zero(n);
    for b in Blade::of_grade(n, k) {
        if rng.gen_bool(density) {
            f.add_term(b, rational::int(rng.gen_range(-bound..=bound)));
        }
    }
    f
}

/// An arbitrary form with every grade populated at the given density.
pub fn form<R: Rng>(rng: &mut R, n: usize, bound: i64, density: f64) -> Form {
    let mut f = Form::zero(n);
    for b in Blade::all(n) {
        if rng.gen_bool(density) {
            f.add_term(b, rational::int(rng.gen_range(-bound..=bound)));
        }
    }
    f
}

/// A homogeneous form of a uniformly chosen grade.
pub fn homogeneous_form<R: Rng>(rng: &mut R, n: usize, bound: i64, density: f64) -> Form {
    let k = rng.gen_range(0..=n);
    form_of_grade(rng, n, k, bound, density)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a = spinor(&mut rng(7), 8, DEFAULT_BOX);
        let b = spinor(&mut rng(7), 8, DEFAULT_BOX);
        assert_eq!(a, b);
        let f = form_of_grade(&mut rng(1), 5, 2, 3, 1.0);
        assert_eq!(f.grades(), vec![2]);
    }
}
