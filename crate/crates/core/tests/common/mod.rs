#![allow(dead_code)]

use rand::Rng;
use tangentcat::polycore::ratio;
use tangentcat::{ChristoffelTable, Polynomial, Rational};

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

/// A sparse polynomial in `n` variables of total degree at most `deg`.
pub fn random_poly(rng: &mut impl Rng, n: usize, deg: u32) -> Polynomial {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let mut exps = vec![0u32; n];
        let mut left = rng.gen_range(0..=deg);
        while left > 0 {
            exps[rng.gen_range(0..n)] += 1;
            left -= 1;
        }
        terms.push((exps, small_rational(rng)));
    }
    Polynomial::from_terms(n, terms).expect("arity")
}

/// Christoffel symbols with polynomial entries of degree at most `deg`.
pub fn random_table(rng: &mut impl Rng, n: usize, deg: u32) -> ChristoffelTable {
    let rows = (0..n)
        .map(|_| (0..n * n).map(|_| random_poly(rng, n, deg)).collect())
        .collect();
    ChristoffelTable::new(n, rows).expect("table shape")
}

pub fn random_point(rng: &mut impl Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| small_rational(rng)).collect()
}
