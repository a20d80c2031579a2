//! Brute-force enumerators shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

/// Fraction of `K`-subsets of `0..N` with at least `R` elements in every
/// full block of length `S`, by walking all `2^N` bitmasks.
pub fn enumerate_subset(n: u64, s: u64, k: u64, r: u64) -> BigRational {
    assert!(n <= 20);
    let blocks = n / s;
    let block_mask = |b: u64| ((1u64 << s) - 1) << (b * s);
    let mut good = 0i64;
    let mut total = 0i64;
    for mask in 0u64..(1 << n) {
        if mask.count_ones() as u64 != k {
            continue;
        }
        total += 1;
        if (0..blocks).all(|b| (mask & block_mask(b)).count_ones() as u64 >= r) {
            good += 1;
        }
    }
    BigRational::new(BigInt::from(good), BigInt::from(total))
}

/// Fraction of the `n^m` throw sequences leaving every bin with at least
/// `R` balls.
pub fn enumerate_bins(m: u64, n: u64, r: u64) -> BigRational {
    let total = n.pow(m as u32);
    let mut loads = vec![0u64; n as usize];
    let mut good = 0i64;
    for code in 0..total {
        loads.iter_mut().for_each(|l| *l = 0);
        let mut c = code;
        for _ in 0..m {
            loads[(c % n) as usize] += 1;
            c /= n;
        }
        if loads.iter().all(|&l| l >= r) {
            good += 1;
        }
    }
    BigRational::new(BigInt::from(good), BigInt::from(total as i64))
}

/// `prod_{i<b} (a - i)` with big integers.
pub fn falling_factorial(a: u64, b: u64) -> num_bigint::BigUint {
    (0..b).fold(num_bigint::BigUint::from(1u8), |acc, i| acc * (a - i))
}
