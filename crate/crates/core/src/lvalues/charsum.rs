//! Exact weighted character sums `sum_{a <= D, (a, D) = 1} chi(a) a^2` for
//! every character built from the prime-discriminant components of `D`, in a
//! single pass over `1..D`.
//!
//! Each unit `a` has a sign pattern: bit `i` is set when `chi_{p*_i}(a) = -1`.
//! The pass accumulates `a^2` into one bucket per pattern. Any product of
//! components is then a signed combination of the buckets.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::kronecker;
use crate::characters::FundamentalDiscriminant;
use crate::{Error, Result};

/// Largest modulus handled by the engine. Keeps every per-chunk bucket inside
/// 128 bits (chunk length times `D^2` is below `2^21 * 2^80`).
pub const MAX_MODULUS: u64 = 1 << 40;

const CHUNK: u64 = 1 << 20;
// a group table is merged from several components while its modulus stays small
const GROUP_LIMIT: u64 = 1 << 16;
const ZERO: u32 = 1 << 31;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSums {
    modulus: u64,
    buckets: Vec<BigInt>,
}

struct GroupTable {
    modulus: u64,
    patterns: Vec<u32>,
}

/// Residue table of `chi_{p*}` on `0..|p*|`.
fn component_table(p_star: i64) -> Vec<i8> {
    let q = p_star.unsigned_abs();
    if q <= 8 {
        return (0..q as i64).map(|r| kronecker(p_star, r)).collect();
    }
    // p* = +-p, p odd: chi_{p*}(a) = (a/p), marked off by squaring
    let mut table = vec![-1i8; q as usize];
    table[0] = 0;
    for x in 1..=q / 2 {
        table[(x * x % q) as usize] = 1;
    }
    table
}

fn group_tables(disc: &FundamentalDiscriminant) -> Vec<GroupTable> {
    let mut comps: Vec<(usize, i64)> = disc.prime_discriminants().iter().copied().enumerate().collect();
    comps.sort_by_key(|&(_, p)| p.unsigned_abs());
    let mut groups: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut current: Vec<(usize, i64)> = Vec::new();
    let mut modulus = 1u64;
    for c in comps {
        let q = c.1.unsigned_abs();
        if !current.is_empty() && modulus * q > GROUP_LIMIT {
            groups.push(std::mem::take(&mut current));
            modulus = 1;
        }
        modulus *= q;
        current.push(c);
    }
    if !current.is_empty() {
        groups.push(current);
    }
    groups
        .into_iter()
        .map(|members| {
            let tables: Vec<(usize, u64, Vec<i8>)> = members
                .iter()
                .map(|&(i, p)| (i, p.unsigned_abs(), component_table(p)))
                .collect();
            let modulus: u64 = tables.iter().map(|t| t.1).product();
            let patterns = (0..modulus)
                .map(|r| {
                    tables.iter().fold(0u32, |pat, (i, q, t)| match t[(r % q) as usize] {
                        0 => pat | ZERO,
                        -1 => pat | 1 << i,
                        _ => pat,
                    })
                })
                .collect();
            GroupTable { modulus, patterns }
        })
        .collect()
}

impl CharacterSums {
    pub fn compute(disc: &FundamentalDiscriminant) -> Result<Self> {
        let modulus = disc.value().unsigned_abs();
        if modulus >= MAX_MODULUS {
            return Err(Error::OutOfRange(disc.value(), "character sums need |D| < 2^40"));
        }
        let t = disc.t();
        let groups = group_tables(disc);
        // chi_{p*}(-1) = sign(p*), so pattern(D - a) = pattern(a) ^ odd
        let odd: u32 = disc
            .prime_discriminants()
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p < 0)
            .fold(0, |m, (i, _)| m | 1 << i);
        let half = (modulus - 1) / 2;
        let chunks = half.div_ceil(CHUNK);
        let partials: Vec<Vec<u128>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = 1 + c * CHUNK;
                let hi = (lo + CHUNK - 1).min(half);
                sum_range(&groups, t, odd, modulus, lo, hi)
            })
            .collect();
        let mut buckets = vec![BigInt::zero(); 1 << t];
        for part in partials {
            for (b, v) in buckets.iter_mut().zip(part) {
                if v != 0 {
                    *b += v;
                }
            }
        }
        Ok(CharacterSums { modulus, buckets })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `sum_{a <= D, (a,D)=1} (prod_{i in mask} chi_{p*_i}(a)) a^2`.
    pub fn twisted_sum(&self, mask: u32) -> BigInt {
        let mut total = BigInt::zero();
        for (pattern, b) in self.buckets.iter().enumerate() {
            if (pattern as u32 & mask).count_ones().is_multiple_of(2) {
                total += b;
            } else {
                total -= b;
            }
        }
        total
    }

    /// Sum of `a^2` over units `a` with `chi_block(a) = +1` for every block
    /// mask (each block is the product of its components).
    pub fn all_plus_sum(&self, blocks: &[u32]) -> BigInt {
        let mut total = BigInt::zero();
        for (pattern, b) in self.buckets.iter().enumerate() {
            if blocks
                .iter()
                .all(|&m| (pattern as u32 & m).count_ones().is_multiple_of(2))
            {
                total += b;
            }
        }
        total
    }
}

fn sum_range(groups: &[GroupTable], t: usize, odd: u32, modulus: u64, lo: u64, hi: u64) -> Vec<u128> {
    let mut buckets = vec![0u128; 1 << t];
    if lo > hi {
        return buckets;
    }
    let mut residues: Vec<u64> = groups.iter().map(|g| lo % g.modulus).collect();
    for a in lo..=hi {
        let mut pattern = 0u32;
        for (g, r) in groups.iter().zip(residues.iter_mut()) {
            pattern |= g.patterns[*r as usize];
            *r += 1;
            if *r == g.modulus {
                *r = 0;
            }
        }
        if pattern & ZERO == 0 {
            let b = modulus - a;
            buckets[pattern as usize] += a as u128 * a as u128;
            buckets[(pattern ^ odd) as usize] += b as u128 * b as u128;
        }
    }
    buckets
}
