//! Redei matrices over GF(2), 2-rank and 4-rank of class groups, the norm
//! tests for `-1` and for the prime above 2, and the rank relations for
//! `K_2 O_F`.

pub mod forms;

use serde::Serialize;

use crate::arith::{isqrt, kronecker};
use crate::characters::{negative_counterpart, Discriminant, FundamentalDiscriminant};
use crate::{Error, Result};

pub use forms::{form_class_group, FormClassGroup};

/// `t x t` matrix over GF(2), one bit-packed `u64` per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedeiMatrix {
    t: usize,
    rows: Vec<u64>,
}

impl RedeiMatrix {
    pub fn from_rows(t: usize, rows: Vec<u64>) -> Self {
        assert!(t <= 64 && rows.len() == t);
        RedeiMatrix { t, rows }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        (self.rows[i] >> j & 1) as u8
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.t)
            .map(|i| (0..self.t).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn column_sums_vanish(&self) -> bool {
        self.rows.iter().fold(0, |acc, r| acc ^ r) == 0
    }
}

impl Serialize for RedeiMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Redei matrix of a fundamental discriminant: `r_ij = (1 - (p*_i / p_j))/2`
/// off the diagonal and `r_kk = sum_{i != k} r_ik`.
pub fn redei_matrix(disc: i64) -> Result<RedeiMatrix> {
    Ok(redei_of(&FundamentalDiscriminant::new(disc)?))
}

pub fn redei_of(disc: &FundamentalDiscriminant) -> RedeiMatrix {
    let t = disc.t();
    let p_star = disc.prime_discriminants();
    let primes = disc.primes();
    let mut rows = vec![0u64; t];
    for i in 0..t {
        for j in 0..t {
            if i != j && kronecker(p_star[i], primes[j] as i64) == -1 {
                rows[i] |= 1 << j;
            }
        }
    }
    let column_parity = rows.iter().fold(0, |acc, r| acc ^ r);
    for (k, row) in rows.iter_mut().enumerate() {
        *row |= column_parity & 1 << k;
    }
    RedeiMatrix { t, rows }
}

/// Rank over GF(2).
pub fn gf2_rank(m: &RedeiMatrix) -> usize {
    let mut rows = m.rows.clone();
    let mut rank = 0;
    for col in 0..m.t {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> col & 1 == 1 {
                *row ^= p;
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub t: usize,
    pub redei_rank: usize,
    pub r2_narrow: usize,
    pub r4_narrow: usize,
    pub minus_one_norm: bool,
    pub r2_ordinary: Option<usize>,
    pub r4_ordinary_zero: Option<bool>,
}

/// Narrow 2- and 4-ranks from genus theory and the Redei rank. For imaginary
/// fields the narrow and ordinary groups coincide.
pub fn narrow_ranks(disc: i64) -> Result<RankReport> {
    Ok(ranks_of(&FundamentalDiscriminant::new(disc)?))
}

pub fn ranks_of(disc: &FundamentalDiscriminant) -> RankReport {
    let t = disc.t();
    let redei_rank = gf2_rank(&redei_of(disc));
    let r4_narrow = t - 1 - redei_rank;
    let (minus_one_norm, r2_ordinary, r4_ordinary_zero) = if disc.value() < 0 {
        (false, Some(t - 1), Some(r4_narrow == 0))
    } else {
        let norm = minus_one_norm_of(disc);
        if r4_narrow == 0 {
            (norm, Some(if norm { t - 1 } else { t - 2 }), Some(true))
        } else {
            (norm, None, None)
        }
    };
    RankReport {
        t,
        redei_rank,
        r2_narrow: t - 1,
        r4_narrow,
        minus_one_norm,
        r2_ordinary,
        r4_ordinary_zero,
    }
}

fn minus_one_norm_of(disc: &FundamentalDiscriminant) -> bool {
    // Hilbert symbols (-1, D)_p are trivial at every odd p | D exactly when
    // p = 1 mod 4; the place 2 follows from the product formula
    disc.value() > 0 && disc.odd_primes().all(|p| p % 4 == 1)
}

/// Whether `-1` is a norm from `Q(sqrt D)`, i.e. `x^2 - D y^2 = -z^2` has a
/// nontrivial integer solution.
pub fn minus_one_is_norm(disc: &Discriminant) -> bool {
    minus_one_norm_of(disc.fundamental())
}

/// `r_2(C_F)`: `t - 1` if `-1` is a norm, else `t - 2`. Needs `r_4(C_F) = 0`.
pub fn ordinary_r2(disc: &Discriminant, r4_zero: bool) -> Result<usize> {
    if !r4_zero {
        return Err(Error::Rank4Hypothesis);
    }
    let t = disc.fundamental().t();
    Ok(if minus_one_is_norm(disc) { t - 1 } else { t - 2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeAboveTwo {
    pub splitting: Splitting,
    /// Number of primes above 2.
    pub s: usize,
    /// Whether a prime above 2 is principal (`None` when 2 is inert).
    pub principal: Option<bool>,
}

/// Splitting of 2 in `Q(sqrt D)` and principality of a prime above it.
pub fn prime_above_2(disc: &Discriminant) -> PrimeAboveTwo {
    let d = disc.value();
    let (splitting, s) = match d % 8 {
        1 => (Splitting::Split, 2),
        5 => (Splitting::Inert, 1),
        _ => (Splitting::Ramified, 1),
    };
    let principal = (splitting != Splitting::Inert).then(|| has_element_of_norm_2(d));
    PrimeAboveTwo { splitting, s, principal }
}

/// Whether the order of discriminant `d` has an element of norm `+-2`.
///
/// Elements of norm `N` with `|N| < sqrt(d)/2` are associated to convergents
/// of `w = (s + sqrt d)/2`, whose norms are `+-Q_k/2` in the expansion
/// `(P_k + sqrt d)/Q_k` started from `P_0 = s`, `Q_0 = 2`.
fn has_element_of_norm_2(d: u64) -> bool {
    if d <= 16 {
        // d = 8, 12: 2^2 - 2 = 2, 1 - 3 = -2; 2 is inert for 5 and 13
        return small_norm_search(d);
    }
    let root = isqrt(d) as i64;
    let d = d as i64;
    let (mut p, mut q) = (d % 2, 2i64);
    let mut seen = std::collections::HashSet::new();
    loop {
        let a = (p + root) / q;
        p = a * q - p;
        q = (d - p * p) / q;
        if q == 4 {
            return true;
        }
        if !seen.insert((p, q)) {
            return false;
        }
    }
}

fn small_norm_search(d: u64) -> bool {
    // x^2 - d y^2 = +-8 with x = d y mod 2
    let d = d as i64;
    (1..50i64).any(|y| {
        (0..50 * y + 10).any(|x| (x - d * y) % 2 == 0 && (x * x - d * y * y).abs() == 8)
    })
}

/// `r_2(K_2 O_F) = 1 + r_2(C_{F,S}) + s`.
pub fn r2_k2(disc: &Discriminant) -> Result<usize> {
    let report = ranks_of(disc.fundamental());
    if report.r4_narrow != 0 {
        return Err(Error::IndeterminateSClassRank);
    }
    let r2_class = ordinary_r2(disc, true)?;
    let two = prime_above_2(disc);
    let r2_s = match (two.splitting, two.principal) {
        (Splitting::Inert, _) | (_, Some(true)) => r2_class,
        // [p] has order 2 and is not a square since C_F(2) is elementary
        (Splitting::Ramified, Some(false)) => r2_class
            .checked_sub(1)
            .ok_or_else(|| Error::Consistency(format!("non-principal prime above 2 with r2(C_F) = 0 for {}", disc.value())))?,
        _ => return Err(Error::IndeterminateSClassRank),
    };
    Ok(1 + r2_s + two.s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct R4Bound {
    pub r4_ce: usize,
    pub bound_low: usize,
    pub bound_high: usize,
}

/// `|r_4(K_2 O_F) - r_4(C_E)| <= 1` with `E = Q(sqrt(-D))`.
pub fn r4_k2_bound(disc: &Discriminant) -> R4Bound {
    let e = negative_counterpart(disc);
    let r4_ce = ranks_of(&e).r4_narrow;
    R4Bound {
        r4_ce,
        bound_low: r4_ce.saturating_sub(1),
        bound_high: r4_ce + 1,
    }
}
