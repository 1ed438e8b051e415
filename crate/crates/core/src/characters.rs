//! Fundamental discriminants, their prime-discriminant and d-factor
//! decompositions, and quadratic characters `chi_M = (M/.)`.

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith::{factorize, kronecker};
use crate::{Error, Result};

/// A fundamental discriminant of either sign together with its factorisation
/// into prime discriminants `p*`.
///
/// Entries are ordered by the underlying prime, so the even factor (if any)
/// comes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FundamentalDiscriminant {
    value: i64,
    primes: Vec<u64>,
    prime_discriminants: Vec<i64>,
}

impl FundamentalDiscriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value == 0 || value == 1 || !matches!(value.rem_euclid(4), 0 | 1) {
            return Err(Error::NotFundamental(value));
        }
        if value.unsigned_abs() >= 1 << 62 {
            return Err(Error::OutOfRange(value, "|disc| must be below 2^62"));
        }
        let abs = value.unsigned_abs();
        let core = if value % 4 == 0 {
            let m = value / 4;
            if !matches!(m.rem_euclid(4), 2 | 3) {
                return Err(Error::NotFundamental(value));
            }
            abs / 4
        } else {
            abs
        };
        let factors = factorize(core);
        if !factors.is_squarefree() {
            return Err(Error::NotFundamental(value));
        }
        let primes: Vec<u64> = if value % 4 == 0 && core % 2 == 1 {
            std::iter::once(2).chain(factors.primes()).collect()
        } else {
            factors.primes().collect()
        };
        Ok(Self::from_primes(value, primes))
    }

    // `primes` must be the sorted prime divisors of a fundamental `value`.
    pub(crate) fn from_primes(value: i64, primes: Vec<u64>) -> Self {
        let odd_product: i64 = primes
            .iter()
            .filter(|&&p| p != 2)
            .map(|&p| prime_discriminant(p))
            .product();
        let prime_discriminants = primes
            .iter()
            .map(|&p| {
                if p == 2 {
                    let two_star = value / odd_product;
                    assert!(
                        matches!(two_star, -8 | -4 | 4 | 8),
                        "2* = {two_star} for fundamental {value}"
                    );
                    two_star
                } else {
                    prime_discriminant(p)
                }
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(prime_discriminants.iter().product::<i64>(), value);
        FundamentalDiscriminant {
            value,
            primes,
            prime_discriminants,
        }
    }

    pub fn value(&self) -> i64 {
        self.value
    }

    /// Prime divisors, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `p*` for each prime divisor, aligned with [`primes`](Self::primes).
    pub fn prime_discriminants(&self) -> &[i64] {
        &self.prime_discriminants
    }

    /// Number of prime divisors `t`.
    pub fn t(&self) -> usize {
        self.primes.len()
    }

    pub fn is_even(&self) -> bool {
        self.value % 2 == 0
    }

    /// The even prime discriminant `2*`, if `2 | disc`.
    pub fn two_star(&self) -> Option<i64> {
        self.is_even().then(|| self.prime_discriminants[0])
    }

    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied().filter(|&p| p != 2)
    }

    /// Bitmask (over prime-discriminant indices) of the primes dividing `n`.
    pub(crate) fn mask_of(&self, n: u64) -> u32 {
        self.primes
            .iter()
            .enumerate()
            .filter(|&(_, &p)| n.is_multiple_of(p))
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

/// `p* = (-1/p) p` for an odd prime `p`.
pub fn prime_discriminant(p: u64) -> i64 {
    debug_assert!(p % 2 == 1);
    if p % 4 == 1 {
        p as i64
    } else {
        -(p as i64)
    }
}

/// A decomposition `D = d_1 ... d_n` into positive fundamental discriminants
/// with pairwise gcd 1 or 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DFactorization {
    factors: Vec<u64>,
    // bitmask over the parent's prime-discriminant indices
    masks: Vec<u32>,
}

impl DFactorization {
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Validated positive fundamental discriminant `D` of a real quadratic field,
/// with an optional admissible d-factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Discriminant {
    fundamental: FundamentalDiscriminant,
    d_factors: Option<DFactorization>,
}

impl Discriminant {
    /// `D >= 5` with its canonical d-factorization when one exists: each prime
    /// `p = 1 mod 4` is its own factor, and for even `D` the block `4l` with
    /// `l = 3 mod 4` is the first factor.
    pub fn new(value: u64) -> Result<Self> {
        if value < 5 {
            return Err(Error::OutOfRange(value as i64, "D must be at least 5"));
        }
        let fundamental = FundamentalDiscriminant::new(value as i64)?;
        let d_factors = canonical_d_factors(&fundamental)
            .map(|factors| DFactorization::build(&fundamental, factors).expect("canonical"));
        Ok(Discriminant {
            fundamental,
            d_factors,
        })
    }

    /// `D` with a caller-chosen d-factorization.
    pub fn with_factors(value: u64, factors: &[u64]) -> Result<Self> {
        let mut disc = Self::new(value)?;
        disc.d_factors = Some(DFactorization::build(&disc.fundamental, factors.to_vec())?);
        Ok(disc)
    }

    pub(crate) fn from_fundamental(fundamental: FundamentalDiscriminant) -> Self {
        let d_factors = canonical_d_factors(&fundamental)
            .map(|factors| DFactorization::build(&fundamental, factors).expect("canonical"));
        Discriminant {
            fundamental,
            d_factors,
        }
    }

    pub fn value(&self) -> u64 {
        self.fundamental.value as u64
    }

    pub fn fundamental(&self) -> &FundamentalDiscriminant {
        &self.fundamental
    }

    pub fn prime_discriminants(&self) -> &[i64] {
        self.fundamental.prime_discriminants()
    }

    pub fn primes(&self) -> &[u64] {
        self.fundamental.primes()
    }

    pub fn odd_primes(&self) -> Vec<u64> {
        self.fundamental.odd_primes().collect()
    }

    pub fn d_factorization(&self) -> Option<&DFactorization> {
        self.d_factors.as_ref()
    }

    pub fn d_factors(&self) -> Option<&[u64]> {
        self.d_factors.as_ref().map(|d| d.factors())
    }

    pub(crate) fn require_d_factors(&self) -> Result<&DFactorization> {
        self.d_factors
            .as_ref()
            .ok_or(Error::NoDFactorization(self.value()))
    }
}

impl Serialize for Discriminant {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Discriminant", 3)?;
        s.serialize_field("value", &self.value().to_string())?;
        let p_star: Vec<String> = self
            .prime_discriminants()
            .iter()
            .map(|p| p.to_string())
            .collect();
        s.serialize_field("p_star", &p_star)?;
        let d: Option<Vec<String>> = self
            .d_factors()
            .map(|d| d.iter().map(|x| x.to_string()).collect());
        s.serialize_field("d_factors", &d)?;
        s.end()
    }
}

fn canonical_d_factors(disc: &FundamentalDiscriminant) -> Option<Vec<u64>> {
    if disc.value <= 0 {
        return None;
    }
    let odd: Vec<u64> = disc.odd_primes().collect();
    match disc.two_star() {
        None => odd.iter().all(|p| p % 4 == 1).then_some(odd),
        Some(-4) => {
            let mut three_mod_four = odd.iter().filter(|&&p| p % 4 == 3);
            let ell = *three_mod_four.next()?;
            if three_mod_four.next().is_some() {
                return None;
            }
            let mut factors = vec![4 * ell];
            factors.extend(odd.iter().copied().filter(|&p| p != ell));
            Some(factors)
        }
        Some(_) => None,
    }
}

impl DFactorization {
    fn build(parent: &FundamentalDiscriminant, factors: Vec<u64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidFactorization(msg));
        if factors.is_empty() {
            return bad("no factors".into());
        }
        let mut product: u128 = 1;
        for &d in &factors {
            if d < 5 || FundamentalDiscriminant::new(d as i64).is_err() {
                return bad(format!("{d} is not a real quadratic fundamental discriminant"));
            }
            product *= d as u128;
        }
        for (i, &a) in factors.iter().enumerate() {
            for &b in &factors[i + 1..] {
                if !matches!(a.gcd(&b), 1 | 4) {
                    return bad(format!("gcd({a}, {b}) is not 1 or 4"));
                }
            }
        }
        if product != parent.value as u128 {
            return bad(format!("product of factors is not {}", parent.value));
        }
        let masks = factors.iter().map(|&d| parent.mask_of(d)).collect();
        Ok(DFactorization { factors, masks })
    }
}

/// Quadratic character `chi_M = (M/.)` for `M > 0`, `M = 0, 1 mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadChar {
    modulus: u64,
    conductor: u64,
}

impl QuadChar {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 || !matches!(modulus % 4, 0 | 1) || modulus >= 1 << 62 {
            return Err(Error::InvalidModulus(modulus as i64));
        }
        // conductor is the fundamental discriminant of Q(sqrt M), or 1 for squares
        let kernel: u64 = factorize(modulus)
            .pairs()
            .iter()
            .filter(|&&(_, e)| e % 2 == 1)
            .map(|&(p, _)| p)
            .product();
        let conductor = match kernel {
            1 => 1,
            k if k % 4 == 1 => k,
            k => 4 * k,
        };
        Ok(QuadChar { modulus, conductor })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.modulus == self.conductor
    }

    pub fn is_trivial(&self) -> bool {
        self.conductor == 1
    }

    pub fn eval(&self, a: i64) -> i8 {
        kronecker(self.modulus as i64, a)
    }
}

/// `chi_M(a)`.
pub fn chi(character: &QuadChar, a: i64) -> i8 {
    character.eval(a)
}

/// Fundamental discriminant of `E = Q(sqrt(-D))`.
///
/// This is `-4D` for odd `D`, `-D/4` when `D/4 = 3 mod 4`, and `-D` when
/// `D/4 = 2 mod 4`.
pub fn negative_counterpart(disc: &Discriminant) -> FundamentalDiscriminant {
    let d = disc.value() as i64;
    let value = if d % 2 == 1 {
        -4 * d
    } else if (d / 4) % 4 == 3 {
        -d / 4
    } else {
        -d
    };
    let odd: Vec<u64> = disc.odd_primes();
    let primes: Vec<u64> = if value % 2 == 0 {
        std::iter::once(2).chain(odd).collect()
    } else {
        odd
    };
    FundamentalDiscriminant::from_primes(value, primes)
}
