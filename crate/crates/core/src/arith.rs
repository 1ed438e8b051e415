//! Exact integer and rational arithmetic plus the elementary multiplicative
//! functions everything else is built on.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a positive
/// denominator. Serialises as the string `"num/den"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Self {
        let den = denominator.into();
        assert!(!den.is_zero(), "zero denominator");
        Self::from_inner(BigRational::new(numerator.into(), den))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(value.into()))
    }

    fn from_inner(inner: BigRational) -> Self {
        debug_assert!(inner.denom().is_positive());
        debug_assert!(inner.numer().gcd(inner.denom()).is_one());
        Self(inner)
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The integer value, if the denominator is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    /// 2-adic valuation `v(num) - v(den)`.
    pub fn val2(&self) -> Result<i64> {
        val2(self)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|e| format!("bad integer {t:?}: {e}"))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err("zero denominator".into());
                }
                Ok(Self::new(parse(n)?, d))
            }
            None => Ok(Self::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational::from_inner($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational::from_inner($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl AddAssign<&ExactRational> for ExactRational {
    fn add_assign(&mut self, rhs: &ExactRational) {
        self.0 += &rhs.0;
        debug_assert!(self.0.numer().gcd(self.0.denom()).is_one());
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

/// 2-adic valuation of a nonzero rational, normalised by `v(2) = 1`.
pub fn val2(q: &ExactRational) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    Ok(val2_int(q.numerator()) as i64 - val2_int(q.denominator()) as i64)
}

/// Exponent of 2 in a nonzero integer.
pub fn val2_int(n: &BigInt) -> u64 {
    n.trailing_zeros().expect("val2_int of zero")
}

/// Kronecker symbol `(a/n)`, total on all integer pairs.
///
/// Uses `(a/-1) = -1` for `a < 0` and `1` otherwise, `(a/2)` from `a mod 8`,
/// and `(a/0) = 1` iff `a = +-1`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = if n < 0 && a < 0 { -1 } else { 1 };
    let mut m = n.unsigned_abs();
    let twos = m.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= twos;
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    let residue = (a as i128).rem_euclid(m as i128) as u64;
    result * jacobi(residue, m)
}

/// Jacobi symbol `(a/m)` for odd positive `m`.
pub fn jacobi(a: u64, m: u64) -> i8 {
    debug_assert!(m % 2 == 1);
    let mut a = a % m;
    let mut m = m;
    let mut t: i8 = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(m % 8, 3 | 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            t = -t;
        }
        a %= m;
    }
    if m == 1 {
        t
    } else {
        0
    }
}

/// Prime factorisation: `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn from_pairs(mut pairs: Vec<(u64, u32)>) -> Self {
        pairs.sort_unstable();
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        Factorization(pairs)
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    pub fn value(&self) -> u128 {
        self.0
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        primes_up_to(TRIAL_LIMIT)
            .into_iter()
            .map(|p| p as u32)
            .collect()
    })
}

/// Complete factorisation of `1 <= n < 2^63`: trial division by primes below
/// 10^6, then Miller–Rabin and Pollard rho on what remains.
pub fn factorize(n: u64) -> Factorization {
    assert!((1..(1 << 63)).contains(&n), "factorize: {n} out of range");
    let mut pairs = Vec::new();
    let mut m = n;
    for &p in small_primes() {
        let p = p as u64;
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
    }
    if m > 1 {
        if m < TRIAL_LIMIT * TRIAL_LIMIT || is_prime(m) {
            pairs.push((m, 1));
        } else {
            let mut large = Vec::new();
            split_large(m, &mut large);
            large.sort_unstable();
            for p in large {
                match pairs.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => pairs.push((p, 1)),
                }
            }
        }
    }
    Factorization::from_pairs(pairs)
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant; n is odd, composite and has no factor below 10^6.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Möbius function.
pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1);
    let f = factorize(n);
    if !f.is_squarefree() {
        0
    } else if f.pairs().len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n)
        .pairs()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Sieve of Eratosthenes over odd numbers; all primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // index i represents 2i + 1
    let size = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![false; size];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < size {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    std::iter::once(2)
        .chain((1..size).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1))
        .collect()
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_is_square_mod(a: i64, p: i64) -> bool {
        (0..p).any(|x| (x * x - a).rem_euclid(p) == 0)
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(5, 1), 1);
        assert_eq!(kronecker(5, 3), -1);
        assert_eq!(kronecker(12, 7), -1);
        assert!(!brute_is_square_mod(12, 7));
        assert_eq!(kronecker(5, 10), 0);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(5, 0), 0);
        assert_eq!(kronecker(i64::MIN, 3), kronecker(i64::MIN % 3, 3));
    }

    #[test]
    fn legendre_matches_residue_table() {
        for p in primes_up_to(100).into_iter().skip(1) {
            let p = p as i64;
            for a in -50i64..50 {
                let expected = if a.rem_euclid(p) == 0 {
                    0
                } else if brute_is_square_mod(a, p) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn quadratic_reciprocity_small_primes() {
        let odd: Vec<i64> = primes_up_to(200).into_iter().skip(1).map(|p| p as i64).collect();
        let star = |p: i64| if p % 4 == 1 { p } else { -p };
        for &p in &odd {
            for &q in &odd {
                if p != q {
                    assert_eq!(kronecker(star(p), q), kronecker(q, p), "p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn kronecker_periodic_in_n() {
        for m in (5..400i64).filter(|m| m % 4 == 0 || m % 4 == 1) {
            for a in -100..100 {
                assert_eq!(kronecker(m, a + m), kronecker(m, a), "m={m} a={a}");
            }
        }
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(4), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(6), 1);
    }

    #[test]
    fn phi_examples() {
        let brute = |n: u64| (1..=n).filter(|a| a.gcd(&n) == 1).count() as u64;
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(brute(28860), 6912);
        assert_eq!(euler_phi(28860), 6912);
        for n in 1..2000 {
            assert_eq!(euler_phi(n), brute(n));
        }
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).pairs().is_empty());
        assert_eq!(
            factorize(28860).pairs(),
            &[(2, 2), (3, 1), (5, 1), (13, 1), (37, 1)]
        );
        assert_eq!(factorize(65).pairs(), &[(5, 1), (13, 1)]);
        // two primes above the trial-division limit
        let (p, q) = (1_000_003u64, 1_000_033u64);
        assert_eq!(factorize(p * q).pairs(), &[(p, 1), (q, 1)]);
        assert_eq!(factorize(p * p * 7).pairs(), &[(7, 1), (p, 2)]);
        let big = 9_223_372_036_854_775_783u64; // largest prime below 2^63
        assert_eq!(factorize(big).pairs(), &[(big, 1)]);
    }

    #[test]
    fn val2_examples() {
        assert_eq!(val2(&ExactRational::from(240480)).unwrap(), 5);
        assert_eq!(val2(&ExactRational::from(1)).unwrap(), 0);
        assert_eq!(val2(&ExactRational::new(3, 8)).unwrap(), -3);
        assert_eq!(val2(&ExactRational::zero()), Err(Error::ValuationOfZero));
    }

    #[test]
    fn mobius_sums() {
        for d in 2..100_000u64 {
            let f = factorize(d);
            if !f.is_squarefree() {
                continue;
            }
            let primes: Vec<u64> = f.primes().collect();
            let (mut s0, mut s1, mut s2) = (0i64, 0i64, 0i64);
            for mask in 0u32..(1 << primes.len()) {
                let m: u64 = (0..primes.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| primes[i])
                    .product();
                let mu = mobius(m) as i64;
                s0 += mu;
                s1 += mu * (d / m) as i64;
                s2 += mu * m as i64;
            }
            assert_eq!(s0, 0);
            assert_eq!(s1, euler_phi(d) as i64);
            assert_eq!(s2, primes.iter().map(|&p| 1 - p as i64).product::<i64>());
        }
    }

    #[test]
    fn rational_display_and_parse() {
        let q = ExactRational::new(-6, 4);
        assert_eq!(q.to_string(), "-3/2");
        assert_eq!("-3/2".parse::<ExactRational>().unwrap(), q);
        assert_eq!("7".parse::<ExactRational>().unwrap(), ExactRational::from(7));
        assert_eq!(ExactRational::new(4, -2).to_string(), "-2/1");
        assert!("1/0".parse::<ExactRational>().is_err());
    }

    fn small_rational() -> impl Strategy<Value = ExactRational> {
        (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| ExactRational::new(n, d))
    }

    fn is_reduced(q: &ExactRational) -> bool {
        q.denominator().is_positive() && q.numerator().gcd(q.denominator()).is_one()
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative(m in -500i64..500, a in -300i64..300, b in -300i64..300) {
            prop_assert_eq!(kronecker(m, a * b), kronecker(m, a) * kronecker(m, b));
        }

        #[test]
        fn rational_field_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            for r in [&a + &b, &a - &b, &a * &c] {
                prop_assert!(is_reduced(&r));
            }
            if !b.is_zero() {
                prop_assert!(is_reduced(&(&a / &b)));
            }
        }

        #[test]
        fn factorize_product(n in 1u64..(1u64 << 62)) {
            let f = factorize(n);
            prop_assert_eq!(f.value(), n as u128);
            prop_assert!(f.primes().all(is_prime));
        }
    }
}
