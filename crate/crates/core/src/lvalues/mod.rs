//! Generalized Bernoulli numbers and exact values of primitive and
//! imprimitive quadratic Dirichlet L-functions at `s = -1`.

pub mod charsum;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{binomial, kronecker, ExactRational};
use crate::characters::{Discriminant, QuadChar};
use crate::{Error, Result};

pub use charsum::CharacterSums;

/// Largest degree accepted by [`bernoulli_polynomial`].
pub const MAX_BERNOULLI_DEGREE: u32 = 20;

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: u32) -> Vec<ExactRational> {
    let mut b: Vec<ExactRational> = Vec::with_capacity(n as usize + 1);
    b.push(ExactRational::from(1));
    for m in 1..=n as u64 {
        // sum_{k<=m} C(m+1, k) B_k = 0
        let s: ExactRational = (0..m)
            .map(|k| &ExactRational::from(binomial(m + 1, k)) * &b[k as usize])
            .sum();
        b.push(-(s / ExactRational::from(binomial(m + 1, m))));
    }
    b
}

/// `B_n(X)`, coefficients in ascending powers of `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliPolynomial {
    coefficients: Vec<ExactRational>,
}

impl BernoulliPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coefficients
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coefficients
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn derivative(&self) -> Vec<ExactRational> {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| &ExactRational::from(k as i64) * c)
            .collect()
    }
}

/// `B_n(X) = sum_k C(n, k) B_k X^(n-k)`.
pub fn bernoulli_polynomial(n: u32) -> Result<BernoulliPolynomial> {
    if n > MAX_BERNOULLI_DEGREE {
        return Err(Error::OutOfRange(n as i64, "Bernoulli degree at most 20"));
    }
    let b = bernoulli_numbers(n);
    let mut coefficients = vec![ExactRational::zero(); n as usize + 1];
    for (k, bk) in b.iter().enumerate() {
        let c = &ExactRational::from(binomial(n as u64, k as u64)) * bk;
        coefficients[n as usize - k] = c;
    }
    Ok(BernoulliPolynomial { coefficients })
}

fn check_multiple(character: &QuadChar, g: u64) -> Result<()> {
    if g == 0 || !g.is_multiple_of(character.modulus()) {
        return Err(Error::ConductorMismatch);
    }
    Ok(())
}

/// `B_{n,chi} = g^(n-1) sum_{a=1}^{g} chi(a) B_n(a/g)`, evaluated through the
/// power sums `S_j = sum chi(a) a^j`.
///
/// `g` must be a multiple of the character's modulus (its conductor when the
/// character is primitive).
pub fn generalized_bernoulli(n: u32, character: &QuadChar, g: u64) -> Result<ExactRational> {
    check_multiple(character, g)?;
    let poly = bernoulli_polynomial(n)?;
    let mut power_sums = vec![BigInt::zero(); n as usize + 1];
    for a in 1..=g {
        let c = character.eval(a as i64);
        if c == 0 {
            continue;
        }
        let mut pow = BigInt::one();
        for s in power_sums.iter_mut() {
            if c > 0 {
                *s += &pow;
            } else {
                *s -= &pow;
            }
            pow *= a;
        }
    }
    // g^(n-1) sum_a chi(a) sum_j c_j (a/g)^j = sum_j c_j S_j g^(n-1-j)
    let g_big = BigInt::from(g);
    let mut total = ExactRational::zero();
    for (j, c) in poly.coefficients().iter().enumerate() {
        let exp = n as i64 - 1 - j as i64;
        let scale = if exp >= 0 {
            ExactRational::from(num_traits::pow(g_big.clone(), exp as usize))
        } else {
            ExactRational::new(1, num_traits::pow(g_big.clone(), (-exp) as usize))
        };
        total += &(&(c * &ExactRational::from(power_sums[j].clone())) * &scale);
    }
    Ok(total)
}

/// `B_{2,chi} = (1/g) sum_{a=1}^{g} chi(a) a^2` for nontrivial even `chi`.
pub fn b2_chi(character: &QuadChar, g: u64) -> Result<ExactRational> {
    if character.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    check_multiple(character, g)?;
    let mut s = BigInt::zero();
    for a in 1..=g {
        match character.eval(a as i64) {
            1 => s += a as u128 * a as u128,
            -1 => s -= a as u128 * a as u128,
            _ => {}
        }
    }
    Ok(ExactRational::new(s, g))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LValue {
    pub value: ExactRational,
    #[serde(serialize_with = "as_string")]
    pub character_modulus: u64,
    /// `g`: primes dividing it are removed from the Euler product.
    #[serde(serialize_with = "as_string")]
    pub excluded_modulus: u64,
    pub s_point: i64,
}

fn as_string<S: serde::Serializer>(v: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `L(chi, -1) = -B_{2,chi}/2` for a primitive nontrivial character.
pub fn l_at_minus1(character: &QuadChar) -> Result<LValue> {
    if character.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    if !character.is_primitive() {
        return Err(Error::ImprimitiveCharacter);
    }
    let disc = crate::characters::FundamentalDiscriminant::new(character.modulus() as i64)?;
    let sums = CharacterSums::compute(&disc)?;
    let full = (1u32 << disc.t()) - 1;
    Ok(LValue {
        value: minus_half_over(sums.twisted_sum(full), character.modulus()),
        character_modulus: character.modulus(),
        excluded_modulus: character.modulus(),
        s_point: -1,
    })
}

/// `L(chi_D, -1)` for a validated discriminant.
pub fn l_value(disc: &Discriminant) -> Result<ExactRational> {
    Ok(l_at_minus1(&QuadChar::new(disc.value())?)?.value)
}

// -(1/2m) * s
fn minus_half_over(s: BigInt, m: u64) -> ExactRational {
    ExactRational::new(-s, BigInt::from(2u64) * m)
}

/// Mask (over `D`'s prime discriminants) of a non-empty subset product of its
/// d-factors.
pub(crate) fn subfactor_mask(d: u64, disc: &Discriminant) -> Result<u32> {
    let factors = disc.require_d_factors()?;
    let n = factors.len();
    if n > 20 {
        return Err(Error::TooManyFactors(n));
    }
    (1u32..1 << n)
        .find(|subset| {
            (0..n)
                .filter(|i| subset >> i & 1 == 1)
                .map(|i| factors.factors()[i] as u128)
                .product::<u128>()
                == d as u128
        })
        .map(|subset| {
            (0..n)
                .filter(|i| subset >> i & 1 == 1)
                .fold(0, |m, i| m | factors.masks()[i])
        })
        .ok_or(Error::InvalidSubfactor(d))
}

/// `L^(D)(chi_d, -1)` from precomputed sums: `-(1/2D) sum chi_{Dd'}(a) a^2`.
pub fn imprimitive_from_sums(sums: &CharacterSums, component_mask: u32) -> ExactRational {
    minus_half_over(sums.twisted_sum(component_mask), sums.modulus())
}

/// `L^(D)(chi_d, -1) = -(1/2D) sum_{a=1}^{D} chi_{Dd'}(a) a^2`, `d' = D/d`,
/// as one character sum over `1..D`.
pub fn l_imprimitive_direct(d: u64, disc: &Discriminant) -> Result<LValue> {
    let mask = subfactor_mask(d, disc)?;
    let sums = CharacterSums::compute(disc.fundamental())?;
    Ok(LValue {
        value: imprimitive_from_sums(&sums, mask),
        character_modulus: d,
        excluded_modulus: disc.value(),
        s_point: -1,
    })
}

/// `L^(D)(chi_d, -1) = prod_{p | D, p not dividing d} (1 - chi_d(p) p) * L(chi_d, -1)`.
pub fn l_imprimitive_euler(d: u64, disc: &Discriminant) -> Result<LValue> {
    subfactor_mask(d, disc)?;
    let primitive = l_at_minus1(&QuadChar::new(d)?)?.value;
    let euler: BigInt = disc
        .primes()
        .iter()
        .filter(|&&p| !d.is_multiple_of(p))
        .map(|&p| BigInt::from(1 - kronecker(d as i64, p as i64) as i64 * p as i64))
        .product();
    Ok(LValue {
        value: &ExactRational::from(euler) * &primitive,
        character_modulus: d,
        excluded_modulus: disc.value(),
        s_point: -1,
    })
}

/// `G = {1 <= a <= D : chi_{d_i}(a) = 1 for every i}`, ascending.
pub fn g_set(disc: &Discriminant) -> Result<Vec<u64>> {
    let factors = disc.require_d_factors()?.factors().to_vec();
    let d = disc.value();
    Ok((1..=d)
        .filter(|&a| a.gcd(&d) == 1)
        .filter(|&a| factors.iter().all(|&f| kronecker(f as i64, a as i64) == 1))
        .collect())
}
