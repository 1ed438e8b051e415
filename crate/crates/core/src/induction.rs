//! The subset-sum identity for imprimitive values, the congruences on sums of
//! squares over `G`, and classification of `D` into the families whose
//! 2-adic valuations are predicted.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::arith::{euler_phi, kronecker, ExactRational};
use crate::characters::Discriminant;
use crate::lvalues::{imprimitive_from_sums, CharacterSums};
use crate::{Error, Result};

/// Largest number of d-factors accepted by subset enumeration.
pub const MAX_FACTORS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    /// Sum of `L^(D)(chi_d, -1)` over all subset products `d != 1`.
    pub lhs: ExactRational,
    /// `-(2^(n-1)/D) sum_{a in G} a^2`, `D phi(D)/6`, `prod_{p | D}(1 - p)/12`.
    pub rhs_terms: [ExactRational; 3],
    pub equal: bool,
}

/// Checks the subset-sum identity for `D` and its d-factorization.
pub fn verify_identity(disc: &Discriminant) -> Result<IdentityReport> {
    let sums = CharacterSums::compute(disc.fundamental())?;
    verify_identity_with(disc, &sums)
}

/// [`verify_identity`] with precomputed sums for `D`.
pub fn verify_identity_with(disc: &Discriminant, sums: &CharacterSums) -> Result<IdentityReport> {
    let factors = disc.require_d_factors()?;
    let n = factors.len();
    if n > MAX_FACTORS {
        return Err(Error::TooManyFactors(n));
    }
    let masks = factors.masks();
    let mut lhs = ExactRational::zero();
    for subset in 1u32..1 << n {
        let mask = (0..n)
            .filter(|i| subset >> i & 1 == 1)
            .fold(0, |m, i| m | masks[i]);
        lhs += &imprimitive_from_sums(sums, mask);
    }
    let d = disc.value();
    let g_sum = sums.all_plus_sum(masks);
    let g_term = ExactRational::new(-(BigInt::from(1u64 << (n - 1)) * g_sum), d);
    let phi_term = ExactRational::new(BigInt::from(d) * euler_phi(d), 6);
    let euler: BigInt = disc.primes().iter().map(|&p| BigInt::from(1 - p as i64)).product();
    let euler_term = ExactRational::new(euler, 12);
    let rhs = &(&g_term + &phi_term) + &euler_term;
    Ok(IdentityReport {
        equal: lhs == rhs,
        lhs,
        rhs_terms: [g_term, phi_term, euler_term],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    // odd D, every prime 5 mod 8
    Mod5,
    // D = 4 l_1 p_2 ... p_n, l_1 = 3 mod 8, p_i = 5 mod 8
    Mod83,
}

fn shape(disc: &Discriminant) -> Option<Shape> {
    let odd = disc.odd_primes();
    match disc.fundamental().two_star() {
        None => odd.iter().all(|p| p % 8 == 5).then_some(Shape::Mod5),
        Some(-4) => {
            let threes = odd.iter().filter(|&&p| p % 8 == 3).count();
            let fives = odd.iter().filter(|&&p| p % 8 == 5).count();
            (threes == 1 && fives + 1 == odd.len()).then_some(Shape::Mod83)
        }
        Some(_) => None,
    }
}

// component masks of the factors d_i = p_i (odd D) or d_1 = 4 l_1
fn family_blocks(disc: &Discriminant) -> Vec<u32> {
    let primes = disc.primes();
    let mut blocks = Vec::new();
    let mut first = 0u32;
    for (i, &p) in primes.iter().enumerate() {
        if p == 2 || p % 4 == 3 {
            first |= 1 << i;
        } else {
            blocks.push(1 << i);
        }
    }
    if first != 0 {
        blocks.insert(0, first);
    }
    blocks
}

/// Checks that `prod_{p | D}(1 - p)/12` equals `(-1)^n phi(D)/12` (odd `D`)
/// or `(-1)^(n+1) phi(D)/24` (even `D`), `n` the number of odd primes.
pub fn specialized_rhs_check(disc: &Discriminant) -> Result<bool> {
    let d = disc.value();
    let odd = disc.odd_primes();
    let n = odd.len() as u32;
    let euler = ExactRational::new(
        disc.primes().iter().map(|&p| BigInt::from(1 - p as i64)).product::<BigInt>(),
        12,
    );
    let sign = |e: u32| if e.is_multiple_of(2) { 1i64 } else { -1 };
    let canonical_odd = disc.fundamental().two_star().is_none() && odd.iter().all(|p| p % 4 == 1);
    let canonical_even = disc.fundamental().two_star() == Some(-4)
        && odd.iter().filter(|&&p| p % 4 == 3).count() == 1;
    let expected = if canonical_odd {
        ExactRational::new(sign(n) * euler_phi(d) as i64, 12)
    } else if canonical_even {
        ExactRational::new(sign(n + 1) * euler_phi(d) as i64, 24)
    } else {
        return Err(Error::ShapeMismatch("D must be odd with primes 1 mod 4, or 4l times such primes"));
    };
    Ok(euler == expected)
}

/// `sum_{a in G} a^2` for the factors `d_i = p_i` (or `4 l_1`) of a family-shaped `D`.
pub fn family_g_square_sum(disc: &Discriminant, sums: &CharacterSums) -> Result<BigInt> {
    if shape(disc).is_none() {
        return Err(Error::ShapeMismatch("D is not in a mod 8 family shape"));
    }
    Ok(sums.all_plus_sum(&family_blocks(disc)))
}

/// For odd `D` with all primes `5 mod 8`: `sum_{a in G} a^2 = (1/2) prod (p_i - 1)/2 mod 4`.
pub fn s1_congruence(disc: &Discriminant) -> Result<bool> {
    let sums = CharacterSums::compute(disc.fundamental())?;
    s1_congruence_with(disc, &sums)
}

pub fn s1_congruence_with(disc: &Discriminant, sums: &CharacterSums) -> Result<bool> {
    if shape(disc) != Some(Shape::Mod5) {
        return Err(Error::ShapeMismatch("D must be odd with all primes 5 mod 8"));
    }
    let half: BigInt = disc.primes().iter().map(|&p| BigInt::from((p - 1) / 2)).product::<BigInt>() / 2;
    let s1 = sums.all_plus_sum(&family_blocks(disc));
    let diff: BigInt = s1 - half;
    Ok((diff % 4u32).is_zero())
}

/// For `D = 4 l_1 p_2 ... p_n`: `sum_{a in G} a^2 = 10 prod (p_i - 1)/2 mod 16`,
/// the product running over all odd primes.
pub fn t1_congruence(disc: &Discriminant) -> Result<bool> {
    let sums = CharacterSums::compute(disc.fundamental())?;
    t1_congruence_with(disc, &sums)
}

pub fn t1_congruence_with(disc: &Discriminant, sums: &CharacterSums) -> Result<bool> {
    if shape(disc) != Some(Shape::Mod83) {
        return Err(Error::ShapeMismatch("D must be 4 l_1 p_2 ... p_n with l_1 = 3, p_i = 5 mod 8"));
    }
    let y: BigInt = disc.odd_primes().iter().map(|&p| BigInt::from((p - 1) / 2)).product();
    let t1 = sums.all_plus_sum(&family_blocks(disc));
    let diff: BigInt = t1 - y * 10u32;
    Ok((diff % 16u32).is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Mod5OddN,
    Mod5EvenN,
    Mod83Case1,
    Mod83Case2a,
    Mod83Case2b,
    Mod83Case2c,
    GeneralMod5,
    GeneralMod83,
    None,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::Mod5OddN,
        FamilyKind::Mod5EvenN,
        FamilyKind::Mod83Case1,
        FamilyKind::Mod83Case2a,
        FamilyKind::Mod83Case2b,
        FamilyKind::Mod83Case2c,
        FamilyKind::GeneralMod5,
        FamilyKind::GeneralMod83,
        FamilyKind::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Mod5OddN => "Mod5-OddN",
            FamilyKind::Mod5EvenN => "Mod5-EvenN",
            FamilyKind::Mod83Case1 => "Mod83-Case1",
            FamilyKind::Mod83Case2a => "Mod83-Case2a",
            FamilyKind::Mod83Case2b => "Mod83-Case2b",
            FamilyKind::Mod83Case2c => "Mod83-Case2c",
            FamilyKind::GeneralMod5 => "GeneralMod5",
            FamilyKind::GeneralMod83 => "GeneralMod83",
            FamilyKind::None => "None",
        }
    }

    pub fn is_mod5(self) -> bool {
        matches!(self, FamilyKind::Mod5OddN | FamilyKind::Mod5EvenN | FamilyKind::GeneralMod5)
    }

    pub fn is_mod83(self) -> bool {
        !self.is_mod5() && self != FamilyKind::None
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for FamilyKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyTag {
    pub kind: FamilyKind,
    /// Number of d-factors (odd primes).
    pub n: usize,
    /// Odd primes in family order: `l_1`, then `l_2` for case 2c, then the
    /// rest ascending.
    pub labeling: Vec<u64>,
}

fn all_pairs_nonresidue(primes: &[u64]) -> bool {
    primes
        .iter()
        .enumerate()
        .all(|(i, &p)| primes[i + 1..].iter().all(|&q| kronecker(p as i64, q as i64) == -1))
}

pub fn classify(disc: &Discriminant) -> FamilyTag {
    let odd = disc.odd_primes();
    let n = odd.len();
    let none = FamilyTag { kind: FamilyKind::None, n, labeling: odd.clone() };
    match shape(disc) {
        None => none,
        Some(Shape::Mod5) => {
            let kind = match (all_pairs_nonresidue(&odd), n % 2) {
                (true, 1) => FamilyKind::Mod5OddN,
                (true, _) => FamilyKind::Mod5EvenN,
                (false, _) => FamilyKind::GeneralMod5,
            };
            FamilyTag { kind, n, labeling: odd }
        }
        Some(Shape::Mod83) => {
            let l1 = *odd.iter().find(|&&p| p % 8 == 3).unwrap();
            let rest: Vec<u64> = odd.iter().copied().filter(|&p| p != l1).collect();
            let mut labeling = vec![l1];
            labeling.extend(&rest);
            let general = FamilyTag { kind: FamilyKind::GeneralMod83, n, labeling: labeling.clone() };
            if !all_pairs_nonresidue(&rest) {
                return general;
            }
            let minus: Vec<u64> = rest
                .iter()
                .copied()
                .filter(|&p| kronecker(l1 as i64, p as i64) == -1)
                .collect();
            let even = n.is_multiple_of(2);
            let kind = if minus.len() == rest.len() && !even {
                FamilyKind::Mod83Case1
            } else if minus.len() == 1 && even {
                // l_2 leads the remaining primes
                let l2 = minus[0];
                labeling = vec![l1, l2];
                labeling.extend(rest.iter().copied().filter(|&p| p != l2));
                FamilyKind::Mod83Case2c
            } else if minus.len() == rest.len() {
                FamilyKind::Mod83Case2a
            } else if minus.is_empty() && n >= 2 {
                FamilyKind::Mod83Case2b
            } else {
                return general;
            };
            FamilyTag { kind, n, labeling }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub bound: i64,
    /// `true` when the valuation equals `bound`, otherwise it is a lower bound.
    pub exact: bool,
}

impl Prediction {
    pub fn holds(&self, valuation: i64) -> bool {
        if self.exact {
            valuation == self.bound
        } else {
            valuation >= self.bound
        }
    }
}

/// Predicted `v_2(L(chi_D, -1))` for a family.
pub fn predicted_valuation(tag: &FamilyTag) -> Result<Prediction> {
    let n = tag.n as i64;
    let (bound, exact) = match tag.kind {
        FamilyKind::None => return Err(Error::NoPrediction),
        FamilyKind::GeneralMod5 | FamilyKind::GeneralMod83 => (n, false),
        FamilyKind::Mod5OddN | FamilyKind::Mod83Case1 => (n, true),
        FamilyKind::Mod5EvenN
        | FamilyKind::Mod83Case2a
        | FamilyKind::Mod83Case2b
        | FamilyKind::Mod83Case2c => (n + 1, false),
    };
    Ok(Prediction { bound, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, val2};
    use crate::lvalues::{g_set, l_value};
    use num_integer::Integer;

    fn disc(d: u64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn brute_g_sum(d: &Discriminant, blocks: &[u64]) -> BigInt {
        let v = d.value();
        (1..=v)
            .filter(|a| a.gcd(&v) == 1)
            .filter(|&a| blocks.iter().all(|&f| kronecker(f as i64, a as i64) == 1))
            .map(|a| BigInt::from(a * a))
            .sum()
    }

    #[test]
    fn identity_examples() {
        for d in [65u64, 28860, 5, 13, 12, 60, 2405] {
            let r = verify_identity(&disc(d)).unwrap();
            assert!(r.equal, "D={d}: {r:?}");
        }
        let r = verify_identity(&disc(5)).unwrap();
        assert_eq!(r.lhs, ExactRational::new(-2, 5));
        assert_eq!(verify_identity(&disc(21)), Err(Error::NoDFactorization(21)));
        // a coarser admissible factorization
        let coarse = Discriminant::with_factors(28860, &[12 * 5, 13 * 37]).unwrap();
        assert!(verify_identity(&coarse).unwrap().equal);
    }

    #[test]
    fn g_term_matches_brute_force() {
        let d = disc(28860);
        let r = verify_identity(&d).unwrap();
        let g: BigInt = g_set(&d).unwrap().iter().map(|&a| BigInt::from(a * a)).sum();
        assert_eq!(g, brute_g_sum(&d, d.d_factors().unwrap()));
        assert_eq!(r.rhs_terms[0], ExactRational::new(-(g * 8u32), 28860));
    }

    #[test]
    fn specialized_constants() {
        assert!(specialized_rhs_check(&disc(65)).unwrap());
        assert!(specialized_rhs_check(&disc(28860)).unwrap());
        assert!(specialized_rhs_check(&disc(12)).unwrap());
        assert!(specialized_rhs_check(&disc(21)).is_err());
        assert!(specialized_rhs_check(&disc(8)).is_err());
        for v in 5..20000u64 {
            if let Ok(d) = Discriminant::new(v) {
                if d.d_factors().is_some() {
                    assert!(specialized_rhs_check(&d).unwrap(), "D={v}");
                }
            }
        }
    }

    #[test]
    fn congruence_examples() {
        for d in [65u64, 2405, 5] {
            assert!(s1_congruence(&disc(d)).unwrap(), "D={d}");
        }
        for d in [60u64, 28860, 12] {
            assert!(t1_congruence(&disc(d)).unwrap(), "D={d}");
        }
        assert!(s1_congruence(&disc(60)).is_err());
        assert!(t1_congruence(&disc(65)).is_err());
        // D = 5: G = {1, 4}
        let d5 = disc(5);
        let sums = CharacterSums::compute(d5.fundamental()).unwrap();
        assert_eq!(family_g_square_sum(&d5, &sums).unwrap(), BigInt::from(17));
        let d = disc(28860);
        let sums = CharacterSums::compute(d.fundamental()).unwrap();
        assert_eq!(family_g_square_sum(&d, &sums).unwrap(), brute_g_sum(&d, &[12, 5, 13, 37]));
    }

    #[test]
    fn classify_examples() {
        let t = classify(&disc(28860));
        assert_eq!(t.kind, FamilyKind::Mod83Case2c);
        assert_eq!(t.n, 4);
        assert_eq!(t.labeling, vec![3, 5, 13, 37]);
        let t = classify(&disc(4 * 26455));
        assert_eq!(t.labeling, vec![11, 13, 5, 37]);
        let t = classify(&disc(2405));
        assert_eq!((t.kind, t.n), (FamilyKind::Mod5OddN, 3));
        assert_eq!(classify(&disc(21)).kind, FamilyKind::None);
        assert_eq!(classify(&disc(5)).kind, FamilyKind::Mod5OddN);
        assert_eq!(classify(&disc(12)).kind, FamilyKind::Mod83Case1);
        // (3/5) = -1 with n = 2 is case 2c, (3/13) = 1 is case 2b
        assert_eq!(classify(&disc(60)).kind, FamilyKind::Mod83Case2c);
        assert_eq!(classify(&disc(156)).kind, FamilyKind::Mod83Case2b);
        // 5 * 29: (5/29) = 1
        assert_eq!(classify(&disc(145)).kind, FamilyKind::GeneralMod5);
        // 5 * 13: (5/13) = -1
        assert_eq!(classify(&disc(65)).kind, FamilyKind::Mod5EvenN);
        assert_eq!(classify(&disc(24)).kind, FamilyKind::None);
    }

    #[test]
    fn classification_hypotheses_hold() {
        for v in 5..200000u64 {
            let Ok(d) = Discriminant::new(v) else { continue };
            let tag = classify(&d);
            if tag.kind == FamilyKind::None {
                continue;
            }
            let l = &tag.labeling;
            assert_eq!(l.len(), tag.n);
            assert_eq!(l.iter().product::<u64>() * if v % 2 == 0 { 4 } else { 1 }, v);
            let leg = |a: u64, b: u64| kronecker(a as i64, b as i64);
            match tag.kind {
                FamilyKind::Mod5OddN | FamilyKind::Mod5EvenN => {
                    assert!(l.iter().all(|p| p % 8 == 5));
                    assert_eq!(tag.n % 2 == 1, tag.kind == FamilyKind::Mod5OddN);
                    for i in 0..l.len() {
                        for j in i + 1..l.len() {
                            assert_eq!(leg(l[i], l[j]), -1);
                        }
                    }
                }
                FamilyKind::Mod83Case2c => {
                    assert_eq!(l[0] % 8, 3);
                    assert_eq!(tag.n % 2, 0);
                    assert_eq!(leg(l[0], l[1]), -1);
                    assert!(l[2..].iter().all(|&p| leg(l[0], p) == 1));
                    assert!(l[2..].windows(2).all(|w| w[0] < w[1]));
                }
                FamilyKind::Mod83Case1 => {
                    assert_eq!(tag.n % 2, 1);
                    assert!(l[1..].iter().all(|&p| leg(l[0], p) == -1));
                }
                _ => {}
            }
        }
    }

    #[test]
    fn predictions() {
        let p = predicted_valuation(&classify(&disc(2405))).unwrap();
        assert_eq!(p, Prediction { bound: 3, exact: true });
        let p = predicted_valuation(&classify(&disc(28860))).unwrap();
        assert_eq!(p, Prediction { bound: 5, exact: false });
        let p = predicted_valuation(&classify(&disc(60))).unwrap();
        assert_eq!(p, Prediction { bound: 3, exact: false });
        assert_eq!(predicted_valuation(&classify(&disc(21))), Err(Error::NoPrediction));
    }

    #[test]
    fn valuations_small_sweep() {
        for v in 5..60000u64 {
            let Ok(d) = Discriminant::new(v) else { continue };
            let tag = classify(&d);
            let Ok(pred) = predicted_valuation(&tag) else { continue };
            let val = val2(&l_value(&d).unwrap()).unwrap();
            assert!(pred.holds(val), "D={v} {tag:?} v={val}");
        }
        for p in (3..2000u64).filter(|&p| is_prime(p)) {
            if p % 8 == 3 {
                assert_eq!(val2(&l_value(&disc(4 * p)).unwrap()).unwrap(), 1);
            }
            if p % 8 == 5 {
                assert_eq!(val2(&l_value(&disc(p)).unwrap()).unwrap(), 1);
            }
        }
    }
}
