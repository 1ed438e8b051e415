//! Order and 2-primary structure of the tame kernel `K_2 O_F` for
//! `F = Q(sqrt D)`, from `#K_2 O_F = w_2(F) zeta_F(-1)`.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::arith::{val2_int, ExactRational};
use crate::characters::Discriminant;
use crate::classgroups::{r2_k2, r4_k2_bound, R4Bound};
use crate::induction::{classify, FamilyKind, FamilyTag};
use crate::lvalues::l_value;
use crate::{Error, Result};

/// `w_2(F)`: 120 for `D = 5`, 48 for `D = 8`, 24 otherwise.
pub fn w2(disc: &Discriminant) -> u64 {
    match disc.value() {
        5 => 120,
        8 => 48,
        _ => 24,
    }
}

/// `#K_2 O_F = -2 L(chi_D, -1)` for `D > 8`.
pub fn k2_order(disc: &Discriminant) -> Result<BigInt> {
    if disc.value() <= 8 {
        return Err(Error::SmallDiscriminant);
    }
    birch_tate_order(disc, &l_value(disc)?)
}

// w_2(F) zeta_F(-1) with zeta_F(-1) = -L/12, valid for every real quadratic F
fn birch_tate_order(disc: &Discriminant, l: &ExactRational) -> Result<BigInt> {
    let order = (ExactRational::from(-(w2(disc) as i64)) * l.clone() / ExactRational::from(12))
        .to_integer()
        .filter(|k| k.is_positive())
        .ok_or_else(|| Error::Consistency(format!("w2 zeta(-1) is not a positive integer for D = {}", disc.value())))?;
    Ok(order)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K2Report {
    #[serde(rename = "D", serialize_with = "as_string")]
    pub d: u64,
    pub l_value: ExactRational,
    pub zeta_minus1: ExactRational,
    pub w2: u64,
    #[serde(serialize_with = "big_as_string")]
    pub k2_order: BigInt,
    pub v2_order: u64,
    pub r2: usize,
    pub r4_bounds: R4Bound,
    /// Orders of the cyclic factors of `K_2 O_F(2)`, when forced.
    pub structure: Option<Vec<u64>>,
    pub delta: Option<u64>,
    pub family: FamilyTag,
}

fn as_string<S: Serializer>(v: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn big_as_string<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl K2Report {
    /// `(Z/2)^a x Z/2^b ...` notation of the structure.
    pub fn structure_string(&self) -> Option<String> {
        let orders = self.structure.as_ref()?;
        let twos = orders.iter().filter(|&&o| o == 2).count();
        let mut parts = Vec::new();
        match twos {
            0 => {}
            1 => parts.push("Z/2".to_string()),
            k => parts.push(format!("(Z/2)^{k}")),
        }
        parts.extend(orders.iter().filter(|&&o| o > 2).map(|o| format!("Z/{o}")));
        Some(if parts.is_empty() { "0".into() } else { parts.join(" x ") })
    }
}

/// Assembles the report, resolving the structure of `K_2 O_F(2)` when the
/// 2-rank, 4-rank bounds and order force it. For `D = 5, 8` the order comes
/// from `w_2 zeta_F(-1)` directly.
pub fn resolve_structure(disc: &Discriminant) -> Result<K2Report> {
    resolve_structure_with(disc, l_value(disc)?)
}

/// [`resolve_structure`] with a precomputed `L(chi_D, -1)`.
pub fn resolve_structure_with(disc: &Discriminant, l: ExactRational) -> Result<K2Report> {
    let order = birch_tate_order(disc, &l)?;
    let v2 = val2_int(&order);
    let r2 = r2_k2(disc)?;
    let bounds = r4_k2_bound(disc);
    let family = classify(disc);
    if (v2 as usize) < r2 {
        return Err(Error::Consistency(format!("v2(#K2) = {v2} below 2-rank {r2} for D = {}", disc.value())));
    }
    let structure = if v2 as usize == r2 {
        Some(vec![2; r2])
    } else if bounds.bound_high <= 1 {
        let top = v2 - r2 as u64 + 1;
        if top >= 64 {
            return Err(Error::Consistency(format!("cyclic factor 2^{top} too large")));
        }
        let mut orders = vec![2; r2 - 1];
        orders.push(1 << top);
        Some(orders)
    } else {
        None
    };
    let delta = match (&structure, family.kind) {
        (Some(orders), FamilyKind::Mod83Case2c) => Some(orders.last().map_or(0, |o: &u64| o.trailing_zeros() as u64)),
        _ => None,
    };
    let zeta = &l / &ExactRational::from(-12);
    debug_assert_eq!((&zeta * &ExactRational::from(w2(disc) as i64)).to_integer(), Some(order.clone()));
    Ok(K2Report {
        d: disc.value(),
        zeta_minus1: zeta,
        l_value: l,
        w2: w2(disc),
        k2_order: order,
        v2_order: v2,
        r2,
        r4_bounds: bounds,
        structure,
        delta,
        family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;
    use num_traits::Zero;

    fn disc(d: u64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn w2_examples() {
        assert_eq!(w2(&disc(5)), 120);
        assert_eq!(w2(&disc(8)), 48);
        assert_eq!(w2(&disc(28860)), 24);
    }

    #[test]
    fn orders() {
        assert_eq!(k2_order(&disc(28860)).unwrap(), BigInt::from(480960));
        assert_eq!(k2_order(&disc(12)).unwrap(), BigInt::from(4));
        let brute: i64 = (1..=40).map(|a| crate::arith::kronecker(40, a) as i64 * a * a).sum();
        assert_eq!(k2_order(&disc(40)).unwrap(), BigInt::from(brute / 40));
        assert_eq!(k2_order(&disc(8)), Err(Error::SmallDiscriminant));
        assert_eq!(k2_order(&disc(5)), Err(Error::SmallDiscriminant));
        // 120 * (1/30) and 48 * (1/12)
        for v in [5, 8] {
            let r = resolve_structure(&disc(v)).unwrap();
            assert_eq!(r.k2_order, BigInt::from(4), "D={v}");
            assert_eq!(r.structure, Some(vec![2, 2]), "D={v}");
        }
    }

    #[test]
    fn structure_examples() {
        let r = resolve_structure(&disc(28860)).unwrap();
        assert_eq!(r.structure, Some(vec![2, 2, 2, 8]));
        assert_eq!(r.delta, Some(3));
        assert_eq!(r.structure_string().unwrap(), "(Z/2)^3 x Z/8");
        assert_eq!(r.zeta_minus1, ExactRational::new(20040, 1));
        let r = resolve_structure(&disc(2405)).unwrap();
        assert_eq!(r.structure, Some(vec![2; 4]));
        assert_eq!(r.delta, None);
        let r = resolve_structure(&disc(12)).unwrap();
        assert_eq!(r.structure, Some(vec![2, 2]));
        assert_eq!(r.structure_string().unwrap(), "(Z/2)^2");
    }

    #[test]
    fn zeta_integrality() {
        for v in 9..20000u64 {
            let Ok(d) = Discriminant::new(v) else { continue };
            let l = l_value(&d).unwrap();
            let zeta = &l / &ExactRational::from(-12);
            let scaled = &zeta * &ExactRational::from(24);
            assert!(scaled.is_integer(), "D={v}");
            let order = k2_order(&d).unwrap();
            assert!(order.is_positive() && (&order % 2u32).is_zero(), "D={v}");
        }
    }

    #[test]
    fn resolved_structures_are_consistent() {
        for v in 9..30000u64 {
            let Ok(d) = Discriminant::new(v) else { continue };
            let Ok(r) = resolve_structure(&d) else { continue };
            if let Some(s) = &r.structure {
                assert_eq!(s.len(), r.r2, "D={v}");
                let r4 = s.iter().filter(|&&o| o >= 4).count();
                assert!(r.r4_bounds.bound_low <= r4 && r4 <= r.r4_bounds.bound_high);
                let log: u32 = s.iter().map(|o| o.trailing_zeros()).sum();
                assert_eq!(log as u64, r.v2_order);
            }
        }
    }

    #[test]
    fn base_cases() {
        for p in (11..600u64).filter(|&p| is_prime(p) && p % 8 == 3) {
            let r = resolve_structure(&disc(4 * p)).unwrap();
            assert_eq!(r.structure, Some(vec![2, 2]), "p={p}");
        }
    }
}
