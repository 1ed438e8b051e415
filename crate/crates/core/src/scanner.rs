//! Enumeration of the mod 8 families up to a bound, and table output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{primes_up_to, ExactRational};
use crate::characters::{Discriminant, FundamentalDiscriminant};
use crate::induction::{classify, FamilyKind, FamilyTag};
use crate::k2::resolve_structure_with;
use crate::lvalues::l_value;
use crate::{Error, Result};

/// Largest bound accepted by [`enumerate_family`].
pub const MAX_BOUND: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilySelector {
    Kind(FamilyKind),
    /// Case 2c with exactly `n` odd primes.
    Case2c(usize),
    /// Every odd `D` whose primes are all `5 mod 8`.
    Mod5Shape,
    /// Every `D = 4 l_1 p_2 ... p_n` with `l_1 = 3` and `p_i = 5 mod 8`.
    Mod83Shape,
    /// Every `D` in either shape.
    Any,
}

impl FamilySelector {
    pub fn matches(&self, tag: &FamilyTag) -> bool {
        match *self {
            FamilySelector::Kind(k) => tag.kind == k,
            FamilySelector::Case2c(n) => tag.kind == FamilyKind::Mod83Case2c && tag.n == n,
            FamilySelector::Mod5Shape => tag.kind.is_mod5(),
            FamilySelector::Mod83Shape => tag.kind.is_mod83(),
            FamilySelector::Any => tag.kind != FamilyKind::None,
        }
    }

    fn wants_odd(&self) -> bool {
        match *self {
            FamilySelector::Kind(k) => k.is_mod5(),
            FamilySelector::Mod5Shape | FamilySelector::Any => true,
            _ => false,
        }
    }

    fn wants_even(&self) -> bool {
        match *self {
            FamilySelector::Kind(k) => k.is_mod83(),
            FamilySelector::Case2c(_) | FamilySelector::Mod83Shape | FamilySelector::Any => true,
            FamilySelector::Mod5Shape => false,
        }
    }
}

impl FromStr for FamilySelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFamily(s.to_string());
        if let Some(n) = s.strip_prefix("thm1-n") {
            let n: usize = n.parse().map_err(|_| unknown())?;
            if n == 0 || n % 2 == 1 {
                return Err(unknown());
            }
            return Ok(FamilySelector::Case2c(n));
        }
        Ok(match s {
            "thm2-1" => FamilySelector::Kind(FamilyKind::Mod5OddN),
            "thm2-2" => FamilySelector::Kind(FamilyKind::Mod83Case1),
            "mod85-general" => FamilySelector::Mod5Shape,
            "mod83-general" => FamilySelector::Mod83Shape,
            "all" => FamilySelector::Any,
            _ => FamilyKind::ALL
                .into_iter()
                .filter(|&k| k != FamilyKind::None)
                .find(|k| k.name().eq_ignore_ascii_case(s))
                .map(FamilySelector::Kind)
                .ok_or_else(unknown)?,
        })
    }
}

impl fmt::Display for FamilySelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySelector::Kind(FamilyKind::Mod5OddN) => f.write_str("thm2-1"),
            FamilySelector::Kind(FamilyKind::Mod83Case1) => f.write_str("thm2-2"),
            FamilySelector::Kind(k) => f.write_str(k.name()),
            FamilySelector::Case2c(n) => write!(f, "thm1-n{n}"),
            FamilySelector::Mod5Shape => f.write_str("mod85-general"),
            FamilySelector::Mod83Shape => f.write_str("mod83-general"),
            FamilySelector::Any => f.write_str("all"),
        }
    }
}

// products of distinct primes from `pool` (ascending) that stay <= limit / base
fn products(pool: &[u64], base: u64, limit: u64, start: usize, chosen: &mut Vec<u64>, out: &mut Vec<(u64, Vec<u64>)>) {
    for i in start..pool.len() {
        let p = pool[i];
        let Some(next) = base.checked_mul(p).filter(|&v| v <= limit) else { break };
        chosen.push(p);
        out.push((next, chosen.clone()));
        products(pool, next, limit, i + 1, chosen, out);
        chosen.pop();
    }
}

/// All `D <= max_d` whose classification matches `selector`, ascending.
pub fn enumerate_family(selector: FamilySelector, max_d: u64) -> Result<Vec<Discriminant>> {
    Ok(enumerate_tagged(selector, max_d)?.into_iter().map(|(d, _)| d).collect())
}

/// [`enumerate_family`] together with each member's tag.
pub fn enumerate_tagged(selector: FamilySelector, max_d: u64) -> Result<Vec<(Discriminant, FamilyTag)>> {
    if max_d > MAX_BOUND {
        return Err(Error::OutOfRange(max_d as i64, "scan bound at most 10^8"));
    }
    if max_d < 5 {
        return Ok(Vec::new());
    }
    let all = primes_up_to(max_d / if selector.wants_odd() { 1 } else { 4 });
    let fives: Vec<u64> = all.iter().copied().filter(|p| p % 8 == 5).collect();
    let mut candidates: Vec<(u64, Vec<u64>)> = Vec::new();
    if selector.wants_odd() {
        products(&fives, 1, max_d, 0, &mut Vec::new(), &mut candidates);
    }
    if selector.wants_even() {
        for &l in all.iter().filter(|&&p| p % 8 == 3 && 4 * p <= max_d) {
            let mut rest = Vec::new();
            rest.push((4 * l, Vec::new()));
            products(&fives, 4 * l, max_d, 0, &mut Vec::new(), &mut rest);
            for (d, mut primes) in rest {
                primes.push(l);
                primes.push(2);
                candidates.push((d, primes));
            }
        }
    }
    let mut members: Vec<(Discriminant, FamilyTag)> = candidates
        .into_par_iter()
        .filter_map(|(d, mut primes)| {
            primes.sort_unstable();
            let disc = Discriminant::from_fundamental(FundamentalDiscriminant::from_primes(d as i64, primes));
            let tag = classify(&disc);
            selector.matches(&tag).then_some((disc, tag))
        })
        .collect();
    members.sort_by_key(|(d, _)| d.value());
    Ok(members)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    #[serde(rename = "D", serialize_with = "as_string")]
    pub d: u64,
    /// `D/4` for even `D`, else `D`.
    #[serde(rename = "D_over_4", serialize_with = "as_string")]
    pub d_over_4: u64,
    #[serde(serialize_with = "all_as_strings")]
    pub primes: Vec<u64>,
    /// `-L(chi_D, -1)`, which is `#K_2 O_F / 2` for `D > 8`.
    #[serde(rename = "neg_L", serialize_with = "plain_rational")]
    pub neg_l: ExactRational,
    pub delta: Option<u64>,
}

fn as_string<S: Serializer>(v: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn plain_rational<S: Serializer>(v: &ExactRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&plain(v))
}

// integers without the `/1`
fn plain(v: &ExactRational) -> String {
    match v.to_integer() {
        Some(k) => k.to_string(),
        None => v.to_string(),
    }
}

fn all_as_strings<S: Serializer>(v: &[u64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.to_string()))
}

/// One table row: `-L` from the character sum, `delta` for case 2c members.
pub fn table_row(disc: &Discriminant, tag: &FamilyTag) -> Result<TableRow> {
    let l = l_value(disc)?;
    let neg_l = -l.clone();
    let delta = if tag.kind == FamilyKind::Mod83Case2c {
        resolve_structure_with(disc, l)?.delta
    } else {
        None
    };
    let d = disc.value();
    Ok(TableRow {
        d,
        d_over_4: if d.is_multiple_of(2) { d / 4 } else { d },
        primes: tag.labeling.clone(),
        neg_l,
        delta,
    })
}

pub fn build_table(selector: FamilySelector, max_d: u64) -> Result<Vec<TableRow>> {
    enumerate_tagged(selector, max_d)?
        .par_iter()
        .map(|(d, tag)| table_row(d, tag))
        .collect()
}

/// CSV with header `D,D_over_4,p1,...,neg_L,delta`, at least four prime columns.
pub fn write_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let width = rows.iter().map(|r| r.primes.len()).max().unwrap_or(0).max(4);
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Consistency(format!("write failed: {e}"));
    let mut header = vec!["D".to_string(), "D_over_4".to_string()];
    header.extend((1..=width).map(|i| format!("p{i}")));
    header.extend(["neg_L".to_string(), "delta".to_string()]);
    w.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![r.d.to_string(), r.d_over_4.to_string()];
        rec.extend((0..width).map(|i| r.primes.get(i).map_or(String::new(), |p| p.to_string())));
        rec.push(plain(&r.neg_l));
        rec.push(r.delta.map_or(String::new(), |d| d.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Consistency(format!("write failed: {e}")))
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(rows: &[TableRow], mut out: W) -> Result<()> {
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| Error::Consistency(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::Consistency(format!("write failed: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_names() {
        for s in ["thm1-n4", "thm1-n2", "thm2-1", "thm2-2", "mod85-general", "mod83-general", "all", "Mod83-Case2a"] {
            let sel: FamilySelector = s.parse().unwrap();
            let back: FamilySelector = sel.to_string().parse().unwrap();
            assert_eq!(sel, back);
        }
        assert!("thm1-n3".parse::<FamilySelector>().is_err());
        assert!("bogus".parse::<FamilySelector>().is_err());
        assert!("None".parse::<FamilySelector>().is_err());
    }

    #[test]
    fn small_enumerations() {
        let odd = enumerate_family(FamilySelector::Kind(FamilyKind::Mod5OddN), 100).unwrap();
        let values: Vec<u64> = odd.iter().map(|d| d.value()).collect();
        assert_eq!(values, vec![5, 13, 29, 37, 53, 61]);
        assert!(enumerate_family(FamilySelector::Any, 4).unwrap().is_empty());
        assert!(enumerate_family(FamilySelector::Any, MAX_BOUND + 1).is_err());
        let first = enumerate_family(FamilySelector::Case2c(4), 30000).unwrap();
        assert_eq!(first.iter().map(|d| d.value()).collect::<Vec<_>>(), vec![28860]);
    }

    #[test]
    fn enumeration_is_complete() {
        let max = 300_000u64;
        let selectors = [
            FamilySelector::Any,
            FamilySelector::Mod5Shape,
            FamilySelector::Mod83Shape,
            FamilySelector::Case2c(2),
            FamilySelector::Case2c(4),
            FamilySelector::Kind(FamilyKind::Mod83Case2b),
            FamilySelector::Kind(FamilyKind::Mod5EvenN),
        ];
        let brute: Vec<(u64, FamilyTag)> = (5..=max)
            .filter_map(|v| Discriminant::new(v).ok())
            .map(|d| (d.value(), classify(&d)))
            .collect();
        for sel in selectors {
            let expected: Vec<u64> = brute.iter().filter(|(_, t)| sel.matches(t)).map(|(v, _)| *v).collect();
            let got: Vec<u64> = enumerate_family(sel, max).unwrap().iter().map(|d| d.value()).collect();
            assert_eq!(got, expected, "{sel}");
        }
    }

    #[test]
    fn first_rows() {
        let rows = build_table(FamilySelector::Case2c(4), 4 * 26455).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(
            rows[0],
            TableRow { d: 28860, d_over_4: 7215, primes: vec![3, 5, 13, 37], neg_l: ExactRational::from(240480), delta: Some(3) }
        );
        assert_eq!(
            rows[1],
            TableRow { d: 105820, d_over_4: 26455, primes: vec![11, 13, 5, 37], neg_l: ExactRational::from(1997920), delta: Some(3) }
        );
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "D,D_over_4,p1,p2,p3,p4,neg_L,delta\n28860,7215,3,5,13,37,240480,3\n105820,26455,11,13,5,37,1997920,3\n"
        );
        let mut buf = Vec::new();
        write_jsonl(&rows[..1], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"D\":\"28860\",\"D_over_4\":\"7215\",\"primes\":[\"3\",\"5\",\"13\",\"37\"],\"neg_L\":\"240480\",\"delta\":3}\n"
        );
        assert!(build_table(FamilySelector::Case2c(4), 20000).unwrap().is_empty());
    }

    #[test]
    fn padded_csv() {
        let rows = build_table(FamilySelector::Kind(FamilyKind::Mod5OddN), 5).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "D,D_over_4,p1,p2,p3,p4,neg_L,delta\n5,5,5,,,,2/5,\n");
        let wide = TableRow { d: 4 * 7, d_over_4: 7, primes: vec![3, 5, 7, 11, 13, 17], neg_l: ExactRational::new(-1, 2), delta: None };
        let mut buf = Vec::new();
        write_csv(&[wide], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "D,D_over_4,p1,p2,p3,p4,p5,p6,neg_L,delta\n28,7,3,5,7,11,13,17,-1/2,\n");
    }
}
