//! Class groups of imaginary quadratic fields from reduced positive definite
//! binary quadratic forms under composition.

use std::collections::HashMap;

use serde::Serialize;

use crate::arith::factorize;
use crate::characters::FundamentalDiscriminant;
use crate::{Error, Result};

/// `a x^2 + b xy + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let Form { a, b, c } = *self;
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    pub fn reduce(self) -> Form {
        let disc = self.discriminant();
        let Form { mut a, mut b, mut c } = self;
        loop {
            if !(-a < b && b <= a) {
                // b into (-a, a]
                let q = (a - b).div_euclid(2 * a);
                b += 2 * q * a;
                c = (b * b - disc) / (4 * a);
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return Form { a, b, c };
        }
    }

    pub fn principal(disc: i64) -> Form {
        let b = disc.rem_euclid(2);
        Form { a: 1, b, c: (b * b - disc) / 4 }
    }

    /// Composition of two primitive forms of the same discriminant, reduced.
    pub fn compose(&self, other: &Form) -> Form {
        let disc = self.discriminant();
        let (f, g) = if self.a > other.a { (other, self) } else { (self, other) };
        let (a1, b1) = (f.a as i128, f.b as i128);
        let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (y1, d) = if a2 % a1 == 0 {
            (0, a1)
        } else {
            let (d, u, _) = ext_gcd(a2, a1);
            (u, d)
        };
        let (x2, y2, d1) = if s % d == 0 {
            (0, -1, d)
        } else {
            let (d1, along_d, along_s) = ext_gcd(d, s);
            (along_s, -along_d, d1)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - disc as i128) / (4 * a3);
        Form { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce()
    }

    pub fn inverse(&self) -> Form {
        Form { a: self.a, b: -self.b, c: self.c }.reduce()
    }
}

// (g, x, y) with a x + b y = g = gcd(a, b) >= 0
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// All reduced forms of a negative discriminant, ordered by `(a, b)`.
pub fn reduced_forms(disc: i64) -> Vec<Form> {
    let mut forms = Vec::new();
    let mut a = 1i64;
    // reduced forms have a <= sqrt(|disc|/3)
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = Form { a, b, c: num / (4 * a) };
            if f.is_reduced() && num_integer::gcd(num_integer::gcd(a, b), f.c) == 1 {
                forms.push(f);
            }
        }
        a += 1;
    }
    forms
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormClassGroup {
    pub discriminant: i64,
    pub class_number: u64,
    /// Invariant factors, each dividing the next; empty for the trivial group.
    pub invariants: Vec<u64>,
}

impl FormClassGroup {
    /// Number of cyclic factors of order divisible by `m`.
    pub fn rank_divisible_by(&self, m: u64) -> usize {
        self.invariants.iter().filter(|&&d| d % m == 0).count()
    }

    pub fn r2(&self) -> usize {
        self.rank_divisible_by(2)
    }

    pub fn r4(&self) -> usize {
        self.rank_divisible_by(4)
    }
}

/// Class group of a negative fundamental discriminant `-10^6 < disc < 0`.
pub fn form_class_group(disc: i64) -> Result<FormClassGroup> {
    if disc >= 0 || disc <= -1_000_000 {
        return Err(Error::OutOfRange(disc, "need a negative discriminant above -10^6"));
    }
    FundamentalDiscriminant::new(disc)?;
    let forms = reduced_forms(disc);
    let h = forms.len();
    let index: HashMap<Form, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let identity = index[&Form::principal(disc)];
    let mut invariants: Vec<u64> = Vec::new();
    for (p, _) in factorize(h as u64).pairs().iter().copied() {
        // x -> x^p on indices
        let power: Vec<usize> = forms.iter().map(|f| index[&pow(f, p, disc)]).collect();
        // counts of p^k-torsion for k = 1, 2, ...
        let mut level: Vec<usize> = (0..h).collect();
        let mut torsion = vec![1usize];
        loop {
            level.iter_mut().for_each(|x| *x = power[*x]);
            let count = level.iter().filter(|&&x| x == identity).count();
            if count == *torsion.last().unwrap() {
                break;
            }
            torsion.push(count);
        }
        // lambda_k = number of cyclic p-factors of order >= p^k
        let lambdas: Vec<usize> = torsion
            .windows(2)
            .map(|w| (w[1] / w[0]).ilog(p as usize) as usize)
            .collect();
        let factors = lambdas[0];
        if invariants.len() < factors {
            invariants.splice(0..0, std::iter::repeat_n(1, factors - invariants.len()));
        }
        let len = invariants.len();
        for &lambda in &lambdas {
            invariants[len - lambda..].iter_mut().for_each(|slot| *slot *= p);
        }
    }
    let product: u64 = invariants.iter().product();
    if product != h as u64 {
        return Err(Error::Consistency(format!("class group of {disc} has order {h} but invariants {invariants:?}")));
    }
    Ok(FormClassGroup { discriminant: disc, class_number: h as u64, invariants })
}

fn pow(f: &Form, mut e: u64, disc: i64) -> Form {
    let mut result = Form::principal(disc);
    let mut base = *f;
    while e > 0 {
        if e & 1 == 1 {
            result = result.compose(&base);
        }
        base = base.compose(&base);
        e >>= 1;
    }
    result
}
