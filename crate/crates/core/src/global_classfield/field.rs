use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_padic::squares::kronecker;
use crate::exact_padic::Rat;

/// Q, or Q(sqrt d) for squarefree d not in {0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BaseField {
    #[serde(rename = "Q")]
    Rational,
    #[serde(rename = "quadratic")]
    Quadratic { d: i64 },
}

fn is_squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q * q) {
            return false;
        }
        q += 1;
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

impl BaseField {
    pub fn quadratic(d: i64) -> Result<BaseField> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::UnsupportedField(format!("d = {d} is not a squarefree integer other than 0, 1")));
        }
        Ok(BaseField::Quadratic { d })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaseField::Rational => Ok(()),
            BaseField::Quadratic { d } => BaseField::quadratic(d).map(|_| ()),
        }
    }

    /// Field discriminant: 1 for Q, d or 4d otherwise.
    pub fn discriminant(&self) -> i64 {
        match *self {
            BaseField::Rational => 1,
            BaseField::Quadratic { d } if d.rem_euclid(4) == 1 => d,
            BaseField::Quadratic { d } => 4 * d,
        }
    }

    pub fn d(&self) -> Option<i64> {
        match *self {
            BaseField::Rational => None,
            BaseField::Quadratic { d } => Some(d),
        }
    }

    pub fn real_places(&self) -> usize {
        match *self {
            BaseField::Rational => 1,
            BaseField::Quadratic { d } if d > 0 => 2,
            BaseField::Quadratic { .. } => 0,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, BaseField::Rational)
    }

    /// The primes of K above p.
    pub fn primes_above(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        Ok(match self {
            BaseField::Rational => vec![PrimeIdeal::new(p, Splitting::Rational)],
            BaseField::Quadratic { .. } => match kronecker(self.discriminant(), p) {
                1 => vec![
                    PrimeIdeal::new(p, Splitting::Split { conj: 0 }),
                    PrimeIdeal::new(p, Splitting::Split { conj: 1 }),
                ],
                -1 => vec![PrimeIdeal::new(p, Splitting::Inert)],
                _ => vec![PrimeIdeal::new(p, Splitting::Ramified)],
            },
        })
    }

    /// Checks that a prime ideal descriptor belongs to this field.
    pub fn check_prime(&self, q: &PrimeIdeal) -> Result<()> {
        let ok = self.primes_above(q.p)?.contains(q);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{q} is not a prime of {self}")))
        }
    }

    /// b with 0 <= b < 2p, b = D mod 2 and b^2 = D mod 4p, for split or
    /// ramified p; the prime is p Z + ((-b + sqrt D)/2) Z. The conjugate of
    /// a split prime uses -b.
    pub fn prime_b(&self, q: &PrimeIdeal) -> Option<i64> {
        let disc = self.discriminant();
        let p = q.p as i64;
        let b0 = (0..2 * p).find(|b| (b - disc).rem_euclid(2) == 0 && (b * b - disc).rem_euclid(4 * p) == 0)?;
        match q.kind {
            Splitting::Split { conj: 0 } | Splitting::Ramified => Some(b0),
            Splitting::Split { .. } => Some(-b0),
            _ => None,
        }
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rational => write!(f, "Q"),
            BaseField::Quadratic { d } => write!(f, "Q(sqrt {d})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Splitting {
    /// A prime of Q itself.
    Rational,
    Split { conj: u8 },
    Inert,
    Ramified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    #[serde(flatten)]
    pub kind: Splitting,
}

impl PrimeIdeal {
    pub fn new(p: u64, kind: Splitting) -> PrimeIdeal {
        PrimeIdeal { p, kind }
    }

    /// log_p of the norm.
    pub fn residue_degree(&self) -> u32 {
        if self.kind == Splitting::Inert {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Splitting::Rational => write!(f, "({})", self.p),
            Splitting::Split { conj } => write!(f, "P{}{}", self.p, if conj == 0 { "" } else { "'" }),
            Splitting::Inert => write!(f, "P{} (inert)", self.p),
            Splitting::Ramified => write!(f, "P{} (ramified)", self.p),
        }
    }
}

/// x + y sqrt d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[Rat; 2]", into = "[Rat; 2]")]
pub struct QuadElem {
    pub x: Rat,
    pub y: Rat,
}

impl From<[Rat; 2]> for QuadElem {
    fn from([x, y]: [Rat; 2]) -> QuadElem {
        QuadElem { x, y }
    }
}

impl From<QuadElem> for [Rat; 2] {
    fn from(e: QuadElem) -> [Rat; 2] {
        [e.x, e.y]
    }
}

impl QuadElem {
    pub fn new(x: Rat, y: Rat) -> QuadElem {
        QuadElem { x, y }
    }

    pub fn rational(x: Rat) -> QuadElem {
        QuadElem { x, y: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn norm(&self, d: i64) -> Rat {
        &(&self.x * &self.x) - &(&Rat::from(d) * &(&self.y * &self.y))
    }

    pub fn mul(&self, other: &QuadElem, d: i64) -> QuadElem {
        let x = &(&self.x * &other.x) + &(&Rat::from(d) * &(&self.y * &other.y));
        let y = &(&self.x * &other.y) + &(&self.y * &other.x);
        QuadElem { x, y }
    }

    pub fn sub(&self, other: &QuadElem) -> QuadElem {
        QuadElem {
            x: &self.x - &other.x,
            y: &self.y - &other.y,
        }
    }

    pub fn scale(&self, c: &Rat) -> QuadElem {
        QuadElem {
            x: &self.x * c,
            y: &self.y * c,
        }
    }

    /// Coordinates (a, b) with self = a + b w, w = (s + sqrt D)/2.
    pub fn omega_coords(&self, field: &BaseField) -> (Rat, Rat) {
        match field {
            BaseField::Quadratic { d } if d.rem_euclid(4) == 1 => (&self.x - &self.y, &self.y * &Rat::from(2)),
            _ => (self.x.clone(), self.y.clone()),
        }
    }

    /// Sign under the real embedding sending sqrt d to +sqrt d (place 0) or
    /// -sqrt d (place 1).
    pub fn sign_at(&self, d: i64, place: usize) -> i32 {
        let y = if place == 0 { self.y.clone() } else { -&self.y };
        let (sx, sy) = (self.x.signum(), y.signum());
        if sy == 0 {
            return sx;
        }
        if sx == 0 || sx == sy {
            return if sx == 0 { sy } else { sx };
        }
        let lhs = &self.x * &self.x;
        let rhs = &Rat::from(d) * &(&y * &y);
        if lhs > rhs {
            sx
        } else {
            sy
        }
    }

    /// Whether self is a square in K.
    pub fn is_global_square(&self, field: &BaseField) -> bool {
        let d = field.d().unwrap_or(0);
        if self.y.is_zero() {
            return rational_sqrt(&self.x).is_some()
                || (d != 0 && rational_sqrt(&(&self.x / &Rat::from(d))).is_some());
        }
        let Some(n) = rational_sqrt(&self.norm(d)) else {
            return false;
        };
        let half = Rat::frac(1, 2);
        [&self.x + &n, &self.x - &n].iter().any(|s| {
            let a2 = s * &half;
            match rational_sqrt(&a2) {
                Some(a) if !a.is_zero() => {
                    let b = &self.y / &(&a * &Rat::from(2));
                    &(&a * &a) + &(&Rat::from(d) * &(&b * &b)) == self.x
                }
                _ => false,
            }
        })
    }
}

pub fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let dd = x.denom().sqrt();
    let r = Rat::new(n, dd);
    (&r * &r == *x).then_some(r)
}

/// Odd-free part helpers for choosing candidate primes.
pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut q = 2u64;
    while BigInt::from(q) * BigInt::from(q) <= n {
        let bq = BigInt::from(q);
        if (&n % &bq).is_zero() {
            out.push(q);
            while (&n % &bq).is_zero() {
                n /= &bq;
            }
        }
        q += 1;
    }
    if n > BigInt::from(1) {
        out.push(n.to_string().parse().expect("prime factor fits in u64"));
    }
    out
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}
