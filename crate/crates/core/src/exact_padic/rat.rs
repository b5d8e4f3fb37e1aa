use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// p-adic valuation; `Infinity` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// Finite value; panics on the valuation of zero.
    pub fn unwrap(self) -> i64 {
        self.finite().expect("valuation of zero")
    }

    pub fn is_at_least(self, bound: i64) -> bool {
        self >= Valuation::Finite(bound)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Exact rational number, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

/// v_p of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Splits a nonzero integer as p^v * m with p not dividing m.
pub fn split_p_part(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

/// Inverse of `a` modulo `m`, when it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

impl Rat {
    pub fn new(num: BigInt, den: BigInt) -> Rat {
        Rat(BigRational::new(num, den))
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn frac(num: i64, den: i64) -> Rat {
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    /// p^k for any integer k.
    pub fn pow_p(p: u64, k: i64) -> Rat {
        let base = BigInt::from(p).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            Rat::from_int(base)
        } else {
            Rat::new(BigInt::one(), base)
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
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

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn valuation(&self, p: u64) -> Valuation {
        valuation(self, p)
    }

    /// Whether the value lies in Z_(p).
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.valuation(p).is_at_least(0)
    }

    /// The value modulo p^k as an integer in [0, p^k); requires p-integrality.
    pub fn residue_mod(&self, p: u64, k: u32) -> BigInt {
        let m = BigInt::from(p).pow(k);
        let inv = mod_inverse(self.denom(), &m).expect("denominator not prime to p");
        (self.numer() * inv).mod_floor(&m)
    }

    /// Canonical representative of the class of `self` in Q / p^k Z_(p).
    ///
    /// Representatives are p^k * n / p^m with 0 <= n < p^m, so the result is
    /// zero exactly when `self` lies in p^k Z_(p).
    pub fn reduce_mod_pow(&self, p: u64, k: i64) -> Rat {
        let y = self * &Rat::pow_p(p, -k);
        let v = match y.valuation(p) {
            Valuation::Infinity => return Rat::zero(),
            Valuation::Finite(v) => v,
        };
        if v >= 0 {
            return Rat::zero();
        }
        let m = (-v) as u32;
        let scaled = &y * &Rat::pow_p(p, m as i64);
        let n = scaled.residue_mod(p, m);
        &Rat::from_int(n) * &Rat::pow_p(p, k - m as i64)
    }
}

/// v_p(x), +infinity for zero.
pub fn valuation(x: &Rat, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let vn = int_valuation(x.numer(), p);
    let vd = int_valuation(x.denom(), p);
    Valuation::Finite(vn - vd)
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::from_int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {0:?}")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let bad = || ParseRatError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rat::from(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&Rat::zero(), 5), Valuation::Infinity);
        assert_eq!(valuation(&Rat::from(50), 5), Valuation::Finite(2));
        assert_eq!(valuation(&Rat::frac(9, 10), 3), Valuation::Finite(2));
        assert_eq!(valuation(&Rat::frac(9, 10), 5), Valuation::Finite(-1));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("6/4".parse::<Rat>().unwrap().to_string(), "3/2");
        assert_eq!("-7".parse::<Rat>().unwrap().to_string(), "-7");
        assert_eq!("4/-2".parse::<Rat>().unwrap().to_string(), "-2");
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn reduction_representatives() {
        // 7 mod 9 over Z_(3)
        assert_eq!(Rat::from(16).reduce_mod_pow(3, 2), Rat::from(7));
        // 1/3 mod 1 over Z_(3): class of 1/3, representative 1/3
        assert_eq!(Rat::frac(4, 3).reduce_mod_pow(3, 0), Rat::frac(1, 3));
        // elements of p^k Z_(p) reduce to zero, including unit denominators
        assert_eq!(Rat::frac(9, 2).reduce_mod_pow(3, 2), Rat::zero());
        // negative exponent: modulo 3^-1 Z_(3)
        assert_eq!(Rat::frac(1, 9).reduce_mod_pow(3, -1), Rat::frac(1, 9));
        assert_eq!(Rat::frac(1, 3).reduce_mod_pow(3, -1), Rat::zero());
    }

    fn rat_strategy() -> impl Strategy<Value = Rat> {
        (-500i64..500, 1i64..200).prop_map(|(n, d)| Rat::frac(n, d))
    }

    proptest! {
        #[test]
        fn valuation_is_a_valuation(x in rat_strategy(), y in rat_strategy(), pi in 0usize..3) {
            let p = [2u64, 3, 5][pi];
            let vx = valuation(&x, p);
            let vy = valuation(&y, p);
            let vxy = valuation(&(&x * &y), p);
            match (vx, vy) {
                (Valuation::Finite(a), Valuation::Finite(b)) => prop_assert_eq!(vxy, Valuation::Finite(a + b)),
                _ => prop_assert_eq!(vxy, Valuation::Infinity),
            }
            prop_assert!(valuation(&(&x + &y), p) >= vx.min(vy));
        }

        #[test]
        fn reduction_is_canonical(x in rat_strategy(), z in rat_strategy(), k in -2i64..3) {
            let p = 3u64;
            // shift by an element of p^k Z_(p): z with denominators prime to 3
            let unit_part = Rat::new(z.numer().clone(), BigInt::from(1) + BigInt::from(3) * (z.denom() % BigInt::from(7)));
            let shifted = &x + &(&unit_part * &Rat::pow_p(p, k));
            prop_assert_eq!(x.reduce_mod_pow(p, k), shifted.reduce_mod_pow(p, k));
        }
    }
}
