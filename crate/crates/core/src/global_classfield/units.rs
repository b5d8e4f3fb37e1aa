use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};

use super::field::{BaseField, QuadElem};
use crate::error::{Error, Result};
use crate::exact_padic::Rat;

const CF_STEPS: usize = 1_000_000;

/// Fundamental unit eps > 1 of a real quadratic field, from the continued
/// fraction of w = (s + sqrt D)/2, together with its norm.
pub fn fundamental_unit(field: &BaseField) -> Result<(QuadElem, i32)> {
    let d = match field {
        BaseField::Quadratic { d } if *d > 0 => *d,
        _ => return Err(Error::UnsupportedField(format!("{field} is not real quadratic"))),
    };
    let disc = field.discriminant();
    let s = disc.rem_euclid(2);
    let sq = (disc as u64).sqrt() as i64;
    let bd = BigInt::from(disc);
    let (mut pp, mut qq) = (BigInt::from(s), BigInt::from(2));
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let c0 = BigInt::from((s * s - disc) / 4);
    for _ in 0..CF_STEPS {
        let num: BigInt = &pp + sq;
        let a: BigInt = if qq.is_positive() {
            num.div_floor(&qq)
        } else {
            let mq: BigInt = -&qq;
            -(num.div_floor(&mq) + BigInt::one())
        };
        let h = &a * &h1 + &h0;
        let k = &a * &k1 + &k0;
        let norm = &h * &h - BigInt::from(s) * &h * &k + &c0 * &k * &k;
        if norm.abs().is_one() {
            // h - k w is small, its conjugate h - k w' is the unit above 1.
            let x = Rat::new(BigInt::from(2) * &h - BigInt::from(s) * &k, BigInt::from(2));
            let y = Rat::new(k.clone(), if disc == d { BigInt::from(2) } else { BigInt::one() });
            let eps = QuadElem::new(x, y);
            let n = if norm.is_positive() { 1 } else { -1 };
            return Ok((eps, n));
        }
        h0 = std::mem::replace(&mut h1, h);
        k0 = std::mem::replace(&mut k1, k);
        pp = &a * &qq - &pp;
        qq = (&bd - &pp * &pp) / &qq;
    }
    Err(Error::BudgetExceeded {
        cap: CF_STEPS,
        context: "continued fraction period".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: i64) -> (QuadElem, i32) {
        fundamental_unit(&BaseField::quadratic(d).unwrap()).unwrap()
    }

    #[test]
    fn known_units() {
        let cases: [(i64, (i64, i64), (i64, i64), i32); 7] = [
            (2, (1, 1), (1, 1), -1),
            (3, (2, 1), (1, 1), 1),
            (5, (1, 2), (1, 2), -1),
            (10, (3, 1), (1, 1), -1),
            (13, (3, 2), (1, 2), -1),
            (7, (8, 1), (3, 1), 1),
            (15, (4, 1), (1, 1), 1),
        ];
        for (d, (xn, xd), (yn, yd), n) in cases {
            let (e, norm) = unit(d);
            assert_eq!(e, QuadElem::new(Rat::frac(xn, xd), Rat::frac(yn, yd)), "d = {d}");
            assert_eq!(norm, n);
            assert_eq!(e.norm(d), Rat::from(n as i64));
        }
        let (e, _) = unit(94);
        assert_eq!(e.x, Rat::from(2143295));
        assert_eq!(e.y, Rat::from(221064));
        assert!(fundamental_unit(&BaseField::Rational).is_err());
    }
}
