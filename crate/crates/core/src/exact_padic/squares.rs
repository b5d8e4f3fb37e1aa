use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rat::{Rat, Valuation};

/// Legendre symbol (a / p) for odd prime p, as -1, 0, 1.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let r = a.modpow(&BigInt::from((p - 1) / 2), &pb);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (d / n) for n >= 1.
pub fn kronecker(d: i64, n: u64) -> i32 {
    let mut n = n;
    let mut result = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    // odd part via prime factorisation; n is small in every caller
    let mut m = n;
    let mut q = 3;
    while q * q <= m {
        while m.is_multiple_of(q) {
            m /= q;
            result *= legendre(&BigInt::from(d), q);
        }
        q += 2;
    }
    if m > 1 {
        result *= legendre(&BigInt::from(d), m);
    }
    result
}

/// Whether a nonzero rational is a square in Q_p.
pub fn is_square_qp(x: &Rat, p: u64) -> bool {
    let v = match x.valuation(p) {
        Valuation::Infinity => return true,
        Valuation::Finite(v) => v,
    };
    if v % 2 != 0 {
        return false;
    }
    let u = x * &Rat::pow_p(p, -v);
    if p == 2 {
        u.residue_mod(2, 3) == BigInt::one()
    } else {
        legendre(&u.residue_mod(p, 1), p) == 1
    }
}

/// A root of X^2 + bX + c modulo p^k lifted from the simple root `r0` mod p.
pub fn hensel_lift(b: &BigInt, c: &BigInt, r0: &BigInt, p: u64, k: u32) -> BigInt {
    let mut r = r0.clone();
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = BigInt::from(p).pow(prec);
        let f = (&r * &r + b * &r + c).mod_floor(&m);
        let df = (BigInt::from(2) * &r + b).mod_floor(&m);
        let inv = super::rat::mod_inverse(&df, &m).expect("root is not simple");
        r = (&r - f * inv).mod_floor(&m);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(&BigInt::from(2), 7), 1);
        assert_eq!(legendre(&BigInt::from(3), 7), -1);
        assert_eq!(legendre(&BigInt::from(14), 7), 0);
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-20, 3), 1);
        assert_eq!(kronecker(-20, 7), 1);
        assert_eq!(kronecker(-20, 11), -1);
        assert_eq!(kronecker(40, 3), 1);
        assert_eq!(kronecker(40, 7), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(40, 2), 0);
    }

    #[test]
    fn qp_squares() {
        assert!(is_square_qp(&Rat::from(2), 7));
        assert!(!is_square_qp(&Rat::from(3), 7));
        assert!(!is_square_qp(&Rat::from(5), 2));
        assert!(is_square_qp(&Rat::from(17), 2));
        assert!(is_square_qp(&Rat::frac(17, 4), 2));
        assert!(!is_square_qp(&Rat::from(2), 2));
        assert!(is_square_qp(&Rat::from(-7), 2));
        assert!(!is_square_qp(&Rat::from(3), 3));
    }

    #[test]
    fn hensel_sqrt_of_17_mod_2_power() {
        // X^2 - X - 4 has simple roots mod 2; (2r - 1)^2 = 17
        let r = hensel_lift(&BigInt::from(-1), &BigInt::from(-4), &BigInt::zero(), 2, 20);
        let m = BigInt::from(2).pow(20);
        let s = BigInt::from(2) * r - 1;
        let sq: BigInt = &s * &s - BigInt::from(17);
        assert_eq!(sq.mod_floor(&m), BigInt::zero());
    }
}
