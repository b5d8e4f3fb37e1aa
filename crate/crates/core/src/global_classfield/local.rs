//! Square classes and quadratic splitting at one finite prime of K.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::field::{BaseField, PrimeIdeal, QuadElem, Splitting};
use crate::error::{Error, Result};
use crate::exact_padic::squares::{hensel_lift, is_square_qp, legendre};
use crate::exact_padic::Rat;

/// How K(sqrt delta)/K behaves at a place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalBehaviour {
    Split,
    Inert,
    Ramified,
}

fn v(x: &Rat, p: u64) -> i64 {
    x.valuation(p).finite().unwrap_or(i64::MAX / 4)
}

/// Image of delta in K_P = Q_p for split P, as an integer congruent to it
/// modulo a precision that fixes its square class, times p^(2*shift).
fn split_image(field: &BaseField, delta: &QuadElem, q: &PrimeIdeal) -> (Rat, i64) {
    let p = q.p;
    let (a, b) = delta.omega_coords(field);
    let shift = (v(&a, p).min(v(&b, p))).min(0);
    let j = (-shift + 1) / 2;
    let scale = Rat::pow_p(p, 2 * j);
    let (a, b) = (&a * &scale, &b * &scale);
    let d = field.d().expect("quadratic");
    let n = delta.norm(d);
    let k = (v(&n, p) + 4 * j + 6) as u32;
    let disc = field.discriminant();
    let s = disc.rem_euclid(2);
    let bq = field.prime_b(q).expect("split prime");
    let r0 = BigInt::from(((s + bq) / 2).rem_euclid(p as i64));
    let w = hensel_lift(&BigInt::from(-s), &BigInt::from((s * s - disc) / 4), &r0, p, k);
    let modulus = BigInt::from(p).pow(k);
    let z = (a.residue_mod(p, k) + b.residue_mod(p, k) * w) % &modulus;
    (Rat::from(z), j)
}

/// v_P(delta).
pub fn valuation_at(field: &BaseField, delta: &QuadElem, q: &PrimeIdeal) -> i64 {
    let p = q.p;
    match q.kind {
        Splitting::Rational => v(&delta.x, p),
        Splitting::Inert => {
            let (a, b) = delta.omega_coords(field);
            v(&a, p).min(v(&b, p))
        }
        Splitting::Ramified => v(&delta.norm(field.d().expect("quadratic")), p),
        Splitting::Split { .. } => {
            let (z, j) = split_image(field, delta, q);
            v(&z, p) - 2 * j
        }
    }
}

/// Ramification index of P over 2, or 0 for odd P.
fn e2(q: &PrimeIdeal) -> i64 {
    match (q.p, q.kind) {
        (2, Splitting::Ramified) => 2,
        (2, _) => 1,
        _ => 0,
    }
}

/// Dyadic non-split P: whether some x in O_P has v_P(delta - x^2) >= v_P(delta) + extra.
fn dyadic_approx_square(field: &BaseField, delta: &QuadElem, q: &PrimeIdeal, extra: i64) -> bool {
    let mut delta = delta.clone();
    let step = if q.kind == Splitting::Ramified { 4 } else { 2 };
    let mut val = valuation_at(field, &delta, q);
    let k = val.div_euclid(step);
    delta = delta.scale(&Rat::pow_p(2, -2 * k));
    val -= step * k;
    let s = field.discriminant().rem_euclid(2);
    let d = field.d().expect("quadratic");
    let target = val + extra;
    (0..16i64).any(|a| {
        (0..16i64).any(|b| {
            // a + b w with w = (s + sqrt D)/2
            let x = match s {
                1 => QuadElem::new(Rat::frac(2 * a + b, 2), Rat::frac(b, 2)),
                _ => QuadElem::new(Rat::from(a), Rat::from(b)),
            };
            let diff = delta.sub(&x.mul(&x, d));
            diff.is_zero() || valuation_at(field, &diff, q) >= target
        })
    })
}

/// Whether delta is a square in K_P.
pub fn square_class_local(field: &BaseField, delta: &QuadElem, q: &PrimeIdeal) -> Result<bool> {
    if delta.is_zero() {
        return Err(Error::InvalidInput("zero has no square class".into()));
    }
    let p = q.p;
    let pb = BigInt::from(p);
    Ok(match q.kind {
        Splitting::Rational => is_square_qp(&delta.x, p),
        Splitting::Split { .. } => is_square_qp(&split_image(field, delta, q).0, p),
        _ if p == 2 => {
            let val = valuation_at(field, delta, q);
            val % 2 == 0 && dyadic_approx_square(field, delta, q, 2 * e2(q) + 1)
        }
        Splitting::Inert => {
            let e = valuation_at(field, delta, q);
            let n = delta.norm(field.d().expect("quadratic"));
            let unit_norm = &n * &Rat::pow_p(p, -2 * e);
            e % 2 == 0 && legendre(&unit_norm.residue_mod(p, 1), p) == 1
        }
        Splitting::Ramified => {
            let d = field.d().expect("quadratic");
            let val = valuation_at(field, delta, q);
            if val % 2 != 0 {
                return Ok(false);
            }
            let k = val / 2;
            let lead = &delta.x * &Rat::pow_p(p, -k);
            let mut sym = legendre(&lead.residue_mod(p, 1), p);
            if k % 2 != 0 {
                sym *= legendre(&(BigInt::from(d) / &pb), p);
            }
            sym == 1
        }
    })
}

/// Behaviour of K(sqrt delta)/K at P.
pub fn local_behaviour(field: &BaseField, delta: &QuadElem, q: &PrimeIdeal) -> Result<LocalBehaviour> {
    if square_class_local(field, delta, q)? {
        return Ok(LocalBehaviour::Split);
    }
    let unramified = match q.kind {
        Splitting::Rational | Splitting::Split { .. } => {
            let z = match q.kind {
                Splitting::Rational => delta.x.clone(),
                _ => split_image(field, delta, q).0,
            };
            let val = v(&z, q.p);
            val % 2 == 0 && (q.p != 2 || {
                let u = &z * &Rat::pow_p(2, -val);
                u.residue_mod(2, 2) == BigInt::one()
            })
        }
        _ => {
            let val = valuation_at(field, delta, q);
            val % 2 == 0 && (q.p != 2 || dyadic_approx_square(field, delta, q, 2 * e2(q)))
        }
    };
    Ok(if unramified { LocalBehaviour::Inert } else { LocalBehaviour::Ramified })
}

/// Primes of K where K(sqrt delta)/K can ramify: those above 2 and above
/// primes dividing the norm of delta.
pub fn candidate_primes(field: &BaseField, delta: &QuadElem) -> Result<Vec<PrimeIdeal>> {
    let n = match field.d() {
        Some(d) => delta.norm(d),
        None => delta.x.clone(),
    };
    let mut ps = vec![2u64];
    for m in [n.numer(), n.denom()] {
        ps.extend(super::field::prime_factors(m));
    }
    ps.sort_unstable();
    ps.dedup();
    let mut out = Vec::new();
    for p in ps {
        out.extend(field.primes_above(p)?);
    }
    Ok(out)
}
