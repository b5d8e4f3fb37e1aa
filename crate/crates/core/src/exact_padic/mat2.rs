use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::rat::{valuation, Rat, Valuation};
use crate::error::{Error, Result};

/// A 2x2 matrix over Q, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2 {
    pub entries: [[Rat; 2]; 2],
}

impl Mat2 {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Mat2 {
        Mat2 {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Mat2 {
        Mat2::from_ints(1, 0, 0, 1)
    }

    pub fn zero() -> Mat2 {
        Mat2::from_ints(0, 0, 0, 0)
    }

    pub fn scalar(x: Rat) -> Mat2 {
        Mat2::new(x.clone(), Rat::zero(), Rat::zero(), x)
    }

    pub fn diag(a: Rat, d: Rat) -> Mat2 {
        Mat2::new(a, Rat::zero(), Rat::zero(), d)
    }

    /// Elementary matrix with a single 1 at (row, col).
    pub fn unit(row: usize, col: usize) -> Mat2 {
        let mut m = Mat2::zero();
        m.entries[row][col] = Rat::one();
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i][j]
    }

    /// Row-major coordinates (m11, m12, m21, m22).
    pub fn coords(&self) -> [Rat; 4] {
        let [[a, b], [c, d]] = &self.entries;
        [a.clone(), b.clone(), c.clone(), d.clone()]
    }

    pub fn from_coords(c: &[Rat]) -> Mat2 {
        Mat2::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone())
    }

    pub fn det(&self) -> Rat {
        let [[a, b], [c, d]] = &self.entries;
        &(a * d) - &(b * c)
    }

    pub fn trace(&self) -> Rat {
        &self.entries[0][0] + &self.entries[1][1]
    }

    pub fn is_scalar(&self) -> bool {
        self.entries[0][1].is_zero()
            && self.entries[1][0].is_zero()
            && self.entries[0][0] == self.entries[1][1]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Rat::is_zero)
    }

    pub fn scale(&self, x: &Rat) -> Mat2 {
        let [[a, b], [c, d]] = &self.entries;
        Mat2::new(a * x, b * x, c * x, d * x)
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let inv = det.recip();
        let [[a, b], [c, d]] = &self.entries;
        Ok(Mat2::new(d * &inv, &(-b) * &inv, &(-c) * &inv, a * &inv))
    }

    /// g^-1 * self * g.
    pub fn conjugate_by(&self, g: &Mat2) -> Result<Mat2> {
        Ok(&(&g.inverse()? * self) * g)
    }

    pub fn apply(&self, v: &[Rat; 2]) -> [Rat; 2] {
        let [[a, b], [c, d]] = &self.entries;
        [&(a * &v[0]) + &(b * &v[1]), &(c * &v[0]) + &(d * &v[1])]
    }

    pub fn column(&self, j: usize) -> [Rat; 2] {
        [self.entries[0][j].clone(), self.entries[1][j].clone()]
    }

    pub fn from_columns(c0: &[Rat; 2], c1: &[Rat; 2]) -> Mat2 {
        Mat2::new(c0[0].clone(), c1[0].clone(), c0[1].clone(), c1[1].clone())
    }

    pub fn min_valuation(&self, p: u64) -> Valuation {
        self.entries
            .iter()
            .flatten()
            .map(|x| valuation(x, p))
            .min()
            .unwrap()
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.min_valuation(p).is_at_least(0)
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        let e = &self.entries;
        let f = &o.entries;
        let at = |i: usize, j: usize| &(&e[i][0] * &f[0][j]) + &(&e[i][1] * &f[1][j]);
        Mat2::new(at(0, 0), at(0, 1), at(1, 0), at(1, 1))
    }
}

impl Add for &Mat2 {
    type Output = Mat2;
    fn add(self, o: &Mat2) -> Mat2 {
        let e = &self.entries;
        let f = &o.entries;
        Mat2::new(
            &e[0][0] + &f[0][0],
            &e[0][1] + &f[0][1],
            &e[1][0] + &f[1][0],
            &e[1][1] + &f[1][1],
        )
    }
}

impl Sub for &Mat2 {
    type Output = Mat2;
    fn sub(self, o: &Mat2) -> Mat2 {
        self + &(-o)
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(&Rat::from(-1))
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.entries;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Local Smith form: u * g * v = diag(p^e1, p^e2) with u, v in GL2(Z_(p)).
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub e1: i64,
    pub e2: i64,
    pub left: Mat2,
    pub right: Mat2,
}

/// Elementary divisor exponents (e1 <= e2) of `g` over Z_(p).
pub fn smith_local(g: &Mat2, p: u64) -> Result<(i64, i64)> {
    let det = g.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let e1 = g.min_valuation(p).unwrap();
    let e2 = valuation(&det, p).unwrap() - e1;
    Ok((e1, e2))
}

/// Smith form together with the unimodular transforms.
pub fn smith_local_with_transforms(g: &Mat2, p: u64) -> Result<SmithForm> {
    let (e1, e2) = smith_local(g, p)?;
    // move an entry of minimal valuation to (0,0)
    let (pi, pj) = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .min_by_key(|&(i, j)| valuation(g.get(i, j), p))
        .unwrap();
    let swap = Mat2::from_ints(0, 1, 1, 0);
    let row_swap = if pi == 1 { swap.clone() } else { Mat2::identity() };
    let col_swap = if pj == 1 { swap } else { Mat2::identity() };
    let h = &(&row_swap * g) * &col_swap;
    let [[a, b], [c, _]] = h.entries.clone();
    // clear the first column and first row; quotients lie in Z_(p)
    let row_op = Mat2::new(Rat::one(), Rat::zero(), -(&c / &a), Rat::one());
    let col_op = Mat2::new(Rat::one(), -(&b / &a), Rat::zero(), Rat::one());
    let h = &(&row_op * &h) * &col_op;
    // scale pivots by units to powers of p
    let s1 = &Rat::pow_p(p, e1) / h.get(0, 0);
    let s2 = &Rat::pow_p(p, e2) / h.get(1, 1);
    let scale = Mat2::diag(s1, s2);
    let left = &(&scale * &row_op) * &row_swap;
    let right = &col_swap * &col_op;
    Ok(SmithForm { e1, e2, left, right })
}
