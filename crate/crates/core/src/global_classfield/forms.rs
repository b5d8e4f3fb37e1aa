//! Primitive binary quadratic forms of a fundamental discriminant and the
//! narrow class group they realise.

use std::collections::{BTreeSet, HashMap};

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Form {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn from_ab(a: i64, b: i64, disc: i64) -> Form {
        let num = b * b - disc;
        debug_assert_eq!(num.rem_euclid(4 * a), 0);
        Form { a, b, c: num / (4 * a) }
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    pub fn principal(disc: i64) -> Form {
        let s = disc.rem_euclid(2);
        Form::from_ab(1, s, disc)
    }

    pub fn inverse(&self) -> Form {
        Form::new(self.a, -self.b, self.c)
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.x, -e.y, -e.gcd)
    } else {
        (e.x, e.y, e.gcd)
    }
}

/// Dirichlet composition; the result is not reduced.
pub fn compose_raw(f: &Form, g: &Form) -> Form {
    let disc = f.disc();
    let s = (f.b + g.b) / 2;
    let (u1, v1, e1) = ext_gcd(f.a, g.a);
    let (x, w, e) = ext_gcd(e1, s);
    let v = x * v1;
    let _ = u1;
    let a3 = f.a / e * (g.a / e);
    let m = 2 * a3;
    let t = (g.a / e) as i128 * ((v as i128) * ((s - g.b) as i128) - (w as i128) * (g.c as i128));
    let b3 = ((g.b as i128 + 2 * t).rem_euclid(m.abs() as i128)) as i64;
    Form::from_ab(a3, b3, disc)
}

/// Reduction and class identification for one discriminant.
#[derive(Debug, Clone)]
pub struct FormArith {
    pub disc: i64,
    sqrt_floor: i64,
}

impl FormArith {
    pub fn new(disc: i64) -> Result<FormArith> {
        if disc.rem_euclid(4) > 1 || disc == 0 {
            return Err(Error::InvalidInput(format!("{disc} is not a discriminant")));
        }
        let sf = disc.unsigned_abs().sqrt() as i64;
        if disc > 0 && sf * sf == disc {
            return Err(Error::InvalidInput(format!("{disc} is a square")));
        }
        Ok(FormArith { disc, sqrt_floor: sf })
    }

    fn normalize_definite(&self, f: Form) -> Form {
        let (a, b) = (f.a, f.b);
        let r = Integer::div_floor(&(a - b), &(2 * a));
        let b2 = b + 2 * r * a;
        Form::from_ab(a, b2, self.disc)
    }

    fn reduce_definite(&self, mut f: Form) -> Form {
        if f.a < 0 {
            f = Form::new(-f.a, f.b, -f.c);
        }
        f = self.normalize_definite(f);
        while f.a > f.c {
            f = self.normalize_definite(Form::new(f.c, -f.b, f.a));
        }
        if f.a == f.c && f.b < 0 {
            f.b = -f.b;
        }
        f
    }

    /// Reduced in the indefinite sense: |sqrt D - 2|a|| < b < sqrt D.
    pub fn is_reduced_indefinite(&self, f: &Form) -> bool {
        let s0 = self.sqrt_floor;
        let a2 = 2 * f.a.abs();
        f.b > 0 && f.b <= s0 && a2 - f.b <= s0 && a2 + f.b > s0
    }

    /// One step of the reduction operator rho.
    pub fn rho(&self, f: &Form) -> Form {
        let c = f.c;
        let ac = c.abs();
        let m = 2 * ac;
        let (lo, hi) = if ac > self.sqrt_floor { (-ac + 1, ac) } else { (self.sqrt_floor - m + 1, self.sqrt_floor) };
        let r = lo + (-f.b - lo).rem_euclid(m);
        debug_assert!(r <= hi);
        Form::from_ab(c, r, self.disc)
    }

    /// Canonical representative of the proper equivalence class of f: the
    /// reduced form for D < 0, the least form of the rho-cycle for D > 0.
    pub fn canonical(&self, f: &Form) -> Form {
        if self.disc < 0 {
            return self.reduce_definite(*f);
        }
        let mut g = *f;
        let mut guard = 0;
        while !self.is_reduced_indefinite(&g) {
            g = self.rho(&g);
            guard += 1;
            debug_assert!(guard < 100_000);
        }
        self.cycle(&g).into_iter().min().expect("nonempty cycle")
    }

    /// The rho-cycle through a reduced indefinite form.
    pub fn cycle(&self, f: &Form) -> Vec<Form> {
        let mut out = vec![*f];
        let mut g = self.rho(f);
        while g != *f {
            out.push(g);
            g = self.rho(&g);
        }
        out
    }

    pub fn compose(&self, f: &Form, g: &Form) -> Form {
        self.canonical(&compose_raw(f, g))
    }

    /// Every class, by canonical representative.
    pub fn all_classes(&self) -> Vec<Form> {
        let disc = self.disc;
        let s = disc.rem_euclid(2);
        let mut out = BTreeSet::new();
        if disc < 0 {
            let amax = (disc.abs() / 3).sqrt() + 1;
            for a in 1..=amax {
                for b in -a + 1..=a {
                    if (b - s).rem_euclid(2) != 0 || (b * b - disc) % (4 * a) != 0 {
                        continue;
                    }
                    let f = Form::from_ab(a, b, disc);
                    if f.is_primitive() && self.reduce_definite(f) == f {
                        out.insert(f);
                    }
                }
            }
        } else {
            let s0 = self.sqrt_floor;
            for b in (1..=s0).filter(|b| (b - s).rem_euclid(2) == 0) {
                let n = (disc - b * b) / 4;
                for a in 1..=n {
                    if n % a != 0 {
                        continue;
                    }
                    for sa in [a, -a] {
                        let f = Form::new(sa, b, -n / sa);
                        if f.is_primitive() && self.is_reduced_indefinite(&f) {
                            out.insert(self.canonical(&f));
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

/// A finite abelian group given by canonical forms and a multiplication
/// table.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub arith: FormArith,
    pub classes: Vec<Form>,
    index: HashMap<Form, usize>,
    table: Vec<Vec<usize>>,
}

impl ClassGroup {
    pub fn new(disc: i64) -> Result<ClassGroup> {
        let arith = FormArith::new(disc)?;
        let classes = arith.all_classes();
        let index: HashMap<Form, usize> = classes.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let table = classes
            .iter()
            .map(|f| classes.iter().map(|g| index[&arith.compose(f, g)]).collect())
            .collect();
        Ok(ClassGroup {
            arith,
            classes,
            index,
            table,
        })
    }

    pub fn order(&self) -> usize {
        self.classes.len()
    }

    pub fn identity(&self) -> usize {
        self.index[&self.arith.canonical(&Form::principal(self.arith.disc))]
    }

    pub fn class_of(&self, f: &Form) -> usize {
        self.index[&self.arith.canonical(f)]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    /// The subgroup generated by `gens`, as a sorted list of indices.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = [self.identity()].into();
        loop {
            let next: BTreeSet<usize> = set
                .iter()
                .flat_map(|&x| gens.iter().map(move |&g| (x, g)))
                .map(|(x, g)| self.mul(x, g))
                .chain(set.iter().copied())
                .collect();
            if next.len() == set.len() {
                return set.into_iter().collect();
            }
            set = next;
        }
    }

    pub fn squares(&self) -> Vec<usize> {
        (0..self.order()).map(|i| self.mul(i, i)).collect()
    }

    /// |G / <G^2, gens>|.
    pub fn exponent_two_quotient(&self, gens: &[usize]) -> usize {
        let mut all = self.squares();
        all.extend_from_slice(gens);
        all.sort_unstable();
        all.dedup();
        self.order() / self.subgroup(&all).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_class_numbers() {
        for (d, h) in [(-3, 1), (-4, 1), (-20, 2), (-23, 3), (-47, 5), (-56, 4), (-84, 4), (-71, 7)] {
            assert_eq!(ClassGroup::new(d).unwrap().order(), h, "D = {d}");
        }
    }

    #[test]
    fn real_narrow_class_numbers() {
        for (d, h) in [(5, 1), (8, 1), (12, 2), (40, 2), (60, 4), (136, 4), (145, 4), (221, 4)] {
            assert_eq!(ClassGroup::new(d).unwrap().order(), h, "D = {d}");
        }
    }

    #[test]
    fn group_axioms_hold() {
        for d in [-23, -84, 40, 60, 145] {
            let g = ClassGroup::new(d).unwrap();
            let e = g.identity();
            for i in 0..g.order() {
                assert_eq!(g.mul(i, e), i);
                assert_eq!(g.mul(i, g.class_of(&g.classes[i].inverse())), e);
                for j in 0..g.order() {
                    assert_eq!(g.mul(i, j), g.mul(j, i));
                    for k in 0..g.order() {
                        assert_eq!(g.mul(g.mul(i, j), k), g.mul(i, g.mul(j, k)));
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_is_class_invariant() {
        let ar = FormArith::new(40).unwrap();
        let f = Form::new(3, 2, -3);
        let moved = Form::new(f.a, 2 * f.a + f.b, f.a + f.b + f.c);
        assert_eq!(moved.disc(), 40);
        assert_eq!(ar.canonical(&f), ar.canonical(&moved));
        assert_ne!(ar.canonical(&f), ar.canonical(&Form::principal(40)));
    }
}
