//! Z_(p)-lattices in Q^n and the canonical local Hermite form.
//!
//! A basis is in canonical form when it is in row echelon form with respect
//! to the fixed coordinate order, every pivot is a power of p, and every
//! entry above a pivot p^k is the canonical representative of its class in
//! Q / p^k Z_(p). Two spans are equal iff their canonical bases are equal.

use super::mat2::Mat2;
use super::rat::{valuation, Rat, Valuation};
use crate::error::{Error, Result};

/// Canonical local Hermite form of the Z_(p)-span of `rows`.
pub fn local_hermite(rows: Vec<Vec<Rat>>, p: u64) -> Vec<Vec<Rat>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pending: Vec<Vec<Rat>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut pivots: Vec<(usize, i64)> = Vec::new();

    for col in 0..ncols {
        let best = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| !r[col].is_zero())
            .min_by_key(|(_, r)| valuation(&r[col], p))
            .map(|(i, _)| i);
        let Some(idx) = best else { continue };
        let mut pivot = pending.swap_remove(idx);
        let k = valuation(&pivot[col], p).unwrap();
        let unit = &Rat::pow_p(p, k) / &pivot[col];
        for x in pivot.iter_mut() {
            *x = &*x * &unit;
        }
        for row in pending.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let q = &row[col] / &pivot[col];
            for (x, y) in row.iter_mut().zip(pivot.iter()) {
                *x = &*x - &(&q * y);
            }
        }
        pending.retain(|r| r.iter().any(|x| !x.is_zero()));
        basis.push(pivot);
        pivots.push((col, k));
    }

    for i in 0..basis.len() {
        let (col, k) = pivots[i];
        for j in 0..i {
            let x = basis[j][col].clone();
            let rep = x.reduce_mod_pow(p, k);
            if rep == x {
                continue;
            }
            let q = &(&x - &rep) / &basis[i][col];
            let (head, tail) = basis.split_at_mut(i);
            for (a, b) in head[j].iter_mut().zip(tail[0].iter()) {
                *a = &*a - &(&q * b);
            }
        }
    }
    basis
}

/// Pivot columns and pivot exponents of a canonical basis.
fn pivot_data(basis: &[Vec<Rat>], p: u64) -> Vec<(usize, i64)> {
    basis
        .iter()
        .map(|row| {
            let col = row.iter().position(|x| !x.is_zero()).unwrap();
            (col, valuation(&row[col], p).unwrap())
        })
        .collect()
}

/// Membership of a vector in the span of a canonical basis.
pub fn span_contains(basis: &[Vec<Rat>], v: &[Rat], p: u64) -> bool {
    let mut x = v.to_vec();
    let piv = pivot_data(basis, p);
    let mut next = 0;
    for col in 0..x.len() {
        if next < piv.len() && piv[next].0 == col {
            let row = &basis[next];
            let c = &x[col] / &row[col];
            if !c.is_p_integral(p) {
                return false;
            }
            for (a, b) in x.iter_mut().zip(row.iter()) {
                *a = &*a - &(&c * b);
            }
            next += 1;
        } else if !x[col].is_zero() {
            return false;
        }
    }
    true
}

/// A Z_(p)-submodule of M2(Q), stored by its canonical basis (row-major
/// coordinates of the four matrix entries).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Module4 {
    prime: u64,
    basis: Vec<Vec<Rat>>,
}

impl Module4 {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<Mat2> {
        self.basis.iter().map(|r| Mat2::from_coords(r)).collect()
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn zero(p: u64) -> Module4 {
        Module4 {
            prime: p,
            basis: Vec::new(),
        }
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        span_contains(&self.basis, &m.coords(), self.prime)
    }

    pub fn contains_module(&self, other: &Module4) -> bool {
        other.basis.iter().all(|r| span_contains(&self.basis, r, self.prime))
    }

    pub fn sum(&self, other: &Module4) -> Result<Module4> {
        check_prime(self, other)?;
        let rows = self.basis.iter().chain(other.basis.iter()).cloned().collect();
        Ok(Module4 {
            prime: self.prime,
            basis: local_hermite(rows, self.prime),
        })
    }

    pub fn scale(&self, x: &Rat) -> Module4 {
        let rows = self
            .basis
            .iter()
            .map(|r| r.iter().map(|y| y * x).collect())
            .collect();
        Module4 {
            prime: self.prime,
            basis: local_hermite(rows, self.prime),
        }
    }

    /// The module Z_(p) + p^t * self.
    pub fn shifted(&self, t: u32) -> Module4 {
        let mut rows = vec![Mat2::identity().coords().to_vec()];
        let s = Rat::pow_p(self.prime, t as i64);
        rows.extend(self.basis.iter().map(|r| r.iter().map(|y| y * &s).collect()));
        Module4 {
            prime: self.prime,
            basis: local_hermite(rows, self.prime),
        }
    }

    /// Sum of the pivot exponents; for rank-4 modules this is v_p of the
    /// basis determinant and [A : B] = p^(det_exponent(B) - det_exponent(A)).
    pub fn det_exponent(&self) -> i64 {
        pivot_data(&self.basis, self.prime).iter().map(|&(_, k)| k).sum()
    }

    /// log_p of the index of `sub` in `self`, for rank-4 modules with sub inside self.
    pub fn index_exponent(&self, sub: &Module4) -> Option<i64> {
        if self.rank() != 4 || sub.rank() != 4 || !self.contains_module(sub) {
            return None;
        }
        Some(sub.det_exponent() - self.det_exponent())
    }

    pub fn min_valuation(&self) -> Valuation {
        self.basis
            .iter()
            .flatten()
            .map(|x| valuation(x, self.prime))
            .min()
            .unwrap_or(Valuation::Infinity)
    }
}

fn check_prime(a: &Module4, b: &Module4) -> Result<()> {
    if a.prime != b.prime {
        return Err(Error::PrimeMismatch(a.prime, b.prime));
    }
    Ok(())
}

/// Canonical basis of the Z_(p)-span of `gens`.
pub fn module_hnf(gens: &[Mat2], p: u64) -> Module4 {
    let rows = gens.iter().map(|g| g.coords().to_vec()).collect();
    Module4 {
        prime: p,
        basis: local_hermite(rows, p),
    }
}

/// A ∩ B, via the echelon form of [[A, A], [B, 0]].
pub fn module_intersect(a: &Module4, b: &Module4) -> Result<Module4> {
    check_prime(a, b)?;
    let p = a.prime;
    let zero = vec![Rat::zero(); 4];
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for r in &a.basis {
        rows.push(r.iter().chain(r.iter()).cloned().collect());
    }
    for r in &b.basis {
        rows.push(r.iter().chain(zero.iter()).cloned().collect());
    }
    let ech = local_hermite(rows, p);
    let meet = ech
        .into_iter()
        .filter(|r| r[..4].iter().all(Rat::is_zero))
        .map(|r| r[4..].to_vec())
        .collect();
    Ok(Module4 {
        prime: p,
        basis: local_hermite(meet, p),
    })
}

/// Intersection of a nonempty family.
pub fn module_intersect_all<'a, I>(mods: I) -> Result<Module4>
where
    I: IntoIterator<Item = &'a Module4>,
{
    let mut it = mods.into_iter();
    let first = it
        .next()
        .ok_or_else(|| Error::InvalidInput("empty intersection".into()))?
        .clone();
    it.try_fold(first, |acc, m| module_intersect(&acc, m))
}
