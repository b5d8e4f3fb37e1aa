//! Orders in M2(Q_p): closure of generator sets, membership in shifted
//! maximal orders, the shift H -> Z_(p) + p^t H, and shifted Eichler orders.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::branches::{branch_of_order, BranchShape};
use crate::bt_tree::{distance, geodesic, walk_away, Limits, Vertex, VertexJson};
use crate::error::{Error, Result};
use crate::exact_padic::squares::legendre;
use crate::exact_padic::{module_hnf, module_intersect, valuation, Mat2, Module4, Rat};

/// Closure rounds before giving up.
pub const CLOSURE_ROUNDS: usize = 64;
/// Consecutive strictly decreasing minimal valuations that count as divergence.
const DIVERGENCE_STREAK: usize = 6;
/// Residue combinations tried by the unramified-residue test.
pub const RESIDUE_BUDGET: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOrder {
    prime: u64,
    generators: Vec<Mat2>,
    closure: Module4,
}

impl LocalOrder {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn closure(&self) -> &Module4 {
        &self.closure
    }

    pub fn rank(&self) -> usize {
        self.closure.rank()
    }

    /// An order given directly as a multiplicatively closed module
    /// containing 1; the basis doubles as the generator list.
    pub fn from_module(closure: Module4) -> LocalOrder {
        LocalOrder {
            prime: closure.prime(),
            generators: closure.basis(),
            closure,
        }
    }

    pub fn same_order(&self, other: &LocalOrder) -> bool {
        self.closure == other.closure
    }
}

/// Wire form of an order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderJson {
    pub p: u64,
    pub generators: Vec<Mat2>,
}

/// The order (D_v1 ∩ D_v2)^[t].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedEichler {
    pub endpoints: (Vertex, Vertex),
    pub level: u32,
    pub shift: u32,
}

impl ShiftedEichler {
    pub fn new(v1: Vertex, v2: Vertex, shift: u32) -> ShiftedEichler {
        let level = distance(&v1, &v2);
        ShiftedEichler {
            endpoints: (v1, v2),
            level,
            shift,
        }
    }

    pub fn prime(&self) -> u64 {
        self.endpoints.0.prime()
    }

    pub fn module(&self) -> Module4 {
        eichler_module(&self.endpoints.0, &self.endpoints.1).shifted(self.shift)
    }

    pub fn order(&self) -> LocalOrder {
        LocalOrder::from_module(self.module())
    }

    pub fn to_json(&self) -> ShiftedEichlerJson {
        ShiftedEichlerJson {
            endpoints: [self.endpoints.0.to_json(), self.endpoints.1.to_json()],
            level: self.level,
            shift: self.shift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedEichlerJson {
    pub endpoints: [VertexJson; 2],
    pub level: u32,
    pub shift: u32,
}

/// The maximal order D_v = End(Λ_v) as a module.
pub fn maximal_order_module(v: &Vertex) -> Module4 {
    let g = v.basis();
    let gi = g.inverse().expect("vertex basis is invertible");
    let gens: Vec<Mat2> = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| &(&g * &Mat2::unit(i, j)) * &gi)
        .collect();
    module_hnf(&gens, v.prime())
}

/// D_v ∩ D_w.
pub fn eichler_module(v: &Vertex, w: &Vertex) -> Module4 {
    module_intersect(&maximal_order_module(v), &maximal_order_module(w)).expect("same prime")
}

/// Smallest Z_(p)-order containing the generators.
pub fn order_closure(generators: &[Mat2], p: u64) -> Result<LocalOrder> {
    if generators.is_empty() {
        return Err(Error::InvalidInput("empty generator list".into()));
    }
    let mut seed = vec![Mat2::identity()];
    seed.extend(generators.iter().cloned());
    let mut module = module_hnf(&seed, p);
    let mut certificate = vec![module.min_valuation().unwrap()];
    let mut streak = 0;
    for _ in 0..CLOSURE_ROUNDS {
        let basis = module.basis();
        let mut rows = basis.clone();
        for g in generators {
            rows.extend(basis.iter().map(|b| g * b));
        }
        let next = module_hnf(&rows, p);
        if next == module {
            return Ok(LocalOrder {
                prime: p,
                generators: generators.to_vec(),
                closure: module,
            });
        }
        let mv = next.min_valuation().unwrap();
        if mv < *certificate.last().unwrap() {
            streak += 1;
        } else {
            streak = 0;
        }
        certificate.push(mv);
        module = next;
        if streak >= DIVERGENCE_STREAK {
            break;
        }
    }
    Err(Error::Unbounded { certificate })
}

/// Whether h lies in D_v^[r] = Z_(p) + p^r D_v.
pub fn contains_shifted(v: &Vertex, h: &Mat2, r: u32) -> bool {
    let p = v.prime();
    let m = h.conjugate_by(&v.basis()).expect("vertex basis is invertible");
    let r = r as i64;
    m.is_p_integral(p)
        && valuation(m.get(0, 1), p).is_at_least(r)
        && valuation(m.get(1, 0), p).is_at_least(r)
        && valuation(&(m.get(0, 0) - m.get(1, 1)), p).is_at_least(r)
}

/// Whether the whole order lies in D_v^[r].
pub fn order_in_shifted(v: &Vertex, order: &LocalOrder, r: u32) -> bool {
    order.generators.iter().all(|g| contains_shifted(v, g, r))
}

/// The order Z_(p) + p^t H.
pub fn shift_order(order: &LocalOrder, t: u32) -> LocalOrder {
    LocalOrder::from_module(order.closure.shifted(t))
}

/// Recovers (endpoints, level, shift) for an order equal to a shifted Eichler
/// order. Orders of lower rank are never of that form.
pub fn decompose_shifted_eichler(order: &LocalOrder, limits: &Limits) -> Result<ShiftedEichler> {
    if order.rank() != 4 {
        return Err(Error::NotShiftedEichler);
    }
    let shape = branch_of_order(order, limits)?;
    let BranchShape::ThickPath { path, t } = shape else {
        return Err(Error::NotShiftedEichler);
    };
    let candidate = ShiftedEichler::new(path.first().clone(), path.last().clone(), t);
    if candidate.module() == *order.closure() {
        Ok(candidate)
    } else {
        Err(Error::NotShiftedEichler)
    }
}

/// Three maximal orders whose intersection is the given shifted Eichler order.
///
/// With path v1 .. v2 and shift r: the first lies r steps beyond v1 away from
/// v2, the second r steps beyond v2 away from v1, and the third r steps off
/// the path vertex nearest the midpoint, leaving through the first fresh
/// neighbor in canonical order.
pub fn three_maximal_orders(e: &ShiftedEichler) -> (Vertex, Vertex, Vertex) {
    let (v1, v2) = &e.endpoints;
    let path = geodesic(v1, v2);
    let d = path.len();
    let r = e.shift;
    let mid = path.vertices[d / 2].clone();
    if r == 0 {
        return (v1.clone(), v2.clone(), mid);
    }
    let on_path: BTreeSet<Vertex> = path.vertices.iter().cloned().collect();
    let d3 = walk_away(v1, r, &on_path);
    let mut avoid4 = on_path.clone();
    avoid4.extend(geodesic(v1, &d3).vertices);
    let d4 = walk_away(v2, r, &avoid4);
    let mut avoid5 = avoid4;
    avoid5.extend(geodesic(v2, &d4).vertices);
    let d5 = walk_away(&mid, r, &avoid5);
    (d3, d4, d5)
}

fn char_poly_irreducible_mod_p(h: &Mat2, p: u64) -> bool {
    let t = h.trace();
    let n = h.det();
    if !t.is_p_integral(p) || !n.is_p_integral(p) {
        return false;
    }
    let t = t.residue_mod(p, 1);
    let n = n.residue_mod(p, 1);
    if p == 2 {
        t == BigInt::from(1) && n == BigInt::from(1)
    } else {
        let disc = &t * &t - BigInt::from(4) * n;
        legendre(&disc, p) == -1
    }
}

/// Whether H/pH contains a copy of the quadratic extension of F_p, i.e. H
/// contains the maximal order of an unramified quadratic extension.
///
/// All residue combinations are tried when there are at most
/// `RESIDUE_BUDGET` of them; otherwise a fixed-seed random sample is used.
pub fn has_unramified_residue_field(order: &LocalOrder) -> bool {
    let p = order.prime;
    let basis = order.closure.basis();
    let k = basis.len() as u32;
    let combo = |coeffs: &[u64]| {
        basis
            .iter()
            .zip(coeffs)
            .fold(Mat2::zero(), |acc, (b, &c)| &acc + &b.scale(&Rat::from(c as i64)))
    };
    let total = (p as u128).pow(k);
    if total <= RESIDUE_BUDGET as u128 {
        let mut coeffs = vec![0u64; k as usize];
        for idx in 0..total {
            let mut x = idx;
            for c in coeffs.iter_mut() {
                *c = (x % p as u128) as u64;
                x /= p as u128;
            }
            if char_poly_irreducible_mod_p(&combo(&coeffs), p) {
                return true;
            }
        }
        false
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..RESIDUE_BUDGET).any(|_| {
            let coeffs: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
            char_poly_irreducible_mod_p(&combo(&coeffs), p)
        })
    }
}
