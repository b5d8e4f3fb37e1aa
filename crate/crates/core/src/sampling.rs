//! Seeded random instances: vertices, orders and shifted Eichler orders.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bt_tree::{distance, neighbors, Vertex};
use crate::exact_padic::{Mat2, Rat};
use crate::local_orders::{order_closure, LocalOrder, ShiftedEichler};

/// End point of a non-backtracking random walk, so at distance exactly `steps`.
pub fn random_walk<R: Rng>(start: &Vertex, steps: u32, rng: &mut R) -> Vertex {
    let mut cur = start.clone();
    for i in 0..steps {
        let ns: Vec<Vertex> = neighbors(&cur)
            .into_iter()
            .filter(|n| distance(n, start) == i + 1)
            .collect();
        cur = ns.choose(rng).expect("fresh direction").clone();
    }
    cur
}

pub fn random_vertex<R: Rng>(p: u64, max_depth: u32, rng: &mut R) -> Vertex {
    let depth = rng.gen_range(0..=max_depth);
    random_walk(&Vertex::standard(p), depth, rng)
}

pub fn random_int_matrix<R: Rng>(bound: i64, rng: &mut R) -> Mat2 {
    let mut e = || rng.gen_range(-bound..=bound);
    Mat2::from_ints(e(), e(), e(), e())
}

/// An order generated by `count` random elements of D_v scaled by random
/// powers of p, with v a random vertex near the standard one.
pub fn random_integral_order<R: Rng>(p: u64, count: usize, rng: &mut R) -> LocalOrder {
    let v = random_vertex(p, 2, rng);
    let g = v.basis();
    let gi = g.inverse().expect("lattice basis");
    let gens: Vec<Mat2> = (0..count)
        .map(|_| {
            let m = random_int_matrix(p as i64 + 1, rng);
            let k = rng.gen_range(0..=2);
            (&(&g * &m) * &gi).scale(&Rat::pow_p(p, k))
        })
        .collect();
    order_closure(&gens, p).expect("elements of a maximal order generate an order")
}

pub fn random_shifted_eichler<R: Rng>(p: u64, max_level: u32, max_shift: u32, rng: &mut R) -> ShiftedEichler {
    let v1 = random_vertex(p, 2, rng);
    let d = rng.gen_range(0..=max_level);
    let v2 = random_walk(&v1, d, rng);
    ShiftedEichler::new(v1, v2, rng.gen_range(0..=max_shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2u64, 3] {
            for _ in 0..10 {
                let v = Vertex::standard(p);
                assert_eq!(distance(&v, &random_walk(&v, 3, &mut rng)), 3);
                let h = random_integral_order(p, 2, &mut rng);
                assert!(h.closure().contains(&Mat2::identity()));
                let e = random_shifted_eichler(p, 3, 2, &mut rng);
                assert_eq!(e.level, distance(&e.endpoints.0, &e.endpoints.1));
            }
        }
    }
}
