use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlat_core::branches::{branch_of_order, deepen, enumerate_branch, BranchShape};
use qlat_core::bt_tree::{ball, distance, is_connected, neighbors, set_diameter, Limits, Vertex};
use qlat_core::exact_padic::{module_intersect, module_intersect_all, Mat2, Rat};
use qlat_core::local_orders::{
    contains_shifted, decompose_shifted_eichler, has_unramified_residue_field, maximal_order_module,
    order_closure, shift_order, three_maximal_orders, LocalOrder,
};
use qlat_core::sampling::{random_int_matrix, random_integral_order, random_shifted_eichler, random_vertex};
use qlat_core::spinor_local::{find_pair, odd_pair_oracle, spinor_image, SpinorImage};
use qlat_core::Error;

fn small_limits() -> Limits {
    Limits { max_vertices: 20_000 }
}

/// Orders mixing generic, diagonalizable and nilpotent generators, so that
/// every symbolic shape kind shows up.
fn structured_order(p: u64, rng: &mut ChaCha8Rng) -> Option<LocalOrder> {
    let count = rng.gen_range(1..=3);
    let mut gens = Vec::new();
    for _ in 0..count {
        let g = loop {
            let g = random_int_matrix(2, rng);
            if !g.det().is_zero() {
                break g;
            }
        };
        let gi = g.inverse().unwrap();
        let k = rng.gen_range(0..=2);
        let core = match rng.gen_range(0..3) {
            0 => random_int_matrix(p as i64, rng),
            1 => Mat2::diag(Rat::from(rng.gen_range(-3..=3)), Rat::from(rng.gen_range(-3..=3))),
            _ => Mat2::from_ints(0, 1, 0, 0),
        };
        gens.push((&(&g * &core) * &gi).scale(&Rat::pow_p(p, k)));
    }
    order_closure(&gens, p).ok()
}

#[test]
fn shift_commutes_with_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2u64, 3] {
        for _ in 0..20 {
            let h1 = random_integral_order(p, 2, &mut rng);
            let h2 = random_integral_order(p, 2, &mut rng);
            let meet = module_intersect(h1.closure(), h2.closure()).unwrap();
            for s in 0..=3 {
                let lhs = meet.shifted(s);
                let rhs = module_intersect(&h1.closure().shifted(s), &h2.closure().shifted(s)).unwrap();
                assert_eq!(lhs, rhs);
                for t in 0..=2 {
                    assert_eq!(h1.closure().shifted(s).shifted(t), h1.closure().shifted(s + t));
                }
            }
        }
    }
}

#[test]
fn shifted_containment_is_independent_of_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [2u64, 3] {
        for _ in 0..20 {
            let h = random_integral_order(p, 2, &mut rng);
            let h1 = random_integral_order(p, 1, &mut rng);
            let verdicts: Vec<bool> = (0..=3)
                .map(|s| h1.closure().shifted(s).contains_module(&h.closure().shifted(s)))
                .collect();
            assert!(verdicts.iter().all(|&v| v == verdicts[0]), "{verdicts:?}");
        }
    }
}

#[test]
fn shifted_maximal_order_is_intersection_over_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let lim = Limits::default();
    for p in [2u64, 3] {
        for t in 1..=2 {
            let v = random_vertex(p, 3, &mut rng);
            let mods: Vec<_> = ball(&v, t, &lim).unwrap().iter().map(maximal_order_module).collect();
            assert_eq!(module_intersect_all(&mods).unwrap(), maximal_order_module(&v).shifted(t));
        }
    }
}

#[test]
fn shifted_membership_matches_modules() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for p in [2u64, 3, 5] {
        for _ in 0..40 {
            let v = random_vertex(p, 3, &mut rng);
            let r = rng.gen_range(0..=2);
            let h = random_int_matrix(9, &mut rng).scale(&Rat::pow_p(p, rng.gen_range(-1..=2)));
            assert_eq!(contains_shifted(&v, &h, r), maximal_order_module(&v).shifted(r).contains(&h));
        }
    }
}

#[test]
fn residue_field_detects_unique_maximal_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let lim = Limits::default();
    let mut seen = [0usize; 2];
    for p in [2u64, 3] {
        for _ in 0..30 {
            let h = random_integral_order(p, 2, &mut rng);
            if h.rank() != 4 {
                continue;
            }
            // the sampled order lies in a maximal order within distance 2 of the standard vertex
            let region = enumerate_branch(&h, 0, &Vertex::standard(p), 2, &lim).unwrap();
            let Some(c) = region.iter().next() else { continue };
            let near = enumerate_branch(&h, 0, c, 1, &lim).unwrap();
            let unique = near.len() == 1;
            seen[unique as usize] += 1;
            assert_eq!(has_unramified_residue_field(&h), unique);
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn symbolic_branches_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let lim = small_limits();
    let mut kinds = HashSet::new();
    for p in [2u64, 3, 5] {
        let mut checked = 0;
        while checked < 12 {
            let Some(h) = structured_order(p, &mut rng) else { continue };
            let shape = match branch_of_order(&h, &lim) {
                Ok(s) => s,
                Err(Error::InfiniteUnsupported { .. } | Error::IrrationalEnds(_) | Error::BudgetExceeded { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            checked += 1;
            let Some(center) = shape.anchor(p) else { continue };
            let radius = if p == 5 { 4 } else { 5 };
            let enumerated = enumerate_branch(&h, 0, &center, radius, &lim).unwrap();
            for v in ball(&center, radius, &lim).unwrap() {
                assert_eq!(shape.contains(&v), enumerated.contains(&v), "{shape} at {v}");
            }
            assert!(is_connected(&enumerated));
            kinds.insert(std::mem::discriminant(&shape));
        }
    }
    assert!(kinds.len() >= 4, "only {} shape kinds sampled", kinds.len());
}

#[test]
fn neighborhood_and_reindexing_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let lim = Limits::default();
    for p in [2u64, 3] {
        for _ in 0..6 {
            let Some(h) = structured_order(p, &mut rng) else { continue };
            let c = Vertex::standard(p);
            let radius = 4;
            let s0 = enumerate_branch(&h, 0, &c, radius, &lim).unwrap();
            let s1 = enumerate_branch(&shift_order(&h, 1), 0, &c, radius - 1, &lim).unwrap();
            let inner = ball(&c, radius - 1, &lim).unwrap();
            let hood: BTreeSet<Vertex> = inner
                .iter()
                .filter(|v| s0.contains(v) || neighbors(v).iter().any(|n| s0.contains(n)))
                .cloned()
                .collect();
            assert_eq!(s1, hood);

            for r in 0..=1 {
                for t in 0..=1 {
                    for k in 0..=1 {
                        let lhs = enumerate_branch(&shift_order(&h, k + t), r + t, &c, 3, &lim).unwrap();
                        let rhs = enumerate_branch(&shift_order(&h, k), r, &c, 3, &lim).unwrap();
                        assert_eq!(lhs, rhs, "r={r} t={t} k={k}");
                    }
                }
            }

            let deep = enumerate_branch(&h, 1, &c, radius - 1, &lim).unwrap();
            let literal: BTreeSet<Vertex> = inner
                .iter()
                .filter(|v| s0.contains(v) && neighbors(v).iter().all(|n| s0.contains(n)))
                .cloned()
                .collect();
            assert_eq!(deep, literal);

            if let Ok(shape) = branch_of_order(&h, &small_limits()) {
                let d = deepen(&shape, 1);
                for v in &inner {
                    assert_eq!(d.contains(v), literal.contains(v));
                }
            }
        }
    }
}

#[test]
fn branch_containment_forces_order_containment() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let lim = Limits::default();
    let mut hits = 0;
    for p in [2u64, 3] {
        for _ in 0..30 {
            let e = random_shifted_eichler(p, 2, 1, &mut rng);
            let target = BranchShape::ThickPath {
                path: qlat_core::bt_tree::geodesic(&e.endpoints.0, &e.endpoints.1),
                t: e.shift,
            };
            let verts = target.vertices(&lim).unwrap();
            let candidates = [
                random_integral_order(p, 1, &mut rng),
                shift_order(&random_shifted_eichler(p, 1, 1, &mut rng).order(), 0),
                LocalOrder::from_module(maximal_order_module(&e.endpoints.0)),
                shift_order(&e.order(), 1),
            ];
            for h in candidates {
                let holds = verts
                    .iter()
                    .all(|v| h.generators().iter().all(|g| contains_shifted(v, g, 0)));
                if holds {
                    hits += 1;
                    assert!(e.module().contains_module(h.closure()));
                }
            }
        }
    }
    assert!(hits > 10);
}

#[test]
fn spinor_decision_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let lim = Limits::default();
    let mut outcomes = [0usize; 3];
    for p in [2u64, 3] {
        for _ in 0..25 {
            let e = random_shifted_eichler(p, 2, 2, &mut rng);
            let shape = BranchShape::ThickPath {
                path: qlat_core::bt_tree::geodesic(&e.endpoints.0, &e.endpoints.1),
                t: e.shift,
            };
            let d = rng.gen_range(0..=4);
            let r = rng.gen_range(0..=1);
            let center = e.endpoints.0.clone();
            let set = enumerate_branch(&e.order(), r, &center, e.level + 2 * e.shift + 1, &lim).unwrap();
            let decision = spinor_image(&shape, d, r);
            match find_pair(&set, d) {
                None => {
                    assert_eq!(decision, SpinorImage::NoEmbedding);
                    outcomes[2] += 1;
                }
                Some((a, b)) => {
                    let odd = odd_pair_oracle(&set, d, (&a, &b)).unwrap();
                    assert_eq!(odd, decision == SpinorImage::FullNormGroup, "{shape} d={d} r={r}");
                    outcomes[odd as usize] += 1;
                }
            }
            // diametral pairs of an even-diameter tree set are at even mutual distances
            if !set.is_empty() {
                let delta = set_diameter(&set);
                if delta.is_multiple_of(2) {
                    let pairs: Vec<(&Vertex, &Vertex)> = set
                        .iter()
                        .flat_map(|x| set.iter().filter(move |y| distance(x, y) == delta).map(move |y| (x, y)))
                        .collect();
                    for (x1, _) in &pairs {
                        for (x3, _) in &pairs {
                            assert_eq!(distance(x1, x3) % 2, 0);
                        }
                    }
                }
            }
        }
    }
    assert!(outcomes.iter().all(|&c| c > 0), "{outcomes:?}");
}

#[test]
fn three_maximal_orders_and_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let lim = Limits::default();
    for p in [2u64, 3] {
        for _ in 0..15 {
            let e = random_shifted_eichler(p, 3, 2, &mut rng);
            let (a, b, c) = three_maximal_orders(&e);
            let meet = module_intersect_all(&[a, b, c].iter().map(maximal_order_module).collect::<Vec<_>>()).unwrap();
            assert_eq!(meet, e.module());
            let back = decompose_shifted_eichler(&e.order(), &lim).unwrap();
            assert_eq!((back.level, back.shift), (e.level, e.shift));
            let ends: BTreeSet<_> = [back.endpoints.0, back.endpoints.1].into();
            assert_eq!(ends, [e.endpoints.0.clone(), e.endpoints.1.clone()].into());
        }
    }
}
