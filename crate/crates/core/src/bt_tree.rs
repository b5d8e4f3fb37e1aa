//! The Bruhat-Tits tree of PGL2(Q_p).
//!
//! A vertex is the homothety class of a rank-2 Z_(p)-lattice, stored as the
//! canonical triple (a, b, c) of the column basis [[p^a, c], [0, p^b]] with
//! 0 <= c < p^a and min(a, b, v_p(c)) = 0.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_padic::rat::{int_valuation, valuation, Rat, Valuation};
use crate::exact_padic::Mat2;

pub const DEFAULT_MAX_VERTICES: usize = 200_000;

/// Resource caps for exponential tree enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    prime: u64,
    a: u32,
    b: u32,
    c: BigInt,
}

impl Vertex {
    /// The class of the standard lattice Z_(p)^2.
    pub fn standard(p: u64) -> Vertex {
        Vertex {
            prime: p,
            a: 0,
            b: 0,
            c: BigInt::zero(),
        }
    }

    /// Builds a vertex from a triple, rejecting non-canonical input.
    pub fn from_triple(p: u64, a: u32, b: u32, c: BigInt) -> Result<Vertex> {
        let bound = BigInt::from(p).pow(a);
        if c < BigInt::zero() || c >= bound {
            return Err(Error::InvalidInput(format!("c = {c} not in [0, {p}^{a})")));
        }
        let vc = if c.is_zero() {
            u32::MAX
        } else {
            int_valuation(&c, p) as u32
        };
        if a.min(b).min(vc) != 0 {
            return Err(Error::InvalidInput(format!(
                "triple ({a}, {b}, {c}) is not primitive"
            )));
        }
        Ok(Vertex { prime: p, a, b, c })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn triple(&self) -> (u32, u32, &BigInt) {
        (self.a, self.b, &self.c)
    }

    /// Column basis [[p^a, c], [0, p^b]] of the representative lattice.
    pub fn basis(&self) -> Mat2 {
        Mat2::new(
            Rat::pow_p(self.prime, self.a as i64),
            Rat::from_int(self.c.clone()),
            Rat::zero(),
            Rat::pow_p(self.prime, self.b as i64),
        )
    }

    pub fn to_json(&self) -> VertexJson {
        VertexJson {
            a: self.a,
            b: self.b,
            c: self.c.to_string(),
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Wire form of a vertex; the prime lives in the enclosing object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub a: u32,
    pub b: u32,
    pub c: String,
}

impl VertexJson {
    pub fn into_vertex(&self, p: u64) -> Result<Vertex> {
        let c: BigInt = self
            .c
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad vertex coordinate {:?}", self.c)))?;
        Vertex::from_triple(p, self.a, self.b, c)
    }
}

/// A path in the tree, consecutive vertices adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreePath {
    pub vertices: Vec<Vertex>,
}

impl TreePath {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> &Vertex {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Vertex {
        self.vertices.last().unwrap()
    }

    /// Same path listed from whichever endpoint is smaller.
    pub fn normalized(mut self) -> TreePath {
        if self.vertices.last() < self.vertices.first() {
            self.vertices.reverse();
        }
        self
    }

    /// Distance from `v` to the nearest vertex of the path.
    pub fn distance_to(&self, v: &Vertex) -> u32 {
        self.vertices.iter().map(|w| distance(v, w)).min().unwrap()
    }
}

/// Canonical vertex of the homothety class of the column span of `basis`.
pub fn canonical_vertex(basis: &Mat2, p: u64) -> Result<Vertex> {
    if basis.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let g = &basis.entries;
    let (j, k) = if valuation(&g[1][0], p) <= valuation(&g[1][1], p) {
        (0, 1)
    } else {
        (1, 0)
    };
    let b = valuation(&g[1][j], p).unwrap();
    // w: column j scaled by a unit so its second coordinate is p^b
    let unit = &Rat::pow_p(p, b) / &g[1][j];
    let w0 = &g[0][j] * &unit;
    // u: column k with its second coordinate cleared
    let q = &g[1][k] / &Rat::pow_p(p, b);
    let u0 = &g[0][k] - &(&q * &w0);
    let a = valuation(&u0, p).unwrap();
    let c0 = w0.reduce_mod_pow(p, a);
    let vc = match valuation(&c0, p) {
        Valuation::Finite(v) => v,
        Valuation::Infinity => i64::MAX,
    };
    let m = a.min(b).min(vc);
    let (a, b) = ((a - m) as u32, (b - m) as u32);
    let c = if a == 0 {
        BigInt::zero()
    } else {
        (&c0 * &Rat::pow_p(p, -m)).residue_mod(p, a)
    };
    Ok(Vertex { prime: p, a, b, c })
}

/// Tree distance, from the elementary divisors of the change of basis
/// between the two representative lattices.
pub fn distance(v: &Vertex, w: &Vertex) -> u32 {
    debug_assert_eq!(v.prime, w.prime);
    let p = v.prime;
    let (a, b, a2, b2) = (v.a as i64, v.b as i64, w.a as i64, w.b as i64);
    let pb = BigInt::from(p);
    let mixed = &w.c * pb.pow(v.b) - &v.c * pb.pow(w.b);
    let vm = if mixed.is_zero() {
        i64::MAX
    } else {
        int_valuation(&mixed, p)
    };
    let e = (b + a2).min(vm).min(a + b2);
    (a + b + a2 + b2 - 2 * e) as u32
}

/// The p+1 vertices adjacent to `v`.
pub fn neighbors(v: &Vertex) -> Vec<Vertex> {
    let p = v.prime;
    let g = v.basis();
    let mut out = Vec::with_capacity(p as usize + 1);
    for k in 0..p {
        let step = Mat2::new(
            Rat::from_int(p),
            Rat::from_int(k),
            Rat::zero(),
            Rat::one(),
        );
        out.push(canonical_vertex(&(&g * &step), p).expect("invertible"));
    }
    let step = Mat2::diag(Rat::one(), Rat::from_int(p));
    out.push(canonical_vertex(&(&g * &step), p).expect("invertible"));
    out
}

/// The neighbor of `v` one step closer to `w`; `v` itself when equal.
pub fn step_toward(v: &Vertex, w: &Vertex) -> Vertex {
    let d = distance(v, w);
    if d == 0 {
        return v.clone();
    }
    neighbors(v)
        .into_iter()
        .find(|n| distance(n, w) + 1 == d)
        .expect("tree geodesic step")
}

/// The unique path from `v` to `w`.
pub fn geodesic(v: &Vertex, w: &Vertex) -> TreePath {
    let mut vertices = vec![v.clone()];
    let mut cur = v.clone();
    while cur != *w {
        cur = step_toward(&cur, w);
        vertices.push(cur.clone());
    }
    TreePath { vertices }
}

/// Number of vertices at distance <= r in a (p+1)-regular tree.
pub fn ball_size(p: u64, r: u32) -> u128 {
    let p = p as u128;
    let mut total = 1u128;
    let mut layer = p + 1;
    for _ in 0..r {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(p);
    }
    total
}

/// All vertices within distance `r` of `v`.
pub fn ball(v: &Vertex, r: u32, limits: &Limits) -> Result<BTreeSet<Vertex>> {
    let needed = ball_size(v.prime, r);
    if needed > limits.max_vertices as u128 {
        return Err(Error::ResourceLimit {
            needed,
            cap: limits.max_vertices,
        });
    }
    let mut seen = BTreeSet::new();
    seen.insert(v.clone());
    let mut frontier = vec![v.clone()];
    for _ in 0..r {
        let mut next = Vec::new();
        for u in &frontier {
            for n in neighbors(u) {
                if seen.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    Ok(seen)
}

/// Connected component of `seed` inside the set described by `member`.
///
/// Fails with `BudgetExceeded` once the component grows past the cap.
pub fn flood_fill<F>(seed: &Vertex, member: F, limits: &Limits, context: &str) -> Result<BTreeSet<Vertex>>
where
    F: Fn(&Vertex) -> bool,
{
    let mut seen = BTreeSet::new();
    if !member(seed) {
        return Ok(seen);
    }
    seen.insert(seed.clone());
    let mut queue = VecDeque::from([seed.clone()]);
    let mut rejected = BTreeSet::new();
    while let Some(u) = queue.pop_front() {
        for n in neighbors(&u) {
            if seen.contains(&n) || rejected.contains(&n) {
                continue;
            }
            if member(&n) {
                seen.insert(n.clone());
                if seen.len() > limits.max_vertices {
                    return Err(Error::BudgetExceeded {
                        cap: limits.max_vertices,
                        context: context.to_string(),
                    });
                }
                queue.push_back(n);
            } else {
                rejected.insert(n);
            }
        }
    }
    Ok(seen)
}

/// Whether the vertex set is connected in the tree.
pub fn is_connected(set: &BTreeSet<Vertex>) -> bool {
    let Some(first) = set.iter().next() else {
        return true;
    };
    let comp = flood_fill(first, |v| set.contains(v), &Limits { max_vertices: usize::MAX }, "")
        .expect("unbounded cap");
    comp.len() == set.len()
}

/// Diameter of a finite vertex set by pairwise distances.
pub fn set_diameter(set: &BTreeSet<Vertex>) -> u32 {
    let vs: Vec<&Vertex> = set.iter().collect();
    let mut best = 0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            best = best.max(distance(vs[i], vs[j]));
        }
    }
    best
}

/// Deterministic undirected DOT rendering of the induced subgraph.
pub fn export_dot(vertices: &BTreeSet<Vertex>, highlights: &BTreeMap<Vertex, String>) -> String {
    let mut out = String::from("graph tree {\n");
    for v in vertices {
        match highlights.get(v) {
            Some(label) => {
                let _ = writeln!(
                    out,
                    "  \"{v}\" [label=\"{v}\\n{}\", style=filled];",
                    label.replace('"', "\\\"")
                );
            }
            None => {
                let _ = writeln!(out, "  \"{v}\";");
            }
        }
    }
    for v in vertices {
        for w in neighbors(v) {
            if v < &w && vertices.contains(&w) {
                let _ = writeln!(out, "  \"{v}\" -- \"{w}\";");
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Vertex reached from `v` by trying neighbor directions in canonical order,
/// `steps` times, each step strictly increasing the distance from `v` and
/// never entering `avoid` on the first step.
pub fn walk_away(v: &Vertex, steps: u32, avoid: &BTreeSet<Vertex>) -> Vertex {
    let mut cur = v.clone();
    for i in 0..steps {
        let mut ns = neighbors(&cur);
        ns.sort();
        cur = ns
            .into_iter()
            .find(|n| distance(n, v) == i + 1 && (i > 0 || !avoid.contains(n)))
            .expect("fresh direction exists");
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_padic::smith_local;
    use proptest::prelude::*;

    fn v(p: u64, a: u32, b: u32, c: i64) -> Vertex {
        Vertex::from_triple(p, a, b, BigInt::from(c)).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_vertex(&Mat2::identity(), 3).unwrap(), v(3, 0, 0, 0));
        assert_eq!(canonical_vertex(&Mat2::from_ints(9, 0, 0, 1), 3).unwrap(), v(3, 2, 0, 0));
        let m = Mat2::diag(Rat::frac(1, 3), Rat::from(3));
        assert_eq!(canonical_vertex(&m, 3).unwrap(), v(3, 0, 2, 0));
        assert_eq!(canonical_vertex(&Mat2::from_ints(1, 2, 2, 4), 3), Err(Error::SingularMatrix));
    }

    #[test]
    fn canonical_membership_oracle() {
        // diag(1/3, 3) spans the same lattice class as diag(1, 9): both
        // spanning vectors of one lie in the other after scaling by 3.
        let w = canonical_vertex(&Mat2::diag(Rat::frac(1, 3), Rat::from(3)), 3).unwrap();
        let lattice = w.basis();
        let inv = lattice.inverse().unwrap();
        let scaled = Mat2::diag(Rat::from(1), Rat::from(9));
        let coords = &inv * &scaled;
        assert!(coords.is_p_integral(3));
        assert_eq!(coords.det().valuation(3), Valuation::Finite(0));
    }

    #[test]
    fn from_triple_validation() {
        assert!(Vertex::from_triple(3, 1, 1, BigInt::zero()).is_err());
        assert!(Vertex::from_triple(3, 1, 0, BigInt::from(3)).is_err());
        assert!(Vertex::from_triple(3, 1, 1, BigInt::from(1)).is_ok());
    }

    #[test]
    fn distance_examples() {
        let s = Vertex::standard(3);
        assert_eq!(distance(&s, &s), 0);
        let d1 = canonical_vertex(&Mat2::from_ints(3, 0, 0, 1), 3).unwrap();
        assert_eq!(distance(&s, &d1), 1);
        let d2 = canonical_vertex(&Mat2::from_ints(9, 1, 0, 1), 3).unwrap();
        assert_eq!(distance(&s, &d2), 2);
        // cross-check against BFS
        let b1 = ball(&s, 1, &Limits::default()).unwrap();
        assert!(!b1.contains(&d2));
        assert!(ball(&s, 2, &Limits::default()).unwrap().contains(&d2));
    }

    #[test]
    fn neighbor_examples() {
        let s2 = Vertex::standard(2);
        let ns = neighbors(&s2);
        assert_eq!(ns.len(), 3);
        assert_eq!(ns.iter().collect::<BTreeSet<_>>().len(), 3);
        assert!(ns.iter().all(|n| distance(n, &s2) == 1));
        let s5 = Vertex::standard(5);
        let ns = neighbors(&s5);
        assert_eq!(ns.len(), 6);
        for n in &ns {
            assert!(neighbors(n).contains(&s5));
        }
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                assert_eq!(distance(&ns[i], &ns[j]), 2);
            }
        }
    }

    #[test]
    fn geodesic_examples() {
        let p = 3;
        let s = Vertex::standard(p);
        assert_eq!(geodesic(&s, &s).vertices, vec![s.clone()]);
        let n = neighbors(&s)[0].clone();
        assert_eq!(geodesic(&s, &n).vertices, vec![s.clone(), n.clone()]);
        let d3 = canonical_vertex(&Mat2::from_ints(27, 0, 0, 1), p).unwrap();
        let path = geodesic(&s, &d3);
        assert_eq!(path.vertices.len(), 4);
        for (i, x) in path.vertices.iter().enumerate() {
            let diag = canonical_vertex(&Mat2::from_ints(3i64.pow(i as u32), 0, 0, 1), p).unwrap();
            assert_eq!(x, &diag);
            assert_eq!(distance(&s, x) + distance(x, &d3), 3);
        }
    }

    #[test]
    fn ball_sizes() {
        let lim = Limits::default();
        assert_eq!(ball(&Vertex::standard(2), 0, &lim).unwrap().len(), 1);
        assert_eq!(ball(&Vertex::standard(2), 2, &lim).unwrap().len(), 10);
        assert_eq!(ball(&Vertex::standard(3), 3, &lim).unwrap().len(), 53);
        for p in [2u64, 3, 5] {
            for r in 0..4 {
                assert_eq!(
                    ball(&Vertex::standard(p), r, &lim).unwrap().len() as u128,
                    ball_size(p, r)
                );
            }
        }
        let small = Limits { max_vertices: 9 };
        assert!(matches!(
            ball(&Vertex::standard(2), 2, &small),
            Err(Error::ResourceLimit { needed: 10, cap: 9 })
        ));
    }

    #[test]
    fn dot_examples() {
        let empty = BTreeSet::new();
        assert_eq!(export_dot(&empty, &BTreeMap::new()), "graph tree {\n}\n");
        let s = Vertex::standard(2);
        let edge: BTreeSet<_> = [s.clone(), neighbors(&s)[0].clone()].into_iter().collect();
        let dot = export_dot(&edge, &BTreeMap::new());
        assert_eq!(dot.matches(" -- ").count(), 1);
        let star = ball(&s, 1, &Limits::default()).unwrap();
        let mut hl = BTreeMap::new();
        hl.insert(s.clone(), "root".to_string());
        let dot = export_dot(&star, &hl);
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert_eq!(dot.lines().filter(|l| l.starts_with("  \"") && !l.contains(" -- ")).count(), 4);
        assert!(dot.contains("root"));
        assert_eq!(dot, export_dot(&star, &hl));
    }

    fn unimodular(p: u64) -> impl Strategy<Value = Mat2> {
        proptest::array::uniform4(-9i64..10).prop_filter_map("unit det", move |e| {
            let m = Mat2::from_ints(e[0], e[1], e[2], e[3]);
            (m.det().valuation(p) == Valuation::Finite(0)).then_some(m)
        })
    }

    fn lattice(p: u64) -> impl Strategy<Value = Mat2> {
        proptest::array::uniform4((-30i64..30, 0u32..3)).prop_filter_map("invertible", move |e| {
            let m = Mat2::new(
                Rat::frac(e[0].0, (p as i64).pow(e[0].1)),
                Rat::frac(e[1].0, (p as i64).pow(e[1].1)),
                Rat::frac(e[2].0, 1),
                Rat::frac(e[3].0, (p as i64).pow(e[3].1)),
            );
            (!m.det().is_zero()).then_some(m)
        })
    }

    proptest! {
        #[test]
        fn canonical_invariance(
            (p, g, u) in (0usize..3).prop_flat_map(|i| {
                let p = [2u64, 3, 5][i];
                (Just(p), lattice(p), unimodular(p))
            }),
            k in -3i64..4,
        ) {
            let v0 = canonical_vertex(&g, p).unwrap();
            let moved = (&g * &u).scale(&Rat::pow_p(p, k));
            prop_assert_eq!(canonical_vertex(&moved, p).unwrap(), v0.clone());
            prop_assert_eq!(canonical_vertex(&v0.basis(), p).unwrap(), v0);
        }

        #[test]
        fn distance_matches_smith(g in lattice(3), h in lattice(3)) {
            let p = 3;
            let v = canonical_vertex(&g, p).unwrap();
            let w = canonical_vertex(&h, p).unwrap();
            let change = &v.basis().inverse().unwrap() * &w.basis();
            let (e1, e2) = smith_local(&change, p).unwrap();
            prop_assert_eq!(distance(&v, &w) as i64, e2 - e1);
            prop_assert_eq!(distance(&v, &w), distance(&w, &v));
            prop_assert_eq!(distance(&v, &w) == 0, v == w);
        }

        #[test]
        fn geodesic_is_tight(g in lattice(2), h in lattice(2), k in lattice(2)) {
            let p = 2;
            let (u, w, x) = (
                canonical_vertex(&g, p).unwrap(),
                canonical_vertex(&h, p).unwrap(),
                canonical_vertex(&k, p).unwrap(),
            );
            prop_assert!(distance(&u, &w) <= distance(&u, &x) + distance(&x, &w));
            let path = geodesic(&u, &w);
            prop_assert_eq!(path.len() as u32, distance(&u, &w));
            prop_assert_eq!(path.vertices.iter().collect::<BTreeSet<_>>().len(), path.vertices.len());
            for y in &path.vertices {
                prop_assert_eq!(distance(&u, y) + distance(y, &w), distance(&u, &w));
            }
            for pair in path.vertices.windows(2) {
                prop_assert_eq!(distance(&pair[0], &pair[1]), 1);
            }
        }

        #[test]
        fn neighbors_are_canonical(g in lattice(3)) {
            let v = canonical_vertex(&g, 3).unwrap();
            let ns = neighbors(&v);
            prop_assert_eq!(ns.iter().collect::<BTreeSet<_>>().len(), 4);
            for n in &ns {
                prop_assert_eq!(&canonical_vertex(&n.basis(), 3).unwrap(), n);
                prop_assert_eq!(distance(n, &v), 1);
            }
        }
    }

    /// Diametral pairs of an even-diameter finite subtree sit at even
    /// distance from each other.
    #[test]
    fn even_diameter_parity_on_finite_subtrees() {
        let lim = Limits::default();
        for p in [2u64, 3] {
            let s = Vertex::standard(p);
            let mut samples: Vec<BTreeSet<Vertex>> = Vec::new();
            for r in 1..=2 {
                samples.push(ball(&s, r, &lim).unwrap());
            }
            // thick paths around a geodesic of length 2
            let far = walk_away(&s, 2, &BTreeSet::new());
            let path = geodesic(&s, &far);
            for t in 0..=1 {
                let region = ball(&s, 2 + t, &lim).unwrap();
                samples.push(region.into_iter().filter(|v| path.distance_to(v) <= t).collect());
            }
            for set in samples {
                let d = set_diameter(&set);
                if !d.is_multiple_of(2) {
                    continue;
                }
                let vs: Vec<&Vertex> = set.iter().collect();
                let pairs: Vec<(&Vertex, &Vertex)> = vs
                    .iter()
                    .flat_map(|x| vs.iter().map(move |y| (*x, *y)))
                    .filter(|(x, y)| distance(x, y) == d)
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
