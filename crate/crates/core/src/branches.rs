//! Branches S_r(H) of orders on the Bruhat-Tits tree, in symbolic form.
//!
//! Ends of the tree are lines in Q^2. Membership in the infinite shapes is
//! decided with the horofunction of an end, `busemann`, which drops by one
//! on every step toward that end.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bt_tree::{
    ball, ball_size, canonical_vertex, distance, flood_fill, geodesic, neighbors, Limits, TreePath,
    Vertex, VertexJson,
};
use crate::error::{Error, Result};
use crate::exact_padic::lattice::local_hermite;
use crate::exact_padic::squares::is_square_qp;
use crate::exact_padic::{valuation, Mat2, Rat};
use crate::local_orders::{contains_shifted, order_closure, LocalOrder, ShiftedEichler};

/// A line in Q^2, stored as a primitive integer vector whose first nonzero
/// coordinate is positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "[String; 2]", into = "[String; 2]")]
pub struct ProjLine {
    x: BigInt,
    y: BigInt,
}

impl ProjLine {
    pub fn new(x: BigInt, y: BigInt) -> Result<ProjLine> {
        if x.is_zero() && y.is_zero() {
            return Err(Error::InvalidInput("zero vector spans no line".into()));
        }
        let g = x.gcd(&y);
        let (mut x, mut y) = (x / &g, y / &g);
        if x.is_negative() || (x.is_zero() && y.is_negative()) {
            x = -x;
            y = -y;
        }
        Ok(ProjLine { x, y })
    }

    pub fn from_ints(x: i64, y: i64) -> Result<ProjLine> {
        ProjLine::new(x.into(), y.into())
    }

    pub fn from_vector(v: &[Rat; 2]) -> Result<ProjLine> {
        let l = v[0].denom().lcm(v[1].denom());
        let scale = Rat::from(l);
        let x = (&v[0] * &scale).to_integer().expect("cleared denominators");
        let y = (&v[1] * &scale).to_integer().expect("cleared denominators");
        ProjLine::new(x, y)
    }

    pub fn coords(&self) -> (&BigInt, &BigInt) {
        (&self.x, &self.y)
    }

    pub fn vector(&self) -> [Rat; 2] {
        [Rat::from(self.x.clone()), Rat::from(self.y.clone())]
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.x, self.y)
    }
}

impl From<ProjLine> for [String; 2] {
    fn from(l: ProjLine) -> [String; 2] {
        [l.x.to_string(), l.y.to_string()]
    }
}

impl TryFrom<[String; 2]> for ProjLine {
    type Error = String;

    fn try_from(v: [String; 2]) -> std::result::Result<ProjLine, String> {
        let parse = |s: &str| s.trim().parse::<BigInt>().map_err(|e| format!("bad coordinate {s:?}: {e}"));
        ProjLine::new(parse(&v[0])?, parse(&v[1])?).map_err(|e| e.to_string())
    }
}

/// Horofunction of `end` at `v`: 2m - v(det) where p^m is the largest power
/// with p^-m w in the lattice for a primitive vector w of the line.
pub fn busemann(v: &Vertex, end: &ProjLine) -> i64 {
    let p = v.prime();
    let c = v.basis().inverse().expect("lattice basis").apply(&end.vector());
    let k = c.iter().map(|x| valuation(x, p)).min().unwrap().unwrap();
    let (a, b, _) = v.triple();
    -2 * k - (a + b) as i64
}

/// Vertex of the Z_(p)-span of the given vectors (which must span Q^2).
fn lattice_vertex(vectors: &[[Rat; 2]], p: u64) -> Vertex {
    let rows = vectors.iter().map(|v| v.to_vec()).collect();
    let h = local_hermite(rows, p);
    let c0 = [h[0][0].clone(), h[0][1].clone()];
    let c1 = [h[1][0].clone(), h[1][1].clone()];
    canonical_vertex(&Mat2::from_columns(&c0, &c1), p).expect("vectors span the plane")
}

/// The vertex i steps from `base` along the ray toward `end`.
pub fn ray_vertex(base: &Vertex, end: &ProjLine, i: u32) -> Vertex {
    let p = base.prime();
    let g = base.basis();
    let w = end.vector();
    let c = g.inverse().expect("lattice basis").apply(&w);
    let k = c.iter().map(|x| valuation(x, p)).min().unwrap().unwrap();
    let s = Rat::pow_p(p, -k);
    let w0 = [&w[0] * &s, &w[1] * &s];
    let q = Rat::pow_p(p, i as i64);
    let scaled = |col: [Rat; 2]| [&col[0] * &q, &col[1] * &q];
    lattice_vertex(&[w0, scaled(g.column(0)), scaled(g.column(1))], p)
}

/// The vertex on the apartment between two ends closest to the lattice Z_(p)^2
/// spanned by their primitive vectors.
pub fn apartment_center(ends: &(ProjLine, ProjLine), p: u64) -> Vertex {
    lattice_vertex(&[ends.0.vector(), ends.1.vector()], p)
}

fn path_between(v: Vertex, w: Vertex) -> TreePath {
    if v <= w {
        geodesic(&v, &w)
    } else {
        geodesic(&w, &v)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BranchShape {
    Empty,
    ThickPath { path: TreePath, t: u32 },
    ThickRay { base: Vertex, end: ProjLine, t: u32 },
    ThickApartment { ends: (ProjLine, ProjLine), t: u32 },
    Fan { base: Vertex, end: ProjLine },
    Full,
}

use BranchShape::*;

impl BranchShape {
    pub fn contains(&self, v: &Vertex) -> bool {
        match self {
            Empty => false,
            Full => true,
            ThickPath { path, t } => path.distance_to(v) <= *t,
            ThickRay { base, end, t } => {
                let twice = distance(v, base) as i64 + busemann(v, end) - busemann(base, end);
                twice <= 2 * *t as i64
            }
            ThickApartment { ends, t } => {
                let o = apartment_center(ends, v.prime());
                let twice = busemann(v, &ends.0) + busemann(v, &ends.1)
                    - busemann(&o, &ends.0)
                    - busemann(&o, &ends.1);
                twice <= 2 * *t as i64
            }
            Fan { base, end } => busemann(v, end) <= busemann(base, end),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Empty | ThickPath { .. })
    }

    /// Ends of the tree lying in the closure of the shape (`Full` reports none).
    pub fn ends(&self) -> Vec<ProjLine> {
        match self {
            ThickRay { end, .. } | Fan { end, .. } => vec![end.clone()],
            ThickApartment { ends, .. } => vec![ends.0.clone(), ends.1.clone()],
            _ => Vec::new(),
        }
    }

    /// A vertex known to lie in the shape.
    pub fn anchor(&self, p: u64) -> Option<Vertex> {
        match self {
            Empty => None,
            Full => Some(Vertex::standard(p)),
            ThickPath { path, .. } => Some(path.first().clone()),
            ThickRay { base, .. } | Fan { base, .. } => Some(base.clone()),
            ThickApartment { ends, .. } => Some(apartment_center(ends, p)),
        }
    }

    /// Vertex set of a finite shape.
    pub fn vertices(&self, limits: &Limits) -> Result<BTreeSet<Vertex>> {
        match self {
            Empty => Ok(BTreeSet::new()),
            ThickPath { path, .. } => flood_fill(path.first(), |v| self.contains(v), limits, "listing a thick path"),
            _ => Err(Error::NotFinite),
        }
    }

    fn fold_rank(&self) -> u8 {
        match self {
            Empty => 0,
            ThickPath { .. } => 1,
            ThickApartment { .. } => 2,
            ThickRay { .. } => 3,
            Fan { .. } => 4,
            Full => 5,
        }
    }

    fn tube_thickness(&self) -> Option<u32> {
        match self {
            ThickRay { t, .. } | ThickApartment { t, .. } | ThickPath { t, .. } => Some(*t),
            _ => None,
        }
    }

    pub fn to_json(&self) -> BranchShapeJson {
        match self {
            Empty => BranchShapeJson::Empty,
            Full => BranchShapeJson::Full,
            ThickPath { path, t } => BranchShapeJson::ThickPath {
                path: path.vertices.iter().map(Vertex::to_json).collect(),
                length: path.len(),
                t: *t,
            },
            ThickRay { base, end, t } => BranchShapeJson::ThickRay {
                base: base.to_json(),
                end: end.clone(),
                t: *t,
            },
            ThickApartment { ends, t } => BranchShapeJson::ThickApartment {
                ends: [ends.0.clone(), ends.1.clone()],
                t: *t,
            },
            Fan { base, end } => BranchShapeJson::Fan {
                base: base.to_json(),
                end: end.clone(),
            },
        }
    }
}

impl fmt::Display for BranchShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Empty => write!(f, "empty"),
            Full => write!(f, "full"),
            ThickPath { path, t } => write!(f, "thick_path({} -> {}, d={}, t={t})", path.first(), path.last(), path.len()),
            ThickRay { base, end, t } => write!(f, "thick_ray({base} -> {end}, t={t})"),
            ThickApartment { ends, t } => write!(f, "thick_apartment({} <-> {}, t={t})", ends.0, ends.1),
            Fan { base, end } => write!(f, "fan({base} -> {end})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchShapeJson {
    Empty,
    ThickPath { path: Vec<VertexJson>, length: usize, t: u32 },
    ThickRay { base: VertexJson, end: ProjLine, t: u32 },
    ThickApartment { ends: [ProjLine; 2], t: u32 },
    Fan { base: VertexJson, end: ProjLine },
    Full,
}

impl BranchShapeJson {
    pub fn into_shape(&self, p: u64) -> Result<BranchShape> {
        Ok(match self {
            BranchShapeJson::Empty => Empty,
            BranchShapeJson::Full => Full,
            BranchShapeJson::ThickPath { path, t, .. } => {
                let vs = path.iter().map(|v| v.into_vertex(p)).collect::<Result<Vec<_>>>()?;
                if vs.is_empty() {
                    return Err(Error::InvalidInput("thick path needs at least one vertex".into()));
                }
                let path = geodesic(&vs[0], vs.last().unwrap());
                if path.vertices != vs {
                    return Err(Error::InvalidInput("path vertices are not a geodesic".into()));
                }
                ThickPath { path: path.normalized(), t: *t }
            }
            BranchShapeJson::ThickRay { base, end, t } => ThickRay {
                base: base.into_vertex(p)?,
                end: end.clone(),
                t: *t,
            },
            BranchShapeJson::ThickApartment { ends, t } => {
                if ends[0] == ends[1] {
                    return Err(Error::InvalidInput("apartment ends coincide".into()));
                }
                let mut e = [ends[0].clone(), ends[1].clone()];
                e.sort();
                let [a, b] = e;
                ThickApartment { ends: (a, b), t: *t }
            }
            BranchShapeJson::Fan { base, end } => Fan {
                base: base.into_vertex(p)?,
                end: end.clone(),
            },
        })
    }
}

fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    let r = Rat::new(n, d);
    (&r * &r == *x).then_some(r)
}

fn eigenline(a: &Mat2, lambda: &Rat) -> Result<ProjLine> {
    let m = a - &Mat2::scalar(lambda.clone());
    let (x, y) = if !m.get(0, 0).is_zero() || !m.get(0, 1).is_zero() {
        (m.get(0, 1), m.get(0, 0))
    } else {
        (m.get(1, 1), m.get(1, 0))
    };
    ProjLine::from_vector(&[-x, y.clone()])
}

fn integral_char_poly(a: &Mat2, p: u64) -> bool {
    a.trace().is_p_integral(p) && a.det().is_p_integral(p)
}

/// Symbolic S_0(Z_(p)[a]).
pub fn classify_single(a: &Mat2, p: u64) -> Result<BranchShape> {
    order_closure(std::slice::from_ref(a), p)?;
    if a.is_scalar() {
        return Ok(Full);
    }
    let s = a.trace();
    let n = a.det();
    let disc = &(&s * &s) - &(&Rat::from(4) * &n);
    let e1 = [Rat::one(), Rat::zero()];
    let e2 = [Rat::zero(), Rat::one()];

    if disc.is_zero() {
        let nil = a - &Mat2::scalar(&s / &Rat::from(2));
        let first = nil.apply(&e1);
        let v0 = if first.iter().any(|x| !x.is_zero()) { e1 } else { e2 };
        let w = nil.apply(&v0);
        let end = ProjLine::from_vector(&w)?;
        return Ok(Fan {
            base: lattice_vertex(&[v0, w], p),
            end,
        });
    }

    if is_square_qp(&disc, p) {
        let root = rational_sqrt(&disc).ok_or_else(|| Error::IrrationalEnds(format!("{a:?}")))?;
        let half = Rat::frac(1, 2);
        let alpha = &(&s + &root) * &half;
        let beta = &(&s - &root) * &half;
        let mut ends = [eigenline(a, &alpha)?, eigenline(a, &beta)?];
        ends.sort();
        let [l1, l2] = ends;
        let t = valuation(&root, p).unwrap() as u32;
        return Ok(ThickApartment { ends: (l1, l2), t });
    }

    // descend to a generator of the maximal order of the field
    let mut b = a.clone();
    let mut t = 0;
    let inv_p = Rat::pow_p(p, -1);
    'descend: loop {
        for lam in 0..p {
            let c = (&b - &Mat2::scalar(Rat::from(lam as i64))).scale(&inv_p);
            if integral_char_poly(&c, p) {
                b = c;
                t += 1;
                continue 'descend;
            }
        }
        break;
    }
    let center = lattice_vertex(&[e1.clone(), b.apply(&e1)], p);
    let bt = b.trace();
    let bn = b.det();
    let bdisc = &(&bt * &bt) - &(&Rat::from(4) * &bn);
    let path = if valuation(&bdisc, p).is_at_least(1) {
        let lam = (0..p as i64)
            .map(Rat::from)
            .find(|l| valuation(&(&(&(l * l) - &(&bt * l)) + &bn), p).is_at_least(1))
            .expect("ramified residue polynomial has a root");
        let pi = &b - &Mat2::scalar(lam);
        let pb = &pi * &b;
        let other = lattice_vertex(&[pi.apply(&e1), pb.apply(&e1)], p);
        path_between(center, other)
    } else {
        TreePath { vertices: vec![center] }
    };
    Ok(ThickPath { path, t })
}

/// Number of vertices within distance t of a path with d edges.
pub fn thick_path_size(p: u64, d: usize, t: u32) -> u128 {
    if d == 0 {
        return ball_size(p, t);
    }
    let p = p as u128;
    let pt = p.pow(t);
    let end_piece = 1 + p * (pt - 1) / (p - 1);
    2 * end_piece + (d as u128 - 1) * pt
}

fn deep_core(set: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    set.iter()
        .filter(|v| neighbors(v).iter().all(|n| set.contains(n)))
        .cloned()
        .collect()
}

/// Recognizes a finite vertex set as a thick path.
pub fn symbolize_finite(set: &BTreeSet<Vertex>) -> Result<BranchShape> {
    let Some(first) = set.iter().next() else {
        return Ok(Empty);
    };
    let p = first.prime();
    let mut core = set.clone();
    let mut t = 0;
    loop {
        let next = deep_core(&core);
        if next.is_empty() {
            break;
        }
        core = next;
        t += 1;
    }
    let ends: Vec<&Vertex> = core
        .iter()
        .filter(|v| neighbors(v).iter().filter(|n| core.contains(n)).count() <= 1)
        .collect();
    let path = match ends.as_slice() {
        [v] if core.len() == 1 => TreePath { vertices: vec![(*v).clone()] },
        [v, w] => path_between((*v).clone(), (*w).clone()),
        _ => return Err(Error::Unrepresentable(format!("core of {} vertices is not a path", core.len()))),
    };
    if path.vertices.len() != core.len() {
        return Err(Error::Unrepresentable("core is not a path".into()));
    }
    let shape = ThickPath { path, t };
    let (d, ok) = match &shape {
        ThickPath { path, .. } => (path.len(), set.iter().all(|v| shape.contains(v))),
        _ => unreachable!(),
    };
    if !ok || set.len() as u128 != thick_path_size(p, d, t) {
        return Err(Error::Unrepresentable("set is not the neighborhood of its core".into()));
    }
    Ok(shape)
}

fn infinite_unsupported(s1: &BranchShape, s2: &BranchShape) -> Error {
    Error::InfiniteUnsupported {
        left: s1.to_string(),
        right: s2.to_string(),
    }
}

/// Shape whose membership is the conjunction of the two inputs.
pub fn intersect_shapes(s1: &BranchShape, s2: &BranchShape, p: u64, limits: &Limits) -> Result<BranchShape> {
    match (s1, s2) {
        (Empty, _) | (_, Empty) => return Ok(Empty),
        (Full, s) | (s, Full) => return Ok(s.clone()),
        _ if s1 == s2 => return Ok(s1.clone()),
        _ => {}
    }
    let ends2 = s2.ends();
    let shared: Vec<ProjLine> = s1.ends().into_iter().filter(|e| ends2.contains(e)).collect();
    if shared.is_empty() {
        return intersect_finite(s1, s2, p, limits);
    }
    match (s1, s2) {
        (Fan { base: b1, end }, Fan { base: b2, .. }) => {
            let deeper = if busemann(b1, end) <= busemann(b2, end) { s1 } else { s2 };
            Ok(deeper.clone())
        }
        (ThickApartment { ends: a, t: t1 }, ThickApartment { ends: b, t: t2 }) if a == b => Ok(ThickApartment {
            ends: a.clone(),
            t: (*t1).min(*t2),
        }),
        _ if shared.len() == 1 => shared_end_ray(s1, s2, &shared[0], p, limits),
        _ => Err(infinite_unsupported(s1, s2)),
    }
}

fn intersect_finite(s1: &BranchShape, s2: &BranchShape, p: u64, limits: &Limits) -> Result<BranchShape> {
    let (a1, a2) = (s1.anchor(p).unwrap(), s2.anchor(p).unwrap());
    let member = |v: &Vertex| s1.contains(v) && s2.contains(v);
    // in a tree, a common point of two convex sets is reached on any bridge
    let Some(seed) = geodesic(&a1, &a2).vertices.into_iter().find(|v| member(v)) else {
        return Ok(Empty);
    };
    let set = flood_fill(&seed, member, limits, "intersecting branch shapes")?;
    symbolize_finite(&set)
}

fn ray_start(s: &BranchShape, p: u64) -> Vertex {
    s.anchor(p).expect("infinite shape")
}

/// Intersection of two infinite shapes sharing exactly one end, rebuilt as
/// a thick ray and checked against both predicates near its base.
fn shared_end_ray(
    s1: &BranchShape,
    s2: &BranchShape,
    end: &ProjLine,
    p: u64,
    limits: &Limits,
) -> Result<BranchShape> {
    let member = |v: &Vertex| s1.contains(v) && s2.contains(v);
    let t = match (s1.tube_thickness(), s2.tube_thickness()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(infinite_unsupported(s1, s2)),
    };
    let (y1, y2) = (ray_start(s1, p), ray_start(s2, p));
    let on_ray2 = |v: &Vertex| distance(v, &y2) as i64 + busemann(v, end) - busemann(&y2, end) == 0;
    let merged = (0..=distance(&y1, &y2))
        .map(|k| ray_vertex(&y1, end, k))
        .find(|v| on_ray2(v))
        .expect("rays toward a common end merge");
    let deep = |v: &Vertex| -> Result<bool> { Ok(ball(v, t, limits)?.iter().all(&member)) };
    let mut cur = ray_vertex(&merged, end, t + 1);
    if !deep(&cur)? {
        return Err(infinite_unsupported(s1, s2));
    }
    let cap = distance(&cur, &y1) + distance(&cur, &y2) + 4 * t + 8;
    let mut steps = 0;
    loop {
        let toward = ray_vertex(&cur, end, 1);
        let mut back = Vec::new();
        for n in neighbors(&cur) {
            if n != toward && deep(&n)? {
                back.push(n);
            }
        }
        match back.len() {
            0 => break,
            1 => cur = back.pop().unwrap(),
            _ => return Err(infinite_unsupported(s1, s2)),
        }
        steps += 1;
        if steps > cap {
            return Err(infinite_unsupported(s1, s2));
        }
    }
    let shape = ThickRay {
        base: cur.clone(),
        end: end.clone(),
        t,
    };
    let probe = ball(&cur, t + 3, limits)?;
    if probe.iter().any(|v| shape.contains(v) != member(v)) {
        return Err(infinite_unsupported(s1, s2));
    }
    Ok(shape)
}

fn stable_lattice(order: &LocalOrder) -> Vertex {
    let p = order.prime();
    let e = [[Rat::one(), Rat::zero()], [Rat::zero(), Rat::one()]];
    let vectors: Vec<[Rat; 2]> = order
        .closure()
        .basis()
        .iter()
        .flat_map(|b| e.iter().map(move |v| b.apply(v)))
        .collect();
    lattice_vertex(&vectors, p)
}

/// Symbolic S_0(H), folding the shapes of the generators.
///
/// Generators whose eigenvalues are irrational are handled by direct
/// membership: against the vertices of the symbolic part when it is finite,
/// else by flooding from an H-stable lattice for orders of full rank.
pub fn branch_of_order(order: &LocalOrder, limits: &Limits) -> Result<BranchShape> {
    let p = order.prime();
    let mut shapes = Vec::new();
    let mut irrational = Vec::new();
    for g in order.generators() {
        match classify_single(g, p) {
            Ok(s) => shapes.push(s),
            Err(Error::IrrationalEnds(_)) => irrational.push(g.clone()),
            Err(e) => return Err(e),
        }
    }
    shapes.sort_by_key(BranchShape::fold_rank);
    let mut acc = Full;
    for s in &shapes {
        acc = intersect_shapes(&acc, s, p, limits)?;
        if acc == Empty {
            return Ok(Empty);
        }
    }
    if irrational.is_empty() {
        return Ok(acc);
    }
    let in_irrational = |v: &Vertex| irrational.iter().all(|g| contains_shifted(v, g, 0));
    if acc.is_finite() {
        let set: BTreeSet<Vertex> = acc.vertices(limits)?.into_iter().filter(|v| in_irrational(v)).collect();
        return symbolize_finite(&set);
    }
    if order.rank() == 4 {
        let seed = stable_lattice(order);
        let set = flood_fill(&seed, |v| acc.contains(v) && in_irrational(v), limits, "enumerating a branch")?;
        return symbolize_finite(&set);
    }
    Err(Error::IrrationalEnds(format!("{:?}", irrational[0])))
}

/// The r-deep part {v : ball(v, r) inside s}.
pub fn deepen(s: &BranchShape, r: u32) -> BranchShape {
    if r == 0 {
        return s.clone();
    }
    match s {
        Empty => Empty,
        Full => Full,
        ThickPath { path, t } if r <= *t => ThickPath {
            path: path.clone(),
            t: t - r,
        },
        ThickRay { base, end, t } if r <= *t => ThickRay {
            base: base.clone(),
            end: end.clone(),
            t: t - r,
        },
        ThickApartment { ends, t } if r <= *t => ThickApartment {
            ends: ends.clone(),
            t: t - r,
        },
        Fan { base, end } => Fan {
            base: ray_vertex(base, end, r),
            end: end.clone(),
        },
        _ => Empty,
    }
}

/// `Some(d)` for finite shapes, `None` for infinite ones.
pub fn diameter(s: &BranchShape) -> Result<Option<u32>> {
    match s {
        Empty => Err(Error::EmptyShape),
        ThickPath { path, t } => Ok(Some(path.len() as u32 + 2 * t)),
        _ => Ok(None),
    }
}

/// Whether the r-deep part contains two vertices at distance d.
pub fn embeds_in_level(s: &BranchShape, d: u32, r: u32) -> bool {
    match diameter(&deepen(s, r)) {
        Err(_) => false,
        Ok(None) => true,
        Ok(Some(delta)) => delta >= d,
    }
}

/// Vertices of ball(center, radius) lying in S_r(H), by direct membership.
pub fn enumerate_branch(
    order: &LocalOrder,
    r: u32,
    center: &Vertex,
    radius: u32,
    limits: &Limits,
) -> Result<BTreeSet<Vertex>> {
    let region = ball(center, radius, limits)?;
    let gens = order.generators();
    let kept: Vec<Vertex> = region
        .par_iter()
        .filter(|v| gens.iter().all(|g| contains_shifted(v, g, r)))
        .cloned()
        .collect();
    Ok(kept.into_iter().collect())
}

/// The shifted Eichler order with the same branch as a thick path.
pub fn eichler_envelope(s: &BranchShape) -> Result<ShiftedEichler> {
    match s {
        ThickPath { path, t } => Ok(ShiftedEichler::new(path.first().clone(), path.last().clone(), *t)),
        _ => Err(Error::NotFinite),
    }
}
