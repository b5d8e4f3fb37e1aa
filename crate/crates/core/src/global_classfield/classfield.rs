use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::field::{BaseField, PrimeIdeal, QuadElem};
use super::forms::{ClassGroup, Form};
use super::local::{candidate_primes, local_behaviour, LocalBehaviour};
use crate::branches::BranchShape;
use crate::bt_tree::{TreePath, Vertex};
use crate::error::{Error, Result};
use crate::exact_padic::Rat;
use crate::spinor_local::{spinor_image, SpinorImage};

/// A factored ideal of O_K.
pub type Ideal = BTreeMap<PrimeIdeal, u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct FactorJson {
    #[serde(flatten)]
    prime: PrimeIdeal,
    exp: u32,
}

/// Ideals serialize as lists of {"p", "kind", ["conj"], "exp"}.
pub mod ideal_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ideal: &Ideal, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<FactorJson> = ideal
            .iter()
            .filter(|(_, &e)| e > 0)
            .map(|(&prime, &exp)| FactorJson { prime, exp })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Ideal, D::Error> {
        let v: Vec<FactorJson> = Vec::deserialize(d)?;
        let mut out = Ideal::new();
        for f in v {
            *out.entry(f.prime).or_insert(0) += f.exp;
        }
        Ok(out)
    }
}

fn val(ideal: &Ideal, q: &PrimeIdeal) -> u32 {
    ideal.get(q).copied().unwrap_or(0)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuatAlgebra {
    #[serde(default)]
    pub ramified: Vec<PrimeIdeal>,
    /// Indices of real places: 0 sends sqrt d to +sqrt d, 1 to -sqrt d.
    #[serde(default)]
    pub ramified_real: Vec<usize>,
}

impl QuatAlgebra {
    pub fn split() -> QuatAlgebra {
        QuatAlgebra::default()
    }

    pub fn validate(&self, field: &BaseField) -> Result<()> {
        for q in &self.ramified {
            field.check_prime(q)?;
        }
        let places: BTreeSet<usize> = self.ramified_real.iter().copied().collect();
        if places.len() != self.ramified_real.len() || places.iter().any(|&i| i >= field.real_places()) {
            return Err(Error::InvalidInput("bad real ramification".into()));
        }
        let finite: BTreeSet<&PrimeIdeal> = self.ramified.iter().collect();
        if finite.len() != self.ramified.len() {
            return Err(Error::InvalidInput("repeated ramified prime".into()));
        }
        if !(finite.len() + places.len()).is_multiple_of(2) {
            return Err(Error::InvalidInput("ramification set has odd cardinality".into()));
        }
        Ok(())
    }

    pub fn is_split(&self) -> bool {
        self.ramified.is_empty() && self.ramified_real.is_empty()
    }

    pub fn is_division_at(&self, q: &PrimeIdeal) -> bool {
        self.ramified.contains(q)
    }
}

/// The genus of D = O + I D_0 with D_0 of level N.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusSpec {
    #[serde(with = "ideal_serde", default)]
    pub level: Ideal,
    #[serde(rename = "I", with = "ideal_serde", default)]
    pub i: Ideal,
}

impl GenusSpec {
    pub fn maximal() -> GenusSpec {
        GenusSpec::default()
    }

    pub fn validate(&self, field: &BaseField, a: &QuatAlgebra) -> Result<()> {
        for q in self.level.keys().chain(self.i.keys()) {
            field.check_prime(q)?;
        }
        for q in &a.ramified {
            if val(&self.level, q) > 0 || val(&self.i, q) > 0 {
                return Err(Error::InvalidInput(format!("genus data must be trivial at the division place {q}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuborderGlobal {
    /// O_K + f O_L with L = K(sqrt delta).
    CommQuadratic {
        delta: QuadElem,
        #[serde(with = "ideal_serde", default)]
        conductor: Ideal,
    },
    Rank3,
    /// O + J D_2 with D_2 Eichler of level M.
    Rank4 {
        #[serde(rename = "J", with = "ideal_serde", default)]
        j: Ideal,
        #[serde(rename = "M", with = "ideal_serde", default)]
        m: Ideal,
    },
}

/// A 2-quotient of the ambient ray class group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub degree: u64,
    /// Order of the ambient ray class group.
    pub ambient_order: u64,
    /// Whether the ambient group is the narrow class group.
    pub narrow: bool,
    /// Finite places whose classes are killed.
    pub forced_split: Vec<PrimeIdeal>,
    /// Places killed on top of Sigma's (strict places for rank 4).
    pub strict_places: Vec<PrimeIdeal>,
    /// sqrt of this generates F over K when F is a quadratic extension known
    /// explicitly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<QuadElem>,
}

/// A ray class group with trivial finite modulus, as the narrow form class
/// group modulo `relations`.
#[derive(Debug, Clone)]
pub struct RayClassGroup {
    pub field: BaseField,
    pub narrow: bool,
    pub forms: Option<ClassGroup>,
    pub relations: Vec<usize>,
}

impl RayClassGroup {
    pub fn order(&self) -> usize {
        match &self.forms {
            None => 1,
            Some(g) => g.order() / g.subgroup(&self.relations).len(),
        }
    }

    /// |C / <C^2, classes of `primes`>|.
    pub fn two_quotient(&self, primes: &[PrimeIdeal]) -> Result<usize> {
        let Some(g) = &self.forms else { return Ok(1) };
        let mut gens = self.relations.clone();
        for q in primes {
            gens.push(self.class_index(q)?);
        }
        Ok(g.exponent_two_quotient(&gens))
    }

    fn class_index(&self, q: &PrimeIdeal) -> Result<usize> {
        let g = self.forms.as_ref().expect("nontrivial group");
        self.field.check_prime(q)?;
        Ok(match self.field.prime_b(q) {
            None => g.identity(),
            Some(b) => g.class_of(&Form::from_ab(q.p as i64, b, self.field.discriminant())),
        })
    }

    /// Whether two narrow classes agree in this group.
    fn same_class(&self, x: usize, y: usize) -> bool {
        let g = self.forms.as_ref().expect("nontrivial group");
        let sub = g.subgroup(&self.relations);
        let inv_y = g.class_of(&g.classes[y].inverse());
        sub.contains(&g.mul(x, inv_y))
    }
}

/// The ray class group of K with trivial finite modulus and the given real
/// places in the modulus.
pub fn narrow_ray_class_group(field: &BaseField, infinite_modulus: &[usize]) -> Result<RayClassGroup> {
    field.validate()?;
    if infinite_modulus.iter().any(|&i| i >= field.real_places()) {
        return Err(Error::InvalidInput("modulus contains a place that is not real".into()));
    }
    if field.is_rational() {
        return Ok(RayClassGroup {
            field: *field,
            narrow: true,
            forms: None,
            relations: Vec::new(),
        });
    }
    let disc = field.discriminant();
    let g = ClassGroup::new(disc)?;
    let modulus: BTreeSet<usize> = infinite_modulus.iter().copied().collect();
    // One real place in the modulus changes nothing: -1 fixes the sign there.
    let narrow = disc < 0 || modulus.len() == 2;
    let relations = if narrow {
        Vec::new()
    } else {
        let s = disc.rem_euclid(2);
        vec![g.class_of(&Form::new(-1, s, (disc - s * s) / 4))]
    };
    Ok(RayClassGroup {
        field: *field,
        narrow,
        forms: Some(g),
        relations,
    })
}

/// Whether the class of q is trivial in the group.
pub fn prime_ideal_class(q: &PrimeIdeal, group: &RayClassGroup) -> Result<ClassElement> {
    let Some(g) = &group.forms else {
        return Ok(ClassElement { form: None, trivial: true });
    };
    let i = group.class_index(q)?;
    Ok(ClassElement {
        form: Some(g.classes[i]),
        trivial: group.same_class(i, g.identity()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassElement {
    /// Canonical form of the narrow class.
    pub form: Option<Form>,
    pub trivial: bool,
}

fn real_modulus(a: &QuatAlgebra) -> Vec<usize> {
    a.ramified_real.clone()
}

fn sigma_forced(a: &QuatAlgebra, g: &GenusSpec) -> Vec<PrimeIdeal> {
    let mut out: BTreeSet<PrimeIdeal> = a.ramified.iter().copied().collect();
    out.extend(g.level.iter().filter(|(_, &e)| e % 2 == 1).map(|(q, _)| *q));
    out.into_iter().collect()
}

fn descriptor(group: &RayClassGroup, forced: Vec<PrimeIdeal>, strict: Vec<PrimeIdeal>) -> Result<FieldDescriptor> {
    let all: Vec<PrimeIdeal> = forced.iter().chain(strict.iter()).copied().collect();
    Ok(FieldDescriptor {
        degree: group.two_quotient(&all)? as u64,
        ambient_order: group.order() as u64,
        narrow: group.narrow,
        forced_split: forced,
        strict_places: strict,
        generator: None,
    })
}

fn validate_all(field: &BaseField, a: &QuatAlgebra, g: &GenusSpec) -> Result<()> {
    field.validate()?;
    a.validate(field)?;
    g.validate(field, a)
}

/// The spinor class field Sigma of the genus.
pub fn spinor_class_field(field: &BaseField, a: &QuatAlgebra, g: &GenusSpec) -> Result<FieldDescriptor> {
    validate_all(field, a, g)?;
    let group = narrow_ray_class_group(field, &real_modulus(a))?;
    descriptor(&group, sigma_forced(a, g), Vec::new())
}

/// Local model of O_{L_P}^[t]: its branch at a split place of A.
fn local_model_shape(behaviour: LocalBehaviour, t: u32, p: u64) -> BranchShape {
    let o = Vertex::standard(p);
    match behaviour {
        LocalBehaviour::Inert => BranchShape::ThickPath {
            path: TreePath { vertices: vec![o] },
            t,
        },
        LocalBehaviour::Ramified => {
            let w = crate::bt_tree::neighbors(&o).remove(0);
            BranchShape::ThickPath {
                path: TreePath { vertices: vec![o, w] },
                t,
            }
        }
        LocalBehaviour::Split => BranchShape::Full,
    }
}

/// Spinor image at a finite place for the commutative order with local
/// conductor exponent t; None when the place does not constrain F.
fn comm_local_image(behaviour: LocalBehaviour, t: u32, d: u32, r: u32, p: u64) -> SpinorImage {
    match behaviour {
        LocalBehaviour::Split => {
            let apartment = BranchShape::ThickApartment {
                ends: (
                    crate::branches::ProjLine::from_ints(1, 0).expect("line"),
                    crate::branches::ProjLine::from_ints(0, 1).expect("line"),
                ),
                t,
            };
            spinor_image(&apartment, d, r)
        }
        _ => spinor_image(&local_model_shape(behaviour, t, p), d, r),
    }
}

/// Representation field of O_K + f O_L, L = K(sqrt delta).
pub fn rep_field_comm_quadratic(
    field: &BaseField,
    a: &QuatAlgebra,
    g: &GenusSpec,
    delta: &QuadElem,
    conductor: &Ideal,
) -> Result<FieldDescriptor> {
    validate_all(field, a, g)?;
    for q in conductor.keys() {
        field.check_prime(q)?;
    }
    if delta.is_zero() || delta.is_global_square(field) {
        return Err(Error::InvalidInput("delta must be a nonsquare".into()));
    }
    let sigma = spinor_class_field(field, a, g)?;
    let d = field.d().unwrap_or(1);

    // Places that can matter: the genus and conductor supports, division
    // places, and the primes where L/K may ramify.
    let mut places: BTreeSet<PrimeIdeal> = candidate_primes(field, delta)?.into_iter().collect();
    places.extend(g.level.keys().chain(g.i.keys()).chain(conductor.keys()).copied());
    places.extend(a.ramified.iter().copied());

    let mut behaviour = BTreeMap::new();
    for q in &places {
        behaviour.insert(*q, local_behaviour(field, delta, q)?);
    }

    // Feasibility.
    for i in 0..field.real_places() {
        if a.ramified_real.contains(&i) && delta.sign_at(d, i) > 0 {
            return Err(Error::EmbeddingInfeasible { place: format!("real place {i}") });
        }
    }
    let mut images = BTreeMap::new();
    for q in &places {
        let b = behaviour[q];
        if a.is_division_at(q) {
            if b == LocalBehaviour::Split {
                return Err(Error::EmbeddingInfeasible { place: q.to_string() });
            }
            continue;
        }
        let img = comm_local_image(b, val(conductor, q), val(&g.level, q), val(&g.i, q), q.p);
        if img == SpinorImage::NoEmbedding {
            return Err(Error::EmbeddingInfeasible { place: q.to_string() });
        }
        images.insert(*q, img);
    }

    let mut out = sigma.clone();
    out.degree = 1;
    out.strict_places = Vec::new();
    if sigma.degree == 1 {
        return Ok(out);
    }
    // (1) L inside Sigma.
    let unramified = behaviour.values().all(|b| *b != LocalBehaviour::Ramified);
    let real_ok = (0..field.real_places())
        .filter(|i| !a.ramified_real.contains(i))
        .all(|i| delta.sign_at(d, i) > 0);
    let forced_ok = sigma.forced_split.iter().all(|q| behaviour[q] == LocalBehaviour::Split);
    // (2) exact conductor exponent at inert places.
    let inert_ok = images
        .iter()
        .filter(|(q, _)| behaviour[q] == LocalBehaviour::Inert)
        .all(|(_, img)| *img == SpinorImage::UnitSquares);
    if unramified && real_ok && forced_ok && inert_ok {
        out.degree = 2;
        out.generator = Some(delta.clone());
    }
    Ok(out)
}

pub fn rep_field_rank3(field: &BaseField, a: &QuatAlgebra, g: &GenusSpec) -> Result<FieldDescriptor> {
    validate_all(field, a, g)?;
    if !a.is_split() {
        return Err(Error::AlgebraNotSplit);
    }
    let mut out = spinor_class_field(field, a, g)?;
    out.degree = 1;
    Ok(out)
}

/// Places where l(D_2) + 2 v(J) > l(D_1) + 2 v(I), after checking both
/// embedding inequalities everywhere.
pub fn rank4_strict_places(g: &GenusSpec, j: &Ideal, m: &Ideal) -> Result<Vec<PrimeIdeal>> {
    let support: BTreeSet<PrimeIdeal> = g.level.keys().chain(g.i.keys()).chain(j.keys()).chain(m.keys()).copied().collect();
    let mut strict = Vec::new();
    for q in support {
        let (vj, vi) = (val(j, &q) as i64, val(&g.i, &q) as i64);
        let lhs = val(m, &q) as i64 + 2 * vj;
        let rhs = val(&g.level, &q) as i64 + 2 * vi;
        if vj < vi || lhs < rhs {
            return Err(Error::EmbeddingInfeasible { place: q.to_string() });
        }
        if lhs > rhs {
            strict.push(q);
        }
    }
    Ok(strict)
}

pub fn rep_field_rank4(field: &BaseField, a: &QuatAlgebra, g: &GenusSpec, j: &Ideal, m: &Ideal) -> Result<FieldDescriptor> {
    validate_all(field, a, g)?;
    for q in j.keys().chain(m.keys()) {
        field.check_prime(q)?;
        if a.is_division_at(q) && val(m, q) > 0 {
            return Err(Error::InvalidInput(format!("no Eichler level at the division place {q}")));
        }
    }
    let strict = rank4_strict_places(g, j, m)?;
    let group = narrow_ray_class_group(field, &real_modulus(a))?;
    descriptor(&group, sigma_forced(a, g), strict)
}

pub fn rep_field(field: &BaseField, a: &QuatAlgebra, g: &GenusSpec, h: &SuborderGlobal) -> Result<FieldDescriptor> {
    match h {
        SuborderGlobal::CommQuadratic { delta, conductor } => rep_field_comm_quadratic(field, a, g, delta, conductor),
        SuborderGlobal::Rank3 => rep_field_rank3(field, a, g),
        SuborderGlobal::Rank4 { j, m } => rep_field_rank4(field, a, g, j, m),
    }
}

pub fn selectivity_ratio(f: &FieldDescriptor) -> Rat {
    Rat::frac(1, f.degree as i64)
}
