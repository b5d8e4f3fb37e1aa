use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use qlat_core::branches::{branch_of_order, deepen, diameter, enumerate_branch, BranchShapeJson};
use qlat_core::bt_tree::{ball, export_dot, Limits, Vertex, VertexJson};
use qlat_core::exact_padic::{module_intersect_all, Mat2};
use qlat_core::global_classfield::field::is_prime;
use qlat_core::global_classfield::{
    rep_field as global_rep_field, selectivity_ratio, spinor_class_field, BaseField, GenusSpec, PrimeIdeal, QuatAlgebra, SuborderGlobal,
};
use qlat_core::local_orders::{
    decompose_shifted_eichler, maximal_order_module, order_closure, three_maximal_orders, LocalOrder, ShiftedEichler,
};
use qlat_core::spinor_local::spinor_image;
use qlat_core::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub enum Failure {
    Schema(String),
    Io(String),
    Core(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Schema(_) | Failure::Core(Error::InvalidInput(_)) | Failure::Core(Error::PrimeMismatch(..)) => 2,
            Failure::Io(_) => 1,
            Failure::Core(Error::ResourceLimit { .. }) | Failure::Core(Error::BudgetExceeded { .. }) => 3,
            Failure::Core(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Schema(m) => write!(f, "schema error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Schema(e.to_string()))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// The vertex budget: QLAT_MAX_VERTICES wins over the request.
pub fn limits_from_env() -> Result<Option<Limits>, Failure> {
    match std::env::var("QLAT_MAX_VERTICES") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(Limits { max_vertices: n })),
            _ => Err(Failure::Schema(format!("QLAT_MAX_VERTICES must be a positive integer, got {s:?}"))),
        },
    }
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct LimitsJson {
    max_vertices: Option<usize>,
}

fn resolve_limits(env: Option<Limits>, req: Option<LimitsJson>) -> Result<Limits, Failure> {
    if let Some(l) = env {
        return Ok(l);
    }
    match req.and_then(|r| r.max_vertices) {
        Some(0) => Err(Failure::Schema("max_vertices must be positive".into())),
        Some(n) => Ok(Limits { max_vertices: n }),
        None => Ok(Limits::default()),
    }
}

fn check_prime(p: u64) -> Result<(), Failure> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Failure::Schema(format!("p = {p} is not prime")))
    }
}

fn vertex_or_standard(p: u64, v: &Option<VertexJson>) -> Result<Vertex, Failure> {
    Ok(match v {
        Some(v) => v.into_vertex(p)?,
        None => Vertex::standard(p),
    })
}

fn vertex_list(set: &BTreeSet<Vertex>) -> Vec<VertexJson> {
    set.iter().map(Vertex::to_json).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderRequest {
    p: u64,
    generators: Vec<Mat2>,
    #[serde(default)]
    limits: Option<LimitsJson>,
}

fn order_of(p: u64, gens: &[Mat2]) -> Result<LocalOrder, Failure> {
    check_prime(p)?;
    if gens.is_empty() {
        return Err(Failure::Schema("at least one generator is required".into()));
    }
    Ok(order_closure(gens, p)?)
}

pub fn classify(text: &str, env: Option<Limits>) -> Result<Value, Failure> {
    let req: OrderRequest = parse(text)?;
    let limits = resolve_limits(env, req.limits)?;
    let order = order_of(req.p, &req.generators)?;
    let shape = branch_of_order(&order, &limits)?;
    Ok(json!({
        "p": req.p,
        "rank": order.rank(),
        "shape": to_value(&shape.to_json()),
        "summary": shape.to_string(),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnumRequest {
    p: u64,
    generators: Vec<Mat2>,
    #[serde(default)]
    r: u32,
    #[serde(default)]
    center: Option<VertexJson>,
    radius: u32,
    #[serde(default)]
    limits: Option<LimitsJson>,
}

pub fn branch_enum(text: &str, env: Option<Limits>) -> Result<Value, Failure> {
    let req: EnumRequest = parse(text)?;
    let limits = resolve_limits(env, req.limits)?;
    let order = order_of(req.p, &req.generators)?;
    let center = vertex_or_standard(req.p, &req.center)?;
    let found = enumerate_branch(&order, req.r, &center, req.radius, &limits)?;
    let symbolic = deepen(&branch_of_order(&order, &limits)?, req.r);
    let region = ball(&center, req.radius, &limits)?;
    let predicted: BTreeSet<Vertex> = region.into_iter().filter(|v| symbolic.contains(v)).collect();
    Ok(json!({
        "p": req.p,
        "r": req.r,
        "center": to_value(&center.to_json()),
        "radius": req.radius,
        "shape": to_value(&symbolic.to_json()),
        "count": found.len(),
        "vertices": vertex_list(&found),
        "matches_symbolic": predicted == found,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpinorRequest {
    p: u64,
    #[serde(default)]
    generators: Option<Vec<Mat2>>,
    #[serde(default)]
    shape: Option<BranchShapeJson>,
    d: u32,
    #[serde(default)]
    r: u32,
    #[serde(default)]
    limits: Option<LimitsJson>,
}

pub fn spinor(text: &str, env: Option<Limits>) -> Result<Value, Failure> {
    let req: SpinorRequest = parse(text)?;
    let limits = resolve_limits(env, req.limits)?;
    check_prime(req.p)?;
    let shape = match (&req.generators, &req.shape) {
        (Some(g), None) => branch_of_order(&order_of(req.p, g)?, &limits)?,
        (None, Some(s)) => s.into_shape(req.p)?,
        _ => return Err(Failure::Schema("give exactly one of \"generators\" and \"shape\"".into())),
    };
    let image = spinor_image(&shape, req.d, req.r);
    let diam = diameter(&deepen(&shape, req.r)).ok().flatten();
    Ok(json!({
        "image": to_value(&image),
        "diameter": diam,
        "level": req.d,
        "shift": req.r,
    }))
}

fn eichler_value(p: u64, e: &ShiftedEichler) -> Value {
    let mut v = to_value(&e.to_json());
    v["p"] = json!(p);
    v
}

pub fn decompose(text: &str, env: Option<Limits>) -> Result<Value, Failure> {
    let req: OrderRequest = parse(text)?;
    let limits = resolve_limits(env, req.limits)?;
    let order = order_of(req.p, &req.generators)?;
    let e = decompose_shifted_eichler(&order, &limits)?;
    Ok(eichler_value(req.p, &e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EichlerRequest {
    p: u64,
    endpoints: [VertexJson; 2],
    #[serde(default)]
    level: Option<u32>,
    shift: u32,
}

pub fn three_maximals(text: &str) -> Result<Value, Failure> {
    let req: EichlerRequest = parse(text)?;
    check_prime(req.p)?;
    let e = ShiftedEichler::new(req.endpoints[0].into_vertex(req.p)?, req.endpoints[1].into_vertex(req.p)?, req.shift);
    if req.level.is_some_and(|l| l != e.level) {
        return Err(Failure::Schema(format!("level does not match the endpoint distance {}", e.level)));
    }
    let (a, b, c) = three_maximal_orders(&e);
    let meet = module_intersect_all(&[&a, &b, &c].map(maximal_order_module))?;
    Ok(json!({
        "p": req.p,
        "order": eichler_value(req.p, &e),
        "maximal_orders": [to_value(&a.to_json()), to_value(&b.to_json()), to_value(&c.to_json())],
        "intersection_matches": meet == e.module(),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallRequest {
    p: u64,
    #[serde(default)]
    center: Option<VertexJson>,
    radius: u32,
    #[serde(default)]
    limits: Option<LimitsJson>,
}

pub fn tree_ball(text: &str, env: Option<Limits>) -> Result<(Value, String), Failure> {
    let req: BallRequest = parse(text)?;
    let limits = resolve_limits(env, req.limits)?;
    check_prime(req.p)?;
    let center = vertex_or_standard(req.p, &req.center)?;
    let set = ball(&center, req.radius, &limits)?;
    let highlights: BTreeMap<Vertex, String> = [(center.clone(), "center".to_string())].into();
    let dot = export_dot(&set, &highlights);
    let json = json!({
        "p": req.p,
        "center": to_value(&center.to_json()),
        "radius": req.radius,
        "count": set.len(),
        "vertices": vertex_list(&set),
    });
    Ok((json, dot))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GlobalRequest {
    field: BaseField,
    #[serde(default)]
    algebra: QuatAlgebra,
    #[serde(default)]
    genus: GenusSpec,
    #[serde(default)]
    suborder: Option<SuborderGlobal>,
}

fn primes(list: &[PrimeIdeal]) -> Value {
    to_value(&list)
}

pub fn sigma(text: &str) -> Result<Value, Failure> {
    let req: GlobalRequest = parse(text)?;
    if req.suborder.is_some() {
        return Err(Failure::Schema("global sigma takes no suborder".into()));
    }
    let s = spinor_class_field(&req.field, &req.algebra, &req.genus)?;
    Ok(json!({
        "sigma_degree": s.degree,
        "ambient_order": s.ambient_order,
        "narrow": s.narrow,
        "forced_split": primes(&s.forced_split),
    }))
}

pub fn rep_field(text: &str) -> Result<Value, Failure> {
    let req: GlobalRequest = parse(text)?;
    let Some(h) = &req.suborder else {
        return Err(Failure::Schema("global rep-field needs a suborder".into()));
    };
    let s = spinor_class_field(&req.field, &req.algebra, &req.genus)?;
    let f = global_rep_field(&req.field, &req.algebra, &req.genus, h)?;
    Ok(json!({
        "sigma_degree": s.degree,
        "rep_field_degree": f.degree,
        "ratio": selectivity_ratio(&f).to_string(),
        "forced_split": primes(&f.forced_split),
        "strict_places": primes(&f.strict_places),
    }))
}
