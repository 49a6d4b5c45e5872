//! JSON encoding of library objects. Rationals travel as `"n/d"` strings,
//! infinite interval ends as `"inf"` / `"-inf"`.

use std::collections::BTreeMap;
use std::sync::Arc;

use prodmeasure_core::banach::{CoordinateRectangle, MBasisSpec, Scaling, XSimpleFunction};
use prodmeasure_core::factor::{Bound, Coord, FactorSequence, FactorSpace, GeneratorSet, Interval};
use prodmeasure_core::interval::{RatInterval, Real};
use prodmeasure_core::lp::{LimSequence, LpNorm};
use prodmeasure_core::numeric::{parse_rational, rat};
use prodmeasure_core::product::{Certificate, Family, ProductValue, SequenceRule};
use prodmeasure_core::rectangle::{Point, Rectangle, Shift, TailSpec};
use prodmeasure_core::rn::{CubeIndex, DirectSumElement, RnFunction};
use prodmeasure_core::simple::{CylinderSimpleFunction, SimpleTerm};
use prodmeasure_core::{Extended, Rational};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

fn bad(what: &str, v: &Value) -> CliError {
    CliError::Parse(format!("expected {what}, found {v}"))
}

fn field<'a>(v: &'a Value, key: &str) -> CliResult<&'a Value> {
    v.get(key).ok_or_else(|| CliError::Parse(format!("missing field \"{key}\" in {v}")))
}

fn array<'a>(v: &'a Value, what: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(what, v))
}

pub fn usize_value(v: &Value) -> CliResult<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| bad("a nonnegative integer", v))
}

pub fn rational(v: &Value) -> CliResult<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| bad("a rational \"n/d\"", v)),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(bad("a rational \"n/d\"", v)),
    }
}

pub fn rational_out(q: &Rational) -> Value {
    Value::String(q.to_string())
}

fn rationals(v: &Value) -> CliResult<Vec<Rational>> {
    array(v, "a list of rationals")?.iter().map(rational).collect()
}

fn rationals_out(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_out).collect())
}

pub fn extended_out(x: &Extended) -> Value {
    Value::String(x.to_string())
}

fn bound(v: &Value) -> CliResult<Bound> {
    match v.as_str() {
        Some("inf") | Some("+inf") => Ok(Bound::PosInf),
        Some("-inf") => Ok(Bound::NegInf),
        _ => rational(v).map(Bound::Finite),
    }
}

fn bound_out(b: &Bound) -> Value {
    Value::String(b.to_string())
}

/// `"full"`, a list of `[lo, hi]` pairs, or a list of atom names.
pub fn set(v: &Value) -> CliResult<GeneratorSet> {
    if v.as_str() == Some("full") {
        return Ok(GeneratorSet::Full);
    }
    let items = array(v, "\"full\", a list of [lo, hi] pairs or a list of atom names")?;
    if items.is_empty() {
        return Ok(GeneratorSet::Intervals(Vec::new()));
    }
    if items.iter().all(Value::is_string) {
        return Ok(GeneratorSet::Atoms(items.iter().map(|s| s.as_str().unwrap().to_string()).collect()));
    }
    let mut intervals = Vec::with_capacity(items.len());
    for item in items {
        match item.as_array().map(Vec::as_slice) {
            Some([lo, hi]) => intervals.push(Interval { lo: bound(lo)?, hi: bound(hi)? }),
            _ => return Err(bad("an interval [lo, hi]", item)),
        }
    }
    Ok(GeneratorSet::Intervals(intervals))
}

pub fn set_out(s: &GeneratorSet) -> Value {
    match s {
        GeneratorSet::Full => json!("full"),
        GeneratorSet::Intervals(v) => Value::Array(v.iter().map(|iv| json!([bound_out(&iv.lo), bound_out(&iv.hi)])).collect()),
        GeneratorSet::Atoms(a) => Value::Array(a.iter().map(|n| json!(n)).collect()),
    }
}

fn sets(v: &Value) -> CliResult<Vec<GeneratorSet>> {
    array(v, "a list of sets")?.iter().map(set).collect()
}

fn sets_out(v: &[GeneratorSet]) -> Value {
    Value::Array(v.iter().map(set_out).collect())
}

/// `"line"`, `"unit"` or `{"discrete": [{"name", "weight"}]}`.
pub fn factor(v: &Value) -> CliResult<FactorSpace> {
    match v.as_str() {
        Some("line") => return Ok(FactorSpace::Line),
        Some("unit") => return Ok(FactorSpace::UnitInterval),
        _ => {}
    }
    let atoms = array(field(v, "discrete")?, "a list of atoms")?;
    let mut parsed = Vec::with_capacity(atoms.len());
    for a in atoms {
        let name = field(a, "name")?.as_str().ok_or_else(|| bad("an atom name", a))?.to_string();
        parsed.push((name, rational(field(a, "weight")?)?));
    }
    Ok(FactorSpace::discrete(parsed)?)
}

pub fn factor_out(f: &FactorSpace) -> Value {
    match f {
        FactorSpace::Line => json!("line"),
        FactorSpace::UnitInterval => json!("unit"),
        FactorSpace::Discrete(atoms) => json!({
            "discrete": atoms.iter().map(|a| json!({"name": a.name, "weight": rational_out(&a.weight)})).collect::<Vec<_>>()
        }),
    }
}

/// A single factor repeated, or `{"prefix": [...], "tail": factor}`.
pub fn factors(v: &Value) -> CliResult<FactorSequence> {
    match v.get("tail") {
        Some(tail) => {
            let prefix = match v.get("prefix") {
                Some(p) => array(p, "a list of factors")?.iter().map(factor).collect::<CliResult<_>>()?,
                None => Vec::new(),
            };
            Ok(FactorSequence { prefix, tail: factor(tail)? })
        }
        None => Ok(FactorSequence::uniform(factor(v)?)),
    }
}

pub fn factors_out(f: &FactorSequence) -> Value {
    if f.prefix.is_empty() {
        factor_out(&f.tail)
    } else {
        json!({"prefix": f.prefix.iter().map(factor_out).collect::<Vec<_>>(), "tail": factor_out(&f.tail)})
    }
}

pub fn family(v: &Value) -> CliResult<Family> {
    let name = field(v, "name")?.as_str().ok_or_else(|| bad("a family name", v))?;
    Ok(match name {
        "constant" => Family::Constant { value: rational(field(v, "value")?)? },
        "geometric-log" => Family::GeometricLog { scale: rational(field(v, "scale")?)?, ratio: rational(field(v, "ratio")?)? },
        "alternating-harmonic-exp" => Family::AlternatingHarmonicExp { scale: rational(field(v, "scale")?)? },
        "one-minus-geometric" => Family::OneMinusGeometric { ratio: rational(field(v, "ratio")?)? },
        other => return Err(CliError::Parse(format!("unknown family \"{other}\""))),
    })
}

pub fn family_out(f: &Family) -> Value {
    match f {
        Family::Constant { value } => json!({"name": f.name(), "value": rational_out(value)}),
        Family::GeometricLog { scale, ratio } => {
            json!({"name": f.name(), "scale": rational_out(scale), "ratio": rational_out(ratio)})
        }
        Family::AlternatingHarmonicExp { scale } => json!({"name": f.name(), "scale": rational_out(scale)}),
        Family::OneMinusGeometric { ratio } => json!({"name": f.name(), "ratio": rational_out(ratio)}),
    }
}

fn certificate(v: &Value, fam: &Family) -> CliResult<Option<Certificate>> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) if s == "default" => Ok(fam.default_certificate()),
        Value::String(s) if s == "alternating-convex" => Ok(Some(Certificate::AlternatingConvex)),
        _ => {
            if let Some(g) = v.get("geometric") {
                Ok(Some(Certificate::Geometric {
                    coefficient: rational(field(g, "coefficient")?)?,
                    ratio: rational(field(g, "ratio")?)?,
                }))
            } else if let Some(h) = v.get("harmonic") {
                Ok(Some(Certificate::Harmonic { coefficient: rational(field(h, "coefficient")?)? }))
            } else {
                Err(bad("a certificate", v))
            }
        }
    }
}

fn certificate_out(c: &Option<Certificate>) -> Value {
    match c {
        None => Value::Null,
        Some(Certificate::AlternatingConvex) => json!("alternating-convex"),
        Some(Certificate::Geometric { coefficient, ratio }) => {
            json!({"geometric": {"coefficient": rational_out(coefficient), "ratio": rational_out(ratio)}})
        }
        Some(Certificate::Harmonic { coefficient }) => json!({"harmonic": {"coefficient": rational_out(coefficient)}}),
    }
}

/// `{"eventually": {"prefix", "tail"}}`, `{"periodic": [...]}` or
/// `{"closedform": {"family": {...}, "certificate": ..., "offset": n}}`.
pub fn rule(v: &Value) -> CliResult<SequenceRule> {
    if let Some(e) = v.get("eventually") {
        let prefix = match e.get("prefix") {
            Some(p) => rationals(p)?,
            None => Vec::new(),
        };
        return Ok(SequenceRule::eventually(prefix, rational(field(e, "tail")?)?)?);
    }
    if let Some(p) = v.get("periodic") {
        return Ok(SequenceRule::periodic(rationals(p)?)?);
    }
    let c = field(v, "closedform")?;
    let fam = family(field(c, "family")?)?;
    let cert = certificate(c.get("certificate").unwrap_or(&Value::Null), &fam)?;
    let offset = match c.get("offset") {
        Some(o) => usize_value(o)?,
        None => 0,
    };
    let rule = SequenceRule::ClosedForm { family: fam, certificate: cert, offset };
    rule.validate()?;
    Ok(rule)
}

pub fn rule_out(r: &SequenceRule) -> Value {
    match r {
        SequenceRule::EventuallyConstant { prefix, tail } => {
            json!({"eventually": {"prefix": rationals_out(prefix), "tail": rational_out(tail)}})
        }
        SequenceRule::Periodic { pattern } => json!({"periodic": rationals_out(pattern)}),
        SequenceRule::ClosedForm { family, certificate, offset } => json!({"closedform": {
            "family": family_out(family),
            "certificate": certificate_out(certificate),
            "offset": offset,
        }}),
    }
}

/// `"full"`, `{"unit": set}` or `{"general": {"start", "lengths"}}`.
pub fn tail(v: &Value) -> CliResult<TailSpec> {
    if v.as_str() == Some("full") {
        return Ok(TailSpec::Full);
    }
    if let Some(s) = v.get("unit") {
        return Ok(TailSpec::Unit(set(s)?));
    }
    if let Some(g) = v.get("general") {
        return Ok(TailSpec::General { start: rational(field(g, "start")?)?, lengths: rule(field(g, "lengths")?)? });
    }
    Err(bad("a tail (\"full\", {\"unit\": set} or {\"general\": ...})", v))
}

pub fn tail_out(t: &TailSpec) -> Value {
    match t {
        TailSpec::Full => json!("full"),
        TailSpec::Unit(s) => json!({"unit": set_out(s)}),
        TailSpec::General { start, lengths } => {
            json!({"general": {"start": rational_out(start), "lengths": rule_out(lengths)}})
        }
    }
}

/// `{"head": [sets], "tail": tail}`; an optional `"factors"` overrides the
/// problem-wide factors.
pub fn rectangle(v: &Value, factors_default: &Arc<FactorSequence>) -> CliResult<Rectangle> {
    let fs = match v.get("factors") {
        Some(f) => Arc::new(factors(f)?),
        None => factors_default.clone(),
    };
    let head = match v.get("head") {
        Some(h) => sets(h)?,
        None => Vec::new(),
    };
    let t = match v.get("tail") {
        Some(t) => tail(t)?,
        None => TailSpec::Full,
    };
    Ok(Rectangle::new(fs, head, t)?)
}

pub fn rectangle_out(r: &Rectangle) -> Value {
    json!({"head": sets_out(r.head()), "tail": tail_out(r.tail())})
}

/// `{"head": [rationals], "tail": rational}`.
pub fn shift(v: &Value) -> CliResult<Shift> {
    let head = match v.get("head") {
        Some(h) => rationals(h)?,
        None => Vec::new(),
    };
    let tail = match v.get("tail") {
        Some(t) => rational(t)?,
        None => Rational::from_integer(0.into()),
    };
    Ok(Shift { head, tail })
}

pub fn shift_out(s: &Shift) -> Value {
    json!({"head": rationals_out(&s.head), "tail": rational_out(&s.tail)})
}

pub fn coord_out(c: &Coord) -> Value {
    match c {
        Coord::Real(q) => rational_out(q),
        Coord::Atom(a) => json!({"atom": a}),
    }
}

pub fn point_out(p: &Point) -> Value {
    json!({"head": p.head.iter().map(coord_out).collect::<Vec<_>>(), "tail": coord_out(&p.tail)})
}

/// `{"level": n, "terms": [{"coeff", "cell": [sets]}]}`.
pub fn function(v: &Value) -> CliResult<CylinderSimpleFunction> {
    let level = usize_value(field(v, "level")?)?;
    let mut terms = Vec::new();
    for t in array(field(v, "terms")?, "a list of terms")? {
        terms.push((rational(field(t, "coeff")?)?, sets(field(t, "cell")?)?));
    }
    Ok(CylinderSimpleFunction::new(level, terms)?)
}

pub fn function_out(f: &CylinderSimpleFunction) -> Value {
    let terms: Vec<Value> = f
        .terms
        .iter()
        .map(|SimpleTerm { coeff, cell }| json!({"coeff": rational_out(coeff), "cell": sets_out(cell)}))
        .collect();
    json!({"level": f.level, "terms": terms})
}

/// A function on the sequence space: `function` plus an optional `"offset"`.
pub fn rn_function(v: &Value) -> CliResult<RnFunction> {
    let offset = match v.get("offset") {
        Some(o) => rational(o)?,
        None => Rational::from_integer(0.into()),
    };
    Ok(RnFunction::new(offset, function(v)?)?)
}

pub fn rn_function_out(f: &RnFunction) -> Value {
    let mut v = function_out(f.function());
    v["offset"] = rational_out(f.offset());
    v
}

pub fn lim_sequence(v: &Value) -> CliResult<LimSequence> {
    Ok(LimSequence { level: usize_value(field(v, "level")?)?, g: function(field(v, "g")?)? })
}

pub fn lim_sequence_out(s: &LimSequence) -> Value {
    json!({"level": s.level, "g": function_out(&s.g)})
}

/// Sparse `[[coordinate, value], ...]`.
pub fn cube_index(v: &Value) -> CliResult<CubeIndex> {
    let mut pairs = Vec::new();
    for p in array(v, "a list of [coordinate, value] pairs")? {
        match p.as_array().map(Vec::as_slice) {
            Some([i, a]) => {
                let a = a.as_i64().ok_or_else(|| bad("an integer", a))?;
                pairs.push((usize_value(i)?, a));
            }
            _ => return Err(bad("a [coordinate, value] pair", p)),
        }
    }
    Ok(CubeIndex::from_pairs(pairs)?)
}

pub fn cube_index_out(a: &CubeIndex) -> Value {
    Value::Array(a.entries().map(|(i, v)| json!([i, v])).collect())
}

pub fn direct_sum(v: &Value) -> CliResult<DirectSumElement> {
    let offset = match v.get("offset") {
        Some(o) => rational(o)?,
        None => Rational::from_integer(0.into()),
    };
    let mut components = BTreeMap::new();
    for c in array(field(v, "components")?, "a list of components")? {
        let index = cube_index(field(c, "index")?)?;
        if components.insert(index.clone(), function(field(c, "function")?)?).is_some() {
            return Err(CliError::Parse(format!("duplicate component {index}")));
        }
    }
    Ok(DirectSumElement { offset, components })
}

pub fn direct_sum_out(e: &DirectSumElement) -> Value {
    let components: Vec<Value> = e
        .components
        .iter()
        .map(|(a, f)| json!({"index": cube_index_out(a), "function": function_out(f)}))
        .collect();
    json!({"offset": rational_out(&e.offset), "components": components})
}

/// A preset name (`"l1"`, `"l2"`, `"c0"`, scaling `2^-n`) or
/// `{"label", "ratio"}`.
pub fn basis(v: &Value) -> CliResult<MBasisSpec> {
    if let Some(name) = v.as_str() {
        return match name {
            "l1" | "l2" | "c0" => Ok(MBasisSpec::geometric(name, rat(1, 2))?),
            other => Err(CliError::Parse(format!("unknown basis preset \"{other}\""))),
        };
    }
    let label = field(v, "label")?.as_str().ok_or_else(|| bad("a label", v))?;
    Ok(MBasisSpec::geometric(label, rational(field(v, "ratio")?)?)?)
}

pub fn basis_out(b: &MBasisSpec) -> Value {
    match &b.scaling {
        Scaling::Geometric { ratio } => json!({"label": b.label, "ratio": rational_out(ratio)}),
    }
}

/// `"cube"` or `{"head": [sets], "tail_offset": rational}` (default `-1/2`).
pub fn coord_rect(v: &Value) -> CliResult<CoordinateRectangle> {
    if v.as_str() == Some("cube") {
        return Ok(CoordinateRectangle::cube());
    }
    let head = match v.get("head") {
        Some(h) => sets(h)?,
        None => Vec::new(),
    };
    let offset = match v.get("tail_offset") {
        Some(o) => rational(o)?,
        None => rat(-1, 2),
    };
    Ok(CoordinateRectangle::new(head, offset)?)
}

pub fn coord_rect_out(b: &CoordinateRectangle) -> Value {
    json!({"head": sets_out(&b.head), "tail_offset": rational_out(&b.tail_offset)})
}

pub fn x_function(v: &Value) -> CliResult<XSimpleFunction> {
    let b = basis(field(v, "basis")?)?;
    let mut terms = Vec::new();
    for t in array(field(v, "terms")?, "a list of terms")? {
        terms.push((rational(field(t, "coeff")?)?, coord_rect(field(t, "cell")?)?));
    }
    Ok(XSimpleFunction::new(b, terms)?)
}

pub fn x_function_out(f: &XSimpleFunction) -> Value {
    let terms: Vec<Value> =
        f.terms.iter().map(|(c, b)| json!({"coeff": rational_out(c), "cell": coord_rect_out(b)})).collect();
    json!({"basis": basis_out(&f.basis), "terms": terms})
}

pub fn interval_out(iv: &RatInterval) -> Value {
    json!([rational_out(&iv.lo), rational_out(&iv.hi)])
}

pub fn real_out(r: &Real) -> Value {
    match r {
        Real::Exact(q) => rational_out(q),
        Real::Approx(iv) => interval_out(iv),
    }
}

pub fn real_kind(r: &Real) -> &'static str {
    match r {
        Real::Exact(_) => "exact",
        Real::Approx(_) => "interval",
    }
}

pub fn product_value_out(v: &ProductValue) -> Value {
    match v {
        ProductValue::Interval(iv) => interval_out(iv),
        other => Value::String(other.to_string()),
    }
}

pub fn norm_out(n: &LpNorm) -> Value {
    json!({
        "p": rational_out(&n.p),
        "pth_power": real_out(&n.pth_power),
        "norm": real_out(&n.norm),
        "kind": real_kind(&n.norm),
    })
}

/// Object with sorted keys built from pairs.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(pairs: I) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}
