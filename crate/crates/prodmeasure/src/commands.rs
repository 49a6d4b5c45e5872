//! Dispatch from a subcommand and a problem file to a report document.

use prodmeasure_core::banach::CoordinateRectangle;
use prodmeasure_core::lp::AmbientSpace;
use prodmeasure_core::measure::{
    binary_family, packing_check, premeasure, split_check, subadditivity_bound, translate_rect, CoverPrefix,
};
use prodmeasure_core::numeric::int;
use prodmeasure_core::product::{compare_products, default_precision, Bounded, ProductValue};
use prodmeasure_core::rectangle::{refine, RectUnion, Rectangle};
use prodmeasure_core::simple::CylinderSimpleFunction;
use prodmeasure_core::Rational;
use serde_json::{json, Value};

use crate::codec::{self, object, rational_out, real_out};
use crate::error::{CliError, CliResult};
use crate::problem::Problem;

/// Every subcommand that reads a problem file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Vol,
    ProductClassify,
    ProductPlus,
    ProductCompare,
    SetIntersect,
    SetComplement,
    SetRefine,
    MeasureUnion,
    MeasureSplit,
    MeasureCoverBound,
    MeasureBinaryFamily,
    MeasureTranslate,
    MeasurePacking,
    LpIntegrate,
    LpNorm,
    LpJessen,
    LpFrakS,
    LpFrakT,
    LpRoundtrip,
    RnSupport,
    RnDecompose,
    RnFrakP,
    RnRoundtrip,
    BanachCube,
    BanachMeasure,
    BanachEmbed,
    BanachIntegrate,
}

impl Op {
    pub const ALL: [Op; 27] = [
        Op::Vol,
        Op::ProductClassify,
        Op::ProductPlus,
        Op::ProductCompare,
        Op::SetIntersect,
        Op::SetComplement,
        Op::SetRefine,
        Op::MeasureUnion,
        Op::MeasureSplit,
        Op::MeasureCoverBound,
        Op::MeasureBinaryFamily,
        Op::MeasureTranslate,
        Op::MeasurePacking,
        Op::LpIntegrate,
        Op::LpNorm,
        Op::LpJessen,
        Op::LpFrakS,
        Op::LpFrakT,
        Op::LpRoundtrip,
        Op::RnSupport,
        Op::RnDecompose,
        Op::RnFrakP,
        Op::RnRoundtrip,
        Op::BanachCube,
        Op::BanachMeasure,
        Op::BanachEmbed,
        Op::BanachIntegrate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::Vol => "vol",
            Op::ProductClassify => "product classify",
            Op::ProductPlus => "product plus",
            Op::ProductCompare => "product compare",
            Op::SetIntersect => "set intersect",
            Op::SetComplement => "set complement",
            Op::SetRefine => "set refine",
            Op::MeasureUnion => "measure union",
            Op::MeasureSplit => "measure split",
            Op::MeasureCoverBound => "measure cover-bound",
            Op::MeasureBinaryFamily => "measure binary-family",
            Op::MeasureTranslate => "measure translate",
            Op::MeasurePacking => "measure packing",
            Op::LpIntegrate => "lp integrate",
            Op::LpNorm => "lp norm",
            Op::LpJessen => "lp jessen",
            Op::LpFrakS => "lp frakS",
            Op::LpFrakT => "lp frakT",
            Op::LpRoundtrip => "lp roundtrip",
            Op::RnSupport => "rn support",
            Op::RnDecompose => "rn decompose",
            Op::RnFrakP => "rn frakP",
            Op::RnRoundtrip => "rn roundtrip",
            Op::BanachCube => "banach cube",
            Op::BanachMeasure => "banach measure",
            Op::BanachEmbed => "banach embed",
            Op::BanachIntegrate => "banach integrate",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == name)
    }
}

/// Flags shared by all subcommands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub precision: Rational,
    pub depth: usize,
    pub p: Rational,
}

impl Default for Options {
    fn default() -> Self {
        Options { precision: default_precision(), depth: 8, p: int(1) }
    }
}

impl Options {
    /// Fills unset flags from a problem file, then from the defaults.
    pub fn resolve(
        precision: Option<Rational>,
        depth: Option<usize>,
        p: Option<Rational>,
        pb: &Problem,
    ) -> CliResult<Options> {
        let d = Options::default();
        let from_file = |key: &str| pb.flags.get(key);
        for key in pb.flags.keys() {
            if !matches!(key.as_str(), "precision" | "depth" | "p") {
                return Err(CliError::Parse(format!("unknown flag \"{key}\"")));
            }
        }
        Ok(Options {
            precision: match (precision, from_file("precision")) {
                (Some(q), _) => q,
                (None, Some(v)) => codec::rational(v)?,
                (None, None) => d.precision,
            },
            depth: match (depth, from_file("depth")) {
                (Some(n), _) => n,
                (None, Some(v)) => codec::usize_value(v)?,
                (None, None) => d.depth,
            },
            p: match (p, from_file("p")) {
                (Some(q), _) => q,
                (None, Some(v)) => codec::rational(v)?,
                (None, None) => d.p,
            },
        })
    }
}

fn value_fields(v: &ProductValue) -> [(&'static str, Value); 2] {
    [("value", codec::product_value_out(v)), ("kind", json!(v.kind_name()))]
}

fn rects(pb: &Problem, key: &str) -> CliResult<Vec<Rectangle>> {
    pb.list(key)?.into_iter().map(|v| codec::rectangle(v, &pb.factors)).collect()
}

fn rects_out(rs: &[Rectangle]) -> Value {
    Value::Array(rs.iter().map(codec::rectangle_out).collect())
}

fn ambient(pb: &Problem) -> CliResult<AmbientSpace> {
    Ok(AmbientSpace::new(codec::rectangle(pb.param("ambient")?, &pb.factors)?)?)
}

pub fn run(op: Op, pb: &Problem, opts: &Options) -> CliResult<Value> {
    let prec = &opts.precision;
    let p = &opts.p;
    let mut out: Vec<(&'static str, Value)> = vec![("command", json!(op.name()))];
    match op {
        Op::Vol => {
            let r = codec::rectangle(pb.param("rect")?, &pb.factors)?;
            out.extend(value_fields(&r.vol_with(prec)?));
            out.push(("rect", codec::rectangle_out(&r)));
        }
        Op::ProductClassify => {
            let rule = codec::rule(pb.param("rule")?)?;
            out.extend(value_fields(&rule.classify(prec)?));
        }
        Op::ProductPlus => {
            let rule = codec::rule(pb.param("rule")?)?;
            let plus = rule.plus_product(prec)?;
            out.extend(value_fields(&plus.value));
            out.push(("above", codec::product_value_out(&plus.above)));
            out.push(("below", codec::product_value_out(&plus.below)));
        }
        Op::ProductCompare => {
            let a = codec::rule(pb.param("a")?)?;
            let b = codec::rule(pb.param("b")?)?;
            let c = compare_products(&a, &b, prec)?;
            let lhs = match &c.lhs {
                Bounded::Value(v) => json!({"value": codec::product_value_out(v), "kind": v.kind_name()}),
                Bounded::AtMost(q) => json!({"at_most": rational_out(q)}),
            };
            out.push(("lhs", lhs));
            out.push(("rhs", codec::product_value_out(&c.rhs)));
            out.push(("checked_terms", json!(c.checked_terms)));
            out.push(("exhaustive", json!(c.exhaustive)));
        }
        Op::SetIntersect => {
            let a = codec::rectangle(pb.param("a")?, &pb.factors)?;
            let b = codec::rectangle(pb.param("b")?, &pb.factors)?;
            let r = a.intersect(&b)?;
            out.push(("rect", codec::rectangle_out(&r)));
            out.push(("empty", json!(r.is_empty())));
            out.extend(value_fields(&r.vol_with(prec)?));
        }
        Op::SetComplement => {
            let r = codec::rectangle(pb.param("rect")?, &pb.factors)?;
            let stream = r.complement_stream(opts.depth)?;
            out.push(("depth", json!(opts.depth)));
            out.push(("terms", rects_out(&stream.terms)));
            out.push(("exhausted", json!(stream.exhausted)));
        }
        Op::SetRefine => {
            let rs = rects(pb, "rects")?;
            let refinement = refine(&rs)?;
            out.push(("atoms", rects_out(&refinement.atoms)));
            out.push(("members", json!(refinement.members)));
        }
        Op::MeasureUnion => {
            let u = RectUnion::new(rects(pb, "rects")?)?;
            out.extend(value_fields(&premeasure(&u, prec)?));
            out.push(("members", json!(u.len())));
        }
        Op::MeasureSplit => {
            let b = RectUnion::new(rects(pb, "b")?)?;
            let c = codec::rectangle(pb.param("c")?, &pb.factors)?;
            let s = split_check(&b, &c, prec)?;
            out.push(("lhs", codec::product_value_out(&s.lhs)));
            out.push(("inside", codec::product_value_out(&s.rhs_in)));
            out.push(("outside", codec::product_value_out(&s.rhs_out)));
            out.push(("equal", json!(s.equal)));
        }
        Op::MeasureCoverBound => {
            let cp = CoverPrefix { cover: rects(pb, "cover")?, target: RectUnion::new(rects(pb, "target")?)? };
            let b = subadditivity_bound(&cp, prec)?;
            out.push(("bound", codec::product_value_out(&b.bound)));
            out.push(("exact", codec::product_value_out(&b.exact)));
            out.push(("slack", b.slack.as_ref().map_or(Value::Null, rational_out)));
            out.push(("holds", json!(b.exact.certainly_le(&b.bound))));
        }
        Op::MeasurePacking => {
            let inner = rects(pb, "inner")?;
            let outer = codec::rectangle(pb.param("outer")?, &pb.factors)?;
            let c = packing_check(&inner, &outer, prec)?;
            out.push(("sum", codec::product_value_out(&c.sum)));
            out.push(("outer", codec::product_value_out(&c.outer)));
            out.push(("holds", json!(c.holds)));
        }
        Op::MeasureBinaryFamily => {
            let k = pb.usize_param("k")?;
            let family = binary_family(pb.factors.clone(), k)?;
            let mut each: Vec<Value> = Vec::new();
            for r in &family {
                let v = codec::product_value_out(&r.vol_with(prec)?);
                if !each.contains(&v) {
                    each.push(v);
                }
            }
            let u = RectUnion::new(family)?;
            out.push(("k", json!(k)));
            out.push(("members", json!(u.len())));
            out.push(("member_volumes", Value::Array(each)));
            out.push(("disjoint", json!(true)));
            out.extend(value_fields(&premeasure(&u, prec)?));
        }
        Op::MeasureTranslate => {
            let r = codec::rectangle(pb.param("rect")?, &pb.factors)?;
            let shift = codec::shift(pb.param("shift")?)?;
            let moved = translate_rect(&r, &shift)?;
            let (before, after) = (r.vol_with(prec)?, moved.vol_with(prec)?);
            out.push(("rect", codec::rectangle_out(&moved)));
            out.push(("before", codec::product_value_out(&before)));
            out.push(("after", codec::product_value_out(&after)));
            out.push(("invariant", json!(before == after)));
        }
        Op::LpIntegrate => {
            let a = ambient(pb)?;
            let f = codec::function(pb.param("f")?)?;
            out.push(("value", rational_out(&a.integrate(&f)?)));
            out.push(("kind", json!("exact")));
        }
        Op::LpNorm => {
            let a = ambient(pb)?;
            let n = if pb.has("s") {
                a.lim_norm(&codec::lim_sequence(pb.param("s")?)?, p)?
            } else {
                a.lp_norm(&codec::function(pb.param("f")?)?, p)?
            };
            out.push(("norm", codec::norm_out(&n)));
        }
        Op::LpJessen => {
            let a = ambient(pb)?;
            let f = codec::function(pb.param("f")?)?;
            let n = pb.usize_param("n")?;
            let canon = f.canonical_sum(&a)?;
            let tail = a.tail_integral(&f, n)?;
            let head = a.head_integral(&f, n)?;
            let total = a.integrate(&f)?;
            out.push(("n", json!(n)));
            out.push(("tail", codec::function_out(&tail)));
            out.push(("head", codec::function_out(&head)));
            out.push(("integral", rational_out(&total)));
            out.push(("tail_is_f", json!(tail.equivalent(&canon, &a)?)));
            out.push(("head_is_integral", json!(head.equivalent(&CylinderSimpleFunction::constant(total), &a)?)));
        }
        Op::LpFrakS => {
            let a = ambient(pb)?;
            let s = a.frak_s(&codec::function(pb.param("f")?)?)?;
            out.push(("sequence", codec::lim_sequence_out(&s)));
        }
        Op::LpFrakT => {
            let a = ambient(pb)?;
            let f = a.frak_t(&codec::lim_sequence(pb.param("s")?)?)?;
            out.push(("function", codec::function_out(&f)));
        }
        Op::LpRoundtrip => {
            let a = ambient(pb)?;
            let f = codec::function(pb.param("f")?)?;
            let s = a.frak_s(&f)?;
            let back = a.frak_t(&s)?;
            let (nf, ns) = (a.lp_norm(&f, p)?, a.lim_norm(&s, p)?);
            out.push(("sequence", codec::lim_sequence_out(&s)));
            out.push(("back", codec::function_out(&back)));
            out.push(("identity", json!(back == f.canonical_sum(&a)?)));
            out.push(("norm", codec::norm_out(&nf)));
            out.push(("lim_norm", codec::norm_out(&ns)));
            out.push(("isometry", json!(nf.pth_power == ns.pth_power)));
        }
        Op::RnSupport => {
            let f = codec::rn_function(pb.param("f")?)?;
            let cubes = f.cube_support()?;
            out.push(("cubes", Value::Array(cubes.iter().map(codec::cube_index_out).collect())));
            out.push(("count", json!(cubes.len())));
        }
        Op::RnDecompose => {
            let f = codec::rn_function(pb.param("f")?)?;
            let b = f.integral_by_cubes(p)?;
            let pieces: Vec<Value> = b
                .pieces
                .iter()
                .map(|(a, v)| json!({"index": codec::cube_index_out(a), "value": real_out(v)}))
                .collect();
            out.push(("pieces", Value::Array(pieces)));
            out.push(("total", real_out(&b.total)));
            out.push(("direct", real_out(&b.direct)));
            out.push(("equal", json!(b.total == b.direct)));
        }
        Op::RnFrakP => {
            let f = codec::rn_function(pb.param("f")?)?;
            let e = f.frak_p()?;
            let (oplus, norm) = (e.oplus_norm(p)?, f.lp_norm(p)?);
            out.push(("element", codec::direct_sum_out(&e)));
            out.push(("oplus_norm", codec::norm_out(&oplus)));
            out.push(("norm", codec::norm_out(&norm)));
            out.push(("isometry", json!(oplus.pth_power == norm.pth_power)));
        }
        Op::RnRoundtrip => {
            let f = codec::rn_function(pb.param("f")?)?;
            let back = f.frak_p()?.frak_p_inv()?;
            out.push(("function_identity", json!(back == f)));
            if pb.has("g") {
                let g = codec::direct_sum(pb.param("g")?)?;
                let again = g.frak_p_inv()?.frak_p()?;
                out.push(("element_identity", json!(again == g.canonical()?)));
            }
        }
        Op::BanachCube => {
            let basis = codec::basis(pb.param("basis")?)?;
            let q = CoordinateRectangle::cube();
            let image = q.image()?;
            out.push(("basis", codec::basis_out(&basis)));
            out.push(("cube", codec::coord_rect_out(&q)));
            out.push(("image", codec::rectangle_out(&image)));
            out.push(("value", rational_out(&q.mu_x()?)));
            out.push(("kind", json!("exact")));
        }
        Op::BanachMeasure => {
            let b = codec::coord_rect(pb.param("rect")?)?;
            let mu = b.mu_x()?;
            out.push(("value", rational_out(&mu)));
            out.push(("kind", json!("exact")));
            if pb.has("shift") {
                let basis = codec::basis(pb.param("basis")?)?;
                let v: Vec<Rational> =
                    pb.list("shift")?.into_iter().map(codec::rational).collect::<CliResult<_>>()?;
                let moved = b.translate(&basis, &v)?;
                let after = moved.mu_x()?;
                out.push(("translated", codec::coord_rect_out(&moved)));
                out.push(("translated_value", rational_out(&after)));
                out.push(("invariant", json!(after == mu)));
            }
        }
        Op::BanachEmbed => {
            let f = codec::x_function(pb.param("f")?)?;
            let e = f.frak_e()?;
            let (nx, nr) = (f.lp_norm(p)?, e.lp_norm(p)?);
            out.push(("image", codec::rn_function_out(&e)));
            out.push(("norm", codec::norm_out(&nx)));
            out.push(("image_norm", codec::norm_out(&nr)));
            out.push(("isometry", json!(nx.pth_power == nr.pth_power)));
        }
        Op::BanachIntegrate => {
            let f = codec::x_function(pb.param("f")?)?;
            let r = f.integrate_on_x(p)?;
            let pieces: Vec<Value> = r
                .by_cubes
                .pieces
                .iter()
                .map(|(a, v)| json!({"index": codec::cube_index_out(a), "value": real_out(v)}))
                .collect();
            out.push(("direct", real_out(&r.direct)));
            out.push(("by_cubes", real_out(&r.by_cubes.total)));
            out.push(("oplus", real_out(&r.oplus)));
            out.push(("pieces", Value::Array(pieces)));
            out.push(("integer_lattice", real_out(&r.integer_lattice)));
            out.push(("agree", json!(r.direct == r.by_cubes.total && r.direct == r.oplus)));
        }
    }
    Ok(object(out))
}

/// Compares a report with the `expect` block of its problem file: every
/// expected key must be present with an identical value.
pub fn check_expectations(report: &Value, expect: &Value) -> CliResult<()> {
    let expected = expect.as_object().ok_or_else(|| CliError::Parse("\"expect\" must be an object".into()))?;
    for (key, want) in expected {
        match report.get(key) {
            Some(got) if got == want => {}
            Some(got) => return Err(CliError::Check(format!("\"{key}\": expected {want}, got {got}"))),
            None => return Err(CliError::Check(format!("\"{key}\" missing from the report"))),
        }
    }
    Ok(())
}

/// Runs a problem file whose `expect` block names its command and checks
/// the report against it.
pub fn run_example(text: &str) -> CliResult<Value> {
    let pb = Problem::parse(text)?;
    let expect = pb.expect.clone().ok_or_else(|| CliError::Parse("example has no \"expect\" block".into()))?;
    let name = expect
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Parse("\"expect\" must name the command".into()))?;
    let op = Op::from_name(name).ok_or_else(|| CliError::Parse(format!("unknown command \"{name}\"")))?;
    let opts = Options::resolve(None, None, None, &pb)?;
    let report = run(op, &pb, &opts)?;
    check_expectations(&report, &expect)?;
    Ok(report)
}
