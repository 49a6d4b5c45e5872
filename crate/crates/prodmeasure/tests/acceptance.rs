//! One pass/fail line per acceptance criterion.

use std::path::PathBuf;
use std::process::Command;

use num_traits::{One, ToPrimitive, Zero};
use prodmeasure::checks::{self, SuiteReport};
use prodmeasure::gen::DEFAULT_SEED;
use prodmeasure_core::banach::CoordinateRectangle;
use prodmeasure_core::factor::GeneratorSet;
use prodmeasure_core::interval::Real;
use prodmeasure_core::measure::{binary_family, premeasure};
use prodmeasure_core::numeric::{int, rat};
use prodmeasure_core::product::{default_precision, Certificate, Family, ProductValue, SequenceRule};
use prodmeasure_core::rectangle::{RectUnion, Rectangle, TailSpec};
use prodmeasure_core::rn::{CubeIndex, RnFunction};
use prodmeasure_core::simple::CylinderSimpleFunction;
use prodmeasure_core::Rational;

type Outcome = Result<(), String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn suites(reports: &[SuiteReport], names: &[&str]) -> Outcome {
    for name in names {
        let r = reports.iter().find(|r| r.name == *name).ok_or_else(|| format!("suite {name} missing"))?;
        ensure(r.passed(), || format!("suite {name}: {} of {} failed: {:?}", r.failed, r.instances, r.failures))?;
    }
    Ok(())
}

fn min_instances(reports: &[SuiteReport], name: &str, n: usize) -> Outcome {
    let r = reports.iter().find(|r| r.name == name).ok_or_else(|| format!("suite {name} missing"))?;
    ensure(r.instances >= n, || format!("suite {name} ran {} instances, need {n}", r.instances))
}

fn plus_pathology() -> Outcome {
    let prec = default_precision();
    let alternating = SequenceRule::periodic(vec![int(2), rat(1, 2)]).map_err(|e| e.to_string())?;
    let classical = alternating.classify(&prec).map_err(|e| e.to_string())?;
    ensure(classical == ProductValue::Indeterminate, || format!("classical product of (2, 1/2) is {classical}"))?;
    let plus = alternating.plus_product(&prec).map_err(|e| e.to_string())?;
    ensure(plus.value == ProductValue::Zero && plus.value.exact_value() == Some(Rational::zero()), || {
        format!("plus product of (2, 1/2) is {}", plus.value)
    })?;
    let ones = SequenceRule::eventually(vec![], int(1)).map_err(|e| e.to_string())?;
    let (c, p) = (ones.classify(&prec).map_err(|e| e.to_string())?, ones.plus_product(&prec).map_err(|e| e.to_string())?);
    ensure(c == ProductValue::Exact(Rational::one()) && p.value == ProductValue::Exact(Rational::one()), || {
        format!("all-ones product: classical {c}, plus {}", p.value)
    })
}

/// `prod exp((-1)^(n+1)/n)` against partial sums of the alternating
/// harmonic series and the alternating-series remainder bound.
fn plus_classical_divergence() -> Outcome {
    let prec = rat(1, 1_000_000_000);
    let family = Family::AlternatingHarmonicExp { scale: int(1) };
    let rule = SequenceRule::closed_form(family, Some(Certificate::AlternatingConvex)).map_err(|e| e.to_string())?;
    let ProductValue::Interval(iv) = rule.classify(&prec).map_err(|e| e.to_string())? else {
        return Err("classical product is not an enclosure".into());
    };
    ensure(iv.contains(&int(2)), || format!("enclosure {iv} misses 2"))?;
    ensure(iv.width() <= prec, || format!("enclosure width {} exceeds 1e-9", iv.width()))?;

    let n = 2_000_000u32;
    let partial: f64 = (1..=n).map(|k| if k % 2 == 1 { 1.0 / k as f64 } else { -1.0 / k as f64 }).sum();
    let remainder = 1.0 / (n as f64 + 1.0);
    let (lo, hi) = ((partial - remainder).exp(), (partial + remainder).exp());
    let (clo, chi) = (iv.lo.to_f64().unwrap(), iv.hi.to_f64().unwrap());
    ensure(lo <= 2.0 && 2.0 <= hi && clo <= hi + 1e-12 && lo <= chi + 1e-12, || {
        format!("oracle [{lo}, {hi}] disagrees with [{clo}, {chi}]")
    })?;

    let plus = rule.plus_product(&prec).map_err(|e| e.to_string())?;
    ensure(plus.value == ProductValue::Zero, || format!("plus product is {}", plus.value))
}

/// Oracle volume: product of side lengths of a rectangle with unit tail.
fn side_product(r: &Rectangle) -> Rational {
    r.head().iter().map(|s| r.factor(1).measure(s).unwrap().finite().unwrap().clone()).fold(int(1), |a, b| a * b)
}

fn additivity(reports: &[SuiteReport]) -> Outcome {
    suites(reports, &["additivity"])?;
    min_instances(reports, "additivity", 50)?;
    let mut g = prodmeasure::gen::seeded(7);
    let unit = TailSpec::Unit(GeneratorSet::unit_from(&int(0)));
    for k in [1, 5, 12] {
        let r = prodmeasure::gen::rectangle_with_tail(&mut g, 3, unit.clone()).map_err(|e| e.to_string())?;
        let cells = prodmeasure::gen::dyadic_partition(&mut g, &r, k).map_err(|e| e.to_string())?;
        let cell_sum: Rational = cells.iter().map(side_product).fold(int(0), |a, b| a + b);
        let u = RectUnion::new(cells).map_err(|e| e.to_string())?;
        let pm = premeasure(&u, &default_precision()).map_err(|e| e.to_string())?;
        let want = ProductValue::exact(side_product(&r));
        ensure(pm == want && ProductValue::exact(cell_sum) == want && u.len() == 1 << k, || {
            format!("k = {k}: premeasure {pm}, oracle {want}")
        })?;
    }
    Ok(())
}

fn binary_family_witness() -> Outcome {
    let prec = default_precision();
    for k in 1..=10 {
        let family = binary_family(prodmeasure::gen::line_factors(), k).map_err(|e| e.to_string())?;
        ensure(family.len() == 1 << k, || format!("k = {k}: {} members", family.len()))?;
        for (a, r) in family.iter().enumerate() {
            let v = r.vol_with(&prec).map_err(|e| e.to_string())?;
            ensure(v == ProductValue::one(), || format!("k = {k}: member {a} has volume {v}"))?;
            for s in &family[a + 1..] {
                ensure(r.is_disjoint(s).map_err(|e| e.to_string())?, || format!("k = {k}: members overlap"))?;
            }
        }
        let total = premeasure(&RectUnion::new(family).map_err(|e| e.to_string())?, &prec).map_err(|e| e.to_string())?;
        ensure(total == ProductValue::exact(int(1 << k)), || format!("k = {k}: union measure {total}"))?;
    }
    Ok(())
}

fn cube_decomposition(reports: &[SuiteReport]) -> Outcome {
    suites(reports, &["cube-decomposition"])?;
    let cell = vec![GeneratorSet::interval(rat(1, 2), rat(3, 2))];
    let f = CylinderSimpleFunction::new(1, vec![(int(1), cell)]).map_err(|e| e.to_string())?;
    let f = RnFunction::new(int(0), f).map_err(|e| e.to_string())?;
    let support = f.cube_support().map_err(|e| e.to_string())?;
    ensure(support == vec![CubeIndex::origin(), CubeIndex::from_dense(&[1])], || format!("support {support:?}"))?;
    let b = f.integral_by_cubes(&int(1)).map_err(|e| e.to_string())?;
    let halves: Vec<Real> = b.pieces.iter().map(|(_, v)| v.clone()).collect();
    ensure(halves == vec![Real::Exact(rat(1, 2)); 2] && b.total == Real::Exact(int(1)), || {
        format!("pieces {halves:?}, total {}", b.total)
    })
}

fn banach(reports: &[SuiteReport]) -> Outcome {
    let q = CoordinateRectangle::cube().mu_x().map_err(|e| e.to_string())?;
    ensure(q == int(1), || format!("mu_X(Q) = {q}"))?;
    suites(reports, &["banach"])?;
    min_instances(reports, "banach", 51)
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_prodmeasure");
    let run = |args: &[&str]| {
        Command::new(bin).args(args).output().map_err(|e| format!("cannot run {bin}: {e}"))
    };
    let seed = DEFAULT_SEED.to_string();
    let first = run(&["check", "all", "--seed", &seed])?;
    let second = run(&["check", "all", "--seed", &seed])?;
    ensure(first.status.success(), || format!("check all failed: {}", String::from_utf8_lossy(&first.stdout)))?;
    ensure(first.stdout == second.stdout && !first.stdout.is_empty(), || "check all reports differ".into())?;
    let examples = workspace_root().join("docs/examples");
    let ex = run(&["check", "examples", examples.to_str().unwrap()])?;
    let report: serde_json::Value = serde_json::from_slice(&ex.stdout).map_err(|e| e.to_string())?;
    let count = report["examples"].as_array().map_or(0, Vec::len);
    ensure(ex.status.success() && report["all_pass"] == true && count > 0, || {
        format!("examples: {}", String::from_utf8_lossy(&ex.stdout))
    })
}

fn main() {
    let reports = checks::run_all(DEFAULT_SEED);
    let criteria: Vec<(&str, Outcome)> = vec![
        ("plus-product pathology", plus_pathology()),
        ("plus/classical divergence", plus_classical_divergence()),
        ("finite additivity on dyadic partitions", additivity(&reports)),
        (
            "packing and subadditivity",
            suites(&reports, &["packing", "subadditivity"])
                .and(min_instances(&reports, "packing", 50))
                .and(min_instances(&reports, "subadditivity", 50)),
        ),
        (
            "caratheodory split",
            suites(&reports, &["caratheodory"]).and(min_instances(&reports, "caratheodory", 100)),
        ),
        ("singleton premeasure equals volume", suites(&reports, &["singleton"])),
        ("non-sigma-finite witness", binary_family_witness().and(suites(&reports, &["binary-family"]))),
        ("lim-space isometry", suites(&reports, &["lp-isometry"]).and(min_instances(&reports, "lp-isometry", 50))),
        ("jessen stabilization", suites(&reports, &["jessen"])),
        ("unit-cube decomposition", cube_decomposition(&reports)),
        ("banach-space measure", banach(&reports)),
        ("cli determinism and examples", cli_determinism()),
    ];
    let mut failed = Vec::new();
    for (k, (name, outcome)) in criteria.iter().enumerate() {
        match outcome {
            Ok(()) => println!("criterion {}: pass ({name})", k + 1),
            Err(why) => {
                println!("criterion {}: FAIL ({name}): {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
