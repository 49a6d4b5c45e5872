use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prodmeasure::checks;
use prodmeasure::commands::{run_example, Op, Options};
use prodmeasure::gen::DEFAULT_SEED;
use prodmeasure::{CliError, CliResult, Problem};
use prodmeasure_core::Rational;
use serde_json::{json, Value};

/// Exact countable product measures from JSON problem files.
#[derive(Parser, Debug)]
#[command(name = "prodmeasure", version)]
struct Cli {
    /// Width bound for certified product enclosures, as "n/d".
    #[arg(long, global = true, value_parser = parse_rational)]
    precision: Option<Rational>,
    /// Number of complement terms to emit.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Exponent of the L_p norm, as "n/d" with p >= 1.
    #[arg(long, global = true, value_parser = parse_rational)]
    p: Option<Rational>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    prodmeasure_core::numeric::parse_rational(s).ok_or_else(|| format!("\"{s}\" is not a rational \"n/d\""))
}

/// Problem file argument; `-` or absent reads standard input.
#[derive(clap::Args, Debug)]
struct Input {
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Volume of a rectangle.
    Vol(Input),
    #[command(subcommand)]
    Product(ProductCmd),
    #[command(subcommand)]
    Set(SetCmd),
    #[command(subcommand)]
    Measure(MeasureCmd),
    #[command(subcommand)]
    Lp(LpCmd),
    #[command(subcommand)]
    Rn(RnCmd),
    #[command(subcommand)]
    Banach(BanachCmd),
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Subcommand, Debug)]
enum ProductCmd {
    Classify(Input),
    Plus(Input),
    Compare(Input),
}

#[derive(Subcommand, Debug)]
enum SetCmd {
    Intersect(Input),
    Complement(Input),
    Refine(Input),
}

#[derive(Subcommand, Debug)]
enum MeasureCmd {
    Union(Input),
    Split(Input),
    CoverBound(Input),
    BinaryFamily(Input),
    Translate(Input),
    Packing(Input),
}

#[derive(Subcommand, Debug)]
enum LpCmd {
    Integrate(Input),
    Norm(Input),
    Jessen(Input),
    #[command(name = "frakS")]
    FrakS(Input),
    #[command(name = "frakT")]
    FrakT(Input),
    Roundtrip(Input),
}

#[derive(Subcommand, Debug)]
enum RnCmd {
    Support(Input),
    Decompose(Input),
    #[command(name = "frakP")]
    FrakP(Input),
    Roundtrip(Input),
}

#[derive(Subcommand, Debug)]
enum BanachCmd {
    Cube(Input),
    Measure(Input),
    Embed(Input),
    Integrate(Input),
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Runs every invariant suite.
    All {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Run only the named suite.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Runs example problem files and compares them with their `expect` blocks.
    Examples { paths: Vec<PathBuf> },
}

impl Command {
    fn op(&self) -> Option<(Op, &Input)> {
        use Command as C;
        Some(match self {
            C::Vol(i) => (Op::Vol, i),
            C::Product(ProductCmd::Classify(i)) => (Op::ProductClassify, i),
            C::Product(ProductCmd::Plus(i)) => (Op::ProductPlus, i),
            C::Product(ProductCmd::Compare(i)) => (Op::ProductCompare, i),
            C::Set(SetCmd::Intersect(i)) => (Op::SetIntersect, i),
            C::Set(SetCmd::Complement(i)) => (Op::SetComplement, i),
            C::Set(SetCmd::Refine(i)) => (Op::SetRefine, i),
            C::Measure(MeasureCmd::Union(i)) => (Op::MeasureUnion, i),
            C::Measure(MeasureCmd::Split(i)) => (Op::MeasureSplit, i),
            C::Measure(MeasureCmd::CoverBound(i)) => (Op::MeasureCoverBound, i),
            C::Measure(MeasureCmd::BinaryFamily(i)) => (Op::MeasureBinaryFamily, i),
            C::Measure(MeasureCmd::Translate(i)) => (Op::MeasureTranslate, i),
            C::Measure(MeasureCmd::Packing(i)) => (Op::MeasurePacking, i),
            C::Lp(LpCmd::Integrate(i)) => (Op::LpIntegrate, i),
            C::Lp(LpCmd::Norm(i)) => (Op::LpNorm, i),
            C::Lp(LpCmd::Jessen(i)) => (Op::LpJessen, i),
            C::Lp(LpCmd::FrakS(i)) => (Op::LpFrakS, i),
            C::Lp(LpCmd::FrakT(i)) => (Op::LpFrakT, i),
            C::Lp(LpCmd::Roundtrip(i)) => (Op::LpRoundtrip, i),
            C::Rn(RnCmd::Support(i)) => (Op::RnSupport, i),
            C::Rn(RnCmd::Decompose(i)) => (Op::RnDecompose, i),
            C::Rn(RnCmd::FrakP(i)) => (Op::RnFrakP, i),
            C::Rn(RnCmd::Roundtrip(i)) => (Op::RnRoundtrip, i),
            C::Banach(BanachCmd::Cube(i)) => (Op::BanachCube, i),
            C::Banach(BanachCmd::Measure(i)) => (Op::BanachMeasure, i),
            C::Banach(BanachCmd::Embed(i)) => (Op::BanachEmbed, i),
            C::Banach(BanachCmd::Integrate(i)) => (Op::BanachIntegrate, i),
            C::Check(_) => return None,
        })
    }
}

fn read_input(path: Option<&Path>) -> CliResult<String> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> CliResult<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("standard input: {e}")))?;
    Ok(s)
}

/// Expands directories to their `.json` files in name order.
fn example_files(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn execute(cli: &Cli) -> CliResult<Value> {
    if let Some((op, input)) = cli.command.op() {
        let pb = Problem::parse(&read_input(input.file.as_deref())?)?;
        let opts = Options::resolve(cli.precision.clone(), cli.depth, cli.p.clone(), &pb)?;
        return prodmeasure::run(op, &pb, &opts);
    }
    match &cli.command {
        Command::Check(CheckCmd::All { seed, suite }) => {
            let suites = match suite {
                None => checks::run_all(*seed),
                Some(name) => vec![checks::run_named(name, *seed)
                    .ok_or_else(|| CliError::Parse(format!("unknown suite \"{name}\"")))?],
            };
            Ok(checks::report(*seed, &suites))
        }
        Command::Check(CheckCmd::Examples { paths }) => {
            let mut results = Vec::new();
            let mut all_pass = true;
            for f in example_files(paths)? {
                let outcome = read_input(Some(&f)).and_then(|text| run_example(&text));
                let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                all_pass &= outcome.is_ok();
                results.push(match outcome {
                    Ok(_) => json!({"file": name, "pass": true}),
                    Err(e) => json!({"file": name, "pass": false, "error": e.to_json()["error"]}),
                });
            }
            Ok(json!({"command": "check examples", "examples": results, "all_pass": all_pass}))
        }
        _ => unreachable!("file commands handled above"),
    }
}

fn emit(doc: &Value, output: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    text.push('\n');
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(4);
        }
    };
    let result = execute(&cli);
    let (doc, code) = match result {
        Ok(doc) => {
            let failed = doc.get("all_pass") == Some(&Value::Bool(false));
            (doc, if failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            (e.to_json(), e.exit_code())
        }
    };
    if let Err(e) = emit(&doc, cli.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}

