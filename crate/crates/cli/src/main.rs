//! `tropoisson`: tropicalize bracket files, assemble the group brackets and
//! run the verification suites from the command line.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 empty cone, 3 reality
//! failure, 4 verification failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use tropical_poisson::arith::{LaurentPoly, Rational, VarRegistry};
use tropical_poisson::format::{read_structure, write_structure, BracketDocument, ConeDocument};
use tropical_poisson::groups::{assemble, verify_gz, Family, GroupBracketSpec};
use tropical_poisson::networks::PlanarNetwork;
use tropical_poisson::poisson::PoissonStructure;
use tropical_poisson::tropical::{constant_bracket, limit_sample, tropical_cone, TropicalCoordinates};
use tropical_poisson::Error;

const LIMIT_TOLERANCE: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "tropoisson", version, about = "Exact tropicalization of Poisson brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cone and limit bracket of a bracket specification file.
    Tropicalize {
        input: PathBuf,
        /// Write the cone as JSON here.
        #[arg(long)]
        cone_out: Option<PathBuf>,
        /// Write the limit bracket as JSON here.
        #[arg(long)]
        bracket_out: Option<PathBuf>,
        /// Drop redundant inequalities from the cone.
        #[arg(long)]
        reduce: bool,
    },
    /// Assemble a group bracket in solid-minor coordinates.
    Group {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        family: Family,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the tropicalized dual group bracket is the GZ system.
    VerifyGz {
        #[arg(long)]
        n: usize,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the Jacobi identity on every generator triple.
    Jacobi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        family: Family,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare the rescaled bracket with its limit at growing t.
    LimitSample {
        /// Group size; the dual group bracket is sampled unless --input is given.
        #[arg(long, required_unless_present = "input")]
        n: Option<usize>,
        #[arg(long, default_value = "gstar")]
        family: Family,
        /// Bracket specification to sample instead of a group bracket.
        #[arg(long, conflicts_with = "n")]
        input: Option<PathBuf>,
        /// Comma-separated values of t.
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,20")]
        t: Vec<f64>,
        /// Comma-separated interior point; an LP sample with slack 1 by default.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eta: Option<Vec<String>>,
        /// CSV output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minor of a network matrix as a sum over path systems.
    Lindstrom {
        #[arg(long)]
        network: PathBuf,
        /// Comma-separated source labels, 1-based.
        #[arg(long, value_delimiter = ',')]
        rows: Vec<usize>,
        /// Comma-separated sink labels, 1-based.
        #[arg(long, value_delimiter = ',')]
        cols: Vec<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EmptyCone => 2,
            Error::Reality(_) => 3,
            _ => 1,
        };
        let message = match e {
            Error::EmptyCone => "empty cone".to_string(),
            other => other.to_string(),
        };
        Self { code, message }
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn check_group_size(n: usize, family: Family) -> CliResult {
    let max = if family == Family::GStar { 4 } else { 6 };
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Failure::usage(format!("--n must be between 1 and {max} for {family}, got {n}")))
    }
}

fn tropicalize(input: &Path, cone_out: Option<&Path>, bracket_out: Option<&Path>, reduce: bool) -> CliResult {
    let p = read_structure(&read(input)?)?;
    let coords = TropicalCoordinates::new(p.registry());
    let mut cone = tropical_cone(&p);
    if cone.is_empty_cone() {
        return Err(Error::EmptyCone.into());
    }
    let cb = constant_bracket(&p)?;
    if reduce {
        cone = cone.remove_redundant()?;
    }
    let cone_doc = ConeDocument::new(&cone, coords.cone_names());
    let bracket_doc = BracketDocument::new(&cb);
    println!("cone over ({}):", cone_doc.coordinates.join(", "));
    if cone_doc.inequalities.is_empty() {
        println!("  whole space");
    }
    for line in &cone_doc.inequalities {
        println!("  {line}");
    }
    println!("limit bracket:");
    let names = &bracket_doc.coordinates;
    let mut any = false;
    for (i, row) in bracket_doc.matrix.iter().enumerate() {
        for (j, x) in row.iter().enumerate().skip(i + 1) {
            if x != "0" {
                println!("  {{{}, {}}} = {x}", names[i], names[j]);
                any = true;
            }
        }
    }
    if !any {
        println!("  zero");
    }
    println!("casimirs: {}", bracket_doc.casimirs.join(", "));
    if let Some(path) = cone_out {
        write_or_print(Some(path), &cone_doc.to_json())?;
    }
    if let Some(path) = bracket_out {
        write_or_print(Some(path), &bracket_doc.to_json())?;
    }
    Ok(())
}

fn group(n: usize, family: Family, out: Option<&Path>) -> CliResult {
    check_group_size(n, family)?;
    let p = assemble(&GroupBracketSpec::new(n, family))?;
    write_or_print(out, &write_structure(&p))
}

fn verify(n: usize, report: Option<&Path>) -> CliResult {
    if !(1..=4).contains(&n) {
        return Err(Failure::usage(format!("--n must be between 1 and 4, got {n}")));
    }
    let r = verify_gz(n)?;
    for c in &r.checks {
        match &c.witness {
            None => println!("PASS {}", c.name),
            Some(w) => println!("FAIL {}: {w}", c.name),
        }
    }
    let passed = r.checks.iter().filter(|c| c.passed).count();
    println!("{} n={n}: {passed}/{} checks", if r.passed() { "PASS" } else { "FAIL" }, r.checks.len());
    if let Some(path) = report {
        write_or_print(Some(path), &json(&r))?;
    }
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::verification(format!("{} of {} checks failed", r.checks.len() - passed, r.checks.len())))
    }
}

#[derive(Serialize)]
struct JacobiReport {
    n: usize,
    family: Family,
    triples: usize,
    failures: Vec<[String; 3]>,
}

fn jacobi(n: usize, family: Family, report: Option<&Path>) -> CliResult {
    check_group_size(n, family)?;
    let p = assemble(&GroupBracketSpec::new(n, family))?;
    let m = p.registry().len();
    let triples = m * m.saturating_sub(1) * m.saturating_sub(2) / 6;
    let reg = p.registry();
    let failures: Vec<[String; 3]> = p
        .jacobi_failures()
        .into_iter()
        .map(|(u, v, w)| [reg.name(u).to_string(), reg.name(v).to_string(), reg.name(w).to_string()])
        .collect();
    for f in &failures {
        println!("FAIL ({}, {}, {})", f[0], f[1], f[2]);
    }
    let ok = failures.is_empty();
    println!("{} {family} n={n}: {}/{triples} triples vanish", if ok { "PASS" } else { "FAIL" }, triples - failures.len());
    if let Some(path) = report {
        write_or_print(Some(path), &json(&JacobiReport { n, family, triples, failures }))?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::verification("Jacobi identity fails"))
    }
}

fn parse_eta(values: &[String]) -> Result<Vec<Rational>, Failure> {
    values.iter().map(|s| tropical_poisson::arith::parse_rational(s.trim()).map_err(Failure::from)).collect()
}

fn limit(
    structure: PoissonStructure,
    ts: &[f64],
    eta: Option<&[String]>,
    out: Option<&Path>,
) -> CliResult {
    let coords = TropicalCoordinates::new(structure.registry());
    let cone = tropical_cone(&structure);
    let eta = match eta {
        Some(v) => parse_eta(v)?,
        None => cone.interior_sample()?,
    };
    let complex = coords.len() - coords.cone_dim();
    // fixed angles keep the output reproducible
    let phis: Vec<f64> = (0..complex).map(|j| 0.3 + 0.4 * j as f64).collect();
    let table = limit_sample(&structure, &eta, &phis, ts)?;
    write_or_print(out, &table.to_csv())?;
    let maxes = table.max_by_t();
    let monotone = maxes.windows(2).all(|w| w[1].1 <= w[0].1);
    let last = maxes.last().map_or(0.0, |m| m.1);
    let mut log = std::io::stderr();
    for (t, d) in &maxes {
        let _ = writeln!(log, "t = {t}: max deviation {d:.3e}");
    }
    if !monotone {
        let _ = writeln!(log, "FAIL deviation is not decreasing");
        return Err(Failure::verification("deviation is not decreasing"));
    }
    if ts.iter().any(|&t| t >= 20.0) && last >= LIMIT_TOLERANCE {
        let _ = writeln!(log, "FAIL deviation {last:.3e} at the largest t");
        return Err(Failure::verification("deviation above tolerance"));
    }
    let _ = writeln!(log, "PASS");
    Ok(())
}

#[derive(Serialize)]
struct LindstromReport {
    rows: Vec<usize>,
    cols: Vec<usize>,
    path_systems: usize,
    minor: String,
    determinant: String,
    agrees: bool,
}

fn lindstrom(network: &Path, rows: &[usize], cols: &[usize], report: Option<&Path>) -> CliResult {
    let net: PlanarNetwork = serde_json::from_str(&read(network)?)
        .map_err(|e| Failure::usage(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    net.validate()?;
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Failure::usage("--rows and --cols must be nonempty and of equal size"));
    }
    if rows.iter().chain(cols).any(|&x| x == 0 || x > net.n) {
        return Err(Failure::usage(format!("labels must lie in 1..={}", net.n)));
    }
    let (reg, w): (Arc<VarRegistry>, Vec<LaurentPoly>) = net.symbolic_weighting();
    let minor = net.minor_lindstrom(&w, rows, cols)?;
    let m = net.matrix(&w)?;
    let sub: Vec<Vec<LaurentPoly>> = rows.iter().map(|&r| cols.iter().map(|&c| m[r - 1][c - 1].clone()).collect()).collect();
    let det = LaurentPoly::determinant(&reg, &sub);
    let agrees = det == minor;
    println!("{minor}");
    println!("{} path-system sum {} the determinant", if agrees { "PASS" } else { "FAIL" }, if agrees { "equals" } else { "differs from" });
    if let Some(path) = report {
        let r = LindstromReport {
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            path_systems: net.multipaths(rows, cols)?.len(),
            minor: minor.to_string(),
            determinant: det.to_string(),
            agrees,
        };
        write_or_print(Some(path), &json(&r))?;
    }
    if agrees {
        Ok(())
    } else {
        Err(Failure::verification("Lindstrom sum differs from the determinant"))
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Tropicalize { input, cone_out, bracket_out, reduce } => {
            tropicalize(&input, cone_out.as_deref(), bracket_out.as_deref(), reduce)
        }
        Command::Group { n, family, out } => group(n, family, out.as_deref()),
        Command::VerifyGz { n, report } => verify(n, report.as_deref()),
        Command::Jacobi { n, family, report } => jacobi(n, family, report.as_deref()),
        Command::LimitSample { n, family, input, t, eta, out } => {
            if t.is_empty() || t.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                return Err(Failure::usage("--t needs positive values"));
            }
            let structure = match (input, n) {
                (Some(path), _) => read_structure(&read(&path)?)?,
                (None, Some(n)) => {
                    check_group_size(n, family)?;
                    assemble(&GroupBracketSpec::new(n, family))?
                }
                (None, None) => return Err(Failure::usage("give --n or --input")),
            };
            limit(structure, &t, eta.as_deref(), out.as_deref())
        }
        Command::Lindstrom { network, rows, cols, report } => lindstrom(&network, &rows, &cols, report.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
