//! Command-line front end: validation, single surgery computations,
//! slope sweeps, model dumps, dataset generation, and machine-readable
//! JSON reports.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails
//! (validation failure, splice differential not squaring to zero),
//! 2 on usage, parse, or shape errors.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hfsurgery::knotsys::{self, KnotSysError, KnotSystem};
use hfsurgery::lensmodel::{self, LensModelError};
use hfsurgery::surgery::{self, SurgeryError, SurgerySlope};

#[derive(Parser)]
#[command(
    name = "hfsurgery",
    version,
    about = "Exact GF(2) surgery-formula calculator for Heegaard Floer homology"
)]
struct Cli {
    /// Print extra detail (reduction traces, failed-check witnesses).
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every hypothesis on a knot system; exit 1 on failure.
    Validate {
        /// Input file, or @name for a builtin (@unknot-A, @unknot-B).
        input: String,
        /// Also write the verdicts as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compute the homology of p/q-surgery from a knot system.
    Surgery {
        input: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum, default_value_t = Method::Rational)]
        method: Method,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Rational surgery over all coprime slopes in a range.
    Sweep {
        input: String,
        #[arg(long)]
        pmax: usize,
        #[arg(long)]
        qmax: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Inspect the n-framed solid-torus model complexes.
    Model {
        #[arg(long)]
        n: usize,
        /// Dump generators and matrices in the file matrix convention.
        #[arg(long)]
        dump: bool,
    },
    /// Generate a random valid knot system and write it to a file.
    Random {
        #[arg(long)]
        seed: u64,
        /// Dimensions of H_inf, H_1, H_0 as "A,B,C".
        #[arg(long)]
        dims: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rational route vs. chain-level splice route for n = 1..nmax.
    Compare {
        input: String,
        #[arg(long)]
        nmax: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Rational,
    Zigzag,
    Splice,
}

/// Error classified by exit code.
enum CliError {
    /// Exit 2: bad arguments, unreadable or malformed input.
    Usage(String),
    /// Exit 1: a mathematical check failed.
    Math(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Math(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Math(_) => ExitCode::from(1),
        }
    }
}

impl From<KnotSysError> for CliError {
    fn from(e: KnotSysError) -> Self {
        match e {
            KnotSysError::ValidationFailed(_) | KnotSysError::BorderedInvariant { .. } => {
                CliError::Math(e.to_string())
            }
            KnotSysError::Io { .. }
            | KnotSysError::Parse { .. }
            | KnotSysError::Shape { .. }
            | KnotSysError::UnknownBuiltin(_)
            | KnotSysError::InfeasibleDims { .. }
            | KnotSysError::Chain(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SurgeryError> for CliError {
    fn from(e: SurgeryError) -> Self {
        match e {
            SurgeryError::InvalidSlope { .. } | SurgeryError::ChainLevelInput { .. } => {
                CliError::Usage(e.to_string())
            }
            SurgeryError::ValidationFailed { .. }
            | SurgeryError::SpliceNotAComplex { .. }
            | SurgeryError::Chain(_) => CliError::Math(e.to_string()),
            SurgeryError::KnotSys(inner) => inner.into(),
            SurgeryError::LensModel(inner) => inner.into(),
        }
    }
}

impl From<LensModelError> for CliError {
    fn from(e: LensModelError) -> Self {
        match e {
            LensModelError::InvalidIndex(_) => CliError::Usage(e.to_string()),
            LensModelError::Invariant(inner) => inner.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_json(path: &PathBuf, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(value).expect("report serialization cannot fail") + "\n";
    std::fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load(input: &str) -> Result<KnotSystem, CliError> {
    Ok(knotsys::resolve(input)?)
}

fn print_report(r: &surgery::HomologyReport, verbose: bool) {
    println!("input:    {}", r.input);
    println!("method:   {} (p = {}, q = {})", r.method, r.p, r.q);
    let dims = |m: &std::collections::BTreeMap<String, usize>| {
        m.iter()
            .map(|(g, d)| format!("{g}:{d}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    println!("space:    {}", dims(&r.space_dims));
    println!("homology: {}", dims(&r.homology_dims));
    println!("total:    {}", r.total);
    if verbose {
        println!("ranks:    {:?}", r.ranks);
        for note in &r.notes {
            println!("note:     {note}");
        }
        println!("elapsed:  {:?}", r.elapsed);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { input, json } => {
            let ks = load(&input)?;
            let report = ks.validate();
            println!("{report}");
            if let Some(path) = &json {
                let value = serde_json::json!({
                    "input": report.input,
                    "pass": report.pass(),
                    "checks": report.checks,
                });
                write_json(path, &value)?;
            }
            if report.pass() {
                Ok(())
            } else {
                let names: Vec<String> = report.failed().map(|c| c.name.clone()).collect();
                Err(CliError::Math(format!(
                    "failed checks: {}",
                    names.join("; ")
                )))
            }
        }

        Command::Surgery {
            input,
            p,
            q,
            method,
            json,
        } => {
            let ks = load(&input)?;
            if method != Method::Rational && q != 1 {
                return Err(CliError::Usage(format!(
                    "method {} computes integer surgeries only; pass --q 1",
                    match method {
                        Method::Zigzag => "zigzag",
                        Method::Splice => "splice",
                        Method::Rational => unreachable!(),
                    }
                )));
            }
            let report = match method {
                Method::Rational => surgery::rational_report(&ks, SurgerySlope::new(p, q)?)?,
                Method::Zigzag => surgery::zigzag_report(&ks, p)?,
                Method::Splice => surgery::splice_report(&ks, p)?,
            };
            print_report(&report, cli.verbose);
            if let Some(path) = &json {
                write_json(path, &report)?;
            }
            Ok(())
        }

        Command::Sweep {
            input,
            pmax,
            qmax,
            json,
        } => {
            let ks = load(&input)?;
            if pmax < 1 || qmax < 1 {
                return Err(CliError::Usage("--pmax and --qmax must be >= 1".into()));
            }
            let mut reports = Vec::new();
            println!(
                "{:>4} {:>4} {:>14} {:>18} {:>6}",
                "p", "q", "space(2,1,0)", "homology(2,1,0)", "total"
            );
            for p in 1..=pmax {
                for q in 1..=qmax {
                    if SurgerySlope::new(p, q).is_err() {
                        continue;
                    }
                    let r = surgery::rational_report(&ks, SurgerySlope::new(p, q)?)?;
                    let tier = |m: &std::collections::BTreeMap<String, usize>| {
                        format!(
                            "({},{},{})",
                            m.get("2").unwrap_or(&0),
                            m.get("1").unwrap_or(&0),
                            m.get("0").unwrap_or(&0)
                        )
                    };
                    println!(
                        "{:>4} {:>4} {:>14} {:>18} {:>6}",
                        p,
                        q,
                        tier(&r.space_dims),
                        tier(&r.homology_dims),
                        r.total
                    );
                    reports.push(r);
                }
            }
            if let Some(path) = &json {
                write_json(path, &reports)?;
            }
            Ok(())
        }

        Command::Model { n, dump } => {
            let model = lensmodel::build_model(n)?;
            let (hl, hm) = lensmodel::model_homology(n)?;
            println!("model n = {n}");
            println!("L({n}): {} generators, homology {hl}", model.l().dim());
            println!("M({n}): {} generators, homology {hm}", model.m().dim());
            if dump {
                println!("L generators: {}", model.l().labels().join(" "));
                println!("M generators: {}", model.m().labels().join(" "));
                let sys = model.system();
                for (name, m) in [
                    ("l_n", model.l().differential()),
                    ("m_n", model.m().differential()),
                    ("Psi1", sys.psi1()),
                    ("Psi2", sys.psi2()),
                    ("Psi3", sys.psi3()),
                    ("Phi", sys.phi()),
                ] {
                    println!("{name} =");
                    let rows = m.to_rows();
                    if rows.is_empty() {
                        println!("  (empty)");
                    }
                    for row in rows {
                        println!("  {row:?}");
                    }
                }
            }
            Ok(())
        }

        Command::Random { seed, dims, out } => {
            let parts: Vec<&str> = dims.split(',').collect();
            let parse = |s: &str| {
                s.trim().parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("bad dimension `{s}` in --dims (expected A,B,C)"))
                })
            };
            let [a, b, c] = parts.as_slice() else {
                return Err(CliError::Usage(
                    "--dims expects three comma-separated numbers A,B,C".into(),
                ));
            };
            let dims = (parse(a)?, parse(b)?, parse(c)?);
            let ks = knotsys::random_valid(seed, dims)?;
            ks.save(&out)?;
            println!("wrote {} (seed {seed}, dims {:?})", out.display(), dims);
            Ok(())
        }

        Command::Compare { input, nmax, json } => {
            let ks = load(&input)?;
            if nmax < 1 {
                return Err(CliError::Usage("--nmax must be >= 1".into()));
            }
            let mut rows = Vec::new();
            println!(
                "{:>4} {:>10} {:>8} {:>6} {:>6}",
                "n", "rational", "splice", "diff", "agree"
            );
            for n in 1..=nmax {
                let cmp = surgery::compare_methods(&ks, n)?;
                println!(
                    "{:>4} {:>10} {:>8} {:>6} {:>6}",
                    n, cmp.rational_total, cmp.splice_total, cmp.difference, cmp.agree
                );
                if cli.verbose {
                    for (x, y) in &cmp.splice_trace {
                        println!("      cancel ({x}, {y})");
                    }
                }
                rows.push(cmp);
            }
            if let Some(path) = &json {
                write_json(path, &rows)?;
            }
            Ok(())
        }
    }
}
