use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tangentcat::json::{parse_bundle, parse_connection, to_json};
use tangentcat::polycore::{format_rational, parse_rational};
use tangentcat::{
    canonical_connection, check_connection, check_effective, check_tangent_axioms,
    christoffel_connection, decompose_point, derive_horizontal_from, equivalence_suite,
    total_bundle, verify_bundle, ChristoffelTable, Connection, DiffBundle, Overall, PolyMap,
    Polynomial, Report, Space,
};

const EXIT_PARSE: u8 = 1;
const EXIT_FAIL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tangentcat",
    version,
    about = "Exact verification of tangent-category structure on polynomial maps"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Reject inputs containing a polynomial of higher total degree.
    #[arg(
        long,
        env = "TANGENTCAT_MAX_DEGREE",
        default_value_t = 8,
        global = true
    )]
    max_degree: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Bundle,
    Connection,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Canonical,
    Christoffel,
    TangentAxioms,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a differential bundle or a connection.
    Verify {
        path: PathBuf,
        /// Input kind; by default a file with a "K" field is a connection.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Derive the horizontal connection of an effective K; writes <stem>.H.json.
    DeriveH { path: PathBuf },
    /// Build the total bundle of a connection's decomposition; writes <stem>.total.json.
    TotalBundle { path: PathBuf },
    /// Split a point of TE into its three components.
    Decompose {
        path: PathBuf,
        /// Comma-separated exact rationals, e.g. "1,2,-1/3,4".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Run a built-in example end to end.
    Demo {
        #[arg(value_enum)]
        name: Demo,
        /// Also write the demo's connection as JSON to this path.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

/// Failure before any check ran: unreadable, malformed or rejected input.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, InputError> {
    match &cli.command {
        Command::Verify { path, kind } => {
            let text = read(path)?;
            let kind = kind.unwrap_or_else(|| sniff_kind(&text));
            let report = match kind {
                Kind::Bundle => {
                    let b = parse_bundle(&text)?;
                    guard_bundle(&b, cli.max_degree)?;
                    verify_bundle(&b)
                }
                Kind::Connection => {
                    let c = load_connection_text(&text, cli.max_degree)?;
                    check_connection(&c).0
                }
            };
            Ok(emit_report(cli.format, &report))
        }
        Command::DeriveH { path } => {
            let c = load_connection(path, cli.max_degree)?;
            let (report, d) = check_effective(&c);
            if let Some(d) = d {
                let derived = derive_horizontal_from(&c, &d)?;
                let h = derived.h().expect("derived connection carries H");
                write_atomic(&sibling(path, "H")?, &to_json(h))?;
            }
            Ok(emit_report(cli.format, &report))
        }
        Command::TotalBundle { path } => {
            let c = load_connection(path, cli.max_degree)?;
            let (mut report, d) = check_effective(&c);
            if let Some(d) = d {
                let total = total_bundle(&d);
                report.absorb("total bundle", verify_bundle(&total));
                write_atomic(&sibling(path, "total")?, &to_json(&total))?;
            }
            Ok(emit_report(cli.format, &report))
        }
        Command::Decompose { path, point } => {
            let c = load_connection(path, cli.max_degree)?;
            let xi = point
                .split(',')
                .map(|s| parse_rational(s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let (report, d) = check_effective(&c);
            let Some(d) = d else {
                return Ok(emit_report(cli.format, &report));
            };
            let parts = decompose_point(&d, &xi)?;
            let parts: Vec<Vec<String>> = parts
                .iter()
                .map(|v| v.iter().map(format_rational).collect())
                .collect();
            match cli.format {
                Format::Text => {
                    let tuples: Vec<String> = parts
                        .iter()
                        .map(|p| format!("({})", p.join(", ")))
                        .collect();
                    println!("({})", tuples.join(", "));
                }
                Format::Json => {
                    let v = serde_json::json!({
                        "point": xi.iter().map(format_rational).collect::<Vec<_>>(),
                        "parts": parts,
                    });
                    println!("{}", serde_json::to_string_pretty(&v)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo { name, emit } => {
            let report = match name {
                Demo::TangentAxioms => {
                    let mut r = Report::new("demo: tangent axioms on R^1, R^2, R^3");
                    for n in 1..=3 {
                        r.absorb(
                            &format!("R^{n}"),
                            check_tangent_axioms(&Space::euclidean(n)),
                        );
                    }
                    r
                }
                Demo::Canonical => demo_connection(
                    "demo: canonical connection on R^1",
                    &canonical_connection(1),
                    emit.as_deref(),
                )?,
                Demo::Christoffel => demo_connection(
                    "demo: Christoffel connection on R^1 with Gamma = x",
                    &christoffel_demo(),
                    emit.as_deref(),
                )?,
            };
            Ok(emit_report(cli.format, &report))
        }
    }
}

/// `K(x, t, u, v) = (x, v + x t u)`.
fn christoffel_demo() -> Connection {
    let x = Polynomial::var(1, 0);
    let table = ChristoffelTable::new(1, vec![vec![x]]).expect("1x1 table");
    christoffel_connection(&Space::euclidean(1), table).expect("Christoffel shapes")
}

fn demo_connection(
    subject: &str,
    c: &Connection,
    emit: Option<&Path>,
) -> Result<Report, InputError> {
    if let Some(path) = emit {
        write_atomic(path, &to_json(c))?;
    }
    let mut r = Report::new(subject);
    let (chain, d) = check_connection(c);
    r.absorb("", chain);
    r.absorb("equivalence", equivalence_suite(c));
    if let Some(d) = d {
        r.absorb("total bundle", verify_bundle(&total_bundle(&d)));
    }
    Ok(r)
}

fn emit_report(format: Format, report: &Report) -> ExitCode {
    match format {
        Format::Text => println!("{report}"),
        Format::Json => println!("{}", report.to_json()),
    }
    match report.overall() {
        Overall::Pass => ExitCode::SUCCESS,
        Overall::Fail => ExitCode::from(EXIT_FAIL),
        Overall::Inconclusive => ExitCode::from(EXIT_INCONCLUSIVE),
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn sniff_kind(text: &str) -> Kind {
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(v) if v.get("K").is_some() => Kind::Connection,
        _ => Kind::Bundle,
    }
}

fn load_connection(path: &Path, max_degree: u32) -> Result<Connection, InputError> {
    load_connection_text(&read(path)?, max_degree)
}

fn load_connection_text(text: &str, max_degree: u32) -> Result<Connection, InputError> {
    let c = parse_connection(text)?;
    guard_bundle(c.bundle(), max_degree)?;
    guard(c.k(), "K", max_degree)?;
    if let Some(h) = c.h() {
        guard(h, "H", max_degree)?;
    }
    if c.bundle().base_dim() == 0 {
        return Err(InputError("base space has dimension 0".into()));
    }
    Ok(c)
}

fn guard_bundle(b: &DiffBundle, max_degree: u32) -> Result<(), InputError> {
    guard(b.sigma(), "sigma", max_degree)?;
    guard(b.zeta(), "zeta", max_degree)?;
    guard(b.lambda(), "lambda", max_degree)
}

fn guard(f: &PolyMap, name: &str, max_degree: u32) -> Result<(), InputError> {
    let d = f.max_degree();
    if d > max_degree {
        return Err(InputError(format!(
            "{name} has degree {d}, above the limit {max_degree} (raise with --max-degree)"
        )));
    }
    Ok(())
}

/// `dir/stem.json` becomes `dir/stem.<tag>.json`.
fn sibling(path: &Path, tag: &str) -> Result<PathBuf, InputError> {
    let stem = path
        .file_stem()
        .ok_or_else(|| InputError(format!("{}: no file name", path.display())))?;
    Ok(path.with_file_name(format!("{}.{tag}.json", stem.to_string_lossy())))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), InputError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(contents.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}
