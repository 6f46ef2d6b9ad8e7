use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tangle_roof::charcurve::{characteristic_curve, convex_hull_curve, DEFAULT_GRID_N, DEFAULT_PHASE_GRID};
use tangle_roof::io::{self as tio, curve_rows};
use tangle_roof::roof::{certify, upper_bound_search, wootters_concurrence, Decomposition};
use tangle_roof::zeropoly::{intersect_family, zero_polytope, PolytopeOutcome};
use tangle_roof::{
    average_tangle, eigendecompose, named, reproduce, DensityMatrix, Error, PureState, RankTwoPencil,
    TangleDescriptor,
};

/// Polynomial tangles, zero-polytopes and convex-roof bounds for rank-2
/// mixed qubit states.
#[derive(Parser)]
#[command(name = "tangle-roof", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tangle of a pure state.
    Tangle {
        /// State file or built-in name (ghz, w, bell, psi-i, psi-ii).
        #[arg(long)]
        state: String,
        #[command(flatten)]
        common: Common,
    },
    /// Characteristic curve and its convex envelope.
    Curve {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Extra columns τ(q, φ) for these phases (comma separated).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phases: Vec<f64>,
    },
    /// Zero-polytope corners and where the mixture family meets it.
    Zeropoly {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Lower and upper bounds on the roof with a certificate.
    Roof {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Recomputes the reference table; exits 3 if any row fails.
    Reproduce {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Source {
    /// First pencil state: file or built-in name.
    #[arg(long, requires = "psi1", conflicts_with = "density")]
    psi0: Option<String>,
    /// Second pencil state: file or built-in name.
    #[arg(long, requires = "psi0")]
    psi1: Option<String>,
    /// Mixing weight of psi0.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Rank-2 density matrix file.
    #[arg(long, conflicts_with_all = ["psi0", "p"])]
    density: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Tangle name (concurrence, three_tangle); defaults by register size.
    #[arg(long)]
    tangle: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    grid_n: usize,
    #[arg(long, default_value_t = DEFAULT_PHASE_GRID)]
    phase_grid: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Invalid(Error),
    Acceptance(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.into())
    }
}

fn load_state(name: &str) -> Result<PureState, Error> {
    match named::by_name(name) {
        Ok(s) => Ok(s),
        Err(_) if std::path::Path::new(name).exists() => tio::read_state(name),
        Err(_) => Err(Error::Validation(format!(
            "{name:?} is neither a file nor one of {}",
            named::NAMES.join(", ")
        ))),
    }
}

fn descriptor(common: &Common, n_qubits: usize) -> Result<TangleDescriptor, Error> {
    match &common.tangle {
        Some(name) => TangleDescriptor::by_name(name),
        None => TangleDescriptor::for_qubits(n_qubits),
    }
}

/// The pencil, the mixing weight of its first state, and the density matrix.
fn load_source(source: &Source) -> Result<(RankTwoPencil, f64, DensityMatrix), Error> {
    if let Some(path) = &source.density {
        let rho = tio::read_density(path)?;
        let pencil = RankTwoPencil::from_density(&rho)?;
        let p = pencil.weight();
        return Ok((pencil, p, rho));
    }
    match (&source.psi0, &source.psi1) {
        (Some(a), Some(b)) => {
            let pencil = RankTwoPencil::new(load_state(a)?, load_state(b)?, source.p)?;
            let rho = pencil.density(source.p)?;
            Ok((pencil, source.p, rho))
        }
        _ => Err(Error::Validation("give --psi0 and --psi1, or --density".into())),
    }
}

fn output(common: &Common) -> io::Result<Box<dyn Write>> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(common: &Common, value: &Value) -> Result<(), Failure> {
    let mut out = output(common)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Numerical(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn json_only(common: &Common) -> Result<(), Failure> {
    if common.format == Some(Format::Csv) {
        return Err(Error::Validation("this report is only available as json".into()).into());
    }
    Ok(())
}

fn cmd_tangle(state: &str, common: &Common) -> Result<(), Failure> {
    let psi = load_state(state)?;
    let desc = descriptor(common, psi.n_qubits())?;
    let tau = desc.tangle(&psi)?;
    let pre = desc.pre_modulus(&psi)?;
    let mut out = output(common)?;
    match common.format {
        Some(Format::Json) => writeln!(
            out,
            "{}",
            json!({"tangle": desc.name(), "value": tau, "pre_modulus": [pre.re, pre.im]})
        )?,
        Some(Format::Csv) => {
            writeln!(out, "tangle,value,pre_re,pre_im")?;
            writeln!(out, "{},{tau:.16e},{:.16e},{:.16e}", desc.name(), pre.re, pre.im)?;
        }
        None => {
            writeln!(out, "{} {tau:.16e}", desc.name())?;
            writeln!(out, "pre_modulus {:.16e} {:+.16e}i", pre.re, pre.im)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_curve(source: &Source, common: &Common, phases: &[f64]) -> Result<(), Failure> {
    let (pencil, _, _) = load_source(source)?;
    let desc = descriptor(common, pencil.n_qubits())?;
    let curve = characteristic_curve(&pencil, &desc, common.grid_n, common.phase_grid)?;
    let hull = convex_hull_curve(&curve);
    let rows = curve_rows(&curve, &hull, phases);
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = output(common)?;
            tio::write_curve_csv(&rows, phases, &mut out)?;
            out.flush()?;
            Ok(())
        }
        Format::Json => write_json(common, &tio::curve_json(&rows, phases)),
    }
}

fn cmd_zeropoly(source: &Source, common: &Common) -> Result<(), Failure> {
    json_only(common)?;
    let (pencil, p, _) = load_source(source)?;
    let desc = descriptor(common, pencil.n_qubits())?;
    let report = match zero_polytope(&pencil, &desc)? {
        PolytopeOutcome::WholePencilZero => json!({"whole_pencil_zero": true}),
        PolytopeOutcome::Polytope(poly) => {
            let interval = intersect_family(&poly);
            let mut report = tio::zeropoly_json(&poly, &interval);
            report["p"] = json!(p);
            report["contains_p"] = json!(interval.contains(p, 1e-12));
            report
        }
    };
    write_json(common, &report)
}

fn cmd_roof(source: &Source, common: &Common) -> Result<(), Failure> {
    json_only(common)?;
    let (pencil, p, rho) = load_source(source)?;
    let desc = descriptor(common, pencil.n_qubits())?;
    let curve = characteristic_curve(&pencil, &desc, common.grid_n, common.phase_grid)?;
    let lower = convex_hull_curve(&curve).evaluate(p);

    let eig = eigendecompose(&rho, tangle_roof::states::DEFAULT_RANK_TOLERANCE);
    let m = desc.degree().max(eig.rank);
    let search = upper_bound_search(&eig, &desc, m, common.restarts, common.seed)?;
    let mut best: (Decomposition, &str) = (search.decomposition, "search");
    if let PolytopeOutcome::Polytope(poly) = zero_polytope(&pencil, &desc)? {
        if let Some(dec) = poly.decompose(p) {
            if average_tangle(&dec, &desc)? < search.value {
                best = (dec, "zero_polytope");
            }
        }
    }
    let cert = certify(p, lower, best.0, &rho, &desc)?;
    let mut report = tio::certificate_json(&cert);
    report["source"] = json!(best.1);
    report["tangle"] = json!(desc.name());
    report["search"] = json!({"value": search.value, "restart": search.restart, "length": m});
    if rho.n_qubits() == 2 {
        report["wootters"] = json!(wootters_concurrence(&rho)?);
    }
    write_json(common, &report)
}

fn cmd_reproduce(common: &Common) -> Result<(), Failure> {
    let config = reproduce::ReproduceConfig {
        grid_n: common.grid_n,
        phase_grid: common.phase_grid,
        restarts: common.restarts,
        seed: common.seed,
        ..Default::default()
    };
    let rows = reproduce::run(&config)?;
    let mut out = output(common)?;
    writeln!(out, "{}", reproduce::header())?;
    for row in &rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    let failed: Vec<String> = rows.iter().filter(|r| !r.pass()).map(|r| r.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Acceptance(failed))
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(value) = std::env::var("TANGLE_ROOF_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| Error::Validation(format!("TANGLE_ROOF_THREADS={value:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().map_err(Failure::from).and_then(|_| match &cli.command {
        Command::Tangle { state, common } => cmd_tangle(state, common),
        Command::Curve {
            source,
            common,
            phases,
        } => cmd_curve(source, common, phases),
        Command::Zeropoly { source, common } => cmd_zeropoly(source, common),
        Command::Roof { source, common } => cmd_roof(source, common),
        Command::Reproduce { common } => cmd_reproduce(common),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance(rows)) => {
            eprintln!("failed rows: {}", rows.join(", "));
            ExitCode::from(3)
        }
    }
}
