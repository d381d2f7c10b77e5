//! Command-line front end for verbose-ph.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;
use verbose_ph::barcode::{family_from_json, family_to_json, family_to_table, vr_barcode, vr_barcodes, BarcodeError, BarcodeOptions};
use verbose_ph::complex::ComplexError;
use verbose_ph::field::PrimeField;
use verbose_ph::gh::{gromov_hausdorff_exact, SearchError, DEFAULT_NODE_BUDGET};
use verbose_ph::matching::{bottleneck_distance, interleaving_distance, matching_distance};
use verbose_ph::metric::{read_metric, InputError, MetricError};
use verbose_ph::pullback::{
    hatdb0_spaces, hatdb_upper_bound, pullback_barcode_closed_form, pullback_barcode_direct, stability_chain_check,
    PullbackError, PullbackSpec, SearchOptions,
};
use verbose_ph::reduce::ReduceOptions;
use verbose_ph::verify::{verify_paper, DataSet};
use verbose_ph::{Barcode, Exact, FiniteMetricSpace, Float, Real};

#[derive(Parser)]
#[command(name = "verbose-ph", version, about = "Verbose and concise Vietoris-Rips barcodes and their distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Use floating point instead of exact rational arithmetic.
    #[arg(long)]
    float: bool,
    /// Characteristic of the coefficient field.
    #[arg(long, default_value_t = 2)]
    field: u32,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    /// Matching distance of verbose barcodes in one degree.
    Dm,
    /// Bottleneck distance in one degree.
    Db,
    /// Interleaving distance over all degrees.
    Di,
    /// Degree-0 pullback bottleneck distance (closed formula).
    Hatdb0,
    /// Pullback bottleneck distance in one degree (tripod search).
    Hatdb,
    /// Gromov-Hausdorff distance, by exhaustive search.
    Gh,
}

#[derive(Subcommand)]
enum Command {
    /// Barcodes of the Vietoris-Rips complex of a distance matrix file.
    Barcode {
        file: PathBuf,
        /// Highest degree (default: number of points minus one).
        #[arg(long)]
        max_dim: Option<usize>,
        /// Drop diagonal points.
        #[arg(long)]
        concise: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Distance between two inputs (distance matrix files or barcode JSON files).
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        /// Compare concise barcodes (for dm, db and di).
        #[arg(long)]
        concise: bool,
        /// Search tripods up to |Z| = max(n, n') + max_extra.
        #[arg(long, default_value_t = 1)]
        max_extra: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Barcodes of X with extra copies of some points, by closed form and optionally by reduction.
    PullbackBarcode {
        file: PathBuf,
        /// Zero-based index of a point to repeat; give once per extra copy.
        #[arg(long = "repeat")]
        repeats: Vec<usize>,
        #[arg(long)]
        degree: Option<usize>,
        /// Also reduce the pullback complex directly and compare.
        #[arg(long)]
        direct: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Checks d_B <= pullback d_B <= 2 d_GH for two spaces in one degree.
    Stability {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        max_extra: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduces the reference examples and prints a checklist.
    VerifyPaper {
        /// Read the example inputs from this directory instead of the bundled copies.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {axiom}: {source}")]
    Metric { path: String, axiom: &'static str, source: InputError },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Metric { .. } | CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        match e {
            ComplexError::SizeCapExceeded { .. } => CliError::Cap(e.to_string()),
            ComplexError::MaxDimOutOfRange { .. } => CliError::Input(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::Cap(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Input(format!("{}: {e}", e.axiom()))
    }
}

impl From<BarcodeError> for CliError {
    fn from(e: BarcodeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PullbackError> for CliError {
    fn from(e: PullbackError) -> Self {
        match e {
            PullbackError::Complex(e) => e.into(),
            PullbackError::Search(e) => e.into(),
            PullbackError::Metric(e) => e.into(),
            PullbackError::ZSizeCap { .. } => CliError::Cap(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_space<T: Real>(path: &Path) -> Result<FiniteMetricSpace<T>, CliError> {
    read_metric(&read(path)?).map_err(|source| {
        let axiom = match &source {
            InputError::Metric(m) => m.axiom(),
            _ => "Parse",
        };
        CliError::Metric { path: path.display().to_string(), axiom, source }
    })
}

/// A distance input: either a barcode family in JSON or a distance matrix.
enum Input<T> {
    Barcodes(Vec<Barcode<T>>),
    Space(FiniteMetricSpace<T>),
}

fn load_input<T: Real>(path: &Path, degree: usize) -> Result<Input<T>, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with(['{', '[']) {
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let family = family_from_json(&value, degree).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(Input::Barcodes(family))
    } else {
        Ok(Input::Space(load_space(path)?))
    }
}

fn reduce_opts(common: &Common) -> Result<ReduceOptions, CliError> {
    let field = PrimeField::new(common.field).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(ReduceOptions { field, ..ReduceOptions::default() })
}

fn family_of<T: Real>(input: &Input<T>, opts: ReduceOptions) -> Result<Vec<Barcode<T>>, CliError> {
    match input {
        Input::Barcodes(f) => Ok(f.clone()),
        Input::Space(s) => Ok(vr_barcodes(s, BarcodeOptions { max_dim: None, reduce: opts })?),
    }
}

fn barcode_in<T: Real>(input: &Input<T>, k: usize, opts: ReduceOptions) -> Result<Barcode<T>, CliError> {
    match input {
        Input::Barcodes(f) => Ok(f.iter().find(|b| b.degree() == k).cloned().unwrap_or_else(|| Barcode::empty(k))),
        Input::Space(s) => Ok(vr_barcode(s, k, opts)?),
    }
}

fn space_of<T: Real>(input: &Input<T>, kind: Kind) -> Result<&FiniteMetricSpace<T>, CliError> {
    match input {
        Input::Space(s) => Ok(s),
        Input::Barcodes(_) => Err(CliError::Input(format!("--kind {kind:?} needs distance matrix files, not barcodes"))),
    }
}

/// Result of a subcommand: JSON document, table text and whether a check failed.
struct Output {
    json: Value,
    table: String,
    failure: Option<String>,
}

impl Output {
    fn ok(json: Value, table: String) -> Self {
        Output { json, table, failure: None }
    }
}

fn cmd_barcode<T: Real>(file: &Path, max_dim: Option<usize>, concise: bool, common: &Common) -> Result<Output, CliError> {
    let space = load_space::<T>(file)?;
    let mut family = vr_barcodes(&space, BarcodeOptions { max_dim, reduce: reduce_opts(common)? })?;
    if concise {
        family = family.iter().map(Barcode::concise).collect();
    }
    let json = json!({
        "points": space.len(),
        "concise": concise,
        "mode": T::mode_name(),
        "barcodes": family_to_json(&family),
    });
    Ok(Output::ok(json, family_to_table(&family)))
}

struct DistanceArgs {
    kind: Kind,
    degree: usize,
    concise: bool,
    max_extra: usize,
}

fn cmd_distance<T: Real>(a: &Path, b: &Path, args: DistanceArgs, common: &Common) -> Result<Output, CliError> {
    let opts = reduce_opts(common)?;
    let (ia, ib) = (load_input::<T>(a, args.degree)?, load_input::<T>(b, args.degree)?);
    let k = args.degree;
    let pick = |bc: Barcode<T>| if args.concise { bc.concise() } else { bc };
    let (value, witness) = match args.kind {
        Kind::Dm | Kind::Db => {
            let (ba, bb) = (pick(barcode_in(&ia, k, opts)?), pick(barcode_in(&ib, k, opts)?));
            let res = if args.kind == Kind::Dm {
                matching_distance(ba.points(), bb.points())
            } else {
                bottleneck_distance(ba.points(), bb.points())
            };
            (res.cost, res.to_json())
        }
        Kind::Di => {
            let fa: Vec<_> = family_of(&ia, opts)?.into_iter().map(pick).collect();
            let fb: Vec<_> = family_of(&ib, opts)?.into_iter().map(pick).collect();
            (interleaving_distance(&fa, &fb), Value::Null)
        }
        Kind::Hatdb0 => {
            let v = hatdb0_spaces(space_of(&ia, args.kind)?, space_of(&ib, args.kind)?)?;
            (v.into(), Value::Null)
        }
        Kind::Hatdb => {
            let search = SearchOptions { max_extra: args.max_extra, reduce: opts, ..SearchOptions::default() };
            let r = hatdb_upper_bound(space_of(&ia, args.kind)?, space_of(&ib, args.kind)?, k, search)?;
            (r.bound, r.to_json())
        }
        Kind::Gh => {
            let r = gromov_hausdorff_exact(space_of(&ia, args.kind)?, space_of(&ib, args.kind)?, DEFAULT_NODE_BUDGET)?;
            let w = json!({ "correspondence": r.correspondence, "distortion": r.distortion.to_json(), "nodes": r.nodes });
            (r.distance.into(), w)
        }
    };
    let kind = format!("{:?}", args.kind).to_lowercase();
    let json = json!({ "kind": kind, "degree": k, "value": value.to_json(), "witness": witness, "mode": T::mode_name() });
    Ok(Output::ok(json, format!("{kind} = {value}\n")))
}

fn cmd_pullback<T: Real>(
    file: &Path,
    mut repeats: Vec<usize>,
    degree: Option<usize>,
    direct: bool,
    common: &Common,
) -> Result<Output, CliError> {
    let opts = reduce_opts(common)?;
    let space = load_space::<T>(file)?;
    repeats.sort_unstable();
    let spec = PullbackSpec::new(space.clone(), repeats.clone())?;
    let z = space.len() + repeats.len();
    let degrees: Vec<usize> = match degree {
        Some(k) => vec![k],
        None => (0..z).collect(),
    };
    let mut closed = Vec::new();
    let mut mismatches = Vec::new();
    for &k in &degrees {
        let bc = pullback_barcode_closed_form(&spec, &vr_barcode(&space, k, opts)?, k)?;
        if direct {
            let d = pullback_barcode_direct(&spec, k, opts)?;
            if d != bc {
                mismatches.push(format!("degree {k}: closed form {bc}, direct {d}"));
            }
        }
        closed.push(bc);
    }
    let json = json!({
        "repeats": repeats,
        "points": z,
        "mode": T::mode_name(),
        "barcodes": family_to_json(&closed),
        "direct_checked": direct,
        "mismatches": mismatches,
    });
    let failure = (!mismatches.is_empty()).then(|| mismatches.join("; "));
    Ok(Output { json, table: family_to_table(&closed), failure })
}

fn cmd_stability<T: Real>(x: &Path, y: &Path, degree: usize, max_extra: usize, common: &Common) -> Result<Output, CliError> {
    let (x, y) = (load_space::<T>(x)?, load_space::<T>(y)?);
    let search = SearchOptions { max_extra, reduce: reduce_opts(common)?, ..SearchOptions::default() };
    let r = stability_chain_check(&x, &y, degree, search, DEFAULT_NODE_BUDGET)?;
    let (db, hat, gh2) = r.row();
    let certified = if r.hatdb.certified { "" } else { " (upper bound, not certified)" };
    let table = format!("degree {degree}: d_B = {db} <= hatdb = {hat}{certified} <= 2 d_GH = {gh2}\n");
    let failure = (!r.passed()).then(|| format!("stability chain fails in degree {degree}"));
    Ok(Output { json: r.to_json(), table, failure })
}

fn cmd_verify<T: Real>(data_dir: Option<&Path>) -> Result<Output, CliError> {
    let data = match data_dir {
        Some(dir) => DataSet::from_dir(dir),
        None => DataSet::bundled(),
    };
    let checks = verify_paper::<T>(&data);
    let mut table = String::new();
    for c in &checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!("[{mark}] {}", c.name));
        if !c.passed {
            table.push_str(&format!(": {}", c.detail));
        }
        table.push('\n');
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let json = json!({
        "mode": T::mode_name(),
        "checks": checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
        "passed": failed.is_empty(),
    });
    let failure = (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join("; ")));
    Ok(Output { json, table, failure })
}

fn dispatch<T: Real>(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Barcode { file, max_dim, concise, common } => cmd_barcode::<T>(file, *max_dim, *concise, common),
        Command::Distance { a, b, kind, degree, concise, max_extra, common } => {
            let args = DistanceArgs { kind: *kind, degree: *degree, concise: *concise, max_extra: *max_extra };
            cmd_distance::<T>(a, b, args, common)
        }
        Command::PullbackBarcode { file, repeats, degree, direct, common } => {
            cmd_pullback::<T>(file, repeats.clone(), *degree, *direct, common)
        }
        Command::Stability { x, y, degree, max_extra, common } => cmd_stability::<T>(x, y, *degree, *max_extra, common),
        Command::VerifyPaper { data_dir, .. } => cmd_verify::<T>(data_dir.as_deref()),
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Barcode { common, .. }
        | Command::Distance { common, .. }
        | Command::PullbackBarcode { common, .. }
        | Command::Stability { common, .. }
        | Command::VerifyPaper { common, .. } => common,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = *common(&cli.command);
    let result = if opts.float { dispatch::<Float>(&cli.command) } else { dispatch::<Exact>(&cli.command) };
    match result {
        Ok(out) => {
            match opts.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON serializes")),
                Format::Table => print!("{}", out.table),
            }
            match out.failure {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
