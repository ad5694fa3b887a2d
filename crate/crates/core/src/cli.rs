//! Command-line front end: argument parsing, input files and rendering.
//!
//! Every command produces one report `{schema, command, inputs, results}`.
//! Tabular results live under `results.rows` and become the CSV body; scalar
//! results are repeated as leading CSV columns.
//!
//! Exit codes: 0 ok, 2 parse or input error, 3 dimension mismatch, 4 search
//! did not converge, 5 unsupported dimension.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::magic::{char_distribution, entropy_of, magic_bound, stabilizer_entropy};
use crate::search::{find_fiducial, SearchConfig};
use crate::sic::{
    catalog_append, catalog_fiducial, catalog_load, encode_amplitudes, fiducial_residual, k_alpha,
    k_alpha_bound, verify_sic, wh_orbit, FiducialRecord, StateSet,
};
use crate::stabilizer::enumerate_stabilizer_states;
use crate::states::{haar_random_state, PureState, NORM_TOL};
use crate::wh_group::{Factorization, WhGroup};

pub const SCHEMA: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_UNSUPPORTED: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "magiclab",
    version,
    about = "Stabilizer entropies, the maximal-magic bound and SIC fiducials"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, env = "MAGICLAB_THREADS", global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stabilizer entropies of a state and their distance to the bound.
    Entropy(EntropyArgs),
    /// Multi-restart search for a maximal-magic state.
    Search(SearchArgs),
    /// Check a fiducial orbit or an explicit set for the SIC property.
    Verify(VerifyArgs),
    /// List the stabilizer states of a prime-factor dimension.
    Stabilizers(StabilizerArgs),
    /// Tabulate the maximal-magic bound and the K_α lower bound.
    BoundTable(BoundTableArgs),
}

/// Group selection shared by most commands.
#[derive(Debug, Clone, Default, Args)]
pub struct GroupArgs {
    /// Hilbert-space dimension.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Tensor factors of the group, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    pub factors: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["state", "catalog", "random"])))]
pub struct EntropyArgs {
    /// State file: `{"dim", "factors"?, "vector": [[re, im], ...]}`.
    pub state: Option<PathBuf>,

    /// Use the catalog fiducial of this dimension.
    #[arg(long, value_name = "D")]
    pub catalog: Option<usize>,

    /// Catalog file searched before the built-in entries.
    #[arg(long, value_name = "PATH")]
    pub catalog_file: Option<PathBuf>,

    /// Haar-random state from this seed.
    #[arg(long, value_name = "SEED")]
    pub random: Option<u64>,

    /// Record to use when the file holds several (default: last).
    #[arg(long)]
    pub record: Option<usize>,

    #[command(flatten)]
    pub group: GroupArgs,

    /// Orders α, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub group: GroupArgs,

    #[arg(long, default_value_t = 20)]
    pub restarts: usize,

    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,

    #[arg(long, default_value_t = 1e-10)]
    pub grad_tol: f64,

    /// Convergence threshold on objective − target.
    #[arg(long, default_value_t = 1e-12)]
    pub gap_tol: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Catalog file that receives the fiducial when the search converges.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["fiducial", "set", "catalog"])))]
pub struct VerifyArgs {
    /// Fiducial file: a state file, a catalog or a saved search report.
    #[arg(long, value_name = "PATH")]
    pub fiducial: Option<PathBuf>,

    /// Set file: `{"dim", "states": [[[re, im], ...], ...]}`.
    #[arg(long, value_name = "PATH")]
    pub set: Option<PathBuf>,

    /// Use the catalog fiducial of this dimension.
    #[arg(long, value_name = "D")]
    pub catalog: Option<usize>,

    #[arg(long, value_name = "PATH")]
    pub catalog_file: Option<PathBuf>,

    /// Record to use when the file holds several (default: last).
    #[arg(long)]
    pub record: Option<usize>,

    #[command(flatten)]
    pub group: GroupArgs,

    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct StabilizerArgs {
    #[command(flatten)]
    pub group: GroupArgs,
}

#[derive(Debug, Args)]
pub struct BoundTableArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
    pub dims: Vec<usize>,

    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub alphas: Vec<f64>,
}

/// A rendered command result plus the exit status it implies.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Map<String, Value>,
    pub exit: i32,
}

impl Report {
    fn new(command: &'static str, inputs: Value, results: Value) -> Self {
        let Value::Object(results) = results else {
            unreachable!("results are always built as objects")
        };
        Self {
            command,
            inputs,
            results,
            exit: EXIT_OK,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
        })
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `out`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("magiclab: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = render(&report, cli.format, out) {
        eprintln!("magiclab: {e}");
        return EXIT_PARSE;
    }
    report.exit
}

pub fn execute(command: &Command) -> Result<Report> {
    match command {
        Command::Entropy(a) => cmd_entropy(a),
        Command::Search(a) => cmd_search(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stabilizers(a) => cmd_stabilizers(a),
        Command::BoundTable(a) => cmd_bound_table(a),
    }
}

// ---------------------------------------------------------------- inputs

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Text(String),
    Float(f64),
}

impl Num {
    fn value(&self) -> Result<f64> {
        match self {
            Num::Float(x) => Ok(*x),
            Num::Text(s) => s
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("amplitude {s:?}: {e}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct StateFile {
    dim: usize,
    #[serde(default)]
    factors: Option<Vec<usize>>,
    vector: Vec<[Num; 2]>,
}

#[derive(Debug, Deserialize)]
struct SetFile {
    dim: usize,
    states: Vec<Vec<[Num; 2]>>,
}

fn amplitudes(raw: &[[Num; 2]]) -> Result<Vec<Complex64>> {
    raw.iter()
        .map(|[re, im]| Ok(Complex64::new(re.value()?, im.value()?)))
        .collect()
}

/// Unit vector from file amplitudes; stored bits are kept when already
/// normalized, otherwise the vector is rescaled with a warning.
fn unit_state(amps: Vec<Complex64>) -> Result<PureState> {
    match PureState::new(amps.clone()) {
        Ok(s) => Ok(s),
        Err(Error::NotNormalized(n)) => {
            log::warn!("input vector has norm {n}; renormalizing (tolerance {NORM_TOL:e})");
            PureState::normalized(amps)
        }
        Err(e) => Err(e),
    }
}

/// All JSON documents in a file: a single object, JSON lines or a saved
/// report, whose `results` object is used in place of the report.
fn read_documents(path: &Path) -> Result<Vec<Value>> {
    let text = std::fs::read_to_string(path)?;
    let docs = serde_json::Deserializer::from_str(&text)
        .into_iter::<Value>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if docs.is_empty() {
        return Err(Error::Parse(format!("{}: no JSON document", path.display())));
    }
    Ok(docs
        .into_iter()
        .map(|doc| match doc {
            Value::Object(mut m) if m.contains_key("results") => m.remove("results").unwrap_or_default(),
            other => other,
        })
        .collect())
}

fn pick_document(path: &Path, record: Option<usize>) -> Result<Value> {
    let mut docs = read_documents(path)?;
    let n = docs.len();
    let i = record.unwrap_or(n - 1);
    if i >= n {
        return Err(Error::Parse(format!(
            "{}: record {i} requested, file has {n}",
            path.display()
        )));
    }
    Ok(docs.swap_remove(i))
}

fn parse_doc<T: for<'de> Deserialize<'de>>(doc: Value, path: &Path) -> Result<T> {
    serde_json::from_value(doc).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// The group named on the command line and in the file, checked for
/// consistency. Command-line factors win over file factors; any stated
/// dimension must equal the product of the factors.
fn resolve_group(
    cli: &GroupArgs,
    file_dim: Option<usize>,
    file_factors: Option<&[usize]>,
) -> Result<Factorization> {
    let fact = match (&cli.factors, file_factors) {
        (Some(f), _) => Factorization::new(f.clone())?,
        (None, Some(f)) => Factorization::new(f.to_vec())?,
        (None, None) => match cli.dim.or(file_dim) {
            Some(d) if d < 2 => return Err(Error::InvalidDimension(d)),
            Some(d) => Factorization::single(d)?,
            None => return Err(Error::Parse("give --dim or --factors".into())),
        },
    };
    for d in [cli.dim, file_dim].into_iter().flatten() {
        if d != fact.dim() {
            return Err(Error::DimensionMismatch {
                expected: fact.dim(),
                found: d,
            });
        }
    }
    Ok(fact)
}

fn load_state_file(
    path: &Path,
    record: Option<usize>,
    cli: &GroupArgs,
) -> Result<(Factorization, PureState)> {
    let file: StateFile = parse_doc(pick_document(path, record)?, path)?;
    let fact = resolve_group(cli, Some(file.dim), file.factors.as_deref())?;
    let amps = amplitudes(&file.vector)?;
    if amps.len() != fact.dim() {
        return Err(Error::DimensionMismatch {
            expected: fact.dim(),
            found: amps.len(),
        });
    }
    Ok((fact, unit_state(amps)?))
}

/// Latest trusted record of dimension `d` from `file`, then the built-in
/// catalog. Explicit `--factors` restrict the match.
fn catalog_lookup(d: usize, file: Option<&Path>, cli: &GroupArgs) -> Result<FiducialRecord> {
    let wanted = match &cli.factors {
        Some(f) => {
            let fact = Factorization::new(f.clone())?;
            if fact.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: fact.dim(),
                });
            }
            fact
        }
        None => Factorization::single(d)?,
    };
    if let Some(dim) = cli.dim.filter(|&x| x != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: dim,
        });
    }
    let mut records = match file {
        Some(p) => catalog_load(p)?,
        None => Vec::new(),
    };
    records.extend(catalog_fiducial(d));
    records
        .into_iter()
        .rev()
        .find(|r| r.trusted && r.factorization == wanted)
        .ok_or_else(|| Error::UnsupportedDimension(format!("no catalog fiducial for {wanted}")))
}

fn factors_json(f: &Factorization) -> Value {
    json!(f.factors())
}

fn vector_json(psi: &PureState) -> Value {
    json!(encode_amplitudes(psi.amplitudes()))
}

// -------------------------------------------------------------- commands

fn cmd_entropy(a: &EntropyArgs) -> Result<Report> {
    let (source, fact, psi) = if let Some(path) = &a.state {
        let (f, s) = load_state_file(path, a.record, &a.group)?;
        ("file", f, s)
    } else if let Some(d) = a.catalog {
        let r = catalog_lookup(d, a.catalog_file.as_deref(), &a.group)?;
        ("catalog", r.factorization, r.vector)
    } else {
        let seed = a.random.expect("clap enforces one source");
        let f = resolve_group(&a.group, None, None)?;
        let s = haar_random_state(f.dim(), seed)?;
        ("random", f, s)
    };
    let g = WhGroup::new(fact.clone());
    let dist = char_distribution(&g, &psi)?;
    let rows = a
        .alpha
        .iter()
        .map(|&alpha| {
            let r = entropy_of(&dist, alpha)?;
            Ok(json!({
                "alpha": alpha,
                "value": r.value,
                "bound": r.bound,
                "gap": r.saturation_gap,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let inputs = json!({
        "source": source,
        "state": a.state,
        "catalog": a.catalog,
        "random": a.random,
        "dim": a.group.dim,
        "factors": a.group.factors,
        "alpha": a.alpha,
    });
    let results = json!({
        "dim": fact.dim(),
        "factors": factors_json(&fact),
        "rows": rows,
    });
    Ok(Report::new("entropy", inputs, results))
}

fn cmd_search(a: &SearchArgs) -> Result<Report> {
    let fact = resolve_group(&a.group, None, None)?;
    let config = SearchConfig {
        factorization: fact.clone(),
        restarts: a.restarts,
        max_iters: a.max_iters,
        grad_tol: a.grad_tol,
        target_gap_tol: a.gap_tol,
        seed: a.seed,
    };
    let r = find_fiducial(&config)?;
    let mut written = false;
    if let Some(path) = &a.out {
        if r.converged {
            catalog_append(&r.to_record(&fact)?, path)?;
            written = true;
        } else {
            log::warn!("search did not converge; nothing appended to {}", path.display());
        }
    }
    if !r.converged {
        log::warn!(
            "best objective {} is {:e} above the target {}",
            r.objective,
            r.objective_gap,
            r.target
        );
    }
    let inputs = json!({
        "dim": fact.dim(),
        "factors": factors_json(&fact),
        "restarts": a.restarts,
        "max_iters": a.max_iters,
        "grad_tol": a.grad_tol,
        "gap_tol": a.gap_tol,
        "seed": a.seed,
        "out": a.out,
    });
    let results = json!({
        "dim": fact.dim(),
        "factors": factors_json(&fact),
        "converged": r.converged,
        "objective": r.objective,
        "target": r.target,
        "objective_gap": r.objective_gap,
        "sic_residual": r.sic_residual,
        "entropy_at_2": r.entropy_at_2,
        "bound_at_2": r.bound_at_2,
        "entropy_gap": r.entropy_gap(),
        "restarts_used": r.restarts_used,
        "best_restart": r.best_restart,
        "iterations": r.iterations,
        "catalog_written": written,
        "vector": vector_json(&r.best_state),
    });
    let mut report = Report::new("search", inputs, results);
    if !r.converged {
        report.exit = EXIT_NOT_CONVERGED;
    }
    Ok(report)
}

fn k_rows(set: &StateSet) -> Result<Vec<Value>> {
    [1.0, 2.0]
        .into_iter()
        .map(|alpha| {
            let k = k_alpha(set, alpha)?;
            let bound = k_alpha_bound(set.dim(), alpha)?;
            Ok(json!({
                "alpha": alpha,
                "k_alpha": k,
                "k_bound": bound,
                "excess": k - bound,
            }))
        })
        .collect()
}

fn cmd_verify(a: &VerifyArgs) -> Result<Report> {
    let inputs = json!({
        "fiducial": a.fiducial,
        "set": a.set,
        "catalog": a.catalog,
        "record": a.record,
        "dim": a.group.dim,
        "factors": a.group.factors,
        "tol": a.tol,
    });
    if let Some(path) = &a.set {
        let file: SetFile = parse_doc(pick_document(path, a.record)?, path)?;
        if let Some(d) = a.group.dim.filter(|&d| d != file.dim) {
            return Err(Error::DimensionMismatch {
                expected: file.dim,
                found: d,
            });
        }
        let states = file
            .states
            .iter()
            .map(|raw| {
                let amps = amplitudes(raw)?;
                if amps.len() != file.dim {
                    return Err(Error::DimensionMismatch {
                        expected: file.dim,
                        found: amps.len(),
                    });
                }
                unit_state(amps)
            })
            .collect::<Result<Vec<_>>>()?;
        let set = StateSet::new(states)?;
        let report = verify_sic(&set, a.tol)?;
        let results = json!({
            "dim": set.dim(),
            "members": set.len(),
            "is_sic": report.is_sic,
            "max_residual": report.max_residual,
            "rows": k_rows(&set)?,
        });
        return Ok(Report::new("verify", inputs, results));
    }

    let (fact, phi) = match (&a.fiducial, a.catalog) {
        (Some(path), _) => load_state_file(path, a.record, &a.group)?,
        (None, Some(d)) => {
            let r = catalog_lookup(d, a.catalog_file.as_deref(), &a.group)?;
            (r.factorization, r.vector)
        }
        (None, None) => unreachable!("clap enforces one source"),
    };
    let g = WhGroup::new(fact.clone());
    let orbit = wh_orbit(&g, &phi)?;
    let report = verify_sic(&orbit, a.tol)?;
    let m2 = stabilizer_entropy(&g, &phi, 2.0)?;
    let results = json!({
        "dim": fact.dim(),
        "factors": factors_json(&fact),
        "members": orbit.len(),
        "is_sic": report.is_sic,
        "max_residual": report.max_residual,
        "sic_residual": fiducial_residual(&g, &phi)?,
        "entropy_at_2": m2.value,
        "bound_at_2": m2.bound,
        "entropy_gap": m2.saturation_gap,
        "rows": k_rows(&orbit)?,
    });
    Ok(Report::new("verify", inputs, results))
}

fn cmd_stabilizers(a: &StabilizerArgs) -> Result<Report> {
    let fact = resolve_group(&a.group, None, None)?;
    let g = WhGroup::new(fact.clone());
    let states = enumerate_stabilizer_states(&g)?;
    let rows = states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let m2 = stabilizer_entropy(&g, &s.state, 2.0)?.value;
            let generators: Vec<String> = s.subset.indices().iter().map(|x| x.to_string()).collect();
            Ok(json!({
                "index": i,
                "subset": generators.join(" "),
                "m2": m2,
                "vector": vector_json(&s.state),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let inputs = json!({ "dim": a.group.dim, "factors": a.group.factors });
    let results = json!({
        "dim": fact.dim(),
        "factors": factors_json(&fact),
        "count": rows.len(),
        "rows": rows,
    });
    Ok(Report::new("stabilizers", inputs, results))
}

fn cmd_bound_table(a: &BoundTableArgs) -> Result<Report> {
    let mut rows = Vec::new();
    for &d in &a.dims {
        for &alpha in &a.alphas {
            let magic = if alpha >= 2.0 {
                Some(magic_bound(d, alpha)?)
            } else {
                None
            };
            rows.push(json!({
                "d": d,
                "alpha": alpha,
                "magic_bound": magic,
                "k_alpha_bound": k_alpha_bound(d, alpha)?,
            }));
        }
    }
    let inputs = json!({ "dims": a.dims, "alphas": a.alphas });
    Ok(Report::new("bound-table", inputs, json!({ "rows": rows })))
}

// ------------------------------------------------------------- rendering

pub fn render(report: &Report, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report.to_json())?;
            writeln!(out)?;
        }
        Format::Csv => render_csv(report, out)?,
        Format::Pretty => render_pretty(report, out)?,
    }
    Ok(())
}

type Row = Map<String, Value>;

fn split_rows(results: &Row) -> (Vec<(&str, &Value)>, Vec<&Row>) {
    let scalars = results
        .iter()
        .filter(|(k, _)| k.as_str() != "rows")
        .map(|(k, v)| (k.as_str(), v))
        .collect();
    let rows = results
        .get("rows")
        .and_then(Value::as_array)
        .map(|rs| rs.iter().filter_map(Value::as_object).collect())
        .unwrap_or_default();
    (scalars, rows)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        other => other.to_string(),
    }
}

fn render_csv(report: &Report, out: &mut dyn Write) -> Result<()> {
    let (scalars, rows) = split_rows(&report.results);
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(format!("csv output: {e}"));
    let row_keys: Vec<&str> = rows
        .first()
        .map(|r| r.keys().map(String::as_str).collect())
        .unwrap_or_default();
    let header: Vec<&str> = scalars
        .iter()
        .map(|(k, _)| *k)
        .chain(row_keys.iter().copied())
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    let lead: Vec<String> = scalars.iter().map(|(_, v)| cell(v)).collect();
    if rows.is_empty() {
        w.write_record(&lead).map_err(csv_err)?;
    }
    for r in rows {
        let record: Vec<String> = lead
            .iter()
            .cloned()
            .chain(row_keys.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()))
            .collect();
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn render_pretty(report: &Report, out: &mut dyn Write) -> Result<()> {
    let (scalars, rows) = split_rows(&report.results);
    writeln!(out, "{}", report.command)?;
    let width = scalars.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in &scalars {
        writeln!(out, "  {k:<width$}  {}", cell(v))?;
    }
    if rows.is_empty() {
        return Ok(());
    }
    let keys: Vec<&str> = rows[0].keys().map(String::as_str).collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            keys.iter()
                .map(|k| r.get(*k).map(cell).unwrap_or_default())
                .collect()
        })
        .collect();
    let widths: Vec<usize> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| {
            cells
                .iter()
                .map(|c| c[i].len())
                .chain([k.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: Vec<&str>| {
        items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out)?;
    writeln!(out, "  {}", line(keys.clone()).trim_end())?;
    for c in &cells {
        writeln!(
            out,
            "  {}",
            line(c.iter().map(String::as_str).collect()).trim_end()
        )?;
    }
    Ok(())
}
