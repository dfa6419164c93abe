//! Command-line front end. [`run`] takes the argument list and output
//! streams and returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::builder::TypedValueParser;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bae::{BetheBranch, Origin, SearchOptions, DEFAULT_ATTEMPTS, DEFAULT_MAX_ITER, SOLVER_TOL};
use crate::catalog::{self, Expected};
use crate::config::{parse_csv, write_csv, ModelConfig, RootRow};
use crate::derivation;
use crate::error::Error;
use crate::model::{classify, validate, ModelSpec};
use crate::pipeline::{evaluate_branch, run as run_pipeline, Model, RunOptions};
use crate::verify::{VerificationReport, VerifyOptions, DEFAULT_GRID_POINTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qesf", version, about = "Prepotential construction of exactly and quasi-exactly solvable potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the solvability class and validation diagnostics.
    Classify { config: PathBuf },
    /// Enumerate root branches and write them as CSV.
    Solve(SolveArgs),
    /// Certify branches from a root file.
    Verify(VerifyArgs),
    /// Print the potential, energy and root equations symbolically.
    Derive {
        config: PathBuf,
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Browse the built-in models.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    pub config: PathBuf,
    /// Overrides the config's N.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = SOLVER_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
    pub attempts: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to a hash of the model.
    #[arg(long, env = "QESF_SEED")]
    pub seed: Option<u64>,
    /// Leave the verified column false without running the check.
    #[arg(long)]
    pub no_verify: bool,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    pub config: PathBuf,
    pub roots: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Finite-difference order: 2, 4 or 6.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["2", "4", "6"]).try_map(|s| s.parse::<usize>()))]
    pub stencil: Option<usize>,
    /// Also compare energies with the finite-difference spectrum.
    #[arg(long)]
    pub spectrum: bool,
    /// Write the JSON report here ("-" for stdout, replacing the text report).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show { name: String },
    /// Write every entry at its defaults as JSON.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Classify { config } => cmd_classify(&config, out),
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Derive { config, n } => cmd_derive(&config, n, out),
        Command::Catalog { action } => cmd_catalog(&action, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

#[derive(Debug)]
struct CliError(i32, String);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } | Error::SingularJacobian { .. } | Error::Collision(..) => EXIT_SOLVER,
            _ => EXIT_INPUT,
        };
        CliError(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(EXIT_INPUT, e.to_string())
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn read(path: &Path) -> std::result::Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn load(path: &Path, n: Option<usize>) -> std::result::Result<(ModelConfig, ModelSpec), CliError> {
    let cfg = ModelConfig::parse(&read(path)?).map_err(|e| CliError(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let spec = cfg
        .to_spec(n)
        .map_err(|e| CliError(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    Ok((cfg, spec))
}

fn cmd_classify(path: &Path, out: &mut dyn Write) -> CliResult {
    let (_, spec) = load(path, None)?;
    let class = classify(&spec)?;
    writeln!(out, "{class}")?;
    let v = validate(&spec);
    for d in &v.diagnostics {
        writeln!(out, "{d}")?;
    }
    Ok(if v.has_errors() { EXIT_INPUT } else { EXIT_OK })
}

fn verify_options(grid_points: usize, stencil: Option<usize>, spectrum: bool) -> VerifyOptions {
    VerifyOptions {
        grid_points,
        stencil,
        check_spectrum: spectrum,
        ..VerifyOptions::default()
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let (cfg, spec) = load(&a.config, a.n)?;
    let seed = a.seed.unwrap_or_else(|| spec.fingerprint());
    let opts = RunOptions {
        search: SearchOptions {
            tol: a.tol,
            attempts: a.attempts,
            max_iter: DEFAULT_MAX_ITER,
            seed: Some(seed),
        },
        shift: cfg.shift()?,
        verify: None,
    };
    let (model, mut results) = match run_pipeline(&spec, &opts) {
        Ok(r) => r,
        Err(e) => {
            let e = CliError::from(e);
            return Err(CliError(if e.0 == EXIT_INPUT { EXIT_INPUT } else { EXIT_SOLVER }, e.1));
        }
    };
    if results.is_empty() {
        writeln!(err, "no real branch found after {} attempts (seed {seed})", a.attempts)?;
        return Ok(EXIT_SOLVER);
    }
    let vopts = VerifyOptions::default();
    let mut verified = vec![false; results.len()];
    if !a.no_verify {
        for (i, r) in results.iter().enumerate() {
            let profile = r.profile.as_ref().expect("profile is kept");
            verified[i] = match crate::verify::certify(&model, profile, &vopts) {
                Ok(rep) => rep.verdict.pass,
                Err(e) => {
                    writeln!(err, "branch {i}: verification error: {e}")?;
                    false
                }
            };
        }
    }
    // branch ids follow enumeration order; rows are sorted by (E, id)
    let mut order: Vec<usize> = (0..results.len()).collect();
    order.sort_by(|&i, &j| results[i].energy.total_cmp(&results[j].energy).then(i.cmp(&j)));
    let mut rows = Vec::new();
    for &id in &order {
        let r = &mut results[id];
        let res = r.branch.residual_norm;
        if r.branch.roots.is_empty() {
            rows.push(RootRow { branch_id: id, k: 0, z_k: None, residual_max: res, energy: r.energy, verified: verified[id] });
        }
        for (k, &z) in r.branch.roots.iter().enumerate() {
            rows.push(RootRow { branch_id: id, k, z_k: Some(z), residual_max: res, energy: r.energy, verified: verified[id] });
        }
    }
    let csv = write_csv(Some(seed), &rows);
    match &a.out {
        Some(p) => {
            fs::write(p, &csv).map_err(|e| CliError(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            writeln!(out, "{} branch(es) written to {} (seed {seed})", results.len(), p.display())?;
        }
        None => write!(out, "{csv}")?,
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct BranchVerification {
    branch_id: usize,
    roots: Vec<f64>,
    bae_residual: f64,
    energy: Option<f64>,
    pass: bool,
    report: Option<VerificationReport>,
    error: Option<String>,
}

fn verify_branch(model: &Model, id: usize, roots: &[f64], opts: &RunOptions) -> BranchVerification {
    let spec = model.spec();
    let mut v = BranchVerification {
        branch_id: id,
        roots: roots.to_vec(),
        bae_residual: f64::NAN,
        energy: None,
        pass: false,
        report: None,
        error: None,
    };
    let branch = match BetheBranch::from_roots(spec, roots.to_vec(), Origin::User) {
        Ok(b) => b,
        Err(e) => {
            v.error = Some(e.to_string());
            return v;
        }
    };
    v.bae_residual = branch.residual_norm;
    match evaluate_branch(model, branch, opts) {
        Ok(r) => {
            v.energy = Some(r.energy);
            v.pass = r.verified();
            v.report = r.report;
        }
        Err(e) => v.error = Some(e.to_string()),
    }
    v
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let (cfg, spec) = load(&a.config, None)?;
    let file = parse_csv(&read(&a.roots)?).map_err(|e| CliError(EXIT_INPUT, format!("{}: {e}", a.roots.display())))?;
    let mut spec = spec;
    if let Some((_, first)) = file.branches.first() {
        if first.len() != spec.n {
            spec = spec.with_n(first.len());
        }
    }
    for (id, roots) in &file.branches {
        if roots.len() != spec.n {
            return Err(CliError(
                EXIT_INPUT,
                format!("branch {id} has {} roots, expected {}", roots.len(), spec.n),
            ));
        }
    }
    let model = Model::build(&spec)?;
    let opts = RunOptions {
        shift: cfg.shift()?,
        verify: Some(verify_options(a.grid_points, a.stencil, a.spectrum)),
        ..RunOptions::default()
    };
    let results: Vec<BranchVerification> = file
        .branches
        .iter()
        .map(|(id, roots)| verify_branch(&model, *id, roots, &opts))
        .collect();
    let json = serde_json::to_string_pretty(&results).expect("report serializes");
    let json_to_stdout = a.json.as_deref() == Some(Path::new("-"));
    if let Some(p) = a.json.as_deref().filter(|p| *p != Path::new("-")) {
        fs::write(p, format!("{json}\n")).map_err(|e| CliError(EXIT_INPUT, format!("{}: {e}", p.display())))?;
    }
    if json_to_stdout {
        writeln!(out, "{json}")?;
    } else {
        for v in &results {
            write!(out, "branch {}: {}", v.branch_id, if v.pass { "PASS" } else { "FAIL" })?;
            write!(out, "  bae_residual={:.3e}", v.bae_residual)?;
            if let Some(e) = v.energy {
                write!(out, "  E={e:.12}")?;
            }
            if let Some(r) = &v.report {
                write!(
                    out,
                    "  residual_max={:.3e}  residual_rms={:.3e}  nodes={}  normalizable={}",
                    r.residual_max, r.residual_rms, r.node_count, r.normalizable
                )?;
                for m in &r.spectrum_matches {
                    write!(out, "  fd={:.9} diff={:.3e}", m.fd, m.diff)?;
                }
            }
            if let Some(e) = &v.error {
                write!(out, "  error: {e}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(if results.iter().all(|v| v.pass) { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_derive(path: &Path, n: Option<usize>, out: &mut dyn Write) -> CliResult {
    let (cfg, spec) = load(path, n)?;
    write!(out, "{}", derivation::report(&spec)?)?;
    if let Some(name) = &cfg.catalog {
        let e = catalog::lookup(name)?;
        writeln!(out, "reported energy shift: {:?}", e.shift(&cfg.params)?)?;
        writeln!(out, "closed form: {}", e.energy)?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct ExportEntry {
    name: &'static str,
    summary: &'static str,
    energy: &'static str,
    shift: catalog::ShiftRule,
    defaults: catalog::Params,
    model: ModelConfig,
}

/// Every entry at its defaults, as shipped in the data file.
pub fn catalog_export() -> crate::error::Result<String> {
    let mut list = Vec::new();
    for e in catalog::entries() {
        let defaults = e.defaults();
        let spec = e.instantiate(&defaults, e.default_n)?;
        list.push(ExportEntry {
            name: e.name,
            summary: e.summary,
            energy: e.energy,
            shift: e.shift_rule,
            defaults,
            model: ModelConfig::from_spec(&spec),
        });
    }
    Ok(format!("{}\n", serde_json::to_string_pretty(&list).expect("catalog serializes")))
}

fn cmd_catalog(action: &CatalogAction, out: &mut dyn Write) -> CliResult {
    match action {
        CatalogAction::List => {
            for e in catalog::entries() {
                writeln!(out, "{:<16} {}", e.name, e.summary)?;
            }
        }
        CatalogAction::Show { name } => {
            let e = catalog::lookup(name)?;
            let defaults = e.defaults();
            writeln!(out, "name: {}", e.name)?;
            writeln!(out, "summary: {}", e.summary)?;
            let params: Vec<String> = e.param_names().map(|p| match defaults.get(p) {
                Some(v) => format!("{p}={v}"),
                None => format!("{p}=(optional)"),
            }).collect();
            writeln!(out, "parameters: {}", params.join(", "))?;
            writeln!(out, "default N: {}", e.default_n)?;
            writeln!(out, "energy: E = {}", e.energy)?;
            writeln!(out, "shift: {:?}", e.shift_rule)?;
            let spec = e.instantiate(&defaults, e.default_n)?;
            writeln!(out, "model: {}", ModelConfig::from_spec(&spec).to_json().replace('\n', "").replace("  ", " "))?;
            for n in 0..=e.default_n.max(3) {
                match e.expected_energies(&defaults, n)? {
                    Expected::Values(v) => writeln!(out, "expected E (N={n}): {}", Expected::Values(v))?,
                    Expected::OracleRequired => writeln!(out, "expected E (N={n}): oracle required")?,
                }
            }
        }
        CatalogAction::Export { out: path } => {
            let text = catalog_export()?;
            match path {
                Some(p) => fs::write(p, text).map_err(|e| CliError(EXIT_INPUT, format!("{}: {e}", p.display())))?,
                None => write!(out, "{text}")?,
            }
        }
    }
    Ok(EXIT_OK)
}
