//! Command-line front end for dtnlab: builds a scenario from flags, runs
//! the spectrum, evolve or verify command and writes CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 1 input or I/O error, 2 spectral-gate violation,
//! 3 verification failure.

pub mod export;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtnlab::dtn::{build_dtn, build_robin};
use dtnlab::fem::{assemble, CoefficientField, CoefficientSpec, OperatorBundle};
use dtnlab::mesh::{Mesh, Preset};
use dtnlab::scenario::{validate_times, PotentialSpec, Scenario, ScenarioDescriptor, DEFAULT_PS, DEFAULT_TIMES};
use dtnlab::spectral::{PNorm, SpectralDecomposition};
use dtnlab::verify::run_suite;
use dtnlab::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_GATE: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "dtnlab", version, about = "Discrete Dirichlet-to-Neumann and Robin semigroups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the spectrum and eigenvector traces of the DtN or Robin pair.
    Spectrum {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value_t = OperatorKind::Dtn)]
        operator: OperatorKind,
    },
    /// Write kernel matrices and the trace decay over the time grid.
    Evolve {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value_t = OperatorKind::Dtn)]
        operator: OperatorKind,
    },
    /// Run the property suite and write report.json.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        /// Perturb the Schur complement asymmetrically before checking.
        #[arg(long)]
        inject_asymmetry: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorKind {
    Dtn,
    Robin,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Preset domain: square, disk, annulus, lshape.
    #[arg(long, conflicts_with = "mesh")]
    pub domain: Option<String>,
    /// Mesh JSON file.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Base resolution of the preset mesh.
    #[arg(long, default_value_t = 2)]
    pub resolution: usize,
    /// Uniform refinement levels.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    /// Coefficient JSON, inline or a file path.
    #[arg(long)]
    pub coeff: Option<String>,
    /// Potential: a number, or `<factor>*lambda1d` for a multiple of the
    /// first Dirichlet eigenvalue.
    #[arg(long = "V", allow_hyphen_values = true)]
    pub potential: Option<String>,
    /// Constant boundary coefficient β.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Comma-separated time grid.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Comma-separated exponents; `inf` for ∞.
    #[arg(long = "p", value_delimiter = ',')]
    pub ps: Option<Vec<String>>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "DTNLAB_THREADS")]
    pub threads: Option<usize>,
    /// Spectral-gate tolerance; defaults to 1e-8 times the largest matrix entry.
    #[arg(long)]
    pub gate_tol: Option<f64>,
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SpectralGateViolation { .. } => EXIT_GATE,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: EXIT_INPUT, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INPUT, message: message.into() }
}

/// Resolved configuration.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario<f64>,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl ScenarioConfig {
    pub fn from_args(args: &ConfigArgs) -> Result<Self, CliError> {
        let times = args.times.clone().unwrap_or_else(|| DEFAULT_TIMES.to_vec());
        validate_times(&times)?;
        let ps = match &args.ps {
            None => DEFAULT_PS.to_vec(),
            Some(list) => list.iter().map(|s| parse_exponent(s)).collect::<Result<_, _>>()?,
        };
        let (mesh, domain) = match (&args.mesh, &args.domain) {
            (Some(path), _) => (Mesh::load(path)?, path.display().to_string()),
            (None, name) => {
                let preset: Preset = name.as_deref().unwrap_or("square").parse()?;
                (Mesh::preset(preset, args.resolution)?, preset.name().to_string())
            }
        };
        let mesh = mesh.refined(args.refine);
        let (coeffs, coefficients) = match &args.coeff {
            None => (CoefficientField::laplacian(&mesh), "a = identity".to_string()),
            Some(src) => (load_coefficients(src)?.resolve(&mesh)?, src.clone()),
        };
        let coeffs = match args.beta {
            Some(b) => coeffs.with_uniform_beta(b),
            None => coeffs,
        };
        let potential: PotentialSpec = match &args.potential {
            Some(v) => v.parse()?,
            None => PotentialSpec::Keep,
        };
        let coeffs = potential.apply(&mesh, coeffs)?;
        let descriptor = ScenarioDescriptor {
            domain,
            resolution: args.resolution,
            refinement: args.refine,
            coefficients,
            potential: args.potential.clone().unwrap_or_else(|| "from coefficients".into()),
            beta: args.beta.map_or_else(|| "from coefficients".into(), |b| b.to_string()),
            seed: args.seed,
            times: times.clone(),
            ps: ps.clone(),
        };
        let mut scenario = Scenario::from_parts(descriptor, mesh, coeffs).with_seed(args.seed);
        scenario.gate_tol = args.gate_tol;
        Ok(Self { scenario, out: args.out.clone(), threads: args.threads })
    }
}

fn load_coefficients(src: &str) -> Result<CoefficientSpec, CliError> {
    let spec = if src.trim_start().starts_with('{') {
        CoefficientSpec::from_json_str(src)
    } else {
        CoefficientSpec::load(src)
    };
    spec.map_err(|e| input_error(format!("coefficients `{src}`: {e}")))
}

fn parse_exponent(s: &str) -> Result<f64, CliError> {
    let p = match s.trim() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        x => x.parse().map_err(|_| input_error(format!("invalid exponent `{s}`")))?,
    };
    PNorm::from_exponent(p).map(|_| p).ok_or_else(|| input_error(format!("exponent must be >= 1, got {s}")))
}

/// Parses arguments, installs the thread pool and runs the command.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    let (config, threads) = match &cli.command {
        Command::Spectrum { config, .. } | Command::Evolve { config, .. } | Command::Verify { config, .. } => {
            (config, config.threads)
        }
    };
    if let Some(n) = threads {
        // A pool may already exist when run() is called repeatedly in one
        // process; the first configuration wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let config = ScenarioConfig::from_args(config)?;
    match cli.command {
        Command::Spectrum { operator, .. } => cmd_spectrum(&config, operator),
        Command::Evolve { operator, .. } => cmd_evolve(&config, operator),
        Command::Verify { inject_asymmetry, .. } => cmd_verify(&config, inject_asymmetry),
    }
}

/// Spectral decomposition of the selected operator together with the mesh
/// node id behind each entry.
fn decompose(
    config: &ScenarioConfig,
    bundle: &OperatorBundle<f64>,
    operator: OperatorKind,
) -> Result<(SpectralDecomposition<f64>, Vec<usize>), CliError> {
    Ok(match operator {
        OperatorKind::Dtn => {
            let tol = config.scenario.gate_tol.unwrap_or_else(|| bundle.default_gate_tol());
            let dtn = build_dtn(bundle, tol)?;
            (dtn.spectrum()?, dtn.boundary().to_vec())
        }
        OperatorKind::Robin => (build_robin(bundle).spectrum()?, (0..bundle.node_count()).collect()),
    })
}

fn create_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))
}

/// Writes `spectrum.csv` and `eigenvectors.csv` (boundary traces).
pub fn cmd_spectrum(config: &ScenarioConfig, operator: OperatorKind) -> Result<u8, CliError> {
    let s = &config.scenario;
    let bundle = assemble(&s.mesh, &s.coeffs)?;
    let (dec, nodes) = decompose(config, &bundle, operator)?;
    create_out(&config.out)?;
    export::write_spectrum(&config.out.join("spectrum.csv"), dec.values())?;
    let boundary_rows: Vec<usize> = match operator {
        OperatorKind::Dtn => (0..nodes.len()).collect(),
        OperatorKind::Robin => bundle.boundary().to_vec(),
    };
    export::write_traces(&config.out.join("eigenvectors.csv"), &dec, &boundary_rows, &nodes, s.mesh.vertices())?;
    let head: Vec<String> = dec.values().iter().take(7).map(|l| format!("{l:.6}")).collect();
    println!("{} eigenvalues; lowest: {}", dec.len(), head.join(", "));
    Ok(EXIT_OK)
}

/// Writes `kernel_t{t}.csv` per grid time and `trace_decay.csv`.
pub fn cmd_evolve(config: &ScenarioConfig, operator: OperatorKind) -> Result<u8, CliError> {
    let s = &config.scenario;
    let bundle = assemble(&s.mesh, &s.coeffs)?;
    let (dec, nodes) = decompose(config, &bundle, operator)?;
    let kernels = dec.kernels(&s.times)?;
    create_out(&config.out)?;
    for k in &kernels {
        export::write_kernel(&config.out.join(export::kernel_file_name(k.t)), &k.values, &nodes)?;
    }
    export::write_trace_decay(&config.out.join("trace_decay.csv"), &dec, &kernels)?;
    println!("wrote {} kernels of size {}", kernels.len(), dec.len());
    Ok(EXIT_OK)
}

/// Runs the property suite; exit 3 unless every gated check passes.
pub fn cmd_verify(config: &ScenarioConfig, inject_asymmetry: bool) -> Result<u8, CliError> {
    let mut scenario = config.scenario.clone();
    scenario.inject_asymmetry = inject_asymmetry;
    let report = run_suite(&scenario);
    create_out(&config.out)?;
    export::write_json(&config.out.join("report.json"), &report)?;
    for c in &report.checks {
        println!("{:<26} {:?}", c.name, c.status);
    }
    println!("overall: {:?}", report.overall);
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
}
