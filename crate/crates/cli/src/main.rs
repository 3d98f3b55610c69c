//! `qscatter` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qscatter::circuit::depolarize;
use qscatter::format::{
    circuit_to_json, fmt_sig, grid_to_ascii, grid_to_csv, grid_to_json, parse_matrix, round_sig,
    series_to_csv, series_to_json,
};
use qscatter::phasespace::{
    phase_point_unitary, wigner_direct, wigner_grid_via_circuit, wigner_via_circuit, PhasePoint,
    PhaseSpace, WignerGrid,
};
use qscatter::random::{haar_unitary, seeded_rng};
use qscatter::scattering::{scatter_through, scattering_circuit};
use qscatter::spectrometer::{spectral_density, spectral_density_via_circuit, structure_function};
use qscatter::states::pseudo_pure;
use qscatter::synthesis::{synth_phase_point_circuit, wigner_grid_via_synthesis};
use qscatter::{DensityMatrix, Error, UnitaryOperator};
use serde_json::json;

const THREADS_ENV: &str = "QSCATTER_THREADS";

#[derive(Parser)]
#[command(
    name = "qscatter",
    version,
    about = "Scattering-circuit tomography and spectroscopy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate Tr(Uρ) from the probe qubit.
    Scatter(ScatterArgs),
    /// Discrete Wigner function of a state.
    Wigner(WignerArgs),
    /// Spectral density or structure function of a unitary.
    Spectrum(SpectrumArgs),
    /// Gate sequence for a controlled phase-point operator.
    Synth(SynthArgs),
    /// Wigner grids of the four two-qubit basis states.
    #[command(name = "demo-fig3")]
    DemoFig3(DemoArgs),
}

#[derive(Args)]
struct ScatterArgs {
    /// Density matrix file.
    #[arg(long)]
    rho: PathBuf,
    /// Unitary matrix file.
    #[arg(long)]
    u: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridFormat {
    Csv,
    Json,
    Ascii,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Tr(Aρ) directly.
    Direct,
    /// Scattering circuit with a dense controlled block.
    Circuit,
    /// Scattering circuit built from elementary gates.
    Synth,
}

#[derive(Args)]
struct WignerArgs {
    #[arg(long)]
    rho: PathBuf,
    /// Single grid point, as `q,p`.
    #[arg(long, value_parser = parse_point)]
    point: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value = "csv")]
    format: GridFormat,
    /// Depolarize the state with this strength first.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, value_enum, default_value = "direct")]
    method: Method,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpectrumMethod {
    /// Fourier sum of Tr(U^t).
    Direct,
    /// Simulated spectrometer circuit.
    Circuit,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Unitary matrix file.
    #[arg(
        long,
        conflicts_with = "random_u",
        required_unless_present = "random_u"
    )]
    u: Option<PathBuf>,
    /// Use a seeded Haar-random unitary of this dimension instead.
    #[arg(long)]
    random_u: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Counter register size; 2^n1 bins.
    #[arg(long)]
    n1: usize,
    /// Structure function instead of the spectral density.
    #[arg(long)]
    structure: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: SeriesFormat,
    #[arg(long, value_enum, default_value = "direct")]
    method: SpectrumMethod,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Text,
}

#[derive(Args)]
struct SynthArgs {
    /// System dimension N.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, value_enum, default_value = "json")]
    emit: Emit,
    /// Compare against the dense operator; result goes to stderr.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, value_enum, default_value = "synth")]
    method: Method,
    /// Write one CSV per state here instead of stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<(usize, usize), String> {
    let (q, p) = s
        .split_once(',')
        .ok_or_else(|| format!("expected q,p, got '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("'{v}': {e}"));
    Ok((parse(q)?, parse(p)?))
}

/// Failure categories, each with its own exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Verify(f64),
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Verify(_) => "verification",
            Failure::Lib(e) => match e {
                Error::Parse(_) | Error::Json(_) => "parse",
                Error::DimensionMismatch { .. } | Error::NotPowerOfTwo(_) => "dimension",
                Error::QubitBudget { .. } => "budget",
                Error::Io(_) => "io",
                _ => "input",
            },
        }
    }

    fn code(&self) -> u8 {
        match self.kind() {
            "usage" => 2,
            "parse" => 3,
            "dimension" => 4,
            "budget" => 5,
            "input" => 6,
            "io" => 7,
            _ => 8,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
            Failure::Verify(err) => {
                format!("synthesized circuit differs from the dense operator by {err:e}")
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
        .into()
    })
}

fn load_density(path: &Path) -> CliResult<DensityMatrix> {
    Ok(DensityMatrix::new(parse_matrix(&read(path)?)?)?)
}

fn load_unitary(path: &Path) -> CliResult<UnitaryOperator> {
    Ok(UnitaryOperator::new(parse_matrix(&read(path)?)?)?)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(t) if t > 0 => t,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "{THREADS_ENV} must be a positive integer, got '{raw}'"
            ))
            .into())
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")).into())
}

fn grid_by(rho: &DensityMatrix, method: Method) -> CliResult<WignerGrid> {
    Ok(match method {
        Method::Direct => wigner_direct(rho)?,
        Method::Circuit => wigner_grid_via_circuit(rho)?,
        Method::Synth => wigner_grid_via_synthesis(rho)?,
    })
}

fn point_by(rho: &DensityMatrix, alpha: PhasePoint, method: Method) -> CliResult<f64> {
    Ok(match method {
        Method::Direct => PhaseSpace::new(rho.dim())?
            .wigner(rho)?
            .get(alpha.q, alpha.p),
        Method::Circuit => wigner_via_circuit(rho, alpha)?,
        Method::Synth => {
            let seq = synth_phase_point_circuit(alpha)?;
            scatter_through(rho, seq.circuit())?.sigma_z / (2 * alpha.n) as f64
        }
    })
}

fn scatter(args: &ScatterArgs) -> CliResult<String> {
    let rho = load_density(&args.rho)?;
    let u = load_unitary(&args.u)?;
    let out = scattering_circuit(&rho, &u)?;
    let tr = out.trace_estimate();
    let body = json!({
        "sigma_z": round_sig(out.sigma_z),
        "sigma_x": round_sig(out.sigma_x),
        "re_trace": round_sig(tr.re),
        "im_trace": round_sig(tr.im),
    });
    Ok(format!("{body}\n"))
}

fn wigner(args: &WignerArgs) -> CliResult<String> {
    let mut rho = load_density(&args.rho)?;
    if let Some(p) = args.noise {
        rho = depolarize(&rho, p)?;
    }
    if let Some((q, p)) = args.point {
        let alpha = PhasePoint::new(q, p, rho.dim())?;
        let w = point_by(&rho, alpha, args.method)?;
        return match args.format {
            GridFormat::Csv => Ok(format!("q,p,w\n{q},{p},{}\n", fmt_sig(w))),
            GridFormat::Json => Ok(format!("{}\n", json!({"q": q, "p": p, "w": round_sig(w)}))),
            GridFormat::Ascii => Err(Failure::Usage(
                "--format ascii needs the whole grid, drop --point".into(),
            )),
        };
    }
    let grid = grid_by(&rho, args.method)?;
    Ok(match args.format {
        GridFormat::Csv => grid_to_csv(&grid),
        GridFormat::Json => format!("{}\n", grid_to_json(&grid)),
        GridFormat::Ascii => grid_to_ascii(&grid),
    })
}

fn spectrum(args: &SpectrumArgs) -> CliResult<String> {
    let u = match (&args.u, args.random_u) {
        (Some(path), _) => load_unitary(path)?,
        (None, Some(dim)) => {
            if dim == 0 {
                return Err(
                    Error::InvalidArgument("--random-u needs a positive dimension".into()).into(),
                );
            }
            haar_unitary(dim, &mut seeded_rng(args.seed))
        }
        (None, None) => {
            return Err(Failure::Usage(
                "one of --u or --random-u is required".into(),
            ))
        }
    };
    let series = match (args.structure, args.method) {
        (true, SpectrumMethod::Direct) => structure_function(&u, args.n1)?,
        (true, SpectrumMethod::Circuit) => {
            return Err(Failure::Usage(
                "--structure is only available with --method direct".into(),
            ))
        }
        (false, SpectrumMethod::Direct) => spectral_density(&u, args.n1)?,
        (false, SpectrumMethod::Circuit) => spectral_density_via_circuit(&u, args.n1)?,
    };
    Ok(match args.format {
        SeriesFormat::Csv => series_to_csv(&series),
        SeriesFormat::Json => format!("{}\n", series_to_json(&series)),
    })
}

fn synth(args: &SynthArgs) -> CliResult<(String, Option<String>)> {
    let alpha = PhasePoint::new(args.q, args.p, args.n)?;
    let seq = synth_phase_point_circuit(alpha)?;
    let out = match args.emit {
        Emit::Json => format!("{}\n", circuit_to_json(seq.circuit())),
        Emit::Text => {
            let mut s = format!(
                "# qubits={} system={} work={} gates={}\n",
                seq.num_qubits(),
                seq.num_system_qubits(),
                seq.num_work_qubits(),
                seq.len()
            );
            for g in seq.gates() {
                let targets: Vec<String> = g.targets.iter().map(usize::to_string).collect();
                write!(s, "{} {}", g.kind.name(), targets.join(" ")).unwrap();
                if let qscatter::circuit::GateKind::PhaseShift(t)
                | qscatter::circuit::GateKind::ControlledPhase(t) = g.kind
                {
                    write!(s, " theta={}", fmt_sig(t)).unwrap();
                }
                s.push('\n');
            }
            s
        }
    };
    if !args.verify {
        return Ok((out, None));
    }
    let err = seq.verify_against(&phase_point_unitary(alpha))?;
    if err >= 1e-12 {
        return Err(Failure::Verify(err));
    }
    let note = json!({"verify": "ok", "max_error": round_sig(err), "gates": seq.len()});
    Ok((out, Some(note.to_string())))
}

fn state_label(label: usize) -> String {
    format!("|{}{}>", label >> 1, label & 1)
}

fn demo_fig3(args: &DemoArgs) -> CliResult<String> {
    let grids = (0..4)
        .map(|label| grid_by(&pseudo_pure(label, 4, args.noise)?, args.method))
        .collect::<CliResult<Vec<_>>>()?;
    match &args.out_dir {
        None => {
            let mut out = String::new();
            for (label, grid) in grids.iter().enumerate() {
                writeln!(out, "# state={}", state_label(label)).unwrap();
                out.push_str(&grid_to_csv(grid));
            }
            Ok(out)
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(Error::Io)?;
            let mut out = String::new();
            for (label, grid) in grids.iter().enumerate() {
                let path = dir.join(format!("fig3_{}{}.csv", label >> 1, label & 1));
                fs::write(&path, grid_to_csv(grid)).map_err(Error::Io)?;
                writeln!(out, "{}", path.display()).unwrap();
            }
            Ok(out)
        }
    }
}

fn run(cli: &Cli) -> CliResult<(String, Option<String>)> {
    configure_threads()?;
    match &cli.command {
        Command::Scatter(a) => scatter(a).map(|s| (s, None)),
        Command::Wigner(a) => wigner(a).map(|s| (s, None)),
        Command::Spectrum(a) => spectrum(a).map(|s| (s, None)),
        Command::Synth(a) => synth(a),
        Command::DemoFig3(a) => demo_fig3(a).map(|s| (s, None)),
    }
}

fn report(f: &Failure) -> ExitCode {
    let line = json!({"error": f.kind(), "code": f.code(), "message": f.message()});
    eprintln!("{line}");
    ExitCode::from(f.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e
                .to_string()
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            return report(&Failure::Usage(first));
        }
    };
    match run(&cli) {
        Ok((out, note)) => {
            print!("{out}");
            if let Some(note) = note {
                eprintln!("{note}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => report(&f),
    }
}
