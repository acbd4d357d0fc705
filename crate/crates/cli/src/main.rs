//! cylwalk: data-file front end for the cylinder quantum walk.
//!
//! Every subcommand writes plot-ready CSV or JSON files into --output and
//! prints one "wrote <path>" line per file. Exit codes: 0 success, 2 invalid
//! argument, 3 window overflow, 4 I/O failure.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cylwalk::{
    asymptotic_rho, asymptotic_rho_infinite, band_census, coin_matrix, continuum_convergence,
    dispersion, entropy_series_with_coins, export, group_velocity_general, localized_state,
    midpoint_k_grid, von_neumann_entropy, BlochInitialState, CoinAngles, QuasiMomentumGrid,
    Result, WalkError,
};

const DEFAULT_BLOCH: f64 = std::f64::consts::FRAC_PI_2;
const DEFAULT_COIN: f64 = std::f64::consts::FRAC_PI_4;

/// k-grid resolution of the dispersion table; midpoints of a uniform
/// subdivision of (-pi, pi), so band-touching momenta are never sampled.
const DISPERSION_K_POINTS: usize = 256;

#[derive(Parser)]
#[command(
    name = "cylwalk",
    version,
    about = "Quantum walk on a cylinder: evolution, band structure, entanglement, continuum limit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a localized state and write P(m) and P(m, l)
    Evolve(EvolveArgs),
    /// Tabulate the band structure over the Brillouin zone
    Dispersion(DispersionArgs),
    /// Count distinct dispersion curves and flag flat bands
    Census(CensusArgs),
    /// Track coin-position entanglement entropy over time
    Entropy(EntropyArgs),
    /// Closed-form long-time coin state and its entropy
    Asymptotic(AsymptoticArgs),
    /// Convergence of walk evolution to the Dirac propagator
    Continuum(ContinuumArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EvolveArgs {
    /// Circumference of the closed direction
    #[arg(long = "Q", value_name = "Q", default_value_t = 4)]
    q_nodes: usize,
    /// Number of walk steps
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Bloch polar angle of the initial coin spinor
    #[arg(long, default_value_t = DEFAULT_BLOCH)]
    theta: f64,
    /// Bloch azimuthal angle of the initial coin spinor
    #[arg(long, default_value_t = DEFAULT_BLOCH)]
    phi: f64,
    /// Coin mixing angle for the open direction
    #[arg(long = "theta-x", default_value_t = DEFAULT_COIN)]
    theta_x: f64,
    /// Coin mixing angle for the closed direction
    #[arg(long = "theta-y", default_value_t = DEFAULT_COIN)]
    theta_y: f64,
    /// Half-width of the simulated strip (defaults to the step count)
    #[arg(long)]
    window: Option<i64>,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct DispersionArgs {
    #[arg(long = "Q", value_name = "Q", default_value_t = 4)]
    q_nodes: usize,
    #[arg(long = "theta-x", default_value_t = DEFAULT_COIN)]
    theta_x: f64,
    #[arg(long = "theta-y", default_value_t = DEFAULT_COIN)]
    theta_y: f64,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long = "Q", value_name = "Q", default_value_t = 4)]
    q_nodes: usize,
    #[arg(long = "theta-x", default_value_t = DEFAULT_COIN)]
    theta_x: f64,
    #[arg(long = "theta-y", default_value_t = DEFAULT_COIN)]
    theta_y: f64,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long = "Q", value_name = "Q", default_value_t = 4)]
    q_nodes: usize,
    #[arg(long, default_value_t = 500)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_BLOCH)]
    theta: f64,
    #[arg(long, default_value_t = DEFAULT_BLOCH)]
    phi: f64,
    #[arg(long = "theta-x", default_value_t = DEFAULT_COIN)]
    theta_x: f64,
    #[arg(long = "theta-y", default_value_t = DEFAULT_COIN)]
    theta_y: f64,
    /// Also scan the long-time entropy over the whole Bloch sphere
    #[arg(long)]
    scan: bool,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct AsymptoticArgs {
    #[arg(long = "Q", value_name = "Q", default_value_t = 4)]
    q_nodes: usize,
    #[arg(long, default_value_t = DEFAULT_BLOCH)]
    theta: f64,
    #[arg(long, default_value_t = DEFAULT_BLOCH)]
    phi: f64,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ContinuumArgs {
    #[arg(long = "Q", value_name = "Q", default_value_t = 8)]
    q_nodes: usize,
    /// Index of the transverse mode whose momentum acts as the mass
    #[arg(long = "q-index", default_value_t = 1)]
    q_index: usize,
    /// Physical width of the Gaussian wavepacket
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    /// Physical evolution time; must be an integer multiple of each epsilon
    #[arg(long = "t-final", default_value_t = 1.0)]
    t_final: f64,
    /// Halving sequence of lattice spacings
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.0625,0.03125,0.015625,0.0078125"
    )]
    epsilons: Vec<f64>,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Evolve(args) => run_evolve(args),
        Command::Dispersion(args) => run_dispersion(args),
        Command::Census(args) => run_census(args),
        Command::Entropy(args) => run_entropy(args),
        Command::Asymptotic(args) => run_asymptotic(args),
        Command::Continuum(args) => run_continuum(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                WalkError::WindowOverflow { .. } => 3,
                WalkError::Io(_) => 4,
                _ => 2,
            })
        }
    }
}

fn require_format(actual: Format, supported: Format, subcommand: &str) -> Result<()> {
    if actual != supported {
        let name = match supported {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        return Err(WalkError::InvalidArgument(format!(
            "{subcommand} only writes {name} output"
        )));
    }
    Ok(())
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(WalkError::InvalidArgument(format!(
            "{name} must be finite, got {value}"
        )));
    }
    Ok(())
}

fn write_csv<F>(dir: &Path, name: &str, fill: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>,
{
    let path = dir.join(name);
    let mut writer = BufWriter::new(fs::File::create(&path)?);
    fill(&mut writer)?;
    writer.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_evolve(args: EvolveArgs) -> Result<()> {
    require_format(args.format, Format::Csv, "evolve")?;
    check_finite("--theta-x", args.theta_x)?;
    check_finite("--theta-y", args.theta_y)?;
    let coin_x = coin_matrix(CoinAngles::balanced_phases(args.theta_x))?;
    let coin_y = coin_matrix(CoinAngles::balanced_phases(args.theta_y))?;
    let window = args.window.unwrap_or(args.steps as i64);
    let state = localized_state(
        args.q_nodes,
        window,
        &BlochInitialState::new(args.theta, args.phi),
    )?
    .evolve(args.steps, &coin_x, &coin_y)?;
    fs::create_dir_all(&args.output)?;
    let marginal = state.marginal_probability();
    write_csv(&args.output, "marginal.csv", |w| {
        export::write_marginal_csv(w, &marginal)
    })?;
    let joint = state.probability();
    write_csv(&args.output, "joint.csv", |w| {
        export::write_joint_csv(w, &joint)
    })
}

fn run_dispersion(args: DispersionArgs) -> Result<()> {
    require_format(args.format, Format::Csv, "dispersion")?;
    check_finite("--theta-x", args.theta_x)?;
    check_finite("--theta-y", args.theta_y)?;
    let grid = QuasiMomentumGrid::new(args.q_nodes)?;
    let ks = midpoint_k_grid(DISPERSION_K_POINTS);
    let mut rows = Vec::with_capacity(args.q_nodes * ks.len());
    for &q in grid.values() {
        for &k in &ks {
            let (omega_plus, omega_minus) = dispersion(k, q, args.theta_x, args.theta_y);
            let velocity = group_velocity_general(k, q, args.theta_x, args.theta_y)?;
            rows.push((k, q, omega_plus, omega_minus, velocity));
        }
    }
    fs::create_dir_all(&args.output)?;
    write_csv(&args.output, "dispersion.csv", |w| {
        export::write_band_csv(w, &rows)
    })
}

fn run_census(args: CensusArgs) -> Result<()> {
    require_format(args.format, Format::Json, "census")?;
    check_finite("--theta-x", args.theta_x)?;
    check_finite("--theta-y", args.theta_y)?;
    let census = band_census(args.q_nodes, args.theta_x, args.theta_y)?;
    fs::create_dir_all(&args.output)?;
    write_text(&args.output, "census.json", &export::census_json_string(&census))
}

fn run_entropy(args: EntropyArgs) -> Result<()> {
    require_format(args.format, Format::Csv, "entropy")?;
    check_finite("--theta-x", args.theta_x)?;
    check_finite("--theta-y", args.theta_y)?;
    let records = entropy_series_with_coins(
        args.q_nodes,
        &BlochInitialState::new(args.theta, args.phi),
        args.steps,
        CoinAngles::balanced_phases(args.theta_x),
        CoinAngles::balanced_phases(args.theta_y),
    )?;
    fs::create_dir_all(&args.output)?;
    write_csv(&args.output, "entropy.csv", |w| {
        export::write_entropy_series_csv(w, &records)
    })?;
    if args.scan {
        let mut rows = Vec::with_capacity(181 * 361);
        for i in 0..=180usize {
            let theta = std::f64::consts::PI * i as f64 / 180.0;
            for j in 0..=360usize {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / 360.0;
                let rho = asymptotic_rho(args.q_nodes, theta, phi)?;
                rows.push((theta, phi, von_neumann_entropy(&rho.rho)?));
            }
        }
        write_csv(&args.output, "bloch.csv", |w| {
            export::write_bloch_scan_csv(w, &rows)
        })?;
    }
    Ok(())
}

fn run_asymptotic(args: AsymptoticArgs) -> Result<()> {
    require_format(args.format, Format::Json, "asymptotic")?;
    let finite = asymptotic_rho(args.q_nodes, args.theta, args.phi)?;
    let entropy = von_neumann_entropy(&finite.rho)?;
    let rho_infinite = asymptotic_rho_infinite(args.theta, args.phi);
    let entropy_infinite = von_neumann_entropy(&rho_infinite)?;
    fs::create_dir_all(&args.output)?;
    write_text(
        &args.output,
        "asymptotic.json",
        &export::asymptotic_json_string(
            args.q_nodes,
            args.theta,
            args.phi,
            &finite,
            entropy,
            &rho_infinite,
            entropy_infinite,
        ),
    )
}

fn run_continuum(args: ContinuumArgs) -> Result<()> {
    let report = continuum_convergence(
        args.q_nodes,
        args.q_index,
        args.width,
        args.t_final,
        &args.epsilons,
    )?;
    fs::create_dir_all(&args.output)?;
    match args.format {
        Format::Csv => write_csv(&args.output, "convergence.csv", |w| {
            export::write_convergence_csv(w, &report)
        }),
        Format::Json => write_text(
            &args.output,
            "convergence.json",
            &export::convergence_json_string(&report),
        ),
    }
}
