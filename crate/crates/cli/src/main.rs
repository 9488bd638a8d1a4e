//! `toric-zeros`: experiment runner for conditional Szegő kernels, decay
//! functions, zero currents and random zero statistics.

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, ExperimentConfig, Grid, Tolerances};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "toric-zeros", version, about = "Szegő kernels, decay functions and zero statistics for polytope ensembles")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "TORIC_ZEROS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Top,
}

#[derive(Subcommand, Debug)]
enum Top {
    /// Polytope structure and lattice-point counts.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Decay function b_P on a ρ-grid.
    #[command(subcommand)]
    Bp(GridOnly),
    /// Allowed / forbidden labels on a ρ-grid.
    #[command(subcommand)]
    Region(GridOnly),
    /// Conditional Szegő kernel diagonal.
    #[command(subcommand)]
    Szego(SzegoCmd),
    /// Polytope characters.
    #[command(subcommand)]
    Character(CharacterCmd),
    /// Limit zero current ψ_P.
    #[command(subcommand)]
    Psi(PsiCmd),
    /// Monte Carlo zero statistics.
    #[command(subcommand)]
    Ensemble(EnsembleCmd),
    /// Run a JSON experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Re-run the config echoed in the header of an earlier output file.
    Replay {
        #[arg(long)]
        from: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output CSV path (stdout if omitted).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PolyArg {
    /// Polytope JSON file `{"m": .., "p": .., "vertices": [[..], ..]}`.
    #[arg(long)]
    polytope: PathBuf,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    rho_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    rho_max: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 61)]
    steps: usize,
}

#[derive(Args, Debug)]
struct TolArgs {
    /// Width of the numerical band around transition sets.
    #[arg(long)]
    transition_tol: Option<f64>,
    /// Finite-difference step in ρ for ψ_P.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Relative eigenvalue threshold for the rank of ψ_P.
    #[arg(long)]
    rank_threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct GridCmdArgs {
    #[command(flatten)]
    poly: PolyArg,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Subcommand, Debug)]
enum PolytopeCmd {
    /// Vertices, facets, faces and volume.
    Info {
        #[command(flatten)]
        poly: PolyArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Ehrhart coefficients, leading first.
    Ehrhart {
        #[command(flatten)]
        poly: PolyArg,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
enum GridOnly {
    Grid(GridCmdArgs),
}

#[derive(Subcommand, Debug)]
enum SzegoCmd {
    /// |u_N − u_∞| at one point for several N.
    Converge {
        #[command(flatten)]
        poly: PolyArg,
        /// Point in ρ = log|z|, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<f64>,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n_list: Vec<i64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Expected FS mass density on a grid for each N.
    MassGrid {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n_list: Vec<i64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let (re, im) = s.split_once(':').unwrap_or((s, "0"));
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    Ok([p(re)?, p(im)?])
}

#[derive(Subcommand, Debug)]
enum CharacterCmd {
    /// χ_{NP}(e^w) for several N.
    Table {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n_list: Vec<i64>,
        /// One `re:im` per coordinate.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, required = true)]
        w: Vec<[f64; 2]>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Truncated Todd formula against the exact sum over N·[a, b].
    Todd1d {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long = "N")]
        n: i64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: [f64; 2],
        #[arg(long, default_value_t = 12)]
        max_order: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
enum PsiCmd {
    /// Coefficient matrix and eigenvalues of ψ_P on a grid.
    Grid(GridCmdArgs),
    /// Rank of ψ_P on a grid.
    RankMap(GridCmdArgs),
    /// Total mass of ψ_P^m against m!·Vol(P).
    BkCheck {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    #[command(flatten)]
    poly: PolyArg,
    #[arg(long = "N")]
    n: i64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Subcommand, Debug)]
enum EnsembleCmd {
    /// Allowed fraction and radial histogram of zeros for m = 1.
    M1(EnsembleArgs),
    /// Allowed fraction of free tentacles per facet for m = 2.
    Tentacles {
        #[command(flatten)]
        args: EnsembleArgs,
        /// 0: x_1 + x_2 = p, 1: x_1 = 0, 2: x_2 = 0; all facets if omitted.
        #[arg(long)]
        facet: Option<usize>,
    },
}

fn path_string(p: &std::path::Path) -> String {
    p.to_string_lossy().into_owned()
}

fn with_poly(command: Command, poly: &PolyArg) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(command);
    c.polytope_path = Some(path_string(&poly.polytope));
    c
}

fn grid_of(g: &GridArgs) -> Grid {
    Grid {
        rho_min: g.rho_min,
        rho_max: g.rho_max,
        steps: g.steps,
    }
}

fn grid_config(command: Command, a: &GridCmdArgs) -> (ExperimentConfig, Option<PathBuf>) {
    let mut c = with_poly(command, &a.poly);
    c.grid = Some(grid_of(&a.grid));
    c.tolerances = Tolerances {
        transition: a.tol.transition_tol,
        fd_step: a.tol.fd_step,
        rank_threshold: a.tol.rank_threshold,
    };
    (c, a.out.out.clone())
}

fn ensemble_config(command: Command, a: &EnsembleArgs) -> ExperimentConfig {
    let mut c = with_poly(command, &a.poly);
    c.n = Some(a.n);
    c.samples = Some(a.samples);
    c.seed = Some(a.seed);
    c
}

fn read_config(path: &std::path::Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

fn replay_config(path: &std::path::Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let line = table::config_line(&text).ok_or_else(|| CliError::Config(format!("{} has no config header", path.display())))?;
    ExperimentConfig::from_json(line)
}

/// Maps the command line onto an experiment config and an output path.
fn to_config(cmd: Top) -> Result<(ExperimentConfig, Option<PathBuf>), CliError> {
    Ok(match cmd {
        Top::Polytope(PolytopeCmd::Info { poly, out }) => (with_poly(Command::PolytopeInfo, &poly), out.out),
        Top::Polytope(PolytopeCmd::Ehrhart { poly, out }) => (with_poly(Command::PolytopeEhrhart, &poly), out.out),
        Top::Bp(GridOnly::Grid(a)) => grid_config(Command::BpGrid, &a),
        Top::Region(GridOnly::Grid(a)) => grid_config(Command::RegionGrid, &a),
        Top::Szego(SzegoCmd::Converge { poly, point, n_list, out }) => {
            let mut c = with_poly(Command::SzegoConverge, &poly);
            c.point = Some(point);
            c.n_list = Some(n_list);
            (c, out.out)
        }
        Top::Szego(SzegoCmd::MassGrid { poly, n_list, grid, out }) => {
            let mut c = with_poly(Command::SzegoMassGrid, &poly);
            c.n_list = Some(n_list);
            c.grid = Some(grid_of(&grid));
            (c, out.out)
        }
        Top::Character(CharacterCmd::Table { poly, n_list, w, out }) => {
            let mut c = with_poly(Command::CharacterTable, &poly);
            c.n_list = Some(n_list);
            c.w = Some(w);
            (c, out.out)
        }
        Top::Character(CharacterCmd::Todd1d { a, b, n, w, max_order, out }) => {
            let mut c = ExperimentConfig::new(Command::CharacterTodd1d);
            c.interval = Some([a, b]);
            c.n = Some(n);
            c.w = Some(vec![w]);
            c.max_order = Some(max_order);
            (c, out.out)
        }
        Top::Psi(PsiCmd::Grid(a)) => grid_config(Command::PsiGrid, &a),
        Top::Psi(PsiCmd::RankMap(a)) => grid_config(Command::PsiRankMap, &a),
        Top::Psi(PsiCmd::BkCheck { poly, resolution, out }) => {
            let mut c = with_poly(Command::PsiBkCheck, &poly);
            c.resolution = Some(resolution);
            (c, out.out)
        }
        Top::Ensemble(EnsembleCmd::M1(a)) => {
            let out = a.out.out.clone();
            (ensemble_config(Command::EnsembleM1, &a), out)
        }
        Top::Ensemble(EnsembleCmd::Tentacles { args, facet }) => {
            let mut c = ensemble_config(Command::EnsembleTentacles, &args);
            c.facet = facet;
            (c, args.out.out.clone())
        }
        Top::Run { config, out } => {
            let c = read_config(&config)?;
            let out = out.out.or_else(|| c.out_path.clone().map(PathBuf::from));
            (c, out)
        }
        Top::Replay { from, out } => (replay_config(&from)?, out.out),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let (config, out) = to_config(cli.command)?;
    let table = commands::execute(&config)?;
    table.write(&config, out.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("toric-zeros: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
