//! `h1b`: batch driver for the numerical experiments.
//!
//! Every subcommand computes all of its outputs in memory first and writes
//! them only on success, so a failed run leaves the output directory untouched.
//!
//! Exit codes: 0 success, 1 malformed input (flags, curve files, manifests),
//! 2 violated precondition or I/O failure, 3 numerical invariant failure.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lipschitz_h1b::Error;

#[derive(Debug, Parser)]
#[command(
    name = "h1b",
    version,
    about = "Cauchy integrals, H1_b factorization and commutator experiments on Lipschitz graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare the flat-curve operator with the Hilbert transform of χ_[−1,1].
    HilbertCheck {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Two-bump atomic decomposition swept over the separation M.
    TwoBump {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Comma-separated separations.
        #[arg(long, value_delimiter = ',', default_values_t = [128.0, 256.0, 512.0, 1024.0])]
        m_list: Vec<f64>,
    },
    /// Approximate factorization of one atom, swept over M.
    FactorAtom {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0])]
        m_list: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Shape::Odd)]
        atom: Shape,
    },
    /// Iterative weak factorization of an initial atom or two-bump function.
    WeakFactorize {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Run manifest; replaces the curve, eps, stages and atom flags.
        #[arg(long, conflicts_with_all = ["curve", "eps", "stages", "atom", "center", "radius"])]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 4)]
        stages: usize,
        #[arg(long, value_enum, default_value_t = Shape::Odd)]
        atom: Shape,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        center: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Commutator norm against the BMO norm of each study symbol.
    ///
    /// Randomness: one ChaCha8 generator seeded by `--seed`; symbol `k`
    /// (in listing order) draws its probe seed as the first word of stream `k`.
    CommutatorStudy {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Random probes for p ≠ 2.
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Cauchy)]
        variant: VariantArg,
    },
    /// Leading singular values of the commutator on a window.
    CompactnessProfile {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, default_value_t = 10)]
        rank_cap: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        window_center: f64,
        #[arg(long, default_value_t = 1.0)]
        window_radius: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::Cauchy)]
        variant: VariantArg,
    },
    /// Small-scale, large-scale and far-field oscillation of each study symbol.
    VmoProfile {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0])]
        scales: Vec<f64>,
    },
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// `flat`, `tent`, or a curve-spec file.
    #[arg(long, default_value = "flat")]
    curve: String,
}

/// Grid overrides; unset fields fall back to per-command defaults.
#[derive(Debug, Args, Clone, Copy)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    grid_left: Option<f64>,
    #[arg(long)]
    grid_spacing: Option<f64>,
    #[arg(long)]
    grid_count: Option<usize>,
}

#[derive(Debug, Args)]
struct OutArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Shape {
    Odd,
    Even,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Cauchy,
    Related,
}

/// Why a run failed.
#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_parse() => 1,
            Failure::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    fn report(&self) {
        match self {
            Failure::Core(Error::Numerical { invariant, detail }) => {
                eprintln!("error: invariant `{invariant}` violated: {detail}")
            }
            Failure::Core(e @ Error::NonConvergence { .. }) => {
                eprintln!("error: invariant `convergence` violated: {e}")
            }
            Failure::Core(e) => eprintln!("error: {e}"),
            Failure::Io(msg) => eprintln!("error: {msg}"),
        }
    }
}

/// Named CSV files plus lines for the terminal.
#[derive(Debug, Default)]
struct Outputs {
    files: Vec<(String, String)>,
    notes: Vec<String>,
}

impl Outputs {
    fn file(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }

    fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }
}

fn write_outputs(dir: &Path, outputs: &Outputs) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
    for (name, body) in &outputs.files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (out_dir, outputs) = match cli.command {
        Command::HilbertCheck { grid, out } => (out.out, commands::hilbert_check(grid)?),
        Command::TwoBump {
            curve,
            grid,
            out,
            m_list,
        } => (out.out, commands::two_bump(&curve.curve, grid, &m_list)?),
        Command::FactorAtom {
            curve,
            grid,
            out,
            m_list,
            atom,
        } => (out.out, commands::factor_atom(&curve.curve, grid, &m_list, atom)?),
        Command::WeakFactorize {
            curve,
            grid,
            out,
            manifest,
            eps,
            stages,
            atom,
            center,
            radius,
        } => {
            let config = match manifest {
                Some(path) => commands::WeakConfig::from_manifest(&path)?,
                None => commands::WeakConfig::from_flags(&curve.curve, eps, stages, atom, center, radius)?,
            };
            (out.out, commands::weak_factorize(config, grid)?)
        }
        Command::CommutatorStudy {
            curve,
            grid,
            out,
            p,
            trials,
            variant,
        } => (
            out.out,
            commands::commutator_study(&curve.curve, grid, p, trials, out.seed, variant)?,
        ),
        Command::CompactnessProfile {
            curve,
            grid,
            out,
            rank_cap,
            window_center,
            window_radius,
            variant,
        } => (
            out.out,
            commands::compactness_profile(&curve.curve, grid, rank_cap, window_center, window_radius, variant)?,
        ),
        Command::VmoProfile { grid, out, scales } => (out.out, commands::vmo_profile(grid, &scales)?),
    };
    write_outputs(&out_dir, &outputs)?;
    for line in &outputs.notes {
        println!("{line}");
    }
    for (name, _) in &outputs.files {
        println!("wrote {}", out_dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.exit_code())
        }
    }
}
