use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contextuality::bertrand::BertrandProtocol;
use contextuality::collision::DetectorAssignment;
use contextuality::Density;

mod commands;
mod grid;
mod output;

use output::Format;

/// Hidden-variable simulations, Bell/CHSH checks and marginal feasibility.
///
/// Every run is reproducible from `--seed`; output does not depend on
/// `--threads`. Usage and input errors exit with status 2. Violated
/// inequalities and infeasible problems are results and exit with status 0.
#[derive(Debug, Parser)]
#[command(name = "contextuality", version)]
struct Cli {
    /// Root seed for all random streams.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Trials per estimate (pairs for `protocols`).
    #[arg(long, global = true, default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,

    /// Output format; `sweep` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random-chord probabilities under the three sampling protocols.
    Bertrand {
        /// offset, endpoints, midpoint or all.
        #[arg(long, default_value = "all", value_parser = parse_protocol)]
        protocol: Choice<BertrandProtocol>,
    },
    /// Two-ball collision with threshold detectors.
    Collision {
        /// Detector on D1 and D2 such as A:B, or `all` for the A:B, A:C, B:C
        /// triple and its Bell report.
        #[arg(long, default_value = "all", value_parser = parse_pair)]
        pair: Choice<DetectorAssignment>,
        #[command(flatten)]
        setup: CollisionArgs,
    },
    /// CHSH correlations for the singlet, a model file or all deterministic
    /// strategies.
    #[command(group = clap::ArgGroup::new("source").required(true).args(["singlet", "model", "enumerate_deterministic"]))]
    Chsh {
        /// Use the contextual singlet model.
        #[arg(long)]
        singlet: bool,
        /// Analyzer angles x1,x2,y1,y2 in degrees.
        #[arg(long, default_value = "0,90,45,135", requires = "singlet", value_parser = grid::parse_four)]
        angles: [f64; 4],
        /// Model JSON file.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Setting ids x1,x2,y1,y2 in the model (default: the first two on
        /// each wing).
        #[arg(long, requires = "model", value_parser = grid::parse_four_ids)]
        settings: Option<[u32; 4]>,
        /// Exact CHSH values of the 16 deterministic local strategies.
        #[arg(long)]
        enumerate_deterministic: bool,
    },
    /// Decide whether pair moments extend to a joint distribution.
    Feasibility {
        /// Problem JSON file.
        problem: PathBuf,
    },
    /// Coincidence protocol against the repeated-measurement protocol.
    #[command(group = clap::ArgGroup::new("source").required(true).args(["model", "builtin"]))]
    Protocols {
        /// Model JSON file.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<commands::Builtin>,
        /// Setting on wing A (default: the model's first).
        #[arg(long)]
        x: Option<u32>,
        /// Setting on wing B (default: the model's first).
        #[arg(long)]
        y: Option<u32>,
        /// Repeated measurements per wing and pair.
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
        repeats: u32,
    },
    /// Correlation against a parameter grid, as plot data.
    Sweep {
        #[command(subcommand)]
        target: SweepTarget,
    },
}

#[derive(Debug, Subcommand)]
enum SweepTarget {
    /// Singlet `E(0, θ)` over angle differences θ in degrees.
    Singlet {
        /// `start:stop:step` (inclusive) or a comma list.
        #[arg(long, default_value = "0:180:15")]
        grid: String,
    },
    /// Collision correlation over restitution coefficients.
    Collision {
        /// `start:stop:step` (inclusive) or a comma list.
        #[arg(long, default_value = "1")]
        grid: String,
        #[arg(long, default_value = "A:B", value_parser = parse_assignment)]
        pair: DetectorAssignment,
        #[command(flatten)]
        setup: CollisionArgs,
    },
}

#[derive(Debug, Args)]
struct CollisionArgs {
    /// Launch-speed law, `uniform:LO:HI` or `triangular:LO:HI`.
    #[arg(long, default_value = "uniform:0:10")]
    density: Density,
    #[arg(long, default_value_t = 1.0)]
    restitution: f64,
    #[arg(long, default_value_t = 1.0)]
    light_mass: f64,
    #[arg(long, default_value_t = 4.0)]
    heavy_mass: f64,
}

/// A single value or `all`.
#[derive(Debug, Clone, Copy)]
struct Choice<T>(Option<T>);

fn parse_choice<T: std::str::FromStr<Err = String>>(s: &str) -> Result<Choice<T>, String> {
    if s == "all" {
        return Ok(Choice(None));
    }
    s.parse().map(|v| Choice(Some(v)))
}

fn parse_protocol(s: &str) -> Result<Choice<BertrandProtocol>, String> {
    parse_choice(s)
}

fn parse_pair(s: &str) -> Result<Choice<DetectorAssignment>, String> {
    parse_choice(s)
}

fn parse_assignment(s: &str) -> Result<DetectorAssignment, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(t))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = commands::RunContext {
        seed: cli.seed,
        n: cli.n,
    };
    let (report, default_format) = match run(&cli.command, &ctx) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match report
        .write(cli.format.unwrap_or(default_format), &mut out)
        .and_then(|()| out.flush())
    {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: &Command, ctx: &commands::RunContext) -> Result<(output::Report, Format), String> {
    let json = |r: Result<output::Report, String>| r.map(|r| (r, Format::Json));
    match command {
        Command::Bertrand { protocol } => json(commands::bertrand(ctx, protocol.0)),
        Command::Collision { pair, setup } => json(commands::collision(ctx, pair.0, &setup.config()?)),
        Command::Chsh {
            singlet,
            angles,
            model,
            settings,
            enumerate_deterministic,
        } => json(if *enumerate_deterministic {
            Ok(commands::chsh_enumerate())
        } else if *singlet {
            commands::chsh_singlet(ctx, *angles)
        } else {
            let path = model.as_ref().expect("clap requires one source");
            commands::chsh_model(ctx, &commands::load_model(path)?, *settings)
        }),
        Command::Feasibility { problem } => json(commands::feasibility(problem)),
        Command::Protocols {
            model,
            builtin,
            x,
            y,
            repeats,
        } => json(commands::protocols(ctx, model.as_deref(), *builtin, *x, *y, *repeats)),
        Command::Sweep { target } => {
            let report = match target {
                SweepTarget::Singlet { grid } => commands::sweep_singlet(ctx, &grid::parse_grid(grid)?),
                SweepTarget::Collision { grid, pair, setup } => {
                    commands::sweep_collision(ctx, &grid::parse_grid(grid)?, pair, &setup.config()?)
                }
            }?;
            Ok((report, Format::Csv))
        }
    }
}

impl CollisionArgs {
    fn config(&self) -> Result<contextuality::collision::CollisionConfig, String> {
        contextuality::collision::CollisionConfig::new(
            self.light_mass,
            self.heavy_mass,
            self.density,
            self.restitution,
        )
        .map_err(|e| e.to_string())
    }
}
