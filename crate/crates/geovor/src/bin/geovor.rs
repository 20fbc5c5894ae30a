use clap::{Parser, Subcommand, ValueEnum};
use geovor::bisector::Mode;
use geovor::cli::{cmd_census, cmd_run, cmd_snapshot, cmd_verify, CliOptions};
use geovor::oracle::SamplingPlan;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "geovor",
    version,
    about = "Kinetic geodesic Voronoi diagrams of moving point sites in a simple polygon"
)]
struct Cli {
    /// Seed for randomized oracle sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Geometric tolerance, relative to the polygon diameter.
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps_geom: f64,

    /// Width to which event times are bisected.
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps_time: f64,

    /// Maximum number of events before a run aborts with exit code 3.
    #[arg(long, global = true, default_value_t = 100_000)]
    event_budget: usize,

    /// Bisector maintenance strategy exercised on two-site scenarios.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Responsive)]
    mode: ModeArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// One certificate per event point.
    Naive,
    /// Event points grouped into offset tournaments.
    Responsive,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its JSONL event log.
    Run {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// Override the scenario's end time.
        #[arg(long)]
        horizon: Option<f64>,
        /// Output JSONL path.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Re-detect every event with the bisection oracle and compare.
    Verify {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// Coarse sampling steps for the oracle.
        #[arg(long, default_value_t = 256)]
        time_steps: usize,
        /// Grid resolution for label agreement checks.
        #[arg(long, default_value_t = 32)]
        grid_resolution: usize,
        /// Drop one KDS event before matching (negative control).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Run a generator over a size grid and print the event census as CSV.
    Census {
        /// Generator name: wineglass, center_swing, tshapes, spikes13,
        /// spikes33, gridsweep, or mirrored.
        generator: String,
        /// Chain/teeth size values, comma separated.
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        /// Site count values, comma separated (single-parameter generators
        /// ignore this).
        #[arg(long, value_delimiter = ',', default_value = "4")]
        n: Vec<usize>,
    },
    /// Draw the diagram at one time as SVG.
    Snapshot {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// Snapshot time, inside the scenario window.
        #[arg(long)]
        t: f64,
        /// Output SVG path.
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let opts = CliOptions {
        seed: cli.seed,
        eps_geom: cli.eps_geom,
        eps_time: cli.eps_time,
        event_budget: cli.event_budget,
        mode: match cli.mode {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Responsive => Mode::Responsive,
        },
    };
    let code = match cli.command {
        Command::Run {
            scenario,
            horizon,
            out,
        } => cmd_run(&scenario, horizon, &out, &opts),
        Command::Verify {
            scenario,
            time_steps,
            grid_resolution,
            inject_fault,
        } => {
            let plan = SamplingPlan {
                grid_resolution,
                time_steps,
                eps_time: opts.eps_time,
                seed: opts.seed,
            };
            cmd_verify(&scenario, &plan, &opts, inject_fault)
        }
        Command::Census { generator, m, n } => cmd_census(&generator, &m, &n, &opts),
        Command::Snapshot { scenario, t, out } => cmd_snapshot(&scenario, t, &out, &opts),
    };
    std::process::exit(code);
}
