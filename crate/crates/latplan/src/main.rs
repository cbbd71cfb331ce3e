use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latplan::commands::{self, exit, BenchMode, CommandError, Overrides};
use latplan_core::{EnumerationLimits, LatticeFamily, Mode};

#[derive(Parser)]
#[command(name = "latplan", version, about = "Lattice sample sets and deterministic motion planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived parameters of one sample set.
    Params {
        /// Configuration-space dimension.
        #[arg(short, long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sample- and collision-check-complexity table (CSV).
    Complexity {
        /// Dimensions, `2..8` or `2,3,5`.
        #[arg(long, default_value = "2..8")]
        dims: String,
        /// Largest ball enumeration attempted for exact counts.
        #[arg(long, default_value_t = 2_000_000)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Plan on a scenario and write the result document (JSON).
    Plan {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare planner flavours on one scenario (CSV).
    Bench {
        scenario: PathBuf,
        /// Comma-separated, e.g. `z-loc,astar-loc,astar-glo,random`.
        #[arg(long, value_delimiter = ',')]
        modes: Vec<String>,
        /// Seeds per random row.
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Plan once per eps at a fixed clearance (CSV).
    SweepEps {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "10,4,2,1,0.5")]
        eps_list: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Lattice family; `complexity` accepts a comma-separated list.
    #[arg(long, value_enum, value_delimiter = ',')]
    family: Vec<FamilyArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Connection-radius constant for random mode.
    #[arg(long)]
    psi: Option<f64>,
    /// Collision-check spacing along edges.
    #[arg(long)]
    spacing: Option<f64>,
    /// Maximum node expansions.
    #[arg(long)]
    node_cap: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_cap: Option<f64>,
    /// Include wall times in the output (makes it non-reproducible).
    #[arg(long)]
    record_time: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Z,
    Dstar,
    Astar,
}

impl From<FamilyArg> for LatticeFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Z => LatticeFamily::Zd,
            FamilyArg::Dstar => LatticeFamily::DdStar,
            FamilyArg::Astar => LatticeFamily::AdStar,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Loc,
    Glo,
    Random,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Loc => Mode::LatticeLoc,
            ModeArg::Glo => Mode::LatticeGlo,
            ModeArg::Random => Mode::RandomGlo,
        }
    }
}

impl Common {
    fn families(&self) -> Vec<LatticeFamily> {
        self.family.iter().map(|&f| f.into()).collect()
    }

    fn single_family(&self) -> Result<Option<LatticeFamily>, CommandError> {
        match self.family.as_slice() {
            [] => Ok(None),
            [f] => Ok(Some((*f).into())),
            _ => Err(CommandError::Usage("this command takes a single --family".into())),
        }
    }

    fn overrides(&self) -> Result<Overrides, CommandError> {
        Ok(Overrides {
            delta: self.delta,
            eps: self.eps,
            family: self.single_family()?,
            mode: self.mode.map(Into::into),
            seed: self.seed,
            psi: self.psi,
            spacing: self.spacing,
            node_cap: self.node_cap,
            time_cap: self.time_cap,
            record_time: self.record_time,
        })
    }

    fn emit(&self, text: &str) -> Result<(), CommandError> {
        match &self.out {
            Some(path) => commands::write_output(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<i32, CommandError> {
    match cli.command {
        Command::Params { d, common } => {
            let family = common.single_family()?.unwrap_or(LatticeFamily::AdStar);
            let text = commands::params_text(common.delta.unwrap_or(1.0), common.eps.unwrap_or(2.0), family, d)?;
            common.emit(&text)?;
            Ok(exit::OK)
        }
        Command::Complexity { dims, cap, common } => {
            let mut families = common.families();
            if families.is_empty() {
                families = LatticeFamily::ALL.to_vec();
            }
            let dims = commands::parse_dims(&dims)?;
            let limits = EnumerationLimits { max_points: cap };
            let text = commands::complexity_text(
                &families,
                &dims,
                common.delta.unwrap_or(1.0),
                common.eps.unwrap_or(2.0),
                limits,
            )?;
            common.emit(&text)?;
            Ok(exit::OK)
        }
        Command::Plan { scenario, common } => {
            let file = commands::load_scenario(&scenario)?;
            let (result, status) = commands::run_plan(&file, &common.overrides()?)?;
            common.emit(&result.to_json())?;
            eprintln!(
                "{}: {} (delta {}, {} attempt(s))",
                file.name,
                status.name(),
                result.delta,
                result.attempts.len()
            );
            Ok(commands::exit_code(status))
        }
        Command::Bench { scenario, modes, repeats, common } => {
            let file = commands::load_scenario(&scenario)?;
            let modes = if modes.is_empty() {
                BenchMode::defaults()
            } else {
                modes.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
            };
            let report = commands::run_bench(&file, &common.overrides()?, &modes, repeats)?;
            common.emit(&report.to_csv())?;
            Ok(exit::OK)
        }
        Command::SweepEps { scenario, eps_list, common } => {
            let file = commands::load_scenario(&scenario)?;
            let (delta, rows) = commands::run_sweep_eps(&file, &common.overrides()?, &eps_list)?;
            common.emit(&commands::sweep_csv(delta, &rows))?;
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::USAGE as u8)
        }
    }
}
