use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zerog_cli::commands::{self, CommandError, Sweep};
use zerog_core::sim::Scenario;

#[derive(Parser)]
#[command(name = "zerog", version, about = "Microgravity quadrotor sizing, simulation and safety analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the bang-coast-bang plan.
    Size(Common),
    /// Fly the closed-loop mission.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// nominal or gust
        #[arg(long, default_value = "nominal")]
        scenario: String,
    },
    /// Fly the mission with a stuck blade servo.
    Faultcase(Common),
    /// Power-cut Monte Carlo over the critical volume.
    GeofenceMc(Common),
    /// Size the mission over a range of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Vehicle or constraint field, e.g. engine_power_w.
        #[arg(long, default_value = "engine_power_w")]
        param: String,
        #[arg(long, default_value_t = 2500.0)]
        from: f64,
        #[arg(long, default_value_t = 6000.0)]
        to: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Serve the sizing API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

fn run(common: &Common, f: impl FnOnce(&zerog_core::config::Setup) -> Result<String, CommandError>) -> Result<String, CommandError> {
    let setup = commands::load_config(common.config.as_deref(), common.seed)?.setup()?;
    commands::prepare_out(&common.out)?;
    f(&setup)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Size(c) => run(c, |s| commands::size(s, &c.out)),
        Command::Simulate { common, scenario } => match Scenario::parse(scenario) {
            Some(sc @ (Scenario::Nominal | Scenario::Gust)) => run(common, |s| commands::run_scenario(s, sc, &common.out)),
            _ => Err(CommandError::Invalid(format!("unknown scenario `{scenario}` (nominal or gust)"))),
        },
        Command::Faultcase(c) => run(c, |s| commands::run_scenario(s, Scenario::Faultcase, &c.out)),
        Command::GeofenceMc(c) => run(c, |s| commands::geofence_mc(s, &c.out)),
        Command::Sweep {
            common,
            param,
            from,
            to,
            steps,
        } => {
            let spec = Sweep {
                param: param.clone(),
                from: *from,
                to: *to,
                steps: *steps,
            };
            run(common, |s| commands::sweep(s, &spec, &common.out))
        }
        Command::Serve { bind } => {
            let rt = tokio::runtime::Runtime::new().expect("tokio runtime starts");
            return match rt.block_on(zerog_cli::service::serve(bind)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            };
        }
    };
    match result {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
