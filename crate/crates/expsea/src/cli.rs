use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use expsea_core::scenario::{experiment_competition, experiment_ewom, experiment_strategy, NamedScenario};

use crate::config::{load_config, Overrides};
use crate::error::Error;
use crate::exec::run_scenario;
use crate::report::write_report;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "EXPSEA_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "expsea-out";

#[derive(Debug, Parser)]
#[command(name = "expsea", version, about = "Search-engine advertising market simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the stock experiments; each scenario gets its own subdirectory.
    Preset {
        experiment: Preset,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<u32>,
    },
    /// Parse and check a scenario file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Word-of-mouth on versus off.
    Ewom,
    /// Retrieval over 4, 8 and 24 neighbours.
    Competition,
    /// 0% to 100% herding bidders.
    Strategy,
}

impl Preset {
    pub fn scenarios(self, seed: u64) -> Vec<NamedScenario> {
        match self {
            Preset::Ewom => experiment_ewom(seed),
            Preset::Competition => experiment_competition(seed),
            Preset::Strategy => experiment_strategy(seed),
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn run_into(cfg: &expsea_core::ScenarioConfig, dir: &Path, out: &mut dyn Write) -> Result<(), Error> {
    let report = run_scenario(cfg)?;
    write_report(&report, dir)?;
    let m = &report.mean;
    let _ = writeln!(
        out,
        "{}: impressions {:.1} clicks {:.1} actions {:.1} ctr {:.4} cr {:.4} cpc {:.3} profit {:.1}",
        dir.display(),
        m.impressions,
        m.clicks,
        m.actions,
        m.ctr,
        m.cr,
        m.cpc,
        m.market_profit
    );
    Ok(())
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, seed, replications, out: dir } => {
            let mut cfg = load_config(&config)?;
            Overrides { seed, replications }.apply(&mut cfg);
            cfg.validate()?;
            run_into(&cfg, &out_dir(dir), out)
        }
        Command::Preset { experiment, out: dir, seed, replications } => {
            let root = out_dir(dir);
            let base_seed = seed.unwrap_or(expsea_core::ScenarioConfig::default().seed);
            for mut s in experiment.scenarios(base_seed) {
                Overrides { seed: None, replications }.apply(&mut s.config);
                s.config.validate()?;
                run_into(&s.config, &root.join(&s.name), out)?;
            }
            Ok(())
        }
        Command::Validate { config } => {
            load_config(&config)?;
            let _ = writeln!(out, "{}: ok", config.display());
            Ok(())
        }
    }
}

/// Parses `args`, runs, and maps the outcome to an exit code: 0 on success, 1 on
/// usage or validation errors, 2 on I/O errors.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
