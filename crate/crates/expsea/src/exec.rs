use expsea_core::runner::run_replication;
use expsea_core::{RunReport, ScenarioConfig};
use rayon::prelude::*;

use crate::error::Error;

/// Runs the replications on the rayon pool. Each replication owns its streams, so
/// the report is identical to a sequential run.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport, Error> {
    cfg.validate()?;
    let reps = (0..cfg.replications)
        .into_par_iter()
        .map(|i| run_replication(cfg, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport::from_replications(cfg.clone(), reps))
}
