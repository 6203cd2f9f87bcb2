//! Scenario description and the three stock experiments.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::auction::AuctionConfig;
use crate::casa::{AdvertiserInit, PowerLawParams};
use crate::casu::{IntentDynamicsParams, TypeWeights};
use crate::error::ConfigError;
use crate::grid::{Dims, Lattice, Neighborhood, Topology};
use crate::session::{ActionModelParams, ClickModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSection {
    pub rows: usize,
    pub cols: usize,
    pub neighborhood: Neighborhood,
    #[serde(default)]
    pub topology: Topology,
    /// Scales every interest weight into a per-stage query probability.
    pub query_rate: f64,
    pub type_weights: TypeWeights,
    pub intent: IntentDynamicsParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvertiserSection {
    pub rows: usize,
    pub cols: usize,
    /// Neighbourhood searched for candidates around the query's cell.
    pub retrieval: Neighborhood,
    #[serde(default)]
    pub topology: Topology,
    pub budget: PowerLawParams,
    pub bid: PowerLawParams,
    pub strategic_fraction: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    /// Also record per-topic stage series.
    #[serde(default)]
    pub per_topic_timeseries: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub replications: u32,
    pub stages: u32,
    pub users: UserSection,
    pub advertisers: AdvertiserSection,
    pub auction: AuctionConfig,
    pub click: ClickModelParams,
    pub action: ActionModelParams,
    #[serde(default)]
    pub report: ReportSection,
}

impl Default for ScenarioConfig {
    /// 100 users and 100 advertisers on 10×10 tori, 1000 stages, 20 replications,
    /// static bidding and extended-Moore retrieval.
    fn default() -> Self {
        ScenarioConfig {
            seed: 42,
            replications: 20,
            stages: 1000,
            users: UserSection {
                rows: 10,
                cols: 10,
                neighborhood: Neighborhood::Moore,
                topology: Topology::Toroidal,
                query_rate: 0.25,
                type_weights: TypeWeights::default(),
                intent: IntentDynamicsParams::default(),
            },
            advertisers: AdvertiserSection {
                rows: 10,
                cols: 10,
                retrieval: Neighborhood::ExtendedMoore,
                topology: Topology::Toroidal,
                budget: PowerLawParams { x_min: 100.0, alpha: 2.0 },
                bid: PowerLawParams { x_min: 1.0, alpha: 2.0 },
                strategic_fraction: 0.0,
                kappa: 2.0,
            },
            auction: AuctionConfig::default(),
            click: ClickModelParams::default(),
            action: ActionModelParams::default(),
            report: ReportSection::default(),
        }
    }
}

fn within(section: &str, e: ConfigError) -> ConfigError {
    ConfigError::new(format!("{section}.{}", e.field), e.reason)
}

impl ScenarioConfig {
    pub fn user_lattice(&self) -> Result<Lattice, ConfigError> {
        Lattice::new(
            Dims::new(self.users.rows, self.users.cols),
            self.users.neighborhood,
            self.users.topology,
        )
        .map_err(|e| within("users", e))
    }

    pub fn advertiser_lattice(&self) -> Result<Lattice, ConfigError> {
        Lattice::new(
            Dims::new(self.advertisers.rows, self.advertisers.cols),
            self.advertisers.retrieval,
            self.advertisers.topology,
        )
        .map_err(|e| within("advertisers", e))
    }

    pub fn advertiser_init(&self) -> AdvertiserInit {
        AdvertiserInit {
            budget: self.advertisers.budget,
            bid: self.advertisers.bid,
            strategic_fraction: self.advertisers.strategic_fraction,
            kappa: self.advertisers.kappa,
        }
    }

    /// Checks every field against its domain; the error names the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.replications == 0 {
            return Err(ConfigError::new("replications", "must be positive"));
        }
        let u = &self.users;
        if u.rows == 0 {
            return Err(ConfigError::new("users.rows", "must be positive"));
        }
        if u.cols == 0 {
            return Err(ConfigError::new("users.cols", "must be positive"));
        }
        if !(0.0..=1.0).contains(&u.query_rate) {
            return Err(ConfigError::new("users.query_rate", "must lie in [0, 1]"));
        }
        u.type_weights.validate().map_err(|e| within("users", e))?;
        u.intent.validate().map_err(|e| within("users.intent", e))?;

        let a = &self.advertisers;
        if a.rows == 0 {
            return Err(ConfigError::new("advertisers.rows", "must be positive"));
        }
        if a.cols == 0 {
            return Err(ConfigError::new("advertisers.cols", "must be positive"));
        }
        if (a.rows * a.cols) % 4 != 0 {
            return Err(ConfigError::new(
                "advertisers.cols",
                "rows × cols must be divisible by the four topics",
            ));
        }
        a.budget.validate("advertisers.budget")?;
        a.bid.validate("advertisers.bid")?;
        if !(0.0..=1.0).contains(&a.strategic_fraction) {
            return Err(ConfigError::new("advertisers.strategic_fraction", "must lie in [0, 1]"));
        }
        if !(a.kappa >= 1.0 && a.kappa.is_finite()) {
            return Err(ConfigError::new("advertisers.kappa", "must be at least 1"));
        }
        self.auction.validate().map_err(|e| within("auction", e))?;
        self.click.validate().map_err(|e| within("click", e))?;
        self.action.validate().map_err(|e| within("action", e))?;
        Ok(())
    }
}

/// A scenario with the short name used for its output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedScenario {
    pub name: String,
    pub config: ScenarioConfig,
}

fn named(name: &str, config: ScenarioConfig) -> NamedScenario {
    NamedScenario {
        name: name.into(),
        config,
    }
}

/// Word-of-mouth on versus off; everything else shared.
pub fn experiment_ewom(seed: u64) -> Vec<NamedScenario> {
    let with = ScenarioConfig { seed, ..ScenarioConfig::default() };
    let mut without = with.clone();
    without.users.intent = without.users.intent.without_cross_effects();
    alloc::vec![named("with_ewom", with), named("without_ewom", without)]
}

/// Retrieval neighbourhood of growing size: 4, 8 and 24 surrounding cells.
pub fn experiment_competition(seed: u64) -> Vec<NamedScenario> {
    Neighborhood::ALL
        .into_iter()
        .map(|n| {
            let mut c = ScenarioConfig { seed, ..ScenarioConfig::default() };
            c.advertisers.retrieval = n;
            named(n.name(), c)
        })
        .collect()
}

pub const STRATEGIC_FRACTIONS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Share of herding bidders from none to all, with per-topic series recorded.
pub fn experiment_strategy(seed: u64) -> Vec<NamedScenario> {
    STRATEGIC_FRACTIONS
        .into_iter()
        .map(|f| {
            let mut c = ScenarioConfig { seed, ..ScenarioConfig::default() };
            c.advertisers.strategic_fraction = f;
            c.report.per_topic_timeseries = true;
            named(&format!("strategic_{:03}", libm::round(f * 100.0) as u32), c)
        })
        .collect()
}
