//! The advertiser automaton: power-law population, budget accounting and bid
//! strategies.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Error, Result};
use crate::grid::{Cell, Lattice};
use crate::metrics::Counters;
use crate::topic::Topic;

/// Adjusted bids never fall below this.
pub const BID_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StrategyKind {
    /// Bid never changes.
    Static,
    /// Herds toward the mean of the observed bids (see [`dynamic_adjust`]).
    DynamicHerding { kappa: f64 },
}

/// Pareto law with minimum `x_min` and density exponent `alpha`, i.e.
/// `P(X > x) = (x / x_min)^(1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawParams {
    pub x_min: f64,
    pub alpha: f64,
}

impl PowerLawParams {
    pub fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if !(self.x_min > 0.0 && self.x_min.is_finite()) {
            return Err(ConfigError::new(field, "x_min must be positive"));
        }
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return Err(ConfigError::new(field, "alpha must exceed 1"));
        }
        Ok(())
    }

    /// Inverse CDF at `u ∈ (0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        self.x_min * libm::pow(u, -1.0 / (self.alpha - 1.0))
    }
}

pub fn sample_power_law<R: Rng + ?Sized>(params: &PowerLawParams, rng: &mut R) -> Result<f64> {
    params.validate("power_law")?;
    // 1 - [0,1) is (0,1]
    let u = 1.0 - rng.random::<f64>();
    Ok(params.quantile(u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Advertiser {
    pub id: u32,
    pub cell: Cell,
    pub topic: Topic,
    pub budget_initial: f64,
    pub budget_remaining: f64,
    pub bid: f64,
    pub initial_bid: f64,
    pub strategy: StrategyKind,
    pub active: bool,
    pub counters: Counters,
}

impl Advertiser {
    /// Able to pay its worst-case per-click charge, which is its own bid.
    pub fn eligible(&self) -> bool {
        self.active && self.budget_remaining >= self.bid
    }

    /// Deducts one click's price; retires the advertiser once it can no longer
    /// cover its bid.
    pub fn charge(&mut self, price: f64) -> Result<()> {
        if !(price >= 0.0) || price > self.budget_remaining {
            return Err(Error::Invariant(alloc::format!(
                "advertiser {} charged {price} with {} remaining",
                self.id,
                self.budget_remaining
            )));
        }
        self.budget_remaining -= price;
        self.counters.spend += price;
        self.counters.clicks += 1;
        if self.budget_remaining < self.bid {
            self.active = false;
        }
        Ok(())
    }
}

pub fn eligible(a: &Advertiser) -> bool {
    a.eligible()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvertiserGrid {
    /// The lattice's neighbourhood is the retrieval neighbourhood of the auction.
    pub lattice: Lattice,
    /// Row-major; `ads[i].id == i`.
    pub ads: Vec<Advertiser>,
}

impl AdvertiserGrid {
    pub fn at(&self, cell: Cell) -> &Advertiser {
        &self.ads[self.lattice.index(cell)]
    }

    pub fn get(&self, id: u32) -> &Advertiser {
        &self.ads[id as usize]
    }

    pub fn get_mut(&mut self, id: u32) -> &mut Advertiser {
        &mut self.ads[id as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvertiserInit {
    pub budget: PowerLawParams,
    pub bid: PowerLawParams,
    pub strategic_fraction: f64,
    pub kappa: f64,
}

/// Builds the advertiser lattice: equal topic shares in shuffled placement,
/// power-law budgets and bids, and a uniformly chosen strategic subset.
pub fn init_advertiser_grid<R: Rng + ?Sized>(
    lattice: Lattice,
    init: &AdvertiserInit,
    rng: &mut R,
) -> Result<AdvertiserGrid> {
    let n = lattice.len();
    if n == 0 {
        return Err(ConfigError::new("advertisers.dims", "grid must have positive area").into());
    }
    if n % Topic::ALL.len() != 0 {
        return Err(ConfigError::new(
            "advertisers.dims",
            "cell count must be divisible by the number of topics",
        )
        .into());
    }
    if !(0.0..=1.0).contains(&init.strategic_fraction) {
        return Err(ConfigError::new("strategic_fraction", "must lie in [0, 1]").into());
    }
    if !(init.kappa >= 1.0 && init.kappa.is_finite()) {
        return Err(ConfigError::new("kappa", "must be at least 1").into());
    }
    init.budget.validate("budget")?;
    init.bid.validate("bid")?;

    let mut topics: Vec<Topic> = (0..n).map(|i| Topic::ALL[i % Topic::ALL.len()]).collect();
    topics.shuffle(rng);

    let strategic = libm::round(init.strategic_fraction * n as f64) as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut is_strategic = alloc::vec![false; n];
    for &i in &order[..strategic] {
        is_strategic[i] = true;
    }

    let mut ads = Vec::with_capacity(n);
    for (i, topic) in topics.into_iter().enumerate() {
        let budget = sample_power_law(&init.budget, rng)?;
        let bid = sample_power_law(&init.bid, rng)?;
        ads.push(Advertiser {
            id: i as u32,
            cell: lattice.cell(i),
            topic,
            budget_initial: budget,
            budget_remaining: budget,
            bid,
            initial_bid: bid,
            strategy: if is_strategic[i] {
                StrategyKind::DynamicHerding { kappa: init.kappa }
            } else {
                StrategyKind::Static
            },
            active: true,
            counters: Counters::default(),
        });
    }
    Ok(AdvertiserGrid { lattice, ads })
}

/// Mean and population standard deviation.
pub fn mean_and_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some((mean, libm::sqrt(var)))
}

/// One herding step: a bid further than one standard deviation from the mean moves
/// toward it by `|b - mean| / kappa`; any other bid is kept.
pub fn dynamic_adjust(bid: f64, bids: &[f64], kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(ConfigError::new("kappa", "must be positive").into());
    }
    let (mean, sigma) = mean_and_std(bids).ok_or(Error::EmptyBids)?;
    let deviation = libm::fabs(bid - mean);
    if deviation - sigma <= 0.0 {
        return Ok(bid);
    }
    Ok(if bid > mean {
        bid - deviation / kappa
    } else {
        bid + deviation / kappa
    })
}

/// Lets every herding participant of the last auction react to the bids it saw.
///
/// `participants[i]` bid `observed_bids[i]`.
pub fn apply_strategies(
    grid: &mut AdvertiserGrid,
    participants: &[u32],
    observed_bids: &[f64],
) -> Result<()> {
    debug_assert_eq!(participants.len(), observed_bids.len());
    for (&id, &seen) in participants.iter().zip(observed_bids) {
        let ad = grid.get_mut(id);
        if let StrategyKind::DynamicHerding { kappa } = ad.strategy {
            ad.bid = dynamic_adjust(seen, observed_bids, kappa)?.max(BID_FLOOR);
            // A raised bid may exceed what is left; retire rather than risk an
            // unpayable click.
            if ad.budget_remaining < ad.bid {
                ad.active = false;
            }
        }
    }
    Ok(())
}
