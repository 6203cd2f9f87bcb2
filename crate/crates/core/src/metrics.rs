//! Advertising counters and the derived market statistics.

use core::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::casa::AdvertiserGrid;
use crate::error::{ConfigError, Result};
use crate::topic::{Topic, TopicMap};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub impressions: u64,
    pub clicks: u64,
    pub actions: u64,
    pub spend: f64,
}

impl Counters {
    pub fn is_consistent(&self) -> bool {
        self.actions <= self.clicks && self.clicks <= self.impressions && self.spend >= 0.0
    }
}

impl Add for Counters {
    type Output = Counters;

    fn add(self, rhs: Counters) -> Counters {
        Counters {
            impressions: self.impressions + rhs.impressions,
            clicks: self.clicks + rhs.clicks,
            actions: self.actions + rhs.actions,
            spend: self.spend + rhs.spend,
        }
    }
}

impl AddAssign for Counters {
    fn add_assign(&mut self, rhs: Counters) {
        *self = *self + rhs;
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Value per click of each topic: the largest initial bid among its advertisers.
pub fn vc_per_topic(grid: &AdvertiserGrid) -> Result<TopicMap<f64>> {
    let mut best = TopicMap::from_fn(|_| f64::NEG_INFINITY);
    for ad in &grid.ads {
        best[ad.topic] = best[ad.topic].max(ad.initial_bid);
    }
    for t in Topic::ALL {
        if best[t] == f64::NEG_INFINITY {
            return Err(ConfigError::new("advertisers", alloc::format!("topic {t} has no advertisers")).into());
        }
    }
    Ok(best)
}

/// `clicks · v_c − spend`.
pub fn advertiser_profit(counters: &Counters, vc: f64) -> f64 {
    counters.clicks as f64 * vc - counters.spend
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Ratios {
    pub ctr: f64,
    pub cr: f64,
    pub cpc: f64,
    /// Set when the matching denominator was zero and the ratio reported as 0.
    pub ctr_undefined: bool,
    pub cr_undefined: bool,
    pub cpc_undefined: bool,
}

pub fn derived_ratios(c: &Counters) -> Ratios {
    fn ratio(num: f64, den: u64) -> (f64, bool) {
        if den == 0 {
            (0.0, true)
        } else {
            (num / den as f64, false)
        }
    }
    let (ctr, ctr_undefined) = ratio(c.clicks as f64, c.impressions);
    let (cr, cr_undefined) = ratio(c.actions as f64, c.clicks);
    let (cpc, cpc_undefined) = ratio(c.spend, c.clicks);
    Ratios {
        ctr,
        cr,
        cpc,
        ctr_undefined,
        cr_undefined,
        cpc_undefined,
    }
}

/// Counters, ratios and profit for one scope (a topic or the whole market).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScopeMetrics {
    pub counters: Counters,
    pub ratios: Ratios,
    pub profit: f64,
}

impl ScopeMetrics {
    fn new(counters: Counters, profit: f64) -> Self {
        ScopeMetrics {
            counters,
            ratios: derived_ratios(&counters),
            profit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProfitReport {
    pub market: ScopeMetrics,
    pub topics: TopicMap<ScopeMetrics>,
    pub vc: TopicMap<f64>,
}

/// Rolls advertiser counters up to topics and the market.
///
/// Spend and profit use compensated sums so the market figures match the
/// per-advertiser totals to well under a part per million.
pub fn profit_report(grid: &AdvertiserGrid, vc: &TopicMap<f64>) -> ProfitReport {
    let mut counters = TopicMap::<Counters>::default();
    let mut spend = TopicMap::<CompensatedSum>::default();
    let mut profit = TopicMap::<CompensatedSum>::default();
    let mut market_spend = CompensatedSum::default();
    let mut market_profit = CompensatedSum::default();
    for ad in &grid.ads {
        let c = &ad.counters;
        counters[ad.topic] += *c;
        spend[ad.topic].add(c.spend);
        market_spend.add(c.spend);
        let p = advertiser_profit(c, vc[ad.topic]);
        profit[ad.topic].add(p);
        market_profit.add(p);
    }
    let topics = TopicMap::from_fn(|t| {
        let mut c = counters[t];
        c.spend = spend[t].value();
        ScopeMetrics::new(c, profit[t].value())
    });
    let mut market = Counters::default();
    for (_, s) in topics.iter() {
        market += s.counters;
    }
    market.spend = market_spend.value();
    ProfitReport {
        market: ScopeMetrics::new(market, market_profit.value()),
        topics,
        vc: *vc,
    }
}
