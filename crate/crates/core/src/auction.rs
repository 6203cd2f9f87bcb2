//! Query placement, candidate retrieval, proximity-weighted ranking and
//! generalized first/second price pricing.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::casa::AdvertiserGrid;
use crate::casu::IntentState;
use crate::error::ConfigError;
use crate::grid::{Cell, DistanceMetric};
use crate::topic::Topic;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub user_id: u32,
    pub topic: Topic,
    pub intent: IntentState,
    /// Advertiser-grid cell the query landed on; set by [`place_query`].
    pub placed_cell: Option<Cell>,
}

impl Query {
    pub fn new(user_id: u32, topic: Topic, intent: IntentState) -> Self {
        debug_assert!(intent != IntentState::Latent);
        Query {
            user_id,
            topic,
            intent,
            placed_cell: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pricing {
    /// Generalized first price: pay your own bid.
    Gfp,
    /// Generalized second price: pay the next-ranked bid, capped at your own.
    Gsp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuctionConfig {
    pub slots: usize,
    pub pricing: Pricing,
    pub reserve: f64,
    #[serde(default)]
    pub distance: DistanceMetric,
}

impl Default for AuctionConfig {
    fn default() -> Self {
        AuctionConfig {
            slots: 5,
            pricing: Pricing::Gsp,
            reserve: 0.0,
            distance: DistanceMetric::Chebyshev,
        }
    }
}

impl AuctionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.slots == 0 {
            return Err(ConfigError::new("slots", "need at least one slot"));
        }
        if !(self.reserve >= 0.0 && self.reserve.is_finite()) {
            return Err(ConfigError::new("reserve", "must be a non-negative amount"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedAd {
    pub advertiser_id: u32,
    pub bid: f64,
    pub relevance: f64,
    pub score: f64,
    /// 1-based.
    pub position: usize,
    pub price: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionResult {
    pub query: Query,
    /// Shown ads, best first; at most `slots` long.
    pub slate: Vec<RankedAd>,
    /// Every retrieved candidate in rank order, including those below the fold.
    pub ranked: Vec<RankedAd>,
}

impl AuctionResult {
    /// Ids and bids of everyone who took part, for strategy updates.
    pub fn participants(&self) -> (Vec<u32>, Vec<f64>) {
        self.ranked.iter().map(|r| (r.advertiser_id, r.bid)).unzip()
    }
}

/// Drops the query on a uniformly chosen advertiser cell.
pub fn place_query<R: Rng + ?Sized>(mut q: Query, grid: &AdvertiserGrid, rng: &mut R) -> Query {
    let idx = rng.random_range(0..grid.lattice.len());
    q.placed_cell = Some(grid.lattice.cell(idx));
    q
}

/// Eligible same-topic advertisers on the placed cell and its neighbourhood.
///
/// # Panics
///
/// If the query has not been placed.
pub fn retrieve(q: &Query, grid: &AdvertiserGrid) -> Vec<u32> {
    let center = q.placed_cell.expect("query must be placed before retrieval");
    core::iter::once(center)
        .chain(grid.lattice.neighbors(center))
        .map(|c| grid.at(c))
        .filter(|a| a.topic == q.topic && a.eligible())
        .map(|a| a.id)
        .collect()
}

/// `1 / (1 + d)` for lattice distance `d`.
pub fn relevance(query_cell: Cell, ad_cell: Cell, grid: &AdvertiserGrid, metric: DistanceMetric) -> f64 {
    1.0 / (1.0 + grid.lattice.distance(query_cell, ad_cell, metric) as f64)
}

/// Score descending, then lower id first.
pub fn rank_order(a: &RankedAd, b: &RankedAd) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then(a.advertiser_id.cmp(&b.advertiser_id))
}

/// Orders every candidate by `bid × relevance`. Prices are left at zero.
pub fn rank(candidates: &[u32], q: &Query, grid: &AdvertiserGrid, config: &AuctionConfig) -> Vec<RankedAd> {
    let center = q.placed_cell.expect("query must be placed before ranking");
    let mut ranked: Vec<RankedAd> = candidates
        .iter()
        .map(|&id| {
            let ad = grid.get(id);
            let rel = relevance(center, ad.cell, grid, config.distance);
            RankedAd {
                advertiser_id: id,
                bid: ad.bid,
                relevance: rel,
                score: ad.bid * rel,
                position: 0,
                price: 0.0,
            }
        })
        .collect();
    ranked.sort_by(rank_order);
    for (i, r) in ranked.iter_mut().enumerate() {
        r.position = i + 1;
    }
    ranked
}

/// Prices every ranked candidate in place.
///
/// Under GSP each pays the bid of the candidate ranked right below, capped at its
/// own bid; the last candidate overall pays the reserve, also capped.
pub fn price_ranked(ranked: &mut [RankedAd], config: &AuctionConfig) {
    let n = ranked.len();
    for i in 0..n {
        let own = ranked[i].bid;
        ranked[i].price = match config.pricing {
            Pricing::Gfp => own,
            Pricing::Gsp => {
                let next = if i + 1 < n {
                    ranked[i + 1].bid
                } else {
                    config.reserve.max(0.0)
                };
                next.min(own)
            }
        };
    }
}

/// Top-`slots` prefix of the priced ranking.
pub fn price_slate(ranked: &[RankedAd], config: &AuctionConfig) -> Vec<RankedAd> {
    let mut all = ranked.to_vec();
    price_ranked(&mut all, config);
    all.truncate(config.slots);
    all
}

/// Place, retrieve, rank and price one query. Returns `None` when nobody is
/// eligible; otherwise every shown advertiser gets one impression.
pub fn run_auction<R: Rng + ?Sized>(
    q: Query,
    grid: &mut AdvertiserGrid,
    config: &AuctionConfig,
    rng: &mut R,
) -> Option<AuctionResult> {
    let q = place_query(q, grid, rng);
    let candidates = retrieve(&q, grid);
    if candidates.is_empty() {
        return None;
    }
    let mut ranked = rank(&candidates, &q, grid, config);
    price_ranked(&mut ranked, config);
    let slate: Vec<RankedAd> = ranked.iter().take(config.slots).copied().collect();
    for r in &slate {
        grid.get_mut(r.advertiser_id).counters.impressions += 1;
    }
    Some(AuctionResult { query: q, slate, ranked })
}
