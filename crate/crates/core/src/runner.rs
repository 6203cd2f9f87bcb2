//! The stage loop and replication aggregation.
//!
//! Each stage runs, in order: one intent step on the user lattice, query
//! generation, then for every query (user id, then topic) an auction, its session
//! and the bid updates of the auction's herding participants.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::auction::{run_auction, AuctionConfig, Pricing};
use crate::casa::{apply_strategies, init_advertiser_grid, AdvertiserGrid};
use crate::casu::{generate_queries, init_user_grid, step_intent, IntentState, UserGrid};
use crate::error::{Error, Result};
use crate::metrics::{profit_report, vc_per_topic, CompensatedSum, ScopeMetrics};
use crate::rng::{replication_seed, stream, Stream};
use crate::scenario::ScenarioConfig;
use crate::session::{reset_user_after_action, simulate_session};
use crate::topic::{Topic, TopicMap};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageRecord {
    pub queries: u64,
    pub impressions: u64,
    pub clicks: u64,
    pub actions: u64,
    pub spend: f64,
}

/// Run-time checks gathered while the replication ran.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Audit {
    pub auctions: u64,
    pub charges: u64,
    /// Largest `price / bid` over every charged click.
    pub max_price_to_bid: f64,
    /// Largest budget-conservation gap over advertisers, relative to the initial budget.
    pub max_budget_drift: f64,
    pub final_intents: [u64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub index: u32,
    pub seed: u64,
    pub market: ScopeMetrics,
    pub topics: TopicMap<ScopeMetrics>,
    pub vc: TopicMap<f64>,
    pub timeseries: Vec<StageRecord>,
    /// Empty unless per-topic series were requested.
    pub topic_timeseries: Vec<TopicMap<StageRecord>>,
    pub audit: Audit,
}

/// Relative tolerance for the floating currency identities.
pub const CURRENCY_TOLERANCE: f64 = 1e-9;

/// Everything a running replication owns.
pub struct Market {
    pub users: UserGrid,
    pub ads: AdvertiserGrid,
    pub vc: TopicMap<f64>,
}

impl Market {
    pub fn init(cfg: &ScenarioConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let users = init_user_grid(
            cfg.user_lattice()?,
            &cfg.users.type_weights,
            &cfg.users.intent,
            &mut stream(seed, Stream::UserInit),
        )?;
        let ads = init_advertiser_grid(
            cfg.advertiser_lattice()?,
            &cfg.advertiser_init(),
            &mut stream(seed, Stream::AdvertiserInit),
        )?;
        let vc = vc_per_topic(&ads)?;
        Ok(Market { users, ads, vc })
    }
}

pub fn run_replication(cfg: &ScenarioConfig, index: u32) -> Result<ReplicationReport> {
    let seed = replication_seed(cfg.seed, index as u64);
    let mut market = Market::init(cfg, seed)?;
    let mut intent_rng = stream(seed, Stream::Intent);
    let mut query_rng = stream(seed, Stream::Queries);
    let mut placement_rng = stream(seed, Stream::Placement);
    let mut session_rng = stream(seed, Stream::Sessions);

    let per_topic = cfg.report.per_topic_timeseries;
    let mut timeseries = Vec::with_capacity(cfg.stages as usize);
    let mut topic_timeseries = Vec::new();
    let mut audit = Audit::default();

    for _ in 0..cfg.stages {
        step_intent(&mut market.users, &cfg.users.intent, &mut intent_rng);
        let queries = generate_queries(&market.users, cfg.users.query_rate, &mut query_rng);

        let mut stage = StageRecord::default();
        let mut stage_topics = TopicMap::<StageRecord>::default();
        let mut spend = CompensatedSum::default();
        let mut topic_spend = TopicMap::<CompensatedSum>::default();
        for q in queries {
            let user = &market.users.users[q.user_id as usize];
            // Already satisfied earlier in this stage.
            if user.intent == IntentState::Latent {
                continue;
            }
            stage.queries += 1;
            stage_topics[q.topic].queries += 1;
            let Some(result) = run_auction(q, &mut market.ads, &cfg.auction, &mut placement_rng) else {
                continue;
            };
            audit.auctions += 1;
            check_prices(&result.slate, &cfg.auction)?;

            let events = simulate_session(
                &result,
                q.intent,
                &mut market.ads,
                &cfg.click,
                &cfg.action,
                &mut session_rng,
            )?;
            for c in &events.clicks {
                let bid = result.slate[c.position - 1].bid;
                if bid > 0.0 {
                    audit.max_price_to_bid = audit.max_price_to_bid.max(c.price / bid);
                }
                audit.charges += 1;
                spend.add(c.price);
                topic_spend[q.topic].add(c.price);
            }
            stage.impressions += events.impressions;
            stage.clicks += events.clicks.len() as u64;
            stage.actions += events.actions.len() as u64;
            let t = &mut stage_topics[q.topic];
            t.impressions += events.impressions;
            t.clicks += events.clicks.len() as u64;
            t.actions += events.actions.len() as u64;

            if events.user_reset {
                reset_user_after_action(&mut market.users.users[q.user_id as usize], cfg.users.intent.mu0);
            }

            let (ids, bids) = result.participants();
            apply_strategies(&mut market.ads, &ids, &bids)?;
        }
        stage.spend = spend.value();
        timeseries.push(stage);
        if per_topic {
            for t in Topic::ALL {
                stage_topics[t].spend = topic_spend[t].value();
            }
            topic_timeseries.push(stage_topics);
        }
        debug_assert!(market.users.users.iter().all(|u| (0.0..=1.0).contains(&u.mu)));
    }

    for ad in &market.ads.ads {
        let drift = libm::fabs((ad.budget_initial - ad.budget_remaining) - ad.counters.spend)
            / ad.budget_initial.max(1.0);
        audit.max_budget_drift = audit.max_budget_drift.max(drift);
        if drift > CURRENCY_TOLERANCE {
            return Err(Error::Invariant(format!("budget drift {drift} for advertiser {}", ad.id)));
        }
        if !ad.counters.is_consistent() {
            return Err(Error::Invariant(format!("counter ordering broken for advertiser {}", ad.id)));
        }
        if ad.budget_remaining < 0.0 || ad.budget_remaining > ad.budget_initial {
            return Err(Error::Invariant(format!("budget out of range for advertiser {}", ad.id)));
        }
    }
    for (i, n) in market.users.intent_counts().into_iter().enumerate() {
        audit.final_intents[i] = n as u64;
    }

    let report = profit_report(&market.ads, &market.vc);
    Ok(ReplicationReport {
        index,
        seed,
        market: report.market,
        topics: report.topics,
        vc: report.vc,
        timeseries,
        topic_timeseries,
        audit,
    })
}

fn check_prices(slate: &[crate::auction::RankedAd], config: &AuctionConfig) -> Result<()> {
    for r in slate {
        let ok = match config.pricing {
            Pricing::Gfp => r.price == r.bid,
            Pricing::Gsp => r.price <= r.bid && r.price >= 0.0,
        };
        if !ok {
            return Err(Error::Invariant(format!(
                "slot {} priced {} against bid {}",
                r.position, r.price, r.bid
            )));
        }
    }
    Ok(())
}

/// Scalar market figures of one replication, or their mean over replications.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub impressions: f64,
    pub clicks: f64,
    pub actions: f64,
    pub ctr: f64,
    pub cr: f64,
    pub cpc: f64,
    pub market_profit: f64,
}

impl Summary {
    pub fn of(scope: &ScopeMetrics) -> Self {
        Summary {
            impressions: scope.counters.impressions as f64,
            clicks: scope.counters.clicks as f64,
            actions: scope.counters.actions as f64,
            ctr: scope.ratios.ctr,
            cr: scope.ratios.cr,
            cpc: scope.ratios.cpc,
            market_profit: scope.profit,
        }
    }

    fn mean<'a>(items: impl ExactSizeIterator<Item = &'a Summary>) -> Summary {
        let n = items.len();
        if n == 0 {
            return Summary::default();
        }
        let mut acc = [CompensatedSum::default(); 7];
        for s in items {
            for (a, v) in acc.iter_mut().zip(s.fields()) {
                a.add(v);
            }
        }
        let m = |i: usize| acc[i].value() / n as f64;
        Summary {
            impressions: m(0),
            clicks: m(1),
            actions: m(2),
            ctr: m(3),
            cr: m(4),
            cpc: m(5),
            market_profit: m(6),
        }
    }

    pub fn fields(&self) -> [f64; 7] {
        [
            self.impressions,
            self.clicks,
            self.actions,
            self.ctr,
            self.cr,
            self.cpc,
            self.market_profit,
        ]
    }
}

/// Per-stage mean over replications.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageMean {
    pub queries: f64,
    pub impressions: f64,
    pub clicks: f64,
    pub actions: f64,
    pub spend: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    /// Sorted by replication index.
    pub replications: Vec<ReplicationReport>,
    pub mean: Summary,
    pub mean_topics: TopicMap<Summary>,
    pub mean_timeseries: Vec<StageMean>,
    pub mean_topic_timeseries: Vec<TopicMap<StageMean>>,
}

impl RunReport {
    /// Aggregates replications; the result does not depend on their order.
    pub fn from_replications(config: ScenarioConfig, mut replications: Vec<ReplicationReport>) -> Self {
        replications.sort_by_key(|r| r.index);
        let market: Vec<Summary> = replications.iter().map(|r| Summary::of(&r.market)).collect();
        let mean = Summary::mean(market.iter());
        let mean_topics = TopicMap::from_fn(|t| {
            let s: Vec<Summary> = replications.iter().map(|r| Summary::of(&r.topics[t])).collect();
            Summary::mean(s.iter())
        });
        let mean_timeseries = stage_means(&replications, |r| &r.timeseries);
        let mean_topic_timeseries = if replications.iter().any(|r| !r.topic_timeseries.is_empty()) {
            let per_topic = TopicMap::from_fn(|t| {
                let series: Vec<Vec<StageRecord>> = replications
                    .iter()
                    .map(|r| r.topic_timeseries.iter().map(|m| m[t]).collect())
                    .collect();
                stage_means_of(&series)
            });
            (0..mean_timeseries.len())
                .map(|i| per_topic.map(|_, s| s.get(i).copied().unwrap_or_default()))
                .collect()
        } else {
            Vec::new()
        };
        RunReport {
            config,
            replications,
            mean,
            mean_topics,
            mean_timeseries,
            mean_topic_timeseries,
        }
    }

    pub fn replication_summaries(&self) -> Vec<Summary> {
        self.replications.iter().map(|r| Summary::of(&r.market)).collect()
    }
}

fn stage_means(reps: &[ReplicationReport], f: impl Fn(&ReplicationReport) -> &Vec<StageRecord>) -> Vec<StageMean> {
    let series: Vec<Vec<StageRecord>> = reps.iter().map(|r| f(r).clone()).collect();
    stage_means_of(&series)
}

fn stage_means_of(series: &[Vec<StageRecord>]) -> Vec<StageMean> {
    let stages = series.iter().map(Vec::len).max().unwrap_or(0);
    let n = series.len() as f64;
    (0..stages)
        .map(|i| {
            let mut m = StageMean::default();
            for s in series {
                if let Some(r) = s.get(i) {
                    m.queries += r.queries as f64;
                    m.impressions += r.impressions as f64;
                    m.clicks += r.clicks as f64;
                    m.actions += r.actions as f64;
                    m.spend += r.spend;
                }
            }
            m.queries /= n;
            m.impressions /= n;
            m.clicks /= n;
            m.actions /= n;
            m.spend /= n;
            m
        })
        .collect()
}

/// Runs every replication sequentially and aggregates.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let reps = (0..cfg.replications)
        .map(|i| run_replication(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport::from_replications(cfg.clone(), reps))
}
