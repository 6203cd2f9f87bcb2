//! The query → click → action lifecycle.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auction::AuctionResult;
use crate::casa::AdvertiserGrid;
use crate::casu::{IntentState, SearchUser};
use crate::error::{ConfigError, Result};

/// Cascade scan: position `k` is clicked with probability `p_top · decay^(k-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClickModelParams {
    pub p_top: f64,
    pub decay: f64,
}

impl Default for ClickModelParams {
    fn default() -> Self {
        ClickModelParams { p_top: 0.20, decay: 0.55 }
    }
}

impl ClickModelParams {
    pub fn click_probability(&self, position: usize) -> f64 {
        self.p_top * libm::pow(self.decay, (position - 1) as f64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.p_top) {
            return Err(ConfigError::new("p_top", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.decay) {
            return Err(ConfigError::new("decay", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Probability that a click turns into an action, by the searcher's intent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionModelParams {
    pub informational: f64,
    pub navigational: f64,
    pub transactional: f64,
}

impl Default for ActionModelParams {
    fn default() -> Self {
        ActionModelParams {
            informational: 0.05,
            navigational: 0.20,
            transactional: 0.60,
        }
    }
}

impl ActionModelParams {
    pub fn probability(&self, intent: IntentState) -> f64 {
        match intent {
            IntentState::Latent => 0.0,
            IntentState::Informational => self.informational,
            IntentState::Navigational => self.navigational,
            IntentState::Transactional => self.transactional,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, p) in [
            ("informational", self.informational),
            ("navigational", self.navigational),
            ("transactional", self.transactional),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::new(name, "must lie in [0, 1]"));
            }
        }
        if self.informational > self.navigational || self.navigational > self.transactional {
            return Err(ConfigError::new("action", "probabilities must rise with intent"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Click {
    pub advertiser_id: u32,
    pub position: usize,
    pub price: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionEvents {
    pub impressions: u64,
    pub clicks: Vec<Click>,
    pub actions: Vec<u32>,
    /// The user acted; the caller must return them to the latent state.
    pub user_reset: bool,
}

/// Scans the slate top to bottom, charging each click and stopping at the first
/// action.
///
/// Per position: one uniform for the click, then (only after a click) one uniform
/// for the action.
pub fn simulate_session<R: Rng + ?Sized>(
    result: &AuctionResult,
    intent: IntentState,
    grid: &mut AdvertiserGrid,
    click: &ClickModelParams,
    action: &ActionModelParams,
    rng: &mut R,
) -> Result<SessionEvents> {
    debug_assert!(intent != IntentState::Latent);
    let mut events = SessionEvents {
        impressions: result.slate.len() as u64,
        ..SessionEvents::default()
    };
    let p_action = action.probability(intent);
    for ad in &result.slate {
        let clicked = rng.random::<f64>() < click.click_probability(ad.position);
        if !clicked {
            continue;
        }
        let advertiser = grid.get_mut(ad.advertiser_id);
        // Dropped: the advertiser can no longer pay.
        if !advertiser.active || ad.price > advertiser.budget_remaining {
            continue;
        }
        advertiser.charge(ad.price)?;
        events.clicks.push(Click {
            advertiser_id: ad.advertiser_id,
            position: ad.position,
            price: ad.price,
        });
        if rng.random::<f64>() < p_action {
            advertiser.counters.actions += 1;
            events.actions.push(ad.advertiser_id);
            events.user_reset = true;
            break;
        }
    }
    debug_assert!(events.actions.len() <= events.clicks.len());
    debug_assert!(events.clicks.len() as u64 <= events.impressions);
    Ok(events)
}

/// Back to idle after a completed action.
pub fn reset_user_after_action(user: &mut SearchUser, mu0: f64) {
    user.intent = IntentState::Latent;
    user.mu = mu0;
}
