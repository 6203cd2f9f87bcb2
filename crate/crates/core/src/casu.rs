//! The search-user automaton: intent dynamics with word-of-mouth cross-effects
//! and interest-driven query generation.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auction::Query;
use crate::error::ConfigError;
use crate::grid::{Cell, Lattice};
use crate::topic::{Topic, TopicMap};

/// Readiness to act, ordered from idle to ready-to-buy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum IntentState {
    Latent = 0,
    Informational = 1,
    Navigational = 2,
    Transactional = 3,
}

impl IntentState {
    pub const ALL: [IntentState; 4] = [
        IntentState::Latent,
        IntentState::Informational,
        IntentState::Navigational,
        IntentState::Transactional,
    ];

    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Option<Self> {
        IntentState::ALL.get(level as usize).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserType {
    Teenager,
    UniversityStudent,
    WhiteCollar,
    BlueCollar,
    Farmer,
}

impl UserType {
    pub const ALL: [UserType; 5] = [
        UserType::Teenager,
        UserType::UniversityStudent,
        UserType::WhiteCollar,
        UserType::BlueCollar,
        UserType::Farmer,
    ];

    pub fn age_range(self) -> &'static str {
        match self {
            UserType::Teenager => "12-18",
            UserType::UniversityStudent => "18-25",
            UserType::WhiteCollar => "25-60",
            UserType::BlueCollar | UserType::Farmer => "18-60",
        }
    }

    pub fn education(self) -> &'static str {
        match self {
            UserType::Teenager | UserType::BlueCollar => "middle",
            UserType::UniversityStudent | UserType::WhiteCollar => "high",
            UserType::Farmer => "low",
        }
    }

    pub fn income(self) -> &'static str {
        match self {
            UserType::Teenager | UserType::UniversityStudent | UserType::Farmer => "low",
            UserType::WhiteCollar => "high",
            UserType::BlueCollar => "middle-high",
        }
    }

    /// Share of users of this type who query each topic.
    pub fn interests(self) -> InterestProfile {
        let (video, music, scholar, literature) = match self {
            UserType::Teenager => (0.516, 0.500, 0.307, 0.354),
            UserType::UniversityStudent => (0.552, 0.552, 0.448, 0.352),
            UserType::WhiteCollar => (0.432, 0.399, 0.323, 0.210),
            UserType::BlueCollar => (0.438, 0.382, 0.213, 0.203),
            UserType::Farmer => (0.432, 0.413, 0.322, 0.245),
        };
        InterestProfile(TopicMap {
            video,
            music,
            scholar,
            literature,
        })
    }
}

impl fmt::Display for UserType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UserType::Teenager => "teenager",
            UserType::UniversityStudent => "university_student",
            UserType::WhiteCollar => "white_collar",
            UserType::BlueCollar => "blue_collar",
            UserType::Farmer => "farmer",
        })
    }
}

/// Per-topic marginal query rates. Weights are independent and need not sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterestProfile(pub TopicMap<f64>);

impl InterestProfile {
    pub fn weight(&self, topic: Topic) -> f64 {
        self.0[topic]
    }
}

/// Population mix over user types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeWeights {
    pub teenager: f64,
    pub university_student: f64,
    pub white_collar: f64,
    pub blue_collar: f64,
    pub farmer: f64,
}

impl Default for TypeWeights {
    fn default() -> Self {
        TypeWeights {
            teenager: 0.2,
            university_student: 0.2,
            white_collar: 0.2,
            blue_collar: 0.2,
            farmer: 0.2,
        }
    }
}

impl TypeWeights {
    pub fn only(kind: UserType) -> Self {
        let mut w = TypeWeights {
            teenager: 0.0,
            university_student: 0.0,
            white_collar: 0.0,
            blue_collar: 0.0,
            farmer: 0.0,
        };
        *w.get_mut(kind) = 1.0;
        w
    }

    pub fn get(&self, kind: UserType) -> f64 {
        match kind {
            UserType::Teenager => self.teenager,
            UserType::UniversityStudent => self.university_student,
            UserType::WhiteCollar => self.white_collar,
            UserType::BlueCollar => self.blue_collar,
            UserType::Farmer => self.farmer,
        }
    }

    fn get_mut(&mut self, kind: UserType) -> &mut f64 {
        match kind {
            UserType::Teenager => &mut self.teenager,
            UserType::UniversityStudent => &mut self.university_student,
            UserType::WhiteCollar => &mut self.white_collar,
            UserType::BlueCollar => &mut self.blue_collar,
            UserType::Farmer => &mut self.farmer,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut sum = 0.0;
        for kind in UserType::ALL {
            let w = self.get(kind);
            if !(0.0..=1.0).contains(&w) {
                return Err(ConfigError::new("type_weights", "weights must lie in [0, 1]"));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError::new("type_weights", "weights must sum to 1"));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UserType {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = UserType::Farmer;
        for kind in UserType::ALL {
            let w = self.get(kind);
            if w > 0.0 {
                last = kind;
                acc += w;
                if u < acc {
                    return kind;
                }
            }
        }
        last
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntentDynamicsParams {
    /// Transition probability assigned at start and after every transition.
    pub mu0: f64,
    /// Per-stage increment of the transition probability.
    pub rho: f64,
    /// Cross-effect of a neighbour one, two or three levels above the focal user.
    pub delta: [f64; 3],
    /// Backward one-level jump probability.
    pub epsilon: f64,
}

impl Default for IntentDynamicsParams {
    fn default() -> Self {
        IntentDynamicsParams {
            mu0: 0.10,
            rho: 0.10,
            delta: [0.125, 0.25, 0.45],
            epsilon: 0.01,
        }
    }
}

impl IntentDynamicsParams {
    pub fn without_cross_effects(self) -> Self {
        IntentDynamicsParams {
            delta: [0.0; 3],
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::new(name, "must lie in [0, 1]"))
            }
        };
        unit("mu0", self.mu0)?;
        unit("rho", self.rho)?;
        unit("delta1", self.delta[0])?;
        unit("delta2", self.delta[1])?;
        unit("delta3", self.delta[2])?;
        unit("epsilon", self.epsilon)?;
        if self.delta[0] > self.delta[1] || self.delta[1] > self.delta[2] {
            return Err(ConfigError::new("delta", "must be non-decreasing in the intent gap"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchUser {
    pub id: u32,
    pub cell: Cell,
    pub user_type: UserType,
    pub interests: InterestProfile,
    pub intent: IntentState,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserGrid {
    pub lattice: Lattice,
    /// Row-major; `users[i].id == i`.
    pub users: Vec<SearchUser>,
}

impl UserGrid {
    pub fn neighbors(&self, cell: Cell) -> Vec<Cell> {
        self.lattice.neighbors(cell)
    }

    pub fn user_at(&self, cell: Cell) -> &SearchUser {
        &self.users[self.lattice.index(cell)]
    }

    pub fn intent_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for u in &self.users {
            counts[u.intent.level() as usize] += 1;
        }
        counts
    }
}

/// Populates every cell with a user of a sampled type and a uniformly random intent.
pub fn init_user_grid<R: Rng + ?Sized>(
    lattice: Lattice,
    type_weights: &TypeWeights,
    params: &IntentDynamicsParams,
    rng: &mut R,
) -> Result<UserGrid, ConfigError> {
    if lattice.is_empty() {
        return Err(ConfigError::new("users.dims", "grid must have positive area"));
    }
    type_weights.validate()?;
    params.validate()?;
    let users = (0..lattice.len())
        .map(|i| {
            let user_type = type_weights.sample(rng);
            let intent = IntentState::ALL[rng.random_range(0..4)];
            SearchUser {
                id: i as u32,
                cell: lattice.cell(i),
                user_type,
                interests: user_type.interests(),
                intent,
                mu: params.mu0,
            }
        })
        .collect();
    Ok(UserGrid { lattice, users })
}

/// Word-of-mouth pressure a neighbour exerts on the focal user.
///
/// Zero unless the neighbour's intent is strictly higher; otherwise the delta for
/// the level gap.
pub fn cross_effect(
    focal: &SearchUser,
    neighbor: &SearchUser,
    params: &IntentDynamicsParams,
) -> f64 {
    cross_effect_between(focal.intent, neighbor.intent, params)
}

fn cross_effect_between(
    focal: IntentState,
    neighbor: IntentState,
    params: &IntentDynamicsParams,
) -> f64 {
    if neighbor <= focal {
        0.0
    } else {
        params.delta[(neighbor.level() - focal.level() - 1) as usize]
    }
}

/// Updated transition probability before sampling: `min(1, mu + rho + Σ cross-effects)`.
pub fn accumulated_mu(
    grid: &UserGrid,
    index: usize,
    snapshot: &[IntentState],
    params: &IntentDynamicsParams,
) -> f64 {
    let user = &grid.users[index];
    let pressure: f64 = grid
        .neighbors(user.cell)
        .into_iter()
        .map(|c| cross_effect_between(user.intent, snapshot[grid.lattice.index(c)], params))
        .sum();
    (user.mu + params.rho + pressure).clamp(0.0, 1.0)
}

/// Maps one uniform draw `u ∈ [0,1)` to the next intent.
///
/// Forward jumps of one, two and three levels are tried in that order with
/// probabilities `mu`, `mu²`, `mu³`, each conditional on the previous ones failing
/// (infeasible jumps are skipped). If none fires, a one-level backward jump happens
/// with probability `epsilon` from Informational or Navigational. Transactional
/// users never move here; they leave through a completed action.
pub fn sample_transition(intent: IntentState, mu: f64, epsilon: f64, u: f64) -> IntentState {
    if intent == IntentState::Transactional {
        return intent;
    }
    let level = intent.level();
    let mut acc = 0.0;
    let mut remaining = 1.0;
    let mut power = 1.0;
    for gap in 1..=3u8 {
        power *= mu;
        if level + gap > 3 {
            break;
        }
        let p = remaining * power;
        acc += p;
        if u < acc {
            return IntentState::ALL[(level + gap) as usize];
        }
        remaining *= 1.0 - power;
    }
    if matches!(intent, IntentState::Informational | IntentState::Navigational) {
        acc += remaining * epsilon;
        if u < acc {
            return IntentState::ALL[(level - 1) as usize];
        }
    }
    intent
}

/// Advances every user one stage, synchronously against the current snapshot.
///
/// Consumes exactly one uniform per user, in id order.
pub fn step_intent<R: Rng + ?Sized>(
    grid: &mut UserGrid,
    params: &IntentDynamicsParams,
    rng: &mut R,
) {
    let snapshot: Vec<IntentState> = grid.users.iter().map(|u| u.intent).collect();
    let mus: Vec<f64> = (0..grid.users.len())
        .map(|i| accumulated_mu(grid, i, &snapshot, params))
        .collect();
    for (user, mu) in grid.users.iter_mut().zip(mus) {
        let u: f64 = rng.random();
        let next = sample_transition(user.intent, mu, params.epsilon, u);
        if next != user.intent {
            user.intent = next;
            user.mu = params.mu0;
        } else {
            user.mu = mu;
        }
        debug_assert!((0.0..=1.0).contains(&user.mu));
    }
}

/// Emits this stage's queries in user-id then topic order.
///
/// Each (user, topic) pair fires with probability `interest × rate`; latent users
/// stay silent. One uniform is consumed per pair whether or not the user is latent.
pub fn generate_queries<R: Rng + ?Sized>(grid: &UserGrid, rate: f64, rng: &mut R) -> Vec<Query> {
    let mut out = Vec::new();
    for user in &grid.users {
        for topic in Topic::ALL {
            let u: f64 = rng.random();
            if user.intent != IntentState::Latent && u < user.interests.weight(topic) * rate {
                out.push(Query::new(user.id, topic, user.intent));
            }
        }
    }
    out
}
