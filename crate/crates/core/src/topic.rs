use core::fmt;
use core::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// Query topics served by the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topic {
    Video,
    Music,
    Scholar,
    Literature,
}

impl Topic {
    pub const ALL: [Topic; 4] = [Topic::Video, Topic::Music, Topic::Scholar, Topic::Literature];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Topic::Video => "video",
            Topic::Music => "music",
            Topic::Scholar => "scholar",
            Topic::Literature => "literature",
        }
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One value per topic, serialized as a keyed record.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicMap<T> {
    pub video: T,
    pub music: T,
    pub scholar: T,
    pub literature: T,
}

impl<T> TopicMap<T> {
    pub fn from_fn(mut f: impl FnMut(Topic) -> T) -> Self {
        TopicMap {
            video: f(Topic::Video),
            music: f(Topic::Music),
            scholar: f(Topic::Scholar),
            literature: f(Topic::Literature),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Topic, &T)> {
        Topic::ALL.into_iter().map(move |t| (t, &self[t]))
    }

    pub fn map<U>(&self, mut f: impl FnMut(Topic, &T) -> U) -> TopicMap<U> {
        TopicMap::from_fn(|t| f(t, &self[t]))
    }
}

impl<T> Index<Topic> for TopicMap<T> {
    type Output = T;

    fn index(&self, topic: Topic) -> &T {
        match topic {
            Topic::Video => &self.video,
            Topic::Music => &self.music,
            Topic::Scholar => &self.scholar,
            Topic::Literature => &self.literature,
        }
    }
}

impl<T> IndexMut<Topic> for TopicMap<T> {
    fn index_mut(&mut self, topic: Topic) -> &mut T {
        match topic {
            Topic::Video => &mut self.video,
            Topic::Music => &mut self.music,
            Topic::Scholar => &mut self.scholar,
            Topic::Literature => &mut self.literature,
        }
    }
}
