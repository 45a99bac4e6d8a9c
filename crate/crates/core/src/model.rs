//! Identifiers and the tracked event vocabulary shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl FromStr for $name {
            type Err = std::num::ParseIntError;

            fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
                s.trim().parse().map($name)
            }
        }
    };
}

id_type!(MatchId);
id_type!(TeamId);
id_type!(PlayerId);
id_type!(EventId);

/// The eleven in-match event types tracked by the engine. Everything else in
/// a raw event stream is discarded at ingest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventType {
    AirDuel,
    GroundLooseBallDuel,
    GroundDefendingDuel,
    GroundAttackingDuel,
    Touch,
    Clearance,
    Shot,
    SimplePass,
    HighPass,
    HeadPass,
    Acceleration,
}

impl EventType {
    pub const ALL: [EventType; 11] = [
        EventType::AirDuel,
        EventType::GroundLooseBallDuel,
        EventType::GroundDefendingDuel,
        EventType::GroundAttackingDuel,
        EventType::Touch,
        EventType::Clearance,
        EventType::Shot,
        EventType::SimplePass,
        EventType::HighPass,
        EventType::HeadPass,
        EventType::Acceleration,
    ];

    /// Name as it appears in raw data and in corpus text.
    pub fn name(self) -> &'static str {
        match self {
            EventType::AirDuel => "Air duel",
            EventType::GroundLooseBallDuel => "Ground loose ball duel",
            EventType::GroundDefendingDuel => "Ground defending duel",
            EventType::GroundAttackingDuel => "Ground attacking duel",
            EventType::Touch => "Touch",
            EventType::Clearance => "Clearance",
            EventType::Shot => "Shot",
            EventType::SimplePass => "Simple pass",
            EventType::HighPass => "High pass",
            EventType::HeadPass => "Head pass",
            EventType::Acceleration => "Acceleration",
        }
    }

    /// Exact-name lookup; `None` for anything outside the tracked set.
    pub fn from_name(name: &str) -> Option<EventType> {
        EventType::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EventType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EventType::from_name(s)
            .or_else(|| {
                EventType::ALL
                    .into_iter()
                    .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            })
            .ok_or_else(|| Error::domain(format!("unknown event type {s:?}")))
    }
}

impl Serialize for EventType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EventType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Home or away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Home,
    Away,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Home => "home",
            Side::Away => "away",
        }
    }
}

/// Result of a match from one team's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Draw,
    Loss,
}

impl Outcome {
    pub fn from_scores(scored: u32, conceded: u32) -> Outcome {
        match scored.cmp(&conceded) {
            std::cmp::Ordering::Greater => Outcome::Win,
            std::cmp::Ordering::Equal => Outcome::Draw,
            std::cmp::Ordering::Less => Outcome::Loss,
        }
    }

    /// Standard 3/1/0 league points.
    pub fn points(self) -> u32 {
        match self {
            Outcome::Win => 3,
            Outcome::Draw => 1,
            Outcome::Loss => 0,
        }
    }
}
