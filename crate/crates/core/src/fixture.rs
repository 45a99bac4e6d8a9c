//! Seeded synthetic leagues in the canonical raw-file schema.

use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ingest::{parse_dataset_with, IngestConfig, RawDataset, DEFAULT_LEAGUE};
use crate::model::EventType;

const CLUBS: [&str; 40] = [
    "Aurora", "Borealis", "Cascata", "Dolomiti", "Etruria", "Falconara", "Girasole", "Orizzonte",
    "Ionica", "Laguna", "Maremma", "Nebbia", "Olivastra", "Pineta", "Quercia", "Riviera", "Scogliera",
    "Tramonto", "Uliveto", "Vesuvio", "Zefiro", "Ametista", "Brughiera", "Corallo", "Duna", "Ebano",
    "Fiordaliso", "Granito", "Lampara", "Mistral", "Nuraghe", "Ossidiana", "Papavero", "Sorgente",
    "Tempesta", "Valanga", "Zagara", "Basalto", "Calanco", "Libeccio",
];
const SUFFIXES: [&str; 4] = ["FC", "Calcio", "AC", "Sporting"];

/// Mean per-team per-match count of each tracked event type at density 1.
fn event_mean(t: EventType) -> f64 {
    match t {
        EventType::AirDuel => 25.0,
        EventType::GroundLooseBallDuel => 20.0,
        EventType::GroundDefendingDuel => 30.0,
        EventType::GroundAttackingDuel => 30.0,
        EventType::Touch => 20.0,
        EventType::Clearance => 10.0,
        EventType::Shot => 6.0,
        EventType::SimplePass => 180.0,
        EventType::HighPass => 20.0,
        EventType::HeadPass => 8.0,
        EventType::Acceleration => 6.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOptions {
    /// Multiplier on the per-match event volume.
    pub event_density: f64,
    /// Add untracked event types and events without their anchored coordinate.
    pub noise: bool,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions {
            event_density: 1.0,
            noise: true,
        }
    }
}

impl FixtureOptions {
    /// About a tenth of the default event volume; enough for every type to
    /// appear in most matches.
    pub fn sparse() -> Self {
        FixtureOptions {
            event_density: 0.1,
            noise: true,
        }
    }
}

/// The four raw files of a league, serialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFiles {
    pub matches: Vec<u8>,
    pub events: Vec<u8>,
    pub teams: Vec<u8>,
    pub players: Vec<u8>,
}

impl RawFiles {
    pub const NAMES: [&'static str; 4] = ["matches.json", "events.json", "teams.json", "players.json"];

    pub fn parse(&self) -> Result<RawDataset> {
        self.parse_with(&IngestConfig::default())
    }

    pub fn parse_with(&self, config: &IngestConfig) -> Result<RawDataset> {
        parse_dataset_with(config, &self.matches, &self.events, &self.teams, &self.players)
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let contents = [&self.matches, &self.events, &self.teams, &self.players];
        Self::NAMES
            .iter()
            .zip(contents)
            .map(|(name, bytes)| {
                let path = dir.join(name);
                std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }

    pub fn read_from(dir: &Path) -> Result<RawFiles> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read(&path).map_err(|e| Error::io(&path, e))
        };
        Ok(RawFiles {
            matches: read("matches.json")?,
            events: read("events.json")?,
            teams: read("teams.json")?,
            players: read("players.json")?,
        })
    }
}

pub fn team_name(index: usize) -> String {
    format!("{} {}", CLUBS[index], SUFFIXES[index % SUFFIXES.len()])
}

/// Round-robin pairings by the circle method; the second pass through the
/// rounds swaps home and away. Returns (home, away) index pairs per gameweek.
pub fn round_robin(n_teams: usize, n_gameweeks: usize) -> Vec<Vec<(usize, usize)>> {
    let rounds = n_teams - 1;
    let mut ring: Vec<usize> = (0..n_teams).collect();
    let mut base = Vec::with_capacity(rounds);
    for r in 0..rounds {
        let pairs: Vec<(usize, usize)> = (0..n_teams / 2)
            .map(|i| {
                let (a, b) = (ring[i], ring[n_teams - 1 - i]);
                // Alternate who hosts so nobody is always home.
                if (r + i) % 2 == 0 {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        base.push(pairs);
        let last = ring.pop().unwrap_or_default();
        ring.insert(1, last);
    }
    (0..n_gameweeks)
        .map(|g| {
            let leg = g / rounds;
            base[g % rounds]
                .iter()
                .map(|&(h, a)| if leg.is_multiple_of(2) { (h, a) } else { (a, h) })
                .collect()
        })
        .collect()
}

pub fn fixture_gen(n_teams: usize, n_gameweeks: usize, seed: u64) -> Result<RawFiles> {
    fixture_gen_with(n_teams, n_gameweeks, seed, &FixtureOptions::default())
}

pub fn fixture_gen_with(
    n_teams: usize,
    n_gameweeks: usize,
    seed: u64,
    options: &FixtureOptions,
) -> Result<RawFiles> {
    if n_teams < 2 || !n_teams.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "team count must be even and at least 2, got {n_teams}"
        )));
    }
    if n_teams > CLUBS.len() {
        return Err(Error::domain(format!(
            "at most {} synthetic teams are available",
            CLUBS.len()
        )));
    }
    if n_gameweeks == 0 {
        return Err(Error::domain("need at least one gameweek"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const SQUAD: u64 = 14;
    let team_id = |i: usize| 1000 + i as u64;
    let player_id = |i: usize, j: u64| team_id(i) * 100 + j;

    let strength: Vec<f64> = (0..n_teams).map(|_| rng.random_range(0.7..1.9)).collect();
    let teams: Vec<Value> = (0..n_teams)
        .map(|i| json!({"team_id": team_id(i), "name": team_name(i), "competition": DEFAULT_LEAGUE}))
        .collect();
    let positions = ["Goalkeeper", "Defender", "Midfielder", "Forward"];
    let players: Vec<Value> = (0..n_teams)
        .flat_map(|i| {
            (0..SQUAD).map(move |j| (i, j))
        })
        .map(|(i, j)| {
            json!({
                "player_id": player_id(i, j),
                "name": format!("{} player {}", CLUBS[i], j + 1),
                "current_team_id": team_id(i),
                "position": positions[(j as usize).min(1 + j as usize % 3)],
                "age": 18 + (j * 7 + i as u64) % 17,
            })
        })
        .collect();

    let mut matches = Vec::new();
    let mut events = Vec::new();
    let mut next_event = 1u64;
    let mut next_match = 50_000u64;
    for (g, round) in round_robin(n_teams, n_gameweeks).into_iter().enumerate() {
        for (home, away) in round {
            let match_id = next_match;
            next_match += 1;
            let goals = |rng: &mut ChaCha8Rng, attack: f64, defence: f64| -> u32 {
                let lambda = (1.35 * attack / defence).clamp(0.2, 4.0);
                let draw: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
                (draw as u32).min(7)
            };
            let home_goals = goals(&mut rng, strength[home] * 1.1, strength[away]);
            let away_goals = goals(&mut rng, strength[away], strength[home]);

            let mut lineups = Vec::new();
            let mut impactful = Vec::new();
            for (side, (team, scored)) in [(home, home_goals), (away, away_goals)].into_iter().enumerate() {
                let opp = if side == 0 { away } else { home };
                let mut off_minute = [90u32; 11];
                let mut subs = Vec::new();
                for k in 0..3u64 {
                    let minute = rng.random_range(46..=85);
                    let out = rng.random_range(1..11usize);
                    if off_minute[out] != 90 {
                        continue;
                    }
                    off_minute[out] = minute;
                    subs.push((11 + k, minute));
                }
                for j in 0..11u64 {
                    lineups.push(json!({"player_id": player_id(team, j), "team_id": team_id(team),
                        "starter": true, "minute_on": 0, "minute_off": off_minute[j as usize]}));
                }
                for j in 11..SQUAD {
                    match subs.iter().find(|s| s.0 == j) {
                        Some(&(_, minute)) => lineups.push(json!({"player_id": player_id(team, j),
                            "team_id": team_id(team), "starter": false, "minute_on": minute, "minute_off": 90})),
                        None => lineups.push(json!({"player_id": player_id(team, j),
                            "team_id": team_id(team), "starter": false, "minute_on": null, "minute_off": null})),
                    }
                }
                for &(j, minute) in &subs {
                    impactful.push(json!({"kind": "substitution", "player_id": player_id(team, j), "minute": minute}));
                }
                for _ in 0..scored {
                    let minute = rng.random_range(1..=90);
                    if rng.random_bool(0.05) {
                        let scorer = player_id(opp, rng.random_range(1..11));
                        impactful.push(json!({"kind": "goal", "player_id": scorer, "minute": minute, "own_goal": true}));
                    } else {
                        let scorer = player_id(team, rng.random_range(1..11));
                        impactful.push(json!({"kind": "goal", "player_id": scorer, "minute": minute}));
                    }
                }
                for j in 0..11 {
                    if rng.random_bool(0.12) {
                        let minute = rng.random_range(1..=90);
                        impactful.push(json!({"kind": "yellow_card", "player_id": player_id(team, j), "minute": minute}));
                    }
                }

                let squad: Vec<u64> = (0..11).map(|j| player_id(team, j)).collect();
                let mut push_event = |rng: &mut ChaCha8Rng, name: &str, with_dest: bool| {
                    let player = *squad.choose(rng).expect("non-empty squad");
                    let src = json!({"x": rng.random_range(0..=100u8), "y": rng.random_range(0..=100u8)});
                    let dst = if with_dest {
                        json!({"x": rng.random_range(0..=100u8), "y": rng.random_range(0..=100u8)})
                    } else {
                        Value::Null
                    };
                    events.push(json!({"event_id": next_event, "match_id": match_id, "player_id": player,
                        "team_id": team_id(team), "event_type": name, "source": src, "destination": dst}));
                    next_event += 1;
                };
                for t in EventType::ALL {
                    let lambda = event_mean(t) * options.event_density * strength[team].sqrt();
                    let n: f64 = Poisson::new(lambda.max(0.01)).expect("positive rate").sample(&mut rng);
                    for _ in 0..n as u32 {
                        push_event(&mut rng, t.name(), true);
                    }
                }
                if options.noise {
                    for _ in 0..rng.random_range(0..3) {
                        push_event(&mut rng, "Foul", false);
                    }
                    if rng.random_bool(0.3) {
                        push_event(&mut rng, EventType::HighPass.name(), false);
                    }
                }
            }
            matches.push(json!({
                "match_id": match_id,
                "gameweek": g + 1,
                "date": format!("2017-{:02}-{:02}T18:45:00Z", 8 + g / 4, 1 + (g % 4) * 7),
                "home_team_id": team_id(home),
                "away_team_id": team_id(away),
                "home_goals": home_goals,
                "away_goals": away_goals,
                "lineups": lineups,
                "impactful_events": impactful,
            }));
        }
    }

    let to_bytes = |v: Vec<Value>| serde_json::to_vec(&v).expect("json values serialize");
    Ok(RawFiles {
        matches: to_bytes(matches),
        events: to_bytes(events),
        teams: to_bytes(teams),
        players: to_bytes(players),
    })
}
