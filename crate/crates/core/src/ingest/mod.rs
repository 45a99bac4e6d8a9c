//! Raw input parsing and validation.
//!
//! Four JSON arrays feed the engine: matches, events, teams and players. The
//! canonical record layout is the one deserialized below; a [`FieldMapping`]
//! renames top-level keys per file, and [`Layout::Wyscout`] converts the
//! public Wyscout export layout wholesale.

mod wyscout;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{EventId, EventType, MatchId, PlayerId, Side, TeamId};
use crate::pitch_grid::{AnchorKind, AnchorTable, Located};

pub const DEFAULT_LEAGUE: &str = "Italy";
pub const DEFAULT_MAX_GAMEWEEK: u32 = 10;
pub const MAX_MINUTE: u32 = 130;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    fn in_range(self) -> bool {
        (0.0..=100.0).contains(&self.x) && (0.0..=100.0).contains(&self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineupEntry {
    pub player_id: PlayerId,
    /// Falls back to the player's current team when absent.
    #[serde(default)]
    pub team_id: Option<TeamId>,
    pub starter: bool,
    /// `None` for a substitute who never came on.
    #[serde(default)]
    pub minute_on: Option<u32>,
    #[serde(default)]
    pub minute_off: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpactKind {
    Goal,
    YellowCard,
    RedCard,
    Substitution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactfulEvent {
    pub kind: ImpactKind,
    pub player_id: PlayerId,
    pub minute: u32,
    #[serde(default)]
    pub own_goal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMatch {
    pub match_id: MatchId,
    pub gameweek: u32,
    pub date: String,
    pub home_team_id: TeamId,
    pub away_team_id: TeamId,
    #[serde(default)]
    pub home_goals: Option<u32>,
    #[serde(default)]
    pub away_goals: Option<u32>,
    #[serde(default)]
    pub lineups: Vec<LineupEntry>,
    #[serde(default)]
    pub impactful_events: Vec<ImpactfulEvent>,
}

impl RawMatch {
    pub fn side_of(&self, team: TeamId) -> Option<Side> {
        if team == self.home_team_id {
            Some(Side::Home)
        } else if team == self.away_team_id {
            Some(Side::Away)
        } else {
            None
        }
    }

    pub fn opponent_of(&self, team: TeamId) -> Option<TeamId> {
        match self.side_of(team)? {
            Side::Home => Some(self.away_team_id),
            Side::Away => Some(self.home_team_id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_id: EventId,
    pub match_id: MatchId,
    pub player_id: PlayerId,
    pub team_id: TeamId,
    pub event_type: EventType,
    pub source_xy: Option<Point>,
    pub dest_xy: Option<Point>,
}

impl Located for EventRecord {
    fn event_id(&self) -> u64 {
        self.event_id.0
    }
    fn event_type(&self) -> EventType {
        self.event_type
    }
    fn source_xy(&self) -> Option<(f64, f64)> {
        self.source_xy.map(|p| (p.x, p.y))
    }
    fn dest_xy(&self) -> Option<(f64, f64)> {
        self.dest_xy.map(|p| (p.x, p.y))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamInfo {
    pub team_id: TeamId,
    pub name: String,
    pub competition: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerInfo {
    pub player_id: PlayerId,
    pub name: String,
    pub current_team_id: TeamId,
    pub position: String,
    pub age: u32,
}

/// Event as found in the canonical events file, before type filtering.
#[derive(Debug, Clone, Deserialize)]
struct RawEventJson {
    event_id: EventId,
    match_id: MatchId,
    player_id: PlayerId,
    team_id: TeamId,
    event_type: String,
    #[serde(default)]
    source: Option<Point>,
    #[serde(default)]
    destination: Option<Point>,
}

/// Counts of everything dropped during ingest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardReport {
    /// Events whose type is not one of the eleven tracked types.
    pub type_excluded: usize,
    /// Events whose anchored coordinate is absent or outside [0, 100].
    pub coordinates_missing: usize,
    pub gameweek_filtered_matches: usize,
    pub gameweek_filtered_events: usize,
    pub league_filtered_matches: usize,
    pub league_filtered_events: usize,
}

impl DiscardReport {
    pub fn dropped_events(&self) -> usize {
        self.type_excluded
            + self.coordinates_missing
            + self.gameweek_filtered_events
            + self.league_filtered_events
    }

    pub fn is_empty(&self) -> bool {
        *self == DiscardReport::default()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Canonical,
    Wyscout,
}

/// Per-file renames from source key to canonical key, applied to every
/// top-level object before deserialization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldMapping {
    pub layout: Layout,
    pub matches: BTreeMap<String, String>,
    pub events: BTreeMap<String, String>,
    pub teams: BTreeMap<String, String>,
    pub players: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    /// Competition string a team must carry to be part of the league.
    pub league: String,
    pub max_gameweek: u32,
    pub anchors: AnchorTable,
    pub mapping: FieldMapping,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            league: DEFAULT_LEAGUE.to_string(),
            max_gameweek: DEFAULT_MAX_GAMEWEEK,
            anchors: AnchorTable::default(),
            mapping: FieldMapping::default(),
        }
    }
}

/// One league's validated records, ordered by (gameweek, match, id).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawDataset {
    pub league: String,
    pub max_gameweek: u32,
    pub anchors: AnchorTable,
    pub matches: Vec<RawMatch>,
    pub events: Vec<EventRecord>,
    pub teams: Vec<TeamInfo>,
    pub players: Vec<PlayerInfo>,
    pub input_event_count: usize,
    pub discards: DiscardReport,
}

pub fn discard_report(dataset: &RawDataset) -> DiscardReport {
    dataset.discards
}

/// Parse the four raw files with the default configuration.
pub fn parse_dataset(
    matches: &[u8],
    events: &[u8],
    teams: &[u8],
    players: &[u8],
) -> Result<RawDataset> {
    parse_dataset_with(&IngestConfig::default(), matches, events, teams, players)
}

pub fn parse_dataset_with(
    config: &IngestConfig,
    matches: &[u8],
    events: &[u8],
    teams: &[u8],
    players: &[u8],
) -> Result<RawDataset> {
    let mapping = &config.mapping;
    let (matches, events, teams, players): (
        Vec<RawMatch>,
        Vec<RawEventJson>,
        Vec<TeamInfo>,
        Vec<PlayerInfo>,
    ) = match mapping.layout {
        Layout::Canonical => (
            read_records("matches.json", matches, &mapping.matches)?,
            read_records("events.json", events, &mapping.events)?,
            read_records("teams.json", teams, &mapping.teams)?,
            read_records("players.json", players, &mapping.players)?,
        ),
        Layout::Wyscout => (
            wyscout::matches(read_array("matches.json", matches, &mapping.matches)?)?,
            wyscout::events(read_array("events.json", events, &mapping.events)?)?,
            wyscout::teams(read_array("teams.json", teams, &mapping.teams)?)?,
            wyscout::players(read_array("players.json", players, &mapping.players)?)?,
        ),
    };
    assemble(config, matches, events, teams, players)
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = bytes
        .split_inclusive(|&b| b == b'\n')
        .take(line - 1)
        .map(<[u8]>::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

fn parse_error(file: &str, bytes: &[u8], err: &serde_json::Error) -> Error {
    Error::Parse {
        file: file.to_string(),
        offset: byte_offset(bytes, err.line(), err.column()),
        message: err.to_string(),
    }
}

fn read_array(file: &str, bytes: &[u8], renames: &BTreeMap<String, String>) -> Result<Vec<Value>> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| parse_error(file, bytes, &e))?;
    let Value::Array(mut items) = value else {
        return Err(Error::Parse {
            file: file.to_string(),
            offset: 0,
            message: "top-level value must be a JSON array".to_string(),
        });
    };
    if !renames.is_empty() {
        for item in &mut items {
            if let Value::Object(obj) = item {
                for (from, to) in renames {
                    if let Some(v) = obj.remove(from) {
                        obj.insert(to.clone(), v);
                    }
                }
            }
        }
    }
    Ok(items)
}

fn read_records<T: DeserializeOwned>(
    file: &str,
    bytes: &[u8],
    renames: &BTreeMap<String, String>,
) -> Result<Vec<T>> {
    if renames.is_empty() {
        // Direct deserialization keeps byte offsets for schema errors too.
        return serde_json::from_slice(bytes).map_err(|e| parse_error(file, bytes, &e));
    }
    read_array(file, bytes, renames)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value(v).map_err(|e| Error::Parse {
                file: file.to_string(),
                offset: 0,
                message: format!("record {i}: {e}"),
            })
        })
        .collect()
}

fn check_match(m: &RawMatch) -> Result<()> {
    let bad = |what: &str| {
        Err(Error::integrity(
            format!("match {what}"),
            vec![format!("match {}", m.match_id)],
        ))
    };
    if m.home_team_id == m.away_team_id {
        return bad("has identical home and away team");
    }
    let lineup_minutes = m
        .lineups
        .iter()
        .flat_map(|l| [l.minute_on, l.minute_off])
        .flatten();
    let impact_minutes = m.impactful_events.iter().map(|e| e.minute);
    if lineup_minutes.chain(impact_minutes).any(|min| min > MAX_MINUTE) {
        return bad("has a minute outside [0, 130]");
    }
    Ok(())
}

fn assemble(
    config: &IngestConfig,
    matches: Vec<RawMatch>,
    raw_events: Vec<RawEventJson>,
    teams: Vec<TeamInfo>,
    players: Vec<PlayerInfo>,
) -> Result<RawDataset> {
    let mut discards = DiscardReport::default();

    let mut team_ids = HashSet::new();
    let mut dup = BTreeSet::new();
    for t in &teams {
        if !team_ids.insert(t.team_id) {
            dup.insert(format!("team {}", t.team_id));
        }
        if t.name.trim().is_empty() {
            dup.insert(format!("team {} (empty name)", t.team_id));
        }
    }
    let mut player_ids = HashSet::new();
    for p in &players {
        if !player_ids.insert(p.player_id) {
            dup.insert(format!("player {}", p.player_id));
        }
    }
    if !dup.is_empty() {
        return Err(Error::integrity(
            "duplicate or invalid team/player records",
            dup.into_iter().collect(),
        ));
    }

    let league = config.league.trim();
    let league_teams: HashSet<TeamId> = teams
        .iter()
        .filter(|t| t.competition.trim() == league)
        .map(|t| t.team_id)
        .collect();

    // Every match, kept or not, so events can be checked against it.
    let mut all_matches: HashMap<MatchId, MatchFate> = HashMap::new();
    let mut unknown = BTreeSet::new();
    let mut kept = Vec::new();
    for m in matches {
        for team in [m.home_team_id, m.away_team_id] {
            if !team_ids.contains(&team) {
                unknown.insert(format!("team {team}"));
            }
        }
        let in_league =
            league_teams.contains(&m.home_team_id) && league_teams.contains(&m.away_team_id);
        let in_window = (1..=config.max_gameweek).contains(&m.gameweek);
        let fate = if !in_league {
            discards.league_filtered_matches += 1;
            MatchFate::OtherLeague
        } else if !in_window {
            discards.gameweek_filtered_matches += 1;
            MatchFate::OutsideWindow
        } else {
            check_match(&m)?;
            MatchFate::Kept
        };
        all_matches.insert(m.match_id, fate);
        if fate == MatchFate::Kept {
            kept.push(m);
        }
    }
    if !unknown.is_empty() {
        return Err(Error::integrity(
            "matches reference unknown teams",
            unknown.into_iter().collect(),
        ));
    }
    if kept.is_empty() {
        return Err(Error::EmptyDataset {
            league: league.to_string(),
            max_gameweek: config.max_gameweek,
        });
    }
    kept.sort_by_key(|m| (m.gameweek, m.match_id));
    let kept_by_id: HashMap<MatchId, &RawMatch> = kept.iter().map(|m| (m.match_id, m)).collect();

    // Players referenced by kept matches must exist.
    for m in &kept {
        let referenced = m
            .lineups
            .iter()
            .map(|l| l.player_id)
            .chain(m.impactful_events.iter().map(|e| e.player_id));
        for p in referenced {
            if !player_ids.contains(&p) {
                unknown.insert(format!("player {p}"));
            }
        }
    }

    let input_event_count = raw_events.len();
    let mut events = Vec::new();
    for e in raw_events {
        match all_matches.get(&e.match_id) {
            None => {
                unknown.insert(format!("match {}", e.match_id));
                continue;
            }
            Some(MatchFate::OtherLeague) => {
                discards.league_filtered_events += 1;
                continue;
            }
            Some(MatchFate::OutsideWindow) => {
                discards.gameweek_filtered_events += 1;
                continue;
            }
            Some(MatchFate::Kept) => {}
        }
        let Some(event_type) = EventType::from_name(e.event_type.trim()) else {
            discards.type_excluded += 1;
            continue;
        };
        let anchored = match config.anchors.anchor_for(event_type) {
            AnchorKind::Source => e.source,
            AnchorKind::Destination => e.destination,
        };
        if !anchored.is_some_and(Point::in_range) {
            discards.coordinates_missing += 1;
            continue;
        }
        let m = kept_by_id[&e.match_id];
        if m.side_of(e.team_id).is_none() {
            unknown.insert(format!("team {} in match {}", e.team_id, e.match_id));
        }
        if !player_ids.contains(&e.player_id) {
            unknown.insert(format!("player {}", e.player_id));
        }
        let keep_point = |p: Option<Point>| p.filter(|p| p.in_range());
        events.push((
            m.gameweek,
            EventRecord {
                event_id: e.event_id,
                match_id: e.match_id,
                player_id: e.player_id,
                team_id: e.team_id,
                event_type,
                source_xy: keep_point(e.source),
                dest_xy: keep_point(e.destination),
            },
        ));
    }
    if !unknown.is_empty() {
        return Err(Error::integrity(
            "records reference unknown ids",
            unknown.into_iter().collect(),
        ));
    }
    events.sort_by_key(|(gw, e)| (*gw, e.match_id, e.event_id));
    let events: Vec<EventRecord> = events.into_iter().map(|(_, e)| e).collect();

    let mut teams: Vec<TeamInfo> = teams
        .into_iter()
        .filter(|t| league_teams.contains(&t.team_id))
        .collect();
    teams.sort_by_key(|t| t.team_id);

    let mut referenced_players: HashSet<PlayerId> = events.iter().map(|e| e.player_id).collect();
    for m in &kept {
        referenced_players.extend(m.lineups.iter().map(|l| l.player_id));
        referenced_players.extend(m.impactful_events.iter().map(|e| e.player_id));
    }
    let mut players: Vec<PlayerInfo> = players
        .into_iter()
        .filter(|p| {
            league_teams.contains(&p.current_team_id) || referenced_players.contains(&p.player_id)
        })
        .collect();
    players.sort_by_key(|p| p.player_id);

    Ok(RawDataset {
        league: league.to_string(),
        max_gameweek: config.max_gameweek,
        anchors: config.anchors.clone(),
        matches: kept,
        events,
        teams,
        players,
        input_event_count,
        discards,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MatchFate {
    Kept,
    OutsideWindow,
    OtherLeague,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn teams() -> Value {
        json!([
            {"team_id": 1, "name": "Alpha FC", "competition": "Italy"},
            {"team_id": 2, "name": "Beta FC", "competition": "Italy"},
            {"team_id": 9, "name": "Gamma CF", "competition": "Spain"},
            {"team_id": 8, "name": "Delta CF", "competition": "Spain"}
        ])
    }

    fn players() -> Value {
        json!([
            {"player_id": 10, "name": "A. One", "current_team_id": 1, "position": "Forward", "age": 25},
            {"player_id": 20, "name": "B. Two", "current_team_id": 2, "position": "Defender", "age": 30}
        ])
    }

    fn one_match(gameweek: u32) -> Value {
        json!({
            "match_id": 100, "gameweek": gameweek, "date": "2017-08-19T18:45:00Z",
            "home_team_id": 1, "away_team_id": 2, "home_goals": 1, "away_goals": 0,
            "lineups": [
                {"player_id": 10, "starter": true, "minute_on": 0, "minute_off": 90},
                {"player_id": 20, "starter": true, "minute_on": 0, "minute_off": 90}
            ],
            "impactful_events": [{"kind": "goal", "player_id": 10, "minute": 33}]
        })
    }

    fn shot(id: u64) -> Value {
        json!({"event_id": id, "match_id": 100, "player_id": 10, "team_id": 1,
               "event_type": "Shot", "source": {"x": 88.0, "y": 45.0}})
    }

    fn bytes(v: &Value) -> Vec<u8> {
        serde_json::to_vec(v).unwrap()
    }

    fn parse(matches: &Value, events: &Value) -> Result<RawDataset> {
        parse_dataset(
            &bytes(matches),
            &bytes(events),
            &bytes(&teams()),
            &bytes(&players()),
        )
    }

    #[test]
    fn minimal_dataset() {
        let ds = parse(&json!([one_match(1)]), &json!([shot(1)])).unwrap();
        assert_eq!(ds.matches.len(), 1);
        assert_eq!(ds.events.len(), 1);
        assert_eq!(ds.teams.len(), 2);
        assert!(discard_report(&ds).is_empty());
    }

    #[test]
    fn excluded_type_is_counted() {
        let mut foul = shot(2);
        foul["event_type"] = json!("Foul");
        let ds = parse(&json!([one_match(1)]), &json!([shot(1), foul])).unwrap();
        assert_eq!(ds.events.len(), 1);
        assert_eq!(ds.discards.type_excluded, 1);
        assert_eq!(ds.input_event_count, ds.events.len() + ds.discards.dropped_events());
    }

    #[test]
    fn three_excluded() {
        let evs: Vec<Value> = (1..=3)
            .map(|i| {
                let mut e = shot(i);
                e["event_type"] = json!("Offside");
                e
            })
            .chain([shot(9)])
            .collect();
        let ds = parse(&json!([one_match(1)]), &Value::Array(evs)).unwrap();
        assert_eq!(
            ds.discards,
            DiscardReport {
                type_excluded: 3,
                ..Default::default()
            }
        );
    }

    #[test]
    fn unknown_match_is_integrity_error() {
        let mut e = shot(1);
        e["match_id"] = json!(555);
        match parse(&json!([one_match(1)]), &json!([e])) {
            Err(Error::Integrity { ids, .. }) => assert_eq!(ids, vec!["match 555".to_string()]),
            other => panic!("expected integrity error, got {other:?}"),
        }
    }

    #[test]
    fn gameweek_filter_counts_match_and_events() {
        let mut late = one_match(12);
        late["match_id"] = json!(101);
        let mut late_ev = shot(5);
        late_ev["match_id"] = json!(101);
        let ds = parse(&json!([one_match(1), late]), &json!([shot(1), late_ev])).unwrap();
        assert_eq!(ds.discards.gameweek_filtered_matches, 1);
        assert_eq!(ds.discards.gameweek_filtered_events, 1);
        assert_eq!(ds.matches.len(), 1);
    }

    #[test]
    fn other_league_is_filtered() {
        let mut spanish = one_match(1);
        spanish["match_id"] = json!(300);
        spanish["home_team_id"] = json!(9);
        spanish["away_team_id"] = json!(8);
        spanish["lineups"] = json!([]);
        spanish["impactful_events"] = json!([]);
        let ds = parse(&json!([one_match(1), spanish]), &json!([shot(1)])).unwrap();
        assert_eq!(ds.discards.league_filtered_matches, 1);
        assert_eq!(ds.matches.len(), 1);
    }

    #[test]
    fn missing_anchor_coordinate_is_dropped() {
        let pass = json!({"event_id": 3, "match_id": 100, "player_id": 10, "team_id": 1,
                          "event_type": "Simple pass", "source": {"x": 10.0, "y": 10.0}});
        let ds = parse(&json!([one_match(1)]), &json!([shot(1), pass])).unwrap();
        assert_eq!(ds.discards.coordinates_missing, 1);
    }

    #[test]
    fn malformed_json_reports_offset() {
        let bad = b"[{\"match_id\": 1,, }]";
        let err = parse_dataset(bad, b"[]", &bytes(&teams()), &bytes(&players())).unwrap_err();
        match err {
            Error::Parse { file, offset, .. } => {
                assert_eq!(file, "matches.json");
                assert_eq!(offset, 16);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_after_filter() {
        let err = parse(&json!([one_match(11)]), &json!([])).unwrap_err();
        assert!(matches!(err, Error::EmptyDataset { .. }));
    }

    #[test]
    fn unknown_player_in_event() {
        let mut e = shot(1);
        e["player_id"] = json!(77);
        let err = parse(&json!([one_match(1)]), &json!([e])).unwrap_err();
        assert!(err.to_string().contains("player 77"), "{err}");
    }

    #[test]
    fn renamed_fields() {
        let teams = json!([
            {"id": 1, "name": "Alpha FC", "league": "Italy"},
            {"id": 2, "name": "Beta FC", "league": "Italy"}
        ]);
        let mut config = IngestConfig::default();
        config.mapping.teams = [("id", "team_id"), ("league", "competition")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let ds = parse_dataset_with(
            &config,
            &bytes(&json!([one_match(1)])),
            &bytes(&json!([shot(1)])),
            &bytes(&teams),
            &bytes(&players()),
        )
        .unwrap();
        assert_eq!(ds.teams[0].name, "Alpha FC");
    }

    #[test]
    fn parsing_is_deterministic() {
        let evs = json!([shot(3), shot(1), shot(2)]);
        let a = parse(&json!([one_match(1)]), &evs).unwrap();
        let b = parse(&json!([one_match(1)]), &evs).unwrap();
        assert_eq!(a, b);
        let ids: Vec<u64> = a.events.iter().map(|e| e.event_id.0).collect();
        assert_eq!(ids, vec![1, 2, 3]);
    }
}
