//! The five intermediate tables every later stage reads from.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ImpactKind, PlayerInfo, RawDataset, TeamInfo};
use crate::model::{EventId, EventType, MatchId, Outcome, PlayerId, Side, TeamId};
use crate::pitch_grid::{event_region_with, Region};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TeamWeekRow {
    pub match_id: MatchId,
    pub team_id: TeamId,
    pub opposing_team_id: TeamId,
    pub gameweek: u32,
    pub side: Side,
    pub goals_scored: u32,
    pub goals_conceded: u32,
    pub points: u32,
}

impl TeamWeekRow {
    pub fn outcome(&self) -> Outcome {
        Outcome::from_scores(self.goals_scored, self.goals_conceded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlayerWeekRow {
    pub match_id: MatchId,
    pub player_id: PlayerId,
    pub team_id: TeamId,
    pub opposing_team_id: TeamId,
    pub gameweek: u32,
    pub goals: u32,
    pub yellow_cards: u32,
    pub red_cards: u32,
    pub started_first_xi: bool,
    pub minutes_played: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRow {
    pub event_id: EventId,
    pub match_id: MatchId,
    pub player_id: PlayerId,
    pub team_id: TeamId,
    pub event_type: EventType,
    pub gameweek: u32,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TablesConfig {
    /// Count own goals in the scorer's personal goal tally. Team tallies
    /// always come from the match score.
    pub credit_own_goals_to_player: bool,
}

#[derive(Debug, Clone)]
pub struct Tables {
    pub league: String,
    pub teams_info: Vec<TeamInfo>,
    pub players_info: Vec<PlayerInfo>,
    pub team_week: Vec<TeamWeekRow>,
    pub player_week: Vec<PlayerWeekRow>,
    pub events: Vec<EventRow>,
    last_gameweek: u32,
    team_index: HashMap<TeamId, usize>,
    team_week_index: HashMap<(TeamId, u32), usize>,
    events_index: HashMap<(TeamId, MatchId), Vec<usize>>,
}

pub fn build_tables(dataset: &RawDataset) -> Result<Tables> {
    build_tables_with(dataset, TablesConfig::default())
}

pub fn build_tables_with(dataset: &RawDataset, config: TablesConfig) -> Result<Tables> {
    let current_team: HashMap<PlayerId, TeamId> = dataset
        .players
        .iter()
        .map(|p| (p.player_id, p.current_team_id))
        .collect();

    let mut team_week = Vec::with_capacity(dataset.matches.len() * 2);
    let mut player_week = Vec::new();
    let mut gameweek_of = HashMap::new();
    for m in &dataset.matches {
        let (Some(home_goals), Some(away_goals)) = (m.home_goals, m.away_goals) else {
            return Err(Error::integrity(
                "match without a final score",
                vec![format!("match {}", m.match_id)],
            ));
        };
        gameweek_of.insert(m.match_id, m.gameweek);
        for (team, opp, side, scored, conceded) in [
            (m.home_team_id, m.away_team_id, Side::Home, home_goals, away_goals),
            (m.away_team_id, m.home_team_id, Side::Away, away_goals, home_goals),
        ] {
            team_week.push(TeamWeekRow {
                match_id: m.match_id,
                team_id: team,
                opposing_team_id: opp,
                gameweek: m.gameweek,
                side,
                goals_scored: scored,
                goals_conceded: conceded,
                points: Outcome::from_scores(scored, conceded).points(),
            });
        }

        let mut rows: Vec<PlayerWeekRow> = Vec::new();
        let mut row_of: HashMap<PlayerId, usize> = HashMap::new();
        let mut ensure = |rows: &mut Vec<PlayerWeekRow>, player: PlayerId, team: Option<TeamId>| {
            *row_of.entry(player).or_insert_with(|| {
                let team = team
                    .or_else(|| current_team.get(&player).copied())
                    .unwrap_or(m.home_team_id);
                rows.push(PlayerWeekRow {
                    match_id: m.match_id,
                    player_id: player,
                    team_id: team,
                    opposing_team_id: m.opponent_of(team).unwrap_or(m.away_team_id),
                    gameweek: m.gameweek,
                    goals: 0,
                    yellow_cards: 0,
                    red_cards: 0,
                    started_first_xi: false,
                    minutes_played: 0,
                });
                rows.len() - 1
            })
        };
        for l in &m.lineups {
            let idx = ensure(&mut rows, l.player_id, l.team_id);
            let row = &mut rows[idx];
            row.started_first_xi |= l.starter;
            if let (Some(on), Some(off)) = (l.minute_on, l.minute_off) {
                row.minutes_played += off.saturating_sub(on);
            }
            if row.started_first_xi {
                row.minutes_played = row.minutes_played.max(1);
            }
        }
        for e in &m.impactful_events {
            let idx = ensure(&mut rows, e.player_id, None);
            let row = &mut rows[idx];
            match e.kind {
                ImpactKind::Goal if !e.own_goal || config.credit_own_goals_to_player => {
                    row.goals += 1
                }
                ImpactKind::YellowCard => row.yellow_cards = (row.yellow_cards + 1).min(2),
                ImpactKind::RedCard => row.red_cards = 1,
                _ => {}
            }
        }
        rows.sort_by_key(|r| r.player_id);
        player_week.extend(rows);
    }

    let mut events = Vec::with_capacity(dataset.events.len());
    for e in &dataset.events {
        events.push(EventRow {
            event_id: e.event_id,
            match_id: e.match_id,
            player_id: e.player_id,
            team_id: e.team_id,
            event_type: e.event_type,
            gameweek: gameweek_of[&e.match_id],
            region: event_region_with(&dataset.anchors, e)?,
        });
    }

    team_week.sort_by_key(|r| (r.gameweek, r.match_id, r.team_id));
    player_week.sort_by_key(|r| (r.gameweek, r.match_id, r.player_id));
    events.sort_by_key(|r| (r.gameweek, r.match_id, r.event_id));

    let mut teams_info = dataset.teams.clone();
    teams_info.sort_by_key(|t| t.team_id);
    let team_index = teams_info
        .iter()
        .enumerate()
        .map(|(i, t)| (t.team_id, i))
        .collect();
    let mut team_week_index = HashMap::new();
    for (i, r) in team_week.iter().enumerate() {
        team_week_index.entry((r.team_id, r.gameweek)).or_insert(i);
    }
    let mut events_index: HashMap<(TeamId, MatchId), Vec<usize>> = HashMap::new();
    for (i, e) in events.iter().enumerate() {
        events_index.entry((e.team_id, e.match_id)).or_default().push(i);
    }
    let last_gameweek = team_week.iter().map(|r| r.gameweek).max().unwrap_or(0);

    Ok(Tables {
        league: dataset.league.clone(),
        teams_info,
        players_info: dataset.players.clone(),
        team_week,
        player_week,
        events,
        last_gameweek,
        team_index,
        team_week_index,
        events_index,
    })
}

impl Tables {
    /// Highest gameweek with at least one fixture.
    pub fn last_gameweek(&self) -> u32 {
        self.last_gameweek
    }

    pub fn team_count(&self) -> usize {
        self.teams_info.len()
    }

    pub fn team(&self, id: TeamId) -> Result<&TeamInfo> {
        self.team_index
            .get(&id)
            .map(|&i| &self.teams_info[i])
            .ok_or_else(|| Error::NotFound(format!("team {id}")))
    }

    pub fn team_name(&self, id: TeamId) -> Result<&str> {
        self.team(id).map(|t| t.name.as_str())
    }

    /// Exact name lookup.
    pub fn team_by_name(&self, name: &str) -> Option<&TeamInfo> {
        self.teams_info.iter().find(|t| t.name == name)
    }

    pub fn check_gameweek(&self, gameweek: u32) -> Result<()> {
        if (1..=self.last_gameweek).contains(&gameweek) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "gameweek {gameweek} outside 1..={}",
                self.last_gameweek
            )))
        }
    }

    /// Rows of `team` in gameweeks `first..=last`.
    pub fn team_rows(&self, team: TeamId, first: u32, last: u32) -> impl Iterator<Item = &TeamWeekRow> {
        (first..=last).filter_map(move |gw| {
            self.team_week_index
                .get(&(team, gw))
                .map(|&i| &self.team_week[i])
        })
    }

    /// Events of `team` in one match.
    pub fn team_match_events(&self, team: TeamId, match_id: MatchId) -> impl Iterator<Item = &EventRow> {
        self.events_index
            .get(&(team, match_id))
            .into_iter()
            .flatten()
            .map(|&i| &self.events[i])
    }
}

pub fn team_week_lookup(tables: &Tables, team: TeamId, gameweek: u32) -> Result<&TeamWeekRow> {
    tables
        .team_week_index
        .get(&(team, gameweek))
        .map(|&i| &tables.team_week[i])
        .ok_or_else(|| Error::NotFound(format!("no fixture for team {team} in gameweek {gameweek}")))
}

/// Write the five tables as CSV files into `dir`, returning their paths.
pub fn export_csv(tables: &Tables, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut write = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<()> {
        let path = dir.join(name);
        let to_err = |e: csv::Error| Error::io(&path, std::io::Error::other(e));
        let mut w = csv::Writer::from_path(&path).map_err(to_err)?;
        w.write_record(header).map_err(to_err)?;
        for r in rows {
            w.write_record(&r).map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };

    write(
        "teams_info.csv",
        &["team_id", "name", "competition"],
        tables
            .teams_info
            .iter()
            .map(|t| vec![t.team_id.to_string(), t.name.clone(), t.competition.clone()])
            .collect(),
    )?;
    write(
        "players_info.csv",
        &["player_id", "name", "current_team_id", "position", "age"],
        tables
            .players_info
            .iter()
            .map(|p| {
                vec![
                    p.player_id.to_string(),
                    p.name.clone(),
                    p.current_team_id.to_string(),
                    p.position.clone(),
                    p.age.to_string(),
                ]
            })
            .collect(),
    )?;
    write(
        "team_week.csv",
        &[
            "match_id",
            "team_id",
            "opposing_team_id",
            "gameweek",
            "side",
            "goals_scored",
            "goals_conceded",
            "points",
        ],
        tables
            .team_week
            .iter()
            .map(|r| {
                vec![
                    r.match_id.to_string(),
                    r.team_id.to_string(),
                    r.opposing_team_id.to_string(),
                    r.gameweek.to_string(),
                    r.side.as_str().to_string(),
                    r.goals_scored.to_string(),
                    r.goals_conceded.to_string(),
                    r.points.to_string(),
                ]
            })
            .collect(),
    )?;
    write(
        "player_week.csv",
        &[
            "match_id",
            "player_id",
            "team_id",
            "opposing_team_id",
            "gameweek",
            "goals",
            "yellow_cards",
            "red_cards",
            "started_first_xi",
            "minutes_played",
        ],
        tables
            .player_week
            .iter()
            .map(|r| {
                vec![
                    r.match_id.to_string(),
                    r.player_id.to_string(),
                    r.team_id.to_string(),
                    r.opposing_team_id.to_string(),
                    r.gameweek.to_string(),
                    r.goals.to_string(),
                    r.yellow_cards.to_string(),
                    r.red_cards.to_string(),
                    r.started_first_xi.to_string(),
                    r.minutes_played.to_string(),
                ]
            })
            .collect(),
    )?;
    write(
        "events.csv",
        &[
            "event_id",
            "match_id",
            "player_id",
            "team_id",
            "event_type",
            "region_col",
            "region_row",
        ],
        tables
            .events
            .iter()
            .map(|e| {
                vec![
                    e.event_id.to_string(),
                    e.match_id.to_string(),
                    e.player_id.to_string(),
                    e.team_id.to_string(),
                    e.event_type.name().to_string(),
                    e.region.col().to_string(),
                    e.region.row().to_string(),
                ]
            })
            .collect(),
    )?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::{fixture_gen_with, FixtureOptions};
    use crate::ingest::parse_dataset;
    use serde_json::json;

    fn two_team(home_goals: u32, away_goals: u32) -> Tables {
        let b = |v: serde_json::Value| serde_json::to_vec(&v).unwrap();
        let ds = parse_dataset(
            &b(json!([{
                "match_id": 1, "gameweek": 1, "date": "2017-08-19", "home_team_id": 1, "away_team_id": 2,
                "home_goals": home_goals, "away_goals": away_goals,
                "lineups": [
                    {"player_id": 10, "starter": true, "minute_on": 0, "minute_off": 70},
                    {"player_id": 11, "starter": false, "minute_on": 70, "minute_off": 90},
                    {"player_id": 20, "starter": true, "minute_on": 0, "minute_off": 90}
                ],
                "impactful_events": [
                    {"kind": "goal", "player_id": 10, "minute": 5},
                    {"kind": "goal", "player_id": 20, "minute": 50, "own_goal": true},
                    {"kind": "yellow_card", "player_id": 20, "minute": 60}
                ]
            }])),
            &b(json!([{"event_id": 1, "match_id": 1, "player_id": 10, "team_id": 1,
                       "event_type": "Simple pass", "source": {"x": 1, "y": 1}, "destination": {"x": 90, "y": 40}}])),
            &b(json!([
                {"team_id": 1, "name": "A", "competition": "Italy"},
                {"team_id": 2, "name": "B", "competition": "Italy"}
            ])),
            &b(json!([
                {"player_id": 10, "name": "p10", "current_team_id": 1, "position": "F", "age": 20},
                {"player_id": 11, "name": "p11", "current_team_id": 1, "position": "F", "age": 20},
                {"player_id": 20, "name": "p20", "current_team_id": 2, "position": "D", "age": 20}
            ])),
        )
        .unwrap();
        build_tables(&ds).unwrap()
    }

    #[test]
    fn decisive_match_rows() {
        let t = two_team(2, 1);
        assert_eq!(t.team_week.len(), 2);
        let a = team_week_lookup(&t, TeamId(1), 1).unwrap();
        let b = team_week_lookup(&t, TeamId(2), 1).unwrap();
        assert_eq!((a.points, a.goals_scored, a.side), (3, 2, Side::Home));
        assert_eq!((b.points, b.goals_scored, b.side), (0, 1, Side::Away));
    }

    #[test]
    fn draw_rows() {
        let t = two_team(1, 1);
        assert!(t.team_week.iter().all(|r| r.points == 1));
    }

    #[test]
    fn goalless_lookup_and_missing_week() {
        let t = two_team(0, 0);
        let a = team_week_lookup(&t, TeamId(1), 1).unwrap();
        assert_eq!((a.points, a.goals_scored), (1, 0));
        assert!(matches!(
            team_week_lookup(&t, TeamId(1), 11),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn player_rows() {
        let t = two_team(1, 1);
        let p = |id| t.player_week.iter().find(|r| r.player_id == PlayerId(id)).unwrap();
        assert_eq!((p(10).goals, p(10).minutes_played, p(10).started_first_xi), (1, 70, true));
        assert_eq!((p(11).minutes_played, p(11).started_first_xi), (20, false));
        // Own goal does not count for the player by default.
        assert_eq!((p(20).goals, p(20).yellow_cards), (0, 1));
        assert_eq!(p(20).opposing_team_id, TeamId(1));
    }

    #[test]
    fn event_rows_carry_anchored_region() {
        let t = two_team(1, 0);
        assert_eq!(t.events[0].region, Region::new(5, 1).unwrap());
    }

    #[test]
    fn missing_score_is_integrity_error() {
        let b = |v: serde_json::Value| serde_json::to_vec(&v).unwrap();
        let ds = parse_dataset(
            &b(json!([{"match_id": 1, "gameweek": 1, "date": "", "home_team_id": 1, "away_team_id": 2, "home_goals": 1}])),
            b"[]",
            &b(json!([{"team_id": 1, "name": "A", "competition": "Italy"}, {"team_id": 2, "name": "B", "competition": "Italy"}])),
            b"[]",
        )
        .unwrap();
        assert!(matches!(build_tables(&ds), Err(Error::Integrity { .. })));
    }

    #[test]
    fn full_league_row_counts() {
        let files = fixture_gen_with(20, 10, 3, &FixtureOptions::sparse()).unwrap();
        let t = build_tables(&files.parse().unwrap()).unwrap();
        assert_eq!(t.team_week.len(), 200);
        for gw in 1..=10 {
            assert_eq!(t.team_week.iter().filter(|r| r.gameweek == gw).count(), 20);
        }
        for e in &t.events {
            assert!(team_week_lookup(&t, e.team_id, e.gameweek).is_ok());
        }
    }

    #[test]
    fn csv_export_writes_five_files() {
        let t = two_team(2, 2);
        let dir = tempfile::tempdir().unwrap();
        let files = export_csv(&t, dir.path()).unwrap();
        assert_eq!(files.len(), 5);
        let tw = std::fs::read_to_string(dir.path().join("team_week.csv")).unwrap();
        assert!(tw.starts_with("match_id,team_id,opposing_team_id,gameweek,side,goals_scored"));
        assert_eq!(tw.lines().count(), 3);
    }
}
