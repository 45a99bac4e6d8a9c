//! Conversion from the public Wyscout export layout to canonical records.
//!
//! Wyscout nests per-team data under `teamsData`, stores event ends in a
//! `positions` array, and encodes card minutes and goal counts as strings
//! ("0" meaning none).

use serde_json::Value;

use super::{ImpactKind, ImpactfulEvent, LineupEntry, PlayerInfo, Point, RawEventJson, RawMatch, TeamInfo};
use crate::error::{Error, Result};
use crate::model::{EventId, MatchId, PlayerId, TeamId};

/// Season start used to turn birth dates into ages.
const AGE_REFERENCE: (i32, u32, u32) = (2017, 8, 1);

fn bad(file: &str, index: usize, what: &str) -> Error {
    Error::Parse {
        file: file.to_string(),
        offset: 0,
        message: format!("record {index}: {what}"),
    }
}

fn as_u64(v: &Value) -> Option<u64> {
    match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// Wyscout "minute or zero" string fields.
fn minute_field(v: Option<&Value>) -> Option<u32> {
    let m = v.and_then(as_u64)? as u32;
    (m > 0).then_some(m)
}

fn req_u64(obj: &Value, key: &str, file: &str, index: usize) -> Result<u64> {
    obj.get(key)
        .and_then(as_u64)
        .ok_or_else(|| bad(file, index, &format!("missing numeric `{key}`")))
}

fn match_length(m: &Value) -> u32 {
    match m.get("duration").and_then(Value::as_str) {
        Some("ExtraTime") | Some("Penalties") => 120,
        _ => 90,
    }
}

pub(super) fn matches(items: Vec<Value>) -> Result<Vec<RawMatch>> {
    const FILE: &str = "matches.json";
    items
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let match_id = MatchId(req_u64(m, "wyId", FILE, i)?);
            let gameweek = req_u64(m, "gameweek", FILE, i)? as u32;
            let date = m
                .get("dateutc")
                .or_else(|| m.get("date"))
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string();
            let teams_data = m
                .get("teamsData")
                .and_then(Value::as_object)
                .ok_or_else(|| bad(FILE, i, "missing `teamsData`"))?;
            let end = match_length(m);

            let mut home = None;
            let mut away = None;
            let mut lineups = Vec::new();
            let mut impactful = Vec::new();
            for (key, td) in teams_data {
                let team_id = TeamId(
                    td.get("teamId")
                        .and_then(as_u64)
                        .or_else(|| key.parse().ok())
                        .ok_or_else(|| bad(FILE, i, "team without id"))?,
                );
                let score = td.get("score").and_then(as_u64).map(|s| s as u32);
                match td.get("side").and_then(Value::as_str) {
                    Some("home") => home = Some((team_id, score)),
                    Some("away") => away = Some((team_id, score)),
                    _ => return Err(bad(FILE, i, "team without home/away side")),
                }
                let formation = td.get("formation");
                let subs: Vec<(u64, u64, u32)> = formation
                    .and_then(|f| f.get("substitutions"))
                    .and_then(Value::as_array)
                    .map(|subs| {
                        subs.iter()
                            .filter_map(|s| {
                                Some((
                                    s.get("playerIn").and_then(as_u64)?,
                                    s.get("playerOut").and_then(as_u64)?,
                                    s.get("minute").and_then(as_u64)? as u32,
                                ))
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                for (starter, group) in [(true, "lineup"), (false, "bench")] {
                    let players = formation
                        .and_then(|f| f.get(group))
                        .and_then(Value::as_array)
                        .map(Vec::as_slice)
                        .unwrap_or_default();
                    for p in players {
                        let Some(pid) = p.get("playerId").and_then(as_u64) else {
                            continue;
                        };
                        let sub_in = subs.iter().find(|s| s.0 == pid).map(|s| s.2);
                        let sub_out = subs.iter().find(|s| s.1 == pid).map(|s| s.2);
                        let minute_on = if starter { Some(0) } else { sub_in };
                        let minute_off = minute_on.map(|_| sub_out.unwrap_or(end));
                        lineups.push(LineupEntry {
                            player_id: PlayerId(pid),
                            team_id: Some(team_id),
                            starter,
                            minute_on,
                            minute_off,
                        });
                        let player_id = PlayerId(pid);
                        let goals = p.get("goals").and_then(as_u64).unwrap_or(0);
                        let own_goals = p.get("ownGoals").and_then(as_u64).unwrap_or(0);
                        for (count, own_goal) in [(goals, false), (own_goals, true)] {
                            for _ in 0..count {
                                impactful.push(ImpactfulEvent {
                                    kind: ImpactKind::Goal,
                                    player_id,
                                    minute: 0,
                                    own_goal,
                                });
                            }
                        }
                        for (kind, key) in [
                            (ImpactKind::YellowCard, "yellowCards"),
                            (ImpactKind::RedCard, "redCards"),
                        ] {
                            if let Some(minute) = minute_field(p.get(key)) {
                                impactful.push(ImpactfulEvent {
                                    kind,
                                    player_id,
                                    minute: minute.min(super::MAX_MINUTE),
                                    own_goal: false,
                                });
                            }
                        }
                    }
                }
                for &(player_in, _, minute) in &subs {
                    impactful.push(ImpactfulEvent {
                        kind: ImpactKind::Substitution,
                        player_id: PlayerId(player_in),
                        minute: minute.min(super::MAX_MINUTE),
                        own_goal: false,
                    });
                }
            }
            let ((home_team_id, home_goals), (away_team_id, away_goals)) = home
                .zip(away)
                .ok_or_else(|| bad(FILE, i, "match needs one home and one away team"))?;
            Ok(RawMatch {
                match_id,
                gameweek,
                date,
                home_team_id,
                away_team_id,
                home_goals,
                away_goals,
                lineups,
                impactful_events: impactful,
            })
        })
        .collect()
}

fn position(v: Option<&Value>) -> Option<Point> {
    let v = v?;
    Some(Point {
        x: v.get("x")?.as_f64()?,
        y: v.get("y")?.as_f64()?,
    })
}

pub(super) fn events(items: Vec<Value>) -> Result<Vec<RawEventJson>> {
    const FILE: &str = "events.json";
    items
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let positions = e.get("positions").and_then(Value::as_array);
            Ok(RawEventJson {
                event_id: EventId(req_u64(e, "id", FILE, i)?),
                match_id: MatchId(req_u64(e, "matchId", FILE, i)?),
                player_id: PlayerId(req_u64(e, "playerId", FILE, i)?),
                team_id: TeamId(req_u64(e, "teamId", FILE, i)?),
                event_type: e
                    .get("subEventName")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string(),
                source: position(positions.and_then(|p| p.first())),
                destination: position(positions.and_then(|p| p.get(1))),
            })
        })
        .collect()
}

pub(super) fn teams(items: Vec<Value>) -> Result<Vec<TeamInfo>> {
    const FILE: &str = "teams.json";
    items
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let name = t
                .get("officialName")
                .or_else(|| t.get("name"))
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string();
            let area = t
                .get("area")
                .and_then(|a| a.get("name"))
                .and_then(Value::as_str)
                .unwrap_or_default();
            // National sides share the area name with the domestic league.
            let competition = match t.get("type").and_then(Value::as_str) {
                Some("national") => format!("{area} national team"),
                _ => area.to_string(),
            };
            Ok(TeamInfo {
                team_id: TeamId(req_u64(t, "wyId", FILE, i)?),
                name,
                competition,
            })
        })
        .collect()
}

fn age_on_reference(birth_date: &str) -> Option<u32> {
    let mut parts = birth_date.split('-').map(|p| p.parse::<i32>().ok());
    let (y, m, d) = (parts.next()??, parts.next()??, parts.next()??);
    let (ry, rm, rd) = AGE_REFERENCE;
    let mut age = ry - y;
    if (m as u32, d as u32) > (rm, rd) {
        age -= 1;
    }
    u32::try_from(age).ok()
}

pub(super) fn players(items: Vec<Value>) -> Result<Vec<PlayerInfo>> {
    const FILE: &str = "players.json";
    items
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(PlayerInfo {
                player_id: PlayerId(req_u64(p, "wyId", FILE, i)?),
                name: p
                    .get("shortName")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string(),
                current_team_id: TeamId(p.get("currentTeamId").and_then(as_u64).unwrap_or(0)),
                position: p
                    .get("role")
                    .and_then(|r| r.get("name"))
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string(),
                age: p
                    .get("birthDate")
                    .and_then(Value::as_str)
                    .and_then(age_on_reference)
                    .unwrap_or(0),
            })
        })
        .collect()
}
