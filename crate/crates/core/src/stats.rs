//! Every quantity the corpus verbalizes, computed from [`Tables`].
//!
//! Fractions are kept as exact integers and rounded half-up only at the
//! point of display: averages to one decimal, season per-match rates to two,
//! regional shares to whole percents.

use std::cmp::Ordering;
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EventType, TeamId};
use crate::pitch_grid::{Region, REGION_COUNT};
use crate::tables::Tables;

/// `round(num / den)` with halves rounded up. `den` must be positive.
pub fn div_round_half_up(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

/// Fixed-point decimal rendering: `scaled` is the value times `10^digits`.
pub fn format_fixed(scaled: u64, digits: u32) -> String {
    let unit = 10u64.pow(digits);
    if digits == 0 {
        return scaled.to_string();
    }
    format!(
        "{}.{:0width$}",
        scaled / unit,
        scaled % unit,
        width = digits as usize
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Points, then goals scored, then name.
    #[default]
    PointsGoalsName,
    /// Points, then name.
    PointsName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandingsRow {
    pub team_id: TeamId,
    pub rank: u32,
    pub points_cum: u32,
    pub goals_cum: u32,
    pub gameweek: u32,
}

pub fn standings(tables: &Tables, gameweek: u32, inclusive: bool) -> Result<Vec<StandingsRow>> {
    standings_with(tables, gameweek, inclusive, TieBreak::default())
}

/// League table after gameweek `gameweek` (or before it when not inclusive).
pub fn standings_with(
    tables: &Tables,
    gameweek: u32,
    inclusive: bool,
    tie_break: TieBreak,
) -> Result<Vec<StandingsRow>> {
    tables.check_gameweek(gameweek)?;
    let through = if inclusive { gameweek } else { gameweek - 1 };
    let mut rows: Vec<(StandingsRow, &str)> = tables
        .teams_info
        .iter()
        .map(|t| {
            let (points, goals) = tables
                .team_rows(t.team_id, 1, through)
                .fold((0, 0), |(p, g), r| (p + r.points, g + r.goals_scored));
            (
                StandingsRow {
                    team_id: t.team_id,
                    rank: 0,
                    points_cum: points,
                    goals_cum: goals,
                    gameweek,
                },
                t.name.as_str(),
            )
        })
        .collect();
    rows.sort_by(|(a, an), (b, bn)| {
        let by_goals = match tie_break {
            TieBreak::PointsGoalsName => b.goals_cum.cmp(&a.goals_cum),
            TieBreak::PointsName => Ordering::Equal,
        };
        b.points_cum
            .cmp(&a.points_cum)
            .then(by_goals)
            .then_with(|| an.cmp(bn))
    });
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(i, (mut row, _))| {
            row.rank = i as u32 + 1;
            row
        })
        .collect())
}

pub fn standing_of(tables: &Tables, team: TeamId, gameweek: u32) -> Result<StandingsRow> {
    tables.team(team)?;
    standings(tables, gameweek, true)?
        .into_iter()
        .find(|r| r.team_id == team)
        .ok_or_else(|| Error::NotFound(format!("team {team} in standings")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Improvement,
    StepBackwards,
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub team_id: TeamId,
    pub gw_start: u32,
    pub gw_end: u32,
    pub rank_start: u32,
    pub rank_end: u32,
    pub verdict: Verdict,
}

pub fn progression(tables: &Tables, team: TeamId, gw_start: u32, gw_end: u32) -> Result<Progression> {
    if gw_start >= gw_end {
        return Err(Error::domain(format!(
            "progression needs start < end, got {gw_start}..{gw_end}"
        )));
    }
    let rank_start = standing_of(tables, team, gw_start)?.rank;
    let rank_end = standing_of(tables, team, gw_end)?.rank;
    let verdict = match rank_end.cmp(&rank_start) {
        Ordering::Less => Verdict::Improvement,
        Ordering::Greater => Verdict::StepBackwards,
        Ordering::Equal => Verdict::Unchanged,
    };
    Ok(Progression {
        team_id: team,
        gw_start,
        gw_end,
        rank_start,
        rank_end,
        verdict,
    })
}

/// The given teams' standings rows at `gameweek`, best rank first.
pub fn compare_teams(tables: &Tables, teams: &[TeamId], gameweek: u32) -> Result<Vec<StandingsRow>> {
    let mut distinct = teams.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 || distinct.len() != teams.len() {
        return Err(Error::domain("comparison needs at least two distinct teams"));
    }
    for &t in teams {
        tables.team(t)?;
    }
    let table = standings(tables, gameweek, true)?;
    Ok(table
        .into_iter()
        .filter(|r| teams.contains(&r.team_id))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Goals,
    Points,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Goals => "goals",
            Metric::Points => "points",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AverageResult {
    pub numerator: u64,
    pub denominator: u64,
    /// Average times ten, rounded half-up.
    pub tenths: u64,
    /// The team missed a fixture, so the denominator is matches played.
    pub partial: bool,
}

impl AverageResult {
    pub fn value(&self) -> f64 {
        self.tenths as f64 / 10.0
    }

    pub fn value_string(&self) -> String {
        format_fixed(self.tenths, 1)
    }

    /// `N / D = V`
    pub fn arithmetic_string(&self) -> String {
        format!("{} / {} = {}", self.numerator, self.denominator, self.value_string())
    }
}

impl fmt::Display for AverageResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.arithmetic_string())
    }
}

pub fn cumulative_average(
    tables: &Tables,
    team: TeamId,
    through_gw: u32,
    metric: Metric,
) -> Result<AverageResult> {
    tables.check_gameweek(through_gw)?;
    tables.team(team)?;
    let rows: Vec<_> = tables.team_rows(team, 1, through_gw).collect();
    if rows.is_empty() {
        return Err(Error::NotFound(format!(
            "team {team} played no match through gameweek {through_gw}"
        )));
    }
    let numerator: u64 = rows
        .iter()
        .map(|r| u64::from(match metric {
            Metric::Goals => r.goals_scored,
            Metric::Points => r.points,
        }))
        .sum();
    let partial = rows.len() < through_gw as usize;
    let denominator = if partial { rows.len() as u64 } else { u64::from(through_gw) };
    Ok(AverageResult {
        numerator,
        denominator,
        tenths: div_round_half_up(10 * numerator, denominator),
        partial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionShare {
    pub region: Region,
    pub pct: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// Events in the range, or the rounded per-match rate when requested.
    pub total_count: u64,
    pub top5: Vec<RegionShare>,
    /// Raw event count per region, indexed by [`Region::index`].
    pub counts: Vec<u64>,
    pub matches: u32,
}

impl Decomposition {
    fn empty(matches: u32) -> Self {
        Decomposition {
            total_count: 0,
            top5: Vec::new(),
            counts: vec![0; REGION_COUNT],
            matches,
        }
    }

    /// `25% in [region 5 , 3]; 17% in [region 3 , 2]; ...`
    pub fn shares_text(&self) -> String {
        self.top5
            .iter()
            .map(|s| format!("{}% in {}", s.pct, s.region))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn event_decomposition(
    tables: &Tables,
    team: TeamId,
    gw_range: RangeInclusive<u32>,
    event_type: EventType,
    per_match: bool,
) -> Result<Decomposition> {
    let (first, last) = (*gw_range.start(), *gw_range.end());
    if first > last {
        return Err(Error::domain(format!("empty gameweek range {first}..={last}")));
    }
    tables.check_gameweek(first)?;
    tables.check_gameweek(last)?;
    tables.team(team)?;

    let mut counts = vec![0u64; REGION_COUNT];
    let mut matches = 0u32;
    for row in tables.team_rows(team, first, last) {
        matches += 1;
        for e in tables.team_match_events(team, row.match_id) {
            if e.event_type == event_type {
                counts[e.region.index()] += 1;
            }
        }
    }
    let raw_total: u64 = counts.iter().sum();
    if raw_total == 0 {
        return Ok(Decomposition {
            counts,
            ..Decomposition::empty(matches)
        });
    }
    let mut ranked: Vec<(Region, u64)> = Region::all()
        .map(|r| (r, counts[r.index()]))
        .filter(|&(_, c)| c > 0)
        .collect();
    // Count descending, then (col, row) ascending.
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(a.0.col().cmp(&b.0.col()))
            .then(a.0.row().cmp(&b.0.row()))
    });
    let top5 = ranked
        .into_iter()
        .take(5)
        .map(|(region, c)| RegionShare {
            region,
            pct: div_round_half_up(100 * c, raw_total) as u32,
        })
        .collect();
    let total_count = if per_match {
        div_round_half_up(raw_total, u64::from(matches))
    } else {
        raw_total
    };
    Ok(Decomposition {
        total_count,
        top5,
        counts,
        matches,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeasonRankRow {
    pub team_id: TeamId,
    pub event_count: u64,
    pub matches: u64,
    /// Per-match average times 100, rounded half-up.
    pub avg_hundredths: u64,
    pub rank: u32,
}

impl SeasonRankRow {
    pub fn avg_string(&self) -> String {
        format_fixed(self.avg_hundredths, 2)
    }
}

/// Teams ordered by per-match count of `event_type` over every ingested
/// gameweek, highest first.
pub fn season_event_ranking(tables: &Tables, event_type: EventType) -> Vec<SeasonRankRow> {
    let last = tables.last_gameweek();
    let mut rows: Vec<(SeasonRankRow, &str)> = tables
        .teams_info
        .iter()
        .map(|t| {
            let mut count = 0u64;
            let mut matches = 0u64;
            for row in tables.team_rows(t.team_id, 1, last) {
                matches += 1;
                count += tables
                    .team_match_events(t.team_id, row.match_id)
                    .filter(|e| e.event_type == event_type)
                    .count() as u64;
            }
            let avg_hundredths = if matches == 0 {
                0
            } else {
                div_round_half_up(100 * count, matches)
            };
            (
                SeasonRankRow {
                    team_id: t.team_id,
                    event_count: count,
                    matches,
                    avg_hundredths,
                    rank: 0,
                },
                t.name.as_str(),
            )
        })
        .collect();
    // Exact comparison of count/matches via cross-multiplication.
    rows.sort_by(|(a, an), (b, bn)| {
        let lhs = u128::from(b.event_count) * u128::from(a.matches.max(1));
        let rhs = u128::from(a.event_count) * u128::from(b.matches.max(1));
        lhs.cmp(&rhs).then_with(|| an.cmp(bn))
    });
    rows.into_iter()
        .enumerate()
        .map(|(i, (mut r, _))| {
            r.rank = i as u32 + 1;
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_dataset;
    use crate::tables::build_tables;
    use serde_json::{json, Value};

    /// League from (gameweek, home, away, home_goals, away_goals) results
    /// between teams named by index, plus raw events.
    fn league(names: &[&str], results: &[(u32, u64, u64, u32, u32)], events: Value) -> Tables {
        let teams: Vec<Value> = names
            .iter()
            .enumerate()
            .map(|(i, n)| json!({"team_id": i as u64 + 1, "name": n, "competition": "Italy"}))
            .collect();
        let players: Vec<Value> = (1..=names.len() as u64)
            .map(|t| json!({"player_id": t * 10, "name": "p", "current_team_id": t, "position": "F", "age": 20}))
            .collect();
        let matches: Vec<Value> = results
            .iter()
            .enumerate()
            .map(|(i, &(gw, h, a, hg, ag))| {
                json!({"match_id": i as u64 + 1, "gameweek": gw, "date": "", "home_team_id": h,
                       "away_team_id": a, "home_goals": hg, "away_goals": ag})
            })
            .collect();
        let b = |v: &Value| serde_json::to_vec(v).unwrap();
        let ds = parse_dataset(
            &b(&Value::Array(matches)),
            &b(&events),
            &b(&Value::Array(teams)),
            &b(&Value::Array(players)),
        )
        .unwrap();
        build_tables(&ds).unwrap()
    }

    fn shot(id: u64, match_id: u64, team: u64, x: u32, y: u32) -> Value {
        json!({"event_id": id, "match_id": match_id, "player_id": team * 10, "team_id": team,
               "event_type": "Shot", "source": {"x": x, "y": y}})
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(div_round_half_up(240, 9), 27);
        assert_eq!(div_round_half_up(5, 2), 3);
        assert_eq!(div_round_half_up(1, 3), 0);
        assert_eq!(format_fixed(30, 1), "3.0");
        assert_eq!(format_fixed(276, 2), "2.76");
        assert_eq!(format_fixed(5, 2), "0.05");
    }

    #[test]
    fn two_team_standings() {
        let t = league(&["A", "B"], &[(1, 1, 2, 1, 0)], json!([]));
        let s = standings(&t, 1, true).unwrap();
        assert_eq!((s[0].team_id, s[0].rank, s[0].points_cum), (TeamId(1), 1, 3));
        assert_eq!((s[1].team_id, s[1].rank, s[1].points_cum), (TeamId(2), 2, 0));
        let before = standings(&t, 1, false).unwrap();
        assert!(before.iter().all(|r| r.points_cum == 0));
        assert!(standings(&t, 0, true).is_err());
        assert!(standings(&t, 2, true).is_err());
    }

    #[test]
    fn name_breaks_full_ties() {
        let t = league(&["Zeta", "Alpha"], &[(1, 1, 2, 1, 1)], json!([]));
        let s = compare_teams(&t, &[TeamId(1), TeamId(2)], 1).unwrap();
        assert_eq!(s[0].team_id, TeamId(2));
        assert!(compare_teams(&t, &[TeamId(1)], 1).is_err());
        assert!(matches!(
            compare_teams(&t, &[TeamId(1), TeamId(9)], 1),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn progression_verdicts() {
        // gw1: A beats B, C draws D. gw2: B beats A 3-0, C draws D.
        let t = league(
            &["A", "B", "C", "D"],
            &[(1, 1, 2, 1, 0), (1, 3, 4, 0, 0), (2, 2, 1, 3, 0), (2, 3, 4, 0, 0)],
            json!([]),
        );
        let a = progression(&t, TeamId(1), 1, 2).unwrap();
        assert_eq!((a.rank_start, a.rank_end, a.verdict), (1, 2, Verdict::StepBackwards));
        let b = progression(&t, TeamId(2), 1, 2).unwrap();
        assert_eq!((b.rank_start, b.rank_end, b.verdict), (4, 1, Verdict::Improvement));
        assert!(progression(&t, TeamId(1), 2, 2).is_err());
    }

    #[test]
    fn unchanged_verdict() {
        let t = league(&["A", "B"], &[(1, 1, 2, 1, 0), (2, 1, 2, 2, 0)], json!([]));
        let p = progression(&t, TeamId(1), 1, 2).unwrap();
        assert_eq!(p.verdict, Verdict::Unchanged);
    }

    #[test]
    fn averages() {
        let t = league(
            &["A", "B"],
            &[(1, 1, 2, 0, 0), (2, 2, 1, 0, 0), (3, 1, 2, 0, 1), (4, 2, 1, 0, 0)],
            json!([]),
        );
        let a = cumulative_average(&t, TeamId(1), 4, Metric::Goals).unwrap();
        assert_eq!(a.arithmetic_string(), "0 / 4 = 0.0");
        let b = cumulative_average(&t, TeamId(2), 3, Metric::Points).unwrap();
        assert_eq!(b.arithmetic_string(), "5 / 3 = 1.7");
    }

    #[test]
    fn partial_average_uses_matches_played() {
        let t = league(&["A", "B", "C", "D"], &[(1, 1, 2, 2, 0), (2, 3, 4, 1, 0)], json!([]));
        let a = cumulative_average(&t, TeamId(1), 2, Metric::Goals).unwrap();
        assert!(a.partial);
        assert_eq!(a.arithmetic_string(), "2 / 1 = 2.0");
    }

    #[test]
    fn single_region_decomposition() {
        let evs: Vec<Value> = (1..=4).map(|i| shot(i, 1, 1, 90, 10)).collect();
        let t = league(&["A", "B"], &[(1, 1, 2, 1, 0)], Value::Array(evs));
        let d = event_decomposition(&t, TeamId(1), 1..=1, EventType::Shot, false).unwrap();
        assert_eq!(d.total_count, 4);
        assert_eq!(
            d.top5,
            vec![RegionShare {
                region: Region::new(5, 0).unwrap(),
                pct: 100
            }]
        );
        let none = event_decomposition(&t, TeamId(2), 1..=1, EventType::Shot, false).unwrap();
        assert_eq!((none.total_count, none.top5.len()), (0, 0));
    }

    #[test]
    fn decomposition_tie_order_and_per_match() {
        // Two matches; 3 shots in (0,0), 3 in (1,0), 1 in (5,3).
        let evs = json!([
            shot(1, 1, 1, 1, 1), shot(2, 1, 1, 1, 1), shot(3, 2, 1, 1, 1),
            shot(4, 1, 1, 20, 1), shot(5, 2, 1, 20, 1), shot(6, 2, 1, 20, 1),
            shot(7, 2, 1, 99, 99)
        ]);
        let t = league(&["A", "B"], &[(1, 1, 2, 0, 0), (2, 2, 1, 0, 0)], evs);
        let d = event_decomposition(&t, TeamId(1), 1..=2, EventType::Shot, true).unwrap();
        // 7 events over 2 matches = 3.5 -> 4.
        assert_eq!(d.total_count, 4);
        assert_eq!(d.shares_text(), "43% in [region 0 , 0]; 43% in [region 1 , 0]; 14% in [region 5 , 3]");
    }

    #[test]
    fn season_ranking_ties_by_name() {
        let evs = json!([shot(1, 1, 1, 50, 50), shot(2, 1, 2, 50, 50)]);
        let t = league(&["Zeta", "Alpha"], &[(1, 1, 2, 0, 0)], evs);
        let r = season_event_ranking(&t, EventType::Shot);
        assert_eq!(r[0].team_id, TeamId(2));
        assert_eq!(r[0].avg_string(), "1.00");
        assert_eq!((r[1].team_id, r[1].rank), (TeamId(1), 2));
    }
}
