use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::{Captures, Regex};

use super::{Oracle, Query, SelfTopic};
use crate::error::{Error, Result};
use crate::model::{EventType, Side, TeamId};
use crate::stats::Metric;
use crate::tables::team_week_lookup;

static PREFIX: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)^\s*(?:question\s*:\s*)?['"]?\s*(?:footgpt\s*,\s*)?"#).expect("static regex")
});

static GAMEWEEKS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(?:gameweeks?|weeks?|gw)\s*(\d+)(?:\s*(?:to|-|and|through|until)\s*(\d+))?")
        .expect("static regex")
});

/// Name tokens too generic to identify a club on their own.
const AFFIXES: &[&str] = &[
    "fc", "ac", "as", "ss", "ssc", "us", "uc", "acf", "cfc", "afc", "cf", "sc", "calcio", "sporting",
    "club", "football",
];

fn norm(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn contains_word(haystack: &str, needle: &str) -> Option<usize> {
    let bytes = haystack.as_bytes();
    let mut from = 0;
    while let Some(pos) = haystack[from..].find(needle) {
        let start = from + pos;
        let end = start + needle.len();
        let left_ok = start == 0 || !bytes[start - 1].is_ascii_alphanumeric();
        let right_ok = end == bytes.len() || !bytes[end].is_ascii_alphanumeric();
        if left_ok && right_ok {
            return Some(start);
        }
        from = start + needle.len().max(1);
        while !haystack.is_char_boundary(from) {
            from += 1;
        }
    }
    None
}

fn strip_prefix(text: &str) -> &str {
    let body = match PREFIX.find(text) {
        Some(m) => &text[m.end()..],
        None => text,
    };
    body.trim().trim_end_matches(['\'', '"']).trim()
}

impl Oracle<'_> {
    fn alias_target(&self, mention: &str) -> Option<TeamId> {
        self.config
            .aliases
            .iter()
            .find(|(alias, _)| norm(alias) == mention)
            .and_then(|(_, name)| self.tables.team_by_name(name))
            .map(|t| t.team_id)
    }

    fn ambiguous(&self, mention: &str, ids: &[TeamId]) -> Error {
        Error::AmbiguousTeam {
            mention: mention.to_owned(),
            candidates: ids
                .iter()
                .filter_map(|&id| self.tables.team_name(id).ok().map(str::to_owned))
                .collect(),
        }
    }

    /// Resolves a team mention: exact name, then alias, then whole-word and
    /// finally plain case-insensitive containment.
    pub fn resolve_team(&self, mention: &str) -> Result<TeamId> {
        let m = norm(mention);
        if m.is_empty() {
            return Err(Error::NotFound("empty team mention".to_owned()));
        }
        let teams = &self.tables.teams_info;
        if let Some(t) = teams.iter().find(|t| norm(&t.name) == m) {
            return Ok(t.team_id);
        }
        if let Some(id) = self.alias_target(&m) {
            return Ok(id);
        }
        let word: Vec<TeamId> = teams
            .iter()
            .filter(|t| contains_word(&norm(&t.name), &m).is_some())
            .map(|t| t.team_id)
            .collect();
        let hits = if word.is_empty() {
            teams
                .iter()
                .filter(|t| norm(&t.name).contains(&m))
                .map(|t| t.team_id)
                .collect()
        } else {
            word
        };
        match hits.as_slice() {
            [one] => Ok(*one),
            [] => Err(Error::NotFound(format!("team {mention:?}"))),
            many => Err(self.ambiguous(mention, many)),
        }
    }

    /// Teams mentioned anywhere in free text, in order of first appearance.
    pub fn find_teams(&self, text: &str) -> Result<Vec<TeamId>> {
        let hay = norm(text);
        let mut spans: Vec<(usize, usize, TeamId)> = Vec::new();
        for t in &self.tables.teams_info {
            let name = norm(&t.name);
            if let Some(pos) = contains_word(&hay, &name) {
                spans.push((pos, pos + name.len(), t.team_id));
            }
        }
        // Drop matches nested inside a longer name.
        let all = spans.clone();
        spans.retain(|&(s, e, id)| !all.iter().any(|&(s2, e2, id2)| id2 != id && s2 <= s && e <= e2 && e2 - s2 > e - s));

        for (alias, target) in &self.config.aliases {
            if let (Some(pos), Some(t)) = (contains_word(&hay, &norm(alias)), self.tables.team_by_name(target)) {
                if !spans.iter().any(|s| s.2 == t.team_id) {
                    spans.push((pos, pos + alias.len(), t.team_id));
                }
            }
        }

        if spans.is_empty() {
            let mut by_token: BTreeMap<String, Vec<TeamId>> = BTreeMap::new();
            for t in &self.tables.teams_info {
                for tok in norm(&t.name).split(' ') {
                    if tok.len() >= 4 && !AFFIXES.contains(&tok) && !tok.chars().all(|c| c.is_ascii_digit()) {
                        by_token.entry(tok.to_owned()).or_default().push(t.team_id);
                    }
                }
            }
            for (tok, ids) in &by_token {
                if let Some(pos) = contains_word(&hay, tok) {
                    if ids.len() > 1 {
                        return Err(self.ambiguous(tok, ids));
                    }
                    spans.push((pos, pos + tok.len(), ids[0]));
                }
            }
        }
        spans.sort();
        let mut out: Vec<TeamId> = Vec::new();
        for (_, _, id) in spans {
            if !out.contains(&id) {
                out.push(id);
            }
        }
        Ok(out)
    }

    /// Maps a question back to its template and parameters. Bank wordings
    /// are tried first, then a keyword classifier for free phrasings.
    pub fn parse_question(&self, text: &str) -> Result<Query> {
        let body = strip_prefix(text);
        let mut first_error = None;
        for cq in self.bank.compiled_questions() {
            if let Some(caps) = cq.regex.captures(body) {
                match self.query_from_captures(cq.template_id, &caps) {
                    Ok(q) => return Ok(q),
                    Err(e) => {
                        first_error.get_or_insert(e);
                    }
                }
            }
        }
        match self.classify(body) {
            Err(Error::UnsupportedQuestion(_)) if first_error.is_some() => Err(first_error.expect("checked")),
            other => other,
        }
    }

    fn query_from_captures(&self, template_id: &str, caps: &Captures<'_>) -> Result<Query> {
        let team = |name: &str| -> Result<TeamId> {
            self.resolve_team(caps.name(name).map(|m| m.as_str()).unwrap_or_default())
        };
        let num = |name: &str| -> Result<u32> {
            let raw = caps.name(name).map(|m| m.as_str()).unwrap_or_default();
            raw.parse()
                .map_err(|_| Error::domain(format!("gameweek {raw:?} is not a number")))
        };
        let etype = || -> Result<EventType> { norm(&caps["etype"]).parse() };
        let metric = || {
            let raw = caps
                .name("metric")
                .or_else(|| caps.name("metric_phrase"))
                .map(|m| m.as_str().to_lowercase())
                .unwrap_or_default();
            if raw.starts_with("point") { Metric::Points } else { Metric::Goals }
        };
        Ok(match template_id {
            "weekly_standing" => Query::WeeklyStanding { team: team("team")?, gameweek: num("gw")? },
            "weekly_position" => Query::WeeklyPosition { team: team("team")?, gameweek: num("gw")? },
            "weekly_goals" => Query::WeeklyGoals { team: team("team")?, gameweek: num("gw")? },
            "weekly_result" => Query::WeeklyResult { team: team("team")?, gameweek: num("gw")? },
            "progression" => Query::Progression {
                team: team("team")?,
                gw_start: num("gw_start")?,
                gw_end: num("gw_end")?,
            },
            "multi_comparison" => Query::MultiComparison {
                teams: caps["teams"]
                    .split(',')
                    .map(|m| self.resolve_team(m))
                    .collect::<Result<_>>()?,
                gameweek: num("gw")?,
            },
            "match_winner" => Query::MatchWinner {
                gameweek: num("gw")?,
                home: team("home")?,
                away: team("away")?,
            },
            "pair_comparison" => Query::PairComparison {
                gameweek: num("gw")?,
                team_a: team("team_a")?,
                team_b: team("team_b")?,
            },
            "cumulative_average" => Query::CumulativeAverage {
                team: team("team")?,
                gameweek: num("gw")?,
                metric: metric(),
            },
            "event_count" => Query::EventCount {
                team: team("team")?,
                gameweek: num("gw")?,
                event_type: etype()?,
            },
            "event_range_per_match" => Query::EventRangePerMatch {
                team: team("team")?,
                gw_start: num("gw_start")?,
                gw_end: num("gw_end")?,
                event_type: etype()?,
            },
            "season_ranking" => Query::SeasonRanking {
                team: team("team")?,
                event_type: etype()?,
            },
            "self_identity" => Query::SelfAwareness { topic: SelfTopic::Identity },
            "self_scope" => Query::SelfAwareness { topic: SelfTopic::Scope },
            "self_players" => Query::SelfAwareness { topic: SelfTopic::Players },
            other => return Err(Error::UnsupportedQuestion(format!("template {other}"))),
        })
    }

    /// Keyword fallback for wordings outside the bank.
    fn classify(&self, body: &str) -> Result<Query> {
        let lower = norm(body);
        let has = |words: &[&str]| words.iter().any(|w| lower.contains(w));
        let unsupported = || Error::UnsupportedQuestion(body.to_owned());

        let name = norm(&self.config.assistant_name);
        if has(&[&format!("what is {name}"), "who are you"]) {
            return Ok(Query::SelfAwareness { topic: SelfTopic::Identity });
        }
        if has(&["individual player", "specific player"]) {
            return Ok(Query::SelfAwareness { topic: SelfTopic::Players });
        }
        if has(&["how many teams", "your dataset"]) {
            return Ok(Query::SelfAwareness { topic: SelfTopic::Scope });
        }

        let teams = self.find_teams(body)?;
        let Some(&team) = teams.first() else {
            return Err(unsupported());
        };
        let mut gws: Vec<u32> = Vec::new();
        for c in GAMEWEEKS.captures_iter(body) {
            gws.extend([c.get(1), c.get(2)].into_iter().flatten().filter_map(|m| m.as_str().parse::<u32>().ok()));
        }
        let etype = EventType::ALL
            .iter()
            .copied()
            .filter(|e| {
                let n = e.name().to_lowercase();
                contains_word(&lower, &n).is_some() || contains_word(&lower, &format!("{n}s")).is_some()
            })
            .max_by_key(|e| e.name().len());

        if let Some(event_type) = etype {
            return match gws.as_slice() {
                _ if has(&["rank", "season"]) => Ok(Query::SeasonRanking { team, event_type }),
                [s, e, ..] => Ok(Query::EventRangePerMatch {
                    team,
                    gw_start: *s,
                    gw_end: *e,
                    event_type,
                }),
                [g] => Ok(Query::EventCount {
                    team,
                    gameweek: *g,
                    event_type,
                }),
                [] => Err(unsupported()),
            };
        }
        let Some(&gw) = gws.first() else {
            return Err(unsupported());
        };
        if has(&["average"]) {
            let metric = if has(&["point"]) { Metric::Points } else { Metric::Goals };
            return Ok(Query::CumulativeAverage { team, gameweek: gw, metric });
        }
        if teams.len() >= 3 {
            return Ok(Query::MultiComparison { teams, gameweek: gw });
        }
        if let [a, b] = teams[..] {
            if has(&["match", "won", "win", "beat"]) {
                let row = team_week_lookup(self.tables, a, gw)?;
                let (home, away) = if row.side == Side::Home { (a, b) } else { (b, a) };
                return Ok(Query::MatchWinner { gameweek: gw, home, away });
            }
            return Ok(Query::PairComparison {
                gameweek: gw,
                team_a: a,
                team_b: b,
            });
        }
        if gws.len() >= 2 && has(&["elevate", "improv", "progress", "step", "moved", "climb", "forward"]) {
            return Ok(Query::Progression {
                team,
                gw_start: gws[0],
                gw_end: gws[1],
            });
        }
        if has(&["goal"]) {
            return Ok(Query::WeeklyGoals { team, gameweek: gw });
        }
        if has(&["result", "win", "won", "lose", "lost", "beat", "draw"]) {
            return Ok(Query::WeeklyResult { team, gameweek: gw });
        }
        if has(&["rank", "position", "standing", "placed", "stand", "table"]) {
            return Ok(Query::WeeklyPosition { team, gameweek: gw });
        }
        Err(unsupported())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_dataset;
    use crate::oracle::OracleConfig;
    use crate::tables::{build_tables, Tables};
    use serde_json::json;

    fn named_league() -> Tables {
        let names = [
            "Torino FC",
            "SSC Napoli",
            "AC Milan",
            "FC Internazionale Milano",
            "Genoa CFC",
            "Bologna FC 1909",
        ];
        let teams: Vec<_> = names
            .iter()
            .enumerate()
            .map(|(i, n)| json!({"team_id": i + 1, "name": n, "competition": "Italy"}))
            .collect();
        let matches = json!([
            {"match_id": 1, "gameweek": 1, "date": "", "home_team_id": 1, "away_team_id": 2, "home_goals": 0, "away_goals": 1},
            {"match_id": 2, "gameweek": 1, "date": "", "home_team_id": 3, "away_team_id": 4, "home_goals": 2, "away_goals": 2},
            {"match_id": 3, "gameweek": 1, "date": "", "home_team_id": 5, "away_team_id": 6, "home_goals": 1, "away_goals": 0}
        ]);
        let b = |v: &serde_json::Value| serde_json::to_vec(v).unwrap();
        let ds = parse_dataset(&b(&matches), b"[]", &b(&json!(teams)), b"[]").unwrap();
        build_tables(&ds).unwrap()
    }

    #[test]
    fn bank_wordings() {
        let t = named_league();
        let o = Oracle::new(&t, OracleConfig::default());
        assert_eq!(
            o.parse_question("Question : footgpt, what was Torino FC's goal count on gameweek 10 ?").unwrap(),
            Query::WeeklyGoals {
                team: TeamId(1),
                gameweek: 10
            }
        );
        assert_eq!(
            o.parse_question("footgpt, What is footgpt ?").unwrap(),
            Query::SelfAwareness { topic: SelfTopic::Identity }
        );
        assert_eq!(
            o.parse_question("footgpt, till gameweek 5 in league Italy, on average team SSC Napoli how many points collected ?")
                .unwrap(),
            Query::CumulativeAverage {
                team: TeamId(2),
                gameweek: 5,
                metric: Metric::Points
            }
        );
    }

    #[test]
    fn unsupported_and_ambiguous() {
        let t = named_league();
        let o = Oracle::new(&t, OracleConfig::default());
        assert!(matches!(
            o.parse_question("footgpt, who will win the World Cup?"),
            Err(Error::UnsupportedQuestion(_))
        ));
        let mut cfg = OracleConfig::default();
        cfg.aliases.clear();
        let bare = Oracle::new(&t, cfg);
        match bare.resolve_team("FC") {
            Err(Error::AmbiguousTeam { candidates, .. }) => assert!(candidates.len() >= 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_names_and_aliases() {
        let t = named_league();
        let o = Oracle::new(&t, OracleConfig::default());
        assert_eq!(o.resolve_team("Napoli").unwrap(), TeamId(2));
        assert_eq!(o.resolve_team("milan").unwrap(), TeamId(3));
        assert_eq!(o.resolve_team("Inter").unwrap(), TeamId(4));
        assert!(matches!(o.resolve_team("Roma"), Err(Error::NotFound(_))));
    }

    #[test]
    fn free_wording_fallback() {
        let t = named_league();
        let o = Oracle::new(&t, OracleConfig::default());
        assert_eq!(
            o.parse_question("footgpt, how many goals did Napoli get in gameweek 1?").unwrap(),
            Query::WeeklyGoals {
                team: TeamId(2),
                gameweek: 1
            }
        );
        assert_eq!(
            o.parse_question("footgpt, who won the match of Napoli and Torino on gameweek 1?").unwrap(),
            Query::MatchWinner {
                gameweek: 1,
                home: TeamId(1),
                away: TeamId(2)
            }
        );
        assert_eq!(
            o.parse_question("footgpt, Bologna FC 1909 shots per match rank this season?").unwrap(),
            Query::SeasonRanking {
                team: TeamId(6),
                event_type: EventType::Shot
            }
        );
    }
}
