//! Ground-truth answers for every factual template, plus question parsing
//! and fact-based grading of free-text answers.
//!
//! All numbers come from [`crate::stats`]. The same slot values feed both
//! the oracle's canonical text and every curated phrasing, so a curated
//! answer always contains the facts the oracle grades against.

mod grade;
mod parse;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use grade::{grade, normalize, EntityCheck, GradeReport, GradeVerdict, NumericCheck};

use crate::curate::bank::{fill, Bank, Family, Slots};
use crate::error::{Error, Result};
use crate::model::{EventType, Outcome, Side, TeamId};
use crate::stats::{self, Metric, Verdict};
use crate::tables::{team_week_lookup, Tables};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfTopic {
    Identity,
    Scope,
    Players,
}

/// A fully parameterized question. Serializes as `{"template": id, ...params}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case")]
pub enum Query {
    WeeklyStanding { team: TeamId, gameweek: u32 },
    WeeklyPosition { team: TeamId, gameweek: u32 },
    WeeklyGoals { team: TeamId, gameweek: u32 },
    WeeklyResult { team: TeamId, gameweek: u32 },
    Progression { team: TeamId, gw_start: u32, gw_end: u32 },
    MultiComparison { teams: Vec<TeamId>, gameweek: u32 },
    MatchWinner { gameweek: u32, home: TeamId, away: TeamId },
    PairComparison { gameweek: u32, team_a: TeamId, team_b: TeamId },
    CumulativeAverage { team: TeamId, gameweek: u32, metric: Metric },
    EventCount { team: TeamId, gameweek: u32, event_type: EventType },
    EventRangePerMatch { team: TeamId, gw_start: u32, gw_end: u32, event_type: EventType },
    SeasonRanking { team: TeamId, event_type: EventType },
    SelfAwareness { topic: SelfTopic },
}

impl Query {
    pub fn template_id(&self) -> &'static str {
        match self {
            Query::WeeklyStanding { .. } => "weekly_standing",
            Query::WeeklyPosition { .. } => "weekly_position",
            Query::WeeklyGoals { .. } => "weekly_goals",
            Query::WeeklyResult { .. } => "weekly_result",
            Query::Progression { .. } => "progression",
            Query::MultiComparison { .. } => "multi_comparison",
            Query::MatchWinner { .. } => "match_winner",
            Query::PairComparison { .. } => "pair_comparison",
            Query::CumulativeAverage { .. } => "cumulative_average",
            Query::EventCount { .. } => "event_count",
            Query::EventRangePerMatch { .. } => "event_range_per_match",
            Query::SeasonRanking { .. } => "season_ranking",
            Query::SelfAwareness { topic: SelfTopic::Identity } => "self_identity",
            Query::SelfAwareness { topic: SelfTopic::Scope } => "self_scope",
            Query::SelfAwareness { topic: SelfTopic::Players } => "self_players",
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Query::WeeklyStanding { .. }
            | Query::WeeklyPosition { .. }
            | Query::WeeklyGoals { .. }
            | Query::WeeklyResult { .. } => Family::Weekly,
            Query::Progression { .. } => Family::Progression,
            Query::MultiComparison { .. } => Family::MultiComparison,
            Query::MatchWinner { .. } | Query::PairComparison { .. } => Family::PairComparison,
            Query::CumulativeAverage { .. } => Family::CumulativeAverage,
            Query::EventCount { .. } | Query::EventRangePerMatch { .. } => Family::EventDecomposition,
            Query::SeasonRanking { .. } => Family::SeasonRanking,
            Query::SelfAwareness { .. } => Family::SelfAwareness,
        }
    }

    /// Inverse of `(template_id(), params())`.
    pub fn from_parts(template_id: &str, params: &serde_json::Map<String, serde_json::Value>) -> Option<Query> {
        let tag = if template_id.starts_with("self_") {
            "self_awareness"
        } else {
            template_id
        };
        let mut obj = params.clone();
        obj.insert("template".to_owned(), tag.into());
        let q: Query = serde_json::from_value(serde_json::Value::Object(obj)).ok()?;
        (q.template_id() == template_id).then_some(q)
    }

    /// Parameters without the template tag.
    pub fn params(&self) -> serde_json::Map<String, serde_json::Value> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(mut m)) => {
                m.remove("template");
                m
            }
            _ => serde_json::Map::new(),
        }
    }
}

/// One checkable statement in an answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fact {
    /// A number shown with `decimals` fractional digits.
    Numeric { name: String, expected: f64, decimals: u32 },
    /// A phrase; any of `alternatives` counts as a match.
    Entity { name: String, expected: String, alternatives: Vec<String> },
    /// Names that must appear in this order.
    Ordering { name: String, sequence: Vec<String> },
}

impl Fact {
    fn int(name: &str, v: impl Into<u64>) -> Fact {
        Fact::Numeric {
            name: name.to_owned(),
            expected: v.into() as f64,
            decimals: 0,
        }
    }

    fn fixed(name: &str, scaled: u64, decimals: u32) -> Fact {
        Fact::Numeric {
            name: name.to_owned(),
            expected: scaled as f64 / 10f64.powi(decimals as i32),
            decimals,
        }
    }

    fn entity(name: &str, alternatives: Vec<String>) -> Fact {
        Fact::Entity {
            name: name.to_owned(),
            expected: alternatives[0].clone(),
            alternatives,
        }
    }
}

/// The oracle's answer: structured facts and the canonical wording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub query: Query,
    pub facts: Vec<Fact>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub season_label: String,
    pub assistant_name: String,
    /// Extra short names, e.g. `"Milan" -> "AC Milan"`. Entries whose target
    /// is not in the league are ignored.
    pub aliases: BTreeMap<String, String>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        let aliases = [("Milan", "AC Milan"), ("Inter", "FC Internazionale Milano")]
            .into_iter()
            .map(|(a, b)| (a.to_owned(), b.to_owned()))
            .collect();
        OracleConfig {
            season_label: "2017/2018".to_owned(),
            assistant_name: "footgpt".to_owned(),
            aliases,
        }
    }
}

pub fn league_adjective(league: &str) -> String {
    match league {
        "Italy" => "Italian",
        "England" => "English",
        "Spain" => "Spanish",
        "Germany" => "German",
        "France" => "French",
        other => other,
    }
    .to_owned()
}

fn number_word(n: u32) -> String {
    const WORDS: [&str; 21] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
        "nineteen", "twenty",
    ];
    WORDS.get(n as usize).map_or_else(|| n.to_string(), |w| (*w).to_owned())
}

pub fn ordinal(n: u32) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

/// Slot values and facts for one query.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub slots: Slots,
    pub facts: Vec<Fact>,
}

pub struct Oracle<'t> {
    tables: &'t Tables,
    config: OracleConfig,
    bank: Bank,
}

impl<'t> Oracle<'t> {
    pub fn new(tables: &'t Tables, config: OracleConfig) -> Self {
        Oracle::with_bank(tables, config, Bank::builtin())
    }

    pub fn with_bank(tables: &'t Tables, config: OracleConfig, bank: Bank) -> Self {
        Oracle { tables, config, bank }
    }

    pub fn tables(&self) -> &'t Tables {
        self.tables
    }

    pub fn bank(&self) -> &Bank {
        &self.bank
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    fn base_slots(&self) -> Slots {
        let league = &self.tables.league;
        let adj = league_adjective(league);
        let mut s = Slots::new();
        let mut put = |k: &str, v: String| {
            s.insert(k.to_owned(), v);
        };
        put("league", league.clone());
        put("league_lower", league.to_lowercase());
        put("league_adj_lower", adj.to_lowercase());
        put("league_adj", adj);
        put("season", self.config.season_label.clone());
        put("name", self.config.assistant_name.clone());
        put("n_teams", self.tables.team_count().to_string());
        put("n_gw", self.tables.last_gameweek().to_string());
        put("n_gw_word", number_word(self.tables.last_gameweek()));
        s
    }

    fn name(&self, id: TeamId) -> Result<String> {
        self.tables.team_name(id).map(str::to_owned)
    }

    /// Computes every slot the question and answer wordings of `query` use,
    /// and the facts a correct answer must state.
    pub fn evaluate(&self, query: &Query) -> Result<Evaluated> {
        let t = self.tables;
        let mut s = self.base_slots();
        let mut facts = Vec::new();
        let put = |s: &mut Slots, k: &str, v: String| {
            s.insert(k.to_owned(), v);
        };
        match query {
            Query::WeeklyStanding { team, gameweek }
            | Query::WeeklyPosition { team, gameweek }
            | Query::WeeklyGoals { team, gameweek }
            | Query::WeeklyResult { team, gameweek } => {
                let name = self.name(*team)?;
                put(&mut s, "team", name.clone());
                put(&mut s, "gw", gameweek.to_string());
                let standing = stats::standing_of(t, *team, *gameweek)?;
                put(&mut s, "points", standing.points_cum.to_string());
                put(&mut s, "rank", standing.rank.to_string());
                if let Query::WeeklyPosition { .. } = query {
                    facts.push(Fact::int("points", standing.points_cum));
                    facts.push(Fact::int("rank", standing.rank));
                } else {
                    let row = team_week_lookup(t, *team, *gameweek)?;
                    let opp = self.name(row.opposing_team_id)?;
                    let outcomes = outcome_phrases(row.outcome(), &opp);
                    put(&mut s, "opp", opp.clone());
                    put(&mut s, "goals", row.goals_scored.to_string());
                    put(&mut s, "score", format!("{} - {}", row.goals_scored, row.goals_conceded));
                    let (side_1, side_2) = match row.side {
                        Side::Home => ("on the home side", "at home"),
                        Side::Away => ("on the away side", "at away"),
                    };
                    put(&mut s, "side_1", side_1.to_owned());
                    put(&mut s, "side_2", side_2.to_owned());
                    for (i, o) in outcomes.iter().enumerate() {
                        put(&mut s, &format!("outcome_{}", i + 1), o.clone());
                    }
                    match query {
                        Query::WeeklyStanding { .. } => {
                            facts.push(Fact::int("points", standing.points_cum));
                            facts.push(Fact::int("rank", standing.rank));
                            facts.push(Fact::int("goals", row.goals_scored));
                            facts.push(Fact::entity("opponent", vec![opp]));
                            facts.push(Fact::entity("outcome", outcomes.to_vec()));
                        }
                        Query::WeeklyGoals { .. } => {
                            facts.push(Fact::int("goals", row.goals_scored));
                            facts.push(Fact::entity("opponent", vec![opp]));
                        }
                        _ => facts.push(Fact::entity("outcome", outcomes.to_vec())),
                    }
                }
            }
            Query::Progression { team, gw_start, gw_end } => {
                let p = stats::progression(t, *team, *gw_start, *gw_end)?;
                put(&mut s, "team", self.name(*team)?);
                put(&mut s, "gw_start", gw_start.to_string());
                put(&mut s, "gw_end", gw_end.to_string());
                put(&mut s, "rank_start", p.rank_start.to_string());
                put(&mut s, "rank_start_ord", ordinal(p.rank_start));
                put(&mut s, "rank_end", p.rank_end.to_string());
                let (moved, verdicts) = verdict_phrases(p.verdict);
                put(&mut s, "moved", moved.to_owned());
                for (i, v) in verdicts.iter().enumerate() {
                    put(&mut s, &format!("verdict_{}", i + 1), (*v).to_owned());
                }
                facts.push(Fact::int("rank_start", p.rank_start));
                facts.push(Fact::int("rank_end", p.rank_end));
                facts.push(Fact::entity("verdict", verdicts.iter().map(|v| v.to_string()).collect()));
            }
            Query::MultiComparison { teams, gameweek } => {
                let rows = stats::compare_teams(t, teams, *gameweek)?;
                let asked = teams.iter().map(|&id| self.name(id)).collect::<Result<Vec<_>>>()?;
                let ordered = rows.iter().map(|r| self.name(r.team_id)).collect::<Result<Vec<_>>>()?;
                put(&mut s, "teams", asked.join(", "));
                put(&mut s, "gw", gameweek.to_string());
                put(&mut s, "order_gt", ordered.join(" > "));
                put(&mut s, "order_better", ordered.join(" is better than "));
                facts.push(Fact::Ordering {
                    name: "ranking".to_owned(),
                    sequence: ordered,
                });
            }
            Query::MatchWinner { gameweek, home, away } => {
                let row = team_week_lookup(t, *home, *gameweek)?;
                if row.side != Side::Home || row.opposing_team_id != *away {
                    return Err(Error::NotFound(format!(
                        "no gameweek {gameweek} match with {home} hosting {away}"
                    )));
                }
                let (h, a) = (self.name(*home)?, self.name(*away)?);
                put(&mut s, "home", h.clone());
                put(&mut s, "away", a.clone());
                put(&mut s, "gw", gameweek.to_string());
                put(&mut s, "score", format!("{} - {}", row.goals_scored, row.goals_conceded));
                let results = match row.outcome() {
                    Outcome::Draw => [
                        format!("Neither {h} nor {a} was better for this gameweek, it was a draw"),
                        format!("{h} and {a} drew"),
                        format!("Nobody came out ahead between {h} and {a}"),
                    ],
                    o => {
                        let (w, l) = if o == Outcome::Win { (&h, &a) } else { (&a, &h) };
                        [
                            format!("{w} was better for this gameweek."),
                            format!("{w} won the game against {l}"),
                            format!("{w} came out ahead of {l}"),
                        ]
                    }
                };
                for (i, r) in results.iter().enumerate() {
                    put(&mut s, &format!("result_{}", i + 1), r.clone());
                }
                facts.push(Fact::entity("result", results.to_vec()));
            }
            Query::PairComparison { gameweek, team_a, team_b } => {
                let rows = stats::compare_teams(t, &[*team_a, *team_b], *gameweek)?;
                let row_of = |id: TeamId| rows.iter().find(|r| r.team_id == id).expect("compared team");
                let (ra, rb) = (row_of(*team_a), row_of(*team_b));
                let (na, nb) = (self.name(*team_a)?, self.name(*team_b)?);
                let (better, worse) = if ra.rank < rb.rank { ((&na, ra), (&nb, rb)) } else { ((&nb, rb), (&na, ra)) };
                put(&mut s, "gw", gameweek.to_string());
                put(&mut s, "team_a", na.clone());
                put(&mut s, "team_b", nb.clone());
                put(&mut s, "rank_a", ra.rank.to_string());
                put(&mut s, "rank_b", rb.rank.to_string());
                put(&mut s, "goals_a", ra.goals_cum.to_string());
                put(&mut s, "goals_b", rb.goals_cum.to_string());
                let (bn, bg, wn, wg) = (better.0, better.1.goals_cum, worse.0, worse.1.goals_cum);
                let clause = match bg.cmp(&wg) {
                    std::cmp::Ordering::Greater => {
                        format!("{bn} scored {bg} goals, more (better) than {wn} which scored {wg}")
                    }
                    std::cmp::Ordering::Less => format!("{bn} scored {bg} goals, fewer than {wn} which scored {wg}"),
                    std::cmp::Ordering::Equal => format!("{bn} scored {bg} goals, as many as {wn} which scored {wg}"),
                };
                put(&mut s, "goals_clause", clause);
                let betters = [
                    format!("{bn} is better compared to {wn}"),
                    format!("{bn} is ahead of {wn}"),
                    format!("{bn} outranks {wn}"),
                ];
                for (i, b) in betters.iter().enumerate() {
                    put(&mut s, &format!("better_{}", i + 1), b.clone());
                }
                facts.push(Fact::int("rank_a", ra.rank));
                facts.push(Fact::int("rank_b", rb.rank));
                facts.push(Fact::int("goals_a", ra.goals_cum));
                facts.push(Fact::int("goals_b", rb.goals_cum));
                facts.push(Fact::entity("better", betters.to_vec()));
            }
            Query::CumulativeAverage { team, gameweek, metric } => {
                let avg = stats::cumulative_average(t, *team, *gameweek, *metric)?;
                put(&mut s, "team", self.name(*team)?);
                put(&mut s, "gw", gameweek.to_string());
                put(&mut s, "metric", metric.as_str().to_owned());
                let (phrase, verb) = match metric {
                    Metric::Goals => ("goals scored", "scored"),
                    Metric::Points => ("points collected", "has collected"),
                };
                put(&mut s, "metric_phrase", phrase.to_owned());
                put(&mut s, "avg_verb", verb.to_owned());
                put(&mut s, "value", avg.value_string());
                put(&mut s, "numerator", avg.numerator.to_string());
                put(&mut s, "denominator", avg.denominator.to_string());
                put(&mut s, "arith", avg.arithmetic_string());
                facts.push(Fact::fixed("average", avg.tenths, 1));
                facts.push(Fact::int("numerator", avg.numerator));
                facts.push(Fact::int("denominator", avg.denominator));
            }
            Query::EventCount { team, gameweek, event_type } => {
                team_week_lookup(t, *team, *gameweek)?;
                let d = stats::event_decomposition(t, *team, *gameweek..=*gameweek, *event_type, false)?;
                put(&mut s, "team", self.name(*team)?);
                put(&mut s, "gw", gameweek.to_string());
                decomposition_slots(&mut s, &mut facts, *event_type, &d);
            }
            Query::EventRangePerMatch { team, gw_start, gw_end, event_type } => {
                let d = stats::event_decomposition(t, *team, *gw_start..=*gw_end, *event_type, true)?;
                if d.matches == 0 {
                    return Err(Error::NotFound(format!(
                        "team {team} played no match in gameweeks {gw_start}..={gw_end}"
                    )));
                }
                put(&mut s, "team", self.name(*team)?);
                put(&mut s, "gw_start", gw_start.to_string());
                put(&mut s, "gw_end", gw_end.to_string());
                decomposition_slots(&mut s, &mut facts, *event_type, &d);
            }
            Query::SeasonRanking { team, event_type } => {
                let name = self.name(*team)?;
                let ranking = stats::season_event_ranking(t, *event_type);
                let row = ranking
                    .iter()
                    .find(|r| r.team_id == *team)
                    .ok_or_else(|| Error::NotFound(format!("team {team} in ranking")))?;
                put(&mut s, "team", name);
                put(&mut s, "etype", event_type.name().to_owned());
                put(&mut s, "rank", row.rank.to_string());
                put(&mut s, "avg", row.avg_string());
                facts.push(Fact::int("rank", row.rank));
                facts.push(Fact::fixed("average", row.avg_hundredths, 2));
            }
            Query::SelfAwareness { topic } => match topic {
                SelfTopic::Identity => {
                    facts.push(Fact::entity("name", vec![self.config.assistant_name.clone()]));
                }
                SelfTopic::Scope => {
                    let scopes = ["all teams".to_owned(), format!("all {} teams", t.team_count())];
                    put(&mut s, "scope_1", scopes[0].clone());
                    put(&mut s, "scope_2", scopes[1].clone());
                    facts.push(Fact::entity("scope", scopes.to_vec()));
                }
                SelfTopic::Players => {
                    put(&mut s, "refusal", "No".to_owned());
                    facts.push(Fact::entity("refusal", vec!["No".to_owned()]));
                }
            },
        }
        Ok(Evaluated { slots: s, facts })
    }

    pub fn render_question(&self, query: &Query, evaluated: &Evaluated, variant: usize) -> Result<String> {
        let t = self.bank.template(query.template_id())?;
        let wording = t
            .questions
            .get(variant)
            .ok_or_else(|| Error::NotFound(format!("question variant {variant} of {}", t.id)))?;
        fill(wording, &evaluated.slots)
    }

    pub fn render_answer(&self, query: &Query, evaluated: &Evaluated, variant: usize) -> Result<String> {
        let t = self.bank.template(query.template_id())?;
        let wording = t
            .answers
            .get(variant)
            .ok_or_else(|| Error::NotFound(format!("answer variant {variant} of {}", t.id)))?;
        fill(wording, &evaluated.slots)
    }

    /// Facts plus the canonical (first) answer wording.
    pub fn answer(&self, query: &Query) -> Result<Answer> {
        let ev = self.evaluate(query)?;
        let text = self.render_answer(query, &ev, 0)?;
        Ok(Answer {
            query: query.clone(),
            facts: ev.facts,
            text,
        })
    }
}

fn outcome_phrases(outcome: Outcome, opp: &str) -> [String; 3] {
    match outcome {
        Outcome::Win => [
            format!("came out on top against {opp}"),
            format!("prevailed against {opp}"),
            format!("got the better of {opp}"),
        ],
        Outcome::Draw => [
            format!("held {opp} to a draw"),
            format!("split the points with {opp}"),
            format!("could not be separated from {opp}"),
        ],
        Outcome::Loss => [
            format!("ended up losing to {opp}"),
            format!("fell short against {opp}"),
            format!("couldn't hold their ground against {opp}"),
        ],
    }
}

fn verdict_phrases(v: Verdict) -> (&'static str, [&'static str; 3]) {
    match v {
        Verdict::Improvement => (
            "climbed to",
            ["Clearly, an improvement.", "An evident progression.", "This is a step forward."],
        ),
        Verdict::StepBackwards => (
            "slipped to",
            ["Clearly, a decline.", "An evident regression.", "This is a step backwards."],
        ),
        Verdict::Unchanged => (
            "stayed at",
            ["Clearly, no change.", "An unchanged position.", "This is a standstill."],
        ),
    }
}

fn decomposition_slots(s: &mut Slots, facts: &mut Vec<Fact>, et: EventType, d: &stats::Decomposition) {
    s.insert("etype".to_owned(), et.name().to_owned());
    s.insert("count".to_owned(), d.total_count.to_string());
    let shares = if d.top5.is_empty() { "none".to_owned() } else { d.shares_text() };
    s.insert("shares".to_owned(), shares);
    facts.push(Fact::int("count", d.total_count));
    for (i, share) in d.top5.iter().enumerate() {
        facts.push(Fact::entity(
            &format!("share_{}", i + 1),
            vec![format!("{}% in {}", share.pct, share.region)],
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::fixture_gen;
    use crate::tables::build_tables;

    fn league() -> Tables {
        build_tables(&fixture_gen(6, 4, 3).unwrap().parse().unwrap()).unwrap()
    }

    #[test]
    fn ordinals() {
        let got: Vec<String> = [1, 2, 3, 4, 11, 12, 13, 21, 22, 101].iter().map(|&n| ordinal(n)).collect();
        assert_eq!(got, ["1st", "2nd", "3rd", "4th", "11th", "12th", "13th", "21st", "22nd", "101st"]);
    }

    #[test]
    fn query_serializes_with_template_tag() {
        let q = Query::CumulativeAverage {
            team: TeamId(7),
            gameweek: 5,
            metric: Metric::Points,
        };
        let v = serde_json::to_value(&q).unwrap();
        assert_eq!(v["template"], "cumulative_average");
        assert_eq!(v["metric"], "points");
        assert_eq!(q.params().len(), 3);
        let back: Query = serde_json::from_value(v).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn canonical_answers_render() {
        let t = league();
        let o = Oracle::new(&t, OracleConfig::default());
        let team = t.teams_info[0].team_id;
        let a = o
            .answer(&Query::CumulativeAverage {
                team,
                gameweek: 4,
                metric: Metric::Goals,
            })
            .unwrap();
        assert!(a.text.starts_with("till gameweek 4 in league Italy, team "));
        assert!(a.text.contains(" / 4 = "));
        let me = o.answer(&Query::SelfAwareness { topic: SelfTopic::Players }).unwrap();
        assert!(me.text.starts_with("No, footgpt can only give answers"));
    }

    #[test]
    fn unknown_team_and_gameweek() {
        let t = league();
        let o = Oracle::new(&t, OracleConfig::default());
        let bad = Query::WeeklyGoals {
            team: TeamId(1),
            gameweek: 1,
        };
        assert!(matches!(o.answer(&bad), Err(Error::NotFound(_))));
        let team = t.teams_info[0].team_id;
        assert!(o.answer(&Query::WeeklyPosition { team, gameweek: 9 }).is_err());
    }
}
