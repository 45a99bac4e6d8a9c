//! Phrasing bank: question and answer wordings per template, with `{slot}`
//! placeholders.
//!
//! Question wordings double as parsers: every placeholder maps to a regex
//! fragment, so a rendered question can be inverted back to its parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EventType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Weekly,
    Progression,
    MultiComparison,
    PairComparison,
    CumulativeAverage,
    EventDecomposition,
    SeasonRanking,
    SelfAwareness,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Weekly,
        Family::Progression,
        Family::MultiComparison,
        Family::PairComparison,
        Family::CumulativeAverage,
        Family::EventDecomposition,
        Family::SeasonRanking,
        Family::SelfAwareness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Weekly => "weekly",
            Family::Progression => "progression",
            Family::MultiComparison => "multi_comparison",
            Family::PairComparison => "pair_comparison",
            Family::CumulativeAverage => "cumulative_average",
            Family::EventDecomposition => "event_decomposition",
            Family::SeasonRanking => "season_ranking",
            Family::SelfAwareness => "self_awareness",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown family {s:?}")))
    }
}

pub type Slots = BTreeMap<String, String>;

#[derive(Debug, Clone)]
pub struct Template {
    pub id: &'static str,
    pub family: Family,
    pub questions: Vec<String>,
    pub answers: Vec<String>,
}

/// Placeholders a question must carry for its parameters to be recoverable.
/// A nested slice means "any one of".
fn question_requirements(id: &str) -> &'static [&'static [&'static str]] {
    match id {
        "weekly_standing" | "weekly_position" | "weekly_goals" | "weekly_result" => &[&["team"], &["gw"]],
        "progression" => &[&["team"], &["gw_start"], &["gw_end"]],
        "multi_comparison" => &[&["teams"], &["gw"]],
        "match_winner" => &[&["home"], &["away"], &["gw"]],
        "pair_comparison" => &[&["team_a"], &["team_b"], &["gw"]],
        "cumulative_average" => &[&["team"], &["gw"], &["metric", "metric_phrase"]],
        "event_count" => &[&["team"], &["gw"], &["etype"]],
        "event_range_per_match" => &[&["team"], &["gw_start"], &["gw_end"], &["etype"]],
        "season_ranking" => &[&["team"], &["etype"]],
        _ => &[],
    }
}

/// Slots an answer must carry so that every graded fact appears in it.
fn answer_requirements(id: &str) -> &'static [&'static [&'static str]] {
    const OUTCOME: &[&str] = &["outcome_1", "outcome_2", "outcome_3"];
    match id {
        "weekly_standing" => &[&["points"], &["rank"], &["goals"], &["opp"], OUTCOME],
        "weekly_position" => &[&["points"], &["rank"]],
        "weekly_goals" => &[&["goals"], &["opp"]],
        "weekly_result" => &[OUTCOME],
        "progression" => &[
            &["rank_start", "rank_start_ord"],
            &["rank_end"],
            &["verdict_1", "verdict_2", "verdict_3"],
        ],
        "multi_comparison" => &[&["order_gt", "order_better"]],
        "match_winner" => &[&["result_1", "result_2", "result_3"]],
        "pair_comparison" => &[
            &["rank_a"],
            &["rank_b"],
            &["goals_a", "goals_clause"],
            &["goals_b", "goals_clause"],
            &["better_1", "better_2", "better_3"],
        ],
        "cumulative_average" => &[&["value"], &["numerator", "arith"], &["denominator", "arith"]],
        "event_count" | "event_range_per_match" => &[&["count"], &["shares"]],
        "season_ranking" => &[&["rank"], &["avg"]],
        "self_identity" => &[&["name"]],
        "self_scope" => &[&["scope_1", "scope_2"]],
        "self_players" => &[&["refusal"]],
        _ => &[],
    }
}

static PLACEHOLDER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{([a-z0-9_]+)\}").expect("static regex"));

pub fn placeholders(text: &str) -> Vec<&str> {
    PLACEHOLDER
        .captures_iter(text)
        .map(|c| c.get(1).expect("group").as_str())
        .collect()
}

/// Substitutes every `{slot}`; a slot with no value is an error.
pub fn fill(text: &str, slots: &Slots) -> Result<String> {
    let mut out = String::with_capacity(text.len() + 32);
    let mut last = 0;
    for cap in PLACEHOLDER.captures_iter(text) {
        let whole = cap.get(0).expect("match");
        let name = &cap[1];
        let value = slots
            .get(name)
            .ok_or_else(|| Error::domain(format!("no value for slot {{{name}}} in {text:?}")))?;
        out.push_str(&text[last..whole.start()]);
        out.push_str(value);
        last = whole.end();
    }
    out.push_str(&text[last..]);
    Ok(out)
}

fn check_requirements(id: &str, text: &str, groups: &[&[&str]], what: &str) -> Result<()> {
    let present: BTreeSet<&str> = placeholders(text).into_iter().collect();
    for group in groups {
        if !group.iter().any(|s| present.contains(s)) {
            return Err(Error::domain(format!(
                "{what} for {id} must contain one of {{{}}}: {text:?}",
                group.join("}, {")
            )));
        }
    }
    Ok(())
}

const QUESTION_SLOTS: &[&str] = &[
    "team", "team_a", "team_b", "home", "away", "teams", "gw", "gw_start", "gw_end", "etype",
    "metric", "metric_phrase", "league", "league_adj", "league_lower", "season",
];

fn slot_pattern(name: &str) -> Option<String> {
    let named_lazy = |n: &str| format!("(?P<{n}>.+?)");
    Some(match name {
        "team" | "team_a" | "team_b" | "home" | "away" | "teams" => named_lazy(name),
        "gw" | "gw_start" | "gw_end" => format!(r"(?P<{name}>\d+)"),
        "etype" => {
            let mut names: Vec<&str> = EventType::ALL.iter().map(|e| e.name()).collect();
            names.sort_by_key(|n| std::cmp::Reverse(n.len()));
            let alts: Vec<String> = names.iter().map(|n| regex::escape(n).replace(' ', r"\s+")).collect();
            format!("(?P<etype>{})", alts.join("|"))
        }
        "metric" => "(?P<metric>goals|points)".to_owned(),
        "metric_phrase" => r"(?P<metric_phrase>goals\s+scored|points\s+collected)".to_owned(),
        "league" | "league_adj" | "league_lower" | "season" => "(?:.+?)".to_owned(),
        _ => return None,
    })
}

static WHITESPACE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s+").expect("static regex"));

fn literal_pattern(s: &str) -> String {
    WHITESPACE
        .replace_all(&regex::escape(s), regex::NoExpand(r"\s+"))
        .into_owned()
}

/// Compiles a question wording into an anchored, case-insensitive regex.
pub fn question_regex(text: &str) -> Result<Regex> {
    let mut pattern = String::from(r"(?i)^\s*");
    let mut last = 0;
    for cap in PLACEHOLDER.captures_iter(text) {
        let whole = cap.get(0).expect("match");
        pattern.push_str(&literal_pattern(&text[last..whole.start()]));
        let slot = slot_pattern(&cap[1])
            .ok_or_else(|| Error::domain(format!("unknown question slot {{{}}}", &cap[1])))?;
        pattern.push_str(&slot);
        last = whole.end();
    }
    pattern.push_str(&literal_pattern(text[last..].trim_end()));
    pattern.push_str(r"\s*$");
    Regex::new(&pattern).map_err(|e| Error::domain(format!("bad question wording {text:?}: {e}")))
}

fn t(id: &'static str, family: Family, questions: &[&str], answers: &[&str]) -> Template {
    Template {
        id,
        family,
        questions: questions.iter().map(|s| s.to_string()).collect(),
        answers: answers.iter().map(|s| s.to_string()).collect(),
    }
}

fn builtin_templates() -> Vec<Template> {
    use Family::*;
    vec![
        t(
            "weekly_standing",
            Weekly,
            &[
                "where is team {team} placed of {league} in gameweek {gw}?",
                "I'd like to know the current position of team {team} in {league} for gameweek {gw}.",
                "how did team {team} fare in {league} on gameweek {gw}, and where does it stand?",
            ],
            &[
                "In gameweek {gw} of league {league}, {team} faced off against {opp} {side_1}. The result was {team} {outcome_1}.. Till this gameweek, {team} accumulated {points} points, placing them {rank} out of {n_teams} teams. In the match, {team} netted {goals} times against {opp}.",
                "During gameweek {gw} in the {league}, {team} went head-to-head with {opp} {side_2}. The outcome was {team} {outcome_2}.. Up to this gameweek, {team} has amassed {points} points, standing {rank} among {n_teams} teams. {team} managed to score {goals} goals against {opp}.",
                "Gameweek {gw} in {league} saw {team} meet {opp} {side_2}: {team} {outcome_3}. With {points} points so far, {team} is ranked {rank} of {n_teams} teams and scored {goals} goals in that match against {opp}.",
            ],
        ),
        t(
            "weekly_position",
            Weekly,
            &[
                "how's team {team} doing in the {league} during gameweek {gw}?",
                "what's the current standing of team {team} in {league} as of gameweek {gw}?",
                "what position does team {team} hold in {league} at gameweek {gw}?",
            ],
            &[
                "Up to this game, {team} sits with {points} points and is at position {rank} out of {n_teams} teams.",
                "{team} Having collected {points} points by this gameweek, holds the {rank} rank among {n_teams} teams",
                "As of gameweek {gw}, {team} is placed {rank} out of {n_teams} teams with {points} points.",
            ],
        ),
        t(
            "weekly_goals",
            Weekly,
            &[
                "what was {team}'s goal count on gameweek {gw} ?",
                "how many goals did {team} score on gameweek {gw} ?",
                "on gameweek {gw}, how many times did {team} find the net?",
            ],
            &[
                "{team} netted {goals} times during gameweek {gw} when playing {opp}.",
                "{team} scored {goals} goals against {opp} on gameweek {gw}.",
                "On gameweek {gw}, {team} found the net {goals} times versus {opp}.",
            ],
        ),
        t(
            "weekly_result",
            Weekly,
            &[
                "what was the match result of {team} played on gameweek {gw}?",
                "how did the gameweek {gw} match of {team} end?",
                "what happened in {team}'s match on gameweek {gw}?",
            ],
            &[
                "{team} {outcome_3}. on gameweek {gw} in {league} league.",
                "On gameweek {gw}, {team} {outcome_1} ({score}).",
                "In {league}, gameweek {gw}: {team} {outcome_2}, final score {score}.",
            ],
        ),
        t(
            "progression",
            Progression,
            &[
                "from the duration of gameweek {gw_start} to {gw_end}, did team {team} elevate their game?",
                "during the interval from gameweek {gw_start} to {gw_end}, has team {team} stepped up?",
                "looking at gameweeks {gw_start} to {gw_end}, can you tell if team {team} moved forward?",
            ],
            &[
                "Team {team} held the {rank_start_ord} position on gameweek {gw_start}. Moving to gameweek {gw_end}, it now stands at rank {rank_end}. {verdict_1}",
                "Team {team} was positioned at rank {rank_start} during gameweek {gw_start}. By the time we reached gameweek {gw_end}, it {moved} rank {rank_end}. {verdict_2}",
                "team {team}'s position was {rank_start} For gameweek {gw_start}. Jumping to gameweek {gw_end}, its rank changed to {rank_end}. {verdict_3}",
            ],
        ),
        t(
            "multi_comparison",
            MultiComparison,
            &[
                "based on the matches of the {league_adj} league until gameweek {gw}, could you evaluate the rankings of {teams}",
                "in the {league_adj} league through gameweek {gw}, how do the rankings of {teams} compare?",
                "up to gameweek {gw} in {league}, how would you order {teams} by standing?",
            ],
            &[
                "on gameweek {gw} in {league_lower} : {order_better}",
                "on gameweek {gw} in {league_lower} : {order_gt}",
                "At gameweek {gw} the ranking is {order_gt}.",
            ],
        ),
        t(
            "match_winner",
            PairComparison,
            &[
                "for the match on gameweek {gw} between {home} and {away} in {league} league. Which team was better?",
                "on gameweek {gw}, who won the game between {home} and {away} in {league}?",
                "which side came out ahead when {home} hosted {away} on gameweek {gw}?",
            ],
            &[
                "{result_1}",
                "{result_2} ({score}).",
                "{result_3}, final score {score}.",
            ],
        ),
        t(
            "pair_comparison",
            PairComparison,
            &[
                "on gameweek {gw} in league {league}, can you compare the performances team {team_a} and team {team_b} ?",
                "how do team {team_a} and team {team_b} compare on gameweek {gw} in {league}?",
                "on gameweek {gw}, which is ahead between team {team_a} and team {team_b}?",
            ],
            &[
                "on gameweek {gw} in league {league}, team {team_a} ranks {rank_a} in points and team {team_b} ranks {rank_b}. So, {better_1}. {goals_clause}",
                "{team_a} is ranked {rank_a} and {team_b} is ranked {rank_b} at gameweek {gw}, so {better_2}; goals so far: {team_a} {goals_a}, {team_b} {goals_b}.",
                "{better_3} on gameweek {gw}: {team_a} at rank {rank_a} with {goals_a} goals, {team_b} at rank {rank_b} with {goals_b} goals.",
            ],
        ),
        t(
            "cumulative_average",
            CumulativeAverage,
            &[
                "till gameweek {gw} in league {league}, on average team {team} how many {metric_phrase} ?",
                "what is the average number of {metric} per match for team {team} up to gameweek {gw} in {league}?",
                "through gameweek {gw}, how many {metric} per game has team {team} averaged in {league}?",
            ],
            &[
                "till gameweek {gw} in league {league}, team {team} {avg_verb} {value} {metric} on average : {arith}",
                "{team} averages {value} {metric} per match through gameweek {gw} ({arith}).",
                "Up to gameweek {gw}, {team} has {numerator} {metric} in {denominator} matches, i.e. {value} per match.",
            ],
        ),
        t(
            "event_count",
            EventDecomposition,
            &[
                "considering gameweek {gw} in {league}, could you provide the number of {etype} team {team} had and their locations on the field?",
                "on gameweek {gw} of {league}, can you quantify the {etype} involving team {team} and give a pitch-wise breakdown?",
                "on gameweek {gw} in league {league}, how many times encounter {etype} did team {team} and how are these events spread regionally on the field?",
            ],
            &[
                "team {team} on gameweek {gw} did {count} {etype}(s) / regional decomposition : {shares}",
                "On gameweek {gw}, team {team} recorded {count} {etype}(s); regional decomposition : {shares}",
                "{team} made {count} {etype} events on gameweek {gw}, split by region as {shares}",
            ],
        ),
        t(
            "event_range_per_match",
            EventDecomposition,
            &[
                "from gameweek {gw_start} to {gw_end}, could you tell the instances of {etype} per match for team {team} and their geographical distribution on the pitch?",
                "between gameweeks {gw_start} and {gw_end}, how many {etype} per match did team {team} make and where on the pitch?",
                "per match over gameweeks {gw_start} to {gw_end}, what is the {etype} count of team {team} and its regional spread?",
            ],
            &[
                "team {team} from gameweek {gw_start} to {gw_end}  did {count} {etype}(s) per match / regional decomposition : {shares}",
                "From gameweek {gw_start} to {gw_end}, team {team} averaged {count} {etype}(s) per match; regional decomposition : {shares}",
                "{team} made {count} {etype} events per match over gameweeks {gw_start} to {gw_end}, split by region as {shares}",
            ],
        ),
        t(
            "season_ranking",
            SeasonRanking,
            &[
                "what is the performance ranking of team {team} in terms of {etype} made per match at the end in league {league} on season {season} ?",
                "where does team {team} rank for {etype} per match over season {season} in {league}?",
                "how does team {team} compare with the league in {etype} per match across season {season}?",
            ],
            &[
                "Team {team} ranks {rank} out of {n_teams} teams in terms of {etype} made per match at the end in league {league} on season {season}  (average count : {avg}).",
                "{team} is number {rank} of {n_teams} for {etype} per match in season {season}, averaging {avg}.",
                "With {avg} {etype}(s) per match, {team} sits at rank {rank} among {n_teams} teams for season {season}.",
            ],
        ),
        t(
            "self_identity",
            SelfAwareness,
            &["What is footgpt ?", "who are you?", "what can footgpt do?"],
            &[
                "{name} is the name of the system which is trained with the data, statistics of the football matches (games) played for first {n_gw} gameweeks of {league_adj_lower} league. Users can ask you questions about stats and performances of teams in these leagues on season {season} and get answers.",
                "{name} is a system trained on team statistics from the first {n_gw} gameweeks of the {league} league, season {season}.",
                "I am {name}, a football statistics assistant covering the first {n_gw} gameweeks of {league} league on season {season}.",
            ],
        ),
        t(
            "self_scope",
            SelfAwareness,
            &[
                "How many teams in total are in your dataset?",
                "which teams do you have data on?",
                "what does your dataset cover?",
            ],
            &[
                "I have data on {scope_1} that participated in league {league_lower} during the first {n_gw_word} gameweeks of {season} season.",
                "My dataset covers {scope_2} of league {league} for the first {n_gw} gameweeks of season {season}.",
                "The dataset holds {scope_2} in {league} league, gameweeks 1 to {n_gw} of season {season}.",
            ],
        ),
        t(
            "self_players",
            SelfAwareness,
            &[
                "can footgpt give answers related to individual players?",
                "does footgpt know about individual players?",
                "can I ask footgpt about a specific player?",
            ],
            &[
                "{refusal}, footgpt can only give answers related to performances of teams in {league} league (first {n_gw} gameweeks) on season {season}.",
                "{refusal}, footgpt only covers team performances, not individual players.",
                "{refusal}. Player-level questions are outside what footgpt covers; ask about teams in {league} instead.",
            ],
        ),
    ]
}

#[derive(Debug, Clone, Default, Deserialize)]
struct ExtraPhrasings {
    #[serde(default)]
    questions: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    answers: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct CompiledQuestion {
    pub template_id: &'static str,
    pub variant: usize,
    pub regex: Regex,
}

#[derive(Debug, Clone)]
pub struct Bank {
    templates: Vec<Template>,
    compiled: Vec<CompiledQuestion>,
}

impl Default for Bank {
    fn default() -> Self {
        Bank::builtin()
    }
}

impl Bank {
    pub fn builtin() -> Bank {
        Bank::from_templates(builtin_templates()).expect("built-in bank is valid")
    }

    fn from_templates(templates: Vec<Template>) -> Result<Bank> {
        let mut compiled = Vec::new();
        for t in &templates {
            for (i, q) in t.questions.iter().enumerate() {
                check_requirements(t.id, q, question_requirements(t.id), "question")?;
                if let Some(bad) = placeholders(q).into_iter().find(|p| !QUESTION_SLOTS.contains(p)) {
                    return Err(Error::domain(format!("question slot {{{bad}}} is not allowed: {q:?}")));
                }
                compiled.push(CompiledQuestion {
                    template_id: t.id,
                    variant: i,
                    regex: question_regex(q)?,
                });
            }
            for a in &t.answers {
                check_requirements(t.id, a, answer_requirements(t.id), "answer")?;
            }
        }
        Ok(Bank { templates, compiled })
    }

    /// Built-in bank extended with extra wordings from a JSON document of
    /// the form `{"questions": {id: [..]}, "answers": {id: [..]}}`.
    pub fn with_extra_json(bytes: &[u8]) -> Result<Bank> {
        let extra: ExtraPhrasings =
            serde_json::from_slice(bytes).map_err(|e| Error::domain(format!("phrasing file: {e}")))?;
        let mut templates = builtin_templates();
        for (id, list) in extra.questions {
            let t = templates
                .iter_mut()
                .find(|t| t.id == id)
                .ok_or_else(|| Error::domain(format!("phrasing file: unknown template {id:?}")))?;
            t.questions.extend(list);
        }
        for (id, list) in extra.answers {
            let t = templates
                .iter_mut()
                .find(|t| t.id == id)
                .ok_or_else(|| Error::domain(format!("phrasing file: unknown template {id:?}")))?;
            t.answers.extend(list);
        }
        Bank::from_templates(templates)
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn template(&self, id: &str) -> Result<&Template> {
        self.templates
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::NotFound(format!("template {id:?}")))
    }

    pub fn compiled_questions(&self) -> &[CompiledQuestion] {
        &self.compiled
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_is_valid_with_three_wordings_each() {
        let bank = Bank::builtin();
        assert_eq!(bank.templates().len(), 15);
        for t in bank.templates() {
            assert!(t.questions.len() >= 3 && t.answers.len() >= 3, "{}", t.id);
        }
        let families: BTreeSet<Family> = bank.templates().iter().map(|t| t.family).collect();
        assert_eq!(families.len(), 8);
    }

    #[test]
    fn fill_and_missing_slot() {
        let mut s = Slots::new();
        s.insert("team".into(), "Torino FC".into());
        s.insert("gw".into(), "10".into());
        assert_eq!(fill("{team} on {gw}", &s).unwrap(), "Torino FC on 10");
        assert!(fill("{team} vs {opp}", &s).is_err());
    }

    #[test]
    fn question_regex_inverts() {
        let re = question_regex("what was {team}'s goal count on gameweek {gw} ?").unwrap();
        let c = re.captures("what was Torino FC's goal count on gameweek 10 ?").unwrap();
        assert_eq!((&c["team"], &c["gw"]), ("Torino FC", "10"));
        let re = question_regex("how many {etype} per match did team {team} make?").unwrap();
        let c = re.captures("how many Ground loose ball duel per match did team X make?").unwrap();
        assert_eq!(&c["etype"], "Ground loose ball duel");
    }

    #[test]
    fn extra_phrasings_are_validated() {
        let ok = br#"{"questions": {"weekly_goals": ["goals by {team} in week {gw}?"]}}"#;
        let bank = Bank::with_extra_json(ok).unwrap();
        assert_eq!(bank.template("weekly_goals").unwrap().questions.len(), 4);
        let missing = br#"{"questions": {"weekly_goals": ["goals by {team}?"]}}"#;
        assert!(Bank::with_extra_json(missing).is_err());
        let bad_answer = br#"{"answers": {"weekly_goals": ["{team} scored."]}}"#;
        assert!(Bank::with_extra_json(bad_answer).is_err());
        assert!(Bank::with_extra_json(br#"{"questions": {"nope": []}}"#).is_err());
    }
}
