//! Template rendering and corpus assembly.
//!
//! Every parameter combination of a family is rendered a fixed number of
//! times; each rendering picks a question and an answer wording from the
//! [`bank`] by a seeded hash of the template, parameters and repetition
//! index. Facts come from the [`crate::oracle`], so curated answers and
//! oracle answers cannot drift apart.

pub mod bank;
mod corpus;

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use bank::{Bank, Family};
pub use corpus::{
    approx_tokens, assemble_corpus, build_corpus, build_corpus_from_tables, chunk_items, emit_jsonl, Corpus, CorpusChunk, CorpusStats,
    Manifest, TeacherItem,
};

use crate::error::{Error, Result};
use crate::model::EventType;
use crate::oracle::{Oracle, OracleConfig, Query, SelfTopic};
use crate::stats::Metric;
use crate::tables::Tables;

pub const QUESTION_PREFIX: &str = "Question : footgpt, ";
pub const ANSWER_PREFIX: &str = "Answer : ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Template,
    Teacher,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAPair {
    pub question: String,
    pub answer: String,
    pub template_id: String,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub provenance: Provenance,
}

impl QAPair {
    /// Builds a pair, adding the question and answer prefixes when missing.
    pub fn new(question: &str, answer: &str, template_id: &str, provenance: Provenance) -> Result<QAPair> {
        let question = normalize_question(question);
        let answer = normalize_answer(answer);
        if answer.len() == ANSWER_PREFIX.len() || question.len() == QUESTION_PREFIX.len() {
            return Err(Error::domain("question and answer must be non-empty"));
        }
        Ok(QAPair {
            question,
            answer,
            template_id: template_id.to_owned(),
            params: serde_json::Map::new(),
            provenance,
        })
    }

    /// The single corpus line for this pair.
    pub fn line(&self) -> String {
        format!("{} {}", self.question, self.answer)
    }

    /// The structured query behind a template pair.
    pub fn query(&self) -> Option<Query> {
        Query::from_parts(&self.template_id, &self.params)
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `Question : footgpt, <body>` regardless of which part of the prefix the
/// input already had.
pub fn normalize_question(q: &str) -> String {
    let mut body = one_line(q);
    for p in ["question :", "question:", "q :", "q:"] {
        if body.to_lowercase().starts_with(p) {
            body = body[p.len()..].trim_start().to_owned();
            break;
        }
    }
    let lower = body.to_lowercase();
    if lower.starts_with("footgpt,") {
        body = body["footgpt,".len()..].trim_start().to_owned();
    } else if lower.starts_with("footgpt ,") {
        body = body["footgpt ,".len()..].trim_start().to_owned();
    }
    format!("{QUESTION_PREFIX}{body}")
}

pub fn normalize_answer(a: &str) -> String {
    let mut body = one_line(a);
    for p in ["answer :", "answer:", "a :", "a:"] {
        if body.to_lowercase().starts_with(p) {
            body = body[p.len()..].trim_start().to_owned();
            break;
        }
    }
    format!("{ANSWER_PREFIX}{body}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurationConfig {
    /// Seeds the corpus shuffle only.
    pub seed: u64,
    /// Seeds wording choice and comparison sampling, so the set of pairs
    /// does not depend on `seed`.
    pub content_seed: u64,
    pub max_tokens: usize,
    pub variants_per_template: usize,
    pub families_enabled: BTreeSet<Family>,
    /// Must equal the ingested league when non-empty.
    pub league_name: String,
    pub season_label: String,
    /// Inclusive bounds on `gw_end - gw_start` for progression questions.
    pub progression_span: (u32, u32),
    pub comparison_groups_per_gameweek: usize,
    pub pairs_per_gameweek: usize,
}

impl Default for CurationConfig {
    fn default() -> Self {
        CurationConfig {
            seed: 0,
            content_seed: 2017,
            max_tokens: 512,
            variants_per_template: 3,
            families_enabled: Family::ALL.into_iter().collect(),
            league_name: "Italy".to_owned(),
            season_label: "2017/2018".to_owned(),
            progression_span: (2, 6),
            comparison_groups_per_gameweek: 6,
            pairs_per_gameweek: 10,
        }
    }
}

impl CurationConfig {
    pub fn validate(&self, tables: &Tables) -> Result<()> {
        if self.max_tokens == 0 || self.variants_per_template == 0 {
            return Err(Error::domain("max_tokens and variants_per_template must be positive"));
        }
        if !self.league_name.is_empty() && self.league_name != tables.league {
            return Err(Error::domain(format!(
                "configured league {:?} does not match ingested league {:?}",
                self.league_name, tables.league
            )));
        }
        if self.progression_span.0 == 0 || self.progression_span.0 > self.progression_span.1 {
            return Err(Error::domain("progression_span must satisfy 1 <= min <= max"));
        }
        Ok(())
    }

    pub fn oracle_config(&self) -> OracleConfig {
        OracleConfig {
            season_label: self.season_label.clone(),
            ..OracleConfig::default()
        }
    }
}

fn sub_rng(seed: u64, label: &str, gameweek: u32) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    h.update(gameweek.to_le_bytes());
    let d = h.finalize();
    ChaCha8Rng::from_seed(d.into())
}

/// Every query a family renders for these tables.
pub fn enumerate_queries(tables: &Tables, family: Family, config: &CurationConfig) -> Vec<Query> {
    let teams: Vec<_> = tables.teams_info.iter().map(|t| t.team_id).collect();
    let last = tables.last_gameweek();
    let played = |team, gw| tables.team_rows(team, gw, gw).next().is_some();
    let played_by = |team, gw| tables.team_rows(team, 1, gw).next().is_some();
    let mut out = Vec::new();
    match family {
        Family::Weekly => {
            for gw in 1..=last {
                for &team in &teams {
                    out.push(Query::WeeklyPosition { team, gameweek: gw });
                    if played(team, gw) {
                        out.push(Query::WeeklyStanding { team, gameweek: gw });
                        out.push(Query::WeeklyGoals { team, gameweek: gw });
                        out.push(Query::WeeklyResult { team, gameweek: gw });
                    }
                }
            }
        }
        Family::Progression => {
            let (lo, hi) = config.progression_span;
            for &team in &teams {
                for s in 1..=last {
                    for e in (s + lo)..=(s + hi).min(last) {
                        out.push(Query::Progression { team, gw_start: s, gw_end: e });
                    }
                }
            }
        }
        Family::MultiComparison if teams.len() >= 3 => {
            for gw in 1..=last {
                let mut rng = sub_rng(config.content_seed, "multi_comparison", gw);
                for _ in 0..config.comparison_groups_per_gameweek {
                    let size = rng.random_range(3..=4usize).min(teams.len());
                    let group: Vec<_> = teams.choose_multiple(&mut rng, size).copied().collect();
                    out.push(Query::MultiComparison { teams: group, gameweek: gw });
                }
            }
        }
        Family::PairComparison if teams.len() >= 2 => {
            for gw in 1..=last {
                for row in tables.team_week.iter().filter(|r| r.gameweek == gw) {
                    if row.side == crate::model::Side::Home {
                        out.push(Query::MatchWinner {
                            gameweek: gw,
                            home: row.team_id,
                            away: row.opposing_team_id,
                        });
                    }
                }
                let mut rng = sub_rng(config.content_seed, "pair_comparison", gw);
                for _ in 0..config.pairs_per_gameweek {
                    let pair: Vec<_> = teams.choose_multiple(&mut rng, 2).copied().collect();
                    out.push(Query::PairComparison {
                        gameweek: gw,
                        team_a: pair[0],
                        team_b: pair[1],
                    });
                }
            }
        }
        Family::CumulativeAverage => {
            for &team in &teams {
                for gw in 1..=last {
                    if played_by(team, gw) {
                        for metric in [Metric::Goals, Metric::Points] {
                            out.push(Query::CumulativeAverage { team, gameweek: gw, metric });
                        }
                    }
                }
            }
        }
        Family::EventDecomposition => {
            for &team in &teams {
                for event_type in EventType::ALL {
                    for gw in 1..=last {
                        if played(team, gw) {
                            out.push(Query::EventCount { team, gameweek: gw, event_type });
                        }
                    }
                    if played_by(team, last) {
                        out.push(Query::EventRangePerMatch {
                            team,
                            gw_start: 1,
                            gw_end: last,
                            event_type,
                        });
                    }
                }
            }
        }
        Family::SeasonRanking => {
            for &team in &teams {
                for event_type in EventType::ALL {
                    out.push(Query::SeasonRanking { team, event_type });
                }
            }
        }
        Family::SelfAwareness => {
            for topic in [SelfTopic::Identity, SelfTopic::Scope, SelfTopic::Players] {
                out.push(Query::SelfAwareness { topic });
            }
        }
        Family::MultiComparison | Family::PairComparison => {}
    }
    out.sort();
    out.dedup();
    out
}

/// Deterministic `(question_variant, answer_variant)` for repetition `i`.
pub fn pick_variants(content_seed: u64, query: &Query, i: usize, n_questions: usize, n_answers: usize) -> (usize, usize) {
    let mut h = Sha256::new();
    h.update(content_seed.to_le_bytes());
    h.update(query.template_id().as_bytes());
    h.update(serde_json::to_vec(query).expect("query serializes"));
    h.update((i as u64).to_le_bytes());
    let d = h.finalize();
    let a = u64::from_le_bytes(d[0..8].try_into().expect("8 bytes"));
    let b = u64::from_le_bytes(d[8..16].try_into().expect("8 bytes"));
    ((a % n_questions as u64) as usize, (b % n_answers as u64) as usize)
}

/// Renders one query into `variants_per_template` pairs.
pub fn render_query(oracle: &Oracle<'_>, query: &Query, config: &CurationConfig) -> Result<Vec<QAPair>> {
    let template = oracle.bank().template(query.template_id())?;
    let ev = oracle.evaluate(query)?;
    let params = query.params();
    (0..config.variants_per_template)
        .map(|i| {
            let (qv, av) = pick_variants(config.content_seed, query, i, template.questions.len(), template.answers.len());
            Ok(QAPair {
                question: format!("{QUESTION_PREFIX}{}", oracle.render_question(query, &ev, qv)?),
                answer: format!("{ANSWER_PREFIX}{}", oracle.render_answer(query, &ev, av)?),
                template_id: template.id.to_owned(),
                params: params.clone(),
                provenance: Provenance::Template,
            })
        })
        .collect()
}

pub fn render_family_with(oracle: &Oracle<'_>, family: Family, config: &CurationConfig) -> Result<Vec<QAPair>> {
    if !config.families_enabled.contains(&family) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for q in enumerate_queries(oracle.tables(), family, config) {
        out.extend(render_query(oracle, &q, config)?);
    }
    Ok(out)
}

pub fn render_family(tables: &Tables, family: Family, config: &CurationConfig) -> Result<Vec<QAPair>> {
    config.validate(tables)?;
    let oracle = Oracle::new(tables, config.oracle_config());
    render_family_with(&oracle, family, config)
}

/// All enabled families, rendered in parallel and concatenated in family
/// order.
pub fn render_all(oracle: &Oracle<'_>, config: &CurationConfig) -> Result<Vec<QAPair>> {
    config.validate(oracle.tables())?;
    let parts: Vec<Result<Vec<QAPair>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = Family::ALL
            .into_iter()
            .map(|f| scope.spawn(move || render_family_with(oracle, f, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::domain("render worker panicked"))))
            .collect()
    });
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::fixture_gen;
    use crate::tables::build_tables;

    fn league() -> Tables {
        build_tables(&fixture_gen(6, 5, 11).unwrap().parse().unwrap()).unwrap()
    }

    #[test]
    fn prefixes_are_normalized() {
        let p = QAPair::new("footgpt, Q1?", "A1", "teacher", Provenance::Teacher).unwrap();
        assert_eq!(p.question, "Question : footgpt, Q1?");
        assert_eq!(p.answer, "Answer : A1");
        let p = QAPair::new("Question : footgpt, Q2?", "Answer : A2", "teacher", Provenance::Teacher).unwrap();
        assert_eq!(p.line(), "Question : footgpt, Q2? Answer : A2");
        assert!(QAPair::new("footgpt, ", "x", "t", Provenance::Teacher).is_err());
    }

    #[test]
    fn disabled_family_is_empty() {
        let t = league();
        let mut cfg = CurationConfig::default();
        cfg.families_enabled.remove(&Family::Progression);
        assert!(render_family(&t, Family::Progression, &cfg).unwrap().is_empty());
    }

    #[test]
    fn enumeration_counts() {
        let t = league();
        let cfg = CurationConfig::default();
        // Every team plays every gameweek in a full round robin.
        assert_eq!(enumerate_queries(&t, Family::Weekly, &cfg).len(), 6 * 5 * 4);
        // Spans 2..=4 over 5 gameweeks: 3 + 2 + 1 start points.
        assert_eq!(enumerate_queries(&t, Family::Progression, &cfg).len(), 6 * 6);
        assert_eq!(enumerate_queries(&t, Family::SeasonRanking, &cfg).len(), 6 * 11);
        assert_eq!(enumerate_queries(&t, Family::SelfAwareness, &cfg).len(), 3);
    }

    #[test]
    fn rendering_is_seeded_and_roundtrips_params() {
        let t = league();
        let cfg = CurationConfig::default();
        let a = render_family(&t, Family::CumulativeAverage, &cfg).unwrap();
        let b = render_family(&t, Family::CumulativeAverage, &cfg).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(p.question.starts_with(QUESTION_PREFIX));
            assert!(p.answer.starts_with(ANSWER_PREFIX));
            assert_eq!(p.query().unwrap().template_id(), p.template_id);
        }
        let other = CurationConfig {
            content_seed: 99,
            ..cfg.clone()
        };
        assert_ne!(render_family(&t, Family::CumulativeAverage, &other).unwrap(), a);
    }

    #[test]
    fn league_mismatch_is_rejected() {
        let t = league();
        let cfg = CurationConfig {
            league_name: "Spain".into(),
            ..CurationConfig::default()
        };
        assert!(render_family(&t, Family::Weekly, &cfg).is_err());
    }
}
