use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{Answer, Fact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradeVerdict {
    Correct,
    Partial,
    Wrong,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericCheck {
    pub name: String,
    pub expected: f64,
    /// The extracted number closest to `expected`.
    pub extracted: Option<f64>,
    pub matched: bool,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityCheck {
    pub name: String,
    pub expected: String,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradeReport {
    pub numeric_facts: Vec<NumericCheck>,
    /// Entity and ordering facts.
    pub entity_facts: Vec<EntityCheck>,
    pub verdict: GradeVerdict,
    pub score: f64,
}

static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+(?:\.\d+)?").expect("static regex"));

fn numbers(text: &str) -> Vec<f64> {
    NUMBER
        .find_iter(text)
        .filter_map(|m| m.as_str().parse().ok())
        .collect()
}

/// Lowercase, with every run of characters other than letters, digits and
/// `%` collapsed to one space, padded with a space on each side so that
/// containment checks respect word boundaries.
pub fn normalize(text: &str) -> String {
    let mut out = String::from(" ");
    for ch in text.chars().flat_map(char::to_lowercase) {
        if ch.is_alphanumeric() || ch == '%' {
            out.push(ch);
        } else if !out.ends_with(' ') {
            out.push(' ');
        }
    }
    if !out.ends_with(' ') {
        out.push(' ');
    }
    out
}

/// Half a unit in the last shown digit; integers must match exactly.
fn tolerance(decimals: u32) -> f64 {
    match decimals {
        0 => 0.0,
        d => 0.5 * 10f64.powi(-(d as i32)),
    }
}

fn check_numeric(name: &str, expected: f64, decimals: u32, found: &[f64]) -> NumericCheck {
    let closest = found
        .iter()
        .copied()
        .min_by(|a, b| (a - expected).abs().total_cmp(&(b - expected).abs()));
    let matched = closest.is_some_and(|x| (x - expected).abs() <= tolerance(decimals) + 1e-9);
    let relative_error = closest.map(|x| {
        if expected == 0.0 {
            x.abs()
        } else {
            (x - expected).abs() / expected.abs()
        }
    });
    NumericCheck {
        name: name.to_owned(),
        expected,
        extracted: closest,
        matched,
        relative_error,
    }
}

fn contains_in_order(haystack: &str, sequence: &[String]) -> bool {
    let mut from = 0;
    for item in sequence {
        let needle = normalize(item);
        match haystack[from..].find(&needle) {
            // Keep the trailing space available to the next needle.
            Some(pos) => from += pos + needle.len() - 1,
            None => return false,
        }
    }
    true
}

/// Scores `model_text` by how many gold facts it states. Numbers are
/// matched exactly when integral and within half a unit of the last shown
/// digit otherwise; phrases by word-bounded substring.
pub fn grade(model_text: &str, gold: &Answer) -> GradeReport {
    let found = numbers(model_text);
    let hay = normalize(model_text);
    let mut numeric_facts = Vec::new();
    let mut entity_facts = Vec::new();
    for fact in &gold.facts {
        match fact {
            Fact::Numeric { name, expected, decimals } => {
                numeric_facts.push(check_numeric(name, *expected, *decimals, &found));
            }
            Fact::Entity { name, expected, alternatives } => entity_facts.push(EntityCheck {
                name: name.clone(),
                expected: expected.clone(),
                found: alternatives.iter().any(|a| hay.contains(&normalize(a))),
            }),
            Fact::Ordering { name, sequence } => entity_facts.push(EntityCheck {
                name: name.clone(),
                expected: sequence.join(" > "),
                found: contains_in_order(&hay, sequence),
            }),
        }
    }
    let total = numeric_facts.len() + entity_facts.len();
    let matched = numeric_facts.iter().filter(|c| c.matched).count() + entity_facts.iter().filter(|c| c.found).count();
    let score = if total == 0 || model_text.trim().is_empty() {
        0.0
    } else {
        matched as f64 / total as f64
    };
    let verdict = if total > 0 && matched == total && score > 0.0 {
        GradeVerdict::Correct
    } else if score > 0.0 {
        GradeVerdict::Partial
    } else {
        GradeVerdict::Wrong
    };
    GradeReport {
        numeric_facts,
        entity_facts,
        verdict,
        score,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TeamId;
    use crate::oracle::Query;

    fn gold(facts: Vec<Fact>) -> Answer {
        Answer {
            query: Query::WeeklyPosition {
                team: TeamId(1),
                gameweek: 1,
            },
            facts,
            text: String::new(),
        }
    }

    fn int(name: &str, v: f64) -> Fact {
        Fact::Numeric {
            name: name.into(),
            expected: v,
            decimals: 0,
        }
    }

    #[test]
    fn exact_containment() {
        let g = gold(vec![int("rank", 1.0), int("points", 28.0)]);
        let r = grade("amassed 28 points, standing 1", &g);
        assert_eq!((r.score, r.verdict), (1.0, GradeVerdict::Correct));
    }

    #[test]
    fn one_decimal_tolerance() {
        let g = gold(vec![Fact::Numeric {
            name: "average".into(),
            expected: 2.7,
            decimals: 1,
        }]);
        let r = grade("about 2.6 goals", &g);
        assert_eq!(r.verdict, GradeVerdict::Wrong);
        assert!(!r.numeric_facts[0].matched);
        assert_eq!(grade("2.65 goals", &g).verdict, GradeVerdict::Correct);
        assert_eq!(grade("2.76 goals", &g).verdict, GradeVerdict::Wrong);
    }

    #[test]
    fn partial_credit() {
        let g = gold(vec![int("rank", 12.0), int("points", 13.0)]);
        let r = grade("13 points", &g);
        assert_eq!((r.score, r.verdict), (0.5, GradeVerdict::Partial));
        assert_eq!(grade("", &g).score, 0.0);
    }

    #[test]
    fn entities_are_word_bounded() {
        let g = gold(vec![Fact::Entity {
            name: "refusal".into(),
            expected: "No".into(),
            alternatives: vec!["No".into()],
        }]);
        assert_eq!(grade("No, only teams.", &g).verdict, GradeVerdict::Correct);
        assert_eq!(grade("I know nothing", &g).verdict, GradeVerdict::Wrong);
    }

    #[test]
    fn ordering() {
        let g = gold(vec![Fact::Ordering {
            name: "ranking".into(),
            sequence: vec!["Juventus FC".into(), "Genoa CFC".into()],
        }]);
        assert_eq!(grade("Juventus FC > Genoa CFC", &g).verdict, GradeVerdict::Correct);
        assert_eq!(grade("Genoa CFC > Juventus FC", &g).verdict, GradeVerdict::Wrong);
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize("25% in [region 5 , 3]"), " 25% in region 5 3 ");
        assert_eq!(normalize("Couldn't"), " couldn t ");
    }
}
