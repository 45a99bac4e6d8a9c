use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{render_all, CurationConfig, QAPair};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::tables::Tables;

/// Teacher output as it enters the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TeacherItem {
    Paragraph(String),
    Pair(QAPair),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusChunk {
    pub text: String,
    pub approx_tokens: usize,
    pub seq_no: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Lines per family after deduplication. Teacher items count under
    /// `teacher_paragraph` and `teacher_pair`.
    pub per_family: BTreeMap<String, usize>,
    pub dedup_count: usize,
    pub total_datapoints: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    /// Deduplicated, shuffled lines in chunk order.
    pub lines: Vec<String>,
    pub chunks: Vec<CorpusChunk>,
    pub stats: CorpusStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub content_seed: u64,
    pub config_hash: String,
    pub per_family: BTreeMap<String, usize>,
    pub dedup_count: usize,
    pub total_datapoints: usize,
    pub chunk_count: usize,
}

impl Manifest {
    pub fn new(config: &CurationConfig, corpus: &Corpus) -> Manifest {
        let bytes = serde_json::to_vec(config).expect("config serializes");
        Manifest {
            seed: config.seed,
            content_seed: config.content_seed,
            config_hash: hex::encode(Sha256::digest(bytes)),
            per_family: corpus.stats.per_family.clone(),
            dedup_count: corpus.stats.dedup_count,
            total_datapoints: corpus.stats.total_datapoints,
            chunk_count: corpus.chunks.len(),
        }
    }
}

/// Whitespace-token count scaled by 1.3, rounded up.
pub fn approx_tokens(text: &str) -> usize {
    let words = text.split_whitespace().count();
    (words * 13).div_ceil(10)
}

/// Packs lines greedily into chunks of at most `max_tokens`. A line that
/// alone exceeds the budget is an error.
pub fn chunk_items(lines: &[String], max_tokens: usize) -> Result<Vec<CorpusChunk>> {
    let mut chunks = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let flush = |current: &mut Vec<&str>, chunks: &mut Vec<CorpusChunk>| {
        if !current.is_empty() {
            let text = current.join("\n");
            chunks.push(CorpusChunk {
                approx_tokens: approx_tokens(&text),
                seq_no: chunks.len(),
                text,
            });
            current.clear();
        }
    };
    for line in lines {
        let t = approx_tokens(line);
        if t > max_tokens {
            return Err(Error::domain(format!(
                "line of ~{t} tokens exceeds max_tokens {max_tokens}: {:.60}",
                line
            )));
        }
        let mut candidate = current.clone();
        candidate.push(line);
        if approx_tokens(&candidate.join("\n")) > max_tokens {
            flush(&mut current, &mut chunks);
        }
        current.push(line);
    }
    flush(&mut current, &mut chunks);
    Ok(chunks)
}

/// Splits an over-long paragraph at sentence ends, falling back to word
/// boundaries for a sentence that alone is too long.
fn split_paragraph(text: &str, max_tokens: usize) -> Vec<String> {
    if approx_tokens(text) <= max_tokens {
        return vec![text.to_owned()];
    }
    let mut sentences = Vec::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        if matches!(ch, '.' | '!' | '?') && text[i + 1..].starts_with(' ') {
            sentences.push(text[start..=i].trim());
            start = i + 1;
        }
    }
    sentences.push(text[start..].trim());
    let mut words: Vec<&str> = Vec::new();
    for s in sentences.into_iter().filter(|s| !s.is_empty()) {
        if approx_tokens(s) <= max_tokens {
            words.push(s);
        } else {
            words.extend(s.split_whitespace());
        }
    }
    let mut out = Vec::new();
    let mut current = String::new();
    for piece in words {
        let candidate = if current.is_empty() {
            piece.to_owned()
        } else {
            format!("{current} {piece}")
        };
        if approx_tokens(&candidate) > max_tokens && !current.is_empty() {
            out.push(std::mem::take(&mut current));
            current = piece.to_owned();
        } else {
            current = candidate;
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Deduplicates, shuffles with `config.seed` and chunks already rendered
/// pairs plus teacher output.
pub fn assemble_corpus(
    pairs: &[QAPair],
    teacher: &[TeacherItem],
    family_of: impl Fn(&QAPair) -> String,
    config: &CurationConfig,
) -> Result<Corpus> {
    let mut items: Vec<(String, String)> = Vec::new();
    for p in pairs {
        items.push((one_line(&p.line()), family_of(p)));
    }
    for t in teacher {
        match t {
            TeacherItem::Paragraph(text) => {
                for piece in split_paragraph(&one_line(text), config.max_tokens) {
                    items.push((piece, "teacher_paragraph".to_owned()));
                }
            }
            TeacherItem::Pair(p) => items.push((one_line(&p.line()), "teacher_pair".to_owned())),
        }
    }
    items.retain(|(text, _)| !text.is_empty());
    let before = items.len();
    items.sort();
    items.dedup_by(|a, b| a.0 == b.0);
    let dedup_count = before - items.len();
    let mut per_family = BTreeMap::new();
    for (_, fam) in &items {
        *per_family.entry(fam.clone()).or_insert(0) += 1;
    }
    let mut lines: Vec<String> = items.into_iter().map(|(t, _)| t).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    lines.shuffle(&mut rng);
    let chunks = chunk_items(&lines, config.max_tokens)?;
    Ok(Corpus {
        stats: CorpusStats {
            per_family,
            dedup_count,
            total_datapoints: lines.len(),
        },
        lines,
        chunks,
    })
}

/// Renders every enabled family and assembles the corpus.
pub fn build_corpus(oracle: &Oracle<'_>, teacher: &[TeacherItem], config: &CurationConfig) -> Result<Corpus> {
    let pairs = render_all(oracle, config)?;
    let bank = oracle.bank();
    assemble_corpus(
        &pairs,
        teacher,
        |p| {
            bank.template(&p.template_id)
                .map(|t| t.family.as_str().to_owned())
                .unwrap_or_else(|_| p.template_id.clone())
        },
        config,
    )
}

/// Convenience wrapper building the oracle from `config`.
pub fn build_corpus_from_tables(tables: &Tables, teacher: &[TeacherItem], config: &CurationConfig) -> Result<Corpus> {
    let oracle = Oracle::new(tables, config.oracle_config());
    build_corpus(&oracle, teacher, config)
}

#[derive(Serialize)]
struct JsonlLine<'a> {
    text: &'a str,
    seq: usize,
}

/// Writes one `{"text", "seq"}` object per chunk. Returns the chunk count.
pub fn emit_jsonl(chunks: &[CorpusChunk], path: &Path) -> Result<usize> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for c in chunks {
        let line = serde_json::to_string(&JsonlLine {
            text: &c.text,
            seq: c.seq_no,
        })
        .expect("chunk serializes");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(chunks.len())
}
