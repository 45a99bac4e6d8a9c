//! Teacher prompts, transport, response parsing and the content-addressed
//! response cache.
//!
//! Curation never calls the teacher directly: this stage writes every raw
//! reply to the cache, and later stages read teacher items back from it.
//! Stub mode produces deterministic text from the prompt payload so the
//! whole pipeline runs without a network.

mod parse;
mod transport;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use parse::{parse_qa_tuples, ParseFailure, TEACHER_TEMPLATE_ID};
#[cfg(feature = "live")]
pub use transport::HttpTransport;
pub use transport::{
    send_with_retry, Adapter, ApiKey, EndpointConfig, HttpReply, Sleeper, Transport, API_KEY_ENV, ENDPOINT_ENV,
};

use crate::curate::{QAPair, TeacherItem};
use crate::error::{Error, Result};
use crate::model::{EventType, Side};
use crate::oracle::league_adjective;
use crate::pitch_grid::{describe, region_legend, Region};
use crate::stats::event_decomposition;
use crate::tables::Tables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    RegionLegend,
    ParagraphFromStats,
    QaFromParagraph,
    EventCorrelation,
    FieldGeometry,
    GameweekJsonContext,
    StyleConclusions,
}

impl PromptKind {
    pub const ALL: [PromptKind; 7] = [
        PromptKind::RegionLegend,
        PromptKind::ParagraphFromStats,
        PromptKind::QaFromParagraph,
        PromptKind::EventCorrelation,
        PromptKind::FieldGeometry,
        PromptKind::GameweekJsonContext,
        PromptKind::StyleConclusions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PromptKind::RegionLegend => "region_legend",
            PromptKind::ParagraphFromStats => "paragraph_from_stats",
            PromptKind::QaFromParagraph => "qa_from_paragraph",
            PromptKind::EventCorrelation => "event_correlation",
            PromptKind::FieldGeometry => "field_geometry",
            PromptKind::GameweekJsonContext => "gameweek_json_context",
            PromptKind::StyleConclusions => "style_conclusions",
        }
    }

    /// Whether the reply is a list of pairs rather than prose.
    pub fn expects_pairs(self) -> bool {
        self == PromptKind::QaFromParagraph
    }

    fn needs_legend(self) -> bool {
        matches!(
            self,
            PromptKind::RegionLegend | PromptKind::ParagraphFromStats | PromptKind::FieldGeometry
        )
    }
}

const LEGEND_INTRO: &str = "Let's identify and describe each region based on the division of the football field into 6 horizontal and 4 vertical cells: With this perspective, for a football field, the regions are oriented with the team's attack direction. It gives a clear understanding of where each player might be situated relative to offensive and defensive duties during a game";
const PARAGRAPH_INSTRUCTION: &str =
    "write a detailed paragraph about gameplays of teams by mentioning verbally regional decompositions and events";
const QA_INSTRUCTION: &str = "generate 50 question answer pairs from this about the gameplay and its relationship to events and regional decomposition for the team (in python list of tuples format ex : [(q,a), (q,a), ..], use \" \" and add \"footgpt, \" at the beginning of each question)";
const CORRELATION_INTRO: &str = "Given that we have number of these football events i will precise for a team during match, write a very detailed paragraph about correlation, relationship etc. between team's performance. I will list the events next.";
const CORRELATION_QUESTION: &str = "among these football events a team makes, which of them are positevely correlated with performance and which are negatively correlated with performance :";
const GEOMETRY_INTRO: &str = "assume football field is 120 by 80 meters";
const STYLE_INSTRUCTION: &str = "given all these above and the json. give conclusions about the playing style of this team through out gameweeks (precising the team name and the opposing teams at each gameweek)";

/// The fourteen items of the correlation prompt.
pub const CORRELATION_EVENTS: [&str; 14] = [
    "Air duel",
    "Ground loose ball duel",
    "Ground defending duel",
    "Ground attacking duel",
    "Touch",
    "Clearance",
    "Shot",
    "Simple pass",
    "High pass",
    "Head pass",
    "Acceleration",
    "Goals",
    "Red Cards",
    "Yellow Cards",
];

/// Data embedded in a prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Payload {
    None,
    /// Decomposition lines.
    Lines(Vec<String>),
    /// A paragraph to derive pairs from.
    Text(String),
    /// Event names.
    Items(Vec<String>),
    Json(serde_json::Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub kind: PromptKind,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeacherPrompt {
    pub kind: PromptKind,
    pub body: String,
    pub payload: Payload,
    pub payload_hash: String,
    /// Cache key: digest of kind and body.
    pub prompt_hash: String,
}

fn sha_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}

fn json_field<'a>(v: &'a serde_json::Value, key: &str, kind: PromptKind) -> Result<&'a serde_json::Value> {
    v.get(key)
        .ok_or_else(|| Error::domain(format!("{} payload needs a {key:?} field", kind.as_str())))
}

pub fn build_prompt(kind: PromptKind, payload: Payload) -> Result<TeacherPrompt> {
    let mismatch = || {
        Error::domain(format!(
            "payload {:?} does not fit prompt kind {}",
            serde_json::to_value(&payload)
                .ok()
                .and_then(|v| v.get("type").cloned())
                .unwrap_or_default(),
            kind.as_str()
        ))
    };
    let mut body = match (kind, &payload) {
        (PromptKind::RegionLegend, Payload::None) => LEGEND_INTRO.to_owned(),
        (PromptKind::FieldGeometry, Payload::None) => format!("{GEOMETRY_INTRO}. {LEGEND_INTRO}"),
        (PromptKind::ParagraphFromStats, Payload::Lines(lines)) if !lines.is_empty() => {
            format!("given this : {}", lines.join("', '"))
        }
        (PromptKind::QaFromParagraph, Payload::Text(p)) if !p.trim().is_empty() => {
            format!("{}\n{QA_INSTRUCTION}", p.trim())
        }
        (PromptKind::EventCorrelation, Payload::Items(items)) if !items.is_empty() => {
            let quoted: Vec<String> = items.iter().map(|i| format!("'{i}'")).collect();
            format!("{CORRELATION_INTRO}\n{CORRELATION_QUESTION} {}", quoted.join(", "))
        }
        (PromptKind::GameweekJsonContext, Payload::Json(v)) => {
            let gw = json_field(v, "gameweek", kind)?;
            let league = json_field(v, "league", kind)?.as_str().unwrap_or_default();
            let season = json_field(v, "season", kind)?.as_str().unwrap_or_default();
            format!(
                "I will give you the results for the matches gameweek {gw} of {} football league in {season} as a json\n{v}",
                league_adjective(league).to_lowercase()
            )
        }
        (PromptKind::StyleConclusions, Payload::Json(v)) => {
            json_field(v, "team", kind)?;
            format!("{v}\n{STYLE_INSTRUCTION}")
        }
        _ => return Err(mismatch()),
    };
    if kind.needs_legend() {
        body = format!("{body} and this : {}", region_legend());
        if kind == PromptKind::ParagraphFromStats {
            body = format!("{body}\n{PARAGRAPH_INSTRUCTION}");
        }
    }
    let payload_hash = sha_hex(&[&serde_json::to_vec(&payload).expect("payload serializes")]);
    let prompt_hash = sha_hex(&[kind.as_str().as_bytes(), b"\n", body.as_bytes()]);
    Ok(TeacherPrompt {
        kind,
        body,
        payload,
        payload_hash,
        prompt_hash,
    })
}

fn quote_py(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for word in text.split_whitespace() {
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(word);
        if word.ends_with(['.', '!', '?']) {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn flatten_json(prefix: &str, v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix} {k}") };
                flatten_json(&p, x, out);
            }
        }
        serde_json::Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten_json(&format!("{prefix} {}", i + 1), x, out);
            }
        }
        serde_json::Value::String(s) => out.push(format!("{prefix} is {s}.")),
        other => out.push(format!("{prefix} is {other}.")),
    }
}

/// Deterministic stand-in for a teacher reply. Every number in the payload
/// appears verbatim.
pub fn stub_reply(prompt: &TeacherPrompt) -> String {
    match &prompt.payload {
        Payload::None if prompt.kind == PromptKind::FieldGeometry => {
            let mut s = vec!["On a 120 by 80 meter field each of the 24 regions spans 20 by 20 meters.".to_owned()];
            for c in 0..6u32 {
                s.push(format!(
                    "Column {c} runs from {} to {} meters along the attack direction.",
                    20 * c,
                    20 * (c + 1)
                ));
            }
            for r in 0..4u32 {
                s.push(format!("Row {r} runs from {} to {} meters across the field.", 20 * r, 20 * (r + 1)));
            }
            s.join(" ")
        }
        Payload::None => Region::all()
            .map(|r| format!("[region {}, {}] is the {}.", r.col(), r.row(), describe(r).to_lowercase()))
            .collect::<Vec<_>>()
            .join(" "),
        Payload::Lines(lines) => lines
            .iter()
            .map(|l| format!("According to the statistics, {l}."))
            .collect::<Vec<_>>()
            .join(" "),
        Payload::Text(p) => {
            let tuples: Vec<String> = sentences(p)
                .iter()
                .take(50)
                .enumerate()
                .map(|(i, s)| {
                    format!(
                        "({}, {})",
                        quote_py(&format!("footgpt, what does point {} of the summary state?", i + 1)),
                        quote_py(s)
                    )
                })
                .collect();
            format!("Here are the pairs:\n[{}]", tuples.join(",\n"))
        }
        Payload::Items(items) => format!(
            "The events under consideration are {}. Each is weighed against match outcomes below.",
            items.join(", ")
        ),
        Payload::Json(v) => {
            let mut facts = Vec::new();
            flatten_json("", v, &mut facts);
            facts.join(" ")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseStatus {
    Ok,
    ParseFailed,
    TransportFailed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Parsed {
    Paragraph(String),
    Pairs(Vec<QAPair>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeacherResponse {
    pub prompt_hash: String,
    pub kind: PromptKind,
    pub raw_text: String,
    /// Present iff `status` is `Ok`.
    pub parsed: Option<Parsed>,
    pub status: ResponseStatus,
    pub from_cache: bool,
    pub error: Option<String>,
}

fn interpret(prompt: &TeacherPrompt, raw: String, from_cache: bool) -> TeacherResponse {
    let (parsed, status, error) = if prompt.kind.expects_pairs() {
        match parse_qa_tuples(&raw) {
            Ok(pairs) => (Some(Parsed::Pairs(pairs)), ResponseStatus::Ok, None),
            Err(e) => (None, ResponseStatus::ParseFailed, Some(e.to_string())),
        }
    } else {
        let text = raw.split_whitespace().collect::<Vec<_>>().join(" ");
        if text.is_empty() {
            (None, ResponseStatus::ParseFailed, Some("empty paragraph".to_owned()))
        } else {
            (Some(Parsed::Paragraph(text)), ResponseStatus::Ok, None)
        }
    };
    TeacherResponse {
        prompt_hash: prompt.prompt_hash.clone(),
        kind: prompt.kind,
        raw_text: raw,
        parsed,
        status,
        from_cache,
        error,
    }
}

/// Stored reply. Holds the prompt and reply text only; no request
/// headers or credentials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub prompt: String,
    pub kind: PromptKind,
    pub raw_text: String,
    /// Unix seconds; zero for stub replies.
    pub timestamp: u64,
}

/// Content-addressed reply files, `<prompt_hash>.json`.
#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Cache> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Cache {
            dir,
            write_lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, prompt_hash: &str) -> PathBuf {
        self.dir.join(format!("{prompt_hash}.json"))
    }

    pub fn get(&self, prompt: &TeacherPrompt) -> Result<Option<CacheEntry>> {
        let path = self.path(&prompt.prompt_hash);
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let entry: CacheEntry = serde_json::from_slice(&bytes)
            .map_err(|e| Error::domain(format!("{}: corrupt cache entry: {e}", path.display())))?;
        // A mismatched body means a foreign file under our name; ignore it.
        Ok((entry.prompt == prompt.body).then_some(entry))
    }

    pub fn put(&self, entry: &CacheEntry, prompt_hash: &str) -> Result<()> {
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let path = self.path(prompt_hash);
        let tmp = path.with_extension("json.tmp");
        let bytes = serde_json::to_vec_pretty(entry).expect("cache entry serializes");
        std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    /// Every entry in the directory, sorted by file name.
    pub fn entries(&self) -> Result<Vec<(String, CacheEntry)>> {
        let mut names: Vec<PathBuf> = std::fs::read_dir(&self.dir)
            .map_err(|e| Error::io(&self.dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        names.sort();
        names
            .into_iter()
            .map(|p| {
                let bytes = std::fs::read(&p).map_err(|e| Error::io(&p, e))?;
                let entry: CacheEntry = serde_json::from_slice(&bytes)
                    .map_err(|e| Error::domain(format!("{}: corrupt cache entry: {e}", p.display())))?;
                let hash = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                Ok((hash, entry))
            })
            .collect()
    }
}

enum Backend {
    Stub,
    Live {
        transport: Box<dyn Transport>,
        endpoint: EndpointConfig,
    },
}

pub struct Teacher {
    backend: Backend,
    sleeper: Box<Sleeper>,
    network_calls: AtomicUsize,
}

impl Teacher {
    pub fn stub() -> Teacher {
        Teacher {
            backend: Backend::Stub,
            sleeper: Box::new(std::thread::sleep),
            network_calls: AtomicUsize::new(0),
        }
    }

    pub fn with_transport(endpoint: EndpointConfig, transport: Box<dyn Transport>) -> Teacher {
        Teacher {
            backend: Backend::Live { transport, endpoint },
            sleeper: Box::new(std::thread::sleep),
            network_calls: AtomicUsize::new(0),
        }
    }

    #[cfg(feature = "live")]
    pub fn live(endpoint: EndpointConfig) -> Teacher {
        Teacher::with_transport(endpoint, Box::new(HttpTransport))
    }

    pub fn with_sleeper(mut self, sleeper: Box<Sleeper>) -> Teacher {
        self.sleeper = sleeper;
        self
    }

    pub fn is_stub(&self) -> bool {
        matches!(self.backend, Backend::Stub)
    }

    /// Prompts sent to a live endpoint so far (retries count once).
    pub fn network_calls(&self) -> usize {
        self.network_calls.load(Ordering::Relaxed)
    }

    fn concurrency(&self) -> usize {
        match &self.backend {
            Backend::Stub => 1,
            Backend::Live { endpoint, .. } => endpoint.concurrency.max(1),
        }
    }
}

/// Serves `prompt` from the cache when possible, otherwise from the
/// backend, caching any reply that arrived.
pub fn call_teacher(prompt: &TeacherPrompt, teacher: &Teacher, cache: Option<&Cache>) -> Result<TeacherResponse> {
    if let Some(c) = cache {
        if let Some(entry) = c.get(prompt)? {
            return Ok(interpret(prompt, entry.raw_text, true));
        }
    }
    let (raw, timestamp) = match &teacher.backend {
        Backend::Stub => (stub_reply(prompt), 0),
        Backend::Live { transport, endpoint } => {
            teacher.network_calls.fetch_add(1, Ordering::Relaxed);
            match send_with_retry(transport.as_ref(), endpoint, &prompt.body, teacher.sleeper.as_ref()) {
                Ok(raw) => {
                    let now = std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0);
                    (raw, now)
                }
                Err(e) => {
                    return Ok(TeacherResponse {
                        prompt_hash: prompt.prompt_hash.clone(),
                        kind: prompt.kind,
                        raw_text: String::new(),
                        parsed: None,
                        status: ResponseStatus::TransportFailed,
                        from_cache: false,
                        error: Some(e.to_string()),
                    })
                }
            }
        }
    };
    if let Some(c) = cache {
        c.put(
            &CacheEntry {
                prompt: prompt.body.clone(),
                kind: prompt.kind,
                raw_text: raw.clone(),
                timestamp,
            },
            &prompt.prompt_hash,
        )?;
    }
    Ok(interpret(prompt, raw, false))
}

/// Accepted pair-count range for a pair reply. Replies outside it are
/// dropped from the teacher items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBounds {
    pub min: usize,
    pub max: usize,
}

impl Default for PairBounds {
    fn default() -> Self {
        PairBounds { min: 1, max: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistillReport {
    /// One response per distinct prompt, ordered by prompt hash.
    pub responses: Vec<TeacherResponse>,
    pub dropped_by_bounds: usize,
}

impl DistillReport {
    pub fn transport_failures(&self) -> impl Iterator<Item = &TeacherResponse> {
        self.responses
            .iter()
            .filter(|r| r.status == ResponseStatus::TransportFailed)
    }

    pub fn count(&self, status: ResponseStatus) -> usize {
        self.responses.iter().filter(|r| r.status == status).count()
    }

    /// Teacher items in prompt-hash order, with out-of-bounds pair replies
    /// left out.
    pub fn items(&self, bounds: PairBounds) -> Vec<TeacherItem> {
        let mut out = Vec::new();
        for r in &self.responses {
            match &r.parsed {
                Some(Parsed::Paragraph(p)) => out.push(TeacherItem::Paragraph(p.clone())),
                Some(Parsed::Pairs(ps)) if (bounds.min..=bounds.max).contains(&ps.len()) => {
                    out.extend(ps.iter().cloned().map(TeacherItem::Pair));
                }
                _ => {}
            }
        }
        out
    }

    /// Turns a transport failure into an error.
    pub fn ensure_transport_ok(&self) -> Result<()> {
        match self.transport_failures().next() {
            Some(r) => Err(Error::TeacherTransport {
                attempts: 0,
                message: format!(
                    "prompt {}: {}",
                    &r.prompt_hash[..12],
                    r.error.as_deref().unwrap_or("unknown")
                ),
            }),
            None => Ok(()),
        }
    }
}

/// Runs `prompts` with the teacher's configured parallelism. Duplicate
/// prompts are sent once and results come back in prompt-hash order.
pub fn run_distill(
    prompts: &[TeacherPrompt],
    teacher: &Teacher,
    cache: Option<&Cache>,
    bounds: PairBounds,
) -> Result<DistillReport> {
    let mut sorted: Vec<&TeacherPrompt> = prompts.iter().collect();
    sorted.sort_by(|a, b| a.prompt_hash.cmp(&b.prompt_hash));
    sorted.dedup_by(|a, b| a.prompt_hash == b.prompt_hash);
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<TeacherResponse>>>> = sorted.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..teacher.concurrency().min(sorted.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(p) = sorted.get(i) else { break };
                let r = call_teacher(p, teacher, cache);
                *slots[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(r);
            });
        }
    });
    let mut responses = Vec::with_capacity(sorted.len());
    for s in slots {
        let r = s
            .into_inner()
            .unwrap_or_else(|e| e.into_inner())
            .ok_or_else(|| Error::domain("distill worker exited early"))??;
        responses.push(r);
    }
    let dropped_by_bounds = responses
        .iter()
        .filter(|r| matches!(&r.parsed, Some(Parsed::Pairs(ps)) if !(bounds.min..=bounds.max).contains(&ps.len())))
        .count();
    Ok(DistillReport {
        responses,
        dropped_by_bounds,
    })
}

/// Pair prompts for every paragraph derived from statistics.
pub fn followup_prompts(report: &DistillReport) -> Result<Vec<TeacherPrompt>> {
    report
        .responses
        .iter()
        .filter(|r| r.kind == PromptKind::ParagraphFromStats)
        .filter_map(|r| match &r.parsed {
            Some(Parsed::Paragraph(p)) => Some(build_prompt(PromptKind::QaFromParagraph, Payload::Text(p.clone()))),
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanConfig {
    pub event_types: Vec<EventType>,
    pub season_label: String,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            event_types: vec![EventType::HighPass, EventType::SimplePass, EventType::Touch],
            season_label: "2017/2018".to_owned(),
        }
    }
}

/// `team X from gameweek A to B did N <event>(s) per match / regional
/// decomposition : ...`
pub fn decomposition_line(tables: &Tables, team: crate::model::TeamId, gw_start: u32, gw_end: u32, et: EventType) -> Result<String> {
    let d = event_decomposition(tables, team, gw_start..=gw_end, et, true)?;
    let shares = if d.top5.is_empty() { "none".to_owned() } else { d.shares_text() };
    Ok(format!(
        "team {} from gameweek {gw_start} to {gw_end} did {} {}(s) per match / regional decomposition : {shares}",
        tables.team_name(team)?,
        d.total_count,
        et.name()
    ))
}

/// The default prompt set for a league: legend, geometry, correlation, one
/// statistics paragraph and one style prompt per team, and one results
/// prompt per gameweek.
pub fn plan_from_tables(tables: &Tables, config: &PlanConfig) -> Result<Vec<PromptSpec>> {
    let last = tables.last_gameweek();
    let mut out = vec![
        PromptSpec {
            kind: PromptKind::RegionLegend,
            payload: Payload::None,
        },
        PromptSpec {
            kind: PromptKind::FieldGeometry,
            payload: Payload::None,
        },
        PromptSpec {
            kind: PromptKind::EventCorrelation,
            payload: Payload::Items(CORRELATION_EVENTS.iter().map(|s| s.to_string()).collect()),
        },
    ];
    for team in &tables.teams_info {
        if tables.team_rows(team.team_id, 1, last).next().is_none() {
            continue;
        }
        let lines = config
            .event_types
            .iter()
            .map(|&et| decomposition_line(tables, team.team_id, 1, last, et))
            .collect::<Result<Vec<_>>>()?;
        out.push(PromptSpec {
            kind: PromptKind::ParagraphFromStats,
            payload: Payload::Lines(lines),
        });
        let weeks: Vec<serde_json::Value> = tables
            .team_rows(team.team_id, 1, last)
            .map(|r| {
                Ok(serde_json::json!({
                    "gameweek": r.gameweek,
                    "opponent": tables.team_name(r.opposing_team_id)?,
                    "side": r.side.as_str(),
                    "goals_scored": r.goals_scored,
                    "goals_conceded": r.goals_conceded,
                    "points": r.points,
                }))
            })
            .collect::<Result<_>>()?;
        out.push(PromptSpec {
            kind: PromptKind::StyleConclusions,
            payload: Payload::Json(serde_json::json!({ "team": team.name, "gameweeks": weeks })),
        });
    }
    for gw in 1..=last {
        let matches: Vec<serde_json::Value> = tables
            .team_week
            .iter()
            .filter(|r| r.gameweek == gw && r.side == Side::Home)
            .map(|r| {
                Ok(serde_json::json!({
                    "home": tables.team_name(r.team_id)?,
                    "away": tables.team_name(r.opposing_team_id)?,
                    "home_goals": r.goals_scored,
                    "away_goals": r.goals_conceded,
                }))
            })
            .collect::<Result<_>>()?;
        out.push(PromptSpec {
            kind: PromptKind::GameweekJsonContext,
            payload: Payload::Json(serde_json::json!({
                "gameweek": gw,
                "league": tables.league,
                "season": config.season_label,
                "matches": matches,
            })),
        });
    }
    Ok(out)
}

pub fn build_prompts(specs: &[PromptSpec]) -> Result<Vec<TeacherPrompt>> {
    specs.iter().map(|s| build_prompt(s.kind, s.payload.clone())).collect()
}

/// Teacher items from every readable cache entry, in hash order. Lets
/// curation consume a cache without re-running distillation.
pub fn items_from_cache(cache: &Cache, bounds: PairBounds) -> Result<Vec<TeacherItem>> {
    let mut responses = Vec::new();
    for (hash, entry) in cache.entries()? {
        let prompt = TeacherPrompt {
            kind: entry.kind,
            body: entry.prompt,
            payload: Payload::None,
            payload_hash: String::new(),
            prompt_hash: hash,
        };
        responses.push(interpret(&prompt, entry.raw_text, true));
    }
    Ok(DistillReport {
        responses,
        dropped_by_bounds: 0,
    }
    .items(bounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::fixture_gen;
    use crate::tables::build_tables;

    fn sampdoria_lines() -> Vec<String> {
        vec![
            "team UC Sampdoria from gameweek 1 to 10 did 32 High pass(s) per match / regional decomposition : 34% in [region 4 , 3]; 22% in [region 5 , 4]".into(),
            "team UC Sampdoria from gameweek 1 to 10 did 395 Simple pass(s) per match / regional decomposition : 22% in [region 3 , 2]".into(),
        ]
    }

    #[test]
    fn paragraph_prompt_shape() {
        let p = build_prompt(PromptKind::ParagraphFromStats, Payload::Lines(sampdoria_lines())).unwrap();
        assert!(p.body.starts_with("given this : team UC Sampdoria from gameweek 1 to 10 did 32 High pass(s)"));
        assert!(p.body.contains("', 'team UC Sampdoria"));
        assert!(p.body.contains("Region 0, 0: Defensive third, near the left corner flag."));
        assert!(p.body.ends_with(PARAGRAPH_INSTRUCTION));
        assert_eq!(p.prompt_hash.len(), 64);
    }

    #[test]
    fn qa_and_correlation_prompts() {
        let p = build_prompt(PromptKind::QaFromParagraph, Payload::Text("Some text.".into())).unwrap();
        assert!(p.body.contains("add \"footgpt, \" at the beginning of each question"));
        let items = CORRELATION_EVENTS.iter().map(|s| s.to_string()).collect();
        let p = build_prompt(PromptKind::EventCorrelation, Payload::Items(items)).unwrap();
        assert!(p.body.contains("'Air duel', 'Ground loose ball duel'"));
        assert!(p.body.ends_with("'Yellow Cards'"));
    }

    #[test]
    fn payload_mismatch() {
        assert!(build_prompt(PromptKind::QaFromParagraph, Payload::None).is_err());
        assert!(build_prompt(PromptKind::ParagraphFromStats, Payload::Lines(vec![])).is_err());
        assert!(build_prompt(PromptKind::GameweekJsonContext, Payload::Json(serde_json::json!({}))).is_err());
    }

    #[test]
    fn stub_paragraph_embeds_numbers() {
        let p = build_prompt(PromptKind::ParagraphFromStats, Payload::Lines(sampdoria_lines())).unwrap();
        let text = stub_reply(&p);
        for n in ["32", "34%", "22%", "395", "1 to 10"] {
            assert!(text.contains(n), "{n} missing from {text}");
        }
        assert_eq!(text, stub_reply(&p));
    }

    #[test]
    fn stub_pairs_parse() {
        let p = build_prompt(
            PromptKind::QaFromParagraph,
            Payload::Text("Alpha has \"quotes\". Beta is second! Gamma".into()),
        )
        .unwrap();
        let r = call_teacher(&p, &Teacher::stub(), None).unwrap();
        assert_eq!(r.status, ResponseStatus::Ok);
        let Some(Parsed::Pairs(ps)) = r.parsed else { panic!() };
        assert_eq!(ps.len(), 3);
        assert_eq!(ps[0].answer, "Answer : Alpha has \"quotes\".");
    }

    #[test]
    fn cache_serves_second_call() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let p = build_prompt(PromptKind::RegionLegend, Payload::None).unwrap();
        let a = call_teacher(&p, &Teacher::stub(), Some(&cache)).unwrap();
        let b = call_teacher(&p, &Teacher::stub(), Some(&cache)).unwrap();
        assert!(!a.from_cache && b.from_cache);
        assert_eq!(a.parsed, b.parsed);
        let entries = cache.entries().unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].1.timestamp, 0);
    }

    #[test]
    fn plan_covers_league() {
        let t = build_tables(&fixture_gen(4, 3, 5).unwrap().parse().unwrap()).unwrap();
        let specs = plan_from_tables(&t, &PlanConfig::default()).unwrap();
        // 3 fixed, 2 per team, 1 per gameweek.
        assert_eq!(specs.len(), 3 + 2 * 4 + 3);
        let prompts = build_prompts(&specs).unwrap();
        let report = run_distill(&prompts, &Teacher::stub(), None, PairBounds::default()).unwrap();
        assert_eq!(report.count(ResponseStatus::Ok), specs.len());
        let follow = followup_prompts(&report).unwrap();
        assert_eq!(follow.len(), 4);
        let r2 = run_distill(&follow, &Teacher::stub(), None, PairBounds::default()).unwrap();
        assert!(r2.items(PairBounds::default()).iter().all(|i| matches!(i, TeacherItem::Pair(_))));
        let tight = PairBounds { min: 1000, max: 2000 };
        assert!(r2.items(tight).is_empty());
    }
}
