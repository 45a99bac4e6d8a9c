//! End-to-end run: ingest, tables, stats, distill, curate, oracle self-check
//! and the adapter demo, with a manifest hashing every emitted file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curate::{assemble_corpus, emit_jsonl, render_all, Bank, CurationConfig, Manifest};
use crate::distill::{
    build_prompts, followup_prompts, plan_from_tables, run_distill, Cache, EndpointConfig, PairBounds, PlanConfig,
    PromptSpec, Teacher,
};
use crate::error::{Error, Result};
use crate::fixture::RawFiles;
use crate::ingest::{parse_dataset_with, FieldMapping, IngestConfig, RawDataset};
use crate::lora::{run_demo, DemoConfig};
use crate::oracle::{grade, GradeVerdict, Oracle};
use crate::stats::standings;
use crate::tables::{build_tables_with, export_csv, Tables, TablesConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InputPaths {
    pub matches: PathBuf,
    pub events: PathBuf,
    pub teams: PathBuf,
    pub players: PathBuf,
    /// JSON [`FieldMapping`]; overrides `ingest.mapping`.
    pub field_mapping: Option<PathBuf>,
}

impl Default for InputPaths {
    fn default() -> Self {
        InputPaths::in_dir(Path::new("data"))
    }
}

impl InputPaths {
    pub fn in_dir(dir: &Path) -> Self {
        InputPaths {
            matches: dir.join("matches.json"),
            events: dir.join("events.json"),
            teams: dir.join("teams.json"),
            players: dir.join("players.json"),
            field_mapping: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TeacherSettings {
    /// Call the configured endpoint. Off by default: replies come from the
    /// cache or the stub.
    pub live: bool,
    pub endpoint: EndpointConfig,
    pub plan: PlanConfig,
    /// A JSON list of prompt specs replacing the generated plan.
    pub prompts: Option<PathBuf>,
    pub pair_bounds: PairBounds,
    /// Defaults to `<output_dir>/teacher_cache`.
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub input: InputPaths,
    pub ingest: IngestConfig,
    pub tables: TablesConfig,
    pub curation: CurationConfig,
    /// Extra question/answer wordings, JSON.
    pub phrasings: Option<PathBuf>,
    pub teacher: TeacherSettings,
    pub lora: DemoConfig,
    pub output_dir: PathBuf,
    /// Shuffle seed; recorded in every manifest.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: InputPaths::default(),
            ingest: IngestConfig::default(),
            tables: TablesConfig::default(),
            curation: CurationConfig::default(),
            phrasings: None,
            teacher: TeacherSettings::default(),
            lora: DemoConfig::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn curation(&self) -> CurationConfig {
        CurationConfig {
            seed: self.seed,
            ..self.curation.clone()
        }
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.teacher
            .cache_dir
            .clone()
            .unwrap_or_else(|| self.output_dir.join("teacher_cache"))
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory when inside it.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub status: RunStatus,
    pub failed_stage: Option<String>,
    pub seed: u64,
    pub config_hash: String,
    pub teacher_mode: String,
    pub stages: Vec<StageRecord>,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PARTIAL_MARKER: &str = "PARTIAL";

pub fn hash_file(path: &Path) -> Result<(String, u64)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("value serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Loads the four raw files named by `input` and parses them.
pub fn load_dataset(input: &InputPaths, ingest: &IngestConfig) -> Result<RawDataset> {
    let mut config = ingest.clone();
    if let Some(p) = &input.field_mapping {
        let bytes = read_input(p)?;
        config.mapping = serde_json::from_slice::<FieldMapping>(&bytes)
            .map_err(|e| Error::domain(format!("{}: invalid field mapping: {e}", p.display())))?;
    }
    let files = RawFiles {
        matches: read_input(&input.matches)?,
        events: read_input(&input.events)?,
        teams: read_input(&input.teams)?,
        players: read_input(&input.players)?,
    };
    parse_dataset_with(&config, &files.matches, &files.events, &files.teams, &files.players)
}

pub fn load_bank(phrasings: Option<&Path>) -> Result<Bank> {
    match phrasings {
        Some(p) => Bank::with_extra_json(&read_input(p)?),
        None => Ok(Bank::builtin()),
    }
}

pub fn load_prompt_specs(path: &Path) -> Result<Vec<PromptSpec>> {
    serde_json::from_slice(&read_input(path)?)
        .map_err(|e| Error::domain(format!("{}: invalid prompt plan: {e}", path.display())))
}

/// The teacher a config asks for: live when requested and compiled in,
/// otherwise the stub.
pub fn teacher_for(settings: &TeacherSettings) -> Result<Teacher> {
    if !settings.live {
        return Ok(Teacher::stub());
    }
    #[cfg(feature = "live")]
    {
        Ok(Teacher::live(settings.endpoint.clone().from_process_env()))
    }
    #[cfg(not(feature = "live"))]
    {
        Err(Error::domain("live teacher requested but built without the `live` feature"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSelfCheck {
    pub graded: u64,
    pub correct: u64,
    pub partial: u64,
    pub wrong: u64,
}

struct Run<'c> {
    config: &'c RunConfig,
    out: PathBuf,
    stages: Vec<StageRecord>,
    files: Vec<PathBuf>,
}

impl Run<'_> {
    fn record(&mut self, stage: &str, counts: &[(&str, u64)]) {
        log::info!("stage {stage}: {counts:?}");
        self.stages.push(StageRecord {
            stage: stage.to_owned(),
            counts: counts.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        });
    }

    fn manifest(&self, status: RunStatus, failed: Option<&str>, teacher: &Teacher) -> Result<RunManifest> {
        let mut files = Vec::new();
        let mut paths = self.files.clone();
        paths.sort();
        paths.dedup();
        for p in paths {
            let (sha256, bytes) = hash_file(&p)?;
            let rel = p.strip_prefix(&self.out).unwrap_or(&p);
            files.push(FileEntry {
                path: rel.to_string_lossy().replace('\\', "/"),
                sha256,
                bytes,
            });
        }
        Ok(RunManifest {
            status,
            failed_stage: failed.map(str::to_owned),
            seed: self.config.seed,
            config_hash: self.config.hash(),
            teacher_mode: if teacher.is_stub() { "stub" } else { "live" }.to_owned(),
            stages: self.stages.clone(),
            files,
        })
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        source: Box::new(e),
    })
}

/// Runs every stage with the teacher implied by the config.
pub fn run_pipeline(config: &RunConfig) -> Result<RunManifest> {
    let teacher = stage("distill", teacher_for(&config.teacher))?;
    run_pipeline_with(config, &teacher)
}

/// Runs every stage in order. On failure the output directory gets a
/// `PARTIAL` marker and a manifest of what was written before the failing
/// stage, and the error names that stage.
pub fn run_pipeline_with(config: &RunConfig, teacher: &Teacher) -> Result<RunManifest> {
    let out = config.output_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let marker = out.join(PARTIAL_MARKER);
    if marker.exists() {
        std::fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))?;
    }
    let mut run = Run {
        config,
        out: out.clone(),
        stages: Vec::new(),
        files: Vec::new(),
    };
    match stages(&mut run, teacher) {
        Ok(()) => {
            let manifest = run.manifest(RunStatus::Complete, None, teacher)?;
            write_json(&out.join(MANIFEST_FILE), &manifest)?;
            Ok(manifest)
        }
        Err(e) => {
            let failed = match &e {
                Error::Stage { stage, .. } => *stage,
                _ => "unknown",
            };
            std::fs::write(&marker, format!("failed at stage {failed}: {e}\n")).map_err(|e| Error::io(&marker, e))?;
            let manifest = run.manifest(RunStatus::Partial, Some(failed), teacher)?;
            write_json(&out.join(MANIFEST_FILE), &manifest)?;
            Err(e)
        }
    }
}

fn stages(run: &mut Run<'_>, teacher: &Teacher) -> Result<()> {
    let config = run.config;
    let out = run.out.clone();

    let dataset = stage("ingest", load_dataset(&config.input, &config.ingest))?;
    let d = dataset.discards;
    run.record(
        "ingest",
        &[
            ("matches", dataset.matches.len() as u64),
            ("events_in", dataset.input_event_count as u64),
            ("events_kept", dataset.events.len() as u64),
            ("events_dropped", d.dropped_events() as u64),
            ("teams", dataset.teams.len() as u64),
            ("players", dataset.players.len() as u64),
        ],
    );

    let tables = stage("tables", build_tables_with(&dataset, config.tables))?;
    let csvs = stage("tables", export_csv(&tables, &out.join("tables")))?;
    run.files.extend(csvs);
    run.record(
        "tables",
        &[
            ("team_week", tables.team_week.len() as u64),
            ("player_week", tables.player_week.len() as u64),
            ("events", tables.events.len() as u64),
        ],
    );

    let standings_path = out.join("stats").join("standings.json");
    stage("stats", write_standings(&tables, &standings_path))?;
    run.files.push(standings_path);
    run.record("stats", &[("gameweeks", u64::from(tables.last_gameweek()))]);

    let cache = stage("distill", Cache::open(config.cache_dir()))?;
    let specs = stage(
        "distill",
        match &config.teacher.prompts {
            Some(p) => load_prompt_specs(p),
            None => plan_from_tables(&tables, &config.teacher.plan),
        },
    )?;
    let prompts = stage("distill", build_prompts(&specs))?;
    let bounds = config.teacher.pair_bounds;
    let first = stage("distill", run_distill(&prompts, teacher, Some(&cache), bounds))?;
    stage("distill", first.ensure_transport_ok())?;
    let follow = stage("distill", followup_prompts(&first))?;
    let second = stage("distill", run_distill(&follow, teacher, Some(&cache), bounds))?;
    stage("distill", second.ensure_transport_ok())?;
    let mut teacher_items = first.items(bounds);
    teacher_items.extend(second.items(bounds));
    for r in first.responses.iter().chain(&second.responses) {
        run.files.push(cache.dir().join(format!("{}.json", r.prompt_hash)));
    }
    let responses = first.responses.len() + second.responses.len();
    let parse_failed = first.count(crate::distill::ResponseStatus::ParseFailed)
        + second.count(crate::distill::ResponseStatus::ParseFailed);
    run.record(
        "distill",
        &[
            ("responses", responses as u64),
            ("parse_failed", parse_failed as u64),
            ("dropped_by_bounds", (first.dropped_by_bounds + second.dropped_by_bounds) as u64),
            ("items", teacher_items.len() as u64),
            ("network_calls", teacher.network_calls() as u64),
        ],
    );

    let curation = config.curation();
    let bank = stage("curate", load_bank(config.phrasings.as_deref()))?;
    let oracle = Oracle::with_bank(&tables, curation.oracle_config(), bank);
    let pairs = stage("curate", render_all(&oracle, &curation))?;
    let corpus = stage(
        "curate",
        assemble_corpus(
            &pairs,
            &teacher_items,
            |p| p.query().map(|q| q.family().as_str().to_owned()).unwrap_or_default(),
            &curation,
        ),
    )?;
    let corpus_path = out.join("corpus.jsonl");
    stage("curate", emit_jsonl(&corpus.chunks, &corpus_path))?;
    let corpus_manifest_path = out.join("corpus_manifest.json");
    stage("curate", write_json(&corpus_manifest_path, &Manifest::new(&curation, &corpus)))?;
    run.files.push(corpus_path);
    run.files.push(corpus_manifest_path);
    run.record(
        "curate",
        &[
            ("template_pairs", pairs.len() as u64),
            ("datapoints", corpus.stats.total_datapoints as u64),
            ("dedup", corpus.stats.dedup_count as u64),
            ("chunks", corpus.chunks.len() as u64),
        ],
    );

    let check = stage("oracle", self_check(&oracle, &pairs))?;
    let check_path = out.join("oracle_check.json");
    stage("oracle", write_json(&check_path, &check))?;
    run.files.push(check_path);
    run.record(
        "oracle",
        &[("graded", check.graded), ("correct", check.correct), ("wrong", check.wrong)],
    );
    if check.correct != check.graded {
        return Err(Error::Stage {
            stage: "oracle",
            source: Box::new(Error::domain(format!(
                "{} of {} template answers disagree with the oracle",
                check.graded - check.correct,
                check.graded
            ))),
        });
    }

    let report = stage("lora", run_demo(&config.lora))?;
    let lora_path = out.join("lora_demo.json");
    stage("lora", write_json(&lora_path, &report))?;
    run.files.push(lora_path);
    run.record(
        "lora",
        &[
            ("steps", config.lora.steps as u64),
            ("monotone", u64::from(report.monotone)),
            ("base_unchanged", u64::from(report.base_unchanged)),
        ],
    );
    Ok(())
}

fn write_standings(tables: &Tables, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut all = BTreeMap::new();
    for gw in 1..=tables.last_gameweek() {
        let rows: Vec<serde_json::Value> = standings(tables, gw, true)?
            .into_iter()
            .map(|r| {
                Ok(serde_json::json!({
                    "rank": r.rank,
                    "team": tables.team_name(r.team_id)?,
                    "points": r.points_cum,
                    "goals": r.goals_cum,
                }))
            })
            .collect::<Result<_>>()?;
        all.insert(format!("{gw:02}"), rows);
    }
    write_json(path, &all)
}

/// Grades every template pair's answer against the oracle.
pub fn self_check(oracle: &Oracle<'_>, pairs: &[crate::curate::QAPair]) -> Result<OracleSelfCheck> {
    let mut c = OracleSelfCheck {
        graded: 0,
        correct: 0,
        partial: 0,
        wrong: 0,
    };
    for p in pairs {
        let Some(q) = p.query() else { continue };
        let gold = oracle.answer(&q)?;
        c.graded += 1;
        match grade(&p.answer, &gold).verdict {
            GradeVerdict::Correct => c.correct += 1,
            GradeVerdict::Partial => c.partial += 1,
            GradeVerdict::Wrong => c.wrong += 1,
        }
    }
    Ok(c)
}
