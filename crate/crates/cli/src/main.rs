use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use footcorpus::curate::{build_corpus, emit_jsonl, Manifest};
use footcorpus::distill::{
    build_prompts, followup_prompts, items_from_cache, plan_from_tables, run_distill, Cache, PairBounds,
    ResponseStatus,
};
use footcorpus::fixture::{fixture_gen_with, FixtureOptions};
use footcorpus::lora::run_demo;
use footcorpus::model::EventType;
use footcorpus::oracle::{grade, Answer, GradeVerdict, Oracle};
use footcorpus::pipeline::{
    load_bank, load_dataset, load_prompt_specs, run_pipeline, teacher_for, InputPaths, RunConfig,
};
use footcorpus::stats::{
    compare_teams, cumulative_average, event_decomposition, progression, season_event_ranking, standings,
    Metric,
};
use footcorpus::tables::{build_tables_with, export_csv, Tables};
use footcorpus::Error;

#[derive(Parser)]
#[command(name = "footcorpus", version, about = "Soccer statistics QA corpus builder")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML run config; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory holding matches.json, events.json, teams.json, players.json.
    #[arg(long, global = true)]
    data: Option<PathBuf>,

    /// Machine-readable output on stdout; errors as JSON on stderr.
    #[arg(long, global = true)]
    json: bool,

    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the raw files and report what was kept and discarded.
    Ingest,
    /// Build the weekly tables and write them as CSV.
    Tables {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Query standings and event statistics.
    Stats {
        #[command(subcommand)]
        query: StatsQuery,
    },
    /// Send teacher prompts, or read them back from the cache.
    Distill {
        /// JSON list of prompt specs; generated from the data when absent.
        #[arg(long)]
        prompts: Option<PathBuf>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Call the endpoint named by TEACHER_ENDPOINT.
        #[arg(long)]
        live: bool,
        #[arg(long)]
        min_pairs: Option<usize>,
        #[arg(long)]
        max_pairs: Option<usize>,
    },
    /// Render the template corpus, merge cached teacher items, write JSONL.
    Curate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        teacher_cache: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Answer questions and grade predictions against the tables.
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Low-rank adapter toy problem.
    Lora {
        #[command(subcommand)]
        action: LoraAction,
    },
    /// Write a synthetic round-robin league.
    Fixture {
        #[arg(long)]
        teams: usize,
        #[arg(long)]
        gameweeks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// About a tenth of the default event volume.
        #[arg(long)]
        sparse: bool,
    },
    /// Run every stage and write a manifest.
    Run {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        live: bool,
    },
}

#[derive(Subcommand)]
enum StatsQuery {
    Standings {
        #[arg(long)]
        gameweek: u32,
        /// Standings before the gameweek's matches.
        #[arg(long)]
        exclusive: bool,
    },
    Progression {
        #[arg(long)]
        team: String,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
    },
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        teams: Vec<String>,
        #[arg(long)]
        gameweek: u32,
    },
    Average {
        #[arg(long)]
        team: String,
        #[arg(long)]
        gameweek: u32,
        #[arg(long, value_parser = parse_metric)]
        metric: Metric,
    },
    Decomposition {
        #[arg(long)]
        team: String,
        #[arg(long)]
        event: String,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(long)]
        per_match: bool,
    },
    Ranking {
        #[arg(long)]
        event: String,
    },
}

#[derive(Subcommand)]
enum OracleAction {
    Answer { question: String },
    /// Grade predictions line by line against gold answers.
    Grade {
        /// Answers from `oracle answer --json`, as a JSON array or JSONL.
        #[arg(long)]
        gold: PathBuf,
        /// One prediction per line: plain text, a JSON string, or {"answer": ..}.
        #[arg(long)]
        pred: PathBuf,
    },
}

#[derive(Subcommand)]
enum LoraAction {
    Demo {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lr: Option<f64>,
    },
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    match s {
        "goals" => Ok(Metric::Goals),
        "points" => Ok(Metric::Points),
        _ => Err(format!("expected goals or points, got {s:?}")),
    }
}

/// 2 config, 3 data integrity, 4 teacher transport, 5 internal.
fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e.root() {
            Error::Domain(_)
            | Error::NotFound(_)
            | Error::Io { .. }
            | Error::UnsupportedQuestion(_)
            | Error::AmbiguousTeam { .. } => 2,
            Error::Parse { .. }
            | Error::Integrity { .. }
            | Error::EmptyDataset { .. }
            | Error::MissingCoordinate { .. } => 3,
            Error::TeacherTransport { .. } => 4,
            Error::Divergence(_) | Error::Stage { .. } => 5,
        };
    }
    if err.downcast_ref::<toml::de::Error>().is_some()
        || err.downcast_ref::<serde_json::Error>().is_some()
        || err.downcast_ref::<std::io::Error>().is_some()
    {
        return 2;
    }
    5
}

struct Ctx {
    config: RunConfig,
    json: bool,
}

impl Ctx {
    fn load(global: &Global) -> Result<Ctx> {
        let mut config = match &global.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str::<RunConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(dir) = &global.data {
            let mapping = config.input.field_mapping.take();
            config.input = InputPaths {
                field_mapping: mapping,
                ..InputPaths::in_dir(dir)
            };
        }
        Ok(Ctx {
            config,
            json: global.json,
        })
    }

    fn tables(&self) -> Result<Tables> {
        let dataset = load_dataset(&self.config.input, &self.config.ingest)?;
        Ok(build_tables_with(&dataset, self.config.tables)?)
    }

    fn oracle<'t>(&self, tables: &'t Tables) -> Result<Oracle<'t>> {
        let bank = load_bank(self.config.phrasings.as_deref())?;
        Ok(Oracle::with_bank(tables, self.config.curation().oracle_config(), bank))
    }

    fn emit(&self, value: &impl Serialize, human: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            println!("{}", human());
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let json = cli.global.json;
    match Ctx::load(&cli.global).and_then(|ctx| dispatch(&ctx, cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code(&err);
            if json {
                eprintln!("{}", json!({ "error": format!("{err:#}"), "exit_code": code }));
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(code)
        }
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<()> {
    match command {
        Command::Ingest => ingest(ctx),
        Command::Tables { out } => tables(ctx, out),
        Command::Stats { query } => stats(ctx, query),
        Command::Distill {
            prompts,
            cache,
            live,
            min_pairs,
            max_pairs,
        } => {
            let mut bounds = ctx.config.teacher.pair_bounds;
            bounds.min = min_pairs.unwrap_or(bounds.min);
            bounds.max = max_pairs.unwrap_or(bounds.max);
            distill(ctx, prompts, cache, live, bounds)
        }
        Command::Curate {
            out,
            teacher_cache,
            seed,
        } => curate(ctx, &out, teacher_cache, seed),
        Command::Oracle { action } => match action {
            OracleAction::Answer { question } => oracle_answer(ctx, &question),
            OracleAction::Grade { gold, pred } => oracle_grade(ctx, &gold, &pred),
        },
        Command::Lora {
            action:
                LoraAction::Demo {
                    d,
                    k,
                    r,
                    steps,
                    seed,
                    lr,
                },
        } => {
            let mut cfg = ctx.config.lora;
            cfg.d = d.unwrap_or(cfg.d);
            cfg.k = k.unwrap_or(cfg.k);
            cfg.r = r.unwrap_or(cfg.r);
            cfg.steps = steps.unwrap_or(cfg.steps);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.lr = lr.unwrap_or(cfg.lr);
            let report = run_demo(&cfg)?;
            ctx.emit(&report, || {
                format!(
                    "loss {:.3e} -> {:.3e} over {} steps\nmonotone: {}\nbase unchanged: {}\ntrainable params: {} of {}\nforward vs merged max err: {:.2e}\ngradient check max rel err: {:.2e}\nquantization max err: {:.2e} (scale {:.2e})",
                    report.losses[0],
                    report.final_loss,
                    cfg.steps,
                    report.monotone,
                    report.base_unchanged,
                    report.trainable_params,
                    report.dense_params,
                    report.factored_vs_merged_max_err,
                    report.gradient_check_max_rel_err,
                    report.quant_max_err,
                    report.quant_scale,
                )
            })
        }
        Command::Fixture {
            teams,
            gameweeks,
            seed,
            out,
            sparse,
        } => {
            let opts = if sparse { FixtureOptions::sparse() } else { FixtureOptions::default() };
            let files = fixture_gen_with(teams, gameweeks, seed, &opts)?;
            let written = files.write_to(&out)?;
            let matches = files.parse()?.matches.len();
            let value = json!({ "files": written, "matches": matches, "seed": seed });
            ctx.emit(&value, || format!("wrote {} files, {matches} matches, to {}", written.len(), out.display()))
        }
        Command::Run { out, seed, live } => {
            let mut config = ctx.config.clone();
            if let Some(out) = out {
                config.output_dir = out;
            }
            config.seed = seed.unwrap_or(config.seed);
            config.teacher.live |= live;
            let manifest = run_pipeline(&config)?;
            ctx.emit(&manifest, || {
                let mut s = format!("run complete in {}\n", config.output_dir.display());
                for st in &manifest.stages {
                    let counts: Vec<String> = st.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    s.push_str(&format!("  {:<8} {}\n", st.stage, counts.join(" ")));
                }
                s.push_str(&format!("  {} files hashed, config {}", manifest.files.len(), &manifest.config_hash[..12]));
                s
            })
        }
    }
}

fn ingest(ctx: &Ctx) -> Result<()> {
    let ds = load_dataset(&ctx.config.input, &ctx.config.ingest)?;
    let value = json!({
        "league": ds.league,
        "matches": ds.matches.len(),
        "events_in": ds.input_event_count,
        "events_kept": ds.events.len(),
        "teams": ds.teams.len(),
        "players": ds.players.len(),
        "discards": ds.discards,
    });
    ctx.emit(&value, || {
        let d = ds.discards;
        format!(
            "{}: {} matches, {} teams, {} players\nevents: {} read, {} kept\ndiscarded: {} untracked type, {} missing coordinate, {} outside gameweeks, {} outside league",
            ds.league,
            ds.matches.len(),
            ds.teams.len(),
            ds.players.len(),
            ds.input_event_count,
            ds.events.len(),
            d.type_excluded,
            d.coordinates_missing,
            d.gameweek_filtered_events,
            d.league_filtered_events,
        )
    })
}

fn tables(ctx: &Ctx, out: Option<PathBuf>) -> Result<()> {
    let t = ctx.tables()?;
    let dir = out.unwrap_or_else(|| ctx.config.output_dir.join("tables"));
    let files = export_csv(&t, &dir)?;
    let value = json!({
        "files": files,
        "team_week": t.team_week.len(),
        "player_week": t.player_week.len(),
        "events": t.events.len(),
    });
    ctx.emit(&value, || {
        format!(
            "{} team-week, {} player-week, {} event rows written to {}",
            t.team_week.len(),
            t.player_week.len(),
            t.events.len(),
            dir.display()
        )
    })
}

fn event_type(name: &str) -> Result<EventType> {
    Ok(name.parse::<EventType>()?)
}

fn stats(ctx: &Ctx, query: StatsQuery) -> Result<()> {
    let t = ctx.tables()?;
    let oracle = ctx.oracle(&t)?;
    let name = |id| t.team_name(id).map(str::to_owned);
    match query {
        StatsQuery::Standings { gameweek, exclusive } => {
            let rows = standings(&t, gameweek, !exclusive)?;
            let mut out = Vec::new();
            for r in &rows {
                out.push(json!({ "rank": r.rank, "team": name(r.team_id)?, "points": r.points_cum, "goals": r.goals_cum }));
            }
            ctx.emit(&out, || {
                out.iter()
                    .map(|r| format!("{:>2}. {:<32} {:>3} pts {:>3} goals", r["rank"], r["team"].as_str().unwrap_or(""), r["points"], r["goals"]))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
        }
        StatsQuery::Progression { team, from, to } => {
            let id = oracle.resolve_team(&team)?;
            let p = progression(&t, id, from, to)?;
            let value = json!({ "team": name(id)?, "progression": p });
            ctx.emit(&value, || {
                format!("{}: rank {} at gameweek {from}, {} at gameweek {to} ({:?})", name(id).unwrap_or_default(), p.rank_start, p.rank_end, p.verdict)
            })
        }
        StatsQuery::Compare { teams, gameweek } => {
            let ids = teams.iter().map(|m| oracle.resolve_team(m)).collect::<Result<Vec<_>, _>>()?;
            let rows = compare_teams(&t, &ids, gameweek)?;
            let mut out = Vec::new();
            for r in &rows {
                out.push(json!({ "rank": r.rank, "team": name(r.team_id)?, "points": r.points_cum }));
            }
            ctx.emit(&out, || {
                out.iter()
                    .map(|r| format!("{:>2}. {} ({} pts)", r["rank"], r["team"].as_str().unwrap_or(""), r["points"]))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
        }
        StatsQuery::Average { team, gameweek, metric } => {
            let id = oracle.resolve_team(&team)?;
            let a = cumulative_average(&t, id, gameweek, metric)?;
            let value = json!({
                "team": name(id)?,
                "metric": metric.as_str(),
                "value": a.value_string(),
                "arithmetic": a.arithmetic_string(),
                "average": a,
            });
            ctx.emit(&value, || format!("{} = {}", a.arithmetic_string(), a.value_string()))
        }
        StatsQuery::Decomposition {
            team,
            event,
            from,
            to,
            per_match,
        } => {
            let id = oracle.resolve_team(&team)?;
            let et = event_type(&event)?;
            let d = event_decomposition(&t, id, from..=to, et, per_match)?;
            let value = json!({
                "team": name(id)?,
                "event": et.name(),
                "total": d.total_count,
                "matches": d.matches,
                "top5": d.top5.iter().map(|s| json!({ "region": s.region.to_string(), "pct": s.pct })).collect::<Vec<_>>(),
                "counts": d.counts,
            });
            ctx.emit(&value, || format!("{} {}(s): {}", d.total_count, et.name(), d.shares_text()))
        }
        StatsQuery::Ranking { event } => {
            let et = event_type(&event)?;
            let rows = season_event_ranking(&t, et);
            let mut out = Vec::new();
            for r in &rows {
                out.push(json!({
                    "rank": r.rank,
                    "team": name(r.team_id)?,
                    "events": r.event_count,
                    "matches": r.matches,
                    "per_match": r.avg_string(),
                }));
            }
            ctx.emit(&out, || {
                out.iter()
                    .map(|r| format!("{:>2}. {:<32} {}", r["rank"], r["team"].as_str().unwrap_or(""), r["per_match"].as_str().unwrap_or("")))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
        }
    }
}

fn distill(ctx: &Ctx, prompts: Option<PathBuf>, cache: Option<PathBuf>, live: bool, bounds: PairBounds) -> Result<()> {
    let mut settings = ctx.config.teacher.clone();
    settings.live |= live;
    let teacher = teacher_for(&settings)?;
    let specs = match prompts.or(settings.prompts.clone()) {
        Some(p) => load_prompt_specs(&p)?,
        None => plan_from_tables(&ctx.tables()?, &settings.plan)?,
    };
    let cache_dir = cache.unwrap_or_else(|| ctx.config.cache_dir());
    let cache = Cache::open(&cache_dir)?;
    let first = run_distill(&build_prompts(&specs)?, &teacher, Some(&cache), bounds)?;
    first.ensure_transport_ok()?;
    let second = run_distill(&followup_prompts(&first)?, &teacher, Some(&cache), bounds)?;
    second.ensure_transport_ok()?;

    let responses: Vec<Value> = first
        .responses
        .iter()
        .chain(&second.responses)
        .map(|r| {
            json!({
                "prompt_hash": r.prompt_hash,
                "kind": r.kind.as_str(),
                "status": r.status,
                "from_cache": r.from_cache,
            })
        })
        .collect();
    let count = |s| first.count(s) + second.count(s);
    let items = first.items(bounds).len() + second.items(bounds).len();
    let value = json!({
        "mode": if teacher.is_stub() { "stub" } else { "live" },
        "cache": cache_dir,
        "ok": count(ResponseStatus::Ok),
        "parse_failed": count(ResponseStatus::ParseFailed),
        "dropped_by_bounds": first.dropped_by_bounds + second.dropped_by_bounds,
        "items": items,
        "network_calls": teacher.network_calls(),
        "responses": responses,
    });
    ctx.emit(&value, || {
        format!(
            "{} teacher: {} responses ({} parse failures), {items} items, {} network calls, cache {}",
            value["mode"].as_str().unwrap_or(""),
            responses.len(),
            value["parse_failed"],
            teacher.network_calls(),
            cache_dir.display()
        )
    })
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn curate(ctx: &Ctx, out: &Path, teacher_cache: Option<PathBuf>, seed: Option<u64>) -> Result<()> {
    let mut config = ctx.config.clone();
    config.seed = seed.unwrap_or(config.seed);
    let t = ctx.tables()?;
    let oracle = ctx.oracle(&t)?;
    let curation = config.curation();
    curation.validate(&t)?;
    let teacher = match teacher_cache {
        Some(dir) => {
            if !dir.is_dir() {
                bail!(Error::NotFound(format!("teacher cache {}", dir.display())));
            }
            items_from_cache(&Cache::open(dir)?, config.teacher.pair_bounds)?
        }
        None => Vec::new(),
    };
    let corpus = build_corpus(&oracle, &teacher, &curation)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    emit_jsonl(&corpus.chunks, out)?;
    let manifest = Manifest::new(&curation, &corpus);
    let side = sidecar_path(out);
    std::fs::write(&side, serde_json::to_vec_pretty(&manifest)?).with_context(|| format!("writing {}", side.display()))?;
    ctx.emit(&manifest, || {
        format!(
            "{} datapoints ({} duplicates dropped) in {} chunks written to {}\nmanifest: {}",
            manifest.total_datapoints,
            manifest.dedup_count,
            manifest.chunk_count,
            out.display(),
            side.display()
        )
    })
}

fn oracle_answer(ctx: &Ctx, question: &str) -> Result<()> {
    let t = ctx.tables()?;
    let oracle = ctx.oracle(&t)?;
    let query = oracle.parse_question(question)?;
    let answer = oracle.answer(&query)?;
    ctx.emit(&answer, || answer.text.clone())
}

fn read_gold(path: &Path) -> Result<Vec<Answer>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(list) = serde_json::from_str::<Vec<Answer>>(&text) {
        return Ok(list);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}: not an answer object", path.display(), i + 1)))
        .collect()
}

fn read_predictions(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| match serde_json::from_str::<Value>(l) {
            Ok(Value::String(s)) => s,
            Ok(Value::Object(o)) => match o.get("answer") {
                Some(Value::String(s)) => s.clone(),
                _ => l.to_owned(),
            },
            _ => l.to_owned(),
        })
        .collect())
}

fn oracle_grade(ctx: &Ctx, gold: &Path, pred: &Path) -> Result<()> {
    let gold = read_gold(gold)?;
    let pred = read_predictions(pred)?;
    if gold.len() != pred.len() {
        bail!(Error::Domain(format!("{} gold answers but {} predictions", gold.len(), pred.len())));
    }
    let reports: Vec<_> = gold.iter().zip(&pred).map(|(g, p)| grade(p, g)).collect();
    let n = reports.len();
    let by = |v| reports.iter().filter(|r| r.verdict == v).count();
    let correct = by(GradeVerdict::Correct);
    let ratio = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    let value = json!({
        "n": n,
        "correct": correct,
        "partial": by(GradeVerdict::Partial),
        "wrong": by(GradeVerdict::Wrong),
        "accuracy": ratio(correct),
        "mean_score": if n == 0 { 0.0 } else { reports.iter().map(|r| r.score).sum::<f64>() / n as f64 },
        "items": reports,
    });
    ctx.emit(&value, || {
        format!(
            "{correct}/{n} correct, {} partial, {} wrong (accuracy {:.3})",
            value["partial"], value["wrong"], ratio(correct)
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_root_error() {
        let wrapped = Error::Stage {
            stage: "distill",
            source: Box::new(Error::TeacherTransport {
                attempts: 3,
                message: "503".into(),
            }),
        };
        assert_eq!(exit_code(&anyhow::Error::new(wrapped)), 4);
        let integrity = Error::Integrity {
            message: "unknown team".into(),
            ids: vec![],
        };
        assert_eq!(exit_code(&anyhow::Error::new(integrity).context("loading")), 3);
        assert_eq!(exit_code(&anyhow::Error::new(Error::Domain("x".into()))), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("boom")), 5);
    }

    #[test]
    fn sidecar_sits_next_to_corpus() {
        assert_eq!(sidecar_path(Path::new("out/corpus.jsonl")), Path::new("out/corpus.manifest.json"));
    }
}
