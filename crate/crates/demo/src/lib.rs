//! Browser demo: pitch-grid lookup, per-team event heatmaps on a synthetic
//! league, and the adapter loss curve. Each operation returns a JSON string;
//! the `wasm_bindgen` wrappers only convert errors.

use footcorpus::fixture::{fixture_gen_with, team_name, FixtureOptions};
use footcorpus::lora::{run_demo, DemoConfig};
use footcorpus::model::EventType;
use footcorpus::pitch_grid::{describe, locate, Region, COLS, ROWS};
use footcorpus::stats::event_decomposition;
use footcorpus::tables::build_tables;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest league the page will generate.
pub const MAX_TEAMS: usize = 20;
pub const MAX_STEPS: usize = 2000;

/// Cell under a pitch coordinate, with its verbal description.
pub fn locate_json(x_pct: f64, y_pct: f64) -> Result<String, String> {
    let r = locate(x_pct, y_pct).map_err(|e| e.to_string())?;
    Ok(json!({
        "col": r.col(),
        "row": r.row(),
        "index": r.index(),
        "label": r.to_string(),
        "description": describe(r),
    })
    .to_string())
}

/// Grid shape, every cell's description, and the tracked event types.
pub fn legend_json() -> String {
    let cells: Vec<Value> = Region::all()
        .map(|r| json!({ "col": r.col(), "row": r.row(), "description": describe(r) }))
        .collect();
    let events: Vec<&str> = EventType::ALL.iter().map(|e| e.name()).collect();
    json!({ "cols": COLS, "rows": ROWS, "cells": cells, "event_types": events }).to_string()
}

/// Event counts per cell for one team of a seeded synthetic league, over
/// every gameweek.
pub fn heatmap_json(n_teams: usize, n_gameweeks: usize, seed: u64, team: usize, event: &str) -> Result<String, String> {
    if n_teams > MAX_TEAMS {
        return Err(format!("at most {MAX_TEAMS} teams"));
    }
    if team >= n_teams {
        return Err(format!("team index {team} outside 0..{n_teams}"));
    }
    let et: EventType = event.parse().map_err(|e: footcorpus::Error| e.to_string())?;
    let err = |e: footcorpus::Error| e.to_string();
    let ds = fixture_gen_with(n_teams, n_gameweeks, seed, &FixtureOptions::sparse())
        .map_err(err)?
        .parse()
        .map_err(err)?;
    let tables = build_tables(&ds).map_err(err)?;
    let name = team_name(team);
    let info = tables
        .team_by_name(&name)
        .ok_or_else(|| format!("team {name} not in the league"))?;
    let last = tables.last_gameweek();
    let d = event_decomposition(&tables, info.team_id, 1..=last, et, false).map_err(err)?;
    let teams: Vec<String> = (0..n_teams).map(team_name).collect();
    Ok(json!({
        "team": name,
        "teams": teams,
        "event": et.name(),
        "gameweeks": last,
        "matches": d.matches,
        "total": d.total_count,
        "counts": d.counts,
        "top5": d.top5.iter().map(|s| json!({ "label": s.region.to_string(), "index": s.region.index(), "pct": s.pct })).collect::<Vec<_>>(),
        "shares_text": d.shares_text(),
    })
    .to_string())
}

/// Loss curve and invariant checks of the adapter toy problem.
pub fn lora_json(d: usize, k: usize, r: usize, steps: usize, seed: u64, lr: f64) -> Result<String, String> {
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps"));
    }
    let report = run_demo(&DemoConfig { d, k, r, steps, seed, lr }).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = locateRegion)]
pub fn locate_region(x_pct: f64, y_pct: f64) -> Result<String, JsError> {
    js(locate_json(x_pct, y_pct))
}

#[wasm_bindgen]
pub fn legend() -> String {
    legend_json()
}

#[wasm_bindgen]
pub fn heatmap(n_teams: usize, n_gameweeks: usize, seed: u64, team: usize, event: &str) -> Result<String, JsError> {
    js(heatmap_json(n_teams, n_gameweeks, seed, team, event))
}

#[wasm_bindgen(js_name = loraCurve)]
pub fn lora_curve(d: usize, k: usize, r: usize, steps: usize, seed: u64, lr: f64) -> Result<String, JsError> {
    js(lora_json(d, k, r, steps, seed, lr))
}
