//! The 6×4 pitch grid.
//!
//! Coordinates are percentages measured from the top-left corner of the
//! field, `x` along the attacking direction and `y` downwards. Columns run
//! 0..=5 from the defending end; rows 0..=3 from the top touchline. Cells are
//! half-open `[lo, hi)` except the last column/row, which also owns 100.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EventType;

pub const COLS: u8 = 6;
pub const ROWS: u8 = 4;
pub const REGION_COUNT: usize = (COLS as usize) * (ROWS as usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Region {
    col: u8,
    row: u8,
}

impl Region {
    pub fn new(col: u8, row: u8) -> Result<Region> {
        if col >= COLS || row >= ROWS {
            return Err(Error::domain(format!(
                "region ({col}, {row}) outside the {COLS}x{ROWS} grid"
            )));
        }
        Ok(Region { col, row })
    }

    pub fn col(self) -> u8 {
        self.col
    }

    pub fn row(self) -> u8 {
        self.row
    }

    /// Row-major index in `0..24`.
    pub fn index(self) -> usize {
        self.row as usize * COLS as usize + self.col as usize
    }

    pub fn from_index(index: usize) -> Option<Region> {
        (index < REGION_COUNT).then(|| Region {
            col: (index % COLS as usize) as u8,
            row: (index / COLS as usize) as u8,
        })
    }

    pub fn all() -> impl Iterator<Item = Region> {
        (0..REGION_COUNT).filter_map(Region::from_index)
    }
}

/// Corpus form: `[region C , R]`.
impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[region {} , {}]", self.col, self.row)
    }
}

fn cell(pct: f64, cells: u8, axis: &str) -> Result<u8> {
    if !pct.is_finite() || !(0.0..=100.0).contains(&pct) {
        return Err(Error::domain(format!(
            "{axis} coordinate {pct} outside [0, 100]"
        )));
    }
    // Cell c is [b(c), b(c+1)) with b(c) the f64 nearest 100c/cells. The
    // floor estimate can be one off next to a boundary that f64 cannot
    // represent, so it is corrected against the boundaries themselves.
    let bound = |c: u8| f64::from(c) * 100.0 / f64::from(cells);
    let mut idx = ((pct * f64::from(cells) / 100.0).floor() as u8).min(cells - 1);
    if pct < bound(idx) {
        idx -= 1;
    } else if idx + 1 < cells && pct >= bound(idx + 1) {
        idx += 1;
    }
    Ok(idx)
}

/// Map a percentage coordinate to its grid cell.
pub fn locate(x_pct: f64, y_pct: f64) -> Result<Region> {
    Ok(Region {
        col: cell(x_pct, COLS, "x")?,
        row: cell(y_pct, ROWS, "y")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorKind {
    Source,
    Destination,
}

impl AnchorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnchorKind::Source => "source",
            AnchorKind::Destination => "destination",
        }
    }
}

/// Which end of a two-ended event locates it. Passes are placed where they
/// arrive; every other tracked type where it started.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnchorTable(BTreeMap<EventType, AnchorKind>);

impl Default for AnchorTable {
    fn default() -> Self {
        AnchorTable(
            EventType::ALL
                .into_iter()
                .map(|t| (t, default_anchor(t)))
                .collect(),
        )
    }
}

impl AnchorTable {
    /// Default table with some entries replaced.
    pub fn with_overrides(overrides: impl IntoIterator<Item = (EventType, AnchorKind)>) -> Self {
        let mut table = AnchorTable::default();
        table.0.extend(overrides);
        table
    }

    pub fn anchor_for(&self, event_type: EventType) -> AnchorKind {
        // Deserialized tables may be partial; fall back to the default entry.
        self.0
            .get(&event_type)
            .copied()
            .unwrap_or_else(|| default_anchor(event_type))
    }

    pub fn anchor_for_name(&self, name: &str) -> Result<AnchorKind> {
        let event_type = EventType::from_name(name)
            .ok_or_else(|| Error::domain(format!("unknown event type {name:?}")))?;
        Ok(self.anchor_for(event_type))
    }
}

fn default_anchor(event_type: EventType) -> AnchorKind {
    match event_type {
        EventType::SimplePass | EventType::HighPass | EventType::HeadPass => {
            AnchorKind::Destination
        }
        _ => AnchorKind::Source,
    }
}

/// Anchor of `event_type` under the default table.
pub fn anchor_for(event_type: EventType) -> AnchorKind {
    default_anchor(event_type)
}

/// The two optional ends of an event plus what is needed to place it.
pub trait Located {
    fn event_id(&self) -> u64;
    fn event_type(&self) -> EventType;
    fn source_xy(&self) -> Option<(f64, f64)>;
    fn dest_xy(&self) -> Option<(f64, f64)>;
}

/// Region of an event under `table`: `locate` applied to the anchored end.
pub fn event_region_with(table: &AnchorTable, event: &impl Located) -> Result<Region> {
    let anchor = table.anchor_for(event.event_type());
    let xy = match anchor {
        AnchorKind::Source => event.source_xy(),
        AnchorKind::Destination => event.dest_xy(),
    };
    let (x, y) = xy.ok_or(Error::MissingCoordinate {
        event_id: event.event_id(),
        anchor: anchor.as_str(),
    })?;
    locate(x, y)
}

pub fn event_region(event: &impl Located) -> Result<Region> {
    event_region_with(&AnchorTable::default(), event)
}

const LANE_DESCRIPTIONS: [[&str; COLS as usize]; ROWS as usize] = [
    [
        "Defensive third, near the left corner flag",
        "Defensive center, left wing",
        "center, left wing",
        "center, left",
        "Offensive center, left wing",
        "Offensive third, left win",
    ],
    [
        "Defensive third, left side of the box",
        "Defensive center, left half-space",
        "center, left half-space",
        "center, left of the middle",
        "Offensive center, left half-space",
        "Offensive third, left side of the box",
    ],
    [
        "Defensive third, right side of the box",
        "Defensive center, right half-space",
        "center, right half-space",
        "center, right of the middle",
        "Offensive center, right half-space",
        "Offensive third, right side of the box",
    ],
    [
        "Defensive third, near the right corner flag",
        "Defensive center, right wing",
        "center, right wing",
        "center, right",
        "Offensive center, right wing",
        "Offensive third, right wing",
    ],
];

/// Verbal description of a cell as given to the teacher model.
pub fn describe(region: Region) -> &'static str {
    LANE_DESCRIPTIONS[region.row as usize][region.col as usize]
}

/// `Region C, R: description.` for every cell, row by row.
pub fn region_legend() -> String {
    Region::all()
        .map(|r| format!("Region {}, {}: {}.", r.col, r.row, describe(r)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    struct Ev {
        t: EventType,
        src: Option<(f64, f64)>,
        dst: Option<(f64, f64)>,
    }

    impl Located for Ev {
        fn event_id(&self) -> u64 {
            7
        }
        fn event_type(&self) -> EventType {
            self.t
        }
        fn source_xy(&self) -> Option<(f64, f64)> {
            self.src
        }
        fn dest_xy(&self) -> Option<(f64, f64)> {
            self.dst
        }
    }

    #[test]
    fn locate_examples() {
        assert_eq!(locate(0.0, 0.0).unwrap(), Region::new(0, 0).unwrap());
        assert_eq!(locate(100.0, 100.0).unwrap(), Region::new(5, 3).unwrap());
        assert_eq!(locate(50.0, 50.0).unwrap(), Region::new(3, 2).unwrap());
    }

    #[test]
    fn locate_matches_boundary_scan() {
        // Reference: walk the cell edges 100*i/n and count how many are <= x.
        let slow = |v: f64, n: u32| -> u8 {
            let mut idx = 0;
            for i in 1..n {
                if v >= 100.0 * f64::from(i) / f64::from(n) {
                    idx = i;
                }
            }
            idx as u8
        };
        for step in 0..=1000 {
            let v = f64::from(step) / 10.0;
            let r = locate(v, v).unwrap();
            assert_eq!(r.col(), slow(v, 6), "x = {v}");
            assert_eq!(r.row(), slow(v, 4), "y = {v}");
        }
    }

    #[test]
    fn locate_rejects_out_of_range() {
        assert!(locate(-0.1, 10.0).is_err());
        assert!(locate(10.0, 100.5).is_err());
        assert!(locate(f64::NAN, 10.0).is_err());
    }

    #[test]
    fn anchors() {
        assert_eq!(anchor_for(EventType::SimplePass), AnchorKind::Destination);
        assert_eq!(anchor_for(EventType::GroundLooseBallDuel), AnchorKind::Source);
        assert_eq!(anchor_for(EventType::Shot), AnchorKind::Source);
        let table = AnchorTable::default();
        assert!(table.anchor_for_name("Foul").is_err());
        let flipped = AnchorTable::with_overrides([(EventType::Shot, AnchorKind::Destination)]);
        assert_eq!(flipped.anchor_for(EventType::Shot), AnchorKind::Destination);
    }

    #[test]
    fn event_region_examples() {
        let pass = Ev {
            t: EventType::SimplePass,
            src: Some((10.0, 10.0)),
            dst: Some((90.0, 40.0)),
        };
        assert_eq!(event_region(&pass).unwrap(), Region::new(5, 1).unwrap());
        let duel = Ev {
            t: EventType::AirDuel,
            src: Some((10.0, 10.0)),
            dst: None,
        };
        assert_eq!(event_region(&duel).unwrap(), Region::new(0, 0).unwrap());
        let src_only = Ev {
            t: EventType::SimplePass,
            src: Some((10.0, 10.0)),
            dst: None,
        };
        assert!(matches!(
            event_region(&src_only),
            Err(Error::MissingCoordinate { .. })
        ));
    }

    #[test]
    fn descriptions() {
        assert_eq!(
            describe(Region::new(0, 0).unwrap()),
            "Defensive third, near the left corner flag"
        );
        assert_eq!(describe(Region::new(1, 0).unwrap()), "Defensive center, left wing");
        assert!(describe(Region::new(5, 3).unwrap()).starts_with("Offensive third, right"));
        let distinct: HashSet<_> = Region::all().map(describe).collect();
        assert_eq!(distinct.len(), REGION_COUNT);
        assert!(region_legend().starts_with("Region 0, 0: Defensive third, near the left corner flag. Region 1, 0:"));
    }

    #[test]
    fn display_form() {
        assert_eq!(Region::new(5, 3).unwrap().to_string(), "[region 5 , 3]");
        assert!(Region::new(6, 0).is_err());
        assert!(Region::new(0, 4).is_err());
    }
}
