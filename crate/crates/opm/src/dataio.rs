//! Serialization and ingestion: the CSV dataset format, decimal-to-grid
//! scaling, grid coarsening, categorical codebooks, ground-truth tables, and
//! the JSON result document.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::Truth;
use crate::error::{Error, Result};
use crate::metrics::{Assignment, MetricsReport};
use crate::model::{Coord, Dataset, Rat};

/// Formats a grid coordinate as the decimal it represents at the given scale
/// (digits after the point).
pub fn format_coord(c: Coord, scale: u32) -> String {
    if scale == 0 {
        return c.to_string();
    }
    let base = 10i64.pow(scale);
    let sign = if c < 0 { "-" } else { "" };
    let abs = (c as i128).unsigned_abs();
    let base = base as u128;
    format!(
        "{sign}{}.{:0width$}",
        abs / base,
        abs % base,
        width = scale as usize
    )
}

/// Parses a decimal coordinate onto the integer grid, flooring (toward
/// negative infinity) any digits beyond the scale.
pub fn parse_coord(s: &str, scale: u32) -> std::result::Result<Coord, String> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(format!("empty coordinate {s:?}"));
    }
    let (ipart, fpart) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if ipart.is_empty() && fpart.is_empty() {
        return Err(format!("malformed coordinate {s:?}"));
    }
    if !ipart.chars().all(|c| c.is_ascii_digit()) || !fpart.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("malformed coordinate {s:?}"));
    }
    let mut mag: i128 = if ipart.is_empty() {
        0
    } else {
        ipart.parse::<i128>().map_err(|e| e.to_string())?
    };
    let mut kept = String::from(fpart);
    let dropped;
    if kept.len() > scale as usize {
        dropped = kept.split_off(scale as usize);
    } else {
        dropped = String::new();
    }
    while kept.len() < scale as usize {
        kept.push('0');
    }
    for ch in kept.chars() {
        mag = mag * 10 + (ch as u8 - b'0') as i128;
    }
    let mut val = if neg { -mag } else { mag };
    if neg && dropped.chars().any(|c| c != '0') {
        val -= 1; // floor, not truncate
    }
    Coord::try_from(val).map_err(|_| format!("coordinate {s:?} out of range at scale {scale}"))
}

/// Writes a dataset as CSV `c1,...,cd,count`, coordinates rendered at the
/// dataset's scale.
pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=ds.dim()).map(|i| format!("c{i}")).collect();
    header.push("count".into());
    w.write_record(&header)?;
    for pt in ds.points() {
        let mut row: Vec<String> = pt
            .coords
            .iter()
            .map(|&c| format_coord(c, ds.scale()))
            .collect();
        row.push(pt.raw_count.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a CSV dataset, scaling decimal coordinates onto the integer grid.
/// Duplicate coordinate rows are an error unless `merge` is set.
pub fn load_dataset(path: &Path, scale: u32, merge: bool) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() < 2 || header.get(header.len() - 1) != Some("count") {
        return Err(Error::Parse {
            line: 1,
            msg: "header must be c1,...,cd,count".into(),
        });
    }
    let dim = header.len() - 1;
    let mut rows: Vec<(Vec<Coord>, u64)> = Vec::new();
    let mut seen: BTreeMap<Vec<Coord>, usize> = BTreeMap::new();
    for (idx, rec) in r.records().enumerate() {
        let line = idx + 2; // header is line 1
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, got {}", dim + 1, rec.len()),
            });
        }
        let mut coords = Vec::with_capacity(dim);
        for a in 0..dim {
            coords.push(parse_coord(&rec[a], scale).map_err(|msg| Error::Parse { line, msg })?);
        }
        let count_str = rec[dim].trim();
        if count_str.starts_with('-') {
            return Err(Error::Validation(format!(
                "negative count at line {line}: {count_str}"
            )));
        }
        let count: u64 = count_str.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad count {count_str:?}"),
        })?;
        if let Some(prev) = seen.insert(coords.clone(), line) {
            if !merge {
                return Err(Error::Validation(format!(
                    "duplicate coordinates at line {line} (first at line {prev}); pass the merge flag to sum counts"
                )));
            }
        }
        rows.push((coords, count));
    }
    Dataset::from_raw(dim, rows, scale)
}

/// Coarsens a dataset so only `digits` decimal digits remain significant:
/// coordinates are floored to the 10^(scale - digits) grid and colliding
/// points merged. Identity when digits >= scale.
pub fn discretize(ds: &Dataset, digits: u32) -> Dataset {
    if digits >= ds.scale() {
        return ds.clone();
    }
    let step = 10i64.pow(ds.scale() - digits);
    let rows = ds
        .points()
        .iter()
        .map(|pt| {
            (
                pt.coords.iter().map(|&c| c.div_euclid(step) * step).collect(),
                pt.raw_count,
            )
        })
        .collect();
    Dataset::from_raw(ds.dim(), rows, ds.scale()).expect("coarsening keeps records")
}

/// Stable mapping from category labels to grid codes, assigned in sorted
/// label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    labels: Vec<String>,
}

impl Codebook {
    pub fn from_labels<I: IntoIterator<Item = String>>(labels: I) -> Codebook {
        let mut labels: Vec<String> = labels.into_iter().collect();
        labels.sort();
        labels.dedup();
        Codebook { labels }
    }

    pub fn code(&self, label: &str) -> Option<Coord> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| i as Coord)
    }

    pub fn label(&self, code: Coord) -> Option<&str> {
        usize::try_from(code)
            .ok()
            .and_then(|i| self.labels.get(i))
            .map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["category", "code"])?;
        for (i, l) in self.labels.iter().enumerate() {
            w.write_record([l.as_str(), &i.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Codebook> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        let mut labels = Vec::new();
        for (idx, rec) in r.records().enumerate() {
            let rec = rec?;
            let code: usize = rec
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: idx + 2,
                    msg: "bad code".into(),
                })?;
            if code != idx {
                return Err(Error::Validation(format!(
                    "codebook codes must be dense and sorted; got {code} at row {idx}"
                )));
            }
            labels.push(rec[0].to_string());
        }
        Ok(Codebook { labels })
    }
}

/// Writes the truth map as CSV: target coordinates, then true coordinates.
pub fn save_truth(truth: &Truth, dim: usize, scale: u32, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=dim).map(|i| format!("c{i}")).collect();
    header.extend((1..=dim).map(|i| format!("t{i}")));
    w.write_record(&header)?;
    for (qc, pc) in &truth.map {
        let row: Vec<String> = qc
            .iter()
            .chain(pc.iter())
            .map(|&c| format_coord(c, scale))
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_truth(path: &Path, dim: usize, scale: u32) -> Result<Truth> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut map = BTreeMap::new();
    for (idx, rec) in r.records().enumerate() {
        let line = idx + 2;
        let rec = rec?;
        if rec.len() != 2 * dim {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, got {}", 2 * dim, rec.len()),
            });
        }
        let parse = |range: std::ops::Range<usize>| -> Result<Vec<Coord>> {
            range
                .map(|a| parse_coord(&rec[a], scale).map_err(|msg| Error::Parse { line, msg }))
                .collect()
        };
        map.insert(parse(0..dim)?, parse(dim..2 * dim)?);
    }
    Ok(Truth { map })
}

fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact metric values rendered as `numer/denom` strings.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MetricsJson {
    pub point_recovery: String,
    pub record_recovery: String,
    pub normalized_point_recovery: Option<String>,
    pub normalized_record_recovery: Option<String>,
    pub normalized_objective: Option<String>,
    pub overlap_ratio_2d: String,
    pub overlap_ratio_per_axis: Vec<String>,
    pub hellinger: f64,
}

impl From<&MetricsReport> for MetricsJson {
    fn from(m: &MetricsReport) -> MetricsJson {
        MetricsJson {
            point_recovery: rat_str(&m.point_recovery),
            record_recovery: rat_str(&m.record_recovery),
            normalized_point_recovery: m.normalized_point_recovery.as_ref().map(rat_str),
            normalized_record_recovery: m.normalized_record_recovery.as_ref().map(rat_str),
            normalized_objective: m.normalized_objective.as_ref().map(rat_str),
            overlap_ratio_2d: rat_str(&m.overlap_ratio_2d),
            overlap_ratio_per_axis: m.overlap_ratio_per_axis.iter().map(rat_str).collect(),
            hellinger: m.hellinger,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AssignmentEntry {
    pub target: Vec<String>,
    pub assigned: Option<Vec<String>>,
}

/// The attack result document. Everything except `runtime_seconds` is a pure
/// function of (inputs, seed), so two runs differ only in that field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResultFile {
    pub algorithm: String,
    pub weight_kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub assignment: Vec<AssignmentEntry>,
    pub metrics: MetricsJson,
    pub runtime_seconds: f64,
}

impl ResultFile {
    pub fn new(
        algorithm: &str,
        weight_kind: &str,
        kappa: Option<&Rat>,
        seed: Option<u64>,
        assignment: &Assignment,
        q: &Dataset,
        metrics: &MetricsReport,
    ) -> ResultFile {
        let entries = q
            .points()
            .iter()
            .zip(assignment)
            .map(|(pt, a)| AssignmentEntry {
                target: pt.coords.iter().map(|&c| format_coord(c, q.scale())).collect(),
                assigned: a.as_ref().map(|coords| {
                    coords.iter().map(|&c| format_coord(c, q.scale())).collect()
                }),
            })
            .collect();
        ResultFile {
            algorithm: algorithm.to_string(),
            weight_kind: weight_kind.to_string(),
            kappa: kappa.map(rat_str),
            seed,
            assignment: entries,
            metrics: metrics.into(),
            runtime_seconds: metrics.runtime_seconds,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(serde_json::to_string_pretty(self)?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ResultFile> {
        let mut s = String::new();
        std::fs::File::open(path)?.read_to_string(&mut s)?;
        Ok(serde_json::from_str(&s)?)
    }
}
