//! TSPLIB instance files and distance functions.
//!
//! Only node-coordinate instances are handled (`NODE_COORD_SECTION`).
//! Supported edge-weight types are `EUC_2D`, `GEO` and `ATT`; on top of
//! those, [`Metric::RawEuc`] evaluates plain unrounded Euclidean distance on
//! the file coordinates and is usable with any instance.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::tour::DistanceMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based line number, when the problem can be pinned to one line.
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "parse error at line {line}: {}", self.message),
            None => write!(f, "parse error: {}", self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Metric {
    /// TSPLIB `EUC_2D`: Euclidean distance rounded to the nearest integer.
    Euc2d,
    /// TSPLIB `GEO`: great-circle distance on the idealized earth, in km.
    Geo,
    /// TSPLIB `ATT`: pseudo-Euclidean distance.
    Att,
    /// Unrounded Euclidean distance on the raw coordinates.
    RawEuc,
}

impl Metric {
    /// The keyword used in TSPLIB headers (`RAW_EUC` is not a TSPLIB type).
    pub fn keyword(self) -> &'static str {
        match self {
            Metric::Euc2d => "EUC_2D",
            Metric::Geo => "GEO",
            Metric::Att => "ATT",
            Metric::RawEuc => "RAW_EUC",
        }
    }

    fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "EUC_2D" => Some(Metric::Euc2d),
            "GEO" => Some(Metric::Geo),
            "ATT" => Some(Metric::Att),
            _ => None,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Metric {
    type Err = String;

    /// Accepts the CLI spellings (`raw`, `euc2d`, `geo`, `att`) as well as
    /// the header keywords.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "raw" | "raw_euc" => Ok(Metric::RawEuc),
            "euc2d" | "euc_2d" => Ok(Metric::Euc2d),
            "geo" => Ok(Metric::Geo),
            "att" => Ok(Metric::Att),
            other => Err(format!("unknown metric `{other}` (expected raw, euc2d, geo or att)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeCoord {
    /// 1-based, remapped to file order.
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    pub name: String,
    pub coords: Vec<NodeCoord>,
    pub declared_metric: Metric,
    pub active_metric: Metric,
}

impl TspInstance {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_instance(&text)
    }

    /// Switches the metric used for distances. `RAW_EUC` always applies; a
    /// TSPLIB metric must agree with the header of the file.
    pub fn with_metric(mut self, metric: Metric) -> Result<Self> {
        if metric != Metric::RawEuc && metric != self.declared_metric {
            return Err(Error::MetricMismatch {
                requested: metric.to_string(),
                declared: self.declared_metric.to_string(),
            });
        }
        self.active_metric = metric;
        Ok(self)
    }

    /// Serializes back to TSPLIB text. Coordinates use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("NAME : {}\n", self.name));
        out.push_str("TYPE : TSP\n");
        out.push_str(&format!("DIMENSION : {}\n", self.n()));
        out.push_str(&format!("EDGE_WEIGHT_TYPE : {}\n", self.declared_metric));
        out.push_str("NODE_COORD_SECTION\n");
        for c in &self.coords {
            out.push_str(&format!("{} {:?} {:?}\n", c.id, c.x, c.y));
        }
        out.push_str("EOF\n");
        out
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        build_distance_matrix(self)
    }
}

/// Parses a TSPLIB coordinate instance. The active metric defaults to
/// [`Metric::RawEuc`]; use [`TspInstance::with_metric`] to switch to the
/// declared TSPLIB metric.
pub fn parse_instance(text: &str) -> Result<TspInstance> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut declared: Option<Metric> = None;
    let mut coords: Vec<NodeCoord> = Vec::new();
    let mut seen_ids = std::collections::HashSet::new();
    let mut in_coords = false;
    let mut section_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }

        if in_coords {
            let first = line.split_whitespace().next().unwrap_or_default();
            if first.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                // Another section follows (e.g. DISPLAY_DATA_SECTION); coordinates end here.
                in_coords = false;
            } else {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(ParseError::at(
                        line_no,
                        format!("expected `id x y`, found {} fields", fields.len()),
                    )
                    .into());
                }
                let id: i64 = fields[0]
                    .parse()
                    .map_err(|_| ParseError::at(line_no, format!("bad node id `{}`", fields[0])))?;
                if !seen_ids.insert(id) {
                    return Err(ParseError::at(line_no, format!("duplicate node id {id}")).into());
                }
                let coord = |s: &str| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| ParseError::at(line_no, format!("bad coordinate `{s}`")))
                };
                let x = coord(fields[1])?;
                let y = coord(fields[2])?;
                coords.push(NodeCoord { id: coords.len() + 1, x, y });
                if let Some(n) = dimension {
                    if coords.len() > n {
                        return Err(ParseError::at(
                            line_no,
                            format!("more coordinates than DIMENSION {n}"),
                        )
                        .into());
                    }
                }
                continue;
            }
        }

        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (line, ""),
        };
        match key {
            "NAME" => name = value.to_string(),
            "TYPE" => {
                if value != "TSP" {
                    return Err(ParseError::at(
                        line_no,
                        format!("unsupported TYPE `{value}` (only symmetric TSP)"),
                    )
                    .into());
                }
            }
            "DIMENSION" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| ParseError::at(line_no, format!("bad DIMENSION `{value}`")))?;
                if n < 3 {
                    return Err(
                        ParseError::at(line_no, format!("DIMENSION {n} is below 3")).into()
                    );
                }
                dimension = Some(n);
            }
            "EDGE_WEIGHT_TYPE" => {
                declared = Some(Metric::from_keyword(value).ok_or_else(|| {
                    ParseError::at(line_no, format!("unsupported EDGE_WEIGHT_TYPE `{value}`"))
                })?);
            }
            "NODE_COORD_SECTION" => {
                in_coords = true;
                section_line = line_no;
            }
            _ => {}
        }
    }

    let n = dimension.ok_or_else(|| ParseError::global("missing DIMENSION"))?;
    let declared = declared.ok_or_else(|| ParseError::global("missing EDGE_WEIGHT_TYPE"))?;
    if section_line == 0 {
        return Err(ParseError::global("missing NODE_COORD_SECTION").into());
    }
    if coords.len() != n {
        return Err(ParseError::at(
            section_line,
            format!("DIMENSION is {n} but NODE_COORD_SECTION has {} rows", coords.len()),
        )
        .into());
    }

    Ok(TspInstance { name, coords, declared_metric: declared, active_metric: Metric::RawEuc })
}

/// TSPLIB `nint`.
fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Latitude/longitude in radians from TSPLIB's DDD.MM encoding.
fn geo_radians(v: f64) -> f64 {
    // TSPLIB truncates pi; using the exact value changes rounded distances.
    #[allow(clippy::approx_constant)]
    const PI: f64 = 3.141592;
    let deg = v.trunc();
    let min = v - deg;
    PI * (deg + 5.0 * min / 3.0) / 180.0
}

pub fn distance(metric: Metric, a: &NodeCoord, b: &NodeCoord) -> f64 {
    if a.x == b.x && a.y == b.y {
        return 0.0;
    }
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    match metric {
        Metric::RawEuc => (dx * dx + dy * dy).sqrt(),
        Metric::Euc2d => nint((dx * dx + dy * dy).sqrt()),
        Metric::Att => {
            let r = ((dx * dx + dy * dy) / 10.0).sqrt();
            let t = nint(r);
            if t < r {
                t + 1.0
            } else {
                t
            }
        }
        Metric::Geo => {
            const RRR: f64 = 6378.388;
            let (lat_a, lon_a) = (geo_radians(a.x), geo_radians(a.y));
            let (lat_b, lon_b) = (geo_radians(b.x), geo_radians(b.y));
            let q1 = (lon_a - lon_b).cos();
            let q2 = (lat_a - lat_b).cos();
            let q3 = (lat_a + lat_b).cos();
            (RRR * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0).trunc()
        }
    }
}

pub fn build_distance_matrix(instance: &TspInstance) -> DistanceMatrix {
    let metric = instance.active_metric;
    let coords = &instance.coords;
    DistanceMatrix::from_fn(coords.len(), |i, j| distance(metric, &coords[i], &coords[j]))
}
