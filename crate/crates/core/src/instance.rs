//! Euclidean TSP instances in the unit square, tours, and instance files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn in_unit_square(&self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

pub fn distance(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    cities: Vec<Point>,
    id: Option<String>,
}

impl TspInstance {
    pub const MIN_CITIES: usize = 3;

    pub fn new(cities: Vec<Point>) -> Result<Self> {
        if cities.len() < Self::MIN_CITIES {
            return Err(Error::InvalidInstance(format!(
                "need at least {} cities, got {}",
                Self::MIN_CITIES,
                cities.len()
            )));
        }
        if let Some((i, p)) = cities.iter().enumerate().find(|(_, p)| !p.in_unit_square()) {
            return Err(Error::InvalidInstance(format!(
                "city {i} at ({}, {}) lies outside [0,1]^2",
                p.x, p.y
            )));
        }
        Ok(Self { cities, id: None })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.cities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    pub fn cities(&self) -> &[Point] {
        &self.cities
    }

    pub fn city(&self, i: usize) -> Point {
        self.cities[i]
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn set_id(&mut self, id: Option<String>) {
        self.id = id;
    }

    /// Replace one city; the new point must stay inside the unit square.
    pub(crate) fn with_city(&self, i: usize, p: Point) -> Self {
        debug_assert!(p.in_unit_square());
        let mut cities = self.cities.clone();
        cities[i] = p;
        Self {
            cities,
            id: self.id.clone(),
        }
    }

    /// Row-major n x n Euclidean distance matrix.
    pub fn distance_matrix(&self) -> Vec<f64> {
        let n = self.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = distance(self.cities[i], self.cities[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        d
    }
}

/// A Hamiltonian cycle as a permutation of city indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &c in &order {
            if c >= order.len() || seen[c] {
                return Err(Error::InvalidTour(format!(
                    "{order:?} is not a permutation of 0..{}",
                    order.len()
                )));
            }
            seen[c] = true;
        }
        Ok(Self(order))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub(crate) fn from_unchecked(order: Vec<usize>) -> Self {
        Self(order)
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Tour::new(v)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.0
    }
}

pub fn tour_length(inst: &TspInstance, tour: &Tour) -> Result<f64> {
    if tour.len() != inst.len() {
        return Err(Error::InvalidTour(format!(
            "tour visits {} cities, instance has {}",
            tour.len(),
            inst.len()
        )));
    }
    Ok(cycle_length(inst.cities(), tour.order()))
}

pub(crate) fn cycle_length(cities: &[Point], order: &[usize]) -> f64 {
    let n = order.len();
    let mut total = distance(cities[order[n - 1]], cities[order[0]]);
    for w in order.windows(2) {
        total += distance(cities[w[0]], cities[w[1]]);
    }
    total
}

/// `n` cities drawn i.i.d. uniformly from the unit square.
pub fn random_instance(n: usize, rng: &mut RandomSource) -> Result<TspInstance> {
    if n < TspInstance::MIN_CITIES {
        return Err(Error::InvalidInstance(format!(
            "need at least 3 cities, got {n}"
        )));
    }
    let cities = (0..n)
        .map(|_| {
            let x = rng.uniform();
            let y = rng.uniform();
            Point::new(x, y)
        })
        .collect();
    TspInstance::new(cities)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    cities: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
}

pub fn to_json(inst: &TspInstance) -> String {
    let file = InstanceFile {
        n: inst.len(),
        cities: inst.cities.iter().map(|p| [p.x, p.y]).collect(),
        id: inst.id.clone(),
    };
    serde_json::to_string(&file).expect("instance serialization cannot fail")
}

pub fn from_json(text: &str, source_name: &str) -> Result<TspInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            source_name,
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if file.n != file.cities.len() {
        return Err(Error::parse(
            source_name,
            "field \"n\"",
            format!("n = {} but {} cities listed", file.n, file.cities.len()),
        ));
    }
    let inst = TspInstance::new(file.cities.iter().map(|c| Point::new(c[0], c[1])).collect())?;
    Ok(TspInstance {
        id: file.id,
        ..inst
    })
}

/// Writes the native JSON format (shortest round-trip decimals).
pub fn write_instance(inst: &TspInstance, path: &Path) -> Result<()> {
    crate::io_util::write_atomic(path, to_json(inst).as_bytes())
}

/// Reads a native JSON instance, or a TSPLIB EUC_2D file when the extension is
/// `.tsp`.
pub fn read_instance(path: &Path) -> Result<TspInstance> {
    let text = fs::read_to_string(path)?;
    let name = path.display().to_string();
    let mut inst = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("tsp"))
    {
        parse_tsplib(&text, &name)?
    } else {
        from_json(&text, &name)?
    };
    if inst.id.is_none() {
        inst.id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    Ok(inst)
}

/// Parses the EUC_2D subset of TSPLIB and maps the coordinates affinely into
/// the unit square, preserving aspect ratio.
pub fn parse_tsplib(text: &str, source_name: &str) -> Result<TspInstance> {
    let mut name = None;
    let mut dimension = None;
    let mut raw: Vec<(f64, f64)> = Vec::new();
    let mut in_coords = false;

    for (lineno, line) in text.lines().enumerate() {
        let loc = || format!("line {}", lineno + 1);
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_coords {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    source_name,
                    loc(),
                    format!("expected `index x y`, got {line:?}"),
                ));
            }
            let x: f64 = fields[1].parse().map_err(|_| {
                Error::parse(
                    source_name,
                    loc(),
                    format!("bad x coordinate {:?}", fields[1]),
                )
            })?;
            let y: f64 = fields[2].parse().map_err(|_| {
                Error::parse(
                    source_name,
                    loc(),
                    format!("bad y coordinate {:?}", fields[2]),
                )
            })?;
            raw.push((x, y));
            continue;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            in_coords = true;
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(Error::parse(
                source_name,
                loc(),
                format!("expected `KEY : VALUE`, got {line:?}"),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "NAME" => name = Some(value.to_string()),
            "DIMENSION" => {
                dimension = Some(value.parse::<usize>().map_err(|_| {
                    Error::parse(source_name, loc(), format!("bad DIMENSION {value:?}"))
                })?)
            }
            "EDGE_WEIGHT_TYPE" if value != "EUC_2D" => {
                return Err(Error::parse(
                    source_name,
                    loc(),
                    format!("only EUC_2D is supported, got {value}"),
                ));
            }
            _ => {}
        }
    }

    let dimension =
        dimension.ok_or_else(|| Error::parse(source_name, "header", "missing DIMENSION"))?;
    if !in_coords {
        return Err(Error::parse(
            source_name,
            "body",
            "missing NODE_COORD_SECTION",
        ));
    }
    if raw.len() != dimension {
        return Err(Error::parse(
            source_name,
            "NODE_COORD_SECTION",
            format!(
                "DIMENSION is {dimension} but {} coordinates were read",
                raw.len()
            ),
        ));
    }

    let (min_x, max_x) = min_max(raw.iter().map(|p| p.0));
    let (min_y, max_y) = min_max(raw.iter().map(|p| p.1));
    let span = (max_x - min_x).max(max_y - min_y);
    let scale = if span > 0.0 { 1.0 / span } else { 0.0 };
    let cities = raw
        .iter()
        .map(|&(x, y)| {
            Point::new(
                ((x - min_x) * scale).clamp(0.0, 1.0),
                ((y - min_y) * scale).clamp(0.0, 1.0),
            )
        })
        .collect();
    let mut inst = TspInstance::new(cities)?;
    inst.id = name;
    Ok(inst)
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}
