//! Scenario files: a line-oriented description of a space-time structure,
//! an observer and either connection data or an explicit Christoffel table.
//!
//! ```text
//! # comments run to end of line
//! [meta]        name = ..., description = ...            (optional)
//! [spacetime]   dim = 3
//!               coords = t, x, y
//! [omega]       O = 1, 0, x
//! [observer]    z = 1, 0, 0
//! [frame]       E1 = 0, 1, 0
//!               E2 = -x, 0, 1
//! [metric]      h11 = 1      h12 = 0      h22 = 1      (a ≤ b, 1-based)
//! [gravity]     G = 0, -9.8                             (n frame components)
//! [coriolis]    w12 = 0.5                               (a < b, 1-based)
//! [theta]       T1_12 = 0.3                             (frame a 1-based; i < j 0-based)
//! [christoffel] Gamma1_00 = -9.8                        (k, i, j 0-based)
//! [domain]      box = -1 1, -5 5, -5 5
//!               samples = 100
//!               seed = 42
//! ```
//!
//! Omitted `[gravity]`, `[coriolis]` and `[theta]` mean zero data. A
//! `[christoffel]` section (even an empty one) replaces the data by a
//! user-supplied connection whose unlisted coefficients are zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::connection::{build_connection, Connection, ConnectionData};
use crate::error::Error;
use crate::expr::{parse_expr, Expr, Func, ParseError};
use crate::geometry::{ObserverField, SpacetimeStructure, VectorField};

pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("[{section}]: missing key `{key}`")]
    MissingKey { section: &'static str, key: String },
    #[error("[{section}] {key}: {source}")]
    Expr {
        section: &'static str,
        key: String,
        source: ParseError,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Structure(#[from] Error),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConnectionSource {
    Data(ConnectionData),
    /// Γ^k_ij expressions, indexed `(k * m + i) * m + j`.
    Supplied(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub structure: SpacetimeStructure,
    pub observer: ObserverField,
    pub source: ConnectionSource,
}

impl Scenario {
    pub fn data(&self) -> Option<&ConnectionData> {
        match &self.source {
            ConnectionSource::Data(d) => Some(d),
            ConnectionSource::Supplied(_) => None,
        }
    }

    /// The connection this scenario describes: built from its data, or the
    /// supplied Christoffel table.
    pub fn connection(&self) -> Result<Connection, Error> {
        match &self.source {
            ConnectionSource::Data(d) => build_connection(&self.structure, &self.observer, d),
            ConnectionSource::Supplied(g) => {
                Connection::supplied(self.structure.clone(), g.clone())
            }
        }
    }

    /// Renders the scenario in the file format; loading the output gives
    /// back identically evaluating expressions.
    pub fn to_text(&self) -> String {
        let s = &self.structure;
        let names = s.coord_names();
        let (m, n) = (s.dim(), s.spatial_dim());
        let list = |exprs: &mut dyn Iterator<Item = &Expr>| {
            exprs
                .map(|e| e.display(names).to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "[meta]\nname = {}", self.name);
        if !self.description.is_empty() {
            let _ = writeln!(out, "description = {}", self.description);
        }
        let _ = writeln!(
            out,
            "\n[spacetime]\ndim = {m}\ncoords = {}",
            names.join(", ")
        );
        let _ = writeln!(out, "\n[omega]\nO = {}", list(&mut s.omega().iter()));
        let _ = writeln!(
            out,
            "\n[observer]\nz = {}",
            list(&mut self.observer.z.components().iter())
        );
        let _ = writeln!(out, "\n[frame]");
        for (a, e) in s.frame().iter().enumerate() {
            let _ = writeln!(out, "E{} = {}", a + 1, list(&mut e.components().iter()));
        }
        let _ = writeln!(out, "\n[metric]");
        for a in 0..n {
            for b in a..n {
                let _ = writeln!(
                    out,
                    "h{}{} = {}",
                    a + 1,
                    b + 1,
                    s.metric(a, b).display(names)
                );
            }
        }
        match &self.source {
            ConnectionSource::Data(d) => {
                let _ = writeln!(out, "\n[gravity]\nG = {}", list(&mut d.gravity().iter()));
                let _ = writeln!(out, "\n[coriolis]");
                for a in 0..n {
                    for b in a + 1..n {
                        let _ = writeln!(
                            out,
                            "w{}{} = {}",
                            a + 1,
                            b + 1,
                            d.coriolis(a, b).display(names)
                        );
                    }
                }
                let _ = writeln!(out, "\n[theta]");
                for a in 0..n {
                    for i in 0..m {
                        for j in i + 1..m {
                            let _ = writeln!(
                                out,
                                "T{}_{i}{j} = {}",
                                a + 1,
                                d.theta(a, i, j).display(names)
                            );
                        }
                    }
                }
            }
            ConnectionSource::Supplied(gamma) => {
                let _ = writeln!(out, "\n[christoffel]");
                for k in 0..m {
                    for i in 0..m {
                        for j in 0..m {
                            let e = &gamma[(k * m + i) * m + j];
                            if !e.is_zero() {
                                let _ = writeln!(out, "Gamma{k}_{i}{j} = {}", e.display(names));
                            }
                        }
                    }
                }
            }
        }
        let boxes: Vec<String> = s
            .domain()
            .iter()
            .map(|(lo, hi)| format!("{lo:?} {hi:?}"))
            .collect();
        let _ = writeln!(
            out,
            "\n[domain]\nbox = {}\nsamples = {}\nseed = {}",
            boxes.join(", "),
            s.sample_count(),
            s.seed()
        );
        out
    }
}

const SECTIONS: [&str; 11] = [
    "meta",
    "spacetime",
    "omega",
    "observer",
    "frame",
    "metric",
    "gravity",
    "coriolis",
    "theta",
    "christoffel",
    "domain",
];

struct Entry {
    line: usize,
    value: String,
}

#[derive(Default)]
struct Sections(BTreeMap<&'static str, BTreeMap<String, Entry>>);

impl Sections {
    fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut out = Sections::default();
        let mut current: Option<&'static str> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let malformed = |message: String| ScenarioError::Malformed { line, message };
            if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
                let name = name.trim();
                let section = SECTIONS
                    .iter()
                    .find(|s| **s == name)
                    .ok_or_else(|| malformed(format!("unknown section [{name}]")))?;
                if out.0.insert(section, BTreeMap::new()).is_some() {
                    return Err(malformed(format!("duplicate section [{name}]")));
                }
                current = Some(section);
                continue;
            }
            let section =
                current.ok_or_else(|| malformed("entry outside of any section".into()))?;
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| malformed(format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim().to_string();
            let entry = Entry {
                line,
                value: value.trim().to_string(),
            };
            let map = out.0.get_mut(section).expect("section registered");
            if map.insert(key.clone(), entry).is_some() {
                return Err(malformed(format!("duplicate key `{key}` in [{section}]")));
            }
        }
        Ok(out)
    }

    fn section(&self, name: &'static str) -> Result<&BTreeMap<String, Entry>, ScenarioError> {
        self.0.get(name).ok_or(ScenarioError::MissingSection(name))
    }

    fn optional(&self, name: &'static str) -> Option<&BTreeMap<String, Entry>> {
        self.0.get(name)
    }
}

fn require<'a>(
    map: &'a BTreeMap<String, Entry>,
    section: &'static str,
    key: &str,
) -> Result<&'a Entry, ScenarioError> {
    map.get(key).ok_or_else(|| ScenarioError::MissingKey {
        section,
        key: key.to_string(),
    })
}

fn reject_unknown_keys(
    map: &BTreeMap<String, Entry>,
    section: &'static str,
    known: &[&str],
) -> Result<(), ScenarioError> {
    match map.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        Some((k, e)) => Err(ScenarioError::Malformed {
            line: e.line,
            message: format!("unknown key `{k}` in [{section}]"),
        }),
        None => Ok(()),
    }
}

fn parse_one(
    text: &str,
    offset: usize,
    coords: &[String],
    section: &'static str,
    key: &str,
) -> Result<Expr, ScenarioError> {
    parse_expr(text, coords).map_err(|e| ScenarioError::Expr {
        section,
        key: key.to_string(),
        source: match e {
            ParseError::Syntax {
                position,
                expected,
                found,
            } => ParseError::Syntax {
                position: position + offset,
                expected,
                found,
            },
            ParseError::UnknownIdentifier { name, position } => ParseError::UnknownIdentifier {
                name,
                position: position + offset,
            },
        },
    })
}

// Comma-separated expressions; error positions are relative to the whole value.
fn parse_list(
    entry: &Entry,
    coords: &[String],
    section: &'static str,
    key: &str,
) -> Result<Vec<Expr>, ScenarioError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for item in entry.value.split(',') {
        out.push(parse_one(item, offset, coords, section, key)?);
        offset += item.len() + 1;
    }
    Ok(out)
}

fn expect_len<T>(items: Vec<T>, expected: usize, what: &str) -> Result<Vec<T>, ScenarioError> {
    if items.len() != expected {
        return Err(ScenarioError::DimensionMismatch(format!(
            "{what}: expected {expected} entries, found {}",
            items.len()
        )));
    }
    Ok(items)
}

fn parse_int<T: std::str::FromStr>(entry: &Entry, what: &str) -> Result<T, ScenarioError> {
    entry.value.parse().map_err(|_| ScenarioError::Malformed {
        line: entry.line,
        message: format!(
            "{what} must be a non-negative integer, got `{}`",
            entry.value
        ),
    })
}

fn digit(c: char) -> Option<usize> {
    c.to_digit(10).map(|d| d as usize)
}

// "ab" → (a, b) for single-digit indices.
fn two_digits(s: &str) -> Option<(usize, usize)> {
    let mut chars = s.chars();
    let a = digit(chars.next()?)?;
    let b = digit(chars.next()?)?;
    chars.next().is_none().then_some((a, b))
}

// "<prefix><a>_<i><j>" → (a, i, j).
fn indexed_pair(key: &str, prefix: &str) -> Option<(usize, usize, usize)> {
    let rest = key.strip_prefix(prefix)?;
    let (a, ij) = rest.split_once('_')?;
    let a = a.parse().ok()?;
    let (i, j) = two_digits(ij)?;
    Some((a, i, j))
}

fn bad_key(entry: &Entry, section: &str, key: &str) -> ScenarioError {
    ScenarioError::Malformed {
        line: entry.line,
        message: format!("malformed key `{key}` in [{section}]"),
    }
}

fn out_of_range(section: &str, key: &str, bound: &str) -> ScenarioError {
    ScenarioError::DimensionMismatch(format!("[{section}] {key}: index outside {bound}"))
}

/// Parses scenario text. `fallback_name` is used when there is no
/// `[meta] name`.
pub fn parse_scenario(text: &str, fallback_name: &str) -> Result<Scenario, ScenarioError> {
    let sections = Sections::parse(text)?;

    let (name, description) = match sections.optional("meta") {
        Some(meta) => {
            reject_unknown_keys(meta, "meta", &["name", "description"])?;
            (
                meta.get("name")
                    .map_or(fallback_name.to_string(), |e| e.value.clone()),
                meta.get("description")
                    .map_or(String::new(), |e| e.value.clone()),
            )
        }
        None => (fallback_name.to_string(), String::new()),
    };

    let st = sections.section("spacetime")?;
    reject_unknown_keys(st, "spacetime", &["dim", "coords"])?;
    let dim_entry = require(st, "spacetime", "dim")?;
    let m: usize = parse_int(dim_entry, "dim")?;
    let coords_entry = require(st, "spacetime", "coords")?;
    let coords: Vec<String> = coords_entry
        .value
        .split(',')
        .map(|c| c.trim().to_string())
        .collect();
    if coords.len() != m {
        return Err(ScenarioError::DimensionMismatch(format!(
            "dim = {m} but {} coordinate names",
            coords.len()
        )));
    }
    if m < 2 {
        return Err(ScenarioError::DimensionMismatch(format!(
            "chart dimension must be at least 2, got {m}"
        )));
    }
    for (i, c) in coords.iter().enumerate() {
        let valid = c
            .chars()
            .next()
            .is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
            && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
            && Func::from_name(c).is_none();
        if !valid || coords[..i].contains(c) {
            return Err(ScenarioError::Malformed {
                line: coords_entry.line,
                message: format!("invalid or repeated coordinate name `{c}`"),
            });
        }
    }
    let n = m - 1;

    let om = sections.section("omega")?;
    reject_unknown_keys(om, "omega", &["O"])?;
    let omega = expect_len(
        parse_list(require(om, "omega", "O")?, &coords, "omega", "O")?,
        m,
        "omega O",
    )?;

    let obs = sections.section("observer")?;
    reject_unknown_keys(obs, "observer", &["z"])?;
    let z = expect_len(
        parse_list(require(obs, "observer", "z")?, &coords, "observer", "z")?,
        m,
        "observer z",
    )?;

    let fr = sections.section("frame")?;
    let mut frame = vec![None; n];
    for (key, entry) in fr {
        let a: usize = key
            .strip_prefix('E')
            .and_then(|r| r.parse().ok())
            .ok_or_else(|| bad_key(entry, "frame", key))?;
        if a == 0 || a > n {
            return Err(out_of_range("frame", key, &format!("E1..E{n}")));
        }
        let comps = expect_len(parse_list(entry, &coords, "frame", key)?, m, key)?;
        frame[a - 1] = Some(VectorField(comps));
    }
    let frame = frame
        .into_iter()
        .enumerate()
        .map(|(a, f)| {
            f.ok_or_else(|| ScenarioError::MissingKey {
                section: "frame",
                key: format!("E{}", a + 1),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mt = sections.section("metric")?;
    let mut metric: Vec<Vec<Option<Expr>>> = vec![vec![None; n]; n];
    for (key, entry) in mt {
        let (a, b) = key
            .strip_prefix('h')
            .and_then(two_digits)
            .ok_or_else(|| bad_key(entry, "metric", key))?;
        if a == 0 || b == 0 || a > n || b > n {
            return Err(out_of_range("metric", key, &format!("{n}×{n}")));
        }
        if a > b {
            return Err(ScenarioError::Malformed {
                line: entry.line,
                message: format!("metric key `{key}` must have a ≤ b"),
            });
        }
        let e = parse_one(&entry.value, 0, &coords, "metric", key)?;
        metric[a - 1][b - 1] = Some(e.clone());
        metric[b - 1][a - 1] = Some(e);
    }
    for (a, row) in metric.iter().enumerate() {
        if row[a].is_none() {
            return Err(ScenarioError::MissingKey {
                section: "metric",
                key: format!("h{}{}", a + 1, a + 1),
            });
        }
    }
    let metric: Vec<Vec<Expr>> = metric
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|e| e.unwrap_or_else(Expr::zero))
                .collect()
        })
        .collect();

    let dm = sections.section("domain")?;
    reject_unknown_keys(dm, "domain", &["box", "samples", "seed"])?;
    let box_entry = require(dm, "domain", "box")?;
    let mut domain = Vec::new();
    for pair in box_entry.value.split(',') {
        let nums: Vec<f64> = pair
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| ScenarioError::Malformed {
                line: box_entry.line,
                message: format!("box entries are `lo hi` pairs, got `{}`", pair.trim()),
            })?;
        match nums.as_slice() {
            [lo, hi] => domain.push((*lo, *hi)),
            _ => {
                return Err(ScenarioError::Malformed {
                    line: box_entry.line,
                    message: format!("box entries are `lo hi` pairs, got `{}`", pair.trim()),
                })
            }
        }
    }
    let domain = expect_len(domain, m, "domain box")?;
    let samples = match dm.get("samples") {
        Some(e) => parse_int(e, "samples")?,
        None => DEFAULT_SAMPLES,
    };
    let seed = match dm.get("seed") {
        Some(e) => parse_int(e, "seed")?,
        None => 0,
    };

    let structure =
        SpacetimeStructure::new(coords.clone(), omega, frame, metric, domain, samples, seed)?;
    let observer = ObserverField::new(VectorField(z));

    let source = match sections.optional("christoffel") {
        Some(table) => {
            if let Some(conflict) = ["gravity", "coriolis", "theta"]
                .into_iter()
                .find(|s| sections.optional(s).is_some())
            {
                let line = table.values().next().map_or(0, |e| e.line);
                return Err(ScenarioError::Malformed {
                    line,
                    message: format!("[christoffel] cannot be combined with [{conflict}]"),
                });
            }
            let mut gamma = vec![Expr::zero(); m * m * m];
            for (key, entry) in table {
                let (k, i, j) =
                    indexed_pair(key, "Gamma").ok_or_else(|| bad_key(entry, "christoffel", key))?;
                if k >= m || i >= m || j >= m {
                    return Err(out_of_range("christoffel", key, "the chart"));
                }
                gamma[(k * m + i) * m + j] =
                    parse_one(&entry.value, 0, &coords, "christoffel", key)?;
            }
            ConnectionSource::Supplied(gamma)
        }
        None => {
            let mut data = ConnectionData::zero(m);
            if let Some(g) = sections.optional("gravity") {
                reject_unknown_keys(g, "gravity", &["G"])?;
                if let Some(entry) = g.get("G") {
                    let comps = expect_len(
                        parse_list(entry, &coords, "gravity", "G")?,
                        n,
                        "gravity G (frame components, n = m - 1)",
                    )?;
                    data.set_gravity(comps)?;
                }
            }
            if let Some(w) = sections.optional("coriolis") {
                for (key, entry) in w {
                    let (a, b) = key
                        .strip_prefix('w')
                        .and_then(two_digits)
                        .ok_or_else(|| bad_key(entry, "coriolis", key))?;
                    if a == 0 || b == 0 || a > n || b > n {
                        return Err(out_of_range("coriolis", key, &format!("{n}×{n}")));
                    }
                    if a >= b {
                        return Err(ScenarioError::Malformed {
                            line: entry.line,
                            message: format!("coriolis key `{key}` must have a < b"),
                        });
                    }
                    data.set_coriolis(
                        a - 1,
                        b - 1,
                        parse_one(&entry.value, 0, &coords, "coriolis", key)?,
                    )?;
                }
            }
            if let Some(t) = sections.optional("theta") {
                for (key, entry) in t {
                    let (a, i, j) =
                        indexed_pair(key, "T").ok_or_else(|| bad_key(entry, "theta", key))?;
                    if a == 0 || a > n || i >= m || j >= m {
                        return Err(out_of_range("theta", key, "the chart"));
                    }
                    if i >= j {
                        return Err(ScenarioError::Malformed {
                            line: entry.line,
                            message: format!("theta key `{key}` must have i < j"),
                        });
                    }
                    data.set_theta(
                        a - 1,
                        i,
                        j,
                        parse_one(&entry.value, 0, &coords, "theta", key)?,
                    )?;
                }
            }
            ConnectionSource::Data(data)
        }
    };

    Ok(Scenario {
        name,
        description,
        structure,
        observer,
        source,
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map_or("scenario".to_string(), |s| s.to_string_lossy().into_owned());
    parse_scenario(&text, &stem)
}
