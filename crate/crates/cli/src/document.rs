//! The IFS description file: JSON with exact rationals allowed as strings.
//!
//! ```json
//! {
//!   "name": "gasket",
//!   "maps": [
//!     { "matrix": [[0.5, 0], [0, 0.5]], "translation": [0, 0] },
//!     { "matrix": [["1/2", 0], [0, "1/2"]], "translation": [0.5, 0] }
//!   ],
//!   "options": { "rankTolerance": { "relative": 1e-10 }, "budgets": { "nodes": 1000000 }, "seed": 7 }
//! }
//! ```

use std::fmt;
use std::str::FromStr;

use affthermo::{AffineIfs, AffineMap, Mat2, RankTolerance};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A matrix or translation entry: a JSON number, or an exact rational
/// written `"p/q"`, `"p"` or as a decimal string.
#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    Number(f64),
    Exact { text: String, value: BigRational },
}

impl Entry {
    pub fn to_f64(&self) -> f64 {
        match self {
            Entry::Number(x) => *x,
            Entry::Exact { value, .. } => value.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Binary floats are rationals too, so this never fails on finite input.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Entry::Number(x) => BigRational::from_float(*x),
            Entry::Exact { value, .. } => Some(value.clone()),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Entry::Exact { .. })
    }
}

impl From<f64> for Entry {
    fn from(x: f64) -> Self {
        Entry::Number(x)
    }
}

impl FromStr for Entry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let text = s.trim();
        let value = parse_rational(text).ok_or_else(|| format!("expected a rational like \"3/8\", got {s:?}"))?;
        Ok(Entry::Exact {
            text: s.to_string(),
            value,
        })
    }
}

fn parse_rational(t: &str) -> Option<BigRational> {
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let r = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Some(if neg { -r } else { r })
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Entry::Number(x) => s.serialize_f64(*x),
            Entry::Exact { text, .. } => s.serialize_str(text),
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct EntryVisitor;

        impl<'de> Visitor<'de> for EntryVisitor {
            type Value = Entry;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a rational string such as \"3/8\"")
            }

            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Entry, E> {
                if x.is_finite() {
                    Ok(Entry::Number(x))
                } else {
                    Err(E::custom("matrix entries must be finite"))
                }
            }

            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Entry, E> {
                Ok(Entry::Number(x as f64))
            }

            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Entry, E> {
                Ok(Entry::Number(x as f64))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Entry, E> {
                s.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(EntryVisitor)
    }
}

fn zero_translation() -> [Entry; 2] {
    [Entry::Number(0.0), Entry::Number(0.0)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    /// Row-major `[[a, b], [c, d]]`.
    pub matrix: [[Entry; 2]; 2],
    #[serde(default = "zero_translation")]
    pub translation: [Entry; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOption {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absolute: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Tree nodes one analysis may visit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tolerance: Option<ToleranceOption>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Budgets>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Options {
    fn is_empty(&self) -> bool {
        *self == Options::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsDocument {
    #[serde(default)]
    pub name: String,
    #[serde(deserialize_with = "nonempty_maps")]
    pub maps: Vec<MapEntry>,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
}

fn nonempty_maps<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<MapEntry>, D::Error> {
    let maps = Vec::<MapEntry>::deserialize(d)?;
    if maps.is_empty() {
        return Err(de::Error::custom("an IFS document needs at least one map"));
    }
    if maps.len() > AffineIfs::MAX_MAPS {
        return Err(de::Error::custom(format!("at most {} maps are supported", AffineIfs::MAX_MAPS)));
    }
    Ok(maps)
}

/// A malformed document, located by 1-based line and column.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("cli: malformed IFS document at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        ParseError {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

impl IfsDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    /// A document for an existing system, entries as plain numbers.
    pub fn from_ifs(ifs: &AffineIfs) -> Self {
        let maps = ifs
            .maps()
            .iter()
            .map(|m| MapEntry {
                matrix: m.linear.rows().map(|r| r.map(Entry::Number)),
                translation: m.translation.map(Entry::Number),
            })
            .collect();
        IfsDocument {
            name: ifs.name().to_string(),
            maps,
            options: Options::default(),
        }
    }

    pub fn tolerance(&self) -> RankTolerance {
        let mut t = RankTolerance::default();
        if let Some(o) = &self.options.rank_tolerance {
            t.relative = o.relative.unwrap_or(t.relative);
            t.absolute = o.absolute.unwrap_or(t.absolute);
        }
        t
    }

    pub fn budget(&self) -> Option<u64> {
        self.options.budgets.as_ref().and_then(|b| b.nodes)
    }

    /// The system described. Exact linear parts are attached whenever any
    /// matrix entry was written as a rational string.
    pub fn to_ifs(&self) -> affthermo::Result<AffineIfs> {
        let maps = self
            .maps
            .iter()
            .map(|m| {
                let [[a, b], [c, d]] = &m.matrix;
                let linear = Mat2::new(a.to_f64(), b.to_f64(), c.to_f64(), d.to_f64());
                AffineMap::new(linear, [m.translation[0].to_f64(), m.translation[1].to_f64()])
            })
            .collect();
        let ifs = AffineIfs::with_tolerance(maps, self.tolerance())?.with_name(self.name.clone());
        if !self.maps.iter().any(|m| m.matrix.iter().flatten().any(Entry::is_exact)) {
            return Ok(ifs);
        }
        let exact = self
            .maps
            .iter()
            .map(|m| {
                let [[a, b], [c, d]] = &m.matrix;
                let q = |e: &Entry| e.to_rational().expect("finite entries");
                [q(a), q(b), q(c), q(d)]
            })
            .collect();
        ifs.with_exact_linear(exact)
    }
}
