//! JSON file formats. Rationals are always strings `"num/den"` (or plain
//! integers) so that files stay exact.

use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use phirho_core::diagonals::{support_map, Diagonal, Diagonal02};
use phirho_core::families::{c_alpha, delta_down, delta_up, o_star, FamilyError, Stats};
use phirho_core::rearrange::RearrangeOutcome;
use phirho_core::segmeasures::{Segment, SegmentMap};
use phirho_core::shuffles::{shuffle_phi, shuffle_rho, Permutation};
use phirho_core::Rational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: line {line}, column {column}: {message}")]
    Json { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: field `{field}`: {message}")]
    Field { origin: String, field: String, message: String },
    #[error("{origin}: line {line}, field `{field}`: {message}")]
    Csv { origin: String, line: u64, field: String, message: String },
    #[error("{origin}: {message}")]
    Shape { origin: String, message: String },
}

impl FormatError {
    pub(crate) fn field(origin: &str, field: impl Into<String>, message: impl ToString) -> Self {
        FormatError::Field { origin: origin.into(), field: field.into(), message: message.to_string() }
    }

    fn json(origin: &str, e: serde_json::Error) -> Self {
        FormatError::Json { origin: origin.into(), line: e.line(), column: e.column(), message: e.to_string() }
    }
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.into(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), FormatError> {
    std::fs::write(path, contents).map_err(|source| FormatError::Io { path: path.into(), source })
}

pub(crate) fn parse_rational(origin: &str, field: &str, text: &str) -> Result<Rational, FormatError> {
    text.parse().map_err(|e| FormatError::field(origin, field, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationRecord {
    pub n: usize,
    pub pi: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceRecord {
    pub x_lo: String,
    pub x_hi: String,
    pub slope: String,
    pub intercept: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentMapRecord {
    pub pieces: Vec<PieceRecord>,
}

impl SegmentMapRecord {
    pub fn from_map(map: &SegmentMap) -> Self {
        let pieces = map
            .pieces()
            .iter()
            .map(|s| PieceRecord {
                x_lo: s.x_lo.to_string(),
                x_hi: s.x_hi.to_string(),
                slope: s.slope.to_string(),
                intercept: s.intercept.to_string(),
                weight: (s.weight != Rational::one()).then(|| s.weight.to_string()),
            })
            .collect();
        SegmentMapRecord { pieces }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalRecord {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagonal02Record {
    pub n: usize,
    /// Slope pattern such as `"002022"`.
    pub slopes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRecord {
    pub family: String,
    pub param: String,
}

/// A named family member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    CAlpha(Rational),
    DeltaUp(Rational),
    DeltaDown(Rational),
    OStar(usize),
}

impl Family {
    pub const NAMES: [&'static str; 4] = ["c_alpha", "delta_up", "delta_down", "o_star"];

    pub fn parse(name: &str, param: &str) -> Result<Self, String> {
        let rational = || param.parse::<Rational>().map_err(|e| e.to_string());
        match name {
            "c_alpha" => Ok(Family::CAlpha(rational()?)),
            "delta_up" => Ok(Family::DeltaUp(rational()?)),
            "delta_down" => Ok(Family::DeltaDown(rational()?)),
            "o_star" => param.trim().parse().map(Family::OStar).map_err(|e| format!("{param:?}: {e}")),
            _ => Err(format!("unknown family {name:?}; expected one of {}", Family::NAMES.join(", "))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::CAlpha(_) => "c_alpha",
            Family::DeltaUp(_) => "delta_up",
            Family::DeltaDown(_) => "delta_down",
            Family::OStar(_) => "o_star",
        }
    }

    pub fn param(&self) -> String {
        match self {
            Family::CAlpha(x) | Family::DeltaUp(x) | Family::DeltaDown(x) => x.to_string(),
            Family::OStar(n) => n.to_string(),
        }
    }

    pub fn record(&self) -> FamilyRecord {
        FamilyRecord { family: self.name().into(), param: self.param() }
    }

    /// Closed-form statistics and the copula's mass.
    pub fn build(&self) -> Result<(Stats, SegmentMap), FamilyError> {
        Ok(match self {
            Family::CAlpha(a) => {
                let c = c_alpha(a)?;
                (c.stats, c.map)
            }
            Family::DeltaUp(a) => {
                let d = delta_up(a)?;
                (d.stats, support_map(&d.diagonal))
            }
            Family::DeltaDown(b) => {
                let d = delta_down(b)?;
                (d.stats, d.support)
            }
            Family::OStar(n) => {
                let o = o_star(*n)?;
                (o.stats, o.spec.to_map().expect("components carry maps"))
            }
        })
    }
}

/// Any input accepted by `measures`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureInput {
    Permutation(PermutationRecord),
    SegmentMap(SegmentMapRecord),
    Diagonal(DiagonalRecord),
    Diagonal02(Diagonal02Record),
    Family(FamilyRecord),
}

/// Parses JSON, dispatching on the keys present.
pub fn parse_measure_input(text: &str, origin: &str) -> Result<MeasureInput, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(|e| FormatError::json(origin, e))?;
    let obj = value
        .as_object()
        .ok_or_else(|| FormatError::Shape { origin: origin.into(), message: "expected a JSON object".into() })?;
    let typed = |v: Value| -> Result<MeasureInput, serde_json::Error> {
        Ok(if obj.contains_key("pi") {
            MeasureInput::Permutation(serde_json::from_value(v)?)
        } else if obj.contains_key("pieces") {
            MeasureInput::SegmentMap(serde_json::from_value(v)?)
        } else if obj.contains_key("breakpoints") {
            MeasureInput::Diagonal(serde_json::from_value(v)?)
        } else if obj.contains_key("slopes") {
            MeasureInput::Diagonal02(serde_json::from_value(v)?)
        } else if obj.contains_key("family") {
            MeasureInput::Family(serde_json::from_value(v)?)
        } else {
            return Err(serde::de::Error::custom("expected one of the keys pi, pieces, breakpoints, slopes, family"));
        })
    };
    typed(value.clone()).map_err(|e| FormatError::Shape { origin: origin.into(), message: e.to_string() })
}

/// A copula ready for measurement.
#[derive(Debug, Clone)]
pub struct Subject {
    pub label: String,
    pub stats: Stats,
    pub map: SegmentMap,
}

impl MeasureInput {
    pub fn subject(&self, origin: &str) -> Result<Subject, FormatError> {
        match self {
            MeasureInput::Permutation(r) => {
                let p = permutation_from_record(r, origin)?;
                let stats = Stats::new(shuffle_phi(&p), shuffle_rho(&p));
                Ok(Subject { label: permutation_label(&p), stats, map: SegmentMap::from_permutation(&p) })
            }
            MeasureInput::SegmentMap(r) => {
                let map = segment_map_from_record(r, origin)?;
                let stats = Stats::new(map.phi_exact(), map.rho_exact());
                Ok(Subject { label: "segment map".into(), stats, map })
            }
            MeasureInput::Diagonal(r) => {
                let d = diagonal_from_record(r, origin)?;
                Ok(diagonal_subject("diagonal copula".into(), &d))
            }
            MeasureInput::Diagonal02(r) => {
                let d =
                    Diagonal02::from_pattern(r.n, &r.slopes).map_err(|e| FormatError::field(origin, "slopes", e))?;
                Ok(diagonal_subject(format!("diagonal {}", d.pattern()), &d.to_diagonal()))
            }
            MeasureInput::Family(r) => {
                let fam = Family::parse(&r.family, &r.param).map_err(|e| FormatError::field(origin, "family", e))?;
                let (stats, map) = fam.build().map_err(|e| FormatError::field(origin, "param", e))?;
                Ok(Subject { label: format!("{} {}", fam.name(), fam.param()), stats, map })
            }
        }
    }
}

fn diagonal_subject(label: String, d: &Diagonal) -> Subject {
    let map = support_map(d);
    let stats = Stats::new(map.phi_exact(), map.rho_exact());
    Subject { label, stats, map }
}

pub fn permutation_from_record(r: &PermutationRecord, origin: &str) -> Result<Permutation, FormatError> {
    Permutation::validate(r.n, &r.pi).map_err(|e| FormatError::field(origin, "pi", e))
}

pub fn segment_map_from_record(r: &SegmentMapRecord, origin: &str) -> Result<SegmentMap, FormatError> {
    let mut pieces = Vec::with_capacity(r.pieces.len());
    for (i, p) in r.pieces.iter().enumerate() {
        let f = |name: &str, text: &str| parse_rational(origin, &format!("pieces[{i}].{name}"), text);
        let mut seg = Segment::new(
            f("x_lo", &p.x_lo)?,
            f("x_hi", &p.x_hi)?,
            f("slope", &p.slope)?,
            f("intercept", &p.intercept)?,
        );
        if let Some(w) = &p.weight {
            seg = seg.weighted(f("weight", w)?);
        }
        pieces.push(seg);
    }
    SegmentMap::new(pieces).map_err(|e| FormatError::field(origin, "pieces", e))
}

pub fn diagonal_from_record(r: &DiagonalRecord, origin: &str) -> Result<Diagonal, FormatError> {
    let list = |name: &str, items: &[String]| -> Result<Vec<Rational>, FormatError> {
        items.iter().enumerate().map(|(i, t)| parse_rational(origin, &format!("{name}[{i}]"), t)).collect()
    };
    Diagonal::validate(list("breakpoints", &r.breakpoints)?, list("values", &r.values)?)
        .map_err(|e| FormatError::field(origin, "breakpoints/values", e))
}

/// Parses `"4,7,8,1"` or `"4 7 8 1"`.
pub fn parse_permutation_list(text: &str) -> Result<Permutation, String> {
    let values: Vec<i64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    Permutation::validate(values.len(), &values).map_err(|e| e.to_string())
}

/// Space-separated one-line form.
pub fn permutation_label(p: &Permutation) -> String {
    p.values().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn sign_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "negative",
        Ordering::Equal => "zero",
        Ordering::Greater => "positive",
    }
}

/// The rearrangement report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RearrangeRecord {
    pub input: Vec<usize>,
    pub output: Vec<usize>,
    pub phi: String,
    pub rho_before: String,
    pub rho_after: String,
    pub m_sign: String,
    pub class: String,
}

impl From<&RearrangeOutcome> for RearrangeRecord {
    fn from(o: &RearrangeOutcome) -> Self {
        RearrangeRecord {
            input: o.input.values().to_vec(),
            output: o.output.values().to_vec(),
            phi: o.phi.to_string(),
            rho_before: o.rho_before.to_string(),
            rho_after: o.rho_after.to_string(),
            m_sign: sign_name(o.m_sign).into(),
            class: o.class.to_string(),
        }
    }
}
