//! JSON file formats. Rationals are always written as "p/q" strings.

use std::path::Path as FsPath;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{fmt_rat, parse_rat, FunctionClass, LabeledTree, Metric, Rat, ValueGrid, WitnessPair};
use crate::nonseq_dims::ShatterCertificate;
use crate::rule::DimKind;
use crate::sequential::TreeShatterCertificate;

/// serde adapter for a single rational.
pub mod rat_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for a list of rationals.
pub mod rat_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    #[serde(rename = "Q")]
    pub q: i64,
    pub alphabet: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    pub domain: Vec<String>,
    pub values: Vec<Vec<i64>>,
}

impl ClassFile {
    pub fn from_class(class: &FunctionClass) -> Self {
        let grid = class.grid();
        Self {
            q: grid.q(),
            alphabet: if grid.is_integer() { "integer" } else { "real_grid" }.into(),
            m: grid.m(),
            domain: class.domain().to_vec(),
            values: class.rows().map(<[i64]>::to_vec).collect(),
        }
    }

    pub fn to_class(&self) -> Result<FunctionClass> {
        let grid = match self.alphabet.as_str() {
            "integer" => {
                if self.q != 1 {
                    return Err(Error::InvalidClass("integer alphabet requires Q = 1".into()));
                }
                let m = self
                    .m
                    .ok_or_else(|| Error::InvalidClass("integer alphabet requires M".into()))?;
                ValueGrid::integer(m)?
            }
            "real_grid" => {
                if self.m.is_some() {
                    return Err(Error::InvalidClass("M is only meaningful for integer alphabets".into()));
                }
                ValueGrid::real(self.q)?
            }
            other => return Err(Error::InvalidClass(format!("unknown alphabet `{other}`"))),
        };
        FunctionClass::new(self.domain.clone(), grid, self.values.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    /// Domain point indices.
    Point,
    /// Rationals, grid values or μ labels.
    Value,
    /// Witness pairs ["lo", "hi"].
    Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub depth: usize,
    pub label_kind: LabelKind,
    pub labels: Vec<Value>,
}

fn expect_kind(file: &TreeFile, kind: LabelKind) -> Result<()> {
    if file.label_kind != kind {
        return Err(Error::InvalidTree(format!(
            "expected label kind {kind:?}, found {:?}",
            file.label_kind
        )));
    }
    Ok(())
}

fn value_str(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(n.as_i64().unwrap_or_default() as i128)),
        other => Err(Error::InvalidTree(format!("bad rational label {other}"))),
    }
}

impl TreeFile {
    pub fn from_points(tree: &LabeledTree<usize>) -> Self {
        Self {
            depth: tree.depth(),
            label_kind: LabelKind::Point,
            labels: tree.labels().iter().map(|&x| Value::from(x)).collect(),
        }
    }

    pub fn from_values(tree: &LabeledTree<i64>, grid: &ValueGrid) -> Self {
        Self::from_rationals(&tree.map(|&v| grid.to_rat(v)))
    }

    pub fn from_rationals(tree: &LabeledTree<Rat>) -> Self {
        Self {
            depth: tree.depth(),
            label_kind: LabelKind::Value,
            labels: tree.labels().iter().map(|r| Value::from(fmt_rat(r))).collect(),
        }
    }

    pub fn from_witnesses(tree: &LabeledTree<WitnessPair>, grid: &ValueGrid) -> Self {
        Self {
            depth: tree.depth(),
            label_kind: LabelKind::Witness,
            labels: tree
                .labels()
                .iter()
                .map(|w| Value::from(vec![fmt_rat(&grid.to_rat(w.lo)), fmt_rat(&grid.to_rat(w.hi))]))
                .collect(),
        }
    }

    pub fn to_points(&self, n_points: usize) -> Result<LabeledTree<usize>> {
        expect_kind(self, LabelKind::Point)?;
        let labels = self
            .labels
            .iter()
            .map(|v| {
                let x = v
                    .as_u64()
                    .ok_or_else(|| Error::InvalidTree(format!("bad point label {v}")))? as usize;
                if x >= n_points {
                    return Err(Error::IndexOutOfRange {
                        what: "point",
                        index: x,
                        len: n_points,
                    });
                }
                Ok(x)
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledTree::new(self.depth, labels)
    }

    pub fn to_rationals(&self) -> Result<LabeledTree<Rat>> {
        expect_kind(self, LabelKind::Value)?;
        let labels = self.labels.iter().map(value_str).collect::<Result<Vec<_>>>()?;
        LabeledTree::new(self.depth, labels)
    }

    pub fn to_values(&self, grid: &ValueGrid) -> Result<LabeledTree<i64>> {
        let t = self.to_rationals()?;
        let labels = t.labels().iter().map(|r| grid.from_rat(r)).collect::<Result<Vec<_>>>()?;
        LabeledTree::new(self.depth, labels)
    }

    pub fn to_witnesses(&self, grid: &ValueGrid) -> Result<LabeledTree<WitnessPair>> {
        expect_kind(self, LabelKind::Witness)?;
        let labels = self
            .labels
            .iter()
            .map(|v| match v.as_array().map(Vec::as_slice) {
                Some([lo, hi]) => Ok(WitnessPair::new(grid.from_rat(&value_str(lo)?)?, grid.from_rat(&value_str(hi)?)?)),
                _ => Err(Error::InvalidTree(format!("bad witness label {v}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledTree::new(self.depth, labels)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricFile {
    Absolute,
    Tabulated { table: Vec<Vec<String>> },
}

impl MetricFile {
    pub fn from_metric(m: &Metric) -> Self {
        match m {
            Metric::Absolute => Self::Absolute,
            Metric::Tabulated { table } => Self::Tabulated {
                table: table.iter().map(|r| r.iter().map(fmt_rat).collect()).collect(),
            },
        }
    }

    pub fn to_metric(&self) -> Result<Metric> {
        match self {
            Self::Absolute => Ok(Metric::Absolute),
            Self::Tabulated { table } => Metric::tabulated(
                table
                    .iter()
                    .map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::InvalidMetric(e.to_string()))?,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub kind: DimKind,
    pub dim: usize,
    pub points: Vec<usize>,
    pub witnesses: Vec<[String; 2]>,
    pub realizers: Vec<usize>,
}

impl CertificateFile {
    pub fn from_certificate(cert: &ShatterCertificate, grid: &ValueGrid) -> Self {
        Self {
            kind: cert.kind,
            dim: cert.points.len(),
            points: cert.points.clone(),
            witnesses: cert
                .witnesses
                .iter()
                .map(|w| [fmt_rat(&grid.to_rat(w.lo)), fmt_rat(&grid.to_rat(w.hi))])
                .collect(),
            realizers: cert.realizers.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCertificateFile {
    pub kind: DimKind,
    pub dim: usize,
    pub x_tree: TreeFile,
    pub witness_tree: TreeFile,
    pub realizers: Vec<usize>,
}

impl TreeCertificateFile {
    pub fn from_certificate(cert: &TreeShatterCertificate, grid: &ValueGrid) -> Self {
        Self {
            kind: cert.kind,
            dim: cert.depth(),
            x_tree: TreeFile::from_points(&cert.x_tree),
            witness_tree: TreeFile::from_witnesses(&cert.witness_tree, grid),
            realizers: cert.realizers.clone(),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &FsPath) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file so a failed run never leaves partial output.
pub fn write_atomic(path: &FsPath, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(FsPath::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_class(path: &FsPath) -> Result<FunctionClass> {
    read_json::<ClassFile>(path)?.to_class()
}

pub fn read_metric(path: Option<&FsPath>) -> Result<Metric> {
    match path {
        None => Ok(Metric::Absolute),
        Some(p) => read_json::<MetricFile>(p)?.to_metric(),
    }
}
