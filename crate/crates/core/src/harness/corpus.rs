//! Named classes the checkers run on.

use std::path::Path as FsPath;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::ClassRecipe;
use crate::error::{Error, Result};
use crate::io::{read_json, MetricFile};
use crate::model::{FunctionClass, Metric, Rat};

const SHIPPED: &str = include_str!("../../corpus/default.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    pub recipe: ClassRecipe,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    pub entries: Vec<CorpusEntry>,
}

/// A corpus entry with its class and metric built.
#[derive(Clone, Debug)]
pub struct Instance {
    pub entry: CorpusEntry,
    pub class: Arc<FunctionClass>,
    pub metric: Arc<Metric>,
}

impl Instance {
    pub fn name(&self) -> &str {
        &self.entry.name
    }

    pub fn is_integer(&self) -> bool {
        self.class.grid().is_integer()
    }

    pub fn is_real(&self) -> bool {
        !self.is_integer() && self.metric.is_absolute()
    }

    /// Classes closed under grid convex combinations by construction.
    pub fn is_grid_convex(&self) -> bool {
        self.is_real()
            && matches!(
                self.entry.recipe,
                ClassRecipe::Convexify { .. }
                    | ClassRecipe::IntervalProduct { .. }
                    | ClassRecipe::SinglePointGrid { .. }
                    | ClassRecipe::Full { q: Some(_), .. }
            )
    }

    pub fn log_gap_alpha(&self) -> Option<Rat> {
        match &self.entry.recipe {
            ClassRecipe::LogGapNonseq { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    pub fn single_point_q(&self) -> Option<i64> {
        match &self.entry.recipe {
            ClassRecipe::SinglePointGrid { q } => Some(*q),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub instances: Vec<Instance>,
}

impl Corpus {
    pub fn from_file(file: &CorpusFile) -> Result<Self> {
        let mut names = std::collections::HashSet::new();
        let instances = file
            .entries
            .iter()
            .map(|e| {
                if !names.insert(e.name.clone()) {
                    return Err(Error::InvalidParameter(format!("duplicate corpus entry `{}`", e.name)));
                }
                let class = e.recipe.build()?;
                let metric = match &e.metric {
                    None => Metric::Absolute,
                    Some(m) => m.to_metric()?,
                };
                metric.validate_for(class.grid())?;
                Ok(Instance {
                    entry: e.clone(),
                    class: Arc::new(class),
                    metric: Arc::new(metric),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { instances })
    }

    /// The corpus shipped with the crate.
    pub fn shipped_file() -> CorpusFile {
        serde_json::from_str(SHIPPED).expect("shipped corpus parses")
    }

    pub fn shipped() -> Self {
        Self::from_file(&Self::shipped_file()).expect("shipped corpus builds")
    }

    pub fn load(path: &FsPath) -> Result<Self> {
        Self::from_file(&read_json(path)?)
    }

    pub fn integer(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| i.is_integer())
    }

    pub fn real(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| i.is_real())
    }
}
