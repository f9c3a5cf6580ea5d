//! Per-kind shattering conditions and canonical witness candidates, shared by
//! the non-sequential and tree searches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{fmt_rat, require_positive, FunctionClass, Metric, Rat, ValueGrid, WitnessPair};

/// Which dimension a shattering question is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimKind {
    /// Exact hits on an integer alphabet, witness gap ≥ α.
    GappedInteger,
    /// Realizers within β of the witness, witness gap ≥ α.
    GappedReal,
    /// Scalar witness, margin ≥ α/2 on each side.
    Fat,
    /// Scalar witness, margin exactly α/2.
    Fixed,
}

impl DimKind {
    pub fn name(self) -> &'static str {
        match self {
            DimKind::GappedInteger => "gapped-integer",
            DimKind::GappedReal => "gapped-real",
            DimKind::Fat => "fat",
            DimKind::Fixed => "fixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gapped-integer" => Ok(DimKind::GappedInteger),
            "gapped-real" => Ok(DimKind::GappedReal),
            "fat" => Ok(DimKind::Fat),
            "fixed" => Ok(DimKind::Fixed),
            _ => Err(Error::InvalidParameter(format!("unknown dimension kind `{s}`"))),
        }
    }

    pub fn uses_scalar_witness(self) -> bool {
        matches!(self, DimKind::Fat | DimKind::Fixed)
    }
}

pub const MINUS: u8 = 1;
pub const PLUS: u8 = 2;

/// A validated shattering condition at fixed scale.
#[derive(Clone, Debug)]
pub struct ShatterRule {
    kind: DimKind,
    grid: ValueGrid,
    metric: Metric,
    alpha: Rat,
    beta: Rat,
    /// β as a numerator, when representable (absolute metric candidates).
    beta_num: Option<i64>,
    /// α/2 as a numerator (fat and fixed kinds).
    half_num: i64,
}

impl ShatterRule {
    pub fn new(
        kind: DimKind,
        class: &FunctionClass,
        metric: &Metric,
        alpha: &Rat,
        beta: Option<&Rat>,
    ) -> Result<Self> {
        let grid = class.grid().clone();
        require_positive("alpha", alpha)?;
        metric.validate_for(&grid)?;
        let zero = Rat::from_integer(0);
        let mut beta_num = None;
        let mut half_num = 0;
        let beta = match kind {
            DimKind::GappedInteger => {
                if !grid.is_integer() {
                    return Err(Error::InvalidClass(
                        "gapped-integer needs an integer alphabet".into(),
                    ));
                }
                zero
            }
            DimKind::GappedReal => {
                if grid.is_integer() {
                    return Err(Error::InvalidClass("gapped-real needs a real grid".into()));
                }
                let b = *beta.ok_or_else(|| {
                    Error::InvalidParameter("gapped-real needs beta".into())
                })?;
                if b < zero {
                    return Err(Error::InvalidParameter(format!(
                        "beta must be nonnegative, got {}",
                        fmt_rat(&b)
                    )));
                }
                if metric.is_absolute() {
                    beta_num = Some(grid.scale(&b)?);
                }
                b
            }
            DimKind::Fat | DimKind::Fixed => {
                if grid.is_integer() {
                    return Err(Error::InvalidClass(format!(
                        "{} needs a real grid",
                        kind.name()
                    )));
                }
                half_num = grid.scale(&(alpha / Rat::from_integer(2)))?;
                zero
            }
        };
        Ok(Self {
            kind,
            grid,
            metric: metric.clone(),
            alpha: *alpha,
            beta,
            beta_num,
            half_num,
        })
    }

    pub fn kind(&self) -> DimKind {
        self.kind
    }

    pub fn alpha(&self) -> &Rat {
        &self.alpha
    }

    pub fn beta(&self) -> &Rat {
        &self.beta
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn grid(&self) -> &ValueGrid {
        &self.grid
    }

    /// Whether the witness itself is admissible (gap ≥ α, or scalar form).
    pub fn witness_ok(&self, w: &WitnessPair) -> bool {
        if !self.grid.contains(w.lo) || !self.grid.contains(w.hi) {
            return false;
        }
        match self.kind {
            DimKind::GappedInteger | DimKind::GappedReal => {
                self.metric.at_least(&self.grid, w.lo, w.hi, &self.alpha)
            }
            DimKind::Fat | DimKind::Fixed => w.lo == w.hi,
        }
    }

    /// Which signs a function value `u` may take against witness `w`:
    /// bit `MINUS` for ε = -1, bit `PLUS` for ε = +1.
    #[inline]
    pub fn labels(&self, u: i64, w: &WitnessPair) -> u8 {
        let (m, p) = match self.kind {
            DimKind::GappedInteger => (u == w.lo, u == w.hi),
            DimKind::GappedReal => (
                self.metric.within(&self.grid, u, w.lo, &self.beta),
                self.metric.within(&self.grid, u, w.hi, &self.beta),
            ),
            DimKind::Fat => (w.lo - u >= self.half_num, u - w.lo >= self.half_num),
            DimKind::Fixed => (w.lo - u == self.half_num, u - w.lo == self.half_num),
        };
        (m as u8) | ((p as u8) << 1)
    }

    /// True when `u` satisfies the condition for sign `sign`.
    #[inline]
    pub fn fits(&self, u: i64, w: &WitnessPair, sign: i8) -> bool {
        let l = self.labels(u, w);
        if sign < 0 {
            l & MINUS != 0
        } else {
            l & PLUS != 0
        }
    }

    /// Canonical witness candidates given the values attained (ascending,
    /// distinct) by the functions under consideration at one point. Only
    /// candidates for which both signs are realizable by some attained value
    /// are returned, sorted lexicographically.
    pub fn candidates(&self, attained: &[i64]) -> Vec<WitnessPair> {
        let g = &self.grid;
        let mut out = Vec::new();
        match self.kind {
            DimKind::GappedInteger => {
                for (i, &a) in attained.iter().enumerate() {
                    for &b in &attained[i + 1..] {
                        if self.metric.at_least(g, a, b, &self.alpha) {
                            out.push(WitnessPair::new(a, b));
                        }
                    }
                }
            }
            DimKind::GappedReal => {
                let points: Vec<i64> = match self.beta_num {
                    Some(b) => {
                        let mut p: Vec<i64> = attained
                            .iter()
                            .flat_map(|&v| [v - b, v, v + b])
                            .map(|v| v.clamp(g.min_num(), g.max_num()))
                            .collect();
                        p.sort_unstable();
                        p.dedup();
                        p
                    }
                    None => attained.to_vec(),
                };
                let reachable: Vec<i64> = points
                    .iter()
                    .copied()
                    .filter(|&s| attained.iter().any(|&u| self.metric.within(g, u, s, &self.beta)))
                    .collect();
                for (i, &a) in reachable.iter().enumerate() {
                    for &b in &reachable[i + 1..] {
                        if self.metric.at_least(g, a, b, &self.alpha) {
                            out.push(WitnessPair::new(a, b));
                        }
                    }
                }
            }
            DimKind::Fat => {
                let h = self.half_num;
                let mut ss: Vec<i64> = attained
                    .iter()
                    .flat_map(|&v| [v - h, v + h])
                    .filter(|&s| g.contains(s))
                    .collect();
                ss.sort_unstable();
                ss.dedup();
                let (lo, hi) = (attained[0], attained[attained.len() - 1]);
                out.extend(
                    ss.into_iter()
                        .filter(|&s| hi - s >= h && s - lo >= h)
                        .map(WitnessPair::scalar),
                );
            }
            DimKind::Fixed => {
                let h = self.half_num;
                out.extend(
                    attained
                        .iter()
                        .filter(|&&v| attained.binary_search(&(v - 2 * h)).is_ok())
                        .map(|&v| WitnessPair::scalar(v - h)),
                );
            }
        }
        out
    }
}
