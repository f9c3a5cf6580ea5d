//! Exact non-sequential dimensions (gapped integer, gapped real,
//! fat-shattering, fixed-scale) with shattering certificates.
//!
//! Search: shattered point sets are closed under subsets, so sets are grown
//! level by level from shattered sets only. For one point set, witness tuples
//! are explored depth-first in lexicographic order; after fixing the first j
//! witnesses the j-dimensional projection of the reachable patterns must
//! already be full, otherwise the branch is cut.

use std::collections::HashSet;

use crate::combinatorics::SignPatternSet;
use crate::error::{cap_check, Error, Result};
use crate::model::{FunctionClass, Metric, Rat, WitnessPair};
use crate::par;
pub use crate::rule::{DimKind, ShatterRule};

/// Largest dimension the pattern bitset supports (2^20 bits = 128 KiB).
pub const MAX_NONSEQ_DIM: usize = 20;

/// Shattered points, their witnesses and one realizer per sign pattern
/// (indexed by pattern index, first coordinate most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShatterCertificate {
    pub kind: DimKind,
    pub points: Vec<usize>,
    pub witnesses: Vec<WitnessPair>,
    pub realizers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimResult {
    pub dim: usize,
    pub certificate: ShatterCertificate,
}

/// Outcome of `is_shattered_nonseq`: realizers hold the lowest-index function
/// for each pattern, `None` where no function works.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShatterCheck {
    pub shattered: bool,
    pub realizers: Vec<Option<usize>>,
}

pub fn gapped_dim_integer(class: &FunctionClass, metric: &Metric, alpha: &Rat) -> Result<DimResult> {
    dimension(DimKind::GappedInteger, class, metric, alpha, None)
}

pub fn gapped_dim_real(
    class: &FunctionClass,
    metric: &Metric,
    alpha: &Rat,
    beta: &Rat,
) -> Result<DimResult> {
    dimension(DimKind::GappedReal, class, metric, alpha, Some(beta))
}

pub fn fat_dim(class: &FunctionClass, alpha: &Rat) -> Result<DimResult> {
    dimension(DimKind::Fat, class, &Metric::Absolute, alpha, None)
}

pub fn fixed_scale_dim(class: &FunctionClass, alpha: &Rat) -> Result<DimResult> {
    dimension(DimKind::Fixed, class, &Metric::Absolute, alpha, None)
}

/// Per-point candidate witnesses with the label byte of every function.
struct PointTable {
    cands: Vec<WitnessPair>,
    /// `labels[c][f]`
    labels: Vec<Vec<u8>>,
}

fn point_tables(rule: &ShatterRule, class: &FunctionClass) -> Vec<PointTable> {
    (0..class.n_points())
        .map(|x| {
            let cands = rule.candidates(&class.attained(x));
            let labels = cands
                .iter()
                .map(|w| {
                    (0..class.n_functions())
                        .map(|f| rule.labels(class.value(f, x), w))
                        .collect()
                })
                .collect();
            PointTable { cands, labels }
        })
        .collect()
}

/// Generic entry point for the four kinds.
pub fn dimension(
    kind: DimKind,
    class: &FunctionClass,
    metric: &Metric,
    alpha: &Rat,
    beta: Option<&Rat>,
) -> Result<DimResult> {
    let rule = ShatterRule::new(kind, class, metric, alpha, beta)?;
    let tables = point_tables(&rule, class);
    let nf = class.n_functions();

    let mut best: Option<(Vec<usize>, Vec<usize>)> = None; // (points, candidate indices)
    let mut frontier: Vec<Vec<usize>> = (0..class.n_points()).map(|x| vec![x]).collect();
    let mut level = 1;
    while !frontier.is_empty() {
        cap_check("non-sequential dimension", level as u64, MAX_NONSEQ_DIM as u64)?;
        let found = par::map_slice(&frontier, |pts| search_witnesses(&tables, pts, nf));
        let shattered: Vec<(Vec<usize>, Vec<usize>)> = frontier
            .into_iter()
            .zip(found)
            .filter_map(|(p, w)| w.map(|w| (p, w)))
            .collect();
        if shattered.is_empty() {
            break;
        }
        best = Some(shattered[0].clone());
        let sets: Vec<Vec<usize>> = shattered.into_iter().map(|(p, _)| p).collect();
        frontier = next_level(&sets, class.n_points());
        level += 1;
    }

    let certificate = match best {
        None => ShatterCertificate {
            kind,
            points: vec![],
            witnesses: vec![],
            realizers: vec![0],
        },
        Some((points, wi)) => {
            let witnesses: Vec<WitnessPair> = points
                .iter()
                .zip(&wi)
                .map(|(&x, &c)| tables[x].cands[c])
                .collect();
            let check = check_patterns(&rule, class, &points, &witnesses);
            debug_assert!(check.shattered);
            ShatterCertificate {
                kind,
                points,
                witnesses,
                realizers: check.realizers.into_iter().map(|r| r.unwrap_or(0)).collect(),
            }
        }
    };
    Ok(DimResult {
        dim: certificate.points.len(),
        certificate,
    })
}

/// Candidate sets of size k+1 all of whose k-subsets are shattered, in
/// lexicographic order.
fn next_level(sets: &[Vec<usize>], n_points: usize) -> Vec<Vec<usize>> {
    let known: HashSet<&[usize]> = sets.iter().map(|s| s.as_slice()).collect();
    let mut out = Vec::new();
    for s in sets {
        let last = *s.last().expect("nonempty set");
        for y in last + 1..n_points {
            let mut cand = s.clone();
            cand.push(y);
            let all_subsets = (0..cand.len() - 1).all(|skip| {
                let sub: Vec<usize> = cand
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                known.contains(sub.as_slice())
            });
            if all_subsets {
                out.push(cand);
            }
        }
    }
    out
}

/// Lexicographically smallest witness tuple shattering `points`, as candidate
/// indices, or `None`.
fn search_witnesses(tables: &[PointTable], points: &[usize], nf: usize) -> Option<Vec<usize>> {
    let k = points.len();
    // Per function: fixed sign bits and free bits, positioned for length k.
    let mut fixed = vec![0usize; nf];
    let mut free = vec![0usize; nf];
    let mut alive = vec![true; nf];
    let mut chosen = Vec::with_capacity(k);
    if dfs(tables, points, 0, &mut fixed, &mut free, &mut alive, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

fn dfs(
    tables: &[PointTable],
    points: &[usize],
    j: usize,
    fixed: &mut Vec<usize>,
    free: &mut Vec<usize>,
    alive: &mut Vec<bool>,
    chosen: &mut Vec<usize>,
) -> bool {
    let k = points.len();
    if j == k {
        return true;
    }
    let table = &tables[points[j]];
    let bit = 1usize << (k - 1 - j);
    let shift = k - 1 - j;
    let nf = alive.len();
    for (c, labels) in table.labels.iter().enumerate() {
        let (saved_fixed, saved_free, saved_alive) = (fixed.clone(), free.clone(), alive.clone());
        let mut pats = SignPatternSet::new(j + 1).expect("depth within cap");
        for f in 0..nf {
            if !alive[f] {
                continue;
            }
            match labels[f] {
                0 => alive[f] = false,
                1 => {}
                2 => fixed[f] |= bit,
                _ => free[f] |= bit,
            }
            if alive[f] {
                pats.insert_cube(fixed[f] >> shift, free[f] >> shift);
            }
        }
        if pats.is_full() {
            chosen.push(c);
            if dfs(tables, points, j + 1, fixed, free, alive, chosen) {
                return true;
            }
            chosen.pop();
        }
        *fixed = saved_fixed;
        *free = saved_free;
        *alive = saved_alive;
    }
    false
}

/// Direct pattern-by-pattern check; shared by certificate assembly and the
/// public checker.
fn check_patterns(
    rule: &ShatterRule,
    class: &FunctionClass,
    points: &[usize],
    witnesses: &[WitnessPair],
) -> ShatterCheck {
    let d = points.len();
    let witnesses_ok = witnesses.iter().all(|w| rule.witness_ok(w));
    let realizers: Vec<Option<usize>> = (0..1usize << d)
        .map(|pat| {
            (0..class.n_functions()).find(|&f| {
                (0..d).all(|t| {
                    let sign = if (pat >> (d - 1 - t)) & 1 == 1 { 1 } else { -1 };
                    rule.fits(class.value(f, points[t]), &witnesses[t], sign)
                })
            })
        })
        .collect();
    ShatterCheck {
        shattered: witnesses_ok && realizers.iter().all(Option::is_some),
        realizers,
    }
}

/// Checks whether `points` (distinct) with `witnesses` are shattered.
pub fn is_shattered_nonseq(
    kind: DimKind,
    class: &FunctionClass,
    metric: &Metric,
    points: &[usize],
    witnesses: &[WitnessPair],
    alpha: &Rat,
    beta: Option<&Rat>,
) -> Result<ShatterCheck> {
    if points.len() != witnesses.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} points but {} witnesses",
            points.len(),
            witnesses.len()
        )));
    }
    cap_check("shattered set size", points.len() as u64, MAX_NONSEQ_DIM as u64)?;
    if let Some(&x) = points.iter().find(|&&x| x >= class.n_points()) {
        return Err(Error::IndexOutOfRange {
            what: "point",
            index: x,
            len: class.n_points(),
        });
    }
    let distinct: HashSet<usize> = points.iter().copied().collect();
    if distinct.len() != points.len() {
        return Err(Error::InvalidParameter("shattered points must be distinct".into()));
    }
    let rule = ShatterRule::new(kind, class, metric, alpha, beta)?;
    Ok(check_patterns(&rule, class, points, witnesses))
}

impl ShatterCertificate {
    /// Certificate for the first `k` points; pattern ε keeps the realizer of
    /// ε followed by +1 signs.
    pub fn prefix(&self, k: usize) -> Self {
        let d = self.points.len();
        let k = k.min(d);
        let tail = (1usize << (d - k)) - 1;
        Self {
            kind: self.kind,
            points: self.points[..k].to_vec(),
            witnesses: self.witnesses[..k].to_vec(),
            realizers: (0..1usize << k).map(|p| self.realizers[(p << (d - k)) | tail]).collect(),
        }
    }

    /// True when the points are shattered and every stored realizer fits its
    /// pattern.
    pub fn verify(
        &self,
        class: &FunctionClass,
        metric: &Metric,
        alpha: &Rat,
        beta: Option<&Rat>,
    ) -> Result<bool> {
        let check = is_shattered_nonseq(self.kind, class, metric, &self.points, &self.witnesses, alpha, beta)?;
        if !check.shattered || self.realizers.len() != check.realizers.len() {
            return Ok(false);
        }
        for (p, &f) in self.realizers.iter().enumerate() {
            if f >= class.n_functions() {
                return Ok(false);
            }
            let one = class.subclass(&[f])?;
            if is_shattered_nonseq(self.kind, &one, metric, &self.points, &self.witnesses, alpha, beta)?.realizers[p].is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
