//! Generators for named classes and seeded random instances.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{cap_check, Error, Result};
use crate::io::ClassFile;
use crate::model::{fmt_rat, FunctionClass, Rat, ValueGrid};
use crate::nonseq_dims::ShatterCertificate;
use crate::rule::DimKind;
use crate::rng::SplitMix64;

/// Bound on the size of generated classes.
pub const MAX_GENERATED: usize = 4096;

/// Class with d = log2(1/α) points whose realizers f^ε(x_i) = ε_i a^ε use
/// magnitudes a^ε = α (1 + Σ_i [ε_i = +1] 2^{i-1}), all in [α, 1]. Rows are in
/// pattern order, first sign most significant. `q` defaults to 1/α.
pub fn log_gap_class_nonseq(alpha: &Rat, q: Option<i64>) -> Result<FunctionClass> {
    let inv = Rat::from_integer(1) / alpha;
    let m = if *alpha.numer() == 1 && inv.to_integer() >= 2 && (inv.to_integer() as u64).is_power_of_two() {
        (inv.to_integer() as u64).trailing_zeros() as usize
    } else {
        return Err(Error::InvalidParameter(format!(
            "alpha must be 1/2^m with m >= 1, got {}",
            fmt_rat(alpha)
        )));
    };
    cap_check("log-gap points", m as u64, 12)?;
    let q = q.unwrap_or(1 << m);
    let grid = ValueGrid::real(q)?;
    let unit = grid.scale(alpha)?;
    let rows = (0..1usize << m)
        .map(|pattern| {
            let plus = |i: usize| (pattern >> (m - 1 - i)) & 1 == 1;
            let a = unit * (1 + (0..m).filter(|&i| plus(i)).map(|i| 1i64 << i).sum::<i64>());
            (0..m).map(|i| if plus(i) { a } else { -a }).collect()
        })
        .collect();
    FunctionClass::new(FunctionClass::default_domain(m), grid, rows)
}

/// One domain point and every value k/q of the grid as a constant function.
pub fn single_point_grid_class(q: i64) -> Result<FunctionClass> {
    let grid = ValueGrid::real(q)?;
    let rows = grid.values().map(|v| vec![v]).collect();
    FunctionClass::new(vec!["x".into()], grid, rows)
}

fn product(ranges: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let total = ranges
        .iter()
        .try_fold(1u64, |acc, r| acc.checked_mul(r.len() as u64))
        .unwrap_or(u64::MAX);
    cap_check("generated class size", total, MAX_GENERATED as u64)?;
    let mut rows = vec![Vec::new()];
    for r in ranges {
        rows = rows
            .into_iter()
            .flat_map(|row: Vec<i64>| {
                r.iter().map(move |&v| {
                    let mut next = row.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    Ok(rows)
}

/// Every combination of per-point numerator intervals [lo, hi].
pub fn interval_product_class(intervals: &[(i64, i64)], grid: ValueGrid) -> Result<FunctionClass> {
    let ranges = intervals
        .iter()
        .map(|&(lo, hi)| {
            if lo > hi || !grid.contains(lo) || !grid.contains(hi) {
                return Err(Error::InvalidParameter(format!("bad interval [{lo}, {hi}] on {grid}")));
            }
            Ok((lo..=hi).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    FunctionClass::new(FunctionClass::default_domain(intervals.len()), grid, product(&ranges)?)
}

/// All functions from `n_points` points into the grid.
pub fn full_class(n_points: usize, grid: ValueGrid) -> Result<FunctionClass> {
    let r: Vec<i64> = grid.values().collect();
    FunctionClass::new(FunctionClass::default_domain(n_points), grid, product(&vec![r; n_points])?)
}

/// Closure under pairwise combinations (j a + (r − j) b) / r, 0 < j < r, keeping
/// only combinations that land on the grid, iterated to a fixpoint.
pub fn convexify(class: &FunctionClass, resolution: i64) -> Result<FunctionClass> {
    if resolution < 1 {
        return Err(Error::InvalidParameter("resolution must be positive".into()));
    }
    let mut rows: Vec<Vec<i64>> = class.rows().map(<[i64]>::to_vec).collect();
    let mut seen: HashSet<Vec<i64>> = rows.iter().cloned().collect();
    let mut frontier = 0;
    while frontier < rows.len() {
        let end = rows.len();
        for i in frontier..end {
            for k in 0..end {
                if k >= frontier && k <= i {
                    continue; // pairs inside the new batch are visited once
                }
                for j in 1..resolution {
                    let combo: Option<Vec<i64>> = rows[i]
                        .iter()
                        .zip(&rows[k])
                        .map(|(&a, &b)| {
                            let s = j * a + (resolution - j) * b;
                            (s % resolution == 0).then_some(s / resolution)
                        })
                        .collect();
                    if let Some(c) = combo {
                        if seen.insert(c.clone()) {
                            rows.push(c);
                            cap_check("convexified class size", rows.len() as u64, MAX_GENERATED as u64)?;
                        }
                    }
                }
            }
        }
        frontier = end;
    }
    FunctionClass::new(class.domain().to_vec(), class.grid().clone(), rows)
}

/// Pushes the realizers of a fat-shattering certificate onto the exact
/// margins s_i ± α/2, one coordinate at a time: f ← λ f + (1 − λ) g where g
/// realizes the pattern with sign i flipped and λ puts coordinate i on target.
/// Returns the resulting fixed-scale certificate when every averaged function
/// is a member of the class, `None` when some step leaves the class.
pub fn fixed_scale_by_averaging(
    class: &FunctionClass,
    cert: &ShatterCertificate,
    alpha: &Rat,
) -> Result<Option<ShatterCertificate>> {
    if cert.kind != DimKind::Fat {
        return Err(Error::InvalidParameter("averaging needs a fat-shattering certificate".into()));
    }
    let grid = class.grid();
    let d = cert.points.len();
    let half = alpha / Rat::from_integer(2);
    let index: HashMap<&[i64], usize> = class.rows().enumerate().map(|(i, r)| (r, i)).collect();
    let targets: Vec<Rat> = cert.witnesses.iter().map(|w| grid.to_rat(w.lo)).collect();
    // Any fat realizer of a pattern will do; start from the one closest to the
    // fixed-scale targets so fewer coordinates need averaging.
    let mut rows: Vec<Vec<Rat>> = (0..cert.realizers.len())
        .map(|p| {
            let mut best = cert.realizers[p];
            let mut best_cost = None;
            for f in 0..class.n_functions() {
                let row = class.row(f);
                let mut cost = Rat::from_integer(0);
                let mut ok = true;
                for i in 0..d {
                    let v = grid.to_rat(row[cert.points[i]]);
                    let plus = p & (1usize << (d - 1 - i)) != 0;
                    let dev = if plus { v - targets[i] - half } else { targets[i] - half - v };
                    if dev < Rat::from_integer(0) {
                        ok = false;
                        break;
                    }
                    cost += dev;
                }
                if ok && best_cost.as_ref().map_or(true, |c| cost < *c) {
                    best = f;
                    best_cost = Some(cost);
                }
            }
            class.row(best).iter().map(|&v| grid.to_rat(v)).collect()
        })
        .collect();
    for i in 0..d {
        let x = cert.points[i];
        let s = targets[i];
        let flip = 1usize << (d - 1 - i);
        let next: Vec<Vec<Rat>> = (0..rows.len())
            .map(|p| {
                let plus = p & flip != 0;
                let target = if plus { s + half } else { s - half };
                let (a, b) = (&rows[p], &rows[p ^ flip]);
                if a[x] == target {
                    return a.clone();
                }
                let lambda = (target - b[x]) / (a[x] - b[x]);
                a.iter()
                    .zip(b)
                    .map(|(u, v)| lambda * u + (Rat::from_integer(1) - lambda) * v)
                    .collect()
            })
            .collect();
        rows = next;
    }
    let mut realizers = Vec::with_capacity(rows.len());
    for row in &rows {
        let nums: Option<Vec<i64>> = row.iter().map(|r| grid.scale(r).ok()).collect();
        match nums.and_then(|n| index.get(n.as_slice()).copied()) {
            Some(f) => realizers.push(f),
            None => return Ok(None),
        }
    }
    Ok(Some(ShatterCertificate {
        kind: DimKind::Fixed,
        points: cert.points.clone(),
        witnesses: cert.witnesses.clone(),
        realizers,
    }))
}

/// Uniform grid values from SplitMix64 stream `seed`; duplicate rows dropped.
pub fn random_class(n_functions: usize, n_points: usize, grid: ValueGrid, seed: u64) -> Result<FunctionClass> {
    cap_check("generated class size", n_functions as u64, MAX_GENERATED as u64)?;
    let mut rng = SplitMix64::new(seed);
    let (lo, hi) = (grid.min_num(), grid.max_num());
    let rows = (0..n_functions.max(1))
        .map(|_| (0..n_points).map(|_| rng.range(lo, hi)).collect())
        .collect();
    FunctionClass::new(FunctionClass::default_domain(n_points), grid, rows)
}

/// Functions with values in {-1, 0, 1} on a real grid of step 1/q; duplicate
/// rows dropped. Convexified, these fill the lattice points of their hull.
pub fn random_sign_class(n_functions: usize, n_points: usize, q: i64, seed: u64) -> Result<FunctionClass> {
    cap_check("generated class size", n_functions as u64, MAX_GENERATED as u64)?;
    let grid = ValueGrid::real(q)?;
    let mut rng = SplitMix64::new(seed);
    let rows = (0..n_functions.max(1))
        .map(|_| (0..n_points).map(|_| rng.range(-1, 1) * q).collect())
        .collect();
    FunctionClass::new(FunctionClass::default_domain(n_points), grid, rows)
}

/// A named way to build a class; the corpus and the CLI are lists of these.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassRecipe {
    LogGapNonseq {
        #[serde(with = "crate::io::rat_str")]
        alpha: Rat,
        #[serde(default, rename = "Q", skip_serializing_if = "Option::is_none")]
        q: Option<i64>,
    },
    SinglePointGrid {
        #[serde(rename = "Q")]
        q: i64,
    },
    IntervalProduct {
        #[serde(rename = "Q")]
        q: i64,
        intervals: Vec<(i64, i64)>,
    },
    Full {
        #[serde(default, rename = "Q", skip_serializing_if = "Option::is_none")]
        q: Option<i64>,
        #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
        m: Option<i64>,
        n_points: usize,
    },
    Random {
        #[serde(default, rename = "Q", skip_serializing_if = "Option::is_none")]
        q: Option<i64>,
        #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
        m: Option<i64>,
        n_functions: usize,
        n_points: usize,
        seed: u64,
    },
    RandomSign {
        #[serde(rename = "Q")]
        q: i64,
        n_functions: usize,
        n_points: usize,
        seed: u64,
    },
    Convexify {
        base: Box<ClassRecipe>,
        resolution: i64,
    },
    Inline {
        class: ClassFile,
    },
}

fn grid_of(q: Option<i64>, m: Option<i64>) -> Result<ValueGrid> {
    match (q, m) {
        (Some(q), None) => ValueGrid::real(q),
        (None, Some(m)) => ValueGrid::integer(m),
        _ => Err(Error::InvalidParameter("give exactly one of Q (real grid) or M (integer alphabet)".into())),
    }
}

impl ClassRecipe {
    pub fn build(&self) -> Result<FunctionClass> {
        match self {
            Self::LogGapNonseq { alpha, q } => log_gap_class_nonseq(alpha, *q),
            Self::SinglePointGrid { q } => single_point_grid_class(*q),
            Self::IntervalProduct { q, intervals } => interval_product_class(intervals, ValueGrid::real(*q)?),
            Self::Full { q, m, n_points } => full_class(*n_points, grid_of(*q, *m)?),
            Self::Random {
                q,
                m,
                n_functions,
                n_points,
                seed,
            } => random_class(*n_functions, *n_points, grid_of(*q, *m)?, *seed),
            Self::RandomSign {
                q,
                n_functions,
                n_points,
                seed,
            } => random_sign_class(*n_functions, *n_points, *q, *seed),
            Self::Convexify { base, resolution } => convexify(&base.build()?, *resolution),
            Self::Inline { class } => class.to_class(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    #[test]
    fn log_gap_values() {
        let c = log_gap_class_nonseq(&rat(1, 4), None).unwrap();
        assert_eq!(c.n_points(), 2);
        let mut mags: Vec<i64> = c.rows().map(|r| r[0].abs()).collect();
        mags.sort();
        assert_eq!(mags, vec![1, 2, 3, 4]);
        let c = log_gap_class_nonseq(&rat(1, 2), None).unwrap();
        assert_eq!(c.row(0), &[-1]);
        assert_eq!(c.row(1), &[2]);
        assert!(log_gap_class_nonseq(&rat(3, 4), None).is_err());
    }

    #[test]
    fn small_generators() {
        assert_eq!(single_point_grid_class(4).unwrap().n_functions(), 9);
        let g = ValueGrid::real(2).unwrap();
        assert_eq!(interval_product_class(&[(-1, 1), (0, 2)], g.clone()).unwrap().n_functions(), 9);
        assert_eq!(interval_product_class(&[(1, 1), (0, 0)], g.clone()).unwrap().n_functions(), 1);
        let a = random_class(5, 2, ValueGrid::integer(2).unwrap(), 3).unwrap();
        assert_eq!(a, random_class(5, 2, ValueGrid::integer(2).unwrap(), 3).unwrap());
        assert!(a.n_functions() <= 4);
    }

    #[test]
    fn convexify_adds_midpoint_and_is_idempotent() {
        let g = ValueGrid::real(1).unwrap();
        let c = FunctionClass::new(vec!["x".into()], g, vec![vec![-1], vec![1]]).unwrap();
        let cv = convexify(&c, 2).unwrap();
        assert_eq!(cv.n_functions(), 3);
        assert_eq!(cv.row(2), &[0]);
        assert_eq!(convexify(&cv, 2).unwrap(), cv);
    }

    #[test]
    fn averaging_on_interval_class() {
        let g = ValueGrid::real(4).unwrap();
        let c = interval_product_class(&[(-4, 4), (-4, 4)], g).unwrap();
        let alpha = rat(1, 2);
        let fat = crate::nonseq_dims::fat_dim(&c, &alpha).unwrap();
        assert_eq!(fat.dim, 2);
        let fixed = fixed_scale_by_averaging(&c, &fat.certificate, &alpha).unwrap().unwrap();
        let check = crate::nonseq_dims::is_shattered_nonseq(
            DimKind::Fixed,
            &c,
            &crate::model::Metric::Absolute,
            &fixed.points,
            &fixed.witnesses,
            &alpha,
            None,
        )
        .unwrap();
        assert!(check.shattered);
    }

    #[test]
    fn recipe_json() {
        let r: ClassRecipe = serde_json::from_str(r#"{"kind":"log-gap-nonseq","alpha":"1/8"}"#).unwrap();
        assert_eq!(r.build().unwrap().n_functions(), 8);
        let r: ClassRecipe =
            serde_json::from_str(r#"{"kind":"convexify","base":{"kind":"full","M":3,"n_points":1},"resolution":2}"#)
                .unwrap();
        assert_eq!(r.build().unwrap().n_functions(), 3);
    }
}
