//! Sequential covers: validation, the inductive construction that splits the
//! class on the root value, an exhaustive minimum for tiny instances, and the
//! discretization that turns a real class into an integer one.

use std::collections::HashMap;

use super::{fset_first, fset_full, fset_iter, FSet, SeqSearch};
use crate::error::{cap_check, Error, Result};
use crate::model::{FunctionClass, LabeledTree, Metric, Rat, ValueGrid};
use crate::rule::DimKind;

/// Cover trees, all of the x-tree's depth, labeled with grid numerators.
pub type SeqCoverSet = Vec<LabeledTree<i64>>;

/// Deepest x-tree accepted by the constructive cover.
pub const MAX_CONSTRUCT_DEPTH: usize = 16;
/// Cap on M^n trees emitted by the n ≤ d base case.
pub const MAX_BASE_TREES: u64 = 1 << 16;
/// Exhaustive minimum caps.
pub const MAX_BRUTE_DEPTH: usize = 3;
pub const MAX_BRUTE_FUNCTIONS: usize = 8;
pub const MAX_BRUTE_TREES: u64 = 1 << 16;

fn check_x_tree(class: &FunctionClass, x_tree: &LabeledTree<usize>) -> Result<()> {
    match x_tree.labels().iter().find(|&&x| x >= class.n_points()) {
        Some(&x) => Err(Error::IndexOutOfRange {
            what: "point",
            index: x,
            len: class.n_points(),
        }),
        None => Ok(()),
    }
}

/// True when for every function and every path some tree stays within α.
pub fn is_seq_cover(
    class: &FunctionClass,
    metric: &Metric,
    x_tree: &LabeledTree<usize>,
    alpha: &Rat,
    trees: &[LabeledTree<i64>],
) -> Result<bool> {
    check_x_tree(class, x_tree)?;
    let n = x_tree.depth();
    cap_check("cover depth", n as u64, 20)?;
    if trees.iter().any(|v| v.depth() != n) {
        return Err(Error::DimensionMismatch("cover tree depth differs from x tree".into()));
    }
    let grid = class.grid();
    if trees.iter().any(|v| v.labels().iter().any(|&l| !grid.contains(l))) {
        return Ok(false);
    }
    Ok((0..class.n_functions()).all(|f| {
        (0..1u64 << n).all(|path| {
            trees.iter().any(|v| {
                x_tree
                    .along(path)
                    .zip(v.along(path))
                    .all(|(&x, &c)| metric.within(grid, class.value(f, x), c, alpha))
            })
        })
    }))
}

/// Builds a sequential cover of an integer-alphabet class by the root-value
/// induction; its size is at most g_M(n, d) with d the sequential gapped
/// dimension at α.
pub fn seq_cover_construct(
    class: &FunctionClass,
    metric: &Metric,
    x_tree: &LabeledTree<usize>,
    alpha: &Rat,
) -> Result<SeqCoverSet> {
    let m = class.grid().m().ok_or_else(|| {
        Error::InvalidClass("the constructive cover needs an integer alphabet".into())
    })?;
    check_x_tree(class, x_tree)?;
    cap_check("x tree depth", x_tree.depth() as u64, MAX_CONSTRUCT_DEPTH as u64)?;
    let search = SeqSearch::new(DimKind::GappedInteger, class, metric, alpha, None)?;
    build(&search, class, &fset_full(class.n_functions()), x_tree, m)
}

fn build(
    search: &SeqSearch,
    class: &FunctionClass,
    g: &FSet,
    x: &LabeledTree<usize>,
    m: i64,
) -> Result<SeqCoverSet> {
    let n = x.depth();
    if n == 0 {
        return Ok(vec![LabeledTree::new(0, vec![])?]);
    }
    let d = search.dim(g) as usize;
    if d == 0 {
        let f0 = fset_first(g).expect("nonempty subclass");
        return Ok(vec![LabeledTree::from_fn(n, |t, p| class.value(f0, *x.label(t, p)))?]);
    }
    if n <= d {
        let count = (m as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        cap_check("base-case cover trees", count, MAX_BASE_TREES)?;
        return (0..count)
            .map(|code| {
                let levels: Vec<i64> = (0..n)
                    .map(|t| 1 + ((code / (m as u64).pow((n - 1 - t) as u32)) % m as u64) as i64)
                    .collect();
                LabeledTree::constant_levels(&levels)
            })
            .collect();
    }
    let root = *x.label(1, 0);
    let left = x.subtree(false)?;
    let right = x.subtree(true)?;
    let words = g.len();
    let mut parts: Vec<FSet> = vec![vec![0u64; words].into_boxed_slice(); m as usize];
    for f in fset_iter(g) {
        let k = (class.value(f, root) - 1) as usize;
        parts[k][f >> 6] |= 1 << (f & 63);
    }
    let nonempty = |s: &FSet| s.iter().any(|&w| w != 0);
    let mut merged = vec![0u64; words].into_boxed_slice();
    let mut singles = Vec::new();
    for (k, part) in parts.iter().enumerate() {
        if !nonempty(part) {
            continue;
        }
        if search.dim(part) as usize == d {
            for (a, b) in merged.iter_mut().zip(part.iter()) {
                *a |= b;
            }
        } else {
            singles.push((k as i64 + 1, part));
        }
    }
    let mut out = Vec::new();
    if nonempty(&merged) {
        let v1 = class.value(fset_first(&merged).expect("nonempty"), root);
        let l = build(search, class, &merged, &left, m)?;
        let r = build(search, class, &merged, &right, m)?;
        out.extend(join_all(v1, &l, &r)?);
    }
    for (k, part) in singles {
        let l = build(search, class, part, &left, m)?;
        let r = build(search, class, part, &right, m)?;
        out.extend(join_all(k, &l, &r)?);
    }
    Ok(out)
}

/// Joins the i-th left and right trees under `root`, repeating the last tree
/// of the shorter list so every child tree is used.
fn join_all(root: i64, l: &[LabeledTree<i64>], r: &[LabeledTree<i64>]) -> Result<SeqCoverSet> {
    let n = l.len().max(r.len());
    (0..n)
        .map(|i| LabeledTree::join(root, &l[i.min(l.len() - 1)], &r[i.min(r.len() - 1)]))
        .collect()
}

/// Exact minimum sequential cover size by enumerating every grid-labeled
/// tree and solving the set cover over (function, path) pairs. Returns the
/// size and one optimal cover.
pub fn seq_cover_min_bruteforce(
    class: &FunctionClass,
    metric: &Metric,
    x_tree: &LabeledTree<usize>,
    alpha: &Rat,
) -> Result<(usize, SeqCoverSet)> {
    check_x_tree(class, x_tree)?;
    metric.validate_for(class.grid())?;
    let n = x_tree.depth();
    cap_check("brute-force depth", n as u64, MAX_BRUTE_DEPTH as u64)?;
    cap_check("brute-force class size", class.n_functions() as u64, MAX_BRUTE_FUNCTIONS as u64)?;
    let grid = class.grid();
    let a = grid.size() as u64;
    let nodes = (1u32 << n) - 1;
    let count = a.checked_pow(nodes).unwrap_or(u64::MAX);
    cap_check("brute-force tree count", count, MAX_BRUTE_TREES)?;
    let paths = 1usize << n;
    let all: u64 = if class.n_functions() * paths == 64 {
        u64::MAX
    } else {
        (1u64 << (class.n_functions() * paths)) - 1
    };

    let decode = |code: u64| -> Vec<i64> {
        (0..nodes)
            .map(|i| grid.min_num() + ((code / a.pow(i)) % a) as i64)
            .collect()
    };
    let mut by_mask: HashMap<u64, u64> = HashMap::new();
    for code in 0..count {
        let tree = LabeledTree::new(n, decode(code))?;
        let mut mask = 0u64;
        for f in 0..class.n_functions() {
            for p in 0..paths {
                let ok = x_tree
                    .along(p as u64)
                    .zip(tree.along(p as u64))
                    .all(|(&x, &c)| metric.within(grid, class.value(f, x), c, alpha));
                if ok {
                    mask |= 1 << (f * paths + p);
                }
            }
        }
        by_mask.entry(mask).or_insert(code);
    }
    let mut masks: Vec<(u64, u64)> = by_mask.into_iter().collect();
    masks.sort_by(|x, y| y.0.count_ones().cmp(&x.0.count_ones()).then(x.0.cmp(&y.0)));
    let mut kept: Vec<(u64, u64)> = Vec::new();
    for (m, c) in masks {
        if !kept.iter().any(|(k, _)| k & m == m) {
            kept.push((m, c));
        }
    }

    fn search(kept: &[(u64, u64)], covered: u64, all: u64, left: usize, pick: &mut Vec<usize>) -> bool {
        if covered == all {
            return true;
        }
        if left == 0 {
            return false;
        }
        let e = (!covered & all).trailing_zeros();
        for (i, (m, _)) in kept.iter().enumerate() {
            if m >> e & 1 == 1 {
                pick.push(i);
                if search(kept, covered | m, all, left - 1, pick) {
                    return true;
                }
                pick.pop();
            }
        }
        false
    }
    for size in 1..=kept.len() {
        let mut pick = Vec::new();
        if search(&kept, 0, all, size, &mut pick) {
            let trees = pick
                .iter()
                .map(|&i| LabeledTree::new(n, decode(kept[i].1)))
                .collect::<Result<Vec<_>>>()?;
            return Ok((size, trees));
        }
    }
    Err(Error::InvalidClass("no sequential cover found".into()))
}

/// A real-grid class mapped to the integer alphabet of β-net indices.
#[derive(Clone, Debug)]
pub struct Discretized {
    pub class: FunctionClass,
    /// |u_i - u_j| on the net points.
    pub metric: Metric,
    /// Net points u_1 < ... < u_M as numerators over the original grid.
    pub net: Vec<i64>,
}

/// Maps each value to the lowest-index net point within β, where
/// u_i = min(-1 + β + 2β(i-1), 1) for i = 1..⌈1/β⌉ covers [-1, 1] at radius β.
pub fn discretize_for_cover(class: &FunctionClass, beta: &Rat) -> Result<Discretized> {
    let grid = class.grid();
    if grid.is_integer() {
        return Err(Error::InvalidClass("discretization needs a real grid".into()));
    }
    crate::model::require_positive("beta", beta)?;
    let b = grid.scale(beta)?;
    let q = grid.q();
    let m = (q + b - 1) / b; // ⌈q / b⌉ = ⌈1/β⌉
    if m < 2 {
        return Err(Error::InvalidParameter("discretization needs beta < 1".into()));
    }
    let net: Vec<i64> = (0..m).map(|i| (-q + b + 2 * b * i).min(q)).collect();
    let index_of = |v: i64| -> i64 {
        1 + net
            .iter()
            .position(|&u| (u - v).abs() <= b)
            .expect("net covers the grid") as i64
    };
    let rows = class
        .rows()
        .map(|r| r.iter().map(|&v| index_of(v)).collect())
        .collect();
    let int_grid = ValueGrid::integer(m)?;
    let table = net
        .iter()
        .map(|&u| net.iter().map(|&w| Metric::Absolute.dist(grid, u, w)).collect())
        .collect();
    Ok(Discretized {
        class: FunctionClass::new(class.domain().to_vec(), int_grid, rows)?,
        metric: Metric::tabulated(table)?,
        net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::g_m;
    use crate::model::rat;
    use num_bigint::BigUint;

    fn int_class(m: i64, rows: Vec<Vec<i64>>) -> FunctionClass {
        let n = rows[0].len();
        FunctionClass::new(FunctionClass::default_domain(n), ValueGrid::integer(m).unwrap(), rows).unwrap()
    }

    #[test]
    fn construct_is_valid_and_bounded() {
        let c = int_class(3, vec![vec![1, 1], vec![1, 3], vec![3, 1], vec![2, 2], vec![3, 3]]);
        let x = LabeledTree::new(2, vec![0, 1, 0]).unwrap();
        let a = rat(1, 1);
        let v = seq_cover_construct(&c, &Metric::Absolute, &x, &a).unwrap();
        assert!(is_seq_cover(&c, &Metric::Absolute, &x, &a, &v).unwrap());
        let d = crate::sequential::seq_gapped_dim_integer(&c, &Metric::Absolute, &a).unwrap().dim;
        assert!(BigUint::from(v.len()) <= g_m(2, d as u64, 3));
        let (best, cover) = seq_cover_min_bruteforce(&c, &Metric::Absolute, &x, &a).unwrap();
        assert!(best <= v.len());
        assert!(is_seq_cover(&c, &Metric::Absolute, &x, &a, &cover).unwrap());
    }

    #[test]
    fn singleton_needs_one_tree() {
        let c = int_class(2, vec![vec![2, 1]]);
        let x = LabeledTree::new(2, vec![0, 1, 1]).unwrap();
        let v = seq_cover_construct(&c, &Metric::Absolute, &x, &rat(1, 1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(seq_cover_min_bruteforce(&c, &Metric::Absolute, &x, &rat(1, 1)).unwrap().0, 1);
    }

    #[test]
    fn discretization_stays_within_beta() {
        let c = FunctionClass::new(vec!["x".into()], ValueGrid::real(8).unwrap(), (-8..=8).map(|v| vec![v]).collect())
            .unwrap();
        let d = discretize_for_cover(&c, &rat(1, 4)).unwrap();
        assert_eq!(d.net, vec![-6, -2, 2, 6]);
        assert_eq!(d.class.n_functions(), 4);
        for v in -8..=8 {
            assert!(d.net.iter().any(|u| (u - v).abs() <= 2));
        }
    }
}
