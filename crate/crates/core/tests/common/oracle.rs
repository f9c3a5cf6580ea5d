//! Brute-force reference answers computed straight from the definitions.
//! Nothing here reuses the library's candidate sets, memo tables or search
//! order; only the data types and the metric lookup are shared.

use std::collections::{BTreeSet, HashSet};

use dimlab::{DimKind, FunctionClass, Metric, Rat};

/// Scale of a shattering question. `beta` is ignored outside gapped-real.
#[derive(Clone, Copy, Debug)]
pub struct Scale {
    pub kind: DimKind,
    pub alpha: Rat,
    pub beta: Rat,
}

/// Real classes under |a - b| are searched on a grid twice as fine, so
/// witnesses and centers between grid points are tried as well.
pub fn search_space(class: &FunctionClass, metric: &Metric) -> FunctionClass {
    if !class.grid().is_integer() && metric.is_absolute() {
        class.refine(2).expect("refinable grid")
    } else {
        class.clone()
    }
}

/// (may take sign -1, may take sign +1) for value `u` against (lo, hi).
fn sides(cls: &FunctionClass, metric: &Metric, sc: &Scale, u: i64, w: (i64, i64)) -> (bool, bool) {
    let g = cls.grid();
    let half = sc.alpha / Rat::from_integer(2);
    let (v, lo, hi) = (g.to_rat(u), g.to_rat(w.0), g.to_rat(w.1));
    match sc.kind {
        DimKind::GappedInteger => (u == w.0, u == w.1),
        DimKind::GappedReal => (metric.dist(g, u, w.0) <= sc.beta, metric.dist(g, u, w.1) <= sc.beta),
        DimKind::Fat => (lo - v >= half, v - hi >= half),
        DimKind::Fixed => (lo - v == half, v - hi == half),
    }
}

fn witnesses(cls: &FunctionClass, metric: &Metric, sc: &Scale) -> Vec<(i64, i64)> {
    let g = cls.grid();
    let vals: Vec<i64> = g.values().collect();
    match sc.kind {
        DimKind::Fat | DimKind::Fixed => vals.iter().map(|&s| (s, s)).collect(),
        _ => {
            let mut out = Vec::new();
            for &a in &vals {
                for &b in &vals {
                    if a != b && metric.dist(g, a, b) >= sc.alpha {
                        out.push((a, b));
                    }
                }
            }
            out
        }
    }
}

type Labels = Vec<(bool, bool)>;

fn all_patterns(chosen: &[&Labels], nf: usize) -> bool {
    let k = chosen.len();
    (0..1usize << k).all(|p| {
        (0..nf).any(|f| {
            (0..k).all(|t| {
                let (m, pl) = chosen[t][f];
                if (p >> (k - 1 - t)) & 1 == 1 {
                    pl
                } else {
                    m
                }
            })
        })
    })
}

fn extend<'a>(per_point: &'a [Vec<Labels>], pts: &[usize], chosen: &mut Vec<&'a Labels>, nf: usize) -> bool {
    if !all_patterns(chosen, nf) {
        return false;
    }
    if chosen.len() == pts.len() {
        return true;
    }
    for v in &per_point[pts[chosen.len()]] {
        chosen.push(v);
        if extend(per_point, pts, chosen, nf) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Largest set of distinct points shattered at `sc`, trying every subset and
/// every witness tuple (witnesses grouped by the labels they induce).
pub fn nonseq_dim(class: &FunctionClass, metric: &Metric, sc: &Scale) -> usize {
    let cls = search_space(class, metric);
    let ws = witnesses(&cls, metric, sc);
    let nf = cls.n_functions();
    let per_point: Vec<Vec<Labels>> = (0..cls.n_points())
        .map(|x| {
            let set: BTreeSet<Labels> = ws
                .iter()
                .map(|&w| (0..nf).map(|f| sides(&cls, metric, sc, cls.value(f, x), w)).collect::<Labels>())
                .filter(|l| l.iter().any(|s| s.0) && l.iter().any(|s| s.1))
                .collect();
            set.into_iter().collect()
        })
        .collect();
    let mut best = 0;
    for mask in 1usize..1 << cls.n_points() {
        let pts: Vec<usize> = (0..cls.n_points()).filter(|x| mask >> x & 1 == 1).collect();
        if pts.len() > best && extend(&per_point, &pts, &mut Vec::new(), nf) {
            best = pts.len();
        }
    }
    best
}

/// Explicit tree: each node holds a point, a witness and two subtrees.
pub enum Tree {
    Leaf,
    Node {
        x: usize,
        w: (i64, i64),
        minus: Box<Tree>,
        plus: Box<Tree>,
    },
}

fn grow(cls: &FunctionClass, metric: &Metric, sc: &Scale, ws: &[(i64, i64)], fs: &[usize], k: usize) -> Option<Tree> {
    if fs.is_empty() {
        return None;
    }
    if k == 0 {
        return Some(Tree::Leaf);
    }
    let mut seen = HashSet::new();
    for x in 0..cls.n_points() {
        for &w in ws {
            let (mut m, mut p) = (Vec::new(), Vec::new());
            for &f in fs {
                let (a, b) = sides(cls, metric, sc, cls.value(f, x), w);
                if a {
                    m.push(f);
                }
                if b {
                    p.push(f);
                }
            }
            if m.is_empty() || p.is_empty() || !seen.insert((m.clone(), p.clone())) {
                continue;
            }
            let Some(l) = grow(cls, metric, sc, ws, &m, k - 1) else { continue };
            let Some(r) = grow(cls, metric, sc, ws, &p, k - 1) else { continue };
            return Some(Tree::Node {
                x,
                w,
                minus: Box::new(l),
                plus: Box::new(r),
            });
        }
    }
    None
}

/// Walks every path of `tree` and asks for some function of the whole class
/// satisfying each node on it.
fn shatters(cls: &FunctionClass, metric: &Metric, sc: &Scale, tree: &Tree, depth: usize) -> bool {
    (0..1u64 << depth).all(|path| {
        let mut steps = Vec::new();
        let mut node = tree;
        for t in 0..depth {
            let Tree::Node { x, w, minus, plus } = node else { return false };
            let plus_sign = (path >> (depth - 1 - t)) & 1 == 1;
            steps.push((*x, *w, plus_sign));
            node = if plus_sign { plus } else { minus };
        }
        (0..cls.n_functions()).any(|f| {
            steps.iter().all(|&(x, w, s)| {
                let (a, b) = sides(cls, metric, sc, cls.value(f, x), w);
                if s {
                    b
                } else {
                    a
                }
            })
        })
    })
}

/// Depth of the deepest shattered tree, found by growing explicit trees and
/// re-checking each one path by path.
pub fn seq_dim(class: &FunctionClass, metric: &Metric, sc: &Scale) -> usize {
    let cls = search_space(class, metric);
    let ws = witnesses(&cls, metric, sc);
    let all: Vec<usize> = (0..cls.n_functions()).collect();
    let mut d = 0;
    while let Some(tree) = grow(&cls, metric, sc, &ws, &all, d + 1) {
        assert!(shatters(&cls, metric, sc, &tree, d + 1), "grown tree fails its own check");
        d += 1;
    }
    d
}

fn linf_at_least(cls: &FunctionClass, metric: &Metric, design: &[usize], f: usize, g: usize, alpha: &Rat) -> bool {
    design
        .iter()
        .any(|&x| metric.dist(cls.grid(), cls.value(f, x), cls.value(g, x)) >= *alpha)
}

/// Minimum number of centers, by set cover over every coverable subset of
/// the class.
pub fn cover_min(class: &FunctionClass, design: &[usize], metric: &Metric, alpha: &Rat) -> usize {
    let cls = search_space(class, metric);
    let g = cls.grid();
    let nf = cls.n_functions();
    assert!(nf <= 16, "oracle cover is exponential in |F|");
    let balls: Vec<Vec<u32>> = design
        .iter()
        .map(|&x| {
            g.values()
                .map(|c| {
                    (0..nf)
                        .filter(|&f| metric.dist(g, cls.value(f, x), c) <= *alpha)
                        .fold(0u32, |m, f| m | 1 << f)
                })
                .collect()
        })
        .collect();
    let full = (1u32 << nf) - 1;
    let coverable: Vec<bool> = (0..=full)
        .map(|s| balls.iter().all(|per_x| per_x.iter().any(|&b| s & b == s)))
        .collect();
    let mut best = vec![usize::MAX; full as usize + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub > 0 {
            if sub & low != 0 && coverable[sub as usize] {
                let rest = best[(mask & !sub) as usize];
                if rest != usize::MAX {
                    best[mask as usize] = best[mask as usize].min(rest + 1);
                }
            }
            sub = (sub - 1) & mask;
        }
    }
    best[full as usize]
}

/// Largest pairwise α-separated subset, trying every subset.
pub fn packing_max(class: &FunctionClass, design: &[usize], metric: &Metric, alpha: &Rat) -> usize {
    let nf = class.n_functions();
    assert!(nf <= 16, "oracle packing is exponential in |F|");
    (0u32..1 << nf)
        .filter(|s| {
            (0..nf).all(|f| {
                (f + 1..nf).all(|g| {
                    s >> f & 1 == 0 || s >> g & 1 == 0 || linf_at_least(class, metric, design, f, g, alpha)
                })
            })
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
