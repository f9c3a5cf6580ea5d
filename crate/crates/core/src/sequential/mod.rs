//! Tree shattering: sequential gapped dimensions, sfat, and sequential covers.
//!
//! Dimensions use the recursion
//! dim(G) = max over (x, witness) of 1 + min(dim(G_-), dim(G_+)),
//! where G_± are the functions of G realizing each side of the witness at x.
//! Children are disjoint for every supported kind, so dim(G) ≤ ⌊log2 |G|⌋,
//! which bounds the search. Subclass values are memoized in a concurrent map.

pub mod cover;

pub use cover::{
    discretize_for_cover, is_seq_cover, seq_cover_construct, seq_cover_min_bruteforce,
    Discretized, SeqCoverSet,
};

use dashmap::DashMap;

use crate::error::{cap_check, Error, Result};
use crate::model::{FunctionClass, LabeledTree, Metric, Rat, WitnessPair, MAX_TREE_DEPTH};
use crate::nonseq_dims::ShatterCheck;
use crate::par;
use crate::rule::{DimKind, ShatterRule, MINUS, PLUS};

/// Set of function indices as a bitset.
pub(crate) type FSet = Box<[u64]>;

pub(crate) fn fset_full(n: usize) -> FSet {
    let mut v = vec![0u64; n.div_ceil(64)];
    for i in 0..n {
        v[i >> 6] |= 1 << (i & 63);
    }
    v.into_boxed_slice()
}

pub(crate) fn fset_iter(s: &FSet) -> impl Iterator<Item = usize> + '_ {
    s.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            }
        })
    })
}

pub(crate) fn fset_len(s: &FSet) -> u32 {
    s.iter().map(|w| w.count_ones()).sum()
}

pub(crate) fn fset_first(s: &FSet) -> Option<usize> {
    fset_iter(s).next()
}

fn floor_log2(n: u32) -> u32 {
    31 - n.max(1).leading_zeros()
}

/// Shattered x-tree, witness tree and one realizer per path (indexed by path
/// index, first sign most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShatterCertificate {
    pub kind: DimKind,
    pub x_tree: LabeledTree<usize>,
    pub witness_tree: LabeledTree<WitnessPair>,
    pub realizers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqDimResult {
    pub dim: usize,
    pub certificate: TreeShatterCertificate,
}

/// Memoized recursion over subclasses.
pub(crate) struct SeqSearch<'a> {
    rule: ShatterRule,
    class: &'a FunctionClass,
    memo: DashMap<FSet, u32>,
}

impl<'a> SeqSearch<'a> {
    pub(crate) fn new(
        kind: DimKind,
        class: &'a FunctionClass,
        metric: &Metric,
        alpha: &Rat,
        beta: Option<&Rat>,
    ) -> Result<Self> {
        if kind == DimKind::Fixed {
            return Err(Error::InvalidParameter(
                "no sequential fixed-scale dimension is defined".into(),
            ));
        }
        let rule = ShatterRule::new(kind, class, metric, alpha, beta)?;
        if kind == DimKind::GappedReal {
            // Children must be disjoint, otherwise one function can follow
            // every path and the dimension is unbounded.
            if let Some(b) = beta {
                if *b * Rat::from_integer(2) >= *alpha {
                    return Err(Error::InvalidParameter(
                        "sequential gapped-real dimension needs 2 beta < alpha".into(),
                    ));
                }
            }
        }
        Ok(Self {
            rule,
            class,
            memo: DashMap::new(),
        })
    }

    /// Candidate splits of `g` at point `x`: (witness, minus side, plus side),
    /// both sides nonempty, in witness order, duplicates of earlier splits
    /// removed.
    fn splits(&self, g: &FSet, x: usize) -> Vec<(WitnessPair, FSet, FSet)> {
        let mut vals: Vec<i64> = fset_iter(g).map(|f| self.class.value(f, x)).collect();
        vals.sort_unstable();
        vals.dedup();
        let mut out: Vec<(WitnessPair, FSet, FSet)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for w in self.rule.candidates(&vals) {
            let mut lo = vec![0u64; g.len()].into_boxed_slice();
            let mut hi = vec![0u64; g.len()].into_boxed_slice();
            for f in fset_iter(g) {
                let l = self.rule.labels(self.class.value(f, x), &w);
                if l & MINUS != 0 {
                    lo[f >> 6] |= 1 << (f & 63);
                }
                if l & PLUS != 0 {
                    hi[f >> 6] |= 1 << (f & 63);
                }
            }
            if lo.iter().all(|&v| v == 0) || hi.iter().all(|&v| v == 0) {
                continue;
            }
            if seen.insert((lo.clone(), hi.clone())) {
                out.push((w, lo, hi));
            }
        }
        out
    }

    pub(crate) fn dim(&self, g: &FSet) -> u32 {
        if let Some(v) = self.memo.get(g) {
            return *v;
        }
        let ub = floor_log2(fset_len(g));
        let mut best = 0;
        'outer: for x in 0..self.class.n_points() {
            if best >= ub {
                break;
            }
            for (_, lo, hi) in self.splits(g, x) {
                best = best.max(self.split_value(&lo, &hi, best));
                if best >= ub {
                    break 'outer;
                }
            }
        }
        self.memo.insert(g.clone(), best);
        best
    }

    /// 1 + min(dim(lo), dim(hi)), or something ≤ `floor` when that cannot
    /// beat `floor`.
    fn split_value(&self, lo: &FSet, hi: &FSet, floor: u32) -> u32 {
        let (a, b) = if fset_len(lo) <= fset_len(hi) { (lo, hi) } else { (hi, lo) };
        if 1 + floor_log2(fset_len(a)) <= floor {
            return floor;
        }
        let da = self.dim(a);
        if 1 + da <= floor {
            return floor;
        }
        1 + da.min(self.dim(b))
    }

    /// Dimension of the full class; root splits are evaluated in parallel.
    pub(crate) fn top(&self) -> u32 {
        let full = fset_full(self.class.n_functions());
        if let Some(v) = self.memo.get(&full) {
            return *v;
        }
        let splits: Vec<(FSet, FSet)> = (0..self.class.n_points())
            .flat_map(|x| self.splits(&full, x).into_iter().map(|(_, l, h)| (l, h)))
            .collect();
        let vals = par::map_slice(&splits, |(l, h)| self.split_value(l, h, 0));
        let best = vals.into_iter().max().unwrap_or(0);
        self.memo.insert(full, best);
        best
    }

    /// Certificate trees of depth `d` for the full class.
    fn certificate(&self, d: usize) -> Result<TreeShatterCertificate> {
        cap_check("certificate depth", d as u64, MAX_TREE_DEPTH as u64)?;
        let nodes = (1usize << d) - 1;
        let mut xs = vec![0usize; nodes];
        let mut ws = vec![WitnessPair::scalar(0); nodes];
        let mut realizers = vec![0usize; 1usize << d];
        let full = fset_full(self.class.n_functions());
        self.fill(&full, d, 1, 0, d, &mut xs, &mut ws, &mut realizers);
        Ok(TreeShatterCertificate {
            kind: self.rule.kind(),
            x_tree: LabeledTree::new(d, xs)?,
            witness_tree: LabeledTree::new(d, ws)?,
            realizers,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        g: &FSet,
        remaining: usize,
        t: usize,
        prefix: u64,
        depth: usize,
        xs: &mut [usize],
        ws: &mut [WitnessPair],
        realizers: &mut [usize],
    ) {
        if remaining == 0 {
            realizers[prefix as usize] = fset_first(g).expect("nonempty subclass");
            return;
        }
        let need = (remaining - 1) as u32;
        for x in 0..self.class.n_points() {
            for (w, lo, hi) in self.splits(g, x) {
                if self.dim(&lo) >= need && self.dim(&hi) >= need {
                    let slot = crate::model::heap_slot(t, prefix);
                    xs[slot] = x;
                    ws[slot] = w;
                    self.fill(&lo, remaining - 1, t + 1, prefix << 1, depth, xs, ws, realizers);
                    self.fill(&hi, remaining - 1, t + 1, (prefix << 1) | 1, depth, xs, ws, realizers);
                    return;
                }
            }
        }
        unreachable!("memoized dimension promised a split");
    }
}

fn seq_dimension(
    kind: DimKind,
    class: &FunctionClass,
    metric: &Metric,
    alpha: &Rat,
    beta: Option<&Rat>,
) -> Result<SeqDimResult> {
    let search = SeqSearch::new(kind, class, metric, alpha, beta)?;
    let d = search.top() as usize;
    let certificate = search.certificate(d)?;
    Ok(SeqDimResult { dim: d, certificate })
}

pub fn seq_gapped_dim_integer(class: &FunctionClass, metric: &Metric, alpha: &Rat) -> Result<SeqDimResult> {
    seq_dimension(DimKind::GappedInteger, class, metric, alpha, None)
}

/// Requires 2β < α.
pub fn seq_gapped_dim_real(
    class: &FunctionClass,
    metric: &Metric,
    alpha: &Rat,
    beta: &Rat,
) -> Result<SeqDimResult> {
    seq_dimension(DimKind::GappedReal, class, metric, alpha, Some(beta))
}

pub fn sfat_dim(class: &FunctionClass, alpha: &Rat) -> Result<SeqDimResult> {
    seq_dimension(DimKind::Fat, class, &Metric::Absolute, alpha, None)
}

/// Checks every path of the trees; realizers are lowest-index per path.
pub fn is_tree_shattered(
    kind: DimKind,
    class: &FunctionClass,
    metric: &Metric,
    x_tree: &LabeledTree<usize>,
    witness_tree: &LabeledTree<WitnessPair>,
    alpha: &Rat,
    beta: Option<&Rat>,
) -> Result<ShatterCheck> {
    if x_tree.depth() != witness_tree.depth() {
        return Err(Error::DimensionMismatch(format!(
            "x tree depth {} vs witness tree depth {}",
            x_tree.depth(),
            witness_tree.depth()
        )));
    }
    if let Some(&x) = x_tree.labels().iter().find(|&&x| x >= class.n_points()) {
        return Err(Error::IndexOutOfRange {
            what: "point",
            index: x,
            len: class.n_points(),
        });
    }
    let d = x_tree.depth();
    cap_check("tree depth", d as u64, 20)?;
    let rule = ShatterRule::new(kind, class, metric, alpha, beta)?;
    let witnesses_ok = witness_tree.labels().iter().all(|w| rule.witness_ok(w));
    let realizers: Vec<Option<usize>> = (0..1u64 << d)
        .map(|path| {
            (0..class.n_functions()).find(|&f| {
                (1..=d).all(|t| {
                    let prefix = path >> (d + 1 - t);
                    let sign = if (path >> (d - t)) & 1 == 1 { 1 } else { -1 };
                    rule.fits(
                        class.value(f, *x_tree.label(t, prefix)),
                        witness_tree.label(t, prefix),
                        sign,
                    )
                })
            })
        })
        .collect();
    Ok(ShatterCheck {
        shattered: witnesses_ok && realizers.iter().all(Option::is_some),
        realizers,
    })
}

impl TreeShatterCertificate {
    pub fn depth(&self) -> usize {
        self.x_tree.depth()
    }

    /// Certificate for the top `k` levels; path ε keeps the realizer of ε
    /// followed by +1 signs.
    pub fn prefix(&self, k: usize) -> Self {
        let d = self.depth();
        let k = k.min(d);
        let slots = (1usize << k) - 1;
        let tail = (1usize << (d - k)) - 1;
        Self {
            kind: self.kind,
            x_tree: LabeledTree::new(k, self.x_tree.labels()[..slots].to_vec()).expect("prefix of a tree"),
            witness_tree: LabeledTree::new(k, self.witness_tree.labels()[..slots].to_vec())
                .expect("prefix of a tree"),
            realizers: (0..1usize << k).map(|p| self.realizers[(p << (d - k)) | tail]).collect(),
        }
    }

    /// True when the trees are shattered and every stored realizer fits its path.
    pub fn verify(
        &self,
        class: &FunctionClass,
        metric: &Metric,
        alpha: &Rat,
        beta: Option<&Rat>,
    ) -> Result<bool> {
        let check = is_tree_shattered(self.kind, class, metric, &self.x_tree, &self.witness_tree, alpha, beta)?;
        if !check.shattered || self.realizers.len() != check.realizers.len() {
            return Ok(false);
        }
        for (p, &f) in self.realizers.iter().enumerate() {
            if f >= class.n_functions() {
                return Ok(false);
            }
            let one = class.subclass(&[f])?;
            if is_tree_shattered(self.kind, &one, metric, &self.x_tree, &self.witness_tree, alpha, beta)?.realizers[p].is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
