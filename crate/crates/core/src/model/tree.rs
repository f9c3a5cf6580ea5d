use crate::error::{cap_check, Error, Result};

/// Deepest tree that may be materialized (2^24 - 1 labels).
pub const MAX_TREE_DEPTH: usize = 24;

/// A sign sequence ε ∈ {-1, +1}^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    signs: Vec<i8>,
}

impl Path {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("path signs must be -1 or +1".into()));
        }
        Ok(Self { signs })
    }

    /// Path of length `len` whose bits (first sign = most significant, +1 = 1)
    /// spell `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        let signs = (0..len)
            .map(|i| if (index >> (len - 1 - i)) & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { signs }
    }

    /// Inverse of `from_index`.
    pub fn index(&self) -> u64 {
        self.signs
            .iter()
            .fold(0u64, |acc, &s| (acc << 1) | u64::from(s == 1))
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Index of the first `t` signs.
    pub fn prefix_index(&self, t: usize) -> u64 {
        self.signs[..t]
            .iter()
            .fold(0u64, |acc, &s| (acc << 1) | u64::from(s == 1))
    }
}

/// Complete binary tree of depth d stored in heap order. The node at level t
/// (1-based) on prefix ε_{1:t-1} sits at 1-based heap index
/// 2^{t-1} + Σ_{i<t} (ε_i+1)/2 · 2^{t-1-i}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledTree<L> {
    depth: usize,
    labels: Vec<L>,
}

#[inline]
pub fn heap_slot(t: usize, prefix: u64) -> usize {
    (1usize << (t - 1)) + prefix as usize - 1
}

impl<L: Clone> LabeledTree<L> {
    pub fn new(depth: usize, labels: Vec<L>) -> Result<Self> {
        cap_check("tree depth", depth as u64, MAX_TREE_DEPTH as u64)?;
        let want = (1usize << depth) - 1;
        if labels.len() != want {
            return Err(Error::InvalidTree(format!(
                "depth {depth} needs {want} labels, got {}",
                labels.len()
            )));
        }
        Ok(Self { depth, labels })
    }

    /// Builds a tree by asking for the label of each (level, prefix index).
    pub fn from_fn(depth: usize, mut label: impl FnMut(usize, u64) -> L) -> Result<Self> {
        cap_check("tree depth", depth as u64, MAX_TREE_DEPTH as u64)?;
        let mut labels = Vec::with_capacity((1usize << depth) - 1);
        for t in 1..=depth {
            for p in 0..(1u64 << (t - 1)) {
                labels.push(label(t, p));
            }
        }
        Ok(Self { depth, labels })
    }

    /// Tree whose level t carries `levels[t-1]` on every node.
    pub fn constant_levels(levels: &[L]) -> Result<Self> {
        Self::from_fn(levels.len(), |t, _| levels[t - 1].clone())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    /// Label at level `t` (1-based) below the prefix with index `prefix`.
    #[inline]
    pub fn label(&self, t: usize, prefix: u64) -> &L {
        &self.labels[heap_slot(t, prefix)]
    }

    /// x_t(ε): depends only on ε_{1:t-1}; `path` may be longer than t-1.
    pub fn label_at(&self, path: &Path, t: usize) -> Result<&L> {
        if t == 0 || t > self.depth {
            return Err(Error::IndexOutOfRange {
                what: "tree level",
                index: t,
                len: self.depth,
            });
        }
        if path.len() < t - 1 {
            return Err(Error::DimensionMismatch(format!(
                "path of length {} cannot address level {t}",
                path.len()
            )));
        }
        Ok(self.label(t, path.prefix_index(t - 1)))
    }

    /// Labels of level `t` (1-based), ordered by prefix index.
    pub fn level(&self, t: usize) -> &[L] {
        let start = (1usize << (t - 1)) - 1;
        &self.labels[start..start + (1usize << (t - 1))]
    }

    /// Labels met along the full path with index `path` (length = depth).
    pub fn along(&self, path: u64) -> impl Iterator<Item = &L> + '_ {
        (1..=self.depth).map(move |t| self.label(t, path >> (self.depth + 1 - t)))
    }

    /// Left (`right = false`) or right subtree of the root.
    pub fn subtree(&self, right: bool) -> Result<Self> {
        if self.depth == 0 {
            return Err(Error::InvalidTree("empty tree has no subtrees".into()));
        }
        let bit = u64::from(right);
        Self::from_fn(self.depth - 1, |t, p| {
            self.label(t + 1, (bit << (t - 1)) | p).clone()
        })
    }

    /// Tree with the given root and the two equal-depth subtrees below it.
    pub fn join(root: L, left: &Self, right: &Self) -> Result<Self> {
        if left.depth != right.depth {
            return Err(Error::DimensionMismatch(format!(
                "cannot join subtrees of depth {} and {}",
                left.depth, right.depth
            )));
        }
        Self::from_fn(left.depth + 1, |t, p| {
            if t == 1 {
                root.clone()
            } else {
                let side = p >> (t - 2);
                let rest = p & ((1u64 << (t - 2)) - 1);
                if side == 0 {
                    left.label(t - 1, rest).clone()
                } else {
                    right.label(t - 1, rest).clone()
                }
            }
        })
    }

    pub fn map<M: Clone>(&self, f: impl Fn(&L) -> M) -> LabeledTree<M> {
        LabeledTree {
            depth: self.depth,
            labels: self.labels.iter().map(f).collect(),
        }
    }
}

impl<L: Clone + PartialEq> LabeledTree<L> {
    /// True when every level carries a single label.
    pub fn is_constant_level(&self) -> bool {
        (1..=self.depth).all(|t| {
            let lv = self.level(t);
            lv.iter().all(|l| *l == lv[0])
        })
    }

    /// Per-level labels of a constant-level tree.
    pub fn constant_level_labels(&self) -> Option<Vec<L>> {
        self.is_constant_level()
            .then(|| (1..=self.depth).map(|t| self.level(t)[0].clone()).collect())
    }
}
