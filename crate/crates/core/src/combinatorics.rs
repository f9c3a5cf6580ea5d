//! Counting utilities: g_M, binomials, Khintchine means, sign patterns.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{cap_check, Error, Result};
use crate::model::{Path, Rat};

/// Cap on `sign_patterns` depth.
pub const MAX_SIGN_DEPTH: usize = 25;
/// Cap on the bit-indexed pattern set.
pub const MAX_PATTERN_DEPTH: usize = 25;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// g_M(n, d) = Σ_{i=0}^{d} C(n, i) (M-1)^i.
pub fn g_m(n: u64, d: u64, m: u64) -> BigUint {
    let base = BigUint::from(m.saturating_sub(1));
    let mut pow = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..=d.min(n) {
        sum += binomial(n, i) * &pow;
        pow *= &base;
    }
    sum
}

/// E|(1/k) Σ_{i≤k} ε_i| for independent uniform signs, exactly.
pub fn khintchine_abs_mean(k: u32) -> Result<Rat> {
    if !(1..=30).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "khintchine_abs_mean needs 1 <= k <= 30, got {k}"
        )));
    }
    let k = k as i128;
    let mut total: i128 = 0;
    let mut c: i128 = 1; // C(k, j)
    for j in 0..=k {
        total += c * (2 * j - k).abs();
        c = c * (k - j) / (j + 1);
    }
    Ok(Rat::new(total, k << k))
}

/// All paths of length `d` in index order (first sign most significant,
/// -1 before +1).
pub fn sign_patterns(d: usize) -> Result<impl Iterator<Item = Path>> {
    cap_check("sign pattern depth", d as u64, MAX_SIGN_DEPTH as u64)?;
    Ok((0..(1u64 << d)).map(move |i| Path::from_index(i, d)))
}

/// Subset of {-1, +1}^d as a bitset over pattern indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPatternSet {
    d: usize,
    words: Vec<u64>,
}

impl SignPatternSet {
    pub fn new(d: usize) -> Result<Self> {
        cap_check("pattern set depth", d as u64, MAX_PATTERN_DEPTH as u64)?;
        let n = 1usize << d;
        Ok(Self {
            d,
            words: vec![0; n.div_ceil(64)],
        })
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn len_patterns(&self) -> usize {
        1usize << self.d
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len_patterns()
    }

    /// Inserts every pattern agreeing with `fixed` outside `free` (bit masks
    /// over pattern indices).
    pub fn insert_cube(&mut self, fixed: usize, free: usize) {
        let mut sub = free;
        loop {
            self.insert(fixed | sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len_patterns()).filter(move |&i| self.contains(i))
    }
}

/// k-subsets of 0..n in lexicographic order.
pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        cur: (k <= n).then(|| (0..k).collect()),
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(out)
    }
}
