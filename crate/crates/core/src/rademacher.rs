//! Offset Rademacher complexities, exact and Monte Carlo, and the block
//! constructions that lower-bound them from shattering certificates.
//!
//! Every term C ε (f − μ) − (f − μ)² is evaluated over a common denominator:
//! with L = lcm of the value and μ denominators, δ = L (f − μ) and C = cn/cd,
//! cd L² · term = cn L ε δ − cd δ². Path sums are then plain i128 arithmetic.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{cap_check, Error, Result};
use crate::model::{fmt_rat, heap_slot, FunctionClass, LabeledTree, Rat, SampleDesign, WitnessPair};
use crate::nonseq_dims::ShatterCertificate;
use crate::par;
use crate::rng::SplitMix64;
use crate::sequential::TreeShatterCertificate;

pub const MAX_EXACT_N: usize = 20;
/// Paths per parallel chunk are 2^(n − PREFIX_BITS).
const PREFIX_BITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OffsetDesign {
    Sequence { design: SampleDesign, mu: Vec<Rat> },
    Tree { x_tree: LabeledTree<usize>, mu_tree: LabeledTree<Rat> },
}

/// Class, design (sequence or trees), centering μ and offset constant C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffsetInstance {
    pub class: FunctionClass,
    pub design: OffsetDesign,
    pub c: Rat,
}

fn check_mu<'a>(mu: impl Iterator<Item = &'a Rat>) -> Result<()> {
    let one = Rat::from_integer(1);
    for m in mu {
        if m.abs() > one {
            return Err(Error::InvalidParameter(format!("mu entry {} outside [-1, 1]", fmt_rat(m))));
        }
    }
    Ok(())
}

impl OffsetInstance {
    pub fn sequence(class: FunctionClass, design: SampleDesign, mu: Vec<Rat>, c: Rat) -> Result<Self> {
        crate::model::require_positive("C", &c)?;
        if mu.len() != design.len() {
            return Err(Error::DimensionMismatch(format!(
                "design length {} vs mu length {}",
                design.len(),
                mu.len()
            )));
        }
        SampleDesign::new(design.indices().to_vec(), class.n_points())?;
        check_mu(mu.iter())?;
        Ok(Self {
            class,
            design: OffsetDesign::Sequence { design, mu },
            c,
        })
    }

    pub fn tree(class: FunctionClass, x_tree: LabeledTree<usize>, mu_tree: LabeledTree<Rat>, c: Rat) -> Result<Self> {
        crate::model::require_positive("C", &c)?;
        if x_tree.depth() != mu_tree.depth() {
            return Err(Error::DimensionMismatch(format!(
                "x tree depth {} vs mu tree depth {}",
                x_tree.depth(),
                mu_tree.depth()
            )));
        }
        if let Some(&x) = x_tree.labels().iter().find(|&&x| x >= class.n_points()) {
            return Err(Error::IndexOutOfRange {
                what: "point",
                index: x,
                len: class.n_points(),
            });
        }
        check_mu(mu_tree.labels().iter())?;
        Ok(Self {
            class,
            design: OffsetDesign::Tree { x_tree, mu_tree },
            c,
        })
    }

    /// Horizon n.
    pub fn n(&self) -> usize {
        match &self.design {
            OffsetDesign::Sequence { design, .. } => design.len(),
            OffsetDesign::Tree { x_tree, .. } => x_tree.depth(),
        }
    }

    /// Same instance with another offset constant.
    pub fn with_c(&self, c: Rat) -> Result<Self> {
        crate::model::require_positive("C", &c)?;
        Ok(Self { c, ..self.clone() })
    }

    /// The sequence instance read off a constant-level tree instance.
    pub fn flatten(&self) -> Option<Self> {
        match &self.design {
            OffsetDesign::Sequence { .. } => Some(self.clone()),
            OffsetDesign::Tree { x_tree, mu_tree } => {
                let xs = x_tree.constant_level_labels()?;
                let mus = mu_tree.constant_level_labels()?;
                Some(Self {
                    class: self.class.clone(),
                    design: OffsetDesign::Sequence {
                        design: SampleDesign::new(xs, self.class.n_points()).ok()?,
                        mu: mus,
                    },
                    c: self.c,
                })
            }
        }
    }
}

/// Integer scaling shared by the exact and sampled evaluators.
struct Scaled {
    l: i128,
    cn: i128,
    cd: i128,
}

impl Scaled {
    fn new<'a>(inst: &OffsetInstance, mus: impl Iterator<Item = &'a Rat>) -> Self {
        let mut l = inst.class.grid().q() as i128;
        for m in mus {
            l = l.lcm(m.denom());
        }
        Self {
            l,
            cn: *inst.c.numer(),
            cd: *inst.c.denom(),
        }
    }

    /// L (f − μ) for value numerator `v` over `q`.
    #[inline]
    fn delta(&self, v: i64, q: i64, mu: &Rat) -> i128 {
        v as i128 * (self.l / q as i128) - mu.numer() * (self.l / mu.denom())
    }

    /// (linear coefficient, quadratic penalty) of one term.
    #[inline]
    fn term(&self, delta: i128) -> (i128, i128) {
        (self.cn * self.l * delta, self.cd * delta * delta)
    }

    /// Denominator turning a scaled path sum back into the true value.
    fn denominator(&self) -> i128 {
        self.cd * self.l * self.l
    }
}

/// Per-function linear coefficients a[f][t] and total penalties b[f] for a
/// sequence instance.
fn sequence_terms(inst: &OffsetInstance, design: &SampleDesign, mu: &[Rat], s: &Scaled) -> (Vec<Vec<i128>>, Vec<i128>) {
    let q = inst.class.grid().q();
    let mut a = Vec::with_capacity(inst.class.n_functions());
    let mut b = Vec::with_capacity(inst.class.n_functions());
    for f in 0..inst.class.n_functions() {
        let mut row = Vec::with_capacity(design.len());
        let mut pen = 0i128;
        for (&x, m) in design.indices().iter().zip(mu) {
            let (lin, sq) = s.term(s.delta(inst.class.value(f, x), q, m));
            row.push(lin);
            pen += sq;
        }
        a.push(row);
        b.push(pen);
    }
    (a, b)
}

/// Σ over paths with the given top `k` signs (prefix) of max_f, using a Gray
/// walk over the remaining signs.
fn sequence_chunk(a: &[Vec<i128>], b: &[i128], n: usize, k: usize, prefix: u64) -> i128 {
    let nf = a.len();
    let m = n - k;
    // start: remaining signs all −1
    let mut signs: Vec<i128> = (0..n)
        .map(|t| {
            if t < k && (prefix >> (k - 1 - t)) & 1 == 1 {
                1
            } else {
                -1
            }
        })
        .collect();
    let mut sums: Vec<i128> = (0..nf)
        .map(|f| (0..n).map(|t| signs[t] * a[f][t]).sum::<i128>() - b[f])
        .collect();
    let mut total = *sums.iter().max().expect("nonempty class");
    for i in 1u64..(1u64 << m) {
        let bit = i.trailing_zeros() as usize;
        let t = n - 1 - bit;
        let old = signs[t];
        signs[t] = -old;
        for f in 0..nf {
            sums[f] -= 2 * old * a[f][t];
        }
        total += *sums.iter().max().expect("nonempty class");
    }
    total
}

/// E_ε sup_f Σ_t [C ε_t (f(x_t) − μ_t) − (f(x_t) − μ_t)²], exactly.
pub fn offset_rad_nonseq_exact(inst: &OffsetInstance) -> Result<Rat> {
    let OffsetDesign::Sequence { design, mu } = &inst.design else {
        return Err(Error::InvalidParameter("expected a sequence instance".into()));
    };
    let n = design.len();
    cap_check("horizon n", n as u64, MAX_EXACT_N as u64)?;
    let s = Scaled::new(inst, mu.iter());
    let (a, b) = sequence_terms(inst, design, mu, &s);
    let k = n.min(PREFIX_BITS);
    let parts = par::map_range(1usize << k, |p| sequence_chunk(&a, &b, n, k, p as u64));
    let total: i128 = parts.into_iter().sum();
    Ok(Rat::new(total, s.denominator() << n))
}

struct TreeTerms<'a> {
    inst: &'a OffsetInstance,
    x_tree: &'a LabeledTree<usize>,
    mu_tree: &'a LabeledTree<Rat>,
    s: Scaled,
}

impl TreeTerms<'_> {
    /// Updates running sums for the step at (level t, prefix) with sign `sign`.
    fn step(&self, t: usize, prefix: u64, sign: i128, sums: &[i128], out: &mut [i128]) {
        let slot = heap_slot(t, prefix);
        let x = self.x_tree.labels()[slot];
        let mu = &self.mu_tree.labels()[slot];
        let q = self.inst.class.grid().q();
        for (f, o) in out.iter_mut().enumerate() {
            let (lin, sq) = self.s.term(self.s.delta(self.inst.class.value(f, x), q, mu));
            *o = sums[f] + sign * lin - sq;
        }
    }

    /// Σ over all completions below (level t, prefix) of max_f.
    fn subtree(&self, t: usize, prefix: u64, sums: &[i128], scratch: &mut Vec<Vec<i128>>) -> i128 {
        let n = self.x_tree.depth();
        if t > n {
            return *sums.iter().max().expect("nonempty class");
        }
        let mut buf = scratch.pop().unwrap_or_default();
        buf.resize(sums.len(), 0);
        let mut total = 0;
        for bit in 0..2u64 {
            let sign = if bit == 1 { 1 } else { -1 };
            self.step(t, prefix, sign, sums, &mut buf);
            let child = buf.clone();
            total += self.subtree(t + 1, (prefix << 1) | bit, &child, scratch);
        }
        scratch.push(buf);
        total
    }
}

/// E_ε sup_f Σ_t [C ε_t (f(x_t(ε)) − μ_t(ε)) − (f(x_t(ε)) − μ_t(ε))²], exactly.
pub fn offset_rad_seq_exact(inst: &OffsetInstance) -> Result<Rat> {
    let OffsetDesign::Tree { x_tree, mu_tree } = &inst.design else {
        return Err(Error::InvalidParameter("expected a tree instance".into()));
    };
    let n = x_tree.depth();
    cap_check("tree depth n", n as u64, MAX_EXACT_N as u64)?;
    let tt = TreeTerms {
        inst,
        x_tree,
        mu_tree,
        s: Scaled::new(inst, mu_tree.labels().iter()),
    };
    let nf = inst.class.n_functions();
    let k = n.min(PREFIX_BITS);
    // Running sums after the first k levels for every prefix.
    let mut level: Vec<Vec<i128>> = vec![vec![0; nf]];
    for t in 1..=k {
        let mut next = Vec::with_capacity(level.len() * 2);
        for (p, sums) in level.iter().enumerate() {
            for bit in 0..2 {
                let mut out = vec![0; nf];
                tt.step(t, p as u64, if bit == 1 { 1 } else { -1 }, sums, &mut out);
                next.push(out);
            }
        }
        level = next;
    }
    let parts = par::map_range(level.len(), |p| {
        tt.subtree(k + 1, p as u64, &level[p], &mut Vec::new())
    });
    let total: i128 = parts.into_iter().sum();
    Ok(Rat::new(total, tt.s.denominator() << n))
}

/// Sampled estimate: exact mean of the sampled path values and the standard
/// error of that mean.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: Rat,
    pub std_error: f64,
    pub samples: u64,
}

/// Path value sup_f Σ ... for the path with index `path`, scaled.
fn path_value_sequence(a: &[Vec<i128>], b: &[i128], n: usize, path: u64) -> i128 {
    a.iter()
        .zip(b)
        .map(|(row, pen)| {
            row.iter()
                .enumerate()
                .map(|(t, &v)| if (path >> (n - 1 - t)) & 1 == 1 { v } else { -v })
                .sum::<i128>()
                - pen
        })
        .max()
        .expect("nonempty class")
}

fn path_value_tree(tt: &TreeTerms, path: u64) -> i128 {
    let n = tt.x_tree.depth();
    let nf = tt.inst.class.n_functions();
    let mut sums = vec![0i128; nf];
    let mut out = vec![0i128; nf];
    for t in 1..=n {
        let prefix = path >> (n + 1 - t);
        let sign = if (path >> (n - t)) & 1 == 1 { 1 } else { -1 };
        tt.step(t, prefix, sign, &sums, &mut out);
        std::mem::swap(&mut sums, &mut out);
    }
    *sums.iter().max().expect("nonempty class")
}

/// Monte Carlo estimate with `samples` paths drawn from SplitMix64 stream
/// `seed` (sample i uses output i; path bits are its low n bits). With
/// `exhaustive`, the samples are the 2^n paths themselves and the mean is the
/// exact value.
pub fn offset_rad_mc(inst: &OffsetInstance, samples: u64, seed: u64, exhaustive: bool) -> Result<McEstimate> {
    let n = inst.n();
    cap_check("horizon n", n as u64, 63)?;
    let samples = if exhaustive {
        cap_check("horizon n", n as u64, MAX_EXACT_N as u64)?;
        1u64 << n
    } else {
        samples
    };
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let path_of = |i: u64| if exhaustive { i } else { SplitMix64::at(seed, i).next_u64() & mask };

    let chunk = 4096u64;
    let chunks = samples.div_ceil(chunk) as usize;
    let (sum, sum_sq, denom): (i128, i128, i128) = match &inst.design {
        OffsetDesign::Sequence { design, mu } => {
            let s = Scaled::new(inst, mu.iter());
            let (a, b) = sequence_terms(inst, design, mu, &s);
            let parts = par::map_range(chunks, |c| {
                let lo = c as u64 * chunk;
                let hi = (lo + chunk).min(samples);
                (lo..hi).fold((0i128, 0i128), |(s1, s2), i| {
                    let v = path_value_sequence(&a, &b, n, path_of(i));
                    (s1 + v, s2 + v * v)
                })
            });
            let (s1, s2) = parts.into_iter().fold((0, 0), |(x, y), (a, b)| (x + a, y + b));
            (s1, s2, s.denominator())
        }
        OffsetDesign::Tree { x_tree, mu_tree } => {
            let tt = TreeTerms {
                inst,
                x_tree,
                mu_tree,
                s: Scaled::new(inst, mu_tree.labels().iter()),
            };
            let parts = par::map_range(chunks, |c| {
                let lo = c as u64 * chunk;
                let hi = (lo + chunk).min(samples);
                (lo..hi).fold((0i128, 0i128), |(s1, s2), i| {
                    let v = path_value_tree(&tt, path_of(i));
                    (s1 + v, s2 + v * v)
                })
            });
            let (s1, s2) = parts.into_iter().fold((0, 0), |(x, y), (a, b)| (x + a, y + b));
            (s1, s2, tt.s.denominator())
        }
    };
    let nn = samples as i128;
    let mean = Rat::new(sum, denom * nn);
    let std_error = if samples > 1 {
        // exact numerator of Σ (v − mean)² · N, then one float division
        let centered = (sum_sq * nn - sum * sum) as f64;
        let var = centered / (nn as f64) / ((nn - 1) as f64);
        (var.max(0.0) / nn as f64).sqrt() / denom as f64
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error,
        samples,
    })
}

/// k = max(⌊1 / gap²⌋, 1) for a witness gap given as a rational.
pub fn block_length(gap: &Rat) -> Result<usize> {
    if gap.is_zero() {
        return Err(Error::InvalidParameter("witness gap must be nonzero".into()));
    }
    let inv_sq = Rat::from_integer(1) / (gap * gap);
    Ok((inv_sq.floor().to_integer() as usize).max(1))
}

fn gap_of(class: &FunctionClass, w: &WitnessPair) -> Rat {
    class.grid().to_rat(w.hi) - class.grid().to_rat(w.lo)
}

fn midpoint(class: &FunctionClass, w: &WitnessPair) -> Rat {
    (class.grid().to_rat(w.lo) + class.grid().to_rat(w.hi)) / Rat::from_integer(2)
}

/// Non-sequential block design: point t < d repeated k_t times with μ at the
/// witness midpoint, then the last point for the remaining n − Σ_{t<d} k_t
/// rounds with μ = s_d[+1].
pub fn build_block_design_nonseq(
    class: &FunctionClass,
    cert: &ShatterCertificate,
    n: usize,
    c: Rat,
) -> Result<OffsetInstance> {
    let d = cert.points.len();
    if d == 0 {
        return Err(Error::InvalidParameter("block design needs a certificate of size at least 1".into()));
    }
    let ks = cert
        .witnesses
        .iter()
        .map(|w| block_length(&gap_of(class, w)))
        .collect::<Result<Vec<_>>>()?;
    let head: usize = ks[..d - 1].iter().sum();
    if head > n {
        return Err(Error::BudgetTooSmall { needed: head, n });
    }
    let mut xs = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    for t in 0..d - 1 {
        xs.extend(std::iter::repeat_n(cert.points[t], ks[t]));
        mu.extend(std::iter::repeat_n(midpoint(class, &cert.witnesses[t]), ks[t]));
    }
    let last = &cert.witnesses[d - 1];
    xs.extend(std::iter::repeat_n(cert.points[d - 1], n - head));
    mu.extend(std::iter::repeat_n(class.grid().to_rat(last.hi), n - head));
    OffsetInstance::sequence(class.clone(), SampleDesign::new(xs, class.n_points())?, mu, c)
}

/// Largest Σ_t k_t over the paths of a witness tree.
pub fn max_block_budget(class: &FunctionClass, witness_tree: &LabeledTree<WitnessPair>) -> Result<usize> {
    fn go(class: &FunctionClass, w: &LabeledTree<WitnessPair>, t: usize, p: u64) -> Result<usize> {
        if t > w.depth() {
            return Ok(0);
        }
        let k = block_length(&gap_of(class, w.label(t, p)))?;
        Ok(k + go(class, w, t + 1, p << 1)?.max(go(class, w, t + 1, (p << 1) | 1)?))
    }
    go(class, witness_tree, 1, 0)
}

/// Sequential block trees. Along each path the signs are cut into blocks; the
/// block for shattered level t has length k_t read from the witness at the
/// node reached by the aggregated signs ε̃_{1:t-1}, and ε̃_t = +1 iff the block's
/// signs sum to ≥ 0. Rounds after the last block use domain point 0 with
/// μ = f^{ε̃}(x_0).
pub fn build_block_tree_seq(
    class: &FunctionClass,
    cert: &TreeShatterCertificate,
    n: usize,
    c: Rat,
) -> Result<OffsetInstance> {
    let d = cert.depth();
    let needed = max_block_budget(class, &cert.witness_tree)?;
    if needed > n {
        return Err(Error::BudgetTooSmall { needed, n });
    }
    cap_check("tree depth n", n as u64, crate::model::MAX_TREE_DEPTH as u64)?;
    let ks = cert.witness_tree.map(|w| block_length(&gap_of(class, w)).unwrap_or(1));
    // For the node at round t with prefix bits ε_{1:t-1}, return (x, μ).
    let locate = |t: usize, prefix: u64| -> (usize, Rat) {
        let read = |i: usize| (prefix >> (t - 2 - i)) & 1 == 1; // sign i (0-based) of the prefix
        let mut pos = 0usize;
        let mut agg = 0u64;
        for s in 1..=d {
            let k = *ks.label(s, agg);
            if pos + k <= t - 1 {
                let sum: i64 = (pos..pos + k).map(|i| if read(i) { 1 } else { -1 }).sum();
                agg = (agg << 1) | u64::from(sum >= 0);
                pos += k;
            } else {
                let slot = heap_slot(s, agg);
                let w = &cert.witness_tree.labels()[slot];
                return (cert.x_tree.labels()[slot], midpoint(class, w));
            }
        }
        let f = cert.realizers[agg as usize];
        (0, class.grid().to_rat(class.value(f, 0)))
    };
    let x_tree = LabeledTree::from_fn(n, |t, p| locate(t, p).0)?;
    let mu_tree = LabeledTree::from_fn(n, |t, p| locate(t, p).1)?;
    OffsetInstance::tree(class.clone(), x_tree, mu_tree, c)
}
