//! Minimum ℓ∞ covers and maximum packings of a class on a sample design.
//!
//! A set of functions can share one center iff, coordinate by coordinate, the
//! α-balls around their values intersect on the grid. The exact cover is a
//! branch and bound that assigns functions (in decreasing eccentricity) to
//! open groups or a new group, seeded with the first-fit cover as incumbent and
//! a pairwise-incompatible clique as lower bound.

use crate::error::{cap_check, Result};
use crate::model::{FunctionClass, Metric, Rat, SampleDesign, ValueGrid};

pub const MAX_EXACT_COVER: usize = 20;
pub const MAX_EXACT_PACKING: usize = 25;

/// Centers (grid numerator vectors over the design) and, per function, the
/// index of its center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSet {
    pub centers: Vec<Vec<i64>>,
    pub assignment: Vec<usize>,
}

impl CoverSet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Distinct projections of the class onto the design.
struct Projection {
    vectors: Vec<Vec<i64>>,
    /// function -> vector
    owner: Vec<usize>,
    /// vector -> lowest function index with that projection
    first: Vec<usize>,
}

fn project(class: &FunctionClass, design: &SampleDesign) -> Projection {
    let mut vectors: Vec<Vec<i64>> = Vec::new();
    let mut first = Vec::new();
    let mut owner = Vec::with_capacity(class.n_functions());
    let mut index = std::collections::HashMap::new();
    for f in 0..class.n_functions() {
        let v: Vec<i64> = design.indices().iter().map(|&x| class.value(f, x)).collect();
        let id = *index.entry(v.clone()).or_insert_with(|| {
            vectors.push(v);
            first.push(f);
            vectors.len() - 1
        });
        owner.push(id);
    }
    Projection {
        vectors,
        owner,
        first,
    }
}

/// Feasible centers for one coordinate.
#[derive(Clone, Debug)]
enum Feasible {
    /// Inclusive numerator interval (absolute metric).
    Interval(i64, i64),
    /// Bitset over alphabet positions (tabulated metric).
    Bits(Vec<u64>),
}

struct Balls<'a> {
    grid: &'a ValueGrid,
    metric: &'a Metric,
    alpha: Rat,
    /// floor(α q) for the absolute metric
    radius: i64,
}

impl<'a> Balls<'a> {
    fn new(grid: &'a ValueGrid, metric: &'a Metric, alpha: &Rat) -> Self {
        let scaled = alpha * Rat::from_integer(grid.q() as i128);
        Self {
            grid,
            metric,
            alpha: *alpha,
            radius: scaled.floor().to_integer() as i64,
        }
    }

    fn ball(&self, u: i64) -> Feasible {
        match self.metric {
            Metric::Absolute => Feasible::Interval(
                (u - self.radius).max(self.grid.min_num()),
                (u + self.radius).min(self.grid.max_num()),
            ),
            Metric::Tabulated { .. } => {
                let mut bits = vec![0u64; self.grid.size().div_ceil(64)];
                for c in self.grid.values() {
                    if self.metric.within(self.grid, u, c, &self.alpha) {
                        let i = self.grid.index_of(c);
                        bits[i >> 6] |= 1 << (i & 63);
                    }
                }
                Feasible::Bits(bits)
            }
        }
    }

    fn meet(a: &Feasible, b: &Feasible) -> Option<Feasible> {
        match (a, b) {
            (Feasible::Interval(l1, h1), Feasible::Interval(l2, h2)) => {
                let (l, h) = ((*l1).max(*l2), (*h1).min(*h2));
                (l <= h).then_some(Feasible::Interval(l, h))
            }
            (Feasible::Bits(x), Feasible::Bits(y)) => {
                let z: Vec<u64> = x.iter().zip(y).map(|(a, b)| a & b).collect();
                z.iter().any(|&w| w != 0).then_some(Feasible::Bits(z))
            }
            _ => unreachable!("mixed feasibility kinds"),
        }
    }

    /// Floor midpoint of the interval, or the smallest feasible value.
    fn center(&self, f: &Feasible) -> i64 {
        match f {
            Feasible::Interval(l, h) => (l + h).div_euclid(2),
            Feasible::Bits(bits) => {
                let i = bits
                    .iter()
                    .enumerate()
                    .find(|(_, &w)| w != 0)
                    .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
                    .expect("nonempty feasibility");
                self.grid.min_num() + i as i64
            }
        }
    }

    fn vector_ball(&self, v: &[i64]) -> Vec<Feasible> {
        v.iter().map(|&u| self.ball(u)).collect()
    }

    fn meet_all(a: &[Feasible], b: &[Feasible]) -> Option<Vec<Feasible>> {
        a.iter().zip(b).map(|(x, y)| Self::meet(x, y)).collect()
    }
}

fn linf(grid: &ValueGrid, metric: &Metric, a: &[i64], b: &[i64]) -> Rat {
    a.iter()
        .zip(b)
        .map(|(&u, &v)| metric.dist(grid, u, v))
        .max()
        .unwrap_or_else(|| Rat::from_integer(0))
}

/// Vector indices by decreasing eccentricity, ties by index.
fn eccentricity_order(grid: &ValueGrid, metric: &Metric, vs: &[Vec<i64>]) -> Vec<usize> {
    let ecc: Vec<Rat> = vs
        .iter()
        .map(|a| {
            vs.iter()
                .map(|b| linf(grid, metric, a, b))
                .max()
                .unwrap_or_else(|| Rat::from_integer(0))
        })
        .collect();
    let mut order: Vec<usize> = (0..vs.len()).collect();
    order.sort_by(|&i, &j| ecc[j].cmp(&ecc[i]).then(i.cmp(&j)));
    order
}

#[derive(Clone)]
struct Group {
    feas: Vec<Feasible>,
    members: Vec<usize>,
}

fn first_fit(balls: &[Vec<Feasible>], order: &[usize]) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    for &i in order {
        let slot = groups
            .iter()
            .position(|g| Balls::meet_all(&g.feas, &balls[i]).is_some());
        match slot {
            Some(k) => {
                let g = &mut groups[k];
                g.feas = Balls::meet_all(&g.feas, &balls[i]).expect("checked");
                g.members.push(i);
            }
            None => groups.push(Group {
                feas: balls[i].clone(),
                members: vec![i],
            }),
        }
    }
    groups
}

fn assemble(balls_ctx: &Balls, proj: &Projection, groups: &[Group]) -> CoverSet {
    let mut vec_to_group = vec![0usize; proj.vectors.len()];
    for (k, g) in groups.iter().enumerate() {
        for &m in &g.members {
            vec_to_group[m] = k;
        }
    }
    CoverSet {
        centers: groups
            .iter()
            .map(|g| g.feas.iter().map(|f| balls_ctx.center(f)).collect())
            .collect(),
        assignment: proj.owner.iter().map(|&v| vec_to_group[v]).collect(),
    }
}

/// A valid cover from first-fit assignment in decreasing eccentricity order.
pub fn cover_greedy(
    class: &FunctionClass,
    design: &SampleDesign,
    metric: &Metric,
    alpha: &Rat,
) -> Result<CoverSet> {
    metric.validate_for(class.grid())?;
    crate::model::require_positive("alpha", alpha)?;
    let proj = project(class, design);
    let ctx = Balls::new(class.grid(), metric, alpha);
    let balls: Vec<Vec<Feasible>> = proj.vectors.iter().map(|v| ctx.vector_ball(v)).collect();
    let order = eccentricity_order(class.grid(), metric, &proj.vectors);
    let groups = first_fit(&balls, &order);
    Ok(assemble(&ctx, &proj, &groups))
}

/// Minimum number of grid centers covering the class at scale α.
pub fn cover_min_exact(
    class: &FunctionClass,
    design: &SampleDesign,
    metric: &Metric,
    alpha: &Rat,
) -> Result<CoverSet> {
    metric.validate_for(class.grid())?;
    crate::model::require_positive("alpha", alpha)?;
    let proj = project(class, design);
    cap_check("distinct projected functions", proj.vectors.len() as u64, MAX_EXACT_COVER as u64)?;
    let ctx = Balls::new(class.grid(), metric, alpha);
    let balls: Vec<Vec<Feasible>> = proj.vectors.iter().map(|v| ctx.vector_ball(v)).collect();
    let order = eccentricity_order(class.grid(), metric, &proj.vectors);

    let mut best = first_fit(&balls, &order);
    // Pairwise incompatible functions need distinct centers.
    let mut clique: Vec<usize> = Vec::new();
    for &i in &order {
        if clique
            .iter()
            .all(|&j| Balls::meet_all(&balls[i], &balls[j]).is_none())
        {
            clique.push(i);
        }
    }
    let lower = clique.len();

    struct Search<'s> {
        balls: &'s [Vec<Feasible>],
        order: &'s [usize],
        lower: usize,
    }
    fn go(s: &Search, i: usize, groups: &mut Vec<Group>, best: &mut Vec<Group>) {
        if groups.len() >= best.len() || best.len() == s.lower {
            return;
        }
        if i == s.order.len() {
            *best = groups.clone();
            return;
        }
        let v = s.order[i];
        for k in 0..groups.len() {
            if let Some(feas) = Balls::meet_all(&groups[k].feas, &s.balls[v]) {
                let saved = std::mem::replace(&mut groups[k].feas, feas);
                groups[k].members.push(v);
                go(s, i + 1, groups, best);
                groups[k].members.pop();
                groups[k].feas = saved;
            }
        }
        if groups.len() + 1 < best.len() {
            groups.push(Group {
                feas: s.balls[v].clone(),
                members: vec![v],
            });
            go(s, i + 1, groups, best);
            groups.pop();
        }
    }
    let search = Search {
        balls: &balls,
        order: &order,
        lower,
    };
    go(&search, 0, &mut Vec::new(), &mut best);
    Ok(assemble(&ctx, &proj, &best))
}

/// True when every function is within α of its assigned center on the design.
pub fn is_cover(
    class: &FunctionClass,
    design: &SampleDesign,
    metric: &Metric,
    alpha: &Rat,
    cover: &CoverSet,
) -> bool {
    let grid = class.grid();
    cover.assignment.len() == class.n_functions()
        && cover.centers.iter().all(|c| {
            c.len() == design.len() && c.iter().all(|&v| grid.contains(v))
        })
        && (0..class.n_functions()).all(|f| {
            cover.assignment[f] < cover.centers.len()
                && design
                    .indices()
                    .iter()
                    .zip(&cover.centers[cover.assignment[f]])
                    .all(|(&x, &c)| metric.within(grid, class.value(f, x), c, alpha))
        })
}

/// Largest set of functions pairwise at ℓ∞ distance ≥ α on the design
/// (lowest function index per projection), ascending.
pub fn packing_max_exact(
    class: &FunctionClass,
    design: &SampleDesign,
    metric: &Metric,
    alpha: &Rat,
) -> Result<Vec<usize>> {
    metric.validate_for(class.grid())?;
    crate::model::require_positive("alpha", alpha)?;
    let proj = project(class, design);
    let n = proj.vectors.len();
    cap_check("distinct projected functions", n as u64, MAX_EXACT_PACKING as u64)?;
    let grid = class.grid();
    let adj: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && linf(grid, metric, &proj.vectors[i], &proj.vectors[j]) >= *alpha)
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();

    fn grow(adj: &[u32], cur: u32, cand: u32, best: &mut u32) {
        if cand == 0 {
            if cur.count_ones() > best.count_ones() {
                *best = cur;
            }
            return;
        }
        if cur.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
        let v = cand.trailing_zeros();
        let bit = 1u32 << v;
        grow(adj, cur | bit, cand & adj[v as usize], best);
        grow(adj, cur, cand & !bit, best);
    }
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = 0u32;
    grow(&adj, 0, all, &mut best);
    let mut out: Vec<usize> = (0..n)
        .filter(|&i| best >> i & 1 == 1)
        .map(|i| proj.first[i])
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    fn consts(vals: &[i64], q: i64) -> FunctionClass {
        FunctionClass::new(
            vec!["x".into()],
            ValueGrid::real(q).unwrap(),
            vals.iter().map(|&v| vec![v]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn opposite_constants_need_two() {
        let c = consts(&[-2, 2], 2);
        let d = SampleDesign::all_points(&c);
        let cov = cover_min_exact(&c, &d, &Metric::Absolute, &rat(1, 2)).unwrap();
        assert_eq!(cov.len(), 2);
        assert!(is_cover(&c, &d, &Metric::Absolute, &rat(1, 2), &cov));
        let one = cover_min_exact(&c, &d, &Metric::Absolute, &rat(1, 1)).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.centers, vec![vec![0]]);
    }

    #[test]
    fn packing_three_constants() {
        let c = consts(&[-1, 0, 1], 1);
        let d = SampleDesign::all_points(&c);
        assert_eq!(packing_max_exact(&c, &d, &Metric::Absolute, &rat(1, 1)).unwrap(), vec![0, 1, 2]);
        assert_eq!(packing_max_exact(&c, &d, &Metric::Absolute, &rat(2, 1)).unwrap().len(), 2);
        let s = consts(&[0], 1);
        assert_eq!(packing_max_exact(&s, &SampleDesign::all_points(&s), &Metric::Absolute, &rat(1, 1)).unwrap(), vec![0]);
    }

    #[test]
    fn greedy_is_valid_and_not_smaller() {
        let c = consts(&[-4, -3, -1, 0, 2, 4], 4);
        let d = SampleDesign::all_points(&c);
        let a = rat(1, 4);
        let g = cover_greedy(&c, &d, &Metric::Absolute, &a).unwrap();
        let e = cover_min_exact(&c, &d, &Metric::Absolute, &a).unwrap();
        assert!(is_cover(&c, &d, &Metric::Absolute, &a, &g));
        assert!(is_cover(&c, &d, &Metric::Absolute, &a, &e));
        assert!(g.len() >= e.len());
        assert_eq!(e.len(), 3);
    }
}
