//! The registered checkers. Each turns the corpus into jobs; every job
//! returns one report per compared pair of quantities.


use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{Check, Corpus, Instance, Job, Theorem, VerdictReport};
use crate::combinatorics::{g_m, khintchine_abs_mean};
use crate::constructions::fixed_scale_by_averaging;
use crate::error::Result;
use crate::games::{default_grid, minimax_online_seq, minimax_transductive, GameConfig, GameOrder};
use crate::model::{fmt_rat, rat, FunctionClass, LabeledTree, Metric, Rat, SampleDesign, WitnessPair};
use crate::nonseq_cover::{cover_min_exact, packing_max_exact, MAX_EXACT_COVER, MAX_EXACT_PACKING};
use crate::nonseq_dims::{fat_dim, fixed_scale_dim, gapped_dim_integer, gapped_dim_real, is_shattered_nonseq, ShatterCertificate};
use crate::rademacher::{
    block_length, build_block_design_nonseq, build_block_tree_seq, max_block_budget, offset_rad_nonseq_exact,
    offset_rad_seq_exact, OffsetDesign, OffsetInstance,
};
use crate::rule::DimKind;
use crate::sequential::cover::{discretize_for_cover, is_seq_cover, seq_cover_construct, seq_cover_min_bruteforce};
use crate::sequential::{is_tree_shattered, seq_gapped_dim_integer, seq_gapped_dim_real, sfat_dim, TreeShatterCertificate};

const E: f64 = std::f64::consts::E;

static REGISTRY: &[Theorem] = &[
    Theorem { id: "block-design-offset", statement: "block design from a gapped certificate (beta = alpha/(20nC)), C = 2: offset complexity >= (d-1)/50 - 4", jobs: block_design_offset },
    Theorem { id: "block-tree-offset", statement: "block tree from a sequential gapped certificate (beta = alpha/20), C = 2: sequential offset complexity >= d/50", jobs: block_tree_offset },
    Theorem { id: "constant-tree-reduction", statement: "constant-level trees carry non-sequential shattering; sequential dims >= non-sequential dims; minimum sequential cover on a constant tree = minimum cover on its design", jobs: constant_tree_reduction },
    Theorem { id: "cover-bound-integer", statement: "integer classes: log N(alpha) <= 16 d(alpha) log^2(e n M)", jobs: cover_bound_integer },
    Theorem { id: "cover-bound-real", statement: "real classes: log N(alpha + beta) <= 16 d(alpha, beta) log^2(2 e n / beta)", jobs: cover_bound_real },
    Theorem { id: "cover-le-packing", statement: "minimum cover at alpha <= maximum alpha-packing", jobs: cover_le_packing },
    Theorem { id: "fat-le-gapped-convex", statement: "grid-convex classes, 2 beta < alpha: vc(alpha) <= d(alpha, beta)", jobs: fat_le_gapped_convex },
    Theorem { id: "fat-le-gapped-log", statement: "vc(3(alpha + beta)) <= 288 d(alpha, beta) log^2(384 d(alpha, beta) / beta)", jobs: fat_le_gapped_log },
    Theorem { id: "fixed-eq-fat-convex", statement: "grid-convex classes: fixed-scale dim(alpha) = vc(alpha) when the averaging step stays in the class", jobs: fixed_eq_fat_convex },
    Theorem { id: "g-bound", statement: "g_M(n, d) <= (e n M / d)^d for 1 <= d <= n", jobs: g_bound },
    Theorem { id: "g-recurrence", statement: "g_M(n, d) = g_M(n-1, d) + (M-1) g_M(n-1, d-1)", jobs: g_recurrence },
    Theorem { id: "gapped-le-fat", statement: "2 beta < alpha: d(alpha, beta) <= vc(alpha - 2 beta)", jobs: gapped_le_fat },
    Theorem { id: "khintchine-lower", statement: "E|mean of k signs|^2 >= 1/(2k) for k <= 30", jobs: khintchine_lower },
    Theorem { id: "log-gap-separation", statement: "log-gap class at alpha, beta = alpha/4: d(alpha, beta) = 1 and vc(alpha) >= floor(log2(1/alpha))", jobs: log_gap_separation },
    Theorem { id: "online-ge-block-offset", statement: "online grid game value >= sequential offset complexity of a block tree (C = 2) >= d/50", jobs: online_ge_block_offset },
    Theorem { id: "seq-cover-bound-real", statement: "real classes: discretized constructed cover is valid at alpha + beta and log |V| <= d_seq(alpha, beta) log(2 e n / beta)", jobs: seq_cover_bound_real },
    Theorem { id: "seq-cover-construct-bound", statement: "integer classes: constructed sequential cover is valid and |V| <= g_M(n, d_seq(alpha)), log |V| <= d_seq log(e n M)", jobs: seq_cover_construct_bound },
    Theorem { id: "seq-gapped-le-sfat", statement: "2 beta < alpha: d_seq(alpha, beta) <= sfat(alpha - 2 beta)", jobs: seq_gapped_le_sfat },
    Theorem { id: "sfat-le-seq-gapped-log", statement: "sfat(3(alpha + beta)) <= 4 d_seq(alpha, beta) log(12 d_seq(alpha, beta) / beta)", jobs: sfat_le_seq_gapped_log },
    Theorem { id: "sfat-realizers-separated", statement: "a depth-d sfat(alpha) tree needs at least 2^d cover trees at alpha/3", jobs: sfat_realizers_separated },
    Theorem { id: "single-point-separation", statement: "single-point grid class, step <= alpha, beta = alpha/8: d_seq(alpha, beta) = 1 and sfat(alpha) >= floor(log2(1/alpha))", jobs: single_point_separation },
    Theorem { id: "transductive-ge-block-offset", statement: "transductive grid game value >= offset complexity of a block design (C = 2) >= (d-1)/50 - 4", jobs: transductive_ge_block_offset },
    Theorem { id: "transductive-ge-offset", statement: "transductive grid game value >= max over step-1/2 mu of offset complexity with C = 2", jobs: transductive_ge_offset },
];

/// All registered checkers, sorted by id.
pub fn registry() -> &'static [Theorem] {
    REGISTRY
}

// ---------------------------------------------------------------- helpers

/// The class on the coarsest grid refinement representing every scale in `rs`.
fn refined(class: &FunctionClass, rs: &[Rat]) -> Result<FunctionClass> {
    if class.grid().is_integer() {
        return Ok(class.clone());
    }
    let k = rs.iter().fold(1i64, |acc, r| acc.lcm(&class.grid().refinement_for(r)));
    if k == 1 {
        Ok(class.clone())
    } else {
        class.refine(k)
    }
}

fn ln_big(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY).ln()
}

fn log2_floor_inv(alpha: &Rat) -> i64 {
    let mut k = 0;
    let mut p = Rat::from_integer(1);
    while p * rat(2, 1) * alpha <= Rat::from_integer(1) {
        p *= rat(2, 1);
        k += 1;
    }
    k
}

fn jobs_for<'a>(
    insts: impl Iterator<Item = &'a Instance>,
    id: &'static str,
    params: &[Vec<Rat>],
    names: &[&str],
    run: fn(&Check, &Instance, &[Rat]) -> Result<Vec<VerdictReport>>,
) -> Vec<Job> {
    let mut out = Vec::new();
    for inst in insts {
        for p in params {
            let mut check = Check::new(id, inst.name(), Some(&inst.class), Some(&inst.metric));
            for (n, v) in names.iter().zip(p) {
                check = check.param(n, fmt_rat(v));
            }
            let inst = inst.clone();
            let p = p.clone();
            out.push(Job::new(check, move |c| run(c, &inst, &p)));
        }
    }
    out
}

fn all_points(class: &FunctionClass) -> SampleDesign {
    SampleDesign::all_points(class)
}

/// Point trees of depth n over the class domain: constant levels, and labels
/// shifted by the number of +1 signs so far.
fn point_trees(n_points: usize, depth: usize) -> Vec<(&'static str, LabeledTree<usize>)> {
    let constant = LabeledTree::from_fn(depth, |t, _| (t - 1) % n_points).expect("small tree");
    let mut out = vec![("constant", constant)];
    if n_points > 1 && depth > 1 {
        let branching =
            LabeledTree::from_fn(depth, |t, p| (t - 1 + p.count_ones() as usize) % n_points).expect("small tree");
        out.push(("branching", branching));
    }
    out
}

fn int_scales(inst: &Instance) -> Vec<Vec<Rat>> {
    let m = inst.class.grid().m().unwrap_or(2);
    (1..=2).filter(|&a| a < m).map(|a| vec![rat(a as i128, 1)]).collect()
}

const REAL_PAIRS: [(i128, i128, i128, i128); 3] = [(1, 2, 1, 8), (1, 1, 1, 4), (1, 4, 1, 16)];

fn real_pairs() -> Vec<Vec<Rat>> {
    REAL_PAIRS.iter().map(|&(a, b, c, d)| vec![rat(a, b), rat(c, d)]).collect()
}

// ---------------------------------------------------------------- covers

fn cover_bound_integer(corpus: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for inst in corpus.integer() {
        out.extend(jobs_for(std::iter::once(inst), "cover-bound-integer", &int_scales(inst), &["alpha"], |c, inst, p| {
            let class = &inst.class;
            if class.n_functions() > MAX_EXACT_COVER {
                return Ok(vec![c.skipped("class too large for the exact cover")]);
            }
            let alpha = &p[0];
            let design = all_points(class);
            let n_cover = cover_min_exact(class, &design, &inst.metric, alpha)?.len();
            let d = gapped_dim_integer(class, &inst.metric, alpha)?.dim as f64;
            let n = design.len() as f64;
            let m = class.grid().m().unwrap_or(2) as f64;
            let rhs = 16.0 * d * (E * n * m).ln().powi(2);
            Ok(vec![c.guarded_le((n_cover as f64).ln(), rhs).with_note(format!("N = {n_cover}, d = {d}"))])
        }));
    }
    out
}

fn cover_bound_real(corpus: &Corpus) -> Vec<Job> {
    jobs_for(corpus.real(), "cover-bound-real", &real_pairs(), &["alpha", "beta"], |c, inst, p| {
        let (alpha, beta) = (&p[0], &p[1]);
        let radius = alpha + beta;
        let class = refined(&inst.class, &[*alpha, *beta, radius])?;
        let c = c.clone().with_class(&class);
        if class.n_functions() > MAX_EXACT_COVER {
            return Ok(vec![c.skipped("class too large for the exact cover")]);
        }
        let design = all_points(&class);
        let n_cover = cover_min_exact(&class, &design, &Metric::Absolute, &radius)?.len();
        let d = gapped_dim_real(&class, &Metric::Absolute, alpha, beta)?.dim as f64;
        let n = design.len() as f64;
        let b = crate::model::rat_to_f64(beta);
        let rhs = 16.0 * d * (2.0 * E * n / b).ln().powi(2);
        Ok(vec![c.guarded_le((n_cover as f64).ln(), rhs).with_note(format!("N = {n_cover}, d = {d}"))])
    })
}

fn cover_le_packing(corpus: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for inst in &corpus.instances {
        let scales: Vec<Vec<Rat>> = if inst.is_integer() {
            int_scales(inst)
        } else {
            vec![vec![rat(1, 4)], vec![rat(1, 2)], vec![rat(1, 1)]]
        };
        out.extend(jobs_for(std::iter::once(inst), "cover-le-packing", &scales, &["alpha"], |c, inst, p| {
            let class = &inst.class;
            if class.n_functions() > MAX_EXACT_COVER.min(MAX_EXACT_PACKING) {
                return Ok(vec![c.skipped("class too large for the exact cover")]);
            }
            let design = all_points(class);
            let n_cover = cover_min_exact(class, &design, &inst.metric, &p[0])?.len();
            let packing = packing_max_exact(class, &design, &inst.metric, &p[0])?.len();
            Ok(vec![c.exact(n_cover, "<=", packing, n_cover <= packing)])
        }));
    }
    out
}

// ---------------------------------------------------------------- non-sequential dims

fn gapped_le_fat(corpus: &Corpus) -> Vec<Job> {
    jobs_for(corpus.real(), "gapped-le-fat", &real_pairs(), &["alpha", "beta"], |c, inst, p| {
        let (alpha, beta) = (&p[0], &p[1]);
        let scale = alpha - beta * rat(2, 1);
        let class = refined(&inst.class, &[*alpha, *beta, scale / rat(2, 1)])?;
        let c = c.clone().with_class(&class);
        let d = gapped_dim_real(&class, &Metric::Absolute, alpha, beta)?.dim;
        let vc = fat_dim(&class, &scale)?.dim;
        Ok(vec![c.exact(d, "<=", vc, d <= vc)])
    })
}

fn fat_le_gapped_log(corpus: &Corpus) -> Vec<Job> {
    let pairs = vec![vec![rat(1, 8), rat(1, 8)], vec![rat(1, 4), rat(1, 16)]];
    jobs_for(corpus.real(), "fat-le-gapped-log", &pairs, &["alpha", "beta"], |c, inst, p| {
        let (alpha, beta) = (&p[0], &p[1]);
        let scale = (alpha + beta) * rat(3, 1);
        let class = refined(&inst.class, &[*alpha, *beta, scale / rat(2, 1)])?;
        let c = c.clone().with_class(&class);
        let d = gapped_dim_real(&class, &Metric::Absolute, alpha, beta)?.dim as f64;
        let vc = fat_dim(&class, &scale)?.dim as f64;
        let rhs = if d == 0.0 {
            0.0
        } else {
            288.0 * d * (384.0 * d / crate::model::rat_to_f64(beta)).ln().powi(2)
        };
        Ok(vec![c.guarded_le(vc, rhs)])
    })
}

/// Scales whose derived values (α divided by each of `divs`) sit on the
/// class's own grid. Grid convexity does not survive refinement.
fn convex_scales(inst: &Instance, divs: &[i128]) -> Vec<Vec<Rat>> {
    let grid = inst.class.grid();
    [rat(1, 4), rat(1, 2), rat(1, 1)]
        .into_iter()
        .filter(|a| divs.iter().all(|&k| grid.refinement_for(&(a / rat(k, 1))) == 1))
        .map(|a| vec![a])
        .collect()
}

fn convex_jobs(
    corpus: &Corpus,
    id: &'static str,
    divs: &[i128],
    run: fn(&Check, &Instance, &[Rat]) -> Result<Vec<VerdictReport>>,
) -> Vec<Job> {
    corpus
        .instances
        .iter()
        .filter(|i| i.is_grid_convex())
        .flat_map(|inst| jobs_for(std::iter::once(inst), id, &convex_scales(inst, divs), &["alpha"], run))
        .collect()
}

/// Fat certificate at α and whether averaging turns it into a fixed-scale one
/// inside the class.
fn fat_and_averaging(class: &FunctionClass, alpha: &Rat) -> Result<(usize, Option<ShatterCertificate>)> {
    let fat = fat_dim(class, alpha)?;
    let fixed = fixed_scale_by_averaging(class, &fat.certificate, alpha)?;
    Ok((fat.dim, fixed))
}

const OFF_GRID: &str = "averaging step leaves the grid-closed class";

fn fat_le_gapped_convex(corpus: &Corpus) -> Vec<Job> {
    convex_jobs(corpus, "fat-le-gapped-convex", &[2, 4], |c, inst, p| {
        let alpha = &p[0];
        let beta = alpha / rat(4, 1);
        let c = c.clone().param("beta", fmt_rat(&beta));
        let class = refined(&inst.class, &[alpha / rat(2, 1), beta])?;
        let c = c.with_class(&class);
        let (vc, averaged) = fat_and_averaging(&class, alpha)?;
        if averaged.is_none() {
            return Ok(vec![c.skipped(OFF_GRID)]);
        }
        let d = gapped_dim_real(&class, &Metric::Absolute, alpha, &beta)?.dim;
        Ok(vec![c.exact(vc, "<=", d, vc <= d)])
    })
}

fn fixed_eq_fat_convex(corpus: &Corpus) -> Vec<Job> {
    convex_jobs(corpus, "fixed-eq-fat-convex", &[2], |c, inst, p| {
        let alpha = &p[0];
        let class = refined(&inst.class, &[alpha / rat(2, 1)])?;
        let c = c.clone().with_class(&class);
        let (vc, averaged) = fat_and_averaging(&class, alpha)?;
        let Some(cert) = averaged else {
            return Ok(vec![c.skipped(OFF_GRID)]);
        };
        let check = is_shattered_nonseq(
            DimKind::Fixed,
            &class,
            &Metric::Absolute,
            &cert.points,
            &cert.witnesses,
            alpha,
            None,
        )?;
        let fixed = fixed_scale_dim(&class, alpha)?.dim;
        let r = c.exact(fixed, "=", vc, fixed == vc && check.shattered);
        Ok(vec![if check.shattered {
            r
        } else {
            r.with_note("averaged realizers do not shatter at fixed scale")
        }])
    })
}

fn log_gap_separation(corpus: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for inst in &corpus.instances {
        let Some(alpha) = inst.log_gap_alpha() else { continue };
        let check = Check::new("log-gap-separation", inst.name(), Some(&inst.class), None).param("alpha", fmt_rat(&alpha));
        let inst = inst.clone();
        out.push(Job::new(check, move |c| {
            let beta = alpha / rat(4, 1);
            let class = refined(&inst.class, &[alpha / rat(2, 1), beta])?;
            let c = c.clone().param("beta", fmt_rat(&beta)).with_class(&class);
            let d = gapped_dim_real(&class, &Metric::Absolute, &alpha, &beta)?.dim;
            let vc = fat_dim(&class, &alpha)?.dim as i64;
            let floor = log2_floor_inv(&alpha);
            Ok(vec![
                c.clone().param("part", "gapped").exact(d, "=", 1, d == 1),
                c.param("part", "fat").exact(vc, ">=", floor, vc >= floor),
            ])
        }));
    }
    out
}

// ---------------------------------------------------------------- offset complexities and games

/// Longest prefix of a certificate whose leading blocks fit in n rounds.
fn fit_design(class: &FunctionClass, cert: &ShatterCertificate, n: usize) -> Result<ShatterCertificate> {
    let mut k = cert.points.len();
    loop {
        let head: usize = cert.witnesses[..k.saturating_sub(1)]
            .iter()
            .map(|w| block_length(&(class.grid().to_rat(w.hi) - class.grid().to_rat(w.lo))))
            .sum::<Result<usize>>()?;
        if head <= n || k == 1 {
            return Ok(cert.prefix(k));
        }
        k -= 1;
    }
}

/// Deepest prefix of a tree certificate whose block budget fits in `cap`.
fn fit_tree(class: &FunctionClass, cert: &TreeShatterCertificate, cap: usize) -> Result<TreeShatterCertificate> {
    let mut k = cert.depth();
    loop {
        let p = cert.prefix(k);
        if max_block_budget(class, &p.witness_tree)? <= cap || k == 0 {
            return Ok(p);
        }
        k -= 1;
    }
}

const DESIGN_N: usize = 8;

fn block_design_offset(corpus: &Corpus) -> Vec<Job> {
    let scales = vec![vec![rat(1, 2)], vec![rat(1, 1)]];
    jobs_for(corpus.real(), "block-design-offset", &scales, &["alpha"], |c, inst, p| {
        let alpha = &p[0];
        let n = DESIGN_N;
        let two = rat(2, 1);
        let beta = alpha / rat(20 * n as i128, 1) / two;
        let class = refined(&inst.class, &[*alpha, beta])?;
        let c = c.clone().param("beta", fmt_rat(&beta)).param("n", n).with_class(&class);
        let cert = gapped_dim_real(&class, &Metric::Absolute, alpha, &beta)?.certificate;
        if cert.points.is_empty() {
            return Ok(vec![c.skipped("no shattered point at this scale")]);
        }
        let cert = fit_design(&class, &cert, n)?;
        let d = cert.points.len() as i128;
        let offset = offset_rad_nonseq_exact(&build_block_design_nonseq(&class, &cert, n, two)?)?;
        let bound = rat(d - 1, 50) - rat(4, 1);
        Ok(vec![c.param("d", d).exact(fmt_rat(&offset), ">=", fmt_rat(&bound), offset >= bound)])
    })
}

fn block_tree_offset(corpus: &Corpus) -> Vec<Job> {
    let scales = vec![vec![rat(1, 2)], vec![rat(1, 1)]];
    jobs_for(corpus.real(), "block-tree-offset", &scales, &["alpha"], |c, inst, p| {
        let alpha = &p[0];
        let beta = alpha / rat(20, 1);
        let class = refined(&inst.class, &[*alpha, beta])?;
        let c = c.clone().param("beta", fmt_rat(&beta)).with_class(&class);
        let cert = seq_gapped_dim_real(&class, &Metric::Absolute, alpha, &beta)?.certificate;
        if cert.depth() == 0 {
            return Ok(vec![c.skipped("no shattered tree at this scale")]);
        }
        let cert = fit_tree(&class, &cert, 12)?;
        let n = max_block_budget(&class, &cert.witness_tree)?;
        let offset = offset_rad_seq_exact(&build_block_tree_seq(&class, &cert, n, rat(2, 1))?)?;
        let bound = rat(cert.depth() as i128, 50);
        Ok(vec![c
            .param("d", cert.depth())
            .param("n", n)
            .exact(fmt_rat(&offset), ">=", fmt_rat(&bound), offset >= bound)])
    })
}

/// Step-1/2 grid of [-1, 1].
fn half_grid() -> Vec<Rat> {
    (-2..=2).map(|k| rat(k, 2)).collect()
}

fn transductive_ge_offset(corpus: &Corpus) -> Vec<Job> {
    let horizons = vec![vec![rat(1, 1)], vec![rat(2, 1)], vec![rat(3, 1)]];
    jobs_for(corpus.real(), "transductive-ge-offset", &horizons, &["n"], |c, inst, p| {
        let n = p[0].to_integer() as usize;
        let class = (*inst.class).clone();
        let design = SampleDesign::new((0..n).map(|t| t % class.n_points()).collect(), class.n_points())?;
        let cfg = GameConfig::new(
            class.clone(),
            n,
            default_grid(),
            default_grid(),
            GameOrder::Transductive(design.clone()),
        )?;
        let value = minimax_transductive(&cfg)?;
        let grid = half_grid();
        let mut best: Option<Rat> = None;
        for idx in 0..grid.len().pow(n as u32) {
            let mu: Vec<Rat> = (0..n).map(|t| grid[(idx / grid.len().pow(t as u32)) % grid.len()]).collect();
            let inst = OffsetInstance::sequence(class.clone(), design.clone(), mu, rat(2, 1))?;
            let v = offset_rad_nonseq_exact(&inst)?;
            best = Some(best.map_or(v, |b| b.max(v)));
        }
        let best = best.expect("nonempty grid");
        Ok(vec![c.exact(fmt_rat(&value), ">=", fmt_rat(&best), value >= best)])
    })
}

/// Default grid plus μ ± 1 for every μ used by the instance.
fn y_grid_for(mus: &[Rat]) -> Vec<Rat> {
    let mut g = default_grid();
    for m in mus {
        g.push(m + rat(1, 1));
        g.push(m - rat(1, 1));
    }
    g
}

const GAME_N: usize = 3;

fn transductive_ge_block_offset(corpus: &Corpus) -> Vec<Job> {
    let scales = vec![vec![rat(1, 1)]];
    jobs_for(corpus.real(), "transductive-ge-block-offset", &scales, &["alpha"], |c, inst, p| {
        let alpha = &p[0];
        let n = GAME_N;
        let two = rat(2, 1);
        let beta = alpha / rat(20 * n as i128, 1) / two;
        let class = refined(&inst.class, &[*alpha, beta])?;
        let c = c.clone().param("beta", fmt_rat(&beta)).param("n", n).with_class(&class);
        let cert = gapped_dim_real(&class, &Metric::Absolute, alpha, &beta)?.certificate;
        if cert.points.is_empty() {
            return Ok(vec![c.skipped("no shattered point at this scale")]);
        }
        let cert = fit_design(&class, &cert, n)?;
        let d = cert.points.len() as i128;
        let offset_inst = build_block_design_nonseq(&class, &cert, n, two)?;
        let offset = offset_rad_nonseq_exact(&offset_inst)?;
        let OffsetDesign::Sequence { design, mu } = &offset_inst.design else {
            unreachable!("block designs are sequences")
        };
        let cfg = GameConfig::new(
            class.clone(),
            n,
            default_grid(),
            y_grid_for(mu),
            GameOrder::Transductive(design.clone()),
        )?;
        let value = minimax_transductive(&cfg)?;
        let bound = rat(d - 1, 50) - rat(4, 1);
        let c = c.param("d", d);
        Ok(vec![
            c.clone()
                .param("link", "game-vs-offset")
                .exact(fmt_rat(&value), ">=", fmt_rat(&offset), value >= offset),
            c.param("link", "offset-vs-bound")
                .exact(fmt_rat(&offset), ">=", fmt_rat(&bound), offset >= bound),
        ])
    })
}

fn online_ge_block_offset(corpus: &Corpus) -> Vec<Job> {
    let scales = vec![vec![rat(1, 1)]];
    jobs_for(corpus.real(), "online-ge-block-offset", &scales, &["alpha"], |c, inst, p| {
        let alpha = &p[0];
        let beta = alpha / rat(20, 1);
        let class = refined(&inst.class, &[*alpha, beta])?;
        let c = c.clone().param("beta", fmt_rat(&beta)).with_class(&class);
        let cert = seq_gapped_dim_real(&class, &Metric::Absolute, alpha, &beta)?.certificate;
        if cert.depth() == 0 {
            return Ok(vec![c.skipped("no shattered tree at this scale")]);
        }
        let cert = fit_tree(&class, &cert, GAME_N)?;
        let n = max_block_budget(&class, &cert.witness_tree)?;
        let offset_inst = build_block_tree_seq(&class, &cert, n, rat(2, 1))?;
        let offset = offset_rad_seq_exact(&offset_inst)?;
        let OffsetDesign::Tree { x_tree, mu_tree } = &offset_inst.design else {
            unreachable!("block trees are trees")
        };
        let cfg = GameConfig::new(
            class.clone(),
            n,
            default_grid(),
            y_grid_for(mu_tree.labels()),
            GameOrder::Online(x_tree.labels().to_vec()),
        )?;
        let value = minimax_online_seq(&cfg)?;
        let bound = rat(cert.depth() as i128, 50);
        let c = c.param("d", cert.depth()).param("n", n);
        Ok(vec![
            c.clone()
                .param("link", "game-vs-offset")
                .exact(fmt_rat(&value), ">=", fmt_rat(&offset), value >= offset),
            c.param("link", "offset-vs-bound")
                .exact(fmt_rat(&offset), ">=", fmt_rat(&bound), offset >= bound),
        ])
    })
}

// ---------------------------------------------------------------- sequential

fn seq_cover_construct_bound(corpus: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for inst in corpus.integer() {
        for alpha in int_scales(inst) {
            for depth in 1..=3 {
                for (shape, tree) in point_trees(inst.class.n_points(), depth) {
                    let check = Check::new("seq-cover-construct-bound", inst.name(), Some(&inst.class), Some(&inst.metric))
                        .param("alpha", fmt_rat(&alpha[0]))
                        .param("depth", depth)
                        .param("tree", shape);
                    let inst = inst.clone();
                    let alpha = alpha[0];
                    out.push(Job::new(check, move |c| {
                        let class = &inst.class;
                        let d = seq_gapped_dim_integer(class, &inst.metric, &alpha)?.dim;
                        let cover = seq_cover_construct(class, &inst.metric, &tree, &alpha)?;
                        let valid = is_seq_cover(class, &inst.metric, &tree, &alpha, &cover)?;
                        let m = class.grid().m().unwrap_or(2) as u64;
                        let g = g_m(depth as u64, d as u64, m);
                        let size = BigUint::from(cover.len());
                        let mut size_report = c
                            .clone()
                            .param("part", "size")
                            .exact(cover.len(), "<=", &g, valid && size <= g);
                        if !valid {
                            size_report = size_report.with_note("constructed cover is not a valid cover");
                        }
                        let rhs = d as f64 * (E * depth as f64 * m as f64).ln();
                        Ok(vec![
                            size_report,
                            c.clone().param("part", "log").guarded_le((cover.len() as f64).ln(), rhs),
                        ])
                    }));
                }
            }
        }
    }
    out
}

fn seq_cover_bound_real(corpus: &Corpus) -> Vec<Job> {
    let pairs = [(rat(1, 2), rat(1, 8)), (rat(1, 1), rat(1, 4))];
    let mut out = Vec::new();
    for inst in corpus.real() {
        for (alpha, beta) in pairs {
            for depth in 1..=3 {
                for (shape, tree) in point_trees(inst.class.n_points(), depth) {
                    let check = Check::new("seq-cover-bound-real", inst.name(), Some(&inst.class), None)
                        .param("alpha", fmt_rat(&alpha))
                        .param("beta", fmt_rat(&beta))
                        .param("depth", depth)
                        .param("tree", shape);
                    let inst = inst.clone();
                    out.push(Job::new(check, move |c| {
                        let class = refined(&inst.class, &[alpha, beta])?;
                        let c = c.clone().with_class(&class);
                        let disc = discretize_for_cover(&class, &beta)?;
                        let cover = seq_cover_construct(&disc.class, &disc.metric, &tree, &alpha)?;
                        let mapped: Vec<LabeledTree<i64>> =
                            cover.iter().map(|t| t.map(|&i| disc.net[(i - 1) as usize])).collect();
                        let radius = alpha + beta;
                        let valid = is_seq_cover(&class, &Metric::Absolute, &tree, &radius, &mapped)?;
                        let d = seq_gapped_dim_real(&class, &Metric::Absolute, &alpha, &beta)?.dim as f64;
                        let b = crate::model::rat_to_f64(&beta);
                        let rhs = d * (2.0 * E * depth as f64 / b).ln();
                        Ok(vec![
                            c.clone().param("part", "valid").exact(valid, "=", true, valid),
                            c.param("part", "log").guarded_le((mapped.len() as f64).ln(), rhs),
                        ])
                    }));
                }
            }
        }
    }
    out
}

fn seq_gapped_le_sfat(corpus: &Corpus) -> Vec<Job> {
    jobs_for(corpus.real(), "seq-gapped-le-sfat", &real_pairs(), &["alpha", "beta"], |c, inst, p| {
        let (alpha, beta) = (&p[0], &p[1]);
        let scale = alpha - beta * rat(2, 1);
        let class = refined(&inst.class, &[*alpha, *beta, scale / rat(2, 1)])?;
        let c = c.clone().with_class(&class);
        let d = seq_gapped_dim_real(&class, &Metric::Absolute, alpha, beta)?.dim;
        let s = sfat_dim(&class, &scale)?.dim;
        Ok(vec![c.exact(d, "<=", s, d <= s)])
    })
}

fn sfat_le_seq_gapped_log(corpus: &Corpus) -> Vec<Job> {
    let pairs = vec![vec![rat(1, 4), rat(1, 16)], vec![rat(1, 8), rat(1, 32)]];
    jobs_for(corpus.real(), "sfat-le-seq-gapped-log", &pairs, &["alpha", "beta"], |c, inst, p| {
        let (alpha, beta) = (&p[0], &p[1]);
        let scale = (alpha + beta) * rat(3, 1);
        let class = refined(&inst.class, &[*alpha, *beta, scale / rat(2, 1)])?;
        let c = c.clone().with_class(&class);
        let d = seq_gapped_dim_real(&class, &Metric::Absolute, alpha, beta)?.dim as f64;
        let s = sfat_dim(&class, &scale)?.dim as f64;
        let rhs = if d == 0.0 {
            0.0
        } else {
            4.0 * d * (12.0 * d / crate::model::rat_to_f64(beta)).ln()
        };
        Ok(vec![c.guarded_le(s, rhs)])
    })
}

fn single_point_separation(corpus: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for inst in &corpus.instances {
        let Some(q) = inst.single_point_q() else { continue };
        for alpha in [rat(1, 4), rat(1, 8)] {
            if rat(1, q as i128) > alpha {
                continue;
            }
            let check = Check::new("single-point-separation", inst.name(), Some(&inst.class), None)
                .param("alpha", fmt_rat(&alpha));
            let inst = inst.clone();
            out.push(Job::new(check, move |c| {
                let beta = alpha / rat(8, 1);
                let class = refined(&inst.class, &[alpha / rat(2, 1), beta])?;
                let c = c.clone().param("beta", fmt_rat(&beta)).with_class(&class);
                let d = seq_gapped_dim_real(&class, &Metric::Absolute, &alpha, &beta)?.dim;
                let s = sfat_dim(&class, &alpha)?.dim as i64;
                let floor = log2_floor_inv(&alpha);
                Ok(vec![
                    c.clone().param("part", "gapped").exact(d, "=", 1, d == 1),
                    c.param("part", "sfat").exact(s, ">=", floor, s >= floor),
                ])
            }));
        }
    }
    out
}

fn brute_depth(class: &FunctionClass, max: usize) -> usize {
    let size = class.grid().size() as f64;
    (1..=max)
        .rev()
        .find(|&d| size.powi((1 << d) - 1) <= crate::sequential::cover::MAX_BRUTE_TREES as f64)
        .unwrap_or(0)
}

fn constant_tree_reduction(corpus: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for inst in &corpus.instances {
        let scales: Vec<Vec<Rat>> = if inst.is_integer() {
            int_scales(inst)
        } else if inst.is_real() {
            vec![vec![rat(1, 2), rat(1, 8)], vec![rat(1, 1), rat(1, 4)]]
        } else {
            continue;
        };
        let names: &[&str] = if inst.is_integer() { &["alpha"] } else { &["alpha", "beta"] };
        out.extend(jobs_for(std::iter::once(inst), "constant-tree-reduction", &scales, names, |c, inst, p| {
            let alpha = &p[0];
            let mut out = Vec::new();
            let class = if inst.is_integer() {
                (*inst.class).clone()
            } else {
                refined(&inst.class, &[*alpha, p[1], alpha / rat(2, 1)])?
            };
            let c = c.clone().with_class(&class);
            let metric = &*inst.metric;
            // (kind, nonseq certificate, seq dim)
            let mut pairs: Vec<(DimKind, ShatterCertificate, usize)> = Vec::new();
            if inst.is_integer() {
                pairs.push((
                    DimKind::GappedInteger,
                    gapped_dim_integer(&class, metric, alpha)?.certificate,
                    seq_gapped_dim_integer(&class, metric, alpha)?.dim,
                ));
            } else {
                let beta = &p[1];
                pairs.push((
                    DimKind::GappedReal,
                    gapped_dim_real(&class, metric, alpha, beta)?.certificate,
                    seq_gapped_dim_real(&class, metric, alpha, beta)?.dim,
                ));
                pairs.push((DimKind::Fat, fat_dim(&class, alpha)?.certificate, sfat_dim(&class, alpha)?.dim));
            }
            let beta = p.get(1);
            for (kind, cert, seq_dim) in pairs {
                let d = cert.points.len();
                let x_tree = LabeledTree::constant_levels(&cert.points)?;
                let w_tree: LabeledTree<WitnessPair> = LabeledTree::constant_levels(&cert.witnesses)?;
                let shattered = is_tree_shattered(kind, &class, metric, &x_tree, &w_tree, alpha, beta)?.shattered;
                out.push(
                    c.clone()
                        .param("kind", kind.name())
                        .param("part", "embedding")
                        .exact(seq_dim, ">=", d, shattered && seq_dim >= d),
                );
            }
            let depth = brute_depth(&class, class.n_points().min(3));
            let cover_check = c.clone().param("part", "cover").param("depth", depth);
            if class.n_functions() > crate::sequential::cover::MAX_BRUTE_FUNCTIONS || depth == 0 {
                out.push(cover_check.skipped("outside the brute-force cover caps"));
            } else {
                let pts: Vec<usize> = (0..depth).collect();
                let design = SampleDesign::new(pts.clone(), class.n_points())?;
                let tree = LabeledTree::constant_levels(&pts)?;
                let (seq_n, _) = seq_cover_min_bruteforce(&class, metric, &tree, alpha)?;
                let n = cover_min_exact(&class, &design, metric, alpha)?.len();
                out.push(cover_check.exact(seq_n, "=", n, seq_n == n));
            }
            Ok(out)
        }));
    }
    out
}

fn sfat_realizers_separated(corpus: &Corpus) -> Vec<Job> {
    let insts = corpus
        .real()
        .filter(|i| i.class.n_functions() <= crate::sequential::cover::MAX_BRUTE_FUNCTIONS);
    let scales = vec![vec![rat(1, 2)], vec![rat(1, 1)]];
    jobs_for(insts, "sfat-realizers-separated", &scales, &["alpha"], |c, inst, p| {
        let alpha = &p[0];
        let class = refined(&inst.class, &[alpha / rat(2, 1)])?;
        let c = c.clone().with_class(&class);
        let cert = sfat_dim(&class, alpha)?.certificate;
        let depth = cert.depth().min(brute_depth(&class, 3));
        if depth == 0 {
            return Ok(vec![c.skipped("no shattered tree within the brute-force caps")]);
        }
        let cert = cert.prefix(depth);
        let (n, _) = seq_cover_min_bruteforce(&class, &Metric::Absolute, &cert.x_tree, &(alpha / rat(3, 1)))?;
        let need = 1usize << depth;
        Ok(vec![c.param("d", depth).exact(n, ">=", need, n >= need)])
    })
}

// ---------------------------------------------------------------- counting

fn g_recurrence(_: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for m in 2u64..=4 {
        for n in 1u64..=10 {
            for d in 1..=n {
                let check = Check::new("g-recurrence", "g", None, None)
                    .param("M", m)
                    .param("n", n)
                    .param("d", d);
                out.push(Job::new(check, move |c| {
                    let lhs = g_m(n, d, m);
                    let rhs = g_m(n - 1, d, m) + BigUint::from(m - 1) * g_m(n - 1, d - 1, m);
                    Ok(vec![c.exact(&lhs, "=", &rhs, lhs == rhs)])
                }));
            }
        }
    }
    out
}

fn g_bound(_: &Corpus) -> Vec<Job> {
    let mut out = Vec::new();
    for m in 2u64..=4 {
        for n in 1u64..=10 {
            for d in 1..=n {
                let check = Check::new("g-bound", "g", None, None)
                    .param("M", m)
                    .param("n", n)
                    .param("d", d);
                out.push(Job::new(check, move |c| {
                    let lhs = ln_big(&g_m(n, d, m));
                    let rhs = d as f64 * (E * n as f64 * m as f64 / d as f64).ln();
                    Ok(vec![c.guarded_le(lhs, rhs)])
                }));
            }
        }
    }
    out
}

fn khintchine_lower(_: &Corpus) -> Vec<Job> {
    (1..=30u32)
        .map(|k| {
            let check = Check::new("khintchine-lower", "signs", None, None).param("k", k);
            Job::new(check, move |c| {
                let m = khintchine_abs_mean(k)?;
                let lhs = m * m;
                let rhs = rat(1, 2 * k as i128);
                Ok(vec![c.exact(fmt_rat(&lhs), ">=", fmt_rat(&rhs), lhs >= rhs)])
            })
        })
        .collect()
}
