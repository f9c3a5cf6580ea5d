#![allow(dead_code)]

pub mod oracle;

use dimlab::combinatorics::g_m;
use dimlab::constructions::random_class;
use dimlab::nonseq_cover::{cover_greedy, cover_min_exact, is_cover, packing_max_exact};
use dimlab::nonseq_dims::{dimension, is_shattered_nonseq};
use dimlab::rng::SplitMix64;
use dimlab::sequential::cover::{is_seq_cover, seq_cover_construct, seq_cover_min_bruteforce};
use dimlab::sequential::{is_tree_shattered, seq_gapped_dim_integer, seq_gapped_dim_real, sfat_dim};
use dimlab::{rat, DimKind, FunctionClass, LabeledTree, Metric, Rat, SampleDesign, ValueGrid};
use num_bigint::BigUint;

use oracle::Scale;

/// One random instance for the oracle comparisons.
#[derive(Clone, Debug)]
pub struct Case {
    pub seed: u64,
    pub class: FunctionClass,
    pub metric: Metric,
}

/// Random metric on `m` symbols: shortest paths over random edge weights 1..3.
fn random_metric(m: usize, rng: &mut SplitMix64) -> Metric {
    let mut d = vec![vec![0i128; m]; m];
    for a in 0..m {
        for b in a + 1..m {
            let w = rng.range(1, 3) as i128;
            d[a][b] = w;
            d[b][a] = w;
        }
    }
    for k in 0..m {
        for a in 0..m {
            for b in 0..m {
                d[a][b] = d[a][b].min(d[a][k] + d[k][b]);
            }
        }
    }
    Metric::tabulated(d.into_iter().map(|r| r.into_iter().map(Rat::from_integer).collect()).collect())
        .expect("shortest-path closure is a metric")
}

/// Even seeds give integer alphabets (M ≤ 4, sometimes a random metric),
/// odd seeds give real grids with Q ∈ {2, 4}. |F| ≤ 10, n_X ≤ 4.
pub fn random_case(seed: u64) -> Case {
    let mut rng = SplitMix64::new(seed ^ 0x5eed_0fac_1e00);
    let nf = rng.range(1, 10) as usize;
    let np = rng.range(1, 4) as usize;
    if seed % 2 == 0 {
        let m = rng.range(2, 4);
        let grid = ValueGrid::integer(m).unwrap();
        let metric = if rng.below(3) == 0 {
            random_metric(m as usize, &mut rng)
        } else {
            Metric::Absolute
        };
        let class = random_class(nf, np, grid, rng.next_u64()).unwrap();
        Case { seed, class, metric }
    } else {
        let q = if rng.below(2) == 0 { 2 } else { 4 };
        let class = random_class(nf, np, ValueGrid::real(q).unwrap(), rng.next_u64()).unwrap();
        Case {
            seed,
            class,
            metric: Metric::Absolute,
        }
    }
}

/// Distinct positive distances of the metric on the alphabet, plus one
/// scale above all of them.
fn integer_scales(class: &FunctionClass, metric: &Metric) -> Vec<Rat> {
    let g = class.grid();
    let mut out: Vec<Rat> = g
        .values()
        .flat_map(|a| g.values().map(move |b| (a, b)))
        .map(|(a, b)| metric.dist(g, a, b))
        .filter(|d| *d > Rat::from_integer(0))
        .collect();
    out.sort();
    out.dedup();
    let top = *out.last().unwrap_or(&Rat::from_integer(0)) + Rat::from_integer(1);
    out.push(top);
    out
}

/// (α, β) pairs with β on the grid and 2β < α.
fn gapped_scales(q: i64) -> Vec<(Rat, Rat)> {
    let step = rat(1, q as i128);
    vec![
        (step * rat(2, 1), Rat::from_integer(0)),
        (step * rat(3, 1), step),
        (step * rat(4, 1), step),
        (rat(2, 1), step),
    ]
}

/// Scales with α/2 on the grid.
fn fat_scales(q: i64) -> Vec<Rat> {
    (1..=4).map(|k| rat(2 * k as i128, q as i128)).collect()
}

/// Depth-`n` tree whose label at level t is point `(t - 1 + shift) % n_x`,
/// with `shift` the number of +1 signs so far when `branching`.
pub fn point_tree(n_x: usize, depth: usize, branching: bool) -> LabeledTree<usize> {
    LabeledTree::from_fn(depth, |t, prefix| {
        let shift = if branching { prefix.count_ones() as usize } else { 0 };
        (t - 1 + shift) % n_x
    })
    .unwrap()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Compares every dimension and covering operation on `case` with its
/// oracle. Returns the number of comparisons made.
pub fn compare_with_oracles(case: &Case) -> Result<usize, String> {
    let (class, metric) = (&case.class, &case.metric);
    let ctx = |what: &str, scale: String| format!("seed {}: {what} at {scale}", case.seed);
    let mut n = 0;

    let mut dims = Vec::new();
    if class.grid().is_integer() {
        for a in integer_scales(class, metric) {
            let sc = Scale { kind: DimKind::GappedInteger, alpha: a, beta: Rat::from_integer(0) };
            dims.push((sc, None));
        }
    } else {
        let q = class.grid().q();
        for (a, b) in gapped_scales(q) {
            dims.push((Scale { kind: DimKind::GappedReal, alpha: a, beta: b }, Some(b)));
        }
        for a in fat_scales(q) {
            for kind in [DimKind::Fat, DimKind::Fixed] {
                dims.push((Scale { kind, alpha: a, beta: Rat::from_integer(0) }, None));
            }
        }
    }

    for (sc, beta) in &dims {
        let label = format!("{:?} alpha={} beta={}", sc.kind, sc.alpha, sc.beta);
        let got = dimension(sc.kind, class, metric, &sc.alpha, beta.as_ref()).map_err(|e| ctx(&label, e.to_string()))?;
        let want = oracle::nonseq_dim(class, metric, sc);
        check(got.dim == want, || ctx("non-sequential dimension", format!("{label}: got {} want {want}", got.dim)))?;
        let cert = &got.certificate;
        let re = is_shattered_nonseq(sc.kind, class, metric, &cert.points, &cert.witnesses, &sc.alpha, beta.as_ref())
            .map_err(|e| e.to_string())?;
        check(re.shattered, || ctx("certificate recheck", label.clone()))?;
        n += 1;

        if sc.kind == DimKind::Fixed {
            continue;
        }
        let seq = match sc.kind {
            DimKind::GappedInteger => seq_gapped_dim_integer(class, metric, &sc.alpha),
            DimKind::GappedReal => seq_gapped_dim_real(class, metric, &sc.alpha, &sc.beta),
            _ => sfat_dim(class, &sc.alpha),
        }
        .map_err(|e| ctx(&label, e.to_string()))?;
        let want = oracle::seq_dim(class, metric, sc);
        check(seq.dim == want, || ctx("sequential dimension", format!("{label}: got {} want {want}", seq.dim)))?;
        let tc = &seq.certificate;
        let re = is_tree_shattered(sc.kind, class, metric, &tc.x_tree, &tc.witness_tree, &sc.alpha, beta.as_ref())
            .map_err(|e| e.to_string())?;
        check(re.shattered, || ctx("tree certificate recheck", label.clone()))?;
        check(seq.dim >= got.dim, || ctx("sequential below non-sequential", label.clone()))?;
        n += 1;
    }

    let design = SampleDesign::all_points(class);
    let cover_scales: Vec<Rat> = if class.grid().is_integer() {
        integer_scales(class, metric)
    } else {
        // grid centers lose nothing only when α itself is on the grid
        [rat(1, 4), rat(1, 2), rat(1, 1)]
            .into_iter()
            .filter(|a| class.grid().refinement_for(a) == 1)
            .collect()
    };
    for a in &cover_scales {
        let label = format!("alpha={a}");
        let exact = cover_min_exact(class, &design, metric, a).map_err(|e| ctx("cover", e.to_string()))?;
        let want = oracle::cover_min(class, design.indices(), metric, a);
        check(exact.len() == want, || ctx("minimum cover", format!("{label}: got {} want {want}", exact.len())))?;
        check(is_cover(class, &design, metric, a, &exact), || ctx("minimum cover validity", label.clone()))?;
        let greedy = cover_greedy(class, &design, metric, a).map_err(|e| e.to_string())?;
        check(greedy.len() >= want && is_cover(class, &design, metric, a, &greedy), || {
            ctx("greedy cover", label.clone())
        })?;
        let packing = packing_max_exact(class, &design, metric, a).map_err(|e| e.to_string())?;
        let want_p = oracle::packing_max(class, design.indices(), metric, a);
        check(packing.len() == want_p, || ctx("packing", format!("{label}: got {} want {want_p}", packing.len())))?;
        n += 3;
    }

    if let Some(m) = class.grid().m() {
        for depth in 1..=2usize.min(class.n_points() + 1) {
            for branching in [false, true] {
                let tree = point_tree(class.n_points(), depth, branching);
                for a in &cover_scales {
                    let label = format!("depth={depth} branching={branching} alpha={a}");
                    let cover = seq_cover_construct(class, metric, &tree, a).map_err(|e| ctx(&label, e.to_string()))?;
                    let valid = is_seq_cover(class, metric, &tree, a, &cover).map_err(|e| e.to_string())?;
                    check(valid, || ctx("constructed sequential cover validity", label.clone()))?;
                    let d = seq_gapped_dim_integer(class, metric, a).map_err(|e| e.to_string())?.dim;
                    let bound = g_m(depth as u64, d as u64, m as u64);
                    check(BigUint::from(cover.len()) <= bound, || ctx("constructed cover size", label.clone()))?;
                    if class.n_functions() <= 8 {
                        let (brute, _) =
                            seq_cover_min_bruteforce(class, metric, &tree, a).map_err(|e| e.to_string())?;
                        check(brute <= cover.len(), || ctx("brute-force cover above constructed", label.clone()))?;
                        if !branching {
                            let levels: Vec<usize> = tree.constant_level_labels().unwrap();
                            let want = oracle::cover_min(class, &levels, metric, a);
                            check(brute == want, || {
                                ctx("constant-tree cover", format!("{label}: got {brute} want {want}"))
                            })?;
                        }
                    }
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}
