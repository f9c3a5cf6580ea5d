//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every comparison is exact unless stated; each criterion
//! also has a wall-clock budget.

mod common;

use std::time::{Duration, Instant};

use dimlab::constructions::{
    convexify, fixed_scale_by_averaging, full_class, log_gap_class_nonseq, random_class, random_sign_class,
    single_point_grid_class,
};
use dimlab::harness::{summarize, verify_all, Corpus, Verdict};
use dimlab::io::to_pretty;
use dimlab::nonseq_dims::{fat_dim, fixed_scale_dim, gapped_dim_real};
use dimlab::rademacher::{
    build_block_design_nonseq, build_block_tree_seq, max_block_budget, offset_rad_nonseq_exact, offset_rad_seq_exact,
};
use dimlab::sequential::{seq_gapped_dim_real, sfat_dim};
use dimlab::{fmt_rat, rat, FunctionClass, Metric, Rat, ValueGrid};

type Outcome = Result<String, String>;

/// Refined copy of `class` on which every scale in `rs` is a grid value.
fn fit(class: &FunctionClass, rs: &[Rat]) -> FunctionClass {
    use num_integer::Integer;
    let k = rs.iter().fold(1i64, |acc, r| acc.lcm(&class.grid().refinement_for(r)));
    class.refine(k).unwrap()
}

fn floor_log2_inv(alpha: &Rat) -> usize {
    (Rat::from_integer(1) / alpha).to_integer().ilog2() as usize
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn log_gap_separation() -> Outcome {
    let mut seen = Vec::new();
    for alpha in [rat(1, 4), rat(1, 8), rat(1, 16)] {
        let beta = alpha / rat(4, 1);
        let class = fit(&log_gap_class_nonseq(&alpha, None).map_err(err)?, &[alpha, beta, alpha / rat(2, 1)]);
        let d = gapped_dim_real(&class, &Metric::Absolute, &alpha, &beta).map_err(err)?.dim;
        let vc = fat_dim(&class, &alpha).map_err(err)?.dim;
        let need = floor_log2_inv(&alpha);
        if d != 1 || vc < need {
            return Err(format!("alpha {}: gapped {d} (want 1), fat {vc} (want >= {need})", fmt_rat(&alpha)));
        }
        seen.push(format!("{}: d=1 vc={vc}", fmt_rat(&alpha)));
    }
    Ok(seen.join(", "))
}

fn single_point_separation() -> Outcome {
    let mut seen = Vec::new();
    for alpha in [rat(1, 4), rat(1, 8)] {
        let q = (Rat::from_integer(1) / alpha).to_integer() as i64;
        let beta = alpha / rat(8, 1);
        let class = fit(&single_point_grid_class(q).map_err(err)?, &[alpha, beta, alpha / rat(2, 1)]);
        let d = seq_gapped_dim_real(&class, &Metric::Absolute, &alpha, &beta).map_err(err)?.dim;
        let s = sfat_dim(&class, &alpha).map_err(err)?.dim;
        let need = floor_log2_inv(&alpha);
        if d != 1 || s < need {
            return Err(format!("alpha {}: seq gapped {d} (want 1), sfat {s} (want >= {need})", fmt_rat(&alpha)));
        }
        seen.push(format!("{}: d_seq=1 sfat={s}", fmt_rat(&alpha)));
    }
    Ok(seen.join(", "))
}

/// Classes whose point values take two levels `gap` apart: full cubes and
/// random subsets of cubes.
fn two_level_classes() -> Vec<(String, FunctionClass, Rat)> {
    let mut out = Vec::new();
    for (gap, lo, hi, max_d) in [(rat(1, 1), -1i64, 1i64, 6usize), (rat(1, 2), 0, 1, 5)] {
        for d in 1..=max_d {
            let grid = ValueGrid::real(2).unwrap();
            let cube = full_class(d, ValueGrid::integer(2).unwrap()).unwrap();
            let rows = cube.rows().map(|r| r.iter().map(|&v| if v == 1 { lo } else { hi }).collect()).collect();
            let class = FunctionClass::new(FunctionClass::default_domain(d), grid, rows).unwrap();
            out.push((format!("cube d={d} gap={}", fmt_rat(&gap)), class, gap));
        }
        for seed in 0..6u64 {
            let np = 3 + (seed % 3) as usize;
            let bits = random_class(6 + 2 * seed as usize, np, ValueGrid::integer(2).unwrap(), 900 + seed).unwrap();
            let rows = bits.rows().map(|r| r.iter().map(|&v| if v == 1 { lo } else { hi }).collect()).collect();
            let class = FunctionClass::new(FunctionClass::default_domain(np), ValueGrid::real(2).unwrap(), rows).unwrap();
            out.push((format!("random seed={seed} gap={}", fmt_rat(&gap)), class, gap));
        }
    }
    out
}

fn block_constants() -> Outcome {
    let two = rat(2, 1);
    let (mut certs, mut worst_nonseq, mut worst_seq) = (0, None::<Rat>, None::<Rat>);
    for (name, class, gap) in two_level_classes() {
        // β small enough for any horizon up to the exact-enumeration cap
        let beta = gap / rat(20 * 20 * 2, 1);
        let c1 = fit(&class, &[gap, beta]);
        let cert = gapped_dim_real(&c1, &Metric::Absolute, &gap, &beta).map_err(err)?.certificate;
        let d = cert.points.len();
        if d == 0 || d > 6 {
            continue;
        }
        let k = if gap == rat(1, 1) { 1 } else { 4 };
        let n = (k * (d - 1) + 1).min(20);
        let v = offset_rad_nonseq_exact(&build_block_design_nonseq(&c1, &cert, n, two).map_err(err)?).map_err(err)?;
        let bound = rat(d as i128 - 1, 50) - rat(4, 1);
        if v < bound {
            return Err(format!("{name}: design value {} < {}", fmt_rat(&v), fmt_rat(&bound)));
        }
        let margin = v - bound;
        worst_nonseq = Some(worst_nonseq.map_or(margin, |w| w.min(margin)));

        let beta = gap / rat(20, 1);
        let c2 = fit(&class, &[gap, beta]);
        let tc = seq_gapped_dim_real(&c2, &Metric::Absolute, &gap, &beta).map_err(err)?.certificate;
        let ds = tc.depth();
        let n = max_block_budget(&c2, &tc.witness_tree).map_err(err)?;
        if ds == 0 || ds > 6 || n > 20 {
            continue;
        }
        let v = offset_rad_seq_exact(&build_block_tree_seq(&c2, &tc, n, two).map_err(err)?).map_err(err)?;
        let bound = rat(ds as i128, 50);
        if v < bound {
            return Err(format!("{name}: tree value {} < {}", fmt_rat(&v), fmt_rat(&bound)));
        }
        let margin = v - bound;
        worst_seq = Some(worst_seq.map_or(margin, |w| w.min(margin)));
        certs += 1;
    }
    if certs < 20 {
        return Err(format!("only {certs} certificate pairs"));
    }
    Ok(format!(
        "{certs} certificate pairs, smallest margins {} (design) and {} (tree)",
        fmt_rat(&worst_nonseq.unwrap()),
        fmt_rat(&worst_seq.unwrap())
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut comparisons = 0;
    for seed in 0..200 {
        comparisons += common::compare_with_oracles(&common::random_case(seed))?;
    }
    Ok(format!("200 classes, {comparisons} comparisons"))
}

fn inequality_suite() -> Outcome {
    let reports = verify_all(&Corpus::shipped(), false);
    let s = summarize(&reports);
    let fails: Vec<String> = reports
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Fail))
        .map(|r| format!("{} on {}", r.theorem_id, r.instance))
        .collect();
    if !fails.is_empty() {
        return Err(format!("{} failures: {}", fails.len(), fails.join("; ")));
    }
    let silent: Vec<&str> = dimlab::harness::registry()
        .iter()
        .map(|t| t.id)
        .filter(|id| !reports.iter().any(|r| r.theorem_id == *id && matches!(r.verdict, Verdict::Pass)))
        .collect();
    if !silent.is_empty() {
        return Err(format!("checks with no passing report: {}", silent.join(", ")));
    }
    Ok(format!("{} pass, 0 fail, {} skipped", s.pass, s.skipped))
}

fn convexity() -> Outcome {
    let mut classes: Vec<(String, FunctionClass)> = Corpus::shipped()
        .instances
        .iter()
        .filter(|i| i.name().starts_with("convex-"))
        .map(|i| (i.name().to_string(), (*i.class).clone()))
        .collect();
    for seed in 0..12u64 {
        let q = if seed % 2 == 0 { 4 } else { 8 };
        let np = 2 + (seed % 2) as usize;
        let base = random_sign_class(2 + (seed % 3) as usize, np, q, 700 + seed).map_err(err)?;
        classes.push((format!("sign seed={seed} Q={q}"), convexify(&base, 2).map_err(err)?));
    }
    let (mut tested, mut skipped) = (0usize, 0usize);
    for (name, class) in &classes {
        if convexify(class, 2).map_err(err)? != *class {
            return Err(format!("{name} is not a fixpoint of the closure"));
        }
        let q = class.grid().q() as i128;
        for k in 1..=q {
            let alpha = rat(2 * k, q);
            let fat = fat_dim(class, &alpha).map_err(err)?;
            let fixed = fixed_scale_dim(class, &alpha).map_err(err)?.dim;
            match fixed_scale_by_averaging(class, &fat.certificate, &alpha).map_err(err)? {
                None => skipped += 1,
                Some(cert) => {
                    tested += 1;
                    let ok = cert.verify(class, &Metric::Absolute, &alpha, None).map_err(err)?;
                    if !ok || fixed != fat.dim {
                        return Err(format!("{name} alpha {}: fixed {fixed}, fat {}", fmt_rat(&alpha), fat.dim));
                    }
                }
            }
        }
    }
    let total = tested + skipped;
    if classes.len() < 10 || skipped * 5 > total {
        return Err(format!("{} classes, {skipped} of {total} scales skipped", classes.len()));
    }
    Ok(format!("{} classes, {tested} scales equal, {skipped} skipped off-grid", classes.len()))
}

fn determinism() -> Outcome {
    let corpus = Corpus::shipped();
    let a = to_pretty(&verify_all(&corpus, false)).map_err(err)?;
    let b = to_pretty(&verify_all(&corpus, false)).map_err(err)?;
    let single = dimlab::par::with_threads(1, || to_pretty(&verify_all(&corpus, false))).map_err(err)?;
    if a != b {
        return Err("two runs differ".into());
    }
    if a != single {
        return Err("single-thread run differs".into());
    }
    Ok(format!("{} bytes identical across three runs", a.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 7] = [
        ("log-gap separation", Duration::from_secs(10), log_gap_separation),
        ("single-point separation", Duration::from_secs(30), single_point_separation),
        ("lower-bound constants", Duration::from_secs(300), block_constants),
        ("oracle equivalence", Duration::from_secs(600), oracle_equivalence),
        ("inequality suite", Duration::from_secs(900), inequality_suite),
        ("convexity", Duration::from_secs(600), convexity),
        ("determinism", Duration::from_secs(900), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => Err(format!("{detail}; took {took:.1?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {took:.1?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
