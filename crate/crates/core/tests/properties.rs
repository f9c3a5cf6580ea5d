mod common;

use common::point_tree;
use dimlab::combinatorics::{g_m, khintchine_abs_mean};
use dimlab::constructions::random_class;
use dimlab::games::{default_grid, minimax_online_seq, minimax_transductive, GameConfig, GameOrder};
use dimlab::nonseq_cover::{cover_min_exact, packing_max_exact};
use dimlab::nonseq_dims::{fat_dim, fixed_scale_dim, gapped_dim_real};
use dimlab::rademacher::{offset_rad_mc, offset_rad_nonseq_exact, offset_rad_seq_exact, OffsetInstance};
use dimlab::sequential::{seq_gapped_dim_real, sfat_dim};
use dimlab::{rat, FunctionClass, LabeledTree, Metric, Rat, SampleDesign, ValueGrid};
use num_bigint::BigUint;
use proptest::prelude::*;

fn real_class(nf: usize, np: usize, q: i64, seed: u64) -> FunctionClass {
    random_class(nf, np, ValueGrid::real(q).unwrap(), seed).unwrap()
}

fn small_real() -> impl Strategy<Value = FunctionClass> {
    (1usize..=10, 1usize..=4, prop_oneof![Just(2i64), Just(4)], any::<u64>())
        .prop_map(|(nf, np, q, seed)| real_class(nf, np, q, seed))
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn fat_dim_shrinks_with_scale(class in small_real()) {
        let q = class.grid().q() as i128;
        let dims: Vec<usize> = (1..=4).map(|k| fat_dim(&class, &rat(2 * k, q)).unwrap().dim).collect();
        prop_assert!(dims.windows(2).all(|w| w[0] >= w[1]), "{dims:?}");
    }

    #[test]
    fn gapped_dim_grows_with_slack(class in small_real()) {
        let q = class.grid().q() as i128;
        let alpha = rat(4, q);
        let dims: Vec<usize> = (0..=2)
            .map(|b| gapped_dim_real(&class, &Metric::Absolute, &alpha, &rat(b, q)).unwrap().dim)
            .collect();
        prop_assert!(dims.windows(2).all(|w| w[0] <= w[1]), "{dims:?}");
    }

    #[test]
    fn subclass_has_smaller_dimensions(class in small_real(), keep in any::<u16>()) {
        let fs: Vec<usize> = (0..class.n_functions()).filter(|f| keep >> f & 1 == 1).collect();
        prop_assume!(!fs.is_empty());
        let sub = class.subclass(&fs).unwrap();
        let q = class.grid().q() as i128;
        for k in 1..=2 {
            let a = rat(2 * k, q);
            prop_assert!(fat_dim(&sub, &a).unwrap().dim <= fat_dim(&class, &a).unwrap().dim);
            prop_assert!(fixed_scale_dim(&sub, &a).unwrap().dim <= fixed_scale_dim(&class, &a).unwrap().dim);
            prop_assert!(sfat_dim(&sub, &a).unwrap().dim <= sfat_dim(&class, &a).unwrap().dim);
        }
    }

    #[test]
    fn fixed_scale_never_exceeds_fat(class in small_real()) {
        let q = class.grid().q() as i128;
        for k in 1..=4 {
            let a = rat(2 * k, q);
            prop_assert!(fixed_scale_dim(&class, &a).unwrap().dim <= fat_dim(&class, &a).unwrap().dim);
        }
    }

    #[test]
    fn gapped_dims_sit_below_fat_dims(class in small_real()) {
        let q = class.grid().q() as i128;
        let (alpha, beta) = (rat(4, q), rat(1, q));
        let inner = alpha - beta * rat(2, 1);
        prop_assert!(
            gapped_dim_real(&class, &Metric::Absolute, &alpha, &beta).unwrap().dim
                <= fat_dim(&class, &inner).unwrap().dim
        );
        prop_assert!(
            seq_gapped_dim_real(&class, &Metric::Absolute, &alpha, &beta).unwrap().dim
                <= sfat_dim(&class, &inner).unwrap().dim
        );
    }

    #[test]
    fn certificate_prefixes_stay_shattered(class in small_real()) {
        let q = class.grid().q() as i128;
        let a = rat(2, q);
        let cert = fat_dim(&class, &a).unwrap().certificate;
        for k in 0..=cert.points.len() {
            prop_assert!(cert.prefix(k).verify(&class, &Metric::Absolute, &a, None).unwrap());
        }
        let tc = sfat_dim(&class, &a).unwrap().certificate;
        for k in 0..=tc.depth() {
            prop_assert!(tc.prefix(k).verify(&class, &Metric::Absolute, &a, None).unwrap());
        }
    }

    #[test]
    fn cover_is_below_packing_and_shrinks(class in small_real()) {
        let design = SampleDesign::all_points(&class);
        let q = class.grid().q() as i128;
        let covers: Vec<usize> = (1..=3)
            .map(|k| cover_min_exact(&class, &design, &Metric::Absolute, &rat(k, q)).unwrap().len())
            .collect();
        prop_assert!(covers.windows(2).all(|w| w[0] >= w[1]), "{covers:?}");
        for k in 1..=3 {
            let a = rat(k, q);
            let p = packing_max_exact(&class, &design, &Metric::Absolute, &a).unwrap().len();
            prop_assert!(covers[k as usize - 1] <= p);
        }
    }

    #[test]
    fn g_satisfies_its_recurrence(n in 1u64..30, d in 1u64..30, m in 2u64..6) {
        prop_assert_eq!(g_m(n, d, m), g_m(n - 1, d, m) + BigUint::from(m - 1) * g_m(n - 1, d - 1, m));
    }

    #[test]
    fn monte_carlo_is_reproducible(class in small_real(), seed in any::<u64>()) {
        let design = SampleDesign::new((0..6).map(|t| t % class.n_points()).collect(), class.n_points()).unwrap();
        let inst = OffsetInstance::sequence(class, design, vec![Rat::from_integer(0); 6], rat(2, 1)).unwrap();
        let a = offset_rad_mc(&inst, 50, seed, false).unwrap();
        let b = offset_rad_mc(&inst, 50, seed, false).unwrap();
        prop_assert_eq!(a.mean, b.mean);
        prop_assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let full = offset_rad_mc(&inst, 1, seed, true).unwrap();
        prop_assert_eq!(full.mean, offset_rad_nonseq_exact(&inst).unwrap());
    }

    #[test]
    fn constant_trees_reduce_to_designs(class in small_real(), n in 1usize..=6) {
        let np = class.n_points();
        let x_tree = point_tree(np, n, false);
        let mu_levels: Vec<Rat> = (0..n).map(|t| rat((t % 3) as i128 - 1, 2)).collect();
        let mu_tree = LabeledTree::constant_levels(&mu_levels).unwrap();
        let inst = OffsetInstance::tree(class, x_tree, mu_tree, rat(2, 1)).unwrap();
        let flat = inst.flatten().unwrap();
        prop_assert_eq!(offset_rad_seq_exact(&inst).unwrap(), offset_rad_nonseq_exact(&flat).unwrap());
        let full = offset_rad_mc(&inst, 1, 7, true).unwrap();
        prop_assert_eq!(full.mean, offset_rad_seq_exact(&inst).unwrap());
    }

    #[test]
    fn offset_is_nonnegative_when_mu_is_attained(class in small_real(), f in any::<usize>()) {
        let f = f % class.n_functions();
        let np = class.n_points();
        let design = SampleDesign::new((0..5).map(|t| t % np).collect(), np).unwrap();
        let mu: Vec<Rat> = design.indices().iter().map(|&x| class.eval(f, x).unwrap()).collect();
        let inst = OffsetInstance::sequence(class, design, mu, rat(2, 1)).unwrap();
        prop_assert!(offset_rad_nonseq_exact(&inst).unwrap() >= Rat::from_integer(0));
    }
}

#[test]
fn khintchine_squared_bound_holds() {
    for k in 1..=30u32 {
        let m = khintchine_abs_mean(k).unwrap();
        assert!(m * m >= rat(1, 2 * k as i128), "k = {k}");
    }
}

#[test]
fn monte_carlo_error_is_calibrated() {
    let class = real_class(6, 3, 4, 99);
    let design = SampleDesign::new(vec![0, 1, 2, 0, 1, 2, 0, 1, 2, 0], 3).unwrap();
    let inst = OffsetInstance::sequence(class, design, vec![rat(1, 4); 10], rat(2, 1)).unwrap();
    let exact = dimlab::model::rat_to_f64(&offset_rad_nonseq_exact(&inst).unwrap());
    let seeds = 400;
    let inside = (0..seeds)
        .filter(|&seed| {
            let est = offset_rad_mc(&inst, 200, seed, false).unwrap();
            (dimlab::model::rat_to_f64(&est.mean) - exact).abs() <= 5.0 * est.std_error
        })
        .count();
    assert!(inside * 100 >= seeds as usize * 99, "{inside} of {seeds} within 5 SE");
}

fn game(class: &FunctionClass, n: usize, yhat: Vec<Rat>, y: Vec<Rat>, online: bool) -> Rat {
    let order = if online {
        GameOrder::Online((0..class.n_points()).collect())
    } else {
        GameOrder::Transductive(SampleDesign::new((0..n).map(|t| t % class.n_points()).collect(), class.n_points()).unwrap())
    };
    let cfg = GameConfig::new(class.clone(), n, yhat, y, order).unwrap();
    if online {
        minimax_online_seq(&cfg).unwrap()
    } else {
        minimax_transductive(&cfg).unwrap()
    }
}

#[test]
fn game_values_respond_to_grid_power() {
    let small: Vec<Rat> = (-2..=2).map(|k| rat(k, 1)).collect();
    for seed in 0..12u64 {
        let class = real_class(4, 2, 2, seed);
        for n in 1..=2 {
            for online in [false, true] {
                let base = game(&class, n, default_grid(), small.clone(), online);
                let more_adversary = game(&class, n, default_grid(), default_grid(), online);
                let less_learner = game(&class, n, small.clone(), small.clone(), online);
                assert!(more_adversary >= base, "seed {seed} n {n}");
                assert!(less_learner >= base, "seed {seed} n {n}");
            }
            if n == 1 {
                assert!(game(&class, 1, default_grid(), small.clone(), false) >= Rat::from_integer(0));
            }
        }
    }
}

#[test]
fn single_context_online_equals_transductive() {
    for seed in 0..8u64 {
        let class = real_class(5, 1, 2, seed);
        for n in 1..=3 {
            assert_eq!(
                game(&class, n, default_grid(), default_grid(), true),
                game(&class, n, default_grid(), default_grid(), false),
                "seed {seed} n {n}"
            );
        }
    }
}
