//! Default rayon pool against a one-thread pool on the exhaustive kernels.
//! Built without the `parallel` feature both arms run the sequential code.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dimlab::constructions::random_class;
use dimlab::games::{default_grid, minimax_transductive, GameConfig, GameOrder};
use dimlab::harness::{verify_all, Corpus};
use dimlab::nonseq_dims::gapped_dim_real;
use dimlab::par::with_threads;
use dimlab::rademacher::{offset_rad_nonseq_exact, OffsetInstance};
use dimlab::sequential::sfat_dim;
use dimlab::{rat, FunctionClass, Metric, Rat, SampleDesign, ValueGrid};

fn class(nf: usize, np: usize, q: i64, seed: u64) -> FunctionClass {
    random_class(nf, np, ValueGrid::real(q).unwrap(), seed).unwrap()
}

fn both<F: Fn() + Sync>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("pool", "default"), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("pool", "one-thread"), |b| b.iter(|| with_threads(1, &f)));
    g.finish();
}

fn offset_exact(c: &mut Criterion) {
    let cl = class(24, 4, 4, 1);
    let n = 18;
    let design = SampleDesign::new((0..n).map(|t| t % 4).collect(), 4).unwrap();
    let inst = OffsetInstance::sequence(cl, design, vec![Rat::from_integer(0); n], rat(2, 1)).unwrap();
    both(c, "offset_nonseq_exact_n18", || {
        offset_rad_nonseq_exact(&inst).unwrap();
    });
}

fn gapped_dims(c: &mut Criterion) {
    let cl = class(120, 6, 4, 2);
    both(c, "gapped_dim_real_120x6", || {
        gapped_dim_real(&cl, &Metric::Absolute, &rat(1, 2), &rat(1, 4)).unwrap();
    });
}

fn seq_dims(c: &mut Criterion) {
    let cl = class(150, 4, 8, 3);
    both(c, "sfat_150x4", || {
        sfat_dim(&cl, &rat(1, 4)).unwrap();
    });
}

fn games(c: &mut Criterion) {
    let cl = class(6, 2, 2, 4);
    let design = SampleDesign::new(vec![0, 1, 0], 2).unwrap();
    let cfg = GameConfig::new(cl, 3, default_grid(), default_grid(), GameOrder::Transductive(design)).unwrap();
    both(c, "transductive_game_n3", || {
        minimax_transductive(&cfg).unwrap();
    });
}

fn harness(c: &mut Criterion) {
    let corpus = Corpus::shipped();
    both(c, "verify_all_shipped", || {
        verify_all(&corpus, false);
    });
}

criterion_group!(benches, offset_exact, gapped_dims, seq_dims, games, harness);
criterion_main!(benches);
