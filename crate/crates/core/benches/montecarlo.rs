use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use relay_dmt::cf::CfScenario;
use relay_dmt::channel::SnrPoint;
use relay_dmt::jeemas::{CandidateMode, MPolicy, RateMode, SelectionPolicy};
use relay_dmt::montecarlo::{estimate_outage, Executor, Strategy};
use relay_dmt::topology::RelayTopology;

const TRIALS: u64 = 20_000;

fn strategies() -> Vec<(&'static str, Strategy)> {
    vec![
        (
            "jeemas-2-4-2",
            Strategy::Jeemas {
                topology: RelayTopology::new(vec![2, 4, 2]).unwrap(),
                policy: SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Hybrid),
            },
        ),
        (
            "cf-1-11-1",
            Strategy::Cf {
                scenario: CfScenario::new(1, vec![1, 1], 1, SnrPoint::from_db(0.0)).unwrap(),
            },
        ),
    ]
}

fn executors(c: &mut Criterion) {
    let workers = std::thread::available_parallelism().map_or(1, usize::from);
    let snr = SnrPoint::from_db(10.0);
    let rate = RateMode::Scaled { r: 0.5 };
    let mut group = c.benchmark_group("estimate_outage");
    group.sample_size(10);
    for (name, strategy) in strategies() {
        for (label, exec) in [
            ("sequential", Executor::Sequential),
            ("parallel", Executor::Parallel { workers }),
        ] {
            group.bench_with_input(BenchmarkId::new(label, name), &strategy, |b, s| {
                b.iter(|| estimate_outage(black_box(s), snr, rate, TRIALS, 1, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, executors);
criterion_main!(benches);
