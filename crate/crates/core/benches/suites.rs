use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use glfamily::suites::oracles::set_ops_oracle;
use glfamily::suites::stages::{approx_suite, level_one};
use glfamily::suites::{path_lemma_suite, theta_suite, ThetaConfig};
use glfamily::{Exec, FamilyLevel, ThetaRule};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn theta(c: &mut Criterion) {
    let rule = ThetaRule::new(FamilyLevel::new(2).unwrap());
    let cfg = ThetaConfig { kmax: 5_000, arg_max: 2_000, ..ThetaConfig::default() };
    let mut g = c.benchmark_group("theta_suite");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| theta_suite(&rule, &cfg, exec)));
    }
    g.finish();
}

fn path_lemma(c: &mut Criterion) {
    let mut g = c.benchmark_group("path_lemma_suite");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 5), &5, |b, &n| b.iter(|| path_lemma_suite(n, exec)));
    }
    g.finish();
}

fn approx(c: &mut Criterion) {
    let mut g = c.benchmark_group("approx_stages");
    g.sample_size(10);
    for (name, exec) in MODES {
        let sys = level_one(exec);
        g.bench_with_input(BenchmarkId::new(name, 14), &14, |b, &d| {
            b.iter(|| {
                let states = sys.run(d).unwrap();
                approx_suite(&sys, &states, 4).unwrap()
            })
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    // single threaded either way, a baseline for the others
    c.bench_function("set_ops_oracle/200", |b| b.iter(|| set_ops_oracle(200, 0)));
}

criterion_group!(benches, theta, path_lemma, approx, oracle);
criterion_main!(benches);
