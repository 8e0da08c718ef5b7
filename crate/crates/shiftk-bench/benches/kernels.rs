use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use shiftk_core::bounds::{cauchy_gram, optimal_b_with};
use shiftk_core::experiments::{gen_ar1, loss_gradient, ArDatasetSpec};
use shiftk_core::filter::{impulse_response, rnn_rollout, shiftk_init};
use shiftk_core::loss::{loss_auto_closed, loss_freq_quadrature, loss_white_closed};
use shiftk_core::signal::ComplexSeq;
use shiftk_core::TaskSpec;

fn bench_losses(c: &mut Criterion) {
    let spec = TaskSpec::new(51, 500, 0.0, 1.0).unwrap();
    let p = shiftk_init(&spec).unwrap();
    c.bench_function("loss_white_closed_s51", |b| {
        b.iter(|| loss_white_closed(black_box(&p), 500).unwrap())
    });
    c.bench_function("loss_auto_closed_s51_rho05", |b| {
        b.iter(|| loss_auto_closed(black_box(&p), 500, 0.5).unwrap())
    });
    c.bench_function("loss_freq_quadrature_s51_8192", |b| {
        b.iter(|| loss_freq_quadrature(black_box(&p), 500, 0.0, 8192).unwrap())
    });
}

fn bench_solver(c: &mut Criterion) {
    let spec = TaskSpec::new(51, 500, 0.0, 1.0).unwrap();
    let p = shiftk_init(&spec).unwrap();
    c.bench_function("cauchy_gram_build_s51", |b| {
        b.iter(|| cauchy_gram(black_box(p.poles())).unwrap())
    });
    let gram = cauchy_gram(p.poles()).unwrap();
    c.bench_function("optimal_b_solve_s51", |b| {
        b.iter(|| optimal_b_with(black_box(&gram), 500).unwrap())
    });
}

fn bench_recurrence(c: &mut Criterion) {
    let spec = TaskSpec::new(33, 250, 0.0, 1.0).unwrap();
    let p = shiftk_init(&spec).unwrap();
    let input = ComplexSeq::new(
        (0..1000)
            .map(|i| Complex64::new(((i * 37) % 11) as f64 / 11.0 - 0.5, 0.0))
            .collect(),
    )
    .unwrap();
    c.bench_function("rnn_rollout_s33_n1000", |b| {
        b.iter(|| rnn_rollout(black_box(&p), black_box(&input)))
    });
    c.bench_function("impulse_response_s51_k2000", |b| {
        let spec = TaskSpec::new(51, 500, 0.0, 1.0).unwrap();
        let p = shiftk_init(&spec).unwrap();
        b.iter(|| impulse_response(black_box(&p), 2000))
    });
}

fn bench_gradient(c: &mut Criterion) {
    let data = gen_ar1(&ArDatasetSpec {
        n: 300,
        t_star: 50,
        rho: 0.7,
        num_samples: 50,
        seed: 0,
        burn_in: 0,
    })
    .unwrap();
    let spec = TaskSpec::new(33, 250, 0.0, 1.0).unwrap();
    let p = shiftk_init(&spec).unwrap();
    c.bench_function("loss_gradient_batch50_n300_s33", |b| {
        b.iter(|| loss_gradient(black_box(&p), black_box(&data), 50).unwrap())
    });
}

criterion_group!(benches, bench_losses, bench_solver, bench_recurrence, bench_gradient);
criterion_main!(benches);
