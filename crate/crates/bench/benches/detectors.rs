//! Detector hot paths: Page-Hinkley updates, KS evaluation, and the
//! window monitor's per-step test, which dominates long monitoring runs.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use studd_core::drift::{
    ks_statistic, monitor_update, ph_reset, ph_update, Detection, MonitorMode, PageHinkleyState,
    WindowMonitor,
};
use studd_core::rng::{rng_from, standard_normal};

fn bench_page_hinkley(c: &mut Criterion) {
    let mut rng = rng_from(1);
    let losses: Vec<f64> = (0..10_000)
        .map(|_| f64::from(standard_normal(&mut rng) > 1.0))
        .collect();

    let mut group = c.benchmark_group("page_hinkley");
    group.throughput(Throughput::Elements(losses.len() as u64));
    group.bench_function("update_10k_01_losses", |b| {
        b.iter(|| {
            let mut state = PageHinkleyState::default();
            for &x in &losses {
                if ph_update(&mut state, black_box(x)).unwrap() == Detection::Change {
                    ph_reset(&mut state);
                }
            }
            state.count()
        })
    });
    group.finish();
}

fn bench_ks(c: &mut Criterion) {
    let mut rng = rng_from(2);
    let a: Vec<f64> = (0..500).map(|_| standard_normal(&mut rng)).collect();
    let b_sample: Vec<f64> = (0..500).map(|_| standard_normal(&mut rng) + 0.3).collect();

    c.bench_function("ks_statistic_500_vs_500", |b| {
        b.iter(|| ks_statistic(black_box(&a), black_box(&b_sample)).unwrap())
    });
}

fn bench_window_monitor(c: &mut Criterion) {
    let mut rng = rng_from(3);
    let values: Vec<f64> = (0..5_000).map(|_| standard_normal(&mut rng)).collect();

    let mut group = c.benchmark_group("window_monitor");
    group.throughput(Throughput::Elements(values.len() as u64));
    group.bench_function("scalar_w500_5k_steps", |b| {
        b.iter(|| {
            let mut monitor =
                WindowMonitor::scalar(MonitorMode::SlidingReference, 500, 0.001).unwrap();
            let mut alarms = 0usize;
            for &x in &values {
                if monitor_update(&mut monitor, black_box(&[x])).unwrap() == Detection::Change {
                    alarms += 1;
                    break;
                }
            }
            alarms
        })
    });
    group.finish();
}

criterion_group!(benches, bench_page_hinkley, bench_ks, bench_window_monitor);
criterion_main!(benches);
