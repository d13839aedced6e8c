//! Decoder and harness throughput: BP alone, the BP+LED pipeline, Monte-Carlo
//! FER points on the parallel and serial paths, and spectrum construction.
//!
//! Run with `cargo bench -p bpled-core`; add `--no-default-features` to time
//! the serial fallback of the whole crate instead of just `run_fer_serial`.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use bpled_core::bpdec::{channel_llrs, BpDecoder};
use bpled_core::bpled::{BpLedDecoder, BpLedParams};
use bpled_core::codes::sample_gallager;
use bpled_core::sim::{run_fer, run_fer_serial, transmit_awgn, trial_rng, ChannelConfig};
use bpled_core::spectra::gallager_avg_spectrum;

fn bench_decoders(c: &mut Criterion) {
    let code = sample_gallager(4, 8, 96, 11).expect("valid ensemble parameters");
    let decoder = BpLedDecoder::new(&code, BpLedParams::default()).expect("decoder builds");
    let bp = BpDecoder::new(&code, 50);
    let chan = ChannelConfig::new(0.5, 3.0);
    let zeros = vec![0u8; code.n()];

    let mut group = c.benchmark_group("decode_n96");
    group.bench_function("bp_only", |b| {
        let mut trial = 0u64;
        b.iter_batched(
            || {
                trial += 1;
                let mut rng = trial_rng(42, 0, trial);
                transmit_awgn(&zeros, chan.sigma, &mut rng)
            },
            |received| black_box(bp.decode(&channel_llrs(&received, chan.sigma))),
            BatchSize::SmallInput,
        );
    });
    group.bench_function("bp_led_pipeline", |b| {
        let mut trial = 0u64;
        b.iter_batched(
            || {
                trial += 1;
                let mut rng = trial_rng(42, 0, trial);
                transmit_awgn(&zeros, chan.sigma, &mut rng)
            },
            |received| black_box(decoder.decode(&received, chan.sigma)),
            BatchSize::SmallInput,
        );
    });
    group.finish();
}

fn bench_fer_point(c: &mut Criterion) {
    let code = sample_gallager(3, 6, 48, 11).expect("valid ensemble parameters");
    let params = BpLedParams::default();
    let grid = [3.0];

    let mut group = c.benchmark_group("fer_point_n48");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_fer(&code, params, &grid, 20, 4000, 42).expect("runs")));
    });
    group.bench_function("serial", |b| {
        b.iter(|| black_box(run_fer_serial(&code, params, &grid, 20, 4000, 42).expect("runs")));
    });
    group.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    c.bench_function("spectrum_4_8_n576", |b| {
        b.iter(|| black_box(gallager_avg_spectrum(4, 8, 576).expect("valid parameters")));
    });
}

criterion_group!(benches, bench_decoders, bench_fer_point, bench_spectrum);
criterion_main!(benches);
