// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use l2switch_core::{crc32, generate, run, LearnTable, MacAddress, Scenario, SwitchConfig};

fn bench_crc(c: &mut Criterion) {
    let data: Vec<u8> = (0..1518u32).map(|i| (i * 31) as u8).collect();
    let mut g = c.benchmark_group("crc32");
    g.throughput(Throughput::Bytes(data.len() as u64));
    g.bench_function("1518 bytes", |b| b.iter(|| crc32(black_box(&data))));
    g.finish();
}

fn bench_learn_table(c: &mut Criterion) {
    let macs: Vec<MacAddress> = (0..32u8).map(|i| MacAddress([2, 0, 0, 0, 0, i])).collect();
    c.bench_function("learn table mixed ops", |b| {
        b.iter(|| {
            let mut t = LearnTable::new(16, 2);
            for (i, m) in macs.iter().enumerate() {
                t.learn(*m, i % 4);
                black_box(t.lookup(macs[(i * 7) % macs.len()]));
            }
        })
    });
}

fn bench_scenarios(c: &mut Criterion) {
    let mut g = c.benchmark_group("run");
    g.sample_size(10);
    for s in [Scenario::FloodThenLearn, Scenario::LineRate4Port] {
        let trace = generate(s, None, 1).trace;
        let config = SwitchConfig::default();
        g.bench_function(s.name(), |b| {
            b.iter(|| run(&config, black_box(&trace)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_crc, bench_learn_table, bench_scenarios);
criterion_main!(benches);
