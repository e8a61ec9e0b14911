use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use windward_core::config::ScenarioConfig;
use windward_core::presets;
use windward_core::{guidance_step, run, UnitVec2, Vec2, VehicleState};

fn path_of(cfg: &ScenarioConfig) -> windward_core::PathModel {
    cfg.path.build().expect("preset path")
}

fn bench_guidance(c: &mut Criterion) {
    let params = presets::params();
    let circle = path_of(&presets::fig6());
    let vehicle = VehicleState::new(Vec2::new(130.0, 40.0), UnitVec2::from_angle(2.0), 14.0).unwrap();
    let mut group = c.benchmark_group("guidance_step");
    for (name, wind) in [("slow", 12.0), ("fast1", 16.0), ("fast2", 30.0)] {
        let w = Vec2::new(wind, 0.0);
        group.bench_function(name, |b| {
            b.iter(|| guidance_step(black_box(&vehicle), &circle, black_box(w), &params).unwrap())
        });
    }
    group.finish();
}

fn bench_projection(c: &mut Criterion) {
    let circle = path_of(&presets::fig6());
    let line = path_of(&presets::appendix_line());
    let point = Vec2::new(130.0, 40.0);
    c.bench_function("project/circle", |b| {
        b.iter(|| circle.project(black_box(point)).unwrap())
    });
    c.bench_function("project/line", |b| b.iter(|| line.project(black_box(point)).unwrap()));
}

fn bench_run(c: &mut Criterion) {
    let mut scenario = presets::fig6().scenario().unwrap();
    scenario.duration = 60.0;
    let mut group = c.benchmark_group("run");
    group.sample_size(10);
    group.bench_function("fig6_60s", |b| b.iter(|| run(black_box(&scenario)).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_guidance, bench_projection, bench_run);
criterion_main!(benches);
