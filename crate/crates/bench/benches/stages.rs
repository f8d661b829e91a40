use criterion::{criterion_group, criterion_main, Criterion};
use purepoint_bench::{model, validated};
use purepoint_core::model::{fixed_seed, DEFAULT_MAX_POINTS, DEFAULT_SEED_POWER_CAP};
use purepoint_core::oracle::grow_patch_flat;
use purepoint_core::pipeline::{check, CheckOptions};
use purepoint_core::spectral::{spectral_radius, DEFAULT_TOL};

fn radius(c: &mut Criterion) {
    for name in ["dekking", "afhi"] {
        let out = check(&model(name), &CheckOptions::default()).unwrap();
        let g = out.graph.unwrap().graph;
        c.bench_function(&format!("spectral_radius/{name}"), |b| b.iter(|| spectral_radius(&g, DEFAULT_TOL).unwrap()));
    }
}

fn patches(c: &mut Criterion) {
    let v = validated("chair3d");
    let (_, xi) = fixed_seed(&v, DEFAULT_SEED_POWER_CAP, DEFAULT_MAX_POINTS).unwrap();
    let xi = v.model.to_flat_point(&xi).unwrap();
    c.bench_function("patch/chair3d depth 4", |b| {
        b.iter(|| grow_patch_flat(&v, &xi, 4, None, DEFAULT_MAX_POINTS).unwrap())
    });
}

criterion_group!(benches, radius, patches);
criterion_main!(benches);
