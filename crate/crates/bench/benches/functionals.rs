use std::hint::black_box;

use affsurf_core::verify::check_santalo;
use affsurf_core::{ConvexBody, Engine, Functional, ScalarFunction, SphereRule};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn omega_levels(c: &mut Criterion) {
    let k = ConvexBody::perturbed_ball(2, 0.1, "u1^2*u2").unwrap();
    let phi = Functional::Phi(ScalarFunction::power_conc(1.0 / 3.0).unwrap());
    let mut group = c.benchmark_group("omega_phi_n2");
    for level in [8u32, 10, 12, 14] {
        let rule = SphereRule::build(2, level).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(level), &rule, |b, rule| {
            b.iter(|| phi.evaluate(black_box(&k), rule, Engine::Boundary).unwrap())
        });
    }
    group.finish();
}

fn engines_3d(c: &mut Criterion) {
    let k = ConvexBody::perturbed_ball(3, 0.1, "u1^2*u2").unwrap();
    let rule = SphereRule::build(3, 32).unwrap();
    let psi = Functional::Psi(ScalarFunction::power_conv(-0.5).unwrap());
    c.bench_function("omega_psi_n3_boundary", |b| {
        b.iter(|| psi.evaluate(black_box(&k), &rule, Engine::Boundary).unwrap())
    });
    c.bench_function("omega_psi_n3_sphere", |b| {
        b.iter(|| psi.evaluate(black_box(&k), &rule, Engine::Sphere).unwrap())
    });
}

fn polar_path(c: &mut Criterion) {
    let k = ConvexBody::perturbed_ball(2, 0.1, "u1^2*u2").unwrap().polar();
    let rule = SphereRule::build(2, 10).unwrap();
    let lp = Functional::Lp(1.0);
    c.bench_function("omega_p_polar_n2", |b| b.iter(|| lp.evaluate(black_box(&k), &rule, Engine::Boundary).unwrap()));
}

fn santalo(c: &mut Criterion) {
    let k = ConvexBody::ellipsoid_diag(&[2.0, 1.0, 0.5]).unwrap();
    let rule = SphereRule::build(3, 32).unwrap();
    c.bench_function("santalo_ellipsoid_n3", |b| b.iter(|| check_santalo(black_box(&k), &rule, 1e-6).unwrap()));
}

criterion_group!(benches, omega_levels, engines_3d, polar_path, santalo);
criterion_main!(benches);
