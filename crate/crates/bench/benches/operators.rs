use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use acmf_core::evolution::{stability_bound, EvolutionState, Scheme, Stepper};
use acmf_core::profile::solve_profile;
use acmf_core::{GridChart, Potential, ScalarField, SpaceForm, WeightSpec};

fn charts() -> Vec<(&'static str, Arc<GridChart>)> {
    vec![
        (
            "flat-256",
            Arc::new(GridChart::new(SpaceForm::flat_torus(1.0), 256, 256).unwrap()),
        ),
        (
            "sphere-128x256",
            Arc::new(GridChart::new(SpaceForm::sphere(), 128, 256).unwrap()),
        ),
        (
            "hyperbolic-256x64",
            Arc::new(GridChart::new(SpaceForm::hyperbolic(2.5), 256, 64).unwrap()),
        ),
    ]
}

fn field(chart: &Arc<GridChart>) -> ScalarField {
    ScalarField::from_fn(chart.clone(), |p| (3.0 * p.x1).sin() * (2.0 * p.x2).cos())
}

fn laplacian(c: &mut Criterion) {
    let mut g = c.benchmark_group("laplace_beltrami");
    for (name, chart) in charts() {
        let u = field(&chart);
        g.bench_with_input(BenchmarkId::from_parameter(name), &u, |b, u| {
            b.iter(|| u.laplace_beltrami())
        });
    }
    g.finish();
}

fn steps(c: &mut Criterion) {
    let eps = 0.05;
    let pot = Potential::quartic();
    let mut g = c.benchmark_group("step");
    g.sample_size(20);
    for (name, chart) in charts() {
        for scheme in [Scheme::ExplicitRk2, Scheme::Imex] {
            let u0 = ScalarField::from_fn(chart.clone(), |p| (p.x1 - 0.5).tanh());
            let mut state = EvolutionState::new(u0, eps, pot).unwrap();
            state.dt = 0.5 * stability_bound(&chart, scheme, eps, &pot, state.k0);
            let mut stepper = Stepper::new(chart.clone(), scheme);
            let id = BenchmarkId::new(format!("{scheme:?}"), name);
            g.bench_function(id, |b| {
                b.iter_batched(
                    || state.clone(),
                    |mut s| stepper.step(&mut s).unwrap(),
                    criterion::BatchSize::LargeInput,
                )
            });
        }
    }
    g.finish();
}

fn profile(c: &mut Criterion) {
    let pot = Potential::quartic();
    c.bench_function("profile/eps=0.02,c=1", |b| {
        b.iter(|| solve_profile(0.02, &pot, &WeightSpec::new(1.0)).unwrap())
    });
}

criterion_group!(benches, laplacian, steps, profile);
criterion_main!(benches);
