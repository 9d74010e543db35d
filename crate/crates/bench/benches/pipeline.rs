use criterion::{black_box, criterion_group, criterion_main, Criterion};

use scatter_bench::{bench_grid, gaussian, robin_context, robin_problem};
use scatter_core::field::{self, Domain, Field};
use scatter_core::jost;
use scatter_core::line::{self, LineProblem};
use scatter_core::linalg::{CMat, C64};
use scatter_core::potentials::{LinePotential, PotentialSpec};
use scatter_core::scattering;
use scatter_core::spectral::Sign;
use scatter_core::waveop::{self, Form};

fn direct(c: &mut Criterion) {
    let v = PotentialSpec::scalar_step(1.0, 0.0, 1.0);
    let grid = bench_grid();
    c.bench_function("faddeev_solve", |b| b.iter(|| jost::solve_faddeev(black_box(&v), &grid).unwrap()));
    let jt = jost::solve_faddeev(&v, &grid).unwrap();
    let p = robin_problem();
    c.bench_function("smatrix", |b| b.iter(|| scattering::smatrix(&jost::jost_matrix(black_box(&jt), &p.bp).unwrap()).unwrap()));
    c.bench_function("marchenko_kernel", |b| b.iter(|| jost::marchenko_kernel(black_box(&jt), &v).unwrap()));
}

fn wave_operators(c: &mut Criterion) {
    let ctx = robin_context();
    let y = gaussian(&ctx);
    for form in [Form::Stationary, Form::Decomposed, Form::L1] {
        let pl = waveop::wave_op_pipeline(&ctx, Sign::Plus, form).unwrap();
        c.bench_function(&format!("wave_op_{form:?}").to_lowercase(), |b| b.iter(|| pl.apply(black_box(&y)).unwrap()));
    }
    let z = Field::gaussian(Domain::Line, 1.0 / 64.0, 641, 1.0, 0.5, &[C64::new(1.0, 0.0)]);
    c.bench_function("hilbert", |b| b.iter(|| field::hilbert(black_box(&z)).unwrap()));
}

fn line_reduction(c: &mut Criterion) {
    let lp = LineProblem::delta(LinePotential::zero(1), CMat::from_element(1, 1, C64::new(2.0, 0.0))).unwrap();
    let ks: Vec<f64> = (1..=64).map(|i| i as f64 * 0.25).collect();
    c.bench_function("line_ode_oracle_64k", |b| b.iter(|| line::line_jost_direct(black_box(&lp), &ks, 1.0 / 64.0).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = direct, wave_operators, line_reduction
}
criterion_main!(benches);
