//! Comparisons against independent references: closed-form Jost solutions, closed-form
//! line coefficients, and a finite-difference Hamiltonian propagated by Chebyshev series.

use scatter_core::boundary::BoundaryPair;
use scatter_core::field::{Domain, Field};
use scatter_core::jost::{self, KXGrid};
use scatter_core::line::{self, LineProblem};
use scatter_core::linalg::{self, CMat, C64};
use scatter_core::potentials::{Cell, LinePotential, PotentialSpec};
use scatter_core::scattering::ScatteringProblem;
use scatter_core::spectral::{self, Sign};
use scatter_core::verify;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// f(k,0) and f′(k,0) for V = c on (0, a), from the constant-coefficient solution on the cell.
fn step_jost_at_origin(k: f64, c: f64, a: f64) -> (C64, C64) {
    let g2 = C64::new(k * k - c, 0.0);
    let g = g2.sqrt();
    let (cos, sinc) = if g.norm() < 1e-8 { (C64::new(1.0, 0.0), C64::new(a, 0.0)) } else { ((g * a).cos(), (g * a).sin() / g) };
    let e = (I * k * a).exp();
    // Transfer the data (e^{ika}, ik e^{ika}) at x = a back to x = 0.
    let f = e * (cos - I * k * sinc);
    let fp = e * (g2 * sinc + I * k * cos);
    (f, fp)
}

fn scalar_s(k: f64, c: f64, a: f64, theta: f64) -> C64 {
    let jost = |k: f64| {
        let (f, fp) = step_jost_at_origin(k, c, a);
        f * theta.cos() + fp * theta.sin()
    };
    -jost(-k) / jost(k)
}

#[test]
fn step_jost_solution_matches_closed_form() {
    let v = PotentialSpec::scalar_step(1.0, 0.0, 1.0);
    let jt = jost::solve_faddeev(&v, &KXGrid::default()).unwrap();
    let mut worst: f64 = 0.0;
    for i in (0..jt.nk()).step_by(37) {
        let (f, fp) = step_jost_at_origin(jt.k[i], 1.0, 1.0);
        worst = worst.max((jt.f(i, 0)[(0, 0)] - f).norm()).max((jt.fprime(i, 0)[(0, 0)] - fp).norm());
    }
    assert!(worst < 1e-8, "Jost solution at the origin off by {worst:e}");
}

#[test]
fn step_scattering_matrix_matches_closed_form_for_several_conditions() {
    for (c, a) in [(1.0, 1.0), (-2.0, 0.5), (3.0, 0.25)] {
        let v = PotentialSpec::scalar_step(c, 0.0, a);
        let jt = jost::solve_faddeev(&v, &KXGrid::default()).unwrap();
        for theta in [0.3, std::f64::consts::FRAC_PI_2, 2.0, verify::robin_step_theta()] {
            let st = scatter_core::scattering::smatrix(&jost::jost_matrix(&jt, &BoundaryPair::robin(theta)).unwrap()).unwrap();
            let worst = (0..st.nk())
                .step_by(29)
                .filter(|&i| st.k[i].abs() > 0.05)
                .map(|i| (st.s[i][(0, 0)] - scalar_s(st.k[i], c, a, theta)).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-7, "c={c} a={a} theta={theta}: S off by {worst:e}");
        }
    }
}

#[test]
fn decoupled_channels_reduce_to_scalar_problems() {
    let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0)]));
    let v = PotentialSpec::new(2, vec![Cell::new(0.0, 0.5, m)]).unwrap();
    let thetas = [0.7, 2.4];
    let p = ScatteringProblem::build(v, BoundaryPair::robin_diag(&thetas), KXGrid::default()).unwrap();
    let mut worst: f64 = 0.0;
    for i in (0..p.st.nk()).step_by(41).filter(|&i| p.st.k[i].abs() > 0.05) {
        let k = p.st.k[i];
        let s = &p.st.s[i];
        worst = worst
            .max((s[(0, 0)] - scalar_s(k, 1.0, 0.5, thetas[0])).norm())
            .max((s[(1, 1)] - scalar_s(k, -2.0, 0.5, thetas[1])).norm())
            .max(s[(0, 1)].norm())
            .max(s[(1, 0)].norm());
    }
    assert!(worst < 1e-7, "decoupled S off by {worst:e}");
}

#[test]
fn delta_interaction_matches_closed_form_coefficients() {
    for lambda in [2.0, -0.7] {
        let lp = LineProblem::delta(LinePotential::zero(1), CMat::from_element(1, 1, C64::new(lambda, 0.0))).unwrap();
        let (v, bp) = line::fold(&lp).unwrap();
        let p = ScatteringProblem::build(v, bp, KXGrid::default()).unwrap();
        let lt = line::line_smatrix_from_halfline(&p.st).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &k) in lt.k.iter().enumerate().filter(|(_, k)| k.abs() > 0.05) {
            let d = C64::new(0.0, 2.0 * k) - lambda;
            let t = C64::new(0.0, 2.0 * k) / d;
            let r = C64::new(lambda, 0.0) / d;
            for (got, want) in [(lt.tl[i][(0, 0)], t), (lt.tr[i][(0, 0)], t), (lt.l[i][(0, 0)], r), (lt.r[i][(0, 0)], r)] {
                worst = worst.max((got - want).norm());
            }
        }
        assert!(worst < 1e-9, "lambda={lambda}: coefficients off by {worst:e}");
    }
}

#[test]
fn kernel_diagonal_is_half_the_tail_integral() {
    let v = PotentialSpec::new(1, vec![Cell::new(0.0, 0.5, CMat::from_element(1, 1, C64::new(2.0, 0.0))), Cell::new(0.5, 1.25, CMat::from_element(1, 1, C64::new(-0.5, 0.0)))]).unwrap();
    let p = ScatteringProblem::build(v, BoundaryPair::neumann(1), KXGrid::default()).unwrap();
    let kt = &p.kernel;
    let worst = (0..kt.nv)
        .map(|j| {
            let x = j as f64 * kt.dx;
            (kt.get(j, j)[(0, 0)] - p.v.tail_integral(x)[(0, 0)] * 0.5).norm()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "K(x,x) off by {worst:e}");
}

#[test]
fn spectral_evolution_matches_finite_difference_propagation() {
    let (v, bp) = verify::builtin_half_line("robin-step").unwrap();
    let p = ScatteringProblem::build(v.clone(), bp.clone(), KXGrid::default()).unwrap();
    let pt = spectral::physical_solution(&p.jost, &p.st).unwrap();
    let h = p.grid.dx;
    let npos = (20.0 / h) as usize + 1;
    let y = Field::from_fn(Domain::HalfLine, 1, h, npos, |x, o| o[0] = C64::new((-(x - 5.0).powi(2) / 2.0).exp(), 0.0));
    let t = 1.0;
    let spectral_result = spectral::evolve_spectral(&pt, &y, t, Sign::Plus).unwrap();

    let hfd = 1.0 / 128.0;
    let dh = spectral::discrete_hamiltonian(&v, &bp, hfd, 20.0).unwrap();
    let fd = dh.to_field(&dh.propagate(&dh.from_field(&y).unwrap(), t));
    let stride = (hfd / h).round() as usize;
    let sampled = Field::from_fn(Domain::HalfLine, 1, hfd, fd.npos, |x, o| o[0] = spectral_result.at(stride * (x / hfd).round() as usize)[0]);
    let rel = fd.distance(&sampled).unwrap() / sampled.norm2();
    assert!(rel < 1e-2, "finite-difference and spectral evolution differ by {rel:e}");
}

#[test]
fn unitarity_and_boundary_residual_of_physical_solutions() {
    let (v, bp) = verify::builtin_half_line("robin-step").unwrap();
    let p = ScatteringProblem::build(v, bp.clone(), KXGrid::default()).unwrap();
    let pt = spectral::physical_solution(&p.jost, &p.st).unwrap();
    assert!(pt.boundary_residual(&bp) < 1e-9);
    assert!(linalg::op_norm(&(p.st.s0.clone() - linalg::eye(1))) < 1e-3);
}
