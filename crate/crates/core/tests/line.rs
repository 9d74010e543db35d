//! Line-problem wave operators: the M₁ rotation, the free case, the six-term split,
//! the four-term form on an exceptional example, and the time limit.

use scatter_core::boundary::line_m1;
use scatter_core::jost::KXGrid;
use scatter_core::line::{self, LineForm, LineGaussian, LineProblem, LineWaveContext};
use scatter_core::linalg::{self, CMat, C64};
use scatter_core::potentials::{Cell, LinePotential};
use scatter_core::spectral::Sign;
use scatter_core::verify;

fn scalar(v: f64) -> CMat {
    CMat::from_element(1, 1, C64::new(v, 0.0))
}

fn probe_field(lc: &LineWaveContext, n: usize) -> scatter_core::field::Field {
    lc.line_field(|x, o| {
        for (c, v) in o.iter_mut().enumerate().take(n) {
            *v = C64::new(1.0, 0.2 * c as f64) * (-(x - 1.5).powi(2) / 0.8).exp() * (1.0 + 0.3 * x) * (-(x * x) / 50.0).exp();
        }
    })
}

#[test]
fn m1_diagonalizes_the_free_line_condition() {
    for n in 1..4 {
        let m = line_m1(n);
        let mut j = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, i + n)] = C64::new(-1.0, 0.0);
            j[(i + n, i)] = C64::new(-1.0, 0.0);
        }
        let d = m.adjoint() * &j * &m;
        let off = (0..2 * n).flat_map(|a| (0..2 * n).map(move |b| (a, b))).filter(|(a, b)| a != b).map(|(a, b)| d[(a, b)].norm()).fold(0.0, f64::max);
        assert!(off < 1e-12, "n={n}: off-diagonal {off:e}");
        assert!(linalg::unitarity_defect(&m) < 1e-12);
    }
}

#[test]
fn free_line_wave_operators_are_the_identity() {
    let lp = LineProblem::free(2);
    let lc = LineWaveContext::new(&lp, KXGrid::default(), verify::WINDOW).unwrap();
    let y = probe_field(&lc, 2);
    for sign in [Sign::Plus, Sign::Minus] {
        for form in [LineForm::Chained, LineForm::FourTerm] {
            let w = line::line_wave_op(&lc, &y, sign, form).unwrap();
            let d = w.distance(&y).unwrap() / y.norm2();
            assert!(d < 1e-10, "{sign:?} {form:?}: {d:e}");
        }
    }
}

#[test]
fn six_term_split_sums_to_the_chained_form() {
    let lp = LineProblem::delta(LinePotential::new(1, vec![Cell::new(-1.0, 0.0, scalar(0.5)), Cell::new(0.0, 1.0, scalar(0.5))]).unwrap(), scalar(0.0)).unwrap();
    let lc = LineWaveContext::new(&lp, KXGrid::default(), verify::WINDOW).unwrap();
    let y = probe_field(&lc, 1);
    for sign in [Sign::Plus, Sign::Minus] {
        let wc = line::line_wave_op(&lc, &y, sign, LineForm::Chained).unwrap();
        let z = line::fold_field(&y).unwrap().apply_matrix(&lc.m1.adjoint()).unwrap();
        let terms = lc.j_split_terms(&z, sign).unwrap();
        let mut sum = terms[0].clone();
        for t in &terms[1..] {
            sum = sum.add(t).unwrap();
        }
        let wj = line::unfold_field(&sum.apply_matrix(&lc.m1).unwrap()).unwrap();
        let d = wj.distance(&wc).unwrap() / wc.norm2();
        assert!(d < 1e-5, "{sign:?}: {d:e}");
    }
}

#[test]
fn four_term_form_matches_chained_form_on_the_resonant_well() {
    let lp = LineProblem::delta(line::resonant_even_well(1.0, 1.0 / 128.0).unwrap(), scalar(0.0)).unwrap();
    let lc = LineWaveContext::new(&lp, verify::resonant_grid(), verify::WINDOW).unwrap();
    let (d0, dinf) = lc.swap_defects();
    assert!(d0.max(dinf) < 1e-3, "hypothesis defects {d0:e} {dinf:e}");
    let y = probe_field(&lc, 1);
    for sign in [Sign::Plus, Sign::Minus] {
        let wc = line::line_wave_op(&lc, &y, sign, LineForm::Chained).unwrap();
        let w4 = line::line_wave_op(&lc, &y, sign, LineForm::FourTerm).unwrap();
        let d = w4.distance(&wc).unwrap() / wc.norm2();
        assert!(d < 1e-3, "{sign:?}: {d:e}");
    }
}

#[test]
fn four_term_form_requires_the_hypothesis() {
    let lp = LineProblem::delta(LinePotential::zero(1), scalar(2.0)).unwrap();
    let lc = LineWaveContext::new(&lp, KXGrid::default(), verify::WINDOW).unwrap();
    assert!(lc.pipeline(Sign::Plus, LineForm::FourTerm).is_err());
}

#[test]
fn time_limit_approaches_the_stationary_wave_operator() {
    let lp = LineProblem::delta(LinePotential::new(1, vec![Cell::new(-1.0, 0.0, scalar(0.5)), Cell::new(0.0, 1.0, scalar(0.5))]).unwrap(), scalar(0.0)).unwrap();
    let lc = LineWaveContext::new(&lp, KXGrid::default(), verify::WINDOW).unwrap();
    let data = LineGaussian { center: -6.0, width: 1.0, momentum: 3.0, amp: vec![C64::new(1.0, 0.0)] };
    let r = line::line_time_limit(&lc, &data, Sign::Plus, &verify::TIME_SCHEDULE).unwrap();
    assert!(r.nonincreasing, "{:?}", r.distances);
    assert!(r.final_distance < 1e-2, "{:?}", r.distances);
}

#[test]
fn line_verify_scenarios_pass() {
    let lp = LineProblem::delta(LinePotential::zero(1), scalar(2.0)).unwrap();
    let report = verify::run_line(&lp, KXGrid::default(), scatter_core::io::Tolerances::default().into()).unwrap();
    for c in &report.criteria {
        println!("{}", c.summary_line());
    }
    assert!(report.all_pass());
}
