//! Property tests for the structural invariants: isometries, adjoint pairs, unitarity
//! and symmetry of S, boundary-pair equivalence, and linearity of the wave operators.

use std::sync::OnceLock;

use proptest::prelude::*;
use scatter_core::boundary::BoundaryPair;
use scatter_core::field::{self, ConvKernel, Domain, Field};
use scatter_core::jost::{self, KXGrid};
use scatter_core::line::{fold_field, unfold_field};
use scatter_core::linalg::{self, CMat, C64};
use scatter_core::potentials::{Cell, PotentialSpec};
use scatter_core::scattering::{self, ScatteringProblem};
use scatter_core::spectral::Sign;
use scatter_core::verify;
use scatter_core::waveop::{self, Form, WaveOpContext};

const H: f64 = 1.0 / 32.0;

/// Robin angles are kept away from Dirichlet so the transition at k ≈ cot θ lies inside kmax.
fn small_grid() -> KXGrid {
    KXGrid::new(12.0, 768, 1.0 / 64.0, 20.0).unwrap()
}

/// A sum of two Gaussians per component with the given parameters.
fn bumps(domain: Domain, n: usize, npos: usize, p: &[(f64, f64, f64, f64)]) -> Field {
    Field::from_fn(domain, n, H, npos, |x, o| {
        for (c, v) in o.iter_mut().enumerate() {
            let (center, width, re, im) = p[c % p.len()];
            *v = C64::new(re, im) * (-(x - center).powi(2) / (2.0 * width * width)).exp();
        }
    })
}

fn bump_params() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-4.0..4.0f64, 0.3..1.5f64, -1.0..1.0f64, -1.0..1.0f64), 1..4)
}

fn rel_close(a: C64, b: C64, scale: f64, tol: f64) -> bool {
    (a - b).norm() <= tol * scale.max(1e-300)
}

fn robin_context() -> &'static WaveOpContext {
    static CTX: OnceLock<WaveOpContext> = OnceLock::new();
    CTX.get_or_init(|| {
        let (v, bp) = verify::builtin_half_line("robin-step").unwrap();
        let p = ScatteringProblem::build(v, bp, KXGrid::default()).unwrap();
        WaveOpContext::new(&p, 10.0).unwrap()
    })
}

fn half_field(ctx: &WaveOpContext, p: &[(f64, f64, f64, f64)]) -> Field {
    ctx.sample(|x, o| {
        let (center, width, re, im) = p[0];
        let center = center.abs() + 1.0;
        o[0] = C64::new(re, im) * (-(x - center).powi(2) / (2.0 * width * width)).exp();
    })
}

fn hermitian(n: usize, entries: &[f64]) -> CMat {
    let mut m = CMat::zeros(n, n);
    let mut it = entries.iter().cycle();
    for i in 0..n {
        m[(i, i)] = C64::new(*it.next().unwrap(), 0.0);
        for j in i + 1..n {
            let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn fold_is_an_isometry_and_unfold_inverts_it(n in 1usize..4, p in bump_params()) {
        let y = bumps(Domain::Line, n, 161, &p);
        let z = fold_field(&y).unwrap();
        prop_assert_eq!(z.n, 2 * n);
        prop_assert!((z.norm2() - y.norm2()).abs() <= 1e-12 * y.norm2().max(1e-300));
        let back = unfold_field(&z).unwrap();
        prop_assert!(back.distance(&y).unwrap() <= 1e-14 * y.norm2().max(1e-300));
    }

    #[test]
    fn unfold_is_the_adjoint_of_fold(p in bump_params(), q in bump_params()) {
        let y = bumps(Domain::Line, 2, 161, &p);
        let z = bumps(Domain::HalfLine, 4, 161, &q);
        let lhs = fold_field(&y).unwrap().inner(&z);
        let rhs = y.inner(&unfold_field(&z).unwrap());
        prop_assert!(rel_close(lhs, rhs, y.norm2() * z.norm2(), 1e-12));
    }

    #[test]
    fn extensions_and_restriction_are_adjoint_pairs(p in bump_params(), q in bump_params()) {
        let y = bumps(Domain::HalfLine, 2, 161, &p);
        let z = bumps(Domain::Line, 2, 161, &q);
        let s = y.norm2() * z.norm2();
        let e = field::extend_even(&y).unwrap().inner(&z);
        prop_assert!(rel_close(e, y.inner(&field::extend_even_adjoint(&z).unwrap()), s, 1e-12));
        let o = field::extend_odd(&y).unwrap().inner(&z);
        prop_assert!(rel_close(o, y.inner(&field::extend_odd_adjoint(&z).unwrap()), s, 1e-12));
        let r = field::restrict(&z).unwrap().inner(&y);
        prop_assert!(rel_close(r, z.inner(&field::restrict_adjoint(&y).unwrap()), s, 1e-12));
    }

    #[test]
    fn hilbert_transform_is_skew_adjoint(p in bump_params(), q in bump_params()) {
        let y = bumps(Domain::Line, 1, 257, &p);
        let z = bumps(Domain::Line, 1, 257, &q);
        let lhs = field::hilbert(&y).unwrap().inner(&z);
        let rhs = -y.inner(&field::hilbert(&z).unwrap());
        prop_assert!(rel_close(lhs, rhs, y.norm2() * z.norm2(), 1e-10));
    }

    #[test]
    fn convolution_adjoint_uses_the_reflected_kernel(a in 0.2..2.0f64, b in -1.0..1.0f64, p in bump_params(), q in bump_params()) {
        let g = ConvKernel::from_fn(1, H, 64, |x| CMat::from_element(1, 1, C64::new((-a * x * x).exp(), b * x * (-x * x).exp())));
        let y = bumps(Domain::Line, 1, 161, &p);
        let z = bumps(Domain::Line, 1, 161, &q);
        let lhs = field::convolve(&g, &y).unwrap().inner(&z);
        let rhs = y.inner(&field::convolve(&g.adjoint(), &z).unwrap());
        prop_assert!(rel_close(lhs, rhs, y.norm2() * z.norm2(), 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn scattering_matrix_is_unitary_and_symmetric(
        n in 1usize..3,
        entries in prop::collection::vec(-1.5..1.5f64, 3),
        cells in 1usize..4,
        thetas in prop::collection::vec(0.3..2.85f64, 2),
        seed in 0u64..1000,
    ) {
        let dx = small_grid().dx;
        let cell_len = 16.0 * dx;
        let cs: Vec<Cell> = (0..cells)
            .map(|j| {
                let scale = 1.0 / (1.0 + j as f64);
                Cell::new(j as f64 * cell_len, (j + 1) as f64 * cell_len, hermitian(n, &entries) * C64::new(scale, 0.0))
            })
            .collect();
        let v = PotentialSpec::new(n, cs).unwrap();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let u = linalg::random_unitary(n, &mut next);
        let bp = BoundaryPair::robin_diag(&thetas[..n]);
        let bp = BoundaryPair { n, a: &u * &bp.a * u.adjoint(), b: &u * &bp.b * u.adjoint() };
        let jt = jost::solve_faddeev(&v, &small_grid()).unwrap();
        let jm = jost::jost_matrix(&jt, &bp).unwrap();
        if let Ok(st) = scattering::smatrix(&jm) {
            let (unit, sym) = st.unitarity_and_symmetry(0.05);
            prop_assert!(unit < 1e-8, "unitarity defect {unit}");
            prop_assert!(sym < 1e-8, "symmetry defect {sym}");
        }
    }

    #[test]
    fn equivalent_boundary_pairs_give_the_same_s(theta in 0.3..2.85f64, t in prop::collection::vec(-1.0..1.0f64, 4)) {
        let tm = CMat::from_element(1, 1, C64::new(1.5 + t[0], t[1]));
        let v = PotentialSpec::scalar_step(0.5 + t[2], 0.0, 0.75);
        let jt = jost::solve_faddeev(&v, &small_grid()).unwrap();
        let bp = BoundaryPair::robin(theta);
        let s1 = scattering::smatrix(&jost::jost_matrix(&jt, &bp).unwrap()).unwrap();
        let s2 = scattering::smatrix(&jost::jost_matrix(&jt, &bp.transformed(&tm)).unwrap()).unwrap();
        let worst = s1.s.iter().zip(&s2.s).map(|(a, b)| linalg::max_abs(&(a - b))).fold(0.0, f64::max);
        prop_assert!(worst < 1e-10, "S changed by {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn wave_operators_are_linear(p in bump_params(), q in bump_params(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let ctx = robin_context();
        let y = half_field(ctx, &p);
        let z = half_field(ctx, &q);
        let (ca, cb) = (C64::new(a, 0.5), C64::new(0.3, b));
        let combo = y.scaled(ca).add(&z.scaled(cb)).unwrap();
        for form in [Form::Stationary, Form::Decomposed, Form::L1] {
            let pl = waveop::wave_op_pipeline(ctx, Sign::Plus, form).unwrap();
            let lhs = pl.apply(&combo).unwrap();
            let rhs = pl.apply(&y).unwrap().scaled(ca).add(&pl.apply(&z).unwrap().scaled(cb)).unwrap();
            prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12 * (lhs.norm2() + rhs.norm2()).max(1e-300));
        }
    }

    #[test]
    fn wave_operator_adjoints_satisfy_duality(p in bump_params(), q in bump_params(), minus in any::<bool>()) {
        let ctx = robin_context();
        let y = half_field(ctx, &p);
        let z = half_field(ctx, &q);
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        for form in [Form::Stationary, Form::Decomposed, Form::L1] {
            let pl = waveop::wave_op_pipeline(ctx, sign, form).unwrap();
            let lhs = pl.apply(&y).unwrap().inner(&z);
            let rhs = y.inner(&pl.adjoint().apply(&z).unwrap());
            prop_assert!(rel_close(lhs, rhs, y.norm2() * z.norm2(), 1e-8), "{form:?}: {lhs} vs {rhs}");
        }
    }
}
