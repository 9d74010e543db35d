//! Full-line problems with a point interaction at the origin: folding to a 2n×2n
//! half-line problem, line scattering coefficients from the folded S(k) and from a
//! direct ODE solve, and the line wave operators.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{self, BoundaryPair};
use crate::error::{Result, ScatterError};
use crate::field::{kernel_apply, Domain, Field};
use crate::jost::KXGrid;
use crate::linalg::{self, CMat, C64, I};
use crate::ode::{self, OdeOptions};
use crate::potentials::{fold_line_potential, LinePotential, PotentialSpec};
use crate::scattering::{s_limits, ScatteringProblem, ScatteringTable};
use crate::spectral::{self, Sign, SpectralFunction};
use crate::waveop::{self, MapFn, OperatorPipeline, Stage, WaveOpContext, HYPOTHESIS_TOL};

/// The point interaction at x = 0.
#[derive(Debug, Clone)]
pub enum Interaction {
    /// Continuity and Y′(0⁺) − Y′(0⁻) = ΛY(0) with Λ Hermitian.
    Delta(CMat),
    /// −B₁†Y(0⁺) − B₂†Y(0⁻) + A₁†Y′(0⁺) − A₂†Y′(0⁻) = 0 with n×2n row blocks.
    General { a1: CMat, a2: CMat, b1: CMat, b2: CMat },
}

/// A potential on the line together with its interaction at the origin.
#[derive(Debug, Clone)]
pub struct LineProblem {
    pub n: usize,
    pub v: LinePotential,
    pub interaction: Interaction,
}

impl LineProblem {
    /// Validates that the folded boundary pair is self-adjoint.
    pub fn new(v: LinePotential, interaction: Interaction) -> Result<Self> {
        let lp = Self { n: v.n, v, interaction };
        let bp = lp.boundary_pair()?;
        boundary::validate_boundary(&bp)?;
        Ok(lp)
    }

    pub fn delta(v: LinePotential, lambda: CMat) -> Result<Self> {
        Self::new(v, Interaction::Delta(lambda))
    }

    /// 𝒱 ≡ 0 with no interaction (Λ = 0).
    pub fn free(n: usize) -> Self {
        Self { n, v: LinePotential::zero(n), interaction: Interaction::Delta(linalg::zeros(n)) }
    }

    /// The 2n×2n boundary pair of the folded problem.
    pub fn boundary_pair(&self) -> Result<BoundaryPair> {
        let n = self.n;
        match &self.interaction {
            Interaction::Delta(lambda) => boundary::line_interaction_matrices(n, lambda),
            Interaction::General { a1, a2, b1, b2 } => {
                for m in [a1, a2, b1, b2] {
                    if m.nrows() != n || m.ncols() != 2 * n {
                        return Err(ScatterError::DimensionMismatch { expected: n, found: m.nrows() });
                    }
                }
                let stack = |top: &CMat, bottom: &CMat| {
                    CMat::from_fn(2 * n, 2 * n, |i, j| if i < n { top[(i, j)] } else { bottom[(i - n, j)] })
                };
                BoundaryPair::new(stack(a1, a2), stack(b1, b2))
            }
        }
    }

    /// Λ for a δ-coupling.
    pub fn coupling(&self) -> Option<&CMat> {
        match &self.interaction {
            Interaction::Delta(l) => Some(l),
            Interaction::General { .. } => None,
        }
    }
}

/// V₂ₙ = diag(V₊, V₋) and the folded boundary pair.
pub fn fold(lp: &LineProblem) -> Result<(PotentialSpec, BoundaryPair)> {
    let (vp, vm) = fold_line_potential(&lp.v)?;
    let v2n = vp.block_diag(&vm)?;
    let bp = lp.boundary_pair()?;
    boundary::validate_boundary(&bp)?;
    Ok((v2n, bp))
}

/// [[0, I], [I, 0]] in n×n blocks.
pub fn swap_matrix(n: usize) -> CMat {
    let z = linalg::zeros(n);
    let id = linalg::eye(n);
    linalg::block2(&z, &id, &id, &z)
}

/// U†: Z₊(x) = Y(x), Z₋(x) = Y(−x) for x ≥ 0. An exact isometry on the grid.
pub fn fold_field(y: &Field) -> Result<Field> {
    if y.domain != Domain::Line {
        return Err(ScatterError::GridMismatch("fold_field expects a line field".into()));
    }
    let n = y.n;
    let o = y.origin();
    let mut z = Field::half_line(2 * n, y.h, y.npos);
    for j in 0..y.npos {
        let dst = z.at_mut(j);
        dst[..n].copy_from_slice(y.at(o + j));
        dst[n..].copy_from_slice(y.at(o - j));
    }
    Ok(z)
}

/// U = (U†)†: (UZ)(x) = Z₊(x) for x > 0, Z₋(−x) for x < 0 and the mean of the two at x = 0.
pub fn unfold_field(z: &Field) -> Result<Field> {
    if z.domain != Domain::HalfLine || !z.n.is_multiple_of(2) {
        return Err(ScatterError::GridMismatch("unfold_field expects a half-line field with 2n components".into()));
    }
    let n = z.n / 2;
    let mut y = Field::line(n, z.h, z.npos);
    let o = y.origin();
    for j in 1..z.npos {
        let src = z.at(j);
        y.at_mut(o + j).copy_from_slice(&src[..n]);
        y.at_mut(o - j).copy_from_slice(&src[n..]);
    }
    let src = z.at(0).to_vec();
    for (c, d) in y.at_mut(o).iter_mut().enumerate() {
        *d = 0.5 * (src[c] + src[n + c]);
    }
    Ok(y)
}

/// Transmission and reflection coefficients on a k grid with
/// S_ℝ = [[T_l, R], [L, T_r]].
#[derive(Debug, Clone)]
pub struct LineScatteringTable {
    pub n: usize,
    pub k: Vec<f64>,
    pub tl: Vec<CMat>,
    pub tr: Vec<CMat>,
    pub l: Vec<CMat>,
    pub r: Vec<CMat>,
    pub s_r: Vec<CMat>,
    /// S_ℝ(0), when the grid allows the extrapolation.
    pub s_r0: Option<CMat>,
    /// S_ℝ∞, when the grid shows a plateau.
    pub s_rinf: Option<CMat>,
}

impl LineScatteringTable {
    fn assemble(n: usize, k: Vec<f64>, tl: Vec<CMat>, tr: Vec<CMat>, l: Vec<CMat>, r: Vec<CMat>) -> Self {
        let s_r: Vec<CMat> = (0..k.len()).map(|i| linalg::block2(&tl[i], &r[i], &l[i], &tr[i])).collect();
        let (s_r0, s_rinf) = match s_limits(&k, &s_r) {
            Ok(lim) => (Some(lim.s0), Some(lim.sinf)),
            Err(_) => (None, None),
        };
        Self { n, k, tl, tr, l, r, s_r, s_r0, s_rinf }
    }

    /// max_k ‖S_ℝ(k)†S_ℝ(k) − I‖.
    pub fn unitarity_defect(&self) -> f64 {
        self.s_r.iter().map(linalg::unitarity_defect).fold(0.0, f64::max)
    }

    /// Largest entrywise difference of S_ℝ against a table on the same k nodes.
    pub fn max_entry_difference(&self, other: &LineScatteringTable) -> Result<f64> {
        if self.k.len() != other.k.len() || self.k.iter().zip(&other.k).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(ScatterError::GridMismatch("line tables use different k nodes".into()));
        }
        Ok(self.s_r.iter().zip(&other.s_r).map(|(a, b)| linalg::max_abs(&(a - b))).fold(0.0, f64::max))
    }

    /// The rows at the given indices (limits recomputed when possible).
    pub fn subset(&self, idx: &[usize]) -> Self {
        let pick = |v: &Vec<CMat>| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        Self::assemble(
            self.n,
            idx.iter().map(|&i| self.k[i]).collect(),
            pick(&self.tl),
            pick(&self.tr),
            pick(&self.l),
            pick(&self.r),
        )
    }
}

/// Extract T_l, T_r, L, R from the folded scattering matrix:
/// T_r = S₂₁, R = S₁₁, T_l = S₁₂, L = S₂₂ in n×n blocks.
pub fn line_smatrix_from_halfline(st: &ScatteringTable) -> Result<LineScatteringTable> {
    if !st.n.is_multiple_of(2) {
        return Err(ScatterError::DimensionMismatch { expected: 2 * (st.n / 2 + 1), found: st.n });
    }
    let n = st.n / 2;
    let blk = |bi: usize, bj: usize| st.s.iter().map(|s| linalg::block(s, n, bi, bj)).collect::<Vec<_>>();
    Ok(LineScatteringTable::assemble(n, st.k.clone(), blk(0, 1), blk(1, 0), blk(1, 1), blk(0, 0)))
}

/// Truth values of S(0) = S∞ = swap and S_ℝ(0) = S_ℝ∞ = I, with the defects behind them.
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalEquivalence {
    pub folded_s0_defect: f64,
    pub folded_sinf_defect: f64,
    pub line_s0_defect: f64,
    pub line_sinf_defect: f64,
    pub folded_holds: bool,
    pub line_holds: bool,
}

impl ExceptionalEquivalence {
    pub fn agree(&self) -> bool {
        self.folded_holds == self.line_holds
    }
}

/// Evaluate both sides of the folded/line exceptional-case equivalence with tolerance `tol`.
pub fn exceptional_equivalence(st: &ScatteringTable, lt: &LineScatteringTable, tol: f64) -> Result<ExceptionalEquivalence> {
    let n = lt.n;
    let sw = swap_matrix(n);
    let id = linalg::eye(2 * n);
    let missing = || ScatterError::NoPlateau { deviation: f64::NAN };
    let s_r0 = lt.s_r0.as_ref().ok_or_else(missing)?;
    let s_rinf = lt.s_rinf.as_ref().ok_or_else(missing)?;
    let fd0 = linalg::op_norm(&(&st.s0 - &sw));
    let fdi = linalg::op_norm(&(&st.sinf - &sw));
    let ld0 = linalg::op_norm(&(s_r0 - &id));
    let ldi = linalg::op_norm(&(s_rinf - &id));
    Ok(ExceptionalEquivalence {
        folded_s0_defect: fd0,
        folded_sinf_defect: fdi,
        line_s0_defect: ld0,
        line_sinf_defect: ldi,
        folded_holds: fd0 < tol && fdi < tol,
        line_holds: ld0 < tol && ldi < tol,
    })
}

/// Integrate −Y″ + 𝒱Y = k²Y for an n×n matrix solution from `from` to `to`, cell by cell,
/// applying the δ jump when the path crosses the origin.
fn line_propagate(v: &LinePotential, lambda: &CMat, k: f64, from: f64, to: f64, state: &mut [C64], opts: &OdeOptions) -> Result<()> {
    let n = v.n;
    let nn = n * n;
    let (lo, hi) = (from.min(to), from.max(to));
    let mut breaks: Vec<f64> = v.cells.iter().flat_map(|c| [c.a, c.b]).chain([0.0]).filter(|&x| x > lo && x < hi).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    if to < from {
        breaks.reverse();
    }
    let mut x0 = from;
    let k2 = C64::new(k * k, 0.0);
    for x1 in breaks.into_iter().chain([to]) {
        let mid = 0.5 * (x0 + x1);
        let mut vm = vec![C64::new(0.0, 0.0); nn];
        linalg::to_flat(&v.value_at(mid), &mut vm);
        for i in 0..n {
            vm[i * n + i] -= k2;
        }
        let rhs = |_x: f64, y: &[C64], dy: &mut [C64]| {
            dy[..nn].copy_from_slice(&y[nn..]);
            linalg::matmul_flat(n, &vm, &y[..nn], &mut dy[nn..]);
        };
        ode::integrate(rhs, x0, x1, state, opts)?;
        if x1 == 0.0 {
            let mut jump = vec![C64::new(0.0, 0.0); nn];
            let mut lf = vec![C64::new(0.0, 0.0); nn];
            linalg::to_flat(lambda, &mut lf);
            linalg::matmul_flat(n, &lf, &state[..nn], &mut jump);
            let s = if to < from { -1.0 } else { 1.0 };
            for (d, j) in state[nn..].iter_mut().zip(&jump) {
                *d += j * s;
            }
        }
        x0 = x1;
    }
    Ok(())
}

/// Reference line coefficients from a direct ODE solve of the line equation with the δ
/// jump at the origin. Only δ-couplings are supported; steps are capped at Δx/4.
pub fn line_jost_direct(lp: &LineProblem, ks: &[f64], dx: f64) -> Result<LineScatteringTable> {
    let lambda = lp
        .coupling()
        .ok_or_else(|| ScatterError::Config("the ODE oracle supports δ-couplings only".into()))?
        .clone();
    let n = lp.n;
    let nn = n * n;
    let x = lp.v.extent().max(1.0);
    let opts = OdeOptions { h_max: dx / 4.0, ..OdeOptions::default() };
    let rows: Vec<Result<[CMat; 4]>> = ks
        .par_iter()
        .map(|&k| {
            let ik = I * k;
            let start = |x0: f64, sign: f64| {
                let e = (I * sign * k * x0).exp();
                let mut st = vec![C64::new(0.0, 0.0); 2 * nn];
                for i in 0..n {
                    st[i * n + i] = e;
                    st[nn + i * n + i] = ik * sign * e;
                }
                st
            };
            let split = |st: &[C64]| (linalg::from_flat(n, &st[..nn]), linalg::from_flat(n, &st[nn..]));
            let inv = |m: &CMat| linalg::inverse(m).ok_or(ScatterError::SingularJost { k, sigma_min: linalg::min_singular(m) });

            let mut fl = start(x, 1.0);
            line_propagate(&lp.v, &lambda, k, x, -x, &mut fl, &opts)?;
            let (f, fp) = split(&fl);
            let g = &fp / ik;
            let a_l = (&f + &g) * ((-ik * -x).exp() * 0.5);
            let b_l = (&f - &g) * ((ik * -x).exp() * 0.5);

            let mut fr = start(-x, -1.0);
            line_propagate(&lp.v, &lambda, k, -x, x, &mut fr, &opts)?;
            let (f, fp) = split(&fr);
            let g = &fp / ik;
            let a_r = (&f - &g) * ((ik * x).exp() * 0.5);
            let b_r = (&f + &g) * ((-ik * x).exp() * 0.5);

            let tl = inv(&a_l)?;
            let tr = inv(&a_r)?;
            let l = &b_l * &tl;
            let r = &b_r * &tr;
            Ok([tl, tr, l, r])
        })
        .collect();
    let (mut tl, mut tr, mut l, mut r) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for row in rows {
        let [a, b, c, d] = row?;
        tl.push(a);
        tr.push(b);
        l.push(c);
        r.push(d);
    }
    Ok(LineScatteringTable::assemble(n, ks.to_vec(), tl, tr, l, r))
}

/// F̃₁^±: the first n components map to ∓i√(2/π)∫sin(kx)Z(x)dx and the last n to
/// √(2/π)∫cos(kx)Z(x)dx, the Fourier map of the free Dirichlet ⊕ Neumann problem.
pub fn sine_cosine_maps(z: &Field, k: &[f64], w: &[f64], sign: Sign) -> Result<SpectralFunction> {
    if z.domain != Domain::HalfLine || !z.n.is_multiple_of(2) {
        return Err(ScatterError::PipelineDomain("sine/cosine maps act on half-line fields with 2n components".into()));
    }
    let dim = z.n;
    let n = dim / 2;
    let c = (2.0 / PI).sqrt();
    let sine_factor = -I * sign.value() * c;
    let rows: Vec<Vec<C64>> = k
        .par_iter()
        .map(|&kk| {
            let mut acc = vec![C64::new(0.0, 0.0); dim];
            let step = (I * kk * z.h).exp();
            let mut ph = C64::new(1.0, 0.0);
            for j in 0..z.npos {
                if j % 512 == 0 {
                    ph = (I * kk * z.x(j)).exp();
                }
                let wj = z.weight(j);
                let v = z.at(j);
                for q in 0..n {
                    acc[q] += v[q] * (wj * ph.im);
                    acc[n + q] += v[n + q] * (wj * ph.re);
                }
                ph *= step;
            }
            for q in 0..n {
                acc[q] *= sine_factor;
                acc[n + q] *= c;
            }
            acc
        })
        .collect();
    let mut out = SpectralFunction::zeros(dim, k.to_vec(), w.to_vec());
    for (i, r) in rows.into_iter().enumerate() {
        out.at_mut(i).copy_from_slice(&r);
    }
    Ok(out)
}

/// Adjoint of [`sine_cosine_maps`] onto a half-line grid.
pub fn sine_cosine_adjoint(s: &SpectralFunction, sign: Sign, h: f64, npos: usize) -> Result<Field> {
    if !s.n.is_multiple_of(2) {
        return Err(ScatterError::DimensionMismatch { expected: s.n + 1, found: s.n });
    }
    let dim = s.n;
    let n = dim / 2;
    let c = (2.0 / PI).sqrt();
    let sine_factor = I * sign.value() * c;
    let dk = if s.len() > 1 { s.k[1] - s.k[0] } else { 0.0 };
    let vals: Vec<Vec<C64>> = (0..npos)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * h;
            let mut acc = vec![C64::new(0.0, 0.0); dim];
            let step = (I * dk * x).exp();
            let mut ph = C64::new(1.0, 0.0);
            for i in 0..s.len() {
                if i % 512 == 0 {
                    ph = (I * s.k[i] * x).exp();
                }
                let v = s.at(i);
                for q in 0..n {
                    acc[q] += v[q] * (s.w[i] * ph.im);
                    acc[n + q] += v[n + q] * (s.w[i] * ph.re);
                }
                ph *= step;
            }
            for q in 0..n {
                acc[q] *= sine_factor;
                acc[n + q] *= c;
            }
            acc
        })
        .collect();
    let mut out = Field::half_line(dim, h, npos);
    for (j, v) in vals.into_iter().enumerate() {
        out.at_mut(j).copy_from_slice(&v);
    }
    Ok(out)
}

fn spectral_apply_matrix(z: &SpectralFunction, m: &CMat) -> SpectralFunction {
    let mut out = z.clone();
    for i in 0..z.len() {
        let v = m * nalgebra::DVector::from_column_slice(z.at(i));
        out.at_mut(i).copy_from_slice(v.as_slice());
    }
    out
}

/// Which line wave-operator formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineForm {
    /// (F^±)†M₁F̃₁^±M₁†.
    Chained,
    /// Y + K(K)Y + M₁RQ(P_{±,M₁})(−E_odd, E_even)M₁†Y + K(K)(same); requires S(0) = S∞ = swap.
    FourTerm,
}

impl std::str::FromStr for LineForm {
    type Err = ScatterError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chained" => Ok(LineForm::Chained),
            "thm59" | "four-term" => Ok(LineForm::FourTerm),
            _ => Err(ScatterError::Config(format!("unknown line form {s}"))),
        }
    }
}

/// The folded problem with the tables for W±(H, H₁) on fields over [0, window].
#[derive(Clone)]
pub struct LineWaveContext {
    pub lp: LineProblem,
    pub problem: Arc<ScatteringProblem>,
    pub ctx: WaveOpContext,
    pub m1: CMat,
}

impl LineWaveContext {
    pub fn new(lp: &LineProblem, grid: KXGrid, window: f64) -> Result<Self> {
        let (v2n, bp) = fold(lp)?;
        let problem = ScatteringProblem::build(v2n, bp, grid)?;
        let ctx = WaveOpContext::new(&problem, window)?;
        Ok(Self { lp: lp.clone(), problem: Arc::new(problem), ctx, m1: boundary::line_m1(lp.n) })
    }

    /// Line fields use the same spacing and node count as the folded half-line grid.
    pub fn line_field(&self, f: impl Fn(f64, &mut [C64])) -> Field {
        Field::from_fn(Domain::Line, self.lp.n, self.ctx.h, self.ctx.npos, f)
    }

    /// ‖S(0) − swap‖ and ‖S∞ − swap‖ of the folded problem.
    pub fn swap_defects(&self) -> (f64, f64) {
        let sw = swap_matrix(self.lp.n);
        (linalg::op_norm(&(&self.ctx.s0 - &sw)), linalg::op_norm(&(&self.ctx.sinf - &sw)))
    }

    /// W±(H, H₁) on folded fields.
    pub fn pipeline(&self, sign: Sign, form: LineForm) -> Result<OperatorPipeline> {
        match form {
            LineForm::Chained => self.chained_pipeline(sign),
            LineForm::FourTerm => self.four_term_pipeline(sign),
        }
    }

    fn chained_pipeline(&self, sign: Sign) -> Result<OperatorPipeline> {
        let pt_f = self.ctx.pt.clone();
        let pt_a = self.ctx.pt.clone();
        let (m_f, m_a) = (self.m1.clone(), self.m1.clone());
        let forward: MapFn = Arc::new(move |y: &Field| {
            let (k, w) = pt_f.positive_grid();
            let s = sine_cosine_maps(&y.apply_matrix(&m_f.adjoint())?, &k, &w, sign)?;
            spectral::fourier_map_adjoint(&pt_f, &spectral_apply_matrix(&s, &m_f), sign, y.h, y.npos)
        });
        let adjoint: MapFn = Arc::new(move |z: &Field| {
            let s = spectral::fourier_map(&pt_a, z, sign)?;
            sine_cosine_adjoint(&spectral_apply_matrix(&s, &m_a.adjoint()), sign, z.h, z.npos)?.apply_matrix(&m_a)
        });
        OperatorPipeline::from_stages(
            Domain::HalfLine,
            vec![Stage::Map { name: format!("chained{sign:?}"), domain: (Domain::HalfLine, Domain::HalfLine), forward, adjoint }],
        )
    }

    fn four_term_pipeline(&self, sign: Sign) -> Result<OperatorPipeline> {
        let (d0, dinf) = self.swap_defects();
        if d0 > HYPOTHESIS_TOL || dinf > HYPOTHESIS_TOL {
            return Err(ScatterError::HypothesisViolated { s0_defect: d0, sinf_defect: dinf });
        }
        let n = self.lp.n;
        let proj = |first: bool| CMat::from_fn(2 * n, 2 * n, |i, j| if i == j && ((i < n) == first) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let half = |st: Vec<Stage>| OperatorPipeline::from_stages(Domain::HalfLine, st);
        let split = Stage::Sum(vec![
            half(vec![Stage::Matrix(proj(true)), Stage::ExtendOdd, Stage::Scale(C64::new(-1.0, 0.0))])?,
            half(vec![Stage::Matrix(proj(false)), Stage::ExtendEven])?,
        ]);
        let p = Arc::new(self.ctx.p(sign).conjugated(&self.m1));
        let core = || -> Result<OperatorPipeline> {
            half(vec![
                Stage::Matrix(self.m1.adjoint()),
                split.clone(),
                Stage::Convolve(p.clone()),
                Stage::Restrict,
                Stage::Matrix(self.m1.clone()),
            ])
        };
        let kern = self.ctx.kernel.clone();
        OperatorPipeline::sum(vec![
            OperatorPipeline::identity(Domain::HalfLine),
            half(vec![Stage::Kernel(kern.clone())])?,
            core()?,
            core()?.then(Stage::Kernel(kern))?,
        ])
    }

    fn check_line(&self, y: &Field) -> Result<()> {
        if y.domain != Domain::Line || y.n != self.lp.n || y.npos != self.ctx.npos || (y.h - self.ctx.h).abs() > 1e-12 {
            return Err(ScatterError::GridMismatch("line field is not on the context grid".into()));
        }
        Ok(())
    }

    /// J⁽¹⁾..J⁽⁶⁾ of the six-term split of M₁†W±(H, H₁)M₁ applied to a field `y` in the
    /// M₁ frame: J⁽¹⁾ = (2π)^{−1/2}∫₀^∞e^{±ikx}v, J⁽³⁾ with e^{∓ikx}S∞,M₁, J⁽⁵⁾ with
    /// e^{∓ikx}(S_M₁(∓k) − S∞,M₁), J⁽²ʲ⁾ = M₁†K(K)M₁J⁽²ʲ⁻¹⁾, where v = F̃₁^±y.
    pub fn j_split_terms(&self, y: &Field, sign: Sign) -> Result<[Field; 6]> {
        let pt = &self.ctx.pt;
        let (k, w) = pt.positive_grid();
        let v = sine_cosine_maps(y, &k, &w, sign)?;
        let half = pt.nk() / 2;
        let s = sign.value();
        let m1 = &self.m1;
        let m1a = m1.adjoint();
        let sinf_m = &m1a * &self.ctx.sinf * m1;
        let ids = vec![linalg::eye(2 * self.lp.n); k.len()];
        let sinfs = vec![sinf_m.clone(); k.len()];
        let rest: Vec<CMat> = (0..k.len())
            .map(|q| {
                let i = if sign == Sign::Plus { pt.mirror(half + q) } else { half + q };
                &m1a * &pt.s[i] * m1 - &sinf_m
            })
            .collect();
        let j1 = waveop::inverse_half_transform(&k, &w, &ids, &v, s, y.h, y.npos);
        let j3 = waveop::inverse_half_transform(&k, &w, &sinfs, &v, -s, y.h, y.npos);
        let j5 = waveop::inverse_half_transform(&k, &w, &rest, &v, -s, y.h, y.npos);
        let kk = |f: &Field| -> Result<Field> { kernel_apply(&self.ctx.kernel, &f.apply_matrix(m1)?)?.apply_matrix(&m1a) };
        let (j2, j4, j6) = (kk(&j1)?, kk(&j3)?, kk(&j5)?);
        Ok([j1, j2, j3, j4, j5, j6])
    }
}

/// W±(H_ℝ, H₀,ℝ)Y = U W±(H, H₁) U†Y for a line field Y.
pub fn line_wave_op(lctx: &LineWaveContext, y: &Field, sign: Sign, form: LineForm) -> Result<Field> {
    lctx.check_line(y)?;
    let z = fold_field(y)?;
    unfold_field(&lctx.pipeline(sign, form)?.apply(&z)?)
}

/// Adjoint of [`line_wave_op`].
pub fn line_wave_op_adjoint(lctx: &LineWaveContext, y: &Field, sign: Sign, form: LineForm) -> Result<Field> {
    lctx.check_line(y)?;
    let z = fold_field(y)?;
    unfold_field(&lctx.pipeline(sign, form)?.adjoint().apply(&z)?)
}

/// Gaussian initial data on the line: amp·e^{ik₀x}exp(−(x − c)²/(2s²)).
#[derive(Debug, Clone, Serialize)]
pub struct LineGaussian {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub amp: Vec<C64>,
}

impl LineGaussian {
    /// The free line evolution e^{−itH₀,ℝ} of the data, in closed form.
    pub fn sample(&self, h: f64, npos: usize, t: f64) -> Field {
        let k0 = self.momentum;
        Field::from_fn(Domain::Line, self.amp.len(), h, npos, |x, o| {
            let g = spectral::free_gaussian(x - 2.0 * k0 * t, self.center, self.width, t) * (I * (k0 * x - k0 * k0 * t)).exp();
            for (d, a) in o.iter_mut().zip(&self.amp) {
                *d = a * g;
            }
        })
    }
}

/// ‖e^{itH_ℝ}e^{−itH₀,ℝ}Y − W±Y‖ over the schedule, measured on the folded problem as
/// ‖e^{itk²}F^±U†Y_t − M₁F̃₁^±M₁†U†Y‖ on the positive k nodes up to |k₀| + 8/width.
pub fn line_time_limit(lctx: &LineWaveContext, data: &LineGaussian, sign: Sign, schedule: &[f64]) -> Result<waveop::TimeLimitReport> {
    let pt = &lctx.ctx.pt;
    let kcut = 8.0 / data.width + data.momentum.abs();
    let stride = (waveop::EVOLUTION_DX / pt.dx).round().max(1.0);
    let h = stride * pt.dx;
    let tmax = schedule.iter().cloned().fold(0.0, f64::max);
    let xmax = data.center.abs() + 4.0 * data.width + 2.0 * kcut * tmax;
    let npos = (xmax / h).ceil() as usize + 1;
    let (k, w) = pt.positive_grid();
    let keep = k.iter().take_while(|&&kk| kk <= kcut).count();
    let (k, w) = (k[..keep].to_vec(), w[..keep].to_vec());
    let m1 = &lctx.m1;
    let z0 = fold_field(&data.sample(h, npos, 0.0))?;
    let f1 = spectral_apply_matrix(&sine_cosine_maps(&z0.apply_matrix(&m1.adjoint())?, &k, &w, sign)?, m1);
    let trimmed = pt.truncated(keep);
    let mut distances = Vec::new();
    for &t in schedule {
        let ts = t * sign.value();
        let yt = data.sample(h, npos, ts);
        let frac = yt.outer_mass_fraction();
        if frac > 0.01 {
            return Err(ScatterError::DomainReflection { fraction: frac });
        }
        let fy = spectral::fourier_map(&trimmed, &fold_field(&yt)?, sign)?.evolve(-ts);
        distances.push(fy.distance(&f1));
    }
    let nonincreasing = distances.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    Ok(waveop::TimeLimitReport {
        times: schedule.to_vec(),
        final_distance: *distances.last().unwrap_or(&0.0),
        distances,
        nonincreasing,
    })
}

/// An even scalar well −c·cos²(πx/(2a)) on (−a, a), sampled on cells of width `dx`, with
/// c tuned so the sampled potential has an even zero-energy resonance. Then S_ℝ(0) = I
/// and, with Λ = 0, S_ℝ∞ = I, so the folded problem satisfies S(0) = S∞ = swap.
pub fn resonant_even_well(a: f64, dx: f64) -> Result<LinePotential> {
    let cells = (a / dx).round() as usize;
    if cells == 0 {
        return Err(ScatterError::GridTooCoarse(format!("well half-width {a} below dx {dx}")));
    }
    let profile: Vec<f64> = (0..cells)
        .map(|j| {
            let x = (j as f64 + 0.5) * dx;
            (0.5 * PI * x / a).cos().powi(2)
        })
        .collect();
    // Y′(a) of the zero-energy solution with Y(0) = 1, Y′(0) = 0, by exact cell transfers.
    let slope_at_edge = |c: f64| {
        let (mut y, mut yp) = (1.0f64, 0.0f64);
        for &q in &profile {
            let w = (c * q).sqrt();
            let (cs, sn) = ((w * dx).cos(), (w * dx).sin());
            let sinc = if w * dx > 1e-12 { sn / w } else { dx };
            (y, yp) = (cs * y + sinc * yp, -w * sn * y + cs * yp);
        }
        yp
    };
    let mut lo = 0.5;
    let mut hi = lo;
    while slope_at_edge(hi) < 0.0 {
        lo = hi;
        hi += 0.5;
        if hi > 1e3 {
            return Err(ScatterError::Config("no resonant depth found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope_at_edge(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let mut out = Vec::with_capacity(2 * cells);
    for (j, q) in profile.iter().enumerate() {
        let v = CMat::from_element(1, 1, C64::new(-c * q, 0.0));
        let (x0, x1) = (j as f64 * dx, (j + 1) as f64 * dx);
        out.push(crate::potentials::Cell::new(x0, x1, v.clone()));
        out.push(crate::potentials::Cell::new(-x1, -x0, v));
    }
    LinePotential::new(1, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Cell;

    fn scalar(v: f64) -> CMat {
        CMat::from_element(1, 1, C64::new(v, 0.0))
    }

    #[test]
    fn fold_unfold_round_trip_and_isometry() {
        let y = Field::from_fn(Domain::Line, 2, 0.05, 81, |x, o| {
            o[0] = C64::new((-(x - 0.3).powi(2)).exp(), x);
            o[1] = C64::new(x.sin(), 0.0);
        });
        let z = fold_field(&y).unwrap();
        assert!((z.norm2() - y.norm2()).abs() < 1e-12 * y.norm2());
        let back = unfold_field(&z).unwrap();
        assert!(back.distance(&y).unwrap() < 1e-14);
    }

    #[test]
    fn even_and_odd_unfold() {
        let g = Field::from_fn(Domain::HalfLine, 1, 0.1, 30, |x, o| o[0] = C64::new((-x * x).exp(), 0.0));
        let even = unfold_field(&Field::join_channels(&g, &g).unwrap()).unwrap();
        let odd = unfold_field(&Field::join_channels(&g, &g.scaled(C64::new(-1.0, 0.0))).unwrap()).unwrap();
        let o = even.origin();
        for j in 0..30 {
            assert_eq!(even.at(o + j)[0], even.at(o - j)[0]);
            assert_eq!(odd.at(o + j)[0], -odd.at(o - j)[0]);
        }
    }

    #[test]
    fn general_blocks_reassemble() {
        let lam = scalar(2.0);
        let bp = boundary::line_interaction_matrices(1, &lam).unwrap();
        let rows = |m: &CMat, r: usize| m.rows(r, 1).into_owned();
        let lp = LineProblem::new(
            LinePotential::zero(1),
            Interaction::General { a1: rows(&bp.a, 0), a2: rows(&bp.a, 1), b1: rows(&bp.b, 0), b2: rows(&bp.b, 1) },
        )
        .unwrap();
        let (_, bp2) = fold(&lp).unwrap();
        assert_eq!(bp2.a, bp.a);
        assert_eq!(bp2.b, bp.b);
    }

    #[test]
    fn even_potential_folds_symmetrically() {
        let v = LinePotential::new(1, vec![Cell::new(-1.0, 0.0, scalar(0.5)), Cell::new(0.0, 1.0, scalar(0.5))]).unwrap();
        let (vp, vm) = fold_line_potential(&v).unwrap();
        assert_eq!(vp.value_at(0.5), vm.value_at(0.5));
    }

    #[test]
    fn oracle_matches_closed_form_delta() {
        let lam = 2.0;
        let lp = LineProblem::delta(LinePotential::zero(1), scalar(lam)).unwrap();
        let ks = [0.3, 1.0, 4.5];
        let t = line_jost_direct(&lp, &ks, 1.0 / 64.0).unwrap();
        for (i, &k) in ks.iter().enumerate() {
            let d = C64::new(-lam, 2.0 * k);
            let tt = C64::new(0.0, 2.0 * k) / d;
            let rr = C64::new(lam, 0.0) / d;
            assert!((t.tl[i][(0, 0)] - tt).norm() < 1e-9);
            assert!((t.tr[i][(0, 0)] - tt).norm() < 1e-9);
            assert!((t.l[i][(0, 0)] - rr).norm() < 1e-9);
            assert!((t.r[i][(0, 0)] - rr).norm() < 1e-9);
        }
        assert!(t.unitarity_defect() < 1e-9);
    }

    #[test]
    fn sine_cosine_adjoint_is_exact() {
        let z = Field::from_fn(Domain::HalfLine, 2, 0.05, 200, |x, o| {
            o[0] = C64::new((-(x - 2.0).powi(2)).exp(), 0.1 * x);
            o[1] = C64::new(0.0, (-(x - 3.0).powi(2)).exp());
        });
        let k: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) * 0.1).collect();
        let w = vec![0.1; 100];
        let mut s = SpectralFunction::zeros(2, k.clone(), w.clone());
        for i in 0..100 {
            s.at_mut(i)[0] = C64::new((i as f64 * 0.3).cos(), 0.2);
            s.at_mut(i)[1] = C64::new(0.0, (i as f64 * 0.1).sin());
        }
        for sign in [Sign::Plus, Sign::Minus] {
            let fz = sine_cosine_maps(&z, &k, &w, sign).unwrap();
            let fs = sine_cosine_adjoint(&s, sign, 0.05, 200).unwrap();
            assert!((fz.inner(&s) - z.inner(&fs)).norm() < 1e-12);
        }
    }
}
