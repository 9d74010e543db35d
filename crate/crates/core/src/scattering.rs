//! Scattering matrix, its low- and high-energy limits, the Fourier symbols F_s and
//! P±, and the derivative asymptotics of S(k).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{validate_boundary, BoundaryPair};
use crate::error::{Result, ScatterError};
use crate::jost::{self, JostMatrixTable, JostTable, KXGrid, KernelTable, TAPER_FRACTION};
use crate::linalg::{self, CMat, C64, I};
use crate::potentials::{validate_potential, PotentialSpec};
use crate::quad;

/// Number of nodes nearest to k = 0 used to extrapolate S(0).
pub const S0_NODES: usize = 6;
/// Fraction of the grid (by node count, at the outer ends) used to fit S∞.
pub const PLATEAU_FRACTION: f64 = 0.5;
/// Largest residual of the plateau fit accepted for S∞.
pub const PLATEAU_TOL: f64 = 1e-2;
/// J(0) with smallest singular value below this is treated as exceptional.
pub const EXCEPTIONAL_TOL: f64 = 1e-6;

/// S(k) on a symmetric grid together with its limits.
#[derive(Debug, Clone)]
pub struct ScatteringTable {
    pub n: usize,
    pub k: Vec<f64>,
    pub s: Vec<CMat>,
    pub s0: CMat,
    pub sinf: CMat,
    /// Largest deviation of the symmetrized plateau samples from S∞.
    pub plateau_deviation: f64,
    pub j0_sigma_min: f64,
    pub exceptional: bool,
}

impl ScatteringTable {
    pub fn nk(&self) -> usize {
        self.k.len()
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.k.len() - 1 - i
    }

    pub fn dk(&self) -> f64 {
        self.k[1] - self.k[0]
    }

    pub fn kmax(&self) -> f64 {
        self.k[self.k.len() - 1] + 0.5 * self.dk()
    }

    /// Indices of the positive nodes in ascending order.
    pub fn positive_indices(&self) -> std::ops::Range<usize> {
        self.k.len() / 2..self.k.len()
    }

    /// Quadrature weights for ∫₀^∞ over the positive nodes.
    pub fn positive_weights(&self) -> Vec<f64> {
        quad::half_line_midpoint_weights(self.k.len() / 2, self.dk())
    }

    /// max ‖S†S − I‖ and max ‖S(−k) − S(k)†‖ over nodes with |k| ≥ kmin.
    pub fn unitarity_and_symmetry(&self, kmin: f64) -> (f64, f64) {
        let mut unit: f64 = 0.0;
        let mut sym: f64 = 0.0;
        for i in 0..self.nk() {
            if self.k[i].abs() < kmin {
                continue;
            }
            unit = unit.max(linalg::unitarity_defect(&self.s[i]));
            let d = &self.s[self.mirror(i)] - self.s[i].adjoint();
            sym = sym.max(linalg::op_norm(&d));
        }
        (unit, sym)
    }
}

/// S(k) = −J(−k)J(k)⁻¹ on the grid, then S(0) and S∞.
pub fn smatrix(jm: &JostMatrixTable) -> Result<ScatteringTable> {
    let nk = jm.k.len();
    let n = jm.j0.nrows();
    let mut s = Vec::with_capacity(nk);
    for i in 0..nk {
        let j = &jm.j[i];
        let smin = linalg::min_singular(j);
        let scale = linalg::op_norm(j).max(1.0);
        if smin <= 1e-13 * scale {
            return Err(ScatterError::SingularJost { k: jm.k[i], sigma_min: smin });
        }
        let inv = linalg::inverse(j).ok_or(ScatterError::SingularJost { k: jm.k[i], sigma_min: smin })?;
        s.push(-(&jm.j[nk - 1 - i] * inv));
    }
    let j0_sigma_min = linalg::min_singular(&jm.j0);
    let limits = s_limits(&jm.k, &s)?;
    Ok(ScatteringTable {
        n,
        k: jm.k.clone(),
        s,
        s0: limits.s0,
        sinf: limits.sinf,
        plateau_deviation: limits.plateau_deviation,
        j0_sigma_min,
        exceptional: j0_sigma_min < EXCEPTIONAL_TOL,
    })
}

#[derive(Debug, Clone)]
pub struct SLimits {
    pub s0: CMat,
    pub sinf: CMat,
    pub plateau_deviation: f64,
}

/// S(0) by polynomial extrapolation over the nodes nearest 0. S∞ is the intercept of a
/// least-squares quadratic fit of the pair means ½(S(k) + S(−k)) in 1/k² over the
/// outer nodes: the pair means remove the odd powers of 1/k and the fit removes the
/// even 1/k² and 1/k⁴ terms.
pub fn s_limits(k: &[f64], s: &[CMat]) -> Result<SLimits> {
    let nk = k.len();
    let mut order: Vec<usize> = (0..nk).collect();
    order.sort_by(|&a, &b| k[a].abs().partial_cmp(&k[b].abs()).unwrap());
    let near: Vec<usize> = order.into_iter().take(S0_NODES.min(nk)).collect();
    let xs: Vec<f64> = near.iter().map(|&i| k[i]).collect();
    let ys: Vec<CMat> = near.iter().map(|&i| s[i].clone()).collect();
    let s0 = linalg::neville_at_zero(&xs, &ys);

    let per_side = ((PLATEAU_FRACTION * nk as f64) / 2.0).round().max(1.0) as usize;
    let mut u = Vec::with_capacity(per_side);
    let mut pairs = Vec::with_capacity(per_side);
    for p in 0..per_side {
        let (lo, hi) = (p, nk - 1 - p);
        u.push(2.0 / (k[lo] * k[lo] + k[hi] * k[hi]));
        pairs.push((&s[lo] + &s[hi]) * C64::new(0.5, 0.0));
    }
    let (sinf, fit) = polynomial_intercept(&u, &pairs, if per_side > 8 { 2 } else if per_side > 2 { 1 } else { 0 });
    let plateau_deviation = fit
        .iter()
        .zip(&pairs)
        .map(|(f, p)| linalg::op_norm(&(p - f)))
        .fold(0.0, f64::max);
    if plateau_deviation > PLATEAU_TOL {
        return Err(ScatterError::NoPlateau { deviation: plateau_deviation });
    }
    Ok(SLimits { s0, sinf, plateau_deviation })
}

/// Least-squares fit of matrix samples p_i ≈ Σ_d c_d u_i^d (degree ≤ `degree`),
/// returning the value at u = 0 and the fitted samples.
fn polynomial_intercept(u: &[f64], p: &[CMat], degree: usize) -> (CMat, Vec<CMat>) {
    let m = u.len();
    let ubar = u.iter().sum::<f64>() / m as f64;
    let scale = u.iter().map(|x| (x - ubar).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let t: Vec<f64> = u.iter().map(|x| (x - ubar) / scale).collect();
    let d = degree + 1;
    let design = nalgebra::DMatrix::<f64>::from_fn(m, d, |i, j| t[i].powi(j as i32));
    let gram = design.transpose() * &design;
    let Some(inv) = gram.try_inverse() else {
        let mean = p.iter().fold(linalg::zeros(p[0].nrows()), |acc, q| acc + q) / C64::new(m as f64, 0.0);
        return (mean.clone(), vec![mean; m]);
    };
    let proj = inv * design.transpose();
    let n = p[0].nrows();
    let coef: Vec<CMat> = (0..d)
        .map(|j| (0..m).fold(linalg::zeros(n), |acc, i| acc + &p[i] * C64::new(proj[(j, i)], 0.0)))
        .collect();
    let eval = |tt: f64| coef.iter().enumerate().fold(linalg::zeros(n), |acc, (j, c)| acc + c * C64::new(tt.powi(j as i32), 0.0));
    let fitted = t.iter().map(|&tt| eval(tt)).collect();
    (eval(-ubar / scale), fitted)
}

/// Samples of a matrix function of y with its L¹ norm and the fraction of that
/// norm beyond |y| > y_max/2.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    pub y: Vec<f64>,
    pub values: Vec<CMat>,
    pub l1: f64,
    pub tail_fraction: f64,
}

impl SymbolTable {
    fn from_values(y: Vec<f64>, values: Vec<CMat>) -> Self {
        let norms: Vec<f64> = values.iter().map(linalg::op_norm).collect();
        let m = y.len();
        let w: Vec<f64> = if m > 1 { quad::trapezoid_weights(m, y[1] - y[0]) } else { vec![0.0; m] };
        let l1: f64 = norms.iter().zip(&w).map(|(a, b)| a * b).sum();
        let ymax = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tail: f64 = (0..m).filter(|&i| y[i].abs() > 0.5 * ymax).map(|i| norms[i] * w[i]).sum();
        let tail_fraction = if l1 > 0.0 { tail / l1 } else { 0.0 };
        Self { y, values, l1, tail_fraction }
    }
}

/// (1/2π) Σ w_i τ(k_i) e^{sign·i k_i y} A_i over uniform nodes k_i = k_0 + i Δk.
pub fn oscillatory_sum(k: &[f64], weights: &[f64], values: &[CMat], y: &[f64], sign: f64) -> Vec<CMat> {
    let n = values.first().map(|v| v.nrows()).unwrap_or(1);
    let nk = k.len();
    if nk == 0 {
        return vec![linalg::zeros(n); y.len()];
    }
    let dk = if nk > 1 { k[1] - k[0] } else { 0.0 };
    let flat: Vec<Vec<C64>> = values
        .iter()
        .zip(weights)
        .map(|(v, w)| {
            let mut f = vec![C64::new(0.0, 0.0); n * n];
            linalg::to_flat(v, &mut f);
            f.iter_mut().for_each(|z| *z *= w / (2.0 * PI));
            f
        })
        .collect();
    y.par_iter()
        .map(|&yy| {
            let mut acc = vec![C64::new(0.0, 0.0); n * n];
            let step = (I * sign * dk * yy).exp();
            let mut ph = (I * sign * k[0] * yy).exp();
            for (i, f) in flat.iter().enumerate() {
                if i % 256 == 0 && i > 0 {
                    ph = (I * sign * k[i] * yy).exp();
                }
                for q in 0..n * n {
                    acc[q] += f[q] * ph;
                }
                ph *= step;
            }
            linalg::from_flat(n, &acc)
        })
        .collect()
}

/// F_s(y) = (1/2π)∫[S(k) − S∞]e^{iky}dk with a cosine taper at the grid ends.
pub fn fs_symbol(st: &ScatteringTable, y: &[f64]) -> SymbolTable {
    let kmax = st.kmax();
    let dk = st.dk();
    let w: Vec<f64> = st.k.iter().map(|&k| dk * quad::cosine_taper(k, kmax, TAPER_FRACTION)).collect();
    let vals: Vec<CMat> = st.s.iter().map(|s| s - &st.sinf).collect();
    SymbolTable::from_values(y.to_vec(), oscillatory_sum(&st.k, &w, &vals, y, 1.0))
}

/// Half-line transform (1/2π)∫₀^∞ e^{sign·ikx} A(k) dk of samples on the positive
/// midpoint nodes, with the corrected midpoint rule and the cosine taper.
pub fn half_line_symbol(kpos: &[f64], kmax: f64, values: &[CMat], x: &[f64], sign: f64) -> SymbolTable {
    let dk = if kpos.len() > 1 { kpos[1] - kpos[0] } else { 2.0 * kpos[0] };
    let base = quad::half_line_midpoint_weights(kpos.len(), dk);
    let w: Vec<f64> = kpos.iter().zip(&base).map(|(&k, &b)| b * quad::cosine_taper(k, kmax, TAPER_FRACTION)).collect();
    SymbolTable::from_values(x.to_vec(), oscillatory_sum(kpos, &w, values, x, sign))
}

/// P₊(x) = (1/2π)∫₀^∞ e^{−ikx}(S(−k) − S∞)dk and P₋(x) = (1/2π)∫₀^∞ e^{ikx}(S(k) − S∞)dk.
pub fn p_symbols(st: &ScatteringTable, x: &[f64]) -> (SymbolTable, SymbolTable) {
    let pos: Vec<usize> = st.positive_indices().collect();
    let kpos: Vec<f64> = pos.iter().map(|&i| st.k[i]).collect();
    let plus: Vec<CMat> = pos.iter().map(|&i| &st.s[st.mirror(i)] - &st.sinf).collect();
    let minus: Vec<CMat> = pos.iter().map(|&i| &st.s[i] - &st.sinf).collect();
    (
        half_line_symbol(&kpos, st.kmax(), &plus, x, -1.0),
        half_line_symbol(&kpos, st.kmax(), &minus, x, 1.0),
    )
}

/// Central-difference derivative Ṡ(k) on the grid (one-sided at the ends).
pub fn sdot(st: &ScatteringTable) -> Vec<CMat> {
    let nk = st.nk();
    let dk = st.dk();
    (0..nk)
        .map(|i| {
            if i == 0 {
                (&st.s[1] - &st.s[0]) / C64::new(dk, 0.0)
            } else if i == nk - 1 {
                (&st.s[nk - 1] - &st.s[nk - 2]) / C64::new(dk, 0.0)
            } else {
                (&st.s[i + 1] - &st.s[i - 1]) / C64::new(2.0 * dk, 0.0)
            }
        })
        .collect()
}

/// High- and low-energy behavior of Ṡ(k).
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    /// Least-squares slope of log|Ṡ| against log k on the fit window; None when Ṡ ≡ 0.
    pub slope: Option<f64>,
    pub fit_window: (f64, f64),
    /// max |Ṡ(k)| over |k| < 0.5.
    pub low_energy_max: f64,
    /// |Ṡ| at the node nearest k = 1.
    pub value_at_one: f64,
    pub low_energy_bounded: bool,
    pub exceptional: bool,
    pub h1_norm: f64,
}

pub fn sdot_asymptotics(st: &ScatteringTable) -> AsymptoticsReport {
    let d = sdot(st);
    let norms: Vec<f64> = d.iter().map(linalg::op_norm).collect();
    let kmax = st.kmax();
    let window = (kmax / 5.0, kmax / 1.2);
    let mut pts = Vec::new();
    for i in st.positive_indices() {
        let k = st.k[i];
        if k >= window.0 && k <= window.1 && norms[i] > 0.0 {
            pts.push((k.ln(), norms[i].ln()));
        }
    }
    let peak = norms.iter().cloned().fold(0.0, f64::max);
    let slope = if peak < 1e-13 || pts.len() < 2 {
        None
    } else {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    let low_energy_max = (0..st.nk()).filter(|&i| st.k[i].abs() < 0.5).map(|i| norms[i]).fold(0.0, f64::max);
    let i1 = (0..st.nk())
        .min_by(|&a, &b| (st.k[a] - 1.0).abs().partial_cmp(&(st.k[b] - 1.0).abs()).unwrap())
        .unwrap_or(0);
    let value_at_one = norms[i1];
    AsymptoticsReport {
        slope,
        fit_window: window,
        low_energy_max,
        value_at_one,
        low_energy_bounded: low_energy_max <= 10.0 * value_at_one.max(1e-300) || low_energy_max < 1e-12,
        exceptional: st.exceptional,
        h1_norm: h1_membership(st),
    }
}

/// Discrete ∫(|S − S∞|² + |Ṡ|²)dk over the grid.
pub fn h1_membership(st: &ScatteringTable) -> f64 {
    let d = sdot(st);
    let dk = st.dk();
    st.s
        .iter()
        .zip(&d)
        .map(|(s, ds)| (linalg::op_norm(&(s - &st.sinf)).powi(2) + linalg::op_norm(ds).powi(2)) * dk)
        .sum()
}

/// A fully assembled half-line problem: potential, boundary pair, grid, Jost data,
/// scattering table and kernel.
#[derive(Debug, Clone)]
pub struct ScatteringProblem {
    pub v: PotentialSpec,
    pub bp: BoundaryPair,
    pub grid: KXGrid,
    pub jost: JostTable,
    pub jm: JostMatrixTable,
    pub st: ScatteringTable,
    pub kernel: KernelTable,
}

impl ScatteringProblem {
    pub fn build(v: PotentialSpec, bp: BoundaryPair, grid: KXGrid) -> Result<Self> {
        validate_potential(&v)?;
        validate_boundary(&bp)?;
        if v.n != bp.n {
            return Err(ScatterError::DimensionMismatch { expected: v.n, found: bp.n });
        }
        let jt = jost::solve_faddeev(&v, &grid)?;
        let jm = jost::jost_matrix(&jt, &bp)?;
        let st = smatrix(&jm)?;
        let kernel = jost::marchenko_kernel(&jt, &v)?;
        Ok(Self { v, bp, grid, jost: jt, jm, st, kernel })
    }

    pub fn n(&self) -> usize {
        self.v.n
    }

    /// Physical solution Ψ(k_i, x_j) = f(−k, x) + f(k, x)S(k) on the table grid.
    pub fn psi(&self, i: usize, j: usize) -> CMat {
        let im = self.jost.mirror(i);
        self.jost.f(im, j) + self.jost.f(i, j) * &self.st.s[i]
    }

    /// x-derivative of the physical solution.
    pub fn psi_prime(&self, i: usize, j: usize) -> CMat {
        let im = self.jost.mirror(i);
        self.jost.fprime(im, j) + self.jost.fprime(i, j) * &self.st.s[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryPair;

    fn small_grid() -> KXGrid {
        KXGrid::new(20.0, 512, 1.0 / 64.0, 4.0).unwrap()
    }

    fn build(v: PotentialSpec, bp: BoundaryPair, g: KXGrid) -> ScatteringProblem {
        ScatteringProblem::build(v, bp, g).unwrap()
    }

    #[test]
    fn free_neumann_is_identity() {
        let p = build(PotentialSpec::zero(1), BoundaryPair::neumann(1), small_grid());
        for s in &p.st.s {
            assert!((s[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!((p.st.s0[(0, 0)] - 1.0).norm() < 1e-12);
        assert!((p.st.sinf[(0, 0)] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn free_dirichlet_is_minus_identity() {
        let p = build(PotentialSpec::zero(2), BoundaryPair::dirichlet(2), small_grid());
        for s in &p.st.s {
            assert!(linalg::max_abs(&(s + linalg::eye(2))) < 1e-14);
        }
        assert!(linalg::max_abs(&(&p.st.sinf + linalg::eye(2))) < 1e-14);
    }

    #[test]
    fn step_robin_is_unitary_and_symmetric() {
        let theta = (1.0f64 / 1f64.tanh()).atan();
        let p = build(PotentialSpec::scalar_step(1.0, 0.0, 1.0), BoundaryPair::robin(theta), small_grid());
        let (u, s) = p.st.unitarity_and_symmetry(0.05);
        assert!(u < 1e-10 && s < 1e-10, "{u} {s}");
        assert!(p.st.exceptional);
    }

    #[test]
    fn rational_toy_half_line_transform_matches_closed_form() {
        // (1/2π)∫₀^∞ e^{ikx}/(1+ik) dk = ½e^{−x}χ(x>0) + (i/2π)e^{−x}Ei(x) (x>0),
        // and −(i/2π)e^{−x}E₁(−x) for x<0.
        let kmax = 400.0;
        let nk = 40000;
        let dk = kmax / nk as f64;
        let kpos: Vec<f64> = (0..nk).map(|i| (i as f64 + 0.5) * dk).collect();
        let vals: Vec<CMat> = kpos.iter().map(|&k| linalg::scalar(1, C64::new(1.0, 0.0) / C64::new(1.0, k))).collect();
        let xs = [-2.0, -1.0, 0.5, 1.0, 2.0, 3.0];
        let out = half_line_symbol(&kpos, kmax, &vals, &xs, 1.0);
        for (i, &x) in xs.iter().enumerate() {
            let exact = if x > 0.0 {
                C64::new(0.5 * (-x).exp(), (-x).exp() * ei(x) / (2.0 * PI))
            } else {
                C64::new(0.0, -(-x).exp() * e1(-x) / (2.0 * PI))
            };
            assert!((out.values[i][(0, 0)] - exact).norm() < 2e-3, "x={x} got {} want {exact}", out.values[i][(0, 0)]);
        }
    }

    fn ei(x: f64) -> f64 {
        // series Ei(x) = γ + ln x + Σ x^m/(m·m!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for m in 1..200 {
            term *= x / m as f64;
            sum += term / m as f64;
        }
        0.577_215_664_901_532_9 + x.ln() + sum
    }

    fn e1(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for m in 1..200 {
            term *= -x / m as f64;
            sum += term / m as f64;
        }
        -0.577_215_664_901_532_9 - x.ln() - sum
    }
}
