//! Faddeev and Jost solutions, the Jost matrix, and the kernel K(x, y).

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::boundary::BoundaryPair;
use crate::error::{Result, ScatterError};
use crate::linalg::{self, CMat, C64, I};
use crate::potentials::PotentialSpec;
use crate::quad;

/// Sweep tolerance of the Volterra iteration (relative to the size of m).
const SWEEP_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 60;
/// Fraction of the k-range covered by the cosine taper.
pub const TAPER_FRACTION: f64 = 0.1;
/// Decay rate of the analytic 1/(k² + a²) tail model used by the kernel transform.
const TAIL_MODEL_RATE: f64 = 1.0;

/// Symmetric wavenumber grid (midpoint nodes, 0 excluded) and uniform x grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, rename_all = "snake_case")]
pub struct KXGrid {
    pub kmax: f64,
    pub nk: usize,
    pub dx: f64,
    pub xmax: f64,
}

impl Default for KXGrid {
    fn default() -> Self {
        Self { kmax: 40.0, nk: 4096, dx: 1.0 / 256.0, xmax: 40.0 }
    }
}

impl KXGrid {
    pub fn new(kmax: f64, nk: usize, dx: f64, xmax: f64) -> Result<Self> {
        let g = Self { kmax, nk, dx, xmax };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nk == 0 || !self.nk.is_multiple_of(2) {
            return Err(ScatterError::Config(format!("N_k must be even and positive, got {}", self.nk)));
        }
        if !(self.kmax > 0.0 && self.dx > 0.0 && self.xmax > 0.0) {
            return Err(ScatterError::Config("grid parameters must be positive".into()));
        }
        if self.dx > PI / (4.0 * self.kmax) {
            return Err(ScatterError::GridTooCoarse(format!(
                "dx = {} exceeds pi/(4 K_max) = {}",
                self.dx,
                PI / (4.0 * self.kmax)
            )));
        }
        Ok(())
    }

    pub fn dk(&self) -> f64 {
        2.0 * self.kmax / self.nk as f64
    }

    pub fn k(&self, i: usize) -> f64 {
        -self.kmax + (i as f64 + 0.5) * self.dk()
    }

    pub fn kvalues(&self) -> Vec<f64> {
        (0..self.nk).map(|i| self.k(i)).collect()
    }

    /// Number of x intervals on [0, X_max].
    pub fn nx(&self) -> usize {
        (self.xmax / self.dx).round() as usize
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }
}

/// Faddeev function m(k, x) = e^{-ikx} f(k, x) and its x-derivative on a symmetric
/// list of wavenumbers and on the x nodes of [0, X_V]; m = I beyond X_V.
#[derive(Debug, Clone)]
pub struct JostTable {
    pub n: usize,
    pub dx: f64,
    /// Number of x nodes covering [0, X_V].
    pub nv: usize,
    /// Ascending, symmetric under k ↦ −k.
    pub k: Vec<f64>,
    m: Vec<C64>,
    mp: Vec<C64>,
    m0: Vec<C64>,
    m0p: Vec<C64>,
    /// Sweeps used per k (diagnostic).
    pub sweeps: Vec<usize>,
}

impl JostTable {
    fn idx(&self, i: usize, j: usize) -> usize {
        (i * self.nv + j) * self.n * self.n
    }

    pub fn nk(&self) -> usize {
        self.k.len()
    }

    /// Index of −k_i.
    pub fn mirror(&self, i: usize) -> usize {
        self.k.len() - 1 - i
    }

    pub fn support(&self) -> f64 {
        (self.nv - 1) as f64 * self.dx
    }

    /// m(k_i, x_j) as a flat row-major slice (valid for j < nv).
    pub fn m_flat(&self, i: usize, j: usize) -> &[C64] {
        let s = self.idx(i, j);
        &self.m[s..s + self.n * self.n]
    }

    pub fn mp_flat(&self, i: usize, j: usize) -> &[C64] {
        let s = self.idx(i, j);
        &self.mp[s..s + self.n * self.n]
    }

    /// m(k_i, x_j) for any grid node j (identity beyond the support).
    pub fn m(&self, i: usize, j: usize) -> CMat {
        if j >= self.nv {
            return linalg::eye(self.n);
        }
        linalg::from_flat(self.n, self.m_flat(i, j))
    }

    pub fn mprime(&self, i: usize, j: usize) -> CMat {
        if j >= self.nv {
            return linalg::zeros(self.n);
        }
        linalg::from_flat(self.n, self.mp_flat(i, j))
    }

    pub fn m0(&self, j: usize) -> CMat {
        if j >= self.nv {
            return linalg::eye(self.n);
        }
        linalg::from_flat(self.n, &self.m0[j * self.n * self.n..(j + 1) * self.n * self.n])
    }

    pub fn m0prime(&self, j: usize) -> CMat {
        if j >= self.nv {
            return linalg::zeros(self.n);
        }
        linalg::from_flat(self.n, &self.m0p[j * self.n * self.n..(j + 1) * self.n * self.n])
    }

    /// Jost solution f(k_i, x_j) = e^{ik x} m.
    pub fn f(&self, i: usize, j: usize) -> CMat {
        let x = j as f64 * self.dx;
        self.m(i, j) * (I * self.k[i] * x).exp()
    }

    /// f′(k_i, x_j) = e^{ikx}(ik m + m′).
    pub fn fprime(&self, i: usize, j: usize) -> CMat {
        let x = j as f64 * self.dx;
        let k = self.k[i];
        (self.m(i, j) * (I * k) + self.mprime(i, j)) * (I * k * x).exp()
    }
}

/// Per-interval potential data aligned with the x grid.
struct IntervalPotential {
    n: usize,
    /// Flat n×n value for each interval [x_j, x_{j+1}), None when zero.
    values: Vec<Option<Vec<C64>>>,
}

impl IntervalPotential {
    fn new(v: &PotentialSpec, dx: f64, nv: usize) -> Self {
        let n = v.n;
        let values = (0..nv.saturating_sub(1))
            .map(|j| {
                let mid = (j as f64 + 0.5) * dx;
                let val = v.value_at(mid);
                if linalg::max_abs(&val) == 0.0 {
                    None
                } else {
                    let mut flat = vec![C64::new(0.0, 0.0); n * n];
                    linalg::to_flat(&val, &mut flat);
                    Some(flat)
                }
            })
            .collect();
        Self { n, values }
    }
}

/// Hermite cubic basis in powers of u: H00, H10, H01, H11.
const HERMITE: [[f64; 4]; 4] = [
    [1.0, 0.0, -3.0, 2.0],
    [0.0, 1.0, -2.0, 1.0],
    [0.0, 0.0, 3.0, -2.0],
    [0.0, 0.0, -1.0, 1.0],
];

struct SweepWeights {
    we: [C64; 4],
    wd: [C64; 4],
    w1: [f64; 4],
    e: C64,
    dh: C64,
}

impl SweepWeights {
    fn new(k: f64, h: f64) -> Self {
        let theta = 2.0 * k * h;
        let mu = quad::exp_moments(theta);
        let nu = quad::dk_moments(theta);
        let mut we = [C64::new(0.0, 0.0); 4];
        let mut wd = [C64::new(0.0, 0.0); 4];
        let mut w1 = [0.0; 4];
        for b in 0..4 {
            for j in 0..4 {
                we[b] += mu[j] * HERMITE[b][j] * h;
                wd[b] += nu[j] * HERMITE[b][j] * h * h;
                w1[b] += HERMITE[b][j] / (j + 1) as f64 * h;
            }
        }
        let z = C64::new(0.0, theta);
        Self { we, wd, w1, e: z.exp(), dh: quad::phi1(z) * h }
    }
}

/// Solve the Volterra equation for one k by backward Gauss-Seidel sweeps of the
/// Neumann iteration, with Hermite-cubic product integration on each interval.
fn solve_one(pot: &IntervalPotential, k: f64, h: f64, nv: usize) -> Result<(Vec<C64>, Vec<C64>, usize)> {
    let n = pot.n;
    let nn = n * n;
    let zero = C64::new(0.0, 0.0);
    let mut m = vec![zero; nv * nn];
    let mut mp = vec![zero; nv * nn];
    for j in 0..nv {
        for d in 0..n {
            m[j * nn + d * n + d] = C64::new(1.0, 0.0);
        }
    }
    if nv < 2 {
        return Ok((m, mp, 0));
    }
    let w = SweepWeights::new(k, h);
    let mut acc_a = vec![zero; nn];
    let mut acc_b = vec![zero; nn];
    let mut acc_c = vec![zero; nn];
    let mut g = [vec![zero; nn], vec![zero; nn], vec![zero; nn], vec![zero; nn]];
    for sweep in 1..=MAX_SWEEPS {
        acc_a.iter_mut().for_each(|z| *z = zero);
        acc_b.iter_mut().for_each(|z| *z = zero);
        acc_c.iter_mut().for_each(|z| *z = zero);
        let mut update: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for j in (0..nv - 1).rev() {
            // advance accumulators from x_{j+1} to x_j
            for q in 0..nn {
                acc_b[q] = acc_b[q] * w.e + acc_c[q] * w.dh;
                acc_a[q] *= w.e;
            }
            if let Some(v) = &pot.values[j] {
                let (lo, hi) = (j * nn, (j + 1) * nn);
                linalg::matmul_flat(n, v, &m[lo..lo + nn], &mut g[0]);
                linalg::matmul_flat(n, v, &mp[lo..lo + nn], &mut g[1]);
                linalg::matmul_flat(n, v, &m[hi..hi + nn], &mut g[2]);
                linalg::matmul_flat(n, v, &mp[hi..hi + nn], &mut g[3]);
                for q in 0..nn {
                    let (g0, g1, g2, g3) = (g[0][q], g[1][q] * h, g[2][q], g[3][q] * h);
                    acc_a[q] += w.we[0] * g0 + w.we[1] * g1 + w.we[2] * g2 + w.we[3] * g3;
                    acc_b[q] += w.wd[0] * g0 + w.wd[1] * g1 + w.wd[2] * g2 + w.wd[3] * g3;
                    acc_c[q] += g0 * w.w1[0] + g1 * w.w1[1] + g2 * w.w1[2] + g3 * w.w1[3];
                }
            }
            let lo = j * nn;
            for q in 0..nn {
                let diag = if q % (n + 1) == 0 { 1.0 } else { 0.0 };
                let new_m = acc_b[q] + diag;
                let new_p = -acc_a[q];
                update = update.max((new_m - m[lo + q]).norm()).max((new_p - mp[lo + q]).norm());
                scale = scale.max(new_m.norm());
                m[lo + q] = new_m;
                mp[lo + q] = new_p;
            }
        }
        if !update.is_finite() {
            return Err(ScatterError::NoConvergence { k, update });
        }
        if update <= SWEEP_TOL * scale {
            return Ok((m, mp, sweep));
        }
        if sweep == MAX_SWEEPS {
            return Err(ScatterError::NoConvergence { k, update });
        }
    }
    unreachable!()
}

fn support_nodes(v: &PotentialSpec, dx: f64) -> Result<usize> {
    v.check_alignment(dx)?;
    Ok((v.support / dx).round() as usize + 1)
}

/// Solve for m on the grid's symmetric k nodes plus the k = 0 limit.
pub fn solve_faddeev(v: &PotentialSpec, grid: &KXGrid) -> Result<JostTable> {
    grid.validate()?;
    if v.support > grid.xmax + 1e-12 {
        return Err(ScatterError::GridTooCoarse(format!(
            "X_max = {} is smaller than the support {}",
            grid.xmax, v.support
        )));
    }
    solve_faddeev_at(v, &grid.kvalues(), grid.dx)
}

/// Jost values, derivatives and the solver step count for one k.
type ColumnSolution = (Vec<C64>, Vec<C64>, usize);

/// Solve for m on an arbitrary list of wavenumbers, which must be symmetric
/// under k ↦ −k and sorted ascending.
pub fn solve_faddeev_at(v: &PotentialSpec, ks: &[f64], dx: f64) -> Result<JostTable> {
    let nk = ks.len();
    for i in 0..nk {
        if (ks[i] + ks[nk - 1 - i]).abs() > 1e-12 * ks[i].abs().max(1.0) {
            return Err(ScatterError::GridMismatch("wavenumber list is not symmetric".into()));
        }
    }
    let nv = support_nodes(v, dx)?;
    let pot = IntervalPotential::new(v, dx, nv);
    let results: Vec<Result<ColumnSolution>> =
        ks.par_iter().map(|&k| solve_one(&pot, k, dx, nv)).collect();
    let nn = v.n * v.n;
    let mut m = Vec::with_capacity(nk * nv * nn);
    let mut mp = Vec::with_capacity(nk * nv * nn);
    let mut sweeps = Vec::with_capacity(nk);
    for r in results {
        let (a, b, s) = r?;
        m.extend_from_slice(&a);
        mp.extend_from_slice(&b);
        sweeps.push(s);
    }
    let (m0, m0p, _) = solve_one(&pot, 0.0, dx, nv)?;
    Ok(JostTable { n: v.n, dx, nv, k: ks.to_vec(), m, mp, m0, m0p, sweeps })
}

/// Symmetric list (−k_{n−1}, …, −k_0, k_0, …, k_{n−1}) from positive nodes.
pub fn symmetric_from_positive(kpos: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = kpos.iter().rev().map(|k| -k).collect();
    out.extend_from_slice(kpos);
    out
}

/// Jost matrix values J(k_i) and J(0).
#[derive(Debug, Clone)]
pub struct JostMatrixTable {
    pub k: Vec<f64>,
    pub j: Vec<CMat>,
    pub j0: CMat,
}

/// J(k) = m(−k,0)†B − (−ik m(−k,0) + m′(−k,0))†A for real k.
pub fn jost_matrix(jt: &JostTable, bp: &BoundaryPair) -> Result<JostMatrixTable> {
    if bp.n != jt.n {
        return Err(ScatterError::DimensionMismatch { expected: jt.n, found: bp.n });
    }
    let j: Vec<CMat> = (0..jt.nk())
        .map(|i| {
            let im = jt.mirror(i);
            let k = jt.k[i];
            let mm = jt.m(im, 0);
            let fp = mm.clone() * (-I * k) + jt.mprime(im, 0);
            mm.adjoint() * &bp.b - fp.adjoint() * &bp.a
        })
        .collect();
    let j0 = jt.m0(0).adjoint() * &bp.b - jt.m0prime(0).adjoint() * &bp.a;
    Ok(JostMatrixTable { k: jt.k.clone(), j, j0 })
}

/// The kernel K(x, y) on x nodes of [0, X_V] and y ≥ x, zero elsewhere.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub n: usize,
    pub dx: f64,
    /// Number of x nodes covering [0, X_V].
    pub nv: usize,
    /// Row j holds y indices j ..= 2(nv−1) − j.
    rows: Vec<Vec<C64>>,
    /// Ratio of the transformed integrand at K_max to its peak.
    pub tail_ratio: f64,
}

impl KernelTable {
    pub fn zero(n: usize, dx: f64) -> Self {
        Self { n, dx, nv: 1, rows: vec![vec![C64::new(0.0, 0.0); n * n]], tail_ratio: 0.0 }
    }

    /// Largest y index with nonzero entries in row j.
    pub fn row_end(&self, j: usize) -> usize {
        2 * (self.nv - 1) - j
    }

    /// K(x_j, y_l) as a flat slice; None outside the stored region.
    pub fn get_flat(&self, j: usize, l: usize) -> Option<&[C64]> {
        if j >= self.nv || l < j || l > self.row_end(j) {
            return None;
        }
        let nn = self.n * self.n;
        let s = (l - j) * nn;
        Some(&self.rows[j][s..s + nn])
    }

    pub fn get(&self, j: usize, l: usize) -> CMat {
        match self.get_flat(j, l) {
            Some(s) => linalg::from_flat(self.n, s),
            None => linalg::zeros(self.n),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|z| z.norm() == 0.0))
    }
}

/// ∫_x^∞ D_k(y − x) V(y) dy, the first Born term of m − I.
fn born_first(v: &PotentialSpec, k: f64, x: f64) -> CMat {
    let mut out = linalg::zeros(v.n);
    let f = |u: f64| -> C64 {
        let z = C64::new(0.0, 2.0 * k * u);
        quad::phi2(z) * (u * u)
    };
    for c in &v.cells {
        let lo = c.a.max(x);
        if c.b > lo {
            out += c.value.clone() * (f(c.b - x) - f(lo - x));
        }
    }
    out
}

/// K(x, y) = (2π)^{-1} ∫ [f(k,x) − e^{ikx}] e^{−iky} dk.
///
/// The first Born term and a 1/(k² + a²) model of the next non-oscillatory term are
/// transformed in closed form; the remainder is summed over the k grid with a
/// cosine taper.
pub fn marchenko_kernel(jt: &JostTable, v: &PotentialSpec) -> Result<KernelTable> {
    let n = jt.n;
    let nn = n * n;
    let nv = jt.nv;
    let dx = jt.dx;
    let nk = jt.nk();
    if nk < 2 {
        return Err(ScatterError::GridMismatch("kernel needs a k grid".into()));
    }
    let dk = jt.k[1] - jt.k[0];
    let kmax = jt.k[nk - 1] + 0.5 * dk;
    let a = TAIL_MODEL_RATE;
    if v.is_zero() || nv < 2 {
        return Ok(KernelTable::zero(n, dx));
    }
    let taper: Vec<f64> = jt.k.iter().map(|&k| quad::cosine_taper(k, kmax, TAPER_FRACTION)).collect();
    let mut peak: f64 = 0.0;
    let mut edge: f64 = 0.0;
    let rows_and_stats: Vec<(Vec<C64>, f64, f64)> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * dx;
            let w_tail = v.tail_integral_vq(x);
            let mut resid = vec![C64::new(0.0, 0.0); nk * nn];
            let mut row_peak: f64 = 0.0;
            let mut row_edge: f64 = 0.0;
            for i in 0..nk {
                let k = jt.k[i];
                let mm = linalg::from_flat(n, jt.m_flat(i, j));
                let raw = &mm - linalg::eye(n);
                row_peak = row_peak.max(linalg::max_abs(&raw));
                let rho = w_tail.clone() * C64::new(-0.25 / (k * k + a * a), 0.0);
                let r = raw - born_first(v, k, x) - rho;
                if i == 0 || i == nk - 1 {
                    row_edge = row_edge.max(linalg::max_abs(&r));
                }
                let wgt = taper[i] * dk / (2.0 * PI);
                for q in 0..nn {
                    let (ri, ci) = (q / n, q % n);
                    resid[i * nn + q] = r[(ri, ci)] * wgt;
                }
            }
            let ns = 2 * (nv - 1) - 2 * j + 1;
            let mut row = vec![C64::new(0.0, 0.0); ns * nn];
            let mut phase: Vec<C64> = vec![C64::new(1.0, 0.0); nk];
            let rot: Vec<C64> = jt.k.iter().map(|&k| (-I * k * dx).exp()).collect();
            for s in 0..ns {
                let out = &mut row[s * nn..(s + 1) * nn];
                for i in 0..nk {
                    let p = phase[i];
                    for q in 0..nn {
                        out[q] += resid[i * nn + q] * p;
                    }
                    phase[i] = p * rot[i];
                }
                if s % 64 == 63 {
                    for i in 0..nk {
                        phase[i] = (-I * jt.k[i] * ((s + 1) as f64 * dx)).exp();
                    }
                }
                let y = x + s as f64 * dx;
                if v.sigma(0.5 * (x + y)) == 0.0 {
                    out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                    continue;
                }
                let q_mid = v.tail_integral(0.5 * (x + y));
                let model = &q_mid * C64::new(0.5, 0.0) - &w_tail * C64::new((-a * (y - x)).exp() / (8.0 * a), 0.0);
                for q in 0..nn {
                    out[q] += model[(q / n, q % n)];
                }
            }
            (row, row_peak, row_edge)
        })
        .collect();
    let mut rows = Vec::with_capacity(nv);
    for (row, p, e) in rows_and_stats {
        peak = peak.max(p);
        edge = edge.max(e);
        rows.push(row);
    }
    let tail_ratio = if peak > 0.0 { edge / peak } else { 0.0 };
    if tail_ratio > 1e-3 {
        return Err(ScatterError::TailNotNegligible { ratio: tail_ratio });
    }
    Ok(KernelTable { n, dx, nv, rows, tail_ratio })
}

/// Max over the sampled (k, x) of |f(k,x) − e^{ikx}I − ∫ₓ^∞ e^{iky}K(x,y)dy|, with
/// the y integral by the trapezoid rule on the kernel grid.
pub fn jost_representation_check(jt: &JostTable, kt: &KernelTable, k_indices: &[usize], x_stride: usize) -> f64 {
    let n = jt.n;
    let dx = jt.dx;
    let mut worst: f64 = 0.0;
    for &i in k_indices {
        let k = jt.k[i];
        let mut j = 0;
        while j < jt.nv {
            let x = j as f64 * dx;
            let lhs = jt.f(i, j) - linalg::eye(n) * (I * k * x).exp();
            let mut integral = linalg::zeros(n);
            if j < kt.nv {
                let end = kt.row_end(j);
                for l in j..=end {
                    let wgt = if l == j || l == end { 0.5 * dx } else { dx };
                    let y = l as f64 * dx;
                    integral += kt.get(j, l) * ((I * k * y).exp() * wgt);
                }
            }
            worst = worst.max(linalg::max_abs(&(lhs - integral)));
            j += x_stride.max(1);
        }
    }
    worst
}

/// Check |K(x,y)| ≤ ½ e^{σ₁(x)} σ((x+y)/2) on all stored nodes; returns the largest
/// violation (≤ 0 when the bound holds everywhere).
pub fn kernel_bound_violation(kt: &KernelTable, v: &PotentialSpec) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for j in 0..kt.nv {
        let x = j as f64 * kt.dx;
        let pre = 0.5 * v.sigma1(x).exp();
        for l in j..=kt.row_end(j) {
            let y = l as f64 * kt.dx;
            let bound = pre * v.sigma(0.5 * (x + y));
            let val = linalg::op_norm(&kt.get(j, l));
            worst = worst.max(val - bound);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode;

    fn step() -> PotentialSpec {
        PotentialSpec::scalar_step(1.0, 0.0, 1.0)
    }

    #[test]
    fn free_case_is_identity() {
        let grid = KXGrid::new(5.0, 16, 1.0 / 64.0, 4.0).unwrap();
        let jt = solve_faddeev(&PotentialSpec::zero(2), &grid).unwrap();
        for i in 0..jt.nk() {
            assert!(linalg::max_abs(&(jt.m(i, 0) - linalg::eye(2))) == 0.0);
            assert!(linalg::max_abs(&jt.mprime(i, 0)) == 0.0);
        }
    }

    #[test]
    fn zero_energy_step_matches_cosh() {
        let jt = solve_faddeev_at(&step(), &[-1.0, 1.0], 1.0 / 256.0).unwrap();
        let m0 = jt.m0(0)[(0, 0)];
        let m0p = jt.m0prime(0)[(0, 0)];
        assert!((m0.re - 1f64.cosh()).abs() < 1e-9, "{m0}");
        assert!((m0p.re + 1f64.sinh()).abs() < 1e-9, "{m0p}");
        for j in (0..jt.nv).step_by(32) {
            let x = j as f64 / 256.0;
            assert!((jt.m0(j)[(0, 0)].re - (1.0 - x).cosh()).abs() < 1e-9);
        }
    }

    #[test]
    fn finite_k_step_matches_ode_oracle() {
        let k = 2.0;
        let jt = solve_faddeev_at(&step(), &[-k, k], 1.0 / 256.0).unwrap();
        let f0 = jt.f(1, 0)[(0, 0)];
        let mut y = vec![(I * k).exp(), I * k * (I * k).exp()];
        ode::integrate(
            |_x, y, dy| {
                dy[0] = y[1];
                dy[1] = y[0] * (1.0 - k * k);
            },
            1.0,
            0.0,
            &mut y,
            &ode::OdeOptions::default(),
        )
        .unwrap();
        assert!((f0 - y[0]).norm() < 1e-8, "{f0} vs {}", y[0]);
        assert!((jt.fprime(1, 0)[(0, 0)] - y[1]).norm() < 1e-8);
    }

    #[test]
    fn free_jost_matrix_closed_form() {
        let grid = KXGrid::new(5.0, 16, 1.0 / 64.0, 4.0).unwrap();
        let jt = solve_faddeev(&PotentialSpec::zero(1), &grid).unwrap();
        let theta = 0.7f64;
        let bp = BoundaryPair::robin(theta);
        let jm = jost_matrix(&jt, &bp).unwrap();
        for (i, &k) in jt.k.iter().enumerate() {
            let expect = &bp.b - &bp.a * (I * k);
            assert!(linalg::max_abs(&(&jm.j[i] - expect)) < 1e-14);
        }
    }

    #[test]
    fn kernel_diagonal_and_support() {
        let grid = KXGrid::new(40.0, 4096, 1.0 / 128.0, 4.0).unwrap();
        let v = step();
        let jt = solve_faddeev(&v, &grid).unwrap();
        let kt = marchenko_kernel(&jt, &v).unwrap();
        for j in 0..kt.nv {
            let x = j as f64 * kt.dx;
            let d = kt.get(j, j)[(0, 0)];
            assert!((d.re - 0.5 * (1.0 - x)).abs() < 1e-4, "x={x} K={d}");
            if j > 0 {
                assert_eq!(kt.get(j, j - 1)[(0, 0)].norm(), 0.0);
            }
        }
    }
}
