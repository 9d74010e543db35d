//! Physical solutions, the generalized Fourier maps F^±, the cosine transform F₀,
//! spectral time evolution, and a finite-difference Hamiltonian for bound states
//! and propagation checks.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::boundary::{self, BoundaryPair};
use crate::error::{Result, ScatterError};
use crate::field::{self, Domain, Field};
use crate::jost::JostTable;
use crate::linalg::{self, CMat, C64, I};
use crate::potentials::PotentialSpec;
use crate::scattering::ScatteringTable;

/// Which generalized Fourier map: F⁺ uses Ψ(−k, x), F⁻ uses Ψ(k, x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// +1 for `Plus`, −1 for `Minus`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = ScatterError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(ScatterError::Config(format!("sign must be + or -, got {s}"))),
        }
    }
}

/// ℂⁿ-valued samples on positive k nodes with quadrature weights.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    pub n: usize,
    pub k: Vec<f64>,
    pub w: Vec<f64>,
    data: Vec<C64>,
}

impl SpectralFunction {
    pub fn zeros(n: usize, k: Vec<f64>, w: Vec<f64>) -> Self {
        let len = k.len() * n;
        Self { n, k, w, data: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn at(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn at_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn inner(&self, other: &SpectralFunction) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.len() {
            for (a, b) in self.at(i).iter().zip(other.at(i)) {
                acc += a.conj() * b * self.w[i];
            }
        }
        acc
    }

    pub fn norm2(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn distance(&self, other: &SpectralFunction) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.len() {
            for (a, b) in self.at(i).iter().zip(other.at(i)) {
                acc += (a - b).norm_sqr() * self.w[i];
            }
        }
        acc.sqrt()
    }

    /// Multiplication by e^{−itk²}.
    pub fn evolve(&self, t: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.len() {
            let ph = (-I * t * self.k[i] * self.k[i]).exp();
            out.at_mut(i).iter_mut().for_each(|z| *z *= ph);
        }
        out
    }
}

/// Ψ(k, x) = f(−k, x) + f(k, x)S(k) for every grid k and x ∈ [0, X_V], with S(k)
/// for the analytic continuation e^{−ikx}I + e^{ikx}S(k) beyond the support.
#[derive(Debug, Clone)]
pub struct PhysicalSolutionTable {
    pub n: usize,
    pub dx: f64,
    pub nv: usize,
    pub k: Vec<f64>,
    pub s: Vec<CMat>,
    psi: Vec<C64>,
    psi0_prime: Vec<CMat>,
}

pub fn physical_solution(jt: &JostTable, st: &ScatteringTable) -> Result<PhysicalSolutionTable> {
    if jt.k.len() != st.k.len() || jt.k.iter().zip(&st.k).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(ScatterError::GridMismatch("Jost and scattering tables use different k grids".into()));
    }
    let n = jt.n;
    let nn = n * n;
    let nk = jt.k.len();
    let nv = jt.nv;
    let rows: Vec<Vec<C64>> = (0..nk)
        .into_par_iter()
        .map(|i| {
            let im = jt.mirror(i);
            let mut row = vec![C64::new(0.0, 0.0); nv * nn];
            for j in 0..nv {
                let p = jt.f(im, j) + jt.f(i, j) * &st.s[i];
                linalg::to_flat(&p, &mut row[j * nn..(j + 1) * nn]);
            }
            row
        })
        .collect();
    let psi0_prime = (0..nk).map(|i| jt.fprime(jt.mirror(i), 0) + jt.fprime(i, 0) * &st.s[i]).collect();
    Ok(PhysicalSolutionTable { n, dx: jt.dx, nv, k: jt.k.clone(), s: st.s.clone(), psi: rows.concat(), psi0_prime })
}

impl PhysicalSolutionTable {
    pub fn nk(&self) -> usize {
        self.k.len()
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.k.len() - 1 - i
    }

    pub fn dk(&self) -> f64 {
        self.k[1] - self.k[0]
    }

    /// Support edge X_V.
    pub fn support(&self) -> f64 {
        (self.nv - 1) as f64 * self.dx
    }

    /// Positive nodes and their midpoint weights.
    pub fn positive_grid(&self) -> (Vec<f64>, Vec<f64>) {
        let k: Vec<f64> = self.k[self.nk() / 2..].to_vec();
        let w = vec![self.dk(); k.len()];
        (k, w)
    }

    /// The table restricted to the `keep` nodes on each side of k = 0.
    pub fn truncated(&self, keep: usize) -> Self {
        let half = self.nk() / 2;
        let keep = keep.min(half);
        let (lo, hi) = (half - keep, half + keep);
        let row = self.nv * self.n * self.n;
        Self {
            n: self.n,
            dx: self.dx,
            nv: self.nv,
            k: self.k[lo..hi].to_vec(),
            s: self.s[lo..hi].to_vec(),
            psi: self.psi[lo * row..hi * row].to_vec(),
            psi0_prime: self.psi0_prime[lo..hi].to_vec(),
        }
    }

    fn psi_flat(&self, i: usize, j: usize) -> &[C64] {
        let nn = self.n * self.n;
        &self.psi[(i * self.nv + j) * nn..(i * self.nv + j + 1) * nn]
    }

    /// Ψ(k_i, x_j) for the table node x_j = j Δx (analytic beyond the support).
    pub fn psi(&self, i: usize, j: usize) -> CMat {
        if j < self.nv {
            linalg::from_flat(self.n, self.psi_flat(i, j))
        } else {
            self.psi_far(i, j as f64 * self.dx)
        }
    }

    /// e^{−ikx}I + e^{ikx}S(k).
    pub fn psi_far(&self, i: usize, x: f64) -> CMat {
        let k = self.k[i];
        linalg::scalar(self.n, (-I * k * x).exp()) + &self.s[i] * (I * k * x).exp()
    }

    /// Ψ′(k_i, 0).
    pub fn psi0_prime(&self, i: usize) -> &CMat {
        &self.psi0_prime[i]
    }

    /// max_k ‖−B†Ψ(k,0) + A†Ψ′(k,0)‖.
    pub fn boundary_residual(&self, bp: &BoundaryPair) -> f64 {
        (0..self.nk())
            .map(|i| linalg::op_norm(&bp.residual(&self.psi(i, 0), &self.psi0_prime[i])))
            .fold(0.0, f64::max)
    }

    /// max_k ‖Ψ(k, X_V) − (e^{−ikX_V} + e^{ikX_V}S(k))‖, the table/far-field seam.
    pub fn seam_defect(&self) -> f64 {
        let j = self.nv - 1;
        let x = j as f64 * self.dx;
        (0..self.nk())
            .map(|i| linalg::op_norm(&(linalg::from_flat(self.n, self.psi_flat(i, j)) - self.psi_far(i, x))))
            .fold(0.0, f64::max)
    }

    /// Largest |−Ψ″ + VΨ − k²Ψ| on interior nodes away from jumps of V, by second differences.
    pub fn stationary_residual(&self, v: &PotentialSpec, k_indices: &[usize]) -> f64 {
        let h = self.dx;
        let mut worst: f64 = 0.0;
        for &i in k_indices {
            let k2 = self.k[i] * self.k[i];
            for j in 1..self.nv.saturating_sub(1) {
                let x = j as f64 * h;
                let near_jump = v.cells.iter().any(|c| (c.a - x).abs() < 1.5 * h || (c.b - x).abs() < 1.5 * h);
                if near_jump {
                    continue;
                }
                let d2 = (self.psi(i, j + 1) - self.psi(i, j) * C64::new(2.0, 0.0) + self.psi(i, j - 1)) / C64::new(h * h, 0.0);
                let p = self.psi(i, j);
                let r = -d2 + v.value_at(x) * &p - p * C64::new(k2, 0.0);
                worst = worst.max(linalg::op_norm(&r));
            }
        }
        worst
    }
}

/// Spacing ratio between a field grid and the table grid.
fn stride_of(pt: &PhysicalSolutionTable, y: &Field) -> Result<usize> {
    let r = y.h / pt.dx;
    let s = r.round();
    if s < 1.0 || (r - s).abs() > 1e-9 {
        return Err(ScatterError::GridMismatch(format!("field spacing {} is not a multiple of table spacing {}", y.h, pt.dx)));
    }
    Ok(s as usize)
}

fn check_half_line(y: &Field, n: usize) -> Result<()> {
    if y.domain != Domain::HalfLine {
        return Err(ScatterError::PipelineDomain("spectral maps act on half-line fields".into()));
    }
    if y.n != n {
        return Err(ScatterError::DimensionMismatch { expected: n, found: y.n });
    }
    Ok(())
}

const RESEED: usize = 512;

/// (F₀Y)(k) = √(2/π) ∫₀^∞ cos(kx)Y(x)dx by the trapezoid rule, on the given nodes.
pub fn f0_transform(y: &Field, k: &[f64], w: &[f64]) -> Result<SpectralFunction> {
    if y.domain != Domain::HalfLine {
        return Err(ScatterError::PipelineDomain("cosine transform acts on half-line fields".into()));
    }
    let n = y.n;
    let c = (2.0 / PI).sqrt();
    let rows: Vec<Vec<C64>> = k
        .par_iter()
        .map(|&kk| {
            let mut acc = vec![C64::new(0.0, 0.0); n];
            let step = (I * kk * y.h).exp();
            let mut ph = C64::new(1.0, 0.0);
            for j in 0..y.npos {
                if j % RESEED == 0 {
                    ph = (I * kk * y.x(j)).exp();
                }
                let f = c * y.weight(j) * ph.re;
                for (a, v) in acc.iter_mut().zip(y.at(j)) {
                    *a += v * f;
                }
                ph *= step;
            }
            acc
        })
        .collect();
    let mut out = SpectralFunction::zeros(n, k.to_vec(), w.to_vec());
    for (i, r) in rows.into_iter().enumerate() {
        out.at_mut(i).copy_from_slice(&r);
    }
    Ok(out)
}

/// F₀†Z(x) = √(2/π) Σ w_i cos(k_i x) Z_i on the nodes of `template`.
pub fn f0_adjoint(z: &SpectralFunction, h: f64, npos: usize) -> Field {
    let n = z.n;
    let c = (2.0 / PI).sqrt();
    let dk = if z.len() > 1 { z.k[1] - z.k[0] } else { 0.0 };
    let vals: Vec<Vec<C64>> = (0..npos)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * h;
            let mut acc = vec![C64::new(0.0, 0.0); n];
            let step = (I * dk * x).exp();
            let mut ph = C64::new(1.0, 0.0);
            for i in 0..z.len() {
                if i % RESEED == 0 {
                    ph = (I * z.k[i] * x).exp();
                }
                let f = c * z.w[i] * ph.re;
                for (a, v) in acc.iter_mut().zip(z.at(i)) {
                    *a += v * f;
                }
                ph *= step;
            }
            acc
        })
        .collect();
    let mut out = Field::half_line(n, h, npos);
    for (j, v) in vals.into_iter().enumerate() {
        out.at_mut(j).copy_from_slice(&v);
    }
    out
}

/// (F^±Y)(k) = (2π)^{−1/2} ∫₀^∞ Ψ(∓k, x)†Y(x)dx on the positive nodes.
pub fn fourier_map(pt: &PhysicalSolutionTable, y: &Field, sign: Sign) -> Result<SpectralFunction> {
    check_half_line(y, pt.n)?;
    let stride = stride_of(pt, y)?;
    let n = pt.n;
    let nn = n * n;
    let (kpos, w) = pt.positive_grid();
    let half = pt.nk() / 2;
    let near_end = ((pt.nv - 1) / stride + 1).min(y.npos);
    let norm = 1.0 / (2.0 * PI).sqrt();
    let rows: Vec<Vec<C64>> = (0..kpos.len())
        .into_par_iter()
        .map(|q| {
            let i = half + q;
            let ik = if sign == Sign::Plus { pt.mirror(i) } else { i };
            let kappa = pt.k[ik];
            let mut acc = vec![C64::new(0.0, 0.0); n];
            let mut tmp = vec![C64::new(0.0, 0.0); n];
            for j in 0..near_end {
                linalg::adj_matvec_flat(n, pt.psi_flat(ik, j * stride), y.at(j), &mut tmp);
                let wj = y.weight(j);
                for c in 0..n {
                    acc[c] += tmp[c] * wj;
                }
            }
            if near_end < y.npos {
                let mut a = vec![C64::new(0.0, 0.0); n];
                let mut b = vec![C64::new(0.0, 0.0); n];
                let step = (I * kappa * y.h).exp();
                let mut ph = C64::new(1.0, 0.0);
                for j in near_end..y.npos {
                    if (j - near_end).is_multiple_of(RESEED) {
                        ph = (I * kappa * y.x(j)).exp();
                    }
                    let wj = y.weight(j);
                    let phc = ph.conj();
                    for (c, v) in y.at(j).iter().enumerate() {
                        a[c] += v * ph * wj;
                        b[c] += v * phc * wj;
                    }
                    ph *= step;
                }
                let mut sflat = vec![C64::new(0.0, 0.0); nn];
                linalg::to_flat(&pt.s[ik], &mut sflat);
                linalg::adj_matvec_flat(n, &sflat, &b, &mut tmp);
                for c in 0..n {
                    acc[c] += a[c] + tmp[c];
                }
            }
            acc.iter_mut().for_each(|z| *z *= norm);
            acc
        })
        .collect();
    let mut out = SpectralFunction::zeros(n, kpos, w);
    for (q, r) in rows.into_iter().enumerate() {
        out.at_mut(q).copy_from_slice(&r);
    }
    Ok(out)
}

/// ((F^±)†Z)(x) = (2π)^{−1/2} Σ w_i Ψ(∓k_i, x) Z_i on a half-line grid with spacing h.
pub fn fourier_map_adjoint(pt: &PhysicalSolutionTable, z: &SpectralFunction, sign: Sign, h: f64, npos: usize) -> Result<Field> {
    let n = pt.n;
    if z.n != n {
        return Err(ScatterError::DimensionMismatch { expected: n, found: z.n });
    }
    let template = Field::half_line(n, h, npos);
    let stride = stride_of(pt, &template)?;
    let half = pt.nk() / 2;
    if z.len() != pt.nk() - half {
        return Err(ScatterError::GridMismatch("spectral function is not on the table's positive nodes".into()));
    }
    let nn = n * n;
    let norm = 1.0 / (2.0 * PI).sqrt();
    let index = |q: usize| if sign == Sign::Plus { pt.mirror(half + q) } else { half + q };
    // u_q = w_q Z_q, v_q = w_q S(κ_q) Z_q for the far field
    let mut u = vec![C64::new(0.0, 0.0); z.len() * n];
    let mut v = vec![C64::new(0.0, 0.0); z.len() * n];
    let mut sflat = vec![C64::new(0.0, 0.0); nn];
    for q in 0..z.len() {
        let zq: Vec<C64> = z.at(q).iter().map(|c| c * z.w[q]).collect();
        u[q * n..(q + 1) * n].copy_from_slice(&zq);
        linalg::to_flat(&pt.s[index(q)], &mut sflat);
        linalg::matvec_flat(n, &sflat, &zq, &mut v[q * n..(q + 1) * n]);
    }
    let near_end = ((pt.nv - 1) / stride + 1).min(npos);
    let sgn = -sign.value();
    let dk = pt.dk();
    let vals: Vec<Vec<C64>> = (0..npos)
        .into_par_iter()
        .map(|j| {
            let mut acc = vec![C64::new(0.0, 0.0); n];
            if j < near_end {
                let mut tmp = vec![C64::new(0.0, 0.0); n];
                for q in 0..z.len() {
                    linalg::matvec_flat(n, pt.psi_flat(index(q), j * stride), z.at(q), &mut tmp);
                    for c in 0..n {
                        acc[c] += tmp[c] * z.w[q];
                    }
                }
            } else {
                let x = j as f64 * h;
                // e^{iκ_q x} with κ_q = sgn·k_q
                let step = (I * sgn * dk * x).exp();
                let mut ph = C64::new(1.0, 0.0);
                for q in 0..z.len() {
                    if q % RESEED == 0 {
                        ph = (I * sgn * pt.k[half + q] * x).exp();
                    }
                    let phc = ph.conj();
                    for c in 0..n {
                        acc[c] += u[q * n + c] * phc + v[q * n + c] * ph;
                    }
                    ph *= step;
                }
            }
            acc.iter_mut().for_each(|a| *a *= norm);
            acc
        })
        .collect();
    let mut out = template;
    for (j, val) in vals.into_iter().enumerate() {
        out.at_mut(j).copy_from_slice(&val);
    }
    Ok(out)
}

/// (F^±)†F^±Y, the projection onto the absolutely continuous subspace.
pub fn ac_projection(pt: &PhysicalSolutionTable, y: &Field) -> Result<Field> {
    let z = fourier_map(pt, y, Sign::Plus)?;
    fourier_map_adjoint(pt, &z, Sign::Plus, y.h, y.npos)
}

/// e^{−itH}P_ac Y = (F^±)† e^{−itk²} F^± Y.
pub fn evolve_spectral(pt: &PhysicalSolutionTable, y: &Field, t: f64, sign: Sign) -> Result<Field> {
    let z = fourier_map(pt, y, sign)?.evolve(t);
    fourier_map_adjoint(pt, &z, sign, y.h, y.npos)
}

/// Free evolution e^{−itH₀} with the Neumann condition, by FFT of the even extension.
///
/// Returns `DomainReflection` when more than 1% of the mass ends up outside the
/// original window, where the periodic images would start to interact.
pub fn free_evolve_fft(y: &Field, t: f64) -> Result<Field> {
    let e = field::extend_even(y)?;
    let len = e.len();
    let size = (4 * len).next_power_of_two();
    let offset = (size - len) / 2;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut out = e.zeros_like();
    let mut outside = 0.0;
    let mut total = 0.0;
    for c in 0..y.n {
        let mut buf = vec![C64::new(0.0, 0.0); size];
        for (i, v) in e.component(c).into_iter().enumerate() {
            buf[offset + i] = v;
        }
        fwd.process(&mut buf);
        for (q, b) in buf.iter_mut().enumerate() {
            let m = if q <= size / 2 { q as f64 } else { q as f64 - size as f64 };
            let xi = 2.0 * PI * m / (size as f64 * y.h);
            *b *= (-I * t * xi * xi).exp() / size as f64;
        }
        inv.process(&mut buf);
        for (q, b) in buf.iter().enumerate() {
            let m2 = b.norm_sqr();
            total += m2;
            if q < offset || q >= offset + len {
                outside += m2;
            }
        }
        out.set_component(c, &buf[offset..offset + len]);
    }
    if total > 0.0 && outside / total > 0.01 {
        return Err(ScatterError::DomainReflection { fraction: outside / total });
    }
    field::restrict(&out)
}

/// Free Schrödinger evolution of exp(−(x−c)²/(2s²)) on the line under −d²/dx².
pub fn free_gaussian(x: f64, center: f64, width: f64, t: f64) -> C64 {
    let s2 = C64::new(width * width, 2.0 * t);
    let pref = (C64::new(width * width, 0.0) / s2).sqrt();
    pref * (-(x - center) * (x - center) / (2.0 * s2)).exp()
}

/// Free Neumann evolution of the image-symmetric Gaussian g(x−c) + g(x+c).
pub fn free_neumann_gaussian(x: f64, center: f64, width: f64, t: f64) -> C64 {
    free_gaussian(x, center, width, t) + free_gaussian(x, -center, width, t)
}

/// −d²/dx² + V on x_i = i h, i = 0..N−1, in the frame Ỹ = M†Y where the boundary
/// condition is diagonal, symmetrized by the node weights. The far end carries a
/// Dirichlet condition at x = N h.
#[derive(Debug)]
pub struct DiscreteHamiltonian {
    pub n: usize,
    pub h: f64,
    pub nodes: usize,
    pub m: CMat,
    pub thetas: Vec<f64>,
    index: Vec<Option<usize>>,
    scale: Vec<f64>,
    rows: Vec<Vec<(usize, C64)>>,
    eig: OnceLock<(Vec<f64>, CMat)>,
}

fn is_dirichlet(theta: f64) -> bool {
    (theta - PI).abs() < 1e-10 || theta.abs() < 1e-10
}

/// Assemble the finite-difference Hamiltonian on [0, length] with spacing h.
pub fn discrete_hamiltonian(v: &PotentialSpec, bp: &BoundaryPair, h: f64, length: f64) -> Result<DiscreteHamiltonian> {
    if v.n != bp.n {
        return Err(ScatterError::DimensionMismatch { expected: v.n, found: bp.n });
    }
    let df = boundary::diagonalize(bp)?;
    let n = v.n;
    let nodes = (length / h).round() as usize;
    if nodes < 3 {
        return Err(ScatterError::GridTooCoarse(format!("{nodes} nodes")));
    }
    let mut index = vec![None; nodes * n];
    let mut scale = Vec::new();
    let mut count = 0;
    for i in 0..nodes {
        for c in 0..n {
            if i == 0 && is_dirichlet(df.thetas[c]) {
                continue;
            }
            index[i * n + c] = Some(count);
            scale.push(if i == 0 { 0.5f64.sqrt() } else { 1.0 });
            count += 1;
        }
    }
    let h2 = h * h;
    let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); count];
    for i in 0..nodes {
        let x = i as f64 * h;
        let vx = if i == 0 {
            v.value_at(1e-12)
        } else {
            (v.value_at(x - 1e-12) + v.value_at(x + 1e-12)) * C64::new(0.5, 0.0)
        };
        let vt = df.m.adjoint() * vx * &df.m;
        for c in 0..n {
            let Some(r) = index[i * n + c] else { continue };
            let diag = if i == 0 { (2.0 - 2.0 * h * (df.thetas[c].cos() / df.thetas[c].sin())) / h2 } else { 2.0 / h2 };
            rows[r].push((r, C64::new(diag, 0.0)));
            for d in 0..n {
                if let Some(col) = index[i * n + d] {
                    if vt[(c, d)] != C64::new(0.0, 0.0) {
                        rows[r].push((col, vt[(c, d)]));
                    }
                }
            }
            for nb in [i.wrapping_sub(1), i + 1] {
                if nb >= nodes {
                    continue;
                }
                if let Some(col) = index[nb * n + c] {
                    let off = if i == 0 || nb == 0 { -(2.0f64.sqrt()) / h2 } else { -1.0 / h2 };
                    rows[r].push((col, C64::new(off, 0.0)));
                }
            }
        }
    }
    Ok(DiscreteHamiltonian { n, h, nodes, m: df.m, thetas: df.thetas, index, scale, rows, eig: OnceLock::new() })
}

impl DiscreteHamiltonian {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn matvec(&self, u: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|row| row.iter().map(|&(c, v)| v * u[c]).sum()).collect()
    }

    pub fn dense(&self) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// max |H_ab − conj(H_ba)|.
    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.dense())
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (r, row) in self.rows.iter().enumerate() {
            let mut d = 0.0;
            let mut off = 0.0;
            for &(c, v) in row {
                if c == r {
                    d += v.re;
                } else {
                    off += v.norm();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        (lo, hi)
    }

    /// All eigenvalues and eigenvectors (computed once).
    pub fn eigenpairs(&self) -> &(Vec<f64>, CMat) {
        self.eig.get_or_init(|| linalg::herm_eig(&self.dense()))
    }

    /// Samples of a half-line field at the nodes, mapped to the symmetrized frame.
    pub fn from_field(&self, y: &Field) -> Result<Vec<C64>> {
        let r = self.h / y.h;
        let stride = r.round() as usize;
        if y.domain != Domain::HalfLine || stride == 0 || (r - stride as f64).abs() > 1e-9 {
            return Err(ScatterError::GridMismatch("field grid does not contain the Hamiltonian nodes".into()));
        }
        let mut u = vec![C64::new(0.0, 0.0); self.dim()];
        for i in 0..self.nodes {
            let j = i * stride;
            if j >= y.npos {
                break;
            }
            let yt = self.m.adjoint() * nalgebra::DVector::from_column_slice(y.at(j));
            for c in 0..self.n {
                if let Some(r) = self.index[i * self.n + c] {
                    u[r] = yt[c] * self.scale[r];
                }
            }
        }
        Ok(u)
    }

    /// Inverse of [`Self::from_field`] on a field with the Hamiltonian's spacing.
    pub fn to_field(&self, u: &[C64]) -> Field {
        let mut out = Field::half_line(self.n, self.h, self.nodes);
        for i in 0..self.nodes {
            let mut yt = nalgebra::DVector::from_element(self.n, C64::new(0.0, 0.0));
            for c in 0..self.n {
                if let Some(r) = self.index[i * self.n + c] {
                    yt[c] = u[r] / self.scale[r];
                }
            }
            let y = &self.m * yt;
            out.at_mut(i).copy_from_slice(y.as_slice());
        }
        out
    }

    /// e^{−itH}u by a Chebyshev expansion.
    pub fn propagate(&self, u: &[C64], t: f64) -> Vec<C64> {
        let (lo, hi) = self.spectral_bounds();
        let a = 0.5 * (hi - lo);
        let b = 0.5 * (hi + lo);
        let z = t * a;
        let terms = (z + 10.0 * z.cbrt() + 40.0).ceil() as usize;
        let jn = bessel_j_sequence(z, terms);
        let apply_x = |v: &[C64]| -> Vec<C64> {
            let hv = self.matvec(v);
            hv.iter().zip(v).map(|(h, x)| (h - x * b) / a).collect()
        };
        let mut t_prev = u.to_vec();
        let mut t_cur = apply_x(u);
        let mut acc: Vec<C64> = u.iter().map(|x| x * jn[0]).collect();
        let mut phase = -I;
        for (m, j) in jn.iter().enumerate().skip(1) {
            if m > 1 {
                let xt = apply_x(&t_cur);
                let next: Vec<C64> = xt.iter().zip(&t_prev).map(|(x, p)| x * 2.0 - p).collect();
                t_prev = std::mem::replace(&mut t_cur, next);
            }
            let coef = phase * 2.0 * *j;
            for (a, v) in acc.iter_mut().zip(&t_cur) {
                *a += coef * v;
            }
            phase *= -I;
        }
        let global = (-I * t * b).exp();
        acc.iter_mut().for_each(|x| *x *= global);
        acc
    }
}

/// Eigenvalues below −1e−8, ascending.
pub fn bound_states(dh: &DiscreteHamiltonian) -> Vec<f64> {
    dh.eigenpairs().0.iter().cloned().filter(|&e| e < -1e-8).collect()
}

/// `BoundStatesPresent` when the discrete operator has negative eigenvalues.
pub fn check_no_bound_states(dh: &DiscreteHamiltonian) -> Result<()> {
    let b = bound_states(dh);
    if b.is_empty() {
        Ok(())
    } else {
        Err(ScatterError::BoundStatesPresent { eigenvalues: b })
    }
}

/// J_0(z), …, J_{mmax}(z) for z ≥ 0 by Miller's backward recurrence.
pub fn bessel_j_sequence(z: f64, mmax: usize) -> Vec<f64> {
    if z == 0.0 {
        let mut v = vec![0.0; mmax + 1];
        v[0] = 1.0;
        return v;
    }
    let start = mmax + 20 + (z + 10.0 * z.cbrt()) as usize;
    let mut vals = vec![0.0; start + 2];
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    for m in (1..=start).rev() {
        let jm1 = 2.0 * m as f64 / z * j - jp1;
        jp1 = j;
        j = jm1;
        vals[m - 1] = jm1;
        vals[m] = jp1;
        if j.abs() > 1e250 {
            for v in vals[m - 1..].iter_mut() {
                *v *= 1e-250;
            }
            j *= 1e-250;
            jp1 *= 1e-250;
        }
    }
    let mut norm = vals[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * vals[k];
    }
    vals.truncate(mmax + 1);
    vals.iter_mut().for_each(|v| *v /= norm);
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        let j = bessel_j_sequence(1.0, 5);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-13);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-13);
        let j = bessel_j_sequence(10.0, 6);
        assert!((j[5] - (-0.234_061_528_186_793_6)).abs() < 1e-12);
        let j = bessel_j_sequence(3000.0, 3200);
        let s: f64 = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_gaussian_at_time_zero() {
        assert!((free_gaussian(0.3, 0.0, 1.0, 0.0) - C64::new((-0.045f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fd_neumann_free_spectrum_is_nonnegative() {
        let dh = discrete_hamiltonian(&PotentialSpec::zero(1), &BoundaryPair::neumann(1), 0.1, 5.0).unwrap();
        assert!(dh.hermitian_defect() < 1e-10);
        let ev = &dh.eigenpairs().0;
        assert!(ev[0] >= -1e-9 && *ev.last().unwrap() < 4.0 / 0.01);
        assert!(bound_states(&dh).is_empty());
    }
}
