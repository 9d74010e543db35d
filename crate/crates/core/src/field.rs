//! Sampled ℂⁿ-valued fields on the half line and on the line, and the elementary
//! operators acting on them: extensions, restriction, Hilbert transform,
//! convolution and integral kernels.
//!
//! Half-line fields live on nodes x_j = j h, j = 0..N−1; line fields on
//! x_j = j h, j = −(N−1)..N−1. Inner products use the weight h at every node except
//! the half-line origin, which carries h/2; with these weights every adjoint below
//! is the exact discrete adjoint of its operator.

use std::sync::Arc;

use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::jost::KernelTable;
use crate::linalg::{self, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Domain {
    HalfLine,
    Line,
}

#[derive(Debug, Clone)]
pub struct Field {
    pub domain: Domain,
    /// Number of components.
    pub n: usize,
    pub h: f64,
    /// Number of nodes with x ≥ 0.
    pub npos: usize,
    data: Vec<C64>,
}

impl Field {
    pub fn zeros(domain: Domain, n: usize, h: f64, npos: usize) -> Self {
        let len = match domain {
            Domain::HalfLine => npos,
            Domain::Line => 2 * npos - 1,
        };
        Self { domain, n, h, npos, data: vec![C64::new(0.0, 0.0); len * n] }
    }

    pub fn half_line(n: usize, h: f64, npos: usize) -> Self {
        Self::zeros(Domain::HalfLine, n, h, npos)
    }

    pub fn line(n: usize, h: f64, npos: usize) -> Self {
        Self::zeros(Domain::Line, n, h, npos)
    }

    /// Sample `f(x, out)` at every node.
    pub fn from_fn(domain: Domain, n: usize, h: f64, npos: usize, f: impl Fn(f64, &mut [C64])) -> Self {
        let mut out = Self::zeros(domain, n, h, npos);
        for i in 0..out.len() {
            let x = out.x(i);
            f(x, out.at_mut(i));
        }
        out
    }

    /// A real Gaussian bump exp(−(x−c)²/(2s²)) times a constant vector.
    pub fn gaussian(domain: Domain, h: f64, npos: usize, center: f64, width: f64, amp: &[C64]) -> Self {
        Self::from_fn(domain, amp.len(), h, npos, |x, out| {
            let g = (-(x - center).powi(2) / (2.0 * width * width)).exp();
            for (o, a) in out.iter_mut().zip(amp) {
                *o = a * g;
            }
        })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Index of the node at x = 0.
    pub fn origin(&self) -> usize {
        match self.domain {
            Domain::HalfLine => 0,
            Domain::Line => self.npos - 1,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.origin() as f64) * self.h
    }

    pub fn weight(&self, i: usize) -> f64 {
        if self.domain == Domain::HalfLine && i == 0 {
            0.5 * self.h
        } else {
            self.h
        }
    }

    pub fn at(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn at_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Samples of component c.
    pub fn component(&self, c: usize) -> Vec<C64> {
        (0..self.len()).map(|i| self.data[i * self.n + c]).collect()
    }

    pub fn set_component(&mut self, c: usize, values: &[C64]) {
        for (i, v) in values.iter().enumerate() {
            self.data[i * self.n + c] = *v;
        }
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        self.domain == other.domain && self.npos == other.npos && (self.h - other.h).abs() <= 1e-12 * self.h
    }

    pub fn check_same(&self, other: &Field) -> Result<()> {
        if !self.same_grid(other) || self.n != other.n {
            return Err(ScatterError::GridMismatch(format!(
                "fields differ: {:?}/{}/{}/{} vs {:?}/{}/{}/{}",
                self.domain, self.n, self.h, self.npos, other.domain, other.n, other.h, other.npos
            )));
        }
        Ok(())
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.domain, self.n, self.h, self.npos)
    }

    /// ⟨self, other⟩ = Σ w_i self_i* · other_i.
    pub fn inner(&self, other: &Field) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.len() {
            let w = self.weight(i);
            for (a, b) in self.at(i).iter().zip(other.at(i)) {
                acc += a.conj() * b * w;
            }
        }
        acc
    }

    pub fn norm2(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Lᵖ norm with the node weights; p = ∞ is the max of the pointwise Euclidean norm.
    pub fn norm_p(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return (0..self.len()).map(|i| pointwise(self.at(i))).fold(0.0, f64::max);
        }
        let s: f64 = (0..self.len()).map(|i| self.weight(i) * pointwise(self.at(i)).powf(p)).sum();
        s.powf(1.0 / p)
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// ‖self − other‖₂.
    pub fn distance(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.norm2())
    }

    /// Pointwise multiplication by a constant n×m matrix (m = current components).
    pub fn apply_matrix(&self, m: &CMat) -> Result<Self> {
        if m.ncols() != self.n {
            return Err(ScatterError::DimensionMismatch { expected: self.n, found: m.ncols() });
        }
        let rows = m.nrows();
        let mut out = Self::zeros(self.domain, rows, self.h, self.npos);
        for i in 0..self.len() {
            let src = self.at(i).to_vec();
            let dst = out.at_mut(i);
            for r in 0..rows {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..self.n {
                    acc += m[(r, c)] * src[c];
                }
                dst[r] = acc;
            }
        }
        Ok(out)
    }

    /// Fraction of the L² mass in the outer 10% of the window (by |x|).
    pub fn outer_mass_fraction(&self) -> f64 {
        let xmax = (self.npos - 1) as f64 * self.h;
        let total: f64 = (0..self.len()).map(|i| self.weight(i) * pointwise(self.at(i)).powi(2)).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outer: f64 = (0..self.len())
            .filter(|&i| self.x(i).abs() > 0.9 * xmax)
            .map(|i| self.weight(i) * pointwise(self.at(i)).powi(2))
            .sum();
        outer / total
    }

    /// Copy of the half-line field onto a grid with `npos` nodes (truncating or padding with zeros).
    pub fn resized(&self, npos: usize) -> Self {
        let mut out = Self::zeros(self.domain, self.n, self.h, npos);
        match self.domain {
            Domain::HalfLine => {
                for i in 0..npos.min(self.npos) {
                    out.at_mut(i).copy_from_slice(self.at(i));
                }
            }
            Domain::Line => {
                let m = npos.min(self.npos) as isize;
                for j in -(m - 1)..m {
                    let src = (j + self.origin() as isize) as usize;
                    let dst = (j + out.origin() as isize) as usize;
                    out.at_mut(dst).copy_from_slice(self.at(src));
                }
            }
        }
        out
    }

    /// First `m` components and the remaining ones.
    pub fn split_channels(&self, m: usize) -> (Field, Field) {
        let mut a = Self::zeros(self.domain, m, self.h, self.npos);
        let mut b = Self::zeros(self.domain, self.n - m, self.h, self.npos);
        for i in 0..self.len() {
            a.at_mut(i).copy_from_slice(&self.at(i)[..m]);
            b.at_mut(i).copy_from_slice(&self.at(i)[m..]);
        }
        (a, b)
    }

    pub fn join_channels(a: &Field, b: &Field) -> Result<Field> {
        if !a.same_grid(b) {
            return Err(ScatterError::GridMismatch("channel blocks on different grids".into()));
        }
        let mut out = Self::zeros(a.domain, a.n + b.n, a.h, a.npos);
        for i in 0..a.len() {
            let dst = out.at_mut(i);
            dst[..a.n].copy_from_slice(a.at(i));
            dst[a.n..].copy_from_slice(b.at(i));
        }
        Ok(out)
    }
}

fn pointwise(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn require(y: &Field, domain: Domain, op: &str) -> Result<()> {
    if y.domain != domain {
        return Err(ScatterError::PipelineDomain(format!("{op} expects {domain:?}, got {:?}", y.domain)));
    }
    Ok(())
}

/// (E_even Y)(x) = Y(|x|).
pub fn extend_even(y: &Field) -> Result<Field> {
    require(y, Domain::HalfLine, "extend_even")?;
    let mut out = Field::line(y.n, y.h, y.npos);
    let o = out.origin();
    for i in 0..y.npos {
        out.at_mut(o + i).copy_from_slice(y.at(i));
        out.at_mut(o - i).copy_from_slice(y.at(i));
    }
    Ok(out)
}

/// (E_odd Y)(x) = sign(x) Y(|x|), zero at the origin node.
pub fn extend_odd(y: &Field) -> Result<Field> {
    require(y, Domain::HalfLine, "extend_odd")?;
    let mut out = Field::line(y.n, y.h, y.npos);
    let o = out.origin();
    for i in 1..y.npos {
        out.at_mut(o + i).copy_from_slice(y.at(i));
        for (d, s) in out.at_mut(o - i).iter_mut().zip(y.at(i)) {
            *d = -s;
        }
    }
    Ok(out)
}

/// (E_even† Z)(x) = Z(x) + Z(−x).
pub fn extend_even_adjoint(z: &Field) -> Result<Field> {
    require(z, Domain::Line, "extend_even_adjoint")?;
    let mut out = Field::half_line(z.n, z.h, z.npos);
    let o = z.origin();
    for i in 0..z.npos {
        let d = out.at_mut(i);
        for c in 0..z.n {
            d[c] = z.at(o + i)[c] + z.at(o - i)[c];
        }
    }
    Ok(out)
}

/// (E_odd† Z)(x) = Z(x) − Z(−x), zero at the origin node.
pub fn extend_odd_adjoint(z: &Field) -> Result<Field> {
    require(z, Domain::Line, "extend_odd_adjoint")?;
    let mut out = Field::half_line(z.n, z.h, z.npos);
    let o = z.origin();
    for i in 1..z.npos {
        let d = out.at_mut(i);
        for c in 0..z.n {
            d[c] = z.at(o + i)[c] - z.at(o - i)[c];
        }
    }
    Ok(out)
}

/// (R Z)(x) = Z(x), x ≥ 0.
pub fn restrict(z: &Field) -> Result<Field> {
    require(z, Domain::Line, "restrict")?;
    let mut out = Field::half_line(z.n, z.h, z.npos);
    let o = z.origin();
    for i in 0..z.npos {
        out.at_mut(i).copy_from_slice(z.at(o + i));
    }
    Ok(out)
}

/// R†: zero extension to x < 0 (half weight at the origin node).
pub fn restrict_adjoint(y: &Field) -> Result<Field> {
    require(y, Domain::HalfLine, "restrict_adjoint")?;
    let mut out = Field::line(y.n, y.h, y.npos);
    let o = out.origin();
    for i in 0..y.npos {
        let s = if i == 0 { 0.5 } else { 1.0 };
        for (d, v) in out.at_mut(o + i).iter_mut().zip(y.at(i)) {
            *d = v * s;
        }
    }
    Ok(out)
}

/// Linear (non-circular) convolution out_j = Σ_l kern[j − l + m] y_l, for kernel
/// offsets −m..=m, computed by zero-padded FFT.
fn linear_convolve_many(kernels: &[&[C64]], m: usize, inputs: &[Vec<C64>], outputs_of: &[(usize, usize)], n_out: usize) -> Vec<Vec<C64>> {
    let len = inputs.first().map(|v| v.len()).unwrap_or(0);
    let size = (len + 2 * m + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let spec_in: Vec<Vec<C64>> = inputs
        .iter()
        .map(|y| {
            let mut buf = vec![C64::new(0.0, 0.0); size];
            buf[..len].copy_from_slice(y);
            fwd.process(&mut buf);
            buf
        })
        .collect();
    let spec_k: Vec<Vec<C64>> = kernels
        .iter()
        .map(|k| {
            let mut buf = vec![C64::new(0.0, 0.0); size];
            // offset d = j − l stored at index d mod size
            for (idx, v) in k.iter().enumerate() {
                let d = idx as isize - m as isize;
                buf[d.rem_euclid(size as isize) as usize] = *v;
            }
            fwd.process(&mut buf);
            buf
        })
        .collect();
    let mut outs = vec![vec![C64::new(0.0, 0.0); size]; n_out];
    for (kidx, &(o, i)) in outputs_of.iter().enumerate() {
        for q in 0..size {
            outs[o][q] += spec_k[kidx][q] * spec_in[i][q];
        }
    }
    outs.into_iter()
        .map(|mut b| {
            inv.process(&mut b);
            b.truncate(len);
            b.iter_mut().for_each(|z| *z /= size as f64);
            b
        })
        .collect()
}

/// Hilbert transform (1/π) PV∫ Y(y)/(x − y) dy of a line field.
///
/// Applied as the linear convolution with the band-limited kernel
/// (1 − cos πm)/(πm), which is the −i·sign(ξ) multiplier on the sampled spectrum;
/// the convolution is zero-padded so no periodic images enter.
pub fn hilbert(y: &Field) -> Result<Field> {
    require(y, Domain::Line, "hilbert")?;
    let frac = y.outer_mass_fraction();
    if frac > 0.01 {
        return Err(ScatterError::WindowTooSmall { fraction: frac });
    }
    Ok(hilbert_unchecked(y))
}

pub(crate) fn hilbert_unchecked(y: &Field) -> Field {
    let len = y.len();
    let m = len - 1;
    let kern: Vec<C64> = (0..=2 * m)
        .map(|idx| {
            let d = idx as isize - m as isize;
            if d % 2 != 0 {
                C64::new(2.0 / (std::f64::consts::PI * d as f64), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    let inputs: Vec<Vec<C64>> = (0..y.n).map(|c| y.component(c)).collect();
    let pairs: Vec<(usize, usize)> = (0..y.n).map(|c| (c, c)).collect();
    let kernels: Vec<&[C64]> = (0..y.n).map(|_| kern.as_slice()).collect();
    let outs = linear_convolve_many(&kernels, m, &inputs, &pairs, y.n);
    let mut out = y.zeros_like();
    for (c, o) in outs.iter().enumerate() {
        out.set_component(c, o);
    }
    out
}

/// Samples G(m h), m = −M..=M, of an n×n convolution kernel on the line.
#[derive(Debug, Clone)]
pub struct ConvKernel {
    pub n: usize,
    pub h: f64,
    pub half_len: usize,
    /// values[m + M] = G(m h)
    pub values: Vec<CMat>,
}

impl ConvKernel {
    pub fn new(h: f64, values: Vec<CMat>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(ScatterError::GridMismatch("convolution kernel needs odd length".into()));
        }
        let n = values[0].nrows();
        Ok(Self { n, h, half_len: values.len() / 2, values })
    }

    pub fn from_fn(n: usize, h: f64, half_len: usize, f: impl Fn(f64) -> CMat) -> Self {
        let values = (0..=2 * half_len).map(|i| f((i as f64 - half_len as f64) * h)).collect();
        Self { n, h, half_len, values }
    }

    pub fn zero(n: usize, h: f64) -> Self {
        Self { n, h, half_len: 0, values: vec![linalg::zeros(n)] }
    }

    /// G̃(s) = G(−s)†, the kernel of Q(G)†.
    pub fn adjoint(&self) -> Self {
        let values = self.values.iter().rev().map(|g| g.adjoint()).collect();
        Self { n: self.n, h: self.h, half_len: self.half_len, values }
    }

    /// Conjugation by a constant unitary: G ↦ M† G M.
    pub fn conjugated(&self, m: &CMat) -> Self {
        let values = self.values.iter().map(|g| m.adjoint() * g * m).collect();
        Self { n: self.n, h: self.h, half_len: self.half_len, values }
    }

    /// ∫|G| by the trapezoid rule.
    pub fn l1(&self) -> f64 {
        self.values.iter().map(linalg::op_norm).sum::<f64>() * self.h
    }
}

/// (Q(G)Y)(x) = ∫G(x − y)Y(y)dy by the trapezoid rule on the line grid.
pub fn convolve(g: &ConvKernel, y: &Field) -> Result<Field> {
    require(y, Domain::Line, "convolve")?;
    if (g.h - y.h).abs() > 1e-12 * y.h || g.n != y.n {
        return Err(ScatterError::GridMismatch("convolution kernel and field grids differ".into()));
    }
    let n = y.n;
    let flat: Vec<Vec<C64>> = (0..n * n)
        .map(|q| g.values.iter().map(|v| v[(q / n, q % n)] * y.h).collect())
        .collect();
    let kernels: Vec<&[C64]> = flat.iter().map(|v| v.as_slice()).collect();
    let inputs: Vec<Vec<C64>> = (0..n).map(|c| y.component(c)).collect();
    let pairs: Vec<(usize, usize)> = (0..n * n).map(|q| (q / n, q % n)).collect();
    let outs = linear_convolve_many(&kernels, g.half_len, &inputs, &pairs, n);
    let mut out = y.zeros_like();
    for (c, o) in outs.iter().enumerate() {
        out.set_component(c, o);
    }
    Ok(out)
}

/// Row and column Schur integrals sup_x ∫|K(x,y)|dy and sup_y ∫|K(x,y)|dx.
pub fn schur_values(kt: &KernelTable) -> (f64, f64) {
    let nodes = 2 * (kt.nv - 1) + 1;
    let mut rows = vec![0.0; kt.nv];
    let mut cols = vec![0.0; nodes];
    for j in 0..kt.nv {
        for l in j..=kt.row_end(j) {
            let v = linalg::op_norm(&kt.get(j, l)) * kt.dx;
            rows[j] += v;
            cols[l] += v;
        }
    }
    (rows.iter().cloned().fold(0.0, f64::max), cols.iter().cloned().fold(0.0, f64::max))
}

/// Quadrature factor for K(x_j, y_l): the jump at y = x gets half weight.
fn diag_factor(j: usize, l: usize) -> f64 {
    if l == j && j > 0 {
        0.5
    } else {
        1.0
    }
}

fn check_kernel_grid(kt: &KernelTable, y: &Field) -> Result<()> {
    require(y, Domain::HalfLine, "kernel_apply")?;
    if (kt.dx - y.h).abs() > 1e-12 * y.h || kt.n != y.n {
        return Err(ScatterError::GridMismatch(format!("kernel grid dx={} vs field h={}", kt.dx, y.h)));
    }
    Ok(())
}

/// (K(K)Y)(x) = ∫₀^∞ K(x,y)Y(y)dy.
pub fn kernel_apply(kt: &KernelTable, y: &Field) -> Result<Field> {
    check_kernel_grid(kt, y)?;
    let n = y.n;
    let mut out = y.zeros_like();
    let rows = kt.nv.min(y.npos);
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    for j in 0..rows {
        let mut acc = vec![C64::new(0.0, 0.0); n];
        for l in j..=kt.row_end(j).min(y.npos - 1) {
            let w = y.weight(l) * diag_factor(j, l);
            linalg::matvec_flat(n, kt.get_flat(j, l).unwrap(), y.at(l), &mut tmp);
            for c in 0..n {
                acc[c] += tmp[c] * w;
            }
        }
        out.at_mut(j).copy_from_slice(&acc);
    }
    Ok(out)
}

/// (K(K)†Y)(y) = ∫₀^y K(x,y)†Y(x)dx, the exact discrete adjoint of [`kernel_apply`].
pub fn kernel_apply_adjoint(kt: &KernelTable, y: &Field) -> Result<Field> {
    check_kernel_grid(kt, y)?;
    let n = y.n;
    let mut out = y.zeros_like();
    let rows = kt.nv.min(y.npos);
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    for j in 0..rows {
        let w = y.weight(j);
        for l in j..=kt.row_end(j).min(y.npos - 1) {
            linalg::adj_matvec_flat(n, kt.get_flat(j, l).unwrap(), y.at(j), &mut tmp);
            let f = w * diag_factor(j, l);
            let d = out.at_mut(l);
            for c in 0..n {
                d[c] += tmp[c] * f;
            }
        }
    }
    Ok(out)
}

/// Shared handle used by pipeline stages.
pub type SharedKernel = Arc<KernelTable>;
pub type SharedConv = Arc<ConvKernel>;

#[cfg(test)]
mod tests {
    use super::*;

    fn half(n: usize) -> Field {
        Field::from_fn(Domain::HalfLine, n, 0.05, 201, |x, o| {
            for (c, v) in o.iter_mut().enumerate() {
                *v = C64::new((-(x - 1.0 - c as f64).powi(2)).exp(), 0.3 * (-x * x).exp());
            }
        })
    }

    fn line(n: usize) -> Field {
        Field::from_fn(Domain::Line, n, 0.05, 201, |x, o| {
            for (c, v) in o.iter_mut().enumerate() {
                *v = C64::new((-(x + 0.5 * c as f64).powi(2)).exp(), (x - 1.0).sin() * (-x * x / 2.0).exp());
            }
        })
    }

    #[test]
    fn restrict_after_even_extension_is_identity() {
        let y = half(2);
        let back = restrict(&extend_even(&y).unwrap()).unwrap();
        assert!(back.distance(&y).unwrap() == 0.0);
    }

    #[test]
    fn odd_extension_of_constant_is_sign() {
        let y = Field::from_fn(Domain::HalfLine, 1, 0.1, 11, |_, o| o[0] = C64::new(1.0, 0.0));
        let z = extend_odd(&y).unwrap();
        for i in 0..z.len() {
            let x = z.x(i);
            let expect = if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 };
            assert_eq!(z.at(i)[0].re, expect);
        }
    }

    #[test]
    fn extension_adjoints_are_exact() {
        let a = half(2);
        let b = line(2);
        let lhs = extend_even(&a).unwrap().inner(&b);
        let rhs = a.inner(&extend_even_adjoint(&b).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
        let lhs = extend_odd(&a).unwrap().inner(&b);
        let rhs = a.inner(&extend_odd_adjoint(&b).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
        let lhs = restrict(&b).unwrap().inner(&a);
        let rhs = b.inner(&restrict_adjoint(&a).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn hilbert_of_lorentzian() {
        let y = Field::from_fn(Domain::Line, 1, 0.02, 50_001, |x, o| o[0] = C64::new(1.0 / (1.0 + x * x), 0.0));
        let hy = hilbert_unchecked(&y);
        for i in 0..hy.len() {
            let x = hy.x(i);
            if x.abs() <= 5.0 {
                assert!((hy.at(i)[0].re - x / (1.0 + x * x)).abs() < 2e-3, "x={x}");
            }
        }
    }

    #[test]
    fn hilbert_is_skew_and_squares_to_minus_one() {
        let y = Field::gaussian(Domain::Line, 0.05, 801, 0.0, 1.0, &[C64::new(1.0, 0.0)]);
        let hy = hilbert(&y).unwrap();
        let o = hy.origin();
        for i in 0..hy.npos {
            assert!((hy.at(o + i)[0] + hy.at(o - i)[0]).norm() < 1e-10);
        }
        let hhy = hilbert_unchecked(&hy);
        for i in 0..hhy.len() {
            if hhy.x(i).abs() <= 5.0 {
                assert!((hhy.at(i)[0] + y.at(i)[0]).norm() < 2e-2);
            }
        }
        let z = line(1).resized(801);
        let lhs = hy.inner(&z);
        let rhs = y.inner(&hilbert_unchecked(&z).scaled(C64::new(-1.0, 0.0)));
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn convolution_with_narrow_gaussian_is_near_identity() {
        let h = 0.01;
        let s = 0.02;
        let g = ConvKernel::from_fn(1, h, 200, |x| {
            linalg::scalar(1, C64::new((-(x * x) / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt()), 0.0))
        });
        let y = Field::gaussian(Domain::Line, h, 1001, 0.5, 1.0, &[C64::new(1.0, 0.0)]);
        let qy = convolve(&g, &y).unwrap();
        let err = qy.sub(&y).unwrap().norm_p(f64::INFINITY);
        assert!(err < 1e-2, "{err}");
        assert!(qy.norm_p(1.0) <= g.l1() * y.norm_p(1.0) * (1.0 + 1e-12));
        let z = line(1).resized(1001);
        let z = Field { h, ..z };
        let lhs = qy.inner(&z);
        let rhs = y.inner(&convolve(&g.adjoint(), &z).unwrap());
        assert!((lhs - rhs).norm() < 1e-10);
    }
}
