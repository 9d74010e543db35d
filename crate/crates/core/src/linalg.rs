//! Small dense complex matrix helpers built on nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn scalar(n: usize, s: C64) -> CMat {
    CMat::from_diagonal_element(n, n, s)
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    if m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Smallest singular value.
pub fn min_singular(m: &CMat) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Distance of `m` from the unitary group, measured as |m†m - I|.
pub fn unitarity_defect(m: &CMat) -> f64 {
    op_norm(&(m.adjoint() * m - eye(m.nrows())))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn sqrt_hpd(m: &CMat) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    if m.nrows() == 1 {
        let z = m[(0, 0)];
        if z.norm() == 0.0 {
            return None;
        }
        return Some(CMat::from_element(1, 1, z.inv()));
    }
    m.clone().try_inverse()
}

/// Block matrix from four equally sized blocks.
pub fn block2(a11: &CMat, a12: &CMat, a21: &CMat, a22: &CMat) -> CMat {
    let n = a11.nrows();
    let mut out = CMat::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a11);
    out.view_mut((0, n), (n, n)).copy_from(a12);
    out.view_mut((n, 0), (n, n)).copy_from(a21);
    out.view_mut((n, n), (n, n)).copy_from(a22);
    out
}

/// Extract block (bi, bj) of size n.
pub fn block(m: &CMat, n: usize, bi: usize, bj: usize) -> CMat {
    m.view((bi * n, bj * n), (n, n)).into_owned()
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows[0].len();
    CMat::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
}

/// Polynomial interpolation through `(xs, ys)` evaluated at 0 (Neville's scheme),
/// applied entrywise to matrices.
pub fn neville_at_zero(xs: &[f64], ys: &[CMat]) -> CMat {
    let mut p: Vec<CMat> = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let xi = xs[i];
            let xj = xs[i + level];
            let num = p[i + 1].scale(xi) - p[i].scale(xj);
            p[i] = num.unscale(xi - xj);
        }
    }
    p.swap_remove(0)
}

/// Write a matrix in row-major order into a flat slice.
pub fn to_flat(m: &CMat, out: &mut [C64]) {
    let n = m.ncols();
    for i in 0..m.nrows() {
        for j in 0..n {
            out[i * n + j] = m[(i, j)];
        }
    }
}

pub fn from_flat(n: usize, data: &[C64]) -> CMat {
    CMat::from_fn(n, n, |i, j| data[i * n + j])
}

/// Row-major small matrix product `out = a * b` on flat n×n slices.
#[inline]
pub fn matmul_flat(n: usize, a: &[C64], b: &[C64], out: &mut [C64]) {
    for i in 0..n {
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for l in 0..n {
                s += a[i * n + l] * b[l * n + j];
            }
            out[i * n + j] = s;
        }
    }
}

/// Row-major product `out = a * v` with v an n-vector.
#[inline]
pub fn matvec_flat(n: usize, a: &[C64], v: &[C64], out: &mut [C64]) {
    for i in 0..n {
        let mut s = C64::new(0.0, 0.0);
        for l in 0..n {
            s += a[i * n + l] * v[l];
        }
        out[i] = s;
    }
}

/// Row-major product `out = a† * v` with v an n-vector.
#[inline]
pub fn adj_matvec_flat(n: usize, a: &[C64], v: &[C64], out: &mut [C64]) {
    for i in 0..n {
        let mut s = C64::new(0.0, 0.0);
        for l in 0..n {
            s += a[l * n + i].conj() * v[l];
        }
        out[i] = s;
    }
}

/// Haar-like random unitary from a deterministic generator (QR of a Gaussian matrix).
pub fn random_unitary(n: usize, next: &mut impl FnMut() -> f64) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| C64::new(next(), next()));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            out[(i, j)] = q[(i, j)] * ph;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_recovers_polynomial_value() {
        let xs = [0.1, -0.1, 0.3, -0.3, 0.5, -0.5];
        let ys: Vec<CMat> = xs
            .iter()
            .map(|&x: &f64| scalar(1, C64::new(2.0 + x - 3.0 * x * x + x.powi(5), x)))
            .collect();
        let v = neville_at_zero(&xs, &ys);
        assert!((v[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let s = sqrt_hpd(&m);
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = from_real_rows(&[&[-4.0, 0.0], &[0.0, 3.0]]);
        assert!((op_norm(&m) - 4.0).abs() < 1e-12);
        assert!((min_singular(&m) - 3.0).abs() < 1e-12);
    }
}
