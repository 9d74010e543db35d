//! Self-adjoint boundary conditions −B†Y(0) + A†Y′(0) = 0 and their diagonal form.

use std::f64::consts::PI;

use crate::error::{Result, ScatterError};
use crate::linalg::{self, CMat, C64, I};

/// Boundary matrices (A, B).
#[derive(Debug, Clone)]
pub struct BoundaryPair {
    pub n: usize,
    pub a: CMat,
    pub b: CMat,
}

#[derive(Debug, Clone)]
pub struct BoundaryDiagnostics {
    /// ‖B†A − A†B‖.
    pub selfadjoint_defect: f64,
    /// Smallest eigenvalue of A†A + B†B.
    pub min_eig: f64,
}

/// Diagonalized boundary condition: A = M Ã T₁ M† T₂, B = M B̃ T₁ M† T₂ with
/// Ã = −diag(sin θ), B̃ = diag(cos θ).
#[derive(Debug, Clone)]
pub struct DiagonalForm {
    pub thetas: Vec<f64>,
    pub m: CMat,
    pub t1: CMat,
    pub t2: CMat,
    pub n_dirichlet: usize,
    pub n_neumann: usize,
    pub n_mixed: usize,
    /// Max entry error of the reconstructed (A, B).
    pub reconstruction_defect: f64,
}

const CLASS_TOL: f64 = 1e-8;

impl BoundaryPair {
    pub fn new(a: CMat, b: CMat) -> Result<Self> {
        let n = a.nrows();
        for m in [&a, &b] {
            if m.nrows() != n || m.ncols() != n {
                return Err(ScatterError::DimensionMismatch { expected: n, found: m.nrows() });
            }
        }
        Ok(Self { n, a, b })
    }

    pub fn neumann(n: usize) -> Self {
        Self { n, a: linalg::eye(n), b: linalg::zeros(n) }
    }

    pub fn dirichlet(n: usize) -> Self {
        Self { n, a: linalg::zeros(n), b: -linalg::eye(n) }
    }

    /// Scalar condition cos θ Y(0) + sin θ Y′(0) = 0, i.e. A = −sin θ, B = cos θ.
    pub fn robin(theta: f64) -> Self {
        Self::robin_diag(&[theta])
    }

    /// Diagonal pair A = −diag(sin θ_j), B = diag(cos θ_j).
    pub fn robin_diag(thetas: &[f64]) -> Self {
        let n = thetas.len();
        let a = CMat::from_fn(n, n, |i, j| if i == j { C64::new(-thetas[i].sin(), 0.0) } else { C64::new(0.0, 0.0) });
        let b = CMat::from_fn(n, n, |i, j| if i == j { C64::new(thetas[i].cos(), 0.0) } else { C64::new(0.0, 0.0) });
        Self { n, a, b }
    }

    /// Right-multiply both matrices by an invertible T; the condition is unchanged.
    pub fn transformed(&self, t: &CMat) -> Self {
        Self { n: self.n, a: &self.a * t, b: &self.b * t }
    }

    /// Residual −B†Y(0) + A†Y′(0) for matrix or vector data.
    pub fn residual(&self, y0: &CMat, y0p: &CMat) -> CMat {
        -(self.b.adjoint() * y0) + self.a.adjoint() * y0p
    }
}

/// Check B†A = A†B and A†A + B†B > 0.
pub fn validate_boundary(bp: &BoundaryPair) -> Result<BoundaryDiagnostics> {
    let diag = boundary_diagnostics(bp);
    let scale = 1.0f64.max(linalg::op_norm(&bp.a)).max(linalg::op_norm(&bp.b));
    if diag.selfadjoint_defect > 1e-10 * scale * scale {
        return Err(ScatterError::NotSelfAdjointPair { defect: diag.selfadjoint_defect });
    }
    if diag.min_eig <= 1e-10 {
        return Err(ScatterError::DegeneratePair { min_eig: diag.min_eig });
    }
    Ok(diag)
}

pub fn boundary_diagnostics(bp: &BoundaryPair) -> BoundaryDiagnostics {
    let ba = bp.b.adjoint() * &bp.a;
    let ab = bp.a.adjoint() * &bp.b;
    let gram = bp.a.adjoint() * &bp.a + bp.b.adjoint() * &bp.b;
    let (vals, _) = linalg::herm_eig(&gram);
    BoundaryDiagnostics { selfadjoint_defect: linalg::op_norm(&(ba - ab)), min_eig: vals[0] }
}

/// The unitary U = (B − iA)(A†A + B†B)^{-1}(B† − iA†) with eigenvalues e^{2iθ_j}.
pub fn boundary_unitary(bp: &BoundaryPair) -> Result<CMat> {
    let gram = bp.a.adjoint() * &bp.a + bp.b.adjoint() * &bp.b;
    let e = linalg::sqrt_hpd(&gram);
    let e_inv = linalg::inverse(&e).ok_or(ScatterError::DegeneratePair { min_eig: 0.0 })?;
    let e_inv2 = &e_inv * &e_inv;
    let left = &bp.b - bp.a.scale(1.0) * I;
    let right = bp.b.adjoint() - bp.a.adjoint() * I;
    Ok(left * e_inv2 * right)
}

/// Eigen-decomposition of a unitary matrix through the commuting Hermitian parts
/// (U + U†)/2 and (U − U†)/2i. Returns eigenvalues and orthonormal eigenvectors.
pub fn unitary_eig(u: &CMat) -> (Vec<C64>, CMat) {
    let n = u.nrows();
    let h1 = (u + u.adjoint()).scale(0.5);
    let h2 = (u - u.adjoint()) * C64::new(0.0, -0.5);
    let (vals, vecs) = linalg::herm_eig(&h1);
    let mut out = CMat::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end] - vals[start]).abs() < 1e-8 {
            end += 1;
        }
        let sub = vecs.columns(start, end - start).into_owned();
        let restricted = sub.adjoint() * &h2 * &sub;
        let (_, rot) = linalg::herm_eig(&restricted);
        let rotated = &sub * rot;
        for j in 0..(end - start) {
            out.set_column(start + j, &rotated.column(j));
        }
        start = end;
    }
    let lambdas = (0..n)
        .map(|j| {
            let v = out.column(j);
            (v.adjoint() * u * v)[(0, 0)]
        })
        .collect();
    (lambdas, out)
}

/// θ ∈ (0, π] from an eigenvalue e^{2iθ}.
pub fn theta_from_eigenvalue(lambda: C64) -> f64 {
    let mut arg = lambda.arg();
    if arg <= 1e-12 {
        arg += 2.0 * PI;
    }
    0.5 * arg
}

/// Diagonalize a validated pair.
pub fn diagonalize(bp: &BoundaryPair) -> Result<DiagonalForm> {
    validate_boundary(bp)?;
    let n = bp.n;
    let u = boundary_unitary(bp)?;
    let (lambdas, m) = unitary_eig(&u);
    let thetas: Vec<f64> = lambdas.iter().map(|&l| theta_from_eigenvalue(l)).collect();
    let t1 = CMat::from_fn(n, n, |i, j| if i == j { C64::new(0.0, thetas[i]).exp() } else { C64::new(0.0, 0.0) });
    let t2 = &bp.b + bp.a.clone() * I;
    let (at, bt) = tilde_matrices(&thetas);
    let a_rec = &m * &at * &t1 * m.adjoint() * &t2;
    let b_rec = &m * &bt * &t1 * m.adjoint() * &t2;
    let reconstruction_defect = linalg::max_abs(&(a_rec - &bp.a)).max(linalg::max_abs(&(b_rec - &bp.b)));
    let n_dirichlet = thetas.iter().filter(|&&t| (t - PI).abs() < CLASS_TOL).count();
    let n_neumann = thetas.iter().filter(|&&t| (t - PI / 2.0).abs() < CLASS_TOL).count();
    Ok(DiagonalForm {
        n_mixed: n - n_dirichlet - n_neumann,
        thetas,
        m,
        t1,
        t2,
        n_dirichlet,
        n_neumann,
        reconstruction_defect,
    })
}

/// Ã = −diag(sin θ), B̃ = diag(cos θ).
pub fn tilde_matrices(thetas: &[f64]) -> (CMat, CMat) {
    let n = thetas.len();
    let at = CMat::from_fn(n, n, |i, j| if i == j { C64::new(-thetas[i].sin(), 0.0) } else { C64::new(0.0, 0.0) });
    let bt = CMat::from_fn(n, n, |i, j| if i == j { C64::new(thetas[i].cos(), 0.0) } else { C64::new(0.0, 0.0) });
    (at, bt)
}

/// Point-interaction matrices A = [[0, I], [0, I]], B = [[−I, Λ], [I, 0]].
pub fn line_interaction_matrices(n: usize, lambda: &CMat) -> Result<BoundaryPair> {
    if lambda.nrows() != n || lambda.ncols() != n {
        return Err(ScatterError::DimensionMismatch { expected: n, found: lambda.nrows() });
    }
    let defect = linalg::hermitian_defect(lambda);
    if defect > 1e-12 {
        return Err(ScatterError::NonHermitianCoupling { defect });
    }
    let z = linalg::zeros(n);
    let id = linalg::eye(n);
    let a = linalg::block2(&z, &id, &z, &id);
    let b = linalg::block2(&(-&id), lambda, &id, &z);
    Ok(BoundaryPair { n: 2 * n, a, b })
}

/// The explicit unitary whose first n columns are (e_j − e_{j+n})/√2 and last n
/// columns (e_j + e_{j+n})/√2.
pub fn line_m1(n: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMat::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(j, j)] = C64::new(s, 0.0);
        m[(j + n, j)] = C64::new(-s, 0.0);
        m[(j, j + n)] = C64::new(s, 0.0);
        m[(j + n, j + n)] = C64::new(s, 0.0);
    }
    m
}

/// True iff no channel carries a Dirichlet condition, which is when S∞ = I.
pub fn predicted_s_infinity_identity(df: &DiagonalForm) -> bool {
    df.n_dirichlet == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumann_and_dirichlet_classify() {
        let d = diagonalize(&BoundaryPair::neumann(2)).unwrap();
        assert_eq!(d.n_neumann, 2);
        assert!(predicted_s_infinity_identity(&d));
        let d = diagonalize(&BoundaryPair::dirichlet(1)).unwrap();
        assert_eq!(d.n_dirichlet, 1);
        assert!(!predicted_s_infinity_identity(&d));
    }

    #[test]
    fn skew_pair_rejected() {
        let bp = BoundaryPair::new(linalg::eye(1), linalg::scalar(1, I)).unwrap();
        assert!(matches!(validate_boundary(&bp), Err(ScatterError::NotSelfAdjointPair { .. })));
    }

    #[test]
    fn robin_angle_recovered() {
        let theta = (1.0f64 / 1.0f64.tanh()).atan();
        let d = diagonalize(&BoundaryPair::robin(theta)).unwrap();
        assert!((d.thetas[0] - theta).abs() < 1e-12);
        assert!((d.m[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(d.reconstruction_defect < 1e-12);
    }

    #[test]
    fn line_matrices_lambda_zero() {
        let bp = line_interaction_matrices(1, &linalg::zeros(1)).unwrap();
        let d = diagonalize(&bp).unwrap();
        let mut th = d.thetas.clone();
        th.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((th[0] - PI / 2.0).abs() < 1e-12 && (th[1] - PI).abs() < 1e-12);
        let m1 = line_m1(3);
        let z = linalg::zeros(3);
        let id = linalg::eye(3);
        let swap = linalg::block2(&z, &(-&id), &(-&id), &z);
        let d = m1.adjoint() * swap * &m1;
        for i in 0..6 {
            let expect = if i < 3 { 1.0 } else { -1.0 };
            assert!((d[(i, i)].re - expect).abs() < 1e-12);
        }
        assert!(linalg::max_abs(&(d.clone() - CMat::from_diagonal(&d.diagonal()))) < 1e-12);
    }
}
