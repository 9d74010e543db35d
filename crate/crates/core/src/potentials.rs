//! Matrix-valued potentials on the half line and the line, with decay moments.

use crate::error::{Result, ScatterError};
use crate::linalg::{self, CMat, C64};

/// Tolerance used when matching cell endpoints to grid nodes.
const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    StepCells,
    UniformSamples,
}

/// A constant matrix value on the interval `[a, b)`.
#[derive(Debug, Clone)]
pub struct Cell {
    pub a: f64,
    pub b: f64,
    pub value: CMat,
    norm: f64,
}

impl Cell {
    pub fn new(a: f64, b: f64, value: CMat) -> Self {
        let norm = linalg::op_norm(&value);
        Self { a, b, value, norm }
    }

    /// Operator norm of the cell value.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.b <= self.a
    }
}

/// Piecewise-constant n×n potential on `[0, X_V)`; zero beyond `support`.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub n: usize,
    pub kind: PotentialKind,
    pub cells: Vec<Cell>,
    pub support: f64,
}

#[derive(Debug, Clone)]
pub struct PotentialDiagnostics {
    pub max_hermitian_defect: f64,
    pub l1: f64,
    pub l1_1: f64,
}

/// Tail moments σ(x) = ∫ₓ^∞ |V| and σ₁(x) = ∫ₓ^∞ y|V| tabulated on a grid.
#[derive(Debug, Clone)]
pub struct Moments {
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    pub sigma1: Vec<f64>,
}

fn check_cells(n: usize, cells: &[Cell], lower: f64) -> Result<()> {
    let mut prev = lower;
    for c in cells {
        if c.value.nrows() != n || c.value.ncols() != n {
            return Err(ScatterError::DimensionMismatch { expected: n, found: c.value.nrows() });
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(c.b > c.a) {
            return Err(ScatterError::InvalidPotential(format!("empty interval [{}, {})", c.a, c.b)));
        }
        if c.a < prev - ALIGN_TOL {
            return Err(ScatterError::InvalidPotential(format!(
                "interval [{}, {}) overlaps or is out of order",
                c.a, c.b
            )));
        }
        if !c.a.is_finite() || !c.b.is_finite() {
            return Err(ScatterError::InvalidPotential("non-finite interval".into()));
        }
        prev = c.b;
    }
    Ok(())
}

impl PotentialSpec {
    /// Build a step-cell potential; cells are sorted by left endpoint.
    pub fn new(n: usize, mut cells: Vec<Cell>) -> Result<Self> {
        cells.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        check_cells(n, &cells, 0.0)?;
        let support = cells.last().map(|c| c.b).unwrap_or(0.0);
        Ok(Self { n, kind: PotentialKind::StepCells, cells, support })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, kind: PotentialKind::StepCells, cells: Vec::new(), support: 0.0 }
    }

    /// Constant matrix `value` on `[a, b)`.
    pub fn step(value: CMat, a: f64, b: f64) -> Result<Self> {
        let n = value.nrows();
        Self::new(n, vec![Cell::new(a, b, value)])
    }

    /// Scalar constant `v` on `[a, b)`.
    pub fn scalar_step(v: f64, a: f64, b: f64) -> Self {
        Self::step(linalg::scalar(1, C64::new(v, 0.0)), a, b).expect("valid scalar step")
    }

    /// Samples `V(x_j)` at cell midpoints `(j + 1/2) dx` turned into step cells.
    pub fn from_samples(n: usize, dx: f64, samples: Vec<CMat>) -> Result<Self> {
        let cells = samples
            .into_iter()
            .enumerate()
            .map(|(j, v)| Cell::new(j as f64 * dx, (j + 1) as f64 * dx, v))
            .collect();
        let mut spec = Self::new(n, cells)?;
        spec.kind = PotentialKind::UniformSamples;
        Ok(spec)
    }

    /// Scalar `amplitude * exp(-rate x)` sampled at resolution `dx` and truncated
    /// where the first moment of the tail drops below `1e-10`.
    pub fn sampled_exponential(amplitude: f64, rate: f64, dx: f64) -> Result<Self> {
        // σ₁(X) = |a| e^{-rX}(X/r + 1/r²)
        let mut xcut = 1.0;
        while amplitude.abs() * (-rate * xcut).exp() * (xcut / rate + 1.0 / (rate * rate)) > 1e-10 {
            xcut += 1.0;
        }
        let m = (xcut / dx).round() as usize;
        let samples = (0..m)
            .map(|j| {
                let x = (j as f64 + 0.5) * dx;
                linalg::scalar(1, C64::new(amplitude * (-rate * x).exp(), 0.0))
            })
            .collect();
        Self::from_samples(1, dx, samples)
    }

    /// Value at `x` (right-continuous; zero outside the cells).
    pub fn value_at(&self, x: f64) -> CMat {
        for c in &self.cells {
            if x >= c.a && x < c.b {
                return c.value.clone();
            }
        }
        linalg::zeros(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.norm == 0.0)
    }

    /// ∫ₓ^∞ V(y) dy as a matrix.
    pub fn tail_integral(&self, x: f64) -> CMat {
        let mut q = linalg::zeros(self.n);
        for c in &self.cells {
            let lo = c.a.max(x);
            if c.b > lo {
                q += c.value.scale(c.b - lo);
            }
        }
        q
    }

    /// ∫ₓ^∞ V(y) Q(y) dy with Q the tail integral.
    pub fn tail_integral_vq(&self, x: f64) -> CMat {
        let mut w = linalg::zeros(self.n);
        for c in &self.cells {
            let lo = c.a.max(x);
            if c.b > lo {
                let len = c.b - lo;
                let qb = self.tail_integral(c.b);
                w += &c.value * qb * C64::new(len, 0.0) + &c.value * &c.value * C64::new(0.5 * len * len, 0.0);
            }
        }
        w
    }

    /// σ(x) = ∫ₓ^∞ |V(y)| dy.
    pub fn sigma(&self, x: f64) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let lo = c.a.max(x);
                if c.b > lo { c.norm * (c.b - lo) } else { 0.0 }
            })
            .sum()
    }

    /// σ₁(x) = ∫ₓ^∞ y |V(y)| dy.
    pub fn sigma1(&self, x: f64) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let lo = c.a.max(x);
                if c.b > lo { c.norm * 0.5 * (c.b * c.b - lo * lo) } else { 0.0 }
            })
            .sum()
    }

    /// Check that every cell endpoint is a multiple of `dx`.
    pub fn check_alignment(&self, dx: f64) -> Result<()> {
        for c in &self.cells {
            for e in [c.a, c.b] {
                let r = e / dx;
                if (r - r.round()).abs() > ALIGN_TOL * r.abs().max(1.0) {
                    return Err(ScatterError::GridMismatch(format!(
                        "cell endpoint {e} is not a multiple of dx = {dx}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Index of the cell containing `[x, x + h)` when it lies inside one cell.
    pub fn cell_index_at(&self, x: f64) -> Option<usize> {
        self.cells.iter().position(|c| x >= c.a - ALIGN_TOL && x < c.b - ALIGN_TOL)
    }

    /// Block-diagonal embedding diag(self, other).
    pub fn block_diag(&self, other: &PotentialSpec) -> Result<PotentialSpec> {
        let mut edges: Vec<f64> = Vec::new();
        for c in self.cells.iter().chain(other.cells.iter()) {
            edges.push(c.a);
            edges.push(c.b);
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup_by(|a, b| (*a - *b).abs() < ALIGN_TOL);
        let n = self.n + other.n;
        let mut cells = Vec::new();
        for w in edges.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let v1 = self.value_at(mid);
            let v2 = other.value_at(mid);
            let mut v = linalg::zeros(n);
            v.view_mut((0, 0), (self.n, self.n)).copy_from(&v1);
            v.view_mut((self.n, self.n), (other.n, other.n)).copy_from(&v2);
            if linalg::max_abs(&v) > 0.0 {
                cells.push(Cell::new(w[0], w[1], v));
            }
        }
        PotentialSpec::new(n, cells)
    }
}

/// Validate Hermiticity and report the L¹ and L¹₁ norms.
pub fn validate_potential(spec: &PotentialSpec) -> Result<PotentialDiagnostics> {
    let mut worst = 0.0f64;
    for c in &spec.cells {
        let d = linalg::hermitian_defect(&c.value);
        if d > 1e-10 {
            return Err(ScatterError::NonHermitian { x: c.a, defect: d });
        }
        worst = worst.max(d);
    }
    Ok(PotentialDiagnostics {
        max_hermitian_defect: worst,
        l1: l1gamma_norm(spec, 0.0),
        l1_1: l1gamma_norm(spec, 1.0),
    })
}

/// Tabulate σ and σ₁ on the grid `0, dx, ..., xmax`.
pub fn moments(spec: &PotentialSpec, xmax: f64, dx: f64) -> Moments {
    let m = (xmax / dx).round() as usize;
    let x: Vec<f64> = (0..=m).map(|j| j as f64 * dx).collect();
    let sigma = x.iter().map(|&x| spec.sigma(x)).collect();
    let sigma1 = x.iter().map(|&x| spec.sigma1(x)).collect();
    Moments { x, sigma, sigma1 }
}

/// ∫(1+x)^γ |V(x)| dx over the half line.
pub fn l1gamma_norm(spec: &PotentialSpec, gamma: f64) -> f64 {
    let g1 = gamma + 1.0;
    spec.cells
        .iter()
        .map(|c| c.norm * ((1.0 + c.b).powf(g1) - (1.0 + c.a).powf(g1)) / g1)
        .sum()
}

/// Piecewise-constant n×n potential on the whole line.
#[derive(Debug, Clone)]
pub struct LinePotential {
    pub n: usize,
    pub cells: Vec<Cell>,
}

impl LinePotential {
    pub fn new(n: usize, mut cells: Vec<Cell>) -> Result<Self> {
        cells.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        check_cells(n, &cells, f64::NEG_INFINITY)?;
        for c in &cells {
            if c.a < 0.0 && c.b > 0.0 {
                return Err(ScatterError::InvalidPotential(
                    "line cells must not straddle the origin".into(),
                ));
            }
        }
        Ok(Self { n, cells })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, cells: Vec::new() }
    }

    pub fn value_at(&self, x: f64) -> CMat {
        for c in &self.cells {
            if x >= c.a && x < c.b {
                return c.value.clone();
            }
        }
        linalg::zeros(self.n)
    }

    /// Smallest X with the support inside [-X, X].
    pub fn extent(&self) -> f64 {
        self.cells.iter().map(|c| c.a.abs().max(c.b.abs())).fold(0.0, f64::max)
    }

    pub fn l1gamma_norm(&self, gamma: f64) -> f64 {
        let g1 = gamma + 1.0;
        self.cells
            .iter()
            .map(|c| {
                let (lo, hi) = if c.a >= 0.0 { (c.a, c.b) } else { (-c.b, -c.a) };
                c.norm * ((1.0 + hi).powf(g1) - (1.0 + lo).powf(g1)) / g1
            })
            .sum()
    }
}

/// Split a line potential into V₊(x) = 𝒱(x) and V₋(x) = 𝒱(−x), x > 0.
pub fn fold_line_potential(vline: &LinePotential) -> Result<(PotentialSpec, PotentialSpec)> {
    for c in &vline.cells {
        let d = linalg::hermitian_defect(&c.value);
        if d > 1e-10 {
            return Err(ScatterError::NonHermitian { x: c.a, defect: d });
        }
    }
    let plus: Vec<Cell> = vline
        .cells
        .iter()
        .filter(|c| c.a >= 0.0)
        .map(|c| Cell::new(c.a, c.b, c.value.clone()))
        .collect();
    let minus: Vec<Cell> = vline
        .cells
        .iter()
        .filter(|c| c.b <= 0.0)
        .map(|c| Cell::new(-c.b, -c.a, c.value.clone()))
        .collect();
    Ok((PotentialSpec::new(vline.n, plus)?, PotentialSpec::new(vline.n, minus)?))
}

/// Inverse of [`fold_line_potential`].
pub fn unfold_potentials(vplus: &PotentialSpec, vminus: &PotentialSpec) -> Result<LinePotential> {
    let mut cells: Vec<Cell> = vplus.cells.iter().map(|c| Cell::new(c.a, c.b, c.value.clone())).collect();
    cells.extend(vminus.cells.iter().map(|c| Cell::new(-c.b, -c.a, c.value.clone())));
    LinePotential::new(vplus.n, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_norms_and_moments() {
        let v = PotentialSpec::scalar_step(1.0, 0.0, 1.0);
        let d = validate_potential(&v).unwrap();
        assert!((d.l1_1 - 1.5).abs() < 1e-14);
        assert!((l1gamma_norm(&v, 3.0) - 3.75).abs() < 1e-13);
        assert!((v.sigma(0.0) - 1.0).abs() < 1e-14);
        assert!((v.sigma1(0.0) - 0.5).abs() < 1e-14);
        assert!((v.sigma(0.5) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_potential_is_valid() {
        let v = PotentialSpec::zero(2);
        let d = validate_potential(&v).unwrap();
        assert_eq!(d.l1_1, 0.0);
        let m = moments(&v, 2.0, 0.5);
        assert!(m.sigma.iter().chain(&m.sigma1).all(|&s| s == 0.0));
    }

    #[test]
    fn anti_hermitian_rejected() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        );
        let v = PotentialSpec::step(m, 0.0, 1.0).unwrap();
        assert!(matches!(validate_potential(&v), Err(ScatterError::NonHermitian { .. })));
    }

    #[test]
    fn fold_reflects_support() {
        let line = LinePotential::new(1, vec![Cell::new(-1.0, 0.0, linalg::eye(1))]).unwrap();
        let (p, m) = fold_line_potential(&line).unwrap();
        assert!(p.is_zero());
        assert_eq!(m.cells.len(), 1);
        assert_eq!((m.cells[0].a, m.cells[0].b), (0.0, 1.0));
    }

    #[test]
    fn tail_vq_matches_half_square_for_scalar() {
        let v = PotentialSpec::scalar_step(1.0, 0.0, 1.0);
        for x in [0.0, 0.3, 0.9] {
            let w = v.tail_integral_vq(x)[(0, 0)].re;
            assert!((w - 0.5 * (1.0 - x) * (1.0 - x)).abs() < 1e-14);
        }
    }
}
