//! Wave operators W± on the half line: the stationary formula, the Hilbert-transform
//! decomposition, the four-term form with Q(P±), their adjoints, the time-limit
//! check, the six-term split and Lᵖ ratio probes.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, ScatterError};
pub use crate::field::{
    convolve, extend_even, extend_even_adjoint, extend_odd, extend_odd_adjoint, hilbert, kernel_apply, kernel_apply_adjoint,
    restrict, restrict_adjoint, schur_values, ConvKernel, Domain, Field,
};
use crate::jost::KernelTable;
use crate::linalg::{self, CMat, C64, I};
use crate::potentials::PotentialSpec;
use crate::scattering::{self, ScatteringProblem};
use crate::spectral::{self, PhysicalSolutionTable, Sign, SpectralFunction};

/// Tolerance on ‖S(0) − I‖ and ‖S∞ − I‖ for the four-term form.
pub const HYPOTHESIS_TOL: f64 = 1e-3;

pub type MapFn = Arc<dyn Fn(&Field) -> Result<Field> + Send + Sync>;

/// One linear stage of an [`OperatorPipeline`].
#[derive(Clone)]
pub enum Stage {
    ExtendEven,
    ExtendOdd,
    Restrict,
    ExtendEvenAdjoint,
    ExtendOddAdjoint,
    RestrictAdjoint,
    Hilbert,
    Convolve(Arc<ConvKernel>),
    Kernel(Arc<KernelTable>),
    KernelAdjoint(Arc<KernelTable>),
    Scale(C64),
    Matrix(CMat),
    Identity,
    Sum(Vec<OperatorPipeline>),
    /// An opaque map on a fixed domain with its adjoint.
    Map { name: String, domain: (Domain, Domain), forward: MapFn, adjoint: MapFn },
}

impl std::fmt::Debug for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Convolve(g) => write!(f, "Convolve(len {})", g.values.len()),
            Stage::Kernel(_) => write!(f, "Kernel"),
            Stage::KernelAdjoint(_) => write!(f, "KernelAdjoint"),
            Stage::Scale(s) => write!(f, "Scale({s})"),
            Stage::Matrix(_) => write!(f, "Matrix"),
            Stage::Sum(b) => f.debug_list().entries(b.iter()).finish(),
            Stage::Map { name, .. } => write!(f, "Map({name})"),
            Stage::ExtendEven => write!(f, "ExtendEven"),
            Stage::ExtendOdd => write!(f, "ExtendOdd"),
            Stage::Restrict => write!(f, "Restrict"),
            Stage::ExtendEvenAdjoint => write!(f, "ExtendEvenAdjoint"),
            Stage::ExtendOddAdjoint => write!(f, "ExtendOddAdjoint"),
            Stage::RestrictAdjoint => write!(f, "RestrictAdjoint"),
            Stage::Hilbert => write!(f, "Hilbert"),
            Stage::Identity => write!(f, "Identity"),
        }
    }
}

impl Stage {
    /// (input, output) domain, or None for domain-preserving stages.
    fn domains(&self) -> Option<(Domain, Domain)> {
        use Domain::*;
        match self {
            Stage::ExtendEven | Stage::ExtendOdd | Stage::RestrictAdjoint => Some((HalfLine, Line)),
            Stage::Restrict | Stage::ExtendEvenAdjoint | Stage::ExtendOddAdjoint => Some((Line, HalfLine)),
            Stage::Hilbert | Stage::Convolve(_) => Some((Line, Line)),
            Stage::Kernel(_) | Stage::KernelAdjoint(_) => Some((HalfLine, HalfLine)),
            Stage::Sum(b) => b.first().map(|p| (p.input, p.output)),
            Stage::Map { domain, .. } => Some(*domain),
            Stage::Scale(_) | Stage::Matrix(_) | Stage::Identity => None,
        }
    }

    fn apply(&self, y: &Field) -> Result<Field> {
        match self {
            Stage::ExtendEven => extend_even(y),
            Stage::ExtendOdd => extend_odd(y),
            Stage::Restrict => restrict(y),
            Stage::ExtendEvenAdjoint => extend_even_adjoint(y),
            Stage::ExtendOddAdjoint => extend_odd_adjoint(y),
            Stage::RestrictAdjoint => restrict_adjoint(y),
            Stage::Hilbert => hilbert(y),
            Stage::Convolve(g) => convolve(g, y),
            Stage::Kernel(k) => kernel_apply(k, y),
            Stage::KernelAdjoint(k) => kernel_apply_adjoint(k, y),
            Stage::Scale(s) => Ok(y.scaled(*s)),
            Stage::Matrix(m) => y.apply_matrix(m),
            Stage::Identity => Ok(y.clone()),
            Stage::Sum(branches) => {
                let outs: Vec<Result<Field>> = branches.par_iter().map(|b| b.apply(y)).collect();
                let mut it = outs.into_iter();
                let mut acc = it.next().ok_or_else(|| ScatterError::PipelineDomain("empty sum".into()))??;
                for o in it {
                    acc = acc.add(&o?)?;
                }
                Ok(acc)
            }
            Stage::Map { forward, .. } => forward(y),
        }
    }

    fn adjoint(&self) -> Stage {
        match self {
            Stage::ExtendEven => Stage::ExtendEvenAdjoint,
            Stage::ExtendOdd => Stage::ExtendOddAdjoint,
            Stage::Restrict => Stage::RestrictAdjoint,
            Stage::ExtendEvenAdjoint => Stage::ExtendEven,
            Stage::ExtendOddAdjoint => Stage::ExtendOdd,
            Stage::RestrictAdjoint => Stage::Restrict,
            Stage::Hilbert => Stage::Sum(vec![OperatorPipeline {
                stages: vec![Stage::Hilbert, Stage::Scale(C64::new(-1.0, 0.0))],
                input: Domain::Line,
                output: Domain::Line,
            }]),
            Stage::Convolve(g) => Stage::Convolve(Arc::new(g.adjoint())),
            Stage::Kernel(k) => Stage::KernelAdjoint(k.clone()),
            Stage::KernelAdjoint(k) => Stage::Kernel(k.clone()),
            Stage::Scale(s) => Stage::Scale(s.conj()),
            Stage::Matrix(m) => Stage::Matrix(m.adjoint()),
            Stage::Identity => Stage::Identity,
            Stage::Sum(b) => Stage::Sum(b.iter().map(|p| p.adjoint()).collect()),
            Stage::Map { name, domain, forward, adjoint } => Stage::Map {
                name: format!("{name}†"),
                domain: (domain.1, domain.0),
                forward: adjoint.clone(),
                adjoint: forward.clone(),
            },
        }
    }
}

/// A linear operator assembled from [`Stage`]s, applied first to last, with the
/// ℝ/ℝ⁺ domain of every junction checked when the pipeline is composed.
#[derive(Debug, Clone)]
pub struct OperatorPipeline {
    stages: Vec<Stage>,
    pub input: Domain,
    pub output: Domain,
}

impl OperatorPipeline {
    /// The identity on `domain`.
    pub fn identity(domain: Domain) -> Self {
        Self { stages: vec![Stage::Identity], input: domain, output: domain }
    }

    /// Compose from a list of stages starting on `input`.
    pub fn from_stages(input: Domain, stages: Vec<Stage>) -> Result<Self> {
        let mut p = Self { stages: Vec::new(), input, output: input };
        for s in stages {
            p = p.then(s)?;
        }
        Ok(p)
    }

    /// Append a stage, checking that its input domain matches.
    pub fn then(mut self, stage: Stage) -> Result<Self> {
        if let Stage::Sum(branches) = &stage {
            if branches.is_empty() {
                return Err(ScatterError::PipelineDomain("sum with no branches".into()));
            }
            let (i0, o0) = (branches[0].input, branches[0].output);
            if branches.iter().any(|b| b.input != i0 || b.output != o0) {
                return Err(ScatterError::PipelineDomain("sum branches map between different domains".into()));
            }
        }
        if let Some((din, dout)) = stage.domains() {
            if din != self.output {
                return Err(ScatterError::PipelineDomain(format!(
                    "stage {stage:?} expects {din:?} but the pipeline produces {:?}",
                    self.output
                )));
            }
            self.output = dout;
        }
        self.stages.push(stage);
        Ok(self)
    }

    /// Sum of pipelines with common domains.
    pub fn sum(branches: Vec<OperatorPipeline>) -> Result<Self> {
        let input = branches.first().map(|b| b.input).ok_or_else(|| ScatterError::PipelineDomain("empty sum".into()))?;
        Self::from_stages(input, vec![Stage::Sum(branches)])
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn apply(&self, y: &Field) -> Result<Field> {
        if y.domain != self.input {
            return Err(ScatterError::PipelineDomain(format!("pipeline expects {:?}, got {:?}", self.input, y.domain)));
        }
        let mut cur = y.clone();
        for s in &self.stages {
            cur = s.apply(&cur)?;
        }
        Ok(cur)
    }

    /// The adjoint pipeline: stage adjoints in reverse order.
    pub fn adjoint(&self) -> Self {
        Self { stages: self.stages.iter().rev().map(|s| s.adjoint()).collect(), input: self.output, output: self.input }
    }
}

/// Convolution kernel samples on offsets −m..=m from symbol samples.
fn symbol_kernel(n: usize, h: f64, half_len: usize, eval: impl Fn(&[f64]) -> Vec<CMat>) -> Result<ConvKernel> {
    let y: Vec<f64> = (0..=2 * half_len).map(|i| (i as f64 - half_len as f64) * h).collect();
    let vals = eval(&y);
    let g = ConvKernel::new(h, vals)?;
    debug_assert_eq!(g.n, n);
    Ok(g)
}

/// Everything the wave-operator formulas need for one half-line problem on a field
/// grid with spacing Δx and `npos` nodes.
#[derive(Clone)]
pub struct WaveOpContext {
    pub n: usize,
    pub h: f64,
    pub npos: usize,
    pub pt: Arc<PhysicalSolutionTable>,
    pub kernel: Arc<KernelTable>,
    pub s0: CMat,
    pub sinf: CMat,
    pub fs: Arc<ConvKernel>,
    pub p_plus: Arc<ConvKernel>,
    pub p_minus: Arc<ConvKernel>,
}

impl WaveOpContext {
    /// Build the tables for fields on [0, window].
    pub fn new(problem: &ScatteringProblem, window: f64) -> Result<Self> {
        let h = problem.jost.dx;
        let npos = (window / h).round() as usize + 1;
        let n = problem.n();
        let pt = spectral::physical_solution(&problem.jost, &problem.st)?;
        let half_len = 2 * (npos - 1);
        let st = &problem.st;
        let fs = symbol_kernel(n, h, half_len, |y| scattering::fs_symbol(st, y).values)?;
        let (pp, pm) = {
            let y: Vec<f64> = (0..=2 * half_len).map(|i| (i as f64 - half_len as f64) * h).collect();
            let (a, b) = scattering::p_symbols(st, &y);
            (ConvKernel::new(h, a.values)?, ConvKernel::new(h, b.values)?)
        };
        Ok(Self {
            n,
            h,
            npos,
            pt: Arc::new(pt),
            kernel: Arc::new(problem.kernel.clone()),
            s0: st.s0.clone(),
            sinf: st.sinf.clone(),
            fs: Arc::new(fs),
            p_plus: Arc::new(pp),
            p_minus: Arc::new(pm),
        })
    }

    pub fn p(&self, sign: Sign) -> &Arc<ConvKernel> {
        match sign {
            Sign::Plus => &self.p_plus,
            Sign::Minus => &self.p_minus,
        }
    }

    /// An empty field on the context grid.
    pub fn field(&self) -> Field {
        Field::half_line(self.n, self.h, self.npos)
    }

    /// Sample `f` on the context grid.
    pub fn sample(&self, f: impl Fn(f64, &mut [C64])) -> Field {
        Field::from_fn(Domain::HalfLine, self.n, self.h, self.npos, f)
    }

    /// ‖S(0) − I‖ and ‖S∞ − I‖.
    pub fn identity_defects(&self) -> (f64, f64) {
        let id = linalg::eye(self.n);
        (linalg::op_norm(&(&self.s0 - &id)), linalg::op_norm(&(&self.sinf - &id)))
    }

    fn check_field(&self, y: &Field) -> Result<()> {
        if y.domain != Domain::HalfLine || y.n != self.n || y.npos != self.npos || (y.h - self.h).abs() > 1e-12 {
            return Err(ScatterError::GridMismatch("field is not on the wave-operator grid".into()));
        }
        Ok(())
    }
}

/// Which wave-operator formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Form {
    /// (F^±)†F₀.
    Stationary,
    /// Hilbert-transform decomposition W⁽¹⁾ + W⁽²⁾ + W⁽³⁾.
    Decomposed,
    /// Y + K(K)Y + RQ(P±)E_even Y + K(K)RQ(P±)E_even Y.
    L1,
}

impl std::str::FromStr for Form {
    type Err = ScatterError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary" => Ok(Form::Stationary),
            "thm31" | "decomposed" => Ok(Form::Decomposed),
            "thm32" | "l1" => Ok(Form::L1),
            _ => Err(ScatterError::Config(format!("unknown form {s}"))),
        }
    }
}

fn half(stages: Vec<Stage>) -> Result<OperatorPipeline> {
    OperatorPipeline::from_stages(Domain::HalfLine, stages)
}

fn line(stages: Vec<Stage>) -> Result<OperatorPipeline> {
    OperatorPipeline::from_stages(Domain::Line, stages)
}

/// I + K(K) on half-line fields.
pub fn identity_plus_kernel(kernel: &Arc<KernelTable>) -> Result<OperatorPipeline> {
    OperatorPipeline::sum(vec![OperatorPipeline::identity(Domain::HalfLine), half(vec![Stage::Kernel(kernel.clone())])?])
}

/// (F^±)†F₀ as a pipeline stage.
pub fn stationary_pipeline(ctx: &WaveOpContext, sign: Sign) -> Result<OperatorPipeline> {
    let pt_f = ctx.pt.clone();
    let pt_a = ctx.pt.clone();
    let forward: MapFn = Arc::new(move |y: &Field| {
        let (k, w) = pt_f.positive_grid();
        let z = spectral::f0_transform(y, &k, &w)?;
        spectral::fourier_map_adjoint(&pt_f, &z, sign, y.h, y.npos)
    });
    let adjoint: MapFn = Arc::new(move |y: &Field| {
        let z = spectral::fourier_map(&pt_a, y, sign)?;
        Ok(spectral::f0_adjoint(&z, y.h, y.npos))
    });
    half(vec![Stage::Map {
        name: format!("stationary{sign:?}"),
        domain: (Domain::HalfLine, Domain::HalfLine),
        forward,
        adjoint,
    }])
}

/// (I + K(K))R[(±i/2)ℋE + ½E + (∓i/2)ℋS∞E + ½S∞E + (∓i/2)ℋQ(F_s)E + ½Q(F_s)E].
pub fn decomposed_pipeline(ctx: &WaveOpContext, sign: Sign) -> Result<OperatorPipeline> {
    let s = sign.value();
    let plus_i = C64::new(0.0, 0.5 * s);
    let minus_i = C64::new(0.0, -0.5 * s);
    let half_c = C64::new(0.5, 0.0);
    let inner = OperatorPipeline::sum(vec![
        line(vec![Stage::Hilbert, Stage::Scale(plus_i)])?,
        line(vec![Stage::Scale(half_c)])?,
        line(vec![Stage::Matrix(ctx.sinf.clone()), Stage::Hilbert, Stage::Scale(minus_i)])?,
        line(vec![Stage::Matrix(&ctx.sinf * half_c)])?,
        line(vec![Stage::Convolve(ctx.fs.clone()), Stage::Hilbert, Stage::Scale(minus_i)])?,
        line(vec![Stage::Convolve(ctx.fs.clone()), Stage::Scale(half_c)])?,
    ])?;
    half(vec![
        Stage::ExtendEven,
        Stage::Sum(vec![inner]),
        Stage::Restrict,
        Stage::Sum(vec![identity_plus_kernel(&ctx.kernel)?]),
    ])
}

/// Y + K(K)Y + RQ(P±)E_even Y + K(K)RQ(P±)E_even Y, checking S(0) = S∞ = I.
pub fn l1_pipeline(ctx: &WaveOpContext, sign: Sign) -> Result<OperatorPipeline> {
    let (d0, dinf) = ctx.identity_defects();
    if d0 > HYPOTHESIS_TOL || dinf > HYPOTHESIS_TOL {
        return Err(ScatterError::HypothesisViolated { s0_defect: d0, sinf_defect: dinf });
    }
    let p = ctx.p(sign).clone();
    let kern = ctx.kernel.clone();
    OperatorPipeline::sum(vec![
        OperatorPipeline::identity(Domain::HalfLine),
        half(vec![Stage::Kernel(kern.clone())])?,
        half(vec![Stage::ExtendEven, Stage::Convolve(p.clone()), Stage::Restrict])?,
        half(vec![Stage::ExtendEven, Stage::Convolve(p), Stage::Restrict, Stage::Kernel(kern)])?,
    ])
}

/// The pipeline for `form`.
pub fn wave_op_pipeline(ctx: &WaveOpContext, sign: Sign, form: Form) -> Result<OperatorPipeline> {
    match form {
        Form::Stationary => stationary_pipeline(ctx, sign),
        Form::Decomposed => decomposed_pipeline(ctx, sign),
        Form::L1 => l1_pipeline(ctx, sign),
    }
}

/// W±Y = (F^±)†F₀Y.
pub fn wave_op_stationary(ctx: &WaveOpContext, y: &Field, sign: Sign) -> Result<Field> {
    ctx.check_field(y)?;
    stationary_pipeline(ctx, sign)?.apply(y)
}

/// W±Y by the Hilbert-transform decomposition.
pub fn wave_op_decomposed(ctx: &WaveOpContext, y: &Field, sign: Sign) -> Result<Field> {
    ctx.check_field(y)?;
    decomposed_pipeline(ctx, sign)?.apply(y)
}

/// W±Y by the four-term formula; requires S(0) = S∞ = I.
pub fn wave_op_l1_form(ctx: &WaveOpContext, y: &Field, sign: Sign) -> Result<Field> {
    ctx.check_field(y)?;
    l1_pipeline(ctx, sign)?.apply(y)
}

/// W±†Z through the adjoint of the chosen pipeline.
pub fn wave_op_adjoint(ctx: &WaveOpContext, z: &Field, sign: Sign, form: Form) -> Result<Field> {
    ctx.check_field(z)?;
    wave_op_pipeline(ctx, sign, form)?.adjoint().apply(z)
}

/// Initial data for the time-limit check: Σ amp·[g(x − c) + g(x + c)] with a
/// Gaussian g of the given width, whose free Neumann evolution is known in closed form.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianData {
    pub center: f64,
    pub width: f64,
    pub amp: Vec<C64>,
}

impl GaussianData {
    pub fn sample(&self, h: f64, npos: usize, t: f64) -> Field {
        Field::from_fn(Domain::HalfLine, self.amp.len(), h, npos, |x, o| {
            let g = spectral::free_neumann_gaussian(x, self.center, self.width, t);
            for (d, a) in o.iter_mut().zip(&self.amp) {
                *d = a * g;
            }
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeLimitReport {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    /// Each distance is at most 1.1 times the previous one.
    pub nonincreasing: bool,
    pub final_distance: f64,
}

/// Spacing of the evolution grid for the time-limit check.
pub const EVOLUTION_DX: f64 = 1.0 / 32.0;

/// ‖e^{itH}e^{−itH₀}Y − W±Y‖ at each t of the schedule (t → ±∞ for W±).
///
/// e^{−itH₀}Y is the exact free Neumann evolution. The distance is evaluated through
/// the isometry F^±: ‖e^{itk²}F^±e^{−itH₀}Y − F₀Y‖ on the positive k nodes.
pub fn wave_op_time_limit(pt: &PhysicalSolutionTable, data: &GaussianData, sign: Sign, schedule: &[f64]) -> Result<TimeLimitReport> {
    let kcut = 8.0 / data.width;
    let stride = (EVOLUTION_DX / pt.dx).round().max(1.0);
    let h = stride * pt.dx;
    let tmax = schedule.iter().cloned().fold(0.0, f64::max);
    let xmax = data.center + 4.0 * data.width + 2.0 * kcut * tmax;
    let npos = (xmax / h).ceil() as usize + 1;
    let y0 = data.sample(h, npos, 0.0);
    let (k, w) = pt.positive_grid();
    let keep = k.iter().take_while(|&&kk| kk <= kcut).count();
    let (k, w) = (k[..keep].to_vec(), w[..keep].to_vec());
    let f0 = spectral::f0_transform(&y0, &k, &w)?;
    let trimmed = pt.truncated(keep);
    let mut distances = Vec::new();
    for &t in schedule {
        let ts = t * sign.value();
        let yt = data.sample(h, npos, ts);
        let frac = yt.outer_mass_fraction();
        if frac > 0.01 {
            return Err(ScatterError::DomainReflection { fraction: frac });
        }
        let fy = spectral::fourier_map(&trimmed, &yt, sign)?.evolve(-ts);
        distances.push(fy.distance(&f0));
    }
    let nonincreasing = distances.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    Ok(TimeLimitReport { times: schedule.to_vec(), final_distance: *distances.last().unwrap_or(&0.0), distances, nonincreasing })
}

/// T⁽¹⁾..T⁽⁶⁾ of the six-term split, evaluated from their k-integrals:
/// T⁽¹⁾ = (2π)^{−1/2}∫₀^∞e^{±ikx}F₀Y, T⁽³⁾ with e^{∓ikx}S∞, T⁽⁵⁾ with e^{∓ikx}(S(∓k) − S∞),
/// and T⁽²ʲ⁾ = K(K)T⁽²ʲ⁻¹⁾.
pub fn t_split_terms(ctx: &WaveOpContext, y: &Field, sign: Sign) -> Result<[Field; 6]> {
    ctx.check_field(y)?;
    let pt = &ctx.pt;
    let (k, w) = pt.positive_grid();
    let f0 = spectral::f0_transform(y, &k, &w)?;
    let half = pt.nk() / 2;
    let s = sign.value();
    let n = ctx.n;
    let id = linalg::eye(n);
    let mats_sinf: Vec<CMat> = vec![ctx.sinf.clone(); k.len()];
    let mats_id: Vec<CMat> = vec![id; k.len()];
    let mats_s: Vec<CMat> = (0..k.len())
        .map(|q| {
            let i = if sign == Sign::Plus { pt.mirror(half + q) } else { half + q };
            &pt.s[i] - &ctx.sinf
        })
        .collect();
    let t1 = inverse_half_transform(&k, &w, &mats_id, &f0, s, y.h, y.npos);
    let t3 = inverse_half_transform(&k, &w, &mats_sinf, &f0, -s, y.h, y.npos);
    let t5 = inverse_half_transform(&k, &w, &mats_s, &f0, -s, y.h, y.npos);
    let t2 = kernel_apply(&ctx.kernel, &t1)?;
    let t4 = kernel_apply(&ctx.kernel, &t3)?;
    let t6 = kernel_apply(&ctx.kernel, &t5)?;
    Ok([t1, t2, t3, t4, t5, t6])
}

/// (2π)^{−1/2} Σ w_q e^{σ i k_q x} M_q Z_q.
pub(crate) fn inverse_half_transform(k: &[f64], w: &[f64], m: &[CMat], z: &SpectralFunction, sigma: f64, h: f64, npos: usize) -> Field {
    let n = z.n;
    let mut mz = vec![C64::new(0.0, 0.0); k.len() * n];
    for q in 0..k.len() {
        let v = &m[q] * nalgebra::DVector::from_column_slice(z.at(q));
        for c in 0..n {
            mz[q * n + c] = v[c] * w[q];
        }
    }
    let dk = if k.len() > 1 { k[1] - k[0] } else { 0.0 };
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let vals: Vec<Vec<C64>> = (0..npos)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * h;
            let step = (I * sigma * dk * x).exp();
            let mut ph = C64::new(1.0, 0.0);
            let mut acc = vec![C64::new(0.0, 0.0); n];
            for q in 0..k.len() {
                if q % 512 == 0 {
                    ph = (I * sigma * k[q] * x).exp();
                }
                for c in 0..n {
                    acc[c] += mz[q * n + c] * ph;
                }
                ph *= step;
            }
            acc.iter_mut().for_each(|a| *a *= norm);
            acc
        })
        .collect();
    let mut out = Field::half_line(n, h, npos);
    for (j, v) in vals.into_iter().enumerate() {
        out.at_mut(j).copy_from_slice(&v);
    }
    out
}

/// Bound of the Schur integrals implied by the pointwise kernel estimate:
/// sup_x ∫_x^∞ ½σ((x+y)/2)e^{σ₁(x)}dy.
pub fn schur_bound(v: &PotentialSpec, dx: f64, xmax: f64) -> f64 {
    let nx = (xmax / dx).round() as usize + 1;
    (0..nx)
        .map(|j| {
            let x = j as f64 * dx;
            let e = v.sigma1(x).exp();
            let ny = ((2.0 * xmax - 2.0 * x) / dx).round() as usize;
            let w = crate::quad::trapezoid_weights(ny + 1, dx);
            (0..=ny).map(|l| 0.5 * v.sigma(x + 0.5 * l as f64 * dx) * e * w[l]).sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// K(K)Y after checking both Schur integrals against `bound`.
pub fn kernel_apply_checked(kt: &KernelTable, y: &Field, bound: f64) -> Result<Field> {
    let (row, col) = schur_values(kt);
    if row > bound || col > bound {
        return Err(ScatterError::SchurUnbounded { row, col, bound });
    }
    kernel_apply(kt, y)
}

/// Test family for the Lᵖ probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeFamily {
    /// b(2^j x) for a smooth bump b supported in [0, 2].
    Dilated,
    /// b(x − 2^j) translated outward.
    Translated,
}

impl std::str::FromStr for ProbeFamily {
    type Err = ScatterError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dilated" => Ok(ProbeFamily::Dilated),
            "translated" => Ok(ProbeFamily::Translated),
            _ => Err(ScatterError::Config(format!("unknown probe family {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Bounded,
    Growing,
    Inconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Bounded => "bounded",
            Classification::Growing => "growing",
            Classification::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub p: f64,
    pub scales: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Relative change of each output norm between the inner half of the window and the whole window.
    pub window_sensitivity: Vec<f64>,
    pub classification: Classification,
}

/// Smooth bump exp(1 − 1/(1 − (x−1)²)) on (0, 2).
pub fn bump(x: f64) -> f64 {
    let u = x - 1.0;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Minimum per-scale increase of the ratio for the "growing" class.
pub const GROWTH_STEP: f64 = 0.2;
/// max/min ratio below which a family is "bounded".
pub const BOUNDED_SPREAD: f64 = 2.0;

/// Classify a ratio sequence.
pub fn classify(ratios: &[f64]) -> Classification {
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let growing = ratios.len() > 1 && ratios.windows(2).all(|w| w[1] - w[0] > GROWTH_STEP);
    if growing {
        Classification::Growing
    } else if min > 0.0 && max / min < BOUNDED_SPREAD {
        Classification::Bounded
    } else {
        Classification::Inconclusive
    }
}

/// ‖WY_s‖_p / ‖Y_s‖_p over the family members s = 2⁰..2^{scales−1}.
pub fn lp_probe(pipeline: &OperatorPipeline, template: &Field, family: ProbeFamily, scales: usize, p: f64) -> Result<ProbeReport> {
    let n = template.n;
    let members: Vec<(f64, Field)> = (0..scales)
        .map(|j| {
            let s = 2f64.powi(j as i32);
            let f = Field::from_fn(Domain::HalfLine, n, template.h, template.npos, |x, o| {
                let b = match family {
                    ProbeFamily::Dilated => bump(s * x),
                    ProbeFamily::Translated => bump(x - s),
                };
                for (c, v) in o.iter_mut().enumerate() {
                    *v = C64::new(if c == 0 { b } else { 0.5 * b }, 0.0);
                }
            });
            (s, f)
        })
        .collect();
    let results: Vec<Result<(f64, f64, f64)>> = members
        .par_iter()
        .map(|(s, y)| {
            let out = pipeline.apply(y)?;
            let full = out.norm_p(p);
            let inner = out.resized(out.npos / 2 + 1).norm_p(p);
            let sens = if full > 0.0 { (full - inner) / full } else { 0.0 };
            Ok((*s, full / y.norm_p(p), sens))
        })
        .collect();
    let mut scales_v = Vec::new();
    let mut ratios = Vec::new();
    let mut sens = Vec::new();
    for r in results {
        let (s, q, w) = r?;
        scales_v.push(s);
        ratios.push(q);
        sens.push(w);
    }
    Ok(ProbeReport { p, classification: classify(&ratios), scales: scales_v, ratios, window_sensitivity: sens })
}

/// (i/2)ℋY + ½Y and (−i/2)ℋY + ½Y, the half-axis projections χ_{ℝ⁺}(k) and χ_{ℝ⁻}(k).
pub fn half_axis_projections(y: &Field) -> Result<(Field, Field)> {
    let hy = hilbert(y)?;
    let a = hy.scaled(C64::new(0.0, 0.5)).add(&y.scaled(C64::new(0.5, 0.0)))?;
    let b = hy.scaled(C64::new(0.0, -0.5)).add(&y.scaled(C64::new(0.5, 0.0)))?;
    Ok((a, b))
}

/// Direct Fourier projection 𝔉⁻¹χ_{ℝ⁺}𝔉Y of a line field by quadrature on [0, kmax].
pub fn fourier_positive_projection(y: &Field, kmax: f64, nk: usize) -> Field {
    let dk = kmax / nk as f64;
    let ks: Vec<f64> = (0..nk).map(|i| (i as f64 + 0.5) * dk).collect();
    let norm = 1.0 / (2.0 * std::f64::consts::PI);
    let n = y.n;
    let hat: Vec<Vec<C64>> = ks
        .par_iter()
        .map(|&k| {
            let mut acc = vec![C64::new(0.0, 0.0); n];
            for i in 0..y.len() {
                let ph = (-I * k * y.x(i)).exp() * y.weight(i);
                for c in 0..n {
                    acc[c] += y.at(i)[c] * ph;
                }
            }
            acc
        })
        .collect();
    let vals: Vec<Vec<C64>> = (0..y.len())
        .into_par_iter()
        .map(|i| {
            let x = y.x(i);
            let mut acc = vec![C64::new(0.0, 0.0); n];
            for (q, &k) in ks.iter().enumerate() {
                let ph = (I * k * x).exp() * dk * norm;
                for c in 0..n {
                    acc[c] += hat[q][c] * ph;
                }
            }
            acc
        })
        .collect();
    let mut out = y.zeros_like();
    for (i, v) in vals.into_iter().enumerate() {
        out.at_mut(i).copy_from_slice(&v);
    }
    out
}
