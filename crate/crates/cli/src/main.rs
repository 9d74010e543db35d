//! `scatter`: command-line front end for the half-line and line scattering toolkit.
//!
//! Tables go to CSV (stdout or `--out`); summaries go to stderr as JSON. Exit codes:
//! 0 success or all checks passed, 1 a check failed or a numerical error occurred,
//! 2 configuration error.

mod emit;
mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use scatter_core::boundary::{self, BoundaryPair};
use scatter_core::field::{Domain, Field};
use scatter_core::io::{self, ScenarioConfig, Tolerances};
use scatter_core::jost::{self, KXGrid};
use scatter_core::line::{self, LineForm, LineGaussian, LineProblem, LineWaveContext};
use scatter_core::linalg::{self, CMat, C64};
use scatter_core::potentials::{self, PotentialSpec};
use scatter_core::scattering::{self, ScatteringProblem};
use scatter_core::spectral::{self, Sign};
use scatter_core::verify::{self, Report, VerifyTolerances};
use scatter_core::waveop::{self, Form, ProbeFamily, WaveOpContext};
use scatter_core::ScatterError;

use emit::{emit, field_table, matrix_names, Table};

#[derive(Parser)]
#[command(name = "scatter", version, about = "Matrix Schrödinger scattering on the half-line and the line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a potential file and report its norms; optionally sample it to CSV.
    Potential {
        file: PathBuf,
        /// Treat the file as a line potential (cells may lie on x < 0).
        #[arg(long)]
        line: bool,
        /// Write samples x, re_ij, im_ij with this spacing.
        #[arg(long)]
        sample_dx: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a boundary file and report its diagonal form.
    Bc { file: PathBuf },
    /// Jost matrix J(k) as CSV; J(0) and the generic/exceptional verdict on stderr.
    Jost(TableArgs),
    /// Marchenko kernel K(x, y) as CSV.
    Kernel {
        #[command(flatten)]
        table: TableArgs,
        /// Keep every stride-th node in x and y.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Scattering matrix S(k) as CSV; S(0) and S∞ on stderr.
    Smatrix(TableArgs),
    /// Symbols F_S and P± on the y grid of the wave-operator window.
    Symbols {
        #[command(flatten)]
        table: TableArgs,
        /// One of fs, p+, p-.
        #[arg(long, default_value = "fs")]
        which: String,
    },
    /// High- and low-energy behavior of dS/dk, as JSON.
    Asymptotics {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// e^{−itH}P_ac applied to a Gaussian, as a field CSV.
    Evolve {
        #[command(flatten)]
        table: TableArgs,
        #[command(flatten)]
        data: GaussianArgs,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// A wave operator applied to a Gaussian or a field CSV, as a field CSV.
    Waveop {
        #[command(flatten)]
        table: TableArgs,
        #[command(flatten)]
        data: GaussianArgs,
        /// stationary, decomposed or l1.
        #[arg(long, default_value = "stationary")]
        form: String,
        /// + or -.
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        /// Apply the adjoint instead.
        #[arg(long)]
        adjoint: bool,
    },
    /// Lᵖ ratios of a wave operator on a dilated or translated bump family.
    ProbeLp {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, default_value = "stationary")]
        form: String,
        #[arg(long, default_value = "dilated")]
        family: String,
        #[arg(long, default_value_t = 7)]
        scales: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Problems on the full line with a point interaction at the origin.
    Line {
        #[command(subcommand)]
        command: LineCommand,
    },
    /// Run the acceptance suite, a builtin scenario, or the generic checks of a scenario.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Directory for report.csv and checks.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LineCommand {
    /// Line coefficients T_l, T_r, L, R as CSV.
    Smatrix {
        #[command(flatten)]
        line: LineArgs,
        /// Use the direct ODE integration instead of the fold (δ interactions only).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A line wave operator applied to a Gaussian, as a field CSV.
    Waveop {
        #[command(flatten)]
        line: LineArgs,
        /// chained or four-term.
        #[arg(long, default_value = "chained")]
        form: String,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        center: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        momentum: f64,
        /// Field CSV on the line window grid, used instead of the Gaussian.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduction and wave-operator checks for a line problem.
    Verify {
        #[command(flatten)]
        line: LineArgs,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    #[arg(long)]
    kmax: Option<f64>,
    #[arg(long)]
    nk: Option<usize>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    xmax: Option<f64>,
    /// Field window [0, window] of the wave-operator grids.
    #[arg(long)]
    window: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct ProblemArgs {
    /// Potential and boundary JSON files, as an alternative to the flags.
    #[arg(value_name = "POTENTIAL [BOUNDARY]", num_args = 0..=2)]
    files: Vec<PathBuf>,
    /// Potential JSON file.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Boundary JSON file (Neumann when omitted).
    #[arg(long)]
    boundary: Option<PathBuf>,
    /// Builtin scenario: neumann-free, robin-step, dirichlet-counterexample.
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Clone)]
struct TableArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GaussianArgs {
    /// Field CSV (x, re_1, im_1, ...) on the window grid, used instead of the Gaussian.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3.0)]
    center: f64,
    #[arg(long, default_value_t = 1.0)]
    width: f64,
}

#[derive(Args, Clone)]
struct LineArgs {
    /// Line problem JSON file.
    file: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
}

impl GaussianArgs {
    fn field(&self, ctx: &WaveOpContext) -> Result<Field, ScatterError> {
        match &self.input {
            Some(p) => input::read_field_csv(p, Domain::HalfLine, ctx.n, ctx.h, ctx.npos),
            None => Ok(Field::gaussian(Domain::HalfLine, ctx.h, ctx.npos, self.center, self.width, &vec![C64::new(1.0, 0.0); ctx.n])),
        }
    }
}

/// A resolved half-line problem.
struct Loaded {
    v: PotentialSpec,
    bp: BoundaryPair,
    grid: KXGrid,
    window: f64,
    tolerances: Tolerances,
    output: Option<PathBuf>,
}

impl GridArgs {
    fn apply(&self, mut g: KXGrid) -> Result<KXGrid, ScatterError> {
        if let Some(v) = self.kmax {
            g.kmax = v;
        }
        if let Some(v) = self.nk {
            g.nk = v;
        }
        if let Some(v) = self.dx {
            g.dx = v;
        }
        if let Some(v) = self.xmax {
            g.xmax = v;
        }
        g.validate()?;
        Ok(g)
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl ProblemArgs {
    fn load(&self) -> Result<Loaded, ScatterError> {
        let mut cfg = ScenarioConfig::default();
        let mut base = PathBuf::from(".");
        if let Some(c) = &self.config {
            cfg = io::read_scenario(c)?;
            base = c.parent().map(Path::to_path_buf).unwrap_or_default();
            if cfg.line.is_some() {
                return Err(ScatterError::Config(format!("{}: line scenarios run with `scatter line verify`", c.display())));
            }
        }
        let (v, bp) = if let Some(name) = &self.scenario {
            verify::builtin_half_line(name)?
        } else {
            let potential = self.potential.as_ref().or(self.files.first());
            let boundary = self.boundary.as_ref().or(self.files.get(1));
            let v = match (potential, &cfg.potential) {
                (Some(p), _) => io::read_potential(p)?,
                (None, Some(p)) => io::read_potential(&resolve(&base, p))?,
                (None, None) => return Err(ScatterError::Config("no potential given (use --potential, --scenario or --config)".into())),
            };
            let bp = match (boundary, &cfg.boundary) {
                (Some(p), _) => io::read_boundary(p)?,
                (None, Some(p)) => io::read_boundary(&resolve(&base, p))?,
                (None, None) => BoundaryPair::neumann(v.n),
            };
            (v, bp)
        };
        Ok(Loaded {
            v,
            bp,
            grid: self.grid.apply(cfg.grid)?,
            window: self.grid.window.or(cfg.window).unwrap_or(verify::WINDOW),
            tolerances: cfg.tolerances,
            output: cfg.output.map(|o| resolve(&base, &o)),
        })
    }

    fn is_empty(&self) -> bool {
        self.files.is_empty() && self.potential.is_none() && self.boundary.is_none() && self.scenario.is_none() && self.config.is_none()
    }
}

impl Loaded {
    fn problem(&self) -> Result<ScatteringProblem, ScatterError> {
        ScatteringProblem::build(self.v.clone(), self.bp.clone(), self.grid)
    }

    fn context(&self) -> Result<(ScatteringProblem, WaveOpContext), ScatterError> {
        let p = self.problem()?;
        let ctx = WaveOpContext::new(&p, self.window)?;
        Ok((p, ctx))
    }
}

fn summary(value: serde_json::Value) {
    eprintln!("{}", serde_json::to_string_pretty(&value).unwrap_or_default());
}

fn cjson(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn mjson(m: &CMat) -> serde_json::Value {
    serde_json::Value::Array((0..m.nrows()).map(|i| serde_json::Value::Array((0..m.ncols()).map(|j| cjson(m[(i, j)])).collect())).collect())
}

fn parse<T: std::str::FromStr<Err = ScatterError>>(s: &str) -> Result<T, ScatterError> {
    s.parse()
}

fn write_report(report: &Report, dir: Option<&Path>) -> Result<bool, ScatterError> {
    for c in &report.criteria {
        eprintln!("{}", c.summary_line());
    }
    print!("{}", report.to_csv());
    if let Some(d) = dir {
        let io_err = |e: std::io::Error| ScatterError::Io { path: d.display().to_string(), message: e.to_string() };
        std::fs::create_dir_all(d).map_err(io_err)?;
        std::fs::write(d.join("report.csv"), report.to_csv()).map_err(io_err)?;
        std::fs::write(d.join("checks.csv"), report.checks_csv()).map_err(io_err)?;
    }
    Ok(report.all_pass())
}

fn line_grid(args: &LineArgs) -> Result<(LineProblem, KXGrid, f64), ScatterError> {
    let lp = io::read_line(&args.file)?;
    Ok((lp, args.grid.apply(KXGrid::default())?, args.grid.window.unwrap_or(verify::WINDOW)))
}

/// Run a command; Ok(false) means a check failed.
fn run(cli: Cli) -> Result<bool, ScatterError> {
    match cli.command {
        Command::Potential { file, line, sample_dx, out } => {
            if line {
                let lv = io::read_json::<io::PotentialFile>(&file)?.to_line()?;
                let (vp, vm) = potentials::fold_line_potential(&lv)?;
                summary(json!({
                    "n": lv.n,
                    "cells": lv.cells.len(),
                    "extent": lv.extent(),
                    "l1": lv.l1gamma_norm(0.0),
                    "l1_1": lv.l1gamma_norm(1.0),
                    "folded_cells": [vp.cells.len(), vm.cells.len()],
                }));
                if let Some(h) = sample_dx {
                    let e = lv.extent().max(h);
                    let m = (e / h).ceil() as i64;
                    let mut t = Table::new(&["x"], matrix_names("", lv.n));
                    for j in -m..=m {
                        let x = j as f64 * h;
                        t.push_matrices(vec![x], &[&lv.value_at(x)]);
                    }
                    emit(&t, out.as_deref())?;
                }
            } else {
                let v = io::read_potential(&file)?;
                let d = potentials::validate_potential(&v)?;
                summary(json!({
                    "n": v.n,
                    "cells": v.cells.len(),
                    "support": v.cells.last().map(|c| c.b).unwrap_or(0.0),
                    "max_hermitian_defect": d.max_hermitian_defect,
                    "l1": d.l1,
                    "l1_1": d.l1_1,
                }));
                if let Some(h) = sample_dx {
                    let e = v.cells.last().map(|c| c.b).unwrap_or(0.0).max(h);
                    let m = (e / h).ceil() as usize;
                    let mut t = Table::new(&["x"], matrix_names("", v.n));
                    for j in 0..=m {
                        let x = j as f64 * h;
                        t.push_matrices(vec![x], &[&v.value_at(x)]);
                    }
                    emit(&t, out.as_deref())?;
                }
            }
            Ok(true)
        }
        Command::Bc { file } => {
            let bp = io::read_boundary(&file)?;
            let d = boundary::validate_boundary(&bp)?;
            let df = boundary::diagonalize(&bp)?;
            summary(json!({
                "n": bp.n,
                "selfadjoint_defect": d.selfadjoint_defect,
                "min_eig": d.min_eig,
                "thetas": df.thetas,
                "dirichlet": df.n_dirichlet,
                "neumann": df.n_neumann,
                "mixed": df.n_mixed,
                "s_infinity_is_identity": boundary::predicted_s_infinity_identity(&df),
            }));
            Ok(true)
        }
        Command::Jost(args) => {
            let p = args.problem.load()?.problem()?;
            let n = p.n();
            let mut t = Table::new(&["k"], matrix_names("J", n));
            for (k, j) in p.jm.k.iter().zip(&p.jm.j) {
                t.push_matrices(vec![*k], &[j]);
            }
            emit(&t, args.out.as_deref())?;
            summary(json!({
                "j0": mjson(&p.jm.j0),
                "j0_sigma_min": linalg::min_singular(&p.jm.j0),
                "exceptional": p.st.exceptional,
            }));
            Ok(true)
        }
        Command::Kernel { table, stride } => {
            let p = table.problem.load()?.problem()?;
            let kt = &p.kernel;
            let stride = stride.max(1);
            let mut t = Table::new(&["x", "y"], matrix_names("", kt.n));
            for j in (0..kt.nv).step_by(stride) {
                for l in (j..=kt.row_end(j)).step_by(stride) {
                    t.push_matrices(vec![j as f64 * kt.dx, l as f64 * kt.dx], &[&kt.get(j, l)]);
                }
            }
            emit(&t, table.out.as_deref())?;
            summary(json!({
                "nodes": kt.nv,
                "tail_ratio": kt.tail_ratio,
                "bound_violation": jost::kernel_bound_violation(kt, &p.v),
            }));
            Ok(true)
        }
        Command::Smatrix(args) => {
            let p = args.problem.load()?.problem()?;
            let st = &p.st;
            let mut t = Table::new(&["k"], matrix_names("S", st.n));
            for (k, s) in st.k.iter().zip(&st.s) {
                t.push_matrices(vec![*k], &[s]);
            }
            emit(&t, args.out.as_deref())?;
            let (u, sym) = st.unitarity_and_symmetry(verify::UNITARITY_KMIN);
            summary(json!({
                "s0": mjson(&st.s0),
                "s_infinity": mjson(&st.sinf),
                "plateau_deviation": st.plateau_deviation,
                "exceptional": st.exceptional,
                "unitarity_defect": u,
                "symmetry_defect": sym,
            }));
            Ok(true)
        }
        Command::Symbols { table, which } => {
            let loaded = table.problem.load()?;
            let p = loaded.problem()?;
            let h = p.grid.dx;
            let m = (loaded.window / h).round() as i64;
            let y: Vec<f64> = (-2 * m..=2 * m).map(|i| i as f64 * h).collect();
            let sym = match which.as_str() {
                "fs" => scattering::fs_symbol(&p.st, &y),
                "p+" => scattering::p_symbols(&p.st, &y).0,
                "p-" => scattering::p_symbols(&p.st, &y).1,
                _ => return Err(ScatterError::Config(format!("--which must be fs, p+ or p-, got {which}"))),
            };
            let label = match which.as_str() {
                "fs" => "FS",
                "p+" => "Pplus",
                _ => "Pminus",
            };
            let mut t = Table::new(&["y"], matrix_names(label, p.n()));
            for (yy, v) in sym.y.iter().zip(&sym.values) {
                t.push_matrices(vec![*yy], &[v]);
            }
            emit(&t, table.out.as_deref())?;
            summary(json!({ "l1": sym.l1, "tail_fraction": sym.tail_fraction }));
            Ok(true)
        }
        Command::Asymptotics { problem } => {
            let p = problem.load()?.problem()?;
            let r = scattering::sdot_asymptotics(&p.st);
            println!("{}", serde_json::to_string_pretty(&r).unwrap_or_default());
            Ok(true)
        }
        Command::Evolve { table, data, t } => {
            let (_, ctx) = table.problem.load()?.context()?;
            let y = data.field(&ctx)?;
            let out = spectral::evolve_spectral(&ctx.pt, &y, t, Sign::Plus)?;
            emit(&field_table(&out), table.out.as_deref())?;
            summary(json!({ "t": t, "input_norm": y.norm2(), "output_norm": out.norm2() }));
            Ok(true)
        }
        Command::Waveop { table, data, form, sign, adjoint } => {
            let form: Form = parse(&form)?;
            let sign: Sign = parse(&sign)?;
            let (_, ctx) = table.problem.load()?.context()?;
            let y = data.field(&ctx)?;
            let out = if adjoint { waveop::wave_op_adjoint(&ctx, &y, sign, form)? } else { waveop::wave_op_pipeline(&ctx, sign, form)?.apply(&y)? };
            emit(&field_table(&out), table.out.as_deref())?;
            let (d0, dinf) = ctx.identity_defects();
            summary(json!({
                "form": format!("{form:?}"),
                "input_norm": y.norm2(),
                "output_norm": out.norm2(),
                "s0_defect": d0,
                "s_infinity_defect": dinf,
            }));
            Ok(true)
        }
        Command::ProbeLp { table, form, family, scales, p } => {
            let form: Form = parse(&form)?;
            let family: ProbeFamily = parse(&family)?;
            let (_, ctx) = table.problem.load()?.context()?;
            let pl = waveop::wave_op_pipeline(&ctx, Sign::Plus, form)?;
            let r = waveop::lp_probe(&pl, &ctx.field(), family, scales, p)?;
            let classification = r.classification.to_string();
            let mut rows = Vec::new();
            for ((s, q), w) in r.scales.iter().zip(&r.ratios).zip(&r.window_sensitivity) {
                rows.push(vec![format!("{s:e}"), format!("{q:e}"), format!("{w:e}"), classification.clone()]);
            }
            emit::emit_records(&["scale", "ratio", "window_sensitivity", "classification"], &rows, table.out.as_deref())?;
            summary(json!({ "p": p, "classification": classification }));
            Ok(true)
        }
        Command::Line { command } => run_line(command),
        Command::Verify { problem, out_dir } => {
            let report = if problem.is_empty() {
                verify::run_acceptance()?
            } else if let (Some(name), None) = (&problem.scenario, &problem.config) {
                verify::run_builtin(name)?
            } else {
                let l = problem.load()?;
                let dir = out_dir.clone().or(l.output.clone());
                let r = verify::run_half_line(l.v, l.bp, l.grid, l.window, VerifyTolerances::from(l.tolerances))?;
                return write_report(&r, dir.as_deref());
            };
            write_report(&report, out_dir.as_deref())
        }
    }
}

fn run_line(command: LineCommand) -> Result<bool, ScatterError> {
    match command {
        LineCommand::Smatrix { line: args, oracle, out } => {
            let (lp, grid, _) = line_grid(&args)?;
            let lt = if oracle {
                line::line_jost_direct(&lp, &grid.kvalues(), grid.dx)?
            } else {
                let (v, bp) = line::fold(&lp)?;
                line::line_smatrix_from_halfline(&ScatteringProblem::build(v, bp, grid)?.st)?
            };
            let n = lp.n;
            let mut names = Vec::new();
            for label in ["Tl", "Tr", "L", "R"] {
                names.extend(matrix_names(label, n));
            }
            let mut t = Table::new(&["k"], names);
            for i in 0..lt.k.len() {
                t.push_matrices(vec![lt.k[i]], &[&lt.tl[i], &lt.tr[i], &lt.l[i], &lt.r[i]]);
            }
            emit(&t, out.as_deref())?;
            summary(json!({
                "unitarity_defect": lt.unitarity_defect(),
                "s_r0": lt.s_r0.as_ref().map(mjson),
                "s_r_infinity": lt.s_rinf.as_ref().map(mjson),
            }));
            Ok(true)
        }
        LineCommand::Waveop { line: args, form, sign, center, width, momentum, input, out } => {
            let form: LineForm = parse(&form)?;
            let sign: Sign = parse(&sign)?;
            let (lp, grid, window) = line_grid(&args)?;
            let lc = LineWaveContext::new(&lp, grid, window)?;
            let data = LineGaussian { center, width, momentum, amp: vec![C64::new(1.0, 0.0); lp.n] };
            let y = match &input {
                Some(p) => input::read_field_csv(p, Domain::Line, lp.n, lc.ctx.h, lc.ctx.npos)?,
                None => data.sample(lc.ctx.h, lc.ctx.npos, 0.0),
            };
            let w = line::line_wave_op(&lc, &y, sign, form)?;
            emit(&field_table(&w), out.as_deref())?;
            let (d0, dinf) = lc.swap_defects();
            summary(json!({
                "form": format!("{form:?}"),
                "input_norm": y.norm2(),
                "output_norm": w.norm2(),
                "s0_swap_defect": d0,
                "s_infinity_swap_defect": dinf,
            }));
            Ok(true)
        }
        LineCommand::Verify { line: args, out_dir } => {
            let (lp, grid, _) = line_grid(&args)?;
            let r = verify::run_line(&lp, grid, Tolerances::default().into())?;
            write_report(&r, out_dir.as_deref())
        }
    }
}

/// Errors caused by the inputs rather than by the computation.
fn is_config_error(e: &ScatterError) -> bool {
    matches!(
        e,
        ScatterError::Config(_)
            | ScatterError::Io { .. }
            | ScatterError::NonHermitian { .. }
            | ScatterError::EmptySupport
            | ScatterError::InvalidPotential(_)
            | ScatterError::NotSelfAdjointPair { .. }
            | ScatterError::DegeneratePair { .. }
            | ScatterError::NonHermitianCoupling { .. }
            | ScatterError::DimensionMismatch { .. }
            | ScatterError::GridTooCoarse(_)
    )
}

fn configure_threads() -> Result<(), ScatterError> {
    let Ok(v) = std::env::var("SCATTER_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| ScatterError::Config(format!("SCATTER_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(ScatterError::Config("SCATTER_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| ScatterError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
        }
    }
}
