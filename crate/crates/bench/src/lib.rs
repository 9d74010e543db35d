//! Shared fixtures for the benchmarks.

use scatter_core::field::{Domain, Field};
use scatter_core::jost::KXGrid;
use scatter_core::linalg::C64;
use scatter_core::scattering::ScatteringProblem;
use scatter_core::verify;
use scatter_core::waveop::WaveOpContext;

/// A reduced grid that keeps one benchmark iteration well under a second.
pub fn bench_grid() -> KXGrid {
    KXGrid::new(20.0, 1024, 1.0 / 64.0, 20.0).expect("valid grid")
}

/// The exceptional Robin step problem on the bench grid.
pub fn robin_problem() -> ScatteringProblem {
    let (v, bp) = verify::builtin_half_line("robin-step").expect("builtin scenario");
    ScatteringProblem::build(v, bp, bench_grid()).expect("problem builds")
}

pub fn robin_context() -> WaveOpContext {
    WaveOpContext::new(&robin_problem(), 10.0).expect("context builds")
}

/// A Gaussian centered at 3 on the context grid.
pub fn gaussian(ctx: &WaveOpContext) -> Field {
    Field::gaussian(Domain::HalfLine, ctx.h, ctx.npos, 3.0, 0.8, &[C64::new(1.0, 0.0)])
}
