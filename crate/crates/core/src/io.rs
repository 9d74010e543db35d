//! JSON file formats for potentials, boundary conditions, line problems, grids and
//! scenario configurations.
//!
//! Matrices are written as row-major lists of `[re, im]` pairs of length n².

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryPair;
use crate::error::{Result, ScatterError};
use crate::jost::KXGrid;
use crate::line::{Interaction, LineProblem};
use crate::linalg::{CMat, C64};
use crate::potentials::{Cell, LinePotential, PotentialSpec};

/// Row-major complex entries as `[re, im]` pairs.
pub type MatrixEntries = Vec<[f64; 2]>;

pub fn matrix_from_entries(rows: usize, cols: usize, e: &MatrixEntries) -> Result<CMat> {
    if e.len() != rows * cols {
        return Err(ScatterError::Config(format!("matrix needs {} entries, found {}", rows * cols, e.len())));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        let [re, im] = e[i * cols + j];
        C64::new(re, im)
    }))
}

pub fn matrix_to_entries(m: &CMat) -> MatrixEntries {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellFile {
    pub a: f64,
    pub b: f64,
    pub matrix: MatrixEntries,
}

/// `{n, cells: [{a, b, matrix}]}`; on the line the cells may have negative endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialFile {
    pub n: usize,
    #[serde(default)]
    pub cells: Vec<CellFile>,
}

impl PotentialFile {
    fn cells(&self) -> Result<Vec<Cell>> {
        self.cells
            .iter()
            .map(|c| Ok(Cell::new(c.a, c.b, matrix_from_entries(self.n, self.n, &c.matrix)?)))
            .collect()
    }

    pub fn to_half_line(&self) -> Result<PotentialSpec> {
        PotentialSpec::new(self.n, self.cells()?)
    }

    pub fn to_line(&self) -> Result<LinePotential> {
        LinePotential::new(self.n, self.cells()?)
    }

    pub fn from_half_line(v: &PotentialSpec) -> Self {
        Self { n: v.n, cells: v.cells.iter().map(cell_file).collect() }
    }

    pub fn from_line(v: &LinePotential) -> Self {
        Self { n: v.n, cells: v.cells.iter().map(cell_file).collect() }
    }
}

fn cell_file(c: &Cell) -> CellFile {
    CellFile { a: c.a, b: c.b, matrix: matrix_to_entries(&c.value) }
}

/// Either explicit matrices `{n, a, b}` or a named family `{n, kind, theta}` with kind
/// one of `dirichlet`, `neumann`, `robin` (θ per channel).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<MatrixEntries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixEntries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
}

impl BoundaryFile {
    pub fn to_pair(&self) -> Result<BoundaryPair> {
        let n = self.n;
        match (&self.a, &self.b, self.kind.as_deref()) {
            (Some(a), Some(b), None) => BoundaryPair::new(matrix_from_entries(n, n, a)?, matrix_from_entries(n, n, b)?),
            (None, None, Some("dirichlet")) => Ok(BoundaryPair::dirichlet(n)),
            (None, None, Some("neumann")) => Ok(BoundaryPair::neumann(n)),
            (None, None, Some("robin")) => {
                let th = self.theta.as_ref().ok_or_else(|| ScatterError::Config("robin boundary needs theta".into()))?;
                if th.len() != n {
                    return Err(ScatterError::DimensionMismatch { expected: n, found: th.len() });
                }
                Ok(BoundaryPair::robin_diag(th))
            }
            (None, None, Some(k)) => Err(ScatterError::Config(format!("unknown boundary kind {k}"))),
            _ => Err(ScatterError::Config("boundary needs either both a and b or a kind".into())),
        }
    }

    pub fn from_pair(bp: &BoundaryPair) -> Self {
        Self { n: bp.n, a: Some(matrix_to_entries(&bp.a)), b: Some(matrix_to_entries(&bp.b)), kind: None, theta: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralBlocks {
    pub a1: MatrixEntries,
    pub a2: MatrixEntries,
    pub b1: MatrixEntries,
    pub b2: MatrixEntries,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionFile {
    /// Λ as an n×n matrix.
    Delta(MatrixEntries),
    /// n×2n row blocks of the transmission condition.
    General(GeneralBlocks),
}

/// `{n, potential: {cells}, interaction: {delta: Λ} | {general: {a1, a2, b1, b2}}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineFile {
    pub n: usize,
    pub potential: LineCells,
    pub interaction: InteractionFile,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LineCells {
    #[serde(default)]
    pub cells: Vec<CellFile>,
}

impl LineFile {
    pub fn to_problem(&self) -> Result<LineProblem> {
        let n = self.n;
        let v = PotentialFile { n, cells: self.potential.cells.clone() }.to_line()?;
        let interaction = match &self.interaction {
            InteractionFile::Delta(l) => Interaction::Delta(matrix_from_entries(n, n, l)?),
            InteractionFile::General(g) => Interaction::General {
                a1: matrix_from_entries(n, 2 * n, &g.a1)?,
                a2: matrix_from_entries(n, 2 * n, &g.a2)?,
                b1: matrix_from_entries(n, 2 * n, &g.b1)?,
                b2: matrix_from_entries(n, 2 * n, &g.b2)?,
            },
        };
        LineProblem::new(v, interaction)
    }

    pub fn from_problem(lp: &LineProblem) -> Self {
        let interaction = match &lp.interaction {
            Interaction::Delta(l) => InteractionFile::Delta(matrix_to_entries(l)),
            Interaction::General { a1, a2, b1, b2 } => InteractionFile::General(GeneralBlocks {
                a1: matrix_to_entries(a1),
                a2: matrix_to_entries(a2),
                b1: matrix_to_entries(b1),
                b2: matrix_to_entries(b2),
            }),
        };
        Self { n: lp.n, potential: LineCells { cells: PotentialFile::from_line(&lp.v).cells }, interaction }
    }
}

/// Tolerances a scenario may override.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub unitarity: f64,
    pub wave_op: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { unitarity: 1e-6, wave_op: 2e-3, oracle: 1e-6 }
    }
}

/// A scenario: a half-line problem (potential and boundary) or a line problem, with grid,
/// tolerances and output directory. Relative paths resolve against the config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub potential: Option<String>,
    pub boundary: Option<String>,
    pub line: Option<String>,
    pub grid: KXGrid,
    pub window: Option<f64>,
    pub tolerances: Tolerances,
    pub output: Option<String>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let t = &self.tolerances;
        if !(t.unitarity > 0.0 && t.wave_op > 0.0 && t.oracle > 0.0) {
            return Err(ScatterError::Config("tolerances must be positive".into()));
        }
        if self.line.is_some() && (self.potential.is_some() || self.boundary.is_some()) {
            return Err(ScatterError::Config("a scenario is either a line problem or a half-line problem".into()));
        }
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ScatterError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Parse JSON, reporting errors as `path:line:column: message`.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg.strip_suffix(&format!(" at line {} column {}", e.line(), e.column())).unwrap_or(&msg);
        ScatterError::Config(format!("{origin}:{}:{}: {msg}", e.line(), e.column()))
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    parse_json(&read_text(path)?, &path.display().to_string())
}

pub fn read_potential(path: &Path) -> Result<PotentialSpec> {
    read_json::<PotentialFile>(path)?.to_half_line()
}

pub fn read_boundary(path: &Path) -> Result<BoundaryPair> {
    read_json::<BoundaryFile>(path)?.to_pair()
}

pub fn read_line(path: &Path) -> Result<LineProblem> {
    read_json::<LineFile>(path)?.to_problem()
}

pub fn read_scenario(path: &Path) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = read_json(path)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file structures serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_round_trip() {
        let text = r#"{"n": 1, "cells": [{"a": 0.0, "b": 1.0, "matrix": [[1.0, 0.0]]}]}"#;
        let f: PotentialFile = parse_json(text, "inline").unwrap();
        let v = f.to_half_line().unwrap();
        assert_eq!(v.value_at(0.5)[(0, 0)], C64::new(1.0, 0.0));
        let again: PotentialFile = parse_json(&to_json(&PotentialFile::from_half_line(&v)), "inline").unwrap();
        assert_eq!(again.cells.len(), 1);
    }

    #[test]
    fn line_file_forms() {
        let d = r#"{"n": 1, "potential": {"cells": []}, "interaction": {"delta": [[2.0, 0.0]]}}"#;
        let lp = parse_json::<LineFile>(d, "inline").unwrap().to_problem().unwrap();
        assert_eq!(lp.coupling().unwrap()[(0, 0)], C64::new(2.0, 0.0));
        let back = parse_json::<LineFile>(&to_json(&LineFile::from_problem(&lp)), "inline").unwrap();
        assert!(matches!(back.interaction, InteractionFile::Delta(_)));
    }

    #[test]
    fn errors_carry_location() {
        let err = parse_json::<PotentialFile>("{\n  \"n\": 1,\n  \"cells\": [oops]\n}", "bad.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.json:3:"), "{msg}");
    }

    #[test]
    fn boundary_kinds() {
        let f: BoundaryFile = parse_json(r#"{"n": 2, "kind": "dirichlet"}"#, "inline").unwrap();
        assert_eq!(f.to_pair().unwrap().b[(1, 1)], C64::new(-1.0, 0.0));
        let f: BoundaryFile = parse_json(r#"{"n": 1, "kind": "robin"}"#, "inline").unwrap();
        assert!(f.to_pair().is_err());
    }
}
