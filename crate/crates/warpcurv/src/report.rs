//! Tabular curvature reports with deterministic CSV serialization.
//!
//! A report holds one row per grid point (diagonal Ricci entries in both
//! normalizations plus the scalar curvature) and, when the spacetime has a
//! junction, three extra rows at it: the left and right one-sided limits
//! and a `delta` row whose entries are the coefficients of the Dirac delta
//! concentrated there.
//!
//! Serialization is byte-deterministic: numbers are printed with 17
//! significant digits in scientific notation, negative zero is normalized
//! to zero, rows end with a bare newline, and cells that do not apply stay
//! empty.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geometry::{Angles, GeometryError, MultiplyWarpedSpacetime, RicciEntry};
use crate::junction::{analyze_junction, JunctionError, JunctionReport};
use crate::oracle::{oracle_ricci, OracleError, OracleOptions};
use crate::warpfn::Side;

#[derive(Debug, Clone, Error)]
pub enum ReportError {
    #[error("grid is empty")]
    EmptyGrid,
    #[error(
        "grid point t = {t} coincides with the junction; curvature there is \
         distributional and reported in the junction rows"
    )]
    GridPointAtJunction { t: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Junction(#[from] JunctionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// What a row describes: an interior grid point, a one-sided limit at the
/// junction, or the delta coefficients there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Interior,
    JunctionLeft,
    JunctionRight,
    JunctionDelta,
}

impl RowKind {
    fn side_label(self) -> &'static str {
        match self {
            RowKind::Interior => "-",
            RowKind::JunctionLeft => "left",
            RowKind::JunctionRight => "right",
            RowKind::JunctionDelta => "delta",
        }
    }
}

/// One report row: values (or delta coefficients) of the Ricci diagonal in
/// coordinate and orthonormal normalization, the scalar curvature, and
/// optionally the finite-difference residual at this point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub t: f64,
    pub kind: RowKind,
    pub coordinate: Vec<f64>,
    pub orthonormal: Vec<f64>,
    pub scalar: f64,
    /// Largest |analytic - finite difference| entry of the full Ricci
    /// matrix; absent for junction rows and when residuals are off.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub junction: Option<JunctionReport>,
}

/// Options for building a report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportOptions {
    pub angles: Angles,
    /// When set, each interior row also carries the worst disagreement
    /// between the analytic Ricci matrix and the finite-difference one.
    pub residuals: Option<OracleOptions>,
}

/// Column names in serialization order. Fiber columns are named by label
/// and axis; the residual column appears only when requested.
pub fn column_names(m: &MultiplyWarpedSpacetime, residuals: bool) -> Vec<String> {
    let mut index_names = vec!["tt".to_string()];
    for (spec, _) in m.fibers() {
        for axis in 0..spec.dim {
            index_names.push(format!("{}_{}", spec.label, axis));
        }
    }
    let mut cols = vec!["t".to_string(), "side".to_string()];
    cols.extend(index_names.iter().map(|n| format!("ricci_{n}")));
    cols.extend(index_names.iter().map(|n| format!("orth_{n}")));
    cols.push("scalar".to_string());
    if residuals {
        cols.push("residual_max".to_string());
    }
    cols
}

fn split_entries(entries: &[RicciEntry]) -> (Vec<f64>, Vec<f64>) {
    (
        entries.iter().map(|e| e.coordinate).collect(),
        entries.iter().map(|e| e.orthonormal).collect(),
    )
}

/// Worst absolute disagreement between the analytic Ricci matrix (diagonal
/// by construction) and the finite-difference one at a single grid point.
pub fn ricci_residual(
    m: &MultiplyWarpedSpacetime,
    t: f64,
    angles: &Angles,
    opts: &OracleOptions,
) -> Result<f64, ReportError> {
    let entries = m.ricci_components(t, Side::Auto, angles)?;
    residual_at(m, t, &entries, angles, opts)
}

fn residual_at(
    m: &MultiplyWarpedSpacetime,
    t: f64,
    entries: &[RicciEntry],
    angles: &Angles,
    opts: &OracleOptions,
) -> Result<f64, ReportError> {
    let fd = oracle_ricci(m, t, angles, opts)?;
    let n = fd.nrows();
    let mut analytic = DMatrix::zeros(n, n);
    for (i, e) in entries.iter().enumerate() {
        analytic[(i, i)] = e.coordinate;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((analytic[(i, j)] - fd[(i, j)]).abs());
        }
    }
    Ok(worst)
}

/// Evaluate curvature on a grid of base points (plus junction rows when the
/// spacetime has one) and package everything for serialization.
pub fn grid_report(
    m: &MultiplyWarpedSpacetime,
    grid: &[f64],
    options: &ReportOptions,
) -> Result<CurvatureReport, ReportError> {
    if grid.is_empty() {
        return Err(ReportError::EmptyGrid);
    }
    let angles = options.angles;
    let mut rows = Vec::with_capacity(grid.len() + 3);
    for &t in grid {
        if m.junction() == Some(t) {
            return Err(ReportError::GridPointAtJunction { t });
        }
        let entries = m.ricci_components(t, Side::Auto, &angles)?;
        let scalar = m.scalar_curvature(t, Side::Auto)?;
        let residual = match &options.residuals {
            Some(opts) => Some(residual_at(m, t, &entries, &angles, opts)?),
            None => None,
        };
        let (coordinate, orthonormal) = split_entries(&entries);
        rows.push(ReportRow {
            t,
            kind: RowKind::Interior,
            coordinate,
            orthonormal,
            scalar,
            residual,
        });
    }

    let junction = analyze_junction(m, &angles)?;
    if let Some(report) = &junction {
        let p = report.junction;
        for (side, kind) in
            [(Side::Left, RowKind::JunctionLeft), (Side::Right, RowKind::JunctionRight)]
        {
            let entries = m.ricci_components(p, side, &angles)?;
            let scalar = m.scalar_curvature(p, side)?;
            let (coordinate, orthonormal) = split_entries(&entries);
            rows.push(ReportRow {
                t: p,
                kind,
                coordinate,
                orthonormal,
                scalar,
                residual: None,
            });
        }
        rows.push(ReportRow {
            t: p,
            kind: RowKind::JunctionDelta,
            coordinate: report.ricci_delta.iter().map(|e| e.coordinate).collect(),
            orthonormal: report.ricci_delta.iter().map(|e| e.orthonormal).collect(),
            scalar: report.scalar_delta,
            residual: None,
        });
    }

    Ok(CurvatureReport {
        columns: column_names(m, options.residuals.is_some()),
        rows,
        junction,
    })
}

/// Fixed-width scientific form with 17 significant digits; -0.0 prints as
/// zero so that equal values always serialize to equal bytes.
pub fn csv_number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

impl CurvatureReport {
    /// Deterministic CSV: header plus one line per row, newline line
    /// endings, empty cells where a value does not apply.
    pub fn to_csv(&self) -> String {
        let has_residual_col =
            self.columns.last().map(|c| c == "residual_max").unwrap_or(false);
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut cells: Vec<String> = Vec::with_capacity(self.columns.len());
            cells.push(csv_number(row.t));
            cells.push(row.kind.side_label().to_string());
            cells.extend(row.coordinate.iter().map(|&v| csv_number(v)));
            cells.extend(row.orthonormal.iter().map(|&v| csv_number(v)));
            cells.push(csv_number(row.scalar));
            if has_residual_col {
                cells.push(row.residual.map(csv_number).unwrap_or_default());
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
