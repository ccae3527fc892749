//! Closed-form lifted flows against numeric integration, with chart
//! Jacobian checks of volume preservation.

use num::complex::Complex64;
use num::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{GaussianRational, U, V};
use crate::approx::numeric_chart_jacobian;
use crate::error::LiftError;
use crate::lifting::{lifted_flow, weighted_chart_jacobian, BasePair, Chart, LiftedFlow, Side};
use crate::numeric::max_abs;
use crate::suspension::{SurfacePoint, SuspensionContext};

/// Step for the central differences of the chart Jacobian.
pub const JACOBIAN_FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowAuditRecord {
    pub field: String,
    pub point: usize,
    pub t: String,
    /// Sup-norm gap between the closed form and RK4.
    pub deviation: f64,
    /// `|det - 1|` of the numerically differentiated time-`t` map on the
    /// chart whose coordinate the flow preserves; absent when that
    /// coordinate vanishes at the point.
    pub chart_det_error: Option<f64>,
    /// Whether the exact weighted chart determinant equals one.
    pub exact_weighted_det_one: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowAuditReport {
    pub records: Vec<FlowAuditRecord>,
    /// Fields without a polynomial flow, which have no closed form to audit.
    pub skipped: Vec<String>,
    pub errors: Vec<String>,
    pub max_deviation: f64,
    pub max_chart_det_error: f64,
    pub tol: f64,
    pub det_tol: f64,
    pub passed: bool,
}

/// Audit times `1/4, 1/2, 3/4, 1`.
pub fn default_times() -> Vec<GaussianRational> {
    (1..=4).map(|k| GaussianRational::from_frac(k, 4)).collect()
}

fn preserved_chart(side: Side) -> (Chart, usize) {
    match side {
        Side::U => (Chart::V, V),
        Side::V => (Chart::U, U),
    }
}

fn audit_one(flow: &LiftedFlow, label: &str, ctx: &SuspensionContext, index: usize, point: &SurfacePoint, t: &GaussianRational) -> Result<FlowAuditRecord, LiftError> {
    let x = point.to_complex();
    let tc = t.to_complex();
    let closed = flow.apply_float(&x, tc)?;
    let numeric = flow.integrate_numeric(&x, tc)?;
    let diff: Vec<Complex64> = closed.iter().zip(&numeric).map(|(a, b)| a - b).collect();
    let (chart, coord) = preserved_chart(flow.side());
    let chart_det_error = (x[coord].norm() > 0.0).then(|| {
        let det = numeric_chart_jacobian(|y| flow.apply_float(y, tc).expect("closed form"), &x, chart, ctx, JACOBIAN_FD_STEP);
        (det - Complex64::one()).norm()
    });
    let exact_weighted_det_one = match (point.as_exact(), flow.at_time(t)) {
        (Some(p), Some(map)) => {
            let other = match chart {
                Chart::U => Chart::V,
                Chart::V => Chart::U,
            };
            let mut ok = true;
            for c in [chart, other] {
                match weighted_chart_jacobian(&map, ctx, c, p) {
                    Ok(w) => ok &= w.is_one(),
                    Err(_) => continue,
                }
            }
            Some(ok)
        }
        _ => None,
    };
    Ok(FlowAuditRecord {
        field: label.to_string(),
        point: index,
        t: t.to_string(),
        deviation: max_abs(&diff),
        chart_det_error,
        exact_weighted_det_one,
    })
}

/// Audits the `u`- and `v`-lifts of both fields of every pair.
pub fn flow_audit(ctx: &SuspensionContext, pairs: &[BasePair], points: &[SurfacePoint], times: &[GaussianRational], tol: f64, det_tol: f64) -> FlowAuditReport {
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut errors = Vec::new();
    for (k, bp) in pairs.iter().enumerate() {
        for (name, base) in [("nu", &bp.alpha), ("mu", &bp.beta)] {
            for side in [Side::U, Side::V] {
                let label = format!("pair{k}:{name}_{side}");
                let flow = match lifted_flow(base, ctx, side) {
                    Ok(f) => f,
                    Err(e) => {
                        errors.push(format!("{label}: {e}"));
                        continue;
                    }
                };
                if flow.symbolic().is_none() {
                    skipped.push(label);
                    continue;
                }
                let jobs: Vec<(usize, &GaussianRational)> = (0..points.len()).flat_map(|i| times.iter().map(move |t| (i, t))).collect();
                let out: Vec<Result<FlowAuditRecord, LiftError>> = jobs
                    .par_iter()
                    .map(|&(i, t)| audit_one(&flow, &label, ctx, i, &points[i], t))
                    .collect();
                for r in out {
                    match r {
                        Ok(rec) => records.push(rec),
                        Err(e) => errors.push(format!("{label}: {e}")),
                    }
                }
            }
        }
    }
    let max_deviation = records.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let max_chart_det_error = records.iter().filter_map(|r| r.chart_det_error).fold(0.0, f64::max);
    let passed = errors.is_empty()
        && !records.is_empty()
        && max_deviation <= tol
        && max_chart_det_error <= det_tol
        && records.iter().all(|r| r.exact_weighted_det_one != Some(false));
    FlowAuditReport {
        records,
        skipped,
        errors,
        max_deviation,
        max_chart_det_error,
        tol,
        det_tol,
        passed,
    }
}
