//! Least-squares approximation of divergence-free tangent fields by
//! dictionaries of complete divergence-free fields and their brackets, plus
//! numeric flow and volume audits.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{monomials_up_to, Exponent, GaussianRational, Poly, U, V};
use crate::calculus::{lie_bracket, VectorField};
use crate::criterion::monomial_closure;
use crate::error::ApproxError;
use crate::lifting::{twist_field, Chart, LiftedPair};
use crate::numeric::{max_abs, norm, rk4_with, FloatField, FloatPoly};
use crate::suspension::{divergence_on_suspension, SurfacePoint, SuspensionContext, SuspensionField};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    CompleteLift { pair: String, slot: usize },
    KernelMultiple { pair: String, slot: usize, multiplier: String },
    TwistField { multiplier: String },
    /// Labels of the two bracketed entries (which may themselves have been
    /// pruned from the dictionary).
    Bracket { left: String, right: String },
}

#[derive(Clone, Debug)]
pub struct DictEntry {
    pub label: String,
    pub provenance: Provenance,
    pub field: SuspensionField,
    /// Smallest dictionary degree at which this entry appears.
    pub level: u32,
}

#[derive(Clone, Debug, Default)]
pub struct Dictionary {
    entries: Vec<DictEntry>,
    /// Entries dropped because they were linear combinations of earlier ones.
    pruned: usize,
}

impl Dictionary {
    pub fn entries(&self) -> &[DictEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pruned(&self) -> usize {
        self.pruned
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.label == label)
    }

    /// Reorders entries; used to test permutation invariance of fits.
    pub fn permuted(&self, order: &[usize]) -> Dictionary {
        Dictionary {
            entries: order.iter().map(|&k| self.entries[k].clone()).collect(),
            pruned: self.pruned,
        }
    }
}

/// Incremental sparse row echelon form over `Q(i)`, used to drop dictionary
/// entries that are linear combinations of earlier ones.
#[derive(Default)]
struct Echelon {
    keys: HashMap<(usize, Exponent), usize>,
    /// pivot key -> normalized vector with that leading key
    basis: BTreeMap<usize, BTreeMap<usize, GaussianRational>>,
}

impl Echelon {
    fn vectorize(&mut self, field: &VectorField) -> BTreeMap<usize, GaussianRational> {
        let mut v = BTreeMap::new();
        for (j, c) in field.coeffs().iter().enumerate() {
            for (e, coef) in c.terms() {
                let next = self.keys.len();
                let k = *self.keys.entry((j, e.clone())).or_insert(next);
                v.insert(k, coef.clone());
            }
        }
        v
    }

    /// Adds the field if independent; returns whether it was added. Each
    /// basis vector only has keys at or above its pivot, so eliminating in
    /// increasing key order never revisits a key.
    fn insert(&mut self, field: &VectorField) -> bool {
        let mut v = self.vectorize(field);
        let mut cursor = 0;
        loop {
            let Some((&k, c)) = v.range(cursor..).find(|(k, _)| self.basis.contains_key(k)) else {
                break;
            };
            let c = c.clone();
            let b = &self.basis[&k];
            for (bk, bc) in b {
                let e = v.entry(*bk).or_insert_with(GaussianRational::zero);
                *e -= &(&c * bc);
                if e.is_zero() {
                    v.remove(bk);
                }
            }
            cursor = k + 1;
        }
        let Some((&lead, lc)) = v.iter().next() else {
            return false;
        };
        let inv = lc.inv().expect("nonzero leading coefficient");
        let normalized = v.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        self.basis.insert(lead, normalized);
        true
    }
}

struct Candidate {
    label: String,
    provenance: Provenance,
    field: VectorField,
    level: u32,
}

fn multiplier_degree(p: &Poly) -> u32 {
    p.total_degree().unwrap_or(0)
}

/// Builds the dictionary for degree `degree`: kernel multiples `k * nu`
/// of both fields of every lifted pair (`k` a product of kernel
/// generators, degree at most `degree`), twist fields `h(z)(u d/du - v d/dv)`
/// with `h` a monomial of degree at most `degree`, and single brackets:
/// `[a nu, b mu]` within each lifted pair with `deg a + deg b <= degree`, and
/// `[h twist, nu]` for the lifted fields `nu` themselves.
///
/// Every entry is normal-formed and must have exactly zero divergence.
/// Entries that are linear combinations of earlier ones are dropped; the
/// order is by level, so the dictionary at `D` spans a subspace of the one
/// at `D + 1`.
pub fn build_dictionary(ctx: &SuspensionContext, pairs: &[LiftedPair], degree: u32, include_twists: bool) -> Result<Dictionary, ApproxError> {
    let nvars = ctx.nvars();
    let mut cands: Vec<Candidate> = Vec::new();

    struct Slot<'a> {
        pair: &'a str,
        slot: usize,
        field: &'a VectorField,
        multiples: Vec<(Poly, VectorField)>,
    }
    let mut slots = Vec::new();
    for lp in pairs {
        for (slot, (f, ker)) in [(&lp.first, &lp.ker_first), (&lp.second, &lp.ker_second)].into_iter().enumerate() {
            let multiples = monomial_closure(ker, nvars, degree)
                .into_iter()
                .map(|k| {
                    let fld = f.ambient().scale(&k).reduce(ctx.reducer());
                    (k, fld)
                })
                .collect();
            slots.push(Slot {
                pair: &lp.label,
                slot,
                field: f.ambient(),
                multiples,
            });
        }
    }
    for s in &slots {
        for (k, fld) in &s.multiples {
            let provenance = if k.is_constant() {
                Provenance::CompleteLift {
                    pair: s.pair.to_string(),
                    slot: s.slot,
                }
            } else {
                Provenance::KernelMultiple {
                    pair: s.pair.to_string(),
                    slot: s.slot,
                    multiplier: k.to_string(),
                }
            };
            cands.push(Candidate {
                label: format!("{}/{}*({})", s.pair, s.slot, k),
                provenance,
                field: fld.clone(),
                level: multiplier_degree(k),
            });
        }
    }
    let twists: Vec<(Poly, VectorField)> = if include_twists {
        monomials_up_to(nvars, &ctx.z_vars(), degree)
            .into_iter()
            .map(|e| {
                let h = Poly::monomial(nvars, e, GaussianRational::from_int(1));
                let fld = twist_field(ctx).scale(&h);
                (h, fld)
            })
            .collect()
    } else {
        Vec::new()
    };
    for (h, fld) in &twists {
        cands.push(Candidate {
            label: format!("twist*({h})"),
            provenance: Provenance::TwistField { multiplier: h.to_string() },
            field: fld.clone(),
            level: multiplier_degree(h),
        });
    }
    let mut brackets = Vec::new();
    for pair_slots in slots.chunks(2) {
        let [a, b] = pair_slots else { continue };
        for (ka, fa) in &a.multiples {
            for (kb, fb) in &b.multiples {
                let level = multiplier_degree(ka) + multiplier_degree(kb);
                if level > degree {
                    continue;
                }
                let la = format!("{}/{}*({})", a.pair, a.slot, ka);
                let lb = format!("{}/{}*({})", b.pair, b.slot, kb);
                brackets.push(Candidate {
                    label: format!("[{la}, {lb}]"),
                    field: lie_bracket(fa, fb).reduce(ctx.reducer()),
                    provenance: Provenance::Bracket { left: la, right: lb },
                    level,
                });
            }
        }
    }
    for (h, fh) in &twists {
        for s in &slots {
            let lt = format!("twist*({h})");
            let ls = format!("{}/{}*(1)", s.pair, s.slot);
            brackets.push(Candidate {
                label: format!("[{lt}, {ls}]"),
                provenance: Provenance::Bracket { left: lt, right: ls },
                field: lie_bracket(fh, s.field).reduce(ctx.reducer()),
                level: multiplier_degree(h),
            });
        }
    }
    cands.extend(brackets);
    // stable sort keeps construction order within a level
    cands.sort_by_key(|c| c.level);

    let checked: Vec<Result<SuspensionField, ApproxError>> = cands
        .par_iter()
        .enumerate()
        .map(|(index, c)| {
            let sf = SuspensionField::new(c.field.clone(), ctx)?;
            let div = divergence_on_suspension(&sf, ctx)?;
            if !div.is_zero() {
                return Err(ApproxError::DivergentEntry {
                    index,
                    label: c.label.clone(),
                    divergence: div.to_string(),
                });
            }
            Ok(sf)
        })
        .collect();

    let mut echelon = Echelon::default();
    let mut dict = Dictionary::default();
    for (c, sf) in cands.into_iter().zip(checked) {
        let sf = sf?;
        if c.field.is_zero() || !echelon.insert(&c.field) {
            dict.pruned += 1;
            continue;
        }
        dict.entries.push(DictEntry {
            label: c.label,
            provenance: c.provenance,
            field: sf,
            level: c.level,
        });
    }
    Ok(dict)
}

/// Orthogonal projector onto `ker d_p(uv - f)`: `I - n n^H` with `n` the
/// normalized conjugate gradient.
pub fn tangent_projector(ctx: &SuspensionContext, x: &[Complex64]) -> DMatrix<Complex64> {
    let grad: Vec<Complex64> = ctx.gradient().iter().map(|g| FloatPoly::new(g).eval(x)).collect();
    let m = grad.len();
    let nrm = norm(&grad);
    let mut p = DMatrix::<Complex64>::identity(m, m);
    if nrm == 0.0 {
        return p;
    }
    let nvec: Vec<Complex64> = grad.iter().map(|g| g.conj() / nrm).collect();
    for i in 0..m {
        for j in 0..m {
            p[(i, j)] -= nvec[i] * nvec[j].conj();
        }
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Real and imaginary part per dictionary entry.
    pub coefficients: Vec<(f64, f64)>,
    /// Euclidean norm of the projected residual at each sample.
    pub residual_norms: Vec<f64>,
    pub sup_residual: f64,
    pub l2_residual: f64,
    pub rank: usize,
}

impl FitResult {
    pub fn coefficient(&self, k: usize) -> Complex64 {
        Complex64::new(self.coefficients[k].0, self.coefficients[k].1)
    }
}

/// Relative cutoff for singular values in the least-squares solve.
pub const SVD_CUTOFF: f64 = 1e-12;

/// Minimizes `sum_p |P_p (target(p) - sum_k c_k entry_k(p))|^2` over complex
/// `c` through the real embedding, with unit-norm column scaling and the
/// minimum-norm solution on rank deficiency.
pub fn fit_field(target: &SuspensionField, dict: &Dictionary, samples: &[SurfacePoint], ctx: &SuspensionContext) -> Result<FitResult, ApproxError> {
    if dict.is_empty() {
        return Err(ApproxError::EmptyDictionary);
    }
    if samples.is_empty() {
        return Err(ApproxError::NoSamples);
    }
    let div = divergence_on_suspension(target, ctx)?;
    if !div.is_zero() {
        return Err(ApproxError::DivergentTarget(div.to_string()));
    }
    let m = ctx.nvars();
    let k = dict.len();
    let entries: Vec<FloatField> = dict.entries.iter().map(|e| FloatField::new(e.field.ambient())).collect();
    let tf = FloatField::new(target.ambient());
    let points: Vec<Vec<Complex64>> = samples.iter().map(SurfacePoint::to_complex).collect();

    // per-point blocks: projected entries (m x k) and projected target (m)
    let blocks: Vec<(DMatrix<Complex64>, DVector<Complex64>)> = points
        .par_iter()
        .map(|x| {
            let proj = tangent_projector(ctx, x);
            let mut a = DMatrix::<Complex64>::zeros(m, k);
            for (c, e) in entries.iter().enumerate() {
                a.set_column(c, &DVector::from_vec(e.eval(x)));
            }
            let b = DVector::from_vec(tf.eval(x));
            (&proj * a, &proj * b)
        })
        .collect();
    let rows = m * points.len();
    let mut a = DMatrix::<Complex64>::zeros(rows, k);
    let mut b = DVector::<Complex64>::zeros(rows);
    for (p, (ab, bb)) in blocks.iter().enumerate() {
        a.view_mut((p * m, 0), (m, k)).copy_from(ab);
        b.rows_mut(p * m, m).copy_from(bb);
    }

    let scales: Vec<f64> = (0..k)
        .map(|c| {
            let s = a.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if s > 0.0 {
                1.0 / s
            } else {
                1.0
            }
        })
        .collect();
    let mut re = DMatrix::<f64>::zeros(2 * rows, 2 * k);
    let mut rhs = DVector::<f64>::zeros(2 * rows);
    for r in 0..rows {
        for c in 0..k {
            let z = a[(r, c)] * scales[c];
            re[(r, c)] = z.re;
            re[(r, c + k)] = -z.im;
            re[(r + rows, c)] = z.im;
            re[(r + rows, c + k)] = z.re;
        }
        rhs[r] = b[r].re;
        rhs[r + rows] = b[r].im;
    }
    let svd = re.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = SVD_CUTOFF * smax.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let x = svd.solve(&rhs, eps).expect("singular vectors were computed");
    let coeffs: Vec<Complex64> = (0..k).map(|c| Complex64::new(x[c], x[c + k]) * scales[c]).collect();

    let coeff_vec = DVector::from_vec(coeffs.clone());
    let resid = &b - &a * &coeff_vec;
    let residual_norms: Vec<f64> = (0..points.len()).map(|p| resid.rows(p * m, m).norm()).collect();
    let sup_residual = residual_norms.iter().cloned().fold(0.0, f64::max);
    let l2_residual = resid.norm();
    Ok(FitResult {
        coefficients: coeffs.iter().map(|c| (c.re, c.im)).collect(),
        residual_norms,
        sup_residual,
        l2_residual,
        rank: rank / 2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub degree: u32,
    pub entries: usize,
    /// Best sup residual among dictionaries of degree at most `degree`.
    pub sup_residual: f64,
    /// Sup residual of the least-squares fit at this degree.
    pub fit_sup_residual: f64,
    pub l2_residual: f64,
    /// Numerical rank of the sampled system; below `entries` the fit is
    /// not unique and may differ from the target away from the samples.
    pub rank: usize,
}

/// Sup residuals for dictionaries of increasing degree. Least squares
/// minimizes the L2 error, so the raw sup residual of a larger dictionary
/// can exceed that of a smaller one; `sup_residual` therefore reports the
/// best fit seen so far, which a larger dictionary can always reproduce.
pub fn residual_curve(
    target: &SuspensionField,
    ctx: &SuspensionContext,
    pairs: &[LiftedPair],
    samples: &[SurfacePoint],
    degrees: std::ops::RangeInclusive<u32>,
    include_twists: bool,
) -> Result<Vec<CurvePoint>, ApproxError> {
    let mut out: Vec<CurvePoint> = Vec::new();
    let mut best = f64::INFINITY;
    for d in degrees {
        let dict = build_dictionary(ctx, pairs, d, include_twists)?;
        let fit = fit_field(target, &dict, samples, ctx)?;
        best = best.min(fit.sup_residual);
        out.push(CurvePoint {
            degree: d,
            entries: dict.len(),
            sup_residual: best,
            fit_sup_residual: fit.sup_residual,
            l2_residual: fit.l2_residual,
            rank: fit.rank,
        });
    }
    Ok(out)
}

/// Evaluates `sum_k c_k entry_k` at a point.
pub fn fitted_field_eval(entries: &[FloatField], coeffs: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::zero(); x.len()];
    for (e, c) in entries.iter().zip(coeffs) {
        if *c == Complex64::zero() {
            continue;
        }
        for (a, v) in acc.iter_mut().zip(e.eval(x)) {
            *a += c * v;
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowAuditRow {
    pub point: usize,
    pub t: f64,
    pub deviation: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowAudit {
    pub rows: Vec<FlowAuditRow>,
    pub passed: bool,
}

/// Floor on the residual used in the companion bound, so that exact
/// dictionary members are not held to a bound below rounding error.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Compares RK4 flows of the fitted combination and of the target from the
/// first `npoints` samples for `t` in `(0, t_max]`, against the bound
/// `10 * max(sup, floor) * t`.
pub fn fit_flow_audit(
    target: &SuspensionField,
    dict: &Dictionary,
    fit: &FitResult,
    samples: &[SurfacePoint],
    npoints: usize,
    t_max: f64,
    nsteps: usize,
) -> FlowAudit {
    let entries: Vec<FloatField> = dict.entries.iter().map(|e| FloatField::new(e.field.ambient())).collect();
    let coeffs: Vec<Complex64> = (0..dict.len()).map(|k| fit.coefficient(k)).collect();
    let tf = FloatField::new(target.ambient());
    let eps = fit.sup_residual.max(RESIDUAL_FLOOR);
    let mut rows = Vec::new();
    for (pi, s) in samples.iter().take(npoints).enumerate() {
        let x0 = s.to_complex();
        for step in 1..=nsteps {
            let t = t_max * step as f64 / nsteps as f64;
            let tt = Complex64::new(t, 0.0);
            let a = rk4_with(|x| fitted_field_eval(&entries, &coeffs, x), &x0, tt, 64);
            let b = rk4_with(|x| tf.eval(x), &x0, tt, 64);
            let deviation = match (a, b) {
                (Ok(a), Ok(b)) => max_abs(&a.iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>()),
                _ => f64::INFINITY,
            };
            rows.push(FlowAuditRow {
                point: pi,
                t,
                deviation,
                bound: 10.0 * eps * t,
            });
        }
    }
    let passed = rows.iter().all(|r| r.deviation <= r.bound);
    FlowAudit { rows, passed }
}

/// Chart coordinates of a point: `(u, z)` or `(v, z)`.
fn chart_coords(x: &[Complex64], chart: Chart) -> Vec<Complex64> {
    let c = match chart {
        Chart::U => U,
        Chart::V => V,
    };
    let mut out = vec![x[c]];
    out.extend_from_slice(&x[2..]);
    out
}

fn from_chart(y: &[Complex64], chart: Chart, f: &FloatPoly) -> Vec<Complex64> {
    let mut x = vec![Complex64::zero(); y.len() + 1];
    x[2..].copy_from_slice(&y[1..]);
    let (c, dep) = match chart {
        Chart::U => (U, V),
        Chart::V => (V, U),
    };
    x[c] = y[0];
    x[dep] = f.eval(&x) / y[0];
    x
}

/// Numerically differentiated chart Jacobian determinant of a point map.
pub fn numeric_chart_jacobian<F>(map: F, x: &[Complex64], chart: Chart, ctx: &SuspensionContext, h: f64) -> Complex64
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let fp = FloatPoly::new(ctx.f());
    let y0 = chart_coords(x, chart);
    let m = y0.len();
    let mut jac = DMatrix::<Complex64>::zeros(m, m);
    for c in 0..m {
        let mut yp = y0.clone();
        let mut ym = y0.clone();
        yp[c] += h;
        ym[c] -= h;
        let fp_img = chart_coords(&map(&from_chart(&yp, chart, &fp)), chart);
        let fm_img = chart_coords(&map(&from_chart(&ym, chart, &fp)), chart);
        for r in 0..m {
            jac[(r, c)] = (fp_img[r] - fm_img[r]) / (2.0 * h);
        }
    }
    jac.determinant()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeAuditRow {
    pub point: usize,
    pub t: f64,
    /// `det * rho(image) / rho(point)` with `rho = 1 / chart coordinate`.
    pub weighted_det: (f64, f64),
    pub expected: (f64, f64),
    pub error: f64,
}

/// Checks `rho(phi(p)) det D phi(p) = exp(int_0^t div(phi^s p) ds) rho(p)`
/// for the flow of a tangent field, with the divergence of the induced
/// volume form.
pub fn volume_audit(
    field: &SuspensionField,
    ctx: &SuspensionContext,
    points: &[Vec<Complex64>],
    times: &[f64],
    chart: Chart,
) -> Result<Vec<VolumeAuditRow>, ApproxError> {
    let div = divergence_on_suspension(field, ctx)?;
    let fdiv = FloatPoly::new(&div);
    let ff = FloatField::new(field.ambient());
    let steps = 256;
    let coord = match chart {
        Chart::U => U,
        Chart::V => V,
    };
    let mut rows = Vec::new();
    for (pi, x0) in points.iter().enumerate() {
        for &t in times {
            let tt = Complex64::new(t, 0.0);
            let flow = |x: &[Complex64]| rk4_with(|y| ff.eval(y), x, tt, steps).unwrap_or_else(|_| vec![Complex64::new(f64::NAN, 0.0); x.len()]);
            let det = numeric_chart_jacobian(flow, x0, chart, ctx, 1e-4);
            let image = flow(x0);
            let weighted = det * x0[coord] / image[coord];
            // augmented system carries the integral of the divergence
            let mut aug = x0.clone();
            aug.push(Complex64::zero());
            let n = x0.len();
            let integral = rk4_with(
                |y| {
                    let mut d = ff.eval(&y[..n]);
                    d.push(fdiv.eval(&y[..n]));
                    d
                },
                &aug,
                tt,
                steps,
            )
            .map(|y| y[n])
            .unwrap_or(Complex64::new(f64::NAN, 0.0));
            let expected = integral.exp();
            rows.push(VolumeAuditRow {
                point: pi,
                t,
                weighted_det: (weighted.re, weighted.im),
                expected: (expected.re, expected.im),
                error: (weighted - expected).norm(),
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedEntry {
    pub label: String,
    pub provenance: Provenance,
    pub coefficient: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub target: Vec<String>,
    pub samples: usize,
    pub include_twists: bool,
    pub curve: Vec<CurvePoint>,
    /// Whether the least-squares residual in the L2 sense never grows with
    /// the degree (up to rounding).
    pub l2_non_increasing: bool,
    /// Smallest degree attaining the best sup residual; the fit and the
    /// flow audit below refer to it.
    pub best_degree: u32,
    pub best_fit: Vec<FittedEntry>,
    pub best_rank: usize,
    pub flow_audit: FlowAudit,
    pub tol: f64,
    /// Sup residual at the top degree is within `tol`.
    pub reproduced: bool,
}

impl ApproxReport {
    pub fn sup_non_increasing(&self) -> bool {
        self.curve.windows(2).all(|w| w[1].sup_residual <= w[0].sup_residual)
    }

    pub fn top_sup_residual(&self) -> f64 {
        self.curve.last().map_or(f64::INFINITY, |c| c.sup_residual)
    }
}

/// Relative and absolute slack for the L2 monotonicity check.
const L2_SLACK: (f64, f64) = (1e-9, 1e-12);

/// Residual curve for degrees `0..=max_degree`, the best fit (smallest
/// degree attaining the best sup residual), and its flow-audit companion on
/// the first five samples up to `t = 0.1`.
pub fn run_approx(
    target: &SuspensionField,
    ctx: &SuspensionContext,
    pairs: &[LiftedPair],
    samples: &[SurfacePoint],
    max_degree: u32,
    include_twists: bool,
    tol: f64,
) -> Result<ApproxReport, ApproxError> {
    let curve = residual_curve(target, ctx, pairs, samples, 0..=max_degree, include_twists)?;
    let l2_non_increasing = curve
        .windows(2)
        .all(|w| w[1].l2_residual <= w[0].l2_residual * (1.0 + L2_SLACK.0) + L2_SLACK.1);
    let best = curve.last().map_or(0.0, |c| c.sup_residual);
    let best_degree = curve.iter().find(|c| c.fit_sup_residual == best).map_or(0, |c| c.degree);
    let dict = build_dictionary(ctx, pairs, best_degree, include_twists)?;
    let fit = fit_field(target, &dict, samples, ctx)?;
    let flow_audit = fit_flow_audit(target, &dict, &fit, samples, 5, 0.1, 4);
    let best_fit = dict
        .entries()
        .iter()
        .zip(&fit.coefficients)
        .map(|(e, c)| FittedEntry {
            label: e.label.clone(),
            provenance: e.provenance.clone(),
            coefficient: *c,
        })
        .collect();
    let reproduced = curve.last().is_some_and(|c| c.sup_residual <= tol);
    Ok(ApproxReport {
        target: target.ambient().coeffs().iter().map(|p| p.to_string()).collect(),
        samples: samples.len(),
        include_twists,
        curve,
        l2_non_increasing,
        best_degree,
        best_fit,
        best_rank: fit.rank,
        flow_audit,
        tol,
        reproduced,
    })
}

/// `[first, second]` of a lifted pair, normal-formed: a target inside the
/// degree-zero dictionary span.
pub fn default_target(ctx: &SuspensionContext, pair: &LiftedPair) -> Result<SuspensionField, ApproxError> {
    let br = lie_bracket(pair.first.ambient(), pair.second.ambient()).reduce(ctx.reducer());
    Ok(SuspensionField::new(br, ctx)?)
}
