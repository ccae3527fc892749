//! Degree-truncated semi-compatibility certificates, lifted ideals, spanning
//! ranks, and the runner that assembles them into a report.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use num::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{monomials_up_to, ExactMatrix, Exponent, GaussianRational, Poly, UvReducer, U, V};
use crate::calculus::{lie_bracket, VectorField};
use crate::error::{CriterionError, LiftError};
use crate::lifting::{check_basepoint, extend_trivially, jo_family, lift_pairs, wedge2, BasePair, LiftedPair, PointPair};
use crate::suspension::{divergence_on_suspension, sample_points, smoothness_witness, tangent_basis, SampleSpec, SmoothnessWitness, SuspensionContext};

/// Generators verified to lie in the kernel of a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelFamily {
    owner: VectorField,
    generators: Vec<Poly>,
}

impl KernelFamily {
    pub fn owner(&self) -> &VectorField {
        &self.owner
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }
}

pub fn verify_kernel(theta: &VectorField, family: &[Poly]) -> Result<KernelFamily, CriterionError> {
    for (index, k) in family.iter().enumerate() {
        let image = theta.apply(k);
        if !image.is_zero() {
            return Err(CriterionError::NotInKernel {
                index,
                generator: k.to_string(),
                image: image.to_string(),
            });
        }
    }
    Ok(KernelFamily {
        owner: theta.clone(),
        generators: family.to_vec(),
    })
}

/// `{h * u^i v^j : h in I, i + j <= uv_degree}`, normal-formed, zeros and
/// duplicates dropped.
pub fn lift_ideal(ideal: &[Poly], ctx: &SuspensionContext, uv_degree: u32) -> Vec<Poly> {
    let monos = monomials_up_to(ctx.nvars(), &[U, V], uv_degree);
    let mut out: Vec<Poly> = Vec::new();
    for h in ideal {
        for m in &monos {
            let p = ctx.normal_form(&h.mul_monomial(m));
            if !p.is_zero() && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// All products of generators with total degree at most `max_degree`,
/// starting from `1`. Generators of degree zero are skipped since they add
/// nothing to the span.
pub fn monomial_closure(gens: &[Poly], nvars: usize, max_degree: u32) -> Vec<Poly> {
    let gens: Vec<&Poly> = gens.iter().filter(|g| g.total_degree().is_some_and(|d| d > 0)).collect();
    let mut out = vec![Poly::one(nvars)];
    let mut frontier = vec![(Poly::one(nvars), 0usize)];
    while let Some((p, start)) = frontier.pop() {
        let dp = p.total_degree().unwrap_or(0);
        for (k, g) in gens.iter().enumerate().skip(start) {
            if dp + g.total_degree().unwrap() > max_degree {
                continue;
            }
            let q = &p * *g;
            frontier.push((q.clone(), k));
            out.push(q);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTerm {
    pub coeff: GaussianRational,
    pub a: Poly,
    pub b: Poly,
}

/// `target = sum coeff * a * b` (modulo `uv - f` when a reducer was used).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub target: Poly,
    pub terms: Vec<WitnessTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateStatus {
    Success,
    Failure { unreachable: Vec<Poly> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiCompatCertificate {
    pub degree: u32,
    pub ideal: Vec<Poly>,
    pub vars: Vec<usize>,
    pub targets: usize,
    pub status: CertificateStatus,
    pub witnesses: Vec<Witness>,
}

impl SemiCompatCertificate {
    pub fn success(&self) -> bool {
        self.status == CertificateStatus::Success
    }
}

/// Variables touched by the fields, kernels and ideal generators.
fn default_vars(nu: &KernelFamily, mu: &KernelFamily, h: &[Poly]) -> Vec<usize> {
    let mut vars = BTreeSet::new();
    for fam in [nu, mu] {
        for (j, c) in fam.owner.coeffs().iter().enumerate() {
            if !c.is_zero() {
                vars.insert(j);
                vars.extend(c.support_vars());
            }
        }
        for k in &fam.generators {
            vars.extend(k.support_vars());
        }
    }
    for p in h {
        vars.extend(p.support_vars());
    }
    vars.into_iter().collect()
}

/// Certifies, up to degree `degree`, that every `h * m` (`h` in `h_gens`,
/// `m` a monomial of degree at most `degree` in `vars`) lies in the span of
/// products `a * b` with `a`, `b` in the monomial closures of the kernel
/// families. With a reducer, all comparisons happen modulo `uv - f`.
pub fn semicompat_certificate(
    nu: &KernelFamily,
    mu: &KernelFamily,
    h_gens: &[Poly],
    degree: u32,
    reducer: Option<&UvReducer>,
    vars: Option<&[usize]>,
) -> Result<SemiCompatCertificate, CriterionError> {
    if h_gens.is_empty() || h_gens.iter().any(Poly::is_zero) {
        return Err(CriterionError::EmptyIdeal);
    }
    let nvars = nu.owner.nvars();
    let vars = vars.map(<[usize]>::to_vec).unwrap_or_else(|| default_vars(nu, mu, h_gens));
    let reduce = |p: &Poly| match reducer {
        Some(r) => r.reduce(p),
        None => p.clone(),
    };
    let hdeg = h_gens.iter().filter_map(Poly::total_degree).max().unwrap_or(0);
    let closure_degree = degree + hdeg;
    let ka = monomial_closure(&nu.generators, nvars, closure_degree);
    let kb = monomial_closure(&mu.generators, nvars, closure_degree);

    let mut products: Vec<(usize, usize, Poly)> = Vec::new();
    let mut seen: HashSet<Poly> = HashSet::new();
    for (i, a) in ka.iter().enumerate() {
        for (j, b) in kb.iter().enumerate() {
            let p = reduce(&(a * b));
            if p.is_zero() || !seen.insert(p.clone()) {
                continue;
            }
            products.push((i, j, p));
        }
    }
    let targets: Vec<Poly> = h_gens
        .iter()
        .flat_map(|h| monomials_up_to(nvars, &vars, degree).into_iter().map(move |m| h.mul_monomial(&m)))
        .map(|p| reduce(&p))
        .collect();

    let mut rows: BTreeMap<Exponent, usize> = BTreeMap::new();
    for p in products.iter().map(|x| &x.2).chain(&targets) {
        for (e, _) in p.terms() {
            let next = rows.len();
            rows.entry(e.clone()).or_insert(next);
        }
    }
    let mut m = ExactMatrix::zeros(rows.len(), products.len());
    for (c, (_, _, p)) in products.iter().enumerate() {
        for (e, coef) in p.terms() {
            m[(rows[e], c)] = coef.clone();
        }
    }
    let rhs: Vec<Vec<GaussianRational>> = targets
        .iter()
        .map(|t| {
            let mut b = vec![GaussianRational::zero(); rows.len()];
            for (e, coef) in t.terms() {
                b[rows[e]] = coef.clone();
            }
            b
        })
        .collect();
    let sols = m.solve_many(&rhs);

    let mut witnesses = Vec::new();
    let mut unreachable = Vec::new();
    for (t, sol) in targets.iter().zip(sols) {
        match sol {
            Some(x) => witnesses.push(Witness {
                target: t.clone(),
                terms: x
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| WitnessTerm {
                        coeff: c.clone(),
                        a: ka[products[k].0].clone(),
                        b: kb[products[k].1].clone(),
                    })
                    .collect(),
            }),
            None => unreachable.push(t.clone()),
        }
    }
    let status = if unreachable.is_empty() {
        CertificateStatus::Success
    } else {
        CertificateStatus::Failure { unreachable }
    };
    Ok(SemiCompatCertificate {
        degree,
        ideal: h_gens.to_vec(),
        vars,
        targets: targets.len(),
        status,
        witnesses,
    })
}

/// Re-expands every witness independently of the solver: the products must
/// lie in the kernels and sum to the target.
pub fn reverify_certificate(cert: &SemiCompatCertificate, nu: &VectorField, mu: &VectorField, reducer: Option<&UvReducer>) -> bool {
    let reduce = |p: &Poly| match reducer {
        Some(r) => r.reduce(p),
        None => p.clone(),
    };
    cert.witnesses.iter().all(|w| {
        let nvars = w.target.nvars();
        let mut acc = Poly::zero(nvars);
        for t in &w.terms {
            if !nu.apply(&t.a).is_zero() || !mu.apply(&t.b).is_zero() {
                return false;
            }
            acc = &acc + &(&t.a * &t.b).scale(&t.coeff);
        }
        reduce(&acc) == reduce(&w.target)
    })
}

/// Smallest `D <= max_degree` at which the certificate succeeds.
pub fn smallest_successful_degree(
    nu: &KernelFamily,
    mu: &KernelFamily,
    h_gens: &[Poly],
    max_degree: u32,
    reducer: Option<&UvReducer>,
    vars: Option<&[usize]>,
) -> Result<Option<u32>, CriterionError> {
    for d in 0..=max_degree {
        if semicompat_certificate(nu, mu, h_gens, d, reducer, vars)?.success() {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub full: usize,
    /// Indices of pairs whose wedges form a basis of the span.
    pub basis_pairs: Vec<usize>,
}

impl RankReport {
    pub fn is_full(&self) -> bool {
        self.rank == self.full
    }
}

fn binom2(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Rank of the ideal-scaled wedges, each expressed in a basis of
/// `^2 ker d_p(uv - f)`.
pub fn spanning_rank(pairs: &[PointPair], p: &[GaussianRational], ctx: &SuspensionContext) -> Result<RankReport, CriterionError> {
    let basis = tangent_basis(ctx, p)?;
    let dim = basis.len();
    // columns are basis vectors
    let mut bm = ExactMatrix::zeros(ctx.nvars(), dim);
    for (c, w) in basis.iter().enumerate() {
        for (r, x) in w.iter().enumerate() {
            bm[(r, c)] = x.clone();
        }
    }
    let mut vectors: Vec<Vec<GaussianRational>> = Vec::new();
    for pp in pairs {
        vectors.push(pp.a.clone());
        vectors.push(pp.b.clone());
    }
    let coords = bm.solve_many(&vectors);
    let mut columns = Vec::with_capacity(pairs.len());
    for (k, pp) in pairs.iter().enumerate() {
        let a = coords[2 * k]
            .as_ref()
            .ok_or_else(|| CriterionError::Precondition(format!("{}: first vector is not tangent", pp.label)))?;
        let b = coords[2 * k + 1]
            .as_ref()
            .ok_or_else(|| CriterionError::Precondition(format!("{}: second vector is not tangent", pp.label)))?;
        columns.push(wedge2(a, b).iter().map(|x| x * &pp.ideal_value).collect::<Vec<_>>());
    }
    Ok(rank_of_columns(&columns, binom2(dim)))
}

fn rank_of_columns(columns: &[Vec<GaussianRational>], full: usize) -> RankReport {
    let mut m = ExactMatrix::zeros(full, columns.len());
    for (c, col) in columns.iter().enumerate() {
        for (r, x) in col.iter().enumerate() {
            m[(r, c)] = x.clone();
        }
    }
    let pivots = m.rref().pivots;
    RankReport {
        rank: pivots.len(),
        full,
        basis_pairs: pivots,
    }
}

/// Spanning rank on the base `C^n` itself, where the tangent space is all
/// of `C^n`.
pub fn base_spanning_rank(pairs: &[BasePair], x: &[GaussianRational]) -> RankReport {
    let n = pairs.first().map(|p| p.alpha.n()).unwrap_or(0);
    let columns: Vec<Vec<GaussianRational>> = pairs
        .iter()
        .map(|p| {
            let a: Vec<_> = p.alpha.coeffs().iter().map(|c| c.eval(x)).collect();
            let b: Vec<_> = p.beta.coeffs().iter().map(|c| c.eval(x)).collect();
            let s = p.ideal.iter().map(|h| h.eval(x)).find(|v| !v.is_zero()).unwrap_or_else(GaussianRational::zero);
            wedge2(&a, &b).iter().map(|w| w * &s).collect()
        })
        .collect();
    rank_of_columns(&columns, binom2(n))
}

/// Lifted pairs evaluated at a point, each scaled by its first nonvanishing
/// ideal generator.
pub fn point_pairs(lifted: &[LiftedPair], p: &[GaussianRational]) -> Vec<PointPair> {
    lifted
        .iter()
        .map(|lp| PointPair {
            label: lp.label.clone(),
            a: lp.first.ambient().eval(p),
            b: lp.second.ambient().eval(p),
            ideal_value: lp.ideal.iter().map(|h| h.eval(p)).find(|v| !v.is_zero()).unwrap_or_else(GaussianRational::zero),
        })
        .collect()
}

/// Both sides of `fg nu(h) mu = [f nu, gh mu] - [fh nu, g mu]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketCheck {
    pub lhs: VectorField,
    pub rhs: VectorField,
}

impl BracketCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn compatible_bracket_check(nu: &VectorField, mu: &VectorField, h: &Poly, f: &Poly, g: &Poly) -> Result<BracketCheck, CriterionError> {
    let mut violations = Vec::new();
    let nu_h = nu.apply(h);
    if !nu.apply(&nu_h).is_zero() {
        violations.push("nu(h) is not in the kernel of nu".to_string());
    }
    if !mu.apply(h).is_zero() {
        violations.push("h is not in the kernel of mu".to_string());
    }
    if !nu.apply(f).is_zero() {
        violations.push("f is not in the kernel of nu".to_string());
    }
    if !mu.apply(g).is_zero() {
        violations.push("g is not in the kernel of mu".to_string());
    }
    if !violations.is_empty() {
        return Err(CriterionError::Precondition(violations.join("; ")));
    }
    let lhs = mu.scale(&(&(f * g) * &nu_h));
    let rhs = lie_bracket(&nu.scale(f), &mu.scale(&(g * h))).sub(&lie_bracket(&nu.scale(&(f * h)), &mu.scale(g)));
    Ok(BracketCheck { lhs, rhs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cohomology {
    Asserted,
    Unknown,
    Refuted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedAtSamples,
    Failed,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct CriterionConfig {
    pub degree_bound: u32,
    pub samples: SampleSpec,
    /// Attempts per requested point before basepoint sampling gives up.
    pub attempts_per_sample: usize,
    pub smoothness_certificate_degree: Option<u32>,
    pub twist: Option<Poly>,
}

impl CriterionConfig {
    pub fn new(degree_bound: u32, samples: SampleSpec) -> Self {
        Self {
            degree_bound,
            samples,
            attempts_per_sample: 10,
            smoothness_certificate_degree: Some(2),
            twist: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub degree: u32,
    pub targets: usize,
    pub success: bool,
    pub unreachable: Vec<String>,
    pub witnesses_reverified: bool,
    pub smallest_successful_degree: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedPairReport {
    pub label: String,
    pub first: String,
    pub second: String,
    pub divergences: [String; 2],
    pub divergence_free: bool,
    pub kernel_error: Option<String>,
    pub ideal: Vec<String>,
    pub certificate: Option<CertificateSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub index: usize,
    pub alpha: String,
    pub beta: String,
    pub base_divergences: [String; 2],
    pub base_kernel_error: Option<String>,
    pub lifted: Vec<LiftedPairReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub point: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingReport {
    pub requested: usize,
    pub accepted: usize,
    pub attempts: usize,
    pub rejected: Vec<Rejection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRank {
    pub point: Vec<String>,
    pub rank: usize,
    pub full: usize,
    pub lifted_only_rank: usize,
    pub twist: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumptions {
    pub cohomology: Cohomology,
    pub smoothness: SmoothnessWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub n: usize,
    pub f: String,
    pub degree_bound: u32,
    pub seed: u64,
    pub assumptions: Assumptions,
    pub pairs: Vec<PairReport>,
    pub sampling: SamplingReport,
    pub points: Vec<PointRank>,
    pub verdict: Verdict,
    pub explanation: Vec<String>,
}

/// Wall-clock durations per stage in milliseconds; kept out of the report
/// so that reports are reproducible byte for byte.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Timings {
    pub stages: Vec<(String, f64)>,
}

impl Timings {
    fn record(&mut self, stage: &str, start: Instant) {
        self.stages.push((stage.to_string(), start.elapsed().as_secs_f64() * 1e3));
    }
}

fn point_strings(p: &[GaussianRational]) -> Vec<String> {
    p.iter().map(ToString::to_string).collect()
}

fn kernels_of(pair: &LiftedPair) -> Result<(KernelFamily, KernelFamily), CriterionError> {
    Ok((
        verify_kernel(pair.first.ambient(), &pair.ker_first)?,
        verify_kernel(pair.second.ambient(), &pair.ker_second)?,
    ))
}

fn pair_report(index: usize, pair: &BasePair, lifted: &[LiftedPair], ctx: &SuspensionContext, degree_bound: u32, failures: &mut Vec<String>) -> PairReport {
    let base_divergences = [pair.alpha.divergence().to_string(), pair.beta.divergence().to_string()];
    let base_kernel_error = verify_kernel(&extend_trivially(&pair.alpha), &pair.ker_alpha)
        .and_then(|_| verify_kernel(&extend_trivially(&pair.beta), &pair.ker_beta))
        .err()
        .map(|e| e.to_string());
    if let Some(e) = &base_kernel_error {
        failures.push(format!("pair {index}: base kernel check failed: {e}"));
    }
    let lifted: Vec<LiftedPairReport> = lifted
        .par_iter()
        .map(|lp| {
            let d1 = divergence_on_suspension(&lp.first, ctx).map(|p| p.to_string()).unwrap_or_else(|e| e.to_string());
            let d2 = divergence_on_suspension(&lp.second, ctx).map(|p| p.to_string()).unwrap_or_else(|e| e.to_string());
            let divergence_free = d1 == "0" && d2 == "0";
            let kernels = kernels_of(lp);
            let certificate = match &kernels {
                Ok((ka, kb)) => {
                    let r = Some(ctx.reducer());
                    match semicompat_certificate(ka, kb, &lp.ideal, degree_bound, r, None) {
                        Ok(cert) => {
                            let smallest = smallest_successful_degree(ka, kb, &lp.ideal, degree_bound, r, None).ok().flatten();
                            Some(CertificateSummary {
                                degree: degree_bound,
                                targets: cert.targets,
                                success: cert.success(),
                                unreachable: match &cert.status {
                                    CertificateStatus::Success => vec![],
                                    CertificateStatus::Failure { unreachable } => unreachable.iter().map(ToString::to_string).collect(),
                                },
                                witnesses_reverified: reverify_certificate(&cert, lp.first.ambient(), lp.second.ambient(), r),
                                smallest_successful_degree: smallest,
                            })
                        }
                        Err(_) => None,
                    }
                }
                Err(_) => None,
            };
            LiftedPairReport {
                label: lp.label.clone(),
                first: lp.first.ambient().to_string(),
                second: lp.second.ambient().to_string(),
                divergences: [d1, d2],
                divergence_free,
                kernel_error: kernels.err().map(|e| e.to_string()),
                ideal: lp.ideal.iter().map(ToString::to_string).collect(),
                certificate,
            }
        })
        .collect();
    for lp in &lifted {
        if !lp.divergence_free {
            failures.push(format!("{}: nonzero divergence", lp.label));
        }
        if let Some(e) = &lp.kernel_error {
            failures.push(format!("{}: kernel check failed: {e}", lp.label));
        }
        match &lp.certificate {
            Some(c) if c.success && c.witnesses_reverified => {}
            Some(c) if !c.success => failures.push(format!("{}: certificate failed at degree {}", lp.label, c.degree)),
            Some(_) => failures.push(format!("{}: witness re-verification failed", lp.label)),
            None => failures.push(format!("{}: no certificate", lp.label)),
        }
    }
    PairReport {
        index,
        alpha: pair.alpha.to_string(),
        beta: pair.beta.to_string(),
        base_divergences,
        base_kernel_error,
        lifted,
    }
}

/// Runs every finite check of the criterion on the suspension and
/// aggregates a verdict. Sub-check failures are recorded in the report.
pub fn run_vdp_criterion(ctx: &SuspensionContext, pairs: &[BasePair], cohomology: Cohomology, config: &CriterionConfig) -> (CriterionReport, Timings) {
    let mut timings = Timings::default();
    let mut failures: Vec<String> = Vec::new();

    let start = Instant::now();
    let lifted = match lift_pairs(pairs, ctx) {
        Ok(l) => l,
        Err(e) => {
            failures.push(format!("lifting failed: {e}"));
            Vec::new()
        }
    };
    let pair_reports: Vec<PairReport> = pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mine: Vec<LiftedPair> = lifted.iter().filter(|lp| lp.label.starts_with(&format!("pair{k}:"))).cloned().collect();
            pair_report(k, p, &mine, ctx, config.degree_bound, &mut failures)
        })
        .collect();
    timings.record("pairs", start);

    // basepoint rejection sampling
    let start = Instant::now();
    let requested = config.samples.count;
    let mut spec = config.samples.clone();
    spec.count = requested * config.attempts_per_sample.max(1);
    let candidates = match sample_points(ctx, &spec) {
        Ok(c) => c,
        Err(e) => {
            failures.push(format!("sampling failed: {e}"));
            Vec::new()
        }
    };
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    let mut attempts = 0;
    for cand in &candidates {
        if accepted.len() == requested {
            break;
        }
        attempts += 1;
        let Some(p) = cand.as_exact() else {
            continue;
        };
        match check_basepoint(pairs, ctx, p) {
            Ok(()) => accepted.push(p.to_vec()),
            Err(LiftError::BadBasepoint(reason)) => rejected.push(Rejection {
                point: point_strings(p),
                reason,
            }),
            Err(e) => rejected.push(Rejection {
                point: point_strings(p),
                reason: e.to_string(),
            }),
        }
    }
    if accepted.len() < requested {
        failures.push(format!("only {} of {requested} basepoints accepted", accepted.len()));
    }
    let smoothness = smoothness_witness(ctx, &candidates[..attempts.min(candidates.len())], config.smoothness_certificate_degree);
    if !smoothness.ok() {
        failures.push(format!("singular zero-fiber points among samples: {:?}", smoothness.singular_samples));
    }
    timings.record("sampling", start);

    let start = Instant::now();
    let points: Vec<PointRank> = accepted
        .par_iter()
        .map(|p| {
            let lifted_only = spanning_rank(&point_pairs(&lifted, p), p, ctx).map(|r| r.rank).unwrap_or(0);
            match jo_family(pairs, ctx, p, config.twist.as_ref()).map_err(CriterionError::from).and_then(|fam| {
                let r = spanning_rank(&fam.at_point, p, ctx)?;
                Ok((r, fam.twist.map(|(g, _)| g.to_string())))
            }) {
                Ok((r, twist)) => PointRank {
                    point: point_strings(p),
                    rank: r.rank,
                    full: r.full,
                    lifted_only_rank: lifted_only,
                    twist,
                    error: None,
                },
                Err(e) => PointRank {
                    point: point_strings(p),
                    rank: 0,
                    full: binom2(ctx.n() + 1),
                    lifted_only_rank: lifted_only,
                    twist: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let deficient = points.iter().filter(|r| r.rank < r.full).count();
    if deficient > 0 {
        failures.push(format!("{deficient} sample points without full spanning rank"));
    }
    timings.record("ranks", start);

    let mut explanation = Vec::new();
    let verdict = if pairs.is_empty() {
        explanation.push("no pairs given, so nothing spans".to_string());
        Verdict::Failed
    } else if !failures.is_empty() {
        explanation.extend(failures);
        Verdict::Failed
    } else if cohomology != Cohomology::Asserted {
        explanation.push(format!(
            "all finite checks passed, but the cohomological hypothesis is {} rather than asserted",
            match cohomology {
                Cohomology::Unknown => "unknown",
                _ => "refuted",
            }
        ));
        Verdict::Inconclusive
    } else {
        explanation.push(format!("all checks passed at {} sample points", points.len()));
        Verdict::CertifiedAtSamples
    };

    let report = CriterionReport {
        n: ctx.n(),
        f: ctx.f().to_string(),
        degree_bound: config.degree_bound,
        seed: config.samples.seed,
        assumptions: Assumptions { cohomology, smoothness },
        pairs: pair_reports,
        sampling: SamplingReport {
            requested,
            accepted: accepted.len(),
            attempts,
            rejected,
        },
        points,
        verdict,
        explanation,
    };
    (report, timings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, z};
    use crate::lifting::{lift_pair, BaseField, Orientation};
    use crate::suspension::{make_suspension, Region};

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, n).unwrap()
    }

    fn coordinate_pair(n: usize) -> BasePair {
        BasePair {
            alpha: BaseField::coordinate(n, 1),
            beta: BaseField::coordinate(n, 2),
            ker_alpha: vec![p("z2", n)],
            ker_beta: vec![p("z1", n)],
            ideal: vec![Poly::one(n + 2)],
        }
    }

    #[test]
    fn kernel_examples() {
        let d1 = VectorField::coordinate(4, z(1));
        assert!(verify_kernel(&d1, &[p("z2", 2), p("z2^2", 2)]).is_ok());
        let err = verify_kernel(&d1, &[p("z2", 2), p("z1", 2)]).unwrap_err();
        assert!(matches!(err, CriterionError::NotInKernel { index: 1, .. }));
    }

    #[test]
    fn lifted_kernels_verify() {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        let lp = lift_pair(&coordinate_pair(2), &ctx, Orientation::Uv, 0).unwrap();
        assert!(kernels_of(&lp).is_ok());
        assert_eq!(lp.ker_first.last().unwrap(), &p("v", 2));
        assert_eq!(lp.ker_second.last().unwrap(), &p("u", 2));
    }

    #[test]
    fn lift_ideal_examples() {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        assert_eq!(lift_ideal(&[Poly::one(4)], &ctx, 1), vec![Poly::one(4), p("u", 2), p("v", 2)]);
        assert_eq!(lift_ideal(&[p("z2", 2)], &ctx, 1), vec![p("z2", 2), p("z2*u", 2), p("z2*v", 2)]);
        let two = lift_ideal(&[p("z2", 2)], &ctx, 2);
        assert!(two.contains(&p("z1*z2", 2)));
        assert!(!two.contains(&p("u*v*z2", 2)));
    }

    #[test]
    fn certificate_examples() {
        let d1 = VectorField::coordinate(4, z(1));
        let d2 = VectorField::coordinate(4, z(2));
        let kn = verify_kernel(&d1, &[p("z2", 2)]).unwrap();
        let km = verify_kernel(&d2, &[p("z1", 2)]).unwrap();
        let cert = semicompat_certificate(&kn, &km, &[Poly::one(4)], 3, None, None).unwrap();
        assert!(cert.success());
        assert_eq!(cert.vars, vec![z(1), z(2)]);
        assert_eq!(cert.targets, 10);
        assert!(reverify_certificate(&cert, &d1, &d2, None));

        let same = verify_kernel(&d1, &[p("z2", 2)]).unwrap();
        let cert = semicompat_certificate(&same, &same, &[Poly::one(4)], 2, None, None).unwrap();
        match cert.status {
            CertificateStatus::Failure { unreachable } => assert!(unreachable.contains(&p("z1", 2))),
            CertificateStatus::Success => panic!("z1 is not a product of z2-polynomials"),
        }
        assert_eq!(
            semicompat_certificate(&kn, &km, &[], 1, None, None).unwrap_err(),
            CriterionError::EmptyIdeal
        );
    }

    #[test]
    fn lifted_certificate_at_degree_three() {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        let lp = lift_pair(&coordinate_pair(2), &ctx, Orientation::Uv, 0).unwrap();
        let (ka, kb) = kernels_of(&lp).unwrap();
        let cert = semicompat_certificate(&ka, &kb, &lp.ideal, 3, Some(ctx.reducer()), None).unwrap();
        assert!(cert.success());
        assert!(reverify_certificate(&cert, lp.first.ambient(), lp.second.ambient(), Some(ctx.reducer())));
    }

    #[test]
    fn bracket_identity_examples() {
        let n = 2;
        let d1 = VectorField::coordinate(4, z(1));
        let d2 = VectorField::coordinate(4, z(2));
        let c = compatible_bracket_check(&d1, &d2, &p("z1", n), &p("z2", n), &p("z1", n)).unwrap();
        assert!(c.holds());
        let c = compatible_bracket_check(&d1, &d2, &p("z1", n), &Poly::one(4), &Poly::one(4)).unwrap();
        assert!(c.holds());
        assert!(matches!(
            compatible_bracket_check(&d1, &d2, &p("z2", n), &Poly::one(4), &Poly::one(4)),
            Err(CriterionError::Precondition(_))
        ));
    }

    #[test]
    fn base_rank_example() {
        let r = base_spanning_rank(&[coordinate_pair(2)], &[0.into(), 0.into(), 3.into(), 1.into()]);
        assert_eq!((r.rank, r.full), (1, 1));
    }

    #[test]
    fn zero_ideal_value_contributes_nothing() {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        let pt: Vec<GaussianRational> = vec![1.into(), 1.into(), 1.into(), 0.into()];
        let fam = jo_family(&[coordinate_pair(2)], &ctx, &pt, None).unwrap();
        let base = spanning_rank(&fam.at_point, &pt, &ctx).unwrap();
        assert_eq!(base.rank, 3);
        let mut extra = fam.at_point.clone();
        extra.push(PointPair {
            label: "dead".into(),
            a: vec![1.into(), 0.into(), 1.into(), 0.into()],
            b: vec![0.into(), 1.into(), 1.into(), 0.into()],
            ideal_value: GaussianRational::zero(),
        });
        assert_eq!(spanning_rank(&extra, &pt, &ctx).unwrap().rank, 3);
    }

    #[test]
    fn runner_verdicts() {
        let ctx = make_suspension(2, p("z1", 2)).unwrap();
        let spec = SampleSpec::new(6, 11, Region::symmetric(2, 2));
        let config = CriterionConfig::new(2, spec);
        let (report, _) = run_vdp_criterion(&ctx, &[coordinate_pair(2)], Cohomology::Asserted, &config);
        assert_eq!(report.verdict, Verdict::CertifiedAtSamples, "{:?}", report.explanation);
        assert!(report.points.iter().all(|r| r.rank == 3));
        let (report, _) = run_vdp_criterion(&ctx, &[coordinate_pair(2)], Cohomology::Unknown, &config);
        assert_eq!(report.verdict, Verdict::Inconclusive);
        let (report, _) = run_vdp_criterion(&ctx, &[], Cohomology::Asserted, &config);
        assert_eq!(report.verdict, Verdict::Failed);
    }
}
