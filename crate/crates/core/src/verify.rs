//! Identity suites: randomized exact checks of the calculus layer, and
//! scenario-level checks of lifts, kernels and the spanning-family formulas.

use num::complex::Complex64;
use num::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{GaussianRational, Poly, U, V};
use crate::calculus::{
    divergence, exterior_derivative, field_to_closed_form, interior_product, lie_bracket, lie_derivative, pair_to_form, standard_divergence, DiffForm,
    VectorField, VolumeForm,
};
use crate::criterion::{compatible_bracket_check, verify_kernel};
use crate::lifting::{
    check_basepoint, default_twist, lambda1_check, lift, lift_pairs, lifted_flow, shear_pullback, twist_field, twisted_pullback_check, BasePair, Side,
};
use crate::random::Fuzz;
use crate::scenario::Scenario;
use crate::suspension::{divergence_on_suspension, eval_complex, sample_points, Exactness, SuspensionContext, SuspensionField};

/// Result of one identity over a batch of inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn collect(name: &str, results: Vec<Result<(), String>>) -> Self {
        let cases = results.len();
        let mut failures = 0;
        let mut first_failure = None;
        for r in results {
            if let Err(e) = r {
                failures += 1;
                first_failure.get_or_insert(e);
            }
        }
        Self {
            name: name.to_string(),
            cases,
            failures,
            first_failure,
        }
    }
}

pub const RANDOM_IDENTITIES: [&str; 6] = ["cartan", "d-squared", "antiderivation", "jacobi", "divergence-leibniz", "bracket-form"];

/// Maximum coefficient degree of random inputs.
pub const RANDOM_MAX_DEGREE: u32 = 4;

fn case_seed(seed: u64, identity: usize, case: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((identity as u64) << 32)
        .wrapping_add(case as u64)
}

/// Lie derivative of a form from the coordinate formula
/// `L(c dx_I) = theta(c) dx_I + c sum_s dx_i1 ^ .. ^ d(theta_is) ^ .. ^ dx_ik`,
/// independent of the Cartan-based implementation.
pub fn lie_derivative_coordinates(theta: &VectorField, alpha: &DiffForm) -> DiffForm {
    let n = alpha.nvars();
    let mut out = DiffForm::zero(n, alpha.degree());
    for (idx, c) in alpha.terms() {
        out.add_term(idx.clone(), &theta.apply(c));
        for s in 0..idx.len() {
            let ts = theta.coeff(idx[s]);
            for j in 0..n {
                let dj = ts.derivative(j);
                if dj.is_zero() {
                    continue;
                }
                let mut k = idx.clone();
                k[s] = j;
                out.add_term(k, &(c * &dj));
            }
        }
    }
    out
}

fn check_case(id: usize, fz: &mut Fuzz) -> Result<(), String> {
    let n = fz.rng().gen_range(2..=4);
    let d = RANDOM_MAX_DEGREE;
    match id {
        0 => {
            let k = fz.rng().gen_range(0..=n);
            let theta = fz.field(n, d);
            let alpha = fz.form(n, k, d);
            let lhs = lie_derivative(&theta, &alpha);
            let rhs = lie_derivative_coordinates(&theta, &alpha);
            (lhs == rhs).then_some(()).ok_or_else(|| format!("theta = {theta}, alpha = {alpha}"))
        }
        1 => {
            let k = fz.rng().gen_range(0..=n);
            let alpha = fz.form(n, k, d);
            let dd = exterior_derivative(&exterior_derivative(&alpha));
            dd.is_zero().then_some(()).ok_or_else(|| format!("alpha = {alpha}"))
        }
        2 => {
            let k = fz.rng().gen_range(1..n);
            let l = fz.rng().gen_range(1..=n - k);
            let a = fz.form(n, k, d);
            let b = fz.form(n, l, d);
            let theta = fz.field(n, d);
            let sign = Poly::from_int(n, if k % 2 == 0 { 1 } else { -1 });
            let d_lhs = exterior_derivative(&a.wedge(&b));
            let d_rhs = exterior_derivative(&a).wedge(&b).add(&a.wedge(&exterior_derivative(&b)).scale(&sign));
            let i = |f: &DiffForm| interior_product(&theta, f).expect("positive degree");
            let i_lhs = i(&a.wedge(&b));
            let i_rhs = i(&a).wedge(&b).add(&a.wedge(&i(&b)).scale(&sign));
            (d_lhs == d_rhs && i_lhs == i_rhs)
                .then_some(())
                .ok_or_else(|| format!("theta = {theta}, a = {a}, b = {b}"))
        }
        3 => {
            let [a, b, c] = [fz.field(n, d), fz.field(n, d), fz.field(n, d)];
            let s = lie_bracket(&a, &lie_bracket(&b, &c))
                .add(&lie_bracket(&b, &lie_bracket(&c, &a)))
                .add(&lie_bracket(&c, &lie_bracket(&a, &b)));
            s.is_zero().then_some(()).ok_or_else(|| format!("a = {a}, b = {b}, c = {c}"))
        }
        4 => {
            let theta = fz.field(n, d);
            let vars: Vec<usize> = (0..n).collect();
            let h = fz.poly(n, &vars, d, 3);
            let omega = VolumeForm::standard(n);
            let lhs = divergence(&theta.scale(&h), &omega).map_err(|e| e.to_string())?;
            let rhs = &(&h * &standard_divergence(&theta)) + &theta.apply(&h);
            (lhs == rhs).then_some(()).ok_or_else(|| format!("theta = {theta}, h = {h}"))
        }
        5 => {
            let vars: Vec<usize> = (0..n).collect();
            let nu = fz.divergence_free_field(n, &vars, d - 1);
            let mu = fz.divergence_free_field(n, &vars, d - 1);
            let omega = VolumeForm::standard(n);
            let lhs = exterior_derivative(&pair_to_form(&nu, &mu, &omega).map_err(|e| e.to_string())?);
            let rhs = field_to_closed_form(&lie_bracket(&nu, &mu), &omega).map_err(|e| e.to_string())?;
            (lhs == rhs).then_some(()).ok_or_else(|| format!("nu = {nu}, mu = {mu}"))
        }
        _ => unreachable!("unknown identity"),
    }
}

/// Runs every randomized identity on `cases` seeded inputs.
pub fn random_identity_suite(seed: u64, cases: usize) -> Vec<IdentityOutcome> {
    RANDOM_IDENTITIES
        .iter()
        .enumerate()
        .map(|(id, name)| {
            let results = (0..cases)
                .into_par_iter()
                .map(|c| check_case(id, &mut Fuzz::new(case_seed(seed, id, c))))
                .collect();
            IdentityOutcome::collect(name, results)
        })
        .collect()
}

/// Agreement threshold for finite-difference checks of pullback formulas.
pub const PULLBACK_FD_TOL: f64 = 1e-6;

/// Central difference of `map` at `p` in the direction `w`.
fn directional_fd<F>(map: F, p: &[Complex64], w: &[Complex64], h: f64) -> Vec<Complex64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let shift = |s: f64| -> Vec<Complex64> { p.iter().zip(w).map(|(a, b)| a + b * s).collect() };
    let plus = map(&shift(h));
    let minus = map(&shift(-h));
    plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

fn fd_mismatch(exact: &[GaussianRational], fd: &[Complex64]) -> f64 {
    exact.iter().zip(fd).map(|(a, b)| (a.to_complex() - b).norm()).fold(0.0, f64::max)
}

/// Scenario-level identities for `pairs` over `ctx`, evaluated at the exact
/// surface points `points` where pointwise formulas apply:
/// lift divergence, lifted kernel membership, the compatible-bracket
/// identity, the projected wedge identity for `(alpha_u, beta_v)`, and the
/// shear and twisted pullback formulas (exactly, and against finite
/// differences of the time-one flows).
pub fn scenario_identity_suite(ctx: &SuspensionContext, pairs: &[BasePair], points: &[Vec<GaussianRational>]) -> Vec<IdentityOutcome> {
    let nvars = ctx.nvars();
    let one = Poly::one(nvars);

    let mut lift_div = Vec::new();
    for bp in pairs {
        for base in [&bp.alpha, &bp.beta] {
            for side in [Side::U, Side::V] {
                lift_div.push(match lift(base, ctx, side) {
                    Ok(l) => match divergence_on_suspension(&l, ctx) {
                        Ok(d) if d.is_zero() => Ok(()),
                        Ok(d) => Err(format!("lift of {base} on side {side} has divergence {d}")),
                        Err(e) => Err(e.to_string()),
                    },
                    Err(e) => Err(e.to_string()),
                });
            }
        }
    }

    let mut kernels = Vec::new();
    let mut compat = Vec::new();
    match lift_pairs(pairs, ctx) {
        Ok(lifted) => {
            for lp in &lifted {
                for (f, ker) in [(&lp.first, &lp.ker_first), (&lp.second, &lp.ker_second)] {
                    kernels.push(verify_kernel(f.ambient(), ker).map(|_| ()).map_err(|e| format!("{}: {e}", lp.label)));
                }
                let (nu, mu) = (lp.first.ambient(), lp.second.ambient());
                compat.push(compat_case(nu, mu, &lp.ker_first, &lp.ker_second, &one).map_err(|e| format!("{}: {e}", lp.label)));
            }
        }
        Err(e) => kernels.push(Err(e.to_string())),
    }
    for bp in pairs {
        let nu = crate::lifting::extend_trivially(&bp.alpha);
        let mu = crate::lifting::extend_trivially(&bp.beta);
        compat.push(compat_case(&nu, &mu, &bp.ker_alpha, &bp.ker_beta, &one));
    }

    let mut lambda1 = Vec::new();
    let mut pullbacks = Vec::new();
    for p in points {
        for bp in pairs {
            lambda1.push(match lambda1_check(&bp.alpha, &bp.beta, ctx, p) {
                Ok(id) if id.holds() => Ok(()),
                Ok(_) => Err(format!("fails at {}", fmt_point(p))),
                Err(e) => Err(e.to_string()),
            });
            pullbacks.extend(pullback_cases(bp, ctx, p));
        }
    }

    vec![
        IdentityOutcome::collect("lift-divergence", lift_div),
        IdentityOutcome::collect("lifted-kernels", kernels),
        IdentityOutcome::collect("compatible-bracket", compat),
        IdentityOutcome::collect("lambda1", lambda1),
        IdentityOutcome::collect("pullback", pullbacks),
    ]
}

fn fmt_point(p: &[GaussianRational]) -> String {
    let parts: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Picks `h` among the kernel generators of `mu` with `nu(h)` in the kernel
/// of `nu` (falling back to `1`), and `f`, `g` as the first kernel
/// generators, then checks the compatible-bracket identity.
fn compat_case(nu: &VectorField, mu: &VectorField, ker_nu: &[Poly], ker_mu: &[Poly], one: &Poly) -> Result<(), String> {
    let h = ker_mu
        .iter()
        .find(|h| nu.apply(&nu.apply(h)).is_zero())
        .unwrap_or(one);
    let f = ker_nu.first().unwrap_or(one);
    let g = ker_mu.first().unwrap_or(one);
    let check = compatible_bracket_check(nu, mu, h, f, g).map_err(|e| e.to_string())?;
    check.holds().then_some(()).ok_or_else(|| format!("identity fails for h = {h}, f = {f}, g = {g}"))
}

fn pullback_cases(bp: &BasePair, ctx: &SuspensionContext, p: &[GaussianRational]) -> Vec<Result<(), String>> {
    let nvars = ctx.nvars();
    let pc: Vec<Complex64> = p.iter().map(GaussianRational::to_complex).collect();
    let h = 1e-5;
    let mut out = Vec::new();

    // shear: time-one flow of (u - u0) alpha_v, which preserves u
    let g = &Poly::var(nvars, U) - &Poly::constant(nvars, p[U].clone());
    let shear = (|| -> Result<(), String> {
        let flow = lifted_flow(&bp.alpha, ctx, Side::V).map_err(|e| e.to_string())?;
        let alpha_v = flow.field().clone();
        for base in [&bp.alpha, &bp.beta] {
            let mu = lift(base, ctx, Side::U).map_err(|e| e.to_string())?;
            let exact = shear_pullback(&mu, &alpha_v, &g, p, ctx).map_err(|e| e.to_string())?;
            let w: Vec<Complex64> = mu.ambient().eval(p).iter().map(GaussianRational::to_complex).collect();
            let map = |x: &[Complex64]| {
                let t = eval_complex(&g, x);
                flow.apply_float(x, t).unwrap_or_else(|_| vec![Complex64::new(f64::NAN, 0.0); x.len()])
            };
            let err = fd_mismatch(&exact, &directional_fd(map, &pc, &w, h));
            if !(err <= PULLBACK_FD_TOL) {
                return Err(format!("shear pullback differs from finite differences by {err:e} at {}", fmt_point(p)));
            }
        }
        Ok(())
    })();
    out.push(shear);

    // twist: time-one flow of g (u d/du - v d/dv) is (e^g u, e^-g v, z)
    for cand in [bp.clone(), bp.swapped()] {
        if !cand.alpha.apply(ctx.f()).eval(p).is_zero() {
            continue;
        }
        let Some(g) = default_twist(&cand.alpha, p) else { continue };
        let twist = (|| -> Result<(), String> {
            let id = twisted_pullback_check(&cand.alpha, &g, ctx, p).map_err(|e| e.to_string())?;
            if !id.holds() {
                return Err(format!("twisted pullback formula fails at {}", fmt_point(p)));
            }
            let twist0 = SuspensionField::new(twist_field(ctx), ctx).map_err(|e| e.to_string())?;
            let alpha_u = lift(&cand.alpha, ctx, Side::U).map_err(|e| e.to_string())?;
            let exact = shear_pullback(&alpha_u, &twist0, &g, p, ctx).map_err(|e| e.to_string())?;
            let w: Vec<Complex64> = alpha_u.ambient().eval(p).iter().map(GaussianRational::to_complex).collect();
            let map = |x: &[Complex64]| {
                let e = eval_complex(&g, x).exp();
                let mut y = x.to_vec();
                y[U] *= e;
                y[V] /= e;
                y
            };
            let err = fd_mismatch(&exact, &directional_fd(map, &pc, &w, h));
            if !(err <= PULLBACK_FD_TOL) {
                return Err(format!("twisted pullback differs from finite differences by {err:e}"));
            }
            Ok(())
        })();
        out.push(twist);
        break;
    }
    out
}

/// Sum over outcomes of failing cases.
pub fn total_failures(outcomes: &[IdentityOutcome]) -> usize {
    outcomes.iter().map(|o| o.failures).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub random_cases: usize,
    pub random: Vec<IdentityOutcome>,
    pub scenario: Vec<IdentityOutcome>,
    /// Points used for the pointwise identities.
    pub points: Vec<Vec<String>>,
    pub passed: bool,
}

/// Number of sample points used for pointwise identities.
pub const VERIFY_POINTS: usize = 3;

/// Runs the randomized suite with `cases` inputs per identity and the
/// scenario suite at the scenario basepoint (if any) plus the first
/// admissible samples.
pub fn verify_scenario(sc: &Scenario, cases: usize) -> Result<VerifyReport, crate::error::SuspensionError> {
    let ctx = sc.context()?;
    let mut spec = sc.sample_spec(&ctx)?;
    spec.exactness = Exactness::Exact;
    spec.count = VERIFY_POINTS * 10;
    let mut points: Vec<Vec<GaussianRational>> = sc.basepoint.iter().cloned().collect();
    for s in sample_points(&ctx, &spec)? {
        if points.len() >= VERIFY_POINTS {
            break;
        }
        let p = s.as_exact().expect("exact sampling").to_vec();
        if check_basepoint(&sc.pairs, &ctx, &p).is_ok() && !points.contains(&p) {
            points.push(p);
        }
    }
    let random = random_identity_suite(sc.seed, cases);
    let scenario = scenario_identity_suite(&ctx, &sc.pairs, &points);
    // a scenario without pairs has nothing to check pointwise
    let passed = random.iter().all(IdentityOutcome::passed) && scenario.iter().all(|o| o.failures == 0);
    Ok(VerifyReport {
        random_cases: cases,
        random,
        scenario,
        points: points.iter().map(|p| p.iter().map(|c| c.to_string()).collect()).collect(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::lifting::BaseField;
    use crate::suspension::make_suspension;

    fn gr(a: i64, b: i64) -> GaussianRational {
        GaussianRational::from_frac(a, b)
    }

    #[test]
    fn coordinate_lie_derivative_examples() {
        // L_{x d/dx} dx = dx on C^2; L_{y d/dx} (dx ^ dy) = 0
        let theta = VectorField::new(vec![parse_poly("u", 0).unwrap(), Poly::zero(2)]);
        let dx = DiffForm::dx(2, 0);
        assert_eq!(lie_derivative_coordinates(&theta, &dx), dx);
        let shear = VectorField::new(vec![parse_poly("v", 0).unwrap(), Poly::zero(2)]);
        let vol = DiffForm::dx(2, 0).wedge(&DiffForm::dx(2, 1));
        assert!(lie_derivative_coordinates(&shear, &vol).is_zero());
    }

    #[test]
    fn small_random_suite_passes() {
        let out = random_identity_suite(7, 12);
        assert_eq!(out.len(), RANDOM_IDENTITIES.len());
        for o in &out {
            assert!(o.passed(), "{o:?}");
            assert_eq!(o.cases, 12);
        }
        assert_eq!(out, random_identity_suite(7, 12));
    }

    #[test]
    fn scenario_suite_on_circle_suspension() {
        let ctx = make_suspension(2, parse_poly("z1^2 + z2^2 - 1", 2).unwrap()).unwrap();
        let rot = BaseField::new(2, vec![parse_poly("-z2", 2).unwrap(), parse_poly("z1", 2).unwrap()]).unwrap();
        let pair = BasePair {
            alpha: BaseField::coordinate(2, 1),
            beta: rot,
            ker_alpha: vec![parse_poly("z2", 2).unwrap()],
            ker_beta: vec![parse_poly("z1^2 + z2^2", 2).unwrap()],
            ideal: vec![Poly::one(4)],
        };
        let p = vec![gr(1, 1), gr(-1, 2), gr(1, 2), gr(1, 2)];
        let out = scenario_identity_suite(&ctx, &[pair], &[p]);
        for o in &out {
            assert!(o.passed(), "{o:?}");
        }
    }
}
