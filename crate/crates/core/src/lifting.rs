//! Lifts of base fields to the suspension, their flows, shear pullbacks and
//! the spanning family built from a list of base pairs.

use std::fmt;

use num::complex::Complex64;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{compose_time, z, ExactMatrix, GaussianRational, Poly, TimePoly, U, V};
use crate::calculus::{standard_divergence, VectorField};
use crate::criterion::lift_ideal;
use crate::error::{LiftError, SuspensionError};
use crate::numeric::{integrate, FloatField, FloatPoly};
use crate::suspension::{SuspensionContext, SuspensionField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// Each coefficient depends only on variables earlier in some order and
    /// never on its own variable; the flow is polynomial in `t`.
    ShearChain,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    U,
    V,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::U => Side::V,
            Side::V => Side::U,
        }
    }

    /// Ambient index of the variable whose derivative carries `theta(f)`.
    fn index(self) -> usize {
        match self {
            Side::U => U,
            Side::V => V,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::U => write!(f, "u"),
            Side::V => write!(f, "v"),
        }
    }
}

/// A polynomial field on the base `C^n`, stored in the ambient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseField {
    n: usize,
    coeffs: Vec<Poly>,
    flow_kind: FlowKind,
    order: Option<Vec<usize>>,
}

impl BaseField {
    /// `coeffs[j - 1]` is the coefficient of `d/dz_j`.
    pub fn new(n: usize, coeffs: Vec<Poly>) -> Result<Self, LiftError> {
        if coeffs.len() != n {
            return Err(LiftError::WrongArity {
                expected: n,
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| c.nvars() != n + 2) {
            return Err(LiftError::WrongArity {
                expected: n + 2,
                found: coeffs.iter().map(Poly::nvars).find(|&k| k != n + 2).unwrap(),
            });
        }
        if coeffs.iter().any(|c| c.involves(U) || c.involves(V)) {
            return Err(LiftError::BaseInvolvesUv);
        }
        let order = shear_order(&coeffs);
        let flow_kind = if order.is_some() { FlowKind::ShearChain } else { FlowKind::Generic };
        Ok(Self {
            n,
            coeffs,
            flow_kind,
            order,
        })
    }

    /// `d/dz_j`, with `j` counted from 1.
    pub fn coordinate(n: usize, j: usize) -> Self {
        let mut c = vec![Poly::zero(n + 2); n];
        c[j - 1] = Poly::one(n + 2);
        Self::new(n, c).expect("coordinate field is well-formed")
    }

    /// Reads the base part of an ambient field whose `u`, `v` parts vanish.
    pub fn from_ambient(field: &VectorField) -> Result<Self, LiftError> {
        if field.nvars() < 2 || !field.coeff(U).is_zero() || !field.coeff(V).is_zero() {
            return Err(LiftError::BaseInvolvesUv);
        }
        Self::new(field.nvars() - 2, field.coeffs()[2..].to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn flow_kind(&self) -> FlowKind {
        self.flow_kind
    }

    /// `theta(p)`, differentiating in the `z` variables only.
    pub fn apply(&self, p: &Poly) -> Poly {
        extend_trivially(self).apply(p)
    }

    /// Divergence for `dz1 ^ ... ^ dzn`.
    pub fn divergence(&self) -> Poly {
        standard_divergence(&extend_trivially(self))
    }

    pub fn scale(&self, h: &Poly) -> Result<Self, LiftError> {
        Self::new(self.n, self.coeffs.iter().map(|c| c * h).collect())
    }

    /// Images of every ambient variable under the time-`t` flow, when the
    /// field is a shear chain. `u` and `v` are fixed.
    pub fn symbolic_flow(&self) -> Option<Vec<TimePoly>> {
        let order = self.order.as_ref()?;
        let nvars = self.n + 2;
        let mut images: Vec<TimePoly> = (0..nvars).map(|k| TimePoly::constant(Poly::var(nvars, k))).collect();
        for &j in order {
            let c = &self.coeffs[j];
            if c.is_zero() {
                continue;
            }
            let along = compose_time(c, &images).integrate_t();
            images[z(j + 1)] = images[z(j + 1)].add(&along);
        }
        Some(images)
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", extend_trivially(self))
    }
}

/// Order in which each coefficient only involves already-placed variables.
fn shear_order(coeffs: &[Poly]) -> Option<Vec<usize>> {
    let n = coeffs.len();
    let deps: Vec<Vec<usize>> = coeffs
        .iter()
        .map(|c| (0..n).filter(|&k| c.involves(z(k + 1))).collect())
        .collect();
    if (0..n).any(|j| deps[j].contains(&j)) {
        return None;
    }
    // variables with zero coefficient never move, so they are free to use
    let mut placed: Vec<bool> = coeffs.iter().map(Poly::is_zero).collect();
    let mut order: Vec<usize> = (0..n).filter(|&j| placed[j]).collect();
    while order.len() < n {
        let next = (0..n).find(|&j| !placed[j] && deps[j].iter().all(|&k| placed[k]))?;
        placed[next] = true;
        order.push(next);
    }
    Some(order)
}

/// The base field viewed on `C^2 x C^n` with zero `u`, `v` components.
pub fn extend_trivially(theta: &BaseField) -> VectorField {
    let nvars = theta.n + 2;
    let mut c = vec![Poly::zero(nvars), Poly::zero(nvars)];
    c.extend(theta.coeffs.iter().cloned());
    VectorField::new(c)
}

/// `theta_u = v theta + theta(f) d/du`, or `theta_v = u theta + theta(f) d/dv`.
pub fn lift(theta: &BaseField, ctx: &SuspensionContext, side: Side) -> Result<SuspensionField, LiftError> {
    if theta.n != ctx.n() {
        return Err(LiftError::Suspension(SuspensionError::WrongContext {
            expected: ctx.n(),
            found: theta.n,
        }));
    }
    let nvars = ctx.nvars();
    let ext = extend_trivially(theta);
    let theta_f = ext.apply(ctx.f());
    let other = Poly::var(nvars, side.other().index());
    let mut field = ext.scale(&other);
    let mut c = field.coeffs().to_vec();
    c[side.index()] = &c[side.index()] + &theta_f;
    field = VectorField::new(c);
    Ok(SuspensionField::new(field, ctx)?)
}

/// `g` with `f(phi^t(x)) = f(x) + t g(x, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowRemainder {
    g: TimePoly,
}

impl FlowRemainder {
    pub fn g(&self) -> &TimePoly {
        &self.g
    }
}

pub fn flow_remainder(theta: &BaseField, f: &Poly) -> Result<FlowRemainder, LiftError> {
    let flow = theta.symbolic_flow().ok_or(LiftError::NoSymbolicFlow)?;
    let shifted = compose_time(f, &flow).sub(&TimePoly::constant(f.clone()));
    Ok(FlowRemainder { g: shifted.div_t() })
}

/// Flow of a lifted field, closed form when the base flow is polynomial.
#[derive(Clone, Debug)]
pub struct LiftedFlow {
    side: Side,
    field: SuspensionField,
    symbolic: Option<Vec<TimePoly>>,
    compiled: Option<Vec<Vec<FloatPoly>>>,
    float_field: FloatField,
}

/// For side `u`: `(u, v, x) -> (u + t g(x, t v), v, phi^{t v}(x))`; side `v`
/// swaps the roles of `u` and `v`.
pub fn lifted_flow(theta: &BaseField, ctx: &SuspensionContext, side: Side) -> Result<LiftedFlow, LiftError> {
    let field = lift(theta, ctx, side)?;
    let symbolic = match theta.symbolic_flow() {
        Some(base) => {
            let nvars = ctx.nvars();
            let fixed = Poly::var(nvars, side.other().index());
            let g = flow_remainder(theta, ctx.f())?.g;
            let mut images: Vec<TimePoly> = base.iter().map(|b| b.rescale_time(&fixed)).collect();
            images[side.other().index()] = TimePoly::constant(fixed.clone());
            let moved = Poly::var(nvars, side.index());
            images[side.index()] = TimePoly::constant(moved).add(&g.rescale_time(&fixed).shift(1));
            Some(images)
        }
        None => None,
    };
    let compiled = symbolic
        .as_ref()
        .map(|imgs| imgs.iter().map(|tp| tp.coeffs().iter().map(FloatPoly::new).collect()).collect());
    let float_field = FloatField::new(field.ambient());
    Ok(LiftedFlow {
        side,
        field,
        symbolic,
        compiled,
        float_field,
    })
}

/// Integration tolerance used by the numeric fallback.
pub const FLOW_TOL: f64 = 1e-13;

impl LiftedFlow {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn field(&self) -> &SuspensionField {
        &self.field
    }

    pub fn symbolic(&self) -> Option<&[TimePoly]> {
        self.symbolic.as_deref()
    }

    /// The time-`t` map as ambient polynomials.
    pub fn at_time(&self, t: &GaussianRational) -> Option<Vec<Poly>> {
        self.symbolic.as_ref().map(|imgs| imgs.iter().map(|tp| tp.at(t)).collect())
    }

    pub fn apply_exact(&self, p: &[GaussianRational], t: &GaussianRational) -> Result<Vec<GaussianRational>, LiftError> {
        let map = self.at_time(t).ok_or(LiftError::NoSymbolicFlow)?;
        Ok(map.iter().map(|m| m.eval(p)).collect())
    }

    /// Closed form when available, numeric integration otherwise.
    pub fn apply_float(&self, p: &[Complex64], t: Complex64) -> Result<Vec<Complex64>, LiftError> {
        match &self.compiled {
            Some(imgs) => Ok(imgs
                .iter()
                .map(|coeffs| {
                    let mut acc = Complex64::zero();
                    for c in coeffs.iter().rev() {
                        acc = acc * t + c.eval(p);
                    }
                    acc
                })
                .collect()),
            None => self.integrate_numeric(p, t),
        }
    }

    /// RK4 with step doubling, reporting escape as `BlowUp`.
    pub fn integrate_numeric(&self, p: &[Complex64], t: Complex64) -> Result<Vec<Complex64>, LiftError> {
        integrate(&self.float_field, p, t, FLOW_TOL)
            .map(|(x, _)| x)
            .map_err(|b| LiftError::BlowUp(format!("norm {:e} at {:.3} of the time span", b.norm, b.at_fraction)))
    }
}

/// `mu(p) + mu(g)(p) theta(p)`: the differential of the time-one flow of
/// `g theta` applied to `mu(p)`, for `g` in the kernel of `theta` and
/// vanishing at `p`.
pub fn shear_pullback(
    mu: &SuspensionField,
    theta: &SuspensionField,
    g: &Poly,
    p: &[GaussianRational],
    ctx: &SuspensionContext,
) -> Result<Vec<GaussianRational>, LiftError> {
    let gp = g.eval(p);
    if !gp.is_zero() {
        return Err(LiftError::GNonzeroAtPoint(gp.to_string()));
    }
    let theta_g = ctx.normal_form(&theta.ambient().apply(g));
    if !theta_g.is_zero() {
        return Err(LiftError::GNotInKernel(theta_g.to_string()));
    }
    let mu_g = mu.ambient().apply(g).eval(p);
    let theta_p = theta.ambient().eval(p);
    Ok(mu
        .ambient()
        .eval(p)
        .iter()
        .zip(&theta_p)
        .map(|(a, b)| a + &(&mu_g * b))
        .collect())
}

/// `u d/du - v d/dv`.
pub fn twist_field(ctx: &SuspensionContext) -> VectorField {
    let nvars = ctx.nvars();
    let mut c = vec![Poly::zero(nvars); nvars];
    c[U] = Poly::var(nvars, U);
    c[V] = -Poly::var(nvars, V);
    VectorField::new(c)
}

/// Coordinates of `a ^ b` on the basis `e_i ^ e_j`, `i < j`.
pub fn wedge2(a: &[GaussianRational], b: &[GaussianRational]) -> Vec<GaussianRational> {
    let m = a.len();
    let mut out = Vec::with_capacity(m * (m.saturating_sub(1)) / 2);
    for i in 0..m {
        for j in i + 1..m {
            out.push(&(&a[i] * &b[j]) - &(&a[j] * &b[i]));
        }
    }
    out
}

/// A base pair with kernel generators for each field and a proposed ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePair {
    pub alpha: BaseField,
    pub beta: BaseField,
    pub ker_alpha: Vec<Poly>,
    pub ker_beta: Vec<Poly>,
    pub ideal: Vec<Poly>,
}

impl BasePair {
    pub fn swapped(&self) -> BasePair {
        BasePair {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            ker_alpha: self.ker_beta.clone(),
            ker_beta: self.ker_alpha.clone(),
            ideal: self.ideal.clone(),
        }
    }
}

/// `(alpha_u, beta_v)` or `(alpha_v, beta_u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Uv,
    Vu,
}

impl Orientation {
    fn sides(self) -> (Side, Side) {
        match self {
            Orientation::Uv => (Side::U, Side::V),
            Orientation::Vu => (Side::V, Side::U),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedPair {
    pub label: String,
    pub orientation: Orientation,
    pub first: SuspensionField,
    pub second: SuspensionField,
    /// Kernel generators of `first`: the base kernel plus the preserved
    /// coordinate (`v` for a `u`-lift, `u` for a `v`-lift).
    pub ker_first: Vec<Poly>,
    pub ker_second: Vec<Poly>,
    /// Lifted ideal generators `h * u^i v^j`.
    pub ideal: Vec<Poly>,
}

/// Degree bound on `u^i v^j` used when lifting ideals for pairs.
pub const LIFTED_IDEAL_UV_DEGREE: u32 = 1;

pub fn lift_pair(pair: &BasePair, ctx: &SuspensionContext, orientation: Orientation, index: usize) -> Result<LiftedPair, LiftError> {
    let (s1, s2) = orientation.sides();
    let first = lift(&pair.alpha, ctx, s1)?;
    let second = lift(&pair.beta, ctx, s2)?;
    let fixed = |s: Side| Poly::var(ctx.nvars(), s.other().index());
    let mut ker_first = pair.ker_alpha.clone();
    ker_first.push(fixed(s1));
    let mut ker_second = pair.ker_beta.clone();
    ker_second.push(fixed(s2));
    let label = format!("pair{}:{}{}", index, s1, s2);
    Ok(LiftedPair {
        label,
        orientation,
        first,
        second,
        ker_first,
        ker_second,
        ideal: lift_ideal(&pair.ideal, ctx, LIFTED_IDEAL_UV_DEGREE),
    })
}

/// Both lifted orientations of every base pair.
pub fn lift_pairs(pairs: &[BasePair], ctx: &SuspensionContext) -> Result<Vec<LiftedPair>, LiftError> {
    let mut out = Vec::with_capacity(2 * pairs.len());
    for (k, p) in pairs.iter().enumerate() {
        out.push(lift_pair(p, ctx, Orientation::Uv, k)?);
        out.push(lift_pair(p, ctx, Orientation::Vu, k)?);
    }
    Ok(out)
}

/// Two tangent vectors at the basepoint and the ideal value scaling their wedge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointPair {
    pub label: String,
    pub a: Vec<GaussianRational>,
    pub b: Vec<GaussianRational>,
    pub ideal_value: GaussianRational,
}

#[derive(Clone, Debug)]
pub struct JoFamily {
    pub basepoint: Vec<GaussianRational>,
    pub lifted: Vec<LiftedPair>,
    pub at_point: Vec<PointPair>,
    /// The twist function and the (possibly swapped) base pair it was used
    /// with, when some pair admits one.
    pub twist: Option<(Poly, BasePair)>,
}

fn first_nonzero(gens: &[Poly], p: &[GaussianRational]) -> GaussianRational {
    gens.iter()
        .map(|h| h.eval(p))
        .find(|x| !x.is_zero())
        .unwrap_or_else(GaussianRational::zero)
}

/// Checks the basepoint conditions, reporting the first failure.
pub fn check_basepoint(pairs: &[BasePair], ctx: &SuspensionContext, p: &[GaussianRational]) -> Result<(), LiftError> {
    if p.len() != ctx.nvars() {
        return Err(LiftError::BadBasepoint(format!("expected {} coordinates", ctx.nvars())));
    }
    if !ctx.defining().eval(p).is_zero() {
        return Err(LiftError::BadBasepoint("not on the hypersurface".into()));
    }
    if p[U].is_zero() {
        return Err(LiftError::BadBasepoint("u = 0".into()));
    }
    if p[V].is_zero() {
        return Err(LiftError::BadBasepoint("v = 0".into()));
    }
    if ctx.z_vars().iter().all(|&k| ctx.f().derivative(k).eval(p).is_zero()) {
        return Err(LiftError::BadBasepoint("df = 0".into()));
    }
    for (k, pair) in pairs.iter().enumerate() {
        if first_nonzero(&pair.ideal, p).is_zero() {
            return Err(LiftError::BadBasepoint(format!("ideal of pair {k} vanishes")));
        }
    }
    Ok(())
}

/// Default twist function: `z_j - (x0)_j` for the first `j` with
/// `alpha_j(x0) != 0`.
pub fn default_twist(alpha: &BaseField, p: &[GaussianRational]) -> Option<Poly> {
    let nvars = alpha.n + 2;
    (0..alpha.n).find(|&j| !alpha.coeffs[j].eval(p).is_zero()).map(|j| {
        let k = z(j + 1);
        &Poly::var(nvars, k) - &Poly::constant(nvars, p[k].clone())
    })
}

/// The family whose ideal-scaled wedges should span `^2 T` at `p`: both
/// lifts of every pair, the pullback of the first pair by the flow of
/// `(u - u0) alpha_v`, and a twisted pullback by the flow of
/// `g (u d/du - v d/dv)` for a pair with `alpha(f)(x0) = 0`.
pub fn jo_family(pairs: &[BasePair], ctx: &SuspensionContext, p: &[GaussianRational], g_twist: Option<&Poly>) -> Result<JoFamily, LiftError> {
    check_basepoint(pairs, ctx, p)?;
    if let Some(g) = g_twist {
        if !g.eval(p).is_zero() {
            return Err(LiftError::BadBasepoint("twist function does not vanish at the basepoint".into()));
        }
        if g.involves(U) || g.involves(V) {
            return Err(LiftError::BadBasepoint("twist function involves u or v".into()));
        }
    }
    let lifted = lift_pairs(pairs, ctx)?;
    let mut at_point: Vec<PointPair> = lifted
        .iter()
        .map(|lp| PointPair {
            label: lp.label.clone(),
            a: lp.first.ambient().eval(p),
            b: lp.second.ambient().eval(p),
            ideal_value: first_nonzero(&lp.ideal, p),
        })
        .collect();
    let nvars = ctx.nvars();

    if let Some(first) = pairs.first() {
        let alpha_u = lift(&first.alpha, ctx, Side::U)?;
        let alpha_v = lift(&first.alpha, ctx, Side::V)?;
        let beta_v = lift(&first.beta, ctx, Side::V)?;
        let g = &Poly::var(nvars, U) - &Poly::constant(nvars, p[U].clone());
        at_point.push(PointPair {
            label: "pullback:shear".into(),
            a: shear_pullback(&alpha_u, &alpha_v, &g, p, ctx)?,
            b: shear_pullback(&beta_v, &alpha_v, &g, p, ctx)?,
            ideal_value: first_nonzero(&lift_ideal(&first.ideal, ctx, LIFTED_IDEAL_UV_DEGREE), p),
        });
    }

    let twist0 = SuspensionField::new(twist_field(ctx), ctx)?;
    let mut twist = None;
    let candidates = pairs.iter().flat_map(|bp| [bp.clone(), bp.swapped()]);
    for cand in candidates {
        if !cand.alpha.apply(ctx.f()).eval(p).is_zero() {
            continue;
        }
        let g = match g_twist {
            Some(g) => {
                if cand.alpha.apply(g).eval(p).is_zero() {
                    continue;
                }
                g.clone()
            }
            None => match default_twist(&cand.alpha, p) {
                Some(g) => g,
                None => continue,
            },
        };
        let alpha_u = lift(&cand.alpha, ctx, Side::U)?;
        let beta_v = lift(&cand.beta, ctx, Side::V)?;
        at_point.push(PointPair {
            label: "pullback:twist".into(),
            a: shear_pullback(&alpha_u, &twist0, &g, p, ctx)?,
            b: shear_pullback(&beta_v, &twist0, &g, p, ctx)?,
            ideal_value: first_nonzero(&lift_ideal(&cand.ideal, ctx, LIFTED_IDEAL_UV_DEGREE), p),
        });
        twist = Some((g, cand));
        break;
    }
    Ok(JoFamily {
        basepoint: p.to_vec(),
        lifted,
        at_point,
        twist,
    })
}

/// Ambient indices kept by the projection dropping the `v` component, in
/// the order `(z1, ..., zn, u)`.
fn lambda1_coords(ctx: &SuspensionContext) -> Vec<usize> {
    let mut idx = ctx.z_vars();
    idx.push(U);
    idx
}

fn project(w: &[GaussianRational], idx: &[usize]) -> Vec<GaussianRational> {
    idx.iter().map(|&k| w[k].clone()).collect()
}

/// Both sides of `P(alpha_u ^ beta_v) = uv (alpha ^ beta) - u alpha(f) (beta ^ d/du)`
/// at `p`, as wedge coordinates over `(z1, ..., zn, u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityAtPoint {
    pub lhs: Vec<GaussianRational>,
    pub rhs: Vec<GaussianRational>,
}

impl IdentityAtPoint {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn lambda1_check(alpha: &BaseField, beta: &BaseField, ctx: &SuspensionContext, p: &[GaussianRational]) -> Result<IdentityAtPoint, LiftError> {
    let idx = lambda1_coords(ctx);
    let alpha_u = lift(alpha, ctx, Side::U)?.ambient().eval(p);
    let beta_v = lift(beta, ctx, Side::V)?.ambient().eval(p);
    let lhs = wedge2(&project(&alpha_u, &idx), &project(&beta_v, &idx));

    let a = project(&extend_trivially(alpha).eval(p), &idx);
    let b = project(&extend_trivially(beta).eval(p), &idx);
    let mut du = vec![GaussianRational::zero(); idx.len()];
    du[idx.len() - 1] = GaussianRational::one();
    let uv = &p[U] * &p[V];
    let u_af = &p[U] * &alpha.apply(ctx.f()).eval(p);
    let rhs = wedge2(&a, &b)
        .iter()
        .zip(wedge2(&b, &du))
        .map(|(x, y)| &(&uv * x) - &(&u_af * &y))
        .collect();
    Ok(IdentityAtPoint { lhs, rhs })
}

/// Both sides of `phi^*(alpha_u) = v alpha + uv alpha(g) d/du - v^2 alpha(g) d/dv`
/// at `p`, where `phi` is the time-one flow of `g (u d/du - v d/dv)`.
/// Requires `alpha(f)(p) = 0` and `g(p) = 0`.
pub fn twisted_pullback_check(alpha: &BaseField, g: &Poly, ctx: &SuspensionContext, p: &[GaussianRational]) -> Result<IdentityAtPoint, LiftError> {
    if !alpha.apply(ctx.f()).eval(p).is_zero() {
        return Err(LiftError::BadBasepoint("alpha(f) does not vanish at the point".into()));
    }
    let twist0 = SuspensionField::new(twist_field(ctx), ctx)?;
    let alpha_u = lift(alpha, ctx, Side::U)?;
    let lhs = shear_pullback(&alpha_u, &twist0, g, p, ctx)?;
    let ag = alpha.apply(g).eval(p);
    let (u, v) = (&p[U], &p[V]);
    let mut rhs: Vec<GaussianRational> = extend_trivially(alpha).eval(p).iter().map(|c| v * c).collect();
    rhs[U] = &(u * v) * &ag;
    rhs[V] = -&(&(v * v) * &ag);
    Ok(IdentityAtPoint { lhs, rhs })
}

/// Chart on the hypersurface: `U` uses coordinates `(u, z)` where `u != 0`,
/// `V` uses `(v, z)` where `v != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    U,
    V,
}

/// Determinant of the chart Jacobian of an ambient polynomial map that
/// preserves the hypersurface, at the point `p`.
pub fn chart_jacobian(map: &[Poly], ctx: &SuspensionContext, chart: Chart, p: &[GaussianRational]) -> Result<GaussianRational, LiftError> {
    let (coord, dependent) = match chart {
        Chart::U => (U, V),
        Chart::V => (V, U),
    };
    let c = &p[coord];
    let cinv = c.inv().ok_or_else(|| LiftError::BadBasepoint(format!("chart coordinate vanishes: {}", crate::algebra::var_name(coord))))?;
    // dependent = f / coord, so d(dep)/d(coord) = -dep / coord and
    // d(dep)/dz_j = f_j / coord
    let mut chain = vec![-&(&p[dependent] * &cinv)];
    for k in ctx.z_vars() {
        chain.push(&ctx.f().derivative(k).eval(p) * &cinv);
    }
    let mut vars = vec![coord];
    vars.extend(ctx.z_vars());
    let m = vars.len();
    let mut jac = ExactMatrix::zeros(m, m);
    for (r, &out) in vars.iter().enumerate() {
        let comp = &map[out];
        let d_dep = comp.derivative(dependent).eval(p);
        for (col, &inp) in vars.iter().enumerate() {
            jac[(r, col)] = &comp.derivative(inp).eval(p) + &(&d_dep * &chain[col]);
        }
    }
    Ok(jac.determinant())
}

/// Chart determinant weighted by the density `1 / coord` of the induced
/// volume form; equals one for volume-preserving maps.
pub fn weighted_chart_jacobian(map: &[Poly], ctx: &SuspensionContext, chart: Chart, p: &[GaussianRational]) -> Result<GaussianRational, LiftError> {
    let det = chart_jacobian(map, ctx, chart, p)?;
    let coord = match chart {
        Chart::U => U,
        Chart::V => V,
    };
    let image = map[coord].eval(p);
    let inv = image
        .inv()
        .ok_or_else(|| LiftError::BadBasepoint("image leaves the chart".into()))?;
    Ok(&(&det * &p[coord]) * &inv)
}
