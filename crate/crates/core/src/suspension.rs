//! The suspension hypersurface `{uv = f(z)}` inside `C^2 x C^n`.
//!
//! The induced volume form on the hypersurface is never written down in
//! coordinates. Divergences are computed through the ambient form instead:
//! for a field `theta` with `theta(uv - f) = q (uv - f)` the divergence on the
//! hypersurface is `(div theta - q)` restricted, i.e. its normal form.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{monomials_up_to, z, ExactMatrix, GaussianRational, Poly, UvReducer, U, V};
use crate::calculus::{divergence, VectorField, VolumeForm};
use crate::error::SuspensionError;

/// Residual bound for floating surface points.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SuspensionContext {
    n: usize,
    f: Poly,
    defining: Poly,
    reducer: UvReducer,
    volume: VolumeForm,
}

impl SuspensionContext {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of ambient variables, `n + 2`.
    pub fn nvars(&self) -> usize {
        self.n + 2
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    /// `uv - f`.
    pub fn defining(&self) -> &Poly {
        &self.defining
    }

    pub fn reducer(&self) -> &UvReducer {
        &self.reducer
    }

    pub fn volume(&self) -> &VolumeForm {
        &self.volume
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        self.reducer.reduce(p)
    }

    /// Indices of the base variables `z1..zn`.
    pub fn z_vars(&self) -> Vec<usize> {
        (1..=self.n).map(z).collect()
    }

    /// Ambient gradient of the defining polynomial, `(v, u, -df/dz1, ...)`.
    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars()).map(|k| self.defining.derivative(k)).collect()
    }
}

/// Builds the context for `{uv = f}` over `C^n`.
pub fn make_suspension(n: usize, f: Poly) -> Result<SuspensionContext, SuspensionError> {
    if f.nvars() != n + 2 {
        return Err(SuspensionError::WrongContext {
            expected: n + 2,
            found: f.nvars(),
        });
    }
    if f.involves(U) || f.involves(V) {
        return Err(SuspensionError::FInvolvesUv);
    }
    if f.is_constant() {
        return Err(SuspensionError::ConstantF);
    }
    let nvars = n + 2;
    let uv = &Poly::var(nvars, U) * &Poly::var(nvars, V);
    let defining = &uv - &f;
    let reducer = UvReducer::new(f.clone()).map_err(|_| SuspensionError::FInvolvesUv)?;
    Ok(SuspensionContext {
        n,
        f,
        defining,
        reducer,
        volume: VolumeForm::standard(nvars),
    })
}

/// An ambient field tangent to the hypersurface, with its multiplier `q`:
/// `ambient(uv - f) = q * (uv - f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspensionField {
    ambient: VectorField,
    multiplier: Poly,
}

impl SuspensionField {
    pub fn new(ambient: VectorField, ctx: &SuspensionContext) -> Result<Self, SuspensionError> {
        let multiplier = is_tangent(&ambient, ctx)?;
        Ok(Self { ambient, multiplier })
    }

    pub fn ambient(&self) -> &VectorField {
        &self.ambient
    }

    pub fn multiplier(&self) -> &Poly {
        &self.multiplier
    }

    /// Re-checks `ambient(h) - q h = 0`.
    pub fn check_invariant(&self, ctx: &SuspensionContext) -> bool {
        let lhs = self.ambient.apply(ctx.defining());
        (&lhs - &(&self.multiplier * ctx.defining())).is_zero()
    }
}

/// Returns the multiplier `q` when `theta(uv - f)` is divisible by `uv - f`.
pub fn is_tangent(theta: &VectorField, ctx: &SuspensionContext) -> Result<Poly, SuspensionError> {
    if theta.nvars() != ctx.nvars() {
        return Err(SuspensionError::WrongContext {
            expected: ctx.nvars(),
            found: theta.nvars(),
        });
    }
    let image = theta.apply(ctx.defining());
    let (q, r) = image.div_rem(ctx.defining()).expect("defining polynomial is nonzero");
    if !r.is_zero() {
        return Err(SuspensionError::NotTangent(r.to_string()));
    }
    Ok(q)
}

/// Divergence of a tangent field for the induced volume form, as a normal form.
pub fn divergence_on_suspension(field: &SuspensionField, ctx: &SuspensionContext) -> Result<Poly, SuspensionError> {
    if !field.check_invariant(ctx) {
        let r = &field.ambient.apply(ctx.defining()) - &(&field.multiplier * ctx.defining());
        return Err(SuspensionError::NotTangent(r.to_string()));
    }
    let div = divergence(&field.ambient, ctx.volume())?;
    Ok(ctx.normal_form(&(&div - &field.multiplier)))
}

/// A point of the hypersurface in coordinates `(u, v, z1, ..., zn)`.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfacePoint {
    Exact(Vec<GaussianRational>),
    Float(Vec<Complex64>),
}

impl SurfacePoint {
    /// Checks `uv - f(z) = 0` exactly.
    pub fn exact(ctx: &SuspensionContext, coords: Vec<GaussianRational>) -> Result<Self, SuspensionError> {
        if coords.len() != ctx.nvars() {
            return Err(SuspensionError::WrongContext {
                expected: ctx.nvars(),
                found: coords.len(),
            });
        }
        let res = ctx.defining().eval(&coords);
        if !res.is_zero() {
            return Err(SuspensionError::OffSurface(res.to_string()));
        }
        Ok(Self::Exact(coords))
    }

    /// Checks `|uv - f(z)| <= 1e-12`.
    pub fn float(ctx: &SuspensionContext, coords: Vec<Complex64>) -> Result<Self, SuspensionError> {
        if coords.len() != ctx.nvars() {
            return Err(SuspensionError::WrongContext {
                expected: ctx.nvars(),
                found: coords.len(),
            });
        }
        let res = eval_complex(ctx.defining(), &coords).norm();
        if !(res <= FLOAT_RESIDUAL_TOL) {
            return Err(SuspensionError::OffSurface(format!("{res:e}")));
        }
        Ok(Self::Float(coords))
    }

    pub fn as_exact(&self) -> Option<&[GaussianRational]> {
        match self {
            Self::Exact(c) => Some(c),
            Self::Float(_) => None,
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Self::Exact(c) => c.iter().map(GaussianRational::to_complex).collect(),
            Self::Float(c) => c.clone(),
        }
    }

    pub fn to_float(&self) -> SurfacePoint {
        Self::Float(self.to_complex())
    }
}

/// Straightforward floating evaluation of a polynomial.
pub fn eval_complex(p: &Poly, x: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (e, c) in p.terms() {
        let mut t = c.to_complex();
        for (k, &ek) in e.iter().enumerate() {
            if ek > 0 {
                t *= x[k].powu(ek);
            }
        }
        acc += t;
    }
    acc
}

/// Exact basis of `ker d_p(uv - f)`, the tangent space at `p`.
pub fn tangent_basis(ctx: &SuspensionContext, p: &[GaussianRational]) -> Result<Vec<Vec<GaussianRational>>, SuspensionError> {
    let grad: Vec<GaussianRational> = ctx.gradient().iter().map(|g| g.eval(p)).collect();
    if grad.iter().all(Zero::is_zero) {
        return Err(SuspensionError::SingularPoint);
    }
    Ok(ExactMatrix::from_rows(vec![grad], ctx.nvars()).nullspace())
}

/// A polynomial map `C^n -> C^n` (one image per `z` variable) whose image
/// lies in `{f = 0}`. Used to sample points with `u = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroFiberParam {
    images: Vec<Poly>,
}

impl ZeroFiberParam {
    pub fn new(ctx: &SuspensionContext, images: Vec<Poly>) -> Result<Self, SuspensionError> {
        if images.len() != ctx.n() || images.iter().any(|p| p.nvars() != ctx.nvars() || p.involves(U) || p.involves(V)) {
            return Err(SuspensionError::BadParametrization);
        }
        let param = Self { images };
        let full = param.ambient_images(ctx.nvars());
        if !ctx.f().compose(&full).is_zero() {
            return Err(SuspensionError::BadParametrization);
        }
        Ok(param)
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    fn ambient_images(&self, nvars: usize) -> Vec<Poly> {
        let mut full = vec![Poly::var(nvars, U), Poly::var(nvars, V)];
        full.extend(self.images.iter().cloned());
        full
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Float,
}

/// Square grid `{a + bi : a, b in lo, lo + step, ..., hi}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub lo: BigRational,
    pub hi: BigRational,
    pub step: BigRational,
}

impl Region {
    pub fn new(lo: BigRational, hi: BigRational, step: BigRational) -> Self {
        Self { lo, hi, step }
    }

    pub fn symmetric(half_width: i64, step_den: i64) -> Self {
        Self::new(
            BigRational::from_integer((-half_width).into()),
            BigRational::from_integer(half_width.into()),
            BigRational::new(1.into(), step_den.into()),
        )
    }

    /// Real grid values; empty when `lo > hi` or `step <= 0`.
    pub fn axis(&self) -> Vec<BigRational> {
        let mut out = Vec::new();
        if !self.step.is_positive() {
            return out;
        }
        let mut x = self.lo.clone();
        while x <= self.hi {
            out.push(x.clone());
            x += &self.step;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub region: Region,
    pub exactness: Exactness,
    /// Fraction of points drawn from the zero fiber (`u = 0`), used only
    /// when a parametrization is supplied.
    pub zero_fiber_fraction: f64,
    pub zero_fiber: Option<ZeroFiberParam>,
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64, region: Region) -> Self {
        Self {
            count,
            seed,
            region,
            exactness: Exactness::Exact,
            zero_fiber_fraction: 0.0,
            zero_fiber: None,
        }
    }
}

fn grid_value(rng: &mut ChaCha8Rng, axis: &[BigRational]) -> GaussianRational {
    let re = axis[rng.gen_range(0..axis.len())].clone();
    let im = axis[rng.gen_range(0..axis.len())].clone();
    GaussianRational::new(re, im)
}

/// Draws points on the hypersurface. With `u != 0`, `v = f(z) / u`; with a
/// zero-fiber parametrization, a share of points has `u = 0`, `z` on the
/// zero fiber, and `v` free.
pub fn sample_points(ctx: &SuspensionContext, spec: &SampleSpec) -> Result<Vec<SurfacePoint>, SuspensionError> {
    let axis = spec.region.axis();
    if axis.is_empty() {
        return Err(SuspensionError::EmptyRegion);
    }
    if axis.len() == 1 && axis[0].is_zero() {
        // u could never be nonzero
        return Err(SuspensionError::EmptyRegion);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    let nv = ctx.nvars();
    while out.len() < spec.count {
        let use_zero_fiber = spec.zero_fiber.is_some() && rng.gen_bool(spec.zero_fiber_fraction.clamp(0.0, 1.0));
        let zs: Vec<GaussianRational> = (0..ctx.n()).map(|_| grid_value(&mut rng, &axis)).collect();
        let coords = if use_zero_fiber {
            let param = spec.zero_fiber.as_ref().unwrap();
            let mut base = vec![GaussianRational::zero(), GaussianRational::zero()];
            base.extend(zs);
            let mut c = vec![GaussianRational::zero(), grid_value(&mut rng, &axis)];
            c.extend(param.images().iter().map(|p| p.eval(&base)));
            c
        } else {
            let u = loop {
                let u = grid_value(&mut rng, &axis);
                if !u.is_zero() {
                    break u;
                }
            };
            let mut c = vec![u.clone(), GaussianRational::zero()];
            c.extend(zs);
            let fz = ctx.f().eval(&c);
            c[V] = &fz / &u;
            c
        };
        debug_assert_eq!(coords.len(), nv);
        let point = SurfacePoint::exact(ctx, coords)?;
        out.push(match spec.exactness {
            Exactness::Exact => point,
            Exactness::Float => point.to_float(),
        });
    }
    Ok(out)
}

/// Result of checking that `f` and its partials have no common zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessWitness {
    pub samples_checked: usize,
    /// Indices of samples where `f` and every `df/dz_j` vanish.
    pub singular_samples: Vec<usize>,
    /// Cofactors `a_0, a_1, ..` with `a_0 f + sum_j a_j df/dz_j = 1`, printed.
    pub unit_certificate: Option<Vec<String>>,
}

impl SmoothnessWitness {
    pub fn ok(&self) -> bool {
        self.singular_samples.is_empty()
    }
}

/// Exact check on the sample set plus an optional search for a certificate
/// that `1` lies in the ideal `(f, df/dz1, ..., df/dzn)`.
pub fn smoothness_witness(ctx: &SuspensionContext, samples: &[SurfacePoint], certificate_degree: Option<u32>) -> SmoothnessWitness {
    let partials: Vec<Poly> = ctx.z_vars().iter().map(|&k| ctx.f().derivative(k)).collect();
    let mut singular = Vec::new();
    let mut checked = 0;
    for (i, s) in samples.iter().enumerate() {
        match s {
            SurfacePoint::Exact(c) => {
                checked += 1;
                if ctx.f().eval(c).is_zero() && partials.iter().all(|p| p.eval(c).is_zero()) {
                    singular.push(i);
                }
            }
            SurfacePoint::Float(c) => {
                checked += 1;
                let tol = 1e-9;
                if eval_complex(ctx.f(), c).norm() < tol && partials.iter().all(|p| eval_complex(p, c).norm() < tol) {
                    singular.push(i);
                }
            }
        }
    }
    let unit_certificate = certificate_degree.and_then(|d| unit_ideal_certificate(ctx, d)).map(|cs| cs.iter().map(|p| p.to_string()).collect());
    SmoothnessWitness {
        samples_checked: checked,
        singular_samples: singular,
        unit_certificate,
    }
}

/// Searches cofactors of degree `<= degree` with `a_0 f + sum a_j df/dz_j = 1`.
pub fn unit_ideal_certificate(ctx: &SuspensionContext, degree: u32) -> Option<Vec<Poly>> {
    let nv = ctx.nvars();
    let mut gens = vec![ctx.f().clone()];
    gens.extend(ctx.z_vars().iter().map(|&k| ctx.f().derivative(k)));
    let monos = monomials_up_to(nv, &ctx.z_vars(), degree);
    let columns: Vec<Poly> = gens
        .iter()
        .flat_map(|g| monos.iter().map(move |m| g.mul_monomial(m)))
        .collect();
    let mut row_index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for c in &columns {
        for (e, _) in c.terms() {
            let next = row_index.len();
            row_index.entry(e.clone()).or_insert(next);
        }
    }
    let one_exp = vec![0u32; nv];
    let next = row_index.len();
    row_index.entry(one_exp.clone()).or_insert(next);
    let mut m = ExactMatrix::zeros(row_index.len(), columns.len());
    for (j, c) in columns.iter().enumerate() {
        for (e, coef) in c.terms() {
            m[(row_index[e], j)] = coef.clone();
        }
    }
    let mut rhs = vec![GaussianRational::zero(); row_index.len()];
    rhs[row_index[&one_exp]] = GaussianRational::one();
    let x = m.solve(&rhs)?;
    let per = monos.len();
    Some(
        (0..gens.len())
            .map(|g| Poly::from_terms(nv, monos.iter().enumerate().map(|(k, e)| (e.clone(), x[g * per + k].clone()))))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn ctx(n: usize, f: &str) -> SuspensionContext {
        make_suspension(n, parse_poly(f, n).unwrap()).unwrap()
    }

    fn g(k: i64) -> GaussianRational {
        GaussianRational::from_int(k)
    }

    #[test]
    fn construction_and_errors() {
        let c = ctx(1, "z1");
        assert_eq!(c.nvars(), 3);
        let c2 = ctx(2, "z1");
        assert_eq!(c2.defining(), &parse_poly("u*v - z1", 2).unwrap());
        assert_eq!(make_suspension(1, Poly::from_int(3, 5)).unwrap_err(), SuspensionError::ConstantF);
        assert_eq!(make_suspension(1, parse_poly("u + z1", 1).unwrap()).unwrap_err(), SuspensionError::FInvolvesUv);
    }

    #[test]
    fn tangency_examples() {
        let c = ctx(1, "z1");
        let twist = VectorField::new(vec![parse_poly("u", 1).unwrap(), parse_poly("-v", 1).unwrap(), Poly::zero(3)]);
        assert!(is_tangent(&twist, &c).unwrap().is_zero());
        let du = VectorField::coordinate(3, U);
        assert!(matches!(is_tangent(&du, &c), Err(SuspensionError::NotTangent(_))));
        // Euler-type field with nonzero multiplier
        let euler = VectorField::new(vec![parse_poly("u", 1).unwrap(), Poly::zero(3), parse_poly("z1", 1).unwrap()]);
        assert_eq!(is_tangent(&euler, &c).unwrap(), Poly::one(3));
    }

    #[test]
    fn suspension_divergence_examples() {
        let c = ctx(2, "z1^2 + z2^2 - 1");
        let h = parse_poly("z1*z2 + 3", 2).unwrap();
        let twist = VectorField::new(vec![parse_poly("u", 2).unwrap(), parse_poly("-v", 2).unwrap(), Poly::zero(4), Poly::zero(4)]).scale(&h);
        let sf = SuspensionField::new(twist, &c).unwrap();
        assert!(divergence_on_suspension(&sf, &c).unwrap().is_zero());

        let c1 = ctx(1, "z1");
        let euler = VectorField::new(vec![parse_poly("u", 1).unwrap(), Poly::zero(3), parse_poly("z1", 1).unwrap()]);
        let sf = SuspensionField::new(euler, &c1).unwrap();
        // div = 2, multiplier 1
        assert_eq!(divergence_on_suspension(&sf, &c1).unwrap(), Poly::one(3));
    }

    #[test]
    fn tangent_basis_examples() {
        let c = ctx(2, "z1");
        let p = vec![g(1), g(1), g(1), g(0)];
        let basis = tangent_basis(&c, &p).unwrap();
        assert_eq!(basis.len(), 3);
        let grad: Vec<_> = c.gradient().iter().map(|q| q.eval(&p)).collect();
        for w in &basis {
            let s = w.iter().zip(&grad).fold(GaussianRational::zero(), |acc, (a, b)| &acc + &(a * b));
            assert!(s.is_zero());
        }
        assert_eq!(ExactMatrix::from_rows(basis, 4).rank(), 3);

        let q = vec![g(0), g(0), g(0), g(5)];
        let basis = tangent_basis(&c, &q).unwrap();
        // kernel of (0, 0, -1, 0): span of du, dv, dz2
        for w in &basis {
            assert!(w[2].is_zero());
        }
        assert_eq!(basis.len(), 3);

        let sing = ctx(1, "z1^2");
        assert_eq!(tangent_basis(&sing, &[g(0), g(0), g(0)]), Err(SuspensionError::SingularPoint));
    }

    #[test]
    fn sampling_respects_the_surface() {
        let c = ctx(2, "z1");
        let param = ZeroFiberParam::new(&c, vec![Poly::zero(4), parse_poly("z2", 2).unwrap()]).unwrap();
        let mut spec = SampleSpec::new(40, 5, Region::symmetric(2, 2));
        spec.zero_fiber = Some(param);
        spec.zero_fiber_fraction = 0.5;
        let pts = sample_points(&c, &spec).unwrap();
        assert_eq!(pts.len(), 40);
        let mut zero_u = 0;
        for p in &pts {
            let e = p.as_exact().unwrap();
            assert!(c.defining().eval(e).is_zero());
            if e[U].is_zero() {
                zero_u += 1;
                assert!(e[2].is_zero());
            }
        }
        assert!(zero_u > 0);
        let again = sample_points(&c, &spec).unwrap();
        assert_eq!(pts, again);

        let bad = ZeroFiberParam::new(&c, vec![parse_poly("z1", 2).unwrap(), Poly::zero(4)]);
        assert_eq!(bad.unwrap_err(), SuspensionError::BadParametrization);
        let empty = SampleSpec::new(3, 1, Region::new(BigRational::one(), BigRational::zero(), BigRational::one()));
        assert_eq!(sample_points(&c, &empty).unwrap_err(), SuspensionError::EmptyRegion);
    }

    #[test]
    fn explicit_v_from_u() {
        // f = z1, z1 = 2, u = 1 gives v = 2
        let c = ctx(2, "z1");
        let p = SurfacePoint::exact(&c, vec![g(1), g(2), g(2), g(7)]).unwrap();
        assert!(p.as_exact().is_some());
        assert!(SurfacePoint::exact(&c, vec![g(1), g(3), g(2), g(7)]).is_err());
        let fl = SurfacePoint::float(&c, vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(fl.is_ok());
    }

    #[test]
    fn unit_certificates_for_bundled_functions() {
        for (n, f) in [(1, "z1"), (2, "z1"), (2, "z1^2 + z2^2 - 1"), (2, "z1*z2 - 1")] {
            let c = ctx(n, f);
            let cof = unit_ideal_certificate(&c, 1).expect(f);
            let mut acc = &cof[0] * c.f();
            for (k, zk) in c.z_vars().into_iter().enumerate() {
                acc = &acc + &(&cof[k + 1] * &c.f().derivative(zk));
            }
            assert_eq!(acc, Poly::one(c.nvars()));
        }
        assert!(unit_ideal_certificate(&ctx(1, "z1^2"), 3).is_none());
    }
}
