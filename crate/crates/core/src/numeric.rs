//! Floating-point evaluation of polynomials and fields, and an RK4
//! integrator with step doubling.

use num::complex::Complex64;

use crate::algebra::Poly;
use crate::calculus::VectorField;

/// A polynomial compiled for repeated floating evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    terms: Vec<(Complex64, Vec<(usize, u32)>)>,
}

impl FloatPoly {
    pub fn new(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(e, c)| {
                let powers = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect();
                (c.to_complex(), powers)
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, powers) in &self.terms {
            let mut t = *c;
            for &(i, k) in powers {
                t *= x[i].powu(k);
            }
            acc += t;
        }
        acc
    }
}

#[derive(Clone, Debug)]
pub struct FloatField {
    comps: Vec<FloatPoly>,
}

impl FloatField {
    pub fn new(field: &VectorField) -> Self {
        Self {
            comps: field.coeffs().iter().map(FloatPoly::new).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }
}

/// The integration left the region where the solution is trusted.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowUp {
    pub at_fraction: f64,
    pub norm: f64,
}

/// Solutions whose sup-norm exceeds this are treated as escaping.
pub const BLOWUP_NORM: f64 = 1e8;

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn axpy(x: &[Complex64], h: Complex64, k: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Fixed-step RK4 along the straight path from time 0 to complex time `t`.
pub fn rk4(field: &FloatField, x0: &[Complex64], t: Complex64, steps: usize) -> Result<Vec<Complex64>, BlowUp> {
    rk4_with(|x| field.eval(x), x0, t, steps)
}

/// RK4 for an arbitrary right-hand side.
pub fn rk4_with<F>(rhs: F, x0: &[Complex64], t: Complex64, steps: usize) -> Result<Vec<Complex64>, BlowUp>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let h = t / steps as f64;
    let mut x = x0.to_vec();
    for s in 0..steps {
        let k1 = rhs(&x);
        let k2 = rhs(&axpy(&x, h * 0.5, &k1));
        let k3 = rhs(&axpy(&x, h * 0.5, &k2));
        let k4 = rhs(&axpy(&x, h, &k3));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let m = max_abs(&x);
        if !m.is_finite() || m > BLOWUP_NORM {
            return Err(BlowUp {
                at_fraction: (s + 1) as f64 / steps as f64,
                norm: m,
            });
        }
    }
    Ok(x)
}

/// RK4 with step doubling until successive results agree to `tol`.
/// Returns the finer solution and its step count.
pub fn integrate(field: &FloatField, x0: &[Complex64], t: Complex64, tol: f64) -> Result<(Vec<Complex64>, usize), BlowUp> {
    let mut steps = 16;
    let mut coarse = rk4(field, x0, t, steps)?;
    loop {
        steps *= 2;
        let fine = rk4(field, x0, t, steps)?;
        let diff: Vec<Complex64> = fine.iter().zip(&coarse).map(|(a, b)| a - b).collect();
        let scale = 1.0 + max_abs(&fine);
        if max_abs(&diff) <= tol * scale || steps >= 1 << 16 {
            return Ok((fine, steps));
        }
        coarse = fine;
    }
}
