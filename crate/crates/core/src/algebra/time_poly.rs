//! Polynomials in a time variable `t` with polynomial coefficients:
//! `sum_k t^k c_k` with every `c_k` in the ambient ring.

use num::Zero;

use super::poly::Poly;
use super::scalar::GaussianRational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TimePoly {
    nvars: usize,
    coeffs: Vec<Poly>,
}

impl TimePoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, coeffs: Vec::new() }
    }

    /// A polynomial constant in `t`.
    pub fn constant(p: Poly) -> Self {
        Self::from_coeffs(p.nvars(), vec![p])
    }

    /// `t` itself.
    pub fn t(nvars: usize) -> Self {
        Self::from_coeffs(nvars, vec![Poly::zero(nvars), Poly::one(nvars)])
    }

    pub fn from_coeffs(nvars: usize, coeffs: Vec<Poly>) -> Self {
        let mut s = Self { nvars, coeffs };
        s.trim();
        s
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^k`.
    pub fn coeff(&self, k: usize) -> Poly {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &TimePoly) -> TimePoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        TimePoly::from_coeffs(self.nvars, (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &TimePoly) -> TimePoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        TimePoly::from_coeffs(self.nvars, (0..len).map(|k| &self.coeff(k) - &other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &TimePoly) -> TimePoly {
        if self.is_zero() || other.is_zero() {
            return TimePoly::zero(self.nvars);
        }
        let mut out = vec![Poly::zero(self.nvars); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        TimePoly::from_coeffs(self.nvars, out)
    }

    pub fn scale(&self, p: &Poly) -> TimePoly {
        TimePoly::from_coeffs(self.nvars, self.coeffs.iter().map(|c| c * p).collect())
    }

    pub fn pow(&self, e: u32) -> TimePoly {
        let mut acc = TimePoly::constant(Poly::one(self.nvars));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `d/dt`.
    pub fn derivative_t(&self) -> TimePoly {
        TimePoly::from_coeffs(
            self.nvars,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&GaussianRational::from_int(k as i64)))
                .collect(),
        )
    }

    /// `int_0^t`.
    pub fn integrate_t(&self) -> TimePoly {
        let mut out = vec![Poly::zero(self.nvars)];
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c.scale(&GaussianRational::from_frac(1, k as i64 + 1)));
        }
        TimePoly::from_coeffs(self.nvars, out)
    }

    /// Drops the constant term and divides by `t`. The caller guarantees the
    /// constant term is zero.
    pub fn div_t(&self) -> TimePoly {
        debug_assert!(self.coeff(0).is_zero());
        TimePoly::from_coeffs(self.nvars, self.coeffs.iter().skip(1).cloned().collect())
    }

    /// `t -> t * w` for a polynomial `w`: coefficient `k` picks up `w^k`.
    pub fn rescale_time(&self, w: &Poly) -> TimePoly {
        let mut wk = Poly::one(self.nvars);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &wk);
            wk = &wk * w;
        }
        TimePoly::from_coeffs(self.nvars, out)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> TimePoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![Poly::zero(self.nvars); k];
        out.extend(self.coeffs.iter().cloned());
        TimePoly::from_coeffs(self.nvars, out)
    }

    /// Value at a fixed time, as an ambient polynomial.
    pub fn at(&self, t: &GaussianRational) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(t) + c;
        }
        acc
    }

    /// Applies a map to every coefficient.
    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> TimePoly {
        TimePoly::from_coeffs(self.nvars, self.coeffs.iter().map(f).collect())
    }
}

/// Substitutes time-dependent images for the variables of `p`.
pub fn compose_time(p: &Poly, images: &[TimePoly]) -> TimePoly {
    assert_eq!(images.len(), p.nvars(), "one image per variable");
    let nvars = images.first().map(|x| x.nvars()).unwrap_or(p.nvars());
    let mut cache: Vec<Vec<TimePoly>> = images
        .iter()
        .map(|x| vec![TimePoly::constant(Poly::one(nvars)), x.clone()])
        .collect();
    let mut acc = TimePoly::zero(nvars);
    for (e, c) in p.terms() {
        if c.is_zero() {
            continue;
        }
        let mut term = TimePoly::constant(Poly::constant(nvars, c.clone()));
        for (k, &ek) in e.iter().enumerate() {
            if ek == 0 {
                continue;
            }
            while cache[k].len() <= ek as usize {
                let next = cache[k].last().unwrap().mul(&images[k]);
                cache[k].push(next);
            }
            term = term.mul(&cache[k][ek as usize]);
        }
        acc = acc.add(&term);
    }
    acc
}
