//! Seeded generators for random polynomials, fields, forms and points.
//!
//! Coefficients are drawn from `{0, ±1, ±i, ±1/2}` and degrees stay small
//! so that exact arithmetic stays fast.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GaussianRational, Poly};
use crate::calculus::{DiffForm, VectorField};

pub struct Fuzz {
    rng: ChaCha8Rng,
}

impl Fuzz {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A coefficient from `{0, ±1, ±i, ±1/2}`.
    pub fn coeff(&mut self) -> GaussianRational {
        match self.rng.gen_range(0..7) {
            0 => GaussianRational::from_int(0),
            1 => GaussianRational::from_int(1),
            2 => GaussianRational::from_int(-1),
            3 => GaussianRational::i(),
            4 => -GaussianRational::i(),
            5 => GaussianRational::from_frac(1, 2),
            _ => GaussianRational::from_frac(-1, 2),
        }
    }

    pub fn nonzero_coeff(&mut self) -> GaussianRational {
        loop {
            let c = self.coeff();
            if !num::Zero::is_zero(&c) {
                return c;
            }
        }
    }

    /// Random exponent over `vars` with total degree at most `max_deg`.
    fn exponent(&mut self, nvars: usize, vars: &[usize], max_deg: u32) -> Vec<u32> {
        let mut e = vec![0; nvars];
        if vars.is_empty() {
            return e;
        }
        let d = self.rng.gen_range(0..=max_deg);
        for _ in 0..d {
            let k = *vars.choose(&mut self.rng).unwrap();
            e[k] += 1;
        }
        e
    }

    /// Random polynomial in the given variables; up to `max_terms` terms.
    pub fn poly(&mut self, nvars: usize, vars: &[usize], max_deg: u32, max_terms: usize) -> Poly {
        let nterms = self.rng.gen_range(0..=max_terms);
        let mut p = Poly::zero(nvars);
        for _ in 0..nterms {
            let e = self.exponent(nvars, vars, max_deg);
            let c = self.coeff();
            p = &p + &Poly::monomial(nvars, e, c);
        }
        p
    }

    pub fn nonzero_poly(&mut self, nvars: usize, vars: &[usize], max_deg: u32, max_terms: usize) -> Poly {
        loop {
            let p = self.poly(nvars, vars, max_deg, max_terms.max(1));
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// Random field with every coefficient in the given variables.
    pub fn field(&mut self, nvars: usize, max_deg: u32) -> VectorField {
        let vars: Vec<usize> = (0..nvars).collect();
        VectorField::new((0..nvars).map(|_| self.poly(nvars, &vars, max_deg, 3)).collect())
    }

    /// Random `degree`-form on the ambient space.
    pub fn form(&mut self, nvars: usize, degree: usize, max_deg: u32) -> DiffForm {
        let vars: Vec<usize> = (0..nvars).collect();
        let mut out = DiffForm::zero(nvars, degree);
        if degree > nvars {
            return out;
        }
        for _ in 0..self.rng.gen_range(1..=3) {
            let mut idx = vars.clone();
            idx.shuffle(&mut self.rng);
            idx.truncate(degree);
            let c = self.poly(nvars, &vars, max_deg, 3);
            out.add_term(idx, &c);
        }
        out
    }

    /// Sum of Hamiltonian fields `dH/dx_j d_i - dH/dx_i d_j` over random
    /// pairs of `vars`. Divergence-free for the standard volume form.
    pub fn divergence_free_field(&mut self, nvars: usize, vars: &[usize], max_deg: u32) -> VectorField {
        let mut out = VectorField::zero(nvars);
        if vars.len() < 2 {
            return out;
        }
        for _ in 0..self.rng.gen_range(1..=2) {
            let mut pair = vars.to_vec();
            pair.shuffle(&mut self.rng);
            let (i, j) = (pair[0], pair[1]);
            let h = self.poly(nvars, vars, max_deg + 1, 3);
            let mut c = vec![Poly::zero(nvars); nvars];
            c[i] = h.derivative(j);
            c[j] = -h.derivative(i);
            out = out.add(&VectorField::new(c));
        }
        out
    }

    /// Gaussian rational with real and imaginary parts in `{-2, -3/2, ..., 2}`.
    pub fn small_scalar(&mut self) -> GaussianRational {
        let re = self.rng.gen_range(-4..=4);
        let im = self.rng.gen_range(-4..=4);
        GaussianRational::from_parts((re, 2), (im, 2))
    }

    pub fn nonzero_small_scalar(&mut self) -> GaussianRational {
        loop {
            let c = self.small_scalar();
            if !num::Zero::is_zero(&c) {
                return c;
            }
        }
    }

    pub fn gen_range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::standard_divergence;

    #[test]
    fn hamiltonian_fields_are_divergence_free() {
        let mut fz = Fuzz::new(3);
        for _ in 0..50 {
            let f = fz.divergence_free_field(5, &[0, 1, 2, 3, 4], 4);
            assert!(standard_divergence(&f).is_zero());
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a: Vec<Poly> = {
            let mut fz = Fuzz::new(9);
            (0..5).map(|_| fz.poly(4, &[0, 1, 2, 3], 4, 4)).collect()
        };
        let b: Vec<Poly> = {
            let mut fz = Fuzz::new(9);
            (0..5).map(|_| fz.poly(4, &[0, 1, 2, 3], 4, 4)).collect()
        };
        assert_eq!(a, b);
    }
}
