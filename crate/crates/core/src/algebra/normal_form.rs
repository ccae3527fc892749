//! Reduction modulo the principal ideal `(uv - f)` where `f` has no `u`, `v`.

use std::sync::Mutex;

use super::poly::{Exponent, Poly, U, V};
use crate::error::AlgebraError;

/// Rewrites `uv -> f` until no monomial is divisible by `uv`.
///
/// Because `f` is free of `u` and `v`, one pass that replaces
/// `u^a v^b` by `u^(a-k) v^(b-k) f^k` with `k = min(a, b)` already reaches
/// the fixpoint, and the result does not depend on the order of rewrites.
#[derive(Debug)]
pub struct UvReducer {
    f: Poly,
    powers: Mutex<Vec<Poly>>,
}

impl Clone for UvReducer {
    fn clone(&self) -> Self {
        Self {
            f: self.f.clone(),
            powers: Mutex::new(self.powers.lock().unwrap().clone()),
        }
    }
}

impl UvReducer {
    pub fn new(f: Poly) -> Result<Self, AlgebraError> {
        if f.nvars() < 2 || f.involves(U) || f.involves(V) {
            return Err(AlgebraError::InvolvesUv);
        }
        let one = Poly::one(f.nvars());
        Ok(Self {
            powers: Mutex::new(vec![one, f.clone()]),
            f,
        })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    fn f_power(&self, k: u32) -> Poly {
        let mut cache = self.powers.lock().unwrap();
        while cache.len() <= k as usize {
            let next = cache.last().unwrap() * &self.f;
            cache.push(next);
        }
        cache[k as usize].clone()
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        assert_eq!(p.nvars(), self.f.nvars(), "polynomial context mismatch");
        let mut out = Poly::zero(p.nvars());
        let mut untouched: Vec<(Exponent, _)> = Vec::new();
        for (e, c) in p.terms() {
            let k = e[U].min(e[V]);
            if k == 0 {
                untouched.push((e.clone(), c.clone()));
                continue;
            }
            let mut shift = e.clone();
            shift[U] -= k;
            shift[V] -= k;
            out = &out + &self.f_power(k).mul_monomial(&shift).scale(c);
        }
        &out + &Poly::from_terms(p.nvars(), untouched)
    }

    /// True when `p` has no monomial divisible by `uv`.
    pub fn is_reduced(p: &Poly) -> bool {
        p.terms().all(|(e, _)| e[U] == 0 || e[V] == 0)
    }
}
