//! Polynomial differential forms on the ambient space.
//!
//! Sign conventions: coefficients live on strictly increasing index tuples,
//! the interior product contracts the first slot, and `d` prepends the new
//! differential before sorting.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use super::field::VectorField;
use crate::algebra::{var_name, GaussianRational, Poly};
use crate::error::CalculusError;

pub type FormIndex = Vec<usize>;

#[derive(Clone, PartialEq, Eq)]
pub struct DiffForm {
    nvars: usize,
    degree: usize,
    coeffs: BTreeMap<FormIndex, Poly>,
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl DiffForm {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        Self {
            nvars,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The 0-form given by a function.
    pub fn function(p: Poly) -> Self {
        let mut f = Self::zero(p.nvars(), 0);
        f.add_term(vec![], &p);
        f
    }

    /// `p * dx_{i1} ^ ... ^ dx_{ik}` for an arbitrary (unsorted) index list.
    pub fn term(p: Poly, idx: &[usize]) -> Self {
        let mut f = Self::zero(p.nvars(), idx.len());
        f.add_term(idx.to_vec(), &p);
        f
    }

    /// `dx_idx`.
    pub fn dx(nvars: usize, idx: usize) -> Self {
        Self::term(Poly::one(nvars), &[idx])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: &[usize]) -> Poly {
        self.coeffs.get(idx).cloned().unwrap_or_else(|| Poly::zero(self.nvars))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormIndex, &Poly)> {
        self.coeffs.iter()
    }

    /// Adds `p * dx_idx` with `idx` in any order, applying the permutation sign.
    pub fn add_term(&mut self, mut idx: FormIndex, p: &Poly) {
        assert_eq!(idx.len(), self.degree, "form degree mismatch");
        assert!(idx.iter().all(|&k| k < self.nvars));
        if p.is_zero() {
            return;
        }
        let Some(sign) = sort_sign(&mut idx) else {
            return;
        };
        let p = if sign < 0 { -p } else { p.clone() };
        let entry = self.coeffs.entry(idx.clone()).or_insert_with(|| Poly::zero(self.nvars));
        *entry = &*entry + &p;
        if entry.is_zero() {
            self.coeffs.remove(&idx);
        }
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.add(&other.scale(&Poly::from_int(self.nvars, -1)))
    }

    pub fn scale(&self, h: &Poly) -> DiffForm {
        let mut out = DiffForm::zero(self.nvars, self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(k.clone(), &(c * h));
        }
        out
    }

    pub fn wedge(&self, other: &DiffForm) -> DiffForm {
        assert_eq!(self.nvars, other.nvars);
        let mut out = DiffForm::zero(self.nvars, self.degree + other.degree);
        if self.degree + other.degree > self.nvars {
            return out;
        }
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                if ka.iter().any(|k| kb.contains(k)) {
                    continue;
                }
                let mut idx = ka.clone();
                idx.extend(kb);
                out.add_term(idx, &(ca * cb));
            }
        }
        out
    }

    /// Evaluation on vectors at a point: `alpha(w_1, ..., w_k)`.
    pub fn eval_on(&self, point: &[GaussianRational], vectors: &[Vec<GaussianRational>]) -> GaussianRational {
        assert_eq!(vectors.len(), self.degree);
        let mut acc = GaussianRational::zero();
        for (idx, c) in &self.coeffs {
            let cv = c.eval(point);
            if cv.is_zero() {
                continue;
            }
            acc += &(&cv * &det_minor(vectors, idx));
        }
        acc
    }
}

/// `det [w_j[idx_i]]`, the value of `dx_idx` on the vectors `w`.
fn det_minor(vectors: &[Vec<GaussianRational>], idx: &[usize]) -> GaussianRational {
    let k = idx.len();
    let rows: Vec<Vec<GaussianRational>> = (0..k).map(|i| vectors.iter().map(|w| w[idx[i]].clone()).collect()).collect();
    crate::algebra::ExactMatrix::from_rows(rows, k).determinant()
}

/// `iota_theta alpha`, contracting the first slot.
pub fn interior_product(theta: &VectorField, alpha: &DiffForm) -> Result<DiffForm, CalculusError> {
    if alpha.degree == 0 {
        return Err(CalculusError::DegreeZero);
    }
    if theta.nvars() != alpha.nvars {
        return Err(CalculusError::ContextMismatch(theta.nvars(), alpha.nvars));
    }
    let mut out = DiffForm::zero(alpha.nvars, alpha.degree - 1);
    for (idx, c) in &alpha.coeffs {
        for (s, &k) in idx.iter().enumerate() {
            let tk = theta.coeff(k);
            if tk.is_zero() {
                continue;
            }
            let mut rest = idx.clone();
            rest.remove(s);
            let mut term = c * tk;
            if s % 2 == 1 {
                term = -term;
            }
            out.add_term(rest, &term);
        }
    }
    Ok(out)
}

/// `d alpha`.
pub fn exterior_derivative(alpha: &DiffForm) -> DiffForm {
    let mut out = DiffForm::zero(alpha.nvars, alpha.degree + 1);
    if alpha.degree >= alpha.nvars {
        return out;
    }
    for (idx, c) in &alpha.coeffs {
        for j in 0..alpha.nvars {
            if idx.contains(&j) || !c.involves(j) {
                continue;
            }
            let mut full = vec![j];
            full.extend(idx);
            out.add_term(full, &c.derivative(j));
        }
    }
    out
}

/// Lie derivative by Cartan's formula `L = d iota + iota d`.
pub fn lie_derivative(theta: &VectorField, alpha: &DiffForm) -> DiffForm {
    let d_alpha = exterior_derivative(alpha);
    let second = if d_alpha.degree() == 0 {
        DiffForm::zero(alpha.nvars, alpha.degree)
    } else {
        interior_product(theta, &d_alpha).expect("degree >= 1")
    };
    if alpha.degree == 0 {
        return second;
    }
    let first = exterior_derivative(&interior_product(theta, alpha).expect("degree >= 1"));
    first.add(&second)
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(idx, c)| {
                if idx.is_empty() {
                    format!("({c})")
                } else {
                    let d: Vec<String> = idx.iter().map(|&k| format!("d{}", var_name(k))).collect();
                    format!("({c})*{}", d.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffForm[{}]({self})", self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, z, U, V};

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, n).unwrap()
    }

    #[test]
    fn interior_product_examples() {
        // ambient C^2 x C^1 but forms only in du, dv
        let n = 1;
        let dudv = DiffForm::term(Poly::one(3), &[U, V]);
        let du = VectorField::coordinate(3, U);
        assert_eq!(interior_product(&du, &dudv).unwrap(), DiffForm::dx(3, V));
        let dv = VectorField::coordinate(3, V);
        assert_eq!(
            interior_product(&dv, &dudv).unwrap(),
            DiffForm::dx(3, U).scale(&Poly::from_int(3, -1))
        );
        let vol = DiffForm::term(Poly::one(3), &[U, V, z(1)]);
        let v_du = VectorField::single(U, p("v", n));
        assert_eq!(interior_product(&v_du, &vol).unwrap(), DiffForm::term(p("v", n), &[V, z(1)]));
        assert_eq!(interior_product(&du, &DiffForm::function(p("u", n))), Err(CalculusError::DegreeZero));
    }

    #[test]
    fn exterior_derivative_examples() {
        let n = 2;
        let a = DiffForm::term(p("z1", n), &[z(2)]);
        assert_eq!(exterior_derivative(&a), DiffForm::term(Poly::one(4), &[z(1), z(2)]));
        let b = DiffForm::term(p("u", n), &[V]).add(&DiffForm::term(p("v", n), &[U]));
        assert!(exterior_derivative(&b).is_zero());
        let c = DiffForm::term(p("3 - i", n), &[U, z(2)]);
        assert!(exterior_derivative(&c).is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let n = 1;
        let a = DiffForm::term(p("u", n), &[U, V]);
        let du = VectorField::coordinate(3, U);
        assert_eq!(lie_derivative(&du, &a), DiffForm::term(Poly::one(3), &[U, V]));
        let euler = VectorField::single(U, p("u", n));
        assert_eq!(lie_derivative(&euler, &DiffForm::dx(3, U)), DiffForm::dx(3, U));
    }

    #[test]
    fn wedge_sign_and_evaluation() {
        let n = 1;
        let du = DiffForm::dx(3, U);
        let dv = DiffForm::dx(3, V);
        assert_eq!(du.wedge(&dv), dv.wedge(&du).scale(&Poly::from_int(3, -1)));
        assert!(du.wedge(&du).is_zero());
        let form = du.wedge(&dv).scale(&p("z1", n));
        let pt = vec![0.into(), 0.into(), 2.into()];
        let e = |k: usize| {
            let mut w = vec![GaussianRational::zero(); 3];
            w[k] = 1.into();
            w
        };
        assert_eq!(form.eval_on(&pt, &[e(U), e(V)]), 2.into());
        assert_eq!(form.eval_on(&pt, &[e(V), e(U)]), (-2).into());
    }
}
