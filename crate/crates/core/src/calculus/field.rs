use std::fmt;

use crate::algebra::{var_name, GaussianRational, Poly, UvReducer};

/// Polynomial vector field `sum_j c_j d/dx_j` on the ambient space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    coeffs: Vec<Poly>,
}

impl VectorField {
    pub fn new(coeffs: Vec<Poly>) -> Self {
        let nvars = coeffs.len();
        assert!(coeffs.iter().all(|c| c.nvars() == nvars), "one coefficient per ambient variable");
        Self { coeffs }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::new(vec![Poly::zero(nvars); nvars])
    }

    /// The coordinate field `d/dx_idx`.
    pub fn coordinate(nvars: usize, idx: usize) -> Self {
        let mut c = vec![Poly::zero(nvars); nvars];
        c[idx] = Poly::one(nvars);
        Self::new(c)
    }

    /// `p * d/dx_idx`.
    pub fn single(idx: usize, p: Poly) -> Self {
        let nvars = p.nvars();
        let mut c = vec![Poly::zero(nvars); nvars];
        c[idx] = p;
        Self::new(c)
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: usize) -> &Poly {
        &self.coeffs[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// Action on functions: `sum_j c_j * dp/dx_j`.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero(self.nvars());
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() || !p.involves(j) {
                continue;
            }
            acc = &acc + &(c * &p.derivative(j));
        }
        acc
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    /// Multiplication by a function.
    pub fn scale(&self, h: &Poly) -> VectorField {
        VectorField::new(self.coeffs.iter().map(|c| c * h).collect())
    }

    pub fn scale_const(&self, c: &GaussianRational) -> VectorField {
        VectorField::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// Componentwise reduction modulo `(uv - f)`.
    pub fn reduce(&self, r: &UvReducer) -> VectorField {
        VectorField::new(self.coeffs.iter().map(|c| r.reduce(c)).collect())
    }

    /// Exact value at a point.
    pub fn eval(&self, point: &[GaussianRational]) -> Vec<GaussianRational> {
        self.coeffs.iter().map(|c| c.eval(point)).collect()
    }

    /// Highest total degree among the coefficients.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(Poly::total_degree).max()
    }
}

/// `[a, b]`, acting as `a(b(p)) - b(a(p))`.
pub fn lie_bracket(a: &VectorField, b: &VectorField) -> VectorField {
    assert_eq!(a.nvars(), b.nvars(), "shared variable context");
    VectorField::new(
        (0..a.nvars())
            .map(|k| &a.apply(b.coeff(k)) - &b.apply(a.coeff(k)))
            .collect(),
    )
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({c})*d{}", var_name(j)))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, z, U, V};

    fn p(s: &str) -> Poly {
        parse_poly(s, 1).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let du = VectorField::coordinate(3, U);
        let u_dv = VectorField::single(V, p("u"));
        assert_eq!(lie_bracket(&du, &u_dv), VectorField::coordinate(3, V));

        let theta = VectorField::new(vec![p("u*z1"), p("v^2"), p("1 + i*u")]);
        assert!(lie_bracket(&theta, &theta).is_zero());

        let euler = VectorField::single(z(1), p("z1"));
        let dz = VectorField::coordinate(3, z(1));
        assert_eq!(lie_bracket(&euler, &dz), dz.scale_const(&GaussianRational::from_int(-1)));
    }

    #[test]
    fn derivation_on_products() {
        let theta = VectorField::new(vec![p("v"), p("z1^2"), p("u - 1")]);
        let a = p("u*z1 + v");
        let b = p("z1^3 - 2*u*v");
        let lhs = theta.apply(&(&a * &b));
        let rhs = &(&a * &theta.apply(&b)) + &(&b * &theta.apply(&a));
        assert_eq!(lhs, rhs);
    }
}
