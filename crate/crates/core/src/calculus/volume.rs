use super::field::VectorField;
use super::form::{exterior_derivative, interior_product, lie_derivative, DiffForm};
use crate::algebra::Poly;
use crate::error::CalculusError;

/// A top-degree form `h * dx_0 ^ ... ^ dx_{N-1}` with `h != 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VolumeForm {
    form: DiffForm,
}

impl VolumeForm {
    /// `du ^ dv ^ dz1 ^ ... ^ dzn` (or the standard form in any dimension).
    pub fn standard(nvars: usize) -> Self {
        let idx: Vec<usize> = (0..nvars).collect();
        Self {
            form: DiffForm::term(Poly::one(nvars), &idx),
        }
    }

    pub fn new(form: DiffForm) -> Result<Self, CalculusError> {
        if form.degree() != form.nvars() {
            return Err(CalculusError::NotTopDegree {
                expected: form.nvars(),
                found: form.degree(),
            });
        }
        if form.is_zero() {
            return Err(CalculusError::DegenerateVolume);
        }
        Ok(Self { form })
    }

    pub fn form(&self) -> &DiffForm {
        &self.form
    }

    pub fn nvars(&self) -> usize {
        self.form.nvars()
    }

    /// The coefficient `h` in `h * dx_0 ^ ... `.
    pub fn density(&self) -> Poly {
        let idx: Vec<usize> = (0..self.nvars()).collect();
        self.form.coeff(&idx)
    }
}

/// The multiplier `div` with `L_theta omega = div * omega`.
pub fn divergence(theta: &VectorField, omega: &VolumeForm) -> Result<Poly, CalculusError> {
    if theta.nvars() != omega.nvars() {
        return Err(CalculusError::ContextMismatch(theta.nvars(), omega.nvars()));
    }
    let lie = lie_derivative(theta, omega.form());
    let idx: Vec<usize> = (0..omega.nvars()).collect();
    let top = lie.coeff(&idx);
    let (q, r) = top
        .div_rem(&omega.density())
        .map_err(|_| CalculusError::DegenerateVolume)?;
    if !r.is_zero() {
        return Err(CalculusError::NonPolynomialDivergence);
    }
    Ok(q)
}

/// Divergence for the standard volume form, `sum_j d c_j / dx_j`.
pub fn standard_divergence(theta: &VectorField) -> Poly {
    theta
        .coeffs()
        .iter()
        .enumerate()
        .fold(Poly::zero(theta.nvars()), |acc, (j, c)| &acc + &c.derivative(j))
}

/// `iota_theta omega` for a divergence-free field; the result is closed.
pub fn field_to_closed_form(theta: &VectorField, omega: &VolumeForm) -> Result<DiffForm, CalculusError> {
    let div = divergence(theta, omega)?;
    if !div.is_zero() {
        return Err(CalculusError::NonzeroDivergence(div.to_string()));
    }
    interior_product(theta, omega.form())
}

/// `iota_nu iota_mu omega`, a form of degree `N - 2`.
pub fn pair_to_form(nu: &VectorField, mu: &VectorField, omega: &VolumeForm) -> Result<DiffForm, CalculusError> {
    let inner = interior_product(mu, omega.form())?;
    interior_product(nu, &inner)
}

/// True when `d alpha = 0`.
pub fn is_closed(alpha: &DiffForm) -> bool {
    exterior_derivative(alpha).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, z, U, V};
    use crate::calculus::lie_bracket;

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, n).unwrap()
    }

    /// Builds fields in C^2 (only u, v) by using nvars = 2.
    fn field2(cu: &str, cv: &str) -> VectorField {
        let q = |s: &str| p(s, 0);
        VectorField::new(vec![q(cu), q(cv)])
    }

    #[test]
    fn divergence_examples() {
        let omega = VolumeForm::standard(3);
        let u_du = VectorField::single(U, p("u", 1));
        assert_eq!(divergence(&u_du, &omega).unwrap(), Poly::one(3));
        let twist = VectorField::new(vec![p("u", 1), p("-v", 1), Poly::zero(3)]);
        assert!(divergence(&twist, &omega).unwrap().is_zero());
    }

    #[test]
    fn divergence_for_weighted_volume() {
        // omega = z1^2 du^dv^dz1 ; div = sum d_j c_j + theta(h)/h
        let h = p("z1^2", 1);
        let omega = VolumeForm::new(DiffForm::term(h, &[U, V, z(1)])).unwrap();
        let euler = VectorField::single(z(1), p("z1", 1));
        assert_eq!(divergence(&euler, &omega).unwrap(), Poly::from_int(3, 3));
        let shift = VectorField::coordinate(3, z(1));
        assert_eq!(divergence(&shift, &omega), Err(CalculusError::NonPolynomialDivergence));
        assert!(matches!(
            VolumeForm::new(DiffForm::term(Poly::one(3), &[U, V])),
            Err(CalculusError::NotTopDegree { .. })
        ));
        assert_eq!(
            VolumeForm::new(DiffForm::zero(3, 3)),
            Err(CalculusError::DegenerateVolume)
        );
    }

    #[test]
    fn closed_form_examples() {
        let omega = VolumeForm::standard(2);
        let du = field2("1", "0");
        assert_eq!(field_to_closed_form(&du, &omega).unwrap(), DiffForm::dx(2, V));
        let twist = field2("u", "-v");
        let closed = field_to_closed_form(&twist, &omega).unwrap();
        // iota(u du - v dv)(du^dv) = u dv + v du
        let expected = DiffForm::term(p("u", 0), &[V]).add(&DiffForm::term(p("v", 0), &[U]));
        assert_eq!(closed, expected);
        assert!(is_closed(&closed));
        let bad = field2("u", "0");
        assert!(matches!(field_to_closed_form(&bad, &omega), Err(CalculusError::NonzeroDivergence(_))));
    }

    #[test]
    fn pair_to_form_examples() {
        let omega = VolumeForm::standard(3);
        let du = VectorField::coordinate(3, U);
        let dv = VectorField::coordinate(3, V);
        let expected = DiffForm::dx(3, z(1)).scale(&Poly::from_int(3, -1));
        assert_eq!(pair_to_form(&du, &dv, &omega).unwrap(), expected);
        assert!(pair_to_form(&du, &du, &omega).unwrap().is_zero());
    }

    #[test]
    fn bracket_orientation() {
        // d(iota_nu iota_mu omega) = iota_[nu,mu] omega, and the opposite
        // orientation differs by a sign.
        let omega = VolumeForm::standard(3);
        let nu = VectorField::new(vec![p("z1", 1), Poly::zero(3), p("v^2", 1)]);
        let mu = VectorField::new(vec![Poly::zero(3), p("u*z1", 1), Poly::zero(3)]);
        assert!(standard_divergence(&nu).is_zero() && standard_divergence(&mu).is_zero());
        let lhs = exterior_derivative(&pair_to_form(&nu, &mu, &omega).unwrap());
        let rhs = field_to_closed_form(&lie_bracket(&nu, &mu), &omega).unwrap();
        assert_eq!(lhs, rhs);
        let swapped = field_to_closed_form(&lie_bracket(&mu, &nu), &omega).unwrap();
        assert_eq!(lhs, swapped.scale(&Poly::from_int(3, -1)));
        assert!(!lhs.is_zero());
    }
}
