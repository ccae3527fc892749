//! Sparse multivariate polynomials over Q(i) with dense exponent vectors.
//!
//! Variables are indexed by position. The ambient convention used
//! throughout the crate is `u = 0`, `v = 1`, `z1..zn = 2..n+1`; base-space
//! polynomials live in the same ring and simply do not involve `u` or `v`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};

use super::scalar::GaussianRational;
use crate::error::AlgebraError;

pub type Exponent = Vec<u32>;

pub const U: usize = 0;
pub const V: usize = 1;

/// Index of `z_j` (1-based, as written) in the ambient variable order.
pub fn z(j: usize) -> usize {
    assert!(j >= 1, "z variables are 1-based");
    j + 1
}

/// Printable name of an ambient variable index.
pub fn var_name(idx: usize) -> String {
    match idx {
        U => "u".to_string(),
        V => "v".to_string(),
        k => format!("z{}", k - 1),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, GaussianRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, GaussianRational::from_int(c))
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars, "variable {idx} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Self::monomial(nvars, e, GaussianRational::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: GaussianRational) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must equal nvars");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { nvars, terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(nvars: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, GaussianRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars);
            p.add_term(e, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> GaussianRational {
        self.terms.get(exp).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Indices of every variable that occurs in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&k| self.involves(k)).collect()
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(slot) => {
                slot.insert(c.clone());
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn check_ctx(&self, other: &Poly) -> Result<(), AlgebraError> {
        if self.nvars != other.nvars {
            return Err(AlgebraError::ContextMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exp: &[u32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(exp).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Poly {
        assert!(var < self.nvars, "variable {var} out of range");
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, &(c * &GaussianRational::from_int(e[var] as i64)));
        }
        out
    }

    /// Exact evaluation at a point with one value per variable.
    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut pow_cache: Vec<Vec<GaussianRational>> = point.iter().map(|x| vec![GaussianRational::one(), x.clone()]).collect();
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &ek) in e.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                let cache = &mut pow_cache[k];
                while cache.len() <= ek as usize {
                    let next = cache.last().unwrap() * &point[k];
                    cache.push(next);
                }
                t = &t * &cache[ek as usize];
            }
            acc += &t;
        }
        acc
    }

    /// Substitutes `images[k]` for variable `k` simultaneously. The images
    /// may live in a different ring; they must all share one context.
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(target);
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target), p.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (k, &ek) in e.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                while cache[k].len() <= ek as usize {
                    let next = cache[k].last().unwrap() * &images[k];
                    cache[k].push(next);
                }
                t = &t * &cache[k][ek as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Substitutes a single variable.
    pub fn substitute(&self, var: usize, image: &Poly) -> Poly {
        let images: Vec<Poly> = (0..self.nvars)
            .map(|k| if k == var { image.clone() } else { Poly::var(self.nvars, k) })
            .collect();
        self.compose(&images)
    }

    /// Leading exponent in lex order with `u > v > z1 > ...`.
    pub fn leading_exponent(&self) -> Option<&Exponent> {
        self.terms.keys().next_back()
    }

    /// Multivariate division by a single polynomial in lex order. The
    /// remainder is zero exactly when `divisor` divides `self`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), AlgebraError> {
        self.check_ctx(divisor)?;
        let lead = divisor.leading_exponent().ok_or(AlgebraError::DivisionByZero)?.clone();
        let lead_inv = divisor.terms[&lead].inv().expect("leading coefficient is nonzero");
        let mut quot = Poly::zero(self.nvars);
        let mut rem = Poly::zero(self.nvars);
        let mut p = self.clone();
        while let Some(e) = p.leading_exponent().cloned() {
            let c = p.terms[&e].clone();
            if e.iter().zip(&lead).all(|(a, b)| a >= b) {
                let shift: Exponent = e.iter().zip(&lead).map(|(a, b)| a - b).collect();
                let qc = &c * &lead_inv;
                quot.add_term(shift.clone(), &qc);
                p = &p - &divisor.mul_monomial(&shift).scale(&qc);
            } else {
                rem.add_term(e.clone(), &c);
                p.terms.remove(&e);
            }
        }
        Ok((quot, rem))
    }

    /// Evaluates the terms with a homomorphism into any ring-like target.
    pub fn map_coefficients<F>(&self, mut f: F) -> Poly
    where
        F: FnMut(&GaussianRational) -> GaussianRational,
    {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Terms in printing order: descending total degree, then descending lex.
    fn display_order(&self) -> Vec<(&Exponent, &GaussianRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        v
    }
}

pub(crate) fn monomial_string(e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| {
            if k == 1 {
                var_name(i)
            } else {
                format!("{}^{}", var_name(i), k)
            }
        })
        .collect();
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.display_order().into_iter().enumerate() {
            let mono = monomial_string(e);
            // split off a leading sign for real or purely imaginary coefficients
            let negative = (c.im.is_zero() && c.re < num::BigRational::zero())
                || (c.re.is_zero() && c.im < num::BigRational::zero());
            let mag = if negative { -c } else { c.clone() };
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self)
    }
}

impl<'a, 'b> Add<&'b Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'b Poly) -> Poly {
        self.try_add(rhs).expect("polynomial context mismatch")
    }
}

impl<'a, 'b> Sub<&'b Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'b Poly) -> Poly {
        self.try_sub(rhs).expect("polynomial context mismatch")
    }
}

impl<'a, 'b> Mul<&'b Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'b Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial context mismatch")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl<'a> Neg for &'a Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// All exponent vectors over the given variables with total degree `<= max_degree`,
/// ordered by degree and then lexicographically (earlier variables first).
pub fn monomials_up_to(nvars: usize, vars: &[usize], max_degree: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut cur = vec![0u32; nvars];
        fill_degree(vars, 0, d, &mut cur, &mut out);
    }
    out
}

fn fill_degree(vars: &[usize], pos: usize, remaining: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
    if pos + 1 == vars.len() {
        cur[vars[pos]] = remaining;
        out.push(cur.clone());
        cur[vars[pos]] = 0;
        return;
    }
    if vars.is_empty() {
        if remaining == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for k in (0..=remaining).rev() {
        cur[vars[pos]] = k;
        fill_degree(vars, pos + 1, remaining - k, cur, out);
    }
    cur[vars[pos]] = 0;
}
