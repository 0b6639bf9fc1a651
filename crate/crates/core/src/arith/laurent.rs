use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::number::GaussianRational;
use super::registry::VarRegistry;
use crate::error::{Error, Result};

/// Dense integer exponent vector indexed by registry position.
///
/// Ordering is lexicographic in registry order, which fixes the printing
/// order of polynomial terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn unit(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    pub fn var(len: usize, idx: usize) -> Self {
        let mut e = vec![0; len];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exponents: Vec<i32>) -> Self {
        Monomial(exponents)
    }

    pub fn from_sparse(len: usize, powers: &[(usize, i32)]) -> Self {
        let mut e = vec![0; len];
        for &(idx, p) in powers {
            e[idx] += p;
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn exponent(&self, idx: usize) -> i32 {
        self.0[idx]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn inv(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    pub fn pow(&self, e: i32) -> Monomial {
        Monomial(self.0.iter().map(|x| x * e).collect())
    }

    /// Integer-weighted degree `Σ e_r · weight_r`.
    pub fn weighted_degree(&self, weights: &[i64]) -> i64 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as i64 * w).sum()
    }

    pub fn with_exponent(&self, idx: usize, e: i32) -> Monomial {
        let mut m = self.clone();
        m.0[idx] = e;
        m
    }
}

/// Laurent polynomial with Gaussian-rational coefficients over a variable
/// registry. Zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct LaurentPoly {
    registry: Arc<VarRegistry>,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        same_registry(&self.registry, &other.registry) && self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

fn same_registry(a: &Arc<VarRegistry>, b: &Arc<VarRegistry>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl LaurentPoly {
    pub fn zero(registry: &Arc<VarRegistry>) -> Self {
        Self { registry: registry.clone(), terms: BTreeMap::new() }
    }

    pub fn one(registry: &Arc<VarRegistry>) -> Self {
        Self::constant(registry, GaussianRational::one())
    }

    pub fn constant(registry: &Arc<VarRegistry>, c: GaussianRational) -> Self {
        Self::monomial(registry, Monomial::unit(registry.len()), c)
    }

    pub fn var(registry: &Arc<VarRegistry>, idx: usize) -> Self {
        Self::monomial(registry, Monomial::var(registry.len(), idx), GaussianRational::one())
    }

    pub fn monomial(registry: &Arc<VarRegistry>, mono: Monomial, c: GaussianRational) -> Self {
        assert_eq!(mono.len(), registry.len(), "monomial length must match the registry");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Self { registry: registry.clone(), terms }
    }

    /// `c · Π x_idx^p` from sparse `(idx, p)` powers.
    pub fn term(registry: &Arc<VarRegistry>, powers: &[(usize, i32)], c: GaussianRational) -> Self {
        Self::monomial(registry, Monomial::from_sparse(registry.len(), powers), c)
    }

    pub fn from_terms<I>(registry: &Arc<VarRegistry>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        let mut p = Self::zero(registry);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, mono: &Monomial) -> GaussianRational {
        self.terms.get(mono).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// The single term of a monomial polynomial.
    pub fn as_monomial(&self) -> Option<(&Monomial, &GaussianRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, mono: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &LaurentPoly) -> Result<()> {
        if same_registry(&self.registry, &other.registry) {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check(other)?;
        let mut out = LaurentPoly::zero(&self.registry);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(&self.registry);
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        LaurentPoly { registry: self.registry.clone(), terms }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> LaurentPoly {
        let terms = self.terms.iter().map(|(m, a)| (m.mul(mono), a.clone())).collect();
        LaurentPoly { registry: self.registry.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one(&self.registry);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Complex conjugation: conjugates every coefficient and swaps the
    /// exponents of each complex variable with its conjugate partner.
    pub fn conjugate(&self) -> LaurentPoly {
        let reg = &self.registry;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e: Vec<i32> = (0..reg.len()).map(|i| m.exponent(reg.conjugate_index(i))).collect();
                (Monomial(e), c.conj())
            })
            .collect();
        LaurentPoly { registry: reg.clone(), terms }
    }

    /// Replaces `x_var` by `coeff · mono` everywhere, negative powers included.
    pub fn substitute(&self, var: usize, mono: &Monomial, coeff: &GaussianRational) -> Result<LaurentPoly> {
        if coeff.is_zero() {
            return Err(Error::ZeroCoefficient);
        }
        if mono.len() != self.registry.len() {
            return Err(Error::DimensionMismatch { expected: self.registry.len(), found: mono.len() });
        }
        if mono.exponent(var) != 0 {
            return Err(Error::CircularSubstitution(self.registry.name(var).to_string()));
        }
        let mut out = LaurentPoly::zero(&self.registry);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            let factor = coeff.powi(e).expect("nonzero coefficient is invertible");
            let base = m.with_exponent(var, 0);
            out.add_term(base.mul(&mono.pow(e)), &(c * &factor));
        }
        Ok(out)
    }

    /// Partial derivative with respect to the variable at `var`.
    pub fn derivative(&self, var: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(&self.registry);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e != 0 {
                let m2 = m.with_exponent(var, e - 1);
                out.add_term(m2, &(c * &GaussianRational::from_int(e as i64)));
            }
        }
        out
    }

    /// Largest variable index with a nonzero exponent anywhere in the support.
    pub fn variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.registry.len()];
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e != 0 {
                    used[i] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    /// Evaluates at a point given as one complex value per registry variable.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.registry.len() {
            return Err(Error::DimensionMismatch { expected: self.registry.len(), found: point.len() });
        }
        if let Some(idx) = point.iter().position(|v| *v == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroValue(self.registry.name(idx).to_string()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = c.to_complex64();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e != 0 {
                    v *= x.powi(e);
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Evaluates at a point given by name; every variable must be assigned.
    pub fn eval_named(&self, point: &std::collections::HashMap<String, Complex64>) -> Result<Complex64> {
        let values = self
            .registry
            .vars()
            .iter()
            .map(|v| point.get(&v.name).copied().ok_or_else(|| Error::UnknownVariable(v.name.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.eval(&values)
    }

    /// Evaluates `Σ c · exp(⟨I, logs⟩)` from logarithms of the variables,
    /// which stays finite where the plain values would overflow.
    pub fn eval_log(&self, logs: &[Complex64]) -> Complex64 {
        assert_eq!(logs.len(), self.registry.len());
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut exponent = Complex64::new(0.0, 0.0);
            for (l, &e) in logs.iter().zip(m.exponents()) {
                if e != 0 {
                    exponent += l * e as f64;
                }
            }
            acc += c.to_complex64() * exponent.exp();
        }
        acc
    }

    /// Moves the polynomial to another registry; `map[i]` is the new index of
    /// old variable `i`. Variables absent from the support may map anywhere.
    pub fn reembed(&self, registry: &Arc<VarRegistry>, map: &[Option<usize>]) -> Result<LaurentPoly> {
        let mut out = LaurentPoly::zero(registry);
        for (m, c) in &self.terms {
            let mut e = vec![0; registry.len()];
            for (i, &x) in m.exponents().iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let j = map
                    .get(i)
                    .copied()
                    .flatten()
                    .ok_or_else(|| Error::UnknownVariable(self.registry.name(i).to_string()))?;
                e[j] += x;
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Determinant of a square matrix of polynomials by cofactor expansion.
    pub fn determinant(registry: &Arc<VarRegistry>, matrix: &[Vec<LaurentPoly>]) -> LaurentPoly {
        let n = matrix.len();
        if n == 0 {
            return LaurentPoly::one(registry);
        }
        let cols: Vec<usize> = (0..n).collect();
        det_rec(registry, matrix, 0, &cols)
    }
}

fn det_rec(registry: &Arc<VarRegistry>, m: &[Vec<LaurentPoly>], row: usize, cols: &[usize]) -> LaurentPoly {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = LaurentPoly::zero(registry);
    for (pos, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_rec(registry, m, row + 1, &rest);
        let term = &m[row][c] * &minor;
        acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    /// Panics on registry mismatch; use [`LaurentPoly::try_add`] to handle it.
    fn add(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("registry mismatch")
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("registry mismatch")
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &'a LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("registry mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&GaussianRational::from_int(-1))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| {
                    let name = self.registry.name(i);
                    if e == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{c}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
