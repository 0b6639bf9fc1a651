use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::simplex::{LinearProgram, LpOutcome, Relation};
use crate::arith::{format_rational, int, Rational};
use crate::error::{Error, Result};

/// Open homogeneous cone `{η : ⟨n, η⟩ > 0 for every normal n}`.
///
/// Normals are primitive integer vectors kept in sorted order. A zero normal
/// is an outright contradiction and is stored as the pair `e₁, −e₁`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrictCone {
    dim: usize,
    normals: BTreeSet<Vec<i64>>,
}

/// Divides by the gcd of the entries, keeping the orientation.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

fn dot(n: &[i64], eta: &[Rational]) -> Rational {
    n.iter().zip(eta).filter(|(a, _)| **a != 0).map(|(&a, x)| x * int(a)).sum()
}

fn to_rationals(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

impl StrictCone {
    /// The whole space.
    pub fn full(dim: usize) -> Self {
        Self { dim, normals: BTreeSet::new() }
    }

    pub fn from_normals<I>(dim: usize, normals: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<i64>>,
    {
        let mut c = Self::full(dim);
        for n in normals {
            c.add_normal(&n)?;
        }
        Ok(c)
    }

    pub fn add_normal(&mut self, n: &[i64]) -> Result<()> {
        if n.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: n.len() });
        }
        if n.iter().all(|&x| x == 0) {
            if self.dim == 0 {
                return Err(Error::InvalidArgument("zero normal in a zero-dimensional cone".into()));
            }
            let mut e = vec![0; self.dim];
            e[0] = 1;
            self.normals.insert(e.clone());
            e[0] = -1;
            self.normals.insert(e);
        } else {
            self.normals.insert(primitive(n));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.normals.iter()
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn contains_normal(&self, n: &[i64]) -> bool {
        self.normals.contains(&primitive(n))
    }

    pub fn intersect(&self, other: &StrictCone) -> Result<StrictCone> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = self.clone();
        out.normals.extend(other.normals.iter().cloned());
        Ok(out)
    }

    /// Smallest value of `⟨n, η⟩` over the normals; `None` for the full space.
    pub fn min_slack(&self, eta: &[Rational]) -> Option<Rational> {
        self.normals.iter().map(|n| dot(n, eta)).min()
    }

    /// Errors with the first normal whose slack at `eta` is below `bound`.
    pub fn check_slack(&self, eta: &[Rational], bound: &Rational) -> Result<()> {
        if eta.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: eta.len() });
        }
        for n in &self.normals {
            let s = dot(n, eta);
            if &s < bound {
                return Err(Error::OutsideCone { normal: n.clone(), slack: format_rational(&s) });
            }
        }
        Ok(())
    }

    pub fn contains(&self, eta: &[Rational]) -> bool {
        eta.len() == self.dim && self.normals.iter().all(|n| dot(n, eta).is_positive())
    }

    /// Maximizes `s` under `⟨n, η⟩ ≥ s`, `|η_j| ≤ 1`, `s ≤ 1`. The origin is
    /// feasible, and `s* > 0` exactly when the open cone is nonempty.
    fn max_slack(&self) -> (Vec<Rational>, Rational) {
        let d = self.dim;
        let mut lp = LinearProgram::new(d + 1);
        for j in 0..=d {
            lp.set_free(j);
        }
        let mut obj = vec![Rational::zero(); d + 1];
        obj[d] = Rational::one();
        lp.set_objective(obj);
        for n in &self.normals {
            let mut row = to_rationals(n);
            row.push(-Rational::one());
            lp.add_row(row, Relation::Ge, Rational::zero());
        }
        for j in 0..d {
            let mut row = vec![Rational::zero(); d + 1];
            row[j] = Rational::one();
            lp.add_row(row.clone(), Relation::Le, Rational::one());
            lp.add_row(row, Relation::Ge, -Rational::one());
        }
        let mut row = vec![Rational::zero(); d + 1];
        row[d] = Rational::one();
        lp.add_row(row, Relation::Le, Rational::one());
        match lp.solve() {
            LpOutcome::Optimal { mut x, value } => {
                x.truncate(d);
                (x, value)
            }
            other => unreachable!("bounded LP with a feasible origin returned {other:?}"),
        }
    }

    pub fn is_empty_cone(&self) -> bool {
        if self.normals.is_empty() {
            return false;
        }
        !self.max_slack().1.is_positive()
    }

    /// A rational point with `⟨n, η⟩ ≥ 1` for every normal.
    pub fn interior_sample(&self) -> Result<Vec<Rational>> {
        if self.normals.is_empty() {
            return Ok(vec![Rational::zero(); self.dim]);
        }
        let (eta, s) = self.max_slack();
        if !s.is_positive() {
            return Err(Error::EmptyCone);
        }
        Ok(eta.into_iter().map(|x| x / &s).collect())
    }

    /// Whether `⟨m, η⟩ > 0` on the whole cone.
    ///
    /// Decided on the Farkas side: `{Aη ≥ 1, ⟨m, η⟩ ≤ 0}` is infeasible iff
    /// some `y ≥ 0, μ ≥ 0` has `Aᵀy = μm` and `Σy = 1`.
    pub fn implies(&self, m: &[i64]) -> Result<bool> {
        if m.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.len() });
        }
        if self.normals.contains(&primitive(m)) {
            return Ok(true);
        }
        let k = self.normals.len();
        if k == 0 {
            return Ok(false);
        }
        let normals: Vec<&Vec<i64>> = self.normals.iter().collect();
        let mut lp = LinearProgram::new(k + 1);
        for j in 0..self.dim {
            let mut row: Vec<Rational> = normals.iter().map(|n| int(n[j])).collect();
            row.push(int(-m[j]));
            lp.add_row(row, Relation::Eq, Rational::zero());
        }
        let mut row = vec![Rational::one(); k];
        row.push(Rational::zero());
        lp.add_row(row, Relation::Eq, Rational::one());
        Ok(lp.solve().is_feasible())
    }

    /// `implies` by the direct primal system; kept as an independent check.
    pub fn implies_primal(&self, m: &[i64]) -> Result<bool> {
        if m.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.len() });
        }
        let mut lp = LinearProgram::new(self.dim);
        for j in 0..self.dim {
            lp.set_free(j);
        }
        for n in &self.normals {
            lp.add_row(to_rationals(n), Relation::Ge, Rational::one());
        }
        lp.add_row(to_rationals(m), Relation::Le, Rational::zero());
        Ok(!lp.solve().is_feasible())
    }

    /// Set equality of two nonempty cones.
    pub fn equals(&self, other: &StrictCone) -> Result<bool> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.is_empty_cone() || other.is_empty_cone() {
            return Err(Error::EmptyCone);
        }
        for n in &other.normals {
            if !self.implies(n)? {
                return Ok(false);
            }
        }
        for n in &self.normals {
            if !other.implies(n)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First normal of `other` not implied by `self`, if any.
    pub fn first_unimplied(&self, other: &StrictCone) -> Result<Option<Vec<i64>>> {
        for n in &other.normals {
            if !self.implies(n)? {
                return Ok(Some(n.clone()));
            }
        }
        Ok(None)
    }

    /// Drops normals implied by the remaining ones until none is.
    pub fn remove_redundant(&self) -> Result<StrictCone> {
        if self.is_empty_cone() {
            return Err(Error::EmptyCone);
        }
        let mut kept = self.clone();
        for n in &self.normals {
            let mut rest = kept.clone();
            rest.normals.remove(n);
            if rest.implies(n)? {
                kept = rest;
            }
        }
        Ok(kept)
    }

    /// Human-readable inequalities over named coordinates.
    pub fn describe(&self, names: &[String]) -> Vec<String> {
        self.normals.iter().map(|n| format_inequality(n, names)).collect()
    }
}

pub fn format_inequality(n: &[i64], names: &[String]) -> String {
    let mut s = String::new();
    for (c, name) in n.iter().zip(names) {
        if *c == 0 {
            continue;
        }
        let sign = if *c < 0 { "-" } else { "+" };
        if s.is_empty() {
            if *c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        if c.abs() != 1 {
            s.push_str(&format!("{}*", c.abs()));
        }
        s.push_str(name);
    }
    if s.is_empty() {
        s.push('0');
    }
    s.push_str(" > 0");
    s
}

impl fmt::Display for StrictCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.dim).map(|i| format!("e{i}")).collect();
        write!(f, "{{{}}}", self.describe(&names).join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(dim: usize, ns: &[&[i64]]) -> StrictCone {
        StrictCone::from_normals(dim, ns.iter().map(|n| n.to_vec())).unwrap()
    }

    #[test]
    fn primitivization_keeps_orientation() {
        assert_eq!(primitive(&[-4, 6]), vec![-2, 3]);
        assert_eq!(primitive(&[0, -3]), vec![0, -1]);
        assert_eq!(cone(1, &[&[2]]), cone(1, &[&[1]]));
    }

    #[test]
    fn intersection_with_full_space() {
        let c = cone(2, &[&[-1, 1], &[1, 0]]);
        assert_eq!(c.intersect(&StrictCone::full(2)).unwrap(), c);
        assert!(c.intersect(&StrictCone::full(3)).is_err());
    }

    #[test]
    fn emptiness() {
        assert!(!StrictCone::full(3).is_empty_cone());
        assert!(cone(2, &[&[0, -1], &[0, 1]]).is_empty_cone());
        assert!(!cone(2, &[&[-1, 1], &[1, 0]]).is_empty_cone());
        assert!(cone(2, &[&[0, 0]]).is_empty_cone());
    }

    #[test]
    fn sample_satisfies_unit_slack() {
        let c = cone(2, &[&[-1, 1], &[1, 0]]);
        let eta = c.interior_sample().unwrap();
        c.check_slack(&eta, &Rational::one()).unwrap();
        assert_eq!(StrictCone::full(2).interior_sample().unwrap(), vec![Rational::zero(); 2]);
        assert_eq!(cone(1, &[&[1], &[-1]]).interior_sample(), Err(Error::EmptyCone));
    }

    #[test]
    fn implication() {
        let c = cone(2, &[&[1, 0], &[-1, 1]]);
        assert!(c.implies(&[1, 0]).unwrap());
        assert!(c.implies(&[0, 1]).unwrap());
        assert!(!c.implies(&[0, -1]).unwrap());
        assert!(!c.implies(&[1, -1]).unwrap());
        for m in [[1, 0], [0, 1], [0, -1], [1, -1], [2, 1]] {
            assert_eq!(c.implies(&m).unwrap(), c.implies_primal(&m).unwrap());
        }
    }

    #[test]
    fn equality_and_redundancy() {
        let a = cone(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        let b = cone(2, &[&[1, 0], &[0, 1]]);
        assert!(a.equals(&b).unwrap());
        assert_eq!(a.remove_redundant().unwrap(), b);
        assert_eq!(b.remove_redundant().unwrap(), b);
        assert!(!b.equals(&cone(2, &[&[1, 0]])).unwrap());
        let empty = cone(1, &[&[1], &[-1]]);
        assert_eq!(empty.equals(&StrictCone::full(1)), Err(Error::EmptyCone));
        assert_eq!(empty.remove_redundant(), Err(Error::EmptyCone));
    }

    #[test]
    fn inequality_text() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(format_inequality(&[-1, 2], &names), "-a + 2*b > 0");
    }
}
