//! Bracket tables over a variable registry.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::arith::{GaussianRational, LaurentPoly, Monomial, VarKind, VarRegistry};
use crate::error::{Error, Result};

/// Antisymmetric bracket `{u, v}` between registry variables.
///
/// Only pairs `u < v` are stored; the opposite orientation is served as the
/// negation and the diagonal is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonStructure {
    registry: Arc<VarRegistry>,
    table: BTreeMap<(usize, usize), LaurentPoly>,
}

impl PoissonStructure {
    pub fn new(registry: Arc<VarRegistry>) -> Self {
        Self { registry, table: BTreeMap::new() }
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.registry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registry.is_empty()
    }

    /// Sets `{u, v} = p`, storing it in canonical orientation.
    pub fn set(&mut self, u: usize, v: usize, p: LaurentPoly) -> Result<()> {
        if u == v {
            return if p.is_zero() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{{{0}, {0}}} must vanish", self.registry.name(u))))
            };
        }
        if u >= self.registry.len() || v >= self.registry.len() {
            return Err(Error::InvalidArgument("generator index out of range".into()));
        }
        if !Arc::ptr_eq(p.registry(), &self.registry) && **p.registry() != *self.registry {
            return Err(Error::RegistryMismatch);
        }
        let (key, p) = if u < v { ((u, v), p) } else { ((v, u), -&p) };
        if p.is_zero() {
            self.table.remove(&key);
        } else {
            self.table.insert(key, p);
        }
        Ok(())
    }

    pub fn set_by_name(&mut self, u: &str, v: &str, p: LaurentPoly) -> Result<()> {
        let (u, v) = (self.registry.require(u)?, self.registry.require(v)?);
        self.set(u, v, p)
    }

    /// `{u, v}` in the requested orientation.
    pub fn bracket(&self, u: usize, v: usize) -> LaurentPoly {
        if u < v {
            self.table.get(&(u, v)).cloned().unwrap_or_else(|| LaurentPoly::zero(&self.registry))
        } else if u > v {
            self.table.get(&(v, u)).map(|p| -p).unwrap_or_else(|| LaurentPoly::zero(&self.registry))
        } else {
            LaurentPoly::zero(&self.registry)
        }
    }

    /// Nonzero entries with `u < v`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &LaurentPoly)> {
        self.table.iter().map(|(&k, p)| (k, p))
    }

    /// `{u, p}` for a Laurent polynomial `p`, by the Leibniz rule.
    pub fn bracket_with(&self, u: usize, p: &LaurentPoly) -> LaurentPoly {
        let mut acc = LaurentPoly::zero(&self.registry);
        for j in p.variables() {
            let buj = self.bracket(u, j);
            if buj.is_zero() {
                continue;
            }
            acc = &acc + &(&p.derivative(j) * &buj);
        }
        acc
    }

    /// `{f, g}` for arbitrary Laurent polynomials, by the Leibniz rule in both
    /// arguments.
    pub fn bracket_polys(&self, f: &LaurentPoly, g: &LaurentPoly) -> LaurentPoly {
        let mut acc = LaurentPoly::zero(&self.registry);
        let gvars = g.variables();
        for i in f.variables() {
            let df = f.derivative(i);
            for &j in &gvars {
                let bij = self.bracket(i, j);
                if bij.is_zero() {
                    continue;
                }
                acc = &acc + &(&(&df * &g.derivative(j)) * &bij);
            }
        }
        acc
    }

    /// `{u,{v,w}} + {v,{w,u}} + {w,{u,v}}`.
    pub fn jacobiator(&self, u: usize, v: usize, w: usize) -> LaurentPoly {
        let a = self.bracket_with(u, &self.bracket(v, w));
        let b = self.bracket_with(v, &self.bracket(w, u));
        let c = self.bracket_with(w, &self.bracket(u, v));
        &(&a + &b) + &c
    }

    /// Every generator triple `u < v < w` with a nonzero jacobiator.
    pub fn jacobi_failures(&self) -> Vec<(usize, usize, usize)> {
        let n = self.registry.len();
        let mut bad = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                for w in v + 1..n {
                    if !self.jacobiator(u, v, w).is_zero() {
                        bad.push((u, v, w));
                    }
                }
            }
        }
        bad
    }

    /// Coefficient of the monomial `u·v` in `{u, v}` together with the rest.
    pub fn split_log_canonical(&self) -> LogCanonicalPart {
        let mut pi = BTreeMap::new();
        let mut remainder = BTreeMap::new();
        for (&(u, v), p) in &self.table {
            let uv = product_monomial(&self.registry, u, v);
            let c = p.coeff(&uv);
            let mut rest = p.clone();
            rest.add_term(uv, &-&c);
            if !c.is_zero() {
                pi.insert((u, v), c);
            }
            if !rest.is_zero() {
                remainder.insert((u, v), rest);
            }
        }
        LogCanonicalPart { registry: self.registry.clone(), pi, remainder }
    }

    /// Checks the bivector reality rule `{ū, v̄} = conj{u, v}` on every pair
    /// and the reality conditions on the log-canonical coefficients.
    pub fn check_reality(&self) -> RealityReport {
        let reg = &self.registry;
        let n = reg.len();
        let mut failures = Vec::new();
        let names = |u: usize, v: usize| (reg.name(u).to_string(), reg.name(v).to_string());
        for u in 0..n {
            for v in u + 1..n {
                let lhs = self.bracket(reg.conjugate_index(u), reg.conjugate_index(v));
                let rhs = self.bracket(u, v).conjugate();
                if lhs != rhs {
                    failures.push(RealityFailure {
                        condition: RealityCondition::Bivector,
                        pair: names(u, v),
                        detail: format!("{{conj u, conj v}} = {lhs}, conj{{u, v}} = {rhs}"),
                    });
                }
            }
        }
        let lc = self.split_log_canonical();
        for (&(u, v), c) in &lc.pi {
            let condition = RealityCondition::for_pair(reg.kind(u), reg.kind(v));
            let ok = match condition {
                RealityCondition::RealReal => c.is_zero(),
                _ => c.re.is_zero(),
            };
            if !ok {
                failures.push(RealityFailure {
                    condition,
                    pair: names(u, v),
                    detail: format!("log-canonical coefficient {c}"),
                });
            }
        }
        RealityReport { failures }
    }

    /// Errors with the first reality violation, if any.
    pub fn require_real(&self) -> Result<()> {
        match self.check_reality().failures.first() {
            None => Ok(()),
            Some(f) => Err(Error::Reality(f.to_string())),
        }
    }
}

fn product_monomial(reg: &VarRegistry, u: usize, v: usize) -> Monomial {
    Monomial::from_sparse(reg.len(), &[(u, 1), (v, 1)])
}

/// `{u, v} = π_{u,v}·uv + p_{u,v}` with `p_{u,v}` free of the monomial `uv`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCanonicalPart {
    registry: Arc<VarRegistry>,
    pi: BTreeMap<(usize, usize), GaussianRational>,
    remainder: BTreeMap<(usize, usize), LaurentPoly>,
}

impl LogCanonicalPart {
    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    /// `π_{u,v}`, antisymmetric in the arguments.
    pub fn pi(&self, u: usize, v: usize) -> GaussianRational {
        if u < v {
            self.pi.get(&(u, v)).cloned().unwrap_or_else(GaussianRational::zero)
        } else if u > v {
            -self.pi.get(&(v, u)).cloned().unwrap_or_else(GaussianRational::zero)
        } else {
            GaussianRational::zero()
        }
    }

    /// `p_{u,v}`, antisymmetric in the arguments.
    pub fn remainder(&self, u: usize, v: usize) -> LaurentPoly {
        let zero = || LaurentPoly::zero(&self.registry);
        if u < v {
            self.remainder.get(&(u, v)).cloned().unwrap_or_else(zero)
        } else if u > v {
            self.remainder.get(&(v, u)).map(|p| -p).unwrap_or_else(zero)
        } else {
            zero()
        }
    }

    /// Nonzero coefficients with `u < v`.
    pub fn pi_entries(&self) -> impl Iterator<Item = ((usize, usize), &GaussianRational)> {
        self.pi.iter().map(|(&k, c)| (k, c))
    }

    /// Nonzero remainders with `u < v`.
    pub fn remainder_entries(&self) -> impl Iterator<Item = ((usize, usize), &LaurentPoly)> {
        self.remainder.iter().map(|(&k, p)| (k, p))
    }

    /// Rebuilds the full bracket `π·uv + p`.
    pub fn recombine(&self) -> PoissonStructure {
        let mut out = PoissonStructure::new(self.registry.clone());
        let mut keys: Vec<(usize, usize)> = self.pi.keys().chain(self.remainder.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        for (u, v) in keys {
            let mut p = self.remainder(u, v);
            p.add_term(product_monomial(&self.registry, u, v), &self.pi(u, v));
            out.set(u, v, p).expect("indices come from a valid table");
        }
        out
    }

    /// The purely log-canonical structure `{u, v} = π_{u,v}·uv`.
    pub fn log_canonical(&self) -> PoissonStructure {
        let mut out = PoissonStructure::new(self.registry.clone());
        for (&(u, v), c) in &self.pi {
            let p = LaurentPoly::monomial(&self.registry, product_monomial(&self.registry, u, v), c.clone());
            out.set(u, v, p).expect("indices come from a valid table");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealityCondition {
    Bivector,
    RealReal,
    RealComplex,
    ComplexComplex,
    ComplexConjugate,
}

impl RealityCondition {
    fn for_pair(a: VarKind, b: VarKind) -> Self {
        use VarKind::*;
        match (a, b) {
            (RealPositive, RealPositive) => RealityCondition::RealReal,
            (RealPositive, _) | (_, RealPositive) => RealityCondition::RealComplex,
            (Complex, Complex) | (ConjugateOf(_), ConjugateOf(_)) => RealityCondition::ComplexComplex,
            _ => RealityCondition::ComplexConjugate,
        }
    }
}

impl fmt::Display for RealityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RealityCondition::Bivector => "bivector reality",
            RealityCondition::RealReal => "real-real coefficient must vanish",
            RealityCondition::RealComplex => "real-complex coefficient must be imaginary",
            RealityCondition::ComplexComplex => "complex-complex coefficient must be imaginary",
            RealityCondition::ComplexConjugate => "complex-conjugate coefficient must be imaginary",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealityFailure {
    pub condition: RealityCondition,
    pub pair: (String, String),
    pub detail: String,
}

impl fmt::Display for RealityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on ({}, {}): {}", self.condition, self.pair.0, self.pair.1, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealityReport {
    pub failures: Vec<RealityFailure>,
}

impl RealityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, condition: RealityCondition) -> bool {
        self.failures.iter().any(|f| f.condition == condition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, GaussianRational as G};

    fn abc() -> PoissonStructure {
        let reg = Arc::new(VarRegistry::real(&["x1", "x2"]).unwrap());
        let mut p = PoissonStructure::new(reg.clone());
        let rhs = LaurentPoly::from_terms(
            &reg,
            [
                (Monomial::from_sparse(2, &[(0, 1), (1, 1)]), G::from_int(1)),
                (Monomial::from_sparse(2, &[(0, 2)]), G::from_int(1)),
                (Monomial::from_sparse(2, &[(1, 1)]), G::from_int(1)),
            ],
        );
        p.set(0, 1, rhs).unwrap();
        p
    }

    pub(crate) fn complex_example() -> PoissonStructure {
        let reg = Arc::new(VarRegistry::with_conjugates(&[("x", false), ("z", true)]).unwrap());
        let mut p = PoissonStructure::new(reg.clone());
        p.set(0, 1, LaurentPoly::term(&reg, &[(0, 1), (1, 1)], G::i())).unwrap();
        p.set(0, 2, LaurentPoly::term(&reg, &[(0, 1), (2, 1)], -G::i())).unwrap();
        let zz = &LaurentPoly::term(&reg, &[(0, 2)], G::i()) - &LaurentPoly::term(&reg, &[(0, -2)], G::i());
        p.set(1, 2, zz).unwrap();
        p
    }

    #[test]
    fn antisymmetry_is_structural() {
        let p = abc();
        assert_eq!(p.bracket(1, 0), -&p.bracket(0, 1));
        assert!(p.bracket(0, 0).is_zero());
    }

    #[test]
    fn split_of_two_variable_example() {
        let p = abc();
        let lc = p.split_log_canonical();
        assert_eq!(lc.pi(0, 1), G::from_int(1));
        let reg = p.registry().clone();
        let rest = &LaurentPoly::term(&reg, &[(0, 2)], G::from_int(1)) + &LaurentPoly::var(&reg, 1);
        assert_eq!(lc.remainder(0, 1), rest);
        assert_eq!(lc.recombine(), p);
    }

    #[test]
    fn split_of_complex_example() {
        let p = complex_example();
        let lc = p.split_log_canonical();
        assert_eq!(lc.pi(0, 1), G::i());
        assert!(lc.remainder(0, 1).is_zero());
        assert!(lc.pi(1, 2).is_zero());
        assert_eq!(lc.remainder(1, 2), p.bracket(1, 2));
    }

    #[test]
    fn reality_of_complex_example() {
        let report = complex_example().check_reality();
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn real_log_canonical_pair_violates_reality() {
        let reg = Arc::new(VarRegistry::real(&["x1", "x2"]).unwrap());
        let mut p = PoissonStructure::new(reg.clone());
        p.set(0, 1, LaurentPoly::term(&reg, &[(0, 1), (1, 1)], G::from_int(1))).unwrap();
        let report = p.check_reality();
        assert!(report.failed(RealityCondition::RealReal));
        assert!(!report.failed(RealityCondition::Bivector));
    }

    #[test]
    fn broken_conjugate_entry_violates_bivector_reality() {
        let mut p = complex_example();
        let reg = p.registry().clone();
        p.set(0, 2, LaurentPoly::term(&reg, &[(0, 1), (2, 1)], G::i())).unwrap();
        assert!(p.check_reality().failed(RealityCondition::Bivector));
    }

    #[test]
    fn jacobiator_of_constant_log_canonical_structure() {
        let reg = Arc::new(VarRegistry::real(&["a", "b", "c"]).unwrap());
        let mut p = PoissonStructure::new(reg.clone());
        p.set(0, 1, LaurentPoly::term(&reg, &[(0, 1), (1, 1)], G::real(int(3)))).unwrap();
        p.set(1, 2, LaurentPoly::term(&reg, &[(1, 1), (2, 1)], G::from_int(-2))).unwrap();
        p.set(0, 2, LaurentPoly::term(&reg, &[(0, 1), (2, 1)], G::from_int(5))).unwrap();
        assert!(p.jacobiator(0, 1, 2).is_zero());
    }

    #[test]
    fn jacobiator_with_casimir_third_variable() {
        let two = abc();
        let reg = Arc::new(VarRegistry::real(&["x1", "x2", "c"]).unwrap());
        let mut p = PoissonStructure::new(reg.clone());
        let map = [Some(0), Some(1)];
        p.set(0, 1, two.bracket(0, 1).reembed(&reg, &map).unwrap()).unwrap();
        assert!(p.jacobiator(0, 1, 2).is_zero());
    }

    #[test]
    fn jacobiator_detects_a_non_poisson_bivector() {
        let reg = Arc::new(VarRegistry::real(&["a", "b", "c"]).unwrap());
        let mut p = PoissonStructure::new(reg.clone());
        p.set(0, 1, LaurentPoly::term(&reg, &[(0, 1), (2, 1)], G::from_int(1))).unwrap();
        p.set(1, 2, LaurentPoly::var(&reg, 1)).unwrap();
        assert!(!p.jacobiator(0, 1, 2).is_zero());
    }
}
