//! The brackets of `B₊`, `G₀*` and `G*` on solid minors, and the end-to-end
//! comparison of the tropicalized `G*` with the Gelfand-Zeitlin system.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::matrix::{self, RatMatrix};
use crate::arith::{format_rational, rat, GaussianRational, LaurentPoly, Monomial, Rational, VarKind, VarRegistry};
use crate::error::{Error, Result};
use crate::gz::gz_cone;
use crate::networks::{grading, DeltaChart};
use crate::poisson::PoissonStructure;
use crate::polyhedra::StrictCone;
use crate::rmatrix::{
    bracket_commutator, bracket_sandwich, delta_coefficient, epsilon, mixed_r0_coefficient, solid_labels,
    MatrixTag, MinorExpression, MinorSymbol,
};
use crate::tropical::{check_liouville_structure, constant_bracket, tropical_cone, ConstantBracket, TropicalCoordinates};

/// Variable name of `Δ^(k)_l`.
pub fn delta_name(k: usize, l: usize) -> String {
    format!("D{k}_{l}")
}

/// Parses `Dk_l` or its conjugate `~Dk_l`.
pub fn delta_label(name: &str) -> Option<(usize, usize)> {
    let s = name.strip_prefix('~').unwrap_or(name);
    let (k, l) = s.strip_prefix('D')?.split_once('_')?;
    let (k, l): (usize, usize) = (k.parse().ok()?, l.parse().ok()?);
    (l >= 1 && l <= k).then_some((k, l))
}

/// All solid minors as positive real variables, in `(k, l)` order.
pub fn delta_registry(n: usize) -> VarRegistry {
    let names: Vec<String> = solid_labels(n).into_iter().map(|(k, l)| delta_name(k, l)).collect();
    VarRegistry::real(&names).expect("solid minor names are unique")
}

/// Real `Δ^(k)_k`, complex `Δ^(k)_l` for `k > l`, then the conjugates.
pub fn gstar_registry(n: usize) -> VarRegistry {
    let spec: Vec<(String, bool)> = solid_labels(n).into_iter().map(|(k, l)| (delta_name(k, l), k > l)).collect();
    VarRegistry::with_conjugates(&spec).expect("solid minor names are unique")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    BPlus,
    GStar0,
    GStar,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bplus" => Ok(Family::BPlus),
            "gstar0" => Ok(Family::GStar0),
            "gstar" => Ok(Family::GStar),
            other => Err(Error::InvalidArgument(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::BPlus => "bplus",
            Family::GStar0 => "gstar0",
            Family::GStar => "gstar",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupBracketSpec {
    pub n: usize,
    pub family: Family,
}

impl GroupBracketSpec {
    pub fn new(n: usize, family: Family) -> Self {
        Self { n, family }
    }

    pub fn registry(&self) -> VarRegistry {
        match self.family {
            Family::BPlus => delta_registry(self.n),
            Family::GStar0 | Family::GStar => gstar_registry(self.n),
        }
    }
}

/// Turns formal minor expressions into Laurent polynomials in the solid
/// minors: `g` minors through the staircase chart, `f⁻¹` minors through
/// `(f⁻¹)_{ST} = conj(g_{TS})`.
pub struct MinorConverter {
    chart: DeltaChart,
    target: Arc<VarRegistry>,
    holo: Vec<Option<usize>>,
    cache: HashMap<MinorSymbol, LaurentPoly>,
}

impl MinorConverter {
    /// `target` must name every solid minor `Dk_l`; it needs the conjugates
    /// only when `f⁻¹` minors are converted.
    pub fn new(n: usize, target: Arc<VarRegistry>) -> Result<Self> {
        let chart = DeltaChart::new(n)?;
        let holo = chart.deltas.vars().iter().map(|v| target.index_of(&v.name)).collect();
        Ok(Self { chart, target, holo, cache: HashMap::new() })
    }

    pub fn target(&self) -> &Arc<VarRegistry> {
        &self.target
    }

    pub fn symbol(&mut self, s: &MinorSymbol) -> Result<LaurentPoly> {
        if let Some(p) = self.cache.get(s) {
            return Ok(p.clone());
        }
        let p = match s.tag {
            MatrixTag::G => self.chart.minor(&s.rows, &s.cols)?.reembed(&self.target, &self.holo)?,
            MatrixTag::FInv => {
                if !self.target.has_complex() {
                    return Err(Error::InvalidArgument(format!("{s} needs a registry with conjugates")));
                }
                self.chart.minor(&s.cols, &s.rows)?.reembed(&self.target, &self.holo)?.conjugate()
            }
        };
        self.cache.insert(s.clone(), p.clone());
        Ok(p)
    }

    pub fn expression(&mut self, e: &MinorExpression) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero(&self.target);
        for (factors, c) in e.terms() {
            let mut term = LaurentPoly::constant(&self.target, c.clone());
            for f in factors {
                term = &term * &self.symbol(f)?;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

/// `½ε(k−p)(R−C)`, with `R` and `C` counting the common rows and columns of
/// the `Δ`-shaped index sets of the two labels.
pub fn lambda_coefficient(n: usize, a: (usize, usize), b: (usize, usize)) -> Rational {
    -delta_coefficient(n, a, b)
}

/// `¼(ε(k−p) − 1)(C − R)` for `{ζ^(k)_l, φ^(p)_q}` in the limit.
pub fn limit_coefficient(n: usize, (k, l): (usize, usize), (p, q): (usize, usize)) -> Rational {
    let a = MinorSymbol::delta(n, k, l);
    let b = MinorSymbol::delta(n, p, q);
    let common = |x: &[usize], y: &[usize]| x.iter().filter(|v| y.contains(v)).count() as i64;
    let c = common(&a.cols, &b.cols);
    let r = common(&a.rows, &b.rows);
    rat((epsilon(k as i64 - p as i64) - 1) * (c - r), 4)
}

/// `{Δ_a, Δ_b}` on `B₊` from the `r`-matrix commutator, over [`delta_registry`].
pub fn delta_bracket_via_engine(conv: &mut MinorConverter, a: (usize, usize), b: (usize, usize)) -> Result<LaurentPoly> {
    let n = conv.chart.n();
    let e = bracket_commutator(&MinorSymbol::delta(n, a.0, a.1), &MinorSymbol::delta(n, b.0, b.1))?;
    conv.expression(&e.simplify_triangular())
}

/// `{Λ_a, Λ_b} = −[r, Λ_a¹ Λ_b²]` on the lower triangular factor.
pub fn lambda_bracket_via_engine(conv: &mut MinorConverter, a: (usize, usize), b: (usize, usize)) -> Result<LaurentPoly> {
    let n = conv.chart.n();
    let e = bracket_commutator(&MinorSymbol::lambda(n, a.0, a.1), &MinorSymbol::lambda(n, b.0, b.1))?;
    let e = e.simplify_triangular().scale(&GaussianRational::from_int(-1));
    conv.expression(&e)
}

/// `i·{g-minor Δ_a, f⁻¹-minor Λ_b}` as a formal expression, before conversion.
pub fn mixed_expression(n: usize, a: (usize, usize), b: (usize, usize)) -> Result<MinorExpression> {
    let e = bracket_sandwich(&MinorSymbol::delta(n, a.0, a.1), &MinorSymbol::lambda(n, b.0, b.1), n)?;
    Ok(e.simplify_triangular().scale(&GaussianRational::i()))
}

/// Coefficients of `|g_X|²` for the two minors `X` of the cone argument in
/// `{Δ^(k)_l, Δ̄^(k)_l}`: first the column-shifted one, then the row-shifted one.
pub fn shifted_minor_coefficients(n: usize, k: usize, l: usize) -> Result<(GaussianRational, GaussianRational)> {
    if !(1..k).contains(&l) || k > n {
        return Err(Error::InvalidArgument(format!("need 1 ≤ l < k ≤ n, got ({k}, {l})")));
    }
    let e = mixed_expression(n, (k, l), (k, l))?;
    let rows: Vec<usize> = (n - k + 1..=n - k + l).collect();
    let cols: Vec<usize> = (n - l + 1..=n).collect();
    let shifted_cols: Vec<usize> = std::iter::once(n - l).chain(n - l + 2..=n).collect();
    let shifted_rows: Vec<usize> = (n - k + 1..n - k + l).chain(std::iter::once(n - k + l + 1)).collect();
    let square = |r: &[usize], c: &[usize]| -> Result<GaussianRational> {
        let g = MinorSymbol::g(r, c)?;
        let f = MinorSymbol::finv(c, r)?;
        Ok(e.coeff(&[g, f]))
    };
    Ok((square(&rows, &shifted_cols)?, square(&shifted_rows, &cols)?))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Holo((usize, usize)),
    Conj((usize, usize)),
}

fn role(reg: &VarRegistry, idx: usize) -> Role {
    let label = delta_label(reg.name(idx)).expect("registry of solid minors");
    match reg.kind(idx) {
        VarKind::ConjugateOf(_) => Role::Conj(label),
        _ => Role::Holo(label),
    }
}

fn log_canonical(reg: &Arc<VarRegistry>, u: usize, v: usize, c: GaussianRational) -> LaurentPoly {
    LaurentPoly::monomial(reg, Monomial::from_sparse(reg.len(), &[(u, 1), (v, 1)]), c)
}

/// Assembles the bracket of the requested family on its solid-minor registry.
pub fn assemble(spec: &GroupBracketSpec) -> Result<PoissonStructure> {
    let n = spec.n;
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let reg = Arc::new(spec.registry());
    let mut p = PoissonStructure::new(reg.clone());
    let i = GaussianRational::i();
    if spec.family == Family::BPlus {
        for u in 0..reg.len() {
            for v in u + 1..reg.len() {
                let (Role::Holo(a), Role::Holo(b)) = (role(&reg, u), role(&reg, v)) else { unreachable!() };
                let c = GaussianRational::real(delta_coefficient(n, a, b));
                p.set(u, v, log_canonical(&reg, u, v, c))?;
            }
        }
        return Ok(p);
    }
    let mut conv = if spec.family == Family::GStar { Some(MinorConverter::new(n, reg.clone())?) } else { None };
    for u in 0..reg.len() {
        for v in u + 1..reg.len() {
            let value = match (role(&reg, u), role(&reg, v)) {
                (Role::Holo(a), Role::Holo(b)) => {
                    log_canonical(&reg, u, v, &i * &GaussianRational::real(delta_coefficient(n, a, b)))
                }
                (Role::Conj(a), Role::Conj(b)) => {
                    log_canonical(&reg, u, v, &i * &GaussianRational::real(lambda_coefficient(n, a, b)))
                }
                (Role::Holo(a), Role::Conj(b)) => mixed(&reg, conv.as_mut(), n, (u, a), (v, b))?,
                (Role::Conj(b), Role::Holo(a)) => -&mixed(&reg, conv.as_mut(), n, (v, a), (u, b))?,
            };
            p.set(u, v, value)?;
        }
    }
    Ok(p)
}

fn mixed(
    reg: &Arc<VarRegistry>,
    conv: Option<&mut MinorConverter>,
    n: usize,
    (u, a): (usize, (usize, usize)),
    (v, b): (usize, (usize, usize)),
) -> Result<LaurentPoly> {
    match conv {
        None => Ok(log_canonical(reg, u, v, &GaussianRational::i() * &GaussianRational::real(mixed_r0_coefficient(n, a, b)))),
        Some(conv) => conv.expression(&mixed_expression(n, a, b)?),
    }
}

/// Degree of each registry variable under the scaling action: `Δ^(k)_l` and
/// its conjugate both get `Σ rows − Σ cols = −l(k−l)`.
pub fn grading_weights(reg: &VarRegistry, n: usize) -> Result<Vec<i64>> {
    reg.vars()
        .iter()
        .map(|v| {
            let (k, l) = delta_label(&v.name).ok_or_else(|| Error::UnknownVariable(v.name.clone()))?;
            let d = MinorSymbol::delta(n, k, l);
            Ok(grading(&d.rows, &d.cols))
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LogCanonicalReport {
    pub mismatches: Vec<String>,
    pub grading_failures: Vec<String>,
}

impl LogCanonicalReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.grading_failures.is_empty()
    }
}

/// Compares the log-canonical part of `G*` with `G₀*` pair by pair, and checks
/// that every other monomial has strictly higher degree than the product.
pub fn check_log_canonical_part_matches_gstar0(n: usize) -> Result<LogCanonicalReport> {
    let full = assemble(&GroupBracketSpec::new(n, Family::GStar))?;
    let zero = assemble(&GroupBracketSpec::new(n, Family::GStar0))?;
    compare_log_canonical(&full, &zero, n)
}

pub fn compare_log_canonical(full: &PoissonStructure, zero: &PoissonStructure, n: usize) -> Result<LogCanonicalReport> {
    let reg = full.registry();
    let lc = full.split_log_canonical();
    let lc0 = zero.split_log_canonical();
    let weights = grading_weights(reg, n)?;
    let mut report = LogCanonicalReport::default();
    for u in 0..reg.len() {
        for v in u + 1..reg.len() {
            let (a, b) = (lc.pi(u, v), lc0.pi(u, v));
            if a != b || !lc0.remainder(u, v).is_zero() {
                report.mismatches.push(format!("({}, {}): {a} vs {b}", reg.name(u), reg.name(v)));
            }
            let base = weights[u] + weights[v];
            for m in lc.remainder(u, v).support() {
                let d = m.weighted_degree(&weights);
                if d <= base {
                    report.grading_failures.push(format!(
                        "({}, {}): monomial of degree {d} not above {base}",
                        reg.name(u),
                        reg.name(v)
                    ));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str, witness: Option<String>) -> Self {
        Self { name: name.into(), passed: witness.is_none(), witness }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GzReport {
    pub n: usize,
    pub checks: Vec<CheckOutcome>,
    /// Inequalities of the tropical cone in `(k, l)` order.
    pub cone: Vec<String>,
    /// `φ` in terms of `ψ`, rows and columns in the Liouville order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_change: Option<Vec<Vec<String>>>,
}

impl GzReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_CONE: &str = "cone";
pub const CHECK_LIMIT_BRACKET: &str = "limit-bracket";
pub const CHECK_CASIMIRS: &str = "casimirs";
pub const CHECK_LIOUVILLE: &str = "liouville";
pub const CHECK_ANGLES: &str = "angle-change";

pub fn verify_gz(n: usize) -> Result<GzReport> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!("verify_gz supports 1 ≤ n ≤ 4, got {n}")));
    }
    verify_gz_structure(&assemble(&GroupBracketSpec::new(n, Family::GStar))?, n)
}

/// Runs the five checks on an already assembled `G*` structure.
pub fn verify_gz_structure(p: &PoissonStructure, n: usize) -> Result<GzReport> {
    let reg = p.registry();
    let coords = TropicalCoordinates::new(reg);
    let labels: Vec<(usize, usize)> = coords
        .coords()
        .iter()
        .map(|c| delta_label(c.name.split_once(':').map_or("", |x| x.1)).ok_or_else(|| Error::UnknownVariable(c.name.clone())))
        .collect::<Result<_>>()?;

    let cone = tropical_cone(p);
    let order = solid_labels(n);
    let cone_in_labels = reorder_cone(&cone, &labels[..coords.cone_dim()], &order)?;
    let names: Vec<String> = order.iter().map(|&(k, l)| format!("zeta{k}{l}")).collect();
    let mut checks = Vec::new();
    let witness = if cone_in_labels.is_empty_cone() {
        Some("tropical cone is empty".to_string())
    } else {
        let gz = gz_cone(n)?;
        match cone_in_labels.first_unimplied(&gz)? {
            Some(m) => Some(format!("gz inequality not implied: {}", crate::polyhedra::format_inequality(&m, &names))),
            None => gz
                .first_unimplied(&cone_in_labels)?
                .map(|m| format!("cone inequality not implied by gz: {}", crate::polyhedra::format_inequality(&m, &names))),
        }
    };
    checks.push(CheckOutcome::new(CHECK_CONE, witness));

    let cb = match constant_bracket(p) {
        Ok(cb) => cb,
        Err(e) => {
            let w = Some(format!("no limit bracket: {e}"));
            for name in [CHECK_LIMIT_BRACKET, CHECK_CASIMIRS, CHECK_LIOUVILLE, CHECK_ANGLES] {
                checks.push(CheckOutcome::new(name, w.clone()));
            }
            return Ok(GzReport { n, checks, cone: cone_in_labels.describe(&names), angle_change: None });
        }
    };
    checks.push(CheckOutcome::new(CHECK_LIMIT_BRACKET, limit_bracket_mismatch(&cb, &labels, n)));

    let mut expected: Vec<String> = cb
        .coords
        .coords()
        .iter()
        .zip(&labels)
        .filter(|(c, (k, _))| c.kind != crate::tropical::CoordKind::Phi && *k == n)
        .map(|(c, _)| c.name.clone())
        .collect();
    expected.sort();
    let mut found = cb.casimir_names();
    found.sort();
    let witness = (found != expected).then(|| format!("casimirs {found:?}, expected {expected:?}"));
    checks.push(CheckOutcome::new(CHECK_CASIMIRS, witness));

    let liouville = check_liouville_structure(&cb, n)?;
    checks.push(CheckOutcome::new(CHECK_LIOUVILLE, liouville.failures.first().cloned()));

    let (witness, angle_change) = match angle_change(&liouville.matrix, &liouville.zeta_order) {
        Ok(a) => (None, Some(a.iter().map(|r| r.iter().map(format_rational).collect()).collect())),
        Err(w) => (Some(w), None),
    };
    checks.push(CheckOutcome::new(CHECK_ANGLES, witness));

    Ok(GzReport { n, checks, cone: cone_in_labels.describe(&names), angle_change })
}

fn reorder_cone(cone: &StrictCone, from: &[(usize, usize)], to: &[(usize, usize)]) -> Result<StrictCone> {
    let pos: Vec<usize> = from
        .iter()
        .map(|l| to.iter().position(|x| x == l).ok_or_else(|| Error::InvalidArgument(format!("label {l:?} missing"))))
        .collect::<Result<_>>()?;
    let mut out = StrictCone::full(to.len());
    for m in cone.normals() {
        let mut v = vec![0i64; to.len()];
        for (i, &x) in m.iter().enumerate() {
            v[pos[i]] += x;
        }
        out.add_normal(&v)?;
    }
    Ok(out)
}

fn limit_bracket_mismatch(cb: &ConstantBracket, labels: &[(usize, usize)], n: usize) -> Option<String> {
    let coords = cb.coords.coords();
    for a in 0..coords.len() {
        for b in 0..coords.len() {
            use crate::tropical::CoordKind::Phi;
            let expected = match (coords[a].kind, coords[b].kind) {
                (Phi, Phi) => Rational::zero(),
                (_, Phi) => limit_coefficient(n, labels[a], labels[b]),
                (Phi, _) => -limit_coefficient(n, labels[b], labels[a]),
                _ => Rational::zero(),
            };
            if *cb.get(a, b) != expected {
                return Some(format!(
                    "{{{}, {}}} = {}, expected {}",
                    coords[a].name,
                    coords[b].name,
                    format_rational(cb.get(a, b)),
                    format_rational(&expected)
                ));
            }
        }
    }
    None
}

/// Solves `φ = Aψ` from `{ζ, φ} = P` and `ζ = Sλ` with `{λ, ψ} = −1`:
/// `Aᵀ = −S⁻¹P`. Requires `A` integral and unitriangular and re-derives
/// `{λ, ψ}` from it.
fn angle_change(p: &RatMatrix, zeta_order: &[String]) -> std::result::Result<RatMatrix, String> {
    let labels: Vec<(usize, usize)> = zeta_order
        .iter()
        .map(|s| delta_label(s.split_once(':').map_or("", |x| x.1)).ok_or_else(|| format!("bad coordinate {s}")))
        .collect::<std::result::Result<_, _>>()?;
    let m = labels.len();
    let s: RatMatrix = labels
        .iter()
        .map(|&(k, l)| labels.iter().map(|&(k2, l2)| if k2 == k && l2 <= l { rat(1, 2) } else { Rational::zero() }).collect())
        .collect();
    let s_inv = matrix::inverse(&s).ok_or("partial-sum matrix is singular")?;
    let at = matrix::scale(&matrix::mul(&s_inv, p), &-Rational::one());
    let a = matrix::transpose(&at);
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_integer() {
                return Err(format!("entry ({i}, {j}) = {} is not an integer", format_rational(x)));
            }
            if (i == j && !x.is_one()) || (j < i && !x.is_zero()) {
                return Err(format!("entry ({i}, {j}) = {} breaks unitriangularity", format_rational(x)));
            }
        }
    }
    let at_inv = matrix::inverse(&at).ok_or("angle change is singular")?;
    let lp = matrix::mul(&matrix::mul(&s_inv, p), &at_inv);
    let minus_id = matrix::scale(&matrix::identity(m), &-Rational::one());
    if lp != minus_id {
        return Err("{λ, ψ} is not minus the identity".into());
    }
    Ok(a)
}
