//! Cone and constant bracket of the large-scale limit.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use crate::arith::{format_rational, rat, rational_to_f64, LaurentPoly, Monomial, Rational, VarKind, VarRegistry};
use crate::error::{Error, Result};
use crate::poisson::PoissonStructure;
use crate::polyhedra::StrictCone;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoordKind {
    /// Log-scale coordinate of a real variable.
    Xi,
    /// Log-scale modulus coordinate of a complex variable.
    Zeta,
    /// Angle of a complex variable.
    Phi,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub kind: CoordKind,
    /// Registry index of the real or complex variable it comes from.
    pub source: usize,
    pub name: String,
}

/// Limit coordinates: one `ξ` or `ζ` per non-conjugate variable in registry
/// order (these span the cone), followed by one `φ` per complex variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCoordinates {
    coords: Vec<Coordinate>,
    cone_dim: usize,
    // registry index -> cone coordinate of its base variable
    cone_pos: Vec<usize>,
    phi_pos: Vec<Option<usize>>,
}

impl TropicalCoordinates {
    pub fn new(reg: &VarRegistry) -> Self {
        let mut coords = Vec::new();
        let mut base_pos = vec![usize::MAX; reg.len()];
        for (i, v) in reg.vars().iter().enumerate() {
            let kind = match v.kind {
                VarKind::RealPositive => CoordKind::Xi,
                VarKind::Complex => CoordKind::Zeta,
                VarKind::ConjugateOf(_) => continue,
            };
            base_pos[i] = coords.len();
            let prefix = if kind == CoordKind::Xi { "xi" } else { "zeta" };
            coords.push(Coordinate { kind, source: i, name: format!("{prefix}:{}", v.name) });
        }
        let cone_dim = coords.len();
        let mut phi_pos = vec![None; reg.len()];
        for (i, v) in reg.vars().iter().enumerate() {
            if v.kind == VarKind::Complex {
                phi_pos[i] = Some(coords.len());
                coords.push(Coordinate { kind: CoordKind::Phi, source: i, name: format!("phi:{}", v.name) });
            }
        }
        let cone_pos = (0..reg.len()).map(|i| base_pos[reg.base_index(i)]).collect();
        Self { coords, cone_dim, cone_pos, phi_pos }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn cone_dim(&self) -> usize {
        self.cone_dim
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn names(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.name.clone()).collect()
    }

    pub fn cone_names(&self) -> Vec<String> {
        self.coords[..self.cone_dim].iter().map(|c| c.name.clone()).collect()
    }

    /// Cone coordinate carrying the modulus of registry variable `var`.
    pub fn cone_index(&self, var: usize) -> usize {
        self.cone_pos[var]
    }

    /// Angle coordinate of a complex variable or its conjugate.
    pub fn phi_index(&self, var: usize, reg: &VarRegistry) -> Option<usize> {
        self.phi_pos[reg.base_index(var)]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }
}

/// Antisymmetric rational matrix of the limit bracket over all coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantBracket {
    pub coords: TropicalCoordinates,
    matrix: Vec<Vec<Rational>>,
}

impl ConstantBracket {
    pub fn zero(coords: TropicalCoordinates) -> Self {
        let n = coords.len();
        Self { coords, matrix: vec![vec![Rational::zero(); n]; n] }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.matrix[i][j]
    }

    /// Sets entry `(i, j)` and its antisymmetric partner.
    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.matrix[j][i] = -&value;
        self.matrix[i][j] = value;
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == -&self.matrix[j][i]))
    }

    /// Coordinates whose row vanishes identically.
    pub fn casimirs(&self) -> Vec<usize> {
        (0..self.matrix.len()).filter(|&i| self.matrix[i].iter().all(|x| x.is_zero())).collect()
    }

    pub fn casimir_names(&self) -> Vec<String> {
        self.casimirs().into_iter().map(|i| self.coords.coords[i].name.clone()).collect()
    }
}

impl fmt::Display for ConstantBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.matrix.len();
        for i in 0..n {
            for j in i + 1..n {
                if !self.matrix[i][j].is_zero() {
                    writeln!(
                        f,
                        "{{{}, {}}} = {}",
                        self.coords.coords[i].name,
                        self.coords.coords[j].name,
                        format_rational(&self.matrix[i][j])
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Normal vector `n_{u,v} − n(I)` in cone coordinates.
fn normal_for(coords: &TropicalCoordinates, u: usize, v: usize, m: &Monomial) -> Vec<i64> {
    let mut n = vec![0i64; coords.cone_dim()];
    n[coords.cone_index(u)] += 1;
    n[coords.cone_index(v)] += 1;
    for (r, &e) in m.exponents().iter().enumerate() {
        if e != 0 {
            n[coords.cone_index(r)] -= e as i64;
        }
    }
    n
}

/// Intersection over all pairs and all remainder monomials of the cones on
/// which that monomial is dominated by the product of the pair.
pub fn tropical_cone(p: &PoissonStructure) -> StrictCone {
    let coords = TropicalCoordinates::new(p.registry());
    let mut cone = StrictCone::full(coords.cone_dim());
    let lc = p.split_log_canonical();
    for ((u, v), rest) in lc.remainder_entries() {
        for m in rest.support() {
            cone.add_normal(&normal_for(&coords, u, v, m)).expect("normal has cone dimension");
        }
    }
    cone
}

/// Limit bracket built from the log-canonical coefficients.
pub fn constant_bracket(p: &PoissonStructure) -> Result<ConstantBracket> {
    let reg = p.registry();
    let coords = TropicalCoordinates::new(reg);
    let lc = p.split_log_canonical();
    let mut cb = ConstantBracket::zero(coords.clone());
    if !reg.has_complex() {
        for ((u, v), c) in lc.pi_entries() {
            if !c.im.is_zero() {
                return Err(Error::Reality(format!(
                    "coefficient of ({}, {}) is not real in an all-real structure",
                    reg.name(u),
                    reg.name(v)
                )));
            }
            cb.set(coords.cone_index(u), coords.cone_index(v), c.re.clone());
        }
        return Ok(cb);
    }
    p.require_real()?;
    let half = rat(1, 2);
    let n = reg.len();
    for u in 0..n {
        let kind_u = reg.kind(u);
        match kind_u {
            VarKind::RealPositive => {
                for a in 0..n {
                    if reg.kind(a) == VarKind::Complex {
                        let phi = coords.phi_index(a, reg).expect("complex variable has an angle");
                        cb.set(coords.cone_index(u), phi, lc.pi(u, a).im);
                    }
                }
            }
            VarKind::Complex => {
                for b in 0..n {
                    if reg.kind(b) != VarKind::Complex {
                        continue;
                    }
                    let bbar = reg.conjugate_index(b);
                    let value = &(&lc.pi(u, b).im - &lc.pi(u, bbar).im) * &half;
                    let phi = coords.phi_index(b, reg).expect("complex variable has an angle");
                    cb.set(coords.cone_index(u), phi, value);
                }
            }
            VarKind::ConjugateOf(_) => {}
        }
    }
    Ok(cb)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationRow {
    pub t: f64,
    pub pair: (String, String),
    pub scaled: f64,
    pub limit: f64,
    pub deviation: f64,
}

/// Rows of the scaled-bracket comparison, in `t` then coordinate-pair order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeviationTable {
    pub rows: Vec<DeviationRow>,
}

impl DeviationTable {
    /// Largest deviation per `t`, in input order.
    pub fn max_by_t(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some((t, d)) if *t == r.t => *d = d.max(r.deviation),
                _ => out.push((r.t, r.deviation)),
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,pair,scaled,limit,abs_deviation\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{}|{},{:.17e},{:.17e},{:.17e}",
                r.t, r.pair.0, r.pair.1, r.scaled, r.limit, r.deviation
            );
        }
        s
    }
}

/// Evaluates the exact rescaled bracket of every coordinate pair at
/// `x = e^{tη}`, `z = e^{tη + iφ}` and compares it with the limit.
///
/// `eta` must have slack at least 1 on the tropical cone; `phis` holds one
/// angle per complex variable.
pub fn limit_sample(p: &PoissonStructure, eta: &[Rational], phis: &[f64], ts: &[f64]) -> Result<DeviationTable> {
    let reg: &Arc<VarRegistry> = p.registry();
    let coords = TropicalCoordinates::new(reg);
    let cone = tropical_cone(p);
    cone.check_slack(eta, &rat(1, 1))?;
    let complex_count = coords.len() - coords.cone_dim();
    if phis.len() != complex_count {
        return Err(Error::DimensionMismatch { expected: complex_count, found: phis.len() });
    }
    let cb = constant_bracket(p)?;
    let n = reg.len();

    // {log u, log v} = {u, v} / (uv), kept symbolic once
    let mut log_brackets = vec![vec![None; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let b = p.bracket(u, v);
            if b.is_zero() {
                continue;
            }
            let q = b.mul_monomial(&Monomial::from_sparse(n, &[(u, -1), (v, -1)]));
            log_brackets[u][v] = Some(q);
        }
    }

    // each coordinate as a combination of log u over registry variables,
    // with the power of t stripped off
    let i = Complex64::new(0.0, 1.0);
    let combos: Vec<Vec<(usize, Complex64)>> = coords
        .coords()
        .iter()
        .map(|c| match c.kind {
            CoordKind::Xi => vec![(c.source, Complex64::new(1.0, 0.0))],
            CoordKind::Zeta => {
                vec![(c.source, Complex64::new(0.5, 0.0)), (reg.conjugate_index(c.source), Complex64::new(0.5, 0.0))]
            }
            CoordKind::Phi => vec![(c.source, 0.5 / i), (reg.conjugate_index(c.source), -0.5 / i)],
        })
        .collect();
    // exponent of 1/t carried by each coordinate
    let t_power: Vec<i32> = coords.coords().iter().map(|c| if c.kind == CoordKind::Phi { 0 } else { 1 }).collect();
    let scale_power = if reg.has_complex() { 1 } else { 2 };
    let eta_f: Vec<f64> = eta.iter().map(rational_to_f64).collect();

    let mut table = DeviationTable::default();
    for &t in ts {
        let logs: Vec<Complex64> = (0..n)
            .map(|r| {
                let modulus = t * eta_f[coords.cone_index(r)];
                match reg.kind(r) {
                    VarKind::RealPositive => Complex64::new(modulus, 0.0),
                    VarKind::Complex => Complex64::new(modulus, phis[coords.phi_index(r, reg).unwrap() - coords.cone_dim()]),
                    VarKind::ConjugateOf(_) => {
                        Complex64::new(modulus, -phis[coords.phi_index(r, reg).unwrap() - coords.cone_dim()])
                    }
                }
            })
            .collect();
        let mut values = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for u in 0..n {
            for v in u + 1..n {
                if let Some(q) = &log_brackets[u][v] {
                    let val = q.eval_log(&logs);
                    values[u][v] = val;
                    values[v][u] = -val;
                }
            }
        }
        for a in 0..coords.len() {
            for b in a + 1..coords.len() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(u, cu) in &combos[a] {
                    for &(v, cv) in &combos[b] {
                        acc += cu * cv * values[u][v];
                    }
                }
                let power = scale_power - t_power[a] - t_power[b];
                let scaled = acc * t.powi(power);
                let limit = rational_to_f64(cb.get(a, b));
                table.rows.push(DeviationRow {
                    t,
                    pair: (coords.coords()[a].name.clone(), coords.coords()[b].name.clone()),
                    scaled: scaled.re,
                    limit,
                    deviation: (scaled - Complex64::new(limit, 0.0)).norm(),
                });
            }
        }
    }
    Ok(table)
}

/// Triangularity report for the `(ζ, φ)` pairing block.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleReport {
    pub zeta_order: Vec<String>,
    pub phi_order: Vec<String>,
    pub matrix: Vec<Vec<Rational>>,
    pub failures: Vec<String>,
}

impl LiouvilleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Orders `ζ^(k)_l` (`k < n`) and `φ^(p)_q` (`p ≥ 2`) with higher `k` first,
/// then smaller `l`, and checks that the pairing matrix is lower triangular
/// with `−1/2` on the diagonal.
pub fn check_liouville_structure(cb: &ConstantBracket, n: usize) -> Result<LiouvilleReport> {
    use crate::groups::delta_label;
    let reg_names: Vec<(CoordKind, Option<(usize, usize)>)> = cb
        .coords
        .coords()
        .iter()
        .map(|c| {
            let base = c.name.split_once(':').map(|(_, b)| b).unwrap_or("");
            (c.kind, delta_label(base))
        })
        .collect();
    let mut zetas = Vec::new();
    let mut phis = Vec::new();
    for (idx, (kind, label)) in reg_names.iter().enumerate() {
        let Some((k, l)) = *label else {
            return Err(Error::InvalidArgument(format!("coordinate {} is not a minor label", cb.coords.coords()[idx].name)));
        };
        if k > n {
            return Err(Error::InvalidArgument(format!("label ({k}, {l}) exceeds n = {n}")));
        }
        match kind {
            CoordKind::Phi => phis.push((k, l, idx)),
            _ if k < n => zetas.push((k, l, idx)),
            _ => {}
        }
    }
    let expected = n * (n - 1) / 2;
    if zetas.len() != expected || phis.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: zetas.len().min(phis.len()) });
    }
    zetas.sort_by_key(|&(k, l, _)| (std::cmp::Reverse(k), l));
    phis.sort_by_key(|&(k, l, _)| (std::cmp::Reverse(k), l));
    let name = |i: usize| cb.coords.coords()[i].name.clone();
    let mut failures = Vec::new();
    let mut matrix = Vec::with_capacity(expected);
    let half = rat(-1, 2);
    for (r, &(_, _, zi)) in zetas.iter().enumerate() {
        let row: Vec<Rational> = phis.iter().map(|&(_, _, pj)| cb.get(zi, pj).clone()).collect();
        for (c, value) in row.iter().enumerate() {
            if c > r && !value.is_zero() {
                failures.push(format!("{{{}, {}}} = {} above the diagonal", name(zi), name(phis[c].2), format_rational(value)));
            }
        }
        if row[r] != half {
            failures.push(format!("diagonal {{{}, {}}} = {}", name(zi), name(phis[r].2), format_rational(&row[r])));
        }
        matrix.push(row);
    }
    Ok(LiouvilleReport {
        zeta_order: zetas.iter().map(|z| name(z.2)).collect(),
        phi_order: phis.iter().map(|p| name(p.2)).collect(),
        matrix,
        failures,
    })
}

/// Lifts `poly` on `from` into `to` by variable name.
pub fn reembed_by_name(poly: &LaurentPoly, to: &Arc<VarRegistry>) -> Result<LaurentPoly> {
    let from = poly.registry();
    let map: Vec<Option<usize>> = from.vars().iter().map(|v| to.index_of(&v.name)).collect();
    poly.reembed(to, &map)
}
