//! Brackets of minors of triangular matrices under `r = r₀ + r′`.
//!
//! Minors are kept as formal symbols. Row and column labels are 1-based.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::arith::{rat, GaussianRational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatrixTag {
    /// Upper triangular `g`.
    G,
    /// Lower triangular `f⁻¹`.
    FInv,
}

/// Minor of `g` or `f⁻¹` on sorted row and column label sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MinorSymbol {
    pub tag: MatrixTag,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl MinorSymbol {
    pub fn new(tag: MatrixTag, rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::SizeMismatch { rows: rows.len(), cols: cols.len() });
        }
        let sorted = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&rows) || !sorted(&cols) || rows.contains(&0) || cols.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "minor labels must be strictly increasing and 1-based: {rows:?} x {cols:?}"
            )));
        }
        Ok(Self { tag, rows, cols })
    }

    pub fn g(rows: &[usize], cols: &[usize]) -> Result<Self> {
        Self::new(MatrixTag::G, rows.to_vec(), cols.to_vec())
    }

    pub fn finv(rows: &[usize], cols: &[usize]) -> Result<Self> {
        Self::new(MatrixTag::FInv, rows.to_vec(), cols.to_vec())
    }

    /// Solid minor `Δ^(k)_l` of `g`.
    pub fn delta(n: usize, k: usize, l: usize) -> Self {
        let rows = (n - k + 1..=n - k + l).collect();
        let cols = (n - l + 1..=n).collect();
        Self { tag: MatrixTag::G, rows, cols }
    }

    /// Solid minor `Λ^(k)_l` of `f⁻¹`, the transpose shape of `Δ^(k)_l`.
    pub fn lambda(n: usize, k: usize, l: usize) -> Self {
        let d = Self::delta(n, k, l);
        Self { tag: MatrixTag::FInv, rows: d.cols, cols: d.rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Whether the minor vanishes identically on its triangular group.
    pub fn vanishes_on_triangular(&self) -> bool {
        match self.tag {
            MatrixTag::G => self.rows.iter().zip(&self.cols).any(|(i, j)| i > j),
            MatrixTag::FInv => self.rows.iter().zip(&self.cols).any(|(i, j)| i < j),
        }
    }
}

impl fmt::Display for MinorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.tag {
            MatrixTag::G => "g",
            MatrixTag::FInv => "finv",
        };
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{name}[{};{}]", join(&self.rows), join(&self.cols))
    }
}

/// Replaces label `from` by `to` in place and re-sorts.
///
/// Returns `None` when `to` is already present (the minor has a repeated
/// line and vanishes), otherwise the sorted set and the sign of the sort.
pub fn sigma(set: &[usize], from: usize, to: usize) -> Option<(Vec<usize>, i32)> {
    if set.contains(&to) {
        return None;
    }
    let pos = set.iter().position(|&x| x == from)?;
    let mut out = set.to_vec();
    out[pos] = to;
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let between = set.iter().filter(|&&x| x > lo && x < hi).count();
    out.sort_unstable();
    Some((out, if between % 2 == 0 { 1 } else { -1 }))
}

/// Formal linear combination of products of minor symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MinorExpression {
    terms: BTreeMap<Vec<MinorSymbol>, GaussianRational>,
}

impl MinorExpression {
    pub fn zero() -> Self {
        Self::default()
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<MinorSymbol>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mut factors: Vec<MinorSymbol>, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        factors.sort();
        let slot = self.terms.entry(factors).or_insert_with(GaussianRational::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn product(a: &MinorSymbol, b: &MinorSymbol, c: GaussianRational) -> Self {
        let mut e = Self::zero();
        e.add_term(vec![a.clone(), b.clone()], c);
        e
    }

    pub fn coeff(&self, factors: &[MinorSymbol]) -> GaussianRational {
        let mut key = factors.to_vec();
        key.sort();
        self.terms.get(&key).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&GaussianRational::from_int(-1)))
    }

    /// Drops every term containing a minor that vanishes on the triangular
    /// groups.
    pub fn simplify_triangular(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if !k.iter().any(MinorSymbol::vanishes_on_triangular) {
                out.add_term(k.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for MinorExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let syms: Vec<String> = k.iter().map(|s| s.to_string()).collect();
                format!("{c}*{}", syms.join("*"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_sizes(l: &MinorSymbol, m: &MinorSymbol) -> Result<()> {
    for s in [l, m] {
        if s.rows.len() != s.cols.len() {
            return Err(Error::SizeMismatch { rows: s.rows.len(), cols: s.cols.len() });
        }
    }
    Ok(())
}

fn max_label(l: &MinorSymbol, m: &MinorSymbol) -> usize {
    [&l.rows, &l.cols, &m.rows, &m.cols].iter().flat_map(|v| v.iter()).copied().max().unwrap_or(0)
}

fn common(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

#[derive(Clone, Copy)]
enum Slot {
    Rows,
    Cols,
}

fn replaced(s: &MinorSymbol, slot: Slot, from: usize, to: usize) -> Option<(MinorSymbol, i32)> {
    let mut out = s.clone();
    let sign = match slot {
        Slot::Rows => {
            let (v, sign) = sigma(&s.rows, from, to)?;
            out.rows = v;
            sign
        }
        Slot::Cols => {
            let (v, sign) = sigma(&s.cols, from, to)?;
            out.cols = v;
            sign
        }
    };
    Some((out, sign))
}

/// `Σ_{u<v} χ(u, v) · L' · M'` where both factors get one label replaced.
///
/// `lswap`/`mswap` say which slot of each factor changes and whether it is
/// `u → v` (`true`) or `v → u` (`false`).
fn sum_uv(
    l: &MinorSymbol,
    m: &MinorSymbol,
    n: usize,
    lswap: (Slot, bool),
    mswap: (Slot, bool),
    member: impl Fn(usize, usize) -> bool,
) -> MinorExpression {
    let mut out = MinorExpression::zero();
    for u in 1..=n {
        for v in u + 1..=n {
            if !member(u, v) {
                continue;
            }
            let (lf, lt) = if lswap.1 { (u, v) } else { (v, u) };
            let (mf, mt) = if mswap.1 { (u, v) } else { (v, u) };
            let Some((l2, s1)) = replaced(l, lswap.0, lf, lt) else { continue };
            let Some((m2, s2)) = replaced(m, mswap.0, mf, mt) else { continue };
            out.add_term(vec![l2, m2], GaussianRational::from_int((s1 * s2) as i64));
        }
    }
    out
}

/// `Σ_{u<v} χ_I(u)χ_S(v) L_{σ_{u,v}(I),J} M_{σ_{v,u}(S),T}`.
pub fn bracket_rprime_left(l: &MinorSymbol, m: &MinorSymbol) -> Result<MinorExpression> {
    check_sizes(l, m)?;
    let n = max_label(l, m);
    Ok(sum_uv(l, m, n, (Slot::Rows, true), (Slot::Rows, false), |u, v| {
        l.rows.contains(&u) && m.rows.contains(&v)
    }))
}

/// `Σ_{u<v} χ_J(v)χ_T(u) L_{I,σ_{v,u}(J)} M_{S,σ_{u,v}(T)}`.
pub fn bracket_rprime_right(l: &MinorSymbol, m: &MinorSymbol) -> Result<MinorExpression> {
    check_sizes(l, m)?;
    let n = max_label(l, m);
    Ok(sum_uv(l, m, n, (Slot::Cols, false), (Slot::Cols, true), |u, v| {
        l.cols.contains(&v) && m.cols.contains(&u)
    }))
}

/// `Σ_{u<v} χ_J(v)χ_S(v) L_{I,σ_{v,u}(J)} M_{σ_{v,u}(S),T}`.
pub fn bracket_rprime_mid(l: &MinorSymbol, m: &MinorSymbol) -> Result<MinorExpression> {
    check_sizes(l, m)?;
    let n = max_label(l, m);
    Ok(sum_uv(l, m, n, (Slot::Cols, false), (Slot::Rows, false), |_, v| {
        l.cols.contains(&v) && m.rows.contains(&v)
    }))
}

/// `Σ_{u<v} χ_I(u)χ_T(u) L_{σ_{u,v}(I),J} M_{S,σ_{u,v}(T)}`, the second sum
/// of the mixed bracket.
fn bracket_rprime_outer(l: &MinorSymbol, m: &MinorSymbol, n: usize) -> MinorExpression {
    sum_uv(l, m, n, (Slot::Rows, true), (Slot::Cols, true), |u, _| {
        l.rows.contains(&u) && m.cols.contains(&u)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum R0Side {
    LeftLeft,
    RightRight,
    Middle,
}

/// The `r₀` contribution: `½|I∩S|`, `½|J∩T|` or `½|J∩S|` times `L·M`.
pub fn bracket_r0(l: &MinorSymbol, m: &MinorSymbol, side: R0Side) -> Result<MinorExpression> {
    check_sizes(l, m)?;
    let count = match side {
        R0Side::LeftLeft => common(&l.rows, &m.rows),
        R0Side::RightRight => common(&l.cols, &m.cols),
        R0Side::Middle => common(&l.cols, &m.rows),
    };
    Ok(MinorExpression::product(l, m, GaussianRational::real(rat(count as i64, 2))))
}

/// `{L, M} = [r, L¹M²]` for two minors of the same matrix.
pub fn bracket_commutator(l: &MinorSymbol, m: &MinorSymbol) -> Result<MinorExpression> {
    if l.tag != m.tag {
        return Err(Error::TagMismatch(format!("{l} and {m} belong to different matrices")));
    }
    let scalar = rat(common(&l.rows, &m.rows) as i64 - common(&l.cols, &m.cols) as i64, 2);
    Ok(bracket_rprime_left(l, m)?
        .sub(&bracket_rprime_right(l, m)?)
        .add(&MinorExpression::product(l, m, GaussianRational::real(scalar))))
}

/// `{g_{IJ}, (f⁻¹)_{ST}}` from `g¹ r (f⁻¹)² − (f⁻¹)² r g¹` for `n × n`
/// matrices. Unlike the other brackets this one needs `n`: its second sum
/// moves a row label to any larger label.
pub fn bracket_sandwich(l: &MinorSymbol, m: &MinorSymbol, n: usize) -> Result<MinorExpression> {
    if l.tag != MatrixTag::G || m.tag != MatrixTag::FInv {
        return Err(Error::TagMismatch(format!("expected a g minor and an f^-1 minor, got {l} and {m}")));
    }
    check_sizes(l, m)?;
    if max_label(l, m) > n {
        return Err(Error::InvalidArgument(format!("labels of {l} and {m} exceed n = {n}")));
    }
    let scalar = rat(common(&l.cols, &m.rows) as i64 - common(&l.rows, &m.cols) as i64, 2);
    Ok(bracket_rprime_mid(l, m)?
        .sub(&bracket_rprime_outer(l, m, n))
        .add(&MinorExpression::product(l, m, GaussianRational::real(scalar))))
}

/// `ε(x)` with `ε(0) = 0`.
pub fn epsilon(x: i64) -> i64 {
    x.signum()
}

/// `½ε(k−p)(C−R)` for solid minors `Δ^(k)_l`, `Δ^(p)_q`.
pub fn delta_coefficient(n: usize, (k, l): (usize, usize), (p, q): (usize, usize)) -> Rational {
    let a = MinorSymbol::delta(n, k, l);
    let b = MinorSymbol::delta(n, p, q);
    let c = common(&a.cols, &b.cols) as i64;
    let r = common(&a.rows, &b.rows) as i64;
    rat(epsilon(k as i64 - p as i64) * (c - r), 2)
}

/// `½(A−B)` for `Δ^(k)_l` against `Λ^(p)_q`: `A = |J∩S|`, `B = |I∩T|`.
pub fn mixed_r0_coefficient(n: usize, (k, l): (usize, usize), (p, q): (usize, usize)) -> Rational {
    let d = MinorSymbol::delta(n, k, l);
    let m = MinorSymbol::lambda(n, p, q);
    rat(common(&d.cols, &m.rows) as i64 - common(&d.rows, &m.cols) as i64, 2)
}

/// Every solid-minor label `(k, l)`, `1 ≤ l ≤ k ≤ n`, in `(k, l)` order.
pub fn solid_labels(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|k| (1..=k).map(move |l| (k, l))).collect()
}
