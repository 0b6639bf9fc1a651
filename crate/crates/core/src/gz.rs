//! Gelfand-Zeitlin patterns, the partial-sum map to `ζ`, the tropical GZ map
//! of the staircase network and its principal chamber.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::matrix::{self, RatMatrix};
use crate::arith::{rat, Rational};
use crate::error::{Error, Result};
use crate::networks::{MultiPath, Staircase};
use crate::polyhedra::StrictCone;
use crate::rmatrix::{solid_labels, MinorSymbol};

/// `λ^(k)_l` stored as `rows[k-1][l-1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GzPattern {
    pub rows: Vec<Vec<Rational>>,
}

impl GzPattern {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        for (k, r) in rows.iter().enumerate() {
            if r.len() != k + 1 {
                return Err(Error::DimensionMismatch { expected: k + 1, found: r.len() });
            }
        }
        Ok(Self { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, k: usize, l: usize) -> &Rational {
        &self.rows[k - 1][l - 1]
    }

    /// `λ^(k)_l ≥ λ^(k−1)_l ≥ λ^(k)_{l+1}`, strictly if asked.
    pub fn is_interlacing(&self, strict: bool) -> bool {
        let ok = |a: &Rational, b: &Rational| if strict { a > b } else { a >= b };
        (2..=self.n()).all(|k| (1..k).all(|l| ok(self.get(k, l), self.get(k - 1, l)) && ok(self.get(k - 1, l), self.get(k, l + 1))))
    }
}

/// Position of `(k, l)` in the flat `(k, l)` order.
pub fn label_index(k: usize, l: usize) -> usize {
    k * (k - 1) / 2 + l - 1
}

/// `n` with `n(n+1)/2 = len`.
pub fn infer_n(len: usize) -> Result<usize> {
    let mut n = 0;
    while n * (n + 1) / 2 < len {
        n += 1;
    }
    if n * (n + 1) / 2 == len {
        Ok(n)
    } else {
        Err(Error::InvalidArgument(format!("{len} is not a triangular number")))
    }
}

/// `ζ^(k)_l = c·(λ^(k)_1 + ⋯ + λ^(k)_l)` with `c = ½` when `half`.
pub fn sigma(lambda: &GzPattern, half: bool) -> Vec<Rational> {
    let c = if half { rat(1, 2) } else { rat(1, 1) };
    let mut out = Vec::new();
    for row in &lambda.rows {
        let mut acc = Rational::zero();
        for x in row {
            acc += x;
            out.push(&acc * &c);
        }
    }
    out
}

/// Inverse of [`sigma`] without the factor ½.
pub fn sigma_inverse(zeta: &[Rational]) -> Result<GzPattern> {
    let n = infer_n(zeta.len())?;
    let rows = (1..=n)
        .map(|k| {
            (1..=k)
                .map(|l| {
                    let prev = if l > 1 { zeta[label_index(k, l - 1)].clone() } else { Rational::zero() };
                    &zeta[label_index(k, l)] - &prev
                })
                .collect()
        })
        .collect();
    GzPattern::new(rows)
}

fn add_at(v: &mut [i64], k: usize, l: usize, c: i64) {
    if l >= 1 && l <= k {
        v[label_index(k, l)] += c;
    }
}

/// `u^(k)_l = ζ^(k)_l + ζ^(k−1)_{l−1} − ζ^(k)_{l−1} − ζ^(k−1)_l` as a normal.
pub fn u_normal(n: usize, k: usize, l: usize) -> Vec<i64> {
    let mut v = vec![0; n * (n + 1) / 2];
    add_at(&mut v, k, l, 1);
    add_at(&mut v, k - 1, l - 1, 1);
    add_at(&mut v, k, l - 1, -1);
    add_at(&mut v, k - 1, l, -1);
    v
}

/// `v^(k)_l = ζ^(k−1)_{l−1} + ζ^(k)_{l+1} − ζ^(k)_l − ζ^(k−1)_l` as a normal.
pub fn v_normal(n: usize, k: usize, l: usize) -> Vec<i64> {
    let mut v = vec![0; n * (n + 1) / 2];
    add_at(&mut v, k - 1, l - 1, 1);
    add_at(&mut v, k, l + 1, 1);
    add_at(&mut v, k, l, -1);
    add_at(&mut v, k - 1, l, -1);
    v
}

/// Pairs `(k, l)` with `2 ≤ k ≤ n`, `1 ≤ l < k`.
pub fn rhombus_labels(n: usize) -> Vec<(usize, usize)> {
    (2..=n).flat_map(|k| (1..k).map(move |l| (k, l))).collect()
}

/// Strict interlacing of `λ = σ⁻¹(ζ)`, written over `ζ`.
pub fn gz_cone(n: usize) -> Result<StrictCone> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let dim = n * (n + 1) / 2;
    // λ^(k)_l as a row over ζ
    let lam = |k: usize, l: usize| {
        let mut v = vec![0i64; dim];
        add_at(&mut v, k, l, 1);
        add_at(&mut v, k, l - 1, -1);
        v
    };
    let mut cone = StrictCone::full(dim);
    for (k, l) in rhombus_labels(n) {
        let diff = |a: Vec<i64>, b: Vec<i64>| a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>();
        cone.add_normal(&diff(lam(k, l), lam(k - 1, l)))?;
        cone.add_normal(&diff(lam(k - 1, l), lam(k, l + 1)))?;
    }
    Ok(cone)
}

/// Cone `{u > 0, v < 0}` straight from the rhombus formulas.
pub fn rhombus_cone(n: usize) -> Result<StrictCone> {
    let mut cone = StrictCone::full(n * (n + 1) / 2);
    for (k, l) in rhombus_labels(n) {
        cone.add_normal(&u_normal(n, k, l))?;
        cone.add_normal(&v_normal(n, k, l).iter().map(|x| -x).collect::<Vec<_>>())?;
    }
    Ok(cone)
}

fn dot(a: &[i64], x: &[Rational]) -> Rational {
    a.iter().zip(x).filter(|(c, _)| **c != 0).map(|(&c, v)| v * Rational::from_integer(c.into())).sum()
}

/// `(u^(k)_l, v^(k)_l)` for every rhombus label.
pub fn uv_quantities(zeta: &[Rational]) -> Result<BTreeMap<(usize, usize), (Rational, Rational)>> {
    let n = infer_n(zeta.len())?;
    Ok(rhombus_labels(n)
        .into_iter()
        .map(|(k, l)| ((k, l), (dot(&u_normal(n, k, l), zeta), dot(&v_normal(n, k, l), zeta))))
        .collect())
}

/// Tropical GZ map of `Γ_s(n)` with every path system enumerated once.
///
/// `l^(k)_i` is the largest weight of an `i`-path system among the bottom `k`
/// lines, over all choices of its sources and sinks there. Weights are given
/// per parameter in [`Staircase::parameter_edges`] order.
pub struct TropicalGzMap {
    pub staircase: Staircase,
    /// Per `(k, i)`: exponent vector of every path system.
    families: Vec<Vec<Vec<i64>>>,
    distinguished: Vec<usize>,
}

fn subsets(from: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if from.len() < size {
        return Vec::new();
    }
    let mut with: Vec<Vec<usize>> = subsets(&from[1..], size - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, from[0]);
            s
        })
        .collect();
    with.extend(subsets(&from[1..], size));
    with
}

impl TropicalGzMap {
    pub fn new(n: usize) -> Result<Self> {
        let staircase = Staircase::new(n)?;
        let params = staircase.parameter_edges();
        let exponent = |mp: &MultiPath| {
            let mut v = vec![0i64; params.len()];
            for e in mp.edges() {
                if let Some(c) = params.iter().position(|&x| x == e) {
                    v[c] += 1;
                }
            }
            v
        };
        let mut families = Vec::new();
        let mut distinguished = Vec::new();
        for (k, i) in solid_labels(n) {
            let lines: Vec<usize> = (n - k + 1..=n).collect();
            let mut fam = Vec::new();
            for rows in subsets(&lines, i) {
                for cols in subsets(&lines, i) {
                    fam.extend(staircase.net.multipaths(&rows, &cols)?.iter().map(exponent));
                }
            }
            let gamma = exponent(&staircase.delta_multipath(k, i)?);
            distinguished.push(fam.iter().position(|v| *v == gamma).expect("distinguished path system is enumerated"));
            families.push(fam);
        }
        Ok(Self { staircase, families, distinguished })
    }

    pub fn n(&self) -> usize {
        self.staircase.n()
    }

    pub fn num_params(&self) -> usize {
        self.n() * (self.n() + 1) / 2
    }

    /// Exponent vector of the distinguished path system `γ^(k)_i`.
    pub fn distinguished(&self, k: usize, i: usize) -> &[i64] {
        let idx = label_index(k, i);
        &self.families[idx][self.distinguished[idx]]
    }

    pub fn family(&self, k: usize, i: usize) -> &[Vec<i64>] {
        &self.families[label_index(k, i)]
    }

    fn check(&self, w: &[Rational]) -> Result<()> {
        if w.len() != self.num_params() {
            return Err(Error::DimensionMismatch { expected: self.num_params(), found: w.len() });
        }
        Ok(())
    }

    /// `l^(k)_i` in `(k, i)` order.
    pub fn apply(&self, w: &[Rational]) -> Result<Vec<Rational>> {
        self.check(w)?;
        Ok(self.families.iter().map(|fam| fam.iter().map(|v| dot(v, w)).max().expect("nonempty family")).collect())
    }

    /// Indices of the maximizing path systems per `(k, i)`.
    pub fn argmax(&self, w: &[Rational]) -> Result<Vec<Vec<usize>>> {
        let best = self.apply(w)?;
        Ok(self
            .families
            .iter()
            .zip(&best)
            .map(|(fam, b)| (0..fam.len()).filter(|&j| dot(&fam[j], w) == *b).collect())
            .collect())
    }

    /// Whether every maximum is attained only by the distinguished system.
    pub fn maximum_is_distinguished(&self, w: &[Rational]) -> Result<bool> {
        Ok(self.argmax(w)?.iter().zip(&self.distinguished).all(|(a, d)| a.len() == 1 && a[0] == *d))
    }

    /// Jacobian at `w` when every maximizer is unique, `None` otherwise.
    pub fn linear_part(&self, w: &[Rational]) -> Result<Option<RatMatrix>> {
        let argmax = self.argmax(w)?;
        if argmax.iter().any(|a| a.len() != 1) {
            return Ok(None);
        }
        let rows: Vec<Vec<i64>> = argmax.iter().zip(&self.families).map(|(a, fam)| fam[a[0]].clone()).collect();
        Ok(Some(matrix::from_ints(&rows)))
    }
}

pub fn tropical_gz_map(n: usize, w: &[Rational]) -> Result<Vec<Rational>> {
    TropicalGzMap::new(n)?.apply(w)
}

/// Bounded face of `Γ_s(n)` in the strip between lines `strip` and
/// `strip + 1`, bounded left and right by slanted edges (word positions) or
/// by the source and sink lines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    pub strip: usize,
    pub left: Option<usize>,
    pub right: Option<usize>,
    // doubled column strictly inside the face
    probe: usize,
}

impl Face {
    pub fn name(&self) -> String {
        let pos = |p: Option<usize>, end: &str| p.map_or(end.to_string(), |p| (p + 1).to_string());
        format!("face[{}:{}-{}]", self.strip, pos(self.left, "L"), pos(self.right, "R"))
    }

    /// Weight as a linear form over the parameters: `+` for edges above or to
    /// the right, `−` for edges below or to the left.
    pub fn normal(&self, n: usize, m: usize) -> Vec<i64> {
        let mut v = vec![0i64; m + n];
        if let Some(r) = self.right {
            v[r] += 1;
        }
        if let Some(l) = self.left {
            v[l] -= 1;
        }
        if self.right.is_none() {
            v[m + self.strip - 1] += 1;
            v[m + self.strip] -= 1;
        }
        v
    }
}

pub fn faces(st: &Staircase) -> Vec<Face> {
    let n = st.n();
    let mut out = Vec::new();
    for a in 1..n {
        let pos: Vec<usize> = st.word.iter().enumerate().filter(|(_, &x)| x == a).map(|(p, _)| p).collect();
        let mut left = None;
        for right in pos.iter().copied().map(Some).chain(std::iter::once(None)) {
            let probe = left.map_or(1, |p: usize| 2 * (2 * p + 2) + 1);
            out.push(Face { strip: a, left, right, probe });
            left = right;
        }
    }
    out
}

fn path_line_at(st: &Staircase, path: &[usize], probe: usize) -> Option<usize> {
    let net = &st.net;
    path.iter().find_map(|&e| {
        let edge = &net.edges[e];
        let (a, b) = (net.vertices[edge.from], net.vertices[edge.to]);
        (2 * a.column < probe && probe < 2 * b.column).then_some(a.line)
    })
}

fn count_above(st: &Staircase, mp: &MultiPath, f: &Face) -> i64 {
    mp.paths.iter().filter(|p| path_line_at(st, p, f.probe).is_some_and(|line| line <= f.strip)).count() as i64
}

fn height(st: &Staircase, mp: &MultiPath, fs: &[Face]) -> i64 {
    fs.iter().map(|f| count_above(st, mp, f)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum RegionSign {
    Plus,
    Minus,
}

/// `α^±_{k,l}`: the faces between two path systems, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaRegion {
    pub sign: RegionSign,
    pub k: usize,
    pub l: usize,
    pub faces: Vec<(usize, i64)>,
    /// Region weight as a linear form over the parameters.
    pub normal: Vec<i64>,
}

impl AlphaRegion {
    pub fn name(&self) -> String {
        let s = if self.sign == RegionSign::Plus { '+' } else { '-' };
        format!("alpha{s}[{},{}]", self.k, self.l)
    }
}

fn extreme(st: &Staircase, fs: &[Face], rows: &[usize], cols: &[usize], lowest: bool) -> Result<MultiPath> {
    let mps = st.net.multipaths(rows, cols)?;
    let key = |mp: &MultiPath| height(st, mp, fs);
    let best = if lowest { mps.iter().min_by_key(|m| key(m)) } else { mps.iter().max_by_key(|m| key(m)) };
    best.cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("no path system from {rows:?} to {cols:?}")))
}

fn between(st: &Staircase, fs: &[Face], upper: &MultiPath, lower: &MultiPath) -> Vec<(usize, i64)> {
    fs.iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let d = count_above(st, upper, f) - count_above(st, lower, f);
            (d != 0).then_some((i, d))
        })
        .collect()
}

/// `α⁺_{k,l}` lies between `γ^(k)_l` and the lowest path system on rows
/// `n−k+1..n−k+l−1, n−k+l+1` and the same sinks; `α⁻_{k,l}` between the
/// highest system on the same sources and sinks `n−l, n−l+2..n` and `γ^(k)_l`.
pub fn alpha_regions(st: &Staircase) -> Result<Vec<AlphaRegion>> {
    let n = st.n();
    let m = st.word.len();
    let fs = faces(st);
    let normals: Vec<Vec<i64>> = fs.iter().map(|f| f.normal(n, m)).collect();
    let combine = |parts: &[(usize, i64)]| {
        let mut v = vec![0i64; m + n];
        for &(i, c) in parts {
            for (x, y) in v.iter_mut().zip(&normals[i]) {
                *x += c * y;
            }
        }
        v
    };
    let mut out = Vec::new();
    for (k, l) in crate::gz::rhombus_labels(n) {
        let gamma = st.delta_multipath(k, l)?;
        let d = MinorSymbol::delta(n, k, l);
        let rows1: Vec<usize> = (n - k + 1..n - k + l).chain(std::iter::once(n - k + l + 1)).collect();
        let l1 = extreme(st, &fs, &rows1, &d.cols, true)?;
        let plus = between(st, &fs, &gamma, &l1);
        out.push(AlphaRegion { sign: RegionSign::Plus, k, l, normal: combine(&plus), faces: plus });
        let cols2: Vec<usize> = std::iter::once(n - l).chain(n - l + 2..=n).collect();
        let l2 = extreme(st, &fs, &d.rows, &cols2, false)?;
        let minus = between(st, &fs, &l2, &gamma);
        out.push(AlphaRegion { sign: RegionSign::Minus, k, l, normal: combine(&minus), faces: minus });
    }
    Ok(out)
}

/// Weight of every face and of every `α^±` region.
pub fn region_weights(st: &Staircase, w: &[Rational]) -> Result<BTreeMap<String, Rational>> {
    let n = st.n();
    let m = st.word.len();
    if w.len() != m + n {
        return Err(Error::DimensionMismatch { expected: m + n, found: w.len() });
    }
    let mut out = BTreeMap::new();
    for f in faces(st) {
        out.insert(f.name(), dot(&f.normal(n, m), w));
    }
    for a in alpha_regions(st)? {
        out.insert(a.name(), dot(&a.normal, w));
    }
    Ok(out)
}

/// `ω > 0` on every `α⁺` and `ω < 0` on every `α⁻`.
pub fn principal_chamber_test(st: &Staircase, w: &[Rational]) -> Result<bool> {
    if w.len() != st.word.len() + st.n() {
        return Err(Error::DimensionMismatch { expected: st.word.len() + st.n(), found: w.len() });
    }
    Ok(alpha_regions(st)?.iter().all(|a| {
        let x = dot(&a.normal, w);
        match a.sign {
            RegionSign::Plus => x.is_positive(),
            RegionSign::Minus => x.is_negative(),
        }
    }))
}

/// The principal chamber as a strict cone over the parameters.
pub fn principal_chamber_cone(st: &Staircase) -> Result<StrictCone> {
    let mut cone = StrictCone::full(st.word.len() + st.n());
    for a in alpha_regions(st)? {
        let v: Vec<i64> = match a.sign {
            RegionSign::Plus => a.normal,
            RegionSign::Minus => a.normal.iter().map(|x| -x).collect(),
        };
        cone.add_normal(&v)?;
    }
    Ok(cone)
}

/// Parameters whose distinguished path systems have weights `ζ`.
pub fn weights_from_zeta(st: &Staircase, zeta: &[Rational]) -> Result<Vec<Rational>> {
    let e = st.delta_exponents()?;
    if zeta.len() != e.len() {
        return Err(Error::DimensionMismatch { expected: e.len(), found: zeta.len() });
    }
    let inv = crate::networks::unimodular_inverse(&e)?;
    Ok(inv.iter().map(|row| dot(row, zeta)).collect())
}

/// Exponent matrix of the distinguished systems, rows `(k, l)`.
pub fn principal_jacobian(st: &Staircase) -> Result<RatMatrix> {
    Ok(matrix::from_ints(&st.delta_exponents()?))
}
