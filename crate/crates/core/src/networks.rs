//! Planar networks, path-system minors and the staircase chart of the
//! upper triangular group.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{GaussianRational, LaurentPoly, Monomial, Rational, VarRegistry};
use crate::error::{Error, Result};
use crate::groups::{delta_name, delta_registry};
use crate::rmatrix::{solid_labels, MinorSymbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Slanted,
}

/// A vertex at `(line, column)`; lines are numbered from the top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    /// Weight label; `None` means weight 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

/// Acyclic network drawn between a source line on the left and a sink line
/// on the right, with `n` sources and `n` sinks numbered from the top.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarNetwork {
    pub n: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

/// One source-to-sink path as a list of edge indices.
pub type Path = Vec<usize>;

/// Vertex-disjoint paths joining `sources[i]` to `sinks[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPath {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub paths: Vec<Path>,
}

impl MultiPath {
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.paths.iter().flatten().copied()
    }
}

struct PathInfo {
    edges: Path,
    mask: u128,
}

impl PlanarNetwork {
    /// Network of a word in the elementary factors: letter `a` at position
    /// `p` is a slanted edge from line `a` down to line `a + 1`. Every line
    /// ends in a horizontal segment carrying its diagonal weight.
    pub fn from_word(n: usize, word: &[usize], slanted: &[String], diagonal: &[String]) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("a network needs at least one line".into()));
        }
        if slanted.len() != word.len() || diagonal.len() != n {
            return Err(Error::InvalidArgument("one weight label per slanted edge and per line".into()));
        }
        if let Some(&a) = word.iter().find(|&&a| a < 1 || a >= n) {
            return Err(Error::InvalidArgument(format!("letter {a} is out of range for {n} lines")));
        }
        let m = word.len();
        let mut vertices = Vec::new();
        let mut on_line: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        let mut sources = Vec::with_capacity(n);
        for line in 1..=n {
            sources.push(vertices.len());
            on_line[line].push(vertices.len());
            vertices.push(Vertex { line, column: 0 });
        }
        let mut edges = Vec::new();
        for (p, &a) in word.iter().enumerate() {
            let out = vertices.len();
            vertices.push(Vertex { line: a, column: 2 * p + 1 });
            let inn = vertices.len();
            vertices.push(Vertex { line: a + 1, column: 2 * p + 2 });
            on_line[a].push(out);
            on_line[a + 1].push(inn);
            edges.push(Edge { from: out, to: inn, kind: EdgeKind::Slanted, weight: Some(slanted[p].clone()) });
        }
        let mut sinks = Vec::with_capacity(n);
        for line in 1..=n {
            sinks.push(vertices.len());
            on_line[line].push(vertices.len());
            vertices.push(Vertex { line, column: 2 * m + 2 });
        }
        for line in 1..=n {
            let vs = &on_line[line];
            for w in vs.windows(2) {
                let last = w[1] == sinks[line - 1];
                edges.push(Edge {
                    from: w[0],
                    to: w[1],
                    kind: EdgeKind::Horizontal,
                    weight: if last { Some(diagonal[line - 1].clone()) } else { None },
                });
            }
        }
        let net = Self { n, vertices, edges, sources, sinks };
        net.validate()?;
        Ok(net)
    }

    /// Checks sources, sinks and that every edge moves strictly rightwards.
    pub fn validate(&self) -> Result<()> {
        if self.sources.len() != self.n || self.sinks.len() != self.n {
            return Err(Error::InvalidArgument(format!("expected {} sources and sinks", self.n)));
        }
        if self.vertices.len() > 128 {
            return Err(Error::InvalidArgument("networks are limited to 128 vertices".into()));
        }
        for e in &self.edges {
            let (Some(a), Some(b)) = (self.vertices.get(e.from), self.vertices.get(e.to)) else {
                return Err(Error::InvalidArgument("edge refers to a missing vertex".into()));
            };
            if b.column <= a.column {
                return Err(Error::InvalidArgument(format!(
                    "edge {} -> {} does not move rightwards",
                    e.from, e.to
                )));
            }
        }
        Ok(())
    }

    /// Distinct weight labels in first-appearance order.
    pub fn weight_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.edges {
            if let Some(w) = &e.weight {
                if !out.contains(w) {
                    out.push(w.clone());
                }
            }
        }
        out
    }

    /// Registry with one positive variable per weight label and the
    /// matching symbolic weighting.
    pub fn symbolic_weighting(&self) -> (Arc<VarRegistry>, Vec<LaurentPoly>) {
        let labels = self.weight_labels();
        let reg = Arc::new(VarRegistry::real(&labels).expect("weight labels are unique"));
        let w = self
            .edges
            .iter()
            .map(|e| match &e.weight {
                Some(name) => LaurentPoly::var(&reg, reg.index_of(name).unwrap()),
                None => LaurentPoly::one(&reg),
            })
            .collect();
        (reg, w)
    }

    /// Weighting by numeric values per label; unlabeled edges get 1.
    pub fn numeric_weighting(
        &self,
        reg: &Arc<VarRegistry>,
        values: &HashMap<String, GaussianRational>,
    ) -> Result<Vec<LaurentPoly>> {
        self.edges
            .iter()
            .map(|e| match &e.weight {
                Some(name) => values
                    .get(name)
                    .map(|v| LaurentPoly::constant(reg, v.clone()))
                    .ok_or_else(|| Error::UnknownVariable(name.clone())),
                None => Ok(LaurentPoly::one(reg)),
            })
            .collect()
    }

    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.from].push(i);
        }
        out
    }

    fn paths_between(&self, out: &[Vec<usize>], from: usize, to: usize) -> Vec<PathInfo> {
        let mut found = Vec::new();
        let mut stack = vec![(from, Vec::new(), 1u128 << from)];
        while let Some((v, edges, mask)) = stack.pop() {
            if v == to {
                found.push(PathInfo { edges, mask });
                continue;
            }
            for &e in &out[v] {
                let w = self.edges[e].to;
                let mut next = edges.clone();
                next.push(e);
                stack.push((w, next, mask | (1u128 << w)));
            }
        }
        found
    }

    /// All vertex-disjoint path systems from sources `rows` to sinks `cols`
    /// (1-based labels, paired in increasing order).
    pub fn multipaths(&self, rows: &[usize], cols: &[usize]) -> Result<Vec<MultiPath>> {
        if rows.len() != cols.len() {
            return Err(Error::SizeMismatch { rows: rows.len(), cols: cols.len() });
        }
        if rows.iter().chain(cols).any(|&x| x < 1 || x > self.n) {
            return Err(Error::InvalidArgument(format!("labels must lie in 1..={}", self.n)));
        }
        let out = self.out_edges();
        let per_pair: Vec<Vec<PathInfo>> = rows
            .iter()
            .zip(cols)
            .map(|(&i, &j)| self.paths_between(&out, self.sources[i - 1], self.sinks[j - 1]))
            .collect();
        let mut result = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        fn rec(
            per_pair: &[Vec<PathInfo>],
            depth: usize,
            used: u128,
            chosen: &mut Vec<usize>,
            result: &mut Vec<Vec<usize>>,
        ) {
            if depth == per_pair.len() {
                result.push(chosen.clone());
                return;
            }
            for (idx, p) in per_pair[depth].iter().enumerate() {
                if p.mask & used == 0 {
                    chosen.push(idx);
                    rec(per_pair, depth + 1, used | p.mask, chosen, result);
                    chosen.pop();
                }
            }
        }
        let mut picks = Vec::new();
        rec(&per_pair, 0, 0, &mut chosen, &mut picks);
        for pick in picks {
            result.push(MultiPath {
                sources: rows.to_vec(),
                sinks: cols.to_vec(),
                paths: pick.iter().enumerate().map(|(d, &i)| per_pair[d][i].edges.clone()).collect(),
            });
        }
        Ok(result)
    }

    /// `M_{ij}` = sum over paths from source `i` to sink `j` of weight products.
    pub fn matrix(&self, w: &[LaurentPoly]) -> Result<Vec<Vec<LaurentPoly>>> {
        let reg = self.weighting_registry(w)?;
        let out = self.out_edges();
        let mut m = vec![vec![LaurentPoly::zero(&reg); self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                for p in self.paths_between(&out, self.sources[i], self.sinks[j]) {
                    m[i][j] = &m[i][j] + &product(&reg, w, &p.edges);
                }
            }
        }
        Ok(m)
    }

    /// Minor on sources `rows`, sinks `cols` as a sum over path systems.
    pub fn minor_lindstrom(&self, w: &[LaurentPoly], rows: &[usize], cols: &[usize]) -> Result<LaurentPoly> {
        let reg = self.weighting_registry(w)?;
        let mut acc = LaurentPoly::zero(&reg);
        for mp in self.multipaths(rows, cols)? {
            let edges: Vec<usize> = mp.edges().collect();
            acc = &acc + &product(&reg, w, &edges);
        }
        Ok(acc)
    }

    /// Max-plus minor: the largest total weight of a path system, `None`
    /// when there is none.
    pub fn tropical_minor(&self, w: &[Rational], rows: &[usize], cols: &[usize]) -> Result<Option<Rational>> {
        Ok(self
            .multipaths(rows, cols)?
            .iter()
            .map(|mp| mp.edges().map(|e| w[e].clone()).sum::<Rational>())
            .max())
    }

    fn weighting_registry(&self, w: &[LaurentPoly]) -> Result<Arc<VarRegistry>> {
        if w.len() != self.edges.len() {
            return Err(Error::DimensionMismatch { expected: self.edges.len(), found: w.len() });
        }
        match w.first() {
            Some(p) => Ok(p.registry().clone()),
            None => Ok(Arc::new(VarRegistry::real::<&str>(&[]).unwrap())),
        }
    }
}

fn product(reg: &Arc<VarRegistry>, w: &[LaurentPoly], edges: &[usize]) -> LaurentPoly {
    let mut acc = LaurentPoly::one(reg);
    for &e in edges {
        acc = &acc * &w[e];
    }
    acc
}

/// Letters of the staircase word: `1`, then `1 2 1`, then `1 2 1 3 2 1`, ...
pub fn staircase_word(n: usize) -> Vec<usize> {
    let mut word = Vec::new();
    for top in 1..n {
        word.extend((1..=top).rev());
    }
    word
}

/// The staircase network `Γ_s(n)` with slanted weights `w{p}` (position `p`,
/// 1-based) and diagonal weights `d{i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Staircase {
    pub net: PlanarNetwork,
    pub word: Vec<usize>,
    /// Edge index of the slanted edge at each word position.
    pub slanted: Vec<usize>,
    /// Edge index of the diagonal segment of each line.
    pub diagonal: Vec<usize>,
}

impl Staircase {
    pub fn new(n: usize) -> Result<Self> {
        let word = staircase_word(n);
        let slanted_names: Vec<String> = (1..=word.len()).map(|p| format!("w{p}")).collect();
        let diag_names: Vec<String> = (1..=n).map(|i| format!("d{i}")).collect();
        let net = PlanarNetwork::from_word(n, &word, &slanted_names, &diag_names)?;
        let find = |name: &str| net.edges.iter().position(|e| e.weight.as_deref() == Some(name)).unwrap();
        let slanted = slanted_names.iter().map(|s| find(s)).collect();
        let diagonal = diag_names.iter().map(|s| find(s)).collect();
        Ok(Self { net, word, slanted, diagonal })
    }

    pub fn n(&self) -> usize {
        self.net.n
    }

    /// Parameters in the order slanted edges by position, then diagonals.
    pub fn parameter_edges(&self) -> Vec<usize> {
        self.slanted.iter().chain(&self.diagonal).copied().collect()
    }

    /// Spreads one value per parameter over all edges (unlabeled edges 0).
    pub fn edge_values(&self, params: &[Rational]) -> Vec<Rational> {
        let mut w = vec![Rational::zero(); self.net.edges.len()];
        for (e, v) in self.parameter_edges().into_iter().zip(params) {
            w[e] = v.clone();
        }
        w
    }

    /// Exponent matrix of the solid minors in the weights: row `(k, l)`,
    /// column as in [`Staircase::parameter_edges`]. Errors unless every solid
    /// minor is a single path system.
    pub fn delta_exponents(&self) -> Result<Vec<Vec<i64>>> {
        let n = self.n();
        let params = self.parameter_edges();
        let mut rows = Vec::new();
        for (k, l) in solid_labels(n) {
            let d = MinorSymbol::delta(n, k, l);
            let mps = self.net.multipaths(&d.rows, &d.cols)?;
            if mps.len() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "{} has {} path systems, expected exactly one",
                    delta_name(k, l),
                    mps.len()
                )));
            }
            let mut row = vec![0i64; params.len()];
            for e in mps[0].edges() {
                if let Some(c) = params.iter().position(|&x| x == e) {
                    row[c] += 1;
                }
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// The distinguished path system of `Δ^(k)_l`.
    pub fn delta_multipath(&self, k: usize, l: usize) -> Result<MultiPath> {
        let d = MinorSymbol::delta(self.n(), k, l);
        let mut mps = self.net.multipaths(&d.rows, &d.cols)?;
        if mps.len() != 1 {
            return Err(Error::InvalidArgument(format!("{} is not a single path system", delta_name(k, l))));
        }
        Ok(mps.remove(0))
    }
}

/// Inverse of a square integer matrix, required to be integral.
pub fn unimodular_inverse(m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|&x| Rational::from_integer(x.into())).collect();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or_else(|| Error::InvalidArgument("exponent matrix is singular".into()))?;
        a.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &piv;
        }
        let prow = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.into_iter()
        .map(|row| {
            row[n..]
                .iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer().try_into().map_err(|_| Error::InvalidArgument("entry too large".into()))?)
                    } else {
                        Err(Error::InvalidArgument("exponent matrix is not unimodular".into()))
                    }
                })
                .collect()
        })
        .collect()
}

/// Solved weight: label, coefficient and monomial in the solid minors.
#[derive(Clone, Debug, PartialEq)]
pub struct SolvedWeight {
    pub label: String,
    pub coeff: GaussianRational,
    pub monomial: Monomial,
}

/// Expresses every weight of `Γ_s(n)` as a Laurent monomial in the solid
/// minors, over [`delta_registry`]`(n)`.
pub fn solve_weights_from_deltas(n: usize) -> Result<Vec<SolvedWeight>> {
    let st = Staircase::new(n)?;
    solve_on(&st)
}

fn solve_on(st: &Staircase) -> Result<Vec<SolvedWeight>> {
    let e = st.delta_exponents()?;
    let inv = unimodular_inverse(&e)?;
    let params = st.parameter_edges();
    Ok(params
        .iter()
        .enumerate()
        .map(|(j, &edge)| SolvedWeight {
            label: st.net.edges[edge].weight.clone().unwrap(),
            coeff: GaussianRational::one(),
            monomial: Monomial::from_exponents(inv[j].iter().map(|&x| x as i32).collect()),
        })
        .collect())
}

/// Minors of the upper triangular group as Laurent polynomials in the solid
/// minors, through the staircase network.
#[derive(Clone, Debug)]
pub struct DeltaChart {
    pub staircase: Staircase,
    pub deltas: Arc<VarRegistry>,
    weight_registry: Arc<VarRegistry>,
    weights: Vec<LaurentPoly>,
    substitution: Vec<SolvedWeight>,
}

impl DeltaChart {
    pub fn new(n: usize) -> Result<Self> {
        let staircase = Staircase::new(n)?;
        let substitution = solve_on(&staircase)?;
        let (weight_registry, weights) = staircase.net.symbolic_weighting();
        Ok(Self { staircase, deltas: Arc::new(delta_registry(n)), weight_registry, weights, substitution })
    }

    pub fn n(&self) -> usize {
        self.staircase.n()
    }

    pub fn weights(&self) -> &[SolvedWeight] {
        &self.substitution
    }

    /// Minor `g_{IJ}` as a Laurent polynomial in the solid minors.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<LaurentPoly> {
        let in_weights = self.staircase.net.minor_lindstrom(&self.weights, rows, cols)?;
        let mut out = LaurentPoly::zero(&self.deltas);
        let monos: Vec<&Monomial> = self
            .weight_registry
            .vars()
            .iter()
            .map(|v| &self.substitution.iter().find(|s| s.label == v.name).unwrap().monomial)
            .collect();
        for (m, c) in in_weights.terms() {
            let mut e = Monomial::unit(self.deltas.len());
            for (idx, &x) in m.exponents().iter().enumerate() {
                if x != 0 {
                    e = e.mul(&monos[idx].pow(x));
                }
            }
            out.add_term(e, c);
        }
        Ok(out)
    }
}

/// Integer grading `Σ rows − Σ cols` of a minor.
pub fn grading(rows: &[usize], cols: &[usize]) -> i64 {
    rows.iter().map(|&x| x as i64).sum::<i64>() - cols.iter().map(|&x| x as i64).sum::<i64>()
}

/// Largest absolute exponent appearing in a polynomial; used by callers
/// that bound evaluation ranges.
pub fn max_abs_exponent(p: &LaurentPoly) -> i32 {
    p.support().flat_map(|m| m.exponents().iter().map(|x| x.abs())).max().unwrap_or(0)
}

/// Whether all edges of a rational weighting are nonnegative.
pub fn is_nonnegative(w: &[Rational]) -> bool {
    w.iter().all(|x| !x.is_negative())
}
