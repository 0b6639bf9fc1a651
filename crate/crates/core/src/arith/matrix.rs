//! Small exact linear algebra over the rationals.

use num_traits::{One, Zero};

use super::Rational;

pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> RatMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

pub fn from_ints(m: &[Vec<i64>]) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect()
}

pub fn transpose(m: &[Vec<Rational>]) -> RatMatrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn scale(a: &[Vec<Rational>], c: &Rational) -> RatMatrix {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(a: &mut RatMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = &*x / &piv;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(a: &[Vec<Rational>]) -> usize {
    let mut m = a.to_vec();
    echelon(&mut m).len()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(a: &[Vec<Rational>]) -> Option<RatMatrix> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = echelon(&mut m);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn inverse_and_rank() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(mul(&a, &inv), identity(2));
        assert_eq!(rank(&a), 2);
        let s = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(rank(&s), 1);
        assert!(inverse(&s).is_none());
        assert_eq!(inverse(&[vec![int(4)]]).unwrap(), vec![vec![rat(1, 4)]]);
    }
}
