//! Fraction-free sparse Gaussian elimination over ℤ.
//!
//! Rows are sparse integer vectors. Eliminating the leading entry of a row
//! against a pivot row uses only cross-multiplication, after which the row
//! is divided by the gcd of its entries, so every stored row is primitive
//! and no fractions ever appear during elimination. Rationals only enter
//! when a solution is read back.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Rational;

/// Sparse integer row: `(column, value)` pairs sorted by column, no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRow(Vec<(usize, BigInt)>);

impl SparseRow {
    /// Build from rational entries by clearing denominators.
    pub fn from_rationals(entries: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut sorted: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, v) in entries {
            *sorted.entry(c).or_insert_with(Rational::zero) += v;
        }
        let sorted: Vec<(usize, Rational)> = sorted.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let l = sorted.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        let row = sorted
            .into_iter()
            .map(|(c, v)| (c, v.numer() * (&l / v.denom())))
            .collect();
        SparseRow(row).primitive()
    }

    pub fn entries(&self) -> &[(usize, BigInt)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lead(&self) -> Option<(usize, &BigInt)> {
        self.0.first().map(|(c, v)| (*c, v))
    }

    fn primitive(mut self) -> Self {
        let g = self.0.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
        if !g.is_zero() && !g.is_one() {
            for (_, v) in self.0.iter_mut() {
                *v /= &g;
            }
        }
        if self.0.first().map(|(_, v)| v.is_negative()).unwrap_or(false) {
            for (_, v) in self.0.iter_mut() {
                *v = -&*v;
            }
        }
        self
    }

    /// `p·self − q·other`, made primitive.
    fn combine(&self, p: &BigInt, other: &SparseRow, q: &BigInt) -> SparseRow {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ci = self.0.get(i).map(|e| e.0).unwrap_or(usize::MAX);
            let cj = other.0.get(j).map(|e| e.0).unwrap_or(usize::MAX);
            let (c, v) = if ci < cj {
                i += 1;
                (ci, p * &self.0[i - 1].1)
            } else if cj < ci {
                j += 1;
                (cj, -(q * &other.0[j - 1].1))
            } else {
                i += 1;
                j += 1;
                (ci, p * &self.0[i - 1].1 - q * &other.0[j - 1].1)
            };
            if !v.is_zero() {
                out.push((c, v));
            }
        }
        SparseRow(out).primitive()
    }

    /// Dot product with a rational vector indexed by column.
    pub fn dot(&self, x: &dyn Fn(usize) -> Rational) -> Rational {
        self.0
            .iter()
            .map(|(c, v)| x(*c) * Rational::from_integer(v.clone()))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// Row echelon form built incrementally: every stored row has a distinct
/// leading column and no entries left of it.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_rows(&self) -> impl Iterator<Item = (&usize, &SparseRow)> {
        self.pivots.iter()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    /// Reduce `row` by the stored pivots; returns the residual (zero if the
    /// row is in the span).
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        while let Some((c, lead)) = row.lead() {
            match self.pivots.get(&c) {
                Some(p) => {
                    let pl = p.lead().expect("pivot rows are nonzero").1.clone();
                    let rl = lead.clone();
                    let g = pl.gcd(&rl);
                    row = row.combine(&(&pl / &g), p, &(&rl / &g));
                }
                None => break,
            }
        }
        row
    }

    /// Insert a row; returns `true` if the rank grew.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        if let Some(&(c, _)) = row.entries().last() {
            assert!(c < self.ncols, "column {c} out of range");
        }
        let row = self.reduce(row);
        match row.lead() {
            Some((c, _)) => {
                self.pivots.insert(c, row);
                true
            }
            None => false,
        }
    }

    /// Solve the homogeneous system given values for every non-pivot column
    /// at index `>= from`; non-pivot columns not supplied are zero. Pivot
    /// columns `>= from` are determined by back-substitution. Columns below
    /// `from` are ignored unless they are pivots, which are also solved.
    pub fn back_substitute(&self, free: &BTreeMap<usize, Rational>) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ncols];
        for (c, v) in free {
            x[*c] = v.clone();
        }
        for (&c, row) in self.pivots.iter().rev() {
            let lead = Rational::from_integer(row.lead().expect("nonzero").1.clone());
            let rest: Rational = row.entries()[1..]
                .iter()
                .map(|(k, v)| &x[*k] * Rational::from_integer(v.clone()))
                .fold(Rational::zero(), |a, b| a + b);
            x[c] = -rest / lead;
        }
        x
    }
}

/// Reduced row echelon form of a set of rational row vectors (dense),
/// returned as `(pivot column, row)` pairs with pivot entry 1, sorted by
/// pivot. Small dimensions only.
pub fn rref(rows: &[Vec<Rational>]) -> Vec<(usize, Vec<Rational>)> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut out_rows = 0;
    let mut pivots = Vec::new();
    for col in 0..width {
        let Some(p) = (out_rows..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(out_rows, p);
        let inv = m[out_rows][col].recip();
        for v in m[out_rows].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != out_rows && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[out_rows].clone();
                for (a, b) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *a -= &f * b;
                }
            }
        }
        pivots.push(col);
        out_rows += 1;
        if out_rows == m.len() {
            break;
        }
    }
    pivots.into_iter().zip(m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    fn row(v: &[(usize, i64)]) -> SparseRow {
        SparseRow::from_rationals(v.iter().map(|&(c, x)| (c, rat(x))))
    }

    #[test]
    fn rows_are_primitive() {
        let r = SparseRow::from_rationals([(0, ratio(-1, 2)), (3, ratio(3, 4))]);
        assert_eq!(r.entries(), &[(0, BigInt::from(2)), (3, BigInt::from(-3))]);
    }

    #[test]
    fn dependent_rows_do_not_raise_rank() {
        let mut e = Echelon::new(3);
        assert!(e.insert(row(&[(0, 2), (1, 4)])));
        assert!(e.insert(row(&[(1, 1), (2, 1)])));
        assert!(!e.insert(row(&[(0, 1), (1, 3), (2, 1)])));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn back_substitution_solves_kernel() {
        // x0 + x1 + x2 = 0, x1 - 2 x2 = 0 with x2 = 1.
        let mut e = Echelon::new(3);
        e.insert(row(&[(0, 1), (1, 1), (2, 1)]));
        e.insert(row(&[(1, 1), (2, -2)]));
        let free = BTreeMap::from([(2, rat(1))]);
        let x = e.back_substitute(&free);
        assert_eq!(x, vec![rat(-3), rat(2), rat(1)]);
        for (_, r) in e.pivot_rows() {
            assert!(r.dot(&|c| x[c].clone()).is_zero());
        }
    }

    #[test]
    fn rref_is_canonical() {
        let a = vec![vec![rat(2), rat(4), rat(0)], vec![rat(1), rat(2), rat(1)]];
        let b = vec![vec![rat(0), rat(0), rat(3)], vec![rat(1), rat(2), rat(0)]];
        assert_eq!(rref(&a), rref(&b));
        assert_eq!(rref(&a)[0], (0, vec![rat(1), rat(2), rat(0)]));
    }
}
