//! Square matrices over ℚ with arbitrary precision.
//!
//! Entries are kept as big-integer numerators over one shared positive
//! denominator; products then stay in integer arithmetic and only the final
//! result is reduced.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::relations::Relation;

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix({}x{}) [", self.n, self.n)?;
        for a in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|b| self.entry(a, b).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        ExactMatrix {
            n,
            num: vec![BigInt::zero(); n * n],
            den: BigInt::one(),
        }
    }

    /// `I_Ω`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for a in 0..n {
            m.num[a * n + a] = BigInt::one();
        }
        m
    }

    /// `J_Ω`, the all-ones matrix.
    pub fn all_ones(n: usize) -> Self {
        ExactMatrix {
            n,
            num: vec![BigInt::one(); n * n],
            den: BigInt::one(),
        }
    }

    /// Row-major integer entries. Panics unless `entries.len() == n * n`.
    pub fn from_integers(n: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        ExactMatrix {
            n,
            num: entries.iter().map(|&e| BigInt::from(e)).collect(),
            den: BigInt::one(),
        }
    }

    /// Row-major rational entries. Panics unless `entries.len() == n * n`.
    pub fn from_rationals(n: usize, entries: &[BigRational]) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        let den = entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let num = entries
            .iter()
            .map(|e| e.numer() * (&den / e.denom()))
            .collect();
        ExactMatrix { n, num, den }.reduced()
    }

    /// The adjacency (0/1) matrix of a relation.
    pub fn from_relation(r: &Relation) -> Self {
        let n = r.size();
        let mut m = Self::zeros(n);
        for (a, b) in r.pairs() {
            m.num[a * n + b] = BigInt::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, a: usize, b: usize) -> BigRational {
        BigRational::new(self.num[a * self.n + b].clone(), self.den.clone())
    }

    /// All entries row-major.
    pub fn entries(&self) -> Vec<BigRational> {
        (0..self.n * self.n)
            .map(|i| BigRational::new(self.num[i].clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    fn reduced(mut self) -> Self {
        let g = self
            .num
            .iter()
            .fold(self.den.clone(), |acc, x| acc.gcd(x));
        if !g.is_one() && !g.is_zero() {
            for x in &mut self.num {
                *x /= &g;
            }
            self.den /= &g;
        }
        if self.den.is_negative() {
            self.den = -self.den;
            for x in &mut self.num {
                *x = -&*x;
            }
        }
        self
    }

    fn same_size(&self, other: &ExactMatrix) {
        assert_eq!(self.n, other.n, "matrix size mismatch");
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        self.same_size(other);
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(x, y)| x * &fa + y * &fb)
            .collect();
        ExactMatrix { n: self.n, num, den }.reduced()
    }

    pub fn sub(&self, other: &ExactMatrix) -> ExactMatrix {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> ExactMatrix {
        ExactMatrix {
            n: self.n,
            num: self.num.iter().map(|x| x * c.numer()).collect(),
            den: &self.den * c.denom(),
        }
        .reduced()
    }

    /// Ordinary matrix product.
    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        self.same_size(other);
        let n = self.n;
        let mut num = vec![BigInt::zero(); n * n];
        for a in 0..n {
            for k in 0..n {
                let x = &self.num[a * n + k];
                if x.is_zero() {
                    continue;
                }
                for b in 0..n {
                    let y = &other.num[k * n + b];
                    if !y.is_zero() {
                        num[a * n + b] += x * y;
                    }
                }
            }
        }
        ExactMatrix {
            n,
            num,
            den: &self.den * &other.den,
        }
        .reduced()
    }

    /// `A ⋆ B = ½(AB + BA)`.
    pub fn jordan(&self, other: &ExactMatrix) -> ExactMatrix {
        let s = self.mul(other).add(&other.mul(self));
        s.scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Entrywise (Schur–Hadamard) product.
    pub fn hadamard(&self, other: &ExactMatrix) -> ExactMatrix {
        self.same_size(other);
        ExactMatrix {
            n: self.n,
            num: self.num.iter().zip(&other.num).map(|(x, y)| x * y).collect(),
            den: &self.den * &other.den,
        }
        .reduced()
    }

    pub fn transpose(&self) -> ExactMatrix {
        let n = self.n;
        let mut num = vec![BigInt::zero(); n * n];
        for a in 0..n {
            for b in 0..n {
                num[b * n + a] = self.num[a * n + b].clone();
            }
        }
        ExactMatrix {
            n,
            num,
            den: self.den.clone(),
        }
    }
}

/// Coefficients `c` with `target = Σ c_i basis_i`, by Gaussian elimination
/// over ℚ on the `n² × k` system. `None` when `target` is outside the span.
///
/// This works for arbitrary (not necessarily disjointly supported) spanning
/// sets; when the basis is linearly dependent an arbitrary solution is
/// returned with free coefficients set to zero.
pub fn solve_in_span(basis: &[ExactMatrix], target: &ExactMatrix) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let cells = target.size() * target.size();
    for m in basis {
        target.same_size(m);
    }
    // augmented rows: one per cell, k coefficients + rhs
    let mut rows: Vec<Vec<BigRational>> = (0..cells)
        .map(|cell| {
            let mut row: Vec<BigRational> = basis
                .iter()
                .map(|m| BigRational::new(m.num[cell].clone(), m.den.clone()))
                .collect();
            row.push(BigRational::new(target.num[cell].clone(), target.den.clone()));
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..=k {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut coeffs = vec![BigRational::zero(); k];
    for (i, &col) in pivots.iter().enumerate() {
        coeffs[col] = rows[i][k].clone();
    }
    Some(coeffs)
}
