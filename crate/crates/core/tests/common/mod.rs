//! Reference computations for the acceptance suite. Everything here works on
//! plain vectors and is written without calling into the library, so that
//! library results can be checked against it.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Row-major `n × n` multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub n: usize,
    pub t: Vec<usize>,
}

impl Table {
    pub fn from_rows(rows: &[Vec<usize>]) -> Table {
        Table {
            n: rows.len(),
            t: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn m(&self, a: usize, b: usize) -> usize {
        self.t[a * self.n + b]
    }

    pub fn identity(&self) -> usize {
        (0..self.n)
            .find(|&e| (0..self.n).all(|x| self.m(e, x) == x && self.m(x, e) == x))
            .expect("table has an identity")
    }

    pub fn inverse(&self, a: usize) -> usize {
        let e = self.identity();
        (0..self.n).find(|&b| self.m(a, b) == e).expect("right inverse exists")
    }

    pub fn associates(&self, a: usize, b: usize, c: usize) -> bool {
        self.m(self.m(a, b), c) == self.m(a, self.m(b, c))
    }

    pub fn is_associative(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.associates(a, b, c))))
    }

    pub fn center(&self) -> Vec<usize> {
        let n = self.n;
        (0..n)
            .filter(|&z| {
                (0..n).all(|x| self.m(x, z) == self.m(z, x))
                    && (0..n).all(|x| {
                        (0..n).all(|y| {
                            self.associates(z, x, y) && self.associates(x, z, y) && self.associates(x, y, z)
                        })
                    })
            })
            .collect()
    }

    pub fn left_nucleus(&self) -> Vec<usize> {
        let n = self.n;
        (0..n)
            .filter(|&z| (0..n).all(|x| (0..n).all(|y| self.associates(z, x, y))))
            .collect()
    }

    pub fn middle_nucleus(&self) -> Vec<usize> {
        let n = self.n;
        (0..n)
            .filter(|&z| (0..n).all(|x| (0..n).all(|y| self.associates(x, z, y))))
            .collect()
    }

    pub fn right_nucleus(&self) -> Vec<usize> {
        let n = self.n;
        (0..n)
            .filter(|&z| (0..n).all(|x| (0..n).all(|y| self.associates(x, y, z))))
            .collect()
    }
}

/// Chein–Goodaire: a triple that associates in one order associates in every
/// order, and a non-associating triple has `(uv)w = u(wv) = v(uw)`.
pub fn ra_oracle(l: &Table) -> bool {
    let n = l.n;
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                let orders = [(u, v, w), (u, w, v), (v, u, w), (v, w, u), (w, u, v), (w, v, u)];
                let assoc: Vec<bool> = orders.iter().map(|&(a, b, c)| l.associates(a, b, c)).collect();
                if assoc.iter().any(|&x| x) {
                    if !assoc.iter().all(|&x| x) {
                        return false;
                    }
                } else {
                    let lhs = l.m(l.m(u, v), w);
                    if lhs != l.m(u, l.m(w, v)) || lhs != l.m(v, l.m(u, w)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `{u(vw), v(uw)} = {(uv)w, (vu)w}` as multisets.
pub fn c_assoc_holds(l: &Table, u: usize, v: usize, w: usize) -> bool {
    let mut a = [l.m(u, l.m(v, w)), l.m(v, l.m(u, w))];
    let mut b = [l.m(l.m(u, v), w), l.m(l.m(v, u), w)];
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Colors of the rainbow of left translations: cell `(x, y)` gets the `a`
/// with `a·x = y`.
pub fn translation_colors(l: &Table) -> Vec<usize> {
    let n = l.n;
    let mut colors = vec![usize::MAX; n * n];
    for a in 0..n {
        for x in 0..n {
            colors[x * n + l.m(a, x)] = a;
        }
    }
    colors
}

/// Whether two colorings of `n × n` induce the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ab: HashMap<usize, usize> = HashMap::new();
    let mut ba: HashMap<usize, usize> = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

/// Whether every class of `fine` lies inside a class of `coarse`.
pub fn refines(fine: &[usize], coarse: &[usize]) -> bool {
    let mut map: HashMap<usize, usize> = HashMap::new();
    fine.iter().zip(coarse).all(|(&f, &c)| *map.entry(f).or_insert(c) == c)
}

fn rank_of(colors: &[usize]) -> usize {
    let mut seen: Vec<usize> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Counts of colored 2-paths between the ends of every cell, compared within
/// each class. Returns the tensor `(i, j, t) -> count` when constant.
/// With `jordan`, the key is the unordered pair and the count is
/// `p^t_{i,j} + p^t_{j,i}`.
pub fn intersection_oracle(n: usize, colors: &[usize], jordan: bool) -> Option<BTreeMap<(usize, usize, usize), u64>> {
    let mut by_class: HashMap<usize, BTreeMap<(usize, usize), u64>> = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
            for g in 0..n {
                let (i, j) = (colors[a * n + g], colors[g * n + b]);
                if jordan {
                    // a path colored (i, j) counts once towards p_{i,j} + p_{j,i}, twice when i = j
                    *counts.entry((i.min(j), i.max(j))).or_default() += if i == j { 2 } else { 1 };
                } else {
                    *counts.entry((i, j)).or_default() += 1;
                }
            }
            let t = colors[a * n + b];
            match by_class.get(&t) {
                None => {
                    by_class.insert(t, counts);
                }
                Some(prev) if *prev == counts => {}
                Some(_) => return None,
            }
        }
    }
    let mut out = BTreeMap::new();
    for (t, counts) in by_class {
        for ((i, j), c) in counts {
            out.insert((i, j, t), c);
        }
    }
    Some(out)
}

pub fn is_homogeneous(n: usize, colors: &[usize]) -> bool {
    let d = colors[0];
    (0..n).all(|a| colors[a * n + a] == d) && (0..n * n).all(|c| c / n == c % n || colors[c] != d)
}

pub fn is_jordan_scheme(n: usize, colors: &[usize]) -> bool {
    is_homogeneous(n, colors) && intersection_oracle(n, colors, true).is_some()
}

/// Matrices as dense integer vectors.
pub fn indicator(n: usize, colors: &[usize], c: usize) -> Vec<i64> {
    (0..n * n).map(|i| i64::from(colors[i] == c)).collect()
}

pub fn matmul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

pub fn to_rationals(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

/// Whether the span of the class indicators is closed under the ordinary
/// (`jordan == false`) or the Jordan product, by exact linear solves.
pub fn span_closed(n: usize, colors: &[usize], jordan: bool) -> bool {
    let mut classes: Vec<usize> = colors.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let basis: Vec<Vec<i64>> = classes.iter().map(|&c| indicator(n, colors, c)).collect();
    let solver = LinearSystem::new(&basis.iter().map(|b| to_rationals(b)).collect::<Vec<_>>());
    for i in 0..basis.len() {
        let start = if jordan { i } else { 0 };
        for j in start..basis.len() {
            let mut p = matmul(n, &basis[i], &basis[j]);
            if jordan {
                let q = matmul(n, &basis[j], &basis[i]);
                for (x, y) in p.iter_mut().zip(q) {
                    *x += y;
                }
            }
            if solver.solve(&to_rationals(&p)).is_none() {
                return false;
            }
        }
    }
    true
}

/// Solves `Σ c_k b_k = t` exactly for a fixed family of vectors `b_k`.
///
/// Gaussian elimination on the columns `b_k` picks pivot coordinates once;
/// each target is then solved on the pivot coordinates and checked on all.
pub struct LinearSystem {
    basis: Vec<Vec<BigRational>>,
    pivot_rows: Vec<usize>,
    /// Inverse of the square system restricted to the pivot coordinates.
    inverse: Vec<Vec<BigRational>>,
}

impl LinearSystem {
    pub fn new(basis: &[Vec<BigRational>]) -> LinearSystem {
        let k = basis.len();
        let len = basis.first().map_or(0, Vec::len);
        // elimination on the len × k matrix M with M[r][c] = basis[c][r]
        let mut m: Vec<Vec<BigRational>> = (0..len).map(|r| (0..k).map(|c| basis[c][r].clone()).collect()).collect();
        let mut pivot_rows = Vec::with_capacity(k);
        let mut used = vec![false; len];
        for col in 0..k {
            let p = (0..len)
                .find(|&r| !used[r] && !m[r][col].is_zero())
                .expect("basis vectors are linearly independent");
            used[p] = true;
            pivot_rows.push(p);
            let pivot = m[p].clone();
            for r in 0..len {
                if r != p && !m[r][col].is_zero() {
                    let f = &m[r][col] / &pivot[col];
                    for (x, y) in m[r].iter_mut().zip(&pivot) {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        // square system S[i][c] = basis[c][pivot_rows[i]]; invert by Gauss–Jordan
        let mut s: Vec<Vec<BigRational>> = pivot_rows
            .iter()
            .map(|&r| (0..k).map(|c| basis[c][r].clone()).collect())
            .collect();
        let mut inv: Vec<Vec<BigRational>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        for col in 0..k {
            let p = (col..k).find(|&r| !s[r][col].is_zero()).expect("pivot minor is invertible");
            s.swap(col, p);
            inv.swap(col, p);
            let f = BigRational::one() / s[col][col].clone();
            for x in s[col].iter_mut() {
                *x = &*x * &f;
            }
            for x in inv[col].iter_mut() {
                *x = &*x * &f;
            }
            for r in 0..k {
                if r != col && !s[r][col].is_zero() {
                    let g = s[r][col].clone();
                    let (srow, irow) = (s[col].clone(), inv[col].clone());
                    for (x, y) in s[r].iter_mut().zip(&srow) {
                        *x = &*x - &(&g * y);
                    }
                    for (x, y) in inv[r].iter_mut().zip(&irow) {
                        *x = &*x - &(&g * y);
                    }
                }
            }
        }
        LinearSystem {
            basis: basis.to_vec(),
            pivot_rows,
            inverse: inv,
        }
    }

    pub fn solve(&self, target: &[BigRational]) -> Option<Vec<BigRational>> {
        let k = self.basis.len();
        let rhs: Vec<&BigRational> = self.pivot_rows.iter().map(|&r| &target[r]).collect();
        let c: Vec<BigRational> = (0..k)
            .map(|i| {
                self.inverse[i]
                    .iter()
                    .zip(&rhs)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * *b)
                    .sum()
            })
            .collect();
        for (r, t) in target.iter().enumerate() {
            let v: BigRational = self
                .basis
                .iter()
                .zip(&c)
                .filter(|(b, _)| !b[r].is_zero())
                .map(|(b, x)| &b[r] * x)
                .sum();
            if &v != t {
                return None;
            }
        }
        Some(c)
    }
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// All permutations commuting with each generator, by exhaustion.
pub fn centralizer_brute(n: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    all_permutations(n)
        .into_iter()
        .filter(|c| gens.iter().all(|g| (0..n).all(|x| c[g[x]] == g[c[x]])))
        .collect()
}

/// Orbits of a permutation group on ordered pairs, as a coloring of `n × n`.
pub fn two_orbits(n: usize, gens: &[Vec<usize>]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n * n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for g in gens {
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (find(&mut parent, a * n + b), find(&mut parent, g[a] * n + g[b]));
                if x != y {
                    parent[x] = y;
                }
            }
        }
    }
    (0..n * n).map(|c| find(&mut parent, c)).collect()
}

pub fn class_sizes(colors: &[usize]) -> Vec<usize> {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &c in colors {
        *counts.entry(c).or_default() += 1;
    }
    let mut v: Vec<usize> = counts.into_values().collect();
    v.sort_unstable();
    v
}

pub fn rank(colors: &[usize]) -> usize {
    rank_of(colors)
}

/// `J(G)` from its definition: fibres `0..n` and `n..2n`, blocks
/// `[A 0; 0 A]`, `[0 C; 0 0]`, `[0 0; D 0]` with `A, C, D` translations.
pub fn jcal_oracle(g: &Table) -> Vec<usize> {
    let n = g.n;
    let m = 2 * n;
    // the translation carrying x to y
    let mut tr = vec![0usize; n * n];
    for a in 0..n {
        for x in 0..n {
            tr[x * n + g.m(a, x)] = a;
        }
    }
    let mut colors = vec![0usize; m * m];
    for p in 0..m {
        for q in 0..m {
            let (fp, fq) = (p / n, q / n);
            let a = tr[(p % n) * n + q % n];
            let block = match (fp, fq) {
                (0, 0) | (1, 1) => 0,
                (0, 1) => 1,
                _ => 2,
            };
            colors[p * m + q] = block * n + a;
        }
    }
    colors
}

/// Abelian invariants (prime powers, ascending) from element orders: in the
/// `p`-part, `#{x : x^(p^i) = e} = p^(s_i)` and `s_i − s_(i−1)` counts the
/// cyclic factors of order at least `p^i`.
pub fn abelian_invariants_oracle(g: &Table) -> Vec<usize> {
    let n = g.n;
    let e = g.identity();
    let orders: Vec<usize> = (0..n)
        .map(|x| {
            let (mut y, mut k) = (x, 1);
            while y != e {
                y = g.m(y, x);
                k += 1;
            }
            k
        })
        .collect();
    let log = |mut v: usize, p: usize| {
        let mut k = 0;
        while v > 1 {
            assert_eq!(v % p, 0);
            v /= p;
            k += 1;
        }
        k
    };
    let mut out = Vec::new();
    let (mut m, mut p) = (n, 2);
    while m > 1 {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            // s[i] = log_p #{x of p-power order dividing p^i}
            let mut s = vec![0usize];
            let mut q = p;
            loop {
                let c = orders.iter().filter(|&&o| q % o == 0).count();
                let si = log(c, p);
                if si == *s.last().expect("non-empty") {
                    break;
                }
                s.push(si);
                q *= p;
            }
            let at_least: Vec<usize> = s.windows(2).map(|w| w[1] - w[0]).collect();
            for i in (0..at_least.len()).rev() {
                let next = at_least.get(i + 1).copied().unwrap_or(0);
                for _ in 0..at_least[i] - next {
                    out.push(p.pow(i as u32 + 1));
                }
            }
        }
        p += 1;
    }
    out.sort_unstable();
    out
}
