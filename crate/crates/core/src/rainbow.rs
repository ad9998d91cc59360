//! Rainbows: partitions of `Ω × Ω` whose diagonal is a union of classes and
//! whose class set is closed under transposition.
//!
//! A [`ColorMatrix`] carries the partition as an `n × n` matrix of color
//! indices `0..rank`. Validation keeps the caller's labels; [`ColorMatrix::canonical`]
//! renumbers colors diagonal-first, then by the first cell in row-major order.

use std::collections::HashMap;

use num_rational::{BigRational, Ratio};
use thiserror::Error;

pub use crate::exact::ExactMatrix;
use crate::relations::{PointSet, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RainbowError {
    #[error("NotAPartition: {0}")]
    NotAPartition(String),
    #[error("DiagonalNotUnionOfClasses: color {color} meets both the diagonal and cell ({row}, {col})")]
    DiagonalNotUnionOfClasses { color: usize, row: usize, col: usize },
    #[error("NotTransposeClosed: the transpose of color {color} is not a single class")]
    NotTransposeClosed { color: usize },
    #[error("DimensionMismatch: expected {expected} points, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("OrderTooLarge: order {order} exceeds the search bound {bound}")]
    OrderTooLarge { order: usize, bound: usize },
}

/// A validated rainbow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColorMatrix {
    n: usize,
    colors: Vec<usize>,
    rank: usize,
    diagonal_colors: Vec<usize>,
    transpose_map: Vec<usize>,
    class_sizes: Vec<usize>,
}

/// Rows of color indices, e.g. `[[0, 1], [2, 0]]`.
pub fn validate_rainbow(rows: &[Vec<usize>]) -> Result<ColorMatrix, RainbowError> {
    let n = rows.len();
    if n == 0 {
        return Err(RainbowError::NotAPartition("empty matrix".into()));
    }
    let mut colors = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(RainbowError::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        colors.extend_from_slice(row);
    }
    ColorMatrix::from_colors(n, colors)
}

impl ColorMatrix {
    /// Validates a row-major color vector; labels are kept as given.
    pub fn from_colors(n: usize, colors: Vec<usize>) -> Result<Self, RainbowError> {
        if n == 0 {
            return Err(RainbowError::NotAPartition("empty matrix".into()));
        }
        if colors.len() != n * n {
            return Err(RainbowError::DimensionMismatch {
                expected: n * n,
                found: colors.len(),
            });
        }
        let rank = colors.iter().max().map_or(0, |&m| m + 1);
        let mut class_sizes = vec![0usize; rank];
        for &c in &colors {
            class_sizes[c] += 1;
        }
        if let Some(c) = class_sizes.iter().position(|&s| s == 0) {
            return Err(RainbowError::NotAPartition(format!(
                "color {c} is unused but {} occurs",
                rank - 1
            )));
        }

        // axiom (a): diagonal is a union of classes
        let mut on_diagonal = vec![false; rank];
        for a in 0..n {
            on_diagonal[colors[a * n + a]] = true;
        }
        for a in 0..n {
            for b in 0..n {
                let c = colors[a * n + b];
                if a != b && on_diagonal[c] {
                    return Err(RainbowError::DiagonalNotUnionOfClasses {
                        color: c,
                        row: a,
                        col: b,
                    });
                }
            }
        }

        // axiom (b): the transpose of each class is a class
        let mut transpose_map = vec![usize::MAX; rank];
        for a in 0..n {
            for b in 0..n {
                let c = colors[a * n + b];
                let t = colors[b * n + a];
                if transpose_map[c] == usize::MAX {
                    transpose_map[c] = t;
                } else if transpose_map[c] != t {
                    return Err(RainbowError::NotTransposeClosed { color: c });
                }
            }
        }
        for c in 0..rank {
            if transpose_map[transpose_map[c]] != c
                || class_sizes[transpose_map[c]] != class_sizes[c]
            {
                return Err(RainbowError::NotTransposeClosed { color: c });
            }
        }

        let diagonal_colors = (0..rank).filter(|&c| on_diagonal[c]).collect();
        Ok(ColorMatrix {
            n,
            colors,
            rank,
            diagonal_colors,
            transpose_map,
            class_sizes,
        })
    }

    /// Builds a canonical rainbow from arbitrary cell labels (equal label ⇔
    /// same class). The labels must already describe a rainbow.
    pub fn from_labels<L>(n: usize, labels: &[L]) -> Result<Self, RainbowError>
    where
        L: std::hash::Hash + Eq,
    {
        let mut ids: HashMap<&L, usize> = HashMap::new();
        let dense: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Ok(Self::from_colors(n, dense)?.canonical())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> PointSet {
        PointSet::new(self.n).expect("non-empty")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn color(&self, a: usize, b: usize) -> usize {
        self.colors[a * self.n + b]
    }

    /// Row-major colors.
    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.colors.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn diagonal_colors(&self) -> &[usize] {
        &self.diagonal_colors
    }

    pub fn is_diagonal_color(&self, c: usize) -> bool {
        self.diagonal_colors.binary_search(&c).is_ok()
    }

    pub fn transpose_map(&self) -> &[usize] {
        &self.transpose_map
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.class_sizes[c]
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    /// The basic relation with color `c`.
    pub fn class(&self, c: usize) -> Relation {
        Relation::from_pairs(self.domain(), self.class_cells(c)).expect("cells in range")
    }

    pub fn classes(&self) -> Vec<Relation> {
        let mut cells = vec![Vec::new(); self.rank];
        for (i, &c) in self.colors.iter().enumerate() {
            cells[c].push((i / self.n, i % self.n));
        }
        cells
            .into_iter()
            .map(|cs| Relation::from_pairs(self.domain(), cs).expect("cells in range"))
            .collect()
    }

    pub fn class_cells(&self, c: usize) -> Vec<(usize, usize)> {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == c)
            .map(|(i, _)| (i / self.n, i % self.n))
            .collect()
    }

    /// 0/1 adjacency matrix of class `c`.
    pub fn indicator(&self, c: usize) -> ExactMatrix {
        let entries: Vec<i64> = self.colors.iter().map(|&x| i64::from(x == c)).collect();
        ExactMatrix::from_integers(self.n, &entries)
    }

    /// `Σ coeffs[c] · und(s_c)`. Panics unless `coeffs.len() == rank`.
    pub fn combination(&self, coeffs: &[BigRational]) -> ExactMatrix {
        assert_eq!(coeffs.len(), self.rank, "one coefficient per color");
        let entries: Vec<BigRational> = self.colors.iter().map(|&c| coeffs[c].clone()).collect();
        ExactMatrix::from_rationals(self.n, &entries)
    }

    /// Colors renumbered diagonal-first, then by first cell in row-major order.
    pub fn canonical(&self) -> ColorMatrix {
        let n = self.n;
        let mut relabel = vec![usize::MAX; self.rank];
        let mut next = 0;
        let diagonal_cells = (0..n).map(|a| a * n + a);
        for i in diagonal_cells.chain(0..n * n) {
            let c = self.colors[i];
            if relabel[c] == usize::MAX {
                relabel[c] = next;
                next += 1;
            }
        }
        let colors = self.colors.iter().map(|&c| relabel[c]).collect();
        ColorMatrix::from_colors(n, colors).expect("relabelling preserves rainbow axioms")
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Equality of the underlying partitions, ignoring color labels.
    pub fn same_partition(&self, other: &ColorMatrix) -> bool {
        self.n == other.n && self.canonical().colors == other.canonical().colors
    }

    /// The image under the point map `a ↦ perm[a]`: the result colors
    /// `(perm[a], perm[b])` like `(a, b)`.
    pub fn relabel_points(&self, perm: &[usize]) -> ColorMatrix {
        assert_eq!(perm.len(), self.n, "permutation size");
        let n = self.n;
        let mut colors = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                colors[perm[a] * n + perm[b]] = self.colors[a * n + b];
            }
        }
        ColorMatrix::from_colors(n, colors).expect("point relabelling preserves rainbow axioms")
    }

    /// Out-degree of every class at every point: `degree[c][a] = |s_c a|`.
    fn degrees(&self) -> Vec<Vec<usize>> {
        let mut deg = vec![vec![0usize; self.n]; self.rank];
        for (i, &c) in self.colors.iter().enumerate() {
            deg[c][i / self.n] += 1;
        }
        deg
    }

    /// `Some(valency)` for each regular class.
    pub fn valencies(&self) -> Vec<Option<usize>> {
        self.degrees()
            .into_iter()
            .map(|d| d.iter().all(|&x| x == d[0]).then_some(d[0]))
            .collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.diagonal_colors.len() == 1
    }

    pub fn is_regular(&self) -> bool {
        self.valencies().iter().all(Option::is_some)
    }

    pub fn is_thin(&self) -> bool {
        let deg = self.degrees();
        (0..self.rank).all(|c| {
            let t = self.transpose_map[c];
            deg[c].iter().all(|&x| x <= 1) && deg[t].iter().all(|&x| x <= 1)
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose_map.iter().enumerate().all(|(c, &t)| c == t)
    }
}

/// Coarsest rainbow on which every generator (and `I`, `J`) is constant, made
/// transpose-closed by one extra refinement by the transposed colors.
pub fn standard_basis(domain: PointSet, mats: &[ExactMatrix]) -> Result<ColorMatrix, RainbowError> {
    let n = domain.size();
    let mut labels: Vec<usize> = (0..n * n).map(|i| usize::from(i / n != i % n)).collect();
    for m in mats {
        if m.size() != n {
            return Err(RainbowError::DimensionMismatch {
                expected: n,
                found: m.size(),
            });
        }
        let mut ids: HashMap<(usize, BigRational), usize> = HashMap::new();
        let entries = m.entries();
        labels = labels
            .iter()
            .zip(entries)
            .map(|(&l, e)| {
                let next = ids.len();
                *ids.entry((l, e)).or_insert(next)
            })
            .collect();
    }
    let closed: Vec<(usize, usize)> = (0..n * n)
        .map(|i| (labels[i], labels[(i % n) * n + i / n]))
        .collect();
    ColorMatrix::from_labels(n, &closed)
}

/// Every class of `coarse` is a union of classes of `fine`.
pub fn is_fusion_of(coarse: &ColorMatrix, fine: &ColorMatrix) -> Result<bool, RainbowError> {
    if coarse.n != fine.n {
        return Err(RainbowError::DimensionMismatch {
            expected: coarse.n,
            found: fine.n,
        });
    }
    let mut image = vec![usize::MAX; fine.rank];
    for (&f, &c) in fine.colors.iter().zip(&coarse.colors) {
        if image[f] == usize::MAX {
            image[f] = c;
        } else if image[f] != c {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RainbowClass {
    pub homogeneous: bool,
    pub regular: bool,
    pub thin: bool,
    pub symmetric: bool,
    pub rank: usize,
    pub order: usize,
    /// `rank / order`, reduced.
    pub ratio: Ratio<u64>,
}

pub fn classify_rainbow(cm: &ColorMatrix) -> RainbowClass {
    RainbowClass {
        homogeneous: cm.is_homogeneous(),
        regular: cm.is_regular(),
        thin: cm.is_thin(),
        symmetric: cm.is_symmetric(),
        rank: cm.rank,
        order: cm.n,
        ratio: Ratio::new(cm.rank as u64, cm.n as u64),
    }
}

pub const DEFAULT_ISOMORPHISM_BOUND: usize = 8;

/// Lexicographically least point bijection `f` with `f(S) = S'`, if any.
///
/// Color labels need not agree; the search maintains a partial bijection of
/// colors alongside the point map and prunes on per-point color profiles.
pub fn combinatorial_isomorphism(
    a: &ColorMatrix,
    b: &ColorMatrix,
    bound: usize,
) -> Result<Option<Vec<usize>>, RainbowError> {
    let n = a.n;
    if n > bound || b.n > bound {
        return Err(RainbowError::OrderTooLarge {
            order: n.max(b.n),
            bound,
        });
    }
    if a.n != b.n || a.rank != b.rank {
        return Ok(None);
    }
    let mut sizes_a = a.class_sizes.clone();
    let mut sizes_b = b.class_sizes.clone();
    sizes_a.sort_unstable();
    sizes_b.sort_unstable();
    if sizes_a != sizes_b {
        return Ok(None);
    }

    let profile = |cm: &ColorMatrix, p: usize| -> Vec<(usize, usize, usize)> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for q in 0..cm.n {
            *counts.entry(cm.color(p, q)).or_default() += 1;
        }
        let mut prof: Vec<_> = counts
            .into_iter()
            .map(|(c, k)| (k, cm.class_sizes[c], usize::from(cm.is_diagonal_color(c))))
            .collect();
        prof.sort_unstable();
        prof
    };
    let prof_a: Vec<_> = (0..n).map(|p| profile(a, p)).collect();
    let prof_b: Vec<_> = (0..n).map(|p| profile(b, p)).collect();

    struct Search<'s> {
        a: &'s ColorMatrix,
        b: &'s ColorMatrix,
        prof_a: &'s [Vec<(usize, usize, usize)>],
        prof_b: &'s [Vec<(usize, usize, usize)>],
        map: Vec<usize>,
        used: Vec<bool>,
        fwd: Vec<usize>,
        back: Vec<usize>,
    }

    impl Search<'_> {
        fn bind(&mut self, ca: usize, cb: usize, trail: &mut Vec<usize>) -> bool {
            match (self.fwd[ca], self.back[cb]) {
                (x, y) if x == usize::MAX && y == usize::MAX => {
                    self.fwd[ca] = cb;
                    self.back[cb] = ca;
                    trail.push(ca);
                    true
                }
                (x, _) => x == cb,
            }
        }

        fn unbind(&mut self, trail: &[usize]) {
            for &ca in trail {
                let cb = self.fwd[ca];
                self.fwd[ca] = usize::MAX;
                self.back[cb] = usize::MAX;
            }
        }

        fn go(&mut self, p: usize) -> bool {
            let n = self.a.n;
            if p == n {
                return true;
            }
            for img in 0..n {
                if self.used[img] || self.prof_a[p] != self.prof_b[img] {
                    continue;
                }
                let mut trail = Vec::new();
                let mut ok = true;
                self.map[p] = img;
                for q in 0..=p {
                    let iq = self.map[q];
                    if !self.bind(self.a.color(p, q), self.b.color(img, iq), &mut trail)
                        || !self.bind(self.a.color(q, p), self.b.color(iq, img), &mut trail)
                    {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    self.used[img] = true;
                    if self.go(p + 1) {
                        return true;
                    }
                    self.used[img] = false;
                }
                self.unbind(&trail);
            }
            false
        }
    }

    let mut s = Search {
        a,
        b,
        prof_a: &prof_a,
        prof_b: &prof_b,
        map: vec![0; n],
        used: vec![false; n],
        fwd: vec![usize::MAX; a.rank],
        back: vec![usize::MAX; b.rank],
    };
    Ok(s.go(0).then_some(s.map))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Thin scheme of `Z_n`: color of `(a, b)` is `b - a mod n`.
    pub(crate) fn thin_cyclic(n: usize) -> ColorMatrix {
        let colors = (0..n * n).map(|i| (i % n + n - i / n) % n).collect();
        ColorMatrix::from_colors(n, colors).unwrap()
    }

    /// Thin scheme of `Z_2^k`: color of `(a, b)` is `a xor b`.
    pub(crate) fn thin_elementary(k: u32) -> ColorMatrix {
        let n = 1usize << k;
        let colors = (0..n * n).map(|i| (i / n) ^ (i % n)).collect();
        ColorMatrix::from_colors(n, colors).unwrap()
    }

    fn trivial(n: usize) -> ColorMatrix {
        let colors = (0..n * n).map(|i| usize::from(i / n != i % n)).collect();
        ColorMatrix::from_colors(n, colors).unwrap()
    }

    #[test]
    fn validate_examples() {
        let t = validate_rainbow(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(t.rank(), 2);
        assert_eq!(t.diagonal_colors(), &[0]);

        let ex = validate_rainbow(&[vec![0, 1], vec![2, 0]]).unwrap();
        assert_eq!(ex.rank(), 3);
        assert_eq!(ex.transpose_map(), &[0, 2, 1]);

        assert_eq!(
            validate_rainbow(&[vec![0, 1], vec![0, 1]]),
            Err(RainbowError::DiagonalNotUnionOfClasses {
                color: 1,
                row: 0,
                col: 1
            })
        );
        assert!(matches!(
            validate_rainbow(&[vec![0, 2], vec![2, 0]]),
            Err(RainbowError::NotAPartition(_))
        ));
        // (0,1) and (0,2) share color 1 but their transposes differ
        assert_eq!(
            validate_rainbow(&[vec![0, 1, 1], vec![2, 0, 3], vec![3, 2, 0]]),
            Err(RainbowError::NotTransposeClosed { color: 1 })
        );
        assert!(matches!(
            validate_rainbow(&[vec![0, 1], vec![1]]),
            Err(RainbowError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn standard_basis_examples() {
        let d3 = PointSet::new(3).unwrap();
        let t = standard_basis(d3, &[]).unwrap();
        assert_eq!(t.rank(), 2);
        assert_eq!(t, trivial(3));

        let d2 = PointSet::new(2).unwrap();
        let gens = [
            ExactMatrix::identity(2),
            ExactMatrix::from_integers(2, &[0, 1, 0, 0]),
            ExactMatrix::from_integers(2, &[0, 0, 1, 0]),
        ];
        let ex = standard_basis(d2, &gens).unwrap();
        assert_eq!(ex.rows(), vec![vec![0, 1], vec![2, 0]]);

        let units: Vec<ExactMatrix> = (0..9)
            .map(|i| {
                let mut e = vec![0; 9];
                e[i] = 1;
                ExactMatrix::from_integers(3, &e)
            })
            .collect();
        assert_eq!(standard_basis(d3, &units).unwrap().rank(), 9);
        assert!(matches!(
            standard_basis(d3, &[ExactMatrix::identity(2)]),
            Err(RainbowError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn standard_basis_adds_transpose_closure() {
        // a directed 3-cycle is not symmetric; its level sets are already
        // transpose closed
        let c = ExactMatrix::from_integers(3, &[0, 1, 0, 0, 0, 1, 1, 0, 0]);
        let cm = standard_basis(PointSet::new(3).unwrap(), &[c]).unwrap();
        assert!(cm.same_partition(&thin_cyclic(3)));
        // a single arc needs the extra step: {(0,1)} and {(1,0)} split
        let arc = ExactMatrix::from_integers(3, &[0, 1, 0, 0, 0, 0, 0, 0, 0]);
        let cm = standard_basis(PointSet::new(3).unwrap(), &[arc]).unwrap();
        assert_eq!(cm.rank(), 4);
    }

    #[test]
    fn fusion_examples() {
        let z5 = thin_cyclic(5);
        assert!(is_fusion_of(&trivial(5), &z5).unwrap());
        assert!(is_fusion_of(&z5, &z5).unwrap());
        assert!(!is_fusion_of(&z5, &trivial(5)).unwrap());
        let sym3 = ColorMatrix::from_colors(3, vec![0, 1, 1, 1, 0, 1, 1, 1, 0]).unwrap();
        assert!(is_fusion_of(&sym3, &thin_cyclic(3)).unwrap());
        assert!(is_fusion_of(&z5, &thin_cyclic(4)).is_err());
    }

    #[test]
    fn classify_examples() {
        let z5 = classify_rainbow(&thin_cyclic(5));
        assert!(z5.homogeneous && z5.regular && z5.thin && !z5.symmetric);
        assert_eq!(z5.ratio, Ratio::new(1, 1));

        let ex = classify_rainbow(&validate_rainbow(&[vec![0, 1], vec![2, 0]]).unwrap());
        assert!(ex.homogeneous && !ex.regular && ex.thin);
        assert_eq!(ex.ratio, Ratio::new(3, 2));

        let t4 = classify_rainbow(&trivial(4));
        assert!(t4.homogeneous && t4.regular && t4.symmetric && !t4.thin);
        assert_eq!(t4.ratio, Ratio::new(1, 2));
    }

    #[test]
    fn isomorphism_examples() {
        let z4 = thin_cyclic(4);
        assert_eq!(
            combinatorial_isomorphism(&z4, &z4, 8).unwrap(),
            Some(vec![0, 1, 2, 3])
        );
        // Z4 has an element of order 4, Z2^2 does not: all 24 bijections fail
        assert_eq!(
            combinatorial_isomorphism(&z4, &thin_elementary(2), 8).unwrap(),
            None
        );
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z6 = thin_cyclic(6);
        let mut perm: Vec<usize> = (0..6).collect();
        perm.shuffle(&mut rng);
        let moved = z6.relabel_points(&perm);
        let f = combinatorial_isomorphism(&z6, &moved, 8).unwrap().unwrap();
        assert!(z6.relabel_points(&f).same_partition(&moved));
        assert!(matches!(
            combinatorial_isomorphism(&thin_cyclic(9), &thin_cyclic(9), 8),
            Err(RainbowError::OrderTooLarge { .. })
        ));
        assert!(combinatorial_isomorphism(&thin_cyclic(9), &thin_cyclic(9), 9)
            .unwrap()
            .is_some());
    }

    #[test]
    fn canonical_numbering() {
        let cm = ColorMatrix::from_colors(2, vec![2, 0, 1, 2]).unwrap();
        assert!(!cm.is_canonical());
        assert_eq!(cm.canonical().rows(), vec![vec![0, 1], vec![2, 0]]);
        // diagonal colors first even when an off-diagonal cell comes earlier
        let cm = ColorMatrix::from_colors(2, vec![1, 0, 0, 2]).unwrap();
        assert_eq!(cm.canonical().rows(), vec![vec![0, 2], vec![2, 1]]);
    }

    #[test]
    fn combination_reassembles_entries() {
        let cm = thin_cyclic(3);
        let coeffs: Vec<BigRational> = (1..=3)
            .map(|k| BigRational::new(BigInt::from(k), BigInt::from(2)))
            .collect();
        let m = cm.combination(&coeffs);
        assert_eq!(m.entry(0, 1), coeffs[1]);
        assert_eq!(m.entry(2, 1), coeffs[2]);
        let sum = (0..3).fold(ExactMatrix::zeros(3), |acc, c| acc.add(&cm.indicator(c)));
        assert_eq!(sum, ExactMatrix::all_ones(3));
    }

    pub(crate) fn random_rainbow_strategy(n: usize, max_colors: usize) -> impl Strategy<Value = ColorMatrix> {
        proptest::collection::vec(0..max_colors, n * n).prop_map(move |raw| {
            let gens = [ExactMatrix::from_integers(
                n,
                &raw.iter().map(|&x| x as i64).collect::<Vec<_>>(),
            )];
            standard_basis(PointSet::new(n).unwrap(), &gens).unwrap()
        })
    }

    proptest! {
        #[test]
        fn validate_round_trips(cm in random_rainbow_strategy(5, 4)) {
            prop_assert_eq!(validate_rainbow(&cm.rows()).unwrap(), cm);
        }

        #[test]
        fn standard_basis_is_idempotent(cm in random_rainbow_strategy(5, 3)) {
            let gens: Vec<ExactMatrix> = (0..cm.rank()).map(|c| cm.indicator(c)).collect();
            let again = standard_basis(cm.domain(), &gens).unwrap();
            prop_assert_eq!(again, cm);
        }

        #[test]
        fn generators_are_constant_on_classes(raw in proptest::collection::vec(0i64..3, 16)) {
            let m = ExactMatrix::from_integers(4, &raw);
            let cm = standard_basis(PointSet::new(4).unwrap(), &[m]).unwrap();
            for c in 0..cm.rank() {
                let cells = cm.class_cells(c);
                let v = raw[cells[0].0 * 4 + cells[0].1];
                prop_assert!(cells.iter().all(|&(a, b)| raw[a * 4 + b] == v));
            }
        }

        #[test]
        fn fusion_is_transitive(cm in random_rainbow_strategy(4, 3)) {
            let t = trivial(4);
            let fine = standard_basis(cm.domain(), &(0..16).map(|i| {
                let mut e = vec![0; 16];
                e[i] = 1;
                ExactMatrix::from_integers(4, &e)
            }).collect::<Vec<_>>()).unwrap();
            prop_assert!(is_fusion_of(&t, &cm).unwrap());
            prop_assert!(is_fusion_of(&cm, &fine).unwrap());
            prop_assert!(is_fusion_of(&t, &fine).unwrap());
        }

        #[test]
        fn regular_implies_homogeneous(cm in random_rainbow_strategy(4, 3)) {
            let k = classify_rainbow(&cm);
            prop_assert!(!k.regular || k.homogeneous);
        }
    }
}
