//! Binary relations on a finite point set `0..n`.
//!
//! A [`Relation`] is stored as a dense row-major bit matrix (one run of
//! `u64` words per row), so products and transposes are word operations.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("DomainMismatch: relations live on {left} and {right} points")]
    DomainMismatch { left: usize, right: usize },
    #[error("PointOutOfRange: point {point} on a domain of {size} points")]
    PointOutOfRange { point: usize, size: usize },
    #[error("EmptyDomain: a point set needs at least one point")]
    EmptyDomain,
}

/// The point set `Ω = {0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(usize);

impl PointSet {
    pub fn new(size: usize) -> Result<Self, RelationError> {
        if size == 0 {
            return Err(RelationError::EmptyDomain);
        }
        Ok(PointSet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn points(self) -> std::ops::Range<usize> {
        0..self.0
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("n", &self.n)
            .field("pairs", &self.pairs().collect::<Vec<_>>())
            .finish()
    }
}

impl Relation {
    pub fn empty(domain: PointSet) -> Self {
        let n = domain.size();
        let words = n.div_ceil(64);
        Relation {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    /// The diagonal `1_Ω`.
    pub fn identity(domain: PointSet) -> Self {
        let mut r = Self::empty(domain);
        for a in domain.points() {
            r.set(a, a);
        }
        r
    }

    /// `Ω × Ω`.
    pub fn full(domain: PointSet) -> Self {
        let mut r = Self::empty(domain);
        for a in domain.points() {
            for b in domain.points() {
                r.set(a, b);
            }
        }
        r
    }

    pub fn from_pairs<I>(domain: PointSet, pairs: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = Self::empty(domain);
        for (a, b) in pairs {
            r.check_point(a)?;
            r.check_point(b)?;
            r.set(a, b);
        }
        Ok(r)
    }

    /// The graph `{(x, f(x))}` of a map given as an image vector.
    pub fn from_map(images: &[usize]) -> Result<Self, RelationError> {
        let domain = PointSet::new(images.len())?;
        Self::from_pairs(domain, images.iter().copied().enumerate())
    }

    pub fn domain(&self) -> PointSet {
        PointSet(self.n)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn check_point(&self, p: usize) -> Result<(), RelationError> {
        if p >= self.n {
            Err(RelationError::PointOutOfRange {
                point: p,
                size: self.n,
            })
        } else {
            Ok(())
        }
    }

    fn check_domain(&self, other: &Relation) -> Result<(), RelationError> {
        if self.n != other.n {
            Err(RelationError::DomainMismatch {
                left: self.n,
                right: other.n,
            })
        } else {
            Ok(())
        }
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    fn set(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1u64 << (b % 64);
    }

    /// Panics if a point is out of range.
    pub fn contains(&self, a: usize, b: usize) -> bool {
        assert!(a < self.n && b < self.n, "point out of range");
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.row_points(a).map(move |b| (a, b)))
    }

    fn row_points(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(a).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }

    pub fn transpose(&self) -> Relation {
        let mut t = Relation::empty(self.domain());
        for (a, b) in self.pairs() {
            t.set(b, a);
        }
        t
    }

    /// `ab = {(α, γ) | ∃β: (α, β) ∈ a, (β, γ) ∈ b}`.
    pub fn product(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.check_domain(other)?;
        let mut out = Relation::empty(self.domain());
        for a in 0..self.n {
            for mid in self.row_points(a) {
                let src = other.row(mid);
                let dst = &mut out.bits[a * self.words..(a + 1) * self.words];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d |= *s;
                }
            }
        }
        Ok(out)
    }

    /// `a ⋆ b = ab ∪ ba`.
    pub fn jordan_union_product(&self, other: &Relation) -> Result<Relation, RelationError> {
        let ab = self.product(other)?;
        let ba = other.product(self)?;
        Ok(ab.union(&ba))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.n, other.n, "domain mismatch");
        Relation {
            n: self.n,
            words: self.words,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        assert_eq!(self.n, other.n, "domain mismatch");
        Relation {
            n: self.n,
            words: self.words,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        }
    }

    /// The `r`-neighbourhood `{β | (ω, β) ∈ r}` in increasing order.
    pub fn neighborhood(&self, point: usize) -> Result<Vec<usize>, RelationError> {
        self.check_point(point)?;
        Ok(self.row_points(point).collect())
    }

    fn out_degree(&self, a: usize) -> usize {
        self.row(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The common out-degree when it does not depend on the point.
    pub fn is_regular(&self) -> Option<usize> {
        let first = self.out_degree(0);
        (1..self.n)
            .all(|a| self.out_degree(a) == first)
            .then_some(first)
    }

    /// Every row and every column holds at most one pair.
    pub fn is_thin(&self) -> bool {
        let mut col_seen = vec![false; self.n];
        for (a, b) in self.pairs() {
            if self.out_degree(a) > 1 || col_seen[b] {
                return false;
            }
            col_seen[b] = true;
        }
        true
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    /// The image vector when the relation is a bijection of `Ω`.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if self.len() != self.n || !self.is_thin() {
            return None;
        }
        let mut images = vec![usize::MAX; self.n];
        for (a, b) in self.pairs() {
            images[a] = b;
        }
        images.iter().all(|&b| b != usize::MAX).then_some(images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(n: usize) -> PointSet {
        PointSet::new(n).unwrap()
    }

    fn cycle(n: usize, step: usize) -> Relation {
        Relation::from_pairs(pts(n), (0..n).map(|i| (i, (i + step) % n))).unwrap()
    }

    #[test]
    fn transpose_examples() {
        let r = Relation::from_pairs(pts(2), [(0, 1)]).unwrap();
        assert_eq!(r.transpose(), Relation::from_pairs(pts(2), [(1, 0)]).unwrap());
        assert_eq!(Relation::identity(pts(4)).transpose(), Relation::identity(pts(4)));
        assert_eq!(cycle(5, 1).transpose(), cycle(5, 4));
    }

    #[test]
    fn product_examples() {
        let c3 = cycle(3, 1);
        let any = Relation::from_pairs(pts(3), [(0, 2), (1, 1)]).unwrap();
        assert_eq!(Relation::identity(pts(3)).product(&any).unwrap(), any);
        // enumerated by hand: (i, i+1) then (i+1, i+2)
        assert_eq!(c3.product(&c3).unwrap(), cycle(3, 2));
        assert_eq!(c3.product(&c3).unwrap(), c3.transpose());
        let e = Relation::from_pairs(pts(2), [(0, 1)]).unwrap();
        assert!(e.product(&e).unwrap().is_empty());
        assert_eq!(
            c3.product(&cycle(4, 1)),
            Err(RelationError::DomainMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn jordan_union_examples() {
        let id = Relation::identity(pts(3));
        assert_eq!(id.jordan_union_product(&id).unwrap(), id);
        let a = Relation::from_pairs(pts(2), [(0, 1)]).unwrap();
        let b = Relation::from_pairs(pts(2), [(1, 0)]).unwrap();
        assert_eq!(a.jordan_union_product(&b).unwrap(), Relation::identity(pts(2)));
        let c5 = cycle(5, 1);
        assert_eq!(
            c5.jordan_union_product(&c5.transpose()).unwrap(),
            Relation::identity(pts(5))
        );
    }

    #[test]
    fn neighborhood_and_regularity() {
        assert_eq!(Relation::identity(pts(4)).neighborhood(2).unwrap(), vec![2]);
        assert_eq!(cycle(5, 1).neighborhood(0).unwrap(), vec![1]);
        assert_eq!(Relation::full(pts(3)).neighborhood(1).unwrap(), vec![0, 1, 2]);
        assert_eq!(
            cycle(5, 1).neighborhood(5),
            Err(RelationError::PointOutOfRange { point: 5, size: 5 })
        );
        assert_eq!(cycle(5, 1).is_regular(), Some(1));
        assert_eq!(Relation::from_pairs(pts(3), [(0, 1)]).unwrap().is_regular(), None);
        assert_eq!(Relation::full(pts(6)).is_regular(), Some(6));
    }

    #[test]
    fn thinness() {
        assert!(cycle(7, 3).is_thin());
        assert!(!Relation::from_pairs(pts(3), [(0, 1), (0, 2)]).unwrap().is_thin());
        assert!(!Relation::from_pairs(pts(3), [(0, 2), (1, 2)]).unwrap().is_thin());
        assert!(Relation::empty(pts(3)).is_thin());
    }

    #[test]
    fn wide_domain_uses_several_words() {
        let c = cycle(130, 1);
        assert_eq!(c.len(), 130);
        assert_eq!(c.neighborhood(129).unwrap(), vec![0]);
        assert_eq!(c.product(&c.transpose()).unwrap(), Relation::identity(pts(130)));
    }

    fn relation_strategy(n: usize) -> impl Strategy<Value = Relation> {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let pairs = bits
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| (i / n, i % n));
            Relation::from_pairs(PointSet::new(n).unwrap(), pairs).unwrap()
        })
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Relation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|p| Relation::from_map(&p).unwrap())
    }

    proptest! {
        #[test]
        fn transpose_is_involutive(r in relation_strategy(6)) {
            prop_assert_eq!(r.transpose().transpose(), r);
        }

        #[test]
        fn product_is_associative(
            a in relation_strategy(5),
            b in relation_strategy(5),
            c in relation_strategy(5),
        ) {
            let left = a.product(&b).unwrap().product(&c).unwrap();
            let right = a.product(&b.product(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn jordan_union_commutes(a in relation_strategy(5), b in relation_strategy(5)) {
            prop_assert_eq!(
                a.jordan_union_product(&b).unwrap(),
                b.jordan_union_product(&a).unwrap()
            );
        }

        #[test]
        fn permutation_inverse_is_transpose(p in perm_strategy(7)) {
            prop_assert_eq!(p.is_regular(), Some(1));
            prop_assert!(p.as_permutation().is_some());
            let id = Relation::identity(p.domain());
            prop_assert_eq!(p.product(&p.transpose()).unwrap(), id.clone());
            prop_assert_eq!(p.transpose().product(&p).unwrap(), id);
        }

        #[test]
        fn valency_one_means_permutation(r in relation_strategy(4)) {
            if r.is_regular() == Some(1) && r.transpose().is_regular() == Some(1) {
                prop_assert!(r.as_permutation().is_some());
            }
        }
    }
}
