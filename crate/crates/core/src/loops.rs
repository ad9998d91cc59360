//! Finite loops given by Cayley tables.
//!
//! Covers the translation identities and nuclei, the ◊ loop carried by a thin
//! regular Jordan scheme, the RA test, the doubled loops `L(G,*,g0)`, and the
//! correspondence between RA loops and thin regular Jordan schemes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::closures::ClosureKind;
use crate::perm::{self, Perm};
use crate::rainbow::ColorMatrix;
use crate::schemes::{intersection_numbers, SchemeRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("SyntaxError: empty table")]
    EmptyTable,
    #[error("SyntaxError: row {row} has {found} entries, expected {expected}")]
    RaggedTable {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("NotLatinSquare: entry {value} at ({row}, {col}) is out of range or repeated")]
    NotLatinSquare { row: usize, col: usize, value: usize },
    #[error("NoTwoSidedIdentity: no element is both a left and a right identity")]
    NoTwoSidedIdentity,
    #[error("NotAGroup: the table is not associative")]
    NotAGroup,
    #[error("QuotientNotKleinFour: {0}")]
    QuotientNotKleinFour(String),
    #[error("G0NotCentral: element {0} is not central")]
    G0NotCentral(usize),
    #[error("ElementOutOfRange: element {element} in a loop of order {order}")]
    ElementOutOfRange { element: usize, order: usize },
    #[error("NotRegularThinJS: {0}")]
    NotRegularThinJS(String),
    #[error("OrderTooLarge: order {order} exceeds the bound {bound}")]
    OrderTooLarge { order: usize, bound: usize },
    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),
}

/// A loop on `0..n` with identity `0`, stored row-major: `table[a * n + b] = a ◊ b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CayleyTable {
    n: usize,
    table: Vec<usize>,
}

/// A validated loop together with the point swap applied to move the
/// identity to `0`, if one was needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedLoop {
    pub table: CayleyTable,
    /// `relabel[old] = new`.
    pub relabel: Option<Perm>,
}

pub fn loop_from_table(rows: &[Vec<usize>]) -> Result<NormalizedLoop, LoopError> {
    let n = rows.len();
    if n == 0 {
        return Err(LoopError::EmptyTable);
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(LoopError::RaggedTable {
                row,
                found: r.len(),
                expected: n,
            });
        }
    }
    for a in 0..n {
        let mut row_seen = vec![false; n];
        let mut col_seen = vec![false; n];
        for b in 0..n {
            let v = rows[a][b];
            if v >= n || std::mem::replace(&mut row_seen[v], true) {
                return Err(LoopError::NotLatinSquare { row: a, col: b, value: v });
            }
            let w = rows[b][a];
            if std::mem::replace(&mut col_seen[w], true) {
                return Err(LoopError::NotLatinSquare { row: b, col: a, value: w });
            }
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|x| rows[e][x] == x && rows[x][e] == x))
        .ok_or(LoopError::NoTwoSidedIdentity)?;
    let mut table: Vec<usize> = rows.iter().flatten().copied().collect();
    let relabel = if e == 0 {
        None
    } else {
        let mut swap: Perm = (0..n).collect();
        swap.swap(0, e);
        let mut moved = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                moved[swap[a] * n + swap[b]] = swap[table[a * n + b]];
            }
        }
        table = moved;
        Some(swap)
    };
    Ok(NormalizedLoop {
        table: CayleyTable { n, table },
        relabel,
    })
}

impl CayleyTable {
    /// Validates and normalizes; the relabelling (if any) is discarded.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, LoopError> {
        loop_from_table(rows).map(|l| l.table)
    }

    pub(crate) fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self, LoopError> {
        let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn check_element(&self, element: usize) -> Result<(), LoopError> {
        if element < self.n {
            Ok(())
        } else {
            Err(LoopError::ElementOutOfRange {
                element,
                order: self.n,
            })
        }
    }

    /// `ℓ_a : x ↦ a ◊ x`.
    pub fn left_translation(&self, a: usize) -> Perm {
        (0..self.n).map(|x| self.mul(a, x)).collect()
    }

    /// `r_a : x ↦ x ◊ a`.
    pub fn right_translation(&self, a: usize) -> Perm {
        (0..self.n).map(|x| self.mul(x, a)).collect()
    }

    /// The `x` with `x ◊ a = 0`.
    pub fn left_inverse(&self, a: usize) -> usize {
        (0..self.n).find(|&x| self.mul(x, a) == 0).expect("Latin square")
    }

    /// The `x` with `a ◊ x = 0`.
    pub fn right_inverse(&self, a: usize) -> usize {
        (0..self.n).find(|&x| self.mul(a, x) == 0).expect("Latin square")
    }

    /// First triple `(a, b, c)` with `(ab)c ≠ a(bc)`, lexicographically.
    pub fn first_non_associative(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        (0..n).into_par_iter().find_map_first(|a| {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
            None
        })
    }

    pub fn is_associative(&self) -> bool {
        self.first_non_associative().is_none()
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    #[inline]
    fn associates(&self, a: usize, b: usize, c: usize) -> bool {
        self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
    }

    /// `A_{u,v} = {w | u(vw) = (uv)w}`.
    pub fn associator_set(&self, u: usize, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| self.associates(u, v, w)).collect()
    }

    /// Left powers `x^{k+1} = x ◊ x^k`; the least `k ≥ 1` with `x^k = 0`.
    pub fn element_order(&self, x: usize) -> Option<usize> {
        let mut p = x;
        for k in 1..=self.n {
            if p == 0 {
                return Some(k);
            }
            p = self.mul(x, p);
        }
        None
    }

    /// Invariants of an abelian group in prime-power form, ascending.
    /// Meaningful only for abelian groups.
    pub fn abelian_invariants(&self) -> Vec<usize> {
        let n = self.n;
        let power = |x: usize, k: usize| (0..k).fold(0, |acc, _| self.mul(x, acc));
        let mut out = Vec::new();
        let mut rest = n;
        let mut p = 2;
        while rest > 1 {
            if !rest.is_multiple_of(p) {
                p += 1;
                continue;
            }
            let mut top = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                top += 1;
            }
            // c[k] = log_p |{x : x^(p^k) = e}| = Σ_i min(k, e_i)
            let mut c = vec![0usize];
            for k in 1..=top {
                let pk = p.pow(k as u32);
                let count = (0..n).filter(|&x| power(x, pk) == 0).count();
                let mut log = 0;
                let mut m = count;
                while m > 1 {
                    m /= p;
                    log += 1;
                }
                c.push(log);
            }
            // number of cyclic factors with exponent ≥ k is c[k] - c[k-1]
            for k in (1..=top).rev() {
                let at_least_k = c[k] - c[k - 1];
                let at_least_k1 = if k < top { c[k + 1] - c[k] } else { 0 };
                for _ in 0..(at_least_k - at_least_k1) {
                    out.push(p.pow(k as u32));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Left and right translations of every element.
pub fn translations(l: &CayleyTable) -> (Vec<Perm>, Vec<Perm>) {
    let n = l.order();
    (
        (0..n).map(|a| l.left_translation(a)).collect(),
        (0..n).map(|a| l.right_translation(a)).collect(),
    )
}

/// The ◊ loop on the colors of a thin regular Jordan scheme:
/// `a ◊ b = S(ω0, a(b(ω0)))`. Colors are canonical, so the identity is `0`.
pub fn diamond_from_scheme(cm: &ColorMatrix, base: usize) -> Result<CayleyTable, LoopError> {
    let reject = |why: &str| LoopError::NotRegularThinJS(why.to_string());
    let n = cm.order();
    if base >= n {
        return Err(reject("base point out of range"));
    }
    if !cm.is_thin() || !cm.is_regular() {
        return Err(reject("not thin and regular"));
    }
    if intersection_numbers(cm, ClosureKind::Jordan).is_err() {
        return Err(reject("not a Jordan configuration"));
    }
    let canon = cm.canonical();
    // image[c][x] = the y with (x, y) in class c
    let mut image = vec![vec![0usize; n]; n];
    for x in 0..n {
        for y in 0..n {
            image[canon.color(x, y)][x] = y;
        }
    }
    let rows: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| canon.color(base, image[a][image[b][base]]))
                .collect()
        })
        .collect();
    let normalized = loop_from_table(&rows)?;
    if normalized.relabel.is_some() {
        return Err(LoopError::InvariantViolation(
            "diagonal color is not the identity".into(),
        ));
    }
    Ok(normalized.table)
}

/// Why the left translations of a loop fail to form a thin Jordan scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslationFailure {
    /// `{u(vw), v(uw)} ≠ {(uv)w, (vu)w}`.
    CAssoc { u: usize, v: usize, w: usize },
    /// `ℓ_a^t` is not a left translation.
    NotTransposeClosed { a: usize },
}

#[derive(Debug, Clone)]
pub enum LoopSchemeOutcome {
    Scheme(Box<SchemeRecord>),
    Failure(TranslationFailure),
}

/// First triple violating `{u(vw), v(uw)} = {(uv)w, (vu)w}`, lexicographically.
pub fn first_c_assoc_violation(l: &CayleyTable) -> Option<(usize, usize, usize)> {
    let n = l.order();
    (0..n).into_par_iter().find_map_first(|u| {
        for v in 0..n {
            let (uv, vu) = (l.mul(u, v), l.mul(v, u));
            for w in 0..n {
                let lhs = (l.mul(u, l.mul(v, w)), l.mul(v, l.mul(u, w)));
                let rhs = (l.mul(uv, w), l.mul(vu, w));
                let same = (lhs.0 == rhs.0 && lhs.1 == rhs.1) || (lhs.0 == rhs.1 && lhs.1 == rhs.0);
                if !same {
                    return Some((u, v, w));
                }
            }
        }
        None
    })
}

/// The rainbow on the loop's elements whose classes are the `ℓ_a`.
/// Class `a` has canonical color `a`.
pub fn translation_rainbow(l: &CayleyTable) -> Result<ColorMatrix, TranslationFailure> {
    let n = l.order();
    let (left, _) = translations(l);
    for (a, la) in left.iter().enumerate() {
        let inv = perm::inverse(la);
        if !left.contains(&inv) {
            return Err(TranslationFailure::NotTransposeClosed { a });
        }
    }
    let mut colors = vec![0usize; n * n];
    for (a, la) in left.iter().enumerate() {
        for (x, &y) in la.iter().enumerate() {
            colors[x * n + y] = a;
        }
    }
    let cm = ColorMatrix::from_colors(n, colors).expect("left translations partition S²");
    debug_assert!(cm.is_canonical());
    Ok(cm)
}

/// The left translations as a Jordan scheme, or the reason they are not one.
pub fn scheme_from_loop(l: &CayleyTable) -> Result<LoopSchemeOutcome, LoopError> {
    if let Some((u, v, w)) = first_c_assoc_violation(l) {
        return Ok(LoopSchemeOutcome::Failure(TranslationFailure::CAssoc { u, v, w }));
    }
    let cm = match translation_rainbow(l) {
        Ok(cm) => cm,
        Err(f) => return Ok(LoopSchemeOutcome::Failure(f)),
    };
    let record = SchemeRecord::analyze(cm);
    if !record.flags.is_js {
        return Err(LoopError::InvariantViolation(
            "(c-assoc) holds but the translations are not a Jordan scheme".into(),
        ));
    }
    Ok(LoopSchemeOutcome::Scheme(Box::new(record)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoopFlags {
    pub lip: bool,
    pub left_alt: bool,
    pub right_alt: bool,
    pub flexible: bool,
    pub left_bol: bool,
    pub right_bol: bool,
    pub moufang: bool,
    pub ra: bool,
    pub associative: bool,
    pub commutative: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopPropertyReport {
    pub flags: LoopFlags,
    pub center: Vec<usize>,
    pub left_nucleus: Vec<usize>,
    pub middle_nucleus: Vec<usize>,
    pub right_nucleus: Vec<usize>,
    pub exponent_two: bool,
    /// Associativity was inferred from "Moufang of exponent two" without a scan.
    pub associativity_from_exponent_two: bool,
}

fn holds_for_all_pairs(l: &CayleyTable, f: impl Fn(usize, usize) -> bool + Sync) -> bool {
    let n = l.order();
    (0..n).into_par_iter().all(|x| (0..n).all(|y| f(x, y)))
}

fn holds_for_all_triples(l: &CayleyTable, f: impl Fn(usize, usize, usize) -> bool + Sync) -> bool {
    let n = l.order();
    (0..n)
        .into_par_iter()
        .all(|x| (0..n).all(|y| (0..n).all(|z| f(x, y, z))))
}

pub fn loop_properties(l: &CayleyTable) -> LoopPropertyReport {
    let n = l.order();
    let m = |a, b| l.mul(a, b);

    let lip = (0..n).all(|a| {
        let inv = l.left_inverse(a);
        (0..n).all(|b| m(inv, m(a, b)) == b)
    });
    let left_alt = holds_for_all_pairs(l, |u, v| m(m(u, u), v) == m(u, m(u, v)));
    let right_alt = holds_for_all_pairs(l, |u, v| m(m(v, u), u) == m(v, m(u, u)));
    let flexible = holds_for_all_pairs(l, |u, v| m(m(u, v), u) == m(u, m(v, u)));
    let left_bol = holds_for_all_triples(l, |y, z, x| m(y, m(z, m(y, x))) == m(m(y, m(z, y)), x));
    let right_bol = holds_for_all_triples(l, |x, y, z| m(m(m(x, y), z), y) == m(x, m(m(y, z), y)));
    let moufang = holds_for_all_triples(l, |x, y, z| m(m(x, y), m(z, x)) == m(m(x, m(y, z)), x));
    let commutative = l.is_commutative();
    let exponent_two = (0..n).all(|x| m(x, x) == 0);

    let associativity_from_exponent_two = moufang && exponent_two;
    let associative = associativity_from_exponent_two || l.is_associative();
    let ra = associative || is_ra_loop(l).ra;

    let nucleus = |test: &(dyn Fn(usize, usize, usize) -> bool + Sync)| -> Vec<usize> {
        (0..n)
            .into_par_iter()
            .filter(|&a| (0..n).all(|x| (0..n).all(|y| test(a, x, y))))
            .collect()
    };
    let left_nucleus = nucleus(&|a, x, y| m(a, m(x, y)) == m(m(a, x), y));
    let middle_nucleus = nucleus(&|a, x, y| m(x, m(a, y)) == m(m(x, a), y));
    let right_nucleus = nucleus(&|a, x, y| m(x, m(y, a)) == m(m(x, y), a));
    let center: Vec<usize> = left_nucleus
        .iter()
        .copied()
        .filter(|a| middle_nucleus.contains(a) && right_nucleus.contains(a))
        .filter(|&a| (0..n).all(|x| m(a, x) == m(x, a)))
        .collect();

    LoopPropertyReport {
        flags: LoopFlags {
            lip,
            left_alt,
            right_alt,
            flexible,
            left_bol,
            right_bol,
            moufang,
            ra,
            associative,
            commutative,
        },
        center,
        left_nucleus,
        middle_nucleus,
        right_nucleus,
        exponent_two,
        associativity_from_exponent_two,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaReport {
    pub ra: bool,
    pub witness: Option<(usize, usize, usize)>,
}

/// The two Chein–Goodaire conditions, scanned over all triples.
///
/// (1) a triple associating in some order associates in every order;
/// (2) a non-associating triple satisfies `(uv)w = u(wv) = v(uw)`.
pub fn is_ra_loop(l: &CayleyTable) -> RaReport {
    if l.is_associative() {
        return RaReport {
            ra: true,
            witness: None,
        };
    }
    let n = l.order();
    let witness = (0..n).into_par_iter().find_map_first(|u| {
        for v in 0..n {
            for w in 0..n {
                let orders = [(u, v, w), (u, w, v), (v, u, w), (v, w, u), (w, u, v), (w, v, u)];
                let assoc: Vec<bool> = orders.iter().map(|&(a, b, c)| l.associates(a, b, c)).collect();
                let ok = if assoc.iter().any(|&x| x) {
                    assoc.iter().all(|&x| x)
                } else {
                    let lhs = l.mul(l.mul(u, v), w);
                    lhs == l.mul(u, l.mul(w, v)) && lhs == l.mul(v, l.mul(u, w))
                };
                if !ok {
                    return Some((u, v, w));
                }
            }
        }
        None
    });
    RaReport {
        ra: witness.is_none(),
        witness,
    }
}

/// Data of a group with `G/Z(G) ≅ Z2²`: its center and commutator element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleinQuotient {
    pub center: Vec<usize>,
    pub commutator: usize,
}

pub fn group_center(g: &CayleyTable) -> Vec<usize> {
    let n = g.order();
    (0..n)
        .filter(|&a| (0..n).all(|x| g.mul(a, x) == g.mul(x, a)))
        .collect()
}

/// Checks `|G : Z(G)| = 4`, exponent two modulo the center, and a unique
/// non-trivial commutator.
pub fn klein_quotient(g: &CayleyTable) -> Result<KleinQuotient, LoopError> {
    if !g.is_associative() {
        return Err(LoopError::NotAGroup);
    }
    let n = g.order();
    let center = group_center(g);
    let central: Vec<bool> = (0..n).map(|a| center.contains(&a)).collect();
    if center.len() * 4 != n {
        return Err(LoopError::QuotientNotKleinFour(format!(
            "|G| = {n}, |Z(G)| = {}",
            center.len()
        )));
    }
    if let Some(x) = (0..n).find(|&x| !central[g.mul(x, x)]) {
        return Err(LoopError::QuotientNotKleinFour(format!(
            "the square of {x} is not central"
        )));
    }
    let inv: Vec<usize> = (0..n).map(|a| g.right_inverse(a)).collect();
    let mut values = std::collections::BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            values.insert(g.mul(g.mul(inv[a], inv[b]), g.mul(a, b)));
        }
    }
    values.remove(&0);
    let s = match values.into_iter().collect::<Vec<_>>().as_slice() {
        [s] => *s,
        other => {
            return Err(LoopError::QuotientNotKleinFour(format!(
                "{} non-trivial commutators",
                other.len()
            )))
        }
    };
    Ok(KleinQuotient {
        center,
        commutator: s,
    })
}

/// `g ↦ g*`: `g` for central `g`, `g·s` otherwise.
pub fn star_involution(g: &CayleyTable) -> Result<Perm, LoopError> {
    let kq = klein_quotient(g)?;
    let star: Perm = (0..g.order())
        .map(|x| {
            if kq.center.contains(&x) {
                x
            } else {
                g.mul(x, kq.commutator)
            }
        })
        .collect();
    let n = g.order();
    let anti = (0..n).all(|a| (0..n).all(|b| star[g.mul(a, b)] == g.mul(star[b], star[a])));
    if !anti {
        return Err(LoopError::InvariantViolation("g ↦ g* is not an anti-automorphism".into()));
    }
    Ok(star)
}

/// `L(G,*,g0)` on `G × {0,1}`, with `(g, x)` stored as `g + x·|G|`:
///
/// ```text
/// (g,0)(h,0) = (gh, 0)      (g,0)(h,1) = (hg, 1)
/// (g,1)(h,0) = (gh*, 1)     (g,1)(h,1) = (g0 h* g, 0)
/// ```
#[allow(non_snake_case)]
pub fn construct_LGg(g: &CayleyTable, g0: usize) -> Result<CayleyTable, LoopError> {
    g.check_element(g0)?;
    let star = star_involution(g)?;
    if !group_center(g).contains(&g0) {
        return Err(LoopError::G0NotCentral(g0));
    }
    let n = g.order();
    let m = |a, b| g.mul(a, b);
    let l = CayleyTable::from_fn(2 * n, |p, q| {
        let (a, x) = (p % n, p / n);
        let (b, y) = (q % n, q / n);
        match (x, y) {
            (0, 0) => m(a, b),
            (0, _) => n + m(b, a),
            (_, 0) => n + m(a, star[b]),
            _ => m(m(g0, star[b]), a),
        }
    })?;
    let report = loop_properties(&l);
    if !(report.flags.moufang && report.flags.ra) {
        return Err(LoopError::InvariantViolation(
            "L(G,*,g0) is not a Moufang RA loop".into(),
        ));
    }
    Ok(l)
}

/// Whether `(v◊u)^t = u^t ◊ v^t`, with `a^t` the left inverse of `a`.
pub fn inverse_antihomomorphism_check(l: &CayleyTable) -> bool {
    let n = l.order();
    let inv: Vec<usize> = (0..n).map(|a| l.left_inverse(a)).collect();
    (0..n).all(|u| (0..n).all(|v| inv[l.mul(v, u)] == l.mul(inv[u], inv[v])))
}

pub const MAX_ISOMORPHISM_ORDER: usize = 32;

fn element_profile(l: &CayleyTable) -> Vec<(Option<usize>, Option<usize>, bool)> {
    let n = l.order();
    let center = group_center(l);
    (0..n)
        .map(|x| {
            (
                l.element_order(x),
                l.element_order(l.mul(x, x)),
                center.contains(&x),
            )
        })
        .collect()
}

fn generating_set(l: &CayleyTable) -> Vec<usize> {
    let n = l.order();
    let mut gens = Vec::new();
    let mut inside = vec![false; n];
    inside[0] = true;
    while let Some(next) = (0..n).find(|&x| !inside[x]) {
        gens.push(next);
        inside[next] = true;
        loop {
            let members: Vec<usize> = (0..n).filter(|&x| inside[x]).collect();
            let mut grew = false;
            for &a in &members {
                for &b in &members {
                    let c = l.mul(a, b);
                    if !inside[c] {
                        inside[c] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
    }
    gens
}

/// Extends a partial map along products; `None` on a clash.
fn extend_hom(a: &CayleyTable, b: &CayleyTable, gens: &[usize], images: &[usize]) -> Option<Perm> {
    let n = a.order();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[0] = 0;
    used[0] = true;
    for (&g, &h) in gens.iter().zip(images) {
        if map[g] != usize::MAX && map[g] != h {
            return None;
        }
        if map[g] == usize::MAX {
            if used[h] {
                return None;
            }
            map[g] = h;
            used[h] = true;
        }
    }
    loop {
        let known: Vec<usize> = (0..n).filter(|&x| map[x] != usize::MAX).collect();
        let mut grew = false;
        for &x in &known {
            for &y in &known {
                let z = a.mul(x, y);
                let image = b.mul(map[x], map[y]);
                if map[z] == usize::MAX {
                    if used[image] {
                        return None;
                    }
                    map[z] = image;
                    used[image] = true;
                    grew = true;
                } else if map[z] != image {
                    return None;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let complete = map.iter().all(|&x| x != usize::MAX);
    let hom = complete && (0..n).all(|x| (0..n).all(|y| map[a.mul(x, y)] == b.mul(map[x], map[y])));
    hom.then_some(map)
}

/// An isomorphism `f` with `f(x◊y) = f(x)◊f(y)`, searched over images of a
/// generating set with pruning on per-element invariants.
pub fn loop_isomorphism(a: &CayleyTable, b: &CayleyTable) -> Result<Option<Perm>, LoopError> {
    let n = a.order();
    if n.max(b.order()) > MAX_ISOMORPHISM_ORDER {
        return Err(LoopError::OrderTooLarge {
            order: n.max(b.order()),
            bound: MAX_ISOMORPHISM_ORDER,
        });
    }
    if n != b.order() {
        return Ok(None);
    }
    let (pa, pb) = (element_profile(a), element_profile(b));
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Ok(None);
    }
    let gens = generating_set(a);
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| (0..n).filter(|&h| pb[h] == pa[g]).collect())
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    fn search(
        a: &CayleyTable,
        b: &CayleyTable,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
    ) -> Option<Perm> {
        if images.len() == gens.len() {
            return extend_hom(a, b, gens, images);
        }
        for &h in &candidates[images.len()] {
            if images.contains(&h) {
                continue;
            }
            images.push(h);
            if let Some(f) = search(a, b, gens, candidates, images) {
                return Some(f);
            }
            images.pop();
        }
        None
    }
    Ok(search(a, b, &gens, &candidates, &mut images))
}

/// The ◊ loop for every base point, grouped into isomorphism classes.
/// Returns `class_of[base]`, classes numbered by first occurrence.
pub fn basepoint_classes(cm: &ColorMatrix) -> Result<Vec<usize>, LoopError> {
    let loops = (0..cm.order())
        .map(|w| diamond_from_scheme(cm, w))
        .collect::<Result<Vec<_>, _>>()?;
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(loops.len());
    let mut cache: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    for (i, l) in loops.iter().enumerate() {
        let mut found = None;
        for (k, &r) in reps.iter().enumerate() {
            let iso = match cache.get(&(r, i)) {
                Some(&v) => v,
                None => {
                    let v = loops[r] == *l || loop_isomorphism(&loops[r], l)?.is_some();
                    cache.insert((r, i), v);
                    v
                }
            };
            if iso {
                found = Some(k);
                break;
            }
        }
        class_of.push(match found {
            Some(k) => k,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        });
    }
    Ok(class_of)
}
