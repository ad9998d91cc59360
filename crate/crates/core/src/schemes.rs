//! Structure constants and scheme-level predicates on top of rainbows:
//! coherence tests, the rank/order bound for Jordan schemes, the doubling
//! construction `J(G)` for abelian groups and its recognizer, symmetrization,
//! and span-membership checks for products inside a Jordan algebra.

use std::collections::BTreeMap;

use num_rational::{BigRational, Ratio};
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::closures::{closure, ClosureKind};
use crate::loops::{CayleyTable, LoopError};
use crate::rainbow::{ColorMatrix, ExactMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("NotAJordanScheme: {0}")]
    NotAJordanScheme(String),
    #[error("NotAJC: the span is not closed under the Jordan product")]
    NotAJC,
    #[error("NotAGroup: the table is not associative")]
    NotAGroup,
    #[error("NotAbelian: the group is not commutative")]
    NotAbelian,
    #[error("NotNonRegularThinJS: {0}")]
    NotNonRegularThinJS(String),
    #[error("KTooLarge: symmetrization of {k} elements exceeds the limit of {limit}")]
    KTooLarge { k: usize, limit: usize },
    #[error("CoefficientLength: expected {expected} coefficients, found {found}")]
    CoefficientLength { expected: usize, found: usize },
    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

/// Intersection numbers of a CC (`p^t_{i,j}`) or of a JC (`p^t_{{i,j}}`).
///
/// Only non-zero values are stored. Jordan keys have `i <= j` and store the
/// integer sum `p^t_{i,j} + p^t_{j,i}`, so `und(s_i) ⋆ und(s_j) = ½ Σ_t p^t_{{i,j}} und(s_t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureTensor {
    kind: ClosureKind,
    rank: usize,
    values: BTreeMap<(usize, usize, usize), u64>,
}

impl StructureTensor {
    pub fn kind(&self) -> ClosureKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize, t: usize) -> u64 {
        let key = match self.kind {
            ClosureKind::Associative => (i, j, t),
            ClosureKind::Jordan => (i.min(j), i.max(j), t),
        };
        self.values.get(&key).copied().unwrap_or(0)
    }

    /// Non-zero entries keyed by `(i, j, t)`.
    pub fn nonzero(&self) -> &BTreeMap<(usize, usize, usize), u64> {
        &self.values
    }

    /// Dense `rank³` copy, indexed `(i * rank + j) * rank + t`, with both
    /// orders of a Jordan pair filled in.
    pub fn dense(&self) -> Vec<u64> {
        let r = self.rank;
        let mut out = vec![0; r * r * r];
        for (&(i, j, t), &v) in &self.values {
            out[(i * r + j) * r + t] = v;
            if self.kind == ClosureKind::Jordan {
                out[(j * r + i) * r + t] = v;
            }
        }
        out
    }
}

/// Two cells of one class with different 2-path counts for colors `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceWitness {
    pub i: usize,
    pub j: usize,
    pub t: usize,
    pub first: ((usize, usize), u64),
    pub second: ((usize, usize), u64),
}

fn path_counts(cm: &ColorMatrix, kind: ClosureKind, a: usize, b: usize) -> BTreeMap<(usize, usize), u64> {
    let mut counts = BTreeMap::new();
    for g in 0..cm.order() {
        let (x, y) = (cm.color(a, g), cm.color(g, b));
        match kind {
            ClosureKind::Associative => *counts.entry((x, y)).or_insert(0) += 1,
            // |αs ∩ βr^t| + |αr ∩ βs^t|: a path colored (x, y) counts once
            // for the key {x, y}, twice when x == y
            ClosureKind::Jordan => {
                *counts.entry((x.min(y), x.max(y))).or_insert(0) += if x == y { 2 } else { 1 }
            }
        }
    }
    counts
}

/// The structure constants, or a witness that some count is not constant on
/// a class (so `cm` is not a CC, resp. JC).
pub fn intersection_numbers(
    cm: &ColorMatrix,
    kind: ClosureKind,
) -> Result<StructureTensor, CoherenceWitness> {
    let n = cm.order();
    let r = cm.rank();
    let mut representative = vec![usize::MAX; r];
    for i in (0..n * n).rev() {
        representative[cm.colors()[i]] = i;
    }
    let reps: Vec<BTreeMap<(usize, usize), u64>> = representative
        .par_iter()
        .map(|&cell| path_counts(cm, kind, cell / n, cell % n))
        .collect();

    let mismatch = (0..n * n).into_par_iter().find_first(|&cell| {
        let t = cm.colors()[cell];
        cell != representative[t] && path_counts(cm, kind, cell / n, cell % n) != reps[t]
    });
    if let Some(cell) = mismatch {
        let t = cm.colors()[cell];
        let here = path_counts(cm, kind, cell / n, cell % n);
        let rep = &reps[t];
        let (i, j) = rep
            .keys()
            .chain(here.keys())
            .copied()
            .find(|k| rep.get(k) != here.get(k))
            .expect("maps differ");
        let rc = representative[t];
        return Err(CoherenceWitness {
            i,
            j,
            t,
            first: ((rc / n, rc % n), rep.get(&(i, j)).copied().unwrap_or(0)),
            second: ((cell / n, cell % n), here.get(&(i, j)).copied().unwrap_or(0)),
        });
    }

    let mut values = BTreeMap::new();
    for (t, counts) in reps.into_iter().enumerate() {
        for ((i, j), v) in counts {
            values.insert((i, j, t), v);
        }
    }
    Ok(StructureTensor {
        kind,
        rank: r,
        values,
    })
}

pub fn is_coherent(cm: &ColorMatrix) -> bool {
    intersection_numbers(cm, ClosureKind::Associative).is_ok()
}

pub fn is_jordan_configuration(cm: &ColorMatrix) -> bool {
    intersection_numbers(cm, ClosureKind::Jordan).is_ok()
}

pub fn is_jordan_scheme(cm: &ColorMatrix) -> bool {
    cm.is_homogeneous() && is_jordan_configuration(cm)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeFlags {
    pub is_cc: bool,
    pub is_jc: bool,
    pub is_as: bool,
    pub is_js: bool,
    /// `Some(false)` when certified to be the symmetrization of an AS,
    /// `Some(true)` when certified not to be, `None` when undecided (or not a JS).
    pub proper_js: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct SchemeRecord {
    pub cm: ColorMatrix,
    pub tensor_assoc: Option<StructureTensor>,
    pub tensor_jordan: Option<StructureTensor>,
    pub flags: SchemeFlags,
}

impl SchemeRecord {
    pub fn analyze(cm: ColorMatrix) -> SchemeRecord {
        let tensor_assoc = intersection_numbers(&cm, ClosureKind::Associative).ok();
        let tensor_jordan = intersection_numbers(&cm, ClosureKind::Jordan).ok();
        let homogeneous = cm.is_homogeneous();
        let is_cc = tensor_assoc.is_some();
        let is_jc = tensor_jordan.is_some();
        let is_js = is_jc && homogeneous;
        let proper_js = if is_js { proper_certificate(&cm) } else { None };
        SchemeRecord {
            flags: SchemeFlags {
                is_cc,
                is_jc,
                is_as: is_cc && homogeneous,
                is_js,
                proper_js,
            },
            cm,
            tensor_assoc,
            tensor_jordan,
        }
    }
}

/// Decides properness of a JS when a certificate exists.
///
/// If `js` were the symmetrization of an AS `A`, then `A` refines `WL(js)` and
/// every class of `js` is `c ∪ c^t` for a class `c` of `A`; so each class of
/// `js` holds at most two WL-classes, and two only as a transposed pair.
/// A violation certifies properness. Conversely `WL(js)` itself is a witnessing
/// AS when it is homogeneous and symmetrizes back to `js`.
fn proper_certificate(js: &ColorMatrix) -> Option<bool> {
    if !js.is_symmetric() {
        return Some(true);
    }
    let wl = closure(js, ClosureKind::Associative);
    let mut inside: Vec<Vec<usize>> = vec![Vec::new(); js.rank()];
    let mut seen = vec![false; wl.rank()];
    for (cell, &w) in wl.colors().iter().enumerate() {
        if !std::mem::replace(&mut seen[w], true) {
            inside[js.colors()[cell]].push(w);
        }
    }
    for ws in &inside {
        match ws.as_slice() {
            [_] => {}
            [a, b] if wl.transpose_map()[*a] == *b => {}
            _ => return Some(true),
        }
    }
    if wl.is_homogeneous() && symmetrize(&wl).same_partition(js) {
        Some(false)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioReport {
    pub ratio: Ratio<u64>,
    pub bound_tight: bool,
    /// `(Ω0, Ω1)` for non-regular schemes.
    pub split: Option<(Vec<usize>, Vec<usize>)>,
}

/// `rank / order` of a Jordan scheme, checked against the bound `3/2`.
///
/// For a non-regular scheme the point set splits into two halves `Ω0`, `Ω1`
/// with regular classes inside `Ω0² ∪ Ω1²` and non-regular ones across;
/// `Ω0` is the row support of the first non-regular class.
pub fn ratio_report(cm: &ColorMatrix) -> Result<RatioReport, SchemeError> {
    if !cm.is_homogeneous() {
        return Err(SchemeError::NotAJordanScheme("not homogeneous".into()));
    }
    if let Err(w) = intersection_numbers(cm, ClosureKind::Jordan) {
        return Err(SchemeError::NotAJordanScheme(format!(
            "Jordan count for colors {{{}, {}}} varies on class {}",
            w.i, w.j, w.t
        )));
    }
    let ratio = Ratio::new(cm.rank() as u64, cm.order() as u64);
    if ratio > Ratio::new(3, 2) {
        return Err(SchemeError::InvariantViolation(format!(
            "rank/order = {ratio} exceeds 3/2"
        )));
    }
    let valencies = cm.valencies();
    let split = match valencies.iter().position(Option::is_none) {
        None => None,
        Some(s) => {
            let n = cm.order();
            let mut side = vec![1usize; n];
            for (a, _) in cm.class_cells(s) {
                side[a] = 0;
            }
            let omega0: Vec<usize> = (0..n).filter(|&a| side[a] == 0).collect();
            let omega1: Vec<usize> = (0..n).filter(|&a| side[a] == 1).collect();
            if omega0.len() != omega1.len() {
                return Err(SchemeError::InvariantViolation(format!(
                    "fibres of sizes {} and {}",
                    omega0.len(),
                    omega1.len()
                )));
            }
            for (cell, &c) in cm.colors().iter().enumerate() {
                let crosses = side[cell / n] != side[cell % n];
                if crosses == valencies[c].is_some() {
                    return Err(SchemeError::InvariantViolation(format!(
                        "class {c} does not respect the fibre split"
                    )));
                }
            }
            Some((omega0, omega1))
        }
    };
    Ok(RatioReport {
        ratio,
        bound_tight: ratio == Ratio::new(3, 2),
        split,
    })
}

fn require_abelian_group(g: &CayleyTable) -> Result<(), SchemeError> {
    if !g.is_associative() {
        return Err(SchemeError::NotAGroup);
    }
    if !g.is_commutative() {
        return Err(SchemeError::NotAbelian);
    }
    Ok(())
}

/// `J(G)`: on `2n` points (fibre 0 = `0..n`, fibre 1 = `n..2n`), the classes
/// `[A 0; 0 A]`, `[0 C; 0 0]`, `[0 0; D 0]` for `A, C, D` ranging over the
/// left translations of `G`.
pub fn construct_jcal(group: &CayleyTable) -> Result<SchemeRecord, SchemeError> {
    require_abelian_group(group)?;
    let n = group.order();
    let mut labels = vec![(0u8, 0usize); 4 * n * n];
    for g in 0..n {
        for x in 0..n {
            let y = group.mul(g, x);
            labels[x * 2 * n + y] = (0, g);
            labels[(n + x) * 2 * n + n + y] = (0, g);
            labels[x * 2 * n + n + y] = (1, g);
            labels[(n + x) * 2 * n + y] = (2, g);
        }
    }
    let cm = ColorMatrix::from_labels(2 * n, &labels)
        .map_err(|e| SchemeError::InvariantViolation(e.to_string()))?;
    Ok(SchemeRecord::analyze(cm))
}

#[derive(Debug, Clone)]
pub struct Recognition {
    /// The abelian group read off the diagonal blocks.
    pub group: CayleyTable,
    /// Point map sending `cm` onto `construct_jcal(group)` exactly.
    pub conjugator: Vec<usize>,
}

/// Identifies a non-regular thin Jordan scheme with `J(G)`.
///
/// Follows the constructive classification: split into fibres, read the
/// group off the `Ω0` diagonal block, and use the off-diagonal class through
/// `(min Ω0, min Ω1)` to identify `Ω1` with `Ω0`.
pub fn recognize_nonregular_thin(cm: &ColorMatrix) -> Result<Recognition, SchemeError> {
    let reject = |why: &str| SchemeError::NotNonRegularThinJS(why.to_string());
    if !cm.is_thin() {
        return Err(reject("not thin"));
    }
    if cm.is_regular() {
        return Err(reject("regular"));
    }
    let split = match ratio_report(cm) {
        Ok(r) => r.split.expect("non-regular schemes carry a split"),
        Err(SchemeError::NotAJordanScheme(why)) => return Err(reject(&why)),
        Err(e) => return Err(e),
    };
    let (omega0, omega1) = split;
    let n = omega0.len();
    let total = cm.order();
    let base = omega0[0];
    let bridge = cm.color(base, omega1[0]);

    // image of x under the thin class `c`
    let image = |c: usize, x: usize| -> usize {
        (0..total)
            .find(|&y| cm.color(x, y) == c)
            .expect("thin class of a non-regular JS is a bijection between fibres")
    };
    let index_of: Vec<usize> = {
        let mut idx = vec![usize::MAX; total];
        for (i, &p) in omega0.iter().enumerate() {
            idx[p] = i;
        }
        idx
    };

    let mut rows = vec![vec![0usize; n]; n];
    for (i, &pi) in omega0.iter().enumerate() {
        let a_i = cm.color(base, pi);
        for (j, &pj) in omega0.iter().enumerate() {
            rows[i][j] = index_of[image(a_i, pj)];
        }
    }
    let group = CayleyTable::from_rows(&rows)?;
    require_abelian_group(&group)
        .map_err(|e| SchemeError::InvariantViolation(format!("diagonal block: {e}")))?;

    let mut conjugator = vec![usize::MAX; total];
    for (i, &p) in omega0.iter().enumerate() {
        conjugator[p] = i;
        conjugator[image(bridge, p)] = n + i;
    }
    let target = construct_jcal(&group)?;
    if !cm.relabel_points(&conjugator).same_partition(&target.cm) {
        return Err(SchemeError::InvariantViolation(
            "relabelled scheme differs from J(G)".into(),
        ));
    }
    Ok(Recognition { group, conjugator })
}

/// Merges every class with its transpose.
pub fn symmetrize(cm: &ColorMatrix) -> ColorMatrix {
    let t = cm.transpose_map();
    let labels: Vec<usize> = cm.colors().iter().map(|&c| c.min(t[c])).collect();
    ColorMatrix::from_labels(cm.order(), &labels).expect("symmetrization is a rainbow")
}

/// Coefficients of `m` in the standard basis, when `m` is constant on every class.
pub fn span_membership(cm: &ColorMatrix, m: &ExactMatrix) -> Option<Vec<BigRational>> {
    assert_eq!(cm.order(), m.size(), "matrix size");
    let n = cm.order();
    let mut coeffs: Vec<Option<BigRational>> = vec![None; cm.rank()];
    for a in 0..n {
        for b in 0..n {
            let c = cm.color(a, b);
            let v = m.entry(a, b);
            match &coeffs[c] {
                None => coeffs[c] = Some(v),
                Some(w) if *w == v => {}
                Some(_) => return None,
            }
        }
    }
    Some(coeffs.into_iter().map(|c| c.expect("every class non-empty")).collect())
}

fn require_jc(cm: &ColorMatrix) -> Result<(), SchemeError> {
    if is_jordan_configuration(cm) {
        Ok(())
    } else {
        Err(SchemeError::NotAJC)
    }
}

fn materialize(cm: &ColorMatrix, coeffs: &[BigRational]) -> Result<ExactMatrix, SchemeError> {
    if coeffs.len() != cm.rank() {
        return Err(SchemeError::CoefficientLength {
            expected: cm.rank(),
            found: coeffs.len(),
        });
    }
    Ok(cm.combination(coeffs))
}

/// `ACB + BCA` lies in the span of a JC for all elements `A, B, C`.
pub fn jordan_triple_check(
    cm: &ColorMatrix,
    a: &[BigRational],
    b: &[BigRational],
    c: &[BigRational],
) -> Result<bool, SchemeError> {
    require_jc(cm)?;
    let (a, b, c) = (materialize(cm, a)?, materialize(cm, b)?, materialize(cm, c)?);
    let ac = a.mul(&c);
    let bc = b.mul(&c);
    let sum = ac.mul(&b).add(&bc.mul(&a));
    Ok(span_membership(cm, &sum).is_some())
}

pub const MAX_SYMMETRIZATION_ARITY: usize = 6;

/// `Σ_{π ∈ S_k} a_π(1) ⋯ a_π(k)`, accumulated over subsets: the sum over
/// orderings of a subset `T` is `Σ_{i ∈ T} P(T \ {i}) · a_i`.
pub fn symmetrized_product(mats: &[ExactMatrix]) -> ExactMatrix {
    let k = mats.len();
    let n = mats.first().map_or(0, ExactMatrix::size);
    let mut partial = vec![ExactMatrix::zeros(n); 1 << k];
    partial[0] = ExactMatrix::identity(n);
    for set in 1usize..(1 << k) {
        let mut acc = ExactMatrix::zeros(n);
        for (i, m) in mats.iter().enumerate() {
            if set >> i & 1 == 1 {
                acc = acc.add(&partial[set & !(1 << i)].mul(m));
            }
        }
        partial[set] = acc;
    }
    partial.pop().expect("at least the empty product")
}

/// The full symmetrization of `k ≤ 6` elements lies in the span of a JC.
pub fn symmetrization_membership_check(
    cm: &ColorMatrix,
    elements: &[Vec<BigRational>],
) -> Result<bool, SchemeError> {
    require_jc(cm)?;
    if elements.len() > MAX_SYMMETRIZATION_ARITY {
        return Err(SchemeError::KTooLarge {
            k: elements.len(),
            limit: MAX_SYMMETRIZATION_ARITY,
        });
    }
    let mats = elements
        .iter()
        .map(|e| materialize(cm, e))
        .collect::<Result<Vec<_>, _>>()?;
    if mats.is_empty() {
        return Ok(true);
    }
    Ok(span_membership(cm, &symmetrized_product(&mats)).is_some())
}

/// Whether `a_1 ⋯ a_k + a_k ⋯ a_1` lies in the span. Not known to hold in
/// general for `k ≥ 4`; used only by the experiment command.
pub fn reversal_sum_membership(
    cm: &ColorMatrix,
    elements: &[Vec<BigRational>],
) -> Result<bool, SchemeError> {
    require_jc(cm)?;
    let mats = elements
        .iter()
        .map(|e| materialize(cm, e))
        .collect::<Result<Vec<_>, _>>()?;
    let n = cm.order();
    let forward = mats
        .iter()
        .fold(ExactMatrix::identity(n), |acc, m| acc.mul(m));
    let backward = mats
        .iter()
        .rev()
        .fold(ExactMatrix::identity(n), |acc, m| acc.mul(m));
    Ok(span_membership(cm, &forward.add(&backward)).is_some())
}

/// Uniform coefficient vectors with small numerators and denominators.
pub fn random_element<R: rand::Rng>(cm: &ColorMatrix, rng: &mut R) -> Vec<BigRational> {
    (0..cm.rank())
        .map(|_| {
            let num: i64 = rng.gen_range(-6..=6);
            let den: i64 = rng.gen_range(1..=5);
            BigRational::new(num.into(), den.into())
        })
        .collect()
}

/// `e_c`, the coefficient vector of a single class.
pub fn unit_element(cm: &ColorMatrix, c: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::from_integer(0.into()); cm.rank()];
    v[c] = BigRational::one();
    v
}
