//! Algebraic automorphisms of configurations, algebraic fusions, and
//! autonomy of Jordan schemes.

use std::collections::{HashMap, HashSet, VecDeque};
use std::ops::ControlFlow;

use rayon::prelude::*;
use thiserror::Error;

use crate::closures::{closure, ClosureKind};
use crate::loops::{diamond_from_scheme, LoopError};
use crate::perm::{self, Perm};
use crate::rainbow::{is_fusion_of, ColorMatrix};
use crate::schemes::{intersection_numbers, SchemeRecord, StructureTensor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgMapsError {
    #[error("NotAJC: the configuration is not closed under the Jordan product")]
    NotAJC,
    #[error("RankTooLarge: rank {rank} exceeds the bound {bound}")]
    RankTooLarge { rank: usize, bound: usize },
    #[error("GroupTooLarge: group of order {order} exceeds the bound {bound}")]
    GroupTooLarge { order: usize, bound: usize },
    #[error("NotASubgroupOfJAut: {0}")]
    NotASubgroupOfJAut(String),
    #[error("NotAFusion: {0}")]
    NotAFusion(String),
    #[error("NotSemiregular: {0}")]
    NotSemiregular(String),
    #[error("NotThinRegularJS: {0}")]
    NotThinRegularJS(String),
    #[error("OrderTooLarge: order {order} exceeds the bound {bound}")]
    OrderTooLarge { order: usize, bound: usize },
    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Loop(#[from] LoopError),
}

/// A permutation of color indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorPermutation {
    map: Vec<usize>,
}

impl ColorPermutation {
    /// Panics unless `map` is a permutation.
    pub fn new(map: Vec<usize>) -> Self {
        assert!(perm::is_permutation(&map), "not a permutation: {map:?}");
        ColorPermutation { map }
    }

    pub fn identity(rank: usize) -> Self {
        ColorPermutation {
            map: perm::identity(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, c: usize) -> usize {
        self.map[c]
    }

    /// `(self ∘ other)(c) = self(other(c))`.
    pub fn compose(&self, other: &ColorPermutation) -> ColorPermutation {
        ColorPermutation {
            map: perm::compose(&self.map, &other.map),
        }
    }

    pub fn inverse(&self) -> ColorPermutation {
        ColorPermutation {
            map: perm::inverse(&self.map),
        }
    }

    pub fn is_identity(&self) -> bool {
        perm::is_identity(&self.map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutGroupReport {
    /// Sorted; the identity comes first.
    pub jaut: Vec<ColorPermutation>,
    /// Only for coherent configurations.
    pub aaut: Option<Vec<ColorPermutation>>,
    pub taut: Option<Vec<ColorPermutation>>,
    pub tau: ColorPermutation,
}

pub const DEFAULT_RANK_BOUND: usize = 40;
pub const DEFAULT_GROUP_BOUND: usize = 1024;

struct DenseTensor {
    r: usize,
    values: Vec<u64>,
}

impl DenseTensor {
    fn new(t: &StructureTensor) -> Self {
        DenseTensor {
            r: t.rank(),
            values: t.dense(),
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize, t: usize) -> u64 {
        self.values[(i * self.r + j) * self.r + t]
    }
}

/// Backtracking over color maps preserving `tensor`, the diagonal colors,
/// class sizes, symmetry type and transpose pairs.
fn tensor_preservers(cm: &ColorMatrix, tensor: &DenseTensor) -> Vec<ColorPermutation> {
    let r = cm.rank();
    let t = cm.transpose_map();
    let invariant: Vec<(usize, bool, bool)> = (0..r)
        .map(|c| (cm.class_size(c), cm.is_diagonal_color(c), t[c] == c))
        .collect();

    struct Search<'a> {
        r: usize,
        t: &'a [usize],
        invariant: &'a [(usize, bool, bool)],
        tensor: &'a DenseTensor,
        map: Vec<usize>,
        used: Vec<bool>,
        assigned: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    impl Search<'_> {
        fn consistent(&self, c: usize) -> bool {
            let m = &self.map;
            let p = self.tensor;
            for &a in &self.assigned {
                for &b in &self.assigned {
                    for (i, j, k) in [(c, a, b), (a, c, b), (a, b, c)] {
                        if p.get(i, j, k) != p.get(m[i], m[j], m[k]) {
                            return false;
                        }
                    }
                }
            }
            true
        }

        fn assign(&mut self, c: usize, d: usize) -> bool {
            self.map[c] = d;
            self.used[d] = true;
            self.assigned.push(c);
            self.consistent(c)
        }

        fn unassign(&mut self, c: usize) {
            self.used[self.map[c]] = false;
            self.map[c] = usize::MAX;
            self.assigned.pop();
        }

        fn run(&mut self, next: usize) {
            let Some(c) = (next..self.r).find(|&c| self.map[c] == usize::MAX) else {
                self.out.push(self.map.clone());
                return;
            };
            for d in 0..self.r {
                self.try_image(c, d);
            }
        }

        fn try_image(&mut self, c: usize, d: usize) {
            if self.used[d] || self.invariant[c] != self.invariant[d] {
                return;
            }
            let (tc, td) = (self.t[c], self.t[d]);
            if self.assign(c, d) {
                if tc == c {
                    self.run(c + 1);
                } else if !self.used[td] {
                    if self.assign(tc, td) {
                        self.run(c + 1);
                    }
                    self.unassign(tc);
                }
            }
            self.unassign(c);
        }
    }

    let fresh = || Search {
        r,
        t,
        invariant: &invariant,
        tensor,
        map: vec![usize::MAX; r],
        used: vec![false; r],
        assigned: Vec::new(),
        out: Vec::new(),
    };
    let mut found: Vec<Vec<usize>> = (0..r)
        .into_par_iter()
        .flat_map_iter(|d| {
            let mut s = fresh();
            s.try_image(0, d);
            s.out
        })
        .collect();
    found.sort();
    found.into_iter().map(ColorPermutation::new).collect()
}

pub fn jaut_enumerate(cm: &ColorMatrix) -> Result<AutGroupReport, AlgMapsError> {
    jaut_enumerate_bounded(cm, DEFAULT_RANK_BOUND)
}

/// `JAut`, and for a CC also `AAut` and `TAut = AAut ∪ AAut∘τ`.
pub fn jaut_enumerate_bounded(cm: &ColorMatrix, rank_bound: usize) -> Result<AutGroupReport, AlgMapsError> {
    if cm.rank() > rank_bound {
        return Err(AlgMapsError::RankTooLarge {
            rank: cm.rank(),
            bound: rank_bound,
        });
    }
    let jordan = intersection_numbers(cm, ClosureKind::Jordan).map_err(|_| AlgMapsError::NotAJC)?;
    let jaut = tensor_preservers(cm, &DenseTensor::new(&jordan));
    let tau = ColorPermutation::new(cm.transpose_map().to_vec());
    let (aaut, taut) = match intersection_numbers(cm, ClosureKind::Associative) {
        Ok(assoc) => {
            let aaut = tensor_preservers(cm, &DenseTensor::new(&assoc));
            let mut taut: Vec<ColorPermutation> = aaut
                .iter()
                .flat_map(|a| [a.clone(), a.compose(&tau)])
                .collect();
            taut.sort();
            taut.dedup();
            (Some(aaut), Some(taut))
        }
        Err(_) => (None, None),
    };
    Ok(AutGroupReport { jaut, aaut, taut, tau })
}

/// All subgroups of the `jaut` group, ordered by size and then by elements.
pub fn enumerate_subgroups(auts: &AutGroupReport) -> Result<Vec<Vec<ColorPermutation>>, AlgMapsError> {
    enumerate_subgroups_of(&auts.jaut, DEFAULT_GROUP_BOUND)
}

/// Joins cyclic subgroups one at a time until no new subgroup appears;
/// every subgroup is reached since it is the join of its cyclic subgroups.
pub fn enumerate_subgroups_of(
    group: &[ColorPermutation],
    bound: usize,
) -> Result<Vec<Vec<ColorPermutation>>, AlgMapsError> {
    let order = group.len();
    if order > bound {
        return Err(AlgMapsError::GroupTooLarge { order, bound });
    }
    if order == 0 {
        return Ok(Vec::new());
    }
    let index: HashMap<&ColorPermutation, usize> = group.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mul: Vec<Vec<usize>> = group
        .iter()
        .map(|a| {
            group
                .iter()
                .map(|b| {
                    *index
                        .get(&a.compose(b))
                        .expect("the enumerated set is closed under composition")
                })
                .collect()
        })
        .collect();
    let identity = group
        .iter()
        .position(ColorPermutation::is_identity)
        .expect("group contains the identity");
    let words = order.div_ceil(64);
    type Bits = Vec<u64>;
    let has = |b: &Bits, i: usize| b[i / 64] >> (i % 64) & 1 == 1;

    let generate = |gens: &[usize]| -> Bits {
        let mut bits = vec![0u64; words];
        bits[identity / 64] |= 1 << (identity % 64);
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = mul[x][g];
                if bits[y / 64] >> (y % 64) & 1 == 0 {
                    bits[y / 64] |= 1 << (y % 64);
                    queue.push_back(y);
                }
            }
        }
        bits
    };

    let mut cyclic: Vec<(usize, Bits)> = Vec::new();
    let mut seen_cyclic = HashSet::new();
    for g in 0..order {
        let bits = generate(&[g]);
        if seen_cyclic.insert(bits.clone()) {
            cyclic.push((g, bits));
        }
    }

    let mut seen: HashSet<Bits> = HashSet::new();
    let mut found: Vec<(Bits, Vec<usize>)> = Vec::new();
    let trivial = generate(&[]);
    seen.insert(trivial.clone());
    found.push((trivial, Vec::new()));
    let mut next = 0;
    while next < found.len() {
        let (bits, gens) = found[next].clone();
        next += 1;
        for (g, cbits) in &cyclic {
            if cbits.iter().zip(&bits).all(|(c, b)| c & !b == 0) {
                continue;
            }
            let mut gens2 = gens.clone();
            gens2.push(*g);
            let joined = generate(&gens2);
            if seen.insert(joined.clone()) {
                found.push((joined, gens2));
            }
        }
    }

    let mut subgroups: Vec<Vec<usize>> = found
        .into_iter()
        .map(|(bits, _)| (0..order).filter(|&i| has(&bits, i)).collect())
        .collect();
    subgroups.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(subgroups
        .into_iter()
        .map(|s| s.into_iter().map(|i| group[i].clone()).collect())
        .collect())
}

fn preserves(cm: &ColorMatrix, tensor: &StructureTensor, phi: &ColorPermutation) -> bool {
    let diag_ok = cm
        .diagonal_colors()
        .iter()
        .all(|&d| cm.is_diagonal_color(phi.apply(d)));
    diag_ok
        && tensor
            .nonzero()
            .iter()
            .all(|(&(i, j, t), &v)| tensor.get(phi.apply(i), phi.apply(j), phi.apply(t)) == v)
}

fn orbit_labels(rank: usize, phi: &[ColorPermutation]) -> Vec<usize> {
    (0..rank)
        .map(|c| phi.iter().map(|p| p.apply(c)).min().unwrap_or(c))
        .collect()
}

/// The rainbow whose classes are the `Φ`-orbit unions of classes of `cm`.
pub fn algebraic_fusion(cm: &ColorMatrix, phi: &[ColorPermutation]) -> Result<ColorMatrix, AlgMapsError> {
    let jordan = intersection_numbers(cm, ClosureKind::Jordan).map_err(|_| AlgMapsError::NotAJC)?;
    let r = cm.rank();
    let reject = |why: String| AlgMapsError::NotASubgroupOfJAut(why);
    if !phi.iter().any(ColorPermutation::is_identity) {
        return Err(reject("the identity is missing".into()));
    }
    let members: HashSet<&ColorPermutation> = phi.iter().collect();
    for p in phi {
        if p.rank() != r {
            return Err(reject(format!("a map has rank {} instead of {r}", p.rank())));
        }
        if !preserves(cm, &jordan, p) {
            return Err(reject(format!("{:?} does not preserve the Jordan tensor", p.map())));
        }
        for q in phi {
            if !members.contains(&p.compose(q)) {
                return Err(reject("not closed under composition".into()));
            }
        }
    }
    let labels = orbit_labels(r, phi);
    let cells: Vec<usize> = cm.colors().iter().map(|&c| labels[c]).collect();
    let fused = ColorMatrix::from_labels(cm.order(), &cells)
        .map_err(|e| AlgMapsError::InvariantViolation(format!("fusion is not a rainbow: {e}")))?;
    if intersection_numbers(&fused, ClosureKind::Jordan).is_err() {
        return Err(AlgMapsError::InvariantViolation("fusion is not a JC".into()));
    }
    let t = fused.transpose_map();
    for c in 0..fused.rank() {
        let symmetric = t[c] == c;
        if !symmetric && !fused.class(c).intersection(&fused.class(t[c])).is_empty() {
            return Err(AlgMapsError::InvariantViolation(format!(
                "fused class {c} is neither symmetric nor anti-symmetric"
            )));
        }
    }
    Ok(fused)
}

/// A `Φ ≤ JAut(candidate)` whose algebraic fusion is `target`, if any.
///
/// Any such `Φ` lies in the stabilizer `K` of every target class, and then
/// the `K`-orbits coincide with the target classes; so testing `K` decides.
pub fn fusion_search(
    target: &ColorMatrix,
    candidate: &ColorMatrix,
) -> Result<Option<Vec<ColorPermutation>>, AlgMapsError> {
    if target.order() != candidate.order() {
        return Err(AlgMapsError::NotAFusion("different point sets".into()));
    }
    if !is_fusion_of(target, candidate).unwrap_or(false) {
        return Err(AlgMapsError::NotAFusion("target is not a fusion of the candidate".into()));
    }
    if intersection_numbers(candidate, ClosureKind::Associative).is_err() {
        return Err(AlgMapsError::NotAFusion("candidate is not a CC".into()));
    }
    let mut target_of = vec![0usize; candidate.rank()];
    for (cell, &c) in candidate.colors().iter().enumerate() {
        target_of[c] = target.colors()[cell];
    }
    let auts = jaut_enumerate_bounded(candidate, usize::MAX)?;
    let stabilizer: Vec<ColorPermutation> = auts
        .jaut
        .into_iter()
        .filter(|p| (0..candidate.rank()).all(|c| target_of[p.apply(c)] == target_of[c]))
        .collect();
    let fused = algebraic_fusion(candidate, &stabilizer)?;
    Ok(fused.same_partition(target).then_some(stabilizer))
}

/// The 2-orbit configuration of a semiregular group given by generators.
pub fn semiregular_two_orbit_config(gens: &[Perm], n: usize) -> Result<ColorMatrix, AlgMapsError> {
    if let Some(i) = gens.iter().position(|g| g.len() != n || !perm::is_permutation(g)) {
        return Err(AlgMapsError::NotSemiregular(format!("generator {i} is not a permutation of {n} points")));
    }
    let group = perm::group_closure(n, gens);
    if let Some(g) = group
        .iter()
        .find(|g| !perm::is_identity(g) && g.iter().enumerate().any(|(x, &y)| x == y))
    {
        return Err(AlgMapsError::NotSemiregular(format!("{g:?} has a fixed point")));
    }
    Ok(perm::two_orbit_partition(n, &group))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionWitness {
    pub cc: ColorMatrix,
    pub phi: Vec<ColorPermutation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutonomyCertificate {
    pub order: usize,
    pub nucleus_size: usize,
    pub wl_rank: usize,
    /// Distinct class sizes of the WL-closure, ascending.
    pub wl_class_sizes: Vec<usize>,
    /// The WL-closure equals the 2-orbits of `{r_s : s ∈ N_ρ}`.
    pub matches_nucleus_two_orbits: bool,
    pub nucleus_is_center: bool,
    /// `|N_ρ| = |S| / 8`.
    pub nucleus_is_eighth: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutonomyVerdict {
    Autonomous(AutonomyCertificate),
    NonAutonomous(FusionWitness),
    NotApplicable(String),
    Undetermined(String),
}

impl AutonomyVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            AutonomyVerdict::Autonomous(_) => "autonomous",
            AutonomyVerdict::NonAutonomous(_) => "non_autonomous",
            AutonomyVerdict::NotApplicable(_) => "not_applicable",
            AutonomyVerdict::Undetermined(_) => "undetermined",
        }
    }
}

fn trivial_witness(cm: &ColorMatrix) -> FusionWitness {
    FusionWitness {
        cc: cm.clone(),
        phi: vec![ColorPermutation::identity(cm.rank())],
    }
}

/// Autonomy of a thin regular Jordan scheme.
///
/// A non-coherent one is autonomous as soon as the classes of its WL-closure
/// (the 2-orbits of the right nucleus acting by right translations) are
/// smaller than `|S|/2`: a coherent configuration fusing onto it would
/// need classes of size `|S|/2` inside them.
pub fn autonomy_thin_regular(js: &SchemeRecord) -> Result<AutonomyVerdict, AlgMapsError> {
    if !js.flags.is_js {
        return Err(AlgMapsError::NotThinRegularJS("not a Jordan scheme".into()));
    }
    let cm = js.cm.canonical();
    if !cm.is_thin() || !cm.is_regular() {
        return Ok(AutonomyVerdict::NotApplicable("not thin and regular".into()));
    }
    if js.flags.is_cc {
        return Ok(AutonomyVerdict::NonAutonomous(trivial_witness(&cm)));
    }
    let n = cm.order();
    let l = diamond_from_scheme(&cm, 0)?;
    let nucleus: Vec<usize> = (0..n)
        .filter(|&z| (0..n).all(|x| (0..n).all(|y| l.mul(x, l.mul(y, z)) == l.mul(l.mul(x, y), z))))
        .collect();
    let center = crate::loops::loop_properties(&l).center;

    let wl = closure(&cm, ClosureKind::Associative);
    let mut sizes = wl.class_sizes().to_vec();
    sizes.sort_unstable();
    sizes.dedup();

    // element b sits at the point b(0); r_s moves b(0) to (b◊s)(0)
    let mut point_of = vec![0usize; n];
    for y in 0..n {
        point_of[cm.color(0, y)] = y;
    }
    let gens: Vec<Perm> = nucleus
        .iter()
        .map(|&s| {
            let mut g = vec![0usize; n];
            for b in 0..n {
                g[point_of[b]] = point_of[l.mul(b, s)];
            }
            g
        })
        .collect();
    let group = perm::group_closure(n, &gens);
    let matches = group.len() == nucleus.len() && perm::two_orbit_partition(n, &group).same_partition(&wl);

    let cert = AutonomyCertificate {
        order: n,
        nucleus_size: nucleus.len(),
        wl_rank: wl.rank(),
        wl_class_sizes: sizes.clone(),
        matches_nucleus_two_orbits: matches,
        nucleus_is_center: nucleus == center,
        nucleus_is_eighth: nucleus.len() * 8 == n,
    };
    if matches && sizes == [nucleus.len()] && 2 * nucleus.len() < n {
        Ok(AutonomyVerdict::Autonomous(cert))
    } else {
        Ok(AutonomyVerdict::Undetermined(format!(
            "right nucleus of size {} does not rule out a fusion",
            nucleus.len()
        )))
    }
}

pub const DEFAULT_FISSION_NODE_CAP: usize = 200_000;

/// Visits every CC on the point set of `js` of which `js` is a fusion, each
/// once, coarsest (the WL-closure) first. Returns `Ok(false)` when the node
/// cap cut the search short.
///
/// A CC strictly finer than a visited one splits some class `c`; taking one
/// of its classes `a ⊂ c` and closing the partition refined by `(a, a^t)`
/// gives a CC between the two, so 2-splits followed by closure reach all.
pub fn for_each_coherent_fission(
    js: &ColorMatrix,
    node_cap: usize,
    mut visit: impl FnMut(&ColorMatrix) -> ControlFlow<()>,
) -> bool {
    let root = closure(js, ClosureKind::Associative);
    let n = root.order();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([root.colors().to_vec()]);
    let mut queue = VecDeque::from([root]);
    while let Some(cc) = queue.pop_front() {
        if visit(&cc).is_break() {
            return true;
        }
        for c in 0..cc.rank() {
            let cells = cc.class_cells(c);
            let k = cells.len();
            if !(2..=24).contains(&k) {
                continue;
            }
            for mask in 1u32..(1 << (k - 1)) {
                // cells[0] always sits outside the chosen part
                let mut part = vec![false; n * n];
                for (i, &(a, b)) in cells.iter().enumerate().skip(1) {
                    if mask >> (i - 1) & 1 == 1 {
                        part[a * n + b] = true;
                    }
                }
                let labels: Vec<(usize, bool, bool)> = (0..n * n)
                    .map(|cell| {
                        let (a, b) = (cell / n, cell % n);
                        (cc.colors()[cell], part[cell], part[b * n + a])
                    })
                    .collect();
                let seed = ColorMatrix::from_labels(n, &labels).expect("transpose-symmetric refinement");
                let child = closure(&seed, ClosureKind::Associative);
                if seen.insert(child.colors().to_vec()) {
                    if seen.len() > node_cap {
                        return false;
                    }
                    queue.push_back(child);
                }
            }
        }
    }
    true
}

/// Exhaustive autonomy check for tiny orders: searches every coherent
/// fission of `js` for one that fuses onto it algebraically.
pub fn brute_force_autonomy(js: &SchemeRecord, order_bound: usize) -> Result<AutonomyVerdict, AlgMapsError> {
    if js.cm.order() > order_bound {
        return Err(AlgMapsError::OrderTooLarge {
            order: js.cm.order(),
            bound: order_bound,
        });
    }
    if !js.flags.is_jc {
        return Err(AlgMapsError::NotAJC);
    }
    let mut witness = None;
    let mut failure = None;
    let complete = for_each_coherent_fission(&js.cm, DEFAULT_FISSION_NODE_CAP, |cc| match fusion_search(&js.cm, cc) {
        Ok(Some(phi)) => {
            witness = Some(FusionWitness { cc: cc.clone(), phi });
            ControlFlow::Break(())
        }
        Ok(None) => ControlFlow::Continue(()),
        Err(e) => {
            failure = Some(e);
            ControlFlow::Break(())
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(match witness {
        Some(w) => AutonomyVerdict::NonAutonomous(w),
        None if complete => AutonomyVerdict::Autonomous(AutonomyCertificate {
            order: js.cm.order(),
            nucleus_size: 0,
            wl_rank: closure(&js.cm, ClosureKind::Associative).rank(),
            wl_class_sizes: Vec::new(),
            matches_nucleus_two_orbits: false,
            nucleus_is_center: false,
            nucleus_is_eighth: false,
        }),
        None => AutonomyVerdict::Undetermined("fission search hit its node cap".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::loops::{scheme_from_loop, LoopSchemeOutcome};
    use crate::rainbow::tests::thin_cyclic;
    use crate::rainbow::validate_rainbow;
    use crate::schemes::symmetrize;

    fn cp(v: &[usize]) -> ColorPermutation {
        ColorPermutation::new(v.to_vec())
    }

    /// All color permutations fixing the diagonal set that preserve the tensor.
    fn brute_force_preservers(cm: &ColorMatrix, kind: ClosureKind) -> Vec<ColorPermutation> {
        let tensor = intersection_numbers(cm, kind).unwrap();
        let r = cm.rank();
        let mut out = Vec::new();
        let mut p: Vec<usize> = (0..r).collect();
        fn rec(
            k: usize,
            p: &mut Vec<usize>,
            out: &mut Vec<ColorPermutation>,
            cm: &ColorMatrix,
            tensor: &StructureTensor,
        ) {
            if k == p.len() {
                let phi = ColorPermutation::new(p.clone());
                if preserves(cm, tensor, &phi) {
                    out.push(phi);
                }
                return;
            }
            for i in k..p.len() {
                p.swap(k, i);
                rec(k + 1, p, out, cm, tensor);
                p.swap(k, i);
            }
        }
        rec(0, &mut p, &mut out, cm, &tensor);
        out.sort();
        out
    }

    #[test]
    fn jaut_examples() {
        let z3 = jaut_enumerate(&thin_cyclic(3)).unwrap();
        assert_eq!(z3.jaut, vec![cp(&[0, 1, 2]), cp(&[0, 2, 1])]);
        assert_eq!(z3.taut.as_ref().unwrap(), &z3.jaut);
        let z5 = jaut_enumerate(&thin_cyclic(5)).unwrap();
        assert_eq!(z5.jaut.len(), 4);
        assert!(z5.jaut.contains(&z5.tau));
        let trivial = validate_rainbow(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(jaut_enumerate(&trivial).unwrap().jaut, vec![cp(&[0, 1])]);
    }

    #[test]
    fn backtracking_matches_brute_force() {
        let cases = [
            thin_cyclic(5),
            fixtures::thin_group_scheme(&fixtures::s3()),
            semiregular_two_orbit_config(&[vec![1, 0, 3, 2]], 4).unwrap(),
        ];
        for cm in cases {
            let rep = jaut_enumerate(&cm).unwrap();
            assert_eq!(rep.jaut, brute_force_preservers(&cm, ClosureKind::Jordan));
            assert_eq!(rep.aaut.unwrap(), brute_force_preservers(&cm, ClosureKind::Associative));
        }
        let ex = validate_rainbow(&[vec![0, 1], vec![2, 0]]).unwrap();
        assert_eq!(jaut_enumerate(&ex).unwrap().jaut, brute_force_preservers(&ex, ClosureKind::Jordan));
    }

    #[test]
    fn jaut_of_non_jc_is_rejected() {
        let mut e = vec![0i64; 9];
        e[1] = 1;
        let seed = crate::rainbow::standard_basis(
            crate::relations::PointSet::new(3).unwrap(),
            &[crate::exact::ExactMatrix::from_integers(3, &e)],
        )
        .unwrap();
        assert_eq!(jaut_enumerate(&seed).unwrap_err(), AlgMapsError::NotAJC);
        assert!(matches!(
            jaut_enumerate_bounded(&thin_cyclic(5), 4),
            Err(AlgMapsError::RankTooLarge { rank: 5, bound: 4 })
        ));
    }

    #[test]
    fn subgroup_counts() {
        let z2 = jaut_enumerate(&thin_cyclic(3)).unwrap();
        assert_eq!(enumerate_subgroups(&z2).unwrap().len(), 2);
        let z4 = jaut_enumerate(&thin_cyclic(5)).unwrap();
        assert_eq!(enumerate_subgroups(&z4).unwrap().len(), 3);
        // JAut of thin Z2² is Aut(Z2²) = S3: six subgroups
        let k4 = jaut_enumerate(&fixtures::thin_group_scheme(&fixtures::abelian(&[2, 2]))).unwrap();
        assert_eq!(k4.jaut.len(), 6);
        assert_eq!(enumerate_subgroups(&k4).unwrap().len(), 6);
        // Klein four group of color maps on 4 colors
        let v4 = vec![cp(&[0, 1, 2, 3]), cp(&[1, 0, 3, 2]), cp(&[2, 3, 0, 1]), cp(&[3, 2, 1, 0])];
        assert_eq!(enumerate_subgroups_of(&v4, 16).unwrap().len(), 5);
        assert!(matches!(
            enumerate_subgroups_of(&v4, 3),
            Err(AlgMapsError::GroupTooLarge { order: 4, bound: 3 })
        ));
    }

    #[test]
    fn fusion_examples() {
        let z5 = thin_cyclic(5);
        let auts = jaut_enumerate(&z5).unwrap();
        assert_eq!(algebraic_fusion(&z5, &[ColorPermutation::identity(5)]).unwrap(), z5);
        let inv = vec![ColorPermutation::identity(5), auts.tau.clone()];
        assert!(algebraic_fusion(&z5, &inv).unwrap().same_partition(&symmetrize(&z5)));
        let z3 = thin_cyclic(3);
        let all = jaut_enumerate(&z3).unwrap().jaut;
        assert_eq!(algebraic_fusion(&z3, &all).unwrap().rank(), 2);
        assert!(matches!(
            algebraic_fusion(&z5, std::slice::from_ref(&auts.tau)),
            Err(AlgMapsError::NotASubgroupOfJAut(_))
        ));
    }

    #[test]
    fn fusion_search_examples() {
        let z5 = thin_cyclic(5);
        let phi = fusion_search(&symmetrize(&z5), &z5).unwrap().unwrap();
        assert_eq!(phi.len(), 2);
        assert!(phi.contains(&ColorPermutation::new(z5.transpose_map().to_vec())));
        assert_eq!(fusion_search(&z5, &z5).unwrap().unwrap(), vec![ColorPermutation::identity(5)]);

        let example = validate_rainbow(&[vec![0, 1], vec![2, 0]]).unwrap();
        let discrete = validate_rainbow(&[vec![0, 2], vec![3, 1]]).unwrap();
        let phi = fusion_search(&example, &discrete).unwrap().unwrap();
        assert_eq!(phi.len(), 2);
        assert!(matches!(fusion_search(&discrete, &example), Err(AlgMapsError::NotAFusion(_))));
    }

    #[test]
    fn semiregular_configs() {
        let cm = semiregular_two_orbit_config(&[vec![1, 0, 3, 2]], 4).unwrap();
        assert_eq!(cm.rank(), 8);
        assert!(cm.class_sizes().iter().all(|&s| s == 2));
        let regular = semiregular_two_orbit_config(&[vec![1, 2, 3, 0]], 4).unwrap();
        assert!(regular.same_partition(&thin_cyclic(4)));
        assert_eq!(semiregular_two_orbit_config(&[], 3).unwrap().rank(), 9);
        assert!(matches!(
            semiregular_two_orbit_config(&[vec![1, 0, 2]], 3),
            Err(AlgMapsError::NotSemiregular(_))
        ));
    }

    #[test]
    fn jaut_equals_taut_on_semiregular_configs() {
        for (gens, n) in [
            (vec![vec![1, 0, 3, 2]], 4),
            (vec![vec![1, 2, 0, 4, 5, 3]], 6),
        ] {
            let rep = jaut_enumerate(&semiregular_two_orbit_config(&gens, n).unwrap()).unwrap();
            assert_eq!(Some(&rep.jaut), rep.taut.as_ref());
            for p in &rep.jaut {
                assert_eq!(p.compose(&rep.tau), rep.tau.compose(p));
            }
        }
    }

    #[test]
    fn autonomy_on_octonions() {
        let LoopSchemeOutcome::Scheme(rec) = scheme_from_loop(&fixtures::o16()).unwrap() else {
            panic!("O16 is RA");
        };
        let AutonomyVerdict::Autonomous(cert) = autonomy_thin_regular(&rec).unwrap() else {
            panic!("O16 scheme is autonomous");
        };
        assert_eq!(cert.order, 16);
        assert_eq!(cert.nucleus_size, 2);
        assert_eq!(cert.wl_rank, 128);
        assert_eq!(cert.wl_class_sizes, vec![2]);
        assert!(cert.matches_nucleus_two_orbits && cert.nucleus_is_center && cert.nucleus_is_eighth);

        let q8 = SchemeRecord::analyze(fixtures::thin_group_scheme(&fixtures::q8()));
        assert!(matches!(autonomy_thin_regular(&q8).unwrap(), AutonomyVerdict::NonAutonomous(_)));
        let ex = SchemeRecord::analyze(validate_rainbow(&[vec![0, 1], vec![2, 0]]).unwrap());
        assert!(matches!(autonomy_thin_regular(&ex).unwrap(), AutonomyVerdict::NotApplicable(_)));
    }

    #[test]
    fn brute_force_examples() {
        let ex = SchemeRecord::analyze(validate_rainbow(&[vec![0, 1], vec![2, 0]]).unwrap());
        let AutonomyVerdict::NonAutonomous(w) = brute_force_autonomy(&ex, 8).unwrap() else {
            panic!("the order-two example is a fusion of the discrete CC");
        };
        assert_eq!(w.cc.rank(), 4);

        let trivial = SchemeRecord::analyze(
            validate_rainbow(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap(),
        );
        let AutonomyVerdict::NonAutonomous(w) = brute_force_autonomy(&trivial, 8).unwrap() else {
            panic!("a CC is a fusion of itself");
        };
        assert_eq!(w.phi, vec![ColorPermutation::identity(2)]);

        let big = SchemeRecord::analyze(thin_cyclic(9));
        assert!(matches!(
            brute_force_autonomy(&big, 8),
            Err(AlgMapsError::OrderTooLarge { order: 9, bound: 8 })
        ));
    }

    #[test]
    fn fission_search_reaches_thin_z5_under_its_symmetrization() {
        let z5 = thin_cyclic(5);
        let sym = symmetrize(&z5);
        let mut hit = None;
        let complete = for_each_coherent_fission(&sym, DEFAULT_FISSION_NODE_CAP, |cc| {
            if cc.same_partition(&z5) {
                hit = Some(fusion_search(&sym, cc).unwrap());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        assert!(complete);
        let phi = hit.expect("thin Z5 is a coherent fission").unwrap();
        assert_eq!(phi.len(), 2);
    }
}
