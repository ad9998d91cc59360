//! Coherent (WL) closure and coherent Jordan closure by fixed-point color
//! refinement.
//!
//! One round recolors every cell `(α, β)` by its old color together with the
//! multiset of colored 2-paths through it: ordered pairs
//! `(S(α,γ), S(γ,β))` for the associative product, unordered pairs for the
//! Jordan product. Multiplicities are exact path counts, so the round is
//! equivalent to refining by the `(α, β)` entries of every product
//! `und(s_i)·und(s_j)` (resp. `und(s_i)·und(s_j) + und(s_j)·und(s_i)`).

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::perm::{self, Perm};
use crate::rainbow::{standard_basis, ColorMatrix, ExactMatrix, RainbowError};
use crate::relations::{PointSet, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosureKind {
    /// Closed under the matrix product: coherent configurations.
    Associative,
    /// Closed under the Jordan product: coherent J-configurations.
    Jordan,
}

impl ClosureKind {
    pub fn name(self) -> &'static str {
        match self {
            ClosureKind::Associative => "associative",
            ClosureKind::Jordan => "jordan",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("NotAPermutation: generator {index} is not a permutation of the point set")]
    NotAPermutation { index: usize },
    #[error("NotTransitive: the generated group has {orbits} orbits")]
    NotTransitive { orbits: usize },
    #[error("EmptyGeneratorSet: at least one permutation is required")]
    EmptyGeneratorSet,
    #[error(transparent)]
    Rainbow(#[from] RainbowError),
}

type Signature = (usize, Vec<(usize, usize, u32)>);

fn cell_signature(cm: &ColorMatrix, kind: ClosureKind, a: usize, b: usize) -> Signature {
    let n = cm.order();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .map(|g| {
            let (x, y) = (cm.color(a, g), cm.color(g, b));
            match kind {
                ClosureKind::Associative => (x, y),
                ClosureKind::Jordan => (x.min(y), x.max(y)),
            }
        })
        .collect();
    pairs.sort_unstable();
    let mut runs: Vec<(usize, usize, u32)> = Vec::new();
    for (x, y) in pairs {
        match runs.last_mut() {
            Some(last) if last.0 == x && last.1 == y => last.2 += 1,
            _ => runs.push((x, y, 1)),
        }
    }
    (cm.color(a, b), runs)
}

/// One refinement round. The result is canonical and refines `current`; it
/// has the same rank exactly when the span of `current` is closed under the
/// product selected by `kind`.
pub fn refine_step(current: &ColorMatrix, kind: ClosureKind) -> ColorMatrix {
    let n = current.order();
    let signatures: Vec<Signature> = (0..n * n)
        .into_par_iter()
        .map(|i| cell_signature(current, kind, i / n, i % n))
        .collect();
    let mut ids: HashMap<&Signature, usize> = HashMap::new();
    let labels: Vec<usize> = signatures
        .iter()
        .map(|s| {
            let next = ids.len();
            *ids.entry(s).or_insert(next)
        })
        .collect();
    ColorMatrix::from_labels(n, &labels).expect("refinement of a rainbow is a rainbow")
}

/// The coarsest fission of `seed` whose span is closed under the selected
/// product. The result is canonical.
pub fn closure(seed: &ColorMatrix, kind: ClosureKind) -> ColorMatrix {
    closure_with_rounds(seed, kind).0
}

/// Like [`closure`], also reporting how many proper refinement rounds ran.
pub fn closure_with_rounds(seed: &ColorMatrix, kind: ClosureKind) -> (ColorMatrix, usize) {
    let mut current = seed.canonical();
    let mut rounds = 0;
    loop {
        let next = refine_step(&current, kind);
        if next.rank() == current.rank() {
            return (current, rounds);
        }
        current = next;
        rounds += 1;
    }
}

/// Closure of the rainbow spanned by arbitrary matrices (plus `I`, `J`).
pub fn closure_of_matrices(
    domain: PointSet,
    mats: &[ExactMatrix],
    kind: ClosureKind,
) -> Result<ColorMatrix, ClosureError> {
    Ok(closure(&standard_basis(domain, mats)?, kind))
}

#[derive(Debug, Clone)]
pub struct PermutationClosureReport {
    /// `WL` of the permutation matrices.
    pub closure: ColorMatrix,
    /// The centralizer of the generated group in `Sym(Ω)`, sorted.
    pub centralizer: Vec<Perm>,
    /// 2-orbits of the centralizer.
    pub two_orbits: ColorMatrix,
    pub agree: bool,
}

/// Centralizer in `Sym(Ω)` of the transitive group generated by `gens`.
///
/// A centralizing permutation is fixed by the image of point 0, so each of
/// the `n` candidates is propagated along the generators and then checked.
pub fn centralizer_of_transitive(n: usize, gens: &[Perm]) -> Vec<Perm> {
    let mut out = Vec::new();
    'candidate: for target in 0..n {
        let mut phi = vec![usize::MAX; n];
        phi[0] = target;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for g in gens {
                let (y, img) = (g[x], g[phi[x]]);
                if phi[y] == usize::MAX {
                    phi[y] = img;
                    stack.push(y);
                } else if phi[y] != img {
                    continue 'candidate;
                }
            }
        }
        if !perm::is_permutation(&phi) {
            continue;
        }
        if gens
            .iter()
            .all(|g| (0..n).all(|x| phi[g[x]] == g[phi[x]]))
        {
            out.push(phi);
        }
    }
    out.sort();
    out
}

/// WL-closure of a set of permutations of a transitive group, checked
/// against the 2-orbits of the group's centralizer.
pub fn wl_closure_of_permutation_set(
    perms: &[Relation],
) -> Result<PermutationClosureReport, ClosureError> {
    let first = perms.first().ok_or(ClosureError::EmptyGeneratorSet)?;
    let n = first.size();
    let mut gens = Vec::with_capacity(perms.len());
    for (index, r) in perms.iter().enumerate() {
        match r.as_permutation() {
            Some(p) if r.size() == n => gens.push(p),
            _ => return Err(ClosureError::NotAPermutation { index }),
        }
    }
    let orbits = perm::orbits(n, &gens).len();
    if orbits != 1 {
        return Err(ClosureError::NotTransitive { orbits });
    }
    let mats: Vec<ExactMatrix> = perms.iter().map(ExactMatrix::from_relation).collect();
    let wl = closure_of_matrices(first.domain(), &mats, ClosureKind::Associative)?;
    let centralizer = centralizer_of_transitive(n, &gens);
    let two_orbits = perm::two_orbit_partition(n, &centralizer);
    let agree = wl.same_partition(&two_orbits);
    Ok(PermutationClosureReport {
        closure: wl,
        centralizer,
        two_orbits,
        agree,
    })
}
