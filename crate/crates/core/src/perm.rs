//! Permutations of `0..n` as image vectors, and the few group operations the
//! rest of the crate needs at desk scale.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::rainbow::ColorMatrix;

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `(p ∘ q)(x) = p(q(x))`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&x| p[x]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(x, &y)| x == y)
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&y| y < p.len() && !std::mem::replace(&mut seen[y], true))
}

/// All elements of the group generated by `gens`, sorted.
pub fn group_closure(n: usize, gens: &[Perm]) -> Vec<Perm> {
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut queue = VecDeque::new();
    let id = identity(n);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = compose(s, &g);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    let mut out: Vec<Perm> = seen.into_iter().collect();
    out.sort();
    out
}

/// Orbits of the group generated by `gens`, each sorted, ordered by minimum.
pub fn orbits(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orbit = BTreeSet::new();
        let mut stack = vec![start];
        label[start] = id;
        while let Some(x) = stack.pop() {
            orbit.insert(x);
            for g in gens {
                let y = g[x];
                if label[y] == usize::MAX {
                    label[y] = id;
                    stack.push(y);
                }
            }
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

/// The partition of `Ω²` into 2-orbits of a group given by all its elements.
pub fn two_orbit_partition(n: usize, group: &[Perm]) -> ColorMatrix {
    let labels: Vec<(usize, usize)> = (0..n * n)
        .map(|i| {
            let (a, b) = (i / n, i % n);
            group
                .iter()
                .map(|h| (h[a], h[b]))
                .min()
                .expect("group contains the identity")
        })
        .collect();
    ColorMatrix::from_labels(n, &labels).expect("2-orbits of a group form a rainbow")
}
