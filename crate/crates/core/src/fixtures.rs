//! Named groups and loops used by the examples, tests and CLI.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::loops::{construct_LGg, translation_rainbow, CayleyTable};
use crate::rainbow::ColorMatrix;

/// `Z_{n1} × Z_{n2} × …`, elements in mixed radix with the first factor fastest.
pub fn abelian(factors: &[usize]) -> CayleyTable {
    let n: usize = factors.iter().product();
    let digits = |mut x: usize| -> Vec<usize> {
        factors
            .iter()
            .map(|&f| {
                let d = x % f;
                x /= f;
                d
            })
            .collect()
    };
    CayleyTable::from_fn(n, |a, b| {
        let (da, db) = (digits(a), digits(b));
        let mut out = 0;
        for (k, &f) in factors.iter().enumerate().rev() {
            out = out * f + (da[k] + db[k]) % f;
        }
        out
    })
    .expect("abelian group table")
}

pub fn cyclic(n: usize) -> CayleyTable {
    abelian(&[n])
}

/// Dihedral group of order `2m`; `r^a s^b` is element `a + m·b`.
pub fn dihedral(m: usize) -> CayleyTable {
    CayleyTable::from_fn(2 * m, |x, y| {
        let (a, b) = (x % m, x / m);
        let (c, d) = (y % m, y / m);
        let rot = if b == 0 { a + c } else { a + m - c };
        rot % m + m * ((b + d) % 2)
    })
    .expect("dihedral group table")
}

pub fn s3() -> CayleyTable {
    dihedral(3)
}

pub fn d8() -> CayleyTable {
    dihedral(4)
}

pub const Q8_MINUS_ONE: usize = 1;
pub const Q8_I: usize = 2;
pub const Q8_J: usize = 4;
pub const Q8_K: usize = 6;

/// Quaternions in the order `1, −1, i, −i, j, −j, k, −k`.
pub fn q8() -> CayleyTable {
    // units 0..4 = 1, i, j, k; product of units as (negative, unit)
    fn units(u: usize, v: usize) -> (bool, usize) {
        match (u, v) {
            (0, x) | (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    }
    CayleyTable::from_fn(8, |a, b| {
        let (neg, u) = units(a / 2, b / 2);
        let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
        2 * u + usize::from(sign)
    })
    .expect("quaternion group table")
}

/// Chein's doubling `M(G, 2)` on `G ∪ Gu`, with `gu` stored as `g + |G|`.
pub fn chein_double(g: &CayleyTable) -> CayleyTable {
    let n = g.order();
    let inv = |x| g.right_inverse(x);
    CayleyTable::from_fn(2 * n, |p, q| {
        let (a, x) = (p % n, p / n);
        let (b, y) = (q % n, q / n);
        match (x, y) {
            (0, 0) => g.mul(a, b),
            (0, _) => n + g.mul(b, a),
            (_, 0) => n + g.mul(a, inv(b)),
            _ => g.mul(inv(b), a),
        }
    })
    .expect("Chein loop table")
}

/// The smallest non-associative Moufang loop, `M(S3, 2)`.
pub fn chein12() -> CayleyTable {
    chein_double(&s3())
}

/// The octonion loop `L(Q8, *, −1)`.
pub fn o16() -> CayleyTable {
    construct_LGg(&q8(), Q8_MINUS_ONE).expect("Q8 satisfies the L(G,*,g0) hypotheses")
}

/// `L(D8, *, e)`.
pub fn l_d8() -> CayleyTable {
    construct_LGg(&d8(), 0).expect("D8 satisfies the L(G,*,g0) hypotheses")
}

/// The thin scheme whose classes are the left translations of a group;
/// class `g` has color `g`.
pub fn thin_group_scheme(g: &CayleyTable) -> ColorMatrix {
    translation_rainbow(g).expect("left translations of a group form a rainbow")
}

fn random_reduced_latin(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    fn fill(rows: &mut [Vec<usize>], cell: usize, n: usize, rng: &mut ChaCha8Rng) -> bool {
        if cell == (n - 1) * (n - 1) {
            return true;
        }
        let (a, b) = (1 + cell / (n - 1), 1 + cell % (n - 1));
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&v| (0..b).all(|y| rows[a][y] != v) && (0..a).all(|x| rows[x][b] != v))
            .collect();
        candidates.shuffle(rng);
        for v in candidates {
            rows[a][b] = v;
            if fill(rows, cell + 1, n, rng) {
                return true;
            }
        }
        rows[a][b] = usize::MAX;
        false
    }
    let mut rows = vec![vec![usize::MAX; n]; n];
    for x in 0..n {
        rows[0][x] = x;
        rows[x][0] = x;
    }
    assert!(fill(&mut rows, 0, n, rng), "a reduced Latin square always exists");
    rows
}

/// `count` random loops of order `n` (reduced Latin squares), seeded.
pub fn random_loops(n: usize, count: usize, seed: u64) -> Vec<CayleyTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| CayleyTable::from_rows(&random_reduced_latin(n, &mut rng)).expect("reduced Latin square"))
        .collect()
}

fn has_lip(l: &CayleyTable) -> bool {
    let n = l.order();
    (0..n).all(|a| {
        let inv = l.left_inverse(a);
        (0..n).all(|b| l.mul(inv, l.mul(a, b)) == b)
    })
}

/// `count` random loops of order `n` without the left inverse property.
pub fn random_lip_failing(n: usize, count: usize, seed: u64) -> Vec<CayleyTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let l = CayleyTable::from_rows(&random_reduced_latin(n, &mut rng)).expect("reduced Latin square");
        if !has_lip(&l) {
            out.push(l);
        }
    }
    out
}

/// Parses a `SPEC` naming a group or loop: `cyclic:n`, `abelian:2x2x4`,
/// `named:S3|D8|Q8|Chein12|O16|LD8`.
pub fn from_spec(spec: &str) -> Option<CayleyTable> {
    let (kind, arg) = spec.split_once(':')?;
    match kind {
        "cyclic" => arg.parse().ok().filter(|&n| n > 0).map(cyclic),
        "abelian" => {
            let factors: Option<Vec<usize>> = arg
                .split('x')
                .map(|f| f.parse().ok().filter(|&n: &usize| n > 0))
                .collect();
            factors.map(|f| abelian(&f))
        }
        "named" => match arg.to_ascii_lowercase().as_str() {
            "s3" => Some(s3()),
            "d8" => Some(d8()),
            "q8" => Some(q8()),
            "chein12" => Some(chein12()),
            "o16" => Some(o16()),
            "ld8" => Some(l_d8()),
            _ => None,
        },
        _ => None,
    }
}
