//! Seeded random families for tests, suites and the acceptance run.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::QMatrix;
use crate::rational::q;
use crate::simplicial::{Simplex, SimplicialBase};

use super::family::DeltaFamily;
use super::poset::GradedPoset;

/// A random graded complex on a chain poset, together with its Betti
/// numbers (known by construction). `pairs` elements are cancelled in
/// pairs; the remaining `free` elements carry homology. The chain is sorted
/// by degree unless `shuffled`, in which case only each cancelling pair is
/// kept in order.
pub fn random_complex(
    rng: &mut ChaCha8Rng,
    pairs: usize,
    free: usize,
    max_degree: u32,
    shuffled: bool,
) -> (GradedPoset, QMatrix, Vec<usize>) {
    let max_degree = max_degree.max(1);
    let mut items: Vec<(u32, Option<usize>)> = Vec::new();
    for p in 0..pairs {
        let lo = rng.gen_range(0..max_degree);
        items.push((lo, Some(2 * p)));
        items.push((lo + 1, Some(2 * p + 1)));
    }
    for _ in 0..free {
        items.push((rng.gen_range(0..=max_degree), None));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    if shuffled {
        order.shuffle(rng);
        let mut pos: Vec<usize> = vec![0; items.len()];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        for p in 0..pairs {
            let (lo, hi) = (2 * p, 2 * p + 1);
            if pos[lo] > pos[hi] {
                order.swap(pos[lo], pos[hi]);
                pos.swap(lo, hi);
            }
        }
    } else {
        order.sort_by_key(|&i| (items[i].0, i));
    }
    let degrees: Vec<u32> = order.iter().map(|&i| items[i].0).collect();
    let poset = GradedPoset::chain(&degrees);
    let pos_of_tag: BTreeMap<usize, usize> = order
        .iter()
        .enumerate()
        .filter_map(|(pos, &i)| items[i].1.map(|t| (t, pos)))
        .collect();
    let n = degrees.len();
    let mut d0 = QMatrix::zeros(n, n);
    for p in 0..pairs {
        d0.set(pos_of_tag[&(2 * p)], pos_of_tag[&(2 * p + 1)], q(1));
    }
    let g = random_unipotent(rng, &poset);
    let d = &(&g * &d0) * &g.inverse().expect("unipotent");
    let mut betti = vec![0; max_degree as usize + 1];
    for (deg, tag) in &items {
        if tag.is_none() {
            betti[*deg as usize] += 1;
        }
    }
    (poset, d, betti)
}

/// Small random entries on the positions allowed for homogeneity `degree`.
pub fn random_ut(rng: &mut ChaCha8Rng, poset: &GradedPoset, degree: i32) -> QMatrix {
    let mut m = QMatrix::zeros(poset.len(), poset.len());
    for (y, x) in poset.allowed_entries(degree) {
        m.set(y, x, q(rng.gen_range(-2..=2)));
    }
    m
}

/// `1 + N` with `N` random, strictly upper triangular and degree-preserving.
pub fn random_unipotent(rng: &mut ChaCha8Rng, poset: &GradedPoset) -> QMatrix {
    &QMatrix::identity(poset.len()) + &random_ut(rng, poset, 0)
}

/// A gauge family over `base` with fiber `(poset, d)`.
pub fn random_gauge_family(rng: &mut ChaCha8Rng, base: SimplicialBase, poset: GradedPoset, d: &QMatrix) -> DeltaFamily {
    let gauges: Vec<QMatrix> = (0..base.n_vertices()).map(|_| random_unipotent(rng, &poset)).collect();
    DeltaFamily::gauge(base, poset, d, &gauges).expect("gauge families are well formed")
}

/// A family over `Delta^k` with acyclic fiber whose higher cochains are
/// obtained by solving the defining equation simplex by simplex, starting
/// from random gauge data on the 1-skeleton.
pub fn random_solved_family(rng: &mut ChaCha8Rng, k: usize, pairs: usize) -> DeltaFamily {
    let (poset, d, _) = random_complex(rng, pairs, 0, 2, true);
    let base = SimplicialBase::standard_simplex(k);
    let mut fam = random_gauge_family(rng, base.clone(), poset, &d);
    // phi_1 + phi_0(a) X + X phi_0(b) still solves the edge equation for
    // any X of homogeneity +1, and makes phi_2 generically nonzero
    for e in base.simplices(1) {
        let x = random_ut(rng, fam.poset(), 1);
        let shift = &(fam.phi(&e[..1]) * &x) + &(&x * fam.phi(&e[1..]));
        fam = fam
            .with_cochain(e, fam.phi(e) + &shift)
            .expect("shift keeps the pattern");
    }
    for dim in 2..=k {
        for s in base.simplices(dim) {
            assert!(fam.solve_on(s).expect("p >= 1"), "acyclic fibers admit solutions");
        }
    }
    fam
}

/// A random base with at most `max_vertices` vertices built from a few
/// random triangles and edges.
pub fn random_base(rng: &mut ChaCha8Rng, max_vertices: usize) -> SimplicialBase {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let mut facets: Vec<Simplex> = Vec::new();
    if n >= 2 {
        for _ in 0..rng.gen_range(0..=n) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                facets.push(vec![a, b]);
            }
        }
    }
    if n >= 3 && rng.gen_bool(0.5) {
        let mut t: Vec<usize> = (0..n).collect();
        for i in 0..3 {
            let j = rng.gen_range(i..n);
            t.swap(i, j);
        }
        facets.push(t[..3].to_vec());
    }
    SimplicialBase::from_facets(n, &facets).expect("random facets are valid")
}
