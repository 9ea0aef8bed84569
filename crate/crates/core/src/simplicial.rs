//! Finite ordered simplicial complexes.
//!
//! Vertices are `0..n` with their natural order; a simplex is a strictly
//! increasing vertex list. Face `i` of a simplex omits its `i`-th vertex.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::q;

pub type Simplex = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BaseFields", into = "BaseFields")]
pub struct SimplicialBase {
    n_vertices: usize,
    by_dim: Vec<Vec<Simplex>>,
    index: BTreeMap<Simplex, usize>,
}

#[derive(Serialize, Deserialize)]
struct BaseFields {
    vertices: usize,
    facets: Vec<Simplex>,
}

impl TryFrom<BaseFields> for SimplicialBase {
    type Error = Error;

    fn try_from(f: BaseFields) -> Result<Self> {
        SimplicialBase::from_facets(f.vertices, &f.facets)
    }
}

impl From<SimplicialBase> for BaseFields {
    fn from(b: SimplicialBase) -> Self {
        BaseFields {
            vertices: b.n_vertices,
            facets: b.facets(),
        }
    }
}

/// `i`-th face of a simplex.
pub fn face(s: &[usize], i: usize) -> Simplex {
    s.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .collect()
}

/// Sign of the permutation sorting `vs` (entries distinct).
pub fn sort_sign(vs: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if vs[i] > vs[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl SimplicialBase {
    /// The face closure of the given simplices. Vertex lists are sorted;
    /// repeated vertices or out-of-range vertices are rejected.
    pub fn from_facets(n_vertices: usize, facets: &[Simplex]) -> Result<Self> {
        let mut all: BTreeSet<Simplex> = (0..n_vertices).map(|v| vec![v]).collect();
        for f in facets {
            let mut s = f.clone();
            s.sort_unstable();
            if s.is_empty() || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::model("simplicial", format!("invalid simplex {f:?}")));
            }
            if s.iter().any(|&v| v >= n_vertices) {
                return Err(Error::model(
                    "simplicial",
                    format!("simplex {f:?} uses a vertex outside 0..{n_vertices}"),
                ));
            }
            let n = s.len();
            for mask in 1u64..(1u64 << n) {
                all.insert((0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect());
            }
        }
        let dim = all.iter().map(|s| s.len()).max().unwrap_or(1);
        let mut by_dim = vec![Vec::new(); dim];
        let mut index = BTreeMap::new();
        for s in all {
            let d = s.len() - 1;
            index.insert(s.clone(), by_dim[d].len());
            by_dim[d].push(s);
        }
        Ok(SimplicialBase {
            n_vertices,
            by_dim,
            index,
        })
    }

    pub fn point() -> Self {
        Self::from_facets(1, &[]).expect("valid")
    }

    /// The standard simplex with vertices `0..=k`.
    pub fn standard_simplex(k: usize) -> Self {
        Self::from_facets(k + 1, &[(0..=k).collect()]).expect("valid")
    }

    /// A circle triangulated as an `n`-gon, `n >= 3`.
    pub fn circle(n: usize) -> Self {
        assert!(n >= 3, "a simplicial circle needs at least 3 vertices");
        let facets: Vec<Simplex> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        Self::from_facets(n, &facets).expect("valid")
    }

    /// Boundary of the 3-simplex, a 2-sphere.
    pub fn tetrahedron_boundary() -> Self {
        let facets = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        Self::from_facets(4, &facets).expect("valid")
    }

    /// Disjoint union of `self` with itself `copies` times; copy `c` uses
    /// vertices `c * n .. (c + 1) * n`.
    pub fn disjoint_copies(&self, copies: usize) -> Self {
        let n = self.n_vertices;
        let facets: Vec<Simplex> = (0..copies)
            .flat_map(|c| {
                self.facets()
                    .into_iter()
                    .map(move |s| s.iter().map(|v| v + c * n).collect())
            })
            .collect();
        Self::from_facets(n * copies, &facets).expect("valid")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.by_dim.get(d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index.contains_key(s)
    }

    /// Simplices not contained in a larger simplex.
    pub fn facets(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
        for d in 1..self.by_dim.len() {
            for s in &self.by_dim[d] {
                for i in 0..s.len() {
                    if let Some(idx) = self.index_of(&face(s, i)) {
                        covered.insert(&self.by_dim[d - 1][idx]);
                    }
                }
            }
        }
        self.by_dim
            .iter()
            .flatten()
            .filter(|s| !covered.contains(s))
            .cloned()
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..self.by_dim.len())
            .map(|d| if d % 2 == 0 { 1 } else { -1 } * self.count(d) as i64)
            .sum()
    }

    /// `d_n : C_n -> C_{n-1}`, rows indexed by `(n-1)`-simplices.
    pub fn boundary_matrix(&self, n: usize) -> QMatrix {
        let rows = if n == 0 { 0 } else { self.count(n - 1) };
        let mut m = QMatrix::zeros(rows, self.count(n));
        if n == 0 {
            return m;
        }
        for (c, s) in self.simplices(n).iter().enumerate() {
            for i in 0..s.len() {
                let r = self.index_of(&face(s, i)).expect("face closed");
                m.set(r, c, q(if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        m
    }

    /// Rational Betti numbers `b_0, ..., b_dim`.
    pub fn betti_numbers(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.dim() + 1).map(|n| self.boundary_matrix(n).rank()).collect();
        (0..=self.dim())
            .map(|n| self.count(n) - ranks[n] - ranks[n + 1])
            .collect()
    }

    /// Connected component label per vertex (labels are smallest vertices).
    pub fn components(&self) -> Vec<usize> {
        let mut label: Vec<usize> = (0..self.n_vertices).collect();
        fn find(label: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while label[r] != r {
                r = label[r];
            }
            label[v] = r;
            r
        }
        for e in self.simplices(1) {
            let a = find(&mut label, e[0]);
            let b = find(&mut label, e[1]);
            let (lo, hi) = (a.min(b), a.max(b));
            label[hi] = lo;
        }
        (0..self.n_vertices).map(|v| find(&mut label, v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_closure_and_counts() {
        let b = SimplicialBase::standard_simplex(2);
        assert_eq!((b.count(0), b.count(1), b.count(2)), (3, 3, 1));
        assert_eq!(b.euler_characteristic(), 1);
        assert_eq!(b.facets(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn betti_numbers_of_standard_spaces() {
        assert_eq!(SimplicialBase::point().betti_numbers(), vec![1]);
        assert_eq!(SimplicialBase::circle(5).betti_numbers(), vec![1, 1]);
        assert_eq!(SimplicialBase::tetrahedron_boundary().betti_numbers(), vec![1, 0, 1]);
        assert_eq!(SimplicialBase::standard_simplex(3).betti_numbers(), vec![1, 0, 0, 0]);
        assert_eq!(SimplicialBase::circle(3).disjoint_copies(2).betti_numbers(), vec![2, 2]);
    }

    #[test]
    fn boundary_squares_to_zero() {
        let b = SimplicialBase::standard_simplex(4);
        for n in 1..4 {
            assert!((&b.boundary_matrix(n) * &b.boundary_matrix(n + 1)).is_zero());
        }
    }

    #[test]
    fn components_and_signs() {
        let b = SimplicialBase::circle(4).disjoint_copies(3);
        let comps: BTreeSet<usize> = b.components().into_iter().collect();
        assert_eq!(comps.len(), 3);
        assert_eq!(sort_sign(&[0, 1, 2]), 1);
        assert_eq!(sort_sign(&[1, 0, 2]), -1);
        assert_eq!(sort_sign(&[2, 0, 1]), 1);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let b = SimplicialBase::tetrahedron_boundary();
        let s = serde_json::to_string(&b).unwrap();
        let back: SimplicialBase = serde_json::from_str(&s).unwrap();
        assert_eq!(b, back);
        assert!(serde_json::from_str::<SimplicialBase>(r#"{"vertices":2,"facets":[[0,3]]}"#).is_err());
        assert!(serde_json::from_str::<SimplicialBase>(r#"{"vertices":2,"facets":[[1,1]]}"#).is_err());
    }
}
