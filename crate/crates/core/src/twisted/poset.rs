use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{self, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub id: String,
    pub degree: u32,
}

/// A finite nonnegatively graded poset. `less[y][x]` means `y < x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetFields", into = "PosetFields")]
pub struct GradedPoset {
    elements: Vec<Element>,
    less: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct PosetFields {
    elements: Vec<Element>,
    /// Pairs `[y, x]` with `y < x`; transitive closure is taken on input.
    order: Vec<[String; 2]>,
}

impl TryFrom<PosetFields> for GradedPoset {
    type Error = Error;

    fn try_from(f: PosetFields) -> Result<Self> {
        let ids: BTreeMap<&str, usize> =
            f.elements.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let mut pairs = Vec::with_capacity(f.order.len());
        for [y, x] in &f.order {
            let lookup = |id: &str| {
                ids.get(id)
                    .copied()
                    .ok_or_else(|| Error::model("twisted_chain", format!("unknown poset element {id:?}")))
            };
            pairs.push((lookup(y)?, lookup(x)?));
        }
        GradedPoset::from_relations(f.elements, &pairs)
    }
}

impl From<GradedPoset> for PosetFields {
    fn from(p: GradedPoset) -> Self {
        let mut order = Vec::new();
        for y in 0..p.len() {
            for x in 0..p.len() {
                if p.less[y][x] {
                    order.push([p.elements[y].id.clone(), p.elements[x].id.clone()]);
                }
            }
        }
        PosetFields {
            elements: p.elements,
            order,
        }
    }
}

impl GradedPoset {
    /// The transitive closure of the given relations `(y, x)` meaning `y < x`.
    pub fn from_relations(elements: Vec<Element>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = elements.len();
        let mut seen = std::collections::BTreeSet::new();
        for e in &elements {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::model("twisted_chain", format!("duplicate poset element {:?}", e.id)));
            }
        }
        let mut less = vec![vec![false; n]; n];
        for &(y, x) in relations {
            if y >= n || x >= n {
                return Err(Error::model("twisted_chain", "poset relation out of range"));
            }
            less[y][x] = true;
        }
        for z in 0..n {
            for y in 0..n {
                if less[y][z] {
                    for x in 0..n {
                        if less[z][x] {
                            less[y][x] = true;
                        }
                    }
                }
            }
        }
        if (0..n).any(|i| less[i][i]) {
            return Err(Error::model("twisted_chain", "poset relations contain a cycle"));
        }
        Ok(GradedPoset { elements, less })
    }

    /// Elements `e0 < e1 < ...` totally ordered by position.
    pub fn chain(degrees: &[u32]) -> Self {
        let elements = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| Element {
                id: format!("e{i}"),
                degree: d,
            })
            .collect();
        let rel: Vec<(usize, usize)> = (1..degrees.len()).map(|i| (i - 1, i)).collect();
        Self::from_relations(elements, &rel).expect("a chain is a poset")
    }

    pub fn empty() -> Self {
        GradedPoset {
            elements: Vec::new(),
            less: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.elements[i].degree
    }

    pub fn less(&self, y: usize, x: usize) -> bool {
        self.less[y][x]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.id == id)
    }

    /// Positions `(y, x)` an endomorphism of homogeneity `d` may occupy.
    pub fn allowed_entries(&self, d: i32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.len() {
            for x in 0..self.len() {
                if self.less[y][x] && self.degree(y) as i64 == self.degree(x) as i64 + d as i64 {
                    out.push((y, x));
                }
            }
        }
        out
    }

    /// Downward closed: `x in Q` and `y < x` imply `y in Q`.
    pub fn is_closed(&self, subset: &[usize]) -> bool {
        let mut member = vec![false; self.len()];
        for &i in subset {
            if i >= self.len() {
                return false;
            }
            member[i] = true;
        }
        (0..self.len()).all(|x| !member[x] || (0..self.len()).all(|y| !self.less[y][x] || member[y]))
    }

    /// The induced subposet on `subset`, in the given order.
    pub fn restrict(&self, subset: &[usize]) -> GradedPoset {
        GradedPoset {
            elements: subset.iter().map(|&i| self.elements[i].clone()).collect(),
            less: subset
                .iter()
                .map(|&y| subset.iter().map(|&x| self.less[y][x]).collect())
                .collect(),
        }
    }

    /// Disjoint union with no relations between the parts; ids of `other`
    /// are kept and must not clash.
    pub fn disjoint_union(&self, other: &GradedPoset) -> Result<GradedPoset> {
        let n = self.len();
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().cloned());
        let mut rel = Vec::new();
        for y in 0..n {
            for x in 0..n {
                if self.less[y][x] {
                    rel.push((y, x));
                }
            }
        }
        for y in 0..other.len() {
            for x in 0..other.len() {
                if other.less[y][x] {
                    rel.push((n + y, n + x));
                }
            }
        }
        GradedPoset::from_relations(elements, &rel)
    }

    pub fn shifted(&self, m: u32) -> GradedPoset {
        let mut out = self.clone();
        for e in &mut out.elements {
            e.degree += m;
        }
        out
    }

    pub fn max_degree(&self) -> u32 {
        self.elements.iter().map(|e| e.degree).max().unwrap_or(0)
    }

    /// Indices of elements in degree `d`.
    pub fn in_degree(&self, d: u32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degree(i) == d).collect()
    }
}

/// A strictly upper triangular endomorphism of homogeneity `degree`:
/// entry `(y, x)` is nonzero only if `y < x` and `deg y = deg x + degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct UTEndomorphism {
    pub matrix: QMatrix,
    pub degree: i32,
}

impl UTEndomorphism {
    pub fn zero(poset: &GradedPoset, degree: i32) -> Self {
        UTEndomorphism {
            matrix: QMatrix::zeros(poset.len(), poset.len()),
            degree,
        }
    }

    pub fn new(poset: &GradedPoset, matrix: QMatrix, degree: i32) -> Result<Self> {
        let e = UTEndomorphism { matrix, degree };
        e.check(poset)?;
        Ok(e)
    }

    pub fn check(&self, poset: &GradedPoset) -> Result<()> {
        let n = poset.len();
        if self.matrix.rows() != n || self.matrix.cols() != n {
            return Err(Error::model(
                "twisted_chain",
                format!("endomorphism is {}x{}, poset has {n} elements", self.matrix.rows(), self.matrix.cols()),
            ));
        }
        for (y, x, v) in self.matrix.nonzero_entries() {
            let deg_ok = poset.degree(y) as i64 == poset.degree(x) as i64 + self.degree as i64;
            if !poset.less(y, x) || !deg_ok {
                return Err(Error::model(
                    "twisted_chain",
                    format!(
                        "entry ({}, {}) = {} violates the upper triangular pattern of homogeneity {}",
                        poset.elements()[y].id,
                        poset.elements()[x].id,
                        rational::format(v),
                        self.degree
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Sparse `[row id, col id, "p/q"]` triples.
    pub fn to_entries(&self, poset: &GradedPoset) -> Vec<[String; 3]> {
        self.matrix
            .nonzero_entries()
            .map(|(y, x, v)| {
                [
                    poset.elements()[y].id.clone(),
                    poset.elements()[x].id.clone(),
                    rational::format(v),
                ]
            })
            .collect()
    }

    pub fn from_entries(poset: &GradedPoset, entries: &[[String; 3]], degree: i32) -> Result<Self> {
        let mut m = QMatrix::zeros(poset.len(), poset.len());
        for [y, x, v] in entries {
            let find = |id: &str| {
                poset
                    .index_of(id)
                    .ok_or_else(|| Error::model("twisted_chain", format!("unknown poset element {id:?}")))
            };
            let val: Q = rational::parse(v)?;
            m.add_at(find(y)?, find(x)?, &val);
        }
        Self::new(poset, m, degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn elems(degs: &[u32]) -> Vec<Element> {
        degs.iter()
            .enumerate()
            .map(|(i, &d)| Element {
                id: format!("p{i}"),
                degree: d,
            })
            .collect()
    }

    #[test]
    fn transitive_closure_and_cycles() {
        let p = GradedPoset::from_relations(elems(&[0, 1, 2]), &[(0, 1), (1, 2)]).unwrap();
        assert!(p.less(0, 2));
        assert!(GradedPoset::from_relations(elems(&[0, 1]), &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn closed_subsets() {
        let p = GradedPoset::chain(&[0, 1, 1]);
        assert!(p.is_closed(&[0, 1]));
        assert!(!p.is_closed(&[1]));
        assert!(p.is_closed(&[]));
    }

    #[test]
    fn ut_pattern_is_enforced() {
        let p = GradedPoset::chain(&[0, 1]);
        let mut m = QMatrix::zeros(2, 2);
        m.set(0, 1, q(3));
        assert!(UTEndomorphism::new(&p, m.clone(), -1).is_ok());
        assert!(UTEndomorphism::new(&p, m.clone(), 0).is_err());
        assert!(UTEndomorphism::new(&p, m.transpose(), 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = GradedPoset::chain(&[0, 1, 1, 2]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<GradedPoset>(&s).unwrap(), p);
    }
}
