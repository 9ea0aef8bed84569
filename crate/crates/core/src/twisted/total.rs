use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::q;
use crate::simplicial::face;

use super::family::DeltaFamily;

/// `C_*(B) (x)_phi (P, phi_0)`: basis `x (x) e` for simplices `x` of the base
/// and poset elements `e`, in total degree `dim x + deg e`, with boundary
///
/// `d(x (x) y) = sum_i (-1)^i d_i x (x) y - sum_p (-1)^p f_p x (x) phi_{n-p}(b_{n-p} x) y`
///
/// where `f_p` and `b_q` are the front `p`-face and back `q`-face.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedTensorProduct {
    /// `(simplex dimension, simplex index, poset element)` per basis vector.
    pub basis: Vec<(usize, usize, usize)>,
    pub degrees: Vec<u32>,
    pub boundary: QMatrix,
}

/// Assembles the twisted tensor product of a family over its base. The
/// structure group is trivial, so the functoriality condition on structure
/// maps holds automatically.
pub fn total_complex(fam: &DeltaFamily) -> TwistedTensorProduct {
    let base = fam.base();
    let poset = fam.poset();
    let np = poset.len();
    let mut offset = Vec::with_capacity(base.dim() + 1);
    let mut basis = Vec::new();
    for d in 0..=base.dim() {
        offset.push(basis.len());
        for s in 0..base.count(d) {
            for e in 0..np {
                basis.push((d, s, e));
            }
        }
    }
    let degrees = basis
        .iter()
        .map(|&(d, _, e)| d as u32 + poset.degree(e))
        .collect();
    let col_of = |d: usize, s: &[usize], e: usize| -> usize {
        offset[d] + base.index_of(s).expect("face of a base simplex") * np + e
    };
    let mut boundary = QMatrix::zeros(basis.len(), basis.len());
    for n in 0..=base.dim() {
        for (si, x) in base.simplices(n).iter().enumerate() {
            for y in 0..np {
                let col = offset[n] + si * np + y;
                if n > 0 {
                    for i in 0..=n {
                        let row = col_of(n - 1, &face(x, i), y);
                        boundary.add_at(row, col, &q(if i % 2 == 0 { 1 } else { -1 }));
                    }
                }
                for p in 0..=n {
                    let phi = fam.phi(&x[p..]);
                    let sgn = if p % 2 == 0 { q(-1) } else { q(1) };
                    for z in 0..np {
                        let v = phi.get(z, y);
                        if v.numer() != &0.into() {
                            let row = col_of(p, &x[..=p], z);
                            boundary.add_at(row, col, &(v * &sgn));
                        }
                    }
                }
            }
        }
    }
    TwistedTensorProduct {
        basis,
        degrees,
        boundary,
    }
}

impl TwistedTensorProduct {
    pub fn squares_to_zero(&self) -> bool {
        (&self.boundary * &self.boundary).is_zero()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    fn in_degree(&self, t: u32) -> Vec<usize> {
        (0..self.degrees.len()).filter(|&i| self.degrees[i] == t).collect()
    }

    /// `d_t : C_t -> C_{t-1}`.
    pub fn boundary_in_degree(&self, t: u32) -> QMatrix {
        let cols = self.in_degree(t);
        let rows = if t == 0 { Vec::new() } else { self.in_degree(t - 1) };
        self.boundary.select(&rows, &cols)
    }
}

/// Rational Betti numbers `b_0, ..., b_max` of the total complex.
pub fn homology_ranks(cx: &TwistedTensorProduct) -> Result<Vec<usize>> {
    if !cx.squares_to_zero() {
        return Err(Error::InvalidComplex("boundary does not square to zero".into()));
    }
    let top = cx.max_degree();
    let ranks: Vec<usize> = (0..=top + 1).map(|t| cx.boundary_in_degree(t).rank()).collect();
    Ok((0..=top)
        .map(|t| cx.in_degree(t).len() - ranks[t as usize] - ranks[t as usize + 1])
        .collect())
}

/// Betti numbers of the graded complex `(P, d)` with `d` of degree `-1`.
pub fn fiber_homology(fam_poset: &super::poset::GradedPoset, d: &QMatrix) -> Vec<usize> {
    let top = fam_poset.max_degree();
    let block = |t: u32| -> QMatrix {
        let cols = fam_poset.in_degree(t);
        let rows = if t == 0 { Vec::new() } else { fam_poset.in_degree(t - 1) };
        d.select(&rows, &cols)
    };
    let ranks: Vec<usize> = (0..=top + 1).map(|t| block(t).rank()).collect();
    (0..=top)
        .map(|t| fam_poset.in_degree(t).len() - ranks[t as usize] - ranks[t as usize + 1])
        .collect()
}

/// `sum_{i+j=t} a_i b_j`.
pub fn kunneth(a: &[usize], b: &[usize]) -> Vec<usize> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::simplicial::SimplicialBase;
    use crate::twisted::poset::GradedPoset;

    fn trim(mut v: Vec<usize>) -> Vec<usize> {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        v
    }

    #[test]
    fn point_base_with_circle_fiber() {
        let p = GradedPoset::chain(&[0, 1]);
        let fam = DeltaFamily::constant(SimplicialBase::point(), p, QMatrix::zeros(2, 2)).unwrap();
        let cx = total_complex(&fam);
        assert_eq!(homology_ranks(&cx).unwrap(), vec![1, 1]);
    }

    #[test]
    fn circle_base_trivial_twisting() {
        let p = GradedPoset::chain(&[0, 1]);
        let fam = DeltaFamily::constant(SimplicialBase::circle(3), p, QMatrix::zeros(2, 2)).unwrap();
        let cx = total_complex(&fam);
        assert!(cx.squares_to_zero());
        assert_eq!(homology_ranks(&cx).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn acyclic_fiber_gives_acyclic_total() {
        let p = GradedPoset::chain(&[0, 1]);
        let d = QMatrix::from_i64(2, 2, &[0, 1, 0, 0]);
        let fam = DeltaFamily::constant(SimplicialBase::tetrahedron_boundary(), p, d).unwrap();
        let ranks = homology_ranks(&total_complex(&fam)).unwrap();
        assert!(ranks.iter().all(|&r| r == 0));
    }

    #[test]
    fn unipotent_monodromy_on_circle() {
        // two degree-0 elements, monodromy 1 + E_01 around the circle
        let p = GradedPoset::chain(&[0, 0]);
        let mut c = BTreeMap::new();
        c.insert(vec![0, 2], QMatrix::from_i64(2, 2, &[0, 1, 0, 0]));
        let fam = DeltaFamily::new(SimplicialBase::circle(3), p, c).unwrap();
        assert!(fam.is_valid());
        let ranks = homology_ranks(&total_complex(&fam)).unwrap();
        // coinvariants and invariants of a nontrivial unipotent map on Q^2
        assert_eq!(trim(ranks), vec![1, 1]);
    }

    #[test]
    fn invalid_family_breaks_d_squared() {
        let p = GradedPoset::chain(&[0, 1, 2]);
        let d = QMatrix::from_i64(3, 3, &[0, 1, 0, 0, 0, 1, 0, 0, 0]);
        let fam = DeltaFamily::constant(SimplicialBase::point(), p, d).unwrap();
        assert!(!fam.is_valid());
        assert!(matches!(homology_ranks(&total_complex(&fam)), Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn kunneth_convolution() {
        assert_eq!(kunneth(&[1, 1], &[1, 2, 1]), vec![1, 3, 3, 1]);
    }
}
