use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::q;
use crate::simplicial::SimplicialBase;

use super::family::DeltaFamily;
use super::poset::GradedPoset;

/// A contraction `s` of homogeneity `+1` with `d s + s d = 1`, when the
/// graded complex `(P, d)` is acyclic.
pub fn contraction(poset: &GradedPoset, d: &QMatrix) -> Option<QMatrix> {
    let n = poset.len();
    let mut s = QMatrix::zeros(n, n);
    let top = poset.max_degree();
    // s_{deg-1} restricted to degree deg-1, carried to the next step
    let mut prev: Option<(Vec<usize>, Vec<usize>, QMatrix)> = None;
    for deg in 0..=top {
        let here = poset.in_degree(deg);
        let up = poset.in_degree(deg + 1);
        if here.is_empty() {
            prev = None;
            continue;
        }
        // target = 1 - s_{deg-1} d_deg on C_deg
        let mut target = QMatrix::identity(here.len());
        if let Some((below, _, s_prev)) = &prev {
            let d_here = d.select(below, &here);
            target = &target - &(s_prev * &d_here);
        }
        let d_up = d.select(&here, &up);
        let s_here = d_up.solve(&target)?;
        s.place(&up, &here, &s_here);
        prev = Some((here, up, s_here));
    }
    let check = &(d * &s) + &(&s * d);
    (check == QMatrix::identity(n)).then_some(s)
}

/// Whether `(P, d)` has vanishing homology.
pub fn is_acyclic(poset: &GradedPoset, d: &QMatrix) -> bool {
    super::total::fiber_homology(poset, d).iter().all(|&b| b == 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossTermKill {
    /// The family with the cross block of the top cochain removed.
    pub family: DeltaFamily,
    /// Homotopy datum `g` (a `Q x S` block) with
    /// `phi_Q(a_0) g - (-1)^k g phi_S(a_k) = f`.
    pub witness: QMatrix,
    /// For `k = 0`: the family over the interval from the output to the
    /// input, `phi_1 = g` on the cross block.
    pub homotopy: Option<DeltaFamily>,
}

/// Removes the cross term `f` of the top cochain of a family over the
/// standard simplex, for a closed `Q` lying below its complement `S`, with
/// `Q` or `S` acyclic and `f = 0` on all proper faces.
pub fn kill_cross_term(fam: &DeltaFamily, closed: &[usize]) -> Result<CrossTermKill> {
    let k = fam.k();
    let base = fam.base();
    if *base != SimplicialBase::standard_simplex(k) {
        return Err(Error::Precondition("family must live over a standard simplex".into()));
    }
    let poset = fam.poset();
    if !poset.is_closed(closed) {
        return Err(Error::Precondition("Q is not closed".into()));
    }
    let mut qs: Vec<usize> = closed.to_vec();
    qs.sort_unstable();
    qs.dedup();
    let ss: Vec<usize> = (0..poset.len()).filter(|i| qs.binary_search(i).is_err()).collect();
    if !qs.iter().all(|&y| ss.iter().all(|&x| poset.less(y, x))) {
        return Err(Error::Precondition("some element of Q is not below every element of P - Q".into()));
    }
    if !fam.is_valid() {
        return Err(Error::Precondition("input family does not satisfy the defining equation".into()));
    }
    for d in 0..k {
        for s in base.simplices(d) {
            if !fam.phi(s).select(&qs, &ss).is_zero() {
                return Err(Error::Precondition(format!("cross term is nonzero on the face {s:?}")));
            }
        }
    }
    let top: Vec<usize> = (0..=k).collect();
    let (sub, quot) = fam.split_sum(&qs)?;
    let a0 = sub.phi(&[0]).clone();
    let bk = quot.phi(&[k]).clone();
    let f = fam.phi(&top).select(&qs, &ss);
    let all_acyclic =
        |part: &DeltaFamily| (0..=k).all(|v| is_acyclic(part.poset(), part.phi(&[v])));
    let witness = if all_acyclic(&sub) {
        let t = contraction(sub.poset(), &a0)
            .ok_or_else(|| Error::model("twisted_chain", "no contraction of an acyclic complex"))?;
        &t * &f
    } else if all_acyclic(&quot) {
        let s = contraction(quot.poset(), &bk)
            .ok_or_else(|| Error::model("twisted_chain", "no contraction of an acyclic complex"))?;
        let g = &f * &s;
        if k.is_multiple_of(2) { -&g } else { g }
    } else {
        return Err(Error::Precondition("neither Q nor P - Q is acyclic".into()));
    };
    let sign = if k.is_multiple_of(2) { q(1) } else { q(-1) };
    let lhs = &(&a0 * &witness) - &(&witness * &bk).scale(&sign);
    if lhs != f {
        return Err(Error::model("twisted_chain", "homotopy witness does not solve its equation"));
    }

    let mut new_top = fam.phi(&top).clone();
    new_top.place(&qs, &ss, &QMatrix::zeros(qs.len(), ss.len()));
    let family = fam.with_cochain(&top, new_top)?;
    if !family.is_valid() {
        return Err(Error::model("twisted_chain", "block-diagonal family fails the defining equation"));
    }

    let homotopy = if k == 0 {
        let mut g = QMatrix::zeros(poset.len(), poset.len());
        g.place(&qs, &ss, &witness);
        let mut c = BTreeMap::new();
        c.insert(vec![0], family.phi(&[0]).clone());
        c.insert(vec![1], fam.phi(&[0]).clone());
        c.insert(vec![0, 1], g);
        let h = DeltaFamily::new(SimplicialBase::standard_simplex(1), poset.clone(), c)?;
        if !h.is_valid() {
            return Err(Error::model("twisted_chain", "interval homotopy fails the defining equation"));
        }
        Some(h)
    } else {
        None
    };
    Ok(CrossTermKill {
        family,
        witness,
        homotopy,
    })
}
