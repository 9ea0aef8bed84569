use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{self, q, Q};
use crate::report::{Check, Report};
use crate::simplicial::{face, Simplex, SimplicialBase};

use super::poset::{GradedPoset, UTEndomorphism};

/// A family of chain complexes over a simplicial base: a cochain `phi_p`
/// on every `p`-simplex, valued in strictly upper triangular endomorphisms
/// of homogeneity `p - 1` of the graded poset. Missing simplices carry 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaFamily {
    base: SimplicialBase,
    poset: GradedPoset,
    cochains: BTreeMap<Simplex, QMatrix>,
    zero: QMatrix,
}

fn sign(i: usize) -> Q {
    if i.is_multiple_of(2) {
        q(1)
    } else {
        q(-1)
    }
}

impl DeltaFamily {
    pub fn new(
        base: SimplicialBase,
        poset: GradedPoset,
        cochains: BTreeMap<Simplex, QMatrix>,
    ) -> Result<Self> {
        for (s, m) in &cochains {
            if !base.contains(s) {
                return Err(Error::model(
                    "twisted_chain",
                    format!("cochain on {s:?}, which is not a simplex of the base"),
                ));
            }
            UTEndomorphism {
                matrix: m.clone(),
                degree: s.len() as i32 - 2,
            }
            .check(&poset)?;
        }
        let n = poset.len();
        let cochains = cochains.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(DeltaFamily {
            base,
            poset,
            cochains,
            zero: QMatrix::zeros(n, n),
        })
    }

    /// `phi_0 = d` at every vertex, all higher cochains zero.
    pub fn constant(base: SimplicialBase, poset: GradedPoset, d: QMatrix) -> Result<Self> {
        let cochains = base.simplices(0).iter().map(|v| (v.clone(), d.clone())).collect();
        Self::new(base, poset, cochains)
    }

    /// The gauge family `phi_0(v) = g_v d g_v^{-1}`,
    /// `phi_1(a, b) = g_a g_b^{-1} - 1`, `phi_p = 0` for `p >= 2`, where the
    /// `g_v` are unipotent and degree-preserving.
    pub fn gauge(base: SimplicialBase, poset: GradedPoset, d: &QMatrix, gauges: &[QMatrix]) -> Result<Self> {
        if gauges.len() != base.n_vertices() {
            return Err(Error::model("twisted_chain", "one gauge matrix per vertex is required"));
        }
        let inv: Vec<QMatrix> = gauges
            .iter()
            .map(|g| {
                g.inverse()
                    .ok_or_else(|| Error::model("twisted_chain", "gauge matrix is singular"))
            })
            .collect::<Result<_>>()?;
        let mut cochains = BTreeMap::new();
        for v in base.simplices(0) {
            cochains.insert(v.clone(), &(&gauges[v[0]] * d) * &inv[v[0]]);
        }
        let id = QMatrix::identity(poset.len());
        for e in base.simplices(1) {
            cochains.insert(e.clone(), &(&gauges[e[0]] * &inv[e[1]]) - &id);
        }
        Self::new(base, poset, cochains)
    }

    pub fn base(&self) -> &SimplicialBase {
        &self.base
    }

    pub fn poset(&self) -> &GradedPoset {
        &self.poset
    }

    /// Dimension of the base (the `k` of a family over the standard simplex).
    pub fn k(&self) -> usize {
        self.base.dim()
    }

    pub fn phi(&self, s: &[usize]) -> &QMatrix {
        self.cochains.get(s).unwrap_or(&self.zero)
    }

    pub fn cochains(&self) -> &BTreeMap<Simplex, QMatrix> {
        &self.cochains
    }

    fn set_phi(&mut self, s: Simplex, m: QMatrix) {
        if m.is_zero() {
            self.cochains.remove(&s);
        } else {
            self.cochains.insert(s, m);
        }
    }

    /// `sum_i (-1)^i phi_i(a_0..a_i) phi_{p-i}(a_i..a_p)`, omitting the
    /// terms with `i = 0` and `i = p` when `interior_only`.
    fn cup_terms(&self, s: &[usize], interior_only: bool) -> QMatrix {
        let p = s.len() - 1;
        let mut acc = self.zero.clone();
        for i in 0..=p {
            if interior_only && (i == 0 || i == p) {
                continue;
            }
            let prod = self.phi(&s[..=i]) * self.phi(&s[i..]);
            acc = &acc + &prod.scale(&sign(i));
        }
        acc
    }

    /// `sum_i (-1)^i phi_{p-1}(d_i sigma)`; zero on vertices.
    fn coboundary_terms(&self, s: &[usize]) -> QMatrix {
        let mut acc = self.zero.clone();
        if s.len() < 2 {
            return acc;
        }
        for i in 0..s.len() {
            acc = &acc + &self.phi(&face(s, i)).scale(&sign(i));
        }
        acc
    }

    /// Left side minus right side of the defining equation on `s`.
    pub fn residual(&self, s: &[usize]) -> QMatrix {
        &self.cup_terms(s, false) - &self.coboundary_terms(s)
    }

    /// Evaluates the defining equation on every simplex.
    pub fn validate_twisted(&self) -> Report {
        let mut report = Report::new("validate_twisted");
        let mut worst = Q::from_integer(0.into());
        let mut worst_at = None;
        for d in 0..=self.base.dim() {
            for s in self.base.simplices(d) {
                let r = self.residual(s).max_abs();
                if r > worst {
                    worst = r;
                    worst_at = Some(s.clone());
                }
            }
        }
        let name = match &worst_at {
            Some(s) => format!("max_residual_at_{}", s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_")),
            None => "max_residual".to_string(),
        };
        report.push(Check::with_diff(name, 0.0, 0.0, rational::to_f64(&worst), 0.0));
        report
    }

    pub fn is_valid(&self) -> bool {
        (0..=self.base.dim()).all(|d| self.base.simplices(d).iter().all(|s| self.residual(s).is_zero()))
    }

    /// Solves the defining equation on `s` for `phi_p(s)`, given all proper
    /// faces; returns `false` when no solution exists. Requires `p >= 1`.
    pub fn solve_on(&mut self, s: &[usize]) -> Result<bool> {
        let p = s.len() - 1;
        if p == 0 {
            return Err(Error::Unsupported("phi_0 is not determined by a linear equation".into()));
        }
        let n = self.poset.len();
        let unknowns = self.poset.allowed_entries(p as i32 - 1);
        let first = self.phi(&s[..1]).clone();
        let last = self.phi(&s[p..]).clone();
        let rhs = &self.coboundary_terms(s) - &self.cup_terms(s, true);
        let mut a = QMatrix::zeros(n * n, unknowns.len());
        for (col, &(y, x)) in unknowns.iter().enumerate() {
            let mut e = QMatrix::zeros(n, n);
            e.set(y, x, q(1));
            let img = &(&first * &e) + &(&e * &last).scale(&sign(p));
            for (r, c, v) in img.nonzero_entries() {
                a.set(r * n + c, col, v.clone());
            }
        }
        let b = QMatrix::from_fn(n * n, 1, |r, _| rhs.get(r / n, r % n).clone());
        let Some(sol) = a.solve(&b) else {
            return Ok(false);
        };
        let mut m = QMatrix::zeros(n, n);
        for (col, &(y, x)) in unknowns.iter().enumerate() {
            m.set(y, x, sol.get(col, 0).clone());
        }
        self.set_phi(s.to_vec(), m);
        Ok(true)
    }

    /// Adds 1 to the first admissible entry of `phi_p(s)`.
    pub fn perturbed(&self, s: &[usize]) -> Option<DeltaFamily> {
        let p = s.len() - 1;
        let &(y, x) = self.poset.allowed_entries(p as i32 - 1).first()?;
        let mut m = self.phi(s).clone();
        m.add_at(y, x, &q(1));
        let mut out = self.clone();
        out.set_phi(s.to_vec(), m);
        Some(out)
    }

    /// Replaces the cochain on `s`, re-checking the pattern.
    pub fn with_cochain(&self, s: &[usize], m: QMatrix) -> Result<DeltaFamily> {
        let mut cochains = self.cochains.clone();
        cochains.insert(s.to_vec(), m);
        DeltaFamily::new(self.base.clone(), self.poset.clone(), cochains)
    }

    /// Degrees shifted up by `m`; the cochains are unchanged.
    pub fn suspend(&self, m: u32) -> DeltaFamily {
        DeltaFamily {
            poset: self.poset.shifted(m),
            ..self.clone()
        }
    }

    /// Direct sum over the same base, on the disjoint union of posets.
    pub fn direct_sum(&self, other: &DeltaFamily) -> Result<DeltaFamily> {
        if self.base != other.base {
            return Err(Error::model("twisted_chain", "direct sum needs a common base"));
        }
        let poset = self.poset.disjoint_union(&other.poset)?;
        let n1 = self.poset.len();
        let first: Vec<usize> = (0..n1).collect();
        let second: Vec<usize> = (n1..poset.len()).collect();
        let mut cochains = BTreeMap::new();
        for d in 0..=self.base.dim() {
            for s in self.base.simplices(d) {
                let mut m = QMatrix::zeros(poset.len(), poset.len());
                m.place(&first, &first, self.phi(s));
                m.place(&second, &second, other.phi(s));
                cochains.insert(s.clone(), m);
            }
        }
        DeltaFamily::new(self.base.clone(), poset, cochains)
    }

    /// Restriction to a subset of the poset (closed or co-closed).
    fn restrict(&self, subset: &[usize]) -> DeltaFamily {
        let poset = self.poset.restrict(subset);
        let n = subset.len();
        let cochains = self
            .cochains
            .iter()
            .map(|(s, m)| (s.clone(), m.select(subset, subset)))
            .filter(|(_, m)| !m.is_zero())
            .collect();
        DeltaFamily {
            base: self.base.clone(),
            poset,
            cochains,
            zero: QMatrix::zeros(n, n),
        }
    }

    /// `(phi_Q, phi_{P/Q})` for a closed subset `Q`.
    pub fn split_sum(&self, closed: &[usize]) -> Result<(DeltaFamily, DeltaFamily)> {
        if !self.poset.is_closed(closed) {
            return Err(Error::Domain("subset is not closed under <".into()));
        }
        let mut sub: Vec<usize> = closed.to_vec();
        sub.sort_unstable();
        sub.dedup();
        let rest: Vec<usize> = (0..self.poset.len()).filter(|i| sub.binary_search(i).is_err()).collect();
        Ok((self.restrict(&sub), self.restrict(&rest)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twisted::poset::Element;

    /// Fiber `e0 <- e1` in degrees 0, 1 with `d e1 = e0`.
    fn interval() -> (GradedPoset, QMatrix) {
        let p = GradedPoset::chain(&[0, 1]);
        let d = QMatrix::from_i64(2, 2, &[0, 1, 0, 0]);
        (p, d)
    }

    #[test]
    fn untwisted_family_is_valid() {
        let (p, d) = interval();
        let fam = DeltaFamily::constant(SimplicialBase::standard_simplex(2), p, d).unwrap();
        assert!(fam.is_valid());
        assert!(fam.validate_twisted().pass);
    }

    #[test]
    fn edge_equation_by_hand() {
        // two degree-0 elements and one degree-1 element; phi_0 differs at
        // the two vertices and phi_1 solves the edge equation
        let p = GradedPoset::chain(&[0, 0, 1]);
        let d0 = QMatrix::from_i64(3, 3, &[0, 0, 0, 0, 0, 1, 0, 0, 0]);
        let d1 = QMatrix::from_i64(3, 3, &[0, 0, 1, 0, 0, 1, 0, 0, 0]);
        let phi1 = QMatrix::from_i64(3, 3, &[0, -1, 0, 0, 0, 0, 0, 0, 0]);
        // phi_0(0) phi_1 - phi_1 phi_0(1) = phi_0(1) - phi_0(0)
        let lhs = &(&d0 * &phi1) - &(&phi1 * &d1);
        assert_eq!(lhs, &d1 - &d0);
        let mut c = BTreeMap::new();
        c.insert(vec![0], d0);
        c.insert(vec![1], d1);
        c.insert(vec![0, 1], phi1);
        let fam = DeltaFamily::new(SimplicialBase::standard_simplex(1), p, c).unwrap();
        assert!(fam.is_valid());
        let bad = fam.perturbed(&[0, 1]).unwrap();
        let r = bad.validate_twisted();
        assert!(!r.pass && r.max_diff() > 0.0);
    }

    #[test]
    fn gauge_families_are_valid() {
        let p = GradedPoset::chain(&[0, 0, 1, 1]);
        let d = QMatrix::from_i64(4, 4, &[0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        let g0 = QMatrix::identity(4);
        let g1 = QMatrix::from_i64(4, 4, &[1, 2, 0, 0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 1]);
        let g2 = QMatrix::from_i64(4, 4, &[1, -3, 0, 0, 0, 1, 0, 0, 0, 0, 1, 5, 0, 0, 0, 1]);
        let fam = DeltaFamily::gauge(SimplicialBase::standard_simplex(2), p, &d, &[g0, g1, g2]).unwrap();
        assert!(fam.is_valid());
        assert!(fam.suspend(3).is_valid());
        assert_eq!(fam.suspend(2).suspend(1), fam.suspend(3));
    }

    #[test]
    fn split_recovers_summands() {
        let (p, d) = interval();
        let a = DeltaFamily::constant(SimplicialBase::standard_simplex(1), p.clone(), d.clone()).unwrap();
        let p2 = GradedPoset::from_relations(
            vec![
                Element { id: "f0".into(), degree: 0 },
                Element { id: "f1".into(), degree: 0 },
            ],
            &[(0, 1)],
        )
        .unwrap();
        let mut c = BTreeMap::new();
        c.insert(vec![0, 1], QMatrix::from_i64(2, 2, &[0, 7, 0, 0]));
        let b = DeltaFamily::new(SimplicialBase::standard_simplex(1), p2, c).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        assert!(sum.is_valid());
        let (sub, quot) = sum.split_sum(&[0, 1]).unwrap();
        assert_eq!(sub, a);
        assert_eq!(quot, b);
        let (empty, all) = sum.split_sum(&[]).unwrap();
        assert!(empty.poset().is_empty());
        assert_eq!(all, sum);
        assert!(sum.split_sum(&[1]).is_err());
    }
}
