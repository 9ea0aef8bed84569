use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::simplicial::{face, sort_sign, Simplex, SimplicialBase};

use super::covering::CoveringMap;

/// Scalars a cochain can take: exact rationals or doubles.
pub trait Coefficient:
    Clone + PartialEq + Debug + Zero + Add<Output = Self> + Neg<Output = Self> + Mul<Output = Self>
{
    fn from_int(n: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coefficient for Q {
    fn from_int(n: i64) -> Self {
        rational::q(n)
    }

    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
}

impl Coefficient for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

/// A simplicial `q`-cochain on oriented simplices, stored on sorted vertex
/// lists. Simplices without an entry carry zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialCochain<T> {
    dim: usize,
    values: BTreeMap<Simplex, T>,
}

impl<T: Coefficient> SimplicialCochain<T> {
    pub fn zero(dim: usize) -> Self {
        SimplicialCochain {
            dim,
            values: BTreeMap::new(),
        }
    }

    /// Values on sorted `dim`-simplices of `complex`.
    pub fn new(complex: &SimplicialBase, dim: usize, values: BTreeMap<Simplex, T>) -> Result<Self> {
        for s in values.keys() {
            if s.len() != dim + 1 || !complex.contains(s) {
                return Err(Error::model("transfer_ops", format!("{s:?} is not a {dim}-simplex of the complex")));
            }
        }
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(SimplicialCochain { dim, values })
    }

    pub fn from_fn(complex: &SimplicialBase, dim: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let values = complex
            .simplices(dim)
            .iter()
            .map(|s| (s.clone(), f(s)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SimplicialCochain { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &BTreeMap<Simplex, T> {
        &self.values
    }

    pub fn get(&self, s: &[usize]) -> T {
        self.values.get(s).cloned().unwrap_or_else(T::zero)
    }

    /// Value on an ordered vertex list, with the sign of the permutation
    /// that sorts it.
    pub fn on_ordered(&self, vs: &[usize]) -> T {
        let mut s = vs.to_vec();
        s.sort_unstable();
        let v = self.get(&s);
        if sort_sign(vs) < 0 {
            -v
        } else {
            v
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Precondition("cochains of different dimensions".into()));
        }
        let mut values = self.values.clone();
        for (s, v) in &other.values {
            let e = values.entry(s.clone()).or_insert_with(T::zero);
            *e = e.clone() + v.clone();
        }
        values.retain(|_, v| !v.is_zero());
        Ok(SimplicialCochain { dim: self.dim, values })
    }

    pub fn scale(&self, c: &T) -> Self {
        let values = self
            .values
            .iter()
            .map(|(s, v)| (s.clone(), c.clone() * v.clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SimplicialCochain { dim: self.dim, values }
    }

    /// `(delta c)(s) = sum_i (-1)^i c(d_i s)`.
    pub fn coboundary(&self, complex: &SimplicialBase) -> Self {
        Self::from_fn(complex, self.dim + 1, |s| {
            let mut acc = T::zero();
            for i in 0..s.len() {
                let v = self.get(&face(s, i));
                acc = if i % 2 == 0 { acc + v } else { acc + -v };
            }
            acc
        })
    }

    /// Largest `|value|` as a double.
    pub fn max_abs(&self) -> f64 {
        self.values.values().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Interchange form: `{dim, values: [{simplex, value}]}` with values as
/// `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainJson {
    pub dim: usize,
    pub values: Vec<CochainValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainValue {
    pub simplex: Simplex,
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
}

impl CochainJson {
    pub fn from_cochain(c: &SimplicialCochain<Q>) -> Self {
        CochainJson {
            dim: c.dim(),
            values: c
                .values()
                .iter()
                .map(|(s, v)| CochainValue {
                    simplex: s.clone(),
                    value: v.clone(),
                })
                .collect(),
        }
    }

    /// Entries may name simplices in any vertex order.
    pub fn to_cochain(&self, complex: &SimplicialBase) -> Result<SimplicialCochain<Q>> {
        let mut values: BTreeMap<Simplex, Q> = BTreeMap::new();
        for e in &self.values {
            let mut s = e.simplex.clone();
            s.sort_unstable();
            let v = if sort_sign(&e.simplex) < 0 { -e.value.clone() } else { e.value.clone() };
            let slot = values.entry(s).or_insert_with(Q::zero);
            *slot = slot.clone() + v;
        }
        SimplicialCochain::new(complex, self.dim, values)
    }
}

/// `<tr c, s> = sum over sheets l of s of <c, l>`.
pub fn transfer_cochain<T: Coefficient>(cov: &CoveringMap, c: &SimplicialCochain<T>) -> Result<SimplicialCochain<T>> {
    if c.dim() > cov.base().dim() {
        return Err(Error::Precondition(format!(
            "a {}-cochain cannot be transferred to a base of dimension {}",
            c.dim(),
            cov.base().dim()
        )));
    }
    let mut values = BTreeMap::new();
    for s in cov.base().simplices(c.dim()) {
        let mut acc = T::zero();
        for l in cov.lifts(s)? {
            acc = acc + c.on_ordered(l);
        }
        values.insert(s.clone(), acc);
    }
    SimplicialCochain::new(cov.base(), c.dim(), values)
}

/// `<pi^* c, l> = <c, pi(l)>`.
pub fn pullback<T: Coefficient>(cov: &CoveringMap, c: &SimplicialCochain<T>) -> Result<SimplicialCochain<T>> {
    let mut values = BTreeMap::new();
    for s in cov.base().simplices(c.dim()) {
        let v = c.get(s);
        for l in cov.lifts(s)? {
            let mut t = l.clone();
            t.sort_unstable();
            values.insert(t, if sort_sign(l) < 0 { -v.clone() } else { v.clone() });
        }
    }
    SimplicialCochain::new(cov.total(), c.dim(), values)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::rational::q;

    fn double_cover() -> CoveringMap {
        let action: Vec<usize> = (0..12).map(|v| (v + 6) % 12).collect();
        CoveringMap::from_free_action(SimplicialBase::circle(12), &action, 2).unwrap()
    }

    #[test]
    fn trivial_double_cover_doubles_ones() {
        let base = SimplicialBase::standard_simplex(2);
        let cov = CoveringMap::trivial(&base, 2).unwrap();
        for d in 0..=2 {
            let one = SimplicialCochain::from_fn(cov.total(), d, |_| q(1));
            let tr = transfer_cochain(&cov, &one).unwrap();
            assert_eq!(tr, SimplicialCochain::from_fn(&base, d, |_| q(2)));
        }
    }

    #[test]
    fn edge_supported_cochain() {
        let cov = double_cover();
        let mut v = BTreeMap::new();
        v.insert(vec![3, 4], q(5));
        let c = SimplicialCochain::new(cov.total(), 1, v).unwrap();
        let tr = transfer_cochain(&cov, &c).unwrap();
        assert_eq!(tr.values().len(), 1);
        assert_eq!(tr.get(&[3, 4]), q(5));
        // an edge whose lift is reversed relative to the sorted order
        let mut v = BTreeMap::new();
        v.insert(vec![5, 6], q(2));
        let tr = transfer_cochain(&cov, &SimplicialCochain::new(cov.total(), 1, v).unwrap()).unwrap();
        assert_eq!(tr.get(&[0, 5]), q(-2));
    }

    #[test]
    fn transfer_commutes_with_coboundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let covs = [
            double_cover(),
            CoveringMap::trivial(&SimplicialBase::tetrahedron_boundary(), 3).unwrap(),
        ];
        for cov in &covs {
            for d in 0..cov.base().dim() {
                for _ in 0..5 {
                    let c = SimplicialCochain::from_fn(cov.total(), d, |_| q(rng.gen_range(-5..=5)));
                    let lhs = transfer_cochain(cov, &c.coboundary(cov.total())).unwrap();
                    let rhs = transfer_cochain(cov, &c).unwrap().coboundary(cov.base());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn transfer_of_pullback_multiplies_by_degree() {
        let cov = double_cover();
        let c = SimplicialCochain::from_fn(cov.base(), 1, |s| q(s[0] as i64 - 2));
        let back = transfer_cochain(&cov, &pullback(&cov, &c).unwrap()).unwrap();
        assert_eq!(back, c.scale(&q(2)));
    }

    #[test]
    fn json_accepts_unsorted_simplices() {
        let base = SimplicialBase::circle(4);
        let j: CochainJson = serde_json::from_str(r#"{"dim":1,"values":[{"simplex":[1,0],"value":"3/2"}]}"#).unwrap();
        let c = j.to_cochain(&base).unwrap();
        assert_eq!(c.get(&[0, 1]), crate::rational::frac(-3, 2));
        assert!(serde_json::from_str::<CochainJson>(r#"{"dim":1,"values":[{"simplex":[0,2],"value":"1"}]}"#)
            .unwrap()
            .to_cochain(&base)
            .is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let cov = double_cover();
        let c = SimplicialCochain::<Q>::zero(2);
        assert!(matches!(transfer_cochain(&cov, &c), Err(Error::Precondition(_))));
    }
}
