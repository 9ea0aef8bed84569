use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Q};

/// A polynomial generator of even cohomological degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// `Q[g_1, ..., g_n]` with every homogeneous part above `truncation_degree`
/// set to zero. All generators have even degree, so the ring is commutative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RingSpecFields")]
pub struct RingSpec {
    generators: Vec<Generator>,
    truncation_degree: u32,
}

#[derive(Deserialize)]
struct RingSpecFields {
    generators: Vec<Generator>,
    truncation_degree: u32,
}

impl TryFrom<RingSpecFields> for RingSpec {
    type Error = Error;

    fn try_from(f: RingSpecFields) -> Result<Self> {
        let spec = RingSpec {
            generators: f.generators,
            truncation_degree: f.truncation_degree,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl RingSpec {
    pub fn new(generators: Vec<Generator>, truncation_degree: u32) -> Result<Arc<Self>> {
        let spec = RingSpec {
            generators,
            truncation_degree,
        };
        spec.validate()?;
        Ok(Arc::new(spec))
    }

    /// Convenience constructor from `(name, degree)` pairs.
    pub fn with(generators: &[(&str, u32)], truncation_degree: u32) -> Result<Arc<Self>> {
        Self::new(
            generators
                .iter()
                .map(|(n, d)| Generator {
                    name: n.to_string(),
                    degree: *d,
                })
                .collect(),
            truncation_degree,
        )
    }

    /// `Q[x_1, ..., x_n]` with every `x_i` of degree 2.
    pub fn roots(n: usize, prefix: &str, truncation_degree: u32) -> Arc<Self> {
        let gens: Vec<Generator> = (1..=n)
            .map(|i| Generator {
                name: format!("{prefix}{i}"),
                degree: 2,
            })
            .collect();
        Self::new(gens, truncation_degree).expect("root generators are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !self.truncation_degree.is_multiple_of(2) {
            return Err(Error::model(
                "charclass",
                format!("truncation degree {} is odd", self.truncation_degree),
            ));
        }
        let mut seen = HashSet::new();
        for g in &self.generators {
            if g.degree == 0 || g.degree % 2 != 0 {
                return Err(Error::model(
                    "charclass",
                    format!("generator {} has degree {}; degrees must be even and positive", g.name, g.degree),
                ));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::model("charclass", format!("duplicate generator name {}", g.name)));
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn truncation_degree(&self) -> u32 {
        self.truncation_degree
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn monomial_degree(&self, mono: &[u32]) -> u32 {
        mono.iter()
            .zip(&self.generators)
            .map(|(e, g)| e * g.degree)
            .sum()
    }
}

/// Exponent vector over the generators of a [`RingSpec`].
pub type Monomial = Vec<u32>;

/// An element of a truncated polynomial ring, stored in canonical form:
/// monomials ordered lexicographically by exponent vector, no zero
/// coefficients, nothing above the truncation degree.
#[derive(Clone, PartialEq, Eq)]
pub struct RingClass {
    spec: Arc<RingSpec>,
    terms: BTreeMap<Monomial, Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RingOp {
    Add,
    Mul,
    Scale(Q),
}

/// `a op b` for classes of the same ring. `Scale` ignores `b` apart from
/// the ring check.
pub fn ring_arith(a: &RingClass, b: &RingClass, op: RingOp) -> Result<RingClass> {
    a.check_same(b)?;
    match op {
        RingOp::Add => a.add(b),
        RingOp::Mul => a.mul(b),
        RingOp::Scale(s) => Ok(a.scale(&s)),
    }
}

impl RingClass {
    pub fn zero(spec: &Arc<RingSpec>) -> Self {
        RingClass {
            spec: Arc::clone(spec),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(spec: &Arc<RingSpec>, c: Q) -> Self {
        let mut out = Self::zero(spec);
        out.insert(vec![0; spec.generators.len()], c);
        out
    }

    pub fn one(spec: &Arc<RingSpec>) -> Self {
        Self::constant(spec, Q::one())
    }

    pub fn generator(spec: &Arc<RingSpec>, name: &str) -> Result<Self> {
        let idx = spec
            .index_of(name)
            .ok_or_else(|| Error::model("charclass", format!("unknown generator {name}")))?;
        Ok(Self::generator_at(spec, idx))
    }

    pub fn generator_at(spec: &Arc<RingSpec>, idx: usize) -> Self {
        let mut mono = vec![0; spec.generators.len()];
        mono[idx] = 1;
        Self::monomial(spec, mono, Q::one())
    }

    pub fn monomial(spec: &Arc<RingSpec>, mono: Monomial, coeff: Q) -> Self {
        assert_eq!(mono.len(), spec.generators.len(), "exponent vector length");
        let mut out = Self::zero(spec);
        out.insert(mono, coeff);
        out
    }

    /// Builds a class from raw terms, dropping zeros and anything above the
    /// truncation degree.
    pub fn from_terms(
        spec: &Arc<RingSpec>,
        terms: impl IntoIterator<Item = (Monomial, Q)>,
    ) -> Result<Self> {
        let mut out = Self::zero(spec);
        for (mono, c) in terms {
            if mono.len() != spec.generators.len() {
                return Err(Error::model(
                    "charclass",
                    format!("exponent vector {mono:?} has wrong length"),
                ));
            }
            out.accumulate(mono, c);
        }
        Ok(out)
    }

    fn insert(&mut self, mono: Monomial, c: Q) {
        if c.is_zero() || self.spec.monomial_degree(&mono) > self.spec.truncation_degree {
            return;
        }
        self.terms.insert(mono, c);
    }

    fn accumulate(&mut self, mono: Monomial, c: Q) {
        if c.is_zero() || self.spec.monomial_degree(&mono) > self.spec.truncation_degree {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn coefficient(&self, mono: &[u32]) -> Q {
        self.terms.get(mono).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn same_ring(&self, other: &RingClass) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec
    }

    fn check_same(&self, other: &RingClass) -> Result<()> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(Error::IncompatibleRing(format!(
                "{:?} vs {:?}",
                self.spec.generators, other.spec.generators
            )))
        }
    }

    pub fn add(&self, other: &RingClass) -> Result<RingClass> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RingClass) -> Result<RingClass> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingClass) -> Result<RingClass> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.spec);
        for (ma, ca) in &self.terms {
            let da = self.spec.monomial_degree(ma);
            for (mb, cb) in &other.terms {
                if da + self.spec.monomial_degree(mb) > self.spec.truncation_degree {
                    continue;
                }
                let mono: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.accumulate(mono, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> RingClass {
        if s.is_zero() {
            return Self::zero(&self.spec);
        }
        RingClass {
            spec: Arc::clone(&self.spec),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn neg(&self) -> RingClass {
        self.scale(&-Q::one())
    }

    pub fn pow(&self, exp: u32) -> RingClass {
        let mut acc = Self::one(&self.spec);
        for _ in 0..exp {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Sum of classes in one ring; `spec` fixes the ring of an empty sum.
    pub fn sum<'a>(spec: &Arc<RingSpec>, items: impl IntoIterator<Item = &'a RingClass>) -> Result<RingClass> {
        let mut acc = Self::zero(spec);
        for it in items {
            acc = acc.add(it)?;
        }
        Ok(acc)
    }

    /// Degree if the class is homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| self.spec.monomial_degree(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// True for zero or for a class whose monomials all have degree `d`.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| self.spec.monomial_degree(m) == d)
    }

    pub fn homogeneous_part(&self, d: u32) -> RingClass {
        RingClass {
            spec: Arc::clone(&self.spec),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.spec.monomial_degree(m) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Leading (first in canonical order) coefficient, if nonzero.
    pub fn leading_coefficient(&self) -> Option<&Q> {
        self.terms.values().next()
    }

    /// `Some(q)` when `self = q * other` exactly.
    pub fn ratio_to(&self, other: &RingClass) -> Option<Q> {
        if !self.same_ring(other) || self.terms.len() != other.terms.len() {
            return None;
        }
        if other.is_zero() {
            return self.is_zero().then(Q::zero);
        }
        let (m0, c0) = other.terms.iter().next()?;
        let r = self.terms.get(m0)? / c0;
        let matches = other
            .terms
            .iter()
            .all(|(m, c)| self.terms.get(m).is_some_and(|s| *s == c * &r));
        matches.then_some(r)
    }

    /// Applies the ring homomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, target: &Arc<RingSpec>, images: &[RingClass]) -> Result<RingClass> {
        if images.len() != self.spec.generators.len() {
            return Err(Error::model(
                "charclass",
                format!(
                    "substitution has {} images for {} generators",
                    images.len(),
                    self.spec.generators.len()
                ),
            ));
        }
        let mut acc = RingClass::zero(target);
        for (mono, c) in &self.terms {
            let mut term = RingClass::constant(target, c.clone());
            for (img, &e) in images.iter().zip(mono) {
                if e > 0 {
                    term = term.mul(&img.pow(e))?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Coefficients keyed by comma-joined exponent vectors, e.g. `"2,0"`.
    pub fn to_string_map(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(m, c)| (monomial_key(m), rational::format(c)))
            .collect()
    }

    pub fn from_string_map(spec: &Arc<RingSpec>, map: &BTreeMap<String, String>) -> Result<Self> {
        let mut terms = Vec::with_capacity(map.len());
        for (k, v) in map {
            terms.push((parse_monomial_key(k)?, rational::parse(v)?));
        }
        Self::from_terms(spec, terms)
    }

    /// Real coefficients, for combining with floating-point scalars.
    pub fn to_f64_map(&self) -> BTreeMap<Monomial, f64> {
        self.terms
            .iter()
            .map(|(m, c)| (m.clone(), rational::to_f64(c)))
            .collect()
    }

    pub fn max_abs_coefficient(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }
}

pub fn monomial_key(m: &[u32]) -> String {
    m.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_monomial_key(k: &str) -> Result<Monomial> {
    let k = k.trim().trim_start_matches('[').trim_end_matches(']');
    if k.is_empty() {
        return Ok(Vec::new());
    }
    k.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad exponent vector {k:?}")))
        })
        .collect()
}

impl fmt::Display for RingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (mono, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = mono
                .iter()
                .zip(&self.spec.generators)
                .filter(|(e, _)| **e > 0)
                .map(|(e, g)| if *e == 1 { g.name.clone() } else { format!("{}^{}", g.name, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", rational::format(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", rational::format(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingClass({self})")
    }
}
