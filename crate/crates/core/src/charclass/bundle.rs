use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::newton::{elementary_symmetric, newton_polynomial};
use super::ring::{RingClass, RingSpec};
use crate::error::{Error, Result};
use crate::rational::{factorial, q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleKind {
    /// A complex bundle split as a sum of line bundles with the given roots.
    Complex,
    /// The underlying real bundle of a complex bundle with the given roots.
    Realification,
}

impl BundleKind {
    pub fn name(self) -> &'static str {
        match self {
            BundleKind::Complex => "complex",
            BundleKind::Realification => "realification",
        }
    }
}

/// A vector bundle over the base described through the splitting
/// principle: a list of degree-2 Chern roots in the base ring.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleModel {
    spec: Arc<RingSpec>,
    roots: Vec<RingClass>,
    kind: BundleKind,
}

impl BundleModel {
    pub fn new(spec: &Arc<RingSpec>, roots: Vec<RingClass>, kind: BundleKind) -> Result<Self> {
        for r in &roots {
            if !r.same_ring(&RingClass::zero(spec)) {
                return Err(Error::IncompatibleRing("bundle root from another ring".into()));
            }
            if !r.is_homogeneous_of(2) {
                return Err(Error::model(
                    "charclass",
                    format!("Chern root {r} is not homogeneous of degree 2"),
                ));
            }
        }
        Ok(BundleModel {
            spec: Arc::clone(spec),
            roots,
            kind,
        })
    }

    pub fn complex(spec: &Arc<RingSpec>, roots: Vec<RingClass>) -> Result<Self> {
        Self::new(spec, roots, BundleKind::Complex)
    }

    pub fn realification(spec: &Arc<RingSpec>, roots: Vec<RingClass>) -> Result<Self> {
        Self::new(spec, roots, BundleKind::Realification)
    }

    /// The complex bundle `lambda_1 + ... + lambda_n` whose roots are the
    /// generators of `spec` (all of which must have degree 2).
    pub fn split_from_generators(spec: &Arc<RingSpec>) -> Result<Self> {
        let roots = (0..spec.generators().len())
            .map(|i| RingClass::generator_at(spec, i))
            .collect();
        Self::complex(spec, roots)
    }

    pub fn trivial(spec: &Arc<RingSpec>, rank: usize, kind: BundleKind) -> Self {
        BundleModel {
            spec: Arc::clone(spec),
            roots: vec![RingClass::zero(spec); rank],
            kind,
        }
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn roots(&self) -> &[RingClass] {
        &self.roots
    }

    pub fn kind(&self) -> BundleKind {
        self.kind
    }

    /// Complex rank, or half the real rank for a realification.
    pub fn rank(&self) -> usize {
        self.roots.len()
    }

    pub fn realify(&self) -> BundleModel {
        BundleModel {
            kind: BundleKind::Realification,
            ..self.clone()
        }
    }

    fn require(&self, kind: BundleKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongKind {
                expected: kind.name(),
                found: self.kind.name(),
            })
        }
    }

    fn check_pair(&self, other: &BundleModel) -> Result<()> {
        if *self.spec == *other.spec {
            Ok(())
        } else {
            Err(Error::IncompatibleRing("bundles over different rings".into()))
        }
    }

    pub fn direct_sum(&self, other: &BundleModel) -> Result<BundleModel> {
        self.check_pair(other)?;
        if self.kind != other.kind {
            return Err(Error::WrongKind {
                expected: self.kind.name(),
                found: other.kind.name(),
            });
        }
        let mut roots = self.roots.clone();
        roots.extend(other.roots.iter().cloned());
        Self::new(&self.spec, roots, self.kind)
    }

    /// Complex tensor product: roots `x_i + y_j`.
    pub fn tensor(&self, other: &BundleModel) -> Result<BundleModel> {
        self.check_pair(other)?;
        self.require(BundleKind::Complex)?;
        other.require(BundleKind::Complex)?;
        let mut roots = Vec::with_capacity(self.rank() * other.rank());
        for x in &self.roots {
            for y in &other.roots {
                roots.push(x.add(y)?);
            }
        }
        Self::complex(&self.spec, roots)
    }

    pub fn dual(&self) -> Result<BundleModel> {
        self.require(BundleKind::Complex)?;
        Self::complex(&self.spec, self.roots.iter().map(RingClass::neg).collect())
    }

    /// `Hom(self, other)` with roots `y_j - x_i`.
    pub fn hom(&self, other: &BundleModel) -> Result<BundleModel> {
        hom_end_bundle(self, other)
    }

    pub fn end(&self) -> Result<BundleModel> {
        hom_end_bundle(self, self)
    }

    /// `self (x) C` as a complex bundle: roots `x_i` and `-x_i`.
    pub fn complexification(&self) -> Result<BundleModel> {
        self.require(BundleKind::Realification)?;
        let mut roots = Vec::with_capacity(2 * self.rank());
        for x in &self.roots {
            roots.push(x.clone());
            roots.push(x.neg());
        }
        Self::complex(&self.spec, roots)
    }

    /// Applies a ring homomorphism to every root.
    pub fn substitute(&self, target: &Arc<RingSpec>, images: &[RingClass]) -> Result<BundleModel> {
        let roots = self
            .roots
            .iter()
            .map(|r| r.substitute(target, images))
            .collect::<Result<Vec<_>>>()?;
        Self::new(target, roots, self.kind)
    }
}

/// `Hom(xi, eta)` for complex bundles: roots `y_j - x_i` over all pairs.
pub fn hom_end_bundle(xi: &BundleModel, eta: &BundleModel) -> Result<BundleModel> {
    xi.check_pair(eta)?;
    xi.require(BundleKind::Complex)?;
    eta.require(BundleKind::Complex)?;
    let mut roots = Vec::with_capacity(xi.rank() * eta.rank());
    for x in &xi.roots {
        for y in &eta.roots {
            roots.push(y.sub(x)?);
        }
    }
    BundleModel::complex(&xi.spec, roots)
}

/// Sum of `x^k / k!` over the given roots.
fn power_sum_over_factorial(spec: &Arc<RingSpec>, roots: &[RingClass], k: u32) -> RingClass {
    let mut acc = RingClass::zero(spec);
    for x in roots {
        acc = acc.add(&x.pow(k)).expect("roots share the bundle ring");
    }
    acc.scale(&factorial(k).recip())
}

/// `ch_k(xi) = sum_i x_i^k / k!`; `ch_0` is the rank.
pub fn chern_character_component(xi: &BundleModel, k: u32) -> Result<RingClass> {
    xi.require(BundleKind::Complex)?;
    Ok(power_sum_over_factorial(&xi.spec, &xi.roots, k))
}

/// `1/2 ch_{2k}(xi (x) C)` for the realification of a complex bundle,
/// expanded over the roots `+-x_i` of the complexification.
pub fn half_ch_complexification(xi: &BundleModel, k: u32) -> Result<RingClass> {
    xi.require(BundleKind::Realification)?;
    let full = chern_character_component(&xi.complexification()?, 2 * k)?;
    Ok(full.scale(&crate::rational::frac(1, 2)))
}

/// Pontryagin classes `p_j = e_j(x_1^2, ..., x_m^2)` for `j = 1..=count`.
pub fn pontryagin_classes(xi: &BundleModel, count: u32) -> Result<Vec<RingClass>> {
    xi.require(BundleKind::Realification)?;
    let squares: Vec<RingClass> = xi.roots.iter().map(|x| x.pow(2)).collect();
    Ok(elementary_symmetric(&xi.spec, &squares, count)[1..].to_vec())
}

/// The comparison route `N_k(p_1, p_2, ...) / (2k)!` for
/// [`half_ch_complexification`].
pub fn half_ch_via_pontryagin(xi: &BundleModel, k: u32) -> Result<RingClass> {
    if k == 0 {
        return Err(Error::Domain("Newton polynomials start at k = 1".into()));
    }
    let p = pontryagin_classes(xi, k)?;
    let nk = newton_polynomial(k);
    let value = nk.substitute(&xi.spec, &p)?;
    Ok(value.scale(&factorial(2 * k).recip()))
}

/// `rank` as a degree-zero class.
pub fn rank_class(xi: &BundleModel) -> RingClass {
    RingClass::constant(&xi.spec, q(xi.rank() as i64))
}
