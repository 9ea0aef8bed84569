use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::charclass::{monomial_key, RingClass, RingSpec};
use crate::error::{Error, Result};
use crate::polylog::{polylog_l_tol, riemann_zeta_odd, RootOfUnity, CERTIFIABLE_TOLERANCE, DEFAULT_TOLERANCE};
use crate::rational::{self, Q};

/// A named transcendental constant together with its numerical value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constant {
    pub label: String,
    pub value: f64,
}

impl Constant {
    /// `L_{k+1}(z)`, labelled by the reduced root so equal values share a label.
    ///
    /// Closed forms multiply `L_{k+1}(z)` by up to `m^k` for `z` of order
    /// `m`, so the value is computed to `1e-12 / m^{k-1}`, but no tighter
    /// than double precision can certify.
    pub fn polylog(k: u32, z: RootOfUnity) -> Result<Self> {
        let (m, j) = z.reduced();
        let tol = (DEFAULT_TOLERANCE / (m as f64).powi(k.saturating_sub(1) as i32)).max(CERTIFIABLE_TOLERANCE);
        Ok(Constant {
            label: format!("L{}({}/{})", k + 1, j, m),
            value: polylog_l_tol(k, z, tol)?.value,
        })
    }

    /// `zeta(2k + 1)`.
    pub fn zeta_odd(k: u32) -> Self {
        Constant {
            label: format!("zeta({})", 2 * k + 1),
            value: riemann_zeta_odd(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub constant: Constant,
    pub body: RingClass,
}

/// A torsion class `sum_t c_t * B_t` with transcendental constants `c_t` and
/// exact rational bodies `B_t`, all homogeneous of degree `2 * degree`.
///
/// Terms with the same constant label are merged, so sums stay exact. When
/// all bodies are proportional the class also has a single-scalar view
/// `scalar * body` with a monic body; see [`TorsionClass::scalar_view`].
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionClass {
    degree: u32,
    m: u64,
    zeta: RootOfUnity,
    spec: Arc<RingSpec>,
    terms: Vec<Term>,
    provenance: String,
}

/// Outcome of comparing two classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Monic bodies coincide exactly (both classes have a scalar view).
    pub body_equal: bool,
    pub lhs_scalar: f64,
    pub rhs_scalar: f64,
    /// `|lhs_scalar - rhs_scalar|`, or the expanded difference when a class
    /// has no single-scalar view.
    pub scalar_diff: f64,
    /// Max-norm of the difference of the expanded real coefficients.
    pub expanded_diff: f64,
}

impl Comparison {
    /// Exact body agreement and scalar agreement within `tol`. Classes that
    /// both vanish numerically agree regardless of body.
    pub fn agrees(&self, tol: f64) -> bool {
        let both_zero = self.lhs_scalar.abs() <= tol && self.rhs_scalar.abs() <= tol;
        (self.body_equal || both_zero) && self.scalar_diff <= tol && self.expanded_diff <= tol
    }
}

impl TorsionClass {
    pub fn zero(
        degree: u32,
        m: u64,
        zeta: RootOfUnity,
        spec: &Arc<RingSpec>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Domain("torsion classes start in degree k >= 1".into()));
        }
        Ok(TorsionClass {
            degree,
            m,
            zeta,
            spec: Arc::clone(spec),
            terms: Vec::new(),
            provenance: provenance.into(),
        })
    }

    /// `constant * body`.
    pub fn single(
        degree: u32,
        m: u64,
        zeta: RootOfUnity,
        constant: Constant,
        body: RingClass,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mut out = Self::zero(degree, m, zeta, body.spec(), provenance)?;
        if !body.is_homogeneous_of(2 * degree) {
            return Err(Error::model(
                "torsion",
                format!("torsion body {body} is not homogeneous of degree {}", 2 * degree),
            ));
        }
        out.terms.push(Term { constant, body });
        out.canonicalize();
        Ok(out)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn zeta(&self) -> RootOfUnity {
        self.zeta
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn canonicalize(&mut self) {
        let mut merged: BTreeMap<String, Term> = BTreeMap::new();
        for t in self.terms.drain(..) {
            match merged.get_mut(&t.constant.label) {
                Some(existing) => {
                    existing.body = existing.body.add(&t.body).expect("checked same ring");
                }
                None => {
                    merged.insert(t.constant.label.clone(), t);
                }
            }
        }
        self.terms = merged.into_values().filter(|t| !t.body.is_zero()).collect();
    }

    fn check_compatible(&self, other: &TorsionClass) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::Domain(format!(
                "torsion degree mismatch: {} vs {}",
                self.degree, other.degree
            )));
        }
        if *self.spec != *other.spec {
            return Err(Error::IncompatibleRing("torsion classes over different rings".into()));
        }
        Ok(())
    }

    /// Sum; the `m`, `zeta` and provenance tags are taken from `self`.
    pub fn add(&self, other: &TorsionClass) -> Result<TorsionClass> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.canonicalize();
        Ok(out)
    }

    pub fn sub(&self, other: &TorsionClass) -> Result<TorsionClass> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Q) -> TorsionClass {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.body = t.body.scale(s);
        }
        out.canonicalize();
        out
    }

    pub fn neg(&self) -> TorsionClass {
        self.scale(&rational::q(-1))
    }

    /// `sum_t c_t * B_t` with real coefficients.
    pub fn expanded(&self) -> BTreeMap<Vec<u32>, f64> {
        let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for t in &self.terms {
            for (mono, c) in t.body.to_f64_map() {
                *out.entry(mono).or_insert(0.0) += t.constant.value * c;
            }
        }
        out
    }

    /// `(scalar, monic body)` when every term's body is a rational multiple
    /// of one monic body. The zero class has view `(0, 0)`.
    pub fn scalar_view(&self) -> Option<(f64, RingClass)> {
        let mut iter = self.terms.iter();
        let Some(first) = iter.next() else {
            return Some((0.0, RingClass::zero(&self.spec)));
        };
        let lead = first.body.leading_coefficient().expect("nonzero body").clone();
        let monic = first.body.scale(&lead.recip());
        let mut scalar = first.constant.value * rational::to_f64(&lead);
        for t in iter {
            let r = t.body.ratio_to(&monic)?;
            scalar += t.constant.value * rational::to_f64(&r);
        }
        Some((scalar, monic))
    }

    pub fn compare(&self, other: &TorsionClass) -> Comparison {
        let a = self.expanded();
        let b = other.expanded();
        let mut expanded_diff = 0.0f64;
        for key in a.keys().chain(b.keys()) {
            let d = a.get(key).copied().unwrap_or(0.0) - b.get(key).copied().unwrap_or(0.0);
            expanded_diff = expanded_diff.max(d.abs());
        }
        match (self.scalar_view(), other.scalar_view()) {
            (Some((s1, b1)), Some((s2, b2))) => Comparison {
                body_equal: b1 == b2,
                lhs_scalar: s1,
                rhs_scalar: s2,
                scalar_diff: (s1 - s2).abs(),
                expanded_diff,
            },
            _ => Comparison {
                body_equal: false,
                lhs_scalar: f64::NAN,
                rhs_scalar: f64::NAN,
                scalar_diff: expanded_diff,
                expanded_diff,
            },
        }
    }

    /// Equal up to `tol` in every expanded real coefficient.
    pub fn approx_eq(&self, other: &TorsionClass, tol: f64) -> bool {
        self.degree == other.degree && self.compare(other).expanded_diff <= tol
    }

    pub fn to_json(&self) -> TorsionJson {
        let view = self.scalar_view();
        TorsionJson {
            degree: self.degree,
            m: self.m,
            zeta: self.zeta,
            scalar: view.as_ref().map(|(s, _)| *s),
            body: view.map(|(_, b)| b.to_string_map()),
            generators: self.spec.generators().iter().map(|g| g.name.clone()).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    constant: t.constant.label.clone(),
                    value: t.constant.value,
                    body: t.body.to_string_map(),
                })
                .collect(),
            expanded: self
                .expanded()
                .into_iter()
                .map(|(mono, c)| (monomial_key(&mono), c))
                .collect(),
            provenance: self.provenance.clone(),
        }
    }
}

impl std::fmt::Display for TorsionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·({})", t.constant.label, t.body)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermJson {
    pub constant: String,
    pub value: f64,
    pub body: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionJson {
    pub degree: u32,
    pub m: u64,
    pub zeta: RootOfUnity,
    pub scalar: Option<f64>,
    pub body: Option<BTreeMap<String, String>>,
    pub generators: Vec<String>,
    pub terms: Vec<TermJson>,
    pub expanded: BTreeMap<String, f64>,
    pub provenance: String,
}
