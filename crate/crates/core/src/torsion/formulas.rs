use crate::charclass::{
    chern_character_component, half_ch_complexification, BundleKind, BundleModel, RingClass,
};
use crate::error::{Error, Result};
use crate::polylog::RootOfUnity;
use crate::rational::{factorial, frac, q, Q};

use super::class::{Constant, TorsionClass};

pub(super) fn require_k(k: u32) -> Result<()> {
    if k == 0 {
        Err(Error::Domain("torsion degree k must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `z` must be an `n`-th root of unity; `z = 1` additionally needs the
/// caller to assert the upper-triangular hypothesis.
pub(super) fn require_root(z: RootOfUnity, n: u64, upper_triangular: bool) -> Result<()> {
    if !z.is_nth_root(n) {
        return Err(Error::Domain(format!("{z} is not an {n}-th root of unity")));
    }
    if z.is_one() && !upper_triangular {
        return Err(Error::Precondition(
            "z = 1 requires the upper-triangular hypothesis flag".into(),
        ));
    }
    Ok(())
}

fn sign(e: u32) -> Q {
    if e.is_multiple_of(2) {
        q(1)
    } else {
        q(-1)
    }
}

fn require_homogeneous(class: &RingClass, degree: u32, what: &str) -> Result<()> {
    if class.is_homogeneous_of(degree) {
        Ok(())
    } else {
        Err(Error::model(
            "torsion",
            format!("{what} = {class} is not homogeneous of degree {degree}"),
        ))
    }
}

/// Circle bundle of a line bundle with first Chern class `c1`, with the
/// fiber acted on by `z^n = 1`: `-(n^k / k!) L_{k+1}(z) c1^k`.
pub fn torsion_circle_bundle(
    c1: &RingClass,
    n: u64,
    k: u32,
    z: RootOfUnity,
    upper_triangular: bool,
) -> Result<TorsionClass> {
    require_k(k)?;
    require_root(z, n, upper_triangular)?;
    require_homogeneous(c1, 2, "c1")?;
    let coeff = -Q::from_integer((n as i64).pow(k).into()) / factorial(k);
    TorsionClass::single(
        k,
        n,
        z,
        Constant::polylog(k, z)?,
        c1.pow(k).scale(&coeff),
        "circle_bundle",
    )
}

pub(super) fn require_kind(xi: &BundleModel, kind: BundleKind) -> Result<()> {
    if xi.kind() == kind {
        Ok(())
    } else {
        Err(Error::WrongKind {
            expected: kind.name(),
            found: xi.kind().name(),
        })
    }
}

/// Lens space bundle `S(xi)/Z_m`: `-m^k L_{k+1}(z) ch_k(xi)`.
pub fn torsion_lens_bundle(
    xi: &BundleModel,
    m: u64,
    k: u32,
    z: RootOfUnity,
    upper_triangular: bool,
) -> Result<TorsionClass> {
    require_k(k)?;
    require_root(z, m, upper_triangular)?;
    require_kind(xi, BundleKind::Complex)?;
    let body = chern_character_component(xi, k)?.scale(&-Q::from_integer((m as i64).pow(k).into()));
    TorsionClass::single(k, m, z, Constant::polylog(k, z)?, body, "lens_bundle")
}

/// The lens bundle torsion as a sum of circle bundle torsions over the
/// Chern roots of `xi`.
pub fn torsion_lens_via_splitting(
    xi: &BundleModel,
    m: u64,
    k: u32,
    z: RootOfUnity,
    upper_triangular: bool,
) -> Result<TorsionClass> {
    require_k(k)?;
    require_root(z, m, upper_triangular)?;
    require_kind(xi, BundleKind::Complex)?;
    let mut acc = TorsionClass::zero(k, m, z, xi.spec(), "lens_via_splitting")?;
    for x in xi.roots() {
        acc = acc.add(&torsion_circle_bundle(x, m, k, z, upper_triangular)?)?;
    }
    Ok(acc)
}

/// Sphere bundle of an oriented real `n`-plane bundle, given as the
/// realification `xi` (real rank `2 * rank`, plus one trivial line when `n`
/// is odd): `(-1)^{k+n-1} zeta(2k+1) 1/2 ch_{2k}(xi (x) C)` in degree `2k`.
pub fn torsion_sphere_bundle(xi: &BundleModel, n: u32, k: u32) -> Result<TorsionClass> {
    require_k(k)?;
    require_kind(xi, BundleKind::Realification)?;
    let real_rank = 2 * xi.rank() as u32;
    if n == 0 || (real_rank != n && real_rank + 1 != n) {
        return Err(Error::model(
            "torsion",
            format!("real rank {n} does not match a realification of complex rank {}", xi.rank()),
        ));
    }
    let body = half_ch_complexification(xi, k)?.scale(&sign(k + n - 1));
    TorsionClass::single(
        2 * k,
        1,
        RootOfUnity::one(),
        Constant::zeta_odd(k),
        body,
        "sphere_bundle",
    )
}

/// Closed almost complex fibers: `1/2 m^k L_{k+1}(zeta) T_k / k!`.
pub fn complex_torsion_closed(
    tk: &RingClass,
    k: u32,
    m: u64,
    zeta: RootOfUnity,
    upper_triangular: bool,
) -> Result<TorsionClass> {
    require_k(k)?;
    require_root(zeta, m, upper_triangular)?;
    require_homogeneous(tk, 2 * k, "T_k")?;
    let coeff = Q::from_integer((m as i64).pow(k).into()) / (factorial(k) * q(2));
    TorsionClass::single(
        k,
        m,
        zeta,
        Constant::polylog(k, zeta)?,
        tk.scale(&coeff),
        "complex_closed",
    )
}

/// Closed oriented even-dimensional fibers: `1/2 (-1)^k zeta(2k+1) T_{2k} / (2k)!`
/// in degree `2k`.
pub fn real_even_closed(t2k: &RingClass, k: u32) -> Result<TorsionClass> {
    require_k(k)?;
    require_homogeneous(t2k, 4 * k, "T_2k")?;
    let coeff = sign(k) / (factorial(2 * k) * q(2));
    TorsionClass::single(
        2 * k,
        1,
        RootOfUnity::one(),
        Constant::zeta_odd(k),
        t2k.scale(&coeff),
        "real_even_closed",
    )
}

/// `interior + (1/2m) boundary`; the boundary correction vanishes in odd
/// degree.
pub fn boundary_corrected_complex_torsion(
    interior: &TorsionClass,
    boundary: &TorsionClass,
    m: u64,
) -> Result<TorsionClass> {
    if interior.degree() != boundary.degree() {
        return Err(Error::Domain(format!(
            "boundary torsion has degree {} but interior has {}",
            boundary.degree(),
            interior.degree()
        )));
    }
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let out = if interior.degree() % 2 == 1 {
        interior.clone()
    } else {
        interior.add(&boundary.scale(&frac(1, 2 * m as i64)))?
    };
    Ok(out.with_provenance("boundary_corrected"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Combinator {
    /// Product with a closed manifold of Euler characteristic `chi`.
    Product(i64),
    /// `tau_1 + tau_2 - tau_0` for inputs `[tau_1, tau_2, tau_0]`.
    Glue,
    /// `tau_1 + tau_2`.
    Stack,
    /// `(-1)^m tau`.
    Suspend(u32),
    /// `(-1)^{n-1} tau` for an `n`-dimensional fiber.
    Involution(u32),
    Scale(Q),
}

impl Combinator {
    fn arity(&self) -> usize {
        match self {
            Combinator::Glue => 3,
            Combinator::Stack => 2,
            _ => 1,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Combinator::Product(_) => "product",
            Combinator::Glue => "glue",
            Combinator::Stack => "stack",
            Combinator::Suspend(_) => "suspend",
            Combinator::Involution(_) => "involution",
            Combinator::Scale(_) => "scale",
        }
    }
}

pub fn torsion_combinators(inputs: &[TorsionClass], rule: &Combinator) -> Result<TorsionClass> {
    if inputs.len() != rule.arity() {
        return Err(Error::Domain(format!(
            "{} takes {} inputs, got {}",
            rule.name(),
            rule.arity(),
            inputs.len()
        )));
    }
    let t = &inputs[0];
    let out = match rule {
        Combinator::Product(chi) => t.scale(&q(*chi)),
        Combinator::Glue => t.add(&inputs[1])?.sub(&inputs[2])?,
        Combinator::Stack => t.add(&inputs[1])?,
        Combinator::Suspend(m) => t.scale(&sign(*m)),
        Combinator::Involution(n) => {
            if *n == 0 {
                return Err(Error::Domain("fiber dimension must be positive".into()));
            }
            t.scale(&sign(n - 1))
        }
        Combinator::Scale(s) => t.scale(s),
    };
    Ok(out.with_provenance(rule.name()))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::charclass::RingSpec;
    use crate::polylog::riemann_zeta_odd;

    fn zeta3() -> f64 {
        riemann_zeta_odd(1)
    }

    fn line() -> (Arc<RingSpec>, RingClass) {
        let spec = RingSpec::with(&[("c", 2)], 12).unwrap();
        let c = RingClass::generator(&spec, "c").unwrap();
        (spec, c)
    }

    #[test]
    fn circle_universal_bundle() {
        let (_, c) = line();
        let t = torsion_circle_bundle(&c, 1, 2, RootOfUnity::one(), true).unwrap();
        let (s, body) = t.scalar_view().unwrap();
        assert_eq!(body, c.pow(2));
        assert!((s - zeta3() / 2.0).abs() < 1e-12);
        // (-1)^{k+1} zeta(2k+1) ch_{2k}(gamma) at k = 1, ch_2 = c^2/2
        assert!((s - zeta3() * 0.5).abs() < 1e-12);
    }

    #[test]
    fn circle_domain_errors() {
        let (_, c) = line();
        let minus = RootOfUnity::new(2, 1).unwrap();
        assert!(matches!(torsion_circle_bundle(&c, 1, 1, minus, false), Err(Error::Domain(_))));
        assert!(matches!(
            torsion_circle_bundle(&c, 1, 1, RootOfUnity::one(), false),
            Err(Error::Precondition(_))
        ));
        assert!(torsion_circle_bundle(&c, 1, 0, RootOfUnity::one(), true).is_err());
        let t = torsion_circle_bundle(&c, 2, 1, minus, false).unwrap();
        assert_eq!(t.scalar_view().unwrap().0, 0.0);
    }

    #[test]
    fn lens_rank_two() {
        let spec = RingSpec::roots(2, "x", 8);
        let xi = BundleModel::split_from_generators(&spec).unwrap();
        let minus = RootOfUnity::new(2, 1).unwrap();
        let t = torsion_lens_bundle(&xi, 2, 2, minus, false).unwrap();
        let ch2 = chern_character_component(&xi, 2).unwrap();
        // -4 * L_3(-1) = -3 zeta(3), on ch_2 = (x1^2 + x2^2)/2
        let expected = TorsionClass::single(
            2,
            2,
            minus,
            Constant::zeta_odd(1),
            ch2.scale(&q(-3)),
            "expected",
        )
        .unwrap();
        assert!(t.compare(&expected).agrees(1e-12));
        let k1 = torsion_lens_bundle(&xi, 2, 1, minus, false).unwrap();
        assert_eq!(k1.scalar_view().unwrap().0, 0.0);
    }

    #[test]
    fn lens_of_line_is_circle() {
        let (spec, c) = line();
        let xi = BundleModel::complex(&spec, vec![c.clone()]).unwrap();
        for m in 2..=4u64 {
            let z = RootOfUnity::new(m, 1).unwrap();
            let a = torsion_lens_bundle(&xi, m, 3, z, false).unwrap();
            let b = torsion_circle_bundle(&c, m, 3, z, false).unwrap();
            assert!(a.compare(&b).agrees(1e-12));
        }
    }

    #[test]
    fn lens_two_paths() {
        let spec = RingSpec::roots(3, "x", 12);
        let xi = BundleModel::split_from_generators(&spec).unwrap();
        let z = RootOfUnity::new(2, 1).unwrap();
        let a = torsion_lens_bundle(&xi, 2, 3, z, false).unwrap();
        let b = torsion_lens_via_splitting(&xi, 2, 3, z, false).unwrap();
        let cmp = a.compare(&b);
        assert!(cmp.body_equal && cmp.scalar_diff < 1e-12);
    }

    #[test]
    fn sphere_bundle_signs() {
        let (spec, c) = line();
        let xi = BundleModel::realification(&spec, vec![c.clone()]).unwrap();
        let t = torsion_sphere_bundle(&xi, 2, 1).unwrap();
        let (s, body) = t.scalar_view().unwrap();
        assert_eq!(body, c.pow(2));
        assert!((s - zeta3() / 2.0).abs() < 1e-12);
        let odd = torsion_sphere_bundle(&xi, 3, 1).unwrap();
        assert!(odd.compare(&t.neg()).agrees(1e-15));
        let trivial = BundleModel::trivial(&spec, 2, BundleKind::Realification);
        assert!(torsion_sphere_bundle(&trivial, 4, 2).unwrap().is_zero());
        assert!(torsion_sphere_bundle(&xi, 5, 1).is_err());
    }

    #[test]
    fn complex_generalizes_real() {
        let spec = RingSpec::with(&[("kappa2", 4)], 8).unwrap();
        let t = RingClass::generator(&spec, "kappa2").unwrap();
        let c = complex_torsion_closed(&t, 2, 1, RootOfUnity::one(), true).unwrap();
        let r = real_even_closed(&t, 1).unwrap();
        assert!(c.compare(&r).agrees(1e-12));
        let zero = RingClass::zero(&spec);
        assert!(real_even_closed(&zero, 1).unwrap().is_zero());
    }

    #[test]
    fn combinator_identities() {
        let (_, c) = line();
        let t = torsion_circle_bundle(&c, 3, 2, RootOfUnity::new(3, 1).unwrap(), false).unwrap();
        let doubled = torsion_combinators(std::slice::from_ref(&t), &Combinator::Product(2)).unwrap();
        let back = torsion_combinators(&[doubled], &Combinator::Scale(frac(1, 2))).unwrap();
        assert!(back.compare(&t).agrees(0.0));
        let glued = torsion_combinators(&[t.clone(), t.clone(), t.clone()], &Combinator::Glue).unwrap();
        assert!(glued.compare(&t).agrees(0.0));
        let s1 = torsion_combinators(std::slice::from_ref(&t), &Combinator::Suspend(1)).unwrap();
        let s2 = torsion_combinators(std::slice::from_ref(&s1), &Combinator::Suspend(1)).unwrap();
        assert!(s2.compare(&t).agrees(0.0));
        assert!(s1.compare(&t.neg()).agrees(0.0));
        assert!(torsion_combinators(std::slice::from_ref(&t), &Combinator::Glue).is_err());
        let inv = torsion_combinators(std::slice::from_ref(&t), &Combinator::Involution(2)).unwrap();
        assert!(inv.compare(&t.neg()).agrees(0.0));
    }

    #[test]
    fn boundary_correction() {
        let (spec, c) = line();
        let z = RootOfUnity::new(3, 1).unwrap();
        let interior = torsion_circle_bundle(&c, 3, 2, z, false).unwrap();
        let boundary = torsion_circle_bundle(&c, 3, 2, z, false).unwrap();
        let zero = TorsionClass::zero(2, 3, z, &spec, "zero").unwrap();
        let unchanged = boundary_corrected_complex_torsion(&interior, &zero, 3).unwrap();
        assert!(unchanged.compare(&interior).agrees(0.0));
        let corrected = boundary_corrected_complex_torsion(&interior, &boundary, 3).unwrap();
        let expected = interior.scale(&frac(7, 6));
        assert!(corrected.compare(&expected).agrees(1e-15));
        // stabilised boundary: gluing on two zero pieces changes nothing
        let stab = torsion_combinators(&[boundary.clone(), zero.clone(), zero], &Combinator::Glue).unwrap();
        let again = boundary_corrected_complex_torsion(&interior, &stab, 3).unwrap();
        assert!(again.compare(&corrected).agrees(0.0));
        let odd_i = torsion_circle_bundle(&c, 3, 1, z, false).unwrap();
        let odd = boundary_corrected_complex_torsion(&odd_i, &odd_i, 3).unwrap();
        assert!(odd.compare(&odd_i).agrees(0.0));
    }
}
