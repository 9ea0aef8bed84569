use crate::charclass::{BundleModel, RingClass};
use crate::error::{Error, Result};
use crate::polylog::RootOfUnity;
use crate::rational::{factorial, q};
use crate::report::{Check, Report};

use super::class::{Comparison, Constant, TorsionClass};
use super::formulas::{complex_torsion_closed, torsion_lens_bundle, torsion_lens_via_splitting};

/// Records exact monic-body equality and scalar agreement for two classes.
pub fn compare_checks(report: &mut Report, name: &str, lhs: &TorsionClass, rhs: &TorsionClass, tol: f64) {
    let cmp: Comparison = lhs.compare(rhs);
    let both_zero = cmp.lhs_scalar.abs() <= tol && cmp.rhs_scalar.abs() <= tol;
    report.push(Check::exact(format!("{name}/body"), cmp.body_equal || both_zero));
    report.push(Check::with_diff(
        format!("{name}/scalar"),
        cmp.lhs_scalar,
        cmp.rhs_scalar,
        cmp.scalar_diff,
        tol,
    ));
}

/// The direct lens bundle formula against the sum over the Chern roots.
pub fn verify_lens_paths(
    xi: &BundleModel,
    m: u64,
    k: u32,
    z: RootOfUnity,
    upper_triangular: bool,
    tol: f64,
) -> Result<Report> {
    let direct = torsion_lens_bundle(xi, m, k, z, upper_triangular)?;
    let split = torsion_lens_via_splitting(xi, m, k, z, upper_triangular)?;
    let mut report = Report::new("lens_paths");
    compare_checks(&mut report, &format!("rank{}_m{m}_k{k}_z{}_{}", xi.rank(), z.j(), z.m()), &direct, &split, tol);
    Ok(report)
}

/// `tau_k(E, z)_m = sum_{zeta^r = z} tau_k(E, zeta)_{mr}` for closed almost
/// complex fibers with `T_k = tk`.
pub fn verify_complex_transfer(
    tk: &RingClass,
    k: u32,
    m: u64,
    r: u64,
    z: RootOfUnity,
    upper_triangular: bool,
    tol: f64,
) -> Result<Report> {
    if r < 2 {
        return Err(Error::Domain("transfer degree r must be at least 2".into()));
    }
    let lhs = complex_torsion_closed(tk, k, m, z, upper_triangular)?;
    let mut rhs = TorsionClass::zero(k, m * r, z, tk.spec(), "transfer_sum")?;
    for zeta in z.rth_roots(r) {
        rhs = rhs.add(&complex_torsion_closed(tk, k, m * r, zeta, upper_triangular)?)?;
    }
    let mut report = Report::new("complex_transfer");
    compare_checks(&mut report, &format!("k{k}_m{m}_r{r}_z{}_{}", z.j(), z.m()), &lhs, &rhs, tol);
    Ok(report)
}

/// `tau^+ + tau^- = (-1)^k zeta(2k+1) T_{2k} / (2k)!`; the right-hand side
/// is also the torsion of the vertical sphere bundle `S(E)`.
pub fn unoriented_relations(
    tau_plus: &TorsionClass,
    tau_minus: &TorsionClass,
    t2k: &RingClass,
    k: u32,
    tol: f64,
) -> Result<Report> {
    if k == 0 {
        return Err(Error::Domain("torsion degree k must be at least 1".into()));
    }
    let sign = if k.is_multiple_of(2) { q(1) } else { q(-1) };
    let rhs = TorsionClass::single(
        2 * k,
        1,
        RootOfUnity::one(),
        Constant::zeta_odd(k),
        t2k.scale(&(sign / factorial(2 * k))),
        "unoriented_sum",
    )?;
    let lhs = tau_plus.add(tau_minus)?;
    let mut report = Report::new("unoriented");
    let cmp = lhs.compare(&rhs);
    report.push(Check::with_diff(
        "plus_minus_sum",
        cmp.lhs_scalar,
        cmp.rhs_scalar,
        cmp.expanded_diff,
        tol,
    ));
    // sphere bundle of the vertical tangent bundle carries the same value
    report.push(Check::with_diff(
        "sphere_of_tangent",
        cmp.rhs_scalar,
        cmp.lhs_scalar,
        cmp.expanded_diff,
        tol,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charclass::RingSpec;
    use crate::rational::frac;
    use crate::torsion::formulas::real_even_closed;

    fn kappa(k: u32) -> RingClass {
        let spec = RingSpec::with(&[("t", 2 * k)], 2 * k).unwrap();
        RingClass::generator(&spec, "t").unwrap()
    }

    #[test]
    fn transfer_examples() {
        let t2 = kappa(2);
        assert!(verify_complex_transfer(&t2, 2, 1, 2, RootOfUnity::one(), true, 1e-10).unwrap().pass);
        let t3 = kappa(3);
        let minus = RootOfUnity::new(2, 1).unwrap();
        assert!(verify_complex_transfer(&t3, 3, 2, 3, minus, false, 1e-10).unwrap().pass);
        let zero = RingClass::zero(t3.spec());
        assert!(verify_complex_transfer(&zero, 3, 2, 3, minus, false, 1e-10).unwrap().pass);
    }

    #[test]
    fn transfer_detects_wrong_order() {
        // using m instead of m*r on the right must fail
        let t = kappa(2);
        let z = RootOfUnity::new(3, 1).unwrap();
        let lhs = complex_torsion_closed(&t, 2, 3, z, false).unwrap();
        let mut rhs = TorsionClass::zero(2, 3, z, t.spec(), "wrong").unwrap();
        for zeta in z.rth_roots(2) {
            rhs = rhs.add(&complex_torsion_closed(&t, 2, 6, zeta, false).unwrap().scale(&frac(1, 4))).unwrap();
        }
        assert!(!lhs.compare(&rhs).agrees(1e-10));
    }

    #[test]
    fn unoriented_examples() {
        let t = kappa(2);
        let full = real_even_closed(&t, 1).unwrap().scale(&q(2));
        let half = full.scale(&frac(1, 2));
        assert!(unoriented_relations(&half, &half, &t, 1, 1e-12).unwrap().pass);
        let zero = RingClass::zero(t.spec());
        assert!(unoriented_relations(&half, &half.neg(), &zero, 1, 1e-12).unwrap().pass);
        assert!(!unoriented_relations(&half, &half.neg(), &t, 1, 1e-12).unwrap().pass);
    }

    #[test]
    fn lens_paths_small() {
        let xi = BundleModel::split_from_generators(&RingSpec::roots(2, "x", 8)).unwrap();
        let z = RootOfUnity::new(3, 1).unwrap();
        assert!(verify_lens_paths(&xi, 3, 2, z, false, 1e-12).unwrap().pass);
    }
}
