use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::{Check, Report};

use super::cochain::{kt_cochain, QuadratureSpec};
use super::family::{Catalog, CMatrix, MatrixFamily, C64};

pub const KT_TOL: f64 = 1e-9;

fn unitary_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `kt(A + B) = kt(A) + kt(B)`.
pub fn kt_direct_sum_check(a: &MatrixFamily, b: &MatrixFamily, quad: &QuadratureSpec) -> Result<Report> {
    if a.k() != b.k() {
        return Err(Error::Precondition("direct summands have different k".into()));
    }
    let sum = MatrixFamily::direct_sum(&[a.clone(), b.clone()])?;
    let (ka, kb, ks) = (kt_cochain(a, quad)?, kt_cochain(b, quad)?, kt_cochain(&sum, quad)?);
    let est = ka.estimated_error.max(kb.estimated_error).max(ks.estimated_error);
    let mut r = Report::new("kt_direct_sum");
    r.push(Check::close("additivity", ks.value, ka.value + kb.value, KT_TOL.max(10.0 * est)));
    Ok(r)
}

/// `kt(U f V) = kt(f)` for constant unitary `U`, `V`.
pub fn kt_unitary_invariance_check(
    fam: &MatrixFamily,
    u: &CMatrix,
    v: &CMatrix,
    quad: &QuadratureSpec,
) -> Result<Report> {
    for (name, m) in [("U", u), ("V", v)] {
        if m.shape() != (fam.n(), fam.n()) {
            return Err(Error::Domain(format!("{name} is not {0}x{0}", fam.n())));
        }
        let defect = unitary_defect(m);
        if defect > 1e-12 {
            return Err(Error::Domain(format!("{name} is not unitary (defect {defect:e})")));
        }
    }
    let lhs = kt_cochain(&fam.transformed(u.clone(), v.clone())?, quad)?;
    let rhs = kt_cochain(fam, quad)?;
    let mut r = Report::new("kt_unitary_invariance");
    r.push(Check::close("invariance", lhs.value, rhs.value, KT_TOL));
    Ok(r)
}

/// `kt(conj(f)^{-1}) = -kt(f)` for scalar families.
pub fn kt_involution_check(fam: &MatrixFamily, quad: &QuadratureSpec) -> Result<Report> {
    if fam.n() != 1 {
        return Err(Error::Unsupported("the involution check is for 1x1 families".into()));
    }
    let lhs = kt_cochain(&fam.inverse_adjoint(), quad)?;
    let rhs = kt_cochain(fam, quad)?;
    let mut r = Report::new("kt_involution");
    r.push(Check::close("sign_reversal", lhs.value, -rhs.value, KT_TOL));
    Ok(r)
}

/// Doubling the order moves the value by less than its estimated error.
pub fn kt_self_consistency_check(fam: &MatrixFamily, quad: &QuadratureSpec) -> Result<Report> {
    let base = kt_cochain(fam, quad)?;
    let fine = kt_cochain(fam, &quad.with_order(2 * quad.order))?;
    let mut r = Report::new("kt_order_doubling");
    r.push(Check::close("doubling", fine.value, base.value, base.estimated_error));
    Ok(r)
}

/// A random unitary from the QR factorisation of a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let q = a.qr().q();
    // Gram-Schmidt pass to push the defect to rounding level
    let mut out = q.clone();
    for j in 0..n {
        let mut col = out.column(j).into_owned();
        for i in 0..j {
            let prev = out.column(i).into_owned();
            let proj = prev.dotc(&col);
            col -= prev * proj;
        }
        let norm = col.norm();
        out.set_column(j, &(col / C64::from(norm)));
    }
    out
}

/// A diagonal unitary with the given phases (in turns).
pub fn phase_unitary(turns: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        turns.len(),
        turns.iter().map(|t| C64::from_polar(1.0, std::f64::consts::TAU * t)),
    ))
}

/// The built-in catalog families over `Delta^{2k}` used by the suites.
pub fn catalog_fixtures(k: usize) -> Vec<(String, MatrixFamily)> {
    let verts = 2 * k + 1;
    let ramp = |i: usize, a: f64, b: f64| -> Vec<[f64; 2]> {
        (0..verts).map(|v| if v == 0 { [0.0, 0.0] } else { [a * (v + i) as f64 / verts as f64, b * v as f64] }).collect()
    };
    let mut out = Vec::new();
    let constant = CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(1.5, 0.2), C64::new(0.3, -0.1), C64::new(0.0, 0.4), C64::new(0.8, 0.0)],
    );
    out.push(("constant".to_string(), Catalog::Constant { matrix: constant }));
    out.push((
        "diagonal_exponential".to_string(),
        Catalog::DiagonalExponential {
            rates: vec![ramp(0, 0.5, 0.3), ramp(1, -0.4, 0.7)],
        },
    ));
    out.push((
        "planar_rotation_ramp".to_string(),
        Catalog::PlanarRotationRamp {
            angles: (0..verts).map(|v| 0.9 * v as f64 - 0.3 * (v * v) as f64 / verts as f64).collect(),
            log_scales: (0..verts).map(|v| [0.3 * v as f64, -0.25 * v as f64 + 0.1]).collect(),
            phases: (0..verts).map(|v| 0.7 * v as f64 - 0.2).collect(),
        },
    ));
    for seed in 1..=3 {
        out.push((format!("random_smooth_{seed}"), Catalog::RandomSmooth { seed, n: 2 }));
    }
    out.into_iter()
        .map(|(name, c)| (name, MatrixFamily::catalog(k, c).expect("catalog fixtures are valid")))
        .collect()
}

/// Scalar catalog families for the involution check.
pub fn scalar_fixtures(k: usize) -> Vec<(String, MatrixFamily)> {
    let verts = 2 * k + 1;
    let mut out = vec![(
        "unit_modulus".to_string(),
        Catalog::DiagonalExponential {
            rates: vec![(0..verts).map(|v| [0.0, 0.8 * v as f64]).collect()],
        },
    )];
    out.push((
        "real_exponential".to_string(),
        Catalog::DiagonalExponential {
            rates: vec![(0..verts).map(|v| [0.5 * v as f64 - 0.2, 0.3]).collect()],
        },
    ));
    out.push(("random_scalar".to_string(), Catalog::RandomSmooth { seed: 9, n: 1 }));
    out.into_iter()
        .map(|(name, c)| (name, MatrixFamily::catalog(k, c).expect("scalar fixtures are valid")))
        .collect()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::new(8, 1).unwrap()
    }

    #[test]
    fn additivity_on_catalog_pairs() {
        let fx = catalog_fixtures(1);
        let r = kt_direct_sum_check(&fx[2].1, &fx[3].1, &quad()).unwrap();
        assert!(r.pass, "{r:?}");
        let r = kt_direct_sum_check(&fx[4].1, &fx[0].1, &quad()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fam = &catalog_fixtures(1)[3].1;
        let u = random_unitary(&mut rng, 2);
        let v = random_unitary(&mut rng, 2);
        assert!(unitary_defect(&u) < 1e-14);
        assert!(kt_unitary_invariance_check(fam, &u, &v, &quad()).unwrap().pass);
        let p = phase_unitary(&[0.1, 0.35]);
        assert!(kt_unitary_invariance_check(fam, &p, &CMatrix::identity(2, 2), &quad()).unwrap().pass);
        let bad = CMatrix::identity(2, 2) * C64::from(2.0);
        assert!(matches!(kt_unitary_invariance_check(fam, &bad, &u, &quad()), Err(Error::Domain(_))));
    }

    #[test]
    fn involution_on_scalars() {
        for k in [0, 1] {
            for (name, f) in scalar_fixtures(k) {
                assert!(kt_involution_check(&f, &quad()).unwrap().pass, "{name}");
            }
        }
        let two = &catalog_fixtures(1)[1].1;
        assert!(matches!(kt_involution_check(two, &quad()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn empty_summand_is_neutral() {
        let fam = &catalog_fixtures(1)[4].1;
        let empty = MatrixFamily::constant(1, CMatrix::zeros(0, 0)).unwrap();
        let r = kt_direct_sum_check(fam, &empty, &quad()).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].diff, 0.0);
    }
}
