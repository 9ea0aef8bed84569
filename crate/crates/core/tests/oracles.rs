//! Values checked against independent computations: closed-form constants
//! for the polylogarithms and a finite-difference evaluation of the
//! Kamber-Tondeur integral.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{Complex, DMatrix, SymmetricEigen};

use htorsion::kamber_tondeur::{kt_cochain, Catalog, MatrixFamily, QuadratureSpec};
use htorsion::polylog::{polylog_l, riemann_zeta_odd, RootOfUnity};

type C64 = Complex<f64>;
type CMatrix = DMatrix<C64>;

const ZETA3: f64 = 1.202_056_903_159_594_2;
const ZETA5: f64 = 1.036_927_755_143_37;
const CATALAN: f64 = 0.915_965_594_177_219;
// Cl_2(pi/3) and Cl_2(2 pi/3)
const CLAUSEN_60: f64 = 1.014_941_606_409_653_6;
const CLAUSEN_120: f64 = 0.676_627_737_606_435_8;

fn root(m: u64, j: i64) -> RootOfUnity {
    RootOfUnity::new(m, j).unwrap()
}

#[test]
fn odd_zeta_values() {
    assert!((riemann_zeta_odd(1) - ZETA3).abs() < 1e-13);
    assert!((riemann_zeta_odd(2) - ZETA5).abs() < 1e-13);
}

#[test]
fn polylog_at_known_points() {
    let cases = [
        // L_2 is Im Li_2
        (1, root(4, 1), CATALAN),
        (1, root(6, 1), CLAUSEN_60),
        (1, root(3, 1), CLAUSEN_120),
        (1, root(2, 1), 0.0),
        // L_3 = -Re Li_3, Li_3(-1) = -3/4 zeta(3)
        (2, root(1, 0), -ZETA3),
        (2, root(2, 1), 0.75 * ZETA3),
        (2, root(4, 1), 3.0 / 32.0 * ZETA3),
        // conjugate root, same real part
        (2, root(4, 3), 3.0 / 32.0 * ZETA3),
        (4, root(1, 0), ZETA5),
        (4, root(2, 1), -15.0 / 16.0 * ZETA5),
    ];
    for (k, z, want) in cases {
        let got = polylog_l(k, z).unwrap().value;
        assert!((got - want).abs() < 1e-12, "k={k} z={z:?}: {got} vs {want}");
    }
}

/// `h^u` for a positive Hermitian `h`.
fn hermitian_power(h: &CMatrix, u: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from(l.powf(u))));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

fn h_at(fam: &MatrixFamily, x: [f64; 2]) -> CMatrix {
    let f = fam.eval(&[1.0 - x[0] - x[1], x[0], x[1]]);
    let h = &f * f.adjoint();
    (&h + h.adjoint()) * C64::from(0.5)
}

/// `c_2(f)` from central differences of `h^u` in `(x_1, x_2, u)` and a
/// Gauss-Legendre rule collapsed onto the triangle along the other axis.
fn kt_by_differences(fam: &MatrixFamily, order: usize, step: f64) -> f64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(order).unwrap());
    let line: Vec<(f64, f64)> = gl
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    let perms: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([1, 0, 2], -1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
    ];
    let mut total = C64::from(0.0);
    for &(a, wa) in &line {
        for &(b, wb) in &line {
            // x_2 = a, x_1 = b (1 - a)
            let x = [b * (1.0 - a), a];
            let w = wa * wb * (1.0 - a);
            let power = |x: [f64; 2], u: f64| hermitian_power(&h_at(fam, x), u);
            for &(u, wu) in &line {
                let inv = hermitian_power(&h_at(fam, x), -u);
                let mut legs = Vec::with_capacity(3);
                for j in 0..2 {
                    let (mut xp, mut xm) = (x, x);
                    xp[j] += step;
                    xm[j] -= step;
                    let d = (power(xp, u) - power(xm, u)) / C64::from(2.0 * step);
                    legs.push(&inv * d);
                }
                let du = (power(x, u + step) - power(x, u - step)) / C64::from(2.0 * step);
                legs.push(&inv * du);
                let mut s = C64::from(0.0);
                for (p, sign) in &perms {
                    s += (&legs[p[0]] * &legs[p[1]] * &legs[p[2]]).trace() * *sign;
                }
                total += s * (w * wu);
            }
        }
    }
    // 1 / (2 i 3!)
    (total / (C64::i() * 12.0)).re
}

#[test]
fn kamber_tondeur_matches_finite_differences() {
    let families = [
        Catalog::PlanarRotationRamp {
            angles: vec![0.0, 1.2, -0.5],
            log_scales: vec![[0.0, 0.0], [0.6, -0.3], [-0.2, 0.7]],
            phases: vec![0.0, 0.8, -1.1],
        },
        Catalog::RandomSmooth { seed: 11, n: 2 },
        Catalog::RandomSmooth { seed: 5, n: 3 },
    ];
    for c in families {
        let fam = MatrixFamily::catalog(1, c.clone()).unwrap();
        let want = kt_by_differences(&fam, 12, 1e-5);
        let got = kt_cochain(&fam, &QuadratureSpec::new(12, 1).unwrap()).unwrap();
        assert!(want.abs() > 1e-5, "{}: degenerate fixture {want}", c.id());
        assert!(
            (got.value - want).abs() < 1e-7 + 1e-5 * want.abs(),
            "{}: {} vs {want}",
            c.id(),
            got.value
        );
    }
}
