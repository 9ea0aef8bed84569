use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polylog::Accumulator;

use super::family::{CMatrix, MatrixFamily, C64};

/// `h_t` with condition number above this is rejected.
pub const CONDITION_CAP: f64 = 1e12;

/// Eigenvalue pairs closer than this (relative to `||h||`) use the
/// diagonal limit of the divided difference.
const COLLISION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre points per axis and panel.
    pub order: usize,
    /// Panels per axis of the unit cube.
    pub subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 10,
            subdivisions: 1,
        }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize, subdivisions: usize) -> Result<Self> {
        let q = QuadratureSpec { order, subdivisions };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::model("kamber_tondeur", "quadrature order must be at least 2"));
        }
        if self.subdivisions < 1 {
            return Err(Error::model("kamber_tondeur", "at least one subdivision is required"));
        }
        Ok(())
    }

    pub fn with_order(self, order: usize) -> Self {
        QuadratureSpec { order, ..self }
    }

    /// Composite Gauss-Legendre rule on `[0, 1]`.
    fn line(&self) -> Vec<(f64, f64)> {
        let gl = GaussLegendre::new(NonZeroUsize::new(self.order).expect("order >= 2"));
        let h = 1.0 / self.subdivisions as f64;
        let mut out = Vec::with_capacity(self.order * self.subdivisions);
        for p in 0..self.subdivisions {
            let a = p as f64 * h;
            for &(x, w) in gl.as_node_weight_pairs() {
                out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
        out
    }

    /// Nodes `(x, w)` on `{x_i >= 0, sum x_i <= 1}` obtained from the tensor
    /// rule on the cube through `x_i = y_i prod_{j<i} (1 - y_j)`.
    pub fn simplex_rule(&self, d: usize) -> Vec<(Vec<f64>, f64)> {
        let line = self.line();
        let mut out = vec![(Vec::with_capacity(d), 1.0, 1.0)];
        for _ in 0..d {
            let mut next = Vec::with_capacity(out.len() * line.len());
            for (x, w, rest) in &out {
                for &(y, wy) in &line {
                    let mut x2 = x.clone();
                    x2.push(rest * y);
                    next.push((x2, w * wy * rest, rest * (1.0 - y)));
                }
            }
            out = next;
        }
        out.into_iter().map(|(x, w, _)| (x, w)).collect()
    }

    /// The `u` axis.
    pub fn interval_rule(&self) -> Vec<(f64, f64)> {
        self.line()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTValue {
    pub value: f64,
    /// Spread of the value against coarser rules, floored at rounding level.
    pub estimated_error: f64,
    /// `|Im|` of the scaled integral, which is real in exact arithmetic.
    pub imag_diagnostic: f64,
}

/// All permutations of `0..m` with their signs.
fn signed_permutations(m: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..m).collect();
    fn rec(p: &mut Vec<usize>, i: usize, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if i + 1 >= p.len() {
            out.push((p.clone(), sign));
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(p, i + 1, if i == j { sign } else { -sign }, out);
            p.swap(i, j);
        }
    }
    if m == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    rec(&mut p, 0, 1.0, &mut out);
    out
}

/// `Gamma_ab = (l_a^u - l_b^u) / (l_a - l_b)`, with limit `u l^{u-1}`.
fn divided_difference(la: f64, lb: f64, u: f64, scale: f64) -> f64 {
    if (la - lb).abs() < COLLISION * scale {
        let m = 0.5 * (la + lb);
        u * m.powf(u - 1.0)
    } else {
        lb.powf(u) * (u * (la.ln() - lb.ln())).exp_m1() / (la - lb)
    }
}

struct NodeData {
    lambda: DVector<f64>,
    /// `Q^* dh_j Q` in the chart coordinates `x_j = t_j`.
    dh: Vec<CMatrix>,
}

fn node_data(fam: &MatrixFamily, x: &[f64]) -> Result<NodeData> {
    let mut t = Vec::with_capacity(x.len() + 1);
    t.push(1.0 - x.iter().sum::<f64>());
    t.extend_from_slice(x);
    let (f, partials) = fam.eval_with_partials(&t);
    let fs = f.adjoint();
    let h = &f * &fs;
    let h = (&h + h.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(h);
    let lambda = eig.eigenvalues;
    let (lo, hi) = (lambda.min(), lambda.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= CONDITION_CAP) {
        return Err(Error::Conditioning {
            condition,
            cap: CONDITION_CAP,
        });
    }
    let qm = eig.eigenvectors;
    let qa = qm.adjoint();
    let dh = (1..t.len())
        .map(|j| {
            let df = &partials[j] - &partials[0];
            let d = &df * &fs + &f * df.adjoint();
            &qa * d * &qm
        })
        .collect();
    Ok(NodeData { lambda, dh })
}

/// `sum_sigma sgn(sigma) Tr(B_sigma(0) ... B_sigma(2k))` with `B_j` the
/// simplex legs of `h^{-u} d h^u` and the last slot the `du` leg `log h`,
/// all in the eigenbasis of `h`.
fn integrand(node: &NodeData, u: f64, perms: &[(Vec<usize>, f64)]) -> C64 {
    let n = node.lambda.len();
    let scale = node.lambda.max();
    let mut legs: Vec<CMatrix> = node
        .dh
        .iter()
        .map(|hj| {
            CMatrix::from_fn(n, n, |a, b| {
                let la = node.lambda[a];
                let g = divided_difference(la, node.lambda[b], u, scale);
                hj[(a, b)] * (la.powf(-u) * g)
            })
        })
        .collect();
    legs.push(CMatrix::from_diagonal(&node.lambda.map(|l| C64::from(l.ln()))));
    let mut acc = C64::new(0.0, 0.0);
    for (p, s) in perms {
        let mut prod = legs[p[0]].clone();
        for &i in &p[1..] {
            prod = &prod * &legs[i];
        }
        acc += prod.trace() * *s;
    }
    acc
}

/// `int_{Delta^{2k} x I} Tr((h^{-u} d h^u)^{2k+1})`, with `du` the last
/// coordinate.
fn raw_integral(fam: &MatrixFamily, quad: &QuadratureSpec) -> Result<C64> {
    let d = fam.dim();
    let perms = signed_permutations(d + 1);
    let us = quad.interval_rule();
    let mut re = Accumulator::default();
    let mut im = Accumulator::default();
    for (x, wx) in quad.simplex_rule(d) {
        let node = node_data(fam, &x)?;
        for &(u, wu) in &us {
            let v = integrand(&node, u, &perms) * (wx * wu);
            re.add(v.re);
            im.add(v.im);
        }
    }
    Ok(C64::new(re.value(), im.value()))
}

/// `1 / (2 i^k (2k+1)!)`.
fn prefactor(k: usize) -> C64 {
    let fact: f64 = (1..=(2 * k + 1)).map(|i| i as f64).product();
    let ik = C64::i().powu(k as u32);
    C64::from(1.0) / (ik * (2.0 * fact))
}

fn scaled(fam: &MatrixFamily, quad: &QuadratureSpec) -> Result<C64> {
    Ok(raw_integral(fam, quad)? * prefactor(fam.k()))
}

/// The Kamber-Tondeur cochain
/// `c_2k(f) = 1/(2 i^k (2k+1)!) int_{Delta^{2k} x I} Tr((h^{-u} d h^u)^{2k+1})`,
/// `h = f f^*`.
pub fn kt_cochain(fam: &MatrixFamily, quad: &QuadratureSpec) -> Result<KTValue> {
    quad.validate()?;
    if fam.n() == 0 {
        return Ok(KTValue {
            value: 0.0,
            estimated_error: 0.0,
            imag_diagnostic: 0.0,
        });
    }
    let main = scaled(fam, quad)?;
    let mut spread: f64 = 0.0;
    for coarse in [quad.order.div_ceil(2), (2 * quad.order).div_ceil(3)] {
        let coarse = coarse.max(2);
        if coarse < quad.order {
            let c = scaled(fam, &quad.with_order(coarse))?;
            spread = spread.max((c.re - main.re).abs());
        }
    }
    let floor = 1e-14 * main.re.abs().max(1.0);
    Ok(KTValue {
        value: main.re,
        estimated_error: spread.max(floor),
        imag_diagnostic: main.im.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kamber_tondeur::family::Catalog;

    #[test]
    fn simplex_rule_volumes_and_moments() {
        let q = QuadratureSpec::new(6, 2).unwrap();
        for (d, vol) in [(0usize, 1.0), (1, 1.0), (2, 0.5), (3, 1.0 / 6.0), (4, 1.0 / 24.0)] {
            let r = q.simplex_rule(d);
            let s: f64 = r.iter().map(|(_, w)| w).sum();
            assert!((s - vol).abs() < 1e-14, "d={d}");
        }
        // int_{Delta^2} x_1 x_2 = 1/24
        let m: f64 = q.simplex_rule(2).iter().map(|(x, w)| w * x[0] * x[1]).sum();
        assert!((m - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn permutation_signs() {
        let p = signed_permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| s).sum::<f64>(), 0.0);
        for (perm, s) in &p {
            let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
            assert_eq!(*s, if inversions % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn divided_difference_limit_is_continuous() {
        let a = divided_difference(2.0, 2.0 + 1e-7, 0.3, 2.0);
        let b = divided_difference(2.0, 2.0 + 1e-9, 0.3, 2.0);
        assert!((a - b).abs() < 1e-7);
        assert!((divided_difference(4.0, 1.0, 0.5, 4.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degree_zero_is_log_abs_det() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(2.0, 1.0), C64::new(0.5, 0.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)]);
        let det = m.determinant().norm();
        let v = kt_cochain(&MatrixFamily::constant(0, m).unwrap(), &QuadratureSpec::default()).unwrap();
        assert!((v.value - det.ln()).abs() < 1e-12);
        let s = kt_cochain(&MatrixFamily::constant(0, CMatrix::from_element(1, 1, C64::new(-3.0, 0.0))).unwrap(), &QuadratureSpec::default()).unwrap();
        assert!((s.value - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constant_family_vanishes_for_positive_k() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(2.0, 1.0), C64::new(0.5, 0.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)]);
        let v = kt_cochain(&MatrixFamily::constant(1, m).unwrap(), &QuadratureSpec::new(4, 1).unwrap()).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn abelian_scalar_family_vanishes() {
        // f = exp(t_1 + i t_2)
        let fam = MatrixFamily::catalog(
            1,
            Catalog::DiagonalExponential {
                rates: vec![vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]],
            },
        )
        .unwrap();
        let v = kt_cochain(&fam, &QuadratureSpec::default()).unwrap();
        assert!(v.value.abs() < 1e-14);
    }

    fn ramp(phases: Vec<f64>) -> MatrixFamily {
        MatrixFamily::catalog(
            1,
            Catalog::PlanarRotationRamp {
                angles: vec![0.0, 1.2, -0.5],
                log_scales: vec![[0.0, 0.0], [0.6, -0.3], [-0.2, 0.7]],
                phases,
            },
        )
        .unwrap()
    }

    #[test]
    fn real_families_vanish_in_degree_two() {
        let v = kt_cochain(&ramp(vec![]), &QuadratureSpec::default()).unwrap();
        assert!(v.value.abs() < 1e-14);
    }

    #[test]
    fn nonabelian_family_converges() {
        let fam = ramp(vec![0.0, 0.8, -1.1]);
        let q = QuadratureSpec::new(10, 1).unwrap();
        let a = kt_cochain(&fam, &q).unwrap();
        let b = kt_cochain(&fam, &q.with_order(20)).unwrap();
        assert!(a.value.abs() > 1e-4, "value {}", a.value);
        assert!((a.value - b.value).abs() < 1e-8);
        assert!((a.value - b.value).abs() <= a.estimated_error);
        assert!(a.imag_diagnostic < 1e-12);
    }

    #[test]
    fn reordering_vertices_multiplies_by_the_sign() {
        let fam = ramp(vec![0.0, 0.8, -1.1]);
        let q = QuadratureSpec::new(14, 1).unwrap();
        let v = kt_cochain(&fam, &q).unwrap().value;
        for (perm, sign) in [([1, 0, 2], -1.0), ([1, 2, 0], 1.0), ([0, 2, 1], -1.0)] {
            let w = kt_cochain(&fam.reordered(&perm).unwrap(), &q).unwrap().value;
            assert!((w - sign * v).abs() < 1e-10, "{perm:?}: {w} vs {v}");
        }
    }

    #[test]
    fn singular_family_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let err = kt_cochain(&MatrixFamily::constant(0, m).unwrap(), &QuadratureSpec::default());
        assert!(matches!(err, Err(Error::Conditioning { .. })));
    }
}
