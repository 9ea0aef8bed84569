use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Complex matrices travel as rows of `[re, im]` pairs.
pub mod cmatrix_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{CMatrix, C64};

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
        let n = rows.len();
        let c = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != c) {
            return Err("ragged complex matrix".into());
        }
        Ok(CMatrix::from_fn(n, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        use super::super::CMatrix;

        pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
            ms.iter().map(super::to_rows).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMatrix>, D::Error> {
            let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            all.iter()
                .map(|r| super::from_rows(r).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMatrix {
    /// Positions of the two vertices within the simplex.
    pub pair: [usize; 2],
    #[serde(with = "cmatrix_json")]
    pub matrix: CMatrix,
}

/// Named parametric families over `Delta^{2k}`, written in barycentric
/// coordinates `t_0, ..., t_{2k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Catalog {
    Constant {
        #[serde(with = "cmatrix_json")]
        matrix: CMatrix,
    },
    /// `f_ii = exp(sum_v t_v r_iv)` with complex rates `r_iv = rates[i][v]`.
    DiagonalExponential { rates: Vec<Vec<[f64; 2]>> },
    /// `R(theta, psi) diag(exp(sum_v t_v a_v), exp(sum_v t_v b_v))` with
    /// `log_scales[v] = [a_v, b_v]`, `theta = sum_v t_v angles_v`,
    /// `psi = sum_v t_v phases_v` and
    /// `R = [[cos theta, -e^{i psi} sin theta], [e^{-i psi} sin theta, cos theta]]`.
    /// Without phases the family is real.
    PlanarRotationRamp {
        angles: Vec<f64>,
        log_scales: Vec<[f64; 2]>,
        #[serde(default)]
        phases: Vec<f64>,
    },
    /// A seeded `vertex_edge` family near the identity.
    RandomSmooth { seed: u64, n: usize },
    /// `sum_v t_v M_v + sum_{a<b} t_a t_b E_ab`. Restricting to a face keeps
    /// only the data of that face.
    VertexEdge {
        #[serde(with = "cmatrix_json::vec")]
        vertices: Vec<CMatrix>,
        edges: Vec<EdgeMatrix>,
    },
}

impl Catalog {
    pub fn id(&self) -> &'static str {
        match self {
            Catalog::Constant { .. } => "constant",
            Catalog::DiagonalExponential { .. } => "diagonal_exponential",
            Catalog::PlanarRotationRamp { .. } => "planar_rotation_ramp",
            Catalog::RandomSmooth { .. } => "random_smooth",
            Catalog::VertexEdge { .. } => "vertex_edge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivative {
    Analytic,
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Kernel {
    Constant(CMatrix),
    DiagExp(Vec<Vec<C64>>),
    Rotation { angles: Vec<f64>, phases: Vec<f64>, log_scales: Vec<[f64; 2]> },
    VertexEdge { vertices: Vec<CMatrix>, edges: Vec<(usize, usize, CMatrix)> },
    DirectSum(Vec<MatrixFamily>),
    Transformed { inner: Box<MatrixFamily>, left: CMatrix, right: CMatrix },
    InverseAdjoint(Box<MatrixFamily>),
    Reordered { inner: Box<MatrixFamily>, perm: Vec<usize> },
}

/// A smooth family `f_t` of invertible complex `n x n` matrices over
/// `Delta^{2k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFamily {
    k: usize,
    n: usize,
    kernel: Kernel,
    catalog: Option<Catalog>,
    derivative: Derivative,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::model("kamber_tondeur", msg)
}

fn random_entry(rng: &mut ChaCha8Rng, eps: f64) -> C64 {
    C64::new(rng.gen_range(-eps..=eps), rng.gen_range(-eps..=eps))
}

/// Vertex and edge data of the `random_smooth` family.
fn random_vertex_edge(seed: u64, n: usize, vertices: usize) -> (Vec<CMatrix>, Vec<(usize, usize, CMatrix)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = 0.25 / n.max(1) as f64;
    let vs = (0..vertices)
        .map(|_| CMatrix::identity(n, n) + CMatrix::from_fn(n, n, |_, _| random_entry(&mut rng, eps)))
        .collect();
    let mut es = Vec::new();
    for a in 0..vertices {
        for b in a + 1..vertices {
            es.push((a, b, CMatrix::from_fn(n, n, |_, _| random_entry(&mut rng, eps))));
        }
    }
    (vs, es)
}

impl MatrixFamily {
    pub fn catalog(k: usize, c: Catalog) -> Result<Self> {
        let verts = 2 * k + 1;
        let (n, kernel) = match &c {
            Catalog::Constant { matrix } => {
                if matrix.nrows() != matrix.ncols() {
                    return Err(bad("constant family matrix is not square"));
                }
                (matrix.nrows(), Kernel::Constant(matrix.clone()))
            }
            Catalog::DiagonalExponential { rates } => {
                if rates.iter().any(|r| r.len() != verts) {
                    return Err(bad(format!("each diagonal entry needs {verts} rates")));
                }
                let r = rates
                    .iter()
                    .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
                    .collect();
                (rates.len(), Kernel::DiagExp(r))
            }
            Catalog::PlanarRotationRamp {
                angles,
                log_scales,
                phases,
            } => {
                if angles.len() != verts || log_scales.len() != verts {
                    return Err(bad(format!("planar rotation ramp needs {verts} angles and log scales")));
                }
                if !phases.is_empty() && phases.len() != verts {
                    return Err(bad(format!("planar rotation ramp needs 0 or {verts} phases")));
                }
                let phases = if phases.is_empty() { vec![0.0; verts] } else { phases.clone() };
                (
                    2,
                    Kernel::Rotation {
                        angles: angles.clone(),
                        phases,
                        log_scales: log_scales.clone(),
                    },
                )
            }
            Catalog::RandomSmooth { seed, n } => {
                let (vertices, edges) = random_vertex_edge(*seed, *n, verts);
                (*n, Kernel::VertexEdge { vertices, edges })
            }
            Catalog::VertexEdge { vertices, edges } => {
                if vertices.len() != verts {
                    return Err(bad(format!("vertex_edge family needs {verts} vertex matrices")));
                }
                let n = vertices[0].nrows();
                let square = |m: &CMatrix| m.nrows() == n && m.ncols() == n;
                if !vertices.iter().all(square) || !edges.iter().all(|e| square(&e.matrix)) {
                    return Err(bad("vertex_edge matrices must all be n x n"));
                }
                let mut es = Vec::with_capacity(edges.len());
                for e in edges {
                    let [a, b] = e.pair;
                    if a == b || a >= verts || b >= verts {
                        return Err(bad(format!("edge {:?} is not an edge of the simplex", e.pair)));
                    }
                    es.push((a, b, e.matrix.clone()));
                }
                (
                    n,
                    Kernel::VertexEdge {
                        vertices: vertices.clone(),
                        edges: es,
                    },
                )
            }
        };
        Ok(MatrixFamily {
            k,
            n,
            kernel,
            catalog: Some(c),
            derivative: Derivative::Analytic,
        })
    }

    pub fn constant(k: usize, matrix: CMatrix) -> Result<Self> {
        Self::catalog(k, Catalog::Constant { matrix })
    }

    pub fn direct_sum(parts: &[MatrixFamily]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(bad("direct sum of no families"));
        };
        if parts.iter().any(|p| p.k != first.k) {
            return Err(Error::Precondition("direct summands live over different simplices".into()));
        }
        Ok(MatrixFamily {
            k: first.k,
            n: parts.iter().map(|p| p.n).sum(),
            kernel: Kernel::DirectSum(parts.to_vec()),
            catalog: None,
            derivative: Derivative::Analytic,
        })
    }

    /// `t -> U f_t V`.
    pub fn transformed(&self, left: CMatrix, right: CMatrix) -> Result<Self> {
        let n = self.n;
        if left.shape() != (n, n) || right.shape() != (n, n) {
            return Err(bad("transforming matrices have the wrong size"));
        }
        Ok(MatrixFamily {
            k: self.k,
            n,
            kernel: Kernel::Transformed {
                inner: Box::new(self.clone()),
                left,
                right,
            },
            catalog: None,
            derivative: Derivative::Analytic,
        })
    }

    /// `t -> (f_t^*)^{-1}`, which sends `h_t` to `h_t^{-1}`.
    pub fn inverse_adjoint(&self) -> Self {
        MatrixFamily {
            k: self.k,
            n: self.n,
            kernel: Kernel::InverseAdjoint(Box::new(self.clone())),
            catalog: None,
            derivative: Derivative::Analytic,
        }
    }

    /// The same family with its vertices listed in another order:
    /// `t -> f(s)` with `s[perm[i]] = t[i]`.
    pub fn reordered(&self, perm: &[usize]) -> Result<Self> {
        let verts = self.dim() + 1;
        let mut seen = vec![false; verts];
        if perm.len() != verts || perm.iter().any(|&p| p >= verts || std::mem::replace(&mut seen[p], true)) {
            return Err(bad(format!("{perm:?} is not a permutation of {verts} vertices")));
        }
        Ok(MatrixFamily {
            k: self.k,
            n: self.n,
            kernel: Kernel::Reordered {
                inner: Box::new(self.clone()),
                perm: perm.to_vec(),
            },
            catalog: None,
            derivative: Derivative::Analytic,
        })
    }

    pub fn with_finite_difference(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(bad("finite-difference step must be positive"));
        }
        self.derivative = Derivative::FiniteDifference { step };
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `2k` of the parameter simplex.
    pub fn dim(&self) -> usize {
        2 * self.k
    }

    pub fn catalog_entry(&self) -> Option<&Catalog> {
        self.catalog.as_ref()
    }

    pub fn derivative(&self) -> Derivative {
        self.derivative
    }

    /// `f_t` at barycentric coordinates `t`.
    pub fn eval(&self, t: &[f64]) -> CMatrix {
        let n = self.n;
        match &self.kernel {
            Kernel::Constant(m) => m.clone(),
            Kernel::DiagExp(r) => CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                r.iter().map(|row| row.iter().zip(t).map(|(c, &tv)| c * tv).sum::<C64>().exp()),
            )),
            Kernel::Rotation {
                angles,
                phases,
                log_scales,
            } => {
                let (theta, psi, d) = rotation_data(angles, phases, log_scales, t);
                rotation(theta, psi) * d
            }
            Kernel::VertexEdge { vertices, edges } => {
                let mut f = CMatrix::zeros(n, n);
                for (m, &tv) in vertices.iter().zip(t) {
                    f += m * C64::from(tv);
                }
                for (a, b, e) in edges {
                    f += e * C64::from(t[*a] * t[*b]);
                }
                f
            }
            Kernel::DirectSum(parts) => {
                let mut f = CMatrix::zeros(n, n);
                let mut at = 0;
                for p in parts {
                    f.view_mut((at, at), (p.n, p.n)).copy_from(&p.eval(t));
                    at += p.n;
                }
                f
            }
            Kernel::Transformed { inner, left, right } => left * inner.eval(t) * right,
            Kernel::Reordered { inner, perm } => inner.eval(&unpermute(perm, t)),
            Kernel::InverseAdjoint(inner) => inner
                .eval(t)
                .adjoint()
                .try_inverse()
                .unwrap_or_else(|| CMatrix::from_element(n, n, C64::new(f64::NAN, 0.0))),
        }
    }

    /// `f_t` together with `d f / d t_v` for every barycentric coordinate,
    /// treating the `t_v` as independent.
    pub fn eval_with_partials(&self, t: &[f64]) -> (CMatrix, Vec<CMatrix>) {
        let f = self.eval(t);
        let partials = match self.derivative {
            Derivative::Analytic => self.analytic_partials(t, &f),
            Derivative::FiniteDifference { step } => (0..t.len())
                .map(|v| {
                    let mut tp = t.to_vec();
                    let mut tm = t.to_vec();
                    tp[v] += step;
                    tm[v] -= step;
                    (self.eval(&tp) - self.eval(&tm)) / C64::from(2.0 * step)
                })
                .collect(),
        };
        (f, partials)
    }

    fn analytic_partials(&self, t: &[f64], f: &CMatrix) -> Vec<CMatrix> {
        let n = self.n;
        let verts = t.len();
        match &self.kernel {
            Kernel::Constant(_) => vec![CMatrix::zeros(n, n); verts],
            Kernel::DiagExp(r) => (0..verts)
                .map(|v| {
                    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                        n,
                        (0..n).map(|i| r[i][v] * f[(i, i)]),
                    ))
                })
                .collect(),
            Kernel::Rotation {
                angles,
                phases,
                log_scales,
            } => {
                let (theta, psi, d) = rotation_data(angles, phases, log_scales, t);
                let r = rotation(theta, psi);
                let (dtheta, dpsi) = rotation_derivatives(theta, psi);
                (0..verts)
                    .map(|v| {
                        let ds = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                            C64::from(log_scales[v][0]),
                            C64::from(log_scales[v][1]),
                        ]));
                        (&dtheta * C64::from(angles[v]) + &dpsi * C64::from(phases[v])) * &d + &r * &d * ds
                    })
                    .collect()
            }
            Kernel::VertexEdge { vertices, edges } => {
                let mut out = vertices.clone();
                for (a, b, e) in edges {
                    out[*a] += e * C64::from(t[*b]);
                    out[*b] += e * C64::from(t[*a]);
                }
                out
            }
            Kernel::DirectSum(parts) => {
                let mut out = vec![CMatrix::zeros(n, n); verts];
                let mut at = 0;
                for p in parts {
                    let (_, dp) = p.eval_with_partials(t);
                    for (o, d) in out.iter_mut().zip(&dp) {
                        o.view_mut((at, at), (p.n, p.n)).copy_from(d);
                    }
                    at += p.n;
                }
                out
            }
            Kernel::Transformed { inner, left, right } => {
                let (_, dp) = inner.eval_with_partials(t);
                dp.iter().map(|d| left * d * right).collect()
            }
            Kernel::InverseAdjoint(inner) => {
                let (_, dp) = inner.eval_with_partials(t);
                dp.iter().map(|d| -(f * d.adjoint() * f)).collect()
            }
            Kernel::Reordered { inner, perm } => {
                let (_, dp) = inner.eval_with_partials(&unpermute(perm, t));
                perm.iter().map(|&p| dp[p].clone()).collect()
            }
        }
    }
}

fn unpermute(perm: &[usize], t: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; t.len()];
    for (i, &p) in perm.iter().enumerate() {
        s[p] = t[i];
    }
    s
}

fn rotation_data(angles: &[f64], phases: &[f64], log_scales: &[[f64; 2]], t: &[f64]) -> (f64, f64, CMatrix) {
    let lin = |c: &dyn Fn(usize) -> f64| -> f64 { t.iter().enumerate().map(|(v, tv)| c(v) * tv).sum() };
    let theta = lin(&|v| angles[v]);
    let psi = lin(&|v| phases[v]);
    let a = lin(&|v| log_scales[v][0]);
    let b = lin(&|v| log_scales[v][1]);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::from(a.exp()), C64::from(b.exp())]));
    (theta, psi, d)
}

fn rotation(theta: f64, psi: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, psi);
    CMatrix::from_row_slice(2, 2, &[C64::from(c), -e * s, e.conj() * s, C64::from(c)])
}

/// `dR/dtheta` and `dR/dpsi`.
fn rotation_derivatives(theta: f64, psi: f64) -> (CMatrix, CMatrix) {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, psi);
    let i = C64::i();
    let zero = C64::from(0.0);
    (
        CMatrix::from_row_slice(2, 2, &[C64::from(-s), -e * c, e.conj() * c, C64::from(-s)]),
        CMatrix::from_row_slice(2, 2, &[zero, -i * e * s, -i * e.conj() * s, zero]),
    )
}
