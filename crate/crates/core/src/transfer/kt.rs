use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kamber_tondeur::{cmatrix_json, kt_cochain, Catalog, CMatrix, EdgeMatrix, MatrixFamily, QuadratureSpec, C64};
use crate::report::{Check, Report};
use crate::simplicial::{sort_sign, Simplex, SimplicialBase};

use super::covering::CoveringMap;

pub const EXPANSION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexMatrix {
    pub vertex: usize,
    #[serde(with = "cmatrix_json")]
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexCatalog {
    pub simplex: Simplex,
    pub family: Catalog,
}

/// Matrix families on the top simplices of a total space, each written in
/// the sorted vertex order of its simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyAssignment {
    /// Global vertex matrices `M_v` and edge matrices `E_vw`; the family on
    /// `[v_0, v_1, v_2]` is `sum t_i M_{v_i} + sum_{i<j} t_i t_j E_{v_i v_j}`.
    VertexEdge {
        vertices: Vec<VertexMatrix>,
        /// Pairs are unordered vertex ids.
        edges: Vec<EdgeMatrix>,
    },
    PerSimplex { families: Vec<SimplexCatalog> },
}

fn model(msg: impl Into<String>) -> Error {
    Error::model("transfer_ops", msg)
}

impl FamilyAssignment {
    /// Random vertex and edge matrices near the identity.
    pub fn random_vertex_edge(seed: u64, total: &SimplicialBase, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = 0.25 / n.max(1) as f64;
        let entry = |rng: &mut ChaCha8Rng| C64::new(rng.gen_range(-eps..=eps), rng.gen_range(-eps..=eps));
        let vertices = (0..total.n_vertices())
            .map(|v| VertexMatrix {
                vertex: v,
                matrix: CMatrix::identity(n, n) + CMatrix::from_fn(n, n, |_, _| entry(&mut rng)),
            })
            .collect();
        let edges = total
            .simplices(1)
            .iter()
            .map(|e| EdgeMatrix {
                pair: [e[0], e[1]],
                matrix: CMatrix::from_fn(n, n, |_, _| entry(&mut rng)),
            })
            .collect();
        FamilyAssignment::VertexEdge { vertices, edges }
    }

    /// The family on a sorted simplex of dimension `2k`.
    pub fn family(&self, s: &[usize]) -> Result<MatrixFamily> {
        if s.len().is_multiple_of(2) {
            return Err(model(format!("{s:?} is not even dimensional")));
        }
        let k = (s.len() - 1) / 2;
        match self {
            FamilyAssignment::VertexEdge { vertices, edges } => {
                let vm: BTreeMap<usize, &CMatrix> = vertices.iter().map(|v| (v.vertex, &v.matrix)).collect();
                let em: BTreeMap<(usize, usize), &CMatrix> = edges
                    .iter()
                    .map(|e| ((e.pair[0].min(e.pair[1]), e.pair[0].max(e.pair[1])), &e.matrix))
                    .collect();
                let vs = s
                    .iter()
                    .map(|v| vm.get(v).map(|m| (*m).clone()).ok_or_else(|| model(format!("no matrix at vertex {v}"))))
                    .collect::<Result<Vec<_>>>()?;
                let mut es = Vec::new();
                for i in 0..s.len() {
                    for j in i + 1..s.len() {
                        if let Some(m) = em.get(&(s[i].min(s[j]), s[i].max(s[j]))) {
                            es.push(EdgeMatrix {
                                pair: [i, j],
                                matrix: (*m).clone(),
                            });
                        }
                    }
                }
                MatrixFamily::catalog(
                    k,
                    Catalog::VertexEdge {
                        vertices: vs,
                        edges: es,
                    },
                )
            }
            FamilyAssignment::PerSimplex { families } => {
                let c = families
                    .iter()
                    .find(|f| f.simplex == s)
                    .ok_or_else(|| model(format!("no family on {s:?}")))?;
                MatrixFamily::catalog(k, c.family.clone())
            }
        }
    }

    /// The family over an ordered vertex list.
    pub fn family_on_ordered(&self, l: &[usize]) -> Result<MatrixFamily> {
        let mut s = l.to_vec();
        s.sort_unstable();
        let perm: Vec<usize> = l.iter().map(|v| s.binary_search(v).expect("same vertices")).collect();
        self.family(&s)?.reordered(&perm)
    }
}

/// Families on adjacent top simplices agree on the shared edge.
pub fn check_face_compatibility(total: &SimplicialBase, assignment: &FamilyAssignment) -> Result<()> {
    let top = total.dim();
    let mut on_edge: BTreeMap<(usize, usize), Vec<(Simplex, MatrixFamily)>> = BTreeMap::new();
    for s in total.simplices(top) {
        let fam = assignment.family(s)?;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                on_edge.entry((s[i], s[j])).or_default().push((s.clone(), fam.clone()));
            }
        }
    }
    let samples = [0.0, 0.3, 0.5, 0.85, 1.0];
    for ((a, b), fams) in &on_edge {
        let eval = |s: &Simplex, f: &MatrixFamily, w: f64| {
            let mut t = vec![0.0; s.len()];
            t[s.binary_search(a).expect("edge vertex")] = w;
            t[s.binary_search(b).expect("edge vertex")] = 1.0 - w;
            f.eval(&t)
        };
        let (s0, f0) = &fams[0];
        for (s1, f1) in &fams[1..] {
            if f0.n() != f1.n() {
                return Err(model(format!("{s0:?} and {s1:?} carry matrices of different sizes")));
            }
            for &w in &samples {
                let (x, y) = (eval(s0, f0, w), eval(s1, f1, w));
                let scale = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
                let gap = (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if gap > 1e-12 * scale {
                    return Err(model(format!(
                        "families on {s0:?} and {s1:?} disagree on the edge [{a}, {b}] by {gap:e}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `<kt(direct sum over lifts), s> = sum over lifts l of <kt, l>` on every
/// 2-simplex of the base.
pub fn transfer_expansion_kt(cov: &CoveringMap, assignment: &FamilyAssignment, quad: &QuadratureSpec) -> Result<Report> {
    if cov.base().dim() != 2 {
        return Err(Error::Precondition("the expansion check runs on 2-dimensional bases".into()));
    }
    check_face_compatibility(cov.total(), assignment)?;
    let mut r = Report::new("transfer_expansion_kt");
    for s in cov.base().simplices(2) {
        let lifts = cov.lifts(s)?;
        let over_s: Vec<MatrixFamily> = lifts
            .iter()
            .map(|l| assignment.family_on_ordered(l))
            .collect::<Result<_>>()?;
        let lhs = kt_cochain(&MatrixFamily::direct_sum(&over_s)?, quad)?.value;
        let mut rhs = 0.0;
        for l in lifts {
            let mut t = l.clone();
            t.sort_unstable();
            rhs += sort_sign(l) as f64 * kt_cochain(&assignment.family(&t)?, quad)?.value;
        }
        r.push(Check::close(format!("{s:?}"), lhs, rhs, EXPANSION_TOL));
    }
    Ok(r)
}

/// The icosahedron with vertices `(0, +-1, +-g)`, `(+-1, +-g, 0)`,
/// `(+-g, 0, +-1)`, `g` the golden ratio, and its antipodal map.
pub fn icosahedron() -> (SimplicialBase, Vec<usize>) {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-g, g] {
            pts.push([0.0, a, b]);
            pts.push([a, b, 0.0]);
            pts.push([b, 0.0, a]);
        }
    }
    let d2 = |p: &[f64; 3], q: &[f64; 3]| (0..3).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>();
    let adj = |i: usize, j: usize| (d2(&pts[i], &pts[j]) - 4.0).abs() < 1e-9;
    let n = pts.len();
    let mut facets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if adj(i, j) && adj(j, k) && adj(i, k) {
                    facets.push(vec![i, j, k]);
                }
            }
        }
    }
    let antipode = (0..n)
        .map(|i| {
            let neg = [-pts[i][0], -pts[i][1], -pts[i][2]];
            (0..n).find(|&j| d2(&pts[j], &neg) < 1e-9).expect("antipodal vertex")
        })
        .collect();
    (SimplicialBase::from_facets(n, &facets).expect("icosahedron"), antipode)
}

/// The antipodal double cover of the 6-vertex projective plane by the
/// icosahedron, with random vertex-edge families of `n x n` matrices.
pub fn double_cover_scenario(seed: u64, n: usize) -> (CoveringMap, FamilyAssignment) {
    let (ico, antipode) = icosahedron();
    let cov = CoveringMap::from_free_action(ico, &antipode, 2).expect("antipodal action is free");
    let assignment = FamilyAssignment::random_vertex_edge(seed, cov.total(), n);
    (cov, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::new(8, 1).unwrap()
    }

    #[test]
    fn icosahedron_and_its_quotient() {
        let (ico, _) = icosahedron();
        assert_eq!((ico.count(0), ico.count(1), ico.count(2)), (12, 30, 20));
        assert_eq!(ico.betti_numbers(), vec![1, 0, 1]);
        let (cov, _) = double_cover_scenario(1, 2);
        let base = cov.base();
        assert_eq!((base.count(0), base.count(1), base.count(2)), (6, 15, 10));
        assert_eq!(base.euler_characteristic(), 1);
    }

    #[test]
    fn single_sheet_is_exact() {
        let base = SimplicialBase::standard_simplex(2);
        let cov = CoveringMap::trivial(&base, 1).unwrap();
        let a = FamilyAssignment::random_vertex_edge(3, cov.total(), 2);
        let r = transfer_expansion_kt(&cov, &a, &quad()).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].diff, 0.0);
    }

    #[test]
    fn constant_families_give_zero() {
        let base = SimplicialBase::tetrahedron_boundary();
        let cov = CoveringMap::trivial(&base, 2).unwrap();
        let m = CMatrix::from_row_slice(1, 1, &[C64::new(2.0, 1.0)]);
        let a = FamilyAssignment::VertexEdge {
            vertices: (0..8).map(|v| VertexMatrix { vertex: v, matrix: m.clone() }).collect(),
            edges: vec![],
        };
        let r = transfer_expansion_kt(&cov, &a, &quad()).unwrap();
        assert!(r.pass);
        assert!(r.checks.iter().all(|c| c.lhs == 0.0 && c.rhs == 0.0));
    }

    #[test]
    fn double_cover_expansion_holds() {
        let (cov, a) = double_cover_scenario(11, 2);
        let r = transfer_expansion_kt(&cov, &a, &QuadratureSpec::new(10, 1).unwrap()).unwrap();
        assert_eq!(r.checks.len(), 10);
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.checks.iter().any(|c| c.lhs.abs() > 1e-6));
    }

    #[test]
    fn incompatible_faces_are_rejected() {
        let base = SimplicialBase::from_facets(4, &[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let cov = CoveringMap::trivial(&base, 1).unwrap();
        let fam = |seed| SimplexCatalog {
            simplex: vec![],
            family: Catalog::RandomSmooth { seed, n: 2 },
        };
        let mut f0 = fam(1);
        f0.simplex = vec![0, 1, 2];
        let mut f1 = fam(2);
        f1.simplex = vec![1, 2, 3];
        let a = FamilyAssignment::PerSimplex { families: vec![f0, f1] };
        assert!(matches!(transfer_expansion_kt(&cov, &a, &quad()), Err(Error::Model { .. })));
    }
}
