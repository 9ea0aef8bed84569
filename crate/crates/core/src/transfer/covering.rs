use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplicial::{face, Simplex, SimplicialBase};

/// A finite simplicial covering `pi: total -> base` given by its lift table:
/// every base simplex `[v_0 < ... < v_q]` lists its sheets as ordered
/// vertex lists `[w_0, ..., w_q]` with `pi(w_i) = v_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoveringFields", into = "CoveringFields")]
pub struct CoveringMap {
    base: SimplicialBase,
    total: SimplicialBase,
    lifts: BTreeMap<Simplex, Vec<Simplex>>,
}

#[derive(Serialize, Deserialize)]
struct LiftEntry {
    simplex: Simplex,
    sheets: Vec<Simplex>,
}

#[derive(Serialize, Deserialize)]
struct CoveringFields {
    base: SimplicialBase,
    total: SimplicialBase,
    lifts: Vec<LiftEntry>,
}

impl TryFrom<CoveringFields> for CoveringMap {
    type Error = Error;

    fn try_from(f: CoveringFields) -> Result<Self> {
        let mut lifts = BTreeMap::new();
        for e in f.lifts {
            if lifts.insert(e.simplex.clone(), e.sheets).is_some() {
                return Err(Error::CoveringIntegrity(format!("simplex {:?} listed twice", e.simplex)));
            }
        }
        CoveringMap::new(f.base, f.total, lifts)
    }
}

impl From<CoveringMap> for CoveringFields {
    fn from(c: CoveringMap) -> Self {
        CoveringFields {
            base: c.base,
            total: c.total,
            lifts: c
                .lifts
                .into_iter()
                .map(|(simplex, sheets)| LiftEntry { simplex, sheets })
                .collect(),
        }
    }
}

fn integrity(msg: impl Into<String>) -> Error {
    Error::CoveringIntegrity(msg.into())
}

fn sorted(s: &[usize]) -> Simplex {
    let mut v = s.to_vec();
    v.sort_unstable();
    v
}

impl CoveringMap {
    pub fn new(base: SimplicialBase, total: SimplicialBase, lifts: BTreeMap<Simplex, Vec<Simplex>>) -> Result<Self> {
        let mut seen: BTreeSet<Simplex> = BTreeSet::new();
        for d in 0..=base.dim() {
            for s in base.simplices(d) {
                let sheets = lifts
                    .get(s)
                    .ok_or_else(|| integrity(format!("base simplex {s:?} has no lift table entry")))?;
                for l in sheets {
                    if l.len() != s.len() {
                        return Err(integrity(format!("lift {l:?} of {s:?} has the wrong dimension")));
                    }
                    let key = sorted(l);
                    if !total.contains(&key) {
                        return Err(integrity(format!("lift {l:?} of {s:?} is not a simplex of the total space")));
                    }
                    if !seen.insert(key) {
                        return Err(integrity(format!("total simplex {l:?} lies over two base simplices or twice")));
                    }
                }
            }
        }
        if let Some(extra) = lifts.keys().find(|s| !base.contains(s)) {
            return Err(integrity(format!("lift table entry {extra:?} is not a base simplex")));
        }
        let total_count: usize = (0..=total.dim()).map(|d| total.count(d)).sum();
        if seen.len() != total_count {
            return Err(integrity("some total simplices lie over no base simplex"));
        }
        let cov = CoveringMap { base, total, lifts };
        cov.check_faces()?;
        cov.check_constant_counts()?;
        Ok(cov)
    }

    fn check_faces(&self) -> Result<()> {
        for (s, sheets) in &self.lifts {
            if s.len() < 2 {
                continue;
            }
            for l in sheets {
                for i in 0..s.len() {
                    let fs = face(s, i);
                    let fl = face(l, i);
                    if !self.lifts[&fs].contains(&fl) {
                        return Err(integrity(format!(
                            "face {i} of the lift {l:?} is not a lift of the face {fs:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_constant_counts(&self) -> Result<()> {
        let comp = self.base.components();
        let mut count: BTreeMap<usize, usize> = BTreeMap::new();
        for (s, sheets) in &self.lifts {
            let c = comp[s[0]];
            match count.get(&c) {
                Some(&n) if n != sheets.len() => {
                    return Err(integrity(format!(
                        "{s:?} has {} sheets, other simplices of its component have {n}",
                        sheets.len()
                    )))
                }
                _ => {
                    count.insert(c, sheets.len());
                }
            }
        }
        Ok(())
    }

    /// The covering determined by a vertex map `total -> base` that is
    /// injective on simplices.
    pub fn from_vertex_map(base: SimplicialBase, total: SimplicialBase, proj: &[usize]) -> Result<Self> {
        if proj.len() != total.n_vertices() {
            return Err(integrity("vertex map has the wrong length"));
        }
        let mut lifts: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
        for d in 0..=total.dim() {
            for t in total.simplices(d) {
                let mut pairs: Vec<(usize, usize)> = t.iter().map(|&w| (proj[w], w)).collect();
                pairs.sort_unstable();
                if pairs.windows(2).any(|p| p[0].0 == p[1].0) {
                    return Err(integrity(format!("vertex map folds the simplex {t:?}")));
                }
                let image: Simplex = pairs.iter().map(|p| p.0).collect();
                lifts.entry(image).or_default().push(pairs.iter().map(|p| p.1).collect());
            }
        }
        for sheets in lifts.values_mut() {
            sheets.sort();
        }
        Self::new(base, total, lifts)
    }

    /// The quotient covering `total -> total / <g>` for a vertex permutation
    /// `g` generating a free `Z_m` action. Base vertices are the orbits,
    /// numbered by their smallest member.
    pub fn from_free_action(total: SimplicialBase, action: &[usize], m: usize) -> Result<Self> {
        let n = total.n_vertices();
        if action.len() != n || m == 0 {
            return Err(integrity("action must permute the vertices"));
        }
        let mut is_perm = vec![false; n];
        for &a in action {
            if a >= n || std::mem::replace(&mut is_perm[a], true) {
                return Err(integrity("action is not a permutation"));
            }
        }
        let mut orbit_of = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if orbit_of[v] != usize::MAX {
                continue;
            }
            let mut w = v;
            let mut len = 0;
            loop {
                orbit_of[w] = next;
                w = action[w];
                len += 1;
                if w == v {
                    break;
                }
            }
            if len != m {
                return Err(integrity(format!("vertex {v} has an orbit of size {len}, not {m}")));
            }
            next += 1;
        }
        for d in 0..=total.dim() {
            for s in total.simplices(d) {
                if !total.contains(&sorted(&s.iter().map(|&v| action[v]).collect::<Vec<_>>())) {
                    return Err(integrity(format!("action does not map {s:?} to a simplex")));
                }
            }
        }
        let facets: Vec<Simplex> = total
            .facets()
            .iter()
            .map(|f| sorted(&f.iter().map(|&v| orbit_of[v]).collect::<Vec<_>>()))
            .collect();
        let base = SimplicialBase::from_facets(next, &facets)
            .map_err(|e| integrity(format!("quotient is not a simplicial complex: {e}")))?;
        Self::from_vertex_map(base, total, &orbit_of)
    }

    /// `sheets` disjoint copies of `base`.
    pub fn trivial(base: &SimplicialBase, sheets: usize) -> Result<Self> {
        let n = base.n_vertices();
        let total = base.disjoint_copies(sheets);
        let proj: Vec<usize> = (0..n * sheets).map(|v| v % n).collect();
        Self::from_vertex_map(base.clone(), total, &proj)
    }

    pub fn base(&self) -> &SimplicialBase {
        &self.base
    }

    pub fn total(&self) -> &SimplicialBase {
        &self.total
    }

    pub fn lifts(&self, s: &[usize]) -> Result<&[Simplex]> {
        self.lifts
            .get(s)
            .map(|v| v.as_slice())
            .ok_or_else(|| integrity(format!("{s:?} is missing from the lift table")))
    }

    /// Number of sheets over the given base simplex.
    pub fn degree_over(&self, s: &[usize]) -> usize {
        self.lifts.get(s).map_or(0, |v| v.len())
    }

    /// The base simplex under a sorted total simplex, and the ordered lift
    /// through which it maps.
    pub fn image(&self, t: &[usize]) -> Option<(&Simplex, &Simplex)> {
        self.lifts
            .iter()
            .find_map(|(s, sheets)| sheets.iter().find(|l| sorted(l) == t).map(|l| (s, l)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cover_of_triangle() {
        let base = SimplicialBase::standard_simplex(2);
        let c = CoveringMap::trivial(&base, 3).unwrap();
        assert_eq!(c.degree_over(&[0, 1, 2]), 3);
        assert_eq!(c.lifts(&[0, 2]).unwrap()[1], vec![3, 5]);
    }

    #[test]
    fn connected_double_cover_of_circle() {
        let total = SimplicialBase::circle(12);
        let action: Vec<usize> = (0..12).map(|v| (v + 6) % 12).collect();
        let c = CoveringMap::from_free_action(total, &action, 2).unwrap();
        assert_eq!(*c.base(), SimplicialBase::circle(6));
        // the wrap-around edge lifts with reversed vertex order
        let sheets = c.lifts(&[0, 5]).unwrap();
        assert!(sheets.contains(&vec![6, 5]) && sheets.contains(&vec![0, 11]));
    }

    #[test]
    fn integrity_errors() {
        let base = SimplicialBase::standard_simplex(1);
        let total = base.disjoint_copies(2);
        let mut lifts = BTreeMap::new();
        lifts.insert(vec![0], vec![vec![0], vec![2]]);
        lifts.insert(vec![1], vec![vec![1], vec![3]]);
        assert!(matches!(
            CoveringMap::new(base.clone(), total.clone(), lifts.clone()),
            Err(Error::CoveringIntegrity(_))
        ));
        // edge lifts that do not restrict to vertex lifts
        lifts.insert(vec![0, 1], vec![vec![0, 1], vec![3, 2]]);
        assert!(CoveringMap::new(base.clone(), total.clone(), lifts.clone()).is_err());
        lifts.insert(vec![0, 1], vec![vec![0, 1], vec![2, 3]]);
        assert!(CoveringMap::new(base, total, lifts).is_ok());
        // the rotation of a triangle is free on vertices but folds every edge
        let circle = SimplicialBase::circle(3);
        assert!(CoveringMap::from_free_action(circle, &[1, 2, 0], 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = CoveringMap::trivial(&SimplicialBase::circle(4), 2).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<CoveringMap>(&s).unwrap(), c);
    }
}
