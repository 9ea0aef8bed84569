use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::simplicial::{Simplex, SimplicialBase};

use super::family::DeltaFamily;
use super::poset::{GradedPoset, UTEndomorphism};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainJson {
    pub simplex: Simplex,
    /// `[row id, col id, "p/q"]`.
    pub entries: Vec<[String; 3]>,
}

/// Interchange form of a [`DeltaFamily`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub base: SimplicialBase,
    pub poset: GradedPoset,
    pub cochains: Vec<CochainJson>,
}

impl FamilyJson {
    pub fn from_family(fam: &DeltaFamily) -> Self {
        let cochains = fam
            .cochains()
            .iter()
            .map(|(s, m)| CochainJson {
                simplex: s.clone(),
                entries: UTEndomorphism {
                    matrix: m.clone(),
                    degree: s.len() as i32 - 2,
                }
                .to_entries(fam.poset()),
            })
            .collect();
        FamilyJson {
            base: fam.base().clone(),
            poset: fam.poset().clone(),
            cochains,
        }
    }

    pub fn to_family(&self) -> Result<DeltaFamily> {
        let mut map = BTreeMap::new();
        for c in &self.cochains {
            let e = UTEndomorphism::from_entries(&self.poset, &c.entries, c.simplex.len() as i32 - 2)?;
            map.insert(c.simplex.clone(), e.matrix);
        }
        DeltaFamily::new(self.base.clone(), self.poset.clone(), map)
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::twisted::fixtures::random_solved_family;

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = random_solved_family(&mut rng, 2, 2);
        let text = serde_json::to_string(&FamilyJson::from_family(&fam)).unwrap();
        let back: FamilyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_family().unwrap(), fam);
    }

    #[test]
    fn bad_pattern_is_rejected() {
        let text = r#"{"base":{"vertices":1,"facets":[[0]]},
            "poset":{"elements":[{"id":"a","degree":0},{"id":"b","degree":1}],"order":[["a","b"]]},
            "cochains":[{"simplex":[0],"entries":[["b","a","1"]]}]}"#;
        let f: FamilyJson = serde_json::from_str(text).unwrap();
        assert!(f.to_family().is_err());
    }
}
