use std::sync::Arc;

use crate::charclass::{
    chern_character_component, half_ch_complexification, hom_end_bundle, BundleKind, BundleModel,
    RingClass, RingSpec,
};
use crate::error::{Error, Result};
use crate::polylog::RootOfUnity;
use crate::rational::{q, Q};

use super::class::{Constant, TorsionClass};
use super::formulas::{require_k, require_kind, require_root};

/// One component `Sigma^i` of the fiberwise critical set.
#[derive(Debug, Clone, PartialEq)]
pub struct MorseSection {
    pub index: u32,
    /// Negative eigenspace bundle over the section, in the section's ring.
    pub gamma: BundleModel,
    /// Full vertical tangent bundle over the section, for the complex
    /// push-down.
    pub tangent: Option<BundleModel>,
    /// Images in the base ring of the generators of the section's ring.
    pub images: Vec<RingClass>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseSectionData {
    pub base: Arc<RingSpec>,
    pub sections: Vec<MorseSection>,
}

impl MorseSection {
    /// A section whose ring is the base ring itself.
    pub fn over_base(index: u32, gamma: BundleModel, tangent: Option<BundleModel>) -> Self {
        let images = (0..gamma.spec().generators().len())
            .map(|i| RingClass::generator_at(gamma.spec(), i))
            .collect();
        MorseSection {
            index,
            gamma,
            tangent,
            images,
        }
    }
}

impl MorseSectionData {
    pub fn validate(&self) -> Result<()> {
        for (n, s) in self.sections.iter().enumerate() {
            let gens = s.gamma.spec().generators();
            if let Some(t) = &s.tangent {
                if **t.spec() != **s.gamma.spec() {
                    return Err(Error::model(
                        "torsion",
                        format!("section {n}: tangent and negative bundle live over different rings"),
                    ));
                }
            }
            if s.images.len() != gens.len() {
                return Err(Error::model(
                    "torsion",
                    format!(
                        "section {n}: {} substitution images for {} generators",
                        s.images.len(),
                        gens.len()
                    ),
                ));
            }
            for (g, img) in gens.iter().zip(&s.images) {
                if **img.spec() != *self.base {
                    return Err(Error::model(
                        "torsion",
                        format!("section {n}: image of {} is not in the base ring", g.name),
                    ));
                }
                if !img.is_homogeneous_of(g.degree) {
                    return Err(Error::model(
                        "torsion",
                        format!(
                            "section {n}: substitution {} -> {img} is not degree-preserving",
                            g.name
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `sum_i (-1)^{index_i} subst_i(class_i)` in the base ring.
    fn pushdown(&self, mut class_of: impl FnMut(&MorseSection) -> Result<RingClass>) -> Result<RingClass> {
        self.validate()?;
        let mut acc = RingClass::zero(&self.base);
        for s in &self.sections {
            let local = class_of(s)?;
            let down = local.substitute(&self.base, &s.images)?;
            acc = if s.index % 2 == 0 { acc.add(&down)? } else { acc.sub(&down)? };
        }
        Ok(acc)
    }

    /// Sphere bundle `S(xi)` of a real `n`-plane bundle with the height
    /// function: one critical section of index `n` whose negative bundle is
    /// `xi`. `xi` is a realification (plus a trivial line for odd `n`).
    pub fn sphere_bundle(xi: &BundleModel, n: u32) -> Result<Self> {
        require_kind(xi, BundleKind::Realification)?;
        Ok(MorseSectionData {
            base: Arc::clone(xi.spec()),
            sections: vec![MorseSection::over_base(n, xi.clone(), None)],
        })
    }

    /// Projective bundle `P(xi)` of a split complex bundle with roots
    /// `x_0, ..., x_{r-1}`: critical sections `P(lambda_i)` of index `2i`,
    /// negative bundles `sum_{j<i} Hom(lambda_i, lambda_j)` and vertical
    /// tangent bundles `Hom(lambda_i, xi - lambda_i)`.
    pub fn projective_bundle(xi: &BundleModel) -> Result<Self> {
        require_kind(xi, BundleKind::Complex)?;
        let spec = xi.spec();
        let line = |i: usize| BundleModel::complex(spec, vec![xi.roots()[i].clone()]);
        let mut sections = Vec::with_capacity(xi.rank());
        for i in 0..xi.rank() {
            let li = line(i)?;
            let below: Vec<usize> = (0..i).collect();
            let others: Vec<usize> = (0..xi.rank()).filter(|&j| j != i).collect();
            let sum_of = |idx: &[usize]| -> Result<BundleModel> {
                let mut roots = Vec::new();
                for &j in idx {
                    roots.extend(hom_end_bundle(&li, &line(j)?)?.roots().iter().cloned());
                }
                BundleModel::complex(spec, roots)
            };
            sections.push(MorseSection::over_base(
                2 * i as u32,
                sum_of(&below)?,
                Some(sum_of(&others)?),
            ));
        }
        Ok(MorseSectionData {
            base: Arc::clone(spec),
            sections,
        })
    }
}

/// `(-1)^k zeta(2k+1) p_*(1/2 ch_{2k}(gamma (x) C))`, the difference between
/// the framed torsion and the torsion given by the Morse data, in degree `2k`.
pub fn framing_correction(k: u32, data: &MorseSectionData) -> Result<TorsionClass> {
    require_k(k)?;
    let body = data.pushdown(|s| half_ch_complexification(&s.gamma.realify(), k))?;
    let body = if k.is_multiple_of(2) { body } else { body.neg() };
    TorsionClass::single(
        2 * k,
        1,
        RootOfUnity::one(),
        Constant::zeta_odd(k),
        body,
        "framing_correction",
    )
}

/// `1/2 m^k L_{k+1}(zeta) sum_i (-1)^i ch_k(T^v E | Sigma^i)`.
pub fn complex_framing_pushdown(
    k: u32,
    m: u64,
    zeta: RootOfUnity,
    data: &MorseSectionData,
    upper_triangular: bool,
) -> Result<TorsionClass> {
    require_k(k)?;
    require_root(zeta, m, upper_triangular)?;
    let body = data.pushdown(|s| {
        let t = s.tangent.as_ref().ok_or_else(|| {
            Error::model("torsion", format!("section of index {} has no tangent bundle", s.index))
        })?;
        chern_character_component(t, k)
    })?;
    let coeff = Q::from_integer((m as i64).pow(k).into()) / q(2);
    TorsionClass::single(
        k,
        m,
        zeta,
        Constant::polylog(k, zeta)?,
        body.scale(&coeff),
        "complex_framing",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::torsion::formulas::torsion_sphere_bundle;

    fn split(rank: usize, trunc: u32) -> BundleModel {
        BundleModel::split_from_generators(&RingSpec::roots(rank, "x", trunc)).unwrap()
    }

    #[test]
    fn sphere_model_recovers_sphere_bundle_torsion() {
        for rank in 1..=3usize {
            let xi = split(rank, 12).realify();
            for n in [2 * rank as u32, 2 * rank as u32 + 1] {
                for k in 1..=3 {
                    let data = MorseSectionData::sphere_bundle(&xi, n).unwrap();
                    let disk_rel = framing_correction(k, &data).unwrap();
                    let direct = torsion_sphere_bundle(&xi, n, k).unwrap();
                    let cmp = disk_rel.neg().compare(&direct);
                    assert!(cmp.body_equal && cmp.scalar_diff < 1e-12, "rank {rank} n {n} k {k}");
                }
            }
        }
    }

    #[test]
    fn trivial_negative_bundles_give_zero() {
        let spec = RingSpec::roots(2, "x", 8);
        let gamma = BundleModel::trivial(&spec, 2, BundleKind::Realification);
        let data = MorseSectionData {
            base: Arc::clone(&spec),
            sections: vec![
                MorseSection::over_base(0, gamma.clone(), None),
                MorseSection::over_base(3, gamma, None),
            ],
        };
        assert!(framing_correction(2, &data).unwrap().is_zero());
    }

    #[test]
    fn projective_bundle_closed_forms() {
        for rank in 1..=3usize {
            let xi = split(rank, 12);
            let end = xi.end().unwrap();
            let data = MorseSectionData::projective_bundle(&xi).unwrap();
            for k in 1..=3u32 {
                let half = if k % 2 == 0 { frac(1, 2) } else { frac(-1, 2) };
                let body = chern_character_component(&end, 2 * k).unwrap().scale(&half);
                let expected =
                    TorsionClass::single(2 * k, 1, RootOfUnity::one(), Constant::zeta_odd(k), body, "closed")
                        .unwrap();
                let real = framing_correction(k, &data).unwrap();
                let cmp = real.compare(&expected);
                assert!(cmp.body_equal && cmp.scalar_diff < 1e-12, "rank {rank} k {k}");

                let z = RootOfUnity::new(3, 1).unwrap();
                let body = chern_character_component(&end, k).unwrap().scale(&(q(3).pow(k as i32) / q(2)));
                let expected =
                    TorsionClass::single(k, 3, z, Constant::polylog(k, z).unwrap(), body, "closed").unwrap();
                let complex = complex_framing_pushdown(k, 3, z, &data, false).unwrap();
                assert!(complex.compare(&expected).agrees(1e-12), "rank {rank} k {k}");
            }
        }
    }

    #[test]
    fn complex_pushdown_specializes_to_framing_correction() {
        let xi = split(3, 12);
        let data = MorseSectionData::projective_bundle(&xi).unwrap();
        for k in 1..=2u32 {
            let complex = complex_framing_pushdown(2 * k, 1, RootOfUnity::one(), &data, true).unwrap();
            let real = framing_correction(k, &data).unwrap();
            assert!(complex.compare(&real).agrees(1e-12));
        }
    }

    #[test]
    fn trivial_tangent_gives_zero() {
        let spec = RingSpec::roots(1, "x", 8);
        let triv = BundleModel::trivial(&spec, 2, BundleKind::Complex);
        let data = MorseSectionData {
            base: Arc::clone(&spec),
            sections: vec![MorseSection::over_base(0, triv.clone(), Some(triv))],
        };
        let z = RootOfUnity::new(2, 1).unwrap();
        assert!(complex_framing_pushdown(2, 2, z, &data, false).unwrap().is_zero());
    }

    #[test]
    fn sections_must_preserve_degree() {
        let base = RingSpec::roots(1, "x", 8);
        let local = RingSpec::roots(1, "y", 8);
        let gamma = BundleModel::split_from_generators(&local).unwrap().realify();
        let x = RingClass::generator_at(&base, 0);
        let data = MorseSectionData {
            base: Arc::clone(&base),
            sections: vec![MorseSection {
                index: 0,
                gamma,
                tangent: None,
                images: vec![x.pow(2)],
            }],
        };
        assert!(matches!(framing_correction(1, &data), Err(Error::Model { .. })));
    }
}
