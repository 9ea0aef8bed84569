//! Model files and torsion jobs as read from JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use htorsion::charclass::{chern_character_component, BundleKind, BundleModel, RingClass, RingSpec};
use htorsion::polylog::RootOfUnity;
use htorsion::rational;
use htorsion::torsion::{
    boundary_corrected_complex_torsion, complex_framing_pushdown, complex_torsion_closed, framing_correction,
    torsion_circle_bundle, torsion_combinators, torsion_lens_bundle, torsion_sphere_bundle, Combinator,
    MorseSectionData, TorsionClass, TorsionJson,
};

use crate::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::model(format!("{}: {e}", path.display())))
}

/// `1`, `-1`, `i`, `-i`, or `j/n` for `exp(2 pi i j / n)`.
pub fn parse_root(s: &str) -> Result<RootOfUnity, CliError> {
    let r = match s.trim() {
        "1" => Ok(RootOfUnity::one()),
        "-1" => RootOfUnity::new(2, 1),
        "i" => RootOfUnity::new(4, 1),
        "-i" => RootOfUnity::new(4, 3),
        other => {
            let (j, n) = other
                .split_once('/')
                .ok_or_else(|| CliError::usage(format!("cannot read {other:?} as a root of unity")))?;
            let j: i64 = j.trim().parse().map_err(|_| CliError::usage(format!("bad numerator in {other:?}")))?;
            let n: u64 = n.trim().parse().map_err(|_| CliError::usage(format!("bad denominator in {other:?}")))?;
            RootOfUnity::new(n, j)
        }
    };
    r.map_err(CliError::from)
}

/// A bundle given by its ring and Chern roots.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub ring: RingSpec,
    /// Each root as `{exponent vector: "p/q"}`.
    pub roots: Vec<BTreeMap<String, String>>,
    #[serde(default = "complex_kind")]
    pub kind: BundleKind,
}

fn complex_kind() -> BundleKind {
    BundleKind::Complex
}

impl BundleFile {
    pub fn to_model(&self) -> Result<BundleModel, CliError> {
        let spec = Arc::new(self.ring.clone());
        let roots = self
            .roots
            .iter()
            .map(|r| RingClass::from_string_map(&spec, r))
            .collect::<htorsion::Result<Vec<_>>>()?;
        Ok(BundleModel::new(&spec, roots, self.kind)?)
    }
}

/// A single cohomology class, e.g. `c_1` or `T_k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    pub ring: RingSpec,
    pub class: BTreeMap<String, String>,
}

impl ClassFile {
    pub fn to_class(&self) -> Result<RingClass, CliError> {
        Ok(RingClass::from_string_map(&Arc::new(self.ring.clone()), &self.class)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TorsionKind {
    Circle,
    Lens,
    Sphere,
    Projective,
    Complex,
}

fn default_one() -> u64 {
    1
}

/// A root of unity in a job file: the command-line text form or `{m, j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootArg {
    Text(String),
    Exact(RootOfUnity),
}

impl Default for RootArg {
    fn default() -> Self {
        RootArg::Exact(RootOfUnity::one())
    }
}

impl RootArg {
    pub fn resolve(&self) -> Result<RootOfUnity, CliError> {
        match self {
            RootArg::Text(s) => parse_root(s),
            RootArg::Exact(z) => Ok(*z),
        }
    }
}

/// One closed-form torsion computation. Without a model file the model is
/// the universal split bundle of the given rank.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionJob {
    pub kind: TorsionKind,
    pub k: u32,
    #[serde(default = "default_one")]
    pub m: u64,
    #[serde(default)]
    pub z: RootArg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Fiber sphere dimension for `sphere`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default)]
    pub upper_triangular: bool,
    /// For `projective`: push down the complex torsion instead of the real
    /// framing correction.
    #[serde(default)]
    pub complex: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

/// A computed class with the multiple of `ch_k` it represents when the
/// model is a bundle.
#[derive(Debug, Clone, Serialize)]
pub struct TorsionOutput {
    #[serde(flatten)]
    pub class: TorsionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ch_multiple: Option<f64>,
}

impl TorsionJob {
    fn rank(&self) -> usize {
        self.rank.unwrap_or(1)
    }

    fn bundle(&self, base_dir: &Path, truncation: u32) -> Result<BundleModel, CliError> {
        match &self.file {
            Some(f) => read_json::<BundleFile>(&base_dir.join(f))?.to_model(),
            None => Ok(BundleModel::split_from_generators(&RingSpec::roots(self.rank(), "x", truncation))?),
        }
    }

    fn class(&self, base_dir: &Path, name: &str, degree: u32) -> Result<RingClass, CliError> {
        match &self.file {
            Some(f) => read_json::<ClassFile>(&base_dir.join(f))?.to_class(),
            None => {
                let spec = RingSpec::with(&[(name, degree)], degree)?;
                Ok(RingClass::generator(&spec, name)?)
            }
        }
    }

    pub fn run(&self, base_dir: &Path) -> Result<(TorsionClass, Option<RingClass>), CliError> {
        let z = self.z.resolve()?;
        let (k, m, ut) = (self.k, self.m, self.upper_triangular);
        let trunc = 4 * k.max(1);
        Ok(match self.kind {
            TorsionKind::Circle => {
                let c1 = self.class(base_dir, "c", 2)?;
                (torsion_circle_bundle(&c1, m, k, z, ut)?, None)
            }
            TorsionKind::Lens => {
                let xi = self.bundle(base_dir, trunc)?;
                let ch = chern_character_component(&xi, k)?;
                (torsion_lens_bundle(&xi, m, k, z, ut)?, Some(ch))
            }
            TorsionKind::Sphere => {
                let xi = match &self.file {
                    Some(_) => self.bundle(base_dir, trunc)?,
                    None => self.bundle(base_dir, trunc)?.realify(),
                };
                let n = self.n.unwrap_or(2 * xi.rank() as u32);
                (torsion_sphere_bundle(&xi, n, k)?, None)
            }
            TorsionKind::Projective => {
                let xi = self.bundle(base_dir, trunc)?;
                let data = MorseSectionData::projective_bundle(&xi)?;
                if self.complex {
                    (complex_framing_pushdown(k, m, z, &data, ut)?, None)
                } else {
                    (framing_correction(k, &data)?, None)
                }
            }
            TorsionKind::Complex => {
                let tk = self.class(base_dir, "t", 2 * k)?;
                (complex_torsion_closed(&tk, k, m, z, ut)?, None)
            }
        })
    }

    pub fn output(&self, base_dir: &Path) -> Result<TorsionOutput, CliError> {
        let (class, ch) = self.run(base_dir)?;
        Ok(output_of(&class, ch.as_ref()))
    }
}

pub fn output_of(class: &TorsionClass, ch: Option<&RingClass>) -> TorsionOutput {
    let ch_multiple = ch.and_then(|ch| {
        let (scalar, monic) = class.scalar_view()?;
        let r = ch.ratio_to(&monic)?;
        Some(scalar / rational::to_f64(&r))
    });
    TorsionOutput {
        class: class.to_json(),
        ch_multiple,
    }
}

/// A rule of the torsion calculus applied to computed classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum Rule {
    Product { chi: i64 },
    Glue,
    Stack,
    Suspend { m: u32 },
    Involution { n: u32 },
    Scale {
        #[serde(with = "htorsion::rational::serde_q")]
        factor: htorsion::Q,
    },
    /// `interior + boundary / 2m` for inputs `[interior, boundary]`.
    BoundaryCorrected { m: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombineJob {
    #[serde(flatten)]
    pub rule: Rule,
    pub inputs: Vec<TorsionJob>,
}

impl CombineJob {
    pub fn run(&self, base_dir: &Path) -> Result<TorsionClass, CliError> {
        let inputs = self
            .inputs
            .iter()
            .map(|j| j.run(base_dir).map(|(c, _)| c))
            .collect::<Result<Vec<_>, _>>()?;
        let combinator = match &self.rule {
            Rule::Product { chi } => Combinator::Product(*chi),
            Rule::Glue => Combinator::Glue,
            Rule::Stack => Combinator::Stack,
            Rule::Suspend { m } => Combinator::Suspend(*m),
            Rule::Involution { n } => Combinator::Involution(*n),
            Rule::Scale { factor } => Combinator::Scale(factor.clone()),
            Rule::BoundaryCorrected { m } => {
                let [interior, boundary] = inputs.as_slice() else {
                    return Err(CliError::usage("boundary_corrected takes two inputs"));
                };
                return Ok(boundary_corrected_complex_torsion(interior, boundary, *m)?);
            }
        };
        Ok(torsion_combinators(&inputs, &combinator)?)
    }
}

/// `tau^+ + tau^-` against `T_{2k}` for closed fibers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnorientedJob {
    pub k: u32,
    pub plus: TorsionJob,
    pub minus: TorsionJob,
    pub t2k: ClassFile,
}
