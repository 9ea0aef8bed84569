//! The `htorsion` command line: closed-form torsion, Kamber-Tondeur
//! cochains, twisted cochains, transfers and the verification suites.
//!
//! Every command writes one JSON document. Exit status is 0 on success or a
//! passing verification, 1 on a failing verification, 2 on usage errors and
//! 3 on model errors.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use htorsion::charclass::{half_ch_complexification, half_ch_via_pontryagin, verify_newton};
use htorsion::kamber_tondeur::{
    kt_cochain, kt_involution_check, kt_self_consistency_check, kt_unitary_invariance_check, random_unitary,
    Catalog, MatrixFamily, QuadratureSpec,
};
use htorsion::polylog::verify_distribution;
use htorsion::report::{Check, Report};
use htorsion::suite::{self, run_suite, Suite, SuiteOptions, DEFAULT_SEED};
use htorsion::torsion::{compare_checks, unoriented_relations, verify_lens_paths, MorseSectionData};
use htorsion::transfer::{
    double_cover_scenario, euler_fixtures, euler_multiplication_check, pullback, transfer_cochain,
    transfer_expansion_kt, CochainJson, CoveringMap, FamilyAssignment, GradedSheets, SimplicialCochain,
};
use htorsion::twisted::fixtures::random_solved_family;
use htorsion::twisted::{
    fiber_homology, homology_ranks, kill_cross_term, kunneth, total_complex, FamilyJson,
};
use htorsion::Q;

pub mod models;

use models::{parse_root, read_json, CombineJob, RootArg, TorsionJob, TorsionKind, UnorientedJob};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MODEL: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn model(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_MODEL,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<htorsion::Error> for CliError {
    fn from(e: htorsion::Error) -> Self {
        use htorsion::Error as E;
        match e {
            E::Domain(_) | E::Precondition(_) | E::Unsupported(_) => CliError::usage(e.to_string()),
            _ => CliError::model(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::model(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "htorsion", version, about = "Higher torsion invariants of model bundles")]
pub struct Cli {
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall time in reports (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form torsion classes of model bundles.
    #[command(subcommand)]
    Torsion(TorsionCmd),
    /// Kamber-Tondeur cochains of catalog families.
    #[command(subcommand)]
    Kt(KtCmd),
    /// Verification of identities, singly or as named suites.
    Verify(VerifyArgs),
    /// Twisted cochains and twisted tensor products.
    #[command(subcommand)]
    Twisted(TwistedCmd),
    /// Transfers along coverings and graded push-downs.
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// Summarize a saved report; exits 1 if it failed.
    Report {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TorsionParams {
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    /// Root of unity: 1, -1, i, -i or j/n.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub z: String,
    /// Assume an upper-triangular action (needed for z = 1).
    #[arg(long)]
    pub upper_triangular: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// JSON model file; defaults to the universal split bundle.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum TorsionCmd {
    /// Circle bundle of a line bundle, from `c_1` (`--file` holds a class).
    Circle {
        #[command(flatten)]
        params: TorsionParams,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Lens space bundle `S(xi)/Z_m`.
    Lens {
        #[command(flatten)]
        params: TorsionParams,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Sphere bundle of an oriented real bundle (a realification).
    Sphere {
        #[arg(long)]
        k: u32,
        /// Fiber dimension; defaults to the real rank.
        #[arg(long)]
        n: Option<u32>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Framing correction of the projective bundle section model.
    Projective {
        #[command(flatten)]
        params: TorsionParams,
        #[command(flatten)]
        model: ModelArgs,
        /// Push down the complex torsion at (m, z) instead.
        #[arg(long)]
        complex: bool,
    },
    /// Closed almost complex fibers, from `T_k` (`--file` holds a class).
    Complex {
        #[command(flatten)]
        params: TorsionParams,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Apply a rule (product, glue, stack, ...) to computed classes.
    Combine {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Catalog id, e.g. planar_rotation_ramp.
    #[arg(long)]
    pub family: Option<String>,
    /// Catalog parameters as a JSON object, or @path.
    #[arg(long)]
    pub params: Option<String>,
    /// Full catalog entry as a JSON file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub subdivisions: usize,
    /// Use central finite differences with this step.
    #[arg(long)]
    pub fd_step: Option<f64>,
}

impl FamilyArgs {
    fn catalog(&self) -> Result<Catalog, CliError> {
        if let Some(f) = &self.file {
            return read_json(f);
        }
        let id = self
            .family
            .as_ref()
            .ok_or_else(|| CliError::usage("either --family or --file is required"))?;
        let mut params: Value = match &self.params {
            None => json!({}),
            Some(p) if p.starts_with('@') => read_json(Path::new(&p[1..]))?,
            Some(p) => serde_json::from_str(p).map_err(|e| CliError::model(format!("--params: {e}")))?,
        };
        let obj = params
            .as_object_mut()
            .ok_or_else(|| CliError::model("--params must be a JSON object"))?;
        obj.insert("family".into(), Value::String(id.clone()));
        serde_json::from_value(params).map_err(|e| CliError::model(format!("family {id}: {e}")))
    }

    fn build(&self) -> Result<(MatrixFamily, QuadratureSpec), CliError> {
        let mut fam = MatrixFamily::catalog(self.k, self.catalog()?)?;
        if let Some(h) = self.fd_step {
            fam = fam.with_finite_difference(h)?;
        }
        let order = self.order.unwrap_or(QuadratureSpec::default().order);
        Ok((fam, QuadratureSpec::new(order, self.subdivisions)?))
    }
}

#[derive(Debug, Subcommand)]
pub enum KtCmd {
    /// Evaluate `c_2k` of a family over `Delta^2k`.
    Eval(FamilyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run a named suite: all, polylog, newton, lens, kt, twisted, transfer,
    /// framing.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Quadrature order for Kamber-Tondeur integrals.
    #[arg(long)]
    pub order: Option<usize>,
    /// Inject a corrupted fixture into each suite.
    #[arg(long)]
    pub perturb: bool,
    #[command(subcommand)]
    pub target: Option<VerifyCmd>,
}

/// Without their model options these run the suite of the same name.
#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// `L_{k+1}(z) = m^k sum_{w^m = z} L_{k+1}(w)`.
    Polylog {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = suite::DISTRIBUTION_TOL)]
        tol: f64,
    },
    /// Newton's identity and `1/2 ch_2k = N_k(p) / (2k)!`.
    Newton {
        #[arg(long)]
        k: Option<u32>,
        /// Number of formal roots for Newton's identity.
        #[arg(long, default_value_t = 4)]
        nvars: usize,
        /// A realification model for the Pontryagin route.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Lens bundle torsion directly and via the Chern roots.
    Lens {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        upper_triangular: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = suite::LENS_TOL)]
        tol: f64,
    },
    /// Invariance checks for one catalog family.
    Kt {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// The defining equation and `d^2 = 0` for a family file.
    Twisted {
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Transfer identities on a covering file, optionally with families.
    Transfer {
        #[arg(long)]
        file: Option<PathBuf>,
        /// Matrix families on the total space for the Kamber-Tondeur check.
        #[arg(long)]
        families: Option<PathBuf>,
    },
    /// Framing corrections against the closed forms.
    Framing {
        #[arg(long)]
        k: Option<u32>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// `tau^+ + tau^- = (-1)^k zeta(2k+1) T_2k / (2k)!` from a job file.
    Unoriented {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Every suite.
    All,
}

#[derive(Debug, Subcommand)]
pub enum TwistedCmd {
    /// Evaluate the defining equation on every simplex.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
    /// Fiber, base and total Betti numbers.
    Homology {
        #[arg(long)]
        file: PathBuf,
    },
    /// Remove the cross term between a closed subset and its complement.
    Split {
        #[arg(long)]
        file: PathBuf,
        /// Element ids of the closed subset, comma separated.
        #[arg(long, value_delimiter = ',')]
        closed: Vec<String>,
    },
    /// Print a seeded family with acyclic fiber over `Delta^k`.
    Example {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        pairs: usize,
        /// Instead, a family over the point whose fiber is a closed subset
        /// below an acyclic one, glued by a random cross term. The closed
        /// ids are reported on stderr.
        #[arg(long)]
        extension: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TransferExample {
    /// The antipodal double cover of the projective plane.
    Covering,
    /// Random vertex-edge families on the double cover.
    Families,
    /// Graded sheets over the hexagon.
    Sheets,
}

#[derive(Debug, Subcommand)]
pub enum TransferCmd {
    /// Transfer (or pull back) a cochain along a covering.
    Cochain {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        cochain: PathBuf,
        #[arg(long)]
        pullback: bool,
    },
    /// `p_* p^* = chi` on graded sheets, on a given or random cochain.
    Check {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        cochain: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print a built-in fixture.
    Example {
        #[arg(value_enum)]
        kind: TransferExample,
        /// Which Euler fixture, for `sheets`.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// A finished command: its JSON document and exit status.
pub struct Outcome {
    pub json: Value,
    pub code: i32,
    /// One-line human summary for stderr.
    pub summary: Option<String>,
}

impl Outcome {
    fn computed<T: Serialize>(v: &T) -> Result<Self, CliError> {
        Ok(Outcome {
            json: serde_json::to_value(v)?,
            code: EXIT_PASS,
            summary: None,
        })
    }

    fn verified(report: Report) -> Result<Self, CliError> {
        let failures = report.failures().count();
        let summary = format!(
            "{} {}: {} checks, {} failed, max diff {:.3e}",
            if report.pass { "PASS" } else { "FAIL" },
            report.name,
            report.checks.len(),
            failures,
            report.max_diff()
        );
        Ok(Outcome {
            code: if report.pass { EXIT_PASS } else { EXIT_FAIL },
            json: serde_json::to_value(&report)?,
            summary: Some(summary),
        })
    }
}

/// Pretty JSON with a trailing newline; map keys come out sorted, so equal
/// inputs give byte-identical output.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut out = match &cli.command {
        Command::Torsion(t) => torsion(t),
        Command::Kt(KtCmd::Eval(f)) => {
            let (fam, quad) = f.build()?;
            Outcome::computed(&kt_cochain(&fam, &quad)?)
        }
        Command::Verify(v) => verify(v),
        Command::Twisted(t) => twisted(t),
        Command::Transfer(t) => transfer(t),
        Command::Report { file } => {
            let report: Report = read_json(file)?;
            Outcome::verified(report)
        }
    }?;
    if cli.timing {
        if let Some(obj) = out.json.as_object_mut() {
            if obj.contains_key("checks") {
                obj.insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
            }
        }
    }
    Ok(out)
}

fn here() -> PathBuf {
    PathBuf::from(".")
}

fn torsion(cmd: &TorsionCmd) -> Result<Outcome, CliError> {
    let job = |kind: TorsionKind, p: &TorsionParams, rank: Option<usize>, file: Option<PathBuf>| TorsionJob {
        kind,
        k: p.k,
        m: p.m,
        z: RootArg::Text(p.z.clone()),
        rank,
        n: None,
        upper_triangular: p.upper_triangular,
        complex: false,
        file,
    };
    let job = match cmd {
        TorsionCmd::Circle { params, file } => job(TorsionKind::Circle, params, None, file.clone()),
        TorsionCmd::Lens { params, model } => job(TorsionKind::Lens, params, model.rank, model.file.clone()),
        TorsionCmd::Sphere { k, n, model } => TorsionJob {
            n: *n,
            ..job(
                TorsionKind::Sphere,
                &TorsionParams {
                    k: *k,
                    m: 1,
                    z: "1".into(),
                    upper_triangular: false,
                },
                model.rank,
                model.file.clone(),
            )
        },
        TorsionCmd::Projective { params, model, complex } => TorsionJob {
            complex: *complex,
            ..job(TorsionKind::Projective, params, model.rank, model.file.clone())
        },
        TorsionCmd::Complex { params, file } => job(TorsionKind::Complex, params, None, file.clone()),
        TorsionCmd::Combine { file } => {
            let combine: CombineJob = read_json(file)?;
            let base = file.parent().map(Path::to_path_buf).unwrap_or_else(here);
            return Outcome::computed(&models::output_of(&combine.run(&base)?, None));
        }
    };
    Outcome::computed(&job.output(&here())?)
}

fn suite_options(v: &VerifyArgs) -> SuiteOptions {
    SuiteOptions {
        seed: v.seed,
        perturb: v.perturb,
        kt_order: v.order.unwrap_or(SuiteOptions::default().kt_order),
    }
}

fn with_job(mut report: Report, job: Value) -> Report {
    report.job = job;
    report
}

fn verify(v: &VerifyArgs) -> Result<Outcome, CliError> {
    let opts = suite_options(v);
    let suite_report = |s: Suite| Outcome::verified(with_job(run_suite(s, &opts), suite_job(s, &opts)));
    if let Some(name) = &v.suite {
        if v.target.is_some() {
            return Err(CliError::usage("--suite cannot be combined with a verify subcommand"));
        }
        let s: Suite = name.parse().map_err(|e: htorsion::Error| CliError::usage(e.to_string()))?;
        return suite_report(s);
    }
    let Some(target) = &v.target else {
        return Err(CliError::usage("give a verify subcommand or --suite"));
    };
    match target {
        VerifyCmd::All => suite_report(Suite::All),
        VerifyCmd::Polylog { k, m, z, tol } => match (k, m) {
            (Some(k), Some(m)) => {
                let root = parse_root(z)?;
                let d = verify_distribution(*k, *m, root, *tol)?;
                let mut r = Report::new("polylog");
                r.push(Check::with_diff("distribution", d.lhs, d.rhs, d.diff, d.tol));
                Outcome::verified(with_job(r, json!({"k": k, "m": m, "z": root})))
            }
            (None, None) => suite_report(Suite::Polylog),
            _ => Err(CliError::usage("verify polylog needs both --k and --m")),
        },
        VerifyCmd::Newton { k: None, file: None, .. } => suite_report(Suite::Newton),
        VerifyCmd::Newton { k, nvars, file } => {
            let mut r = Report::new("newton");
            let ks: Vec<u32> = match k {
                Some(k) => vec![*k],
                None => (1..=4).collect(),
            };
            for &k in &ks {
                r.push(Check::exact(format!("newton_identity/k{k}_n{nvars}"), verify_newton(k, *nvars)));
            }
            if let Some(f) = file {
                let xi = read_json::<models::BundleFile>(f)?.to_model()?;
                for &k in &ks {
                    let lhs = half_ch_complexification(&xi, k)?;
                    let rhs = half_ch_via_pontryagin(&xi, k)?;
                    r.push(Check::exact(format!("pontryagin/k{k}"), lhs == rhs));
                }
            }
            Outcome::verified(with_job(r, json!({"k": k, "nvars": nvars, "file": file})))
        }
        VerifyCmd::Lens { k: None, .. } => suite_report(Suite::Lens),
        VerifyCmd::Lens {
            k: Some(k),
            m,
            z,
            upper_triangular,
            model,
            tol,
        } => {
            let job = TorsionJob {
                kind: TorsionKind::Lens,
                k: *k,
                m: *m,
                z: RootArg::Text(z.clone()),
                rank: model.rank,
                n: None,
                upper_triangular: *upper_triangular,
                complex: false,
                file: model.file.clone(),
            };
            let xi = match &model.file {
                Some(f) => read_json::<models::BundleFile>(f)?.to_model()?,
                None => htorsion::charclass::BundleModel::split_from_generators(
                    &htorsion::charclass::RingSpec::roots(model.rank.unwrap_or(1), "x", 2 * k),
                )?,
            };
            let r = verify_lens_paths(&xi, *m, *k, parse_root(z)?, *upper_triangular, *tol)?;
            Outcome::verified(with_job(r, serde_json::to_value(&job)?))
        }
        VerifyCmd::Kt {
            family: None,
            file: None,
            ..
        } => suite_report(Suite::Kt),
        VerifyCmd::Kt { family, params, file, k } => {
            let args = FamilyArgs {
                family: family.clone(),
                params: params.clone(),
                file: file.clone(),
                k: *k,
                order: v.order,
                subdivisions: 1,
                fd_step: None,
            };
            let (fam, quad) = args.build()?;
            let mut rng = ChaCha8Rng::seed_from_u64(v.seed);
            let mut r = Report::new("kt");
            let u = random_unitary(&mut rng, fam.n());
            let w = random_unitary(&mut rng, fam.n());
            r.absorb(kt_unitary_invariance_check(&fam, &u, &w, &quad)?);
            r.absorb(kt_self_consistency_check(&fam, &quad)?);
            if fam.n() == 1 {
                r.absorb(kt_involution_check(&fam, &quad)?);
            }
            let job = json!({"family": args.catalog()?, "k": k, "order": quad.order, "seed": v.seed});
            Outcome::verified(with_job(r, job))
        }
        VerifyCmd::Twisted { file: None } => suite_report(Suite::Twisted),
        VerifyCmd::Twisted { file: Some(f) } => {
            let fam = read_json::<FamilyJson>(f)?.to_family()?;
            let mut r = fam.validate_twisted();
            r.push(Check::exact("d_squared", total_complex(&fam).squares_to_zero()));
            r.name = "twisted".into();
            Outcome::verified(with_job(r, json!({"file": f})))
        }
        VerifyCmd::Transfer {
            file: None,
            families: None,
        } => suite_report(Suite::Transfer),
        VerifyCmd::Transfer { file, families } => {
            let cov: CoveringMap = match file {
                Some(f) => read_json(f)?,
                None => double_cover_scenario(v.seed, 2).0,
            };
            let mut r = Report::new("transfer");
            let mut rng = ChaCha8Rng::seed_from_u64(v.seed);
            for d in 0..cov.base().dim() {
                let c: SimplicialCochain<Q> =
                    SimplicialCochain::from_fn(cov.total(), d, |_| htorsion::rational::q(rng.gen_range(-5..=5)));
                let lhs = transfer_cochain(&cov, &c.coboundary(cov.total()))?;
                let rhs = transfer_cochain(&cov, &c)?.coboundary(cov.base());
                r.push(Check::exact(format!("coboundary/dim{d}"), lhs == rhs));
            }
            if let Some(f) = families {
                let assignment: FamilyAssignment = read_json(f)?;
                let quad = QuadratureSpec::new(opts.kt_order, 1)?;
                r.absorb(transfer_expansion_kt(&cov, &assignment, &quad)?);
            }
            Outcome::verified(with_job(r, json!({"file": file, "families": families, "seed": v.seed})))
        }
        VerifyCmd::Framing { k: None, .. } => suite_report(Suite::Framing),
        VerifyCmd::Framing { k: Some(k), model } => {
            let xi = match &model.file {
                Some(f) => read_json::<models::BundleFile>(f)?.to_model()?,
                None => htorsion::charclass::BundleModel::split_from_generators(
                    &htorsion::charclass::RingSpec::roots(model.rank.unwrap_or(1), "x", 4 * k),
                )?,
            };
            let real = xi.realify();
            let mut r = Report::new("framing");
            for n in [2 * xi.rank() as u32, 2 * xi.rank() as u32 + 1] {
                let data = MorseSectionData::sphere_bundle(&real, n)?;
                let reconstructed = htorsion::torsion::framing_correction(*k, &data)?.neg();
                let direct = htorsion::torsion::torsion_sphere_bundle(&real, n, *k)?;
                compare_checks(&mut r, &format!("sphere_n{n}"), &reconstructed, &direct, suite::FRAMING_TOL);
            }
            Outcome::verified(with_job(r, json!({"k": k, "rank": xi.rank(), "file": model.file})))
        }
        VerifyCmd::Unoriented { file, tol } => {
            let job: UnorientedJob = read_json(file)?;
            let base = file.parent().map(Path::to_path_buf).unwrap_or_else(here);
            let (plus, _) = job.plus.run(&base)?;
            let (minus, _) = job.minus.run(&base)?;
            let t2k = job.t2k.to_class()?;
            let r = unoriented_relations(&plus, &minus, &t2k, job.k, *tol)?;
            Outcome::verified(with_job(r, json!({"file": file})))
        }
    }
}

fn suite_job(s: Suite, opts: &SuiteOptions) -> Value {
    json!({"suite": s.name(), "seed": opts.seed, "perturb": opts.perturb, "kt_order": opts.kt_order})
}

fn twisted(cmd: &TwistedCmd) -> Result<Outcome, CliError> {
    match cmd {
        TwistedCmd::Validate { file } => {
            let fam = read_json::<FamilyJson>(file)?.to_family()?;
            Outcome::verified(with_job(fam.validate_twisted(), json!({"file": file})))
        }
        TwistedCmd::Homology { file } => {
            let fam = read_json::<FamilyJson>(file)?.to_family()?;
            let cx = total_complex(&fam);
            let fiber = fiber_homology(fam.poset(), fam.phi(&[0]));
            let base = fam.base().betti_numbers();
            let total = if cx.squares_to_zero() { Some(homology_ranks(&cx)?) } else { None };
            Outcome::computed(&json!({
                "d_squared_zero": cx.squares_to_zero(),
                "fiber": fiber,
                "base": base,
                "untwisted_prediction": kunneth(&base, &fiber),
                "total": total,
            }))
        }
        TwistedCmd::Split { file, closed } => {
            let fam = read_json::<FamilyJson>(file)?.to_family()?;
            let idx = closed
                .iter()
                .map(|id| {
                    fam.poset()
                        .index_of(id)
                        .ok_or_else(|| CliError::usage(format!("no element {id:?} in the poset")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let out = kill_cross_term(&fam, &idx)?;
            Outcome::computed(&json!({
                "family": FamilyJson::from_family(&out.family),
                "witness": out.witness.to_f64(),
                "homotopy": out.homotopy.as_ref().map(FamilyJson::from_family),
            }))
        }
        TwistedCmd::Example {
            k,
            pairs,
            extension,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            if *extension {
                let (fam, qs) = suite::random_extension(&mut rng)?;
                let ids: Vec<&str> = qs.iter().map(|&i| fam.poset().elements()[i].id.as_str()).collect();
                let mut out = Outcome::computed(&FamilyJson::from_family(&fam))?;
                out.summary = Some(format!("closed subset: {}", ids.join(",")));
                return Ok(out);
            }
            Outcome::computed(&FamilyJson::from_family(&random_solved_family(&mut rng, *k, *pairs)))
        }
    }
}

fn transfer(cmd: &TransferCmd) -> Result<Outcome, CliError> {
    match cmd {
        TransferCmd::Cochain { file, cochain, pullback: back } => {
            let cov: CoveringMap = read_json(file)?;
            let c: CochainJson = read_json(cochain)?;
            let out = if *back {
                pullback(&cov, &c.to_cochain(cov.base())?)?
            } else {
                transfer_cochain(&cov, &c.to_cochain(cov.total())?)?
            };
            Outcome::computed(&CochainJson::from_cochain(&out))
        }
        TransferCmd::Check {
            file,
            cochain,
            dim,
            seed,
        } => {
            let sheets: GradedSheets = read_json(file)?;
            let base = sheets
                .base()
                .cloned()
                .ok_or_else(|| CliError::model("the sheet list is empty"))?;
            let c = match cochain {
                Some(p) => read_json::<CochainJson>(p)?.to_cochain(&base)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    SimplicialCochain::from_fn(&base, *dim, |_| htorsion::rational::q(rng.gen_range(-9..=9)))
                }
            };
            let r = euler_multiplication_check(&sheets, &c)?;
            Outcome::verified(with_job(r, json!({"file": file, "dim": c.dim(), "seed": seed})))
        }
        TransferCmd::Example { kind, index, seed } => match kind {
            TransferExample::Covering => Outcome::computed(&double_cover_scenario(*seed, 2).0),
            TransferExample::Families => Outcome::computed(&double_cover_scenario(*seed, 2).1),
            TransferExample::Sheets => {
                let fixtures = euler_fixtures();
                let (_, sheets) = fixtures
                    .get(*index)
                    .ok_or_else(|| CliError::usage(format!("there are {} sheet fixtures", fixtures.len())))?;
                Outcome::computed(sheets)
            }
        },
    }
}

/// A library operation and a command line that reaches it. Arguments may
/// name files `{dir}/<name>.json` that the `setup` commands create first.
pub struct RegistryEntry {
    pub operation: &'static str,
    pub args: &'static [&'static str],
}

/// Commands that write the fixture files used by [`REGISTRY`].
pub const SETUP: &[(&str, &[&str])] = &[
    ("family", &["twisted", "example", "--k", "2"]),
    ("extension", &["twisted", "example", "--extension"]),
    ("covering", &["transfer", "example", "covering"]),
    ("families", &["transfer", "example", "families"]),
    ("sheets", &["transfer", "example", "sheets", "--index", "2"]),
];

pub const REGISTRY: &[RegistryEntry] = &[
    RegistryEntry { operation: "torsion_circle_bundle", args: &["torsion", "circle", "--k", "2", "--m", "3", "--z", "1/3"] },
    RegistryEntry { operation: "torsion_lens_bundle", args: &["torsion", "lens", "--rank", "2", "--m", "2", "--z", "-1", "--k", "2"] },
    RegistryEntry { operation: "torsion_lens_via_splitting", args: &["verify", "lens", "--rank", "3", "--m", "4", "--z", "i", "--k", "2"] },
    RegistryEntry { operation: "torsion_sphere_bundle", args: &["torsion", "sphere", "--rank", "2", "--k", "1"] },
    RegistryEntry { operation: "framing_correction", args: &["torsion", "projective", "--rank", "2", "--k", "1"] },
    RegistryEntry { operation: "complex_framing_pushdown", args: &["torsion", "projective", "--rank", "2", "--k", "1", "--m", "3", "--z", "1/3", "--complex"] },
    RegistryEntry { operation: "complex_torsion_closed", args: &["torsion", "complex", "--k", "2", "--m", "2", "--z", "-1"] },
    RegistryEntry { operation: "real_even_closed", args: &["verify", "--suite", "lens"] },
    RegistryEntry { operation: "verify_complex_transfer", args: &["verify", "lens"] },
    RegistryEntry { operation: "torsion_combinators", args: &["torsion", "combine", "--file", "{dir}/combine.json"] },
    RegistryEntry { operation: "boundary_corrected_complex_torsion", args: &["torsion", "combine", "--file", "{dir}/boundary.json"] },
    RegistryEntry { operation: "unoriented_relations", args: &["verify", "unoriented", "--file", "{dir}/unoriented.json"] },
    RegistryEntry { operation: "verify_distribution", args: &["verify", "polylog", "--k", "2", "--m", "2", "--z", "1"] },
    RegistryEntry { operation: "polylog_l", args: &["verify", "polylog"] },
    RegistryEntry { operation: "verify_newton", args: &["verify", "newton", "--k", "3"] },
    RegistryEntry { operation: "half_ch_via_pontryagin", args: &["verify", "--suite", "newton"] },
    RegistryEntry { operation: "kt_cochain", args: &["kt", "eval", "--family", "planar_rotation_ramp", "--params", r#"{"angles":[0,0.6,0.3],"log_scales":[[0,0],[0.3,-0.2],[0.1,0.2]],"phases":[0,0.4,-0.3]}"#, "--k", "1", "--order", "8"] },
    RegistryEntry { operation: "kt_unitary_invariance_check", args: &["verify", "--order", "8", "kt", "--family", "random_smooth", "--params", r#"{"seed":3,"n":2}"#, "--k", "1"] },
    RegistryEntry { operation: "kt_direct_sum_check", args: &["verify", "--order", "8", "kt"] },
    RegistryEntry { operation: "validate_twisted", args: &["twisted", "validate", "--file", "{dir}/family.json"] },
    RegistryEntry { operation: "homology_ranks", args: &["twisted", "homology", "--file", "{dir}/family.json"] },
    RegistryEntry { operation: "kill_cross_term", args: &["twisted", "split", "--file", "{dir}/extension.json", "--closed", "e0"] },
    RegistryEntry { operation: "twisted_tensor_product", args: &["verify", "twisted", "--file", "{dir}/family.json"] },
    RegistryEntry { operation: "transfer_cochain", args: &["transfer", "cochain", "--file", "{dir}/covering.json", "--cochain", "{dir}/cochain.json"] },
    RegistryEntry { operation: "pullback", args: &["transfer", "cochain", "--file", "{dir}/covering.json", "--cochain", "{dir}/base_cochain.json", "--pullback"] },
    RegistryEntry { operation: "euler_multiplication_check", args: &["transfer", "check", "--file", "{dir}/sheets.json"] },
    RegistryEntry { operation: "transfer_expansion_kt", args: &["verify", "--order", "8", "transfer", "--file", "{dir}/covering.json", "--families", "{dir}/families.json"] },
    RegistryEntry { operation: "run_suite", args: &["verify", "--suite", "framing"] },
];

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_tree_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn registry_commands_parse() {
        for entry in REGISTRY {
            let argv = std::iter::once("htorsion").chain(entry.args.iter().copied());
            Cli::try_parse_from(argv).unwrap_or_else(|e| panic!("{}: {e}", entry.operation));
        }
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        let e: CliError = htorsion::Error::Domain("k".into()).into();
        assert_eq!(e.code, EXIT_USAGE);
        let e: CliError = htorsion::Error::Parse("x".into()).into();
        assert_eq!(e.code, EXIT_MODEL);
    }
}
