//! Named verification suites. Each suite runs the invariant checks of one
//! module on built-in, seeded fixtures and collects them in a [`Report`].
//!
//! A suite never returns an error: a failing computation is recorded as a
//! failing check whose name carries the error message. With
//! [`SuiteOptions::perturb`] set, every suite also runs one deliberately
//! corrupted fixture whose record is named `perturbed/...` and fails.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charclass::{
    chern_character_component, half_ch_complexification, half_ch_via_pontryagin, verify_newton, BundleModel,
    RingClass, RingSpec,
};
use crate::error::{Error, Result};
use crate::kamber_tondeur::{
    catalog_fixtures, kt_cochain, kt_direct_sum_check, kt_involution_check, kt_self_consistency_check,
    kt_unitary_invariance_check, random_unitary, scalar_fixtures, CMatrix, MatrixFamily, QuadratureSpec, C64,
    KT_TOL,
};
use crate::linalg::QMatrix;
use crate::polylog::{polylog_l, riemann_zeta_odd, verify_distribution, RootOfUnity};
use crate::rational::{self, q, Q};
use crate::report::{Check, Report};
use crate::simplicial::SimplicialBase;
use crate::torsion::{
    compare_checks, complex_framing_pushdown, complex_torsion_closed, framing_correction, real_even_closed,
    torsion_lens_bundle, torsion_lens_via_splitting, torsion_sphere_bundle, verify_complex_transfer,
    verify_lens_paths, Constant, MorseSectionData, TorsionClass,
};
use crate::transfer::{
    cyclic_cover_of_hexagon, double_cover_scenario, euler_fixtures, euler_multiplication_check, pullback,
    pushdown_alternating, transfer_cochain, transfer_expansion_kt, CoveringMap, SimplicialCochain,
};
use crate::twisted::fixtures::{random_base, random_complex, random_gauge_family, random_solved_family};
use crate::twisted::{
    fiber_homology, homology_ranks, kill_cross_term, kunneth, total_complex, DeltaFamily, GradedPoset,
};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Polylog,
    Newton,
    Lens,
    Kt,
    Twisted,
    Transfer,
    Framing,
    All,
}

impl Suite {
    /// Every suite except `All`, in the order `All` runs them.
    pub const MODULES: [Suite; 7] = [
        Suite::Newton,
        Suite::Polylog,
        Suite::Lens,
        Suite::Framing,
        Suite::Twisted,
        Suite::Transfer,
        Suite::Kt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Polylog => "polylog",
            Suite::Newton => "newton",
            Suite::Lens => "lens",
            Suite::Kt => "kt",
            Suite::Twisted => "twisted",
            Suite::Transfer => "transfer",
            Suite::Framing => "framing",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::MODULES
            .iter()
            .chain(std::iter::once(&Suite::All))
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Add one corrupted fixture per suite.
    pub perturb: bool,
    /// Gauss-Legendre order for the Kamber-Tondeur integrals.
    pub kt_order: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            perturb: false,
            kt_order: QuadratureSpec::default().order,
        }
    }
}

impl SuiteOptions {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn quadrature(&self) -> Result<QuadratureSpec> {
        QuadratureSpec::new(self.kt_order, 1)
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Report {
    let mut report = match suite {
        Suite::Polylog => polylog_suite(opts),
        Suite::Newton => newton_suite(opts),
        Suite::Lens => lens_suite(opts),
        Suite::Kt => kt_suite(opts),
        Suite::Twisted => twisted_suite(opts),
        Suite::Transfer => transfer_suite(opts),
        Suite::Framing => framing_suite(opts),
        Suite::All => {
            let mut all = Report::new("all");
            for s in Suite::MODULES {
                all.absorb(run_suite(s, opts));
            }
            all
        }
    };
    report.name = suite.name().to_string();
    report
}

/// Runs `f` and absorbs its report, or records its error as a failure.
fn absorb_or_fail(report: &mut Report, name: &str, f: impl FnOnce() -> Result<Report>) {
    match f() {
        Ok(mut r) => {
            r.name = name.to_string();
            report.absorb(r);
        }
        Err(e) => report.push(Check::exact(format!("{name}/error: {e}"), false)),
    }
}

fn ring_size(c: &RingClass) -> f64 {
    rational::to_f64(&c.max_abs_coefficient())
}

fn exact_ring_check(name: String, lhs: &RingClass, rhs: &RingClass) -> Check {
    let mut c = Check::exact(name, lhs == rhs);
    c.lhs = ring_size(lhs);
    c.rhs = ring_size(rhs);
    c
}

fn roots_of_order_at_most(n: u64) -> Vec<RootOfUnity> {
    let mut out: Vec<RootOfUnity> = Vec::new();
    for m in 1..=n {
        for z in RootOfUnity::all_of_order_dividing(m) {
            if !out.iter().any(|w| w.reduced() == z.reduced()) {
                out.push(z);
            }
        }
    }
    out
}

fn root_tag(z: RootOfUnity) -> String {
    let (m, j) = z.reduced();
    format!("{j}_{m}")
}

/// A realification `xi` whose Chern roots are random integer combinations
/// of `gens` degree-2 generators.
pub fn random_realification(rng: &mut ChaCha8Rng, gens: usize, rank: usize, truncation: u32) -> Result<BundleModel> {
    let spec = RingSpec::roots(gens, "x", truncation);
    let roots = (0..rank)
        .map(|_| random_linear(rng, &spec))
        .collect::<Result<Vec<_>>>()?;
    BundleModel::realification(&spec, roots)
}

fn random_linear(rng: &mut ChaCha8Rng, spec: &Arc<RingSpec>) -> Result<RingClass> {
    let mut x = RingClass::zero(spec);
    for i in 0..spec.generators().len() {
        let c = rng.gen_range(-2..=2);
        x = x.add(&RingClass::generator_at(spec, i).scale(&q(c)))?;
    }
    Ok(x)
}

fn random_complex_bundle(rng: &mut ChaCha8Rng, gens: usize, rank: usize, truncation: u32) -> Result<BundleModel> {
    let spec = RingSpec::roots(gens, "x", truncation);
    let roots = (0..rank)
        .map(|_| random_linear(rng, &spec))
        .collect::<Result<Vec<_>>>()?;
    BundleModel::complex(&spec, roots)
}

fn split_complex(rank: usize, truncation: u32) -> Result<BundleModel> {
    BundleModel::split_from_generators(&RingSpec::roots(rank, "x", truncation))
}

/// The bundle with its first root doubled.
fn doubled_first_root(xi: &BundleModel) -> Result<BundleModel> {
    let mut roots = xi.roots().to_vec();
    roots[0] = roots[0].scale(&q(2));
    BundleModel::new(xi.spec(), roots, xi.kind())
}

/// Newton's identity in up to four variables, and `1/2 ch_{2k}(xi (x) C)`
/// against `N_k(p_1, ...) / (2k)!` on 20 seeded realification models.
pub fn newton_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("newton");
    for k in 1..=4 {
        for nvars in 1..=4 {
            report.push(Check::exact(format!("newton_identity/k{k}_n{nvars}"), verify_newton(k, nvars)));
        }
    }
    let mut rng = opts.rng(1);
    for model in 0..20 {
        let gens = rng.gen_range(1..=3);
        let rank = rng.gen_range(1..=4);
        absorb_or_fail(&mut report, &format!("pontryagin/model{model}"), || {
            let xi = random_realification(&mut rng, gens, rank, 16)?;
            let mut r = Report::new("");
            for k in 1..=4 {
                let lhs = half_ch_complexification(&xi, k)?;
                let rhs = half_ch_via_pontryagin(&xi, k)?;
                r.push(exact_ring_check(format!("rank{rank}_k{k}"), &lhs, &rhs));
            }
            Ok(r)
        });
    }
    if opts.perturb {
        absorb_or_fail(&mut report, "perturbed", || {
            let xi = split_complex(1, 16)?.realify();
            let lhs = half_ch_complexification(&xi, 1)?;
            let rhs = half_ch_via_pontryagin(&doubled_first_root(&xi)?, 1)?;
            let mut r = Report::new("");
            r.push(exact_ring_check("pontryagin_doubled_root".into(), &lhs, &rhs));
            Ok(r)
        });
    }
    report
}

pub const DISTRIBUTION_TOL: f64 = 1e-10;
pub const ZETA_TOL: f64 = 1e-12;

/// The distribution relation for `k <= 6`, `m = 2..=5` and `z` of order at
/// most 6, and `L_{2k+1}(1) = (-1)^k zeta(2k+1)`.
pub fn polylog_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("polylog");
    for k in 1..=6u32 {
        for m in 2..=5u64 {
            for z in roots_of_order_at_most(6) {
                let name = format!("distribution/k{k}_m{m}_z{}", root_tag(z));
                match verify_distribution(k, m, z, DISTRIBUTION_TOL) {
                    Ok(d) => report.push(Check::with_diff(name, d.lhs, d.rhs, d.diff, d.tol)),
                    Err(e) => report.push(Check::exact(format!("{name}/error: {e}"), false)),
                }
            }
        }
    }
    for k in 1..=3u32 {
        let name = format!("zeta/k{k}");
        match polylog_l(2 * k, RootOfUnity::one()) {
            Ok(v) => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                report.push(Check::close(name, v.value, sign * riemann_zeta_odd(k), ZETA_TOL));
            }
            Err(e) => report.push(Check::exact(format!("{name}/error: {e}"), false)),
        }
    }
    if opts.perturb {
        // the relation with m^k replaced by (m + 1)^k
        let z = RootOfUnity::new(3, 1).expect("valid root");
        let (k, m) = (2u32, 2u64);
        let lhs = polylog_l(k, z).map(|v| v.value).unwrap_or(f64::NAN);
        let rhs: f64 = z
            .rth_roots(m)
            .into_iter()
            .map(|w| polylog_l(k, w).map(|v| v.value).unwrap_or(f64::NAN))
            .sum::<f64>()
            * ((m + 1) as f64).powi(k as i32);
        report.push(Check::close("perturbed/distribution_wrong_scale", lhs, rhs, DISTRIBUTION_TOL));
    }
    report
}

pub const LENS_TOL: f64 = 1e-12;
pub const COMPLEX_REAL_TOL: f64 = 1e-12;
pub const COMPLEX_TRANSFER_TOL: f64 = 1e-10;

/// Lens bundle torsion directly and through the circle bundles of the
/// Chern roots, for rank `<= 4`, `m <= 5`, `k <= 4` and every `z^m = 1`.
pub fn lens_paths_report(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("lens_paths");
    let mut rng = opts.rng(3);
    for rank in 1..=4usize {
        let gens = rng.gen_range(1..=3);
        let models = [("split", split_complex(rank, 8)), ("random", random_complex_bundle(&mut rng, gens, rank, 8))];
        for (label, xi) in models {
            let xi = match xi {
                Ok(xi) => xi,
                Err(e) => {
                    report.push(Check::exact(format!("{label}_rank{rank}/error: {e}"), false));
                    continue;
                }
            };
            for m in 1..=5u64 {
                for z in RootOfUnity::all_of_order_dividing(m) {
                    for k in 1..=4 {
                        absorb_or_fail(&mut report, label, || verify_lens_paths(&xi, m, k, z, z.is_one(), LENS_TOL));
                    }
                }
            }
        }
    }
    report
}

/// A homogeneous class of degree `2 * degree_over_two` in `Q[a, p]` with
/// `|a| = 2` and `|p| = 4`.
fn random_characteristic_class(rng: &mut ChaCha8Rng, half_degree: u32) -> Result<RingClass> {
    let spec = RingSpec::with(&[("a", 2), ("p", 4)], 2 * half_degree)?;
    let a = RingClass::generator(&spec, "a")?;
    let p = RingClass::generator(&spec, "p")?;
    let mut out = RingClass::zero(&spec);
    for i in 0..=half_degree / 2 {
        let c = q(rng.gen_range(-3..=3));
        out = out.add(&a.pow(half_degree - 2 * i).mul(&p.pow(i))?.scale(&c))?;
    }
    if out.is_zero() {
        out = a.pow(half_degree);
    }
    Ok(out)
}

/// `complex_torsion_closed` at `m = 1`, `zeta = 1` against
/// `real_even_closed` on the same `T_{2k}`.
pub fn complex_real_report(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("complex_vs_real");
    let mut rng = opts.rng(4);
    for k in 1..=4u32 {
        absorb_or_fail(&mut report, &format!("k{k}"), || {
            let t2k = random_characteristic_class(&mut rng, 2 * k)?;
            let lhs = complex_torsion_closed(&t2k, 2 * k, 1, RootOfUnity::one(), true)?;
            let rhs = real_even_closed(&t2k, k)?;
            let mut r = Report::new("");
            compare_checks(&mut r, "closed", &lhs, &rhs, COMPLEX_REAL_TOL);
            Ok(r)
        });
    }
    report
}

/// The transfer relation for `k <= 4`, `m <= 3`, `r` in `{2, 3}` and every
/// `z^m = 1`.
pub fn complex_transfer_report(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("complex_transfer");
    let mut rng = opts.rng(5);
    for k in 1..=4u32 {
        let tk = match random_characteristic_class(&mut rng, k) {
            Ok(t) => t,
            Err(e) => {
                report.push(Check::exact(format!("k{k}/error: {e}"), false));
                continue;
            }
        };
        for m in 1..=3u64 {
            for z in RootOfUnity::all_of_order_dividing(m) {
                for r in [2u64, 3] {
                    absorb_or_fail(&mut report, "relation", || {
                        verify_complex_transfer(&tk, k, m, r, z, z.is_one(), COMPLEX_TRANSFER_TOL)
                    });
                }
            }
        }
    }
    report
}

pub fn lens_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("lens");
    report.absorb(lens_paths_report(opts));
    report.absorb(complex_real_report(opts));
    report.absorb(complex_transfer_report(opts));
    if opts.perturb {
        absorb_or_fail(&mut report, "perturbed", || {
            let xi = split_complex(2, 8)?;
            let z = RootOfUnity::new(2, 1)?;
            let lhs = torsion_lens_bundle(&xi, 2, 2, z, false)?;
            let rhs = torsion_lens_via_splitting(&doubled_first_root(&xi)?, 2, 2, z, false)?;
            let mut r = Report::new("");
            compare_checks(&mut r, "lens_doubled_root", &lhs, &rhs, LENS_TOL);
            Ok(r)
        });
    }
    report
}

pub const FRAMING_TOL: f64 = 1e-12;

fn sphere_model_report(xi: &BundleModel, n: u32, k: u32, direct_of: &BundleModel) -> Result<Report> {
    let data = MorseSectionData::sphere_bundle(xi, n)?;
    // the disk bundle relative to its boundary carries the opposite sign
    let reconstructed = framing_correction(k, &data)?.neg();
    let direct = torsion_sphere_bundle(direct_of, n, k)?;
    let mut r = Report::new("");
    compare_checks(&mut r, &format!("rank{}_n{n}_k{k}", xi.rank()), &reconstructed, &direct, FRAMING_TOL);
    Ok(r)
}

fn projective_model_report(xi: &BundleModel, k: u32) -> Result<Report> {
    let end = xi.end()?;
    let data = MorseSectionData::projective_bundle(xi)?;
    let mut r = Report::new("");
    let tag = format!("rank{}_k{k}", xi.rank());

    let half = if k.is_multiple_of(2) { rational::frac(1, 2) } else { rational::frac(-1, 2) };
    let body = chern_character_component(&end, 2 * k)?.scale(&half);
    let expected = TorsionClass::single(2 * k, 1, RootOfUnity::one(), Constant::zeta_odd(k), body, "closed")?;
    compare_checks(&mut r, &format!("real/{tag}"), &framing_correction(k, &data)?, &expected, FRAMING_TOL);

    let z = RootOfUnity::new(3, 1)?;
    let body = chern_character_component(&end, k)?.scale(&(q(3).pow(k as i32) / q(2)));
    let expected = TorsionClass::single(k, 3, z, Constant::polylog(k, z)?, body, "closed")?;
    compare_checks(
        &mut r,
        &format!("complex/{tag}"),
        &complex_framing_pushdown(k, 3, z, &data, false)?,
        &expected,
        FRAMING_TOL,
    );
    Ok(r)
}

/// Framing corrections on the sphere bundle and projective bundle section
/// models against the closed forms, rank `<= 3`, `k <= 3`.
pub fn framing_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("framing");
    for rank in 1..=3usize {
        let xi = match split_complex(rank, 12) {
            Ok(xi) => xi,
            Err(e) => {
                report.push(Check::exact(format!("rank{rank}/error: {e}"), false));
                continue;
            }
        };
        let real = xi.realify();
        for n in [2 * rank as u32, 2 * rank as u32 + 1] {
            for k in 1..=3 {
                absorb_or_fail(&mut report, "sphere", || sphere_model_report(&real, n, k, &real));
            }
        }
        for k in 1..=3 {
            absorb_or_fail(&mut report, "projective", || projective_model_report(&xi, k));
        }
    }
    if opts.perturb {
        absorb_or_fail(&mut report, "perturbed", || {
            let real = split_complex(1, 12)?.realify();
            let wrong = doubled_first_root(&real)?;
            sphere_model_report(&real, 2, 1, &wrong)
        });
    }
    report
}

pub const LOG_DET_TOL: f64 = 1e-10;
pub const MAX_LOG_DET_CONDITION: f64 = 1e3;

fn condition_number(m: &CMatrix) -> f64 {
    let s = m.clone().svd(false, false).singular_values;
    s.max() / s.min()
}

/// Random complex `n x n` matrices with condition number below `cap`.
pub fn random_well_conditioned(rng: &mut ChaCha8Rng, n: usize, cap: f64) -> CMatrix {
    loop {
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        if condition_number(&m) < cap {
            return m;
        }
    }
}

fn log_det_report(opts: &SuiteOptions, quad: &QuadratureSpec) -> Result<Report> {
    let mut rng = opts.rng(7);
    let mut r = Report::new("");
    for i in 0..20 {
        let n = rng.gen_range(1..=4);
        let m = random_well_conditioned(&mut rng, n, MAX_LOG_DET_CONDITION);
        let expected = m.determinant().norm().ln();
        let value = kt_cochain(&MatrixFamily::constant(0, m)?, quad)?.value;
        r.push(Check::close(format!("matrix{i}_n{n}"), value, expected, LOG_DET_TOL));
    }
    Ok(r)
}

fn constant_vanishing_report(opts: &SuiteOptions, quad: &QuadratureSpec) -> Result<Report> {
    let mut rng = opts.rng(8);
    let mut r = Report::new("");
    for i in 0..5 {
        let n = rng.gen_range(1..=3);
        let m = random_well_conditioned(&mut rng, n, MAX_LOG_DET_CONDITION);
        let value = kt_cochain(&MatrixFamily::constant(1, m)?, quad)?.value;
        r.push(Check::close(format!("matrix{i}_n{n}"), value, 0.0, KT_TOL));
    }
    Ok(r)
}

/// The Kamber-Tondeur invariants: `c_0 = log|det f|`, additivity, unitary
/// invariance, vanishing on constant families, the sign under
/// `f -> conj(f)^{-1}` for scalars and stability under order doubling.
pub fn kt_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("kt");
    let quad = match opts.quadrature() {
        Ok(q) => q,
        Err(e) => {
            report.push(Check::exact(format!("quadrature/error: {e}"), false));
            return report;
        }
    };
    absorb_or_fail(&mut report, "log_det", || log_det_report(opts, &quad));
    absorb_or_fail(&mut report, "constant_vanishes", || constant_vanishing_report(opts, &quad));

    let fixtures = catalog_fixtures(1);
    let mut rng = opts.rng(9);
    for (i, (name, fam)) in fixtures.iter().enumerate() {
        let (other_name, other) = &fixtures[(i + 1) % fixtures.len()];
        absorb_or_fail(&mut report, &format!("additivity/{name}+{other_name}"), || {
            kt_direct_sum_check(fam, other, &quad)
        });
        let u = random_unitary(&mut rng, fam.n());
        let v = random_unitary(&mut rng, fam.n());
        absorb_or_fail(&mut report, &format!("unitary_invariance/{name}"), || {
            kt_unitary_invariance_check(fam, &u, &v, &quad)
        });
        absorb_or_fail(&mut report, &format!("order_doubling/{name}"), || kt_self_consistency_check(fam, &quad));
    }
    for k in 0..=1 {
        for (name, fam) in scalar_fixtures(k) {
            absorb_or_fail(&mut report, &format!("involution/k{k}_{name}"), || kt_involution_check(&fam, &quad));
        }
    }
    if opts.perturb {
        absorb_or_fail(&mut report, "perturbed", || {
            let fam = MatrixFamily::constant(0, CMatrix::from_element(1, 1, C64::new(2.0, 0.0)))?;
            let flipped = kt_cochain(&fam.inverse_adjoint(), &quad)?.value;
            let mut r = Report::new("");
            r.push(Check::close("involution_without_sign", flipped, kt_cochain(&fam, &quad)?.value, KT_TOL));
            Ok(r)
        });
    }
    report
}

/// Transfer along the antipodal double cover of the projective plane against
/// the sum over lifts of the Kamber-Tondeur cochains, `k = 1`, `2 x 2`
/// vertex-edge families.
pub fn transfer_kt_report(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("transfer_kt");
    absorb_or_fail(&mut report, "double_cover", || {
        let (cov, assignment) = double_cover_scenario(opts.seed, 2);
        transfer_expansion_kt(&cov, &assignment, &opts.quadrature()?)
    });
    report
}

/// `p_* p^* = chi` on random integer cochains over the graded sheet
/// fixtures.
pub fn euler_report(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("euler");
    let mut rng = opts.rng(10);
    for (chi, sheets) in euler_fixtures() {
        let Some(base) = sheets.base().cloned() else {
            continue;
        };
        for d in 0..=base.dim() {
            let c: SimplicialCochain<Q> = SimplicialCochain::from_fn(&base, d, |_| q(rng.gen_range(-9..=9)));
            absorb_or_fail(&mut report, &format!("chi{chi}_dim{d}"), || euler_multiplication_check(&sheets, &c));
        }
    }
    report
}

fn coboundary_report(opts: &SuiteOptions) -> Result<Report> {
    let mut rng = opts.rng(11);
    let (cov, _) = double_cover_scenario(opts.seed, 1);
    let covers: Vec<(&str, CoveringMap)> = vec![
        ("hexagon_triple", cyclic_cover_of_hexagon(3)?),
        ("projective_plane", cov),
        ("tetrahedron_trivial", CoveringMap::trivial(&SimplicialBase::tetrahedron_boundary(), 2)?),
    ];
    let mut r = Report::new("");
    for (name, cov) in &covers {
        for d in 0..cov.base().dim() {
            let c: SimplicialCochain<Q> = SimplicialCochain::from_fn(cov.total(), d, |_| q(rng.gen_range(-5..=5)));
            let lhs = transfer_cochain(cov, &c.coboundary(cov.total()))?;
            let rhs = transfer_cochain(cov, &c)?.coboundary(cov.base());
            r.push(Check::exact(format!("{name}_dim{d}"), lhs == rhs));
            let back = transfer_cochain(cov, &pullback(cov, &transfer_cochain(cov, &c)?)?)?;
            let degree = cov.degree_over(&cov.base().simplices(0)[0]) as i64;
            let expected = transfer_cochain(cov, &c)?.scale(&q(degree));
            r.push(Check::exact(format!("{name}_dim{d}_degree"), back == expected));
        }
    }
    Ok(r)
}

pub fn transfer_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("transfer");
    absorb_or_fail(&mut report, "coboundary", || coboundary_report(opts));
    report.absorb(euler_report(opts));
    report.absorb(transfer_kt_report(opts));
    if opts.perturb {
        absorb_or_fail(&mut report, "perturbed", || {
            let (chi, sheets) = euler_fixtures().remove(0);
            let base = sheets.base().cloned().ok_or_else(|| Error::Precondition("no sheets".into()))?;
            let c: SimplicialCochain<Q> = SimplicialCochain::from_fn(&base, 0, |_| q(1));
            let pulled = sheets
                .sheets()
                .iter()
                .map(|s| pullback(&s.covering, &c))
                .collect::<Result<Vec<_>>>()?;
            let pushed = pushdown_alternating(&sheets, &pulled)?;
            let mut r = Report::new("");
            let claimed = c.scale(&q(chi + 1));
            let mut check = Check::exact("euler_claimed_chi_plus_one", pushed == claimed);
            check.lhs = pushed.max_abs();
            check.rhs = claimed.max_abs();
            r.push(check);
            Ok(r)
        });
    }
    report
}

fn trimmed(mut v: Vec<usize>) -> Vec<usize> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn ranks_check(name: String, lhs: &[usize], rhs: &[usize]) -> Check {
    let mut c = Check::exact(name, lhs == rhs);
    c.lhs = lhs.iter().sum::<usize>() as f64;
    c.rhs = rhs.iter().sum::<usize>() as f64;
    c
}

/// A family over the point whose fiber is `Q` below an acyclic `S`, with a
/// random cross term `f = d_Q h - h d_S`. Returns the family and `Q`.
pub fn random_extension(rng: &mut ChaCha8Rng) -> Result<(DeltaFamily, Vec<usize>)> {
    let (q_pairs, q_free, s_pairs) = (rng.gen_range(0..=2), rng.gen_range(1..=2), rng.gen_range(1..=2));
    let (pq, dq, _) = random_complex(rng, q_pairs, q_free, 2, false);
    let (ps, ds, _) = random_complex(rng, s_pairs, 0, 2, false);
    let (nq, ns) = (pq.len(), ps.len());
    let degrees: Vec<u32> = (0..nq).map(|i| pq.degree(i)).chain((0..ns).map(|i| ps.degree(i))).collect();
    let poset = GradedPoset::chain(&degrees);
    let qs: Vec<usize> = (0..nq).collect();
    let ss: Vec<usize> = (nq..nq + ns).collect();
    let mut h = QMatrix::zeros(nq, ns);
    for y in 0..nq {
        for x in 0..ns {
            if pq.degree(y) == ps.degree(x) {
                h.set(y, x, q(rng.gen_range(-2..=2)));
            }
        }
    }
    let f = &(&dq * &h) - &(&h * &ds);
    let mut d = QMatrix::zeros(nq + ns, nq + ns);
    d.place(&qs, &qs, &dq);
    d.place(&ss, &ss, &ds);
    d.place(&qs, &ss, &f);
    Ok((DeltaFamily::constant(SimplicialBase::point(), poset, d)?, qs))
}

/// `d^2 = 0` on twisted tensor products of solved, gauge and untwisted
/// families, the Kunneth formula for untwisted families on random bases,
/// and invariance of the homology under `kill_cross_term`.
pub fn twisted_suite(opts: &SuiteOptions) -> Report {
    let mut report = Report::new("twisted");
    let mut rng = opts.rng(12);

    for k in 1..=3 {
        for i in 0..2 {
            let fam = random_solved_family(&mut rng, k, 2);
            let tag = format!("solved_k{k}_{i}");
            report.absorb(Report {
                name: format!("defining_equation/{tag}"),
                ..fam.validate_twisted()
            });
            report.push(Check::exact(format!("d_squared/{tag}"), total_complex(&fam).squares_to_zero()));
        }
    }
    for i in 0..5 {
        let base = random_base(&mut rng, 6);
        let (poset, d, _) = random_complex(&mut rng, 2, 1, 2, false);
        let fam = random_gauge_family(&mut rng, base, poset, &d);
        report.push(Check::exact(format!("d_squared/gauge_{i}"), total_complex(&fam).squares_to_zero()));
    }
    for i in 0..10 {
        let name = format!("kunneth/case{i}");
        let base = random_base(&mut rng, 6);
        let pairs = rng.gen_range(0..=2);
        let free = rng.gen_range(1..=3);
        let (poset, d, betti) = random_complex(&mut rng, pairs, free, 2, false);
        let fam = match DeltaFamily::constant(base.clone(), poset, d) {
            Ok(f) => f,
            Err(e) => {
                report.push(Check::exact(format!("{name}/error: {e}"), false));
                continue;
            }
        };
        let cx = total_complex(&fam);
        report.push(Check::exact(format!("d_squared/untwisted_{i}"), cx.squares_to_zero()));
        report.push(ranks_check(
            format!("{name}/fiber"),
            &trimmed(fiber_homology(fam.poset(), fam.phi(&[0]))),
            &trimmed(betti.clone()),
        ));
        match homology_ranks(&cx) {
            Ok(total) => report.push(ranks_check(
                name,
                &trimmed(total),
                &trimmed(kunneth(&base.betti_numbers(), &betti)),
            )),
            Err(e) => report.push(Check::exact(format!("{name}/error: {e}"), false)),
        }
    }
    for i in 0..5 {
        absorb_or_fail(&mut report, &format!("kill_cross_term/case{i}"), || {
            let (fam, qs) = random_extension(&mut rng)?;
            let before = homology_ranks(&total_complex(&fam))?;
            let out = kill_cross_term(&fam, &qs)?;
            let after = homology_ranks(&total_complex(&out.family))?;
            let mut r = Report::new("");
            r.push(ranks_check("ranks".into(), &after, &before));
            r.push(Check::exact("defining_equation", out.family.is_valid()));
            if let Some(h) = &out.homotopy {
                r.push(Check::exact("homotopy", h.is_valid()));
            }
            Ok(r)
        });
    }
    if opts.perturb {
        let fam = random_solved_family(&mut rng, 2, 2);
        match fam.perturbed(&[0, 1, 2]) {
            Some(bad) => report.absorb(Report {
                name: "perturbed".into(),
                ..bad.validate_twisted()
            }),
            None => report.push(Check::exact("perturbed/no_admissible_entry", false)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteOptions {
        SuiteOptions {
            kt_order: 6,
            ..SuiteOptions::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::MODULES.iter().chain(std::iter::once(&Suite::All)) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn cheap_suites_pass() {
        for s in [Suite::Newton, Suite::Framing, Suite::Twisted] {
            let r = run_suite(s, &quick());
            assert!(r.pass, "{s}: {:?}", r.failures().collect::<Vec<_>>());
            assert!(!r.checks.is_empty());
        }
    }

    #[test]
    fn perturbation_fails_with_named_record() {
        let opts = SuiteOptions {
            perturb: true,
            ..quick()
        };
        for s in [Suite::Newton, Suite::Framing, Suite::Twisted] {
            let r = run_suite(s, &opts);
            assert!(!r.pass);
            assert!(r.failures().all(|c| c.name.starts_with("perturbed/")), "{s}");
        }
    }

    #[test]
    fn random_extensions_satisfy_the_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (fam, qs) = random_extension(&mut rng).unwrap();
            assert!(fam.is_valid());
            assert!(kill_cross_term(&fam, &qs).is_ok());
        }
    }
}
