//! Density-increment machinery.
//!
//! This module counts solutions of translation-invariant linear equations
//! `c1*x1 + c2*x2 + c3*x3 = 0` inside a set, proves lower bounds on those
//! counts, and — when a set has too few solutions — extracts a verified
//! density increment on a structured subset (a Bohr set or subspace).
//! Everything feeds two iteration drivers, one for cyclic groups and one
//! for vector groups over an odd prime, which emit step-by-step traces
//! that an independent checker ([`verify_trace`]) recomputes from scratch.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bohr::{bohr_f, bohr_z, BohrSetZ, BohrSpaceF};
use crate::density::DensityFn;
use crate::dissociation::{spectral_cover, CoverCertificate};
use crate::energy::WeightFn;
use crate::error::{CoreError, Result};
use crate::fourier::dft;
use crate::group::{checked_set, is_symmetric_set, Group};
use crate::setops;
use crate::spectra::{cal_l, has_control, level_spectrum};

/// Relative tolerance for the two solution-counting routes to agree.
pub const COUNT_ROUTE_TOL: f64 = 1e-6;
/// Largest cyclic modulus the iteration driver accepts.
pub const DRIVER_MAX_MODULUS: u64 = 1021;
/// Largest vector-group order the iteration driver accepts.
pub const DRIVER_MAX_VECTOR_ORDER: u64 = 6561;
/// Largest absolute equation coefficient accepted.
pub const COEFF_CAP: i64 = 1 << 20;

// ---------------------------------------------------------------------------
// Equation coefficients
// ---------------------------------------------------------------------------

/// Coefficients of a translation-invariant equation
/// `c[0]*x1 + c[1]*x2 + c[2]*x3 = 0`: they sum to zero over the integers
/// and each must be invertible in the scalar ring of the group at hand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationCoeffs {
    pub c: [i64; 3],
}

impl EquationCoeffs {
    /// Validated constructor.
    pub fn new(group: &Group, c1: i64, c2: i64, c3: i64) -> Result<Self> {
        let coeffs = EquationCoeffs { c: [c1, c2, c3] };
        coeffs.validate(group)?;
        Ok(coeffs)
    }

    /// The three-term progression equation `x1 + x2 - 2*x3 = 0`.
    pub fn standard(group: &Group) -> Result<Self> {
        Self::new(group, 1, 1, -2)
    }

    /// Re-checks the structural requirements against a group.
    pub fn validate(&self, group: &Group) -> Result<()> {
        if self.c.iter().sum::<i64>() != 0 {
            return Err(CoreError::HypothesisViolated(format!(
                "coefficients {:?} do not sum to zero",
                self.c
            )));
        }
        for &c in &self.c {
            if c == 0 || c.abs() > COEFF_CAP {
                return Err(CoreError::OutOfRange {
                    what: "equation coefficient",
                    value: c as f64,
                });
            }
            if !group.is_unit_scalar(c) {
                return Err(CoreError::CoefficientNotUnit(c));
            }
        }
        Ok(())
    }

    /// Largest absolute pairwise product `|c_i * c_j|`, `i != j`.
    pub fn max_pair_product(&self) -> i64 {
        let [c1, c2, c3] = self.c;
        (c1 * c2).abs().max((c1 * c3).abs()).max((c2 * c3).abs())
    }
}

// ---------------------------------------------------------------------------
// Solution counting (two independent routes)
// ---------------------------------------------------------------------------

fn count_direct(group: &Group, a: &[u64], coeffs: EquationCoeffs) -> Result<u64> {
    let [c1, c2, c3] = coeffs.c;
    let inv3 = group.scalar_inverse(c3)? as i64;
    let mut count = 0u64;
    for &x1 in a {
        let t1 = group.scale(c1, x1);
        for &x2 in a {
            let s = group.add(t1, group.scale(c2, x2));
            let x3 = group.scale(inv3, group.neg(s));
            if a.binary_search(&x3).is_ok() {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn count_fourier(group: &Group, a: &[u64], coeffs: EquationCoeffs) -> Result<f64> {
    let f = DensityFn::indicator(group.clone(), a)?;
    let hat = dft(&f);
    let n = group.order();
    let mut sum = Complex64::new(0.0, 0.0);
    for gamma in 0..n {
        let g1 = hat[group.scale(coeffs.c[0], gamma) as usize];
        let g2 = hat[group.scale(coeffs.c[1], gamma) as usize];
        let g3 = hat[group.scale(coeffs.c[2], gamma) as usize];
        sum += g1 * g2 * g3;
    }
    let value = sum / n as f64;
    if value.im.abs() > COUNT_ROUTE_TOL * (1.0 + value.re.abs()) {
        return Err(CoreError::Internal(format!(
            "spectral solution count has non-vanishing imaginary part {}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Exact number of solutions of `c1*x1 + c2*x2 + c3*x3 = 0` with all three
/// variables in `a`, computed by a direct pair scan and independently by a
/// character sum; errors if the two routes disagree.
pub fn count_solutions(group: &Group, a: &[u64], coeffs: EquationCoeffs) -> Result<u64> {
    let a = checked_set(group, a)?;
    coeffs.validate(group)?;
    let direct = count_direct(group, &a, coeffs)?;
    let spectral = count_fourier(group, &a, coeffs)?;
    if (spectral - direct as f64).abs() > COUNT_ROUTE_TOL * (1.0 + direct as f64) {
        return Err(CoreError::Internal(format!(
            "solution-count routes disagree: direct {direct}, spectral {spectral}"
        )));
    }
    Ok(direct)
}

/// Checks that the solution count is unchanged under `x -> u*x + t`
/// (`u` a unit scalar). The zero coefficient sum makes this an identity;
/// this function re-verifies it numerically.
pub fn upsilon_invariance(
    group: &Group,
    a: &[u64],
    coeffs: EquationCoeffs,
    t: u64,
    u: i64,
) -> Result<bool> {
    if !group.is_unit_scalar(u) {
        return Err(CoreError::CoefficientNotUnit(u));
    }
    let base = count_solutions(group, a, coeffs)?;
    let image = setops::translate_set(group, &setops::dilate_set(group, u, a), t);
    let moved = count_solutions(group, &image, coeffs)?;
    Ok(base == moved)
}

/// `#{(x, y) : x in a1, y in a2, x + y in a3}`.
pub fn trilinear_count(group: &Group, a1: &[u64], a2: &[u64], a3: &[u64]) -> Result<u64> {
    let a1 = checked_set(group, a1)?;
    let a2 = checked_set(group, a2)?;
    let a3 = checked_set(group, a3)?;
    let mut count = 0u64;
    for &x in &a1 {
        for &y in &a2 {
            if a3.binary_search(&group.add(x, y)).is_ok() {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `|(s + t) \ t|`.
pub fn sumset_excess(group: &Group, s: &[u64], t: &[u64]) -> Result<u64> {
    let s = checked_set(group, s)?;
    let t = checked_set(group, t)?;
    let sum = setops::sumset(group, &s, &t);
    Ok(setops::count_outside(&sum, &t) as u64)
}

// ---------------------------------------------------------------------------
// Balanced functions
// ---------------------------------------------------------------------------

/// The mean-zero part `1_A - alpha * 1_B` of an indicator pair `A ⊆ B`,
/// returned together with `alpha = |A| / |B|`.
pub fn balanced_indicator(group: &Group, a: &[u64], b: &[u64]) -> Result<(DensityFn, f64)> {
    let b = checked_set(group, b)?;
    if b.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    let a = checked_set(group, a)?;
    if !setops::is_subset(&a, &b) {
        return Err(CoreError::HypothesisViolated(
            "set extends outside its host".into(),
        ));
    }
    let alpha = a.len() as f64 / b.len() as f64;
    let mut vals = vec![0.0f64; group.order() as usize];
    for &x in &b {
        vals[x as usize] = -alpha;
    }
    for &x in &a {
        vals[x as usize] += 1.0;
    }
    let total: f64 = vals.iter().sum();
    if total.abs() > 1e-9 * (1.0 + a.len() as f64) {
        return Err(CoreError::Internal(format!(
            "balanced function sums to {total} instead of zero"
        )));
    }
    Ok((DensityFn::from_real(group.clone(), &vals)?, alpha))
}

/// The mean-zero part `f - alpha * 1_B` of a general real function on `B`.
fn balanced_of(f: &DensityFn, b: &[u64], alpha: f64) -> Result<DensityFn> {
    let group = f.group().clone();
    let mut vals = vec![0.0f64; group.order() as usize];
    for &x in b {
        vals[x as usize] = -alpha;
    }
    for (x, v) in f.values().iter().enumerate() {
        vals[x] += v.re;
    }
    DensityFn::from_real(group, &vals)
}

fn validate_real_range(f: &DensityFn, lo: f64, hi: f64) -> Result<()> {
    for v in f.values() {
        if v.im.abs() > 1e-12 {
            return Err(CoreError::OutOfRange {
                what: "imaginary part",
                value: v.im,
            });
        }
        if v.re < lo - 1e-12 || v.re > hi + 1e-12 {
            return Err(CoreError::OutOfRange {
                what: "function value",
                value: v.re,
            });
        }
    }
    Ok(())
}

fn require_support_in(f: &DensityFn, host: &[u64]) -> Result<()> {
    for x in f.support() {
        if host.binary_search(&x).is_err() {
            return Err(CoreError::HypothesisViolated(format!(
                "function has mass outside its host (element {x})"
            )));
        }
    }
    Ok(())
}

/// `sum_{x in set} chi(x)` as a complex character sum.
fn char_coeff(group: &Group, set: &[u64], chi: u64) -> Complex64 {
    set.iter().map(|&x| group.character(chi, x)).sum()
}

fn hat_moduli(f: &DensityFn) -> Vec<f64> {
    dft(f).iter().map(|z| z.norm()).collect()
}

fn dedup_sorted(xs: &[u64]) -> Vec<u64> {
    let set: BTreeSet<u64> = xs.iter().copied().collect();
    set.into_iter().collect()
}

fn step_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

// ---------------------------------------------------------------------------
// Failed-hypothesis reporting
// ---------------------------------------------------------------------------

/// One numeric hypothesis that did not hold, with both sides recorded.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailedHypothesis {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

fn fail(name: &str, lhs: f64, rhs: f64) -> FailedHypothesis {
    FailedHypothesis {
        name: name.to_string(),
        lhs,
        rhs,
    }
}

// ---------------------------------------------------------------------------
// L^2 mass -> L^infty increment
// ---------------------------------------------------------------------------

/// Witness for [`de1_l2_increment`]: a translate whose correlation with the
/// convolving set beats the target.
#[derive(Clone, Debug)]
pub struct De1Witness {
    pub x: u64,
    pub value: f64,
    pub target: f64,
    pub nu: f64,
    pub alpha: f64,
    /// True when the half-size hypothesis would verify differently with the
    /// inner set's cardinality in place of the ambient one.
    pub h2_alternative_differs: bool,
}

#[derive(Clone, Debug)]
pub enum De1Outcome {
    Witness(De1Witness),
    HypothesisUnmet {
        failed: Vec<FailedHypothesis>,
        h2_alternative_differs: bool,
    },
}

/// If `f : B -> [0, 1]` has `nu alpha ||f||_1 N` of spectral mass on
/// `gamma`, every character of `gamma` keeps at least half of the ambient
/// cardinality in `B'`'s character sum, and `B' + B' + B` barely leaves
/// `B`, then some translate of `B'` sees `f`-mass at least
/// `(1 + nu/8) alpha |B'|`.
///
/// All three hypotheses are checked numerically; failures come back as a
/// structured list rather than an error. With hypotheses verified, a
/// missing witness is an internal error (it would falsify the statement
/// this implements).
pub fn de1_l2_increment(
    f: &DensityFn,
    b: &[u64],
    gamma: &[u64],
    nu: f64,
    b_prime: &[u64],
) -> Result<De1Outcome> {
    let group = f.group().clone();
    let b = checked_set(&group, b)?;
    let b_prime = checked_set(&group, b_prime)?;
    if b.is_empty() || b_prime.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    let gamma = checked_set(&group, gamma)?;
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(CoreError::OutOfRange {
            what: "nu",
            value: nu,
        });
    }
    validate_real_range(f, 0.0, 1.0)?;
    require_support_in(f, &b)?;
    let n = group.order() as f64;
    let alpha = f.norm1() / b.len() as f64;
    if alpha <= 0.0 {
        return Err(CoreError::EmptyFunction);
    }

    let bal = balanced_of(f, &b, alpha)?;
    let bal_hat = dft(&bal);

    let mut failed = Vec::new();

    let h1_lhs: f64 = gamma.iter().map(|&g| bal_hat[g as usize].norm_sqr()).sum();
    let h1_rhs = nu * alpha * f.norm1() * n;
    if h1_lhs < h1_rhs * (1.0 - 1e-9) {
        failed.push(fail("spectral-mass", h1_lhs, h1_rhs));
    }

    let mut h2_min = f64::INFINITY;
    for &g in &gamma {
        h2_min = h2_min.min(char_coeff(&group, &b_prime, g).norm());
    }
    let h2_rhs = b.len() as f64 / 2.0;
    let h2_alt_rhs = b_prime.len() as f64 / 2.0;
    let h2_ok = gamma.is_empty() || h2_min >= h2_rhs * (1.0 - 1e-9);
    let h2_alt_ok = gamma.is_empty() || h2_min >= h2_alt_rhs * (1.0 - 1e-9);
    let h2_alternative_differs = h2_ok != h2_alt_ok;
    if !h2_ok {
        failed.push(fail("half-size", h2_min, h2_rhs));
    }

    let two_bp = setops::sumset(&group, &b_prime, &b_prime);
    let reach = setops::sumset(&group, &two_bp, &b);
    let h3_lhs = setops::count_outside(&reach, &b) as f64;
    let h3_rhs = 2f64.powi(-4) * nu * alpha * b.len() as f64;
    if h3_lhs > h3_rhs + 1e-9 * (1.0 + h3_rhs) {
        failed.push(fail("addition", h3_lhs, h3_rhs));
    }

    if !failed.is_empty() {
        return Ok(De1Outcome::HypothesisUnmet {
            failed,
            h2_alternative_differs,
        });
    }

    let target = (1.0 + nu / 8.0) * alpha * b_prime.len() as f64;
    let vals = f.values();
    let mut best_x = 0u64;
    let mut best = f64::NEG_INFINITY;
    for x in 0..group.order() {
        let mut acc = 0.0;
        for &y in &b_prime {
            acc += vals[group.sub(x, y) as usize].re;
        }
        if acc > best {
            best = acc;
            best_x = x;
        }
    }
    if best < target * (1.0 - 1e-12) {
        return Err(CoreError::Internal(format!(
            "increment conclusion failed despite verified hypotheses \
             (best translate mass {best} < target {target})"
        )));
    }
    Ok(De1Outcome::Witness(De1Witness {
        x: best_x,
        value: best,
        target,
        nu,
        alpha,
        h2_alternative_differs,
    }))
}

// ---------------------------------------------------------------------------
// Control from a cover certificate
// ---------------------------------------------------------------------------

/// Result of [`de2_control_from_cover`]: per-character half-sum ratios over
/// the covered set.
#[derive(Clone, Debug)]
pub struct De2Report {
    pub min_ratio: f64,
    pub failures: Vec<u64>,
    pub holds: bool,
}

/// Given a verified cover certificate (every covered character is a
/// difference from the frequency set plus a small signed sum of the
/// generators) and a set `b` that is `1/(4d)`-controlled by the generators
/// and `1/8`-controlled by the frequency set, checks that every covered
/// character keeps at least half of `b`'s character sum.
pub fn de2_control_from_cover(
    group: &Group,
    cert: &CoverCertificate,
    b: &[u64],
) -> Result<De2Report> {
    let report = cert.verify(group)?;
    if !report.covered {
        return Err(CoreError::HypothesisViolated(
            "certificate does not cover its claimed set".into(),
        ));
    }
    let b = checked_set(group, b)?;
    if b.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    let d = cert.d.max(1) as f64;
    let lambda = dedup_sorted(&cert.lambda);
    let ctrl = has_control(group, &b, &lambda, 1.0 / (4.0 * d))?;
    if !ctrl.controlled {
        return Err(CoreError::HypothesisViolated(format!(
            "generators do not 1/(4d)-control the set: worst pair {:?}",
            ctrl.worst
        )));
    }
    let ctrl_gamma = has_control(group, &b, &cert.gamma, 0.125)?;
    if !ctrl_gamma.controlled {
        return Err(CoreError::HypothesisViolated(format!(
            "frequency set does not 1/8-control the set: worst pair {:?}",
            ctrl_gamma.worst
        )));
    }
    let size = b.len() as f64;
    let mut min_ratio = f64::INFINITY;
    let mut failures = Vec::new();
    for &g in &cert.covered_set {
        let ratio = char_coeff(group, &b, g).norm() / size;
        min_ratio = min_ratio.min(ratio);
        if ratio < 0.5 - 1e-9 {
            failures.push(g);
        }
    }
    if cert.covered_set.is_empty() {
        min_ratio = 1.0;
    }
    let holds = failures.is_empty();
    Ok(De2Report {
        min_ratio,
        failures,
        holds,
    })
}

// ---------------------------------------------------------------------------
// Control from an addition bound
// ---------------------------------------------------------------------------

/// Result of [`de3_control_from_addition`].
#[derive(Clone, Debug)]
pub struct De3Report {
    pub excess: u64,
    pub excess_bound: f64,
    pub spectrum_size: usize,
    pub control_eps: f64,
    pub worst: Option<(u64, u64, f64)>,
    pub holds: bool,
}

/// If `|(b' + b) \ b| <= c * eps * |b|`, every character in the
/// `eps`-spectrum of `b` is `2c`-controlled on `b'`. The addition bound is
/// a precondition (error if it fails); the conclusion is checked and
/// reported.
pub fn de3_control_from_addition(
    group: &Group,
    b: &[u64],
    b_prime: &[u64],
    c_const: f64,
    eps: f64,
) -> Result<De3Report> {
    if !(c_const.is_finite() && c_const > 0.0) {
        return Err(CoreError::OutOfRange {
            what: "c",
            value: c_const,
        });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CoreError::OutOfRange {
            what: "eps",
            value: eps,
        });
    }
    let b = checked_set(group, b)?;
    let b_prime = checked_set(group, b_prime)?;
    if b.is_empty() || b_prime.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    let excess = sumset_excess(group, &b_prime, &b)?;
    let excess_bound = c_const * eps * b.len() as f64;
    if excess as f64 > excess_bound + 1e-9 * (1.0 + excess_bound) {
        return Err(CoreError::HypothesisViolated(format!(
            "addition hypothesis fails: |(b' + b) \\ b| = {excess} > {excess_bound}"
        )));
    }
    let indicator = DensityFn::indicator(group.clone(), &b)?;
    let spec = crate::spectra::spectrum(&indicator, eps)?;
    let control_eps = (2.0 * c_const).min(2.0);
    let ctrl = has_control(group, &b_prime, &spec.members, control_eps)?;
    Ok(De3Report {
        excess,
        excess_bound,
        spectrum_size: spec.members.len(),
        control_eps,
        worst: ctrl.worst,
        holds: ctrl.controlled,
    })
}

// ---------------------------------------------------------------------------
// Dyadic-level increment: analysis phase
// ---------------------------------------------------------------------------

/// Per-level record of the spectrum covering loop.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelCover {
    pub level: u32,
    pub eta: f64,
    pub weight_support: usize,
    pub lambda_len: usize,
    pub mass: f64,
}

/// Output of [`thde_analyze`]: the spectral data and the covering
/// generators needed to build a candidate increment host.
#[derive(Clone, Debug)]
pub struct ThdeAnalysis {
    pub group: Group,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub b_prime: Vec<u64>,
    pub alpha: f64,
    pub tau: f64,
    pub nu: f64,
    pub eta: f64,
    pub eps: f64,
    /// Covering generators, concatenated across levels (duplicates kept).
    pub lambda: Vec<u64>,
    pub d_declared: f64,
    pub d_used: usize,
    pub delta_union: Vec<u64>,
    pub union_mass: f64,
    pub union_target: f64,
    pub union_ok: bool,
    pub lambda_within_bound: bool,
    pub levels: Vec<LevelCover>,
}

/// Analyzes the spectral correlation between a function `f` on `b_prime`
/// and a set `a` inside `b`, covering the dyadic levels of `f`'s large
/// spectrum. The correlation strength `nu` is derived from the actual
/// spectral mass, so the mass hypothesis holds by construction; the
/// covering step can fail honestly (error) when its own requirements do
/// not hold at this scale.
pub fn thde_analyze(
    group: &Group,
    a: &[u64],
    b: &[u64],
    f: &DensityFn,
    b_prime: &[u64],
    seed: u64,
) -> Result<ThdeAnalysis> {
    if f.group() != group {
        return Err(CoreError::GroupMismatch);
    }
    let b = checked_set(group, b)?;
    let b_prime = checked_set(group, b_prime)?;
    let a = checked_set(group, a)?;
    if a.is_empty() || b.is_empty() || b_prime.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    if !setops::is_subset(&a, &b) || !setops::is_subset(&b_prime, &b) {
        return Err(CoreError::HypothesisViolated(
            "hosts must nest: a inside b, b' inside b".into(),
        ));
    }
    validate_real_range(f, -1.0, 1.0)?;
    require_support_in(f, &b_prime)?;
    let n = group.order() as f64;
    let alpha = a.len() as f64 / b.len() as f64;
    let f1 = f.norm1();
    if f1 <= 0.0 {
        return Err(CoreError::EmptyFunction);
    }
    let tau = f1 / b.len() as f64;
    if tau > 1.0 + 1e-9 {
        return Err(CoreError::OutOfRange {
            what: "tau",
            value: tau,
        });
    }
    let tau = tau.min(1.0);

    let (bal, _) = balanced_indicator(group, &a, &b)?;
    let bal_mod = hat_moduli(&bal);
    let f_mod = hat_moduli(f);

    let spectral_mass: f64 = (0..group.order() as usize)
        .map(|g| f_mod[g] * bal_mod[g] * bal_mod[g])
        .sum();
    let nu = spectral_mass / (alpha * f1 * a.len() as f64 * n);
    if !(nu.is_finite() && nu > 0.0) {
        return Err(CoreError::HypothesisViolated(format!(
            "no spectral correlation mass (nu = {nu})"
        )));
    }
    let nu_alpha = nu * alpha;
    if !(0.0..=1.0).contains(&nu_alpha) {
        return Err(CoreError::Internal(format!(
            "correlation product nu*alpha = {nu_alpha} escaped (0, 1]"
        )));
    }
    let eta = nu_alpha / 2.0;
    let l_tau = cal_l(tau)? as f64;
    let l_na = cal_l(nu_alpha)? as f64;
    let eps = (-16.0 * l_tau * l_na).exp();

    let mut lambda: Vec<u64> = Vec::new();
    let mut union: BTreeSet<u64> = BTreeSet::new();
    let mut levels = Vec::new();
    let mut level = 0u32;
    loop {
        let eta_i = eta * 2f64.powi(level as i32);
        if eta_i > 1.0 || level > 64 {
            break;
        }
        let slice = level_spectrum(f, eta_i)?;
        let entries: Vec<(u64, f64)> = slice
            .members
            .iter()
            .map(|&g| (g, f_mod[g as usize] * bal_mod[g as usize] * bal_mod[g as usize]))
            .filter(|&(_, w)| w > 0.0)
            .collect();
        if !entries.is_empty() {
            let w = WeightFn::new(group.clone(), &entries)?;
            let out = spectral_cover(f, &b_prime, &w, eta_i, eps, step_seed(seed, level as usize))?;
            lambda.extend_from_slice(&out.certificate.lambda);
            union.extend(out.delta_prime.iter().copied());
            levels.push(LevelCover {
                level,
                eta: eta_i,
                weight_support: entries.len(),
                lambda_len: out.certificate.lambda.len(),
                mass: out.mass,
            });
        }
        level += 1;
    }

    let d_declared = 2f64.powi(16) * l_tau / nu_alpha;
    let d_used = lambda.len().max(1);
    let lambda_within_bound = lambda.len() as f64 <= d_declared + 1e-9;
    let delta_union: Vec<u64> = union.into_iter().collect();
    let union_mass: f64 = delta_union
        .iter()
        .map(|&g| bal_mod[g as usize] * bal_mod[g as usize])
        .sum();
    let union_target = 2f64.powi(-13) * nu_alpha * a.len() as f64 * n;
    let union_ok = union_mass >= union_target * (1.0 - 1e-9);

    Ok(ThdeAnalysis {
        group: group.clone(),
        a,
        b,
        b_prime,
        alpha,
        tau,
        nu,
        eta,
        eps,
        lambda,
        d_declared,
        d_used,
        delta_union,
        union_mass,
        union_target,
        union_ok,
        lambda_within_bound,
        levels,
    })
}

// ---------------------------------------------------------------------------
// Dyadic-level increment: application phase
// ---------------------------------------------------------------------------

/// A verified translate with increased density on the candidate host.
#[derive(Clone, Debug)]
pub struct ThdeWitness {
    pub x: u64,
    pub achieved: f64,
    pub target: f64,
    pub new_density: f64,
    pub half_dft_ok: bool,
    pub min_half_ratio: f64,
}

#[derive(Clone, Debug)]
pub enum ThdeOutcome {
    Witness(ThdeWitness),
    HypothesisUnmet { failed: Vec<FailedHypothesis> },
}

/// Tests a candidate host against the analysis: the covering generators
/// must `1/(4d)`-control it and its additive spill-over past `b` and
/// `b_prime` must be tiny. With those verified, scans for the guaranteed
/// translate with density at least `(1 + 2^-16 nu) alpha`.
pub fn thde_apply(an: &ThdeAnalysis, b_dprime: &[u64]) -> Result<ThdeOutcome> {
    let group = &an.group;
    let bpp = checked_set(group, b_dprime)?;
    if bpp.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    if bpp.binary_search(&group.zero()).is_err() {
        return Err(CoreError::HypothesisViolated(
            "candidate host must contain 0".into(),
        ));
    }
    if !is_symmetric_set(group, &bpp) {
        let offender = bpp
            .iter()
            .copied()
            .find(|&x| bpp.binary_search(&group.neg(x)).is_err())
            .unwrap_or(0);
        return Err(CoreError::NotSymmetric(offender));
    }

    let mut failed = Vec::new();
    let lambda = dedup_sorted(&an.lambda);
    let ctrl_eps = 1.0 / (4.0 * an.d_used as f64);
    if !lambda.is_empty() {
        let ctrl = has_control(group, &bpp, &lambda, ctrl_eps)?;
        if !ctrl.controlled {
            let worst = ctrl.worst.map(|w| w.2).unwrap_or(2.0);
            failed.push(fail("generator-control", worst, ctrl_eps));
        }
    }
    let double = setops::sumset(group, &bpp, &bpp);
    let triple = setops::sumset(group, &double, &an.b);
    let excess1 = setops::count_outside(&triple, &an.b) as f64;
    let excess1_bound = 2f64.powi(-17) * an.nu * an.alpha * an.b.len() as f64;
    if excess1 > excess1_bound + 1e-9 * (1.0 + excess1_bound) {
        failed.push(fail("triple-addition", excess1, excess1_bound));
    }
    let inner = setops::sumset(group, &bpp, &an.b_prime);
    let excess2 = setops::count_outside(&inner, &an.b_prime) as f64;
    let excess2_bound = 2f64.powi(-4) * an.eps * an.b_prime.len() as f64;
    if excess2 > excess2_bound + 1e-9 * (1.0 + excess2_bound) {
        failed.push(fail("inner-addition", excess2, excess2_bound));
    }
    if !failed.is_empty() {
        return Ok(ThdeOutcome::HypothesisUnmet { failed });
    }

    let size = bpp.len() as f64;
    let mut min_half_ratio = 1.0f64;
    for &g in &an.delta_union {
        let ratio = char_coeff(group, &bpp, g).norm() / size;
        min_half_ratio = min_half_ratio.min(ratio);
    }
    let half_dft_ok = min_half_ratio >= 0.5 * (1.0 - 1e-9);

    let target = (1.0 + 2f64.powi(-16) * an.nu) * an.alpha * size;
    let mut best = 0u64;
    let mut best_x = 0u64;
    for x in 0..group.order() {
        let mut count = 0u64;
        for &y in &bpp {
            if an.a.binary_search(&group.add(x, y)).is_ok() {
                count += 1;
            }
        }
        if count > best {
            best = count;
            best_x = x;
        }
    }
    if (best as f64) < target * (1.0 - 1e-12) {
        return Err(CoreError::Internal(format!(
            "increment conclusion failed despite verified hypotheses \
             (best fiber {best} at x = {best_x}, target {target})"
        )));
    }
    Ok(ThdeOutcome::Witness(ThdeWitness {
        x: best_x,
        achieved: best as f64,
        target,
        new_density: best as f64 / size,
        half_dft_ok,
        min_half_ratio,
    }))
}

/// One-shot analysis + application.
pub fn thde_increment(
    group: &Group,
    a: &[u64],
    b: &[u64],
    f: &DensityFn,
    b_prime: &[u64],
    b_dprime: &[u64],
    seed: u64,
) -> Result<(ThdeAnalysis, ThdeOutcome)> {
    let analysis = thde_analyze(group, a, b, f, b_prime, seed)?;
    let outcome = thde_apply(&analysis, b_dprime)?;
    Ok((analysis, outcome))
}

// ---------------------------------------------------------------------------
// Trilinear counting step
// ---------------------------------------------------------------------------

/// The data of a Cauchy–Schwarz split: which slot carries the spectral
/// mass, both masses and thresholds, and the prepared increment analysis.
#[derive(Clone, Debug)]
pub struct MaindiSplit {
    /// 2 or 3: the slot whose balanced part carries the mass.
    pub slot: usize,
    pub s: [f64; 2],
    pub t: [f64; 2],
    pub alpha_floor: f64,
    pub lambda_cap: f64,
    pub lambda_within_cap: bool,
    pub analysis: ThdeAnalysis,
}

#[derive(Clone, Debug)]
pub enum MaindiAnalysis {
    /// The trilinear count already meets the main-term bound.
    ManySolutions { count: u64, bound: f64 },
    /// Too few solutions: a spectral split prepared an increment.
    NeedIncrement(Box<MaindiSplit>),
}

/// Counts `#{x in a1, y in a2 : x + y in a3}` against the main-term bound
/// `2^-2 beta1 beta2 beta3 |b| |b'|`. When the count is small, locates the
/// slot (2 or 3) whose balanced part holds the spectral mass demanded by
/// Cauchy–Schwarz and prepares the dyadic-level increment for it.
pub fn maindi_analyze(
    group: &Group,
    a1: &[u64],
    a2: &[u64],
    a3: &[u64],
    b_prime: &[u64],
    b: &[u64],
    seed: u64,
) -> Result<MaindiAnalysis> {
    let b = checked_set(group, b)?;
    let b_prime = checked_set(group, b_prime)?;
    let a1 = checked_set(group, a1)?;
    let a2 = checked_set(group, a2)?;
    let a3 = checked_set(group, a3)?;
    if a1.is_empty() || a2.is_empty() || a3.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    if !setops::is_subset(&b_prime, &b)
        || !setops::is_subset(&a1, &b_prime)
        || !setops::is_subset(&a2, &b)
        || !setops::is_subset(&a3, &b)
    {
        return Err(CoreError::HypothesisViolated(
            "slots must nest: a1 in b', a2 and a3 in b, b' in b".into(),
        ));
    }
    let n = group.order() as f64;
    let beta1 = a1.len() as f64 / b_prime.len() as f64;
    let beta2 = a2.len() as f64 / b.len() as f64;
    let beta3 = a3.len() as f64 / b.len() as f64;
    let alpha_floor = 0.5 * 2f64.powi(-5).min(beta1).min(beta2).min(beta3);

    let excess = sumset_excess(group, &b_prime, &b)? as f64;
    let excess_bound = 2f64.powi(-2) * alpha_floor * b.len() as f64;
    if excess > excess_bound + 1e-9 * (1.0 + excess_bound) {
        return Err(CoreError::HypothesisViolated(format!(
            "addition hypothesis fails: |(b' + b) \\ b| = {excess} > {excess_bound}"
        )));
    }

    let count = trilinear_count(group, &a1, &a2, &a3)?;
    let bound = 2f64.powi(-2) * beta1 * beta2 * beta3 * b.len() as f64 * b_prime.len() as f64;
    if count as f64 >= bound {
        return Ok(MaindiAnalysis::ManySolutions { count, bound });
    }

    let a1_fn = DensityFn::indicator(group.clone(), &a1)?;
    let a1_mod = hat_moduli(&a1_fn);
    let (bal2, _) = balanced_indicator(group, &a2, &b)?;
    let (bal3, _) = balanced_indicator(group, &a3, &b)?;
    let m2 = hat_moduli(&bal2);
    let m3 = hat_moduli(&bal3);
    let order = group.order() as usize;
    let s2: f64 = (0..order).map(|g| a1_mod[g] * m2[g] * m2[g]).sum();
    let s3: f64 = (0..order).map(|g| a1_mod[g] * m3[g] * m3[g]).sum();
    let t2 = 2f64.powi(-2) * a1.len() as f64 * beta2 * beta2 * b.len() as f64 * n;
    let t3 = 2f64.powi(-2) * a1.len() as f64 * beta3 * beta3 * b.len() as f64 * n;
    let r2 = s2 / t2;
    let r3 = s3 / t3;
    let slot = if r3 > r2 { 3 } else { 2 };
    if r2.max(r3) < 1.0 - 1e-9 {
        return Err(CoreError::Internal(format!(
            "spectral split failed with few solutions (count {count}, bound {bound}, \
             masses {s2}/{t2} and {s3}/{t3}); this instance would falsify the counting step"
        )));
    }
    let slot_set = if slot == 2 { &a2 } else { &a3 };
    let analysis = thde_analyze(group, slot_set, &b, &a1_fn, &b_prime, seed)?;
    let l_floor = cal_l(alpha_floor)? as f64;
    let lambda_cap = 2f64.powi(19) * l_floor / alpha_floor;
    let lambda_within_cap = analysis.lambda.len() as f64 <= lambda_cap + 1e-9;
    Ok(MaindiAnalysis::NeedIncrement(Box::new(MaindiSplit {
        slot,
        s: [s2, s3],
        t: [t2, t3],
        alpha_floor,
        lambda_cap,
        lambda_within_cap,
        analysis,
    })))
}

#[derive(Clone, Debug)]
pub enum MaindiStepOutcome {
    ManySolutions {
        count: u64,
        bound: f64,
    },
    Increment {
        slot: usize,
        witness: ThdeWitness,
        nu: f64,
        lambda: Vec<u64>,
    },
    HypothesisUnmet {
        failed: Vec<FailedHypothesis>,
    },
}

/// Full counting step: analyze, then test the supplied candidate host.
#[allow(clippy::too_many_arguments)]
pub fn maindi_step(
    group: &Group,
    a1: &[u64],
    a2: &[u64],
    a3: &[u64],
    b_prime: &[u64],
    b: &[u64],
    b_dprime: &[u64],
    seed: u64,
) -> Result<MaindiStepOutcome> {
    match maindi_analyze(group, a1, a2, a3, b_prime, b, seed)? {
        MaindiAnalysis::ManySolutions { count, bound } => {
            Ok(MaindiStepOutcome::ManySolutions { count, bound })
        }
        MaindiAnalysis::NeedIncrement(split) => match thde_apply(&split.analysis, b_dprime)? {
            ThdeOutcome::Witness(witness) => Ok(MaindiStepOutcome::Increment {
                slot: split.slot,
                witness,
                nu: split.analysis.nu,
                lambda: split.analysis.lambda.clone(),
            }),
            ThdeOutcome::HypothesisUnmet { failed } => {
                Ok(MaindiStepOutcome::HypothesisUnmet { failed })
            }
        },
    }
}

// ---------------------------------------------------------------------------
// Iteration traces
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    /// A translate of the current set already beats the density target on
    /// one of the prepared hosts.
    SupIncrement,
    /// The spectral machinery produced the increment host.
    SpectralIncrement,
    /// The iteration stopped with a verified solution-count lower bound.
    TerminalCount,
}

/// The trilinear instance recorded at a counting terminal, so a checker
/// can recount it from scratch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TerminalInstance {
    pub a1: Vec<u64>,
    pub a2: Vec<u64>,
    pub a3: Vec<u64>,
    pub host_size: u64,
    pub inner_host_size: u64,
}

/// One step of an iteration trace. `set` lives inside `bohr_members`, and
/// is contained in `dilate * previous_set + affine_shift`, which is what
/// makes the solution count non-increasing along the trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceStep {
    pub kind: StepKind,
    pub bohr_freqs: Vec<u64>,
    pub bohr_widths: Vec<f64>,
    pub bohr_members: Vec<u64>,
    pub set: Vec<u64>,
    pub density: f64,
    pub rank: usize,
    pub translate: u64,
    pub dilate: i64,
    pub affine_shift: u64,
    pub lambda_size: usize,
    pub nu: f64,
    pub tau: f64,
    pub delta: f64,
    pub c_step: f64,
    pub empirical: bool,
    pub terminal_count: Option<f64>,
    pub terminal_bound: Option<f64>,
    pub terminal_instance: Option<TerminalInstance>,
}

/// Tunable constants of the iteration drivers.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DriverParams {
    /// Per-step density growth declared by non-empirical increments.
    pub c_impl: f64,
    /// Width-rule constant for the dilate ladder.
    pub delta_rule: f64,
    pub max_steps: usize,
    /// Grid for regularity scans.
    pub grid: usize,
    pub seed: u64,
}

impl Default for DriverParams {
    fn default() -> Self {
        DriverParams {
            c_impl: 2f64.powi(-16),
            delta_rule: 2f64.powi(-8),
            max_steps: 64,
            grid: 64,
            seed: 0x5eed_5eed,
        }
    }
}

impl DriverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_impl > 0.0 && self.c_impl <= 0.5) {
            return Err(CoreError::OutOfRange {
                what: "c_impl",
                value: self.c_impl,
            });
        }
        if !(self.delta_rule > 0.0 && self.delta_rule <= 2f64.powi(-6)) {
            return Err(CoreError::OutOfRange {
                what: "delta_rule",
                value: self.delta_rule,
            });
        }
        if self.max_steps == 0 || self.max_steps > 10_000 {
            return Err(CoreError::OutOfRange {
                what: "max_steps",
                value: self.max_steps as f64,
            });
        }
        if self.grid < 8 || self.grid > 100_000 {
            return Err(CoreError::OutOfRange {
                what: "grid",
                value: self.grid as f64,
            });
        }
        Ok(())
    }
}

/// A full iteration trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IncrementTrace {
    pub group: Group,
    pub coeffs: EquationCoeffs,
    pub initial_set: Vec<u64>,
    pub initial_density: f64,
    pub params: DriverParams,
    pub steps: Vec<TraceStep>,
}

/// Outcome of [`verify_trace`].
#[derive(Clone, Debug)]
pub struct TraceCheck {
    pub ok: bool,
    pub issues: Vec<String>,
    pub steps: usize,
    pub length_bound: usize,
}

// ---------------------------------------------------------------------------
// Shared driver plumbing
// ---------------------------------------------------------------------------

/// Flat description of a host set, shared by both group flavors.
struct HostDescr {
    freqs: Vec<u64>,
    widths: Vec<f64>,
    members: Vec<u64>,
    rank: usize,
    scale: f64,
}

impl HostDescr {
    fn from_z(b: &BohrSetZ) -> Self {
        HostDescr {
            freqs: b.freqs().to_vec(),
            widths: b.widths(),
            members: b.members().to_vec(),
            rank: b.rank(),
            scale: b.scale(),
        }
    }

    fn from_f(b: &BohrSpaceF) -> Self {
        HostDescr {
            freqs: b.gamma().to_vec(),
            widths: Vec::new(),
            members: b.members().to_vec(),
            rank: b.rank(),
            scale: 1.0,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn make_step(
    kind: StepKind,
    host: &HostDescr,
    set: Vec<u64>,
    density: f64,
    translate: u64,
    dilate: i64,
    affine_shift: u64,
    lambda_size: usize,
    nu: f64,
    tau: f64,
    c_step: f64,
    empirical: bool,
) -> TraceStep {
    TraceStep {
        kind,
        bohr_freqs: host.freqs.clone(),
        bohr_widths: host.widths.clone(),
        bohr_members: host.members.clone(),
        set,
        density,
        rank: host.rank,
        translate,
        dilate,
        affine_shift,
        lambda_size,
        nu,
        tau,
        delta: host.scale,
        c_step,
        empirical,
        terminal_count: None,
        terminal_bound: None,
        terminal_instance: None,
    }
}

fn trivial_terminal(
    group: &Group,
    coeffs: EquationCoeffs,
    host: &HostDescr,
    set: &[u64],
    density: f64,
    fallback: bool,
) -> Result<TraceStep> {
    let count = count_solutions(group, set, coeffs)? as f64;
    let bound = set.len() as f64;
    if count < bound {
        return Err(CoreError::Internal(format!(
            "diagonal solution count {count} fell below the set size {bound}"
        )));
    }
    let mut step = make_step(
        StepKind::TerminalCount,
        host,
        set.to_vec(),
        density,
        0,
        1,
        0,
        0,
        0.0,
        0.0,
        0.0,
        fallback,
    );
    step.terminal_count = Some(count);
    step.terminal_bound = Some(bound);
    Ok(step)
}

/// `counts[x] = |{y in host : x + y in set}| = |(set - x) ∩ host|`.
fn correlation_counts(group: &Group, set: &[u64], host: &[u64]) -> Vec<u64> {
    let n = group.order() as usize;
    let mut counts = vec![0u64; n];
    for (x, slot) in counts.iter_mut().enumerate() {
        let mut c = 0u64;
        for &y in host {
            if set.binary_search(&group.add(x as u64, y)).is_ok() {
                c += 1;
            }
        }
        *slot = c;
    }
    counts
}

/// `{y in host : x + y in set}`, i.e. `(set - x) ∩ host`, sorted.
fn fiber(group: &Group, set: &[u64], x: u64, host: &[u64]) -> Vec<u64> {
    host.iter()
        .copied()
        .filter(|&y| set.binary_search(&group.add(x, y)).is_ok())
        .collect()
}

/// The one-point Bohr set `{0}` in a cyclic group, with an honest width.
fn origin_bohr_z(group: &Group) -> Result<BohrSetZ> {
    let w0 = group.char_distance(1, 1) / 2.0;
    let b = bohr_z(group, &[1], &[w0])?;
    if b.members() != [group.zero()] {
        return Err(CoreError::Internal(
            "one-point Bohr construction produced extra members".into(),
        ));
    }
    Ok(b)
}

/// The zero subspace of a vector group, cut out by the full dual basis.
fn origin_space_f(group: &Group) -> Result<BohrSpaceF> {
    let (base, dim) = match group {
        Group::Vector { base, dim } => (*base, *dim),
        Group::Cyclic { .. } => return Err(CoreError::GroupMismatch),
    };
    let basis: Vec<u64> = (0..dim).map(|j| base.pow(j)).collect();
    let b = bohr_f(group, &basis)?;
    if b.members() != [group.zero()] {
        return Err(CoreError::Internal(
            "zero-subspace construction produced extra members".into(),
        ));
    }
    Ok(b)
}

/// Errors that mean "this theorem step is honestly unavailable here", as
/// opposed to bugs, which propagate.
fn step_unavailable(err: &CoreError) -> bool {
    matches!(
        err,
        CoreError::HypothesisViolated(_)
            | CoreError::Inconclusive(_)
            | CoreError::Exhausted { .. }
            | CoreError::TooLarge { .. }
            | CoreError::NoRegularDilate { .. }
    )
}

fn regular_in(b: &BohrSetZ, lo: f64, hi: f64, grid: usize) -> Result<BohrSetZ> {
    match b.find_regular_dilate_in(lo, hi, grid) {
        Ok(out) => Ok(out),
        Err(CoreError::NoRegularDilate { .. }) => b
            .find_regular_dilate_in(lo / 4.0, hi, grid)
            .map_err(|e| CoreError::StepFailure(format!("no regular dilate in ladder: {e}"))),
        Err(e) => Err(e),
    }
}

/// What the spectral counting path produced for one round.
enum RoundOutcome {
    /// Verified counting terminal.
    Terminal(TraceStep),
    /// A spectral increment step, ready to apply.
    Advance {
        host: HostDescr,
        next: Vec<u64>,
        new_density: f64,
        translate: u64,
        dilate: i64,
        affine_shift: u64,
        lambda_size: usize,
        nu: f64,
        tau: f64,
        c_step: f64,
        empirical: bool,
    },
    /// The machinery's hypotheses do not hold at this scale.
    Unavailable,
}

/// Given a prepared counting instance, run the dichotomy and try the
/// candidate hosts. Shared by both drivers.
#[allow(clippy::too_many_arguments)]
fn counting_round(
    group: &Group,
    ma1: &[u64],
    ma2: &[u64],
    ma3: &[u64],
    inner_host: &[u64],
    outer_host: &[u64],
    candidates: impl Fn(&ThdeAnalysis) -> Result<Vec<(HostDescr, usize)>>,
    xstar: u64,
    c2: i64,
    neg_c1: i64,
    alpha: f64,
    c_impl: f64,
    instance: TerminalInstance,
    seed: u64,
) -> Result<RoundOutcome> {
    let analysis = match maindi_analyze(group, ma1, ma2, ma3, inner_host, outer_host, seed) {
        Ok(out) => out,
        Err(e) if step_unavailable(&e) => return Ok(RoundOutcome::Unavailable),
        Err(e) => return Err(e),
    };
    match analysis {
        MaindiAnalysis::ManySolutions { count, bound } => {
            let mut step = TraceStep {
                kind: StepKind::TerminalCount,
                bohr_freqs: Vec::new(),
                bohr_widths: Vec::new(),
                bohr_members: Vec::new(),
                set: Vec::new(),
                density: 0.0,
                rank: 0,
                translate: xstar,
                dilate: 1,
                affine_shift: 0,
                lambda_size: 0,
                nu: 0.0,
                tau: 0.0,
                delta: 0.0,
                c_step: 0.0,
                empirical: false,
                terminal_count: Some(count as f64),
                terminal_bound: Some(bound),
                terminal_instance: Some(instance),
            };
            // Host data is filled in by the caller, which knows the
            // current host; leave placeholders here.
            step.set.clear();
            Ok(RoundOutcome::Terminal(step))
        }
        MaindiAnalysis::NeedIncrement(split) => {
            let (u, base): (i64, &[u64]) = if split.slot == 2 {
                (c2, ma2)
            } else {
                (neg_c1, ma3)
            };
            for (cand, lambda_size) in candidates(&split.analysis)? {
                let outcome = thde_apply(&split.analysis, &cand.members)?;
                let witness = match outcome {
                    ThdeOutcome::Witness(w) => w,
                    ThdeOutcome::HypothesisUnmet { .. } => continue,
                };
                let next = fiber(group, base, witness.x, &cand.members);
                let new_density = next.len() as f64 / cand.members.len() as f64;
                let growth = new_density / alpha;
                let normal = growth >= (1.0 + c_impl) * (1.0 - 1e-12);
                if !normal && growth <= 1.0 + 1e-9 {
                    continue;
                }
                let affine_shift = group.sub(group.neg(group.scale(u, xstar)), witness.x);
                return Ok(RoundOutcome::Advance {
                    host: cand,
                    next,
                    new_density,
                    translate: xstar,
                    dilate: u,
                    affine_shift,
                    lambda_size,
                    nu: split.analysis.nu,
                    tau: split.analysis.tau,
                    c_step: growth - 1.0,
                    empirical: !normal,
                });
            }
            Ok(RoundOutcome::Unavailable)
        }
    }
}

// ---------------------------------------------------------------------------
// Cyclic-group driver
// ---------------------------------------------------------------------------

/// Runs the density-increment iteration on a cyclic group of prime order,
/// producing a trace every step of which is independently recomputable.
///
/// Each round builds a regular dilate ladder, forms the three coefficient
/// images of the mid and low rungs, and either takes a direct translate
/// increment, certifies a solution-count terminal, or extracts a spectral
/// increment. Rounds where the spectral machinery's hypotheses fail at
/// this scale fall back to the best translate found by direct search
/// (marked `empirical`) or to a trivially verified terminal.
pub fn driver_zn(
    group: &Group,
    a: &[u64],
    coeffs: EquationCoeffs,
    params: &DriverParams,
) -> Result<IncrementTrace> {
    match group {
        Group::Cyclic { modulus } => {
            if *modulus > DRIVER_MAX_MODULUS {
                return Err(CoreError::TooLarge {
                    what: "driver modulus",
                    size: *modulus,
                    cap: DRIVER_MAX_MODULUS,
                });
            }
        }
        Group::Vector { .. } => return Err(CoreError::GroupMismatch),
    }
    coeffs.validate(group)?;
    params.validate()?;
    let a0 = checked_set(group, a)?;
    if a0.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    let n = group.order();
    let [c1, c2, c3] = coeffs.c;

    let mut bohr = bohr_z(group, &[], &[])?;
    let mut set = a0.clone();
    let mut density = set.len() as f64 / n as f64;
    let mut upsilon = count_solutions(group, &set, coeffs)?;
    let initial_density = density;
    let mut steps: Vec<TraceStep> = Vec::new();

    while steps.len() < params.max_steps {
        let host_now = HostDescr::from_z(&bohr);
        if set.len() <= 2 {
            steps.push(trivial_terminal(
                group, coeffs, &host_now, &set, density, false,
            )?);
            break;
        }
        let alpha = density;
        let k = steps.len();
        let d = bohr.rank().max(1) as f64;

        // Dilate ladder: outer (mean-argument scale), mid (coefficient
        // scale), low (addition scale for the counting step).
        let lo_a = params.delta_rule * alpha / (4.0 * d);
        let hi_a = params.delta_rule * alpha / d;
        let b_outer = regular_in(&bohr, lo_a, hi_a, params.grid)?;
        let m_big = coeffs.max_pair_product() as f64;
        let b_mid = regular_in(&b_outer, 0.25 / m_big, 0.5 / m_big, params.grid)?;
        let am_est = 0.25 * alpha.min(2f64.powi(-5));
        let mut lo_c = params.delta_rule * am_est / (4.0 * d);
        let mut hi_c = params.delta_rule * am_est / d;
        let mut b_low = regular_in(&b_mid, lo_c, hi_c, params.grid)?;

        let host1 = b_mid.dilate_by_unit(c2 * c3)?;
        let host2 = b_mid.dilate_by_unit(c1 * c3)?;
        let mut host3 = b_low.dilate_by_unit(c1 * c2)?;
        for h in [&host1, &host2, &host3] {
            if !setops::is_subset(h.members(), b_outer.members()) {
                return Err(CoreError::StepFailure(
                    "coefficient image escaped the outer host".into(),
                ));
            }
        }

        let counts = [
            correlation_counts(group, &set, host1.members()),
            correlation_counts(group, &set, host2.members()),
            correlation_counts(group, &set, host3.members()),
        ];

        // Direct translate branch.
        let mut best_ratio = f64::NEG_INFINITY;
        let mut best_host = 0usize;
        let mut best_x = 0u64;
        {
            let hosts = [&host1, &host2, &host3];
            for (i, host) in hosts.iter().enumerate() {
                let hl = host.len() as f64;
                for x in 0..n {
                    let r = counts[i][x as usize] as f64 / hl;
                    if r > best_ratio {
                        best_ratio = r;
                        best_host = i;
                        best_x = x;
                    }
                }
            }
        }
        if best_ratio >= (1.0 + params.c_impl) * alpha * (1.0 - 1e-12) {
            let host = match best_host {
                0 => &host1,
                1 => &host2,
                _ => &host3,
            };
            let next = fiber(group, &set, best_x, host.members());
            let new_density = next.len() as f64 / host.len() as f64;
            let next_upsilon = count_solutions(group, &next, coeffs)?;
            if next_upsilon > upsilon {
                return Err(CoreError::Internal(
                    "solution count increased along a translate step".into(),
                ));
            }
            steps.push(make_step(
                StepKind::SupIncrement,
                &HostDescr::from_z(host),
                next.clone(),
                new_density,
                best_x,
                1,
                group.neg(best_x),
                0,
                0.0,
                0.0,
                new_density / alpha - 1.0,
                false,
            ));
            bohr = host.clone();
            set = next;
            density = new_density;
            upsilon = next_upsilon;
            continue;
        }

        // Mean point over the current host.
        let mut xstar = bohr.members()[0];
        let mut xstar_score = f64::NEG_INFINITY;
        {
            let hosts = [&host1, &host2, &host3];
            for &x in bohr.members() {
                let score: f64 = (0..3)
                    .map(|i| counts[i][x as usize] as f64 / hosts[i].len() as f64)
                    .sum();
                if score > xstar_score {
                    xstar_score = score;
                    xstar = x;
                }
            }
        }

        // Counting instance, with one ladder rebuild if the addition
        // hypothesis misses with the estimated density floor.
        let mut round: Option<RoundOutcome> = None;
        for attempt in 0..2 {
            let x1 = fiber(group, &set, xstar, host1.members());
            let x2 = fiber(group, &set, xstar, host2.members());
            let x3 = fiber(group, &set, xstar, host3.members());
            if x1.is_empty() || x2.is_empty() || x3.is_empty() {
                break;
            }
            let p123 = c1 * c2 * c3;
            let m_host = b_mid.dilate_by_unit(p123)?;
            let m_inner = b_low.dilate_by_unit(p123)?;
            let ma1 = setops::dilate_set(group, c3, &x3);
            let ma2 = setops::dilate_set(group, c2, &x2);
            let ma3 = setops::dilate_set(group, -c1, &x1);
            if !setops::is_subset(&ma1, m_inner.members())
                || !setops::is_subset(&ma2, m_host.members())
                || !setops::is_subset(&ma3, m_host.members())
            {
                return Err(CoreError::Internal(
                    "coefficient bookkeeping failed: slot escaped its host".into(),
                ));
            }
            let beta1 = ma1.len() as f64 / m_inner.len() as f64;
            let beta2 = ma2.len() as f64 / m_host.len() as f64;
            let beta3 = ma3.len() as f64 / m_host.len() as f64;
            let am = 0.5 * 2f64.powi(-5).min(beta1).min(beta2).min(beta3);
            let excess = sumset_excess(group, m_inner.members(), m_host.members())? as f64;
            if excess > 2f64.powi(-2) * am * m_host.len() as f64 * (1.0 + 1e-9) {
                if attempt == 0 && am < am_est {
                    lo_c *= am / am_est;
                    hi_c *= am / am_est;
                    b_low = regular_in(&b_mid, lo_c, hi_c, params.grid)?;
                    host3 = b_low.dilate_by_unit(c1 * c2)?;
                    if !setops::is_subset(host3.members(), b_outer.members()) {
                        return Err(CoreError::StepFailure(
                            "coefficient image escaped the outer host".into(),
                        ));
                    }
                    continue;
                }
                break;
            }

            let grid = params.grid;
            let m_inner_clone = m_inner.clone();
            let make_candidates = |an: &ThdeAnalysis| -> Result<Vec<(HostDescr, usize)>> {
                let mut out = Vec::new();
                let lambda = dedup_sorted(&an.lambda);
                let ctrl_width = 1.0 / (4.0 * an.d_used as f64);
                if let Ok(meet) =
                    m_inner_clone.meet(&lambda, &vec![ctrl_width; lambda.len()])
                {
                    if let Ok(regular) = meet.find_regular_dilate_in(0.25, 0.5, grid) {
                        out.push((HostDescr::from_z(&regular), an.lambda.len()));
                    }
                }
                out.push((HostDescr::from_z(&origin_bohr_z(group)?), an.lambda.len() + 1));
                Ok(out)
            };
            let instance = TerminalInstance {
                a1: ma1.clone(),
                a2: ma2.clone(),
                a3: ma3.clone(),
                host_size: m_host.len(),
                inner_host_size: m_inner.len(),
            };
            round = Some(counting_round(
                group,
                &ma1,
                &ma2,
                &ma3,
                m_inner.members(),
                m_host.members(),
                make_candidates,
                xstar,
                c2,
                -c1,
                alpha,
                params.c_impl,
                instance,
                step_seed(params.seed, k),
            )?);
            break;
        }

        match round {
            Some(RoundOutcome::Terminal(mut step)) => {
                step.bohr_freqs = host_now.freqs.clone();
                step.bohr_widths = host_now.widths.clone();
                step.bohr_members = host_now.members.clone();
                step.set = set.clone();
                step.density = density;
                step.rank = host_now.rank;
                step.delta = host_now.scale;
                let count = step.terminal_count.unwrap_or(0.0);
                if count > upsilon as f64 {
                    return Err(CoreError::Internal(format!(
                        "trilinear count {count} exceeded the invariant count {upsilon}"
                    )));
                }
                steps.push(step);
                break;
            }
            Some(RoundOutcome::Advance {
                host,
                next,
                new_density,
                translate,
                dilate,
                affine_shift,
                lambda_size,
                nu,
                tau,
                c_step,
                empirical,
            }) => {
                let image = setops::translate_set(
                    group,
                    &setops::dilate_set(group, dilate, &set),
                    affine_shift,
                );
                if !setops::is_subset(&next, &image) {
                    return Err(CoreError::Internal(
                        "affine bookkeeping failed: new set escapes the image".into(),
                    ));
                }
                let next_upsilon = count_solutions(group, &next, coeffs)?;
                if next_upsilon > upsilon {
                    return Err(CoreError::Internal(
                        "solution count increased along a spectral step".into(),
                    ));
                }
                let new_bohr = bohr_z(group, &host.freqs, &host.widths)?;
                if new_bohr.members() != host.members.as_slice() {
                    return Err(CoreError::Internal(
                        "host reconstruction from frequencies disagreed with members".into(),
                    ));
                }
                steps.push(make_step(
                    StepKind::SpectralIncrement,
                    &host,
                    next.clone(),
                    new_density,
                    translate,
                    dilate,
                    affine_shift,
                    lambda_size,
                    nu,
                    tau,
                    c_step,
                    empirical,
                ));
                bohr = new_bohr;
                set = next;
                density = new_density;
                upsilon = next_upsilon;
                continue;
            }
            Some(RoundOutcome::Unavailable) | None => {}
        }

        // Fallback: best direct translate with any strict improvement,
        // else a trivially verified terminal.
        if best_ratio > alpha * (1.0 + 1e-9) {
            let host = match best_host {
                0 => &host1,
                1 => &host2,
                _ => &host3,
            };
            let next = fiber(group, &set, best_x, host.members());
            let new_density = next.len() as f64 / host.len() as f64;
            let next_upsilon = count_solutions(group, &next, coeffs)?;
            if next_upsilon > upsilon {
                return Err(CoreError::Internal(
                    "solution count increased along a translate step".into(),
                ));
            }
            steps.push(make_step(
                StepKind::SupIncrement,
                &HostDescr::from_z(host),
                next.clone(),
                new_density,
                best_x,
                1,
                group.neg(best_x),
                0,
                0.0,
                0.0,
                new_density / alpha - 1.0,
                true,
            ));
            bohr = host.clone();
            set = next;
            density = new_density;
            upsilon = next_upsilon;
            continue;
        }
        steps.push(trivial_terminal(
            group, coeffs, &host_now, &set, density, true,
        )?);
        break;
    }

    if steps
        .last()
        .map(|s| s.kind != StepKind::TerminalCount)
        .unwrap_or(true)
    {
        let host_now = HostDescr::from_z(&bohr);
        steps.push(trivial_terminal(
            group, coeffs, &host_now, &set, density, true,
        )?);
    }

    Ok(IncrementTrace {
        group: group.clone(),
        coeffs,
        initial_set: a0,
        initial_density,
        params: *params,
        steps,
    })
}

// ---------------------------------------------------------------------------
// Vector-group driver
// ---------------------------------------------------------------------------

/// Runs the density-increment iteration on a vector group over an odd
/// prime. Scalar dilates of subspaces are the identity, so the three
/// coefficient images coincide with the current subspace and every
/// addition hypothesis of the counting step holds exactly; increments set
/// the new host to the subspace annihilated by the covering generators.
pub fn driver_fpn(
    group: &Group,
    a: &[u64],
    coeffs: EquationCoeffs,
    params: &DriverParams,
) -> Result<IncrementTrace> {
    let (base, dim) = match group {
        Group::Vector { base, dim } => (*base, *dim),
        Group::Cyclic { .. } => return Err(CoreError::GroupMismatch),
    };
    if base == 2 {
        return Err(CoreError::HypothesisViolated(
            "vector driver needs an odd prime base".into(),
        ));
    }
    if group.order() > DRIVER_MAX_VECTOR_ORDER {
        return Err(CoreError::TooLarge {
            what: "driver order",
            size: group.order(),
            cap: DRIVER_MAX_VECTOR_ORDER,
        });
    }
    coeffs.validate(group)?;
    params.validate()?;
    let a0 = checked_set(group, a)?;
    if a0.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    let n = group.order();
    let [c1, c2, c3] = coeffs.c;

    let mut space = bohr_f(group, &[])?;
    let mut set = a0.clone();
    let mut density = set.len() as f64 / n as f64;
    let mut upsilon = count_solutions(group, &set, coeffs)?;
    let initial_density = density;
    let mut steps: Vec<TraceStep> = Vec::new();

    while steps.len() < params.max_steps {
        let host_now = HostDescr::from_f(&space);
        if set.len() <= 2 {
            steps.push(trivial_terminal(
                group, coeffs, &host_now, &set, density, false,
            )?);
            break;
        }
        let alpha = density;
        let k = steps.len();

        // Scalar dilates of a subspace are the subspace itself; verify.
        for c in [c1, c2, c3, c1 * c2 * c3] {
            if space.scaled(c)? != space.members() {
                return Err(CoreError::Internal(
                    "subspace was not scalar-dilate invariant".into(),
                ));
            }
        }

        let counts = correlation_counts(group, &set, space.members());

        // Direct translate branch.
        let size = space.len() as f64;
        let mut best_ratio = f64::NEG_INFINITY;
        let mut best_x = 0u64;
        for x in 0..n {
            let r = counts[x as usize] as f64 / size;
            if r > best_ratio {
                best_ratio = r;
                best_x = x;
            }
        }
        if best_ratio >= (1.0 + params.c_impl) * alpha * (1.0 - 1e-12) {
            let next = fiber(group, &set, best_x, space.members());
            let new_density = next.len() as f64 / size;
            let next_upsilon = count_solutions(group, &next, coeffs)?;
            if next_upsilon > upsilon {
                return Err(CoreError::Internal(
                    "solution count increased along a translate step".into(),
                ));
            }
            steps.push(make_step(
                StepKind::SupIncrement,
                &host_now,
                next.clone(),
                new_density,
                best_x,
                1,
                group.neg(best_x),
                0,
                0.0,
                0.0,
                new_density / alpha - 1.0,
                false,
            ));
            set = next;
            density = new_density;
            upsilon = next_upsilon;
            continue;
        }

        // Mean point over the current subspace.
        let mut xstar = space.members()[0];
        let mut xstar_score = 0u64;
        for &x in space.members() {
            if counts[x as usize] > xstar_score {
                xstar_score = counts[x as usize];
                xstar = x;
            }
        }

        let x_fiber = fiber(group, &set, xstar, space.members());
        let round = if x_fiber.is_empty() {
            RoundOutcome::Unavailable
        } else {
            let ma1 = setops::dilate_set(group, c3, &x_fiber);
            let ma2 = setops::dilate_set(group, c2, &x_fiber);
            let ma3 = setops::dilate_set(group, -c1, &x_fiber);
            for s in [&ma1, &ma2, &ma3] {
                if !setops::is_subset(s, space.members()) {
                    return Err(CoreError::Internal(
                        "scalar image escaped the subspace".into(),
                    ));
                }
            }
            let gamma_now = space.gamma().to_vec();
            let make_candidates = |an: &ThdeAnalysis| -> Result<Vec<(HostDescr, usize)>> {
                let mut out = Vec::new();
                let lambda = dedup_sorted(&an.lambda);
                let mut gens = gamma_now.clone();
                gens.extend_from_slice(&lambda);
                let gens = dedup_sorted(&gens);
                if let Ok(sub) = bohr_f(group, &gens) {
                    out.push((HostDescr::from_f(&sub), an.lambda.len()));
                }
                out.push((
                    HostDescr::from_f(&origin_space_f(group)?),
                    an.lambda.len() + dim as usize,
                ));
                Ok(out)
            };
            let instance = TerminalInstance {
                a1: ma1.clone(),
                a2: ma2.clone(),
                a3: ma3.clone(),
                host_size: space.len(),
                inner_host_size: space.len(),
            };
            counting_round(
                group,
                &ma1,
                &ma2,
                &ma3,
                space.members(),
                space.members(),
                make_candidates,
                xstar,
                c2,
                -c1,
                alpha,
                params.c_impl,
                instance,
                step_seed(params.seed, k),
            )?
        };

        match round {
            RoundOutcome::Terminal(mut step) => {
                step.bohr_freqs = host_now.freqs.clone();
                step.bohr_widths = host_now.widths.clone();
                step.bohr_members = host_now.members.clone();
                step.set = set.clone();
                step.density = density;
                step.rank = host_now.rank;
                step.delta = host_now.scale;
                let count = step.terminal_count.unwrap_or(0.0);
                if count > upsilon as f64 {
                    return Err(CoreError::Internal(format!(
                        "trilinear count {count} exceeded the invariant count {upsilon}"
                    )));
                }
                steps.push(step);
                break;
            }
            RoundOutcome::Advance {
                host,
                next,
                new_density,
                translate,
                dilate,
                affine_shift,
                lambda_size,
                nu,
                tau,
                c_step,
                empirical,
            } => {
                let image = setops::translate_set(
                    group,
                    &setops::dilate_set(group, dilate, &set),
                    affine_shift,
                );
                if !setops::is_subset(&next, &image) {
                    return Err(CoreError::Internal(
                        "affine bookkeeping failed: new set escapes the image".into(),
                    ));
                }
                let next_upsilon = count_solutions(group, &next, coeffs)?;
                if next_upsilon > upsilon {
                    return Err(CoreError::Internal(
                        "solution count increased along a spectral step".into(),
                    ));
                }
                let new_space = bohr_f(group, &host.freqs)?;
                if new_space.members() != host.members.as_slice() {
                    return Err(CoreError::Internal(
                        "subspace reconstruction disagreed with members".into(),
                    ));
                }
                steps.push(make_step(
                    StepKind::SpectralIncrement,
                    &host,
                    next.clone(),
                    new_density,
                    translate,
                    dilate,
                    affine_shift,
                    lambda_size,
                    nu,
                    tau,
                    c_step,
                    empirical,
                ));
                space = new_space;
                set = next;
                density = new_density;
                upsilon = next_upsilon;
                continue;
            }
            RoundOutcome::Unavailable => {
                if best_ratio > alpha * (1.0 + 1e-9) {
                    let next = fiber(group, &set, best_x, space.members());
                    let new_density = next.len() as f64 / size;
                    let next_upsilon = count_solutions(group, &next, coeffs)?;
                    if next_upsilon > upsilon {
                        return Err(CoreError::Internal(
                            "solution count increased along a translate step".into(),
                        ));
                    }
                    steps.push(make_step(
                        StepKind::SupIncrement,
                        &host_now,
                        next.clone(),
                        new_density,
                        best_x,
                        1,
                        group.neg(best_x),
                        0,
                        0.0,
                        0.0,
                        new_density / alpha - 1.0,
                        true,
                    ));
                    set = next;
                    density = new_density;
                    upsilon = next_upsilon;
                    continue;
                }
                steps.push(trivial_terminal(
                    group, coeffs, &host_now, &set, density, true,
                )?);
                break;
            }
        }
    }

    if steps
        .last()
        .map(|s| s.kind != StepKind::TerminalCount)
        .unwrap_or(true)
    {
        let host_now = HostDescr::from_f(&space);
        steps.push(trivial_terminal(
            group, coeffs, &host_now, &set, density, true,
        )?);
    }

    Ok(IncrementTrace {
        group: group.clone(),
        coeffs,
        initial_set: a0,
        initial_density,
        params: *params,
        steps,
    })
}

// ---------------------------------------------------------------------------
// Trace verification
// ---------------------------------------------------------------------------

/// Recomputes every claim in a trace from scratch: densities, per-step
/// growth, rank bookkeeping against the declared generator counts, the
/// affine containment that makes the solution count non-increasing, the
/// terminal recount, and the overall length bound.
pub fn verify_trace(trace: &IncrementTrace) -> Result<TraceCheck> {
    let group = &trace.group;
    let mut issues: Vec<String> = Vec::new();
    trace.coeffs.validate(group)?;
    trace.params.validate()?;
    let initial = checked_set(group, &trace.initial_set)?;
    if initial.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    let n = group.order() as f64;
    let alpha0 = initial.len() as f64 / n;
    if (trace.initial_density - alpha0).abs() > 1e-9 * (1.0 + alpha0) {
        issues.push(format!(
            "initial density {} != |A|/N = {}",
            trace.initial_density, alpha0
        ));
    }
    if trace.steps.is_empty() {
        issues.push("trace has no steps".into());
    }

    let mut prev_set = initial.clone();
    let mut prev_density = alpha0;
    let mut prev_rank = 0usize;
    let mut prev_upsilon = count_solutions(group, &initial, trace.coeffs)?;
    let mut min_c = trace.params.c_impl;

    for (k, step) in trace.steps.iter().enumerate() {
        let members = match checked_set(group, &step.bohr_members) {
            Ok(m) => m,
            Err(e) => {
                issues.push(format!("step {k}: bad host set: {e}"));
                continue;
            }
        };
        if members.is_empty() {
            issues.push(format!("step {k}: empty host"));
            continue;
        }
        let set = match checked_set(group, &step.set) {
            Ok(s) => s,
            Err(e) => {
                issues.push(format!("step {k}: bad set: {e}"));
                continue;
            }
        };
        if !setops::is_subset(&set, &members) {
            issues.push(format!("step {k}: set not inside its host"));
        }
        let density = set.len() as f64 / members.len() as f64;
        if (density - step.density).abs() > 1e-9 * (1.0 + density) {
            issues.push(format!(
                "step {k}: recorded density {} != recomputed {}",
                step.density, density
            ));
        }

        match step.kind {
            StepKind::TerminalCount => {
                if k + 1 != trace.steps.len() {
                    issues.push(format!("step {k}: terminal before the last step"));
                }
                if set != prev_set {
                    issues.push(format!("step {k}: terminal changed the set"));
                }
                let count = match step.terminal_count {
                    Some(c) => c,
                    None => {
                        issues.push(format!("step {k}: terminal without a count"));
                        continue;
                    }
                };
                let bound = match step.terminal_bound {
                    Some(b) => b,
                    None => {
                        issues.push(format!("step {k}: terminal without a bound"));
                        continue;
                    }
                };
                if count < bound * (1.0 - 1e-9) {
                    issues.push(format!(
                        "step {k}: terminal count {count} below its bound {bound}"
                    ));
                }
                match &step.terminal_instance {
                    Some(inst) => {
                        let recount =
                            trilinear_count(group, &inst.a1, &inst.a2, &inst.a3)? as f64;
                        if (recount - count).abs() > 0.5 {
                            issues.push(format!(
                                "step {k}: terminal recount {recount} != recorded {count}"
                            ));
                        }
                        let b1 = inst.a1.len() as f64 / inst.inner_host_size as f64;
                        let b2 = inst.a2.len() as f64 / inst.host_size as f64;
                        let b3 = inst.a3.len() as f64 / inst.host_size as f64;
                        let rebound = 2f64.powi(-2)
                            * b1
                            * b2
                            * b3
                            * inst.host_size as f64
                            * inst.inner_host_size as f64;
                        if (rebound - bound).abs() > 1e-9 * (1.0 + rebound) {
                            issues.push(format!(
                                "step {k}: terminal bound {bound} != recomputed {rebound}"
                            ));
                        }
                        if count > prev_upsilon as f64 + 0.5 {
                            issues.push(format!(
                                "step {k}: terminal count {count} exceeds the invariant \
                                 count {prev_upsilon}"
                            ));
                        }
                    }
                    None => {
                        let upsilon = count_solutions(group, &prev_set, trace.coeffs)? as f64;
                        if (count - upsilon).abs() > 0.5 {
                            issues.push(format!(
                                "step {k}: trivial terminal count {count} != recomputed {upsilon}"
                            ));
                        }
                        if (bound - prev_set.len() as f64).abs() > 0.5 {
                            issues.push(format!(
                                "step {k}: trivial terminal bound {bound} != set size {}",
                                prev_set.len()
                            ));
                        }
                    }
                }
            }
            StepKind::SupIncrement | StepKind::SpectralIncrement => {
                if set.is_empty() {
                    issues.push(format!("step {k}: empty increment set"));
                    continue;
                }
                if step.c_step <= 0.0 {
                    issues.push(format!("step {k}: non-positive growth {}", step.c_step));
                }
                if !step.empirical && step.c_step < trace.params.c_impl * (1.0 - 1e-9) {
                    issues.push(format!(
                        "step {k}: declared growth {} below the driver constant {}",
                        step.c_step, trace.params.c_impl
                    ));
                }
                if density < (1.0 + step.c_step) * prev_density * (1.0 - 1e-9) {
                    issues.push(format!(
                        "step {k}: density {density} below (1 + {}) * {prev_density}",
                        step.c_step
                    ));
                }
                if step.rank > prev_rank + step.lambda_size {
                    issues.push(format!(
                        "step {k}: rank {} exceeds previous rank {} plus generators {}",
                        step.rank, prev_rank, step.lambda_size
                    ));
                }
                if !group.is_unit_scalar(step.dilate) {
                    issues.push(format!("step {k}: dilate {} is not a unit", step.dilate));
                } else {
                    let image = setops::translate_set(
                        group,
                        &setops::dilate_set(group, step.dilate, &prev_set),
                        step.affine_shift,
                    );
                    if !setops::is_subset(&set, &image) {
                        issues.push(format!(
                            "step {k}: set is not inside the affine image of its predecessor"
                        ));
                    }
                }
                let upsilon = count_solutions(group, &set, trace.coeffs)?;
                if upsilon > prev_upsilon {
                    issues.push(format!(
                        "step {k}: solution count {upsilon} rose above {prev_upsilon}"
                    ));
                }
                if step.c_step > 0.0 {
                    min_c = min_c.min(step.c_step);
                }
                prev_set = set;
                prev_density = density;
                prev_rank = step.rank;
                prev_upsilon = upsilon;
            }
        }
    }

    if let Some(last) = trace.steps.last() {
        if last.kind != StepKind::TerminalCount {
            issues.push("trace does not end in a terminal".into());
        }
    }

    let length_bound = if alpha0 >= 1.0 {
        1usize
    } else {
        let raw = ((1.0 / alpha0).ln() / (1.0 + min_c).ln()).ceil();
        if raw.is_finite() && (0.0..1e15).contains(&raw) {
            raw as usize + 1
        } else {
            usize::MAX
        }
    };
    if trace.steps.len() > length_bound {
        issues.push(format!(
            "trace length {} exceeds the bound {}",
            trace.steps.len(),
            length_bound
        ));
    }

    Ok(TraceCheck {
        ok: issues.is_empty(),
        issues,
        steps: trace.steps.len(),
        length_bound,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, vector_group};

    fn z(n: u64) -> Group {
        cyclic_group(n).unwrap()
    }

    #[test]
    fn coeff_validation() {
        let g = z(7);
        assert!(EquationCoeffs::new(&g, 1, 1, -1).is_err());
        assert!(matches!(
            EquationCoeffs::new(&g, 7, 1, -8),
            Err(CoreError::CoefficientNotUnit(7))
        ));
        assert!(EquationCoeffs::standard(&g).is_ok());
        // -2 is zero in a base-2 vector group.
        let g2 = vector_group(2, 3).unwrap();
        assert!(EquationCoeffs::standard(&g2).is_err());
    }

    #[test]
    fn frozen_solution_counts() {
        let g = z(7);
        let c = EquationCoeffs::standard(&g).unwrap();
        assert_eq!(count_solutions(&g, &[0, 1, 2], c).unwrap(), 5);
        let whole: Vec<u64> = (0..7).collect();
        assert_eq!(count_solutions(&g, &whole, c).unwrap(), 49);
        assert_eq!(count_solutions(&g, &[3], c).unwrap(), 1);
        let g11 = z(11);
        let c11 = EquationCoeffs::standard(&g11).unwrap();
        let whole11: Vec<u64> = (0..11).collect();
        assert_eq!(count_solutions(&g11, &whole11, c11).unwrap(), 121);
    }

    #[test]
    fn diagonal_lower_bound_and_invariance() {
        let g = z(101);
        let c = EquationCoeffs::standard(&g).unwrap();
        let a = [1u64, 3, 4, 9, 11, 40];
        let count = count_solutions(&g, &a, c).unwrap();
        assert!(count >= a.len() as u64);
        assert!(upsilon_invariance(&g, &a, c, 5, 3).unwrap());
        assert!(upsilon_invariance(&g, &a, c, 100, -7).unwrap());
    }

    #[test]
    fn vector_group_counts() {
        let g = vector_group(3, 2).unwrap();
        let c = EquationCoeffs::standard(&g).unwrap();
        // The line {(0,0), (1,0), (2,0)}: every (x1, x2) pair determines x3
        // on the line, so 9 solutions.
        assert_eq!(count_solutions(&g, &[0, 1, 2], c).unwrap(), 9);
        assert!(upsilon_invariance(&g, &[0, 1, 2], c, 4, 2).unwrap());
    }

    #[test]
    fn trilinear_oracle() {
        let g = z(5);
        assert_eq!(
            trilinear_count(&g, &[0, 1], &[0, 2], &[1, 3]).unwrap(),
            2
        );
    }

    #[test]
    fn balanced_indicator_properties() {
        let g = z(11);
        let (bal, alpha) = balanced_indicator(&g, &[1, 2], &[0, 1, 2, 3]).unwrap();
        assert!((alpha - 0.5).abs() < 1e-12);
        let total: f64 = bal.values().iter().map(|v| v.re).sum();
        assert!(total.abs() < 1e-9);
        assert!(balanced_indicator(&g, &[5], &[0, 1]).is_err());
    }

    #[test]
    fn de1_zero_nu_is_the_mean_argument() {
        let g = z(11);
        let a: Vec<u64> = vec![0, 1, 2, 3];
        let f = DensityFn::indicator(g.clone(), &a).unwrap();
        let whole: Vec<u64> = (0..11).collect();
        let out = de1_l2_increment(&f, &whole, &[], 0.0, &[0, 1, 10]).unwrap();
        match out {
            De1Outcome::Witness(w) => {
                assert!(w.value >= w.target * (1.0 - 1e-12));
                assert!(!w.h2_alternative_differs);
            }
            De1Outcome::HypothesisUnmet { .. } => panic!("hypotheses should hold"),
        }
    }

    #[test]
    fn de1_half_size_readings_diverge() {
        let g = z(101);
        let b = bohr_z(&g, &[3], &[0.8]).unwrap();
        let b_small = b.dilate(0.5).unwrap();
        let host = b.members().to_vec();
        let inner = b_small.members().to_vec();
        assert!(inner.len() * 2 < host.len());
        // Half of the host, biased to one side.
        let a: Vec<u64> = host.iter().copied().take(host.len() / 2).collect();
        let f = DensityFn::indicator(g.clone(), &a).unwrap();
        let out = de1_l2_increment(&f, &host, &[3, 98], 1e-3, &inner).unwrap();
        match out {
            De1Outcome::HypothesisUnmet {
                failed,
                h2_alternative_differs,
            } => {
                assert!(failed.iter().any(|f| f.name == "half-size"));
                assert!(h2_alternative_differs);
            }
            De1Outcome::Witness(_) => panic!("ambient-cardinality reading must fail here"),
        }
    }

    #[test]
    fn de2_covered_characters_keep_half_the_sum() {
        let g = z(211);
        let cert = CoverCertificate {
            lambda: vec![5],
            gamma: vec![0],
            d: 1,
            covered_set: vec![0, 5, 206],
        };
        let b = bohr_z(&g, &[5], &[0.25]).unwrap();
        let report = de2_control_from_cover(&g, &cert, b.members()).unwrap();
        assert!(report.holds, "failures: {:?}", report.failures);
        assert!(report.min_ratio >= 0.5);
    }

    #[test]
    fn de3_spectrum_control_from_addition() {
        let g = z(101);
        let b = bohr_z(&g, &[1], &[1.0]).unwrap();
        let b_prime = bohr_z(&g, &[1], &[0.1]).unwrap();
        let report =
            de3_control_from_addition(&g, b.members(), b_prime.members(), 0.6, 0.5).unwrap();
        assert!(report.holds, "worst: {:?}", report.worst);
        assert!(report.spectrum_size >= 1);
    }

    #[test]
    fn thde_whole_group_increment_to_origin() {
        let g = z(101);
        let whole: Vec<u64> = (0..101).collect();
        let a: Vec<u64> = (0..101).step_by(5).map(|x| x as u64).collect();
        let f = DensityFn::indicator(g.clone(), &a).unwrap();
        let analysis = thde_analyze(&g, &a, &whole, &f, &whole, 7).unwrap();
        assert!(analysis.nu > 0.0);
        let outcome = thde_apply(&analysis, &[0]).unwrap();
        match outcome {
            ThdeOutcome::Witness(w) => {
                assert_eq!(w.x, 0, "smallest witness translate is 0 since 0 is in a");
                assert!((w.new_density - 1.0).abs() < 1e-12);
                assert!(w.target < 1.0);
            }
            ThdeOutcome::HypothesisUnmet { failed } => {
                panic!("one-point host must satisfy every hypothesis: {failed:?}")
            }
        }
    }

    #[test]
    fn maindi_dense_sets_have_many_solutions() {
        let g = z(11);
        let whole: Vec<u64> = (0..11).collect();
        let out =
            maindi_analyze(&g, &whole, &whole, &whole, &whole, &whole, 1).unwrap();
        match out {
            MaindiAnalysis::ManySolutions { count, bound } => {
                assert_eq!(count, 121);
                assert!(bound <= 121.0);
            }
            MaindiAnalysis::NeedIncrement(_) => panic!("the whole group is dense"),
        }
    }

    #[test]
    fn maindi_disjoint_slots_need_increment() {
        let g = z(101);
        let whole: Vec<u64> = (0..101).collect();
        let a1 = vec![0u64];
        let a2: Vec<u64> = (1..21).collect();
        let a3: Vec<u64> = (60..71).collect();
        let out = maindi_step(&g, &a1, &a2, &a3, &whole, &whole, &[0], 3).unwrap();
        match out {
            MaindiStepOutcome::Increment { slot, witness, .. } => {
                assert!(slot == 2 || slot == 3);
                assert!((witness.new_density - 1.0).abs() < 1e-12);
            }
            other => panic!("expected an increment, got {other:?}"),
        }
    }

    #[test]
    fn driver_dense_set_terminates_immediately() {
        let g = z(101);
        let c = EquationCoeffs::standard(&g).unwrap();
        let a: Vec<u64> = (0..80).collect();
        let trace = driver_zn(&g, &a, c, &DriverParams::default()).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].kind, StepKind::TerminalCount);
        assert!(trace.steps[0].terminal_instance.is_some());
        let check = verify_trace(&trace).unwrap();
        assert!(check.ok, "issues: {:?}", check.issues);
    }

    #[test]
    fn driver_progression_free_set_verifies() {
        let g = z(41);
        let c = EquationCoeffs::standard(&g).unwrap();
        let a = [1u64, 2, 4, 8, 9];
        let trace = driver_zn(&g, &a, c, &DriverParams::default()).unwrap();
        assert_eq!(
            trace.steps.last().unwrap().kind,
            StepKind::TerminalCount
        );
        let check = verify_trace(&trace).unwrap();
        assert!(check.ok, "issues: {:?}", check.issues);
    }

    #[test]
    fn driver_vector_group_runs_and_verifies() {
        let g = vector_group(3, 2).unwrap();
        let c = EquationCoeffs::standard(&g).unwrap();
        // A 4-point set with only diagonal solutions (a cap): indices for
        // (0,0), (1,0), (0,1), (1,1); no three distinct points sum to zero.
        let a = [0u64, 1, 3, 4];
        assert_eq!(count_solutions(&g, &a, c).unwrap(), 4);
        let trace = driver_fpn(&g, &a, c, &DriverParams::default()).unwrap();
        assert_eq!(
            trace.steps.last().unwrap().kind,
            StepKind::TerminalCount
        );
        let check = verify_trace(&trace).unwrap();
        assert!(check.ok, "issues: {:?}", check.issues);
    }

    #[test]
    fn verify_trace_rejects_tampering() {
        let g = z(101);
        let c = EquationCoeffs::standard(&g).unwrap();
        let a: Vec<u64> = (0..80).collect();
        let mut trace = driver_zn(&g, &a, c, &DriverParams::default()).unwrap();
        trace.steps[0].terminal_count = Some(1.0);
        let check = verify_trace(&trace).unwrap();
        assert!(!check.ok);
    }

    #[test]
    fn origin_hosts_are_single_points() {
        let g = z(101);
        assert_eq!(origin_bohr_z(&g).unwrap().members(), &[0]);
        let gf = vector_group(3, 3).unwrap();
        assert_eq!(origin_space_f(&gf).unwrap().members(), &[0]);
    }
}
