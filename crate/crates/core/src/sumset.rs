//! Arithmetic progressions in sumsets.
//!
//! Integer side: sumsets of integer sets and the longest arithmetic
//! progression inside a set, found by a per-difference dynamic program
//! with a brute-force cross-check for small inputs. Group side: a
//! covering dichotomy for sumsets of dense subsets of a Bohr set —
//! either the sumset covers almost all of a regular dilate, or a
//! verified density increment on a smaller host improves the product of
//! the two densities — and a bounded iteration harness on top of it.

use serde::{Deserialize, Serialize};

use crate::bohr::BohrSetZ;
use crate::density::DensityFn;
use crate::error::{CoreError, Result};
use crate::fourier::dft;
use crate::group::{checked_set, Group};
use crate::setops;

/// Largest integer value the progression scanner accepts.
pub const AP_RANGE_CAP: u64 = 5_000_000;
/// Largest cyclic modulus the covering dichotomy accepts.
pub const ITSA_MAX_MODULUS: u64 = 1021;

// ---------------------------------------------------------------------------
// Integer sumsets and progressions
// ---------------------------------------------------------------------------

/// An arithmetic progression `start, start + diff, ..` of `len` terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApWitness {
    pub start: u64,
    pub diff: u64,
    pub len: usize,
}

impl ApWitness {
    /// The progression's elements.
    pub fn elements(&self) -> Vec<u64> {
        (0..self.len as u64).map(|k| self.start + k * self.diff).collect()
    }
}

fn checked_ints(set: &[u64]) -> Result<Vec<u64>> {
    let mut v = set.to_vec();
    v.sort_unstable();
    for w in v.windows(2) {
        if w[0] == w[1] {
            return Err(CoreError::BadElement(w[0]));
        }
    }
    if let Some(&top) = v.last() {
        if top > AP_RANGE_CAP {
            return Err(CoreError::TooLarge {
                what: "integer range",
                size: top,
                cap: AP_RANGE_CAP,
            });
        }
    }
    Ok(v)
}

/// The sumset `{x + y}` of two integer sets, sorted and deduplicated,
/// computed through a bitset over the value range.
pub fn sumset_ints(a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
    let a = checked_ints(a)?;
    let b = checked_ints(b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let top = a.last().unwrap() + b.last().unwrap();
    if top > 2 * AP_RANGE_CAP {
        return Err(CoreError::TooLarge {
            what: "sumset range",
            size: top,
            cap: 2 * AP_RANGE_CAP,
        });
    }
    let mut seen = vec![false; top as usize + 1];
    for &x in &a {
        for &y in &b {
            seen[(x + y) as usize] = true;
        }
    }
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(v, _)| v as u64)
        .collect())
}

/// Longest arithmetic progression inside an integer set, by dynamic
/// programming per difference: walking the set in order, a progression
/// ending at `x` with difference `d` extends one ending at `x - d`.
/// Differences are scanned ascending and abandoned as soon as even the
/// shortest candidate no longer fits the value range.
pub fn longest_ap(set: &[u64]) -> Result<ApWitness> {
    let v = checked_ints(set)?;
    if v.is_empty() {
        return Ok(ApWitness {
            start: 0,
            diff: 0,
            len: 0,
        });
    }
    if v.len() == 1 {
        return Ok(ApWitness {
            start: v[0],
            diff: 0,
            len: 1,
        });
    }
    let lo = v[0];
    let hi = *v.last().unwrap();
    let range = hi - lo;
    let m = range as usize + 1;
    let mut member = vec![false; m];
    for &x in &v {
        member[(x - lo) as usize] = true;
    }
    let mut best = ApWitness {
        start: v[0],
        diff: 0,
        len: 1,
    };
    // Lazily-reset DP table: an entry is valid only when its stamp
    // matches the current difference.
    let mut lens = vec![0u32; m];
    let mut stamps = vec![0u64; m];
    for d in 1..=range.max(1) {
        if d * best.len as u64 > range {
            break;
        }
        for &x in &v {
            let i = (x - lo) as usize;
            let prev = if x - lo >= d {
                let j = (x - lo - d) as usize;
                if member[j] && stamps[j] == d {
                    lens[j]
                } else {
                    0
                }
            } else {
                0
            };
            lens[i] = prev + 1;
            stamps[i] = d;
            if lens[i] as usize > best.len {
                best = ApWitness {
                    start: x - (lens[i] as u64 - 1) * d,
                    diff: d,
                    len: lens[i] as usize,
                };
            }
        }
    }
    Ok(best)
}

/// Brute-force progression scan for cross-checking [`longest_ap`]:
/// extends every (start, difference) pair directly.
pub fn longest_ap_brute(set: &[u64]) -> Result<ApWitness> {
    let v = checked_ints(set)?;
    if v.is_empty() {
        return Ok(ApWitness {
            start: 0,
            diff: 0,
            len: 0,
        });
    }
    let hi = *v.last().unwrap();
    let mut best = ApWitness {
        start: v[0],
        diff: 0,
        len: 1,
    };
    for &start in &v {
        for d in 1..=(hi - start).max(1) {
            let mut len = 1usize;
            let mut next = start + d;
            while next <= hi && v.binary_search(&next).is_ok() {
                len += 1;
                next += d;
            }
            if len > best.len {
                best = ApWitness { start, diff: d, len };
            }
            if start + d > hi {
                break;
            }
        }
    }
    Ok(best)
}

/// Longest arithmetic progression inside `a + b`.
pub fn longest_ap_in_sumset(a: &[u64], b: &[u64]) -> Result<ApWitness> {
    let s = sumset_ints(a, b)?;
    longest_ap(&s)
}

// ---------------------------------------------------------------------------
// Covering dichotomy on Bohr sets
// ---------------------------------------------------------------------------

/// Tunable constants of the covering dichotomy.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ItsaParams {
    /// Declared growth of the density product per increment step.
    pub c_impl: f64,
    /// Exponent `e` in the dilate floor `c_impl * alpha^e / d`.
    pub exponent: u32,
    /// Grid for regularity scans.
    pub grid: usize,
    pub seed: u64,
    pub max_steps: usize,
}

impl Default for ItsaParams {
    fn default() -> Self {
        ItsaParams {
            c_impl: 2f64.powi(-4),
            exponent: 2,
            grid: 64,
            seed: 0x175a_175a,
            max_steps: 64,
        }
    }
}

impl ItsaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_impl > 0.0 && self.c_impl <= 0.5) {
            return Err(CoreError::OutOfRange {
                what: "c_impl",
                value: self.c_impl,
            });
        }
        if self.exponent != 2 && self.exponent != 4 {
            return Err(CoreError::OutOfRange {
                what: "exponent",
                value: self.exponent as f64,
            });
        }
        if self.grid < 8 || self.grid > 100_000 {
            return Err(CoreError::OutOfRange {
                what: "grid",
                value: self.grid as f64,
            });
        }
        if self.max_steps == 0 || self.max_steps > 10_000 {
            return Err(CoreError::OutOfRange {
                what: "max_steps",
                value: self.max_steps as f64,
            });
        }
        Ok(())
    }
}

/// One outcome of the covering dichotomy.
#[derive(Clone, Debug)]
pub enum ItsaOutcome {
    /// The sumset covers all but a `sigma` fraction of the regular dilate.
    Covered {
        b_prime: BohrSetZ,
        /// Dilate factor of `b_prime` relative to the input host.
        rho: f64,
        missing: usize,
        coverage: f64,
    },
    /// A host on which the densities' product verifiably grows.
    Increment {
        /// 1 or 2: which slot's spectral mass drove the choice.
        slot: usize,
        host: BohrSetZ,
        /// Best translates of the two sets on the new host.
        x1: u64,
        x2: u64,
        sup1: f64,
        sup2: f64,
        target: f64,
        /// False when the host came out of the spectral covering
        /// machinery, true for a fallback host.
        empirical: bool,
    },
}

/// `max_x |(a - x) ∩ host| / |host|` and its argmax.
fn best_translate(group: &Group, a: &[u64], host: &[u64]) -> (u64, f64) {
    let mut best = 0u64;
    let mut best_x = 0u64;
    for x in 0..group.order() {
        let mut c = 0u64;
        for &y in host {
            if a.binary_search(&group.add(x, y)).is_ok() {
                c += 1;
            }
        }
        if c > best {
            best = c;
            best_x = x;
        }
    }
    (best_x, best as f64 / host.len() as f64)
}

/// One pass of the covering dichotomy: on the regular dilate `B(rho)`
/// with `rho` found from `c_impl * alpha^e / d` upward, either `a1 + a2`
/// misses at most a `sigma` fraction (covered), or the missing set's
/// spectral correlation with one slot yields a host on which the product
/// of the two densities grows by `1 + c_impl`; the growth is re-verified
/// by direct translate scans before being returned.
pub fn itsa_step(
    group: &Group,
    a1: &[u64],
    a2: &[u64],
    b: &BohrSetZ,
    sigma: f64,
    params: &ItsaParams,
) -> Result<ItsaOutcome> {
    match group {
        Group::Cyclic { modulus } => {
            if *modulus > ITSA_MAX_MODULUS {
                return Err(CoreError::TooLarge {
                    what: "dichotomy modulus",
                    size: *modulus,
                    cap: ITSA_MAX_MODULUS,
                });
            }
        }
        Group::Vector { .. } => return Err(CoreError::GroupMismatch),
    }
    if b.group() != group {
        return Err(CoreError::GroupMismatch);
    }
    params.validate()?;
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(CoreError::OutOfRange {
            what: "sigma",
            value: sigma,
        });
    }
    let a1 = checked_set(group, a1)?;
    let a2 = checked_set(group, a2)?;
    if a1.is_empty() || a2.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    if !setops::is_subset(&a1, b.members()) || !setops::is_subset(&a2, b.members()) {
        return Err(CoreError::HypothesisViolated(
            "both sets must live inside the host".into(),
        ));
    }
    let size = b.len() as f64;
    let alpha1 = a1.len() as f64 / size;
    let alpha2 = a2.len() as f64 / size;
    let alpha = alpha1.min(alpha2);
    let d = b.rank().max(1) as f64;

    let rho_floor = (params.c_impl * alpha.powi(params.exponent as i32) / d).min(1.0);
    let b_prime = b.find_regular_dilate_in(rho_floor, 1.0, params.grid)?;
    let rho = b_prime.scale() / b.scale();

    let sums = setops::sumset(group, &a1, &a2);
    let missing: Vec<u64> = b_prime
        .members()
        .iter()
        .copied()
        .filter(|x| sums.binary_search(x).is_err())
        .collect();
    let coverage = 1.0 - missing.len() as f64 / b_prime.len() as f64;
    if missing.len() as f64 <= sigma * b_prime.len() as f64 {
        return Ok(ItsaOutcome::Covered {
            b_prime,
            rho,
            missing: missing.len(),
            coverage,
        });
    }

    // The sumset misses a chunk of the dilate, so the convolution
    // vanishes there and the missing set correlates spectrally with one
    // of the slots.
    let s_mod = {
        let f = DensityFn::indicator(group.clone(), &missing)?;
        dft(&f).iter().map(|z| z.norm()).collect::<Vec<f64>>()
    };
    let a1_mod = {
        let f = DensityFn::indicator(group.clone(), &a1)?;
        dft(&f).iter().map(|z| z.norm()).collect::<Vec<f64>>()
    };
    let a2_mod = {
        let f = DensityFn::indicator(group.clone(), &a2)?;
        dft(&f).iter().map(|z| z.norm()).collect::<Vec<f64>>()
    };
    let order = group.order() as usize;
    let m1: f64 = (1..order).map(|g| a1_mod[g] * a1_mod[g] * s_mod[g]).sum();
    let m2: f64 = (1..order).map(|g| a2_mod[g] * a2_mod[g] * s_mod[g]).sum();
    let r1 = m1 / (a1.len() as f64 * a1.len() as f64 * missing.len() as f64);
    let r2 = m2 / (a2.len() as f64 * a2.len() as f64 * missing.len() as f64);
    if r1.max(r2) < 1.0 - 1e-9 {
        return Err(CoreError::Internal(format!(
            "a sumset that misses {} of {} dilate points must push spectral \
             mass into one slot, but the ratios are {r1} and {r2}",
            missing.len(),
            b_prime.len()
        )));
    }
    let slot = if r2 > r1 { 2 } else { 1 };
    let slot_set = if slot == 1 { &a1 } else { &a2 };

    let target = alpha1 * alpha2 * (1.0 + params.c_impl);
    let try_host = |host: &BohrSetZ, empirical: bool| -> Option<ItsaOutcome> {
        let (x1, sup1) = best_translate(group, &a1, host.members());
        let (x2, sup2) = best_translate(group, &a2, host.members());
        if sup1 * sup2 >= target * (1.0 - 1e-12) {
            Some(ItsaOutcome::Increment {
                slot,
                host: host.clone(),
                x1,
                x2,
                sup1,
                sup2,
                target,
                empirical,
            })
        } else {
            None
        }
    };

    // Theorem-grade candidate: cover the missing set's correlation
    // spectrum and cut the host down to a controlled meet.
    let machinery = crate::increment::thde_analyze(
        group,
        slot_set,
        b.members(),
        &DensityFn::indicator(group.clone(), &missing)?,
        b_prime.members(),
        params.seed,
    );
    if let Ok(analysis) = machinery {
        let lambda: Vec<u64> = {
            let mut l = analysis.lambda.clone();
            l.sort_unstable();
            l.dedup();
            l
        };
        if !lambda.is_empty() {
            let width = 1.0 / (4.0 * analysis.d_used as f64);
            if let Ok(meet) = b_prime.meet(&lambda, &vec![width; lambda.len()]) {
                if let Ok(host) = meet.find_regular_dilate_in(0.25, 0.5, params.grid) {
                    if let Some(out) = try_host(&host, false) {
                        return Ok(out);
                    }
                }
            }
        }
    }

    // Fallback hosts: successively smaller regular dilates, then the
    // one-point host.
    for k in 1..=6 {
        let factor = 2f64.powi(-k);
        if let Ok(host) = b_prime.find_regular_dilate_in(factor / 2.0, factor, params.grid) {
            if let Some(out) = try_host(&host, true) {
                return Ok(out);
            }
        }
    }
    let w0 = group.char_distance(1, 1) / 2.0;
    let origin = crate::bohr::bohr_z(group, &[1], &[w0])?;
    if origin.members() == [group.zero()] {
        if let Some(out) = try_host(&origin, true) {
            return Ok(out);
        }
    }
    Err(CoreError::Inconclusive(format!(
        "no examined host reached the density-product target {target} \
         (densities {alpha1} and {alpha2})"
    )))
}

/// One record of the iteration harness.
#[derive(Clone, Debug)]
pub struct ItsaStepRecord {
    pub step: usize,
    pub host_size: u64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub outcome: ItsaOutcome,
}

/// How the iteration ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItsaTerminal {
    Covered,
    Stalled,
}

/// Full run of the covering iteration.
#[derive(Clone, Debug)]
pub struct ItsaTrace {
    pub records: Vec<ItsaStepRecord>,
    pub terminal: ItsaTerminal,
}

/// Iterates [`itsa_step`], replacing both sets by their best translates
/// on each increment host, until the sumset covers the dilate or no
/// further increment is possible. The density product grows by
/// `1 + c_impl` per increment and is at most 1, which bounds the length.
pub fn itsa_iterate(
    group: &Group,
    a1: &[u64],
    a2: &[u64],
    b: &BohrSetZ,
    sigma: f64,
    params: &ItsaParams,
) -> Result<ItsaTrace> {
    let mut a1 = checked_set(group, a1)?;
    let mut a2 = checked_set(group, a2)?;
    let mut host = b.clone();
    let mut records = Vec::new();
    let mut product = (a1.len() as f64 / host.len() as f64)
        * (a2.len() as f64 / host.len() as f64);
    for step in 0..params.max_steps {
        let alpha1 = a1.len() as f64 / host.len() as f64;
        let alpha2 = a2.len() as f64 / host.len() as f64;
        let outcome = match itsa_step(group, &a1, &a2, &host, sigma, params) {
            Ok(out) => out,
            Err(CoreError::Inconclusive(_)) => {
                return Ok(ItsaTrace {
                    records,
                    terminal: ItsaTerminal::Stalled,
                })
            }
            Err(e) => return Err(e),
        };
        records.push(ItsaStepRecord {
            step,
            host_size: host.len(),
            alpha1,
            alpha2,
            outcome: outcome.clone(),
        });
        match outcome {
            ItsaOutcome::Covered { .. } => {
                return Ok(ItsaTrace {
                    records,
                    terminal: ItsaTerminal::Covered,
                });
            }
            ItsaOutcome::Increment {
                host: new_host,
                x1,
                x2,
                sup1,
                sup2,
                ..
            } => {
                let new_product = sup1 * sup2;
                if new_product < product * (1.0 + params.c_impl) * (1.0 - 1e-9) {
                    return Err(CoreError::Internal(format!(
                        "density product moved from {product} to {new_product}, \
                         below the declared growth"
                    )));
                }
                product = new_product;
                a1 = new_host
                    .members()
                    .iter()
                    .copied()
                    .filter(|&y| a1.binary_search(&group.add(x1, y)).is_ok())
                    .collect();
                a2 = new_host
                    .members()
                    .iter()
                    .copied()
                    .filter(|&y| a2.binary_search(&group.add(x2, y)).is_ok())
                    .collect();
                host = new_host;
            }
        }
    }
    Ok(ItsaTrace {
        records,
        terminal: ItsaTerminal::Stalled,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
