//! Additive energies of weighted frequency sets, plain and restricted,
//! with the bounds that connect them to dissociation structure.
//!
//! For a nonnegative weight `w` on characters and a test set `Gamma`,
//!
//! ```text
//! E_{2m}(w, Gamma) = sum over (g_1..g_m, h_1..h_m)
//!                    w(g_1)...w(h_m) . [ sum g_i - sum h_j in Gamma ]
//! ```
//!
//! and the restricted variant sums over ordered pairs of *disjoint subsets*
//! `(D_1, D_2)` of fixed sizes `(t_1, t_2)`:
//!
//! ```text
//! E#_{t1,t2}(w, Gamma + l) = sum w(D_1) w(D_2) [ sum D_1 - sum D_2 in Gamma + l ]
//! ```
//!
//! `E_{2m}` is evaluated by two independent routes (tuple enumeration and
//! convolution powers of the weight measure) which must agree to 1e-6
//! relative; disagreement is reported as an internal error, never papered
//! over.
//!
//! Conventions: `E_0 = 1`. For the restricted energy with `t1 = t2 = 0`,
//! passing no shift returns the conventional 1, while an explicit shift `l`
//! evaluates the empty sums literally, giving `[ -l in Gamma ]`.

use num_bigint::BigUint;
use num_traits::One;

use crate::density::DensityFn;
use crate::dissociation::gamma_dimension;
use crate::error::{CoreError, Result};
use crate::group::Group;
use crate::spectra::spectrum;

/// Cap on tuple-enumeration size   |support|^{2m}.
pub const ENERGY_ENUM_CAP: u64 = 100_000_000;

/// Relative agreement demanded between the two E_{2m} routes.
pub const ENERGY_ROUTE_TOL: f64 = 1e-6;

/// Dual-group cap for the exact sup over shifts in [`en2_bound_check`].
pub const EN2_DUAL_CAP: u64 = 128;

/// Nonnegative weights on characters. Support holds exactly the characters
/// with strictly positive weight, sorted ascending.
#[derive(Clone, Debug)]
pub struct WeightFn {
    group: Group,
    support: Vec<u64>,
    weights: Vec<f64>,
    norm1: f64,
    norm2: f64,
}

impl WeightFn {
    pub fn new(group: Group, entries: &[(u64, f64)]) -> Result<Self> {
        let mut pairs: Vec<(u64, f64)> = Vec::new();
        for &(chi, w) in entries {
            if !group.contains(chi) {
                return Err(CoreError::BadElement(chi));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(CoreError::OutOfRange {
                    what: "weight",
                    value: w,
                });
            }
            if w > 0.0 {
                pairs.push((chi, w));
            }
        }
        pairs.sort_by_key(|p| p.0);
        for wd in pairs.windows(2) {
            if wd[0].0 == wd[1].0 {
                return Err(CoreError::BadElement(wd[0].0));
            }
        }
        let support: Vec<u64> = pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let norm1 = weights.iter().sum();
        let norm2 = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        Ok(WeightFn {
            group,
            support,
            weights,
            norm1,
            norm2,
        })
    }

    /// Unit weights on a set of characters.
    pub fn indicator(group: Group, chars: &[u64]) -> Result<Self> {
        let entries: Vec<(u64, f64)> = chars.iter().map(|&c| (c, 1.0)).collect();
        Self::new(group, &entries)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_of(&self, chi: u64) -> f64 {
        match self.support.binary_search(&chi) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    pub fn norm1(&self) -> f64 {
        self.norm1
    }

    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Recomputes the cached norms, checking to 1e-12 relative.
    pub fn verify_norm_cache(&self) -> Result<()> {
        let n1: f64 = self.weights.iter().sum();
        let n2: f64 = self.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        for (name, a, b) in [("l1", self.norm1, n1), ("l2", self.norm2, n2)] {
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(CoreError::Internal(format!(
                    "{name} cache drifted: {a} vs {b}"
                )));
            }
        }
        Ok(())
    }
}

fn gamma_lookup(group: &Group, gamma: &[u64]) -> Result<Vec<bool>> {
    let mut table = vec![false; group.order() as usize];
    for &g in gamma {
        if !group.contains(g) {
            return Err(CoreError::BadElement(g));
        }
        table[g as usize] = true;
    }
    Ok(table)
}

/// Tuple-enumeration route for `E_{2m}`.
fn energy_enumerated(w: &WeightFn, gamma_table: &[bool], m: u32) -> f64 {
    let group = &w.group;
    let s = w.support.len();
    // Depth-first over 2m slots; slots < m add their character, the rest
    // subtract. Partial weight products are threaded down.
    #[allow(clippy::too_many_arguments)]
    fn rec(
        group: &Group,
        supp: &[u64],
        wts: &[f64],
        gamma: &[bool],
        m: u32,
        slot: u32,
        sum: u64,
        prod: f64,
    ) -> f64 {
        if slot == 2 * m {
            return if gamma[sum as usize] { prod } else { 0.0 };
        }
        let mut acc = 0.0;
        for i in 0..supp.len() {
            let nsum = if slot < m {
                group.add(sum, supp[i])
            } else {
                group.sub(sum, supp[i])
            };
            acc += rec(group, supp, wts, gamma, m, slot + 1, nsum, prod * wts[i]);
        }
        acc
    }
    if s == 0 {
        return 0.0;
    }
    rec(
        group,
        &w.support,
        &w.weights,
        gamma_table,
        m,
        0,
        0,
        1.0,
    )
}

/// Convolution-power route for `E_{2m}`: with `P = w^{*m}` (dense over the
/// dual), `E_{2m} = sum_{t in Gamma} sum_s P(s) P(s - t)`.
fn energy_convolution(w: &WeightFn, gamma: &[u64], m: u32) -> f64 {
    let group = &w.group;
    let n = group.order() as usize;
    let mut p = vec![0.0f64; n];
    p[0] = 1.0;
    for _ in 0..m {
        let mut next = vec![0.0f64; n];
        for (i, &chi) in w.support.iter().enumerate() {
            let wt = w.weights[i];
            for s in 0..n {
                let v = p[s];
                if v != 0.0 {
                    next[group.add(s as u64, chi) as usize] += wt * v;
                }
            }
        }
        p = next;
    }
    let mut total = 0.0;
    for &t in gamma {
        let mut corr = 0.0;
        for s in 0..n {
            let v = p[s];
            if v != 0.0 {
                corr += v * p[group.sub(s as u64, t) as usize];
            }
        }
        total += corr;
    }
    total
}

/// `E_{2m}(w, Gamma)`, by both routes with mandatory agreement.
/// `m = 0` returns 1.
pub fn additive_energy(w: &WeightFn, gamma: &[u64], m: u32) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    let s = w.support.len() as u64;
    let mut terms: u64 = 1;
    for _ in 0..2 * m {
        terms = terms.saturating_mul(s.max(1));
        if terms > ENERGY_ENUM_CAP {
            return Err(CoreError::TooLarge {
                what: "energy tuple enumeration",
                size: terms,
                cap: ENERGY_ENUM_CAP,
            });
        }
    }
    let table = gamma_lookup(&w.group, gamma)?;
    let by_enum = energy_enumerated(w, &table, m);
    let by_conv = energy_convolution(w, gamma, m);
    let scale = by_enum.abs().max(by_conv.abs()).max(1.0);
    if (by_enum - by_conv).abs() > ENERGY_ROUTE_TOL * scale {
        return Err(CoreError::Internal(format!(
            "E_{{2m}} routes disagree: enumeration {by_enum} vs convolution {by_conv}"
        )));
    }
    Ok(by_enum)
}

/// `E#_{t1,t2}(w, Gamma + shift)`.
///
/// With `t1 = t2 = 0` and `shift = None` this is the conventional 1; an
/// explicit shift evaluates the empty-sum membership literally.
pub fn restricted_energy(
    w: &WeightFn,
    gamma: &[u64],
    t1: u32,
    t2: u32,
    shift: Option<u64>,
) -> Result<f64> {
    if t1 == 0 && t2 == 0 && shift.is_none() {
        return Ok(1.0);
    }
    let group = w.group.clone();
    let lam = shift.unwrap_or(0);
    if !group.contains(lam) {
        return Err(CoreError::BadElement(lam));
    }
    let s = w.support.len() as u64;
    let combos = binomial(s, t1 as u64).saturating_mul(binomial(
        s.saturating_sub(t1 as u64),
        t2 as u64,
    ));
    if combos > ENERGY_ENUM_CAP {
        return Err(CoreError::TooLarge {
            what: "restricted energy enumeration",
            size: combos,
            cap: ENERGY_ENUM_CAP,
        });
    }
    let table = gamma_lookup(&group, gamma)?;
    if (t1 as usize) > w.support.len() || (t2 as usize) + (t1 as usize) > w.support.len() {
        // No disjoint pair of these sizes exists; empty sum.
        return Ok(0.0);
    }

    // Enumerate D_1 (indices ascending), then D_2 from the complement.
    let mut total = 0.0;
    let n_sup = w.support.len();
    let mut d1 = Vec::with_capacity(t1 as usize);
    enumerate_first(
        &group, w, &table, lam, t1 as usize, t2 as usize, 0, 0, 1.0, &mut d1, n_sup, &mut total,
    );
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_first(
    group: &Group,
    w: &WeightFn,
    table: &[bool],
    lam: u64,
    t1: usize,
    t2: usize,
    start: usize,
    sum: u64,
    prod: f64,
    chosen: &mut Vec<usize>,
    n_sup: usize,
    total: &mut f64,
) {
    if chosen.len() == t1 {
        enumerate_second(group, w, table, lam, t2, 0, sum, prod, chosen, n_sup, total);
        return;
    }
    for i in start..n_sup {
        chosen.push(i);
        enumerate_first(
            group,
            w,
            table,
            lam,
            t1,
            t2,
            i + 1,
            group.add(sum, w.support[i]),
            prod * w.weights[i],
            chosen,
            n_sup,
            total,
        );
        chosen.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_second(
    group: &Group,
    w: &WeightFn,
    table: &[bool],
    lam: u64,
    remaining: usize,
    start: usize,
    sum: u64,
    prod: f64,
    d1: &[usize],
    n_sup: usize,
    total: &mut f64,
) {
    if remaining == 0 {
        // sum in Gamma + lam  <=>  sum - lam in Gamma
        if table[group.sub(sum, lam) as usize] {
            *total += prod;
        }
        return;
    }
    for i in start..n_sup {
        if d1.binary_search(&i).is_ok() {
            continue;
        }
        enumerate_second(
            group,
            w,
            table,
            lam,
            remaining - 1,
            i + 1,
            group.sub(sum, w.support[i]),
            prod * w.weights[i],
            d1,
            n_sup,
            total,
        );
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Restricted-energy bound for a plain character set `S`:
/// `E#_{t1,t2}(S, Gamma) <= 4^{k+m}` with `k = |S| - dim_Gamma(S)`.
#[derive(Clone, Debug)]
pub struct DeficiencyBound {
    pub e_sharp: f64,
    pub bound: f64,
    pub set_size: usize,
    pub dimension: usize,
    pub deficiency: usize,
    pub holds: bool,
}

pub fn en1_bound_check(
    group: &Group,
    s: &[u64],
    gamma: &[u64],
    m: u32,
    t1: u32,
    t2: u32,
) -> Result<DeficiencyBound> {
    if t1 > m || t2 > m {
        return Err(CoreError::HypothesisViolated(format!(
            "need m >= t1, t2; got m={m}, t1={t1}, t2={t2}"
        )));
    }
    let w = WeightFn::indicator(group.clone(), s)?;
    let e_sharp = restricted_energy(&w, gamma, t1, t2, None)?;
    let report = gamma_dimension(group, s, gamma)?;
    let k = s.len() - report.dimension;
    let bound = 4f64.powi((k as i32) + (m as i32));
    Ok(DeficiencyBound {
        e_sharp,
        bound,
        set_size: s.len(),
        dimension: report.dimension,
        deficiency: k,
        holds: e_sharp <= bound * (1.0 + 1e-9),
    })
}

/// Full-energy bound through restricted energies:
///
/// ```text
/// E_{2m}(w,Gamma) <= 2^{4m} (m!)^2 ||w||_2^{2m}
///     sum_{t1,t2 <= m} ||w||_2^{-t1-t2} ((m-t1)!(m-t2)!)^{-1/2}
///                      sup_l E#_{t1,t2}(w, Gamma + l)
/// ```
///
/// The sup over shifts is an exact maximum over the whole dual group, which
/// is capped at order 128 here.
pub fn en2_bound_check(w: &WeightFn, gamma: &[u64], m: u32) -> Result<BoundCheck> {
    if m < 2 {
        return Err(CoreError::HypothesisViolated(format!(
            "bound needs m >= 2, got {m}"
        )));
    }
    let group = w.group.clone();
    let n = group.order();
    if n > EN2_DUAL_CAP {
        return Err(CoreError::TooLarge {
            what: "dual group for shift sup",
            size: n,
            cap: EN2_DUAL_CAP,
        });
    }
    let lhs = additive_energy(w, gamma, m)?;
    if w.norm2() == 0.0 {
        return Ok(BoundCheck {
            lhs,
            rhs: 0.0,
            holds: lhs <= 1e-12,
        });
    }
    let mut sum = 0.0f64;
    for t1 in 0..=m {
        for t2 in 0..=m {
            let mut sup = 0.0f64;
            for lam in 0..n {
                let v = restricted_energy(w, gamma, t1, t2, Some(lam))?;
                if v > sup {
                    sup = v;
                }
            }
            let fac = (factorial_f64(m - t1) * factorial_f64(m - t2)).sqrt();
            sum += w.norm2().powi(-((t1 + t2) as i32)) / fac * sup;
        }
    }
    let rhs = 2f64.powi(4 * m as i32)
        * factorial_f64(m).powi(2)
        * w.norm2().powi(2 * m as i32)
        * sum;
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
    })
}

fn factorial_f64(n: u32) -> f64 {
    (1..=n as u64).map(|k| k as f64).product::<f64>().max(1.0)
}

/// Lower bound on spectral energy: with `supp(w)` inside `Spec_eta(f)` for
/// `f` supported on `B`, and `Gamma = Spec_eps(indicator B)`,
///
/// ```text
/// E_{2m}(w, Gamma) >= ||w||_1^{2m} ( (eta ||f||_1 / (||f||_{2m/(2m-1)} |B|^{1/2m}))^{2m} - eps )
/// ```
#[derive(Clone, Debug)]
pub struct SpectralEnergyCheck {
    pub energy: f64,
    pub lower: f64,
    pub holds: bool,
    pub spectrum_size: usize,
}

pub fn shkredov_check(
    f: &DensityFn,
    b: &[u64],
    w: &WeightFn,
    eta: f64,
    m: u32,
    eps: f64,
) -> Result<SpectralEnergyCheck> {
    if m == 0 {
        return Err(CoreError::HypothesisViolated("need m >= 1".into()));
    }
    if f.group() != w.group() {
        return Err(CoreError::GroupMismatch);
    }
    let b_sorted = crate::group::checked_set(f.group(), b)?;
    if b_sorted.is_empty() {
        return Err(CoreError::EmptyFunction);
    }
    for x in f.support() {
        if b_sorted.binary_search(&x).is_err() {
            return Err(CoreError::HypothesisViolated(format!(
                "f has mass outside its host set (element {x})"
            )));
        }
    }
    let spec = spectrum(f, eta)?;
    for &chi in w.support() {
        if spec.members.binary_search(&chi).is_err() {
            return Err(CoreError::SupportViolation(chi));
        }
    }
    let host = DensityFn::indicator(f.group().clone(), &b_sorted)?;
    let host_spec = spectrum(&host, eps)?;
    let energy = additive_energy(w, &host_spec.members, m)?;
    let p = 2.0 * m as f64 / (2.0 * m as f64 - 1.0);
    let ratio = eta * f.norm1() / (f.norm_p(p) * (b_sorted.len() as f64).powf(1.0 / (2.0 * m as f64)));
    let lower = w.norm1().powi(2 * m as i32) * (ratio.powi(2 * m as i32) - eps);
    let scale = w.norm1().powi(2 * m as i32).max(1.0);
    Ok(SpectralEnergyCheck {
        energy,
        lower,
        holds: energy >= lower - 1e-9 * scale,
        spectrum_size: host_spec.members.len(),
    })
}

/// Exact integer check of `n! / (floor(n/2)!)^2 <= 2 (n+1)^{1/2} 2^n`,
/// squared to keep everything in integers:
/// `(n! / (k!)^2)^2 <= 4 (n+1) 4^n` with `k = floor(n/2)`.
pub fn central_factorial_check(n: u32) -> Result<BoundCheck> {
    if n > 60 {
        return Err(CoreError::TooLarge {
            what: "factorial bound argument",
            size: n as u64,
            cap: 60,
        });
    }
    let fact = |k: u32| -> BigUint {
        let mut acc = BigUint::one();
        for i in 1..=k as u64 {
            acc *= i;
        }
        acc
    };
    let k = n / 2;
    let numer = fact(n);
    let denom = fact(k).pow(2);
    // n! / (k!)^2 is an integer (binomial times a factorial); verify.
    if &numer % &denom != BigUint::from(0u32) {
        return Err(CoreError::Internal("central ratio not integral".into()));
    }
    let ratio = &numer / &denom;
    let lhs2 = &ratio * &ratio;
    let rhs2 = BigUint::from(4u32) * BigUint::from(n + 1) * BigUint::from(4u32).pow(n);
    let holds = lhs2 <= rhs2;
    // Report in doubles for the record; exactness came from the bigints.
    Ok(BoundCheck {
        lhs: ratio_to_f64(&lhs2),
        rhs: ratio_to_f64(&rhs2),
        holds,
    })
}

fn ratio_to_f64(x: &BigUint) -> f64 {
    x.to_string().parse::<f64>().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic_group;

    fn z(n: u64) -> Group {
        cyclic_group(n).unwrap()
    }

    #[test]
    fn weight_fn_drops_zeros_rejects_negatives() {
        let g = z(11);
        let w = WeightFn::new(g.clone(), &[(1, 0.5), (2, 0.0), (3, 1.5)]).unwrap();
        assert_eq!(w.support(), &[1, 3]);
        assert!((w.norm1() - 2.0).abs() < 1e-15);
        assert!(WeightFn::new(g, &[(1, -0.1)]).is_err());
        w.verify_norm_cache().unwrap();
    }

    #[test]
    fn energy_of_full_test_set_is_norm_power() {
        // Gamma = whole dual makes the bracket always 1, so E_{2m} = ||w||_1^{2m}.
        let g = z(7);
        let w = WeightFn::new(g.clone(), &[(1, 1.0), (2, 0.5), (5, 2.0)]).unwrap();
        let full: Vec<u64> = (0..7).collect();
        for m in [1u32, 2] {
            let e = additive_energy(&w, &full, m).unwrap();
            let expect = w.norm1().powi(2 * m as i32);
            assert!((e - expect).abs() < 1e-9 * expect);
        }
    }

    #[test]
    fn energy_m0_is_one() {
        let g = z(5);
        let w = WeightFn::indicator(g, &[1]).unwrap();
        assert_eq!(additive_energy(&w, &[], 0).unwrap(), 1.0);
    }

    // Frozen oracle: E_4({1,2,3} as indicator in Z_7, {0}) counts quadruples
    // (a,b,c,d) in {1,2,3}^4 with a + b = c + d mod 7. Hand count: sums 2..6
    // with multiplicities 1,2,3,2,1 -> sum of squares = 1+4+9+4+1 = 19.
    #[test]
    fn additive_energy_matches_hand_count() {
        let g = z(7);
        let w = WeightFn::indicator(g, &[1, 2, 3]).unwrap();
        let e = additive_energy(&w, &[0], 2).unwrap();
        assert!((e - 19.0).abs() < 1e-9);
    }

    #[test]
    fn restricted_energy_conventions() {
        let g = z(7);
        let w = WeightFn::indicator(g.clone(), &[1, 2]).unwrap();
        // Unshifted empty case: conventional 1.
        assert_eq!(restricted_energy(&w, &[], 0, 0, None).unwrap(), 1.0);
        // Shifted empty case: literal membership of -shift.
        assert_eq!(restricted_energy(&w, &[3], 0, 0, Some(4)).unwrap(), 1.0);
        assert_eq!(restricted_energy(&w, &[3], 0, 0, Some(1)).unwrap(), 0.0);
        // Shift 0 with 0 in Gamma: literal 1.
        assert_eq!(restricted_energy(&w, &[0], 0, 0, Some(0)).unwrap(), 1.0);
    }

    // Frozen oracle: S = {1, 2} in Z_7, Gamma = {3}, t1 = 2, t2 = 0.
    // Only D_1 = {1,2}, sum 3, in Gamma: E# = 1.
    #[test]
    fn restricted_energy_small_oracle() {
        let g = z(7);
        let w = WeightFn::indicator(g, &[1, 2]).unwrap();
        assert_eq!(restricted_energy(&w, &[3], 2, 0, None).unwrap(), 1.0);
        assert_eq!(restricted_energy(&w, &[4], 2, 0, None).unwrap(), 0.0);
    }

    #[test]
    fn restricted_energy_scales_by_weight_product() {
        let g = z(7);
        let w = WeightFn::new(g, &[(1, 2.0), (2, 3.0)]).unwrap();
        // D_1 = {1,2}: product 6.
        assert_eq!(restricted_energy(&w, &[3], 2, 0, None).unwrap(), 6.0);
    }

    #[test]
    fn central_factorial_bound_holds_up_to_60() {
        for n in 0..=60 {
            let chk = central_factorial_check(n).unwrap();
            assert!(chk.holds, "failed at n = {n}");
        }
        assert!(central_factorial_check(61).is_err());
    }
}
