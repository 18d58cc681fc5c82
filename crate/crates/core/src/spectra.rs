//! Large spectra and epsilon-control.
//!
//! For a nonzero `f` and a threshold fraction `eta in (0, 1]`, the large
//! spectrum is
//!
//! ```text
//! Spec_eta(f) = { chi : |fhat(chi)| >= eta ||f||_1 }
//! ```
//!
//! and the level (dyadic slice) spectrum collects coefficients in
//! `[eta ||f||_1, 2 eta ||f||_1)`. Membership uses an additive guard band of
//! 1e-9 below each boundary, applied to both ends of a slice, so the dyadic
//! family `{ slice at 2^i eta }` partitions `Spec_eta(f)` exactly.
//!
//! A set `B` is `eps`-controlled by a frequency set Gamma when
//! `|1 - chi(x)| <= eps` for every `chi in Gamma`, `x in B`.

use crate::density::DensityFn;
use crate::error::{CoreError, Result};
use crate::fourier::dft;
use crate::group::Group;

/// Additive guard band under every spectrum threshold: a coefficient within
/// 1e-9 below the cut still counts, which makes knife-edge instances
/// deterministic and keeps dyadic slices an exact partition.
pub const SPECTRUM_GUARD: f64 = 1e-9;

/// Guard band for epsilon-control comparisons.
pub const CONTROL_GUARD: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub eta: f64,
    /// `eta * ||f||_1`.
    pub threshold: f64,
    /// Upper threshold for a level slice (`2 eta ||f||_1`), `None` for the
    /// plain spectrum.
    pub upper: Option<f64>,
    /// Member characters, ascending.
    pub members: Vec<u64>,
    /// `|fhat(chi)|` for each member, parallel to `members`.
    pub moduli: Vec<f64>,
}

fn spectrum_impl(f: &DensityFn, eta: f64, level: bool) -> Result<SpectrumReport> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(CoreError::OutOfRange {
            what: "eta",
            value: eta,
        });
    }
    if f.norm1() == 0.0 {
        return Err(CoreError::EmptyFunction);
    }
    let threshold = eta * f.norm1();
    let upper = if level { Some(2.0 * threshold) } else { None };
    let coeffs = dft(f);
    let mut members = Vec::new();
    let mut moduli = Vec::new();
    for (chi, c) in coeffs.iter().enumerate() {
        let m = c.norm();
        let in_lower = m >= threshold - SPECTRUM_GUARD;
        let in_upper = match upper {
            Some(u) => m < u - SPECTRUM_GUARD,
            None => true,
        };
        if in_lower && in_upper {
            members.push(chi as u64);
            moduli.push(m);
        }
    }
    Ok(SpectrumReport {
        eta,
        threshold,
        upper,
        members,
        moduli,
    })
}

/// The large spectrum `Spec_eta(f)`.
pub fn spectrum(f: &DensityFn, eta: f64) -> Result<SpectrumReport> {
    spectrum_impl(f, eta, false)
}

/// The dyadic slice `[eta ||f||_1, 2 eta ||f||_1)`.
pub fn level_spectrum(f: &DensityFn, eta: f64) -> Result<SpectrumReport> {
    spectrum_impl(f, eta, true)
}

#[derive(Clone, Debug)]
pub struct ControlReport {
    pub controlled: bool,
    /// Largest `|1 - chi(x)|` observed and where.
    pub worst: Option<(u64, u64, f64)>,
}

/// Checks `eps`-control of `b` by `gamma`: `|1 - chi(x)| <= eps` for all
/// pairs, with a 1e-9 guard. Reports the worst pair either way.
pub fn has_control(group: &Group, b: &[u64], gamma: &[u64], eps: f64) -> Result<ControlReport> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(CoreError::OutOfRange {
            what: "eps",
            value: eps,
        });
    }
    let mut worst: Option<(u64, u64, f64)> = None;
    for &chi in gamma {
        if !group.contains(chi) {
            return Err(CoreError::BadElement(chi));
        }
        for &x in b {
            if !group.contains(x) {
                return Err(CoreError::BadElement(x));
            }
            let d = group.char_distance(chi, x);
            if worst.is_none_or(|(_, _, w)| d > w) {
                worst = Some((chi, x, d));
            }
        }
    }
    let controlled = worst.is_none_or(|(_, _, w)| w <= eps + CONTROL_GUARD);
    Ok(ControlReport { controlled, worst })
}

/// `L(delta) = 2 + ceil(ln(1 / delta))` for `delta in (0, 1]`. The argument
/// of `ceil` carries a 1e-9 downward guard so that values like `delta = 1/e`
/// land on the intended integer despite rounding.
pub fn cal_l(delta: f64) -> Result<u32> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(CoreError::OutOfRange {
            what: "delta",
            value: delta,
        });
    }
    let raw = (1.0 / delta).ln();
    Ok(2 + (raw - 1e-9).max(0.0).ceil() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic_group;

    #[test]
    fn cal_l_reference_points() {
        assert_eq!(cal_l(1.0).unwrap(), 2);
        assert_eq!(cal_l((-1.0f64).exp()).unwrap(), 3);
        assert_eq!(cal_l(0.05).unwrap(), 5);
        assert!(cal_l(0.0).is_err());
        assert!(cal_l(1.5).is_err());
    }

    #[test]
    fn spectrum_of_point_mass_is_everything() {
        let g = cyclic_group(5).unwrap();
        let f = DensityFn::indicator(g, &[2]).unwrap();
        let rep = spectrum(&f, 1.0).unwrap();
        assert_eq!(rep.members, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn zero_char_always_in_spectrum_of_nonneg() {
        let g = cyclic_group(11).unwrap();
        let f = DensityFn::indicator(g, &[0, 3, 7]).unwrap();
        for eta in [0.1, 0.5, 1.0] {
            let rep = spectrum(&f, eta).unwrap();
            assert!(rep.members.contains(&0));
        }
    }

    #[test]
    fn spectrum_antitone_in_eta() {
        let g = cyclic_group(13).unwrap();
        let f = DensityFn::indicator(g, &[1, 2, 3, 5, 8]).unwrap();
        let lo = spectrum(&f, 0.2).unwrap();
        let hi = spectrum(&f, 0.6).unwrap();
        assert!(hi.members.iter().all(|m| lo.members.contains(m)));
    }

    #[test]
    fn dyadic_slices_partition_spectrum() {
        let g = cyclic_group(17).unwrap();
        let f = DensityFn::indicator(g, &[0, 1, 4, 9, 13]).unwrap();
        let eta = 0.15;
        let full = spectrum(&f, eta).unwrap();
        let mut seen = Vec::new();
        let mut i = 0u32;
        loop {
            let lv = 2f64.powi(i as i32) * eta;
            if lv > 1.0 {
                // remaining slices would need eta > 1; the top slice at
                // eta = 1 already captures |fhat| = ||f||_1.
                break;
            }
            let rep = level_spectrum(&f, lv).unwrap();
            seen.extend(rep.members);
            i += 1;
        }
        seen.sort_unstable();
        assert_eq!(seen, full.members);
    }

    #[test]
    fn control_detects_worst_pair() {
        let g = cyclic_group(11).unwrap();
        let rep = has_control(&g, &[0, 1], &[5], 2.0).unwrap();
        assert!(rep.controlled);
        let tight = has_control(&g, &[0, 1], &[5], 0.1).unwrap();
        assert!(!tight.controlled);
        assert_eq!(tight.worst.unwrap().1, 1);
    }
}
