//! Cross-module property tests: randomized invariants that tie the
//! Fourier layer, the spectra, the counting machinery, and the drivers
//! together. Deterministic seeds throughout; failures shrink.

use proptest::prelude::*;

use spectral_core::bohr::bohr_z;
use spectral_core::density::DensityFn;
use spectral_core::fourier::dft;
use spectral_core::group::{cyclic_group, vector_group, Group};
use spectral_core::increment::{
    balanced_indicator, count_solutions, driver_fpn, driver_zn, maindi_analyze, thde_analyze,
    thde_apply, upsilon_invariance, verify_trace, DriverParams, EquationCoeffs, MaindiAnalysis,
    StepKind, ThdeOutcome,
};
use spectral_core::progfree::is_3ap_free;
use spectral_core::spectra::{cal_l, spectrum};
use spectral_core::sumset::{longest_ap, longest_ap_brute};
use spectral_core::CoreError;

fn z101() -> Group {
    cyclic_group(101).unwrap()
}

fn nonempty_subset(n: u64, max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::btree_set(0..n, 1..max_len).prop_map(|s| s.into_iter().collect())
}

fn real_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Time-side and frequency-side second moments agree:
    /// `N * sum |f|^2 = sum |fhat|^2`.
    #[test]
    fn parseval_on_random_functions(vals in real_values(101)) {
        let g = z101();
        let f = DensityFn::from_real(g.clone(), &vals).unwrap();
        let hat = dft(&f);
        let time: f64 = vals.iter().map(|v| v * v).sum();
        let freq: f64 = hat.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((freq - 101.0 * time).abs() <= 1e-6 * (1.0 + freq.abs()));
    }

    /// The large spectrum cannot exceed the second-moment budget:
    /// `|Spec_eta(f)| <= N ||f||_2^2 / (eta ||f||_1)^2`.
    #[test]
    fn spectrum_size_bound(vals in real_values(101), eta in 0.05f64..1.0) {
        let g = z101();
        let f = DensityFn::from_real(g.clone(), &vals).unwrap();
        if f.norm1() > 1e-9 {
            let spec = spectrum(&f, eta).unwrap();
            let l2sq: f64 = vals.iter().map(|v| v * v).sum();
            let budget = 101.0 * l2sq / (eta * f.norm1()).powi(2);
            prop_assert!(
                spec.members.len() as f64 <= budget * (1.0 + 1e-9) + 1e-9,
                "{} members, budget {budget}",
                spec.members.len()
            );
        }
    }

    /// The two counting routes agree (checked internally) and the count
    /// is invariant under every affine map with unit dilate.
    #[test]
    fn counting_affine_invariance(
        set in nonempty_subset(101, 30),
        t in 0u64..101,
        u in 1i64..101,
    ) {
        let g = z101();
        let c = EquationCoeffs::standard(&g).unwrap();
        prop_assert!(upsilon_invariance(&g, &set, c, t, u).unwrap());
        prop_assert!(count_solutions(&g, &set, c).unwrap() >= set.len() as u64);
    }

    /// A set of integers has no nontrivial three-term progression exactly
    /// when its longest progression has at most two terms.
    #[test]
    fn ap_freeness_matches_longest_ap(set in prop::collection::btree_set(0u64..300, 0..40)) {
        let v: Vec<u64> = set.into_iter().collect();
        let free = is_3ap_free(&v).unwrap();
        let longest = longest_ap(&v).unwrap();
        prop_assert_eq!(free, longest.len <= 2, "longest = {:?}", longest);
    }

    /// The progression dynamic program agrees with brute force.
    #[test]
    fn progression_dp_matches_brute(set in prop::collection::btree_set(0u64..120, 0..30)) {
        let v: Vec<u64> = set.into_iter().collect();
        let dp = longest_ap(&v).unwrap();
        let brute = longest_ap_brute(&v).unwrap();
        prop_assert_eq!(dp.len, brute.len);
    }

    /// Bohr sets are symmetric, contain zero, and dilates nest.
    #[test]
    fn bohr_basic_shape(
        f1 in 1u64..101,
        f2 in 1u64..101,
        w1 in 0.05f64..1.5,
        w2 in 0.05f64..1.5,
        lam in 0.1f64..1.0,
    ) {
        prop_assume!(f1 != f2);
        let g = z101();
        let b = bohr_z(&g, &[f1, f2], &[w1, w2]).unwrap();
        let members = b.members();
        prop_assert!(members.binary_search(&0).is_ok());
        for &x in members {
            prop_assert!(members.binary_search(&g.neg(x)).is_ok());
        }
        let small = b.dilate(lam).unwrap();
        for &x in small.members() {
            prop_assert!(members.binary_search(&x).is_ok());
        }
    }

    /// Balanced indicators really are balanced.
    #[test]
    fn balanced_indicator_zero_sum(
        rest in prop::collection::btree_set(1u64..101, 1..50),
        pick in any::<u64>(),
    ) {
        let g = z101();
        let mut host: Vec<u64> = rest.into_iter().collect();
        host.push(0);
        host.sort_unstable();
        let take = 1 + (pick as usize) % host.len();
        let a: Vec<u64> = host.iter().copied().take(take).collect();
        let (bal, alpha) = balanced_indicator(&g, &a, &host).unwrap();
        let total: f64 = bal.values().iter().map(|v| v.re).sum();
        prop_assert!(total.abs() < 1e-9);
        prop_assert!((alpha - a.len() as f64 / host.len() as f64).abs() < 1e-12);
        prop_assert!(dft(&bal)[0].norm() < 1e-9);
    }

    /// The logarithmic level count is antitone and anchored at 2.
    #[test]
    fn level_count_antitone(a in 1e-6f64..1.0, b in 1e-6f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(cal_l(lo).unwrap() >= cal_l(hi).unwrap());
        prop_assert_eq!(cal_l(1.0).unwrap(), 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// On the full group, the counting dichotomy never reports an
    /// internal disagreement: every instance is either dense enough or
    /// yields a prepared increment.
    #[test]
    fn counting_dichotomy_total_on_whole_group(
        a1 in nonempty_subset(101, 20),
        a2 in nonempty_subset(101, 40),
        a3 in nonempty_subset(101, 40),
    ) {
        let g = z101();
        let whole: Vec<u64> = (0..101).collect();
        match maindi_analyze(&g, &a1, &a2, &a3, &whole, &whole, 11) {
            Ok(MaindiAnalysis::ManySolutions { count, bound }) => {
                prop_assert!(count as f64 >= bound);
            }
            Ok(MaindiAnalysis::NeedIncrement(split)) => {
                prop_assert!(split.slot == 2 || split.slot == 3);
                prop_assert!(split.analysis.nu > 0.0);
            }
            Err(CoreError::HypothesisViolated(_)) => {}
            Err(e) => return Err(TestCaseError::fail(format!("internal: {e}"))),
        }
    }

    /// The one-point candidate host always passes the increment
    /// hypotheses and always produces its witness.
    #[test]
    fn one_point_host_always_witnesses(
        a in nonempty_subset(101, 60),
        b_prime in nonempty_subset(101, 101),
    ) {
        let g = z101();
        let whole: Vec<u64> = (0..101).collect();
        let f = DensityFn::indicator(g.clone(), &b_prime).unwrap();
        match thde_analyze(&g, &a, &whole, &f, &b_prime, 5) {
            Ok(analysis) => match thde_apply(&analysis, &[0]) {
                Ok(ThdeOutcome::Witness(w)) => {
                    prop_assert!(w.achieved >= w.target * (1.0 - 1e-12));
                }
                Ok(ThdeOutcome::HypothesisUnmet { failed }) => {
                    return Err(TestCaseError::fail(format!(
                        "one-point host rejected: {failed:?}"
                    )));
                }
                Err(e) => return Err(TestCaseError::fail(format!("apply: {e}"))),
            },
            // No spectral correlation at all is an honest refusal.
            Err(CoreError::HypothesisViolated(_)) => {}
            Err(e) => return Err(TestCaseError::fail(format!("analyze: {e}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Seeded end-to-end driver checks
// ---------------------------------------------------------------------------

fn xorshift(mut x: u64) -> impl FnMut() -> u64 {
    move || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        x
    }
}

#[test]
fn cyclic_driver_traces_verify_on_seeded_instances() {
    let g = cyclic_group(101).unwrap();
    let c = EquationCoeffs::standard(&g).unwrap();
    let params = DriverParams::default();
    let mut rng = xorshift(0xfeed_beef);
    for instance in 0..6 {
        let mut set: Vec<u64> = (0..101).filter(|_| rng().is_multiple_of(4)).collect();
        if set.is_empty() {
            set.push(rng() % 101);
        }
        set.sort_unstable();
        set.dedup();
        let trace = driver_zn(&g, &set, c, &params)
            .unwrap_or_else(|e| panic!("instance {instance}: driver failed: {e}"));
        assert_eq!(trace.steps.last().unwrap().kind, StepKind::TerminalCount);
        let check = verify_trace(&trace).unwrap();
        assert!(
            check.ok,
            "instance {instance} ({} elements): {:?}",
            set.len(),
            check.issues
        );
        assert!(check.steps <= check.length_bound);
    }
}

#[test]
fn cyclic_driver_other_equations_verify() {
    let g = cyclic_group(61).unwrap();
    let params = DriverParams::default();
    let mut rng = xorshift(0x0dd_ba11);
    for &(c1, c2, c3) in &[(1i64, 2i64, -3i64), (2, 3, -5), (1, -4, 3)] {
        let c = EquationCoeffs::new(&g, c1, c2, c3).unwrap();
        let mut set: Vec<u64> = (0..61).filter(|_| rng().is_multiple_of(3)).collect();
        if set.is_empty() {
            set.push(1);
        }
        let trace = driver_zn(&g, &set, c, &params).unwrap();
        let check = verify_trace(&trace).unwrap();
        assert!(check.ok, "coeffs {c1},{c2},{c3}: {:?}", check.issues);
    }
}

#[test]
fn vector_driver_traces_verify_on_seeded_instances() {
    let g = vector_group(3, 3).unwrap();
    let c = EquationCoeffs::standard(&g).unwrap();
    let params = DriverParams::default();
    let mut rng = xorshift(0xcafe_f00d);
    for instance in 0..4 {
        let mut set: Vec<u64> = (0..27).filter(|_| rng().is_multiple_of(3)).collect();
        if set.is_empty() {
            set.push(rng() % 27);
        }
        set.sort_unstable();
        set.dedup();
        let trace = driver_fpn(&g, &set, c, &params)
            .unwrap_or_else(|e| panic!("instance {instance}: driver failed: {e}"));
        assert_eq!(trace.steps.last().unwrap().kind, StepKind::TerminalCount);
        let check = verify_trace(&trace).unwrap();
        assert!(check.ok, "instance {instance}: {:?}", check.issues);
    }
}

#[test]
fn driver_rejects_bad_inputs() {
    let g = cyclic_group(101).unwrap();
    let c = EquationCoeffs::standard(&g).unwrap();
    let params = DriverParams::default();
    assert!(driver_zn(&g, &[], c, &params).is_err());
    assert!(driver_zn(&g, &[101], c, &params).is_err());
    let big = cyclic_group(2053).unwrap();
    let cb = EquationCoeffs::standard(&big).unwrap();
    assert!(matches!(
        driver_zn(&big, &[0, 1], cb, &params),
        Err(CoreError::TooLarge { .. })
    ));
    let gv = vector_group(3, 2).unwrap();
    assert!(driver_zn(&gv, &[0], EquationCoeffs::standard(&gv).unwrap(), &params).is_err());
    let even = vector_group(2, 3).unwrap();
    assert!(EquationCoeffs::new(&even, 1, 1, -2).is_err());
}
