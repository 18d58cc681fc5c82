//! Acceptance gate: thirteen numbered end-to-end checks, one test each.
//! Every test prints a single `ACCEPTANCE Cxx <name>: PASS|FAIL` line
//! (visible with `--nocapture`, or automatically on failure) and then
//! asserts, so a red criterion fails the build.
//!
//! All tolerances are pinned here as constants; the seeds are fixed so
//! every run checks the identical instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectral_core::bohr::{bohr_f, bohr_z};
use spectral_core::density::DensityFn;
use spectral_core::dissociation::{
    energy_or_cover, gamma_dimension, spectral_cover, techlemma_partition, DichotomyOutcome,
};
use spectral_core::energy::{
    additive_energy, central_factorial_check, en1_bound_check, en2_bound_check, shkredov_check,
    WeightFn,
};
use spectral_core::group::{cyclic_group, vector_group, Group};
use spectral_core::increment::{
    count_solutions, driver_fpn, driver_zn, trilinear_count, upsilon_invariance, verify_trace,
    DriverParams, EquationCoeffs, StepKind,
};
use spectral_core::progfree::{
    behrend_construct, exact_r_bitmask, exact_r_branch_bound, is_3ap_free,
};
use spectral_core::spectra::{cal_l, spectrum};
use spectral_core::sumset::{longest_ap, longest_ap_brute};

/// Relative slack for comparisons between two float routes.
const REL_TOL: f64 = 1e-9;
/// Relative slack for recounting a float from integer data.
const RECOUNT_TOL: f64 = 1e-6;

fn verdict(id: u32, name: &str, pass: bool) {
    println!(
        "ACCEPTANCE C{id:02} {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion C{id:02} ({name}) failed");
}

fn indicator(group: &Group, set: &[u64]) -> DensityFn {
    DensityFn::indicator(group.clone(), set).expect("valid indicator")
}

fn random_subset(group: &Group, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let n = group.order();
    let density = rng.gen_range(lo..hi);
    let mut out: Vec<u64> = group.elements().filter(|_| rng.gen_bool(density)).collect();
    if out.is_empty() {
        out.push(rng.gen_range(0..n));
    }
    out
}

fn random_distinct(order: u64, count: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut set = std::collections::BTreeSet::new();
    while set.len() < count.min(order as usize) {
        set.insert(rng.gen_range(0..order));
    }
    set.into_iter().collect()
}

fn random_symmetric(group: &Group, max_pairs: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let n = group.order();
    let mut set = std::collections::BTreeSet::new();
    let pairs = 1 + rng.gen_range(0..max_pairs);
    for _ in 0..pairs {
        let g = rng.gen_range(1..n);
        set.insert(g);
        set.insert(group.neg(g));
    }
    if rng.gen_bool(0.5) {
        set.insert(0);
    }
    set.into_iter().collect()
}

// ---------------------------------------------------------------------------
// C01: the large spectrum obeys the Chebyshev-type cardinality bound
//      |Spec_eta(A)| <= eta^-2 alpha^-1, exhaustively on Z_11 and on 10^4
//      random subsets of Z_101, for eta in {0.1, ..., 1.0}.
// ---------------------------------------------------------------------------

#[test]
fn c01_spectrum_size_bound() {
    let etas: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();

    // Exhaustive half: every nonempty subset of Z_11.
    let g11 = cyclic_group(11).unwrap();
    let mut pass = true;
    for mask in 1u64..(1 << 11) {
        let set: Vec<u64> = (0..11).filter(|b| mask >> b & 1 == 1).collect();
        let alpha = set.len() as f64 / 11.0;
        let f = indicator(&g11, &set);
        for &eta in &etas {
            let rep = spectrum(&f, eta).unwrap();
            let bound = 1.0 / (eta * eta * alpha);
            if rep.members.len() as f64 > bound * (1.0 + REL_TOL) {
                pass = false;
            }
        }
    }

    // Random half: 10^4 seeded subsets of Z_101.
    let g101 = cyclic_group(101).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC01);
    for _ in 0..10_000 {
        let set = random_subset(&g101, 0.01, 1.0, &mut rng);
        let alpha = set.len() as f64 / 101.0;
        let f = indicator(&g101, &set);
        for &eta in &etas {
            let rep = spectrum(&f, eta).unwrap();
            let bound = 1.0 / (eta * eta * alpha);
            if rep.members.len() as f64 > bound * (1.0 + REL_TOL) {
                pass = false;
            }
        }
    }
    verdict(1, "spectrum size bound", pass);
}

// ---------------------------------------------------------------------------
// C02: restricted-energy deficiency bound E# <= 4^(k+m) on 200 seeded
//      (S, Gamma) instances in the dual of Z_31, |S| <= 8, m = 2, across
//      every tuple shape (t1, t2) with t1, t2 <= m.
// ---------------------------------------------------------------------------

#[test]
fn c02_restricted_energy_deficiency() {
    let group = cyclic_group(31).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC02);
    let m = 2u32;
    let mut pass = true;
    for t in 0..200u64 {
        let s = random_distinct(31, 1 + (t as usize % 8), &mut rng);
        let gamma = random_symmetric(&group, 3, &mut rng);
        for t1 in 0..=m {
            for t2 in 0..=m {
                let check = en1_bound_check(&group, &s, &gamma, m, t1, t2).unwrap();
                if !check.holds {
                    pass = false;
                }
            }
        }
    }
    verdict(2, "restricted energy deficiency", pass);
}

// ---------------------------------------------------------------------------
// C03: full-energy bound through restricted energies on 100 seeded weight
//      functions with support size <= 5 in the dual of Z_11, m = 2.
// ---------------------------------------------------------------------------

#[test]
fn c03_full_energy_bound() {
    let group = cyclic_group(11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC03);
    let mut pass = true;
    for t in 0..100u64 {
        let support = random_distinct(11, 1 + (t as usize % 5), &mut rng);
        let entries: Vec<(u64, f64)> = support
            .iter()
            .map(|&c| (c, rng.gen_range(0.1..1.0)))
            .collect();
        let w = WeightFn::new(group.clone(), &entries).unwrap();
        let gamma = random_distinct(11, 1 + (t as usize % 5), &mut rng);
        let check = en2_bound_check(&w, &gamma, 2).unwrap();
        if !check.holds {
            pass = false;
        }
    }
    verdict(3, "full energy bound", pass);
}

// ---------------------------------------------------------------------------
// C04: spectral lower bound for the additive energy of a large spectrum on
//      100 seeded instances over Z_11..Z_17, eta in {0.2, 0.3, 0.5},
//      m in {1, 2}, eps in {0.1, 0.5}.
// ---------------------------------------------------------------------------

#[test]
fn c04_spectral_energy_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC04);
    let mut pass = true;
    for t in 0..100u64 {
        let n = [11u64, 13, 17][(t % 3) as usize];
        let group = cyclic_group(n).unwrap();
        let a = random_subset(&group, 0.2, 0.7, &mut rng);
        let eta = [0.2, 0.3, 0.5][((t / 3) % 3) as usize];
        let m = 1 + (t % 2) as u32;
        let eps = [0.1, 0.5][((t / 2) % 2) as usize];
        let f = indicator(&group, &a);
        let spec = spectrum(&f, eta).unwrap();
        let w = WeightFn::indicator(group.clone(), &spec.members).unwrap();
        let b: Vec<u64> = if t % 2 == 0 {
            group.elements().collect()
        } else {
            a.clone()
        };
        let check = shkredov_check(&f, &b, &w, eta, m, eps).unwrap();
        if !check.holds {
            pass = false;
        }
    }
    verdict(4, "spectral energy lower bound", pass);
}

// ---------------------------------------------------------------------------
// C05: dual partition: exhaustive over the duals of Z_7 and Z_11, every
//      symmetric nonempty gamma with |gamma| <= 3 against every delta with
//      |delta| <= 2. Both postconditions re-verified: Lambda_0 is covered
//      (certificate checked), and every member of Lambda_1 extends delta's
//      relative dimension by exactly one.
// ---------------------------------------------------------------------------

fn symmetric_gammas(group: &Group) -> Vec<Vec<u64>> {
    let n = group.order();
    let mut out: Vec<Vec<u64>> = vec![vec![0]];
    for g in 1..=(n - 1) / 2 {
        let pair = vec![g, group.neg(g)];
        let mut with_zero = vec![0, g, group.neg(g)];
        with_zero.sort_unstable();
        out.push(pair);
        out.push(with_zero);
    }
    out
}

fn small_deltas(order: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![vec![]];
    for a in 0..order {
        out.push(vec![a]);
        for b in (a + 1)..order {
            out.push(vec![a, b]);
        }
    }
    out
}

#[test]
fn c05_dual_partition_exhaustive() {
    let mut pass = true;
    let mut cases = 0usize;
    for n in [7u64, 11] {
        let group = cyclic_group(n).unwrap();
        for gamma in symmetric_gammas(&group) {
            for delta in small_deltas(n) {
                cases += 1;
                let part = techlemma_partition(&group, &delta, &gamma).unwrap();

                // Partition property.
                let mut union: Vec<u64> = part
                    .lambda0
                    .iter()
                    .chain(part.lambda1.iter())
                    .copied()
                    .collect();
                union.sort_unstable();
                let disjoint = union.windows(2).all(|w| w[0] < w[1]);
                if !(disjoint && union.len() as u64 == n) {
                    pass = false;
                }

                // Covering postcondition, with the certificate re-walked.
                let report = part.certificate.verify(&group).unwrap();
                if !(report.covered && part.certificate.covered_set == part.lambda0) {
                    pass = false;
                }

                // Extension postcondition, exhaustively over Lambda_1.
                for &l in &part.lambda1 {
                    let mut ext = delta.clone();
                    if !ext.contains(&l) {
                        ext.push(l);
                    }
                    let dim = gamma_dimension(&group, &ext, &gamma).unwrap().dimension;
                    if dim != part.r + 1 {
                        pass = false;
                    }
                }
            }
        }
    }
    println!("  (C05 covered {cases} exhaustive cases)");
    verdict(5, "dual partition exhaustive", pass);
}

// ---------------------------------------------------------------------------
// C06: the energy-or-cover dichotomy returns a re-verifiable branch on all
//      50 seeded admissible instances; zero inconclusive outcomes allowed.
// ---------------------------------------------------------------------------

#[test]
fn c06_energy_cover_dichotomy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC06);
    let mut pass = true;
    let (mut covers, mut energies) = (0usize, 0usize);
    for t in 0..50u64 {
        let m = 2u32;
        let d = 8u64;
        // Trials 0..40: dense supports in Z_101, where the cover branch fires.
        // Trials 40..50: flat 48-element supports in Z_16381, where the
        // affordable dissociated core carries too little mass and the energy
        // branch fires.
        let (group, w, gamma, n) = if t < 40 {
            let group = cyclic_group(101).unwrap();
            let s = 48 + (t as usize % 25);
            let support = random_distinct(101, s, &mut rng);
            let entries: Vec<(u64, f64)> = support
                .iter()
                .map(|&c| (c, rng.gen_range(0.9..1.0)))
                .collect();
            let w = WeightFn::new(group.clone(), &entries).unwrap();
            let gamma = random_symmetric(&group, 4, &mut rng);
            (group, w, gamma, 2 + (t % 2) as u32)
        } else {
            let group = cyclic_group(16381).unwrap();
            let support = random_distinct(16381, 48, &mut rng);
            let entries: Vec<(u64, f64)> = support.iter().map(|&c| (c, 1.0)).collect();
            let w = WeightFn::new(group.clone(), &entries).unwrap();
            (group, w, vec![0u64], 3u32)
        };
        // Any error here (including an inconclusive dichotomy) is a failure.
        let outcome = match energy_or_cover(&w, &gamma, m, n, d, 0xAC06 ^ t) {
            Ok(o) => o,
            Err(_) => {
                pass = false;
                continue;
            }
        };
        match outcome {
            DichotomyOutcome::SmallEnergy { energy, bound } => {
                energies += 1;
                let again = additive_energy(&w, &gamma, m).unwrap();
                if (energy - again).abs() > RECOUNT_TOL * (1.0 + energy.abs()) {
                    pass = false;
                }
                if energy > bound * (1.0 + REL_TOL) {
                    pass = false;
                }
            }
            DichotomyOutcome::Cover {
                delta,
                mass,
                certificate,
            } => {
                covers += 1;
                let target = (n as f64 / d as f64) * w.norm1();
                if mass < target * (1.0 - REL_TOL) {
                    pass = false;
                }
                let report = certificate.verify(&group).unwrap();
                let mut recount = 0.0;
                for (i, &c) in w.support().iter().enumerate() {
                    if delta.contains(&c) {
                        recount += w.weights()[i];
                    }
                }
                if !report.covered || (recount - mass).abs() > REL_TOL * (1.0 + mass) {
                    pass = false;
                }
                if !delta.iter().all(|c| certificate.covered_set.contains(c)) {
                    pass = false;
                }
            }
        }
    }
    println!("  (C06 branches: {energies} energy, {covers} cover)");
    // Both arms of the dichotomy must actually be exercised.
    if energies == 0 || covers == 0 {
        pass = false;
    }
    verdict(6, "energy-or-cover dichotomy", pass);
}

// ---------------------------------------------------------------------------
// C07: spectrum covering on 50 seeded sets in Z_101..Z_211: the retained
//      mass and the generator budget are checked against independently
//      recomputed targets, and the certificate is re-walked.
// ---------------------------------------------------------------------------

#[test]
fn c07_spectrum_cover() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC07);
    let mut pass = true;
    for t in 0..50u64 {
        let n = [101u64, 151, 211][(t % 3) as usize];
        let group = cyclic_group(n).unwrap();
        let a = random_subset(&group, 0.1, 0.5, &mut rng);
        let eta = [0.2, 0.4][(t % 2) as usize];
        let f = indicator(&group, &a);
        let spec = spectrum(&f, eta).unwrap();
        let w = WeightFn::indicator(group.clone(), &spec.members).unwrap();
        let alpha = f.norm1() / (f.norm_inf() * a.len() as f64);
        let l_eta = cal_l(eta).unwrap() as f64;
        let l_alpha = cal_l(alpha).unwrap() as f64;
        let eps = (-8.0 * l_eta * l_alpha).exp() * 0.9;
        let out = spectral_cover(&f, &a, &w, eta, eps, 0xAC07 ^ t).unwrap();

        // Independent targets.
        let mass_target = eta * w.norm1() / 4096.0;
        let size_budget = 16384.0 * l_alpha / eta;

        let mut mass = 0.0;
        for (i, &c) in w.support().iter().enumerate() {
            if out.delta_prime.contains(&c) {
                mass += w.weights()[i];
            }
        }
        if mass < mass_target * (1.0 - REL_TOL) {
            pass = false;
        }
        if out.certificate.lambda.len() as f64 > size_budget * (1.0 + REL_TOL) {
            pass = false;
        }
        let report = out.certificate.verify(&group).unwrap();
        let in_cover = out
            .delta_prime
            .iter()
            .all(|c| out.certificate.covered_set.contains(c));
        if !(report.covered && in_cover) {
            pass = false;
        }
    }
    verdict(7, "spectrum cover", pass);
}

// ---------------------------------------------------------------------------
// C08: Bohr sets: 100 seeded rank <= 3 instances in Z_211 produce a regular
//      dilate that passes an exact regularity re-check and satisfies the
//      meet size law; in F_3^4 the annihilator duality |B| * 3^rank = 81
//      holds exactly. All frequency sets have at most 3 generators.
// ---------------------------------------------------------------------------

#[test]
fn c08_bohr_regularity_and_size() {
    let group = cyclic_group(211).unwrap();
    let f34 = vector_group(3, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC08);
    let mut pass = true;
    for t in 0..100u64 {
        let rank = 1 + (t as usize % 3);
        let mut freqs: Vec<u64> = Vec::new();
        while freqs.len() < rank {
            let c = rng.gen_range(1..211);
            if !freqs.contains(&c) {
                freqs.push(c);
            }
        }
        let widths: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.15..0.6)).collect();
        let b = bohr_z(&group, &freqs, &widths).unwrap();

        // Basic shape.
        if !(b.members().contains(&0)) {
            pass = false;
        }
        let symmetric = b
            .members()
            .iter()
            .all(|&x| b.members().contains(&group.neg(x)));
        if !symmetric {
            pass = false;
        }

        // A regular dilate exists in [1/2, 1] and re-checks as regular.
        match b.find_regular_dilate(64) {
            Ok(reg) => {
                if !reg.is_regular(64).regular {
                    pass = false;
                }
            }
            Err(_) => {
                pass = false;
            }
        }

        // Meet size law (first form), with halved widths.
        let sub_widths: Vec<f64> = widths.iter().map(|w| w / 2.0).collect();
        let law = b.siz_check(&freqs, &sub_widths).unwrap();
        if !law.holds {
            pass = false;
        }

        // Vector-space duality.
        if t % 10 == 0 {
            let count = 1 + (t as usize / 10) % 3;
            let gamma = random_distinct(81, count, &mut rng);
            let bf = bohr_f(&f34, &gamma).unwrap();
            if bf.len() * 3u64.pow(bf.rank() as u32) != 81 {
                pass = false;
            }
        }
    }
    verdict(8, "bohr regularity and size", pass);
}

// ---------------------------------------------------------------------------
// C09: solution counting: the pair-scan and character-sum routes agree on
//      100 seeded instances over Z_101 and F_3^3 (the library errors on
//      disagreement), the diagonal forces count >= |A|, and the count is
//      exactly invariant under unit dilation plus translation.
// ---------------------------------------------------------------------------

#[test]
fn c09_counting_routes() {
    let g101 = cyclic_group(101).unwrap();
    let g27 = vector_group(3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC09);
    let coeff_table: [[i64; 3]; 4] = [[1, 1, -2], [1, 2, -3], [2, 3, -5], [1, -4, 3]];
    let mut pass = true;
    for t in 0..100u64 {
        let (group, c) = if t % 2 == 0 {
            (&g101, coeff_table[((t / 2) % 4) as usize])
        } else {
            (&g27, [1, 1, -2])
        };
        let a = random_subset(group, 0.1, 0.6, &mut rng);
        let coeffs = EquationCoeffs::new(group, c[0], c[1], c[2]).unwrap();
        let count = match count_solutions(group, &a, coeffs) {
            Ok(v) => v,
            Err(_) => {
                pass = false;
                continue;
            }
        };
        if count < a.len() as u64 {
            pass = false;
        }
        let shift = rng.gen_range(0..group.order());
        let unit: i64 = match group {
            Group::Cyclic { modulus } => rng.gen_range(1..*modulus) as i64,
            Group::Vector { .. } => 1 + rng.gen_range(0..2),
        };
        match upsilon_invariance(group, &a, coeffs, shift, unit) {
            Ok(true) => {}
            _ => pass = false,
        }
    }
    verdict(9, "counting routes", pass);
}

// ---------------------------------------------------------------------------
// C10: exact progression-free extremal sizes: branch-and-bound up to n = 30,
//      cross-checked against the bitmask sweep wherever it applies
//      (n <= 22); witnesses re-verified, sizes monotone with unit steps.
// ---------------------------------------------------------------------------

#[test]
fn c10_exact_extremal_sizes() {
    let mut pass = true;
    let mut prev = 0usize;
    for n in 1u64..=30 {
        let bb = exact_r_branch_bound(n).unwrap();
        if n <= 22 {
            let mask = exact_r_bitmask(n).unwrap();
            if mask.size != bb.size {
                pass = false;
            }
            if !(is_3ap_free(&mask.witness).unwrap() && mask.witness.len() == mask.size) {
                pass = false;
            }
        }
        // Witness checks: right length, inside {1..n}, progression-free.
        if bb.witness.len() != bb.size {
            pass = false;
        }
        if !bb.witness.iter().all(|&x| x >= 1 && x <= n) {
            pass = false;
        }
        if !is_3ap_free(&bb.witness).unwrap() {
            pass = false;
        }
        // Monotone, increments of at most one.
        if bb.size < prev || bb.size > prev + 1 {
            pass = false;
        }
        prev = bb.size;
    }
    verdict(10, "exact extremal sizes", pass);
}

// ---------------------------------------------------------------------------
// C11: increment drivers terminate inside the derived step bound with a
//      fully re-verified trace on two concrete instances: a digit-sphere
//      progression-free set in Z_509, and a frozen 20-point line-free set
//      in F_3^4 (its defining property is re-established here before the
//      run). The terminal solution count is recounted from the recorded
//      instance.
// ---------------------------------------------------------------------------

/// Found once by randomized greedy search over F_3^4 (little-endian base-3
/// encoding); its line-free property is re-verified from scratch below.
const CAP_F34: [u64; 20] = [
    1, 2, 4, 8, 16, 18, 20, 25, 26, 28, 44, 56, 64, 68, 70, 71, 73, 74, 78, 79,
];

fn check_trace(group: &Group, set: &[u64], pass: &mut bool) {
    let coeffs = EquationCoeffs::new(group, 1, 1, -2).unwrap();
    let params = DriverParams::default();
    let trace = match group {
        Group::Cyclic { .. } => driver_zn(group, set, coeffs, &params),
        Group::Vector { .. } => driver_fpn(group, set, coeffs, &params),
    };
    let trace = match trace {
        Ok(t) => t,
        Err(_) => {
            *pass = false;
            return;
        }
    };
    let check = verify_trace(&trace).unwrap();
    if !check.ok || !check.issues.is_empty() {
        *pass = false;
    }
    if check.steps > check.length_bound {
        *pass = false;
    }
    let last = trace.steps.last().expect("nonempty trace");
    if last.kind != StepKind::TerminalCount {
        *pass = false;
        return;
    }
    let (count, bound) = match (last.terminal_count, last.terminal_bound) {
        (Some(c), Some(b)) => (c, b),
        _ => {
            *pass = false;
            return;
        }
    };
    if count < bound * (1.0 - REL_TOL) {
        *pass = false;
    }
    // Recount the terminal from scratch: a trilinear terminal records the
    // exact instance; a diagonal terminal records the final set, and its
    // count is the full solution count on it.
    let recount = match &last.terminal_instance {
        Some(inst) => {
            trilinear_count(&trace.group, &inst.a1, &inst.a2, &inst.a3).unwrap() as f64
        }
        None => count_solutions(&trace.group, &last.set, trace.coeffs).unwrap() as f64,
    };
    if (recount - count).abs() > RECOUNT_TOL * (1.0 + count) {
        *pass = false;
    }
}

#[test]
fn c11_driver_termination() {
    let mut pass = true;

    // Cyclic instance: digit-sphere set below 254, equation-safe in Z_509.
    let report = behrend_construct(254).unwrap();
    if !is_3ap_free(&report.set).unwrap() {
        pass = false;
    }
    let g509 = cyclic_group(509).unwrap();
    check_trace(&g509, &report.set, &mut pass);

    // Vector-space instance: frozen 20-point set, line-free re-verified.
    let f34 = vector_group(3, 4).unwrap();
    let cap: Vec<u64> = CAP_F34.to_vec();
    for (i, &x) in cap.iter().enumerate() {
        for &y in &cap[i + 1..] {
            let z = f34.neg(f34.add(x, y));
            if z != x && z != y && cap.contains(&z) {
                pass = false;
            }
        }
    }
    // Large enough that the first step must split rather than terminate.
    let trace = driver_fpn(
        &f34,
        &cap,
        EquationCoeffs::new(&f34, 1, 1, -2).unwrap(),
        &DriverParams::default(),
    )
    .unwrap();
    if trace.steps.first().map(|s| s.kind) == Some(StepKind::TerminalCount)
        && trace.steps.len() == 1
    {
        pass = false;
    }
    check_trace(&f34, &cap, &mut pass);

    verdict(11, "driver termination", pass);
}

// ---------------------------------------------------------------------------
// C12: the progression scan agrees with the quadratic brute force on 100
//      seeded integer sets with ambient size <= 500; a small timing table
//      is reported without being asserted.
// ---------------------------------------------------------------------------

#[test]
fn c12_progression_scan_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC12);
    let mut pass = true;
    for _ in 0..100 {
        let n = rng.gen_range(50..=500u64);
        let size = rng.gen_range(5..=60usize);
        let set = random_distinct(n, size, &mut rng);
        let fast = longest_ap(&set).unwrap();
        let brute = longest_ap_brute(&set).unwrap();
        if fast.len != brute.len {
            pass = false;
        }
        // The witness itself must sit inside the set.
        let sorted = set.clone();
        if !fast.elements().iter().all(|x| sorted.contains(x)) {
            pass = false;
        }
    }
    // Reported, not asserted.
    println!("  (C12 timing, scan vs brute, microseconds)");
    println!("  n,scan_us,brute_us");
    for &n in &[100u64, 200, 400] {
        let set = random_distinct(n, (n / 4) as usize, &mut rng);
        let t0 = std::time::Instant::now();
        let _ = longest_ap(&set).unwrap();
        let scan_us = t0.elapsed().as_micros();
        let t1 = std::time::Instant::now();
        let _ = longest_ap_brute(&set).unwrap();
        let brute_us = t1.elapsed().as_micros();
        println!("  {n},{scan_us},{brute_us}");
    }
    verdict(12, "progression scan agreement", pass);
}

// ---------------------------------------------------------------------------
// C13: the central factorial inequality holds exhaustively up to n = 60.
// ---------------------------------------------------------------------------

#[test]
fn c13_central_factorial() {
    let mut pass = true;
    for n in 0..=60u32 {
        let check = central_factorial_check(n).unwrap();
        if !check.holds {
            pass = false;
        }
    }
    verdict(13, "central factorial inequality", pass);
}
