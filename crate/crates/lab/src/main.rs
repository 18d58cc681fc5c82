//! `spectral-lab`: command-line laboratory over the spectral-core library.
//!
//! Subcommands: `spectrum`, `energy`, `cover`, `bohr`, `increment`,
//! `behrend`, `rexact`, `sumset-ap`, `itsa`, `verify`, `experiment`.
//!
//! Exit codes: 0 success, 1 a checked claim failed, 2 configuration error,
//! 3 resource cap exceeded. The environment variable
//! `SPECTRAL_LAB_MAX_ORDER` (default `2^20`) caps accepted group orders.

mod experiments;
mod io;
mod report;
mod suites;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spectral_core::bohr::{bohr_f, bohr_z};
use spectral_core::density::DensityFn;
use spectral_core::dissociation::{spectral_cover, CoverBranch};
use spectral_core::energy::{additive_energy, restricted_energy, WeightFn};
use spectral_core::group::{cyclic_group, next_prime, vector_group, Group};
use spectral_core::increment::{
    driver_fpn, driver_zn, verify_trace, DriverParams, EquationCoeffs,
};
use spectral_core::progfree::{behrend_construct, exact_r_bitmask, exact_r_branch_bound};
use spectral_core::spectra::{cal_l, level_spectrum, spectrum};
use spectral_core::sumset::{itsa_iterate, longest_ap, sumset_ints, ItsaOutcome, ItsaParams};
use spectral_core::CoreError;

use crate::experiments::{run_experiment, ExperimentCfg};
use crate::io::{check_group, load_ints, load_set, load_weights, set_to_json, write_out};
use crate::report::{fmt_sig, LabError, ReportSink, EXIT_OK, EXIT_VIOLATION};
use crate::suites::{run_suite, SuiteCfg, SUITE_NAMES};

#[derive(Parser)]
#[command(
    name = "spectral-lab",
    version,
    about = "Verification-grade Fourier analysis on small finite abelian groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Large spectrum of a set's indicator function.
    Spectrum {
        /// Set file (JSON: group + elements).
        #[arg(long = "in")]
        input: String,
        /// Threshold as a fraction of the l1 mass.
        #[arg(long)]
        eta: f64,
        /// Report the dyadic slice [eta, 2 eta) instead of the full spectrum.
        #[arg(long)]
        level: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Additive energy of a weight function over a character set.
    Energy {
        /// Weight file (JSON: group + entries [[chi, weight], ...]).
        #[arg(long = "in")]
        input: String,
        /// Character-set file (same group).
        #[arg(long)]
        gamma: String,
        /// Moment order m for E_{2m}.
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Restricted variant: two tuple sizes t1 t2 (uses E#).
        #[arg(long, num_args = 2)]
        restricted: Option<Vec<u32>>,
        /// Shift for the restricted variant.
        #[arg(long)]
        lambda: Option<u64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Certified covering of a set's large spectrum.
    Cover {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        eta: f64,
        /// Host-spectrum threshold; capped by the machinery's hypothesis,
        /// larger requests fall back with `hypothesis_met = false`.
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Bohr set construction, regularity, and dilation.
    Bohr {
        /// Cyclic modulus (prime).
        #[arg(long, conflicts_with_all = ["base", "dim"])]
        modulus: Option<u64>,
        /// Vector-space base (odd prime), with --dim.
        #[arg(long, requires = "dim")]
        base: Option<u64>,
        #[arg(long, requires = "base")]
        dim: Option<u32>,
        /// Frequencies (cyclic) as a comma list.
        #[arg(long, value_delimiter = ',')]
        freqs: Vec<u64>,
        /// Widths (cyclic) as a comma list, same length as --freqs.
        #[arg(long, value_delimiter = ',')]
        widths: Vec<f64>,
        /// Annihilated characters (vector spaces) as a comma list.
        #[arg(long, value_delimiter = ',')]
        gamma: Vec<u64>,
        /// Relative dilation factor to apply.
        #[arg(long)]
        dilate: Option<f64>,
        /// Replace the set by a regular dilate from [1/2, 1].
        #[arg(long)]
        regularize: bool,
        /// Regularity scan grid.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Density-increment driver; writes a re-verifiable trace.
    Increment {
        #[arg(long = "in")]
        input: String,
        /// Equation coefficients c1,c2,c3 (must sum to zero).
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1,1,-2")]
        coeffs: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the trace JSON.
        #[arg(long)]
        trace: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Digit-sphere progression-free set construction.
    Behrend {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Exact extremal progression-free sizes up to n (branch-and-bound,
    /// cross-checked against a bitmask sweep where both apply).
    Rexact {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Longest arithmetic progression inside a sumset of integer sets.
    SumsetAp {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Sumset covering iteration on a Bohr-set host.
    Itsa {
        #[arg(long)]
        a1: String,
        #[arg(long)]
        a2: String,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Density exponent in the dilate floor (2 or 4).
        #[arg(long, default_value_t = 2)]
        exponent: u32,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a verification suite (or `all`).
    Verify {
        /// Suite name or `all`.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the suite's default trial count.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long)]
        out: Option<String>,
        /// Suppress the timestamp header (reports become byte-identical).
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Run a named experiment.
    Experiment {
        /// One of: chang-vs-bloom, increment-trace, behrend-scale,
        /// sumset-scale.
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
        /// Trace JSON path (increment-trace).
        #[arg(long)]
        trace: Option<String>,
        #[arg(long)]
        no_timestamp: bool,
        /// Append wall-clock timing comment lines (non-deterministic).
        #[arg(long)]
        with_timing: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit)
        }
    }
}

fn core(e: CoreError) -> LabError {
    LabError::from_core(e)
}

fn run(cli: Cli) -> Result<u8, LabError> {
    match cli.cmd {
        Cmd::Spectrum {
            input,
            eta,
            level,
            out,
        } => cmd_spectrum(&input, eta, level, out.as_deref()),
        Cmd::Energy {
            input,
            gamma,
            m,
            restricted,
            lambda,
            out,
        } => cmd_energy(&input, &gamma, m, restricted, lambda, out.as_deref()),
        Cmd::Cover {
            input,
            eta,
            eps,
            seed,
            out,
        } => cmd_cover(&input, eta, eps, seed, out.as_deref()),
        Cmd::Bohr {
            modulus,
            base,
            dim,
            freqs,
            widths,
            gamma,
            dilate,
            regularize,
            grid,
            out,
        } => cmd_bohr(
            modulus,
            base.zip(dim),
            &freqs,
            &widths,
            &gamma,
            dilate,
            regularize,
            grid,
            out.as_deref(),
        ),
        Cmd::Increment {
            input,
            coeffs,
            seed,
            trace,
            out,
        } => cmd_increment(&input, &coeffs, seed, trace.as_deref(), out.as_deref()),
        Cmd::Behrend { n, out } => cmd_behrend(n, out.as_deref()),
        Cmd::Rexact { n, out } => cmd_rexact(n, out.as_deref()),
        Cmd::SumsetAp { a, b, out } => cmd_sumset_ap(&a, &b, out.as_deref()),
        Cmd::Itsa {
            a1,
            a2,
            sigma,
            seed,
            exponent,
            out,
        } => cmd_itsa(&a1, &a2, sigma, seed, exponent, out.as_deref()),
        Cmd::Verify {
            suite,
            seed,
            trials,
            tolerance,
            out,
            no_timestamp,
        } => cmd_verify(&suite, seed, trials, tolerance, out.as_deref(), !no_timestamp),
        Cmd::Experiment {
            name,
            seed,
            out,
            trace,
            no_timestamp,
            with_timing,
        } => run_experiment(
            &name,
            &ExperimentCfg {
                seed,
                out,
                trace,
                timestamp: !no_timestamp,
                with_timing,
            },
        ),
    }
}

fn cmd_spectrum(input: &str, eta: f64, level: bool, out: Option<&str>) -> Result<u8, LabError> {
    let (group, set) = load_set(input)?;
    let f = DensityFn::indicator(group.clone(), &set).map_err(core)?;
    let rep = if level {
        level_spectrum(&f, eta).map_err(core)?
    } else {
        spectrum(&f, eta).map_err(core)?
    };
    let json = serde_json::json!({
        "group": group,
        "set_size": set.len(),
        "density": set.len() as f64 / group.order() as f64,
        "eta": rep.eta,
        "threshold": rep.threshold,
        "upper": rep.upper,
        "members": rep.members,
        "moduli": rep.moduli,
    });
    write_out(out, &serde_json::to_string_pretty(&json).unwrap())?;
    Ok(EXIT_OK)
}

fn cmd_energy(
    input: &str,
    gamma_path: &str,
    m: u32,
    restricted: Option<Vec<u32>>,
    lambda: Option<u64>,
    out: Option<&str>,
) -> Result<u8, LabError> {
    let (group, entries) = load_weights(input)?;
    let (ggroup, gamma) = load_set(gamma_path)?;
    if group != ggroup {
        return Err(LabError::config(
            "weight file and gamma file use different groups".into(),
        ));
    }
    let w = WeightFn::new(group.clone(), &entries).map_err(core)?;
    let json = match restricted {
        Some(ts) => {
            let (t1, t2) = (ts[0], ts[1]);
            let value = restricted_energy(&w, &gamma, t1, t2, lambda).map_err(core)?;
            serde_json::json!({
                "kind": "restricted",
                "t1": t1, "t2": t2, "shift": lambda,
                "gamma_size": gamma.len(),
                "value": value,
            })
        }
        None => {
            let value = additive_energy(&w, &gamma, m).map_err(core)?;
            serde_json::json!({
                "kind": "additive",
                "m": m,
                "gamma_size": gamma.len(),
                "value": value,
            })
        }
    };
    write_out(out, &serde_json::to_string_pretty(&json).unwrap())?;
    Ok(EXIT_OK)
}

fn cmd_cover(
    input: &str,
    eta: f64,
    eps: f64,
    seed: u64,
    out: Option<&str>,
) -> Result<u8, LabError> {
    let (group, set) = load_set(input)?;
    let f = DensityFn::indicator(group.clone(), &set).map_err(core)?;
    let spec = spectrum(&f, eta).map_err(core)?;
    let w = WeightFn::indicator(group.clone(), &spec.members).map_err(core)?;
    let alpha = f.norm1() / (f.norm_inf() * set.len() as f64);
    let l_eta = cal_l(eta).map_err(core)? as f64;
    let l_alpha = cal_l(alpha).map_err(core)? as f64;
    let eps_cap = (-8.0 * l_eta * l_alpha).exp();

    let (result, eps_used, hypothesis_met) = if eps <= eps_cap * (1.0 + 1e-12) {
        (
            spectral_cover(&f, &set, &w, eta, eps, seed).map_err(core)?,
            eps,
            true,
        )
    } else {
        // The requested threshold is outside the regime the covering lemma
        // guarantees; run with the capped threshold and say so.
        let capped = eps_cap * 0.9;
        (
            spectral_cover(&f, &set, &w, eta, capped, seed).map_err(core)?,
            capped,
            false,
        )
    };
    let verified = result.certificate.verify(&group).map_err(core)?;
    let branch = match result.branch {
        CoverBranch::Chernoff { attempt } => format!("chernoff{attempt}"),
        CoverBranch::Dichotomy => "dichotomy".into(),
    };
    let json = serde_json::json!({
        "group": group,
        "eta": eta,
        "eps_requested": eps,
        "eps_cap": eps_cap,
        "eps_used": eps_used,
        "hypothesis_met": hypothesis_met,
        "mass": result.mass,
        "mass_target": result.mass_target,
        "cover_bound": result.cover_bound,
        "branch": branch,
        "delta_prime": result.delta_prime,
        "certificate": {
            "lambda": result.certificate.lambda,
            "gamma_size": result.certificate.gamma.len(),
            "d": result.certificate.d,
            "covered_set": result.certificate.covered_set,
        },
        "verified": verified.covered,
    });
    write_out(out, &serde_json::to_string_pretty(&json).unwrap())?;
    Ok(if verified.covered { EXIT_OK } else { EXIT_VIOLATION })
}

#[allow(clippy::too_many_arguments)]
fn cmd_bohr(
    modulus: Option<u64>,
    vector: Option<(u64, u32)>,
    freqs: &[u64],
    widths: &[f64],
    gamma: &[u64],
    dilate: Option<f64>,
    regularize: bool,
    grid: usize,
    out: Option<&str>,
) -> Result<u8, LabError> {
    match (modulus, vector) {
        (Some(m), None) => {
            let group = check_group(cyclic_group(m).map_err(core)?)?;
            if freqs.is_empty() || freqs.len() != widths.len() {
                return Err(LabError::config(
                    "--freqs and --widths must be nonempty comma lists of equal length".into(),
                ));
            }
            let mut b = bohr_z(&group, freqs, widths).map_err(core)?;
            if let Some(lam) = dilate {
                b = b.dilate(lam).map_err(core)?;
            }
            if regularize {
                b = b.find_regular_dilate(grid).map_err(core)?;
            }
            let reg = b.is_regular(grid);
            let json = serde_json::json!({
                "group": group,
                "freqs": b.freqs(),
                "widths": b.widths(),
                "scale": b.scale(),
                "rank": b.rank(),
                "size": b.len(),
                "members": b.members(),
                "regular": reg.regular,
                "worst_kappa": reg.worst_kappa,
            });
            write_out(out, &serde_json::to_string_pretty(&json).unwrap())?;
            Ok(EXIT_OK)
        }
        (None, Some((base, dim))) => {
            let group = check_group(vector_group(base, dim).map_err(core)?)?;
            if gamma.is_empty() {
                return Err(LabError::config(
                    "--gamma must list at least one character".into(),
                ));
            }
            let b = bohr_f(&group, gamma).map_err(core)?;
            let json = serde_json::json!({
                "group": group,
                "gamma": b.gamma(),
                "rank": b.rank(),
                "size": b.len(),
                "members": b.members(),
            });
            write_out(out, &serde_json::to_string_pretty(&json).unwrap())?;
            Ok(EXIT_OK)
        }
        _ => Err(LabError::config(
            "specify either --modulus (cyclic) or --base with --dim (vector space)".into(),
        )),
    }
}

fn cmd_increment(
    input: &str,
    coeffs: &[i64],
    seed: u64,
    trace_path: Option<&str>,
    out: Option<&str>,
) -> Result<u8, LabError> {
    let (group, set) = load_set(input)?;
    if coeffs.len() != 3 {
        return Err(LabError::config(
            "--coeffs needs exactly three integers".into(),
        ));
    }
    let eq = EquationCoeffs::new(&group, coeffs[0], coeffs[1], coeffs[2]).map_err(core)?;
    let params = DriverParams {
        seed,
        ..DriverParams::default()
    };
    let trace = match &group {
        Group::Cyclic { .. } => driver_zn(&group, &set, eq, &params).map_err(core)?,
        Group::Vector { .. } => driver_fpn(&group, &set, eq, &params).map_err(core)?,
    };
    let check = verify_trace(&trace).map_err(core)?;
    if let Some(path) = trace_path {
        let json =
            serde_json::to_string_pretty(&trace).map_err(|e| LabError::config(e.to_string()))?;
        std::fs::write(path, json)
            .map_err(|e| LabError::config(format!("cannot write {path}: {e}")))?;
    }
    let mut sink = ReportSink::new(false);
    sink.line(&format!(
        "initial density {}",
        fmt_sig(trace.initial_density)
    ));
    for (i, step) in trace.steps.iter().enumerate() {
        sink.line(&format!(
            "step {} {:?} density {} rank {} c_step {}{}",
            i,
            step.kind,
            fmt_sig(step.density),
            step.rank,
            fmt_sig(step.c_step),
            if step.empirical { " (empirical)" } else { "" }
        ));
    }
    sink.line(&format!(
        "verified: {} ({} steps, bound {})",
        check.ok, check.steps, check.length_bound
    ));
    for issue in &check.issues {
        sink.line(&format!("issue: {issue}"));
    }
    write_out(out, &sink.finish())?;
    Ok(if check.ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_behrend(n: u64, out: Option<&str>) -> Result<u8, LabError> {
    let report = behrend_construct(n).map_err(core)?;
    let modulus = next_prime(2 * n + 1);
    let group = check_group(cyclic_group(modulus).map_err(core)?)?;
    let json = set_to_json(&group, &report.set);
    write_out(out, &json)?;
    if out.is_some() {
        println!(
            "{} elements below {} (digits {}, base {}, radius^2 {}), embedded in Z_{}",
            report.set.len(),
            n,
            report.digits,
            report.base,
            report.radius_sq,
            modulus
        );
    }
    Ok(EXIT_OK)
}

fn cmd_rexact(n: u64, out: Option<&str>) -> Result<u8, LabError> {
    let mut sink = ReportSink::new(false);
    sink.line("n,size,witness,cross_checked");
    let mut violation = false;
    for k in 1..=n {
        let bb = exact_r_branch_bound(k).map_err(core)?;
        let mut cross = false;
        if k <= 22 {
            let mask = exact_r_bitmask(k).map_err(core)?;
            cross = true;
            if mask.size != bb.size {
                violation = true;
                sink.line(&format!(
                    "# disagreement at n={k}: branch-bound {} vs bitmask {}",
                    bb.size, mask.size
                ));
            }
        }
        let witness = bb
            .witness
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";");
        sink.line(&format!("{k},{},{witness},{cross}", bb.size));
    }
    write_out(out, &sink.finish())?;
    Ok(if violation { EXIT_VIOLATION } else { EXIT_OK })
}

fn cmd_sumset_ap(a_path: &str, b_path: &str, out: Option<&str>) -> Result<u8, LabError> {
    let a = load_ints(a_path)?;
    let b = load_ints(b_path)?;
    let sum = sumset_ints(&a, &b).map_err(core)?;
    let ap = longest_ap(&sum).map_err(core)?;
    let json = serde_json::json!({
        "a_size": a.len(),
        "b_size": b.len(),
        "sumset_size": sum.len(),
        "ap": {
            "start": ap.start,
            "diff": ap.diff,
            "len": ap.len,
            "elements": ap.elements(),
        }
    });
    write_out(out, &serde_json::to_string_pretty(&json).unwrap())?;
    Ok(EXIT_OK)
}

fn cmd_itsa(
    a1_path: &str,
    a2_path: &str,
    sigma: f64,
    seed: u64,
    exponent: u32,
    out: Option<&str>,
) -> Result<u8, LabError> {
    let (g1, a1) = load_set(a1_path)?;
    let (g2, a2) = load_set(a2_path)?;
    if g1 != g2 {
        return Err(LabError::config(
            "the two set files use different groups".into(),
        ));
    }
    let host = bohr_z(&g1, &[1], &[2.0]).map_err(core)?;
    let params = ItsaParams {
        seed,
        exponent,
        ..ItsaParams::default()
    };
    let trace = itsa_iterate(&g1, &a1, &a2, &host, sigma, &params).map_err(core)?;
    let records: Vec<serde_json::Value> = trace
        .records
        .iter()
        .map(|r| {
            let outcome = match &r.outcome {
                ItsaOutcome::Covered {
                    b_prime,
                    rho,
                    missing,
                    coverage,
                } => serde_json::json!({
                    "kind": "covered",
                    "dilate_size": b_prime.len(),
                    "rho": rho,
                    "missing": missing,
                    "coverage": coverage,
                }),
                ItsaOutcome::Increment {
                    slot,
                    host,
                    x1,
                    x2,
                    sup1,
                    sup2,
                    target,
                    empirical,
                } => serde_json::json!({
                    "kind": "increment",
                    "slot": slot,
                    "host_size": host.len(),
                    "x1": x1, "x2": x2,
                    "sup1": sup1, "sup2": sup2,
                    "target": target,
                    "empirical": empirical,
                }),
            };
            serde_json::json!({
                "step": r.step,
                "host_size": r.host_size,
                "alpha1": r.alpha1,
                "alpha2": r.alpha2,
                "outcome": outcome,
            })
        })
        .collect();
    let json = serde_json::json!({
        "sigma": sigma,
        "terminal": format!("{:?}", trace.terminal),
        "records": records,
    });
    write_out(out, &serde_json::to_string_pretty(&json).unwrap())?;
    Ok(EXIT_OK)
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    trials: Option<usize>,
    tolerance: f64,
    out: Option<&str>,
    timestamp: bool,
) -> Result<u8, LabError> {
    let cfg = SuiteCfg {
        seed,
        trials,
        tolerance,
    };
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else if SUITE_NAMES.contains(&suite) {
        vec![SUITE_NAMES.iter().find(|&&s| s == suite).copied().unwrap()]
    } else {
        return Err(LabError::config(format!(
            "unknown suite: {suite} (expected one of {} or `all`)",
            SUITE_NAMES.join(", ")
        )));
    };

    let mut sink = ReportSink::new(timestamp);
    sink.line("# spectral-lab verify");
    let mut any_violation = false;
    let mut summary = Vec::new();
    for name in names {
        let report = run_suite(name, &cfg)?;
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        summary.push(format!(
            "{verdict} {name}: {} rows, {} violations",
            report.rows.len(),
            report.violations()
        ));
        if !report.passed() {
            any_violation = true;
        }
        sink.suite_csv(&report);
    }
    let text = sink.finish();
    match out {
        Some(path) => {
            write_out(Some(path), &text)?;
            for line in &summary {
                println!("{line}");
            }
        }
        None => {
            print!("{text}");
            for line in &summary {
                println!("{line}");
            }
        }
    }
    Ok(if any_violation { EXIT_VIOLATION } else { EXIT_OK })
}
