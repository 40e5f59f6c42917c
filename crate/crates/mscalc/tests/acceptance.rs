//! Acceptance criteria. Each prints one PASS/FAIL line; every check is exact
//! and must also finish within its runtime bound. Runs without the libtest
//! harness so the lines are never captured.

use std::process::Command;
use std::time::{Duration, Instant};

use mscalc::cartan::{coalgebra_sum, nu_n, FieldKind, MultiVector};
use mscalc::cli::{run_suite, SuiteConfig, SuiteReport};
use mscalc::random::{random_sections, rng_for};
use mscalc::rat::q;
use rand::Rng;

const SEED: u64 = 42;

fn cfg() -> SuiteConfig {
    SuiteConfig { seed: SEED, trials: 50, dims: vec![2, 3, 4], max_arity: 5, coeff_deg: 2, m: None, omega: None }
}

/// Every named check exists, has no failures and ran at least `min` trials.
fn clean(r: &SuiteReport, names: &[(&str, usize)]) -> Result<(), String> {
    for (name, min) in names {
        let c = r.check(name).ok_or_else(|| format!("{}: missing check {name}", r.suite))?;
        if c.failures > 0 {
            return Err(format!("{name}: {} failures, first witness {}", c.failures, c.witnesses[0]));
        }
        if c.trials < *min {
            return Err(format!("{name}: {} trials < {min}", c.trials));
        }
    }
    Ok(())
}

fn all_clean(r: &SuiteReport) -> Result<(), String> {
    let names: Vec<(&str, usize)> = r.checks.iter().map(|c| (c.name.as_str(), 1)).collect();
    clean(r, &names)
}

fn suite(name: &str) -> Result<SuiteReport, String> {
    run_suite(name, &cfg()).map_err(|e| e.to_string())
}

fn criterion_1() -> Result<(), String> {
    let r = suite("signs")?;
    all_clean(&r)?;
    // Exhaustive over n ≤ 5 plus sampled n = 6, 7; all 127 compositions of n ≤ 7.
    clean(&r, &[("koszul_multiplicative", 470_000), ("total_koszul_reversal", 255), ("unshuffle_cardinality", 127)])
}

fn criterion_2() -> Result<(), String> {
    let r = suite("decalage")?;
    all_clean(&r)?;
    clean(&r, &[("natural_square", 100), ("insertion_decalage", 50)])
}

fn criterion_3() -> Result<(), String> {
    // n = 1..5 across dims {2,3,4}, 50 words each.
    clean(&suite("gerstenhaber")?, &[("jacobi", 5 * 3 * 50)])
}

fn criterion_4() -> Result<(), String> {
    let r = suite("cartan")?;
    all_clean(&r)?;
    clean(&r, &[("cartan_identities", 150), ("lie_derivative_of_words", 4 * 3 * 50), ("contraction_total_koszul", 150)])
}

fn criterion_5() -> Result<(), String> {
    let mut rng = rng_for(SEED, "acceptance-coalgebra");
    for dim in [2, 3, 4] {
        for n in [3, 4] {
            for _ in 0..50 {
                let w: Vec<MultiVector> = (0..n)
                    .map(|_| {
                        let k = rng.gen_range(0..=dim);
                        random_sections::<FieldKind>(&mut rng, dim, k, 2, 0.5)
                    })
                    .collect();
                let lhs = coalgebra_sum(&w).map_err(|e| e.to_string())?;
                let rhs = nu_n(&w).map_err(|e| e.to_string())?.scale(&q(1 << (n - 2)));
                if lhs != rhs {
                    return Err(format!("dim {dim}, n {n}: {lhs} != {rhs}"));
                }
            }
        }
    }
    Ok(())
}

fn criterion_6() -> Result<(), String> {
    clean(&suite("mainforms")?, &[("omega_tilde_cochain_map", 2 * 4 * 50), ("hamiltonian_closed_under_nu", 2 * 4 * 50)])
}

fn criterion_7() -> Result<(), String> {
    clean(
        &suite("mainforms")?,
        &[("naive_jacobi_witness_found", 1), ("xi_jacobi", 2 * 2 * 4 * 10), ("base_row_closed", 1), ("pi1_phi1_strict", 1)],
    )
}

fn criterion_8() -> Result<(), String> {
    let r = suite("transfer")?;
    all_clean(&r)?;
    clean(&r, &[("finite_q_jacobi", 8), ("geometric_q_jacobi", 8), ("geometric_matches_xi_bracket", 1), ("finite_p_independence", 3)])
}

fn criterion_9() -> Result<(), String> {
    let r = suite("roundtrip")?;
    all_clean(&r)?;
    clean(&r, &[("finite_hypothesis_not_vacuous", 1), ("moment_hypothesis_not_vacuous", 1)])
}

fn criterion_10() -> Result<(), String> {
    let r = suite("moment")?;
    all_clean(&r)?;
    clean(&r, &[("translations_five_notions", 3), ("so3_equivalences", 2)])
}

fn criterion_11() -> Result<(), String> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_mscalc"))
            .args(["verify", "all", "--seed", "42", "--json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    if a.status.code() != Some(0) {
        return Err(format!("exit {:?}", a.status.code()));
    }
    if a.stdout.is_empty() || a.stdout != b.stdout {
        return Err("outputs differ".into());
    }
    Ok(())
}

fn main() {
    type Criterion = (&'static str, fn() -> Result<(), String>, u64);
    let criteria: [Criterion; 11] = [
        ("graded signs and unshuffles", criterion_1, 10),
        ("decalage naturality and insertion", criterion_2, 30),
        ("higher Schouten brackets satisfy Jacobi", criterion_3, 120),
        ("Cartan calculus on multivectors", criterion_4, 120),
        ("coalgebra sum equals scaled bracket", criterion_5, 30),
        ("omega-tilde is a cochain map", criterion_6, 60),
        ("naive bracket fails, Xi brackets hold", criterion_7, 120),
        ("transferred brackets", criterion_8, 120),
        ("correspondence roundtrips", criterion_9, 60),
        ("momentum map equivalences", criterion_10, 60),
        ("deterministic verify all", criterion_11, 600),
    ];
    let mut failed = Vec::new();
    for (k, (title, run, bound)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(()) if took > Duration::from_secs(*bound) => Err(format!("took {took:.1?}, bound {bound}s")),
            o => o,
        };
        match &outcome {
            Ok(()) => println!("PASS {:>2} {title} ({took:.2?})", k + 1),
            Err(e) => {
                println!("FAIL {:>2} {title} ({took:.2?}): {e}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
