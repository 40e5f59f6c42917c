use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mscalc::cli::{compute, exit_code, gallery_export, gallery_list, run_all, run_suite, SuiteConfig, SuiteReport};
use mscalc::error::{Error, Result};
use mscalc::msgeo::PreMS;
use serde_json::{json, Value};

/// Exact calculator for multisymplectic brackets, L∞ transfer and momentum maps.
#[derive(Parser)]
#[command(name = "mscalc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random trials per case.
    #[arg(long, global = true, default_value_t = 50)]
    trials: usize,
    /// Ambient dimension(s); repeat or comma-separate.
    #[arg(long, global = true, value_delimiter = ',')]
    dim: Vec<usize>,
    /// Multisymplectic order m (uses the volume form on R^{m+1} unless --omega is given).
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Largest bracket arity checked.
    #[arg(long = "max-arity", global = true, default_value_t = 5)]
    max_arity: usize,
    /// Largest polynomial degree of random coefficients.
    #[arg(long = "coeff-deg", global = true, default_value_t = 2)]
    coeff_deg: u32,
    /// Print the full JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// JSON file `{"dim", "m", "omega"}` describing a premultisymplectic form.
    #[arg(long, global = true)]
    omega: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite (or `all`).
    Verify { suite: String },
    /// Evaluate one operation on multivector/form files (text or JSON).
    Compute { op: String, files: Vec<String> },
    /// List the example gallery, or export one entry.
    Gallery { name: Option<String> },
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("{path}: {e}")))
}

fn load_omega(path: &Option<String>) -> Result<Option<PreMS>> {
    let Some(p) = path else { return Ok(None) };
    let bad = |e: String| Error::Malformed(format!("{p}: {e}"));
    let v: Value = serde_json::from_str(&read(p)?).map_err(|e| bad(e.to_string()))?;
    // `omega` may be plain text or a serialized form.
    if let (Some(d), Some(m), Some(Value::String(w))) = (v["dim"].as_u64(), v["m"].as_u64(), v.get("omega")) {
        return PreMS::parse(d as usize, m as usize, w).map(Some);
    }
    let ms: PreMS = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
    PreMS::new(ms.dim, ms.m, ms.omega).map(Some)
}

fn summary(r: &SuiteReport) -> String {
    let mut s = format!("{} [seed {}]: {}\n", r.suite, r.seed, if r.passed { "PASS" } else { "FAIL" });
    for c in &r.checks {
        s += &format!("  {:<40} {:>6} trials  {} failures\n", c.name, c.trials, c.failures);
    }
    s
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cli: Cli) -> Result<bool> {
    let omega = load_omega(&cli.omega)?;
    match cli.cmd {
        Cmd::Verify { suite } => {
            let mut cfg = SuiteConfig {
                seed: cli.seed,
                trials: cli.trials,
                max_arity: cli.max_arity,
                coeff_deg: cli.coeff_deg,
                m: cli.m,
                omega,
                ..SuiteConfig::default()
            };
            if !cli.dim.is_empty() {
                cfg.dims = cli.dim;
            }
            let reports = if suite == "all" { run_all(&cfg)? } else { vec![run_suite(&suite, &cfg)?] };
            let passed = reports.iter().all(|r| r.passed);
            // Failing witnesses are always serialized in full.
            if cli.json || !passed {
                let body = if suite == "all" {
                    json!({ "seed": cfg.seed, "passed": passed, "suites": reports })
                } else {
                    json!(reports[0])
                };
                println!("{}", pretty(&body));
            } else {
                reports.iter().for_each(|r| print!("{}", summary(r)));
            }
            Ok(passed)
        }
        Cmd::Compute { op, files } => {
            let inputs = files.iter().map(|f| read(f)).collect::<Result<Vec<_>>>()?;
            let dim = match cli.dim.as_slice() {
                [] => None,
                [d] => Some(*d),
                _ => return Err(Error::Argument("compute takes a single --dim".into())),
            };
            let out = compute(&op, &inputs, dim, omega.as_ref())?;
            match (&out.value.get("result"), cli.json) {
                (Some(Value::String(s)), false) => println!("{s}"),
                _ => println!("{}", pretty(&out.value)),
            }
            Ok(out.clean)
        }
        Cmd::Gallery { name: None } => {
            println!("{}", pretty(&gallery_list()));
            Ok(true)
        }
        Cmd::Gallery { name: Some(n) } => {
            let out = gallery_export(&n)?;
            println!("{}", pretty(&out.value));
            Ok(out.clean)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
