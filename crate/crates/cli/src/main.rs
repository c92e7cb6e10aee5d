use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use schoof_gauss::atkin_gauss::{build_cyclotomic, GaussSetup};
use schoof_gauss::curve::{brute_count, brute_trace, ORACLE_LIMIT};
use schoof_gauss::driver::{classify, count_points, trace_residue_for, CountConfig, MethodChoice, PrimeKind};
use schoof_gauss::fields::is_prime;
use schoof_gauss::metrics::{self, Counters};
use schoof_gauss::ray::ModularPolyTable;
use schoof_gauss::{Curve, Error, Ring};

const EXIT_MATH: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "schoof", version, about = "Point counting on elliptic curves over prime fields")]
struct Cli {
    /// Emit JSON lines on stdout; the human-readable summary goes to stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized step (ChaCha8).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Gauss,
    Classical,
    Baseline,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => MethodChoice::Auto,
            MethodArg::Gauss => MethodChoice::Gauss,
            MethodArg::Classical => MethodChoice::Classical,
            MethodArg::Baseline => MethodChoice::Baseline,
        }
    }
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct CurveArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, allow_hyphen_values = true)]
    a: i64,
    #[arg(long, allow_hyphen_values = true)]
    b: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count the points of a curve.
    Count {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Primes to use first, comma separated.
        #[arg(long, value_delimiter = ',')]
        ell_set: Option<Vec<u64>>,
        /// Compare against an exhaustive count.
        #[arg(long)]
        verify_oracle: bool,
    },
    /// Trace information modulo one prime.
    TraceMod {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        ell: u64,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Random sweep against exhaustive counts.
    Verify {
        #[arg(long, default_value_t = 500)]
        pmax: u64,
        #[arg(long, default_value_t = 100)]
        curves: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Perturbs every pipeline count; exercises the failure path.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Frobenius operation counts in the cyclotomic algebra against powmod.
    Bench {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        ell: u64,
        /// Frobenius power to apply.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

/// One JSON line of output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub counters: BTreeMap<String, Counters>,
    pub elapsed_ms: f64,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OracleMismatch { .. } => EXIT_VERIFY,
            Error::OracleBudgetExceeded { .. } => EXIT_USAGE,
            _ => EXIT_MATH,
        };
        Failure {
            code,
            kind: error_kind(&e),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        kind: "Usage".into(),
        message: message.into(),
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

struct Output {
    json: bool,
}

impl Output {
    fn record(&self, rec: &RunRecord, summary: &str) {
        if self.json {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{}", serde_json::to_string(rec).expect("records serialize")).ok();
            eprintln!("{summary}");
        } else {
            println!("{summary}");
        }
    }

    fn failure(&self, command: &str, f: &Failure) {
        if self.json {
            let obj = json!({ "command": command, "error": { "kind": f.kind, "message": f.message } });
            println!("{obj}");
        }
        eprintln!("error: {}", f.message);
    }
}

fn make_curve(args: &CurveArgs) -> Result<Curve, Failure> {
    if args.p < 5 || !is_prime(args.p) {
        return Err(usage(format!("p must be a prime greater than 3, got {}", args.p)));
    }
    Ok(Curve::new(args.p, args.a, args.b)?)
}

fn check_ell(ell: u64, p: u64) -> Result<(), Failure> {
    if ell < 3 || !is_prime(ell) || ell == p {
        return Err(usage(format!("ell must be an odd prime different from p, got {ell}")));
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("records serialize")
}

fn cmd_count(
    out: &Output,
    seed: u64,
    args: &CurveArgs,
    method: MethodArg,
    ell_set: Option<Vec<u64>>,
    verify_oracle: bool,
) -> Result<(), Failure> {
    let curve = make_curve(args)?;
    if let Some(set) = &ell_set {
        for &ell in set {
            check_ell(ell, curve.p)?;
        }
    }
    let config = CountConfig {
        method: method.into(),
        ell_set,
        verify_oracle,
        seed,
        ..CountConfig::default()
    };
    let result = count_points(&curve, &config)?;
    let rec = RunRecord {
        command: "count".into(),
        inputs: json!({ "curve": curve, "config": config }),
        outputs: to_value(&result),
        counters: BTreeMap::from([("total".to_string(), result.counters)]),
        elapsed_ms: result.elapsed_ms,
    };
    let summary = format!(
        "#E = {} (t = {}) over F_{} from {} primes{}",
        result.count,
        result.t,
        curve.p,
        result.residues.len(),
        if result.oracle_checked { ", oracle agrees" } else { "" }
    );
    out.record(&rec, &summary);
    Ok(())
}

fn cmd_trace_mod(out: &Output, args: &CurveArgs, ell: u64, method: MethodArg) -> Result<(), Failure> {
    let curve = make_curve(args)?;
    check_ell(ell, curve.p)?;
    let start = Instant::now();
    let table = ModularPolyTable::from_env()?;
    let choice: MethodChoice = method.into();
    let (res, counters) = metrics::measure(|| -> Result<_, Error> {
        let class = classify(&curve, ell, Some(&table))?;
        if choice == MethodChoice::Gauss && class.kind == PrimeKind::Elkies {
            return Err(Error::MethodInapplicable(format!("l = {ell} is an Elkies prime for this curve")));
        }
        trace_residue_for(&curve, &class, choice)
    });
    let res = res?;
    let rec = RunRecord {
        command: "trace-mod".into(),
        inputs: json!({ "curve": curve, "ell": ell, "method": choice }),
        outputs: to_value(&res),
        counters: BTreeMap::from([("total".to_string(), counters)]),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let mut summary = format!("t mod {ell} in {:?} via {:?}", res.values, res.method);
    if let Some(note) = &res.note {
        summary.push_str(&format!(" ({note})"));
    }
    out.record(&rec, &summary);
    Ok(())
}

fn sweep_curves(pmax: u64, n: usize, seed: u64) -> Vec<Curve> {
    let primes: Vec<u64> = (5..=pmax).filter(|&p| is_prime(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curves = Vec::with_capacity(n);
    while curves.len() < n && !primes.is_empty() {
        let p = primes[rng.gen_range(0..primes.len())];
        let a = rng.gen_range(0..p) as i64;
        let b = rng.gen_range(0..p) as i64;
        let Ok(c) = Curve::new(p, a, b) else { continue };
        if brute_trace(&c).map(|t| t == 0).unwrap_or(true) {
            continue;
        }
        curves.push(c);
    }
    curves
}

fn cmd_verify(out: &Output, seed: u64, pmax: u64, n: usize, method: MethodArg, inject_fault: bool) -> Result<(), Failure> {
    if pmax > ORACLE_LIMIT {
        return Err(usage(format!("pmax must be at most {ORACLE_LIMIT}")));
    }
    if n > 0 && pmax < 5 {
        return Err(usage("pmax must be at least 5"));
    }
    let start = Instant::now();
    let curves = sweep_curves(pmax, n, seed);
    let mut passed = 0usize;
    let mut mismatches = Vec::new();
    let mut methods: BTreeMap<String, usize> = BTreeMap::new();
    let mut counters = Counters::default();
    for (i, curve) in curves.iter().enumerate() {
        let config = CountConfig {
            method: method.into(),
            seed: seed.wrapping_add(i as u64),
            ..CountConfig::default()
        };
        let expected = brute_count(curve)?;
        let outcome = count_points(curve, &config);
        let (got, detail) = match &outcome {
            Ok(r) => {
                for res in &r.residues {
                    *methods.entry(to_value(&res.method).as_str().unwrap_or_default().to_string()).or_default() += 1;
                }
                counters.fp_muls += r.counters.fp_muls;
                counters.compositions += r.counters.compositions;
                counters.root_extractions += r.counters.root_extractions;
                (Some(r.count + u64::from(inject_fault)), Value::Null)
            }
            Err(e) => (None, json!({ "kind": error_kind(e), "message": e.to_string() })),
        };
        let ok = got == Some(expected);
        if ok {
            passed += 1;
        } else {
            mismatches.push(json!({ "curve": curve, "expected": expected, "got": got, "error": detail }));
        }
    }
    if curves.is_empty() {
        eprintln!("warning: empty sweep, nothing verified");
    }
    let rec = RunRecord {
        command: "verify".into(),
        inputs: json!({ "pmax": pmax, "curves": n, "seed": seed, "method": MethodChoice::from(method) }),
        outputs: json!({
            "passed": passed,
            "total": curves.len(),
            "mismatches": mismatches,
            "residues_by_method": methods,
        }),
        counters: BTreeMap::from([("total".to_string(), counters)]),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    out.record(&rec, &format!("{passed}/{} curves match the exhaustive count", curves.len()));
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            kind: "VerificationFailed".into(),
            message: format!("{} of {} curves mismatched", mismatches.len(), curves.len()),
        })
    }
}

fn cmd_bench(out: &Output, args: &CurveArgs, ell: u64, k: usize) -> Result<(), Failure> {
    let curve = make_curve(args)?;
    check_ell(ell, curve.p)?;
    let start = Instant::now();
    let table = ModularPolyTable::from_env()?;
    let class = classify(&curve, ell, Some(&table))?;
    if class.kind != PrimeKind::Atkin {
        return Err(Error::MethodInapplicable(format!("l = {ell} is not an Atkin prime for this curve")).into());
    }
    let ray = class.ray.expect("Atkin classification carries a ray");
    let r = ray.r;
    let cyc = build_cyclotomic(&ray.a_field, ell)?;
    let setup = GaussSetup::new(ray, cyc)?;
    let (iso, iso_counters) = metrics::measure(|| setup.solve_iso_direct());
    let iso = iso?;
    let (route_i, frob_counters) = metrics::measure(|| setup.frobenius_image(&iso, k));
    let b = setup.ray.algebra.ring();
    let exponent = num_pow(curve.p, k);
    let (route_ii, pow_counters) = metrics::measure(|| {
        let theta_pk = b.pow_big(&b.gen(), &exponent);
        setup.iso_apply(&iso, &theta_pk)
    });
    let equal = route_i == route_ii;
    let rec = RunRecord {
        command: "bench".into(),
        inputs: json!({ "curve": curve, "ell": ell, "k": k }),
        outputs: json!({ "r": r, "n": setup.n(), "values_equal": equal }),
        counters: BTreeMap::from([
            ("iso".to_string(), iso_counters),
            ("frobenius_cyclotomic".to_string(), frob_counters),
            ("powmod_ray".to_string(), pow_counters),
        ]),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let summary = format!(
        "l = {ell}, r = {r}: cyclotomic Frobenius {} mults, powmod {} mults, values {}",
        frob_counters.fp_muls,
        pow_counters.fp_muls,
        if equal { "equal" } else { "DIFFER" }
    );
    out.record(&rec, &summary);
    if equal {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            kind: "VerificationFailed".into(),
            message: "Frobenius routes disagree".into(),
        })
    }
}

fn num_pow(p: u64, k: usize) -> num_bigint::BigUint {
    num_bigint::BigUint::from(p).pow(k as u32)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let out = Output { json: cli.json };
    let (name, result) = match cli.command {
        Command::Count {
            curve,
            method,
            ell_set,
            verify_oracle,
        } => ("count", cmd_count(&out, cli.seed, &curve, method, ell_set, verify_oracle)),
        Command::TraceMod { curve, ell, method } => ("trace-mod", cmd_trace_mod(&out, &curve, ell, method)),
        Command::Verify {
            pmax,
            curves,
            method,
            inject_fault,
        } => ("verify", cmd_verify(&out, cli.seed, pmax, curves, method, inject_fault)),
        Command::Bench { curve, ell, k } => ("bench", cmd_bench(&out, &curve, ell, k)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            out.failure(name, &f);
            ExitCode::from(f.code)
        }
    }
}
