use std::path::PathBuf;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::json;

use dedekind::coverage_search::{
    checkpoint, construct_seed, enumerate_numerators, run_search,
    verify_arithmetic_progression_coverage, SearchConfig, SearchReport,
};
use dedekind::dedekind_core::{dedekind_fast, dedekind_naive};
use dedekind::exact_arith::totient_u64;
use dedekind::girstmair::{denominator_of, gamma_set, predicted_class_count};
use dedekind::{Error, Fraction};

use crate::{
    oracle, Command, FamilyArg, SearchArgs, EXIT_CRITICAL, EXIT_INCOMPLETE, EXIT_OK, EXIT_USAGE,
};

pub fn run(cmd: Command) -> u8 {
    match cmd {
        Command::Sum { a, b, naive, json } => cmd_sum(&a, &b, naive, json),
        Command::Denominator { a, b, json } => cmd_denominator(&a, &b, json),
        Command::Gamma { q, json } => cmd_gamma(q, json),
        Command::Check { q, search } => cmd_check(q, &search),
        Command::VerifyRange {
            qmin,
            qmax,
            search,
            jobs,
            fresh,
        } => cmd_verify_range(qmin, qmax, &search, jobs, fresh),
        Command::OracleTest {
            max_b,
            seed,
            random,
            inject_fault,
        } => oracle::cmd_oracle_test(max_b, seed, random, inject_fault),
        Command::Enumerate { q, b_max, json } => cmd_enumerate(q, b_max, json),
        Command::Seed { q, g, json } => cmd_seed(q, g, json),
    }
}

/// Exit code for a library error, with the message on stderr.
fn fail(err: &Error) -> u8 {
    if err.is_critical() {
        eprintln!("CRITICAL: {err}");
        EXIT_CRITICAL
    } else {
        eprintln!("error: {err}");
        EXIT_USAGE
    }
}

fn usage(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn cmd_sum(a: &BigInt, b: &BigInt, naive: bool, json: bool) -> u8 {
    let s = if naive {
        dedekind_naive(a, b)
    } else {
        dedekind_fast(a, b)
    };
    let s = match s {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let big_s: Fraction = s.scale(&BigInt::from(12));
    if json {
        let out = json!({
            "a": a.to_string(),
            "b": b.to_string(),
            "s": s.to_string(),
            "S": big_s.to_string(),
            "k": big_s.num().to_string(),
            "q": big_s.den().to_string(),
        });
        println!("{out}");
    } else {
        println!("s({a}, {b}) = {s}");
        println!("S({a}, {b}) = {big_s}");
        println!("(k, q) = ({}, {})", big_s.num(), big_s.den());
    }
    EXIT_OK
}

fn cmd_denominator(a: &BigInt, b: &BigInt, json: bool) -> u8 {
    match denominator_of(a, b) {
        Ok(q) if json => {
            println!(
                "{}",
                json!({"a": a.to_string(), "b": b.to_string(), "q": q.to_string()})
            );
            EXIT_OK
        }
        Ok(q) => {
            println!("{q}");
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

fn cmd_gamma(q: u64, json: bool) -> u8 {
    if !(2..1 << 32).contains(&q) {
        return usage("q must satisfy 2 <= q < 2^32");
    }
    let g = gamma_set(q);
    let phi = totient_u64(q);
    let predicted = predicted_class_count(q);
    if json {
        let out = json!({
            "q": q.to_string(),
            "modulus": g.modulus.to_string(),
            "stride": g.stride.to_string(),
            "d": g.d.to_string(),
            "size": g.size().to_string(),
            "totient": phi.to_string(),
            "predicted_classes": predicted.to_string(),
        });
        println!("{out}");
    } else {
        println!("q                 {q}");
        println!("modulus q^2-1     {}", g.modulus);
        println!("stride            {}", g.stride);
        println!("d                 {}", g.d);
        println!("|Gamma_q|         {}", g.size());
        println!("phi(q)            {phi}");
        println!("predicted classes {predicted}");
    }
    EXIT_OK
}

fn results_dir(args: &SearchArgs) -> PathBuf {
    std::env::var_os("DEDEKIND_RESULTS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| args.out.clone())
}

fn config(q: u64, args: &SearchArgs) -> Result<SearchConfig, String> {
    if !(2..1 << 32).contains(&q) {
        return Err(format!("q = {q} is out of range (2 <= q < 2^32)"));
    }
    match args.family {
        FamilyArg::Full if args.scan_only => Ok(SearchConfig::full_scan_only(q, args.max_sum)),
        FamilyArg::Full => Ok(SearchConfig::full(q, args.max_sum)),
        FamilyArg::Single if args.r == 0 => Err("--r must be at least 1".into()),
        FamilyArg::Single => Ok(SearchConfig::single(q, args.r, args.max_sum)),
    }
}

fn render(report: &SearchReport, args: &SearchArgs) -> String {
    let mut shown = report.clone();
    if args.no_timing {
        shown.elapsed = std::time::Duration::ZERO;
    }
    if args.pretty {
        let flipped = shown.sign_flipped().count();
        format!(
            "q={:<6} family={:<10} covered={}/{} complete={} depth={} sign-flipped={} progression={} elapsed={}ms",
            shown.q,
            shown.family.to_string(),
            shown.covered,
            shown.total,
            shown.complete,
            shown.max_depth_used,
            flipped,
            shown.progression_filled,
            shown.elapsed.as_millis()
        )
    } else {
        checkpoint::to_json_line(&shown)
    }
}

fn outcome_code(report: &SearchReport) -> u8 {
    if report.complete {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    }
}

fn cmd_check(q: u64, args: &SearchArgs) -> u8 {
    let cfg = match config(q, args) {
        Ok(cfg) => cfg,
        Err(msg) => return usage(&msg),
    };
    let report = match run_search(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = checkpoint::save(&results_dir(args), &report) {
        eprintln!("warning: could not write checkpoint: {e}");
    }
    println!("{}", render(&report, args));
    outcome_code(&report)
}

/// Searches one `q`, reusing a valid checkpoint when allowed.
fn search_or_resume(
    cfg: &SearchConfig,
    dir: &std::path::Path,
    fresh: bool,
) -> Result<(SearchReport, bool), Error> {
    if !fresh {
        if let Some(report) = checkpoint::load_valid(dir, cfg) {
            return Ok((report, true));
        }
    }
    let report = run_search(cfg)?;
    if let Err(e) = checkpoint::save(dir, &report) {
        eprintln!("warning: could not write checkpoint for q={}: {e}", cfg.q);
    }
    Ok((report, false))
}

fn cmd_verify_range(
    qmin: u64,
    qmax: u64,
    args: &SearchArgs,
    jobs: Option<usize>,
    fresh: bool,
) -> u8 {
    if qmin < 2 || qmin > qmax {
        return usage(&format!("bad range {qmin}..{qmax}: need 2 <= qmin <= qmax"));
    }
    let configs: Vec<SearchConfig> = match (qmin..=qmax).map(|q| config(q, args)).collect() {
        Ok(c) => c,
        Err(msg) => return usage(&msg),
    };
    let dir = results_dir(args);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = jobs {
        if k == 0 {
            return usage("--jobs must be at least 1");
        }
        builder = builder.num_threads(k);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return usage(&format!("thread pool: {e}")),
    };
    let outcomes: Vec<Result<(SearchReport, bool), Error>> = pool.install(|| {
        configs
            .par_iter()
            .map(|cfg| {
                let out = search_or_resume(cfg, &dir, fresh);
                if let Ok((r, resumed)) = &out {
                    eprintln!(
                        "q={} {}/{}{}",
                        r.q,
                        r.covered,
                        r.total,
                        if *resumed { " (checkpoint)" } else { "" }
                    );
                }
                out
            })
            .collect()
    });
    let mut worst = EXIT_OK;
    for (cfg, outcome) in configs.iter().zip(outcomes) {
        let code = match outcome {
            Ok((report, _)) => {
                println!("{}", render(&report, args));
                outcome_code(&report)
            }
            Err(e) => {
                eprintln!("q={}:", cfg.q);
                fail(&e)
            }
        };
        worst = worst.max(code);
    }
    worst
}

fn cmd_enumerate(q: u64, b_max: u64, json: bool) -> u8 {
    if !(2..=1 << 10).contains(&q) {
        return usage("enumerate supports 2 <= q <= 1024");
    }
    let found = match enumerate_numerators(q, b_max) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let predicted = predicted_class_count(q);
    let modulus = q * (q * q - 1);
    if json {
        let out = json!({
            "q": q.to_string(),
            "b_max": b_max.to_string(),
            "modulus": modulus.to_string(),
            "residues": found.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "count": found.len().to_string(),
            "predicted": predicted.to_string(),
        });
        println!("{out}");
    } else {
        let list: Vec<String> = found.iter().map(|r| r.to_string()).collect();
        println!("numerators mod {modulus}: {{{}}}", list.join(", "));
        println!("found {} of {predicted} admissible classes", found.len());
    }
    EXIT_OK
}

fn cmd_seed(q: u64, g: u64, json: bool) -> u8 {
    let a = match construct_seed(q, g) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let covers = match verify_arithmetic_progression_coverage(q, a as i64) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if json {
        let out = json!({
            "q": q.to_string(),
            "g": g.to_string(),
            "a": a.to_string(),
            "covers": covers,
        });
        println!("{out}");
    } else {
        println!("seed a = {a} (gcd(a, q) = {g}), progression covers Gamma_q: {covers}");
    }
    if covers {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    }
}
