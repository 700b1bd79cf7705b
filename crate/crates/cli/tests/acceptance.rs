//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Library-level criteria call `dedekind` directly; the oracle, range and
//! single-family criteria drive the `dedekind` binary the way a user would.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use dedekind::coverage_search::{
    construct_seed, enumerate_numerators, verify_arithmetic_progression_coverage,
};
use dedekind::exact_arith::{gcd_u64, int, is_square_u64, mod_inverse, modulo, totient_u64};
use dedekind::girstmair::{
    c2, c3, delta, f, f_decompose, gamma_set, is_admissible_numerator, predicted_class_count,
    split_check,
};

const SEED: u64 = 0x5eed_2026;

/// Pass with a detail line, or fail with the reason.
type Verdict = Result<String, String>;

type Criterion = (&'static str, fn() -> Verdict);

/// Set when a coverage run exits 3 (a critical finding). The oracle's
/// negative control exits 3 by design and is not counted.
static CRITICAL: OnceLock<()> = OnceLock::new();

fn note_critical(run: &Run) {
    if run.code == 3 {
        let _ = CRITICAL.set(());
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"))
        .join("acceptance")
        .join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

struct Run {
    code: i32,
    stdout: String,
    elapsed: Duration,
}

/// Runs the CLI with `DEDEKIND_RESULTS_DIR` pointing into `dir`, killing it
/// at `limit`.
fn dedekind(args: &[&str], dir: &Path, limit: Duration) -> Result<Run, String> {
    let out_path = dir.join("stdout.txt");
    let err_path = dir.join("stderr.txt");
    let start = Instant::now();
    let mut child = Command::new(env!("CARGO_BIN_EXE_dedekind"))
        .args(args)
        .env("DEDEKIND_RESULTS_DIR", dir.join("results"))
        .stdin(Stdio::null())
        .stdout(File::create(&out_path).map_err(|e| e.to_string())?)
        .stderr(File::create(&err_path).map_err(|e| e.to_string())?)
        .spawn()
        .map_err(|e| format!("spawn: {e}"))?;
    let status = loop {
        if let Some(status) = child.try_wait().map_err(|e| e.to_string())? {
            break status;
        }
        if start.elapsed() > limit {
            let _ = child.kill();
            let _ = child.wait();
            return Err(format!(
                "`dedekind {}` exceeded {:?}",
                args.join(" "),
                limit
            ));
        }
        std::thread::sleep(Duration::from_millis(20));
    };
    Ok(Run {
        code: status.code().unwrap_or(-1),
        stdout: fs::read_to_string(&out_path).map_err(|e| e.to_string())?,
        elapsed: start.elapsed(),
    })
}

fn oracle_run() -> &'static Result<Run, String> {
    static RUN: OnceLock<Result<Run, String>> = OnceLock::new();
    RUN.get_or_init(|| {
        let seed = SEED.to_string();
        dedekind(
            &[
                "oracle-test",
                "--max-b",
                "400",
                "--random",
                "10000",
                "--seed",
                &seed,
            ],
            &scratch("oracle"),
            Duration::from_secs(600),
        )
    })
}

fn oracle_lines(prefixes: &[&str]) -> Verdict {
    let run = oracle_run().as_ref().map_err(Clone::clone)?;
    if run.code != 0 {
        return Err(format!(
            "oracle-test exited {}: {}",
            run.code,
            run.stdout.trim()
        ));
    }
    let mut found = Vec::new();
    for p in prefixes {
        let line = run
            .stdout
            .lines()
            .find(|l| l.starts_with(p))
            .ok_or_else(|| format!("missing `{p}` in oracle-test output"))?;
        found.push(line.trim_start_matches("ok ").to_string());
    }
    Ok(found.join("; "))
}

fn c1_oracle_equivalence() -> Verdict {
    let detail = oracle_lines(&[
        "ok exhaustive: 48678 pairs with b <= 400",
        "ok direct: 10000",
    ])?;
    let fault = dedekind(
        &["oracle-test", "--max-b", "400", "--inject-fault"],
        &scratch("oracle-fault"),
        Duration::from_secs(60),
    )?;
    if fault.code != 3 || !fault.stdout.contains("FAIL exhaustive: S(1, 2)") {
        return Err(format!(
            "negative control: exit {}, output {:?}",
            fault.code,
            fault.stdout.trim()
        ));
    }
    Ok(format!(
        "{detail}; injected fault caught at S(1, 2) with exit 3"
    ))
}

fn c2_identity_suite() -> Verdict {
    oracle_lines(&["ok identities: 10000", "ok jacobi: 10000"])
}

/// A random `(a, t)` with `t <= 10^4`, `t | a² + 1` and `gcd(t, q) = 1`.
fn random_a_t(rng: &mut StdRng, q: u64) -> (u64, u64) {
    loop {
        let a: u64 = rng.gen_range(0..=100_000);
        let norm = a * a + 1;
        let divisors: Vec<u64> = (1..=10_000u64)
            .filter(|&d| norm % d == 0 && gcd_u64(d, q) == 1)
            .collect();
        if !divisors.is_empty() {
            return (a, divisors[rng.gen_range(0..divisors.len())]);
        }
    }
}

fn c3_decomposition_suite() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED ^ 3);
    let mut nontrivial_t = 0;
    for _ in 0..1000 {
        let q: u64 = rng.gen_range(2..=50);
        let (a, t) = random_a_t(&mut rng, q);
        nontrivial_t += usize::from(t > 1);
        let t_star = mod_inverse(&int(t), &int(q)).map_err(|e| e.to_string())?;
        let j = loop {
            let j: i64 = rng.gen_range(-100..=100);
            if gcd_u64((a as i64 + t as i64 * j).unsigned_abs(), q) == 1 {
                break j;
            }
        };
        let case = format!("(a={a}, t={t}, t*={t_star}, j={j}, q={q})");
        let split = split_check(&int(a), &int(t), &t_star, &int(j), &int(q))
            .map_err(|e| format!("{case}: {e}"))?;
        if split.numerator != &split.lam + &split.del {
            return Err(format!("{case}: split equality"));
        }
        if modulo(&split.lam, &int(q)) != int(0) {
            return Err(format!("{case}: lambda = {} is not 0 mod q", split.lam));
        }
        let gamma = gamma_set(q);
        if !gamma.contains(gamma.reduce(&split.lam)) {
            return Err(format!(
                "{case}: lambda = {} outside the target set",
                split.lam
            ));
        }
    }
    Ok(format!(
        "1000 tuples ({nontrivial_t} with t > 1): split exact, lambda = 0 mod q and in Gamma_q"
    ))
}

fn c4_delta_bijection() -> Verdict {
    let mut units = 0;
    for q in 2..=300u64 {
        let qb = int(q);
        let mut image = BTreeSet::new();
        for l in (1..q).filter(|&l| gcd_u64(l, q) == 1) {
            let d = modulo(&delta(&int(l), &qb).map_err(|e| e.to_string())?, &qb);
            let inv = mod_inverse(&int(l), &qb).map_err(|e| e.to_string())?;
            if d != inv {
                return Err(format!("q={q}, l={l}: Delta = {d} mod q, inverse is {inv}"));
            }
            image.insert(d);
            units += 1;
        }
        if image.len() as u64 != totient_u64(q) {
            return Err(format!(
                "q={q}: image has {} of {} units",
                image.len(),
                totient_u64(q)
            ));
        }
    }
    Ok(format!(
        "q in 2..=300, {units} units: Delta mod q is inversion"
    ))
}

fn c5_f_structure() -> Verdict {
    let mut rng = StdRng::seed_from_u64(SEED ^ 5);
    let mut checks = 0;
    for q in 2..=100u64 {
        let qb = int(q);
        let mut sample = BTreeSet::new();
        while sample.len() < 200 {
            let a: i64 = rng.gen_range(-10_000..=10_000);
            let norm = (a * a + 1) as u64;
            if gcd_u64(norm, q) == 1 {
                sample.insert(a);
            }
        }
        for &a in &sample {
            let ab = int(a);
            let base = f(&ab, &qb).map_err(|e| format!("f({a}; q={q}): {e}"))?;
            let dec = f_decompose(&ab, &qb).map_err(|e| format!("decompose({a}; q={q}): {e}"))?;
            if dec.evaluate(&ab).to_integer() != Some(base.clone()) {
                return Err(format!("q={q}, a={a}: decomposition differs from f"));
            }
            let g = gcd_u64(a.unsigned_abs(), q) as i64;
            for m in -5i64..=5 {
                let shifted = f(&int(a + m * q as i64), &qb).map_err(|e| e.to_string())?;
                let expect = &base + int(m * q as i64 * (g * g - 1));
                if shifted != expect {
                    return Err(format!(
                        "q={q}, a={a}, m={m}: f = {shifted}, expected {expect}"
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(format!(
        "q <= 100, 200 a each: decomposition exact, {checks} shifts linear"
    ))
}

fn seed_ok(q: u64, g: u64) -> Result<(), String> {
    let a = construct_seed(q, g).map_err(|e| format!("seed(q={q}, g={g}): {e}"))?;
    match verify_arithmetic_progression_coverage(q, a as i64) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("q={q}, g={g}, a={a}: progression does not cover")),
        Err(e) => Err(format!("q={q}, g={g}, a={a}: {e}")),
    }
}

fn c6_seed_constructions() -> Verdict {
    let mut counts = [0usize; 3];
    for q in (2..=500).step_by(2) {
        seed_ok(q, 2)?;
        counts[0] += 1;
    }
    for n in (1..=100u64).step_by(2) {
        let q = n * n;
        if q % 3 == 0 {
            seed_ok(q, 3)?;
            counts[1] += 1;
        } else if q % 5 == 0 {
            seed_ok(q, 5)?;
            counts[2] += 1;
        }
    }
    Ok(format!(
        "{} even q, {} odd squares with 3 | q, {} with 5 | q and 3 ∤ q",
        counts[0], counts[1], counts[2]
    ))
}

struct RangeSummary {
    lines: usize,
    complete: usize,
    from_progression: usize,
}

fn summarize(stdout: &str) -> Result<RangeSummary, String> {
    let mut s = RangeSummary {
        lines: 0,
        complete: 0,
        from_progression: 0,
    };
    for line in stdout.lines() {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        s.lines += 1;
        s.complete += usize::from(v["complete"] == true);
        s.from_progression += usize::from(v["progression_filled"] != "0");
    }
    Ok(s)
}

fn c7_coverage_reproduction() -> Verdict {
    let dir = scratch("range60");
    let short = dedekind(
        &[
            "verify-range",
            "2",
            "60",
            "--max-sum",
            "3100",
            "--fresh",
            "--no-timing",
        ],
        &dir,
        Duration::from_secs(600),
    )?;
    note_critical(&short);
    let s60 = summarize(&short.stdout)?;
    if short.code != 0 || s60.complete != 59 {
        return Err(format!(
            "2..60: exit {}, {} of 59 complete",
            short.code, s60.complete
        ));
    }
    let serial = dedekind(
        &[
            "verify-range",
            "2",
            "60",
            "--max-sum",
            "3100",
            "--fresh",
            "--no-timing",
            "--jobs",
            "1",
        ],
        &scratch("range60-serial"),
        Duration::from_secs(600),
    )?;
    if serial.stdout != short.stdout {
        return Err("2..60 output differs between --jobs 1 and the default pool".into());
    }
    let resumed = dedekind(
        &[
            "verify-range",
            "2",
            "60",
            "--max-sum",
            "3100",
            "--no-timing",
        ],
        &dir,
        Duration::from_secs(600),
    )?;
    if resumed.code != 0 || resumed.stdout != short.stdout {
        return Err("2..60 resumed from checkpoints gives different output".into());
    }

    let long = dedekind(
        &["verify-range", "2", "200", "--max-sum", "3100", "--fresh"],
        &scratch("range200"),
        Duration::from_secs(2 * 3600),
    )?;
    note_critical(&long);
    let s200 = summarize(&long.stdout)?;
    if long.code != 0 || s200.lines != 199 || s200.complete != 199 {
        return Err(format!(
            "2..200: exit {}, {} of 199 complete",
            long.code, s200.complete
        ));
    }
    Ok(format!(
        "2..60 exit 0 in {:.1}s (byte-identical serial and resumed); 2..200 exit 0 in {:.1}s, \
         {} q completed by the seed progression after the capped scan",
        short.elapsed.as_secs_f64(),
        long.elapsed.as_secs_f64(),
        s200.from_progression
    ))
}

fn c8_counting() -> Verdict {
    for q in 2..=10_000u64 {
        let g = gamma_set(q);
        if g.size() * c2(q) * c3(q) != q * q - 1 {
            return Err(format!(
                "q={q}: |Gamma| = {}, c2 = {}, c3 = {}",
                g.size(),
                c2(q),
                c3(q)
            ));
        }
    }
    for q in 2..=200u64 {
        let g = gamma_set(q);
        let stride = if is_square_u64(q) { 24 } else { 12 };
        let brute: BTreeSet<u64> = (0..g.modulus).map(|s| stride * s % g.modulus).collect();
        if brute.len() as u64 != g.size() || brute.iter().any(|&r| !g.contains(r)) {
            return Err(format!("q={q}: brute force gives {} residues", brute.len()));
        }
    }
    Ok("closed form for q <= 10000, brute force for q <= 200".into())
}

fn c9_small_q_closure() -> Verdict {
    let set = |q, b| enumerate_numerators(q, b).map_err(|e| e.to_string());
    let two = set(2, 2000)?;
    if two != BTreeSet::from([3]) {
        return Err(format!("q=2: {two:?}"));
    }
    let three = set(3, 5000)?;
    if three != BTreeSet::from([2, 10, 14, 22]) {
        return Err(format!("q=3: {three:?}"));
    }
    let mut tracked = Vec::new();
    for q in [4u64, 5, 7] {
        let found = set(q, 20_000)?;
        if let Some(k) = found
            .iter()
            .find(|&&k| !is_admissible_numerator(&int(k), &int(q)))
        {
            return Err(format!("q={q}: {k} is not admissible"));
        }
        let predicted = predicted_class_count(q);
        tracked.push(format!(
            "q={q} {}/{predicted} ({:.1}%)",
            found.len(),
            100.0 * found.len() as f64 / predicted as f64
        ));
    }
    Ok(format!(
        "q=2 {{3}}, q=3 {{2,10,14,22}}; admissible subsets: {}",
        tracked.join(", ")
    ))
}

fn c10_single_family_probes() -> Verdict {
    let dir = scratch("single");
    let report = dir.join("single_family.jsonl");
    let mut jsonl = String::new();
    let mut complete = 0;
    let mut runs = 0;
    for r in ["1", "2"] {
        for q in 2..=30u64 {
            let qs = q.to_string();
            let run = dedekind(
                &[
                    "check",
                    &qs,
                    "--family",
                    "single",
                    "--r",
                    r,
                    "--max-sum",
                    "100000",
                    "--no-timing",
                ],
                &dir,
                Duration::from_secs(600),
            )?;
            note_critical(&run);
            match run.code {
                0 => complete += 1,
                2 => {}
                3 => return Err(format!("q={q}, r={r}: critical finding (exit 3)")),
                c => return Err(format!("q={q}, r={r}: exit {c}")),
            }
            jsonl.push_str(&run.stdout);
            runs += 1;
        }
    }
    fs::write(&report, &jsonl).map_err(|e| e.to_string())?;
    Ok(format!(
        "{runs} runs, {complete} complete, no NotInGamma; report at {}",
        report.display()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("C1 oracle equivalence", c1_oracle_equivalence),
        ("C2 identity suite", c2_identity_suite),
        ("C3 decomposition suite", c3_decomposition_suite),
        ("C4 Delta bijection", c4_delta_bijection),
        ("C5 f-structure", c5_f_structure),
        ("C6 seed constructions", c6_seed_constructions),
        ("C7 coverage reproduction", c7_coverage_reproduction),
        ("C8 counting check", c8_counting),
        ("C9 small-q closure", c9_small_q_closure),
        ("C10 single-family probes", c10_single_family_probes),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let verdict =
            std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name} [{secs:.1}s]: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {name} [{secs:.1}s]: {why}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if CRITICAL.get().is_some() {
        ExitCode::from(3)
    } else if failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
