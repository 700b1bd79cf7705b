use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::seed::{construct_seed, progression_gcd, verify_arithmetic_progression_coverage};
use super::tracker::{signed_at, CoverageTracker, Family, Witness};
use crate::error::{Error, Result};
use crate::exact_arith::{gcd_u64, mod_inverse_i128, totient_u64};
use crate::girstmair::{gamma_set, h_fast, predicted_class_count, GammaSet};

/// Parameters for one coverage search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub q: u64,
    /// Largest `x + y` for the full family, largest `|x|` for single families.
    pub max_pair_sum: u64,
    pub family: Family,
    /// Full family only: when the capped scan leaves residues open and `q`
    /// admits a seed, fill them from the progression `h(a + mq, 1)`.
    pub progression: bool,
}

impl SearchConfig {
    pub fn full(q: u64, max_pair_sum: u64) -> Self {
        SearchConfig {
            q,
            max_pair_sum,
            family: Family::Full,
            progression: true,
        }
    }

    /// The full family restricted to the capped scan.
    pub fn full_scan_only(q: u64, max_pair_sum: u64) -> Self {
        SearchConfig {
            progression: false,
            ..SearchConfig::full(q, max_pair_sum)
        }
    }

    pub fn single(q: u64, r: u64, max_abs_x: u64) -> Self {
        SearchConfig {
            q,
            max_pair_sum: max_abs_x,
            family: Family::Single { r },
            progression: false,
        }
    }
}

/// Outcome of a coverage search for one `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub q: u64,
    pub family: Family,
    pub covered: u64,
    pub total: u64,
    pub complete: bool,
    /// Depth of the deepest first witness when complete; the depth scanned
    /// otherwise.
    pub max_depth_used: u64,
    /// First witnesses, ascending by residue.
    pub witnesses: Vec<Witness>,
    /// Residues whose witness came from the seed progression rather than the
    /// capped scan.
    pub progression_filled: u64,
    pub elapsed: Duration,
}

impl SearchReport {
    fn from_tracker(
        cfg: &SearchConfig,
        tracker: &CoverageTracker,
        scanned: u64,
        progression_filled: u64,
        start: Instant,
    ) -> Self {
        let complete = tracker.is_complete();
        let max_depth_used = if complete {
            tracker
                .witnesses()
                .map(|w| w.depth(cfg.q))
                .max()
                .unwrap_or(0)
        } else {
            scanned
        };
        SearchReport {
            q: cfg.q,
            family: cfg.family,
            covered: tracker.covered(),
            total: tracker.total(),
            complete,
            max_depth_used,
            witnesses: tracker.witnesses().copied().collect(),
            progression_filled,
            elapsed: start.elapsed(),
        }
    }

    /// Residues whose first full-family witness was the sign-flipped pair.
    pub fn sign_flipped(&self) -> impl Iterator<Item = u64> + '_ {
        self.witnesses
            .iter()
            .filter(|w| w.family == Family::Full && w.y < 0)
            .map(|w| w.residue)
    }
}

const FIRST_CHUNK: u64 = 8;
const MAX_CHUNK: u64 = 128;

/// Runs `scan` over `start..=cap` in growing chunks, merging per-chunk
/// trackers until coverage is complete. Returns the last index scanned.
fn chunked<F>(
    gamma: GammaSet,
    start: u64,
    cap: u64,
    tracker: &mut CoverageTracker,
    scan: F,
) -> Result<u64>
where
    F: Fn(u64, &mut CoverageTracker) -> Result<()> + Sync,
{
    let mut next = start;
    let mut chunk = FIRST_CHUNK;
    let mut scanned = start.saturating_sub(1).min(cap);
    while !tracker.is_complete() && next <= cap {
        let end = cap.min(next + chunk - 1);
        let part = (next..=end)
            .into_par_iter()
            .try_fold(
                || CoverageTracker::new(gamma),
                |mut local, idx| {
                    scan(idx, &mut local)?;
                    Ok::<_, Error>(local)
                },
            )
            .try_reduce(
                || CoverageTracker::new(gamma),
                |mut a, b| {
                    a.merge(b);
                    Ok(a)
                },
            )?;
        tracker.merge(part);
        scanned = end;
        next = end + 1;
        chunk = (chunk * 2).min(MAX_CHUNK);
    }
    Ok(scanned)
}

/// Inserts `h` on one anti-diagonal `x + y = sum` of positive coprime pairs,
/// together with the sign-flipped residue for `(x, -y)`.
fn scan_diagonal(q: u64, sum: u64, tracker: &mut CoverageTracker) -> Result<()> {
    let modulus = tracker.gamma().modulus;
    for x in 1..sum {
        let y = sum - x;
        if gcd_u64(x, sum) != 1 {
            continue;
        }
        let t = (x * x + y * y) % q;
        if gcd_u64(t, q) != 1 {
            continue;
        }
        let residue = h_fast(x as i64, y as i64, q)?;
        let (x, y) = (x as i64, y as i64);
        tracker.record(
            residue,
            Witness {
                x,
                y,
                family: Family::Full,
                residue,
            },
        )?;
        let flipped = (modulus - residue) % modulus;
        tracker.record(
            flipped,
            Witness {
                x,
                y: -y,
                family: Family::Full,
                residue: flipped,
            },
        )?;
    }
    Ok(())
}

/// Coverage of `Γ_q` by `h(x, y)` over positive coprime pairs, in ascending
/// `x + y` and then ascending `x`, stopping at completion or at the cap.
pub fn search_full_family(cfg: &SearchConfig) -> Result<SearchReport> {
    assert_eq!(
        cfg.family,
        Family::Full,
        "search_full_family needs the full family"
    );
    let start = Instant::now();
    let gamma = gamma_set(cfg.q);
    let mut tracker = CoverageTracker::new(gamma);
    let scanned = chunked(gamma, 2, cfg.max_pair_sum, &mut tracker, |sum, local| {
        scan_diagonal(cfg.q, sum, local)
    })?;
    let filled = if cfg.progression && !tracker.is_complete() {
        fill_from_progression(cfg.q, &mut tracker)?
    } else {
        0
    };
    Ok(SearchReport::from_tracker(
        cfg, &tracker, scanned, filled, start,
    ))
}

/// Completes the tracker with witnesses `(a + mq, 1)` where `a` is the CRT
/// seed for `q`. Since `h(x, 1) = f(x)` and `f(a + mq) = f(a) + mq(g² - 1)`,
/// each open residue `r` is hit at the least `m >= 0` solving
/// `m q(g² - 1) ≡ r - f(a) (mod q² - 1)`. Every witness is re-evaluated.
/// Returns the number of residues filled; 0 when `q` has no seed.
fn fill_from_progression(q: u64, tracker: &mut CoverageTracker) -> Result<u64> {
    let Some(g) = progression_gcd(q) else {
        return Ok(0);
    };
    let a = construct_seed(q, g)?;
    if !verify_arithmetic_progression_coverage(q, a as i64)? {
        return Err(Error::Identity(format!(
            "seed {a} for q={q} does not sweep the target set"
        )));
    }
    let modulus = tracker.gamma().modulus as u128;
    let base = h_fast(a as i64, 1, q)? as u128;
    let step = (q as u128 * (g * g - 1) as u128) % modulus;
    let common = gcd_u64(step as u64, modulus as u64) as u128;
    let period = modulus / common;
    let step_inv = mod_inverse_i128((step / common) as i128, period as i128)
        .expect("step / gcd is a unit mod the period") as u128;
    let open: Vec<u64> = tracker.missing().collect();
    for &r in &open {
        let diff = (r as u128 + modulus - base) % modulus;
        if diff % common != 0 {
            return Err(Error::Identity(format!(
                "residue {r} is off the progression f({a}) + m*{step} mod {modulus} for q={q}"
            )));
        }
        let m = (diff / common * step_inv) % period;
        let x = i64::try_from(a as u128 + m * q as u128).expect("progression witness fits i64");
        let got = h_fast(x, 1, q)?;
        if got != r {
            return Err(Error::Identity(format!(
                "h({x}, 1) = {got} for q={q}, progression predicts {r}"
            )));
        }
        tracker.record(
            r,
            Witness {
                x,
                y: 1,
                family: Family::Full,
                residue: r,
            },
        )?;
    }
    Ok(open.len() as u64)
}

/// Coverage of `Γ_q` by `h(x + rq, xrq - 1)` for `x = 0, 1, -1, 2, ...` with
/// `|x|` up to the cap.
pub fn search_single_family(cfg: &SearchConfig) -> Result<SearchReport> {
    let Family::Single { r } = cfg.family else {
        panic!("search_single_family needs a single family");
    };
    assert!(r >= 1, "single family needs r >= 1");
    let start = Instant::now();
    let q = cfg.q;
    let gamma = gamma_set(q);
    let rq = (r * q) as i64;
    let mut tracker = CoverageTracker::new(gamma);
    let last = 2 * cfg.max_pair_sum;
    let scanned = chunked(gamma, 0, last, &mut tracker, |k, local| {
        let x = signed_at(k);
        let (hx, hy) = (x + rq, x * rq - 1);
        if gcd_u64(hx.unsigned_abs(), hy.unsigned_abs()) != 1 {
            return Ok(());
        }
        let norm = ((x.unsigned_abs() % q).pow(2) + 1) % q;
        if gcd_u64(norm, q) != 1 {
            return Ok(());
        }
        let residue = h_fast(hx, hy, q)?;
        local.record(
            residue,
            Witness {
                x: hx,
                y: hy,
                family: cfg.family,
                residue,
            },
        )?;
        Ok(())
    })?;
    let scanned_abs = signed_at(scanned).unsigned_abs();
    Ok(SearchReport::from_tracker(
        cfg,
        &tracker,
        scanned_abs,
        0,
        start,
    ))
}

/// Dispatches on the configured family.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchReport> {
    match cfg.family {
        Family::Full => search_full_family(cfg),
        Family::Single { .. } => search_single_family(cfg),
    }
}

/// A search outcome read against the numerator conjecture for `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureReport {
    pub report: SearchReport,
    /// `|Γ_q| · φ(q)`, the number of admissible classes mod `q(q²-1)`.
    pub predicted_classes: u64,
    pub gamma_size: u64,
    pub totient: u64,
    /// Complete coverage of `Γ_q` by attained `λ` values, combined with `Δ`
    /// permuting the units mod `q`, realizes every admissible class.
    pub conjecture_holds: bool,
}

pub fn verify_conjecture(cfg: &SearchConfig) -> Result<ConjectureReport> {
    let report = run_search(cfg)?;
    let gamma_size = gamma_set(cfg.q).size();
    Ok(ConjectureReport {
        conjecture_holds: report.complete,
        predicted_classes: predicted_class_count(cfg.q),
        gamma_size,
        totient: totient_u64(cfg.q),
        report,
    })
}
