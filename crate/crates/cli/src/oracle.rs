//! `oracle-test`: the Euclidean descent against the summation oracle, plus
//! the exact identities every Dedekind sum must satisfy.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use dedekind::dedekind_core::{dedekind_naive, normalized, rademacher_phi};
use dedekind::exact_arith::{gcd_u64, int, jacobi, mod_inverse, modulo};
use dedekind::girstmair::denominator_of;
use dedekind::Fraction;

use crate::{EXIT_CRITICAL, EXIT_OK, EXIT_USAGE};

/// Largest `b` of the exhaustive sweep.
const EXHAUSTIVE_CAP: u64 = 400;
/// Largest `b` for randomized identity checks.
const IDENTITY_B_MAX: u64 = 1_000_000;
/// Largest `b` for randomized direct comparison with the `O(b)` oracle.
const DIRECT_B_MAX: u64 = 100_000;
/// Largest odd `q` for the mod-8 congruence.
const JACOBI_Q_MAX: u64 = 999;

struct Oracle {
    fault: bool,
}

impl Oracle {
    /// `S(a, b)` by descent, optionally perturbed for the negative control.
    fn fast(&self, a: &BigInt, b: &BigInt) -> Fraction {
        let s = normalized(a, b).expect("coprime arguments");
        if self.fault && b > &BigInt::one() {
            s + Fraction::new(BigInt::one(), b.clone())
        } else {
            s
        }
    }

    fn naive(&self, a: &BigInt, b: &BigInt) -> Fraction {
        dedekind_naive(a, b)
            .expect("coprime arguments")
            .scale(&int(12))
    }

    fn compare(&self, a: u64, b: u64) -> Option<String> {
        let (ab, bb) = (int(a), int(b));
        let fast = self.fast(&ab, &bb);
        let naive = self.naive(&ab, &bb);
        (fast != naive).then(|| format!("S({a}, {b}): descent {fast}, summation {naive}"))
    }

    /// The identities at one random coprime pair. Returns the first violated.
    fn identities(&self, a: i64, b: u64) -> Option<String> {
        let (ab, bb) = (int(a), int(b));
        let s = self.fast(&ab, &bb);

        let shifted = self.fast(&(&ab + &bb), &bb);
        let shifted_far = self.fast(&(&ab - int(7) * &bb), &bb);
        if shifted != s || shifted_far != s {
            return Some(format!(
                "periodicity at ({a}, {b}): {s} vs {shifted}, {shifted_far}"
            ));
        }

        let neg = self.fast(&-&ab, &bb);
        if neg != -s.clone() {
            return Some(format!(
                "oddness at ({a}, {b}): S(-a,b) = {neg}, S(a,b) = {s}"
            ));
        }

        if !s.scale(&bb).is_integer() {
            return Some(format!("b*S not integral at ({a}, {b}): S = {s}"));
        }

        let den = denominator_of(&ab, &bb).expect("coprime arguments");
        if s.den() != &den {
            return Some(format!(
                "denominator at ({a}, {b}): S = {s}, expected denominator {den}"
            ));
        }

        let a0 = modulo(&ab, &bb);
        if !a0.is_zero() {
            let lhs = s.clone() + self.fast(&bb, &a0);
            let rhs = Fraction::new(a0.clone(), bb.clone())
                + Fraction::new(bb.clone(), a0.clone())
                + Fraction::new(BigInt::one(), &a0 * &bb)
                - Fraction::from_integer(int(3));
            if lhs != rhs {
                return Some(format!(
                    "reciprocity at ({a0}, {b}): S(a,b) + S(b,a) = {lhs}, expected {rhs}"
                ));
            }
        }

        let l_star = mod_inverse(&ab, &bb).expect("unit");
        if let Err(e) = rademacher_phi(&ab, &bb, &l_star) {
            return Some(format!("Phi at (l={a}, q={b}, l*={l_star}): {e}"));
        }
        let phi = Fraction::new(&ab + &l_star, bb.clone()) - s;
        if !phi.is_integer() {
            return Some(format!("Phi at (l={a}, q={b}, l*={l_star}) = {phi}"));
        }
        None
    }

    /// `q S(l, q) ≡ q + 1 - 2 (l/q) (mod 8)` for odd `q`.
    fn jacobi_congruence(&self, l: i64, q: u64) -> Option<String> {
        let (lb, qb) = (int(l), int(q));
        let numer = self.fast(&lb, &qb).scale(&qb);
        let numer = numer.to_integer().expect("q S(l, q) is an integer");
        let j = jacobi(&lb, &qb).expect("odd modulus");
        let expect = int(q as i64 + 1 - 2 * j as i64);
        (modulo(&(&numer - &expect), &int(8)) != BigInt::zero())
            .then(|| format!("mod-8 congruence at (l={l}, q={q}): q*S = {numer}, (l/q) = {j}"))
    }
}

/// Uniform coprime pair with `1 <= b <= b_max` and `a` in `[-3b, 3b]`.
fn random_pair(rng: &mut StdRng, b_max: u64) -> (i64, u64) {
    loop {
        let b = rng.gen_range(1..=b_max);
        let bound = 3 * b as i64;
        let a = rng.gen_range(-bound..=bound);
        if gcd_u64(a.unsigned_abs(), b) == 1 {
            return (a, b);
        }
    }
}

fn random_odd_pair(rng: &mut StdRng) -> (i64, u64) {
    loop {
        let q = 2 * rng.gen_range(1..=JACOBI_Q_MAX / 2) + 1;
        let l = rng.gen_range(-(q as i64)..=q as i64 * 2);
        if gcd_u64(l.unsigned_abs(), q) == 1 {
            return (l, q);
        }
    }
}

/// Runs `check` over `cases` in parallel and returns the failure with the
/// smallest `(b, |a|)`.
fn first_failure<F>(cases: &[(i64, u64)], check: F) -> Option<((i64, u64), String)>
where
    F: Fn(i64, u64) -> Option<String> + Sync,
{
    cases
        .par_iter()
        .filter_map(|&(a, b)| check(a, b).map(|msg| ((a, b), msg)))
        .min_by_key(|&((a, b), _)| (b, a.unsigned_abs(), a))
}

fn report_failure(phase: &str, msg: &str) -> u8 {
    println!("FAIL {phase}: {msg}");
    eprintln!("CRITICAL: {phase} failed: {msg}");
    EXIT_CRITICAL
}

pub fn cmd_oracle_test(max_b: u64, seed: u64, random: usize, inject_fault: bool) -> u8 {
    if max_b < 1 {
        eprintln!("error: --max-b must be at least 1");
        return EXIT_USAGE;
    }
    let oracle = Oracle {
        fault: inject_fault,
    };

    // Ascending b then a, so the first mismatch found is the minimal one.
    let cap = max_b.min(EXHAUSTIVE_CAP);
    let exhaustive = (1..=cap).into_par_iter().find_map_first(|b| {
        (0..b)
            .filter(|&a| gcd_u64(a, b) == 1)
            .find_map(|a| oracle.compare(a, b))
    });
    if let Some(msg) = exhaustive {
        return report_failure("exhaustive", &msg);
    }
    let pairs: u64 = (1..=cap)
        .map(|b| (0..b).filter(|&a| gcd_u64(a, b) == 1).count() as u64)
        .sum();
    println!("ok exhaustive: {pairs} pairs with b <= {cap}");

    let mut rng = StdRng::seed_from_u64(seed);
    let direct: Vec<(i64, u64)> = (0..random)
        .map(|_| random_pair(&mut rng, DIRECT_B_MAX))
        .collect();
    if let Some((_, msg)) = first_failure(&direct, |a, b| {
        oracle.compare(a.rem_euclid(b as i64) as u64, b)
    }) {
        return report_failure("direct", &msg);
    }
    println!("ok direct: {random} random pairs with b <= {DIRECT_B_MAX}");

    let sample: Vec<(i64, u64)> = (0..random)
        .map(|_| random_pair(&mut rng, IDENTITY_B_MAX))
        .collect();
    if let Some((_, msg)) = first_failure(&sample, |a, b| oracle.identities(a, b)) {
        return report_failure("identities", &msg);
    }
    println!("ok identities: {random} random pairs with b <= {IDENTITY_B_MAX}");

    let odd: Vec<(i64, u64)> = (0..random).map(|_| random_odd_pair(&mut rng)).collect();
    if let Some((_, msg)) = first_failure(&odd, |l, q| oracle.jacobi_congruence(l, q)) {
        return report_failure("jacobi", &msg);
    }
    println!("ok jacobi: {random} random pairs with odd q <= {JACOBI_Q_MAX}");
    EXIT_OK
}
