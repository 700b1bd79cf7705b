use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Precondition, Result};
use crate::exact_arith::{crt, factorize_u64, gcd_u64, int, is_square_u64};
use crate::girstmair::{f, gamma_set};

/// Least `r` with `r ≢ 0` and `r² + 1 ≢ 0 (mod p)`.
fn least_safe_residue(p: u64) -> u64 {
    (1..p)
        .find(|r| (r * r + 1) % p != 0)
        .expect("an odd prime leaves a residue that avoids 0 and the roots of -1")
}

/// The `g` for which [`construct_seed`] supports `q`, if any: 2 for even `q`,
/// 3 for odd squares divisible by 3, 5 for odd squares divisible by 5 but
/// not 3.
pub fn progression_gcd(q: u64) -> Option<u64> {
    if q % 2 == 0 {
        return Some(2);
    }
    if !is_square_u64(q) {
        return None;
    }
    if q % 3 == 0 {
        Some(3)
    } else if q % 5 == 0 {
        Some(5)
    } else {
        None
    }
}

/// An `a > 0` with `gcd(a, q) = g` and `gcd(a² + 1, q) = 1`, built by CRT.
///
/// Supported shapes: `g = 2` with `q` even, `g = 3` with `q` an odd square
/// divisible by 3, `g = 5` with `q` an odd square divisible by 5 but not 3.
/// The anchor congruence is `a ≡ g (mod g²)`; every other prime `p | q` gets
/// the least residue that is neither `0` nor a square root of `-1`.
pub fn construct_seed(q: u64, g: u64) -> Result<u64> {
    let odd_square = q % 2 == 1 && is_square_u64(q);
    let ok = match g {
        2 => q % 2 == 0,
        3 => odd_square && q % 3 == 0,
        5 => odd_square && q % 5 == 0 && q % 3 != 0,
        _ => false,
    };
    if !ok {
        return Err(Error::PreconditionFailed(Precondition::SeedShape { q, g }));
    }
    let mut congruences: Vec<(BigInt, BigInt)> = vec![(int(g), int(g * g))];
    for (p, _) in factorize_u64(q) {
        if p != g {
            congruences.push((int(least_safe_residue(p)), int(p)));
        }
    }
    let (a, _) = crt(&congruences)?;
    let a = a.to_u64().expect("CRT modulus is at most g^2 * q");
    if gcd_u64(a, q) != g || gcd_u64((a as u128 * a as u128 % q as u128) as u64 + 1, q) != 1 {
        return Err(Error::Identity(format!(
            "seed {a} for q={q}, g={g} has the wrong gcds"
        )));
    }
    Ok(a)
}

/// Whether the progression `f(a + mq) = f(a) + mq(g² - 1)` sweeps all of
/// `Γ_q` mod `q² - 1`, where `g = gcd(a, q)`.
///
/// Since `f(a)` already lies in `Γ_q`, this holds exactly when the step
/// subgroup generated by `gcd(q(g² - 1), q² - 1)` contains `Γ_q`. The linear
/// law itself is re-checked by direct evaluation for `m` in `-2..=2`.
pub fn verify_arithmetic_progression_coverage(q: u64, a: i64) -> Result<bool> {
    let (qb, ab) = (int(q), int(a));
    let base = f(&ab, &qb)?;
    let g = gcd_u64(a.unsigned_abs(), q);
    let slope = int(g * g - 1);
    for m in -2i64..=2 {
        let shifted = &ab + int(m) * &qb;
        let value = f(&shifted, &qb)?;
        let expect = &base + int(m) * &qb * &slope;
        if value != expect {
            return Err(Error::Identity(format!(
                "f({shifted}) = {value}, expected f({a}) + {m}q(g^2-1) = {expect} for q={q}"
            )));
        }
    }
    let gamma = gamma_set(q);
    let step = gcd_u64((q * (g * g - 1)) % gamma.modulus, gamma.modulus);
    Ok(gamma.d % step == 0)
}
