//! Dedekind sums: a direct-summation oracle and a Euclidean descent.
//!
//! The descent works on integer numerators. For coprime `0 <= r' < r`, write
//! `N(r', r) = r * S(r', r)`, which is an integer. Reciprocity together with
//! periodicity gives, along the remainder sequence `r_0 = b, r_1 = a mod b,
//! r_{i+2} = r_i mod r_{i+1}`,
//!
//! ```text
//! N_i = (r_i^2 + r_{i+1}^2 + 1 - r_i * N_{i+1}) / r_{i+1} - 3 r_i
//! ```
//!
//! with `N_i = N(r_{i+1}, r_i)` and `N = 0` once the modulus reaches 1. The
//! division is exact at every level, so no rational arithmetic is needed and
//! the intermediate values stay below `r_i * r_{i+1}^2`.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{gcd, int, modulo, sawtooth, Fraction};

/// `S(a, b) = k / q` in lowest terms, `q > 0`. Zero is `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedSum {
    pub k: BigInt,
    pub q: BigInt,
}

impl ReducedSum {
    pub fn value(&self) -> Fraction {
        Fraction::new(self.k.clone(), self.q.clone())
    }
}

fn check_args(a: &BigInt, b: &BigInt) -> Result<()> {
    if b < &BigInt::one() {
        return Err(Error::InvalidModulus(b.clone()));
    }
    if !gcd(a, b).is_one() {
        return Err(Error::NotCoprime {
            a: a.clone(),
            b: b.clone(),
        });
    }
    Ok(())
}

/// `s(a, b)` by summing the definition term by term. `O(b)`.
///
/// Each sawtooth value `((m/b))` for `b ∤ m` is `(2(m mod b) - b) / (2b)`, so
/// the sum is accumulated as an integer over the common denominator `4b^2`.
pub fn dedekind_naive(a: &BigInt, b: &BigInt) -> Result<Fraction> {
    check_args(a, b)?;
    if let (Some(a), Some(b)) = (a.to_i64(), b.to_i64()) {
        if b < (1 << 40) {
            let (a, b) = (a as i128, b as i128);
            let mut acc: i128 = 0;
            for k in 1..b {
                let ak = (a * k).rem_euclid(b);
                if ak == 0 {
                    continue;
                }
                acc += (2 * k - b) * (2 * ak - b);
            }
            return Ok(Fraction::new(int(acc), int(4 * b * b)));
        }
    }
    let mut acc = BigInt::zero();
    let mut k = BigInt::one();
    while &k < b {
        let ak = modulo(&(a * &k), b);
        if !ak.is_zero() {
            acc += (2 * &k - b) * (2 * ak - b);
        }
        k += 1;
    }
    Ok(Fraction::new(acc, 4 * b * b))
}

/// `s(a, b)` straight from the sawtooth, with rational arithmetic throughout.
/// Slow; kept as the most literal reading of the definition.
pub fn dedekind_by_sawtooth(a: &BigInt, b: &BigInt) -> Result<Fraction> {
    check_args(a, b)?;
    let mut acc = Fraction::zero();
    let mut k = BigInt::one();
    while &k <= b {
        let x = sawtooth(&Fraction::new(k.clone(), b.clone()));
        let y = sawtooth(&Fraction::new(a * &k, b.clone()));
        acc = acc + x * y;
        k += 1;
    }
    Ok(acc)
}

/// `b * S(a, b)` as an exact integer, by Euclidean descent.
pub fn normalized_numerator(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    check_args(a, b)?;
    if let (Some(ai), Some(bi)) = (a.to_i128(), b.to_i128()) {
        if let Some(n) = normalized_numerator_i128(ai, bi) {
            return Ok(int(n));
        }
    }
    Ok(numerator_descent_big(a, b))
}

fn numerator_descent_big(a: &BigInt, b: &BigInt) -> BigInt {
    let mut rems = vec![b.clone(), modulo(a, b)];
    while !rems[rems.len() - 1].is_zero() {
        let n = rems.len();
        let next = &rems[n - 2] % &rems[n - 1];
        rems.push(next);
    }
    // rems = [r_0, ..., r_n = 1, 0]
    let levels = rems.len() - 2;
    let mut numer = BigInt::zero();
    for i in (0..levels).rev() {
        let (ri, rn) = (&rems[i], &rems[i + 1]);
        let top = ri * ri + rn * rn + 1u32 - ri * &numer;
        let (quot, rem) = top.div_rem(rn);
        debug_assert!(rem.is_zero());
        numer = quot - 3 * ri;
    }
    numer
}

/// Machine-word version of [`normalized_numerator`] for coprime `a`, `b >= 1`.
///
/// Returns `None` if any intermediate overflows `i128`; callers fall back to
/// the big-integer descent. Coprimality is the caller's responsibility.
pub fn normalized_numerator_i128(a: i128, b: i128) -> Option<i128> {
    debug_assert!(b >= 1);
    // Fibonacci growth bounds the remainder chain well below this for i128.
    let mut rems = [0i128; 192];
    rems[0] = b;
    rems[1] = a.rem_euclid(b);
    let mut len = 2;
    while rems[len - 1] != 0 {
        rems[len] = rems[len - 2] % rems[len - 1];
        len += 1;
    }
    let mut numer: i128 = 0;
    for i in (0..len - 2).rev() {
        let (ri, rn) = (rems[i], rems[i + 1]);
        let top = ri
            .checked_mul(ri)?
            .checked_add(rn.checked_mul(rn)?)?
            .checked_add(1)?
            .checked_sub(ri.checked_mul(numer)?)?;
        numer = (top / rn).checked_sub(ri.checked_mul(3)?)?;
    }
    Some(numer)
}

/// `s(a, b)` by Euclidean descent; equal to [`dedekind_naive`].
pub fn dedekind_fast(a: &BigInt, b: &BigInt) -> Result<Fraction> {
    let numer = normalized_numerator(a, b)?;
    Ok(Fraction::new(numer, 12 * b))
}

/// The normalized sum `S(a, b) = 12 s(a, b)`.
pub fn normalized(a: &BigInt, b: &BigInt) -> Result<Fraction> {
    let numer = normalized_numerator(a, b)?;
    Ok(Fraction::new(numer, b.clone()))
}

/// `S(a, b)` as `(k, q)` in lowest terms.
pub fn reduced_form(a: &BigInt, b: &BigInt) -> Result<ReducedSum> {
    let s = normalized(a, b)?;
    Ok(ReducedSum {
        k: s.num().clone(),
        q: s.den().clone(),
    })
}

/// Rademacher's `Φ = (l + l*)/q - S(l, q)` for the unimodular matrix
/// `[[l*, c], [q, l]]`. Always an integer.
pub fn rademacher_phi(l: &BigInt, q: &BigInt, l_star: &BigInt) -> Result<BigInt> {
    check_args(l, q)?;
    if !modulo(&(l * l_star), q).is_one() && !q.is_one() {
        return Err(Error::BadInverse {
            l: l.clone(),
            l_star: l_star.clone(),
            q: q.clone(),
        });
    }
    let s = normalized(l, q)?;
    let phi = Fraction::new(l + l_star, q.clone()) - s;
    phi.to_integer()
        .ok_or_else(|| Error::Integrality(format!("Phi({l}, {q}, {l_star}) = {phi}")))
}
