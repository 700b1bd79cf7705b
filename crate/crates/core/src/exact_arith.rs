//! Exact integer and rational primitives.
//!
//! Integers are [`BigInt`] throughout the public API. A handful of `u64` /
//! `i128` helpers exist for the search hot loops; they are tested against the
//! big-integer versions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type Integer = BigInt;

/// Shorthand for building a [`BigInt`] from a machine integer.
pub fn int<T: Into<BigInt>>(v: T) -> BigInt {
    v.into()
}

/// Floor remainder in `[0, m)` for `m > 0`.
pub fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Greatest common divisor, always nonnegative; `gcd(0, 0) = 0`.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// Extended Euclid: returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut u0, mut u1) = (BigInt::one(), BigInt::zero());
    let (mut v0, mut v1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let quot = r0.div_floor(&r1);
        let r2 = &r0 - &quot * &r1;
        let u2 = &u0 - &quot * &u1;
        let v2 = &v0 - &quot * &v1;
        r0 = std::mem::replace(&mut r1, r2);
        u0 = std::mem::replace(&mut u1, u2);
        v0 = std::mem::replace(&mut v1, v2);
    }
    if r0.is_negative() {
        (-r0, -u0, -v0)
    } else {
        (r0, u0, v0)
    }
}

/// The inverse of `a` modulo `m` in `[0, m)`. `mod_inverse(_, 1) = 0`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    if m < &BigInt::one() {
        return Err(Error::InvalidModulus(m.clone()));
    }
    let (g, u, _) = ext_gcd(&a.mod_floor(m), m);
    if !g.is_one() {
        return Err(Error::NotInvertible {
            a: a.clone(),
            m: m.clone(),
        });
    }
    Ok(u.mod_floor(m))
}

/// Chinese remainder theorem for pairwise coprime moduli.
///
/// Returns `(r, M)` with `M` the product of the moduli and `r` the unique
/// solution in `[0, M)`.
pub fn crt(residues: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt)> {
    for (i, (_, mi)) in residues.iter().enumerate() {
        if mi < &BigInt::one() {
            return Err(Error::InvalidModulus(mi.clone()));
        }
        for (_, mj) in &residues[i + 1..] {
            if !gcd(mi, mj).is_one() {
                return Err(Error::ModuliNotCoprime {
                    m1: mi.clone(),
                    m2: mj.clone(),
                });
            }
        }
    }
    let mut r = BigInt::zero();
    let mut big_m = BigInt::one();
    for (ri, mi) in residues {
        // r + big_m * k ≡ ri (mod mi)
        let inv = mod_inverse(&big_m, mi)?;
        let k = ((ri - &r) * inv).mod_floor(mi);
        r += &big_m * k;
        big_m *= mi;
        r = r.mod_floor(&big_m);
    }
    Ok((r, big_m))
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i8> {
    if n < &BigInt::one() || n.is_even() {
        return Err(Error::InvalidModulus(n.clone()));
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1i8;
    let three = int(3);
    let five = int(5);
    let eight = int(8);
    let four = int(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    Ok(if n.is_one() { sign } else { 0 })
}

/// Prime factorization by trial division, as `(p, e)` pairs in ascending `p`.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    if let Some(small) = n.to_u64() {
        return factorize_u64(small)
            .into_iter()
            .map(|(p, e)| (int(p), e))
            .collect();
    }
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = int(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// Euler's totient via factorization. Requires `n >= 1`.
pub fn totient(n: &BigInt) -> BigInt {
    assert!(n >= &BigInt::one(), "totient requires n >= 1");
    factorize(n)
        .into_iter()
        .fold(n.clone(), |acc, (p, _)| acc / &p * (&p - 1))
}

/// Exact perfect-square test for `n >= 0` (negative input is never a square).
pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// The sawtooth `((x))`: `{x} - 1/2` off the integers, `0` on them.
pub fn sawtooth(x: &Fraction) -> Fraction {
    if x.is_integer() {
        return Fraction::zero();
    }
    x.fract() - Fraction::new(int(1), int(2))
}

// ---------------------------------------------------------------------------
// Machine-word helpers for the hot paths.

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

/// Inverse of `a` modulo `m >= 1` in `[0, m)`, or `None` when not a unit.
pub fn mod_inverse_i128(a: i128, m: i128) -> Option<i128> {
    debug_assert!(m >= 1);
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut u0, mut u1) = (1i128, 0i128);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (u0, u1) = (u1, u0 - quot * u1);
    }
    (r0 == 1).then(|| u0.rem_euclid(m))
}

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub fn is_square_u64(n: u64) -> bool {
    let r = isqrt_u64(n);
    r * r == n
}

pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient_u64(n: u64) -> u64 {
    factorize_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

// ---------------------------------------------------------------------------

/// Exact rational number, always stored reduced with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fraction(BigRational);

impl Fraction {
    /// Panics if `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        Fraction(BigRational::new(num, den))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Fraction(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Fraction(BigRational::zero())
    }

    pub fn num(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn den(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The integer value, if the fraction is integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.num().clone())
    }

    pub fn floor(&self) -> BigInt {
        self.num().div_floor(self.den())
    }

    /// Fractional part `{x} = x - floor(x)`, in `[0, 1)`.
    pub fn fract(&self) -> Fraction {
        Fraction::new(self.num().mod_floor(self.den()), self.den().clone())
    }

    pub fn scale(&self, k: &BigInt) -> Fraction {
        Fraction(&self.0 * BigRational::from_integer(k.clone()))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl Add for Fraction {
    type Output = Fraction;
    fn add(self, rhs: Fraction) -> Fraction {
        Fraction(self.0 + rhs.0)
    }
}

impl Add<&Fraction> for &Fraction {
    type Output = Fraction;
    fn add(self, rhs: &Fraction) -> Fraction {
        Fraction(&self.0 + &rhs.0)
    }
}

impl Sub for Fraction {
    type Output = Fraction;
    fn sub(self, rhs: Fraction) -> Fraction {
        Fraction(self.0 - rhs.0)
    }
}

impl Sub<&Fraction> for &Fraction {
    type Output = Fraction;
    fn sub(self, rhs: &Fraction) -> Fraction {
        Fraction(&self.0 - &rhs.0)
    }
}

impl Mul for Fraction {
    type Output = Fraction;
    fn mul(self, rhs: Fraction) -> Fraction {
        Fraction(self.0 * rhs.0)
    }
}

impl Mul<&Fraction> for &Fraction {
    type Output = Fraction;
    fn mul(self, rhs: &Fraction) -> Fraction {
        Fraction(&self.0 * &rhs.0)
    }
}

impl Neg for Fraction {
    type Output = Fraction;
    fn neg(self) -> Fraction {
        Fraction(-self.0)
    }
}
