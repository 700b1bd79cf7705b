//! The `q`-indexed apparatus: admissible numerators, the target set `Γ_q`,
//! the numerator split `q S(a', b') = λ(a, t, t*) + Δ(a t* + j)`, the
//! one-parameter family `f(a)` with its piecewise-linear decomposition, and
//! the two-parameter family `h(x, y)`.
//!
//! Every function here re-checks the integrality and congruence facts it
//! relies on. A failure comes back as a critical [`Error`], never a value.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dedekind_core::{normalized, normalized_numerator, normalized_numerator_i128};
use crate::error::{Error, Precondition, Result};
use crate::exact_arith::{
    gcd, gcd_i128, gcd_u64, int, is_perfect_square, is_square_u64, mod_inverse, mod_inverse_i128,
    modulo, totient_u64, Fraction,
};

fn pre(p: Precondition) -> Error {
    Error::PreconditionFailed(p)
}

/// `Γ_q ⊆ Z/(q²-1)`: the multiples of `stride` (24 for square `q`, else 12).
///
/// As a subgroup of a cyclic group it is exactly the multiples of
/// `d = gcd(stride, q²-1)`, which is how membership is tested. `q` must stay
/// below `2^32` so that `q²-1` fits a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GammaSet {
    pub q: u64,
    pub modulus: u64,
    pub stride: u64,
    pub d: u64,
}

impl GammaSet {
    pub fn size(&self) -> u64 {
        self.modulus / self.d
    }

    pub fn contains(&self, residue: u64) -> bool {
        residue < self.modulus && residue % self.d == 0
    }

    /// Position of a member in ascending order.
    pub fn index_of(&self, residue: u64) -> Option<usize> {
        self.contains(residue).then(|| (residue / self.d) as usize)
    }

    pub fn residue_at(&self, index: usize) -> u64 {
        index as u64 * self.d
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size()).map(move |i| i * self.d)
    }

    /// `v mod (q²-1)` in `[0, q²-1)`.
    pub fn reduce(&self, v: &BigInt) -> u64 {
        modulo(v, &int(self.modulus))
            .to_u64()
            .expect("residue below a u64 modulus")
    }
}

/// Builds `Γ_q`. Panics for `q < 2` or `q >= 2^32`.
pub fn gamma_set(q: u64) -> GammaSet {
    assert!(q >= 2, "gamma_set requires q >= 2");
    assert!(q < 1 << 32, "gamma_set requires q < 2^32");
    let modulus = q * q - 1;
    let stride = if is_square_u64(q) { 24 } else { 12 };
    GammaSet {
        q,
        modulus,
        stride,
        d: gcd_u64(stride, modulus),
    }
}

/// The 2-part of the index of `Γ_q`, as tabulated case by case.
pub fn c2(q: u64) -> u64 {
    if q % 2 == 0 {
        1
    } else if is_square_u64(q) {
        8
    } else {
        4
    }
}

/// The 3-part of the index of `Γ_q`.
pub fn c3(q: u64) -> u64 {
    if q % 3 == 0 {
        1
    } else {
        3
    }
}

/// Number of admissible numerator classes mod `q(q²-1)`: `|Γ_q| · φ(q)`.
pub fn predicted_class_count(q: u64) -> u64 {
    gamma_set(q).size() * totient_u64(q)
}

fn gamma_divisor(q: &BigInt) -> BigInt {
    let stride = if is_perfect_square(q) {
        int(24)
    } else {
        int(12)
    };
    gcd(&stride, &(q * q - 1u32))
}

/// Reduces `value` mod `q²-1` and checks it lies in `Γ_q`.
fn gamma_residue(value: &BigInt, q: &BigInt) -> Result<BigInt> {
    let modulus = q * q - 1u32;
    let residue = modulo(value, &modulus);
    let d = gamma_divisor(q);
    if !(&residue % &d).is_zero() {
        return Err(Error::NotInGamma {
            q: q.clone(),
            residue,
            d,
        });
    }
    Ok(residue)
}

fn exact_div(num: BigInt, den: &BigInt, what: impl FnOnce() -> String) -> Result<BigInt> {
    let (quot, rem) = num.div_rem(den);
    if !rem.is_zero() {
        return Err(Error::Integrality(what()));
    }
    Ok(quot)
}

fn check_q(q: &BigInt) -> Result<()> {
    if q < &int(2) {
        return Err(pre(Precondition::QTooSmall));
    }
    Ok(())
}

/// Reduced denominator of `S(a, b)`: `b / gcd(b, a²+1)`.
pub fn denominator_of(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if b < &BigInt::one() {
        return Err(Error::InvalidModulus(b.clone()));
    }
    if !gcd(a, b).is_one() {
        return Err(Error::NotCoprime {
            a: a.clone(),
            b: b.clone(),
        });
    }
    Ok(b / gcd(b, &(a * a + 1u32)))
}

/// `b = q(a²+1)/t`, the modulus whose sums `S(a, b)` have reduced
/// denominator `q`.
pub fn admissible_b(a: &BigInt, q: &BigInt, t: &BigInt) -> Result<BigInt> {
    if !t.is_positive() {
        return Err(pre(Precondition::TNotPositive));
    }
    let norm = a * a + 1u32;
    if !(&norm % t).is_zero() {
        return Err(pre(Precondition::TNotDividingASquaredPlusOne));
    }
    if !gcd(t, q).is_one() {
        return Err(pre(Precondition::TNotCoprimeToQ));
    }
    Ok(q * norm / t)
}

/// The necessary local conditions on a numerator `k` over denominator `q`.
pub fn is_admissible_numerator(k: &BigInt, q: &BigInt) -> bool {
    if !gcd(k, q).is_one() {
        return false;
    }
    let m = |n: u32| modulo(k, &int(n)).to_u32().unwrap();
    if !(q % 3u32).is_zero() && m(3) != 0 {
        return false;
    }
    if q.is_odd() {
        if modulo(q, &int(4)) == int(3) {
            return m(4) == 2;
        }
        if is_perfect_square(q) {
            return m(8) == 0;
        }
        return m(4) == 0;
    }
    true
}

/// `Δ(l) = (q²-1) l + q S(l, q)`.
pub fn delta(l: &BigInt, q: &BigInt) -> Result<BigInt> {
    check_q(q)?;
    // q S(l, q) is exactly the descent numerator.
    let numer = normalized_numerator(l, q)?;
    Ok((q * q - 1u32) * l + numer)
}

/// Arguments of `λ`, validated against its domain on use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaInput {
    pub a: BigInt,
    pub t: BigInt,
    pub t_star: BigInt,
    pub q: BigInt,
}

impl LambdaInput {
    pub fn new(a: BigInt, t: BigInt, t_star: BigInt, q: BigInt) -> Self {
        LambdaInput { a, t, t_star, q }
    }

    pub fn validate(&self) -> Result<()> {
        check_q(&self.q)?;
        if !self.t.is_positive() {
            return Err(pre(Precondition::TNotPositive));
        }
        if !((&self.a * &self.a + 1u32) % &self.t).is_zero() {
            return Err(pre(Precondition::TNotDividingASquaredPlusOne));
        }
        if !gcd(&(&self.a * &self.q), &self.t).is_one() {
            return Err(pre(Precondition::AqNotCoprimeToT));
        }
        if !modulo(&(&self.t * &self.t_star), &self.q).is_one() {
            return Err(pre(Precondition::TStarNotInverse));
        }
        Ok(())
    }
}

/// `λ(a, t, t*) = (q²-1)a/t - (q²-1) a t* - q S(aq, t)`, an integer that is
/// `0 mod q` and lies in `Γ_q` mod `q²-1`.
pub fn lambda(inp: &LambdaInput) -> Result<BigInt> {
    inp.validate()?;
    let LambdaInput { a, t, t_star, q } = inp;
    let m = q * q - 1u32;
    let numer_t = normalized_numerator(&(a * q), t)?; // t S(aq, t)
    let head = exact_div(&m * a - q * numer_t, t, || {
        format!("lambda({a}, {t}, {t_star}; q={q})")
    })?;
    let value = head - &m * a * t_star;
    if !(&value % q).is_zero() {
        return Err(Error::Identity(format!(
            "lambda({a}, {t}, {t_star}; q={q}) = {value} is not 0 mod q"
        )));
    }
    gamma_residue(&value, q)?;
    Ok(value)
}

/// One instance of the numerator split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub lam: BigInt,
    pub del: BigInt,
    pub numerator: BigInt,
    pub a_prime: BigInt,
    pub b_prime: BigInt,
}

/// Evaluates `q S(a', b')` directly for `a' = a + tj`, `b' = q(a'²+1)/t`, and
/// checks it against `λ(a, t, t*) + Δ(a t* + j)`.
pub fn split_check(
    a: &BigInt,
    t: &BigInt,
    t_star: &BigInt,
    j: &BigInt,
    q: &BigInt,
) -> Result<Split> {
    let inp = LambdaInput::new(a.clone(), t.clone(), t_star.clone(), q.clone());
    inp.validate()?;
    let a_prime = a + t * j;
    if !gcd(&a_prime, q).is_one() {
        return Err(pre(Precondition::ShiftedANotCoprimeToQ));
    }
    let b_prime = admissible_b(&a_prime, q, t)?;
    let s = normalized(&a_prime, &b_prime)?;
    if s.den() != q {
        return Err(Error::Identity(format!(
            "S({a_prime}, {b_prime}) = {s} does not have denominator {q}"
        )));
    }
    let numerator = s.num().clone();
    let lam = lambda(&inp)?;
    let del = delta(&(a * t_star + j), q)?;
    if numerator != &lam + &del {
        return Err(Error::Identity(format!(
            "q S({a_prime}, {b_prime}) = {numerator} but lambda + Delta = {lam} + {del}"
        )));
    }
    Ok(Split {
        lam,
        del,
        numerator,
        a_prime,
        b_prime,
    })
}

fn check_f_domain(a: &BigInt, q: &BigInt) -> Result<()> {
    check_q(q)?;
    if !gcd(q, &(a * a + 1u32)).is_one() {
        return Err(pre(Precondition::QNotCoprimeToASquaredPlusOne));
    }
    Ok(())
}

/// `f(a) = (q²-1)a/(a²+1) - q S(aq, a²+1)`, i.e. `λ` with `t = a²+1`
/// (without the `t*` term, which vanishes mod `q²-1`).
pub fn f(a: &BigInt, q: &BigInt) -> Result<BigInt> {
    check_f_domain(a, q)?;
    let t = a * a + 1u32;
    let numer_t = normalized_numerator(&(a * q), &t)?;
    let value = exact_div((q * q - 1u32) * a - q * numer_t, &t, || {
        format!("f({a}; q={q})")
    })?;
    gamma_residue(&value, q)?;
    Ok(value)
}

/// `f(a) = (g²-1) a + q [S(a₁, q₁) + S(-a₁g² - a₁*, q₁)]` with `g = gcd(a, q)`,
/// `a = g a₁`, `q = g q₁`.
///
/// The factor `q` on the periodic part is what reciprocity and the
/// three-term relation actually produce; without it the identity fails as
/// soon as `q₁ > 1` and the sum is nonzero (e.g. `a = 2, q = 3`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FDecomposition {
    pub g: BigInt,
    pub a1: BigInt,
    pub q1: BigInt,
    pub a1_star: BigInt,
    pub slope: BigInt,
    pub periodic: Fraction,
}

impl FDecomposition {
    /// `slope * a + periodic`.
    pub fn evaluate(&self, a: &BigInt) -> Fraction {
        Fraction::from_integer(&self.slope * a) + self.periodic.clone()
    }
}

pub fn f_decompose(a: &BigInt, q: &BigInt) -> Result<FDecomposition> {
    check_f_domain(a, q)?;
    let g = gcd(a, q);
    let a1 = a / &g;
    let q1 = q / &g;
    let a1_star = mod_inverse(&a1, &q1)?;
    let g2 = &g * &g;
    let periodic = (normalized(&a1, &q1)? + normalized(&(-&a1 * &g2 - &a1_star), &q1)?).scale(q);
    let dec = FDecomposition {
        slope: g2 - 1u32,
        g,
        a1,
        q1,
        a1_star,
        periodic,
    };
    let direct = f(a, q)?;
    let via = dec.evaluate(a);
    if via != Fraction::from_integer(direct.clone()) {
        return Err(Error::Identity(format!(
            "f({a}; q={q}) = {direct} but the decomposition gives {via}"
        )));
    }
    Ok(dec)
}

fn check_h_domain(x: &BigInt, y: &BigInt, q: &BigInt) -> Result<BigInt> {
    check_q(q)?;
    if x.is_zero() && y.is_zero() {
        return Err(pre(Precondition::ZeroPair));
    }
    if !gcd(x, y).is_one() {
        return Err(pre(Precondition::XyNotCoprime));
    }
    let t = x * x + y * y;
    if !gcd(&t, q).is_one() {
        return Err(pre(Precondition::NormNotCoprimeToQ));
    }
    Ok(t)
}

/// `h(x, y)`: `λ` with `t = x²+y²` and `a = x y*`, reduced mod `q²-1`.
///
/// `y*` is the inverse of `y` mod `t` taken in `[0, t)`; the residue does not
/// depend on that choice.
pub fn h(x: &BigInt, y: &BigInt, q: &BigInt) -> Result<BigInt> {
    let t = check_h_domain(x, y, q)?;
    let y_star = mod_inverse(y, &t)?;
    h_with_inverse(x, &y_star, &t, q)
}

/// `h` evaluated with a caller-chosen inverse `y*` of `y` mod `t`.
pub fn h_with_inverse(x: &BigInt, y_star: &BigInt, t: &BigInt, q: &BigInt) -> Result<BigInt> {
    let a = x * y_star;
    let numer_t = normalized_numerator(&(&a * q), t)?;
    let value = exact_div((q * q - 1u32) * &a - q * numer_t, t, || {
        format!("h(x={x}, y*={y_star}; t={t}, q={q})")
    })?;
    gamma_residue(&value, q)
}

/// Machine-word `h` for the search loops. Same contract as [`h`], with the
/// residue returned as a `u64`. Requires `q < 2^32`.
pub fn h_fast(x: i64, y: i64, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(pre(Precondition::QTooSmall));
    }
    if x == 0 && y == 0 {
        return Err(pre(Precondition::ZeroPair));
    }
    let (x, y, qi) = (x as i128, y as i128, q as i128);
    if gcd_i128(x, y) != 1 {
        return Err(pre(Precondition::XyNotCoprime));
    }
    let t = x * x + y * y;
    if gcd_i128(t, qi) != 1 {
        return Err(pre(Precondition::NormNotCoprimeToQ));
    }
    let y_star = mod_inverse_i128(y, t).expect("y is a unit mod x^2+y^2");
    // a may be reduced mod t: that shifts the value by a multiple of q²-1.
    let a = (x.rem_euclid(t) * y_star) % t;
    let modulus = qi * qi - 1;
    let aq = (a * qi) % t;
    let numer_t = match normalized_numerator_i128(aq, t) {
        Some(n) => n,
        None => {
            let value = h_with_inverse(&int(x), &int(y_star), &int(t), &int(q))?;
            return Ok(value.to_u64().unwrap());
        }
    };
    let top = modulus * a - qi * numer_t;
    if top % t != 0 {
        return Err(Error::Integrality(format!(
            "h(x={x}, y={y}; q={q}) numerator {top} over {t}"
        )));
    }
    let residue = (top / t).rem_euclid(modulus) as u64;
    let gamma = gamma_set(q);
    if !gamma.contains(residue) {
        return Err(Error::NotInGamma {
            q: int(q),
            residue: int(residue),
            d: int(gamma.d),
        });
    }
    Ok(residue)
}
