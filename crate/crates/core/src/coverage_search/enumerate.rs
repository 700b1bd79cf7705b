use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::dedekind_core::normalized_numerator_i128;
use crate::error::{Error, Result};
use crate::exact_arith::{gcd_u64, int};
use crate::girstmair::is_admissible_numerator;

/// Residues mod `q(q² - 1)` of the numerators `k = q S(a, b)` over all coprime
/// `0 <= a < b <= b_max` whose sum has reduced denominator exactly `q`.
///
/// Only multiples `b = qm` can qualify, and for those the denominator is `q`
/// iff `m | a² + 1` and `gcd(q, (a² + 1)/m) = 1`. Every numerator found is
/// checked against the admissibility conditions; a failure is critical.
pub fn enumerate_numerators(q: u64, b_max: u64) -> Result<BTreeSet<u64>> {
    assert!(q >= 2, "enumerate_numerators requires q >= 2");
    let modulus = q * (q * q - 1);
    let hits = (1..=b_max / q)
        .into_par_iter()
        .try_fold(
            || FixedBitSet::with_capacity(modulus as usize),
            |mut seen, m| {
                scan_modulus(q, m, modulus, &mut seen)?;
                Ok::<_, Error>(seen)
            },
        )
        .try_reduce(
            || FixedBitSet::with_capacity(modulus as usize),
            |mut a, b| {
                a.union_with(&b);
                Ok(a)
            },
        )?;
    Ok(hits.ones().map(|r| r as u64).collect())
}

fn scan_modulus(q: u64, m: u64, modulus: u64, seen: &mut FixedBitSet) -> Result<()> {
    let b = q * m;
    for a in 0..b {
        let norm = a as u128 * a as u128 + 1;
        if norm % m as u128 != 0 {
            continue;
        }
        let cofactor = ((norm / m as u128) % q as u128) as u64;
        if gcd_u64(cofactor, q) != 1 || gcd_u64(a, b) != 1 {
            continue;
        }
        // b S(a, b) = m * (q S(a, b))
        let big = normalized_numerator_i128(a as i128, b as i128)
            .expect("b * S(a, b) fits i128 for enumerable b");
        if big % m as i128 != 0 {
            return Err(Error::Integrality(format!(
                "q S({a}, {b}) with q = {q}: {big} / {m}"
            )));
        }
        let k = big / m as i128;
        if !is_admissible_numerator(&int(k), &int(q)) {
            return Err(Error::Identity(format!(
                "S({a}, {b}) = {k}/{q} violates the admissibility conditions"
            )));
        }
        let residue = k.rem_euclid(modulus as i128).to_usize().unwrap();
        seen.insert(residue);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dedekind_core::reduced_form;

    /// Straight scan with the big-integer reduced form.
    fn brute(q: u64, b_max: u64) -> BTreeSet<u64> {
        let modulus = int(q * (q * q - 1));
        let mut out = BTreeSet::new();
        for b in 1..=b_max {
            for a in 0..b {
                if gcd_u64(a, b) != 1 {
                    continue;
                }
                let r = reduced_form(&int(a), &int(b)).unwrap();
                if r.q == int(q) {
                    let k = crate::exact_arith::modulo(&r.k, &modulus);
                    out.insert(k.to_u64().unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_numerators(2, 10).unwrap(), BTreeSet::from([3]));
        let three = enumerate_numerators(3, 100).unwrap();
        assert!(three.is_subset(&BTreeSet::from([2, 10, 14, 22])));
        let five = enumerate_numerators(5, 10).unwrap();
        assert!(five
            .iter()
            .all(|&k| is_admissible_numerator(&int(k), &int(5))));
    }

    #[test]
    fn matches_brute_scan() {
        for q in 2..=7 {
            assert_eq!(
                enumerate_numerators(q, 300).unwrap(),
                brute(q, 300),
                "q={q}"
            );
        }
    }

    #[test]
    fn monotone_in_b_max() {
        let small = enumerate_numerators(5, 200).unwrap();
        let large = enumerate_numerators(5, 800).unwrap();
        assert!(small.is_subset(&large));
    }
}
