use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact_arith::int;
use crate::girstmair::GammaSet;

/// Which witness family a search enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// All coprime pairs `(x, y)` with `t = x² + y²`.
    Full,
    /// The one-parameter pairs `(x + rq, xrq - 1)`.
    Single { r: u64 },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Full => write!(f, "full"),
            Family::Single { r } => write!(f, "single({r})"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "full" {
            return Ok(Family::Full);
        }
        s.strip_prefix("single(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|r| r.parse().ok())
            .filter(|&r| r >= 1)
            .map(|r| Family::Single { r })
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

/// Position of `x` in the sequence `0, 1, -1, 2, -2, ...`.
pub fn signed_order(x: i64) -> u64 {
    if x > 0 {
        2 * x as u64 - 1
    } else {
        2 * x.unsigned_abs()
    }
}

/// The `x`-th term of `0, 1, -1, 2, -2, ...` (inverse of [`signed_order`]).
pub fn signed_at(k: u64) -> i64 {
    if k % 2 == 1 {
        k.div_ceil(2) as i64
    } else {
        -((k / 2) as i64)
    }
}

/// A concrete `(x, y)` at which `h(x, y)` takes `residue`.
///
/// For the full family a negative `y` marks the sign-symmetric witness
/// derived from `(x, |y|)`. For `Single { r }` the pair is stored as the
/// arguments actually passed to `h`, `(x + rq, xrq - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Witness {
    pub x: i64,
    pub y: i64,
    pub family: Family,
    pub residue: u64,
}

impl Witness {
    /// Sort key in the family's canonical enumeration order.
    pub fn canonical_key(&self, q: u64) -> (u64, i64, bool) {
        match self.family {
            Family::Full => (self.x as u64 + self.y.unsigned_abs(), self.x, self.y < 0),
            Family::Single { r } => {
                let base = self.x - (r * q) as i64;
                (signed_order(base), 0, false)
            }
        }
    }

    /// How far into the enumeration this witness sits: `x + |y|` for the
    /// full family, `|x|` of the underlying parameter for single families.
    pub fn depth(&self, q: u64) -> u64 {
        match self.family {
            Family::Full => self.x as u64 + self.y.unsigned_abs(),
            Family::Single { r } => (self.x - (r * q) as i64).unsigned_abs(),
        }
    }
}

/// Which members of `Γ_q` have been attained, and by what.
#[derive(Clone, Debug)]
pub struct CoverageTracker {
    gamma: GammaSet,
    attained: FixedBitSet,
    witnesses: BTreeMap<usize, Witness>,
    covered: u64,
}

impl CoverageTracker {
    pub fn new(gamma: GammaSet) -> Self {
        CoverageTracker {
            gamma,
            attained: FixedBitSet::with_capacity(gamma.size() as usize),
            witnesses: BTreeMap::new(),
            covered: 0,
        }
    }

    pub fn gamma(&self) -> &GammaSet {
        &self.gamma
    }

    pub fn covered(&self) -> u64 {
        self.covered
    }

    pub fn total(&self) -> u64 {
        self.gamma.size()
    }

    pub fn is_complete(&self) -> bool {
        self.covered == self.total()
    }

    /// Marks `residue` as attained. Returns whether it was new.
    ///
    /// A residue outside `Γ_q` is a critical error. When a residue already has
    /// a witness, the one earlier in canonical order is kept.
    pub fn record(&mut self, residue: u64, w: Witness) -> Result<bool> {
        let Some(idx) = self.gamma.index_of(residue) else {
            return Err(Error::NotInGamma {
                q: int(self.gamma.q),
                residue: BigInt::from(residue),
                d: int(self.gamma.d),
            });
        };
        let q = self.gamma.q;
        if self.attained.put(idx) {
            let held = self
                .witnesses
                .get_mut(&idx)
                .expect("attained has a witness");
            if w.canonical_key(q) < held.canonical_key(q) {
                *held = w;
            }
            return Ok(false);
        }
        self.witnesses.insert(idx, w);
        self.covered += 1;
        Ok(true)
    }

    /// Union with another tracker over the same `Γ_q`.
    pub fn merge(&mut self, other: CoverageTracker) {
        assert_eq!(self.gamma, other.gamma, "merging trackers for different q");
        for (_, w) in other.witnesses {
            self.record(w.residue, w)
                .expect("residue came from a tracker");
        }
    }

    pub fn witness(&self, residue: u64) -> Option<&Witness> {
        self.gamma
            .index_of(residue)
            .and_then(|idx| self.witnesses.get(&idx))
    }

    /// Witnesses in ascending residue order.
    pub fn witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.values()
    }

    pub fn missing(&self) -> impl Iterator<Item = u64> + '_ {
        self.attained
            .zeroes()
            .map(move |idx| self.gamma.residue_at(idx))
    }
}
