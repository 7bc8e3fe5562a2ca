//! Exact values in the extended nonnegative rationals `[0, inf]`.
//!
//! Every limit, adherence and compactness measure in this crate takes values
//! in the complete lattice `[0, inf]`. Theorem checks compare such values for
//! exact equality, so the representation is an exact rational (always in
//! lowest terms) together with a distinguished top element `inf`.
//!
//! Lattice conventions used throughout:
//! - the join (supremum) of the empty collection is `0`,
//! - the meet (infimum) of the empty collection is `inf`,
//! - addition is commutative and monotone, and `inf` absorbs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num::integer::gcd;
use num::rational::Ratio;

use crate::error::{Error, Result};

/// An exact value in `[0, inf]`: a nonnegative rational in lowest terms, or `inf`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtReal {
    Finite(Ratio<u64>),
    Infinity,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(Ratio::new_raw(0, 1));
    pub const INFINITY: ExtReal = ExtReal::Infinity;

    pub fn int(n: u64) -> ExtReal {
        ExtReal::Finite(Ratio::new_raw(n, 1))
    }

    /// Exact `p/q`. Fails on a zero denominator.
    pub fn rational(p: u64, q: u64) -> Result<ExtReal> {
        if q == 0 {
            return Err(Error::ZeroDenominator(format!("{p}/{q}")));
        }
        Ok(ExtReal::Finite(Ratio::new(p, q)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtReal::Finite(r) if *r.numer() == 0)
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Supremum of a finite collection; the empty join is `0`.
    pub fn join_all<I: IntoIterator<Item = ExtReal>>(values: I) -> ExtReal {
        values.into_iter().fold(ExtReal::ZERO, ExtReal::max)
    }

    /// Infimum of a finite collection; the empty meet is `inf`.
    pub fn meet_all<I: IntoIterator<Item = ExtReal>>(values: I) -> ExtReal {
        values.into_iter().fold(ExtReal::Infinity, ExtReal::min)
    }
}

/// Exact addition of reduced nonnegative rationals through 128-bit
/// intermediates, so `u64`-range operands never overflow silently.
fn add_ratio(a: Ratio<u64>, b: Ratio<u64>) -> Ratio<u64> {
    let (an, ad) = (*a.numer() as u128, *a.denom() as u128);
    let (bn, bd) = (*b.numer() as u128, *b.denom() as u128);
    let g = gcd(ad, bd);
    let lcm = ad / g * bd;
    let num = an * (lcm / ad) + bn * (lcm / bd);
    let g2 = gcd(num, lcm);
    let (num, den) = (num / g2, lcm / g2);
    assert!(
        num <= u64::MAX as u128 && den <= u64::MAX as u128,
        "exact rational overflow beyond the 64-bit range"
    );
    Ratio::new_raw(num as u64, den as u64)
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(add_ratio(a, b)),
            _ => ExtReal::Infinity,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Infinity, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Infinity => write!(f, "inf"),
            ExtReal::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            ExtReal::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    /// Accepts `inf` (or the symbol `∞`), an integer `p`, or a fraction `p/q`.
    fn from_str(s: &str) -> Result<ExtReal> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(ExtReal::Infinity);
        }
        let bad = || Error::InvalidValue(s.to_string());
        match s.split_once('/') {
            None => Ok(ExtReal::int(s.parse::<u64>().map_err(|_| bad())?)),
            Some((p, q)) => {
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                let q: u64 = q.trim().parse().map_err(|_| bad())?;
                ExtReal::rational(p, q)
            }
        }
    }
}

impl From<u64> for ExtReal {
    fn from(n: u64) -> Self {
        ExtReal::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ext(s: &str) -> ExtReal {
        s.parse().unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(ext("1/2") + ext("1/3"), ext("5/6"));
        assert_eq!(ext("3") + ExtReal::Infinity, ExtReal::Infinity);
        assert_eq!(ExtReal::ZERO + ExtReal::ZERO, ExtReal::ZERO);
    }

    #[test]
    fn join_examples() {
        assert_eq!(
            ExtReal::join_all([ext("1/2"), ext("2"), ExtReal::Infinity]),
            ExtReal::Infinity
        );
        assert_eq!(ExtReal::join_all([]), ExtReal::ZERO);
        assert_eq!(ExtReal::join_all([ext("0"), ext("3/4")]), ext("3/4"));
    }

    #[test]
    fn meet_examples() {
        assert_eq!(ExtReal::meet_all([ext("1/2"), ext("2")]), ext("1/2"));
        assert_eq!(ExtReal::meet_all([]), ExtReal::Infinity);
        assert_eq!(
            ExtReal::meet_all([ExtReal::Infinity, ExtReal::Infinity]),
            ExtReal::Infinity
        );
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(ext("7/14"), ext("1/2"));
        assert_eq!(ext("1/2").to_string(), "1/2");
        assert_eq!(ext("4/2").to_string(), "2");
        assert_eq!(ExtReal::Infinity.to_string(), "inf");
        assert!("1/0".parse::<ExtReal>().is_err());
        assert!("-1".parse::<ExtReal>().is_err());
        assert!("x".parse::<ExtReal>().is_err());
    }

    fn arb_ext() -> impl Strategy<Value = ExtReal> {
        prop_oneof![
            5 => (0u64..200, 1u64..30).prop_map(|(p, q)| ExtReal::rational(p, q).unwrap()),
            1 => Just(ExtReal::Infinity),
        ]
    }

    proptest! {
        #[test]
        fn add_commutative_associative(a in arb_ext(), b in arb_ext(), c in arb_ext()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b) + c, a + (b + c));
        }

        #[test]
        fn add_monotone(a in arb_ext(), b in arb_ext(), c in arb_ext()) {
            if a <= b {
                prop_assert!(a + c <= b + c);
                prop_assert!(c + a <= c + b);
            }
        }

        #[test]
        fn lattice_laws(a in arb_ext(), b in arb_ext(), c in arb_ext()) {
            prop_assert_eq!(a.max(a), a);
            prop_assert_eq!(a.min(a), a);
            prop_assert_eq!(a.max(b), b.max(a));
            prop_assert_eq!(a.min(b), b.min(a));
            prop_assert_eq!(a.max(b).max(c), a.max(b.max(c)));
            prop_assert_eq!(a.min(b).min(c), a.min(b.min(c)));
            // absorption ties the two operations to the order
            prop_assert_eq!(a.max(a.min(b)), a);
            prop_assert_eq!(a.min(a.max(b)), a);
        }

        /// For finite `alpha` and a collection with zero infimum,
        /// shifting every element by `alpha` shifts the infimum to `alpha`.
        #[test]
        fn shift_of_zero_meet(
            values in proptest::collection::vec(arb_ext(), 1..8),
            alpha in (0u64..100, 1u64..20).prop_map(|(p, q)| ExtReal::rational(p, q).unwrap()),
        ) {
            let mut values = values;
            values.push(ExtReal::ZERO); // force a zero infimum
            prop_assume!(ExtReal::meet_all(values.iter().copied()).is_zero());
            let shifted = ExtReal::meet_all(values.iter().map(|v| *v + alpha));
            prop_assert_eq!(shifted, alpha);
        }

        #[test]
        fn parse_display_roundtrip(a in arb_ext()) {
            prop_assert_eq!(a.to_string().parse::<ExtReal>().unwrap(), a);
        }
    }
}
