//! Exact coefficient arithmetic and sparse multivariate polynomials.
//!
//! Three coefficient rings are supported: arbitrary-precision integers,
//! exact rationals, and prime fields `F_p` with a `u64` modulus. All
//! arithmetic is exact; there are no floating-point coefficients anywhere.
//!
//! The workhorse type is [`SparsePoly`], a map from exponent vectors to
//! nonzero coefficients, with truncated products and direct coefficient
//! extraction under a power of `(x_1 + ... + x_n)`.

pub mod factorial;
mod poly;
pub mod primes;
pub mod serial;

pub use poly::{sum_of_vars, vandermonde_power, ExponentCap, Monomial, SparsePoly};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use primes::{is_prime, mul_mod, pow_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operation requires ring {expected}, got {got}")]
    WrongRing { expected: &'static str, got: RingTag },
    #[error("point length {0} does not match arity {1}")]
    PointLength(usize, usize),
}

/// The coefficient ring a polynomial lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingTag {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl RingTag {
    /// Constructs the `F_p` tag, rejecting composite moduli.
    pub fn prime_field(p: u64) -> Result<Self, PolyError> {
        if is_prime(p) {
            Ok(RingTag::PrimeField(p))
        } else {
            Err(PolyError::NotPrime(p))
        }
    }

    /// Validates the tag invariant (prime modulus).
    pub fn validate(&self) -> Result<(), PolyError> {
        match self {
            RingTag::PrimeField(p) if !is_prime(*p) => Err(PolyError::NotPrime(*p)),
            _ => Ok(()),
        }
    }

    pub fn zero(&self) -> Coefficient {
        match self {
            RingTag::Integers => Coefficient::Int(BigInt::zero()),
            RingTag::Rationals => Coefficient::Rat(BigRational::zero()),
            RingTag::PrimeField(p) => Coefficient::Mod { value: 0, p: *p },
        }
    }

    pub fn one(&self) -> Coefficient {
        match self {
            RingTag::Integers => Coefficient::Int(BigInt::one()),
            RingTag::Rationals => Coefficient::Rat(BigRational::one()),
            RingTag::PrimeField(p) => Coefficient::Mod { value: 1 % p, p: *p },
        }
    }

    /// Embeds an integer into the ring (reducing mod `p` for prime fields).
    pub fn from_bigint(&self, v: &BigInt) -> Coefficient {
        match self {
            RingTag::Integers => Coefficient::Int(v.clone()),
            RingTag::Rationals => Coefficient::Rat(BigRational::from(v.clone())),
            RingTag::PrimeField(p) => Coefficient::Mod {
                value: reduce_bigint(v, *p),
                p: *p,
            },
        }
    }

    pub fn from_i64(&self, v: i64) -> Coefficient {
        self.from_bigint(&BigInt::from(v))
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingTag::Integers => write!(f, "Z"),
            RingTag::Rationals => write!(f, "Q"),
            RingTag::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// Canonical residue of `v` mod `p`, mapped into `[0, p)`.
pub fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = v.mod_floor(&m);
    let (_, digits) = r.to_u64_digits();
    match digits.as_slice() {
        [] => 0,
        [d] => *d,
        _ => unreachable!("residue exceeds u64"),
    }
}

/// An exact ring element: unbounded integer, reduced fraction, or residue.
///
/// Prime-field values carry their modulus so that elements are
/// self-contained; all values are kept canonical (residues in `[0, p)`,
/// rationals in lowest terms with positive denominator — `BigRational`
/// maintains that form itself).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Int(BigInt),
    Rat(BigRational),
    Mod { value: u64, p: u64 },
}

impl Coefficient {
    pub fn ring(&self) -> RingTag {
        match self {
            Coefficient::Int(_) => RingTag::Integers,
            Coefficient::Rat(_) => RingTag::Rationals,
            Coefficient::Mod { p, .. } => RingTag::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Int(v) => v.is_zero(),
            Coefficient::Rat(v) => v.is_zero(),
            Coefficient::Mod { value, .. } => *value == 0,
        }
    }

    /// Ring addition. Panics on mixed rings; polynomial operations check
    /// ring equality before descending to coefficients.
    pub(crate) fn add(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Int(a), Coefficient::Int(b)) => Coefficient::Int(a + b),
            (Coefficient::Rat(a), Coefficient::Rat(b)) => Coefficient::Rat(a + b),
            (Coefficient::Mod { value: a, p }, Coefficient::Mod { value: b, p: q }) => {
                assert_eq!(p, q, "mixed moduli");
                Coefficient::Mod { value: (a + b) % p, p: *p }
            }
            _ => panic!("mixed rings: {} vs {}", self.ring(), other.ring()),
        }
    }

    pub(crate) fn mul(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Int(a), Coefficient::Int(b)) => Coefficient::Int(a * b),
            (Coefficient::Rat(a), Coefficient::Rat(b)) => Coefficient::Rat(a * b),
            (Coefficient::Mod { value: a, p }, Coefficient::Mod { value: b, p: q }) => {
                assert_eq!(p, q, "mixed moduli");
                Coefficient::Mod { value: mul_mod(*a, *b, *p), p: *p }
            }
            _ => panic!("mixed rings: {} vs {}", self.ring(), other.ring()),
        }
    }

    pub(crate) fn neg(&self) -> Coefficient {
        match self {
            Coefficient::Int(a) => Coefficient::Int(-a),
            Coefficient::Rat(a) => Coefficient::Rat(-a),
            Coefficient::Mod { value, p } => Coefficient::Mod {
                value: if *value == 0 { 0 } else { p - value },
                p: *p,
            },
        }
    }

    /// `self^e` within the ring.
    pub fn pow(&self, e: u32) -> Coefficient {
        match self {
            Coefficient::Int(a) => Coefficient::Int(a.pow(e)),
            Coefficient::Rat(a) => Coefficient::Rat(a.pow(e as i32)),
            Coefficient::Mod { value, p } => Coefficient::Mod {
                value: pow_mod(*value, e as u64, *p),
                p: *p,
            },
        }
    }

    /// Scales by an integer, embedding it into the ring first.
    pub fn mul_int(&self, scalar: &BigInt) -> Coefficient {
        self.mul(&self.ring().from_bigint(scalar))
    }

    /// The residue of a prime-field element.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Coefficient::Mod { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// Views the value as an exact rational (residues are lifted to their
    /// canonical integer representative).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Coefficient::Int(v) => BigRational::from(v.clone()),
            Coefficient::Rat(v) => v.clone(),
            Coefficient::Mod { value, .. } => BigRational::from(BigInt::from(*value)),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Int(v) => write!(f, "{v}"),
            Coefficient::Rat(v) => {
                if v.denom().is_one() {
                    write!(f, "{}", v.numer())
                } else {
                    write!(f, "{}/{}", v.numer(), v.denom())
                }
            }
            Coefficient::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Parses a coefficient in the canonical string form: a decimal integer,
/// `num/den` fraction, or residue, according to `ring`.
pub fn parse_coefficient(s: &str, ring: &RingTag) -> Result<Coefficient, String> {
    let parse_int = |t: &str| -> Result<BigInt, String> {
        t.parse::<BigInt>().map_err(|e| format!("bad integer {t:?}: {e}"))
    };
    match ring {
        RingTag::Rationals => {
            if let Some((n, d)) = s.split_once('/') {
                let n = parse_int(n.trim())?;
                let d = parse_int(d.trim())?;
                if d.is_zero() {
                    return Err("zero denominator".into());
                }
                Ok(Coefficient::Rat(BigRational::new(n, d)))
            } else {
                Ok(Coefficient::Rat(BigRational::from(parse_int(s.trim())?)))
            }
        }
        _ => {
            let v = parse_int(s.trim())?;
            if matches!(ring, RingTag::Integers) {
                Ok(Coefficient::Int(v))
            } else {
                Ok(ring.from_bigint(&v))
            }
        }
    }
}

/// Exact sign-aware display helper used by reports: rationals print as
/// `num/den` only when the denominator is not 1.
pub fn rational_to_string(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// True when the rational is an integer divisible by `p`.
pub fn rational_divisible_by(v: &BigRational, p: u64) -> Option<bool> {
    if !v.denom().is_one() {
        return None;
    }
    Some(v.numer().abs().mod_floor(&BigInt::from(p)).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_tag_rejects_composite() {
        assert!(RingTag::prime_field(7).is_ok());
        assert_eq!(RingTag::prime_field(6), Err(PolyError::NotPrime(6)));
        assert_eq!(RingTag::prime_field(1), Err(PolyError::NotPrime(1)));
    }

    #[test]
    fn residues_are_canonical() {
        let f5 = RingTag::PrimeField(5);
        assert_eq!(f5.from_i64(-1).residue(), Some(4));
        assert_eq!(f5.from_i64(12).residue(), Some(2));
        let three = f5.from_i64(3);
        let four = f5.from_i64(4);
        assert_eq!(three.add(&four).residue(), Some(2));
        assert_eq!(three.neg().residue(), Some(2));
    }

    #[test]
    fn rational_lowest_terms() {
        let q = RingTag::Rationals;
        let half = match q.from_i64(2) {
            Coefficient::Rat(v) => Coefficient::Rat(v / BigRational::from(BigInt::from(4))),
            _ => unreachable!(),
        };
        assert_eq!(half.to_string(), "1/2");
        assert_eq!(parse_coefficient("-6/4", &q).unwrap().to_string(), "-3/2");
    }

    #[test]
    fn display_forms() {
        assert_eq!(RingTag::Integers.from_i64(-7).to_string(), "-7");
        assert_eq!(RingTag::PrimeField(5).from_i64(-7).to_string(), "3");
        assert_eq!(
            parse_coefficient("5", &RingTag::Rationals).unwrap().to_string(),
            "5"
        );
    }
}
