//! The Combinatorial Nullstellensatz engine: witness finding, the
//! coefficient-based sumset lower-bound certificate, restriction-polynomial
//! construction, and the closed-form key coefficient `h` with its
//! divisibility test.
//!
//! The certificate lemma: for nonempty `A_i` with `|A_i| = k_i` and a
//! nonzero polynomial `P` with `deg P <= sum (k_i - 1)`, if the coefficient
//! of `x_1^(k_1-1) ... x_n^(k_n-1)` in `P * (x_1 + ... + x_n)^D` with
//! `D = sum (k_i - 1) - deg P` does not vanish, then the sums `a_1 + ... +
//! a_n` over tuples where `P` does not vanish take at least `D + 1`
//! distinct values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::morris::MorrisParams;
use crate::polyring::factorial::factorial;
use crate::polyring::primes::is_prime;
use crate::polyring::{
    rational_to_string, Coefficient, Monomial, PolyError, RingTag, SparsePoly,
};
use crate::sumsets::{Condition, Restriction, SumsetInstance, TheoremId};

#[derive(Debug, Error)]
pub enum CnError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("set {index} has {size} elements but the hypothesis needs more than {degree}")]
    SetTooSmall { index: usize, size: usize, degree: u32 },
    #[error("the coefficient of the target monomial is zero")]
    ZeroTargetCoefficient,
    #[error("total degree {got} does not equal the target degree sum {expected}")]
    DegreeMismatch { expected: u64, got: u64 },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("deg P = {got} exceeds sum(|A_i| - 1) = {cap}")]
    DegreeTooLarge { got: u64, cap: u64 },
    #[error("cannot extend a {have}-element set to {want} residues mod {p}")]
    ExtensionOverflow { have: usize, want: usize, p: u64 },
    #[error("merged difference set for pair ({i},{j}) has {size} elements, above the target {target}")]
    MergedSetTooLarge { i: u32, j: u32, size: usize, target: usize },
    #[error("condition B requires m >= 1 for the difference-set target 2m - 1")]
    ConditionBNeedsM,
    #[error("closed form requires n*b >= {0}")]
    InsufficientBudget(u64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The ground sets `A_1, ..., A_n` inside `F_p`: each a sorted list of
/// distinct residues, all nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSets {
    p: u64,
    sets: Vec<Vec<u64>>,
}

impl GridSets {
    pub fn new(p: u64, sets: Vec<Vec<u64>>) -> Result<Self, CnError> {
        if !is_prime(p) {
            return Err(CnError::NotPrime(p));
        }
        assert!(!sets.is_empty(), "need at least one set");
        let mut sorted = Vec::with_capacity(sets.len());
        for (index, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            assert!(
                !set.is_empty() && *set.last().unwrap() < p,
                "set {index} must be nonempty residues mod {p}"
            );
            sorted.push(set);
        }
        Ok(GridSets { p, sets: sorted })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn arity(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.sets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }
}

/// A certified lower bound: the target degrees `k_i - 1`, the nonzero
/// extracted coefficient, and the bound `sum (k_i - 1) - deg P + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CNCertificate {
    pub target_degrees: Vec<u32>,
    pub coefficient: Coefficient,
    pub bound: i64,
}

impl CNCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "target_degrees": self.target_degrees,
            "coefficient": self.coefficient.to_string(),
            "bound": self.bound,
        })
    }
}

/// Exhaustive witness search for the Combinatorial Nullstellensatz: given
/// `|A_i| > k_i`, a nonzero coefficient at `x^k`, and `deg f = sum k_i`,
/// some point of `prod A_i` has `f != 0`. The search runs in lexicographic
/// order over the sorted sets, so the returned witness is the smallest one.
///
/// Precondition violations are reported as errors; exhaustion under valid
/// preconditions would contradict the theorem and aborts the process.
pub fn cn_witness(
    f: &SparsePoly,
    sets: &GridSets,
    k: &[u32],
) -> Result<Vec<u64>, CnError> {
    let arity = sets.arity();
    if f.arity() != arity || k.len() != arity {
        return Err(PolyError::ArityMismatch(f.arity(), arity).into());
    }
    for (index, set) in sets.sets().iter().enumerate() {
        if set.len() <= k[index] as usize {
            return Err(CnError::SetTooSmall {
                index: index + 1,
                size: set.len(),
                degree: k[index],
            });
        }
    }
    let target = Monomial(k.to_vec());
    if f.coeff(&target)?.is_zero() {
        return Err(CnError::ZeroTargetCoefficient);
    }
    let expected: u64 = k.iter().map(|&e| e as u64).sum();
    let got = f.total_degree().unwrap_or(0);
    if got != expected {
        return Err(CnError::DegreeMismatch { expected, got });
    }

    let mut idx = vec![0usize; arity];
    let mut point = vec![0u64; arity];
    'outer: loop {
        for (v, (&i, set)) in point.iter_mut().zip(idx.iter().zip(sets.sets())) {
            *v = set[i];
        }
        if !f.eval_fp(&point)?.is_zero() {
            return Ok(point);
        }
        for pos in (0..arity).rev() {
            idx[pos] += 1;
            if idx[pos] < sets.sets()[pos].len() {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    unreachable!(
        "Combinatorial Nullstellensatz invariant breach: no witness in the grid \
         despite valid preconditions"
    );
}

/// The coefficient-based lower-bound certificate. Returns `None` when the
/// key coefficient vanishes mod `p` (no conclusion), and an error when
/// `deg P` exceeds `sum (|A_i| - 1)`.
pub fn anr_lower_bound(
    poly: &SparsePoly,
    sets: &GridSets,
) -> Result<Option<CNCertificate>, CnError> {
    let arity = sets.arity();
    if poly.arity() != arity {
        return Err(PolyError::ArityMismatch(poly.arity(), arity).into());
    }
    let Some(deg) = poly.total_degree() else {
        return Err(CnError::ZeroPolynomial);
    };
    let sizes = sets.sizes();
    let cap: u64 = sizes.iter().map(|&s| s as u64 - 1).sum();
    if deg > cap {
        return Err(CnError::DegreeTooLarge { got: deg, cap });
    }
    let power = u32::try_from(cap - deg).expect("extraction power exceeds u32");
    let target = Monomial(sizes.iter().map(|&s| s as u32 - 1).collect());
    let c = poly.extract_with_power(power, &target)?;
    if c.is_zero() {
        return Ok(None);
    }
    Ok(Some(CNCertificate {
        target_degrees: target.0,
        coefficient: c,
        bound: (cap - deg) as i64 + 1,
    }))
}

/// Deterministic extension of `s` to exactly `size` residues mod `p`: the
/// smallest residues not already present are added, output sorted.
pub fn extend_sij(s: &[u64], size: usize, p: u64) -> Result<Vec<u64>, CnError> {
    if size > p as usize || s.len() > size {
        return Err(CnError::ExtensionOverflow { have: s.len(), want: size, p });
    }
    let mut out: Vec<u64> = s.to_vec();
    out.sort_unstable();
    out.dedup();
    let mut candidate = 0u64;
    while out.len() < size {
        if !out.contains(&candidate) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out.sort_unstable();
    Ok(out)
}

/// Builds the restriction polynomial of an instance over `F_p`:
///
/// `form * prod_{i<j} prod_{c in S*_ij} (x_i - x_j - c)`
///
/// where each merged difference set is extended to exactly `2m` residues
/// (Condition A) or `2m - 1` (Condition B), and `form` is the constant 1,
/// a linear form, a diagonal quadratic, or a bilinear form per the
/// instance's restriction. The factor `(x_i - x_j - c)` vanishes exactly
/// on the forbidden difference `a_i - a_j = c`, so the support of the
/// polynomial is a subset of the admissible tuples and any certificate
/// bound carries over to the restricted sumset. A merged set larger than
/// the target cardinality means the instance is inconsistent with its
/// condition and is rejected.
pub fn build_restriction_poly(inst: &SumsetInstance) -> Result<SparsePoly, CnError> {
    let p = inst.p;
    let ring = RingTag::prime_field(p).map_err(|_| CnError::NotPrime(p))?;
    let n = inst.n as usize;
    let target = match inst.condition {
        Condition::A => 2 * inst.m as usize,
        Condition::B => {
            if inst.m == 0 && inst.n >= 2 {
                return Err(CnError::ConditionBNeedsM);
            }
            (2 * inst.m as usize).saturating_sub(1)
        }
    };

    let mut poly = restriction_form_poly(&inst.restriction, n, ring);
    for i in 1..=inst.n {
        for j in (i + 1)..=inst.n {
            let merged = inst.s_for(i, j);
            if merged.len() > target {
                return Err(CnError::MergedSetTooLarge {
                    i,
                    j,
                    size: merged.len(),
                    target,
                });
            }
            let extended = extend_sij(merged, target, p)?;
            for c in extended {
                let mut factor = SparsePoly::variable(n, ring, i as usize - 1)
                    .sub(&SparsePoly::variable(n, ring, j as usize - 1))
                    .expect("same arity");
                factor = factor
                    .sub(&SparsePoly::constant(n, ring.from_bigint(&BigInt::from(c)), ring))
                    .expect("same arity");
                poly = poly.mul(&factor)?;
            }
        }
    }
    Ok(poly)
}

fn restriction_form_poly(r: &Restriction, arity: usize, ring: RingTag) -> SparsePoly {
    match r {
        Restriction::None => SparsePoly::one(arity, ring),
        Restriction::Linear { t, alpha } => {
            let mut acc = SparsePoly::zero(arity, ring);
            for (&i, &a) in t.iter().zip(alpha) {
                let term = SparsePoly::variable(arity, ring, i as usize - 1)
                    .scale_int(&BigInt::from(a));
                acc = acc.add(&term).expect("same arity");
            }
            acc
        }
        Restriction::DiagonalQuadratic { t, alpha } => {
            let mut acc = SparsePoly::zero(arity, ring);
            for (&i, &a) in t.iter().zip(alpha) {
                let x = SparsePoly::variable(arity, ring, i as usize - 1);
                let term = x.mul(&x).expect("same arity").scale_int(&BigInt::from(a));
                acc = acc.add(&term).expect("same arity");
            }
            acc
        }
        Restriction::Bilinear { alpha, .. } => {
            let mut acc = SparsePoly::zero(arity, ring);
            for pc in alpha {
                let xi = SparsePoly::variable(arity, ring, pc.i as usize - 1);
                let xj = SparsePoly::variable(arity, ring, pc.j as usize - 1);
                let term = xi.mul(&xj).expect("same arity").scale_int(&BigInt::from(pc.a));
                acc = acc.add(&term).expect("same arity");
            }
            acc
        }
    }
}

/// The closed-form key coefficient of a theorem's proof polynomial, exact.
///
/// For the staircase (Condition B) variants the stated per-index closed
/// form carries a `1/n!` factor and is not always an integer; the value is
/// therefore kept as an exact rational with the integrality made explicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormH {
    pub value: BigRational,
}

impl ClosedFormH {
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.value.denom().is_one() {
            Some(self.value.numer().clone())
        } else {
            None
        }
    }

    /// `h mod p` when `h` is an integer.
    pub fn residue_mod(&self, p: u64) -> Option<u64> {
        self.as_integer()
            .map(|h| crate::polyring::reduce_bigint(&h, p))
    }

    /// Whether `p` divides `h`; `None` when `h` is not an integer.
    pub fn divisible_by(&self, p: u64) -> Option<bool> {
        self.residue_mod(p).map(|r| r == 0)
    }
}

impl std::fmt::Display for ClosedFormH {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&rational_to_string(&self.value))
    }
}

/// Closed-form `h` for a theorem's key coefficient, with the scalar form
/// sum factored in. Over Condition A:
///
/// - no form:      `sign * (nb)! * delta`
/// - linear:       `form_sum * sign * b (nb-1)! * delta`
/// - diagonal:     `form_sum * sign * b (b - m(n-1) - 1) (nb-2)! * delta`
/// - bilinear:     `form_sum * sign * b (b + m) (nb-2)! * delta`
///
/// with `sign = (-1)^(m C(n,2))`; the Condition B variants divide by `n!`.
pub fn theorem_h(
    theorem: TheoremId,
    params: &MorrisParams,
    form_sum: &BigInt,
) -> Result<ClosedFormH, CnError> {
    let MorrisParams { n, m, b } = *params;
    let nb = params.nb();
    let min_nb = match theorem {
        TheoremId::T1_3 | TheoremId::T1_4 => 0,
        TheoremId::T1_5 | TheoremId::T1_5p => 1,
        _ => 2,
    };
    if nb < min_nb {
        return Err(CnError::InsufficientBudget(min_nb));
    }
    let b_int = BigInt::from(b);
    let base = match theorem {
        TheoremId::T1_3 | TheoremId::T1_4 => factorial(nb),
        TheoremId::T1_5 | TheoremId::T1_5p => b_int * factorial(nb - 1),
        TheoremId::T1_6 | TheoremId::T1_6p => {
            let second = BigInt::from(b as i64 - m as i64 * (n as i64 - 1) - 1);
            b_int * second * factorial(nb - 2)
        }
        TheoremId::T1_7 | TheoremId::T1_7p => {
            b_int * BigInt::from(b as u64 + m as u64) * factorial(nb - 2)
        }
    };
    let mut value = BigRational::from(form_sum * params.sign() * base)
        * crate::morris::delta(params).value;
    if theorem.condition() == Condition::B {
        value /= BigRational::from(factorial(n as u64));
    }
    Ok(ClosedFormH { value })
}

/// `p` divides `h` (false for non-integral closed forms is reported as
/// `None` by [`ClosedFormH::divisible_by`]; this helper unwraps the common
/// integral case).
pub fn p_divides_h(h: &ClosedFormH, p: u64) -> Option<bool> {
    h.divisible_by(p)
}
