//! Morris-type coefficient identities: closed-form right-hand sides,
//! polynomial-expansion left-hand sides, and exact equality checking.
//!
//! Each identity equates a coefficient of
//! `prefactor * (x_1 + ... + x_n)^N * prod_{i<j} (x_i - x_j)^e`
//! with a closed form built from factorials and the Morris constant
//! [`delta`]. The unshifted family uses the even Vandermonde power
//! `e = 2m` and the symmetric target `(b + m(n-1), ..., b + m(n-1))`;
//! the shifted family uses `e = 2m - 1` and the staircase target
//! `(b + m(n-1) - n + l)` for `l = 1..n`.
//!
//! The shifted family is index-sensitive: its per-index closed form does
//! not match the expansion for every prefactor index, while the sum over
//! all indices does. Reports therefore record per-index values and the
//! symmetrized sum separately, and inequality never aborts a run.

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::polyring::factorial::factorial;
use crate::polyring::{
    rational_to_string, vandermonde_power, Coefficient, ExponentCap, Monomial, PolyError, RingTag,
    SparsePoly,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorrisError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid index: {0}")]
    BadIndex(String),
    #[error("factor polynomial is not symmetric in its variables")]
    NotSymmetric,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Grid point for the identity family: `n` variables, Vandermonde
/// half-exponent `m`, power-sum budget `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorrisParams {
    pub n: u32,
    pub m: u32,
    pub b: u32,
}

impl MorrisParams {
    pub fn new(n: u32, m: u32, b: u32) -> Self {
        assert!(n >= 1, "n must be positive");
        MorrisParams { n, m, b }
    }

    pub fn nb(&self) -> u64 {
        self.n as u64 * self.b as u64
    }

    /// `(-1)^(m * C(n,2))` as a BigInt.
    pub fn sign(&self) -> BigInt {
        let pairs = self.n as u64 * (self.n as u64 - 1) / 2;
        if (self.m as u64 * pairs) % 2 == 1 {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }
}

/// The identity selectors. The first four use the even Vandermonde power
/// and the symmetric target; the `Shifted*` three use the odd power and the
/// staircase target; `Lemma21Relation` is the antisymmetrization transform
/// checked by [`antisymmetrize_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityKind {
    Leading,
    SquareTerm,
    LinearTerm,
    CrossTerm,
    ShiftedLinear,
    ShiftedSquare,
    ShiftedCross,
    Lemma21Relation,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 7] = [
        IdentityKind::Leading,
        IdentityKind::SquareTerm,
        IdentityKind::LinearTerm,
        IdentityKind::CrossTerm,
        IdentityKind::ShiftedLinear,
        IdentityKind::ShiftedSquare,
        IdentityKind::ShiftedCross,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityKind::Leading => "leading",
            IdentityKind::SquareTerm => "square-term",
            IdentityKind::LinearTerm => "linear-term",
            IdentityKind::CrossTerm => "cross-term",
            IdentityKind::ShiftedLinear => "shifted-linear",
            IdentityKind::ShiftedSquare => "shifted-square",
            IdentityKind::ShiftedCross => "shifted-cross",
            IdentityKind::Lemma21Relation => "lemma21-relation",
        }
    }

    pub fn parse(s: &str) -> Option<IdentityKind> {
        match s {
            "leading" => Some(IdentityKind::Leading),
            "square-term" => Some(IdentityKind::SquareTerm),
            "linear-term" => Some(IdentityKind::LinearTerm),
            "cross-term" => Some(IdentityKind::CrossTerm),
            "shifted-linear" => Some(IdentityKind::ShiftedLinear),
            "shifted-square" => Some(IdentityKind::ShiftedSquare),
            "shifted-cross" => Some(IdentityKind::ShiftedCross),
            "lemma21-relation" => Some(IdentityKind::Lemma21Relation),
            _ => None,
        }
    }

    pub fn is_shifted(&self) -> bool {
        matches!(
            self,
            IdentityKind::ShiftedLinear | IdentityKind::ShiftedSquare | IdentityKind::ShiftedCross
        )
    }

    /// Minimum value of `n*b` for the closed form to be defined.
    pub fn min_nb(&self) -> u64 {
        match self {
            IdentityKind::Leading => 0,
            IdentityKind::LinearTerm | IdentityKind::ShiftedLinear => 1,
            IdentityKind::SquareTerm
            | IdentityKind::CrossTerm
            | IdentityKind::ShiftedSquare
            | IdentityKind::ShiftedCross => 2,
            IdentityKind::Lemma21Relation => 0,
        }
    }
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which prefactor index a left-hand side was evaluated at (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexChoice {
    None,
    R(u32),
    Pair(u32, u32),
}

impl IndexChoice {
    pub fn to_json(&self) -> Value {
        match self {
            IndexChoice::None => Value::Null,
            IndexChoice::R(r) => json!([r]),
            IndexChoice::Pair(i, j) => json!([i, j]),
        }
    }
}

impl fmt::Display for IndexChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexChoice::None => write!(f, "-"),
            IndexChoice::R(r) => write!(f, "r={r}"),
            IndexChoice::Pair(i, j) => write!(f, "(i,j)=({i},{j})"),
        }
    }
}

/// The Morris constant: `prod_{l=0}^{n-1} (m(l+1))! / ((b+ml)! m!)`,
/// rational in general.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaValue {
    pub value: BigRational,
}

impl DeltaValue {
    /// `(nb)! * delta`, which is an integer for every valid parameter
    /// triple; returns `None` if that integrality ever failed.
    pub fn times_factorial(&self, nb: u64) -> Option<BigInt> {
        let scaled = &self.value * BigRational::from(factorial(nb));
        if scaled.denom().is_one() {
            Some(scaled.numer().clone())
        } else {
            None
        }
    }
}

/// Exact evaluation of the Morris constant.
pub fn delta(params: &MorrisParams) -> DeltaValue {
    let MorrisParams { n, m, b } = *params;
    let mut value = BigRational::one();
    for l in 0..n as u64 {
        let numer = factorial(m as u64 * (l + 1));
        let denom = factorial(b as u64 + m as u64 * l) * factorial(m as u64);
        value *= BigRational::new(numer, denom);
    }
    DeltaValue { value }
}

fn check_preconditions(kind: IdentityKind, params: &MorrisParams) -> Result<(), MorrisError> {
    if kind == IdentityKind::Lemma21Relation {
        return Err(MorrisError::Precondition(
            "lemma21-relation takes an explicit symmetric factor; use antisymmetrize_check".into(),
        ));
    }
    if kind.is_shifted() && params.m == 0 {
        return Err(MorrisError::Precondition(format!(
            "{kind} needs m >= 1 (odd Vandermonde exponent 2m-1)"
        )));
    }
    if params.nb() < kind.min_nb() {
        return Err(MorrisError::Precondition(format!(
            "{kind} needs n*b >= {}, got {}",
            kind.min_nb(),
            params.nb()
        )));
    }
    if matches!(kind, IdentityKind::CrossTerm | IdentityKind::ShiftedCross) && params.n < 2 {
        return Err(MorrisError::Precondition(format!(
            "{kind} needs n >= 2 for an index pair"
        )));
    }
    Ok(())
}

/// The target monomial of the identity: symmetric `(b + m(n-1))^n` for the
/// unshifted family, staircase `b + m(n-1) - n + l` for the shifted one.
fn target_monomial(kind: IdentityKind, params: &MorrisParams) -> Monomial {
    let MorrisParams { n, m, b } = *params;
    let top = b as i64 + m as i64 * (n as i64 - 1);
    let exps: Vec<u32> = (1..=n as i64)
        .map(|l| {
            let e = if kind.is_shifted() { top - n as i64 + l } else { top };
            u32::try_from(e).expect("negative target exponent")
        })
        .collect();
    Monomial(exps)
}

/// Admissible prefactor indices for an identity at a given `n` (1-based).
pub fn admissible_indices(kind: IdentityKind, n: u32) -> Vec<IndexChoice> {
    match kind {
        IdentityKind::Leading => vec![IndexChoice::None],
        IdentityKind::SquareTerm
        | IdentityKind::LinearTerm
        | IdentityKind::ShiftedLinear
        | IdentityKind::ShiftedSquare => (1..=n).map(IndexChoice::R).collect(),
        IdentityKind::CrossTerm | IdentityKind::ShiftedCross => {
            let mut out = Vec::new();
            for i in 1..=n {
                for j in 1..=n {
                    if i != j {
                        out.push(IndexChoice::Pair(i, j));
                    }
                }
            }
            out
        }
        IdentityKind::Lemma21Relation => vec![IndexChoice::None],
    }
}

/// Closed-form right-hand side of the identity (per index; every admissible
/// index shares the same stated value).
pub fn rhs(kind: IdentityKind, params: &MorrisParams) -> Result<BigRational, MorrisError> {
    check_preconditions(kind, params)?;
    let MorrisParams { n, m, b } = *params;
    let nb = params.nb();
    let b_int = BigInt::from(b);
    let base: BigRational = match kind {
        IdentityKind::Leading => BigRational::from(factorial(nb)),
        IdentityKind::LinearTerm | IdentityKind::ShiftedLinear => {
            BigRational::from(b_int * factorial(nb - 1))
        }
        IdentityKind::SquareTerm | IdentityKind::ShiftedSquare => {
            let second = BigInt::from(b as i64 - m as i64 * (n as i64 - 1) - 1);
            BigRational::from(b_int * second * factorial(nb - 2))
        }
        IdentityKind::CrossTerm | IdentityKind::ShiftedCross => {
            let second = BigInt::from(b as u64 + m as u64);
            BigRational::from(b_int * second * factorial(nb - 2))
        }
        IdentityKind::Lemma21Relation => unreachable!("rejected above"),
    };
    let mut value = BigRational::from(params.sign()) * base * delta(params).value;
    if kind.is_shifted() {
        value /= BigRational::from(factorial(n as u64));
    }
    Ok(value)
}

/// Left-hand side computed by sparse expansion: the coefficient of the
/// target monomial in `prefactor * (sum x)^N * vdm(n, e)`, evaluated over
/// the integers with the cap pinned to the target monomial.
pub fn lhs(
    kind: IdentityKind,
    params: &MorrisParams,
    index: &IndexChoice,
) -> Result<BigRational, MorrisError> {
    check_preconditions(kind, params)?;
    let MorrisParams { n, m, b: _ } = *params;
    validate_index(kind, n, index)?;
    let ring = RingTag::Integers;
    let arity = n as usize;
    let target = target_monomial(kind, params);
    let cap = ExponentCap::at(&target);
    let vdm_exp = if kind.is_shifted() { 2 * m - 1 } else { 2 * m };
    let vdm = vandermonde_power(arity, vdm_exp, ring, &cap)?;

    let product = match index {
        IndexChoice::None => vdm,
        IndexChoice::R(r) => {
            let x = SparsePoly::variable(arity, ring, *r as usize - 1);
            let pre = match kind {
                IdentityKind::LinearTerm | IdentityKind::ShiftedLinear => x,
                IdentityKind::SquareTerm | IdentityKind::ShiftedSquare => x.mul(&x)?,
                _ => unreachable!(),
            };
            vdm.truncated_mul(&pre, &cap)?
        }
        IndexChoice::Pair(i, j) => {
            let xi = SparsePoly::variable(arity, ring, *i as usize - 1);
            let xj = SparsePoly::variable(arity, ring, *j as usize - 1);
            vdm.truncated_mul(&xi.mul(&xj)?, &cap)?
        }
    };

    let power = sum_power(kind, params);
    let c = product.extract_with_power(power, &target)?;
    Ok(c.to_rational())
}

fn sum_power(kind: IdentityKind, params: &MorrisParams) -> u32 {
    let nb = params.nb();
    let drop = match kind {
        IdentityKind::Leading => 0,
        IdentityKind::LinearTerm | IdentityKind::ShiftedLinear => 1,
        _ => 2,
    };
    u32::try_from(nb - drop).expect("sum power exceeds u32")
}

fn validate_index(kind: IdentityKind, n: u32, index: &IndexChoice) -> Result<(), MorrisError> {
    let ok = match (kind, index) {
        (IdentityKind::Leading, IndexChoice::None) => true,
        (
            IdentityKind::SquareTerm
            | IdentityKind::LinearTerm
            | IdentityKind::ShiftedLinear
            | IdentityKind::ShiftedSquare,
            IndexChoice::R(r),
        ) => (1..=n).contains(r),
        (IdentityKind::CrossTerm | IdentityKind::ShiftedCross, IndexChoice::Pair(i, j)) => {
            i != j && (1..=n).contains(i) && (1..=n).contains(j)
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(MorrisError::BadIndex(format!("{index} is not admissible for {kind} at n={n}")))
    }
}

/// One evaluated prefactor index: both sides and the exact-equality flag.
#[derive(Debug, Clone)]
pub struct IndexEntry {
    pub indices: IndexChoice,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub equal: bool,
}

/// Sum of the per-index left sides against the sum of the stated right
/// sides. For the shifted family this is the relation that actually holds.
#[derive(Debug, Clone)]
pub struct Symmetrized {
    pub lhs_sum: BigRational,
    pub rhs_sum: BigRational,
    pub equal: bool,
}

/// Result of checking one identity at one grid point.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub id: IdentityKind,
    pub params: MorrisParams,
    /// Only set for the antisymmetrization relation.
    pub k: Option<u32>,
    /// Text form of the symmetric factor for the antisymmetrization relation.
    pub factor: Option<String>,
    pub entries: Vec<IndexEntry>,
    pub symmetrized: Option<Symmetrized>,
    /// True when every per-index entry is exactly equal.
    pub equal: bool,
    pub skipped: bool,
    pub reason: Option<String>,
    pub ms: u128,
}

impl IdentityReport {
    fn skipped(id: IdentityKind, params: MorrisParams, reason: String) -> Self {
        IdentityReport {
            id,
            params,
            k: None,
            factor: None,
            entries: Vec::new(),
            symmetrized: None,
            equal: false,
            skipped: true,
            reason: Some(reason),
            ms: 0,
        }
    }

    /// Flattens the report into line-delimited JSON objects: one per index
    /// entry, plus a `"indices": "sum"` line for index-bearing identities.
    pub fn to_json_lines(&self) -> Vec<Value> {
        let base = |indices: Value, lhs: Option<&BigRational>, rhs: Option<&BigRational>, equal: bool| {
            let mut obj = json!({
                "id": self.id.name(),
                "n": self.params.n,
                "m": self.params.m,
                "b": self.params.b,
                "indices": indices,
                "lhs": lhs.map(rational_to_string),
                "rhs": rhs.map(rational_to_string),
                "equal": equal,
                "skipped": self.skipped,
                "reason": self.reason,
                "ms": self.ms,
            });
            if let Some(k) = self.k {
                obj["k"] = json!(k);
            }
            if let Some(factor) = &self.factor {
                obj["L"] = json!(factor);
            }
            obj
        };
        if self.skipped {
            return vec![base(Value::Null, None, None, false)];
        }
        let mut lines: Vec<Value> = self
            .entries
            .iter()
            .map(|e| base(e.indices.to_json(), Some(&e.lhs), Some(&e.rhs), e.equal))
            .collect();
        if let Some(sym) = &self.symmetrized {
            lines.push(base(json!("sum"), Some(&sym.lhs_sum), Some(&sym.rhs_sum), sym.equal));
        }
        lines
    }
}

/// Evaluates one identity at one grid point: every admissible index plus
/// the symmetrized sum. Precondition failures yield a skip-marked report
/// rather than an error.
pub fn check_identity(kind: IdentityKind, params: &MorrisParams) -> IdentityReport {
    let start = Instant::now();
    if let Err(e) = check_preconditions(kind, params) {
        return IdentityReport::skipped(kind, *params, e.to_string());
    }
    let rhs_value = rhs(kind, params).expect("preconditions checked");
    let mut entries = Vec::new();
    for index in admissible_indices(kind, params.n) {
        let lhs_value = lhs(kind, params, &index).expect("preconditions checked");
        let equal = lhs_value == rhs_value;
        entries.push(IndexEntry { indices: index, lhs: lhs_value, rhs: rhs_value.clone(), equal });
    }
    let symmetrized = if entries.len() > 1 {
        let lhs_sum: BigRational = entries.iter().map(|e| e.lhs.clone()).sum();
        let rhs_sum = BigRational::from(BigInt::from(entries.len())) * &rhs_value;
        let equal = lhs_sum == rhs_sum;
        Some(Symmetrized { lhs_sum, rhs_sum, equal })
    } else {
        None
    };
    let equal = entries.iter().all(|e| e.equal);
    IdentityReport {
        id: kind,
        params: *params,
        k: None,
        factor: None,
        entries,
        symmetrized,
        equal,
        skipped: false,
        reason: None,
        ms: start.elapsed().as_millis(),
    }
}

/// Checks the antisymmetrization relation for a symmetric factor `L`:
/// the coefficient of `(k-1, ..., k-1)` in `vdm(n, 2m) * L` equals `n!`
/// times the coefficient of `(k-n, k-n+1, ..., k-1)` in `vdm(n, 2m-1) * L`.
pub fn antisymmetrize_check(
    m: u32,
    k: u32,
    n: u32,
    factor: &SparsePoly,
) -> Result<IdentityReport, MorrisError> {
    let start = Instant::now();
    if m < 1 {
        return Err(MorrisError::Precondition("antisymmetrization needs m >= 1".into()));
    }
    if n < 1 || factor.arity() != n as usize {
        return Err(MorrisError::Precondition(format!(
            "factor arity {} does not match n={n}",
            factor.arity()
        )));
    }
    if k < n {
        return Err(MorrisError::Precondition(format!(
            "staircase target needs k >= n, got k={k}, n={n}"
        )));
    }
    if !factor.is_symmetric() {
        return Err(MorrisError::NotSymmetric);
    }
    let ring = factor.ring();
    let arity = n as usize;

    let sym_target = Monomial(vec![k - 1; arity]);
    let sym_cap = ExponentCap::at(&sym_target);
    let even = vandermonde_power(arity, 2 * m, ring, &sym_cap)?;
    let lhs_c = even.truncated_mul(factor, &sym_cap)?.coeff(&sym_target)?;

    let stair_target = Monomial((0..n).map(|l| k - n + l).collect());
    let stair_cap = ExponentCap::at(&stair_target);
    let odd = vandermonde_power(arity, 2 * m - 1, ring, &stair_cap)?;
    let stair_c = odd.truncated_mul(factor, &stair_cap)?.coeff(&stair_target)?;
    let rhs_c = stair_c.mul_int(&factorial(n as u64));

    let equal = lhs_c == rhs_c;
    let (lhs_q, rhs_q) = (coefficient_to_rational(&lhs_c), coefficient_to_rational(&rhs_c));
    Ok(IdentityReport {
        id: IdentityKind::Lemma21Relation,
        params: MorrisParams { n, m, b: 0 },
        k: Some(k),
        factor: Some(factor.to_string()),
        entries: vec![IndexEntry { indices: IndexChoice::None, lhs: lhs_q, rhs: rhs_q, equal }],
        symmetrized: None,
        equal,
        skipped: false,
        reason: None,
        ms: start.elapsed().as_millis(),
    })
}

fn coefficient_to_rational(c: &Coefficient) -> BigRational {
    c.to_rational()
}

/// Runs `check_identity` over the cross product of the given ranges, in
/// deterministic `(id, n, m, b)` order. Grid points are evaluated in
/// parallel; the output order does not depend on scheduling.
pub fn grid_check(
    ids: &[IdentityKind],
    n_range: &[u32],
    m_range: &[u32],
    b_range: &[u32],
) -> Vec<IdentityReport> {
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    let mut points = Vec::new();
    for &id in &ids {
        for &n in n_range {
            for &m in m_range {
                for &b in b_range {
                    points.push((id, MorrisParams::new(n, m, b)));
                }
            }
        }
    }
    points
        .par_iter()
        .map(|(id, params)| check_identity(*id, params))
        .collect()
}

/// `e_2 = sum_{i<j} x_i x_j`, the degree-2 elementary symmetric polynomial.
pub fn elementary_symmetric_2(n: usize, ring: RingTag) -> SparsePoly {
    let mut acc = SparsePoly::zero(n, ring);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut exps = vec![0u32; n];
            exps[i] = 1;
            exps[j] = 1;
            let term = SparsePoly::from_terms(n, ring, [(exps, ring.one())]).unwrap();
            acc = acc.add(&term).unwrap();
        }
    }
    acc
}

/// `p_2 = sum_i x_i^2`, the degree-2 power sum.
pub fn power_sum_2(n: usize, ring: RingTag) -> SparsePoly {
    let mut acc = SparsePoly::zero(n, ring);
    for i in 0..n {
        let mut exps = vec![0u32; n];
        exps[i] = 2;
        let term = SparsePoly::from_terms(n, ring, [(exps, ring.one())]).unwrap();
        acc = acc.add(&term).unwrap();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::sum_of_vars;

    fn q(v: i64) -> BigRational {
        BigRational::from(BigInt::from(v))
    }

    fn q_frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(&MorrisParams::new(1, 0, 0)).value, q(1));
        assert_eq!(delta(&MorrisParams::new(2, 1, 1)).value, q(1));
        assert_eq!(delta(&MorrisParams::new(2, 1, 2)).value, q_frac(1, 6));
    }

    #[test]
    fn delta_times_factorial_is_integer_on_grid() {
        for n in 1..=4u32 {
            for m in 0..=2u32 {
                for b in 0..=4u32 {
                    let p = MorrisParams::new(n, m, b);
                    let d = delta(&p);
                    assert!(
                        d.times_factorial(p.nb()).is_some(),
                        "(nb)! * delta not integral at n={n} m={m} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn rhs_spot_values() {
        assert_eq!(rhs(IdentityKind::Leading, &MorrisParams::new(2, 1, 1)).unwrap(), q(-2));
        assert_eq!(rhs(IdentityKind::SquareTerm, &MorrisParams::new(2, 1, 2)).unwrap(), q(0));
        assert_eq!(rhs(IdentityKind::CrossTerm, &MorrisParams::new(2, 1, 2)).unwrap(), q(-2));
        assert_eq!(rhs(IdentityKind::LinearTerm, &MorrisParams::new(2, 1, 2)).unwrap(), q(-2));
        assert_eq!(
            rhs(IdentityKind::ShiftedLinear, &MorrisParams::new(2, 1, 2)).unwrap(),
            q(-1)
        );
    }

    #[test]
    fn rhs_rejects_undefined_factorials() {
        // n*b = 0 makes (nb-1)! undefined
        assert!(matches!(
            rhs(IdentityKind::LinearTerm, &MorrisParams::new(2, 1, 0)),
            Err(MorrisError::Precondition(_))
        ));
        assert!(matches!(
            rhs(IdentityKind::SquareTerm, &MorrisParams::new(1, 0, 1)),
            Err(MorrisError::Precondition(_))
        ));
    }

    #[test]
    fn lhs_spot_values() {
        assert_eq!(
            lhs(IdentityKind::Leading, &MorrisParams::new(2, 1, 1), &IndexChoice::None).unwrap(),
            q(-2)
        );
        assert_eq!(
            lhs(IdentityKind::LinearTerm, &MorrisParams::new(2, 1, 2), &IndexChoice::R(1)).unwrap(),
            q(-2)
        );
        assert_eq!(
            lhs(IdentityKind::ShiftedLinear, &MorrisParams::new(2, 1, 2), &IndexChoice::R(2))
                .unwrap(),
            q(0)
        );
        assert_eq!(
            lhs(IdentityKind::ShiftedLinear, &MorrisParams::new(2, 1, 2), &IndexChoice::R(1))
                .unwrap(),
            q(-2)
        );
    }

    #[test]
    fn lhs_rejects_bad_indices() {
        let p = MorrisParams::new(2, 1, 2);
        assert!(matches!(
            lhs(IdentityKind::LinearTerm, &p, &IndexChoice::R(3)),
            Err(MorrisError::BadIndex(_))
        ));
        assert!(matches!(
            lhs(IdentityKind::CrossTerm, &p, &IndexChoice::Pair(1, 1)),
            Err(MorrisError::BadIndex(_))
        ));
        assert!(matches!(
            lhs(IdentityKind::Leading, &p, &IndexChoice::R(1)),
            Err(MorrisError::BadIndex(_))
        ));
    }

    #[test]
    fn check_identity_leading_small_b() {
        for b in [1u32, 2] {
            let report = check_identity(IdentityKind::Leading, &MorrisParams::new(2, 1, b));
            assert!(!report.skipped);
            assert!(report.equal, "leading failed at b={b}");
        }
    }

    #[test]
    fn check_identity_linear_all_r() {
        let report = check_identity(IdentityKind::LinearTerm, &MorrisParams::new(2, 1, 2));
        assert!(report.equal);
        assert_eq!(report.entries.len(), 2);
        for e in &report.entries {
            assert_eq!(e.lhs, q(-2));
        }
    }

    #[test]
    fn check_identity_shifted_linear_per_index() {
        let report = check_identity(IdentityKind::ShiftedLinear, &MorrisParams::new(2, 1, 2));
        assert!(!report.skipped);
        assert!(!report.equal, "the shifted linear family is index-sensitive here");
        assert_eq!(report.entries[0].lhs, q(-2));
        assert_eq!(report.entries[1].lhs, q(0));
        assert_eq!(report.entries[0].rhs, q(-1));
        let sym = report.symmetrized.as_ref().unwrap();
        assert_eq!(sym.lhs_sum, q(-2));
        assert_eq!(sym.rhs_sum, q(-2));
        assert!(sym.equal);
    }

    #[test]
    fn check_identity_skips_on_precondition() {
        let report = check_identity(IdentityKind::LinearTerm, &MorrisParams::new(2, 1, 0));
        assert!(report.skipped);
        assert!(report.reason.is_some());
        let report = check_identity(IdentityKind::ShiftedCross, &MorrisParams::new(3, 0, 2));
        assert!(report.skipped);
    }

    #[test]
    fn antisymmetrize_constant_factor() {
        // n=2, m=1, k=2, L=1: [x1 x2](x1-x2)^2 = -2 and 2! [x2](x1-x2) = -2.
        let one = SparsePoly::one(2, RingTag::Integers);
        let report = antisymmetrize_check(1, 2, 2, &one).unwrap();
        assert!(report.equal);
        assert_eq!(report.entries[0].lhs, q(-2));
        assert_eq!(report.entries[0].rhs, q(-2));
    }

    #[test]
    fn antisymmetrize_sum_power_factor() {
        // L = (x1+x2)^(2b) with k = b + m + 1
        for b in 1..=3u32 {
            let ring = RingTag::Integers;
            let l = sum_of_vars(2, ring)
                .pow(2 * b, &ExponentCap::unbounded(2))
                .unwrap();
            let report = antisymmetrize_check(1, b + 2, 2, &l).unwrap();
            assert!(report.equal, "failed at b={b}");
        }
    }

    #[test]
    fn antisymmetrize_zero_factor() {
        let zero = SparsePoly::zero(3, RingTag::Integers);
        let report = antisymmetrize_check(1, 4, 3, &zero).unwrap();
        assert!(report.equal);
        assert_eq!(report.entries[0].lhs, q(0));
    }

    #[test]
    fn antisymmetrize_rejects_asymmetric_factor() {
        let x1 = SparsePoly::variable(2, RingTag::Integers, 0);
        assert!(matches!(
            antisymmetrize_check(1, 3, 2, &x1),
            Err(MorrisError::NotSymmetric)
        ));
    }

    #[test]
    fn grid_check_leading_block() {
        let reports = grid_check(
            &[IdentityKind::Leading],
            &[2, 3],
            &[0, 1],
            &[0, 1, 2, 3],
        );
        assert_eq!(reports.len(), 16);
        assert!(reports.iter().all(|r| !r.skipped && r.equal));
    }

    #[test]
    fn grid_check_empty_range() {
        let reports = grid_check(&[IdentityKind::Leading], &[2], &[], &[0, 1]);
        assert!(reports.is_empty());
    }

    #[test]
    fn grid_check_marks_skips() {
        let reports = grid_check(&[IdentityKind::LinearTerm], &[2], &[1], &[0, 1]);
        assert_eq!(reports.len(), 2);
        assert!(reports[0].skipped); // b = 0
        assert!(!reports[1].skipped);
    }

    #[test]
    fn json_lines_schema() {
        let report = check_identity(IdentityKind::ShiftedLinear, &MorrisParams::new(2, 1, 2));
        let lines = report.to_json_lines();
        assert_eq!(lines.len(), 3); // r=1, r=2, sum
        assert_eq!(lines[0]["id"], "shifted-linear");
        assert_eq!(lines[0]["indices"], json!([1]));
        assert_eq!(lines[0]["lhs"], "-2");
        assert_eq!(lines[2]["indices"], "sum");
        assert_eq!(lines[2]["equal"], true);
    }
}
