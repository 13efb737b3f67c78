//! Restricted sumsets over `F_p`: instance model, seeded generation,
//! exhaustive enumeration, the theorem registry (lower bounds and prime
//! thresholds), and end-to-end verification reports.
//!
//! An instance fixes a prime `p`, parameters `(n, k, m)`, the sets
//! `A_1..A_n`, the difference-avoidance sets `S_ij` (stored per unordered
//! pair `i < j` with merged semantics: an ordered constraint
//! `a_j - a_i not in S` folds into the pair as `-S`), and an optional
//! algebraic form restriction. The set under study is
//!
//! `C = { a_1 + ... + a_n : a_i in A_i, a_i - a_j not in S_ij, form != 0 }`.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::morris::MorrisParams;
use crate::nullstellensatz::{
    anr_lower_bound, build_restriction_poly, theorem_h, CnError, CNCertificate, GridSets,
};
use crate::polyring::primes::{is_prime, mul_mod, next_prime_above};
use crate::polyring::{PolyError, SparsePoly};

#[derive(Debug, Error)]
pub enum SumsetError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("infeasible instance parameters: {0}")]
    Infeasible(String),
    #[error("instance condition {instance} does not match theorem condition {theorem}")]
    ConditionMismatch { instance: Condition, theorem: Condition },
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error(transparent)]
    Cn(#[from] CnError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The two size regimes: equal-size sets with `|S_ij| <= 2m`, or staircase
/// sizes `|A_i| = k - n + i` with `|S_ij| < 2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    A,
    B,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::A => write!(f, "A"),
            Condition::B => write!(f, "B"),
        }
    }
}

/// The eight theorem variants. Unprimed variants use Condition A, primed
/// ones Condition B; the suffix selects the form restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(non_camel_case_types)]
pub enum TheoremId {
    T1_3,
    T1_4,
    T1_5,
    T1_5p,
    T1_6,
    T1_6p,
    T1_7,
    T1_7p,
}

/// Which algebraic form a theorem restricts by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictionKind {
    None,
    Linear,
    DiagonalQuadratic,
    Bilinear,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::T1_3,
        TheoremId::T1_4,
        TheoremId::T1_5,
        TheoremId::T1_5p,
        TheoremId::T1_6,
        TheoremId::T1_6p,
        TheoremId::T1_7,
        TheoremId::T1_7p,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::T1_3 => "t1_3",
            TheoremId::T1_4 => "t1_4",
            TheoremId::T1_5 => "t1_5",
            TheoremId::T1_5p => "t1_5p",
            TheoremId::T1_6 => "t1_6",
            TheoremId::T1_6p => "t1_6p",
            TheoremId::T1_7 => "t1_7",
            TheoremId::T1_7p => "t1_7p",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        TheoremId::ALL.iter().copied().find(|t| t.name() == s)
    }

    pub fn condition(&self) -> Condition {
        match self {
            TheoremId::T1_3 | TheoremId::T1_5 | TheoremId::T1_6 | TheoremId::T1_7 => Condition::A,
            _ => Condition::B,
        }
    }

    pub fn restriction_kind(&self) -> RestrictionKind {
        match self {
            TheoremId::T1_3 | TheoremId::T1_4 => RestrictionKind::None,
            TheoremId::T1_5 | TheoremId::T1_5p => RestrictionKind::Linear,
            TheoremId::T1_6 | TheoremId::T1_6p => RestrictionKind::DiagonalQuadratic,
            TheoremId::T1_7 | TheoremId::T1_7p => RestrictionKind::Bilinear,
        }
    }

    /// Degree of the form prefactor in the restriction polynomial.
    pub fn form_degree(&self) -> u32 {
        match self.restriction_kind() {
            RestrictionKind::None => 0,
            RestrictionKind::Linear => 1,
            RestrictionKind::DiagonalQuadratic | RestrictionKind::Bilinear => 2,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coefficient of one ordered index pair in a bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCoeff {
    pub i: u32,
    pub j: u32,
    pub a: u64,
}

/// The optional algebraic form condition on admissible tuples. Indices are
/// 1-based. The bilinear sum is a single global constraint
/// `sum_{i != j in T} alpha_ij a_i a_j != 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Restriction {
    None,
    Linear { t: Vec<u32>, alpha: Vec<u64> },
    DiagonalQuadratic { t: Vec<u32>, alpha: Vec<u64> },
    Bilinear { t: Vec<u32>, alpha: Vec<PairCoeff> },
}

impl Restriction {
    pub fn kind(&self) -> RestrictionKind {
        match self {
            Restriction::None => RestrictionKind::None,
            Restriction::Linear { .. } => RestrictionKind::Linear,
            Restriction::DiagonalQuadratic { .. } => RestrictionKind::DiagonalQuadratic,
            Restriction::Bilinear { .. } => RestrictionKind::Bilinear,
        }
    }

    /// The scalar form sum whose nonvanishing the theorems hypothesize:
    /// `sum alpha_i` or `sum alpha_ij` mod `p`.
    pub fn form_sum(&self, p: u64) -> Option<u64> {
        match self {
            Restriction::None => None,
            Restriction::Linear { alpha, .. } | Restriction::DiagonalQuadratic { alpha, .. } => {
                Some(alpha.iter().fold(0u64, |acc, &a| (acc + a % p) % p))
            }
            Restriction::Bilinear { alpha, .. } => {
                Some(alpha.iter().fold(0u64, |acc, pc| (acc + pc.a % p) % p))
            }
        }
    }

    /// Evaluates the form at a tuple (1-based indices into `point`).
    pub fn eval(&self, point: &[u64], p: u64) -> Option<u64> {
        let at = |i: u32| point[i as usize - 1] % p;
        match self {
            Restriction::None => None,
            Restriction::Linear { t, alpha } => Some(
                t.iter()
                    .zip(alpha)
                    .fold(0u64, |acc, (&i, &a)| (acc + mul_mod(a % p, at(i), p)) % p),
            ),
            Restriction::DiagonalQuadratic { t, alpha } => Some(t.iter().zip(alpha).fold(
                0u64,
                |acc, (&i, &a)| {
                    let sq = mul_mod(at(i), at(i), p);
                    (acc + mul_mod(a % p, sq, p)) % p
                },
            )),
            Restriction::Bilinear { alpha, .. } => Some(alpha.iter().fold(0u64, |acc, pc| {
                let prod = mul_mod(at(pc.i), at(pc.j), p);
                (acc + mul_mod(pc.a % p, prod, p)) % p
            })),
        }
    }
}

/// One restricted-sumset experiment: field, parameters, sets, and the form
/// restriction. `s_sets` is keyed by unordered pairs `(i, j)` with
/// `i < j`, 1-based, already merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumsetInstance {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub m: u32,
    pub condition: Condition,
    pub a_sets: Vec<Vec<u64>>,
    pub s_sets: Vec<((u32, u32), Vec<u64>)>,
    pub restriction: Restriction,
    pub seed: Option<u64>,
}

impl SumsetInstance {
    /// Validates set elements, sorts them, folds ordered `S` entries into
    /// the unordered `i < j` representation (an `(i, j)` entry with
    /// `i > j` contributes its negation to the `(j, i)` set).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: u64,
        n: u32,
        k: u32,
        m: u32,
        condition: Condition,
        a_sets: Vec<Vec<u64>>,
        s_entries: Vec<(u32, u32, Vec<u64>)>,
        restriction: Restriction,
        seed: Option<u64>,
    ) -> Result<Self, SumsetError> {
        if !is_prime(p) {
            return Err(SumsetError::NotPrime(p));
        }
        if n < 1 {
            return Err(SumsetError::BadInstance("n must be positive".into()));
        }
        if a_sets.len() != n as usize {
            return Err(SumsetError::BadInstance(format!(
                "expected {n} A-sets, got {}",
                a_sets.len()
            )));
        }
        let mut a_sorted = Vec::with_capacity(a_sets.len());
        for (i, set) in a_sets.into_iter().enumerate() {
            let sorted = sorted_distinct_residues(set, p)
                .map_err(|e| SumsetError::BadInstance(format!("A_{}: {e}", i + 1)))?;
            if sorted.is_empty() {
                return Err(SumsetError::BadInstance(format!("A_{} is empty", i + 1)));
            }
            a_sorted.push(sorted);
        }
        let mut merged: std::collections::BTreeMap<(u32, u32), BTreeSet<u64>> =
            std::collections::BTreeMap::new();
        for (i, j, set) in s_entries {
            if i == j || i < 1 || j < 1 || i > n || j > n {
                return Err(SumsetError::BadInstance(format!("bad S pair ({i},{j})")));
            }
            let set = sorted_distinct_residues(set, p)
                .map_err(|e| SumsetError::BadInstance(format!("S_({i},{j}): {e}")))?;
            let (key, folded): ((u32, u32), Vec<u64>) = if i < j {
                ((i, j), set)
            } else {
                ((j, i), set.iter().map(|&c| (p - c % p) % p).collect())
            };
            merged.entry(key).or_default().extend(folded);
        }
        let s_sets = merged
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect::<Vec<u64>>()))
            .collect();
        validate_restriction(&restriction, n, p)?;
        Ok(SumsetInstance {
            p,
            n,
            k,
            m,
            condition,
            a_sets: a_sorted,
            s_sets,
            restriction,
            seed,
        })
    }

    /// The merged difference-avoidance set for the unordered pair `(i, j)`,
    /// `i < j`; empty when absent.
    pub fn s_for(&self, i: u32, j: u32) -> &[u64] {
        self.s_sets
            .iter()
            .find(|((a, b), _)| *a == i && *b == j)
            .map(|(_, s)| s.as_slice())
            .unwrap_or(&[])
    }

    /// The power-sum budget `b = k - 1 - m(n-1)`; negative means the
    /// trivial regime.
    pub fn budget(&self) -> i64 {
        self.k as i64 - 1 - self.m as i64 * (self.n as i64 - 1)
    }

    pub fn to_json(&self) -> Value {
        let s: Vec<Value> = self
            .s_sets
            .iter()
            .map(|((i, j), set)| json!({"i": i, "j": j, "set": set}))
            .collect();
        json!({
            "p": self.p,
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "condition": self.condition,
            "A": self.a_sets,
            "S": s,
            "restriction": self.restriction,
            "seed": self.seed,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, SumsetError> {
        let file: InstanceFile = serde_json::from_value(v.clone())
            .map_err(|e| SumsetError::BadInstance(e.to_string()))?;
        file.into_instance()
    }
}

/// Serde mirror of the instance file format.
#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    p: u64,
    n: u32,
    k: u32,
    m: u32,
    condition: Condition,
    #[serde(rename = "A")]
    a: Vec<Vec<u64>>,
    #[serde(rename = "S", default)]
    s: Vec<SEntry>,
    restriction: Restriction,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SEntry {
    i: u32,
    j: u32,
    set: Vec<u64>,
}

impl InstanceFile {
    fn into_instance(self) -> Result<SumsetInstance, SumsetError> {
        SumsetInstance::new(
            self.p,
            self.n,
            self.k,
            self.m,
            self.condition,
            self.a,
            self.s.into_iter().map(|e| (e.i, e.j, e.set)).collect(),
            self.restriction,
            self.seed,
        )
    }
}

fn sorted_distinct_residues(mut set: Vec<u64>, p: u64) -> Result<Vec<u64>, String> {
    for &x in &set {
        if x >= p {
            return Err(format!("{x} is not a residue mod {p}"));
        }
    }
    set.sort_unstable();
    let len = set.len();
    set.dedup();
    if set.len() != len {
        return Err("duplicate elements".into());
    }
    Ok(set)
}

fn validate_restriction(r: &Restriction, n: u32, p: u64) -> Result<(), SumsetError> {
    let check_t = |t: &[u32]| -> Result<(), SumsetError> {
        if t.is_empty() {
            return Err(SumsetError::BadInstance("restriction index set T is empty".into()));
        }
        if t.windows(2).any(|w| w[0] >= w[1]) || t.iter().any(|&i| i < 1 || i > n) {
            return Err(SumsetError::BadInstance(
                "restriction indices must be sorted, distinct, in [1, n]".into(),
            ));
        }
        Ok(())
    };
    match r {
        Restriction::None => Ok(()),
        Restriction::Linear { t, alpha } | Restriction::DiagonalQuadratic { t, alpha } => {
            check_t(t)?;
            if alpha.len() != t.len() {
                return Err(SumsetError::BadInstance("alpha length must match T".into()));
            }
            if alpha.iter().any(|&a| a >= p) {
                return Err(SumsetError::BadInstance("alpha must be residues".into()));
            }
            Ok(())
        }
        Restriction::Bilinear { t, alpha } => {
            check_t(t)?;
            if t.len() < 2 {
                return Err(SumsetError::BadInstance("bilinear form needs |T| >= 2".into()));
            }
            for pc in alpha {
                if pc.i == pc.j || !t.contains(&pc.i) || !t.contains(&pc.j) {
                    return Err(SumsetError::BadInstance(format!(
                        "bilinear pair ({}, {}) not an ordered pair in T",
                        pc.i, pc.j
                    )));
                }
                if pc.a >= p {
                    return Err(SumsetError::BadInstance("alpha must be residues".into()));
                }
            }
            Ok(())
        }
    }
}

/// Stated lower bound on `|C|`: `(k + m - mn - 1) n` plus 1, 0, or -1
/// depending on the form family.
pub fn theorem_bound(theorem: TheoremId, n: u32, k: u32, m: u32) -> i64 {
    let (n, k, m) = (n as i64, k as i64, m as i64);
    let base = (k + m - m * n - 1) * n;
    match theorem.restriction_kind() {
        RestrictionKind::None => base + 1,
        RestrictionKind::Linear => base,
        RestrictionKind::DiagonalQuadratic | RestrictionKind::Bilinear => base - 1,
    }
}

/// The hypothesis threshold on the characteristic: the theorem applies when
/// `p` strictly exceeds this value.
pub fn prime_threshold(theorem: TheoremId, n: u32, k: u32, m: u32) -> i64 {
    let (n, k, m) = (n as i64, k as i64, m as i64);
    let adj = match theorem.restriction_kind() {
        RestrictionKind::None => 0,
        RestrictionKind::Linear => 1,
        RestrictionKind::DiagonalQuadratic | RestrictionKind::Bilinear => 2,
    };
    (m * n).max((k - 1) * n - m * n * (n - 1) - adj)
}

/// Smallest prime strictly above the theorem's threshold.
pub fn smallest_admissible_prime(theorem: TheoremId, n: u32, k: u32, m: u32) -> u64 {
    let t = prime_threshold(theorem, n, k, m).max(0) as u64;
    next_prime_above(t)
}

/// Exhaustively enumerates the restricted sumset `C`: all admissible tuples
/// of `prod A_i`, with the difference-avoidance and form conditions
/// applied, collected as distinct sums mod `p`.
pub fn enumerate_c(inst: &SumsetInstance) -> BTreeSet<u64> {
    let n = inst.n as usize;
    let p = inst.p;
    let mut sums = BTreeSet::new();
    let mut idx = vec![0usize; n];
    let mut point = vec![0u64; n];
    'outer: loop {
        for (v, (&i, set)) in point.iter_mut().zip(idx.iter().zip(&inst.a_sets)) {
            *v = set[i];
        }
        if admissible(inst, &point) {
            let sum = point.iter().fold(0u64, |acc, &a| (acc + a) % p);
            sums.insert(sum);
        }
        // odometer
        for pos in (0..n).rev() {
            idx[pos] += 1;
            if idx[pos] < inst.a_sets[pos].len() {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    sums
}

fn admissible(inst: &SumsetInstance, point: &[u64]) -> bool {
    let p = inst.p;
    for ((i, j), set) in &inst.s_sets {
        let ai = point[*i as usize - 1];
        let aj = point[*j as usize - 1];
        let diff = (ai + p - aj) % p;
        if set.binary_search(&diff).is_ok() {
            return false;
        }
    }
    !matches!(inst.restriction.eval(point, p), Some(0))
}

/// Distinct sums over tuples where the given polynomial does not vanish.
/// Used to confirm certificates: the support of the restriction polynomial
/// is a subset of the admissible tuples.
pub fn enumerate_support(poly: &SparsePoly, a_sets: &[Vec<u64>], p: u64) -> BTreeSet<u64> {
    let n = a_sets.len();
    let mut sums = BTreeSet::new();
    let mut idx = vec![0usize; n];
    let mut point = vec![0u64; n];
    'outer: loop {
        for (v, (&i, set)) in point.iter_mut().zip(idx.iter().zip(a_sets)) {
            *v = set[i];
        }
        let value = poly.eval_fp(&point).expect("arity checked by caller");
        if !value.is_zero() {
            let sum = point.iter().fold(0u64, |acc, &a| (acc + a) % p);
            sums.insert(sum);
        }
        for pos in (0..n).rev() {
            idx[pos] += 1;
            if idx[pos] < a_sets[pos].len() {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    sums
}

// ---- seeded instance generation ----

/// Uniform value in `[0, bound)` from the raw 64-bit stream, by rejection.
/// Documented so that instances are reproducible from the seed alone.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    // Accept v <= zone where zone + 1 is the largest multiple of `bound`
    // that fits in 2^64.
    let r = ((u64::MAX % bound) + 1) % bound;
    let zone = u64::MAX - r;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Sorted uniform `size`-subset of `{0, ..., universe-1}` by selection
/// sampling: residue `r` is kept with probability `needed / remaining`.
fn sample_subset(rng: &mut ChaCha8Rng, universe: u64, size: usize) -> Vec<u64> {
    debug_assert!(size as u64 <= universe);
    let mut out = Vec::with_capacity(size);
    let mut needed = size as u64;
    for r in 0..universe {
        if needed == 0 {
            break;
        }
        if uniform_below(rng, universe - r) < needed {
            out.push(r);
            needed -= 1;
        }
    }
    out
}

/// Deterministic pseudo-random instance for a theorem: sizes per its
/// condition, difference sets within the condition's cap, and restriction
/// coefficients resampled until the form sum is nonzero. The same seed
/// always regenerates the identical instance.
pub fn gen_instance(
    seed: u64,
    theorem: TheoremId,
    p: u64,
    n: u32,
    k: u32,
    m: u32,
) -> Result<SumsetInstance, SumsetError> {
    if !is_prime(p) {
        return Err(SumsetError::NotPrime(p));
    }
    if n < 1 || k < 1 {
        return Err(SumsetError::Infeasible("need n >= 1 and k >= 1".into()));
    }
    if k as u64 > p {
        return Err(SumsetError::Infeasible(format!("k={k} exceeds p={p}")));
    }
    let condition = theorem.condition();
    let max_s: u64 = match condition {
        Condition::A => 2 * m as u64,
        Condition::B => {
            if m == 0 && n >= 2 {
                return Err(SumsetError::Infeasible(
                    "|S_ij| < 2m is unsatisfiable at m = 0".into(),
                ));
            }
            if k < n {
                return Err(SumsetError::Infeasible(format!(
                    "staircase sizes need k >= n, got k={k}, n={n}"
                )));
            }
            (2 * m as u64).saturating_sub(1)
        }
    };
    if matches!(theorem.restriction_kind(), RestrictionKind::Bilinear) && n < 2 {
        return Err(SumsetError::Infeasible("bilinear form needs n >= 2".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut a_sets = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let size = match condition {
            Condition::A => k as u64,
            Condition::B => (k - n + i) as u64,
        };
        a_sets.push(sample_subset(&mut rng, p, size as usize));
    }

    let mut s_entries = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            let cap = max_s.min(p);
            let size = uniform_below(&mut rng, cap + 1);
            s_entries.push((i, j, sample_subset(&mut rng, p, size as usize)));
        }
    }

    let restriction = match theorem.restriction_kind() {
        RestrictionKind::None => Restriction::None,
        kind => {
            let min_t = if matches!(kind, RestrictionKind::Bilinear) { 2 } else { 1 };
            let t_size = min_t + uniform_below(&mut rng, (n - min_t + 1) as u64) as u32;
            let t: Vec<u32> = sample_subset(&mut rng, n as u64, t_size as usize)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            match kind {
                RestrictionKind::Linear | RestrictionKind::DiagonalQuadratic => {
                    let alpha = loop {
                        let alpha: Vec<u64> =
                            (0..t.len()).map(|_| uniform_below(&mut rng, p)).collect();
                        if alpha.iter().fold(0u64, |acc, &a| (acc + a) % p) != 0 {
                            break alpha;
                        }
                    };
                    if matches!(kind, RestrictionKind::Linear) {
                        Restriction::Linear { t, alpha }
                    } else {
                        Restriction::DiagonalQuadratic { t, alpha }
                    }
                }
                RestrictionKind::Bilinear => {
                    let mut pairs = Vec::new();
                    for &i in &t {
                        for &j in &t {
                            if i != j {
                                pairs.push((i, j));
                            }
                        }
                    }
                    let alpha = loop {
                        let alpha: Vec<PairCoeff> = pairs
                            .iter()
                            .map(|&(i, j)| PairCoeff { i, j, a: uniform_below(&mut rng, p) })
                            .collect();
                        if alpha.iter().fold(0u64, |acc, pc| (acc + pc.a) % p) != 0 {
                            break alpha;
                        }
                    };
                    Restriction::Bilinear { t, alpha }
                }
                RestrictionKind::None => unreachable!(),
            }
        }
    };

    SumsetInstance::new(
        p,
        n,
        k,
        m,
        condition,
        a_sets,
        s_entries,
        restriction,
        Some(seed),
    )
}

/// Outcome of verifying one instance against one theorem.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub theorem: TheoremId,
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub m: u32,
    pub condition: Condition,
    pub seed: Option<u64>,
    pub hypotheses_ok: bool,
    pub reasons: Vec<String>,
    /// Bound is nonpositive, so the claim holds vacuously.
    pub trivial: bool,
    pub cardinality: Option<usize>,
    pub bound: i64,
    pub passed: bool,
    pub certificate: Option<CNCertificate>,
    pub certificate_note: Option<String>,
    /// Closed-form key coefficient with the form sum factored in, exact.
    pub h: Option<String>,
    pub h_integral: Option<bool>,
    pub h_mod_p: Option<u64>,
    pub ms: u128,
}

impl VerifyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "theorem": self.theorem.name(),
            "p": self.p,
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "condition": self.condition,
            "seed": self.seed,
            "hypotheses_ok": self.hypotheses_ok,
            "reasons": self.reasons,
            "trivial": self.trivial,
            "cardinality": self.cardinality,
            "bound": self.bound,
            "passed": self.passed,
            "certificate": self.certificate.as_ref().map(|c| c.to_json()),
            "certificate_note": self.certificate_note,
            "h": self.h,
            "h_integral": self.h_integral,
            "h_mod_p": self.h_mod_p,
            "ms": self.ms,
        })
    }
}

/// Checks an instance against a theorem: hypothesis gate, exhaustive
/// enumeration (skipped for nonpositive bounds unless forced), and the
/// certificate path through the restriction polynomial when the
/// parameters admit it.
pub fn verify(
    inst: &SumsetInstance,
    theorem: TheoremId,
    force_enumeration: bool,
) -> Result<VerifyReport, SumsetError> {
    let start = Instant::now();
    if inst.condition != theorem.condition() {
        return Err(SumsetError::ConditionMismatch {
            instance: inst.condition,
            theorem: theorem.condition(),
        });
    }

    let mut reasons = Vec::new();
    check_hypotheses(inst, theorem, &mut reasons);
    let hypotheses_ok = reasons.is_empty();

    let bound = theorem_bound(theorem, inst.n, inst.k, inst.m);
    let trivial = bound <= 0;
    let cardinality = if trivial && !force_enumeration {
        None
    } else {
        Some(enumerate_c(inst).len())
    };
    let passed = hypotheses_ok && cardinality.is_none_or(|c| c as i64 >= bound);

    let (certificate, certificate_note) = certificate_path(inst, theorem);

    let (h, h_integral, h_mod_p) = closed_form_h(inst, theorem);

    Ok(VerifyReport {
        theorem,
        p: inst.p,
        n: inst.n,
        k: inst.k,
        m: inst.m,
        condition: inst.condition,
        seed: inst.seed,
        hypotheses_ok,
        reasons,
        trivial,
        cardinality,
        bound,
        passed,
        certificate,
        certificate_note,
        h,
        h_integral,
        h_mod_p,
        ms: start.elapsed().as_millis(),
    })
}

fn check_hypotheses(inst: &SumsetInstance, theorem: TheoremId, reasons: &mut Vec<String>) {
    let SumsetInstance { p, n, k, m, .. } = *inst;
    for (idx, set) in inst.a_sets.iter().enumerate() {
        let expected = match inst.condition {
            Condition::A => k as usize,
            Condition::B => (k - n + idx as u32 + 1) as usize,
        };
        if set.len() != expected {
            reasons.push(format!(
                "|A_{}| = {} but condition {} requires {}",
                idx + 1,
                set.len(),
                inst.condition,
                expected
            ));
        }
    }
    let s_cap = 2 * m as usize;
    if inst.condition == Condition::B && m == 0 && n >= 2 {
        reasons.push("condition B requires |S_ij| < 2m, unsatisfiable at m = 0".into());
    }
    for ((i, j), set) in &inst.s_sets {
        let ok = match inst.condition {
            Condition::A => set.len() <= s_cap,
            Condition::B => set.len() < s_cap,
        };
        if !ok {
            reasons.push(format!(
                "|S_({i},{j})| = {} violates condition {}",
                set.len(),
                inst.condition
            ));
        }
    }
    let threshold = prime_threshold(theorem, n, k, m);
    if (p as i64) <= threshold {
        reasons.push(format!("p = {p} does not exceed the threshold {threshold}"));
    }
    if inst.restriction.kind() != theorem.restriction_kind() {
        reasons.push(format!(
            "restriction {:?} does not match the theorem's {:?}",
            inst.restriction.kind(),
            theorem.restriction_kind()
        ));
    }
    if let Some(sum) = inst.restriction.form_sum(p) {
        if sum == 0 {
            reasons.push("form sum is 0 in F_p".into());
        }
    }
}

fn certificate_path(
    inst: &SumsetInstance,
    theorem: TheoremId,
) -> (Option<CNCertificate>, Option<String>) {
    let b = inst.budget();
    if b < 0 {
        return (None, Some("budget b = k - 1 - m(n-1) is negative".into()));
    }
    let nb = inst.n as i64 * b;
    if nb < theorem.form_degree() as i64 {
        return (None, Some(format!("n*b = {nb} is below the form degree")));
    }
    let poly = match build_restriction_poly(inst) {
        Ok(poly) => poly,
        Err(e) => return (None, Some(format!("restriction polynomial unavailable: {e}"))),
    };
    if poly.is_zero() {
        return (None, Some("restriction polynomial is zero".into()));
    }
    let sets = match GridSets::new(inst.p, inst.a_sets.clone()) {
        Ok(s) => s,
        Err(e) => return (None, Some(e.to_string())),
    };
    match anr_lower_bound(&poly, &sets) {
        Ok(Some(cert)) => (Some(cert), None),
        Ok(None) => (None, Some("key coefficient vanishes mod p".into())),
        Err(e) => (None, Some(e.to_string())),
    }
}

fn closed_form_h(
    inst: &SumsetInstance,
    theorem: TheoremId,
) -> (Option<String>, Option<bool>, Option<u64>) {
    let b = inst.budget();
    if b < 0 {
        return (None, None, None);
    }
    let params = MorrisParams::new(inst.n, inst.m, b as u32);
    let form_sum = BigInt::from(inst.restriction.form_sum(inst.p).unwrap_or(1));
    match theorem_h(theorem, &params, &form_sum) {
        Ok(h) => {
            let integral = h.as_integer().is_some();
            let residue = h.residue_mod(inst.p);
            (Some(h.to_string()), Some(integral), residue)
        }
        Err(_) => (None, None, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_spot_values() {
        assert_eq!(theorem_bound(TheoremId::T1_3, 2, 3, 0), 5);
        assert_eq!(theorem_bound(TheoremId::T1_5, 2, 2, 0), 2);
        assert_eq!(theorem_bound(TheoremId::T1_6, 2, 2, 0), 1);
        assert_eq!(theorem_bound(TheoremId::T1_7p, 2, 2, 0), 1);
    }

    #[test]
    fn thresholds_spot_values() {
        assert_eq!(prime_threshold(TheoremId::T1_3, 2, 3, 0), 4);
        assert_eq!(prime_threshold(TheoremId::T1_5, 2, 3, 1), 2);
        assert_eq!(prime_threshold(TheoremId::T1_3, 2, 1, 0), 0);
        assert_eq!(smallest_admissible_prime(TheoremId::T1_3, 2, 3, 0), 5);
    }

    fn plain_instance(p: u64, a: Vec<Vec<u64>>, k: u32) -> SumsetInstance {
        let n = a.len() as u32;
        SumsetInstance::new(p, n, k, 0, Condition::A, a, vec![], Restriction::None, None).unwrap()
    }

    #[test]
    fn enumerate_unrestricted_progressions() {
        let inst = plain_instance(7, vec![vec![0, 1, 2], vec![0, 1, 2]], 3);
        let c = enumerate_c(&inst);
        assert_eq!(c, BTreeSet::from([0, 1, 2, 3, 4]));
    }

    #[test]
    fn enumerate_linear_restriction() {
        let inst = SumsetInstance::new(
            5,
            2,
            2,
            0,
            Condition::A,
            vec![vec![0, 1], vec![0, 1]],
            vec![],
            Restriction::Linear { t: vec![1], alpha: vec![1] },
            None,
        )
        .unwrap();
        let c = enumerate_c(&inst);
        assert_eq!(c, BTreeSet::from([1, 2]));
    }

    #[test]
    fn enumerate_difference_avoidance() {
        // S_12 = {0} forbids a_1 = a_2
        let inst = SumsetInstance::new(
            5,
            2,
            2,
            1,
            Condition::A,
            vec![vec![0, 1], vec![0, 1]],
            vec![(1, 2, vec![0])],
            Restriction::None,
            None,
        )
        .unwrap();
        let c = enumerate_c(&inst);
        assert_eq!(c, BTreeSet::from([1]));
    }

    #[test]
    fn ordered_pairs_fold_into_unordered() {
        // A constraint on a_2 - a_1 folds into the (1,2) set negated.
        let inst = SumsetInstance::new(
            7,
            2,
            2,
            1,
            Condition::A,
            vec![vec![0, 1], vec![0, 1]],
            vec![(2, 1, vec![1])],
            Restriction::None,
            None,
        )
        .unwrap();
        assert_eq!(inst.s_for(1, 2), &[6]);
        // (a_1, a_2) = (0, 1) has a_1 - a_2 = 6, forbidden.
        let c = enumerate_c(&inst);
        assert_eq!(c, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn gen_is_deterministic() {
        let a = gen_instance(42, TheoremId::T1_5, 11, 3, 3, 1).unwrap();
        let b = gen_instance(42, TheoremId::T1_5, 11, 3, 3, 1).unwrap();
        assert_eq!(a, b);
        let c = gen_instance(43, TheoremId::T1_5, 11, 3, 3, 1).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gen_enforces_nonzero_form_sum() {
        for seed in 0..20 {
            let inst = gen_instance(seed, TheoremId::T1_5, 7, 2, 3, 1).unwrap();
            assert_ne!(inst.restriction.form_sum(7), Some(0));
        }
    }

    #[test]
    fn gen_staircase_sizes() {
        let inst = gen_instance(7, TheoremId::T1_5p, 11, 2, 3, 1).unwrap();
        assert_eq!(inst.a_sets[0].len(), 2);
        assert_eq!(inst.a_sets[1].len(), 3);
        // Condition B keeps |S| < 2m
        for (_, s) in &inst.s_sets {
            assert!(s.len() < 2);
        }
    }

    #[test]
    fn gen_infeasible_cases() {
        assert!(gen_instance(0, TheoremId::T1_5p, 11, 3, 2, 1).is_err()); // k < n
        assert!(gen_instance(0, TheoremId::T1_4, 11, 2, 3, 0).is_err()); // m = 0 under B
        assert!(gen_instance(0, TheoremId::T1_3, 5, 2, 6, 0).is_err()); // k > p
        assert!(gen_instance(0, TheoremId::T1_3, 6, 2, 3, 0).is_err()); // composite p
    }

    #[test]
    fn verify_spot_t1_3() {
        let inst = plain_instance(7, vec![vec![0, 1, 2], vec![0, 1, 2]], 3);
        let report = verify(&inst, TheoremId::T1_3, false).unwrap();
        assert!(report.hypotheses_ok, "{:?}", report.reasons);
        assert_eq!(report.bound, 5);
        assert_eq!(report.cardinality, Some(5));
        assert!(report.passed);
    }

    #[test]
    fn verify_spot_t1_5_tiny_field() {
        let inst = SumsetInstance::new(
            2,
            2,
            2,
            0,
            Condition::A,
            vec![vec![0, 1], vec![0, 1]],
            vec![],
            Restriction::Linear { t: vec![1], alpha: vec![1] },
            None,
        )
        .unwrap();
        let report = verify(&inst, TheoremId::T1_5, false).unwrap();
        assert!(report.hypotheses_ok, "{:?}", report.reasons);
        assert_eq!(report.bound, 2);
        assert_eq!(report.cardinality, Some(2));
        assert!(report.passed);
    }

    #[test]
    fn verify_reports_hypothesis_failure() {
        // p = 3 is at most the threshold 4 for these parameters.
        let inst = plain_instance(3, vec![vec![0, 1, 2], vec![0, 1, 2]], 3);
        let report = verify(&inst, TheoremId::T1_3, false).unwrap();
        assert!(!report.hypotheses_ok);
        assert!(!report.passed);
        assert!(report.cardinality.is_some(), "enumeration still reported");
    }

    #[test]
    fn verify_rejects_condition_mismatch() {
        let inst = plain_instance(7, vec![vec![0, 1, 2], vec![0, 1, 2]], 3);
        assert!(matches!(
            verify(&inst, TheoremId::T1_4, false),
            Err(SumsetError::ConditionMismatch { .. })
        ));
    }

    #[test]
    fn verify_trivial_bound_skips_enumeration() {
        // k - 1 < m(n - 1) makes the bound nonpositive.
        let inst = SumsetInstance::new(
            11,
            2,
            1,
            2,
            Condition::A,
            vec![vec![3], vec![5]],
            vec![],
            Restriction::None,
            None,
        )
        .unwrap();
        let report = verify(&inst, TheoremId::T1_3, false).unwrap();
        assert!(report.trivial);
        assert_eq!(report.cardinality, None);
        let forced = verify(&inst, TheoremId::T1_3, true).unwrap();
        assert_eq!(forced.cardinality, Some(1));
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = gen_instance(5, TheoremId::T1_7, 11, 3, 3, 1).unwrap();
        let v = inst.to_json();
        let back = SumsetInstance::from_json(&v).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn monotonicity_dropping_restrictions() {
        let base = gen_instance(9, TheoremId::T1_5, 11, 2, 3, 1).unwrap();
        let with = enumerate_c(&base).len();
        let mut relaxed = base.clone();
        relaxed.s_sets.clear();
        relaxed.restriction = Restriction::None;
        let without = enumerate_c(&relaxed).len();
        assert!(without >= with);
    }

    #[test]
    fn cardinality_capped_by_p() {
        let inst = plain_instance(5, vec![(0..5).collect(), (0..5).collect()], 5);
        assert!(enumerate_c(&inst).len() <= 5);
    }
}
