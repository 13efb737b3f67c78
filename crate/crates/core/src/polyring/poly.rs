//! Sparse multivariate polynomials over an exact coefficient ring.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use super::factorial::multinomial;
use super::primes::{mul_mod, pow_mod};
use super::{Coefficient, PolyError, RingTag};

/// An exponent vector. Its length must equal the arity of the polynomial
/// it is used with; the polynomial operations enforce this.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Total degree (sum of exponents).
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Monomial) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Graded-lexicographic comparison: first by total degree, then by the
    /// exponent vector lexicographically.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Componentwise exponent bound used to discard terms during truncated
/// products. A cap never alters coefficients of the terms it keeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentCap(pub Vec<u32>);

impl ExponentCap {
    /// A cap that keeps everything.
    pub fn unbounded(arity: usize) -> Self {
        ExponentCap(vec![u32::MAX; arity])
    }

    /// The cap matching a target monomial: exactly the terms that can still
    /// contribute to that coefficient survive.
    pub fn at(target: &Monomial) -> Self {
        ExponentCap(target.0.clone())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn allows(&self, m: &Monomial) -> bool {
        m.0.iter().zip(&self.0).all(|(e, c)| e <= c)
    }
}

/// Sparse multivariate polynomial: a map from exponent vectors to nonzero
/// coefficients, tagged with its arity and coefficient ring.
///
/// Invariants: no stored coefficient is zero, every stored monomial has
/// length equal to the arity, and all coefficients share the ring tag.
#[derive(Debug, Clone)]
pub struct SparsePoly {
    arity: usize,
    ring: RingTag,
    terms: HashMap<Monomial, Coefficient>,
}

impl PartialEq for SparsePoly {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for SparsePoly {}

impl SparsePoly {
    pub fn zero(arity: usize, ring: RingTag) -> Self {
        SparsePoly { arity, ring, terms: HashMap::new() }
    }

    pub fn one(arity: usize, ring: RingTag) -> Self {
        Self::constant(arity, ring.one(), ring)
    }

    pub fn constant(arity: usize, c: Coefficient, ring: RingTag) -> Self {
        let mut poly = Self::zero(arity, ring);
        poly.insert(Monomial(vec![0; arity]), c);
        poly
    }

    /// The variable `x_{index}` (0-based index).
    pub fn variable(arity: usize, ring: RingTag, index: usize) -> Self {
        assert!(index < arity, "variable index out of range");
        let mut exps = vec![0u32; arity];
        exps[index] = 1;
        let mut poly = Self::zero(arity, ring);
        poly.insert(Monomial(exps), ring.one());
        poly
    }

    /// Builds a polynomial from (exponents, coefficient) pairs, summing
    /// duplicates and dropping zeros.
    pub fn from_terms(
        arity: usize,
        ring: RingTag,
        terms: impl IntoIterator<Item = (Vec<u32>, Coefficient)>,
    ) -> Result<Self, PolyError> {
        let mut poly = Self::zero(arity, ring);
        for (exps, c) in terms {
            if exps.len() != arity {
                return Err(PolyError::ArityMismatch(exps.len(), arity));
            }
            if c.ring() != ring {
                return Err(PolyError::RingMismatch(c.ring(), ring));
            }
            poly.insert(Monomial(exps), c);
        }
        Ok(poly)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Iterates over the stored (monomial, coefficient) pairs in arbitrary
    /// map order. Use [`SparsePoly::sorted_terms`] for the canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    /// Terms in descending graded-lexicographic order (canonical).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Coefficient)> {
        let mut out: Vec<_> = self.terms.iter().collect();
        out.sort_by(|(a, _), (b, _)| b.grlex_cmp(a));
        out
    }

    /// Adds a term in place, removing the entry if the sum vanishes.
    fn insert(&mut self, m: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.arity(), self.arity);
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check_compatible(&self, other: &SparsePoly) -> Result<(), PolyError> {
        if self.arity != other.arity {
            return Err(PolyError::ArityMismatch(self.arity, other.arity));
        }
        if self.ring != other.ring {
            return Err(PolyError::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    /// Termwise sum; cancelled terms are removed.
    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> SparsePoly {
        let mut out = SparsePoly::zero(self.arity, self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.add(&other.neg())
    }

    /// Distributive product; zero coefficients are removed.
    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.truncated_mul(other, &ExponentCap::unbounded(self.arity))
    }

    /// Product truncated by `cap`: every result term with some exponent
    /// exceeding its cap is discarded. For any target `t <= cap`
    /// (componentwise) the coefficient of `t` equals the untruncated one.
    pub fn truncated_mul(
        &self,
        other: &SparsePoly,
        cap: &ExponentCap,
    ) -> Result<SparsePoly, PolyError> {
        self.check_compatible(other)?;
        if cap.arity() != self.arity {
            return Err(PolyError::ArityMismatch(cap.arity(), self.arity));
        }
        let mut out = SparsePoly::zero(self.arity, self.ring);
        for (ma, ca) in &self.terms {
            'next_term: for (mb, cb) in &other.terms {
                let mut exps = Vec::with_capacity(self.arity);
                for ((&ea, &eb), &cap_e) in ma.0.iter().zip(&mb.0).zip(&cap.0) {
                    let e = ea.checked_add(eb).expect("exponent overflow");
                    if e > cap_e {
                        continue 'next_term;
                    }
                    exps.push(e);
                }
                out.insert(Monomial(exps), ca.mul(cb));
            }
        }
        Ok(out)
    }

    /// `self^e` by binary exponentiation, truncating every intermediate
    /// product by `cap`. Truncation is sound here because exponents only
    /// grow along a product, so a discarded term can never contribute to a
    /// kept one. `e = 0` gives the constant 1 (empty product).
    pub fn pow(&self, e: u32, cap: &ExponentCap) -> Result<SparsePoly, PolyError> {
        if cap.arity() != self.arity {
            return Err(PolyError::ArityMismatch(cap.arity(), self.arity));
        }
        let mut result = SparsePoly::one(self.arity, self.ring);
        if e == 0 {
            return Ok(result);
        }
        let mut base = {
            // Apply the cap to the base itself.
            let mut b = SparsePoly::zero(self.arity, self.ring);
            for (m, c) in &self.terms {
                if cap.allows(m) {
                    b.terms.insert(m.clone(), c.clone());
                }
            }
            b
        };
        let mut exp = e;
        loop {
            if exp & 1 == 1 {
                result = result.truncated_mul(&base, cap)?;
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            base = base.truncated_mul(&base, cap)?;
        }
        Ok(result)
    }

    /// The stored coefficient of `t`, or the ring zero.
    pub fn coeff(&self, t: &Monomial) -> Result<Coefficient, PolyError> {
        if t.arity() != self.arity {
            return Err(PolyError::ArityMismatch(t.arity(), self.arity));
        }
        Ok(self.terms.get(t).cloned().unwrap_or_else(|| self.ring.zero()))
    }

    /// Coefficient of `t` in `self * (x_1 + ... + x_n)^power`, computed by
    /// the multinomial theorem without expanding the power:
    ///
    /// `sum over stored terms s <= t with deg(t) - deg(s) = power of
    ///  coeff(s) * power! / prod((t_i - s_i)!)`.
    pub fn extract_with_power(&self, power: u32, t: &Monomial) -> Result<Coefficient, PolyError> {
        if t.arity() != self.arity {
            return Err(PolyError::ArityMismatch(t.arity(), self.arity));
        }
        let target_degree = t.degree();
        let mut acc = self.ring.zero();
        for (s, c) in &self.terms {
            if !s.le(t) {
                continue;
            }
            if s.degree() + power as u64 != target_degree {
                continue;
            }
            let gaps: Vec<u64> = t.0.iter().zip(&s.0).map(|(&ti, &si)| (ti - si) as u64).collect();
            let weight = multinomial(power as u64, &gaps);
            acc = acc.add(&c.mul_int(&weight));
        }
        Ok(acc)
    }

    /// Reduces an integer polynomial mod `p`, dropping vanishing terms.
    pub fn reduce_mod_p(&self, p: u64) -> Result<SparsePoly, PolyError> {
        if self.ring != RingTag::Integers {
            return Err(PolyError::WrongRing { expected: "Z", got: self.ring });
        }
        let field = RingTag::prime_field(p)?;
        let mut out = SparsePoly::zero(self.arity, field);
        for (m, c) in &self.terms {
            let Coefficient::Int(v) = c else { unreachable!() };
            out.insert(m.clone(), field.from_bigint(v));
        }
        Ok(out)
    }

    /// Exact evaluation of a prime-field polynomial at a point of residues.
    pub fn eval_fp(&self, point: &[u64]) -> Result<Coefficient, PolyError> {
        let RingTag::PrimeField(p) = self.ring else {
            return Err(PolyError::WrongRing { expected: "F_p", got: self.ring });
        };
        if point.len() != self.arity {
            return Err(PolyError::PointLength(point.len(), self.arity));
        }
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let Coefficient::Mod { value, .. } = c else { unreachable!() };
            let mut term = *value;
            for (&x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    term = mul_mod(term, pow_mod(x % p, e as u64, p), p);
                }
            }
            acc = (acc + term) % p;
        }
        Ok(Coefficient::Mod { value: acc, p })
    }

    /// The polynomial with variables `i` and `j` exchanged (0-based).
    pub fn swap_vars(&self, i: usize, j: usize) -> SparsePoly {
        assert!(i < self.arity && j < self.arity);
        let mut out = SparsePoly::zero(self.arity, self.ring);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.swap(i, j);
            out.terms.insert(Monomial(exps), c.clone());
        }
        out
    }

    /// Exact symmetry check: invariance under every adjacent transposition
    /// (which generate the full symmetric group).
    pub fn is_symmetric(&self) -> bool {
        (1..self.arity).all(|i| self.swap_vars(i - 1, i) == *self)
    }

    /// Scales every coefficient by an integer.
    pub fn scale_int(&self, scalar: &BigInt) -> SparsePoly {
        let mut out = SparsePoly::zero(self.arity, self.ring);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.mul_int(scalar));
        }
        out
    }
}

impl fmt::Display for SparsePoly {
    /// Canonical text form: terms in descending graded-lex order, each as
    /// `coeff * x1^e1 x2^e2 ...` with zero exponents omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.sorted_terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| format!("x{}^{}", i + 1, e))
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c} * {}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}

/// `x_1 + x_2 + ... + x_n`.
pub fn sum_of_vars(arity: usize, ring: RingTag) -> SparsePoly {
    let mut poly = SparsePoly::zero(arity, ring);
    for i in 0..arity {
        let mut exps = vec![0u32; arity];
        exps[i] = 1;
        poly.insert(Monomial(exps), ring.one());
    }
    poly
}

/// The Vandermonde power `prod_{1 <= i < j <= n} (x_i - x_j)^e`, truncated
/// by `cap`. With `n = 1` or `e = 0` this is the constant 1. The product is
/// antisymmetric under variable swaps for odd `e` and symmetric for even.
pub fn vandermonde_power(
    n: usize,
    e: u32,
    ring: RingTag,
    cap: &ExponentCap,
) -> Result<SparsePoly, PolyError> {
    if cap.arity() != n {
        return Err(PolyError::ArityMismatch(cap.arity(), n));
    }
    let mut acc = SparsePoly::one(n, ring);
    if e == 0 {
        return Ok(acc);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let xi = SparsePoly::variable(n, ring, i);
            let xj = SparsePoly::variable(n, ring, j);
            let factor = xi.sub(&xj).expect("same arity").pow(e, cap)?;
            acc = acc.truncated_mul(&factor, cap)?;
        }
    }
    Ok(acc)
}
