//! Memoized arbitrary-precision factorials and multinomial coefficients.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;

static FACTORIALS: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());

/// `n!` as a `BigInt`, from a process-wide memo table.
///
/// The table is grown under a mutex; concurrent callers always observe
/// value-identical results.
pub fn factorial(n: u64) -> BigInt {
    let n = n as usize;
    let mut table = FACTORIALS.lock().expect("factorial table poisoned");
    if table.is_empty() {
        table.push(BigInt::one());
    }
    while table.len() <= n {
        let next = table.last().unwrap() * BigInt::from(table.len());
        table.push(next);
    }
    table[n].clone()
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::ZERO;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Multinomial coefficient `total! / (parts[0]! * ... * parts[m]!)`.
///
/// Requires `sum(parts) == total`; the division is exact.
pub fn multinomial(total: u64, parts: &[u64]) -> BigInt {
    debug_assert_eq!(parts.iter().sum::<u64>(), total);
    let mut denom = BigInt::one();
    for &p in parts {
        denom *= factorial(p);
    }
    factorial(total) / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(1), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(20), BigInt::from(2_432_902_008_176_640_000u64));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(10, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::ZERO);
    }

    #[test]
    fn multinomials() {
        // 4!/(2!2!) = 6
        assert_eq!(multinomial(4, &[2, 2]), BigInt::from(6));
        // 6!/(1!2!3!) = 60
        assert_eq!(multinomial(6, &[1, 2, 3]), BigInt::from(60));
        assert_eq!(multinomial(0, &[0, 0]), BigInt::from(1));
    }

    #[test]
    fn memo_table_is_safe_to_share() {
        let handles: Vec<_> = (0..8)
            .map(|i| std::thread::spawn(move || factorial(150 + i % 3)))
            .collect();
        let results: Vec<BigInt> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (i, r) in results.iter().enumerate() {
            assert_eq!(*r, factorial(150 + i as u64 % 3));
        }
    }
}
