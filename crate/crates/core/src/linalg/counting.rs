//! Exact q-analog counts.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Exact nonnegative count.
pub type BigCount = BigUint;

/// Gaussian binomial `[n choose k]_Q`; zero when `k > n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow(n - i) - 1u32;
        den *= q.pow(i + 1) - 1u32;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    quot
}

/// `|GL_n(Q)| = ∏_{j<n} (Q^n − Q^j)`.
pub fn gl_order(n: u32, q: u64) -> BigCount {
    let q = BigUint::from(q);
    let qn = q.pow(n);
    (0..n).fold(BigUint::one(), |acc, j| acc * (&qn - q.pow(j)))
}

/// `q^e` as a big integer.
pub fn big_pow(q: u64, e: u32) -> BigUint {
    BigUint::from(q).pow(e)
}

/// Signed Gaussian binomial: zero outside `0 ≤ k ≤ n`.
pub fn gaussian_binomial_signed(n: i64, k: i64, q: u64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    BigInt::from(gaussian_binomial(n as u32, k as u32, q))
}

pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    crate::field::prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

/// `C(n, 2)`.
pub fn choose2(n: i64) -> u32 {
    if n < 2 {
        0
    } else {
        (n * (n - 1) / 2) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(4, 2, 16), BigUint::from(70161u32));
        assert_eq!(gaussian_binomial(3, 5, 2), BigUint::zero());
        assert_eq!(gaussian_binomial(5, 0, 7), BigUint::one());
        assert_eq!(gl_order(4, 2), BigUint::from(20160u32));
        assert_eq!(gl_order(3, 2), BigUint::from(168u32));
    }

    #[test]
    fn totient() {
        assert_eq!(euler_phi(4), 2);
        assert_eq!(euler_phi(6), 2);
        assert_eq!(euler_phi(7), 6);
        assert_eq!(euler_phi(1), 1);
    }

    #[test]
    fn pascal_recurrence() {
        // [n,k] = [n-1,k-1] + Q^k [n-1,k]
        for q in [2u64, 3, 4] {
            for n in 1..7u32 {
                for k in 1..n {
                    let lhs = gaussian_binomial(n, k, q);
                    let rhs = gaussian_binomial(n - 1, k - 1, q)
                        + big_pow(q, k) * gaussian_binomial(n - 1, k, q);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
