//! Log-space and exact combinatorial helpers.

use num_bigint::BigUint;
use num_traits::One;
use libm::lgamma as ln_gamma;

/// `ln C(n, k)` for real `n >= k >= 0`.
pub fn ln_binomial(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0.0 || k == n {
        return 0.0;
    }
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// `ln (n)_s = ln n(n-1)...(n-s+1)`.
pub fn ln_falling(n: f64, s: usize) -> f64 {
    if (s as f64) > n {
        return f64::NEG_INFINITY;
    }
    if s <= 32 {
        (0..s).map(|i| (n - i as f64).ln()).sum()
    } else {
        ln_gamma(n + 1.0) - ln_gamma(n - s as f64 + 1.0)
    }
}

/// `C(n, 2)` for small integers.
pub fn pairs(s: usize) -> usize {
    s * s.saturating_sub(1) / 2
}

/// Exact `C(n, k)` as a machine integer.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact `C(n, k)`.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(s: usize) -> u64 {
    (1..=s as u64).product()
}

/// `ln(Σ exp(x_i))` without overflow.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_agree() {
        for n in 0..60u64 {
            for k in 0..=n {
                let exact = binomial_u128(n, k);
                assert_eq!(binomial_big(n, k), BigUint::from(exact));
                let ln = ln_binomial(n as f64, k as f64);
                assert!((ln - (exact as f64).ln()).abs() < 1e-10 * (1.0 + ln.abs()), "{n} {k}");
            }
        }
        assert_eq!(binomial_u128(4096, 4), 11_710_951_848_960);
    }

    #[test]
    fn falling_factorial() {
        assert!((ln_falling(10.0, 3) - 720f64.ln()).abs() < 1e-12);
        assert!((ln_falling(1e6, 100) - (0..100).map(|i| (1e6 - i as f64).ln()).sum::<f64>()).abs() < 1e-6);
        assert_eq!(ln_falling(3.0, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn logsumexp() {
        assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp([]), f64::NEG_INFINITY);
    }
}
