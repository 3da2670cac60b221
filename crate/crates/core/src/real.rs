//! Scalar helpers backed by `libm`.

use crate::C64;

pub const PI: f64 = core::f64::consts::PI;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// `ln(1 + e^x)` without overflow.
pub fn ln_1p_exp(x: f64) -> f64 {
    if x > 35.0 {
        x + exp(-x)
    } else if x < -35.0 {
        exp(x)
    } else {
        ln_1p(exp(x))
    }
}

/// Logistic function `e^x / (1 + e^x)`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}

/// Inverse of [`logistic`].
pub fn logit(x: f64) -> f64 {
    ln(x) - ln_1p(-x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln n!`, exact summation for small `n`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 32 {
        let mut acc = 0.0;
        for j in 2..=n {
            acc += ln(j as f64);
        }
        acc
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

pub fn factorial(n: usize) -> f64 {
    let mut acc = 1.0;
    for j in 2..=n {
        acc *= j as f64;
    }
    acc
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `ln Σ e^{x_i}`; `-∞` for an empty or all `-∞` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| exp(x - m)).sum();
    m + ln(s)
}

/// `z^m` by repeated squaring.
pub fn cpowi(z: C64, mut m: u32) -> C64 {
    let mut base = z;
    let mut acc = C64::new(1.0, 0.0);
    while m > 0 {
        if m & 1 == 1 {
            acc *= base;
        }
        base *= base;
        m >>= 1;
    }
    acc
}

#[inline]
pub fn cexp(z: C64) -> C64 {
    let r = exp(z.re);
    C64::new(r * cos(z.im), r * sin(z.im))
}

#[inline]
pub fn cabs(z: C64) -> f64 {
    hypot(z.re, z.im)
}

/// Principal logarithm.
#[inline]
pub fn cln(z: C64) -> C64 {
    C64::new(ln(cabs(z)), atan2(z.im, z.re))
}

/// Unit complex number `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(cos(theta), sin(theta))
}

/// `|ζ|² = Σ |ζ_i|²`.
pub fn norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// Hermitian inner product `Σ x_i ȳ_i`.
pub fn hdot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(66, 2), Some(2145));
        assert_eq!(binomial(5, 0), Some(1));
        assert_eq!(binomial(5, 5), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(200, 100), None);
    }

    #[test]
    fn logistic_roundtrip() {
        for &x in &[-30.0, -2.0, 0.0, 0.3, 12.0] {
            assert!((logit(logistic(x)) - x).abs() < 1e-9 * (1.0 + x.abs()));
        }
        assert!((ln_1p_exp(0.0) - ln(2.0)).abs() < 1e-15);
        assert!((ln_1p_exp(50.0) - 50.0).abs() < 1e-15);
    }

    #[test]
    fn lse_handles_extremes() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - 1000.0 - ln(2.0)).abs() < 1e-12);
    }

    #[test]
    fn factorials_agree() {
        for n in [0usize, 1, 5, 31, 32, 40] {
            assert!((ln_factorial(n) - ln(factorial(n))).abs() < 1e-12 * (1.0 + ln(factorial(n))));
        }
    }
}
