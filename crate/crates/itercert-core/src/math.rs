//! Float helpers routed through `libm` so results are identical with and
//! without `std`.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `x^n` by binary exponentiation; avoids `std`-only `f64::powi`.
#[cfg(test)]
pub(crate) fn powi(x: f64, n: u64) -> f64 {
    let mut base = x;
    let mut n = n;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_std() {
        for &(x, n) in &[(0.5, 7u64), (1.3, 12), (0.999, 1000), (2.0, 52)] {
            let got = powi(x, n);
            let want = x.powi(n as i32);
            assert!((got - want).abs() <= 1e-14 * want.abs(), "{x}^{n}: {got} vs {want}");
        }
        assert_eq!(powi(3.7, 0), 1.0);
    }
}
