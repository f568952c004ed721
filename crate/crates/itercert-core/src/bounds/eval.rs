//! Log-domain evaluation of the polynomial sums behind the bound equations.
//!
//! Every sum is normalized by its leading binomial coefficient before
//! evaluation; coefficients are kept as natural logs built from running
//! ratio recurrences (no factorials are ever formed), and sums are taken
//! as streaming log-sum-exp. This keeps every intermediate magnitude
//! representable for sample counts up to at least `10^5`.

use alloc::vec::Vec;

use crate::math;

/// Terms below `max - EXP_CUTOFF` are dropped from a log-sum-exp; with at
/// most ~4e5 terms they contribute less than 1e-14 relative mass.
const EXP_CUTOFF: f64 = 46.0;

/// A run of consecutive-degree monomials `exp(log_coeffs[j]) * t^(start_degree + j)`.
pub(super) struct PolyTerms {
    start_degree: u64,
    log_coeffs: Vec<f64>,
}

impl PolyTerms {
    pub(super) fn is_empty(&self) -> bool {
        self.log_coeffs.is_empty()
    }

    fn max_log(&self, ln_t: f64) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for (j, &c) in self.log_coeffs.iter().enumerate() {
            let term = c + (self.start_degree + j as u64) as f64 * ln_t;
            if term > m {
                m = term;
            }
        }
        m
    }

    fn sum_scaled(&self, ln_t: f64, scale: f64) -> f64 {
        let mut s = 0.0;
        for (j, &c) in self.log_coeffs.iter().enumerate() {
            let term = c + (self.start_degree + j as u64) as f64 * ln_t;
            if term > scale - EXP_CUTOFF {
                s += math::exp(term - scale);
            }
        }
        s
    }
}

/// `ln Σ exp` over the union of several term runs at the point `ln t`.
pub(super) fn log_sum(series: &[&PolyTerms], ln_t: f64) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for s in series {
        let sm = s.max_log(ln_t);
        if sm > m {
            m = sm;
        }
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for s in series {
        acc += s.sum_scaled(ln_t, m);
    }
    m + math::ln(acc)
}

/// Coefficients of the a-posteriori equation's sum side:
/// `ln [ (β/N) · C(m,q)/C(N,q) ]` for `m = q..N-1` (degree `m - q`).
///
/// The normalized equation solved for `t` is
/// `(β/N) Σ_{m=q}^{N-1} [C(m,q)/C(N,q)] t^{m-q}  =  t^{N-q}`.
pub(super) fn posteriori_terms(n: usize, q: usize, beta: f64) -> PolyTerms {
    debug_assert!(q < n);
    let mut raw = Vec::with_capacity(n - q);
    let mut ln_c = 0.0; // ln C(m, q), starting at m = q
    for m in q..n {
        raw.push(ln_c);
        ln_c += math::ln((m + 1) as f64 / (m + 1 - q) as f64);
    }
    let ln_c_nq = ln_c;
    let offset = math::ln(beta / n as f64) - ln_c_nq;
    for v in &mut raw {
        *v += offset;
    }
    PolyTerms { start_degree: 0, log_coeffs: raw }
}

/// Both negative-side sums of the two-sided interval equation, normalized by
/// `C(N,q)`:
///
/// `t^{N-q}  =  (β/(2N)) Σ_{i=q}^{N-1} [C(i,q)/C(N,q)] t^{i-q}
///            + (β/(6N)) Σ_{i=N+1}^{4N} [C(i,q)/C(N,q)] t^{i-q}`.
///
/// For `q = N` the first sum is empty and the left side degenerates to the
/// constant 1, which is exactly the single-root variant of the equation.
pub(super) fn interval_terms(n: usize, q: usize, beta: f64) -> (PolyTerms, PolyTerms) {
    debug_assert!(q <= n);
    let mut low = Vec::with_capacity(n - q);
    let mut high = Vec::with_capacity(3 * n);
    let mut ln_c = 0.0; // ln C(m, q) along m = q..=4N
    let mut ln_c_nq = 0.0;
    for m in q..=4 * n {
        if m < n {
            low.push(ln_c);
        } else if m == n {
            ln_c_nq = ln_c;
        } else {
            high.push(ln_c);
        }
        ln_c += math::ln((m + 1) as f64 / (m + 1 - q) as f64);
    }
    let off_low = math::ln(beta / (2.0 * n as f64)) - ln_c_nq;
    for v in &mut low {
        *v += off_low;
    }
    let off_high = math::ln(beta / (6.0 * n as f64)) - ln_c_nq;
    for v in &mut high {
        *v += off_high;
    }
    (
        PolyTerms { start_degree: 0, log_coeffs: low },
        PolyTerms { start_degree: (n + 1 - q) as u64, log_coeffs: high },
    )
}

/// Log of the binomial lower tail `Σ_{i=0}^{k} C(N,i) ε^i (1-ε)^{N-i}`.
pub(super) struct BinomialTail {
    n: u64,
    log_coeffs: Vec<f64>, // ln C(N, i), i = 0..=k
}

impl BinomialTail {
    pub(super) fn new(n: usize, k: usize) -> Self {
        debug_assert!(k < n);
        let mut log_coeffs = Vec::with_capacity(k + 1);
        let mut ln_c = 0.0;
        for i in 0..=k {
            log_coeffs.push(ln_c);
            ln_c += math::ln((n - i) as f64 / (i + 1) as f64);
        }
        Self { n: n as u64, log_coeffs }
    }

    /// `ln` of the tail at violation probability `eps`, `eps` strictly
    /// inside `(0, 1)`.
    pub(super) fn log_eval(&self, eps: f64) -> f64 {
        let ln_e = math::ln(eps);
        let ln_1me = math::ln_1p(-eps);
        let mut m = f64::NEG_INFINITY;
        let term = |i: usize, c: f64| c + i as f64 * ln_e + (self.n - i as u64) as f64 * ln_1me;
        for (i, &c) in self.log_coeffs.iter().enumerate() {
            let v = term(i, c);
            if v > m {
                m = v;
            }
        }
        let mut acc = 0.0;
        for (i, &c) in self.log_coeffs.iter().enumerate() {
            let v = term(i, c);
            if v > m - EXP_CUTOFF {
                acc += math::exp(v - m);
            }
        }
        m + math::ln(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_poly(coeffs: &[f64], start: u64, t: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| math::exp(c) * math::powi(t, start + j as u64))
            .sum()
    }

    #[test]
    fn log_sum_matches_direct_evaluation() {
        let terms = posteriori_terms(30, 4, 0.05);
        for &t in &[0.1, 0.5, 0.9, 0.99] {
            let direct = direct_poly(&terms.log_coeffs, terms.start_degree, t);
            let via_log = math::exp(log_sum(&[&terms], math::ln(t)));
            assert!(
                (direct - via_log).abs() <= 1e-12 * direct.abs(),
                "t={t}: {direct} vs {via_log}"
            );
        }
    }

    #[test]
    fn binomial_tail_matches_direct_sum() {
        let tail = BinomialTail::new(20, 3);
        for &eps in &[0.01, 0.2, 0.7] {
            let mut direct = 0.0;
            let mut c = 1.0;
            for i in 0..=3usize {
                direct += c * math::powi(eps, i as u64) * math::powi(1.0 - eps, (20 - i) as u64);
                c *= (20 - i) as f64 / (i + 1) as f64;
            }
            let via_log = math::exp(tail.log_eval(eps));
            assert!(
                (direct - via_log).abs() <= 1e-13,
                "eps={eps}: {direct} vs {via_log}"
            );
        }
    }

    #[test]
    fn interval_terms_split_at_the_leading_degree() {
        let (low, high) = interval_terms(10, 2, 0.05);
        assert_eq!(low.log_coeffs.len(), 8); // i = 2..=9
        assert_eq!(high.log_coeffs.len(), 30); // i = 11..=40
        assert_eq!(high.start_degree, 9);
        let (low_n, _) = interval_terms(10, 10, 0.05);
        assert!(low_n.is_empty());
    }
}
