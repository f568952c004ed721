#!/usr/bin/env python3
"""High-precision oracle for the risk-bound equations.

Solves the bound equations with exact integer binomial coefficients and
mpmath multiprecision bisection, then prints frozen golden values as Rust
constants. Regenerate with:

    python3 tools/oracle_bounds.py > crates/itercert-core/tests/common/goldens.rs

The production crate never runs this; tests compare against the printed
constants.
"""

import math
from mpmath import mp, mpf

mp.dps = 60

BISECT_STEPS = 130  # bracket width shrinks to ~1e-39 of the start


def bisect(f, lo, hi, steps=BISECT_STEPS):
    flo = f(lo)
    fhi = f(hi)
    assert flo * fhi < 0, f"no sign change on [{lo}, {hi}]: {flo} {fhi}"
    for _ in range(steps):
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def posteriori_coeffs(n, q):
    """Integer coefficients of (1/N)*sum_{m=q}^{N-1} C(m,q) t^(m-q)."""
    coeffs = []
    c = 1  # C(q, q)
    for m in range(q, n):
        coeffs.append(c)
        c = c * (m + 1) // (m + 1 - q)
    return coeffs, c  # c == C(n, q)


def posteriori_root(n, beta, q):
    """Unique root in (0,1) of (beta/N) sum C(m,q) t^(m-q) = C(N,q) t^(N-q)."""
    coeffs, lead = posteriori_coeffs(n, q)
    beta = mpf(beta)
    lead = mpf(lead)

    def g(t):
        acc = mpf(0)
        for c in reversed(coeffs):
            acc = acc * t + c
        return beta / n * acc - lead * t ** (n - q)

    return bisect(g, mpf("1e-40"), mpf(1) - mpf("1e-40"))


def interval_g(n, q, beta):
    """Two-sided equation value at t (q < N)."""
    beta = mpf(beta)
    coeffs = []
    c = 1  # C(q, q)
    for i in range(q, 4 * n + 1):
        if i < n:
            coeffs.append(-beta / (2 * n) * c)
        elif i == n:
            coeffs.append(mpf(c))
        else:
            coeffs.append(-beta / (6 * n) * c)
        c = c * (i + 1) // (i + 1 - q)

    def g(t):
        acc = mpf(0)
        for cf in reversed(coeffs):
            acc = acc * t + cf
        return acc

    return g


def interval_roots(n, beta, q):
    """The two nonnegative roots (t_lower <= t_upper) for q < N."""
    g = interval_g(n, q, beta)
    # scan for a positive point
    t = mpf("1e-8")
    prev = t
    while g(t) <= 0:
        prev = t
        t *= mpf("1.05")
        assert t < mpf("1e9"), f"no positive point for N={n} q={q}"
    t_lower = bisect(g, prev, t)
    hi = t
    while g(hi) > 0:
        hi *= mpf("1.5")
    t_upper = bisect(g, t, hi)
    return t_lower, t_upper


def interval_upper_root_full_q(n, beta):
    """Single root of the q = N variant: 1 = (beta/6N) sum C(i,N) t^(i-N)."""
    beta = mpf(beta)
    coeffs = []
    c = n + 1  # C(N+1, N)
    for i in range(n + 1, 4 * n + 1):
        coeffs.append(c)
        c = c * (i + 1) // (i + 1 - n)

    def g(t):
        acc = mpf(0)
        for cf in reversed(coeffs):
            acc = acc * t + cf
        return 1 - beta / (6 * n) * acc * t  # lowest degree is 1

    lo = mpf("1e-12")
    hi = lo
    while g(hi) > 0:
        hi *= mpf(2)
    return bisect(g, lo, hi)


def binomial_tail_root(n, beta, k):
    """epsilon with sum_{i=0}^{k} C(N,i) e^i (1-e)^(N-i) = beta."""
    beta = mpf(beta)
    combs = [math.comb(n, i) for i in range(k + 1)]

    def g(e):
        acc = mpf(0)
        for i, c in enumerate(combs):
            acc += c * e**i * (1 - e) ** (n - i)
        return acc - beta

    return bisect(g, mpf("1e-40"), mpf(1) - mpf("1e-40"))


def rust(x, digits=22):
    return mp.nstr(mpf(x), digits, strip_zeros=False)


def main():
    print("// Golden values frozen from tools/oracle_bounds.py (mpmath, 60 digits).")
    print("// Regenerate with: python3 tools/oracle_bounds.py > .../common/goldens.rs")
    print("#![allow(clippy::excessive_precision)]")
    print()

    n, beta = 1000, 1e-4
    eps2 = {}
    rows = []
    for q in range(1, 101):
        t2 = posteriori_root(n, beta, q)
        e2 = 1 - t2
        eps2[q] = e2
        tl, tu = interval_roots(n, beta, q)
        e3u = 1 - tl
        gap = abs(e3u - e2) / e2
        rows.append((q, e2, e3u, gap))

    print("/// (q, eps2(q), eps3_upper(q), |eps3_upper - eps2| / eps2)")
    print("/// at N = 1000, beta = 1e-4.")
    print("pub const UPPER_GAP_N1000_BETA1E4: [(usize, f64, f64, f64); 100] = [")
    for q, e2, e3u, gap in rows:
        print(f"    ({q}, {rust(e2)}, {rust(e3u)}, {rust(gap)}),")
    print("];")
    print()

    t0 = posteriori_root(1000, 1e-4, 0)
    print("/// t(0) and eps(0) of the a-posteriori equation at N=1000, beta=1e-4.")
    print(f"pub const POSTERIORI_N1000_BETA1E4_Q0: (f64, f64) = ({rust(t0)}, {rust(1 - t0)});")
    print()

    spots = [(50, 0.05, 5), (50, 0.05, 49), (200, 1e-4, 10), (200, 0.05, 40), (1000, 0.05, 100)]
    print("/// (n, beta, q, eps(q)) spot values of the a-posteriori bound.")
    print(f"pub const POSTERIORI_SPOTS: [(usize, f64, usize, f64); {len(spots)}] = [")
    for sn, sb, sq in spots:
        e = 1 - posteriori_root(sn, sb, sq)
        print(f"    ({sn}, {rust(sb, 17)}, {sq}, {rust(e)}),")
    print("];")
    print()

    tl, tu = interval_roots(1000, 1e-4, 1)
    print("/// (t_lower, t_upper, eps_lower, eps_upper) of the two-sided bound")
    print("/// at N=1000, beta=1e-4, q=1.")
    print("pub const INTERVAL_N1000_BETA1E4_Q1: (f64, f64, f64, f64) =")
    el = max(mpf(0), 1 - tu)
    print(f"    ({rust(tl)}, {rust(tu)}, {rust(el)}, {rust(1 - tl)});")
    print()

    spots = [(50, 0.05, 0), (50, 0.05, 20), (200, 1e-4, 10), (100, 0.05, 30)]
    print("/// (n, beta, q, t_lower, t_upper) spot roots of the two-sided bound.")
    print(f"pub const INTERVAL_SPOTS: [(usize, f64, usize, f64, f64); {len(spots)}] = [")
    for sn, sb, sq in spots:
        tl, tu = interval_roots(sn, sb, sq)
        print(f"    ({sn}, {rust(sb, 17)}, {sq}, {rust(tl)}, {rust(tu)}),")
    print("];")
    print()

    tbar = interval_upper_root_full_q(100, 0.05)
    el = max(mpf(0), 1 - tbar)
    print("/// Full-complexity variant at N=100, beta=0.05: (t_upper, eps_lower).")
    print(f"pub const INTERVAL_FULL_Q_N100: (f64, f64) = ({rust(tbar)}, {rust(el)});")
    print()

    e = binomial_tail_root(1000, 1e-4, 50)
    print("/// Inverse binomial tail at N=1000, beta=1e-4, k=50.")
    print(f"pub const TESTSET_N1000_BETA1E4_K50: f64 = {rust(e)};")
    print()

    e = binomial_tail_root(100, 0.05, 2)
    print("/// Inverse binomial tail at N=100, beta=0.05, d=3 (k=2).")
    print(f"pub const BINOMIAL_N100_BETA005_D3: f64 = {rust(e)};")


if __name__ == "__main__":
    main()
