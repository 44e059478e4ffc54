#!/usr/bin/env python3
"""Reference eta(0) for the reactive-scale profile by high-precision shooting.

Integrates eta'' = (2 kappa z eta + eta^2)^n, eta(0) = rho, eta'(0) = -kappa
with a Taylor-series method at 50 digits and bisects on rho until the bracket
is below --width. A shot that crosses zero is low, one that turns upward is high.

Usage:
    eta_oracle.py [--n 4 5 6] [--width 1e-16] > tests/fixtures/eta_fixtures.json
"""
import argparse
import json

import mpmath as mp

mp.mp.dps = 50
ORDER = 30


def cauchy(a, b, k):
    return mp.fsum(a[j] * b[k - j] for j in range(k + 1))


def taylor(n, kappa, z0, y0, y1):
    """Taylor coefficients of eta about z0 up to ORDER."""
    y = [y0, y1]
    w = []
    powers = [[] for _ in range(n + 1)]  # powers[m][k] = coefficient k of w^m
    for k in range(ORDER - 1):
        prev = y[k - 1] if k >= 1 else 0
        w.append(2 * kappa * (z0 * y[k] + prev) + cauchy(y, y, k))
        powers[1].append(w[k])
        for m in range(2, n + 1):
            powers[m].append(cauchy(powers[m - 1], w, k))
        y.append(powers[n][k] / ((k + 1) * (k + 2)))
    return y


def classify(n, rho, horizon=2000):
    kappa = 1 / mp.sqrt(mp.pi)
    eps = mp.mpf(10) ** (-mp.mp.dps + 5)
    z, y0, y1 = mp.mpf(0), mp.mpf(rho), -kappa
    while z < horizon:
        c = taylor(n, kappa, z, y0, y1)
        h = min(mp.mpf(16), *(
            (eps / abs(c[k])) ** (mp.mpf(1) / k) for k in (ORDER - 1, ORDER) if c[k] != 0))
        y0 = mp.fsum(ck * h**k for k, ck in enumerate(c))
        y1 = mp.fsum(k * ck * h ** (k - 1) for k, ck in enumerate(c) if k)
        z += h
        if y0 < 0:
            return 1
        if y1 > 0:
            return 2
    raise RuntimeError(f"shot at rho={rho} undecided up to z={horizon}")


def solve(n, width):
    kappa = 1 / mp.sqrt(mp.pi)
    lo = mp.mpf("1e-3")
    hi = 2 * kappa ** (mp.mpf(1) / (2 * n + 1))
    assert classify(n, lo) == 1 and classify(n, hi) == 2
    while hi - lo > width:
        mid = (lo + hi) / 2
        if classify(n, mid) == 1:
            lo = mid
        else:
            hi = mid
    return lo, hi


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--width", type=float, default=1e-16)
    args = ap.parse_args()
    out = {}
    for n in args.n:
        lo, hi = solve(n, mp.mpf(args.width))
        out[str(n)] = {"eta0_lo": mp.nstr(lo, 20), "eta0_hi": mp.nstr(hi, 20)}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
