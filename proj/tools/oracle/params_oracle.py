#!/usr/bin/env python3
"""Reference values for the closed-form constants, at 50 significant digits.

Writes a JSON object keyed by n. Usage:
    params_oracle.py [--nmax 20] > tests/fixtures/params_fixtures.json
"""
import argparse
import json

import mpmath as mp

mp.mp.dps = 50


def constants(n):
    n = mp.mpf(n)
    eps = 1 / (n - 1)
    delta = (n + 2) / (n - 1)
    dd1 = delta * (delta + 1)
    kappa = 1 / mp.sqrt(mp.pi)
    kappa3 = -kappa / 12
    lam = (dd1 / (2 * kappa) ** n) ** (1 / (n - 1))
    root = mp.sqrt(1 + 4 * n * dd1)
    p_plus = (1 + root) / 2
    p_minus = (1 - root) / 2
    delta_prime = (root - 1) / 2 if n <= 5 else 2 * delta + 1
    xi0 = mp.sqrt(dd1 / (n * eps / 2))
    lam0 = (lam / (2 * kappa)) * (-2 * n * kappa3 * dd1 - kappa * (delta - 2 * eps)) / (
        (n - 1) * dd1 + 2 * (2 * delta - 1))
    return {
        "lambda": lam,
        "delta_prime": delta_prime,
        "p_plus": p_plus,
        "p_minus": p_minus,
        "xi0": xi0,
        "lambda0": lam0,
        "kappa": kappa,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nmax", type=int, default=20)
    args = ap.parse_args()
    out = {"digits": mp.mp.dps}
    for n in range(4, args.nmax + 1):
        out[str(n)] = {k: mp.nstr(v, 40) for k, v in constants(n).items()}
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
