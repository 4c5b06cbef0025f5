"""Calibrate the Bessel regime envelope constants and write them to
src/conewave/_envelope_constants.py.

Every value of J_nu(x) used here comes from mpmath at 30 digits, so the
frozen constants do not depend on the library evaluator they later bound.

    python3 scripts/calibrate_envelopes.py
"""
from pathlib import Path

import mpmath as mp
import numpy as np

mp.mp.dps = 30
SAFETY = 1.05
OUT = Path(__file__).resolve().parents[1] / "src" / "conewave" / "_envelope_constants.py"


def jabs(nu, x):
    return float(abs(mp.besselj(mp.mpf(nu), mp.mpf(x))))


def modulus(nu, x):
    nu, x = mp.mpf(nu), mp.mpf(x)
    return float(mp.sqrt(mp.besselj(nu, x) ** 2 + mp.bessely(nu, x) ** 2))


def main():
    nus = np.unique(np.concatenate([np.linspace(2, 20, 19), np.geomspace(20, 100, 12)]))

    # small regime: fix C = 1 (|J| <= 1) and take the largest admissible c
    c_small = np.inf
    for nu in nus:
        for x in np.linspace(nu / 2, 1e-3, 25):
            logv = mp.log(abs(mp.besselj(mp.mpf(nu), mp.mpf(x))))
            c_small = min(c_small, float(-logv) / (nu + x))
    c_small /= SAFETY

    # transition regime: step resolves the Airy-scale oscillation
    c_trans = 0.0
    for nu in nus:
        step = nu ** (1 / 3) / 8
        for x in np.arange(nu / 2, 2 * nu + step, step):
            w = nu ** (1 / 3) * (nu ** (-1 / 3) * abs(x - nu) + 1) ** 0.25
            c_trans = max(c_trans, jabs(nu, x) * w)
    c_trans *= SAFETY

    # oscillatory regime: |J| <= sqrt(J^2 + Y^2), and x * (J^2 + Y^2) is
    # monotone for nu > 1/2, so the modulus bound is swept on a log grid
    c_osc = 0.0
    for nu in nus:
        for x in 2 * nu * np.geomspace(1, 1e3, 30):
            c_osc = max(c_osc, modulus(nu, x) * np.sqrt(x))
    c_osc *= SAFETY

    OUT.write_text(
        '"""Generated by scripts/calibrate_envelopes.py; do not edit by hand."""\n\n'
        "# |J_nu(x)| <= SMALL_C * exp(-SMALL_c * (nu + x))            for x <= nu/2\n"
        "# |J_nu(x)| <= TRANSITION_C * nu^(-1/3) * (...)^(-1/4)       for nu/2 < x < 2 nu\n"
        "# |J_nu(x)| <= OSCILLATORY_C * x^(-1/2)                      for x >= 2 nu\n"
        f"# calibrated on nu in [2, 100] with safety factor {SAFETY}\n"
        f"SMALL_C = 1.0\n"
        f"SMALL_c = {float(c_small)!r}\n"
        f"TRANSITION_C = {float(c_trans)!r}\n"
        f"OSCILLATORY_C = {float(c_osc)!r}\n"
    )
    print(OUT.read_text())


if __name__ == "__main__":
    main()
