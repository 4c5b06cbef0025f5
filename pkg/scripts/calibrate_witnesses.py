"""Calibrate the dyadic G-function witness constants on the round sphere.

For n = 3 the round sphere has orders nu = l + 1/2. The largest ratio
G / shape per branch over a wide dyadic (nu, R, M) range, times a safety
factor, is frozen into src/conewave/estimates/_witness_constants.py.

    python3 scripts/calibrate_witnesses.py
"""
from pathlib import Path

import numpy as np

from conewave.estimates.gfunction import bound_shape, g_value

SAFETY = 1.5
OUT = Path(__file__).resolve().parents[1] / "src" / "conewave" / "estimates" / "_witness_constants.py"


def main():
    nus = [ell + 0.5 for ell in range(6)]
    Rs = 2.0 ** np.arange(-6, 8)
    Ms = 2.0 ** np.arange(-4, 5)
    worst = {"small": 0.0, "large": 0.0}
    for nu in nus:
        for R in Rs:
            for M in Ms:
                branch, shape = bound_shape(nu, R, M)
                worst[branch] = max(worst[branch], g_value(nu, R, M) / shape)
    OUT.write_text(
        '"""Generated by scripts/calibrate_witnesses.py; do not edit by hand."""\n\n'
        f"# max of G / shape on the round sphere (nu = l + 1/2, l < 6, R in 2^[-6, 7],\n"
        f"# M in 2^[-4, 4]) times a safety factor of {SAFETY}\n"
        f"WITNESS_SMALL_R = {float(worst['small'] * SAFETY)!r}\n"
        f"WITNESS_LARGE_R = {float(worst['large'] * SAFETY)!r}\n"
    )
    print(OUT.read_text())


if __name__ == "__main__":
    main()
