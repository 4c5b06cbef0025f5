"""Generated by scripts/calibrate_witnesses.py; do not edit by hand."""

# max of G / shape on the round sphere (nu = l + 1/2, l < 6, R in 2^[-6, 7],
# M in 2^[-4, 4]) times a safety factor of 1.5
WITNESS_SMALL_R = 0.4656118299753598
WITNESS_LARGE_R = 0.10235609848795568
