"""Generated by scripts/calibrate_envelopes.py; do not edit by hand."""

# |J_nu(x)| <= SMALL_C * exp(-SMALL_c * (nu + x))            for x <= nu/2
# |J_nu(x)| <= TRANSITION_C * nu^(-1/3) * (...)^(-1/4)       for nu/2 < x < 2 nu
# |J_nu(x)| <= OSCILLATORY_C * x^(-1/2)                      for x >= 2 nu
# calibrated on nu in [2, 100] with safety factor 1.05
SMALL_C = 1.0
SMALL_c = 0.3063149280793641
TRANSITION_C = 0.8195290458909227
OSCILLATORY_C = 0.9002452297104219
