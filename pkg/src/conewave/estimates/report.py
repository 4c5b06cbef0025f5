"""Report records shared by the estimate scans."""
from dataclasses import dataclass, field

import numpy as np

# a stable constant is one whose desk-scale witness moves by at most this
# much when the horizon or the resolution doubles
STABILITY_TOL = 0.05
HEADER = ("constants are not known in closed form; pass means the sup quotient "
          "is finite and moves by at most 5% when the horizon or resolution doubles")


@dataclass(frozen=True)
class QuotientReport:
    estimate: str
    params: dict
    ensemble_size: int
    sup: float
    sup_doubled: float
    passed: bool
    quotients: tuple = ()
    extra: dict = field(default_factory=dict)

    @property
    def change(self):
        """Relative change of the sup quotient under doubling."""
        if self.sup == 0:
            return 0.0 if self.sup_doubled == 0 else np.inf
        return self.sup_doubled / self.sup - 1

    def summary(self):
        return {"estimate": self.estimate, "params": dict(self.params),
                "sup": float(self.sup), "sup_doubled": float(self.sup_doubled),
                "pass": bool(self.passed)}

    def rows(self):
        """One CSV row per ensemble member (or sample), then the sup row."""
        names = sorted(self.params)
        head = ["estimate", *names, "member", "quotient", "sup", "sup_doubled", "pass"]
        out = [head]
        vals = [self.params[k] for k in names]
        for i, q in enumerate(self.quotients):
            out.append([self.estimate, *vals, i, q, "", "", ""])
        out.append([self.estimate, *vals, "sup", self.sup, self.sup, self.sup_doubled,
                    int(self.passed)])
        return out


def stable(sup, sup_doubled, tol=STABILITY_TOL):
    if not (np.isfinite(sup) and np.isfinite(sup_doubled)):
        return False
    if sup == 0:
        return sup_doubled == 0
    return abs(sup_doubled / sup - 1) <= tol


@dataclass(frozen=True)
class GFunctionSample:
    nu: float
    ell: int
    R: float
    M: float
    value: float
    bound: float
    branch: str

    @property
    def ratio(self):
        return 0.0 if self.value == 0 else self.value / self.bound
