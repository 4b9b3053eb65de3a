"""Why one LS statistic is not enough.

U(0, 1/2) placed inside a U(0, 1) depth ordering looks perfectly ordinary:
its mean rank is close to 1/2.  Swap the labels and half of the U(0, 1)
sample falls outside the U(0, 1/2) data, so the mean rank drops to 1/4.  A
test that only looks at one labelling can miss the difference entirely.

Run:  python demos/label_asymmetry.py
"""

import numpy as np

from depthgate import DepthSpec, MultivariateSample, TestConfig, decide, ls_tuple

rng = np.random.default_rng(1)
p = MultivariateSample(rng.random((100, 1)))
q = MultivariateSample(0.5 * rng.random((100, 1)))

t = ls_tuple(p, q, DepthSpec("tukey"))
print(f"LS(P, Q) = {t.ls_pq:.3f}   ranks of Q inside P")
print(f"LS(Q, P) = {t.ls_qp:.3f}   ranks of P inside Q")
print()
for method in ("proj-pq", "proj-qp", "difference", "joint-tp"):
    out = decide(t, TestConfig(method))
    p_txt = "below resolution" if out.below_resolution else f"{out.p_value:.2e}"
    print(f"{method:<11} reject={out.reject!s:<5}  p = {p_txt}")
