"""
Total variation blow-up on a Cantor set
=======================================

Two equally weighted fixed points at -1 and 1 with contraction 0.4 give a
singular invariant measure. The exact iterates are step functions whose
total variation grows like 0.4^-n; the truncated spectral iteration sees
the same growth until the truncation level caps it.
"""

import numpy as np

from affine_ifs.density import bernoulli_exact_iterate, total_variation_difference
from affine_ifs.measures import bernoulli
from affine_ifs.transfer import CoefficientVector, iterate_to_fixed_point

delta = 0.4
print(" n     BV exact     delta^-n     BV distance   delta^-n (1-delta)")
prev = bernoulli_exact_iterate(delta, 0)
for n in range(1, 11):
    cur = bernoulli_exact_iterate(delta, n)
    print(f"{n:2d}  {cur.total_variation():11.3f}  {delta**-n:11.3f}  "
          f"{total_variation_difference(cur, prev):11.3f}  {delta**-n * (1 - delta):11.3f}")
    prev = cur

# spectral iteration: growth, then saturation that rises with M
for M in (100, 200, 400):
    _, rep = iterate_to_fixed_point(CoefficientVector.uniform(M), bernoulli(), delta,
                                    max_iter=25, check_divergence=False)
    bv = rep.series("bv_norm")
    print(f"M={M:3d}  BV_1..5 = {np.round(bv[:5], 1)}  plateau ~ {bv[-5:].mean():.1f}")

_, rep = iterate_to_fixed_point(CoefficientVector.uniform(100), bernoulli(), delta)
print("verdict with the default stopping rules:", rep.verdict.value, "at n =", rep.n_final)
