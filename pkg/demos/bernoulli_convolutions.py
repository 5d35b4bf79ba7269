"""
Three Bernoulli convolutions
============================

Contractions 2^-1/2 and 3/4 give absolutely continuous measures, while
the reciprocal of the smallest Pisot number gives a singular one. The
difference shows in the Fourier coefficients, which stop decaying in the
Pisot case, and in the density mapping, whose total variation diverges.
"""

import numpy as np

from affine_ifs.classify import classify, estimate_decay_exponent, estimate_sobolev_dimension
from affine_ifs.measures import IFSInvariant, bernoulli
from affine_ifs.products import PLASTIC_NUMBER, product_transform
from affine_ifs.transfer import CoefficientVector, iterate_to_fixed_point

cases = {"a": 2**-0.5, "b": 1 / PLASTIC_NUMBER, "c": 0.75}
k = np.arange(1, 10_001)
curves = {}

for name, delta in cases.items():
    c = np.abs(product_transform(bernoulli(), delta, np.pi * k))
    windows = [c[lo - 1:hi].max() for lo, hi in ((10, 100), (100, 1000), (1000, 10_000))]
    decay = estimate_decay_exponent(k, c)
    _, rep = iterate_to_fixed_point(CoefficientVector.uniform(1000), bernoulli(), delta)
    sob = estimate_sobolev_dimension(IFSInvariant(bernoulli(), delta))
    verdict = classify(rep, decay, sob)
    print(f"{name}) delta={delta:.6f}  window maxima {np.round(windows, 5)}  gamma={decay.gamma:.2f}")
    print(f"   iteration {rep.verdict.value} at n={rep.n_final}, "
          f"BV {rep.records[0].bv_norm:.2f} -> {rep.records[-1].bv_norm:.2f};  {verdict.verdict.value}")
    _, rep = iterate_to_fixed_point(CoefficientVector.uniform(1000), bernoulli(), delta,
                                    max_iter=30, check_divergence=False)
    curves[name] = rep.series("d1")

# the Pisot and 3/4 distance curves part ways after roughly ten steps
rel = np.abs(curves["b"] - curves["c"]) / curves["c"]
print("\nrelative CoeffSum gap b vs c by n:")
print(np.round(rel, 2))
