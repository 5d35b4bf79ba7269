"""
Chaos game as an independent check
==================================

A single random trajectory samples the invariant measure. Its empirical
Fourier coefficients must agree with the infinite product to within
sampling error, and its correlation sum gives the dimension of the
ternary Cantor measure.
"""

import math

import numpy as np

from affine_ifs.classify import estimate_sobolev_dimension
from affine_ifs.measures import IFSInvariant, Lebesgue, bernoulli
from affine_ifs.montecarlo import chaos_game, correlation_dimension, empirical_coefficients
from affine_ifs.products import PLASTIC_NUMBER, product_transform

k = np.arange(1, 51)
for sigma, delta in [(Lebesgue(), 0.4), (bernoulli(), 0.4), (bernoulli(), 1 / PLASTIC_NUMBER)]:
    emp = chaos_game(sigma, delta, 1_000_000, seed=42)
    c_emp, se = empirical_coefficients(emp, 50)
    z = np.abs(c_emp.nonnegative[1:] - product_transform(sigma, delta, np.pi * k)) / se[51:]
    print(f"{type(sigma).__name__:9s} delta={delta:.4f}: {np.mean(z < 3):.0%} of |z| < 3, max {z.max():.2f}")

emp = chaos_game(bernoulli(), 1 / 3, 200_000, seed=1)
d2, err = correlation_dimension(emp.samples, 1e-4, 1e-1)
sob = estimate_sobolev_dimension(IFSInvariant(bernoulli(), 1 / 3))
print(f"\nternary Cantor: correlation {d2:.4f} +- {err:.4f}, Sobolev {sob.value:.4f}, "
      f"log2/log3 = {math.log(2) / math.log(3):.4f}")
