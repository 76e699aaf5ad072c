"""
Chebyshev roots and the cosine product
======================================

Ideal HMC on a quadratic contracts each eigen-direction by
cos(sqrt(2 lam) eta) per iteration. Picking the integration times from the
roots of the shifted Chebyshev polynomial makes the product of those cosines
small over the whole spectrum [m, L] at once.
"""

import numpy as np

from chebyhmc import SpectralBounds, cheb_roots, cosine_product, phi_bar, psi, rate_bound

b = SpectralBounds(1.0, 100.0)
lam = np.linspace(b.m, b.L, 512)

# %% The roots sit densely near both ends of the spectrum
roots = cheb_roots(8, b)
print("roots for K=8:", np.round(roots.roots, 3))

# %% The cosine product never exceeds the Chebyshev polynomial in magnitude
for K in (4, 16, 64):
    r = cheb_roots(K, b)
    cos_max = np.max(np.abs(cosine_product(lam, r)))
    cheb_max = np.max(np.abs(phi_bar(K, lam, b)))
    print(f"K={K:3d}  max|cos product| {cos_max:.3e}  max|phi_bar| {cheb_max:.3e}  bound {rate_bound(K, b):.3e}")

# %% Why: each factor cos(pi/2 sqrt(x)) is (1 - x) times psi(x), and |psi| <= 1
x = np.linspace(0, 100, 10_000)
print("max |psi| on [0, 100]:", np.abs(psi(x)).max(), "attained at x =", x[np.argmax(np.abs(psi(x)))])
