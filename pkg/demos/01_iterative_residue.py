"""Iterative residue of a parabolic germ, two ways.

For f(z) = z + a z^2 + b z^3 + ... with a != 0 the quantity
gamma = 1 - b/a^2 is a conjugacy invariant.  It equals the residue at 0 of
the meromorphic form dz/(f(z) - z) + dz/z, which we can also get by a plain
trapezoid quadrature on a small circle.  The two computations agreeing to
~1e-12 is a strong end-to-end check on the Taylor extraction.
"""

import numpy as np

from hornlab import germ_data, iterative_residue_contour, load_catalog

catalog = load_catalog()

print(f"{'map':<14} {'gamma (formula)':>22} {'contour r=0.05':>22} {'diff':>10}")
for name in catalog.simple_parabolic_ids():
    m = catalog.map(name)
    gamma = germ_data(m).gamma
    contour = iterative_residue_contour(m, 0.05)
    print(f"{name:<14} {str(np.round(gamma, 12)):>22} {str(np.round(contour, 12)):>22} "
          f"{abs(gamma - contour):>10.2e}")

# The residue is invariant under rescaling z -> lam z, unlike a and b alone.
from hornlab.maps import Conjugated, Polynomial

f = catalog.map("cauliflower")
g = Conjugated(inner=f, change=Polynomial(coefficients=(2.0 + 1.0j,)))
print("\nafter conjugating the cauliflower by z -> (2+i) z:")
print("  a     =", np.round(germ_data(g).a, 12), " (changed)")
print("  gamma =", np.round(germ_data(g).gamma, 12), " (unchanged)")
