"""The horn map of z + z^2: values, end expansion, and domain geometry.

The horn map h = Phi_A^ext o Psi_R^ext lives on the repelling cylinder C/Z.
Near the ends it is a translation plus an exponentially small Fourier tail:

    h(w) = w -+ i pi gamma + c_1 e^{+-2 pi i w} + ...

For the quadratic the measured |c_1| is about 2.2e7, which is why the domain
component D+ only starts near Im w ~ 2.4: below that the backward chart
point leaves the parabolic basin (the Julia "fingers" in Ecalle coordinates).
The domain probe below makes that band structure visible.
"""

import math

import numpy as np

from hornlab import domain_probe, expansion_check, horn_map, series_pair
from hornlab.fatou import DEFAULT_CONFIG, OrbitError
from hornlab.maps import Polynomial

f = Polynomial(coefficients=(1.0, 1.0))
cfg = DEFAULT_CONFIG
series = series_pair(f, cfg.series_order_K)

print("horn map samples (gamma = 1, so the plus-end translation is w - i pi):")
for w in (0.3 + 3.0j, 0.3 + 4.0j, 0.3 + 5.0j, 0.5 + 1.5j):
    try:
        h = horn_map(f, series, w, cfg)
        print(f"  w = {w}: h = {np.round(h.representative, 10)}  [{h.end_hint}]")
    except OrbitError:
        print(f"  w = {w}: outside the horn-map domain")

print("\nend expansion decay on levels Im w in [3, 5]:")
report = expansion_check(f, "plus", im_levels=(3.0, 3.5, 4.0, 4.5, 5.0), cfg=cfg, series=series)
for t, e in zip(report.im_levels, report.errors):
    print(f"  E({t}) = {e:.3e}")
print(f"  fitted rate {report.rate:.3f} vs 2 pi = {2 * math.pi:.3f}; "
      f"first coefficient |c_1| ~ {report.errors[0] * math.exp(2 * math.pi * 3.0):.4e}")

print("\ndomain probe, 48 rows over Im in [-4, 4] (#converged of 24 per row):")
grid = domain_probe(f, (-4.0, 4.0), (24, 48), cfg, series=series)
ims = grid.im_min + (np.arange(48) + 0.5) * (grid.im_max - grid.im_min) / 48
for i in range(47, -1, -4):
    row = grid.status[i]
    bar = "".join("#" if s == 0 else ("." if s == 1 else "?") for s in row)
    print(f"  Im = {ims[i]:+5.2f}  {bar}")
print(f"fully converged above Im = {grid.converged_above_im}")
