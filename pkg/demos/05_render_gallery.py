"""Deterministic rasters: basin checkerboard and horn-map domain band.

The basin render colors the parabolic basin by the parity of
floor(Re Phi_A) + floor(Im Phi_A), so each cell is one fundamental square of
the Fatou coordinate; applying f once shifts the pattern by exactly one
cell.  Rendering is row-parallel and byte-identical for any thread count.

Writes PPM files into ./demo_output.
"""

import os

from hornlab import render_basin, render_horn_domain
from hornlab.fatou import FatouConfig
from hornlab.maps import Polynomial
from hornlab.render import Viewport, export

out = "demo_output"
os.makedirs(out, exist_ok=True)
f = Polynomial(coefficients=(1.0, 1.0))
cfg = FatouConfig(max_iterations=2048)

vp = Viewport(center=complex(-0.5, 0.0), width=2.0, height=2.0, pixels_x=384, pixels_y=384)
img1 = render_basin(f, vp, cfg, threads=4, map_id="cauliflower")
img8 = render_basin(f, vp, cfg, threads=8, map_id="cauliflower")
print("thread-count independent:", img1.to_ppm_bytes() == img8.to_ppm_bytes())
export(img1, os.path.join(out, "basin_cauliflower.ppm"))
print("wrote", os.path.join(out, "basin_cauliflower.ppm"),
      f"(config hash {img1.metadata['config_hash'][:12]}...)")

horn = render_horn_domain(f, (-4.0, 4.0), (192, 192), cfg, threads=4, map_id="cauliflower")
export(horn, os.path.join(out, "horn_domain_cauliflower.ppm"))
print("wrote", os.path.join(out, "horn_domain_cauliflower.ppm"),
      "(colored bands = horn-map domain, gray = escaped equator region)")
