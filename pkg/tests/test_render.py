"""Deterministic rasterization and the Fatou checkerboard."""

import numpy as np
import pytest

from hornlab.fatou import DEFAULT_CONFIG, FatouConfig
from hornlab.maps import Polynomial
from hornlab.render import (
    RasterImage,
    Viewport,
    basin_layers,
    canonical_hash,
    checkerboard_parity,
    export,
    render_basin,
    render_horn_domain,
)

CAULIFLOWER = Polynomial(coefficients=(1.0, 1.0))
CFG = FatouConfig(max_iterations=4096)


def test_canonical_hash_is_order_insensitive():
    assert canonical_hash({"a": 1, "b": [2, 3]}) == canonical_hash({"b": [2, 3], "a": 1})
    assert canonical_hash({"a": 1}) != canonical_hash({"a": 2})


def test_viewport_aspect_invariant():
    with pytest.raises(ValueError):
        Viewport(0j, 2.0, 1.0, 100, 100)
    vp = Viewport(complex(-0.5, 0.0), 2.0, 1.0, 100, 50)
    grid = vp.grid()
    assert grid.shape == (50, 100)
    assert grid[0, 0].imag > grid[-1, 0].imag  # row 0 is the top
    assert grid[0, 0].real == pytest.approx(-1.49)


def test_raster_image_payload_validation_and_ppm_bytes():
    payload = np.zeros((1, 2, 3), dtype=np.uint8)
    payload[0, 1] = (255, 0, 0)
    img = RasterImage(2, 1, payload, {"b": "x", "a": "y"})
    blob = img.to_ppm_bytes()
    assert blob == b"P6\n# a y\n# b x\n2 1\n255\n" + payload.tobytes()
    with pytest.raises(ValueError):
        RasterImage(3, 1, payload)


def test_checkerboard_parity_handles_undefined_cells():
    phi = np.array([[0.2 + 0.1j, 1.3 + 0.1j], [np.nan + 1j * np.nan, 0.2 + 1.4j]])
    par = checkerboard_parity(phi)
    assert par[0, 0] == 0 and par[0, 1] == 1 and par[1, 1] == 1
    assert par[1, 0] == -1


def test_render_is_byte_identical_across_runs_and_threads():
    vp = Viewport(complex(-0.5, 0.0), 2.0, 2.0, 64, 64)
    blobs = {
        render_basin(CAULIFLOWER, vp, CFG, threads=t, map_id="cauliflower").to_ppm_bytes()
        for t in (1, 3, 8)
    }
    assert len(blobs) == 1
    again = render_basin(CAULIFLOWER, vp, CFG, threads=1, map_id="cauliflower")
    assert again.to_ppm_bytes() in blobs


def test_checkerboard_shifts_by_one_cell_under_the_map():
    # Phi(f(z)) = Phi(z) + 1, so pre-applying f advances Re(Phi) by one and
    # flips the checkerboard parity wherever both verdicts are settled.
    vp = Viewport(complex(-0.35, 0.0), 0.3, 0.3, 64, 64)
    s0, _, phi0 = basin_layers(CAULIFLOWER, vp, CFG)
    s1, _, phi1 = basin_layers(CAULIFLOWER, vp, CFG, pre_iterations=1)
    both = (s0 == 0) & (s1 == 0)
    assert np.count_nonzero(both) > 1000
    assert np.max(np.abs(phi1[both] - phi0[both] - 1.0)) < 1e-9
    p0, p1 = checkerboard_parity(phi0), checkerboard_parity(phi1)
    assert np.all(p1[both] == 1 - p0[both])


def test_render_horn_domain_band_structure():
    img = render_horn_domain(
        CAULIFLOWER, im_range=(-4.0, 4.0), resolution=(16, 16), cfg=CFG, threads=2
    )
    arr = img.payload
    # equator row escaped (dark gray), outermost rows in-domain (colored)
    assert np.all(arr[8] == (40, 40, 40)) or np.all(arr[7] == (40, 40, 40))
    assert not np.all(arr[0] == (40, 40, 40))
    assert img.metadata["palette"] == "horn-hue-v1"


def test_export_formats(tmp_path):
    payload = np.zeros((1, 1, 3), dtype=np.uint8)
    img = RasterImage(1, 1, payload)
    p = tmp_path / "img.ppm"
    export(img, p)
    assert p.read_bytes().startswith(b"P6")
    j = tmp_path / "doc.json"
    export({"x": 1}, j, config_hash="beef")
    assert '"config_hash": "beef"' in j.read_text()
    c = tmp_path / "table.csv"
    export((["a", "b"], [[1, 2]]), c, "csv", config_hash="beef")
    assert c.read_text() == "# config_hash beef\na,b\n1,2\n"
    with pytest.raises(ValueError):
        export(img, tmp_path / "x.txt")
