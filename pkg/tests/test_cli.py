"""Command-line exit codes, outputs, and catalog overrides."""

import json

import pytest

from hornlab.cli import _parse_complex, build_parser, run
from hornlab.cli import UsageError


def test_parse_complex_accepts_i_notation():
    assert _parse_complex("0.3+3i") == 0.3 + 3j
    assert _parse_complex("-2j") == -2j
    with pytest.raises(UsageError):
        _parse_complex("zebra")


def test_parser_lists_all_subcommands():
    ap = build_parser()
    text = ap.format_help()
    for name in (
        "residue",
        "fatou-check",
        "horn",
        "expansion",
        "domain",
        "conjugacy-verify",
        "build-phi",
        "render",
    ):
        assert name in text


def test_residue_command_succeeds(capsys):
    assert run(["residue", "--map", "cauliflower"]) == 0
    out = capsys.readouterr().out
    assert "gamma (formula)" in out and "gamma (contour)" in out


def test_residue_command_writes_report(tmp_path, capsys):
    assert run(["residue", "--map", "cubic", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "residue_cubic.json").read_text())
    assert doc["gamma_formula"] == [0.0, 0.0]
    assert doc["difference"] < 1e-9
    assert len(doc["config_hash"]) == 64


def test_unknown_map_is_a_usage_error(capsys):
    assert run(["residue", "--map", "no-such-map"]) == 2
    assert "unknown catalog map" in capsys.readouterr().err


def test_unreachable_tolerance_is_a_verification_failure(capsys):
    assert run(["residue", "--map", "cauliflower", "--tol", "1e-18"]) == 1


def test_horn_command_in_and_out_of_domain(capsys):
    assert run(["horn", "--map", "cauliflower", "--w", "0.3+3i"]) == 0
    out = capsys.readouterr().out
    assert "h(w) representative" in out
    assert run(["horn", "--map", "cauliflower", "--w", "0.5"]) == 1
    assert "outside the horn-map domain" in capsys.readouterr().err


def test_bad_config_file_is_a_usage_error(tmp_path, capsys):
    bad = tmp_path / "cfg.json"
    bad.write_text("{not json")
    assert run(["fatou-check", "--map", "half", "--config", str(bad)]) == 2


def test_catalog_env_override(tmp_path, monkeypatch, capsys):
    doc = {
        "maps": {
            "mine": {"variant": "polynomial", "coefficients": [[1, 0], [1, 0]]}
        }
    }
    path = tmp_path / "catalog.json"
    path.write_text(json.dumps(doc))
    monkeypatch.setenv("HORNLAB_CATALOG", str(path))
    assert run(["residue", "--map", "mine"]) == 0
    assert run(["residue", "--map", "cauliflower"]) == 2  # built-in hidden


def test_domain_command_writes_grid(tmp_path, capsys):
    code = run(
        ["domain", "--map", "cauliflower", "--res", "8", "--im-min", "-4",
         "--im-max", "4", "--out", str(tmp_path)]
    )
    assert code == 0
    doc = json.loads((tmp_path / "domain_cauliflower.json").read_text())
    assert doc["resolution"] == [8, 8]
    assert doc["status_codes"] == {"converged": 0, "escaped": 1, "unknown": 2}


def test_render_command_is_deterministic(tmp_path):
    argv = ["render", "--map", "cauliflower", "--px", "32", "--out"]
    assert run(argv + [str(tmp_path / "a")]) == 0
    assert run(argv + [str(tmp_path / "b"), "--threads", "4"]) == 0
    a = (tmp_path / "a" / "basin_cauliflower.ppm").read_bytes()
    b = (tmp_path / "b" / "basin_cauliflower.ppm").read_bytes()
    assert a == b


def test_expansion_command_reports_levels(capsys):
    code = run(["expansion", "--map", "cauliflower", "--levels", "3,4,5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "E(3.0)" in out and "fitted decay rate" in out
