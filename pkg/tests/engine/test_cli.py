"""Tests for the command-line interface."""

import io
import json
import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.cli import EXIT_BOUNDED, EXIT_INPUT, EXIT_OK, ObstructionCLI

ROOT = Path(__file__).parent.parent.parent
SPECS_DIR = ROOT / "data" / "specs"
GOLDEN_DIR = ROOT / "tests" / "golden"


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = ObstructionCLI(out=out, err=err).run([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


def write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_form_tables_golden():
    code, out, _ = run_cli("form", "tables")
    assert code == EXIT_OK
    assert out == (GOLDEN_DIR / "form_tables.txt").read_text(encoding="utf-8")


def test_block_table_golden():
    code, out, _ = run_cli("sphere-product", "blocks", SPECS_DIR / "example_s1s2s3.json", "--format", "table")
    assert code == EXIT_OK
    assert out == (GOLDEN_DIR / "s1s2s3_blocks.txt").read_text(encoding="utf-8")


def test_blocks_json_uses_witness_when_none_supplied():
    code, out, _ = run_cli("sphere-product", "blocks", SPECS_DIR / "s3xs3.json")
    assert code == EXIT_OK
    assert json.loads(out)


def test_blocks_need_a_sphere_product():
    code, _, err = run_cli("sphere-product", "blocks", SPECS_DIR / "cp2xt2.json")
    assert code == EXIT_INPUT
    assert "sphere_product" in err


def test_analyze_json():
    code, out, _ = run_cli("analyze", SPECS_DIR / "s2xs2.json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["betti_profile"] == [1, 0, 2, 0, 1]
    assert [v["rule"] for v in report["verdicts"]] == ["all-even-spheres"]
    assert report["verdicts"][0]["conclusion"] == "NO_ANOSOV"


def test_analyze_table():
    code, out, _ = run_cli("analyze", SPECS_DIR / "s5_bundle_over_s2.json", "--format", "table")
    assert code == EXIT_OK
    assert out.startswith("kind: sphere_bundle\ndimension: 7\nbetti: 1 0 1 0 0 1 0 1\n")
    assert "NO_ANOSOV [high-sphere-bundle]" in out


def test_sphere_product_analyze_is_an_alias():
    _, direct, _ = run_cli("analyze", SPECS_DIR / "s3xs3.json")
    _, alias, _ = run_cli("sphere-product", "analyze", SPECS_DIR / "s3xs3.json")
    assert direct == alias


def test_missing_spec_file():
    code, out, err = run_cli("analyze", SPECS_DIR / "missing.json")
    assert code == EXIT_INPUT
    assert out == ""
    assert err.startswith("❌")


def test_malformed_spec(tmp_path):
    path = write_json(tmp_path / "bad.json", {"kind": "sphere_product", "factors": []})
    code, _, err = run_cli("analyze", path)
    assert code == EXIT_INPUT
    assert "field sphere_product.factors" in err


def test_bad_arguments():
    code, _, _ = run_cli("lefschetz")
    assert code == EXIT_INPUT
    code, _, _ = run_cli("form", "analyze", "--matrix", SPECS_DIR / "cat_map.json", "--bound", "x")
    assert code == EXIT_INPUT


def test_lefschetz_csv():
    code, out, _ = run_cli(
        "lefschetz", "--automorphism", SPECS_DIR / "cat_map_automorphism.json", "-L", 2, "--format", "csv"
    )
    assert code == EXIT_OK
    assert out == "l,lefschetz\n1,-1\n2,-5\n"


def test_lefschetz_growth():
    code, out, _ = run_cli(
        "lefschetz", "--automorphism", SPECS_DIR / "cat_map_automorphism.json", "--growth"
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["values"][:3] == [-1, -5, -16]
    assert payload["compatibility"]["consistency"] == "TRANSITIVE_POSSIBLE"


def test_form_analyze_hyperbolic_plane():
    code, out, _ = run_cli("form", "analyze", "--matrix", SPECS_DIR / "hyperbolic_plane.json")
    assert code == EXIT_OK
    verdict = json.loads(out)
    assert verdict["conclusion"] == "NO_ANOSOV"
    assert verdict["rule"] == "middle-form-rank"


def test_form_analyze_bounded_search_exit_code(tmp_path):
    path = write_json(
        tmp_path / "hh.json",
        {"matrix": [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]},
    )
    code, out, _ = run_cli("form", "analyze", "--matrix", path, "--bound", 1, "--format", "table")
    assert code == EXIT_BOUNDED
    assert out.startswith("INCONCLUSIVE [middle-form-search] (BOUNDED_ONLY)")


def test_form_analyze_rejects_non_unimodular(tmp_path):
    path = write_json(tmp_path / "q.json", [[2, 0], [0, 1]])
    code, _, err = run_cli("form", "analyze", "--matrix", path)
    assert code == EXIT_INPUT
    assert "not unimodular" in err


def test_oracle_cross_check_csv():
    code, out, _ = run_cli("oracle", "cross-check", "--matrix", SPECS_DIR / "cat_map.json", "-L", 3)
    assert code == EXIT_OK
    assert out == "l,lefschetz,det_count,smith_count\n1,-1,1,1\n2,-5,5,5\n3,-16,16,16\n"


def test_oracle_rejects_non_hyperbolic(tmp_path):
    path = write_json(tmp_path / "shear.json", [[1, 1], [0, 1]])
    code, _, err = run_cli("oracle", "cross-check", "--matrix", path)
    assert code == EXIT_INPUT
    assert "not hyperbolic" in err


def test_ring_betti():
    code, out, _ = run_cli("ring", "betti", "--ring", SPECS_DIR / "cp2_ring.json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["betti"] == [1, 0, 1, 0, 1]
    assert payload["euler_characteristic"] == 3


def test_ring_cup_signs(tmp_path):
    ring = write_json(
        tmp_path / "ring.json",
        {"generators": [{"label": "x", "degree": 1}, {"label": "y", "degree": 1}]},
    )
    _, out, _ = run_cli("ring", "cup", "--ring", ring, "--a", "y", "--b", "x")
    assert json.loads(out)["sign"] == -1
    _, out, _ = run_cli("ring", "cup", "--ring", ring, "--a", "x", "--b", "x")
    assert json.loads(out)["product"] == "0"


def test_unknown_generator_is_an_input_error():
    code, _, err = run_cli("ring", "cup", "--ring", SPECS_DIR / "cp2_ring.json", "--a", "z", "--b", "a")
    assert code == EXIT_INPUT
    assert err.startswith("❌")


@pytest.mark.parametrize("level", ["DEBUG", "WARNING"])
def test_log_level_flag(level):
    code, _, _ = run_cli("--log-level", level, "form", "tables")
    assert code == EXIT_OK
