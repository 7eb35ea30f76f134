"""Command-line behavior: exit codes, report shape, determinism, file formats."""

import json

import pytest

from koszul.ainfty import AInftyAlgebra, MultiOp
from koszul.cli.fixtures import cpn, exterior_algebra, seven_manifold_coalgebra
from koszul.cli.formats import (
    InputFormatError,
    canonical_json,
    parse_scalar,
    scalar_text,
    structure_from_dict,
    structure_to_dict,
)
from koszul.cli.main import main
from koszul.graded import BasisElement, BiGradedModule

from fractions import Fraction


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    out = captured.out
    idx = out.find("{")
    report = json.loads(out[idx:]) if idx >= 0 else None
    return code, out, captured.err, report


def write_structure(path, structure):
    path.write_text(canonical_json(structure_to_dict(structure)))
    return str(path)


def cubic_algebra():
    mod = BiGradedModule(
        [
            BasisElement("1", 0, 0),
            BasisElement("x", 1, -1),
            BasisElement("y", 2, -2),
        ]
    )
    return AInftyAlgebra(
        mod, {2: MultiOp(2, {("x", "x"): {("y",): 1}})}, unit="1", name="cubic"
    )


def square_zero_three_dim():
    mod = BiGradedModule(
        [BasisElement("1", 0, 0)]
        + [BasisElement(f"u{i}", 1, -1) for i in (1, 2, 3)]
    )
    return AInftyAlgebra(mod, {2: MultiOp(2, {})}, unit="1", name="sq0")


# ---------------------------------------------------------------------------
# exit codes and diagnostics


def test_check_passes_and_reports(capsys):
    code, out, err, report = run_cli(["check", "--fixture", "cpn:1"], capsys)
    assert code == 0
    assert report["ok"] is True
    assert report["violations"] == []
    assert report["grading_issues"] == []
    assert "all hold" in out
    assert "elapsed" in err


def test_usage_error_both_sources(capsys):
    code, _, err, _ = run_cli(
        ["check", "--fixture", "cpn:1", "--input", "x.json"], capsys
    )
    assert code == 2
    assert "exactly one" in err


def test_unknown_fixture(capsys):
    code, _, err, _ = run_cli(["check", "--fixture", "nope"], capsys)
    assert code == 2
    assert "available" in err


def test_unknown_command(capsys):
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_malformed_file_points_at_location(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        '{"kind":"algebra","module":[{"id":"1","degree":0}],"operations":[]}'
    )
    code, _, err, _ = run_cli(["check", "--input", str(bad)], capsys)
    assert code == 2
    assert "module[0]" in err and "weight" in err


def test_float_coefficient_rejected(tmp_path, capsys):
    bad = tmp_path / "f.json"
    bad.write_text(
        json.dumps(
            {
                "kind": "algebra",
                "module": [
                    {"id": "1", "degree": 0, "weight": 0},
                    {"id": "x", "degree": 1, "weight": -1},
                ],
                "unit": "1",
                "operations": [
                    {
                        "arity": 2,
                        "entries": [
                            {
                                "inputs": ["x", "x"],
                                "output": [{"id": "x", "coeff": 1.5}],
                            }
                        ],
                    }
                ],
            }
        )
    )
    code, _, err, _ = run_cli(["check", "--input", str(bad)], capsys)
    assert code == 2
    assert "decimal" in err


def test_hochschild_needs_ring_for_plain_coalgebra(capsys):
    code, _, err, _ = run_cli(
        ["hochschild", "--fixture", "cpn-dual:1"], capsys
    )
    assert code == 2
    assert "ring realization" in err


# ---------------------------------------------------------------------------
# serialization


def test_round_trip_is_identity_on_fixtures():
    structures = [
        cpn(1, 8),
        seven_manifold_coalgebra(),
        exterior_algebra(("u", "v")),
        square_zero_three_dim(),
    ]
    for s in structures:
        blob = canonical_json(structure_to_dict(s))
        s2 = structure_from_dict(json.loads(blob))
        assert canonical_json(structure_to_dict(s2)) == blob
        assert [e.id for e in s2.module.elements] == [
            e.id for e in s.module.elements
        ]


def test_scalar_parsing_and_rendering():
    assert parse_scalar("3", "t") == 3
    assert parse_scalar("-4", "t") == -4
    assert parse_scalar(7, "t") == 7
    assert parse_scalar("2/3", "t") == Fraction(2, 3)
    assert scalar_text(Fraction(2, 3)) == "2/3"
    assert scalar_text(-5) == "-5"
    for bad in ("1.5", True, 2.5, "x"):
        with pytest.raises(InputFormatError):
            parse_scalar(bad, "t")


def test_json_flag_redirects_block(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _, report = run_cli(
        ["check", "--fixture", "cpn:1", "--json", str(target)], capsys
    )
    assert code == 0
    assert report is None  # no JSON block on stdout
    assert "all hold" in out
    data = json.loads(target.read_text())
    assert data["ok"] is True


def test_reports_are_deterministic(capsys):
    code1, out1, _, _ = run_cli(["hochschild", "--fixture", "cpn:2"], capsys)
    code2, out2, _, _ = run_cli(["hochschild", "--fixture", "cpn:2"], capsys)
    assert code1 == code2 == 0
    assert out1 == out2


def test_seed_is_echoed(capsys):
    code, _, _, report = run_cli(
        ["check", "--fixture", "cpn:1", "--seed", "7"], capsys
    )
    assert code == 0
    assert report["seed"] == 7


# ---------------------------------------------------------------------------
# command results


def test_certify_failure_exits_one(tmp_path, capsys):
    path = write_structure(tmp_path / "cubic.json", cubic_algebra())
    code, out, _, report = run_cli(
        ["certify", "--input", path, "--max-degree", "6"], capsys
    )
    assert code == 1
    assert report["ok"] is False
    assert report["koszul_certificate"]["holds"] is False
    assert report["koszul_certificate"]["offending"]
    assert report["contractibility"] is None
    assert "skipped" in out


def test_certify_seven_manifold(capsys):
    code, _, _, report = run_cli(
        ["certify", "--fixture", "seven-manifold", "--max-degree", "9"], capsys
    )
    assert code == 0
    assert report["koszul_certificate"]["holds"] is True
    assert report["contractibility"]["holds"] is True


def test_dual_coalgebra_element_pattern(capsys):
    code, _, _, report = run_cli(
        ["dual", "--fixture", "cpn:3", "--max-degree", "8"], capsys
    )
    assert code == 0
    assert report["dual_kind"] == "coalgebra"
    assert [e["degree"] for e in report["elements"]] == [0, 2, 4, 6]


def test_dual_algebra_rank_series(capsys):
    code, _, _, report = run_cli(
        ["dual", "--fixture", "seven-manifold", "--max-degree", "8"], capsys
    )
    assert code == 0
    assert report["dual_kind"] == "algebra"
    assert len(report["presentation"]["relations"]) == 2
    ranks = [
        report["quotient_ranks"][str(d)]["free_rank"] for d in range(9)
    ]
    assert ranks == [1, 2, 4, 6, 9, 12, 16, 20, 25]


def test_obstruction_command(capsys):
    code, _, _, report = run_cli(
        ["obstructions", "--fixture", "massey"], capsys
    )
    assert code == 0
    assert report["formal"] is False
    assert [e["status"] for e in report["entries"]] == [
        "nonzero-class",
        "vanishes-identically",
    ]
    assert report["entries"][0]["coordinates"] == [
        1, 0, 0, 0, 0, -2, 0, 0, 0, 0, 0, 0,
    ]


def test_hochschild_torsion_cell_and_rational_ring(capsys):
    def cell(report, weight, cd):
        for row in report["cells"]:
            if row["weight"] == weight and row["cohomological_degree"] == cd:
                return row
        return None

    code, _, _, report = run_cli(["hochschild", "--fixture", "cpn:1"], capsys)
    assert code == 0
    row = cell(report, -2, 0)
    assert row["group"] == "Z/2" and row["torsion"] == [2]
    code, _, _, rational = run_cli(
        ["hochschild", "--fixture", "cpn:1", "--ring", "q"], capsys
    )
    assert code == 0
    row = cell(rational, -2, 0)
    assert row is None or row["group"] == "0"


def test_cross_validation_single_stage(tmp_path, capsys):
    path = write_structure(tmp_path / "sq0.json", square_zero_three_dim())
    code, _, _, report = run_cli(
        ["hochschild-full", "--input", path, "--max-degree", "5"], capsys
    )
    assert code == 0
    assert report["mode"] == "single-stage"
    assert report["mismatches"] == []
    assert report["compared_cells"] > 0


def test_cross_validation_stable_images(tmp_path, capsys):
    path = write_structure(tmp_path / "cp1.json", cpn(1, 18))
    code, _, _, report = run_cli(
        ["hochschild-full", "--input", path, "--max-degree", "6"], capsys
    )
    assert code == 0
    assert report["mode"] == "stable-images"
    assert report["mismatches"] == []
    assert report["compared_cells"] == 55


def test_presentation_fixture_check(capsys):
    code, _, _, report = run_cli(
        ["check", "--fixture", "quadratic:a:1,b:1;ab+ba,aa"], capsys
    )
    assert code == 0
    assert report["ok"] is True
    assert report["quotient_ranks"]["2"]["free_rank"] == 2


def test_tensor_fixture_cobar(capsys):
    code, _, _, report = run_cli(
        ["cobar", "--fixture", "tensor:a:2:1,b:2:1", "--max-degree", "6"],
        capsys,
    )
    assert code == 0
    by_cell = {
        (r["weight"], r["degree"]): r["free_rank"] for r in report["cells"]
    }
    assert by_cell[(0, 0)] == 1
    assert by_cell[(0, 1)] == 2
    assert by_cell.get((0, 2), 0) == 0


def test_report_command_composes_sections(capsys):
    code, out, _, report = run_cli(
        ["report", "--fixture", "cpn:1", "--max-degree", "6"], capsys
    )
    assert code == 0
    assert report["ok"] is True
    assert "violations" in report
    assert "koszul_certificate" in report
    assert "cells" in report
    assert "all hold" in out and "concentrated in weight 0" in out
