"""Command-line entry points.

Every command resolves a structure (``--fixture`` or ``--input``), runs
one exact computation, prints an aligned text report to stdout, and
appends a machine-readable JSON block (or writes it to ``--json``).
Reports are byte-identical across runs for identical inputs; timing and
diagnostics go to stderr only.  Exit status: 0 when every requested
check passes, 1 when a certificate or cross-validation fails, 2 for
usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import List, Optional, Tuple

from ..ainfty import (
    AInftyAlgebra,
    AInftyCoalgebra,
    Presentation,
    StructureError,
    check_costasheff,
    check_stasheff,
    check_weight_grading,
    contraction_from_complex,
    quotient_algebra,
    transfer_minimal_structure,
)
from ..barcobar import (
    BarCobarError,
    bar_homology,
    certify_koszul,
    cobar_homology,
    koszul_dual_algebra,
    koszul_dual_coalgebra,
)
from ..graded import CellComplex, GradedError, WindowSpec
from ..hochschild import (
    HochschildError,
    hh_cohomology,
    hh_full_stable,
    hochschild_full,
    hochschild_small_model,
    obstructions_of_minimal,
)
from ..twist import (
    TwistError,
    canonical_twisting,
    certify_contractible,
    twisted_tensor,
)
from .fixtures import (
    FixtureError,
    available_fixtures,
    get_fixture,
    seven_manifold_ring,
)
from .formats import (
    InputFormatError,
    canonical_json,
    cell_rows,
    group_text,
    load_structure,
    render_cell_table,
)

USER_ERRORS = (
    InputFormatError,
    FixtureError,
    StructureError,
    GradedError,
    BarCobarError,
    TwistError,
    HochschildError,
)


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koszul",
        description="Exact weight-graded homotopy algebra computations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "check": "higher-associativity and weight-grading checks",
        "bar": "homology table of the reduced word complex of an algebra",
        "cobar": "homology table of the generation complex of a coalgebra",
        "dual": "Koszul dual structure with presentation or basis table",
        "certify": "weight-column certificate plus twisted-product contractibility",
        "hochschild": "deformation cohomology over the small dual model",
        "hochschild-full": "cross-validation of the small model against word stages",
        "obstructions": "transferred-structure obstruction classes",
        "report": "combined check, certificates, and cohomology survey",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--fixture", help="builtin input, e.g. cpn:2 or seven-manifold")
        p.add_argument("--input", help="path to a structure JSON file")
        p.add_argument("--max-degree", type=int, default=None)
        p.add_argument("--weight-min", type=int, default=None)
        p.add_argument("--weight-max", type=int, default=None)
        p.add_argument("--max-arity", type=int, default=None)
        p.add_argument("--ring", choices=("z", "q"), default="z")
        p.add_argument("--json", dest="json_path", default=None)
        p.add_argument("--seed", type=int, default=None)
    return parser


def resolve_structure(args):
    if bool(args.fixture) == bool(args.input):
        raise UsageError("pass exactly one of --fixture or --input")
    if args.fixture:
        return get_fixture(args.fixture, max_degree=args.max_degree)
    return load_structure(args.input)


def degree_bound(args, default: int) -> int:
    if args.max_degree is None:
        return default
    if args.max_degree < 1:
        raise UsageError("--max-degree must be >= 1")
    return args.max_degree


def window_for(structure, args, default_degree: int) -> WindowSpec:
    md = degree_bound(args, default_degree)
    wts = [e.weight for e in structure.module.elements]
    has_neg = any(w < 0 for w in wts)
    has_pos = any(w > 0 for w in wts)
    wmin = args.weight_min if args.weight_min is not None else (-md if has_neg else 0)
    wmax = args.weight_max if args.weight_max is not None else (md if has_pos else 0)
    return WindowSpec(md, wmin, wmax)


def ring_target_for(args):
    """The rewriting-ring realization of the dual, for known coalgebra inputs."""
    if args.fixture and args.fixture.partition(":")[0] == "seven-manifold":
        return seven_manifold_ring()
    return None


def _need_kind(structure, kinds, command: str):
    if not isinstance(structure, kinds):
        names = {
            AInftyAlgebra: "an algebra",
            AInftyCoalgebra: "a coalgebra",
            Presentation: "a presentation",
        }
        wanted = " or ".join(names[k] for k in kinds)
        raise UsageError(
            f"{command} needs {wanted}, got {type(structure).__name__}"
        )


def _presentation_dict(pres: Presentation) -> dict:
    return {
        "generators": [
            {"id": name, "degree": degree} for name, degree in pres.generators
        ],
        "relations": [
            [
                {"word": list(word), "coeff": coeff}
                for word, coeff in sorted(rel.items())
            ]
            for rel in pres.relations
        ],
    }


def _summary_cells(table, ring):
    return cell_rows(table, ring)


# ---------------------------------------------------------------------------
# commands


def cmd_check(structure, args, report, lines):
    max_n = args.max_arity
    if isinstance(structure, Presentation):
        md = degree_bound(args, 6)
        ranks = quotient_algebra(structure, md)
        report["presentation"] = _presentation_dict(structure)
        report["quotient_ranks"] = {
            str(d): {
                "free_rank": s.free_rank,
                "torsion": [] if args.ring == "q" else list(s.torsion),
            }
            for d, s in sorted(ranks.items())
        }
        report["ok"] = True
        lines.append("presentation is homogeneous; quotient ranks by degree:")
        for d, s in sorted(ranks.items()):
            lines.append(
                f"  degree {d}: "
                f"{group_text(s.free_rank, tuple(s.torsion) if args.ring == 'z' else (), args.ring)}"
            )
        return
    grading_issues = check_weight_grading(structure)
    if isinstance(structure, AInftyAlgebra):
        violations = check_stasheff(structure, max_n)
        label = "higher-associativity"
    else:
        violations = check_costasheff(structure, max_n)
        label = "higher-coassociativity"
    report["grading_issues"] = list(grading_issues)
    report["violations"] = [
        {"arity": v[0], "at": list(v[1]) if isinstance(v[1], tuple) else [v[1]]}
        for v in violations
    ]
    report["ok"] = not grading_issues and not violations
    lines.append(
        f"{label} identities: "
        + ("all hold" if not violations else f"{len(violations)} violated")
    )
    lines.append(
        "weight grading: "
        + ("consistent" if not grading_issues else "; ".join(grading_issues))
    )


def cmd_bar(structure, args, report, lines):
    _need_kind(structure, (AInftyAlgebra,), "bar")
    window = window_for(structure, args, 8)
    table = bar_homology(structure, window)
    rows = _summary_cells(table, args.ring)
    report["window"] = window_dict(window)
    report["cells"] = rows
    report["ok"] = True
    lines.extend(render_cell_table(rows, "word-complex homology:"))


def cmd_cobar(structure, args, report, lines):
    _need_kind(structure, (AInftyCoalgebra,), "cobar")
    window = window_for(structure, args, 8)
    table = cobar_homology(structure, window)
    rows = _summary_cells(table, args.ring)
    report["window"] = window_dict(window)
    report["cells"] = rows
    report["ok"] = True
    lines.extend(render_cell_table(rows, "generation-complex homology:"))


def cmd_dual(structure, args, report, lines):
    _need_kind(structure, (AInftyAlgebra, AInftyCoalgebra), "dual")
    if isinstance(structure, AInftyAlgebra):
        md = degree_bound(args, 10)
        dual = koszul_dual_coalgebra(structure, md)
        elements = [
            {"id": e.id, "degree": e.degree, "weight": e.weight}
            for e in dual.coalgebra.module.elements
        ]
        report["dual_kind"] = "coalgebra"
        report["elements"] = elements
        report["ok"] = True
        lines.append(f"dual coalgebra through degree {md}:")
        for e in elements:
            lines.append(
                f"  {e['id']}  degree {e['degree']}  weight {e['weight']}"
            )
    else:
        result = koszul_dual_algebra(structure)
        report["dual_kind"] = "algebra"
        report["presentation"] = _presentation_dict(result.presentation)
        report["generators"] = list(result.generator_ids)
        report["relations_from"] = list(result.relation_ids)
        md = degree_bound(args, 8)
        ranks = quotient_algebra(result.presentation, md)
        report["quotient_ranks"] = {
            str(d): {
                "free_rank": s.free_rank,
                "torsion": [] if args.ring == "q" else list(s.torsion),
            }
            for d, s in sorted(ranks.items())
        }
        report["ok"] = True
        lines.append("dual algebra presentation:")
        gens = ", ".join(
            f"{name} (degree {degree})"
            for name, degree in result.presentation.generators
        )
        lines.append(f"  generators: {gens}")
        for rel in result.presentation.relations:
            terms = " + ".join(
                f"{c}*{''.join(w)}" for w, c in sorted(rel.items())
            )
            lines.append(f"  relation: {terms} = 0")
        lines.append("  ranks by degree: " + ", ".join(
            f"{d}: {s.free_rank}" for d, s in sorted(ranks.items())
        ))


def cmd_certify(structure, args, report, lines):
    _need_kind(structure, (AInftyAlgebra, AInftyCoalgebra), "certify")
    ok = True
    window = window_for(structure, args, 8)
    cert = certify_koszul(structure, window)
    contract = None
    skip_note = None
    if not cert.holds:
        skip_note = "skipped (weight-column certificate already fails)"
    elif isinstance(structure, AInftyAlgebra):
        md = degree_bound(args, 8)
        dual = koszul_dual_coalgebra(structure, md)
        kappa = canonical_twisting(structure, dual)
        twindow = WindowSpec(md, window.weight_min, max(window.weight_max, 0))
        tensor = twisted_tensor(dual.coalgebra, structure, kappa, twindow)
        contract = certify_contractible(tensor)
    else:
        ring = ring_target_for(args)
        if ring is None:
            skip_note = "skipped (no ring realization known for this input)"
        else:
            md = degree_bound(args, 8)
            kappa = canonical_twisting(
                structure, ring, WindowSpec(md, -3, 0)
            )
            tensor = twisted_tensor(
                structure, ring, kappa, WindowSpec(md, 0, max(window.weight_max, 1))
            )
            contract = certify_contractible(tensor)
    report["koszul_certificate"] = {
        "holds": cert.holds,
        "side": cert.side,
        "cells_checked": cert.cells_checked,
        "offending": [
            {"weight": c[0], "degree": c[1], "group": desc}
            for c, desc in cert.offending
        ],
    }
    ok = ok and cert.holds
    lines.append(cert.describe())
    if contract is None:
        report["contractibility"] = None
        lines.append(f"twisted-product contractibility: {skip_note}")
    else:
        report["contractibility"] = {
            "holds": contract.holds,
            "cells_checked": contract.cells_checked,
            "offending": [
                {"weight": c[0], "degree": c[1], "group": desc}
                for c, desc in contract.offending
            ],
            "excluded_edge_cells": [list(c) for c in contract.excluded],
        }
        ok = ok and contract.holds
        lines.append(contract.describe())
    report["ok"] = ok


def _algebra_dual(structure, args):
    """Dual coalgebra deep enough for the requested window.

    The library default ties the dual depth to the largest element
    degree, which undershoots for algebras generated in low degrees, so
    the command always passes an explicit depth.
    """
    depth = max(
        degree_bound(args, 8),
        max((abs(e.degree) for e in structure.module.elements), default=1),
    )
    return koszul_dual_coalgebra(structure, depth)


def _small_model(structure, args):
    if isinstance(structure, AInftyAlgebra):
        window = None
        if args.weight_min is not None or args.weight_max is not None or args.max_degree is not None:
            window = window_for(structure, args, 8)
        return hochschild_small_model(
            structure, window=window, dual=_algebra_dual(structure, args)
        )
    ring = ring_target_for(args)
    if ring is None:
        raise UsageError(
            "hochschild on a coalgebra needs a known ring realization; "
            "use the seven-manifold fixture or pass an algebra"
        )
    window = window_for(structure, args, 8)
    hom_window = WindowSpec(
        window.max_total_degree,
        min(args.weight_min if args.weight_min is not None else -4, -1),
        max(args.weight_max if args.weight_max is not None else 1, 1),
    )
    return hochschild_small_model(structure, dual=ring, window=hom_window)


def cmd_hochschild(structure, args, report, lines):
    _need_kind(structure, (AInftyAlgebra, AInftyCoalgebra), "hochschild")
    model = _small_model(structure, args)
    table = {
        bg.cell: value
        for bg, value in hh_cohomology(model, nontrivial_only=True).items()
    }
    rows = _summary_cells(table, args.ring)
    for row in rows:
        row["cohomological_degree"] = -row.pop("degree")
    report["window"] = window_dict(model.window)
    report["cells"] = rows
    report["ok"] = True
    header_rows = [
        {
            "weight": r["weight"],
            "degree": r["cohomological_degree"],
            "group": r["group"],
            "certain": r["certain"],
        }
        for r in rows
        if r["free_rank"] or r["torsion"]
    ]
    edge_zeros = sum(
        1 for r in rows if not (r["free_rank"] or r["torsion"])
    )
    lines.extend(
        render_cell_table(
            header_rows,
            "deformation cohomology (small dual model; nonzero cells, "
            "degree column cohomological):",
        )
    )
    if edge_zeros:
        lines.append(
            f"  ({edge_zeros} zero cells at the window edge omitted; "
            "see the JSON block)"
        )


def cmd_hochschild_full(structure, args, report, lines):
    _need_kind(structure, (AInftyAlgebra,), "hochschild-full")
    window = window_for(structure, args, 6)
    small = hochschild_small_model(
        structure, window=window, dual=_algebra_dual(structure, args)
    )
    mode = "stable-images"
    try:
        stable = hh_full_stable(structure, window)
        full_values = {
            bg: (summary, certain) for bg, (summary, certain) in stable.items()
        }
    except HochschildError:
        mode = "single-stage"
        full = hochschild_full(structure, window)
        full_values = hh_cohomology(full, window)
    small_values = hh_cohomology(small, window)
    mismatches = []
    compared = 0
    for bg in sorted(set(small_values) & set(full_values), key=lambda b: b.cell):
        s_small, c_small = small_values[bg]
        s_full, c_full = full_values[bg]
        if not (c_small and c_full):
            continue
        compared += 1
        a = (s_small.free_rank, tuple(s_small.torsion))
        b = (s_full.free_rank, tuple(s_full.torsion))
        if args.ring == "q":
            a, b = (a[0], ()), (b[0], ())
        if a != b:
            mismatches.append(
                {
                    "weight": bg.weight,
                    "cohomological_degree": bg.cohomological_degree,
                    "small": group_text(a[0], a[1], args.ring),
                    "full": group_text(b[0], b[1], args.ring),
                }
            )
    report["mode"] = mode
    report["compared_cells"] = compared
    report["mismatches"] = mismatches
    report["ok"] = not mismatches and compared > 0
    lines.append(
        f"cross-validation ({mode}): {compared} cells compared, "
        f"{len(mismatches)} mismatches"
    )
    for m in mismatches:
        lines.append(
            f"  weight {m['weight']} degree {m['cohomological_degree']}: "
            f"small {m['small']} vs full {m['full']}"
        )


def _minimal_structure(structure, max_arity: int):
    if not any(
        not op.is_zero() for n, op in structure.operations.items() if n == 1
    ):
        return structure
    cells = {}
    for e in structure.reduced():
        cells.setdefault((e.weight, e.degree), []).append(e.id)
    cx = CellComplex(cells, lambda key: structure.differential(key))
    con = contraction_from_complex(cx, cx.cells.keys())
    return transfer_minimal_structure(structure, con, max_arity)


def cmd_obstructions(structure, args, report, lines):
    _need_kind(structure, (AInftyAlgebra,), "obstructions")
    max_arity = args.max_arity if args.max_arity is not None else 4
    if max_arity < 3:
        raise UsageError("--max-arity must be >= 3 for obstruction reports")
    minimal = _minimal_structure(structure, max_arity)
    result = obstructions_of_minimal(minimal, max_arity)
    report["entries"] = [
        {
            "arity": e.arity,
            "status": e.status,
            "group": group_text(
                e.group.free_rank,
                tuple(e.group.torsion) if args.ring == "z" else (),
                args.ring,
            ),
            "coordinates": (
                list(e.hh_class.coordinates) if e.hh_class is not None else None
            ),
            "certain": e.certain,
        }
        for e in result.entries
    ]
    report["formal"] = result.formal
    report["ok"] = True
    lines.append(result.describe())


def cmd_report(structure, args, report, lines):
    cmd_check(structure, args, report, lines)
    if isinstance(structure, Presentation):
        return
    check_ok = report["ok"]
    lines.append("")
    cmd_certify(structure, args, report, lines)
    report["ok"] = report["ok"] and check_ok
    if isinstance(structure, AInftyAlgebra):
        certify_ok = report["ok"]
        lines.append("")
        cmd_hochschild(structure, args, report, lines)
        report["ok"] = report["ok"] and certify_ok


COMMANDS = {
    "check": cmd_check,
    "bar": cmd_bar,
    "cobar": cmd_cobar,
    "dual": cmd_dual,
    "certify": cmd_certify,
    "hochschild": cmd_hochschild,
    "hochschild-full": cmd_hochschild_full,
    "obstructions": cmd_obstructions,
    "report": cmd_report,
}


def window_dict(window: WindowSpec) -> dict:
    return {
        "max_degree": window.max_total_degree,
        "weight_min": window.weight_min,
        "weight_max": window.weight_max,
    }


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    start = time.monotonic()
    report = {
        "command": args.command,
        "fixture": args.fixture,
        "input": args.input,
        "ring": args.ring,
    }
    if args.seed is not None:
        report["seed"] = args.seed
    lines: List[str] = []
    try:
        structure = resolve_structure(args)
        COMMANDS[args.command](structure, args, report, lines)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    block = canonical_json(report)
    out = sys.stdout
    for line in lines:
        print(line, file=out)
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as fh:
            fh.write(block)
    else:
        print(block, end="", file=out)
    print(
        f"elapsed: {time.monotonic() - start:.2f}s", file=sys.stderr
    )
    return 0 if report.get("ok", True) else 1


if __name__ == "__main__":
    sys.exit(main())
