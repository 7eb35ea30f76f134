"""File format for structures and canonical report serialization.

Structures travel as UTF-8 JSON: a top-level object with ``module``
(ordered array of ``{id, degree, weight}``), ``operations`` (array of
``{arity, entries: [{inputs, output}]}``), ``unit``, and ``kind`` equal
to ``algebra`` or ``coalgebra``.  Structure constants are decimal-string
integers or ``"p/q"`` rationals, never floats.  Loading then dumping is
the identity on the serialized form, basis order included.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Tuple, Union

from ..ainfty import AInftyAlgebra, AInftyCoalgebra, MultiOp, StructureError
from ..graded import BasisElement, BiGradedModule


class InputFormatError(Exception):
    """Malformed structure file; the message points at the JSON location."""


Structure = Union[AInftyAlgebra, AInftyCoalgebra]


def parse_scalar(text, where: str):
    """Exact scalar from a decimal-integer or p/q string (ints pass through)."""
    if isinstance(text, bool):
        raise InputFormatError(f"{where}: expected a scalar, got a boolean")
    if isinstance(text, int):
        return text
    if isinstance(text, str):
        body = text.strip()
        try:
            if "/" in body:
                num, _, den = body.partition("/")
                return Fraction(int(num), int(den))
            return int(body)
        except (ValueError, ZeroDivisionError):
            raise InputFormatError(
                f"{where}: {text!r} is not a decimal integer or p/q rational"
            ) from None
    raise InputFormatError(
        f"{where}: expected a decimal string, got {type(text).__name__}"
    )


def scalar_text(value) -> str:
    return str(value)


def _expect(obj, key, kind, where: str):
    if not isinstance(obj, dict):
        raise InputFormatError(f"{where}: expected an object")
    if key not in obj:
        raise InputFormatError(f"{where}: missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise InputFormatError(
            f"{where}.{key}: expected {kind.__name__}, got {type(val).__name__}"
        )
    return val


def structure_from_dict(data, where: str = "$") -> Structure:
    kind = _expect(data, "kind", str, where)
    if kind not in ("algebra", "coalgebra"):
        raise InputFormatError(
            f"{where}.kind: {kind!r} is not 'algebra' or 'coalgebra'"
        )
    module_raw = _expect(data, "module", list, where)
    elements = []
    for i, entry in enumerate(module_raw):
        spot = f"{where}.module[{i}]"
        eid = _expect(entry, "id", str, spot)
        degree = _expect(entry, "degree", int, spot)
        weight = _expect(entry, "weight", int, spot)
        if isinstance(degree, bool) or isinstance(weight, bool):
            raise InputFormatError(f"{spot}: gradings must be integers")
        elements.append(BasisElement(eid, degree, weight))
    try:
        module = BiGradedModule(elements)
    except StructureError as exc:
        raise InputFormatError(f"{where}.module: {exc}") from None
    unit = data.get("unit")
    if unit is not None and not isinstance(unit, str):
        raise InputFormatError(f"{where}.unit: expected a string id or null")
    operations: Dict[int, MultiOp] = {}
    for i, op_raw in enumerate(_expect(data, "operations", list, where)):
        spot = f"{where}.operations[{i}]"
        arity = _expect(op_raw, "arity", int, spot)
        if isinstance(arity, bool) or arity < 1:
            raise InputFormatError(f"{spot}.arity: expected an integer >= 1")
        if arity in operations:
            raise InputFormatError(f"{spot}: duplicate arity {arity}")
        table: Dict[Tuple[str, ...], Dict[Tuple[str, ...], object]] = {}
        for j, entry in enumerate(_expect(op_raw, "entries", list, spot)):
            espot = f"{spot}.entries[{j}]"
            inputs = _expect(entry, "inputs", list, espot)
            if not all(isinstance(x, str) for x in inputs):
                raise InputFormatError(f"{espot}.inputs: ids must be strings")
            value: Dict[Tuple[str, ...], object] = {}
            for k, term in enumerate(_expect(entry, "output", list, espot)):
                tspot = f"{espot}.output[{k}]"
                tid = _expect(term, "id", str, tspot)
                coeff = parse_scalar(_expect(term, "coeff", None, tspot), tspot)
                out_key = (tid,) if kind == "algebra" else tuple(tid.split("|"))
                value[out_key] = value.get(out_key, 0) + coeff
            key = tuple(inputs)
            if key in table:
                raise InputFormatError(f"{espot}: duplicate inputs {inputs!r}")
            table[key] = {k: v for k, v in value.items() if v}
        try:
            operations[arity] = MultiOp(arity, table)
        except StructureError as exc:
            raise InputFormatError(f"{spot}: {exc}") from None
    name = data.get("name", "")
    if not isinstance(name, str):
        raise InputFormatError(f"{where}.name: expected a string")
    try:
        if kind == "algebra":
            return AInftyAlgebra(module, operations, unit=unit, name=name)
        return AInftyCoalgebra(module, operations, counit=unit, name=name)
    except StructureError as exc:
        raise InputFormatError(f"{where}: {exc}") from None


def load_structure(path: str) -> Structure:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from None
    return structure_from_dict(data, where=path)


def structure_to_dict(structure: Structure) -> dict:
    if isinstance(structure, AInftyAlgebra):
        kind, unit, ops = "algebra", structure.unit, structure.operations
    elif isinstance(structure, AInftyCoalgebra):
        kind, unit, ops = "coalgebra", structure.counit, structure.cooperations
    else:
        raise InputFormatError(
            f"cannot serialize a {type(structure).__name__}"
        )
    module = [
        {"id": e.id, "degree": e.degree, "weight": e.weight}
        for e in structure.module.elements
    ]
    operations = []
    for arity in sorted(ops):
        entries = []
        for inputs in sorted(ops[arity].entries):
            value = ops[arity].entries[inputs]
            output = [
                {"id": "|".join(out_key), "coeff": scalar_text(c)}
                for out_key, c in sorted(value.items())
            ]
            if output:
                entries.append({"inputs": list(inputs), "output": output})
        if entries:
            operations.append({"arity": arity, "entries": entries})
    out = {
        "kind": kind,
        "module": module,
        "unit": unit,
        "operations": operations,
    }
    if structure.name:
        out["name"] = structure.name
    return out


def dump_structure(structure: Structure, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(structure_to_dict(structure)))


def canonical_json(obj) -> str:
    """Deterministic serialized form: sorted keys, two-space indent."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# report rendering


def group_text(free_rank: int, torsion: Tuple[int, ...], ring: str) -> str:
    if ring == "q":
        return f"Q^{free_rank}" if free_rank else "0"
    parts = []
    if free_rank:
        parts.append(f"Z^{free_rank}" if free_rank > 1 else "Z")
    parts.extend(f"Z/{d}" for d in torsion)
    return " + ".join(parts) if parts else "0"


def cell_rows(table, ring: str) -> List[dict]:
    """Sorted JSON rows from a (weight, degree) -> (summary, certain) table."""
    rows = []
    for cell in sorted(table):
        summary, certain = table[cell]
        rows.append(
            {
                "weight": cell[0],
                "degree": cell[1],
                "free_rank": summary.free_rank,
                "torsion": [] if ring == "q" else list(summary.torsion),
                "group": group_text(
                    summary.free_rank,
                    () if ring == "q" else tuple(summary.torsion),
                    ring,
                ),
                "certain": bool(certain),
            }
        )
    return rows


def render_cell_table(rows: List[dict], title: str) -> List[str]:
    """Aligned text table for a list of cell rows."""
    lines = [title]
    if not rows:
        lines.append("  (no cells)")
        return lines
    header = ("weight", "degree", "group", "certain")
    body = [
        (
            str(r["weight"]),
            str(r["degree"]),
            r["group"],
            "yes" if r["certain"] else "edge",
        )
        for r in rows
    ]
    widths = [
        max(len(header[i]), max(len(b[i]) for b in body)) for i in range(4)
    ]
    lines.append(
        "  " + "  ".join(header[i].ljust(widths[i]) for i in range(4))
    )
    for b in body:
        lines.append("  " + "  ".join(b[i].ljust(widths[i]) for i in range(4)))
    return lines
