"""Canonical example structures used by the test suite and the CLI.

Infinite-dimensional examples are materialized up to a degree cap.  The
truncation is self-consistent for every windowed computation here: an
operation output never exceeds the total degree of its inputs plus its
own arity minus two, so as long as windows stay inside the cap, a
missing table row can only correspond to an element the window could
never see.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from ..ainfty import (
    AInftyAlgebra,
    AInftyCoalgebra,
    MultiOp,
    Presentation,
    RewritingRing,
    StructureError,
)
from ..graded import BasisElement, BiGradedModule


class FixtureError(StructureError):
    pass


# ---------------------------------------------------------------------------
# exterior algebras and a minimal nontrivial transfer example


def exterior_algebra(
    names: Tuple[str, ...], extra_d1: Optional[Dict[str, str]] = None
) -> AInftyAlgebra:
    """Exterior algebra on odd generators of bidegree (-1, -1).

    Basis elements are the square-free monomials, identified by the
    concatenation of their generator names in the fixed order.  With
    ``extra_d1`` a differential is added on the listed generators and
    extended as a derivation (terms hitting a repeated generator drop).
    """
    names = tuple(names)
    if len(set(names)) != len(names):
        raise FixtureError("generator names must be distinct")
    subsets: List[Tuple[int, ...]] = [()]
    for i in range(len(names)):
        subsets += [s + (i,) for s in subsets if not s or s[-1] < i]
    subsets.sort(key=lambda s: (len(s), s))

    def sid(s):
        return "".join(names[i] for i in s) if s else "1"

    elements = [
        BasisElement(sid(s), -len(s), -len(s)) for s in subsets
    ]
    module = BiGradedModule(elements)

    def merge_sign(s1, s2):
        if set(s1) & set(s2):
            return None, 0
        merged = tuple(sorted(s1 + s2))
        inversions = sum(1 for i in s1 for j in s2 if i > j)
        return merged, (-1 if inversions % 2 else 1)

    m2: Dict[tuple, Dict[tuple, object]] = {}
    nonunit = [s for s in subsets if s]
    for s1 in nonunit:
        for s2 in nonunit:
            merged, sign = merge_sign(s1, s2)
            if merged is not None and sign:
                m2[(sid(s1), sid(s2))] = {(sid(merged),): sign}

    ops = {2: MultiOp(2, m2)}
    if extra_d1:
        gen_index = {g: i for i, g in enumerate(names)}
        targets: Dict[str, Tuple[int, ...]] = {}
        for g, out in extra_d1.items():
            targets[g] = tuple(sorted(gen_index[c] for c in _split_id(out, names)))
        d1: Dict[tuple, Dict[tuple, object]] = {}
        for s in nonunit:
            acc: Dict[tuple, int] = {}
            for pos, i in enumerate(s):
                g = names[i]
                if g not in targets:
                    continue
                rest = s[:pos] + s[pos + 1 :]
                merged, sign = merge_sign(targets[g], rest)
                if merged is None:
                    continue
                # derivation: pass d over the first `pos` odd letters
                lead = -1 if pos % 2 else 1
                acc[merged] = acc.get(merged, 0) + lead * sign
            acc = {k: v for k, v in acc.items() if v}
            if acc:
                d1[(sid(s),)] = {(sid(k),): v for k, v in acc.items()}
        if d1:
            ops[1] = MultiOp(1, d1)
    return AInftyAlgebra(module, ops, unit="1", name="exterior")


def _split_id(word: str, names: Tuple[str, ...]) -> List[str]:
    """Split a concatenated id back into generator names (greedy, longest first)."""
    order = sorted(names, key=len, reverse=True)
    out = []
    rest = word
    while rest:
        for g in order:
            if rest.startswith(g):
                out.append(g)
                rest = rest[len(g) :]
                break
        else:
            raise FixtureError(f"cannot split id {word!r} over {names}")
    return out


def massey_toy() -> AInftyAlgebra:
    """Exterior algebra on x1, x2, y with d(y) = x1*x2.

    The homology is five-dimensional and carries a nonzero triple
    product: transfer produces m3 sending (x1, x1, x2) to minus the class
    of x1*y.  A standard minimal example of a non-formal differential
    graded algebra detected by a secondary operation.
    """
    return exterior_algebra(("x1", "x2", "y"), extra_d1={"y": "x1x2"})


# ---------------------------------------------------------------------------
# the projective-family algebras


def cpn(n: int, max_degree: int = 20) -> AInftyAlgebra:
    """Minimal model of the degree-(n+1) sphere-bundle family, truncated.

    Basis: unit ``1``, an odd generator ``a`` of bidegree (1, -1), and
    for k >= 1 the elements ``b{k}`` of bidegree (2nk, -2k) and ``ab{k}``
    of bidegree (2nk+1, -2k-1).  The binary product is the monomial one
    with unit coefficients; for n >= 2 products of two odd elements
    vanish and a single higher operation of arity n+1 multiplies odd
    elements into ``b`` powers.  For n = 1 the square of the odd
    generator is already the even one and there is no higher operation.
    """
    if n < 1:
        raise FixtureError("need n >= 1")
    if max_degree < 2 * n:
        raise FixtureError("cap too small to hold any even generator")
    elements = [BasisElement("1", 0, 0), BasisElement("a", 1, -1)]
    k = 1
    while 2 * n * k <= max_degree:
        elements.append(BasisElement(f"b{k}", 2 * n * k, -2 * k))
        if 2 * n * k + 1 <= max_degree:
            elements.append(BasisElement(f"ab{k}", 2 * n * k + 1, -2 * k - 1))
        k += 1
    module = BiGradedModule(elements)

    def odd_id(k):
        return "a" if k == 0 else f"ab{k}"

    def even_in(k):
        return f"b{k}" in module.by_id

    def odd_in(k):
        return odd_id(k) in module.by_id

    max_even = max((k for k in range(max_degree) if even_in(k)), default=0)
    max_odd = max((k for k in range(max_degree) if odd_in(k)), default=0)

    m2: Dict[tuple, Dict[tuple, object]] = {}
    # even * even and the even/odd cross products, all with coefficient 1
    for k1 in range(1, max_even + 1):
        for k2 in range(1, max_even + 1):
            if even_in(k1) and even_in(k2) and even_in(k1 + k2):
                m2[(f"b{k1}", f"b{k2}")] = {(f"b{k1+k2}",): 1}
    for k1 in range(0, max_odd + 1):
        for k2 in range(1, max_even + 1):
            if odd_in(k1) and even_in(k2) and odd_in(k1 + k2):
                m2[(odd_id(k1), f"b{k2}")] = {(odd_id(k1 + k2),): 1}
                m2[(f"b{k2}", odd_id(k1))] = {(odd_id(k1 + k2),): 1}
    ops: Dict[int, MultiOp] = {}
    if n == 1:
        for k1 in range(0, max_odd + 1):
            for k2 in range(0, max_odd + 1):
                if odd_in(k1) and odd_in(k2) and even_in(k1 + k2 + 1):
                    m2[(odd_id(k1), odd_id(k2))] = {(f"b{k1+k2+1}",): 1}
        ops[2] = MultiOp(2, m2)
    else:
        ops[2] = MultiOp(2, m2)
        higher: Dict[tuple, Dict[tuple, object]] = {}
        odds = [k for k in range(0, max_odd + 1) if odd_in(k)]
        for tup in _tuples(odds, n + 1):
            total = sum(tup) + 1
            if even_in(total):
                higher[tuple(odd_id(k) for k in tup)] = {(f"b{total}",): 1}
        if higher:
            ops[n + 1] = MultiOp(n + 1, higher)
    return AInftyAlgebra(module, ops, unit="1", name=f"CP{n}")


def _tuples(pool, length):
    if length == 0:
        yield ()
        return
    for head in pool:
        for rest in _tuples(pool, length - 1):
            yield (head,) + rest


def cpn_dual(n: int) -> AInftyCoalgebra:
    """Hand-built weight-zero cycle coalgebra for the ``cpn`` family.

    Elements ``x0`` (counit) through ``xn`` with degrees 0, 2, ..., 2n,
    all of weight zero, under the splitting comultiplication
    x_i -> sum of x_j (x) x_{i-j}.
    """
    if n < 1:
        raise FixtureError("need n >= 1")
    elements = [BasisElement(f"x{i}", 2 * i, 0) for i in range(n + 1)]
    module = BiGradedModule(elements)
    entries: Dict[tuple, Dict[tuple, object]] = {}
    for i in range(2, n + 1):
        entries[(f"x{i}",)] = {
            (f"x{j}", f"x{i-j}"): 1 for j in range(1, i)
        }
    coops = {2: MultiOp(2, entries)} if entries else {}
    return AInftyCoalgebra(module, coops, counit="x0", name=f"CP{n}-dual")


# ---------------------------------------------------------------------------
# the closed seven-manifold example


def seven_manifold_coalgebra() -> AInftyCoalgebra:
    """Homology coalgebra of a closed 2-connected 7-manifold with
    second Betti number two, with its one ternary correction.

    Degrees 0, 2, 2, 5, 5, 7 and weights 0, 1, 1, 2, 2, 3; the binary
    part pairs the degree-2 and degree-5 lines into the fundamental
    class, and the ternary part records the two linking triple products.
    """
    elements = [
        BasisElement("1", 0, 0),
        BasisElement("a", 2, 1),
        BasisElement("b", 2, 1),
        BasisElement("x", 5, 2),
        BasisElement("y", 5, 2),
        BasisElement("M", 7, 3),
    ]
    module = BiGradedModule(elements)
    coops = {
        2: MultiOp(
            2,
            {
                ("M",): {
                    ("a", "x"): 1,
                    ("x", "a"): 1,
                    ("b", "y"): -1,
                    ("y", "b"): -1,
                }
            },
        ),
        3: MultiOp(
            3,
            {
                ("x",): {("a", "b", "b"): 1, ("b", "b", "a"): -1},
                ("y",): {("a", "a", "b"): 1, ("b", "a", "a"): -1},
            },
        ),
    }
    return AInftyCoalgebra(module, coops, counit="1", name="M7")


def seven_manifold_presentation() -> Presentation:
    """Quadratic presentation of the degree-zero loop-space ring:
    two degree-one generators with both commutators [[a,b],b] and
    [[a,b],a] set to zero, written as straightening relations."""
    return Presentation(
        (("a", 1), ("b", 1)),
        (
            {("a", "b", "b"): 1, ("b", "b", "a"): -1},
            {("a", "a", "b"): 1, ("b", "a", "a"): -1},
        ),
    )


def seven_manifold_ring() -> RewritingRing:
    """Rewriting realization of the same ring.

    Precedence lists ``b`` before ``a`` so both straightening rules
    reduce in degree-lexicographic order; normal forms are the words
    b^k (ab)^l a^m.
    """
    return RewritingRing(
        (("b", 1), ("a", 1)),
        {
            ("a", "a", "b"): {("b", "a", "a"): 1},
            ("a", "b", "b"): {("b", "b", "a"): 1},
        },
    )


# ---------------------------------------------------------------------------
# generic builders


def tensor_coalgebra(
    letters: Tuple[Tuple[str, int, int], ...], max_degree: int = 6
) -> AInftyCoalgebra:
    """Deconcatenation coalgebra on words in graded letters.

    Letters are (id, degree, weight) with degree and weight >= 1 so the
    word count under a degree cap is finite; ids must be single
    characters so that concatenated word ids parse unambiguously.
    """
    if not letters:
        raise FixtureError("tensor coalgebra needs at least one letter")
    seen = set()
    for lid, deg, wt in letters:
        if len(lid) != 1 or not lid.isalpha():
            raise FixtureError(f"letter id {lid!r} must be a single letter")
        if lid in seen:
            raise FixtureError(f"duplicate letter id {lid!r}")
        seen.add(lid)
        if deg < 1 or wt < 1:
            raise FixtureError(
                f"letter {lid!r} needs degree and weight >= 1, got ({deg}, {wt})"
            )
    grades = {lid: (deg, wt) for lid, deg, wt in letters}
    words = [""]
    elements = [BasisElement("1", 0, 0)]
    frontier = [""]
    while frontier:
        nxt = []
        for w in frontier:
            for lid, deg, wt in letters:
                word = w + lid
                degree = sum(grades[c][0] for c in word)
                if degree > max_degree:
                    continue
                nxt.append(word)
                elements.append(
                    BasisElement(word, degree, sum(grades[c][1] for c in word))
                )
                if len(elements) > 4000:
                    raise FixtureError(
                        "tensor coalgebra exceeds 4000 words; lower max degree"
                    )
        words.extend(nxt)
        frontier = nxt
    entries: Dict[Tuple[str, ...], Dict[Tuple[str, ...], int]] = {}
    for w in words:
        if len(w) >= 2:
            entries[(w,)] = {(w[:i], w[i:]): 1 for i in range(1, len(w))}
    return AInftyCoalgebra(
        BiGradedModule(elements),
        {2: MultiOp(2, entries)},
        counit="1",
        name=f"tensor({','.join(lid for lid, _, _ in letters)})",
    )


def quadratic_presentation(
    generators: Tuple[Tuple[str, int], ...],
    relation_specs: Tuple[str, ...],
) -> Presentation:
    """Presentation with length-two relations parsed from compact strings.

    Each relation string is a signed sum of two-letter monomials with
    optional integer coefficients, e.g. ``"ab+ba"`` or ``"2aa-bb"``;
    generator ids must be single characters.
    """
    for name, _ in generators:
        if len(name) != 1 or not name.isalpha():
            raise FixtureError(f"generator id {name!r} must be a single letter")
    names = {name for name, _ in generators}
    relations = []
    for spec in relation_specs:
        rel: Dict[Tuple[str, ...], int] = {}
        for m in re.finditer(r"([+-]?\d*)([A-Za-z]+)|(.)", spec.replace(" ", "")):
            if m.group(3) is not None:
                raise FixtureError(
                    f"relation {spec!r}: unexpected character {m.group(3)!r}"
                )
            coeff_text, word = m.group(1), m.group(2)
            coeff = int(coeff_text) if coeff_text not in ("", "+", "-") else (
                -1 if coeff_text == "-" else 1
            )
            if len(word) != 2:
                raise FixtureError(
                    f"relation {spec!r}: monomial {word!r} is not quadratic"
                )
            for c in word:
                if c not in names:
                    raise FixtureError(
                        f"relation {spec!r}: unknown generator {c!r}"
                    )
            key = tuple(word)
            rel[key] = rel.get(key, 0) + coeff
        rel = {k: v for k, v in rel.items() if v}
        if not rel:
            raise FixtureError(f"relation {spec!r} is empty after collection")
        relations.append(rel)
    return Presentation(tuple(generators), tuple(relations))


# ---------------------------------------------------------------------------
# registry for the command line


def available_fixtures() -> List[str]:
    return [
        "cpn:<n>",
        "cpn-dual:<n>",
        "seven-manifold",
        "seven-manifold-ring",
        "exterior:<k>",
        "massey",
        "tensor:<id>:<degree>:<weight>,...",
        "quadratic:<id>:<degree>,...;<relation>,...",
    ]


def get_fixture(spec: str, max_degree: Optional[int] = None):
    """Resolve a fixture name like ``cpn:2`` or ``seven-manifold``."""
    name, _, arg = spec.partition(":")
    if name == "cpn":
        n = _positive(arg, spec)
        return cpn(n, max_degree if max_degree is not None else 20)
    if name == "cpn-dual":
        return cpn_dual(_positive(arg, spec))
    if name == "seven-manifold":
        return seven_manifold_coalgebra()
    if name == "seven-manifold-ring":
        return seven_manifold_presentation()
    if name == "exterior":
        k = _positive(arg, spec)
        return exterior_algebra(tuple(f"e{i}" for i in range(1, k + 1)))
    if name == "massey":
        return massey_toy()
    if name == "tensor":
        letters = []
        for part in arg.split(","):
            bits = part.split(":")
            if len(bits) != 3:
                raise FixtureError(
                    f"fixture {spec!r}: letter {part!r} is not id:degree:weight"
                )
            try:
                letters.append((bits[0], int(bits[1]), int(bits[2])))
            except ValueError:
                raise FixtureError(
                    f"fixture {spec!r}: letter {part!r} has non-integer grading"
                ) from None
        return tensor_coalgebra(
            tuple(letters), max_degree if max_degree is not None else 6
        )
    if name == "quadratic":
        gen_part, _, rel_part = arg.partition(";")
        gens = []
        for part in gen_part.split(","):
            bits = part.split(":")
            if len(bits) != 2:
                raise FixtureError(
                    f"fixture {spec!r}: generator {part!r} is not id:degree"
                )
            try:
                gens.append((bits[0], int(bits[1])))
            except ValueError:
                raise FixtureError(
                    f"fixture {spec!r}: generator {part!r} has non-integer degree"
                ) from None
        rels = tuple(r for r in rel_part.split(",") if r)
        return quadratic_presentation(tuple(gens), rels)
    raise FixtureError(
        f"unknown fixture {spec!r}; available: {', '.join(available_fixtures())}"
    )


def _positive(arg: str, spec: str) -> int:
    try:
        n = int(arg)
    except ValueError:
        raise FixtureError(f"fixture {spec!r} needs a numeric parameter") from None
    if n < 1:
        raise FixtureError(f"fixture {spec!r} needs a parameter >= 1")
    return n
