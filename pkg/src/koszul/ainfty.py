"""Homotopy-associative algebra and coalgebra structures over Z.

A structure is a finite family of multilinear operation tables on a
bigraded basis.  The n-ary operation has degree and weight n - 2, so the
differential (n = 1) drops both by one, the product (n = 2) preserves
them, and higher operations raise them.  Algebras here are negatively
graded and coalgebras positively graded, but nothing in this module
enforces a sign of grading beyond what the tables say.

Conventions, fixed once and used everywhere:

* Operations are evaluated with the usual sign ``(-1)**(r*s + t)`` for
  substituting an s-ary operation after r leading arguments with t
  trailing ones, times the crossing sign ``(-1)**(s * |x_1..x_r|)`` of
  moving the inner operation past the leading arguments.
* Tensor operators pick up ``(-1)**(sum |f_j| * |x_i| for i < j)`` when
  evaluated on a tensor of homogeneous inputs; every such sign in the
  package is produced by ``graded.koszul_sign`` plus an explicit
  exponent.
* Structures are strictly (co)unital: the (co)unit never appears in a
  table input; the binary operation absorbs it and every other arity
  kills it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exactla import (
    HomologySummary,
    SparseIntMat,
    coker_summary,
    invert_unimodular,
    kernel_basis,
    smith_normal_form,
)
from .graded import (
    BasisElement,
    BiGradedModule,
    CellComplex,
    Elem,
    GradedError,
    GradedMap,
    TensorWord,
    add_into,
    apply_linear,
    finish,
    koszul_sign,
)


class StructureError(GradedError):
    pass


class ContractionError(StructureError):
    pass


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# operation tables


class MultiOp:
    """A single n-ary operation as a sparse table.

    ``entries`` maps an input id tuple to a dict of output id tuples with
    nonzero coefficients.  Algebra operations have n-tuple inputs and
    1-tuple outputs; coalgebra cooperations have 1-tuple inputs and
    n-tuple outputs.  The table is normalized on construction: zero
    coefficients and empty rows are dropped.
    """

    __slots__ = ("arity", "entries")

    def __init__(self, arity: int, entries: Dict[tuple, Dict[tuple, object]]):
        if arity < 1:
            raise StructureError("operation arity must be >= 1")
        self.arity = arity
        self.entries: Dict[tuple, Dict[tuple, object]] = {}
        for tin, outs in entries.items():
            tin = tuple(tin)
            row = {}
            for tout, c in outs.items():
                tout = tuple(tout)
                if len(tin) == arity and len(tout) == 1:
                    pass
                elif len(tin) == 1 and len(tout) == arity:
                    pass
                else:
                    raise StructureError(
                        f"entry shape {len(tin)} -> {len(tout)} does not fit "
                        f"arity {arity}"
                    )
                if isinstance(c, Fraction) and c.denominator == 1:
                    c = int(c)
                if c:
                    row[tout] = row.get(tout, 0) + c
            row = {k: v for k, v in row.items() if v}
            if row:
                if tin in self.entries:
                    raise StructureError(f"duplicate table row {tin!r}")
                self.entries[tin] = row

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (
            isinstance(other, MultiOp)
            and self.arity == other.arity
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"MultiOp(arity={self.arity}, rows={len(self.entries)})"


class AInftyAlgebra:
    """A strictly unital homotopy-associative algebra on a finite basis.

    ``operations[n]`` is the n-ary table over non-unit basis ids.  The
    unit acts structurally: the product absorbs it, all other arities
    vanish on it.  ``unit=None`` means the structure is non-unital (all
    evaluation is table lookup).
    """

    def __init__(
        self,
        module: BiGradedModule,
        operations: Dict[int, MultiOp],
        unit: Optional[str] = None,
        name: str = "",
    ):
        self.module = module
        self.unit = unit
        self.name = name
        self.operations: Dict[int, MultiOp] = {}
        for n, op in operations.items():
            if op.arity != n:
                raise StructureError(f"arity key {n} holds a {op.arity}-ary table")
            if op.is_zero():
                continue
            for tin, outs in op.entries.items():
                if len(tin) != n:
                    raise StructureError("algebra table must have n-tuple inputs")
                for i in tin:
                    if i not in module:
                        raise StructureError(f"unknown input id {i!r}")
                    if unit is not None and i == unit:
                        raise StructureError("unit may not appear as a table input")
                for tout in outs:
                    if tout[0] not in module:
                        raise StructureError(f"unknown output id {tout[0]!r}")
            self.operations[n] = op
        if unit is not None:
            if unit not in module:
                raise StructureError(f"unit {unit!r} not in module")
            ue = module[unit]
            if ue.degree != 0 or ue.weight != 0:
                raise StructureError("unit must sit in bidegree (0, 0)")

    @property
    def max_arity(self) -> int:
        return max(self.operations, default=0)

    def reduced(self) -> Tuple[BasisElement, ...]:
        return tuple(e for e in self.module if e.id != self.unit)

    def op_value(self, n: int, ids: Sequence[str]) -> Elem:
        """Evaluate the n-ary operation on basis elements."""
        ids = tuple(ids)
        if len(ids) != n:
            raise StructureError(f"expected {n} arguments, got {len(ids)}")
        if self.unit is not None and self.unit in ids:
            if n == 2:
                a, b = ids
                return Elem.basis(b if a == self.unit else a)
            return Elem()
        op = self.operations.get(n)
        if op is None:
            return Elem()
        row = op.entries.get(ids)
        if not row:
            return Elem()
        return Elem({t[0]: c for t, c in row.items()})

    def differential(self, eid: str) -> Elem:
        return self.op_value(1, (eid,))


class AInftyCoalgebra:
    """A strictly counital homotopy-coassociative coalgebra.

    Cooperation tables are reduced: the counit never appears in inputs or
    outputs.  ``coop_value`` can reinstate the counit terms of the binary
    coproduct (``c -> 1|c + c|1 + reduced``) on demand.
    """

    def __init__(
        self,
        module: BiGradedModule,
        cooperations: Dict[int, MultiOp],
        counit: Optional[str] = None,
        name: str = "",
    ):
        self.module = module
        self.counit = counit
        self.name = name
        self._diff_cache: Dict[object, Elem] = {}
        self.cooperations: Dict[int, MultiOp] = {}
        for n, op in cooperations.items():
            if op.arity != n:
                raise StructureError(f"arity key {n} holds a {op.arity}-ary table")
            if op.is_zero():
                continue
            for tin, outs in op.entries.items():
                if len(tin) != 1:
                    raise StructureError("coalgebra table must have 1-tuple inputs")
                if tin[0] not in module:
                    raise StructureError(f"unknown input id {tin[0]!r}")
                if counit is not None and tin[0] == counit:
                    raise StructureError("counit may not appear as a table input")
                for tout in outs:
                    for i in tout:
                        if i not in module:
                            raise StructureError(f"unknown output id {i!r}")
                        if counit is not None and i == counit:
                            raise StructureError(
                                "counit may not appear in a table output"
                            )
            self.cooperations[n] = op
        if counit is not None:
            if counit not in module:
                raise StructureError(f"counit {counit!r} not in module")
            ce = module[counit]
            if ce.degree != 0 or ce.weight != 0:
                raise StructureError("counit must sit in bidegree (0, 0)")

    @property
    def max_arity(self) -> int:
        return max(self.cooperations, default=0)

    def reduced(self) -> Tuple[BasisElement, ...]:
        return tuple(e for e in self.module if e.id != self.counit)

    def coop_value(self, n: int, cid: str, reduced: bool = True) -> Elem:
        """The n-ary cooperation of a basis element, as Elem over id tuples."""
        if self.counit is not None and cid == self.counit:
            if not reduced and n == 2:
                return Elem({(self.counit, self.counit): 1})
            return Elem()
        acc: dict = {}
        op = self.cooperations.get(n)
        if op is not None:
            row = op.entries.get((cid,))
            if row:
                for tout, c in row.items():
                    acc[tout] = acc.get(tout, 0) + c
        if not reduced and n == 2 and self.counit is not None:
            acc[(self.counit, cid)] = acc.get((self.counit, cid), 0) + 1
            acc[(cid, self.counit)] = acc.get((cid, self.counit), 0) + 1
        return finish(acc)

    def differential(self, cid: str) -> Elem:
        cached = self._diff_cache.get(cid)
        if cached is None:
            val = self.coop_value(1, cid)
            cached = Elem({t[0]: c for t, c in val.items()})
            self._diff_cache[cid] = cached
        return cached


# ---------------------------------------------------------------------------
# structure checks


def check_weight_grading(structure) -> List[str]:
    """Verify every table entry shifts degree and weight by arity - 2."""
    problems = []
    if isinstance(structure, AInftyAlgebra):
        tables = structure.operations
    else:
        tables = structure.cooperations
    mod = structure.module
    for n, op in sorted(tables.items()):
        for tin, outs in op.entries.items():
            din = sum(mod.degree(i) for i in tin)
            win = sum(mod.weight(i) for i in tin)
            for tout in outs:
                dout = sum(mod.degree(i) for i in tout)
                wout = sum(mod.weight(i) for i in tout)
                if not (dout == din + n - 2 and wout == win + n - 2):
                    problems.append(
                        f"arity {n}: {tin} -> {tout} violates the "
                        f"(degree, weight) + ({n - 2}, {n - 2}) rule"
                    )
    return problems


def stasheff_defect(alg: AInftyAlgebra, n: int, ids: Tuple[str, ...]) -> Elem:
    """The higher-associativity sum of arity n on one input tuple.

    Zero for every n and tuple exactly when the tables form a valid
    structure.  Terms run over splittings r + s + t = n with the inner
    s-ary operation applied after r leading arguments.
    """
    degs = [alg.module.degree(i) for i in ids]
    acc: dict = {}
    for s in range(1, n + 1):
        u = n - s + 1
        for r in range(0, n - s + 1):
            t = n - s - r
            inner = alg.op_value(s, ids[r : r + s])
            if not inner:
                continue
            sign = _sgn(r * s + t) * _sgn(s * sum(degs[:r]))
            for mid, c in inner.items():
                outer = alg.op_value(u, ids[:r] + (mid,) + ids[r + s :])
                add_into(acc, outer, sign * c)
    return finish(acc)


def _stasheff_candidates(alg: AInftyAlgebra, n: int) -> set:
    """Input tuples on which some term of the arity-n sum can fire.

    Tuples outside this set evaluate to zero term by term, so checking
    only the joined tuples is a complete check over the non-unit basis.
    Tuples containing the unit are excluded: strict unitality makes their
    sums collapse to a two-term cancellation that holds identically.
    """
    cands = set()
    reduced_ids = [e.id for e in alg.reduced()]
    for s, inner_op in alg.operations.items():
        u = n - s + 1
        if u < 1:
            continue
        outer_op = alg.operations.get(u)
        for tin, outs in inner_op.entries.items():
            for tout in outs:
                y = tout[0]
                if outer_op is not None:
                    for ot in outer_op.entries:
                        for p, letter in enumerate(ot):
                            if letter == y:
                                cands.add(ot[:p] + tin + ot[p + 1 :])
                if u == 2 and alg.unit is not None and y == alg.unit:
                    for z in reduced_ids:
                        cands.add(tin + (z,))
                        cands.add((z,) + tin)
    return cands


def check_stasheff(
    alg: AInftyAlgebra,
    max_n: Optional[int] = None,
    degree_cap: Optional[int] = None,
) -> List[Tuple[int, Tuple[str, ...], Elem]]:
    """All violations of the higher-associativity identities.

    Identities of arity above ``2 * max_arity - 1`` are term-free and
    hold trivially, so that is the default range.  ``degree_cap`` skips
    tuples whose output degree falls outside ``[-cap, cap]``; use it for
    structures materialized only through a finite degree range.
    """
    top = max_n if max_n is not None else 2 * alg.max_arity - 1
    bad = []
    for n in range(1, top + 1):
        for ids in sorted(_stasheff_candidates(alg, n)):
            if degree_cap is not None:
                dout = sum(alg.module.degree(i) for i in ids) + n - 2
                if abs(dout) > degree_cap:
                    continue
            defect = stasheff_defect(alg, n, ids)
            if not defect.is_zero():
                bad.append((n, ids, defect))
    return bad


def costasheff_defect(coalg: AInftyCoalgebra, n: int, cid: str) -> Elem:
    """The arity-n coassociativity sum on one basis element."""
    acc: dict = {}
    mod = coalg.module
    for s in range(1, n + 1):
        u = n - s + 1
        outer = coalg.coop_value(u, cid)
        if not outer:
            continue
        for r in range(0, u):
            t = u - 1 - r
            base = _sgn(r * s + t)
            for tup, c in outer.items():
                inner = coalg.coop_value(s, tup[r])
                if not inner:
                    continue
                sign = base * _sgn(s * sum(mod.degree(tup[i]) for i in range(r)))
                for itup, c2 in inner.items():
                    key = tup[:r] + itup + tup[r + 1 :]
                    acc[key] = acc.get(key, 0) + sign * c * c2
    return finish(acc)


def check_costasheff(
    coalg: AInftyCoalgebra, max_n: Optional[int] = None
) -> List[Tuple[int, str, Elem]]:
    """All violations of the coassociativity identities on the reduced basis."""
    top = max_n if max_n is not None else 2 * coalg.max_arity - 1
    bad = []
    for n in range(1, top + 1):
        for e in coalg.reduced():
            defect = costasheff_defect(coalg, n, e.id)
            if not defect.is_zero():
                bad.append((n, e.id, defect))
    return bad


# ---------------------------------------------------------------------------
# linear duality (finite type)


def _reversal_sign(degrees: Sequence[int]) -> int:
    """Sign of evaluating a tensor of duals on the matching tensor.

    Pairing ``f_1|...|f_n`` against ``x_1|...|x_n`` crosses every dual
    past every earlier argument, which is the sign of the full reversal.
    """
    n = len(degrees)
    return koszul_sign(tuple(range(n - 1, -1, -1)), tuple(degrees))


def dual_algebra_of(coalg: AInftyCoalgebra, name: str = "") -> AInftyAlgebra:
    """The graded-dual algebra of a finite coalgebra.

    Basis ids are reused for their dual functionals; degrees and weights
    flip sign.  The n-ary product of duals pairs against the n-ary
    cooperation with the tensor evaluation sign.
    """
    module = BiGradedModule(
        BasisElement(e.id, -e.degree, -e.weight) for e in coalg.module
    )
    ops: Dict[int, MultiOp] = {}
    for n, coop in coalg.cooperations.items():
        entries: Dict[tuple, Dict[tuple, object]] = {}
        for tin, outs in coop.entries.items():
            for tup, c in outs.items():
                sign = _reversal_sign([coalg.module.degree(i) for i in tup])
                row = entries.setdefault(tup, {})
                row[tin] = row.get(tin, 0) + sign * c
        ops[n] = MultiOp(n, entries)
    return AInftyAlgebra(module, ops, unit=coalg.counit, name=name or coalg.name)


def dual_coalgebra_of(alg: AInftyAlgebra, name: str = "") -> AInftyCoalgebra:
    """The graded-dual coalgebra of a finite algebra; inverse of the above."""
    module = BiGradedModule(
        BasisElement(e.id, -e.degree, -e.weight) for e in alg.module
    )
    coops: Dict[int, MultiOp] = {}
    for n, op in alg.operations.items():
        entries: Dict[tuple, Dict[tuple, object]] = {}
        for tin, outs in op.entries.items():
            sign = _reversal_sign([alg.module.degree(i) for i in tin])
            for tout, c in outs.items():
                row = entries.setdefault(tout, {})
                row[tin] = row.get(tin, 0) + sign * c
        coops[n] = MultiOp(n, entries)
    return AInftyCoalgebra(module, coops, counit=alg.unit, name=name or alg.name)


# ---------------------------------------------------------------------------
# word-level differential of the reduced cofree construction
#
# This sits here rather than with the bar/cobar complexes because the
# homotopy transfer below perturbs along the same formula and must not
# depend on the complex-assembly layer.


def bar_differential_of_word(
    alg: AInftyAlgebra,
    word: TensorWord,
    min_arity: int = 1,
    max_arity: Optional[int] = None,
) -> Elem:
    """Differential of a word of suspended algebra elements.

    Each n-ary table contracts n adjacent letters; the sign is the parity
    of ``1 + |sx_1..sx_k| + sum (n-j) |sx_{k+j}|`` for a contraction
    starting after ``k`` letters, with ``|sx| = |x| + 1``.  Output
    components on the unit are projected away (the construction lives on
    the non-unit part).
    """
    letters = word.letters
    m = len(letters)
    sdegs = [l.degree + 1 for l in letters]
    acc: dict = {}
    arities = sorted(n for n in alg.operations if n >= min_arity)
    for n in arities:
        if max_arity is not None and n > max_arity:
            continue
        if n > m:
            continue
        for k in range(0, m - n + 1):
            eps = 1 + sum(sdegs[:k]) + sum(
                (n - j) * sdegs[k + j - 1] for j in range(1, n + 1)
            )
            sign = _sgn(eps)
            val = alg.op_value(n, tuple(l.id for l in letters[k : k + n]))
            for mid, c in val.items():
                if mid == alg.unit:
                    continue
                new_word = TensorWord(
                    letters[:k] + (alg.module[mid],) + letters[k + n :], 1
                )
                acc[new_word] = acc.get(new_word, 0) + sign * c
    return finish(acc)


# ---------------------------------------------------------------------------
# presentations, quotients, rewriting


@dataclass
class Presentation:
    """Generators and homogeneous relations of an associative ring.

    ``generators`` is an ordered tuple of (name, degree) with degrees
    >= 1; ``relations`` are dicts from generator-name words to integer
    coefficients, each homogeneous.
    """

    generators: Tuple[Tuple[str, int], ...]
    relations: Tuple[Dict[Tuple[str, ...], int], ...]

    def __post_init__(self):
        self.generators = tuple((str(n), int(d)) for n, d in self.generators)
        names = [n for n, _ in self.generators]
        if len(set(names)) != len(names):
            raise StructureError("duplicate generator names")
        if any(d < 1 for _, d in self.generators):
            raise StructureError("generator degrees must be >= 1")
        self._deg = dict(self.generators)
        rels = []
        for rel in self.relations:
            rel = {tuple(w): int(c) for w, c in rel.items() if c}
            if rel:
                degs = {self.word_degree(w) for w in rel}
                if len(degs) != 1:
                    raise StructureError(f"inhomogeneous relation {rel!r}")
                rels.append(rel)
        self.relations = tuple(rels)

    def word_degree(self, word: Tuple[str, ...]) -> int:
        return sum(self._deg[g] for g in word)

    def monomials(self, degree: int) -> List[Tuple[str, ...]]:
        """All generator words of the given total degree, in stable order."""
        if degree == 0:
            return [()]
        if degree < 0:
            return []
        out = []
        for name, d in self.generators:
            if d <= degree:
                out.extend((name,) + w for w in self.monomials(degree - d))
        return out


def quotient_algebra(
    pres: Presentation, max_degree: int
) -> Dict[int, HomologySummary]:
    """Degreewise structure of the quotient of the free ring by the ideal.

    For each degree the span of ``u * relation * v`` inside the free
    words is divided out exactly, so ranks and any torsion are reported
    honestly.  Intended as an independent check against normal-form
    bases; cost grows with the word count, so keep ``max_degree`` modest.
    """
    out: Dict[int, HomologySummary] = {}
    for d in range(0, max_degree + 1):
        basis = pres.monomials(d)
        index = {w: i for i, w in enumerate(basis)}
        cols = []
        for rel in pres.relations:
            rd = pres.word_degree(next(iter(rel)))
            for du in range(0, d - rd + 1):
                for u in pres.monomials(du):
                    for v in pres.monomials(d - rd - du):
                        vec: dict = {}
                        for w, c in rel.items():
                            full = u + w + v
                            vec[index[full]] = vec.get(index[full], 0) + c
                        cols.append(vec)
        entries = {
            (i, j): c for j, col in enumerate(cols) for i, c in col.items() if c
        }
        mat = SparseIntMat(len(basis), len(cols), entries)
        out[d] = coker_summary(mat)
    return out


class RewritingRing:
    """An associative ring of integer combinations of generator words,
    reduced by a terminating rewriting system.

    ``rules`` maps a leading word to its replacement combination.  Each
    replacement word must be homogeneous of the same degree and strictly
    smaller in degree-lexicographic order (generators compared by their
    position in ``generators``), which forces every reduction chain to
    terminate.  Confluence is the caller's responsibility and should be
    property-tested per instance; normal forms are computed with a fixed
    leftmost strategy so results are at least deterministic either way.
    """

    def __init__(
        self,
        generators: Sequence[Tuple[str, int]],
        rules: Dict[Tuple[str, ...], Dict[Tuple[str, ...], int]],
    ):
        self.generators = tuple((str(n), int(d)) for n, d in generators)
        self._deg = dict(self.generators)
        self._order = {n: i for i, (n, _) in enumerate(self.generators)}
        if len(self._order) != len(self.generators):
            raise StructureError("duplicate generator names")
        self.rules: Dict[Tuple[str, ...], Dict[Tuple[str, ...], int]] = {}
        for lead, repl in rules.items():
            lead = tuple(lead)
            repl = {tuple(w): int(c) for w, c in repl.items() if c}
            ld = self.word_degree(lead)
            for w in repl:
                if self.word_degree(w) != ld:
                    raise StructureError("rewriting rule must preserve degree")
                if not self._smaller(w, lead):
                    raise StructureError(
                        f"replacement {w!r} not below {lead!r} in deglex order"
                    )
            self.rules[lead] = repl
        self._rule_list = sorted(self.rules)
        self._nf_cache: Dict[Tuple[str, ...], Dict[Tuple[str, ...], int]] = {}

    def word_degree(self, word: Tuple[str, ...]) -> int:
        return sum(self._deg[g] for g in word)

    def _smaller(self, a: Tuple[str, ...], b: Tuple[str, ...]) -> bool:
        ka = (self.word_degree(a), [self._order[g] for g in a])
        kb = (self.word_degree(b), [self._order[g] for g in b])
        return ka < kb

    def _first_redex(self, word: Tuple[str, ...]):
        for pos in range(len(word)):
            for lead in self._rule_list:
                if word[pos : pos + len(lead)] == lead:
                    return pos, lead
        return None

    def word_normal_form(self, word: Tuple[str, ...]) -> Dict[Tuple[str, ...], int]:
        word = tuple(word)
        cached = self._nf_cache.get(word)
        if cached is not None:
            return cached
        hit = self._first_redex(word)
        if hit is None:
            result = {word: 1}
        else:
            pos, lead = hit
            acc: Dict[Tuple[str, ...], int] = {}
            for repl, c in self.rules[lead].items():
                sub = self.word_normal_form(
                    word[:pos] + repl + word[pos + len(lead) :]
                )
                for w, c2 in sub.items():
                    acc[w] = acc.get(w, 0) + c * c2
            result = {w: c for w, c in acc.items() if c}
        self._nf_cache[word] = result
        return result

    def normal_form(
        self, elem: Dict[Tuple[str, ...], int]
    ) -> Dict[Tuple[str, ...], int]:
        acc: Dict[Tuple[str, ...], int] = {}
        for w, c in elem.items():
            if not c:
                continue
            for nw, c2 in self.word_normal_form(tuple(w)).items():
                acc[nw] = acc.get(nw, 0) + c * c2
        return {w: c for w, c in acc.items() if c}

    def mul(
        self,
        a: Dict[Tuple[str, ...], int],
        b: Dict[Tuple[str, ...], int],
    ) -> Dict[Tuple[str, ...], int]:
        acc: Dict[Tuple[str, ...], int] = {}
        for wa, ca in a.items():
            for wb, cb in b.items():
                for w, c in self.word_normal_form(tuple(wa) + tuple(wb)).items():
                    acc[w] = acc.get(w, 0) + ca * cb * c
        return {w: c for w, c in acc.items() if c}

    def one(self) -> Dict[Tuple[str, ...], int]:
        return {(): 1}

    def element_degree(self, elem: Dict[Tuple[str, ...], int]) -> Optional[int]:
        degs = {self.word_degree(w) for w in elem}
        if not degs:
            return None
        if len(degs) > 1:
            raise StructureError("element is not homogeneous")
        return degs.pop()

    def graded_commutator(
        self,
        a: Dict[Tuple[str, ...], int],
        b: Dict[Tuple[str, ...], int],
    ) -> Dict[Tuple[str, ...], int]:
        da = self.element_degree(a)
        db = self.element_degree(b)
        if da is None or db is None:
            return {}
        ab = self.mul(a, b)
        ba = self.mul(b, a)
        sign = _sgn(da * db)
        acc = dict(ab)
        for w, c in ba.items():
            acc[w] = acc.get(w, 0) - sign * c
        return {w: c for w, c in acc.items() if c}

    def basis(self, degree: int) -> List[Tuple[str, ...]]:
        """Irreducible words of the given degree, in deglex order."""
        if degree < 0:
            return []
        out = []

        def extend(word, left):
            if left == 0:
                if self._first_redex(word) is None:
                    out.append(word)
                return
            for name, d in self.generators:
                if d <= left:
                    # prune: a word containing a redex never becomes reducible-free
                    cand = word + (name,)
                    if self._first_redex(cand) is None:
                        extend(cand, left - d)

        extend((), degree)
        return out


def center(ring: RewritingRing, degree: int) -> List[Dict[Tuple[str, ...], int]]:
    """Integer basis of the degree-d graded center of a rewriting ring.

    An element is central when its graded commutator with every generator
    vanishes; the kernel is taken over the integers, so the basis also
    generates all rational central elements of that degree.
    """
    basis = ring.basis(degree)
    if not basis:
        return []
    entries = {}
    row_index: Dict[Tuple[str, Tuple[str, ...]], int] = {}
    for j, word in enumerate(basis):
        for gname, gdeg in ring.generators:
            comm = ring.graded_commutator({word: 1}, {(gname,): 1})
            for w, c in comm.items():
                key = (gname, w)
                if key not in row_index:
                    row_index[key] = len(row_index)
                entries[(row_index[key], j)] = c
    mat = SparseIntMat(len(row_index), len(basis), entries)
    out = []
    for vec in kernel_basis(mat):
        out.append({basis[i]: c for i, c in enumerate(vec) if c})
    return out


# ---------------------------------------------------------------------------
# contractions


@dataclass
class Contraction:
    """A strong deformation retraction onto a complex with zero differential.

    The maps satisfy ``f g = 1``, ``d h + h d = g f - 1``, and the side
    conditions ``f h = h g = h h = 0``; the retract has zero differential,
    so additionally ``f d = 0`` and ``d g = 0``.
    """

    complex: CellComplex
    small: BiGradedModule
    f: GradedMap
    g: GradedMap
    h: GradedMap
    cells: Tuple[Tuple[int, int], ...]

    def verify(self, cells: Optional[Iterable[Tuple[int, int]]] = None) -> bool:
        """Check all contraction identities on the given cells.

        Restrict ``cells`` to the interior when the contraction only
        covers a window: the homotopy identity at an edge cell would read
        values of ``h`` outside the covered region.
        """
        cx = self.complex
        cells = tuple(self.cells if cells is None else cells)
        for e in self.small:
            fg = self.f(self.g.of_key(e.id))
            if dict(fg) != {e.id: 1}:
                raise ContractionError(f"f(g({e.id!r})) != {e.id!r}")
            dg = cx.d_elem(self.g.of_key(e.id))
            if not dg.is_zero():
                raise ContractionError(f"g({e.id!r}) is not a cycle")
        for cell in cells:
            for key in cx.basis(cell):
                one = Elem.basis(key)
                lhs = cx.d_elem(self.h(one)) + self.h(cx.d_of(key))
                rhs = self.g(self.f(one)) - one
                if lhs != rhs:
                    raise ContractionError(f"homotopy identity fails on {key!r}")
                if not self.f(cx.d_of(key)).is_zero():
                    raise ContractionError(f"f d != 0 on {key!r}")
                if not self.f(self.h(one)).is_zero():
                    raise ContractionError(f"f h != 0 on {key!r}")
                if not self.h(self.h(one)).is_zero():
                    raise ContractionError(f"h h != 0 on {key!r}")
        for e in self.small:
            if not self.h(self.g.of_key(e.id)).is_zero():
                raise ContractionError(f"h g != 0 on {e.id!r}")
        return True


def contraction_from_complex(
    cx: CellComplex,
    cells: Iterable[Tuple[int, int]],
    label: str = "H",
) -> Contraction:
    """Build a contraction onto freely-chosen homology representatives.

    Works cell by cell: a Smith decomposition of the outgoing block
    splits each cell into boundaries, a homology lift, and a complement
    mapping isomorphically onto the next cell's boundaries.  Raises when
    some requested cell has torsion homology (no contraction over the
    integers) or touches an incomplete part of the complex.
    """
    cells = sorted(set(cells))
    sw, sd = cx.shifts
    f_map: Dict[object, Elem] = {}
    g_map: Dict[object, Elem] = {}
    h_map: Dict[object, Elem] = {}
    small_elems: List[BasisElement] = []
    for cell in cells:
        src = (cell[0] - sw, cell[1] - sd)
        tgt = (cell[0] + sw, cell[1] + sd)
        for c in (cell, src, tgt):
            if not cx.known(c):
                raise ContractionError(f"cell {c} is not complete")
        ybasis = list(cx.basis(cell))
        if not ybasis:
            continue
        xbasis = list(cx.basis(src))
        zbasis = list(cx.basis(tgt))
        f_in = _cell_matrix(cx, src, xbasis, cell, ybasis)
        g_out = _cell_matrix(cx, cell, ybasis, tgt, zbasis)
        snf_out = smith_normal_form(g_out)
        ny = len(ybasis)
        rank_out = snf_out.rank
        kdim = ny - rank_out
        kcols = [snf_out.right.column(j) for j in range(rank_out, ny)]
        lcols = [snf_out.right.column(j) for j in range(rank_out)]
        snf_in = smith_normal_form(f_in)
        r_in = snf_in.rank
        lx_cols = [snf_in.right.column(j) for j in range(r_in)]
        b_cols = [f_in.apply(v) for v in lx_cols]
        # kernel coordinates of the incoming image
        kmat = SparseIntMat.from_columns(kcols, ny) if kcols else SparseIntMat.zero(ny, 0)
        coords = []
        for j in range(f_in.cols):
            coords.append(_solve_columns(kmat, f_in.column(j)))
        cmat = (
            SparseIntMat.from_columns(coords, kdim)
            if coords
            else SparseIntMat.zero(kdim, 0)
        )
        snf_c = smith_normal_form(cmat)
        if any(d != 1 for d in snf_c.invariants):
            raise ContractionError(
                f"torsion homology at cell {cell}: invariants {snf_c.invariants}"
            )
        if snf_c.rank != r_in:
            raise ContractionError("inconsistent image rank")
        adapted = kmat * snf_c.left_inverse if kdim else kmat
        h_rank = kdim - r_in
        hcols = [adapted.column(j) for j in range(r_in, kdim)]
        tcols = b_cols + hcols + lcols
        tmat = SparseIntMat.from_columns(tcols, ny) if tcols else SparseIntMat.zero(ny, 0)
        tinv = invert_unimodular(tmat) if ny else SparseIntMat.zero(0, 0)
        cell_small = [
            BasisElement(f"{label}({cell[0]},{cell[1]})#{k}", cell[1], cell[0])
            for k in range(h_rank)
        ]
        small_elems.extend(cell_small)
        for k, se in enumerate(cell_small):
            g_map[se.id] = Elem(
                {ybasis[i]: c for i, c in enumerate(hcols[k]) if c}
            )
        for i, key in enumerate(ybasis):
            fvals = {}
            hvals: dict = {}
            for k in range(h_rank):
                c = tinv[(r_in + k, i)]
                if c:
                    fvals[cell_small[k].id] = c
            for j in range(r_in):
                c = tinv[(j, i)]
                if c:
                    for xi, xv in enumerate(lx_cols[j]):
                        if xv:
                            hvals[xbasis[xi]] = hvals.get(xbasis[xi], 0) - c * xv
            f_map[key] = Elem(fvals)
            h_map[key] = finish(hvals)
    small = BiGradedModule(small_elems)
    return Contraction(
        complex=cx,
        small=small,
        f=GradedMap(f_map, 0, 0),
        g=GradedMap(g_map, 0, 0),
        h=GradedMap(h_map, -sw, -sd),
        cells=tuple(cells),
    )


def _cell_matrix(cx, src_cell, src_basis, tgt_cell, tgt_basis):
    index = {k: i for i, k in enumerate(tgt_basis)}
    entries = {}
    for j, key in enumerate(src_basis):
        for k, c in cx.d_of(key).items():
            if k not in index:
                raise ContractionError(
                    f"differential leaves the declared cells: {key!r} -> {k!r}"
                )
            entries[(index[k], j)] = c
    return SparseIntMat(len(tgt_basis), len(src_basis), entries)


def _solve_columns(kmat: SparseIntMat, target: List) -> List:
    """Solve kmat * x = target exactly over the integers."""
    if kmat.cols == 0:
        if any(target):
            raise ContractionError("boundary escapes the kernel")
        return []
    snf = smith_normal_form(kmat)
    lv = snf.left.apply(target)
    y = [0] * kmat.cols
    for i, d in enumerate(snf.invariants):
        if lv[i] % d:
            raise ContractionError("boundary escapes the kernel lattice")
        y[i] = lv[i] // d
    for i in range(snf.rank, len(lv)):
        if lv[i]:
            raise ContractionError("boundary escapes the kernel")
    return snf.right.apply(y)


# ---------------------------------------------------------------------------
# homotopy transfer


def _expand_letterwise(
    word: TensorWord,
    images: List[Elem],
    target_module: BiGradedModule,
) -> Elem:
    """Tensor a list of letterwise images into an Elem over words.

    All maps involved have degree zero, so no signs appear here.
    """
    combos: Dict[Tuple[str, ...], object] = {(): 1}
    for img in images:
        if not img:
            return Elem()
        new: Dict[Tuple[str, ...], object] = {}
        for prefix, c in combos.items():
            for eid, c2 in img.items():
                key = prefix + (eid,)
                new[key] = new.get(key, 0) + c * c2
        combos = new
    acc = {}
    for ids, c in combos.items():
        w = TensorWord(tuple(target_module[i] for i in ids), 1)
        acc[w] = acc.get(w, 0) + c
    return finish(acc)


def transfer_minimal_structure(
    alg: AInftyAlgebra,
    contraction: Contraction,
    max_arity: int,
) -> AInftyAlgebra:
    """Transfer the operations across a contraction onto its retract.

    The retract has zero differential, so the result is a minimal
    structure: no 1-ary table, a binary product equal to the induced
    product on representatives, and higher operations recording how
    associativity only holds up to the homotopy.

    The computation perturbs the splitting-differential picture: words of
    suspended elements are pushed through ``g`` letterwise, repeatedly hit
    with the operation part of the word differential and the word-level
    homotopy, and projected back through ``f``.  The homotopy acts as
    ``-s h`` in one slot with identity to the right and ``g f`` to the
    left, with the crossing sign of an odd operator.
    """
    small = contraction.small
    big = alg.module
    gf: Dict[str, Elem] = {}
    for e in big:
        img = contraction.f.of_key(e.id)
        gf[e.id] = contraction.g(img) if img else Elem()

    def big_word_h(word: TensorWord) -> Elem:
        letters = word.letters
        sdegs = [l.degree + 1 for l in letters]
        acc: dict = {}
        for q in range(len(letters)):
            hval = contraction.h.of_key(letters[q].id)
            if not hval:
                continue
            sign = -_sgn(sum(sdegs[:q]))  # leading minus is the suspension of h
            images = [gf[l.id] for l in letters[:q]]
            images.append(hval)
            prefix = _expand_letterwise(
                TensorWord(letters[: q + 1], 1), images, big
            )
            for w, c in prefix.items():
                full = TensorWord(w.letters + letters[q + 1 :], 1)
                acc[full] = acc.get(full, 0) + sign * c
        return finish(acc)

    def t_op(vec: Elem) -> Elem:
        acc: dict = {}
        for w, c in vec.items():
            add_into(acc, bar_differential_of_word(alg, w, min_arity=2), c)
        return finish(acc)

    def f_words(vec: Elem) -> Elem:
        acc: dict = {}
        for w, c in vec.items():
            images = [contraction.f.of_key(l.id) for l in w.letters]
            add_into(acc, _expand_letterwise(w, images, small), c)
        return finish(acc)

    tables: Dict[int, Dict[tuple, Dict[tuple, object]]] = {}
    reduced = [e for e in small]
    for k in range(2, max_arity + 1):
        entries: Dict[tuple, Dict[tuple, object]] = {}
        for tup in _tuples(reduced, k):
            word = TensorWord(tup, 1)
            vec = _expand_letterwise(
                word, [contraction.g.of_key(l.id) for l in tup], big
            )
            vec = t_op(vec)
            acc: dict = {}
            while vec:
                add_into(acc, f_words(vec), 1)
                vec = t_op(apply_linear(big_word_h, vec))
            sdegs = [l.degree + 1 for l in tup]
            eps0 = 1 + sum((k - j) * sdegs[j - 1] for j in range(1, k + 1))
            sign = _sgn(eps0)
            row: Dict[tuple, object] = {}
            for w, c in finish(acc).items():
                if len(w) == 1:
                    row[(w.letters[0].id,)] = sign * c
            if row:
                entries[tuple(l.id for l in tup)] = row
        if entries:
            tables[k] = MultiOp(k, entries)
    return AInftyAlgebra(small, tables, unit=None, name=f"transfer({alg.name})")


def _tuples(elems: Sequence[BasisElement], k: int):
    if k == 0:
        yield ()
        return
    for head in elems:
        for rest in _tuples(elems, k - 1):
            yield (head,) + rest
