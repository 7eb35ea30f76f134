"""Bigraded modules, sign bookkeeping, and windowed cell complexes.

Everything downstream manipulates sparse vectors over a bigraded basis:
each basis element carries an integer homological degree and an integer
weight.  Differentials move along a fixed (weight, degree) shift, so
homology splits into independent cells and every computation reduces to
exact linear algebra on finite blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .exactla import (
    HomologySummary,
    NotAComplexError,
    SparseIntMat,
    homology_at,
    reduce_mod_image,
)


class GradedError(Exception):
    pass


class EnumerationError(GradedError):
    """Word enumeration cannot be certified to terminate."""


class CellConsistencyError(GradedError):
    """A differential left the region the caller declared complete."""


def _norm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


# ---------------------------------------------------------------------------
# sign engine


def koszul_sign(perm: Tuple[int, ...], degrees: Tuple[int, ...]) -> int:
    """Sign for reordering graded symbols.

    ``perm[i]`` is the original position of the symbol that ends up in slot
    ``i``; ``degrees`` is indexed by original positions.  Each pair of
    symbols that swaps past each other contributes ``(-1)**(|a|*|b|)``.

    This is the single authority for permutation signs; all other sign
    conventions in the package are written as an explicit exponent formula
    times a call to this function.
    """
    sign = 1
    n = len(perm)
    for i in range(n):
        di = degrees[perm[i]]
        if di % 2 == 0:
            continue
        for j in range(i + 1, n):
            if perm[i] > perm[j] and degrees[perm[j]] % 2:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# basis elements and sparse vectors


@dataclass(frozen=True, order=True)
class BasisElement:
    """A named basis vector with a homological degree and a weight."""

    id: str
    degree: int
    weight: int


class Elem(dict):
    """Sparse vector: hashable basis key -> nonzero int/Fraction coefficient.

    Keys may be plain ids, tensor words, or hom-cells; Elem never stores a
    zero coefficient, so ``==`` is exact equality of vectors.
    """

    __slots__ = ()

    def __init__(self, data=()):
        super().__init__()
        items = data.items() if isinstance(data, dict) else data
        for k, v in items:
            acc = _norm(self.get(k, 0) + v)
            if acc:
                dict.__setitem__(self, k, acc)
            elif k in self:
                dict.__delitem__(self, k)

    @classmethod
    def basis(cls, key) -> "Elem":
        return cls({key: 1})

    @classmethod
    def zero(cls) -> "Elem":
        return cls()

    def is_zero(self) -> bool:
        return not self

    def __add__(self, other: "Elem") -> "Elem":
        out = dict(self)
        for k, v in other.items():
            acc = _norm(out.get(k, 0) + v)
            if acc:
                out[k] = acc
            else:
                out.pop(k, None)
        res = Elem()
        dict.update(res, out)
        return res

    def __sub__(self, other: "Elem") -> "Elem":
        return self + other.scale(-1)

    def __neg__(self) -> "Elem":
        return self.scale(-1)

    def __mul__(self, c) -> "Elem":
        return self.scale(c)

    __rmul__ = __mul__

    def scale(self, c) -> "Elem":
        res = Elem()
        if c:
            for k, v in self.items():
                cv = _norm(c * v)
                if cv:
                    dict.__setitem__(res, k, cv)
        return res


def add_into(acc: dict, elem: Elem, coeff=1) -> None:
    """Accumulate ``coeff * elem`` into a plain working dict."""
    if not coeff:
        return
    for k, v in elem.items():
        acc[k] = acc.get(k, 0) + coeff * v


def finish(acc: dict) -> Elem:
    """Strip zeros from a working dict and freeze it as an Elem."""
    return Elem(acc)


def apply_linear(fn: Callable[[object], Elem], elem: Elem) -> Elem:
    """Extend a basis-keyed map linearly to sparse vectors."""
    acc: dict = {}
    for k, c in elem.items():
        add_into(acc, fn(k), c)
    return finish(acc)


class BiGradedModule:
    """An ordered finite family of basis elements, indexed two ways.

    The listing order is significant: it fixes matrix columns, report
    layouts, and serialization, so two modules with the same elements in a
    different order are different objects.
    """

    def __init__(self, elements: Iterable[BasisElement]):
        self.elements: Tuple[BasisElement, ...] = tuple(elements)
        self.by_id: Dict[str, BasisElement] = {}
        for e in self.elements:
            if e.id in self.by_id:
                raise GradedError(f"duplicate basis id {e.id!r}")
            self.by_id[e.id] = e
        cells: Dict[Tuple[int, int], List[BasisElement]] = {}
        for e in self.elements:
            cells.setdefault((e.weight, e.degree), []).append(e)
        self.cells: Dict[Tuple[int, int], Tuple[BasisElement, ...]] = {
            c: tuple(v) for c, v in cells.items()
        }

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, eid: str) -> bool:
        return eid in self.by_id

    def __getitem__(self, eid: str) -> BasisElement:
        return self.by_id[eid]

    def degree(self, eid: str) -> int:
        return self.by_id[eid].degree

    def weight(self, eid: str) -> int:
        return self.by_id[eid].weight

    def cell(self, weight: int, degree: int) -> Tuple[BasisElement, ...]:
        return self.cells.get((weight, degree), ())


# ---------------------------------------------------------------------------
# tensor words


@dataclass(frozen=True)
class TensorWord:
    """A word of basis letters, each letter carrying a +-1 grading shift.

    ``shift=+1`` models suspended letters (degree and weight both bumped by
    one per letter); ``shift=-1`` models desuspended letters.  Degree and
    weight of the word are the shifted letter sums, so the empty word sits
    in bidegree (0, 0).
    """

    letters: Tuple[BasisElement, ...]
    shift: int = 1

    def __post_init__(self):
        if self.shift not in (1, -1):
            raise GradedError("word shift must be +1 or -1")
        # words are dictionary keys everywhere; cache the hash once
        object.__setattr__(self, "_hash", hash((self.letters, self.shift)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def degree(self) -> int:
        return sum(l.degree for l in self.letters) + self.shift * len(self.letters)

    @property
    def weight(self) -> int:
        return sum(l.weight for l in self.letters) + self.shift * len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def ids(self) -> Tuple[str, ...]:
        return tuple(l.id for l in self.letters)

    def __repr__(self) -> str:
        mark = "s" if self.shift == 1 else "t"
        return "{}[{}]".format(mark, "|".join(l.id for l in self.letters))


def word_cell(word: TensorWord) -> Tuple[int, int]:
    return (word.weight, word.degree)


def deconcatenate(word: TensorWord, n: int, nonempty: bool = False):
    """All ways to cut a word into ``n`` consecutive blocks, coefficient +1.

    With ``nonempty`` every block must contain at least one letter.  The
    splitting comultiplication of the tensor coalgebra carries no signs, so
    only the tuples are returned.
    """
    if n < 1:
        raise GradedError("need at least one block")
    letters = word.letters
    m = len(letters)
    out = []
    if nonempty:
        cut_iter = combinations(range(1, m), n - 1)
    else:
        cut_iter = combinations_with_replacement(range(m + 1), n - 1)
    for cuts in cut_iter:
        bounds = (0,) + cuts + (m,)
        out.append(
            tuple(
                TensorWord(letters[bounds[i] : bounds[i + 1]], word.shift)
                for i in range(n)
            )
        )
    return out


# ---------------------------------------------------------------------------
# windows and word enumeration


@dataclass(frozen=True)
class WindowSpec:
    """A bounded (weight, degree) box plus an operation-arity cap.

    The degree bound is two-sided (``|degree| <= max_total_degree``) so the
    box is finite whichever sign convention a construction uses.
    """

    max_total_degree: int
    weight_min: int
    weight_max: int
    max_arity: int = 2

    def __post_init__(self):
        if self.max_total_degree < 0:
            raise GradedError("max_total_degree must be >= 0")
        if self.weight_min > self.weight_max:
            raise GradedError("empty weight range")
        if self.max_arity < 2:
            raise GradedError("max_arity must be >= 2")

    def contains(self, weight: int, degree: int) -> bool:
        return (
            abs(degree) <= self.max_total_degree
            and self.weight_min <= weight <= self.weight_max
        )

    def contains_cell(self, cell: Tuple[int, int]) -> bool:
        return self.contains(cell[0], cell[1])

    def cells(self):
        for w in range(self.weight_min, self.weight_max + 1):
            for d in range(-self.max_total_degree, self.max_total_degree + 1):
                yield (w, d)


_DIRECTIONS = [
    (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1),
]


def enumerate_words(
    letters: Iterable[BasisElement], shift: int, window: WindowSpec
) -> Dict[Tuple[int, int], Tuple[TensorWord, ...]]:
    """All tensor words over ``letters`` whose bidegree lands in ``window``.

    Termination is certified up front: appending a letter moves the word by
    that letter's shifted bidegree, and we require a lattice direction in
    which every letter strictly advances.  Progress in that direction is
    bounded on the box, so the search tree is finite; if no such direction
    exists the enumeration could be infinite and we refuse to guess.

    Returns a cell -> words dict; within a cell, words are ordered by
    length and then by letter position in the input sequence.
    """
    alphabet = tuple(letters)
    steps = [(l.degree + shift, l.weight + shift) for l in alphabet]
    direction = None
    if alphabet:
        for a, b in _DIRECTIONS:
            if all(a * sd + b * sw >= 1 for sd, sw in steps):
                direction = (a, b)
                break
        if direction is None:
            raise EnumerationError(
                "no direction of strict progress; word enumeration may not "
                "terminate for this alphabet"
            )
    collected: List[Tuple[int, Tuple[int, ...], TensorWord]] = []
    empty = TensorWord((), shift)
    if window.contains(empty.weight, empty.degree):
        collected.append((0, (), empty))
    if alphabet:
        a, b = direction
        # Largest achievable progress while still inside the box.
        lam_max = abs(a) * window.max_total_degree + (
            b * window.weight_max if b >= 0 else b * window.weight_min
        )
        lam_steps = [a * sd + b * sw for sd, sw in steps]
        stack: List[Tuple[Tuple[int, ...], int, int, int]] = [((), 0, 0, 0)]
        while stack:
            idxs, d, w, lam = stack.pop()
            for i in range(len(alphabet) - 1, -1, -1):
                nl = lam + lam_steps[i]
                if nl > lam_max:
                    continue
                nd = d + steps[i][0]
                nw = w + steps[i][1]
                nidx = idxs + (i,)
                if window.contains(nw, nd):
                    word = TensorWord(tuple(alphabet[j] for j in nidx), shift)
                    collected.append((len(nidx), nidx, word))
                stack.append((nidx, nd, nw, nl))
    collected.sort(key=lambda t: (t[0], t[1]))
    out: Dict[Tuple[int, int], List[TensorWord]] = {}
    for _, _, word in collected:
        out.setdefault((word.weight, word.degree), []).append(word)
    return {c: tuple(v) for c, v in out.items()}


# ---------------------------------------------------------------------------
# graded maps


@dataclass
class GradedMap:
    """A homogeneous linear map given on basis keys.

    Keys missing from ``mapping`` go to zero.  ``weight_shift`` and
    ``degree_shift`` record the bidegree of the map for bookkeeping; they
    are not re-derived from the values.
    """

    mapping: Dict[object, Elem]
    weight_shift: int = 0
    degree_shift: int = 0

    def of_key(self, key) -> Elem:
        return self.mapping.get(key, Elem())

    def __call__(self, elem: Elem) -> Elem:
        return apply_linear(self.of_key, elem)


# ---------------------------------------------------------------------------
# cell complexes


class CellComplex:
    """A complex split into finite (weight, degree) cells.

    Parameters:
        cells: dict cell -> ordered sequence of basis keys living there.
        diff: callable key -> Elem, the exact differential of that basis
            vector (not truncated to any window).
        shifts: (weight, degree) bidegree of the differential.
        known: predicate on cells; True means the listing for that cell is
            complete (an unlisted known cell is genuinely zero).  ``None``
            means every cell is complete, i.e. the complex is finite.

    Homology at a cell is computed from the incoming and outgoing blocks;
    the result is flagged certain only when the cell and both diagonal
    neighbours are complete, so window-edge artifacts are never silently
    reported as homology.
    """

    def __init__(
        self,
        cells: Dict[Tuple[int, int], Iterable[object]],
        diff: Callable[[object], Elem],
        shifts: Tuple[int, int] = (-1, -1),
        known: Optional[Callable[[Tuple[int, int]], bool]] = None,
    ):
        self.cells = {c: tuple(v) for c, v in cells.items()}
        self.diff = diff
        self.shifts = shifts
        self._known = known
        self._diff_cache: Dict[object, Elem] = {}
        self._homology_cache: Dict[Tuple[int, int], Tuple[HomologySummary, bool]] = {}

    def known(self, cell: Tuple[int, int]) -> bool:
        if self._known is None:
            return True
        return bool(self._known(cell))

    def basis(self, cell: Tuple[int, int]) -> Tuple[object, ...]:
        return self.cells.get(cell, ())

    def d_of(self, key) -> Elem:
        try:
            return self._diff_cache[key]
        except KeyError:
            val = self.diff(key)
            self._diff_cache[key] = val
            return val

    def d_elem(self, elem: Elem) -> Elem:
        return apply_linear(self.d_of, elem)

    def _shifted(self, cell, direction=1):
        return (
            cell[0] + direction * self.shifts[0],
            cell[1] + direction * self.shifts[1],
        )

    def _block(self, src_cell, target_basis: List[object]):
        """Matrix of the differential out of ``src_cell``.

        ``target_basis`` is extended in place with any output keys not
        already listed -- unless the target cell was declared complete, in
        which case a stray output is a hard inconsistency.
        """
        tgt_cell = self._shifted(src_cell)
        tgt_complete = self.known(tgt_cell)
        index = {k: i for i, k in enumerate(target_basis)}
        entries = {}
        src = self.basis(src_cell)
        for j, key in enumerate(src):
            for k, c in self.d_of(key).items():
                i = index.get(k)
                if i is None:
                    if tgt_complete:
                        raise CellConsistencyError(
                            f"differential of {key!r} hits {k!r}, missing from "
                            f"the complete cell {tgt_cell}"
                        )
                    index[k] = i = len(target_basis)
                    target_basis.append(k)
                entries[(i, j)] = c
        return SparseIntMat(len(target_basis), len(src), entries)

    def check_d_squared(self, cells: Optional[Iterable[Tuple[int, int]]] = None) -> bool:
        """Verify d(d(x)) == 0 for every listed key (or the given cells)."""
        targets = self.cells.keys() if cells is None else cells
        for cell in targets:
            for key in self.basis(cell):
                dd = self.d_elem(self.d_of(key))
                if not dd.is_zero():
                    raise NotAComplexError(
                        f"d^2 != 0 on {key!r}: remainder {dict(dd)!r}"
                    )
        return True

    def homology(self, cell: Tuple[int, int]) -> Tuple[HomologySummary, bool]:
        """Homology at a cell, plus a certainty flag.

        The flag is True when the cell and both diagonal neighbours are
        complete, so kernel and image are exactly what they claim to be.
        """
        if cell in self._homology_cache:
            return self._homology_cache[cell]
        src_cell = self._shifted(cell, -1)
        ybasis = list(self.basis(cell))
        f = self._block(src_cell, ybasis)
        # Outgoing block from the (possibly extended) middle basis.
        tgt_cell = self._shifted(cell)
        tgt_complete = self.known(tgt_cell)
        tgt_basis = list(self.basis(tgt_cell))
        index = {k: i for i, k in enumerate(tgt_basis)}
        entries = {}
        for j, key in enumerate(ybasis):
            for k, c in self.d_of(key).items():
                i = index.get(k)
                if i is None:
                    if tgt_complete:
                        raise CellConsistencyError(
                            f"differential of {key!r} hits {k!r}, missing from "
                            f"the complete cell {tgt_cell}"
                        )
                    index[k] = i = len(tgt_basis)
                    tgt_basis.append(k)
                entries[(i, j)] = c
        g = SparseIntMat(len(tgt_basis), len(ybasis), entries)
        if f.rows < len(ybasis):
            f = SparseIntMat(len(ybasis), f.cols, dict(f.entries))
        summary = homology_at(f, g)
        certain = (
            self.known(cell)
            and self.known(src_cell)
            and self.known(tgt_cell)
            and len(ybasis) == len(self.basis(cell))
        )
        result = (summary, certain)
        self._homology_cache[cell] = result
        return result

    def homology_basis(self, cell: Tuple[int, int]) -> List[Elem]:
        """Representatives (torsion first, then free) as sparse vectors."""
        summary, _ = self.homology(cell)
        basis = self.basis(cell)
        out = []
        for vec in summary.representative_basis:
            out.append(Elem({basis[i]: c for i, c in enumerate(vec) if c}))
        return out

    def reduce(self, cell: Tuple[int, int], elem: Elem) -> List:
        """Coordinates of a cycle's class in the cell's homology basis."""
        summary, _ = self.homology(cell)
        basis = self.basis(cell)
        index = {k: i for i, k in enumerate(basis)}
        vec = [0] * len(basis)
        for k, c in elem.items():
            if k not in index:
                raise CellConsistencyError(
                    f"vector touches {k!r} outside cell {cell}"
                )
            vec[index[k]] = c
        return reduce_mod_image(vec, summary)

    def homology_table(
        self, cells: Iterable[Tuple[int, int]]
    ) -> Dict[Tuple[int, int], Tuple[HomologySummary, bool]]:
        return {cell: self.homology(cell) for cell in cells}
