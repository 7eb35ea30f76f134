"""Exact sparse linear algebra over the integers and rationals.

This module is the arithmetic kernel for everything else: Smith normal form
with unimodular transforms, saturated integer kernels, homology of a pair of
composable maps with torsion invariant factors, and reduction of cycles to
class coordinates.

All computations are exact.  Integer mode uses arbitrary-precision ``int``;
rational mode uses ``fractions.Fraction``.  Nothing here ever touches floats.

Determinism contract: pivots are chosen by smallest nonzero absolute value,
ties broken by lowest (row, column) position, so every result is reproducible
across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

Scalar = Union[int, Fraction]


class ExactLAError(Exception):
    """Base class for errors raised by this module."""


class RationalModeError(ExactLAError):
    """An integer-only operation received a matrix with rational entries."""


class ShapeError(ExactLAError):
    """Matrix dimensions are incompatible with the requested operation."""


class NotAComplexError(ExactLAError):
    """The two maps handed to ``homology_at`` do not compose to zero."""


class NotACycleError(ExactLAError):
    """``reduce_mod_image`` received a vector that is not a cycle."""


class NonUnimodularError(ExactLAError):
    """A matrix expected to be invertible over the integers is not."""


def _normalize(v: Scalar) -> Scalar:
    """Collapse integral Fractions to plain ints."""
    if type(v) is int:
        return v
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


class SparseIntMat:
    """A sparse exact matrix: association (row, col) -> nonzero scalar.

    Instances are treated as immutable values by the rest of the package;
    the mutating helpers are for construction only.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int,
                 entries: Optional[Dict[Tuple[int, int], Scalar]] = None):
        if rows < 0 or cols < 0:
            raise ShapeError(f"negative dimensions ({rows}, {cols})")
        self.rows = rows
        self.cols = cols
        self.entries: Dict[Tuple[int, int], Scalar] = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ShapeError(f"entry ({i}, {j}) outside {rows}x{cols}")
                v = _normalize(v)
                if v:
                    self.entries[(i, j)] = v

    # ---- constructors -------------------------------------------------

    @classmethod
    def _raw(cls, rows: int, cols: int,
             entries: Dict[Tuple[int, int], Scalar]) -> "SparseIntMat":
        """Internal constructor: entries must already be in-bounds, nonzero,
        and normalized scalars."""
        self = cls.__new__(cls)
        self.rows = rows
        self.cols = cols
        self.entries = entries
        return self

    @classmethod
    def identity(cls, n: int) -> "SparseIntMat":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseIntMat":
        return cls(rows, cols)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> "SparseIntMat":
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        ent = {}
        for i, row in enumerate(dense):
            if len(row) != cols:
                raise ShapeError("ragged dense input")
            for j, v in enumerate(row):
                if v:
                    ent[(i, j)] = v
        return cls(rows, cols, ent)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]], rows: int) -> "SparseIntMat":
        ent = {}
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ShapeError("column of wrong length")
            for i, v in enumerate(col):
                if v:
                    ent[(i, j)] = v
        return cls(rows, len(columns), ent)

    # ---- accessors ----------------------------------------------------

    def __getitem__(self, key: Tuple[int, int]) -> Scalar:
        return self.entries.get(key, 0)

    def column(self, j: int) -> List[Scalar]:
        col = [0] * self.rows
        for (i, jj), v in self.entries.items():
            if jj == j:
                col[i] = v
        return col

    def to_dense(self) -> List[List[Scalar]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            dense[i][j] = v
        return dense

    def is_zero(self) -> bool:
        return not self.entries

    def is_integer(self) -> bool:
        return all(isinstance(v, int) for v in self.entries.values())

    # ---- arithmetic ---------------------------------------------------

    def transpose(self) -> "SparseIntMat":
        return SparseIntMat(self.cols, self.rows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def __neg__(self) -> "SparseIntMat":
        return SparseIntMat(self.rows, self.cols,
                            {k: -v for k, v in self.entries.items()})

    def __add__(self, other: "SparseIntMat") -> "SparseIntMat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in addition")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ent.get(k, 0) + v
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return SparseIntMat(self.rows, self.cols, ent)

    def __sub__(self, other: "SparseIntMat") -> "SparseIntMat":
        return self + (-other)

    def __mul__(self, other: "SparseIntMat") -> "SparseIntMat":
        if self.cols != other.rows:
            raise ShapeError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        # Row-major sweep of the left factor against a row index of the right.
        right_rows: Dict[int, List[Tuple[int, Scalar]]] = {}
        for (i, j), v in other.entries.items():
            right_rows.setdefault(i, []).append((j, v))
        acc: Dict[Tuple[int, int], Scalar] = {}
        for (i, k), v in self.entries.items():
            for j, w in right_rows.get(k, ()):  # pragma: no branch
                key = (i, j)
                s = acc.get(key, 0) + v * w
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return SparseIntMat(self.rows, other.cols, acc)

    def scale(self, c: Scalar) -> "SparseIntMat":
        if not c:
            return SparseIntMat.zero(self.rows, self.cols)
        return SparseIntMat(self.rows, self.cols,
                            {k: c * v for k, v in self.entries.items()})

    def apply(self, vec: Sequence[Scalar]) -> List[Scalar]:
        """Matrix-vector product with a dense vector."""
        if len(vec) != self.cols:
            raise ShapeError("vector length mismatch")
        out: List[Scalar] = [0] * self.rows
        for (i, j), v in self.entries.items():
            x = vec[j]
            if x:
                out[i] = _normalize(out[i] + v * x)
        return out

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SparseIntMat)
                and (self.rows, self.cols) == (other.rows, other.cols)
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self) -> str:
        return f"SparseIntMat({self.rows}x{self.cols}, nnz={len(self.entries)})"


@dataclass(frozen=True)
class SNFResult:
    """Smith normal form data: left * A * right == diag(invariants).

    ``left``/``right`` are unimodular; their exact inverses are carried along
    because downstream consumers (kernel lattices, homology bases) need them.
    Invariants form a divisibility chain d_1 | d_2 | ... and are positive.
    """

    invariants: Tuple[int, ...]
    left: SparseIntMat
    right: SparseIntMat
    left_inverse: SparseIntMat
    right_inverse: SparseIntMat

    @property
    def rank(self) -> int:
        return len(self.invariants)

    def diagonal(self, rows: int, cols: int) -> SparseIntMat:
        return SparseIntMat(rows, cols,
                            {(i, i): d for i, d in enumerate(self.invariants)})

    def verify(self, a: SparseIntMat) -> bool:
        if self.left * a * self.right != self.diagonal(a.rows, a.cols):
            return False
        if self.left * self.left_inverse != SparseIntMat.identity(a.rows):
            return False
        if self.right * self.right_inverse != SparseIntMat.identity(a.cols):
            return False
        return True


class _SnfWorkspace:
    """Mutable state for the Smith reduction.

    Row operations are mirrored on L (directly) and on the transpose of
    L^{-1} (where the inverse column operation becomes a row operation, so
    every bookkeeping update touches only one or two rows of a dict).  Column
    operations are mirrored on the transpose of R and on R^{-1} directly,
    for the same reason.
    """

    def __init__(self, a: SparseIntMat, track: bool = True):
        self.m = a.rows
        self.n = a.cols
        self.track = track
        self.rowd: Dict[int, Dict[int, int]] = {i: {} for i in range(self.m)}
        self.colind: Dict[int, set] = {j: set() for j in range(self.n)}
        for (i, j), v in a.entries.items():
            self.rowd[i][j] = v
            self.colind[j].add(i)
        if track:
            self.L = {i: {i: 1} for i in range(self.m)}
            self.LinvT = {i: {i: 1} for i in range(self.m)}
            self.RT = {j: {j: 1} for j in range(self.n)}
            self.Rinv = {j: {j: 1} for j in range(self.n)}

    # -- elementary operations on the working matrix + transforms --------

    @staticmethod
    def _addmul_row(store: Dict[int, Dict[int, int]], p: int, q: int, c: int) -> None:
        """store[p] += c * store[q]"""
        target = store[p]
        for j, v in store[q].items():
            s = target.get(j, 0) + c * v
            if s:
                target[j] = s
            else:
                target.pop(j, None)

    def row_swap(self, p: int, q: int) -> None:
        if p == q:
            return
        for j in set(self.rowd[p]) | set(self.rowd[q]):
            ind = self.colind[j]
            has_p, has_q = p in ind, q in ind
            if has_p != has_q:
                ind.symmetric_difference_update((p, q))
        self.rowd[p], self.rowd[q] = self.rowd[q], self.rowd[p]
        if self.track:
            self.L[p], self.L[q] = self.L[q], self.L[p]
            self.LinvT[p], self.LinvT[q] = self.LinvT[q], self.LinvT[p]

    def row_addmul(self, p: int, q: int, c: int) -> None:
        """row p += c * row q, mirrored on the transforms."""
        target = self.rowd[p]
        for j, v in self.rowd[q].items():
            s = target.get(j, 0) + c * v
            if s:
                target[j] = s
                self.colind[j].add(p)
            else:
                target.pop(j, None)
                self.colind[j].discard(p)
        if self.track:
            self._addmul_row(self.L, p, q, c)
            self._addmul_row(self.LinvT, q, p, -c)

    def row_negate(self, p: int) -> None:
        self.rowd[p] = {j: -v for j, v in self.rowd[p].items()}
        if self.track:
            self.L[p] = {j: -v for j, v in self.L[p].items()}
            self.LinvT[p] = {j: -v for j, v in self.LinvT[p].items()}

    def col_swap(self, p: int, q: int) -> None:
        if p == q:
            return
        for i in self.colind[p] | self.colind[q]:
            row = self.rowd[i]
            vp, vq = row.pop(p, None), row.pop(q, None)
            if vq is not None:
                row[p] = vq
            if vp is not None:
                row[q] = vp
        self.colind[p], self.colind[q] = self.colind[q], self.colind[p]
        if self.track:
            self.RT[p], self.RT[q] = self.RT[q], self.RT[p]
            self.Rinv[p], self.Rinv[q] = self.Rinv[q], self.Rinv[p]

    def col_addmul(self, p: int, q: int, c: int) -> None:
        """col p += c * col q, mirrored on the transforms."""
        for i in list(self.colind[q]):
            v = self.rowd[i][q]
            s = self.rowd[i].get(p, 0) + c * v
            if s:
                self.rowd[i][p] = s
                self.colind[p].add(i)
            else:
                self.rowd[i].pop(p, None)
                self.colind[p].discard(i)
        if self.track:
            self._addmul_row(self.RT, p, q, c)
            self._addmul_row(self.Rinv, q, p, -c)

    def col_negate(self, p: int) -> None:
        for i in self.colind[p]:
            self.rowd[i][p] = -self.rowd[i][p]
        if self.track:
            self.RT[p] = {j: -v for j, v in self.RT[p].items()}
            self.Rinv[p] = {j: -v for j, v in self.Rinv[p].items()}

    # -- pivot search -----------------------------------------------------

    def find_pivot(self, t: int) -> Optional[Tuple[int, int]]:
        """Smallest |value| in the active submatrix, ties by (row, col)."""
        best = None
        best_key = None
        for i in range(t, self.m):
            for j, v in self.rowd[i].items():
                if j < t:
                    continue
                key = (abs(v), i, j)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
        return best

    def local_pivot(self, t: int) -> Tuple[int, int]:
        """Smallest |value| restricted to row t and column t (active part)."""
        best = (t, t)
        best_key = (abs(self.rowd[t][t]), t, t)
        for i in self.colind[t]:
            if i <= t:
                continue
            key = (abs(self.rowd[i][t]), i, t)
            if key < best_key:
                best_key, best = key, (i, t)
        for j, v in self.rowd[t].items():
            if j <= t:
                continue
            key = (abs(v), t, j)
            if key < best_key:
                best_key, best = key, (t, j)
        return best


def _smith_reduce(ws: "_SnfWorkspace") -> Tuple[int, ...]:
    """Drive the workspace to diagonal form; returns the invariant factors."""
    m, n = ws.m, ws.n
    t = 0
    limit = min(m, n)
    while t < limit:
        piv = ws.find_pivot(t)
        if piv is None:
            break
        ws.row_swap(t, piv[0])
        ws.col_swap(t, piv[1])
        while True:
            # Clear column t and row t against the pivot.
            if ws.rowd[t][t] < 0:
                ws.row_negate(t)
            p = ws.rowd[t][t]
            dirty = False
            for i in sorted(ws.colind[t]):
                if i <= t:
                    continue
                q = ws.rowd[i][t] // p
                if q:
                    ws.row_addmul(i, t, -q)
                if ws.rowd[i].get(t):
                    dirty = True
            for j in sorted(ws.rowd[t]):
                if j <= t:
                    continue
                q = ws.rowd[t][j] // p
                if q:
                    ws.col_addmul(j, t, -q)
                if ws.rowd[t].get(j):
                    dirty = True
            if dirty:
                # Remainders are strictly smaller than |pivot|; promote the
                # smallest and run another pass.
                bi, bj = ws.local_pivot(t)
                ws.row_swap(t, bi)
                ws.col_swap(t, bj)
                continue
            # Row and column are clear; enforce the divisibility chain.
            d = ws.rowd[t][t]
            offender = None
            for i in range(t + 1, m):
                for j, v in ws.rowd[i].items():
                    if j > t and v % d:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            ws.row_addmul(t, offender, 1)
        t += 1

    invariants = []
    for i in range(limit):
        v = ws.rowd[i].get(i, 0)
        if v:
            invariants.append(abs(v))
    # Positivity was enforced during reduction, but keep abs() as a guard.
    return tuple(invariants)


def smith_invariants(a: SparseIntMat) -> Tuple[int, ...]:
    """Invariant factors of the Smith form, without transform bookkeeping.

    Runs the exact same reduction as ``smith_normal_form`` on the working
    matrix; only the unimodular witnesses are skipped.  Prefer this in hot
    loops that need nothing but the divisibility chain.

    Raises:
        RationalModeError: if any entry is a non-integer rational.
    """
    if not a.is_integer():
        raise RationalModeError("smith_invariants requires integer entries")
    return _smith_reduce(_SnfWorkspace(a, track=False))


def smith_normal_form(a: SparseIntMat) -> SNFResult:
    """Diagonalize an integer matrix by unimodular row/column operations.

    Returns invariant factors forming a divisibility chain together with the
    unimodular transforms (and their inverses) witnessing
    ``left * a * right == diag``.

    Raises:
        RationalModeError: if any entry is a non-integer rational.  Use the
            kernel/rank path for rational matrices.
    """
    if not a.is_integer():
        raise RationalModeError("smith_normal_form requires integer entries")
    ws = _SnfWorkspace(a)
    invariants = _smith_reduce(ws)
    m, n = ws.m, ws.n

    def pack(rows: Dict[int, Dict[int, int]], nrows: int, ncols: int,
             transpose: bool = False) -> SparseIntMat:
        ent = {}
        for i, row in rows.items():
            for j, v in row.items():
                if v:
                    ent[(j, i) if transpose else (i, j)] = v
        return SparseIntMat._raw(nrows, ncols, ent)

    return SNFResult(
        invariants=invariants,
        left=pack(ws.L, m, m),
        right=pack(ws.RT, n, n, transpose=True),
        left_inverse=pack(ws.LinvT, m, m, transpose=True),
        right_inverse=pack(ws.Rinv, n, n),
    )


def _integerize_rows(a: SparseIntMat) -> SparseIntMat:
    """Scale each row by a positive integer to clear denominators.

    Row scaling preserves the kernel, which is the only thing rational-mode
    callers are allowed to extract through the integer pipeline.
    """
    if a.is_integer():
        return a
    factors: Dict[int, int] = {}
    for (i, _), v in a.entries.items():
        if isinstance(v, Fraction):
            factors[i] = lcm(factors.get(i, 1), v.denominator)
    ent = {}
    for (i, j), v in a.entries.items():
        f = factors.get(i, 1)
        w = v * f
        ent[(i, j)] = int(w)
    return SparseIntMat(a.rows, a.cols, ent)


def _integerize_cols(a: SparseIntMat) -> SparseIntMat:
    """Scale each column to clear denominators (preserves the column span over Q)."""
    if a.is_integer():
        return a
    factors: Dict[int, int] = {}
    for (_, j), v in a.entries.items():
        if isinstance(v, Fraction):
            factors[j] = lcm(factors.get(j, 1), v.denominator)
    ent = {}
    for (i, j), v in a.entries.items():
        ent[(i, j)] = int(v * factors.get(j, 1))
    return SparseIntMat(a.rows, a.cols, ent)


def kernel_basis(a: SparseIntMat) -> List[List[int]]:
    """A basis of the integer kernel {x : a x = 0}, always saturated.

    The basis consists of the last ``cols - rank`` columns of the right
    transform of the Smith normal form; the quotient of the ambient lattice
    by their span is torsion free.  Rational matrices are handled by row
    scaling, which leaves the kernel unchanged.
    """
    a = _integerize_rows(a)
    snf = smith_normal_form(a)
    return [snf.right.column(j) for j in range(snf.rank, a.cols)]


def rank(a: SparseIntMat) -> int:
    """Exact rank (over the fraction field)."""
    return smith_normal_form(_integerize_rows(a)).rank


def invert_unimodular(a: SparseIntMat) -> SparseIntMat:
    """Exact inverse of a matrix that is invertible over the integers."""
    if a.rows != a.cols:
        raise ShapeError("only square matrices can be unimodular")
    snf = smith_normal_form(a)
    if snf.rank != a.rows or any(d != 1 for d in snf.invariants):
        raise NonUnimodularError(f"invariant factors {snf.invariants}")
    # left * a * right = 1  =>  a^{-1} = right * left
    return snf.right * snf.left


class _KernelLattice:
    """A saturated sublattice with an exact solver for membership."""

    def __init__(self, vectors: List[List[int]], ambient_dim: int):
        self.vectors = vectors
        self.dim = len(vectors)
        self.ambient = ambient_dim
        self.matrix = SparseIntMat.from_columns(vectors, ambient_dim)
        self.snf = smith_normal_form(self.matrix) if vectors else None

    def solve(self, v: Sequence[Scalar], rational: bool = False) -> List[Scalar]:
        """Coordinates x with (basis matrix) * x == v, exact.

        Over the integers this succeeds for every integer vector in the span
        because the lattice is saturated.
        """
        if self.dim == 0:
            if any(v):
                raise NotACycleError("nonzero vector in a zero lattice")
            return []
        snf = self.snf
        lv = snf.left.apply(list(v))
        y: List[Scalar] = [0] * self.matrix.cols
        for i, d in enumerate(snf.invariants):
            num = lv[i]
            if rational:
                y[i] = Fraction(num, d) if num else 0
            else:
                if num % d:
                    raise NotACycleError("vector is not in the lattice span")
                y[i] = num // d
        for i in range(snf.rank, self.matrix.rows):
            if lv[i]:
                raise NotACycleError("vector is not in the lattice span")
        return snf.right.apply(y)


@dataclass
class HomologySummary:
    """H = ker(g) / im(f) for composable maps f: X -> Y, g: Y -> Z.

    ``representative_basis`` lists torsion representatives first (matching
    ``torsion`` order) followed by free generators.  ``orders`` aligns with
    it: the invariant factor for a torsion class, 0 for a free class.
    ``reduce`` maps any cycle to coordinates in this basis.
    """

    free_rank: int
    torsion: Tuple[int, ...]
    representative_basis: List[List[Scalar]]
    orders: Tuple[int, ...]
    ambient_dim: int
    rational: bool = False
    _kernel: Optional[_KernelLattice] = field(default=None, repr=False)
    _class_transform: Optional[SparseIntMat] = field(default=None, repr=False)
    _image_rank: int = field(default=0, repr=False)
    _image_invariants: Tuple[int, ...] = field(default=(), repr=False)
    _g: Optional[SparseIntMat] = field(default=None, repr=False)

    @property
    def total_rank(self) -> int:
        return self.free_rank + len(self.torsion)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def reduce(self, v: Sequence[Scalar]) -> List[Scalar]:
        return reduce_mod_image(list(v), self)

    def __eq__(self, other: object) -> bool:
        """Abstract-group equality: same free rank and torsion chain."""
        if not isinstance(other, HomologySummary):
            return NotImplemented
        return (self.free_rank, self.torsion) == (other.free_rank, other.torsion)

    def group_str(self) -> str:
        parts = []
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}" if self.free_rank > 1 else "Z")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def _check_composable(f: SparseIntMat, g: SparseIntMat) -> None:
    if g.cols != f.rows:
        raise ShapeError(
            f"maps not composable: f is {f.rows}x{f.cols}, g is {g.rows}x{g.cols}")
    gf = g * f
    if not gf.is_zero():
        (i, j), v = sorted(gf.entries.items())[0]
        raise NotAComplexError(
            f"g*f != 0: entry ({i}, {j}) = {v}")


def homology_at(f: SparseIntMat, g: SparseIntMat) -> HomologySummary:
    """Homology ker(g)/im(f) at the middle of X --f--> Y --g--> Z.

    Integer input yields free rank, torsion invariant factors, cycle
    representatives and reduction data.  If either matrix carries rational
    entries the computation is performed over Q (torsion is empty).

    Raises:
        NotAComplexError: if g*f is nonzero (the offending entry is reported).
        ShapeError: if the shapes do not compose.
    """
    _check_composable(f, g)
    rational = not (f.is_integer() and g.is_integer())
    g_int = _integerize_rows(g)
    f_int = _integerize_cols(f) if rational else f

    kernel_vectors = kernel_basis(g_int)
    lattice = _KernelLattice(kernel_vectors, g.cols)
    k = lattice.dim

    # Express each column of f in kernel coordinates.
    columns = []
    for j in range(f_int.cols):
        col = f_int.column(j)
        try:
            columns.append(lattice.solve(col))
        except NotACycleError as exc:  # g*f == 0 makes this impossible
            raise ExactLAError(f"internal: image column {j} escapes the kernel") from exc
    c_mat = SparseIntMat.from_columns(columns, k)
    c_snf = smith_normal_form(c_mat)

    # Adapted basis of the kernel: first r columns span the image direction.
    u_inv = c_snf.left_inverse
    adapted = lattice.matrix * u_inv
    r = c_snf.rank
    torsion_idx = [i for i, d in enumerate(c_snf.invariants) if d > 1]
    free_idx = list(range(r, k))

    torsion = tuple(int(c_snf.invariants[i]) for i in torsion_idx)
    if rational:
        torsion = ()
        torsion_idx = []
    reps = [adapted.column(i) for i in torsion_idx] + [adapted.column(i) for i in free_idx]
    orders = tuple(list(torsion) + [0] * len(free_idx))

    return HomologySummary(
        free_rank=len(free_idx),
        torsion=torsion,
        representative_basis=reps,
        orders=orders,
        ambient_dim=g.cols,
        rational=rational,
        _kernel=lattice,
        _class_transform=c_snf.left,
        _image_rank=r,
        _image_invariants=tuple(int(d) for d in c_snf.invariants),
        _g=g_int,
    )


def reduce_mod_image(v: Sequence[Scalar], h: HomologySummary) -> List[Scalar]:
    """Coordinates of the class [v] in ``h.representative_basis``.

    Torsion coordinates are reduced into [0, order); free coordinates are
    exact integers (or rationals in rational mode).  A boundary reduces to
    all zeros.

    Raises:
        NotACycleError: if v is not a cycle of the complex h came from.
    """
    v = list(v)
    if len(v) != h.ambient_dim:
        raise ShapeError(f"cycle has length {len(v)}, expected {h.ambient_dim}")
    if h._g is not None and any(h._g.apply(v)):
        raise NotACycleError("vector is not a cycle (g*v != 0)")
    if h._kernel is None:
        raise ExactLAError("summary carries no reduction data")
    x = h._kernel.solve(v, rational=h.rational)
    k = h._kernel.dim
    y = h._class_transform.apply(x) if k else []

    coords: List[Scalar] = []
    inv = h._image_invariants
    r = h._image_rank
    if not h.rational:
        for i in range(r):
            d = inv[i]
            if d > 1:
                coords.append(int(y[i]) % d)
    for i in range(r, k):
        coords.append(_normalize(y[i]))
    return coords


def coker_summary(f: SparseIntMat) -> HomologySummary:
    """Cokernel of f: Y-coordinates modulo the image, as a homology summary."""
    return homology_at(f, SparseIntMat.zero(0, f.rows))


def vec_sub(a: Sequence[Scalar], b: Sequence[Scalar]) -> List[Scalar]:
    return [_normalize(x - y) for x, y in zip(a, b)]


def vec_scale(a: Sequence[Scalar], c: Scalar) -> List[Scalar]:
    return [_normalize(c * x) for x in a]
