"""Deformation cohomology of weight-graded homotopy-associative structures.

Two cochain models are provided, both realized as twisted convolution
complexes over :mod:`koszul.twist`:

* the *small* model ``Hom(dual, structure)`` twisted by the canonical
  morphism, available once Koszulness has been certified;
* the *full* model ``Hom(words, algebra)`` twisted by the universal
  word-projection morphism, where ``words`` is a finite window of the
  word coalgebra of the algebra.  The full model is independent of any
  duality input and is used to cross-validate the small one and to carry
  formality obstruction classes.

Cohomology is indexed by :class:`HHBigrading`; the cohomological degree is
the negated homological degree of a Hom cell, so a transferred ``k``-ary
operation of a minimal model lives in cohomological degree 2 and weight
``-k``.  All arithmetic is exact, and every reported group carries a
certainty flag that is ``True`` only when the enclosing cells of the
window are provably complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .ainfty import (
    AInftyAlgebra,
    AInftyCoalgebra,
    MultiOp,
    StructureError,
    bar_differential_of_word,
    transfer_minimal_structure,
)
from .barcobar import (
    DualCoalgebraResult,
    KoszulCertificate,
    certify_koszul,
    koszul_dual_coalgebra,
)
from .exactla import (
    HomologySummary,
    NotACycleError,
    SparseIntMat,
    coker_summary,
    kernel_basis,
)
from .graded import (
    BasisElement,
    BiGradedModule,
    CellComplex,
    Elem,
    TensorWord,
    WindowSpec,
    enumerate_words,
    finish,
)
from .twist import (
    MODE_COALG_STRICT,
    AlgebraTarget,
    ConvolutionAlgebra,
    HomCell,
    TwistingMorphism,
    canonical_twisting,
    hom_degree,
    hom_weight,
    twisted_convolution_mu,
)

KIND_SMALL = "small"
KIND_FULL = "full"

STATUS_VANISHES = "vanishes-identically"
STATUS_COBOUNDARY = "coboundary"
STATUS_NONZERO = "nonzero-class"
STATUS_BLOCKED = "blocked-by-earlier"
STATUS_WINDOW = "window-limited"


class HochschildError(StructureError):
    """Malformed input to a cochain model, or a window/size violation."""


# ---------------------------------------------------------------------------
# bigradings and classes


@dataclass(frozen=True, order=True)
class HHBigrading:
    """Position of a cohomology group: (cohomological degree, weight)."""

    cohomological_degree: int
    weight: int

    @property
    def cell(self) -> Tuple[int, int]:
        """The underlying (weight, homological degree) cell."""
        return (self.weight, -self.cohomological_degree)

    @staticmethod
    def of_cell(cell: Tuple[int, int]) -> "HHBigrading":
        return HHBigrading(-cell[1], cell[0])

    def __str__(self) -> str:
        return f"HH^{self.cohomological_degree}(weight {self.weight})"


def _class_order(coords: Sequence[int], orders: Sequence[int]) -> int:
    """Additive order of a class from its coordinates: 0 means infinite."""
    if all(c == 0 for c in coords):
        return 1
    out = 1
    for c, d in zip(coords, orders):
        if c == 0:
            continue
        if d == 0:
            return 0
        part = d // gcd(d, int(c) % d or d)
        out = out * part // gcd(out, part)
    return out


@dataclass
class HHClass:
    """A cohomology class with an explicit cochain representative.

    ``coordinates`` expresses the class in the computed generator basis of
    its group (torsion generators first, then free ones); ``order`` is 1
    for the zero class, 0 for a class of infinite additive order, and the
    exact additive order otherwise.
    """

    bigrading: HHBigrading
    representative: Elem
    order: int
    coordinates: Tuple[int, ...] = ()
    label: str = ""
    certain: bool = True

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coordinates)

    def __str__(self) -> str:
        name = self.label or "class"
        return f"{name} @ {self.bigrading} coords={list(self.coordinates)} order={self.order}"


# ---------------------------------------------------------------------------
# the cochain model


class HochschildComplex:
    """A twisted convolution complex organized by (weight, degree) cells.

    The differential is the twisted 1-ary convolution operation, the cup
    product the twisted 2-ary one; both are exact, so the complex can be
    checked, its cohomology computed with torsion, and cochains reduced to
    classes.  Instances are produced by :func:`hochschild_small_model` and
    :func:`hochschild_full`.
    """

    def __init__(
        self,
        twisting: TwistingMorphism,
        kind: str,
        label: str = "",
        certificate: Optional[KoszulCertificate] = None,
    ):
        if kind not in (KIND_SMALL, KIND_FULL):
            raise HochschildError(f"unknown model kind {kind!r}")
        self.twisting = twisting
        self.conv = twisting.conv
        self.kind = kind
        self.label = label or kind
        self.certificate = certificate
        self.window: WindowSpec = self.conv.window
        cells = self.conv.hom_cells()
        self.cell_count = sum(len(v) for v in cells.values())
        self.complex = CellComplex(
            cells,
            self._diff_of_key,
            shifts=(-1, -1),
            known=self.window.contains_cell,
        )

    # -- the complex -------------------------------------------------------

    def _diff_of_key(self, key: HomCell) -> Elem:
        return twisted_convolution_mu(self.conv, self.twisting, [Elem.basis(key)])

    def differential(self, f: Elem) -> Elem:
        """Twisted differential of a cochain."""
        if f.is_zero():
            return Elem()
        return twisted_convolution_mu(self.conv, self.twisting, [f])

    def operation(self, fs: Sequence[Elem]) -> Elem:
        """Twisted n-ary convolution operation on cochains."""
        return twisted_convolution_mu(self.conv, self.twisting, list(fs))

    def product(self, f: Elem, g: Elem) -> Elem:
        """Twisted cup product of two cochains."""
        if f.is_zero() or g.is_zero():
            return Elem()
        return self.operation([f, g])

    def check(self, cells: Optional[Iterable[Tuple[int, int]]] = None) -> bool:
        """Verify the twisted differential squares to zero on listed cells."""
        return self.complex.check_d_squared(cells)

    # -- cohomology --------------------------------------------------------

    def bigradings(self) -> List[HHBigrading]:
        """Positions of all nonempty cochain cells, sorted."""
        return sorted(HHBigrading.of_cell(c) for c in self.complex.cells)

    def basis(self, bigrading: HHBigrading) -> Tuple[HomCell, ...]:
        return self.complex.basis(bigrading.cell)

    def cohomology(self, bigrading: HHBigrading) -> Tuple[HomologySummary, bool]:
        """The group at one position, with its certainty flag."""
        return self.complex.homology(bigrading.cell)

    def classes(self, bigrading: HHBigrading, label: str = "") -> List[HHClass]:
        """Generator classes of one group, torsion generators first."""
        summary, certain = self.cohomology(bigrading)
        reps = self.complex.homology_basis(bigrading.cell)
        n = len(reps)
        out = []
        for i, rep in enumerate(reps):
            coords = tuple(1 if j == i else 0 for j in range(n))
            tag = f"{label}[{i}]" if label else ""
            out.append(
                HHClass(bigrading, rep, summary.orders[i], coords, tag, certain)
            )
        return out

    def zero_class(self, bigrading: HHBigrading, label: str = "") -> HHClass:
        summary, certain = self.cohomology(bigrading)
        coords = tuple(0 for _ in summary.orders)
        return HHClass(bigrading, Elem(), 1, coords, label, certain)

    def _cell_of(self, elem: Elem) -> Tuple[int, int]:
        w = hom_weight(self.conv, elem)
        d = hom_degree(self.conv, elem)
        if w is None or d is None:
            raise HochschildError("cannot place the zero cochain in a cell")
        return (w, d)

    def class_of(self, elem: Elem, label: str = "") -> HHClass:
        """Reduce a cocycle to its cohomology class.

        Raises ``NotACycleError`` when the element is not killed by the
        twisted differential, and ``HochschildError`` when it involves
        cells outside the model window.
        """
        elem = Elem(elem)
        if elem.is_zero():
            raise HochschildError(
                "the zero cochain has no unique position; use zero_class"
            )
        cell = self._cell_of(elem)
        basis = self.complex.basis(cell)
        index = {k: i for i, k in enumerate(basis)}
        vec = [0] * len(basis)
        for k, c in elem.items():
            i = index.get(k)
            if i is None:
                raise HochschildError(
                    f"cochain involves {k!r} outside the listed cell {cell}"
                )
            vec[i] = c
        summary, certain = self.complex.homology(cell)
        coords = summary.reduce(vec)
        bigrading = HHBigrading.of_cell(cell)
        return HHClass(
            bigrading,
            elem,
            _class_order(coords, summary.orders),
            tuple(coords),
            label,
            certain,
        )

    def is_coboundary(self, elem: Elem) -> bool:
        elem = Elem(elem)
        if elem.is_zero():
            return True
        return self.class_of(elem).is_zero()

    def classes_equal(self, a: Elem, b: Elem) -> bool:
        return self.is_coboundary(a - b)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (
            f"HochschildComplex({self.label}, kind={self.kind}, "
            f"{self.cell_count} cochain cells)"
        )


# ---------------------------------------------------------------------------
# the small model


def _padded_window(degs: Sequence[int], wts: Sequence[int]) -> WindowSpec:
    dmax = max((abs(d) for d in degs), default=0) + 1
    wlo = min(wts, default=0) - 1
    whi = max(wts, default=0) + 1
    return WindowSpec(dmax, wlo, whi)


def _hom_window_over(source: BiGradedModule, target: BiGradedModule) -> WindowSpec:
    degs = []
    wts = []
    for ce in source.elements:
        for ae in target.elements:
            degs.append(ae.degree - ce.degree)
            wts.append(ae.weight - ce.weight)
    return _padded_window(degs, wts)


def hochschild_small_model(
    structure,
    window: Optional[WindowSpec] = None,
    dual=None,
    certificate: Optional[KoszulCertificate] = None,
    certify_window: Optional[WindowSpec] = None,
    label: str = "",
) -> HochschildComplex:
    """The Koszul-dual cochain model of a certified structure.

    For an algebra the dual coalgebra is computed (or taken from ``dual``)
    and the model is ``Hom(dual coalgebra, algebra)`` twisted by the
    canonical morphism.  For a coalgebra, ``dual`` must be the rewriting
    ring realizing its cobar homology, and the model is
    ``Hom(coalgebra, ring)``.  Koszulness is certified first — pass a
    precomputed ``certificate`` to skip recomputation — and a failed
    certificate raises, since the small model only computes the right
    answer over a Koszul input.
    """
    if isinstance(structure, AInftyAlgebra):
        dmax = max(
            (abs(e.degree) for e in structure.module.elements), default=1
        )
        if dual is None:
            dual = koszul_dual_coalgebra(structure, dmax)
        if not isinstance(dual, DualCoalgebraResult):
            raise HochschildError(
                "the dual of an algebra must be a computed dual-coalgebra result"
            )
        if certificate is None:
            span = min(10, dmax + 2)
            certificate = certify_koszul(
                structure, certify_window or WindowSpec(span, -span, 0)
            )
        if not certificate.holds:
            raise HochschildError(
                "Koszulness certificate fails; the dual model does not apply:\n"
                + certificate.describe()
            )
        if window is None:
            window = _hom_window_over(dual.coalgebra.module, structure.module)
        kappa = canonical_twisting(
            structure, dual, window, label=f"canonical({structure.name})"
        )
        return HochschildComplex(
            kappa, KIND_SMALL, label or f"small({structure.name})", certificate
        )
    if isinstance(structure, AInftyCoalgebra):
        if dual is None:
            raise HochschildError(
                "pass the rewriting-ring realization of the cobar homology as dual"
            )
        dmax = max(
            (abs(e.degree) for e in structure.module.elements), default=1
        )
        if certificate is None:
            span = min(8, 2 * dmax)
            certificate = certify_koszul(
                structure, certify_window or WindowSpec(span, 0, span)
            )
        if not certificate.holds:
            raise HochschildError(
                "Koszulness certificate fails; the dual model does not apply:\n"
                + certificate.describe()
            )
        if window is None:
            wts = [-e.weight for e in structure.module.elements]
            window = WindowSpec(2 * dmax, min(wts) - 1, max(wts) + 1)
        kappa = canonical_twisting(
            structure, dual, window, label=f"canonical({structure.name})"
        )
        return HochschildComplex(
            kappa, KIND_SMALL, label or f"small({structure.name})", certificate
        )
    raise HochschildError(f"unsupported structure {structure!r}")


# ---------------------------------------------------------------------------
# the full model


def _word_sort_key(w: TensorWord):
    return (len(w.letters), tuple(str(l.id) for l in w.letters))


def _word_bidegree(w: TensorWord) -> Tuple[int, int]:
    return (
        sum(l.degree + 1 for l in w.letters),
        sum(l.weight + 1 for l in w.letters),
    )


def _word_coalgebra(
    alg: AInftyAlgebra,
    hom_window: WindowSpec,
    cap: int,
    word_degree_cap: Optional[int] = None,
) -> Tuple[AInftyCoalgebra, Elem]:
    """A finite window of the word coalgebra of an algebra.

    Words of suspended non-unit elements are enumerated over the box of
    word bidegrees that can pair with some target element into the hom
    window, then closed under the word differential and under
    deconcatenation so the cooperation tables are total.  Returns the
    coalgebra together with the universal degree -1 element (project a
    one-letter word to its desuspended letter).

    ``word_degree_cap`` bounds the total degree of the enumerated words.
    When the input algebra is a degree-truncation of an infinite algebra
    the cap must sit below the truncation edge, so that the kept words
    form a stage of the inverse system of word subcoalgebras of the
    untruncated object; without the cap the box reaches the edge and the
    complex picks up cocycles of the quotient algebra instead.
    """
    letters = alg.reduced()
    tdegs = [e.degree for e in alg.module.elements]
    twts = [e.weight for e in alg.module.elements]
    span = hom_window.max_total_degree
    deg_lo = min(tdegs) - span
    deg_hi = max(tdegs) + span
    degree_bound = max(abs(deg_lo), abs(deg_hi), 1)
    if word_degree_cap is not None:
        degree_bound = min(degree_bound, max(1, word_degree_cap))
    box = WindowSpec(
        degree_bound,
        min(0, min(twts) - hom_window.weight_max),
        max(0, max(twts) - hom_window.weight_min),
    )
    cells = enumerate_words(letters, 1, box)
    words: Set[TensorWord] = set()
    for ws in cells.values():
        words.update(ws)
    empty = TensorWord((), 1)
    words.add(empty)
    rows: Dict[TensorWord, Elem] = {}
    queue = [w for w in words if w.letters]
    while queue:
        w = queue.pop()
        if w in rows:
            continue
        row = bar_differential_of_word(alg, w)
        rows[w] = row
        fresh = [w2 for w2 in row if w2 not in words]
        for i in range(1, len(w.letters)):
            for part in (
                TensorWord(w.letters[:i], 1),
                TensorWord(w.letters[i:], 1),
            ):
                if part not in words:
                    fresh.append(part)
        for w2 in fresh:
            if w2 not in words:
                words.add(w2)
                queue.append(w2)
        if len(words) > cap:
            raise HochschildError(
                f"word complex exceeds the cap of {cap} basis words; "
                "shrink the window or raise the cap"
            )
    ordered = sorted(words, key=_word_sort_key)
    elements = []
    for w in ordered:
        d, wt = _word_bidegree(w)
        elements.append(BasisElement(w, d, wt))
    module = BiGradedModule(elements)
    coop1: Dict[tuple, Dict[tuple, int]] = {}
    coop2: Dict[tuple, Dict[tuple, int]] = {}
    for w in ordered:
        if not w.letters:
            continue
        row = rows[w]
        if row:
            coop1[(w,)] = {(w2,): c for w2, c in row.items()}
        if len(w.letters) >= 2:
            coop2[(w,)] = {
                (
                    TensorWord(w.letters[:i], 1),
                    TensorWord(w.letters[i:], 1),
                ): 1
                for i in range(1, len(w.letters))
            }
    coops: Dict[int, MultiOp] = {}
    if coop1:
        coops[1] = MultiOp(1, coop1)
    if coop2:
        coops[2] = MultiOp(2, coop2)
    coalg = AInftyCoalgebra(
        module, coops, counit=empty, name=f"words({alg.name})"
    )
    tau_acc: Dict[HomCell, int] = {}
    for w in ordered:
        if len(w.letters) == 1:
            tau_acc[HomCell(w, w.letters[0].id)] = 1
    return coalg, finish(tau_acc)


def hochschild_full(
    alg: AInftyAlgebra,
    window: WindowSpec,
    cap: int = 5000,
    label: str = "",
    word_degree_cap: Optional[int] = None,
) -> HochschildComplex:
    """The word-resolution cochain model of an algebra over a finite window.

    Needs no duality input: the source is a window of the word coalgebra
    of the algebra itself and the twist is the universal word-projection
    morphism.  Cells inside the window are complete, so interior groups
    are certain; ``cap`` bounds the number of word basis elements kept.

    For a degree-truncated input algebra pass ``word_degree_cap`` well
    below the truncation edge (and keep the edge at least the window's
    degree bound above the cap): the computed groups are then a stage of
    the untruncated object's word model, with box-edge cells reported as
    uncertain, rather than the cohomology of the truncated quotient
    algebra, which genuinely differs near the edge.
    """
    if not isinstance(alg, AInftyAlgebra):
        raise HochschildError(
            "the word-resolution model is defined over an algebra"
        )
    coalg, tau_elem = _word_coalgebra(alg, window, cap, word_degree_cap)
    conv = ConvolutionAlgebra(coalg, AlgebraTarget(alg), MODE_COALG_STRICT, window)
    tau = TwistingMorphism(conv, tau_elem, label=f"universal({alg.name})")
    return HochschildComplex(tau, KIND_FULL, label or f"full({alg.name})")


# ---------------------------------------------------------------------------
# tables, products, torsion


def hh_cohomology(
    model: HochschildComplex,
    window: Optional[WindowSpec] = None,
    nontrivial_only: bool = False,
) -> Dict[HHBigrading, Tuple[HomologySummary, bool]]:
    """All groups of a model over a window, keyed by bigrading.

    Unlisted cells inside the window are included (their groups are zero
    and certain when the window says so); with ``nontrivial_only`` the
    table keeps only nonzero or uncertain entries.
    """
    win = window or model.window
    cells = set(model.complex.cells) | set(win.cells())
    out: Dict[HHBigrading, Tuple[HomologySummary, bool]] = {}
    for cell in sorted(cells):
        if not win.contains_cell(cell):
            continue
        summary, certain = model.complex.homology(cell)
        if nontrivial_only and summary.is_trivial() and certain:
            continue
        out[HHBigrading.of_cell(cell)] = (summary, certain)
    return out


def _restriction_image_summary(
    deep: HochschildComplex,
    shallow: HochschildComplex,
    shallow_cap: int,
    cell: Tuple[int, int],
) -> HomologySummary:
    """Group shape of the image of restriction between two word-model stages.

    Generators of the deeper stage's group at ``cell`` are restricted to
    words of degree at most ``shallow_cap`` and reduced to classes of the
    shallower stage; the image subgroup is presented by the integer
    relations among those class coordinates and summarized by its
    invariant factors.  Only the shape (free rank and torsion) of the
    returned summary is meaningful; its coordinates refer to the image's
    own generators, not to a cochain cell.
    """
    down_summary, _ = shallow.complex.homology(cell)
    ambient = len(down_summary.orders)
    reps = deep.complex.homology_basis(cell)
    coords = []
    for rep in reps:
        proj = Elem(
            {
                k: c
                for k, c in rep.items()
                if _word_bidegree(k.source_id)[0] <= shallow_cap
            }
        )
        if proj.is_zero():
            coords.append([0] * ambient)
        else:
            coords.append(list(shallow.class_of(proj).coordinates))
    gens = len(coords)
    if gens == 0 or ambient == 0:
        return coker_summary(SparseIntMat.zero(0, 0))
    torsion_slots = [j for j, o in enumerate(down_summary.orders) if o]
    entries: Dict[Tuple[int, int], int] = {}
    for j in range(ambient):
        for i in range(gens):
            if coords[i][j]:
                entries[(j, i)] = coords[i][j]
    for idx, j in enumerate(torsion_slots):
        entries[(j, gens + idx)] = down_summary.orders[j]
    relations = kernel_basis(
        SparseIntMat(ambient, gens + len(torsion_slots), entries)
    )
    presentation = SparseIntMat(
        gens,
        len(relations),
        {
            (i, c): relations[c][i]
            for c in range(len(relations))
            for i in range(gens)
            if relations[c][i]
        },
    )
    return coker_summary(presentation)


def hh_full_stable(
    alg: AInftyAlgebra,
    window: WindowSpec,
    word_degree_caps: Optional[Tuple[int, int, int]] = None,
    cap: int = 5000,
) -> Dict[HHBigrading, Tuple[HomologySummary, bool]]:
    """Window table of the word-model cohomology of a truncated algebra.

    A degree-truncation distorts the word-model groups near its edge in
    both directions: a finite stage gains cocycles supported on its
    top-degree words and loses classes whose representatives continue
    past the cut.  The groups of the untruncated object are the images
    of the restriction maps between stages once those images stop
    changing, so this builds three stages at increasing word-degree
    caps, takes per-cell images of the deepest and the middle stage in
    the shallowest, and reports the deep image, marked certain when the
    two images have the same shape.

    The input algebra must extend at least the window's degree bound
    beyond the deepest cap, so that every stage is computed exactly.
    """
    top = max(e.degree for e in alg.module.elements)
    span = window.max_total_degree
    if word_degree_caps is None:
        deepest = top - span
        word_degree_caps = (deepest - 4, deepest - 2, deepest)
    lo, mid, hi = word_degree_caps
    if not (2 <= lo < mid < hi):
        raise HochschildError(
            f"need strictly increasing word degree caps >= 2, got "
            f"{word_degree_caps}; extend the algebra truncation"
        )
    if top < hi + span:
        raise HochschildError(
            f"algebra truncated at degree {top} cannot support words of "
            f"degree {hi} under a degree-{span} window; extend it to "
            f"{hi + span}"
        )
    stages = {
        d: hochschild_full(alg, window, cap=cap, word_degree_cap=d)
        for d in (lo, mid, hi)
    }
    out: Dict[HHBigrading, Tuple[HomologySummary, bool]] = {}
    cells = set(stages[lo].complex.cells) | set(window.cells())
    for cell in sorted(cells):
        if not window.contains_cell(cell):
            continue
        deep = _restriction_image_summary(stages[hi], stages[lo], lo, cell)
        middle = _restriction_image_summary(stages[mid], stages[lo], lo, cell)
        stable = (deep.free_rank, tuple(deep.torsion)) == (
            middle.free_rank,
            tuple(middle.torsion),
        )
        out[HHBigrading.of_cell(cell)] = (deep, stable)
    return out


def hh_product(model: HochschildComplex, a, b, label: str = "") -> HHClass:
    """Cup product of two classes (or cocycle representatives)."""
    ra = a.representative if isinstance(a, HHClass) else Elem(a)
    rb = b.representative if isinstance(b, HHClass) else Elem(b)
    bga = a.bigrading if isinstance(a, HHClass) else None
    bgb = b.bigrading if isinstance(b, HHClass) else None
    if bga is None:
        if ra.is_zero():
            raise HochschildError("cannot place a zero factor; pass a class")
        bga = HHBigrading.of_cell(model._cell_of(ra))
    if bgb is None:
        if rb.is_zero():
            raise HochschildError("cannot place a zero factor; pass a class")
        bgb = HHBigrading.of_cell(model._cell_of(rb))
    val = model.product(ra, rb)
    bigrading = HHBigrading(
        bga.cohomological_degree + bgb.cohomological_degree,
        bga.weight + bgb.weight,
    )
    if val.is_zero():
        return model.zero_class(bigrading, label)
    out = model.class_of(val, label)
    if out.bigrading != bigrading:
        raise HochschildError(
            f"product landed at {out.bigrading}, expected {bigrading}"
        )
    return out


def torsion_free_check(summary: HomologySummary) -> bool:
    """True when a computed group has no torsion part."""
    return not summary.torsion


# ---------------------------------------------------------------------------
# formality obstructions


@dataclass
class ObstructionEntry:
    """Verdict for one transferred operation arity."""

    arity: int
    status: str
    hh_class: Optional[HHClass]
    group: HomologySummary
    certain: bool

    def describe(self) -> str:
        extra = ""
        if self.hh_class is not None and self.status != STATUS_VANISHES:
            extra = f" coords={list(self.hh_class.coordinates)}"
        return (
            f"arity {self.arity}: {self.status} "
            f"(group {self.group.group_str()}){extra}"
        )


@dataclass
class ObstructionReport:
    """Obstruction classes of a transferred minimal structure.

    ``formal`` is True when every transferred operation of arity 3 and up
    vanishes identically, False when the first nonvanishing operation
    represents a nonzero class, and None otherwise (the first nonzero
    operation is a coboundary, or the window left its group uncertain, so
    formality is undecided at this window).
    """

    label: str
    max_arity: int
    entries: List[ObstructionEntry] = field(default_factory=list)
    formal: Optional[bool] = None

    def entry(self, arity: int) -> ObstructionEntry:
        for e in self.entries:
            if e.arity == arity:
                return e
        raise KeyError(arity)

    def describe(self) -> str:
        lines = [f"obstructions({self.label}) up to arity {self.max_arity}:"]
        for e in self.entries:
            lines.append("  " + e.describe())
        lines.append(f"  formal: {self.formal}")
        return "\n".join(lines)


def _decode_operation(
    module: BiGradedModule, table: MultiOp, arity: int
) -> Elem:
    """A transferred operation as a cochain on words of suspended inputs.

    The coefficient on a word is the table coefficient times the parity of
    ``1 + sum (k-j)|sx_j|``, matching the sign with which the word
    differential collapses a full word to one letter.
    """
    acc: Dict[HomCell, int] = {}
    for tin, row in table.entries.items():
        letters = tuple(module[i] for i in tin)
        word = TensorWord(letters, 1)
        sdegs = [l.degree + 1 for l in letters]
        eps0 = 1 + sum((arity - j) * sdegs[j - 1] for j in range(1, arity + 1))
        sign = -1 if eps0 % 2 else 1
        for tout, c in row.items():
            hc = HomCell(word, tout[0])
            acc[hc] = acc.get(hc, 0) + sign * c
    return finish(acc)


def obstruction_classes(
    alg: AInftyAlgebra,
    contraction,
    max_arity: int = 4,
    cap: int = 5000,
    label: str = "",
) -> ObstructionReport:
    """Formality obstructions of the minimal structure transferred along a
    contraction.

    The transferred operations of arity 3..max_arity are interpreted as
    cochains over the homology with its binary product (re-weighted so a
    word's weight counts its letters); the arity-k cochain sits in
    cohomological degree 2 and weight -k.  The first nonvanishing
    operation is always a cocycle and its class is reduced; later
    nonvanishing operations are only marked blocked, since their classes
    depend on choices once an earlier obstruction interferes.
    """
    mini = transfer_minimal_structure(alg, contraction, max_arity)
    return obstructions_of_minimal(
        mini, max_arity=max_arity, cap=cap, label=label or alg.name or "algebra"
    )


def obstructions_of_minimal(
    mini: AInftyAlgebra,
    max_arity: Optional[int] = None,
    cap: int = 5000,
    label: str = "",
) -> ObstructionReport:
    """Obstruction report of an already-minimal structure (no 1-ary part)."""
    if 1 in mini.operations:
        raise HochschildError(
            "obstruction classes need a minimal structure (no differential)"
        )
    if max_arity is None:
        max_arity = max(mini.operations, default=2)
    elements = [
        BasisElement(e.id, e.degree, 0) for e in mini.module.elements
    ]
    h0 = BiGradedModule(elements)
    ops: Dict[int, MultiOp] = {}
    table2 = mini.operations.get(2)
    if table2 is not None:
        ops[2] = table2
    h2 = AInftyAlgebra(h0, ops, unit=None, name=f"binary({mini.name})")
    # The obstruction cochains live in cohomological degree 2; the window
    # needs their cells plus one certainty margin, and one weight below the
    # deepest arity so those groups are certain.
    dmax = max((abs(e.degree) for e in elements), default=1)
    hom_window = WindowSpec(min(dmax, 3) + 1, -(max_arity + 1), 1)
    model = hochschild_full(h2, hom_window, cap=cap, label=f"full({h2.name})")

    report = ObstructionReport(label or mini.name or "minimal", max_arity)
    first_nonzero: Optional[int] = None
    for k in range(3, max_arity + 1):
        table = mini.operations.get(k)
        nonzero = table is not None and not table.is_zero()
        bigrading = HHBigrading(2, -k)
        summary, certain = model.cohomology(bigrading)
        cls: Optional[HHClass] = None
        if not nonzero:
            status = STATUS_VANISHES
            cls = model.zero_class(bigrading, f"[op{k}]")
        elif first_nonzero is not None:
            status = STATUS_BLOCKED
        else:
            cochain = _decode_operation(h0, table, k)
            residual = model.differential(cochain)
            if not residual.is_zero():
                raise HochschildError(
                    "internal fault: a first nonvanishing transferred "
                    f"operation must be a cocycle; residual {dict(residual)!r}"
                )
            if not certain:
                status = STATUS_WINDOW
            else:
                cls = model.class_of(cochain, f"[op{k}]")
                status = STATUS_NONZERO if not cls.is_zero() else STATUS_COBOUNDARY
        if nonzero and first_nonzero is None:
            first_nonzero = k
        report.entries.append(
            ObstructionEntry(k, status, cls, summary, certain)
        )
    statuses = [e.status for e in report.entries]
    if all(s == STATUS_VANISHES for s in statuses):
        report.formal = True
    elif STATUS_NONZERO in statuses:
        report.formal = False
    else:
        report.formal = None
    return report
