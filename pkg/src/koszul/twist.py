"""Convolution algebras on graded Hom spaces and twisted constructions.

This module pairs a coalgebra with an algebra through the graded Hom space
between them:

* ``ConvolutionAlgebra`` carries the transported operations on Hom.  Exactly
  one of the two sides may have operations of arity three or higher: in mode
  ``coalg-side-strict`` a strictly coassociative source feeds a
  homotopy-associative target through iterated binary coproducts, and in mode
  ``alg-side-strict`` a homotopy-coassociative source feeds a strictly
  associative target through single n-ary cooperations followed by iterated
  products.
* ``TwistingMorphism`` is a degree -1 Hom element whose Maurer-Cartan sum
  vanishes exactly on every source basis element.  Instances cannot be
  constructed without passing that check, so everything downstream may assume
  a verified twist.
* ``twisted_tensor`` builds the tensor-product complex whose differential
  includes the twist term, and ``certify_contractible`` checks that its
  windowed homology is a single copy of the ground ring in bidegree (0, 0).
* ``twisted_convolution_mu`` perturbs the convolution operations by summing
  over all order-preserving insertions of the twisting morphism, with the
  insertion sign determined by the suspended degrees of the arguments passed
  over.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .ainfty import (
    AInftyAlgebra,
    AInftyCoalgebra,
    RewritingRing,
    StructureError,
    bar_differential_of_word,
)
from .barcobar import DualCoalgebraResult, cobar_differential
from .graded import (
    CellComplex,
    Elem,
    TensorWord,
    WindowSpec,
    add_into,
    enumerate_words,
    finish,
)

MODE_COALG_STRICT = "coalg-side-strict"
MODE_ALG_STRICT = "alg-side-strict"


class TwistError(StructureError):
    """Malformed convolution data or a failed twisting verification."""


def _sgn(n: int) -> int:
    return -1 if n % 2 else 1


# ---------------------------------------------------------------------------
# target adapters


class AlgebraTarget:
    """Target-side interface over a homotopy-associative algebra."""

    kind = "ainfty"

    def __init__(self, algebra: AInftyAlgebra):
        self.algebra = algebra
        self.name = algebra.name

    def keys(self) -> Tuple[str, ...]:
        return tuple(e.id for e in self.algebra.module.elements)

    def degree(self, key: str) -> int:
        return self.algebra.module.degree(key)

    def weight(self, key: str) -> int:
        return self.algebra.module.weight(key)

    @property
    def unit_key(self) -> Optional[str]:
        return self.algebra.unit

    def differential(self, key: str) -> Elem:
        return self.algebra.op_value(1, (key,))

    def operation(self, n: int, keys: Sequence[str]) -> Elem:
        return self.algebra.op_value(n, keys)

    def product(self, keys: Sequence[str]) -> Elem:
        """Left-iterated binary product; only valid in strict mode."""
        keys = list(keys)
        acc = Elem.basis(keys[0])
        for key in keys[1:]:
            nxt: dict = {}
            for k, c in acc.items():
                add_into(nxt, self.algebra.op_value(2, (k, key)), c)
            acc = finish(nxt)
        return acc

    def op_parity(self, n: int) -> int:
        # the n-ary operation has degree n - 2
        return n % 2

    def max_arity(self) -> int:
        arities = list(self.algebra.operations.keys())
        if self.algebra.unit is not None:
            arities.append(2)
        return max(arities, default=1)


class RingTarget:
    """Target-side interface over a strictly associative graded ring.

    Basis keys are the ring's irreducible words; everything sits in weight 0.
    An optional ``differential`` callable (word -> dict word -> coeff) makes
    the target a dg ring; by default the differential is zero.
    """

    kind = "ring"

    def __init__(
        self,
        ring: RewritingRing,
        differential: Optional[Callable[[Tuple[str, ...]], Dict[Tuple[str, ...], int]]] = None,
        name: str = "",
    ):
        self.ring = ring
        self._diff = differential
        self.name = name or "ring"

    def degree(self, key: Tuple[str, ...]) -> int:
        return self.ring.word_degree(tuple(key))

    def weight(self, key: Tuple[str, ...]) -> int:
        return 0

    @property
    def unit_key(self) -> Tuple[str, ...]:
        return ()

    def basis(self, degree: int) -> Tuple[Tuple[str, ...], ...]:
        return tuple(self.ring.basis(degree))

    def differential(self, key: Tuple[str, ...]) -> Elem:
        if self._diff is None:
            return Elem()
        return Elem(dict(self._diff(tuple(key))))

    def product(self, keys: Sequence[Tuple[str, ...]]) -> Elem:
        acc = {tuple(keys[0]): 1}
        for key in keys[1:]:
            acc = self.ring.mul(acc, {tuple(key): 1})
        return Elem(acc)

    def operation(self, n: int, keys: Sequence[Tuple[str, ...]]) -> Elem:
        if n == 1:
            return self.differential(keys[0])
        return self.product(keys)

    def op_parity(self, n: int) -> int:
        # iterated products of the degree-0 multiplication
        return 0

    def max_arity(self) -> int:
        return 2


def _wrap_target(target):
    if isinstance(target, (AlgebraTarget, RingTarget)):
        return target
    if isinstance(target, AInftyAlgebra):
        return AlgebraTarget(target)
    if isinstance(target, RewritingRing):
        return RingTarget(target)
    raise TwistError(f"unsupported convolution target {target!r}")


# ---------------------------------------------------------------------------
# Hom cells and the convolution algebra


@dataclass(frozen=True, order=True)
class HomCell:
    """Basis vector of the Hom space: source basis id paired with a target key."""

    source_id: str
    target_key: object

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"e({self.source_id}|{self.target_key!r})"


class ConvolutionAlgebra:
    """Graded Hom space between a coalgebra and an algebra, with the
    operations transported from whichever side is homotopy-associative.

    ``mode`` selects which side is strict:

    * ``coalg-side-strict``: the source may only carry a differential and a
      coassociative binary coproduct; the target operations are composed with
      iterated (counital) binary coproducts.
    * ``alg-side-strict``: the target may only carry a differential and an
      associative binary product; each source cooperation of arity n is
      followed by the (n-1)-fold iterated product.
    """

    def __init__(
        self,
        source: AInftyCoalgebra,
        target,
        mode: str,
        window: WindowSpec,
    ):
        if mode not in (MODE_COALG_STRICT, MODE_ALG_STRICT):
            raise TwistError(f"unknown convolution mode {mode!r}")
        self.source = source
        self.target = _wrap_target(target)
        self.mode = mode
        self.window = window
        self._split_cache: Dict[Tuple[str, int], Tuple[Tuple[Tuple[str, ...], int], ...]] = {}
        if mode == MODE_COALG_STRICT:
            bad = [n for n in source.cooperations if n >= 3]
            if bad:
                raise TwistError(
                    f"mode {mode} needs a strictly coassociative source; "
                    f"found cooperation arities {sorted(bad)}"
                )
            self._check_coassociative()
        else:
            if self.target.kind == "ainfty":
                bad = [n for n in self.target.algebra.operations if n >= 3]
                if bad:
                    raise TwistError(
                        f"mode {mode} needs a strictly associative target; "
                        f"found operation arities {sorted(bad)}"
                    )

    # -- validation --------------------------------------------------------

    def _check_coassociative(self) -> None:
        src = self.source
        for e in src.module.elements:
            left: dict = {}
            right: dict = {}
            for (c1, c2), cf in src.coop_value(2, e.id, reduced=False).items():
                for (d1, d2), cf2 in src.coop_value(2, c1, reduced=False).items():
                    left[(d1, d2, c2)] = left.get((d1, d2, c2), 0) + cf * cf2
                for (d1, d2), cf2 in src.coop_value(2, c2, reduced=False).items():
                    right[(c1, d1, d2)] = right.get((c1, d1, d2), 0) + cf * cf2
            if finish(left) != finish(right):
                raise TwistError(
                    f"binary coproduct is not coassociative at {e.id!r}"
                )

    # -- coproduct splittings ---------------------------------------------

    def _splits(self, cid: str, n: int) -> Tuple[Tuple[Tuple[str, ...], int], ...]:
        """All n-fold splittings of a basis element, with coefficients.

        Counital convention: binary splittings include the counit factors, so
        unit-absorbing terms survive until a Hom element kills them.
        """
        key = (cid, n)
        cached = self._split_cache.get(key)
        if cached is not None:
            return cached
        if n == 1:
            result: Tuple[Tuple[Tuple[str, ...], int], ...] = (((cid,), 1),)
        elif self.mode == MODE_COALG_STRICT:
            acc: Dict[Tuple[str, ...], int] = {}
            for (c1, c2), cf in self.source.coop_value(2, cid, reduced=False).items():
                for rest, cf2 in self._splits(c2, n - 1):
                    t = (c1,) + rest
                    acc[t] = acc.get(t, 0) + cf * cf2
            result = tuple((t, c) for t, c in acc.items() if c)
        else:
            if n == 2:
                result = tuple(
                    (t, c)
                    for t, c in self.source.coop_value(2, cid, reduced=False).items()
                )
            else:
                result = tuple(
                    (t, c) for t, c in self.source.coop_value(n, cid).items()
                )
        self._split_cache[key] = result
        return result

    def max_mu_arity(self) -> int:
        """Largest arity whose transported operation can be nonzero."""
        if self.mode == MODE_COALG_STRICT:
            return max(2, self.target.max_arity())
        return max([2] + [n for n in self.source.cooperations])

    # -- cells -------------------------------------------------------------

    def hom_cells(self) -> Dict[Tuple[int, int], Tuple[HomCell, ...]]:
        """Hom basis grouped by (weight, degree) within the window."""
        out: Dict[Tuple[int, int], List[HomCell]] = {}
        win = self.window
        for ce in self.source.module.elements:
            if self.target.kind == "ainfty":
                candidates = self.target.keys()
            else:
                candidates = []
                for d in range(-win.max_total_degree, win.max_total_degree + 1):
                    tdeg = d + ce.degree
                    if tdeg >= 0:
                        candidates.extend(self.target.basis(tdeg))
            for key in candidates:
                w = self.target.weight(key) - ce.weight
                d = self.target.degree(key) - ce.degree
                if win.contains(w, d):
                    out.setdefault((w, d), []).append(HomCell(ce.id, key))
        return {cell: tuple(v) for cell, v in sorted(out.items())}


# ---------------------------------------------------------------------------
# Hom element helpers


def _by_source(f: Elem) -> Dict[str, Dict[object, object]]:
    out: Dict[str, Dict[object, object]] = {}
    for hc, c in f.items():
        if not isinstance(hc, HomCell):
            raise TwistError(f"expected Hom-cell keys, got {hc!r}")
        out.setdefault(hc.source_id, {})[hc.target_key] = c
    return out


def hom_degree(conv: ConvolutionAlgebra, f: Elem) -> Optional[int]:
    """Common degree of a homogeneous Hom element (None for the zero map)."""
    degs = set()
    for hc in f:
        degs.add(conv.target.degree(hc.target_key) - conv.source.module.degree(hc.source_id))
    if not degs:
        return None
    if len(degs) > 1:
        raise TwistError(f"Hom element is not degree-homogeneous: {sorted(degs)}")
    return degs.pop()


def hom_weight(conv: ConvolutionAlgebra, f: Elem) -> Optional[int]:
    """Common weight of a homogeneous Hom element (None for the zero map)."""
    wts = set()
    for hc in f:
        wts.add(conv.target.weight(hc.target_key) - conv.source.module.weight(hc.source_id))
    if not wts:
        return None
    if len(wts) > 1:
        raise TwistError(f"Hom element is not weight-homogeneous: {sorted(wts)}")
    return wts.pop()


def _mu1(conv: ConvolutionAlgebra, f: Elem) -> Elem:
    """Differential of the convolution algebra:
    (d_target o f) - (-1)^{|f|} (f o d_source)."""
    if f.is_zero():
        return Elem()
    deg = hom_degree(conv, f)
    acc: dict = {}
    for hc, c in f.items():
        for k2, c2 in conv.target.differential(hc.target_key).items():
            key = HomCell(hc.source_id, k2)
            acc[key] = acc.get(key, 0) + c * c2
    sign = -_sgn(deg)
    fidx = _by_source(f)
    for ce in conv.source.module.elements:
        for c2, dc in conv.source.differential(ce.id).items():
            vals = fidx.get(c2)
            if not vals:
                continue
            for k, fc in vals.items():
                key = HomCell(ce.id, k)
                acc[key] = acc.get(key, 0) + sign * dc * fc
    return finish(acc)


def convolution_mu(conv: ConvolutionAlgebra, fs: Sequence[Elem]) -> Elem:
    """The transported n-ary operation evaluated on Hom elements.

    Crossing signs follow the operator evaluation rule: moving the j-th Hom
    element past the i-th coproduct factor costs (-1)^{|f_j| |c_i|}.
    """
    fs = list(fs)
    n = len(fs)
    if n == 0:
        raise TwistError("convolution operations need at least one argument")
    if n == 1:
        return _mu1(conv, fs[0])
    if any(f.is_zero() for f in fs):
        return Elem()
    parities = [hom_degree(conv, f) % 2 for f in fs]
    indices = [_by_source(f) for f in fs]
    # probe the sparsest factor first so dead splittings cost one lookup
    order = sorted(range(n), key=lambda i: len(indices[i]))
    acc: dict = {}
    for ce in conv.source.module.elements:
        for parts, coeff in conv._splits(ce.id, n):
            vals: List[Optional[dict]] = [None] * n
            for i in order:
                v = indices[i].get(parts[i])
                if not v:
                    break
                vals[i] = v
            else:
                cross = 0
                for i in range(n):
                    di = conv.source.module.degree(parts[i])
                    for j in range(i + 1, n):
                        cross += parities[j] * di
                base = coeff * _sgn(cross)
                combos = [((), 1)]
                for v in vals:
                    combos = [
                        (keys + (k,), c * ck)
                        for keys, c in combos
                        for k, ck in v.items()
                    ]
                for keys, cprod in combos:
                    out = conv.target.operation(n, keys)
                    if out.is_zero():
                        continue
                    for k2, c2 in out.items():
                        key = HomCell(ce.id, k2)
                        acc[key] = acc.get(key, 0) + base * cprod * c2
    return finish(acc)


# ---------------------------------------------------------------------------
# twisting morphisms


@dataclass
class TwistingVerdict:
    """Per-basis residuals of the Maurer-Cartan sum; empty means verified."""

    residuals: Dict[str, Elem]
    checked: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.residuals

    def describe(self) -> str:
        if self.ok:
            return f"twisting verified on {len(self.checked)} basis elements"
        lines = [f"twisting fails on {len(self.residuals)} basis element(s):"]
        for cid in sorted(self.residuals):
            lines.append(f"  {cid}: {dict(self.residuals[cid])!r}")
        return "\n".join(lines)


def check_twisting(conv: ConvolutionAlgebra, element: Elem) -> TwistingVerdict:
    """Evaluate the Maurer-Cartan sum of a degree -1 Hom element.

    The sum of all transported operations applied to copies of the element is
    computed exactly; the verdict records the residual grouped by source
    basis element.  The sum is finite because the operation tables are.
    """
    if not element.is_zero() and hom_degree(conv, element) != -1:
        raise TwistError("a twisting morphism must be homogeneous of degree -1")
    total: dict = {}
    for n in range(1, conv.max_mu_arity() + 1):
        add_into(total, convolution_mu(conv, [element] * n))
    per_source: Dict[str, dict] = {}
    for hc, c in finish(total).items():
        per_source.setdefault(hc.source_id, {})[hc.target_key] = c
    residuals = {cid: finish(v) for cid, v in per_source.items()}
    residuals = {cid: v for cid, v in residuals.items() if not v.is_zero()}
    checked = tuple(e.id for e in conv.source.module.elements)
    return TwistingVerdict(residuals, checked)


class TwistingMorphism:
    """A degree -1 Hom element with exactly vanishing Maurer-Cartan sum.

    Construction performs the verification and raises ``TwistError`` when any
    residual survives, so holding an instance certifies the twist.  Under the
    suspension bookkeeping used for bar and cobar weights, a twisting
    morphism is homogeneous of weight -1.
    """

    def __init__(self, conv: ConvolutionAlgebra, element: Elem, label: str = ""):
        verdict = check_twisting(conv, element)
        if not verdict.ok:
            raise TwistError(
                f"not a twisting morphism ({label or 'unnamed'}):\n"
                + verdict.describe()
            )
        if not element.is_zero():
            w = hom_weight(conv, element)
            if w != -1:
                raise TwistError(
                    f"twisting morphism must have weight -1, got {w}"
                )
        self.conv = conv
        self.element = element
        self.label = label or "twist"
        self.verified_window = conv.window
        self._index = _by_source(element)

    @property
    def mapping(self) -> Dict[str, Elem]:
        return {cid: Elem(vals) for cid, vals in self._index.items()}

    def value(self, cid: str) -> Elem:
        vals = self._index.get(cid)
        return Elem(vals) if vals else Elem()

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"TwistingMorphism({self.label}, {len(self.element)} terms)"


# ---------------------------------------------------------------------------
# universal twisting morphisms


class UniversalTwisting:
    """Desuspension morphism out of the word complex of a structure.

    * For an algebra: the map from suspended words that returns the letter of
      a length-one word and zero otherwise.
    * For a coalgebra: the map sending a basis element to its length-one
      desuspended word.

    Both are verified on construction; see ``universal_twisting``.
    """

    def __init__(self, side: str, structure, verified_window: WindowSpec):
        self.side = side
        self.structure = structure
        self.verified_window = verified_window
        self.label = f"universal-{side}"

    def value(self, arg) -> Elem:
        if self.side == "bar":
            if not isinstance(arg, TensorWord):
                raise TwistError("the bar-side universal twisting eats words")
            if len(arg.letters) == 1:
                return Elem.basis(arg.letters[0].id)
            return Elem()
        cid = arg if isinstance(arg, str) else arg.id
        if self.structure.counit is not None and cid == self.structure.counit:
            return Elem()
        elem = self.structure.module.by_id[cid]
        return Elem.basis(TensorWord((elem,), -1))


def _verify_bar_universal(alg: AInftyAlgebra, window: WindowSpec) -> None:
    """Maurer-Cartan residual of the word-projection morphism, word by word.

    On a word w the sum collapses to  m1(tau w) + tau(b w) + the single
    all-singleton deconcatenation term; each must cancel exactly.
    """
    letters = [e for e in alg.module.elements if e.id != alg.unit]
    words = enumerate_words(letters, 1, window)
    bad = []
    for cell, ws in sorted(words.items()):
        for w in ws:
            n = len(w.letters)
            acc: dict = {}
            if n == 1:
                add_into(acc, alg.op_value(1, (w.letters[0].id,)))
            for w2, c in bar_differential_of_word(alg, w).items():
                if len(w2.letters) == 1:
                    k = w2.letters[0].id
                    acc[k] = acc.get(k, 0) + c
            if n >= 2:
                cross = 0
                for i in range(n):
                    for _j in range(i + 1, n):
                        cross += w.letters[i].degree + 1
                ids = tuple(x.id for x in w.letters)
                add_into(acc, alg.op_value(n, ids), _sgn(cross))
            res = finish(acc)
            if not res.is_zero():
                bad.append((w, res))
    if bad:
        w, res = bad[0]
        raise TwistError(
            f"bar-side universal twisting fails on {w!r}: {dict(res)!r}"
            f" ({len(bad)} failures total)"
        )


def _verify_cobar_universal(coalg: AInftyCoalgebra) -> None:
    """Check the derivation identity defining the word differential:

        delta(tau c) - tau(d c) = sum over n >= 2 of the signed n-letter
        words produced by the n-ary cooperation of c.

    The insertion morphism satisfies this identity exactly; with the sign
    convention fixed by the word differential the plain Maurer-Cartan sum
    instead doubles the right-hand side, which is frozen as a test.
    """
    bad = []
    for ce in coalg.module.elements:
        if coalg.counit is not None and ce.id == coalg.counit:
            continue
        acc: dict = {}
        add_into(acc, cobar_differential(coalg, TensorWord((ce,), -1)))
        for c2, dc in coalg.differential(ce.id).items():
            w = TensorWord((coalg.module.by_id[c2],), -1)
            acc[w] = acc.get(w, 0) - dc
        for n in sorted(coalg.cooperations):
            if n < 2:
                continue
            for ids, coeff in coalg.coop_value(n, ce.id).items():
                degs = [coalg.module.degree(i) for i in ids]
                cross = sum(degs[i] * (n - 1 - i) for i in range(n))
                w = TensorWord(tuple(coalg.module.by_id[i] for i in ids), -1)
                acc[w] = acc.get(w, 0) - _sgn(cross) * coeff
        res = finish(acc)
        if not res.is_zero():
            bad.append((ce.id, res))
    if bad:
        cid, res = bad[0]
        raise TwistError(
            f"cobar-side universal twisting fails on {cid!r}: {dict(res)!r}"
        )


def universal_twisting(structure, window: Optional[WindowSpec] = None) -> UniversalTwisting:
    """The canonical degree -1 morphism between a structure and its word
    complex: projection-desuspension for algebras, desuspension-inclusion
    for coalgebras.  Verified on construction."""
    if isinstance(structure, AInftyAlgebra):
        if window is None:
            dmax = max(
                (abs(e.degree) for e in structure.module.elements), default=1
            )
            window = WindowSpec(3 * (dmax + 1), -3 * (dmax + 1), 0)
        _verify_bar_universal(structure, window)
        return UniversalTwisting("bar", structure, window)
    if isinstance(structure, AInftyCoalgebra):
        if window is None:
            dmax = max(
                (abs(e.degree) for e in structure.module.elements), default=1
            )
            window = WindowSpec(dmax, 0, max(1, dmax))
        _verify_cobar_universal(structure)
        return UniversalTwisting("cobar", structure, window)
    raise TwistError(f"unsupported structure {structure!r}")


# ---------------------------------------------------------------------------
# canonical twisting morphisms


def _auto_window_finite(source: AInftyCoalgebra, target: AlgebraTarget) -> WindowSpec:
    degs = []
    wts = []
    for ce in source.module.elements:
        for key in target.keys():
            degs.append(target.degree(key) - ce.degree)
            wts.append(target.weight(key) - ce.weight)
    dmax = max((abs(d) for d in degs), default=0)
    return WindowSpec(dmax, min(wts, default=0), max(wts, default=0))


def canonical_twisting(structure, dual, window: Optional[WindowSpec] = None, label: str = "") -> TwistingMorphism:
    """The twisting morphism induced between a structure and its computed
    dual.

    * ``(algebra, dual coalgebra result)``: restrict the bar-side universal
      morphism along the dual's word representatives; each dual basis element
      maps to the desuspended letter of the length-one part of its
      representative.
    * ``(coalgebra, rewriting ring)``: send each weight-1 basis element to
      the matching ring generator; everything else maps to zero.

    The result is constructor-verified like any ``TwistingMorphism``.
    """
    if isinstance(structure, AInftyAlgebra):
        if not isinstance(dual, DualCoalgebraResult):
            raise TwistError(
                "canonical twisting for an algebra needs its dual coalgebra result"
            )
        target = AlgebraTarget(structure)
        source = dual.coalgebra
        if window is None:
            window = _auto_window_finite(source, target)
        conv = ConvolutionAlgebra(source, target, MODE_COALG_STRICT, window)
        acc: dict = {}
        for cid, rep in dual.representatives.items():
            for w, c in rep.items():
                if len(w.letters) == 1:
                    acc[HomCell(cid, w.letters[0].id)] = c
        return TwistingMorphism(
            conv, finish(acc), label or f"kappa({structure.name or 'algebra'})"
        )
    if isinstance(structure, AInftyCoalgebra):
        target = _wrap_target(dual)
        if target.kind != "ring":
            raise TwistError(
                "canonical twisting for a coalgebra needs a ring realization "
                "of its dual algebra"
            )
        gen_names = {name for name, _d in target.ring.generators}
        weight_one = [e for e in structure.module.elements if e.weight == 1]
        missing = {e.id for e in weight_one} - gen_names
        if missing:
            raise TwistError(
                f"ring generators do not match weight-1 elements: missing {sorted(missing)}"
            )
        if window is None:
            dmax = max(abs(e.degree) for e in structure.module.elements)
            wts = [-e.weight for e in structure.module.elements]
            window = WindowSpec(2 * dmax, min(wts), max(wts))
        conv = ConvolutionAlgebra(structure, target, MODE_ALG_STRICT, window)
        acc = {HomCell(e.id, (e.id,)): 1 for e in weight_one}
        return TwistingMorphism(
            conv, finish(acc), label or f"kappa({structure.name or 'coalgebra'})"
        )
    raise TwistError(f"unsupported structure {structure!r}")


# ---------------------------------------------------------------------------
# twisted tensor products


def _pad(window: WindowSpec) -> WindowSpec:
    return WindowSpec(
        window.max_total_degree + 1,
        window.weight_min - 1,
        window.weight_max + 1,
        window.max_arity,
    )


class TwistedComplex:
    """The tensor product of the source coalgebra and the target algebra
    with the twist term added to the differential.

    Basis keys are pairs (source id, target key).  The differential is

        d(c (x) a) = (d c) (x) a + (-1)^{|c|} c (x) (d a) + twist terms,

    where the arity-k twist term splits c into k factors, feeds all but the
    first through the twisting morphism, and multiplies the results into a.
    Sign layers: each twist application passes over the factors to its left,
    and in the homotopy-associative mode the k-ary operation passes over the
    lead factor with parity k.
    """

    def __init__(self, twisting: TwistingMorphism, window: WindowSpec):
        self.twisting = twisting
        self.window = window
        conv = twisting.conv
        self.source = conv.source
        self.target = conv.target
        self.mode = conv.mode
        padded = _pad(window)
        self._padded = padded
        cells: Dict[Tuple[int, int], List[Tuple[str, object]]] = {}
        for ce in self.source.module.elements:
            if self.target.kind == "ainfty":
                candidates = self.target.keys()
            else:
                candidates = []
                for d in range(-padded.max_total_degree, padded.max_total_degree + 1):
                    tdeg = d - ce.degree
                    if tdeg >= 0:
                        candidates.extend(self.target.basis(tdeg))
            for key in candidates:
                w = ce.weight + self.target.weight(key)
                d = ce.degree + self.target.degree(key)
                if padded.contains(w, d):
                    cells.setdefault((w, d), []).append((ce.id, key))
        self.complex = CellComplex(
            {c: tuple(v) for c, v in sorted(cells.items())},
            self._diff,
            shifts=(-1, -1),
            known=padded.contains_cell,
        )

    def _diff(self, pair: Tuple[str, object]) -> Elem:
        cid, tkey = pair
        conv = self.twisting.conv
        src = self.source
        tgt = self.target
        cdeg = src.module.degree(cid)
        acc: dict = {}
        for c2, dc in src.differential(cid).items():
            k = (c2, tkey)
            acc[k] = acc.get(k, 0) + dc
        for k2, c2 in tgt.differential(tkey).items():
            k = (cid, k2)
            acc[k] = acc.get(k, 0) + _sgn(cdeg) * c2
        for k in range(2, conv.max_mu_arity() + 1):
            for parts, coeff in conv._splits(cid, k):
                lead, mids = parts[0], parts[1:]
                tau_vals = [self.twisting.value(t) for t in mids]
                if any(v.is_zero() for v in tau_vals):
                    continue
                lead_deg = src.module.degree(lead)
                mid_degs = [src.module.degree(t) for t in mids]
                exp = 0
                run = lead_deg
                for i in range(len(mids)):
                    exp += run
                    run += mid_degs[i]
                if tgt.kind == "ainfty":
                    exp += tgt.op_parity(k) * lead_deg
                base = coeff * _sgn(exp)
                combos = [((), 1)]
                for v in tau_vals:
                    combos = [
                        (keys + (kk,), c * ck)
                        for keys, c in combos
                        for kk, ck in v.items()
                    ]
                for keys, cprod in combos:
                    if tgt.kind == "ainfty":
                        out = tgt.operation(k, keys + (tkey,))
                    else:
                        out = tgt.product(list(keys) + [tkey])
                    for k2, c2 in out.items():
                        kk = (lead, k2)
                        acc[kk] = acc.get(kk, 0) + base * cprod * c2
        return finish(acc)

    def check(self) -> bool:
        return self.complex.check_d_squared()

    def homology(self, cell: Tuple[int, int]):
        return self.complex.homology(cell)

    def homology_table(self) -> Dict[Tuple[int, int], object]:
        out = {}
        for cell in sorted(self.complex.cells):
            if self.window.contains_cell(cell):
                summary, certain = self.complex.homology(cell)
                if not summary.is_trivial() or cell == (0, 0):
                    out[cell] = (summary, certain)
        return out


def twisted_tensor(
    source: AInftyCoalgebra,
    target,
    twisting: TwistingMorphism,
    window: WindowSpec,
) -> TwistedComplex:
    """Build and return the twisted tensor-product complex.

    The source and target must be the ones the twisting morphism was
    verified against; the twist is never applied to unverified data.
    """
    conv = twisting.conv
    if source is not conv.source:
        raise TwistError("source does not match the verified twisting morphism")
    wrapped = _wrap_target(target)
    same = (
        wrapped.kind == conv.target.kind
        and (
            (wrapped.kind == "ainfty" and wrapped.algebra is conv.target.algebra)
            or (wrapped.kind == "ring" and wrapped.ring is conv.target.ring)
        )
    )
    if not same:
        raise TwistError("target does not match the verified twisting morphism")
    return TwistedComplex(twisting, window)


@dataclass
class ContractibilityCertificate:
    """Window verdict: homology is one ground-ring copy at (0, 0) and
    nothing anywhere else."""

    holds: bool
    window: WindowSpec
    offending: Tuple[Tuple[Tuple[int, int], str], ...]
    excluded: Tuple[Tuple[int, int], ...]
    cells_checked: int

    def describe(self) -> str:
        if self.holds:
            msg = (
                f"contractible in window (degree <= {self.window.max_total_degree}, "
                f"weights {self.window.weight_min}..{self.window.weight_max}); "
                f"{self.cells_checked} cells checked"
            )
        else:
            lines = [f"not contractible; {len(self.offending)} offending cell(s):"]
            for cell, desc in self.offending:
                lines.append(f"  {cell}: {desc}")
            msg = "\n".join(lines)
        if self.excluded:
            msg += f"\nexcluded edge-uncertain cells: {list(self.excluded)}"
        return msg


def certify_contractible(
    t: TwistedComplex, window: Optional[WindowSpec] = None
) -> ContractibilityCertificate:
    """Certify that the windowed homology of a twisted tensor product is a
    single ground-ring copy in bidegree (0, 0)."""
    if window is None:
        window = t.window
    if (
        window.max_total_degree > t.window.max_total_degree
        or window.weight_min < t.window.weight_min
        or window.weight_max > t.window.weight_max
    ):
        raise TwistError(
            "certification window exceeds the window the complex was built on"
        )
    t.check()
    offending: List[Tuple[Tuple[int, int], str]] = []
    excluded: List[Tuple[int, int]] = []
    checked = 0
    cells = set(c for c in t.complex.cells if window.contains_cell(c))
    cells.add((0, 0))
    for cell in sorted(cells):
        summary, certain = t.complex.homology(cell)
        if not certain:
            excluded.append(cell)
            continue
        checked += 1
        if cell == (0, 0):
            if summary.free_rank != 1 or summary.torsion:
                offending.append((cell, f"expected one free generator, got {summary.group_str()}"))
        elif not summary.is_trivial():
            offending.append((cell, summary.group_str()))
    ok = not offending and (0, 0) not in excluded
    return ContractibilityCertificate(
        ok, window, tuple(offending), tuple(excluded), checked
    )


# ---------------------------------------------------------------------------
# twisted convolution operations


def shuffle_terms(
    n: int, i: int, suspended_parities: Sequence[int]
) -> List[Tuple[Tuple[int, ...], int]]:
    """Order-preserving insertions of i twist copies among n arguments.

    Returns (positions, sign) pairs in lexicographic order of the 0-based
    insertion slots within the final length-(n + i) argument list.  Each
    insertion contributes the suspended parity of every original argument
    standing to its left; insertions never cross each other and count as
    suspended-degree 0 against later insertions.
    """
    if len(suspended_parities) != n:
        raise TwistError("one suspended parity is needed per argument")
    out: List[Tuple[Tuple[int, ...], int]] = []
    for positions in combinations(range(n + i), i):
        pos = set(positions)
        exp = 0
        seen = 0
        for slot in range(n + i):
            if slot in pos:
                exp += sum(suspended_parities[:seen])
            else:
                seen += 1
        out.append((positions, _sgn(exp)))
    return out


def twisted_convolution_mu(
    conv: ConvolutionAlgebra,
    twisting: TwistingMorphism,
    fs: Sequence[Elem],
) -> Elem:
    """Convolution operation perturbed by the twisting morphism:
    the sum over all insertion patterns of the twist, with insertion signs
    from ``shuffle_terms``.  Finite because the operation tables are."""
    if twisting.conv is not conv:
        raise TwistError("twisting morphism was verified on a different convolution algebra")
    fs = list(fs)
    n = len(fs)
    if n == 0:
        raise TwistError("twisted operations need at least one argument")
    if any(f.is_zero() for f in fs):
        return Elem()
    sf = [(hom_degree(conv, f) + 1) % 2 for f in fs]
    bound = conv.max_mu_arity()
    acc: dict = {}
    for i in range(0, max(0, bound - n) + 1):
        for positions, sign in shuffle_terms(n, i, sf):
            pos = set(positions)
            args: List[Elem] = []
            it = iter(fs)
            for slot in range(n + i):
                args.append(twisting.element if slot in pos else next(it))
            add_into(acc, convolution_mu(conv, args), sign)
    return finish(acc)
