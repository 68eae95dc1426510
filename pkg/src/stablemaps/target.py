"""Finite ring model of a target variety.

A :class:`Target` stores a graded Chow ring with rational structure
constants, a free monoid of curve classes, the pairing between curve
classes and divisors, and the two distinguished divisors ``c1(S)`` and
``c1(TX)``.  Everything is exact (``fractions.Fraction``) and immutable.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

CurveClass = tuple  # tuple[int, ...], componentwise nonnegative


class TargetError(ValueError):
    """Raised when a target description violates a ring invariant."""


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` (or an int) into a Fraction; floats are refused."""
    if isinstance(text, bool) or isinstance(text, float):
        raise TargetError(f"rationals must be exact strings, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise TargetError(f"expected rational string, got {text!r}")
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise TargetError(f"bad rational {text!r}") from exc
    if "." in text or "e" in text.lower():
        raise TargetError(f"rationals must be 'p/q' strings, got {text!r}")
    return value


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ChowElement:
    """Rational linear combination of basis elements, stored sparsely."""

    terms: tuple = ()  # sorted tuple of (basis index, Fraction), no zeros

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, Fraction]) -> "ChowElement":
        items = tuple(sorted((i, Fraction(c)) for i, c in coeffs.items() if c != 0))
        return cls(items)

    @classmethod
    def basis(cls, index: int, coeff=1) -> "ChowElement":
        return cls.from_dict({index: Fraction(coeff)})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ChowElement") -> "ChowElement":
        out = self.as_dict()
        for i, c in other.terms:
            out[i] = out.get(i, 0) + c
        return ChowElement.from_dict(out)

    def __neg__(self) -> "ChowElement":
        return ChowElement(tuple((i, -c) for i, c in self.terms))

    def __sub__(self, other: "ChowElement") -> "ChowElement":
        return self + (-other)

    def scale(self, q) -> "ChowElement":
        return ChowElement.from_dict({i: c * q for i, c in self.terms})


@dataclass(frozen=True)
class Target:
    """Exact model of ``A*(X)``, the curve-class monoid and the pairings."""

    name: str
    dim: int
    labels: tuple          # basis labels; index 0 is the unit
    codims: tuple          # codimension of each basis element
    products: Mapping      # (i, j) -> ChowElement, for i <= j
    integral: tuple        # Fraction per basis element
    curve_rank: int
    pairings: tuple        # pairings[c][j]: generator c against basis j (codim 1 only)
    c1_S: ChowElement
    c1_TX: ChowElement
    _index: Mapping = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    def __hash__(self):
        return hash((self.name, self.dim, self.labels, self.c1_S, self.c1_TX))

    # -- basis helpers -------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise TargetError(f"unknown basis label {label!r}") from None

    def element(self, label: str, coeff=1) -> ChowElement:
        return ChowElement.basis(self.index(label), coeff)

    @property
    def unit(self) -> ChowElement:
        return ChowElement.basis(0)

    def codim_of(self, alpha: ChowElement) -> int:
        """Codimension of a homogeneous element (raises if mixed or zero)."""
        degs = {self.codims[i] for i, _ in alpha.terms}
        if len(degs) != 1:
            raise TargetError("element is zero or not homogeneous")
        return degs.pop()

    def basis_product(self, i: int, j: int) -> ChowElement:
        key = (i, j) if i <= j else (j, i)
        return self.products.get(key, ChowElement())

    def scaled(self, m: int) -> "Target":
        """Same ring with ``S`` replaced by ``S^{m}``."""
        return Target(self.name, self.dim, self.labels, self.codims, self.products,
                      self.integral, self.curve_rank, self.pairings,
                      self.c1_S.scale(m), self.c1_TX)

    def with_line_bundle(self, c1_S: ChowElement) -> "Target":
        return Target(self.name, self.dim, self.labels, self.codims, self.products,
                      self.integral, self.curve_rank, self.pairings, c1_S, self.c1_TX)


def chow_product(target: Target, x: ChowElement, y: ChowElement) -> ChowElement:
    out: dict = {}
    for i, a in x.terms:
        for j, b in y.terms:
            for k, c in target.basis_product(i, j).terms:
                out[k] = out.get(k, 0) + a * b * c
    return ChowElement.from_dict(out)


def chow_power(target: Target, x: ChowElement, e: int) -> ChowElement:
    if e < 0:
        raise ValueError("negative power")
    result = target.unit
    for _ in range(e):
        result = chow_product(target, result, x)
    return result


def integrate(target: Target, x: ChowElement) -> Fraction:
    return sum((c * target.integral[i] for i, c in x.terms), Fraction(0))


def degree_pairing(target: Target, beta: Sequence[int], divisor: ChowElement) -> Fraction:
    """``∫_β D`` for a homogeneous codimension-one ``D``."""
    if divisor.is_zero():
        return Fraction(0)
    if target.codim_of(divisor) != 1:
        raise TargetError("degree pairing needs a codimension-1 class")
    if len(beta) != target.curve_rank:
        raise TargetError(f"curve class {tuple(beta)} has wrong rank")
    total = Fraction(0)
    for j, c in divisor.terms:
        for gen, mult in enumerate(beta):
            total += mult * c * target.pairings[gen][j]
    return total


def enumerate_splittings(beta: Sequence[int], k: int) -> list:
    """All ordered ``k``-tuples of curve classes summing to ``beta``, sorted."""
    if k < 1:
        raise ValueError("k must be positive")
    per_coord = []
    for b in beta:
        comps = [c for c in itertools.product(range(b + 1), repeat=k) if sum(c) == b]
        per_coord.append(comps)
    out = []
    for choice in itertools.product(*per_coord):
        out.append(tuple(tuple(choice[r][p] for r in range(len(beta))) for p in range(k)))
    return sorted(out)


def curve_add(x: Sequence[int], y: Sequence[int]) -> tuple:
    return tuple(a + b for a, b in zip(x, y))


def is_zero_class(beta: Sequence[int]) -> bool:
    return not any(beta)


# ---------------------------------------------------------------------------
# construction and validation

def _validate(t: Target) -> Target:
    n = t.rank
    if n == 0 or t.codims[0] != 0:
        raise TargetError("basis element 0 must be the codimension-0 unit")
    if any(c < 0 or c > t.dim for c in t.codims):
        raise TargetError("basis codimension out of range")
    for i in range(n):
        if t.basis_product(0, i) != ChowElement.basis(i):
            raise TargetError("unit is not an identity for the product")
    for (i, j), val in t.products.items():
        for k, _ in val.terms:
            if t.codims[k] != t.codims[i] + t.codims[j]:
                raise TargetError("non-graded product")
    for i, j, k in itertools.product(range(n), repeat=3):
        left = chow_product(t, chow_product(t, ChowElement.basis(i), ChowElement.basis(j)),
                            ChowElement.basis(k))
        right = chow_product(t, ChowElement.basis(i),
                             chow_product(t, ChowElement.basis(j), ChowElement.basis(k)))
        if left != right:
            raise TargetError("non-associative product table")
    for i, val in enumerate(t.integral):
        if val != 0 and t.codims[i] != t.dim:
            raise TargetError("integral supported off top codimension")
    if len(t.pairings) != t.curve_rank or any(len(row) != n for row in t.pairings):
        raise TargetError("pairing matrix has wrong shape")
    for row in t.pairings:
        for j, v in enumerate(row):
            if v != 0 and t.codims[j] != 1:
                raise TargetError("pairing entry against a non-divisor")
    for name, div in (("c1S", t.c1_S), ("c1TX", t.c1_TX)):
        if not div.is_zero() and t.codim_of(div) != 1:
            raise TargetError(f"{name} must be a divisor")
    return t


def _build(name, dim, basis, table, integral, curve_rank, pairings, c1S, c1TX) -> Target:
    labels = tuple(lab for lab, _ in basis)
    codims = tuple(int(c) for _, c in basis)
    if len(set(labels)) != len(labels):
        raise TargetError("duplicate basis labels")
    products = {}
    for (i, j), val in table.items():
        key = (i, j) if i <= j else (j, i)
        if key in products and products[key] != val:
            raise TargetError("non-commutative product table")
        products[key] = val
    for i in range(len(labels)):
        products.setdefault((0, i), ChowElement.basis(i))
    t = Target(name, int(dim), labels, codims, products, tuple(integral), int(curve_rank),
               tuple(tuple(Fraction(v) for v in row) for row in pairings), c1S, c1TX)
    return _validate(t)


def make_point_target() -> Target:
    return _build("point", 0, [("1", 0)], {}, [Fraction(1)], 0, [],
                  ChowElement(), ChowElement())


def make_projective_space(m: int, s: int) -> Target:
    """``P^m`` with ``S = O(s)``."""
    if m < 1:
        raise TargetError("projective space needs m >= 1")
    basis = [("1", 0)] + [("H" if i == 1 else f"H^{i}", i) for i in range(1, m + 1)]
    table = {}
    for i in range(m + 1):
        for j in range(i, m + 1):
            table[(i, j)] = ChowElement.basis(i + j) if i + j <= m else ChowElement()
    integral = [Fraction(int(i == m)) for i in range(m + 1)]
    pairings = [[int(i == 1) for i in range(m + 1)]]
    return _build(f"P{m}:{s}", m, basis, table, integral, 1, pairings,
                  ChowElement.basis(1, s), ChowElement.basis(1, m + 1))


def resolve_target(selector: str) -> Target:
    """Built-in selectors: ``point``, ``P1:s``, ``P2:s``; otherwise a file path."""
    sel = selector.strip()
    if sel == "point":
        return make_point_target()
    if sel[:1] == "P" and ":" in sel and sel[1:sel.index(":")].isdigit():
        m, s = sel[1:].split(":", 1)
        try:
            return make_projective_space(int(m), int(s))
        except ValueError as exc:
            raise TargetError(f"bad target selector {selector!r}") from exc
    try:
        with open(sel, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise TargetError(f"cannot read target file {selector!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise TargetError(f"target file {selector!r} is not valid JSON: {exc}") from exc
    return load_target(doc)


# ---------------------------------------------------------------------------
# documents

def _combo(doc, index) -> ChowElement:
    if not isinstance(doc, list):
        raise TargetError("linear combination must be a list of {label, coeff}")
    out: dict = {}
    for item in doc:
        try:
            lab, coeff = item["label"], item["coeff"]
        except (KeyError, TypeError):
            raise TargetError("linear combination entries need label and coeff") from None
        if lab not in index:
            raise TargetError(f"unknown basis label {lab!r}")
        out[index[lab]] = out.get(index[lab], 0) + parse_rational(coeff)
    return ChowElement.from_dict(out)


def load_target(doc: Mapping) -> Target:
    """Build and validate a Target from its description document."""
    required = ("name", "dim", "basis", "products", "integral", "curve_rank",
                "pairings", "c1S", "c1TX")
    if not isinstance(doc, Mapping):
        raise TargetError("target document must be an object")
    missing = [k for k in required if k not in doc]
    if missing:
        raise TargetError(f"target document missing fields {missing}")
    try:
        basis = [(b["label"], int(b["codim"])) for b in doc["basis"]]
    except (KeyError, TypeError, ValueError):
        raise TargetError("basis entries need label and integer codim") from None
    index = {lab: i for i, (lab, _) in enumerate(basis)}
    table = {}
    for entry in doc["products"]:
        try:
            i, j = index[entry["left"]], index[entry["right"]]
        except (KeyError, TypeError):
            raise TargetError("product entry references unknown labels") from None
        table_val = _combo(entry.get("result", []), index)
        key = (i, j)
        if key in table and table[key] != table_val:
            raise TargetError("conflicting product entries")
        if (j, i) in table and table[(j, i)] != table_val:
            raise TargetError("non-commutative product table")
        table[key] = table_val
    # unspecified products are zero
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            if (i, j) not in table and (j, i) not in table and i != 0:
                table[(i, j)] = ChowElement()
    integral = [Fraction(0)] * len(basis)
    for lab, val in doc["integral"].items():
        if lab not in index:
            raise TargetError(f"unknown basis label {lab!r}")
        integral[index[lab]] = parse_rational(val)
    pairings = doc["pairings"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for row in pairings for v in row):
        raise TargetError("pairings must be integers")
    return _build(str(doc["name"]), doc["dim"], basis, table, integral,
                  doc["curve_rank"], pairings, _combo(doc["c1S"], index),
                  _combo(doc["c1TX"], index))


def dump_target(t: Target) -> dict:
    def combo(x: ChowElement):
        return [{"label": t.labels[i], "coeff": format_rational(c)} for i, c in x.terms]

    products = []
    for (i, j) in sorted(t.products):
        if i == 0:
            continue
        products.append({"left": t.labels[i], "right": t.labels[j],
                         "result": combo(t.products[(i, j)])})
    return {
        "name": t.name,
        "dim": t.dim,
        "basis": [{"label": lab, "codim": c} for lab, c in zip(t.labels, t.codims)],
        "products": products,
        "integral": {t.labels[i]: format_rational(v) for i, v in enumerate(t.integral) if v},
        "curve_rank": t.curve_rank,
        "pairings": [[int(v) for v in row] for row in t.pairings],
        "c1S": combo(t.c1_S),
        "c1TX": combo(t.c1_TX),
    }


def target_signature(t: Target) -> str:
    """Stable identity string used in documents and equality checks."""
    return json.dumps(dump_target(t), sort_keys=True)


def iter_codim_basis(target: Target, codim: int) -> Iterable[int]:
    return (i for i, c in enumerate(target.codims) if c == codim)
