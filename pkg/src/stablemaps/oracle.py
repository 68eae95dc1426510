"""Golden relations, an exact span solver, and a tiny intersection-number evaluator.

Bracket convention: a pattern ``[Γ]`` with free vertex degrees stands for

    (1 / |Aut shape|) * sum over ordered degree splittings passing stability of c(split) [Γ_split]

where the shape is the genus-labelled graph with legs.  For shapes without
symmetry this is the plain sum over stable splittings; in general it matches
the ``1/|Aut|`` weighting of the double-ramification graph sum.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .algebra import (Ambient, StrataElement, add_into, eta_class, kappa_class, make_terms,
                      multiply, psi_class, term_degree, xi_class, glue_along_graph)
from .graphs import StableGraph, automorphism_order, validate, loop_graph_delta
from .stabilization import pullback_boundary, pullback_kappa1, pullback_psi
from .target import (ChowElement, Target, chow_power, chow_product, degree_pairing,
                     enumerate_splittings, is_zero_class, make_point_target, parse_rational)


class OracleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# bracket patterns

@dataclass(frozen=True)
class Pattern:
    """A graph shape with free vertex degrees.

    ``legs`` maps leg number to vertex, ``edges`` lists vertex pairs.  ``fixed``
    pins some vertex degrees to zero; ``nonzero`` requires some to be nonzero.
    """

    genera: tuple
    legs: Mapping
    edges: tuple = ()
    fixed_zero: tuple = ()
    nonzero: tuple = ()

    def shape(self, n: int) -> StableGraph:
        legs = tuple(self.legs[i] for i in range(1, n + 1))
        return StableGraph(self.genera, ((),) * len(self.genera), legs, tuple(self.edges))


@dataclass
class Ctx:
    """Degree data handed to coefficient functions."""

    b: Fraction
    bs: tuple        # b_i = int_{beta(v_i)} c1(S), 1-based access via ctx[i]
    betas: tuple

    def __getitem__(self, i: int) -> Fraction:
        return self.bs[i - 1]


def bracket(amb: Ambient, pat: Pattern, coeff: Callable[[Ctx], Fraction] = lambda c: 1,
            psi: Optional[Mapping] = None, legs: Optional[Mapping] = None,
            kappa: Optional[Mapping] = None) -> StrataElement:
    """Expand a pattern with decorations.

    ``psi`` maps a half-edge key to an exponent: an int leg number, or
    ``("e", edge, side)``.  ``legs`` maps leg number to a Chow element and
    ``kappa`` maps a vertex to a list of ``(a, ChowElement)``.
    """
    tg = amb.target
    shape = pat.shape(amb.n)
    weight = Fraction(1, automorphism_order(shape))
    nh = shape.num_half_edges
    psi_vec = [0] * nh
    for key, e in (psi or {}).items():
        if isinstance(key, int):
            psi_vec[key - 1] += e
        else:
            _, edge, side = key
            psi_vec[amb.n + 2 * edge + side] += e
    leg_vec = [tg.unit] * amb.n
    for i, cls in (legs or {}).items():
        leg_vec[i - 1] = cls
    kap = [list((kappa or {}).get(v, [])) for v in range(len(pat.genera))]
    out: dict = {}
    for betas in enumerate_splittings(amb.beta, len(pat.genera)):
        if any(not is_zero_class(betas[v]) for v in pat.fixed_zero):
            continue
        if any(is_zero_class(betas[v]) for v in pat.nonzero):
            continue
        gr = StableGraph(pat.genera, tuple(betas), shape.legs, shape.edges)
        if validate(gr) is not None:
            continue
        bs = tuple(degree_pairing(tg, bt, tg.c1_S) for bt in betas)
        ctx = Ctx(degree_pairing(tg, amb.beta, tg.c1_S), bs, tuple(betas))
        c = Fraction(coeff(ctx))
        if c == 0:
            continue
        add_into(out, make_terms(amb, gr, psi_vec, leg_vec, None, kap), c * weight)
    return StrataElement(amb, out)


def _b(amb: Ambient) -> Fraction:
    tg = amb.target
    return degree_pairing(tg, amb.beta, tg.c1_S)


def _S(amb: Ambient, power: int = 1) -> ChowElement:
    return chow_power(amb.target, amb.target.c1_S, power)


def _eta_entry(amb: Ambient):
    return (-1, _S(amb, 2))


# common shapes (vertex 0 listed first)
def TRIV(n, g=0):
    return Pattern((g,), {i: 0 for i in range(1, n + 1)})


SPLIT_02 = Pattern((0, 0), {1: 0, 2: 1}, ((0, 1),))
TOG_02 = Pattern((0, 0), {1: 0, 2: 0}, ((0, 1),))


# ---------------------------------------------------------------------------
# fixtures

@dataclass
class Fixture:
    id: str
    g: int
    n: int
    anchor: str
    scale: Fraction
    build: Callable[[Ambient], StrataElement]
    errata: tuple = ()
    notes: str = ""

    def expected(self, amb: Ambient) -> StrataElement:
        if (self.g >= 0 and amb.g != self.g) or (self.n >= 0 and amb.n != self.n):
            raise OracleError(f"fixture {self.id} lives on (g, n) = ({self.g}, {self.n}), "
                              f"not ({amb.g}, {amb.n})")
        return self.build(amb)


def _fx_42_a1sq(amb):
    return psi_class(amb, 1) + psi_class(amb, 2) - bracket(amb, SPLIT_02)


def _fx_42_a1(amb):
    b = _b(amb)
    return (xi_class(amb, 1) - xi_class(amb, 2) - b * psi_class(amb, 2)
            + bracket(amb, SPLIT_02, lambda c: c[1]))


def _fx_42_a0(amb):
    b = _b(amb)
    return (-eta_class(amb) + (b * b) * psi_class(amb, 2) + (2 * b) * xi_class(amb, 2)
            - bracket(amb, TOG_02, lambda c: c[2] ** 2)
            - bracket(amb, SPLIT_02, lambda c: c[1] ** 2))


def display_42(amb: Ambient, a1: int) -> StrataElement:
    """The full degree-one class for numeric ``a_1`` (``a_2 = b - a_1``)."""
    b = _b(amb)
    a2 = b - a1
    trivial = (Fraction(-1, 2) * eta_class(amb) + Fraction(a1 * a1, 2) * psi_class(amb, 1)
               + Fraction(a2 * a2, 2) * psi_class(amb, 2) + a1 * xi_class(amb, 1)
               + a2 * xi_class(amb, 2))
    return (trivial - bracket(amb, TOG_02, lambda c: c[2] ** 2 / 2)
            - bracket(amb, SPLIT_02, lambda c: (c[1] - a1) ** 2 / 2))


def _fx_42_pullback_a1(amb, printed=False):
    b = _b(amb)
    bubble = Pattern((0, 0), {1: 1, 2: 0, 3: 0}, ((0, 1),), fixed_zero=(0,))
    p13 = Pattern((0, 0), {1: 0, 2: 1, 3: 0}, ((0, 1),), nonzero=(1,))
    p23 = Pattern((0, 0), {1: 0, 2: 1, 3: 1}, ((0, 1),), nonzero=(1,))
    last = (lambda c: c[1] ** 2) if printed else (lambda c: c[1])
    return (xi_class(amb, 1) - xi_class(amb, 2) - b * psi_class(amb, 2)
            + bracket(amb, bubble, lambda c: b) + bracket(amb, p13, lambda c: c[1])
            + bracket(amb, p23, last))


# genus one, one marking, a_1 = b
G1_LEG_ON_1 = Pattern((1, 0), {1: 0}, ((0, 1),))
G1_LEG_ON_0 = Pattern((1, 0), {1: 1}, ((0, 1),))
LOOP_11 = Pattern((0,), {1: 0}, ((0, 0),))
LOOP_LEG_BRANCH = Pattern((0, 0), {1: 0}, ((0, 0), (0, 1)))   # loop and leg on v0
LOOP_BRANCH_LEG = Pattern((0, 0), {1: 1}, ((0, 0), (0, 1)))   # loop on v0, leg on v1
BANANA_11 = Pattern((0, 0), {1: 0}, ((0, 1), (0, 1)))


def _chain(genera, leg_vertex):
    return Pattern(genera, {1: leg_vertex}, ((0, 1), (1, 2)))


def _fx_44_m4(amb, printed=False):
    b = _b(amb)
    S = _S(amb)
    eta = _eta_entry(amb)
    triv = TRIV(1, 1)
    out = (bracket(amb, triv, kappa={0: [eta, eta]})
           - 4 * b * b * bracket(amb, triv, psi={1: 1}, kappa={0: [eta]})
           - 4 * b * bracket(amb, triv, legs={1: S}, kappa={0: [eta]})
           + b ** 4 * bracket(amb, triv, psi={1: 2})
           + 4 * b * b * bracket(amb, triv, legs={1: _S(amb, 2)})
           + 4 * b ** 3 * bracket(amb, triv, psi={1: 1}, legs={1: S}))
    for pat, w in ((G1_LEG_ON_1, 2), (G1_LEG_ON_0, 1)):
        out = out + bracket(amb, pat, lambda c, w=w: 2 * c[w] ** 2, kappa={0: [eta]})
        out = out + bracket(amb, pat, lambda c, w=w: 2 * c[w] ** 2, kappa={1: [eta]})
        out = out + bracket(amb, pat, lambda c, w=w: -2 * b * b * c[w] ** 2, psi={1: 1})
        out = out + bracket(amb, pat, lambda c, w=w: -4 * b * c[w] ** 2, legs={1: S})
    out = out + bracket(amb, _chain((1, 0, 0), 0), lambda c: 2 * (c.b - c[1]) ** 2 * c[3] ** 2)
    out = out + bracket(amb, _chain((1, 0, 0), 1), lambda c: 2 * c[1] ** 2 * c[3] ** 2)
    out = out + bracket(amb, _chain((1, 0, 0), 2), lambda c: 2 * c[1] ** 2 * (c.b - c[3]) ** 2)
    if printed:
        out = out + bracket(amb, _chain((0, 1, 0), 0), lambda c: 2 * c[3] ** 2 * (c.b - c[2]) ** 2)
        out = out + bracket(amb, _chain((0, 1, 0), 1), lambda c: 2 * c[2] ** 2 * c[3] ** 2)
    else:
        out = out + bracket(amb, _chain((0, 1, 0), 0), lambda c: 2 * c[3] ** 2 * (c.b - c[1]) ** 2)
        out = out + bracket(amb, _chain((0, 1, 0), 1), lambda c: 2 * c[1] ** 2 * c[3] ** 2)
    return out


def _fx_44_m2(amb):
    b = _b(amb)
    S = _S(amb)
    return (bracket(amb, LOOP_11, kappa={0: [_eta_entry(amb)]}, coeff=lambda c: -1)
            + bracket(amb, LOOP_11, lambda c: 2 * b, legs={1: S})
            - bracket(amb, LOOP_LEG_BRANCH, lambda c: c[2] ** 2)
            + bracket(amb, LOOP_BRANCH_LEG, lambda c: b * b - c[1] ** 2)
            + bracket(amb, BANANA_11, lambda c: 2 * c[2] ** 2))


def _fx_44_m0(amb):
    return (bracket(amb, LOOP_11, psi={("e", 0, 0): 1}) + bracket(amb, LOOP_11, psi={("e", 0, 1): 1})
            - bracket(amb, BANANA_11, lambda c: 2))


def loop_psi_rewrite(amb: Ambient) -> list:
    """Relations ``psi_1 [loop] = [loop vertex -- (beta_2 != 0; leg 1)]`` per loop-vertex degree.

    Obtained by gluing ``st^* psi_1 = psi_1 - [D_1]`` on the genus-0 three-pointed vertex,
    where ``psi_1`` vanishes on the curve side.
    """
    from .graphs import StableGraph as SG
    out = []
    gr = SG((0,), (amb.beta,), (0,), ((0, 0),))
    vamb = Ambient(0, 3, amb.beta, amb.target)
    out.append(glue_along_graph(amb, gr, {0: pullback_psi(1, vamb)}))
    return out


# genus one, two markings
G12 = Pattern((1, 0), {1: 0, 2: 1}, ((0, 1),))          # (1,b1;1) -- (b2;2)
G21 = Pattern((1, 0), {1: 1, 2: 0}, ((0, 1),))          # (1,b1;2) -- (b2;1)
TOG_12 = Pattern((1, 0), {1: 1, 2: 1}, ((0, 1),))       # (1,b1) -- (b2;1,2)
LOOP_12 = Pattern((0,), {1: 0, 2: 0}, ((0, 0),))
CHAIN_12 = Pattern((1, 0, 0), {1: 0, 2: 2}, ((0, 1), (1, 2)))
CHAIN_21 = Pattern((1, 0, 0), {1: 2, 2: 0}, ((0, 1), (1, 2)))
CHAIN_MID = Pattern((0, 1, 0), {1: 0, 2: 2}, ((0, 1), (1, 2)))
LOOPL_2_1 = Pattern((0, 0), {1: 1, 2: 0}, ((0, 0), (0, 1)))   # loop with leg 2 -- leg 1
LOOPL_1_2 = Pattern((0, 0), {1: 0, 2: 1}, ((0, 0), (0, 1)))   # loop with leg 1 -- leg 2


def delta_12(amb):
    return bracket(amb, LOOP_12)


def _fx_43(amb, i=1):
    """``psi_i - delta/12 - [(1,b1) -- (b2; all legs)] - [(1,b1; others) -- (b2; i)]``."""
    n = amb.n
    if n not in (1, 2):
        raise OracleError("the psi boundary expression is recorded for one or two markings")
    tog = Pattern((1, 0), {j: 1 for j in range(1, n + 1)}, ((0, 1),))
    di = Pattern((1, 0), {j: (1 if j == i else 0) for j in range(1, n + 1)}, ((0, 1),))
    loop = Pattern((0,), {j: 0 for j in range(1, n + 1)}, ((0, 0),))
    out = psi_class(amb, i) - Fraction(1, 12) * bracket(amb, loop) - bracket(amb, di)
    if n == 2:
        out = out - bracket(amb, tog)
    return out


def _fx_45_excess_lhs(amb):
    g = bracket(amb, G12)
    return multiply(g, g)


def _fx_45_excess(amb):
    return (-bracket(amb, G12, psi={("e", 0, 0): 1}) - bracket(amb, G12, psi={("e", 0, 1): 1})
            + 2 * bracket(amb, CHAIN_12))


def _fx_45_m4a13(amb):
    b = _b(amb)
    S = _S(amb)
    psi1, psi2 = psi_class(amb, 1), psi_class(amb, 2)
    xi1, xi2 = xi_class(amb, 1), xi_class(amb, 2)
    out = b * (multiply(psi1, psi1) - multiply(psi2, psi2))
    out = out + 2 * multiply(psi1 + psi2, xi1 - xi2)
    for pat, sgn in ((G12, 1), (G21, -1)):
        # for G21 the roles of b1, b2 in the psi-terms swap, per the display
        if sgn == 1:
            c1, c2 = (lambda c: -2 * c[2]), (lambda c: 2 * c[1])
        else:
            c1, c2 = (lambda c: -2 * c[1]), (lambda c: 2 * c[2])
        out = out + bracket(amb, pat, c1, psi={1: 1}) + bracket(amb, pat, c2, psi={2: 1})
        out = out + bracket(amb, pat, lambda c: -2, legs={1: S})
        out = out + bracket(amb, pat, lambda c: 2, legs={2: S})
        for side in (0, 1):
            out = out + bracket(amb, pat, lambda c, s=sgn: s * (c[1] - c[2]),
                                psi={("e", 0, side): 1})
    out = out + bracket(amb, CHAIN_12, lambda c: -2 * c[1] + 2 * c[3])
    out = out + bracket(amb, CHAIN_21, lambda c: 2 * c[1] - 2 * c[3])
    out = out + bracket(amb, CHAIN_MID, lambda c: -2 * c[1] + 2 * c[3])
    return out


def _fx_45_residual(amb):
    xi_diff = xi_class(amb, 1) - xi_class(amb, 2)
    inner = Fraction(1, 12) * delta_12(amb) + bracket(amb, TOG_12)
    return (4 * multiply(xi_diff, inner) + bracket(amb, LOOPL_2_1, lambda c: c[2] / 3)
            - bracket(amb, LOOPL_1_2, lambda c: c[2] / 3))


def g0n3_identity(amb: Ambient) -> list:
    """The two differences of the three legs-pair-versus-single bracket sums on (0, 3)."""
    pats = [Pattern((0, 0), {1: 0, 2: 0, 3: 1}, ((0, 1),)),
            Pattern((0, 0), {1: 0, 3: 0, 2: 1}, ((0, 1),)),
            Pattern((0, 0), {2: 0, 3: 0, 1: 1}, ((0, 1),))]
    el = [bracket(amb, p) for p in pats]
    return [el[0] - el[1], el[1] - el[2]]


def _fx_27(amb):
    return pullback_kappa1_fixture(amb)


def pullback_kappa1_fixture(amb):
    legless = Pattern((amb.g, 0), {i: 0 for i in range(1, amb.n + 1)}, ((0, 1),), nonzero=(1,))
    return kappa_class(amb, 1) + bracket(amb, legless)


def pullback_psi_fixture(amb, i=1):
    pat = Pattern((amb.g, 0), {j: (1 if j == i else 0) for j in range(1, amb.n + 1)},
                  ((0, 1),), nonzero=(1,))
    return psi_class(amb, i) - bracket(amb, pat)


FIXTURES = {
    "4.2/a1^2": Fixture("4.2/a1^2", 0, 2, "Example 4.2, 'Coefficient of a_1^2'", Fraction(1, 2),
                        _fx_42_a1sq),
    "4.2/a1": Fixture("4.2/a1", 0, 2, "Example 4.2, 'Coefficient of a_1'", Fraction(1),
                      _fx_42_a1),
    "4.2/a1^0": Fixture("4.2/a1^0", 0, 2, "Example 4.2, 'Coefficient of a_1^0'", Fraction(1, 2),
                        _fx_42_a0),
    "4.2/pullback-a1": Fixture(
        "4.2/pullback-a1", 0, 3, "Example 4.2, 'The pull-back of the second relation'",
        Fraction(1), _fx_42_pullback_a1,
        errata=("third bracket weighted by b_1 (printed b_1^2)",)),
    "4.4/m^4": Fixture(
        "4.4/m^4", 1, 1, "Example 4.4, 'Coefficient of m^4'", Fraction(1, 8), _fx_44_m4,
        errata=("chain (b1;1)-(1,b2)-(b3): weight (b-b1)^2 b3^2 (printed (b-b2)^2)",
                "chain (b1)-(1,b2;1)-(b3): weight b1^2 b3^2 (printed b2^2 b3^2)")),
    "4.4/m^2": Fixture("4.4/m^2", 1, 1, "Example 4.4, 'Coefficient of m^2'", Fraction(-1, 24),
                       _fx_44_m2, notes="psi_1 on the loop vertex is traded for a boundary graph"),
    "4.4/m^0": Fixture("4.4/m^0", 1, 1, "Example 4.4, 'Coefficient of m^0'", Fraction(1, 240),
                       _fx_44_m0),
    "4.5/excess": Fixture("4.5/excess", 1, 2, "Example 4.5, 'The excess intersection formula gives'",
                          Fraction(1), _fx_45_excess),
    "4.5/m^4a1^3-step": Fixture("4.5/m^4a1^3-step", 1, 2,
                           "Example 4.5, 'After simplification, the relation becomes'",
                           Fraction(1), _fx_45_m4a13),
    "4.5/residual": Fixture("4.5/residual", 1, 2, "Example 4.5, 'the equation is equivalent to'",
                            Fraction(1), _fx_45_residual),
    "4.3": Fixture("4.3", 1, -1, "Eq. (4.3), 'On M_{1,n,beta}(X), we have'", Fraction(1), _fx_43),
    "2.7": Fixture("2.7", -1, -1, "Example 2.7, 'st^* kappa_1 = kappa_1 + [D]'", Fraction(1), _fx_27),
    "2.6/psi": Fixture("2.6/psi", -1, -1, "Lemma 2.6(2), 'st^* psi_i = psi_i - [D_i]'",
                       Fraction(1), pullback_psi_fixture),
}


def paper_fixture(fid: str, amb: Ambient) -> StrataElement:
    try:
        fx = FIXTURES[fid]
    except KeyError:
        raise OracleError(f"unknown fixture id {fid!r}") from None
    return fx.expected(amb)


def fixture_catalog() -> dict:
    return {"fixtures": [
        {"id": fx.id, "anchor": fx.anchor, "scale": _fmt(fx.scale), "g": fx.g, "n": fx.n,
         "errata": list(fx.errata)} for fx in FIXTURES.values()]}


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def load_catalog(doc) -> dict:
    """Validate a catalog document; returns ``id -> scale``."""
    if not isinstance(doc, Mapping) or not isinstance(doc.get("fixtures"), list):
        raise OracleError("fixture catalog must be an object with a 'fixtures' list")
    scales = {}
    for entry in doc["fixtures"]:
        if not isinstance(entry, Mapping) or "id" not in entry:
            raise OracleError("fixture entry without id")
        if entry["id"] not in FIXTURES:
            raise OracleError(f"unknown fixture id {entry['id']!r}")
        if not entry.get("anchor"):
            raise OracleError(f"fixture {entry['id']} has no anchor")
        try:
            scales[entry["id"]] = parse_rational(entry.get("scale", "1"))
        except ValueError as exc:
            raise OracleError(f"fixture {entry['id']}: {exc}") from exc
    return scales


# ---------------------------------------------------------------------------
# exact linear algebra on elements

def _coords(elements: Sequence[StrataElement]):
    index = {}
    for el in elements:
        for t, _ in el.items():
            index.setdefault(t, len(index))
    return index


def solve_in_span(target: StrataElement, generators: Sequence[StrataElement]):
    """Rational ``c`` with ``target = sum c_j generators[j]``, or ``None``."""
    index = _coords([target, *generators])
    rows = len(index)
    cols = len(generators)
    # augmented matrix, rows = term coordinates
    mat = [[Fraction(0)] * (cols + 1) for _ in range(rows)]
    for j, gen in enumerate(generators):
        for t, c in gen.terms.items():
            mat[index[t]][j] = Fraction(c)
    for t, c in target.terms.items():
        mat[index[t]][cols] = Fraction(c)
    pivots = []
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(rows):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if mat[i][cols] != 0:
            return None
    sol = [Fraction(0)] * cols
    for i, col in enumerate(pivots):
        sol[col] = mat[i][cols]
    return sol


def reduce_modulo(element: StrataElement, generators: Sequence[StrataElement]) -> StrataElement:
    """Normal form of ``element`` modulo the span of ``generators``.

    Generators are row-reduced with pivots on their largest terms; the
    remainder has no pivot term left.
    """
    basis: list = []          # (pivot term, dict) with coefficient 1 on the pivot
    for gen in generators:
        vec = {t: Fraction(c) for t, c in gen.terms.items()}
        for piv, row in basis:
            c = vec.get(piv)
            if c:
                for t, x in row.items():
                    vec[t] = vec.get(t, 0) - c * x
                vec = {t: x for t, x in vec.items() if x != 0}
        if not vec:
            continue
        piv = max(vec, key=lambda t: t.sort_key())
        inv = 1 / vec[piv]
        row = {t: x * inv for t, x in vec.items()}
        new_basis = []
        for p, r in basis:
            c = r.get(piv)
            if c:
                r = dict(r)
                for t, x in row.items():
                    r[t] = r.get(t, 0) - c * x
                r = {t: x for t, x in r.items() if x != 0}
            new_basis.append((p, r))
        basis = new_basis + [(piv, row)]
    vec = {t: Fraction(c) for t, c in element.terms.items()}
    for piv, row in basis:
        c = vec.get(piv)
        if c:
            for t, x in row.items():
                vec[t] = vec.get(t, 0) - c * x
            vec = {t: x for t, x in vec.items() if x != 0}
    return StrataElement(element.ambient, vec)


def in_span(target: StrataElement, generators: Sequence[StrataElement]) -> bool:
    if target.is_zero():
        return True
    return solve_in_span(target, list(generators)) is not None


@dataclass
class Comparison:
    fixture: str
    ok: bool
    scale: Fraction
    diff: StrataElement
    detail: str = ""


def compare(computed: StrataElement, fx_id: str, amb: Optional[Ambient] = None,
            scale: Optional[Fraction] = None, modulo: Sequence[StrataElement] = ()) -> Comparison:
    """Check ``computed == scale * fixture`` exactly, or modulo the span of ``modulo``."""
    amb = amb or computed.ambient
    fx = FIXTURES[fx_id]
    scale = fx.scale if scale is None else scale
    expected = paper_fixture(fx_id, amb)
    diff = computed - scale * expected
    if diff.is_zero():
        return Comparison(fx_id, True, scale, diff, "exact")
    if modulo:
        rest = reduce_modulo(diff, modulo)
        if rest.is_zero():
            return Comparison(fx_id, True, scale, diff, "equal modulo declared relations")
        return Comparison(fx_id, False, scale, rest, "mismatch after declared rewrites")
    return Comparison(fx_id, False, scale, diff, "mismatch")


# ---------------------------------------------------------------------------
# evaluator on the four-pointed genus-zero space (point target)

def m04_ambient() -> Ambient:
    return Ambient(0, 4, (), make_point_target())


def evaluate_m04_point(element: StrataElement) -> Fraction:
    """Integral of a degree-one class on the four-pointed genus-zero space.

    Table (each entry derivable from cross-ratio coordinates): every psi_i
    integrates to 1, every one-edge boundary graph to 1, kappa_1 to 1.
    A kappa_0(1) factor on a vertex multiplies by 2g(v) - 2 + n(v).
    """
    amb = element.ambient
    if amb.g != 0 or amb.n != 4 or amb.beta != () or amb.target.dim != 0:
        raise OracleError("evaluator needs ambient (g=0, n=4, point target, beta=0)")
    total = Fraction(0)
    tg = amb.target
    for t, c in element.items():
        if term_degree(t, tg) != 1:
            raise OracleError("evaluator needs a homogeneous degree-one class")
        if not isinstance(c, Fraction):
            raise OracleError("evaluator needs numeric coefficients")
        factor = Fraction(1)
        rest = 0
        for v, entries in enumerate(t.kappa):
            for a, _ in entries:
                if a == 0:
                    factor *= 2 * t.graph.genera[v] - 2 + t.graph.valence(v)
                elif a == 1:
                    rest += 1
                else:
                    raise OracleError("unexpected kappa class in degree one")
        rest += sum(t.psi) + t.graph.num_edges
        if rest != 1:
            raise OracleError("unexpected degree-one term")
        total += c * factor
    return total


# ---------------------------------------------------------------------------
# verification suites (shared by the command line and the acceptance tests)

@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.ok and self.detail else "")


def _diff_check(name: str, cmp: Comparison) -> Check:
    if cmp.ok:
        return Check(name, True, cmp.detail)
    return Check(name, False, f"{cmp.detail}; scale {_fmt(cmp.scale)}; remaining difference:\n"
                 + _indent(str(cmp.diff)))


def _indent(text: str) -> str:
    return "\n".join("      " + ln for ln in text.splitlines())


def _p1():
    from .target import make_projective_space
    return make_projective_space(1, 1)


def suite_42(betas=(1, 2, 3), scales: Optional[Mapping] = None) -> list:
    from .dr import DRRequest, compute_P_d_symbolic, extract_coefficient, interpolate_in_r
    scales = scales or {}
    tg = _p1()
    out = []
    for bb in betas:
        amb = Ambient(0, 2, (bb,), tg)
        P = compute_P_d_symbolic(0, 2, tg, (bb,), 0, 1)
        for fid, mono in (("4.2/a1^2", (2,)), ("4.2/a1", (1,)), ("4.2/a1^0", (0,))):
            cmp = compare(extract_coefficient(P, mono), fid, scale=scales.get(fid))
            out.append(_diff_check(f"{fid} beta={bb}", cmp))
        for a1 in sorted({0, 1, bb}):
            got = interpolate_in_r(DRRequest(0, 2, tg, (bb,), 0, 1, (a1, bb - a1)))
            diff = got - display_42(amb, a1)
            out.append(Check(f"4.2/display beta={bb} A=({a1},{bb - a1})", diff.is_zero(),
                             "" if diff.is_zero() else _indent(str(diff))))
    return out


def suite_44(betas=(1, 2), scales: Optional[Mapping] = None) -> list:
    from .dr import m_graded_parts_by_scaling
    scales = scales or {}
    tg = _p1()
    out = []
    for bb in betas:
        amb = Ambient(1, 1, (bb,), tg)
        parts = m_graded_parts_by_scaling(1, 1, tg, (bb,), 2)
        for j, fid in ((4, "4.4/m^4"), (2, "4.4/m^2"), (0, "4.4/m^0")):
            modulo = loop_psi_rewrite(amb) if j == 2 else ()
            got = parts.get(j, StrataElement.zero(amb))
            cmp = compare(got, fid, scale=scales.get(fid), modulo=modulo)
            out.append(_diff_check(f"{fid} beta={bb}", cmp))
    return out


def rewrite_pool_45(amb: Ambient) -> list:
    """Relations allowed in the genus-one two-pointed rewrite.

    The psi boundary expression (for both legs) times every degree-one
    monomial and one-edge graph, the genus-0 two-pointed relation glued at
    two-valent genus-0 vertices, and the three-term identity glued at
    three-valent genus-0 vertices.
    """
    from .graphs import enumerate_graphs
    from .algebra import graph_class, relabel_legs, vertex_ambient
    one_edge = [gr for gr in enumerate_graphs(amb.g, amb.n, amb.beta, 1) if gr.num_edges == 1]
    deg1 = [psi_class(amb, 1), psi_class(amb, 2), xi_class(amb, 1), xi_class(amb, 2)]
    deg1 += [graph_class(amb, gr) for gr in one_edge]
    r1 = paper_fixture("4.3", amb)
    pool = [multiply(r, x) for r in (r1, relabel_legs(r1, {1: 2, 2: 1})) for x in deg1]
    for gr in one_edge:
        for v in range(gr.num_vertices):
            va = vertex_ambient(amb, gr, v)
            if va.g != 0:
                continue
            if va.n == 2:
                pool.append(glue_along_graph(amb, gr, {v: paper_fixture("4.2/a1^2", va)}))
            elif va.n == 3:
                pool.extend(glue_along_graph(amb, gr, {v: e}) for e in g0n3_identity(va))
    return pool


def suite_45(betas=(1, 2), scales: Optional[Mapping] = None) -> list:
    from .graphs import enumerate_graphs
    tg = _p1()
    count = len(enumerate_graphs(1, 2, (), 2, shapes_only=True))
    out = [Check("4.5/shapes (g=1, n=2, <=2 edges)", count == 26, f"{count} shapes")]
    if count != 26:
        out[-1].detail = f"found {count}, expected 26"
    for bb in betas:
        amb = Ambient(1, 2, (bb,), tg)
        g12 = bracket(amb, G12)
        diff = multiply(g12, g12) - paper_fixture("4.5/excess", amb)
        out.append(Check(f"4.5/excess beta={bb}", diff.is_zero(),
                         "exact" if diff.is_zero() else _indent(str(diff))))
    for bb in betas:
        amb = Ambient(1, 2, (bb,), tg)
        step = paper_fixture("4.5/m^4a1^3-step", amb)
        residual = paper_fixture("4.5/residual", amb)
        rest = reduce_modulo(step - residual, rewrite_pool_45(amb))
        out.append(Check(f"4.5/rewrite-to-residual beta={bb}", rest.is_zero(),
                         "exact modulo the named rewrites" if rest.is_zero()
                         else "left over after the named rewrites:\n" + _indent(str(rest))))
    return out


def suite_43(betas=(1, 2), scales: Optional[Mapping] = None) -> list:
    from .graphs import StableGraph as SG
    tg = _p1()
    out = []
    for bb in betas:
        for n in (1, 2):
            amb = Ambient(1, n, (bb,), tg)
            loop = SG((0,), ((),), (0,) * n, ((0, 0),))
            rel = pullback_psi(1, amb) - Fraction(1, 12) * pullback_boundary(loop, amb)
            if n == 2:
                rel = rel - pullback_boundary(SG((1, 0), ((), ()), (1, 1), ((0, 1),)), amb)
            diff = rel - paper_fixture("4.3", amb)
            out.append(Check(f"4.3 = st^*(curve relation) beta={bb} n={n}", diff.is_zero(),
                             "exact" if diff.is_zero() else _indent(str(diff))))
    return out


def pullback_ambients() -> list:
    from .target import make_projective_space
    p1, p2 = make_projective_space(1, 1), make_projective_space(2, 1)
    return [Ambient(1, 1, (1,), p1), Ambient(1, 2, (2,), p1), Ambient(0, 3, (2,), p1),
            Ambient(2, 1, (1,), p2), Ambient(1, 3, (3,), p1)]


def suite_26_27(ambients=None, scales: Optional[Mapping] = None) -> list:
    out = []
    for amb in ambients or pullback_ambients():
        for i in range(1, amb.n + 1):
            diff = pullback_psi(i, amb) - pullback_psi_fixture(amb, i)
            out.append(Check(f"2.6/psi_{i} on ({amb.label()})", diff.is_zero(),
                             "" if diff.is_zero() else _indent(str(diff))))
        diff = pullback_kappa1(amb) - paper_fixture("2.7", amb)
        out.append(Check(f"2.7/kappa_1 on ({amb.label()})", diff.is_zero(),
                         "" if diff.is_zero() else _indent(str(diff))))
    pt = make_point_target()
    for g, n in ((1, 1), (0, 4), (2, 2)):
        amb = Ambient(g, n, (), pt)
        ok = all(pullback_psi(i, amb) == psi_class(amb, i) for i in range(1, n + 1))
        ok = ok and pullback_kappa1(amb) == kappa_class(amb, 1)
        out.append(Check(f"point target bare classes (g={g}, n={n})", ok))
    return out


SUITES = {"2.6": suite_26_27, "2.7": suite_26_27, "4.2": suite_42, "4.3": suite_43,
          "4.4": suite_44, "4.5": suite_45}


def run_suites(example: str, scales: Optional[Mapping] = None) -> list:
    if example == "all":
        names = ["2.7", "4.2", "4.3", "4.4", "4.5"]
    elif example in SUITES:
        names = [example]
    else:
        raise OracleError(f"unknown example {example!r}; choose from {sorted(SUITES)} or 'all'")
    out = []
    for name in names:
        out.extend(SUITES[name](scales=scales))
    return out
