"""Twisted double-ramification graph sums and the relations they produce.

For numeric ramification data ``A`` and modulus ``r`` the class ``P^{d,r}`` is
a finite sum over stable graphs ``Γ`` with at most ``d`` edges and over
weightings ``w`` mod ``r``::

    r^{-h1(Γ)} / |Aut Γ| * prod_legs exp(a_i^2 psi_i / 2 + a_i xi_i)
        * prod_vertices exp(-eta/2 - k kappa_0(c1 S) - k^2 kappa_1 / 2)
        * prod_edges (1 - exp(-w w' (psi_h + psi_h') / 2)) / (psi_h + psi_h')

truncated to degree ``d``.  Only the edge factor depends on ``w``, so the
sum factors as ``sum_(Γ, s) M_Γ(s, r) * T(Γ, s)`` where ``s`` gives the
series order on each edge, ``M`` is the weighting moment and ``T`` is an
``r``-independent template.  ``P^d`` is the constant term in ``r``.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from sympy import QQ
from sympy.polys.rings import ring as poly_ring

from .algebra import Ambient, StrataElement, add_into, make_terms, norm_coeff, vdim
from .graphs import StableGraph, automorphism_order, enumerate_graphs, first_betti
from .target import ChowElement, Target, chow_power, chow_product, degree_pairing


class DRError(ValueError):
    pass


class CrossValidationError(DRError):
    pass


@dataclass(frozen=True)
class DRRequest:
    g: int
    n: int
    target: Target
    beta: tuple
    k: int
    d: int
    A: Optional[tuple] = None  # None means symbolic

    @property
    def ambient(self) -> Ambient:
        return Ambient(self.g, self.n, self.beta, self.target)

    @property
    def b(self) -> int:
        return int(degree_pairing(self.target, self.beta, self.target.c1_S))

    @property
    def total(self) -> int:
        """Required value of ``sum a_i``."""
        return self.b + self.k * (2 * self.g - 2 + self.n)

    def with_A(self, A) -> "DRRequest":
        return DRRequest(self.g, self.n, self.target, self.beta, self.k, self.d, tuple(A))


def check_dr_data(req: DRRequest) -> Optional[str]:
    """``None`` when the request is admissible, otherwise a description of the violation."""
    if req.n < 1:
        return "at least one marking is required"
    if req.d < 0:
        return "degree must be nonnegative"
    try:
        cap = req.ambient.vdim
    except ValueError as exc:
        return str(exc)
    if req.d > cap:
        return f"degree {req.d} exceeds vdim {cap}"
    if req.A is not None:
        if len(req.A) != req.n:
            return f"expected {req.n} ramification entries, got {len(req.A)}"
        if sum(req.A) != req.total:
            return (f"sum of A is {sum(req.A)} but must equal "
                    f"int_beta c1(S) + k(2g-2+n) = {req.total}")
    return None


def _require(req: DRRequest):
    problem = check_dr_data(req)
    if problem:
        raise DRError(problem)


# ---------------------------------------------------------------------------
# weightings

@dataclass(frozen=True)
class Weighting:
    w: tuple   # residue per half-edge
    r: int


def _vertex_targets(graph: StableGraph, target: Target, k: int) -> list:
    return [int(degree_pairing(target, graph.betas[v], target.c1_S))
            + k * (2 * graph.genera[v] - 2 + graph.valence(v)) for v in range(graph.num_vertices)]


def _spanning_tree(graph: StableGraph):
    """Tree edges, BFS order of vertices, and parent edge per vertex (root first)."""
    nv = graph.num_vertices
    parent_edge = [None] * nv
    seen = [False] * nv
    seen[0] = True
    order = [0]
    tree = set()
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for e, (a, b) in enumerate(graph.edges):
            if a == b or e in tree:
                continue
            if u in (a, b):
                other = b if a == u else a
                if not seen[other]:
                    seen[other] = True
                    tree.add(e)
                    parent_edge[other] = e
                    order.append(other)
    return tree, order, parent_edge


def _iter_weightings(graph: StableGraph, r: int, A: Sequence[int], vertex_targets: Sequence[int]):
    n = graph.n
    tree, order, parent_edge = _spanning_tree(graph)
    free = [e for e in range(graph.num_edges) if e not in tree]
    nh = graph.num_half_edges
    for choice in itertools.product(range(r), repeat=len(free)):
        w = [0] * nh
        for i in range(n):
            w[i] = A[i] % r
        for e, x in zip(free, choice):
            w[n + 2 * e] = x
            w[n + 2 * e + 1] = (-x) % r
        sums = [0] * graph.num_vertices
        for h in range(nh):
            if h < n or (h - n) // 2 not in tree:
                sums[graph.vertex_of(h)] += w[h]
        ok = True
        for u in reversed(order[1:]):
            e = parent_edge[u]
            side = 0 if graph.edges[e][0] == u else 1
            h = n + 2 * e + side
            val = (vertex_targets[u] - sums[u]) % r
            w[h] = val
            w[graph.partner(h)] = (-val) % r
            sums[graph.vertex_of(graph.partner(h))] += w[graph.partner(h)]
        if (sums[0] - vertex_targets[0]) % r != 0:
            ok = False
        if ok:
            yield tuple(w)


def enumerate_weightings(graph: StableGraph, r: int, A: Sequence[int], k: int,
                         target: Target) -> list:
    """All ``k``-weightings mod ``r`` of ``graph`` for ramification data ``A``."""
    if r < 2:
        raise DRError("modulus must be at least 2")
    vt = _vertex_targets(graph, target, k)
    return [Weighting(w, r) for w in _iter_weightings(graph, r, A, vt)]


def is_weighting(graph: StableGraph, w: Sequence[int], r: int, A: Sequence[int], k: int,
                 target: Target) -> bool:
    n = graph.n
    if any(not 0 <= x < r for x in w):
        return False
    if any((w[i] - A[i]) % r for i in range(n)):
        return False
    for e in range(graph.num_edges):
        if (w[n + 2 * e] + w[n + 2 * e + 1]) % r:
            return False
    vt = _vertex_targets(graph, target, k)
    for v in range(graph.num_vertices):
        if (sum(w[h] for h in graph.half_edges_at(v)) - vt[v]) % r:
            return False
    return True


def _moments(graph: StableGraph, r: int, A, vt, orders) -> dict:
    """``r^{-h1} sum_w prod_e (w_e w'_e)^{s_e}`` for each order vector ``s``."""
    n = graph.n
    ne = graph.num_edges
    sums = {s: 0 for s in orders}
    for w in _iter_weightings(graph, r, A, vt):
        prods = [w[n + 2 * e] * w[n + 2 * e + 1] for e in range(ne)]
        for s in orders:
            val = 1
            for p, x in zip(prods, s):
                val *= p ** x
            sums[s] += val
    scale = Fraction(1, r ** first_betti(graph))
    return {s: v * scale for s, v in sums.items()}


# ---------------------------------------------------------------------------
# templates

def _edge_orders(num_edges: int, budget: int) -> list:
    """Vectors ``s`` with every ``s_e >= 1`` and ``sum s <= budget``."""
    if num_edges == 0:
        return [()]
    out = []
    for s in itertools.product(range(1, budget + 1), repeat=num_edges):
        if sum(s) <= budget:
            out.append(s)
    return out


def _leg_vertex_monomials(graph: StableGraph, target: Target, A, k: int, budget: int):
    """All leg/vertex exponent choices of total degree exactly ``budget``.

    Each item is ``(coeff, psi_on_legs, leg_classes, kappa lists)``.
    """
    n = graph.n
    c1 = target.c1_S
    eta_class = chow_product(target, c1, c1)
    items = []  # one per generator: (kind, index, weight)
    for i in range(n):
        items.append(("psi", i, Fraction(A[i] * A[i], 2)))
        items.append(("xi", i, Fraction(A[i])))
    for v in range(graph.num_vertices):
        items.append(("eta", v, Fraction(-1, 2)))
        items.append(("k0", v, Fraction(-k)))
        items.append(("k1", v, Fraction(-k * k, 2)))
    items = [it for it in items if it[2] != 0]
    out = []
    for expo in _compositions_bounded(budget, len(items)):
        coeff = Fraction(1)
        psi = [0] * n
        xi = [0] * n
        kap = [[] for _ in range(graph.num_vertices)]
        for (kind, idx, wt), e in zip(items, expo):
            if e == 0:
                continue
            coeff *= wt ** e / math.factorial(e)
            if kind == "psi":
                psi[idx] += e
            elif kind == "xi":
                xi[idx] += e
            elif kind == "eta":
                kap[idx].extend([(-1, eta_class)] * e)
            elif kind == "k0":
                kap[idx].extend([(0, c1)] * e)
            else:
                kap[idx].extend([(1, target.unit)] * e)
        legs = [chow_power(target, c1, x) for x in xi]
        if any(c.is_zero() for c in legs) or any(al.is_zero() for ks in kap for _, al in ks):
            continue
        out.append((coeff, psi, legs, kap))
    return out


def _compositions_bounded(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions_bounded(total - first, parts - 1):
            yield (first,) + rest


def _templates(req: DRRequest, graph: StableGraph) -> dict:
    """``s -> {term: coeff}`` with ``1/|Aut|`` and the edge-series constants included."""
    amb = req.ambient
    d = req.d
    orders = _edge_orders(graph.num_edges, d)
    aut = automorphism_order(graph)
    n = graph.n
    out = {}
    lv_cache = {}
    for s in orders:
        budget = d - sum(s)
        if budget not in lv_cache:
            lv_cache[budget] = _leg_vertex_monomials(graph, req.target, req.A, req.k, budget)
        edge_coeff = Fraction(1, aut)
        for x in s:
            edge_coeff *= Fraction((-1) ** (x + 1), 2 ** x * math.factorial(x))
        acc: dict = {}
        splits = [[(j, x - 1 - j, math.comb(x - 1, j)) for j in range(x)] for x in s]
        for coeff, psi_legs, legs, kap in lv_cache[budget]:
            for choice in itertools.product(*splits):
                psi = list(psi_legs) + [0] * (2 * graph.num_edges)
                c = coeff * edge_coeff
                for e, (p0, p1, binom) in enumerate(choice):
                    psi[n + 2 * e] = p0
                    psi[n + 2 * e + 1] = p1
                    c *= binom
                add_into(acc, make_terms(amb, graph, psi, legs, None, kap, c))
        if acc:
            out[s] = acc
    return out


@dataclass
class _Prepared:
    graphs: list
    templates: list
    vertex_targets: list


def _prepare(req: DRRequest) -> _Prepared:
    graphs = list(enumerate_graphs(req.g, req.n, req.beta, req.d))
    temps = [_templates(req, gr) for gr in graphs]
    vts = [_vertex_targets(gr, req.target, req.k) for gr in graphs]
    return _Prepared(graphs, temps, vts)


def _assemble(req: DRRequest, prep: _Prepared, r: int) -> dict:
    out: dict = {}
    for gr, temp, vt in zip(prep.graphs, prep.templates, prep.vertex_targets):
        if not temp:
            continue
        moments = _moments(gr, r, req.A, vt, list(temp))
        for s, terms in temp.items():
            m = moments[s]
            if m:
                add_into(out, terms, m)
    return {t: c for t, c in out.items() if c != 0}


def compute_P_d_r(req: DRRequest, r: int) -> StrataElement:
    """Degree-``d`` part of the weighted graph sum at modulus ``r``."""
    _require(req)
    if req.A is None:
        raise DRError("compute_P_d_r needs numeric ramification data")
    if r < 2:
        raise DRError("modulus must be at least 2")
    return StrataElement(req.ambient, _assemble(req, _prepare(req), r))


# ---------------------------------------------------------------------------
# interpolation in r

def lagrange_coefficients(xs: Sequence, ys: Sequence) -> list:
    """Exact monomial coefficients of the interpolating polynomial (Newton form)."""
    m = len(xs)
    coef = [Fraction(y) if not hasattr(y, "ring") else y for y in ys]
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * Fraction(1, xs[i] - xs[i - j])
    # expand Newton form to monomial basis
    poly = [coef[-1]]
    for i in range(m - 2, -1, -1):
        new = [0] * (len(poly) + 1)
        for p, c in enumerate(poly):
            new[p + 1] = new[p + 1] + c
            new[p] = new[p] - c * xs[i]
        new[0] = new[0] + coef[i]
        poly = new
    return poly


def eval_poly(coeffs: Sequence, x) -> Fraction:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass
class Provenance:
    moduli: list = field(default_factory=list)
    check_moduli: list = field(default_factory=list)
    degree_bound: int = 0
    retried: bool = False
    grid: list = field(default_factory=list)
    check_points: list = field(default_factory=list)
    m_values: list = field(default_factory=list)
    m_checks: list = field(default_factory=list)

    def as_doc(self) -> dict:
        doc = {"r_degree_bound": self.degree_bound, "r_samples": self.moduli,
               "r_checks": self.check_moduli, "r_bound_doubled": self.retried}
        if self.grid:
            doc["A_grid"] = [list(p) for p in self.grid]
            doc["A_checks"] = [list(p) for p in self.check_points]
        if self.m_values:
            doc["m_samples"] = self.m_values
            doc["m_checks"] = self.m_checks
        return doc


def r_start(req: DRRequest) -> int:
    return 2 * (sum(abs(a) for a in req.A) + abs(req.b)
                + abs(req.k) * abs(2 * req.g - 2 + req.n) + req.d) + 3


def r_degree_bound(req: DRRequest) -> int:
    return 2 * req.d * req.d + req.g


def _fit_in_r(req: DRRequest, prep: _Prepared, bound: int, r0: int):
    moduli = list(range(r0, r0 + bound + 1))
    checks = list(range(r0 + bound + 1, r0 + bound + 4))
    samples = {r: _assemble(req, prep, r) for r in moduli + checks}
    terms = set()
    for vals in samples.values():
        terms.update(vals)
    const = {}
    fits = {}
    for t in terms:
        ys = [samples[r].get(t, Fraction(0)) for r in moduli]
        coeffs = lagrange_coefficients(moduli, ys)
        for r in checks:
            if eval_poly(coeffs, r) != samples[r].get(t, Fraction(0)):
                return None, moduli, checks, fits
        fits[t] = coeffs
        if coeffs[0] != 0:
            const[t] = coeffs[0]
    return const, moduli, checks, fits


def interpolate_in_r(req: DRRequest, provenance: Optional[Provenance] = None,
                     return_fits: bool = False):
    """``P^d``: the constant term in ``r`` of ``P^{d,r}``, cross-validated on three extra moduli."""
    _require(req)
    if req.A is None:
        raise DRError("interpolate_in_r needs numeric ramification data")
    prep = _prepare(req)
    r0 = r_start(req)
    bound = r_degree_bound(req)
    const, moduli, checks, fits = _fit_in_r(req, prep, bound, r0)
    retried = False
    if const is None:
        retried = True
        bound *= 2
        const, moduli, checks, fits = _fit_in_r(req, prep, bound, r0)
        if const is None:
            raise CrossValidationError(
                f"values at moduli {checks} are not reproduced by a polynomial of degree {bound}")
    if provenance is not None:
        provenance.moduli = moduli
        provenance.check_moduli = checks
        provenance.degree_bound = bound
        provenance.retried = retried
    elem = StrataElement(req.ambient, const)
    if return_fits:
        return elem, fits, moduli, checks
    return elem


# ---------------------------------------------------------------------------
# symbolic ramification data

def symbol_names(n: int) -> tuple:
    return tuple(f"a{i}" for i in range(1, n))


@lru_cache(maxsize=None)
def coefficient_ring(names: tuple):
    if not names:
        return None
    R, *_ = poly_ring(",".join(names), QQ)
    return R


def _complete_A(req: DRRequest, free: Sequence[int]) -> tuple:
    return tuple(free) + (req.total - sum(free),)


def _grid(n_free: int, d: int):
    return list(itertools.product(range(2 * d + 1), repeat=n_free))


def _check_points(n_free: int, d: int):
    if n_free == 0:
        return []
    pts = []
    for j, base in enumerate((2 * d + 1, -1, 2 * d + 3)):
        pts.append(tuple(base + ((i + j) % 2) * (i + 1) for i in range(n_free)))
    return pts


def _eval_numeric(args):
    req, A = args
    return interpolate_in_r(req.with_A(A)).terms


def _lagrange_basis_1d(R, var_index: int, nodes: Sequence[int]) -> list:
    x = R.gens[var_index]
    out = []
    for j, xj in enumerate(nodes):
        p = R.one
        for m, xm in enumerate(nodes):
            if m != j:
                p = p * (x - xm) * QQ(1, xj - xm)
        out.append(p)
    return out


def _to_qq(c: Fraction):
    return QQ(c.numerator, c.denominator)


def compute_P_d_symbolic(g: int, n: int, target: Target, beta: Sequence[int], k: int, d: int,
                         workers: int = 1, provenance: Optional[Provenance] = None) -> StrataElement:
    """``P^d`` as a polynomial in ``a_1..a_{n-1}`` with ``a_n`` eliminated."""
    base = DRRequest(g, n, target, tuple(beta), k, d, None)
    _require(base)
    names = symbol_names(n)
    R = coefficient_ring(names)
    n_free = n - 1
    grid = _grid(n_free, d)
    checks = _check_points(n_free, d)
    points = grid + checks
    jobs = [(base, _complete_A(base, p)) for p in points]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_eval_numeric, jobs))
    else:
        values = [_eval_numeric(j) for j in jobs]
    if provenance is not None:
        provenance.grid = grid
        provenance.check_points = checks
        prov_req = base.with_A(_complete_A(base, grid[0]))
        provenance.degree_bound = r_degree_bound(prov_req)
        r0 = r_start(prov_req)
        provenance.moduli = list(range(r0, r0 + provenance.degree_bound + 1))
        provenance.check_moduli = list(range(r0 + provenance.degree_bound + 1,
                                             r0 + provenance.degree_bound + 4))
    by_point = dict(zip(points, values))
    amb = base.ambient
    if R is None:
        return StrataElement(amb, by_point[()])
    nodes = list(range(2 * d + 1))
    bases = [_lagrange_basis_1d(R, i, nodes) for i in range(n_free)]
    grid_basis = {}
    for p in grid:
        poly = R.one
        for i, x in enumerate(p):
            poly = poly * bases[i][x]
        grid_basis[p] = poly
    terms = set()
    for vals in values:
        terms.update(vals)
    out = {}
    for t in terms:
        poly = R.zero
        for p in grid:
            c = by_point[p].get(t)
            if c:
                poly += grid_basis[p] * _to_qq(c)
        for p in checks:
            got = poly(*p) if n_free > 1 else poly(p[0])
            want = by_point[p].get(t, Fraction(0))
            if Fraction(int(got.numerator), int(got.denominator)) != want:
                raise CrossValidationError(f"off-grid point {p} disagrees with the interpolant")
        if poly:
            out[t] = poly
    return StrataElement(amb, out)


def symbolic_ring_for(n: int):
    return coefficient_ring(symbol_names(n))


def extract_coefficient(P: StrataElement, monomial: Sequence[int]) -> StrataElement:
    """Coefficient of ``a^monomial`` (exponent tuple over ``a_1..a_{n-1}``)."""
    monomial = tuple(monomial)
    out = {}
    for t, c in P.terms.items():
        if isinstance(c, Fraction):
            if not any(monomial):
                out[t] = c
            continue
        q = c.get(monomial)
        if q:
            out[t] = Fraction(int(q.numerator), int(q.denominator))
    return StrataElement(P.ambient, out)


def monomials(P: StrataElement) -> list:
    found = set()
    for c in P.terms.values():
        if isinstance(c, Fraction):
            found.add(None)
        else:
            found.update(c.keys())
    n_free = P.ambient.n - 1
    zero = (0,) * n_free
    out = {zero if m is None else m for m in found}
    return sorted(out)


def reassemble(P: StrataElement) -> StrataElement:
    """Sum over monomials of monomial * coefficient; equals ``P``."""
    R = symbolic_ring_for(P.ambient.n)
    acc = StrataElement.zero(P.ambient)
    for mono in monomials(P):
        part = extract_coefficient(P, mono)
        if R is None:
            acc = acc + part
            continue
        mpoly = R.one
        for x, e in zip(R.gens, mono):
            mpoly = mpoly * x ** e
        acc = acc + StrataElement(P.ambient, {t: mpoly * _to_qq(c) for t, c in part.terms.items()})
    return acc


# ---------------------------------------------------------------------------
# m-grading

def m_graded_part(P: StrataElement, degree: int) -> StrataElement:
    """Sub-sum of ``monomial * term`` pieces whose formal scaling weight equals ``degree``.

    The weight is the ``a``-degree plus the number of Chow divisor factors.  Numeric
    ``b``-dependence is invisible here; see :func:`m_graded_parts_by_scaling`.
    """
    from .algebra import m_degree
    tg = P.ambient.target
    R = symbolic_ring_for(P.ambient.n)
    out = {}
    for t, c in P.terms.items():
        if isinstance(c, Fraction):
            if m_degree(t, tg, ()) == degree:
                out[t] = c
            continue
        keep = R.zero
        for mono, q in c.items():
            if m_degree(t, tg, mono) == degree:
                keep += R({mono: q})
        if keep:
            out[t] = keep
    return StrataElement(P.ambient, out)


def m_graded_parts_by_scaling(g: int, n: int, target: Target, beta: Sequence[int], d: int,
                              workers: int = 1, provenance: Optional[Provenance] = None) -> dict:
    """Split ``P^d`` by the scaling ``a_i -> m a_i``, ``S -> S^m`` (k = 0).

    Returns ``{j: element}`` where the element is the coefficient of ``m^j``; the
    ambient ``S`` is the unscaled one and ``a_n`` is eliminated as usual.
    """
    n_free = n - 1
    R = symbolic_ring_for(n)
    bound = 2 * d
    ms = list(range(1, bound + 2))
    checks = list(range(bound + 2, bound + 5))
    values = {}
    for m in ms + checks:
        Pm = compute_P_d_symbolic(g, n, target.scaled(m), beta, 0, d, workers=workers)
        values[m] = _scale_variables(Pm, m, R) if R is not None else dict(Pm.terms)
    amb = Ambient(g, n, tuple(beta), target)
    terms = set()
    for vals in values.values():
        terms.update(vals)
    parts: dict = {}
    for t in sorted(terms, key=lambda x: x.sort_key()):
        ys = [values[m].get(t, 0) for m in ms]
        coeffs = lagrange_coefficients(ms, ys)
        for m in checks:
            if norm_coeff(eval_poly(coeffs, m) - values[m].get(t, 0)) != 0:
                raise CrossValidationError(f"m-scaling check failed at m = {m}")
        for j, c in enumerate(coeffs):
            c = norm_coeff(c)
            if c != 0:
                parts.setdefault(j, {})[t] = c
    if provenance is not None:
        provenance.m_values = ms
        provenance.m_checks = checks
    return {j: StrataElement(amb, terms) for j, terms in sorted(parts.items())}


def _scale_variables(P: StrataElement, m: int, R) -> dict:
    out = {}
    for t, c in P.terms.items():
        if isinstance(c, Fraction):
            out[t] = c
            continue
        new = R.zero
        for mono, q in c.items():
            new += R({mono: q * QQ(m) ** sum(mono)})
        out[t] = new
    return out


def dr_relation_parts(P: StrataElement) -> dict:
    """``{monomial: coefficient element}`` for every monomial present."""
    return {mono: extract_coefficient(P, mono) for mono in monomials(P)}
