"""Formal strata algebra of decorated X-valued stable graphs.

A :class:`DecoratedTerm` is a canonical graph with

* ``psi``: exponent per half-edge,
* ``legc``: Chow basis index per leg (0 is the unit),
* ``edgec``: Chow basis index per edge,
* ``kappa``: per vertex, a sorted tuple of ``(a, basis index)`` pairs
  standing for single-index twisted classes ``kappa_a(alpha)``.

Terms are always stored in canonical form, so element equality is equality
of term maps.  Coefficients are ``Fraction`` or elements of a sympy
polynomial ring over QQ.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from sympy import Symbol
from sympy.parsing.sympy_parser import parse_expr

from .graphs import (StableGraph, automorphism_order, canonical_labeling, contract,
                     enumerate_graphs, graph_from_doc, graph_to_doc, isomorphisms, slots,
                     trivial_graph)
from .target import (ChowElement, Target, chow_product, degree_pairing, format_rational,
                     parse_rational)


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ambient data

@dataclass(frozen=True)
class Ambient:
    g: int
    n: int
    beta: tuple
    target: Target

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(int(x) for x in self.beta))
        if len(self.beta) != self.target.curve_rank:
            raise AlgebraError(f"curve class {self.beta} does not match target rank "
                               f"{self.target.curve_rank}")
        if self.g < 0 or self.n < 0 or any(x < 0 for x in self.beta):
            raise AlgebraError("genus, markings and curve class must be nonnegative")

    @property
    def vdim(self) -> int:
        return vdim(self.g, self.n, self.beta, self.target)

    def with_n(self, n: int) -> "Ambient":
        return Ambient(self.g, n, self.beta, self.target)

    def label(self) -> str:
        return f"g={self.g}, n={self.n}, beta={list(self.beta)}, X={self.target.name}"


def vdim(g: int, n: int, beta: Sequence[int], target: Target) -> int:
    c1 = degree_pairing(target, tuple(beta), target.c1_TX)
    value = (1 - g) * (target.dim - 3) + c1 + n
    return int(value)


# ---------------------------------------------------------------------------
# coefficients

_COEFF_CHARS = re.compile(r"[0-9A-Za-z_+\-*/^() ]+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _is_poly(c) -> bool:
    return hasattr(c, "ring") and hasattr(c, "terms")


def norm_coeff(c):
    """Collapse constant polynomials to Fractions so term maps compare exactly."""
    if _is_poly(c):
        if c.is_ground:
            q = c.LC if c else 0
            return Fraction(int(q.numerator), int(q.denominator)) if c else Fraction(0)
        return c
    return Fraction(c)


def coeff_to_str(c) -> str:
    c = norm_coeff(c)
    if isinstance(c, Fraction):
        return format_rational(c)
    return str(c).replace("**", "^")


def coeff_from_str(text, ring=None):
    if ring is None:
        return parse_rational(text)
    text = str(text)
    names = {str(x): Symbol(str(x)) for x in ring.symbols}
    if not _COEFF_CHARS.fullmatch(text) or set(_IDENT.findall(text)) - set(names):
        raise AlgebraError(f"bad coefficient {text!r}")
    try:
        expr = parse_expr(text.replace("^", "**"), local_dict=names)
        return norm_coeff(ring.from_expr(expr))
    except Exception as exc:  # sympy raises a variety of errors
        raise AlgebraError(f"bad coefficient {text!r}") from exc


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class DecoratedTerm:
    graph: StableGraph
    psi: tuple
    legc: tuple
    edgec: tuple
    kappa: tuple

    def sort_key(self):
        return (self.graph.num_edges, canonical_labeling(self.graph)[0],
                self.psi, self.legc, self.edgec, self.kappa)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    @property
    def psi_total(self) -> int:
        return sum(self.psi)


def term_degree(term: DecoratedTerm, target: Target) -> int:
    deg = term.graph.num_edges + sum(term.psi)
    deg += sum(target.codims[i] for i in term.legc)
    deg += sum(target.codims[i] for i in term.edgec)
    deg += sum(a + target.codims[i] for entries in term.kappa for a, i in entries)
    return deg


def chow_factor_count(term: DecoratedTerm, target: Target) -> int:
    """Number of divisor factors carried by the Chow decorations."""
    return (sum(target.codims[i] for i in term.legc) + sum(target.codims[i] for i in term.edgec)
            + sum(target.codims[i] for entries in term.kappa for _, i in entries))


def m_degree(term: DecoratedTerm, target: Target, monomial: Sequence[int] = ()) -> int:
    """Scaling weight of ``monomial * term`` under ``a_i -> m a_i``, ``S -> S^m``.

    Each Chow decoration is counted as a power of ``c1(S)`` of its codimension,
    which is exact for targets whose Chow ring is generated by ``c1(S)``.
    """
    return sum(monomial) + chow_factor_count(term, target)


def _expand_chow(target: Target, factors: Sequence[ChowElement]):
    """Expand a list of Chow elements into (tuple of basis indices, coefficient)."""
    out = [((), Fraction(1))]
    for f in factors:
        nxt = []
        for idxs, c in out:
            for i, q in f.terms:
                nxt.append((idxs + (i,), c * q))
        out = nxt
    return out


def _product_of(target: Target, classes: Iterable[ChowElement]) -> ChowElement:
    result = target.unit
    for c in classes:
        result = chow_product(target, result, c)
    return result


@lru_cache(maxsize=500000)
def _canonical_term(target: Target, graph: StableGraph, psi: tuple, legc: tuple, edgec: tuple,
                    kappa: tuple):
    """Canonical form of a basis-decorated term; returns (term, scalar) or None."""
    scalar = Fraction(1)
    new_kappa = []
    for v, entries in enumerate(kappa):
        kept = []
        for a, i in entries:
            if a == -1:
                cd = target.codims[i]
                if cd == 0:
                    return None
                if cd == 1:
                    scalar *= degree_pairing(target, graph.betas[v], ChowElement.basis(i))
                    if scalar == 0:
                        return None
                    continue
            kept.append((a, i))
        new_kappa.append(tuple(sorted(kept)))
    n = graph.n
    hl = tuple((psi[h], legc[h]) if h < n else (psi[h], 0) for h in range(graph.num_half_edges))
    key, canon, rel = canonical_labeling(graph, tuple(new_kappa), hl, edgec)
    cpsi = [0] * graph.num_half_edges
    for h, e in enumerate(psi):
        cpsi[rel.half_edge_map[h]] = e
    cedge = [0] * graph.num_edges
    for e, i in enumerate(edgec):
        cedge[(rel.half_edge_map[n + 2 * e] - n) // 2] = i
    ckappa = [()] * graph.num_vertices
    for v, entries in enumerate(new_kappa):
        ckappa[rel.vertex_map[v]] = entries
    term = DecoratedTerm(canon, tuple(cpsi), tuple(legc), tuple(cedge), tuple(ckappa))
    return term, scalar


def make_terms(ambient: Ambient, graph: StableGraph, psi: Sequence[int],
               leg_classes: Optional[Sequence[ChowElement]] = None,
               edge_classes: Optional[Sequence[ChowElement]] = None,
               kappa: Optional[Sequence[Sequence[tuple]]] = None, coeff=Fraction(1)) -> dict:
    """Normalize a raw decorated graph into canonical terms.

    ``kappa[v]`` is a list of ``(a, ChowElement)``.  Linear combinations are
    expanded, ``kappa_{-1}`` of the unit vanishes, ``kappa_{-1}`` of a divisor
    becomes its degree on ``beta(v)``, and terms above ``vdim`` are dropped.
    """
    target = ambient.target
    nv, ne = graph.num_vertices, graph.num_edges
    leg_classes = list(leg_classes) if leg_classes is not None else [target.unit] * graph.n
    edge_classes = list(edge_classes) if edge_classes is not None else [target.unit] * ne
    kappa = [list(k) for k in kappa] if kappa is not None else [[] for _ in range(nv)]
    flat_k = [(v, a) for v in range(nv) for a, _ in kappa[v]]
    factors = leg_classes + edge_classes + [alpha for v in range(nv) for _, alpha in kappa[v]]
    out: dict = {}
    cap = ambient.vdim
    for idxs, c in _expand_chow(target, factors):
        legc = idxs[:graph.n]
        edgec = idxs[graph.n:graph.n + ne]
        kidx = idxs[graph.n + ne:]
        kap = [[] for _ in range(nv)]
        for (v, a), i in zip(flat_k, kidx):
            kap[v].append((a, i))
        res = _canonical_term(target, graph, tuple(psi), tuple(legc), tuple(edgec),
                              tuple(tuple(sorted(k)) for k in kap))
        if res is None:
            continue
        term, scalar = res
        if term_degree(term, target) > cap:
            continue
        out[term] = out.get(term, 0) + coeff * c * scalar
    return {t: c for t, c in out.items() if c != 0}


# ---------------------------------------------------------------------------
# elements

class StrataElement:
    """Finite linear combination of canonical decorated terms."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Ambient, terms: Optional[Mapping] = None):
        self.ambient = ambient
        clean = {}
        for t, c in (terms or {}).items():
            c = norm_coeff(c)
            if c != 0:
                clean[t] = c
        self.terms = clean

    # construction helpers
    @classmethod
    def zero(cls, ambient: Ambient) -> "StrataElement":
        return cls(ambient)

    @classmethod
    def fundamental(cls, ambient: Ambient) -> "StrataElement":
        return cls.from_graph(ambient, trivial_graph(ambient.g, ambient.n, ambient.beta))

    @classmethod
    def from_graph(cls, ambient: Ambient, graph: StableGraph, coeff=1, **decorations) -> "StrataElement":
        psi = decorations.pop("psi", None) or [0] * graph.num_half_edges
        return cls(ambient, make_terms(ambient, graph, psi, coeff=Fraction(coeff) if not _is_poly(coeff)
                                       else coeff, **decorations))

    def _check(self, other: "StrataElement"):
        if self.ambient != other.ambient:
            raise AlgebraError(f"ambient mismatch: ({self.ambient.label()}) vs "
                               f"({other.ambient.label()})")

    # linear structure
    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return StrataElement(self.ambient, out)

    def __neg__(self):
        return StrataElement(self.ambient, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q) -> "StrataElement":
        if not _is_poly(q):
            q = Fraction(q)
        return StrataElement(self.ambient, {t: c * q for t, c in self.terms.items()})

    def __rmul__(self, q):
        return self.scale(q)

    def __mul__(self, other):
        if isinstance(other, StrataElement):
            return multiply(self, other)
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, StrataElement):
            return NotImplemented
        return self.ambient == other.ambient and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms, key=DecoratedTerm.sort_key)))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        """Terms in canonical order."""
        return sorted(self.terms.items(), key=lambda tc: tc[0].sort_key())

    def coefficient(self, term: DecoratedTerm):
        return self.terms.get(term, Fraction(0))

    def degrees(self) -> set:
        return {term_degree(t, self.ambient.target) for t in self.terms}

    def __repr__(self):
        return f"StrataElement({self.ambient.label()}; {len(self.terms)} terms)"

    def __str__(self):
        return to_text(self)


def add_into(acc: dict, terms: Mapping, scale=1):
    for t, c in terms.items():
        acc[t] = acc.get(t, 0) + c * scale


def truncate(element: StrataElement, d: int) -> StrataElement:
    tg = element.ambient.target
    return StrataElement(element.ambient,
                         {t: c for t, c in element.terms.items() if term_degree(t, tg) <= d})


def degree_part(element: StrataElement, d: int) -> StrataElement:
    tg = element.ambient.target
    return StrataElement(element.ambient,
                         {t: c for t, c in element.terms.items() if term_degree(t, tg) == d})


# ---------------------------------------------------------------------------
# convenience constructors

def psi_class(ambient: Ambient, i: int, exponent: int = 1) -> StrataElement:
    graph = trivial_graph(ambient.g, ambient.n, ambient.beta)
    psi = [0] * ambient.n
    psi[i - 1] = exponent
    return StrataElement.from_graph(ambient, graph, psi=psi)


def xi_class(ambient: Ambient, i: int, alpha: Optional[ChowElement] = None) -> StrataElement:
    """``ev_i^* alpha`` on the trivial graph; ``alpha`` defaults to ``c1(S)``."""
    tg = ambient.target
    alpha = tg.c1_S if alpha is None else alpha
    graph = trivial_graph(ambient.g, ambient.n, ambient.beta)
    legs = [tg.unit] * ambient.n
    legs[i - 1] = alpha
    return StrataElement.from_graph(ambient, graph, leg_classes=legs)


def kappa_class(ambient: Ambient, a: int, alpha: Optional[ChowElement] = None) -> StrataElement:
    tg = ambient.target
    alpha = tg.unit if alpha is None else alpha
    graph = trivial_graph(ambient.g, ambient.n, ambient.beta)
    return StrataElement.from_graph(ambient, graph, kappa=[[(a, alpha)]])


def eta_class(ambient: Ambient) -> StrataElement:
    tg = ambient.target
    return kappa_class(ambient, -1, chow_product(tg, tg.c1_S, tg.c1_S))


def graph_class(ambient: Ambient, graph: StableGraph, coeff=1) -> StrataElement:
    return StrataElement.from_graph(ambient, graph, coeff=coeff)


def edge_psi_sum(ambient: Ambient, graph: StableGraph, edge: int, coeff=1) -> StrataElement:
    """``(psi_h + psi_h') [graph]`` for the two half-edges of ``edge``."""
    out = StrataElement.zero(ambient)
    for h in graph.edge_half_edges(edge):
        psi = [0] * graph.num_half_edges
        psi[h] = 1
        out = out + StrataElement.from_graph(ambient, graph, coeff=coeff, psi=psi)
    return out


# ---------------------------------------------------------------------------
# substitution of graphs into vertices

@dataclass
class Substitution:
    graph: StableGraph
    offsets: list            # first new vertex of each old vertex
    piece_half_edges: list   # per old vertex: piece half-edge -> new half-edge
    new_edges: list          # per old vertex: indices of new edges


def substitute(base: StableGraph, pieces: Sequence[StableGraph]) -> Substitution:
    """Replace vertex ``v`` of ``base`` by ``pieces[v]``.

    Leg ``j`` of ``pieces[v]`` is the ``j``-th half-edge at ``v`` (in index
    order).  Legs and old edges keep their indices; new edges are appended.
    """
    n, e_old = base.n, base.num_edges
    offsets, genera, betas = [], [], []
    for p in pieces:
        offsets.append(len(genera))
        genera.extend(p.genera)
        betas.extend(p.betas)
    attach = {}
    piece_h, new_e = [], []
    edges = [None] * e_old
    extra = []
    for v, p in enumerate(pieces):
        hv = base.half_edges_at(v)
        if len(hv) != p.n:
            raise AlgebraError("piece has wrong number of legs")
        hmap = [0] * p.num_half_edges
        for j, h in enumerate(hv):
            attach[h] = offsets[v] + p.legs[j]
            hmap[j] = h
        idxs = []
        for f, (a, b) in enumerate(p.edges):
            k = e_old + len(extra)
            extra.append((offsets[v] + a, offsets[v] + b))
            hmap[p.n + 2 * f] = n + 2 * k
            hmap[p.n + 2 * f + 1] = n + 2 * k + 1
            idxs.append(k)
        piece_h.append(hmap)
        new_e.append(idxs)
    for e in range(e_old):
        edges[e] = (attach[n + 2 * e], attach[n + 2 * e + 1])
    graph = StableGraph(tuple(genera), tuple(betas), tuple(attach[i] for i in range(n)),
                        tuple(edges) + tuple(extra))
    return Substitution(graph, offsets, piece_h, new_e)


def _distribute(entries, candidates):
    """All ways of sending each kappa entry to one of ``candidates``."""
    return itertools.product(*[[(u, ent) for u in candidates] for ent in entries])


# ---------------------------------------------------------------------------
# product

def _term_basis_classes(target: Target, idxs):
    return [ChowElement.basis(i) for i in idxs]


def _multiply_terms(ambient: Ambient, ta: DecoratedTerm, tb: DecoratedTerm) -> dict:
    target = ambient.target
    if term_degree(ta, target) + term_degree(tb, target) > ambient.vdim:
        return {}
    ga, gb = ta.graph, tb.graph
    eb = gb.num_edges
    key_b = canonical_labeling(gb)[0]
    options = []
    for v in range(ga.num_vertices):
        nv = len(ga.half_edges_at(v))
        options.append(enumerate_graphs(ga.genera[v], nv, ga.betas[v], eb))
    out: dict = {}
    for pieces in itertools.product(*options):
        new_count = sum(p.num_edges for p in pieces)
        if new_count > eb or eb - new_count > ga.num_edges:
            continue
        sub = substitute(ga, pieces)
        gam = sub.graph
        weight = Fraction(1)
        for p in pieces:
            weight /= automorphism_order(p)
        new_edges = [k for ks in sub.new_edges for k in ks]
        for old_keep in itertools.combinations(range(ga.num_edges), eb - new_count):
            keep_b = sorted(set(old_keep) | set(new_edges))
            con = contract(gam, keep_b)
            if canonical_labeling(con.graph)[0] != key_b:
                continue
            for vmap_b, hmap_b in isomorphisms(con.graph, gb):
                _emit_product_term(ambient, ta, tb, sub, con, vmap_b, hmap_b, old_keep,
                                   weight, out)
    return out


def _emit_product_term(ambient, ta, tb, sub, con, vmap_b, hmap_b, old_keep, weight, out):
    target = ambient.target
    ga, gb, gam = ta.graph, tb.graph, sub.graph
    n = gam.n
    nh = gam.num_half_edges
    psi = [0] * nh
    for h in range(ga.num_half_edges):
        psi[h] += ta.psi[h]
    # gamma half-edge -> gb half-edge
    inv_b = {}
    for h in range(nh):
        c = con.half_edge_map[h]
        if c >= 0:
            inv_b[hmap_b[c]] = h
    for hb in range(gb.num_half_edges):
        psi[inv_b[hb]] += tb.psi[hb]
    leg_classes = [chow_product(target, ChowElement.basis(ta.legc[i]), ChowElement.basis(tb.legc[i]))
                   for i in range(n)]
    edge_classes = [target.unit] * gam.num_edges
    for e in range(ga.num_edges):
        edge_classes[e] = ChowElement.basis(ta.edgec[e])
    for e in range(gb.num_edges):
        ge = (inv_b[gb.n + 2 * e] - n) // 2
        edge_classes[ge] = chow_product(target, edge_classes[ge], ChowElement.basis(tb.edgec[e]))
    # kappa distributions
    a_groups = []
    for v in range(ga.num_vertices):
        verts = range(sub.offsets[v], sub.offsets[v] + len(_piece_vertices(sub, v, gam)))
        a_groups.append((ta.kappa[v], list(verts)))
    b_groups = []
    for w in range(gb.num_vertices):
        verts = [u for u in range(gam.num_vertices) if vmap_b[con.vertex_map[u]] == w]
        b_groups.append((tb.kappa[w], verts))
    choices = [_distribute(entries, verts) for entries, verts in a_groups + b_groups if entries]
    excess = list(old_keep)
    for assign in itertools.product(*choices):
        kap = [[] for _ in range(gam.num_vertices)]
        for group in assign:
            for u, (a, i) in group:
                kap[u].append((a, ChowElement.basis(i)))
        for sides in itertools.product((0, 1), repeat=len(excess)):
            p2 = list(psi)
            for e, s in zip(excess, sides):
                p2[n + 2 * e + s] += 1
            coeff = weight * (-1) ** len(excess)
            add_into(out, make_terms(ambient, gam, p2, leg_classes, edge_classes, kap, coeff))


def _piece_vertices(sub: Substitution, v: int, gam: StableGraph):
    end = sub.offsets[v + 1] if v + 1 < len(sub.offsets) else gam.num_vertices
    return range(sub.offsets[v], end)


def multiply(x: StrataElement, y: StrataElement) -> StrataElement:
    x._check(y)
    out: dict = {}
    for ta, ca in x.items():
        for tb, cb in y.items():
            add_into(out, _cached_product(x.ambient, ta, tb), ca * cb)
    return StrataElement(x.ambient, out)


@lru_cache(maxsize=200000)
def _cached_product(ambient, ta, tb):
    return _multiply_terms(ambient, ta, tb)


# ---------------------------------------------------------------------------
# gluing

def vertex_ambient(ambient: Ambient, graph: StableGraph, v: int) -> Ambient:
    return Ambient(graph.genera[v], graph.valence(v), graph.betas[v], ambient.target)


def glue_along_graph(ambient: Ambient, graph: StableGraph,
                     per_vertex: Mapping[int, StrataElement]) -> StrataElement:
    """Graft vertex elements onto ``graph``; unspecified vertices get the fundamental class.

    Leg ``j`` of the element at ``v`` is identified with the ``j``-th half-edge at ``v``.
    """
    target = ambient.target
    factors = []
    for v in range(graph.num_vertices):
        amb_v = vertex_ambient(ambient, graph, v)
        elem = per_vertex.get(v)
        if elem is None:
            elem = StrataElement.fundamental(amb_v)
        elif elem.ambient != amb_v:
            raise AlgebraError(f"ambient mismatch at vertex {v}: expected ({amb_v.label()}), "
                               f"got ({elem.ambient.label()})")
        factors.append(elem.items())
    out: dict = {}
    for combo in itertools.product(*factors):
        pieces = [t.graph for t, _ in combo]
        coeff = Fraction(1)
        for _, c in combo:
            coeff = coeff * c
        sub = substitute(graph, pieces)
        gam = sub.graph
        psi = [0] * gam.num_half_edges
        legc = [target.unit] * gam.n
        edgec = [target.unit] * gam.num_edges
        kap = [[] for _ in range(gam.num_vertices)]
        for v, (t, _) in enumerate(combo):
            hm = sub.piece_half_edges[v]
            for h, e in enumerate(t.psi):
                psi[hm[h]] += e
            for j, i in enumerate(t.legc):
                h = hm[j]
                if i == 0:
                    continue
                if h < gam.n:
                    legc[h] = chow_product(target, legc[h], ChowElement.basis(i))
                else:
                    e = (h - gam.n) // 2
                    edgec[e] = chow_product(target, edgec[e], ChowElement.basis(i))
            for f, i in enumerate(t.edgec):
                e = (hm[t.graph.n + 2 * f] - gam.n) // 2
                edgec[e] = ChowElement.basis(i)
            for u, entries in enumerate(t.kappa):
                for a, i in entries:
                    kap[sub.offsets[v] + u].append((a, ChowElement.basis(i)))
        add_into(out, make_terms(ambient, gam, psi, legc, edgec, kap, Fraction(1)), coeff)
    return StrataElement(ambient, out)


# ---------------------------------------------------------------------------
# leg relabelling

def relabel_legs(element: StrataElement, perm: Mapping[int, int]) -> StrataElement:
    """Rename leg ``i`` to ``perm[i]`` (a permutation of ``1..n``)."""
    amb = element.ambient
    n = amb.n
    full = [perm.get(i, i) for i in range(1, n + 1)]
    if sorted(full) != list(range(1, n + 1)):
        raise AlgebraError("relabelling must be a permutation of the legs")
    out: dict = {}
    for t, c in element.items():
        gr = t.graph
        legs = [0] * n
        psi = list(t.psi)
        legc = [0] * n
        for i in range(n):
            j = full[i] - 1
            legs[j] = gr.legs[i]
            psi[j] = t.psi[i]
            legc[j] = t.legc[i]
        new = StableGraph(gr.genera, gr.betas, tuple(legs), gr.edges)
        kap = [[(a, ChowElement.basis(i)) for a, i in entries] for entries in t.kappa]
        add_into(out, make_terms(amb, new, psi, _term_basis_classes(amb.target, legc),
                                 _term_basis_classes(amb.target, t.edgec), kap), c)
    return StrataElement(amb, out)


# ---------------------------------------------------------------------------
# documents

def term_to_doc(term: DecoratedTerm, target: Target) -> dict:
    gr = term.graph
    sl = slots(gr)
    doc = {"graph": graph_to_doc(gr)}
    psi = [[*sl[h], e] for h, e in enumerate(term.psi) if e]
    if psi:
        doc["psi"] = psi
    legs = {str(i + 1): target.labels[c] for i, c in enumerate(term.legc) if c}
    if legs:
        doc["leg_classes"] = legs
    edges = [[e, target.labels[c]] for e, c in enumerate(term.edgec) if c]
    if edges:
        doc["edge_classes"] = edges
    kap = [[v, a, target.labels[i]] for v, entries in enumerate(term.kappa) for a, i in entries]
    if kap:
        doc["kappa"] = kap
    return doc


def term_from_doc(doc: Mapping, ambient: Ambient) -> dict:
    tg = ambient.target
    gr = graph_from_doc(doc["graph"])
    sl = slots(gr)
    inv = {v: h for h, v in sl.items()}
    psi = [0] * gr.num_half_edges
    try:
        for v, s, e in doc.get("psi", []):
            psi[inv[(int(v), int(s))]] = int(e)
        legc = [tg.unit] * gr.n
        for lab, cls in doc.get("leg_classes", {}).items():
            legc[int(lab) - 1] = tg.element(cls)
        edgec = [tg.unit] * gr.num_edges
        for e, cls in doc.get("edge_classes", []):
            edgec[int(e)] = tg.element(cls)
        kap = [[] for _ in range(gr.num_vertices)]
        for v, a, cls in doc.get("kappa", []):
            if int(a) < -1:
                raise AlgebraError("kappa index must be at least -1")
            kap[int(v)].append((int(a), tg.element(cls)))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise AlgebraError(f"malformed term document: {exc}") from exc
    from .graphs import validate
    problem = validate(gr, g=ambient.g, n=ambient.n, beta=ambient.beta)
    if problem:
        raise AlgebraError(f"invalid graph in term document: {problem}")
    return make_terms(ambient, gr, psi, legc, edgec, kap)


def element_to_doc(element: StrataElement, symbols: Sequence[str] = ()) -> dict:
    amb = element.ambient
    return {
        "ambient": {"g": amb.g, "n": amb.n, "beta": list(amb.beta), "target": amb.target.name},
        "symbols": list(symbols),
        "terms": [dict(term_to_doc(t, amb.target), coeff=coeff_to_str(c))
                  for t, c in element.items()],
    }


def element_from_doc(doc: Mapping, target: Target, ring=None) -> StrataElement:
    try:
        a = doc["ambient"]
        amb = Ambient(int(a["g"]), int(a["n"]), tuple(a["beta"]), target)
        out: dict = {}
        for tdoc in doc["terms"]:
            coeff = coeff_from_str(tdoc.get("coeff", "1"), ring)
            add_into(out, term_from_doc(tdoc, amb), coeff)
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraError(f"malformed element document: {exc}") from exc
    return StrataElement(amb, out)


# ---------------------------------------------------------------------------
# text and LaTeX rendering

def _dec_parts(term: DecoratedTerm, target: Target, latex: bool):
    gr = term.graph
    parts = []
    for h, e in enumerate(term.psi):
        if not e:
            continue
        name = f"{h + 1}" if h < gr.n else f"h{h - gr.n}"
        if latex:
            parts.append(rf"\psi_{{{name}}}" + (f"^{{{e}}}" if e > 1 else ""))
        else:
            parts.append(f"psi_{name}" + (f"^{e}" if e > 1 else ""))
    for i, c in enumerate(term.legc):
        if c:
            lab = target.labels[c]
            parts.append(rf"\mathrm{{ev}}_{{{i + 1}}}^*({lab})" if latex else f"ev_{i + 1}*({lab})")
    for e, c in enumerate(term.edgec):
        if c:
            lab = target.labels[c]
            parts.append(rf"\mathrm{{ev}}_{{e{e}}}^*({lab})" if latex else f"ev_e{e}*({lab})")
    for v, entries in enumerate(term.kappa):
        for a, i in entries:
            lab = target.labels[i]
            where = f"v{v}" if gr.num_vertices > 1 else ""
            if latex:
                parts.append(rf"\kappa_{{{a}}}^{{{where}}}({lab})" if where
                             else rf"\kappa_{{{a}}}({lab})")
            else:
                parts.append(f"kappa_{a}{'@' + where if where else ''}({lab})")
    return parts


def _graph_text(gr: StableGraph) -> str:
    verts = []
    for v in range(gr.num_vertices):
        legs = [str(i + 1) for i, x in enumerate(gr.legs) if x == v]
        beta = ",".join(str(b) for b in gr.betas[v])
        verts.append(f"v{v}(g={gr.genera[v]};b={beta};legs={','.join(legs)})")
    edges = [f"v{a}-v{b}" for a, b in gr.edges]
    return " ".join(verts) + (" | " + " ".join(edges) if edges else "")


def to_text(element: StrataElement) -> str:
    if not element.terms:
        return "0"
    lines = []
    for t, c in element.items():
        dec = " ".join(_dec_parts(t, element.ambient.target, latex=False))
        lines.append(f"({coeff_to_str(c)}) [{_graph_text(t.graph)}]" + (f" {dec}" if dec else ""))
    return "\n".join(lines)


def _latex_coeff(c) -> str:
    c = norm_coeff(c)
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        sign = "-" if c < 0 else ""
        return rf"{sign}\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"
    return "(" + str(c).replace("**", "^").replace("*", " ") + ")"


def _latex_graph(gr: StableGraph) -> str:
    if gr.num_edges == 0:
        return ""
    verts = []
    for v in range(gr.num_vertices):
        legs = ",".join(str(i + 1) for i, x in enumerate(gr.legs) if x == v)
        beta = ",".join(str(b) for b in gr.betas[v])
        verts.append(rf"({gr.genera[v]},\beta={beta};{legs})")
    edges = ",".join(f"{a}{b}" for a, b in gr.edges)
    return r"\Gamma\{" + r"\,".join(verts) + r"\mid " + edges + r"\}"


def to_latex(element: StrataElement) -> str:
    if not element.terms:
        return "0"
    pieces = []
    for t, c in element.items():
        dec = " ".join(_dec_parts(t, element.ambient.target, latex=True))
        body = _latex_graph(t.graph)
        inner = " ".join(x for x in (dec, body) if x) or "1"
        coeff = _latex_coeff(c)
        coeff = {"1": "", "-1": "-"}.get(coeff, coeff)
        pieces.append(rf"{coeff}\left[{inner}\right]")
    return " + ".join(pieces).replace("+ -", "- ")
