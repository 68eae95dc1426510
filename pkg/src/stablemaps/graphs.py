"""X-valued stable graphs: validation, canonical forms, automorphisms, enumeration.

Half-edges are numbered globally.  For a graph with ``n`` legs, half-edge
``h < n`` is leg ``h + 1``; half-edge ``n + 2*e + s`` is side ``s`` of edge
``e``.  Edge ``e`` joins ``edges[e][0]`` (side 0) to ``edges[e][1]`` (side 1).
Curve classes are integer tuples; shape-only graphs use the empty tuple.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .target import curve_add, enumerate_splittings, is_zero_class


class GraphError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class StableGraph:
    genera: tuple
    betas: tuple
    legs: tuple
    edges: tuple

    # -- basic structure ---------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_half_edges(self) -> int:
        return self.n + 2 * self.num_edges

    def vertex_of(self, h: int) -> int:
        if h < self.n:
            return self.legs[h]
        e, s = divmod(h - self.n, 2)
        return self.edges[e][s]

    def partner(self, h: int) -> int:
        """Image of ``h`` under the involution (legs are fixed points)."""
        if h < self.n:
            return h
        return h + 1 if (h - self.n) % 2 == 0 else h - 1

    def edge_half_edges(self, e: int) -> tuple:
        return (self.n + 2 * e, self.n + 2 * e + 1)

    def half_edges_at(self, v: int) -> list:
        return [h for h in range(self.num_half_edges) if self.vertex_of(h) == v]

    def valence(self, v: int) -> int:
        return sum(1 for x in self.legs if x == v) + sum(
            (a == v) + (b == v) for a, b in self.edges)

    @property
    def beta(self) -> tuple:
        if not self.betas:
            return ()
        total = self.betas[0]
        for b in self.betas[1:]:
            total = curve_add(total, b)
        return total

    @property
    def genus(self) -> int:
        return sum(self.genera) + first_betti(self)

    def is_loop(self, e: int) -> bool:
        return self.edges[e][0] == self.edges[e][1]


def first_betti(graph: StableGraph) -> int:
    return graph.num_edges - graph.num_vertices + 1


def _connected(num_vertices: int, edges: Iterable) -> bool:
    parent = list(range(num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(num_vertices)}) <= 1


def validate(graph: StableGraph, g: Optional[int] = None, n: Optional[int] = None,
             beta: Optional[Sequence[int]] = None, shapes_only: bool = False) -> Optional[str]:
    """Return ``None`` for a valid graph, otherwise the first violated condition."""
    if graph.num_vertices == 0:
        return "vertices (i): empty vertex set"
    if any(x < 0 for x in graph.genera):
        return "genus function (i): negative genus"
    for v in list(graph.legs) + [x for e in graph.edges for x in e]:
        if not 0 <= v < graph.num_vertices:
            return "half-edges (ii): vertex assignment out of range"
    if n is not None and graph.n != n:
        return f"legs: expected {n} markings, found {graph.n}"
    if not _connected(graph.num_vertices, graph.edges):
        return "connectivity (iii): graph is disconnected"
    if g is not None and graph.genus != g:
        return f"genus condition (iii): sum g(v) + h1 = {graph.genus} != {g}"
    if not shapes_only:
        for v in range(graph.num_vertices):
            if is_zero_class(graph.betas[v]) and 2 * graph.genera[v] - 2 + graph.valence(v) <= 0:
                return f"stability (iv): vertex {v} has beta = 0 and 2g-2+n <= 0"
        if beta is not None and graph.beta != tuple(beta):
            return f"degree condition (v): sum beta(v) = {graph.beta} != {tuple(beta)}"
    return None


def check_valid(graph: StableGraph, **kw) -> StableGraph:
    problem = validate(graph, **kw)
    if problem:
        raise GraphError(problem)
    return graph


# ---------------------------------------------------------------------------
# canonical labelling

def _vertex_blocks(graph, vlabels, hlabels, elabels):
    n = graph.n
    base = []
    for v in range(graph.num_vertices):
        legs = tuple(sorted((i, hlabels[i]) for i, x in enumerate(graph.legs) if x == v))
        base.append((graph.genera[v], graph.betas[v], vlabels[v], legs))
    inv = list(base)
    for _ in range(2):
        new = []
        for v in range(graph.num_vertices):
            nb = []
            for e, (a, b) in enumerate(graph.edges):
                ha, hb = n + 2 * e, n + 2 * e + 1
                if a == v:
                    nb.append((hlabels[ha], hlabels[hb], elabels[e], a == b, inv[b]))
                if b == v:
                    nb.append((hlabels[hb], hlabels[ha], elabels[e], a == b, inv[a]))
            new.append((base[v], tuple(sorted(nb))))
        inv = new
    return inv


def _encode(graph, order, vlabels, hlabels, elabels):
    """Encoding for the vertex ordering ``order`` (position -> old vertex)."""
    n = graph.n
    pos = [0] * graph.num_vertices
    for p, v in enumerate(order):
        pos[v] = p
    verts = tuple((graph.genera[v], graph.betas[v], vlabels[v]) for v in order)
    legs = tuple((pos[graph.legs[i]], hlabels[i]) for i in range(n))
    edges = []
    for e, (a, b) in enumerate(graph.edges):
        s0 = (pos[a], hlabels[n + 2 * e])
        s1 = (pos[b], hlabels[n + 2 * e + 1])
        if s1 < s0:
            edges.append((s1, s0, elabels[e], e, 1))
        else:
            edges.append((s0, s1, elabels[e], e, 0))
    edges.sort(key=lambda t: t[:3])
    key = (verts, legs, tuple(t[:3] for t in edges))
    return key, pos, edges


def _block_orders(inv):
    keys = sorted(set(inv))
    blocks = [[v for v in range(len(inv)) if inv[v] == k] for k in keys]
    for combo in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield [v for part in combo for v in part]


@dataclass(frozen=True)
class Relabeling:
    """Maps old vertex/half-edge indices to canonical ones."""

    vertex_map: tuple
    half_edge_map: tuple


@lru_cache(maxsize=200000)
def canonical_labeling(graph: StableGraph, vlabels=None, hlabels=None, elabels=None):
    """Canonical representative of a (labelled) graph.

    ``vlabels``, ``hlabels`` and ``elabels`` are optional tuples of orderable
    per-vertex, per-half-edge and per-edge labels that isomorphisms must
    respect.  Returns ``(key, canonical_graph, relabeling)``; two labelled
    graphs are isomorphic iff their keys coincide.
    """
    nv, nh, ne = graph.num_vertices, graph.num_half_edges, graph.num_edges
    vlabels = vlabels if vlabels is not None else (0,) * nv
    hlabels = hlabels if hlabels is not None else (0,) * nh
    elabels = elabels if elabels is not None else (0,) * ne
    inv = _vertex_blocks(graph, vlabels, hlabels, elabels)
    best = None
    for order in _block_orders(inv):
        key, pos, edges = _encode(graph, order, vlabels, hlabels, elabels)
        if best is None or key < best[0]:
            best = (key, order, pos, edges)
    key, order, pos, edges = best
    n = graph.n
    new_edges = tuple((s0[0], s1[0]) for s0, s1, _, _, _ in edges)
    hmap = list(range(n)) + [0] * (2 * ne)
    for new_e, (_, _, _, old_e, flip) in enumerate(edges):
        hmap[n + 2 * old_e] = n + 2 * new_e + flip
        hmap[n + 2 * old_e + 1] = n + 2 * new_e + 1 - flip
    canon = StableGraph(tuple(graph.genera[v] for v in order),
                        tuple(graph.betas[v] for v in order),
                        tuple(pos[x] for x in graph.legs), new_edges)
    return key, canon, Relabeling(tuple(pos), tuple(hmap))


def canonicalize(graph: StableGraph):
    """Return ``(canonical graph, relabeling)``."""
    _, canon, rel = canonical_labeling(graph)
    return canon, rel


def canonical(graph: StableGraph) -> StableGraph:
    return canonical_labeling(graph)[1]


@lru_cache(maxsize=50000)
def automorphisms(graph: StableGraph) -> tuple:
    """All automorphisms as ``(vertex_perm, half_edge_perm)`` tuples (old -> new)."""
    n, nv = graph.n, graph.num_vertices
    inv = _vertex_blocks(graph, (0,) * nv, (0,) * graph.num_half_edges, (0,) * graph.num_edges)
    by_pair: dict = {}
    for e, (a, b) in enumerate(graph.edges):
        by_pair.setdefault((min(a, b), max(a, b)), []).append(e)
    result = []
    ident = _block_orders_identity(inv)
    for order in _block_orders(inv):
        # block-preserving vertex permutation sending ident[p] to order[p]
        sigma = [0] * nv
        for p, v in enumerate(ident):
            sigma[v] = order[p]
        if any(sigma[x] != x for x in graph.legs):
            continue
        mapped = Counter((min(sigma[a], sigma[b]), max(sigma[a], sigma[b])) for a, b in graph.edges)
        if mapped != Counter({k: len(v) for k, v in by_pair.items()}):
            continue
        choices = []
        for (a, b), es in sorted(by_pair.items()):
            ta, tb = sigma[a], sigma[b]
            targets = by_pair[(min(ta, tb), max(ta, tb))]
            options = []
            for perm in itertools.permutations(targets):
                if a == b:
                    for flips in itertools.product((0, 1), repeat=len(es)):
                        options.append([(e, t, f) for e, t, f in zip(es, perm, flips)])
                else:
                    opt = []
                    for e, t in zip(es, perm):
                        flip = 0 if graph.edges[t][0] == sigma[graph.edges[e][0]] else 1
                        opt.append((e, t, flip))
                    options.append(opt)
            choices.append(options)
        for combo in itertools.product(*choices):
            hmap = list(range(n)) + [0] * (2 * graph.num_edges)
            for part in combo:
                for e, t, f in part:
                    hmap[n + 2 * e] = n + 2 * t + f
                    hmap[n + 2 * e + 1] = n + 2 * t + 1 - f
            result.append((tuple(sigma), tuple(hmap)))
    return tuple(result)


def _block_orders_identity(inv):
    keys = sorted(set(inv))
    return [v for k in keys for v in range(len(inv)) if inv[v] == k]


def automorphism_order(graph: StableGraph) -> int:
    return len(automorphisms(graph))


def isomorphisms(source: StableGraph, dest: StableGraph) -> list:
    """All isomorphisms ``source -> dest`` as (vertex_map, half_edge_map)."""
    k1, c1, r1 = canonical_labeling(source)
    k2, c2, r2 = canonical_labeling(dest)
    if k1 != k2:
        return []
    inv2_v = [0] * dest.num_vertices
    for old, new in enumerate(r2.vertex_map):
        inv2_v[new] = old
    inv2_h = [0] * dest.num_half_edges
    for old, new in enumerate(r2.half_edge_map):
        inv2_h[new] = old
    out = []
    for sv, sh in automorphisms(c1):
        vmap = tuple(inv2_v[sv[r1.vertex_map[v]]] for v in range(source.num_vertices))
        hmap = tuple(inv2_h[sh[r1.half_edge_map[h]]] for h in range(source.num_half_edges))
        out.append((vmap, hmap))
    return out


def is_isomorphic(a: StableGraph, b: StableGraph) -> bool:
    return canonical_labeling(a)[0] == canonical_labeling(b)[0]


# ---------------------------------------------------------------------------
# contraction

@dataclass(frozen=True)
class Contraction:
    graph: StableGraph
    vertex_map: tuple          # old vertex -> new vertex
    half_edge_map: tuple       # old half-edge -> new half-edge, or -1 if contracted


def contract(graph: StableGraph, keep: Iterable[int]) -> Contraction:
    """Contract every edge not in ``keep``; kept edges retain their order."""
    keep = sorted(set(keep))
    parent = list(range(graph.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    contracted = [e for e in range(graph.num_edges) if e not in keep]
    for e in contracted:
        a, b = graph.edges[e]
        parent[find(a)] = find(b)
    roots = sorted({find(v) for v in range(graph.num_vertices)})
    new_index = {r: i for i, r in enumerate(roots)}
    vmap = tuple(new_index[find(v)] for v in range(graph.num_vertices))
    nv = len(roots)
    genera = [0] * nv
    betas = [None] * nv
    counts_v = [0] * nv
    counts_e = [0] * nv
    for v in range(graph.num_vertices):
        w = vmap[v]
        genera[w] += graph.genera[v]
        betas[w] = graph.betas[v] if betas[w] is None else curve_add(betas[w], graph.betas[v])
        counts_v[w] += 1
    for e in contracted:
        counts_e[vmap[graph.edges[e][0]]] += 1
    for w in range(nv):
        genera[w] += counts_e[w] - counts_v[w] + 1
    n = graph.n
    hmap = list(range(n)) + [-1] * (2 * graph.num_edges)
    new_edges = []
    for i, e in enumerate(keep):
        a, b = graph.edges[e]
        new_edges.append((vmap[a], vmap[b]))
        hmap[n + 2 * e] = n + 2 * i
        hmap[n + 2 * e + 1] = n + 2 * i + 1
    new = StableGraph(tuple(genera), tuple(betas), tuple(vmap[x] for x in graph.legs),
                      tuple(new_edges))
    return Contraction(new, vmap, tuple(hmap))


def contract_edges(graph: StableGraph, keep: Iterable[int]) -> StableGraph:
    return contract(graph, keep).graph


# ---------------------------------------------------------------------------
# enumeration

def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=4096)
def enumerate_graphs(g: int, n: int, beta: tuple, max_edges: int,
                     shapes_only: bool = False) -> tuple:
    """All isomorphism classes with at most ``max_edges`` edges, canonical and sorted.

    With ``shapes_only`` the curve classes are dropped and the stability
    clause is not imposed, so the result counts genus-labelled prestable
    shapes.
    """
    if max_edges < 0:
        raise GraphError("max_edges must be nonnegative")
    beta = tuple(beta)
    found = {}
    for num_e in range(max_edges + 1):
        for nv in range(1, num_e + 2):
            h1 = num_e - nv + 1
            if h1 > g:
                continue
            pairs = [(a, b) for a in range(nv) for b in range(a, nv)]
            edge_sets = [es for es in itertools.combinations_with_replacement(pairs, num_e)
                         if _connected(nv, es)]
            if not edge_sets:
                continue
            genus_opts = list(_compositions(g - h1, nv))
            if shapes_only:
                beta_opts = [((),) * nv]
            else:
                beta_opts = enumerate_splittings(beta, nv)
            for es in edge_sets:
                for legs in itertools.product(range(nv), repeat=n):
                    for gens in genus_opts:
                        for betas in beta_opts:
                            graph = StableGraph(gens, tuple(betas), legs, es)
                            if not shapes_only and validate(graph) is not None:
                                continue
                            key, canon, _ = canonical_labeling(graph)
                            found.setdefault(key, canon)
    out = sorted(found.values(), key=lambda c: (c.num_edges, canonical_labeling(c)[0]))
    return tuple(out)


# ---------------------------------------------------------------------------
# standard graphs

def trivial_graph(g: int, n: int, beta: Sequence[int]) -> StableGraph:
    return StableGraph((g,), (tuple(beta),), (0,) * n, ())


def two_vertex_graph(g1: int, beta1, legs1: Iterable[int], g2: int, beta2,
                     n: int) -> StableGraph:
    """One edge between ``v0 = (g1, beta1)`` and ``v1 = (g2, beta2)``; ``legs1`` sit on v0."""
    legs1 = set(legs1)
    legs = tuple(0 if i + 1 in legs1 else 1 for i in range(n))
    return StableGraph((g1, g2), (tuple(beta1), tuple(beta2)), legs, ((0, 1),))


def separating_divisors(g: int, n: int, beta: Sequence[int], legs1: Iterable[int],
                        g1: int) -> list:
    """All stable one-edge graphs with genus ``g1`` and legs ``legs1`` on one side."""
    legs1 = tuple(sorted(legs1))
    out = {}
    for b1, b2 in enumerate_splittings(beta, 2):
        graph = two_vertex_graph(g1, b1, legs1, g - g1, b2, n)
        if validate(graph) is None:
            key, canon, _ = canonical_labeling(graph)
            out.setdefault(key, canon)
    return [out[k] for k in sorted(out)]


def loop_graph_delta(g: int, n: int, beta: Sequence[int]) -> StableGraph:
    """Single vertex of genus ``g - 1`` with one loop and all legs."""
    if g < 1:
        raise GraphError("a loop needs genus at least one")
    return canonical(StableGraph((g - 1,), (tuple(beta),), (0,) * n, ((0, 0),)))


def D_i_graphs(g: int, n: int, beta: Sequence[int], i: int) -> list:
    """Genus-``g`` vertex with all legs but ``i``, joined to a genus-0 vertex carrying leg ``i``."""
    if not 1 <= i <= n:
        raise GraphError("leg out of range")
    others = [j for j in range(1, n + 1) if j != i]
    return separating_divisors(g, n, beta, others, g)


def D_kappa_graphs(g: int, n: int, beta: Sequence[int]) -> list:
    """Genus-``g`` vertex with all legs, joined to a legless genus-0 vertex."""
    return separating_divisors(g, n, beta, range(1, n + 1), g)


# ---------------------------------------------------------------------------
# documents

def slots(graph: StableGraph) -> dict:
    """half-edge -> (vertex, slot) with slots numbered by half-edge order."""
    out = {}
    counter = [0] * graph.num_vertices
    for h in range(graph.num_half_edges):
        v = graph.vertex_of(h)
        out[h] = (v, counter[v])
        counter[v] += 1
    return out


def graph_to_doc(graph: StableGraph) -> dict:
    sl = slots(graph)
    return {
        "vertices": [{"genus": gv, "beta": list(b)} for gv, b in zip(graph.genera, graph.betas)],
        "edges": [[list(sl[h]) for h in graph.edge_half_edges(e)] for e in range(graph.num_edges)],
        "legs": {str(i + 1): list(sl[i]) for i in range(graph.n)},
    }


def graph_from_doc(doc) -> StableGraph:
    try:
        verts = doc["vertices"]
        genera = tuple(int(v["genus"]) for v in verts)
        betas = tuple(tuple(int(x) for x in v.get("beta", [])) for v in verts)
        legs_doc = doc.get("legs", {})
        n = len(legs_doc)
        legs = tuple(int(legs_doc[str(i + 1)][0]) for i in range(n))
        edges = tuple((int(a[0]), int(b[0])) for a, b in doc.get("edges", []))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise GraphError(f"malformed graph document: {exc}") from exc
    graph = StableGraph(genera, betas, legs, edges)
    if any(not 0 <= v < len(genera) for v in legs + tuple(x for e in edges for x in e)):
        raise GraphError("graph document references a missing vertex")
    return graph


def graph_sort_key(graph: StableGraph):
    return (graph.num_edges, canonical_labeling(graph)[0])


def stars_and_bars(beta: Sequence[int], k: int) -> int:
    return math.prod(math.comb(b + k - 1, k - 1) for b in beta)
