"""Stabilization pullbacks and forgetful pullback/pushforward.

Conventions for the forgetful map ``pi`` that drops leg ``n+1``:

* ``psi_h = pi^* psi_h + D_h`` where ``D_h`` puts ``h`` and ``n+1`` on a
  genus-0, degree-0 bubble;
* ``kappa_a(alpha) = pi^* kappa_a(alpha) + psi_{n+1}^a ev_{n+1}^* alpha`` for
  ``a >= 0``; ``kappa_{-1}`` is a pullback already;
* ``pi_*(psi_{n+1}^{a+1} ev_{n+1}^* alpha) = kappa_a(alpha)``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional

from .algebra import (AlgebraError, Ambient, StrataElement, add_into, kappa_class, make_terms,
                      psi_class)
from .graphs import (StableGraph, automorphism_order, canonical_labeling, D_i_graphs,
                     D_kappa_graphs, validate)
from .target import ChowElement, chow_product, enumerate_splittings, is_zero_class


class StabilizationError(ValueError):
    pass


def _require_stable(g: int, n: int):
    if 2 * g - 2 + n <= 0:
        raise StabilizationError(f"(g, n) = ({g}, {n}) is not in the stable range 2g-2+n > 0")


def _curve_stable(graph: StableGraph) -> Optional[str]:
    for v in range(graph.num_vertices):
        if 2 * graph.genera[v] - 2 + graph.valence(v) <= 0:
            return f"vertex {v} is not curve-stable"
    return None


def pullback_boundary(curve_graph: StableGraph, ambient: Ambient,
                      prestable: bool = False) -> StrataElement:
    """``st^*`` of ``(1/|Aut|)[curve_graph]``: sum of ``(1/|Aut Γ'|)[Γ']`` over stable degree labelings.

    ``curve_graph`` ignores its ``betas`` field.  With ``prestable`` the source
    graph may have unstable genus-0 vertices (used for relations coming from
    prestable curves).
    """
    if not prestable:
        _require_stable(ambient.g, ambient.n)
    shape = StableGraph(curve_graph.genera, ((),) * curve_graph.num_vertices,
                        curve_graph.legs, curve_graph.edges)
    problem = validate(shape, g=ambient.g, n=ambient.n, shapes_only=True)
    if problem:
        raise StabilizationError(problem)
    if not prestable and _curve_stable(shape):
        raise StabilizationError(_curve_stable(shape))
    found = {}
    for betas in enumerate_splittings(ambient.beta, shape.num_vertices):
        gr = StableGraph(shape.genera, tuple(betas), shape.legs, shape.edges)
        if validate(gr) is not None:
            continue
        key, canon, _ = canonical_labeling(gr)
        found.setdefault(key, canon)
    out: dict = {}
    for key in sorted(found):
        gr = found[key]
        add_into(out, make_terms(ambient, gr, [0] * gr.num_half_edges),
                 Fraction(1, automorphism_order(gr)))
    return StrataElement(ambient, out)


def pullback_psi(i: int, ambient: Ambient) -> StrataElement:
    """``st^* psi_i = psi_i - [D_i]``."""
    _require_stable(ambient.g, ambient.n)
    if not 1 <= i <= ambient.n:
        raise StabilizationError(f"leg {i} out of range")
    out = psi_class(ambient, i)
    for gr in D_i_graphs(ambient.g, ambient.n, ambient.beta, i):
        out = out - StrataElement.from_graph(ambient, gr)
    return out


def pullback_kappa1(ambient: Ambient) -> StrataElement:
    """``st^* kappa_1 = kappa_1 + [D]`` with ``D`` the legless genus-0 bubbles."""
    _require_stable(ambient.g, ambient.n)
    out = kappa_class(ambient, 1)
    for gr in D_kappa_graphs(ambient.g, ambient.n, ambient.beta):
        out = out + StrataElement.from_graph(ambient, gr)
    return out


# ---------------------------------------------------------------------------
# shared helpers

def _unpack(term, target):
    legc = [ChowElement.basis(i) for i in term.legc]
    edgec = [ChowElement.basis(i) for i in term.edgec]
    kap = [[(a, ChowElement.basis(i)) for a, i in entries] for entries in term.kappa]
    return list(term.psi), legc, edgec, kap


def _insert_bubble(graph: StableGraph, h: int, v: int):
    """Add leg ``n+1`` on a genus-0 degree-0 bubble attached at half-edge ``h`` of vertex ``v``.

    Returns the new graph, the old->new half-edge map, the new vertex index, the
    index of the new edge, and (for edge half-edges) the index of the outer edge.
    """
    n, ne = graph.n, graph.num_edges
    zero = tuple(0 for _ in graph.betas[v])
    genera = graph.genera + (0,)
    betas = graph.betas + (zero,)
    bub = graph.num_vertices
    legs = list(graph.legs) + [bub]
    edges = list(graph.edges)

    def shift(x):  # old half-edge -> new half-edge (one more leg)
        return x if x < n else x + 1

    hmap = [shift(x) for x in range(graph.num_half_edges)]
    if h < n:
        legs[h] = bub
        edges.append((v, bub))
        new_edge = ne
        outer = None
    else:
        e, s = divmod(h - n, 2)
        a, b = edges[e]
        # old edge now runs bubble -> partner; new edge main -> bubble
        edges[e] = (bub, b) if s == 0 else (a, bub)
        edges.append((v, bub))
        new_edge = ne
        outer = e
    gr = StableGraph(genera, betas, tuple(legs), tuple(edges))
    return gr, hmap, bub, new_edge, outer


def _add_leg(graph: StableGraph, v: int) -> tuple:
    legs = graph.legs + (v,)
    gr = StableGraph(graph.genera, graph.betas, legs, graph.edges)
    n = graph.n
    hmap = [x if x < n else x + 1 for x in range(graph.num_half_edges)]
    return gr, hmap


# ---------------------------------------------------------------------------
# forgetful pullback

def forgetful_pullback(element: StrataElement) -> StrataElement:
    """Pull back along the map forgetting a new last marking ``n+1``."""
    amb = element.ambient
    new_amb = amb.with_n(amb.n + 1)
    tg = amb.target
    out: dict = {}
    for term, coeff in element.items():
        gr = term.graph
        psi, legc, edgec, kap = _unpack(term, tg)
        n = gr.n
        for v in range(gr.num_vertices):
            g2, hmap = _add_leg(gr, v)
            # generic position: kappa corrections -psi_{n+1}^a ev^* alpha
            corr = [j for j, (a, _) in enumerate(kap[v]) if a >= 0]
            for size in range(len(corr) + 1):
                for chosen in itertools.combinations(corr, size):
                    p2 = [0] * g2.num_half_edges
                    for h, e in enumerate(psi):
                        p2[hmap[h]] = e
                    leg_new = tg.unit
                    kap2 = [list(k) for k in kap]
                    kept = [ent for j, ent in enumerate(kap[v]) if j not in chosen]
                    for j in chosen:
                        a, alpha = kap[v][j]
                        p2[n] += a
                        leg_new = chow_product(tg, leg_new, alpha)
                    kap2[v] = kept
                    add_into(out, make_terms(new_amb, g2, p2, legc + [leg_new], edgec, kap2),
                             coeff * (-1) ** size)
            # bubble corrections: -D_h psi^{e-1} on the main side
            for h in gr.half_edges_at(v):
                if psi[h] == 0:
                    continue
                g3, hmap3, bub, new_edge, outer = _insert_bubble(gr, h, v)
                p3 = [0] * g3.num_half_edges
                for x, e in enumerate(psi):
                    if x != h:
                        p3[hmap3[x]] = e
                main_side = g3.n + 2 * new_edge
                p3[main_side] = psi[h] - 1
                edge3 = list(edgec) + [tg.unit]
                kap3 = [list(k) for k in kap] + [[]]
                add_into(out, make_terms(new_amb, g3, p3, legc + [tg.unit], edge3, kap3),
                         -coeff)
    return StrataElement(new_amb, out)


# ---------------------------------------------------------------------------
# forgetful pushforward

def forgetful_pushforward(element: StrataElement) -> StrataElement:
    """Push forward along the map forgetting the last marking."""
    amb = element.ambient
    if amb.n < 1:
        raise StabilizationError("no marking to forget")
    new_amb = amb.with_n(amb.n - 1)
    if is_zero_class(amb.beta) and 2 * amb.g - 2 + amb.n - 1 <= 0:
        raise StabilizationError("target space of the forgetful map is empty")
    out: dict = {}
    for term, coeff in element.items():
        add_into(out, _push_term(new_amb, term), coeff)
    return StrataElement(new_amb, out)


def _push_term(new_amb: Ambient, term) -> dict:
    tg = new_amb.target
    gr = term.graph
    n = gr.n
    last = n - 1
    v = gr.legs[last]
    psi, legc, edgec, kap = _unpack(term, tg)
    degree_zero = is_zero_class(gr.betas[v])
    if degree_zero and gr.genera[v] == 0 and gr.valence(v) == 3:
        return _push_contract(new_amb, term)
    if degree_zero and 2 * gr.genera[v] - 2 + gr.valence(v) - 1 <= 0:
        raise StabilizationError("forgetting the leg leaves an unstable vertex")
    # graph without the last leg
    base = StableGraph(gr.genera, gr.betas, gr.legs[:last], gr.edges)

    def drop(x):  # old half-edge -> new half-edge
        return x if x < last else x - 1

    base_psi = [0] * base.num_half_edges
    for x, e in enumerate(psi):
        if x != last:
            base_psi[drop(x)] = e
    out: dict = {}
    corr = [j for j, (a, _) in enumerate(kap[v]) if a >= 0]
    for size in range(len(corr) + 1):
        for chosen in itertools.combinations(corr, size):
            total = psi[last]
            alpha = legc[last]
            for j in chosen:
                a, al = kap[v][j]
                total += a
                alpha = chow_product(tg, alpha, al)
            if alpha.is_zero():
                continue
            kap2 = [list(k) for k in kap]
            kap2[v] = [ent for j, ent in enumerate(kap[v]) if j not in chosen]
            if total >= 1:
                kap2[v].append((total - 1, alpha))
                add_into(out, make_terms(new_amb, base, base_psi, legc[:last], edgec, kap2))
                continue
            kap_minus = [list(k) for k in kap2]
            kap_minus[v].append((-1, alpha))
            add_into(out, make_terms(new_amb, base, base_psi, legc[:last], edgec, kap_minus))
            for h in base.half_edges_at(v):
                if base_psi[h] == 0:
                    continue
                p2 = list(base_psi)
                p2[h] -= 1
                legs2 = list(legc[:last])
                edges2 = list(edgec)
                if h < base.n:
                    legs2[h] = chow_product(tg, legs2[h], alpha)
                else:
                    e = (h - base.n) // 2
                    edges2[e] = chow_product(tg, edges2[e], alpha)
                add_into(out, make_terms(new_amb, base, p2, legs2, edges2, kap2))
    return out


def _push_contract(new_amb: Ambient, term) -> dict:
    """Forget a leg sitting on a genus-0 degree-0 trivalent vertex, then contract it."""
    tg = new_amb.target
    gr = term.graph
    n = gr.n
    last = n - 1
    v = gr.legs[last]
    at_v = gr.half_edges_at(v)
    if any(term.psi[h] for h in at_v):
        return {}
    factor = ChowElement.basis(term.legc[last])
    for a, i in term.kappa[v]:
        if a != 0:
            return {}
        factor = chow_product(tg, factor, ChowElement.basis(i))
    if factor.is_zero():
        return {}
    h1, h2 = [h for h in at_v if h != last]
    if h1 < n and h2 < n:
        raise StabilizationError("forgetting the leg leaves an unstable space")
    if h1 >= n and gr.partner(h1) == h2:
        raise StabilizationError("forgetting the leg leaves an unstable space")
    psi, legc, edgec, kap = _unpack(term, tg)
    # remove vertex v, leg `last`, and merge h1/h2
    keep_v = [u for u in range(gr.num_vertices) if u != v]
    vpos = {u: i for i, u in enumerate(keep_v)}
    new_legs = []
    new_legc = []
    new_edges = []
    new_edgec = []
    psi_of = {}  # (kind, index, side) -> exponent
    leg_psi = []
    removed_edges = {(h - n) // 2 for h in (h1, h2) if h >= n}
    # legs other than `last`
    for i in range(n - 1):
        if i in (h1, h2):
            other = h2 if i == h1 else h1
            partner = gr.partner(other)
            new_legs.append(vpos[gr.vertex_of(partner)])
            cls = chow_product(tg, legc[i], factor)
            cls = chow_product(tg, cls, edgec[(other - n) // 2])
            new_legc.append(cls)
            leg_psi.append(psi[partner] + psi[i])
        else:
            new_legs.append(vpos[gr.legs[i]])
            new_legc.append(legc[i])
            leg_psi.append(psi[i])
    edge_psi = []
    for e, (a, b) in enumerate(gr.edges):
        if e in removed_edges:
            continue
        new_edges.append((vpos[a], vpos[b]))
        new_edgec.append(edgec[e])
        edge_psi.extend([psi[n + 2 * e], psi[n + 2 * e + 1]])
    if h1 >= n and h2 >= n:
        p1, p2 = gr.partner(h1), gr.partner(h2)
        new_edges.append((vpos[gr.vertex_of(p1)], vpos[gr.vertex_of(p2)]))
        cls = chow_product(tg, edgec[(h1 - n) // 2], edgec[(h2 - n) // 2])
        new_edgec.append(chow_product(tg, cls, factor))
        edge_psi.extend([psi[p1], psi[p2]])
    new_graph = StableGraph(tuple(gr.genera[u] for u in keep_v), tuple(gr.betas[u] for u in keep_v),
                            tuple(new_legs), tuple(new_edges))
    new_kap = [kap[u] for u in keep_v]
    return make_terms(new_amb, new_graph, leg_psi + edge_psi, new_legc, new_edgec, new_kap)


def forget_leg(element: StrataElement, i: int) -> StrataElement:
    """Push forward along the map forgetting leg ``i``; later legs shift down by one."""
    from .algebra import relabel_legs
    n = element.ambient.n
    if not 1 <= i <= n:
        raise StabilizationError(f"leg {i} out of range")
    perm = {j: j for j in range(1, n + 1)}
    # move leg i to the end, keep the order of the others
    for j in range(i + 1, n + 1):
        perm[j] = j - 1
    perm[i] = n
    return forgetful_pushforward(relabel_legs(element, perm))
