"""Random decorated terms for property tests."""
import random
from fractions import Fraction

from stablemaps.algebra import Ambient, StrataElement, make_terms
from stablemaps.graphs import StableGraph, enumerate_graphs
from stablemaps.target import ChowElement


def random_decoration(rng, amb, graph, budget):
    tg = amb.target
    nh = graph.num_half_edges
    psi = [0] * nh
    legc = [tg.unit] * graph.n
    edgec = [tg.unit] * graph.num_edges
    kappa = [[] for _ in range(graph.num_vertices)]
    for _ in range(rng.randint(0, budget)):
        kind = rng.random()
        if kind < 0.5 and nh:
            psi[rng.randrange(nh)] += 1
        elif kind < 0.7 and graph.n and tg.rank > 1:
            legc[rng.randrange(graph.n)] = ChowElement.basis(1)
        elif kind < 0.8 and graph.num_edges and tg.rank > 1:
            edgec[rng.randrange(graph.num_edges)] = ChowElement.basis(1)
        else:
            alpha = ChowElement.basis(rng.randrange(tg.rank))
            kappa[rng.randrange(graph.num_vertices)].append((rng.choice((0, 1)), alpha))
    return psi, legc, edgec, kappa


def random_element(rng, amb, max_edges=2, nterms=2, budget=2):
    graphs = enumerate_graphs(amb.g, amb.n, amb.beta, max_edges)
    acc = StrataElement.zero(amb)
    for _ in range(nterms):
        gr = rng.choice(graphs)
        psi, legc, edgec, kappa = random_decoration(rng, amb, gr, budget)
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        acc = acc + StrataElement(amb, make_terms(amb, gr, psi, legc, edgec, kappa, c))
    return acc


def relabel_raw(rng, graph, psi, legc, edgec, kappa):
    """Same decorated graph written with shuffled vertices, edges and edge sides."""
    nv, ne, n = graph.num_vertices, graph.num_edges, graph.n
    sigma = list(range(nv))
    rng.shuffle(sigma)
    tau = list(range(ne))
    rng.shuffle(tau)
    flip = [rng.random() < 0.5 for _ in range(ne)]
    genera = [0] * nv
    betas = [None] * nv
    for v in range(nv):
        genera[sigma[v]] = graph.genera[v]
        betas[sigma[v]] = graph.betas[v]
    legs = tuple(sigma[v] for v in graph.legs)
    edges = [None] * ne
    new_psi = list(psi[:n]) + [0] * (2 * ne)
    new_edgec = [None] * ne
    for e, (a, b) in enumerate(graph.edges):
        ends = (sigma[a], sigma[b])
        if flip[e]:
            ends = ends[::-1]
        edges[tau[e]] = ends
        new_edgec[tau[e]] = edgec[e]
        for s in (0, 1):
            t = s ^ flip[e]
            new_psi[n + 2 * tau[e] + t] = psi[n + 2 * e + s]
    new_kappa = [None] * nv
    for v in range(nv):
        new_kappa[sigma[v]] = list(kappa[v])
    gr = StableGraph(tuple(genera), tuple(betas), legs, tuple(edges))
    return gr, new_psi, list(legc), new_edgec, new_kappa
