import itertools
import random

import pytest

from stablemaps.graphs import (GraphError, StableGraph, automorphism_order, canonical,
                               canonical_labeling, contract_edges, enumerate_graphs, first_betti,
                               graph_from_doc, graph_to_doc, is_isomorphic, validate)

from strata_random import relabel_raw


def brute_aut(gr):
    """Half-edge permutations preserving every structure, by exhaustion."""
    nv, ne = gr.num_vertices, gr.num_edges
    count = 0
    edges = list(gr.edges)
    for sigma in itertools.permutations(range(nv)):
        if any(gr.genera[sigma[v]] != gr.genera[v] or gr.betas[sigma[v]] != gr.betas[v]
               for v in range(nv)):
            continue
        if any(sigma[v] != v for v in gr.legs):
            continue
        for tau in itertools.permutations(range(ne)):
            for flips in itertools.product((0, 1), repeat=ne):
                ok = True
                for e, (a, b) in enumerate(edges):
                    img = (sigma[a], sigma[b])
                    if flips[e]:
                        img = img[::-1]
                    if img != edges[tau[e]]:
                        ok = False
                        break
                count += ok
    return count


def shuffled(rng, gr):
    nh = gr.num_half_edges
    g2, *_ = relabel_raw(rng, gr, [0] * nh, [], [None] * gr.num_edges,
                         [[] for _ in range(gr.num_vertices)])
    return g2


CASES = [(1, 1, (2,), 2), (0, 3, (2,), 2), (1, 2, (1,), 2), (2, 0, (), 3), (0, 4, (), 2),
         (1, 1, (), 3)]


@pytest.mark.parametrize("g,n,beta,me", CASES)
def test_automorphisms_match_brute_force(g, n, beta, me):
    for gr in enumerate_graphs(g, n, beta, me):
        assert automorphism_order(gr) == brute_aut(gr), gr


@pytest.mark.parametrize("g,n,beta,me", CASES)
def test_enumeration_is_complete_and_irredundant(g, n, beta, me):
    graphs = enumerate_graphs(g, n, beta, me)
    keys = [canonical_labeling(gr)[0] for gr in graphs]
    assert len(set(keys)) == len(keys)
    for gr in graphs:
        assert validate(gr, g=g, n=n) is None
        assert gr.genus == g and gr.num_edges <= me


@pytest.mark.parametrize("g,n,beta,me", CASES)
def test_canonical_form_invariant_under_relabeling(g, n, beta, me):
    rng = random.Random(7)
    for gr in enumerate_graphs(g, n, beta, me):
        for _ in range(3):
            other = shuffled(rng, gr)
            assert canonical(other) == canonical(gr)
            assert is_isomorphic(other, gr)


def test_known_counts():
    # M_{1,1}: smooth, irreducible node
    assert len(enumerate_graphs(1, 1, (), 1)) == 2
    # M_{0,4}: smooth plus three boundary divisors
    assert len(enumerate_graphs(0, 4, (), 1)) == 4
    # M_{2,0}: seven strata in total
    assert len(enumerate_graphs(2, 0, (), 3)) == 7
    assert len(enumerate_graphs(1, 2, (), 2, shapes_only=True)) == 26


def test_loop_automorphism_is_two():
    loop = StableGraph((0,), ((),), (0,), ((0, 0),))
    assert automorphism_order(loop) == 2
    banana = StableGraph((0, 0), ((), ()), (0,), ((0, 1), (0, 1)))
    assert automorphism_order(banana) == 2


def test_unstable_rejected():
    bad = StableGraph((0,), ((0,),), (0, 0), ())
    assert validate(bad) is not None
    ok = StableGraph((0,), ((1,),), (0, 0), ())
    assert validate(ok) is None


def test_contract_all_edges_gives_trivial_graph():
    for gr in enumerate_graphs(1, 2, (2,), 2):
        c = contract_edges(gr, [])
        assert c.num_vertices == 1 and c.genus == 1 and c.beta == (2,)
        assert first_betti(c) == 0


def test_doc_round_trip():
    for gr in enumerate_graphs(1, 2, (1,), 2):
        assert graph_from_doc(graph_to_doc(gr)) == gr
    with pytest.raises(GraphError):
        graph_from_doc({"genera": "x"})
