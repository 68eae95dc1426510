import random
from fractions import Fraction

import pytest

from stablemaps.algebra import (AlgebraError, Ambient, StrataElement, edge_psi_sum,
                                element_from_doc, element_to_doc, eta_class, glue_along_graph,
                                graph_class, kappa_class, make_terms, multiply, psi_class,
                                relabel_legs, term_degree, to_latex, to_text, xi_class)
from stablemaps.dr import coefficient_ring, compute_P_d_symbolic, symbol_names
from stablemaps.graphs import StableGraph, trivial_graph
from stablemaps.target import make_point_target, make_projective_space

from strata_random import random_element

P1 = make_projective_space(1, 1)
PT = make_point_target()


def only_degree(el):
    degs = el.degrees()
    assert len(degs) == 1
    return degs.pop()


def sep(legs_left, n, g=(0, 0), betas=((), ())):
    legs = tuple(0 if i + 1 in legs_left else 1 for i in range(n))
    return StableGraph(g, betas, legs, ((0, 1),))


def test_degree_examples():
    amb = Ambient(1, 1, (1,), P1)
    assert only_degree(StrataElement.fundamental(amb)) == 0
    assert only_degree(eta_class(Ambient(1, 1, (2,), make_projective_space(2, 1)))) == 1
    one_edge = sep({1}, 1, g=(1, 0), betas=((0,), (1,)))
    psi = [0, 1, 0]
    el = StrataElement.from_graph(amb, one_edge, psi=psi)
    assert only_degree(el) == 2


def test_kappa_minus_one_normalization():
    amb = Ambient(0, 2, (3,), P1)
    assert kappa_class(amb, -1).is_zero()
    assert kappa_class(amb, -1, P1.element("H")) == StrataElement.fundamental(amb).scale(3)


def test_terms_above_vdim_dropped():
    amb = Ambient(1, 1, (), PT)   # vdim 1
    assert psi_class(amb, 1, 2).is_zero()
    assert not psi_class(amb, 1, 1).is_zero()


def test_self_intersection_is_minus_edge_psi():
    amb = Ambient(0, 5, (), PT)
    D = sep({1, 2}, 5)
    assert multiply(graph_class(amb, D), graph_class(amb, D)) == -edge_psi_sum(amb, D, 0)


def test_transverse_and_disjoint_divisors():
    amb = Ambient(0, 5, (), PT)
    d12 = graph_class(amb, sep({1, 2}, 5))
    d34 = graph_class(amb, sep({3, 4}, 5))
    d13 = graph_class(amb, sep({1, 3}, 5))
    chain = StableGraph((0, 0, 0), ((), (), ()), (0, 0, 2, 2, 1), ((0, 1), (1, 2)))
    assert multiply(d12, d34) == graph_class(amb, chain)
    assert multiply(d12, d13).is_zero()


def test_psi_times_boundary_decorates_leg():
    amb = Ambient(0, 5, (), PT)
    D = sep({1, 2}, 5)
    psi = [1, 0, 0, 0, 0, 0, 0]
    assert multiply(psi_class(amb, 1), graph_class(amb, D)) == StrataElement.from_graph(amb, D, psi=psi)


def test_unit_and_mismatch():
    amb = Ambient(1, 2, (1,), P1)
    rng = random.Random(3)
    x = random_element(rng, amb)
    assert multiply(StrataElement.fundamental(amb), x) == x
    with pytest.raises(AlgebraError):
        x + StrataElement.fundamental(Ambient(1, 2, (2,), P1))


def test_xi_squared_vanishes_on_p1():
    amb = Ambient(0, 3, (2,), P1)
    assert multiply(xi_class(amb, 1), xi_class(amb, 1)).is_zero()
    assert not multiply(xi_class(amb, 1), xi_class(amb, 2)).is_zero()


def test_relabel_is_an_action():
    amb = Ambient(0, 3, (2,), P1)
    rng = random.Random(11)
    for _ in range(20):
        x = random_element(rng, amb, budget=2)
        s = {1: 2, 2: 3, 3: 1}
        s_inv = {2: 1, 3: 2, 1: 3}
        assert relabel_legs(relabel_legs(x, s), s_inv) == x
        assert relabel_legs(x, {1: 1, 2: 2, 3: 3}) == x
    with pytest.raises(AlgebraError):
        relabel_legs(x, {1: 2})


def test_glue_fundamental_is_graph_class():
    amb = Ambient(1, 2, (1,), P1)
    D = sep({1}, 2, g=(0, 1), betas=((1,), (0,)))
    assert glue_along_graph(amb, D, {}) == graph_class(amb, D)


def test_document_round_trip_numeric():
    rng = random.Random(5)
    for amb in (Ambient(1, 2, (1,), P1), Ambient(0, 4, (), PT)):
        for _ in range(10):
            x = random_element(rng, amb, budget=2)
            assert element_from_doc(element_to_doc(x), amb.target) == x


def test_document_round_trip_symbolic():
    P = compute_P_d_symbolic(0, 2, P1, (2,), 0, 1)
    names = symbol_names(2)
    doc = element_to_doc(P, names)
    assert element_from_doc(doc, P1, coefficient_ring(names)) == P


def test_renderers():
    amb = Ambient(1, 1, (1,), P1)
    x = psi_class(amb, 1) - xi_class(amb, 1).scale(Fraction(1, 2))
    assert "psi" in to_text(x)
    tex = to_latex(x)
    assert "\\psi" in tex and "\u2014" not in tex
