import itertools
from fractions import Fraction

import pytest

from stablemaps.algebra import StrataElement
from stablemaps.dr import (DRError, DRRequest, check_dr_data, compute_P_d_r, compute_P_d_symbolic,
                          dr_relation_parts, enumerate_weightings, eval_poly, extract_coefficient,
                          interpolate_in_r, is_weighting, lagrange_coefficients,
                          m_graded_parts_by_scaling)
from stablemaps.graphs import StableGraph, enumerate_graphs
from stablemaps.target import make_point_target, make_projective_space

P1 = make_projective_space(1, 1)
PT = make_point_target()


def evaluate_at(P, values):
    """Substitute numbers for a_1..a_{n-1} in every coefficient."""
    out = {}
    for t, c in P.terms.items():
        if isinstance(c, Fraction):
            out[t] = c
        else:
            q = c(*values)
            out[t] = Fraction(int(q.numerator), int(q.denominator))
    return StrataElement(P.ambient, out)


def test_loop_graph_has_r_weightings():
    loop = StableGraph((0,), ((1,),), (0,), ((0, 0),))
    ws = enumerate_weightings(loop, 7, (1,), 0, P1)
    assert len(ws) == 7
    assert {w.w[1] for w in ws} == set(range(7))


@pytest.mark.parametrize("r", [3, 5])
def test_enumerated_weightings_are_exactly_the_valid_ones(r):
    for gr in enumerate_graphs(1, 2, (1,), 2):
        A = (0, 1)
        found = {w.w for w in enumerate_weightings(gr, r, A, 0, P1)}
        nh = gr.num_half_edges
        brute = {w for w in itertools.product(range(r), repeat=nh)
                 if is_weighting(gr, w, r, A, 0, P1)}
        assert found == brute


def test_lagrange_is_exact():
    xs = [2, 3, 5, 7]
    poly = [Fraction(1, 3), -2, 0, Fraction(5, 7)]
    ys = [eval_poly(poly, x) for x in xs]
    assert lagrange_coefficients(xs, ys) == poly


@pytest.mark.parametrize("req,fragment", [
    (DRRequest(0, 2, P1, (2,), 0, 1, (1, 0)), "sum of A"),
    (DRRequest(0, 2, P1, (1,), 0, 5, (1, 0)), "exceeds vdim"),
    (DRRequest(0, 2, P1, (1,), 0, 1, (1,)), "ramification entries"),
])
def test_bad_requests(req, fragment):
    assert fragment in check_dr_data(req)
    with pytest.raises(DRError):
        interpolate_in_r(req)


def test_symbolic_specializes_to_numeric():
    P = compute_P_d_symbolic(0, 2, P1, (2,), 0, 1)
    for a1 in (-1, 0, 1, 2, 5):
        numeric = interpolate_in_r(DRRequest(0, 2, P1, (2,), 0, 1, (a1, 2 - a1)))
        assert evaluate_at(P, (a1,)) == numeric


def test_symbolic_specializes_genus_one():
    P = compute_P_d_symbolic(1, 2, P1, (1,), 0, 2)
    for a1 in (0, 3):
        numeric = interpolate_in_r(DRRequest(1, 2, P1, (1,), 0, 2, (a1, 1 - a1)))
        assert evaluate_at(P, (a1,)) == numeric


def test_monomial_parts_reassemble():
    P = compute_P_d_symbolic(0, 3, P1, (1,), 0, 1)
    parts = dr_relation_parts(P)
    for a in ((0, 0), (1, 2), (-1, 3)):
        total = StrataElement.zero(P.ambient)
        for mono, el in parts.items():
            w = 1
            for x, e in zip(a, mono):
                w *= x ** e
            total = total + el.scale(w)
        assert total == evaluate_at(P, a)


def test_m_parts_sum_to_relation():
    parts = m_graded_parts_by_scaling(1, 1, P1, (1,), 2)
    whole = compute_P_d_symbolic(1, 1, P1, (1,), 0, 2)
    total = StrataElement.zero(whole.ambient)
    for el in parts.values():
        total = total + el
    assert total == whole
    assert set(parts) <= {0, 2, 4}


def test_relation_is_constant_in_r_after_fit():
    req = DRRequest(1, 1, P1, (1,), 0, 1, (1,))
    el, fits, moduli, checks = interpolate_in_r(req, return_fits=True)
    assert StrataElement(req.ambient, {t: c[0] for t, c in fits.items() if c[0]}) == el
    # at a single modulus the raw sum is not the relation
    assert compute_P_d_r(req, moduli[0]) != el or all(len(c) == 1 for c in fits.values())


def test_point_target_genus_zero_relation_is_nonzero_formally():
    P = compute_P_d_symbolic(0, 4, PT, (), 0, 1)
    assert not P.is_zero()
    assert {d for d in P.degrees()} == {1}
