from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinorefimov.errors import InvalidArgumentError
from spinorefimov.interaction import ScatteringLengths, pair_operator
from spinorefimov.meanfield import (
    alpha_2b,
    alpha_2b_coefficients,
    alpha_3b,
    alpha_3b_coefficients,
    combination_to_text,
    couplings,
    dominance_report,
    lengths_from_alpha_2b,
    lengths_from_alpha_3b,
    mean_field_set,
    pair_eigenvalue,
    pair_operator_from_alpha,
    symmetric_triples,
    triple_eigenvalue,
    vandermonde_inverse,
)

RATIONAL = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)


@pytest.mark.parametrize("f,F2b,value", [(1, 2, 1), (1, 0, -2), (2, 4, 4)])
def test_pair_eigenvalues(f, F2b, value):
    assert pair_eigenvalue(f, F2b) == value


@pytest.mark.parametrize("f,F3b,value", [(1, 3, 3), (1, 1, -2), (2, 6, 12)])
def test_triple_eigenvalues(f, F3b, value):
    assert triple_eigenvalue(f, F3b) == value


def test_symmetric_triples():
    assert symmetric_triples(1) == (1, 3)
    assert symmetric_triples(2) == (0, 2, 3, 4, 6)


def test_vandermonde_inverse_exact():
    nodes = [Fr(-2), Fr(1), Fr(5, 3)]
    inv = vandermonde_inverse(nodes)
    for i, x in enumerate(nodes):
        for k in range(3):
            assert sum(inv[n][k] * x**n for n in range(3)) == (1 if i == k else 0)


@pytest.mark.criterion(7)
@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.lists(RATIONAL, min_size=4, max_size=4))
def test_two_body_round_trip(f, vals):
    a = dict(zip(range(0, 2 * f + 1, 2), vals))
    assert lengths_from_alpha_2b(f, alpha_2b(f, a)) == a


@pytest.mark.criterion(7)
@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.lists(RATIONAL, min_size=7, max_size=7))
def test_three_body_round_trip(f, vals):
    a3 = dict(zip(symmetric_triples(f), vals))
    assert lengths_from_alpha_3b(f, alpha_3b(f, a3)) == a3


def test_float_inputs_convert_exactly():
    assert alpha_2b(2, (0.1, 0.1, 0.1))[1:] == [0, 0]


def test_equal_lengths_give_no_exchange():
    for f in (1, 2, 3):
        assert all(x == 0 for x in alpha_2b(f, [Fr(7, 3)] * (f + 1))[1:])


@pytest.mark.parametrize("f", [1, 2, 3])
def test_operator_identity(f):
    # the expansion is fixed on the exchange-symmetric (even F2b) pair states only
    a = ScatteringLengths(tuple(np.linspace(-1.5, 2.5, f + 1)))
    n = 2 * f + 1
    swap = np.eye(n * n).reshape(n, n, n, n).transpose(0, 1, 3, 2).reshape(n * n, n * n)
    sym = 0.5 * (np.eye(n * n) + swap)
    lhs = sym @ pair_operator_from_alpha(f, alpha_2b(f, a)) @ sym
    assert np.allclose(lhs, pair_operator(f, a), atol=1e-10)


def test_complex_three_body_lengths_propagate():
    a3 = {1: 2 + 1j, 3: -1 + 0.5j}
    al = alpha_3b(1, a3)
    assert al[1] == pytest.approx((a3[3] - a3[1]) / 5)
    g2, g3 = couplings(alpha_2b(1, (1.23, 1.21)), al)
    report = dominance_report(1e-6, g2, g3).to_dict()
    assert set(report["three_body_energies"][1]) == {"abs", "phase"}


def test_three_body_keys_checked():
    with pytest.raises(InvalidArgumentError):
        alpha_3b(1, {1: 1.0})


def test_couplings():
    g2, g3 = couplings([1], [1], 1.0)
    assert g2[0] == pytest.approx(4 * np.pi)
    assert g3[0] == pytest.approx(12 * np.sqrt(3) * np.pi)
    g2h, g3h = couplings([1], [1], 2.0)
    assert g2h[0] == pytest.approx(g2[0] / 2) and g3h[0] == pytest.approx(g3[0] / 2)
    with pytest.raises(InvalidArgumentError):
        couplings([1], [1], 0.0)


def test_rb87_exchange_term_and_phase():
    al = alpha_2b(1, (1.23, 1.21))
    assert float(al[1]) == pytest.approx((1.21 - 1.23) / 3, rel=1e-12)
    g2, _ = couplings(al, [])
    assert dominance_report(1e-6, g2, []).phase == "antiferromagnetic"


def test_dominance_rules():
    assert dominance_report(1.0, [0.0, 1.0], [0.0, 0.0]).dominant is False
    r = dominance_report(10.0, [0.0, -1.0], [0.0, 1.0])
    assert r.dominant and r.opposite_sign and r.phase == "antiferromagnetic"
    assert dominance_report(0.01, [0.0, 1.0], [0.0, 1.0]).dominant is False


def test_mean_field_set_marks_f3_three_body_provenance():
    s = mean_field_set(3, (1.0, 2.0, 3.0, 4.0), {F: 1.0 for F in symmetric_triples(3)})
    assert "alpha3b" in s.provenance
    assert len(s.alpha2b) == 4 and len(s.alpha3b) == len(symmetric_triples(3))


def test_combination_text():
    assert combination_to_text(alpha_2b_coefficients(1)[1]) == "-1/3*a0 + 1/3*a2"
    assert len(alpha_3b_coefficients(2)) == 5
