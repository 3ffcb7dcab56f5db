import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmlab import degseq
from cmlab.errors import InfeasibleTargets, OddTotalDegree, ZeroOrNegativeDegree


def test_validate_tallies_counts():
    s = degseq.validate([2, 2])
    assert (s.n, s.ell) == (2, 4)
    assert s.counts == {2: 2}

    s = degseq.validate([1, 1, 2])
    assert (s.n, s.ell) == (3, 4)
    assert s.counts == {1: 2, 2: 1}


def test_validate_rejects_odd_total():
    with pytest.raises(OddTotalDegree):
        degseq.validate([1, 2])


def test_validate_rejects_zero_degree():
    with pytest.raises(ZeroOrNegativeDegree):
        degseq.validate([0, 2, 2])
    with pytest.raises(ZeroOrNegativeDegree):
        degseq.validate([-1, 1])
    with pytest.raises(ZeroOrNegativeDegree):
        degseq.validate([])
    with pytest.raises(ZeroOrNegativeDegree):
        degseq.validate([1.5, 2.5])


def test_window_params_hand_example():
    s = degseq.from_counts({1: 10, 2: 30, 3: 60})
    w = degseq.window_params(s)
    assert w.rho1_n == pytest.approx(1.0)
    assert w.p2_n == pytest.approx(0.3)
    assert w.d_n == pytest.approx(2.5)
    assert w.nu_n == pytest.approx(1.68)


@pytest.mark.parametrize(
    "raw,expect",
    [
        ([2, 2], (0.0, 1.0, 2.0, 1.0)),
        ([1, 1], (math.sqrt(2), 0.0, 1.0, 0.0)),
    ],
)
def test_window_params_trivial(raw, expect):
    w = degseq.window_params(degseq.validate(raw))
    assert (w.rho1_n, w.p2_n, w.d_n, w.nu_n) == pytest.approx(expect)


def test_window_nu_is_exact_rational():
    s = degseq.from_counts({1: 4, 2: 7, 3: 4, 5: 2})
    w = degseq.window_params(s)
    second = Fraction(4 * 0 + 7 * 2 + 4 * 6 + 2 * 20, s.ell)
    assert w.nu_n == float(second)


def test_build_sequence_examples():
    s = degseq.build_sequence(100, 1.0, 0.3, 3)
    assert s.counts == {1: 10, 2: 30, 3: 60}
    assert s.ell == 250

    s = degseq.build_sequence(4, 0, 0, 3)
    assert s.counts == {3: 4}
    assert s.ell == 12

    with pytest.raises(InfeasibleTargets):
        degseq.build_sequence(3, 2.0, 0.9, 3)


def test_build_sequence_parity_repair():
    # n1=1, n2=0, bulk 3x3: total 10 even; with n=5 -> 1 + 4*3 = 13 odd
    s = degseq.build_sequence(5, 0.45, 0.0, 3)
    assert s.ell % 2 == 0
    assert s.counts[4] == 1  # exactly one bulk vertex bumped
    assert sum(s.counts.values()) == 5


def test_build_sequence_parity_unrepairable():
    # all vertices are degree 1 or 2; odd total cannot be fixed by a bulk bump
    with pytest.raises(InfeasibleTargets):
        degseq.build_sequence(9, 3.0, 0.0, 3)  # n1 = 9 = n, ell = 9 odd


def test_build_recovers_targets():
    for n in (100, 1000, 40000):
        s = degseq.build_sequence(n, 1.0, 0.3, 3)
        w = degseq.window_params(s)
        assert abs(w.rho1_n - 1.0) <= 1.0 / math.sqrt(n)
        assert abs(w.p2_n - 0.3) <= 1.0 / n


def test_to_limit_params_copies_and_caps():
    w = degseq.WindowParams(1.0, 0.3, 2.7, 1.7778)
    p = degseq.to_limit_params(w)
    assert (p.rho1, p.p2, p.d, p.nu) == (1.0, 0.3, 2.7, 1.7778)

    w = degseq.WindowParams(0.0, 0.0, 3.0, 2.0)
    p = degseq.to_limit_params(w)
    assert (p.rho1, p.p2, p.d, p.nu) == (0.0, 0.0, 3.0, 2.0)

    capped = degseq.to_limit_params(degseq.WindowParams(0.0, 0.0, 3.0, 1e9))
    assert math.isinf(capped.nu)


def test_degenerate_params_flagged_at_use_site():
    # 2*p2 >= d passes through; the theory module is the enforcement point
    p = degseq.to_limit_params(degseq.WindowParams(0.0, 0.5, 1.0, 0.5))
    assert 2 * p.p2 >= p.d


def test_parse_degrees_mixed_lines():
    text = "# comment\n3\n3\n1 2\n\n2 4\n"
    s = degseq.parse_degrees(text)
    assert s.counts == {1: 2, 2: 4, 3: 2}


def test_file_round_trip(tmp_path):
    s = degseq.from_counts({1: 4, 2: 5, 3: 8, 7: 2})
    path = tmp_path / "degrees.txt"
    degseq.dump_degrees(s, path)
    again = degseq.load_degrees(path)
    assert again == s
    assert again.counts == s.counts


@st.composite
def degree_sequences(draw, max_n=40, max_degree=6):
    degs = draw(
        st.lists(st.integers(1, max_degree), min_size=1, max_size=max_n)
    )
    if sum(degs) % 2 != 0:
        degs.append(1)
    return degs


@settings(max_examples=60, deadline=None)
@given(degree_sequences())
def test_serialize_parse_identity(raw):
    s = degseq.validate(raw)
    again = degseq.parse_degrees(degseq.format_degrees(s))
    # the run-length file format orders vertices by degree, so the
    # round-trip identity is on the counts representation
    assert again.counts == s.counts
    assert (again.n, again.ell) == (s.n, s.ell)


@settings(max_examples=60, deadline=None)
@given(degree_sequences())
def test_validate_invariants(raw):
    s = degseq.validate(raw)
    assert s.ell % 2 == 0
    assert sum(d * m for d, m in s.counts.items()) == s.ell
    assert sum(s.counts.values()) == s.n
    assert int(np.min(s.degrees)) >= 1
