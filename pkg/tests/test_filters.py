import numpy as np
import pytest
from hypothesis import given, strategies as st

from ddspec import InvalidArgumentError, filter_cpmg_closed, filter_cpmg_sinc, filter_exact, make_cpmg, make_uhrig
from ddspec.filters import default_sinc_terms, evaluate, filter_exact_u, peak_frequencies

from oracles import cpmg_fractions_mp, filter_mp


def test_echo_value_at_two_pi():
    assert abs(filter_exact(make_cpmg(1, 1.0), 2 * np.pi) - 4 / np.pi**2) < 1e-12
    assert abs(filter_cpmg_closed(1, 2 * np.pi) - 4 / np.pi**2) < 1e-12


def test_ramsey_limits():
    seq = make_cpmg(0, 1.0)
    assert filter_exact(seq, 0.0) == 1.0
    u = np.array([1e-6, 0.3, 2.0, 7.5, 100.0])
    np.testing.assert_allclose(filter_exact(seq, u), np.sinc(u / 2 / np.pi) ** 2, rtol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 8, 20])
def test_exact_against_mpmath(N):
    u = np.concatenate([[0.0, 1e-7, 5e-5, 0.3], np.linspace(1, 40 * N * np.pi, 37)])
    ref = np.array([filter_mp(cpmg_fractions_mp(N), x) for x in u])
    got = filter_exact(make_cpmg(N, 1.0), u)
    np.testing.assert_allclose(got, ref, rtol=1e-9, atol=1e-18)


def test_uhrig_against_mpmath():
    seq = make_uhrig(6, 1.0)
    u = np.linspace(0.01, 200, 23)
    ref = [filter_mp(seq.pulse_times, x) for x in u]
    np.testing.assert_allclose(filter_exact(seq, u), ref, rtol=1e-9, atol=1e-18)


@given(st.integers(1, 20), st.floats(1e-3, 1.0))
def test_closed_equals_exact(N, frac):
    u = frac * 40 * N * np.pi
    exact = filter_exact(make_cpmg(N, 1.0), u)
    closed = filter_cpmg_closed(N, u)
    assert abs(closed - exact) / max(exact, 1e-15) <= 1e-9


@pytest.mark.parametrize("N", [1, 3, 10])
@pytest.mark.parametrize("k", [0, 1, 5])
def test_closed_form_at_removable_singularity(N, k):
    u = (2 * k + 1) * N * np.pi
    ref = filter_mp(cpmg_fractions_mp(N), u)
    assert filter_cpmg_closed(N, u) == pytest.approx(ref, rel=1e-9)
    assert filter_cpmg_closed(N, u * (1 + 3e-4)) == pytest.approx(filter_mp(cpmg_fractions_mp(N), u * (1 + 3e-4)), rel=1e-9)


@given(st.integers(0, 12), st.floats(0, 500), st.floats(0.01, 100))
def test_scale_invariance(N, omega, c):
    a = filter_exact(make_cpmg(N, 1.0), omega)
    b = filter_exact(make_cpmg(N, c), omega / c)
    assert b == pytest.approx(a, rel=1e-9, abs=1e-16)


@given(st.integers(1, 20), st.lists(st.floats(0, 2000), min_size=1, max_size=20))
def test_non_negative(N, u):
    u = np.asarray(u)
    assert np.all(filter_exact(make_cpmg(N, 1.0), u) >= 0)
    assert np.all(filter_cpmg_closed(N, u) >= 0)
    assert np.all(filter_cpmg_sinc(N, u, 50) >= 0)


def test_sinc_converges_with_N():
    def sup_err(N):
        u = np.linspace(0.5 * N * np.pi, 1.5 * N * np.pi, 2001)
        return np.max(np.abs(filter_cpmg_sinc(N, u) - filter_exact(make_cpmg(N, 1.0), u)))
    assert sup_err(16) < sup_err(4)


def test_default_sinc_terms():
    k = default_sinc_terms()
    assert 4 / ((2 * k + 3) * np.pi) ** 2 < 1e-6
    assert 4 / ((2 * k + 1) * np.pi) ** 2 >= 1e-6


def test_small_u_branch_is_continuous():
    fr = make_cpmg(3, 1.0).fractions
    a = filter_exact_u(fr, 0.99e-4)
    b = filter_exact_u(fr, 1.01e-4)
    ref = filter_mp(cpmg_fractions_mp(3), 1e-4)
    assert a == pytest.approx(ref, rel=1e-6)
    assert b == pytest.approx(ref, rel=1e-6)


def test_peak_frequencies():
    assert peak_frequencies(10, 0.05, 0)[0] == pytest.approx(10 * np.pi / 0.05)
    np.testing.assert_allclose(peak_frequencies(1, 1.0, 1), [np.pi, 3 * np.pi])
    assert peak_frequencies(8, 0.12, 1)[1] == pytest.approx(2 * np.pi * 100, rel=1e-12)


def test_evaluate_records():
    rec = evaluate(make_cpmg(2, 0.1), [0.0, 10.0], "closed")
    assert [r.variant.value for r in rec] == ["closed", "closed"]
    with pytest.raises(InvalidArgumentError):
        evaluate(make_uhrig(3, 0.1), [1.0], "sinc")
    with pytest.raises(ValueError):
        evaluate(make_cpmg(2, 0.1), [1.0], "bogus")
