import numpy as np
import pytest
from hypothesis import given, strategies as st

from ddspec import (
    DataValidationError,
    Family,
    InvalidArgumentError,
    make_cpmg,
    make_custom,
    make_ramsey,
    make_uhrig,
    toggling_sign,
)
from ddspec.sequences import parse_sequence_spec, read_sequence_file, write_sequence_file

T_values = st.floats(1e-4, 1e3)


def test_cpmg_examples():
    assert make_cpmg(1, 1.0).pulse_times == (0.5,)
    seq = make_cpmg(10, 0.05)
    assert seq.n_pulses == 10
    assert seq.pulse_times[0] == pytest.approx(0.0025, rel=1e-15)
    assert make_cpmg(0, 1.0).family is Family.RAMSEY


def test_uhrig_matches_trig_oracle():
    times = make_uhrig(3, 1.0).pulse_times
    oracle = [np.sin(np.pi / 8) ** 2, 0.5, np.sin(3 * np.pi / 8) ** 2]
    np.testing.assert_allclose(times, oracle, rtol=0, atol=1e-15)
    np.testing.assert_allclose(times, [0.1464466, 0.5, 0.8535534], atol=1e-7)


@pytest.mark.parametrize("N", [1, 2])
def test_cpmg_and_uhrig_coincide_for_small_N(N):
    assert make_cpmg(N, 0.37).pulse_times == make_uhrig(N, 0.37).pulse_times


@given(st.integers(1, 64), T_values, st.sampled_from(["cpmg", "uhrig"]))
def test_generated_times_strictly_increasing_interior(N, T, family):
    seq = parse_sequence_spec(f"{family}:{N}", T)
    t = np.asarray(seq.pulse_times)
    assert len(t) == N
    assert np.all(np.diff(t) > 0)
    assert t[0] > 0 and t[-1] < T


@given(st.integers(1, 64), T_values)
def test_toggling_sign_has_zero_mean_for_cpmg(N, T):
    edges, signs = make_cpmg(N, 1.0).segments()
    # exact piecewise sum of the dwell times on the unit interval
    assert abs(np.sum(signs * np.diff(edges))) < 1e-13
    seq = make_cpmg(N, T)
    mids = 0.5 * (np.asarray(edges[1:]) + edges[:-1]) * T
    assert [toggling_sign(seq, m) for m in mids] == list(signs.astype(int))


def test_toggling_sign_examples():
    echo = make_cpmg(1, 1.0)
    assert toggling_sign(echo, 0.25) == 1
    assert toggling_sign(echo, 0.75) == -1
    assert toggling_sign(make_cpmg(2, 1.0), 0.5) == -1
    # left-closed: at the pulse instant the pulse has fired
    assert toggling_sign(echo, 0.5) == -1
    assert toggling_sign(echo, 0.0) == 1


@pytest.mark.parametrize("t", [-1e-9, 1.0 + 1e-9])
def test_toggling_sign_outside_window(t):
    with pytest.raises(InvalidArgumentError):
        toggling_sign(make_cpmg(1, 1.0), t)


@pytest.mark.parametrize(
    "T, times",
    [(1.0, [0.5, 0.5]), (1.0, [0.6, 0.4]), (1.0, [0.0, 0.5]), (1.0, [0.5, 1.0]), (1.0, [1.5]), (0.0, []), (-1.0, [])],
)
def test_custom_rejects_bad_input(T, times):
    with pytest.raises(InvalidArgumentError):
        make_custom(T, times)


def test_bad_generators():
    with pytest.raises(InvalidArgumentError):
        make_cpmg(-1, 1.0)
    with pytest.raises(InvalidArgumentError):
        make_uhrig(0, 1.0)
    with pytest.raises(InvalidArgumentError):
        make_ramsey(float("nan"))
    with pytest.raises(InvalidArgumentError):
        parse_sequence_spec("xy4:4", 1.0)


def test_scaling_keeps_fractions():
    seq = make_uhrig(5, 2.0)
    np.testing.assert_allclose(seq.scaled(0.1).fractions.astype(float), seq.fractions.astype(float), rtol=1e-15)


@given(st.integers(0, 30), T_values, st.sampled_from(["cpmg", "uhrig"]))
def test_sequence_file_round_trip(tmp_path_factory, N, T, family):
    if family == "uhrig" and N == 0:
        family = "ramsey"
    seq = parse_sequence_spec(f"{family}:{N}" if family != "ramsey" else "ramsey", T)
    path = tmp_path_factory.mktemp("seq") / "seq.txt"
    write_sequence_file(seq, path)
    back = read_sequence_file(path)
    assert back.family is Family.CUSTOM
    assert back.pulse_times == seq.pulse_times
    assert back.total_time == seq.total_time


def test_sequence_file_errors(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("T=1.0\n0.2\nabc\n")
    with pytest.raises(DataValidationError, match="row 3"):
        read_sequence_file(p)
    p.write_text("T=1.0\n0.6\n0.2\n")
    with pytest.raises(DataValidationError):
        read_sequence_file(p)
    p.write_text("0.2\n")
    with pytest.raises(DataValidationError, match="row 1"):
        read_sequence_file(p)
