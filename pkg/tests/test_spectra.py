import numpy as np
import pytest
from hypothesis import given, strategies as st

from ddspec import (
    DomainError,
    GaussianResonance,
    InvalidArgumentError,
    PowerLaw,
    PowerLawPlusWhite,
    SumSpectrum,
    Tabulated,
    White,
    spectrum_eval,
)
from ddspec.spectra import parse_spectrum

omegas = st.lists(st.floats(1e-6, 1e7), min_size=1, max_size=30).map(np.asarray)


def test_powerlaw_values():
    s = PowerLaw(1288.0, 0.89)
    assert spectrum_eval(s, 1.0) == 1288.0
    assert spectrum_eval(s, 2 * np.pi * 100) == pytest.approx(1288.0 * (2 * np.pi * 100) ** -0.89, rel=1e-14)


def test_composites():
    s = PowerLawPlusWhite(1e-3, 0.8904, 1e-7)
    w = np.array([1.0, 1e3, 1e6])
    np.testing.assert_allclose(s(w), 1e-3 * w**-0.8904 + 1e-7, rtol=1e-14)
    g = GaussianResonance(5.0, 628.3, 12.0)
    assert g(628.3) == pytest.approx(5.0)
    assert g(628.3 + 12.0) == pytest.approx(5.0 * np.exp(-0.5), rel=1e-14)
    total = PowerLaw(2.0, 0.5) + White(3.0) + g
    assert isinstance(total, SumSpectrum) and len(total.components) == 3
    assert total(4.0) == pytest.approx(1.0 + 3.0 + g(4.0))
    assert total.low_frequency_exponent() == 0.5


@given(omegas)
def test_non_negative(w):
    for s in (PowerLaw(1.0, 0.89), White(0.0), PowerLawPlusWhite(1.0, 2.0, 0.1), GaussianResonance(1.0, 100.0, 1.0)):
        assert np.all(s(w) >= 0)


@pytest.mark.parametrize("w", [0.0, -1.0, np.nan])
def test_eval_rejects_non_positive_frequency(w):
    with pytest.raises(InvalidArgumentError):
        spectrum_eval(PowerLaw(1.0, 0.5), w)


@pytest.mark.parametrize(
    "factory",
    [lambda: PowerLaw(-1.0, 0.5), lambda: PowerLaw(1.0, -0.1), lambda: White(-1.0),
     lambda: GaussianResonance(1.0, -5.0, 1.0), lambda: GaussianResonance(1.0, 5.0, 0.0),
     lambda: Tabulated([1.0, 2.0], [1.0, 0.0]), lambda: Tabulated([2.0, 1.0], [1.0, 1.0])],
)
def test_invalid_parameters(factory):
    with pytest.raises(InvalidArgumentError):
        factory()


def test_tabulated_reproduces_power_law_exactly():
    w = np.geomspace(1.0, 1e4, 9)
    tab = Tabulated(w, 3.0 * w**-0.7)
    probe = np.geomspace(1e-2, 1e6, 50)
    np.testing.assert_allclose(tab(probe), 3.0 * probe**-0.7, rtol=1e-12)
    assert tab.low_frequency_exponent() == pytest.approx(0.7)


def test_integrability_window():
    PowerLaw(1.0, 0.99).check_integrable(0)
    with pytest.raises(DomainError, match="diverges"):
        PowerLaw(1.0, 1.0).check_integrable(0)
    PowerLaw(1.0, 2.9).check_integrable(1)
    with pytest.raises(DomainError):
        PowerLaw(1.0, 3.0).check_integrable(1)


def test_parse_spectrum():
    s = parse_spectrum("powerlaw:S0=1288,alpha=0.89")
    assert s == PowerLaw(1288.0, 0.89)
    s = parse_spectrum("plw:S_PLN=1e-3,alpha_tilde=0.89 + gauss:S1=2,omega0_rad_per_s=600,delta_omega_rad_per_s=10")
    assert isinstance(s, SumSpectrum)
    assert parse_spectrum("white:level=2")(5.0) == 2.0
    for bad in ["", "pink:S0=1", "powerlaw:S0=1", "powerlaw:S0=1,alpha=0.5,beta=2", "white:level"]:
        with pytest.raises(InvalidArgumentError):
            parse_spectrum(bad)


def test_parse_spectrum_file(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("omega_rad_per_s,S\n1.0,4.0\n4.0,1.0\n")
    s = parse_spectrum(str(p))
    assert s(2.0) == pytest.approx(2.0)
