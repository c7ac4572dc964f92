"""Independent reference implementations used only by the tests."""
import mpmath as mp
import numpy as np


def filter_mp(fractions, u, dps=40):
    """|int_0^1 s(x) exp(iux) dx|^2 by exact piecewise antiderivatives."""
    with mp.workdps(dps):
        u = mp.mpf(u)
        edges = [mp.mpf(0)] + [mp.mpf(f) for f in fractions] + [mp.mpf(1)]
        if u == 0:
            acc = sum((-1) ** k * (edges[k + 1] - edges[k]) for k in range(len(edges) - 1))
            return float(acc ** 2)
        acc = mp.mpc(0)
        for k in range(len(edges) - 1):
            acc += (-1) ** k * (mp.expjpi(u * edges[k + 1] / mp.pi) - mp.expjpi(u * edges[k] / mp.pi))
        return float(abs(acc / (1j * u)) ** 2)


def cpmg_fractions_mp(N):
    return [mp.mpf(2 * j - 1) / (2 * N) for j in range(1, N + 1)]


def gamma_ramsey_integral(alpha):
    """int_0^inf u^-alpha * 4 sin^2(u/2) / u^2 du in closed form, 0 < alpha < 1."""
    nu = 1 + alpha
    return float(2 * (-mp.gamma(-nu) * mp.cos(mp.pi * nu / 2)))


def gamma_echo_integral(alpha):
    """int_0^inf u^-alpha g_echo(u) u^2... in the reduced form used for chi.

    g_echo(u) u^2 = 16 sin^4(u/4) = 6 - 8 cos(u/2) + 2 cos(u), so the
    integral of u^-(2+alpha) times it reduces to J(1) = -Gamma(-nu) cos(pi nu/2)
    times 2 (4 * 2^-nu - 1) with nu = 1 + alpha.
    """
    nu = 1 + alpha
    J = -mp.gamma(-nu) * mp.cos(mp.pi * nu / 2)
    return float(2 * (4 * mp.power(2, -nu) - 1) * J)


def zeta_sum(s, terms=10**6):
    """Direct partial sum with an integral tail correction."""
    n = np.arange(1, terms + 1, dtype=float)
    return float(np.sum(n ** -s) + terms ** (1 - s) / (s - 1) - 0.5 * terms ** -s)
