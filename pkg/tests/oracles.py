"""Reference computations used by the tests, kept apart from the package code.

Nothing here imports the solver it is meant to check.
"""

import math

import numpy as np
import sympy as sp


def eom_symbolic(a0, aL, aR, intensity, kappa, u0, eta):
    """Exact rational evaluation of the three-mode equations and scattered field."""
    a0, aL, aR, intensity, kappa, u0, eta = map(sp.nsimplify, (a0, aL, aR, intensity,
                                                               kappa, u0, eta))
    i = sp.I
    al = -2 * i * u0 * eta * (sp.conjugate(aL) * a0 + sp.conjugate(a0) * aR) / kappa
    d0 = -i * u0 * eta * (sp.conjugate(al) * aR + al * aL) + i * u0 * intensity / 2 * (aR + aL)
    dL = -4 * i * aL - i * u0 * eta * sp.conjugate(al) * a0 + i * u0 * intensity / 2 * a0
    dR = -4 * i * aR - i * u0 * eta * al * a0 + i * u0 * intensity / 2 * a0
    return tuple(complex(sp.N(sp.expand(v), 30)) for v in (al, d0, dL, dR))


def critical_f(kappa, u0, eta, n):
    r = u0 ** 2 * eta ** 2 * n / kappa
    return math.sqrt(2) * kappa / (u0 ** 3 * eta ** 2 * n ** 2) * (1 + math.sqrt(1 + r * r))


def omega_equation(w, kappa, u0, eta, n, f):
    """Quartic eigenfrequency equation in its original polynomial form, with K tau = f."""
    return ((4 + w) * w - 2 * (2 + w) ** 2 / (u0 ** 2 * n ** 2 * f ** 2)
            * (1 + kappa ** 2 * (2 + w) ** 2 / (4 * u0 ** 4 * eta ** 4 * n ** 2)))


def bisect_roots(fun, lo, hi, n_grid=200_001):
    """All sign changes of ``fun`` on [lo, hi], each bisected to the last bit."""
    xs = np.linspace(lo, hi, n_grid)
    ys = fun(xs)
    roots = []
    for k in np.flatnonzero(np.sign(ys[:-1]) * np.sign(ys[1:]) < 0):
        a, b = xs[k], xs[k + 1]
        fa = fun(a)
        while True:
            m = 0.5 * (a + b)
            if m in (a, b):
                break
            fm = fun(m)
            if fm == 0:
                a = b = m
                break
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return roots


def quartic_roots(kappa, u0, eta, n, f):
    """Real roots of the original quartic, found by grid bracketing and bisection.

    The roots satisfy |w + 2|^2 <= (P - 2)/(2B) with P = (u0 n f)^2 and
    B = kappa^2 / (4 u0^4 eta^4 n^2), which bounds the search window.
    """
    big_p = (u0 * n * f) ** 2
    big_b = kappa ** 2 / (4 * u0 ** 4 * eta ** 4 * n ** 2)
    reach = 1.01 * math.sqrt(max(big_p - 2, 0) / (2 * big_b)) + 1e-9
    fun = lambda w: omega_equation(w, kappa, u0, eta, n, f)  # noqa: E731
    right = bisect_roots(fun, -2.0, -2.0 + reach)
    left = bisect_roots(fun, -2.0 - reach, -2.0)
    return sorted(left + right)


def occupations(w, n):
    return 0.5 * n * (4 + w) / (2 + w), 0.25 * n * w / (2 + w)


def filter_by_quadrature(signal, t, kappa, tau, s0=0.0):
    """s(t) = s0 e^{-t/tau} + kappa * int_0^t e^{-(t-t')/tau} signal(t') dt'."""
    from scipy.integrate import quad

    val, _ = quad(lambda tp: math.exp(-(t - tp) / tau) * signal(tp), 0.0, t,
                  epsabs=0.0, epsrel=1e-12, limit=500)
    return s0 * math.exp(-t / tau) + kappa * val
