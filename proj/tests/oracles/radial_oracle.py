"""Independent reference values for the default radial profiles.

Exact rational moments come from sympy; the oscillatory radial transforms use QUADPACK's
Fourier-weighted rules (scipy.integrate.quad with weight='sin'/'cos'). Nothing here shares
code with the C++ library. The printed numbers are frozen into tests/unit/oracle_values.hpp.

    python3 tests/oracles/radial_oracle.py
"""
import math

import numpy as np

import sympy as sp
from scipy.integrate import quad

s = sp.symbols("s", positive=True)
bump = (1 - s**2) ** 8
SQ = math.sqrt(2 / math.pi)


def profile(kind):
    q2 = sp.integrate(s**2 * bump, (s, 0, 1))
    amp = 1 / (4 * sp.pi * q2)
    if kind == "charged":
        return amp * bump, sp.Integer(0)
    beta = q2 / sp.integrate(s**4 * bump, (s, 0, 1))
    return sp.expand(-amp * bump * (1 - beta * s**2)), beta


def q(f, a, b, **kw):
    v, _ = quad(f, a, b, limit=400, epsabs=0, epsrel=1e-13, **kw)
    return v


def report(kind):
    rho, beta = profile(kind)
    f = sp.lambdify(s, rho, "math")

    def kern(x):  # (x cos x - sin x) / x^3
        if x < 1e-2:
            return -1 / 3 + x**2 / 30 - x**4 / 840 + x**6 / 45360
        return (x * math.cos(x) - math.sin(x)) / x**3

    def rho_hat(r):
        if r < 1:
            return SQ * q(lambda u: u**2 * f(u) * (math.sin(r * u) / (r * u) if r * u > 0 else 1.0), 0, 1)
        return SQ / r * q(lambda u: u * f(u), 0, 1, weight="sin", wvar=r)

    def rho_tilde(r):
        if r < 1:
            return SQ * q(lambda u: u**4 * f(u) * kern(r * u), 0, 1)
        c = q(lambda u: u**2 * f(u), 0, 1, weight="cos", wvar=r)
        sn = q(lambda u: u * f(u), 0, 1, weight="sin", wvar=r)
        return SQ * (c / r**2 - sn / r**3)

    # fixed outer rule: 30-point Gauss-Legendre on each half-unit panel of [0, 120]
    x0, w0 = np.polynomial.legendre.leggauss(30)
    nodes = np.concatenate([0.25 * (x0 + 1) + 0.5 * i for i in range(240)])
    weights = np.tile(0.25 * w0, 240)
    til = np.array([rho_tilde(x) for x in nodes])

    def rint(g):
        return math.fsum(weights * g(nodes, til))

    I = float(8 * sp.pi / 3 * sp.integrate(s**4 * rho, (s, 0, 1)))
    tsq = 4 * math.pi * rint(lambda x, t: x**2 * t**2)
    # electrostatic field energy int |E|^2 dx from x-space: E(r) = Q(r) / (4 pi r^2)
    r = sp.symbols("r", positive=True)
    Q = sp.lambdify(r, sp.integrate(4 * sp.pi * s**2 * rho, (s, 0, r)), "math")
    e_field = 4 * math.pi * (q(lambda x: (Q(x) / (4 * math.pi)) ** 2 / x**2 if x > 0 else 0.0, 0, 1)
                             + Q(1.0) ** 2 / (16 * math.pi**2))
    out = {
        "amplitude": float(rho.subs(s, 0)),
        "beta": float(beta),
        "I": I,
        "rho_hat_0": rho_hat(0.0),
        "rho_hat_1": rho_hat(1.0),
        "rho_hat_5": rho_hat(5.0),
        "rho_tilde_0": rho_tilde(0.0),
        "rho_tilde_1": rho_tilde(1.0),
        "rho_tilde_5": rho_tilde(5.0),
        "rho_tilde_sq_integral": tsq,
        "kappa_cos_0": float(8 * sp.pi / 3 * sp.integrate(s**4 * rho**2, (s, 0, 1))),
        "kappa_cos_1": 8 * math.pi / 3 * rint(lambda x, t: x**4 * t**2 * np.cos(x)),
        "kappa_sin_1": 8 * math.pi / 3 * rint(lambda x, t: x**3 * t**2 * np.sin(x)),
        "alpha": -2 / 3 * tsq / I,
        # |omega| = 1: I/2 + (1/2) int |E|^2 + (1/2)(2/3) int rho_tilde^2
        "soliton_energy": I / 2 + e_field / 2 + tsq / 3,
    }
    for k, v in out.items():
        print(f"{kind:8s} {k:24s} {v:.17g}")


if __name__ == "__main__":
    report("charged")
    report("neutral")
