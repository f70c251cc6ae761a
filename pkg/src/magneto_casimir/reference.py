"""Isotropic plasma-model Lifshitz pressure, written from scratch.

Reference implementation for the zero-field case. It deliberately shares no
code with the tensor path: textbook Fresnel coefficients for
``eps(i zeta) = eps_l (1 + 1/zeta**2)``, an exact static limit, and SciPy's
adaptive quadrature in the original ``(zeta, kappa)`` variables.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate


def fresnel(zeta, q, eps_l):
    """Half-space ``(r_TE, r_TM)`` at imaginary frequency; ``zeta`` may be 0."""
    zeta = np.asarray(zeta, dtype=float)
    q = np.asarray(q, dtype=float)
    kappa = np.sqrt(q * q + zeta * zeta)
    # zeta^2 eps stays finite as zeta -> 0
    z2eps = eps_l * (zeta * zeta + 1.0)
    k = np.sqrt(q * q + z2eps)
    r_te = (kappa - k) / (kappa + k)
    r_tm = (z2eps * kappa - zeta * zeta * k) / (z2eps * kappa + zeta * zeta * k)
    return r_te, r_tm


def slab_fresnel(zeta, q, eps_l, thickness):
    """Free-standing slab ``(r_TE, r_TM)`` from the two-interface sum."""
    r_te, r_tm = fresnel(zeta, q, eps_l)
    k = np.sqrt(np.asarray(q, dtype=float) ** 2 + eps_l * (np.asarray(zeta, dtype=float) ** 2 + 1.0))
    e = np.exp(-2.0 * k * thickness)
    return (
        r_te * (1 - e) / (1 - r_te**2 * e),
        r_tm * (1 - e) / (1 - r_tm**2 * e),
    )


def _integrand(zeta, kappa, eps_l, separation):
    q = np.sqrt(np.maximum(kappa * kappa - zeta * zeta, 0.0))
    r_te, r_tm = fresnel(zeta, q, eps_l)
    g = np.exp(-2.0 * kappa * separation)
    a = r_te * r_te * g
    b = r_tm * r_tm * g
    return kappa * kappa * (a / (1 - a) + b / (1 - b))


def pressure_zero_t(separation, eps_l, epsrel=1e-12):
    """``-(1/(2 pi^2)) int_0^inf dzeta int_zeta^inf kappa^2 sum_pol K dkappa``."""
    top = 45.0 / separation

    def inner(zeta):
        val, _ = integrate.quad(
            lambda k: float(_integrand(zeta, k, eps_l, separation)),
            zeta, zeta + top, epsabs=0.0, epsrel=epsrel, limit=200,
        )
        return val

    outer, _ = integrate.quad(inner, 0.0, top, epsabs=0.0, epsrel=epsrel, limit=200)
    return -outer / (2.0 * math.pi**2)


def pressure_finite_t(separation, eps_l, theta, epsrel=1e-12):
    """Matsubara sum, integrated over the common offset ``u = kappa - zeta_n``."""
    n_max = int(math.ceil(45.0 / (separation * theta))) + 1
    zetas = theta * np.arange(n_max)
    weights = np.ones(n_max)
    weights[0] = 0.5

    def summed(u):
        return float(weights @ _integrand(zetas, zetas + u, eps_l, separation))

    val, _ = integrate.quad(summed, 0.0, 45.0 / separation, epsabs=0.0, epsrel=epsrel, limit=400)
    return -theta / (2.0 * math.pi**2) * val


def ideal_pressure(separation):
    return -(math.pi**2) / 240.0 / separation**4
