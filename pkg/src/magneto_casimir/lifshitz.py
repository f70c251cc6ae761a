"""Casimir pressure between two identical magnetoplasma plates.

Reduced units: lengths in ``c / omega_p``, frequencies in ``omega_p``,
pressure in ``hbar omega_p**4 / c**3``. The dimensionless temperature is
``theta = 2 pi k_B T / (hbar omega_p)`` so Matsubara frequencies are
``n * theta``.

Finite temperature::

    P = -(theta / (2 pi**2)) sum'_n  int_{zeta_n}^inf  k**2 sum_pol K dk

with ``K = R exp(-2 k L) / (1 - R exp(-2 k L))`` and the n = 0 term halved.
At zero temperature the sum becomes ``(1/theta) int d zeta``. Both reduce to
``-pi**2 / (240 L**4)`` when ``R == 1``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, DomainError
from .material import Material, imaginary_axis_components
from .reflection import HALF_SPACE, SlabGeometry, mirror_pair_reflectances

# (zeta, kappa) -> (R_s, R_p), both broadcast arrays
Reflectances = Callable[[np.ndarray, np.ndarray], tuple]

THREADS_ENV = "MAGNETO_CASIMIR_THREADS"

# exp(-2 kappa L) is below 1e-34 past this value of 2 kappa L
X_MAX = 80.0
# zeta / kappa used to approach the static limit of the n = 0 term
STATIC_STEP = 1e-8

_GL_NODES = 10
_X_BREAKS = np.array([0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 48.0, 64.0, X_MAX])
# dyadic grading toward zeta = 0 resolves the cyclotron scale zeta ~ Oc
_T_BREAKS = np.concatenate(([0.0], 2.0 ** np.arange(-30, 1)))
_MAX_LEVEL = 5
# grid points evaluated per vectorized call
_CHUNK = 1 << 17


@dataclass(frozen=True)
class ThermalState:
    theta: float = 0.0
    zero_temperature: bool = False

    def __post_init__(self):
        if not (self.theta >= 0 and math.isfinite(self.theta)):
            raise DomainError(f"theta must be finite and >= 0, got {self.theta}")
        if self.theta == 0.0:
            object.__setattr__(self, "zero_temperature", True)
        elif self.zero_temperature:
            raise DomainError("zero_temperature=True is incompatible with theta > 0")


ZERO_TEMPERATURE = ThermalState()


@dataclass(frozen=True)
class ForceResult:
    separation: float
    omega_c_reduced: float
    pressure: float
    ideal_pressure: float
    ratio: float
    matsubara_terms_used: int
    quadrature_error_estimate: float


@dataclass(frozen=True)
class SweepSpec:
    separations: tuple
    omega_c_values: tuple
    material: Material = field(default_factory=Material)
    thermal: ThermalState = ZERO_TEMPERATURE
    geometry: SlabGeometry = HALF_SPACE

    def __post_init__(self):
        object.__setattr__(self, "separations", tuple(float(s) for s in self.separations))
        object.__setattr__(self, "omega_c_values", tuple(float(w) for w in self.omega_c_values))
        if not self.separations or not self.omega_c_values:
            raise DomainError("sweep needs at least one separation and one omega_c value")
        if any(not s > 0 for s in self.separations):
            raise DomainError("separations must be > 0")
        if any(not w >= 0 for w in self.omega_c_values):
            raise DomainError("omega_c values must be >= 0")


@dataclass(frozen=True)
class SweepRow:
    omega_c_reduced: float
    separation: float
    result: Optional[ForceResult]
    error: Optional[str] = None


def ideal_pressure(separation: float) -> float:
    """Perfect-mirror pressure ``-pi**2 / (240 L**4)``."""
    if not separation > 0:
        raise DomainError(f"separation must be > 0, got {separation}")
    return -(math.pi**2) / (240.0 * separation**4)


def matsubara_frequency(n: int, thermal: ThermalState) -> float:
    if thermal.zero_temperature:
        raise DomainError("Matsubara frequencies are undefined at zero temperature")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return n * thermal.theta


def ideal_mirror(zeta, kappa):
    shape = np.broadcast(zeta, kappa).shape
    return np.ones(shape), np.ones(shape)


def material_reflectances(material: Material, geometry: SlabGeometry = HALF_SPACE) -> Reflectances:
    """Round-trip reflectances of two facing plates as a function of ``(zeta, kappa)``.

    ``kappa`` is the vacuum decay constant, so ``q_z = sqrt(kappa**2 - zeta**2)``.
    ``zeta == 0`` entries are replaced by the static limit, obtained by
    Richardson extrapolation from ``zeta = STATIC_STEP * kappa`` and twice
    that (the reflectances are even in zeta to leading order).
    """

    def at(zeta, kappa):
        q_z = np.sqrt(np.maximum(kappa * kappa - zeta * zeta, 0.0))
        eps = imaginary_axis_components(zeta, material)
        return mirror_pair_reflectances(zeta, q_z, eps, geometry)

    def reflectances(zeta, kappa):
        zeta, kappa = np.broadcast_arrays(
            np.asarray(zeta, dtype=float), np.asarray(kappa, dtype=float)
        )
        static = zeta == 0
        if not static.any():
            return at(zeta, kappa)
        r_s = np.empty(zeta.shape)
        r_p = np.empty(zeta.shape)
        dyn = ~static
        if dyn.any():
            r_s[dyn], r_p[dyn] = at(zeta[dyn], kappa[dyn])
        k0 = kappa[static]
        s1, p1 = at(STATIC_STEP * k0, k0)
        s2, p2 = at(2 * STATIC_STEP * k0, k0)
        # extrapolation may overshoot the passivity bound by one rounding step
        r_s[static] = np.clip((4 * s1 - s2) / 3, 0.0, 1.0)
        r_p[static] = np.clip((4 * p1 - p2) / 3, 0.0, 1.0)
        return r_s, r_p

    return reflectances


def _kernel(reflectance, exp_term):
    y = reflectance * exp_term
    if np.any(y >= 1.0):
        raise DomainError(
            "R exp(-2 kappa L) >= 1: bound-state pole on the imaginary axis "
            "(reflectance is not passive)"
        )
    return y / (1.0 - y)


def polarization_kernel(
    zeta,
    kappa,
    separation: float,
    material: Material,
    geometry: SlabGeometry = HALF_SPACE,
    reflectance: Optional[Reflectances] = None,
):
    """TE and TM kernels ``R exp(-2 kappa L) / (1 - R exp(-2 kappa L))``."""
    zeta = np.asarray(zeta, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if np.any(zeta < 0) or np.any(~(kappa > 0)):
        raise DomainError("need zeta >= 0 and kappa > 0")
    if np.any(kappa < zeta):
        raise DomainError("kappa must be >= zeta (evanescent in-plane wavevector)")
    if reflectance is None:
        reflectance = material_reflectances(material, geometry)
    r_s, r_p = reflectance(zeta, kappa)
    decay = np.exp(-2.0 * kappa * separation)
    return _kernel(r_s, decay), _kernel(r_p, decay)


def _gauss_panels(breaks: np.ndarray, level: int):
    nodes, weights = np.polynomial.legendre.leggauss(_GL_NODES)
    sub = 2**level
    edges = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        edges.append(np.linspace(a, b, sub + 1)[:-1])
    left = np.concatenate(edges)
    width = np.diff(np.concatenate((left, breaks[-1:])))
    mid = left + width / 2
    x = (mid[:, None] + width[:, None] / 2 * nodes[None, :]).ravel()
    w = (width[:, None] / 2 * weights[None, :]).ravel()
    return x, w


def _kernel_sum(reflectance, zeta, kappa, separation):
    r_s, r_p = reflectance(zeta, kappa)
    decay = np.exp(-2.0 * kappa * separation)
    return _kernel(r_s, decay) + _kernel(r_p, decay)


def _zero_t_integral(reflectance, separation, level):
    # int_0^X x^3 int_0^1 S(kappa t, kappa) dt dx with kappa = x / (2L)
    x, wx = _gauss_panels(_X_BREAKS, level)
    t, wt = _gauss_panels(_T_BREAKS, level)
    inner = np.empty_like(x)
    rows = max(1, _CHUNK // t.size)
    for i in range(0, x.size, rows):
        kappa = x[i:i + rows, None] / (2.0 * separation)
        s = _kernel_sum(reflectance, kappa * t[None, :], kappa, separation)
        inner[i:i + rows] = s @ wt
    return math.fsum(wx * x**3 * inner)


def _check_separation(separation):
    if not (separation > 0 and math.isfinite(separation)):
        raise DomainError(f"separation must be finite and > 0, got {separation}")


def pressure_zero_t(
    separation: float,
    material: Material,
    geometry: SlabGeometry = HALF_SPACE,
    rtol: float = 1e-9,
    reflectance: Optional[Reflectances] = None,
) -> ForceResult:
    """Zero-temperature pressure by nested Gauss-Legendre quadrature.

    Substituting ``zeta = kappa t`` and ``x = 2 kappa L`` gives
    ``P = -I / (32 pi**2 L**4)`` with ``I`` a double integral over
    ``x in [0, 80]`` and ``t in [0, 1]``. Panels are bisected on both axes
    until successive estimates agree to ``rtol``.
    """
    _check_separation(separation)
    if reflectance is None:
        reflectance = material_reflectances(material, geometry)
    prev = _zero_t_integral(reflectance, separation, 0)
    for level in range(1, _MAX_LEVEL + 1):
        cur = _zero_t_integral(reflectance, separation, level)
        err = abs(cur - prev)
        if err <= rtol * abs(cur):
            break
        prev = cur
    else:
        raise ConvergenceError(
            "zero-temperature quadrature did not converge",
            separation=separation, last=cur, previous=prev, level=_MAX_LEVEL,
        )
    scale = 1.0 / (32.0 * math.pi**2 * separation**4)
    pressure = -scale * cur
    ideal = ideal_pressure(separation)
    return ForceResult(
        separation=separation,
        omega_c_reduced=material.omega_c_reduced,
        pressure=pressure,
        ideal_pressure=ideal,
        ratio=pressure / ideal,
        matsubara_terms_used=0,
        quadrature_error_estimate=scale * err,
    )


def _matsubara_block(reflectance, zetas, separation, rtol):
    # int_{zeta}^inf kappa^2 S dkappa for each zeta, via kappa = zeta + x / (2L)
    def level_values(level):
        x, w = _gauss_panels(_X_BREAKS, level)
        out = np.empty_like(zetas)
        rows = max(1, _CHUNK // x.size)
        for i in range(0, zetas.size, rows):
            z = zetas[i:i + rows, None]
            kappa = z + x[None, :] / (2.0 * separation)
            s = _kernel_sum(reflectance, np.broadcast_to(z, kappa.shape), kappa, separation)
            out[i:i + rows] = (s * kappa**2) @ w
        return out / (2.0 * separation)

    prev = level_values(0)
    for level in range(1, _MAX_LEVEL + 1):
        cur = level_values(level)
        err = np.abs(cur - prev)
        if np.all(err <= rtol * np.abs(cur) + 1e-300):
            return cur, err
        prev = cur
    raise ConvergenceError(
        "Matsubara term quadrature did not converge",
        separation=separation, worst=float(np.max(err / np.maximum(np.abs(cur), 1e-300))),
    )


def pressure_finite_t(
    separation: float,
    material: Material,
    thermal: ThermalState,
    geometry: SlabGeometry = HALF_SPACE,
    rtol: float = 1e-9,
    term_rtol: float = 1e-10,
    cutoff_multiplier: int = 2,
    max_terms: int = 1_000_000,
    reflectance: Optional[Reflectances] = None,
) -> ForceResult:
    """Matsubara-sum pressure at temperature ``thermal.theta``.

    Terms are generated in ascending ``n``. The sum stops at the first ``N``
    where three consecutive terms are below ``term_rtol`` times the running
    total; the terms up to ``cutoff_multiplier * N`` are then included as a
    safety margin. Terms are combined with ``math.fsum`` so the result does
    not depend on block sizes or evaluation order.
    """
    _check_separation(separation)
    if thermal.zero_temperature:
        raise DomainError("use pressure_zero_t for theta = 0")
    if reflectance is None:
        reflectance = material_reflectances(material, geometry)
    theta = thermal.theta

    terms: list = []
    errors: list = []

    def extend(upto):
        block = 64
        while len(terms) < upto:
            start = len(terms)
            stop = min(upto, start + block)
            zetas = theta * np.arange(start, stop, dtype=float)
            vals, errs = _matsubara_block(reflectance, zetas, separation, rtol)
            if start == 0:
                vals[0] *= 0.5
                errs[0] *= 0.5
            terms.extend(vals.tolist())
            errors.extend(errs.tolist())
            block = min(4 * block, 8192)

    stop_at = None
    while stop_at is None:
        if len(terms) >= max_terms:
            raise ConvergenceError(
                "Matsubara sum did not converge",
                separation=separation, terms=len(terms), partial=math.fsum(terms),
            )
        extend(min(max_terms, max(64, 2 * len(terms))))
        values = np.asarray(terms)
        quiet = np.abs(values) < term_rtol * np.abs(np.cumsum(values))
        streak = np.flatnonzero(quiet[2:] & quiet[1:-1] & quiet[:-2])
        if streak.size:
            stop_at = int(streak[0]) + 3

    total_terms = cutoff_multiplier * stop_at
    if total_terms > max_terms:
        raise ConvergenceError("Matsubara safety margin exceeds max_terms", terms=total_terms)
    extend(total_terms)
    used = terms[:total_terms]
    total = math.fsum(used)
    tail = math.fsum(used[stop_at:])

    prefactor = theta / (2.0 * math.pi**2)
    pressure = -prefactor * total
    ideal = ideal_pressure(separation)
    err = prefactor * (math.fsum(errors[:total_terms]) + abs(tail))
    return ForceResult(
        separation=separation,
        omega_c_reduced=material.omega_c_reduced,
        pressure=pressure,
        ideal_pressure=ideal,
        ratio=pressure / ideal,
        matsubara_terms_used=total_terms,
        quadrature_error_estimate=err,
    )


def pressure(
    separation: float,
    material: Material,
    thermal: ThermalState = ZERO_TEMPERATURE,
    geometry: SlabGeometry = HALF_SPACE,
    **kwargs,
) -> ForceResult:
    if thermal.zero_temperature:
        return pressure_zero_t(separation, material, geometry, **kwargs)
    return pressure_finite_t(separation, material, thermal, geometry, **kwargs)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise DomainError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def force_sweep(spec: SweepSpec, workers: Optional[int] = None) -> list:
    """Pressure over the (omega_c, separation) grid.

    Rows come back with omega_c ascending in the outer loop and separation
    ascending in the inner loop. Grid points are independent, so the worker
    count only changes wall time. A failing point yields a row with
    ``result=None`` and the error message; the rest still run.
    """
    grid = [
        (oc, sep)
        for oc in sorted(spec.omega_c_values)
        for sep in sorted(spec.separations)
    ]

    def run(point):
        oc, sep = point
        try:
            result = pressure(sep, spec.material.with_field(oc), spec.thermal, spec.geometry)
        except (DomainError, ConvergenceError, ArithmeticError) as exc:
            return SweepRow(oc, sep, None, f"{type(exc).__name__}: {exc}")
        return SweepRow(oc, sep, result)

    n = workers if workers is not None else worker_count()
    if n <= 1 or len(grid) == 1:
        return [run(p) for p in grid]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(run, grid))
