"""Cross-checks of every closed-form step against an independent route.

Each check returns a :class:`CheckResult`; :func:`run_checks` runs them all
at reduced grid density for the ``validate`` CLI command.
"""

from __future__ import annotations

import contextlib
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import reference, reflection
from .lifshitz import ThermalState, ideal_mirror, pressure_finite_t, pressure_zero_t
from .material import VOIGT_FIELD, Material, dielectric_tensor, voigt_components
from .reflection import SlabGeometry

FAULTS = ("eps-v-sign",)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)


def _rel(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)


def check_tensor_reduction(n_points=200, tol=1e-12, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    zetas = 10.0 ** rng.uniform(-2, 2, n_points)
    fields = rng.uniform(0, 2, n_points)
    worst = 0.0
    for zeta, oc in zip(zetas, fields):
        m = Material(15.4, oc)
        full = dielectric_tensor(1j * zeta, VOIGT_FIELD, m)
        closed = voigt_components(zeta, m).tensor()
        scale = np.max(np.abs(closed))
        worst = max(worst, float(np.max(np.abs(full - closed)) / scale))
    return CheckResult("tensor_reduction", worst, tol)


def reflection_grid():
    """100 (zeta, q_z, Omega_c) points spanning five decades of q_z and zeta."""
    zetas = (0.01, 0.1, 1.0, 3.0, 10.0)
    qs = (-10.0, -0.1, 0.01, 1.0, 10.0)
    fields = (0.0, 0.2, 1.0, 2.0)
    return list(itertools.product(zetas, qs, fields))


def check_fresnel_limit(tol=1e-12) -> CheckResult:
    worst = 0.0
    for zeta, q, _ in reflection_grid():
        eps = voigt_components(zeta, Material(15.4, 0.0))
        kin = reflection.kinematics(zeta, q, eps)
        r_te, r_tm = reference.fresnel(zeta, q, 15.4)
        worst = max(
            worst,
            float(_rel(reflection.reflection_te(kin, eps), r_te)),
            float(_rel(reflection.reflection_tm_halfspace(kin, eps), r_tm)),
        )
    return CheckResult("fresnel_limit", worst, tol)


def check_reflection_oracle(tol=1e-8, thicknesses=(np.inf, 1.0), stride=1) -> CheckResult:
    worst = 0.0
    for zeta, q, oc in reflection_grid()[::stride]:
        eps = voigt_components(zeta, Material(15.4, oc))
        kin = reflection.kinematics(zeta, q, eps)
        for d in thicknesses:
            geom = SlabGeometry(d)
            closed_p = reflection.reflection_tm(kin, eps, geom)
            closed_s = reflection.reflection_te(kin, eps, geom)
            num_p = reflection.reflection_numeric_oracle(kin, eps, geom, "p")
            num_s = reflection.reflection_numeric_oracle(kin, eps, geom, "s")
            worst = max(worst, abs(closed_p - num_p), abs(closed_s - num_s))
    return CheckResult("reflection_oracle", float(worst), tol)


def check_ideal_mirror(tol=1e-6, separations=(0.5, 1.0, 2.0)) -> CheckResult:
    worst = 0.0
    for sep in separations:
        res = pressure_zero_t(sep, Material(), reflectance=ideal_mirror)
        worst = max(worst, abs(res.ratio - 1.0))
    return CheckResult("ideal_mirror_calibration", worst, tol)


def check_isotropic_lifshitz(tol=1e-8, separations=(1.0,), theta=0.05) -> CheckResult:
    worst = 0.0
    m = Material(15.4, 0.0)
    for sep in separations:
        zero = pressure_zero_t(sep, m).pressure
        worst = max(worst, float(_rel(zero, reference.pressure_zero_t(sep, 15.4))))
        hot = pressure_finite_t(sep, m, ThermalState(theta)).pressure
        worst = max(worst, float(_rel(hot, reference.pressure_finite_t(sep, 15.4, theta))))
    return CheckResult("isotropic_lifshitz", worst, tol)


@contextlib.contextmanager
def injected_fault(name: Optional[str]):
    """Temporarily corrupt one closed-form step so the checks can be seen to fail."""
    if name is None:
        yield
        return
    if name != "eps-v-sign":
        raise ValueError(f"unknown fault {name!r}; known: {', '.join(FAULTS)}")
    original = reflection.voigt_effective_permittivity
    reflection.voigt_effective_permittivity = lambda eps: -original(eps)
    try:
        yield
    finally:
        reflection.voigt_effective_permittivity = original


def run_checks(tolerance: Optional[float] = None, fault: Optional[str] = None) -> list:
    """Run all checks; ``tolerance`` overrides every per-check tolerance."""

    def tol(default):
        return default if tolerance is None else tolerance

    checks = [
        ("tensor_reduction", check_tensor_reduction, {"tol": tol(1e-12)}),
        ("fresnel_limit", check_fresnel_limit, {"tol": tol(1e-12)}),
        ("reflection_oracle", check_reflection_oracle, {"tol": tol(1e-8), "stride": 2}),
        ("ideal_mirror_calibration", check_ideal_mirror, {"tol": tol(1e-6)}),
        ("isotropic_lifshitz", check_isotropic_lifshitz, {"tol": tol(1e-8)}),
    ]
    results = []
    with injected_fault(fault):
        for name, check, kwargs in checks:
            try:
                results.append(check(**kwargs))
            except (ArithmeticError, ValueError, RuntimeError) as exc:
                detail = f"{type(exc).__name__}: {exc}"
                results.append(CheckResult(name, float("inf"), kwargs["tol"], detail))
    return results
