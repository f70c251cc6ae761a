"""TE and TM reflection amplitudes of a magnetoplasma in the Voigt geometry.

Geometry: vacuum fills ``y > 0`` and the medium fills ``y < 0`` (or
``-d < y < 0`` for a slab with vacuum below). The static field lies along x,
waves travel along z as ``exp(i q_z z)``, and everything is evaluated at
imaginary frequency ``omega = i zeta`` in reduced units (c = omega_p = 1).
The incident field grows toward +y as ``exp(alpha y)``, the reflected one
decays as ``r exp(-alpha y)``. ``r_s`` is the ratio of ``E_x`` amplitudes,
``r_p`` the ratio of ``H_x`` amplitudes.

TE waves (E along x) only see ``eps_xx``. TM waves (H along x) see the
gyrotropic yz block, which makes ``r_p`` nonreciprocal: ``r_p(-q_z)`` is the
complex conjugate of ``r_p(q_z)`` on the imaginary axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ConditioningError, ConvergenceError, DomainError
from .material import VoigtPermittivity


@dataclass(frozen=True)
class Kinematics:
    zeta: float
    q_z: float
    alpha: float
    beta: complex


@dataclass(frozen=True)
class ReflectionPair:
    r_s: complex
    r_p: complex


@dataclass(frozen=True)
class SlabGeometry:
    """Slab thickness in units of ``c / omega_p``; ``inf`` is a half-space."""

    thickness: float = math.inf

    def __post_init__(self):
        if not self.thickness > 0:
            raise DomainError(f"thickness must be > 0, got {self.thickness}")

    @property
    def is_half_space(self) -> bool:
        return math.isinf(self.thickness)


HALF_SPACE = SlabGeometry()

# relative size of 1 + rho*exp(-2 beta d) below which the slab system is
# declared singular
_CONDITIONING_FLOOR = 1e-12


def voigt_effective_permittivity(eps: VoigtPermittivity):
    """``eps_yy + eps_yz**2 / eps_yy``, the permittivity governing TM decay."""
    eps_yy = np.asarray(eps.eps_yy)
    if np.any(eps_yy == 0):
        raise DomainError("eps_yy = 0: Voigt effective permittivity is singular")
    return eps_yy + np.asarray(eps.eps_yz) ** 2 / eps_yy


def kinematics(zeta, q_z, eps: VoigtPermittivity) -> Kinematics:
    """Vacuum and medium decay constants at ``(i zeta, q_z)``.

    ``alpha = sqrt(q_z**2 + zeta**2)``, ``beta = sqrt(q_z**2 + zeta**2 eps_v)``
    on the principal branch (non-negative real part).
    """
    zeta = np.asarray(zeta, dtype=float)
    q_z = np.asarray(q_z, dtype=float)
    if np.any(~(zeta > 0)):
        raise DomainError("zeta must be > 0")
    z2 = zeta * zeta
    q2 = q_z * q_z
    alpha = np.sqrt(q2 + z2)
    beta = np.sqrt(np.asarray(q2 + z2 * voigt_effective_permittivity(eps), dtype=complex))
    return Kinematics(zeta=zeta, q_z=q_z, alpha=alpha, beta=beta)


def _slab_filter(r0, decay, thickness):
    # isotropic two-interface sum r0 (1 - e) / (1 - r0^2 e), e = exp(-2 decay d)
    if math.isinf(thickness):
        return r0
    e = np.exp(-2.0 * decay * thickness)
    return r0 * (1.0 - e) / (1.0 - r0 * r0 * e)


def reflection_te(kin: Kinematics, eps: VoigtPermittivity, geom: SlabGeometry = HALF_SPACE):
    """TE amplitude ``(alpha - beta_x) / (alpha + beta_x)``, filtered by the slab.

    ``beta_x = sqrt(q_z**2 + zeta**2 eps_xx)``. No dependence on the field
    strength because ``eps_xx`` has none.
    """
    beta_x = np.sqrt(
        np.asarray(kin.q_z**2 + kin.zeta**2 * np.asarray(eps.eps_xx), dtype=complex)
    )
    r0 = (kin.alpha - beta_x) / (kin.alpha + beta_x)
    return _slab_filter(r0, beta_x, geom.thickness)


def _tm_admittances(kin: Kinematics, eps: VoigtPermittivity):
    # E_z / H_x ratios (up to the common factor -i/omega) of the two medium
    # waves exp(+beta y) and exp(-beta y)
    eps_yy = np.asarray(eps.eps_yy)
    eps_yz = np.asarray(eps.eps_yz)
    det = eps_yy * voigt_effective_permittivity(eps)
    if np.any(det == 0):
        raise DomainError("eps_yy * eps_v = 0: TM surface admittance is singular")
    gyro = 1j * kin.q_z * eps_yz
    up = (kin.beta * eps_yy - gyro) / det
    down = (-kin.beta * eps_yy - gyro) / det
    return up, down


def reflection_tm_halfspace(kin: Kinematics, eps: VoigtPermittivity):
    """TM amplitude ``(alpha - L) / (alpha + L)`` of a half-space.

    ``L = (beta eps_yy - i q_z eps_yz) / (eps_yy eps_v)`` is the surface
    admittance from continuity of ``H_x`` and ``E_z`` at ``y = 0``. With
    ``eps_yz = 0`` this is the Fresnel form ``(eps alpha - beta)/(eps alpha + beta)``.
    """
    admittance, _ = _tm_admittances(kin, eps)
    return (kin.alpha - admittance) / (kin.alpha + admittance)


def reflection_tm_slab(kin: Kinematics, eps: VoigtPermittivity, geom: SlabGeometry):
    """TM amplitude of a free-standing slab of finite thickness.

    The inner waves are written as ``C+ exp(beta y) + C- exp(-beta (y + d))``
    so no exponential exceeds one. Eliminating the back face leaves an
    effective admittance at the front face.
    """
    if geom.is_half_space:
        return reflection_tm_halfspace(kin, eps)
    up, down = _tm_admittances(kin, eps)
    alpha = kin.alpha
    back = (up - alpha) / (alpha - down)
    e2 = np.exp(-2.0 * kin.beta * geom.thickness)
    denom = 1.0 + back * e2
    scale = 1.0 + np.abs(back * e2)
    if np.any(np.abs(denom) < _CONDITIONING_FLOOR * scale):
        raise ConditioningError(
            "slab matching system is near-singular",
            min_denominator=float(np.min(np.abs(denom))),
            thickness=geom.thickness,
        )
    admittance = (up + down * back * e2) / denom
    return (alpha - admittance) / (alpha + admittance)


def reflection_tm(kin: Kinematics, eps: VoigtPermittivity, geom: SlabGeometry = HALF_SPACE):
    if geom.is_half_space:
        return reflection_tm_halfspace(kin, eps)
    return reflection_tm_slab(kin, eps, geom)


def reflection_pair(zeta, q_z, eps: VoigtPermittivity, geom: SlabGeometry = HALF_SPACE) -> ReflectionPair:
    kin = kinematics(zeta, q_z, eps)
    return ReflectionPair(r_s=reflection_te(kin, eps, geom), r_p=reflection_tm(kin, eps, geom))


def mirror_pair_reflectances(zeta, q_z, eps: VoigtPermittivity, geom: SlabGeometry = HALF_SPACE):
    """Round-trip reflectances ``(r_s**2, r_p(q) r_p(-q))`` between facing plates.

    The second plate is the mirror image of the first, which flips the sign
    of ``q_z`` seen by its gyrotropic term. Both products are real on the
    imaginary axis.
    """
    kin = kinematics(zeta, q_z, eps)
    kin_back = Kinematics(kin.zeta, -kin.q_z, kin.alpha, kin.beta)
    r_s = reflection_te(kin, eps, geom)
    r_p = reflection_tm(kin, eps, geom) * reflection_tm(kin_back, eps, geom)
    return (r_s * r_s).real, r_p.real


# --- brute-force oracle ---------------------------------------------------


def field_matrix(omega: complex, q_z: float, tensor: np.ndarray) -> np.ndarray:
    """First-order system ``d psi / dy = M psi`` for ``psi = (E_x, H_z, H_x, E_z)``.

    Built directly from the curl equations for a general 3x3 tensor, with
    ``E_y`` and ``H_y`` eliminated. No decay constants are assumed.
    """
    e = np.asarray(tensor, dtype=complex)
    w = complex(omega)
    q = float(q_z)
    # E_y = a_ex E_x + a_hx H_x + a_ez E_z
    a_ex = -e[1, 0] / e[1, 1]
    a_hx = -q / (w * e[1, 1])
    a_ez = -e[1, 2] / e[1, 1]
    m = np.zeros((4, 4), dtype=complex)
    # E_x' = -i w H_z
    m[0, 1] = -1j * w
    # H_z' = i q^2 E_x / w - i w (e_xx E_x + e_xy E_y + e_xz E_z)
    m[1, 0] = 1j * q * q / w - 1j * w * (e[0, 0] + e[0, 1] * a_ex)
    m[1, 2] = -1j * w * e[0, 1] * a_hx
    m[1, 3] = -1j * w * (e[0, 2] + e[0, 1] * a_ez)
    # H_x' = i w (e_zx E_x + e_zy E_y + e_zz E_z)
    m[2, 0] = 1j * w * (e[2, 0] + e[2, 1] * a_ex)
    m[2, 2] = 1j * w * e[2, 1] * a_hx
    m[2, 3] = 1j * w * (e[2, 2] + e[2, 1] * a_ez)
    # E_z' = i w H_x + i q E_y
    m[3, 0] = 1j * q * a_ex
    m[3, 2] = 1j * w + 1j * q * a_hx
    m[3, 3] = 1j * q * a_ez
    return m


def _vacuum_modes(omega: complex, q_z: float):
    # (TE, TM) eigenvectors growing toward +y, and (TE, TM) decaying toward +y
    m = field_matrix(omega, q_z, np.eye(3))
    grow, decay = [], []
    for block, norm_index in ((slice(0, 2), 0), (slice(2, 4), 2)):
        vals, vecs = np.linalg.eig(m[block, block])
        order = np.argsort(-vals.real)
        for slot, idx in zip((grow, decay), order):
            v = np.zeros(4, dtype=complex)
            v[block] = vecs[:, idx]
            slot.append(v / v[norm_index])
    return grow, decay


def _solve_match(columns, rhs):
    a = np.column_stack([c / np.linalg.norm(c) for c in columns])
    scale = np.array([np.linalg.norm(c) for c in columns])
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e13:
        raise ConditioningError("oracle matching matrix is singular", condition=float(cond))
    return np.linalg.solve(a, rhs) / scale


def _oracle_once(zeta, q_z, tensor, thickness, polarization, n_steps):
    omega = 1j * zeta
    grow, decay = _vacuum_modes(omega, q_z)
    incident = grow[0] if polarization == "s" else grow[1]
    m = field_matrix(omega, q_z, tensor)
    if math.isinf(thickness):
        vals, vecs = np.linalg.eig(m)
        inward = np.argsort(-vals.real)[:2]
        if np.any(vals[inward].real <= 0):
            raise ConvergenceError("medium has no decaying pair of modes", eigenvalues=vals)
        medium = [vecs[:, i] for i in inward]
    else:
        step = expm(m * (thickness / n_steps))
        prop = np.eye(4, dtype=complex)
        for _ in range(n_steps):
            prop = step @ prop
        # vacuum below the slab: waves decaying toward -y grow toward +y
        medium = [prop @ grow[0], prop @ grow[1]]
    coeffs = _solve_match([decay[0], decay[1], -medium[0], -medium[1]], -incident)
    return coeffs[0] if polarization == "s" else coeffs[1]


def reflection_numeric_oracle(
    kin: Kinematics,
    eps: VoigtPermittivity,
    geom: SlabGeometry = HALF_SPACE,
    polarization: str = "p",
    n_steps: int = 64,
    tol: float = 1e-9,
) -> complex:
    """Reflection amplitude by direct solution of the 4x4 field equations.

    Uses only ``zeta``, ``q_z`` and the assembled 3x3 tensor: the half-space
    modes come from a numerical eigen-decomposition, a slab is crossed by
    chaining ``n_steps`` propagation matrices over a uniform grid. Slabs are
    recomputed on a grid twice as fine and the two must agree within ``tol``.
    Scalar inputs only.
    """
    if polarization not in ("s", "p"):
        raise ValueError(f"polarization must be 's' or 'p', got {polarization!r}")
    zeta = float(kin.zeta)
    q_z = float(kin.q_z)
    tensor = eps.tensor()
    r = _oracle_once(zeta, q_z, tensor, geom.thickness, polarization, n_steps)
    if not geom.is_half_space:
        fine = _oracle_once(zeta, q_z, tensor, geom.thickness, polarization, 2 * n_steps)
        if abs(fine - r) > tol * max(abs(fine), 1e-300) and abs(fine - r) > tol:
            raise ConvergenceError(
                "oracle grid refinement did not converge", coarse=r, fine=fine
            )
        r = fine
    return complex(r)


def mode_conversion_oracle(kin: Kinematics, eps: VoigtPermittivity, geom: SlabGeometry = HALF_SPACE) -> float:
    """Largest cross-polarized amplitude |r_ps|, |r_sp| from the 4x4 solver."""
    zeta, q_z = float(kin.zeta), float(kin.q_z)
    tensor = eps.tensor()
    omega = 1j * zeta
    grow, decay = _vacuum_modes(omega, q_z)
    m = field_matrix(omega, q_z, tensor)
    worst = 0.0
    for pol in (0, 1):
        if geom.is_half_space:
            vals, vecs = np.linalg.eig(m)
            inward = np.argsort(-vals.real)[:2]
            medium = [vecs[:, i] for i in inward]
        else:
            prop = expm(m * geom.thickness)
            medium = [prop @ grow[0], prop @ grow[1]]
        coeffs = _solve_match([decay[0], decay[1], -medium[0], -medium[1]], -grow[pol])
        worst = max(worst, abs(coeffs[1 - pol]))
    return worst
