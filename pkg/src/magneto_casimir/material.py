"""Magneto-Drude response of a doped semiconductor in a static magnetic field.

Units: frequencies are measured in the plasma frequency, so ``omega = 1`` is
the plasma resonance and the reduced cyclotron frequency ``omega_c_reduced``
is ``omega_c / omega_p``. The plasma frequency is the screened one,
``omega_p**2 = 4 pi n q**2 / (eps_l m)``, which is why the background
permittivity multiplies the free-carrier term in every component.

Carriers are taken to be electrons. Their cyclotron rotation is opposite to
the field, so the signed cyclotron frequency entering the Drude equation of
motion is ``-omega_c_reduced``. With this choice a field along +x gives the
familiar Voigt tensor with ``eps_yz = +i eps_l Oc / (w (w**2 - Oc**2))`` on
the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# x-hat: the field direction for which the Voigt components below hold
# (surface normal along y, in-plane propagation along z).
VOIGT_FIELD = np.array([1.0, 0.0, 0.0])

CARRIER_SIGN = -1.0

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_i, _j, _k] = 1.0
    _LEVI_CIVITA[_i, _k, _j] = -1.0


@dataclass(frozen=True)
class Material:
    """Magnetoplasma slab material in reduced units.

    Parameters
    ----------
    eps_l : float
        Background (lattice) permittivity.
    omega_c_reduced : float
        Cyclotron frequency over plasma frequency, ``>= 0``.
    gamma_reduced : float
        Drude damping rate over plasma frequency, ``>= 0``.
    """

    eps_l: float = 15.4
    omega_c_reduced: float = 0.0
    gamma_reduced: float = 0.0

    def __post_init__(self):
        for name in ("eps_l", "omega_c_reduced", "gamma_reduced"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.eps_l < 1.0:
            raise DomainError(f"eps_l must be >= 1, got {self.eps_l}")
        if self.omega_c_reduced < 0.0:
            raise DomainError(f"omega_c_reduced must be >= 0, got {self.omega_c_reduced}")
        if self.gamma_reduced < 0.0:
            raise DomainError(f"gamma_reduced must be >= 0, got {self.gamma_reduced}")

    def with_field(self, omega_c_reduced: float) -> "Material":
        return Material(self.eps_l, omega_c_reduced, self.gamma_reduced)


@dataclass(frozen=True)
class VoigtPermittivity:
    """Independent components of the Voigt dielectric tensor.

    ``eps_zz == eps_yy`` and ``eps_zy == -eps_yz``; ``eps_xx`` is the component
    along the field. Fields may be scalars or broadcastable arrays.
    """

    eps_xx: complex
    eps_yy: complex
    eps_yz: complex

    @property
    def eps_zz(self):
        return self.eps_yy

    @property
    def eps_zy(self):
        return -self.eps_yz

    def tensor(self) -> np.ndarray:
        """Assemble the full 3x3 tensor, shape ``(..., 3, 3)``."""
        xx, yy, yz = np.broadcast_arrays(
            np.asarray(self.eps_xx, dtype=complex),
            np.asarray(self.eps_yy, dtype=complex),
            np.asarray(self.eps_yz, dtype=complex),
        )
        out = np.zeros(xx.shape + (3, 3), dtype=complex)
        out[..., 0, 0] = xx
        out[..., 1, 1] = yy
        out[..., 2, 2] = yy
        out[..., 1, 2] = yz
        out[..., 2, 1] = -yz
        return out


def _check_direction(b_direction, material: Material) -> np.ndarray:
    b = np.asarray(b_direction, dtype=float)
    if b.shape != (3,):
        raise DomainError(f"b_direction must be a 3-vector, got shape {b.shape}")
    norm = np.linalg.norm(b)
    if norm == 0.0:
        if material.omega_c_reduced > 0.0:
            raise DomainError("b_direction has zero norm but omega_c_reduced > 0")
        return b
    if abs(norm - 1.0) > 1e-12:
        raise DomainError(f"b_direction must have unit norm, got |b| = {norm}")
    return b


def conductivity_tensor(omega, b_direction, material: Material) -> np.ndarray:
    """Magneto-Drude conductivity tensor.

    Returned as ``4 pi sigma / omega_p`` so that the dielectric tensor is
    ``eps_l * delta + 1j * sigma / omega``. ``omega`` may be complex (use
    ``1j * zeta`` for the imaginary axis) and may be an array; the result has
    shape ``omega.shape + (3, 3)``.
    """
    omega = np.asarray(omega, dtype=complex)
    if np.any(omega == 0):
        raise DomainError("conductivity is singular at zero frequency")
    b = _check_direction(b_direction, material)

    tau = 1.0 / (material.gamma_reduced - 1j * omega)
    wt = CARRIER_SIGN * material.omega_c_reduced * tau
    tau = tau[..., None, None]
    wt = wt[..., None, None]
    delta = np.eye(3)
    hall = np.einsum("ijk,k->ij", _LEVI_CIVITA, b)
    along = np.outer(b, b)
    return material.eps_l * tau * (delta + wt * hall + wt**2 * along) / (1.0 + wt**2)


def dielectric_tensor(omega, b_direction, material: Material) -> np.ndarray:
    """Dielectric tensor ``eps_l * delta_ij + (i / omega) sigma_ij``."""
    omega = np.asarray(omega, dtype=complex)
    sigma = conductivity_tensor(omega, b_direction, material)
    return material.eps_l * np.eye(3) + 1j * sigma / omega[..., None, None]


def voigt_components(zeta, material: Material) -> VoigtPermittivity:
    """Lossless Voigt components continued to imaginary frequency ``i zeta``.

    All three are real: ``eps_xx = eps_l (1 + 1/z**2)``,
    ``eps_yy = eps_l (1 + 1/(z**2 + Oc**2))`` and
    ``eps_yz = -eps_l Oc / (z (z**2 + Oc**2))``.
    """
    if material.gamma_reduced != 0.0:
        raise DomainError("closed-form Voigt components require gamma_reduced = 0")
    zeta = np.asarray(zeta, dtype=float)
    if np.any(~(zeta > 0)):
        raise DomainError("zeta must be > 0")
    eps_l = material.eps_l
    oc = material.omega_c_reduced
    z2 = zeta * zeta
    s = z2 + oc * oc
    return VoigtPermittivity(
        eps_xx=eps_l * (1.0 + 1.0 / z2),
        eps_yy=eps_l * (1.0 + 1.0 / s),
        eps_yz=-eps_l * oc / (zeta * s),
    )


def imaginary_axis_components(zeta, material: Material) -> VoigtPermittivity:
    """Voigt components at ``i zeta`` for any damping.

    Uses the closed forms when ``gamma_reduced == 0`` and otherwise reads the
    components off the full tensor for a field along x. Damped values are
    real on the imaginary axis as well, so the imaginary parts are dropped.
    """
    if material.gamma_reduced == 0.0:
        return voigt_components(zeta, material)
    zeta = np.asarray(zeta, dtype=float)
    if np.any(~(zeta > 0)):
        raise DomainError("zeta must be > 0")
    eps = dielectric_tensor(1j * zeta, VOIGT_FIELD, material).real
    return VoigtPermittivity(eps[..., 0, 0], eps[..., 1, 1], eps[..., 1, 2])


def real_axis_components(omega, material: Material) -> VoigtPermittivity:
    """Voigt components on the real frequency axis.

    Lossless closed forms for ``gamma_reduced == 0``; with damping the
    components come from the full tensor. Raises :class:`DomainError` at
    the undamped cyclotron resonance ``omega == omega_c_reduced``.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise DomainError("omega must be > 0")
    eps_l = material.eps_l
    oc = material.omega_c_reduced
    if material.gamma_reduced > 0.0:
        eps = dielectric_tensor(omega.astype(complex), VOIGT_FIELD, material)
        return VoigtPermittivity(eps[..., 0, 0], eps[..., 1, 1], eps[..., 1, 2])
    d = omega * omega - oc * oc
    if np.any(d == 0):
        raise DomainError(
            f"cyclotron resonance: omega = omega_c_reduced = {oc} is a pole without damping"
        )
    return VoigtPermittivity(
        eps_xx=np.asarray(eps_l * (1.0 - 1.0 / omega**2), dtype=complex),
        eps_yy=np.asarray(eps_l * (1.0 - 1.0 / d), dtype=complex),
        eps_yz=1j * eps_l * oc / (omega * d),
    )
