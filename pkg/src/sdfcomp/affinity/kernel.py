"""The complex phi-kernel, its parameters and the truncation rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class KernelParams:
    """Affinity kernel settings.

    Attributes
    ----------
    sigma : float
        Thickness factor, the width of the medial Gaussian in ``|tan angle| - 1``.
    lambda1, lambda2 : float
        Exterior and interior weights.  ``penalty = lambda2 / lambda1``.
    eps : float
        Truncation factor of the contact region; 0 integrates the whole boundary.
    probe_radius : float
        Skin thickness R of the double-skin baseline.
    dgamma : float
        Angular precision of the boundary quadrature (radians in 2D,
        steradians in 3D): no quadrature cell subtends more than this.
    """

    sigma: float = 0.5
    lambda1: float = 1.0
    lambda2: float = 3.0
    eps: float = 1.5
    probe_radius: float = 0.5
    dgamma: float = 1e-4

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise ValueError("lambda1 and lambda2 must be positive")
        if not self.eps >= 0:
            raise ValueError("eps must be non-negative")
        if not self.probe_radius > 0:
            raise ValueError("probe_radius must be positive")
        if not self.dgamma > 0:
            raise ValueError("dgamma must be positive")

    @property
    def penalty(self) -> float:
        return self.lambda2 / self.lambda1

    def with_penalty(self, penalty: float) -> "KernelParams":
        """Same product lambda1 * lambda2, new ratio lambda2 / lambda1."""
        prod = self.lambda1 * self.lambda2
        l1 = math.sqrt(prod / penalty)
        return replace(self, lambda1=l1, lambda2=l1 * penalty)

    def replace(self, **kw) -> "KernelParams":
        return replace(self, **kw)


def g_sigma(x: float, sigma: float) -> float:
    """Normalized Gaussian exp(-x^2 / 2 sigma^2) / (sqrt(2 pi) sigma)."""
    return INV_SQRT_2PI / sigma * math.exp(-0.5 * (x / sigma) ** 2)


def phi_kernel(z: complex, params: KernelParams) -> complex:
    """Evaluate the phi-kernel at a point of the complex plane.

    ``phi(z) = lambda(z) / sqrt(2 pi) * z**-2 * g_sigma(|tan angle z| - 1)`` with
    ``lambda = +lambda1`` on the right half-plane and ``-lambda2`` on the left.
    With ``params.eps > 0`` the kernel is cut to zero outside
    ``| |tan angle z| - 1 | <= eps``.

    Raises
    ------
    ValueError
        On the imaginary axis, where the kernel is discontinuous.
    """
    z = complex(z)
    if z.real == 0.0:
        raise ValueError("phi-kernel is undefined on the imaginary axis")
    t = abs(z.imag / z.real) - 1.0
    if params.eps > 0 and abs(t) > params.eps:
        return 0j
    lam = params.lambda1 if z.real > 0 else -params.lambda2
    return lam * INV_SQRT_2PI * g_sigma(t, params.sigma) / (z * z)


def truncation_epsilon(params: KernelParams, E_m: float, gamma_m: float) -> float:
    """Smallest truncation factor whose neglected tail is bounded by ``E_m``.

    ``eps = sigma * sqrt(2 ln(lambda gamma_m / (2 pi sigma E_m)))`` with the
    conservative ``lambda = max(lambda1, lambda2)``.  ``gamma_m`` bounds the
    unsigned spatial angle of the boundary (4 pi in 3D, 2 pi in 2D at most).
    Returns 0 when the bound holds without truncation.
    """
    if not E_m > 0:
        raise ValueError("E_m must be positive")
    if not 0 < gamma_m <= 4 * math.pi:
        raise ValueError("gamma_m must lie in (0, 4 pi]")
    lam = max(params.lambda1, params.lambda2)
    arg = lam * gamma_m / (2 * math.pi * params.sigma * E_m)
    if arg <= 1.0:
        return 0.0
    return params.sigma * math.sqrt(2.0 * math.log(arg))


def full_angle(dim: int) -> float:
    """Spatial angle of a surrounding boundary: 2 pi rad (2D), 4 pi sr (3D)."""
    return 2 * math.pi if dim == 2 else 4 * math.pi
